//! Fixtures shared by the benchmarks.

use auglag_core::problems;
use auglag_core::Discretization;

/// Discretization of a named problem with `cells` cells per axis.
pub fn fixture(name: &str, cells: usize) -> Discretization {
    let spec = problems::by_name(name, None).expect("known problem");
    Discretization::new(&spec, spec.domain.grid(cells).expect("valid grid")).expect("valid problem")
}
