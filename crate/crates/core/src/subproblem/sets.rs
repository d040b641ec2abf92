use crate::discrete::Discretization;

/// Where a node's control sits in the pointwise solution formula.
///
/// With `p` the adjoint, the control is fixed to a bound or to zero on the
/// first three classes and given by `u = −(p + ξ)/α` with `ξ = ∓β` on the two
/// smooth branches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlSet {
    /// `p > β − α u_a`: `u = u_a`.
    Lower,
    /// `|p| < β`: `u = 0`.
    Zero,
    /// `p < −α u_b − β`: `u = u_b`.
    Upper,
    /// `β ≤ p ≤ β − α u_a`: `u = (β − p)/α ≤ 0`, `ξ = −β`.
    NegativeBranch,
    /// `−α u_b − β ≤ p ≤ −β`: `u = (−β − p)/α ≥ 0`, `ξ = β`.
    PositiveBranch,
}

impl ControlSet {
    pub const ALL: [ControlSet; 5] = [
        ControlSet::Lower,
        ControlSet::Zero,
        ControlSet::Upper,
        ControlSet::NegativeBranch,
        ControlSet::PositiveBranch,
    ];

    pub fn is_fixed(self) -> bool {
        matches!(self, ControlSet::Lower | ControlSet::Zero | ControlSet::Upper)
    }

    /// Classifies one node. Conditions are tested in the order lower, upper,
    /// zero, negative, positive; the zero set is open and the branches are
    /// closed, so ties at `|p| = β` go to a branch.
    pub fn classify(p: f64, alpha: f64, beta: f64, lower: f64, upper: f64) -> Self {
        if p > beta - alpha * lower {
            ControlSet::Lower
        } else if p < -alpha * upper - beta {
            ControlSet::Upper
        } else if p.abs() < beta {
            ControlSet::Zero
        } else if p >= beta {
            ControlSet::NegativeBranch
        } else {
            ControlSet::PositiveBranch
        }
    }
}

/// Active and inactive sets of one active-set iteration.
///
/// The five control sets partition the nodes by construction; the penalty
/// mask marks nodes with `μ + ρ(y − ψ) > 0`, where the shifted penalty is
/// active, and its complement is the inactive set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActiveSets {
    pub control: Vec<ControlSet>,
    pub penalty: Vec<bool>,
}

impl ActiveSets {
    pub fn len(&self) -> usize {
        self.control.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control.is_empty()
    }

    /// Boolean mask of one control set.
    pub fn mask(&self, set: ControlSet) -> Vec<bool> {
        self.control.iter().map(|&c| c == set).collect()
    }

    pub fn count(&self, set: ControlSet) -> usize {
        self.control.iter().filter(|&&c| c == set).count()
    }

    /// Nodes where `μ + ρ(y − ψ) > 0`.
    pub fn penalty_active(&self) -> &[bool] {
        &self.penalty
    }

    pub fn penalty_inactive(&self) -> Vec<bool> {
        self.penalty.iter().map(|b| !b).collect()
    }

    pub fn penalty_count(&self) -> usize {
        self.penalty.iter().filter(|&&b| b).count()
    }
}

/// Nodewise classification from the current adjoint `p` and state `y`.
pub fn classify_sets(disc: &Discretization, p: &[f64], y: &[f64], mu: &[f64], alpha: f64, rho: f64) -> ActiveSets {
    let control = p
        .iter()
        .zip(disc.lower.iter().zip(disc.upper.iter()))
        .map(|(&p, (&a, &b))| ControlSet::classify(p, alpha, disc.beta, a, b))
        .collect();
    let penalty =
        y.iter().zip(mu.iter().zip(disc.obstacle.iter())).map(|(&y, (&m, &psi))| m + rho * (y - psi) > 0.0).collect();
    ActiveSets { control, penalty }
}
