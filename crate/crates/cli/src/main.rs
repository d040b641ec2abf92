use std::process::ExitCode;

use auglag_cli::{resolve, run_and_emit, Cli, CliError};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli).map_err(CliError::from).and_then(|config| run_and_emit(&config));
    match result {
        Ok(reports) => {
            let mut all_converged = true;
            for r in &reports {
                let s = &r.summary;
                let c = s.counts;
                println!(
                    "{}: converged={} outer={} (successful {}, intermediate {}, not successful {}) alpha={:.3e} rho={:.3e} stop={:.3e}{} -> {}",
                    r.name,
                    s.converged,
                    s.outer_iterations,
                    c.successful,
                    c.intermediate,
                    c.not_successful,
                    s.final_values.alpha,
                    s.final_values.rho,
                    s.final_values.stop_residual,
                    s.final_values.err_u_l2.map(|e| format!(" err_u={e:.3e}")).unwrap_or_default(),
                    r.files.summary.display(),
                );
                all_converged &= s.converged;
            }
            if all_converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: not every run converged");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
