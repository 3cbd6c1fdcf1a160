//! Lebesgue measure is stationary for border systems meeting the
//! probability condition; uniform stays uniform under the transfer operator.
use amdyn::measure::{kolmogorov_distance, lebesgue_check, transfer_step, PiecewiseDensity};
use amdyn::AmSystem;

fn main() -> amdyn::Result<()> {
    for (sys, p) in [
        (AmSystem::new(2.0 / 3.0, 2.0, 2.0 / 3.0, 2.0)?, 0.5),
        (AmSystem::new(0.5, 4.0, 0.5, 4.0)?, 0.5),
    ] {
        let v = lebesgue_check(&sys, p)?;
        let one = transfer_step(&sys, p, &PiecewiseDensity::uniform());
        println!(
            "{:?} -> lebesgue {} (residuals {:.3e}, {:.3e}); one step moves uniform by {:.3e}",
            sys.classify_type(),
            v.lebesgue,
            v.residual1,
            v.residual2,
            kolmogorov_distance(&one, &PiecewiseDensity::uniform()),
        );
    }
    Ok(())
}
