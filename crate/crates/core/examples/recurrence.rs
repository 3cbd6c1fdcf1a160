//! Masses of the copies I_j at the (5:2) boundary and the residuals of
//! their linear recurrence, with batch-means errors.
use amdyn::resonant::{empirical_recurrence, solve_eta};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let rho = solve_eta(5, 2)?;
    let res = ResonantSystem::new(rho, 5, 2, 0.5)?;
    let rec = empirical_recurrence(&res, 13, 10_000, 4_000_000, 40, 1)?;
    for (j, m) in rec.masses.iter().enumerate().take(8) {
        println!("m_{} = {m:.6}", j + 1);
    }
    for (j, r, s) in &rec.residuals {
        println!("j = {j:>2}: residual {r:+.2e}  sigma {s:.2e}");
    }
    Ok(())
}
