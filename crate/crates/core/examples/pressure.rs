//! Pressure curve of the limit set and its zero.
use amdyn::resonant::{pressure, pressure_t0, solve_eta, solve_pressure_zero};

fn main() -> amdyn::Result<()> {
    let (rho, k, l) = (0.45, 5, 2);
    let t0 = pressure_t0(rho, l)?;
    let d = solve_pressure_zero(rho, k, l)?;
    println!("t0 = {t0:.6}, zero d = {d:.9}, rho^d = {:.9}, eta = {:.9}", rho.powf(d), solve_eta(k, l)?);
    for t in [0.6, 0.7, 0.8, d, 0.9, 1.0] {
        println!("P({t:.4}) = {:+.6}", pressure(rho, k, l, t)?);
    }
    Ok(())
}
