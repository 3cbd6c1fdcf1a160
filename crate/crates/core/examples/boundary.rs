//! Exact data of the (5:2) resonance at rho = eta, plus the dimension
//! report there and just inside the disjoint regime.
use amdyn::resonant::{dimension_report, res_full_analysis};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let r = res_full_analysis();
    println!("{}", amdyn::format::to_json_string(&r.to_json()));
    for rho in [r.rho_star, 0.5] {
        let d = dimension_report(&ResonantSystem::new(rho, 5, 2, 0.5)?)?;
        println!("rho {rho:.6}: {}", amdyn::format::to_json_string(&d.to_json()));
    }
    Ok(())
}
