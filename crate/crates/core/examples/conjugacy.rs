//! The conjugacy between two (2:1) systems with different scales.
use amdyn::conjugacy::{locate, verify_conjugacy, Conjugacy, DEFAULT_MAX_DEPTH};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let f = ResonantSystem::new(0.5, 2, 1, 0.5)?;
    let g = ResonantSystem::new(0.55, 2, 1, 0.5)?;
    let h = Conjugacy::new(&f, &g)?;
    for x in [0.05, 0.12, 2.0 / 7.0, 0.375, 0.5, 0.8] {
        let code = locate(&f, x, DEFAULT_MAX_DEPTH)?;
        println!("h({x:.6}) = {:.9}   {:?} at depth {}", h.eval(x, 1e-10)?.value, code.kind, code.depth);
    }
    let rep = verify_conjugacy(&f, &g, 1000, 1e-10, 4)?;
    println!("max |g h - h f| = {:.2e}, monotone {}", rep.max_residual, rep.monotone);
    Ok(())
}
