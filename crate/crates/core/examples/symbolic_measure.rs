//! Symbolic weights of the stationary measure for l = 1 and the masses of
//! a few cylinders, compared with orbit frequencies.
use amdyn::measure::OrbitSamples;
use amdyn::resonant::{cylinder_mass, ifs_apply, measure_dimension, symbolic_weights, Geometry};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let p = 0.4;
    let res = ResonantSystem::new(0.5, 2, 1, p)?;
    let w = symbolic_weights(2, p)?;
    println!("{}", amdyn::format::to_json_string(&w.to_json()));
    println!("dim mu = {:.6}", measure_dimension(2, p, 0.5)?);
    let samples = OrbitSamples::simulate(&res.system(), p, 1000, 1_000_000, 2)?;
    let (lo, hi) = Geometry::from_system(&res)?.base_interval(-1);
    for r in 1..=2 {
        let (a, b) = (ifs_apply(0.5, 2, 1, r, &[], lo)?, ifs_apply(0.5, 2, 1, r, &[], hi)?);
        println!(
            "I(-1; {r}): predicted {:.5}, observed {:.5}",
            cylinder_mass(&w, -1, &[r])?,
            samples.fraction_between(a.min(b), a.max(b)),
        );
    }
    Ok(())
}
