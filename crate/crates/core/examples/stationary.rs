//! Stationary measure three ways: exact transfer iterates, Cesaro means,
//! and a long orbit.
use amdyn::measure::{
    iterate_to_stationary, kolmogorov_distance_samples, IterationMode, OrbitSamples, PiecewiseDensity,
};
use amdyn::AmSystem;

fn main() -> amdyn::Result<()> {
    let sys = AmSystem::new(0.5, 4.0, 0.5, 4.0)?;
    let p = 0.5;
    let orbit = OrbitSamples::simulate(&sys, p, 1000, 1_000_000, 1)?;
    for mode in [IterationMode::Direct, IterationMode::Cesaro] {
        let run = iterate_to_stationary(&sys, p, &PiecewiseDensity::uniform(), 60, 1e-12, mode)?;
        println!(
            "{mode:?}: {} iterations, {} pieces, step distance {:.2e}, distance to orbit {:.4}",
            run.iterations,
            run.density.pieces(),
            run.last_distance,
            kolmogorov_distance_samples(&run.density, &orbit),
        );
    }
    let gap = orbit.fraction_between(3.0 / 7.0 + 1e-12, 4.0 / 7.0 - 1e-12);
    println!("orbit mass inside the central gap: {gap}");
    Ok(())
}
