//! Samples the limit set of a disjoint system from orbits that keep
//! jumping, and prints a coarse histogram of where they end up.
use amdyn::dynamics::{omega_limit_sample, OmegaSampling};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let sys = ResonantSystem::new(0.5, 2, 1, 0.5)?.system();
    let opts = OmegaSampling {
        p_minus: 0.5,
        n_orbits: 2000,
        length: 500,
        min_jumps: 5,
        tail: 50,
        seed: 3,
    };
    let pts = omega_limit_sample(&sys, 0.5, &opts)?;
    let mut bins = [0usize; 28];
    for x in &pts {
        bins[((x * 28.0) as usize).min(27)] += 1;
    }
    println!("{} points; 28 bins of [0, 1] (the central gap is bins 12..16):", pts.len());
    for (i, c) in bins.iter().enumerate() {
        println!("{:>5.3} {}", i as f64 / 28.0, "#".repeat(c * 200 / pts.len()));
    }
    Ok(())
}
