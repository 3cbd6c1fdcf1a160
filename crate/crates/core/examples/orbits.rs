//! A seeded orbit, its jumps over the central gap, and two orbits
//! synchronising under one word.
use amdyn::dynamics::{detect_jumps, orbit, sample_word, synchronization_gap};
use amdyn::ResonantSystem;

fn main() -> amdyn::Result<()> {
    let sys = ResonantSystem::new(0.5, 2, 1, 0.5)?.system();
    let word = sample_word(7, 40, 0.5)?;
    let o = orbit(&sys, 0.3, &word)?;
    println!("word  {word}");
    for (n, x) in o.points.iter().enumerate().take(10) {
        println!("x_{n:<2} = {x:.9}");
    }
    let jumps = detect_jumps(&sys, &o)?;
    println!("central gap {:?}, jumps at {:?}", jumps.central, jumps.times);

    let long = sample_word(7, 10_000, 0.5)?;
    let gaps = synchronization_gap(&sys, 0.3, 0.7, &long)?;
    for n in [0, 10, 100, 1000, 10_000] {
        println!("|x_n - y_n| at n = {n:>5}: {:.3e}", gaps[n]);
    }
    Ok(())
}
