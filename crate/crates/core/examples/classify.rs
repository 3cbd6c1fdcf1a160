//! Type, Lyapunov exponents and resonance detection for a few systems.
use amdyn::system::Endpoint;
use amdyn::{AmSystem, ResonantSystem};

fn main() -> amdyn::Result<()> {
    let systems = [
        ("border", AmSystem::new(2.0 / 3.0, 2.0, 2.0 / 3.0, 2.0)?),
        ("disjoint", AmSystem::new(0.5, 4.0, 0.5, 4.0)?),
        ("non-resonant", AmSystem::new(0.5, 3.0, 0.5, 3.0)?),
        ("overlapping", AmSystem::new(0.9, 1.5, 0.9, 1.5)?),
        ("(5:2) resonant", ResonantSystem::new(0.45, 5, 2, 0.5)?.system()),
    ];
    for (name, sys) in &systems {
        let l = sys.lyapunov_exponents(0.5)?;
        println!(
            "{name:>15}: {:<11} x_- = {:.6}  x_+ = {:.6}  lambda = ({:.4}, {:.4})  resonance at 0: {:?}",
            sys.classify_type().as_str(),
            sys.x_minus(),
            sys.x_plus(),
            l.lambda0,
            l.lambda1,
            sys.detect_resonance(Endpoint::Zero, 50, 1e-10),
        );
    }
    Ok(())
}
