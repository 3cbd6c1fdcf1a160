//! The Cantor support of a resonant system: addressed intervals, a finite
//! cover, and its box-counting dimension next to the exact value.
use amdyn::resonant::{box_dimension_estimate, build_intervals, cantor_approx, solve_eta, support_dimension};

fn main() -> amdyn::Result<()> {
    for iv in build_intervals(0.45, 5, 2, 1, 1)? {
        println!("{:<28} [{:.8}, {:.8}]", iv.code_string(), iv.lo, iv.hi);
    }
    for (rho, k, l) in [(0.5, 2, 1), (0.4, 3, 1), (0.45, 5, 2)] {
        let a = cantor_approx(rho, k, l, 10, 1)?;
        println!(
            "({k}:{l}) rho {rho}: eta {:.6}, dim {:.6}, box estimate {:.4}, {} leaves",
            solve_eta(k, l)?,
            support_dimension(rho, k, l)?.dim,
            box_dimension_estimate(&a)?,
            a.intervals.len(),
        );
    }
    Ok(())
}
