//! Random orbits driven by Bernoulli sign sequences, jumps over the central
//! interval, synchronization and samples of the limit set.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::Result;
use crate::format::csv_num;
use crate::rng::SplitMix64;
use crate::system::{check_probability, check_unit, AmSystem, Sign, SidedPoint};

/// A finite sign sequence; `signs[n]` is applied at step `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word {
    pub signs: Vec<Sign>,
}

impl Word {
    pub fn new(signs: Vec<Sign>) -> Self {
        Word { signs }
    }

    pub fn constant(sign: Sign, n: usize) -> Self {
        Word {
            signs: vec![sign; n],
        }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn minus_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s == Sign::Minus).count()
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.signs {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Draws the next sign from `rng`.
#[inline]
pub fn draw_sign(rng: &mut SplitMix64, p_minus: f64) -> Sign {
    if rng.next_f64() < p_minus {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

pub fn sample_word(seed: u64, n: usize, p_minus: f64) -> Result<Word> {
    check_probability(p_minus)?;
    let mut rng = SplitMix64::new(seed);
    Ok(Word {
        signs: (0..n).map(|_| draw_sign(&mut rng, p_minus)).collect(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub x0: f64,
    pub points: Vec<f64>,
    pub word: Word,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One value per line after a `#` comment line and an `x` header.
    pub fn write_csv<W: Write>(&self, out: &mut W, comment: &str) -> io::Result<()> {
        write_points_csv(out, comment, &self.points)
    }
}

/// Shared layout for orbits and point clouds.
pub fn write_points_csv<W: Write>(out: &mut W, comment: &str, points: &[f64]) -> io::Result<()> {
    writeln!(out, "# {comment}")?;
    writeln!(out, "x")?;
    for &x in points {
        writeln!(out, "{}", csv_num(x))?;
    }
    Ok(())
}

pub fn orbit(sys: &AmSystem, x0: f64, word: &Word) -> Result<Orbit> {
    check_unit(x0)?;
    let mut points = Vec::with_capacity(word.len() + 1);
    let mut p = SidedPoint::new(x0);
    points.push(x0);
    for &s in &word.signs {
        p = sys.apply_sided(s, p);
        points.push(p.value());
    }
    Ok(Orbit {
        x0,
        points,
        word: word.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord {
    pub times: Vec<usize>,
    pub central: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    Centre,
}

#[inline]
fn side_of(x: f64, central: (f64, f64)) -> Side {
    if x <= central.0 {
        Side::Left
    } else if x >= central.1 {
        Side::Right
    } else {
        Side::Centre
    }
}

#[inline]
fn is_jump(a: Side, b: Side) -> bool {
    matches!((a, b), (Side::Left, Side::Right) | (Side::Right, Side::Left))
}

/// Steps `s` at which `points[s]` and `points[s+1]` lie in opposite closed
/// components `[0, f_-(x_-)]` and `[f_+(x_+), 1]`.
pub fn detect_jumps(sys: &AmSystem, orbit: &Orbit) -> Result<JumpRecord> {
    let central = sys.central_interval()?;
    let times = orbit
        .points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| is_jump(side_of(w[0], central), side_of(w[1], central)))
        .map(|(s, _)| s)
        .collect();
    Ok(JumpRecord { times, central })
}

/// `|x_n - y_n|` along a common word, starting with `|x0 - y0|`.
pub fn synchronization_gap(sys: &AmSystem, x0: f64, y0: f64, word: &Word) -> Result<Vec<f64>> {
    check_unit(x0)?;
    check_unit(y0)?;
    let mut x = SidedPoint::new(x0);
    let mut y = SidedPoint::new(y0);
    let mut gaps = Vec::with_capacity(word.len() + 1);
    gaps.push(x.distance(y));
    for &s in &word.signs {
        x = sys.apply_sided(s, x);
        y = sys.apply_sided(s, y);
        gaps.push(x.distance(y));
    }
    Ok(gaps)
}

/// Parameters for [`omega_limit_sample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaSampling {
    pub p_minus: f64,
    pub n_orbits: usize,
    pub length: usize,
    pub min_jumps: usize,
    pub tail: usize,
    pub seed: u64,
}

/// Last `tail` points of every orbit from `x0` that jumped at least
/// `min_jumps` times. Orbit `i` uses the `i`-th stream seed, so the result
/// does not depend on the thread count.
pub fn omega_limit_sample(sys: &AmSystem, x0: f64, opts: &OmegaSampling) -> Result<Vec<f64>> {
    check_unit(x0)?;
    check_probability(opts.p_minus)?;
    let central = sys.central_interval()?;
    if opts.min_jumps < 1 {
        return Err(crate::error::out_of_range("min_jumps must be at least 1"));
    }
    if opts.tail >= opts.length {
        return Err(crate::error::out_of_range(format!(
            "tail ({}) must be smaller than length ({})",
            opts.tail, opts.length
        )));
    }
    let seeds = SplitMix64::stream_seeds(opts.seed, opts.n_orbits);
    let kept: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = SplitMix64::new(seed);
            let mut p = SidedPoint::new(x0);
            let mut side = side_of(x0, central);
            let mut jumps = 0usize;
            let mut tail = Vec::with_capacity(opts.tail);
            for n in 1..=opts.length {
                p = sys.apply_sided(draw_sign(&mut rng, opts.p_minus), p);
                let x = p.value();
                let s = side_of(x, central);
                if is_jump(side, s) {
                    jumps += 1;
                }
                side = s;
                if n > opts.length - opts.tail {
                    tail.push(x);
                }
            }
            if jumps >= opts.min_jumps {
                tail
            } else {
                Vec::new()
            }
        })
        .collect();
    Ok(kept.into_iter().flatten().collect())
}
