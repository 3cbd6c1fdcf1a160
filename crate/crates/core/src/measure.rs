//! Stationary measures: an exact transfer operator on piecewise-constant
//! densities, Monte Carlo estimates from long orbits, and distances and
//! dimension diagnostics between them.

use std::io::{self, Write};

use serde_json::{json, Value};

use crate::error::{out_of_range, Error, Result};
use crate::format::csv_num;
use crate::rng::SplitMix64;
use crate::system::{check_probability, AmSystem, Sign, SidedPoint, SystemClass};
use crate::dynamics::draw_sign;

/// Breakpoints closer than this are coalesced.
pub const BREAKPOINT_MERGE: f64 = 1e-12;
/// Adjacent pieces whose densities differ by less than this are merged.
pub const VALUE_MERGE: f64 = 1e-14;
/// Piece count above which a density is aggregated onto a uniform grid.
pub const DEFAULT_MAX_PIECES: usize = 1 << 20;

/// A probability density on `[0, 1]` that is constant between consecutive
/// breakpoints. `values[i]` is the density on `(breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(out_of_range("need n+1 breakpoints for n values"));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(out_of_range("breakpoints must start at 0 and end at 1"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(out_of_range("breakpoints must be strictly increasing"));
        }
        if values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(out_of_range("densities must be finite and nonnegative"));
        }
        let d = PiecewiseDensity { breakpoints, values };
        let m = d.total_mass();
        if (m - 1.0).abs() > 1e-10 {
            return Err(out_of_range(format!("total mass is {m}, expected 1")));
        }
        Ok(d)
    }

    pub fn uniform() -> Self {
        PiecewiseDensity {
            breakpoints: vec![0.0, 1.0],
            values: vec![1.0],
        }
    }

    /// Uniform density on `[lo, hi]`, used to stand in for point masses.
    pub fn block(lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(out_of_range(format!("invalid block [{lo}, {hi}]")));
        }
        let mut bps = vec![0.0];
        let mut vals = Vec::new();
        if lo > 0.0 {
            bps.push(lo);
            vals.push(0.0);
        }
        bps.push(hi);
        vals.push(1.0 / (hi - lo));
        if hi < 1.0 {
            bps.push(1.0);
            vals.push(0.0);
        }
        Ok(PiecewiseDensity {
            breakpoints: bps,
            values: vals,
        })
    }

    /// Approximates the point mass at `x` by a block of width `1e-9`.
    pub fn dirac(x: f64) -> Result<Self> {
        const W: f64 = 1e-9;
        let lo = (x - 0.5 * W).clamp(0.0, 1.0 - W);
        Self::block(lo, lo + W)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.values.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.piece_masses().sum()
    }

    fn piece_masses(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
    }

    /// Distribution function `F(x) = mu([0, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let i = self.breakpoints.partition_point(|&b| b <= x) - 1;
        let below: f64 = self.piece_masses().take(i).sum();
        below + self.values[i] * (x - self.breakpoints[i])
    }

    /// Mass of `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf(hi) - self.cdf(lo)).max(0.0)
    }

    /// Rows `(x, F(x))` at every breakpoint.
    pub fn cdf_table(&self) -> Vec<(f64, f64)> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.breakpoints.len());
        out.push((0.0, 0.0));
        for (m, &b) in self.piece_masses().zip(&self.breakpoints[1..]) {
            acc += m;
            out.push((b, acc));
        }
        out
    }

    pub fn write_cdf_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "x,F")?;
        for (x, f) in self.cdf_table() {
            writeln!(out, "{},{}", csv_num(x), csv_num(f))?;
        }
        Ok(())
    }

    /// `wa * self + wb * other`, merged on the union of breakpoints.
    pub fn combine(&self, wa: f64, other: &Self, wb: f64) -> Self {
        let (bps, vals) = merge_sum(
            (&self.breakpoints, &self.values, wa),
            (&other.breakpoints, &other.values, wb),
        );
        let mut d = PiecewiseDensity {
            breakpoints: bps,
            values: vals,
        };
        d.tidy(usize::MAX);
        d
    }

    /// Coalesces near-duplicate breakpoints and near-equal neighbours, then
    /// aggregates onto a grid if more than `max_pieces` remain. Mass is kept.
    fn tidy(&mut self, max_pieces: usize) {
        let n = self.values.len();
        let mut bps = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n);
        // masses of the pieces being built, to merge without drift
        let mut masses: Vec<f64> = Vec::with_capacity(n);
        bps.push(0.0);
        for i in 0..n {
            let (lo, hi) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let m = self.values[i] * (hi - lo);
            let start = *bps.last().unwrap();
            let absorb_tiny = hi - start < BREAKPOINT_MERGE && i + 1 < n;
            if absorb_tiny {
                // carry this sliver's mass into the next piece
                self.values[i + 1] = (self.values[i + 1] * (self.breakpoints[i + 2] - hi) + m)
                    / (self.breakpoints[i + 2] - start);
                self.breakpoints[i + 1] = start;
                continue;
            }
            let v = m / (hi - start);
            match vals.last() {
                Some(&prev) if (prev - v).abs() < VALUE_MERGE => {
                    let k = vals.len() - 1;
                    masses[k] += m;
                    *bps.last_mut().unwrap() = hi;
                    vals[k] = masses[k] / (hi - bps[k]);
                }
                _ => {
                    if hi - start < BREAKPOINT_MERGE {
                        // final sliver: give its mass to the previous piece
                        if let Some(k) = vals.len().checked_sub(1) {
                            masses[k] += m;
                            *bps.last_mut().unwrap() = hi;
                            vals[k] = masses[k] / (hi - bps[k]);
                            continue;
                        }
                    }
                    vals.push(v);
                    masses.push(m);
                    bps.push(hi);
                }
            }
        }
        *bps.last_mut().unwrap() = 1.0;
        self.breakpoints = bps;
        self.values = vals;
        if self.values.len() > max_pieces {
            self.aggregate(max_pieces);
        }
    }

    /// Mass-preserving projection onto `cells` equal cells.
    fn aggregate(&mut self, cells: usize) {
        let mut masses = vec![0.0; cells];
        let c = cells as f64;
        for (i, v) in self.values.iter().enumerate() {
            let (mut lo, hi) = (self.breakpoints[i], self.breakpoints[i + 1]);
            while lo < hi {
                let cell = ((lo * c) as usize).min(cells - 1);
                let cell_hi = ((cell + 1) as f64 / c).min(1.0);
                let end = hi.min(cell_hi);
                masses[cell] += v * (end - lo);
                if end <= lo {
                    break;
                }
                lo = end;
            }
        }
        self.breakpoints = (0..=cells).map(|i| i as f64 / c).collect();
        self.values = masses.iter().map(|m| m * c).collect();
    }
}

/// Sum of two step functions on `[0, 1]` with weights.
fn merge_sum(a: (&[f64], &[f64], f64), b: (&[f64], &[f64], f64)) -> (Vec<f64>, Vec<f64>) {
    let (ab, av, wa) = a;
    let (bb, bv, wb) = b;
    let mut bps = Vec::with_capacity(ab.len() + bb.len());
    let mut vals = Vec::with_capacity(ab.len() + bb.len());
    bps.push(0.0);
    let (mut i, mut j) = (0usize, 0usize);
    while i < av.len() && j < bv.len() {
        vals.push(wa * av[i] + wb * bv[j]);
        let (ea, eb) = (ab[i + 1], bb[j + 1]);
        if ea < eb {
            bps.push(ea);
            i += 1;
        } else if eb < ea {
            bps.push(eb);
            j += 1;
        } else {
            bps.push(ea);
            i += 1;
            j += 1;
        }
    }
    *bps.last_mut().unwrap() = 1.0;
    (bps, vals)
}

/// Pushforward of `density` by one map, weighted by `p`. Each image value is
/// the source mass over the image width as represented, so mass survives
/// even where huge densities sit on tiny pieces.
fn push_branch(sys: &AmSystem, sign: Sign, p: f64, d: &PiecewiseDensity) -> (Vec<f64>, Vec<f64>) {
    let kink = sys.kink(sign);
    let n = d.values.len();
    // (image right end, mass)
    let mut pieces: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (lo, hi) = (d.breakpoints[i], d.breakpoints[i + 1]);
        let v = p * d.values[i];
        if lo < kink && kink < hi {
            pieces.push((sys.kink_image(sign), v * (kink - lo)));
            pieces.push((sys.apply_unchecked(sign, hi), v * (hi - kink)));
        } else {
            pieces.push((sys.apply_unchecked(sign, hi), v * (hi - lo)));
        }
    }
    pieces.last_mut().expect("at least one piece").0 = 1.0;
    let mut out_b = Vec::with_capacity(pieces.len() + 1);
    let mut masses: Vec<f64> = Vec::with_capacity(pieces.len());
    out_b.push(0.0);
    let mut carry = 0.0;
    for (end, m) in pieces {
        if end > *out_b.last().unwrap() {
            out_b.push(end);
            masses.push(m + carry);
            carry = 0.0;
        } else if let Some(last) = masses.last_mut() {
            // rounding collapsed this image; its mass joins the neighbour
            *last += m;
        } else {
            carry += m;
        }
    }
    let vals = masses
        .iter()
        .zip(out_b.windows(2))
        .map(|(m, w)| m / (w[1] - w[0]))
        .collect();
    (out_b, vals)
}

/// One application of the averaged pushforward `p_- (f_-)_* + p_+ (f_+)_*`.
pub fn transfer_step(sys: &AmSystem, p_minus: f64, density: &PiecewiseDensity) -> PiecewiseDensity {
    transfer_step_capped(sys, p_minus, density, DEFAULT_MAX_PIECES)
}

pub fn transfer_step_capped(
    sys: &AmSystem,
    p_minus: f64,
    density: &PiecewiseDensity,
    max_pieces: usize,
) -> PiecewiseDensity {
    let (mb, mv) = push_branch(sys, Sign::Minus, p_minus, density);
    let (pb, pv) = push_branch(sys, Sign::Plus, 1.0 - p_minus, density);
    let (bps, vals) = merge_sum((&mb, &mv, 1.0), (&pb, &pv, 1.0));
    let mut d = PiecewiseDensity {
        breakpoints: bps,
        values: vals,
    };
    d.tidy(max_pieces);
    d
}

/// Sup-distance between the distribution functions, exact for step densities:
/// the difference of two piecewise-linear CDFs peaks at a breakpoint.
pub fn kolmogorov_distance(a: &PiecewiseDensity, b: &PiecewiseDensity) -> f64 {
    let (mut i, mut j) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0f64, 0.0f64);
    let mut x = 0.0f64;
    let mut best = 0.0f64;
    while i < a.values.len() && j < b.values.len() {
        let next = a.breakpoints[i + 1].min(b.breakpoints[j + 1]);
        fa += a.values[i] * (next - x);
        fb += b.values[j] * (next - x);
        x = next;
        best = best.max((fa - fb).abs());
        if a.breakpoints[i + 1] <= next {
            i += 1;
        }
        if b.breakpoints[j + 1] <= next {
            j += 1;
        }
    }
    best.min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationMode {
    Direct,
    Cesaro,
}

/// Outcome of [`iterate_to_stationary`]; `converged` is false when the
/// iteration budget ran out first.
#[derive(Debug, Clone)]
pub struct StationaryRun {
    pub density: PiecewiseDensity,
    pub iterations: usize,
    pub last_distance: f64,
    pub converged: bool,
}

impl StationaryRun {
    pub fn into_result(self) -> Result<PiecewiseDensity> {
        if self.converged {
            Ok(self.density)
        } else {
            Err(Error::Nonconvergence {
                last_distance: self.last_distance,
            })
        }
    }
}

/// Repeats [`transfer_step`] (or averages its iterates in Cesàro mode) until
/// two successive estimates are within `tol` in Kolmogorov distance.
pub fn iterate_to_stationary(
    sys: &AmSystem,
    p_minus: f64,
    init: &PiecewiseDensity,
    max_iter: usize,
    tol: f64,
    mode: IterationMode,
) -> Result<StationaryRun> {
    check_probability(p_minus)?;
    let lyap = sys.lyapunov_exponents(p_minus)?;
    if !lyap.both_positive() {
        log::warn!(
            "Lyapunov exponents ({}, {}) are not both positive; a stationary density may not exist",
            lyap.lambda0,
            lyap.lambda1
        );
    }
    let mut current = init.clone();
    let mut average = init.clone();
    let mut last = f64::INFINITY;
    for n in 0..max_iter {
        let next = transfer_step(sys, p_minus, &current);
        let (estimate_changed, d) = match mode {
            IterationMode::Direct => {
                let d = kolmogorov_distance(&current, &next);
                (None, d)
            }
            IterationMode::Cesaro => {
                let count = (n + 2) as f64;
                let avg = average.combine((count - 1.0) / count, &next, 1.0 / count);
                let d = kolmogorov_distance(&average, &avg);
                (Some(avg), d)
            }
        };
        last = d;
        let stop = d < tol;
        current = next;
        if let Some(avg) = estimate_changed {
            average = avg;
        }
        if stop {
            let density = match mode {
                IterationMode::Direct => current,
                IterationMode::Cesaro => average,
            };
            return Ok(StationaryRun {
                density,
                iterations: n,
                last_distance: d,
                converged: true,
            });
        }
    }
    log::warn!("no convergence after {max_iter} iterations, last distance {last:e}");
    let density = match mode {
        IterationMode::Direct => current,
        IterationMode::Cesaro => average,
    };
    Ok(StationaryRun {
        density,
        iterations: max_iter,
        last_distance: last,
        converged: false,
    })
}

/// Histogram of a long orbit on a uniform partition of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    pub bin_count: usize,
    pub masses: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        EmpiricalMeasure {
            bin_count: counts.len(),
            masses: counts.iter().map(|&c| c as f64 / total as f64).collect(),
        }
    }

    /// Total mass of the bins overlapping `(lo, hi)`.
    pub fn mass_overlapping(&self, lo: f64, hi: f64) -> f64 {
        let n = self.bin_count as f64;
        self.masses
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as f64) / n < hi && (*i as f64 + 1.0) / n > lo)
            .map(|(_, m)| m)
            .sum()
    }

    /// The histogram as a step density.
    pub fn to_density(&self) -> PiecewiseDensity {
        let n = self.bin_count as f64;
        let mut d = PiecewiseDensity {
            breakpoints: (0..=self.bin_count).map(|i| i as f64 / n).collect(),
            values: self.masses.iter().map(|m| m * n).collect(),
        };
        d.tidy(usize::MAX);
        d
    }
}

fn check_sampling(samples: usize) -> Result<()> {
    if samples == 0 {
        return Err(out_of_range("samples must be at least 1"));
    }
    Ok(())
}

/// Visits `samples` orbit points after `burn_in` steps from `x0 = 1/2`.
pub fn for_each_orbit_point<F: FnMut(f64)>(
    sys: &AmSystem,
    p_minus: f64,
    burn_in: usize,
    samples: usize,
    seed: u64,
    mut visit: F,
) -> Result<()> {
    check_probability(p_minus)?;
    check_sampling(samples)?;
    let mut rng = SplitMix64::new(seed);
    let mut p = SidedPoint::new(0.5);
    for _ in 0..burn_in {
        p = sys.apply_sided(draw_sign(&mut rng, p_minus), p);
    }
    for _ in 0..samples {
        p = sys.apply_sided(draw_sign(&mut rng, p_minus), p);
        visit(p.value());
    }
    Ok(())
}

pub fn empirical_stationary(
    sys: &AmSystem,
    p_minus: f64,
    burn_in: usize,
    samples: usize,
    bins: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    if bins == 0 {
        return Err(out_of_range("bins must be at least 1"));
    }
    let mut counts = vec![0u64; bins];
    let b = bins as f64;
    for_each_orbit_point(sys, p_minus, burn_in, samples, seed, |x| {
        counts[((x * b) as usize).min(bins - 1)] += 1;
    })?;
    Ok(EmpiricalMeasure::from_counts(&counts))
}

/// Sorted orbit points; the exact empirical distribution of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSamples {
    points: Vec<f64>,
}

impl OrbitSamples {
    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData("no sample points".into()));
        }
        points.sort_by(f64::total_cmp);
        Ok(OrbitSamples { points })
    }

    pub fn simulate(
        sys: &AmSystem,
        p_minus: f64,
        burn_in: usize,
        samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut pts = Vec::with_capacity(samples);
        for_each_orbit_point(sys, p_minus, burn_in, samples, seed, |x| pts.push(x))?;
        Self::from_points(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points in the closed interval `[lo, hi]`.
    pub fn count_between(&self, lo: f64, hi: f64) -> usize {
        let a = self.points.partition_point(|&x| x < lo);
        let b = self.points.partition_point(|&x| x <= hi);
        b.saturating_sub(a)
    }

    pub fn fraction_between(&self, lo: f64, hi: f64) -> f64 {
        self.count_between(lo, hi) as f64 / self.points.len() as f64
    }
}

/// Kolmogorov distance between a step density and an empirical sample,
/// checking both one-sided limits at every sample point.
pub fn kolmogorov_distance_samples(d: &PiecewiseDensity, s: &OrbitSamples) -> f64 {
    let n = s.points.len() as f64;
    let table = d.cdf_table();
    let mut best = 0.0f64;
    let mut piece = 0usize;
    let mut below = 0.0f64;
    for (i, &x) in s.points.iter().enumerate() {
        while piece + 1 < d.values.len() && d.breakpoints[piece + 1] <= x {
            piece += 1;
            below = table[piece].1;
        }
        let f = (below + d.values[piece] * (x - d.breakpoints[piece])).min(1.0);
        best = best.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    // the density CDF can also peak away from samples, at its breakpoints
    let mut k = 0usize;
    for &(x, f) in &table {
        while k < s.points.len() && s.points[k] <= x {
            k += 1;
        }
        let emp_right = k as f64 / n;
        let emp_left = s.points.partition_point(|&p| p < x) as f64 / n;
        best = best.max((f - emp_right).abs()).max((f - emp_left).abs());
    }
    best.min(1.0)
}

/// Result of [`lebesgue_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LebesgueVerdict {
    pub lebesgue: bool,
    /// `|p_-/a_- + p_+/b_+ - 1|`
    pub residual1: f64,
    /// `|p_-/b_- + p_+/a_+ - 1|`
    pub residual2: f64,
}

impl LebesgueVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "lebesgue": self.lebesgue,
            "residual1": self.residual1,
            "residual2": self.residual2,
        })
    }
}

/// Lebesgue measure is stationary exactly for border-type systems with
/// `p_-/a_- + p_+/b_+ = 1`.
pub fn lebesgue_check(sys: &AmSystem, p_minus: f64) -> Result<LebesgueVerdict> {
    check_probability(p_minus)?;
    if !sys.lyapunov_exponents(p_minus)?.both_positive() {
        log::warn!("Lyapunov exponents are not both positive");
    }
    let p_plus = 1.0 - p_minus;
    let residual1 = (p_minus / sys.a_minus() + p_plus / sys.b_plus() - 1.0).abs();
    let residual2 = (p_minus / sys.b_minus() + p_plus / sys.a_plus() - 1.0).abs();
    let lebesgue = sys.classify_type() == SystemClass::Border && residual1 < 1e-10;
    Ok(LebesgueVerdict {
        lebesgue,
        residual1,
        residual2,
    })
}

/// Average over sampled centres of the least-squares slope of
/// `log mu(B(x, r))` against `log r`. Centres are drawn from the sample
/// itself and excluded from their own ball counts.
pub fn local_dimension_estimate(
    measure: &OrbitSamples,
    radii: &[f64],
    sample_points: usize,
    seed: u64,
) -> Result<f64> {
    if radii.len() < 2 {
        return Err(out_of_range("need at least two radii"));
    }
    let ratio = radii[1] / radii[0];
    let geometric = radii.iter().all(|&r| r > 0.0)
        && ratio < 1.0
        && radii
            .windows(2)
            .all(|w| ((w[1] / w[0]) / ratio - 1.0).abs() < 1e-9);
    if !geometric {
        return Err(out_of_range("radii must form a decreasing geometric sequence"));
    }
    if sample_points == 0 {
        return Err(out_of_range("sample_points must be at least 1"));
    }
    let n = measure.len();
    if n < 2 {
        return Err(Error::InsufficientData("need at least two sample points".into()));
    }
    let logs_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mean_lr = logs_r.iter().sum::<f64>() / logs_r.len() as f64;
    let sxx: f64 = logs_r.iter().map(|l| (l - mean_lr).powi(2)).sum();
    let mut rng = SplitMix64::new(seed);
    let mut total = 0.0;
    for _ in 0..sample_points {
        let idx = ((rng.next_f64() * n as f64) as usize).min(n - 1);
        let x = measure.points[idx];
        let mut logs_m = Vec::with_capacity(radii.len());
        for &r in radii {
            let c = measure.count_between(x - r, x + r) - 1;
            if c == 0 {
                return Err(Error::InsufficientMass(format!(
                    "ball of radius {r} around {x} holds no other sample"
                )));
            }
            logs_m.push((c as f64 / (n - 1) as f64).ln());
        }
        let mean_lm = logs_m.iter().sum::<f64>() / logs_m.len() as f64;
        let sxy: f64 = logs_r
            .iter()
            .zip(&logs_m)
            .map(|(lr, lm)| (lr - mean_lr) * (lm - mean_lm))
            .sum();
        total += sxy / sxx;
    }
    Ok(total / sample_points as f64)
}

/// `count` radii from `r_max` shrinking by `factor`.
pub fn geometric_radii(r_max: f64, factor: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| r_max * factor.powi(i as i32)).collect()
}
