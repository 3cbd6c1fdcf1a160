//! Resonant symmetric systems: the interval families carrying the support of
//! the stationary measure, their iterated function systems, dimension
//! equations, symbolic weights, the pressure function and the recurrence
//! satisfied by interval masses.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{out_of_range, Error, Result};
use crate::format::csv_num;
use crate::roots::{bisect, deflate_unit_root, poly_eval, poly_mul, BISECTION_MAX_ITER, BISECTION_TOL};
use crate::system::{check_probability, validate_resonance, ResonantSystem, SidedPoint};

/// `rho` within this distance of `eta(k, l)` counts as the boundary case.
pub const BOUNDARY_TOL: f64 = 1e-10;

fn int_poly_to_f64(p: &[i64]) -> Vec<f64> {
    p.iter().map(|&c| c as f64).collect()
}

/// Root in `(1/2, 1)` of `x^(k+l) - 2x^(k+1) + 2x - 1`.
///
/// The polynomial has a simple root at 1, which is divided out before
/// bisecting so the bracket is clean.
pub fn solve_eta(k: u32, l: u32) -> Result<f64> {
    validate_resonance(0.5, k, l)?;
    let (k, l) = (k as usize, l as usize);
    let mut p = vec![0i64; k + l + 1];
    p[0] -= 1;
    p[1] += 2;
    p[k + 1] -= 2;
    p[k + l] += 1;
    let (q, rem) = deflate_unit_root(&p);
    debug_assert_eq!(rem, 0);
    let q = int_poly_to_f64(&q);
    bisect(|x| poly_eval(&q, x), 0.5, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `rho < eta`: gaps everywhere, strong separation.
    Disjoint,
    /// `rho = eta`: neighbouring intervals touch.
    Boundary,
    Invalid,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Disjoint => "disjoint",
            Regime::Boundary => "boundary",
            Regime::Invalid => "invalid",
        }
    }
}

pub fn regime(rho: f64, k: u32, l: u32) -> Result<Regime> {
    validate_resonance(rho, k, l)?;
    let eta = solve_eta(k, l)?;
    Ok(if (rho - eta).abs() <= BOUNDARY_TOL {
        Regime::Boundary
    } else if rho < eta {
        Regime::Disjoint
    } else {
        Regime::Invalid
    })
}

fn require_valid(rho: f64, k: u32, l: u32) -> Result<Regime> {
    match regime(rho, k, l)? {
        Regime::Invalid => Err(Error::InvalidRegime(format!(
            "rho = {rho} exceeds eta({k},{l}) = {:.10}; the resonant construction needs rho <= eta",
            solve_eta(k, l)?
        ))),
        r => Ok(r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportDimension {
    pub dim: f64,
    /// Set at `rho = eta`, where the dimension is 1.
    pub boundary: bool,
}

/// `log eta / log rho`.
pub fn support_dimension(rho: f64, k: u32, l: u32) -> Result<SupportDimension> {
    let reg = require_valid(rho, k, l)?;
    if reg == Regime::Boundary {
        log::warn!("rho equals eta({k},{l}); the support has full dimension");
        return Ok(SupportDimension {
            dim: 1.0,
            boundary: true,
        });
    }
    let eta = solve_eta(k, l)?;
    Ok(SupportDimension {
        dim: eta.ln() / rho.ln(),
        boundary: false,
    })
}

/// Root in `(0, 1]` of `p x^(k+1) - x + (1 - p)` after removing the factor
/// `x - 1`, i.e. of `p (1 + x + ... + x^k) - 1`. Returns 1 when no root
/// below 1 exists.
fn eta_side(k: u32, p: f64) -> Result<f64> {
    let q = |x: f64| p * (0..=k).fold(0.0, |acc, _| acc * x + 1.0) - 1.0;
    if q(1.0) <= 1e-15 {
        return Ok(1.0);
    }
    bisect(q, 0.0, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)
}

/// `(eta_-, eta_+)` solving `p_+ x^(k+1) - x + p_- = 0` and
/// `p_- x^(k+1) - x + p_+ = 0` for `l = 1`.
pub fn solve_eta_pm(k: u32, p_minus: f64) -> Result<(f64, f64)> {
    check_probability(p_minus)?;
    if k < 2 {
        return Err(out_of_range(format!("need k >= 2, got {k}")));
    }
    let p_plus = 1.0 - p_minus;
    Ok((eta_side(k, p_plus)?, eta_side(k, p_minus)?))
}

/// Symbolic description of the stationary measure for a `(k:1)` resonance.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicWeights {
    pub k: u32,
    pub p_minus: f64,
    pub eta_minus: f64,
    pub eta_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    /// `beta_minus[r - 1]` is `beta_r^-`.
    pub beta_minus: Vec<f64>,
    pub beta_plus: Vec<f64>,
}

impl SymbolicWeights {
    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "p_minus": self.p_minus,
            "eta_minus": self.eta_minus,
            "eta_plus": self.eta_plus,
            "c_minus": self.c_minus,
            "c_plus": self.c_plus,
            "beta_minus": self.beta_minus,
            "beta_plus": self.beta_plus,
        })
    }

    /// `mu(I_j) = c eta^|j|` on the side of `j`.
    pub fn interval_mass(&self, j: i64) -> f64 {
        let (c, eta) = if j < 0 {
            (self.c_minus, self.eta_minus)
        } else {
            (self.c_plus, self.eta_plus)
        };
        c * eta.powi(j.unsigned_abs() as i32)
    }
}

fn check_inside_window(k: u32, l: u32, p_minus: f64) -> Result<()> {
    check_probability(p_minus)?;
    let (lo, hi) = crate::system::positivity_window(k, l);
    if !(p_minus > lo && p_minus < hi) {
        return Err(out_of_range(format!(
            "p_minus = {p_minus} must lie strictly inside ({lo}, {hi})"
        )));
    }
    Ok(())
}

pub fn symbolic_weights(k: u32, p_minus: f64) -> Result<SymbolicWeights> {
    if k < 2 {
        return Err(out_of_range(format!("need k >= 2, got {k}")));
    }
    check_inside_window(k, 1, p_minus)?;
    let p_plus = 1.0 - p_minus;
    let (em, ep) = solve_eta_pm(k, p_minus)?;
    let denom = p_plus * em / (1.0 - em) + p_minus * ep / (1.0 - ep);
    let beta = |ratio: f64, eta: f64| -> Vec<f64> {
        (1..=k).map(|r| ratio * eta.powi(r as i32)).collect()
    };
    Ok(SymbolicWeights {
        k,
        p_minus,
        eta_minus: em,
        eta_plus: ep,
        c_minus: p_plus / denom,
        c_plus: p_minus / denom,
        beta_minus: beta(p_minus / p_plus, ep),
        beta_plus: beta(p_plus / p_minus, em),
    })
}

/// `mu` of the cylinder `I_{j; r_1 ... r_n}`: `c eta^|j|` times alternating
/// factors `beta^- beta^+ ...` (starting with `beta^+` when `j > 0`).
pub fn cylinder_mass(w: &SymbolicWeights, j: i64, rs: &[u32]) -> Result<f64> {
    if j == 0 {
        return Err(out_of_range("j must be nonzero"));
    }
    if let Some(&bad) = rs.iter().find(|&&r| r < 1 || r > w.k) {
        return Err(out_of_range(format!("symbol {bad} not in 1..={}", w.k)));
    }
    let mut minus = j < 0;
    let mut m = w.interval_mass(j);
    for &r in rs {
        let b = if minus { &w.beta_minus } else { &w.beta_plus };
        m *= b[(r - 1) as usize];
        minus = !minus;
    }
    Ok(m)
}

/// Entropy over Lyapunov exponent of the stationary measure for `l = 1`.
pub fn measure_dimension(k: u32, p_minus: f64, rho: f64) -> Result<f64> {
    require_valid(rho, k, 1)?;
    let w = symbolic_weights(k, p_minus)?;
    let p_plus = 1.0 - p_minus;
    let (em, ep) = (w.eta_minus, w.eta_plus);
    let (mut num, mut den) = (0.0, 0.0);
    for r in 1..=k {
        let rf = r as f64;
        let a = p_plus / p_minus * em.powi(r as i32);
        let b = p_minus / p_plus * ep.powi(r as i32);
        num += rf * (a * em.ln() + b * ep.ln());
        den += rf * (a + b);
    }
    Ok(num / (den * rho.ln()))
}

/// An element of the symbol set: `r` followed by a tail from `1..l`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RSymbol {
    pub r: u32,
    pub tail: Vec<u32>,
}

impl RSymbol {
    pub fn simple(r: u32) -> Self {
        RSymbol { r, tail: Vec::new() }
    }

    /// Total contraction exponent `r + sum(tail)`.
    pub fn weight(&self) -> u32 {
        self.r + self.tail.iter().sum::<u32>()
    }
}

impl fmt::Display for RSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.r)?;
        for t in &self.tail {
            write!(f, ".{t}")?;
        }
        Ok(())
    }
}

/// Address of an interval: copy `j`, suffix from `1..l`, cylinder symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalCode {
    pub j: i64,
    pub suffix: Vec<u32>,
    pub cylinder: Vec<RSymbol>,
}

impl IntervalCode {
    pub fn base(j: i64) -> Self {
        IntervalCode {
            j,
            suffix: Vec::new(),
            cylinder: Vec::new(),
        }
    }

    pub fn validate(&self, k: u32, l: u32) -> Result<()> {
        if self.j == 0 {
            return Err(out_of_range("j must be nonzero"));
        }
        if self.suffix.iter().any(|&s| s < 1 || s >= l) {
            return Err(out_of_range("suffix entries must lie in 1..l"));
        }
        for sym in &self.cylinder {
            if sym.r < l || sym.r > k {
                return Err(out_of_range(format!("symbol {} outside {l}..={k}", sym.r)));
            }
            if !sym.tail.is_empty() && sym.r == k {
                return Err(out_of_range("symbol k takes no tail"));
            }
            if sym.tail.iter().any(|&s| s < 1 || s >= l) {
                return Err(out_of_range("tail entries must lie in 1..l"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for IntervalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "j={};s={};c={}",
            self.j,
            join(self.suffix.iter().map(|s| s.to_string()).collect()),
            join(self.cylinder.iter().map(|s| s.to_string()).collect())
        )
    }
}

/// A closed interval with its address. `hull` marks the convex hull of a
/// whole family (a `J` interval or a partially resolved symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct AddressedInterval {
    pub code: IntervalCode,
    pub hull: bool,
    pub lo: f64,
    pub hi: f64,
}

impl AddressedInterval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn code_string(&self) -> String {
        if self.hull {
            format!("{};hull", self.code)
        } else {
            self.code.to_string()
        }
    }
}

/// `code,lo,hi` rows.
pub fn write_intervals_csv<W: Write>(out: &mut W, intervals: &[AddressedInterval]) -> io::Result<()> {
    writeln!(out, "code,lo,hi")?;
    for iv in intervals {
        writeln!(out, "{},{},{}", iv.code_string(), csv_num(iv.lo), csv_num(iv.hi))?;
    }
    Ok(())
}

/// `x -> s x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Affine {
    pub s: f64,
    pub t: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { s: 1.0, t: 0.0 };

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.s * x + self.t
    }

    /// `self` after `inner`.
    #[inline]
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine {
            s: self.s * inner.s,
            t: self.s * inner.t + self.t,
        }
    }

    pub fn image(&self, (lo, hi): (f64, f64)) -> (f64, f64) {
        let (a, b) = (self.apply(lo), self.apply(hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeKind {
    /// image of `I_{-1}`
    I,
    /// image of `J_{-1}`
    J,
}

/// A node of the interval hierarchy inside one copy, in the frame of the
/// `j = -1` copy.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node {
    pub kind: NodeKind,
    pub map: Affine,
    pub exponent: u32,
    pub code: IntervalCode,
}

/// Geometry of the symmetric `(k:l)`-resonant system at scale `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub rho: f64,
    pub k: u32,
    pub l: u32,
    pub regime: Regime,
    x_minus: f64,
    i_base: (f64, f64),
    j_base: (f64, f64),
    pow: Vec<f64>,
}

impl Geometry {
    pub fn new(rho: f64, k: u32, l: u32) -> Result<Self> {
        let regime = require_valid(rho, k, l)?;
        let a = rho.powi(l as i32);
        let b = rho.powi(-(k as i32));
        let x_minus = (b - 1.0) / (b - a);
        let sup = rho * x_minus;
        let i_base = (rho * (1.0 - a * x_minus), sup);
        let j_base = (rho * (1.0 - rho * x_minus), sup);
        let pow = (0..=k).map(|r| rho.powi(r as i32)).collect();
        Ok(Geometry {
            rho,
            k,
            l,
            regime,
            x_minus,
            i_base,
            j_base,
            pow,
        })
    }

    pub fn from_system(res: &ResonantSystem) -> Result<Self> {
        Self::new(res.rho, res.k, res.l)
    }

    pub fn x_minus(&self) -> f64 {
        self.x_minus
    }

    /// `I_{-1}`.
    pub fn i_base(&self) -> (f64, f64) {
        self.i_base
    }

    /// `J_{-1}`; equal to `I_{-1}` when `l = 1`.
    pub fn j_base(&self) -> (f64, f64) {
        self.j_base
    }

    /// `phi_r(x) = rho - rho^r x`.
    pub(crate) fn phi(&self, r: u32) -> Affine {
        Affine {
            s: -self.rho.powi(r as i32),
            t: self.rho,
        }
    }

    /// Map from the `j = -1` frame onto copy `j`.
    pub(crate) fn embed(&self, j: i64) -> Affine {
        let n = (j.unsigned_abs() - 1) as i32;
        let scale = self.rho.powi(n);
        if j < 0 {
            Affine { s: scale, t: 0.0 }
        } else {
            Affine { s: -scale, t: 1.0 }
        }
    }

    /// `J_j` (which is `I_j` when `l = 1`).
    pub fn copy_hull(&self, j: i64) -> (f64, f64) {
        self.embed(j).image(self.j_base)
    }

    /// `I_j`.
    pub fn base_interval(&self, j: i64) -> (f64, f64) {
        self.embed(j).image(self.i_base)
    }

    pub(crate) fn node_interval(&self, node: &Node) -> (f64, f64) {
        match node.kind {
            NodeKind::I => node.map.image(self.i_base),
            NodeKind::J => node.map.image(self.j_base),
        }
    }

    /// Root of copy `j`, in the `j = -1` frame.
    pub(crate) fn root(&self) -> Node {
        Node {
            kind: if self.l == 1 { NodeKind::I } else { NodeKind::J },
            map: Affine::IDENTITY,
            exponent: 0,
            code: IntervalCode::base(-1),
        }
    }

    /// Children in left-to-right order within the node's frame (callers
    /// sort by position when the node map reverses orientation).
    pub(crate) fn children(&self, node: &Node) -> Vec<Node> {
        let mut out = Vec::new();
        let l = self.l;
        match node.kind {
            NodeKind::I => {
                for r in l..=self.k {
                    let mut code = node.code.clone();
                    code.cylinder.push(RSymbol::simple(r));
                    let kind = if l == 1 || r == self.k {
                        NodeKind::I
                    } else {
                        NodeKind::J
                    };
                    out.push(Node {
                        kind,
                        map: node.map.compose(&self.phi(r)),
                        exponent: node.exponent + r,
                        code,
                    });
                }
            }
            NodeKind::J => {
                for i in 1..l {
                    let mut code = node.code.clone();
                    match code.cylinder.last_mut() {
                        Some(sym) => sym.tail.push(i),
                        None => code.suffix.push(i),
                    }
                    out.push(Node {
                        kind: NodeKind::J,
                        map: node.map.compose(&self.phi(i)),
                        exponent: node.exponent + i,
                        code,
                    });
                }
                out.push(Node {
                    kind: NodeKind::I,
                    map: node.map,
                    exponent: node.exponent,
                    code: node.code.clone(),
                });
            }
        }
        out
    }

    /// Whether a node stands for a family (a `J` hull) rather than one interval.
    pub(crate) fn is_hull(&self, node: &Node) -> bool {
        node.kind == NodeKind::J && self.l > 1
    }

    fn addressed(&self, node: &Node, j: i64) -> AddressedInterval {
        let emb = self.embed(j);
        let (lo, hi) = emb.image(self.node_interval(node));
        let mut code = node.code.clone();
        code.j = j;
        AddressedInterval {
            code,
            hull: self.is_hull(node),
            lo,
            hi,
        }
    }
}

/// Base intervals `I_j` for `1 <= |j| <= j_range`, plus for `l > 1` the hulls
/// `J_j` and the suffixed intervals `I_{j, j_1 ... j_n}` with `n <= suffix_depth`.
pub fn build_intervals(
    rho: f64,
    k: u32,
    l: u32,
    j_range: u32,
    suffix_depth: u32,
) -> Result<Vec<AddressedInterval>> {
    let g = Geometry::new(rho, k, l)?;
    let js = copy_indices(j_range);
    let per_copy: Vec<Vec<AddressedInterval>> = js
        .par_iter()
        .map(|&j| {
            let mut out = vec![g.addressed(&g.root(), j)];
            if l == 1 {
                return out;
            }
            // walk the suffix tree of J nodes
            let mut frontier = vec![g.root()];
            for depth in 0..=suffix_depth {
                let mut next = Vec::new();
                for node in &frontier {
                    for child in g.children(node) {
                        match child.kind {
                            NodeKind::I => out.push(g.addressed(&child, j)),
                            NodeKind::J if depth < suffix_depth => next.push(child),
                            NodeKind::J => {}
                        }
                    }
                }
                frontier = next;
            }
            out
        })
        .collect();
    Ok(per_copy.into_iter().flatten().collect())
}

fn copy_indices(j_range: u32) -> Vec<i64> {
    let r = j_range as i64;
    (-r..=-1).chain(1..=r).collect()
}

/// `Phi_r = phi_r o phi_{t_1} o ... o phi_{t_n}` applied to `x`.
pub fn ifs_apply(rho: f64, k: u32, l: u32, r: u32, tail: &[u32], x: f64) -> Result<f64> {
    let g = Geometry::new(rho, k, l)?;
    if r < 1 || r > k || tail.iter().any(|&t| t < 1 || t >= l) {
        return Err(out_of_range(format!("invalid symbol {r} with tail {tail:?}")));
    }
    if !tail.is_empty() && (r < l || r == k) {
        return Err(out_of_range("only symbols l..k-1 take a tail"));
    }
    let (lo, hi) = if r < l && tail.is_empty() {
        g.j_base
    } else {
        g.i_base
    };
    let slack = 1e-12;
    if !(x >= lo - slack && x <= hi + slack) {
        return Err(Error::Domain(format!("{x} is outside [{lo}, {hi}]")));
    }
    let mut y = x;
    for &t in tail.iter().rev() {
        y = g.phi(t).apply(y);
    }
    Ok(g.phi(r).apply(y))
}

/// Finite-depth cover of the limit set.
#[derive(Debug, Clone, PartialEq)]
pub struct CantorApprox {
    pub rho: f64,
    pub k: u32,
    pub l: u32,
    pub depth: u32,
    pub j_range: u32,
    /// Leaves ordered by copy and position.
    pub intervals: Vec<AddressedInterval>,
    /// Total length of the copies with `|j| > j_range`, all left out.
    pub tail_length: f64,
}

impl CantorApprox {
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(AddressedInterval::len).sum()
    }

    pub fn copy(&self, j: i64) -> impl Iterator<Item = &AddressedInterval> {
        self.intervals.iter().filter(move |iv| iv.code.j == j)
    }

    /// Length of hull leaves, an upper bound on how much the cover
    /// overstates the truncated families.
    pub fn hull_length(&self) -> f64 {
        self.intervals.iter().filter(|iv| iv.hull).map(AddressedInterval::len).sum()
    }
}

/// Refines every copy `1 <= |j| <= j_range` until each piece has been shrunk
/// by at least `rho^depth` relative to its copy. Families that are still
/// unresolved at that scale stay as hull leaves, so no part of the set is
/// dropped.
pub fn cantor_approx(rho: f64, k: u32, l: u32, depth: u32, j_range: u32) -> Result<CantorApprox> {
    let g = Geometry::new(rho, k, l)?;
    let base_leaves = leaves_in_frame(&g, depth);
    let js = copy_indices(j_range);
    let per_copy: Vec<Vec<AddressedInterval>> = js
        .par_iter()
        .map(|&j| {
            let mut v: Vec<AddressedInterval> =
                base_leaves.iter().map(|n| g.addressed(n, j)).collect();
            v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            v
        })
        .collect();
    let j_len = g.j_base.1 - g.j_base.0;
    let tail_length = 2.0 * j_len * rho.powi(j_range as i32) / (1.0 - rho);
    Ok(CantorApprox {
        rho,
        k,
        l,
        depth,
        j_range,
        intervals: per_copy.into_iter().flatten().collect(),
        tail_length,
    })
}

fn leaves_in_frame(g: &Geometry, depth: u32) -> Vec<Node> {
    let mut leaves = Vec::new();
    let mut stack = vec![g.root()];
    while let Some(node) = stack.pop() {
        if node.exponent >= depth {
            leaves.push(node);
        } else {
            stack.extend(g.children(&node));
        }
    }
    leaves
}

/// Slope of `log N(eps)` against `-log eps`, where `N(eps)` is the minimal
/// number of length-`eps` intervals covering the leaves of the `j = -1` copy,
/// over scales `eps = |J_{-1}| rho^i` down to the cover's resolution.
pub fn box_dimension_estimate(approx: &CantorApprox) -> Result<f64> {
    let mut leaves: Vec<(f64, f64)> = approx.copy(-1).map(|iv| (iv.lo, iv.hi)).collect();
    if leaves.len() <= 1 {
        return Ok(0.0);
    }
    leaves.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = leaves[0].0;
    let hi = leaves.iter().map(|l| l.1).fold(f64::MIN, f64::max);
    let base = hi - lo;
    let scales: Vec<f64> = (1..=approx.depth).map(|i| base * approx.rho.powi(i as i32)).collect();
    if scales.len() < 3 {
        return Err(Error::InsufficientDepth(format!(
            "depth {} gives {} scales; need at least 3",
            approx.depth,
            scales.len()
        )));
    }
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .map(|&eps| (-eps.ln(), (greedy_cover(&leaves, eps) as f64).ln()))
        .collect();
    Ok(regression_slope(&pts))
}

fn greedy_cover(sorted: &[(f64, f64)], eps: f64) -> usize {
    let mut count = 0usize;
    let mut covered_to = f64::NEG_INFINITY;
    for &(lo, hi) in sorted {
        if hi <= covered_to {
            continue;
        }
        let mut start = lo.max(covered_to);
        loop {
            count += 1;
            covered_to = start + eps;
            if covered_to >= hi {
                break;
            }
            start = covered_to;
        }
    }
    count
}

pub(crate) fn regression_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Left end `t_0` of the pressure domain: `rho^t0` solves
/// `u + u^2 + ... + u^(l-1) = 1`, and `t_0 = 0` for `l <= 2`.
pub fn pressure_t0(rho: f64, l: u32) -> Result<f64> {
    if l <= 2 {
        return Ok(0.0);
    }
    let f = |u: f64| (1..l).map(|i| u.powi(i as i32)).sum::<f64>() - 1.0;
    let u0 = bisect(f, 0.0, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)?;
    Ok(u0.ln() / rho.ln())
}

/// Topological pressure of the infinite system `{Phi_r}` at `t > t_0`:
/// `log(rho^(kt) + sum_{r=l}^{k-1} rho^(rt) / (1 - sum_{i=1}^{l-1} rho^(it)))`.
pub fn pressure(rho: f64, k: u32, l: u32, t: f64) -> Result<f64> {
    validate_resonance(rho, k, l)?;
    let t0 = pressure_t0(rho, l)?;
    if !(t > t0) {
        return Err(Error::OutsideDomain { t, t0 });
    }
    let u = rho.powf(t);
    let tails = 1.0 - (1..l).map(|i| u.powi(i as i32)).sum::<f64>();
    if !(tails > 0.0) {
        return Err(Error::OutsideDomain { t, t0 });
    }
    let heads: f64 = (l..k).map(|r| u.powi(r as i32)).sum();
    Ok((u.powi(k as i32) + heads / tails).ln())
}

/// Zero `d` of the pressure, the dimension of the limit set.
pub fn solve_pressure_zero(rho: f64, k: u32, l: u32) -> Result<f64> {
    let reg = require_valid(rho, k, l)?;
    let p1 = pressure(rho, k, l, 1.0)?;
    if reg == Regime::Boundary || p1.abs() <= 1e-12 {
        return Ok(1.0);
    }
    if p1 > 0.0 {
        return Err(Error::InvalidRegime(format!("P(1) = {p1} is not negative")));
    }
    let t0 = pressure_t0(rho, l)?;
    let lo = t0 + 1e-12 * t0.max(1.0);
    let f = |t: f64| pressure(rho, k, l, t).unwrap_or(f64::INFINITY);
    bisect(f, lo, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)
}

/// `m_{j+k} - 2 m_j + m_{j-l}` for every `j >= l + 1` with `j + k` in range;
/// `masses[0]` is `m_1`. Returns `(j, residual)` pairs.
pub fn recurrence_residuals(masses: &[f64], k: u32, l: u32) -> Result<Vec<(usize, f64)>> {
    let (k, l) = (k as usize, l as usize);
    if masses.len() < k + l + 2 {
        return Err(Error::InsufficientData(format!(
            "need at least {} masses, got {}",
            k + l + 2,
            masses.len()
        )));
    }
    let m = |j: usize| masses[j - 1];
    Ok((l + 1..=masses.len() - k)
        .map(|j| (j, m(j + k) - 2.0 * m(j) + m(j - l)))
        .collect())
}

/// Monte Carlo residuals of the mass recurrence with batch-means errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRecurrence {
    /// Symmetrised estimates of `mu(I_j)` for `j = 1..=j_max`.
    pub masses: Vec<f64>,
    /// `(j, residual, sigma)` where `sigma` is the standard error across batches.
    pub residuals: Vec<(usize, f64, f64)>,
    pub samples: usize,
    pub batches: usize,
}

/// Runs one orbit of the resonant system and records visits to `I_{+-j}`.
/// Errors are estimated from `batches` consecutive blocks, which absorbs
/// the correlation between successive orbit points.
pub fn empirical_recurrence(
    res: &ResonantSystem,
    j_max: u32,
    burn_in: usize,
    samples: usize,
    batches: usize,
    seed: u64,
) -> Result<EmpiricalRecurrence> {
    let g = Geometry::from_system(res)?;
    let (k, l) = (res.k as usize, res.l as usize);
    let jm = j_max as usize;
    if jm < k + l + 2 {
        return Err(Error::InsufficientData(format!("j_max must be at least {}", k + l + 2)));
    }
    if batches < 2 || samples < batches {
        return Err(out_of_range("need at least two batches and one sample per batch"));
    }
    // sorted (lo, hi, |j|) for both sides, disjoint up to shared endpoints
    let mut ivs: Vec<(f64, f64, usize)> = copy_indices(j_max)
        .into_iter()
        .map(|j| {
            let (lo, hi) = g.base_interval(j);
            (lo, hi, j.unsigned_abs() as usize)
        })
        .collect();
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let sys = res.system();
    let mut rng = crate::rng::SplitMix64::new(seed);
    let mut p = SidedPoint::new(0.5);
    for _ in 0..burn_in {
        p = sys.apply_sided(crate::dynamics::draw_sign(&mut rng, res.p_minus), p);
    }
    let per_batch = samples / batches;
    let used = per_batch * batches;
    let mut counts = vec![vec![0u64; jm + 1]; batches];
    for batch in counts.iter_mut() {
        for _ in 0..per_batch {
            p = sys.apply_sided(crate::dynamics::draw_sign(&mut rng, res.p_minus), p);
            let x = p.value();
            let i = ivs.partition_point(|iv| iv.0 <= x);
            if i > 0 && x <= ivs[i - 1].1 {
                batch[ivs[i - 1].2] += 1;
            }
        }
    }
    let mass_of = |c: &[u64], n: usize| -> Vec<f64> {
        (1..=jm).map(|j| c[j] as f64 / (2.0 * n as f64)).collect()
    };
    let mut total = vec![0u64; jm + 1];
    for c in &counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    let masses = mass_of(&total, used);
    let overall = recurrence_residuals(&masses, res.k, res.l)?;
    let batch_res: Vec<Vec<(usize, f64)>> = counts
        .iter()
        .map(|c| recurrence_residuals(&mass_of(c, per_batch), res.k, res.l))
        .collect::<Result<_>>()?;
    let bf = batches as f64;
    let residuals = overall
        .iter()
        .enumerate()
        .map(|(idx, &(j, r))| {
            let vals: Vec<f64> = batch_res.iter().map(|br| br[idx].1).collect();
            let mean = vals.iter().sum::<f64>() / bf;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (bf - 1.0);
            (j, r, (var / bf).sqrt())
        })
        .collect();
    Ok(EmpiricalRecurrence {
        masses,
        residuals,
        samples: used,
        batches,
    })
}

/// Exact data of the `(5:2)` resonance at `rho = eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResFullReport {
    pub rho_star: f64,
    pub rho_star_residual: f64,
    /// Ascending coefficients of `(x-1)(x^3+x^2-1)(x^3+x+1)`.
    pub product: Vec<i64>,
    pub factorization_holds: bool,
    pub alpha: f64,
    pub alpha_residual: f64,
    pub beta: f64,
    pub beta_residual: f64,
}

impl ResFullReport {
    pub fn to_json(&self) -> Value {
        json!({
            "rho_star": self.rho_star,
            "rho_star_residual": self.rho_star_residual,
            "characteristic_polynomial": self.product,
            "factorization_holds": self.factorization_holds,
            "alpha": self.alpha,
            "alpha_residual": self.alpha_residual,
            "beta": self.beta,
            "beta_residual": self.beta_residual,
        })
    }
}

pub fn res_full_analysis() -> ResFullReport {
    let rho_poly = [-1.0, 2.0, 0.0, 0.0, 0.0, 0.0, -2.0, 1.0];
    let rho_star = solve_eta(5, 2).expect("(5,2) is a valid resonance");
    let product = poly_mul(&poly_mul(&[-1, 1], &[-1, 0, 1, 1]), &[1, 1, 0, 1]);
    let h = vec![1, 0, -2, 0, 0, 0, 0, 1];
    let cubic_a = [-1.0, 0.0, 1.0, 1.0];
    let cubic_b = [1.0, 1.0, 0.0, 1.0];
    let alpha = bisect(|x| poly_eval(&cubic_a, x), 0.0, 1.0, BISECTION_TOL, BISECTION_MAX_ITER)
        .expect("sign change on (0, 1)");
    let beta = bisect(|x| poly_eval(&cubic_b, x), -1.0, 0.0, BISECTION_TOL, BISECTION_MAX_ITER)
        .expect("sign change on (-1, 0)");
    ResFullReport {
        rho_star,
        rho_star_residual: poly_eval(&rho_poly, rho_star).abs(),
        factorization_holds: product == h,
        product,
        alpha,
        alpha_residual: poly_eval(&cubic_a, alpha).abs(),
        beta,
        beta_residual: poly_eval(&cubic_b, beta).abs(),
    }
}

/// Dimension summary of a resonant system.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionReport {
    pub eta: f64,
    pub dim_supp: Option<f64>,
    pub dim_mu: Option<f64>,
    pub regime: Regime,
}

impl DimensionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "eta": self.eta,
            "dim_supp": self.dim_supp,
            "dim_mu": self.dim_mu,
            "regime": self.regime.as_str(),
        })
    }
}

/// `dim_mu` is filled in only for `l = 1` with `p_minus` inside the window.
pub fn dimension_report(res: &ResonantSystem) -> Result<DimensionReport> {
    let eta = solve_eta(res.k, res.l)?;
    let regime = regime(res.rho, res.k, res.l)?;
    if regime == Regime::Invalid {
        return Ok(DimensionReport {
            eta,
            dim_supp: None,
            dim_mu: None,
            regime,
        });
    }
    let dim_supp = support_dimension(res.rho, res.k, res.l)?.dim;
    let dim_mu = if res.l == 1 {
        measure_dimension(res.k, res.p_minus, res.rho).ok()
    } else {
        None
    };
    Ok(DimensionReport {
        eta,
        dim_supp: Some(dim_supp),
        dim_mu,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eta_values() {
        let cases = [
            (2, 1, 0.6180339887),
            (3, 1, 0.5436890127),
            (5, 2, 0.5136486017),
            (3, 2, 0.5806918320),
        ];
        for (k, l, e) in cases {
            let eta = solve_eta(k, l).unwrap();
            assert!(close(eta, e, 1e-9), "({k},{l}) {eta}");
            let res = eta.powi((k + l) as i32) - 2.0 * eta.powi(k as i32 + 1) + 2.0 * eta - 1.0;
            assert!(res.abs() < 1e-12);
        }
        assert!(close(solve_eta(2, 1).unwrap(), (5f64.sqrt() - 1.0) / 2.0, 1e-14));
    }

    #[test]
    fn support_dimension_values() {
        let d = support_dimension(0.5, 2, 1).unwrap();
        assert!(close(d.dim, 0.694242, 1e-6) && !d.boundary);
        let eta = solve_eta(5, 2).unwrap();
        let d = support_dimension(eta, 5, 2).unwrap();
        assert!(d.boundary && d.dim == 1.0);
        assert!(matches!(support_dimension(0.65, 2, 1), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn eta_pm_values() {
        let (m, p) = solve_eta_pm(2, 0.5).unwrap();
        assert!(close(m, 0.618034, 1e-6) && close(p, 0.618034, 1e-6));
        let (m, p) = solve_eta_pm(2, 0.4).unwrap();
        // roots of 0.6x^2 + 0.6x - 0.4 and 0.4x^2 + 0.4x - 0.6
        let qm = (-0.6 + (0.36f64 + 0.96).sqrt()) / 1.2;
        let qp = (-0.4 + (0.16f64 + 0.96).sqrt()) / 0.8;
        assert!(close(m, qm, 1e-12) && close(p, qp, 1e-12));
        let (m, p) = solve_eta_pm(2, 1.0 / 3.0).unwrap();
        assert!(close(m, (3f64.sqrt() - 1.0) / 2.0, 1e-12));
        assert_eq!(p, 1.0);
        assert!(solve_eta_pm(2, 1.5).is_err());
    }

    #[test]
    fn weights_values() {
        let w = symbolic_weights(2, 0.5).unwrap();
        assert!(close(w.c_minus, 0.309017, 1e-6) && close(w.c_plus, 0.309017, 1e-6));
        for b in [&w.beta_minus, &w.beta_plus] {
            assert!(close(b[0], 0.618034, 1e-6) && close(b[1], 0.381966, 1e-6));
        }
        let w = symbolic_weights(2, 0.4).unwrap();
        assert!(close(w.beta_minus[0], 0.548584, 1e-5) && close(w.beta_minus[1], 0.451417, 1e-5));
        assert!(symbolic_weights(2, 0.2).is_err());
    }

    #[test]
    fn cylinder_values() {
        let w = symbolic_weights(2, 0.5).unwrap();
        assert!(close(cylinder_mass(&w, -1, &[]).unwrap(), 0.190983, 1e-6));
        assert!(close(cylinder_mass(&w, -1, &[1]).unwrap(), 0.118034, 1e-6));
        assert!(close(cylinder_mass(&w, -2, &[]).unwrap(), 0.118034, 1e-6));
        assert!(cylinder_mass(&w, 0, &[]).is_err());
        assert!(cylinder_mass(&w, 1, &[3]).is_err());
    }

    #[test]
    fn measure_dimension_values() {
        assert!(close(measure_dimension(2, 0.5, 0.5).unwrap(), 0.694242, 1e-6));
        // entropy of the beta vectors over their mean contraction
        let w = symbolic_weights(2, 0.4).unwrap();
        let ent: f64 = w.beta_minus.iter().chain(&w.beta_plus).map(|b| b * b.ln()).sum();
        let lyap: f64 = (0..2)
            .map(|i| (w.beta_minus[i] + w.beta_plus[i]) * (i + 1) as f64 * 0.5f64.ln())
            .sum();
        let d = measure_dimension(2, 0.4, 0.5).unwrap();
        assert!(close(d, ent / lyap, 1e-12));
        assert!(close(d, 0.6838, 1e-3));
        assert!(d <= support_dimension(0.5, 2, 1).unwrap().dim + 1e-9);
        assert!(matches!(measure_dimension(2, 0.5, 0.65), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn interval_values() {
        let ivs = build_intervals(0.5, 2, 1, 2, 0).unwrap();
        let get = |j: i64| ivs.iter().find(|iv| iv.code.j == j).unwrap();
        let expect = [(-1, 2.0 / 7.0, 3.0 / 7.0), (1, 4.0 / 7.0, 5.0 / 7.0), (-2, 1.0 / 7.0, 3.0 / 14.0), (2, 11.0 / 14.0, 6.0 / 7.0)];
        for (j, lo, hi) in expect {
            assert!(close(get(j).lo, lo, 1e-15) && close(get(j).hi, hi, 1e-15), "j={j}");
        }
        assert!(matches!(build_intervals(0.65, 2, 1, 2, 0), Err(Error::InvalidRegime(_))));
    }

    #[test]
    fn kl_interval_identities() {
        let g = Geometry::new(0.45, 5, 2).unwrap();
        let sys = ResonantSystem::new(0.45, 5, 2, 0.5).unwrap().system();
        assert!(close(g.base_interval(-2).1, sys.fm_xm(), 1e-15));
        assert!(close(g.base_interval(2).0, sys.fp_xp(), 1e-15));
        assert!(close(g.i_base().1, g.j_base().1, 0.0));
        let ivs = build_intervals(0.45, 5, 2, 3, 2).unwrap();
        // J_{-1}, I_{-1}, I_{-1,1}, I_{-1,1,1}
        assert_eq!(ivs.iter().filter(|iv| iv.code.j == -1).count(), 4);
        for iv in &ivs {
            let mirror = ivs
                .iter()
                .find(|o| o.code.j == -iv.code.j && o.code.suffix == iv.code.suffix && o.hull == iv.hull)
                .unwrap();
            assert!(close(iv.lo, 1.0 - mirror.hi, 1e-15));
        }
    }

    #[test]
    fn ifs_values() {
        assert!(close(ifs_apply(0.5, 2, 1, 1, &[], 3.0 / 7.0).unwrap(), 2.0 / 7.0, 1e-15));
        assert!(close(ifs_apply(0.5, 2, 1, 2, &[], 2.0 / 7.0).unwrap(), 3.0 / 7.0, 1e-15));
        let g = Geometry::new(0.5, 2, 1).unwrap();
        assert!(close(g.phi(1).apply(1.0 / 3.0), 1.0 / 3.0, 1e-15));
        assert!(matches!(ifs_apply(0.5, 2, 1, 1, &[], 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn cantor_small_depths() {
        let a = cantor_approx(0.5, 2, 1, 1, 1).unwrap();
        let c: Vec<_> = a.copy(-1).collect();
        assert_eq!(c.len(), 2);
        assert!(c[0].hi < c[1].lo);
        assert!(c.iter().all(|iv| iv.lo >= 2.0 / 7.0 - 1e-15 && iv.hi <= 3.0 / 7.0 + 1e-15));
        let a = cantor_approx(0.5, 2, 1, 0, 2).unwrap();
        assert_eq!(a.intervals.len(), 4);
    }

    #[test]
    fn boundary_cover_has_no_gaps() {
        let eta = solve_eta(5, 2).unwrap();
        let a = cantor_approx(eta, 5, 2, 3, 1).unwrap();
        let g = Geometry::new(eta, 5, 2).unwrap();
        let jl = g.j_base().1 - g.j_base().0;
        let total: f64 = a.copy(-1).map(|iv| iv.len()).sum();
        assert!(close(total, jl, 1e-9), "{total} vs {jl}");
    }

    #[test]
    fn box_dimension_values() {
        let a = cantor_approx(0.5, 2, 1, 10, 1).unwrap();
        let d = box_dimension_estimate(&a).unwrap();
        assert!(close(d, 0.694242, 0.05), "{d}");
        let a = cantor_approx(0.5, 2, 1, 0, 1).unwrap();
        assert_eq!(box_dimension_estimate(&a).unwrap(), 0.0);
        let a = cantor_approx(0.5, 2, 1, 2, 1).unwrap();
        assert!(matches!(box_dimension_estimate(&a), Err(Error::InsufficientDepth(_))));
    }

    #[test]
    fn pressure_values() {
        let p = pressure(0.45, 5, 2, 1.0).unwrap();
        // ln((r^2 - 2 r^6 + r^7) / (1 - 2 r + r^2)) at r = 0.45
        let r: f64 = 0.45;
        let closed = ((r.powi(2) - 2.0 * r.powi(6) + r.powi(7)) / (1.0 - 2.0 * r + r * r)).ln();
        assert!(close(p, closed, 1e-14));
        assert!(close(p, -0.467010885, 1e-9));
        let d = solve_pressure_zero(0.45, 5, 2).unwrap();
        assert!(close(d, 0.834327, 1e-5));
        assert!(pressure(0.45, 5, 2, d).unwrap().abs() < 1e-10);
        assert!(pressure(0.45, 5, 2, 1e-6).unwrap() > 10.0);
        assert!(matches!(pressure(0.45, 5, 2, 0.0), Err(Error::OutsideDomain { .. })));
        let eta = solve_eta(5, 2).unwrap();
        assert!(close(solve_pressure_zero(eta, 5, 2).unwrap(), 1.0, 1e-9));
        assert!(close(solve_pressure_zero(0.5, 2, 1).unwrap(), 0.694242, 1e-6));
    }

    #[test]
    fn pressure_t0_for_long_tails() {
        let t0 = pressure_t0(0.4, 3).unwrap();
        // rho^t0 is the golden ratio conjugate for l = 3
        assert!(close(0.4f64.powf(t0), 0.6180339887, 1e-9));
        let closed = |t: f64| {
            let u = 0.4f64.powf(t);
            ((u.powi(3) - 2.0 * u.powi(5) + u.powi(7)) / (1.0 - 2.0 * u + u.powi(3))).ln()
        };
        for t in [t0 + 0.05, 0.7, 0.9, 1.0] {
            assert!(close(pressure(0.4, 4, 3, t).unwrap(), closed(t), 1e-12));
        }
    }

    #[test]
    fn recurrence_values() {
        let alpha = res_full_analysis().alpha;
        let m: Vec<f64> = (1..=15).map(|j| 0.3 * alpha.powi(j)).collect();
        for (_, r) in recurrence_residuals(&m, 5, 2).unwrap() {
            assert!(r.abs() < 1e-12);
        }
        let flat = vec![0.05; 12];
        assert!(recurrence_residuals(&flat, 5, 2).unwrap().iter().all(|(_, r)| r.abs() < 1e-15));
        assert!(matches!(recurrence_residuals(&flat[..8], 5, 2), Err(Error::InsufficientData(_))));
        let js: Vec<usize> = recurrence_residuals(&flat, 5, 2).unwrap().iter().map(|p| p.0).collect();
        assert_eq!(js, vec![3, 4, 5, 6, 7]);
    }

    #[test]
    fn res_full_values() {
        let r = res_full_analysis();
        assert!(close(r.rho_star, 0.513649, 1e-5));
        assert!(r.factorization_holds);
        assert_eq!(r.product, vec![1, 0, -2, 0, 0, 0, 0, 1]);
        assert!(close(r.alpha, 0.754878, 1e-6) && r.alpha_residual < 1e-12);
        assert!(close(r.beta, -0.682328, 1e-6) && r.beta_residual < 1e-12);
    }

    #[test]
    fn code_strings() {
        let c = IntervalCode {
            j: -1,
            suffix: vec![],
            cylinder: vec![RSymbol::simple(2), RSymbol::simple(1)],
        };
        assert_eq!(c.to_string(), "j=-1;s=;c=2,1");
        let c = IntervalCode {
            j: 3,
            suffix: vec![1, 1],
            cylinder: vec![RSymbol { r: 3, tail: vec![1] }],
        };
        assert_eq!(c.to_string(), "j=3;s=1,1;c=3.1");
        assert!(c.validate(5, 2).is_ok());
        assert!(c.validate(3, 2).is_err());
    }

    #[test]
    fn report_json() {
        let r = dimension_report(&ResonantSystem::new(0.5, 2, 1, 0.5).unwrap()).unwrap();
        assert_eq!(r.regime, Regime::Disjoint);
        let v = r.to_json();
        assert!(close(v["dim_supp"].as_f64().unwrap(), 0.694242, 1e-6));
        assert!(close(v["dim_mu"].as_f64().unwrap(), 0.694242, 1e-6));
        let r = dimension_report(&ResonantSystem::new(0.65, 2, 1, 0.5).unwrap()).unwrap();
        assert_eq!(r.to_json()["regime"], "invalid");
    }
}
