//! The increasing homeomorphism conjugating two symmetric resonant systems
//! with the same `(k:l)`.
//!
//! Both systems carry the same tree of intervals and gaps, so a point is
//! located in the first tree and sent to the matching place in the second:
//! gaps map affinely onto gaps, and points of the limit set are refined
//! until the matching interval of the second tree is shorter than `tol`.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::resonant::{Geometry, IntervalCode, Node, Regime};
use crate::rng::SplitMix64;
use crate::system::{check_unit, reflect, ResonantSystem, Sign};

pub const DEFAULT_MAX_DEPTH: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    InLambda,
    InGap,
}

/// A complementary gap of the limit set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapId {
    /// `U_j`: between `J_{j-1}` and `J_j` for `j < 0`, the central gap for
    /// `j = 0`, between `J_j` and `J_{j+1}` for `j > 0`.
    Top(i64),
    /// Between two neighbouring intervals of the same parent.
    Between { left: IntervalCode, right: IntervalCode },
}

impl std::fmt::Display for GapId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GapId::Top(j) => write!(f, "U{j}"),
            GapId::Between { left, right } => write!(f, "({left})|({right})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCode {
    pub kind: PointKind,
    /// Deepest interval containing the point; `None` for top-level gaps.
    pub code: Option<IntervalCode>,
    pub gap: Option<GapId>,
    /// Relative position in the containing gap or interval.
    pub offset: f64,
    /// Number of contracting refinement steps taken.
    pub depth: u32,
}

impl PointCode {
    fn mirrored(mut self) -> Self {
        if let Some(c) = self.code.as_mut() {
            c.j = -c.j;
        }
        self.gap = self.gap.map(|g| match g {
            GapId::Top(j) => GapId::Top(-j),
            GapId::Between { left, right } => {
                let flip = |mut c: IntervalCode| {
                    c.j = -c.j;
                    c
                };
                GapId::Between {
                    left: flip(right),
                    right: flip(left),
                }
            }
        });
        self.offset = 1.0 - self.offset;
        self
    }
}

fn slack(x: f64) -> f64 {
    64.0 * f64::EPSILON * x.abs().max(1.0)
}

enum Pick {
    Child(usize),
    Gap(usize),
}

/// Where `y` sits among sorted, disjoint children that span their parent.
fn pick(children: &[(f64, f64)], y: f64) -> Pick {
    if let Some(i) = children.iter().position(|&(lo, hi)| lo <= y && y <= hi) {
        return Pick::Child(i);
    }
    let eps = slack(y);
    if let Some(i) = children
        .iter()
        .position(|&(lo, hi)| lo - eps <= y && y <= hi + eps)
    {
        return Pick::Child(i);
    }
    match children.iter().position(|&(lo, _)| y < lo) {
        Some(0) => Pick::Child(0),
        Some(i) => Pick::Gap(i - 1),
        None => Pick::Child(children.len() - 1),
    }
}

/// Children of `node` sorted left to right, with their intervals.
fn sorted_children(g: &Geometry, node: &Node) -> Vec<(Node, (f64, f64))> {
    let mut ch: Vec<(Node, (f64, f64))> = g
        .children(node)
        .into_iter()
        .map(|c| {
            let iv = g.node_interval(&c);
            (c, iv)
        })
        .collect();
    ch.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
    ch
}

/// Position of `x in (0, 1/2]` relative to the copies: either inside the
/// central gap, a top-level gap, or copy `-(n+1)` at frame coordinate `y`.
enum Top {
    Central,
    Gap { n: i32, y: f64 },
    Copy { n: i32, y: f64 },
}

fn top_level(g: &Geometry, x: f64) -> Top {
    let (inf_j, s) = g.j_base();
    if x > s {
        return Top::Central;
    }
    let rho = g.rho;
    let mut n = ((x / s).ln() / rho.ln()).floor().max(0.0) as i32;
    while n > 0 && x > rho.powi(n) * s {
        n -= 1;
    }
    while x <= rho.powi(n + 1) * s {
        n += 1;
    }
    let y = (x / rho.powi(n)).min(s);
    if y < inf_j {
        Top::Gap { n, y }
    } else {
        Top::Copy { n, y }
    }
}

fn offset_in(lo: f64, hi: f64, y: f64) -> f64 {
    ((y - lo) / (hi - lo)).clamp(0.0, 1.0)
}

/// Address of `x` in the interval tree of `res`, refined `max_depth` times.
pub fn locate(res: &ResonantSystem, x: f64, max_depth: u32) -> Result<PointCode> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!("{x} is not in (0, 1)")));
    }
    let g = Geometry::from_system(res)?;
    if g.regime != Regime::Disjoint {
        return Err(Error::InvalidRegime("locate needs rho < eta".into()));
    }
    if x > 0.5 {
        return Ok(locate_left(&g, reflect(x), max_depth).mirrored());
    }
    Ok(locate_left(&g, x, max_depth))
}

fn locate_left(g: &Geometry, x: f64, max_depth: u32) -> PointCode {
    let (inf_j, s) = g.j_base();
    let (n, y) = match top_level(g, x) {
        Top::Central => {
            return PointCode {
                kind: PointKind::InGap,
                code: None,
                gap: Some(GapId::Top(0)),
                offset: offset_in(s, 1.0 - s, x),
                depth: 0,
            }
        }
        Top::Gap { n, y } => {
            return PointCode {
                kind: PointKind::InGap,
                code: None,
                gap: Some(GapId::Top(-(n as i64) - 1)),
                offset: offset_in(g.rho * s, inf_j, y),
                depth: 0,
            }
        }
        Top::Copy { n, y } => (n, y),
    };
    let j = -(n as i64) - 1;
    let with_j = |mut c: IntervalCode| {
        c.j = j;
        c
    };
    let mut node = g.root();
    let mut depth = 0u32;
    loop {
        let (lo, hi) = g.node_interval(&node);
        if depth >= max_depth {
            return PointCode {
                kind: PointKind::InLambda,
                code: Some(with_j(node.code)),
                gap: None,
                offset: offset_in(lo, hi, y),
                depth,
            };
        }
        let ch = sorted_children(g, &node);
        let ivs: Vec<(f64, f64)> = ch.iter().map(|c| c.1).collect();
        match pick(&ivs, y) {
            Pick::Gap(i) => {
                return PointCode {
                    kind: PointKind::InGap,
                    code: Some(with_j(node.code)),
                    gap: Some(GapId::Between {
                        left: with_j(ch[i].0.code.clone()),
                        right: with_j(ch[i + 1].0.code.clone()),
                    }),
                    offset: offset_in(ivs[i].1, ivs[i + 1].0, y),
                    depth,
                }
            }
            Pick::Child(i) => {
                let child = ch[i].0.clone();
                if child.exponent > node.exponent {
                    depth += 1;
                }
                node = child;
            }
        }
    }
}

/// Value of the conjugacy at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub value: f64,
    /// False when the depth cap was hit before the bracket shrank below `tol`.
    pub precise: bool,
}

/// The conjugacy `h` with `g_s o h = h o f_s` for both signs.
#[derive(Debug, Clone)]
pub struct Conjugacy {
    f: Geometry,
    g: Geometry,
    pub max_depth: u32,
}

impl Conjugacy {
    pub fn new(f: &ResonantSystem, g: &ResonantSystem) -> Result<Self> {
        if (f.k, f.l) != (g.k, g.l) {
            return Err(Error::MismatchedResonance(f.k, f.l, g.k, g.l));
        }
        let gf = Geometry::from_system(f)?;
        let gg = Geometry::from_system(g)?;
        for geo in [&gf, &gg] {
            if geo.regime != Regime::Disjoint {
                return Err(Error::InvalidRegime(format!(
                    "conjugacy needs rho < eta, got rho = {}",
                    geo.rho
                )));
            }
        }
        Ok(Conjugacy {
            f: gf,
            g: gg,
            max_depth: DEFAULT_MAX_DEPTH,
        })
    }

    pub fn eval(&self, x: f64, tol: f64) -> Result<HValue> {
        check_unit(x)?;
        if x == 0.0 || x == 1.0 {
            return Ok(HValue {
                value: x,
                precise: true,
            });
        }
        if x > 0.5 {
            let h = self.eval_left(reflect(x), tol);
            return Ok(HValue {
                value: reflect(h.value),
                precise: h.precise,
            });
        }
        Ok(self.eval_left(x, tol))
    }

    fn eval_left(&self, x: f64, tol: f64) -> HValue {
        let (f, g) = (&self.f, &self.g);
        let (inf_f, s_f) = f.j_base();
        let (inf_g, s_g) = g.j_base();
        let exact = |value| HValue {
            value,
            precise: true,
        };
        let (n, y) = match top_level(f, x) {
            Top::Central => {
                // centred so that 1/2 maps to 1/2 exactly
                let u = (x - 0.5) / (0.5 - s_f);
                return exact(0.5 + u * (0.5 - s_g));
            }
            Top::Gap { n, y } => {
                let t = offset_in(f.rho * s_f, inf_f, y);
                let v = g.rho * s_g + t * (inf_g - g.rho * s_g);
                return exact(v * g.rho.powi(n));
            }
            Top::Copy { n, y } => (n, y),
        };
        let scale_g = g.rho.powi(n);
        let mut nf = f.root();
        let mut ng = g.root();
        let mut depth = 0u32;
        loop {
            let (flo, fhi) = f.node_interval(&nf);
            let (glo, ghi) = g.node_interval(&ng);
            if scale_g * (ghi - glo) < tol {
                let t = offset_in(flo, fhi, y);
                return exact((glo + t * (ghi - glo)) * scale_g);
            }
            if depth >= self.max_depth {
                return HValue {
                    value: 0.5 * (glo + ghi) * scale_g,
                    precise: false,
                };
            }
            let cf = sorted_children(f, &nf);
            let cg = sorted_children(g, &ng);
            debug_assert!(cf.iter().zip(&cg).all(|(a, b)| a.0.code == b.0.code));
            let ivs: Vec<(f64, f64)> = cf.iter().map(|c| c.1).collect();
            match pick(&ivs, y) {
                Pick::Gap(i) => {
                    let t = offset_in(ivs[i].1, ivs[i + 1].0, y);
                    let (a, b) = (cg[i].1 .1, cg[i + 1].1 .0);
                    return exact((a + t * (b - a)) * scale_g);
                }
                Pick::Child(i) => {
                    if cf[i].0.exponent > nf.exponent {
                        depth += 1;
                    }
                    nf = cf[i].0.clone();
                    ng = cg[i].0.clone();
                }
            }
        }
    }
}

pub fn evaluate_h(f: &ResonantSystem, g: &ResonantSystem, x: f64, tol: f64) -> Result<f64> {
    let h = Conjugacy::new(f, g)?.eval(x, tol)?;
    if !h.precise {
        log::warn!("h({x}) hit the refinement cap; returning the bracket midpoint");
    }
    Ok(h.value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyReport {
    pub max_residual: f64,
    pub monotone: bool,
    pub samples: usize,
    pub tol: f64,
}

impl ConjugacyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "max_residual": self.max_residual,
            "monotone": self.monotone,
            "samples": self.samples,
            "tol": self.tol,
        })
    }
}

/// Largest `|g_s(h(x)) - h(f_s(x))|` over uniformly drawn `x` and both signs,
/// plus a monotonicity check on the sorted sample.
pub fn verify_conjugacy(
    f: &ResonantSystem,
    g: &ResonantSystem,
    n_samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ConjugacyReport> {
    let h = Conjugacy::new(f, g)?;
    let (sf, sg) = (f.system(), g.system());
    let mut rng = SplitMix64::new(seed);
    let mut xs: Vec<f64> = (0..n_samples).map(|_| rng.next_f64()).collect();
    xs.sort_by(f64::total_cmp);
    let rows: Vec<(f64, f64)> = xs
        .par_iter()
        .map(|&x| -> Result<(f64, f64)> {
            let hx = h.eval(x, tol)?.value;
            let mut worst = 0.0f64;
            for sign in [Sign::Minus, Sign::Plus] {
                let lhs = sg.apply(sign, hx)?;
                let rhs = h.eval(sf.apply(sign, x)?, tol)?.value;
                worst = worst.max((lhs - rhs).abs());
            }
            Ok((hx, worst))
        })
        .collect::<Result<_>>()?;
    let max_residual = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let monotone = rows
        .windows(2)
        .zip(xs.windows(2))
        .all(|(hw, xw)| xw[1] == xw[0] || hw[1].0 > hw[0].0);
    Ok(ConjugacyReport {
        max_residual,
        monotone,
        samples: n_samples,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resonant::RSymbol;

    fn res(rho: f64, k: u32, l: u32) -> ResonantSystem {
        ResonantSystem::new(rho, k, l, 0.5).unwrap()
    }

    #[test]
    fn locate_central_gap() {
        let c = locate(&res(0.5, 2, 1), 0.5, 20).unwrap();
        assert_eq!(c.kind, PointKind::InGap);
        assert_eq!(c.gap, Some(GapId::Top(0)));
        assert!((c.offset - 0.5).abs() < 1e-15);
    }

    #[test]
    fn locate_cycle_point() {
        let c = locate(&res(0.5, 2, 1), 2.0 / 7.0, 12).unwrap();
        assert_eq!(c.kind, PointKind::InLambda);
        let code = c.code.unwrap();
        assert_eq!(code.j, -1);
        let rs: Vec<u32> = code.cylinder.iter().map(|s| s.r).collect();
        let expected: Vec<u32> = (0..rs.len()).map(|i| if i % 2 == 0 { 1 } else { 2 }).collect();
        assert_eq!(rs, expected);
        assert!(rs.len() >= 8);
    }

    #[test]
    fn locate_top_gap() {
        // (3/28, 1/7) separates I_{-3} from I_{-2}
        let x = 0.12;
        let c = locate(&res(0.5, 2, 1), x, 20).unwrap();
        assert_eq!(c.gap, Some(GapId::Top(-2)));
        let expected = (x - 3.0 / 28.0) / (1.0 / 7.0 - 3.0 / 28.0);
        assert!((c.offset - expected).abs() < 1e-12);
        // 1/10 lies in I_{-3} = [1/14, 3/28], not in a gap next to it
        let c = locate(&res(0.5, 2, 1), 0.1, 20).unwrap();
        assert_eq!(c.code.unwrap().j, -3);
        let m = locate(&res(0.5, 2, 1), 1.0 - x, 20).unwrap();
        assert_eq!(m.gap, Some(GapId::Top(2)));
        assert!((m.offset - (1.0 - expected)).abs() < 1e-12);
    }

    #[test]
    fn locate_inner_gap() {
        // between phi_1(I_{-1}) = [2/7, 5/14] and phi_2(I_{-1}) = [11/28, 3/7]
        let c = locate(&res(0.5, 2, 1), 0.375, 20).unwrap();
        assert_eq!(c.kind, PointKind::InGap);
        match c.gap.unwrap() {
            GapId::Between { left, right } => {
                assert_eq!(left.cylinder, vec![RSymbol::simple(1)]);
                assert_eq!(right.cylinder, vec![RSymbol::simple(2)]);
            }
            g => panic!("unexpected {g:?}"),
        }
        assert!(locate(&res(0.5, 2, 1), 1.0, 5).is_err());
    }

    #[test]
    fn h_values() {
        let (f, g) = (res(0.5, 2, 1), res(0.55, 2, 1));
        assert_eq!(evaluate_h(&f, &g, 0.0, 1e-10).unwrap(), 0.0);
        assert_eq!(evaluate_h(&f, &g, 1.0, 1e-10).unwrap(), 1.0);
        assert_eq!(evaluate_h(&f, &g, 0.5, 1e-10).unwrap(), 0.5);
        let r: f64 = 0.55;
        let inf_g = r * (1.0 - r) / (1.0 - r.powi(3));
        let h = evaluate_h(&f, &g, 2.0 / 7.0, 1e-10).unwrap();
        assert!((h - inf_g).abs() < 1e-9, "{h} vs {inf_g}");
        assert!((h - 0.296896).abs() < 1e-6);
    }

    #[test]
    fn h_identity_and_inverse() {
        let f = res(0.5, 2, 1);
        let g = res(0.55, 2, 1);
        let hf = Conjugacy::new(&f, &f).unwrap();
        let fwd = Conjugacy::new(&f, &g).unwrap();
        let back = Conjugacy::new(&g, &f).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..200 {
            let x = rng.next_f64();
            assert!((hf.eval(x, 1e-10).unwrap().value - x).abs() < 1e-10);
            let y = fwd.eval(x, 1e-10).unwrap().value;
            assert!((back.eval(y, 1e-10).unwrap().value - x).abs() < 1e-9);
        }
    }

    #[test]
    fn equivariance_kl() {
        let r = verify_conjugacy(&res(0.45, 5, 2), &res(0.48, 5, 2), 200, 1e-9, 2).unwrap();
        assert!(r.monotone);
        assert!(r.max_residual < 1e-8, "{}", r.max_residual);
    }

    #[test]
    fn mismatch_is_rejected() {
        assert!(matches!(
            Conjugacy::new(&res(0.5, 2, 1), &res(0.5, 3, 1)),
            Err(Error::MismatchedResonance(2, 1, 3, 1))
        ));
        assert!(matches!(
            Conjugacy::new(&res(0.5, 2, 1), &res(0.65, 2, 1)),
            Err(Error::InvalidRegime(_))
        ));
    }
}
