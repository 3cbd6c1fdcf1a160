//! Two-map piecewise-affine interval systems: evaluation, inverses, type,
//! Lyapunov exponents and resonance.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use crate::error::{out_of_range, Error, Result};

/// Absolute tolerance for comparing corner images and breakpoints.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// Which of the two maps to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// The reflection `x -> 1 - x` of the unit interval.
#[inline]
pub fn reflect(x: f64) -> f64 {
    1.0 - x
}

/// Fixed endpoint of `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemClass {
    Disjoint,
    Border,
    Overlapping,
}

impl SystemClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SystemClass::Disjoint => "disjoint",
            SystemClass::Border => "border",
            SystemClass::Overlapping => "overlapping",
        }
    }
}

/// Lyapunov exponents at the two fixed endpoints, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovPair {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl LyapunovPair {
    pub fn both_positive(&self) -> bool {
        self.lambda0 > 0.0 && self.lambda1 > 0.0
    }
}

/// A pair of increasing piecewise-affine homeomorphisms of `[0, 1]`:
/// `f_-` lies below the diagonal, `f_+` above, each with one kink.
///
/// Only the four slopes are free; breakpoints and corner images are derived
/// on construction and cached, together with their complements `1 - value`
/// computed without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmSystem {
    a_minus: f64,
    b_minus: f64,
    a_plus: f64,
    b_plus: f64,
    x_minus: f64,
    x_plus: f64,
    fm_xm: f64,
    fp_xp: f64,
    // 1 - x_minus, 1 - x_plus, 1 - fm_xm, 1 - fp_xp
    x_minus_c: f64,
    x_plus_c: f64,
    fm_xm_c: f64,
    fp_xp_c: f64,
}

impl AmSystem {
    pub fn new(a_minus: f64, b_minus: f64, a_plus: f64, b_plus: f64) -> Result<Self> {
        let slope_ok = |a: f64, b: f64| a > 0.0 && a < 1.0 && b > 1.0 && b.is_finite();
        if !slope_ok(a_minus, b_minus) {
            return Err(out_of_range(format!(
                "need 0 < a_minus < 1 < b_minus, got a_minus={a_minus}, b_minus={b_minus}"
            )));
        }
        if !slope_ok(a_plus, b_plus) {
            return Err(out_of_range(format!(
                "need 0 < a_plus < 1 < b_plus, got a_plus={a_plus}, b_plus={b_plus}"
            )));
        }
        let dm = b_minus - a_minus;
        let dp = b_plus - a_plus;
        let x_minus = (b_minus - 1.0) / dm;
        let x_minus_c = (1.0 - a_minus) / dm;
        let x_plus = (1.0 - a_plus) / dp;
        let x_plus_c = (b_plus - 1.0) / dp;
        let fm_xm = a_minus * x_minus;
        let fm_xm_c = b_minus * x_minus_c;
        let fp_xp = b_plus * x_plus;
        let fp_xp_c = a_plus * x_plus_c;
        Ok(AmSystem {
            a_minus,
            b_minus,
            a_plus,
            b_plus,
            x_minus,
            x_plus,
            fm_xm,
            fp_xp,
            x_minus_c,
            x_plus_c,
            fm_xm_c,
            fp_xp_c,
        })
    }

    /// Symmetric system with `a_- = a_+ = a` and `b_- = b_+ = b`.
    pub fn symmetric(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, a, b)
    }

    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }
    pub fn b_minus(&self) -> f64 {
        self.b_minus
    }
    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }
    pub fn b_plus(&self) -> f64 {
        self.b_plus
    }
    pub fn x_minus(&self) -> f64 {
        self.x_minus
    }
    pub fn x_plus(&self) -> f64 {
        self.x_plus
    }
    /// `f_-(x_-)`, the right end of `[0, f_-(x_-)]`.
    pub fn fm_xm(&self) -> f64 {
        self.fm_xm
    }
    /// `f_+(x_+)`, the left end of `[f_+(x_+), 1]`.
    pub fn fp_xp(&self) -> f64 {
        self.fp_xp
    }

    pub fn is_symmetric(&self) -> bool {
        self.a_minus == self.a_plus && self.b_minus == self.b_plus
    }

    pub fn apply(&self, sign: Sign, x: f64) -> Result<f64> {
        check_unit(x)?;
        Ok(self.apply_unchecked(sign, x))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&self, sign: Sign, x: f64) -> f64 {
        match sign {
            Sign::Minus => {
                if x <= self.x_minus {
                    self.a_minus * x
                } else {
                    1.0 - self.b_minus * (1.0 - x)
                }
            }
            Sign::Plus => {
                if x <= self.x_plus {
                    self.b_plus * x
                } else {
                    1.0 - self.a_plus * (1.0 - x)
                }
            }
        }
    }

    pub fn apply_inverse(&self, sign: Sign, y: f64) -> Result<f64> {
        check_unit(y)?;
        Ok(self.apply_inverse_unchecked(sign, y))
    }

    #[inline]
    pub(crate) fn apply_inverse_unchecked(&self, sign: Sign, y: f64) -> f64 {
        match sign {
            Sign::Minus => {
                if y <= self.fm_xm {
                    y / self.a_minus
                } else {
                    1.0 - (1.0 - y) / self.b_minus
                }
            }
            Sign::Plus => {
                if y <= self.fp_xp {
                    y / self.b_plus
                } else {
                    1.0 - (1.0 - y) / self.a_plus
                }
            }
        }
    }

    /// Derivative of the chosen map on the branch containing `x`
    /// (the left branch at the kink itself).
    pub fn slope_at(&self, sign: Sign, x: f64) -> f64 {
        match sign {
            Sign::Minus if x <= self.x_minus => self.a_minus,
            Sign::Minus => self.b_minus,
            Sign::Plus if x <= self.x_plus => self.b_plus,
            Sign::Plus => self.a_plus,
        }
    }

    /// Kink of the chosen map.
    pub fn kink(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Minus => self.x_minus,
            Sign::Plus => self.x_plus,
        }
    }

    /// Image of the chosen map's kink.
    pub fn kink_image(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Minus => self.fm_xm,
            Sign::Plus => self.fp_xp,
        }
    }

    /// Slopes of the chosen map on its (left, right) branch.
    pub fn branch_slopes(&self, sign: Sign) -> (f64, f64) {
        match sign {
            Sign::Minus => (self.a_minus, self.b_minus),
            Sign::Plus => (self.b_plus, self.a_plus),
        }
    }

    /// One step on a point stored as its distance to the nearer endpoint.
    #[inline]
    pub(crate) fn apply_sided(&self, sign: Sign, p: SidedPoint) -> SidedPoint {
        let (left_branch, slope) = match sign {
            Sign::Minus => {
                let on_left = if p.right {
                    p.d >= self.x_minus_c
                } else {
                    p.d <= self.x_minus
                };
                (on_left, if on_left { self.a_minus } else { self.b_minus })
            }
            Sign::Plus => {
                let on_left = if p.right {
                    p.d >= self.x_plus_c
                } else {
                    p.d <= self.x_plus
                };
                (on_left, if on_left { self.b_plus } else { self.a_plus })
            }
        };
        if left_branch {
            // y = slope * x
            let x = if p.right { 1.0 - p.d } else { p.d };
            SidedPoint::from_left(slope * x)
        } else {
            // 1 - y = slope * (1 - x)
            let c = if p.right { p.d } else { 1.0 - p.d };
            SidedPoint::from_right(slope * c)
        }
    }

    pub fn lyapunov_exponents(&self, p_minus: f64) -> Result<LyapunovPair> {
        check_probability(p_minus)?;
        let p_plus = 1.0 - p_minus;
        Ok(LyapunovPair {
            lambda0: p_minus * self.a_minus.ln() + p_plus * self.b_plus.ln(),
            lambda1: p_minus * self.b_minus.ln() + p_plus * self.a_plus.ln(),
        })
    }

    pub fn classify_type(&self) -> SystemClass {
        let diff = self.fm_xm - self.fp_xp;
        if diff.abs() <= BREAKPOINT_TOL {
            SystemClass::Border
        } else if diff < 0.0 {
            SystemClass::Disjoint
        } else {
            SystemClass::Overlapping
        }
    }

    /// The open central interval `(f_-(x_-), f_+(x_+))`, present only for
    /// disjoint systems.
    pub fn central_interval(&self) -> Result<(f64, f64)> {
        match self.classify_type() {
            SystemClass::Disjoint => Ok((self.fm_xm, self.fp_xp)),
            _ => Err(Error::NotDisjointType),
        }
    }

    /// Searches for a `(k:l)` resonance at `endpoint` among the continued
    /// fraction convergents of `-ln(expanding slope)/ln(contracting slope)`.
    pub fn detect_resonance(
        &self,
        endpoint: Endpoint,
        max_denominator: u64,
        tol: f64,
    ) -> Option<(u64, u64)> {
        let (contracting, expanding) = match endpoint {
            Endpoint::Zero => (self.a_minus, self.b_plus),
            Endpoint::One => (self.a_plus, self.b_minus),
        };
        let target = -expanding.ln() / contracting.ln();
        best_convergent(target, max_denominator, tol)
    }
}

impl fmt::Display for AmSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a_minus={} b_minus={} a_plus={} b_plus={}",
            self.a_minus, self.b_minus, self.a_plus, self.b_plus
        )
    }
}

/// First continued-fraction convergent `k/l` of `target` with `l <= max_den`
/// and `|target - k/l| < tol`.
fn best_convergent(target: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    if !(target.is_finite() && target > 0.0) || max_den == 0 {
        return None;
    }
    let (mut h_prev, mut h) = (1u64, target.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = target - target.floor();
    loop {
        if (target - h as f64 / k as f64).abs() < tol && h > 0 {
            return Some((h, k));
        }
        if frac.abs() < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let next_k = a.checked_mul(k)?.checked_add(k_prev)?;
        if next_k > max_den {
            return None;
        }
        let next_h = a.checked_mul(h)?.checked_add(h_prev)?;
        h_prev = h;
        h = next_h;
        k_prev = k;
        k = next_k;
    }
}

/// Exact type classification for rational slopes.
pub fn classify_type_exact(
    a_minus: &BigRational,
    b_minus: &BigRational,
    a_plus: &BigRational,
    b_plus: &BigRational,
) -> Result<SystemClass> {
    let one = BigRational::one();
    let zero = BigRational::zero();
    let ok = |a: &BigRational, b: &BigRational| *a > zero && *a < one && *b > one;
    if !ok(a_minus, b_minus) || !ok(a_plus, b_plus) {
        return Err(out_of_range("rational slopes must satisfy 0 < a < 1 < b"));
    }
    let x_minus = (b_minus - &one) / (b_minus - a_minus);
    let x_plus = (&one - a_plus) / (b_plus - a_plus);
    let fm_xm = a_minus * x_minus;
    let fp_xp = b_plus * x_plus;
    let diff = fm_xm - fp_xp;
    Ok(if diff.is_zero() {
        SystemClass::Border
    } else if diff.is_negative() {
        SystemClass::Disjoint
    } else {
        SystemClass::Overlapping
    })
}

/// Convenience for building rationals from small integer pairs.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A point of `[0, 1]` stored as its distance `d <= 1/2` to the nearer
/// endpoint, so orbits close to 1 keep full relative precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SidedPoint {
    pub right: bool,
    pub d: f64,
}

impl SidedPoint {
    #[inline]
    pub fn new(x: f64) -> Self {
        if x <= 0.5 {
            SidedPoint { right: false, d: x }
        } else {
            SidedPoint {
                right: true,
                d: 1.0 - x,
            }
        }
    }

    #[inline]
    fn from_left(x: f64) -> Self {
        Self::new(x)
    }

    #[inline]
    fn from_right(c: f64) -> Self {
        if c <= 0.5 {
            SidedPoint { right: true, d: c }
        } else {
            SidedPoint {
                right: false,
                d: 1.0 - c,
            }
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        if self.right {
            1.0 - self.d
        } else {
            self.d
        }
    }

    /// Distance between two points, exact when they share a side.
    #[inline]
    pub fn distance(self, other: SidedPoint) -> f64 {
        if self.right == other.right {
            (self.d - other.d).abs()
        } else {
            (self.value() - other.value()).abs()
        }
    }
}

/// Symmetric `(k:l)`-resonant system: `a = rho^l`, `b = rho^-k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantSystem {
    pub rho: f64,
    pub k: u32,
    pub l: u32,
    pub p_minus: f64,
}

impl ResonantSystem {
    pub fn new(rho: f64, k: u32, l: u32, p_minus: f64) -> Result<Self> {
        validate_resonance(rho, k, l)?;
        check_probability(p_minus)?;
        Ok(ResonantSystem { rho, k, l, p_minus })
    }

    pub fn system(&self) -> AmSystem {
        from_resonance(self).expect("validated on construction")
    }
}

pub(crate) fn validate_resonance(rho: f64, k: u32, l: u32) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(out_of_range(format!("rho must lie in (0, 1), got {rho}")));
    }
    if l < 1 || k <= l {
        return Err(out_of_range(format!("need k > l >= 1, got k={k}, l={l}")));
    }
    if gcd(k, l) != 1 {
        return Err(out_of_range(format!("k={k} and l={l} are not coprime")));
    }
    Ok(())
}

pub fn from_resonance(res: &ResonantSystem) -> Result<AmSystem> {
    validate_resonance(res.rho, res.k, res.l)?;
    let a = res.rho.powi(res.l as i32);
    let b = res.rho.powi(-(res.k as i32));
    AmSystem::symmetric(a, b)
}

/// Open interval of `p_minus` for which both exponents of a symmetric
/// `(k:l)`-resonant system are positive.
pub fn positivity_window(k: u32, l: u32) -> (f64, f64) {
    let s = (k + l) as f64;
    (l as f64 / s, k as f64 / s)
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{x} is not in [0, 1]")))
    }
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(out_of_range(format!("probability must lie in (0, 1), got {p}")))
    }
}

/// A system as read from or written to JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSpec {
    Affine(AmSystem),
    Resonant(ResonantSystem),
}

impl SystemSpec {
    pub fn system(&self) -> AmSystem {
        match self {
            SystemSpec::Affine(s) => *s,
            SystemSpec::Resonant(r) => r.system(),
        }
    }

    pub fn resonant(&self) -> Option<&ResonantSystem> {
        match self {
            SystemSpec::Resonant(r) => Some(r),
            SystemSpec::Affine(_) => None,
        }
    }

    pub fn p_minus(&self) -> Option<f64> {
        self.resonant().map(|r| r.p_minus)
    }

    pub fn to_json(&self) -> Value {
        match self {
            SystemSpec::Affine(s) => json!({
                "a_minus": s.a_minus,
                "b_minus": s.b_minus,
                "a_plus": s.a_plus,
                "b_plus": s.b_plus,
            }),
            SystemSpec::Resonant(r) => json!({
                "rho": r.rho,
                "k": r.k,
                "l": r.l,
                "p_minus": r.p_minus,
            }),
        }
    }

    /// Parses either object form; unknown keys are rejected.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Config("system must be a JSON object".into()))?;
        if obj.contains_key("rho") {
            reject_unknown(obj, &["rho", "k", "l", "p_minus"], "system")?;
            let rho = num_field(obj, "rho", "system")?;
            let k = int_field(obj, "k", "system")?;
            let l = int_field(obj, "l", "system")?;
            let p = num_field(obj, "p_minus", "system")?;
            Ok(SystemSpec::Resonant(ResonantSystem::new(rho, k, l, p)?))
        } else {
            reject_unknown(obj, &["a_minus", "b_minus", "a_plus", "b_plus"], "system")?;
            let s = AmSystem::new(
                num_field(obj, "a_minus", "system")?,
                num_field(obj, "b_minus", "system")?,
                num_field(obj, "a_plus", "system")?,
                num_field(obj, "b_plus", "system")?,
            )?;
            Ok(SystemSpec::Affine(s))
        }
    }
}

pub(crate) fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], ctx: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!(
                "unknown key `{key}` in {ctx} (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

pub(crate) fn num_field(obj: &Map<String, Value>, key: &str, ctx: &str) -> Result<f64> {
    obj.get(key)
        .ok_or_else(|| Error::Config(format!("missing field `{ctx}.{key}`")))?
        .as_f64()
        .ok_or_else(|| Error::Config(format!("field `{ctx}.{key}` must be a number")))
}

pub(crate) fn int_field(obj: &Map<String, Value>, key: &str, ctx: &str) -> Result<u32> {
    obj.get(key)
        .ok_or_else(|| Error::Config(format!("missing field `{ctx}.{key}`")))?
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| Error::Config(format!("field `{ctx}.{key}` must be a non-negative integer")))
}
