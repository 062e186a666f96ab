//! Symmetrized families `f(s) = h(s) ± h(2a - s)` and the conjugated variant
//! `f(s) = h(s) ± conj(h(conj(2a - s)))`.
//!
//! Catalog members are built in a "working" form in which `h` is holomorphic
//! and nonzero on the axis. Where the textbook definition has a pole of `h` on
//! the axis (the Eisenstein constant term, the G-class, Weng's function) the
//! builder stores the factored form and keeps the original expression as a
//! separate evaluator.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::characters::{character_from_label, DirichletCharacter};
use crate::error::{Error, Result};
use crate::poly::{ComplexPolynomial, RealPolynomial};
use crate::specfun::{self, bessel_k, log_gamma, xi, xi_chi, EvalPrecision, SpecialValue};

type C64 = Complex64;

pub type EvalFn = Arc<dyn Fn(C64) -> Result<SpecialValue> + Send + Sync>;
/// Upper bound for |F| on the half-plane `re s >= sigma`, if one is known there.
pub type EnvelopeFn = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be plus or minus, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LineZeroPolicy {
    None,
    /// Known zeros (positive multiplicity) or poles (negative) of `h` on the
    /// axis, by ordinate `tau >= 0`.
    Finite(Vec<(f64, i32)>),
    Unknown,
}

/// A meromorphic building block `h` with its declared inventory.
#[derive(Clone)]
pub struct MeromorphicSpec {
    pub evaluate: EvalFn,
    pub axis: f64,
    pub real_on_real: bool,
    /// Zeros with real part above the axis; `None` when not finite or not
    /// known in closed form (they are then counted by winding).
    pub declared_zeros_right: Option<Vec<(C64, u32)>>,
    pub declared_poles: Vec<(C64, u32)>,
    pub line_zero_policy: LineZeroPolicy,
    pub envelope: Option<EnvelopeFn>,
}

impl fmt::Debug for MeromorphicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeromorphicSpec")
            .field("axis", &self.axis)
            .field("real_on_real", &self.real_on_real)
            .field("declared_zeros_right", &self.declared_zeros_right)
            .field("declared_poles", &self.declared_poles)
            .field("line_zero_policy", &self.line_zero_policy)
            .finish()
    }
}

impl MeromorphicSpec {
    pub fn new<F>(axis: f64, real_on_real: bool, f: F) -> Self
    where
        F: Fn(C64) -> Result<SpecialValue> + Send + Sync + 'static,
    {
        MeromorphicSpec {
            evaluate: Arc::new(f),
            axis,
            real_on_real,
            declared_zeros_right: Some(Vec::new()),
            declared_poles: Vec::new(),
            line_zero_policy: LineZeroPolicy::None,
            envelope: None,
        }
    }

    /// Plain closure without an error estimate.
    pub fn from_fn<F>(axis: f64, real_on_real: bool, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Send + Sync + 'static,
    {
        Self::new(axis, real_on_real, move |s| {
            let v = f(s);
            Ok(SpecialValue {
                value: v,
                est_error: v.norm() * 1e-15,
            })
        })
    }

    pub fn with_zeros_right(mut self, zeros: Option<Vec<(C64, u32)>>) -> Self {
        self.declared_zeros_right = zeros;
        self
    }

    pub fn with_poles(mut self, poles: Vec<(C64, u32)>) -> Self {
        self.declared_poles = poles;
        self
    }

    pub fn with_envelope(mut self, env: EnvelopeFn) -> Self {
        self.envelope = Some(env);
        self
    }

    pub fn with_line_policy(mut self, policy: LineZeroPolicy) -> Self {
        self.line_zero_policy = policy;
        self
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        (self.evaluate)(s).map(|v| v.value)
    }

    pub fn poles_right(&self) -> u32 {
        self.declared_poles
            .iter()
            .filter(|(p, _)| p.re > self.axis + 1e-12)
            .map(|(_, m)| m)
            .sum()
    }
}

/// `h / (s-a)^m` for `tau0 = 0`, `h / ((s-a)^2 + tau0^2)^m` otherwise.
///
/// The returned flag tells whether the sign of the family flips, which
/// happens for an odd power of `(s-a)`.
pub fn factor_out(h: &MeromorphicSpec, tau0: f64, m: i32) -> (MeromorphicSpec, bool) {
    let a = h.axis;
    let inner = h.evaluate.clone();
    let factor = move |s: C64| -> C64 {
        if tau0 == 0.0 {
            (s - a).powi(m)
        } else {
            ((s - a) * (s - a) + tau0 * tau0).powi(m)
        }
    };
    let mut out = h.clone();
    out.evaluate = Arc::new(move |s| {
        let v = inner(s)?;
        let d = factor(s);
        Ok(SpecialValue {
            value: v.value / d,
            est_error: v.est_error / d.norm(),
        })
    });
    if m < 0 {
        // removing a pole: drop it from the pole list
        let targets: Vec<C64> = if tau0 == 0.0 {
            vec![c(a, 0.0)]
        } else {
            vec![c(a, tau0), c(a, -tau0)]
        };
        out.declared_poles
            .retain(|(p, _)| targets.iter().all(|t| (p - t).norm() > 1e-9));
    }
    if let LineZeroPolicy::Finite(list) = &h.line_zero_policy {
        let rest: Vec<(f64, i32)> = list
            .iter()
            .copied()
            .filter(|&(t, _)| (t - tau0).abs() > 1e-12)
            .collect();
        out.line_zero_policy = if rest.is_empty() {
            LineZeroPolicy::None
        } else {
            LineZeroPolicy::Finite(rest)
        };
    }
    (out, tau0 == 0.0 && m % 2 != 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticForm {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let q = QuadraticForm { a, b, c };
        if !(a > 0.0) || q.discriminant() <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "quadratic form ({a}, {b}, {c}) must have a > 0 and 4ac - b^2 > 0"
            )));
        }
        Ok(q)
    }

    pub fn discriminant(&self) -> f64 {
        4.0 * self.a * self.c - self.b * self.b
    }

    pub fn lambda(&self) -> f64 {
        self.discriminant().sqrt() / (2.0 * self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEntry {
    pub b: f64,
    pub lambda: f64,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum FamilySpec {
    Zeta2 {
        alpha: f64,
        beta: f64,
    },
    ZetaTranslate {
        alpha: f64,
        completed: bool,
    },
    EisensteinA0 {
        y: f64,
    },
    HPoly {
        y: f64,
        p: Vec<f64>,
    },
    WengTruncated {
        t: f64,
    },
    EpsteinPartial {
        form: QuadraticForm,
        n: usize,
    },
    GClass {
        lambda: f64,
        entries: Vec<GEntry>,
    },
    LTranslate {
        alpha: f64,
        chi: String,
        p: Vec<(f64, f64)>,
    },
    Custom {
        name: String,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &str {
        match self {
            FamilySpec::Zeta2 { .. } => "zeta2",
            FamilySpec::ZetaTranslate { .. } => "zeta-translate",
            FamilySpec::EisensteinA0 { .. } => "eisenstein-a0",
            FamilySpec::HPoly { .. } => "h-poly",
            FamilySpec::WengTruncated { .. } => "weng",
            FamilySpec::EpsteinPartial { .. } => "epstein",
            FamilySpec::GClass { .. } => "g-class",
            FamilySpec::LTranslate { .. } => "l-translate",
            FamilySpec::Custom { .. } => "custom",
        }
    }
}

/// A built family with its evaluators and inventory.
#[derive(Clone)]
pub struct SymmetricFamily {
    pub spec: FamilySpec,
    /// Sign of the working combination.
    pub sign: Sign,
    pub conjugated: bool,
    pub h: MeromorphicSpec,
    /// All poles of `f`, with multiplicity.
    pub f_poles: Vec<(C64, u32)>,
    /// Line zeros removed from `f` by the factor-out transform, as
    /// (ordinate, multiplicity); they are added back in counts.
    pub removed_line_zeros: Vec<(f64, u32)>,
    original: Option<EvalFn>,
    envelope: Option<EnvelopeFn>,
}

impl fmt::Debug for SymmetricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricFamily")
            .field("spec", &self.spec)
            .field("sign", &self.sign)
            .field("conjugated", &self.conjugated)
            .field("f_poles", &self.f_poles)
            .finish()
    }
}

pub(crate) fn prec() -> EvalPrecision {
    EvalPrecision::default()
}

impl SymmetricFamily {
    pub fn a(&self) -> f64 {
        self.h.axis
    }

    /// `u_+ = 1/2`, `u_- = 1`.
    pub fn u(&self) -> f64 {
        match self.sign {
            Sign::Plus => 0.5,
            Sign::Minus => 1.0,
        }
    }

    /// Offset of the phase crossing lattice: line zeros sit where
    /// `phi/pi - offset` is an integer.
    pub fn offset(&self) -> f64 {
        match self.sign {
            Sign::Plus => 0.5,
            Sign::Minus => 0.0,
        }
    }

    pub fn label(&self) -> String {
        format!("{} ({})", self.spec.name(), self.sign)
    }

    pub fn h_eval(&self, s: C64) -> Result<C64> {
        self.h.eval(s)
    }

    /// `h(2a - s)` or its conjugated counterpart.
    pub fn h_reflected(&self, s: C64) -> Result<C64> {
        let r = 2.0 * self.a() - s;
        if self.conjugated {
            Ok(self.h.eval(r.conj())?.conj())
        } else {
            self.h.eval(r)
        }
    }

    pub fn f_value(&self, s: C64) -> Result<SpecialValue> {
        let a = (self.h.evaluate)(s)?;
        let r = 2.0 * self.a() - s;
        let b = if self.conjugated {
            let v = (self.h.evaluate)(r.conj())?;
            SpecialValue {
                value: v.value.conj(),
                est_error: v.est_error,
            }
        } else {
            (self.h.evaluate)(r)?
        };
        Ok(SpecialValue {
            value: a.value + b.value * self.sign.factor(),
            est_error: a.est_error + b.est_error,
        })
    }

    pub fn f(&self, s: C64) -> Result<C64> {
        self.f_value(s).map(|v| v.value)
    }

    /// The textbook function before any factoring (falls back to `f`).
    pub fn original(&self, s: C64) -> Result<C64> {
        match &self.original {
            Some(g) => g(s).map(|v| v.value),
            None => self.f(s),
        }
    }

    /// `F(s) = h(2a - s)/h(s)`, conjugated in the conjugated mode.
    pub fn ratio(&self, s: C64) -> Result<C64> {
        let hv = (self.h.evaluate)(s)?;
        if hv.value.norm() <= 64.0 * hv.est_error || hv.value.norm() == 0.0 {
            return Err(Error::DivisionByNearZero(s));
        }
        Ok(self.h_reflected(s)? / hv.value)
    }

    /// Relative residual of the functional symmetry at `s`.
    pub fn symmetry_residual(&self, s: C64) -> Result<f64> {
        let fs = self.f(s)?;
        let r = 2.0 * self.a() - s;
        let other = if self.conjugated {
            self.f(r.conj())?.conj()
        } else {
            self.f(r)?
        };
        let scale = self.h_eval(s)?.norm() + self.h_reflected(s)?.norm();
        Ok((other - fs * self.sign.factor()).norm() / scale.max(1e-300))
    }

    /// Reflection partner of a zero.
    pub fn partner(&self, z: C64) -> C64 {
        c(2.0 * self.a() - z.re, z.im)
    }

    pub fn has_envelope(&self) -> bool {
        self.envelope.is_some()
    }

    /// Upper bound for |F| on `re s >= sigma`.
    pub fn stirling_envelope(&self, sigma: f64) -> Result<f64> {
        let env = self
            .envelope
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter("family has no envelope".into()))?;
        Ok(env(sigma).unwrap_or(f64::INFINITY))
    }

    /// Smallest abscissa (on a 1/4 grid) with envelope below 1/2, capped at
    /// 40; failing that the smallest with envelope below 1, searched up to 200.
    pub fn sigma0(&self) -> Result<f64> {
        let a = self.a();
        let floor = self
            .h
            .declared_poles
            .iter()
            .map(|(p, _)| p.re.max(2.0 * a - p.re))
            .chain(self.f_poles.iter().map(|(p, _)| p.re))
            .chain(
                self.h
                    .declared_zeros_right
                    .iter()
                    .flatten()
                    .map(|(z, _)| z.re),
            )
            .fold(a, f64::max);
        let cap = 40.0;
        let mut first_below_one = None;
        let mut sigma = a + 0.5;
        while sigma <= cap + 1e-9 {
            if sigma > floor + 0.25 {
                let e = self.stirling_envelope(sigma)?;
                if e < 0.5 {
                    return Ok(sigma);
                }
                if e < 1.0 && first_below_one.is_none() {
                    first_below_one = Some(sigma);
                }
            }
            sigma += 0.25;
        }
        if let Some(s) = first_below_one {
            return Ok(s);
        }
        // slowly decaying ratios (small translates) need a wider box
        while sigma <= 200.0 {
            if sigma > floor + 0.25 && self.stirling_envelope(sigma)? < 1.0 {
                return Ok(sigma);
            }
            sigma += 0.25;
        }
        Err(Error::EnvelopeUnavailable(cap))
    }

    pub fn poles_f_right(&self) -> u32 {
        let a = self.a();
        self.f_poles
            .iter()
            .filter(|(p, _)| p.re > a + 1e-12)
            .map(|(_, m)| m)
            .sum()
    }

    /// Poles of `f` with `tau_lo < im < tau_hi`.
    pub fn poles_f_between(&self, tau_lo: f64, tau_hi: f64) -> u32 {
        self.f_poles
            .iter()
            .filter(|(p, _)| p.im > tau_lo && p.im < tau_hi)
            .map(|(_, m)| m)
            .sum()
    }

    pub fn poles_h_right(&self) -> u32 {
        self.h.poles_right()
    }

    pub fn zeros_h_right(&self) -> Option<u32> {
        self.h
            .declared_zeros_right
            .as_ref()
            .map(|z| z.iter().map(|(_, m)| m).sum())
    }
}

fn sv(value: C64, est_error: f64) -> SpecialValue {
    SpecialValue { value, est_error }
}

fn zeta_real(x: f64) -> f64 {
    specfun::zeta(c(x, 0.0), &prec())
        .map(|v| v.value.re)
        .unwrap_or(f64::INFINITY)
}

fn gamma_ratio(x: f64, y: f64) -> f64 {
    // Gamma(x)/Gamma(y), x, y > 0
    let a = log_gamma(c(x, 0.0)).map(|v| v.value.re).unwrap_or(f64::INFINITY);
    let b = log_gamma(c(y, 0.0)).map(|v| v.value.re).unwrap_or(f64::NEG_INFINITY);
    (a - b).exp()
}

/// Bound on `|P(1-s)| / |P(s)|` type ratios for `|s| >= sigma`, given the
/// roots of the numerator and denominator polynomials (same degree).
fn root_ratio_bound(num_roots: &[C64], den_roots: &[C64], sigma: f64) -> Option<f64> {
    let mut b = 1.0;
    for (n, d) in num_roots.iter().zip(den_roots) {
        if sigma <= d.norm() {
            return None;
        }
        b *= (sigma + n.norm()) / (sigma - d.norm());
    }
    Some(b)
}

/// Build a catalog family.
pub fn build_family(spec: &FamilySpec, sign: Sign) -> Result<SymmetricFamily> {
    match spec {
        FamilySpec::Zeta2 { alpha, beta } => zeta2(*alpha, *beta, sign),
        FamilySpec::ZetaTranslate { alpha, completed } => zeta_translate(*alpha, *completed, sign),
        FamilySpec::EisensteinA0 { y } => eisenstein_a0(*y),
        FamilySpec::HPoly { y, p } => h_poly(*y, &RealPolynomial::new(p.clone())?, sign),
        FamilySpec::WengTruncated { t } => weng_truncated(*t),
        FamilySpec::EpsteinPartial { form, n } => epstein_partial(*form, *n),
        FamilySpec::GClass { lambda, entries } => g_class(*lambda, entries),
        FamilySpec::LTranslate { alpha, chi, p } => {
            let chi = character_from_label(chi)?;
            let p = ComplexPolynomial::new(p.iter().map(|&(re, im)| c(re, im)).collect())?;
            l_translate(*alpha, &chi, &p, sign)
        }
        FamilySpec::Custom { .. } => Err(Error::InvalidParameter(
            "custom families are built with SymmetricFamily::custom".into(),
        )),
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// `h(s) = e^{alpha s}(s - beta)`, axis 0.
pub fn zeta2(alpha: f64, beta: f64, sign: Sign) -> Result<SymmetricFamily> {
    check_positive("alpha", alpha)?;
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::InvalidParameter("beta must be nonzero".into()));
    }
    let h = MeromorphicSpec::from_fn(0.0, true, move |s| (s * alpha).exp() * (s - beta))
        .with_zeros_right(Some(if beta > 0.0 { vec![(c(beta, 0.0), 1)] } else { vec![] }));
    let envelope: EnvelopeFn = Arc::new(move |sigma| {
        if sigma <= beta.max(0.0) {
            return None;
        }
        Some(2.0 * (-2.0 * alpha * sigma).exp() * (1.0 + 2.0 * beta.abs() / (sigma - beta)))
    });
    Ok(SymmetricFamily {
        spec: FamilySpec::Zeta2 { alpha, beta },
        sign,
        conjugated: false,
        h,
        f_poles: Vec::new(),
        removed_line_zeros: Vec::new(),
        original: None,
        envelope: Some(envelope),
    })
}

/// The partial-sum function `zeta_n(s) = sum_{k<=n} k^-s - n^(1-s)/(1-s)`.
pub fn zeta_partial(n: u32, s: C64) -> C64 {
    let mut acc = c(0.0, 0.0);
    for k in 1..=n {
        acc += (-s * (k as f64).ln()).exp();
    }
    acc - ((1.0 - s) * (n as f64).ln()).exp() / (1.0 - s)
}

/// `zeta*(s)` by way of the entire `xi`.
fn zeta_star_via_xi(s: C64) -> Result<SpecialValue> {
    let d = s * (s - 1.0);
    if d.norm() == 0.0 {
        return Err(Error::Pole(s));
    }
    let v = xi(s, &prec())?;
    Ok(sv(v.value * 2.0 / d, v.est_error * 2.0 / d.norm()))
}

/// `h(s) = zeta*(s + alpha)` (or `xi(s + alpha)`), axis 1/2.
pub fn zeta_translate(alpha: f64, completed: bool, sign: Sign) -> Result<SymmetricFamily> {
    check_positive("alpha", alpha)?;
    if (alpha - 0.5).abs() < 1e-12 {
        return Err(Error::InvalidParameter(
            "alpha = 1/2 puts a pole of h on the axis".into(),
        ));
    }
    let (h, f_poles) = if completed {
        let h = MeromorphicSpec::new(0.5, true, move |s| zeta_star_via_xi(s + alpha))
            .with_poles(vec![(c(-alpha, 0.0), 1), (c(1.0 - alpha, 0.0), 1)]);
        let poles = vec![
            (c(-alpha, 0.0), 1),
            (c(1.0 - alpha, 0.0), 1),
            (c(alpha, 0.0), 1),
            (c(1.0 + alpha, 0.0), 1),
        ];
        (h, poles)
    } else {
        let h = MeromorphicSpec::new(0.5, true, move |s| xi(s + alpha, &prec()));
        (h, Vec::new())
    };
    // zeros of h right of the axis would be zeros of zeta with real part
    // above 1/2 + alpha: none for alpha > 1/2, none below the verified RH
    // height otherwise
    let h = h.with_zeros_right(Some(Vec::new()));
    let envelope: EnvelopeFn = Arc::new(move |sigma| {
        if sigma - alpha <= 1.0 + 1e-9 {
            return None;
        }
        let g = PI.powf(alpha) * gamma_ratio((sigma - alpha) / 2.0, (sigma + alpha) / 2.0);
        let z = zeta_real(sigma - alpha) * zeta_real(sigma + alpha) / zeta_real(2.0 * sigma + 2.0 * alpha);
        Some(2.0 * g * z)
    });
    Ok(SymmetricFamily {
        spec: FamilySpec::ZetaTranslate { alpha, completed },
        sign,
        conjugated: false,
        h,
        f_poles,
        removed_line_zeros: Vec::new(),
        original: None,
        envelope: Some(envelope),
    })
}

struct HPolyParts {
    /// `p(s) / (2s - 1)`
    q: RealPolynomial,
    /// `q(s)/s` when `q(0) = 0`
    r: Option<RealPolynomial>,
}

fn split_h_poly(p: &RealPolynomial) -> Result<HPolyParts> {
    let (q1, rem) = p.deflate(0.5);
    let scale = p.coeffs().iter().map(|c| c.abs()).fold(0.0, f64::max);
    if rem.abs() > 1e-12 * scale || p.degree() == 0 {
        return Err(Error::InvalidParameter(
            "p must vanish at s = 1/2, p(s) = (2s-1) q(s)".into(),
        ));
    }
    let q = RealPolynomial::new(q1.coeffs().iter().map(|c| c / 2.0).collect())?;
    for r in q.roots()? {
        if (r.re - 0.5).abs() < 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "q has a root {r} on the line re s = 1/2"
            )));
        }
    }
    let r = if q.eval_real(0.0).abs() <= 1e-14 * scale {
        Some(q.deflate(0.0).0)
    } else {
        None
    };
    Ok(HPolyParts { q, r })
}

/// `H(y; s) = p(s) zeta*(2s) y^s ± p(1-s) zeta*(2-2s) y^(1-s)`, axis 1/2,
/// with `p(s) = (2s - 1) q(s)`.
pub fn h_poly(y: f64, p: &RealPolynomial, sign: Sign) -> Result<SymmetricFamily> {
    check_positive("y", y)?;
    let parts = split_h_poly(p)?;
    let ly = y.ln();
    let q = parts.q.clone();
    let r = parts.r.clone();
    let evaluate = move |s: C64| -> Result<SpecialValue> {
        let x = xi(s * 2.0, &prec())?;
        let ys = (s * ly).exp();
        let poly = match &r {
            Some(r) => r.eval(s),
            None => {
                if s.norm() == 0.0 {
                    return Err(Error::Pole(s));
                }
                q.eval(s) / s
            }
        };
        let k = poly * ys;
        Ok(sv(x.value * k, x.est_error * k.norm()))
    };
    let q_roots = parts.q.roots()?;
    let zeros_right: Vec<(C64, u32)> = q_roots
        .iter()
        .filter(|z| z.re > 0.5)
        .map(|&z| (z, 1))
        .collect();
    let (h_poles, f_poles) = if parts.r.is_none() {
        (vec![(c(0.0, 0.0), 1)], vec![(c(0.0, 0.0), 1), (c(1.0, 0.0), 1)])
    } else {
        (Vec::new(), Vec::new())
    };
    let h = MeromorphicSpec::new(0.5, true, evaluate)
        .with_zeros_right(Some(zeros_right))
        .with_poles(h_poles);
    let num_roots: Vec<C64> = q_roots.iter().map(|z| 1.0 - z).collect();
    let envelope: EnvelopeFn = Arc::new(move |sigma| {
        if sigma <= 1.0 + 1e-9 {
            return None;
        }
        let pr = root_ratio_bound(&num_roots, &q_roots, sigma)?;
        let g = PI.sqrt() * gamma_ratio(sigma - 0.5, sigma);
        let z = zeta_real(2.0 * sigma - 1.0) * zeta_real(2.0 * sigma) / zeta_real(4.0 * sigma);
        Some(2.0 * y.powf(1.0 - 2.0 * sigma) * pr * g * z)
    });
    Ok(SymmetricFamily {
        spec: FamilySpec::HPoly {
            y,
            p: p.coeffs().to_vec(),
        },
        sign,
        conjugated: false,
        h,
        f_poles,
        removed_line_zeros: Vec::new(),
        original: None,
        envelope: Some(envelope),
    })
}

/// Constant term `a0(y;s) = zeta*(2s) y^s + zeta*(2-2s) y^(1-s)`.
///
/// Worked with as `(2s-1) a0(y;s)`, the minus family of
/// `h(s) = (2s-1) zeta*(2s) y^s`; `original` returns `a0` itself.
pub fn eisenstein_a0(y: f64) -> Result<SymmetricFamily> {
    let p = RealPolynomial::new(vec![-1.0, 2.0])?;
    let mut fam = h_poly(y, &p, Sign::Minus)?;
    fam.spec = FamilySpec::EisensteinA0 { y };
    let working = fam.clone();
    fam.original = Some(Arc::new(move |s| {
        let v = working.f_value(s)?;
        let d = s * 2.0 - 1.0;
        if d.norm() < 1e-9 {
            return Err(Error::Pole(s));
        }
        Ok(sv(v.value / d, v.est_error / d.norm()))
    }));
    Ok(fam)
}

/// Direct formula for the constant term, for cross-checks.
pub fn eisenstein_a0_direct(y: f64, s: C64) -> Result<C64> {
    let p = prec();
    let a = specfun::zeta_completed(s * 2.0, &p)?.value * (s * y.ln()).exp();
    let b = specfun::zeta_completed(2.0 - s * 2.0, &p)?.value * ((1.0 - s) * y.ln()).exp();
    Ok(a + b)
}

/// Weng's truncated zeta
/// `Z^T(s) = zeta*(2s) T^(s-1)/(s-1) - zeta*(2-2s) T^(-s)/s`, worked with as
/// `H^-(T; s) = T (2s-1) s (s-1) Z^T(s)` with `p(s) = (2s-1)s`.
pub fn weng_truncated(t: f64) -> Result<SymmetricFamily> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("T must be >= 1, got {t}")));
    }
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0])?;
    let mut fam = h_poly(t, &p, Sign::Minus)?;
    fam.spec = FamilySpec::WengTruncated { t };
    let working = fam.clone();
    fam.original = Some(Arc::new(move |s| {
        let v = working.f_value(s)?;
        let d = (s * 2.0 - 1.0) * s * (s - 1.0) * t;
        if d.norm() < 1e-12 {
            return Err(Error::Pole(s));
        }
        Ok(sv(v.value / d, v.est_error / d.norm()))
    }));
    Ok(fam)
}

pub fn weng_direct(t: f64, s: C64) -> Result<C64> {
    let p = prec();
    let a = specfun::zeta_completed(s * 2.0, &p)?.value * ((s - 1.0) * t.ln()).exp() / (s - 1.0);
    let b = specfun::zeta_completed(2.0 - s * 2.0, &p)?.value * (-s * t.ln()).exp() / s;
    Ok(a - b)
}

/// G-class entries of the truncated Epstein function of `form`.
pub fn epstein_entries(form: &QuadraticForm, n: usize) -> Vec<GEntry> {
    let lam = form.lambda();
    let base = 2f64.sqrt() * form.discriminant().powf(0.25) / form.a.sqrt();
    let mut out = Vec::new();
    for k in 1..=n {
        let ck = base * (k as f64 * PI * form.b / form.a).cos();
        let ak = PI * k as f64 * lam;
        for d in 1..=k {
            if k % d != 0 || d * d > k {
                continue;
            }
            if d * d == k {
                out.push(GEntry {
                    b: ck / 2.0,
                    lambda: 1.0,
                    a: ak,
                });
            } else {
                out.push(GEntry {
                    b: ck,
                    lambda: (d * d) as f64 / k as f64,
                    a: ak,
                });
            }
        }
    }
    out
}

/// `w(s) = lambda^s zeta*(2s) + sum b_k lambda_k^(s-1/2) 2K_{s-1/2}(2A_k)`.
pub fn g_class_w(lambda: f64, entries: &[GEntry], s: C64) -> Result<C64> {
    let p = prec();
    let mut acc = specfun::zeta_completed(s * 2.0, &p)?.value * (s * lambda.ln()).exp();
    for e in entries {
        let k = bessel_k(s - 0.5, e.a, &p)?.value;
        acc += ((s - 0.5) * e.lambda.ln()).exp() * k * (2.0 * e.b);
    }
    Ok(acc)
}

fn h1_g_class(lambda: f64, entries: &[GEntry], s: C64) -> Result<SpecialValue> {
    // (s - 1/2) w(s), with (s - 1/2) zeta*(2s) = xi(2s)/(2s)
    let p = prec();
    if s.norm() == 0.0 {
        return Err(Error::Pole(s));
    }
    let x = xi(s * 2.0, &p)?;
    let lead = (s * lambda.ln()).exp() / (s * 2.0);
    let mut acc = x.value * lead;
    let mut err = x.est_error * lead.norm();
    for e in entries {
        let k = bessel_k(s - 0.5, e.a, &p)?;
        let f = ((s - 0.5) * e.lambda.ln()).exp() * (s - 0.5) * (2.0 * e.b);
        acc += k.value * f;
        err += k.est_error * f.norm();
    }
    Ok(sv(acc, err))
}

/// Sampled envelope for ratios without a closed-form bound: the largest |F|
/// on a grid of vertical lines `sigma, sigma+1, sigma+2, sigma+4, sigma+8`,
/// times 2.
fn sampled_envelope(h: EvalFn, axis: f64, conjugated: bool) -> EnvelopeFn {
    Arc::new(move |sigma| {
        let mut taus = vec![0.0];
        let mut t = 0.5;
        while t < 200.0 {
            taus.push(t);
            taus.push(-t);
            t *= 1.3;
        }
        let mut worst: f64 = 0.0;
        for ds in [0.0, 1.0, 2.0, 4.0, 8.0] {
            for &tau in &taus {
                let s = c(sigma + ds, tau);
                let r = 2.0 * axis - s;
                let hs = h(s).ok()?.value;
                let hr = if conjugated {
                    h(r.conj()).ok()?.value.conj()
                } else {
                    h(r).ok()?.value
                };
                if hs.norm() == 0.0 {
                    return None;
                }
                worst = worst.max(hr.norm() / hs.norm());
            }
        }
        Some(2.0 * worst)
    })
}

/// `G(s)` of the G-class, worked with as the minus family of
/// `h(s) = (s - 1/2) w(s)`; `pi^-s Gamma(s) G(s) = w(s) + w(1-s)`.
pub fn g_class(lambda: f64, entries: &[GEntry]) -> Result<SymmetricFamily> {
    check_positive("lambda", lambda)?;
    for e in entries {
        check_positive("lambda_k", e.lambda)?;
        check_positive("A_k", e.a)?;
        if !e.b.is_finite() {
            return Err(Error::InvalidParameter("b_k must be finite".into()));
        }
    }
    let ent = entries.to_vec();
    let evaluate: EvalFn = Arc::new(move |s| h1_g_class(lambda, &ent, s));
    let h = MeromorphicSpec {
        evaluate: evaluate.clone(),
        axis: 0.5,
        real_on_real: true,
        declared_zeros_right: None,
        declared_poles: vec![(c(0.0, 0.0), 1)],
        line_zero_policy: LineZeroPolicy::None,
        envelope: None,
    };
    let mut fam = SymmetricFamily {
        spec: FamilySpec::GClass {
            lambda,
            entries: entries.to_vec(),
        },
        sign: Sign::Minus,
        conjugated: false,
        h,
        f_poles: vec![(c(0.0, 0.0), 1), (c(1.0, 0.0), 1)],
        removed_line_zeros: Vec::new(),
        original: None,
        envelope: Some(sampled_envelope(evaluate, 0.5, false)),
    };
    let working = fam.clone();
    fam.original = Some(Arc::new(move |s| {
        // G(s) = pi^s / Gamma(s) * f(s) / (s - 1/2)
        let v = working.f_value(s)?;
        let d = s - 0.5;
        if d.norm() < 1e-12 {
            return Err(Error::Pole(s));
        }
        let lg = log_gamma(s)?.value;
        let k = (s * PI.ln() - lg).exp() / d;
        Ok(sv(v.value * k, v.est_error * k.norm()))
    }));
    Ok(fam)
}

/// Truncated Epstein zeta `Z_{Q,n}` through its G-class normal form
/// `Z_{Q,n}(s) = 2 (sqrt(Delta)/2)^-s G(s)`.
pub fn epstein_partial(form: QuadraticForm, n: usize) -> Result<SymmetricFamily> {
    let form = QuadraticForm::new(form.a, form.b, form.c)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let entries = epstein_entries(&form, n);
    let mut fam = g_class(form.lambda(), &entries)?;
    fam.spec = FamilySpec::EpsteinPartial { form, n };
    let g = fam.original.clone().expect("g_class sets original");
    let half_sqrt_delta = form.discriminant().sqrt() / 2.0;
    fam.original = Some(Arc::new(move |s| {
        let v = g(s)?;
        let k = (-s * half_sqrt_delta.ln()).exp() * 2.0;
        Ok(sv(v.value * k, v.est_error * k.norm()))
    }));
    Ok(fam)
}

/// `h1(s) / sqrt(Gamma(s) Gamma(1-s))`, evaluated in log space.
fn h1_g_class_balanced(lambda: f64, entries: &[GEntry], s: C64) -> Result<SpecialValue> {
    let p = prec();
    let lg = log_gamma(s)?.value;
    let lg1 = log_gamma(1.0 - s)?.value;
    let half = (lg + lg1) * 0.5;
    let d = s - 0.5;
    let z = specfun::zeta(s * 2.0, &p)?;
    let lead = (s * (lambda.ln() - PI.ln()) + (lg - lg1) * 0.5).exp() * d;
    let mut acc = z.value * lead;
    let mut err = z.est_error * lead.norm();
    for e in entries {
        let k = specfun::bessel_k_scaled(d, e.a, half, &p)?;
        let f = (d * e.lambda.ln()).exp() * d * (2.0 * e.b);
        acc += k.value * f;
        err += k.est_error * f.norm();
    }
    Ok(sv(acc, err))
}

/// The G-class family divided by the zero-free symmetric factor
/// `sqrt(Gamma(s) Gamma(1-s))` (principal branch, upper half plane). Same
/// zeros off the real axis, but no underflow at heights in the thousands.
/// Only meant for zero location in boxes with Im s > 0.
pub fn g_class_balanced(lambda: f64, entries: &[GEntry]) -> Result<SymmetricFamily> {
    let mut fam = g_class(lambda, entries)?;
    let ent = entries.to_vec();
    fam.h.evaluate = Arc::new(move |s| h1_g_class_balanced(lambda, &ent, s));
    fam.h.real_on_real = false;
    fam.h.declared_poles = Vec::new();
    fam.f_poles = Vec::new();
    fam.envelope = None;
    fam.original = None;
    Ok(fam)
}

pub fn epstein_balanced(form: QuadraticForm, n: usize) -> Result<SymmetricFamily> {
    let form = QuadraticForm::new(form.a, form.b, form.c)?;
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let mut fam = g_class_balanced(form.lambda(), &epstein_entries(&form, n))?;
    fam.spec = FamilySpec::EpsteinPartial { form, n };
    Ok(fam)
}

/// `Z_{Q,n}(s)` summed term by term from the truncated Chowla-Selberg
/// expansion, independent of the G-class route.
pub fn epstein_partial_direct(form: &QuadraticForm, n: usize, s: C64) -> Result<C64> {
    let p = prec();
    let (a, b) = (form.a, form.b);
    let delta = form.discriminant();
    let zeta2s = specfun::zeta(s * 2.0, &p)?.value;
    let zeta2s1 = specfun::zeta(s * 2.0 - 1.0, &p)?.value;
    let lg = log_gamma(s)?.value;
    let lg_half = log_gamma(s - 0.5)?.value;
    let t1 = zeta2s * 2.0 * (-s * a.ln()).exp();
    let t2 = (s * 2.0 * 2f64.ln() + (s - 1.0) * a.ln() + 0.5 * PI.ln() - lg - (s - 0.5) * delta.ln() + lg_half).exp()
        * zeta2s1;
    let pref = (s * PI.ln() + (s - 0.5) * 2f64.ln() - lg - (s * 0.5 - 0.25) * delta.ln()).exp() * 4.0 / a.sqrt();
    let mut sum = c(0.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        let mut div = c(0.0, 0.0);
        for d in 1..=k {
            if k % d == 0 {
                div += ((1.0 - s * 2.0) * (d as f64).ln()).exp();
            }
        }
        // int exp(-x cosh t) exp((s-1/2) t) dt = 2 K_{s-1/2}(x)
        let x = PI * kf * delta.sqrt() / a;
        let integral = bessel_k(s - 0.5, x / 2.0, &p)?.value * 2.0;
        sum += ((s - 0.5) * kf.ln()).exp() * div * (kf * PI * b / a).cos() * integral;
    }
    Ok(t1 + t2 + pref * sum)
}

/// `f(s) = p(s) xi(s+alpha, chi) ± conj-reflection`, axis 1/2, in the
/// conjugated mode. `h(s) = e^{-i theta} p(s) xi(s + alpha, chi)` with
/// `e^{2 i theta}` the root number, so that `f` differs from
/// `p(s) xi(s+alpha, chi) ± p̄(1-s) xi(s-alpha, chi)` by a unimodular
/// constant.
pub fn l_translate(
    alpha: f64,
    chi: &DirichletCharacter,
    p: &ComplexPolynomial,
    sign: Sign,
) -> Result<SymmetricFamily> {
    check_positive("alpha", alpha)?;
    if !chi.is_primitive() || chi.modulus() < 3 {
        return Err(Error::NonPrimitiveCharacter);
    }
    let roots = p.roots()?;
    if roots.iter().any(|r| (r.re - 0.5).abs() < 1e-9) {
        return Err(Error::InvalidParameter("p has a root on re s = 1/2".into()));
    }
    let eps = chi.root_number();
    let rot = C64::from_polar(1.0, -eps.arg() / 2.0);
    let chi_h = chi.clone();
    let ph = p.clone();
    let evaluate = move |s: C64| -> Result<SpecialValue> {
        let x = xi_chi(s + alpha, &chi_h, &prec())?;
        let k = ph.eval(s) * rot;
        Ok(sv(x.value * k, x.est_error * k.norm()))
    };
    let zeros_right: Vec<(C64, u32)> = roots
        .iter()
        .filter(|z| z.re > 0.5)
        .map(|&z| (z, 1))
        .collect();
    let h = MeromorphicSpec::new(0.5, chi.is_real() && p.coeffs().iter().all(|z| z.im == 0.0), evaluate)
        .with_zeros_right(Some(zeros_right));
    let n = chi.modulus() as f64;
    let kappa = chi.kappa() as f64;
    let num_roots: Vec<C64> = roots.iter().map(|r| 1.0 - r.conj()).collect();
    let envelope: EnvelopeFn = Arc::new(move |sigma| {
        if sigma - alpha <= 1.0 + 1e-9 {
            return None;
        }
        let pr = root_ratio_bound(&num_roots, &roots, sigma)?;
        let g = (PI / n).powf(alpha) * gamma_ratio((sigma - alpha + kappa) / 2.0, (sigma + alpha + kappa) / 2.0);
        let z = zeta_real(sigma - alpha) * zeta_real(sigma + alpha) / zeta_real(2.0 * sigma + 2.0 * alpha);
        Some(2.0 * pr * g * z)
    });
    Ok(SymmetricFamily {
        spec: FamilySpec::LTranslate {
            alpha,
            chi: chi.label(),
            p: p.coeffs().iter().map(|z| (z.re, z.im)).collect(),
        },
        sign,
        conjugated: true,
        h,
        f_poles: Vec::new(),
        removed_line_zeros: Vec::new(),
        original: None,
        envelope: Some(envelope),
    })
}

impl SymmetricFamily {
    /// Family from a user-supplied `h`. Line zeros or poles declared with
    /// `LineZeroPolicy::Finite` are factored out of `h` first.
    pub fn custom(name: &str, h: MeromorphicSpec, sign: Sign, conjugated: bool) -> Result<Self> {
        if !conjugated && !h.real_on_real {
            return Err(Error::InvalidParameter(
                "the real mode needs h real on the real axis".into(),
            ));
        }
        let a = h.axis;
        let mut work = h.clone();
        let mut sign_w = sign;
        let mut removed = Vec::new();
        let mut factors: Vec<(f64, i32)> = Vec::new();
        if let LineZeroPolicy::Finite(list) = &h.line_zero_policy {
            for &(tau0, m) in list {
                let (next, flips) = factor_out(&work, tau0, m);
                work = next;
                if flips {
                    sign_w = sign_w.flipped();
                }
                factors.push((tau0, m));
                if m > 0 {
                    removed.push((tau0, m as u32));
                }
            }
        }
        let mut f_poles: Vec<(C64, u32)> = Vec::new();
        for &(p, m) in &work.declared_poles {
            let r = if conjugated { c(2.0 * a - p.re, p.im) } else { 2.0 * a - p };
            for z in [p, r] {
                match f_poles.iter_mut().find(|(q, _)| (q - z).norm() < 1e-12) {
                    Some(e) => e.1 = e.1.max(m),
                    None => f_poles.push((z, m)),
                }
            }
        }
        let envelope = work.envelope.clone();
        let mut fam = SymmetricFamily {
            spec: FamilySpec::Custom { name: name.into() },
            sign: sign_w,
            conjugated,
            h: work,
            f_poles,
            removed_line_zeros: removed,
            original: None,
            envelope,
        };
        if !factors.is_empty() {
            let working = fam.clone();
            fam.original = Some(Arc::new(move |s| {
                let v = working.f_value(s)?;
                let mut k = c(1.0, 0.0);
                for &(tau0, m) in &factors {
                    k *= if tau0 == 0.0 {
                        (s - a).powi(m)
                    } else {
                        ((s - a) * (s - a) + tau0 * tau0).powi(m)
                    };
                }
                Ok(sv(v.value * k, v.est_error * k.norm()))
            }));
        }
        Ok(fam)
    }
}

/// Parse the flat `key = value` family file. Returns the `FamilySpec` and the sign.
///
/// Keys: `family`, `sign`, and per family `alpha`, `beta`, `completed`, `y`,
/// `p` (coefficients in ascending order, separated by `;` or whitespace;
/// complex entries like `1+2i` for `l-translate`), `T`, `a`, `b`, `c`, `n`,
/// `lambda`, `entry` (repeatable: `b lambda_k A_k`), `chi` (`N.j`).
/// Decimal commas in scalar values (`2,61117`) are read as points.
pub fn parse_spec_file(text: &str) -> Result<(FamilySpec, Sign)> {
    let mut kv: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key = value, got `{line}`")))?;
        kv.push((k.trim().to_string(), v.trim().to_string()));
    }
    let get = |key: &str| kv.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let family = get("family").ok_or_else(|| Error::Parse("missing `family`".into()))?;
    let sign = match get("sign") {
        Some(s) => s.parse()?,
        None => Sign::Minus,
    };
    let num = |key: &str| -> Result<f64> {
        let v = get(key).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
        parse_real(v)
    };
    let list = |key: &str| -> Result<Vec<f64>> {
        let v = get(key).ok_or_else(|| Error::Parse(format!("missing `{key}`")))?;
        split_list(v).iter().map(|t| parse_real(t)).collect()
    };
    let spec = match family {
        "zeta2" => FamilySpec::Zeta2 {
            alpha: num("alpha")?,
            beta: num("beta")?,
        },
        "zeta-translate" => FamilySpec::ZetaTranslate {
            alpha: num("alpha")?,
            completed: get("completed").map(|v| v != "false").unwrap_or(true),
        },
        "eisenstein-a0" => FamilySpec::EisensteinA0 { y: num("y")? },
        "h-poly" => FamilySpec::HPoly {
            y: num("y")?,
            p: list("p")?,
        },
        "weng" => FamilySpec::WengTruncated { t: num("T")? },
        "epstein" => FamilySpec::EpsteinPartial {
            form: QuadraticForm::new(num("a")?, num("b")?, num("c")?)?,
            n: num("n")? as usize,
        },
        "g-class" => {
            let mut entries = Vec::new();
            for (k, v) in &kv {
                if k == "entry" {
                    let t = split_list(v);
                    if t.len() != 3 {
                        return Err(Error::Parse(format!("entry needs 3 numbers: `{v}`")));
                    }
                    entries.push(GEntry {
                        b: parse_real(&t[0])?,
                        lambda: parse_real(&t[1])?,
                        a: parse_real(&t[2])?,
                    });
                }
            }
            FamilySpec::GClass {
                lambda: num("lambda")?,
                entries,
            }
        }
        "l-translate" => {
            let p = match get("p") {
                Some(v) => split_list(v)
                    .iter()
                    .map(|t| parse_complex(t).map(|z| (z.re, z.im)))
                    .collect::<Result<Vec<_>>>()?,
                None => vec![(1.0, 0.0)],
            };
            FamilySpec::LTranslate {
                alpha: num("alpha")?,
                chi: get("chi").unwrap_or("4.1").to_string(),
                p,
            }
        }
        other => return Err(Error::Parse(format!("unknown family `{other}`"))),
    };
    Ok((spec, sign))
}

fn split_list(v: &str) -> Vec<String> {
    v.split(|ch: char| ch == ';' || ch.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_string())
        .collect()
}

/// Read a real, accepting a decimal comma.
pub fn parse_real(v: &str) -> Result<f64> {
    let t = v.trim().replace(',', ".");
    t.parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: `{v}`")))
}

/// Read a complex literal such as `2`, `-3i`, `0.7+2i`, `1.5-3i`, `1e-3+2e1i`.
pub fn parse_complex(v: &str) -> Result<C64> {
    let t: String = v.trim().replace(',', ".").chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("not a complex number: `{v}`"));
    if t.is_empty() {
        return Err(err());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last + or - that is not an exponent sign or the leading sign
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        let (re, im) = match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().map_err(|_| err())?,
        };
        let re = re.parse::<f64>().map_err(|_| err())?;
        Ok(c(re, im))
    } else {
        Ok(c(t.parse::<f64>().map_err(|_| err())?, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta2_closed_form_at_two() {
        let alpha = 2f64.ln() / 2.0;
        let fam = zeta2(alpha, 1.0, Sign::Minus).unwrap();
        let s = c(2.0, 0.0);
        let z2 = 1.0 + 2f64.powf(-2.0) - 2f64.powf(-1.0) / (1.0 - 2.0);
        let want = -2.0 * (1.0 - 2.0) * z2;
        assert!((fam.f(s).unwrap().re - want).abs() < 1e-12);
        // the same through the partial-sum definition
        let zp = zeta_partial(2, s);
        assert!((zp.re - z2).abs() < 1e-14);
    }

    #[test]
    fn translate_matches_kernel_calls() {
        let fam = zeta_translate(8.0, true, Sign::Plus).unwrap();
        let s = c(2.0, 3.0);
        let p = prec();
        let want = specfun::zeta_completed(c(10.0, 3.0), &p).unwrap().value
            + specfun::zeta_completed(c(-6.0, 3.0), &p).unwrap().value;
        assert!((fam.f(s).unwrap() - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn weng_matches_direct_formula() {
        let fam = weng_truncated(1.0).unwrap();
        let s = c(0.7, 2.0);
        let want = weng_direct(1.0, s).unwrap();
        let got = fam.original(s).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm(), "{got} {want}");
    }

    #[test]
    fn a0_matches_direct_formula() {
        let fam = eisenstein_a0(3.0).unwrap();
        for s in [c(0.3, 4.0), c(2.0, -1.0), c(0.5, 10.0)] {
            let want = eisenstein_a0_direct(3.0, s).unwrap();
            assert!((fam.original(s).unwrap() - want).norm() < 1e-11 * want.norm());
        }
    }

    #[test]
    fn epstein_routes_agree() {
        for (form, n) in [
            (QuadraticForm::new(1.0, 0.0, 1.0).unwrap(), 2),
            (QuadraticForm::new(3.0, 0.0, 1.0).unwrap(), 3),
            (QuadraticForm::new(2.0, 1.0, 3.0).unwrap(), 4),
        ] {
            let fam = epstein_partial(form, n).unwrap();
            for s in [c(0.8, 3.0), c(2.5, -7.0), c(0.5, 12.0)] {
                let a = fam.original(s).unwrap();
                let b = epstein_partial_direct(&form, n, s).unwrap();
                assert!((a - b).norm() < 1e-10 * b.norm(), "{form:?} {n} {s}: {a} {b}");
            }
        }
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("plus".parse::<Sign>().unwrap(), Sign::Plus);
        assert!("both".parse::<Sign>().is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("2+0i").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("0.7+2i").unwrap(), c(0.7, 2.0));
        assert_eq!(parse_complex("-1.5-3i").unwrap(), c(-1.5, -3.0));
        assert_eq!(parse_complex("3i").unwrap(), c(0.0, 3.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_complex("2,5").unwrap(), c(2.5, 0.0));
        assert!(parse_complex("2+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn spec_file() {
        let (spec, sign) = parse_spec_file(
            "# double zero neighbourhood\nfamily = zeta-translate\nalpha = 2,61117\nsign = plus\n",
        )
        .unwrap();
        assert_eq!(sign, Sign::Plus);
        assert_eq!(
            spec,
            FamilySpec::ZetaTranslate {
                alpha: 2.61117,
                completed: true
            }
        );
        let (spec, _) = parse_spec_file("family = h-poly\ny = 2\np = -1; 2\n").unwrap();
        assert_eq!(spec, FamilySpec::HPoly { y: 2.0, p: vec![-1.0, 2.0] });
        assert!(parse_spec_file("alpha = 1").is_err());
        assert!(parse_spec_file("family = nope").is_err());
    }

    #[test]
    fn h_poly_rejects_bad_p() {
        assert!(h_poly(2.0, &RealPolynomial::new(vec![1.0, 1.0]).unwrap(), Sign::Plus).is_err());
        // q(s) = (s - 1/2 - i)(s - 1/2 + i) has roots on the line
        let q = RealPolynomial::new(vec![1.25, -1.0, 1.0]).unwrap();
        let p = q.mul(&RealPolynomial::new(vec![-1.0, 2.0]).unwrap());
        assert!(h_poly(2.0, &p, Sign::Plus).is_err());
    }

    #[test]
    fn factor_out_restores_function() {
        let h = MeromorphicSpec::from_fn(0.0, true, |s| (s * s + 25.0) * (s + 2.0))
            .with_line_policy(LineZeroPolicy::Finite(vec![(5.0, 1)]));
        let fam = SymmetricFamily::custom("synthetic", h, Sign::Minus, false).unwrap();
        let s = c(0.4, 1.3);
        let want = (s * s + 25.0) * (s + 2.0) - (s * s + 25.0) * (2.0 - s);
        assert!((fam.original(s).unwrap() - want).norm() < 1e-12 * want.norm());
        assert_eq!(fam.removed_line_zeros, vec![(5.0, 1)]);
    }
}
