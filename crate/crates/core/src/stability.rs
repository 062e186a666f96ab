//! Hurwitz stability of real polynomials, the Hermite-Biehler split, the
//! perturbed family `y^s p(s) ± y^-s p(-s)`, and sampled ratio checks.
//!
//! The ratio checks only sample; a `true` is evidence, not a proof.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{MeromorphicSpec, Sign, SymmetricFamily};
use crate::phase::trace_phase;
use crate::poly::RealPolynomial;
use crate::winding::{count_N, CountReport, Rect};
use crate::zerofind::offline_zeros;

type C64 = Complex64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_nonconstant(p: &RealPolynomial) -> Result<()> {
    if p.is_zero() || p.degree() == 0 {
        return Err(Error::InvalidParameter("polynomial must be nonconstant".into()));
    }
    Ok(())
}

/// All roots strictly left of the imaginary axis. The margin scales with the
/// root size so that exact imaginary roots are not misread as stable.
pub fn is_stable(p: &RealPolynomial) -> Result<bool> {
    check_nonconstant(p)?;
    let roots = p.roots()?;
    Ok(roots.iter().all(|r| r.re < -1e-10 * (1.0 + r.norm())))
}

/// Stodola's necessary condition: all coefficients share the sign of the
/// leading one and none vanish.
pub fn stodola(p: &RealPolynomial) -> bool {
    let lead = p.leading();
    p.coeffs().iter().all(|&a| a * lead > 0.0)
}

/// `p(z) = q(z^2) + z r(z^2)`.
pub fn hb_split(p: &RealPolynomial) -> (RealPolynomial, RealPolynomial) {
    let cs = p.coeffs();
    let even: Vec<f64> = cs.iter().step_by(2).copied().collect();
    let odd: Vec<f64> = cs.iter().skip(1).step_by(2).copied().collect();
    let q = RealPolynomial::new_or_zero(even).expect("finite coefficients");
    let r = if odd.is_empty() {
        RealPolynomial::zero()
    } else {
        RealPolynomial::new_or_zero(odd).expect("finite coefficients")
    };
    (q, r)
}

fn real_negative_simple(p: &RealPolynomial) -> Result<Option<Vec<f64>>> {
    if p.is_zero() {
        return Ok(None);
    }
    let roots = p.roots()?;
    let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
    let mut out = Vec::with_capacity(roots.len());
    for r in roots {
        if r.im.abs() > 1e-8 * scale || r.re >= 0.0 {
            return Ok(None);
        }
        out.push(r.re);
    }
    out.sort_by(|a, b| b.total_cmp(a));
    for w in out.windows(2) {
        if (w[0] - w[1]).abs() <= 1e-8 * scale {
            return Ok(None);
        }
    }
    Ok(Some(out))
}

/// Roots of `q` and `r` real, negative, simple and strictly alternating,
/// starting with a root of `q` nearest to 0.
pub fn interlacing_check(q: &RealPolynomial, r: &RealPolynomial) -> Result<bool> {
    let (Some(rq), Some(rr)) = (real_negative_simple(q)?, real_negative_simple(r)?) else {
        return Ok(false);
    };
    let (nq, nr) = (rq.len(), rr.len());
    if !(nq == nr || nq == nr + 1) {
        return Ok(false);
    }
    // merged, descending: q0 > r0 > q1 > r1 > ...
    let mut merged = Vec::with_capacity(nq + nr);
    for i in 0..nq {
        merged.push(rq[i]);
        if i < nr {
            merged.push(rr[i]);
        }
    }
    Ok(merged.windows(2).all(|w| w[0] > w[1]))
}

/// Unwrapped `arg p(i tau) - arg p(0)` at `tau`.
pub fn phase_at(p: &RealPolynomial, tau: f64) -> Result<f64> {
    let h = poly_spec(p, 0.0);
    let tr = trace_phase(&h, 0.0, tau, 1e-9)?;
    Ok(tr.phi_end() - tr.phi0())
}

/// `|arg p(i tau) - arg p(0) - n pi/2| < tol`.
pub fn phase_limit_check(p: &RealPolynomial, tau: f64, tol: f64) -> Result<bool> {
    let want = p.degree() as f64 * FRAC_PI_2;
    match phase_at(p, tau) {
        Ok(phi) => Ok((phi - want).abs() < tol),
        Err(Error::LineZeroEncountered(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

fn poly_spec(p: &RealPolynomial, axis: f64) -> MeromorphicSpec {
    let p = p.clone();
    MeromorphicSpec::from_fn(axis, true, move |s| p.eval(s))
}

/// `p(s) ± p(-s)` as a symmetric family about `re s = 0`.
pub fn hb_family(p: &RealPolynomial, sign: Sign) -> Result<SymmetricFamily> {
    SymmetricFamily::custom("hb", poly_spec(p, 0.0), sign, false)
}

/// True when no zero of `p(s) ± p(-s)` lies in `rect` (which should sit
/// right of the axis).
pub fn hb_offline_empty(p: &RealPolynomial, sign: Sign, rect: Rect) -> Result<bool> {
    let fam = hb_family(p, sign)?;
    Ok(offline_zeros(&fam, rect)?.is_empty())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbedReport {
    pub report: CountReport,
    pub y: f64,
    pub degree: usize,
    /// `N - (T/pi) log y + u`.
    pub window_value: f64,
    /// Lower end of the window, `window_value >= 0`.
    pub window_lower_ok: bool,
    /// `window_value < n/2 + 1`. The count is a ceiling of
    /// `phi(T)/pi - u` and `arg p(iT) < n pi/2`, which gives `< n/2 + 1`;
    /// the tighter `n/2` fails already for `p = z + 1`.
    pub window_ok: bool,
    pub all_on_line: bool,
}

/// Builds `y^s p(s) ± y^-s p(-s)` (`a = 0`), counts to height `t` and checks
/// that all zeros are on the line together with the count window.
pub fn perturbed_family_check(p: &RealPolynomial, y: f64, t: f64, sign: Sign) -> Result<PerturbedReport> {
    if !(y > 1.0) || !y.is_finite() {
        return Err(Error::InvalidParameter(format!("y must be > 1, got {y}")));
    }
    if !is_stable(p)? {
        return Err(Error::InvalidParameter("p must be stable".into()));
    }
    let ly = y.ln();
    let pc = p.clone();
    // |F(s)| = y^{-2 sigma} |p(-s)/p(s)| < y^{-2 sigma} on sigma > 0
    let h = MeromorphicSpec::from_fn(0.0, true, move |s| pc.eval(s) * (s * ly).exp())
        .with_envelope(Arc::new(move |sigma| if sigma > 0.0 { Some((-2.0 * sigma * ly).exp()) } else { None }));
    let fam = SymmetricFamily::custom(&format!("perturbed(y={y})"), h, sign, false)?;
    let report = count_N(&fam, t)?;
    let n = p.degree();
    let v = report.n as f64 - t / PI * ly + fam.u();
    Ok(PerturbedReport {
        all_on_line: report.all_on_line_and_simple(),
        window_lower_ok: v >= -1e-9,
        window_ok: v >= -1e-9 && v < n as f64 / 2.0 + 1.0,
        window_value: v,
        y,
        degree: n,
        report,
    })
}

/// Radical inverse of `i` in base `b`.
fn halton(mut i: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Quasi-random points with `re s > a` and `|s| <= radius`.
pub fn sample_right_half(a: f64, radius: f64, samples: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(samples);
    let mut i = 1;
    while out.len() < samples && i < 100 * samples + 100 {
        let s = c(a + halton(i, 2) * radius, (2.0 * halton(i, 3) - 1.0) * radius);
        if s.norm() <= radius && s.re > a {
            out.push(s);
        }
        i += 1;
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledCheck {
    pub passed: bool,
    pub samples: usize,
    /// Largest sampled ratio modulus and where it occurred.
    pub max_ratio: f64,
    pub worst: (f64, f64),
    pub phase_increasing: Option<bool>,
    /// Always `false`: the checks sample, they do not certify.
    pub certified: bool,
}

/// `|F(s)| < 1` for `re s > a` sampled at quasi-random points with
/// `|s| <= 100`, and `arg h(a + i tau)` strictly increasing on `[0, 30]`.
/// `F(s) = conj h(2a - conj s) / h(s)`, which is `h(2a-s)/h(s)` for real `h`.
pub fn reflection_ratio_check(h: &MeromorphicSpec, samples: usize) -> Result<SampledCheck> {
    let a = h.axis;
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    let pts = sample_right_half(a, 100.0, samples);
    for &s in &pts {
        let num = (h.evaluate)(c(2.0 * a - s.re, s.im))?.value.norm();
        let den = (h.evaluate)(s)?.value.norm();
        let r = if den > 0.0 { num / den } else { f64::INFINITY };
        if r > max_ratio || !r.is_finite() {
            max_ratio = r;
            worst = (s.re, s.im);
        }
    }
    let increasing = match trace_phase(h, 0.0, 30.0, 1e-9) {
        Ok(tr) => tr.samples.windows(2).all(|w| w[1].1 > w[0].1),
        Err(Error::LineZeroEncountered(_)) => false,
        Err(e) => return Err(e),
    };
    Ok(SampledCheck {
        passed: max_ratio < 1.0 && increasing,
        samples: pts.len(),
        max_ratio,
        worst,
        phase_increasing: Some(increasing),
        certified: false,
    })
}

/// Sampled `|h(s - alpha) / h(s + alpha)| < 1` for `re s > a`, for `h` with
/// `conj h(2a - conj s) = e^{i theta} h(s)` and zeros in `|re s - a| < b`.
pub fn shift_ratio_check(h: &MeromorphicSpec, alpha: f64, b: f64, samples: usize) -> Result<SampledCheck> {
    if !(alpha >= b) || !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!("need alpha >= b >= 0, got alpha = {alpha}, b = {b}")));
    }
    let a = h.axis;
    // functional equation, with the unit factor taken from the first point
    let mut unit: Option<C64> = None;
    for &s in &sample_right_half(a - 3.0, 6.0, 24) {
        let v = (h.evaluate)(s)?.value;
        let w = (h.evaluate)(c(2.0 * a - s.re, s.im))?.value.conj();
        if v.norm() < 1e-300 {
            continue;
        }
        let e = w / v;
        match unit {
            None => {
                if (e.norm() - 1.0).abs() > 1e-8 {
                    return Err(Error::InvalidParameter("functional equation violated".into()));
                }
                unit = Some(e);
            }
            Some(u) => {
                if (e - u).norm() > 1e-8 {
                    return Err(Error::InvalidParameter("functional equation violated".into()));
                }
            }
        }
    }
    let mut max_ratio: f64 = 0.0;
    let mut worst = (0.0, 0.0);
    let pts = sample_right_half(a, 100.0, samples);
    for &s in &pts {
        let num = (h.evaluate)(s - alpha)?.value.norm();
        let den = (h.evaluate)(s + alpha)?.value.norm();
        let r = if den > 0.0 { num / den } else { f64::INFINITY };
        if r > max_ratio || !r.is_finite() {
            max_ratio = r;
            worst = (s.re, s.im);
        }
    }
    Ok(SampledCheck {
        passed: max_ratio < 1.0,
        samples: pts.len(),
        max_ratio,
        worst,
        phase_increasing: None,
        certified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{xi, EvalPrecision};

    fn poly(cs: &[f64]) -> RealPolynomial {
        RealPolynomial::new(cs.to_vec()).unwrap()
    }

    #[test]
    fn stability_examples() {
        assert!(is_stable(&poly(&[2.0, 3.0, 1.0])).unwrap());
        assert!(!is_stable(&poly(&[1.0, 0.0, 1.0])).unwrap());
        let p = poly(&[8.0, 2.0, 1.0, 1.0]);
        assert!(stodola(&p));
        assert!(!is_stable(&p).unwrap());
        assert!(is_stable(&poly(&[3.0])).is_err());
    }

    #[test]
    fn split_examples() {
        let (q, r) = hb_split(&poly(&[1.0, 3.0, 3.0, 1.0]));
        assert_eq!(q.coeffs(), &[1.0, 3.0]);
        assert_eq!(r.coeffs(), &[3.0, 1.0]);
        let (_, r) = hb_split(&poly(&[1.0, 0.0, 2.0]));
        assert!(r.is_zero());
        let (q, r) = hb_split(&poly(&[0.0, 1.0]));
        assert!(q.is_zero());
        assert_eq!(r.coeffs(), &[1.0]);
    }

    #[test]
    fn split_identity() {
        let p = poly(&[0.3, -1.0, 2.0, 0.5, -0.25, 1.5]);
        let (q, r) = hb_split(&p);
        for k in 0..10 {
            let z = c(0.3 * k as f64 - 1.0, 0.7 - 0.11 * k as f64);
            let lhs = p.eval(z);
            let rhs = q.eval(z * z) + z * r.eval(z * z);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn interlacing_examples() {
        let (q, r) = hb_split(&poly(&[1.0, 3.0, 3.0, 1.0]));
        assert!(interlacing_check(&q, &r).unwrap());
        let u1 = poly(&[1.0, 1.0]);
        assert!(!interlacing_check(&u1, &u1).unwrap());
        let (q, r) = hb_split(&poly(&[8.0, 2.0, 1.0, 1.0]));
        assert!(!interlacing_check(&q, &r).unwrap());
    }

    #[test]
    fn phase_limit() {
        let p = RealPolynomial::from_roots(&[-1.0, -2.0, -0.5]);
        assert!(phase_limit_check(&p, 1e3, 0.05).unwrap());
        let u = RealPolynomial::from_roots(&[-1.0, 2.0]);
        assert!(!phase_limit_check(&u, 1e3, 0.05).unwrap());
    }

    #[test]
    fn perturbed_linear() {
        let p = poly(&[1.0, 1.0]);
        for sign in [Sign::Plus, Sign::Minus] {
            let r = perturbed_family_check(&p, 2.0, 20.0, sign).unwrap();
            assert!(r.all_on_line, "{sign}");
            assert!(r.window_ok, "{sign}: {}", r.window_value);
        }
        // the count is 4 for the minus sign: phi(20) = 20 log 2 + atan 20 < 5 pi
        let r = perturbed_family_check(&p, 2.0, 20.0, Sign::Minus).unwrap();
        assert_eq!(r.report.n, 4);
        assert!(r.window_value > 0.5);
    }

    #[test]
    fn perturbed_quadratic() {
        let p = poly(&[2.0, 3.0, 1.0]);
        let r = perturbed_family_check(&p, std::f64::consts::E, 20.0, Sign::Plus).unwrap();
        assert!(r.all_on_line && r.window_ok);
        assert!((r.report.n as f64 - 20.0 / PI).abs() <= 2.0);
        assert!(perturbed_family_check(&poly(&[-1.0, 1.0]), 2.0, 5.0, Sign::Plus).is_err());
        assert!(perturbed_family_check(&p, 0.5, 5.0, Sign::Plus).is_err());
    }

    #[test]
    fn reflection_ratio_examples() {
        let stable = poly_spec(&poly(&[2.0, 3.0, 1.0]), 0.0);
        assert!(reflection_ratio_check(&stable, 200).unwrap().passed);
        let unstable = poly_spec(&poly(&[-1.0, 1.0]), 0.0);
        let r = reflection_ratio_check(&unstable, 200).unwrap();
        assert!(!r.passed && r.max_ratio > 1.0);
    }

    fn xi_spec(scale: f64, shift: f64, axis: f64) -> MeromorphicSpec {
        MeromorphicSpec::new(axis, true, move |s| xi(s * scale + shift, &EvalPrecision::default()))
    }

    #[test]
    fn reflection_ratio_xi_translate() {
        let h = xi_spec(1.0, 1.0, 0.5);
        assert!(reflection_ratio_check(&h, 500).unwrap().passed);
    }

    #[test]
    fn shift_ratio_examples() {
        let h = xi_spec(2.0, -0.5, 0.5);
        assert!(shift_ratio_check(&h, 0.25, 0.25, 200).unwrap().passed);
        let h = xi_spec(1.0, 0.0, 0.5);
        assert!(shift_ratio_check(&h, 0.5, 0.5, 200).unwrap().passed);
        assert!(shift_ratio_check(&h, 0.1, 0.5, 10).is_err());
        // not symmetric about 1/2
        let g = xi_spec(1.0, 0.3, 0.5);
        assert!(shift_ratio_check(&g, 0.5, 0.5, 10).is_err());
    }

    #[test]
    fn halton_points_stay_in_region() {
        let pts = sample_right_half(0.5, 100.0, 300);
        assert_eq!(pts.len(), 300);
        assert!(pts.iter().all(|s| s.re > 0.5 && s.norm() <= 100.0));
    }
}
