//! Locating individual zeros: line bisection, real-axis scans, boxed
//! Newton search, multiplicities and the parameter solves.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{h_poly, zeta_translate, Sign, SymmetricFamily};
use crate::phase::{integer_point_report, phase_derivative, trace_phase, PhaseTrace};
use crate::poly::RealPolynomial;
use crate::specfun::EULER_GAMMA;
use crate::winding::{self, Rect};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LineBisection,
    RealScan,
    BoxNewton,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub location: C64,
    pub multiplicity: u32,
    pub on_line: bool,
    pub method: Method,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub parameter: f64,
    pub certificate: f64,
}

/// `|f(z)|` relative to the size of the two terms.
pub fn residual(fam: &SymmetricFamily, z: C64) -> Result<f64> {
    let f = fam.f(z)?;
    let scale = fam.h_eval(z)?.norm().max(fam.h_reflected(z)?.norm());
    Ok(f.norm() / scale.max(1e-300))
}

fn circle_count(fam: &SymmetricFamily, z: C64, r: f64) -> Result<i64> {
    let pts: Vec<C64> = (0..=32)
        .map(|k| z + C64::from_polar(r, 2.0 * PI * k as f64 / 32.0))
        .collect();
    let g = |s: C64| fam.f_value(s);
    winding::winding_number(&g, &pts, r)
}

/// Zeros minus poles of `f` inside a circle of radius `r` about `z`.
pub fn circle_winding(fam: &SymmetricFamily, z: C64, r: f64) -> Result<i64> {
    circle_count(fam, z, r)
}

/// Multiplicity of the zero at `z`, from circle windings at two radii that
/// must agree.
pub fn multiplicity(fam: &SymmetricFamily, z: C64) -> Result<u32> {
    for r in [1e-3, 1e-4, 3e-3, 3e-5] {
        let (a, b) = match (circle_count(fam, z, r), circle_count(fam, z, r / 2.0)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if a == b && a >= 1 {
            return Ok(a as u32);
        }
    }
    Err(Error::InvalidParameter(format!(
        "radius selection failed for the zero near {z}"
    )))
}

fn record(fam: &SymmetricFamily, z: C64, method: Method) -> Result<ZeroRecord> {
    Ok(ZeroRecord {
        location: z,
        multiplicity: multiplicity(fam, z)?,
        on_line: (z.re - fam.a()).abs() < 1e-9,
        method,
        residual: residual(fam, z)?,
    })
}

/// Line zeros from a phase trace: `0 <= tau` one-sided (the origin only
/// when it is a zero), all traced `tau` in the conjugated mode.
pub fn line_zeros_from_trace(fam: &SymmetricFamily, trace: &PhaseTrace) -> Result<Vec<ZeroRecord>> {
    let rep = integer_point_report(trace, fam.sign)?;
    let mut taus = Vec::new();
    if fam.conjugated {
        taus = rep.taus();
    } else {
        if rep.at_origin {
            taus.push(0.0);
        }
        taus.extend(rep.points.iter().map(|p| p.tau));
    }
    taus.iter()
        .map(|&t| record(fam, C64::new(fam.a(), t), Method::LineBisection))
        .collect()
}

/// All line zeros with `0 <= tau < T` (`|tau| < T` in the conjugated mode).
pub fn line_zeros(fam: &SymmetricFamily, t: f64) -> Result<Vec<ZeroRecord>> {
    let lo = if fam.conjugated { -t } else { 0.0 };
    let trace = trace_phase(&fam.h, lo, t, 1e-9)?;
    line_zeros_from_trace(fam, &trace)
}

fn real_value(fam: &SymmetricFamily, x: f64) -> Option<f64> {
    fam.f(C64::new(x, 0.0)).ok().map(|v| v.re).filter(|v| v.is_finite())
}

/// Real zeros of `f` on `[lo, hi]` by a sign-change scan (step 0.01) and
/// bisection. The interval is split at the declared real poles; each zero's
/// partner `2a - x` is added.
pub fn real_zeros(fam: &SymmetricFamily, lo: f64, hi: f64) -> Result<Vec<ZeroRecord>> {
    if fam.conjugated {
        return Err(Error::InvalidParameter(
            "real scans need a family that is real on the real axis".into(),
        ));
    }
    if !(lo < hi) {
        return Err(Error::InvalidParameter("empty interval".into()));
    }
    let a = fam.a();
    let mut cuts: Vec<f64> = fam
        .f_poles
        .iter()
        .filter(|(p, _)| p.im == 0.0 && p.re > lo && p.re < hi)
        .map(|(p, _)| p.re)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut edges = vec![lo];
    edges.extend(cuts.iter().copied());
    edges.push(hi);
    let mut found: Vec<f64> = Vec::new();
    let step = 0.01;
    for w in edges.windows(2) {
        let (l, r) = (w[0] + 1e-7, w[1] - 1e-7);
        if r <= l {
            continue;
        }
        let n = ((r - l) / step).ceil().max(1.0) as usize;
        let xs: Vec<f64> = (0..=n).map(|i| l + (r - l) * i as f64 / n as f64).collect();
        let mut prev: Option<(f64, f64)> = None;
        for &x in &xs {
            let v = match real_value(fam, x) {
                Some(v) => v,
                None => {
                    prev = None;
                    continue;
                }
            };
            if v == 0.0 {
                found.push(x);
            } else if let Some((px, pv)) = prev {
                if pv != 0.0 && (pv > 0.0) != (v > 0.0) {
                    let (mut u, mut w2, mut fu) = (px, x, pv);
                    while w2 - u > 1e-14 * (1.0 + u.abs()) {
                        let m = 0.5 * (u + w2);
                        let fm = match real_value(fam, m) {
                            Some(v) => v,
                            None => break,
                        };
                        if fm == 0.0 {
                            u = m;
                            w2 = m;
                            break;
                        }
                        if (fm > 0.0) == (fu > 0.0) {
                            u = m;
                            fu = fm;
                        } else {
                            w2 = m;
                        }
                    }
                    let z = 0.5 * (u + w2);
                    // a sign change through a pole leaves a large residual
                    if residual(fam, C64::new(z, 0.0)).map(|r| r < 1e-8).unwrap_or(false) {
                        found.push(z);
                    }
                }
            }
            prev = Some((x, v));
        }
    }
    let mut all = found.clone();
    for &x in &found {
        all.push(2.0 * a - x);
    }
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.dedup_by(|x, y| (*x - *y).abs() < 1e-8);
    all.iter()
        .map(|&x| record(fam, C64::new(x, 0.0), Method::RealScan))
        .collect()
}

fn derivative(fam: &SymmetricFamily, z: C64) -> Result<C64> {
    let h = 1e-6 * (1.0 + z.norm());
    Ok((fam.f(z + h)? - fam.f(z - h)?) / (2.0 * h))
}

/// Newton iteration with a central-difference derivative; `m` is the
/// expected multiplicity.
pub fn newton(fam: &SymmetricFamily, z0: C64, m: u32) -> Result<C64> {
    let mut z = z0;
    for _ in 0..60 {
        let f = fam.f(z)?;
        if f.norm() == 0.0 {
            return Ok(z);
        }
        let d = derivative(fam, z)?;
        if d.norm() == 0.0 {
            return Err(Error::NewtonEscaped(z));
        }
        let dz = f / d * m as f64;
        z -= dz;
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NewtonEscaped(z0));
        }
        if dz.norm() < 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    Ok(z)
}

fn zeros_in(fam: &SymmetricFamily, r: &Rect) -> Result<i64> {
    let g = |s: C64| fam.f_value(s);
    let w = winding::rectangle_count(&g, r, 1e-8)?;
    let poles: i64 = fam
        .f_poles
        .iter()
        .filter(|(p, _)| r.contains(*p))
        .map(|(_, m)| *m as i64)
        .sum();
    Ok(w + poles)
}

fn quadrisect(
    fam: &SymmetricFamily,
    r: Rect,
    count: i64,
    depth: u32,
    out: &mut Vec<ZeroRecord>,
) -> Result<()> {
    if count <= 0 {
        return Ok(());
    }
    let c = r.center();
    let diam = r.diameter();
    if count == 1 || diam < 1e-7 {
        let m = if diam < 1e-7 { count as u32 } else { 1 };
        if let Ok(z) = newton(fam, c, m) {
            if r.contains(z) && residual(fam, z)? < 1e-8 {
                out.push(ZeroRecord {
                    location: z,
                    multiplicity: if m == 1 { 1 } else { multiplicity(fam, z).unwrap_or(m) },
                    on_line: (z.re - fam.a()).abs() < 1e-9,
                    method: Method::BoxNewton,
                    residual: residual(fam, z)?,
                });
                return Ok(());
            }
        }
    }
    if depth >= 40 {
        return Err(Error::DepthCap(c));
    }
    // split off-center when the midlines pass too close to a zero
    for frac in [0.5, 0.47, 0.53, 0.41, 0.59] {
        let sm = r.sigma_lo + frac * (r.sigma_hi - r.sigma_lo);
        let tm = r.tau_lo + frac * (r.tau_hi - r.tau_lo);
        let subs = [
            Rect::new(r.sigma_lo, sm, r.tau_lo, tm),
            Rect::new(sm, r.sigma_hi, r.tau_lo, tm),
            Rect::new(r.sigma_lo, sm, tm, r.tau_hi),
            Rect::new(sm, r.sigma_hi, tm, r.tau_hi),
        ];
        let counts: Result<Vec<i64>> = subs.iter().map(|s| zeros_in(fam, s)).collect();
        match counts {
            Ok(counts) => {
                if counts.iter().sum::<i64>() != count {
                    continue;
                }
                for (s, n) in subs.iter().zip(counts) {
                    quadrisect(fam, *s, n, depth + 1, out)?;
                }
                return Ok(());
            }
            Err(Error::BoundaryTooClose(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DepthCap(c))
}

/// Zeros of `f` inside `rect` by quadrisection and Newton refinement. In the
/// real mode the reflected partners `2a - re z + i im z` are appended.
pub fn offline_zeros(fam: &SymmetricFamily, rect: Rect) -> Result<Vec<ZeroRecord>> {
    let n = zeros_in(fam, &rect)?;
    let mut out = Vec::new();
    quadrisect(fam, rect, n, 0, &mut out)?;
    if !fam.conjugated {
        let partners: Vec<ZeroRecord> = out
            .iter()
            .filter(|z| !z.on_line)
            .map(|z| {
                let mut p = *z;
                p.location = fam.partner(z.location);
                p.residual = residual(fam, p.location).unwrap_or(f64::INFINITY);
                p
            })
            .collect();
        for p in partners {
            if !out.iter().any(|z| (z.location - p.location).norm() < 1e-8) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// `r(alpha) = (zeta*)'(1/2 + alpha) / zeta*(1/2 + alpha)`.
pub fn r_of_alpha(alpha: f64) -> Result<f64> {
    phase_derivative(&zeta_translate(alpha, true, Sign::Minus)?.h, 0.0)
}

/// The point where `r` changes sign, searched on `(0.6, 20)`.
pub fn solve_alpha_star() -> Result<SolveResult> {
    let (mut lo, mut hi) = (0.6, 20.0);
    let (rlo, rhi) = (r_of_alpha(lo)?, r_of_alpha(hi)?);
    if !(rlo < 0.0 && rhi > 0.0) {
        return Err(Error::NoSignChange(lo, hi));
    }
    while hi - lo > 1e-11 {
        let m = 0.5 * (lo + hi);
        if r_of_alpha(m)? < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let p = 0.5 * (lo + hi);
    Ok(SolveResult {
        parameter: p,
        certificate: r_of_alpha(p)?.abs(),
    })
}

/// `y* = 4 pi exp(-gamma - q'(1/2)/q(1/2))`; the certificate is the phase
/// derivative of `h(y*; s) = (2s-1) q(s) zeta*(2s) y*^s` at `s = 1/2`.
pub fn solve_y_star(q: &RealPolynomial) -> Result<SolveResult> {
    let q_half = q.eval_real(0.5);
    if q_half.abs() < 1e-300 {
        return Err(Error::InvalidParameter("q vanishes at 1/2".into()));
    }
    let ratio = q.derivative().eval_real(0.5) / q_half;
    let y = 4.0 * PI * (-EULER_GAMMA - ratio).exp();
    let p = q.mul(&RealPolynomial::new(vec![-1.0, 2.0])?);
    let fam = h_poly(y, &p, Sign::Minus)?;
    let cert = phase_derivative(&fam.h, 0.0)?.abs();
    Ok(SolveResult {
        parameter: y,
        certificate: cert,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleZero {
    pub alpha: f64,
    pub tau0: f64,
    /// Distance of the extremal value of `phi/pi - offset` to the integer.
    pub certificate: f64,
}

/// The extremum of `phi/pi - offset` in `window` closest to an integer:
/// `(tau, value - integer, integer)`.
pub fn closest_extremum(fam: &SymmetricFamily, window: (f64, f64)) -> Result<(f64, f64, i64)> {
    let trace = trace_phase(&fam.h, 0.0, window.1 + 0.5, 1e-10)?;
    let off = fam.offset();
    let s = &trace.samples;
    let mut best: Option<(f64, f64, i64)> = None;
    for i in 1..s.len() - 1 {
        let (a, b, c) = (s[i - 1].1, s[i].1, s[i + 1].1);
        if s[i].0 < window.0 || s[i].0 > window.1 || (b - a) * (c - b) >= 0.0 {
            continue;
        }
        let (t, p) = refine_extremum(&trace, s[i - 1].0, s[i + 1].0, b > a)?;
        let g = p / PI - off;
        let m = g.round();
        if best.map(|bb| (g - m).abs() < bb.1.abs()).unwrap_or(true) {
            best = Some((t, g - m, m as i64));
        }
    }
    best.ok_or(Error::NoSignChange(window.0, window.1))
}

fn refine_extremum(trace: &PhaseTrace, mut lo: f64, mut hi: f64, maximum: bool) -> Result<(f64, f64)> {
    let sg = if maximum { 1.0 } else { -1.0 };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| -> Result<f64> { Ok(sg * trace.phi_at(t)?) };
    let (mut x1, mut x2) = (hi - r * (hi - lo), lo + r * (hi - lo));
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1)?;
        }
    }
    let t = 0.5 * (lo + hi);
    Ok((t, trace.phi_at(t)?))
}

/// Parameter at which a local extremum of `phi/pi - offset` inside
/// `tau_window` touches the integer lattice, so that the family acquires a
/// double line zero there. Nested solve: an outer bisection on the
/// parameter over the signed distance of the inner extremum.
pub fn solve_double_zero<B>(build: B, bracket: (f64, f64), tau_window: (f64, f64)) -> Result<DoubleZero>
where
    B: Fn(f64) -> Result<SymmetricFamily>,
{
    let dist = |p: f64, m: Option<i64>| -> Result<(f64, f64, i64)> {
        let fam = build(p)?;
        let (t, g, k) = closest_extremum(&fam, tau_window)?;
        match m {
            Some(m) => Ok((t, g + (k - m) as f64, m)),
            None => Ok((t, g, k)),
        }
    };
    let (lo0, hi0) = bracket;
    let (_, glo, m) = dist(lo0, None)?;
    let (_, ghi, _) = dist(hi0, Some(m))?;
    if glo * ghi > 0.0 {
        return Err(Error::NoSignChange(lo0, hi0));
    }
    let (mut lo, mut hi, mut flo) = (lo0, hi0, glo);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        let (_, gm, _) = dist(mid, Some(m))?;
        if (gm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = gm;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let (tau0, g, _) = dist(alpha, Some(m))?;
    Ok(DoubleZero {
        alpha,
        tau0,
        certificate: g.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::zeta2;

    #[test]
    fn y_star_closed_forms() {
        let one = RealPolynomial::new(vec![1.0]).unwrap();
        let r = solve_y_star(&one).unwrap();
        assert!((r.parameter - 4.0 * PI * (-EULER_GAMMA).exp()).abs() < 1e-12);
        assert!(r.certificate < 1e-8, "{}", r.certificate);
        let s = RealPolynomial::new(vec![0.0, 1.0]).unwrap();
        let r = solve_y_star(&s).unwrap();
        assert!((r.parameter - 4.0 * PI * (-EULER_GAMMA - 2.0).exp()).abs() < 1e-12);
        assert!(r.certificate < 1e-8);
    }

    #[test]
    fn zeta2_origin_multiplicity() {
        let f = zeta2(0.3, 2.0, Sign::Minus).unwrap();
        assert_eq!(multiplicity(&f, C64::new(0.0, 0.0)).unwrap(), 1);
        let f = zeta2(0.5, 2.0, Sign::Minus).unwrap();
        assert_eq!(multiplicity(&f, C64::new(0.0, 0.0)).unwrap(), 3);
    }

    #[test]
    fn zeta2_first_line_zero_matches_newton() {
        let f = zeta2(2f64.ln() / 2.0, 1.0, Sign::Minus).unwrap();
        let zs = line_zeros(&f, 10.0).unwrap();
        assert_eq!(zs[0].location, C64::new(0.0, 0.0));
        let first = zs[1].location;
        let z = newton(&f, first + C64::new(0.01, 0.02), 1).unwrap();
        assert!((z - first).norm() < 1e-9);
        assert!(zs.iter().all(|z| z.residual < 1e-9 && z.multiplicity == 1));
    }
}
