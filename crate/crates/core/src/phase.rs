//! Continuous argument of `h` along the axis `re s = a` and the counting
//! lemmas built on it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{EvalFn, MeromorphicSpec, Sign, SymmetricFamily};
use crate::specfun::SpecialValue;
use crate::winding;

type C64 = Complex64;

pub const INITIAL_STEP: f64 = 0.05;
pub const STEP_FLOOR: f64 = 1e-9;
/// |h| below this many error estimates counts as a zero.
pub(crate) const NOISE_FACTOR: f64 = 16.0;

pub(crate) fn above_noise(v: &SpecialValue) -> bool {
    let n = v.value.norm();
    n.is_finite() && n > NOISE_FACTOR * v.est_error && n > f64::MIN_POSITIVE
}

/// Unwrapped `arg h(a + i tau)`, anchored at `tau = 0`.
#[derive(Clone)]
pub struct PhaseTrace {
    pub axis: f64,
    /// `(tau, phi)` sorted by `tau`.
    pub samples: Vec<(f64, f64)>,
    /// Largest `|phi(t_{i+1}) - phi(t_i)|` observed.
    pub max_step: f64,
    /// True when `h(a) < 0` and the trace follows `-h`.
    pub flipped: bool,
    eval: EvalFn,
}

impl std::fmt::Debug for PhaseTrace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseTrace")
            .field("axis", &self.axis)
            .field("samples", &self.samples.len())
            .field("max_step", &self.max_step)
            .field("flipped", &self.flipped)
            .finish()
    }
}

impl PhaseTrace {
    pub fn tau_min(&self) -> f64 {
        self.samples.first().map(|s| s.0).unwrap_or(0.0)
    }

    pub fn tau_max(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }

    pub fn phi0(&self) -> f64 {
        self.phi_at(0.0).unwrap_or(0.0)
    }

    pub fn phi_end(&self) -> f64 {
        self.samples.last().map(|s| s.1).unwrap_or(0.0)
    }

    /// `h(a + i tau)` with the branch sign applied.
    pub fn h_at(&self, tau: f64) -> Result<C64> {
        Ok((self.eval)(C64::new(self.axis, tau))?.value)
    }

    /// Phase at an arbitrary `tau` inside the traced range, continued from
    /// the nearest sample on the left.
    pub fn phi_at(&self, tau: f64) -> Result<f64> {
        let i = match self
            .samples
            .binary_search_by(|s| s.0.partial_cmp(&tau).unwrap())
        {
            Ok(i) => return Ok(self.samples[i].1),
            Err(0) | Err(usize::MAX) => {
                return Err(Error::InvalidParameter(format!("tau {tau} outside the trace")))
            }
            Err(i) if i >= self.samples.len() => {
                return Err(Error::InvalidParameter(format!("tau {tau} outside the trace")))
            }
            Err(i) => i - 1,
        };
        let (t0, p0) = self.samples[i];
        let h0 = self.h_at(t0)?;
        let h1 = self.h_at(tau)?;
        Ok(p0 + (h1 / h0).arg())
    }
}

fn trace_direction(
    eval: &EvalFn,
    axis: f64,
    h0: C64,
    phi0: f64,
    end: f64,
    tol: f64,
    out: &mut Vec<(f64, f64)>,
    max_step: &mut f64,
) -> Result<()> {
    let dir = end.signum();
    let mut tau = 0.0;
    let mut g = h0;
    let mut phi = phi0;
    let mut step = INITIAL_STEP;
    let at = |t: f64| -> Result<SpecialValue> { eval(C64::new(axis, t)) };
    while (end - tau) * dir > 1e-15 {
        let next = if (end - tau).abs() <= step { end } else { tau + dir * step };
        let vm = at(0.5 * (tau + next))?;
        let vn = at(next)?;
        if !above_noise(&vn) {
            return Err(Error::LineZeroEncountered(next));
        }
        if !above_noise(&vm) {
            return Err(Error::LineZeroEncountered(0.5 * (tau + next)));
        }
        let d1 = (vm.value / g).arg();
        let d2 = (vn.value / vm.value).arg();
        let d = (vn.value / g).arg();
        if d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 && (d1 + d2 - d).abs() <= tol {
            phi += d1 + d2;
            *max_step = max_step.max((d1 + d2).abs());
            tau = next;
            g = vn.value;
            out.push((tau, phi));
            if (d1 + d2).abs() < PI / 16.0 {
                step = (2.0 * step).min(INITIAL_STEP);
            }
        } else {
            step *= 0.5;
            if step < STEP_FLOOR {
                // a jump of about pi across a vanishing step is a zero on the axis
                if d.abs() > FRAC_PI_2 {
                    return Err(Error::LineZeroEncountered(tau));
                }
                return Err(Error::StepUnderflow(tau));
            }
        }
    }
    Ok(())
}

/// Trace `arg h(a + i tau)` over `[min(tau_min, 0), max(tau_max, 0)]`.
///
/// The branch is fixed at `tau = 0` with `arg h(a)` in `(-pi, pi]`; when
/// `h(a)` is real and negative the trace follows `-h` instead, so that the
/// phase starts at 0. `tol` bounds the disagreement between a full step and
/// its two halves.
pub fn trace_phase(h: &MeromorphicSpec, tau_min: f64, tau_max: f64, tol: f64) -> Result<PhaseTrace> {
    if !(tau_min <= tau_max) || !tau_min.is_finite() || !tau_max.is_finite() {
        return Err(Error::InvalidParameter("empty or invalid tau range".into()));
    }
    let axis = h.axis;
    let v0 = (h.evaluate)(C64::new(axis, 0.0))?;
    if !above_noise(&v0) {
        return Err(Error::LineZeroEncountered(0.0));
    }
    let h0 = v0.value;
    let flipped = h0.re < 0.0 && h0.im.abs() <= 1e-12 * h0.norm();
    let base = h.evaluate.clone();
    let eval: EvalFn = if flipped {
        Arc::new(move |s| {
            let v = base(s)?;
            Ok(SpecialValue {
                value: -v.value,
                est_error: v.est_error,
            })
        })
    } else {
        base
    };
    let h0 = if flipped { -h0 } else { h0 };
    let phi0 = if flipped { 0.0 } else { h0.arg() };
    let tol = tol.max(1e-12);
    let mut max_step: f64 = 0.0;
    let mut neg = Vec::new();
    if tau_min < 0.0 {
        trace_direction(&eval, axis, h0, phi0, tau_min, tol, &mut neg, &mut max_step)?;
    }
    let mut pos = Vec::new();
    if tau_max > 0.0 {
        trace_direction(&eval, axis, h0, phi0, tau_max, tol, &mut pos, &mut max_step)?;
    }
    let mut samples: Vec<(f64, f64)> = neg.into_iter().rev().collect();
    samples.push((0.0, phi0));
    samples.extend(pos);
    debug_assert!(max_step < FRAC_PI_2);
    Ok(PhaseTrace {
        axis,
        samples,
        max_step,
        flipped,
        eval,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    /// `phi/pi - offset` passes through the integer.
    Crossing,
    /// `phi/pi - offset` touches the integer at a local extremum.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegerPoint {
    pub tau: f64,
    /// The integer value of `phi/pi - offset` at `tau`.
    pub value: i64,
    pub kind: PointKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerPointReport {
    pub offset: f64,
    /// Integer points with `tau > 0`, increasing.
    pub points: Vec<IntegerPoint>,
    /// Integer points with `tau < 0`, decreasing in `tau`.
    pub points_negative: Vec<IntegerPoint>,
    /// `phi(0)/pi - offset` is an integer.
    pub at_origin: bool,
    pub k: usize,
    pub d: i64,
    pub d_stable: bool,
}

impl IntegerPointReport {
    /// Distinct line zeros with `0 < tau < t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.points.iter().filter(|p| p.tau < t).count()
    }

    /// Distinct line zeros with `|tau| < t`, the origin included.
    pub fn count_two_sided(&self, t: f64) -> usize {
        self.count_below(t)
            + self.points_negative.iter().filter(|p| p.tau > -t).count()
            + usize::from(self.at_origin)
    }

    pub fn taus(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.points_negative.iter().rev().map(|p| p.tau).collect();
        if self.at_origin {
            v.push(0.0);
        }
        v.extend(self.points.iter().map(|p| p.tau));
        v
    }
}

fn offset_of(sign: Sign) -> f64 {
    match sign {
        Sign::Plus => 0.5,
        Sign::Minus => 0.0,
    }
}

fn u_of(sign: Sign) -> f64 {
    match sign {
        Sign::Plus => 0.5,
        Sign::Minus => 1.0,
    }
}

fn bisect_level(trace: &PhaseTrace, offset: f64, m: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let g = |t: f64| -> Result<f64> { Ok(trace.phi_at(t)? / PI - offset - m) };
    let mut glo = g(lo)?;
    while (hi - lo) > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the extremum of `phi` on `[lo, hi]`.
fn extremum(trace: &PhaseTrace, mut lo: f64, mut hi: f64, maximum: bool) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let sgn = if maximum { 1.0 } else { -1.0 };
    let f = |t: f64| -> Result<f64> { Ok(sgn * trace.phi_at(t)?) };
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > 1e-9 {
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

/// Integer points of `phi/pi - offset` on one monotone piece `(t0, g0)..(t1, g1)`.
fn crossings_on(
    trace: &PhaseTrace,
    offset: f64,
    (t0, g0): (f64, f64),
    (t1, g1): (f64, f64),
    out: &mut Vec<IntegerPoint>,
) -> Result<()> {
    let lo = g0.min(g1).ceil() as i64;
    let hi = g0.max(g1).floor() as i64;
    for m in lo..=hi {
        let mf = m as f64;
        if g0 == mf {
            continue;
        }
        let tau = if g1 == mf {
            t1
        } else if (g0 - mf) * (g1 - mf) < 0.0 {
            bisect_level(trace, offset, mf, t0.min(t1), t0.max(t1))?
        } else {
            continue;
        };
        out.push(IntegerPoint {
            tau,
            value: m,
            kind: PointKind::Crossing,
        });
    }
    Ok(())
}

/// Integer points along samples ordered away from the origin.
fn scan_points(trace: &PhaseTrace, offset: f64, seq: &[(f64, f64)]) -> Result<Vec<IntegerPoint>> {
    let g = |p: f64| p / PI - offset;
    let dir = (seq[1].0 - seq[0].0).signum();
    // add the refined local extrema so that every piece is monotone; an
    // extremum can hide a pair of crossings or a touch
    let mut pts = seq.to_vec();
    let mut touches = Vec::new();
    for i in 1..seq.len() - 1 {
        let (a, b, c) = (seq[i - 1].1, seq[i].1, seq[i + 1].1);
        if (b - a) * (c - b) >= 0.0 {
            continue;
        }
        let (lo, hi) = (seq[i - 1].0.min(seq[i + 1].0), seq[i - 1].0.max(seq[i + 1].0));
        let (te, pe) = extremum(trace, lo, hi, b > a)?;
        pts.push((te, pe));
        let ge = g(pe);
        if (ge - ge.round()).abs() < 1e-7 {
            touches.push(IntegerPoint {
                tau: te,
                value: ge.round() as i64,
                kind: PointKind::Touch,
            });
        }
    }
    pts.sort_by(|x, y| (dir * x.0).partial_cmp(&(dir * y.0)).unwrap());
    pts.dedup_by(|x, y| x.0 == y.0);
    let mut out = Vec::new();
    for w in pts.windows(2) {
        crossings_on(trace, offset, (w[0].0, g(w[0].1)), (w[1].0, g(w[1].1)), &mut out)?;
    }
    out.retain(|p| {
        !touches
            .iter()
            .any(|t| t.value == p.value && (t.tau - p.tau).abs() < 1e-4)
    });
    out.extend(touches);
    out.sort_by(|a, b| (dir * a.tau).partial_cmp(&(dir * b.tau)).unwrap());
    Ok(out)
}

/// Integer points of `phi/pi - offset`, the decreasing count `k` and the
/// observed gap `d = N0'(tau) - ceil(phi(tau)/pi - u)` over the last quarter
/// of the positive trace.
pub fn integer_point_report(trace: &PhaseTrace, sign: Sign) -> Result<IntegerPointReport> {
    let offset = offset_of(sign);
    let u = u_of(sign);
    let origin = trace
        .samples
        .iter()
        .position(|s| s.0 == 0.0)
        .ok_or_else(|| Error::InvalidParameter("trace does not contain tau = 0".into()))?;
    let g0 = trace.samples[origin].1 / PI - offset;
    let at_origin = (g0 - g0.round()).abs() < 1e-12;
    let pos: Vec<(f64, f64)> = trace.samples[origin..].to_vec();
    let neg: Vec<(f64, f64)> = trace.samples[..=origin].iter().rev().copied().collect();
    let points = if pos.len() > 1 { scan_points(trace, offset, &pos)? } else { Vec::new() };
    let points_negative = if neg.len() > 1 { scan_points(trace, offset, &neg)? } else { Vec::new() };

    let mut k = 0;
    let mut prev = g0;
    for p in &points {
        let v = p.value as f64;
        if v <= prev {
            k += 1;
        }
        prev = v;
    }

    let t_end = trace.tau_max();
    let mut ds = Vec::new();
    if t_end > 0.0 {
        let mut count = 0usize;
        for &(tau, phi) in &pos {
            while count < points.len() && points[count].tau < tau {
                count += 1;
            }
            if tau < 0.75 * t_end {
                continue;
            }
            let x = phi / PI - u;
            if (x - x.round()).abs() < 1e-9 {
                continue;
            }
            ds.push(count as i64 - x.ceil() as i64);
        }
    }
    let d = ds.last().copied().unwrap_or(0);
    let d_stable = ds.iter().all(|&v| v == d);
    Ok(IntegerPointReport {
        offset,
        points,
        points_negative,
        at_origin,
        k,
        d,
        d_stable,
    })
}

/// Distinct line zeros of the family on `0 < tau < T` (two-sided in the
/// conjugated mode), from the trace.
pub fn count_line_zeros(fam: &SymmetricFamily, trace: &PhaseTrace) -> Result<usize> {
    let rep = integer_point_report(trace, fam.sign)?;
    if fam.conjugated {
        Ok(rep.count_two_sided(f64::INFINITY))
    } else {
        Ok(rep.points.len())
    }
}

/// `re(h'/h)` at `a + i tau` by a four-point central difference.
pub fn phase_derivative(h: &MeromorphicSpec, tau: f64) -> Result<f64> {
    let s = C64::new(h.axis, tau);
    let d = 1e-3;
    let v = (h.evaluate)(s)?;
    if !above_noise(&v) {
        return Err(Error::DivisionByNearZero(s));
    }
    let e = |k: f64| h.eval(s + k * d);
    let der = (e(-2.0)? - e(-1.0)? * 8.0 + e(1.0)? * 8.0 - e(2.0)?) / (12.0 * d);
    Ok((der / v.value).re)
}

/// Lower bound for the number of line zeros on `0 < tau < T` that allows
/// zeros of `h` on the axis:
/// `R(sigma0, T) - n_h + P_h - 2 N_h(a, sigma0, T) - 2`, where `R` is the
/// argument change of `h` along `sigma0 -> sigma0 + iT -> a + iT` over pi.
pub fn count_with_line_zeros(fam: &SymmetricFamily, sigma0: f64, t: f64) -> Result<f64> {
    let a = fam.a();
    if !(sigma0 > a) || !(t > 0.0) {
        return Err(Error::InvalidParameter("need sigma0 > a and T > 0".into()));
    }
    let h = &fam.h;
    let g = |s: C64| (h.evaluate)(s);
    let path = [C64::new(sigma0, 0.0), C64::new(sigma0, t), C64::new(a, t)];
    let r = winding::arg_change_path(&g, &path, 0.1)? / PI;
    // real zeros of h on (a, sigma0)
    let mut n_real = 0i64;
    let step = 0.01;
    let mut x = a + step;
    let mut prev = h.eval(C64::new(a + 1e-9, 0.0))?.re;
    while x < sigma0 {
        let v = h.eval(C64::new(x, 0.0))?.re;
        if v == 0.0 || (v > 0.0) != (prev > 0.0) {
            if !h
                .declared_poles
                .iter()
                .any(|(p, _)| p.im == 0.0 && (p.re - x).abs() <= step)
            {
                n_real += 1;
            }
        }
        prev = v;
        x += step;
    }
    let p_h: i64 = h
        .declared_poles
        .iter()
        .filter(|(p, _)| p.re > a && p.re < sigma0)
        .map(|(_, m)| *m as i64)
        .sum();
    // zeros of h in a <= sigma <= sigma0, 0 < tau < T
    let rect = winding::Rect::new(a - 1e-3, sigma0, 1e-6, t);
    let inside = winding::rectangle_count(&g, &rect, 1e-8)?;
    let poles_inside: i64 = h
        .declared_poles
        .iter()
        .filter(|(p, _)| rect.contains(*p))
        .map(|(_, m)| *m as i64)
        .sum();
    let n_h = inside + poles_inside;
    Ok(r - n_real as f64 + p_h as f64 - 2.0 * n_h as f64 - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{zeta_translate, MeromorphicSpec};

    fn linear() -> MeromorphicSpec {
        MeromorphicSpec::from_fn(0.0, true, |s| s + 1.0)
    }

    #[test]
    fn arctangent() {
        let tr = trace_phase(&linear(), 0.0, 1.0, 1e-9).unwrap();
        assert!((tr.phi_end() - PI / 4.0).abs() < 1e-12);
        assert!(tr.max_step < FRAC_PI_2);
    }

    #[test]
    fn negative_start_is_flipped() {
        let h = MeromorphicSpec::from_fn(0.0, true, |s| s - 1.0);
        let tr = trace_phase(&h, 0.0, 1.0, 1e-9).unwrap();
        assert!(tr.flipped);
        assert_eq!(tr.phi0(), 0.0);
        // arg(1 - i) relative to arg(1)
        assert!((tr.phi_end() + PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_sided_trace_is_anchored_at_zero() {
        let tr = trace_phase(&linear(), -1.0, 1.0, 1e-9).unwrap();
        assert_eq!(tr.tau_min(), -1.0);
        assert!((tr.samples[0].1 + PI / 4.0).abs() < 1e-12);
        assert_eq!(tr.phi0(), 0.0);
    }

    #[test]
    fn line_zero_is_reported() {
        let h = MeromorphicSpec::from_fn(0.0, true, |s| s * s + 1.0);
        match trace_phase(&h, 0.0, 2.0, 1e-9) {
            Err(Error::LineZeroEncountered(t)) => assert!((t - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone_phase_has_no_decreasing_points() {
        let h = MeromorphicSpec::from_fn(0.0, true, |s| (s * 3.0).exp());
        let tr = trace_phase(&h, 0.0, 10.0, 1e-9).unwrap();
        let rep = integer_point_report(&tr, Sign::Minus).unwrap();
        assert_eq!(rep.k, 0);
        // phi = 3 tau, crossings at m pi / 3
        assert_eq!(rep.points.len(), 9);
        assert!((rep.points[0].tau - PI / 3.0).abs() < 1e-9);
        assert!(rep.d_stable);
        assert_eq!(rep.d, 0);
    }

    #[test]
    fn derivative_examples() {
        assert!((phase_derivative(&linear(), 0.0).unwrap() - 1.0).abs() < 1e-9);
        let (alpha, beta) = (0.7, 2.0);
        let h = MeromorphicSpec::from_fn(0.0, true, move |s| (s * alpha).exp() * (s - beta));
        let r = phase_derivative(&h, 0.0).unwrap();
        assert!((r - (alpha - 1.0 / beta)).abs() < 1e-9);
    }

    #[test]
    fn translate_derivative_changes_sign() {
        let r = |a: f64| phase_derivative(&zeta_translate(a, true, Sign::Minus).unwrap().h, 0.0).unwrap();
        assert!(r(5.8) < 0.0);
        assert!(r(7.8) > 0.0);
    }
}
