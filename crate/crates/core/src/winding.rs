//! Argument-principle counts in rectangles, the full count report with the
//! bound `B_a`, the Littlewood mean of `S`, safe heights and the density
//! comparison.

use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{Sign, SymmetricFamily};
use crate::phase::{above_noise, integer_point_report, phase_derivative, trace_phase};
use crate::specfun::{self, SpecialValue};
use crate::zerofind::{self, ZeroRecord};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
}

impl Rect {
    pub fn new(sigma_lo: f64, sigma_hi: f64, tau_lo: f64, tau_hi: f64) -> Self {
        Rect {
            sigma_lo,
            sigma_hi,
            tau_lo,
            tau_hi,
        }
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re > self.sigma_lo && z.re < self.sigma_hi && z.im > self.tau_lo && z.im < self.tau_hi
    }

    pub fn center(&self) -> C64 {
        C64::new(
            0.5 * (self.sigma_lo + self.sigma_hi),
            0.5 * (self.tau_lo + self.tau_hi),
        )
    }

    pub fn diameter(&self) -> f64 {
        (self.sigma_hi - self.sigma_lo).hypot(self.tau_hi - self.tau_lo)
    }

    /// Counter-clockwise corners, closed.
    pub fn corners(&self) -> [C64; 5] {
        [
            C64::new(self.sigma_lo, self.tau_lo),
            C64::new(self.sigma_hi, self.tau_lo),
            C64::new(self.sigma_hi, self.tau_hi),
            C64::new(self.sigma_lo, self.tau_hi),
            C64::new(self.sigma_lo, self.tau_lo),
        ]
    }
}

fn sample(g: &dyn Fn(C64) -> Result<SpecialValue>, z: C64) -> Result<C64> {
    match g(z) {
        Ok(v) if above_noise(&v) => Ok(v.value),
        Ok(_) | Err(Error::Pole(_)) | Err(Error::DivisionByNearZero(_)) => {
            Err(Error::BoundaryTooClose(z))
        }
        Err(e) => Err(e),
    }
}

/// Argument change of `g` along the segment `z0 -> z1`, with known end
/// values, refined until each piece turns by less than pi/4 and agrees with
/// its two halves.
fn arg_change_segment(
    g: &dyn Fn(C64) -> Result<SpecialValue>,
    z0: C64,
    g0: C64,
    z1: C64,
    g1: C64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut stack = vec![(z0, g0, z1, g1, 0u32)];
    while let Some((a, ga, b, gb, depth)) = stack.pop() {
        let m = (a + b) * 0.5;
        let gm = sample(g, m)?;
        let d1 = (gm / ga).arg();
        let d2 = (gb / gm).arg();
        let d = (gb / ga).arg();
        if d1.abs() < FRAC_PI_4 && d2.abs() < FRAC_PI_4 && (d1 + d2 - d).abs() < 1e-9 {
            total += d1 + d2;
            continue;
        }
        if depth >= 52 || (b - a).norm() < 1e-13 * (1.0 + m.norm()) {
            return Err(Error::BoundaryTooClose(m));
        }
        stack.push((m, gm, b, gb, depth + 1));
        stack.push((a, ga, m, gm, depth + 1));
    }
    Ok(total)
}

/// Argument change of `g` along a polyline, each edge first cut into pieces
/// no longer than `max_piece`.
pub fn arg_change_path(
    g: &dyn Fn(C64) -> Result<SpecialValue>,
    path: &[C64],
    max_piece: f64,
) -> Result<f64> {
    let mut total = 0.0;
    for w in path.windows(2) {
        let (z0, z1) = (w[0], w[1]);
        let n = ((z1 - z0).norm() / max_piece).ceil().max(1.0) as usize;
        let mut a = z0;
        let mut ga = sample(g, a)?;
        for i in 1..=n {
            let b = if i == n { z1 } else { z0 + (z1 - z0) * (i as f64 / n as f64) };
            let gb = sample(g, b)?;
            total += arg_change_segment(g, a, ga, b, gb)?;
            a = b;
            ga = gb;
        }
    }
    Ok(total)
}

/// Winding number of `g` around a closed polyline.
pub fn winding_number(
    g: &dyn Fn(C64) -> Result<SpecialValue>,
    closed: &[C64],
    max_piece: f64,
) -> Result<i64> {
    let w = arg_change_path(g, closed, max_piece)? / (2.0 * PI);
    let r = w.round();
    if (w - r).abs() > 1e-6 {
        return Err(Error::BoundaryTooClose(closed[0]));
    }
    Ok(r as i64)
}

/// Zeros minus poles of `g` inside `rect`.
pub fn rectangle_count(
    g: &dyn Fn(C64) -> Result<SpecialValue>,
    rect: &Rect,
    tol: f64,
) -> Result<i64> {
    if !(rect.sigma_lo < rect.sigma_hi && rect.tau_lo < rect.tau_hi) {
        return Err(Error::InvalidParameter("degenerate rectangle".into()));
    }
    let piece = (0.1f64).min(rect.diameter() / 8.0).max(tol);
    winding_number(g, &rect.corners(), piece)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    RealOnesided,
    ConjugateTwosided,
}

/// Zero and pole bookkeeping that enters `B_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inventory {
    /// Real zeros of `f` right of the axis, with multiplicity.
    pub n_f_right: u32,
    /// Multiplicity of the zero of `f` at `a` (0 if none).
    pub n_f_a: u32,
    pub p_f_right: u32,
    pub n_h_right: u32,
    /// `n_h_right` came from a winding count rather than a declaration.
    pub n_h_counted: bool,
    pub p_h_right: u32,
    pub real_zeros: Vec<ZeroRecord>,
}

/// Zeros of `h` right of the axis, counted in `a < sigma < sigma_hi`,
/// `|tau| < tau_hi`.
fn count_h_right(fam: &SymmetricFamily, sigma_hi: f64, tau_hi: f64) -> Result<u32> {
    let a = fam.a();
    let h = &fam.h;
    let g = |s: C64| (h.evaluate)(s);
    for shift in [1e-3, 1.7e-3, 3.1e-3] {
        let rect = Rect::new(a + shift, sigma_hi, -tau_hi, tau_hi);
        match rectangle_count(&g, &rect, 1e-8) {
            Ok(w) => {
                let poles: i64 = h
                    .declared_poles
                    .iter()
                    .filter(|(p, _)| rect.contains(*p))
                    .map(|(_, m)| *m as i64)
                    .sum();
                return Ok((w + poles).max(0) as u32);
            }
            Err(Error::BoundaryTooClose(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::BoundaryTooClose(C64::new(a, 0.0)))
}

pub fn inventory(fam: &SymmetricFamily, sigma0: f64, tau_window: f64) -> Result<Inventory> {
    let a = fam.a();
    let sa = C64::new(a, 0.0);
    let n_f_a = if zerofind::residual(fam, sa)? < 1e-10 {
        zerofind::multiplicity(fam, sa)?
    } else {
        0
    };
    let (n_f_right, real_zeros) = if fam.conjugated {
        (0, Vec::new())
    } else {
        let zs = zerofind::real_zeros(fam, a + 1e-4, sigma0 + 1.0)?;
        let n = zs
            .iter()
            .filter(|z| z.location.re > a + 1e-9)
            .map(|z| z.multiplicity)
            .sum();
        (n, zs)
    };
    let (n_h_right, n_h_counted) = match fam.zeros_h_right() {
        Some(n) => (n, false),
        None => (count_h_right(fam, sigma0 + 2.0, tau_window + 10.0)?, true),
    };
    Ok(Inventory {
        n_f_right,
        n_f_a,
        p_f_right: fam.poles_f_right(),
        n_h_right,
        n_h_counted,
        p_h_right: fam.poles_h_right(),
        real_zeros,
    })
}

/// `B_a` from an inventory: `u - n_f - n_{f,a}/2 + P_f + N_h - P_h` in the
/// real mode, `1 + 2 P_f + 2 N_h - 2 P_h` in the conjugated mode.
pub fn bound_from_inventory(fam: &SymmetricFamily, inv: &Inventory) -> f64 {
    if fam.conjugated {
        1.0 + 2.0 * inv.p_f_right as f64 + 2.0 * inv.n_h_right as f64 - 2.0 * inv.p_h_right as f64
    } else {
        fam.u() - inv.n_f_right as f64 - inv.n_f_a as f64 / 2.0 + inv.p_f_right as f64
            + inv.n_h_right as f64
            - inv.p_h_right as f64
    }
}

#[allow(non_snake_case)]
pub fn bound_Ba(fam: &SymmetricFamily) -> Result<f64> {
    let s0 = fam.sigma0()?;
    let inv = inventory(fam, s0, 50.0)?;
    Ok(bound_from_inventory(fam, &inv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub family: String,
    pub sign: Sign,
    pub mode: CountMode,
    /// Requested height.
    pub t: f64,
    /// Height actually used for the contour top.
    pub t_used: f64,
    pub sigma0: f64,
    pub strip_sigma0: Option<f64>,
    pub n: i64,
    pub n0: i64,
    pub n0_prime: i64,
    pub b_a: f64,
    /// Decreasing integer points of the phase.
    pub k: usize,
    /// Certified lower bound for the gap: `max(k, 1 if h'/h(a) < 0 in the
    /// minus case)`.
    pub d_lower: i64,
    pub d_estimate: i64,
    pub d_stable: bool,
    pub b_reduced: f64,
    pub parity_ok: bool,
    pub bound_ok: bool,
    pub reduced_bound_ok: bool,
    pub phi_end: f64,
    pub inventory: Inventory,
    pub line_zeros: Vec<ZeroRecord>,
}

impl CountReport {
    /// `L(T) = (N - N0)/2`.
    pub fn off_line_pairs(&self) -> f64 {
        (self.n - self.n0) as f64 / 2.0
    }

    pub fn all_on_line_and_simple(&self) -> bool {
        self.n == self.n0 && self.n0 == self.n0_prime
    }

    pub fn invariants_ok(&self) -> bool {
        self.parity_ok
            && 0 <= self.n0_prime
            && self.n0_prime <= self.n0
            && self.n0 <= self.n
            && (self.strip_sigma0.is_some() || (self.bound_ok && self.reduced_bound_ok))
    }
}

const TOP_SHIFTS: [f64; 5] = [0.0, 0.0031, -0.0047, 0.0113, -0.0171];

fn zeros_in_rect(fam: &SymmetricFamily, rect: &Rect) -> Result<i64> {
    let g = |s: C64| fam.f_value(s);
    let w = rectangle_count(&g, rect, 1e-8)?;
    let poles: i64 = fam
        .f_poles
        .iter()
        .filter(|(p, _)| rect.contains(*p))
        .map(|(_, m)| *m as i64)
        .sum();
    Ok(w + poles)
}

fn count_impl(fam: &SymmetricFamily, t: f64, strip: Option<f64>) -> Result<CountReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("height must be positive".into()));
    }
    let a = fam.a();
    let sigma0 = match strip {
        Some(s) => s,
        None => fam.sigma0()?,
    };
    if sigma0 <= a {
        return Err(Error::InvalidParameter("sigma0 must exceed the axis".into()));
    }
    let mut last_err = None;
    for shift in TOP_SHIFTS {
        let t_used = t + shift;
        let lo = if fam.conjugated { -t_used } else { 0.0 };
        let trace = trace_phase(&fam.h, lo, t_used, 1e-9)?;
        let bottoms: &[f64] = if fam.conjugated { &[0.0] } else { &[1e-6, 1e-4, 1e-3] };
        let mut n = None;
        for &b in bottoms {
            let tau_lo = if fam.conjugated { -t_used } else { b };
            let rect = Rect::new(2.0 * a - sigma0, sigma0, tau_lo, t_used);
            match zeros_in_rect(fam, &rect) {
                Ok(v) => {
                    n = Some(v);
                    break;
                }
                Err(e @ Error::BoundaryTooClose(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        let Some(mut n) = n else { continue };
        let ipr = integer_point_report(&trace, fam.sign)?;
        let mut line = zerofind::line_zeros_from_trace(fam, &trace)?;
        if !fam.conjugated {
            line.retain(|z| z.location.im > 0.0);
        }
        let mut n0_prime = line.len() as i64;
        let mut n0: i64 = line.iter().map(|z| z.multiplicity as i64).sum();
        for &(tau0, m) in &fam.removed_line_zeros {
            let inside = if fam.conjugated { tau0.abs() < t_used } else { tau0 > 0.0 && tau0 < t_used };
            if inside {
                let copies = if fam.conjugated && tau0 != 0.0 { 2 } else { 1 };
                n += (m as i64) * copies;
                n0 += (m as i64) * copies;
                n0_prime += copies;
            }
        }
        let inv = inventory(fam, sigma0, t_used)?;
        let b_a = bound_from_inventory(fam, &inv);
        let sobre = !fam.conjugated
            && fam.sign == Sign::Minus
            && phase_derivative(&fam.h, 0.0).map(|r| r < 0.0).unwrap_or(false);
        let d_lower = if fam.conjugated { 0 } else { (ipr.k as i64).max(i64::from(sobre)) };
        let b_reduced = b_a - d_lower as f64;
        let gap = (n - n0_prime) as f64;
        let parity_ok = fam.conjugated || (n - n0) % 2 == 0;
        return Ok(CountReport {
            family: fam.label(),
            sign: fam.sign,
            mode: if fam.conjugated {
                CountMode::ConjugateTwosided
            } else {
                CountMode::RealOnesided
            },
            t,
            t_used,
            sigma0,
            strip_sigma0: strip,
            n,
            n0,
            n0_prime,
            b_a,
            k: ipr.k,
            d_lower,
            d_estimate: ipr.d,
            d_stable: ipr.d_stable,
            b_reduced,
            parity_ok,
            bound_ok: gap <= b_a + 1e-9,
            reduced_bound_ok: gap <= b_reduced + 1e-9,
            phi_end: trace.phi_end(),
            inventory: inv,
            line_zeros: line,
        });
    }
    Err(last_err.unwrap_or(Error::BoundaryTooClose(C64::new(a, t))))
}

/// Full count at height `T`: `N` by winding on `|sigma - a| <= sigma0 - a`,
/// `N0'` from phase crossings, `N0` with multiplicities, and `B_a`.
#[allow(non_snake_case)]
pub fn count_N(fam: &SymmetricFamily, t: f64) -> Result<CountReport> {
    count_impl(fam, t, None)
}

/// Count restricted to the strip `|sigma - a| < sigma0 - a`.
pub fn count_strip(fam: &SymmetricFamily, t: f64, sigma0: f64) -> Result<CountReport> {
    count_impl(fam, t, Some(sigma0))
}

fn integrate<F: Fn(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let err = RefCell::new(None);
    let out = quadrature::double_exponential::integrate(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        tol,
    );
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    if !out.integral.is_finite() {
        return Err(Error::BudgetExceeded(C64::new(lo, hi)));
    }
    Ok(out.integral)
}

/// Mean of `S` over `(0, T)` from the Littlewood identity
/// `pi int S = int log|g(s+iT)| + int arg g(sigma0+i tau) - int log|g(s)|`,
/// with `g = 1 ± F`.
#[allow(non_snake_case)]
pub fn littlewood_S_mean(fam: &SymmetricFamily, t: f64, sigma0: f64) -> Result<f64> {
    let a = fam.a();
    let sg = fam.sign.factor();
    let g = |s: C64| -> Result<C64> { Ok(fam.ratio(s)? * sg + 1.0) };
    // split the real-axis integral at the log singularities
    let mut cuts = vec![a, sigma0];
    for (p, _) in &fam.f_poles {
        if p.im == 0.0 && p.re > a && p.re < sigma0 {
            cuts.push(p.re);
        }
    }
    for (p, _) in &fam.h.declared_poles {
        if p.im == 0.0 && p.re > a && p.re < sigma0 {
            cuts.push(p.re);
        }
    }
    if !fam.conjugated {
        for z in zerofind::real_zeros(fam, a + 1e-4, sigma0)? {
            cuts.push(z.location.re);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    let log_abs = |s: C64| -> Result<f64> {
        match g(s) {
            Ok(v) => Ok(v.norm().ln()),
            Err(Error::DivisionByNearZero(_)) | Err(Error::Pole(_)) => Ok(0.0),
            Err(e) => Err(e),
        }
    };
    let mut i3 = 0.0;
    for w in cuts.windows(2) {
        i3 += integrate(|x| log_abs(C64::new(x, 0.0)), w[0], w[1], 1e-9)?;
    }
    let i1 = {
        let pieces = ((sigma0 - a) / 1.0).ceil() as usize;
        let mut acc = 0.0;
        for j in 0..pieces {
            let lo = a + (sigma0 - a) * j as f64 / pieces as f64;
            let hi = a + (sigma0 - a) * (j + 1) as f64 / pieces as f64;
            acc += integrate(|x| log_abs(C64::new(x, t)), lo, hi, 1e-9)?;
        }
        acc
    };
    let i2 = {
        let pieces = t.ceil() as usize;
        let mut acc = 0.0;
        for j in 0..pieces {
            let lo = t * j as f64 / pieces as f64;
            let hi = t * (j + 1) as f64 / pieces as f64;
            acc += integrate(|y| Ok(g(C64::new(sigma0, y))?.arg()), lo, hi, 1e-9)?;
        }
        acc
    };
    Ok((i1 + i2 - i3) / (PI * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafeHeight {
    pub t: f64,
    /// `|zeta(sigma + iT)| > T^-A` on the sampled segment.
    pub exponent: f64,
    pub min_abs: f64,
}

/// Ordinate in `(n, n+1)` maximizing the sampled minimum of `|zeta|` over
/// `-1 <= sigma <= 2`.
pub fn safe_height(n: u32) -> Result<SafeHeight> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let p = specfun::EvalPrecision::default();
    let mut best = (f64::NAN, -1.0);
    for j in 0..32 {
        let t = n as f64 + (j as f64 + 0.5) / 32.0;
        let mut m = f64::INFINITY;
        for i in 0..64 {
            let sigma = -1.0 + 3.0 * i as f64 / 63.0;
            let v = specfun::zeta(C64::new(sigma, t), &p)?.value.norm();
            m = m.min(v);
        }
        if m > best.1 {
            best = (t, m);
        }
    }
    let (t, m) = best;
    let exponent = (-m.ln() / t.ln()).max(0.0) + 1e-3;
    Ok(SafeHeight {
        t,
        exponent,
        min_abs: m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub count_gap: i64,
    pub budget: i64,
    pub slack: i64,
    pub ok: bool,
    pub report: CountReport,
}

/// `N(T) - N0'(T)` against `4 N_h(a, 2T + 4)` plus a fixed slack of 4.
pub fn density_report(fam: &SymmetricFamily, t: f64) -> Result<DensityReport> {
    let report = count_N(fam, t)?;
    let count_gap = report.n - report.n0_prime;
    let a = fam.a();
    let top = 2.0 * t + 4.0;
    let h = &fam.h;
    let g = |s: C64| (h.evaluate)(s);
    let lo = if fam.conjugated { -top } else { 1e-6 };
    let rect = Rect::new(a - 1e-3, a + 4.0, lo, top);
    let w = rectangle_count(&g, &rect, 1e-8)?;
    let poles: i64 = h
        .declared_poles
        .iter()
        .filter(|(p, _)| rect.contains(*p))
        .map(|(_, m)| *m as i64)
        .sum();
    let budget = 4 * (w + poles);
    let slack = 4;
    Ok(DensityReport {
        count_gap,
        budget,
        slack,
        ok: count_gap <= budget + slack,
        report,
    })
}
