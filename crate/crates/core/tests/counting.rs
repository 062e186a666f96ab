use std::f64::consts::PI;

use critline::families::*;
use critline::phase::*;
use critline::poly::RealPolynomial;
use critline::winding::*;
use critline::zerofind::*;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn zeta2_minus() -> SymmetricFamily {
    zeta2(2f64.ln() / 2.0, 1.0, Sign::Minus).unwrap()
}

#[test]
fn line_count_matches_box_winding() {
    let fam = zeta2_minus();
    let trace = trace_phase(&fam.h, 0.0, 30.0, 1e-9).unwrap();
    let n = count_line_zeros(&fam, &trace).unwrap();
    let g = |s: Complex64| fam.f_value(s);
    let boxed = rectangle_count(&g, &Rect::new(-3.0, 3.0, 1e-6, 30.0), 1e-8).unwrap();
    assert_eq!(n as i64, boxed);
}

#[test]
fn phase_on_an_empty_range() {
    let fam = zeta2_minus();
    let trace = trace_phase(&fam.h, 0.0, 0.0, 1e-9).unwrap();
    assert_eq!(count_line_zeros(&fam, &trace).unwrap(), 0);
}

#[test]
fn monotone_phase_gives_no_decreasing_points() {
    let h = MeromorphicSpec::from_fn(0.0, true, |s| (s + 1.0) * (s + 2.0) * (s + 3.0));
    let fam = SymmetricFamily::custom("cubic", h, Sign::Plus, false).unwrap();
    let trace = trace_phase(&fam.h, 0.0, 50.0, 1e-9).unwrap();
    let rep = integer_point_report(&trace, Sign::Plus).unwrap();
    assert_eq!(rep.k, 0);
    // floor(phi/pi - u) + 1 crossings with value >= 0 are all there is
    let n = count_line_zeros(&fam, &trace).unwrap();
    let want = (trace.phi_end() / PI - 0.5).floor() as usize + 1;
    assert_eq!(n, want);
}

#[test]
fn negative_log_derivative_forces_a_decreasing_point() {
    let fam = zeta_translate(1.0, true, Sign::Minus).unwrap();
    assert!(phase_derivative(&fam.h, 0.0).unwrap() < 0.0);
    let r = count_N(&fam, 30.0).unwrap();
    assert!(r.d_lower >= 1);
}

#[test]
fn log_derivative_examples() {
    let (alpha, beta) = (0.8, 2.5);
    let h = MeromorphicSpec::from_fn(0.0, true, move |s| (s * alpha).exp() * (s - beta));
    let d = phase_derivative(&h, 0.0).unwrap();
    assert!((d - (alpha - 1.0 / beta)).abs() < 1e-6);
    let lin = MeromorphicSpec::from_fn(0.0, true, |s| s + 1.0);
    assert!((phase_derivative(&lin, 0.0).unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn line_zero_bound_for_epstein() {
    let fam = epstein_partial(QuadraticForm::new(1.0, 0.0, 1.0).unwrap(), 1).unwrap();
    let lower = count_with_line_zeros(&fam, 3.0, 20.0).unwrap();
    let actual = line_zeros(&fam, 20.0).unwrap().iter().filter(|z| z.location.im > 0.0).count();
    assert!(lower <= actual as f64, "{lower} > {actual}");
}

#[test]
fn line_zero_bound_with_a_zero_of_h_on_the_axis() {
    // f = h(s) - h(-s) = 2 s (s^2 + 25): one line zero in (0, 8), at tau = 5
    let h = MeromorphicSpec::from_fn(0.0, true, |s| (s * s + 25.0) * (s + 2.0))
        .with_line_policy(LineZeroPolicy::Unknown);
    let fam = SymmetricFamily::custom("forced", h, Sign::Minus, false).unwrap();
    let lower = count_with_line_zeros(&fam, 4.0, 8.0).unwrap();
    assert!(lower <= 1.0, "{lower}");
}

#[test]
fn unwrap_is_step_independent() {
    let fams = [
        zeta2_minus(),
        zeta_translate(1.0, true, Sign::Plus).unwrap(),
        eisenstein_a0(2.0).unwrap(),
        weng_truncated(1.0).unwrap(),
    ];
    for fam in fams {
        let a = trace_phase(&fam.h, 0.0, 100.0, 1e-9).unwrap();
        let b = trace_phase(&fam.h, 0.0, 100.0, 1e-12).unwrap();
        assert!((a.phi_end() - b.phi_end()).abs() < 1e-8, "{}", fam.label());
        assert!(a.max_step < PI / 2.0);
        // the unwrapped value is a branch of arg h(a + 100i)
        let direct = a.h_at(100.0).unwrap().arg();
        let k = (a.phi_end() - direct) / (2.0 * PI);
        assert!((k - k.round()).abs() < 1e-9, "{}", fam.label());
    }
}

#[test]
fn phase_lower_bound_holds() {
    for fam in [
        zeta2_minus(),
        zeta_translate(1.0, true, Sign::Minus).unwrap(),
        zeta_translate(2.0, true, Sign::Plus).unwrap(),
        h_poly(3.0, &RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap(), Sign::Plus).unwrap(),
    ] {
        for t in [10.0, 30.0, 50.0] {
            let trace = trace_phase(&fam.h, 0.0, t, 1e-9).unwrap();
            let n0p = count_line_zeros(&fam, &trace).unwrap() as f64;
            assert!(n0p >= trace.phi_end() / PI - fam.u() - 1e-9, "{} at {t}", fam.label());
        }
    }
}

#[test]
fn plus_and_minus_line_zeros_interlace() {
    let take = |sign| -> Vec<f64> {
        let fam = zeta_translate(1.0, true, sign).unwrap();
        line_zeros(&fam, 100.0)
            .unwrap()
            .into_iter()
            .map(|z| z.location.im)
            .filter(|&t| t > 10.0 && t < 100.0)
            .collect()
    };
    let plus = take(Sign::Plus);
    let minus = take(Sign::Minus);
    let mut merged: Vec<(f64, bool)> = plus.iter().map(|&t| (t, true)).chain(minus.iter().map(|&t| (t, false))).collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert!(merged.len() > 20);
    for w in merged.windows(2) {
        assert_ne!(w[0].1, w[1].1, "no alternation near {}", w[0].0);
    }
}

#[test]
fn rectangle_examples() {
    let fam = zeta2_minus();
    let g = |s: Complex64| fam.f_value(s);
    assert_eq!(rectangle_count(&g, &Rect::new(-1.0, 1.0, -1.0, 1.0), 1e-8).unwrap(), 1);
    assert_eq!(rectangle_count(&g, &Rect::new(5.0, 6.0, 1.0, 2.0), 1e-8).unwrap(), 0);
    let f8 = zeta_translate(8.0, true, Sign::Plus).unwrap();
    let g8 = |s: Complex64| f8.f_value(s);
    assert_eq!(rectangle_count(&g8, &Rect::new(8.73, 8.83, 0.95, 1.05), 1e-8).unwrap(), 1);
}

#[test]
fn count_examples() {
    let r = count_N(&zeta2_minus(), 50.0).unwrap();
    assert!(r.n == r.n0 && r.n0 == r.n0_prime && r.invariants_ok());
    let r = count_N(&zeta_translate(8.0, true, Sign::Plus).unwrap(), 5.0).unwrap();
    assert_eq!(r.n - r.n0, 2);
    assert!(r.parity_ok);
}

#[test]
fn bound_examples() {
    for alpha in [0.75, 1.0, 3.0, 6.0] {
        let b = bound_Ba(&zeta_translate(alpha, true, Sign::Minus).unwrap()).unwrap();
        assert_eq!(b, 1.5, "alpha = {alpha}");
        let b = bound_Ba(&zeta_translate(alpha, true, Sign::Plus).unwrap()).unwrap();
        assert_eq!(b, 2.5, "alpha = {alpha}");
    }
    // entire, zero-free right of the axis, plus sign
    let h = MeromorphicSpec::from_fn(0.0, true, |s| (s * 2f64.ln()).exp() * (s + 1.0))
        .with_envelope(std::sync::Arc::new(|sigma| if sigma > 0.0 { Some(4f64.powf(-sigma)) } else { None }));
    let fam = SymmetricFamily::custom("entire", h, Sign::Plus, false).unwrap();
    assert_eq!(bound_Ba(&fam).unwrap(), 0.5);
    let r = count_N(&fam, 30.0).unwrap();
    assert!(r.n == r.n0 && r.n0 == r.n0_prime);
}

#[test]
fn littlewood_mean_is_small() {
    let fam = zeta_translate(1.0, true, Sign::Minus).unwrap();
    let m = littlewood_S_mean(&fam, 50.0, 20.0).unwrap();
    assert!(m.abs() < 0.2, "{m}");
    let p = RealPolynomial::new(vec![-1.0, 2.0]).unwrap();
    let fam = h_poly(2.0, &p, Sign::Minus).unwrap();
    let m = littlewood_S_mean(&fam, 50.0, fam.sigma0().unwrap()).unwrap();
    assert!(m.abs() < 0.2, "{m}");
}

#[test]
fn density_mode_small_translate() {
    let fam = zeta_translate(0.4, true, Sign::Minus).unwrap();
    let d = density_report(&fam, 30.0).unwrap();
    assert_eq!((d.count_gap, d.budget), (0, 0));
    assert!(d.ok);
}

#[test]
fn parity_over_a_small_catalog() {
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap();
    let fams = [
        zeta2_minus(),
        zeta_translate(1.0, true, Sign::Minus).unwrap(),
        zeta_translate(1.0, true, Sign::Plus).unwrap(),
        h_poly(4.0, &p, Sign::Plus).unwrap(),
        eisenstein_a0(8.0).unwrap(),
    ];
    for fam in &fams {
        for t in [10.0, 30.0] {
            let r = count_N(fam, t).unwrap();
            assert!(r.parity_ok && r.n >= r.n0 && r.n0 >= r.n0_prime, "{} at {t}", fam.label());
            assert!(r.bound_ok, "{} at {t}: {} - {} > {}", fam.label(), r.n, r.n0_prime, r.b_a);
        }
    }
}

// For y < 1 the zeros off the line drift right roughly along
// |s|^(1/2) = sqrt(pi) y^(1-2 sigma); with y = 1/2 they cross sigma = 1 near
// tau = 12, so the strip |sigma - 1/2| <= 1/2 keeps a fixed excess from T = 20 on.
#[test]
fn strip_counts_stay_bounded_for_small_y() {
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap();
    let fam = h_poly(0.5, &p, Sign::Minus).unwrap();
    let mut gaps = Vec::new();
    for t in [20.0, 40.0, 60.0, 80.0] {
        let r = count_strip(&fam, t, 1.0).unwrap();
        gaps.push(r.n - r.n0_prime);
    }
    let running: Vec<i64> = gaps.iter().scan(i64::MIN, |m, &g| { *m = (*m).max(g); Some(*m) }).collect();
    assert!(running.windows(2).all(|w| w[1] == w[0]), "{gaps:?}");
}

#[test]
fn small_y_has_zeros_right_of_the_strip() {
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap();
    let fam = h_poly(0.5, &p, Sign::Minus).unwrap();
    let zs = offline_zeros(&fam, Rect::new(1.0, 3.0, 10.0, 40.0)).unwrap();
    assert!(zs.iter().any(|z| z.location.re > 1.0), "{zs:?}");
}

#[test]
fn real_zero_examples() {
    let fam = zeta_translate(1.0, true, Sign::Minus).unwrap();
    let zs = real_zeros(&fam, 2.0, 30.0).unwrap();
    let rho = zs.iter().find(|z| z.location.re > 2.0).expect("rho_1");
    assert!(residual(&fam, c(1.0 - rho.location.re, 0.0)).unwrap() < 1e-8);
    assert!(zs.iter().any(|z| (z.location.re - (1.0 - rho.location.re)).abs() < 1e-9));

    let a8 = eisenstein_a0(8.0).unwrap();
    let zs = real_zeros(&a8, 0.5 + 1e-6, 1.0).unwrap();
    assert!(zs.iter().any(|z| z.location.re > 0.5 && z.location.re < 1.0));
    let a2 = eisenstein_a0(2.0).unwrap();
    let zs = real_zeros(&a2, 0.5 + 1e-6, 1.0).unwrap();
    assert!(zs.iter().all(|z| !(z.location.re > 0.5 && z.location.re < 1.0)));
}

#[test]
fn offline_examples() {
    let f8 = zeta_translate(8.0, true, Sign::Plus).unwrap();
    let zs = offline_zeros(&f8, Rect::new(7.0, 10.0, 0.5, 1.5)).unwrap();
    let z = zs.iter().find(|z| z.location.re > 7.0).expect("zero of f_8");
    assert!((z.location - c(8.78369, 1.00496)).norm() < 1e-4);
    // reflection partner
    assert!(zs.iter().any(|w| (w.location - c(1.0 - z.location.re, z.location.im)).norm() < 1e-8));
    assert!(offline_zeros(&zeta2_minus(), Rect::new(1.0, 2.0, 1.0, 2.0)).unwrap().is_empty());
    let f1 = zeta_translate(1.0, true, Sign::Minus).unwrap();
    assert!(offline_zeros(&f1, Rect::new(0.6, 3.0, 0.1, 30.0)).unwrap().is_empty());
}

#[test]
fn triple_zero_at_alpha_star() {
    let star = solve_alpha_star().unwrap();
    assert!(r_of_alpha(star.parameter - 1.0).unwrap() < 0.0);
    assert!(r_of_alpha(star.parameter + 1.0).unwrap() > 0.0);
    let fam = zeta_translate(star.parameter, true, Sign::Minus).unwrap();
    assert_eq!(multiplicity(&fam, c(0.5, 0.0)).unwrap(), 3);
}

#[test]
fn y_star_is_a_critical_point_of_the_phase() {
    let q = RealPolynomial::one();
    let y = solve_y_star(&q).unwrap().parameter;
    let fam = eisenstein_a0(y).unwrap();
    assert!(phase_derivative(&fam.h, 0.0).unwrap().abs() < 1e-8);
}

#[test]
fn double_zero_splits_when_alpha_moves() {
    let build = |a: f64| zeta_translate(a, true, Sign::Plus);
    let dz = solve_double_zero(build, (2.5, 2.7), (4.0, 7.0)).unwrap();
    let fam = zeta_translate(dz.alpha, true, Sign::Plus).unwrap();
    assert_eq!(multiplicity(&fam, c(0.5, dz.tau0)).unwrap(), 2);
    // moving alpha one way opens the touching point into two crossings
    let count = |a: f64| {
        line_zeros(&zeta_translate(a, true, Sign::Plus).unwrap(), 7.0)
            .unwrap()
            .iter()
            .filter(|z| (z.location.im - dz.tau0).abs() < 1.0)
            .count()
    };
    let (lo, hi) = (count(dz.alpha - 0.01), count(dz.alpha + 0.01));
    assert_eq!(lo.max(hi), 2, "{lo} {hi}");
    assert_eq!(lo.min(hi), 0, "{lo} {hi}");
}

#[test]
fn completeness_at_height_30() {
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap();
    let fams = [
        zeta2_minus(),
        zeta_translate(1.0, true, Sign::Minus).unwrap(),
        zeta_translate(8.0, true, Sign::Plus).unwrap(),
        h_poly(3.0, &p, Sign::Minus).unwrap(),
        eisenstein_a0(8.0).unwrap(),
    ];
    for fam in &fams {
        let r = count_N(fam, 30.0).unwrap();
        let t = r.t_used;
        let on_line: i64 = line_zeros(fam, t)
            .unwrap()
            .iter()
            .filter(|z| z.location.im > 0.0)
            .map(|z| z.multiplicity as i64)
            .sum();
        let s0 = r.sigma0;
        let a = fam.a();
        let off: i64 = offline_zeros(fam, Rect::new(a + 1e-3, s0, 1e-3, t))
            .unwrap()
            .iter()
            .filter(|z| z.location.re > a)
            .map(|z| z.multiplicity as i64)
            .sum();
        assert_eq!(on_line + 2 * off, r.n, "{}", fam.label());
    }
}

#[test]
fn simple_zeros_where_the_bound_is_below_two() {
    let p = RealPolynomial::new(vec![0.0, -1.0, 2.0]).unwrap();
    for fam in [zeta2_minus(), weng_truncated(2.0).unwrap(), h_poly(3.0, &p, Sign::Minus).unwrap()] {
        let r = count_N(&fam, 30.0).unwrap();
        assert!(r.b_a < 2.0);
        assert!(r.line_zeros.iter().all(|z| z.multiplicity == 1), "{}", fam.label());
    }
}
