//! `critline`: evaluate, trace, count, locate, solve and verify from the shell.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error, 3 a bound or
//! verified property fails, 4 another report invariant fails.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critline::families::{
    build_family, epstein_balanced, g_class_balanced, parse_complex, parse_spec_file, zeta_translate, FamilySpec,
    Sign, SymmetricFamily,
};
use critline::phase::{integer_point_report, trace_phase};
use critline::poly::RealPolynomial;
use critline::stability::{
    hb_offline_empty, hb_split, interlacing_check, is_stable, perturbed_family_check, phase_limit_check, stodola,
};
use critline::winding::{count_N, count_strip, Rect};
use critline::zerofind::{
    line_zeros, offline_zeros, r_of_alpha, real_zeros, solve_alpha_star, solve_double_zero, solve_y_star,
    ZeroRecord,
};
use num_complex::Complex64;
use output::{fmt12, Cell, Doc, Format};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "critline", version, about = "Zeros of h(s) + h(2a-s) and h(s) - h(2a-s) on and off the line re s = a")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; defaults to csv for `figure`, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Phase tracing tolerance.
    #[arg(long, global = true, env = "CRITLINE_TOL", default_value_t = 1e-9)]
    tol: f64,
    /// Seed for the random polynomial corpus.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print f(s), h(s), h(2a-s) and F(s). `original` is the function
    /// before any normalizing factor, e.g. the Weng zeta itself.
    Eval {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Point, e.g. `0.7+2i`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Phase of h on the axis and its integer points.
    Trace {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau_min: f64,
        /// Resample the phase on a grid with this spacing.
        #[arg(long)]
        step: Option<f64>,
    },
    /// Count report with zero table and bound verdict.
    Report {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Count in the strip |re s - a| <= sigma0 - a instead of the half plane.
        #[arg(long)]
        strip: Option<f64>,
    },
    /// Locate zeros on the line, on the real axis or in a box.
    Locate {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Box `sigma_lo,sigma_hi,tau_lo,tau_hi`.
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        rect: Option<Vec<f64>>,
        /// Real interval `lo,hi`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        real: Option<Vec<f64>>,
    },
    /// Solve for a special parameter.
    Solve {
        #[arg(value_enum)]
        target: SolveTarget,
        /// Coefficients of q for `y-star`, constant term first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Option<Vec<f64>>,
        /// Bracket in alpha for `double-zero`.
        #[arg(long, value_delimiter = ',', default_values_t = [2.5, 2.7])]
        bracket: Vec<f64>,
        /// Window in tau for `double-zero`.
        #[arg(long, value_delimiter = ',', default_values_t = [4.0, 7.0])]
        window: Vec<f64>,
    },
    /// Plot data.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
    },
    /// Hermite-Biehler checks on a polynomial or a random corpus.
    Verify {
        /// Coefficients, constant term first.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "corpus")]
        poly: Option<Vec<f64>>,
        /// Number of random stable polynomials.
        #[arg(long)]
        corpus: Option<usize>,
        /// Also check p(s) y^s + p(-s) y^-s up to `--height` for this y.
        #[arg(long, requires = "poly")]
        y: Option<f64>,
        #[arg(long, default_value_t = 20.0)]
        height: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveTarget {
    AlphaStar,
    YStar,
    DoubleZero,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureName {
    #[value(name = "r_of_alpha", alias = "r-of-alpha")]
    ROfAlpha,
    #[value(name = "u_of_tau", alias = "u-of-tau")]
    UOfTau,
}

#[derive(Args, Default)]
struct FamilyArgs {
    /// zeta2, zeta-translate, eisenstein-a0, h-poly, weng, epstein, g-class, l-translate
    #[arg(long, required_unless_present = "spec")]
    family: Option<String>,
    /// Family file with `key = value` lines.
    #[arg(long, conflicts_with = "family")]
    spec: Option<PathBuf>,
    #[arg(long, default_value = "minus")]
    sign: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    y: Option<String>,
    /// Polynomial coefficients, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Option<Vec<String>>,
    /// Weng parameter for `--family weng`, the height otherwise.
    #[arg(long = "T")]
    t: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    lambda: Option<String>,
    /// G-class entry `b,lambda_k,A_k`; repeat for more.
    #[arg(long, allow_hyphen_values = true)]
    entry: Vec<String>,
    /// Character label `N.j`.
    #[arg(long)]
    chi: Option<String>,
    /// Use the uncompleted zeta for `zeta-translate`.
    #[arg(long)]
    uncompleted: bool,
    /// Balanced evaluator for epstein and g-class at large heights.
    #[arg(long)]
    balanced: bool,
}

enum Failure {
    Usage(String),
    Numeric(critline::Error),
}

impl From<critline::Error> for Failure {
    fn from(e: critline::Error) -> Self {
        Failure::Numeric(e)
    }
}

type Res<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Usage(msg.into()))
}

impl FamilyArgs {
    fn is_weng(&self) -> bool {
        self.family.as_deref() == Some("weng")
    }

    /// Height: `--height`, else `--T` unless that is the Weng parameter.
    fn height(&self, default: f64) -> f64 {
        match (self.height, self.is_weng()) {
            (Some(h), _) => h,
            (None, false) => self.t.unwrap_or(default),
            (None, true) => default,
        }
    }

    fn spec_text(&self) -> Res<String> {
        if let Some(path) = &self.spec {
            return std::fs::read_to_string(path)
                .or_else(|e| usage(format!("cannot read {}: {e}", path.display())));
        }
        let family = self.family.as_deref().unwrap_or_default();
        let mut lines = vec![format!("family = {family}"), format!("sign = {}", self.sign)];
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                lines.push(format!("{k} = {v}"));
            }
        };
        push("alpha", self.alpha.clone());
        push("beta", self.beta.clone());
        push("y", self.y.clone());
        push("p", self.p.as_ref().map(|p| p.join(";")));
        if self.is_weng() {
            push("T", self.t.map(|t| t.to_string()));
        }
        push("a", self.a.clone());
        push("b", self.b.clone());
        push("c", self.c.clone());
        push("n", self.n.map(|n| n.to_string()));
        push("lambda", self.lambda.clone());
        push("chi", self.chi.clone());
        if self.uncompleted {
            push("completed", Some("false".into()));
        }
        for e in &self.entry {
            lines.push(format!("entry = {}", e.replace(',', ";")));
        }
        Ok(lines.join("\n"))
    }

    fn build(&self) -> Res<SymmetricFamily> {
        let (spec, sign) = parse_spec_file(&self.spec_text()?).or_else(|e| usage(e.to_string()))?;
        let fam = if self.balanced {
            match &spec {
                FamilySpec::EpsteinPartial { form, n } => epstein_balanced(*form, *n),
                FamilySpec::GClass { lambda, entries } => g_class_balanced(*lambda, entries),
                _ => return usage("--balanced applies to epstein and g-class only"),
            }
        } else {
            build_family(&spec, sign)
        };
        fam.or_else(|e| match e {
            critline::Error::InvalidParameter(_) | critline::Error::Parse(_) => usage(e.to_string()),
            e => Err(e.into()),
        })
    }
}

fn cplx(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn zero_rows(zs: &[ZeroRecord]) -> Vec<Vec<Cell>> {
    zs.iter()
        .map(|z| {
            vec![
                Cell::Num(z.location.re),
                Cell::Num(z.location.im),
                Cell::Int(z.multiplicity as i64),
                Cell::Bool(z.on_line),
                Cell::Text(format!("{:?}", z.method)),
                Cell::Num(z.residual),
            ]
        })
        .collect()
}

const ZERO_COLUMNS: [&str; 6] = ["re", "im", "multiplicity", "on_line", "method", "residual"];

fn run(cli: &Cli) -> Res<(Doc, u8)> {
    let doc = match &cli.command {
        Command::Eval { fam, s } => {
            let f = fam.build()?;
            let s = parse_complex(s).or_else(|e| usage(e.to_string()))?;
            let fv = f.f(s)?;
            let orig = f.original(s)?;
            let h = f.h_eval(s)?;
            let hr = f.h_reflected(s)?;
            let ratio = f.ratio(s).ok();
            let body = json!({
                "family": f.label(), "s": cplx(s), "f": cplx(fv), "original": cplx(orig), "h": cplx(h),
                "h_reflected": cplx(hr), "ratio": ratio.map(cplx),
            });
            let mut rows = vec![
                vec![Cell::Text("f".into()), Cell::Num(fv.re), Cell::Num(fv.im)],
                vec![Cell::Text("original".into()), Cell::Num(orig.re), Cell::Num(orig.im)],
                vec![Cell::Text("h".into()), Cell::Num(h.re), Cell::Num(h.im)],
                vec![Cell::Text("h_reflected".into()), Cell::Num(hr.re), Cell::Num(hr.im)],
            ];
            if let Some(r) = ratio {
                rows.push(vec![Cell::Text("ratio".into()), Cell::Num(r.re), Cell::Num(r.im)]);
            }
            Doc::new("eval", body)
                .table(vec!["quantity", "re", "im"], rows)
                .note("family", f.label())
                .note("s", format!("{}{}{}i", fmt12(s.re), if s.im < 0.0 { "" } else { "+" }, fmt12(s.im)))
        }
        Command::Trace { fam, tau_min, step } => {
            let f = fam.build()?;
            let height = fam.height(30.0);
            if !(height > *tau_min) {
                return usage("the height must exceed --tau-min");
            }
            let tr = trace_phase(&f.h, *tau_min, height, cli.tol)?;
            let rep = integer_point_report(&tr, f.sign)?;
            let off = rep.offset;
            let samples: Vec<(f64, f64)> = match step {
                Some(h) if *h > 0.0 => {
                    let n = ((height - tau_min) / h).floor() as usize;
                    (0..=n)
                        .map(|k| {
                            let t = tau_min + k as f64 * h;
                            tr.phi_at(t).map(|p| (t, p))
                        })
                        .collect::<Result<_, _>>()?
                }
                Some(_) => return usage("--step must be positive"),
                None => tr.samples.clone(),
            };
            let pi = std::f64::consts::PI;
            let rows = samples
                .iter()
                .map(|&(t, p)| vec![Cell::Num(t), Cell::Num(p), Cell::Num(p / pi - off)])
                .collect();
            let body = json!({
                "family": f.label(), "tol": cli.tol, "offset": off, "k": rep.k, "d": rep.d, "d_stable": rep.d_stable,
                "integer_points": rep.points, "samples": samples.iter().map(|&(t, p)| json!([t, p, p / pi - off])).collect::<Vec<_>>(),
            });
            Doc::new("trace", body)
                .table(vec!["tau", "phi", "u"], rows)
                .note("family", f.label())
                .note("tol", fmt12(cli.tol))
                .note("k", rep.k)
                .note("integer_points", rep.points.iter().map(|p| fmt12(p.tau)).collect::<Vec<_>>().join(" "))
        }
        Command::Report { fam, strip } => {
            let f = fam.build()?;
            let t = fam.height(30.0);
            let r = match strip {
                Some(s0) => count_strip(&f, t, *s0)?,
                None => count_N(&f, t)?,
            };
            let bound_violated = strip.is_none() && !(r.bound_ok && r.reduced_bound_ok);
            let code = if bound_violated {
                3
            } else if !r.invariants_ok() {
                4
            } else {
                0
            };
            let verdict = if code != 0 {
                "violated".to_string()
            } else if r.all_on_line_and_simple() && r.inventory.n_f_right == 0 {
                "all zeros on the line and simple".to_string()
            } else if r.all_on_line_and_simple() {
                format!("non-real zeros on the line and simple, {} real zeros right of the axis", r.inventory.n_f_right)
            } else {
                format!("bound holds, {} off-line pairs", fmt12(r.off_line_pairs()))
            };
            let mut body = serde_json::to_value(&r).expect("report serializes");
            body["verdict"] = json!(verdict);
            let doc = Doc::new("report", body)
                .table(ZERO_COLUMNS.to_vec(), zero_rows(&r.line_zeros))
                .note("family", f.label())
                .note("T", fmt12(r.t))
                .note("N", r.n)
                .note("N0", r.n0)
                .note("N0_prime", r.n0_prime)
                .note("B_a", fmt12(r.b_a))
                .note("real_zeros_right", r.inventory.n_f_right)
                .note("verdict", &verdict);
            return Ok((doc, code));
        }
        Command::Locate { fam, rect, real } => {
            let f = fam.build()?;
            let zs = match (rect, real) {
                (Some(b), None) => {
                    if b.len() != 4 || !(b[0] < b[1] && b[2] < b[3]) {
                        return usage("--box needs sigma_lo < sigma_hi and tau_lo < tau_hi");
                    }
                    offline_zeros(&f, Rect::new(b[0], b[1], b[2], b[3]))?
                }
                (None, Some(r)) if r.len() == 2 && r[0] < r[1] => real_zeros(&f, r[0], r[1])?,
                (None, Some(_)) => return usage("--real needs lo,hi with lo < hi"),
                (None, None) => line_zeros(&f, fam.height(30.0))?,
                _ => return usage("give at most one of --box and --real"),
            };
            let body = json!({ "family": f.label(), "zeros": zs });
            Doc::new("locate", body)
                .table(ZERO_COLUMNS.to_vec(), zero_rows(&zs))
                .note("family", f.label())
                .note("count", zs.len())
        }
        Command::Solve { bracket, window, .. } if bracket.len() != 2 || window.len() != 2 => {
            return usage("--bracket and --window take two numbers each")
        }
        Command::Solve { target, q, bracket, window } => match target {
            SolveTarget::AlphaStar => {
                let r = solve_alpha_star()?;
                solved("alpha_star", r.parameter, r.certificate, None)
            }
            SolveTarget::YStar => {
                let q = RealPolynomial::new(q.clone().unwrap_or_else(|| vec![1.0])).or_else(|e| usage(e.to_string()))?;
                let r = solve_y_star(&q)?;
                solved("y_star", r.parameter, r.certificate, None)
            }
            SolveTarget::DoubleZero => {
                let dz = solve_double_zero(plus_translate, (bracket[0], bracket[1]), (window[0], window[1]))?;
                solved("double_zero_alpha", dz.alpha, dz.certificate, Some(dz.tau0))
            }
        },
        Command::Figure { name } => figure(*name, cli.tol)?,
        Command::Verify { poly, corpus, y, height } => return verify(poly.as_deref(), *corpus, *y, *height, cli.seed),
    };
    Ok((doc, 0))
}

fn plus_translate(alpha: f64) -> critline::Result<SymmetricFamily> {
    zeta_translate(alpha, true, Sign::Plus)
}

fn solved(name: &str, value: f64, certificate: f64, tau0: Option<f64>) -> Doc {
    let mut body = json!({ "name": name, "value": value, "certificate": certificate });
    let mut rows = vec![vec![Cell::Text(name.into()), Cell::Num(value), Cell::Num(certificate)]];
    if let Some(t) = tau0 {
        body["tau0"] = json!(t);
        rows.push(vec![Cell::Text("tau0".into()), Cell::Num(t), Cell::Num(certificate)]);
    }
    Doc::new("solve", body).table(vec!["name", "value", "certificate"], rows)
}

fn figure(name: FigureName, tol: f64) -> Res<Doc> {
    match name {
        FigureName::ROfAlpha => {
            let pts = (0..=945)
                .map(|k| {
                    let a = 0.55 + 0.01 * k as f64;
                    r_of_alpha(a).map(|r| (a, r))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(xy_doc("r_of_alpha", ["alpha", "r"], &pts))
        }
        FigureName::UOfTau => {
            let f = plus_translate(0.6)?;
            let tr = trace_phase(&f.h, 0.0, 21.0, tol)?;
            let off = f.offset();
            let pts = (0..=2100)
                .map(|k| {
                    let t = 0.01 * k as f64;
                    tr.phi_at(t).map(|p| (t, p / std::f64::consts::PI - off))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(xy_doc("u_of_tau", ["tau", "u"], &pts))
        }
    }
}

fn xy_doc(name: &str, cols: [&'static str; 2], pts: &[(f64, f64)]) -> Doc {
    let body = json!({ "name": name, "columns": cols, "points": pts.iter().map(|p| json!([p.0, p.1])).collect::<Vec<_>>() });
    Doc::new("figure", body)
        .table(cols.to_vec(), pts.iter().map(|p| vec![Cell::Num(p.0), Cell::Num(p.1)]).collect())
        .note("figure", name)
}

/// Necessary conditions for stability, each on its own.
fn hb_checks(p: &RealPolynomial) -> Res<Value> {
    let (q, r) = hb_split(p);
    let interlacing = interlacing_check(&q, &r)?;
    // symmetric in tau so real zeros sit inside, not on the edge; a zero on
    // the contour is a zero right of the axis
    let rect = Rect::new(0.1, 5.0, -20.0, 20.0);
    let empty = |sign| match hb_offline_empty(p, sign, rect) {
        Err(critline::Error::BoundaryTooClose(_)) => Ok(false),
        r => r,
    };
    let on_line_plus = empty(Sign::Plus)?;
    let on_line_minus = empty(Sign::Minus)?;
    Ok(json!({
        "coefficients": p.coeffs(),
        "stable": is_stable(p)?,
        "interlacing": interlacing,
        "stodola": stodola(p),
        "phase_limit": phase_limit_check(p, 1e3, 0.05)?,
        "offline_empty_plus": on_line_plus,
        "offline_empty_minus": on_line_minus,
    }))
}

fn all_pass(v: &Value) -> bool {
    ["interlacing", "stodola", "phase_limit", "offline_empty_plus", "offline_empty_minus"]
        .iter()
        .all(|k| v[k] == json!(true))
}

fn random_stable(rng: &mut ChaCha8Rng) -> RealPolynomial {
    let target = rng.gen_range(1..=8);
    let mut p = RealPolynomial::one();
    while p.degree() < target {
        let coeffs = if target - p.degree() >= 2 && rng.gen_bool(0.5) {
            let (b, w): (f64, f64) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            vec![b * b + w * w, 2.0 * b, 1.0]
        } else {
            vec![rng.gen_range(0.1..3.0), 1.0]
        };
        p = p.mul(&RealPolynomial::new(coeffs).expect("monic"));
    }
    p
}

fn verify(poly: Option<&[f64]>, corpus: Option<usize>, y: Option<f64>, height: f64, seed: u64) -> Res<(Doc, u8)> {
    let (mut body, rows, ok) = match (poly, corpus) {
        (Some(c), _) => {
            let p = RealPolynomial::new(c.to_vec()).or_else(|e| usage(e.to_string()))?;
            if p.degree() == 0 {
                return usage("--poly needs degree at least 1");
            }
            let v = hb_checks(&p)?;
            let stable = v["stable"] == json!(true);
            // an unstable polynomial is expected to fail something
            let ok = all_pass(&v) == stable;
            let row = vec![Cell::Int(0), Cell::Bool(stable), Cell::Bool(all_pass(&v))];
            (json!({ "checks": [v] }), vec![row], ok)
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut checks = Vec::with_capacity(n);
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let v = hb_checks(&random_stable(&mut rng))?;
                rows.push(vec![Cell::Int(i as i64), Cell::Bool(v["stable"] == json!(true)), Cell::Bool(all_pass(&v))]);
                checks.push(v);
            }
            let ok = checks.iter().all(all_pass);
            (json!({ "seed": seed, "checks": checks }), rows, ok)
        }
        (None, None) => return usage("give --poly or --corpus"),
    };
    let mut ok = ok;
    if let (Some(y), Some(c)) = (y, poly) {
        let p = RealPolynomial::new(c.to_vec()).or_else(|e| usage(e.to_string()))?;
        let mut perturbed = Vec::new();
        for sign in [Sign::Plus, Sign::Minus] {
            let r = perturbed_family_check(&p, y, height, sign)?;
            ok &= r.window_ok && r.window_lower_ok;
            perturbed.push(serde_json::to_value(&r).expect("report serializes"));
        }
        body["perturbed"] = Value::Array(perturbed);
    }
    body["passed"] = json!(ok);
    let doc = Doc::new("verify", body)
        .table(vec!["index", "stable", "necessary_conditions"], rows)
        .note("passed", ok);
    Ok((doc, if ok { 0 } else { 3 }))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if !(cli.tol > 0.0) {
        eprintln!("error: tolerance must be positive");
        return ExitCode::from(2);
    }
    let format = cli.format.unwrap_or(match cli.command {
        Command::Figure { .. } => Format::Csv,
        _ => Format::Json,
    });
    match run(&cli) {
        Ok((doc, code)) => {
            let text = doc.render(format);
            let written = match &cli.output {
                Some(path) => std::fs::write(path, text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
