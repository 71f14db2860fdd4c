//! Implementations of the four subcommands.

use crate::output::{self, DetectorReports, Meta, SampleRow, TraceRow};
use crate::{CommonOpts, Detector, Format, SmoothingArg, TimeOpts};
use anyhow::{anyhow, Result};
use serde_json::{json, Value};
use well_echo::*;

pub enum Outcome {
    Ok,
    CheckFailed,
}

/// Marker wrapped around configuration mistakes so `main` can map them to
/// exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

fn build_model(lambda: f64) -> Result<WellModel> {
    make_model(lambda).map_err(|e| usage(e.to_string()))
}

fn resolve_time(opts: &TimeOpts) -> Result<(TimeSpec, String)> {
    match (opts.time, opts.time_real) {
        (Some((p, q)), None) => {
            let t = reduce_time(p, q).map_err(|e| usage(e.to_string()))?;
            Ok((TimeSpec::Rational(t), t.to_string()))
        }
        (None, Some(x)) => Ok((TimeSpec::Real(x), format!("{x}"))),
        (None, None) => {
            let t = reduce_time(0, 1).unwrap();
            Ok((TimeSpec::Rational(t), t.to_string()))
        }
        _ => Err(usage("--time and --time-real are mutually exclusive")),
    }
}

fn flag_string(
    xi: f64,
    step: f64,
    reports: &DetectorReports,
) -> String {
    let mut s = String::new();
    if let Some(ps) = &reports.plateaux {
        if ps.iter().any(|p| p.interval.0 <= xi && xi <= p.interval.1) {
            s.push('p');
        }
    }
    if let Some(cs) = &reports.cusps {
        if cs.iter().any(|c| (c.xi - xi).abs() <= 0.5 * step) {
            s.push('c');
        }
    }
    if let Some(fs) = &reports.fragments {
        if fs.iter().any(|f| f.interval.0 <= xi && xi <= f.interval.1) {
            s.push('f');
        }
    }
    s
}

pub fn snapshot(
    common: &CommonOpts,
    time: &TimeOpts,
    detect: &[Detector],
    smoothing: SmoothingArg,
) -> Result<Outcome> {
    let model = build_model(common.lambda)?;
    if common.grid < 2 {
        return Err(usage("grid must have at least 2 intervals"));
    }
    let (spec_time, time_label) = resolve_time(time)?;
    let set = build_spectral_set(&model, common.epsilon).map_err(|e| usage(e.to_string()))?;
    let grid = SpatialGrid::for_model(&model, common.grid);
    let field = evaluate_wavefunction(&set, &grid, spec_time)?;
    let dens = density(&field);
    let smoothing = match smoothing {
        SmoothingArg::None => Smoothing::None,
        SmoothingArg::Sigma => Smoothing::Sigma,
    };
    let curr = current(&set, &grid, spec_time, smoothing)?;

    let mut reports = DetectorReports::none();
    for d in detect {
        match d {
            Detector::Plateaux => {
                let r = detect_plateaux(&dens, 10.0 * dens.error_bound(), 0.05)
                    .map_err(|e| usage(e.to_string()))?;
                reports.plateaux = Some(r.plateaux);
            }
            Detector::Cusps => {
                reports.cusps = Some(detect_cusps(&dens, DEFAULT_CUSP_KAPPA));
            }
            Detector::Fragments => {
                let zero_tol = (10.0 * dens.error_bound()).max(1e-9);
                reports.fragments = Some(detect_fragments(&dens, zero_tol).components);
            }
        }
    }

    let step = grid.max_step();
    let rows: Vec<SampleRow> = grid
        .points()
        .iter()
        .zip(dens.values().iter().zip(curr.values()))
        .map(|(&xi, (&d, &j))| SampleRow {
            xi,
            density: d,
            current: j,
            flag: flag_string(xi, step, &reports),
        })
        .collect();

    let meta = Meta {
        lambda: common.lambda,
        time_label,
        n_max: set.n_max(),
        error_bound: set.tail_bound(),
        epsilon: common.epsilon,
        grid_points: grid.len(),
    };
    let text = match common.format {
        Format::Csv => output::profile_csv(&meta, &rows),
        Format::Json => {
            let v = output::profile_json(&meta, &rows, &reports);
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        Format::Svg => {
            let xs: Vec<f64> = rows.iter().map(|r| r.xi).collect();
            let ds: Vec<f64> = rows.iter().map(|r| r.density).collect();
            let js: Vec<f64> = rows.iter().map(|r| r.current).collect();
            output::line_plot_svg(
                &meta,
                &format!(
                    "density and current at t = {}·T, lambda = {}",
                    meta.time_label, meta.lambda
                ),
                "xi = x/a",
                &[
                    ("a·rho", "#1f6fb2", &xs, &ds),
                    ("j·ma²/(pi·hbar)", "#c44e52", &xs, &js),
                ],
            )
        }
    };
    output::write_text(&common.out, &text)?;
    Ok(Outcome::Ok)
}

pub fn timetrace(common: &CommonOpts, xi: f64, time_steps: u64) -> Result<Outcome> {
    let model = build_model(common.lambda)?;
    if !(0.0..=common.lambda).contains(&xi) {
        return Err(usage(format!(
            "xi = {xi} outside the well [0, {}]",
            common.lambda
        )));
    }
    if time_steps < 2 {
        return Err(usage("need at least 2 time steps"));
    }
    let set = build_spectral_set(&model, common.epsilon).map_err(|e| usage(e.to_string()))?;
    let grid = SpatialGrid::new(vec![xi]).map_err(|e| usage(e.to_string()))?;

    let mut rows = Vec::with_capacity(time_steps as usize + 1);
    for i in 0..=time_steps {
        let tau = reduce_time(i, time_steps).unwrap();
        let mirror = tau.reflected();
        let d = density(&evaluate_wavefunction(&set, &grid, tau)?).values()[0];
        let j = current(&set, &grid, tau, Smoothing::None)?.values()[0];
        let dm = density(&evaluate_wavefunction(&set, &grid, mirror)?).values()[0];
        let jm = current(&set, &grid, mirror, Smoothing::None)?.values()[0];
        rows.push(TraceRow {
            tau: i as f64 / time_steps as f64,
            density: d,
            current: j,
            density_mirror: dm,
            current_mirror: jm,
        });
    }

    let meta = Meta {
        lambda: common.lambda,
        time_label: format!("0..1 in {time_steps} steps"),
        n_max: set.n_max(),
        error_bound: set.tail_bound(),
        epsilon: common.epsilon,
        grid_points: 1,
    };
    let text = match common.format {
        Format::Csv => output::trace_csv(&meta, xi, &rows),
        Format::Json => {
            let v = output::trace_json(&meta, xi, &rows);
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
        Format::Svg => {
            let ts: Vec<f64> = rows.iter().map(|r| r.tau).collect();
            let ds: Vec<f64> = rows.iter().map(|r| r.density).collect();
            let js: Vec<f64> = rows.iter().map(|r| r.current).collect();
            output::line_plot_svg(
                &meta,
                &format!("trace at xi = {xi}, lambda = {}", meta.lambda),
                "tau = t/T",
                &[
                    ("a·rho", "#1f6fb2", &ts, &ds),
                    ("j·ma²/(pi·hbar)", "#c44e52", &ts, &js),
                ],
            )
        }
    };
    output::write_text(&common.out, &text)?;
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// verify

struct Check {
    name: String,
    lambda: f64,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check(
    checks: &mut Vec<Check>,
    name: impl Into<String>,
    lambda: f64,
    value: f64,
    tolerance: f64,
) {
    checks.push(Check {
        name: name.into(),
        lambda,
        value,
        tolerance,
        pass: value.abs() <= tolerance,
    });
}

pub fn verify(lambdas: &[f64], epsilon: f64, out: &str) -> Result<Outcome> {
    let lambdas: Vec<f64> = if lambdas.is_empty() {
        vec![1.5, 2.5, 3.0, 5.5, 8.0]
    } else {
        lambdas.to_vec()
    };
    let mut checks = Vec::new();
    for &lambda in &lambdas {
        let model = build_model(lambda)?;
        let set = build_spectral_set(&model, epsilon).map_err(|e| usage(e.to_string()))?;

        // norm and mean energy: G-function route off integers, direct
        // coefficient summation always. The closed G carries a 1/sin²(πλ)
        // conditioning, so the tolerance widens next to integer λ.
        if lambda != lambda.round() {
            let s = (std::f64::consts::PI * lambda).sin();
            let tol_g = (1e-14 / (s * s)).max(1e-10);
            let (norm, energy) = norm_and_energy_via_g(lambda)?;
            check(&mut checks, "norm_via_g - 1", lambda, norm - 1.0, tol_g);
            check(&mut checks, "energy_via_g - 1", lambda, energy - 1.0, tol_g);
        }
        let big = SpectralSet::with_n_max(&model, 20_000);
        check(
            &mut checks,
            "sum c_n^2 - 1 (n_max = 2e4)",
            lambda,
            big.norm_partial() - 1.0,
            1e-3,
        );
        check(
            &mut checks,
            "mean energy - E1",
            lambda,
            mean_energy(&big) - 1.0,
            1e-6,
        );

        // series vs closed snapshots
        let grid = SpatialGrid::for_model(&model, 400);
        for (p, q) in [(1u64, 2u64), (1, 4), (1, 8)] {
            let tau = reduce_time(p, q).unwrap();
            let field = evaluate_wavefunction(&set, &grid, tau)?;
            let closed = match q {
                2 => psi_half(&model),
                4 => psi_quarter(&model),
                _ => psi_eighth(&model),
            };
            check(
                &mut checks,
                format!("sup|series - closed| at {p}/{q}"),
                lambda,
                closed.max_field_deviation(&field),
                set.tail_bound(),
            );
        }

        // time-space symmetries
        let rep = check_symmetries(&set, &grid, reduce_time(1, 5).unwrap())?;
        check(
            &mut checks,
            "symmetry deviations at 1/5",
            lambda,
            rep.max_deviation(),
            rep.tolerance,
        );
    }

    // λ-independent checks
    check(
        &mut checks,
        "momentum norm true - 1",
        f64::NAN,
        well_echo::momentum::norm_true() - 1.0,
        1e-5,
    );
    check(
        &mut checks,
        "momentum norm naive - 2",
        f64::NAN,
        well_echo::momentum::norm_naive() - 2.0,
        1e-5,
    );

    let all_pass = checks.iter().all(|c| c.pass);
    let report: Vec<Value> = checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "lambda": if c.lambda.is_nan() { Value::Null } else { json!(c.lambda) },
                "value": c.value,
                "tolerance": c.tolerance,
                "pass": c.pass,
            })
        })
        .collect();
    let doc = json!({
        "version": well_echo::VERSION,
        "epsilon": epsilon,
        "lambda_set": lambdas,
        "checks": report,
        "all_pass": all_pass,
    });
    output::write_text(out, &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
    Ok(if all_pass {
        Outcome::Ok
    } else {
        Outcome::CheckFailed
    })
}

// ---------------------------------------------------------------------------
// scan

pub fn scan(
    lambdas: &[f64],
    period_divisor: u64,
    numerators: &[u64],
    format: Format,
    out: &str,
) -> Result<Outcome> {
    if period_divisor == 0 {
        return Err(usage("period divisor must be positive"));
    }
    if format == Format::Svg {
        return Err(usage("scan emits tabular data: use csv or json"));
    }
    let ps: Vec<u64> = if numerators.is_empty() {
        (1..=period_divisor).collect()
    } else {
        numerators.to_vec()
    };
    let mut rows = Vec::new();
    for &lambda in lambdas {
        let model = build_model(lambda)?;
        for &p in &ps {
            if p > period_divisor {
                return Err(usage(format!("numerator {p} exceeds M = {period_divisor}")));
            }
            let outcome =
                conjecture_scan(&model, period_divisor, p).map_err(|e| anyhow!(e.to_string()))?;
            rows.push((lambda, p, outcome));
        }
    }
    let text = match format {
        Format::Csv => {
            let mut s = String::new();
            s.push_str(&format!(
                "# period_divisor={period_divisor}\n# version={}\n",
                well_echo::VERSION
            ));
            s.push_str("lambda,p,q_reduced,tau,peaks,components,complete\n");
            for (lambda, p, o) in &rows {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    lambda,
                    p,
                    o.tau.denominator(),
                    o.tau.value(),
                    o.peak_count,
                    o.report.components.len(),
                    o.complete
                ));
            }
            s
        }
        Format::Json => {
            let items: Vec<Value> = rows
                .iter()
                .map(|(lambda, p, o)| {
                    json!({
                        "lambda": lambda,
                        "p": p,
                        "q_reduced": o.tau.denominator(),
                        "tau": o.tau.value(),
                        "peaks": o.peak_count,
                        "components": o.report.components.len(),
                        "complete": o.complete,
                    })
                })
                .collect();
            let doc = json!({
                "version": well_echo::VERSION,
                "period_divisor": period_divisor,
                "rows": items,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        Format::Svg => unreachable!(),
    };
    output::write_text(out, &text)?;
    Ok(Outcome::Ok)
}
