//! The three subcommands: curve sweeps, envelope assembly, verification.

use std::fs;
use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use qtradeoff::curve::{
    fidelities, g_at_max_f_report, sweep, sweep_point, uniform_g_grid, uniform_x_grid, CurveResult,
};
use qtradeoff::eigen::spectrum_conjecture_report;
use qtradeoff::stripe::{quadratic_forms, relevant_k_range, StripeIndex, StripeVector};
use qtradeoff::verify::{
    analytic_fg, completeness_check, estimate_fidelities, k_tau_check, mixed_fg, promote,
    EstimateOptions, OperationElement,
};

use crate::config::{OutputFormat, RunConfig};
use crate::output::{fmt_float, write_atomic, write_json, CsvTable};
use crate::svg::{Plot, Series};

/// Failure with the exit code it maps to.
#[derive(Debug)]
pub struct AppError {
    pub code: i32,
    pub message: String,
}

impl AppError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 3,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<qtradeoff::Error> for AppError {
    fn from(e: qtradeoff::Error) -> Self {
        Self {
            code: 1,
            message: format!("computation failed: {e}"),
        }
    }
}

fn prepare_output_dir(config: &RunConfig) -> Result<(), AppError> {
    fs::create_dir_all(&config.output_dir)?;
    Ok(())
}

fn shifts_for(config: &RunConfig, n: u32) -> Vec<i32> {
    config.k_list.clone().unwrap_or_else(|| relevant_k_range(n))
}

#[derive(Serialize)]
struct CurvePointRecord {
    x: f64,
    /// None encodes the x = 1 limit where the multiplier diverges.
    lambda: Option<f64>,
    f: f64,
    g: f64,
    #[serde(rename = "F")]
    big_f: f64,
    #[serde(rename = "G")]
    big_g: f64,
    eigenvalue: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct CurveRecord {
    k: i32,
    points: Vec<CurvePointRecord>,
}

fn curve_records(curve: &CurveResult) -> CurveRecord {
    CurveRecord {
        k: curve.k,
        points: curve
            .points
            .iter()
            .map(|p| CurvePointRecord {
                x: p.x,
                lambda: p.lambda.is_finite().then_some(p.lambda),
                f: p.f,
                g: p.g,
                big_f: p.op_fidelity,
                big_g: p.est_fidelity,
                eigenvalue: p.top_eigenvalue,
                degenerate: p.degenerate,
            })
            .collect(),
    }
}

/// Rescales (G, F) onto [0, 1] x [0, 1]: (G - 1/2)/(G_max - 1/2) with
/// G_max = (N+1)/(N+2), and likewise for F with F_max = 1.
fn rescale_relative(n: u32, big_g: f64, big_f: f64) -> (f64, f64) {
    let g_max = (n as f64 + 1.0) / (n as f64 + 2.0);
    ((big_g - 0.5) / (g_max - 0.5), (big_f - 0.5) / 0.5)
}

const CURVE_HEADER: [&str; 9] = [
    "k",
    "x",
    "lambda",
    "f",
    "g",
    "F",
    "G",
    "eigenvalue",
    "degenerate",
];

pub fn cmd_curve(config: &RunConfig) -> Result<(), AppError> {
    prepare_output_dir(config)?;
    let x_grid = uniform_x_grid(config.x_points);
    for &n in &config.n {
        let mut curves = Vec::new();
        for k in shifts_for(config, n) {
            curves.push(sweep(n, k, &x_grid)?);
        }

        let base: PathBuf = config.output_dir.join(format!("curve_n{n}"));
        match config.format {
            OutputFormat::Csv => {
                let mut table = CsvTable::new(&CURVE_HEADER);
                for curve in &curves {
                    for p in &curve.points {
                        table.row(&[
                            curve.k.to_string(),
                            fmt_float(p.x),
                            fmt_float(p.lambda),
                            fmt_float(p.f),
                            fmt_float(p.g),
                            fmt_float(p.op_fidelity),
                            fmt_float(p.est_fidelity),
                            fmt_float(p.top_eigenvalue),
                            p.degenerate.to_string(),
                        ]);
                    }
                }
                write_atomic(&base.with_extension("csv"), table.contents())?;
            }
            OutputFormat::Json => {
                let records: Vec<CurveRecord> = curves.iter().map(curve_records).collect();
                write_json(&base.with_extension("json"), "curve", config, records)?;
            }
        }

        let series: Vec<Series> = curves
            .iter()
            .enumerate()
            .map(|(i, curve)| Series {
                label: format!("k = {}", curve.k),
                style: i,
                points: curve
                    .points
                    .iter()
                    .map(|p| {
                        if config.relative {
                            rescale_relative(n, p.est_fidelity, p.op_fidelity)
                        } else {
                            (p.est_fidelity, p.op_fidelity)
                        }
                    })
                    .collect(),
            })
            .collect();
        let title = format!("Fidelity trade-off curves, N = {n}");
        let plot = if config.relative {
            Plot::relative(title, series)
        } else {
            Plot::absolute(title, series)
        };
        write_atomic(&base.with_extension("svg"), &plot.render())?;
        println!("wrote {}", base.display());
    }
    Ok(())
}

const ENVELOPE_HEADER: [&str; 5] = ["g", "best_f", "argmax_k", "F", "G"];

#[derive(Serialize)]
struct EnvelopeRecord {
    n: u32,
    rows: Vec<EnvelopeRow>,
}

#[derive(Serialize)]
struct EnvelopeRow {
    g: f64,
    best_f: f64,
    argmax_k: i32,
    #[serde(rename = "F")]
    big_f: f64,
    #[serde(rename = "G")]
    big_g: f64,
}

pub fn cmd_envelope(config: &RunConfig) -> Result<(), AppError> {
    prepare_output_dir(config)?;
    let x_grid = uniform_x_grid(config.x_points);
    let mut family: Vec<Series> = Vec::new();
    for (i, &n) in config.n.iter().enumerate() {
        let g_grid = uniform_g_grid(n, config.x_points);
        let env = qtradeoff::curve::envelope_with_x_grid(n, &g_grid, &x_grid)?;
        let rows: Vec<EnvelopeRow> = env
            .g_grid
            .iter()
            .zip(env.best_f.iter().zip(&env.argmax_k))
            .map(|(&g, (&best_f, &argmax_k))| {
                let (big_f, big_g) = fidelities(n, best_f, g);
                EnvelopeRow {
                    g,
                    best_f,
                    argmax_k,
                    big_f,
                    big_g,
                }
            })
            .collect();

        let base = config.output_dir.join(format!("envelope_n{n}"));
        match config.format {
            OutputFormat::Csv => {
                let mut table = CsvTable::new(&ENVELOPE_HEADER);
                for row in &rows {
                    table.row(&[
                        fmt_float(row.g),
                        fmt_float(row.best_f),
                        row.argmax_k.to_string(),
                        fmt_float(row.big_f),
                        fmt_float(row.big_g),
                    ]);
                }
                write_atomic(&base.with_extension("csv"), table.contents())?;
            }
            OutputFormat::Json => {
                write_json(
                    &base.with_extension("json"),
                    "envelope",
                    config,
                    EnvelopeRecord { n, rows },
                )?;
            }
        }
        println!("wrote {}", base.display());

        family.push(Series {
            label: format!("N = {n}"),
            style: i,
            points: env
                .g_grid
                .iter()
                .zip(&env.best_f)
                .map(|(&g, &f)| {
                    let (big_f, big_g) = fidelities(n, f, g);
                    if config.relative {
                        rescale_relative(n, big_g, big_f)
                    } else {
                        (big_g, big_f)
                    }
                })
                .collect(),
        });
    }
    let title = "Allowed fidelity region boundaries".to_string();
    let plot = if config.relative {
        Plot::relative(title, family)
    } else {
        Plot::absolute(title, family)
    };
    let svg_path = config.output_dir.join("envelope.svg");
    write_atomic(&svg_path, &plot.render())?;
    println!("wrote {}", svg_path.display());
    Ok(())
}

#[derive(Serialize)]
struct CheckRecord {
    name: String,
    kind: &'static str,
    /// None for report-only entries.
    pass: Option<bool>,
    details: serde_json::Value,
}

fn hard(name: &str, pass: bool, details: serde_json::Value) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        kind: "hard",
        pass: Some(pass),
        details,
    }
}

fn report(name: &str, details: serde_json::Value) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        kind: "report",
        pass: None,
        details,
    }
}

/// Runs the verification suite for each configured N and writes one JSON
/// report per N. Returns false if any hard check failed.
pub fn cmd_verify(config: &RunConfig) -> Result<bool, AppError> {
    prepare_output_dir(config)?;
    let mut all_pass = true;
    for &n in &config.n {
        if n > 8 {
            return Err(AppError::usage(format!(
                "verify is limited to N <= 8 (Monte-Carlo oracle scale), got {n}"
            )));
        }
        let mut checks: Vec<CheckRecord> = Vec::new();
        let mut rng = StdRng::seed_from_u64(config.seed);

        // Two independent evaluation routes for (f, g) on random stripes.
        let mut worst_f: f64 = 0.0;
        let mut worst_g: f64 = 0.0;
        for _ in 0..200 {
            let ks = relevant_k_range(n);
            let k = ks[rng.gen_range(0..ks.len())];
            let idx = StripeIndex::new(n, k).map_err(AppError::from)?;
            let a = StripeVector::random_unit(idx, &mut rng);
            let q = quadratic_forms(&a);
            let op = OperationElement::from_stripe(&a)?;
            let (f, g) = analytic_fg(&op)?;
            worst_f = worst_f.max((f - q.f).abs());
            worst_g = worst_g.max((g - q.g).abs());
        }
        let pass = worst_f < 1e-11 && worst_g < 1e-11;
        all_pass &= pass;
        checks.push(hard(
            "path_equivalence",
            pass,
            json!({"stripes": 200, "max_f_deviation": worst_f, "max_g_deviation": worst_g}),
        ));

        // Weighted projector integrals against their closed forms.
        for tau in [-1i32, 0, 1] {
            let r = k_tau_check(n, tau, config.samples, config.seed + (tau + 2) as u64)?;
            all_pass &= r.deviation.passes_3sigma;
            checks.push(hard(
                &format!("projector_integral_tau_{tau}"),
                r.deviation.passes_3sigma,
                json!({
                    "samples": r.deviation.samples,
                    "max_abs_deviation": r.deviation.max_abs_deviation,
                    "max_sigma_ratio": r.deviation.max_sigma_ratio,
                }),
            ));
        }

        // Completeness of the constructed operation for random elements.
        for trial in 0..3u64 {
            let ks = relevant_k_range(n);
            let k = ks[rng.gen_range(0..ks.len())];
            let idx = StripeIndex::new(n, k).map_err(AppError::from)?;
            let a = StripeVector::random_unit(idx, &mut rng);
            let op = OperationElement::from_stripe(&a)?;
            let r = completeness_check(&op, config.samples, config.seed + 10 + trial)?;
            all_pass &= r.deviation.passes_3sigma;
            checks.push(hard(
                &format!("completeness_{trial}"),
                r.deviation.passes_3sigma,
                json!({
                    "k": k,
                    "samples": r.deviation.samples,
                    "max_abs_deviation": r.deviation.max_abs_deviation,
                    "max_sigma_ratio": r.deviation.max_sigma_ratio,
                }),
            ));
        }

        // Promotion from every lower subspace (needs N >= 2).
        if n >= 2 {
            let mut worst_gap: f64 = f64::NEG_INFINITY;
            let mut instances = 0;
            while instances < 25 {
                let step = rng.gen_range(1..=n / 2);
                let two_jp = n - 2 * step;
                let source = qtradeoff::matrix::ComplexMatrix::from_real_fn(
                    two_jp as usize + 1,
                    n as usize + 1,
                    |_, _| rng.gen::<f64>(),
                );
                let (f_src, g_src) = mixed_fg(&source, two_jp, n)?;
                if g_src < 0.0 {
                    continue;
                }
                let promoted = promote(&source, n, two_jp)?;
                let (f_new, _) = analytic_fg(&promoted)?;
                let gain = (n - two_jp) as f64 / 2.0 * g_src;
                worst_gap = worst_gap.max(f_src + gain - f_new);
                instances += 1;
            }
            let pass = worst_gap <= 1e-10;
            all_pass &= pass;
            checks.push(hard(
                "promotion_inequality",
                pass,
                json!({"instances": instances, "worst_violation": worst_gap}),
            ));
        }

        // Monte-Carlo closure of the optimized curve.
        for (i, x) in [0.0, 0.5, 1.0].into_iter().enumerate() {
            let (point, a) = sweep_point(n, 0, x)?;
            let op = OperationElement::from_stripe(&a)?;
            let est = estimate_fidelities(
                &op,
                &EstimateOptions::new(config.samples, config.seed + 20 + i as u64),
            )?;
            let f_ok = (est.operation.mean - point.op_fidelity).abs()
                <= 3.0 * est.operation.std_error + 1e-12;
            let g_ok = (est.estimation.mean - point.est_fidelity).abs()
                <= 3.0 * est.estimation.std_error + 1e-12;
            all_pass &= f_ok && g_ok;
            checks.push(hard(
                &format!("fidelity_closure_x{x}"),
                f_ok && g_ok,
                json!({
                    "F_curve": point.op_fidelity,
                    "F_estimated": est.operation.mean,
                    "F_std_error": est.operation.std_error,
                    "G_curve": point.est_fidelity,
                    "G_estimated": est.estimation.mean,
                    "G_std_error": est.estimation.std_error,
                    "samples": config.samples,
                }),
            ));
        }

        // Conjecture reports: emitted, never asserted.
        for &k in &relevant_k_range(n) {
            let s = spectrum_conjecture_report(n, k)?;
            checks.push(report(
                &format!("spectrum_candidate_set_k{k}"),
                json!({
                    "eigenvalues": s.eigenvalues,
                    "candidate_values": s.candidate_values,
                    "max_abs_deviation": s.max_abs_deviation,
                    "top_eigenvalue": s.top_eigenvalue,
                    "top_candidate": s.top_candidate,
                }),
            ));
            let g = g_at_max_f_report(n, k)?;
            checks.push(report(
                &format!("g_at_max_f_k{k}"),
                json!({
                    "g_at_max_f": g.g_at_max_f,
                    "conjectured": g.conjectured,
                    "deviation": g.deviation,
                }),
            ));
        }

        let n_pass = checks.iter().all(|c| c.pass.unwrap_or(true));
        let path = config.output_dir.join(format!("verify_n{n}.json"));
        #[derive(Serialize)]
        struct VerifyResults {
            pass: bool,
            checks: Vec<CheckRecord>,
        }
        write_json(
            &path,
            "verify",
            config,
            VerifyResults {
                pass: n_pass,
                checks,
            },
        )?;
        println!(
            "wrote {} ({})",
            path.display(),
            if n_pass { "pass" } else { "FAIL" }
        );
    }
    Ok(all_pass)
}
