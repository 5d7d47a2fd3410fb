use kronmle::model::{thresholds, SampleSet};
use kronmle::numeric::{rat, Matrix, SymmetricMatrix};
use kronmle::solvers::{exact_mle_k1, flipflop_observed, mle, FlipFlopConfig, KroneckerEstimate};
use kronmle::Error;
use num_rational::BigRational;
use serde::Serialize;

use crate::cli::{Format, MleArgs};
use crate::report::{csv_rows, emit, indent_matrix, json, read_file, rows_of, CliError, CliResult};

#[derive(Serialize)]
struct SweepRow {
    sweep: usize,
    max_abs_deviation: f64,
    loglik: f64,
}

#[derive(Serialize)]
struct Comparison {
    sweeps: usize,
    converged: bool,
    final_deviation: f64,
    trace: Vec<SweepRow>,
}

#[derive(Serialize)]
struct Report {
    m1: usize,
    m2: usize,
    n: usize,
    k: i64,
    method: String,
    loglik: f64,
    iterations: usize,
    converged: bool,
    k1: Vec<Vec<String>>,
    k2: Vec<Vec<String>>,
    comparison: Option<Comparison>,
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    method: &'a str,
    m1: usize,
    m2: usize,
    n: usize,
    k: i64,
    loglik: f64,
    iterations: usize,
    converged: bool,
}

/// Sweeps shown in the text report: the first few, then roughly
/// logarithmically spaced, plus the last.
fn shown(sweep: usize, last: usize) -> bool {
    if sweep <= 3 || sweep == last {
        return true;
    }
    let mut mark = 10;
    while mark <= sweep {
        if sweep == mark || sweep == 2 * mark || sweep == 5 * mark {
            return true;
        }
        mark *= 10;
    }
    false
}

fn compare(
    sample: &SampleSet<f64>,
    exact: &Matrix<f64>,
    config: FlipFlopConfig,
) -> CliResult<Comparison> {
    let mut trace = Vec::new();
    let est = flipflop_observed(
        sample,
        &SymmetricMatrix::identity(sample.m2()),
        config,
        |s| {
            trace.push(SweepRow {
                sweep: s.index,
                max_abs_deviation: s.k2.to_matrix().max_abs_diff(exact),
                loglik: s.loglik,
            });
        },
    )?;
    Ok(Comparison {
        sweeps: est.iterations,
        converged: est.converged,
        final_deviation: est.k2.to_matrix().max_abs_diff(exact),
        trace,
    })
}

pub fn run(args: &MleArgs) -> CliResult {
    if !(args.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let exact_sample = SampleSet::<BigRational>::from_text(&read_file(&args.input)?)?;
    let sample = exact_sample.to_f64();
    let (m1, m2, n, k) = (sample.m1(), sample.m2(), sample.n(), sample.k());
    if rat(n as i64) < thresholds(m1 as u64, m2 as u64).lower {
        return Err(Error::MleNotExists(format!(
            "n = {n} is below max(m1/m2, m2/m1) for m1 = {m1}, m2 = {m2}"
        ))
        .into());
    }
    let config = FlipFlopConfig {
        tol: args.tol,
        max_iter: args.max_iter,
    };
    let est: KroneckerEstimate = if k == 1 {
        exact_mle_k1(&sample)?
    } else {
        mle(&sample, config)?
    };
    let comparison = if k == 1 && !args.no_compare {
        Some(compare(&sample, &est.k2.to_matrix(), config)?)
    } else {
        None
    };
    if let Some(path) = &args.output.out {
        emit(Some(path), &est.to_text())?;
    }
    let report = Report {
        m1,
        m2,
        n,
        k,
        method: est.method.to_string(),
        loglik: est.loglik,
        iterations: est.iterations,
        converged: est.converged,
        k1: rows_of(&est.k1.to_matrix()),
        k2: rows_of(&est.k2.to_matrix()),
        comparison,
    };
    let text = match args.output.format {
        Format::Text => text_report(&report, &est),
        Format::Json => json(&report)?,
        Format::Csv => match &report.comparison {
            Some(c) => csv_rows(&c.trace)?,
            None => csv_rows(&[SummaryRow {
                method: &report.method,
                m1,
                m2,
                n,
                k,
                loglik: report.loglik,
                iterations: report.iterations,
                converged: report.converged,
            }])?,
        },
    };
    print!("{text}");
    Ok(())
}

fn text_report(r: &Report, est: &KroneckerEstimate) -> String {
    let mut s = format!(
        "m1 = {}, m2 = {}, n = {}, k = {}\nmethod: {}\nloglik: {}\n",
        r.m1, r.m2, r.n, r.k, r.method, r.loglik
    );
    if r.method != "exact" {
        s += &format!("iterations: {}\nconverged: {}\n", r.iterations, r.converged);
    }
    s += &format!(
        "K1 =\n{}K2 (det 1) =\n{}",
        indent_matrix(&est.k1.to_matrix()),
        indent_matrix(&est.k2.to_matrix())
    );
    if let Some(c) = &r.comparison {
        s += "flip-flop from K2 = I, max-abs deviation of K2 from the exact solution:\n";
        for row in c.trace.iter().filter(|row| shown(row.sweep, c.sweeps)) {
            s += &format!("  sweep {:>5}: {:.3e}\n", row.sweep, row.max_abs_deviation);
        }
        s += &format!(
            "  {} after {} sweeps, final deviation {:.3e}\n",
            if c.converged {
                "converged"
            } else {
                "not converged"
            },
            c.sweeps,
            c.final_deviation
        );
    }
    s
}
