use kronmle::algebra::likelihood::sample_integer_data;
use kronmle::model::{sample_matrix_normal, thresholds};
use kronmle::numeric::{rational_to_f64, Matrix};
use serde::Serialize;

use crate::cli::{Format, SampleArgs};
use crate::report::{emit, json, CliError, CliResult};

#[derive(Serialize)]
struct Summary {
    m1: usize,
    m2: usize,
    n: usize,
    k: i64,
    seed: u64,
    threshold_lower: f64,
    threshold_upper: u64,
}

pub fn run(args: &SampleArgs) -> CliResult {
    let (m1, m2, n) = (args.m1, args.m2, args.n);
    if m1 == 0 || m2 == 0 || n == 0 {
        return Err(CliError::Usage(
            "--m1, --m2 and --n must be positive".into(),
        ));
    }
    let text = if args.integer {
        sample_integer_data(m1, m2, n, args.seed)?.to_text()
    } else {
        sample_matrix_normal(&Matrix::identity(m1), &Matrix::identity(m2), n, args.seed)?.to_text()
    };
    let bounds = thresholds(m1 as u64, m2 as u64);
    let summary = Summary {
        m1,
        m2,
        n,
        k: (n * m2) as i64 - m1 as i64,
        seed: args.seed,
        threshold_lower: rational_to_f64(&bounds.lower),
        threshold_upper: bounds.upper,
    };
    let report = match args.output.format {
        Format::Text => format!(
            "k = {}\nthreshold bounds: lower {}, upper {}\n",
            summary.k, summary.threshold_lower, summary.threshold_upper
        ),
        Format::Csv => crate::report::csv_rows(&[&summary])?,
        Format::Json => json(&summary)?,
    };
    match &args.output.out {
        Some(path) => {
            emit(Some(path), &text)?;
            print!("{report}");
        }
        None => {
            emit(None, &text)?;
            eprint!("{report}");
        }
    }
    Ok(())
}
