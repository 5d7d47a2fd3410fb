use kronmle::canonical::CanonicalForm;
use kronmle::numeric::{rat, Matrix, RatMatrix, SymmetricMatrix};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::{Format, LemmaArgs};
use crate::report::{csv_rows, emit, json, CliError, CliResult};

#[derive(Serialize)]
struct Instance {
    instance: String,
    m1: usize,
    m2: usize,
    n: usize,
    k: usize,
    lhs: String,
    rhs: String,
    pass: bool,
}

#[derive(Serialize)]
struct Summary {
    seed: u64,
    passed: usize,
    failed: usize,
    instances: Vec<Instance>,
}

fn check(
    name: String,
    cf: &CanonicalForm<BigRational>,
    k: &SymmetricMatrix<BigRational>,
) -> CliResult<Instance> {
    let (lhs, rhs) = cf.det_reduction_check(k)?;
    Ok(Instance {
        instance: name,
        m1: cf.m1(),
        m2: cf.m2(),
        n: cf.n(),
        k: cf.k(),
        pass: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    })
}

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> RatMatrix {
    Matrix::from_fn(rows, cols, |_, _| rat(rng.gen_range(-bound..=bound)))
}

/// Dimensions with `2 <= m2 <= 4`, `1 <= k <= 4` and `m1 <= 10`.
fn random_dims(rng: &mut ChaCha8Rng) -> (usize, usize, usize) {
    loop {
        let m2 = rng.gen_range(2..=4usize);
        let k = rng.gen_range(1..=4usize);
        let n = rng.gen_range((k + 1).div_ceil(m2)..=((10 + k) / m2).max(1));
        if n * m2 > k && n * m2 - k <= 10 {
            return (n * m2 - k, m2, n);
        }
    }
}

pub fn run(args: &LemmaArgs) -> CliResult {
    let fixed = match (args.m1, args.m2, args.n) {
        (Some(m1), Some(m2), Some(n)) => {
            if m1 == 0 || m2 == 0 || n * m2 <= m1 {
                return Err(CliError::Usage(format!(
                    "need m1, m2 >= 1 and k = n*m2 - m1 >= 1 (got m1 = {m1}, m2 = {m2}, n = {n})"
                )));
            }
            Some((m1, m2, n))
        }
        _ => None,
    };
    let mut instances = Vec::with_capacity(args.instances + 1);
    let pinned = CanonicalForm::from_c(
        2,
        3,
        RatMatrix::from_i64_rows(&[[1, 2], [3, 4], [5, 6], [7, 8]]),
        rat(1),
    );
    let pinned_k = SymmetricMatrix::from_matrix(&RatMatrix::from_i64_rows(&[[3, 1], [1, 3]]))?;
    instances.push(check("example".into(), &pinned, &pinned_k)?);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    for i in 0..args.instances {
        let (m1, m2, n) = fixed.unwrap_or_else(|| random_dims(&mut rng));
        let k = n * m2 - m1;
        let cf = CanonicalForm::from_c(m2, n, int_matrix(&mut rng, m1, k, 5), rat(1));
        let b = int_matrix(&mut rng, m2, m2, 3);
        let kmat = SymmetricMatrix::from_matrix(&(&(&b * &b.transpose()) + &Matrix::identity(m2)))?;
        instances.push(check(i.to_string(), &cf, &kmat)?);
    }
    let passed = instances.iter().filter(|i| i.pass).count();
    let summary = Summary {
        seed: args.seed,
        passed,
        failed: instances.len() - passed,
        instances,
    };
    let text = match args.output.format {
        Format::Json => json(&summary)?,
        Format::Csv => csv_rows(&summary.instances)?,
        Format::Text => {
            let ex = &summary.instances[0];
            let mut s = format!(
                "pinned example (m1 = 4, m2 = 2, n = 3, K = [[3, 1], [1, 3]]): lhs = {}, rhs = {}, {}\n",
                ex.lhs,
                ex.rhs,
                if ex.pass { "pass" } else { "FAIL" }
            );
            for inst in summary.instances[1..].iter().filter(|i| !i.pass) {
                s += &format!(
                    "instance {} (m1 = {}, m2 = {}, n = {}): lhs = {}, rhs = {} FAIL\n",
                    inst.instance, inst.m1, inst.m2, inst.n, inst.lhs, inst.rhs
                );
            }
            let random_pass = summary.instances[1..].iter().filter(|i| i.pass).count();
            s += &format!(
                "random instances: {random_pass} passed, {} failed\n",
                args.instances - random_pass
            );
            s
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    if summary.failed > 0 {
        return Err(CliError::Failed(format!(
            "{} instances failed",
            summary.failed
        )));
    }
    Ok(())
}
