use kronmle::algebra::{family_system, Quadratic};
use kronmle::Error;
use serde::Serialize;

use crate::cli::{Format, MultiplicityArgs};
use crate::report::{csv_rows, emit, json, CliError, CliResult};

#[derive(Serialize)]
struct Report {
    case: String,
    m2: i64,
    k: i64,
    /// Empty when the pair budget ran out.
    count: Option<usize>,
    timeout_pairs: Option<usize>,
    lower: usize,
    upper: usize,
    within_bounds: Option<bool>,
    quadratic: String,
    /// The `b = 0` branch read off the system, up to a constant factor.
    system_quadratic: String,
    quadratic_matches: bool,
    discriminant: String,
    roots: String,
}

fn fmt_root((re, im): (f64, f64)) -> String {
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!(
            "{re:.6}{}{:.6}i",
            if im < 0.0 { "-" } else { "+" },
            im.abs()
        )
    }
}

pub fn run(args: &MultiplicityArgs) -> CliResult {
    let system = family_system(args.m2, args.k, args.case)?;
    let (count, timeout_pairs) = match system.solution_count(args.pair_budget) {
        Ok(c) => (Some(c), None),
        Err(Error::Timeout(p)) => (None, Some(p)),
        Err(e) => return Err(e.into()),
    };
    let quadratic = Quadratic::closed_form(args.m2, args.k, args.case)?;
    let from_system = system.b0_equation();
    let (lower, upper) = (2, args.case.max_solutions());
    let report = Report {
        case: args.case.to_string(),
        m2: args.m2,
        k: args.k,
        count,
        timeout_pairs,
        lower,
        upper,
        within_bounds: count.map(|c| (lower..=upper).contains(&c)),
        quadratic: quadratic.to_string(),
        system_quadratic: from_system.to_string(),
        quadratic_matches: from_system.proportional_to(&quadratic),
        discriminant: quadratic.discriminant().to_string(),
        roots: quadratic
            .roots()
            .into_iter()
            .map(fmt_root)
            .collect::<Vec<_>>()
            .join(" "),
    };
    let text = match args.output.format {
        Format::Json => json(&report)?,
        Format::Csv => csv_rows(&[&report])?,
        Format::Text => {
            let count_line = match (count, timeout_pairs) {
                (Some(c), _) => c.to_string(),
                (_, Some(p)) => format!("timeout after {p} pairs"),
                _ => unreachable!(),
            };
            let bound = match report.within_bounds {
                Some(true) => format!("within [{lower}, {upper}]"),
                Some(false) => format!("OUTSIDE [{lower}, {upper}]"),
                None => "not checked".into(),
            };
            format!(
                "case {} (m2 = {}, k = {})\nsolutions (with multiplicity): {count_line}\nb = 0 quadratic: {}{}\ndiscriminant: {}\nroots: {}\nbound check: {bound}\n",
                report.case,
                report.m2,
                report.k,
                report.quadratic,
                if report.quadratic_matches { "" } else { " (MISMATCH with the system)" },
                report.discriminant, report.roots
            )
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    if !report.quadratic_matches {
        return Err(CliError::Failed(format!(
            "system branch {} is not proportional to {}",
            from_system, quadratic
        )));
    }
    if report.within_bounds == Some(false) {
        return Err(CliError::Failed(format!(
            "solution count outside [{lower}, {upper}]"
        )));
    }
    Ok(())
}
