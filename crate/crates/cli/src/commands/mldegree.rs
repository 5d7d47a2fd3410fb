use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use kronmle::algebra::{ml_degree, MlDegree};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::{parse_range, Format, MlDegreeArgs};
use crate::report::{csv_rows, emit, json, read_file, CliError, CliResult};

/// One cell of the table. `degree` is empty on timeout or error.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub m1: u64,
    pub n: u64,
    pub seed: u64,
    pub status: String,
    pub degree: Option<u64>,
    pub pairs: Option<usize>,
    pub pair_budget: usize,
    pub seconds: f64,
    #[serde(default)]
    pub cached: bool,
}

impl Cell {
    fn key(&self) -> (u64, u64, u64) {
        (self.m1, self.n, self.seed)
    }

    fn marker(&self) -> String {
        match (self.status.as_str(), self.degree) {
            ("timeout", _) => "timeout".into(),
            ("error", _) => "error".into(),
            (_, Some(d)) => d.to_string(),
            _ => "?".into(),
        }
    }

    /// A cached timeout is only reused when the budget has not grown.
    fn reusable(&self, budget: usize) -> bool {
        match self.status.as_str() {
            "timeout" => self.pair_budget >= budget,
            "error" => false,
            _ => true,
        }
    }
}

fn compute(m1: u64, n: u64, seed: u64, budget: usize) -> Cell {
    let start = Instant::now();
    let outcome = ml_degree(m1 as usize, n as usize, seed, budget);
    let seconds = start.elapsed().as_secs_f64();
    let (status, degree, pairs) = match outcome {
        Ok(MlDegree::Degree(d)) => ("ok", Some(d), None),
        Ok(MlDegree::Degenerate) => ("degenerate", Some(0), None),
        Ok(MlDegree::Timeout(p)) => ("timeout", None, Some(p)),
        Err(_) => ("error", None, None),
    };
    Cell {
        m1,
        n,
        seed,
        status: status.into(),
        degree,
        pairs,
        pair_budget: budget,
        seconds,
        cached: false,
    }
}

fn load_cache(path: &Path) -> CliResult<BTreeMap<(u64, u64, u64), Cell>> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let cells: Vec<Cell> = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(cells.into_iter().map(|c| (c.key(), c)).collect())
}

fn pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KRONMLE_WORKERS") {
        let workers: usize = v.parse().ok().filter(|&w| w > 0).ok_or_else(|| {
            CliError::Usage(format!(
                "KRONMLE_WORKERS must be a positive integer, got {v:?}"
            ))
        })?;
        builder = builder.num_threads(workers);
    }
    builder.build().map_err(|e| CliError::Io(e.to_string()))
}

pub fn run(args: &MlDegreeArgs) -> CliResult {
    if args.m2 != 2 {
        return Err(CliError::Usage(format!(
            "the ML-degree pipeline needs m2 = 2, got {}",
            args.m2
        )));
    }
    let m1s = parse_range(&args.m1).map_err(CliError::Usage)?;
    let ns = parse_range(&args.n).map_err(CliError::Usage)?;
    let seeds = parse_range(&args.seed).map_err(CliError::Usage)?;
    if m1s.contains(&0) || ns.contains(&0) {
        return Err(CliError::Usage("m1 and n must be positive".into()));
    }
    let mut cache = match &args.cache {
        Some(p) => load_cache(p)?,
        None => BTreeMap::new(),
    };
    let mut keys = Vec::new();
    for &m1 in &m1s {
        for &n in &ns {
            keys.extend(seeds.iter().map(|&s| (m1, n, s)));
        }
    }
    let todo: Vec<(u64, u64, u64)> = keys
        .iter()
        .copied()
        .filter(|k| !cache.get(k).is_some_and(|c| c.reusable(args.pair_budget)))
        .collect();
    let budget = args.pair_budget;
    let fresh: Vec<Cell> = pool()?.install(|| {
        todo.par_iter()
            .map(|&(m1, n, s)| compute(m1, n, s, budget))
            .collect()
    });
    for cell in &fresh {
        cache.insert(cell.key(), cell.clone());
    }
    if let Some(path) = &args.cache {
        let all: Vec<&Cell> = cache.values().collect();
        emit(Some(path), &json(&all)?)?;
    }
    let cells: Vec<Cell> = keys
        .iter()
        .map(|k| {
            let mut c = cache[k].clone();
            c.cached = !todo.contains(k);
            c
        })
        .collect();
    let text = match args.output.format {
        Format::Json => json(&cells)?,
        Format::Csv => csv_rows(&cells)?,
        Format::Text => text_table(&cells, &m1s, &ns, &seeds),
    };
    emit(args.output.out.as_deref(), &text)
}

fn text_table(cells: &[Cell], m1s: &[u64], ns: &[u64], seeds: &[u64]) -> String {
    let by_key: BTreeMap<_, _> = cells.iter().map(|c| (c.key(), c)).collect();
    let mut s = String::new();
    for &seed in seeds {
        s += &format!("seed {seed}\n{:>6}", "m1\\n");
        for n in ns {
            s += &format!("{n:>9}");
        }
        s.push('\n');
        for &m1 in m1s {
            s += &format!("{m1:>6}");
            for &n in ns {
                s += &format!("{:>9}", by_key[&(m1, n, seed)].marker());
            }
            s.push('\n');
        }
    }
    s += "cells:\n";
    for c in cells {
        s += &format!(
            "  m1 = {}, n = {}, seed = {}: {} ({}{}, {:.3}s{})\n",
            c.m1,
            c.n,
            c.seed,
            c.marker(),
            c.status,
            c.pairs
                .map(|p| format!(" after {p} pairs"))
                .unwrap_or_default(),
            c.seconds,
            if c.cached { ", cached" } else { "" }
        );
    }
    s
}
