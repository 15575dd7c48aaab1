//! Batch surveys: lambda distributions over families of characters, the
//! heuristic prediction they are compared against, trivial-zero prime
//! searches, and JSONL persistence with resume and merge.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::characters::{enumerate_odd, teichmuller_power, DirichletChar, PConstraint};
use crate::error::{Error, Result};
use crate::lambda::{self, LambdaConfig, LambdaResult, Rank, Strategy, Witness};

const TAIL_EPS: f64 = 1e-12;

/// `p^{-fr} prod_{t > r} (1 - p^{-ft})`, the heuristic probability that
/// `lambda = r`; the product stops once its factors are within `1e-12` of 1.
pub fn predicted_probability(p: u64, f: u32, r: u32) -> f64 {
    let q = (p as f64).powi(f as i32);
    let mut prod = q.powi(-(r as i32));
    let mut t = r + 1;
    loop {
        let x = q.powi(-(t as i32));
        if x < TAIL_EPS {
            break;
        }
        prod *= 1.0 - x;
        t += 1;
    }
    prod
}

/// `predicted_probability(p, f, r)` for `r < len`.
pub fn predicted_row(p: u64, f: u32, len: usize) -> Vec<f64> {
    (0..len as u32).map(|r| predicted_probability(p, f, r)).collect()
}

/// `predicted_row(p, f, columns - 1)` followed by the tail `lambda >= columns - 1`,
/// the layout of printed distribution tables.
pub fn predicted_table(p: u64, f: u32, columns: usize) -> Vec<f64> {
    let mut row = predicted_row(p, f, columns.saturating_sub(1));
    let tail = 1.0 - row.iter().sum::<f64>();
    row.push(tail.max(0.0));
    row
}

/// A family `chi = theta omega^i` with `theta` odd of fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveySpec {
    pub p: u64,
    pub order: u64,
    pub cond_min: u64,
    pub cond_max: u64,
    pub constraint: PConstraint,
    pub i: u64,
    pub strategy: Strategy,
    pub precision: u32,
    pub max_precision: u32,
    pub max_n: u32,
    /// Record wall-clock time per character; off gives byte-stable output.
    #[serde(default = "yes")]
    pub timings: bool,
}

fn yes() -> bool {
    true
}

impl SurveySpec {
    /// Defaults for the rank-one family `theta omega` with `theta(p) = 1`.
    pub fn rank_one(p: u64, order: u64, cond_max: u64) -> Self {
        let c = LambdaConfig::default();
        SurveySpec {
            p,
            order,
            cond_min: 1,
            cond_max,
            constraint: PConstraint::ThetaPIsOne,
            i: 1,
            strategy: c.strategy,
            precision: c.precision,
            max_precision: c.max_precision,
            max_n: c.max_n,
            timings: true,
        }
    }

    /// Same with `theta(p) != 1`.
    pub fn rank_zero(p: u64, order: u64, cond_max: u64) -> Self {
        SurveySpec { constraint: PConstraint::ThetaPNotOne, ..Self::rank_one(p, order, cond_max) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || !arith::is_prime(self.p) {
            return Err(Error::InvalidInput(format!("{} is not an odd prime", self.p)));
        }
        if self.order < 2 || self.order % 2 == 1 {
            return Err(Error::InvalidInput("odd characters have even order >= 2".into()));
        }
        if self.cond_max == 0 || self.cond_min > self.cond_max {
            return Err(Error::InvalidInput("empty or invalid conductor range".into()));
        }
        if self.i % 2 == 0 || self.i >= self.p - 1 && self.p > 3 || self.i == 0 {
            return Err(Error::InvalidInput(format!("twist index i = {} must be odd and below p - 1", self.i)));
        }
        if self.precision == 0 || self.precision > self.max_precision {
            return Err(Error::InvalidInput("precision must be positive and at most the ceiling".into()));
        }
        Ok(())
    }

    pub fn config(&self) -> LambdaConfig {
        LambdaConfig {
            strategy: self.strategy,
            precision: self.precision,
            max_precision: self.max_precision,
            max_n: self.max_n,
            variant: 1,
        }
    }

    /// The odd characters `theta` of the family, in conductor order, leaving
    /// out `theta = omega^{-i}`.
    pub fn thetas(&self) -> Vec<DirichletChar> {
        let w = teichmuller_power(self.p, self.i as i64);
        enumerate_odd(self.order, self.cond_min, self.cond_max, self.p, self.constraint, false)
            .into_iter()
            .filter(|t| !t.twist(&w).primitive().is_trivial())
            .collect()
    }

    /// Residue degree of the values of `theta omega^i` over `Q_p`.
    pub fn residue_degree(&self) -> u32 {
        let w = (self.p - 1) / arith::gcd(self.i, self.p - 1);
        let tame = arith::lcm(self.order, w);
        arith::mult_order(self.p % tame, tame) as u32
    }
}

/// One JSONL line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub p: u64,
    /// The character `theta`; the twist is `i`.
    #[serde(rename = "char")]
    pub theta: String,
    pub i: u64,
    pub rank: Rank,
    pub lambda: u64,
    pub lower_bound: bool,
    pub method: String,
    pub n: u32,
    pub prec: u32,
    pub f: usize,
    pub e: usize,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Record {
    pub fn key(&self) -> (u64, String, u64) {
        (self.p, self.theta.clone(), self.i)
    }

    fn from_result(theta: &DirichletChar, i: u64, r: &LambdaResult, ms: u64) -> Self {
        Record {
            p: r.p,
            theta: theta.to_string(),
            i,
            rank: r.rank,
            lambda: r.lambda,
            lower_bound: r.lower_bound,
            method: r.method.to_string(),
            n: r.n,
            prec: r.precision,
            f: r.f,
            e: r.e,
            runtime_ms: ms,
            error: None,
        }
    }

    fn failure(theta: &DirichletChar, spec: &SurveySpec, rank: Rank, err: &Error, ms: u64) -> Self {
        Record {
            p: spec.p,
            theta: theta.to_string(),
            i: spec.i,
            rank,
            lambda: 0,
            lower_bound: true,
            method: "failed".into(),
            n: 0,
            prec: 0,
            f: 0,
            e: 0,
            runtime_ms: ms,
            error: Some(err.to_string()),
        }
    }
}

/// Computes the record of `theta omega^i`.
pub fn survey_one(theta: &DirichletChar, spec: &SurveySpec) -> Record {
    let start = Instant::now();
    let chi = theta.twist(&teichmuller_power(spec.p, spec.i as i64)).primitive();
    let out = lambda::lambda_exact(&chi, spec.p, &spec.config());
    let ms = if spec.timings { start.elapsed().as_millis() as u64 } else { 0 };
    match out {
        Ok(r) => Record::from_result(theta, spec.i, &r, ms),
        Err(e) => {
            let rank = lambda::detect_rank(&chi, spec.p).unwrap_or(Rank::Rank0);
            Record::failure(theta, spec, rank, &e, ms)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub spec: SurveySpec,
    /// Characters with an exact lambda plus those with only a lower bound.
    pub total: u64,
    /// Exact lambda values.
    pub counts: BTreeMap<u64, u64>,
    /// Lower bounds `lambda >= k` where the twist levels ran out.
    pub lower_bounds: BTreeMap<u64, u64>,
    pub proportions: BTreeMap<u64, f64>,
    /// Prediction indexed by lambda; shifted by one in rank one.
    pub predicted: Vec<f64>,
    /// `1 - sum(predicted)`.
    pub predicted_tail: f64,
    pub residue_degree: u32,
    pub failures: Vec<(String, String)>,
    pub runtime_ms: u64,
    pub version: String,
}

impl DistributionReport {
    pub fn proportion(&self, lambda: u64) -> f64 {
        self.proportions.get(&lambda).copied().unwrap_or(0.0)
    }

    /// Printable table.
    pub fn table(&self) -> String {
        let width = self.predicted.len().max(self.counts.keys().next_back().map_or(0, |&k| k as usize + 1));
        let mut s = format!(
            "p = {}  order = {}  conductors {}..={}  {:?}  i = {}  N = {}\n",
            self.spec.p, self.spec.order, self.spec.cond_min, self.spec.cond_max, self.spec.constraint, self.spec.i, self.total
        );
        s.push_str("lambda    ");
        for l in 0..width {
            s.push_str(&format!("{l:>8}"));
        }
        s.push_str("\ncount     ");
        for l in 0..width as u64 {
            s.push_str(&format!("{:>8}", self.counts.get(&l).copied().unwrap_or(0)));
        }
        s.push_str("\nobserved  ");
        for l in 0..width as u64 {
            s.push_str(&format!("{:>8.4}", self.proportion(l)));
        }
        s.push_str("\npredicted ");
        for l in 0..width {
            s.push_str(&format!("{:>8.4}", self.predicted.get(l).copied().unwrap_or(0.0)));
        }
        s.push('\n');
        for (k, c) in &self.lower_bounds {
            s.push_str(&format!("lambda >= {k}: {c}\n"));
        }
        for (c, e) in &self.failures {
            s.push_str(&format!("failed {c}: {e}\n"));
        }
        s
    }
}

/// Order-independent fold of the records matching `spec`.
pub fn aggregate(spec: &SurveySpec, records: &[Record], runtime_ms: u64) -> DistributionReport {
    let mut counts = BTreeMap::new();
    let mut lower_bounds = BTreeMap::new();
    let mut failures = Vec::new();
    let mut rank_one = spec.constraint == PConstraint::ThetaPIsOne && spec.i == 1;
    let mut seen = HashSet::new();
    for r in records {
        if r.p != spec.p || r.i != spec.i || !seen.insert(r.key()) {
            continue;
        }
        if let Some(e) = &r.error {
            failures.push((r.theta.clone(), e.clone()));
            continue;
        }
        rank_one |= r.rank == Rank::Rank1;
        let m = if r.lower_bound { &mut lower_bounds } else { &mut counts };
        *m.entry(r.lambda).or_insert(0u64) += 1;
    }
    failures.sort();
    let total: u64 = counts.values().sum::<u64>() + lower_bounds.values().sum::<u64>();
    let proportions = counts
        .iter()
        .map(|(&k, &c)| (k, if total == 0 { 0.0 } else { c as f64 / total as f64 }))
        .collect();
    let f = spec.residue_degree();
    let mut predicted = predicted_row(spec.p, f, 8);
    if rank_one {
        predicted.insert(0, 0.0);
        predicted.pop();
    }
    let predicted_tail = 1.0 - predicted.iter().sum::<f64>();
    DistributionReport {
        spec: spec.clone(),
        total,
        counts,
        lower_bounds,
        proportions,
        predicted,
        predicted_tail,
        residue_degree: f,
        failures,
        runtime_ms,
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Runs the survey. With `out`, records already in the file are reused and
/// new ones are appended as they finish; a manifest with the spec is written
/// beside it. `jobs` bounds the worker threads.
pub fn scan_distribution(spec: &SurveySpec, out: Option<&Path>, jobs: Option<usize>) -> Result<DistributionReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut records = match out {
        Some(path) if path.exists() => load_records(path)?.0,
        _ => Vec::new(),
    };
    if let Some(path) = out {
        write_manifest(path, spec)?;
    }
    let done: HashSet<_> = records.iter().filter(|r| r.error.is_none()).map(Record::key).collect();
    let todo: Vec<DirichletChar> = spec
        .thetas()
        .into_iter()
        .filter(|t| !done.contains(&(spec.p, t.to_string(), spec.i)))
        .collect();
    log::info!("scan p = {}: {} characters to compute, {} reused", spec.p, todo.len(), done.len());

    let writer = match out {
        Some(path) => Some(Mutex::new(BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?))),
        None => None,
    };
    let work = || -> Result<Vec<Record>> {
        todo.par_iter()
            .map(|t| {
                let rec = survey_one(t, spec);
                if let Some(w) = &writer {
                    let mut w = w.lock().unwrap();
                    writeln!(w, "{}", serde_json::to_string(&rec)?)?;
                    w.flush()?;
                }
                Ok(rec)
            })
            .collect()
    };
    let fresh = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    records.retain(|r| r.error.is_none());
    records.extend(fresh);
    let ms = if spec.timings { start.elapsed().as_millis() as u64 } else { 0 };
    Ok(aggregate(spec, &records, ms))
}

/// A prime where `theta omega` has a trivial zero and `lambda > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrivialZeroHit {
    pub p: u64,
    /// Residue degree of the values of `theta omega` over `Q_p`.
    pub f: usize,
    pub witnesses: Vec<Witness>,
}

/// All odd primes `p <= p_max` with `p` prime to the conductor of `theta`,
/// `theta(p) = 1`, and `lambda_p(theta omega) > 1`.
pub fn trivial_zero_prime_search(theta: &DirichletChar, p_max: u64, cfg: &LambdaConfig) -> Result<Vec<TrivialZeroHit>> {
    if !theta.is_odd() {
        return Err(Error::InvalidInput(format!("{theta} is not odd")));
    }
    let mut hits = Vec::new();
    for p in arith::primes_up_to(p_max) {
        if p == 2 || theta.conductor() % p == 0 || !theta.value_at_is_one(p as i64) {
            continue;
        }
        let chi = theta.twist(&teichmuller_power(p, 1)).primitive();
        let r = lambda::lambda_gt(&chi, p, 1, cfg)?;
        if r.holds {
            let (f, _) = lambda::value_ring_shape(&chi, p);
            hits.push(TrivialZeroHit { p, f, witnesses: r.witnesses });
        }
    }
    Ok(hits)
}

/// Appends records to a JSONL file.
pub fn append_records(path: &Path, records: &[Record]) -> Result<()> {
    let mut w = BufWriter::new(OpenOptions::new().create(true).append(true).open(path)?);
    for r in records {
        writeln!(w, "{}", serde_json::to_string(r)?)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads a JSONL file; corrupt lines are skipped with a warning and counted.
pub fn load_records(path: &Path) -> Result<(Vec<Record>, usize)> {
    let mut out = Vec::new();
    let mut bad = 0;
    for (no, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(&line) {
            Ok(r) => out.push(r),
            Err(e) => {
                log::warn!("{}:{}: skipping corrupt record: {e}", path.display(), no + 1);
                bad += 1;
            }
        }
    }
    Ok((out, bad))
}

/// Union of shards keyed by `(p, char, i)`; successful records win over
/// failures, and the result is sorted by key.
pub fn merge_records(shards: &[Vec<Record>]) -> Vec<Record> {
    let mut by_key: BTreeMap<(u64, String, u64), Record> = BTreeMap::new();
    for r in shards.iter().flatten() {
        match by_key.get(&r.key()) {
            Some(old) if old.error.is_none() => {}
            _ => {
                by_key.insert(r.key(), r.clone());
            }
        }
    }
    by_key.into_values().collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a SurveySpec,
    version: &'a str,
}

fn write_manifest(out: &Path, spec: &SurveySpec) -> Result<()> {
    let m = Manifest { spec, version: env!("CARGO_PKG_VERSION") };
    std::fs::write(manifest_path(out), serde_json::to_string_pretty(&m)?)?;
    Ok(())
}
