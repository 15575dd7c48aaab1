//! Iwasawa lambda-invariants of even characters of the first kind: rank
//! detection, the threshold tests `lambda > 0, 1, 2` read off Taylor steps of
//! `F_chi`, and exact values from one twist by a character of the second kind.
//!
//! Every test is an instance of: with `v(b - t0) = 1`,
//! `lambda > 0 <=> v(F(t0)) > 0`, `lambda > 1 <=> ... and v(F(b) - F(t0)) > 1`,
//! `lambda > 2 <=> ... and v(F(b) - F(t0) - F'(t0)(b - t0)) > 2`, at the pairs
//! `(t0, b) = (0, (1+p)^{1-p} - 1)` and `(p, 0)`.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, Modulus};
use crate::characters::{second_kind, DirichletChar};
use crate::error::{Error, Result};
use crate::lvalues::{f_chi_deriv_at, lp_at_nonpositive, lp_at_one, lp_deriv_zero, omega_twist};
use crate::padic::{LocalRing, RingElement, Valuation};

/// Environment variable overriding the precision escalation ceiling.
pub const PREC_CEILING_ENV: &str = "IWASAWA_PREC_CEILING";
pub const DEFAULT_PREC_CEILING: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rank {
    #[serde(rename = "r0")]
    Rank0,
    #[serde(rename = "r1")]
    Rank1,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rank::Rank0 => "r0",
            Rank::Rank1 => "r1",
        })
    }
}

/// Which special values a computation may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Generalized Bernoulli numbers only (values at `s = 1 - k`).
    Bernoulli,
    /// Values and derivatives at `s = 1`.
    SOne,
    /// Everything, with agreement checks.
    All,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" | "bernoulli-twist" => Ok(Strategy::Bernoulli),
            "s1" | "s-one" | "s1-twist" => Ok(Strategy::SOne),
            "all" | "all-routes" => Ok(Strategy::All),
            _ => Err(Error::InvalidInput(format!("unknown strategy {s:?}"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Bernoulli => "bernoulli",
            Strategy::SOne => "s1",
            Strategy::All => "all",
        })
    }
}

/// How a result was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Threshold tests around the trivial zero.
    RankOneCriteria,
    /// Threshold tests without a trivial zero.
    RankZeroCriteria,
    /// Twisted Bernoulli value, with the part (1..=3) that decided.
    BernoulliTwist(u8),
    /// Twisted value at `s = 1`, with the deciding part.
    SOneTwist(u8),
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::RankOneCriteria => f.write_str("rank1-criteria"),
            Method::RankZeroCriteria => f.write_str("rank0-criteria"),
            Method::BernoulliTwist(k) => write!(f, "bernoulli-twist-part{k}"),
            Method::SOneTwist(k) => write!(f, "s1-twist-part{k}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let part = |rest: &str| -> Result<u8> {
            rest.parse::<u8>()
                .ok()
                .filter(|k| (1..=3).contains(k))
                .ok_or_else(|| Error::InvalidInput(format!("bad method {s:?}")))
        };
        if s == "rank1-criteria" {
            Ok(Method::RankOneCriteria)
        } else if s == "rank0-criteria" {
            Ok(Method::RankZeroCriteria)
        } else if let Some(r) = s.strip_prefix("bernoulli-twist-part") {
            Ok(Method::BernoulliTwist(part(r)?))
        } else if let Some(r) = s.strip_prefix("s1-twist-part") {
            Ok(Method::SOneTwist(part(r)?))
        } else {
            Err(Error::InvalidInput(format!("bad method {s:?}")))
        }
    }
}

impl Serialize for Method {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Method {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One valuation that entered a decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub quantity: String,
    pub valuation: String,
    pub test: String,
    pub holds: bool,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v({}) = {} ; {} : {}", self.quantity, self.valuation, self.test, self.holds)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaResult {
    pub chi: DirichletChar,
    pub p: u64,
    pub i: u64,
    pub rank: Rank,
    /// Exact value, or a lower bound when `lower_bound` is set.
    pub lambda: u64,
    pub lower_bound: bool,
    pub method: Method,
    /// Level of the second-kind twist (0 when none was used).
    pub n: u32,
    pub precision: u32,
    /// Residue degree and ramification index of the ring of values of `chi`.
    pub f: usize,
    pub e: usize,
    pub witnesses: Vec<Witness>,
}

impl fmt::Display for LambdaResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.lower_bound { ">=" } else { "=" };
        writeln!(
            f,
            "chi = {}  p = {}  i = {}  rank = {}  lambda {} {}  method = {}  n = {}  prec = {}  f = {}  e = {}",
            self.chi, self.p, self.i, self.rank, rel, self.lambda, self.method, self.n, self.precision, self.f, self.e
        )?;
        for w in &self.witnesses {
            writeln!(f, "  {w}")?;
        }
        Ok(())
    }
}

/// Outcome of a threshold test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub holds: bool,
    pub rank: Rank,
    pub precision: u32,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug)]
pub struct LambdaConfig {
    pub strategy: Strategy,
    /// Starting absolute precision.
    pub precision: u32,
    /// Escalation ceiling.
    pub max_precision: u32,
    /// Largest second-kind twist level tried.
    pub max_n: u32,
    /// Presentation of the unramified part of the rings used (1 is the
    /// default; others must give identical answers).
    pub variant: u64,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        LambdaConfig {
            strategy: Strategy::Bernoulli,
            precision: 4,
            max_precision: precision_ceiling_from_env(),
            max_n: 3,
            variant: 1,
        }
    }
}

/// `LocalRing::with_variant` at the first admissible presentation `>= variant`.
fn ring_with_variant(p: u64, prec: u32, tame: u64, wild: u32, variant: u64) -> Result<LocalRing> {
    let mut last = None;
    for t in variant.max(1)..variant.max(1) + 64 {
        match LocalRing::with_variant(p, prec, tame, wild, t) {
            Ok(r) => return Ok(r),
            Err(e @ Error::InvalidInput(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Ceiling from `IWASAWA_PREC_CEILING`, or the default.
pub fn precision_ceiling_from_env() -> u32 {
    std::env::var(PREC_CEILING_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_PREC_CEILING)
}

/// Checks that `chi` is a nontrivial even character of the first kind at `p`
/// and returns `(theta, i)` with `chi = theta omega^i`.
fn first_kind(chi: &DirichletChar, p: u64) -> Result<(DirichletChar, u64)> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if chi.is_trivial() {
        return Err(Error::InvalidInput("the trivial character is not supported".into()));
    }
    if chi.is_odd() {
        return Err(Error::InvalidInput(format!("{chi} is odd")));
    }
    let d = chi.decompose(p);
    if d.n > 0 {
        return Err(Error::InvalidInput(format!("{chi} is not of the first kind at {p}")));
    }
    Ok((d.theta, d.i))
}

/// `Rank1` exactly when `chi omega^{-1}(p) = 1`, i.e. `L_p(s, chi)` has a
/// trivial zero at `s = 0`.
pub fn detect_rank(chi: &DirichletChar, p: u64) -> Result<Rank> {
    first_kind(chi, p)?;
    let tw = omega_twist(chi, p, 1);
    Ok(if tw.value_at_is_one(p as i64) { Rank::Rank1 } else { Rank::Rank0 })
}

/// `(f, e)` of the ring generated by the values of `chi`.
pub fn value_ring_shape(chi: &DirichletChar, p: u64) -> (usize, usize) {
    let (tame, wild) = chi.ring_shape(p);
    let f = arith::mult_order(p % tame.max(1), tame.max(1)).max(1) as usize;
    let e = if wild == 0 { 1 } else { ((p - 1) * p.pow(wild - 1)) as usize };
    (f, e)
}

fn rat(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn witness(quantity: &str, x: &RingElement, test: String, holds: bool) -> Witness {
    Witness { quantity: quantity.to_string(), valuation: x.valuation().to_string(), test, holds }
}

/// `v(x) > t`, or `None` if the precision does not decide it.
fn gt(x: &RingElement, t: Rational64) -> Option<bool> {
    x.valuation().greater_than(t)
}

fn lt(x: &RingElement, t: Rational64) -> Option<bool> {
    x.valuation().less_than(t)
}

/// Special values around the two Taylor base points, computed lazily at one
/// precision.
struct Taylor<'a> {
    chi: &'a DirichletChar,
    ring: LocalRing,
    prec: i32,
    f0: Option<RingElement>,
    fb: Option<RingElement>,
    l1: Option<RingElement>,
    fd1: Option<RingElement>,
    ld0: Option<RingElement>,
    fd0_newton: Option<RingElement>,
}

impl<'a> Taylor<'a> {
    fn new(chi: &'a DirichletChar, p: u64, prec: u32, variant: u64) -> Result<Self> {
        let (tame, wild) = chi.ring_shape(p);
        let ring = ring_with_variant(p, prec + 3, arith::lcm(tame, p - 1), wild, variant)?;
        Ok(Taylor {
            chi,
            ring,
            prec: prec as i32,
            f0: None,
            fb: None,
            l1: None,
            fd1: None,
            ld0: None,
            fd0_newton: None,
        })
    }

    fn p(&self) -> u64 {
        self.ring.p()
    }

    /// `F(0) = L_p(0)`.
    fn f0(&mut self) -> Result<RingElement> {
        if self.f0.is_none() {
            self.f0 = Some(lp_at_nonpositive(1, self.chi, &self.ring, self.prec)?.value);
        }
        Ok(self.f0.clone().unwrap())
    }

    /// `F(b) = L_p(1 - p)` at `b = (1+p)^{1-p} - 1`.
    fn fb(&mut self) -> Result<RingElement> {
        if self.fb.is_none() {
            self.fb = Some(lp_at_nonpositive(self.p(), self.chi, &self.ring, self.prec)?.value);
        }
        Ok(self.fb.clone().unwrap())
    }

    /// `F(p) = L_p(1)`.
    fn l1(&mut self) -> Result<RingElement> {
        if self.l1.is_none() {
            self.l1 = Some(lp_at_one(self.chi, 1, &self.ring, self.prec)?.value);
        }
        Ok(self.l1.clone().unwrap())
    }

    /// `F'(p) = L_p'(1) / ((1+p) log(1+p))`.
    fn fd1(&mut self) -> Result<RingElement> {
        if self.fd1.is_none() {
            self.fd1 = Some(f_chi_deriv_at(1, self.chi, &self.ring, self.prec)?);
        }
        Ok(self.fd1.clone().unwrap())
    }

    /// `L_p'(0)` by a gamma-function route.
    fn ld0(&mut self) -> Result<RingElement> {
        if self.ld0.is_none() {
            self.ld0 = Some(lp_deriv_zero(self.chi, &self.ring, self.prec + 1)?.value);
        }
        Ok(self.ld0.clone().unwrap())
    }

    /// `F'(0)` from Bernoulli values.
    fn fd0_newton(&mut self) -> Result<RingElement> {
        if self.fd0_newton.is_none() {
            self.fd0_newton = Some(f_chi_deriv_at(0, self.chi, &self.ring, self.prec)?);
        }
        Ok(self.fd0_newton.clone().unwrap())
    }

    /// `F'(0) = L_p'(0) / log(1+p)` from the gamma route.
    fn fd0_route(&mut self) -> Result<RingElement> {
        let l = self.ld0()?;
        Ok(divide_by_log(&l, self.p(), self.prec))
    }

    /// `b = (1+p)^{1-p} - 1`.
    fn b(&self) -> RingElement {
        let p = self.p();
        let w = self.prec as u32 + 2;
        let md = Modulus::new(p.pow(w));
        let x = md.sub(md.pow(md.inv(1 + p).unwrap(), p - 1), 1);
        self.ring.from_int(x as i64).truncate(w as i32)
    }
}

/// `x / log_p(1+p)`.
fn divide_by_log(x: &RingElement, p: u64, prec: i32) -> RingElement {
    let w = prec.max(1) as u32 + 3;
    let lg = crate::padic::log_int(1 + p as i64, p, w);
    let unit = lg / p; // log(1+p) = p * unit
    let md = Modulus::new(p.pow(w - 1));
    let inv = md.inv(unit % md.m).unwrap();
    x.mul(&x.ring().from_int(inv as i64).truncate(w as i32 - 1))
        .mul_rational(&num_rational::BigRational::new(1.into(), p.into()))
}

/// One boolean from a set of equivalent tests; with several tests they must
/// agree.
fn agree(results: &[(Option<bool>, Witness)], what: &str) -> Result<Option<bool>> {
    let mut out: Option<bool> = None;
    for (r, _) in results {
        match (r, out) {
            (None, _) => return Ok(None),
            (Some(x), None) => out = Some(*x),
            (Some(x), Some(y)) if *x != y => {
                let detail: Vec<String> = results.iter().map(|(_, w)| w.to_string()).collect();
                return Err(Error::Inconsistency(format!("{what}: equivalent tests disagree: {}", detail.join("; "))));
            }
            _ => {}
        }
    }
    Ok(out)
}

enum Decision {
    Decided(bool),
    Undecided,
}

fn threshold_once(
    chi: &DirichletChar,
    p: u64,
    threshold: u32,
    strategy: Strategy,
    prec: u32,
    rank: Rank,
    variant: u64,
    witnesses: &mut Vec<Witness>,
) -> Result<Decision> {
    let mut t = Taylor::new(chi, p, prec, variant)?;
    witnesses.clear();
    // lambda > 0
    let f0 = t.f0()?;
    let gt0 = match rank {
        Rank::Rank1 => {
            witnesses.push(witness("L_p(0)", &f0, "trivial zero".into(), true));
            Some(true)
        }
        Rank::Rank0 => {
            let r = gt(&f0, rat(0, 1));
            if let Some(h) = r {
                witnesses.push(witness("L_p(0)", &f0, "> 0".into(), h));
            }
            r
        }
    };
    let gt0 = match gt0 {
        None => return Ok(Decision::Undecided),
        Some(x) => x,
    };
    if threshold == 0 || !gt0 {
        return Ok(Decision::Decided(gt0));
    }

    // lambda > 1
    let one = rat(1, 1);
    let mut tests: Vec<(Option<bool>, Witness)> = Vec::new();
    if matches!(strategy, Strategy::Bernoulli | Strategy::All) {
        let x = t.fb()?.sub(&f0);
        let r = gt(&x, one);
        tests.push((r, witness("L_p(1-p) - L_p(0)", &x, "> 1".into(), r.unwrap_or(false))));
    }
    if matches!(strategy, Strategy::SOne | Strategy::All) {
        let x = f0.sub(&t.l1()?);
        let r = gt(&x, one);
        tests.push((r, witness("L_p(0) - L_p(1)", &x, "> 1".into(), r.unwrap_or(false))));
    }
    if strategy == Strategy::All {
        let x = t.ld0()?;
        let r = gt(&x, one);
        tests.push((r, witness("L_p'(0)", &x, "> 1".into(), r.unwrap_or(false))));
    }
    let gt1 = agree(&tests, "lambda > 1")?;
    witnesses.extend(tests.into_iter().map(|(_, w)| w));
    let gt1 = match gt1 {
        None => return Ok(Decision::Undecided),
        Some(x) => x,
    };
    if threshold == 1 || !gt1 {
        return Ok(Decision::Decided(gt1));
    }

    // lambda > 2
    let two = rat(2, 1);
    let mut tests: Vec<(Option<bool>, Witness)> = Vec::new();
    let b = t.b();
    if matches!(strategy, Strategy::Bernoulli | Strategy::All) {
        let fd0 = if strategy == Strategy::All { t.fd0_route()? } else { t.fd0_newton()? };
        let x = t.fb()?.sub(&fd0.mul(&b)).sub(&f0);
        let r = gt(&x, two);
        tests.push((r, witness("F(b) - F'(0) b - F(0)", &x, "> 2".into(), r.unwrap_or(false))));
    }
    if matches!(strategy, Strategy::SOne | Strategy::All) {
        let x = f0.add(&t.fd1()?.mul_int(p as i64)).sub(&t.l1()?);
        let r = gt(&x, two);
        tests.push((r, witness("F(0) + F'(p) p - F(p)", &x, "> 2".into(), r.unwrap_or(false))));
    }
    let gt2 = agree(&tests, "lambda > 2")?;
    witnesses.extend(tests.into_iter().map(|(_, w)| w));
    Ok(match gt2 {
        None => Decision::Undecided,
        Some(x) => Decision::Decided(x),
    })
}

/// Whether `lambda_p(chi) > threshold` for `threshold` in `0..=2`.
pub fn lambda_gt(chi: &DirichletChar, p: u64, threshold: u32, cfg: &LambdaConfig) -> Result<ThresholdResult> {
    if threshold > 2 {
        return Err(Error::InvalidInput("threshold must be 0, 1 or 2".into()));
    }
    first_kind(chi, p)?;
    let rank = detect_rank(chi, p)?;
    let mut prec = cfg.precision.max(threshold + 2);
    let mut witnesses = Vec::new();
    loop {
        if prec > cfg.max_precision {
            return Err(Error::PrecisionCeiling(format!(
                "lambda > {threshold} for {chi} at p = {p} undecided below precision {}",
                cfg.max_precision
            )));
        }
        match threshold_once(chi, p, threshold, cfg.strategy, prec, rank, cfg.variant, &mut witnesses) {
            Ok(Decision::Decided(h)) => {
                // the rank-zero tests for lambda > 1 are used as sufficient
                // conditions only; a negative answer is confirmed exactly
                if rank == Rank::Rank0 && threshold >= 1 && !h && witnesses.len() > 1 {
                    let ex = lambda_exact(chi, p, &LambdaConfig { strategy: exact_strategy(cfg.strategy), ..cfg.clone() })?;
                    let holds = ex.lambda > threshold as u64;
                    witnesses.push(Witness {
                        quantity: "lambda (twist)".into(),
                        valuation: format!("{}{}", if ex.lower_bound { ">=" } else { "" }, ex.lambda),
                        test: format!("> {threshold}"),
                        holds,
                    });
                    return Ok(ThresholdResult { holds, rank, precision: prec, witnesses });
                }
                return Ok(ThresholdResult { holds: h, rank, precision: prec, witnesses });
            }
            Ok(Decision::Undecided) => prec += 2,
            Err(Error::PrecisionCeiling(_)) => prec += 2,
            Err(e) => return Err(e),
        }
    }
}

/// The individual rank-one conditions, each evaluated on its own: for
/// `lambda > 1`, (a) `v(L_p'(0)) > 1`, (b) `v(L_p(0) - L_p(1)) > 1`,
/// (c) `v(L_p(1-p) - L_p(0)) > 1`; for `lambda > 2`, the Taylor step at
/// `t0 = 0` (with `F'(0)` from the gamma route) and at `t0 = p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOneConditions {
    pub precision: u32,
    pub gt1: [bool; 3],
    pub gt2: [bool; 2],
    pub witnesses: Vec<Witness>,
}

pub fn rank_one_conditions(chi: &DirichletChar, p: u64, cfg: &LambdaConfig) -> Result<RankOneConditions> {
    if detect_rank(chi, p)? != Rank::Rank1 {
        return Err(Error::InvalidInput(format!("{chi} has no trivial zero at {p}")));
    }
    let mut prec = cfg.precision.max(4);
    while prec <= cfg.max_precision {
        let mut t = Taylor::new(chi, p, prec, cfg.variant)?;
        let f0 = t.f0()?;
        let qs = [
            ("L_p'(0)", t.ld0()?, rat(1, 1)),
            ("L_p(0) - L_p(1)", f0.sub(&t.l1()?), rat(1, 1)),
            ("L_p(1-p) - L_p(0)", t.fb()?.sub(&f0), rat(1, 1)),
            ("F(b) - F'(0) b - F(0)", t.fb()?.sub(&t.fd0_route()?.mul(&t.b())).sub(&f0), rat(2, 1)),
            ("F(0) + F'(p) p - F(p)", f0.add(&t.fd1()?.mul_int(p as i64)).sub(&t.l1()?), rat(2, 1)),
        ];
        let decided: Option<Vec<bool>> = qs.iter().map(|(_, x, th)| gt(x, *th)).collect();
        if let Some(h) = decided {
            let witnesses = qs
                .iter()
                .zip(&h)
                .map(|((name, x, th), &b)| witness(name, x, format!("> {th}"), b))
                .collect();
            return Ok(RankOneConditions { precision: prec, gt1: [h[0], h[1], h[2]], gt2: [h[3], h[4]], witnesses });
        }
        prec += 2;
    }
    Err(Error::PrecisionCeiling(format!("rank-one conditions for {chi} at {p} undecided below precision {}", cfg.max_precision)))
}

fn exact_strategy(s: Strategy) -> Strategy {
    match s {
        Strategy::SOne => Strategy::SOne,
        _ => Strategy::Bernoulli,
    }
}

/// Exact `lambda_p(chi)` by the second-kind twist escalation; `All` runs both
/// twist routes and requires them to agree.
pub fn lambda_exact(chi: &DirichletChar, p: u64, cfg: &LambdaConfig) -> Result<LambdaResult> {
    match cfg.strategy {
        Strategy::All => {
            let a = lambda_twist(chi, p, Strategy::Bernoulli, cfg)?;
            let b = lambda_twist(chi, p, Strategy::SOne, cfg)?;
            if (a.lambda, a.lower_bound) != (b.lambda, b.lower_bound) {
                return Err(Error::Inconsistency(format!(
                    "{chi} at p = {p}: Bernoulli twist gives {}{}, s = 1 twist gives {}{}",
                    if a.lower_bound { ">=" } else { "" },
                    a.lambda,
                    if b.lower_bound { ">=" } else { "" },
                    b.lambda
                )));
            }
            Ok(a)
        }
        s => lambda_twist(chi, p, s, cfg),
    }
}

enum Step {
    Found(u64, u8),
    Next,
    Undecided,
}

fn lambda_twist(chi: &DirichletChar, p: u64, strategy: Strategy, cfg: &LambdaConfig) -> Result<LambdaResult> {
    let (_theta, i) = first_kind(chi, p)?;
    let rank = detect_rank(chi, p)?;
    let k = if i == 0 { p - 1 } else { i };
    let (f, e) = value_ring_shape(chi, p);
    let (tame, wild) = chi.ring_shape(p);
    let mut witnesses = Vec::new();
    let mut lower = 0u64;
    let mut last_prec = cfg.precision;
    for n in 1..=cfg.max_n.max(1) {
        let m = (p - 1) * p.pow(n - 1);
        let psi = second_kind(p, n)?;
        let chipsi = chi.twist(&psi).primitive();
        let x = psi.value_exponent(1 + p as i64).unwrap();
        let zeta_exp = (psi.order() - x) % psi.order();
        let mut prec = cfg.precision.max(2);
        loop {
            if prec > cfg.max_precision {
                return Err(Error::PrecisionCeiling(format!(
                    "lambda of {chi} at p = {p}, twist level {n}, undecided below precision {}",
                    cfg.max_precision
                )));
            }
            let ring = ring_with_variant(p, prec + 3, arith::lcm(tame, p - 1), wild.max(n), cfg.variant)?;
            witnesses.clear();
            let step = twist_step(chi, &chipsi, k, zeta_exp, n, m, e, strategy, &ring, prec as i32, &mut witnesses);
            match step {
                Ok(Step::Found(lambda, part)) => {
                    if rank == Rank::Rank1 && lambda == 0 {
                        return Err(Error::Inconsistency(format!("{chi} at p = {p}: trivial zero but lambda = 0")));
                    }
                    let method = if strategy == Strategy::SOne { Method::SOneTwist(part) } else { Method::BernoulliTwist(part) };
                    return Ok(LambdaResult {
                        chi: chi.clone(),
                        p,
                        i,
                        rank,
                        lambda,
                        lower_bound: false,
                        method,
                        n,
                        precision: prec,
                        f,
                        e,
                        witnesses,
                    });
                }
                Ok(Step::Next) => {
                    // lambda >= m/e + 2
                    lower = lower.max((m as f64 / e as f64).floor() as u64 + 2);
                    last_prec = prec;
                    break;
                }
                Ok(Step::Undecided) | Err(Error::PrecisionCeiling(_)) => prec += 2,
                Err(err) => return Err(err),
            }
        }
    }
    let method = if strategy == Strategy::SOne { Method::SOneTwist(3) } else { Method::BernoulliTwist(3) };
    Ok(LambdaResult {
        chi: chi.clone(),
        p,
        i,
        rank,
        lambda: lower.max(if rank == Rank::Rank1 { 1 } else { 0 }),
        lower_bound: true,
        method,
        n: cfg.max_n.max(1),
        precision: last_prec,
        f,
        e,
        witnesses,
    })
}

/// `v * m` as a nonnegative integer, or an inconsistency.
fn lambda_from(v: &Valuation, m: u64, what: &str) -> Result<u64> {
    let v = v.exact().ok_or_else(|| Error::Precision(format!("{what}: valuation not exact")))?;
    let l = v * Rational64::from_integer(m as i64);
    if !l.is_integer() || l < Rational64::from_integer(0) {
        return Err(Error::Inconsistency(format!("{what}: v * m = {l} is not a nonnegative integer")));
    }
    Ok(l.to_integer() as u64)
}

#[allow(clippy::too_many_arguments)]
fn twist_step(
    chi: &DirichletChar,
    chipsi: &DirichletChar,
    k: u64,
    zeta_exp: u64,
    n: u32,
    m: u64,
    e: usize,
    strategy: Strategy,
    ring: &LocalRing,
    prec: i32,
    witnesses: &mut Vec<Witness>,
) -> Result<Step> {
    let p = ring.p();
    let inv_e = rat(1, e as i64);
    let inv_m = rat(1, m as i64);
    let sone = strategy == Strategy::SOne;
    let (name_pi, name_t0) = if sone {
        ("L_p(1, chi psi)".to_string(), "L_p(1, chi)".to_string())
    } else {
        (format!("L_p({}, chi psi)", 1 - k as i64), format!("L_p({}, chi)", 1 - k as i64))
    };

    // part 1: F(pi)
    let fpi = if sone {
        lp_at_one(chipsi, 1, ring, prec)?.value
    } else {
        lp_at_nonpositive(k, chipsi, ring, prec)?.value
    };
    let t1 = inv_e;
    match lt(&fpi, t1) {
        None => return Ok(Step::Undecided),
        Some(h) => {
            witnesses.push(witness(&name_pi, &fpi, format!("< {t1} (n = {n})"), h));
            if h {
                return Ok(Step::Found(lambda_from(&fpi.valuation(), m, &name_pi)?, 1));
            }
        }
    }

    // part 2: F(pi) - F(t0)
    let ft0 = if sone {
        lp_at_one(chi, 1, ring, prec)?.value
    } else {
        lp_at_nonpositive(k, chi, ring, prec)?.value
    };
    let q2 = fpi.sub(&ft0);
    let t2 = inv_e + inv_m;
    let label2 = format!("{name_pi} - {name_t0}");
    match lt(&q2, t2) {
        None => return Ok(Step::Undecided),
        Some(h) => {
            witnesses.push(witness(&label2, &q2, format!("< {t2}"), h));
            if h {
                return Ok(Step::Found(lambda_from(&q2.valuation(), m, &label2)?, 2));
            }
        }
    }

    // part 3: subtract F'(t0) (pi - t0), pi - t0 = (zeta_psi - 1)(1+p)^{1-k}
    // resp. (zeta_psi - 1)(1+p)
    let s = if sone { 1 } else { 1 - k as i64 };
    let fd = f_chi_deriv_at(s, chi, ring, prec)?;
    let w = prec as u32 + 2;
    let md = Modulus::new(p.pow(w));
    let u = if sone { 1 + p } else { md.pow(md.inv(1 + p).unwrap(), k - 1) };
    let zeta = ring.root_of_unity(p.pow(n), zeta_exp)?;
    let step = zeta.sub(&ring.one()).mul(&ring.from_int(u as i64).truncate(w as i32));
    let q3 = q2.sub(&fd.mul(&step));
    let t3 = inv_e + inv_m * 2;
    let label3 = format!("{label2} - F'(t0)(pi - t0)");
    match lt(&q3, t3) {
        None => Ok(Step::Undecided),
        Some(h) => {
            witnesses.push(witness(&label3, &q3, format!("< {t3}"), h));
            if h {
                Ok(Step::Found(lambda_from(&q3.valuation(), m, &label3)?, 3))
            } else {
                Ok(Step::Next)
            }
        }
    }
}

/// `lambda` of each `theta^j omega` for odd `j < ord theta` (the odd part of
/// the field cut out by `theta`), and their sum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldLambda {
    pub theta: DirichletChar,
    pub p: u64,
    pub components: Vec<LambdaResult>,
    pub total: u64,
    pub lower_bound: bool,
}

pub fn lambda_field(theta: &DirichletChar, p: u64, cfg: &LambdaConfig) -> Result<FieldLambda> {
    if !theta.is_odd() {
        return Err(Error::InvalidInput(format!("{theta} is not odd")));
    }
    if theta.conductor() % p == 0 {
        return Err(Error::InvalidInput(format!("p = {p} divides the conductor of {theta}")));
    }
    let omega = crate::characters::teichmuller_power(p, 1);
    let ord = theta.order();
    let mut components = Vec::new();
    for j in (1..ord).step_by(2) {
        let chi = theta.pow(j as i64).twist(&omega).primitive();
        components.push(lambda_exact(&chi, p, cfg)?);
    }
    let total = components.iter().map(|r| r.lambda).sum();
    let lower_bound = components.iter().any(|r| r.lower_bound);
    if theta.value_at_is_one(p as i64) && total < ord / 2 {
        return Err(Error::Inconsistency(format!(
            "{theta} splits at {p} but the lambda sum {total} is below {}",
            ord / 2
        )));
    }
    Ok(FieldLambda { theta: theta.clone(), p, components, total, lower_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::teichmuller_power;

    fn theta_omega(d: i64, p: u64) -> DirichletChar {
        DirichletChar::kronecker(d).unwrap().twist(&teichmuller_power(p, 1)).primitive()
    }

    fn cfg(s: Strategy) -> LambdaConfig {
        LambdaConfig { strategy: s, precision: 4, max_precision: 12, max_n: 3, variant: 1 }
    }

    #[test]
    fn ranks() {
        assert_eq!(detect_rank(&theta_omega(-3, 13), 13).unwrap(), Rank::Rank1);
        assert_eq!(detect_rank(&theta_omega(-3, 5), 5).unwrap(), Rank::Rank0);
        assert_eq!(detect_rank(&theta_omega(-4, 13), 13).unwrap(), Rank::Rank1);
        assert!(detect_rank(&DirichletChar::kronecker(-3).unwrap(), 5).is_err());
    }

    #[test]
    fn thresholds() {
        for s in [Strategy::Bernoulli, Strategy::SOne, Strategy::All] {
            let c = cfg(s);
            assert!(lambda_gt(&theta_omega(-3, 13), 13, 1, &c).unwrap().holds, "{s}");
            assert!(!lambda_gt(&theta_omega(-3, 7), 7, 1, &c).unwrap().holds, "{s}");
            assert!(lambda_gt(&theta_omega(-11, 5), 5, 1, &c).unwrap().holds, "{s}");
        }
        let w = teichmuller_power(37, 32);
        assert!(lambda_gt(&w, 37, 0, &cfg(Strategy::Bernoulli)).unwrap().holds);
    }

    #[test]
    fn exact_values() {
        for s in [Strategy::Bernoulli, Strategy::SOne] {
            let c = cfg(s);
            let r = lambda_exact(&theta_omega(-3, 5), 5, &c).unwrap();
            assert_eq!((r.lambda, r.lower_bound, r.n), (0, false, 1), "{s}");
            let r = lambda_exact(&teichmuller_power(37, 32), 37, &c).unwrap();
            assert_eq!((r.lambda, r.lower_bound, r.n), (1, false, 1), "{s}");
            let r = lambda_exact(&theta_omega(-3, 13), 13, &c).unwrap();
            assert!(r.lambda >= 2 && !r.lower_bound && r.n <= 2, "{s}: {r}");
            let r = lambda_exact(&theta_omega(-3, 7), 7, &c).unwrap();
            assert_eq!(r.lambda, 1, "{s}");
        }
        lambda_exact(&theta_omega(-3, 13), 13, &cfg(Strategy::All)).unwrap();
    }

    #[test]
    fn embedding_and_conjugate_invariance() {
        // order 4 character mod 5 times omega at p = 13 (13 = 1 mod 4)
        let theta = DirichletChar::new(5, &[1]).unwrap();
        let chi = theta.twist(&teichmuller_power(13, 1)).primitive();
        let base = lambda_exact(&chi, 13, &cfg(Strategy::Bernoulli)).unwrap();
        let other = lambda_exact(&chi, 13, &LambdaConfig { variant: 5, ..cfg(Strategy::Bernoulli) }).unwrap();
        assert_eq!(base.lambda, other.lambda);
        for c in chi.qp_conjugates(13) {
            assert_eq!(lambda_exact(&c, 13, &cfg(Strategy::Bernoulli)).unwrap().lambda, base.lambda, "{c}");
        }
    }

    #[test]
    fn field_sums() {
        let c = cfg(Strategy::Bernoulli);
        let r = lambda_field(&DirichletChar::kronecker(-3).unwrap(), 13, &c).unwrap();
        assert!(r.total >= 1);
        let r = lambda_field(&DirichletChar::kronecker(-3).unwrap(), 5, &c).unwrap();
        assert_eq!(r.total, 0);
        // order 6 character mod 7 with theta(p) = 1: p = 29 = 1 mod 7
        let theta = DirichletChar::new(7, &[1]).unwrap();
        let r = lambda_field(&theta, 29, &c).unwrap();
        assert_eq!(r.components.len(), 3);
        assert!(r.components.iter().all(|x| x.rank == Rank::Rank1));
        assert!(r.total >= 3);
    }

    #[test]
    fn condition_table() {
        let c = cfg(Strategy::All);
        let t = rank_one_conditions(&theta_omega(-3, 13), 13, &c).unwrap();
        assert_eq!(t.gt1, [true; 3]);
        assert_eq!(t.gt2[0], t.gt2[1]);
        let t = rank_one_conditions(&theta_omega(-3, 7), 7, &c).unwrap();
        assert_eq!(t.gt1, [false; 3]);
    }

    #[test]
    fn method_round_trip() {
        for m in [Method::RankOneCriteria, Method::RankZeroCriteria, Method::BernoulliTwist(2), Method::SOneTwist(3)] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
    }
}
