use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iwasawa_core::characters::{teichmuller_power, DirichletChar, PConstraint};
use iwasawa_core::harness::{self, SurveySpec};
use iwasawa_core::lambda::{self, LambdaConfig, Strategy};
use iwasawa_core::validate;
use iwasawa_core::{Error, Result};

#[derive(Parser)]
#[command(name = "iwasawa", version, about = "Iwasawa lambda-invariants of Dirichlet characters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// lambda of one character (theta omega^i with --i, else the character itself)
    Lambda {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        chr: CharArg,
        #[arg(long)]
        i: Option<i64>,
        /// only test lambda > T (0, 1 or 2)
        #[arg(long)]
        threshold: Option<u32>,
        #[command(flatten)]
        opts: LambdaOpts,
        #[arg(long)]
        json: bool,
    },
    /// lambda distribution over odd characters theta of one order
    Scan {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        order: u64,
        #[arg(long, default_value_t = 1)]
        cond_min: u64,
        #[arg(long)]
        cond_max: u64,
        /// 1: theta(p) = 1, 0: theta(p) != 1
        #[arg(long, value_parser = ["0", "1"])]
        rank: String,
        /// with --rank 0, leave out theta ramified at p
        #[arg(long)]
        unramified: bool,
        #[arg(long, default_value_t = 1)]
        i: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        opts: LambdaOpts,
        #[arg(long)]
        json: bool,
    },
    /// primes p <= p-max where theta omega has a trivial zero and lambda > 1
    TrivialZeros {
        #[command(flatten)]
        chr: CharArg,
        #[arg(long)]
        p_max: u64,
        #[command(flatten)]
        opts: LambdaOpts,
        #[arg(long)]
        json: bool,
    },
    /// cross-formula validation suites
    Validate {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// predicted probabilities p^{-fr} prod_{t>r} (1 - p^{-ft})
    Predict {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        f: u32,
        #[arg(long, default_value_t = 6)]
        len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Routes,
    Congruences,
    Identities,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CharArg {
    /// character as m:g1^k1,g2^k2,...
    #[arg(long = "char")]
    spec: Option<String>,
    /// quadratic character of a discriminant, e.g. -3
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
}

impl CharArg {
    fn get(&self) -> Result<DirichletChar> {
        match (&self.spec, self.disc) {
            (Some(s), _) => s.parse(),
            (None, Some(d)) => DirichletChar::kronecker(d),
            _ => Err(Error::InvalidInput("a character is required".into())),
        }
    }
}

#[derive(Args)]
struct LambdaOpts {
    #[arg(long, default_value = "bernoulli")]
    strategy: String,
    #[arg(long, default_value_t = 3)]
    max_n: u32,
    #[arg(long, default_value_t = 4)]
    precision: u32,
}

impl LambdaOpts {
    fn config(&self) -> Result<LambdaConfig> {
        let strategy: Strategy = self.strategy.parse()?;
        let max_precision = lambda::precision_ceiling_from_env();
        if self.precision == 0 || self.precision > max_precision {
            return Err(Error::InvalidInput(format!("precision must be in 1..={max_precision}")));
        }
        if self.max_n == 0 {
            return Err(Error::InvalidInput("max-n must be positive".into()));
        }
        Ok(LambdaConfig { strategy, precision: self.precision, max_precision, max_n: self.max_n, variant: 1 })
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Lambda { p, chr, i, threshold, opts, json } => {
            let cfg = opts.config()?;
            let mut chi = chr.get()?;
            if let Some(i) = i {
                chi = chi.twist(&teichmuller_power(p, i)).primitive();
            }
            match threshold {
                Some(t) => {
                    let r = lambda::lambda_gt(&chi, p, t, &cfg)?;
                    if json {
                        println!("{}", serde_json::to_string(&r)?);
                    } else {
                        println!("chi = {chi}  p = {p}  rank = {}  lambda > {t} : {}  prec = {}", r.rank, r.holds, r.precision);
                        for w in &r.witnesses {
                            println!("  {w}");
                        }
                    }
                }
                None => {
                    let r = lambda::lambda_exact(&chi, p, &cfg)?;
                    if json {
                        println!("{}", serde_json::to_string(&r)?);
                    } else {
                        print!("{r}");
                    }
                }
            }
        }
        Command::Scan { p, order, cond_min, cond_max, rank, unramified, i, out, jobs, opts, json } => {
            let cfg = opts.config()?;
            let spec = SurveySpec {
                p,
                order,
                cond_min,
                cond_max,
                constraint: match (rank.as_str(), unramified) {
                    ("1", _) => PConstraint::ThetaPIsOne,
                    (_, false) => PConstraint::ThetaPNotOne,
                    (_, true) => PConstraint::ThetaPNotZeroOne,
                },
                i,
                strategy: cfg.strategy,
                precision: cfg.precision,
                max_precision: cfg.max_precision,
                max_n: cfg.max_n,
                timings: true,
            };
            let report = harness::scan_distribution(&spec, out.as_deref(), jobs)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", report.table());
            }
        }
        Command::TrivialZeros { chr, p_max, opts, json } => {
            let cfg = opts.config()?;
            let theta = chr.get()?;
            let hits = harness::trivial_zero_prime_search(&theta, p_max, &cfg)?;
            if json {
                println!("{}", serde_json::to_string(&hits)?);
            } else {
                let ps: Vec<String> = hits.iter().map(|h| h.p.to_string()).collect();
                println!("{theta}: [{}]", ps.join(", "));
                for h in &hits {
                    println!("  p = {}  f = {}", h.p, h.f);
                    for w in &h.witnesses {
                        println!("    {w}");
                    }
                }
            }
        }
        Command::Validate { suite, seed } => {
            let rep = match suite {
                Suite::Routes => validate::routes_suite(40, 13, 6),
                Suite::Congruences => validate::congruence_suite(200, &[3, 5, 7, 11, 13], seed),
                Suite::Identities => validate::identity_suite(seed),
            };
            print!("{rep}");
            if !rep.passed() {
                return Err(Error::Inconsistency(format!("{} failures in suite {}", rep.failures.len(), rep.name)));
            }
        }
        Command::Predict { p, f, len } => {
            if p < 2 || f == 0 {
                return Err(Error::InvalidInput("need p >= 2 and f >= 1".into()));
            }
            let row: Vec<String> = harness::predicted_row(p, f, len).iter().map(|x| format!("{x:.4}")).collect();
            println!("{}", row.join(", "));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
