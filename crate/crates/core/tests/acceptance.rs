//! The acceptance criteria, one line each on stdout.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iwasawa_core::arith;
use iwasawa_core::characters::{enumerate_odd, primitive_characters, teichmuller_power, DirichletChar, PConstraint};
use iwasawa_core::harness::{predicted_table, scan_distribution, trivial_zero_prime_search, SurveySpec};
use iwasawa_core::lambda::{self, LambdaConfig, Strategy};
use iwasawa_core::validate;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn say(line: &str) {
    // bypasses the test harness' output capture
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn cfg(strategy: Strategy) -> LambdaConfig {
    LambdaConfig { strategy, ..LambdaConfig::default() }
}

fn theta_omega(theta: &DirichletChar, p: u64) -> DirichletChar {
    theta.twist(&teichmuller_power(p, 1)).primitive()
}

fn c1_trivial_zero_primes() -> Outcome {
    let table: [(i64, &[u64]); 6] =
        [(-3, &[13, 181]), (-11, &[5]), (-19, &[11]), (-35, &[3, 13]), (-47, &[3, 17, 157]), (-83, &[17, 41])];
    let mut bad = Vec::new();
    for (d, want) in table {
        let theta = DirichletChar::kronecker(d).unwrap();
        match trivial_zero_prime_search(&theta, 199, &cfg(Strategy::Bernoulli)) {
            Ok(hits) => {
                let got: BTreeSet<u64> = hits.iter().map(|h| h.p).collect();
                let want: BTreeSet<u64> = want.iter().copied().collect();
                if got != want || hits.iter().any(|h| h.f != 1) {
                    bad.push(format!("Q(sqrt {d}): {got:?}"));
                }
            }
            Err(e) => bad.push(format!("Q(sqrt {d}): {e}")),
        }
    }
    ok(bad.is_empty(), if bad.is_empty() { "6 fields, all sets equal, f = 1".into() } else { bad.join("; ") })
}

fn c2_predicted_rows() -> Outcome {
    // printed rows; the last entry is the tail column lambda >= k
    let rows: [(u64, &[f64]); 6] = [
        (3, &[0.5601, 0.2801, 0.1050, 0.0364, 0.0123, 0.0041, 0.0020]),
        (3, &[0.5601, 0.2801, 0.1050, 0.0364, 0.0123, 0.0041, 0.0014, 0.0007]),
        (5, &[0.7603, 0.1901, 0.0396, 0.0080, 0.0016, 0.0003, 0.0001]),
        (7, &[0.8368, 0.1395, 0.0203, 0.0029, 0.0004, 0.0001, 0.0000]),
        (11, &[0.9008, 0.0901, 0.0091]),
        (13, &[0.9172, 0.0764, 0.0064]),
    ];
    let r4 = |x: f64| (x * 1e4).round() / 1e4;
    let mut bad = Vec::new();
    let mut cells = 0;
    for (p, want) in rows {
        let (cols, tail) = want.split_at(want.len() - 1);
        let got: Vec<f64> = predicted_table(p, 1, want.len()).into_iter().map(r4).collect();
        cells += cols.len();
        if got[..cols.len()] != *cols {
            bad.push(format!("p = {p}: {got:?}"));
        }
        // the printed tails follow two conventions: the exact tail, or one
        // minus the printed cells
        let from_cells = r4(1.0 - cols.iter().sum::<f64>());
        if tail[0] != got[cols.len()] && tail[0] != from_cells {
            bad.push(format!("p = {p}: tail {} vs {} / {from_cells}", tail[0], got[cols.len()]));
        }
    }
    ok(bad.is_empty(), if bad.is_empty() { format!("{cells} printed cells equal at 4 decimals, 6 tails") } else { bad.join("; ") })
}

fn c3_distribution() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, target) in [(5u64, 0.7782), (7, 0.8419)] {
        let spec = SurveySpec::rank_one(p, 2, 4999);
        match scan_distribution(&spec, None, None) {
            Ok(r) => {
                let x = r.proportion(1);
                pass &= (x - target).abs() <= 0.05 && r.failures.is_empty();
                parts.push(format!("p = {p}: N = {}, lambda=1 {x:.4} vs {target}", r.total));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("p = {p}: {e}"));
            }
        }
    }
    ok(pass, parts.join("; "))
}

/// Rank-one quadratic family of criteria 4 and 7.
fn rank_one_family() -> Vec<(DirichletChar, u64)> {
    let mut out = Vec::new();
    for p in arith::primes_up_to(31).into_iter().filter(|&p| p > 2) {
        for theta in enumerate_odd(2, 1, 2000, p, PConstraint::ThetaPIsOne, false) {
            out.push((theta_omega(&theta, p), p));
        }
    }
    out
}

fn c4_criterion_equivalence(family: &[(DirichletChar, u64)]) -> Outcome {
    let c = cfg(Strategy::All);
    let mut bad = Vec::new();
    let (mut gt1, mut gt2) = (0, 0);
    for (chi, p) in family {
        match lambda::rank_one_conditions(chi, *p, &c) {
            Ok(t) => {
                if t.gt1.iter().any(|&x| x != t.gt1[0]) {
                    bad.push(format!("{chi} p = {p}: lambda > 1 tests {:?}", t.gt1));
                } else if t.gt1[0] {
                    gt1 += 1;
                    if t.gt2[0] != t.gt2[1] {
                        bad.push(format!("{chi} p = {p}: lambda > 2 tests {:?}", t.gt2));
                    } else if t.gt2[0] {
                        gt2 += 1;
                    }
                }
            }
            Err(e) => bad.push(format!("{chi} p = {p}: {e}")),
        }
    }
    let detail = format!("{} characters, {gt1} with lambda > 1, {gt2} with lambda > 2, {} disagreements", family.len(), bad.len());
    ok(bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", bad[..bad.len().min(5)].join("; ")) })
}

fn c5_congruences() -> Outcome {
    let r = validate::congruence_suite(200, &[3, 5, 7, 11, 13], 5);
    ok(r.passed(), format!("{} checks on 200 characters, {} failures {:?}", r.checked, r.failures.len(), r.failures.first()))
}

fn c6_routes() -> Outcome {
    let r = validate::routes_suite(40, 13, 6);
    ok(r.passed(), format!("{} comparisons, {} failures {:?}", r.checked, r.failures.len(), r.failures.first()))
}

fn c7_strategies(family: &[(DirichletChar, u64)]) -> Outcome {
    let mut bad = Vec::new();
    for (chi, p) in family {
        let a = lambda::lambda_exact(chi, *p, &cfg(Strategy::Bernoulli));
        let b = lambda::lambda_exact(chi, *p, &cfg(Strategy::SOne));
        match (a, b) {
            (Ok(a), Ok(b)) if (a.lambda, a.lower_bound) == (b.lambda, b.lower_bound) => {}
            (Ok(a), Ok(b)) => bad.push(format!("{chi} p = {p}: {} vs {}", a.lambda, b.lambda)),
            (Err(e), _) | (_, Err(e)) => bad.push(format!("{chi} p = {p}: {e}")),
        }
    }
    let detail = format!("{} characters, {} disagreements", family.len(), bad.len());
    ok(bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", bad[..bad.len().min(5)].join("; ")) })
}

fn c8_identities() -> Outcome {
    let r = validate::identity_suite(8);
    ok(r.passed(), format!("{} checks, {} failures {:?}", r.checked, r.failures.len(), r.failures.first()))
}

fn c9_galois() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let primes = [3u64, 5, 7, 11, 13];
    let mut bad = Vec::new();
    let (mut done, mut conj, mut split_f) = (0, 0, 0);
    while done < 100 {
        let p = primes[rng.gen_range(0..primes.len())];
        let c = rng.gen_range(3..=60u64);
        if c % p == 0 {
            continue;
        }
        let ord = rng.gen_range(3..=8u64);
        let thetas = primitive_characters(c, ord);
        if thetas.is_empty() {
            continue;
        }
        let theta = &thetas[rng.gen_range(0..thetas.len())];
        let chi = theta.twist(&teichmuller_power(p, rng.gen_range(0..p as i64 - 1))).primitive();
        if !chi.is_even() || chi.is_trivial() || chi.order() <= 2 {
            continue;
        }
        done += 1;
        let base = match lambda::lambda_exact(&chi, p, &cfg(Strategy::Bernoulli)) {
            Ok(r) => (r.lambda, r.lower_bound),
            Err(e) => {
                bad.push(format!("{chi} p = {p}: {e}"));
                continue;
            }
        };
        if lambda::value_ring_shape(&chi, p).0 > 1 {
            split_f += 1;
        }
        let variant = LambdaConfig { variant: 3, ..cfg(Strategy::Bernoulli) };
        let mut runs: Vec<(String, DirichletChar, &LambdaConfig)> = vec![("variant".into(), chi.clone(), &variant)];
        let plain = cfg(Strategy::Bernoulli);
        for c in chi.qp_conjugates(p) {
            runs.push((format!("conjugate {c}"), c, &plain));
        }
        for (what, c, k) in runs {
            conj += 1;
            match lambda::lambda_exact(&c, p, k) {
                Ok(r) if (r.lambda, r.lower_bound) == base => {}
                Ok(r) => bad.push(format!("{chi} p = {p} {what}: {} vs {}", r.lambda, base.0)),
                Err(e) => bad.push(format!("{chi} p = {p} {what}: {e}")),
            }
        }
    }
    let detail = format!("100 characters ({split_f} with f > 1), {conj} recomputations, {} mismatches", bad.len());
    ok(bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}: {}", bad[..bad.len().min(5)].join("; ")) })
}

fn c10_degree_two() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (order, cond, p) in [(4u64, 187u64, 19u64), (6, 259, 5), (8, 187, 13)] {
        let mut found = Vec::new();
        for theta in enumerate_odd(order, cond, cond, p, PConstraint::ThetaPIsOne, false) {
            let chi = theta_omega(&theta, p);
            match lambda::lambda_gt(&chi, p, 1, &cfg(Strategy::Bernoulli)) {
                Ok(r) if r.holds && r.rank == lambda::Rank::Rank1 => {
                    found.push((theta.to_string(), lambda::value_ring_shape(&chi, p).0));
                }
                Ok(_) => {}
                Err(e) => {
                    pass = false;
                    parts.push(format!("{theta} p = {p}: {e}"));
                }
            }
        }
        let hit = found.iter().any(|(_, f)| *f == 2);
        pass &= hit;
        parts.push(format!("order {order} cond {cond} p = {p}: {} hits, f = {:?}", found.len(), found.iter().map(|x| x.1).collect::<Vec<_>>()));
    }
    ok(pass, parts.join("; "))
}

#[test]
fn acceptance() {
    let family = rank_one_family();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 trivial-zero primes", Box::new(c1_trivial_zero_primes)),
        ("2 predicted rows", Box::new(c2_predicted_rows)),
        ("3 desk-scale distribution", Box::new(c3_distribution)),
        ("4 criterion equivalence", Box::new(|| c4_criterion_equivalence(&family))),
        ("5 congruences", Box::new(c5_congruences)),
        ("6 route agreement", Box::new(c6_routes)),
        ("7 strategy cross-check", Box::new(|| c7_strategies(&family))),
        ("8 identities", Box::new(c8_identities)),
        ("9 Galois invariance", Box::new(c9_galois)),
        ("10 f=2 rarities", Box::new(c10_degree_two)),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let t = Instant::now();
        let o = run();
        say(&format!(
            "[{}] criterion {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        ));
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
