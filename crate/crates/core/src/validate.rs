//! Cross-formula validation suites: agreement of the `L_p'(0)` routes,
//! congruences between `s = 1 - p` and `s = 1`, and exact identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::bernoulli::{euler_numbers, generalized_bernoulli_cyclotomic, generalized_bernoulli_rational, glaisher_numbers};
use crate::characters::{primitive_characters, teichmuller_power, DirichletChar};
use crate::error::{Error, Result};
use crate::gaussjacobi::{cyclic_conj, cyclic_mul, cyclotomic_reduce, ResidueSymbol, MAX_FIELD_SIZE};
use crate::lvalues::{
    lp_at_nonpositive, lp_at_one, lp_deriv_at_nonpositive, lp_deriv_at_one, lp_deriv_zero_gamma,
    lp_deriv_zero_jacobi, lp_deriv_zero_washington, ring_for,
};
use crate::padic::{GammaTable, LocalRing, RingElement};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport { name: name.into(), ..Default::default() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn record<T>(&mut self, r: Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(x) => Some(x),
            Err(e) => {
                self.checked += 1;
                self.failures.push(format!("{}: {e}", what()));
                None
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}: {} checks, {} failures", self.name, self.checked, self.failures.len())?;
        for x in &self.failures {
            writeln!(f, "  {x}")?;
        }
        Ok(())
    }
}

fn agree_mod(a: &RingElement, b: &RingElement, k: i32) -> bool {
    a.sub(b).truncate(k).is_zero()
}

/// Odd primitive characters of order 2 or 6 (quadratic, and cubic times a
/// quadratic sign) with conductor at most `d_max`.
pub fn quadratic_and_cubic_odd(d_max: u64) -> Vec<DirichletChar> {
    let mut out = Vec::new();
    for c in 3..=d_max {
        for ord in [2u64, 6] {
            out.extend(primitive_characters(c, ord).into_iter().filter(|t| t.is_odd()));
        }
    }
    out
}

/// Gamma, Washington and (where `theta(p) = 1` and the residue field has
/// degree `F <= f_max`) Jacobi-sum values of `L_p'(0, theta omega)` agree
/// mod `p^2`.
pub fn routes_suite(d_max: u64, p_max: u64, f_max: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("routes");
    for theta in quadratic_and_cubic_odd(d_max) {
        let d = theta.conductor();
        for p in arith::primes_up_to(p_max) {
            if p == 2 || d % p == 0 {
                continue;
            }
            let big_f = arith::mult_order(p % d, d);
            if big_f > f_max {
                continue;
            }
            let chi = theta.twist(&teichmuller_power(p, 1)).primitive();
            let tag = || format!("{theta} p = {p}");
            let Some(ring) = rep.record(ring_for(&chi, p, 5, d), tag) else { continue };
            let Some(g) = rep.record(lp_deriv_zero_gamma(&chi, &ring, 2), || format!("{theta} p = {p} gamma")) else {
                continue;
            };
            if let Some(w) = rep.record(lp_deriv_zero_washington(&chi, 1, &ring, 2), || format!("{theta} p = {p} washington")) {
                rep.check(agree_mod(&g.value, &w.value, 2), || format!("{theta} p = {p}: gamma {} vs washington {}", g.value, w.value));
            }
            let q = p.checked_pow(big_f as u32).unwrap_or(u64::MAX);
            if theta.value_at_is_one(p as i64) && q <= MAX_FIELD_SIZE {
                if let Some(j) = rep.record(lp_deriv_zero_jacobi(&chi, &ring, 2), || format!("{theta} p = {p} jacobi")) {
                    rep.check(agree_mod(&g.value, &j.value, 2), || format!("{theta} p = {p}: gamma {} vs jacobi {}", g.value, j.value));
                }
            }
        }
    }
    rep
}

/// A random nontrivial even character `theta omega^i` of the first kind at
/// `p`, with `theta` primitive of conductor at most `c_max`.
pub fn random_even_first_kind(rng: &mut ChaCha8Rng, p: u64, c_max: u64) -> DirichletChar {
    loop {
        let c = rng.gen_range(1..=c_max);
        if c % p == 0 || c == 2 {
            continue;
        }
        let ords = arith::divisors(arith::euler_phi(c).max(1));
        let ord = ords[rng.gen_range(0..ords.len())];
        let thetas = if c == 1 { vec![DirichletChar::trivial(1)] } else { primitive_characters(c, ord) };
        if thetas.is_empty() {
            continue;
        }
        let theta = &thetas[rng.gen_range(0..thetas.len())];
        let i = rng.gen_range(0..p - 1);
        let chi = theta.twist(&teichmuller_power(p, i as i64)).primitive();
        if chi.is_even() && !chi.is_trivial() {
            return chi;
        }
    }
}

/// `L_p(1-p) = L_p(1)` and `L_p'(1-p) = L_p'(1)` mod `p^2` on `samples`
/// random characters spread over `primes`.
pub fn congruence_suite(samples: usize, primes: &[u64], seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("congruences");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..samples {
        let p = primes[s % primes.len()];
        // draw again when the value ring is outside the supported range
        let (chi, ring) = loop {
            let chi = random_even_first_kind(&mut rng, p, 60);
            match ring_for(&chi, p, 5, 1) {
                Err(Error::InvalidInput(_)) => continue,
                r => break (chi, r),
            }
        };
        let tag = || format!("{chi} p = {p}");
        let Some(ring) = rep.record(ring, tag) else { continue };
        let pair = (|| -> Result<_> {
            Ok((
                lp_at_nonpositive(p, &chi, &ring, 3)?.value,
                lp_at_one(&chi, 1, &ring, 3)?.value,
                lp_deriv_at_nonpositive(p, &chi, &ring, 3)?.value,
                lp_deriv_at_one(&chi, 1, &ring, 3)?.value,
            ))
        })();
        if let Some((a, b, da, db)) = rep.record(pair, tag) {
            rep.check(agree_mod(&a, &b, 2), || format!("{chi} p = {p}: L(1-p) {a} vs L(1) {b}"));
            rep.check(agree_mod(&da, &db, 2), || format!("{chi} p = {p}: L'(1-p) {da} vs L'(1) {db}"));
        }
    }
    rep
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Euler and Glaisher numbers against `B_{n, chi_{-4}}` and `B_{n, chi_{-3}}`
/// for `n <= n_max`.
pub fn euler_glaisher_suite(n_max: usize) -> SuiteReport {
    let mut rep = SuiteReport::new("euler-glaisher");
    let e = euler_numbers(n_max);
    let g = glaisher_numbers(n_max);
    let c4 = DirichletChar::kronecker(-4).unwrap();
    let c3 = DirichletChar::kronecker(-3).unwrap();
    for n in 1..=n_max {
        let nn = rat(n as i64);
        let b4 = generalized_bernoulli_rational(n as u64, &c4).unwrap();
        rep.check(BigRational::from_integer(e[n - 1].clone()) / rat(2) == -b4.clone() / &nn, || {
            format!("E_{} / 2 vs -B_{n},chi_-4 / {n} = {}", n - 1, -b4 / &nn)
        });
        let b3 = generalized_bernoulli_rational(n as u64, &c3).unwrap();
        rep.check(BigRational::new(2.into(), 3.into()) * &g[n - 1] == -b3.clone() / &nn, || {
            format!("2 G_{} / 3 vs -B_{n},chi_-3 / {n} = {}", n - 1, -b3 / &nn)
        });
    }
    rep
}

/// `B_{n, chi} = 0` whenever `chi(-1) != (-1)^n`, on random pairs.
pub fn parity_suite(samples: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("parity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < samples {
        let c = rng.gen_range(3..=80u64);
        let ords = arith::divisors(arith::euler_phi(c));
        let chars = primitive_characters(c, ords[rng.gen_range(0..ords.len())]);
        if chars.is_empty() {
            continue;
        }
        let chi = &chars[rng.gen_range(0..chars.len())];
        let n = if chi.is_odd() { 2 * rng.gen_range(1..=12u64) } else { 2 * rng.gen_range(0..12u64) + 1 };
        if n == 1 && chi.is_trivial() {
            continue;
        }
        let b = generalized_bernoulli_cyclotomic(n, chi);
        rep.check(b.iter().all(Zero::is_zero), || format!("B_{n},{chi} = {b:?}"));
        done += 1;
    }
    rep
}

/// Continuity and reflection of Morita's `Gamma_p` on random integers.
pub fn gamma_suite(primes: &[u64], k: u32, samples: usize, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("gamma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &p in primes {
        let t = GammaTable::new(p, k).unwrap();
        let m = t.modulus();
        for _ in 0..samples {
            // x = y mod p^j implies Gamma_p(x) = Gamma_p(y) mod p^j
            let j = rng.gen_range(1..=k);
            let pj = p.pow(j);
            let x = rng.gen_range(0..m);
            let y = (x + pj * rng.gen_range(0..m / pj)) % m;
            rep.check((t.gamma(x) + m - t.gamma(y)) % pj == 0, || format!("continuity p = {p} x = {x} y = {y} j = {j}"));
            // Gamma_p(x) Gamma_p(1 - x) = (-1)^{r}, r in 1..=p with r = x mod p
            let r = if x % p == 0 { p } else { x % p };
            let prod = t.gamma(x) as u128 * t.gamma((1 + m - x) % m) as u128 % m as u128;
            let want = if r % 2 == 0 { 1 } else { m - 1 };
            rep.check(prod as u64 == want, || format!("reflection p = {p} x = {x}"));
        }
    }
    rep
}

/// Each Jacobi sum has norm `q` and each product `J(a, phi)` has norm `q^d`,
/// for `3 <= d <= d_max` and every odd `p` with `q = p^{ord_d p} <= q_max`.
pub fn jacobi_norm_suite(d_max: u64, q_max: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("jacobi-norms");
    for d in 3..=d_max {
        for p in arith::primes_up_to(q_max) {
            if p == 2 || d % p == 0 {
                continue;
            }
            let f = arith::mult_order(p % d, d);
            let q = match p.checked_pow(f as u32) {
                Some(q) if q <= q_max => q,
                _ => continue,
            };
            let tag = || format!("d = {d} p = {p}");
            let Some(ring) = rep.record(LocalRing::new(p, 2, d, 0), tag) else { continue };
            let Some(sym) = rep.record(ResidueSymbol::new(d, &ring), tag) else { continue };
            let norm = |v: &[BigInt]| cyclotomic_reduce(&cyclic_mul(v, &cyclic_conj(v)));
            let constant = |c: BigInt| cyclotomic_reduce(&{
                let mut v = vec![BigInt::zero(); d as usize];
                v[0] = c;
                v
            });
            let qd = constant(BigInt::from(q));
            for u in 1..d as i64 {
                let w = 1;
                if (u + w) % d as i64 == 0 {
                    continue;
                }
                let j: Vec<BigInt> = sym.jacobi_sum(u, w).into_iter().map(BigInt::from).collect();
                rep.check(norm(&j) == qd, || format!("d = {d} p = {p}: |J(phi^{u}, phi)|^2 != q"));
            }
            for a in 1..d {
                if arith::gcd(a, d) != 1 {
                    continue;
                }
                if let Some(j) = rep.record(sym.jacobi_product(a), || format!("d = {d} p = {p} a = {a}")) {
                    let want = constant(BigInt::from(q).pow(d as u32));
                    rep.check(norm(&j) == want, || format!("d = {d} p = {p}: |J({a}, phi)|^2 != q^d"));
                }
            }
        }
    }
    rep
}

/// All identity suites at their default sizes.
pub fn identity_suite(seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new("identities");
    rep.merge(euler_glaisher_suite(20));
    rep.merge(parity_suite(500, seed));
    rep.merge(gamma_suite(&[3, 5, 7, 11, 13], 4, 200, seed));
    rep.merge(jacobi_norm_suite(7, 10_000));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for r in [
            routes_suite(12, 7, 3),
            congruence_suite(10, &[3, 5, 7], 1),
            euler_glaisher_suite(8),
            parity_suite(30, 2),
            gamma_suite(&[3, 5], 3, 50, 3),
            jacobi_norm_suite(5, 200),
        ] {
            assert!(r.passed(), "{r}");
            assert!(r.checked > 0, "{}", r.name);
        }
    }
}
