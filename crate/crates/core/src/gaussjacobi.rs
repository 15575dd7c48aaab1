//! Finite fields, the `d`-th power residue symbol and Jacobi sums as exact
//! elements of `Z[zeta_d]`.
//!
//! Conventions: `g(phi) = -sum_x phi(x) zeta_p^{Tr x}` and
//! `J(phi1, phi2) = -sum_{x + y = 1} phi1(x) phi2(y)`, so that
//! `g(phi)^d = phi(-1) q prod_{j=1}^{d-2} J(phi, phi^j)`.
//!
//! Elements of `Z[zeta_d]` are integer vectors of length `d` in the basis
//! `1, zeta_d, ..., zeta_d^{d-1}` (not reduced modulo the cyclotomic
//! polynomial; use [`cyclotomic_reduce`] before comparing).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{self, Modulus};
use crate::error::{Error, Result};
use crate::padic::{self, iwasawa_log, LocalRing, RingElement};

/// Largest field size for which discrete-log tables are built.
pub const MAX_FIELD_SIZE: u64 = 10_000_000;

/// `F_q = F_p[X]/(h)` with `h` primitive, and the discrete logarithm to base `X`.
pub struct FiniteField {
    p: u64,
    degree: usize,
    q: u64,
    low: Vec<u64>,
    /// `log[idx(x)]`, with `u32::MAX` at zero; `idx` reads the coefficients
    /// as base-`p` digits.
    log: Vec<u32>,
}

impl FiniteField {
    pub fn new(p: u64, degree: usize) -> Result<Self> {
        let q = p
            .checked_pow(degree as u32)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or_else(|| Error::RouteInfeasible(format!("F_{{{p}^{degree}}} is too large")))?;
        let low = padic::primitive_polynomial(p, degree);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = vec![0u64; degree];
        x[0] = 1;
        for s in 0..q - 1 {
            log[index(&x, p)] = s as u32;
            times_x(&mut x, &low, p);
        }
        Ok(FiniteField { p, degree, q, low, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    /// Low coefficients of the defining polynomial.
    pub fn modulus(&self) -> &[u64] {
        &self.low
    }

    /// Discrete log of a nonzero element given by its coefficients.
    pub fn dlog(&self, coeffs: &[u64]) -> Option<u64> {
        let l = self.log[index(coeffs, self.p)];
        (l != u32::MAX).then_some(l as u64)
    }

    /// `hist[alpha * d + beta]` counts `s` with `X^s != 1`, `s = alpha` and
    /// `log(1 - X^s) = beta` mod `d`.
    pub fn pair_histogram(&self, d: u64) -> Vec<u64> {
        let d = d as usize;
        let mut hist = vec![0u64; d * d];
        let mut x = vec![0u64; self.degree];
        x[0] = 1;
        let mut y = vec![0u64; self.degree];
        for s in 0..self.q - 1 {
            for (i, (yi, &xi)) in y.iter_mut().zip(&x).enumerate() {
                let c = if i == 0 { 1 + self.p - xi } else { self.p - xi };
                *yi = c % self.p;
            }
            let l = self.log[index(&y, self.p)];
            if l != u32::MAX {
                hist[(s as usize % d) * d + l as usize % d] += 1;
            }
            times_x(&mut x, &self.low, self.p);
        }
        hist
    }
}

fn index(c: &[u64], p: u64) -> usize {
    c.iter().rev().fold(0u64, |acc, &d| acc * p + d) as usize
}

fn times_x(x: &mut [u64], low: &[u64], p: u64) {
    let f = x.len();
    let top = x[f - 1];
    for i in (1..f).rev() {
        x[i] = x[i - 1];
    }
    x[0] = 0;
    for i in 0..f {
        x[i] = (x[i] + (p - low[i]) * top) % p;
    }
}

/// The character `phi` of `F_q^*` of order `d` that reduces to the `d`-th
/// power residue symbol under a fixed ring embedding:
/// `phi(X^s) = zeta_d^{scale * s}`.
pub struct ResidueSymbol {
    field: FiniteField,
    d: u64,
    scale: u64,
    hist: Vec<u64>,
}

impl ResidueSymbol {
    /// The symbol on `F_q`, `q = p^{ord_d p}`, compatible with the embedding
    /// of `zeta_d` into `ring` (so that `phi(x) = x^{(q-1)/d}` mod the prime).
    pub fn new(d: u64, ring: &LocalRing) -> Result<Self> {
        let p = ring.p();
        if d < 2 || d % p == 0 {
            return Err(Error::InvalidInput(format!("need 2 <= d, p !| d (d = {d}, p = {p})")));
        }
        if !ring.contains_roots_of_unity(d) {
            return Err(Error::EmbeddingUnavailable {
                order: d,
                p,
                f: ring.f(),
                wild_level: ring.wild_level(),
            });
        }
        let f = arith::mult_order(p % d, d) as usize;
        let field = FiniteField::new(p, f)?;
        let scale = embedding_scale(&field, ring.f()) % d;
        let hist = field.pair_histogram(d);
        Ok(ResidueSymbol { field, d, scale, hist })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn order(&self) -> u64 {
        self.d
    }

    /// Exponent `r` with `phi(x) = zeta_d^r`, for `x = X^s`.
    pub fn exponent_at_log(&self, s: u64) -> u64 {
        (self.scale * (s % self.d)) % self.d
    }

    /// Exponent of `phi(-1)`.
    pub fn exponent_of_minus_one(&self) -> u64 {
        let s = if self.field.p == 2 { 0 } else { (self.field.q - 1) / 2 };
        self.exponent_at_log(s)
    }

    /// `J(phi^u, phi^w)` as an integer vector.
    pub fn jacobi_sum(&self, u: i64, w: i64) -> Vec<i64> {
        let d = self.d as i64;
        let u = (u.rem_euclid(d) as u64 * self.scale) % self.d;
        let w = (w.rem_euclid(d) as u64 * self.scale) % self.d;
        let dd = self.d as usize;
        let mut out = vec![0i64; dd];
        for alpha in 0..dd {
            for beta in 0..dd {
                let n = self.hist[alpha * dd + beta];
                if n > 0 {
                    let r = (u * alpha as u64 + w * beta as u64) % self.d;
                    out[r as usize] -= n as i64;
                }
            }
        }
        // phi^0 is the trivial character extended by phi^0(0) = 0; the
        // histogram already excludes x = 0 and x = 1.
        out
    }

    /// `J(a, phi) = phi(-1) q prod_{j=1}^{d-2} J(phi^{-a}, phi^{-ja})`,
    /// which equals `g(phi^{-a})^d`.
    pub fn jacobi_product(&self, a: u64) -> Result<Vec<BigInt>> {
        let d = self.d as i64;
        if arith::gcd(a % self.d, self.d) != 1 {
            return Err(Error::InvalidInput(format!("{a} is not a unit mod {d}")));
        }
        let a = a as i64;
        let mut acc = vec![BigInt::zero(); self.d as usize];
        acc[self.exponent_of_minus_one() as usize] = BigInt::from(self.field.q);
        for j in 1..=d - 2 {
            let js = self.jacobi_sum(-a, -j * a);
            let big: Vec<BigInt> = js.into_iter().map(BigInt::from).collect();
            acc = cyclic_mul(&acc, &big);
        }
        Ok(acc)
    }

    /// `sum_{j=1}^{d-2} log J(phi^{-a}, phi^{-ja})`, which is `log J(a, phi)`
    /// since `log(+-q) = 0`, to absolute precision `precision` in `ring`.
    pub fn log_jacobi_product(&self, a: u64, ring: &LocalRing, precision: u32) -> Result<RingElement> {
        let p = ring.p();
        let work = precision + self.field.degree as u32 + crate::bernoulli::GUARD;
        if work > arith::max_precision(p) {
            return Err(Error::PrecisionCeiling(format!("Jacobi route needs p^{work}")));
        }
        let wring = ring.at_precision(work)?;
        let md = Modulus::new(p.pow(work));
        let d = self.d as i64;
        let a = a as i64;
        let mut acc = wring.zero();
        for j in 1..=d - 2 {
            let js = self.jacobi_sum(-a, -j * a);
            let w: Vec<u64> = js.iter().map(|&c| md.reduce_i64(c)).collect();
            let x = wring.combine_roots(self.d, &w, 0, work)?;
            acc = acc.add(&iwasawa_log(&x)?);
        }
        acc.truncate(precision as i32).change_ring(ring)
    }
}

/// The exponent `c` such that `X` maps to `gamma^c` under an embedding of
/// `F_q` into the residue field `F_{p^fr}` of a ring, where
/// `gamma = Y^{(p^fr - 1)/(q - 1)}` and `Y` is the image of the ring's base
/// generator.
fn embedding_scale(field: &FiniteField, fr: usize) -> u64 {
    let p = field.p;
    let f = field.degree;
    if fr == f {
        return 1;
    }
    assert!(fr % f == 0, "residue degree {fr} is not a multiple of {f}");
    let md = Modulus::new(p);
    let big = padic::primitive_polynomial(p, fr);
    let qr = p.pow(fr as u32);
    let q = field.q;
    let mut y = vec![0u64; fr];
    y[1] = 1;
    let gamma = padic::poly_powmod(&y, (qr - 1) / (q - 1), &big, &md);
    let mut z = gamma.clone();
    for c in 1..q - 1 {
        if arith::gcd(c, q - 1) == 1 {
            // h(z) = z^f + sum low_i z^i by Horner
            let mut acc = vec![0u64; fr];
            acc[0] = 1;
            for i in (0..f).rev() {
                acc = padic::poly_mulmod(&acc, &z, &big, &md);
                acc[0] = md.add(acc[0], field.low[i]);
            }
            if acc.iter().all(|&t| t == 0) {
                return c;
            }
        }
        z = padic::poly_mulmod(&z, &gamma, &big, &md);
    }
    unreachable!("no root of the field polynomial in the residue field")
}

/// Product in `Z[x]/(x^d - 1)`.
pub fn cyclic_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let d = a.len();
    let mut out = vec![BigInt::zero(); d];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[(i + j) % d] += x * y;
            }
        }
    }
    out
}

/// Complex conjugate `sum c_r x^{-r}`.
pub fn cyclic_conj(a: &[BigInt]) -> Vec<BigInt> {
    let d = a.len();
    (0..d).map(|r| a[(d - r) % d].clone()).collect()
}

/// The cyclotomic polynomial `Phi_d`, lowest coefficient first.
pub fn cyclotomic(d: u64) -> Vec<BigInt> {
    // x^d - 1 divided by Phi_e for all proper divisors e
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = -BigInt::one();
    num[d as usize] = BigInt::one();
    for e in arith::divisors(d) {
        if e < d {
            num = exact_div(&num, &cyclotomic(e));
        }
    }
    num
}

fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (k, bk) in b.iter().enumerate() {
            r[i + k] -= &c * bk;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    q
}

/// Canonical representative of `a` modulo `Phi_d` (length `phi(d)`).
pub fn cyclotomic_reduce(a: &[BigInt]) -> Vec<BigInt> {
    let d = a.len() as u64;
    let phi = cyclotomic(d);
    let deg = phi.len() - 1;
    let mut r = a.to_vec();
    for i in (deg..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        for (k, pk) in phi.iter().enumerate() {
            r[i - deg + k] -= &c * pk;
        }
    }
    r.truncate(deg);
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn constant(c: i64, d: u64) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); d as usize];
        v[0] = BigInt::from(c);
        cyclotomic_reduce(&v)
    }

    #[test]
    fn field_logs_are_a_bijection() {
        let ff = FiniteField::new(3, 3).unwrap();
        let mut seen: Vec<u32> = ff.log.iter().copied().filter(|&l| l != u32::MAX).collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..26).collect::<Vec<_>>());
        assert_eq!(ff.dlog(&[1, 0, 0]), Some(0));
        assert_eq!(ff.dlog(&[0, 1, 0]), Some(1));
        assert_eq!(ff.dlog(&[0, 0, 0]), None);
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), big(&[-1, 1]));
        assert_eq!(cyclotomic(3), big(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), big(&[1, 0, 1]));
        assert_eq!(cyclotomic(12), big(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn jacobi_sum_norms() {
        for (p, d) in [(13u64, 3u64), (7, 3), (5, 4), (11, 5), (3, 4), (5, 3), (13, 12)] {
            let ring = LocalRing::new(p, 4, d, 0).unwrap();
            let sym = ResidueSymbol::new(d, &ring).unwrap();
            let q = sym.field().size() as i64;
            for u in 1..d as i64 {
                for w in 1..d as i64 {
                    if (u + w) % d as i64 == 0 {
                        continue;
                    }
                    let j = big(&sym.jacobi_sum(u, w));
                    let n = cyclotomic_reduce(&cyclic_mul(&j, &cyclic_conj(&j)));
                    assert_eq!(n, constant(q, d), "p={p} d={d} u={u} w={w}");
                }
            }
        }
    }

    #[test]
    fn quadratic_products() {
        for (p, q) in [(5u64, 5i64), (13, 13), (3, -3), (7, -7)] {
            let ring = LocalRing::new(p, 3, 2, 0).unwrap();
            let sym = ResidueSymbol::new(2, &ring).unwrap();
            let j = cyclotomic_reduce(&sym.jacobi_product(1).unwrap());
            assert_eq!(j, constant(q, 2));
        }
    }

    /// `g(phi^{-a})^d` by brute force in `Z[x, y]/(x^d - 1, y^p - 1)`, with the
    /// `y`-part reduced modulo `Phi_p`.
    fn gauss_power(sym: &ResidueSymbol, a: u64) -> Vec<BigInt> {
        let ff = sym.field();
        let (p, d) = (ff.p() as usize, sym.order() as usize);
        let f = ff.degree();
        let mut g = vec![BigInt::zero(); d * p];
        // trace of X^s: sum of conjugates' constant terms via the matrix trace
        let md = Modulus::new(ff.p());
        let mut x = vec![0u64; f];
        x[0] = 1;
        for s in 0..ff.size() - 1 {
            // Tr(x) = sum_i coefficient of X^i in x * X^i
            let mut tr = 0u64;
            for i in 0..f {
                let mut prod = x.clone();
                for _ in 0..i {
                    times_x(&mut prod, ff.modulus(), ff.p());
                }
                tr = md.add(tr, prod[i]);
            }
            let r = (sym.exponent_at_log(s) * (d as u64 - a % d as u64)) % d as u64;
            g[r as usize * p + tr as usize] -= 1;
            times_x(&mut x, ff.modulus(), ff.p());
        }
        let mul = |a: &[BigInt], b: &[BigInt]| {
            let mut out = vec![BigInt::zero(); d * p];
            for (i, u) in a.iter().enumerate() {
                if u.is_zero() {
                    continue;
                }
                for (j, v) in b.iter().enumerate() {
                    if !v.is_zero() {
                        let (r1, t1) = (i / p, i % p);
                        let (r2, t2) = (j / p, j % p);
                        out[((r1 + r2) % d) * p + (t1 + t2) % p] += u * v;
                    }
                }
            }
            out
        };
        let mut acc = g.clone();
        for _ in 1..d {
            acc = mul(&acc, &g);
        }
        // reduce y^k (k >= 1) by y^{p-1} = -(1 + ... + y^{p-2}); the result
        // must have no y-dependence
        let mut out = vec![BigInt::zero(); d];
        for r in 0..d {
            let top = acc[r * p + p - 1].clone();
            for t in 0..p - 1 {
                let c = &acc[r * p + t] - &top;
                if t == 0 {
                    out[r] = c;
                } else {
                    assert!(c.is_zero(), "Gauss sum power depends on zeta_p");
                }
            }
        }
        out
    }

    #[test]
    fn product_matches_gauss_sum_power() {
        for (p, d) in [(7u64, 3u64), (13, 3), (5, 4), (3, 4), (11, 5), (3, 5)] {
            let ring = LocalRing::new(p, 3, d, 0).unwrap();
            let sym = ResidueSymbol::new(d, &ring).unwrap();
            for a in 1..d {
                if arith::gcd(a, d) != 1 {
                    continue;
                }
                let lhs = cyclotomic_reduce(&gauss_power(&sym, a));
                let rhs = cyclotomic_reduce(&sym.jacobi_product(a).unwrap());
                assert_eq!(lhs, rhs, "p={p} d={d} a={a}");
            }
        }
    }

    #[test]
    fn symbol_matches_power_residue() {
        // p = 7, d = 3: phi(x) = x^2 mod 7 lifted; its Teichmuller lift is the
        // ring's zeta_3^{phi-exponent}
        let ring = LocalRing::new(7, 4, 6, 0).unwrap();
        let sym = ResidueSymbol::new(3, &ring).unwrap();
        for x in 1..7u64 {
            let s = sym.field().dlog(&[x]).unwrap();
            let r = sym.exponent_at_log(s);
            let z = ring.root_of_unity(3, r).unwrap();
            let t = padic::teichmuller(arith::Modulus::new(7).pow(x, 2) as i64, &ring).unwrap();
            assert!(z.sub(&t).is_zero(), "x = {x}");
        }
    }

    fn gamma_side(p: u64, d: u64, a: u64, k: u32) -> u64 {
        let f = arith::mult_order(p % d, d);
        let md = Modulus::new(p.pow(k));
        let table = padic::GammaTable::new(p, k).unwrap();
        let dinv = md.inv(d % md.m).unwrap();
        let mut s = 0u64;
        let mut apn = a % d;
        for _ in 0..f {
            let x = md.mul(apn, dinv);
            let g = table.gamma(x);
            s = md.add(s, padic::log_unit_int(g as i64, p, k));
            apn = apn * p % d;
        }
        md.mul(s, d % md.m)
    }

    #[test]
    fn gross_koblitz_logs() {
        // (p, d, tame order of the ring); the last cases have residue degree
        // larger than ord_d(p)
        for (p, d, tame) in [(7u64, 3u64, 6u64), (13, 3, 12), (5, 3, 24), (11, 5, 10), (5, 3, 624), (7, 3, 342)] {
            let ring = LocalRing::new(p, 5, tame, 0).unwrap();
            let sym = ResidueSymbol::new(d, &ring).unwrap();
            for a in 1..d {
                if arith::gcd(a, d) != 1 {
                    continue;
                }
                let k = 3;
                let lhs = sym.log_jacobi_product(a, &ring, k).unwrap();
                let rhs = ring.from_int(gamma_side(p, d, a, k) as i64);
                assert!(lhs.sub(&rhs).truncate(k as i32).is_zero(), "p={p} d={d} a={a}: {lhs} vs {rhs}");
            }
        }
    }
}
