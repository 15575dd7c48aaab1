//! Truncated local rings `Z_p[zeta_{q-1}, zeta_{p^w}] / p^N` and their elements.
//!
//! A ring is the tensor product of an unramified part of degree `f` (the Galois
//! ring `GR(p^N, f)`, presented by a lifted primitive polynomial whose root `y`
//! is a primitive `(p^f - 1)`-st root of unity) and a totally ramified part
//! `Z_p[zeta_{p^w}]` of degree `e = phi(p^w)`. Elements are stored in the basis
//! `zeta^j * y^k` (`0 <= j < e`, `0 <= k < f`) and scaled by an explicit power
//! of `p`, so that quantities like `B_j / p` are represented exactly.
//!
//! Valuations are normalized by `v(p) = 1`; they are read off after changing
//! the wild basis from powers of `zeta` to powers of the uniformizer
//! `pi = zeta - 1`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use crate::arith::{self, Modulus};
use crate::error::{Error, Result};

/// Rational valuation with `v(p) = 1`.
pub type Rational64 = Ratio<i64>;

/// Largest ramified degree we are prepared to multiply in.
const MAX_DEGREE: usize = 4096;

#[derive(Debug)]
struct RingData {
    p: u64,
    precision: u32,
    tame_order: u64,
    wild_level: u32,
    f: usize,
    e: usize,
    q: u64,
    /// `t` such that the stored generator `y` is the image of `zeta_{q-1}^t`.
    variant: u64,
    /// Low coefficients of the monic unramified modulus, mod `p^N`.
    modulus: Vec<u64>,
    /// `p^{w-1}` (0 when unramified).
    wild_step: usize,
    /// `binom[j * e + i] = C(j, i) mod p^N`, for the zeta-to-pi change of basis.
    binom: Vec<u64>,
    pow_p: Vec<u64>,
}

/// Descriptor of the working ring. Cheap to clone and safe to share.
#[derive(Clone, Debug)]
pub struct LocalRing(Arc<RingData>);

impl PartialEq for LocalRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.p() == other.p()
                && self.precision() == other.precision()
                && self.f() == other.f()
                && self.wild_level() == other.wild_level()
                && self.0.modulus == other.0.modulus)
    }
}

// --- polynomial helpers over Z/m (lowest coefficient first) -------------

/// Reduces `a` modulo the monic polynomial `x^deg + low(x)` in place.
fn poly_reduce(a: &mut Vec<u64>, low: &[u64], md: &Modulus) {
    let deg = low.len();
    while a.len() > deg {
        let top = a.pop().unwrap();
        if top == 0 {
            continue;
        }
        let base = a.len() - deg;
        for (i, &c) in low.iter().enumerate() {
            a[base + i] = md.sub(a[base + i], md.mul(top, c));
        }
    }
}

pub(crate) fn poly_mulmod(a: &[u64], b: &[u64], low: &[u64], md: &Modulus) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = md.add(out[i + j], md.mul(x, y));
        }
    }
    poly_reduce(&mut out, low, md);
    out.resize(low.len(), 0);
    out
}

pub(crate) fn poly_powmod(base: &[u64], mut exp: u64, low: &[u64], md: &Modulus) -> Vec<u64> {
    let mut acc = vec![0u64; low.len()];
    acc[0] = 1 % md.m;
    let mut b = base.to_vec();
    b.resize(low.len(), 0);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = poly_mulmod(&acc, &b, low, md);
        }
        b = poly_mulmod(&b, &b, low, md);
        exp >>= 1;
    }
    acc
}

fn is_one(a: &[u64]) -> bool {
    a[0] == 1 && a[1..].iter().all(|&c| c == 0)
}

/// First monic degree-`f` polynomial over `F_p` (in lexicographic order of its
/// low coefficients) for which `x` has order `p^f - 1` and norm equal to the
/// canonical primitive root `g_p`; such a polynomial is irreducible. The norm
/// condition makes `zeta_{p-1}` embed as the Teichmuller lift of `g_p`.
pub(crate) fn primitive_polynomial(p: u64, f: usize) -> Vec<u64> {
    let md = Modulus::new(p);
    let q = p.pow(f as u32);
    let primes: Vec<u64> = arith::factorize(q - 1).into_iter().map(|(r, _)| r).collect();
    let g = arith::primitive_root_prime_power(p) % p;
    let want_low0 = if f % 2 == 0 { g } else { md.neg(g) };
    if f == 1 {
        return vec![want_low0];
    }
    let mut low = vec![0u64; f];
    low[0] = want_low0;
    let mut xr = vec![0u64; f];
    xr[1] = 1;
    loop {
        if is_one(&poly_powmod(&xr, q - 1, &low, &md))
            && primes
                .iter()
                .all(|&r| !is_one(&poly_powmod(&xr, (q - 1) / r, &low, &md)))
        {
            return low;
        }
        // odometer over the non-constant coefficients
        let mut i = 1;
        loop {
            assert!(i < f, "no primitive polynomial found");
            low[i] += 1;
            if low[i] < p {
                break;
            }
            low[i] = 0;
            i += 1;
        }
    }
}

/// Minimal polynomial over `F_p` of `x^t` in `F_p[x]/(low)`.
fn min_poly_of_power(p: u64, low: &[u64], t: u64) -> Vec<u64> {
    let md = Modulus::new(p);
    let f = low.len();
    let mut x = vec![0u64; f];
    if f == 1 {
        x[0] = md.neg(low[0]);
    } else {
        x[1] = 1;
    }
    let root = poly_powmod(&x, t, low, &md);
    conjugate_product(&root, p, low, &md)
}

/// `prod_{i<f} (X - root^{p^i})` computed with coefficients in `Z/m[x]/(low)`;
/// returns the low coefficients (the product is monic of degree `f`), which must
/// be constants.
fn conjugate_product(root: &[u64], p: u64, low: &[u64], md: &Modulus) -> Vec<u64> {
    let f = low.len();
    // polynomial in X with coefficients in the ring, highest degree f
    let mut prod: Vec<Vec<u64>> = vec![{
        let mut one = vec![0u64; f];
        one[0] = 1 % md.m;
        one
    }];
    let mut conj = root.to_vec();
    for _ in 0..f {
        let mut next = vec![vec![0u64; f]; prod.len() + 1];
        for (d, c) in prod.iter().enumerate() {
            // c * X^{d+1}
            for k in 0..f {
                next[d + 1][k] = md.add(next[d + 1][k], c[k]);
            }
            // -c * conj * X^d
            let t = poly_mulmod(c, &conj, low, md);
            for k in 0..f {
                next[d][k] = md.sub(next[d][k], t[k]);
            }
        }
        prod = next;
        conj = poly_powmod(&conj, p, low, md);
    }
    assert!(is_one(&prod[f]));
    prod[..f]
        .iter()
        .map(|c| {
            assert!(c[1..].iter().all(|&z| z == 0), "conjugate product not rational");
            c[0]
        })
        .collect()
}

impl LocalRing {
    /// Builds `Z_p[zeta_{p^f-1}, zeta_{p^w}]/p^N` with `f = ord_{tame_order}(p)`.
    pub fn new(p: u64, precision: u32, tame_order: u64, wild_level: u32) -> Result<Self> {
        Self::with_variant(p, precision, tame_order, wild_level, 1)
    }

    /// Same ring, presented by the lifted minimal polynomial of `zeta^t`
    /// instead of `zeta` (`gcd(t, p^f - 1) = 1`). The embedding of abstract
    /// roots of unity is unchanged; only the internal representation differs.
    pub fn with_variant(
        p: u64,
        precision: u32,
        tame_order: u64,
        wild_level: u32,
        variant: u64,
    ) -> Result<Self> {
        if p == 2 || !arith::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
        }
        if tame_order == 0 || tame_order % p == 0 {
            return Err(Error::InvalidInput(format!(
                "tame order {tame_order} must be positive and prime to {p}"
            )));
        }
        if precision == 0 {
            return Err(Error::InvalidInput("precision must be at least 1".into()));
        }
        if precision > arith::max_precision(p) {
            return Err(Error::PrecisionCeiling(format!(
                "p^{precision} does not fit machine words for p = {p}"
            )));
        }
        let f = arith::mult_order(p % tame_order.max(1), tame_order) as usize;
        let q = p
            .checked_pow(f as u32)
            .ok_or_else(|| Error::InvalidInput("residue field too large".into()))?;
        if arith::gcd(variant, q - 1) != 1 {
            return Err(Error::InvalidInput(format!(
                "variant {variant} not prime to {}",
                q - 1
            )));
        }
        let e = if wild_level == 0 {
            1
        } else {
            ((p - 1) * p.pow(wild_level - 1)) as usize
        };
        if e * f > MAX_DEGREE {
            return Err(Error::InvalidInput(format!(
                "local degree {} exceeds the supported maximum",
                e * f
            )));
        }
        let pn = p.pow(precision);
        let md = Modulus::new(pn);

        let base = primitive_polynomial(p, f);
        let residue_modulus = if variant == 1 {
            base
        } else {
            min_poly_of_power(p, &base, variant)
        };
        // Hensel lift: the conjugates of the Teichmuller lift of x.
        let modulus = {
            let mut x = vec![0u64; f];
            if f == 1 {
                x[0] = md.neg(residue_modulus[0]);
            } else {
                x[1] = 1;
            }
            let mut t = x;
            for _ in 1..precision {
                t = poly_powmod(&t, q, &residue_modulus, &md);
            }
            if f == 1 {
                vec![md.neg(t[0])]
            } else {
                conjugate_product(&t, p, &residue_modulus, &md)
            }
        };

        let wild_step = if wild_level == 0 {
            0
        } else {
            p.pow(wild_level - 1) as usize
        };
        let mut binom = vec![0u64; e * e];
        for j in 0..e {
            binom[j * e] = 1 % pn;
            for i in 1..=j {
                let prev = if i <= j - 1 { binom[(j - 1) * e + i] } else { 0 };
                binom[j * e + i] = md.add(binom[(j - 1) * e + i - 1], prev);
            }
        }
        let pow_p = (0..=precision).map(|k| p.pow(k)).collect();
        Ok(LocalRing(Arc::new(RingData {
            p,
            precision,
            tame_order,
            wild_level,
            f,
            e,
            q,
            variant,
            modulus,
            wild_step,
            binom,
            pow_p,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn precision(&self) -> u32 {
        self.0.precision
    }
    pub fn tame_order(&self) -> u64 {
        self.0.tame_order
    }
    pub fn wild_level(&self) -> u32 {
        self.0.wild_level
    }
    /// Residue class degree.
    pub fn f(&self) -> usize {
        self.0.f
    }
    /// Ramification index `phi(p^w)`.
    pub fn e(&self) -> usize {
        self.0.e
    }
    pub fn residue_size(&self) -> u64 {
        self.0.q
    }
    pub fn variant(&self) -> u64 {
        self.0.variant
    }
    pub fn degree(&self) -> usize {
        self.0.e * self.0.f
    }
    /// Low coefficients of the monic unramified modulus mod `p^N`.
    pub fn unramified_modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    fn pk(&self, k: u32) -> u64 {
        self.0.pow_p[k as usize]
    }

    fn modulus_at(&self, prec: u32) -> Modulus {
        Modulus::new(self.pk(prec).max(1))
    }

    /// Whether `zeta_order` exists in this ring.
    pub fn contains_roots_of_unity(&self, order: u64) -> bool {
        let s = if order == 0 { 0 } else { arith::val_u64(order, self.p()) };
        let tame = order / self.p().pow(s);
        s <= self.wild_level() && (self.0.q - 1) % tame == 0
    }

    /// Coefficient vector (mod `p^prec`) of `zeta_order^exponent` under the
    /// fixed embedding.
    pub fn root_of_unity_coeffs(&self, order: u64, exponent: u64, prec: u32) -> Result<Vec<u64>> {
        if !self.contains_roots_of_unity(order) {
            return Err(Error::EmbeddingUnavailable {
                order,
                p: self.p(),
                f: self.f(),
                wild_level: self.wild_level(),
            });
        }
        let p = self.p();
        let s = arith::val_u64(order, p);
        let ps = p.pow(s);
        let tame = order / ps;
        let x = exponent % order;
        // 1/order = u1/tame + u2/p^s
        let (tame_exp, wild_exp) = if tame == 1 {
            (0, x % ps)
        } else if ps == 1 {
            (x % tame, 0)
        } else {
            let u1 = arith::mod_inverse(ps as i128, tame as i128).unwrap() as u64;
            let u2 = arith::mod_inverse(tame as i128, ps as i128).unwrap() as u64;
            (
                ((x as u128 * u1 as u128) % tame as u128) as u64,
                ((x as u128 * u2 as u128) % ps as u128) as u64,
            )
        };
        let md = self.modulus_at(prec);
        let q1 = self.0.q - 1;
        // abstract zeta_{q-1} is y^{t^{-1}}
        let tinv = arith::mod_inverse(self.0.variant as i128, q1.max(1) as i128).unwrap_or(0) as u64;
        let yexp = if tame == 1 {
            0
        } else {
            ((tame_exp as u128 * (q1 / tame) as u128 % q1 as u128) * tinv as u128 % q1 as u128) as u64
        };
        let unram = self.y_power(yexp, &md);
        let mut out = vec![0u64; self.degree()];
        let f = self.f();
        let e = self.e();
        let zexp = if self.wild_level() == 0 {
            0
        } else {
            let full = p.pow(self.wild_level());
            (wild_exp * (full / ps)) % full
        } as usize;
        if zexp < e {
            out[zexp * f..zexp * f + f].copy_from_slice(&unram);
        } else {
            // zeta^e = -sum_{i<p-1} zeta^{i p^{w-1}}
            let t = zexp - e;
            for i in 0..(p as usize - 1) {
                let j = t + i * self.0.wild_step;
                for k in 0..f {
                    out[j * f + k] = md.sub(out[j * f + k], unram[k]);
                }
            }
        }
        Ok(out)
    }

    /// `y^k` in the unramified part, as `f` coefficients.
    fn y_power(&self, k: u64, md: &Modulus) -> Vec<u64> {
        let f = self.f();
        let low: Vec<u64> = self.0.modulus.iter().map(|&c| c % md.m).collect();
        if f == 1 {
            return vec![md.pow(md.neg(low[0]), k)];
        }
        let mut y = vec![0u64; f];
        y[1] = 1 % md.m;
        poly_powmod(&y, k, &low, md)
    }

    pub fn zero(&self) -> RingElement {
        RingElement::from_unit_coeffs(self, vec![0; self.degree()], 0, self.precision())
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> RingElement {
        self.from_bigint(&BigInt::from(n), self.precision())
    }

    pub fn from_bigint(&self, n: &BigInt, abs_prec: u32) -> RingElement {
        self.from_rational(&BigRational::from_integer(n.clone()), abs_prec as i32)
    }

    /// Embeds a rational number known exactly, truncated to absolute
    /// precision `abs_prec` (capped by the ring precision relative to its
    /// valuation).
    pub fn from_rational(&self, r: &BigRational, abs_prec: i32) -> RingElement {
        if r.is_zero() {
            let mut z = self.zero();
            z.shift = abs_prec;
            z.prec = 0;
            return z;
        }
        let v = arith::val_rational(r, self.p()).unwrap() as i32;
        let prec = (abs_prec - v).clamp(0, self.precision() as i32) as u32;
        let md = self.modulus_at(prec);
        let pv = BigInt::from(self.p()).pow(v.unsigned_abs());
        let unit = if v >= 0 {
            r / BigRational::from_integer(pv)
        } else {
            r * BigRational::from_integer(pv)
        };
        let c = md.from_rational(&unit).expect("unit part has p-free denominator");
        let mut coeffs = vec![0u64; self.degree()];
        coeffs[0] = c;
        RingElement::from_unit_coeffs(self, coeffs, v, prec)
    }

    /// `sum_r weights[r] * zeta_order^r` scaled by `p^shift`; `weights` are
    /// residues mod `p^prec`.
    pub fn combine_roots(
        &self,
        order: u64,
        weights: &[u64],
        shift: i32,
        prec: u32,
    ) -> Result<RingElement> {
        let md = self.modulus_at(prec);
        let mut acc = vec![0u64; self.degree()];
        for (r, &w) in weights.iter().enumerate() {
            if w % md.m == 0 {
                continue;
            }
            let z = self.root_of_unity_coeffs(order, r as u64, prec)?;
            for (a, b) in acc.iter_mut().zip(z) {
                *a = md.add(*a, md.mul(w % md.m, b));
            }
        }
        Ok(RingElement::from_unit_coeffs(self, acc, shift, prec))
    }

    pub fn root_of_unity(&self, order: u64, exponent: u64) -> Result<RingElement> {
        let c = self.root_of_unity_coeffs(order, exponent, self.precision())?;
        Ok(RingElement::from_unit_coeffs(self, c, 0, self.precision()))
    }

    /// The uniformizer `zeta_{p^w} - 1`.
    pub fn uniformizer(&self) -> RingElement {
        let mut z = self.root_of_unity(self.p().pow(self.wild_level()), 1).unwrap();
        z = z.sub(&self.one());
        z
    }

    /// Same ring at a different precision (and same presentation).
    pub fn at_precision(&self, precision: u32) -> Result<LocalRing> {
        LocalRing::with_variant(
            self.p(),
            precision,
            self.tame_order(),
            self.wild_level(),
            self.variant(),
        )
    }

    /// Multiplies two coefficient vectors mod `md`.
    fn mul_coeffs(&self, a: &[u64], b: &[u64], md: &Modulus) -> Vec<u64> {
        let f = self.f();
        let e = self.e();
        let p = self.p() as usize;
        if e == 1 && f == 1 {
            return vec![md.mul(a[0], b[0])];
        }
        let wrap = if self.wild_level() == 0 { 1 } else { p * self.0.wild_step };
        let low: Vec<u64> = self.0.modulus.iter().map(|&c| c % md.m).collect();
        // wild degree up to 2e-2, unramified degree up to 2f-2
        let fw = 2 * f - 1;
        let mut tmp = vec![0u64; wrap.max(e) * fw];
        for j1 in 0..e {
            for k1 in 0..f {
                let x = a[j1 * f + k1];
                if x == 0 {
                    continue;
                }
                for j2 in 0..e {
                    let jj = (j1 + j2) % wrap;
                    for k2 in 0..f {
                        let y = b[j2 * f + k2];
                        if y == 0 {
                            continue;
                        }
                        let idx = jj * fw + k1 + k2;
                        tmp[idx] = md.add(tmp[idx], md.mul(x, y));
                    }
                }
            }
        }
        // reduce unramified degree
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(wrap.max(e));
        for j in 0..wrap.max(e) {
            let mut row = tmp[j * fw..(j + 1) * fw].to_vec();
            if f > 1 {
                poly_reduce(&mut row, &low, md);
            }
            row.resize(f, 0);
            rows.push(row);
        }
        // reduce wild degree: zeta^{e+t} = -sum_{i<p-1} zeta^{t + i p^{w-1}}
        if self.wild_level() > 0 {
            for d in (e..wrap).rev() {
                let t = d - e;
                let top = std::mem::take(&mut rows[d]);
                if top.iter().all(|&c| c == 0) {
                    continue;
                }
                for i in 0..(p - 1) {
                    let j = t + i * self.0.wild_step;
                    for k in 0..f {
                        rows[j][k] = md.sub(rows[j][k], top[k]);
                    }
                }
            }
        }
        let mut out = Vec::with_capacity(e * f);
        for row in rows.iter().take(e) {
            out.extend_from_slice(&row[..f]);
        }
        out
    }
}

/// Valuation with `v(p) = 1`, or a proven lower bound when the element is zero
/// at the available precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Exact(Rational64),
    BelowPrecision(i64),
}

impl Valuation {
    pub fn exact(self) -> Option<Rational64> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::BelowPrecision(_) => None,
        }
    }

    /// `Some(v > t)` when decidable.
    pub fn greater_than(self, t: Rational64) -> Option<bool> {
        match self {
            Valuation::Exact(v) => Some(v > t),
            Valuation::BelowPrecision(b) => (Rational64::from_integer(b) > t).then_some(true),
        }
    }

    /// `Some(v < t)` when decidable.
    pub fn less_than(self, t: Rational64) -> Option<bool> {
        match self {
            Valuation::Exact(v) => Some(v < t),
            Valuation::BelowPrecision(b) => (Rational64::from_integer(b) >= t).then_some(false),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::BelowPrecision(b) => write!(f, ">={b}"),
        }
    }
}

/// `p^shift * u`, with the coefficients of `u` known modulo `p^prec`.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: LocalRing,
    coeffs: Vec<u64>,
    shift: i32,
    prec: u32,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring
            && self.shift == other.shift
            && self.prec == other.prec
            && self.coeffs == other.coeffs
    }
}

impl RingElement {
    /// Builds and normalizes an element from raw coefficients mod `p^prec`.
    pub fn from_unit_coeffs(ring: &LocalRing, coeffs: Vec<u64>, shift: i32, prec: u32) -> Self {
        assert_eq!(coeffs.len(), ring.degree());
        let prec = prec.min(ring.precision());
        let m = ring.pk(prec);
        let coeffs = coeffs.into_iter().map(|c| c % m.max(1)).collect();
        let mut x = RingElement {
            ring: ring.clone(),
            coeffs,
            shift,
            prec,
        };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        let p = self.ring.p();
        while self.prec > 0 && self.coeffs.iter().all(|&c| c % p == 0) {
            if self.coeffs.iter().all(|&c| c == 0) {
                self.shift += self.prec as i32;
                self.prec = 0;
                break;
            }
            for c in self.coeffs.iter_mut() {
                *c /= p;
            }
            self.shift += 1;
            self.prec -= 1;
        }
        if self.prec == 0 {
            self.coeffs.iter_mut().for_each(|c| *c = 0);
        }
    }

    pub fn ring(&self) -> &LocalRing {
        &self.ring
    }
    pub fn shift(&self) -> i32 {
        self.shift
    }
    /// Relative precision of the unit part.
    pub fn relative_precision(&self) -> u32 {
        self.prec
    }
    /// The element is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i32 {
        self.shift + self.prec as i32
    }
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// True when indistinguishable from zero at the current precision.
    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    fn md(&self) -> Modulus {
        self.ring.modulus_at(self.prec)
    }

    /// Coefficients in the basis `pi^i y^k`.
    fn pi_coeffs(&self) -> Vec<u64> {
        let e = self.ring.e();
        let f = self.ring.f();
        if e == 1 {
            return self.coeffs.clone();
        }
        let md = self.md();
        let binom = &self.ring.0.binom;
        let mut out = vec![0u64; e * f];
        for j in 0..e {
            for k in 0..f {
                let c = self.coeffs[j * f + k];
                if c == 0 {
                    continue;
                }
                for i in 0..=j {
                    let b = binom[j * e + i] % md.m;
                    out[i * f + k] = md.add(out[i * f + k], md.mul(c, b));
                }
            }
        }
        out
    }

    pub fn valuation(&self) -> Valuation {
        if self.prec == 0 {
            return Valuation::BelowPrecision(self.shift as i64);
        }
        let e = self.ring.e() as i64;
        let f = self.ring.f();
        let p = self.ring.p();
        let pi = self.pi_coeffs();
        let mut best: Option<Rational64> = None;
        for (idx, &c) in pi.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let i = (idx / f) as i64;
            let v = Rational64::new(arith::val_u64(c, p) as i64 * e + i, e);
            best = Some(match best {
                Some(b) if b <= v => b,
                _ => v,
            });
        }
        let v = best.expect("normalized element has a nonzero coefficient");
        Valuation::Exact(v + Rational64::from_integer(self.shift as i64))
    }

    /// Truncates to absolute precision `abs` (no-op if already coarser).
    pub fn truncate(&self, abs: i32) -> RingElement {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        let prec = (abs - self.shift).max(0) as u32;
        if prec == 0 {
            let mut z = self.ring.zero();
            z.shift = abs;
            return z;
        }
        RingElement::from_unit_coeffs(&self.ring, self.coeffs.clone(), self.shift, prec)
    }

    pub fn neg(&self) -> RingElement {
        let md = self.md();
        RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.iter().map(|&c| md.neg(c)).collect(),
            shift: self.shift,
            prec: self.prec,
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        assert!(self.ring == other.ring, "ring mismatch");
        let abs = self.abs_precision().min(other.abs_precision());
        let s = self.shift.min(other.shift);
        if abs <= s {
            let mut z = self.ring.zero();
            z.shift = abs;
            return z;
        }
        let prec = ((abs - s) as u32).min(self.ring.precision());
        let md = self.ring.modulus_at(prec);
        let mut out = vec![0u64; self.coeffs.len()];
        for x in [self, other] {
            let d = x.shift - s;
            if d as i64 >= prec as i64 || x.is_zero() {
                continue;
            }
            let scale = self.ring.pk(d as u32);
            for (o, &c) in out.iter_mut().zip(&x.coeffs) {
                *o = md.add(*o, md.mul(c % md.m, scale));
            }
        }
        RingElement::from_unit_coeffs(&self.ring, out, s, prec)
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        assert!(self.ring == other.ring, "ring mismatch");
        let shift = self.shift + other.shift;
        if self.is_zero() || other.is_zero() {
            // a zero factor known mod p^a times something of valuation >= s
            let bound = if self.is_zero() {
                self.shift + other.shift.min(other.abs_precision())
            } else {
                other.shift + self.shift.min(self.abs_precision())
            };
            let mut z = self.ring.zero();
            z.shift = bound;
            return z;
        }
        let prec = self.prec.min(other.prec);
        let md = self.ring.modulus_at(prec);
        let c = self.ring.mul_coeffs(&self.coeffs, &other.coeffs, &md);
        RingElement::from_unit_coeffs(&self.ring, c, shift, prec)
    }

    pub fn mul_int(&self, n: i64) -> RingElement {
        self.mul(&self.ring.from_rational(
            &BigRational::from_integer(BigInt::from(n)),
            self.ring.precision() as i32 + arith::val_u64(n.unsigned_abs().max(1), self.ring.p()) as i32,
        ))
    }

    pub fn mul_rational(&self, r: &BigRational) -> RingElement {
        if r.is_zero() {
            let mut z = self.ring.zero();
            z.shift = self.abs_precision().max(self.ring.precision() as i32);
            return z;
        }
        let v = arith::val_rational(r, self.ring.p()).unwrap() as i32;
        let x = self.ring.from_rational(r, v + self.ring.precision() as i32);
        self.mul(&x)
    }

    pub fn pow(&self, mut exp: u64) -> RingElement {
        let mut acc = self.ring.one();
        let mut b = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            exp >>= 1;
        }
        acc
    }

    /// Inverse, when the unit part is a unit of the ring of integers.
    pub fn inv(&self) -> Result<RingElement> {
        if self.is_zero() {
            return Err(Error::Precision("cannot invert an element that is zero at this precision".into()));
        }
        let v = self.valuation().exact().unwrap();
        if *v.denom() != 1 || v != Rational64::from_integer(self.shift as i64) {
            return Err(Error::InvalidInput("inverse of a non-unit multiple of a power of p".into()));
        }
        let md = self.md();
        if self.ring.degree() == 1 {
            let c = md.inv(self.coeffs[0]).unwrap();
            return Ok(RingElement::from_unit_coeffs(&self.ring, vec![c], -self.shift, self.prec));
        }
        let unit = RingElement {
            ring: self.ring.clone(),
            coeffs: self.coeffs.clone(),
            shift: 0,
            prec: self.prec,
        };
        // residue in F_q: zeta = 1 mod pi, so sum the wild rows
        let p = self.ring.p();
        let f = self.ring.f();
        let mdp = Modulus::new(p);
        let mut res = vec![0u64; f];
        for j in 0..self.ring.e() {
            for k in 0..f {
                res[k] = mdp.add(res[k], self.coeffs[j * f + k] % p);
            }
        }
        let low: Vec<u64> = self.ring.0.modulus.iter().map(|&c| c % p).collect();
        let rinv = if f == 1 {
            vec![mdp.inv(res[0]).unwrap()]
        } else {
            poly_powmod(&res, self.ring.residue_size() - 2, &low, &mdp)
        };
        let mut c = vec![0u64; self.ring.degree()];
        c[..f].copy_from_slice(&rinv);
        let mut x = RingElement::from_unit_coeffs(&self.ring, c, 0, self.prec);
        // Newton: the error 1 - u x squares each step
        let one = self.ring.one();
        loop {
            let err = one.sub(&unit.mul(&x));
            if err.is_zero() || err.shift() >= self.prec as i32 {
                break;
            }
            x = x.add(&x.mul(&err));
        }
        let mut out = x.truncate(self.prec as i32);
        out.shift -= self.shift;
        Ok(out)
    }

    #[allow(dead_code)]
    fn pow_u128(&self, mut exp: u128) -> RingElement {
        let mut acc = self.ring.one().truncate(self.abs_precision());
        let mut b = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            exp >>= 1;
        }
        acc
    }

    /// The same element in a ring with the same presentation at another
    /// precision; relative precision is capped by the target ring.
    pub fn change_ring(&self, target: &LocalRing) -> Result<RingElement> {
        let a = &self.ring;
        if a.p() != target.p()
            || a.f() != target.f()
            || a.wild_level() != target.wild_level()
            || a.variant() != target.variant()
        {
            return Err(Error::InvalidInput("rings have different presentations".into()));
        }
        if self.is_zero() {
            let mut z = target.zero();
            z.shift = self.shift;
            z.prec = 0;
            return Ok(z);
        }
        let prec = self.prec.min(target.precision());
        Ok(RingElement::from_unit_coeffs(target, self.coeffs.clone(), self.shift, prec))
    }

    /// Exact rational value when the element lies in the `Z_p`-line, as the
    /// representative in `(-p^a/2, p^a/2]` scaled by `p^shift`.
    pub fn to_rational_approx(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let m = self.ring.pk(self.prec) as i128;
        let mut c = self.coeffs[0] as i128;
        if c > m / 2 {
            c -= m;
        }
        let pw = BigRational::from_integer(BigInt::from(self.ring.p())).pow(self.shift);
        Some(BigRational::from_integer(BigInt::from(c)) * pw)
    }

    /// The constant coefficient times `p^shift` as an integer residue mod `p^abs`
    /// (only meaningful for elements with `shift >= 0`).
    pub fn residue_mod(&self, abs: u32) -> Option<u64> {
        if self.shift < 0 || self.coeffs[1..].iter().any(|&c| c != 0) {
            return None;
        }
        let m = self.ring.p().checked_pow(abs)?;
        let md = Modulus::new(m);
        let s = self.ring.p().checked_pow(self.shift as u32).unwrap_or(0);
        Some(md.mul(self.coeffs[0] % m, s % m))
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(p^{})", self.shift);
        }
        if let Some(r) = self.to_rational_approx() {
            return write!(f, "{} + O(p^{})", r, self.abs_precision());
        }
        write!(
            f,
            "p^{} * {:?} + O(p^{})",
            self.shift,
            self.coeffs,
            self.abs_precision()
        )
    }
}

/// Teichmuller representative of `a` (the `(p-1)`-st root of unity `= a mod p`).
pub fn teichmuller(a: i64, ring: &LocalRing) -> Result<RingElement> {
    let p = ring.p();
    if a.rem_euclid(p as i64) == 0 {
        return Err(Error::InvalidInput(format!("{a} is divisible by {p}")));
    }
    let n = ring.precision();
    let md = ring.modulus_at(n);
    let mut x = md.reduce_i64(a);
    for _ in 1..n {
        x = md.pow(x, p);
    }
    let mut c = vec![0u64; ring.degree()];
    c[0] = x;
    Ok(RingElement::from_unit_coeffs(ring, c, 0, n))
}

/// Teichmuller representative of `a` mod `p^k` as a plain residue.
pub fn teichmuller_int(a: u64, p: u64, k: u32) -> u64 {
    let md = Modulus::new(p.pow(k));
    let mut x = a % md.m;
    for _ in 1..k {
        x = md.pow(x, p);
    }
    x
}

/// Iwasawa logarithm (`log p = 0`, roots of unity map to 0).
pub fn iwasawa_log(x: &RingElement) -> Result<RingElement> {
    if x.is_zero() {
        return Err(Error::Precision("cannot separate unit part".into()));
    }
    let ring = x.ring().clone();
    let p = ring.p();
    let v = x.valuation().exact().unwrap() - Rational64::from_integer(x.shift() as i64);
    let mut unit = RingElement {
        ring: ring.clone(),
        coeffs: x.coeffs.clone(),
        shift: 0,
        prec: x.prec,
    };
    // fractional valuation: pass to u^e / p^{v e}
    let mut divisor: BigInt = BigInt::from(1);
    if !v.is_zero() {
        let e = *v.denom() as u64;
        unit = unit.pow(e);
        unit.shift -= (v * Rational64::from_integer(e as i64)).to_integer() as i32;
        divisor *= e;
    }
    // kill the root of unity part
    let q1 = ring.residue_size() - 1;
    unit = unit.pow(q1);
    divisor *= q1;
    // now unit = 1 + z with v(z) > 0; raise to p-th powers until v(z) > 1/(p-1)
    let one = ring.one();
    let threshold = Rational64::new(1, (p - 1) as i64);
    loop {
        let z = unit.sub(&one);
        match z.valuation() {
            Valuation::BelowPrecision(_) => {
                return Ok(ring.zero().truncate(unit.abs_precision()).mul_rational(
                    &BigRational::new(BigInt::from(1), divisor.clone()),
                ));
            }
            Valuation::Exact(vz) if vz > threshold => break,
            _ => {
                unit = unit.pow(p);
                divisor *= p;
            }
        }
    }
    let z = unit.sub(&one);
    let vz = z.valuation().exact().unwrap();
    let target = z.abs_precision();
    let mut sum = ring.zero().truncate(target);
    let mut zn = z.clone();
    let mut n: u64 = 1;
    loop {
        // remaining terms z^n/n with n > current have valuation >= n vz - log_p n
        let term = zn.mul_rational(&BigRational::new(
            BigInt::from(if n % 2 == 1 { 1 } else { -1 }),
            BigInt::from(n),
        ));
        sum = sum.add(&term);
        n += 1;
        let tail_ok = (n..2 * n + p * p).all(|m| {
            vz * Rational64::from_integer(m as i64) - Rational64::from_integer(log_floor(m, p) as i64)
                >= Rational64::from_integer(target as i64)
        });
        if tail_ok {
            break;
        }
        zn = zn.mul(&z);
    }
    Ok(sum.mul_rational(&BigRational::new(BigInt::from(1), divisor)))
}

fn log_floor(n: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut x = n;
    while x >= p {
        x /= p;
        k += 1;
    }
    k
}

/// Iwasawa logarithm of a nonzero integer, mod `p^k`.
pub fn log_int(a: i64, p: u64, k: u32) -> u64 {
    assert!(a != 0);
    let v = arith::val_u64(a.unsigned_abs(), p);
    let a = a / (p as i64).pow(v);
    log_unit_int(a, p, k)
}

/// Iwasawa logarithm of a `p`-adic unit given by an integer, mod `p^k`:
/// `log(a) = log(a^{p-1}) / (p-1)`, summing the series with enough guard
/// digits that the divisions by `n` stay exact.
pub fn log_unit_int(a: i64, p: u64, k: u32) -> u64 {
    let mut nmax = k as u64 + 2;
    while nmax - log_floor(nmax, p) as u64 <= k as u64 {
        nmax += 1;
    }
    let guard = log_floor(nmax, p) + 1;
    let work = Modulus::new(p.pow(k + guard));
    let md = Modulus::new(p.pow(k));
    let x = work.sub(work.pow(work.reduce_i64(a), p - 1), 1);
    let mut sum = 0u64;
    let mut xn = x;
    for n in 1..=nmax {
        let pv = p.pow(arith::val_u64(n, p));
        let term = md.mul((xn / pv) % md.m, md.inv((n / pv) % md.m).unwrap());
        sum = if n % 2 == 1 { md.add(sum, term) } else { md.sub(sum, term) };
        xn = work.mul(xn, x);
    }
    md.mul(sum, md.inv((p - 1) % md.m).unwrap())
}

/// `log_p a` and `a^{-1}` mod `p^k` for `1 <= a <= n`, both built from their
/// values at primes (entries at multiples of `p` are 0).
pub fn unit_log_inverse_tables(n: u64, p: u64, k: u32) -> (Vec<u64>, Vec<u64>) {
    let md = Modulus::new(p.pow(k));
    let len = n as usize + 1;
    let mut spf = vec![0u32; len];
    let mut logs = vec![0u64; len];
    let mut invs = vec![0u64; len];
    if len > 1 {
        invs[1] = 1 % md.m;
    }
    for a in 2..len {
        if spf[a] == 0 {
            let mut j = a;
            while j < len {
                if spf[j] == 0 {
                    spf[j] = a as u32;
                }
                j += a;
            }
        }
        if a as u64 % p == 0 {
            continue;
        }
        let q = spf[a] as usize;
        if q == a {
            logs[a] = log_unit_int(a as i64, p, k);
            invs[a] = md.inv(a as u64 % md.m).unwrap();
        } else {
            logs[a] = md.add(logs[q], logs[a / q]);
            invs[a] = md.mul(invs[q], invs[a / q]);
        }
    }
    (logs, invs)
}

/// Morita's p-adic gamma at a nonnegative integer, mod `p^k`:
/// `(-1)^n prod_{0<j<n, p !| j} j`.
pub fn padic_gamma_int(n: u64, p: u64, k: u32) -> u64 {
    let md = Modulus::new(p.pow(k));
    let mut acc = 1 % md.m;
    for j in 1..n {
        if j % p != 0 {
            acc = md.mul(acc, j % md.m);
        }
    }
    if n % 2 == 1 {
        md.neg(acc)
    } else {
        acc
    }
}

/// Prefix table of `Gamma_p(n)` for `0 <= n < p^k`, mod `p^k`.
pub struct GammaTable {
    p: u64,
    k: u32,
    values: Vec<u64>,
}

impl GammaTable {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        let size = p
            .checked_pow(k)
            .filter(|&s| s <= 20_000_000)
            .ok_or_else(|| Error::RouteInfeasible(format!("gamma table p^{k} too large for p = {p}")))?;
        let md = Modulus::new(size);
        let mut values = Vec::with_capacity(size as usize);
        let mut acc = 1 % size;
        for n in 0..size {
            values.push(if n % 2 == 1 { md.neg(acc) } else { acc });
            if n % p != 0 {
                acc = md.mul(acc, n);
            }
        }
        Ok(GammaTable { p, k, values })
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.k)
    }

    /// `Gamma_p(x)` for `x` given as a residue mod `p^k`.
    pub fn gamma(&self, x: u64) -> u64 {
        self.values[(x % self.modulus()) as usize]
    }
}

/// `Gamma_p(x)` for `x` in the `Z_p`-line of the ring, via the factorial
/// product (validation route: exponential in the precision).
pub fn padic_gamma(x: &RingElement) -> Result<RingElement> {
    let ring = x.ring();
    let n = ring.precision();
    if x.shift() < 0 || x.coeffs()[1..].iter().any(|&c| c != 0) {
        return Err(Error::InvalidInput("padic_gamma needs an element of Z_p".into()));
    }
    let p = ring.p();
    let k = (x.abs_precision().max(0) as u32).min(n);
    if p.checked_pow(k).map_or(true, |s| s > 50_000_000) {
        return Err(Error::RouteInfeasible("factorial product too long".into()));
    }
    let r = x.residue_mod(k).unwrap_or(0);
    let g = padic_gamma_int(r, p, k);
    let mut c = vec![0u64; ring.degree()];
    c[0] = g;
    Ok(RingElement::from_unit_coeffs(ring, c, 0, k))
}

/// Bernoulli numbers `B_0..=B_n` as exact rationals (`B_1 = -1/2`).
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(BigRational::from_integer(BigInt::from(1)));
    for m in 1..=n {
        if m > 1 && m % 2 == 1 {
            b.push(BigRational::zero());
            continue;
        }
        // sum_{k<m} C(m+1, k) B_k = -(m+1) B_m
        let mut s = BigRational::zero();
        for (k, bk) in b.iter().enumerate() {
            if bk.is_zero() {
                continue;
            }
            s += BigRational::from_integer(arith::binomial(m as u64 + 1, k as u64)) * bk;
        }
        b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    b
}

/// Diamond's log gamma `G_p(X)` for `v(X) < 0`, by its asymptotic series,
/// truncated once every remaining term has valuation at least the target.
pub fn diamond_log_gamma(x: &RingElement) -> Result<RingElement> {
    let ring = x.ring().clone();
    let p = ring.p();
    let vx = match x.valuation() {
        Valuation::Exact(v) if v < Rational64::from_integer(0) => v,
        _ => return Err(Error::InvalidInput("diamond_log_gamma needs v(X) < 0".into())),
    };
    let target = x.abs_precision().min(ring.precision() as i32 + x.shift()) as i64;
    let target = target.max(1);
    let neg = -vx;
    // remaining term j has valuation >= (j-1)|v(X)| - 1 - 2 log_p j
    let mut jmax = 2u64;
    loop {
        let ok = (jmax..jmax + 64).all(|j| {
            neg * Rational64::from_integer(j as i64 - 1)
                - Rational64::from_integer(1 + 2 * log_floor(j, p) as i64)
                >= Rational64::from_integer(target)
        });
        if ok {
            break;
        }
        jmax += 1;
    }
    let bern = bernoulli_numbers(jmax as usize);
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let xinv = x.inv()?;
    let logx = iwasawa_log(x)?;
    let mut acc = x
        .sub(&ring.from_rational(&half, ring.precision() as i32))
        .mul(&logx)
        .sub(x);
    let mut xpow = xinv.clone(); // X^{1-j} for j = 2
    for j in 2..jmax {
        let bj = &bern[j as usize];
        if !bj.is_zero() {
            let c = bj / BigRational::from_integer(BigInt::from(j * (j - 1)));
            acc = acc.add(&xpow.mul_rational(&c));
        }
        xpow = xpow.mul(&xinv);
    }
    Ok(acc)
}

/// Valuation of an exact nonzero rational, as a convenience.
pub fn rational_valuation(r: &BigRational, p: u64) -> Option<i64> {
    arith::val_rational(r, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ring_shapes() {
        let r = LocalRing::new(3, 3, 1, 0).unwrap();
        assert_eq!((r.f(), r.e()), (1, 1));
        let r = LocalRing::new(3, 2, 1, 2).unwrap();
        assert_eq!((r.f(), r.e()), (1, 6));
        let r = LocalRing::new(5, 3, 3, 0).unwrap();
        assert_eq!((r.f(), r.e()), (2, 1));
        assert!(LocalRing::new(2, 3, 1, 0).is_err());
        assert!(LocalRing::new(5, 3, 10, 0).is_err());
    }

    #[test]
    fn unramified_generator_has_full_order() {
        let r = LocalRing::new(7, 4, 19, 0).unwrap();
        let q1 = r.residue_size() - 1;
        let y = r.root_of_unity(q1, 1).unwrap();
        assert_eq!(y.pow(q1), r.one());
        for (l, _) in arith::factorize(q1) {
            assert_ne!(y.pow(q1 / l), r.one());
        }
    }

    #[test]
    fn valuation_examples() {
        let r = LocalRing::new(3, 5, 1, 0).unwrap();
        assert_eq!(r.from_int(18).valuation(), Valuation::Exact(Rational64::from_integer(2)));
        assert_eq!(r.zero().valuation(), Valuation::BelowPrecision(5));
        let r = LocalRing::new(3, 2, 1, 2).unwrap();
        let pi = r.uniformizer();
        assert_eq!(pi.valuation(), Valuation::Exact(Rational64::new(1, 6)));
        assert_eq!(pi.pow(6).valuation(), Valuation::Exact(Rational64::from_integer(1)));
    }

    #[test]
    fn teichmuller_examples() {
        let r = LocalRing::new(5, 2, 1, 0).unwrap();
        assert_eq!(teichmuller(2, &r).unwrap().residue_mod(2), Some(7));
        assert_eq!(teichmuller(1, &r).unwrap(), r.one());
        assert_eq!(teichmuller(4, &r).unwrap(), r.from_int(-1));
        assert!(teichmuller(10, &r).is_err());
        assert_eq!(teichmuller_int(2, 5, 2), 7);
    }

    #[test]
    fn log_examples() {
        let r = LocalRing::new(5, 3, 1, 0).unwrap();
        assert_eq!(iwasawa_log(&r.from_int(6)).unwrap().residue_mod(3), Some(55));
        assert_eq!(log_int(6, 5, 3), 55);
        assert!(iwasawa_log(&r.one()).unwrap().is_zero());
        assert!(iwasawa_log(&r.from_int(25)).unwrap().is_zero());
        assert!(iwasawa_log(&teichmuller(3, &r).unwrap()).unwrap().is_zero());
        assert!(iwasawa_log(&r.zero()).is_err());
        for a in [2i64, 3, 7, 11, 26, -4] {
            let x = iwasawa_log(&r.from_int(a)).unwrap();
            assert_eq!(x.residue_mod(3), Some(log_int(a, 5, 3)), "a = {a}");
        }
    }

    #[test]
    fn log_kills_wild_roots() {
        let r = LocalRing::new(3, 4, 1, 2).unwrap();
        let z = r.root_of_unity(9, 1).unwrap();
        let l = iwasawa_log(&z).unwrap();
        assert!(l.is_zero() && l.abs_precision() >= 2, "{l}");
        let x = r.uniformizer().add(&r.from_int(4));
        let a = r.from_int(4);
        let lhs = iwasawa_log(&x.mul(&a)).unwrap();
        let rhs = iwasawa_log(&x).unwrap().add(&iwasawa_log(&a).unwrap());
        assert!(lhs.sub(&rhs).valuation().greater_than(Rational64::from_integer(1)).unwrap());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(padic_gamma_int(5, 5, 2), 1);
        assert_eq!(padic_gamma_int(1, 7, 3), 343 - 1);
        let t = GammaTable::new(5, 3).unwrap();
        for n in 0..125 {
            assert_eq!(t.gamma(n), padic_gamma_int(n, 5, 3));
        }
        let r = LocalRing::new(5, 2, 1, 0).unwrap();
        assert_eq!(padic_gamma(&r.from_int(5)).unwrap().residue_mod(2), Some(1));
        // Gamma(x) Gamma(1-x) = (-1)^{x0}, x0 in {1..p}, x0 = x mod p
        let p = 7u64;
        let m = p.pow(3);
        let md = Modulus::new(m);
        for x in 1..m {
            let y = (1 + m - x) % m;
            let prod = md.mul(padic_gamma_int(x, p, 3), padic_gamma_int(y, p, 3));
            let x0 = if x % p == 0 { p } else { x % p };
            let expect = if x0 % 2 == 1 { md.neg(1) } else { 1 };
            assert_eq!(prod, expect, "x = {x}");
        }
    }

    #[test]
    fn bernoulli_small() {
        let b = bernoulli_numbers(12);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[12], q(-691, 2730));
        assert!(b[11].is_zero());
    }

    #[test]
    fn diamond_functional_equation() {
        let r = LocalRing::new(5, 6, 1, 0).unwrap();
        for a in [1i64, 2, 3, 7, 13] {
            let x = r.from_rational(&q(a, 5), 5);
            let x1 = r.from_rational(&q(a + 5, 5), 5);
            let lhs = diamond_log_gamma(&x1).unwrap().sub(&diamond_log_gamma(&x).unwrap());
            let d = lhs.sub(&iwasawa_log(&x).unwrap());
            assert!(d.valuation().greater_than(Rational64::from_integer(2)).unwrap(), "a = {a}: {d}");
        }
        assert!(diamond_log_gamma(&r.from_int(3)).is_err());
    }

    #[test]
    fn diamond_matches_rational_partial_sum() {
        let r = LocalRing::new(5, 8, 1, 0).unwrap();
        let x = q(2, 5);
        let g = diamond_log_gamma(&r.from_rational(&x, 7)).unwrap();
        let b = bernoulli_numbers(40);
        let mut tail = BigRational::zero();
        for (j, bj) in b.iter().enumerate().skip(2) {
            if !bj.is_zero() {
                tail += bj / BigRational::from_integer(BigInt::from(j * (j - 1))) * x.pow(1 - j as i32);
            }
        }
        let logx = iwasawa_log(&r.from_rational(&x, 7)).unwrap();
        let main = r
            .from_rational(&(x.clone() - q(1, 2)), 7)
            .mul(&logx)
            .sub(&r.from_rational(&x, 7));
        let d = g.sub(&main.add(&r.from_rational(&tail, 7)));
        assert!(d.valuation().greater_than(Rational64::from_integer(2)).unwrap(), "{d}");
    }

    #[test]
    fn inverse_in_ramified_ring() {
        let r = LocalRing::new(5, 4, 3, 1).unwrap();
        let x = r.root_of_unity(15, 7).unwrap().add(&r.from_int(5)).add(&r.uniformizer());
        assert_eq!(x.mul(&x.inv().unwrap()), r.one());
        let z = r.from_rational(&q(3, 25), 4);
        assert!(z.mul(&z.inv().unwrap()).sub(&r.one()).is_zero());
    }

    #[test]
    fn variants_give_same_valuations() {
        let a = LocalRing::with_variant(7, 3, 8, 1, 1).unwrap();
        let b = LocalRing::with_variant(7, 3, 8, 1, 5).unwrap();
        assert_ne!(a.unramified_modulus(), b.unramified_modulus());
        for e in [3u64, 13, 29, 40] {
            let f = |r: &LocalRing| {
                let z = r.root_of_unity(56, e).unwrap();
                z.add(&r.from_int(1)).add(&r.root_of_unity(8, 3).unwrap()).valuation()
            };
            assert_eq!(f(&a), f(&b));
        }
    }

    #[test]
    fn precision_truncation_is_stable() {
        let lo = LocalRing::new(5, 4, 3, 1).unwrap();
        let hi = LocalRing::new(5, 6, 3, 1).unwrap();
        let calc = |r: &LocalRing| {
            let z = r.root_of_unity(15, 4).unwrap();
            iwasawa_log(&z.add(&r.from_int(5)).mul(&r.from_int(7))).unwrap()
        };
        let a = calc(&lo);
        let b = calc(&hi).truncate(a.abs_precision());
        assert_eq!(a.shift(), b.shift());
        assert_eq!(a.relative_precision(), b.relative_precision());
        let m = 5u64.pow(a.relative_precision());
        assert_eq!(a.coeffs(), b.coeffs().iter().map(|c| c % m).collect::<Vec<_>>());
    }
}
