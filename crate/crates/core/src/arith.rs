//! Small-integer number theory used throughout: modular powers and inverses,
//! factorization, multiplicative orders, primitive roots and p-adic valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arithmetic in `Z/mZ` for `m < 2^63`, products through `u128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    pub m: u64,
}

impl Modulus {
    pub fn new(m: u64) -> Self {
        assert!(m >= 1 && m < (1u64 << 63), "modulus out of range");
        Modulus { m }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.m
    }

    #[inline]
    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.m as i64) as u64
    }

    #[inline]
    pub fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.m as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.m as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.m;
        base %= self.m;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit; `None` when `gcd(a, m) > 1`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        mod_inverse(a as i128, self.m as i128).map(|x| x as u64)
    }

    /// Reduces a rational with denominator prime to `m`.
    pub fn from_rational(&self, r: &BigRational) -> Option<u64> {
        let m = BigInt::from(self.m);
        let num = r.numer().mod_floor(&m).to_u64()?;
        let den = r.denom().mod_floor(&m).to_u64()?;
        self.inv(den).map(|d| self.mul(num, d))
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    let e = a.rem_euclid(m).extended_gcd(&m);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            let mut j = i * i;
            while j <= n as usize {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(q, _)| acc / q * (q - 1))
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(n) {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Multiplicative order of `a` modulo `m` (`gcd(a, m) = 1` required).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let md = Modulus::new(m);
    let a = a % m;
    assert_eq!(gcd(a, m), 1, "mult_order of a non-unit");
    let phi = euler_phi(m);
    let mut ord = phi;
    for (q, _) in factorize(phi) {
        while ord % q == 0 && md.pow(a, ord / q) == 1 {
            ord /= q;
        }
    }
    ord
}

/// Smallest primitive root modulo the odd prime `q` that is also a primitive
/// root modulo `q^2` (hence modulo every power of `q`).
pub fn primitive_root_prime_power(q: u64) -> u64 {
    let q2 = q * q;
    let phi2 = q * (q - 1);
    (2..q2)
        .find(|&g| g % q != 0 && mult_order(g, q2) == phi2)
        .expect("odd prime powers are cyclic")
}

/// `v_q(n)` for `n != 0`.
pub fn val_u64(mut n: u64, q: u64) -> u32 {
    assert!(n != 0);
    let mut v = 0;
    while n % q == 0 {
        n /= q;
        v += 1;
    }
    v
}

pub fn val_bigint(n: &BigInt, q: u64) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let q = BigInt::from(q);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (d, r) = n.div_rem(&q);
        if !r.is_zero() {
            return Some(v);
        }
        n = d;
        v += 1;
    }
}

/// `v_q` of a nonzero rational.
pub fn val_rational(r: &BigRational, q: u64) -> Option<i64> {
    let vn = val_bigint(r.numer(), q)?;
    let vd = val_bigint(r.denom(), q).unwrap_or(0);
    Some(vn - vd)
}

pub fn pow_u64(base: u64, exp: u32) -> Option<u64> {
    base.checked_pow(exp)
}

/// Largest `N` with `p^N < 2^63`.
pub fn max_precision(p: u64) -> u32 {
    let mut n = 0;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(p) {
        if next >= (1u64 << 63) {
            break;
        }
        acc = next;
        n += 1;
    }
    n
}

/// Exact binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Discrete logarithm of `a` to base `g` in `(Z/mZ)^*` by baby-step giant-step;
/// `order` is the order of `g`.
pub fn discrete_log(g: u64, a: u64, order: u64, m: u64) -> Option<u64> {
    let md = Modulus::new(m);
    let a = a % m;
    let step = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table = std::collections::HashMap::with_capacity(step as usize);
    let mut cur = 1 % m;
    for j in 0..step {
        table.entry(cur).or_insert(j);
        cur = md.mul(cur, g);
    }
    let giant = md.inv(md.pow(g, step))?;
    let mut gamma = a;
    for i in 0..=step {
        if let Some(&j) = table.get(&gamma) {
            let x = (i * step + j) % order;
            return Some(x);
        }
        gamma = md.mul(gamma, giant);
    }
    None
}

/// Chinese remainder: the `x mod m1*m2` with `x = a1 mod m1`, `x = a2 mod m2`.
pub fn crt_pair(a1: u64, m1: u64, a2: u64, m2: u64) -> u64 {
    let m = m1 as i128 * m2 as i128;
    let inv = mod_inverse(m1 as i128, m2 as i128).expect("coprime moduli");
    let t = ((a2 as i128 - a1 as i128).rem_euclid(m2 as i128) * inv).rem_euclid(m2 as i128);
    ((a1 as i128 + m1 as i128 * t).rem_euclid(m)) as u64
}
