//! Generalized Bernoulli numbers `B_{n,chi}` in a local ring, and the
//! classical Bernoulli, Euler and Glaisher numbers.
//!
//! `B_{n,chi} = sum_j C(n,j) B_j F^{j-1} sum_{a=1}^{F} chi(a) a^{n-j}` for any
//! multiple `F` of the conductor. The rational coefficients are scaled by
//! `p^S` once; the sum over `a` then runs in `Z/p^W` and is accumulated per
//! value class of `chi`, so the only ring operation is a final linear
//! combination of roots of unity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{self, Modulus};
use crate::characters::DirichletChar;
use crate::error::{Error, Result};
use crate::padic::{LocalRing, RingElement};

pub use crate::padic::bernoulli_numbers;

/// Guard digits added on top of the requested precision.
pub const GUARD: u32 = 2;

#[derive(Clone, Debug)]
pub struct BernoulliValue {
    pub value: RingElement,
    pub n: u64,
    pub chi: DirichletChar,
    /// Absolute precision that was requested.
    pub precision: i32,
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Coefficients `C(n,j) B_j F^{j-1}` for `j = 0..=n`.
fn coefficients(n: u64, f: u64, bern: &[BigRational]) -> Vec<BigRational> {
    let ff = BigInt::from(f);
    (0..=n)
        .map(|j| {
            let fpow = if j == 0 {
                BigRational::new(BigInt::one(), ff.clone())
            } else {
                rat(ff.pow(j as u32 - 1))
            };
            rat(arith::binomial(n, j)) * &bern[j as usize] * fpow
        })
        .collect()
}

/// `B_{n,chi}` to absolute precision `precision`, with `chi` replaced by the
/// primitive character inducing it and the sum taken over `F = multiple *
/// conductor`.
pub fn generalized_bernoulli_at(
    n: u64,
    chi: &DirichletChar,
    ring: &LocalRing,
    precision: i32,
    multiple: u64,
) -> Result<BernoulliValue> {
    if n == 0 {
        return Err(Error::InvalidInput("index must be at least 1".into()));
    }
    let chi = chi.primitive();
    let p = ring.p();
    let f = chi.conductor() * multiple.max(1);
    let bern = bernoulli_numbers(n as usize);
    let coeffs = coefficients(n, f, &bern);
    let scale = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| -arith::val_rational(c, p).unwrap())
        .max()
        .unwrap_or(0)
        .max(0) as u32;
    let work = (precision.max(1) as u32) + scale + GUARD;
    if work > arith::max_precision(p) {
        return Err(Error::PrecisionCeiling(format!(
            "B_{{{n},chi}} needs p^{work} for p = {p}"
        )));
    }
    let wring = ring.at_precision(work)?;
    let md = Modulus::new(p.pow(work));
    let pscale = rat(BigInt::from(p).pow(scale));
    let c: Vec<u64> = coeffs
        .iter()
        .map(|x| md.from_rational(&(x * &pscale)).expect("scaled coefficient is integral"))
        .collect();

    let order = chi.order();
    let table = chi.exponent_table();
    let m = chi.conductor() as usize;
    let mut sums = vec![0u64; order as usize];
    for a in 1..=f {
        let r = table[(a as usize) % m];
        if r == u32::MAX {
            continue;
        }
        let x = a % md.m;
        let mut acc = 0u64;
        for &cj in &c {
            acc = md.add(md.mul(acc, x), cj);
        }
        let s = &mut sums[r as usize];
        *s = md.add(*s, acc);
    }
    let v = wring.combine_roots(order, &sums, -(scale as i32), work)?;
    Ok(BernoulliValue {
        value: v.change_ring(ring)?,
        n,
        chi,
        precision,
    })
}

/// `B_{n,chi}` to absolute precision `precision` (summing over the conductor).
pub fn generalized_bernoulli(
    n: u64,
    chi: &DirichletChar,
    ring: &LocalRing,
    precision: i32,
) -> Result<BernoulliValue> {
    generalized_bernoulli_at(n, chi, ring, precision, 1)
}

/// Exact `B_{n,chi}` for a character with values in `{0, 1, -1}`.
pub fn generalized_bernoulli_rational(n: u64, chi: &DirichletChar) -> Result<BigRational> {
    if chi.order() > 2 {
        return Err(Error::InvalidInput("exact values need a character of order at most 2".into()));
    }
    let chi = chi.primitive();
    let f = chi.conductor();
    let bern = bernoulli_numbers(n as usize);
    let coeffs = coefficients(n, f, &bern);
    let table = chi.exponent_table();
    // sum_a chi(a) a^{n-j} as big integers
    let mut power_sums = vec![BigInt::zero(); n as usize + 1];
    for a in 1..=f {
        let r = table[(a % f) as usize];
        if r == u32::MAX {
            continue;
        }
        let sign = if r == 0 { 1 } else { -1 };
        let mut pw = BigInt::from(sign);
        let ab = BigInt::from(a);
        for e in 0..=n as usize {
            power_sums[e] += &pw;
            pw *= &ab;
        }
    }
    let mut total = BigRational::zero();
    for (j, cj) in coeffs.iter().enumerate() {
        if !cj.is_zero() {
            total += cj * rat(power_sums[n as usize - j].clone());
        }
    }
    Ok(total)
}

/// Exact `B_{n,chi}` in `Q(zeta_d)`, `d = ord chi`, as coefficients of
/// `1, zeta_d, ..., zeta_d^{phi(d)-1}`.
pub fn generalized_bernoulli_cyclotomic(n: u64, chi: &DirichletChar) -> Vec<BigRational> {
    let chi = chi.primitive();
    let f = chi.conductor();
    let d = chi.order().max(1);
    let bern = bernoulli_numbers(n as usize);
    let coeffs = coefficients(n, f, &bern);
    let table = chi.exponent_table();
    let mut power_sums = vec![vec![BigInt::zero(); n as usize + 1]; d as usize];
    for a in 1..=f {
        let r = table[(a % f) as usize];
        if r == u32::MAX {
            continue;
        }
        let ab = BigInt::from(a);
        let mut pw = BigInt::from(1);
        for e in 0..=n as usize {
            power_sums[r as usize][e] += &pw;
            pw *= &ab;
        }
    }
    let den = coeffs.iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
    let scaled: Vec<BigInt> = power_sums
        .iter()
        .map(|ps| {
            coeffs
                .iter()
                .enumerate()
                .map(|(j, cj)| (cj * rat(den.clone())).to_integer() * &ps[n as usize - j])
                .sum()
        })
        .collect();
    crate::gaussjacobi::cyclotomic_reduce(&scaled)
        .into_iter()
        .map(|x| BigRational::new(x, den.clone()))
        .collect()
}

/// Euler numbers `E_0..=E_n` from `2/(e^x + e^{-x})`.
pub fn euler_numbers(n: usize) -> Vec<BigInt> {
    let mut e: Vec<BigInt> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        if m == 0 {
            e.push(BigInt::one());
            continue;
        }
        if m % 2 == 1 {
            e.push(BigInt::zero());
            continue;
        }
        let mut s = BigInt::zero();
        for k in (0..m).step_by(2) {
            s += arith::binomial(m as u64, k as u64) * &e[k];
        }
        e.push(-s);
    }
    e
}

pub fn euler_number(n: usize) -> BigInt {
    euler_numbers(n).pop().unwrap()
}

/// Glaisher numbers `G_0..=G_n` from `(3/2)/(1 + e^x + e^{-x})`.
pub fn glaisher_numbers(n: usize) -> Vec<BigRational> {
    let mut g: Vec<BigRational> = Vec::with_capacity(n + 1);
    let three = rat(BigInt::from(3));
    for m in 0..=n {
        let mut s = if m == 0 {
            BigRational::new(BigInt::from(3), BigInt::from(2))
        } else {
            BigRational::zero()
        };
        for k in (2..=m).step_by(2) {
            s -= rat(BigInt::from(2) * arith::binomial(m as u64, k as u64)) * &g[m - k];
        }
        g.push(s / &three);
    }
    g
}

pub fn glaisher_number(n: usize) -> BigRational {
    glaisher_numbers(n).pop().unwrap()
}

/// Reduces an exact rational into `Z/p^k`, if `p`-integral.
pub fn reduce_mod(r: &BigRational, p: u64, k: u32) -> Option<u64> {
    if r.is_zero() {
        return Some(0);
    }
    if arith::val_rational(r, p)? < 0 {
        return None;
    }
    Modulus::new(p.pow(k)).from_rational(r)
}
