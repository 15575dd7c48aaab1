//! Dirichlet characters stored as exponents on canonical generators.
//!
//! `(Z/mZ)^*` is split by CRT into prime-power components. An odd component
//! `l^k` is generated by the smallest primitive root mod `l^2`; the component
//! `4` by `3`; a component `2^k` with `k >= 3` by `-1` and `5`. A character
//! records, for each generator `g` of order `o`, an exponent `k` meaning
//! `chi(g) = zeta_o^k`. Text form: `m:g1^k1,g2^k2,...` where `gi` is the
//! generator lifted to `Z/m` (1 on the other components); zero exponents may
//! be omitted.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{self, Modulus};
use crate::error::{Error, Result};
use crate::padic::{teichmuller_int, LocalRing, RingElement};

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Gen {
    prime: u64,
    /// Modulus of the prime-power component.
    comp: u64,
    /// Generator residue mod `comp`.
    residue: u64,
    order: u64,
    exp: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletChar {
    modulus: u64,
    gens: Vec<Gen>,
    order: u64,
    conductor: u64,
    odd: bool,
}

fn canonical_gens(m: u64) -> Vec<Gen> {
    let mut out = Vec::new();
    for (l, k) in arith::factorize(m) {
        let comp = l.pow(k);
        if l == 2 {
            match k {
                1 => {}
                2 => out.push(Gen { prime: 2, comp, residue: 3, order: 2, exp: 0 }),
                _ => {
                    out.push(Gen { prime: 2, comp, residue: comp - 1, order: 2, exp: 0 });
                    out.push(Gen { prime: 2, comp, residue: 5, order: comp / 4, exp: 0 });
                }
            }
        } else {
            let g = arith::primitive_root_prime_power(l) % comp;
            out.push(Gen { prime: l, comp, residue: g, order: comp / l * (l - 1), exp: 0 });
        }
    }
    out
}

/// Generator residues of `(Z/mZ)^*`, lifted to `Z/m`, with their orders.
pub fn generators(m: u64) -> Vec<(u64, u64)> {
    canonical_gens(m)
        .iter()
        .map(|g| (lift(g.residue, g.comp, m), g.order))
        .collect()
}

fn lift(r: u64, comp: u64, m: u64) -> u64 {
    if comp == m {
        r % m
    } else {
        arith::crt_pair(r, comp, 1, m / comp)
    }
}

/// Conductor exponent data of a component character: returns the conductor
/// of the component.
fn component_conductor(gens: &[&Gen]) -> u64 {
    let g0 = gens[0];
    let l = g0.prime;
    if l != 2 {
        let o = g0.order / arith::gcd(g0.exp, g0.order);
        if o == 1 {
            1
        } else if o % l != 0 {
            l
        } else {
            l.pow(arith::val_u64(o, l) + 1)
        }
    } else if g0.comp == 4 {
        if g0.exp % 2 == 1 {
            4
        } else {
            1
        }
    } else {
        let sign = gens[0].exp % 2;
        let five = gens[1];
        let o = five.order / arith::gcd(five.exp, five.order);
        if o > 1 {
            4 * o
        } else if sign == 1 {
            4
        } else {
            1
        }
    }
}

impl DirichletChar {
    /// Character mod `m` with the given exponents on the canonical generators
    /// (in the order returned by [`generators`]).
    pub fn new(m: u64, exps: &[u64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("modulus must be positive".into()));
        }
        let mut gens = canonical_gens(m);
        if exps.len() != gens.len() {
            return Err(Error::InvalidInput(format!(
                "modulus {m} has {} generators, got {} exponents",
                gens.len(),
                exps.len()
            )));
        }
        for (g, &k) in gens.iter_mut().zip(exps) {
            g.exp = k % g.order;
        }
        Ok(Self::from_gens(m, gens))
    }

    pub fn trivial(m: u64) -> Self {
        Self::from_gens(m, canonical_gens(m))
    }

    fn from_gens(modulus: u64, gens: Vec<Gen>) -> Self {
        let order = gens
            .iter()
            .fold(1, |acc, g| arith::lcm(acc, g.order / arith::gcd(g.exp, g.order)));
        let mut conductor = 1;
        let mut i = 0;
        while i < gens.len() {
            let mut j = i + 1;
            while j < gens.len() && gens[j].prime == gens[i].prime {
                j += 1;
            }
            let group: Vec<&Gen> = gens[i..j].iter().collect();
            conductor *= component_conductor(&group);
            i = j;
        }
        // chi(-1) = (-1)^exp on each generator that maps to -1 in its component
        let sign: u64 = gens
            .iter()
            .filter(|g| g.prime != 2 || g.residue == g.comp - 1)
            .map(|g| g.exp)
            .sum();
        DirichletChar {
            modulus,
            gens,
            order,
            conductor,
            odd: sign % 2 == 1,
        }
    }

    /// The quadratic character `(D/.)` of a fundamental discriminant.
    pub fn kronecker(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || d.rem_euclid(4) > 1 {
            return Err(Error::InvalidInput(format!("{d} is not a discriminant")));
        }
        let m = d.unsigned_abs();
        let mut gens = canonical_gens(m);
        for g in gens.iter_mut() {
            let a = lift(g.residue, g.comp, m);
            g.exp = match kronecker_symbol(d, a) {
                1 => 0,
                -1 => g.order / 2,
                _ => return Err(Error::InvalidInput(format!("{d} is not a discriminant"))),
            };
        }
        let chi = Self::from_gens(m, gens);
        if chi.conductor != m {
            return Err(Error::InvalidInput(format!("{d} is not a fundamental discriminant")));
        }
        Ok(chi)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn conductor(&self) -> u64 {
        self.conductor
    }
    pub fn is_odd(&self) -> bool {
        self.odd
    }
    pub fn is_even(&self) -> bool {
        !self.odd
    }
    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }
    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    /// Exponents on the canonical generators.
    pub fn exponents(&self) -> Vec<u64> {
        self.gens.iter().map(|g| g.exp).collect()
    }

    /// `(tame_order, wild_level)` of the smallest ring holding the values at `p`.
    pub fn ring_shape(&self, p: u64) -> (u64, u32) {
        let s = arith::val_u64(self.order, p);
        (self.order / p.pow(s), s)
    }

    /// Exponent `x` with `chi(a) = zeta_order^x`, or `None` when `gcd(a, m) > 1`.
    pub fn value_exponent(&self, a: i64) -> Option<u64> {
        let a = a.rem_euclid(self.modulus as i64) as u64;
        if arith::gcd(a, self.modulus) != 1 {
            return None;
        }
        let mut acc = 0u64;
        let mut i = 0;
        while i < self.gens.len() {
            let g = &self.gens[i];
            let r = a % g.comp;
            if g.prime == 2 && g.comp > 4 {
                let five = &self.gens[i + 1];
                let (s, u) = if r % 4 == 1 { (0, r) } else { (1, g.comp - r) };
                let j = arith::discrete_log(5, u, five.order, g.comp).unwrap();
                acc += self.scaled(g) * s + self.scaled(five) * (j % self.order);
                i += 2;
            } else {
                let j = if g.prime == 2 {
                    if r == 1 { 0 } else { 1 }
                } else {
                    arith::discrete_log(g.residue, r, g.order, g.comp).unwrap()
                };
                acc += self.scaled(g) * (j % self.order);
                i += 1;
            }
            acc %= self.order;
        }
        Some(acc % self.order)
    }

    /// Exponent of `zeta_order` contributed by one step along the generator.
    fn scaled(&self, g: &Gen) -> u64 {
        (g.exp as u128 * self.order as u128 / g.order as u128) as u64 % self.order
    }

    /// `chi(a)` as an element of `ring`.
    pub fn evaluate(&self, a: i64, ring: &LocalRing) -> Result<RingElement> {
        match self.value_exponent(a) {
            None => Ok(ring.zero()),
            Some(x) => ring.root_of_unity(self.order, x),
        }
    }

    /// `table[a]` = exponent of `chi(a)` for `0 <= a < m`, `u32::MAX` off the units.
    pub fn exponent_table(&self) -> Vec<u32> {
        let m = self.modulus as usize;
        let ord = self.order;
        let mut comps: Vec<(u64, Vec<u32>)> = Vec::new();
        let mut i = 0;
        while i < self.gens.len() {
            let g = &self.gens[i];
            let c = g.comp as usize;
            let mut t = vec![NONE; c];
            let md = Modulus::new(g.comp);
            if g.prime == 2 && g.comp > 4 {
                let five = &self.gens[i + 1];
                let (s1, s5) = (self.scaled(g), self.scaled(five));
                let mut x = 1u64;
                let mut e = 0u64;
                for _ in 0..five.order {
                    t[x as usize] = e as u32;
                    t[(g.comp - x) as usize] = ((e + s1) % ord) as u32;
                    x = md.mul(x, 5);
                    e = (e + s5) % ord;
                }
                i += 2;
            } else {
                let s = self.scaled(g);
                let mut x = 1u64;
                let mut e = 0u64;
                for _ in 0..g.order {
                    t[x as usize] = e as u32;
                    x = md.mul(x, g.residue);
                    e = (e + s) % ord;
                }
                i += 1;
            }
            comps.push((g.comp, t));
        }
        // the factor 2 of m contributes no generator but still kills even a
        let even_modulus = self.modulus % 2 == 0;
        let mut out = vec![0u32; m];
        for (a, slot) in out.iter_mut().enumerate() {
            if even_modulus && a % 2 == 0 {
                *slot = NONE;
                continue;
            }
            let mut acc = 0u64;
            let mut unit = true;
            for (c, t) in &comps {
                let v = t[a % *c as usize];
                if v == NONE {
                    unit = false;
                    break;
                }
                acc += v as u64;
            }
            *slot = if unit { (acc % ord) as u32 } else { NONE };
        }
        out
    }

    /// The primitive character inducing this one.
    pub fn primitive(&self) -> DirichletChar {
        if self.is_primitive() {
            return self.clone();
        }
        let c = self.conductor;
        let mut gens = canonical_gens(c);
        for g in gens.iter_mut() {
            let old: Vec<&Gen> = self.gens.iter().filter(|h| h.prime == g.prime).collect();
            g.exp = if g.prime != 2 {
                // zeta_{o_old}^k = zeta_{o_new}^{k o_new / o_old}
                old[0].exp / (old[0].order / g.order)
            } else if g.comp == 4 {
                // generator 3 = -1
                old[0].exp % 2
            } else if g.residue == g.comp - 1 {
                old[0].exp
            } else {
                let five = old[1];
                five.exp / (five.order / g.order)
            };
        }
        Self::from_gens(c, gens)
    }

    /// The character induced to modulus `m` (a multiple of the conductor).
    pub fn induce(&self, m: u64) -> Result<DirichletChar> {
        if m % self.conductor != 0 {
            return Err(Error::InvalidInput(format!(
                "{m} is not a multiple of the conductor {}",
                self.conductor
            )));
        }
        let prim = self.primitive();
        let mut gens = canonical_gens(m);
        for g in gens.iter_mut() {
            let old: Vec<&Gen> = prim.gens.iter().filter(|h| h.prime == g.prime).collect();
            if old.is_empty() {
                continue;
            }
            g.exp = if g.prime != 2 {
                old[0].exp * (g.order / old[0].order)
            } else if old[0].comp == 4 {
                // only the sign survives
                if g.comp == 4 || g.residue == g.comp - 1 {
                    old[0].exp
                } else {
                    0
                }
            } else if g.residue == g.comp - 1 {
                old[0].exp
            } else {
                old[1].exp * (g.order / old[1].order)
            };
        }
        Ok(Self::from_gens(m, gens))
    }

    /// Product character at the lcm of the moduli.
    pub fn twist(&self, other: &DirichletChar) -> DirichletChar {
        let m = arith::lcm(self.modulus, other.modulus);
        let a = self.primitive().induce(m).unwrap();
        let b = other.primitive().induce(m).unwrap();
        let gens = a
            .gens
            .iter()
            .zip(&b.gens)
            .map(|(x, y)| Gen { exp: (x.exp + y.exp) % x.order, ..x.clone() })
            .collect();
        Self::from_gens(m, gens)
    }

    pub fn pow(&self, t: i64) -> DirichletChar {
        let gens = self
            .gens
            .iter()
            .map(|g| Gen {
                exp: ((g.exp as i128 * t as i128).rem_euclid(g.order as i128)) as u64,
                ..g.clone()
            })
            .collect();
        Self::from_gens(self.modulus, gens)
    }

    pub fn conj(&self) -> DirichletChar {
        self.pow(-1)
    }

    /// Exponents `t mod order` whose powers `chi^t` are the `Q_p`-conjugates of
    /// `chi`: `t` ranges over units with `t mod d'` in the subgroup generated by
    /// `p`, where `d'` is the prime-to-`p` part of the order.
    pub fn qp_conjugate_exponents(&self, p: u64) -> Vec<u64> {
        let d = self.order;
        let s = arith::val_u64(d, p);
        let tame = d / p.pow(s);
        let mut powers = vec![1 % tame];
        if tame > 1 {
            let mut x = p % tame;
            while x != 1 {
                powers.push(x);
                x = x * p % tame;
            }
        }
        (1..=d)
            .map(|t| t % d)
            .filter(|&t| arith::gcd(t, d) == 1 && (tame == 1 || powers.contains(&(t % tame))))
            .collect()
    }

    /// All characters `chi^t`, `t` a unit mod the order.
    pub fn q_conjugates(&self) -> Vec<DirichletChar> {
        (1..=self.order)
            .filter(|&t| arith::gcd(t, self.order) == 1)
            .map(|t| self.pow(t as i64))
            .collect()
    }

    pub fn qp_conjugates(&self, p: u64) -> Vec<DirichletChar> {
        self.qp_conjugate_exponents(p)
            .into_iter()
            .map(|t| self.pow(t as i64))
            .collect()
    }

    /// Canonical representative (smallest exponent vector) of the `Q_p`-orbit.
    pub fn qp_orbit_representative(&self, p: u64) -> DirichletChar {
        self.qp_conjugates(p)
            .into_iter()
            .min_by_key(|c| c.exponents())
            .unwrap_or_else(|| self.clone())
    }

    /// Splits `chi = theta * omega^i * psi` at the odd prime `p`.
    pub fn decompose(&self, p: u64) -> CharDecomposition {
        let prim = self.primitive();
        let mut theta_gens = Vec::new();
        let mut i = 0u64;
        let mut psi: Option<(u32, u64)> = None; // (k, exponent of zeta_{p^{k-1}} at g_p)
        for g in &prim.gens {
            if g.prime != p {
                theta_gens.push(g.clone());
                continue;
            }
            let k = arith::val_u64(g.comp, p);
            let pk1 = p.pow(k - 1);
            // 1/((p-1) p^{k-1}) = u1/(p-1) + u2/p^{k-1}
            let u1 = arith::mod_inverse(pk1 as i128, (p - 1) as i128).unwrap() as u64;
            let u2 = if pk1 == 1 { 0 } else { arith::mod_inverse((p - 1) as i128, pk1 as i128).unwrap() as u64 };
            i = (g.exp % (p - 1)) * (u1 % (p - 1)) % (p - 1);
            let w = if pk1 == 1 { 0 } else { ((g.exp as u128 * u2 as u128) % pk1 as u128) as u64 };
            if w != 0 {
                psi = Some((k, w));
            }
        }
        let theta_mod = prim.modulus / p.pow(arith::val_u64(prim.modulus, p) as u32);
        let theta = if theta_gens.is_empty() {
            DirichletChar::trivial(1)
        } else {
            let mut gens = canonical_gens(theta_mod);
            for (g, h) in gens.iter_mut().zip(&theta_gens) {
                g.exp = h.exp;
            }
            Self::from_gens(theta_mod, gens).primitive()
        };
        let psi = match psi {
            None => DirichletChar::trivial(1),
            Some((k, w)) => {
                let m = p.pow(k);
                let gens = vec![Gen {
                    prime: p,
                    comp: m,
                    residue: arith::primitive_root_prime_power(p) % m,
                    order: m / p * (p - 1),
                    exp: w * (p - 1),
                }];
                Self::from_gens(m, gens).primitive()
            }
        };
        let n = if psi.is_trivial() { 0 } else { arith::val_u64(psi.order, p) };
        let zeta_psi = if n == 0 {
            0
        } else {
            let x = psi.value_exponent(1 + p as i64).unwrap();
            (psi.order - x) % psi.order
        };
        CharDecomposition { theta, i, psi, n, zeta_psi_exponent: zeta_psi }
    }

    /// Whether `theta(p) = 1` (requires `p` prime to the modulus).
    pub fn value_at_is_one(&self, a: i64) -> bool {
        self.value_exponent(a) == Some(0)
    }
}

/// `omega^i`, the `i`-th power of the Teichmuller character mod `p`.
pub fn teichmuller_power(p: u64, i: i64) -> DirichletChar {
    DirichletChar::new(p, &[(i.rem_euclid(p as i64 - 1)) as u64]).unwrap()
}

/// The character of the second kind of order `p^n` and conductor `p^{n+1}`
/// with `psi(1 + p) = zeta_{p^n}`.
pub fn second_kind(p: u64, n: u32) -> Result<DirichletChar> {
    if n == 0 {
        return Err(Error::InvalidInput("second-kind level must be at least 1".into()));
    }
    let m = p.pow(n + 1);
    let pn = p.pow(n);
    let g = arith::primitive_root_prime_power(p) % m;
    let md = Modulus::new(m);
    let w = teichmuller_int(g, p, n + 1);
    let u = md.mul(g, md.inv(w).unwrap());
    let x = arith::discrete_log(1 + p, u, pn, m)
        .ok_or_else(|| Error::Inconsistency("principal unit outside <1+p>".into()))?;
    DirichletChar::new(m, &[x * (p - 1)])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharDecomposition {
    pub theta: DirichletChar,
    pub i: u64,
    pub psi: DirichletChar,
    /// Level of `psi`: its order is `p^n`.
    pub n: u32,
    /// `zeta_psi = psi(1+p)^{-1} = zeta_{p^n}^{zeta_psi_exponent}`.
    pub zeta_psi_exponent: u64,
}

/// Kronecker symbol `(d/n)` for `n > 0`.
pub fn kronecker_symbol(d: i64, n: u64) -> i32 {
    let mut n = n;
    let mut res = 1;
    while n % 2 == 0 {
        n /= 2;
        match d.rem_euclid(8) {
            0 | 2 | 4 | 6 => return 0,
            1 | 7 => {}
            _ => res = -res,
        }
    }
    if n == 1 {
        return res;
    }
    res * jacobi(d.rem_euclid(n as i64) as u64, n)
}

fn jacobi(mut a: u64, mut n: u64) -> i32 {
    let mut res = 1;
    a %= n;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                res = -res;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            res = -res;
        }
        a %= n;
    }
    if n == 1 {
        res
    } else {
        0
    }
}

/// Restriction on `theta(p)` during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PConstraint {
    None,
    ThetaPIsOne,
    /// `theta(p) != 1`, ramified `theta` included.
    ThetaPNotOne,
    /// `theta(p) != 0, 1`.
    ThetaPNotZeroOne,
}

impl PConstraint {
    fn admits(self, chi: &DirichletChar, p: u64) -> bool {
        let c = chi.conductor();
        if c % p == 0 && (c % (p * p) == 0 || chi.order() % p == 0) {
            return false;
        }
        match self {
            PConstraint::None => true,
            PConstraint::ThetaPIsOne => chi.value_at_is_one(p as i64),
            PConstraint::ThetaPNotOne => !chi.value_at_is_one(p as i64),
            PConstraint::ThetaPNotZeroOne => c % p != 0 && !chi.value_at_is_one(p as i64),
        }
    }
}

/// Primitive characters mod the prime-power `l^k` whose order divides `d`
/// (exponent vectors on the canonical generators of `l^k`).
fn primitive_component_chars(l: u64, k: u32, d: u64) -> Vec<Vec<u64>> {
    let comp = l.pow(k);
    if l == 2 {
        return match k {
            1 => vec![],
            2 => {
                if d % 2 == 0 {
                    vec![vec![1]]
                } else {
                    vec![]
                }
            }
            _ => {
                let o5 = comp / 4;
                if d % o5 != 0 || d % 2 != 0 && o5 > 1 {
                    return vec![];
                }
                let mut out = Vec::new();
                for s in 0..2u64 {
                    if s == 1 && d % 2 != 0 {
                        continue;
                    }
                    for y in (1..o5).step_by(2) {
                        out.push(vec![s, y]);
                    }
                }
                out
            }
        };
    }
    let phi = comp / l * (l - 1);
    let g = arith::gcd(phi, d);
    let step = phi / g;
    (0..g)
        .map(|j| j * step)
        .filter(|&x| if k == 1 { x != 0 } else { x % l != 0 })
        .map(|x| vec![x])
        .collect()
}

/// All primitive characters of conductor exactly `c` and order exactly `d`.
pub fn primitive_characters(c: u64, d: u64) -> Vec<DirichletChar> {
    let fac = arith::factorize(c);
    let mut lists: Vec<Vec<Vec<u64>>> = Vec::new();
    for &(l, k) in &fac {
        let comp = primitive_component_chars(l, k, d);
        if comp.is_empty() {
            return vec![];
        }
        lists.push(comp);
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; lists.len()];
    loop {
        let exps: Vec<u64> = idx
            .iter()
            .zip(&lists)
            .flat_map(|(&i, l)| l[i].iter().copied())
            .collect();
        let chi = DirichletChar::new(c, &exps).unwrap();
        if chi.order == d {
            debug_assert!(chi.is_primitive());
            out.push(chi);
        }
        let mut j = 0;
        loop {
            if j == lists.len() {
                return out;
            }
            idx[j] += 1;
            if idx[j] < lists[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Odd primitive characters of exact order `order` and conductor in
/// `[cond_min, cond_max]`, subject to `constraint`. Characters whose `p`-part
/// is wild are skipped, as their twists by powers of `omega` are not of the
/// first kind. With
/// `orbits`, one representative per `Q_p`-conjugacy class is returned.
pub fn enumerate_odd(
    order: u64,
    cond_min: u64,
    cond_max: u64,
    p: u64,
    constraint: PConstraint,
    orbits: bool,
) -> Vec<DirichletChar> {
    let mut out = Vec::new();
    for c in cond_min.max(3)..=cond_max {
        out.extend(enumerate_odd_at(c, order, p, constraint, orbits));
    }
    out
}

/// The conductor-`c` slice of [`enumerate_odd`].
pub fn enumerate_odd_at(
    c: u64,
    order: u64,
    p: u64,
    constraint: PConstraint,
    orbits: bool,
) -> Vec<DirichletChar> {
    if c % p == 0 && constraint == PConstraint::ThetaPNotZeroOne {
        return vec![];
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for chi in primitive_characters(c, order) {
        if !chi.is_odd() || !constraint.admits(&chi, p) {
            continue;
        }
        if orbits {
            let rep = chi.qp_orbit_representative(p);
            if !seen.insert(rep.exponents()) {
                continue;
            }
            out.push(rep);
        } else {
            out.push(chi);
        }
    }
    out
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.modulus)?;
        let mut first = true;
        for g in &self.gens {
            if g.exp == 0 {
                continue;
            }
            if !first {
                write!(f, ",")?;
            }
            first = false;
            write!(f, "{}^{}", lift(g.residue, g.comp, self.modulus), g.exp)?;
        }
        Ok(())
    }
}

impl FromStr for DirichletChar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse character '{s}'"));
        let (m, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let m: u64 = m.trim().parse().map_err(|_| bad())?;
        if m == 0 {
            return Err(bad());
        }
        let gens = generators(m);
        let mut exps = vec![0u64; gens.len()];
        for part in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (g, k) = part.split_once('^').ok_or_else(bad)?;
            let g: u64 = g.trim().parse().map_err(|_| bad())?;
            let k: i64 = k.trim().parse().map_err(|_| bad())?;
            let idx = gens.iter().position(|&(r, _)| r == g % m).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{g} is not a canonical generator mod {m} (expected one of {:?})",
                    gens.iter().map(|x| x.0).collect::<Vec<_>>()
                ))
            })?;
            exps[idx] = k.rem_euclid(gens[idx].1 as i64) as u64;
        }
        DirichletChar::new(m, &exps)
    }
}

impl Serialize for DirichletChar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DirichletChar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
