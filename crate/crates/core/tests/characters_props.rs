use proptest::prelude::*;

use iwasawa_core::characters::{enumerate_odd, generators, teichmuller_power, DirichletChar, PConstraint};
use iwasawa_core::padic::LocalRing;

fn arb_char() -> impl Strategy<Value = DirichletChar> {
    (3u64..300, proptest::collection::vec(0u64..10_000, 4)).prop_map(|(m, raw)| {
        let exps: Vec<u64> = generators(m).iter().zip(raw.iter().cycle()).map(|(&(_, o), &r)| r % o).collect();
        DirichletChar::new(m, &exps).unwrap()
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn completely_multiplicative(chi in arb_char(), a in 1i64..100_000, b in 1i64..100_000) {
        let ord = chi.order();
        match (chi.value_exponent(a), chi.value_exponent(b)) {
            (Some(x), Some(y)) => prop_assert_eq!(chi.value_exponent(a * b), Some((x + y) % ord)),
            _ => prop_assert_eq!(chi.value_exponent(a * b), None),
        }
    }

    #[test]
    fn multiplicative_in_rings(chi in arb_char(), pi in 0usize..3, a in 1i64..10_000, b in 1i64..10_000) {
        let p = [5u64, 7, 11][pi];
        prop_assume!(chi.modulus() % p != 0);
        let (tame, wild) = chi.ring_shape(p);
        let ring = LocalRing::new(p, 3, tame, wild);
        // residue fields past a machine word are out of range
        prop_assume!(ring.is_ok());
        let ring = ring.unwrap();
        let ab = chi.evaluate(a * b, &ring).unwrap();
        let prod = chi.evaluate(a, &ring).unwrap().mul(&chi.evaluate(b, &ring).unwrap());
        prop_assert!(ab.sub(&prod).is_zero());
    }

    #[test]
    fn decomposition_reproduces(chi in arb_char(), pi in 0usize..4) {
        let p = [3u64, 5, 7, 11][pi];
        let d = chi.decompose(p);
        let w = teichmuller_power(p, d.i as i64);
        let back = d.theta.twist(&w).twist(&d.psi).primitive();
        prop_assert_eq!(&back, &chi.primitive());
        let parts = [d.theta.conductor(), w.conductor(), d.psi.conductor()];
        // omega^i and psi share the prime p; their product's conductor is the larger one
        let pc = parts[1].max(parts[2]);
        prop_assert_eq!(gcd(parts[0], pc), 1);
        prop_assert_eq!(chi.conductor(), parts[0] * pc);
    }

    #[test]
    fn quadratic_enumeration_counts(x in 3u64..3000) {
        let n = enumerate_odd(2, 1, x, 1_000_003, PConstraint::None, false).len();
        let oracle = (1..=x as i64).filter(|&d| DirichletChar::kronecker(-d).is_ok()).count();
        prop_assert_eq!(n, oracle);
    }
}
