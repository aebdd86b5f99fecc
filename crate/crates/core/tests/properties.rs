use moduli_core::exact::{int, rat, PiPoly, Rational, Ring, TruncatedSeries};
use moduli_core::kappa::KappaEngine;
use moduli_core::WittenEngine;
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..20, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn pi_poly() -> impl Strategy<Value = PiPoly> {
    prop::collection::vec(small_rational(), 0..5).prop_map(PiPoly::new)
}

fn series(order: i32) -> impl Strategy<Value = TruncatedSeries<Rational>> {
    prop::collection::vec(small_rational(), 1..8).prop_map(move |c| TruncatedSeries::from_coeffs("x", c, order))
}

/// A multiset of ψ exponents of top degree for some genus ≤ 3.
fn correlator_input() -> impl Strategy<Value = (u32, Vec<u32>)> {
    (0u32..=3, 1usize..=5).prop_flat_map(|(g, n)| {
        let n = if g == 0 { n.max(3) } else { n };
        let dim = 3 * g + n as u32 - 3;
        prop::collection::vec(0..=dim, n - 1).prop_filter_map("degree", move |head| {
            let s: u32 = head.iter().sum();
            (s <= dim).then(|| {
                let mut d = head.clone();
                d.push(dim - s);
                (g, d)
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in pi_poly(), b in pi_poly(), c in pi_poly()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&PiPoly::one()), a.clone());
        prop_assert_eq!(a.add(&a.neg()), PiPoly::zero());
    }

    #[test]
    fn series_truncation_commutes(a in series(10), b in series(10), k in 1i32..10) {
        let full = a.mul(&b).truncate(k);
        let early = a.truncate(k).mul(&b.truncate(k));
        prop_assert_eq!(full, early);
        prop_assert_eq!(a.add(&b).truncate(k), a.truncate(k).add(&b.truncate(k)));
    }

    #[test]
    fn series_inverse(mut a in series(9)) {
        if a.coeff(0).is_zero() {
            a = a.add(&TruncatedSeries::one("x", 9));
        }
        prop_assume!(!a.coeff(0).is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(a.mul(&inv), TruncatedSeries::one("x", 9));
    }

    #[test]
    fn pivot_invariance((g, d) in correlator_input()) {
        let w = WittenEngine::new();
        let v = w.correlator(g, &d);
        for p in 0..d.len() {
            prop_assert_eq!(w.correlator_with_pivot(g, &d, p), v.clone(), "pivot {}", p);
        }
    }

    #[test]
    fn string_and_dilaton((g, d) in correlator_input()) {
        let w = WittenEngine::new();
        // base cases such as ⟨τ_0³⟩_0 and ⟨τ_1⟩_1 have nothing to reduce to
        let reducible = 2 * g as i64 - 3 + d.len() as i64 > 0;
        if d.contains(&0) && reducible {
            prop_assert_eq!(w.string_reduce(g, &d).unwrap(), w.correlator(g, &d));
        }
        if d.contains(&1) && reducible {
            prop_assert_eq!(w.dilaton_reduce(g, &d).unwrap(), w.correlator(g, &d));
        }
    }

    #[test]
    fn kappa_reduction_order(g in 0u32..=2, extra in 0usize..=2, b in prop::collection::vec(1u32..=3, 1..=3)) {
        let n = if g == 0 { 3 + extra } else { 1 + extra };
        let dim = 3 * g + n as u32 - 3;
        let kappa_deg: u32 = b.iter().sum();
        prop_assume!(kappa_deg <= dim);
        let mut d = vec![0; n];
        d[0] = dim - kappa_deg;
        let w = WittenEngine::new();
        let k = KappaEngine::new(&w);
        let mut sorted = b.clone();
        sorted.sort_unstable();
        let v = k.mixed_correlator(g, &d, &b, 0);
        for first in 0..sorted.len() {
            prop_assert_eq!(k.mixed_with_first(g, &d, &sorted, 0, first), v.clone());
        }
    }
}

#[test]
fn integers_embed() {
    assert_eq!(
        PiPoly::from_rational(int(3)).mul(&PiPoly::from_rational(rat(1, 3))),
        PiPoly::one()
    );
}
