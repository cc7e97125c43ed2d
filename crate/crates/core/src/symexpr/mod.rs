//! Canonical polynomial expressions on `J^∞π` with exact rational
//! coefficients: ring operations, partial and total derivatives, evaluation.

mod poly;
mod random;
mod signature;

pub(crate) use poly::{latex_rational, same_signature};
pub use poly::{rat, ratio, Monomial, PolyExpr, Rational};
pub use random::{random_expr, random_expr_seeded, RandomExprConfig};
pub use signature::{JetCoordinate, Signature};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use proptest::prelude::*;
    use std::collections::HashMap;
    use std::sync::Arc;

    fn sig2() -> Arc<Signature> {
        Signature::new(["x", "y"], ["u", "v"], ["c"]).unwrap()
    }

    fn cfg() -> RandomExprConfig {
        RandomExprConfig {
            max_terms: 4,
            ..Default::default()
        }
    }

    fn point(e: &[&PolyExpr], seed: u64) -> HashMap<JetCoordinate, Rational> {
        let mut coords = std::collections::BTreeSet::new();
        for x in e {
            coords.extend(x.coordinates());
        }
        coords
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                (
                    c,
                    ratio(((seed as i64 + 7 * k as i64) % 11) - 5, 1 + (k as i64 % 3)),
                )
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn total_derivatives_commute(s in any::<u64>()) {
            let sig = sig2();
            let e = random_expr_seeded(s, &sig, &cfg());
            prop_assert_eq!(e.total_derivative(0).total_derivative(1), e.total_derivative(1).total_derivative(0));
        }

        #[test]
        fn total_derivative_is_a_derivation(s in any::<u64>(), i in 0usize..2) {
            let sig = sig2();
            let a = random_expr_seeded(s, &sig, &cfg());
            let b = random_expr_seeded(s.wrapping_add(1), &sig, &cfg());
            let lhs = (&a * &b).total_derivative(i);
            let rhs = &(&a.total_derivative(i) * &b) + &(&a * &b.total_derivative(i));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn partial_is_a_derivation(s in any::<u64>()) {
            let sig = sig2();
            let a = random_expr_seeded(s, &sig, &cfg());
            let b = random_expr_seeded(s ^ 0xdead, &sig, &cfg());
            for c in sig.jet_coordinates(2) {
                let lhs = (&a * &b).partial(&c);
                let rhs = &(&a.partial(&c) * &b) + &(&a * &b.partial(&c));
                prop_assert_eq!(lhs, rhs);
            }
        }

        // [∂_{p^j_ζ}, D_i] = ∂_{p^j_{ζ-1_i}} when ζ_i > 0, else 0.
        #[test]
        fn partial_total_commutator(s in any::<u64>(), i in 0usize..2) {
            let sig = sig2();
            let e = random_expr_seeded(s, &sig, &cfg());
            for c in sig.jet_coordinates(3) {
                let JetCoordinate::Jet { fiber, sigma } = c else { unreachable!() };
                let lhs = &e.total_derivative(i).partial(&c) - &e.partial(&c).total_derivative(i);
                let expected = if sigma.get(i) > 0 {
                    let mut lowered = sigma.as_slice().to_vec();
                    lowered[i] -= 1;
                    e.partial(&JetCoordinate::jet(fiber as usize, MultiIndex::new(&lowered).unwrap()))
                } else {
                    PolyExpr::zero(&sig)
                };
                prop_assert_eq!(lhs, expected);
            }
        }

        #[test]
        fn jet_order_bounds(s in any::<u64>(), i in 0usize..2) {
            let sig = sig2();
            let a = random_expr_seeded(s, &sig, &cfg());
            let b = random_expr_seeded(s.rotate_left(7), &sig, &cfg());
            prop_assert!((&a * &b).jet_order() <= a.jet_order().max(b.jet_order()));
            prop_assert!(a.total_derivative(i).jet_order() <= a.jet_order() + 1);
        }

        #[test]
        fn evaluate_is_a_ring_homomorphism(s in any::<u64>()) {
            let sig = sig2();
            let a = random_expr_seeded(s, &sig, &cfg());
            let b = random_expr_seeded(s.wrapping_mul(31), &sig, &cfg());
            let pt = point(&[&a, &b], s);
            prop_assert_eq!((&a * &b).evaluate(&pt).unwrap(), a.evaluate(&pt).unwrap() * b.evaluate(&pt).unwrap());
            prop_assert_eq!((&a + &b).evaluate(&pt).unwrap(), a.evaluate(&pt).unwrap() + b.evaluate(&pt).unwrap());
        }

        #[test]
        fn ring_axioms(s in any::<u64>()) {
            let sig = sig2();
            let a = random_expr_seeded(s, &sig, &cfg());
            let b = random_expr_seeded(s ^ 1, &sig, &cfg());
            let c = random_expr_seeded(s ^ 2, &sig, &cfg());
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }
    }
}
