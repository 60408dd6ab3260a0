//! Randomized algebraic identities for the exact polynomial layer.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms_hold(input in ring_input()) {
        ring_axioms(input)?;
    }

    #[test]
    fn gcd_divides_both_and_keeps_common_factors(input in gcd_input()) {
        gcd_divides(input)?;
    }

    #[test]
    fn exact_division_undoes_multiplication(input in division_input()) {
        division_round_trip(input)?;
    }

    #[test]
    fn squarefree_decomposition_reconstructs(input in squarefree_input()) {
        squarefree_reconstructs(input)?;
    }

    #[test]
    fn substitution_is_a_ring_homomorphism(input in substitution_input()) {
        substitution_homomorphism(input)?;
    }

    #[test]
    fn reduction_is_canonical_and_idempotent(input in reduction_input()) {
        reduction_idempotent(input)?;
    }
}
