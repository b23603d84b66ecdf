//! Randomized invariant suite (at least 100 cases per property).

mod common;

use common::*;
use proptest::prelude::*;

use quintic_ehae::geometry::{Geometry, R2Choice};
use quintic_ehae::ring::Basis;

fn geometry() -> &'static Geometry {
    use std::sync::OnceLock;
    static GEOM: OnceLock<Geometry> = OnceLock::new();
    GEOM.get_or_init(|| Geometry::new(10).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn theta_is_a_derivation(a in ring_strategy(Basis::I), b in ring_strategy(Basis::I)) {
        check_theta_leibniz(&a, &b);
    }

    #[test]
    fn evaluation_intertwines_theta(e in ring_strategy(Basis::I)) {
        let geom = geometry();
        let gens = geom.generators(R2Choice::Zero).unwrap();
        check_evaluate_theta(&e, &gens, geom.trunc2() - 4);
    }

    #[test]
    fn basis_change_roundtrips(e in ring_strategy(Basis::I)) {
        check_basis_roundtrip(&e);
    }

    #[test]
    fn mixed_partials_commute(e in ring_strategy(Basis::J), i in 0usize..10, j in 0usize..10) {
        check_mixed_partials(&e, i, j);
    }

    #[test]
    fn mirror_map_roundtrips(coeffs in proptest::collection::vec(rat_strategy(), 1..8)) {
        check_mirror_roundtrip(geometry(), &coeffs);
    }

    #[test]
    fn serialization_roundtrips(e in ring_strategy(Basis::I)) {
        check_serialization_roundtrip(&e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bps_multicover_roundtrip(
        (h, tables) in (0u32..=4).prop_flat_map(|h| {
            bps_tables_strategy(h, 3, 9).prop_map(move |t| (h, t))
        }),
    ) {
        check_bps_roundtrip(h, 9, &tables);
    }
}
