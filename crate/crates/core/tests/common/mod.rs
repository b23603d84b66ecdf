//! Shared property checks and random-value strategies for the test suites.

use proptest::prelude::*;

use quintic_ehae::geometry::{Generators, Geometry};
use quintic_ehae::ratfun::{FieldElement, Poly, RatFunc};
use quintic_ehae::ring::{change_basis, evaluate, theta_derive, Basis, RingElement, NGEN};
use quintic_ehae::series::{Series, Var};
use quintic_ehae::solver::{degree_list, extract_bps, resum_bps, BpsTables};
use quintic_ehae::Rat;
use std::collections::BTreeMap;

pub fn rat_strategy() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=5).prop_map(|(n, d)| Rat::new(n.into(), d.into()))
}

pub fn ratfunc_strategy() -> impl Strategy<Value = RatFunc> {
    (
        proptest::collection::vec(rat_strategy(), 1..3),
        0u32..2,
        0u32..2,
    )
        .prop_map(|(coeffs, pz, pd)| RatFunc::new(Poly(coeffs), pz, pd))
}

pub fn field_strategy() -> impl Strategy<Value = FieldElement> {
    (ratfunc_strategy(), ratfunc_strategy()).prop_map(|(even, odd)| {
        FieldElement::from_even(even).add(&FieldElement::from_odd(odd))
    })
}

/// A sparse random element with small exponents; weights (0,0).
pub fn ring_strategy(basis: Basis) -> impl Strategy<Value = RingElement> {
    let term = (0usize..NGEN, 1u8..=2, field_strategy());
    proptest::collection::vec(term, 1..4).prop_map(move |terms| {
        let mut out = RingElement::zero(basis);
        for (idx, pow, c) in terms {
            let mut t = RingElement::constant(basis, c);
            for _ in 0..pow {
                t = t.mul(&RingElement::generator(basis, idx)).unwrap();
            }
            out = out.add(&t).unwrap();
        }
        out
    })
}

pub fn series_eq(a: &Series, b: &Series) -> bool {
    a.sub(b).map(|d| d.is_zero()).unwrap_or(false)
}

pub fn ring_eq(a: &RingElement, b: &RingElement) -> bool {
    a.sub(b).map(|d| d.is_zero()).unwrap_or(false)
}

// ---------------------------------------------------------------------------
// The seven checked properties. Each takes its random inputs and panics on
// violation (proptest-friendly).
// ---------------------------------------------------------------------------

/// theta is a derivation: theta(ab) = theta(a) b + a theta(b).
pub fn check_theta_leibniz(a: &RingElement, b: &RingElement) {
    let lhs = theta_derive(&a.mul(b).unwrap()).unwrap();
    let rhs = theta_derive(a)
        .unwrap()
        .mul(b)
        .unwrap()
        .add(&a.mul(&theta_derive(b).unwrap()).unwrap())
        .unwrap();
    assert!(ring_eq(&lhs, &rhs), "Leibniz violated:\n{}\n{}", lhs.render(), rhs.render());
}

/// Evaluation intertwines theta: evaluate(theta e) = theta(evaluate e).
pub fn check_evaluate_theta(e: &RingElement, gens: &Generators, trunc2: i64) {
    let lhs = evaluate(&theta_derive(e).unwrap(), gens, trunc2).unwrap();
    let rhs = evaluate(e, gens, trunc2).unwrap().theta();
    assert!(series_eq(&lhs, &rhs), "evaluate/theta do not commute");
}

/// I -> J -> I is the identity.
pub fn check_basis_roundtrip(e: &RingElement) {
    let back = change_basis(&change_basis(e, Basis::J).unwrap(), Basis::I).unwrap();
    assert!(ring_eq(e, &back), "basis round-trip failed:\n{}\n{}", e.render(), back.render());
}

/// Partial derivatives in the polynomial ring commute.
pub fn check_mixed_partials(e: &RingElement, i: usize, j: usize) {
    let ij = e.partial_derive(i).unwrap().partial_derive(j).unwrap();
    let ji = e.partial_derive(j).unwrap().partial_derive(i).unwrap();
    assert!(ring_eq(&ij, &ji), "mixed partials differ");
}

/// Re-expanding in q and substituting the mirror map back is the identity.
pub fn check_mirror_roundtrip(geom: &Geometry, coeffs: &[Rat]) {
    let trunc2 = geom.trunc2();
    let s = Series::from_coeffs(Var::Z, 0, coeffs.to_vec(), trunc2);
    let s_q = geom.to_q(&s).unwrap();
    let back = s_q.substitute(&geom.q_of_z).unwrap();
    assert!(series_eq(&s, &back), "mirror-map round-trip failed");
}

/// Multicover resummation inverts BPS extraction exactly.
pub fn check_bps_roundtrip(h: u32, d_max: i64, tables: &BpsTables) {
    let resummed = resum_bps(h, d_max, tables).unwrap();
    // assemble per-genus q-expansions from the g_s-coefficient rows
    let gmax = tables.len();
    let trunc2 = if h == 0 { 2 * d_max + 2 } else { d_max + 1 };
    let mut fas = Vec::new();
    for g in 0..gmax {
        let mut fa = Series::zero(Var::Q, trunc2);
        for (&d, row) in &resummed {
            let e2 = if h == 0 { 2 * d } else { d };
            fa = fa.add(&Series::monomial(Var::Q, row[g].clone(), e2, trunc2)).unwrap();
        }
        fas.push(fa);
    }
    let extracted = extract_bps(h, d_max, &fas).unwrap();
    for g in 0..gmax {
        for &d in &degree_list(h, d_max) {
            let want = tables[g].get(&d).cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
            let got = extracted[g].get(&d).cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
            assert_eq!(want, got, "BPS round-trip failed at g={g}, d={d}");
        }
    }
}

/// Random BPS tables on the degree grid for one h-sector.
pub fn bps_tables_strategy(h: u32, gmax: usize, d_max: i64) -> impl Strategy<Value = BpsTables> {
    let ds = degree_list(h, d_max);
    let len = ds.len();
    proptest::collection::vec(
        proptest::collection::vec(-50i64..=50, len),
        1..=gmax,
    )
    .prop_map(move |rows| {
        rows.into_iter()
            .map(|row| {
                let mut t = BTreeMap::new();
                for (&d, n) in ds.iter().zip(row) {
                    t.insert(d, Rat::from_integer(n.into()));
                }
                t
            })
            .collect()
    })
}

/// Text serialization is lossless for ring elements and coefficients.
pub fn check_serialization_roundtrip(e: &RingElement) {
    let text = e.serialize();
    let back = RingElement::parse(&text).unwrap();
    assert_eq!(text, back.serialize(), "ring serialization round-trip failed");
    for (_, c) in e.terms() {
        let cb = FieldElement::parse(&c.serialize()).unwrap();
        assert_eq!(c.serialize(), cb.serialize(), "coefficient round-trip failed");
    }
}
