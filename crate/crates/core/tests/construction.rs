use lcs_core::analysis::{canonical_logicals_for, exact_distance, Distance};
use lcs_core::circulant::{CirculantMatrix, CirculantPoly};
use lcs_core::product::{disjoint_surface_code, family_members, lcs_code, surface_code, CodeSpec};
use lcs_core::{BitMatrix, CssCode, Pauli};
use proptest::prelude::*;

fn is_css(code: &CssCode) -> bool {
    code.hz.mul(&code.hx.transpose()).is_zero()
}

#[test]
fn lcs_parameters_for_small_lifts() {
    for (ell, lift, n, k) in [(1, 3, 15, 3), (1, 4, 20, 4), (1, 5, 25, 5), (2, 3, 39, 3), (2, 4, 52, 4)] {
        let code = lcs_code(ell, lift, 1).unwrap();
        assert_eq!((code.n, code.k), (n, k), "ell={ell} L={lift}");
        assert!(is_css(&code));
    }
}

#[test]
fn surface_copies_match_lcs_size() {
    let lcs = lcs_code(2, 3, 1).unwrap();
    let surf = disjoint_surface_code(2, 3).unwrap();
    assert_eq!((lcs.n, lcs.k), (surf.n, surf.k));
    assert_eq!(surf.tanner_components(), 3);
    assert_eq!(lcs.tanner_components(), 1);
    assert_eq!(exact_distance(&surf, Pauli::X, 6), Distance::Exact(3));
}

#[test]
fn surface_code_distance() {
    let c = surface_code(2).unwrap();
    assert_eq!((c.n, c.k), (13, 1));
    assert_eq!(exact_distance(&c, Pauli::Z, 5), Distance::Exact(3));
}

#[test]
fn canonical_logicals_have_minimum_weight() {
    let code = lcs_code(1, 4, 1).unwrap();
    let basis = canonical_logicals_for(&code).unwrap();
    basis.validate(&code.hx, &code.hz).unwrap();
    for r in 0..basis.k() {
        assert_eq!(basis.lx.row_weight(r), 3);
        assert_eq!(basis.lz.row_weight(r), 3);
    }
}

#[test]
fn text_roundtrip() {
    let code = lcs_code(1, 3, 1).unwrap();
    let back = CssCode::from_text(&code.to_text()).unwrap();
    assert_eq!(back.hx, code.hx);
    assert_eq!(back.hz, code.hz);
    assert_eq!(back.k, code.k);
}

#[test]
fn spec_strings() {
    let spec = CodeSpec::parse("lcs:2:3").unwrap();
    assert_eq!(spec.n(), 39);
    assert_eq!(spec.expected_distance(), 3);
    assert!(CodeSpec::parse("lcs:2").is_err());
    let fam = family_members(2, &[3, 5]).unwrap();
    assert_eq!(fam[1].lcs.n(), 65);
}

#[test]
fn degree_bounds_hold() {
    for (ell, lift) in [(1, 3), (2, 4), (3, 3)] {
        let code = lcs_code(ell, lift, 1).unwrap();
        assert!(code.max_check_weight() <= 6);
        assert!(code.max_qubit_degree() <= 6);
    }
}

fn poly(lift: usize) -> impl Strategy<Value = CirculantPoly> {
    proptest::collection::vec(0..lift, 0..4).prop_map(move |e| CirculantPoly::from_exponents(lift, e))
}

fn circ(rows: usize, cols: usize, lift: usize) -> impl Strategy<Value = CirculantMatrix> {
    proptest::collection::vec(poly(lift), rows * cols)
        .prop_map(move |e| CirculantMatrix::from_entries(rows, cols, lift, e).unwrap())
}

proptest! {
    #[test]
    fn lift_commutes_with_transpose(m in (1usize..4, 1usize..4, 2usize..6).prop_flat_map(|(r, c, l)| circ(r, c, l))) {
        prop_assert_eq!(m.transpose().lift(), m.lift().transpose());
    }

    #[test]
    fn lift_is_a_ring_homomorphism(a in poly(5), b in poly(5)) {
        prop_assert_eq!(a.mul(&b).to_binary(), a.to_binary().mul(&b.to_binary()));
        prop_assert_eq!(a.add(&b).to_binary(), a.to_binary().add(&b.to_binary()));
    }

    #[test]
    fn hgp_of_random_checks_is_css(bits in proptest::collection::vec(any::<bool>(), 12)) {
        let h1 = BitMatrix::from_fn(3, 4, |r, c| bits[r * 4 + c]);
        let (hx, hz) = lcs_core::product::hgp_binary(&h1, &h1.transpose());
        prop_assert!(hz.mul(&hx.transpose()).is_zero());
    }
}
