mod common;

use common::*;
use hilbert_burch::dubreil2::default_forms;
use hilbert_burch::essentiality::{classify_all, SiOptions};
use hilbert_burch::form::random_form;
use hilbert_burch::lift3::*;
use hilbert_burch::{Error, Field, Form, Scalar};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const F5: Field = Field::Prime(5);

fn zeros(field: Field, t: u32) -> Vec<Form> {
    (0..3).map(|_| Form::zero(field, 3, t - 1)).collect()
}

#[test]
fn families_without_z_terms_in_first_column() {
    for kind in [FamilyKind::I11, FamilyKind::I12, FamilyKind::I2] {
        let m = family_alpha3(Q, kind, 2, &zeros(Q, 2)).unwrap();
        let r = check_s_membership(&m, &SiOptions::default()).unwrap();
        assert!(r.member, "{kind}");
        assert_eq!(r.strongly_inessential.len(), 1);
        assert_eq!(m.multiplicity_from_degrees().unwrap(), 9);
        assert_eq!(m.minors_ideal().unwrap().profile(None).unwrap().multiplicity, 9);
        assert_eq!(r.degree_rule, Some(true));
    }
}

#[test]
fn family_displays() {
    let m = family_alpha3(Q, FamilyKind::I12, 3, &zeros(Q, 3)).unwrap();
    let want = mat(Q, 3, &[&["Y^3", "-X", "Z", "0"], &["0", "Y", "-X", "-Z"], &["0", "0", "Y", "-X"]]);
    assert_eq!(m.entries(), want.entries());
    let m = family_alpha3(Q, FamilyKind::I2, 2, &zeros(Q, 2)).unwrap();
    let want = mat(Q, 3, &[&["(X+Y)^2", "-X", "0", "0"], &["0", "X+Y", "-X", "0"], &["0", "Z", "X", "-Y"]]);
    assert_eq!(m.entries(), want.entries());
}

#[test]
fn lowest_generator_shapes() {
    let x = form(Q, 3, "X");
    let y = form(Q, 3, "Y");
    let phi = |kind| family_alpha3(Q, kind, 2, &zeros(Q, 2)).unwrap().maximal_minors().unwrap()[0].clone();
    let s = phi_shape(&phi(FamilyKind::I11), &ShapeHint::Lines(vec![(x.clone(), 3)])).unwrap();
    assert!(matches!(s, PhiShape::SingleLinePower { delta: 3, .. }));
    // supported on the two lines X = 0 and Y = 0
    let s = phi_shape(&phi(FamilyKind::I2), &ShapeHint::Lines(vec![(x.clone(), 2), (y.clone(), 1)])).unwrap();
    assert!(matches!(s, PhiShape::TwoLines { r: 2, s: 1, .. }));
    assert!(phi_shape(&phi(FamilyKind::I2), &ShapeHint::Lines(vec![(x.clone(), 3)])).is_err());
}

#[test]
fn phi_shape_examples() {
    let s = phi_shape(&form(Q, 3, "(X+Y)^4"), &ShapeHint::Lines(vec![(form(Q, 3, "X+Y"), 4)])).unwrap();
    assert!(matches!(s, PhiShape::SingleLinePower { delta: 4, .. }));
    let hint = ShapeHint::Lines(vec![(form(Q, 3, "X"), 1), (form(Q, 3, "Y"), 2), (form(Q, 3, "2*X"), 2)]);
    let s = phi_shape(&form(Q, 3, "X^3*Y^2"), &hint).unwrap();
    assert!(matches!(s, PhiShape::TwoLines { r: 3, s: 2, .. }));
    let c = form(Q, 3, "X*Z - Y^2");
    let s = phi_shape(&c.pow(2), &ShapeHint::Conic(c.clone(), 2)).unwrap();
    assert!(matches!(s, PhiShape::ConicPower { gamma: 2, .. }));
    // a reducible quadric is not a conic
    let s = phi_shape(&form(Q, 3, "X*Y"), &ShapeHint::Conic(form(Q, 3, "X*Y"), 1)).unwrap();
    assert!(matches!(s, PhiShape::Other { .. }));
    let three = ShapeHint::Lines(vec![(form(Q, 3, "X"), 1), (form(Q, 3, "Y"), 1), (form(Q, 3, "Z"), 1)]);
    assert!(matches!(phi_shape(&form(Q, 3, "X*Y*Z"), &three).unwrap(), PhiShape::Other { .. }));
}

#[test]
fn quotient_by_z_recovers_the_binary_matrix() {
    let m = family_alpha3(Q, FamilyKind::I11, 2, &zeros(Q, 2)).unwrap();
    let img = quotient_mod_linear(&m, &form(Q, 3, "Z")).unwrap();
    assert_eq!(img, family_base(Q, FamilyKind::I11, 2).unwrap());
    let m = family_alpha3(Q, FamilyKind::I2, 2, &zeros(Q, 2)).unwrap();
    let img = quotient_mod_linear(&m, &form(Q, 3, "Z")).unwrap();
    // X^2 Y S + S_4 S
    let minors = img.maximal_minors().unwrap();
    assert!(minors[0].is_proportional(&form(Q, 2, "X^2*Y")));
    let ideal = img.minors_ideal().unwrap();
    assert_eq!(ideal.piece_dim(4), 5);
}

#[test]
fn quotient_preconditions() {
    let m = family_alpha3(Q, FamilyKind::I11, 2, &zeros(Q, 2)).unwrap();
    // every point of V(I) lies on X = 0
    assert!(matches!(quotient_mod_linear(&m, &form(Q, 3, "X")), Err(Error::Precondition(_))));
    let binary = one_step_datum(Q).canonical_matrix().unwrap();
    assert!(matches!(quotient_mod_linear(&binary, &form(Q, 3, "Z")), Err(Error::Precondition(_))));
}

#[test]
fn membership_negatives() {
    let opts = SiOptions::default();
    // lifting a binary matrix with itself: no Z terms, no inessential columns
    let m = lift_trivially(&one_step_datum(Q).canonical_matrix().unwrap()).unwrap();
    let r = check_s_membership(&m, &opts).unwrap();
    assert!(!r.member);
    assert!(r.strongly_inessential.is_empty() && r.classification.inessential_not_si == 0);
    // α = 2
    let m = mat(Q, 3, &[&["Y", "-X", "0"], &["Z", "Y", "-X"]]);
    assert!(!check_s_membership(&m, &opts).unwrap().member);
}

#[test]
fn lift_with_unit_first_gap_has_no_si_columns() {
    let m = lift_general(Q, &[1, 1, 1, 1], None).unwrap();
    let c = classify_all(&m, &SiOptions::default()).unwrap();
    assert!(c.si_columns().is_empty());
    let m = lift_general(Q, &[2, 1, 1, 1], None).unwrap();
    let c = classify_all(&m, &SiOptions::default()).unwrap();
    assert_eq!(c.si_columns(), vec![1, 2]);
    assert_eq!(c.essential_columns(), vec![0, 3, 4]);
}

#[test]
fn lift_matches_family_i11_shape() {
    // t0 = t, t1 = t2 = 1 with P = 0: the Z sits below the diagonal in row 3
    let m = lift_general(Q, &[3, 1, 1], None).unwrap();
    let f = family_alpha3(Q, FamilyKind::I11, 3, &zeros(Q, 3)).unwrap();
    assert_eq!(m.entries(), f.entries());
}

#[test]
fn lift_rejects_bad_degrees() {
    let p = vec![form(Q, 3, "X^2"), form(Q, 3, "X")];
    assert!(matches!(lift_general(Q, &[2, 1, 1], Some(&p)), Err(Error::Degree(_))));
    assert!(lift_general(Q, &[2], None).is_err());
    assert!(family_alpha3(Q, FamilyKind::I11, 1, &zeros(Q, 2)).is_err());
}

#[test]
fn split_stability() {
    let opts = SiOptions::default();
    let m = lift_general(Q, &[2, 1, 2, 1, 1], None).unwrap();
    assert_eq!(stability_range(&m), Some(1));
    let r = check_split_stability(&m, 1, &opts).unwrap();
    assert!(r.holds);
    let second = r.second.unwrap();
    assert!(second.member && second.strongly_inessential.len() as i64 == second.alpha - 2);
    // three levels with a single generator on top: nothing to split
    let m = lift_general(Q, &[2, 1, 2], None).unwrap();
    assert_eq!(stability_range(&m), None);
    assert!(check_split_stability(&m, 1, &opts).unwrap().holds);
    let m = lift_general(Q, &[2, 1, 2, 1, 2, 2], None).unwrap();
    assert_eq!(stability_range(&m), Some(2));
    assert!(check_split_stability(&m, 1, &opts).unwrap().holds);
    // at the top of the range the lower part keeps three essential
    // generators but only three generators in all, so α = 2
    let r = check_split_stability(&m, 2, &opts).unwrap();
    let second = r.second.unwrap();
    assert!(!r.holds && second.alpha == 2 && second.essential.len() == 3);
    assert!(matches!(check_split_stability(&m, 3, &opts), Err(Error::Input(_))));
    // two levels: nothing to split
    let m = family_alpha3(Q, FamilyKind::I11, 2, &zeros(Q, 2)).unwrap();
    let r = check_split_stability(&m, 1, &opts).unwrap();
    assert!(r.holds && r.second.is_none());
}

#[test]
fn conic_prefilter() {
    let nu = |v: &[(u32, usize)]| v.iter().copied().collect();
    assert!(conic_feasible(&nu(&[(4, 3), (6, 2), (7, 1)])));
    assert!(!conic_feasible(&nu(&[(4, 3), (6, 3), (7, 1)])));
}

#[test]
fn gate_agrees_with_the_classifier() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SiOptions::default();
    let mut samples: Vec<[[u64; 3]; 3]> = (0..120).map(|_| [[0; 3]; 3].map(|r: [u64; 3]| r.map(|_| rng.gen_range(0..5)))).collect();
    // every s.i. shape with a11 = 0, plus near misses
    for c in 1..5 {
        samples.push([[0, 0, 0], [2, 0, 0], [c, 2, 0]]);
        samples.push([[0, c, 0], [1, 0, 5 - c], [0, 1, 0]]);
        samples.push([[0, c, 0], [1, 0, 0], [0, 1, 0]]);
        samples.push([[0, 0, 0], [2, 0, 1], [c, 2, 0]]);
    }
    for a in samples {
        let sa: [[Scalar; 3]; 3] = a.map(|r| r.map(|x| F5.int(x as i64)));
        let m = general_alpha3(F5, 2, &zeros(F5, 2), &sa).unwrap();
        let c = classify_all(&m, &opts).unwrap();
        let gate = alpha3_gate(5, &a);
        assert_eq!([c.verdicts[1].is_si(), c.verdicts[2].is_si()], gate, "{a:?}");
        assert!(c.strongly_inessential <= 1, "more than α-2 s.i. columns for {a:?}");
    }
}

fn lift_case() -> impl Strategy<Value = (Vec<u32>, u64)> {
    (prop::collection::vec(1u32..3, 2..5), any::<u64>()).prop_map(|(mut ts, seed)| {
        ts[0] += 1;
        (ts, seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lifts_reduce_to_their_base((ts, seed) in lift_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps: Vec<Form> = lift_degrees(&ts).iter().map(|&d| random_form(Q, 3, d, 2, &mut rng)).collect();
        let m = lift_general(Q, &ts, Some(&ps)).unwrap();
        let base = base_matrix(Q, &ts).unwrap();
        prop_assert_eq!(&set_z_zero(&m).unwrap(), &base);
        prop_assert_eq!(&quotient_mod_linear(&m, &form(Q, 3, "Z")).unwrap(), &base);
        prop_assert!(m.verify_syzygies(&m.maximal_minors().unwrap()).unwrap());
    }

    #[test]
    fn reduction_by_a_general_line((ts, seed) in lift_case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ps: Vec<Form> = lift_degrees(&ts).iter().map(|&d| random_form(Q, 3, d, 2, &mut rng)).collect();
        let m = lift_general(Q, &ts, Some(&ps)).unwrap();
        let l = Form::linear_int(Q, &[rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(1..=3)]);
        prop_assume!(is_regular(&m, &l).unwrap());
        let img = quotient_mod_linear(&m, &l).unwrap();
        // a regular hyperplane section keeps the multiplicity and the Hilbert–Burch shape
        let e = m.multiplicity_from_degrees().unwrap();
        prop_assert_eq!(img.minors_ideal().unwrap().profile(None).unwrap().multiplicity, e);
        let r = check_quotient(&m, &img, &SiOptions::default()).unwrap();
        prop_assert!(r.monotone, "{:?}", r);
    }

    #[test]
    fn perturbed_families_respect_the_si_bound(seed in any::<u64>(), t in 2u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: [[Scalar; 3]; 3] = [[0; 3]; 3].map(|r: [i64; 3]| r.map(|_| Q.int(rng.gen_range(-2..=2))));
        let ps: Vec<Form> = (0..3).map(|_| random_form(Q, 3, t - 1, 2, &mut rng)).collect();
        let m = general_alpha3(Q, t, &ps, &a).unwrap();
        prop_assume!(m.minors_ideal().unwrap().profile(None).is_ok());
        let c = classify_all(&m, &SiOptions::default()).unwrap();
        prop_assert!(c.strongly_inessential <= 1);
        prop_assert_eq!(m.multiplicity_from_degrees().unwrap(), 3 * t as u64 + 3);
    }
}

#[test]
fn default_forms_feed_the_lift_over_small_fields() {
    // the lift is defined over any field; over F5 the s.i. pattern is the same
    let m = lift_general(F5, &[2, 1, 1, 1], None).unwrap();
    let c = classify_all(&m, &SiOptions::default()).unwrap();
    assert_eq!(c.si_columns(), vec![1, 2]);
    assert_eq!(default_forms(F5, 3).len(), 3);
}
