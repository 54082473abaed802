mod common;

use common::*;
use hilbert_burch::dubreil2::{check_splitting, split, SiCount, Variant};
use hilbert_burch::essentiality::{classify_all, Kind, SiOptions, Witness};
use hilbert_burch::matrix::FormMatrix;
use hilbert_burch::Field;

fn kinds(m: &FormMatrix) -> Vec<Kind> {
    classify_all(m, &SiOptions::default()).unwrap().verdicts.iter().map(|v| v.kind).collect()
}

use Kind::{Essential as E, Inessential as I, StronglyInessential as S};

#[test]
fn one_step_matrix_and_basis() {
    let d = one_step_datum(Q);
    let m = d.canonical_matrix().unwrap();
    assert_eq!(m, mat(Q, 2, ONE_STEP));
    let basis = [
        "X^3*Y^2*(X+Y)",
        "X^2*Y^2*(X+Y)*(X-Y)^3",
        "X*Y^2*(X+Y)*(X-Y)^4",
        "Y^2*(X+Y)*(X-Y)^5",
        "X*Y*(X+Y)*(X-Y)^5",
        "X*(X+Y)*(X-Y)^6",
        "X*Y*(X-Y)^6",
    ];
    for (f, g) in m.maximal_minors().unwrap().iter().zip(basis) {
        assert!(f.is_proportional(&form(Q, 2, g)), "{f} vs {g}");
    }
    d.verify_matrix(&m).unwrap();
    let p = d.build_ideal().unwrap().profile(None).unwrap();
    assert_eq!(p.degree_vector(), vec![6, 8, 8, 8, 8, 8, 8]);
}

#[test]
fn one_step_verdicts() {
    for field in [Q, Field::Prime(5)] {
        let m = one_step_datum(field).canonical_matrix().unwrap();
        assert_eq!(kinds(&m), vec![E, S, S, E, S, E, E], "{field}");
    }
}

#[test]
fn one_step_alternative_bases() {
    let d = one_step_datum(Q);
    // any η of degree 3 coprime to Φ in the corner
    let m = d.variant_matrix(&Variant::Corner(form(Q, 2, "X^3 + 2*Y^3 - X*Y^2"))).unwrap();
    assert_eq!(kinds(&m), vec![E, S, S, E, S, E, E]);
    // H1 at (4,4) replaced by U: the basis becomes the one with
    // H2 H3 U^6, H3 U^7, H2 U^7 in degree 8
    let m = d.variant_matrix(&Variant::ReplaceFactor(0)).unwrap();
    assert_eq!(m.entry(3, 3), &form(Q, 2, "X-Y"));
    let tilde = ["Y*(X+Y)*(X-Y)^6", "(X+Y)*(X-Y)^7", "Y*(X-Y)^7"];
    for (f, g) in m.maximal_minors().unwrap()[4..].iter().zip(tilde) {
        assert!(f.is_proportional(&form(Q, 2, g)));
    }
    // F11, F12 s.i. and F13 inessential but not s.i.; the fifth generator
    // is not s.i. either: C5 - C4 - C6 - C7 = (0, 0, X, -X, X, X)
    let k = kinds(&m);
    assert_eq!((k[1], k[2], k[3]), (S, S, I));
    assert_eq!(k[4], I);
    let col: Vec<_> = (0..6)
        .map(|i| {
            let e = |j: usize| m.entry(i, j).clone();
            e(4).sub(&e(3)).unwrap().sub(&e(5)).unwrap().sub(&e(6)).unwrap()
        })
        .collect();
    let x = form(Q, 2, "X");
    assert!(col.iter().all(|f| x.divides(f)) && col.iter().any(|f| !f.is_zero()));
    // H2 at (6,6) replaced by U: F22 inessential but not s.i.
    let m = d.variant_matrix(&Variant::ReplaceFactor(1)).unwrap();
    assert_eq!(m.entry(5, 5), &form(Q, 2, "X-Y"));
    assert_eq!(kinds(&m), vec![E, S, S, E, S, I, E]);
}

#[test]
fn not_si_columns_carry_checked_replacements() {
    let m = one_step_datum(Q).variant_matrix(&Variant::ReplaceFactor(1)).unwrap();
    let c = classify_all(&m, &SiOptions::default()).unwrap();
    assert_eq!(c.e_maximal, Some(false));
    match &c.verdicts[5].witness {
        Witness::Replacement { lambdas, .. } => {
            let lam: Vec<(usize, hilbert_burch::Form)> =
                lambdas.iter().map(|(i, s)| (*i, form(Q, 2, s))).collect();
            let col = hilbert_burch::essentiality::replacement(&m, 5, &lam).unwrap();
            assert!(!hilbert_burch::essentiality::is_primary(&col));
        }
        w => panic!("expected a replacement, got {w:?}"),
    }
}

#[test]
fn three_lines_matrices() {
    for (which, display) in [(1, THREE_LINES_1), (2, THREE_LINES_2), (3, THREE_LINES_3)] {
        let d = three_lines_datum(Q, which);
        let m = d.canonical_matrix().unwrap();
        assert_eq!(m, mat(Q, 2, display), "datum {which}");
        d.verify_matrix(&m).unwrap();
    }
    let nu: Vec<usize> = three_lines_datum(Q, 3).build_ideal().unwrap().profile(None).unwrap().nu_by_degree.into_values().collect();
    assert_eq!(nu, vec![3, 1, 1, 1]);
}

#[test]
fn three_lines_si_counts() {
    for (which, total) in [(1, 3), (2, 3), (3, 2)] {
        for field in [Q, Field::Prime(7)] {
            let d = three_lines_datum(field, which);
            let m = d.canonical_matrix().unwrap();
            let c = classify_all(&m, &SiOptions::default()).unwrap();
            let seen = SiCount::observed(&m, &c);
            assert_eq!(seen.total, total, "datum {which} over {field}");
            assert_eq!(seen, d.si_count());
            assert_eq!((seen.total, seen.per_degree), predicted_si(&d));
        }
    }
}

#[test]
fn three_lines_first_splittings_keep_si() {
    let d = three_lines_datum(Q, 1);
    let m = d.canonical_matrix().unwrap();
    for p in 7..=9 {
        let s = split(&m, p).unwrap();
        let r = check_splitting(&m, &s, &SiOptions::default()).unwrap();
        assert!(r.holds && r.reverse_examples.is_empty(), "p = {p}: {r:?}");
    }
}

#[test]
fn three_lines_second_split_at_8() {
    let m = three_lines_datum(Q, 2).canonical_matrix().unwrap();
    let s = split(&m, 8).unwrap();
    let top: Vec<&[&str]> = THREE_LINES_2[..5].iter().map(|r| &r[..6]).collect();
    assert_eq!(s.m_prime.entries(), mat(Q, 2, &top).entries());
    // lower block C as displayed; D = gcd(I_8) = HK, corner of degree 9
    assert_eq!(s.m_second.submatrix(&[0, 1], &[1, 2]).unwrap().entries(), mat(Q, 2, &[&["-X", "0"], &["X", "-Y"]]).entries());
    assert!(s.d.is_proportional(&form(Q, 2, "X*Y")));
    assert_eq!(s.m_second.entry(0, 0).degree(), 9);
    let c = classify_all(&s.m_prime, &SiOptions::default()).unwrap();
    assert_eq!(c.verdicts.iter().map(|v| v.kind).collect::<Vec<_>>(), vec![E, E, E, S, I, E]);
    // U replaced by H in that column: every inessential column is then s.i.
    let mut rows: Vec<Vec<&str>> = top.iter().map(|r| r.to_vec()).collect();
    rows[4][4] = "X";
    let fixed = mat(Q, 2, &rows.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
    let c = classify_all(&fixed, &SiOptions::default()).unwrap();
    assert_eq!(c.e_maximal, Some(true));
    assert_eq!(c.verdicts[4].kind, E);
}
