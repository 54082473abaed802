#![allow(dead_code)]

use std::collections::BTreeMap;

use hilbert_burch::dubreil2::{default_forms, DubreilDatum};
use hilbert_burch::form::{parse_form, random_form, LinearFactorization};
use hilbert_burch::matrix::FormMatrix;
use hilbert_burch::{Field, Form};
use rand::Rng;

pub const Q: Field = Field::Rational;

pub fn form(field: Field, n: usize, s: &str) -> Form {
    parse_form(field, n, s, None).unwrap()
}

pub fn mat(field: Field, n: usize, rows: &[&[&str]]) -> FormMatrix {
    let entries = rows.iter().map(|r| r.iter().map(|s| form(field, n, s)).collect()).collect();
    FormMatrix::new(field, n, entries).unwrap()
}

pub fn lf(field: Field, fs: &[(&Form, u32)]) -> LinearFactorization {
    LinearFactorization::new(field.one(), fs.iter().map(|(h, m)| ((*h).clone(), *m)).collect()).unwrap()
}

/// `(H_1^3 H_2^2 H_3) + S_8` with `H = X, Y, X+Y` and `U = X-Y`.
pub fn one_step_datum(field: Field) -> DubreilDatum {
    let f = default_forms(field, 5);
    let (h1, h2, h3, u) = (&f[0], &f[1], &f[2], &f[3]);
    DubreilDatum::new(field, 0, vec![2], vec![lf(field, &[(h1, 3), (h2, 2), (h3, 1)])], u.clone(), vec![f[4].clone()])
        .unwrap()
}

/// Three data sharing `H = X`, `K = Y`, `U = X+Y`,
/// `L = (X-Y, X+2Y, X-2Y)`.
pub fn three_lines_datum(field: Field, which: usize) -> DubreilDatum {
    let f = default_forms(field, 6);
    let (h, k, u) = (&f[0], &f[1], &f[2]);
    let ls = vec![f[3].clone(), f[4].clone(), f[5].clone()];
    let (gaps, phis) = match which {
        1 => (vec![1, 2], vec![lf(field, &[(h, 3)]), lf(field, &[(k, 2)])]),
        2 => (vec![1, 2], vec![lf(field, &[(h, 2), (k, 1)]), lf(field, &[(h, 1), (k, 1)])]),
        3 => (vec![1, 3, 1], vec![lf(field, &[(h, 1)]), lf(field, &[(h, 1)]), lf(field, &[(h, 1)])]),
        _ => panic!("no datum {which}"),
    };
    DubreilDatum::new(field, 2, gaps, phis, u.clone(), ls).unwrap()
}

/// Strongly inessential counts predicted from the factorizations alone:
/// `δ - v` in total and `Σ_j (μ_kj - 1) + τ_k` in degree `α_k`.
pub fn predicted_si(d: &DubreilDatum) -> (usize, BTreeMap<u32, usize>) {
    let phis = d.phis();
    let mut lines: Vec<&Form> = Vec::new();
    for p in phis {
        for (h, _) in &p.factors {
            if !lines.iter().any(|g| g.is_proportional(h)) {
                lines.push(h);
            }
        }
    }
    let delta: u32 = phis.iter().flat_map(|p| p.factors.iter().map(|(_, m)| m)).sum();
    let mut alpha = d.beta0() + delta;
    let mut per = BTreeMap::new();
    for (k, p) in phis.iter().enumerate() {
        alpha += d.gaps()[k];
        let later = |h: &Form| phis[k + 1..].iter().any(|q| q.factors.iter().any(|(g, _)| g.is_proportional(h)));
        let c: usize = p.factors.iter().map(|(h, m)| (*m as usize - 1) + later(h) as usize).sum();
        if c > 0 {
            per.insert(alpha, c);
        }
    }
    (delta as usize - lines.len(), per)
}

/// A random Hilbert–Burch matrix with nonconstant entries whose minors
/// generate a height-2 ideal, or `None` when the draw degenerates.
pub fn random_hb_matrix<R: Rng>(field: Field, n: usize, max_cols: usize, rng: &mut R) -> Option<FormMatrix> {
    let nu = rng.gen_range(2..=max_cols);
    let s: Vec<i64> = (0..nu - 1).map(|_| rng.gen_range(1..=2)).collect();
    let mut a = vec![s.iter().sum::<i64>()];
    for _ in 1..nu {
        a.push(a.last().unwrap() + rng.gen_range(0..=1));
    }
    let b: Vec<i64> = (0..nu - 1).map(|i| a[i + 1] + s[i]).collect();
    let entries = b
        .iter()
        .map(|&bi| {
            a.iter()
                .map(|&aj| {
                    let d = bi - aj;
                    if d <= 0 || rng.gen_bool(0.15) {
                        Form::zero(field, n, d.max(0) as u32)
                    } else {
                        random_form(field, n, d as u32, 2, rng)
                    }
                })
                .collect()
        })
        .collect();
    let m = FormMatrix::with_degrees(field, n, entries, b, a).ok()?;
    let minors = m.maximal_minors().ok()?;
    if minors.iter().any(Form::is_zero) {
        return None;
    }
    m.minors_ideal().ok()?.profile(None).ok()?;
    Some(m)
}

// H1 = X, H2 = Y, H3 = X+Y, U = X-Y
pub const ONE_STEP: &[&[&str]] = &[
    &["(X-Y)^3", "-X", "0", "0", "0", "0", "0"],
    &["0", "X-Y", "-X", "0", "0", "0", "0"],
    &["0", "0", "X-Y", "-X", "0", "0", "0"],
    &["0", "0", "0", "X", "-Y", "0", "0"],
    &["0", "0", "0", "0", "X-Y", "-Y", "0"],
    &["0", "0", "0", "0", "0", "Y", "-X-Y"],
];

// H = X, K = Y, U = X+Y, L = (X-Y, X+2Y, X-2Y)
pub const THREE_LINES_1: &[&[&str]] = &[
    &["X-Y", "-X-2*Y", "0", "0", "0", "0", "0", "0"],
    &["0", "X+2*Y", "-X+2*Y", "0", "0", "0", "0", "0"],
    &["0", "0", "(X-2*Y)*(X+Y)", "-X", "0", "0", "0", "0"],
    &["0", "0", "0", "X+Y", "-X", "0", "0", "0"],
    &["0", "0", "0", "0", "X+Y", "-X", "0", "0"],
    &["0", "0", "0", "0", "0", "X*(X+Y)^2", "-Y", "0"],
    &["0", "0", "0", "0", "0", "0", "X+Y", "-Y"],
];

pub const THREE_LINES_2: &[&[&str]] = &[
    &["X-Y", "-X-2*Y", "0", "0", "0", "0", "0", "0"],
    &["0", "X+2*Y", "-X+2*Y", "0", "0", "0", "0", "0"],
    &["0", "0", "(X-2*Y)*(X+Y)", "-X", "0", "0", "0", "0"],
    &["0", "0", "0", "X+Y", "-X", "0", "0", "0"],
    &["0", "0", "0", "0", "X+Y", "-Y", "0", "0"],
    &["0", "0", "0", "0", "0", "(X+Y)^3", "-X", "0"],
    &["0", "0", "0", "0", "0", "0", "X", "-Y"],
];

pub const THREE_LINES_3: &[&[&str]] = &[
    &["X-Y", "-X-2*Y", "0", "0", "0", "0"],
    &["0", "X+2*Y", "-X+2*Y", "0", "0", "0"],
    &["0", "0", "(X-2*Y)*(X+Y)", "-X", "0", "0"],
    &["0", "0", "0", "(X+Y)^4", "-X", "0"],
    &["0", "0", "0", "0", "(X+Y)^2", "-X"],
];
