//! Arithmetic specific to binary forms `k[X, Y]`: gcd, radicals, linear
//! factors.

use crate::field::{Field, Scalar};
use crate::form::Form;

/// Univariate polynomial, coefficients from low to high degree.
type Upoly = Vec<Scalar>;

fn trim(p: &mut Upoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// `f(x, 1)` together with the power of `Y` dividing `f`.
fn dehomogenize(f: &Form) -> (Upoly, u32) {
    let d = f.degree();
    let mut p = vec![f.field().zero(); d as usize + 1];
    for (e, c) in f.terms() {
        p[e[0] as usize] = c.clone();
    }
    trim(&mut p);
    let ypow = d + 1 - p.len() as u32;
    (p, ypow)
}

fn homogenize(field: Field, p: &Upoly, ypow: u32) -> Form {
    let dp = p.len() as u32 - 1;
    let terms = p.iter().enumerate().map(|(i, c)| (vec![i as u32, dp - i as u32 + ypow], c.clone()));
    Form::from_terms(field, 2, dp + ypow, terms).expect("homogeneous by construction")
}

fn urem(a: &Upoly, b: &Upoly) -> Upoly {
    let mut r = a.clone();
    let lb = b.last().unwrap().inv();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let q = &r[r.len() - 1] * &lb;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] = &r[i + shift] - &(&q * c);
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn ugcd(a: &Upoly, b: &Upoly) -> Upoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = urem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Monic gcd of two binary forms. `gcd(0, 0) = 0`.
pub fn gcd(f: &Form, g: &Form) -> Form {
    assert_eq!(f.nvars(), 2, "gcd is only available for binary forms");
    let field = f.field();
    if f.is_zero() {
        return g.monic();
    }
    if g.is_zero() {
        return f.monic();
    }
    let (pf, yf) = dehomogenize(f);
    let (pg, yg) = dehomogenize(g);
    let p = ugcd(&pf, &pg);
    homogenize(field, &p, yf.min(yg)).monic()
}

pub fn gcd_all<'a>(field: Field, fs: impl IntoIterator<Item = &'a Form>) -> Form {
    let mut acc = Form::zero(field, 2, 0);
    for f in fs {
        acc = gcd(&acc, f);
        if acc.degree() == 0 && !acc.is_zero() {
            break;
        }
    }
    acc
}

/// Part of `r` whose roots are not roots of `f`; constant iff
/// `rad(r) | f`.
pub fn strip_common_roots(r: &Form, f: &Form) -> Form {
    let mut r = r.clone();
    loop {
        let g = gcd(&r, f);
        if g.degree() == 0 {
            return r;
        }
        r = r.divide_exact(&g).expect("gcd divides");
    }
}

/// Multiplicity of the linear form `h` in `f` (`f != 0`).
pub fn multiplicity(f: &Form, h: &Form) -> u32 {
    let mut f = f.clone();
    let mut m = 0;
    while let Some(q) = f.divide_exact(h) {
        if f.is_zero() {
            break;
        }
        f = q;
        m += 1;
    }
    m
}

/// The point `[a : b]` on which the linear form `h = uX + vY` vanishes.
pub fn root_of_linear(h: &Form) -> Vec<Scalar> {
    let c = h.linear_coeffs();
    vec![-&c[1], c[0].clone()]
}

/// Linear form vanishing at `[a : b]`.
pub fn linear_through(field: Field, p: &[Scalar]) -> Form {
    Form::linear(field, &[p[1].clone(), -&p[0]])
}

/// Points of `P^1(F_p)`: `[1 : 0]` and `[a : 1]`.
pub fn projective_line(field: Field) -> Option<Vec<Vec<Scalar>>> {
    let els = field.elements()?;
    let mut pts = vec![vec![field.one(), field.zero()]];
    pts.extend(els.into_iter().map(|a| vec![a, field.one()]));
    Some(pts)
}

/// A root of `f` in `P^1(k)`, searching `P^1(F_p)` for prime fields and
/// the roots of `candidates` otherwise.
pub fn find_root(f: &Form, candidates: &[Form]) -> Option<Vec<Scalar>> {
    let field = f.field();
    if f.is_zero() || f.degree() == 0 {
        return None;
    }
    if let Some(pts) = projective_line(field) {
        return pts.into_iter().find(|p| f.eval(p).is_zero());
    }
    if f.degree() == 1 {
        return Some(root_of_linear(f));
    }
    for h in candidates {
        if h.degree() == 1 && !h.is_zero() && h.divides(f) {
            return Some(root_of_linear(h));
        }
    }
    for a in -20i64..=20 {
        let p = vec![field.int(a), field.one()];
        if f.eval(&p).is_zero() {
            return Some(p);
        }
    }
    let p = vec![field.one(), field.zero()];
    f.eval(&p).is_zero().then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_form;

    fn f(s: &str) -> Form {
        parse_form(Field::Rational, 2, s, None).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&f("X^2*Y"), &f("X*Y^2")), f("X*Y"));
        assert_eq!(gcd(&f("(X+Y)^2*(X-Y)"), &f("(X+Y)*Y^3")), f("X+Y"));
        assert_eq!(gcd(&f("X"), &f("Y")).degree(), 0);
        assert_eq!(gcd(&f("3*X*Y^2"), &f("0")), f("X*Y^2"));
        assert_eq!(gcd(&f("Y^2"), &f("Y^3+X*Y^2")), f("Y^2"));
    }

    #[test]
    fn radicals() {
        let r = strip_common_roots(&f("X^3*(X+Y)"), &f("X*Y"));
        assert_eq!(r, f("X+Y"));
        assert_eq!(strip_common_roots(&f("X^3*Y^2"), &f("X*Y")).degree(), 0);
        assert_eq!(multiplicity(&f("X^3*(X+Y)"), &f("X")), 3);
    }

    #[test]
    fn roots() {
        let h = f("2*X - 3*Y");
        let p = root_of_linear(&h);
        assert!(h.eval(&p).is_zero());
        assert!(linear_through(Field::Rational, &p).is_proportional(&h));
        let g = f("(X-5*Y)*(X^2+Y^2)");
        let p = find_root(&g, &[]).unwrap();
        assert!(g.eval(&p).is_zero());
        let f5 = Field::Prime(5);
        assert_eq!(projective_line(f5).unwrap().len(), 6);
    }
}
