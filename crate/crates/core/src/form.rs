//! Homogeneous polynomials ("forms") over an exact field.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

pub type Exponent = Vec<u32>;

/// All exponent vectors of total degree `d` in `n` variables, graded-lex
/// order with `X1 > X2 > ...` (so `X^d` comes first).
pub fn monomial_basis(n: usize, d: u32) -> Vec<Exponent> {
    assert!(n >= 1, "need at least one variable");
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fill(&mut out, &mut cur, 0, d);
    out
}

fn fill(out: &mut Vec<Exponent>, cur: &mut Exponent, i: usize, left: u32) {
    let n = cur.len();
    if i == n - 1 {
        cur[i] = left;
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(out, cur, i + 1, left - e);
    }
    cur[i] = 0;
}

/// `dim S_d = C(d+n-1, n-1)`.
pub fn dim_s(n: usize, d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    let d = d as u128;
    let mut acc: u128 = 1;
    for k in 1..n as u128 {
        acc = acc * (d + k) / k;
    }
    acc as usize
}

pub fn var_name(n: usize, i: usize) -> String {
    if n <= 3 {
        ["X", "Y", "Z"][i].to_string()
    } else {
        format!("X{}", i + 1)
    }
}

/// A homogeneous polynomial of fixed degree. The zero form keeps its degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    nvars: usize,
    degree: u32,
    field: Field,
    terms: BTreeMap<Exponent, Scalar>,
}

impl Form {
    pub fn zero(field: Field, nvars: usize, degree: u32) -> Self {
        Form { nvars, degree, field, terms: BTreeMap::new() }
    }

    pub fn constant(field: Field, nvars: usize, c: Scalar) -> Self {
        Self::monomial(field, vec![0; nvars], c)
    }

    pub fn one(field: Field, nvars: usize) -> Self {
        Self::constant(field, nvars, field.one())
    }

    pub fn monomial(field: Field, exp: Exponent, c: Scalar) -> Self {
        let degree = exp.iter().sum();
        let mut f = Form::zero(field, exp.len(), degree);
        if !c.is_zero() {
            f.terms.insert(exp, c);
        }
        f
    }

    pub fn var(field: Field, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(field, e, field.one())
    }

    /// Linear form `c_1 X_1 + ... + c_n X_n`.
    pub fn linear(field: Field, coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        let mut f = Form::zero(field, n, 1);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let mut e = vec![0; n];
                e[i] = 1;
                f.terms.insert(e, c.clone());
            }
        }
        f
    }

    pub fn linear_int(field: Field, coeffs: &[i64]) -> Self {
        let cs: Vec<Scalar> = coeffs.iter().map(|&c| field.int(c)).collect();
        Self::linear(field, &cs)
    }

    /// Builds a form from terms, checking homogeneity.
    pub fn from_terms(
        field: Field,
        nvars: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (Exponent, Scalar)>,
    ) -> Result<Self> {
        let mut f = Form::zero(field, nvars, degree);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Input(format!("exponent {e:?} has wrong length")));
            }
            if e.iter().sum::<u32>() != degree {
                return Err(Error::Degree(format!("term {e:?} is not of degree {degree}")));
            }
            if c.field() != field {
                return Err(Error::Input("coefficient from a different field".into()));
            }
            f.add_term(e, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, e: Exponent, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = &*v + &c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0 && !self.is_zero()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex order, largest first.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn leading(&self) -> Option<(&Exponent, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn same_ring(&self, other: &Form) {
        assert_eq!(self.nvars, other.nvars, "forms in different rings");
        assert_eq!(self.field, other.field, "forms over different fields");
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.same_ring(other);
        if self.is_zero() {
            return Ok(other.clone().with_degree_if_zero(self.degree, other.degree));
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    fn with_degree_if_zero(mut self, a: u32, b: u32) -> Form {
        if self.is_zero() {
            self.degree = a.max(b);
        }
        self
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.scale(&-self.field.one())
    }

    pub fn scale(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.field, self.nvars, self.degree);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.terms.insert(e.clone(), v * c);
        }
        out
    }

    /// Exact product; degree is the sum of degrees.
    pub fn mul(&self, other: &Form) -> Form {
        self.same_ring(other);
        let mut out = Form::zero(self.field, self.nvars, self.degree + other.degree);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Form {
        let mut acc = Form::one(self.field, self.nvars);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn product<'a>(field: Field, nvars: usize, fs: impl IntoIterator<Item = &'a Form>) -> Form {
        fs.into_iter().fold(Form::one(field, nvars), |acc, f| acc.mul(f))
    }

    /// Multiplies by the monomial `x^e`.
    pub fn shift(&self, e: &[u32]) -> Form {
        let d: u32 = e.iter().sum();
        let mut out = Form::zero(self.field, self.nvars, self.degree + d);
        for (m, c) in &self.terms {
            let k: Exponent = m.iter().zip(e).map(|(a, b)| a + b).collect();
            out.terms.insert(k, c.clone());
        }
        out
    }

    /// Exact quotient `self / g`, or `None` when `g` does not divide `self`.
    pub fn divide_exact(&self, g: &Form) -> Option<Form> {
        self.same_ring(g);
        let (glead, gc) = g.leading()?;
        let (glead, ginv) = (glead.clone(), gc.inv());
        if self.degree < g.degree {
            return None;
        }
        let mut rem = self.clone();
        let mut q = Form::zero(self.field, self.nvars, self.degree - g.degree);
        while let Some((e, c)) = rem.leading() {
            if e.iter().zip(&glead).any(|(a, b)| a < b) {
                return None;
            }
            let qe: Exponent = e.iter().zip(&glead).map(|(a, b)| a - b).collect();
            let qc = c * &ginv;
            let t = Form::monomial(self.field, qe.clone(), qc.clone());
            rem = rem.sub(&t.mul(g)).ok()?;
            q.add_term(qe, qc);
        }
        Some(q)
    }

    pub fn divides(&self, f: &Form) -> bool {
        f.divide_exact(self).is_some()
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(e) {
                t = &t * &x.pow(*k);
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Replaces variable `i` by `images[i]` (each a linear or zero form).
    pub fn substitute_linear(&self, images: &[Form]) -> Result<Form> {
        if images.len() != self.nvars {
            return Err(Error::Input(format!(
                "need {} images, got {}",
                self.nvars,
                images.len()
            )));
        }
        let target_n = images[0].nvars;
        for im in images {
            if im.nvars != target_n || (!im.is_zero() && im.degree != 1) {
                return Err(Error::Input(format!("non-linear image {im}")));
            }
        }
        let mut out = Form::zero(self.field, target_n, self.degree);
        let mut powers: Vec<Vec<Form>> = images.iter().map(|im| vec![Form::one(self.field, target_n), im.clone()]).collect();
        for (e, c) in &self.terms {
            let mut t = Form::constant(self.field, target_n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][k as usize]);
            }
            if !t.is_zero() {
                out = out.add(&t)?;
            }
        }
        out.degree = self.degree;
        Ok(out)
    }

    /// Reinterprets the form in the first `n` variables; fails if a dropped
    /// variable occurs.
    pub fn restrict_vars(&self, n: usize) -> Result<Form> {
        let mut out = Form::zero(self.field, n, self.degree);
        for (e, c) in &self.terms {
            if e[n..].iter().any(|&k| k > 0) {
                return Err(Error::Input(format!("{self} involves a dropped variable")));
            }
            out.terms.insert(e[..n].to_vec(), c.clone());
        }
        Ok(out)
    }

    /// Embeds into a ring with more variables.
    pub fn extend_vars(&self, n: usize) -> Form {
        let mut out = Form::zero(self.field, n, self.degree);
        for (e, c) in &self.terms {
            let mut k = e.clone();
            k.resize(n, 0);
            out.terms.insert(k, c.clone());
        }
        out
    }

    /// Scales so that the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Form {
        match self.leading() {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    /// `self = c * other` for some nonzero scalar `c`.
    pub fn is_proportional(&self, other: &Form) -> bool {
        !self.is_zero() && !other.is_zero() && self.degree == other.degree && self.monic() == other.monic()
    }

    /// Coefficients with respect to `monomial_basis(n, deg)`.
    pub fn coefficients(&self) -> Vec<Scalar> {
        monomial_basis(self.nvars, self.degree).iter().map(|e| self.coeff(e)).collect()
    }

    /// Coefficients of a linear form, one per variable.
    pub fn linear_coeffs(&self) -> Vec<Scalar> {
        (0..self.nvars)
            .map(|i| {
                let mut e = vec![0; self.nvars];
                e[i] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// The same form over another field (reduction mod `p` of a rational
    /// form, or identity).
    pub fn to_field(&self, field: Field) -> Result<Form> {
        if field == self.field {
            return Ok(self.clone());
        }
        let mut out = Form::zero(field, self.nvars, self.degree);
        for (e, c) in &self.terms {
            let (n, d) = c.as_ratio();
            let v = field.parse(&format!("{n}/{d}"))?;
            out.add_term(e.clone(), v);
        }
        Ok(out)
    }

    pub fn to_raw(&self) -> RawForm {
        RawForm::Object {
            vars: self.nvars,
            deg: self.degree,
            terms: self
                .terms()
                .map(|(e, c)| RawTerm { exp: e.clone(), c: Value::String(c.to_string()) })
                .collect(),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || e.iter().all(|&k| k == 0) {
                factors.push(abs.to_string());
            }
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(var_name(self.nvars, i)),
                    _ => factors.push(format!("{}^{}", var_name(self.nvars, i), k)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form[{}]({})", self.degree, self)
    }
}

/// Dimension of the span of forms of common degree `d`.
pub fn forms_rank(field: Field, nvars: usize, d: u32, forms: &[Form]) -> usize {
    let basis = monomial_basis(nvars, d);
    let index: std::collections::HashMap<&Exponent, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let vecs: Vec<Vec<Scalar>> = forms
        .iter()
        .filter(|f| !f.is_zero())
        .map(|f| {
            assert_eq!(f.degree(), d, "forms of mixed degree");
            let mut v = vec![field.zero(); basis.len()];
            for (e, c) in f.terms() {
                v[index[e]] = c.clone();
            }
            v
        })
        .collect();
    crate::linalg::span_dimension(field, basis.len(), &vecs)
}

/// A form factored into pairwise independent linear forms.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFactorization {
    pub unit: Scalar,
    pub factors: Vec<(Form, u32)>,
}

impl LinearFactorization {
    pub fn new(unit: Scalar, factors: Vec<(Form, u32)>) -> Result<Self> {
        for (i, (h, mu)) in factors.iter().enumerate() {
            if h.degree() != 1 || h.is_zero() {
                return Err(Error::Input(format!("factor {h} is not a linear form")));
            }
            if *mu == 0 {
                return Err(Error::Input("multiplicities must be positive".into()));
            }
            for (k, _) in &factors[..i] {
                if k.is_proportional(h) {
                    return Err(Error::Input(format!("dependent linear forms {k} and {h}")));
                }
            }
        }
        if unit.is_zero() {
            return Err(Error::Input("zero unit".into()));
        }
        Ok(LinearFactorization { unit, factors })
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, m)| m).sum()
    }

    pub fn expand(&self, field: Field, nvars: usize) -> Form {
        let mut f = Form::constant(field, nvars, self.unit.clone());
        for (h, mu) in &self.factors {
            f = f.mul(&h.pow(*mu));
        }
        f
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTerm {
    pub exp: Vec<u32>,
    pub c: Value,
}

/// Wire form of a [`Form`]: a term object, an expression string such as
/// `"X^2*Y - 3*Z^3"`, or a coefficient vector for a linear form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawForm {
    Object { vars: usize, deg: u32, terms: Vec<RawTerm> },
    Expr(String),
    Coeffs(Vec<Value>),
}

pub fn scalar_from_json(field: Field, v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(field.int(i))
            } else {
                Err(Error::Input(format!("non-integer numeric coefficient {n}; quote rationals")))
            }
        }
        Value::String(s) => field.parse(s),
        other => Err(Error::Input(format!("bad coefficient {other}"))),
    }
}

impl RawForm {
    /// Converts into a form of `nvars` variables; `deg` is used for zero
    /// expressions and checked otherwise.
    pub fn to_form(&self, field: Field, nvars: usize, deg: Option<u32>) -> Result<Form> {
        let f = match self {
            RawForm::Object { vars, deg: d, terms } => {
                if *vars != nvars {
                    return Err(Error::Input(format!("form has {vars} variables, expected {nvars}")));
                }
                let ts = terms
                    .iter()
                    .map(|t| Ok((t.exp.clone(), scalar_from_json(field, &t.c)?)))
                    .collect::<Result<Vec<_>>>()?;
                Form::from_terms(field, nvars, *d, ts)?
            }
            RawForm::Expr(s) => parse_form(field, nvars, s, deg)?,
            RawForm::Coeffs(cs) => {
                if cs.len() != nvars {
                    return Err(Error::Input(format!("linear form needs {nvars} coefficients")));
                }
                let cs = cs.iter().map(|c| scalar_from_json(field, c)).collect::<Result<Vec<_>>>()?;
                Form::linear(field, &cs)
            }
        };
        match deg {
            Some(d) if f.degree() != d => {
                if f.is_zero() {
                    Ok(Form::zero(field, nvars, d))
                } else {
                    Err(Error::Degree(format!("{f} has degree {}, expected {d}", f.degree())))
                }
            }
            _ => Ok(f),
        }
    }
}

/// Parses an expression like `"(X+2*Y)^3 - Z*X^2"` into a form.
pub fn parse_form(field: Field, nvars: usize, s: &str, deg: Option<u32>) -> Result<Form> {
    let mut p = Parser { field, nvars, chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let poly = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(Error::Input(format!("trailing input in {s:?}")));
    }
    let mut degs: Vec<u32> = poly.keys().map(|e| e.iter().sum()).collect();
    degs.dedup();
    let degree = match degs.first() {
        None => deg.unwrap_or(0),
        Some(&d) => {
            if degs.iter().any(|&x| x != d) {
                return Err(Error::Degree(format!("{s:?} is not homogeneous")));
            }
            d
        }
    };
    Form::from_terms(field, nvars, degree, poly)
}

type Poly = BTreeMap<Exponent, Scalar>;

struct Parser {
    field: Field,
    nvars: usize,
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> Error {
        let s: String = self.chars.iter().collect();
        Error::Input(format!("{msg} at position {} in {s:?}", self.pos))
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::new();
        let mut sign = 1;
        if let Some(c @ ('+' | '-')) = self.peek() {
            sign = if c == '-' { -1 } else { 1 };
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            acc = padd(acc, t, self.field.int(sign));
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let f = self.power()?;
            acc = pmul(&acc, &f);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            let mut acc = self.unit();
            for _ in 0..k {
                acc = pmul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn unit(&self) -> Poly {
        let mut p = Poly::new();
        p.insert(vec![0; self.nvars], self.field.one());
        p
    }

    fn integer(&mut self) -> Result<u32> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected integer"))
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '/') {
                    self.pos += 1;
                }
                let s: String = self.chars[start..self.pos].iter().collect();
                let c = self.field.parse(&s)?;
                let mut p = Poly::new();
                if !c.is_zero() {
                    p.insert(vec![0; self.nvars], c);
                }
                Ok(p)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                self.pos += 1;
                let idx = if c == 'X' && matches!(self.peek(), Some(d) if d.is_ascii_digit()) {
                    self.integer()? as usize - 1
                } else {
                    match c {
                        'X' | 'x' => 0,
                        'Y' | 'y' => 1,
                        'Z' | 'z' => 2,
                        _ => return Err(self.err("unknown variable")),
                    }
                };
                if idx >= self.nvars {
                    return Err(self.err("variable out of range"));
                }
                let mut e = vec![0; self.nvars];
                e[idx] = 1;
                let mut p = Poly::new();
                p.insert(e, self.field.one());
                Ok(p)
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

fn padd(mut a: Poly, b: Poly, s: Scalar) -> Poly {
    for (e, c) in b {
        let v = &c * &s;
        let sum = match a.get(&e) {
            Some(x) => x + &v,
            None => v,
        };
        if sum.is_zero() {
            a.remove(&e);
        } else {
            a.insert(e, sum);
        }
    }
    a
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            let e: Exponent = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            let mut t = Poly::new();
            t.insert(e, c1 * c2);
            out = padd(out, t, c1.field().one());
        }
    }
    out
}

/// Form of degree `d` with coefficients drawn uniformly from `-range..=range`.
pub fn random_form<R: rand::Rng>(field: Field, nvars: usize, d: u32, range: i64, rng: &mut R) -> Form {
    let terms = monomial_basis(nvars, d).into_iter().map(|e| (e, field.int(rng.gen_range(-range..=range))));
    Form::from_terms(field, nvars, d, terms).expect("monomials of the right degree")
}
