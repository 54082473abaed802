//! Essential, inessential and strongly inessential columns of a
//! Hilbert–Burch matrix.
//!
//! A column is inessential when the ideal of its entries is primary to the
//! irrelevant ideal. It is strongly inessential (s.i.) when every
//! degree-compatible replacement `C_j + Σ λ_i C_i` stays inessential. The
//! exact test used by the `algebraic` strategy rests on a pointwise
//! observation: some replacement vanishes at a point `p` iff `C_j(p)` lies in
//! the span of the admissible `C_i(p)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binary;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::form::{dim_s, monomial_basis, Form};
use crate::ideal::GradedIdeal;
use crate::linalg::{self, Echelon};
use crate::matrix::FormMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Essential,
    Inessential,
    StronglyInessential,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    /// Lemma-shape match on the admissible columns.
    Structural { reading: String },
    /// Exact pointwise test over the algebraic closure.
    Algebraic { method: String },
    /// All replacements with coefficients in `F_p` checked.
    Exhaustive { prime: u64, coefficients: usize, replacements: u64, caveat: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// n = 2: the entries share a factor.
    CommonFactor { factor: String },
    /// The column ideal misses `M^t` at a degree `t` past which it would
    /// have to contain it.
    NotPrimary { checked_degree: u32, reason: String },
    /// `M^t` lies in the column ideal (minimal such `t`).
    Power { t: u32 },
    StronglyInessential { t: u32, certificate: Certificate },
    /// An essential replacement column.
    Replacement {
        t: u32,
        lambdas: Vec<(usize, String)>,
        column: Vec<String>,
        common_zero: Option<Vec<String>>,
        found_by: String,
    },
    /// Not s.i. over the algebraic closure, but no replacement with
    /// coefficients in the base field was produced.
    NoRationalReplacement { t: u32, obstruction: String },
    Unknown { t: u32, trials: u64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub col: usize,
    pub kind: Kind,
    pub witness: Witness,
}

impl Verdict {
    pub fn is_si(&self) -> bool {
        self.kind == Kind::StronglyInessential
    }

    /// Inessential but certainly not s.i.
    pub fn is_not_si(&self) -> bool {
        self.kind == Kind::Inessential
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Auto,
    Structural,
    Algebraic,
    Exhaustive,
    Montecarlo,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Strategy::Auto,
            "structural" => Strategy::Structural,
            "algebraic" => Strategy::Algebraic,
            "exhaustive" => Strategy::Exhaustive,
            "montecarlo" => Strategy::Montecarlo,
            _ => return Err(Error::Input(format!("unknown s.i. strategy {s:?}"))),
        })
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Strategy::Auto => "auto",
            Strategy::Structural => "structural",
            Strategy::Algebraic => "algebraic",
            Strategy::Exhaustive => "exhaustive",
            Strategy::Montecarlo => "montecarlo",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiOptions {
    pub strategy: Strategy,
    /// Prime used by the exhaustive search.
    pub prime: u64,
    /// Largest number of free λ-coefficients the exhaustive search accepts.
    pub budget: usize,
    pub trials: u64,
    pub seed: u64,
}

impl Default for SiOptions {
    fn default() -> Self {
        SiOptions { strategy: Strategy::Auto, prime: 5, budget: 8, trials: 10_000, seed: 0 }
    }
}

// ---------------------------------------------------------------------------
// inessentiality

/// Smallest `t` with `M^t ⊆ (entries)`, or `None` when the ideal is not
/// primary to the irrelevant ideal.
pub fn primary_power(entries: &[Form]) -> Option<u32> {
    primary_test(entries, true)
}

pub fn is_primary(entries: &[Form]) -> bool {
    primary_test(entries, false).is_some()
}

fn primary_test(entries: &[Form], minimal: bool) -> Option<u32> {
    let nz: Vec<&Form> = entries.iter().filter(|f| !f.is_zero()).collect();
    let first = nz.first()?;
    let (field, n) = (first.field(), first.nvars());
    if nz.iter().any(|f| f.degree() == 0) {
        return Some(0);
    }
    if nz.len() < n {
        return None;
    }
    if n == 2 && binary::gcd_all(field, nz.iter().copied()).degree() > 0 {
        return None;
    }
    if nz.iter().all(|f| f.degree() == 1) {
        let mut e = Echelon::new(field, n);
        for f in &nz {
            e.insert(&f.linear_coeffs());
        }
        return (e.rank() == n).then_some(1);
    }
    let top = nz.iter().map(|f| f.degree()).max().unwrap();
    // A primary ideal contains a regular sequence of n forms of degree
    // `top`, whose complete intersection contains M^{n(top-1)+1}.
    let bound = n as u32 * (top - 1) + 1;
    let ideal = GradedIdeal::new(field, n, nz.iter().map(|f| (*f).clone()).collect()).ok()?;
    let full = |t: u32| ideal.piece_dim(t) == dim_s(n, t as i64);
    if !full(bound) {
        return None;
    }
    if !minimal {
        return Some(bound);
    }
    let (mut lo, mut hi) = (nz.iter().map(|f| f.degree()).min().unwrap(), bound);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if full(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Essential / inessential test for column `j`.
pub fn classify_column(m: &FormMatrix, j: usize) -> Result<Verdict> {
    if j >= m.cols() {
        return Err(Error::Input(format!("column {j} out of range")));
    }
    let col = m.column(j);
    if col.iter().all(Form::is_zero) {
        return Err(Error::Input(format!("column {j} is zero")));
    }
    if let Some(t) = primary_power(&col) {
        return Ok(Verdict { col: j, kind: Kind::Inessential, witness: Witness::Power { t } });
    }
    let witness = if m.nvars() == 2 {
        let g = binary::gcd_all(m.field(), col.iter());
        Witness::CommonFactor { factor: g.to_string() }
    } else {
        let nz = col.iter().filter(|f| !f.is_zero()).count();
        let top = col.iter().map(Form::degree).max().unwrap_or(0);
        let reason = if nz < m.nvars() {
            format!("{nz} nonzero entries cannot generate an ideal of height {}", m.nvars())
        } else if col.iter().filter(|f| !f.is_zero()).all(|f| f.degree() == 1) {
            "linear entries of rank below the number of variables".to_string()
        } else {
            "regular-sequence bound exceeded".to_string()
        };
        Witness::NotPrimary { checked_degree: m.nvars() as u32 * top.saturating_sub(1) + 1, reason }
    };
    Ok(Verdict { col: j, kind: Kind::Essential, witness })
}

// ---------------------------------------------------------------------------
// strong inessentiality

/// Columns that may be added to column `j`, with the degree of their
/// multiplier `λ_i`.
pub fn admissible(m: &FormMatrix, j: usize) -> Vec<(usize, u32)> {
    let a = m.col_degrees();
    (0..m.cols()).filter(|&i| i != j && a[i] >= a[j]).map(|i| (i, (a[i] - a[j]) as u32)).collect()
}

/// Number of free coefficients in a replacement of column `j`.
pub fn coefficient_count(m: &FormMatrix, j: usize) -> usize {
    admissible(m, j).iter().map(|&(_, d)| dim_s(m.nvars(), d as i64)).sum()
}

/// `C_j + Σ λ_i C_i`.
pub fn replacement(m: &FormMatrix, j: usize, lambdas: &[(usize, Form)]) -> Result<Vec<Form>> {
    let mut col = m.column(j);
    for (i, lam) in lambdas {
        for (r, e) in col.iter_mut().enumerate() {
            let add = lam.mul(m.entry(r, *i));
            if !add.is_zero() {
                *e = e.add(&add)?;
            }
        }
    }
    Ok(col)
}

enum Outcome {
    Certified(Certificate),
    Counter { lambdas: Vec<(usize, Form)>, point: Option<Vec<Scalar>>, found_by: String },
    NoRational(String),
}

pub fn strongly_inessential(m: &FormMatrix, j: usize, opts: &SiOptions) -> Result<Verdict> {
    let base = classify_column(m, j)?;
    let Witness::Power { t } = base.witness else {
        return Err(Error::Precondition(format!("column {j} is essential")));
    };
    let outcome = match opts.strategy {
        Strategy::Structural => structural(m, j),
        Strategy::Algebraic => algebraic(m, j)?,
        Strategy::Exhaustive => Some(exhaustive(m, j, opts)?),
        Strategy::Montecarlo => structural(m, j).or(montecarlo(m, j, opts)?),
        Strategy::Auto => {
            let mut o = structural(m, j);
            if o.is_none() {
                o = algebraic(m, j)?;
            }
            if o.is_none() && coefficient_count(m, j) <= opts.budget {
                o = match exhaustive(m, j, opts) {
                    Ok(x) => Some(x),
                    Err(Error::Input(_)) => None,
                    Err(e) => return Err(e),
                };
            }
            if o.is_none() {
                o = montecarlo(m, j, opts)?;
            }
            o
        }
    };
    let (kind, witness) = match outcome {
        Some(Outcome::Certified(certificate)) => {
            (Kind::StronglyInessential, Witness::StronglyInessential { t, certificate })
        }
        Some(Outcome::Counter { lambdas, point, found_by }) => {
            let column = replacement(m, j, &lambdas)?;
            if is_primary(&column) {
                return Err(Error::Internal(format!("replacement for column {j} is still inessential")));
            }
            let witness = Witness::Replacement {
                t,
                lambdas: lambdas.iter().map(|(i, f)| (*i, f.to_string())).collect(),
                column: column.iter().map(Form::to_string).collect(),
                common_zero: point.map(|p| p.iter().map(Scalar::to_string).collect()),
                found_by,
            };
            (Kind::Inessential, witness)
        }
        Some(Outcome::NoRational(obstruction)) => (Kind::Inessential, Witness::NoRationalReplacement { t, obstruction }),
        None => {
            let trials = if matches!(opts.strategy, Strategy::Montecarlo | Strategy::Auto) { opts.trials } else { 0 };
            let reason = format!("strategy {} could not decide", opts.strategy);
            (Kind::Unknown, Witness::Unknown { t, trials, reason })
        }
    };
    Ok(Verdict { col: j, kind, witness })
}

/// λ-forms realising the values `c_i` at the point `p`.
fn lambdas_at_point(m: &FormMatrix, adm: &[(usize, u32)], p: &[Scalar], c: &[Scalar]) -> Vec<(usize, Form)> {
    let field = m.field();
    let k = p.iter().position(|x| !x.is_zero()).expect("projective point");
    let pinv = p[k].inv();
    adm.iter()
        .zip(c)
        .filter(|(_, ci)| !ci.is_zero())
        .map(|(&(i, d), ci)| {
            let mut e = vec![0; m.nvars()];
            e[k] = d;
            (i, Form::monomial(field, e, ci * &pinv.pow(d)))
        })
        .collect()
}

/// A replacement vanishing at `p`, when `C_j(p)` is in the span of the
/// admissible columns at `p`.
fn counter_at_point(m: &FormMatrix, j: usize, adm: &[(usize, u32)], p: &[Scalar], by: &str) -> Option<Outcome> {
    let rows = m.rows();
    let value = |i: usize| -> Vec<Scalar> { (0..rows).map(|r| m.entry(r, i).eval(p)).collect() };
    let cols: Vec<Vec<Scalar>> = adm.iter().map(|&(i, _)| value(i)).collect();
    let rhs: Vec<Scalar> = value(j).iter().map(|x| -x).collect();
    let c = linalg::solve(m.field(), &cols, &rhs)?;
    Some(Outcome::Counter { lambdas: lambdas_at_point(m, adm, p, &c), point: Some(p.to_vec()), found_by: by.into() })
}

// --- structural ------------------------------------------------------------

const LEMMA_READING: &str = "bidiagonal block on the admissible columns with linear diagonal; the \
subdiagonal entry is a multiple of its diagonal form exactly when that form makes its last diagonal \
appearance, and is divisible by no other diagonal form";

fn structural(m: &FormMatrix, j: usize) -> Option<Outcome> {
    if m.nvars() != 2 {
        return None;
    }
    let mut cols: Vec<usize> = admissible(m, j).into_iter().map(|(i, _)| i).collect();
    cols.push(j);
    cols.sort_unstable();
    let rows: Vec<usize> = (0..m.rows()).filter(|&r| cols.iter().any(|&c| !m.entry(r, c).is_zero())).collect();
    if rows.len() != cols.len() {
        return None;
    }
    let size = cols.len();
    let mut diag = Vec::with_capacity(size);
    for (k, &c) in cols.iter().enumerate() {
        let l = m.entry(rows[k], c);
        if l.is_zero() || l.degree() != 1 {
            return None;
        }
        for (q, &r) in rows.iter().enumerate() {
            if q != k && q != k + 1 && !m.entry(r, c).is_zero() {
                return None;
            }
        }
        diag.push(l.clone());
    }
    for k in 0..size.saturating_sub(1) {
        let g = m.entry(rows[k + 1], cols[k]);
        let lk = &diag[k];
        let last = diag[k + 1..].iter().all(|l| !l.is_proportional(lk));
        if g.is_zero() {
            return None;
        }
        if lk.divides(g) != last {
            return None;
        }
        if diag.iter().any(|l| !l.is_proportional(lk) && l.divides(g)) {
            return None;
        }
    }
    Some(Outcome::Certified(Certificate::Structural { reading: LEMMA_READING.into() }))
}

// --- algebraic -------------------------------------------------------------

fn algebraic(m: &FormMatrix, j: usize) -> Result<Option<Outcome>> {
    match m.nvars() {
        2 => algebraic_binary(m, j),
        3 => {
            if let Some(o) = constant_lambda_test(m, j) {
                return Ok(Some(o));
            }
            algebraic_lines(m, j)
        }
        _ => Ok(None),
    }
}

fn sample_points(field: Field, n: usize) -> Vec<Vec<Scalar>> {
    let mut pts = Vec::new();
    for i in 0..n {
        let mut p = vec![field.zero(); n];
        p[i] = field.one();
        pts.push(p);
    }
    for a in 1..6 {
        let mut p = vec![field.one(); n];
        p[n - 1] = field.int(a);
        pts.push(p);
        let mut p = vec![field.int(a); n];
        p[0] = field.one();
        pts.push(p);
    }
    pts
}

fn linear_candidates(m: &FormMatrix) -> Vec<Form> {
    let mut out: Vec<Form> = (0..m.nvars()).map(|i| Form::var(m.field(), m.nvars(), i)).collect();
    for row in m.entries() {
        for e in row {
            if e.degree() == 1 && !e.is_zero() && !out.iter().any(|h| h.is_proportional(e)) {
                out.push(e.clone());
            }
        }
    }
    out
}

fn algebraic_binary(m: &FormMatrix, j: usize) -> Result<Option<Outcome>> {
    if m.rows() + 1 != m.cols() {
        return Ok(None);
    }
    let minors = m.maximal_minors()?;
    let field = m.field();
    if binary::gcd_all(field, minors.iter()).degree() > 0 {
        return Ok(None);
    }
    let a = m.col_degrees();
    let adm = admissible(m, j);
    let lower: Vec<&Form> = (0..m.cols()).filter(|&i| a[i] < a[j]).map(|i| &minors[i]).collect();
    let fj = &minors[j];
    let by = "pointwise span test";
    if lower.is_empty() {
        let p = sample_points(field, 2).into_iter().find(|p| !fj.eval(p).is_zero());
        return Ok(p.and_then(|p| counter_at_point(m, j, &adm, &p, by)));
    }
    let g = binary::gcd_all(field, lower.iter().copied());
    let rest = binary::strip_common_roots(&g, fj);
    if rest.degree() == 0 {
        let method = "every common root of the lower-degree generators is a root of this generator".into();
        return Ok(Some(Outcome::Certified(Certificate::Algebraic { method })));
    }
    let cands = linear_candidates(m);
    match binary::find_root(&rest, &cands) {
        Some(p) => Ok(counter_at_point(m, j, &adm, &p, by)),
        None => Ok(Some(Outcome::NoRational(format!(
            "roots of {rest} are common zeros of the lower generators where this generator does not vanish"
        )))),
    }
}

/// Equal-degree admissible columns only, linear entries, exactly `n` rows
/// involved: s.i. iff the determinant of the replaced column's coefficient
/// matrix is a nonzero constant in the λ's.
fn constant_lambda_test(m: &FormMatrix, j: usize) -> Option<Outcome> {
    let adm = admissible(m, j);
    if adm.iter().any(|&(_, d)| d != 0) {
        return None;
    }
    let n = m.nvars();
    let mut cols: Vec<usize> = adm.iter().map(|&(i, _)| i).collect();
    cols.push(j);
    let rows: Vec<usize> = (0..m.rows()).filter(|&r| cols.iter().any(|&c| !m.entry(r, c).is_zero())).collect();
    if rows.len() != n {
        return None;
    }
    if rows.iter().any(|&r| cols.iter().any(|&c| !m.entry(r, c).is_zero() && m.entry(r, c).degree() != 1)) {
        return None;
    }
    let field = m.field();
    if field.size().is_some_and(|q| q <= n as u64) {
        return None;
    }
    let coeff = |c: usize| -> Vec<Vec<Scalar>> { rows.iter().map(|&r| m.entry(r, c).linear_coeffs()).collect() };
    let cj = coeff(j);
    let others: Vec<Vec<Vec<Scalar>>> = adm.iter().map(|&(i, _)| coeff(i)).collect();
    let det_at = |lam: &[Scalar]| -> Scalar {
        let mut a = cj.clone();
        for (l, o) in lam.iter().zip(&others) {
            for (ra, ro) in a.iter_mut().zip(o) {
                for (x, y) in ra.iter_mut().zip(ro) {
                    *x = &*x + &(l * y);
                }
            }
        }
        det_scalar(field, a)
    };
    // The determinant has degree at most n in each λ, so it is constant iff
    // it is constant on the grid {0..n}^k.
    let k = adm.len();
    let grid: Vec<Scalar> = (0..=n as i64).map(|v| field.int(v)).collect();
    let base = det_at(&vec![field.zero(); k]);
    let mut idx = vec![0usize; k];
    let mut constant = !base.is_zero();
    loop {
        let lam: Vec<Scalar> = idx.iter().map(|&v| grid[v].clone()).collect();
        let d = det_at(&lam);
        if d != base {
            constant = false;
            break;
        }
        if !odometer(&mut idx, grid.len()) {
            break;
        }
    }
    if constant {
        let method = "replacement determinant is a nonzero constant in the multipliers".into();
        return Some(Outcome::Certified(Certificate::Algebraic { method }));
    }
    // Look for multipliers killing the determinant.
    let range: Vec<Scalar> = match field.elements() {
        Some(els) => els,
        None => (-4..=4).map(|v| field.int(v)).collect(),
    };
    let mut idx = vec![0usize; k];
    loop {
        let lam: Vec<Scalar> = idx.iter().map(|&v| range[v].clone()).collect();
        if det_at(&lam).is_zero() {
            let lambdas = adm
                .iter()
                .zip(&lam)
                .filter(|(_, l)| !l.is_zero())
                .map(|(&(i, _), l)| (i, Form::constant(field, n, l.clone())))
                .collect();
            return Some(Outcome::Counter { lambdas, point: None, found_by: "determinant root".into() });
        }
        if !odometer(&mut idx, range.len()) {
            break;
        }
    }
    Some(Outcome::NoRational("replacement determinant is a nonconstant polynomial in the multipliers".into()))
}

/// Advances a little-endian-last counter; `false` once it wraps.
fn odometer(idx: &mut [usize], base: usize) -> bool {
    for x in idx.iter_mut().rev() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

fn det_scalar(field: Field, mut a: Vec<Vec<Scalar>>) -> Scalar {
    let n = a.len();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return field.zero() };
        if p != c {
            a.swap(p, c);
            det = -&det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv();
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] * &inv;
            for k in c..n {
                let v = &f * &a[c][k];
                a[r][k] = &a[r][k] - &v;
            }
        }
    }
    det
}

/// Splits `f` into linear factors drawn from `cands`.
fn split_into(f: &Form, cands: &[Form]) -> Option<Vec<Form>> {
    let mut rest = f.clone();
    let mut out = Vec::new();
    for h in cands {
        while rest.degree() > 0 {
            match rest.divide_exact(h) {
                Some(q) => {
                    if !out.iter().any(|l: &Form| l.is_proportional(h)) {
                        out.push(h.clone());
                    }
                    rest = q;
                }
                None => break,
            }
        }
    }
    (rest.degree() == 0).then_some(out)
}

/// Parametrisation of the line `ℓ = 0` in the plane.
struct Line {
    images: Vec<Form>,
    elim: usize,
    coeffs: Vec<Scalar>,
}

impl Line {
    fn new(l: &Form) -> Line {
        let field = l.field();
        let c = l.linear_coeffs();
        let elim = (0..3).rev().find(|&k| !c[k].is_zero()).unwrap();
        let inv = c[elim].inv();
        let mut images = Vec::new();
        let mut pos = 0;
        let mut sub = vec![field.zero(); 2];
        for k in 0..3 {
            if k != elim {
                sub[pos] = -&(&c[k] * &inv);
                pos += 1;
            }
        }
        pos = 0;
        for k in 0..3 {
            if k == elim {
                images.push(Form::linear(field, &sub));
            } else {
                images.push(Form::var(field, 2, pos));
                pos += 1;
            }
        }
        Line { images, elim, coeffs: c }
    }

    fn restrict(&self, f: &Form) -> Form {
        f.substitute_linear(&self.images).expect("linear images")
    }

    fn lift(&self, p: &[Scalar]) -> Vec<Scalar> {
        let field = p[0].field();
        let mut out = Vec::with_capacity(3);
        let mut pos = 0;
        let mut acc = field.zero();
        for k in 0..3 {
            if k == self.elim {
                out.push(field.zero());
            } else {
                out.push(p[pos].clone());
                acc = &acc + &(&self.coeffs[k] * &p[pos]);
                pos += 1;
            }
        }
        out[self.elim] = -&(&acc * &self.coeffs[self.elim].inv());
        out
    }
}

/// All roots in `P^1(k)` of a binary form, or `None` if a factor without
/// rational roots remains.
fn all_roots(f: &Form, cands: &[Form]) -> Option<Vec<Vec<Scalar>>> {
    let mut rest = f.clone();
    let mut roots = Vec::new();
    while rest.degree() > 0 {
        let p = binary::find_root(&rest, cands)?;
        let h = binary::linear_through(f.field(), &p);
        while let Some(q) = rest.divide_exact(&h) {
            if rest.degree() == 0 {
                break;
            }
            rest = q;
        }
        roots.push(p);
    }
    Some(roots)
}

/// Three variables, when a lowest-degree generator splits into lines: the
/// relevant points all lie on those lines, where everything is binary.
fn algebraic_lines(m: &FormMatrix, j: usize) -> Result<Option<Outcome>> {
    if m.rows() + 1 != m.cols() {
        return Ok(None);
    }
    let field = m.field();
    let minors = m.maximal_minors()?;
    let a = m.col_degrees();
    let adm = admissible(m, j);
    let alpha = *a.iter().min().unwrap();
    let by = "pointwise span test on the lines of the lowest generator";
    if a[j] == alpha {
        let p = sample_points(field, 3).into_iter().find(|p| !minors[j].eval(p).is_zero());
        return Ok(p.and_then(|p| counter_at_point(m, j, &adm, &p, by)));
    }
    let phi_idx = (0..m.cols()).find(|&i| a[i] == alpha && !minors[i].is_zero()).unwrap();
    let cands = linear_candidates(m);
    let Some(lines) = split_into(&minors[phi_idx], &cands) else { return Ok(None) };
    let lower: Vec<usize> = (0..m.cols()).filter(|&i| a[i] < a[j]).collect();
    let mut undecided = None;
    for l in &lines {
        let line = Line::new(l);
        let rcands: Vec<Form> = cands.iter().map(|c| line.restrict(c)).filter(|c| c.degree() == 1 && !c.is_zero()).collect();
        let fj = line.restrict(&minors[j]);
        // points off V(I): lower generators vanish, F_j does not
        let g = binary::gcd_all(field, lower.iter().map(|&i| line.restrict(&minors[i])).collect::<Vec<_>>().iter());
        if g.is_zero() {
            if !fj.is_zero() {
                let p = sample_points(field, 2).into_iter().find(|p| !fj.eval(p).is_zero()).unwrap();
                if let Some(o) = counter_at_point(m, j, &adm, &line.lift(&p), by) {
                    return Ok(Some(o));
                }
            }
        } else {
            let rest = binary::strip_common_roots(&g, &fj);
            if rest.degree() > 0 {
                match binary::find_root(&rest, &rcands) {
                    Some(p) => {
                        if let Some(o) = counter_at_point(m, j, &adm, &line.lift(&p), by) {
                            return Ok(Some(o));
                        }
                    }
                    None => undecided = Some(format!("irrational common zeros on the line {l}")),
                }
            }
        }
        // points of V(I) on this line
        let h = binary::gcd_all(field, minors.iter().map(|f| line.restrict(f)).collect::<Vec<_>>().iter());
        if h.is_zero() {
            return Ok(None);
        }
        match all_roots(&h, &rcands) {
            Some(roots) => {
                for p in roots {
                    if let Some(o) = counter_at_point(m, j, &adm, &line.lift(&p), by) {
                        return Ok(Some(o));
                    }
                }
            }
            None => return Ok(None),
        }
    }
    if let Some(reason) = undecided {
        return Ok(Some(Outcome::NoRational(reason)));
    }
    let method = "no point of the lines of the lowest generator puts the column in the span of the admissible columns".into();
    Ok(Some(Outcome::Certified(Certificate::Algebraic { method })))
}

// --- search ----------------------------------------------------------------

fn lambda_forms(m: &FormMatrix, adm: &[(usize, u32)], coeffs: &[Scalar]) -> Vec<(usize, Form)> {
    let mut out = Vec::new();
    let mut k = 0;
    for &(i, d) in adm {
        let basis = monomial_basis(m.nvars(), d);
        let terms: Vec<_> = basis.into_iter().zip(&coeffs[k..]).map(|(e, c)| (e, c.clone())).collect();
        k += terms.len();
        let f = Form::from_terms(m.field(), m.nvars(), d, terms).expect("homogeneous");
        if !f.is_zero() {
            out.push((i, f));
        }
    }
    out
}

fn reduce_matrix(m: &FormMatrix, field: Field) -> Result<FormMatrix> {
    let entries = m
        .entries()
        .iter()
        .map(|r| r.iter().map(|f| f.to_field(field)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    FormMatrix::with_degrees(field, m.nvars(), entries, m.row_degrees().to_vec(), m.col_degrees().to_vec())
}

fn exhaustive(m: &FormMatrix, j: usize, opts: &SiOptions) -> Result<Outcome> {
    let count = coefficient_count(m, j);
    if count > opts.budget {
        return Err(Error::Budget { needed: count, budget: opts.budget });
    }
    let pf = match m.field() {
        Field::Prime(p) => Field::Prime(p),
        Field::Rational => Field::prime(opts.prime)?,
    };
    let reduced = reduce_matrix(m, pf)?;
    if !is_primary(&reduced.column(j)) {
        return Err(Error::Input(format!("column {j} is not inessential after reduction mod {pf}")));
    }
    let adm = admissible(m, j);
    let q = pf.size().unwrap() as usize;
    let els = pf.elements().unwrap();
    let mut idx = vec![0usize; count];
    let mut tried: u64 = 0;
    loop {
        tried += 1;
        let coeffs: Vec<Scalar> = idx.iter().map(|&v| els[v].clone()).collect();
        let lam = lambda_forms(&reduced, &adm, &coeffs);
        if !is_primary(&replacement(&reduced, j, &lam)?) {
            // transport back to the session field and re-check there
            let lifted: Vec<(usize, Form)> =
                lam.iter().map(|(i, f)| Ok((*i, f.to_field(m.field())?))).collect::<Result<_>>()?;
            if !is_primary(&replacement(m, j, &lifted)?) {
                return Ok(Outcome::Counter { lambdas: lifted, point: None, found_by: format!("exhaustive search over {pf}") });
            }
        }
        if !odometer(&mut idx, q) {
            break;
        }
    }
    let caveat = format!("replacements with coefficients in {pf} only");
    Ok(Outcome::Certified(Certificate::Exhaustive { prime: q as u64, coefficients: count, replacements: tried, caveat }))
}

fn montecarlo(m: &FormMatrix, j: usize, opts: &SiOptions) -> Result<Option<Outcome>> {
    let count = coefficient_count(m, j);
    let adm = admissible(m, j);
    let field = m.field();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (j as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for _ in 0..opts.trials {
        let coeffs: Vec<Scalar> = (0..count)
            .map(|_| match field {
                Field::Prime(p) => field.int(rng.gen_range(0..p as i64)),
                Field::Rational => field.int(rng.gen_range(-10..=10)),
            })
            .collect();
        let lam = lambda_forms(m, &adm, &coeffs);
        if !is_primary(&replacement(m, j, &lam)?) {
            return Ok(Some(Outcome::Counter { lambdas: lam, point: None, found_by: "random search".into() }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdicts: Vec<Verdict>,
    pub essential: usize,
    pub strongly_inessential: usize,
    pub inessential_not_si: usize,
    pub unknown: usize,
    /// `None` when some verdict is unknown.
    pub e_maximal: Option<bool>,
}

impl Classification {
    pub fn si_columns(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|v| v.is_si()).map(|v| v.col).collect()
    }

    pub fn essential_columns(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|v| v.kind == Kind::Essential).map(|v| v.col).collect()
    }

    pub fn not_si_columns(&self) -> Vec<usize> {
        self.verdicts.iter().filter(|v| v.is_not_si()).map(|v| v.col).collect()
    }
}

pub fn classify_all(m: &FormMatrix, opts: &SiOptions) -> Result<Classification> {
    let mut verdicts = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let v = classify_column(m, j)?;
        verdicts.push(if v.kind == Kind::Inessential { strongly_inessential(m, j, opts)? } else { v });
    }
    let count = |k: Kind| verdicts.iter().filter(|v| v.kind == k).count();
    let (essential, si, not_si, unknown) =
        (count(Kind::Essential), count(Kind::StronglyInessential), count(Kind::Inessential), count(Kind::Unknown));
    let e_maximal = if not_si > 0 {
        Some(false)
    } else if unknown > 0 {
        None
    } else {
        Some(true)
    };
    Ok(Classification { verdicts, essential, strongly_inessential: si, inessential_not_si: not_si, unknown, e_maximal })
}
