//! Three-variable liftings of binary Hilbert–Burch matrices and the class of
//! ideals with exactly three essential generators.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dubreil2::split;
use crate::error::{Error, Result};
use crate::essentiality::{classify_all, is_primary, Classification, Kind, SiOptions};
use crate::field::{Field, Scalar};
use crate::form::{Form, RawForm};
use crate::linalg::Echelon;
use crate::matrix::FormMatrix;

fn x(field: Field, n: usize) -> Form {
    Form::var(field, n, 0)
}

fn y(field: Field, n: usize) -> Form {
    Form::var(field, n, 1)
}

fn z(field: Field) -> Form {
    Form::var(field, 3, 2)
}

fn zero(field: Field, n: usize) -> Form {
    Form::zero(field, n, 0)
}

/// Column degrees of the bidiagonal matrix with diagonal `Y^{t_i}`.
fn bidiagonal_degrees(ts: &[u32]) -> (Vec<i64>, Vec<i64>) {
    let mut a = vec![ts.len() as i64];
    for &t in ts {
        a.push(a.last().unwrap() + t as i64 - 1);
    }
    let b = (0..ts.len()).map(|i| a[i] + ts[i] as i64).collect();
    (b, a)
}

fn check_ts(ts: &[u32]) -> Result<()> {
    if ts.len() < 2 {
        return Err(Error::Input("a lifting needs at least two rows".into()));
    }
    if ts.contains(&0) {
        return Err(Error::Input("the exponents t_i must be positive".into()));
    }
    Ok(())
}

/// The binary matrix with `Y^{t_i}` on the diagonal and `-X` above it.
pub fn base_matrix(field: Field, ts: &[u32]) -> Result<FormMatrix> {
    check_ts(ts)?;
    let d = ts.len();
    let mut entries = vec![vec![zero(field, 2); d + 1]; d];
    for (i, &t) in ts.iter().enumerate() {
        entries[i][i] = y(field, 2).pow(t);
        entries[i][i + 1] = x(field, 2).neg();
    }
    let (b, a) = bidiagonal_degrees(ts);
    FormMatrix::with_degrees(field, 2, entries, b, a)
}

/// Degrees of the forms `P_1, ..., P_{δ-1}` of a general lifting.
pub fn lift_degrees(ts: &[u32]) -> Vec<u32> {
    (1..ts.len()).map(|i| ts[..=i].iter().sum::<u32>() - i as u32 - 1).collect()
}

/// Lifting with `Z P_i` in the first column and `Z^{t_{i-1}+t_i-1}` below the
/// diagonal, from the third row on.  `ps = None` takes every `P_i = 0`.
pub fn lift_general(field: Field, ts: &[u32], ps: Option<&[Form]>) -> Result<FormMatrix> {
    check_ts(ts)?;
    let d = ts.len();
    let degs = lift_degrees(ts);
    let ps: Vec<Form> = match ps {
        None => degs.iter().map(|&k| Form::zero(field, 3, k)).collect(),
        Some(ps) => {
            if ps.len() != d - 1 {
                return Err(Error::Input(format!("expected {} forms P_i, got {}", d - 1, ps.len())));
            }
            for (i, (p, &k)) in ps.iter().zip(&degs).enumerate() {
                if p.nvars() != 3 || p.field() != field {
                    return Err(Error::Input(format!("P_{} must be a form in three variables", i + 1)));
                }
                if !p.is_zero() && p.degree() != k {
                    return Err(Error::Degree(format!("P_{} has degree {}, expected {k}", i + 1, p.degree())));
                }
            }
            ps.to_vec()
        }
    };
    let base = base_matrix(field, ts)?;
    let mut entries: Vec<Vec<Form>> =
        base.entries().iter().map(|r| r.iter().map(|f| f.extend_vars(3)).collect()).collect();
    for i in 1..d {
        entries[i][0] = z(field).mul(&ps[i - 1]);
    }
    for i in 2..d {
        entries[i][i - 1] = z(field).pow(ts[i - 1] + ts[i] - 1);
    }
    FormMatrix::with_degrees(field, 3, entries, base.row_degrees().to_vec(), base.col_degrees().to_vec())
}

/// Embeds a binary matrix into three variables without adding `Z` terms.
pub fn lift_trivially(m: &FormMatrix) -> Result<FormMatrix> {
    if m.nvars() != 2 {
        return Err(Error::Input("expected a matrix over K[X,Y]".into()));
    }
    let entries = m.entries().iter().map(|r| r.iter().map(|f| f.extend_vars(3)).collect()).collect();
    FormMatrix::with_degrees(m.field(), 3, entries, m.row_degrees().to_vec(), m.col_degrees().to_vec())
}

// ---------------------------------------------------------------------------
// alpha = 3, generators in two degrees

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    I11,
    I12,
    I2,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i11" => Ok(FamilyKind::I11),
            "i12" => Ok(FamilyKind::I12),
            "i2" => Ok(FamilyKind::I2),
            _ => Err(Error::Input(format!("unknown family {s:?} (expected I11, I12 or I2)"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::I11 => "I11",
            FamilyKind::I12 => "I12",
            FamilyKind::I2 => "I2",
        };
        f.write_str(s)
    }
}

fn check_t(t: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::Input(format!("t = {t}: the top degree t+2 must exceed 3")));
    }
    Ok(())
}

fn alpha3_degrees(t: u32) -> (Vec<i64>, Vec<i64>) {
    let t = t as i64;
    (vec![t + 3; 3], vec![3, t + 2, t + 2, t + 2])
}

/// The binary ideal a family lifts: `X^3 S + S_{t+2} S` for `I11`, `I12`
/// and `X^2 Y S + S_{t+2} S` for `I2`.
pub fn family_base(field: Field, kind: FamilyKind, t: u32) -> Result<FormMatrix> {
    check_t(t)?;
    let (xx, yy, o) = (x(field, 2), y(field, 2), zero(field, 2));
    let entries = match kind {
        FamilyKind::I11 | FamilyKind::I12 => vec![
            vec![yy.pow(t), xx.neg(), o.clone(), o.clone()],
            vec![o.clone(), yy.clone(), xx.neg(), o.clone()],
            vec![o.clone(), o.clone(), yy.clone(), xx.neg()],
        ],
        FamilyKind::I2 => {
            let s = xx.add(&yy)?;
            vec![
                vec![s.pow(t), xx.neg(), o.clone(), o.clone()],
                vec![o.clone(), s, xx.neg(), o.clone()],
                vec![o.clone(), o.clone(), xx.clone(), yy.neg()],
            ]
        }
    };
    let (b, a) = alpha3_degrees(t);
    FormMatrix::with_degrees(field, 2, entries, b, a)
}

fn check_qs(field: Field, qs: &[Form], t: u32) -> Result<()> {
    if qs.len() != 3 {
        return Err(Error::Input(format!("expected three forms, got {}", qs.len())));
    }
    for (i, q) in qs.iter().enumerate() {
        if q.nvars() != 3 || q.field() != field {
            return Err(Error::Input(format!("Q_{} must be a form in three variables", i + 1)));
        }
        if !q.is_zero() && q.degree() != t - 1 {
            return Err(Error::Degree(format!("Q_{} has degree {}, expected {}", i + 1, q.degree(), t - 1)));
        }
    }
    Ok(())
}

/// The three liftings with `α = 3`, one s.i. generator and generators in
/// degrees `3` and `t+2`.
pub fn family_alpha3(field: Field, kind: FamilyKind, t: u32, qs: &[Form]) -> Result<FormMatrix> {
    check_t(t)?;
    check_qs(field, qs, t)?;
    let base = family_base(field, kind, t)?;
    let mut entries: Vec<Vec<Form>> =
        base.entries().iter().map(|r| r.iter().map(|f| f.extend_vars(3)).collect()).collect();
    let zz = z(field);
    for i in 0..3 {
        entries[i][0] = entries[i][0].add(&zz.mul(&qs[i]))?;
    }
    match kind {
        FamilyKind::I11 | FamilyKind::I2 => entries[2][1] = zz,
        FamilyKind::I12 => {
            entries[0][2] = zz.clone();
            entries[1][3] = zz.neg();
        }
    }
    let (b, a) = alpha3_degrees(t);
    FormMatrix::with_degrees(field, 3, entries, b, a)
}

/// The general lifting of `X^3 S + S_{t+2} S`: `Z P_i` added to the first
/// column and `a_ij Z` added to the linear part.
pub fn general_alpha3(field: Field, t: u32, ps: &[Form], a: &[[Scalar; 3]; 3]) -> Result<FormMatrix> {
    check_t(t)?;
    check_qs(field, ps, t)?;
    let base = family_base(field, FamilyKind::I11, t)?;
    let zz = z(field);
    let mut entries: Vec<Vec<Form>> =
        base.entries().iter().map(|r| r.iter().map(|f| f.extend_vars(3)).collect()).collect();
    for i in 0..3 {
        entries[i][0] = entries[i][0].add(&zz.mul(&ps[i]))?;
        for j in 0..3 {
            let c = Form::constant(field, 3, a[i][j].clone());
            entries[i][j + 1] = entries[i][j + 1].add(&zz.mul(&c))?;
        }
    }
    let (b, deg) = alpha3_degrees(t);
    FormMatrix::with_degrees(field, 3, entries, b, deg)
}

/// Strong inessentiality of the second and third columns of
/// [`general_alpha3`] for a constant matrix over `F_p`.
///
/// Both columns are linear and every admissible coefficient is a constant,
/// so a column is s.i. iff the determinant of the coefficient matrix of
/// `C_j + λ C_k + μ C_l` is a nonzero constant in `(λ, μ)`.  The
/// determinant has total degree at most 3 and is sampled on the
/// unisolvent set `{(i, j) : i + j ≤ 3}`.
pub fn alpha3_gate(p: u64, a: &[[u64; 3]; 3]) -> [bool; 2] {
    assert!(p >= 5, "the sampling set needs four distinct values");
    let m = |v: i64| v.rem_euclid(p as i64) as u64;
    // coefficient vectors (X, Y, Z) of the three linear columns, per row
    let mut cols = [[[0u64; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            cols[j][i][2] = a[i][j] % p;
        }
        cols[i][i][0] = m(-1);
        if i + 1 < 3 {
            cols[i][i + 1][1] = 1;
        }
    }
    let det = |k: &[[u64; 3]; 3]| {
        let t = |i: usize, j: usize, l: usize| k[0][i] * ((k[1][j] * k[2][l]) % p) % p;
        (t(0, 1, 2) + t(1, 2, 0) + t(2, 0, 1) + 3 * p * p - t(0, 2, 1) - t(1, 0, 2) - t(2, 1, 0)) % p
    };
    let mut out = [false; 2];
    for (slot, j) in [1usize, 2].into_iter().enumerate() {
        let others: Vec<usize> = (0..3).filter(|&k| k != j - 1).collect();
        let mut first = None;
        let mut constant = true;
        'grid: for l in 0..4u64 {
            for mu in 0..4 - l {
                let mut k = [[0u64; 3]; 3];
                for r in 0..3 {
                    for c in 0..3 {
                        k[r][c] =
                            (cols[j - 1][r][c] + l * cols[others[0]][r][c] + mu * cols[others[1]][r][c]) % p;
                    }
                }
                let v = det(&k);
                match first {
                    None => first = Some(v),
                    Some(f) if f != v => {
                        constant = false;
                        break 'grid;
                    }
                    _ => {}
                }
            }
        }
        out[slot] = constant && first != Some(0);
    }
    out
}

// ---------------------------------------------------------------------------
// reduction modulo a linear form

/// Whether `l` is a nonzerodivisor on `S/I`: the ideal `I + (l)` must be
/// primary to the irrelevant ideal.  Exact because `S/I` is
/// Cohen–Macaulay of dimension one.
pub fn is_regular(m: &FormMatrix, l: &Form) -> Result<bool> {
    let mut gens = m.maximal_minors()?;
    gens.push(l.clone());
    Ok(is_primary(&gens))
}

/// Linear images of `X, Y, Z` in `K[X,Y]` for a coordinate change taking
/// `l` to `Z`, followed by `Z = 0`.
fn reduction_images(l: &Form) -> Result<Vec<Form>> {
    let field = l.field();
    let c = l.linear_coeffs();
    let k = (0..3).rev().find(|&k| !c[k].is_zero()).ok_or_else(|| Error::Input("zero linear form".into()))?;
    let keep: Vec<usize> = (0..3).filter(|&i| i != k).collect();
    let inv = c[k].inv();
    let mut images = vec![zero(field, 2); 3];
    for (slot, &i) in keep.iter().enumerate() {
        images[i] = Form::var(field, 2, slot);
    }
    let mut lin = vec![field.zero(); 2];
    for (slot, &i) in keep.iter().enumerate() {
        lin[slot] = -&(&c[i] * &inv);
    }
    images[k] = Form::linear(field, &lin);
    Ok(images)
}

/// Entry-wise image under `Z = 0`, without a regularity check.
pub fn set_z_zero(m: &FormMatrix) -> Result<FormMatrix> {
    if m.nvars() != 3 {
        return Err(Error::Precondition("expected a matrix over K[X,Y,Z]".into()));
    }
    let f = m.field();
    m.substitute_linear(&[x(f, 2), y(f, 2), zero(f, 2)])
}

/// Reduction of a three-variable matrix modulo a regular linear form.
pub fn quotient_mod_linear(m: &FormMatrix, l: &Form) -> Result<FormMatrix> {
    if m.nvars() != 3 {
        return Err(Error::Precondition("reduction needs a matrix over K[X,Y,Z]".into()));
    }
    if l.nvars() != 3 || l.degree() != 1 || l.is_zero() {
        return Err(Error::Input("expected a nonzero linear form in three variables".into()));
    }
    if !is_regular(m, l)? {
        return Err(Error::Precondition(format!("{l} is not regular for S/I")));
    }
    m.substitute_linear(&reduction_images(l)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub si_lift: Vec<usize>,
    pub si_image: Vec<usize>,
    /// s.i. columns of the lift that are not s.i. in the image.
    pub violations: Vec<usize>,
    pub undecided: Vec<usize>,
    pub monotone: bool,
}

/// Checks that s.i. columns stay s.i. after reduction.
pub fn check_quotient(m: &FormMatrix, image: &FormMatrix, opts: &SiOptions) -> Result<QuotientReport> {
    let lift = classify_all(m, opts)?;
    let low = classify_all(image, opts)?;
    let si_lift = lift.si_columns();
    let si_image = low.si_columns();
    let violations: Vec<usize> = si_lift.iter().copied().filter(|&j| low.verdicts[j].is_not_si()).collect();
    let undecided: Vec<usize> = (0..m.cols())
        .filter(|&j| lift.verdicts[j].kind == Kind::Unknown || low.verdicts[j].kind == Kind::Unknown)
        .collect();
    let monotone = violations.is_empty() && si_lift.iter().all(|j| si_image.contains(j));
    Ok(QuotientReport { si_lift, si_image, violations, undecided, monotone })
}

// ---------------------------------------------------------------------------
// the class of ideals with three essential generators

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub alpha: i64,
    pub generators: usize,
    pub essential: Vec<usize>,
    pub strongly_inessential: Vec<usize>,
    pub essential_degrees: Vec<i64>,
    pub member: bool,
    /// Degrees of the essential generators are `α`, `α_r` and `α_r` or
    /// `α_{r-1}`; `None` for non-members.
    pub degree_rule: Option<bool>,
    /// At most `α - 2` s.i. generators.
    pub si_bound: bool,
    pub classification: Classification,
}

/// Membership in the class of height-2 ideals of `K[X,Y,Z]` with exactly
/// three essential generators and `α > 2`.
pub fn check_s_membership(m: &FormMatrix, opts: &SiOptions) -> Result<MembershipReport> {
    if m.nvars() != 3 {
        return Err(Error::Input("membership is defined for matrices over K[X,Y,Z]".into()));
    }
    let cls = classify_all(m, opts)?;
    if cls.unknown > 0 {
        let cols: Vec<usize> = cls.verdicts.iter().filter(|v| v.kind == Kind::Unknown).map(|v| v.col).collect();
        return Err(Error::Inconclusive(format!("columns {cols:?} are undecided")));
    }
    let a = m.col_degrees();
    let alpha = *a.iter().min().unwrap();
    let essential = cls.essential_columns();
    let si = cls.si_columns();
    let mut essential_degrees: Vec<i64> = essential.iter().map(|&j| a[j]).collect();
    essential_degrees.sort_unstable();
    let member = alpha > 2 && essential.len() == 3;
    let degree_rule = member.then(|| {
        let mut levels: Vec<i64> = a.to_vec();
        levels.sort_unstable();
        levels.dedup();
        let top = *levels.last().unwrap();
        let on_top = a.iter().filter(|&&d| d == top).count();
        let third = if on_top >= 2 || levels.len() < 2 { top } else { levels[levels.len() - 2] };
        let mut want = vec![alpha, top, third];
        want.sort_unstable();
        want == essential_degrees
    });
    let si_bound = si.len() as i64 <= (alpha - 2).max(0);
    Ok(MembershipReport {
        alpha,
        generators: m.cols(),
        essential,
        strongly_inessential: si,
        essential_degrees,
        member,
        degree_rule,
        si_bound,
        classification: cls,
    })
}

/// Necessary condition for a conic-power `Φ`: every generator count above
/// the initial degree is a power of two.
pub fn conic_feasible(nu_by_degree: &BTreeMap<u32, usize>) -> bool {
    let alpha = nu_by_degree.keys().next().copied();
    nu_by_degree.iter().filter(|(d, _)| Some(**d) != alpha).all(|(_, &n)| n.is_power_of_two())
}

// ---------------------------------------------------------------------------
// the shape of Φ

/// Factorization hint for [`phi_shape`].
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeHint {
    Lines(Vec<(Form, u32)>),
    /// An irreducible quadric and its exponent.
    Conic(Form, u32),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum PhiShape {
    SingleLinePower { h: RawForm, delta: u32 },
    TwoLines { h: RawForm, r: u32, k: RawForm, s: u32 },
    ConicPower { c: RawForm, gamma: u32 },
    Other { reason: String },
}

/// Classifies `Φ` from a claimed factorization, verified by expansion.
pub fn phi_shape(phi: &Form, hint: &ShapeHint) -> Result<PhiShape> {
    let field = phi.field();
    let n = phi.nvars();
    let expand = |parts: &[(Form, u32)]| parts.iter().fold(Form::one(field, n), |acc, (f, e)| acc.mul(&f.pow(*e)));
    match hint {
        ShapeHint::Lines(parts) => {
            if parts.iter().any(|(f, _)| f.degree() != 1 || f.is_zero() || f.nvars() != n) {
                return Err(Error::Input("line hints must be nonzero linear forms".into()));
            }
            if !expand(parts).is_proportional(phi) {
                return Err(Error::Input("the hint does not expand to Φ".into()));
            }
            let mut lines: Vec<(Form, u32)> = Vec::new();
            for (f, e) in parts.iter().filter(|(_, e)| *e > 0) {
                match lines.iter_mut().find(|(g, _)| g.is_proportional(f)) {
                    Some(slot) => slot.1 += e,
                    None => lines.push((f.monic(), *e)),
                }
            }
            Ok(match lines.as_slice() {
                [(h, d)] => PhiShape::SingleLinePower { h: h.to_raw(), delta: *d },
                [(h, r), (k, s)] => PhiShape::TwoLines { h: h.to_raw(), r: *r, k: k.to_raw(), s: *s },
                _ => PhiShape::Other { reason: format!("{} distinct lines", lines.len()) },
            })
        }
        ShapeHint::Conic(c, gamma) => {
            if c.degree() != 2 || c.is_zero() || c.nvars() != n {
                return Err(Error::Input("the conic hint must be a quadric".into()));
            }
            if !expand(&[(c.clone(), *gamma)]).is_proportional(phi) {
                return Err(Error::Input("the hint does not expand to Φ".into()));
            }
            Ok(match quadric_rank(c)? {
                3 => PhiShape::ConicPower { c: c.monic().to_raw(), gamma: *gamma },
                r => PhiShape::Other { reason: format!("the quadric has rank {r} and splits into lines") },
            })
        }
    }
}

/// Rank of the symmetric matrix of a ternary quadric (odd characteristic).
fn quadric_rank(c: &Form) -> Result<usize> {
    let field = c.field();
    if field == Field::Prime(2) {
        return Err(Error::Input("quadric rank is not defined in characteristic 2".into()));
    }
    let n = c.nvars();
    let half = field.int(2).inv();
    let mut rows = vec![vec![field.zero(); n]; n];
    for (e, v) in c.terms() {
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, e[i] as usize)).collect();
        if idx[0] == idx[1] {
            rows[idx[0]][idx[0]] = v.clone();
        } else {
            rows[idx[0]][idx[1]] = v * &half;
            rows[idx[1]][idx[0]] = v * &half;
        }
    }
    let mut ech = Echelon::new(field, n);
    for r in &rows {
        ech.insert(r);
    }
    Ok(ech.rank())
}

// ---------------------------------------------------------------------------
// splitting inside the class

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub k: usize,
    /// Degree at which the matrix is split.
    pub p: u32,
    pub levels: Vec<i64>,
    /// `None` when no level admits a stable splitting (vacuous pass).
    pub second: Option<MembershipReport>,
    pub holds: bool,
}

/// Largest admissible level index for a stable splitting, or `None` when
/// no level qualifies.
pub fn stability_range(m: &FormMatrix) -> Option<usize> {
    let a = m.col_degrees();
    let mut levels: Vec<i64> = a.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let r = levels.len() - 1;
    if r == 0 {
        return None;
    }
    let on_top = a.iter().filter(|&&d| d == levels[r]).count();
    let bound = if on_top >= 2 { r } else { r.saturating_sub(1) };
    (bound > 1).then_some(bound - 1)
}

/// Splits a member of the class after the `k`-th degree level (levels
/// numbered from 0) and checks that the lower part is again a member.
pub fn check_split_stability(m: &FormMatrix, k: usize, opts: &SiOptions) -> Result<StabilityReport> {
    let mut levels: Vec<i64> = m.col_degrees().to_vec();
    levels.sort_unstable();
    levels.dedup();
    let whole = check_s_membership(m, opts)?;
    if !whole.member {
        return Err(Error::Precondition("the matrix is not in the class".into()));
    }
    match stability_range(m) {
        Some(hi) if (1..=hi).contains(&k) => {}
        Some(hi) => return Err(Error::Input(format!("k = {k} outside the admissible range 1..={hi}"))),
        None => return Ok(StabilityReport { k, p: 0, levels, second: None, holds: true }),
    }
    let p = (levels[k + 1] - 1) as u32;
    let pair = split(m, p)?;
    let second = check_s_membership(&pair.m_second, opts)?;
    let holds = second.member;
    Ok(StabilityReport { k, p, levels, second: Some(second), holds })
}
