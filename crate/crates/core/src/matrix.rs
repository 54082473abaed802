//! Matrices of forms with a degree matrix `d_ij = b_i - a_j`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::form::{Form, RawForm};
use crate::ideal::GradedIdeal;

#[derive(Clone, PartialEq)]
pub struct FormMatrix {
    field: Field,
    nvars: usize,
    entries: Vec<Vec<Form>>,
    /// `b_i`
    row_degrees: Vec<i64>,
    /// `a_j`, the degrees of the generators the columns stand for.
    col_degrees: Vec<i64>,
}

impl FormMatrix {
    /// Builds a matrix, inferring a degree matrix from the nonzero entries.
    /// The free offset is fixed so that `Σ b_i = Σ a_j` (the Hilbert–Burch
    /// normalisation); if that is impossible column degrees start at 0.
    pub fn new(field: Field, nvars: usize, entries: Vec<Vec<Form>>) -> Result<Self> {
        let (b, a) = infer_degrees(&entries)?;
        Self::with_degrees(field, nvars, entries, b, a)
    }

    pub fn with_degrees(
        field: Field,
        nvars: usize,
        entries: Vec<Vec<Form>>,
        row_degrees: Vec<i64>,
        col_degrees: Vec<i64>,
    ) -> Result<Self> {
        let rows = entries.len();
        let cols = col_degrees.len();
        if row_degrees.len() != rows {
            return Err(Error::Input("row degree vector has wrong length".into()));
        }
        if rows > 63 || cols > 63 {
            return Err(Error::Input("matrices are limited to 63 rows and columns".into()));
        }
        let mut entries = entries;
        for (i, row) in entries.iter_mut().enumerate() {
            if row.len() != cols {
                return Err(Error::Input(format!("row {i} has {} entries, expected {cols}", row.len())));
            }
            for (j, f) in row.iter_mut().enumerate() {
                if f.nvars() != nvars || f.field() != field {
                    return Err(Error::Input(format!("entry ({i},{j}) lives in another ring")));
                }
                let d = row_degrees[i] - col_degrees[j];
                if f.is_zero() {
                    *f = Form::zero(field, nvars, d.max(0) as u32);
                } else if f.degree() as i64 != d {
                    return Err(Error::Degree(format!(
                        "entry ({i},{j}) = {f} has degree {}, but b_i - a_j = {d}",
                        f.degree()
                    )));
                }
            }
        }
        Ok(FormMatrix { field, nvars, entries, row_degrees, col_degrees })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.col_degrees.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Form {
        &self.entries[i][j]
    }

    pub fn entries(&self) -> &[Vec<Form>] {
        &self.entries
    }

    pub fn row_degrees(&self) -> &[i64] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[i64] {
        &self.col_degrees
    }

    /// `d_ij = b_i - a_j`.
    pub fn degree_matrix(&self) -> Vec<Vec<i64>> {
        self.row_degrees.iter().map(|b| self.col_degrees.iter().map(|a| b - a).collect()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Form> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    /// Replaces column `j`; entries must have degrees `b_i - a_j`.
    pub fn with_column(&self, j: usize, col: Vec<Form>) -> Result<FormMatrix> {
        let mut entries = self.entries.clone();
        for (row, f) in entries.iter_mut().zip(col) {
            row[j] = f;
        }
        Self::with_degrees(self.field, self.nvars, entries, self.row_degrees.clone(), self.col_degrees.clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<FormMatrix> {
        let entries = rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect();
        Self::with_degrees(
            self.field,
            self.nvars,
            entries,
            rows.iter().map(|&i| self.row_degrees[i]).collect(),
            cols.iter().map(|&j| self.col_degrees[j]).collect(),
        )
    }

    /// Applies a linear substitution to every entry (see
    /// [`Form::substitute_linear`]).
    pub fn substitute_linear(&self, images: &[Form]) -> Result<FormMatrix> {
        let n = images.first().map_or(self.nvars, Form::nvars);
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|f| f.substitute_linear(images)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::with_degrees(self.field, n, entries, self.row_degrees.clone(), self.col_degrees.clone())
    }

    /// Same matrix read in the first `n` variables.
    pub fn restrict_vars(&self, n: usize) -> Result<FormMatrix> {
        let entries = self
            .entries
            .iter()
            .map(|r| r.iter().map(|f| f.restrict_vars(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::with_degrees(self.field, n, entries, self.row_degrees.clone(), self.col_degrees.clone())
    }

    /// Determinant of the square submatrix on `rows` x `cols`.
    pub fn det(&self, rows: &[usize], cols: &[usize]) -> Form {
        assert_eq!(rows.len(), cols.len(), "determinant of a non-square block");
        let rm = rows.iter().fold(0u64, |m, &i| m | 1 << i);
        let cm = cols.iter().fold(0u64, |m, &j| m | 1 << j);
        let mut memo = HashMap::new();
        self.det_masked(rm, cm, &mut memo)
    }

    fn block_degree(&self, rm: u64, cm: u64) -> u32 {
        let b: i64 = bits(rm).map(|i| self.row_degrees[i]).sum();
        let a: i64 = bits(cm).map(|j| self.col_degrees[j]).sum();
        (b - a).max(0) as u32
    }

    fn det_masked(&self, rm: u64, cm: u64, memo: &mut HashMap<(u64, u64), Form>) -> Form {
        if rm == 0 {
            return Form::one(self.field, self.nvars);
        }
        if let Some(f) = memo.get(&(rm, cm)) {
            return f.clone();
        }
        let zero = Form::zero(self.field, self.nvars, self.block_degree(rm, cm));
        // Expand along the sparsest line.
        let mut best: Option<(bool, usize, usize)> = None;
        for i in bits(rm) {
            let nz = bits(cm).filter(|&j| !self.entries[i][j].is_zero()).count();
            if best.is_none_or(|(_, _, c)| nz < c) {
                best = Some((true, i, nz));
            }
        }
        for j in bits(cm) {
            let nz = bits(rm).filter(|&i| !self.entries[i][j].is_zero()).count();
            if best.is_none_or(|(_, _, c)| nz < c) {
                best = Some((false, j, nz));
            }
        }
        let (is_row, line, nz) = best.unwrap();
        let mut acc = zero.clone();
        if nz > 0 {
            let pos = |mask: u64, k: usize| (mask & ((1u64 << k) - 1)).count_ones() as usize;
            let others: Vec<usize> = if is_row { bits(cm).collect() } else { bits(rm).collect() };
            for k in others {
                let (i, j) = if is_row { (line, k) } else { (k, line) };
                let e = &self.entries[i][j];
                if e.is_zero() {
                    continue;
                }
                let minor = self.det_masked(rm & !(1 << i), cm & !(1 << j), memo);
                if minor.is_zero() {
                    continue;
                }
                let mut term = e.mul(&minor);
                if (pos(rm, i) + pos(cm, j)) % 2 == 1 {
                    term = term.neg();
                }
                acc = acc.add(&term).expect("degree-compatible block");
            }
        }
        if acc.is_zero() {
            acc = zero;
        }
        memo.insert((rm, cm), acc.clone());
        acc
    }

    /// Signed maximal minors of a `(c-1) x c` matrix: `(-1)^j` times the
    /// determinant with column `j` deleted.
    pub fn maximal_minors(&self) -> Result<Vec<Form>> {
        if self.rows() + 1 != self.cols() {
            return Err(Error::Input(format!(
                "maximal minors need a (c-1) x c matrix, got {} x {}",
                self.rows(),
                self.cols()
            )));
        }
        let rm = (1u64 << self.rows()) - 1;
        let all = (1u64 << self.cols()) - 1;
        let mut memo = HashMap::new();
        Ok((0..self.cols())
            .map(|j| {
                let d = self.det_masked(rm, all & !(1 << j), &mut memo);
                if j % 2 == 1 {
                    d.neg()
                } else {
                    d
                }
            })
            .collect())
    }

    /// `M · gens = 0`.
    pub fn verify_syzygies(&self, gens: &[Form]) -> Result<bool> {
        if gens.len() != self.cols() {
            return Err(Error::Input(format!("{} generators for {} columns", gens.len(), self.cols())));
        }
        for (j, g) in gens.iter().enumerate() {
            if !g.is_zero() && g.degree() as i64 != self.col_degrees[j] {
                return Err(Error::Degree(format!(
                    "generator {j} has degree {}, column degree is {}",
                    g.degree(),
                    self.col_degrees[j]
                )));
            }
        }
        for (i, row) in self.entries.iter().enumerate() {
            let mut acc = Form::zero(self.field, self.nvars, self.row_degrees[i].max(0) as u32);
            for (e, g) in row.iter().zip(gens) {
                acc = acc.add(&e.mul(g))?;
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The ideal of maximal minors.
    pub fn minors_ideal(&self) -> Result<GradedIdeal> {
        GradedIdeal::new(self.field, self.nvars, self.maximal_minors()?)
    }

    /// `e = (Σ b_i² - Σ a_j²) / 2`, read off the graded resolution.
    pub fn multiplicity_from_degrees(&self) -> Result<u64> {
        let b: i64 = self.row_degrees.iter().map(|b| b * b).sum();
        let a: i64 = self.col_degrees.iter().map(|a| a * a).sum();
        let sb: i64 = self.row_degrees.iter().sum();
        let sa: i64 = self.col_degrees.iter().sum();
        if sb != sa || (b - a) % 2 != 0 || b - a <= 0 {
            return Err(Error::Degree(format!(
                "degree vectors b={:?}, a={:?} are not those of a height 2 resolution",
                self.row_degrees, self.col_degrees
            )));
        }
        Ok(((b - a) / 2) as u64)
    }

    /// The sufficient criteria for the existence of an all-essential basis
    /// that fire on this degree matrix.
    pub fn essentiality_by_degree_bound(&self) -> Result<DegreeCriteria> {
        let n = self.nvars as i64;
        let nu = self.cols() as i64;
        let mut a = self.col_degrees.clone();
        let mut b = self.row_degrees.clone();
        a.sort_unstable();
        b.sort_unstable();
        let alpha = a[0];
        let nu_alpha = a.iter().filter(|&&x| x == alpha).count() as i64;
        let e = self.multiplicity_from_degrees()? as i64;
        let mut fired = Vec::new();
        if nu < n + 1 {
            fired.push(Criterion::FewGenerators);
        }
        if alpha < n {
            fired.push(Criterion::LowAlpha);
        }
        if 2 * e < n * (n + 1) {
            fired.push(Criterion::LowMultiplicity);
        }
        // 1-based row ν - n, first column after the degree-α block.
        let h = nu - n;
        if h >= 1 && nu_alpha < nu && b[(h - 1) as usize] - a[nu_alpha as usize] <= 0 {
            fired.push(Criterion::DegreeMatrix);
        }
        if 2 * e < n * (n + 3) {
            fired.push(Criterion::MultiplicityBound);
        }
        Ok(DegreeCriteria { fires: !fired.is_empty(), fired, multiplicity: e as u64 })
    }

    pub fn to_raw(&self) -> RawMatrix {
        RawMatrix {
            vars: Some(self.nvars),
            entries: self.entries.iter().map(|r| r.iter().map(Form::to_raw).collect()).collect(),
            row_degrees: Some(self.row_degrees.clone()),
            col_degrees: Some(self.col_degrees.clone()),
        }
    }

    pub fn from_raw(field: Field, raw: &RawMatrix) -> Result<FormMatrix> {
        let nvars = raw.vars.unwrap_or(2);
        match (&raw.row_degrees, &raw.col_degrees) {
            (Some(b), Some(a)) => {
                let entries = raw
                    .entries
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.iter()
                            .enumerate()
                            .map(|(j, f)| {
                                let d = b.get(i).copied().unwrap_or(0) - a.get(j).copied().unwrap_or(0);
                                let f = f.to_form(field, nvars, None)?;
                                if f.is_zero() || d < 0 {
                                    Ok(Form::zero(field, nvars, d.max(0) as u32))
                                } else {
                                    Ok(f)
                                }
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                FormMatrix::with_degrees(field, nvars, entries, b.clone(), a.clone())
            }
            (None, None) => {
                let entries = raw
                    .entries
                    .iter()
                    .map(|r| r.iter().map(|f| f.to_form(field, nvars, None)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                FormMatrix::new(field, nvars, entries)
            }
            _ => Err(Error::Input("give both row_degrees and col_degrees or neither".into())),
        }
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |k| mask >> k & 1 == 1)
}

/// Solves `b_i - a_j = deg m_ij` over the nonzero entries.
fn infer_degrees(entries: &[Vec<Form>]) -> Result<(Vec<i64>, Vec<i64>)> {
    let rows = entries.len();
    let cols = entries.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(Error::Input("empty matrix".into()));
    }
    if let Some(i) = entries.iter().position(|r| r.len() != cols) {
        return Err(Error::Input(format!("row {i} has {} entries, expected {cols}", entries[i].len())));
    }
    let mut b: Vec<Option<i64>> = vec![None; rows];
    let mut a: Vec<Option<i64>> = vec![None; cols];
    let mut components = 0;
    loop {
        // seed a new component at the first unassigned column
        let Some(seed) = a.iter().position(Option::is_none) else { break };
        components += 1;
        a[seed] = Some(0);
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..rows {
                for j in 0..cols {
                    let f = &entries[i][j];
                    if f.is_zero() {
                        continue;
                    }
                    let d = f.degree() as i64;
                    match (b[i], a[j]) {
                        (Some(bi), Some(aj)) if bi - aj != d => {
                            return Err(Error::Degree(format!(
                                "entry ({i},{j}) = {f} breaks degree compatibility"
                            )));
                        }
                        (None, Some(aj)) => {
                            b[i] = Some(aj + d);
                            changed = true;
                        }
                        (Some(bi), None) => {
                            a[j] = Some(bi - d);
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    if b.iter().any(Option::is_none) {
        return Err(Error::Degree("a row of zeros has no degree; give degrees explicitly".into()));
    }
    let mut b: Vec<i64> = b.into_iter().map(Option::unwrap).collect();
    let mut a: Vec<i64> = a.into_iter().map(Option::unwrap).collect();
    if components == 1 && cols == rows + 1 {
        let c = b.iter().sum::<i64>() - a.iter().sum::<i64>();
        a.iter_mut().for_each(|x| *x += c);
        b.iter_mut().for_each(|x| *x += c);
    }
    let shift = a.iter().chain(&b).min().copied().unwrap_or(0).min(0);
    if shift < 0 {
        a.iter_mut().for_each(|x| *x -= shift);
        b.iter_mut().for_each(|x| *x -= shift);
    }
    Ok((b, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `ν(I) < n + 1`
    FewGenerators,
    /// `α(I) < n`
    LowAlpha,
    /// `e(I) < n(n+1)/2`
    LowMultiplicity,
    /// `d_{ν-n, ν(α)+1} ≤ 0`
    DegreeMatrix,
    /// `e(I) < n(n+3)/2`
    MultiplicityBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeCriteria {
    pub fires: bool,
    pub fired: Vec<Criterion>,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMatrix {
    #[serde(default)]
    pub vars: Option<usize>,
    pub entries: Vec<Vec<RawForm>>,
    #[serde(default)]
    pub row_degrees: Option<Vec<i64>>,
    #[serde(default)]
    pub col_degrees: Option<Vec<i64>>,
}

impl fmt::Display for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|e| if e.is_zero() { ".".into() } else { e.to_string() }).collect())
            .collect();
        let widths: Vec<usize> =
            (0..self.cols()).map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(1)).collect();
        for (i, row) in cells.iter().enumerate() {
            let line: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            write!(f, "[ {} ]", line.join("  "))?;
            if i + 1 < cells.len() {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FormMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FormMatrix b={:?} a={:?}", self.row_degrees, self.col_degrees)?;
        fmt::Display::fmt(self, f)
    }
}
