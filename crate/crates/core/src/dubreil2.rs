//! Binary Dubreil ideals `I = Σ Φ_{i+1}…Φ_r S_{β_i} S`: construction from
//! factored data, canonical Hilbert–Burch matrices and their variants,
//! strongly inessential counts, prescribed profiles and splittings.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::essentiality::{classify_all, Classification, SiOptions};
use crate::field::Field;
use crate::form::{forms_rank, monomial_basis, Form, LinearFactorization, RawForm};
use crate::ideal::GradedIdeal;
use crate::matrix::FormMatrix;

/// Pairwise independent binary linear forms `X, Y, X+Y, X-Y, X+2Y, …`,
/// as many as the field allows (at most `k`).
pub fn default_forms(field: Field, k: usize) -> Vec<Form> {
    let mut out = vec![Form::linear_int(field, &[1, 0]), Form::linear_int(field, &[0, 1])];
    let limit = field.size().map_or(usize::MAX, |q| q as usize + 1);
    let mut c = 1i64;
    while out.len() < k.min(limit) {
        for s in [c, -c] {
            let f = Form::linear_int(field, &[1, s]);
            if out.len() < k && !f.linear_coeffs()[1].is_zero() && !out.iter().any(|g| g.is_proportional(&f)) {
                out.push(f);
            }
        }
        c += 1;
    }
    out.truncate(k);
    out
}

fn check_independent(forms: &[&Form]) -> Result<()> {
    for (i, f) in forms.iter().enumerate() {
        for g in &forms[..i] {
            if g.is_proportional(f) {
                return Err(Error::Input(format!("dependent linear forms {g} and {f}")));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DubreilDatum {
    field: Field,
    beta0: u32,
    gaps: Vec<u32>,
    phis: Vec<LinearFactorization>,
    u: Form,
    ls: Vec<Form>,
    /// Distinct linear factors across all `Φ_k`, first appearance first.
    hs: Vec<Form>,
}

impl DubreilDatum {
    pub fn new(
        field: Field,
        beta0: u32,
        gaps: Vec<u32>,
        phis: Vec<LinearFactorization>,
        u: Form,
        ls: Vec<Form>,
    ) -> Result<Self> {
        if gaps.len() != phis.len() {
            return Err(Error::Input(format!("{} gaps for {} factors", gaps.len(), phis.len())));
        }
        if gaps.contains(&0) {
            return Err(Error::Input("gaps must be positive".into()));
        }
        if phis.iter().any(|p| p.degree() == 0) {
            return Err(Error::Input("every Φ_k must have positive degree".into()));
        }
        if ls.len() != beta0 as usize + 1 {
            return Err(Error::Input(format!("need {} forms L_i, got {}", beta0 + 1, ls.len())));
        }
        let linear = |f: &Form| f.nvars() == 2 && f.degree() == 1 && !f.is_zero() && f.field() == field;
        if !linear(&u) || !ls.iter().all(linear) || !phis.iter().flat_map(|p| &p.factors).all(|(h, _)| linear(h)) {
            return Err(Error::Input("U, L_i and H_kj must be binary linear forms over the session field".into()));
        }
        let mut hs: Vec<Form> = Vec::new();
        let mut phis = phis;
        for p in &mut phis {
            for (h, _) in &mut p.factors {
                match hs.iter().find(|g| g.is_proportional(h)) {
                    Some(g) => *h = g.clone(),
                    None => hs.push(h.clone()),
                }
            }
        }
        let mut all: Vec<&Form> = vec![&u];
        all.extend(&ls);
        all.extend(&hs);
        check_independent(&all)?;
        Ok(DubreilDatum { field, beta0, gaps, phis, u, ls, hs })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn beta0(&self) -> u32 {
        self.beta0
    }

    pub fn gaps(&self) -> &[u32] {
        &self.gaps
    }

    pub fn phis(&self) -> &[LinearFactorization] {
        &self.phis
    }

    pub fn u(&self) -> &Form {
        &self.u
    }

    pub fn ls(&self) -> &[Form] {
        &self.ls
    }

    pub fn distinct_factors(&self) -> &[Form] {
        &self.hs
    }

    pub fn r(&self) -> usize {
        self.phis.len()
    }

    /// `δ_1, …, δ_r`.
    pub fn deltas(&self) -> Vec<u32> {
        self.phis.iter().map(LinearFactorization::degree).collect()
    }

    /// `Δ_0 = 0, Δ_1, …, Δ_r = δ`.
    pub fn partial_deltas(&self) -> Vec<u32> {
        let mut out = vec![0];
        for d in self.deltas() {
            out.push(out.last().unwrap() + d);
        }
        out
    }

    pub fn delta(&self) -> u32 {
        self.deltas().iter().sum()
    }

    /// Number of distinct linear factors of `Φ`.
    pub fn v(&self) -> usize {
        self.hs.len()
    }

    /// `β_0, …, β_r` with `β_i = β_{i-1} + δ_i + t_i`.
    pub fn betas(&self) -> Vec<u32> {
        let mut out = vec![self.beta0];
        for (d, t) in self.deltas().iter().zip(&self.gaps) {
            out.push(out.last().unwrap() + d + t);
        }
        out
    }

    /// Generator degrees `α_i = β_i + δ - Δ_i`.
    pub fn alphas(&self) -> Vec<u32> {
        let delta = self.delta();
        self.betas().iter().zip(self.partial_deltas()).map(|(b, dd)| b + delta - dd).collect()
    }

    pub fn alpha(&self) -> u32 {
        self.beta0 + self.delta()
    }

    /// `(α_0^{[β_0+1]}, α_1^{[δ_1]}, …, α_r^{[δ_r]})`.
    pub fn degree_vector(&self) -> Vec<u32> {
        let alphas = self.alphas();
        let mut out = vec![alphas[0]; self.beta0 as usize + 1];
        for (k, d) in self.deltas().iter().enumerate() {
            out.extend(std::iter::repeat_n(alphas[k + 1], *d as usize));
        }
        out
    }

    /// `Φ_{i+1} ⋯ Φ_r` (0-based `i`).
    fn tail(&self, i: usize) -> Form {
        let mut f = Form::one(self.field, 2);
        for p in &self.phis[i..] {
            f = f.mul(&p.expand(self.field, 2));
        }
        f
    }

    pub fn phi(&self) -> Form {
        self.tail(0)
    }

    fn hs_index(&self, h: &Form) -> usize {
        self.hs.iter().position(|g| g == h).expect("canonical factor")
    }

    /// Default diagonal order of the `A` block, as indices into
    /// [`distinct_factors`](Self::distinct_factors).
    pub fn diagonal(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for p in &self.phis {
            for (h, mu) in &p.factors {
                out.extend(std::iter::repeat_n(self.hs_index(h), *mu as usize));
            }
        }
        out
    }

    /// The redundant generating set `Φ_{i+1}⋯Φ_r · S_{β_i}`.
    pub fn spanning_generators(&self) -> Vec<Form> {
        let mut out = Vec::new();
        for (i, b) in self.betas().into_iter().enumerate() {
            let tail = self.tail(i);
            for e in monomial_basis(2, b) {
                out.push(tail.shift(&e));
            }
        }
        out
    }

    /// The ideal, given by a minimal generating set.
    pub fn build_ideal(&self) -> Result<GradedIdeal> {
        let span = GradedIdeal::new(self.field, 2, self.spanning_generators())?;
        GradedIdeal::new(self.field, 2, span.minimal_generators())
    }

    /// The canonical Hilbert–Burch matrix.
    pub fn canonical_matrix(&self) -> Result<FormMatrix> {
        self.variant_matrix(&Variant::Canonical)
    }

    fn default_corner(&self) -> Form {
        let t1 = self.gaps[0];
        if self.beta0 == 0 {
            self.u.pow(t1 + 1)
        } else {
            self.ls[self.beta0 as usize].mul(&self.u.pow(t1))
        }
    }

    pub fn variant_matrix(&self, variant: &Variant) -> Result<FormMatrix> {
        let mut diag = self.diagonal();
        let mut corner = None;
        let mut replaced = None;
        match variant {
            Variant::Canonical => {}
            Variant::Corner(eta) => {
                if self.r() == 0 {
                    return Err(Error::Input("no corner entry when δ = 0".into()));
                }
                if eta.nvars() != 2 || eta.field() != self.field || eta.degree() != self.gaps[0] + 1 || eta.is_zero() {
                    return Err(Error::Degree(format!("η must be a binary form of degree {}", self.gaps[0] + 1)));
                }
                if let Some(h) = self.hs.iter().find(|h| h.divides(eta)) {
                    return Err(Error::Precondition(format!("η = {eta} is not coprime to Φ (shares {h})")));
                }
                corner = Some(eta.clone());
            }
            Variant::ReplaceFactor(f) => {
                let p = diag.iter().rposition(|x| x == f).ok_or_else(|| Error::Input(format!("no factor {f}")))?;
                if p + 1 == diag.len() {
                    return Err(Error::Input("the last diagonal entry has no subdiagonal partner".into()));
                }
                replaced = Some(p);
            }
            Variant::Permuted(orders) => {
                if orders.len() != self.r() {
                    return Err(Error::Input(format!("{} orders for {} factors", orders.len(), self.r())));
                }
                diag.clear();
                for (p, order) in self.phis.iter().zip(orders) {
                    let mut counts = vec![0u32; p.factors.len()];
                    for &x in order {
                        *counts.get_mut(x).ok_or_else(|| Error::Input(format!("factor index {x} out of range")))? += 1;
                        diag.push(self.hs_index(&p.factors[x].0));
                    }
                    if counts.iter().zip(&p.factors).any(|(c, (_, mu))| c != mu) {
                        return Err(Error::Input("order is not a permutation of the factor multiset".into()));
                    }
                }
            }
        }
        let m = self.assemble(&diag, corner, replaced)?;
        self.verify_matrix(&m)?;
        Ok(m)
    }

    fn assemble(&self, diag: &[usize], corner: Option<Form>, replaced: Option<usize>) -> Result<FormMatrix> {
        let field = self.field;
        let alpha = self.alpha() as usize;
        let b0 = self.beta0 as usize;
        let mut e = vec![vec![Form::zero(field, 2, 0); alpha + 1]; alpha];
        for i in 0..b0 {
            e[i][i] = self.ls[i].clone();
            e[i][i + 1] = self.ls[i + 1].neg();
        }
        if self.r() > 0 {
            e[b0][b0] = corner.unwrap_or_else(|| self.default_corner());
        }
        let pd = self.partial_deltas();
        for (i, &h) in diag.iter().enumerate() {
            e[b0 + i][b0 + 1 + i] = self.hs[h].neg();
            if i + 1 == diag.len() {
                break;
            }
            // t_{k+1} when position i closes the block of Φ_k
            let boundary = (1..self.r()).find(|&k| pd[k] as usize == i + 1).map(|k| self.gaps[k]);
            let repeated = diag[i + 1..].contains(&h);
            let lin = if replaced == Some(i) { self.u.clone() } else { self.hs[h].clone() };
            e[b0 + i + 1][b0 + 1 + i] = match (repeated, boundary) {
                (false, None) => lin,
                (false, Some(t)) => lin.mul(&self.u.pow(t)),
                (true, None) => self.u.clone(),
                (true, Some(t)) => self.u.pow(t + 1),
            };
        }
        let a: Vec<i64> = self.degree_vector().iter().map(|&x| x as i64).collect();
        let b: Vec<i64> = (0..alpha).map(|i| a[i + 1] + 1).collect();
        FormMatrix::with_degrees(field, 2, e, b, a)
    }

    /// The minors of `m` must generate the ideal of the datum.
    pub fn verify_matrix(&self, m: &FormMatrix) -> Result<()> {
        let minors = m.maximal_minors()?;
        if minors.iter().any(Form::is_zero) || !m.verify_syzygies(&minors)? {
            return Err(Error::Internal("canonical matrix has a vanishing minor".into()));
        }
        let ours = GradedIdeal::new(self.field, 2, self.spanning_generators())?;
        let theirs = GradedIdeal::new(self.field, 2, minors)?;
        let top = *self.alphas().last().unwrap() + 1;
        for d in self.alpha()..=top {
            if ours.piece_dim(d) != theirs.piece_dim(d) {
                return Err(Error::Internal(format!("minors differ from the ideal in degree {d}")));
            }
        }
        Ok(())
    }

    /// Predicted strongly inessential generators, in total and per degree.
    pub fn si_count(&self) -> SiCount {
        let alphas = self.alphas();
        let mut per_degree = BTreeMap::new();
        for (k, p) in self.phis.iter().enumerate() {
            let later: Vec<&Form> = self.phis[k + 1..].iter().flat_map(|q| q.factors.iter().map(|(h, _)| h)).collect();
            let tau = p.factors.iter().filter(|(h, _)| later.contains(&h)).count();
            let c = p.factors.iter().map(|(_, mu)| (*mu - 1) as usize).sum::<usize>() + tau;
            if c > 0 {
                per_degree.insert(alphas[k + 1], c);
            }
        }
        SiCount { total: self.delta() as usize - self.v(), per_degree }
    }

    pub fn to_raw(&self) -> RawDatum {
        let coeffs = |f: &Form| f.linear_coeffs().iter().map(|c| serde_json::Value::String(c.to_string())).collect();
        RawDatum {
            beta0: self.beta0,
            gaps: self.gaps.clone(),
            phis: self
                .phis
                .iter()
                .map(|p| p.factors.iter().map(|(h, mu)| RawFactor { lin: RawForm::Coeffs(coeffs(h)), mu: *mu }).collect())
                .collect(),
            u: RawForm::Coeffs(coeffs(&self.u)),
            ls: self.ls.iter().map(|l| RawForm::Coeffs(coeffs(l))).collect(),
        }
    }

    /// A random datum with `δ ≤ max_delta`, `r ≤ max_r`, `β_0 ≤ max_beta0`;
    /// over small prime fields the number of available independent linear
    /// forms caps `β_0` and the number of distinct factors.
    pub fn random<R: Rng>(field: Field, rng: &mut R, limits: &RandomLimits) -> DubreilDatum {
        let mut pool = default_forms(field, 16);
        pool.shuffle(rng);
        let room = pool.len();
        let r = rng.gen_range(0..=limits.max_r);
        let beta0 = rng.gen_range(0..=(limits.max_beta0 as usize).min(room - 3)) as u32;
        let (u, rest) = pool.split_first().unwrap();
        let ls = rest[..=beta0 as usize].to_vec();
        let lines = &rest[beta0 as usize + 1..];
        if r == 0 {
            return DubreilDatum::new(field, beta0, vec![], vec![], u.clone(), ls).expect("valid random datum");
        }
        let delta = rng.gen_range(r as u32..=limits.max_delta.max(r as u32));
        let v = rng.gen_range(1..=(delta as usize).min(lines.len()));
        let mut labels: Vec<usize> = (0..v).collect();
        labels.extend((v..delta as usize).map(|_| rng.gen_range(0..v)));
        labels.shuffle(rng);
        // cut into r nonempty blocks
        let mut cuts: Vec<usize> = (1..delta as usize).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts[..r - 1].to_vec();
        cuts.sort_unstable();
        cuts.insert(0, 0);
        cuts.push(delta as usize);
        let phis = cuts
            .windows(2)
            .map(|w| {
                let mut factors: Vec<(Form, u32)> = Vec::new();
                for &l in &labels[w[0]..w[1]] {
                    match factors.iter_mut().find(|(h, _)| *h == lines[l]) {
                        Some((_, mu)) => *mu += 1,
                        None => factors.push((lines[l].clone(), 1)),
                    }
                }
                LinearFactorization::new(field.one(), factors).expect("independent lines")
            })
            .collect();
        let gaps = (0..r).map(|_| rng.gen_range(1..=limits.max_gap)).collect();
        DubreilDatum::new(field, beta0, gaps, phis, u.clone(), ls).expect("valid random datum")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomLimits {
    pub max_delta: u32,
    pub max_r: usize,
    pub max_beta0: u32,
    pub max_gap: u32,
}

impl Default for RandomLimits {
    fn default() -> Self {
        RandomLimits { max_delta: 6, max_r: 3, max_beta0: 3, max_gap: 3 }
    }
}

/// Alternative bases and matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum Variant {
    Canonical,
    /// Replace the corner entry by a form `η` of degree `t_1 + 1` coprime
    /// to `Φ`.
    Corner(Form),
    /// Replace the factor (index into the distinct factors) by `U` in the
    /// subdiagonal entry below its last diagonal appearance.
    ReplaceFactor(usize),
    /// Diagonal order inside each `Φ_k`, as indices into its factor list.
    Permuted(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiCount {
    pub total: usize,
    /// Degrees with at least one strongly inessential generator.
    pub per_degree: BTreeMap<u32, usize>,
}

impl SiCount {
    /// Counts read off a classification of a matrix.
    pub fn observed(m: &FormMatrix, c: &Classification) -> SiCount {
        let mut per_degree = BTreeMap::new();
        for j in c.si_columns() {
            *per_degree.entry(m.col_degrees()[j] as u32).or_insert(0) += 1;
        }
        SiCount { total: c.strongly_inessential, per_degree }
    }
}

// ---------------------------------------------------------------------------
// JSON

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawFactor {
    pub lin: RawForm,
    pub mu: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDatum {
    pub beta0: u32,
    pub gaps: Vec<u32>,
    pub phis: Vec<Vec<RawFactor>>,
    #[serde(rename = "U")]
    pub u: RawForm,
    #[serde(rename = "Ls")]
    pub ls: Vec<RawForm>,
}

impl RawDatum {
    pub fn to_datum(&self, field: Field) -> Result<DubreilDatum> {
        let lin = |f: &RawForm| f.to_form(field, 2, Some(1));
        let phis = self
            .phis
            .iter()
            .map(|p| {
                let factors = p.iter().map(|f| Ok((lin(&f.lin)?, f.mu))).collect::<Result<Vec<_>>>()?;
                LinearFactorization::new(field.one(), factors)
            })
            .collect::<Result<Vec<_>>>()?;
        let ls = self.ls.iter().map(lin).collect::<Result<Vec<_>>>()?;
        DubreilDatum::new(field, self.beta0, self.gaps.clone(), phis, lin(&self.u)?, ls)
    }
}

// ---------------------------------------------------------------------------
// decompositions of S_b

/// Basis `F_ij = A_ij C_i` of a complement `T` of `Φ S_t` in `S_{δ+t}`.
/// Without `cs`, `C_1 = U^{t+1}` and `C_i = H_1⋯H_{i-1} U^{ν_i}`.
pub fn decompose_sb(phi: &LinearFactorization, t: u32, u: &Form, cs: Option<&[Form]>) -> Result<Vec<Form>> {
    let (field, n) = (u.field(), u.nvars());
    let hs: Vec<&Form> = phi.factors.iter().map(|(h, _)| h).collect();
    let mus: Vec<u32> = phi.factors.iter().map(|(_, m)| *m).collect();
    if let Some(h) = hs.iter().find(|h| h.is_proportional(u)) {
        return Err(Error::Input(format!("U is proportional to the factor {h}")));
    }
    let v = hs.len();
    let cs: Vec<Form> = match cs {
        Some(cs) => {
            if cs.len() != v {
                return Err(Error::Input(format!("{} forms C_i for {v} factors", cs.len())));
            }
            cs.to_vec()
        }
        None => (0..v)
            .map(|i| {
                let before: u32 = mus[..i].iter().sum();
                let nu = t + before + 1 - i as u32;
                Form::product(field, n, hs[..i].iter().copied()).mul(&u.pow(nu))
            })
            .collect(),
    };
    let mut out = Vec::new();
    for i in 0..v {
        let want = t + mus[..i].iter().sum::<u32>() + 1;
        if cs[i].degree() != want || cs[i].is_zero() {
            return Err(Error::Degree(format!("C_{} must have degree {want}", i + 1)));
        }
        if hs[i].divides(&cs[i]) {
            return Err(Error::Precondition(format!("C_{} is divisible by {}", i + 1, hs[i])));
        }
        let tail = Form::product(field, n, hs[i + 1..].iter().zip(&mus[i + 1..]).map(|(h, m)| h.pow(*m)).collect::<Vec<_>>().iter());
        for j in 1..=mus[i] {
            out.push(hs[i].pow(mus[i] - j).mul(&tail).mul(&u.pow(j - 1)).mul(&cs[i]));
        }
    }
    let phi_form = phi.expand(field, n);
    let b = phi.degree() + t;
    let mut all: Vec<Form> = monomial_basis(n, t).iter().map(|e| phi_form.shift(e)).collect();
    all.extend(out.iter().cloned());
    if forms_rank(field, n, b, &all) != b as usize + 1 || all.len() != b as usize + 1 {
        return Err(Error::Check(format!("Φ S_{t} + T is not a direct sum equal to S_{b}")));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// prescribed profiles

fn check_profile(degrees: &[u32], counts: &[usize]) -> Result<usize> {
    if degrees.is_empty() || degrees.len() != counts.len() {
        return Err(Error::Input("need matching, nonempty degree and count lists".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("degrees must be strictly increasing".into()));
    }
    if counts.contains(&0) {
        return Err(Error::Input("counts must be positive".into()));
    }
    let m: usize = counts.iter().sum();
    if degrees[0] as usize <= m + 1 {
        return Err(Error::Infeasible(format!(
            "s.i. generators need d_1 > r_1 + ... + r_s + 1, but d_1 = {} and the counts sum to {m}",
            degrees[0]
        )));
    }
    Ok(m)
}

/// The datum with `Φ_j = H^{r_j}` (`j < s`), `Φ_s = H^{r_s+1}`: `r_i`
/// strongly inessential generators in degree `d_i` and the least degree
/// vector doing so.
pub fn prescribe(field: Field, degrees: &[u32], counts: &[usize]) -> Result<DubreilDatum> {
    let m = check_profile(degrees, counts)?;
    let forms = default_forms(field, 3);
    let (h, u, l0) = (forms[0].clone(), forms[1].clone(), forms[2].clone());
    let s = counts.len();
    let phis = counts
        .iter()
        .enumerate()
        .map(|(j, &r)| LinearFactorization::new(field.one(), vec![(h.clone(), r as u32 + (j + 1 == s) as u32)]))
        .collect::<Result<Vec<_>>>()?;
    let mut prev = m as u32 + 1;
    let mut gaps = Vec::new();
    for &d in degrees {
        gaps.push(d - prev);
        prev = d;
    }
    DubreilDatum::new(field, 0, gaps, phis, u, vec![l0])
}

/// Further data realising the same profile, with more distinct factors
/// and/or larger `β_0`; at most `limit` of them, the minimal one first.
pub fn prescribe_alternatives(field: Field, degrees: &[u32], counts: &[usize], limit: usize) -> Result<Vec<DubreilDatum>> {
    let m = check_profile(degrees, counts)?;
    let s = counts.len();
    let pool = default_forms(field, 24);
    let mut out = vec![prescribe(field, degrees, counts)?];
    let mut v = 1;
    while out.len() < limit && m + v < degrees[0] as usize && v + 3 <= pool.len() {
        let delta = m + v;
        let mut found = Vec::new();
        // exponent of line j in Φ_k, lines ordered by non-increasing columns
        let mut mu = vec![vec![0u32; v]; s];
        enumerate_exponents(&mut mu, 0, 0, delta, counts, &mut found, limit);
        for mu in found {
            for alpha0 in delta as u32..degrees[0] {
                let beta0 = alpha0 - delta as u32;
                if v + beta0 as usize + 2 > pool.len() || out.len() >= limit {
                    break;
                }
                let u = pool[v].clone();
                let ls = pool[v + 1..v + 2 + beta0 as usize].to_vec();
                let phis = mu
                    .iter()
                    .map(|row| {
                        let f = row.iter().enumerate().filter(|(_, &e)| e > 0).map(|(j, &e)| (pool[j].clone(), e)).collect();
                        LinearFactorization::new(field.one(), f)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut prev = alpha0;
                let gaps = degrees.iter().map(|&d| std::mem::replace(&mut prev, d)).zip(degrees).map(|(p, d)| d - p).collect();
                let d = DubreilDatum::new(field, beta0, gaps, phis, u, ls)?;
                if !out.contains(&d) {
                    out.push(d);
                }
            }
        }
        v += 1;
    }
    Ok(out)
}

fn enumerate_exponents(
    mu: &mut Vec<Vec<u32>>,
    cell: usize,
    used: usize,
    delta: usize,
    counts: &[usize],
    found: &mut Vec<Vec<Vec<u32>>>,
    limit: usize,
) {
    let (s, v) = (mu.len(), mu[0].len());
    if found.len() >= limit {
        return;
    }
    if cell == s * v {
        if used != delta || !profile_matches(mu, counts) {
            return;
        }
        found.push(mu.clone());
        return;
    }
    let (k, j) = (cell % s, cell / s);
    for e in 0..=(delta - used) as u32 {
        mu[k][j] = e;
        // every line occurs, every Φ_k is nonconstant, columns non-increasing
        if k + 1 == s {
            let col: Vec<u32> = (0..s).map(|q| mu[q][j]).collect();
            if col.iter().all(|&x| x == 0) {
                continue;
            }
            if j > 0 && (0..s).map(|q| mu[q][j - 1]).collect::<Vec<_>>() < col {
                continue;
            }
        }
        enumerate_exponents(mu, cell + 1, used + e as usize, delta, counts, found, limit);
    }
    mu[k][j] = 0;
}

fn profile_matches(mu: &[Vec<u32>], counts: &[usize]) -> bool {
    mu.iter().enumerate().all(|(k, row)| {
        let deg: u32 = row.iter().sum();
        let tau = (0..row.len()).filter(|&j| row[j] > 0 && mu[k + 1..].iter().any(|q| q[j] > 0)).count();
        let c: usize = row.iter().filter(|&&e| e > 0).map(|&e| (e - 1) as usize).sum::<usize>() + tau;
        deg > 0 && c == counts[k]
    })
}

// ---------------------------------------------------------------------------
// splitting

#[derive(Debug, Clone)]
pub struct SplitPair {
    pub p: u32,
    /// Gcd of `I_p`.
    pub d: Form,
    pub i_prime: GradedIdeal,
    pub m_prime: FormMatrix,
    pub i_second: GradedIdeal,
    pub m_second: FormMatrix,
    /// Number of generators of degree at most `p`.
    pub m: usize,
}

/// Splits the ideal of maximal minors of `m` at degree `p`: `m` must have
/// block shape `[[A, 0], [B, C]]` with `A` the first `m-1` rows and the
/// columns of degree `≤ p`.
pub fn split(mat: &FormMatrix, p: u32) -> Result<SplitPair> {
    let n = mat.nvars();
    let a = mat.col_degrees();
    if a.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Input("columns must be sorted by degree".into()));
    }
    let ideal = mat.minors_ideal()?;
    let profile = ideal.profile(None)?;
    if !ideal.maximal_at(&profile, p + 1) {
        return Err(Error::Precondition(format!("maximality fails in degree {}", p + 1)));
    }
    let k = a.iter().filter(|&&x| x <= p as i64).count();
    if k < 2 || k == mat.cols() {
        return Err(Error::Precondition(format!("degree {p} leaves one side of the splitting empty")));
    }
    let top: Vec<usize> = (0..k - 1).collect();
    if top.iter().any(|&i| (k..mat.cols()).any(|j| !mat.entry(i, j).is_zero())) {
        return Err(Error::Precondition("matrix is not in block form at this degree".into()));
    }
    let bottom: Vec<usize> = (k - 1..mat.rows()).collect();
    let left: Vec<usize> = (0..k).collect();
    let right: Vec<usize> = (k..mat.cols()).collect();
    let upper = mat.submatrix(&top, &left)?;
    // renormalise to the degrees of the generators of I' = (F_j / D)
    let shift = upper.col_degrees().iter().sum::<i64>() - upper.row_degrees().iter().sum::<i64>();
    let m_prime = FormMatrix::with_degrees(
        mat.field(),
        n,
        upper.entries().to_vec(),
        upper.row_degrees().iter().map(|b| b - shift).collect(),
        upper.col_degrees().iter().map(|a| a - shift).collect(),
    )?;
    let f_prime = m_prime.maximal_minors()?;
    let bottom_rows: Vec<usize> = (0..mat.rows() - k + 1).collect();
    let c = mat.submatrix(&bottom, &right)?;
    let det_c = c.det(&bottom_rows, &(0..c.cols()).collect::<Vec<_>>());
    let d = if n == 2 { ideal.piece_gcd(p)? } else { det_c.monic() };
    if d.is_zero() {
        return Err(Error::Precondition("the lower block is singular".into()));
    }
    if !det_c.is_proportional(&d) {
        return Err(Error::Check(format!("det C = {det_c} differs from D = {d}")));
    }
    let minors = mat.maximal_minors()?;
    for j in 0..k {
        if !minors[j].is_proportional(&d.mul(&f_prime[j])) {
            return Err(Error::Check(format!("minor {j} is not D times the minor of the upper block")));
        }
    }
    let b = mat.submatrix(&bottom, &left)?;
    let mut entries = Vec::new();
    for (r, row) in b.entries().iter().enumerate() {
        let mut acc = Form::zero(mat.field(), n, (b.row_degrees()[r] - d.degree() as i64).max(0) as u32);
        for (x, f) in row.iter().zip(&f_prime) {
            if !x.is_zero() {
                acc = acc.add(&x.mul(f))?;
            }
        }
        let mut e = vec![acc];
        e.extend(c.entries()[r].iter().cloned());
        entries.push(e);
    }
    let mut col_deg = vec![d.degree() as i64];
    col_deg.extend(c.col_degrees());
    let m_second = FormMatrix::with_degrees(mat.field(), n, entries, c.row_degrees().to_vec(), col_deg)?;
    let i_prime = GradedIdeal::new(mat.field(), n, f_prime)?;
    let mut second = vec![d.clone()];
    second.extend(minors[k..].iter().cloned());
    let i_second = GradedIdeal::new(mat.field(), n, second)?;
    let check = m_second.minors_ideal()?;
    for t in d.degree()..=i_second.max_degree() + 1 {
        if check.piece_dim(t) != i_second.piece_dim(t) {
            return Err(Error::Check(format!("lower block does not present (D, G) in degree {t}")));
        }
    }
    Ok(SplitPair { p, d, i_prime, m_prime, i_second, m_second, m: k })
}

/// Consistency of strong inessentiality across a splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub whole: Vec<String>,
    pub first: Vec<String>,
    pub second: Vec<String>,
    /// Columns `j < m`: s.i. in `I'` but not in `I`.
    pub forward_violations: Vec<usize>,
    /// Columns `j ≥ m`: s.i. status differs between `I''` and `I`.
    pub second_violations: Vec<usize>,
    /// Columns `j < m`: s.i. in `I` but not in `I'`.
    pub reverse_examples: Vec<usize>,
    /// Columns left undecided somewhere.
    pub undecided: Vec<usize>,
    pub holds: bool,
}

pub fn check_splitting(mat: &FormMatrix, split: &SplitPair, opts: &SiOptions) -> Result<SplitReport> {
    let whole = classify_all(mat, opts)?;
    let first = classify_all(&split.m_prime, opts)?;
    let second = classify_all(&split.m_second, opts)?;
    let kinds = |c: &Classification| c.verdicts.iter().map(|v| format!("{:?}", v.kind)).collect::<Vec<_>>();
    let known = |c: &Classification, j: usize| c.verdicts[j].kind != crate::essentiality::Kind::Unknown;
    let si = |c: &Classification, j: usize| c.verdicts[j].is_si();
    let mut rep = SplitReport {
        whole: kinds(&whole),
        first: kinds(&first),
        second: kinds(&second),
        forward_violations: vec![],
        second_violations: vec![],
        reverse_examples: vec![],
        undecided: vec![],
        holds: true,
    };
    for j in 0..split.m {
        if !known(&whole, j) || !known(&first, j) {
            rep.undecided.push(j);
        } else if si(&first, j) && !si(&whole, j) {
            rep.forward_violations.push(j);
        } else if si(&whole, j) && !si(&first, j) {
            rep.reverse_examples.push(j);
        }
    }
    for j in split.m..mat.cols() {
        let c = j - split.m + 1;
        if !known(&whole, j) || !known(&second, c) {
            rep.undecided.push(j);
        } else if si(&whole, j) != si(&second, c) {
            rep.second_violations.push(j);
        }
    }
    if si(&second, 0) {
        rep.second_violations.push(usize::MAX);
    }
    rep.holds = rep.forward_violations.is_empty() && rep.second_violations.is_empty();
    Ok(rep)
}

/// Splitting of a datum's canonical matrix right after degree `α_j`.
pub fn split_datum(d: &DubreilDatum, j: usize) -> Result<SplitPair> {
    if j == 0 || j > d.r() {
        return Err(Error::Input(format!("split index must be in 1..={}", d.r().saturating_sub(1))));
    }
    split(&d.canonical_matrix()?, d.alphas()[j])
}
