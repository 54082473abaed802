//! Homogeneous ideals given by generators, studied through the dimensions
//! of their graded pieces.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::binary;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::form::{dim_s, monomial_basis, Form};
use crate::linalg::Echelon;

pub struct GradedIdeal {
    field: Field,
    nvars: usize,
    generators: Vec<Form>,
    // (degree, largest generator degree used) -> dimension
    memo: RwLock<HashMap<(u32, u32), usize>>,
}

impl Clone for GradedIdeal {
    fn clone(&self) -> Self {
        let memo = self.memo.read().expect("memo poisoned").clone();
        GradedIdeal {
            field: self.field,
            nvars: self.nvars,
            generators: self.generators.clone(),
            memo: RwLock::new(memo),
        }
    }
}

impl std::fmt::Debug for GradedIdeal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedIdeal").field("generators", &self.generators).finish()
    }
}

impl GradedIdeal {
    /// Zero generators are dropped.
    pub fn new(field: Field, nvars: usize, generators: Vec<Form>) -> Result<Self> {
        for g in &generators {
            if g.nvars() != nvars || g.field() != field {
                return Err(Error::Input(format!("generator {g} lives in another ring")));
            }
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(GradedIdeal { field, nvars, generators, memo: RwLock::new(HashMap::new()) })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generators(&self) -> &[Form] {
        &self.generators
    }

    pub fn max_degree(&self) -> u32 {
        self.generators.iter().map(Form::degree).max().unwrap_or(0)
    }

    /// Sum of ideals.
    pub fn sum(&self, other: &GradedIdeal) -> Result<GradedIdeal> {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        GradedIdeal::new(self.field, self.nvars, gens)
    }

    /// `dim I_d`.
    pub fn piece_dim(&self, d: u32) -> usize {
        self.partial_dim(d, d)
    }

    /// Dimension in degree `d` of the ideal generated by the generators of
    /// degree at most `k`.
    fn partial_dim(&self, d: u32, k: u32) -> usize {
        let k = k.min(d);
        if let Some(&v) = self.memo.read().expect("memo poisoned").get(&(d, k)) {
            return v;
        }
        let v = self.compute_dim(d, k);
        self.memo.write().expect("memo poisoned").insert((d, k), v);
        v
    }

    fn compute_dim(&self, d: u32, k: u32) -> usize {
        let full = dim_s(self.nvars, d as i64);
        // If a lower degree piece is already everything, so is this one.
        if d > 0 && k == d {
            let below = self.memo.read().expect("memo poisoned").get(&(d - 1, d - 1)).copied();
            if below == Some(dim_s(self.nvars, d as i64 - 1)) && below != Some(0) {
                return full;
            }
        }
        let basis = monomial_basis(self.nvars, d);
        let index: HashMap<&Vec<u32>, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut ech = Echelon::new(self.field, full);
        for g in self.generators.iter().filter(|g| g.degree() <= k) {
            for m in monomial_basis(self.nvars, d - g.degree()) {
                let mut v = vec![self.field.zero(); full];
                for (e, c) in g.terms() {
                    let key: Vec<u32> = e.iter().zip(&m).map(|(a, b)| a + b).collect();
                    v[index[&key]] = c.clone();
                }
                ech.insert(&v);
                if ech.is_full() {
                    return full;
                }
            }
        }
        ech.rank()
    }

    /// `H(S/I, t)`.
    pub fn hilbert(&self, t: i64) -> usize {
        if t < 0 {
            return 0;
        }
        dim_s(self.nvars, t) - self.piece_dim(t as u32)
    }

    /// Number of minimal generators in degree `t`: `dim I_t - dim S_1 I_{t-1}`.
    pub fn nu(&self, t: u32) -> usize {
        if t == 0 {
            return self.piece_dim(0);
        }
        self.piece_dim(t) - self.partial_dim(t, t - 1)
    }

    /// A minimal generating set chosen from the given generators; earlier
    /// listed generators are preferred.
    pub fn minimal_generators(&self) -> Vec<Form> {
        let mut degs: Vec<u32> = self.generators.iter().map(Form::degree).collect();
        degs.sort_unstable();
        degs.dedup();
        let mut out = Vec::new();
        for d in degs {
            let full = dim_s(self.nvars, d as i64);
            let basis = monomial_basis(self.nvars, d);
            let index: HashMap<&Vec<u32>, usize> = basis.iter().enumerate().map(|(i, e)| (e, i)).collect();
            let mut ech = Echelon::new(self.field, full);
            let vec_of = |f: &Form| {
                let mut v = vec![self.field.zero(); full];
                for (e, c) in f.terms() {
                    v[index[e]] = c.clone();
                }
                v
            };
            for g in out.iter().filter(|g: &&Form| g.degree() < d) {
                for m in monomial_basis(self.nvars, d - g.degree()) {
                    ech.insert(&vec_of(&g.shift(&m)));
                }
            }
            let lower = out.len();
            for g in self.generators.iter().filter(|g| g.degree() == d) {
                if ech.insert(&vec_of(g)) {
                    out.push(g.clone());
                }
            }
            debug_assert!(out.len() >= lower);
        }
        out
    }

    pub fn default_horizon(&self) -> u32 {
        2 * self.max_degree() + self.nvars as u32
    }

    /// Hilbert function, Castelnuovo function `Γ = Δ^{n-2} H`, multiplicity
    /// and generator counts, computed up to `horizon`.
    pub fn profile(&self, horizon: Option<u32>) -> Result<IdealProfile> {
        if self.generators.is_empty() {
            return Err(Error::NotHeightTwo("zero ideal".into()));
        }
        let horizon = horizon.unwrap_or_else(|| self.default_horizon()).max(self.max_degree() + 1);
        let hilbert: Vec<usize> = (0..=horizon as i64).map(|t| self.hilbert(t)).collect();
        let mut gamma: Vec<i64> = hilbert.iter().map(|&h| h as i64).collect();
        for _ in 0..self.nvars.saturating_sub(2) {
            let prev = gamma.clone();
            for t in 0..gamma.len() {
                gamma[t] = prev[t] - if t > 0 { prev[t - 1] } else { 0 };
            }
        }
        if gamma.iter().any(|&g| g < 0) || *gamma.last().unwrap() != 0 {
            return Err(Error::NotHeightTwo(format!(
                "Castelnuovo function {gamma:?} does not vanish by degree {horizon}"
            )));
        }
        let stable_from = gamma.iter().rposition(|&g| g != 0).map_or(0, |i| i + 1) as u32;
        let e: i64 = gamma.iter().sum();
        if e <= 0 {
            return Err(Error::NotHeightTwo("ideal is the whole ring".into()));
        }
        let mut nu_by_degree = BTreeMap::new();
        for t in 0..=self.max_degree() {
            let v = self.nu(t);
            if v > 0 {
                nu_by_degree.insert(t, v);
            }
        }
        let alpha = *nu_by_degree.keys().next().expect("nonzero ideal");
        let beta = if self.nvars == 2 { self.beta_binary() } else { None };
        Ok(IdealProfile {
            alpha,
            beta,
            nu_total: nu_by_degree.values().sum(),
            nu_by_degree,
            hilbert,
            gamma,
            multiplicity: e as u64,
            horizon,
            stable_from,
        })
    }

    fn beta_binary(&self) -> Option<u32> {
        let mut gens: Vec<&Form> = self.generators.iter().collect();
        gens.sort_by_key(|g| g.degree());
        let mut acc = Form::zero(self.field, 2, 0);
        for g in gens {
            acc = binary::gcd(&acc, g);
            if acc.degree() == 0 {
                return Some(g.degree());
            }
        }
        None
    }

    /// Gcd of `I_d` for binary ideals.
    pub fn piece_gcd(&self, d: u32) -> Result<Form> {
        if self.nvars != 2 {
            return Err(Error::Input("piece gcd needs two variables".into()));
        }
        Ok(binary::gcd_all(self.field, self.generators.iter().filter(|g| g.degree() <= d)))
    }

    /// Dubreil's bound `ν ≤ α + 1` and the refined bound at each degree.
    pub fn dubreil_check(&self, profile: &IdealProfile) -> DubreilReport {
        let p = profile;
        let last = p.beta.unwrap_or_else(|| *p.nu_by_degree.keys().last().unwrap());
        let mut degrees = Vec::new();
        for t in p.alpha..=last {
            let nu = p.nu_by_degree.get(&t).copied().unwrap_or(0);
            let mut bound = -p.delta_gamma(t as i64);
            if t == p.alpha {
                // Γ(α-1) - Γ(α) counts the syzygy-free part; the first
                // degree carries one extra generator.
                bound += 1;
            }
            degrees.push(DegreeBound { t, nu, bound, maximal: nu as i64 == bound && nu > 0 });
        }
        DubreilReport {
            nu: p.nu_total,
            alpha: p.alpha,
            dubreil_bound: p.alpha as usize + 1,
            holds: p.nu_total <= p.alpha as usize + 1,
            equality: p.nu_total == p.alpha as usize + 1,
            refined_holds: degrees.iter().all(|d| d.nu as i64 <= d.bound),
            max_at: degrees.iter().filter(|d| d.maximal).map(|d| d.t).collect(),
            degrees,
        }
    }

    /// Whether the maximality relation `ν(p+1) = Γ(p) - Γ(p+1)` holds.
    pub fn maximal_at(&self, profile: &IdealProfile, t: u32) -> bool {
        let nu = profile.nu_by_degree.get(&t).copied().unwrap_or(0) as i64;
        nu == -profile.delta_gamma(t as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdealProfile {
    pub alpha: u32,
    pub beta: Option<u32>,
    pub nu_total: usize,
    pub nu_by_degree: BTreeMap<u32, usize>,
    pub hilbert: Vec<usize>,
    pub gamma: Vec<i64>,
    pub multiplicity: u64,
    pub horizon: u32,
    pub stable_from: u32,
}

impl IdealProfile {
    pub fn gamma_at(&self, t: i64) -> i64 {
        if t < 0 {
            0
        } else {
            self.gamma.get(t as usize).copied().unwrap_or(0)
        }
    }

    /// `ΔΓ(t) = Γ(t) - Γ(t-1)`.
    pub fn delta_gamma(&self, t: i64) -> i64 {
        self.gamma_at(t) - self.gamma_at(t - 1)
    }

    /// Degrees of a minimal generating set, non-decreasing.
    pub fn degree_vector(&self) -> Vec<u32> {
        self.nu_by_degree.iter().flat_map(|(&d, &k)| std::iter::repeat_n(d, k)).collect()
    }

    pub fn is_dubreil(&self) -> bool {
        self.nu_total == self.alpha as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeBound {
    pub t: u32,
    pub nu: usize,
    pub bound: i64,
    pub maximal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DubreilReport {
    pub nu: usize,
    pub alpha: u32,
    pub dubreil_bound: usize,
    pub holds: bool,
    pub equality: bool,
    pub refined_holds: bool,
    pub max_at: Vec<u32>,
    pub degrees: Vec<DegreeBound>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::parse_form;

    fn ideal(n: usize, gens: &[&str]) -> GradedIdeal {
        let q = Field::Rational;
        GradedIdeal::new(q, n, gens.iter().map(|s| parse_form(q, n, s, None).unwrap()).collect()).unwrap()
    }

    #[test]
    fn piece_dimensions() {
        let i = ideal(2, &["X", "Y"]);
        assert_eq!(i.piece_dim(1), 2);
        let i = ideal(2, &["X^2", "Y^2"]);
        assert_eq!(i.piece_dim(2), 2);
        assert_eq!(i.piece_dim(3), 4);
        let i = ideal(2, &["X^3", "X^2*Y", "X*Y^2", "Y^3"]);
        assert_eq!(i.piece_dim(3), 4);
    }

    #[test]
    fn generator_counts() {
        let i = ideal(2, &["X^2", "X*Y", "Y^3"]);
        assert_eq!((i.nu(2), i.nu(3)), (2, 1));
        let i = ideal(2, &["X", "Y"]);
        assert_eq!((i.nu(1), i.nu(2)), (2, 0));
        let i = ideal(2, &["X^2", "X*Y", "X^3", "Y^3", "X*Y^2"]);
        let mg = i.minimal_generators();
        assert_eq!(mg.len(), 3);
        assert_eq!(mg[2].to_string(), "Y^3");
    }

    #[test]
    fn profiles() {
        let p = ideal(2, &["X", "Y"]).profile(None).unwrap();
        assert_eq!((p.multiplicity, p.alpha, p.beta), (1, 1, Some(1)));
        let p = ideal(2, &["X^2", "X*Y", "Y^2"]).profile(None).unwrap();
        assert_eq!(&p.hilbert[..3], &[1, 2, 0]);
        assert_eq!(p.multiplicity, 3);
        assert!(ideal(2, &["X"]).profile(None).is_err());
        assert!(ideal(3, &["X"]).profile(None).is_err());
        // three general points in the plane
        let p = ideal(3, &["X*Y", "Y*Z", "X*Z"]).profile(None).unwrap();
        assert_eq!(p.multiplicity, 3);
    }

    #[test]
    fn dubreil_bounds() {
        let i = ideal(2, &["X^3", "X^2*Y", "X*Y^2", "Y^3"]);
        let p = i.profile(None).unwrap();
        let r = i.dubreil_check(&p);
        assert!(r.holds && r.equality && r.refined_holds);
        assert_eq!(p.delta_gamma(3), -3);
        assert_eq!(r.degrees[0].bound, 4);
        assert_eq!(r.max_at, vec![3]);
    }
}
