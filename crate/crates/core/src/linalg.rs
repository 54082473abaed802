//! Exact incremental row echelon forms over `Q` and `F_p`.
//!
//! Over `Q` rows are kept integral and primitive; an `i128` fast path is
//! used until an operation would overflow, after which everything moves to
//! `BigInt`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::{Field, Scalar};

#[derive(Clone, Debug)]
enum Rows {
    Fp(u64, Vec<Vec<u64>>),
    Small(Vec<Vec<i128>>),
    Big(Vec<Vec<BigInt>>),
}

/// Rows in echelon form: row `i` vanishes at the pivots of rows `< i`.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: Rows,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Self {
        let rows = match field {
            Field::Prime(p) => Rows::Fp(p, Vec::new()),
            Field::Rational => Rows::Small(Vec::new()),
        };
        Echelon { dim, rows, pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Adds `v` to the span; returns `true` if the rank grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        if self.is_full() {
            return false;
        }
        match &mut self.rows {
            Rows::Fp(p, rows) => {
                let p = *p;
                let mut w: Vec<u64> = v
                    .iter()
                    .map(|s| match s {
                        Scalar::Fp(x, _) => *x,
                        Scalar::Q(_) => panic!("rational scalar in prime-field echelon"),
                    })
                    .collect();
                reduce_fp(p, rows, &self.pivots, &mut w);
                match w.iter().position(|&x| x != 0) {
                    None => false,
                    Some(pc) => {
                        let inv = crate::field::pow_mod(w[pc], p - 2, p);
                        for x in w.iter_mut() {
                            *x = *x * inv % p;
                        }
                        rows.push(w);
                        self.pivots.push(pc);
                        true
                    }
                }
            }
            Rows::Small(rows) => {
                if let Some(mut w) = to_i128(v) {
                    if reduce_small(rows, &self.pivots, &mut w) {
                        return match w.iter().position(|&x| x != 0) {
                            None => false,
                            Some(pc) => {
                                rows.push(w);
                                self.pivots.push(pc);
                                true
                            }
                        };
                    }
                }
                let big: Vec<Vec<BigInt>> =
                    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
                self.rows = Rows::Big(big);
                self.insert(v)
            }
            Rows::Big(rows) => {
                let mut w = to_bigint(v);
                reduce_big(rows, &self.pivots, &mut w);
                match w.iter().position(|x| !x.is_zero()) {
                    None => false,
                    Some(pc) => {
                        rows.push(w);
                        self.pivots.push(pc);
                        true
                    }
                }
            }
        }
    }

    /// Whether `v` lies in the current span.
    pub fn contains(&self, v: &[Scalar]) -> bool {
        let mut copy = self.clone();
        !copy.insert(v)
    }
}

fn reduce_fp(p: u64, rows: &[Vec<u64>], pivots: &[usize], w: &mut [u64]) {
    for (row, &pc) in rows.iter().zip(pivots) {
        let c = w[pc];
        if c == 0 {
            continue;
        }
        let m = p - c;
        for (x, r) in w.iter_mut().zip(row).skip(pc) {
            if *r != 0 {
                *x = (*x + m * r) % p;
            }
        }
    }
}

fn common_denominator(v: &[Scalar]) -> BigInt {
    v.iter().fold(BigInt::one(), |acc, s| acc.lcm(&s.as_ratio().1))
}

fn to_bigint(v: &[Scalar]) -> Vec<BigInt> {
    let l = common_denominator(v);
    let mut w: Vec<BigInt> = v
        .iter()
        .map(|s| {
            let (n, d) = s.as_ratio();
            n * (&l / d)
        })
        .collect();
    make_primitive_big(&mut w);
    w
}

fn to_i128(v: &[Scalar]) -> Option<Vec<i128>> {
    let w = to_bigint(v);
    w.iter().map(|x| x.to_i128().filter(|y| y.abs() < (1i128 << 100))).collect()
}

fn make_primitive_big(w: &mut [BigInt]) {
    let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g > BigInt::one() {
        for x in w.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = w.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in w.iter_mut() {
                *x = -&*x;
            }
        }
    }
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Returns `false` on overflow (leaving `w` in an unspecified state).
fn reduce_small(rows: &[Vec<i128>], pivots: &[usize], w: &mut [i128]) -> bool {
    for (row, &pc) in rows.iter().zip(pivots) {
        let c = w[pc];
        if c == 0 {
            continue;
        }
        let a = row[pc];
        let g = gcd_i128(a, c);
        let (a, c) = (a / g, c / g);
        // entries left of the pivot are scaled too
        for (x, r) in w.iter_mut().zip(row) {
            let Some(t1) = x.checked_mul(a) else { return false };
            let Some(t2) = r.checked_mul(c) else { return false };
            let Some(s) = t1.checked_sub(t2) else { return false };
            *x = s;
        }
        let g = w.iter().fold(0i128, |acc, &x| gcd_i128(acc, x));
        if g > 1 {
            for x in w.iter_mut() {
                *x /= g;
            }
        }
    }
    true
}

fn reduce_big(rows: &[Vec<BigInt>], pivots: &[usize], w: &mut [BigInt]) {
    for (row, &pc) in rows.iter().zip(pivots) {
        if w[pc].is_zero() {
            continue;
        }
        let g = row[pc].gcd(&w[pc]);
        let a = &row[pc] / &g;
        let c = &w[pc] / &g;
        for (x, r) in w.iter_mut().zip(row) {
            *x = &*x * &a - r * &c;
        }
        make_primitive_big(w);
    }
}

/// Dimension of the span of `vectors` in `field^dim`.
pub fn span_dimension(field: Field, dim: usize, vectors: &[Vec<Scalar>]) -> usize {
    let mut e = Echelon::new(field, dim);
    for v in vectors {
        e.insert(v);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// A solution `c` of `Σ c_k columns[k] = rhs`, if one exists.
pub fn solve(field: Field, columns: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let rows = rhs.len();
    let k = columns.len();
    // augmented matrix, row-major
    let mut a: Vec<Vec<Scalar>> = (0..rows)
        .map(|i| {
            let mut r: Vec<Scalar> = columns.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = a[row][col].inv();
        for x in a[row].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..=k {
                    let v = &a[row][j] * &f;
                    a[i][j] = &a[i][j] - &v;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut c = vec![field.zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        c[col] = a[i][k].clone();
    }
    Some(c)
}
