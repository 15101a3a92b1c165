//! Exact sparse linear algebra over Q(ζ₅).
//!
//! Rows are kept integral (entries in Z[ζ]) and eliminated fraction-free:
//! a row `r` is reduced against a pivot row `p` with leading entry `α` as
//! `α·r − r[c]·p`, after which the integer content of the row is divided out.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::CycNum;

/// A sparse vector as `(column, value)` pairs, sorted by column, no zeros.
pub type SparseVec = Vec<(usize, CycNum)>;

/// Sorts, merges duplicate columns and drops zeros.
pub fn normalize(mut v: SparseVec) -> SparseVec {
    v.sort_by_key(|(c, _)| *c);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (c, x) in v {
        match out.last_mut() {
            Some((lc, lx)) if *lc == c => *lx += &x,
            _ => out.push((c, x)),
        }
    }
    out.retain(|(_, x)| !x.is_zero());
    out
}

/// `a·x + b·y` for sparse vectors.
pub fn lin_comb(a: &CycNum, x: &[(usize, CycNum)], b: &CycNum, y: &[(usize, CycNum)]) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cy = y.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        let (c, v) = if cx < cy {
            i += 1;
            (cx, a * &x[i - 1].1)
        } else if cy < cx {
            j += 1;
            (cy, b * &y[j - 1].1)
        } else {
            i += 1;
            j += 1;
            (cx, &(a * &x[i - 1].1) + &(b * &y[j - 1].1))
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    out
}

/// Dot product of two sorted sparse vectors.
pub fn dot(x: &[(usize, CycNum)], y: &[(usize, CycNum)]) -> CycNum {
    let mut acc = CycNum::zero();
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &(&x[i].1 * &y[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

// Scales to Z[ζ] and removes the integer content.
fn primitive(v: SparseVec) -> SparseVec {
    if v.is_empty() {
        return v;
    }
    let den = v.iter().fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denominator()));
    let v: SparseVec = if den.is_one() {
        v
    } else {
        v.into_iter().map(|(c, x)| (c, x.scale_int(&den))).collect()
    };
    let g = v
        .iter()
        .flat_map(|(_, x)| x.numerators().iter())
        .fold(BigInt::zero(), |g, n| g.gcd(n));
    if g.is_one() || g.is_zero() {
        return v;
    }
    let s = CycNum::from_rational(&BigRational::new(BigInt::one(), g));
    v.into_iter().map(|(c, x)| (c, &x * &s)).collect()
}

/// Incremental row echelon form. Every stored row has a distinct leading
/// column, and that column is zero in no other row inserted after it.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
}

impl RowEchelon {
    pub fn new(ncols: usize) -> RowEchelon {
        RowEchelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows; the result is zero exactly when
    /// `v` lies in the row span.
    pub fn reduce(&self, v: SparseVec) -> SparseVec {
        let mut v = primitive(normalize(v));
        while let Some(&(c, _)) = v.first() {
            let Some(r) = self.pivot_row[c] else { break };
            let p = &self.rows[r];
            let alpha = p[0].1.clone();
            let beta = -&v[0].1;
            v = primitive(lin_comb(&alpha, &v, &beta, p));
        }
        // The leading column is now free; clear later pivot columns as well.
        let mut k = 1;
        while k < v.len() {
            let c = v[k].0;
            if let Some(r) = self.pivot_row[c] {
                let p = &self.rows[r];
                let alpha = p[0].1.clone();
                let beta = -&v[k].1;
                v = primitive(lin_comb(&alpha, &v, &beta, p));
                k = v.iter().position(|(cc, _)| *cc > c).unwrap_or(v.len());
            } else {
                k += 1;
            }
        }
        v
    }

    /// True when `v` lies in the row span.
    pub fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut v = primitive(normalize(v));
        while let Some(&(c, _)) = v.first() {
            match self.pivot_row[c] {
                Some(r) => {
                    let p = &self.rows[r];
                    let alpha = p[0].1.clone();
                    let beta = -&v[0].1;
                    v = primitive(lin_comb(&alpha, &v, &beta, p));
                }
                None => {
                    self.pivot_row[c] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
        false
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    /// Basis of the right null space `{x : row·x = 0 for every row}`.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        // Fully reduced rows with leading coefficient 1, by decreasing pivot.
        let mut reduced: Vec<Option<SparseVec>> = vec![None; self.ncols];
        for c in (0..self.ncols).rev() {
            let Some(r) = self.pivot_row[c] else { continue };
            let mut v = self.rows[r].clone();
            let mut k = 1;
            while k < v.len() {
                let col = v[k].0;
                if let Some(q) = &reduced[col] {
                    let beta = -&v[k].1;
                    v = lin_comb(&CycNum::one(), &v, &beta, q);
                    k = v.iter().position(|(cc, _)| *cc > col).unwrap_or(v.len());
                } else {
                    k += 1;
                }
            }
            let inv = v[0].1.inv().expect("pivot entries are nonzero");
            reduced[c] = Some(v.into_iter().map(|(cc, x)| (cc, &x * &inv)).collect());
        }
        let mut basis = Vec::new();
        for f in 0..self.ncols {
            if self.pivot_row[f].is_some() {
                continue;
            }
            let mut x: SparseVec = vec![(f, CycNum::one())];
            for (c, row) in reduced.iter().enumerate() {
                if let Some(row) = row {
                    if let Ok(i) = row.binary_search_by_key(&f, |e| e.0) {
                        x.push((c, -&row[i].1));
                    }
                }
            }
            basis.push(normalize(x));
        }
        basis
    }
}

/// Rank of the matrix whose rows are given.
pub fn rank<I: IntoIterator<Item = SparseVec>>(ncols: usize, rows: I) -> usize {
    let mut e = RowEchelon::new(ncols);
    for r in rows {
        e.insert(r);
    }
    e.rank()
}
