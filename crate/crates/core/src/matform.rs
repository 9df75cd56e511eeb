//! Square matrices of torus forms: the carrier for Omega(M, End E) in a
//! global trivialization.

use crate::scalar::{Cyclotomic, Scalar};
use crate::torus::{AffineMap, TangentVector, TorusForm};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct MatForm {
    rank: usize,
    dim: usize,
    entries: Vec<TorusForm>, // row-major rank x rank
}

impl MatForm {
    pub fn zero(rank: usize, dim: usize) -> Self {
        MatForm {
            rank,
            dim,
            entries: vec![TorusForm::zero(dim); rank * rank],
        }
    }

    pub fn identity(rank: usize, dim: usize) -> Self {
        let mut m = Self::zero(rank, dim);
        for i in 0..rank {
            *m.entry_mut(i, i) = TorusForm::one(dim);
        }
        m
    }

    pub fn scalar_form(rank: usize, f: TorusForm) -> Self {
        let dim = f.dim();
        let mut m = Self::zero(rank, dim);
        for i in 0..rank {
            *m.entry_mut(i, i) = f.clone();
        }
        m
    }

    pub fn from_entries(rank: usize, dim: usize, entries: Vec<TorusForm>) -> Self {
        assert_eq!(entries.len(), rank * rank);
        MatForm { rank, dim, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &TorusForm {
        &self.entries[i * self.rank + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut TorusForm {
        &mut self.entries[i * self.rank + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rank, self.dim), (o.rank, o.dim));
        let entries = self
            .entries
            .iter()
            .zip(o.entries.iter())
            .map(|(a, b)| a.add(b))
            .collect();
        MatForm {
            rank: self.rank,
            dim: self.dim,
            entries,
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|e| e.scale(s))
    }

    pub fn map<F: Fn(&TorusForm) -> TorusForm>(&self, f: F) -> Self {
        MatForm {
            rank: self.rank,
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    /// Matrix product with wedge multiplication of entries.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!((self.rank, self.dim), (o.rank, o.dim));
        let r = self.rank;
        let mut out = Self::zero(r, self.dim);
        for i in 0..r {
            for j in 0..r {
                let mut acc = TorusForm::zero(self.dim);
                for l in 0..r {
                    acc = acc.add(&self.entry(i, l).wedge(o.entry(l, j)).expect("same dim"));
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        out
    }

    pub fn trace(&self) -> TorusForm {
        let mut acc = TorusForm::zero(self.dim);
        for i in 0..self.rank {
            acc = acc.add(self.entry(i, i));
        }
        acc
    }

    pub fn ext_d(&self) -> Self {
        self.map(|e| e.ext_d())
    }

    pub fn contract(&self, v: &TangentVector) -> Self {
        self.map(|e| e.contract(v))
    }

    pub fn pullback(&self, f: &AffineMap) -> Self {
        self.map(|e| e.pullback(f))
    }

    pub fn degree_part(&self, d: usize) -> Self {
        self.map(|e| e.degree_part(d))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.iter().filter_map(|e| e.max_degree()).max()
    }

    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.entries.iter().all(|e| e.is_homogeneous(d))
    }

    /// Graded commutator [a, b] = a b - (-1)^{|a||b|} b a for homogeneous
    /// degrees da, db.
    pub fn graded_commutator(&self, o: &Self, da: usize, db: usize) -> Self {
        let sign = if (da * db) % 2 == 0 { 1 } else { -1 };
        self.mul(o).sub(&o.mul(self).scale(&Scalar::from_int(sign)))
    }

    /// Inverse of a cocycle-shaped matrix: either a generalized permutation
    /// matrix of single Fourier modes, or a constant matrix with cyclotomic
    /// entries.
    pub fn inverse(&self) -> Result<Self, Error> {
        if let Some(inv) = self.monomial_inverse() {
            return Ok(inv);
        }
        self.constant_inverse()
    }

    fn monomial_inverse(&self) -> Option<Self> {
        let r = self.rank;
        let mut out = Self::zero(r, self.dim);
        let mut col_used = vec![false; r];
        for i in 0..r {
            let mut hit = None;
            for j in 0..r {
                if !self.entry(i, j).is_zero() {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some(j);
                }
            }
            let j = hit?;
            if col_used[j] {
                return None;
            }
            col_used[j] = true;
            let e = self.entry(i, j);
            let mut terms = e.terms();
            let ((mask, mode), c) = terms.next()?;
            if terms.next().is_some() || *mask != 0 {
                return None;
            }
            // entry is c * e_k with c a nonzero cyclotomic
            let c0 = c.as_single_cyclotomic()?;
            let cinv = c0.inv().ok()?;
            let neg_mode: Vec<i64> = mode.iter().map(|k| -k).collect();
            *out.entry_mut(j, i) =
                TorusForm::term(self.dim, Scalar::from_cyclo(cinv), neg_mode, 0);
        }
        Some(out)
    }

    fn constant_inverse(&self) -> Result<Self, Error> {
        let r = self.rank;
        let mut a: Vec<Vec<Cyclotomic>> = Vec::with_capacity(r);
        for i in 0..r {
            let mut row = Vec::with_capacity(r);
            for j in 0..r {
                let e = self.entry(i, j);
                let c = if e.is_zero() {
                    Cyclotomic::zero(1)
                } else {
                    let c = e.coeff(0, &vec![0i64; self.dim]);
                    let single = TorusForm::term(self.dim, c.clone(), vec![0; self.dim], 0);
                    if &single != e {
                        return Err(Error::NonInvertible(
                            "matrix is neither monomial nor constant".into(),
                        ));
                    }
                    c.as_single_cyclotomic().ok_or_else(|| {
                        Error::NonInvertible("matrix entries must be tau-free".into())
                    })?
                };
                row.push(c);
            }
            a.push(row);
        }
        // Gauss-Jordan over the cyclotomic field
        let mut inv: Vec<Vec<Cyclotomic>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        if i == j {
                            Cyclotomic::one(1)
                        } else {
                            Cyclotomic::zero(1)
                        }
                    })
                    .collect()
            })
            .collect();
        for col in 0..r {
            let pivot = (col..r)
                .find(|&i| !a[i][col].is_zero())
                .ok_or_else(|| Error::NonInvertible("singular cocycle matrix".into()))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col].clone();
            let pinv = p.inv()?;
            for j in 0..r {
                a[col][j] = a[col][j].mul(&pinv);
                inv[col][j] = inv[col][j].mul(&pinv);
            }
            for i in 0..r {
                if i == col || a[i][col].is_zero() {
                    continue;
                }
                let f = a[i][col].clone();
                for j in 0..r {
                    a[i][j] = a[i][j].sub(&f.mul(&a[col][j]));
                    inv[i][j] = inv[i][j].sub(&f.mul(&inv[col][j]));
                }
            }
        }
        let mut out = Self::zero(r, self.dim);
        for i in 0..r {
            for j in 0..r {
                if !inv[i][j].is_zero() {
                    *out.entry_mut(i, j) = TorusForm::term(
                        self.dim,
                        Scalar::from_cyclo(inv[i][j].clone()),
                        vec![0; self.dim],
                        0,
                    );
                }
            }
        }
        Ok(out)
    }
}

impl Scalar {
    /// The single cyclotomic coefficient of a tau-free scalar.
    pub fn as_single_cyclotomic(&self) -> Option<Cyclotomic> {
        if self.is_zero() {
            return Some(Cyclotomic::zero(1));
        }
        let mut it = self.tau_terms();
        let (d, c) = it.next()?;
        if *d != 0 || it.next().is_some() {
            return None;
        }
        Some(c.clone())
    }
}
