//! Exact exterior calculus on T^n = R^n/Z^n with Fourier-mode coefficients.
//!
//! A form is a finite sum of terms `c * e^{tau k.x} dx_I` with `c` a
//! [`Scalar`], `k` an integer mode vector and `I` an ascending index set
//! (stored as a bitmask).  Affine maps act on row vectors, `x -> x A + b`,
//! so a group-valued family of such maps is an honest homomorphism for a
//! right action on the torus.

use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{rint, Cyclotomic, Rat, Scalar};
use crate::Error;

pub type Mode = Vec<i64>;

/// Key of one term: (index set bitmask, Fourier mode).
pub type TermKey = (u32, Mode);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusForm {
    dim: usize,
    terms: BTreeMap<TermKey, Scalar>,
}

fn mask_degree(mask: u32) -> usize {
    mask.count_ones() as usize
}

/// Sign of merging two ascending index sets by counting transpositions;
/// None when they intersect.
fn merge_sign(a: u32, b: u32) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut sign = 0u32;
    let mut bb = b;
    while bb != 0 {
        let j = bb.trailing_zeros();
        // elements of `a` strictly greater than j must jump over j
        sign += (a >> (j + 1)).count_ones();
        bb &= bb - 1;
    }
    Some(if sign % 2 == 0 { 1 } else { -1 })
}

impl TorusForm {
    pub fn zero(dim: usize) -> Self {
        TorusForm {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// c * e_k * dx_I  (indices of I are 1-based positions; mask bit i-1).
    pub fn term(dim: usize, coeff: Scalar, mode: Mode, mask: u32) -> Self {
        assert_eq!(mode.len(), dim);
        assert!(mask < (1u32 << dim.max(1)) || dim == 0 && mask == 0);
        let mut f = Self::zero(dim);
        f.add_term(mask, mode, coeff);
        f
    }

    /// 0-form e_k.
    pub fn mode(dim: usize, mode: Mode) -> Self {
        Self::term(dim, Scalar::one(), mode, 0)
    }

    pub fn constant(dim: usize, s: Scalar) -> Self {
        Self::term(dim, s, vec![0; dim], 0)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Scalar::one())
    }

    /// dx_i (1-based).
    pub fn dx(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim);
        Self::term(dim, Scalar::one(), vec![0; dim], 1 << (i - 1))
    }

    pub fn add_term(&mut self, mask: u32, mode: Mode, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        let key = (mask, mode);
        let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry = entry.add(&coeff);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &Scalar)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.dim, o.dim);
        let mut out = self.clone();
        for ((mask, mode), c) in o.terms.iter() {
            out.add_term(*mask, mode.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero(self.dim);
        for ((mask, mode), c) in self.terms.iter() {
            out.add_term(*mask, mode.clone(), c.mul(s));
        }
        out
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        self.scale(&Scalar::from_rat(r.clone()))
    }

    /// Homogeneous component of the given form degree.
    pub fn degree_part(&self, d: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for ((mask, mode), c) in self.terms.iter() {
            if mask_degree(*mask) == d {
                out.add_term(*mask, mode.clone(), c.clone());
            }
        }
        out
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|(m, _)| mask_degree(*m)).max()
    }

    /// True if all terms have the same form degree `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|(m, _)| mask_degree(*m) == d)
    }

    pub fn wedge(&self, o: &Self) -> Result<Self, Error> {
        if self.dim != o.dim {
            return Err(Error::DimensionMismatch(format!(
                "wedge of forms on T^{} and T^{}",
                self.dim, o.dim
            )));
        }
        let mut out = Self::zero(self.dim);
        for ((m1, k1), c1) in self.terms.iter() {
            for ((m2, k2), c2) in o.terms.iter() {
                if let Some(sign) = merge_sign(*m1, *m2) {
                    let mode: Mode = k1.iter().zip(k2.iter()).map(|(a, b)| a + b).collect();
                    let c = c1.mul(c2).mul_rat(&rint(sign));
                    out.add_term(m1 | m2, mode, c);
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative: d(e_k dx_I) = sum_j tau k_j e_k dx_j ^ dx_I.
    pub fn ext_d(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for ((mask, mode), c) in self.terms.iter() {
            for j in 0..self.dim {
                if mode[j] == 0 {
                    continue;
                }
                let bit = 1u32 << j;
                if let Some(sign) = merge_sign(bit, *mask) {
                    let coeff = c
                        .mul(&Scalar::tau())
                        .mul_rat(&rint(mode[j] * sign));
                    out.add_term(bit | mask, mode.clone(), coeff);
                }
            }
        }
        out
    }

    /// Interior product with a constant vector field.
    pub fn contract(&self, v: &TangentVector) -> Self {
        assert_eq!(v.components.len(), self.dim);
        let mut out = Self::zero(self.dim);
        for ((mask, mode), c) in self.terms.iter() {
            let mut pos = 0i64; // number of indices of I before the removed one
            for j in 0..self.dim {
                let bit = 1u32 << j;
                if mask & bit == 0 {
                    continue;
                }
                if !v.components[j].is_zero() {
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    let coeff = c.mul_rat(&(v.components[j].clone() * rint(sign)));
                    out.add_term(mask & !bit, mode.clone(), coeff);
                }
                pos += 1;
            }
        }
        out
    }

    /// Pullback along an affine map.
    pub fn pullback(&self, f: &AffineMap) -> Self {
        assert_eq!(f.dim(), self.dim);
        let n = self.dim;
        let mut out = Self::zero(n);
        for ((mask, mode), c) in self.terms.iter() {
            // e_k -> phase * e_{A k}
            let mut new_mode = vec![0i64; n];
            for i in 0..n {
                let mut acc = 0i64;
                for j in 0..n {
                    acc += f.a[i][j] * mode[j];
                }
                new_mode[i] = acc;
            }
            let mut kb = Rat::zero();
            for j in 0..n {
                kb += f.b[j].clone() * rint(mode[j]);
            }
            let phase = f.phase(&kb);
            // dx_I -> wedge of columns of A
            let mut pulled = Self::term(n, c.mul_cyclo(&phase), new_mode, 0);
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let mut col = Self::zero(n);
                for i in 0..n {
                    if f.a[i][j] != 0 {
                        col.add_term(1 << i, vec![0; n], Scalar::from_int(f.a[i][j]));
                    }
                }
                pulled = pulled.wedge(&col).expect("same dim");
            }
            out = out.add(&pulled);
        }
        out
    }

    /// Integral over the torus of the top-degree part (volume normalized
    /// to 1): the zero-mode coefficient of dx_1...dx_n.  Lower-degree and
    /// nonzero-mode terms contribute zero.
    pub fn integrate_top(&self) -> Scalar {
        let full: u32 = if self.dim == 0 { 0 } else { (1u32 << self.dim) - 1 };
        let key = (full, vec![0i64; self.dim]);
        self.terms.get(&key).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of a given term key.
    pub fn coeff(&self, mask: u32, mode: &[i64]) -> Scalar {
        self.terms
            .get(&(mask, mode.to_vec()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Largest |k_i| over all modes, for band bookkeeping.
    pub fn band(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|(_, k)| k.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// Canonical line-per-term text form: `coef * e[k1,k2] * dx{1,2}`.
impl fmt::Display for TorusForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((mask, mode), c) in self.terms.iter() {
            if !first {
                writeln!(f)?;
            }
            first = false;
            let ks: Vec<String> = mode.iter().map(|k| k.to_string()).collect();
            write!(f, "({}) * e[{}]", c, ks.join(","))?;
            if *mask != 0 {
                let idx: Vec<String> = (0..self.dim)
                    .filter(|j| mask & (1 << j) != 0)
                    .map(|j| (j + 1).to_string())
                    .collect();
                write!(f, " * dx{{{}}}", idx.join(","))?;
            }
        }
        Ok(())
    }
}

/// A constant vector field on the torus (enough for translation actions).
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub components: Vec<Rat>,
}

impl TangentVector {
    pub fn new(components: Vec<Rat>) -> Self {
        TangentVector { components }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        TangentVector {
            components: v.iter().map(|x| rint(*x)).collect(),
        }
    }
}

/// Affine torus map x -> x A + b acting on row vectors, with A in GL(n, Z),
/// det A = +1, and b in (1/N) Z^n.  Translation phases are exact N-th roots
/// of unity, so `conductor` fixes the field the phases land in.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub a: Vec<Vec<i64>>, // row-major n x n
    pub b: Vec<Rat>,
    pub conductor: u32,
}

fn det_i64(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    match n {
        0 => 1,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            let mut d = 0i64;
            for j in 0..n {
                let minor: Vec<Vec<i64>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                d += s * a[0][j] * det_i64(&minor);
            }
            d
        }
    }
}

impl AffineMap {
    pub fn new(a: Vec<Vec<i64>>, b: Vec<Rat>, conductor: u32) -> Result<Self, Error> {
        let n = a.len();
        for row in &a {
            if row.len() != n {
                return Err(Error::Validation("affine matrix is not square".into()));
            }
        }
        if b.len() != n {
            return Err(Error::Validation("translation length mismatch".into()));
        }
        if det_i64(&a) != 1 {
            return Err(Error::NonInvertible(
                "affine matrix must have determinant +1".into(),
            ));
        }
        for x in &b {
            let scaled = x.clone() * rint(conductor as i64);
            if !scaled.is_integer() {
                return Err(Error::Validation(format!(
                    "translation {} is not in (1/{})Z",
                    x, conductor
                )));
            }
        }
        Ok(AffineMap { a, b, conductor })
    }

    pub fn identity(n: usize, conductor: u32) -> Self {
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1;
        }
        AffineMap {
            a,
            b: vec![Rat::zero(); n],
            conductor,
        }
    }

    pub fn translation(b: Vec<Rat>, conductor: u32) -> Result<Self, Error> {
        let n = b.len();
        Self::new(Self::identity(n, conductor).a, b, conductor)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// zeta_N^{N * t} for a rational t with N t integral.
    fn phase(&self, t: &Rat) -> Cyclotomic {
        let scaled = t.clone() * rint(self.conductor as i64);
        debug_assert!(scaled.is_integer());
        let e: i64 = (scaled.numer() % num_bigint::BigInt::from(i64::MAX))
            .try_into()
            .expect("phase exponent fits i64");
        Cyclotomic::zeta_pow(self.conductor, e)
    }

    /// Composition (self after other): x -> self(other(x)).
    pub fn compose_after(&self, other: &AffineMap) -> AffineMap {
        let n = self.dim();
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0i64;
                for k in 0..n {
                    acc += other.a[i][k] * self.a[k][j];
                }
                a[i][j] = acc;
            }
        }
        let mut b = vec![Rat::zero(); n];
        for j in 0..n {
            let mut acc = self.b[j].clone();
            for k in 0..n {
                acc += other.b[k].clone() * rint(self.a[k][j]);
            }
            b[j] = acc;
        }
        AffineMap {
            a,
            b,
            conductor: num_integer::lcm(self.conductor, other.conductor),
        }
    }
}
