//! Exact coefficient arithmetic.
//!
//! Everything downstream is linear over [`Scalar`]: a polynomial in the
//! formal symbol `tau` (standing for 2*pi*i, never evaluated numerically)
//! with coefficients in a cyclotomic field Q(zeta_N).  Keeping 2*pi*i
//! formal lets exterior derivatives of Fourier modes stay exact, so every
//! identity check in the crate is an equality test in this ring.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;
use std::sync::OnceLock;

use crate::Error;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rat::from_integer(acc)
}

fn euler_phi(n: u32) -> u32 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

// ---------------------------------------------------------------------------
// dense univariate polynomials over Rat (little-endian), used only to build
// and reduce by cyclotomic polynomials

fn poly_trim(p: &mut Vec<Rat>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo `m` (m monic-ish: leading coefficient invertible).
fn poly_rem(a: &[Rat], m: &[Rat]) -> Vec<Rat> {
    let mut r: Vec<Rat> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead = m.last().unwrap().clone();
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r.last().unwrap() / &lead;
        for i in 0..=dm {
            let v = &m[i] * &c;
            r[dr - dm + i] -= v;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Exact division `a / b`, panics if not divisible (used on x^n - 1 factors).
fn poly_divexact(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r: Vec<Rat> = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead = b.last().unwrap().clone();
    let mut q = vec![Rat::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r.last().unwrap() / &lead;
        q[dr - db] = c.clone();
        for i in 0..=db {
            let v = &b[i] * &c;
            r[dr - db + i] -= v;
        }
        poly_trim(&mut r);
    }
    assert!(r.is_empty(), "polynomial division was not exact");
    q
}

/// Extended gcd over Q[x]: returns (g, s) with s*a = g mod m and g = gcd(a, m).
fn poly_half_xgcd(a: &[Rat], m: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0: Vec<Rat> = m.to_vec();
    let mut r1: Vec<Rat> = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Vec<Rat> = Vec::new();
    let mut s1: Vec<Rat> = vec![Rat::one()];
    while !r1.is_empty() {
        // quotient of r0 by r1
        let mut q = vec![Rat::zero(); r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let d1 = r1.len() - 1;
        let lead = r1.last().unwrap().clone();
        while rem.len() > d1 || (rem.len() == r1.len()) {
            if rem.is_empty() || rem.len() < r1.len() {
                break;
            }
            let dr = rem.len() - 1;
            let c = rem.last().unwrap() / &lead;
            q[dr - d1] = c.clone();
            for i in 0..=d1 {
                let v = &r1[i] * &c;
                rem[dr - d1 + i] -= v;
            }
            poly_trim(&mut rem);
        }
        poly_trim(&mut q);
        // (r0, r1) <- (r1, r0 - q r1); (s0, s1) likewise
        let qr = poly_mul(&q, &r1);
        let mut new_r = r0.clone();
        new_r.resize(new_r.len().max(qr.len()), Rat::zero());
        for (i, c) in qr.iter().enumerate() {
            new_r[i] -= c;
        }
        poly_trim(&mut new_r);
        let qs = poly_mul(&q, &s1);
        let mut new_s = s0.clone();
        new_s.resize(new_s.len().max(qs.len()), Rat::zero());
        for (i, c) in qs.iter().enumerate() {
            new_s[i] -= c;
        }
        poly_trim(&mut new_s);
        r0 = std::mem::replace(&mut r1, new_r);
        s0 = std::mem::replace(&mut s1, new_s);
    }
    (r0, s0)
}

/// The n-th cyclotomic polynomial, memoized.
fn cyclotomic_poly(n: u32) -> Vec<Rat> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, Vec<Rat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = if n == 1 {
        vec![-Rat::one(), Rat::one()]
    } else {
        // (x^n - 1) / prod_{d | n, d < n} Phi_d
        let mut num = vec![Rat::zero(); n as usize + 1];
        num[0] = -Rat::one();
        num[n as usize] = Rat::one();
        let mut den = vec![Rat::one()];
        for d in 1..n {
            if n % d == 0 {
                den = poly_mul(&den, &cyclotomic_poly(d));
            }
        }
        poly_divexact(&num, &den)
    };
    cache.lock().unwrap().insert(n, p.clone());
    p
}

// ---------------------------------------------------------------------------

/// An element of Q(zeta_N), stored as rational coordinates of
/// zeta^0 .. zeta^{phi(N)-1} reduced modulo the N-th cyclotomic polynomial.
/// The representation is canonical for a fixed conductor; mixed-conductor
/// arithmetic embeds both sides into Q(zeta_lcm).
#[derive(Clone, Debug)]
pub struct Cyclotomic {
    n: u32,
    c: Vec<Rat>, // length phi(n)
}

impl Cyclotomic {
    pub fn zero(n: u32) -> Self {
        assert!(n >= 1);
        Cyclotomic {
            n,
            c: vec![Rat::zero(); euler_phi(n) as usize],
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rat(n, Rat::one())
    }

    pub fn from_rat(n: u32, r: Rat) -> Self {
        let mut z = Self::zero(n);
        z.c[0] = r;
        z
    }

    pub fn from_int(n: u32, v: i64) -> Self {
        Self::from_rat(n, rint(v))
    }

    /// zeta_N^j
    pub fn zeta_pow(n: u32, j: i64) -> Self {
        let jj = j.rem_euclid(n as i64) as usize;
        let mut poly = vec![Rat::zero(); jj + 1];
        poly[jj] = Rat::one();
        Self::from_poly(n, poly)
    }

    fn from_poly(n: u32, poly: Vec<Rat>) -> Self {
        let phi = euler_phi(n) as usize;
        let red = poly_rem(&poly, &cyclotomic_poly(n));
        let mut c = red;
        c.resize(phi, Rat::zero());
        Cyclotomic { n, c }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The rational part, if the value lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    /// Embed into Q(zeta_m); requires self.n | m.
    pub fn embed(&self, m: u32) -> Self {
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        if m == self.n {
            return self.clone();
        }
        let k = (m / self.n) as usize;
        let mut poly = vec![Rat::zero(); (self.c.len() - 1) * k + 1];
        for (i, ci) in self.c.iter().enumerate() {
            if !ci.is_zero() {
                poly[i * k] = ci.clone();
            }
        }
        Self::from_poly(m, poly)
    }

    fn unify(a: &Self, b: &Self) -> (Self, Self) {
        if a.n == b.n {
            (a.clone(), b.clone())
        } else {
            let l = num_integer::lcm(a.n, b.n);
            (a.embed(l), b.embed(l))
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let (mut a, b) = Self::unify(self, o);
        for (x, y) in a.c.iter_mut().zip(b.c.iter()) {
            *x += y;
        }
        a
    }

    pub fn neg(&self) -> Self {
        let mut a = self.clone();
        for x in a.c.iter_mut() {
            *x = -x.clone();
        }
        a
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = Self::unify(self, o);
        Self::from_poly(a.n, poly_mul(&a.c, &b.c))
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        let mut a = self.clone();
        for x in a.c.iter_mut() {
            *x *= r;
        }
        a
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (g, s) = poly_half_xgcd(&self.c, &cyclotomic_poly(self.n));
        // Phi_n is irreducible over Q, so g is a nonzero constant.
        debug_assert_eq!(g.len(), 1);
        let ginv = Rat::one() / g[0].clone();
        let mut sv = s;
        for x in sv.iter_mut() {
            *x *= &ginv;
        }
        Ok(Self::from_poly(self.n, sv))
    }

    pub fn div(&self, o: &Self) -> Result<Self, Error> {
        let (a, b) = Self::unify(self, o);
        Ok(a.mul(&b.inv()?))
    }

    /// Galois substitution zeta -> zeta^k for gcd(k, N) = 1.
    /// With k = -1 this is complex conjugation.
    pub fn galois(&self, k: i64) -> Self {
        let kk = k.rem_euclid(self.n as i64) as u32;
        assert_eq!(num_integer::gcd(kk, self.n), 1, "galois exponent must be a unit");
        let mut poly = vec![Rat::zero(); ((self.c.len() as u32 - 1) * kk + 1).max(1) as usize];
        for (i, ci) in self.c.iter().enumerate() {
            if !ci.is_zero() {
                let e = (i as u32 * kk % self.n) as usize;
                if poly.len() <= e {
                    poly.resize(e + 1, Rat::zero());
                }
                poly[e] += ci;
            }
        }
        Self::from_poly(self.n, poly)
    }

    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    /// Coefficient list in the reduced basis (for serialization).
    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::unify(self, other);
        a.c == b.c
    }
}
impl Eq for Cyclotomic {}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, ci) in self.c.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 {
                write!(f, "({})", fmt_rat(ci))?;
            } else {
                write!(f, "({})*z{}^{}", fmt_rat(ci), self.n, i)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------

/// Polynomial in the formal symbol `tau` (= 2*pi*i) over a cyclotomic field.
/// Canonical form: no zero coefficients are stored; zero is the empty map.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Scalar {
    terms: BTreeMap<u32, Cyclotomic>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_cyclo(c: Cyclotomic) -> Self {
        let mut s = Self::zero();
        if !c.is_zero() {
            s.terms.insert(0, c);
        }
        s
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_cyclo(Cyclotomic::from_rat(1, r))
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rat(rint(v))
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// c * tau^d
    pub fn tau_pow(c: Cyclotomic, d: u32) -> Self {
        let mut s = Self::zero();
        if !c.is_zero() {
            s.terms.insert(d, c);
        }
        s
    }

    pub fn tau() -> Self {
        Self::tau_pow(Cyclotomic::one(1), 1)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in o.terms.iter() {
            let entry = out
                .terms
                .entry(*d)
                .or_insert_with(|| Cyclotomic::zero(c.conductor()));
            *entry = entry.add(c);
            if entry.is_zero() {
                out.terms.remove(d);
            }
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

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (d1, c1) in self.terms.iter() {
            for (d2, c2) in o.terms.iter() {
                let d = d1 + d2;
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let entry = out
                    .terms
                    .entry(d)
                    .or_insert_with(|| Cyclotomic::zero(c.conductor()));
                *entry = entry.add(&c);
                if entry.is_zero() {
                    out.terms.remove(&d);
                }
            }
        }
        out
    }

    pub fn mul_rat(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.mul_rat(r);
        }
        out
    }

    pub fn mul_cyclo(&self, k: &Cyclotomic) -> Self {
        self.mul(&Self::from_cyclo(k.clone()))
    }

    /// The coefficient of tau^d.
    pub fn coeff(&self, d: u32) -> Cyclotomic {
        self.terms
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Cyclotomic::zero(1))
    }

    pub fn tau_terms(&self) -> impl Iterator<Item = (&u32, &Cyclotomic)> {
        self.terms.iter()
    }

    /// Exact rational value, if the scalar is a plain rational (tau-free).
    pub fn as_rational(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            if let Some((0, c)) = self.terms.iter().next().map(|(d, c)| (*d, c)) {
                return c.as_rational();
            }
        }
        None
    }
}

/// Canonical text form, e.g. `(3/2)*z4^1*tau^2`.  Terms are sorted by
/// tau-degree, then by the zeta exponent; a zero value prints as `0`.
/// This format is stable and used in reports and golden files.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, c) in self.terms.iter() {
            for (i, ci) in c.coeffs().iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({})", fmt_rat(ci))?;
                if i > 0 {
                    write!(f, "*z{}^{}", c.conductor(), i)?;
                }
                if *d > 0 {
                    write!(f, "*tau^{}", d)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta4_squared_is_minus_one() {
        let z = Cyclotomic::zeta_pow(4, 1);
        assert_eq!(z.mul(&z), Cyclotomic::from_int(4, -1));
    }

    #[test]
    fn zeta_product_reduces() {
        // (1 + z4)(1 - z4) = 2
        let one = Cyclotomic::one(4);
        let z = Cyclotomic::zeta_pow(4, 1);
        let a = one.add(&z);
        let b = one.sub(&z);
        assert_eq!(a.mul(&b), Cyclotomic::from_int(4, 2));
    }

    #[test]
    fn zeta_div_self_is_one() {
        let z = Cyclotomic::zeta_pow(8, 1);
        assert_eq!(z.div(&z).unwrap(), Cyclotomic::one(8));
    }

    #[test]
    fn zeta_power_order() {
        for n in [1u32, 2, 3, 4, 6, 8, 12] {
            let z = Cyclotomic::zeta_pow(n, 1);
            let mut acc = Cyclotomic::one(n);
            for _ in 0..n {
                acc = acc.mul(&z);
            }
            assert_eq!(acc, Cyclotomic::one(n), "zeta_{}^{} != 1", n, n);
        }
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let z = Cyclotomic::zeta_pow(4, 1);
        assert!(matches!(
            z.div(&Cyclotomic::zero(4)),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn embedding_is_compatible() {
        // zeta_4 inside Q(zeta_12) is zeta_12^3
        let a = Cyclotomic::zeta_pow(4, 1).embed(12);
        assert_eq!(a, Cyclotomic::zeta_pow(12, 3));
        // equality across conductors
        assert_eq!(Cyclotomic::one(2), Cyclotomic::one(6));
    }

    #[test]
    fn tau_is_formal() {
        let t = Scalar::tau();
        assert_eq!(t.mul(&t), Scalar::tau_pow(Cyclotomic::one(1), 2));
        let x = Scalar::tau().mul_rat(&rint(2)).add(&Scalar::from_cyclo(Cyclotomic::zeta_pow(4, 1)));
        assert!(x.mul(&Scalar::zero()).is_zero());
        // (1 + tau)(1 - tau) = 1 - tau^2
        let one = Scalar::one();
        let p = one.add(&t).mul(&one.sub(&t));
        assert_eq!(p, one.sub(&t.mul(&t)));
    }

    #[test]
    fn display_is_canonical() {
        let s = Scalar::tau_pow(Cyclotomic::zeta_pow(4, 1).mul_rat(&rat(3, 2)), 2);
        assert_eq!(s.to_string(), "(3/2)*z4^1*tau^2");
        assert_eq!(Scalar::zero().to_string(), "0");
        let m = Scalar::from_rat(rat(-1, 3));
        assert_eq!(m.to_string(), "(-1/3)");
    }

    #[test]
    fn conjugation_inverts_unit_zetas() {
        let z = Cyclotomic::zeta_pow(8, 3);
        assert_eq!(z.mul(&z.conj()), Cyclotomic::one(8));
    }

    proptest::proptest! {
        #[test]
        fn ring_axioms(a0 in -3i64..4, a1 in -3i64..4, b0 in -3i64..4, b1 in -3i64..4, c0 in -3i64..4, c1 in -3i64..4) {
            let mk = |x: i64, y: i64| {
                Scalar::from_cyclo(Cyclotomic::from_int(4, x))
                    .add(&Scalar::tau_pow(Cyclotomic::zeta_pow(4, 1).mul_rat(&rint(y)), 1))
            };
            let a = mk(a0, a1);
            let b = mk(b0, b1);
            let c = mk(c0, c1);
            proptest::prop_assert_eq!(a.mul(&b), b.mul(&a));
            proptest::prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            proptest::prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        }

        #[test]
        fn embedding_commutes_with_arithmetic(x0 in -3i64..4, x1 in -3i64..4, y0 in -3i64..4, y1 in -3i64..4) {
            let a = Cyclotomic::from_int(4, x0).add(&Cyclotomic::zeta_pow(4, 1).mul_rat(&rint(x1)));
            let b = Cyclotomic::from_int(4, y0).add(&Cyclotomic::zeta_pow(4, 1).mul_rat(&rint(y1)));
            proptest::prop_assert_eq!(a.mul(&b).embed(12), a.embed(12).mul(&b.embed(12)));
            proptest::prop_assert_eq!(a.add(&b).embed(12), a.embed(12).add(&b.embed(12)));
        }
    }
}
