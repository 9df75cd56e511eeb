//! Groups acting on the torus and the convolution algebra C_c(G x M).
//!
//! Finite groups come as a multiplication table plus an affine action;
//! the circle R/Z acts by translation along an integer direction `v` and
//! is handled symbolically, as finite Fourier series in the group
//! parameter.  Haar measure is counting measure for finite groups (total
//! mass |G|) and the mass-1 measure for the circle; all formulas downstream
//! are implemented verbatim against this choice.

use std::collections::BTreeMap;

use crate::scalar::Scalar;
use crate::torus::{AffineMap, Mode, TorusForm};
use crate::Error;

pub type GrpElt = u8;

#[derive(Clone, Debug)]
pub enum GroupDesc {
    Finite {
        order: usize,
        mult: Vec<Vec<GrpElt>>,
        inv: Vec<GrpElt>,
        unit: GrpElt,
        action: Vec<AffineMap>,
        names: Vec<String>,
    },
    Circle {
        dim: usize,
        direction: Vec<i64>,
        conductor: u32,
    },
}

impl GroupDesc {
    pub fn finite(mult: Vec<Vec<GrpElt>>, action: Vec<AffineMap>, names: Vec<String>) -> Result<Self, Error> {
        let order = mult.len();
        if order == 0 {
            return Err(Error::Validation("empty multiplication table".into()));
        }
        for row in &mult {
            if row.len() != order || row.iter().any(|&x| x as usize >= order) {
                return Err(Error::Validation("malformed multiplication table".into()));
            }
        }
        // locate the unit
        let mut unit = None;
        'outer: for e in 0..order {
            for g in 0..order {
                if mult[e][g] != g as GrpElt || mult[g][e] != g as GrpElt {
                    continue 'outer;
                }
            }
            unit = Some(e as GrpElt);
            break;
        }
        let unit = unit.ok_or_else(|| Error::Validation("no unit element".into()))?;
        // associativity
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    let ab_c = mult[mult[a][b] as usize][c];
                    let a_bc = mult[a][mult[b][c] as usize];
                    if ab_c != a_bc {
                        return Err(Error::Validation("not associative".into()));
                    }
                }
            }
        }
        // inverses
        let mut inv = vec![0 as GrpElt; order];
        for g in 0..order {
            let mut found = None;
            for h in 0..order {
                if mult[g][h] == unit && mult[h][g] == unit {
                    found = Some(h as GrpElt);
                    break;
                }
            }
            inv[g] = found.ok_or_else(|| Error::Validation(format!("element {} has no inverse", g)))?;
        }
        if action.len() != order {
            return Err(Error::Validation("action table length mismatch".into()));
        }
        // action is a homomorphism g -> (x -> x A_g + b_g):
        // the map for gh is "first g, then h".
        for g in 0..order {
            for h in 0..order {
                let gh = mult[g][h] as usize;
                let composed = action[h].compose_after(&action[g]);
                let same_a = composed.a == action[gh].a;
                let same_b = composed
                    .b
                    .iter()
                    .zip(action[gh].b.iter())
                    .all(|(x, y)| (x.clone() - y.clone()).is_integer());
                if !same_a || !same_b {
                    return Err(Error::Validation(format!(
                        "action is not a homomorphism at ({}, {})",
                        g, h
                    )));
                }
            }
        }
        let names = if names.len() == order {
            names
        } else {
            (0..order).map(|i| format!("g{}", i)).collect()
        };
        Ok(GroupDesc::Finite {
            order,
            mult,
            inv,
            unit,
            action,
            names,
        })
    }

    pub fn circle(dim: usize, direction: Vec<i64>, conductor: u32) -> Result<Self, Error> {
        if direction.len() != dim {
            return Err(Error::Validation("circle direction length mismatch".into()));
        }
        Ok(GroupDesc::Circle {
            dim,
            direction,
            conductor,
        })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupDesc::Finite { .. })
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            GroupDesc::Finite { order, .. } => Some(*order),
            GroupDesc::Circle { .. } => None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroupDesc::Finite { action, .. } => action[0].dim(),
            GroupDesc::Circle { dim, .. } => *dim,
        }
    }

    pub fn unit(&self) -> GrpElt {
        match self {
            GroupDesc::Finite { unit, .. } => *unit,
            GroupDesc::Circle { .. } => 0,
        }
    }

    pub fn mul(&self, a: GrpElt, b: GrpElt) -> GrpElt {
        match self {
            GroupDesc::Finite { mult, .. } => mult[a as usize][b as usize],
            GroupDesc::Circle { .. } => panic!("circle elements are symbolic"),
        }
    }

    pub fn inv(&self, a: GrpElt) -> GrpElt {
        match self {
            GroupDesc::Finite { inv, .. } => inv[a as usize],
            GroupDesc::Circle { .. } => panic!("circle elements are symbolic"),
        }
    }

    pub fn elements(&self) -> Vec<GrpElt> {
        match self {
            GroupDesc::Finite { order, .. } => (0..*order as GrpElt).collect(),
            GroupDesc::Circle { .. } => panic!("circle elements are symbolic"),
        }
    }

    pub fn name(&self, g: GrpElt) -> String {
        match self {
            GroupDesc::Finite { names, .. } => names[g as usize].clone(),
            GroupDesc::Circle { .. } => "g".into(),
        }
    }

    pub fn product(&self, gs: &[GrpElt]) -> GrpElt {
        let mut acc = self.unit();
        for &g in gs {
            acc = self.mul(acc, g);
        }
        acc
    }

    /// Pullback action of a finite-group element on a scalar form.
    pub fn act(&self, g: GrpElt, f: &TorusForm) -> TorusForm {
        match self {
            GroupDesc::Finite { action, .. } => f.pullback(&action[g as usize]),
            GroupDesc::Circle { .. } => panic!("use act_circle for the symbolic circle action"),
        }
    }

    /// Circle action with a symbolic group parameter: each Fourier term of
    /// `f` with torus mode k picks up the group mode k.v.  Returns a finite
    /// Fourier series in the group parameter.
    pub fn act_circle(&self, f: &TorusForm) -> CircleFun<TorusForm> {
        match self {
            GroupDesc::Circle { direction, .. } => {
                let mut out: BTreeMap<i64, TorusForm> = BTreeMap::new();
                for ((mask, mode), c) in f.terms() {
                    let m: i64 = mode.iter().zip(direction.iter()).map(|(k, v)| k * v).sum();
                    out.entry(m)
                        .or_insert_with(|| TorusForm::zero(f.dim()))
                        .add_term(*mask, mode.clone(), c.clone());
                }
                out.retain(|_, v| !v.is_zero());
                CircleFun { coeffs: out }
            }
            GroupDesc::Finite { .. } => panic!("act_circle needs the circle group"),
        }
    }

    /// The direction vector of the circle action, as the constant field X_M
    /// generated by the Lie algebra basis vector.
    pub fn circle_direction(&self) -> Option<&[i64]> {
        match self {
            GroupDesc::Circle { direction, .. } => Some(direction),
            GroupDesc::Finite { .. } => None,
        }
    }
}

/// A finite Fourier series in the circle parameter with arbitrary payload.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFun<P> {
    pub coeffs: BTreeMap<i64, P>,
}

/// A finitely supported function on the group with payload values:
/// point masses for finite groups, Fourier coefficients for the circle.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupFun<P> {
    Finite(BTreeMap<GrpElt, P>),
    Circle(BTreeMap<i64, P>),
}

impl<P: Clone> GroupFun<P> {
    pub fn empty_like(g: &GroupDesc) -> Self {
        match g {
            GroupDesc::Finite { .. } => GroupFun::Finite(BTreeMap::new()),
            GroupDesc::Circle { .. } => GroupFun::Circle(BTreeMap::new()),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            GroupFun::Finite(m) => m.is_empty(),
            GroupFun::Circle(m) => m.is_empty(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            GroupFun::Finite(m) => m.len(),
            GroupFun::Circle(m) => m.len(),
        }
    }
}

/// An element of the convolution algebra C_c(G x M) (0-form payloads),
/// together with a formal multiple of the adjoined unit delta_e.  The
/// adjoined-unit scalar is tracked separately and never folded into the
/// smooth part.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElem {
    pub unit: Scalar,
    pub fun: GroupFun<TorusForm>,
}

impl AlgebraElem {
    pub fn zero(g: &GroupDesc) -> Self {
        AlgebraElem {
            unit: Scalar::zero(),
            fun: GroupFun::empty_like(g),
        }
    }

    pub fn adjoined_unit(g: &GroupDesc) -> Self {
        AlgebraElem {
            unit: Scalar::one(),
            fun: GroupFun::empty_like(g),
        }
    }

    /// Basis element 1_g (x) e_k for a finite group.
    pub fn basis_finite(g: &GroupDesc, at: GrpElt, mode: Mode) -> Self {
        let mut m = BTreeMap::new();
        m.insert(at, TorusForm::mode(g.dim(), mode));
        AlgebraElem {
            unit: Scalar::zero(),
            fun: GroupFun::Finite(m),
        }
    }

    /// Basis element e^{tau m g} (x) e_k for the circle.
    pub fn basis_circle(g: &GroupDesc, gmode: i64, mode: Mode) -> Self {
        let mut m = BTreeMap::new();
        m.insert(gmode, TorusForm::mode(g.dim(), mode));
        AlgebraElem {
            unit: Scalar::zero(),
            fun: GroupFun::Circle(m),
        }
    }

    pub fn from_payload_finite(parts: Vec<(GrpElt, TorusForm)>) -> Self {
        let mut m: BTreeMap<GrpElt, TorusForm> = BTreeMap::new();
        for (g, f) in parts {
            if f.is_zero() {
                continue;
            }
            match m.get_mut(&g) {
                Some(existing) => *existing = existing.add(&f),
                None => {
                    m.insert(g, f);
                }
            }
        }
        m.retain(|_, v| !v.is_zero());
        AlgebraElem {
            unit: Scalar::zero(),
            fun: GroupFun::Finite(m),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.fun.is_empty()
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let fun = match &self.fun {
            GroupFun::Finite(m) => GroupFun::Finite(
                m.iter()
                    .map(|(g, f)| (*g, f.scale(s)))
                    .filter(|(_, f)| !f.is_zero())
                    .collect(),
            ),
            GroupFun::Circle(m) => GroupFun::Circle(
                m.iter()
                    .map(|(g, f)| (*g, f.scale(s)))
                    .filter(|(_, f)| !f.is_zero())
                    .collect(),
            ),
        };
        AlgebraElem {
            unit: self.unit.mul(s),
            fun,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let fun = match (&self.fun, &o.fun) {
            (GroupFun::Finite(a), GroupFun::Finite(b)) => {
                let mut m = a.clone();
                for (g, f) in b.iter() {
                    match m.get_mut(g) {
                        Some(existing) => *existing = existing.add(f),
                        None => {
                            m.insert(*g, f.clone());
                        }
                    }
                }
                m.retain(|_, v| !v.is_zero());
                GroupFun::Finite(m)
            }
            (GroupFun::Circle(a), GroupFun::Circle(b)) => {
                let mut m = a.clone();
                for (g, f) in b.iter() {
                    match m.get_mut(g) {
                        Some(existing) => *existing = existing.add(f),
                        None => {
                            m.insert(*g, f.clone());
                        }
                    }
                }
                m.retain(|_, v| !v.is_zero());
                GroupFun::Circle(m)
            }
            _ => panic!("mixed group kinds"),
        };
        AlgebraElem {
            unit: self.unit.add(&o.unit),
            fun,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Value at a finite-group element (smooth part only).
    pub fn value_at(&self, g: GrpElt, dim: usize) -> TorusForm {
        match &self.fun {
            GroupFun::Finite(m) => m.get(&g).cloned().unwrap_or_else(|| TorusForm::zero(dim)),
            GroupFun::Circle(_) => panic!("value_at needs a finite group"),
        }
    }
}

/// Haar integral of a group function: counting-measure sum for finite
/// groups, zero-Fourier-mode extraction for the circle.
pub fn haar_integrate(g: &GroupDesc, f: &GroupFun<TorusForm>) -> TorusForm {
    let dim = g.dim();
    match f {
        GroupFun::Finite(m) => {
            let mut acc = TorusForm::zero(dim);
            for v in m.values() {
                acc = acc.add(v);
            }
            acc
        }
        GroupFun::Circle(m) => m.get(&0).cloned().unwrap_or_else(|| TorusForm::zero(dim)),
    }
}

/// Convolution product on the unital extension of C_c(G x M).
pub fn convolve(g: &GroupDesc, a: &AlgebraElem, b: &AlgebraElem) -> Result<AlgebraElem, Error> {
    let dim = g.dim();
    let mut out = AlgebraElem::zero(g);
    out.unit = a.unit.mul(&b.unit);
    // unit * smooth parts
    match (&a.fun, &b.fun, &mut out.fun) {
        (GroupFun::Finite(ma), GroupFun::Finite(mb), GroupFun::Finite(mo)) => {
            for (h, f) in mb.iter() {
                if !a.unit.is_zero() {
                    insert_form(mo, *h, f.scale(&a.unit));
                }
            }
            for (h, f) in ma.iter() {
                if !b.unit.is_zero() {
                    insert_form(mo, *h, f.scale(&b.unit));
                }
            }
            // (f1 * f2)(x, g) = sum_h f1(x, h) f2(x h, h^{-1} g); substituting
            // g = h k this adds f1(h) . h^* f2(k) at the point h k.
            for (h, f1) in ma.iter() {
                for (k, f2) in mb.iter() {
                    let target = g.mul(*h, *k);
                    let prod = f1.wedge(&g.act(*h, f2))?;
                    insert_form(mo, target, prod);
                }
            }
        }
        (GroupFun::Circle(ma), GroupFun::Circle(mb), GroupFun::Circle(mo)) => {
            for (m, f) in mb.iter() {
                if !a.unit.is_zero() {
                    insert_mode(mo, *m, f.scale(&a.unit));
                }
            }
            for (m, f) in ma.iter() {
                if !b.unit.is_zero() {
                    insert_mode(mo, *m, f.scale(&b.unit));
                }
            }
            // (f1 * f2)(g) = int f1(h) h^* f2(g - h) dh: writing f2 with group
            // mode m2 and torus mode k2, the transported term carries group
            // mode m2 + k2.v in h, and only the h-mode-0 part survives, i.e.
            // m1 + k2.v - m2 = 0, landing at g-mode m2.
            let dir = g.circle_direction().unwrap();
            for (m1, f1) in ma.iter() {
                for (m2, f2) in mb.iter() {
                    for ((mask2, k2), c2) in f2.terms() {
                        let kv: i64 = k2.iter().zip(dir.iter()).map(|(k, v)| k * v).sum();
                        if m1 + kv - m2 != 0 {
                            continue;
                        }
                        let t2 = TorusForm::term(dim, c2.clone(), k2.clone(), *mask2);
                        let prod = f1.wedge(&t2)?;
                        insert_mode(mo, *m2, prod);
                    }
                }
            }
        }
        _ => {
            return Err(Error::GroupMismatch(
                "convolution of elements over different groups".into(),
            ))
        }
    }
    normalize(&mut out);
    Ok(out)
}

fn insert_form(m: &mut BTreeMap<GrpElt, TorusForm>, g: GrpElt, f: TorusForm) {
    if f.is_zero() {
        return;
    }
    match m.get_mut(&g) {
        Some(existing) => *existing = existing.add(&f),
        None => {
            m.insert(g, f);
        }
    }
}

fn insert_mode(m: &mut BTreeMap<i64, TorusForm>, g: i64, f: TorusForm) {
    if f.is_zero() {
        return;
    }
    match m.get_mut(&g) {
        Some(existing) => *existing = existing.add(&f),
        None => {
            m.insert(g, f);
        }
    }
}

fn normalize(a: &mut AlgebraElem) {
    match &mut a.fun {
        GroupFun::Finite(m) => m.retain(|_, v| !v.is_zero()),
        GroupFun::Circle(m) => m.retain(|_, v| !v.is_zero()),
    }
}

// ---------------------------------------------------------------------------
// group presets used by scenarios and tests

/// Z/m generated by an affine map; the map for the generator must have
/// order m.
pub fn cyclic_group(m: usize, generator: AffineMap) -> Result<GroupDesc, Error> {
    let mut mult = vec![vec![0 as GrpElt; m]; m];
    for (a, row) in mult.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = ((a + b) % m) as GrpElt;
        }
    }
    let n = generator.dim();
    let conductor = generator.conductor;
    let mut action = Vec::with_capacity(m);
    let mut acc = AffineMap::identity(n, conductor);
    for _ in 0..m {
        action.push(acc.clone());
        // next power: x -> acc(x) then generator
        acc = generator.compose_after(&acc);
    }
    // order check: acc = generator^m must be the identity modulo Z^n
    let id = AffineMap::identity(n, conductor);
    if acc.a != id.a || !acc.b.iter().all(|x| x.is_integer()) {
        return Err(Error::Validation(format!(
            "generator does not have order {}",
            m
        )));
    }
    let names = (0..m).map(|i| format!("g^{}", i)).collect();
    GroupDesc::finite(mult, action, names)
}

pub fn trivial_group(n: usize, conductor: u32) -> GroupDesc {
    cyclic_group(1, AffineMap::identity(n, conductor)).expect("trivial group is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};
    use num_traits::Zero;

    fn z2_translation() -> GroupDesc {
        let gen = AffineMap::translation(vec![rat(1, 2), Rat::zero()], 4).unwrap();
        cyclic_group(2, gen).unwrap()
    }

    fn z4_rotation() -> GroupDesc {
        let gen = AffineMap::new(vec![vec![0, -1], vec![1, 0]], vec![Rat::zero(); 2], 4).unwrap();
        cyclic_group(4, gen).unwrap()
    }

    fn circle2() -> GroupDesc {
        GroupDesc::circle(2, vec![1, 0], 4).unwrap()
    }

    #[test]
    fn finite_haar_is_counting() {
        let g = z2_translation();
        let mut m = BTreeMap::new();
        for e in g.elements() {
            m.insert(e, TorusForm::constant(2, Scalar::from_int(3)));
        }
        let total = haar_integrate(&g, &GroupFun::Finite(m));
        assert_eq!(total, TorusForm::constant(2, Scalar::from_int(6)));
    }

    #[test]
    fn circle_haar_extracts_zero_mode() {
        let g = circle2();
        let w = TorusForm::mode(2, vec![0, 1]);
        let mut m = BTreeMap::new();
        m.insert(3i64, w.clone());
        assert!(haar_integrate(&g, &GroupFun::Circle(m.clone())).is_zero());
        m.insert(0, w.clone());
        assert_eq!(haar_integrate(&g, &GroupFun::Circle(m)), w);
    }

    #[test]
    fn action_homomorphism_and_rotation() {
        let g = z4_rotation();
        let e10 = TorusForm::mode(2, vec![1, 0]);
        // unit acts as identity
        assert_eq!(g.act(g.unit(), &e10), e10);
        // generator sends e_{(1,0)} to e_{(0,1)}
        assert_eq!(g.act(1, &e10), TorusForm::mode(2, vec![0, 1]));
        // act(gh) = act(g) . act(h)
        let f = TorusForm::mode(2, vec![1, -1]).wedge(&TorusForm::dx(2, 1)).unwrap();
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(g.act(g.mul(a, b), &f), g.act(a, &g.act(b, &f)));
            }
        }
    }

    #[test]
    fn circle_action_is_translation_phase() {
        let g = circle2();
        let e10 = TorusForm::mode(2, vec![1, 0]);
        let acted = g.act_circle(&e10);
        // e^{tau g} e_{(1,0)}
        assert_eq!(acted.coeffs.len(), 1);
        assert_eq!(acted.coeffs.get(&1), Some(&e10));
    }

    #[test]
    fn convolution_unit_and_z2() {
        let g = z2_translation();
        let one = AlgebraElem::adjoined_unit(&g);
        let a = AlgebraElem::basis_finite(&g, 1, vec![1, 0]);
        assert_eq!(convolve(&g, &a, &one).unwrap(), a);
        assert_eq!(convolve(&g, &one, &a).unwrap(), a);
        // 1_s f * 1_s h is supported at e with value f . (s^* h)
        let f = TorusForm::mode(2, vec![1, 0]);
        let h = TorusForm::mode(2, vec![0, 1]);
        let x = AlgebraElem::from_payload_finite(vec![(1, f.clone())]);
        let y = AlgebraElem::from_payload_finite(vec![(1, h.clone())]);
        let p = convolve(&g, &x, &y).unwrap();
        let expect = AlgebraElem::from_payload_finite(vec![(0, f.wedge(&g.act(1, &h)).unwrap())]);
        assert_eq!(p, expect);
    }

    #[test]
    fn convolution_circle_mode_bookkeeping() {
        let g = circle2();
        // brute-force oracle over a small set of mode pairs: the convolution
        // survives exactly when m1 + k2.v - m2 = 0
        for m1 in -1..=1i64 {
            for m2 in -1..=1i64 {
                for k2x in -1..=1i64 {
                    let a = AlgebraElem::basis_circle(&g, m1, vec![0, 1]);
                    let b = AlgebraElem::basis_circle(&g, m2, vec![k2x, 0]);
                    let p = convolve(&g, &a, &b).unwrap();
                    let survives = m1 + k2x - m2 == 0;
                    assert_eq!(!p.is_zero(), survives, "m1={} m2={} k2x={}", m1, m2, k2x);
                    if survives {
                        let expect = AlgebraElem::basis_circle(&g, m2, vec![k2x, 1]);
                        assert_eq!(p, expect);
                    }
                }
            }
        }
    }

    #[test]
    fn convolution_associative() {
        let g = z4_rotation();
        let a = AlgebraElem::basis_finite(&g, 1, vec![1, 0]);
        let b = AlgebraElem::basis_finite(&g, 2, vec![0, 1])
            .add(&AlgebraElem::adjoined_unit(&g).scale(&Scalar::from_int(2)));
        let c = AlgebraElem::basis_finite(&g, 3, vec![-1, 1]);
        let ab_c = convolve(&g, &convolve(&g, &a, &b).unwrap(), &c).unwrap();
        let a_bc = convolve(&g, &a, &convolve(&g, &b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);

        let gc = circle2();
        let a = AlgebraElem::basis_circle(&gc, 1, vec![1, 0]);
        let b = AlgebraElem::basis_circle(&gc, 0, vec![-1, 1]);
        let c = AlgebraElem::basis_circle(&gc, -1, vec![0, -1]);
        let ab_c = convolve(&gc, &convolve(&gc, &a, &b).unwrap(), &c).unwrap();
        let a_bc = convolve(&gc, &a, &convolve(&gc, &b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn unimodularity_substitution() {
        // counting measure: sum over g of f(g^{-1}) = sum over g of f(g)
        let g = z4_rotation();
        let f = |e: GrpElt| TorusForm::mode(2, vec![e as i64, 1]);
        let lhs: TorusForm = g
            .elements()
            .iter()
            .fold(TorusForm::zero(2), |acc, &e| acc.add(&f(g.inv(e))));
        let rhs: TorusForm = g
            .elements()
            .iter()
            .fold(TorusForm::zero(2), |acc, &e| acc.add(&f(e)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn integration_action_invariance() {
        let g = z4_rotation();
        let top = TorusForm::mode(2, vec![1, 1])
            .wedge(&TorusForm::dx(2, 1))
            .unwrap()
            .wedge(&TorusForm::dx(2, 2))
            .unwrap()
            .add(&TorusForm::dx(2, 1).wedge(&TorusForm::dx(2, 2)).unwrap());
        for e in g.elements() {
            assert_eq!(g.act(e, &top).integrate_top(), top.integrate_top());
        }
    }

    #[test]
    fn bad_mult_table_rejected() {
        // 2x2 table that is not associative / has no unit
        let mult = vec![vec![1, 1], vec![1, 1]];
        let id = AffineMap::identity(2, 4);
        let r = GroupDesc::finite(mult, vec![id.clone(), id], vec![]);
        assert!(r.is_err());
    }
}
