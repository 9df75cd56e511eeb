//! The curved differential graded algebras over the convolution algebra:
//! the untwisted carrier C_c(G, Sym(g*) (x) Omega(M)) and its twist by an
//! equivariant bundle, C_c(G, Sym(g*) (x) Omega(M, End E)).
//!
//! Elements are group functions (point masses for finite groups, Fourier
//! series for the circle) with values in polynomials in `u` (the Sym(g*)
//! generator for the circle; degree 0 for finite groups) whose coefficients
//! are matrix-valued forms.  The total degree of a term is
//! form degree + 2 * u-degree.
//!
//! The curvature multiplier is represented operationally as the pair of
//! maps (theta_l, theta_r); it is never materialized as an element.

use std::collections::BTreeMap;

use crate::bundle::{BundleDesc, Connection};
use crate::group::{CircleFun, GroupDesc, GroupFun, GrpElt};
use crate::matform::MatForm;
use crate::scalar::{rint, Scalar};
use crate::torus::{TangentVector, TorusForm};
use crate::Error;

/// Polynomial in u with matrix-form coefficients; canonical sparse form.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly {
    pub c: BTreeMap<u32, MatForm>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { c: BTreeMap::new() }
    }

    pub fn from_mat(m: MatForm) -> Self {
        Self::from_mat_at(0, m)
    }

    pub fn from_mat_at(udeg: u32, m: MatForm) -> Self {
        let mut p = Self::zero();
        p.insert(udeg, m);
        p
    }

    pub fn insert(&mut self, udeg: u32, m: MatForm) {
        if m.is_zero() {
            return;
        }
        match self.c.get_mut(&udeg) {
            Some(existing) => {
                *existing = existing.add(&m);
                if existing.is_zero() {
                    self.c.remove(&udeg);
                }
            }
            None => {
                self.c.insert(udeg, m);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (d, m) in o.c.iter() {
            out.insert(*d, m.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        UPoly {
            c: self.c.iter().map(|(d, m)| (*d, m.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for (d, m) in self.c.iter() {
            out.insert(*d, m.scale(s));
        }
        out
    }

    pub fn map<F: Fn(&MatForm) -> MatForm>(&self, f: F) -> Self {
        let mut out = Self::zero();
        for (d, m) in self.c.iter() {
            out.insert(*d, f(m));
        }
        out
    }

    /// Shift the u-degree by +k.
    pub fn ushift(&self, k: u32) -> Self {
        UPoly {
            c: self.c.iter().map(|(d, m)| (*d + k, m.clone())).collect(),
        }
    }

    /// Truncate to u-degrees <= cap.
    pub fn truncate(&self, cap: u32) -> Self {
        UPoly {
            c: self
                .c
                .iter()
                .filter(|(d, _)| **d <= cap)
                .map(|(d, m)| (*d, m.clone()))
                .collect(),
        }
    }
}

/// An element of the (possibly twisted) equivariant carrier algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct EqElem {
    pub rank: usize,
    pub dim: usize,
    pub fun: GroupFun<UPoly>,
}

impl EqElem {
    pub fn zero(group: &GroupDesc, rank: usize) -> Self {
        EqElem {
            rank,
            dim: group.dim(),
            fun: GroupFun::empty_like(group),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fun.is_empty()
    }

    pub fn single_finite(group: &GroupDesc, rank: usize, at: GrpElt, p: UPoly) -> Self {
        let mut m = BTreeMap::new();
        if !p.is_zero() {
            m.insert(at, p);
        }
        EqElem {
            rank,
            dim: group.dim(),
            fun: GroupFun::Finite(m),
        }
    }

    pub fn single_circle(group: &GroupDesc, rank: usize, gmode: i64, p: UPoly) -> Self {
        let mut m = BTreeMap::new();
        if !p.is_zero() {
            m.insert(gmode, p);
        }
        EqElem {
            rank,
            dim: group.dim(),
            fun: GroupFun::Circle(m),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rank, self.dim), (o.rank, o.dim));
        let fun = match (&self.fun, &o.fun) {
            (GroupFun::Finite(a), GroupFun::Finite(b)) => {
                let mut m = a.clone();
                for (g, p) in b.iter() {
                    let entry = m.entry(*g).or_insert_with(UPoly::zero);
                    *entry = entry.add(p);
                    if entry.is_zero() {
                        m.remove(g);
                    }
                }
                GroupFun::Finite(m)
            }
            (GroupFun::Circle(a), GroupFun::Circle(b)) => {
                let mut m = a.clone();
                for (g, p) in b.iter() {
                    let entry = m.entry(*g).or_insert_with(UPoly::zero);
                    *entry = entry.add(p);
                    if entry.is_zero() {
                        m.remove(g);
                    }
                }
                GroupFun::Circle(m)
            }
            _ => panic!("mixed group kinds"),
        };
        EqElem {
            rank: self.rank,
            dim: self.dim,
            fun,
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let fun = match &self.fun {
            GroupFun::Finite(m) => GroupFun::Finite(
                m.iter()
                    .map(|(g, p)| (*g, p.scale(s)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect(),
            ),
            GroupFun::Circle(m) => GroupFun::Circle(
                m.iter()
                    .map(|(g, p)| (*g, p.scale(s)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect(),
            ),
        };
        EqElem {
            rank: self.rank,
            dim: self.dim,
            fun,
        }
    }

    fn map_payload<F: Fn(&UPoly) -> UPoly>(&self, f: F) -> Self {
        let fun = match &self.fun {
            GroupFun::Finite(m) => GroupFun::Finite(
                m.iter()
                    .map(|(g, p)| (*g, f(p)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect(),
            ),
            GroupFun::Circle(m) => GroupFun::Circle(
                m.iter()
                    .map(|(g, p)| (*g, f(p)))
                    .filter(|(_, p)| !p.is_zero())
                    .collect(),
            ),
        };
        EqElem {
            rank: self.rank,
            dim: self.dim,
            fun,
        }
    }

    /// Component of homogeneous total degree d (form degree + 2 u-degree).
    pub fn degree_part(&self, d: usize) -> Self {
        self.map_payload(|p| {
            let mut out = UPoly::zero();
            for (ud, m) in p.c.iter() {
                let want = d as i64 - 2 * (*ud as i64);
                if want >= 0 {
                    out.insert(*ud, m.degree_part(want as usize));
                }
            }
            out
        })
    }

    pub fn max_total_degree(&self) -> Option<usize> {
        let payload_max = |p: &UPoly| {
            p.c.iter()
                .filter_map(|(ud, m)| m.max_degree().map(|fd| fd + 2 * (*ud as usize)))
                .max()
        };
        match &self.fun {
            GroupFun::Finite(m) => m.values().filter_map(payload_max).max(),
            GroupFun::Circle(m) => m.values().filter_map(payload_max).max(),
        }
    }

    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.sub(&self.degree_part(d)).is_zero()
    }
}

/// Twist data: bundle, connection and the derived fields used by the
/// differential and the curvature multiplier.
#[derive(Clone, Debug)]
pub struct Twist {
    pub bundle: BundleDesc,
    pub conn: Connection,
    pub curv: MatForm,
    delta_fin: Vec<MatForm>,
    delta_circ: Option<CircleFun<MatForm>>,
    mu: MatForm,
}

/// The ambient structure for one carrier algebra.
#[derive(Clone, Debug)]
pub struct Dga {
    pub group: GroupDesc,
    pub rank: usize,
    pub twist: Option<Twist>,
}

impl Dga {
    pub fn untwisted(group: GroupDesc) -> Self {
        Dga {
            group,
            rank: 1,
            twist: None,
        }
    }

    pub fn twisted(group: GroupDesc, bundle: BundleDesc, conn: Connection) -> Self {
        let curv = conn.curvature();
        let (delta_fin, delta_circ) = match &group {
            GroupDesc::Finite { .. } => {
                let v = group
                    .elements()
                    .iter()
                    .map(|&g| conn.delta_of_g(&group, &bundle, g))
                    .collect();
                (v, None)
            }
            GroupDesc::Circle { .. } => {
                (Vec::new(), Some(conn.delta_circle(&group, &bundle)))
            }
        };
        let mu = conn.moment(&group, &bundle);
        let rank = bundle.rank;
        Dga {
            group,
            rank,
            twist: Some(Twist {
                bundle,
                conn,
                curv,
                delta_fin,
                delta_circ,
                mu,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.group.dim()
    }

    pub fn zero_elem(&self) -> EqElem {
        EqElem::zero(&self.group, self.rank)
    }

    /// Embed an algebra basis payload as a scalar multiple of the identity.
    pub fn embed_form(&self, f: &TorusForm) -> MatForm {
        MatForm::scalar_form(self.rank, f.clone())
    }

    /// The action of a finite-group element on a payload matrix: the
    /// equivariant End-action when twisted, the plain pullback otherwise.
    fn act_mat(&self, g: GrpElt, m: &MatForm) -> MatForm {
        match &self.twist {
            Some(t) => t.bundle.act_end(&self.group, g, m),
            None => m.map(|e| self.group.act(g, e)),
        }
    }

    /// Circle action with symbolic group parameter, as a Fourier series.
    fn act_mat_circle(&self, m: &MatForm) -> CircleFun<MatForm> {
        match &self.twist {
            Some(t) => t.bundle.act_end_circle(&self.group, m),
            None => {
                let dir = self.group.circle_direction().expect("circle group");
                let dim = m.dim();
                let r = m.rank();
                let mut out: BTreeMap<i64, MatForm> = BTreeMap::new();
                for i in 0..r {
                    for j in 0..r {
                        for ((mask, k), c) in m.entry(i, j).terms() {
                            let kv: i64 = k.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
                            let slot = out.entry(kv).or_insert_with(|| MatForm::zero(r, dim));
                            slot.entry_mut(i, j).add_term(*mask, k.clone(), c.clone());
                        }
                    }
                }
                out.retain(|_, v| !v.is_zero());
                CircleFun { coeffs: out }
            }
        }
    }

    /// Lie derivative of a payload along the circle generator.
    fn lie_mat(&self, m: &MatForm) -> MatForm {
        let acted = self.act_mat_circle(m);
        let mut out = MatForm::zero(m.rank(), m.dim());
        for (gm, part) in acted.coeffs.iter() {
            out = out.add(&part.scale(&Scalar::tau().mul_rat(&rint(*gm))));
        }
        out
    }

    /// Convolution product.
    pub fn star(&self, a: &EqElem, b: &EqElem) -> Result<EqElem, Error> {
        if a.rank != b.rank || a.dim != b.dim {
            return Err(Error::GroupMismatch("star of mismatched carriers".into()));
        }
        let mut out = self.zero_elem();
        match (&a.fun, &b.fun) {
            (GroupFun::Finite(ma), GroupFun::Finite(mb)) => {
                let GroupFun::Finite(dst) = &mut out.fun else { unreachable!() };
                for (h, pa) in ma.iter() {
                    for (k, pb) in mb.iter() {
                        let target = self.group.mul(*h, *k);
                        let mut prod = UPoly::zero();
                        for (da, mati) in pa.c.iter() {
                            for (db, matj) in pb.c.iter() {
                                prod.insert(da + db, mati.mul(&self.act_mat(*h, matj)));
                            }
                        }
                        if prod.is_zero() {
                            continue;
                        }
                        let entry = dst.entry(target).or_insert_with(UPoly::zero);
                        *entry = entry.add(&prod);
                        if entry.is_zero() {
                            dst.remove(&target);
                        }
                    }
                }
            }
            (GroupFun::Circle(ma), GroupFun::Circle(mb)) => {
                let GroupFun::Circle(dst) = &mut out.fun else { unreachable!() };
                // (a*b)(g) = int a(h) ^ h^* b(g - h) dh; the transported b
                // with g-mode m2 contributes h-modes m2 - j per component j
                // of the symbolic action, so only j = m2 - ... survives the
                // Haar integral: out at g-mode m2 collects a_{m1} ^ b'_{m2,j}
                // with m1 - m2 + j = 0.
                for (m1, pa) in ma.iter() {
                    for (m2, pb) in mb.iter() {
                        for (db, matj) in pb.c.iter() {
                            let acted = self.act_mat_circle(matj);
                            let Some(part) = acted.coeffs.get(&(m2 - m1)) else {
                                continue;
                            };
                            for (da, mati) in pa.c.iter() {
                                let prod = mati.mul(part);
                                if prod.is_zero() {
                                    continue;
                                }
                                let entry = dst.entry(*m2).or_insert_with(UPoly::zero);
                                let mut add = UPoly::zero();
                                add.insert(da + db, prod);
                                *entry = entry.add(&add);
                                if entry.is_zero() {
                                    dst.remove(m2);
                                }
                            }
                        }
                    }
                }
            }
            _ => return Err(Error::GroupMismatch("mixed group kinds".into())),
        }
        Ok(out)
    }

    /// The differential: d (+ iota for the circle), plus the delta-term in
    /// the twisted case, applied degreewise.
    pub fn diff(&self, a: &EqElem) -> EqElem {
        let mut out = match &self.twist {
            Some(t) => a.map_payload(|p| p.map(|m| t.conn.d_end(m))),
            None => a.map_payload(|p| p.map(|m| m.ext_d())),
        };
        // iota_{X_M}: u * contraction with the direction field
        if let Some(dir) = self.group.circle_direction() {
            let v = TangentVector::from_ints(dir);
            let iota = a.map_payload(|p| p.map(|m| m.contract(&v)).ushift(1));
            out = out.add(&iota);
        }
        // twisted: (-1)^{|alpha|} alpha(g) ^ delta(g), with |alpha| the form
        // degree (the u-part is even)
        if let Some(t) = &self.twist {
            let signed = |p: &UPoly, d: &MatForm| -> UPoly {
                let mut acc = UPoly::zero();
                for (ud, m) in p.c.iter() {
                    let top = m.max_degree().unwrap_or(0);
                    for fd in 0..=top {
                        let part = m.degree_part(fd);
                        if part.is_zero() {
                            continue;
                        }
                        let sign = if fd % 2 == 0 { 1 } else { -1 };
                        acc.insert(*ud, part.mul(d).scale(&Scalar::from_int(sign)));
                    }
                }
                acc
            };
            match (&a.fun, &mut out.fun) {
                (GroupFun::Finite(ma), GroupFun::Finite(dst)) => {
                    for (g, p) in ma.iter() {
                        let dterm = signed(p, &t.delta_fin[*g as usize]);
                        if dterm.is_zero() {
                            continue;
                        }
                        let entry = dst.entry(*g).or_insert_with(UPoly::zero);
                        *entry = entry.add(&dterm);
                        if entry.is_zero() {
                            dst.remove(g);
                        }
                    }
                }
                (GroupFun::Circle(ma), GroupFun::Circle(dst)) => {
                    let delta = t.delta_circ.as_ref().expect("circle twist");
                    for (m1, p) in ma.iter() {
                        for (j, dmat) in delta.coeffs.iter() {
                            let dterm = signed(p, dmat);
                            if dterm.is_zero() {
                                continue;
                            }
                            let gm = m1 + j;
                            let entry = dst.entry(gm).or_insert_with(UPoly::zero);
                            *entry = entry.add(&dterm);
                            if entry.is_zero() {
                                dst.remove(&gm);
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
        }
        out
    }

    /// Right multiplication by the curvature multiplier.
    pub fn theta_r(&self, a: &EqElem) -> EqElem {
        let mut out = self.untwisted_theta_r(a);
        if let Some(t) = &self.twist {
            // alpha(g) ^ (g^* F + u g^*(mu))
            match &a.fun {
                GroupFun::Finite(ma) => {
                    for (g, p) in ma.iter() {
                        let gf = self.act_mat(*g, &t.curv);
                        let gmu = self.act_mat(*g, &t.mu);
                        let term = p
                            .map(|m| m.mul(&gf))
                            .add(&p.map(|m| m.mul(&gmu)).ushift(1));
                        out = out.add(&EqElem::single_finite(&self.group, self.rank, *g, term));
                    }
                }
                GroupFun::Circle(ma) => {
                    let facted = self.act_mat_circle(&t.curv);
                    let muacted = self.act_mat_circle(&t.mu);
                    for (m1, p) in ma.iter() {
                        for (j, fj) in facted.coeffs.iter() {
                            let term = p.map(|m| m.mul(fj));
                            out = out.add(&EqElem::single_circle(
                                &self.group,
                                self.rank,
                                m1 + j,
                                term,
                            ));
                        }
                        for (j, mj) in muacted.coeffs.iter() {
                            let term = p.map(|m| m.mul(mj)).ushift(1);
                            out = out.add(&EqElem::single_circle(
                                &self.group,
                                self.rank,
                                m1 + j,
                                term,
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// Left multiplication by the curvature multiplier.
    pub fn theta_l(&self, a: &EqElem) -> EqElem {
        // untwisted part: theta_r plus the Lie derivative term
        let mut out = self.untwisted_theta_r(a);
        if self.group.circle_direction().is_some() {
            let lie = a.map_payload(|p| p.map(|m| self.lie_mat(m)).ushift(1));
            out = out.add(&lie);
        }
        if let Some(t) = &self.twist {
            // (F + u mu) ^ alpha(g)
            let add = a.map_payload(|p| {
                p.map(|m| t.curv.mul(m))
                    .add(&p.map(|m| t.mu.mul(m)).ushift(1))
            });
            out = out.add(&add);
        }
        out
    }

    /// The untwisted (alpha * Theta) part: the g-derivative of the group
    /// argument, -u tau m per circle mode m; zero for finite groups.
    fn untwisted_theta_r(&self, a: &EqElem) -> EqElem {
        match &a.fun {
            GroupFun::Finite(_) => self.zero_elem(),
            GroupFun::Circle(ma) => {
                let mut out = self.zero_elem();
                let GroupFun::Circle(dst) = &mut out.fun else { unreachable!() };
                for (m1, p) in ma.iter() {
                    if *m1 == 0 {
                        continue;
                    }
                    let term = p.scale(&Scalar::tau().mul_rat(&rint(-*m1))).ushift(1);
                    if term.is_zero() {
                        continue;
                    }
                    dst.insert(*m1, term);
                }
                out
            }
        }
    }

    /// Evaluation at the unit group element and X = 0 (the u^0 part).
    pub fn eval_unit(&self, a: &EqElem) -> MatForm {
        let mut acc = MatForm::zero(self.rank, self.dim());
        match &a.fun {
            GroupFun::Finite(m) => {
                if let Some(p) = m.get(&self.group.unit()) {
                    if let Some(m0) = p.c.get(&0) {
                        acc = acc.add(m0);
                    }
                }
            }
            GroupFun::Circle(m) => {
                for p in m.values() {
                    if let Some(m0) = p.c.get(&0) {
                        acc = acc.add(m0);
                    }
                }
            }
        }
        acc
    }

    /// The closed graded trace: integrate tr_E alpha(e, 0).
    pub fn trace(&self, a: &EqElem) -> Scalar {
        self.eval_unit(a).trace().integrate_top()
    }

    /// The gamma-twisted trace for gamma = X0^q: apply (d/du)^q, evaluate
    /// at u = 0 and the unit, then integrate.  q = 0 is the plain trace.
    pub fn trace_gamma(&self, a: &EqElem, q: u32) -> Scalar {
        if q == 0 {
            return self.trace(a);
        }
        let mut acc = MatForm::zero(self.rank, self.dim());
        let pick = |p: &UPoly, acc: &mut MatForm| {
            if let Some(mq) = p.c.get(&q) {
                *acc = acc.add(mq);
            }
        };
        match &a.fun {
            GroupFun::Finite(m) => {
                if let Some(p) = m.get(&self.group.unit()) {
                    pick(p, &mut acc);
                }
            }
            GroupFun::Circle(m) => {
                for p in m.values() {
                    pick(p, &mut acc);
                }
            }
        }
        let fact = crate::scalar::factorial(q as usize);
        acc.trace().integrate_top().mul_rat(&fact)
    }

    /// The trace of a pure power of the curvature multiplier, used by the
    /// JLO evaluator on the adjoined unit: integrate tr_E F^i at X = 0.
    pub fn trace_theta_power(&self, i: usize) -> Scalar {
        if i == 0 {
            // trace of the identity section: rank times the volume, which is
            // only a top form when dim = 0
            return MatForm::identity(self.rank, self.dim())
                .trace()
                .integrate_top();
        }
        match &self.twist {
            None => Scalar::zero(),
            Some(t) => {
                let mut pow = t.curv.clone();
                for _ in 1..i {
                    pow = pow.mul(&t.curv);
                }
                pow.trace().integrate_top()
            }
        }
    }

    /// Graded commutator with the multiplier: theta_l - theta_r.
    pub fn theta_bracket(&self, a: &EqElem) -> EqElem {
        self.theta_l(a).sub(&self.theta_r(a))
    }
}

/// Embedding of the convolution algebra into degree 0 of the carrier.
pub fn rho(dga: &Dga, a: &crate::group::AlgebraElem) -> EqElem {
    let mut out = dga.zero_elem();
    match (&a.fun, &mut out.fun) {
        (GroupFun::Finite(m), GroupFun::Finite(dst)) => {
            for (g, f) in m.iter() {
                dst.insert(*g, UPoly::from_mat(dga.embed_form(f)));
            }
        }
        (GroupFun::Circle(m), GroupFun::Circle(dst)) => {
            for (g, f) in m.iter() {
                dst.insert(*g, UPoly::from_mat(dga.embed_form(f)));
            }
        }
        _ => panic!("mixed group kinds"),
    }
    out
}
