//! Equivariant vector bundles in a global trivialization T^n x C^r.
//!
//! The equivariant structure is a cocycle U with (g.s)(x) = U(g,x) s(xg),
//! so U(gh, x) = U(g, x) U(h, xg).  A connection is nabla = d + A; the
//! induced action on End(E)-valued forms conjugates by the cocycle, and the
//! basic derived quantities are the curvature F = dA + A^A, the 1-form
//! delta(g) = nabla - g*nabla and the moment mu(X) = nabla_{X_M} - L_X.

use std::collections::BTreeMap;

use crate::group::{CircleFun, GroupDesc, GrpElt};
use crate::matform::MatForm;
use crate::scalar::{rint, Rat, Scalar};
use crate::torus::{TangentVector, TorusForm};
use crate::Error;

#[derive(Clone, Debug)]
pub enum Cocycle {
    /// One matrix per finite-group element, entries single Fourier modes
    /// with cyclotomic coefficients (monomial or constant matrices).
    FiniteTable(Vec<MatForm>),
    /// Diagonal character for the circle: U(g) = diag(e^{tau m_i g}).
    CircleDiag(Vec<i64>),
}

#[derive(Clone, Debug)]
pub struct BundleDesc {
    pub rank: usize,
    pub cocycle: Cocycle,
    u_inv: Vec<MatForm>, // finite only; empty for the circle
}

impl BundleDesc {
    pub fn new(group: &GroupDesc, rank: usize, cocycle: Cocycle) -> Result<Self, Error> {
        let dim = group.dim();
        match &cocycle {
            Cocycle::FiniteTable(table) => {
                let order = group
                    .order()
                    .ok_or_else(|| Error::Validation("finite cocycle on circle group".into()))?;
                if table.len() != order {
                    return Err(Error::Validation("cocycle table length mismatch".into()));
                }
                if table[group.unit() as usize] != MatForm::identity(rank, dim) {
                    return Err(Error::Validation("cocycle at the unit is not I".into()));
                }
                // cocycle identity U(gh, x) = U(g, x) U(h, xg)
                for g in group.elements() {
                    for h in group.elements() {
                        let gh = group.mul(g, h);
                        let rhs = table[g as usize]
                            .mul(&table[h as usize].map(|e| group.act(g, e)));
                        if table[gh as usize] != rhs {
                            return Err(Error::Validation(format!(
                                "cocycle identity fails at ({}, {})",
                                group.name(g),
                                group.name(h)
                            )));
                        }
                    }
                }
                let mut u_inv = Vec::with_capacity(order);
                for m in table {
                    u_inv.push(m.inverse()?);
                }
                Ok(BundleDesc {
                    rank,
                    cocycle,
                    u_inv,
                })
            }
            Cocycle::CircleDiag(modes) => {
                if modes.len() != rank {
                    return Err(Error::Validation("character mode count mismatch".into()));
                }
                if !matches!(group, GroupDesc::Circle { .. }) {
                    return Err(Error::Validation("circle cocycle on finite group".into()));
                }
                Ok(BundleDesc {
                    rank,
                    cocycle,
                    u_inv: Vec::new(),
                })
            }
        }
    }

    pub fn trivial(group: &GroupDesc, rank: usize) -> Self {
        let dim = group.dim();
        match group {
            GroupDesc::Finite { order, .. } => {
                let table = vec![MatForm::identity(rank, dim); *order];
                BundleDesc::new(group, rank, Cocycle::FiniteTable(table)).expect("trivial cocycle")
            }
            GroupDesc::Circle { .. } => {
                BundleDesc::new(group, rank, Cocycle::CircleDiag(vec![0; rank]))
                    .expect("trivial cocycle")
            }
        }
    }

    pub fn u(&self, g: GrpElt) -> &MatForm {
        match &self.cocycle {
            Cocycle::FiniteTable(t) => &t[g as usize],
            Cocycle::CircleDiag(_) => panic!("circle cocycle is symbolic"),
        }
    }

    pub fn u_inv(&self, g: GrpElt) -> &MatForm {
        match &self.cocycle {
            Cocycle::FiniteTable(_) => &self.u_inv[g as usize],
            Cocycle::CircleDiag(_) => panic!("circle cocycle is symbolic"),
        }
    }

    pub fn character_modes(&self) -> Option<&[i64]> {
        match &self.cocycle {
            Cocycle::CircleDiag(m) => Some(m),
            Cocycle::FiniteTable(_) => None,
        }
    }

    /// The equivariant action on End(E)-valued forms:
    /// g^*w = U(g) . (pullback of w along x -> xg) . U(g)^{-1}.
    pub fn act_end(&self, group: &GroupDesc, g: GrpElt, w: &MatForm) -> MatForm {
        let pulled = w.map(|e| group.act(g, e));
        self.u(g).mul(&pulled).mul(self.u_inv(g))
    }

    /// Circle version with a symbolic group parameter: entry (i, j) of the
    /// conjugated pullback carries the group mode k.v + m_i - m_j.
    pub fn act_end_circle(&self, group: &GroupDesc, w: &MatForm) -> CircleFun<MatForm> {
        let modes = self.character_modes().expect("circle bundle");
        let dir = group.circle_direction().expect("circle group");
        let dim = w.dim();
        let r = self.rank;
        let mut out: BTreeMap<i64, MatForm> = BTreeMap::new();
        for i in 0..r {
            for j in 0..r {
                for ((mask, k), c) in w.entry(i, j).terms() {
                    let kv: i64 = k.iter().zip(dir.iter()).map(|(a, b)| a * b).sum();
                    let gm = kv + modes[i] - modes[j];
                    let slot = out.entry(gm).or_insert_with(|| MatForm::zero(r, dim));
                    slot.entry_mut(i, j)
                        .add_term(*mask, k.clone(), c.clone());
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        CircleFun { coeffs: out }
    }

    /// Lie derivative of an End-valued form along the circle generator:
    /// the g-derivative of act_end_circle at the unit.
    pub fn lie_end_circle(&self, group: &GroupDesc, w: &MatForm) -> MatForm {
        let acted = self.act_end_circle(group, w);
        let mut out = MatForm::zero(self.rank, w.dim());
        for (m, part) in acted.coeffs.iter() {
            out = out.add(&part.scale(&Scalar::tau().mul_rat(&rint(*m))));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connection {
    pub a: MatForm,
}

impl Connection {
    pub fn new(a: MatForm) -> Result<Self, Error> {
        if !a.is_homogeneous(1) {
            return Err(Error::Validation(
                "connection matrix entries must be 1-forms".into(),
            ));
        }
        Ok(Connection { a })
    }

    pub fn zero(rank: usize, dim: usize) -> Self {
        Connection {
            a: MatForm::zero(rank, dim),
        }
    }

    /// F = dA + A ^ A.
    pub fn curvature(&self) -> MatForm {
        self.a.ext_d().add(&self.a.mul(&self.a))
    }

    /// d_{nabla^End} w = dw + A ^ w - (-1)^{|w|} w ^ A, extended to
    /// inhomogeneous w degreewise.
    pub fn d_end(&self, w: &MatForm) -> MatForm {
        let mut out = w.ext_d();
        let top = w.max_degree().unwrap_or(0);
        for deg in 0..=top {
            let part = w.degree_part(deg);
            if part.is_zero() {
                continue;
            }
            let sign = if deg % 2 == 0 { 1 } else { -1 };
            out = out.add(&self.a.mul(&part));
            out = out.add(&part.mul(&self.a).scale(&Scalar::from_int(-sign)));
        }
        out
    }

    /// The connection matrix of g^*nabla in the trivialization:
    /// A_{g^*nabla} = -dU(g) U(g)^{-1} + U(g) (g^*A) U(g)^{-1}.
    pub fn pullback_by(&self, group: &GroupDesc, bundle: &BundleDesc, g: GrpElt) -> Connection {
        let u = bundle.u(g);
        let uinv = bundle.u_inv(g);
        let du = u.ext_d();
        let transported = bundle.u(g).mul(&self.a.map(|e| group.act(g, e))).mul(uinv);
        Connection {
            a: du.mul(uinv).neg().add(&transported),
        }
    }

    /// delta(g) = nabla - g^* nabla.
    pub fn delta_of_g(&self, group: &GroupDesc, bundle: &BundleDesc, g: GrpElt) -> MatForm {
        self.a.sub(&self.pullback_by(group, bundle, g).a)
    }

    /// Circle version, as a Fourier series in the group parameter:
    /// delta(g) = A - U(g)(g^*A)U(g)^{-1} with the diagonal character.
    pub fn delta_circle(&self, group: &GroupDesc, bundle: &BundleDesc) -> CircleFun<MatForm> {
        let acted = bundle.act_end_circle(group, &self.a);
        let mut out = acted.coeffs.clone();
        for v in out.values_mut() {
            *v = v.neg();
        }
        let dim = self.a.dim();
        let zero_slot = out
            .entry(0)
            .or_insert_with(|| MatForm::zero(bundle.rank, dim));
        *zero_slot = zero_slot.add(&self.a);
        out.retain(|_, v| !v.is_zero());
        CircleFun { coeffs: out }
    }

    /// Moment mu(X0) of the circle generator: iota_{X_M} A - dU/dg at e.
    /// Zero for finite groups (trivial Lie algebra).
    pub fn moment(&self, group: &GroupDesc, bundle: &BundleDesc) -> MatForm {
        match group {
            GroupDesc::Finite { .. } => MatForm::zero(bundle.rank, group.dim()),
            GroupDesc::Circle { direction, .. } => {
                let v = TangentVector::from_ints(direction);
                let mut m = self.a.contract(&v);
                let modes = bundle.character_modes().expect("circle bundle");
                for (i, mi) in modes.iter().enumerate() {
                    if *mi != 0 {
                        let dc = TorusForm::constant(
                            group.dim(),
                            Scalar::tau().mul_rat(&rint(*mi)),
                        );
                        *m.entry_mut(i, i) = m.entry(i, i).sub(&dc);
                    }
                }
                m
            }
        }
    }

    /// Average over the group to an invariant connection: the mean of the
    /// pullback connections for a finite group, the zero Fourier mode of
    /// the symbolic family for the circle.
    pub fn average(&self, group: &GroupDesc, bundle: &BundleDesc) -> Connection {
        match group {
            GroupDesc::Finite { order, .. } => {
                let mut acc = MatForm::zero(bundle.rank, group.dim());
                for g in group.elements() {
                    acc = acc.add(&self.pullback_by(group, bundle, g).a);
                }
                Connection {
                    a: acc.scale(&Scalar::from_rat(Rat::new(1.into(), (*order).into()))),
                }
            }
            GroupDesc::Circle { .. } => {
                // A_{g^* nabla} = U(g)(g^* A)U(g)^{-1}; its zero mode is the
                // Haar average over the circle.
                let acted = bundle.act_end_circle(group, &self.a);
                let a = acted
                    .coeffs
                    .get(&0)
                    .cloned()
                    .unwrap_or_else(|| MatForm::zero(bundle.rank, group.dim()));
                Connection { a }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic_group;
    use crate::scalar::{rat, Cyclotomic};
    use crate::torus::AffineMap;
    use num_traits::Zero;

    fn z4() -> GroupDesc {
        let gen = AffineMap::new(vec![vec![0, -1], vec![1, 0]], vec![Rat::zero(); 2], 4).unwrap();
        cyclic_group(4, gen).unwrap()
    }

    fn circle() -> GroupDesc {
        GroupDesc::circle(2, vec![1, 0], 4).unwrap()
    }

    fn rank1(f: TorusForm) -> MatForm {
        MatForm::from_entries(1, 2, vec![f])
    }

    #[test]
    fn curvature_basics() {
        let c = Connection::zero(1, 2);
        assert!(c.curvature().is_zero());
        // constant coefficient 1-form on rank 1: dA = 0, A^A = 0
        let a = Connection::new(rank1(TorusForm::dx(2, 1).scale(&Scalar::from_int(3)))).unwrap();
        assert!(a.curvature().is_zero());
        // A = e_{(0,1)} dx1: F = -tau e_{(0,1)} dx1 dx2
        let f = TorusForm::mode(2, vec![0, 1]).wedge(&TorusForm::dx(2, 1)).unwrap();
        let a = Connection::new(rank1(f)).unwrap();
        let expect = rank1(
            TorusForm::term(2, Scalar::tau().neg(), vec![0, 1], 0b11),
        );
        assert_eq!(a.curvature(), expect);
    }

    #[test]
    fn bianchi() {
        // d_{nabla^End} F = 0
        let mut a = MatForm::zero(2, 2);
        *a.entry_mut(0, 1) = TorusForm::mode(2, vec![1, 0]).wedge(&TorusForm::dx(2, 1)).unwrap();
        *a.entry_mut(1, 0) = TorusForm::mode(2, vec![0, -1]).wedge(&TorusForm::dx(2, 2)).unwrap();
        *a.entry_mut(0, 0) = TorusForm::mode(2, vec![1, 1]).wedge(&TorusForm::dx(2, 2)).unwrap();
        let c = Connection::new(a).unwrap();
        assert!(c.d_end(&c.curvature()).is_zero());
    }

    #[test]
    fn cocycle_validation() {
        let g = z4();
        // character cocycle: U(gen) = zeta_4
        let mut table = Vec::new();
        for e in g.elements() {
            table.push(MatForm::from_entries(
                1,
                2,
                vec![TorusForm::constant(
                    2,
                    Scalar::from_cyclo(Cyclotomic::zeta_pow(4, e as i64)),
                )],
            ));
        }
        assert!(BundleDesc::new(&g, 1, Cocycle::FiniteTable(table)).is_ok());

        // broken cocycle: non-identity at the unit
        let bad = vec![
            MatForm::from_entries(1, 2, vec![TorusForm::mode(2, vec![1, 0])]);
            4
        ];
        assert!(BundleDesc::new(&g, 1, Cocycle::FiniteTable(bad)).is_err());
    }

    /// Mode-monomial rank-1 cocycle on Z/4: U(gen) = zeta4^j e_k with the
    /// orbit sum of k vanishing, so U(gen^4) = 1.
    pub fn monomial_cocycle(g: &GroupDesc, j: i64, k: Vec<i64>) -> BundleDesc {
        let mut table = vec![MatForm::identity(1, 2); 4];
        let gen = MatForm::from_entries(
            1,
            2,
            vec![TorusForm::term(
                2,
                Scalar::from_cyclo(Cyclotomic::zeta_pow(4, j)),
                k,
                0,
            )],
        );
        let mut acc = MatForm::identity(1, 2);
        for e in 1..4usize {
            // U(g^e) = U(g^{e-1}) . (g^{e-1})^* U(g)
            acc = acc.mul(&gen.map(|f| g.act((e - 1) as GrpElt, f)));
            table[e] = acc.clone();
        }
        BundleDesc::new(g, 1, Cocycle::FiniteTable(table)).unwrap()
    }

    #[test]
    fn delta_cocycle_law_and_examples() {
        let g = z4();
        let bundle = monomial_cocycle(&g, 1, vec![1, 0]);
        let a = Connection::new(rank1(
            TorusForm::mode(2, vec![1, 1]).wedge(&TorusForm::dx(2, 1)).unwrap(),
        ))
        .unwrap();
        // delta(e) = 0
        assert!(a.delta_of_g(&g, &bundle, g.unit()).is_zero());
        // cocycle law delta(hg) = delta(h) + h^* delta(g)
        for h in g.elements() {
            for e in g.elements() {
                let lhs = a.delta_of_g(&g, &bundle, g.mul(h, e));
                let rhs = a
                    .delta_of_g(&g, &bundle, h)
                    .add(&bundle.act_end(&g, h, &a.delta_of_g(&g, &bundle, e)));
                assert_eq!(lhs, rhs, "claim 2 fails at ({}, {})", h, e);
            }
        }
        // constant cocycle, rank 1: delta(g) = A - g^* A
        let character = {
            let mut t = Vec::new();
            for e in g.elements() {
                t.push(MatForm::from_entries(
                    1,
                    2,
                    vec![TorusForm::constant(
                        2,
                        Scalar::from_cyclo(Cyclotomic::zeta_pow(4, e as i64)),
                    )],
                ));
            }
            BundleDesc::new(&g, 1, Cocycle::FiniteTable(t)).unwrap()
        };
        for e in g.elements() {
            let lhs = a.delta_of_g(&g, &character, e);
            let rhs = a.a.sub(&a.a.map(|f| g.act(e, f)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn averaging_gives_invariant_connection() {
        let g = z4();
        let bundle = monomial_cocycle(&g, 1, vec![1, 0]);
        let a = Connection::new(rank1(
            TorusForm::mode(2, vec![1, 0]).wedge(&TorusForm::dx(2, 1)).unwrap(),
        ))
        .unwrap();
        let avg = a.average(&g, &bundle);
        for e in g.elements() {
            assert!(
                avg.delta_of_g(&g, &bundle, e).is_zero(),
                "averaged connection not invariant at {}",
                e
            );
        }
        // idempotence on fixed points
        let again = avg.average(&g, &bundle);
        assert_eq!(avg, again);
        // zero connection averages to zero with a constant cocycle
        let z = Connection::zero(1, 2);
        let character = BundleDesc::trivial(&g, 1);
        assert!(z.average(&g, &character).a.is_zero());
    }

    #[test]
    fn moment_examples() {
        let g = z4();
        let b = BundleDesc::trivial(&g, 1);
        let a = Connection::new(rank1(TorusForm::dx(2, 1))).unwrap();
        assert!(a.moment(&g, &b).is_zero());

        let gc = circle();
        let bc = BundleDesc::trivial(&gc, 1);
        assert!(Connection::zero(1, 2).moment(&gc, &bc).is_zero());
        // A = e_{(0,1)} dx1, v = (1,0): mu = e_{(0,1)}
        let a = Connection::new(rank1(
            TorusForm::mode(2, vec![0, 1]).wedge(&TorusForm::dx(2, 1)).unwrap(),
        ))
        .unwrap();
        assert_eq!(a.moment(&gc, &bc), rank1(TorusForm::mode(2, vec![0, 1])));
    }

    #[test]
    fn circle_average_is_zero_mode() {
        let gc = circle();
        let bc = BundleDesc::trivial(&gc, 1);
        // A with modes (0,1) (invariant under x1-translation) and (1,0)
        let a = Connection::new(rank1(
            TorusForm::mode(2, vec![0, 1])
                .wedge(&TorusForm::dx(2, 1))
                .unwrap()
                .add(&TorusForm::mode(2, vec![1, 0]).wedge(&TorusForm::dx(2, 2)).unwrap()),
        ))
        .unwrap();
        let avg = a.average(&gc, &bc);
        assert_eq!(
            avg.a,
            rank1(TorusForm::mode(2, vec![0, 1]).wedge(&TorusForm::dx(2, 1)).unwrap())
        );
        // the averaged connection is invariant: delta has no nonzero part
        let delta = avg.delta_circle(&gc, &bc);
        assert!(delta.coeffs.is_empty());
    }

    #[test]
    fn translation_phase_cocycle() {
        // rank-1 cocycle on the z2 translation subgroup with a constant
        // character: U(s) = -1
        let gen = AffineMap::translation(vec![rat(1, 2), Rat::zero()], 4).unwrap();
        let g = cyclic_group(2, gen).unwrap();
        let table = vec![
            MatForm::identity(1, 2),
            MatForm::from_entries(1, 2, vec![TorusForm::constant(2, Scalar::from_int(-1))]),
        ];
        let b = BundleDesc::new(&g, 1, Cocycle::FiniteTable(table)).unwrap();
        let a = Connection::new(rank1(
            TorusForm::mode(2, vec![1, 0]).wedge(&TorusForm::dx(2, 2)).unwrap(),
        ))
        .unwrap();
        let avg = a.average(&g, &b);
        for e in g.elements() {
            assert!(avg.delta_of_g(&g, &b, e).is_zero());
        }
    }
}
