//! Cocycle identities of the simplex-integrated Chern character on the
//! rotation scenario, checked exhaustively on small mode-basis tuples.

use equichern_core::bundle::{BundleDesc, Cocycle, Connection};
use equichern_core::cochain::{
    chern_twisted_closed, cochain_b, cochain_big_b, jlo_generic, TraceVariant,
};
use equichern_core::dga::Dga;
use equichern_core::group::{cyclic_group, AlgebraElem, GrpElt};
use equichern_core::matform::MatForm;
use equichern_core::scalar::{Cyclotomic, Rat, Scalar};
use equichern_core::torus::{AffineMap, TorusForm};
use num_traits::Zero;

fn z4_twisted() -> Dga {
    let gen = AffineMap::new(vec![vec![0, -1], vec![1, 0]], vec![Rat::zero(); 2], 4).unwrap();
    let g = cyclic_group(4, gen).unwrap();
    let mut table = vec![MatForm::identity(1, 2); 4];
    let genm = MatForm::from_entries(
        1,
        2,
        vec![TorusForm::term(
            2,
            Scalar::from_cyclo(Cyclotomic::zeta_pow(4, 1)),
            vec![1, 0],
            0,
        )],
    );
    let mut acc = MatForm::identity(1, 2);
    for e in 1..4usize {
        acc = acc.mul(&genm.map(|f| g.act((e - 1) as GrpElt, f)));
        table[e] = acc.clone();
    }
    let bundle = BundleDesc::new(&g, 1, Cocycle::FiniteTable(table)).unwrap();
    let conn = Connection::new(MatForm::from_entries(
        1,
        2,
        vec![TorusForm::mode(2, vec![1, 1])
            .wedge(&TorusForm::dx(2, 1))
            .unwrap()],
    ))
    .unwrap();
    Dga::twisted(g, bundle, conn)
}

fn band1_basis(dga: &Dga) -> Vec<AlgebraElem> {
    let mut basis = vec![];
    for e in dga.group.elements() {
        for kx in -1..=1i64 {
            for ky in -1..=1i64 {
                basis.push(AlgebraElem::basis_finite(&dga.group, e, vec![kx, ky]));
            }
        }
    }
    basis
}

#[test]
fn b_ch0_equals_big_b_ch2_twisted() {
    let dga = z4_twisted();
    let g = dga.group.clone();
    let ch0 = jlo_generic(&dga, 0, TraceVariant::Plain);
    let ch2 = jlo_generic(&dga, 2, TraceVariant::Plain);
    let lhs = cochain_b(&g, &ch0);
    let rhs = cochain_big_b(&g, &ch2);
    let basis = band1_basis(&dga);
    let mut nonzero = 0usize;
    for a in &basis {
        for b in &basis {
            let l = lhs.eval(&[a.clone(), b.clone()]);
            let r = rhs.eval(&[a.clone(), b.clone()]);
            assert_eq!(l, r, "mismatch at a,b");
            if !l.is_zero() {
                nonzero += 1;
            }
        }
    }
    assert!(nonzero > 0, "identity should be exercised on nonzero values");
}

#[test]
fn closed_form_matches_generic_twisted() {
    let dga = z4_twisted();
    let closed0 = chern_twisted_closed(&dga, 0).unwrap();
    let gen0 = jlo_generic(&dga, 0, TraceVariant::Plain);
    let closed2 = chern_twisted_closed(&dga, 2).unwrap();
    let gen2 = jlo_generic(&dga, 2, TraceVariant::Plain);
    let basis = band1_basis(&dga);
    let mut nonzero0 = 0;
    for a in &basis {
        let l = closed0.eval(&[a.clone()]);
        let r = gen0.eval(&[a.clone()]);
        assert_eq!(l, r);
        if !l.is_zero() {
            nonzero0 += 1;
        }
    }
    assert!(nonzero0 > 0);
    // spot-check k = 2 on a subset with matching group support and modes
    let mut nonzero2 = 0;
    for a in basis.iter().step_by(4) {
        for b in basis.iter().step_by(3) {
            for c in basis.iter().step_by(5) {
                let t = [a.clone(), b.clone(), c.clone()];
                let l = closed2.eval(&t);
                let r = gen2.eval(&t);
                assert_eq!(l, r);
                if !l.is_zero() {
                    nonzero2 += 1;
                }
            }
        }
    }
    assert!(nonzero2 > 0);
}
