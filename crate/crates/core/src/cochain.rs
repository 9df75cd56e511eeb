//! (b, B)-cochains over the unital convolution algebra and the JLO-type
//! Chern character of a curved carrier with closed graded trace, plus the
//! closed-form twisted cocycle obtained by integrating out the simplex.

use std::sync::Arc;

use crate::dga::{rho, Dga, EqElem};
use crate::group::{AlgebraElem, GroupDesc, GrpElt};
use crate::matform::MatForm;
use crate::scalar::{factorial, rint, Rat, Scalar};
use crate::torus::TorusForm;
use crate::Error;

type Eval = Arc<dyn Fn(&[AlgebraElem]) -> Scalar + Send + Sync>;

/// A multilinear functional on (k+1)-tuples over the unital algebra,
/// represented by its evaluator.  `normalized` records vanishing on the
/// adjoined unit in slots >= 1.
#[derive(Clone)]
pub struct Cochain {
    pub arity: usize,
    pub normalized: bool,
    eval: Eval,
}

impl Cochain {
    pub fn new(arity: usize, normalized: bool, eval: Eval) -> Self {
        Cochain {
            arity,
            normalized,
            eval,
        }
    }

    pub fn zero(arity: usize) -> Self {
        Cochain {
            arity,
            normalized: true,
            eval: Arc::new(|_| Scalar::zero()),
        }
    }

    pub fn eval(&self, args: &[AlgebraElem]) -> Scalar {
        assert_eq!(args.len(), self.arity, "cochain arity mismatch");
        (self.eval)(args)
    }
}

/// Hochschild coboundary: raises the arity by one.
pub fn cochain_b(group: &GroupDesc, phi: &Cochain) -> Cochain {
    let k1 = phi.arity; // phi takes a_0..a_{k1-1}; b phi takes one more
    let phi = phi.clone();
    let group = group.clone();
    Cochain::new(
        k1 + 1,
        phi.normalized,
        Arc::new(move |args: &[AlgebraElem]| {
            let mut acc = Scalar::zero();
            let last = args.len() - 1;
            for i in 0..last {
                let mut inner: Vec<AlgebraElem> = Vec::with_capacity(args.len() - 1);
                inner.extend_from_slice(&args[..i]);
                inner.push(crate::group::convolve(&group, &args[i], &args[i + 1]).expect("same group"));
                inner.extend_from_slice(&args[i + 2..]);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                acc = acc.add(&phi.eval(&inner).mul_rat(&rint(sign)));
            }
            let mut inner: Vec<AlgebraElem> = Vec::with_capacity(args.len() - 1);
            inner.push(crate::group::convolve(&group, &args[last], &args[0]).expect("same group"));
            inner.extend_from_slice(&args[1..last]);
            let sign = if last % 2 == 0 { 1 } else { -1 };
            acc.add(&phi.eval(&inner).mul_rat(&rint(sign)))
        }),
    )
}

/// Connes coboundary on normalized cochains: lowers the arity by one;
/// on arity 1 it returns the zero cochain (of arity 0).
pub fn cochain_big_b(group: &GroupDesc, phi: &Cochain) -> Cochain {
    assert!(phi.normalized, "B needs a normalized cochain");
    if phi.arity == 0 {
        return Cochain::zero(0);
    }
    let phi = phi.clone();
    let group = group.clone();
    let out_arity = phi.arity - 1;
    if out_arity == 0 {
        // (B phi)(a0) = phi(1, a0)
        return Cochain::new(
            1,
            true,
            Arc::new(move |args: &[AlgebraElem]| {
                let unit = AlgebraElem::adjoined_unit(&group);
                phi.eval(&[unit, args[0].clone()])
            }),
        );
    }
    Cochain::new(
        out_arity,
        true,
        Arc::new(move |args: &[AlgebraElem]| {
            let k = args.len(); // = out_arity, cyclic over k slots
            let mut acc = Scalar::zero();
            for i in 0..k {
                let mut inner: Vec<AlgebraElem> = Vec::with_capacity(k + 1);
                inner.push(AlgebraElem::adjoined_unit(&group));
                for j in 0..k {
                    inner.push(args[(i + j) % k].clone());
                }
                let sign = if ((k - 1) * i) % 2 == 0 { 1 } else { -1 };
                acc = acc.add(&phi.eval(&inner).mul_rat(&rint(sign)));
            }
            acc
        }),
    )
}

/// Dirichlet integral of t_0^{i_0} ... t_k^{i_k} over the standard simplex
/// with measure dt_1...dt_k: prod i_j! / (k + sum i_j)!.
pub fn simplex_integrate(exponents: &[u32]) -> Rat {
    let k = exponents.len() - 1;
    let total: u32 = exponents.iter().sum();
    let mut num = Rat::from_integer(1.into());
    for e in exponents {
        num *= factorial(*e as usize);
    }
    num / factorial(k + total as usize)
}

/// Which closed graded trace to evaluate against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TraceVariant {
    Plain,
    /// gamma = X0^q acting as (d/du)^q before evaluation at zero.
    Gamma(u32),
}

impl TraceVariant {
    fn degree_shift(&self) -> u32 {
        match self {
            TraceVariant::Plain => 0,
            TraceVariant::Gamma(q) => *q,
        }
    }

    fn apply(&self, dga: &Dga, a: &EqElem) -> Scalar {
        match self {
            TraceVariant::Plain => dga.trace(a),
            TraceVariant::Gamma(q) => dga.trace_gamma(a, *q),
        }
    }
}

/// Enumerate the insertion tuples (i_0, ..., i_k) with sum s.
fn insertion_tuples(slots: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            let mut t = prefix.clone();
            t.push(total);
            out.push(t);
            return;
        }
        for i in 0..=total {
            prefix.push(i);
            rec(slots - 1, total - i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(slots, total, &mut Vec::new(), &mut out);
    out
}

/// The simplex-integrated JLO cochain of degree k for the carrier `dga`:
/// the trace of a_0 * e^{-t_0 Theta} * D a_1 * ... * D a_k * e^{-t_k Theta},
/// with each exponential expanded and the t-monomials integrated exactly.
/// The multiplier powers fold into the neighbouring factors via the
/// multiplier laws, so Theta itself is never materialized.
pub fn jlo_generic(dga: &Dga, k: usize, variant: TraceVariant) -> Cochain {
    let dga = dga.clone();
    let n = dga.dim();
    let arity = k + 1;
    Cochain::new(
        arity,
        true,
        Arc::new(move |args: &[AlgebraElem]| {
            let q = variant.degree_shift();
            let want = n as i64 + 2 * q as i64 - k as i64;
            if want < 0 || want % 2 != 0 {
                return Scalar::zero();
            }
            let s = (want / 2) as u32;
            let mut acc = jlo_layer(&dga, k, variant, args, s);
            let coeff = Rat::from_integer(if s % 2 == 0 { 1.into() } else { (-1).into() })
                / factorial(k + s as usize);
            acc = acc.mul_rat(&coeff);
            // insertions beyond the degree budget must die under the trace
            debug_assert!(
                jlo_layer(&dga, k, variant, args, s + 1).is_zero(),
                "expansion order bound violated"
            );
            acc
        }),
    )
}

/// Sum over insertion tuples with a fixed total number of multiplier
/// insertions; the caller applies the scalar prefactor.
fn jlo_layer(
    dga: &Dga,
    k: usize,
    variant: TraceVariant,
    args: &[AlgebraElem],
    total_insertions: u32,
) -> Scalar {
    let mut acc = Scalar::zero();
    for tuple in insertion_tuples(k + 1, total_insertions) {
        // factors j = 1..k: Theta_l^{i_{j-1}} (D rho(a_j))
        let mut factors: Vec<EqElem> = Vec::with_capacity(k);
        for j in 1..=k {
            let mut f = dga.diff(&rho(dga, &args[j]));
            for _ in 0..tuple[j - 1] {
                f = dga.theta_l(&f);
            }
            factors.push(f);
        }
        // assemble rho(a_0-smooth) * f_1 * ... * f_k, plus the unit part
        let smooth0 = {
            let mut a = args[0].clone();
            a.unit = Scalar::zero();
            a
        };
        let mut prod: Option<EqElem> = if smooth0.is_zero() {
            None
        } else {
            Some(rho(dga, &smooth0))
        };
        for f in &factors {
            prod = match prod {
                None => None,
                Some(p) => Some(dga.star(&p, f).expect("same carrier")),
            };
        }
        let mut unit_prod: Option<EqElem> = None;
        if !args[0].unit.is_zero() && k >= 1 {
            let mut p = factors[0].clone();
            for f in &factors[1..] {
                p = dga.star(&p, f).expect("same carrier");
            }
            unit_prod = Some(p);
        }
        // trailing insertions i_k
        let tail = tuple[k];
        let mut term = Scalar::zero();
        if let Some(mut p) = prod {
            for _ in 0..tail {
                p = dga.theta_r(&p);
            }
            term = term.add(&variant.apply(dga, &p));
        }
        if let Some(mut p) = unit_prod {
            for _ in 0..tail {
                p = dga.theta_r(&p);
            }
            term = term.add(&args[0].unit.mul(&variant.apply(dga, &p)));
        }
        if k == 0 && !args[0].unit.is_zero() {
            // pure multiplier trace on the adjoined unit
            let theta_tr = match variant {
                TraceVariant::Plain => dga.trace_theta_power(tail as usize),
                TraceVariant::Gamma(_) => Scalar::zero(),
            };
            term = term.add(&args[0].unit.mul(&theta_tr));
        }
        acc = acc.add(&term);
    }
    acc
}

/// Closed form of the untwisted top-degree component: the normalized
/// G^n-integral of a_0 (x) da_1 ^ ... ^ da_n with group transport, written
/// out directly over finite groups.
pub fn chern_untwisted_top(dga: &Dga) -> Result<Cochain, Error> {
    if dga.twist.is_some() {
        return Err(Error::Unsupported("untwisted closed form on a twisted carrier".into()));
    }
    let GroupDesc::Finite { .. } = dga.group else {
        return Err(Error::Unsupported(
            "closed-form untwisted cocycle needs a finite group".into(),
        ));
    };
    let dga = dga.clone();
    let n = dga.dim();
    Cochain::new(
        n + 1,
        true,
        Arc::new(move |args: &[AlgebraElem]| {
            let group = &dga.group;
            let dim = group.dim();
            let mut total = Scalar::zero();
            // iterate over (h_1, ..., h_n) in G^n
            let order = group.order().unwrap();
            let mut tuple = vec![0usize; n];
            loop {
                // value of a_0 at h_1: smooth part plus the adjoined unit,
                // which behaves as the point mass at e under counting Haar
                let h1 = tuple.first().map(|&t| t as GrpElt).unwrap_or(group.unit());
                let mut v0 = args[0].value_at(h1, dim);
                if !args[0].unit.is_zero() && h1 == group.unit() {
                    v0 = v0.add(&TorusForm::constant(dim, args[0].unit.clone()));
                }
                let mut acc = v0;
                let mut prefix = h1;
                for j in 1..=n {
                    if acc.is_zero() {
                        break;
                    }
                    let arg = if j < n {
                        tuple[j] as GrpElt
                    } else {
                        group.inv(group.product(&tuple.iter().map(|&t| t as GrpElt).collect::<Vec<_>>()))
                    };
                    let da = args[j].value_at(arg, dim).ext_d();
                    acc = acc.wedge(&group.act(prefix, &da)).expect("same dim");
                    if j < n {
                        prefix = group.mul(prefix, tuple[j] as GrpElt);
                    }
                }
                total = total.add(&acc.integrate_top());
                // advance the tuple
                let mut pos = 0;
                loop {
                    if pos == n {
                        break;
                    }
                    tuple[pos] += 1;
                    if tuple[pos] < order {
                        break;
                    }
                    tuple[pos] = 0;
                    pos += 1;
                }
                if pos == n {
                    break;
                }
            }
            total.mul_rat(&(Rat::from_integer(1.into()) / factorial(n)))
        }),
    )
    .pipe_ok()
}

trait PipeOk: Sized {
    fn pipe_ok(self) -> Result<Self, Error> {
        Ok(self)
    }
}
impl PipeOk for Cochain {}

/// Closed form of the twisted cocycle: the explicit sum over curvature
/// insertion tuples with prefactor (-1)^{(n-k)/2} / ((n+k)/2)!, computed by
/// direct transport over G^k without the carrier algebra machinery.
pub fn chern_twisted_closed(dga: &Dga, k: usize) -> Result<Cochain, Error> {
    let Some(twist) = dga.twist.clone() else {
        return Err(Error::Unsupported("twisted closed form needs a bundle".into()));
    };
    let GroupDesc::Finite { .. } = dga.group else {
        return Err(Error::Unsupported(
            "closed-form twisted cocycle needs a finite group".into(),
        ));
    };
    let n = dga.dim();
    if k > n || (n - k) % 2 != 0 {
        return Ok(Cochain::zero(k + 1));
    }
    let dga = dga.clone();
    let s = ((n - k) / 2) as u32;
    Cochain::new(
        k + 1,
        true,
        Arc::new(move |args: &[AlgebraElem]| {
            let group = &dga.group;
            let bundle = &twist.bundle;
            let dim = group.dim();
            let rank = bundle.rank;
            let curv = &twist.curv;
            let order = group.order().unwrap();
            let fpow = |i: u32| -> MatForm {
                let mut m = MatForm::identity(rank, dim);
                for _ in 0..i {
                    m = m.mul(curv);
                }
                m
            };
            let mut total = Scalar::zero();
            for tuple_ins in insertion_tuples(k + 1, s) {
                let mut gtuple = vec![0usize; k];
                loop {
                    let h1 = gtuple.first().map(|&t| t as GrpElt).unwrap_or(group.unit());
                    let mut v0 = args[0].value_at(h1, dim);
                    if !args[0].unit.is_zero() && h1 == group.unit() {
                        v0 = v0.add(&TorusForm::constant(dim, args[0].unit.clone()));
                    }
                    let mut acc = MatForm::scalar_form(rank, v0);
                    acc = acc.mul(&{
                        // (h_1^* F)^{i_0} arrives transported below with the
                        // first block, so start from the identity here
                        MatForm::identity(rank, dim)
                    });
                    let mut prefix = h1;
                    for j in 1..=k {
                        if acc.is_zero() {
                            break;
                        }
                        let arg = if j < k {
                            gtuple[j] as GrpElt
                        } else {
                            group.inv(group.product(
                                &gtuple.iter().map(|&t| t as GrpElt).collect::<Vec<_>>(),
                            ))
                        };
                        let aj = args[j].value_at(arg, dim);
                        let daj = MatForm::scalar_form(rank, aj.ext_d());
                        let delta_arg = twist.conn.delta_of_g(group, bundle, arg);
                        let block = fpow(tuple_ins[j - 1])
                            .mul(&daj.add(&MatForm::scalar_form(rank, aj).mul(&delta_arg)));
                        acc = acc.mul(&bundle.act_end(group, prefix, &block));
                        if j < k {
                            prefix = group.mul(prefix, gtuple[j] as GrpElt);
                        }
                    }
                    if k == 0 {
                        // no group integration; a_0 evaluated at the unit
                        acc = acc.mul(&fpow(tuple_ins[0]));
                        total = total.add(&acc.trace().integrate_top());
                        break;
                    }
                    acc = acc.mul(&fpow(tuple_ins[k]));
                    total = total.add(&acc.trace().integrate_top());
                    let mut pos = 0;
                    loop {
                        if pos == k {
                            break;
                        }
                        gtuple[pos] += 1;
                        if gtuple[pos] < order {
                            break;
                        }
                        gtuple[pos] = 0;
                        pos += 1;
                    }
                    if pos == k {
                        break;
                    }
                }
            }
            let sign = if s % 2 == 0 { 1 } else { -1 };
            let coeff = Rat::from_integer(sign.into()) / factorial((n + k) / 2);
            total.mul_rat(&coeff)
        }),
    )
    .pipe_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, trivial_group};
    use crate::scalar::rat;
    use crate::torus::AffineMap;

    #[test]
    fn simplex_values() {
        assert_eq!(simplex_integrate(&[0, 0]), rat(1, 1));
        assert_eq!(simplex_integrate(&[0, 0, 0]), rat(1, 2));
        assert_eq!(simplex_integrate(&[1, 0]), rat(1, 2));
        assert_eq!(simplex_integrate(&[1, 1]), rat(1, 6));
        assert_eq!(simplex_integrate(&[0]), rat(1, 1));
        assert_eq!(simplex_integrate(&[3]), rat(1, 1));
        // oracle: iterated one-dimensional integration of t0^a t1^b with
        // t0 = 1 - t1 over [0,1], expanded binomially
        let iterated = |a: u32, b: u32| -> Rat {
            let mut acc = Rat::from_integer(0.into());
            for j in 0..=a {
                let binom = factorial(a as usize)
                    / (factorial(j as usize) * factorial((a - j) as usize));
                let sign = if j % 2 == 0 { 1 } else { -1 };
                // integral of t^{b+j} over [0,1]
                acc += binom * rat(sign, (b + j + 1) as i64);
            }
            acc
        };
        for a in 0..4u32 {
            for b in 0..4u32 {
                assert_eq!(simplex_integrate(&[a, b]), iterated(a, b), "({}, {})", a, b);
            }
        }
    }

    #[test]
    fn b_of_trace_vanishes_and_b_squared() {
        let g = trivial_group(2, 4);
        let dga = Dga::untwisted(g.clone());
        // arity-1 trace tau(a) = integral of a over the torus at g = e
        let tau = {
            let dga = dga.clone();
            Cochain::new(
                1,
                true,
                Arc::new(move |args: &[AlgebraElem]| dga.trace(&rho(&dga, &args[0]))),
            )
        };
        let btau = cochain_b(&g, &tau);
        let a0 = AlgebraElem::basis_finite(&g, 0, vec![1, 0]);
        let a1 = AlgebraElem::basis_finite(&g, 0, vec![-1, 0]);
        assert!(btau.eval(&[a0.clone(), a1.clone()]).is_zero());
        let bbtau = cochain_b(&g, &btau);
        let a2 = AlgebraElem::basis_finite(&g, 0, vec![0, 1]);
        assert!(bbtau.eval(&[a0, a1, a2]).is_zero());
    }

    #[test]
    fn b_and_big_b_identities_on_samples() {
        let gen = AffineMap::new(vec![vec![0, -1], vec![1, 0]], vec![rat(0, 1); 2], 4).unwrap();
        let g = cyclic_group(4, gen).unwrap();
        let dga = Dga::untwisted(g.clone());
        let phi = jlo_generic(&dga, 2, TraceVariant::Plain);
        let samples = [
            AlgebraElem::basis_finite(&g, 1, vec![1, 0]),
            AlgebraElem::basis_finite(&g, 3, vec![0, 1]),
            AlgebraElem::basis_finite(&g, 0, vec![-1, -1]),
        ];
        // B^2 = 0 needs arity down to 0; check bB + Bb = 0 on a 2-cochain
        let lhs = cochain_b(&g, &cochain_big_b(&g, &phi));
        let rhs = cochain_big_b(&g, &cochain_b(&g, &phi));
        for a in &samples {
            for b in &samples {
                for c in &samples {
                    let t = [a.clone(), b.clone(), c.clone()];
                    assert_eq!(lhs.eval(&t), rhs.eval(&t).neg());
                }
            }
        }
    }

    #[test]
    fn trivial_group_jlo_matches_mode_oracle() {
        // k = 2 on T^2: Ch^2(a_0, a_1, a_2) = (1/2) int a_0 da_1 da_2
        let g = trivial_group(2, 4);
        let dga = Dga::untwisted(g.clone());
        let ch2 = jlo_generic(&dga, 2, TraceVariant::Plain);
        let a0 = AlgebraElem::basis_finite(&g, 0, vec![-1, -1]);
        let a1 = AlgebraElem::basis_finite(&g, 0, vec![1, 0]);
        let a2 = AlgebraElem::basis_finite(&g, 0, vec![0, 1]);
        let got = ch2.eval(&[a0.clone(), a1.clone(), a2.clone()]);
        // oracle value: (1/2) tau^2
        let expect = Scalar::tau_pow(crate::scalar::Cyclotomic::one(1), 2).mul_rat(&rat(1, 2));
        assert_eq!(got, expect);
        // closed form agrees
        let closed = chern_untwisted_top(&dga).unwrap();
        assert_eq!(closed.eval(&[a0.clone(), a1.clone(), a2.clone()]), expect);
        // normalization: adjoined unit in slot >= 1 kills the value
        let one = AlgebraElem::adjoined_unit(&g);
        assert!(ch2.eval(&[a0.clone(), one, a2]).is_zero());
        // degree concentration: k = 0 vanishes
        let ch0 = jlo_generic(&dga, 0, TraceVariant::Plain);
        assert!(ch0.eval(&[a0]).is_zero());
    }

    #[test]
    fn mode_sum_must_vanish() {
        let g = trivial_group(2, 4);
        let dga = Dga::untwisted(g.clone());
        let ch2 = jlo_generic(&dga, 2, TraceVariant::Plain);
        let a0 = AlgebraElem::basis_finite(&g, 0, vec![1, 1]);
        let a1 = AlgebraElem::basis_finite(&g, 0, vec![1, 0]);
        let a2 = AlgebraElem::basis_finite(&g, 0, vec![0, 1]);
        assert!(ch2.eval(&[a0, a1, a2]).is_zero());
    }

    #[test]
    fn group_support_bookkeeping() {
        // z2 translation subgroup: the value dies unless supports multiply to e
        let gen = AffineMap::translation(vec![rat(1, 2), rat(0, 1)], 4).unwrap();
        let g = cyclic_group(2, gen).unwrap();
        let dga = Dga::untwisted(g.clone());
        let ch2 = jlo_generic(&dga, 2, TraceVariant::Plain);
        let a0 = AlgebraElem::basis_finite(&g, 1, vec![-1, -1]);
        let a1 = AlgebraElem::basis_finite(&g, 0, vec![1, 0]);
        let a2 = AlgebraElem::basis_finite(&g, 0, vec![0, 1]);
        // supports multiply to the generator, not e
        assert!(ch2.eval(&[a0, a1, a2]).is_zero());
    }
}
