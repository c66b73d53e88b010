//! The pro-nilpotent group exp(𝔥^{<k}) in log coordinates.

use crate::lattice::Q;
use crate::lie::{AlgElem, Alg, LieElement};
use crate::rings::{bernoulli, factorial};
use num_traits::Zero;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupElement {
    pub log: LieElement,
}

impl GroupElement {
    pub fn identity(alg: &Alg, order: u32) -> Self {
        GroupElement { log: LieElement::zero(alg, order) }
    }
    pub fn exp(log: LieElement) -> Self {
        GroupElement { log }
    }
    pub fn order(&self) -> u32 {
        self.log.order
    }
    pub fn alg(&self) -> &Alg {
        &self.log.alg
    }
    pub fn is_identity(&self) -> bool {
        self.log.is_zero()
    }
    pub fn inverse(&self) -> Self {
        GroupElement { log: self.log.neg() }
    }
    /// self^ε for ε ∈ {+1, −1}.
    pub fn signed(&self, eps: i32) -> Self {
        if eps >= 0 {
            self.clone()
        } else {
            self.inverse()
        }
    }
    pub fn with_order(&self, order: u32) -> Self {
        GroupElement { log: self.log.with_order(order) }
    }
    /// self · o.
    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement { log: bch(&self.log, &o.log) }
    }
    /// Action on an algebra element: Σ_j (log·)^j a / j!.
    pub fn apply(&self, a: &AlgElem) -> AlgElem {
        let mut out = a.clone();
        let mut term = a.clone();
        let mut j: i64 = 1;
        loop {
            term = term.act(&self.log);
            if term.is_zero() {
                break;
            }
            term = term.scale(&Q::new(1.into(), j.into()));
            out = out.add(&term);
            j += 1;
        }
        out
    }
}

/// log(exp(x)·exp(y)) truncated at the common order, by the recursion
/// (n+1)Z_{n+1} = ½[x−y, Z_n] + Σ_p B_{2p}/(2p)! Σ_{k_1+…+k_{2p}=n} [Z_{k_1},[…,[Z_{k_{2p}}, x+y]…]],
/// where Z_n collects the words of length n. Each word of length n has
/// degree at least n, so only n < k contributes.
pub fn bch(x: &LieElement, y: &LieElement) -> LieElement {
    if x.is_zero() {
        return y.clone();
    }
    if y.is_zero() {
        return x.clone();
    }
    let k = x.order as usize;
    let s = x.add(y);
    let comm = x.bracket(y);
    if comm.is_zero() {
        return s;
    }
    let d = x.sub(y);
    let b = bernoulli(k + 1);
    // z[n] for n ≥ 1; w[j][t] = Σ over compositions of t into j parts.
    let mut z: Vec<LieElement> = vec![LieElement::zero(&x.alg, x.order), s.clone()];
    let zero = LieElement::zero(&x.alg, x.order);
    let mut w: Vec<Vec<Option<LieElement>>> = vec![vec![None; k + 1]; k + 1];
    w[0][0] = Some(s.clone());
    for t in 1..=k {
        w[0][t] = Some(zero.clone());
    }
    let mut result = s.clone();
    for n in 1..k {
        let mut t = d.bracket(&z[n]).scale(&Q::new(1.into(), 2.into()));
        let mut p = 1;
        while 2 * p <= n {
            let coef = &b[2 * p] / factorial(2 * p as u32);
            if !coef.is_zero() {
                let wn = w_entry(&mut w, &z, 2 * p, n, &zero);
                t = t.add(&wn.scale(&coef));
            }
            p += 1;
        }
        let zn1 = t.scale(&Q::new(1.into(), (n as i64 + 1).into()));
        result = result.add(&zn1);
        z.push(zn1);
    }
    result
}

fn w_entry(
    w: &mut Vec<Vec<Option<LieElement>>>,
    z: &[LieElement],
    j: usize,
    t: usize,
    zero: &LieElement,
) -> LieElement {
    if let Some(e) = &w[j][t] {
        return e.clone();
    }
    let mut acc = zero.clone();
    if t >= j && j > 0 {
        for kk in 1..=(t + 1 - j) {
            if kk >= z.len() {
                break;
            }
            let inner = w_entry(w, z, j - 1, t - kk, zero);
            if !inner.is_zero() && !z[kk].is_zero() {
                acc = acc.add(&z[kk].bracket(&inner));
            }
        }
    }
    w[j][t] = Some(acc.clone());
    acc
}

/// Product g_s ⋯ g_1 of a sequence listed in application order g_1, …, g_s.
pub fn ordered_product(alg: &Alg, order: u32, seq: &[GroupElement]) -> GroupElement {
    let mut g = GroupElement::identity(alg, order);
    for h in seq {
        g = h.mul(&g);
    }
    g
}

/// Compare two group elements through their action on probe monomials.
pub fn automorphism_equal(a: &GroupElement, b: &GroupElement, probes: &[AlgElem]) -> bool {
    probes.iter().all(|p| a.apply(p) == b.apply(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{q, LatVec, SkewForm};
    use crate::lie::LieAlgebra;
    use crate::rings::{Coefficient, Ring, Var};

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    fn two_wall_pair(order: u32) -> (Alg, LieElement, LieElement) {
        let alg = LieAlgebra::classical(2, Ring::free());
        let x = LieElement::classical(&alg, order, &v(&[1, 0]), &v(&[0, 1]), Coefficient::var(Var::T(1)));
        let y = LieElement::classical(&alg, order, &v(&[0, 1]), &v(&[1, 0]), Coefficient::var(Var::T(2)));
        (alg, x, y)
    }

    #[test]
    fn bch_central_commutator() {
        // At order 3 every double commutator vanishes.
        let (_, x, y) = two_wall_pair(3);
        let expect = x.add(&y).add(&x.bracket(&y).scale(&Q::new(1.into(), 2.into())));
        assert_eq!(bch(&x, &y), expect);
        let t = x.bracket(&y);
        let lead = t.component(&v(&[1, 1])).unwrap().clone();
        // ½ t1t2 z^{(1,1)}∂_{(1,−1)} after halving.
        let two = Coefficient::var(Var::T(1)).mul(&Coefficient::var(Var::T(2)), &Ring::free());
        assert_eq!(lead, vec![two.clone(), two.neg()]);
    }

    #[test]
    fn bch_identity_and_inverse() {
        let (alg, x, y) = two_wall_pair(6);
        let a = GroupElement::exp(x.add(&y.scale(&q(3))));
        let id = GroupElement::identity(&alg, 6);
        assert_eq!(a.mul(&id), a);
        assert!(a.mul(&a.inverse()).is_identity());
    }

    #[test]
    fn action_is_homomorphism_classical() {
        let (alg, x, y) = two_wall_pair(7);
        let a = GroupElement::exp(x.clone());
        let b = GroupElement::exp(y.add(&x.bracket(&y)));
        let ab = a.mul(&b);
        for m in [v(&[0, 1]), v(&[1, 0]), v(&[2, -1]), v(&[-1, 3])] {
            let z = AlgElem::monomial(&alg, 7, &m);
            assert_eq!(ab.apply(&z), a.apply(&b.apply(&z)), "probe {m}");
        }
    }

    #[test]
    fn action_is_homomorphism_quantum() {
        let w = SkewForm::new(vec![vec![0, -2], vec![2, 0]]).unwrap();
        let alg = LieAlgebra::quantum(w, Ring::free());
        let x = LieElement::quantum(&alg, 6, &v(&[1, 0]), Coefficient::one())
            .add(&LieElement::quantum(&alg, 6, &v(&[2, 1]), Coefficient::int(3)));
        let y = LieElement::quantum(&alg, 6, &v(&[0, 1]), Coefficient::one());
        let a = GroupElement::exp(x);
        let b = GroupElement::exp(y);
        let ab = a.mul(&b);
        for n in [v(&[1, 0]), v(&[0, 1]), v(&[1, 1])] {
            let z = AlgElem::qmonomial(&alg, 6, &v(&[0, 0]), &n);
            assert_eq!(ab.apply(&z), a.apply(&b.apply(&z)));
        }
        assert!(!automorphism_equal(&ab, &b.mul(&a), &[AlgElem::qmonomial(&alg, 6, &v(&[0, 0]), &v(&[1, 1]))]));
    }

    #[test]
    fn wall_automorphism_closed_form() {
        // log(1 + t x)∂_{(0,1)} acts on z^{(0,1)} as multiplication by 1 + t x.
        let alg = LieAlgebra::classical(2, Ring::free());
        let order = 6;
        let mut log = LieElement::zero(&alg, order);
        let t = Coefficient::var(Var::T(1));
        let mut tp = Coefficient::one();
        for j in 1..order as i64 {
            tp = tp.mul(&t, &Ring::free());
            let c = tp.scale(&Q::new(if j % 2 == 1 { 1.into() } else { (-1).into() }, j.into()));
            log = log.add(&LieElement::classical(&alg, order, &v(&[j, 0]), &v(&[0, 1]), c));
        }
        let g = GroupElement::exp(log);
        let out = g.apply(&AlgElem::monomial(&alg, order, &v(&[0, 1])));
        let mut expect = AlgElem::monomial(&alg, order, &v(&[0, 1]));
        expect.add_term(&v(&[1, 0]), t.clone());
        assert_eq!(out, expect);
        // And on z^{(0,2)} as (1 + t x)^2.
        let out2 = g.apply(&AlgElem::monomial(&alg, order, &v(&[0, 2])));
        assert_eq!(out2.coeff(&v(&[1, 0])), t.scale_int(2));
        assert_eq!(out2.coeff(&v(&[2, 0])), t.mul(&t, &Ring::free()));
        assert_eq!(out2.terms.len(), 3);
    }
}
