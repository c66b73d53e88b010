//! The M_σ^+-graded Lie algebra 𝔥 (classical vector fields or the quantum
//! torus) and its action on monomial algebras.

use crate::error::{Error, Result};
use crate::lattice::{pair, Grading, LatVec, SkewForm, Q};
use crate::rings::{Coefficient, LaurentV, RatV, Ring};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// z^m ∂_n acting by derivations on ℚ[M].
    Classical,
    /// Commutator Lie algebra of the quantum torus twisted by ω.
    Quantum(SkewForm),
}

/// The ambient algebra: rank, backend, grading and coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LieAlgebra {
    pub rank: usize,
    pub backend: Backend,
    pub grading: Grading,
    pub ring: Ring,
}

pub type Alg = Arc<LieAlgebra>;

impl LieAlgebra {
    pub fn classical(rank: usize, ring: Ring) -> Alg {
        Arc::new(LieAlgebra { rank, backend: Backend::Classical, grading: Grading::standard(rank), ring })
    }
    pub fn quantum(omega: SkewForm, ring: Ring) -> Alg {
        let rank = omega.rank();
        Arc::new(LieAlgebra { rank, backend: Backend::Quantum(omega), grading: Grading::standard(rank), ring })
    }
    pub fn with_grading(&self, grading: Grading) -> Result<Alg> {
        if grading.rank() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: grading.rank() });
        }
        Ok(Arc::new(LieAlgebra { grading, ..self.clone() }))
    }
    pub fn is_quantum(&self) -> bool {
        matches!(self.backend, Backend::Quantum(_))
    }
    pub fn omega(&self) -> Option<&SkewForm> {
        match &self.backend {
            Backend::Quantum(w) => Some(w),
            Backend::Classical => None,
        }
    }
    /// Number of coefficient slots per homogeneous term.
    pub fn slots(&self) -> usize {
        match self.backend {
            Backend::Classical => self.rank,
            Backend::Quantum(_) => 1,
        }
    }
    pub fn deg(&self, m: &LatVec) -> i64 {
        self.grading.eval(m)
    }
    /// The tropical n-line of a quantum term: primitive(p(m)).
    pub fn quantum_n(&self, m: &LatVec) -> Result<LatVec> {
        let w = self.omega().ok_or_else(|| Error::Mismatch("quantum_n on classical backend".into()))?;
        let p = w.p(m);
        if p.is_zero() {
            return Err(Error::Precondition(format!("p({m}) = 0: ω is degenerate on this direction")));
        }
        Ok(p.primitive().lex_positive().0)
    }
}

/// (v^k − v^{−k}) as a coefficient scalar.
fn vdiff(k: i64) -> RatV {
    LaurentV::v_difference(k).into()
}

/// A truncated element of 𝔥^{<k}. Classical terms store the vector
/// coefficient (c_1,…,c_r) of z^m Σ c_j ∂_{e_j}; quantum terms store c of c·ẑ^m.
#[derive(Clone, PartialEq, Eq)]
pub struct LieElement {
    pub alg: Alg,
    pub order: u32,
    terms: BTreeMap<LatVec, Vec<Coefficient>>,
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match self.alg.backend {
                Backend::Quantum(_) => write!(f, "[{:?}]z^{m}", c[0])?,
                Backend::Classical => write!(f, "z^{m}{c:?}")?,
            }
        }
        Ok(())
    }
}

/// The n-line data of a homogeneous block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Line(LatVec),
    Mixed,
}

fn is_zero_vec(c: &[Coefficient]) -> bool {
    c.iter().all(|x| x.is_zero())
}

impl LieElement {
    pub fn zero(alg: &Alg, order: u32) -> Self {
        LieElement { alg: alg.clone(), order, terms: BTreeMap::new() }
    }
    /// Classical c·z^m ∂_n.
    pub fn classical(alg: &Alg, order: u32, m: &LatVec, n: &LatVec, c: Coefficient) -> Self {
        let comps = n.0.iter().map(|&x| c.scale_int(x)).collect();
        let mut e = Self::zero(alg, order);
        e.add_term(m, comps);
        e
    }
    /// Quantum c·ẑ^m.
    pub fn quantum(alg: &Alg, order: u32, m: &LatVec, c: Coefficient) -> Self {
        let mut e = Self::zero(alg, order);
        e.add_term(m, vec![c]);
        e
    }
    /// Adds a raw term, dropping it when its degree reaches the order.
    pub fn add_term(&mut self, m: &LatVec, comps: Vec<Coefficient>) {
        assert_eq!(comps.len(), self.alg.slots(), "coefficient slot count");
        if self.alg.deg(m) >= self.order as i64 || is_zero_vec(&comps) {
            return;
        }
        match self.terms.get_mut(m) {
            Some(cur) => {
                for (a, b) in cur.iter_mut().zip(&comps) {
                    a.add_assign(b);
                }
                if is_zero_vec(cur) {
                    self.terms.remove(m);
                }
            }
            None => {
                self.terms.insert(m.clone(), comps);
            }
        }
    }
    pub fn terms(&self) -> &BTreeMap<LatVec, Vec<Coefficient>> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    fn check(&self, o: &LieElement) -> Result<()> {
        if self.alg != o.alg {
            return Err(Error::Mismatch("different Lie algebras".into()));
        }
        if self.order != o.order {
            return Err(Error::Mismatch(format!("orders {} and {}", self.order, o.order)));
        }
        Ok(())
    }
    pub fn add(&self, o: &LieElement) -> LieElement {
        self.check(o).expect("add");
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m, c.clone());
        }
        r
    }
    pub fn sub(&self, o: &LieElement) -> LieElement {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> LieElement {
        self.map_coeffs(|c| c.neg())
    }
    pub fn scale(&self, x: &Q) -> LieElement {
        self.map_coeffs(|c| c.scale(x))
    }
    pub fn scale_coeff(&self, x: &Coefficient) -> LieElement {
        let ring = self.alg.ring;
        self.map_coeffs(|c| c.mul(x, &ring))
    }
    fn map_coeffs(&self, f: impl Fn(&Coefficient) -> Coefficient) -> LieElement {
        let mut r = LieElement::zero(&self.alg, self.order);
        for (m, c) in &self.terms {
            r.add_term(m, c.iter().map(&f).collect());
        }
        r
    }
    /// Reinterpret at a new order, dropping terms of degree ≥ order.
    pub fn with_order(&self, order: u32) -> LieElement {
        let mut r = LieElement::zero(&self.alg, order);
        for (m, c) in &self.terms {
            r.add_term(m, c.clone());
        }
        r
    }
    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| self.alg.deg(m)).min()
    }
    /// The part of exact degree d.
    pub fn degree_part(&self, d: i64) -> LieElement {
        let mut r = LieElement::zero(&self.alg, self.order);
        for (m, c) in &self.terms {
            if self.alg.deg(m) == d {
                r.add_term(m, c.clone());
            }
        }
        r
    }
    /// Split into blocks indexed by primitive direction of m.
    pub fn blocks(&self) -> BTreeMap<LatVec, LieElement> {
        let mut out: BTreeMap<LatVec, LieElement> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.primitive())
                .or_insert_with(|| LieElement::zero(&self.alg, self.order))
                .add_term(m, c.clone());
        }
        out
    }
    /// The homogeneous component at m.
    pub fn component(&self, m: &LatVec) -> Option<&Vec<Coefficient>> {
        self.terms.get(m)
    }

    /// [self, o] truncated at the common order.
    pub fn bracket(&self, o: &LieElement) -> LieElement {
        self.check(o).expect("bracket");
        let mut r = LieElement::zero(&self.alg, self.order);
        let ring = self.alg.ring;
        for (m1, a) in &self.terms {
            let d1 = self.alg.deg(m1);
            for (m2, b) in &o.terms {
                if d1 + self.alg.deg(m2) >= self.order as i64 {
                    continue;
                }
                let m = m1.add(m2);
                match &self.alg.backend {
                    Backend::Classical => {
                        // z^{m1+m2}(⟨m2,a⟩ b − ⟨m1,b⟩ a)
                        let mut pa = Coefficient::zero();
                        let mut pb = Coefficient::zero();
                        for j in 0..self.alg.rank {
                            if m2.0[j] != 0 {
                                pa.add_assign(&a[j].scale_int(m2.0[j]));
                            }
                            if m1.0[j] != 0 {
                                pb.add_assign(&b[j].scale_int(m1.0[j]));
                            }
                        }
                        let comps: Vec<Coefficient> =
                            (0..self.alg.rank).map(|j| pa.mul(&b[j], &ring).sub(&pb.mul(&a[j], &ring))).collect();
                        r.add_term(&m, comps);
                    }
                    Backend::Quantum(w) => {
                        let om = w.eval(m1, m2);
                        if om == 0 {
                            continue;
                        }
                        let c = a[0].mul(&b[0], &ring).scale_ratv(&vdiff(om));
                        r.add_term(&m, vec![c]);
                    }
                }
            }
        }
        r
    }

    /// For each block of primitive direction, the common n-line.
    pub fn tropical_membership(&self) -> BTreeMap<LatVec, Membership> {
        let mut out = BTreeMap::new();
        for (m0, blk) in self.blocks() {
            let mut line: Option<LatVec> = None;
            let mut mixed = false;
            for (m, c) in &blk.terms {
                let n = match &self.alg.backend {
                    Backend::Quantum(_) => self.alg.quantum_n(m).ok(),
                    Backend::Classical => classical_n_line(c),
                };
                match (n, &line) {
                    (None, _) => mixed = true,
                    (Some(n), None) => line = Some(n),
                    (Some(n), Some(l)) => {
                        if n != *l {
                            mixed = true
                        }
                    }
                }
            }
            out.insert(m0, if mixed { Membership::Mixed } else { Membership::Line(line.unwrap()) });
        }
        out
    }

    /// Coefficient c with this element's block at m equal to c·z^m ∂_n
    /// (classical) or c·ẑ^m (quantum).
    pub fn scalar_along(&self, m: &LatVec, n: &LatVec) -> Option<Coefficient> {
        let c = self.terms.get(m)?;
        match self.alg.backend {
            Backend::Quantum(_) => Some(c[0].clone()),
            Backend::Classical => {
                let j = n.0.iter().position(|&x| x != 0)?;
                let s = c[j].scale(&crate::lattice::qf(1, n.0[j]));
                let back: Vec<Coefficient> = n.0.iter().map(|&x| s.scale_int(x)).collect();
                if back == *c {
                    Some(s)
                } else {
                    None
                }
            }
        }
    }
}

/// Primitive lex-positive n with c ∝ n, if the vector is rank one.
pub fn classical_n_line(c: &[Coefficient]) -> Option<LatVec> {
    let j0 = c.iter().position(|x| !x.is_zero())?;
    let mut ratios: Vec<Q> = Vec::with_capacity(c.len());
    for x in c {
        let r = x.ratio(&c[j0])?;
        ratios.push(r.as_constant()?);
    }
    // Clear denominators.
    let mut l = num_bigint::BigInt::from(1);
    for r in &ratios {
        l = num_integer::Integer::lcm(&l, r.denom());
    }
    let ints: Vec<i64> = ratios
        .iter()
        .map(|r| {
            let v = r * Q::from_integer(l.clone());
            i64::try_from(v.to_integer()).ok()
        })
        .collect::<Option<Vec<i64>>>()?;
    Some(LatVec(ints).primitive().lex_positive().0)
}

/// A truncated element of the monomial algebra: a base exponent plus finitely
/// many offsets in M_σ. Classical monomials are z^{base_m + o}; quantum ones
/// are ẑ^{(base_m + o, base_n)}.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgElem {
    pub alg: Alg,
    pub order: u32,
    pub base_m: LatVec,
    pub base_n: Option<LatVec>,
    pub terms: BTreeMap<LatVec, Coefficient>,
}

impl fmt::Debug for AlgElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "base({}", self.base_m)?;
        if let Some(n) = &self.base_n {
            write!(f, ";{n}")?;
        }
        write!(f, ")[")?;
        let parts: Vec<String> = self.terms.iter().map(|(o, c)| format!("{o}:{c:?}")).collect();
        write!(f, "{}]", parts.join(", "))
    }
}

impl AlgElem {
    pub fn zero(alg: &Alg, order: u32, base_m: LatVec, base_n: Option<LatVec>) -> Self {
        AlgElem { alg: alg.clone(), order, base_m, base_n, terms: BTreeMap::new() }
    }
    /// z^m (classical).
    pub fn monomial(alg: &Alg, order: u32, m: &LatVec) -> Self {
        let mut e = Self::zero(alg, order, m.clone(), None);
        e.add_term(&LatVec::zero(alg.rank), Coefficient::one());
        e
    }
    /// ẑ^{(m,n)} (quantum).
    pub fn qmonomial(alg: &Alg, order: u32, m: &LatVec, n: &LatVec) -> Self {
        let mut e = Self::zero(alg, order, m.clone(), Some(n.clone()));
        e.add_term(&LatVec::zero(alg.rank), Coefficient::one());
        e
    }
    pub fn add_term(&mut self, o: &LatVec, c: Coefficient) {
        if c.is_zero() || self.alg.deg(o) >= self.order as i64 {
            return;
        }
        match self.terms.get_mut(o) {
            Some(cur) => {
                cur.add_assign(&c);
                if cur.is_zero() {
                    self.terms.remove(o);
                }
            }
            None => {
                self.terms.insert(o.clone(), c);
            }
        }
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn same_frame(&self, o: &AlgElem) -> bool {
        self.alg == o.alg && self.base_m == o.base_m && self.base_n == o.base_n
    }
    pub fn add(&self, o: &AlgElem) -> AlgElem {
        assert!(self.same_frame(o), "adding algebra elements with different bases");
        let mut r = self.clone();
        r.order = self.order.min(o.order);
        r = r.with_order(r.order);
        for (k, c) in &o.terms {
            r.add_term(k, c.clone());
        }
        r
    }
    pub fn sub(&self, o: &AlgElem) -> AlgElem {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> AlgElem {
        let mut r = self.clone();
        for c in r.terms.values_mut() {
            *c = c.neg();
        }
        r
    }
    pub fn scale(&self, x: &Q) -> AlgElem {
        let mut r = Self::zero(&self.alg, self.order, self.base_m.clone(), self.base_n.clone());
        for (k, c) in &self.terms {
            r.add_term(k, c.scale(x));
        }
        r
    }
    pub fn with_order(&self, order: u32) -> AlgElem {
        let mut r = Self::zero(&self.alg, order, self.base_m.clone(), self.base_n.clone());
        for (k, c) in &self.terms {
            r.add_term(k, c.clone());
        }
        r
    }
    /// The single term at offset o, as an algebra element.
    pub fn homogeneous(&self, o: &LatVec) -> AlgElem {
        let mut r = Self::zero(&self.alg, self.order, self.base_m.clone(), self.base_n.clone());
        if let Some(c) = self.terms.get(o) {
            r.add_term(o, c.clone());
        }
        r
    }
    pub fn coeff(&self, o: &LatVec) -> Coefficient {
        self.terms.get(o).cloned().unwrap_or_default()
    }

    /// g·self.
    pub fn act(&self, g: &LieElement) -> AlgElem {
        assert_eq!(self.alg, g.alg, "act across algebras");
        let ring = self.alg.ring;
        let mut r = Self::zero(&self.alg, self.order, self.base_m.clone(), self.base_n.clone());
        for (mg, a) in g.terms() {
            let dg = self.alg.deg(mg);
            for (o, c) in &self.terms {
                if dg + self.alg.deg(o) >= self.order as i64 {
                    continue;
                }
                let full = self.base_m.add(o);
                let factor = match &self.alg.backend {
                    Backend::Classical => {
                        let mut s = Coefficient::zero();
                        for j in 0..self.alg.rank {
                            if full.0[j] != 0 {
                                s.add_assign(&a[j].scale_int(full.0[j]));
                            }
                        }
                        s
                    }
                    Backend::Quantum(w) => {
                        let n = self.base_n.as_ref().expect("quantum monomial without n");
                        let om = w.eval(mg, &full) + pair(mg, n);
                        if om == 0 {
                            continue;
                        }
                        a[0].scale_ratv(&vdiff(om))
                    }
                };
                if factor.is_zero() {
                    continue;
                }
                r.add_term(&o.add(mg), factor.mul(c, &ring));
            }
        }
        r
    }

    /// Algebra product; bases add.
    pub fn mul(&self, o: &AlgElem) -> AlgElem {
        assert_eq!(self.alg, o.alg);
        let ring = self.alg.ring;
        let order = self.order.min(o.order);
        let base_n = match (&self.base_n, &o.base_n) {
            (Some(a), Some(b)) => Some(a.add(b)),
            (None, None) => None,
            _ => panic!("mixed classical and quantum monomials"),
        };
        let mut r = Self::zero(&self.alg, order, self.base_m.add(&o.base_m), base_n);
        for (o1, c1) in &self.terms {
            for (o2, c2) in &o.terms {
                let mut c = c1.mul(c2, &ring);
                if let Backend::Quantum(w) = &self.alg.backend {
                    let m1 = self.base_m.add(o1);
                    let m2 = o.base_m.add(o2);
                    let n1 = self.base_n.as_ref().unwrap();
                    let n2 = o.base_n.as_ref().unwrap();
                    let om = w.eval(&m1, &m2) + pair(&m1, n2) - pair(&m2, n1);
                    c = c.scale_ratv(&LaurentV::v(om as i32).into());
                }
                r.add_term(&o1.add(o2), c);
            }
        }
        r
    }

    /// Lowest degree among offsets, or None when zero.
    pub fn min_offset_degree(&self) -> Option<i64> {
        self.terms.keys().map(|o| self.alg.deg(o)).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Var;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn classical_bracket_examples() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let x = LieElement::classical(&alg, 8, &v(&[1, 0]), &v(&[0, 1]), Coefficient::one());
        let y = LieElement::classical(&alg, 8, &v(&[0, 1]), &v(&[-1, 0]), Coefficient::one());
        let e = LieElement::classical(&alg, 8, &v(&[1, 1]), &v(&[-1, 1]), Coefficient::one());
        assert_eq!(x.bracket(&y), e);
        let z = LieElement::classical(&alg, 8, &v(&[2, 0]), &v(&[0, 1]), Coefficient::one());
        assert!(x.bracket(&z).is_zero());
    }

    #[test]
    fn quantum_bracket_example() {
        let w = SkewForm::new(vec![vec![0, -1], vec![1, 0]]).unwrap();
        let alg = LieAlgebra::quantum(w, Ring::free());
        let x = LieElement::quantum(&alg, 8, &v(&[1, 0]), Coefficient::one());
        let y = LieElement::quantum(&alg, 8, &v(&[0, 1]), Coefficient::one());
        let expect = LieElement::quantum(&alg, 8, &v(&[1, 1]), Coefficient::laurent(LaurentV::v_difference(-1)));
        assert_eq!(x.bracket(&y), expect);
        let mem = x.bracket(&y).tropical_membership();
        assert_eq!(mem[&v(&[1, 1])], Membership::Line(v(&[1, -1])));
    }

    #[test]
    fn action_examples() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let g = LieElement::classical(&alg, 8, &v(&[1, 0]), &v(&[0, 1]), Coefficient::one());
        let a = AlgElem::monomial(&alg, 8, &v(&[0, 2]));
        let r = a.act(&g);
        assert_eq!(r.terms.len(), 1);
        assert_eq!(r.coeff(&v(&[1, 0])), Coefficient::int(2));
        assert!(AlgElem::monomial(&alg, 8, &v(&[3, 0])).act(&g).is_zero());

        let w = SkewForm::new(vec![vec![0, 3], vec![-3, 0]]).unwrap();
        let qa = LieAlgebra::quantum(w, Ring::free());
        let g = LieElement::quantum(&qa, 8, &v(&[1, 0]), Coefficient::one());
        let z = AlgElem::qmonomial(&qa, 8, &v(&[0, 0]), &v(&[0, 5]));
        assert!(z.act(&g).is_zero());
    }

    #[test]
    fn membership_examples() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let a = LieElement::classical(&alg, 8, &v(&[1, 0]), &v(&[0, 1]), Coefficient::one());
        let b = LieElement::classical(&alg, 8, &v(&[1, 0]), &v(&[0, 2]), Coefficient::var(Var::T(1)));
        assert_eq!(a.tropical_membership()[&v(&[1, 0])], Membership::Line(v(&[0, 1])));
        assert_eq!(a.add(&b).tropical_membership()[&v(&[1, 0])], Membership::Line(v(&[0, 1])));
        let alg3 = LieAlgebra::classical(3, Ring::free());
        let c = LieElement::classical(&alg3, 8, &v(&[1, 0, 0]), &v(&[0, 1, 0]), Coefficient::one());
        let d = LieElement::classical(&alg3, 8, &v(&[1, 0, 0]), &v(&[0, 0, 1]), Coefficient::var(Var::T(1)));
        assert_eq!(c.add(&d).tropical_membership()[&v(&[1, 0, 0])], Membership::Mixed);
    }
}
