//! Acyclic quivers: Euler data, the initial cone diagram in N_ℝ, canonical
//! flow directions and the λ-line factorization.

use crate::diagram::{fmt_point, Diagram, Mode, PiecewisePath, Support, Wall};
use crate::error::{Error, Result};
use crate::group::{ordered_product, GroupElement};
use crate::lattice::{q, LatVec, SkewForm, SupportR2, Q};
use crate::lie::{Alg, LieAlgebra, LieElement};
use crate::rings::{Coefficient, RatV, Ring};
use crate::theta::{theta, theta_by_transport, Frame};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Nodes 1..r with arrow counts; arrows only go from lower to higher index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverData {
    pub r: usize,
    /// arrows[i][j] = number of arrows i → j (0-based).
    pub arrows: Vec<Vec<i64>>,
}

impl QuiverData {
    pub fn new(r: usize, list: &[(usize, usize, i64)]) -> Result<Self> {
        let mut arrows = vec![vec![0; r]; r];
        for &(i, j, c) in list {
            if i == 0 || j == 0 || i > r || j > r {
                return Err(Error::Precondition(format!("arrow {i}→{j} outside 1..{r}")));
            }
            if c < 0 {
                return Err(Error::Precondition("negative arrow count".into()));
            }
            arrows[i - 1][j - 1] += c;
        }
        let qd = QuiverData { r, arrows };
        qd.check_acyclic_order()?;
        Ok(qd)
    }

    pub fn a2() -> Self {
        QuiverData::new(2, &[(1, 2, 1)]).unwrap()
    }

    pub fn kronecker(k: i64) -> Self {
        QuiverData::new(2, &[(1, 2, k)]).unwrap()
    }

    fn check_acyclic_order(&self) -> Result<()> {
        for i in 0..self.r {
            for j in 0..=i {
                if self.arrows[i][j] != 0 {
                    return Err(Error::Precondition(format!(
                        "arrow {}→{} violates the acyclic node order (a_ji must vanish for i < j)",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// ω(f_i, f_j) = a_ji − a_ij.
    pub fn euler(&self) -> EulerData {
        let mat = (0..self.r)
            .map(|i| (0..self.r).map(|j| self.arrows[j][i] - self.arrows[i][j]).collect())
            .collect();
        EulerData { omega: SkewForm::new(mat).expect("antisymmetric by construction") }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerData {
    pub omega: SkewForm,
}

impl EulerData {
    /// p(m) with ⟨m', p(m)⟩ = ω(m', m).
    pub fn p(&self, m: &LatVec) -> LatVec {
        self.omega.p(m)
    }
}

/// v^m: −k f_i^∨ when m = k f_i, otherwise −p(m).
pub fn canonical_direction(m: &LatVec, e: &EulerData) -> Result<LatVec> {
    let nz: Vec<usize> = (0..m.rank()).filter(|&i| m.0[i] != 0).collect();
    if nz.len() == 1 {
        let i = nz[0];
        return Ok(LatVec::basis(m.rank(), i).scale(-m.0[i]));
    }
    if !e.omega.is_nondegenerate() {
        return Err(Error::Precondition("ω is degenerate".into()));
    }
    Ok(e.p(m).neg())
}

/// Σ_{j≥1} ẑ^{jm} / (j(v^j − v^{−j})) truncated at the order.
pub fn quantum_dilog_log(alg: &Alg, order: u32, m: &LatVec) -> LieElement {
    quantum_dilog_log_at(alg, order, m, 1)
}

/// The same series evaluated at s·ẑ^m for a sign s.
pub fn quantum_dilog_log_at(alg: &Alg, order: u32, m: &LatVec, s: i64) -> LieElement {
    let mut out = LieElement::zero(alg, order);
    let dm = alg.deg(m);
    let mut j = 1i64;
    while j * dm < order as i64 {
        let c = RatV::inv_v_difference(j).scale(&Q::new(s.pow(j as u32).into(), j.into()));
        out = out.add(&LieElement::quantum(alg, order, &m.scale(j), Coefficient::scalar(c)));
        j += 1;
    }
    out
}

pub fn quiver_algebra(qd: &QuiverData) -> Alg {
    LieAlgebra::quantum(qd.euler().omega, Ring::free())
}

/// The walls f_i^⊥ ⊂ N_ℝ carrying the quantum dilogarithm of ẑ^{f_i}.
pub fn initial_diagram(qd: &QuiverData, k: u32) -> Result<Diagram> {
    if k < 1 {
        return Err(Error::Precondition("order must be at least 1".into()));
    }
    let alg = quiver_algebra(qd);
    let mut d = Diagram::new(Mode::Cone, &alg, k);
    let r = qd.r;
    for i in 0..r {
        let f = LatVec::basis(r, i);
        let log = quantum_dilog_log(&alg, k, &f);
        let support = if r == 2 {
            Support::R2(SupportR2::line(vec![q(0), q(0)], LatVec::basis(2, 1 - i)))
        } else {
            Support::Cone(crate::diagram::HyperCone { normal: f.clone(), offset: Q::zero(), ineqs: vec![] })
        };
        d.push(Wall::new(Mode::Cone, f, None, support, GroupElement::exp(log))?.as_initial())?;
    }
    Ok(d)
}

/// λ(t) = (−1 + a_1 t, …, −1 + a_r t) on [0, 1].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaLine {
    pub slopes: Vec<Q>,
}

impl LambdaLine {
    pub fn new(slopes: Vec<Q>) -> Result<Self> {
        for w in slopes.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Precondition("λ slopes must increase".into()));
            }
        }
        if slopes.first().is_some_and(|a| *a <= Q::one()) {
            return Err(Error::Precondition("λ slopes must exceed 1 so that λ(1) is in the dual cone".into()));
        }
        Ok(LambdaLine { slopes })
    }

    /// Seeded slopes 1 < a_1 < ⋯ < a_r with large coprime denominators.
    pub fn seeded(r: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = Q::one();
        let mut slopes = Vec::with_capacity(r);
        for i in 0..r {
            let den: i64 = [1009, 1013, 1019, 1021, 1031, 1033][i % 6];
            let step = Q::new(rng.gen_range(den / 2..4 * den).into(), den.into());
            acc += step;
            slopes.push(acc.clone());
        }
        LambdaLine { slopes }
    }

    pub fn path(&self) -> PiecewisePath {
        let start: Vec<Q> = self.slopes.iter().map(|_| q(-1)).collect();
        let end: Vec<Q> = self.slopes.iter().map(|a| a - Q::one()).collect();
        PiecewisePath::new(vec![start, end])
    }
}

/// Θ_λ equals Θ_1 ⋯ Θ_r at order k. Errors when λ meets a joint.
pub fn lambda_factorization_check(d: &Diagram, lam: &LambdaLine, k: u32) -> Result<bool> {
    let path = lam.path();
    let lhs = d.path_ordered_product(&path, k)?;
    let inits: Vec<GroupElement> = d.walls.iter().filter(|w| w.initial).map(|w| w.theta.with_order(k)).collect();
    // Θ_1 ⋯ Θ_r: Θ_r acts first.
    let mut seq = inits.clone();
    seq.reverse();
    let rhs = ordered_product(&d.alg, k, &seq);
    Ok(lhs == rhs)
}

/// Exact genericity of λ at order k: it meets no joint and no support of
/// a non-initial wall that is nontrivial below order k.
pub fn lambda_is_generic(d: &Diagram, lam: &LambdaLine, k: u32) -> Result<bool> {
    let path = lam.path();
    match d.crossings(&path, k) {
        Ok(_) => {}
        Err(Error::HitsJoint(_)) | Err(Error::Tangent(_)) | Err(Error::VertexOnWall(_)) => return Ok(false),
        Err(e) => return Err(e),
    }
    let (a, b) = (&path.vertices[0], &path.vertices[1]);
    for w in d.truncated(k).walls.iter().filter(|w| !w.initial) {
        if w.support.meets_segment(a, b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws λ slopes until `lambda_is_generic` holds.
pub fn generic_lambda(d: &Diagram, k: u32, seed: u64) -> Result<LambdaLine> {
    for attempt in 0..64u64 {
        let lam = LambdaLine::seeded(d.rank(), seed.wrapping_add(attempt));
        if lambda_is_generic(d, &lam, k)? {
            return Ok(lam);
        }
    }
    Err(Error::NonGeneric(format!("no generic λ found near {}", fmt_point(&[q(-1)]))))
}

/// ϑ_{n,Q} by broken lines and by transport from int(σ^∨); the two must agree.
pub fn quiver_theta(d: &Diagram, n: &LatVec, qpt: &[Q], k: u32) -> Result<crate::lie::AlgElem> {
    if d.mode != Mode::Cone {
        return Err(Error::Precondition("quiver theta needs a cone diagram".into()));
    }
    if n.rank() != d.rank() {
        return Err(Error::RankMismatch { expected: d.rank(), got: n.rank() });
    }
    if n.is_zero() || n.0.iter().any(|&c| c < 0) {
        return Err(Error::NotInCone(format!("n = {n} must pair nonnegatively with the positive cone")));
    }
    let frame = Frame::Quiver(n.clone());
    let a = theta(d, &frame, qpt, k)?;
    let b = theta_by_transport(d, &frame, qpt, k)?;
    if a != b {
        return Err(Error::Disagreement(format!("broken lines {a:?} vs transport {b:?} at {}", fmt_point(qpt))));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::complete;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn euler_and_directions() {
        let a2 = QuiverData::a2().euler();
        assert_eq!(a2.omega.eval(&v(&[1, 0]), &v(&[0, 1])), -1);
        assert_eq!(canonical_direction(&v(&[1, 0]), &a2).unwrap(), v(&[-1, 0]));
        assert_eq!(canonical_direction(&v(&[1, 1]), &a2).unwrap(), v(&[1, -1]));
        let k2 = QuiverData::kronecker(2).euler();
        assert_eq!(canonical_direction(&v(&[1, 1]), &k2).unwrap(), v(&[2, -2]));
        assert!(QuiverData::new(2, &[(2, 1, 1)]).is_err());
    }

    #[test]
    fn a2_completion_single_wall() {
        let qd = QuiverData::a2();
        let d = initial_diagram(&qd, 6).unwrap();
        let c = complete(&d, 6).unwrap();
        assert_eq!(c.walls.len(), 3);
        let w = &c.walls[2];
        assert_eq!(w.m, v(&[1, 1]));
        assert_eq!(w.theta.log, quantum_dilog_log_at(&c.alg, 6, &v(&[1, 1]), -1));
        assert!(c.is_consistent(6).unwrap().is_none());
        let lam = generic_lambda(&c, 6, 1).unwrap();
        assert!(lambda_factorization_check(&c, &lam, 6).unwrap());
    }

    #[test]
    fn kronecker_factorization() {
        let qd = QuiverData::kronecker(2);
        let d = initial_diagram(&qd, 5).unwrap();
        let c = complete(&d, 5).unwrap();
        assert!(c.walls.len() > 3);
        assert!(c.is_consistent(5).unwrap().is_none());
        let lam = generic_lambda(&c, 5, 3).unwrap();
        assert!(lambda_is_generic(&c, &lam, 5).unwrap());
        assert!(lambda_factorization_check(&c, &lam, 5).unwrap());
        // A λ through the origin meets every wall.
        let bad = LambdaLine { slopes: vec![q(2), q(2)] };
        assert!(!lambda_is_generic(&c, &bad, 5).unwrap());
    }

    #[test]
    fn quiver_theta_in_dual_cone_is_monomial() {
        let c = complete(&initial_diagram(&QuiverData::a2(), 5).unwrap(), 5).unwrap();
        let n = v(&[1, 0]);
        let inside = quiver_theta(&c, &n, &[q(2), crate::lattice::qf(1, 3)], 5).unwrap();
        assert_eq!(inside.terms.len(), 1);
        // Across f_1^⊥ the wall acts nontrivially on z^n.
        let across = quiver_theta(&c, &n, &[q(-2), crate::lattice::qf(1, 3)], 5).unwrap();
        assert!(across.terms.len() > 1);
        assert!(quiver_theta(&c, &v(&[-1, 0]), &[q(1), q(1)], 5).is_err());
    }
}
