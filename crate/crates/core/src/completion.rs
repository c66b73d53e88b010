//! Order-by-order consistent completion in rank 2, and perturbation of
//! initial diagrams.

use crate::diagram::{fmt_point, rot90, Diagram, Mode, Support, Wall};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{fmt_q, q, qf, LatVec, SupportKind, SupportR2, Q};
use crate::lie::{Backend, LieElement};
use crate::rings::{factorial, Coefficient, NilMono, Var};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Direction of the new ray for a discrepancy block along m0.
fn outgoing_direction(d: &Diagram, m0: &LatVec) -> Result<LatVec> {
    match d.mode {
        Mode::Tropical => Ok(m0.neg()),
        Mode::Cone => {
            let w = d.alg.omega().ok_or_else(|| Error::Precondition("cone mode needs the quantum backend".into()))?;
            let p = w.p(m0);
            if p.is_zero() {
                return Err(Error::Precondition(format!("p({m0}) = 0: degenerate skew form")));
            }
            Ok(p.neg().primitive())
        }
    }
}

fn check_input(d: &Diagram) -> Result<()> {
    if d.rank() != 2 {
        return Err(Error::Unsupported(format!("completion is implemented in rank 2, got rank {}", d.rank())));
    }
    let origin = vec![Q::zero(), Q::zero()];
    for w in &d.walls {
        let s = w.support.r2().ok_or_else(|| Error::Precondition("rank-2 walls need line or ray supports".into()))?;
        if d.mode == Mode::Cone {
            let through = match s.kind {
                SupportKind::Line => s.contains(&origin),
                SupportKind::Ray => s.base == origin,
            };
            if !through {
                return Err(Error::Precondition("cone-mode walls must pass through the origin".into()));
            }
        }
    }
    if d.mode == Mode::Cone && !d.alg.is_quantum() {
        return Err(Error::Precondition("cone mode needs the quantum backend".into()));
    }
    Ok(())
}

/// A diagram consistent to order k containing d_in, obtained by adding
/// outgoing rays. Initial walls are kept as they are.
pub fn complete(d_in: &Diagram, k: u32) -> Result<Diagram> {
    check_input(d_in)?;
    let mut d = Diagram { order: k, ..d_in.clone() };
    d.walls = d_in.walls.iter().map(|w| Wall { theta: w.theta.with_order(k), ..w.clone() }).collect();
    for deg in 1..k {
        let cur = d.truncated(deg + 1);
        let joints = cur.joints()?;
        let mut fresh: Vec<Wall> = Vec::new();
        for p in &joints {
            let h = cur.germ_loop_log(p, deg + 1)?;
            if h.is_zero() {
                continue;
            }
            if h.min_degree() != Some(deg as i64) {
                return Err(Error::NonCentral {
                    degree: deg,
                    detail: format!("lower-degree discrepancy at {}", fmt_point(p)),
                });
            }
            for (m0, block) in h.blocks() {
                fresh.push(new_ray(&d, p, &m0, &block, deg)?);
            }
        }
        for w in fresh {
            d.add_or_merge(w)?;
        }
    }
    Ok(d)
}

fn new_ray(d: &Diagram, p: &[Q], m0: &LatVec, block: &LieElement, deg: u32) -> Result<Wall> {
    let dir = outgoing_direction(d, m0)?;
    let support = Support::R2(SupportR2::ray(p.to_vec(), dir.clone()));
    let n = match d.mode {
        Mode::Tropical => Some(rot90(&dir).primitive()),
        Mode::Cone => None,
    };
    let probe = Wall {
        m: m0.clone(),
        n: n.clone(),
        support: support.clone(),
        theta: GroupElement::identity(&d.alg, d.order),
        initial: false,
    };
    // A counterclockwise loop crosses the ray with velocity rot90(dir).
    let eps = probe.crossing_sign(d.mode, &rot90(&dir).to_q());
    let log = if eps > 0 { block.neg() } else { block.clone() }.with_order(d.order);
    Wall::new(d.mode, m0.clone(), n, support, GroupElement::exp(log)).map_err(|e| Error::NonCentral {
        degree: deg,
        detail: format!("block along {m0} at {} is not tropical: {e}", fmt_point(p)),
    })
}

/// The part of c with t_i-exponent exactly j, with t_i^j removed.
fn strip_t(c: &Coefficient, i: u32, j: u32) -> Result<Coefficient> {
    let mut out = Coefficient::zero();
    for (mono, x) in &c.0 {
        let mut rest = Vec::new();
        let mut e = 0;
        for &(v, k) in &mono.0 {
            match v {
                Var::T(w) if w == i => e = k,
                _ => rest.push((v, k)),
            }
        }
        if !rest.is_empty() {
            return Err(Error::Precondition(format!("wall {i} carries variables other than t{i}")));
        }
        if e == j {
            out.add_assign(&Coefficient::term(NilMono::one(), x.clone()));
        }
    }
    Ok(out)
}

/// g_{ji}: the t_i^j part of a wall log with t_i stripped.
pub fn graded_piece(log: &LieElement, i: u32, j: u32) -> Result<LieElement> {
    let mut out = LieElement::zero(&log.alg, log.order);
    for (m, comps) in log.terms() {
        let parts = comps.iter().map(|c| strip_t(c, i, j)).collect::<Result<Vec<_>>>()?;
        out.add_term(m, parts);
    }
    Ok(out)
}

/// Subsets of {1..l} as sorted vectors, by size then lexicographically.
pub fn nonempty_subsets(l: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (1u32..(1 << l))
        .map(|mask| (1..=l).filter(|s| mask >> (s - 1) & 1 == 1).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Perturbation with explicit translation offsets, one per (wall, J) in the
/// order of `nonempty_subsets`. Wall i uses the variables t_{i+1}, u_{i+1,s}.
pub fn perturb_with_offsets(d_in: &Diagram, l: u32, offsets: &[Q]) -> Result<Diagram> {
    if d_in.mode != Mode::Tropical || d_in.rank() != 2 {
        return Err(Error::Precondition("perturbation needs a rank-2 tropical diagram".into()));
    }
    let origin = vec![Q::zero(), Q::zero()];
    let subsets = nonempty_subsets(l);
    let mut out = Diagram::new(d_in.mode, &d_in.alg, d_in.order);
    let mut idx = 0;
    for (wi, w) in d_in.walls.iter().enumerate() {
        let s = w.support.r2().ok_or_else(|| Error::Precondition("rank-2 support expected".into()))?;
        if s.kind != SupportKind::Line || !s.contains(&origin) {
            return Err(Error::Precondition("perturbation needs full lines through the origin".into()));
        }
        let i = wi as u32 + 1;
        for j in subsets.iter() {
            let g = graded_piece(&w.theta.log, i, j.len() as u32)?;
            let mut u = Coefficient::one();
            for &sidx in j {
                u = u.mul(&Coefficient::var(Var::U(i, sidx)), &d_in.alg.ring);
            }
            let log = g.scale_coeff(&u).scale(&factorial(j.len() as u32));
            let off = offsets.get(idx).cloned().ok_or_else(|| Error::Precondition("too few offsets".into()))?;
            idx += 1;
            let nrm = rot90(&s.dir).to_q();
            let base: Vec<Q> = nrm.iter().map(|c| c * &off).collect();
            let support = Support::R2(SupportR2::line(base, s.dir.clone()));
            let nw = Wall::new(d_in.mode, w.m.clone(), w.n.clone(), support, GroupElement::exp(log))?;
            out.push(nw.as_initial())?;
        }
    }
    Ok(out)
}

/// Deterministic offsets with denominators 1009·index.
pub fn seeded_offsets(count: usize, seed: u64) -> Vec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count as i64)
        .map(|i| {
            let den = 1009 * i;
            let mut num: i64 = rng.gen_range(1..den);
            if rng.gen_bool(0.5) {
                num = -num;
            }
            qf(num, den)
        })
        .collect()
}

/// Perturbation with seeded offsets, re-drawn until the result is generic
/// at the diagram's order.
pub fn perturb(d_in: &Diagram, l: u32, seed: u64) -> Result<Diagram> {
    let count = d_in.walls.len() * ((1usize << l) - 1);
    for attempt in 0..64u64 {
        let offs = seeded_offsets(count, seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let d = perturb_with_offsets(d_in, l, &offs)?;
        if crate::trees::check_generic(&d, d.order)?.is_none() {
            return Ok(d);
        }
    }
    Err(Error::NonGeneric("could not draw generic offsets".into()))
}

/// Human-readable wall function 1 + Σ c_j x^j of a classical wall with log
/// along n, read from exp of the log coefficients.
pub fn wall_function(w: &Wall) -> Option<Vec<(i64, Coefficient)>> {
    let log = &w.theta.log;
    if !matches!(log.alg.backend, Backend::Classical) {
        return None;
    }
    let n = w.n.as_ref()?;
    let ring = log.alg.ring;
    let order = log.order as i64;
    let dm = log.alg.deg(&w.m);
    let top = (order - 1) / dm;
    // s_j: coefficient of x^j in log f.
    let mut s = vec![Coefficient::zero(); top as usize + 1];
    for m in log.terms().keys() {
        let j = m.multiple_of(&w.m)?;
        s[j as usize] = log.scalar_along(m, n)?;
    }
    // f = exp(Σ s_j x^j) by f' = (log f)' f.
    let mut f = vec![Coefficient::zero(); top as usize + 1];
    f[0] = Coefficient::one();
    for j in 1..=top as usize {
        let mut acc = Coefficient::zero();
        for i in 1..=j {
            acc.add_assign(&s[i].mul(&f[j - i], &ring).scale_int(i as i64));
        }
        f[j] = acc.scale(&qf(1, j as i64));
    }
    Some(f.into_iter().enumerate().map(|(j, c)| (j as i64, c)).filter(|(_, c)| !c.is_zero()).collect())
}

/// Text form of a wall for reports.
pub fn describe_wall(w: &Wall) -> String {
    let sup = match &w.support {
        Support::R2(s) => format!(
            "{} from ({},{}) dir {}",
            if s.kind == SupportKind::Ray { "ray" } else { "line" },
            fmt_q(&s.base[0]),
            fmt_q(&s.base[1]),
            s.dir
        ),
        Support::Cone(c) => format!("cone ⟂ {}", c.normal),
    };
    format!("m={} {} log={:?}", w.m, sup, w.theta.log)
}

/// log(1 + c z^{m}) ∂_n truncated at the order.
pub fn classical_log_wall(alg: &crate::lie::Alg, order: u32, m: &LatVec, n: &LatVec, c: &Coefficient) -> LieElement {
    let ring = alg.ring;
    let mut out = LieElement::zero(alg, order);
    let mut cp = Coefficient::one();
    let dm = alg.deg(m);
    let mut j = 1i64;
    while j * dm < order as i64 {
        cp = cp.mul(c, &ring);
        let sign = if j % 2 == 1 { 1 } else { -1 };
        out = out.add(&LieElement::classical(alg, order, &m.scale(j), n, cp.scale(&qf(sign, j))));
        j += 1;
    }
    out
}

/// The diagram {1 + t_{i+1} z^{m_i}} of full lines through the origin, each
/// with direction m_i and normal the primitive perpendicular of m_i.
pub fn standard_initial(alg: &crate::lie::Alg, order: u32, ms: &[LatVec]) -> Result<Diagram> {
    let mut d = Diagram::new(Mode::Tropical, alg, order);
    for (i, m) in ms.iter().enumerate() {
        let mp = m.primitive();
        let n = LatVec(vec![mp.0[1], -mp.0[0]]).lex_positive().0;
        let t = Coefficient::var(Var::T(i as u32 + 1));
        let log = classical_log_wall(alg, order, m, &n, &t);
        let support = Support::R2(SupportR2::line(vec![q(0), q(0)], mp.clone()));
        d.push(Wall::new(Mode::Tropical, mp, Some(n), support, GroupElement::exp(log))?.as_initial())?;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::rings::Ring;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn subsets_order() {
        assert_eq!(nonempty_subsets(2), vec![vec![1], vec![2], vec![1, 2]]);
        assert_eq!(nonempty_subsets(3).len(), 7);
    }

    #[test]
    fn two_wall_completion_adds_one_wall() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 8, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(d.is_consistent(8).unwrap().is_some());
        let c = complete(&d, 8).unwrap();
        assert_eq!(c.walls.len(), 3, "{:#?}", c.walls.iter().map(describe_wall).collect::<Vec<_>>());
        let w = &c.walls[2];
        assert_eq!(w.support, Support::R2(SupportR2::ray(vec![q(0), q(0)], v(&[-1, -1]))));
        let f = wall_function(w).unwrap();
        let t12 = Coefficient::var(Var::T(1)).mul(&Coefficient::var(Var::T(2)), &Ring::free());
        assert_eq!(f, vec![(0, Coefficient::one()), (1, t12)]);
        assert!(c.is_consistent(8).unwrap().is_none());
    }

    #[test]
    fn completing_twice_adds_nothing() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 6, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let c = complete(&d, 6).unwrap();
        let cc = complete(&c, 6).unwrap();
        assert_eq!(c, cc);
    }
}
