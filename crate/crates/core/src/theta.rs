//! Broken lines, theta functions, transport along paths and the
//! wall-crossing check.

use crate::diagram::{fmt_point, Diagram, Mode, PiecewisePath, Support};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{intersect_supports, pair_q, q, qf, sgn, Intersection, LatVec, Position, SupportR2, Q};
use crate::lie::{AlgElem, LieElement};
use crate::rings::Coefficient;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

/// Which theta function: z^𝗆 on a tropical diagram in M_ℝ, or z^n on a
/// cone diagram in N_ℝ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    Tropical(LatVec),
    Quiver(LatVec),
}

impl Frame {
    pub fn label(&self) -> &LatVec {
        match self {
            Frame::Tropical(m) | Frame::Quiver(m) => m,
        }
    }

    pub fn for_diagram(d: &Diagram, v: LatVec) -> Frame {
        match d.mode {
            Mode::Tropical => Frame::Tropical(v),
            Mode::Cone => Frame::Quiver(v),
        }
    }

    /// Direction in which a line carrying offset o moves backward in time.
    pub fn backward_dir(&self, d: &Diagram, o: &LatVec) -> LatVec {
        match self {
            Frame::Tropical(m) => m.add(o),
            Frame::Quiver(n) => {
                let w = d.alg.omega().expect("quiver frame needs a skew form");
                w.p(o).add(n)
            }
        }
    }

    /// The monomial with offset o and coefficient 1.
    pub fn monomial(&self, d: &Diagram, order: u32, o: &LatVec) -> AlgElem {
        let r = d.rank();
        let mut e = match self {
            Frame::Tropical(m) => {
                if d.alg.is_quantum() {
                    AlgElem::zero(&d.alg, order, m.clone(), Some(LatVec::zero(r)))
                } else {
                    AlgElem::zero(&d.alg, order, m.clone(), None)
                }
            }
            Frame::Quiver(n) => AlgElem::zero(&d.alg, order, LatVec::zero(r), Some(n.clone())),
        };
        e.add_term(o, Coefficient::one());
        e
    }

    pub fn zero_elem(&self, d: &Diagram, order: u32) -> AlgElem {
        let mut e = self.monomial(d, order, &LatVec::zero(d.rank()));
        e.terms.clear();
        e
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bend {
    pub point: Vec<Q>,
    pub walls: Vec<usize>,
    pub before: LatVec,
    pub after: LatVec,
    pub factor: Coefficient,
}

/// A broken line ending at `end`, with bends listed in forward order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenLine {
    pub end: Vec<Q>,
    pub bends: Vec<Bend>,
    pub final_offset: LatVec,
    pub coeff: Coefficient,
}

impl BrokenLine {
    /// Vertices from a point far along the incoming direction to the end.
    pub fn vertices(&self, frame: &Frame, d: &Diagram, reach: &Q) -> Vec<Vec<Q>> {
        let mut pts: Vec<Vec<Q>> = Vec::new();
        let first = self.bends.first().map_or(&self.end, |b| &b.point);
        let u = frame.backward_dir(d, &LatVec::zero(d.rank())).to_q();
        pts.push(first.iter().zip(&u).map(|(a, b)| a + b * reach).collect());
        for b in &self.bends {
            pts.push(b.point.clone());
        }
        pts.push(self.end.clone());
        pts
    }
}

/// A group of walls met at one point by a backward ray.
struct Hit {
    s: Q,
    point: Vec<Q>,
    walls: Vec<usize>,
}

fn ray_hits(d: &Diagram, p: &[Q], u: &LatVec) -> Result<Vec<Hit>> {
    let ray = SupportR2::ray(p.to_vec(), u.clone());
    let uq = u.to_q();
    let uu: Q = uq.iter().map(|x| x * x).sum();
    let mut raw: Vec<(Q, Vec<Q>, usize)> = Vec::new();
    for (i, w) in d.walls.iter().enumerate() {
        let s = match &w.support {
            Support::R2(s) => s,
            Support::Cone(_) => return Err(Error::Unsupported("broken lines need rank-2 supports".into())),
        };
        if s.contains(p) {
            if s.dir.cross(u) == 0 {
                return Err(Error::Tangent(fmt_point(p)));
            }
            continue;
        }
        match intersect_supports(&ray, s) {
            Intersection::Empty => {}
            Intersection::Overlap => return Err(Error::Tangent(fmt_point(p))),
            Intersection::Point(x) => {
                let t: Q = x.iter().zip(p).zip(&uq).map(|((a, b), c)| (a - b) * c).sum::<Q>() / &uu;
                if s.position(&x) == Position::Base {
                    return Err(Error::HitsJoint(fmt_point(&x)));
                }
                raw.push((t, x, i));
            }
        }
    }
    raw.sort_by(|a, b| a.0.cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut out: Vec<Hit> = Vec::new();
    for (s, x, i) in raw {
        match out.last_mut() {
            Some(h) if h.s == s => {
                let a = d.walls[h.walls[0]].support.r2().unwrap();
                let b = d.walls[i].support.r2().unwrap();
                if !a.same_line(b) {
                    return Err(Error::HitsJoint(fmt_point(&x)));
                }
                h.walls.push(i);
            }
            _ => out.push(Hit { s, point: x, walls: vec![i] }),
        }
    }
    Ok(out)
}

/// The semigroup generated by the m-terms of all wall logs, below order k.
fn reachable_offsets(d: &Diagram, k: u32) -> BTreeSet<LatVec> {
    let mut gens: BTreeSet<LatVec> = BTreeSet::new();
    for w in &d.walls {
        for m in w.theta.log.terms().keys() {
            if d.alg.deg(m) < k as i64 {
                gens.insert(m.clone());
            }
        }
    }
    let mut out: BTreeSet<LatVec> = BTreeSet::new();
    out.insert(LatVec::zero(d.rank()));
    let mut frontier: Vec<LatVec> = vec![LatVec::zero(d.rank())];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = x.add(g);
            if d.alg.deg(&y) < k as i64 && out.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    out
}

struct Search<'a> {
    d: &'a Diagram,
    frame: &'a Frame,
    k: u32,
    reach: BTreeSet<LatVec>,
    cache: BTreeMap<(Vec<usize>, LatVec, LatVec), Coefficient>,
    out: Vec<BrokenLine>,
}

impl Search<'_> {
    /// Coefficient of offset `after` in Θ^{±}·z^{before} for the walls of a hit.
    fn factor(&mut self, walls: &[usize], vel: &[Q], before: &LatVec, after: &LatVec) -> Coefficient {
        let key = (walls.to_vec(), before.clone(), after.clone());
        if let Some(c) = self.cache.get(&key) {
            return c.clone();
        }
        let mut log = LieElement::zero(&self.d.alg, self.k);
        for &w in walls {
            let wall = &self.d.walls[w];
            let e = wall.crossing_sign(self.d.mode, vel);
            let l = wall.theta.log.with_order(self.k);
            log = if e > 0 { log.add(&l) } else { log.sub(&l) };
        }
        let img = GroupElement::exp(log).apply(&self.frame.monomial(self.d, self.k, before));
        let c = img.coeff(after);
        self.cache.insert(key, c.clone());
        c
    }

    fn explore(&mut self, p: Vec<Q>, o: LatVec, later: Vec<Bend>, coeff: Coefficient) -> Result<()> {
        let u = self.frame.backward_dir(self.d, &o);
        if u.is_zero() {
            return Ok(());
        }
        let hits = ray_hits(self.d, &p, &u)?;
        let vel: Vec<Q> = u.neg().to_q();
        for h in &hits {
            for &w in &h.walls {
                if self.d.walls[w].crossing_sign(self.d.mode, &vel) == 0 {
                    return Err(Error::Tangent(fmt_point(&h.point)));
                }
            }
            // Bend here: predecessor offsets o − j·m.
            let m0 = &self.d.walls[h.walls[0]].m;
            let mut j = 1;
            loop {
                let prev = o.sub(&m0.scale(j));
                if self.d.alg.deg(&m0.scale(j)) > self.d.alg.deg(&o) {
                    break;
                }
                if self.reach.contains(&prev) {
                    let f = self.factor(&h.walls, &vel, &prev, &o);
                    if !f.is_zero() {
                        let c = f.mul(&coeff, &self.d.alg.ring);
                        if !c.is_zero() {
                            let mut bends = vec![Bend {
                                point: h.point.clone(),
                                walls: h.walls.clone(),
                                before: prev.clone(),
                                after: o.clone(),
                                factor: f,
                            }];
                            bends.extend(later.iter().cloned());
                            self.explore(h.point.clone(), prev, bends, c)?;
                        }
                    }
                }
                j += 1;
            }
        }
        if o.is_zero() {
            self.out.push(BrokenLine { end: Vec::new(), bends: later, final_offset: LatVec::zero(0), coeff });
        }
        Ok(())
    }
}

fn check_off_support(d: &Diagram, x: &[Q]) -> Result<()> {
    for w in &d.walls {
        if let Support::R2(s) = &w.support {
            if s.contains(x) {
                return Err(Error::Precondition(format!("point {} lies on a wall", fmt_point(x))));
            }
        }
    }
    Ok(())
}

/// Every broken line for the frame ending at q with final offset of degree < k.
pub fn enumerate_broken_lines(d: &Diagram, frame: &Frame, qpt: &[Q], k: u32) -> Result<Vec<BrokenLine>> {
    if d.rank() != 2 {
        return Err(Error::Unsupported("broken lines are implemented in rank 2".into()));
    }
    let k = k.min(d.order);
    let dk = d.truncated(k);
    check_off_support(&dk, qpt)?;
    let reach = reachable_offsets(&dk, k);
    let mut s = Search { d: &dk, frame, k, reach: reach.clone(), cache: BTreeMap::new(), out: Vec::new() };
    for of in &reach {
        let before = s.out.len();
        s.explore(qpt.to_vec(), of.clone(), Vec::new(), Coefficient::one())?;
        for l in &mut s.out[before..] {
            l.end = qpt.to_vec();
            l.final_offset = of.clone();
        }
    }
    Ok(s.out)
}

/// ϑ at q: the sum of final monomials of broken lines.
pub fn theta(d: &Diagram, frame: &Frame, qpt: &[Q], k: u32) -> Result<AlgElem> {
    let k = k.min(d.order);
    if frame.label().is_zero() {
        let mut one = frame.monomial(d, k, &LatVec::zero(d.rank()));
        one.base_m = LatVec::zero(d.rank());
        return Ok(one);
    }
    let lines = enumerate_broken_lines(d, frame, qpt, k)?;
    let mut out = frame.zero_elem(d, k);
    for l in lines {
        out.add_term(&l.final_offset, l.coeff);
    }
    Ok(out)
}

/// A point where the theta function is the bare monomial.
pub fn base_point(d: &Diagram, frame: &Frame) -> Result<Vec<Q>> {
    match frame {
        Frame::Quiver(_) => Ok(vec![Q::one(); d.rank()]),
        Frame::Tropical(m) => {
            // Far along 𝗆, past every support meeting the line ℝ𝗆.
            let line = SupportR2::line(vec![Q::zero(), Q::zero()], m.clone());
            let mq = m.to_q();
            let mm: Q = mq.iter().map(|x| x * x).sum();
            let mut far = Q::one();
            for w in &d.walls {
                let s = w.support.r2().ok_or_else(|| Error::Unsupported("rank-2 supports expected".into()))?;
                let mut pts = vec![s.base.clone()];
                if let Intersection::Point(x) = intersect_supports(&line, s) {
                    pts.push(x);
                }
                for x in pts {
                    let t: Q = x.iter().zip(&mq).map(|(a, b)| a * b).sum::<Q>() / &mm;
                    let r: Q = x.iter().map(|c| c.abs()).sum();
                    let bound = t.abs() + r + Q::one();
                    if bound > far {
                        far = bound;
                    }
                }
            }
            let nrm = LatVec(vec![-m.0[1], m.0[0]]).to_q();
            for j in 1..64i64 {
                let eps = qf(1, 7919 * j);
                let x: Vec<Q> = mq.iter().zip(&nrm).map(|(a, b)| a * &far * q(2) + b * &eps).collect();
                if check_off_support(d, &x).is_ok() {
                    return Ok(x);
                }
            }
            Err(Error::NonGeneric("no base point off the walls".into()))
        }
    }
}

/// Θ along a straight segment, or through seeded detour vertices when the
/// segment meets a joint.
pub fn transport(d: &Diagram, from: &[Q], to: &[Q], k: u32) -> Result<GroupElement> {
    let direct = PiecewisePath::new(vec![from.to_vec(), to.to_vec()]);
    match d.path_ordered_product(&direct, k) {
        Ok(g) => return Ok(g),
        Err(Error::HitsJoint(_)) | Err(Error::Tangent(_)) | Err(Error::VertexOnWall(_)) => {}
        Err(e) => return Err(e),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let w: Vec<Q> = from
            .iter()
            .zip(to)
            .map(|(a, b)| (a + b) / q(2) + qf(rng.gen_range(-4000..4000), 997))
            .collect();
        let p = PiecewisePath::new(vec![from.to_vec(), w, to.to_vec()]);
        if let Ok(g) = d.path_ordered_product(&p, k) {
            return Ok(g);
        }
    }
    Err(Error::NonGeneric(format!("no generic path from {} to {}", fmt_point(from), fmt_point(to))))
}

/// ϑ at q obtained by transporting the bare monomial from the base point.
pub fn theta_by_transport(d: &Diagram, frame: &Frame, qpt: &[Q], k: u32) -> Result<AlgElem> {
    let k = k.min(d.order);
    if frame.label().is_zero() {
        return theta(d, frame, qpt, k);
    }
    check_off_support(d, qpt)?;
    let b = base_point(d, frame)?;
    let g = transport(d, &b, qpt, k)?;
    Ok(g.apply(&frame.monomial(d, k, &LatVec::zero(d.rank()))))
}

/// Compares ϑ at ρ(1) with Θ_ρ applied to ϑ at ρ(0). Returns the
/// discrepancy, zero when the wall-crossing formula holds.
pub fn check_wall_crossing(d: &Diagram, frame: &Frame, rho: &PiecewisePath, k: u32) -> Result<AlgElem> {
    let k = k.min(d.order);
    let a = rho.vertices.first().ok_or_else(|| Error::Precondition("empty path".into()))?;
    let b = rho.vertices.last().unwrap();
    let t0 = theta(d, frame, a, k)?;
    let t1 = theta(d, frame, b, k)?;
    let g = d.path_ordered_product(rho, k)?;
    Ok(t1.sub(&g.apply(&t0)))
}

/// Lowest offset degree of a nonzero discrepancy.
pub fn discrepancy_degree(x: &AlgElem) -> Option<i64> {
    x.min_offset_degree()
}

/// Sign of the pairing used when printing bend data.
pub fn side_of(n: &LatVec, x: &[Q]) -> i32 {
    sgn(&pair_q(n, x))
}
