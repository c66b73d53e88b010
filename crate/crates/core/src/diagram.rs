//! Walls, scattering diagrams, path-ordered products, consistency and
//! equivalence.

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{
    fmt_q, intersect_supports, pair, pair_q, q, qf, sgn, Intersection, LatVec, Position, SupportKind, SupportR2, Q,
};
use crate::lie::{Alg, Backend, LieElement, Membership};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Where walls live: tropical walls sit in M_ℝ and carry (m, n); cone walls
/// sit in N_ℝ and are graded by the annihilator of their support.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Tropical,
    Cone,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Tropical => "tropical",
            Mode::Cone => "cone",
        }
    }
}

/// A codimension-one cone {x : ⟨normal, x⟩ = offset, a·x ≥ b for all (a, b)}
/// in arbitrary rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperCone {
    pub normal: LatVec,
    pub offset: Q,
    pub ineqs: Vec<(Vec<Q>, Q)>,
}

impl HyperCone {
    fn strict_margin(&self, x: &[Q]) -> i32 {
        let mut worst = 1;
        for (a, b) in &self.ineqs {
            let v: Q = a.iter().zip(x).fold(Q::zero(), |acc, (p, y)| acc + p * y) - b;
            worst = worst.min(sgn(&v));
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    R2(SupportR2),
    Cone(HyperCone),
}

impl Support {
    pub fn r2(&self) -> Option<&SupportR2> {
        match self {
            Support::R2(s) => Some(s),
            Support::Cone(_) => None,
        }
    }

    /// Whether the closed segment [a, b] touches the support.
    pub fn meets_segment(&self, a: &[Q], b: &[Q]) -> Result<bool> {
        Ok(match self {
            Support::R2(s) => !matches!(seg_hit(s, a, b), SegHit::None),
            Support::Cone(c) => match seg_hit_cone(c, a, b) {
                Ok(t) => t.is_some(),
                Err(_) => true,
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// Primitive positive direction of the grading of the log.
    pub m: LatVec,
    /// Tropical normal in N; absent in cone mode.
    pub n: Option<LatVec>,
    pub support: Support,
    pub theta: GroupElement,
    pub initial: bool,
}

impl Wall {
    /// Validates the wall against the mode's invariants.
    pub fn new(mode: Mode, m: LatVec, n: Option<LatVec>, support: Support, theta: GroupElement) -> Result<Self> {
        let alg = theta.alg().clone();
        if m.rank() != alg.rank {
            return Err(Error::RankMismatch { expected: alg.rank, got: m.rank() });
        }
        if m.is_zero() || m.content() != 1 {
            return Err(Error::Precondition(format!("wall direction {m} must be primitive")));
        }
        for mt in theta.log.terms().keys() {
            match mt.multiple_of(&m) {
                Some(k) if k > 0 => {}
                _ => return Err(Error::Precondition(format!("log term z^{mt} is not along {m}"))),
            }
        }
        match mode {
            Mode::Tropical => {
                let n = n.as_ref().ok_or_else(|| Error::Precondition("tropical wall needs n".into()))?;
                if n.is_zero() || pair(&m, n) != 0 {
                    return Err(Error::Precondition(format!("need ⟨m,n⟩ = 0 and n ≠ 0, got m={m}, n={n}")));
                }
                match &support {
                    Support::R2(s) => {
                        if pair(&s.dir, n) != 0 {
                            return Err(Error::Precondition(format!("support direction {} not in n^⊥", s.dir)));
                        }
                    }
                    Support::Cone(c) => {
                        if c.normal.primitive() != n.primitive() && c.normal.primitive() != n.primitive().neg() {
                            return Err(Error::Precondition("cone support normal must be ±n".into()));
                        }
                    }
                }
                if let Backend::Classical = alg.backend {
                    for (_, mem) in theta.log.tropical_membership() {
                        match mem {
                            Membership::Line(l) if l.cross_any(&n.primitive()) => {}
                            _ => return Err(Error::Precondition("log is not in the n-line of the wall".into())),
                        }
                    }
                }
            }
            Mode::Cone => match &support {
                Support::R2(s) => {
                    if pair(&m, &s.dir) != 0 {
                        return Err(Error::Precondition(format!("support direction {} not in {m}^⊥", s.dir)));
                    }
                }
                Support::Cone(c) => {
                    if c.normal.primitive() != m && c.normal.primitive() != m.neg() {
                        return Err(Error::Precondition("cone support must lie in m^⊥".into()));
                    }
                }
            },
        }
        Ok(Wall { m, n, support, theta, initial: false })
    }

    pub fn as_initial(mut self) -> Self {
        self.initial = true;
        self
    }

    /// Crossing exponent for a path with velocity t at a crossing point.
    pub fn crossing_sign(&self, mode: Mode, t: &[Q]) -> i32 {
        match mode {
            Mode::Tropical => -sgn(&pair_q(self.n.as_ref().expect("tropical n"), t)),
            Mode::Cone => sgn(&pair_q(&self.m, t)),
        }
    }

    /// Lowest degree of a term of the log, if any.
    pub fn min_degree(&self) -> Option<i64> {
        self.theta.log.min_degree()
    }
}

impl LatVec {
    /// True when self and o are parallel (either sign).
    pub fn cross_any(&self, o: &LatVec) -> bool {
        let r = self.rank();
        for i in 0..r {
            for j in i + 1..r {
                if self.0[i] * o.0[j] != self.0[j] * o.0[i] {
                    return false;
                }
            }
        }
        !self.is_zero() && !o.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub mode: Mode,
    pub alg: Alg,
    pub order: u32,
    pub walls: Vec<Wall>,
}

/// A polygonal path with rational vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewisePath {
    pub vertices: Vec<Vec<Q>>,
}

impl PiecewisePath {
    pub fn new(vertices: Vec<Vec<Q>>) -> Self {
        PiecewisePath { vertices }
    }
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        PiecewisePath { vertices: v }
    }
    pub fn is_closed(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }
    /// Rotate a closed loop to start at vertex i.
    pub fn rotated(&self, i: usize) -> Self {
        assert!(self.is_closed());
        let n = self.vertices.len() - 1;
        let mut v: Vec<Vec<Q>> = (0..n).map(|j| self.vertices[(i + j) % n].clone()).collect();
        v.push(v[0].clone());
        PiecewisePath { vertices: v }
    }
}

/// One crossing event: every wall met at the same instant.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub segment: usize,
    pub t: Q,
    pub point: Vec<Q>,
    pub velocity: Vec<Q>,
    /// (wall index, exponent sign).
    pub walls: Vec<(usize, i32)>,
}

pub fn fmt_point(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(fmt_q).collect();
    format!("({})", parts.join(","))
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lerp(a: &[Q], b: &[Q], t: &Q) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect()
}

/// Counterclockwise rotation by a quarter turn.
pub fn rot90(u: &LatVec) -> LatVec {
    LatVec(vec![-u.0[1], u.0[0]])
}

/// Ordering of nonzero plane vectors by angle in [0, 2π).
pub fn angle_cmp(a: &LatVec, b: &LatVec) -> Ordering {
    let half = |u: &LatVec| if u.0[1] > 0 || (u.0[1] == 0 && u.0[0] > 0) { 0 } else { 1 };
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&a.cross(b)))
}

/// How a segment meets a rank-2 support.
enum SegHit {
    None,
    /// Transversal crossing at parameter t in the open segment, interior of the support.
    Cross(Q),
    /// Crossing through the support's base point.
    Base(Q),
    Tangent,
    /// A segment endpoint lies on the support.
    Endpoint(usize),
}

fn seg_hit(s: &SupportR2, a: &[Q], b: &[Q]) -> SegHit {
    let sa = s.side(a);
    let sb = s.side(b);
    if sa.is_zero() && sb.is_zero() {
        // Collinear: does the segment overlap the support?
        let hits = match s.kind {
            SupportKind::Line => true,
            SupportKind::Ray => {
                let pa = s.param(a);
                let pb = s.param(b);
                !(pa.is_negative() && pb.is_negative())
            }
        };
        return if hits { SegHit::Tangent } else { SegHit::None };
    }
    if sa.is_zero() {
        return if s.contains(a) { SegHit::Endpoint(0) } else { SegHit::None };
    }
    if sb.is_zero() {
        return if s.contains(b) { SegHit::Endpoint(1) } else { SegHit::None };
    }
    if sgn(&sa) == sgn(&sb) {
        return SegHit::None;
    }
    let t = &sa / (&sa - &sb);
    let x = lerp(a, b, &t);
    match s.position(&x) {
        Position::Off => SegHit::None,
        Position::Interior => SegHit::Cross(t),
        Position::Base => SegHit::Base(t),
    }
}

fn seg_hit_cone(c: &HyperCone, a: &[Q], b: &[Q]) -> Result<Option<Q>> {
    let sa = pair_q(&c.normal, a) - &c.offset;
    let sb = pair_q(&c.normal, b) - &c.offset;
    if sa.is_zero() && sb.is_zero() {
        let mid = lerp(a, b, &qf(1, 2));
        if c.strict_margin(&mid) >= 0 {
            return Err(Error::Tangent(fmt_point(&mid)));
        }
        return Ok(None);
    }
    if sa.is_zero() || sb.is_zero() {
        let x = if sa.is_zero() { a } else { b };
        if c.strict_margin(x) >= 0 {
            return Err(Error::VertexOnWall(fmt_point(x)));
        }
        return Ok(None);
    }
    if sgn(&sa) == sgn(&sb) {
        return Ok(None);
    }
    let t = &sa / (&sa - &sb);
    let x = lerp(a, b, &t);
    match c.strict_margin(&x) {
        1 => Ok(Some(t)),
        0 => Err(Error::HitsJoint(fmt_point(&x))),
        _ => Ok(None),
    }
}

impl Diagram {
    pub fn new(mode: Mode, alg: &Alg, order: u32) -> Self {
        Diagram { mode, alg: alg.clone(), order, walls: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.alg.rank
    }

    pub fn push(&mut self, w: Wall) -> Result<()> {
        if w.theta.alg() != &self.alg {
            return Err(Error::Mismatch("wall algebra differs from diagram".into()));
        }
        let w = Wall { theta: w.theta.with_order(self.order), ..w };
        self.walls.push(w);
        Ok(())
    }

    /// The same diagram truncated at order k, dropping walls that become trivial.
    pub fn truncated(&self, k: u32) -> Diagram {
        let walls = self
            .walls
            .iter()
            .filter_map(|w| {
                let t = w.theta.with_order(k);
                if t.is_identity() {
                    None
                } else {
                    Some(Wall { theta: t, ..w.clone() })
                }
            })
            .collect();
        Diagram { mode: self.mode, alg: self.alg.clone(), order: k, walls }
    }

    fn r2_supports(&self) -> Result<Vec<&SupportR2>> {
        self.walls
            .iter()
            .map(|w| w.support.r2().ok_or_else(|| Error::Unsupported("operation needs rank-2 supports".into())))
            .collect()
    }

    /// Ray base points and transversal intersections of supports, deduplicated.
    pub fn joints(&self) -> Result<Vec<Vec<Q>>> {
        let sup = self.r2_supports()?;
        let mut out: Vec<Vec<Q>> = Vec::new();
        let mut add = |p: Vec<Q>| {
            if !out.contains(&p) {
                out.push(p);
            }
        };
        for s in &sup {
            if s.kind == SupportKind::Ray {
                add(s.base.clone());
            }
        }
        for i in 0..sup.len() {
            for j in i + 1..sup.len() {
                if sup[i].dir.cross(&sup[j].dir) == 0 {
                    continue;
                }
                if let Intersection::Point(p) = intersect_supports(sup[i], sup[j]) {
                    add(p);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Crossing events of a path, in order, at truncation k.
    pub fn crossings(&self, path: &PiecewisePath, k: u32) -> Result<Vec<Crossing>> {
        let d = self.truncated(k.min(self.order));
        d.crossings_raw(path)
    }

    fn crossings_raw(&self, path: &PiecewisePath) -> Result<Vec<Crossing>> {
        let mut out = Vec::new();
        let nv = path.vertices.len();
        for seg in 0..nv.saturating_sub(1) {
            let a = &path.vertices[seg];
            let b = &path.vertices[seg + 1];
            if a == b {
                continue;
            }
            let vel = sub(b, a);
            let mut hits: Vec<(Q, usize)> = Vec::new();
            for (i, w) in self.walls.iter().enumerate() {
                match &w.support {
                    Support::R2(s) => match seg_hit(s, a, b) {
                        SegHit::None => {}
                        SegHit::Cross(t) => hits.push((t, i)),
                        SegHit::Base(t) => return Err(Error::HitsJoint(fmt_point(&lerp(a, b, &t)))),
                        SegHit::Tangent => return Err(Error::Tangent(format!("segment {seg}"))),
                        SegHit::Endpoint(e) => {
                            return Err(Error::VertexOnWall(fmt_point(if e == 0 { a } else { b })))
                        }
                    },
                    Support::Cone(c) => {
                        if let Some(t) = seg_hit_cone(c, a, b)? {
                            hits.push((t, i));
                        }
                    }
                }
            }
            hits.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(&y.1)));
            let mut idx = 0;
            while idx < hits.len() {
                let t = hits[idx].0.clone();
                let mut group = Vec::new();
                while idx < hits.len() && hits[idx].0 == t {
                    group.push(hits[idx].1);
                    idx += 1;
                }
                let point = lerp(a, b, &t);
                // Simultaneous crossings must share a support line; otherwise the point is a joint.
                if group.len() > 1 {
                    let first = &self.walls[group[0]].support;
                    for &g in &group[1..] {
                        let same = match (first, &self.walls[g].support) {
                            (Support::R2(x), Support::R2(y)) => x.same_line(y),
                            (Support::Cone(x), Support::Cone(y)) => x.normal.cross_any(&y.normal),
                            _ => false,
                        };
                        if !same {
                            return Err(Error::HitsJoint(fmt_point(&point)));
                        }
                    }
                }
                let walls = group.iter().map(|&g| (g, self.walls[g].crossing_sign(self.mode, &vel))).collect();
                out.push(Crossing { segment: seg, t, point, velocity: vel.clone(), walls });
            }
        }
        Ok(out)
    }

    /// Θ_{γ,𝒟} at order k: the automorphism crossed first acts first.
    pub fn path_ordered_product(&self, path: &PiecewisePath, k: u32) -> Result<GroupElement> {
        let k = k.min(self.order);
        let d = self.truncated(k);
        let cr = d.crossings_raw(path)?;
        Ok(d.product_of(&cr, k))
    }

    fn product_of(&self, cr: &[Crossing], k: u32) -> GroupElement {
        let mut g = GroupElement::identity(&self.alg, k);
        for c in cr {
            let mut log = LieElement::zero(&self.alg, k);
            for (i, &(wi, e)) in c.walls.iter().enumerate() {
                let l = self.walls[wi].theta.log.with_order(k);
                for &(wj, _) in &c.walls[..i] {
                    assert!(
                        l.bracket(&self.walls[wj].theta.log.with_order(k)).is_zero(),
                        "simultaneously crossed walls must commute"
                    );
                }
                log = if e > 0 { log.add(&l) } else { log.sub(&l) };
            }
            g = GroupElement::exp(log).mul(&g);
        }
        g
    }

    /// Walls through p, as angular germs (direction leaving p, wall index).
    fn germs_at(&self, p: &[Q]) -> Result<Vec<(LatVec, usize)>> {
        let mut germs = Vec::new();
        for (i, w) in self.walls.iter().enumerate() {
            let s = w.support.r2().ok_or_else(|| Error::Unsupported("germs need rank 2".into()))?;
            match s.position(p) {
                Position::Off => {}
                Position::Base => germs.push((s.dir.clone(), i)),
                Position::Interior => {
                    germs.push((s.dir.clone(), i));
                    germs.push((s.dir.neg(), i));
                }
            }
        }
        germs.sort_by(|a, b| angle_cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
        Ok(germs)
    }

    /// Log of the product along an infinitesimal counterclockwise loop
    /// around p, computed from the angular order of walls through p.
    pub fn germ_loop_log(&self, p: &[Q], k: u32) -> Result<LieElement> {
        let d = self.truncated(k.min(self.order));
        let germs = d.germs_at(p)?;
        let mut g = GroupElement::identity(&d.alg, d.order);
        for (u, i) in germs {
            let tangent = rot90(&u).to_q();
            let e = d.walls[i].crossing_sign(d.mode, &tangent);
            g = d.walls[i].theta.signed(e).mul(&g);
        }
        Ok(g.log)
    }

    /// A rational rectangle loop around joint p meeting only walls through p.
    pub fn joint_loop(&self, p: &[Q], others: &[Vec<Q>]) -> Result<PiecewisePath> {
        let sup = self.r2_supports()?;
        let incident: Vec<&SupportR2> = sup.iter().copied().filter(|s| s.contains(p)).collect();
        let far: Vec<&SupportR2> = sup.iter().copied().filter(|s| !s.contains(p)).collect();
        // Aspect ratio c avoiding incident directions through corners.
        let mut c = q(1);
        'pick: for cand in [q(1), q(2), qf(1, 2), q(3), qf(1, 3), qf(5, 7), qf(7, 5)] {
            for s in &incident {
                let (dx, dy) = (s.dir.0[0], s.dir.0[1]);
                if dx != 0 && qf(dy.abs(), dx.abs()) == cand {
                    continue 'pick;
                }
            }
            c = cand;
            break;
        }
        let mut h = q(1);
        for _ in 0..200 {
            let ch = &c * &h;
            let corners: Vec<Vec<Q>> = [(1, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)]
                .iter()
                .map(|&(sx, sy)| vec![&p[0] + &h * q(sx), &p[1] + &ch * q(sy)])
                .collect();
            let inside = |x: &[Q]| (&x[0] - &p[0]).abs() <= h && (&x[1] - &p[1]).abs() <= ch;
            let bad_joint = others.iter().any(|o| o.as_slice() != p && inside(o));
            let bad_wall = !bad_joint
                && far.iter().any(|s| corners.windows(2).any(|e| !matches!(seg_hit(s, &e[0], &e[1]), SegHit::None)));
            if !bad_joint && !bad_wall {
                return Ok(PiecewisePath::new(corners));
            }
            h *= qf(1, 2);
        }
        Err(Error::NonGeneric(format!("no isolating loop around {}", fmt_point(p))))
    }

    /// Checks every joint with an independent rectangle loop. Returns the
    /// first failing joint and its discrepancy.
    pub fn is_consistent(&self, k: u32) -> Result<Option<(Vec<Q>, LieElement)>> {
        let d = self.truncated(k.min(self.order));
        let joints = d.joints()?;
        for p in &joints {
            let loop_ = d.joint_loop(p, &joints)?;
            let g = d.path_ordered_product(&loop_, d.order)?;
            if !g.is_identity() {
                return Ok(Some((p.clone(), g.log)));
            }
        }
        Ok(None)
    }

    /// Equality of path-ordered products on a generating family of paths:
    /// short transversals through every interval of every support line, and
    /// loops around every joint.
    pub fn equivalent(&self, o: &Diagram, k: u32) -> Result<bool> {
        Ok(self.equivalence_witness(o, k)?.is_none())
    }

    /// The first probe path on which the two diagrams differ.
    pub fn equivalence_witness(&self, o: &Diagram, k: u32) -> Result<Option<PiecewisePath>> {
        if self.alg != o.alg || self.mode != o.mode {
            return Err(Error::Mismatch("diagrams over different algebras or modes".into()));
        }
        let k = k.min(self.order).min(o.order);
        let a = self.truncated(k);
        let b = o.truncated(k);
        let mut union = a.clone();
        union.walls.extend(b.walls.iter().cloned());
        for path in union.probe_paths()? {
            if a.path_ordered_product(&path, k)? != b.path_ordered_product(&path, k)? {
                return Ok(Some(path));
            }
        }
        Ok(None)
    }

    /// Canonical probe family for this diagram's supports.
    pub fn probe_paths(&self) -> Result<Vec<PiecewisePath>> {
        let sup = self.r2_supports()?;
        let mut lines: Vec<SupportR2> = Vec::new();
        for s in &sup {
            if !lines.iter().any(|l| l.same_line(s)) {
                lines.push(SupportR2::line(s.base.clone(), s.dir.clone()));
            }
        }
        let mut paths = Vec::new();
        for l in &lines {
            let mut bps: Vec<Q> = Vec::new();
            for s in &sup {
                if s.kind == SupportKind::Ray && l.same_line(s) {
                    bps.push(l.param(&s.base));
                }
            }
            for o in &lines {
                if o.dir.cross(&l.dir) != 0 {
                    if let Intersection::Point(x) = intersect_supports(l, o) {
                        bps.push(l.param(&x));
                    }
                }
            }
            bps.sort();
            bps.dedup();
            let mut mids: Vec<Q> = Vec::new();
            if bps.is_empty() {
                mids.push(Q::zero());
            } else {
                mids.push(&bps[0] - Q::one());
                for w in bps.windows(2) {
                    mids.push((&w[0] + &w[1]) / q(2));
                }
                mids.push(bps.last().unwrap() + Q::one());
            }
            let nrm = l.normal().to_q();
            for s in mids {
                let x = l.point_at(&s);
                let mut dlt = Q::one();
                let path = loop {
                    let a: Vec<Q> = x.iter().zip(&nrm).map(|(p, n)| p - n * &dlt).collect();
                    let b: Vec<Q> = x.iter().zip(&nrm).map(|(p, n)| p + n * &dlt).collect();
                    let clean = lines
                        .iter()
                        .filter(|o| !o.same_line(l))
                        .all(|o| matches!(seg_hit(o, &a, &b), SegHit::None));
                    if clean {
                        break PiecewisePath::new(vec![a, b]);
                    }
                    dlt *= qf(1, 2);
                };
                paths.push(path);
            }
        }
        let joints = self.joints()?;
        for p in &joints {
            paths.push(self.joint_loop(p, &joints)?);
        }
        Ok(paths)
    }

    /// Index of a wall with identical support and direction, if any.
    pub fn find_same(&self, support: &Support, m: &LatVec) -> Option<usize> {
        self.walls.iter().position(|w| &w.support == support && &w.m == m)
    }

    /// Adds w, merging with an existing wall on the same support and m.
    pub fn add_or_merge(&mut self, w: Wall) -> Result<()> {
        if let Some(i) = self.find_same(&w.support, &w.m) {
            let cur = &self.walls[i];
            // Align the sign of n before adding logs.
            let flip = match (&cur.n, &w.n) {
                (Some(a), Some(b)) => a != b,
                _ => false,
            };
            let add = if flip { w.theta.log.neg() } else { w.theta.log.clone() };
            let log = cur.theta.log.add(&add.with_order(self.order));
            self.walls[i].theta = GroupElement::exp(log);
            return Ok(());
        }
        self.push(w)
    }
}

/// Number of walls whose theta is not the identity.
pub fn nontrivial_walls(d: &Diagram) -> usize {
    d.walls.iter().filter(|w| !w.theta.is_identity()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::rings::{Coefficient, Ring, Var};

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }
    fn pt(x: i64, y: i64) -> Vec<Q> {
        vec![q(x), q(y)]
    }

    fn two_walls(order: u32) -> Diagram {
        let alg = LieAlgebra::classical(2, Ring::free());
        let mut d = Diagram::new(Mode::Tropical, &alg, order);
        let x = LieElement::classical(&alg, order, &v(&[1, 0]), &v(&[0, 1]), Coefficient::var(Var::T(1)));
        let y = LieElement::classical(&alg, order, &v(&[0, 1]), &v(&[1, 0]), Coefficient::var(Var::T(2)));
        let w1 = Wall::new(
            Mode::Tropical,
            v(&[1, 0]),
            Some(v(&[0, 1])),
            Support::R2(SupportR2::line(pt(0, 0), v(&[1, 0]))),
            GroupElement::exp(x),
        )
        .unwrap();
        let w2 = Wall::new(
            Mode::Tropical,
            v(&[0, 1]),
            Some(v(&[1, 0])),
            Support::R2(SupportR2::line(pt(0, 0), v(&[0, 1]))),
            GroupElement::exp(y),
        )
        .unwrap();
        d.push(w1.as_initial()).unwrap();
        d.push(w2.as_initial()).unwrap();
        d
    }

    #[test]
    fn empty_and_single_wall_loops() {
        let d = two_walls(4);
        let sq = PiecewisePath::new(vec![pt(1, -1), pt(1, 1), pt(-1, 1), pt(-1, -1), pt(1, -1)]);
        let empty = Diagram::new(Mode::Tropical, &d.alg, 4);
        assert!(empty.path_ordered_product(&sq, 4).unwrap().is_identity());
        let mut one = d.clone();
        one.walls.truncate(1);
        assert!(one.path_ordered_product(&sq, 4).unwrap().is_identity());
        assert!(one.is_consistent(4).unwrap().is_none());
    }

    #[test]
    fn two_wall_loop_commutator() {
        let d = two_walls(3);
        let sq = PiecewisePath::new(vec![pt(1, -1), pt(1, 1), pt(-1, 1), pt(-1, -1), pt(1, -1)]);
        let g = d.path_ordered_product(&sq, 3).unwrap();
        let alg = &d.alg;
        let t12 = Coefficient::var(Var::T(1)).mul(&Coefficient::var(Var::T(2)), &Ring::free());
        let c = LieElement::classical(alg, 3, &v(&[1, 1]), &v(&[1, -1]), t12);
        assert!(g.log == c || g.log == c.neg(), "{:?}", g.log);
        assert_eq!(g.log, d.germ_loop_log(&pt(0, 0), 3).unwrap());
        let (p, h) = d.is_consistent(3).unwrap().unwrap();
        assert_eq!(p, pt(0, 0));
        assert_eq!(h.min_degree(), Some(2));
    }

    #[test]
    fn joints_and_errors() {
        let d = two_walls(4);
        assert_eq!(d.joints().unwrap(), vec![pt(0, 0)]);
        let through = PiecewisePath::new(vec![pt(-1, -1), pt(1, 1)]);
        assert!(matches!(d.path_ordered_product(&through, 4), Err(Error::HitsJoint(_))));
        let along = PiecewisePath::new(vec![pt(1, 0), pt(2, 0)]);
        assert!(matches!(d.path_ordered_product(&along, 4), Err(Error::Tangent(_)) | Err(Error::VertexOnWall(_))));
        let vertex = PiecewisePath::new(vec![pt(1, 1), pt(1, 0), pt(1, -1)]);
        assert!(matches!(d.path_ordered_product(&vertex, 4), Err(Error::VertexOnWall(_))));
    }

    #[test]
    fn reversal_inverts() {
        let d = two_walls(5);
        let p = PiecewisePath::new(vec![pt(1, 2), pt(-1, 2), pt(-1, -3), pt(2, -1)]);
        let g = d.path_ordered_product(&p, 5).unwrap();
        let h = d.path_ordered_product(&p.reversed(), 5).unwrap();
        assert!(g.mul(&h).is_identity());
    }

    #[test]
    fn refinement_and_trivial_walls_are_equivalent() {
        let d = two_walls(4);
        let mut split = d.clone();
        let w = split.walls.remove(0);
        for dir in [v(&[1, 0]), v(&[-1, 0])] {
            split.walls.push(Wall { support: Support::R2(SupportR2::ray(pt(3, 0), dir)), ..w.clone() });
        }
        assert!(d.equivalent(&split, 4).unwrap());
        let mut extra = d.clone();
        let id = GroupElement::identity(&d.alg, 4);
        extra.walls.push(Wall {
            m: v(&[1, 1]),
            n: Some(v(&[1, -1])),
            support: Support::R2(SupportR2::ray(pt(0, 0), v(&[-1, -1]))),
            theta: id,
            initial: false,
        });
        assert!(d.equivalent(&extra, 4).unwrap());
        let mut missing = d.clone();
        missing.walls.pop();
        assert!(!d.equivalent(&missing, 4).unwrap());
    }
}
