//! Labeled trees over initial walls: multiplicities, automorphisms, supports,
//! genericity and the tree-sum diagram.

use crate::diagram::{Diagram, Mode, Support, Wall};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::lattice::{intersect_supports, pair, Intersection, LatVec, SupportKind, SupportR2, Q};
use crate::lie::LieElement;
use crate::rings::{Coefficient, NilMono};
use std::collections::BTreeMap;

/// A rooted binary tree whose leaves are (wall index, multiple k); the leaf
/// carries the degree-k·m_wall part of the wall's log. Children of a node
/// are stored sorted, so structurally equal trees compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf { wall: usize, k: i64 },
    Node(Box<Tree>, Box<Tree>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    /// Leaves may repeat.
    Labeled,
    /// Leaves are pairwise distinct walls.
    Weighted,
}

impl Tree {
    pub fn node(a: Tree, b: Tree) -> Tree {
        if a <= b {
            Tree::Node(Box::new(a), Box::new(b))
        } else {
            Tree::Node(Box::new(b), Box::new(a))
        }
    }

    pub fn leaves(&self) -> Vec<(usize, i64)> {
        match self {
            Tree::Leaf { wall, k } => vec![(*wall, *k)],
            Tree::Node(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf { .. } => 1,
            Tree::Node(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// m of the outgoing edge.
    pub fn m(&self, d: &Diagram) -> LatVec {
        match self {
            Tree::Leaf { wall, k } => d.walls[*wall].m.scale(*k),
            Tree::Node(a, b) => a.m(d).add(&b.m(d)),
        }
    }

    pub fn degree(&self, d: &Diagram) -> i64 {
        d.alg.deg(&self.m(d))
    }

    /// Order of the automorphism group: a factor 2 for every node whose
    /// subtrees coincide.
    pub fn aut(&self) -> u64 {
        match self {
            Tree::Leaf { .. } => 1,
            Tree::Node(a, b) => a.aut() * b.aut() * if a == b { 2 } else { 1 },
        }
    }

    /// (n, g) by the bracket recursion, None when it vanishes. The sign is
    /// the one fixed by the sorted child order.
    pub fn multiplicity(&self, d: &Diagram) -> Option<(LatVec, LieElement)> {
        match self {
            Tree::Leaf { wall, k } => {
                let w = &d.walls[*wall];
                let m = w.m.scale(*k);
                let comps = w.theta.log.component(&m)?.clone();
                let mut g = LieElement::zero(&d.alg, d.order);
                g.add_term(&m, comps);
                let n = w.n.clone().unwrap_or_else(|| leaf_normal(d, w));
                Some((n, g))
            }
            Tree::Node(a, b) => {
                let (n1, g1) = a.multiplicity(d)?;
                let (n2, g2) = b.multiplicity(d)?;
                let m1 = a.m(d);
                let m2 = b.m(d);
                let n = n2.scale(pair(&m2, &n1)).sub(&n1.scale(pair(&m1, &n2)));
                if n.is_zero() {
                    return None;
                }
                let g = g1.bracket(&g2);
                if g.is_zero() {
                    return None;
                }
                Some((n, g))
            }
        }
    }

    /// Support in the ambient plane: the leaf's wall support, or the ray
    /// from the children's intersection point along the flow direction.
    pub fn support(&self, d: &Diagram) -> Result<Option<SupportR2>> {
        match self {
            Tree::Leaf { wall, .. } => Ok(d.walls[*wall].support.r2().cloned()),
            Tree::Node(a, b) => {
                let (Some(pa), Some(pb)) = (a.support(d)?, b.support(d)?) else {
                    return Ok(None);
                };
                let x = match intersect_supports(&pa, &pb) {
                    Intersection::Point(x) => x,
                    _ => return Ok(None),
                };
                let m = self.m(d);
                let dir = flow_direction(d, &m)?;
                let ray = SupportR2::ray(x, dir);
                if let Some((n, _)) = self.multiplicity(d) {
                    if d.mode == Mode::Tropical {
                        assert_eq!(pair(&ray.dir, &n), 0, "tree support must be orthogonal to n");
                    }
                }
                Ok(Some(ray))
            }
        }
    }
}

/// The normal used for cone-mode leaves: primitive p(m).
fn leaf_normal(d: &Diagram, w: &Wall) -> LatVec {
    match d.alg.omega() {
        Some(om) => om.p(&w.m).primitive(),
        None => w.m.clone(),
    }
}

/// −m in tropical mode, −p(m) in cone mode.
pub fn flow_direction(d: &Diagram, m: &LatVec) -> Result<LatVec> {
    match d.mode {
        Mode::Tropical => Ok(m.neg().primitive()),
        Mode::Cone => {
            let om = d.alg.omega().ok_or_else(|| Error::Precondition("cone mode needs a skew form".into()))?;
            let p = om.p(m);
            if p.is_zero() {
                return Err(Error::Precondition(format!("degenerate skew form on {m}")));
            }
            Ok(p.neg().primitive())
        }
    }
}

/// Leaves of d: (wall, k) with a nonzero log component at k·m_wall.
fn leaf_set(d: &Diagram, max_deg: i64) -> Vec<(Tree, i64)> {
    let mut out = Vec::new();
    for (i, w) in d.walls.iter().enumerate() {
        let dm = d.alg.deg(&w.m);
        let mut k = 1;
        while k * dm <= max_deg {
            if w.theta.log.component(&w.m.scale(k)).is_some() {
                out.push((Tree::Leaf { wall: i, k }, k * dm));
            }
            k += 1;
        }
    }
    out
}

/// All trees of degree < k up to isomorphism, with |Aut|, grouped by
/// increasing degree.
pub fn enumerate_trees(d: &Diagram, kind: TreeKind, k: u32) -> Vec<(Tree, u64)> {
    let max = k as i64 - 1;
    let mut by_deg: BTreeMap<i64, Vec<Tree>> = BTreeMap::new();
    for (t, dg) in leaf_set(d, max) {
        by_deg.entry(dg).or_default().push(t);
    }
    for dg in 1..=max {
        let mut new: Vec<Tree> = Vec::new();
        for d1 in 1..=dg / 2 {
            let d2 = dg - d1;
            let (Some(l1), Some(l2)) = (by_deg.get(&d1), by_deg.get(&d2)) else { continue };
            for (ia, a) in l1.iter().enumerate() {
                for (ib, b) in l2.iter().enumerate() {
                    if d1 == d2 && ib < ia {
                        continue;
                    }
                    if kind == TreeKind::Weighted {
                        let la = a.leaves();
                        if b.leaves().iter().any(|x| la.iter().any(|y| y.0 == x.0)) {
                            continue;
                        }
                    }
                    new.push(Tree::node(a.clone(), b.clone()));
                }
            }
        }
        new.sort();
        new.dedup();
        by_deg.entry(dg).or_default().extend(new);
    }
    let mut out = Vec::new();
    for (_, ts) in by_deg {
        for t in ts {
            let a = t.aut();
            out.push((t, a));
        }
    }
    out
}

/// Whether some monomials of a and b have a nonzero product.
fn coeff_product_nonzero(a: &LieElement, b: &LieElement) -> bool {
    let monos = |g: &LieElement| -> Vec<NilMono> {
        let mut v = Vec::new();
        for comps in g.terms().values() {
            for c in comps {
                v.extend(c.0.keys().cloned());
            }
        }
        v
    };
    let ma = monos(a);
    let mb = monos(b);
    let ring = a.alg.ring;
    ma.iter().any(|x| mb.iter().any(|y| x.mul(y, &ring).is_some()))
}

/// Pairwise check of tree supports up to order k. Returns the first pair
/// whose supports meet other than transversally at a point interior to both.
pub fn check_generic(d: &Diagram, k: u32) -> Result<Option<(Tree, Tree)>> {
    let trees: Vec<(Tree, i64, LieElement, SupportR2)> = enumerate_trees(d, TreeKind::Labeled, k)
        .into_iter()
        .filter_map(|(t, _)| {
            let (_, g) = t.multiplicity(d)?;
            let s = t.support(d).ok()??;
            let dg = t.degree(d);
            Some((t, dg, g, s))
        })
        .collect();
    for i in 0..trees.len() {
        for j in i + 1..trees.len() {
            let (ta, da, ga, sa) = &trees[i];
            let (tb, db, gb, sb) = &trees[j];
            if da + db >= k as i64 || !coeff_product_nonzero(ga, gb) {
                continue;
            }
            let bad = match intersect_supports(sa, sb) {
                Intersection::Empty => false,
                Intersection::Overlap => true,
                Intersection::Point(x) => {
                    let at_base = |s: &SupportR2| s.kind == SupportKind::Ray && s.base == x;
                    at_base(sa) || at_base(sb)
                }
            };
            if bad {
                return Ok(Some((ta.clone(), tb.clone())));
            }
        }
    }
    Ok(None)
}

/// One wall per tree with at least two leaves, nonempty support and
/// nonzero multiplicity, with log g/|Aut|; initial walls are kept.
pub fn tree_sum_diagram(d: &Diagram, k: u32) -> Result<Diagram> {
    if let Some((a, b)) = check_generic(d, k)? {
        return Err(Error::NonGeneric(format!("tree supports {a:?} and {b:?} meet non-generically")));
    }
    let mut out = Diagram { order: k, ..d.clone() };
    out.walls = d.walls.iter().map(|w| Wall { theta: w.theta.with_order(k), ..w.clone() }).collect();
    for (t, aut) in enumerate_trees(d, TreeKind::Labeled, k) {
        if t.leaf_count() < 2 {
            continue;
        }
        let Some((n, g)) = t.multiplicity(d) else { continue };
        let Some(s) = t.support(d)? else { continue };
        let m = t.m(d).primitive();
        let log = g.scale(&Q::new(1.into(), (aut as i64).into())).with_order(k);
        let n = if d.mode == Mode::Tropical { Some(n.primitive()) } else { None };
        let w = Wall::new(d.mode, m, n, Support::R2(s), GroupElement::exp(log))?;
        out.add_or_merge(w)?;
    }
    Ok(out)
}

/// All ordered binary trees (ribbon structures) over a multiset of leaves,
/// counted: returns the number of planar binary trees whose unordered
/// shape is `t`.
pub fn ribbon_count(t: &Tree) -> u64 {
    match t {
        Tree::Leaf { .. } => 1,
        Tree::Node(a, b) => {
            let base = ribbon_count(a) * ribbon_count(b);
            if a == b {
                base
            } else {
                2 * base
            }
        }
    }
}

/// Coefficient-free summary used in reports.
pub fn describe_tree(t: &Tree) -> String {
    match t {
        Tree::Leaf { wall, k } => {
            if *k == 1 {
                format!("w{wall}")
            } else {
                format!("{k}·w{wall}")
            }
        }
        Tree::Node(a, b) => format!("[{} {}]", describe_tree(a), describe_tree(b)),
    }
}

/// Scalar c with g = c·(unit) along (m, n); helper for reports.
pub fn scalar_of(g: &LieElement, m: &LatVec, n: &LatVec) -> Option<Coefficient> {
    g.scalar_along(m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{perturb, standard_initial};
    use crate::lattice::q;
    use crate::lie::LieAlgebra;
    use crate::rings::{Ring, Var};

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn two_leaf_tree() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 3, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let ts = enumerate_trees(&d, TreeKind::Labeled, 3);
        let joined = Tree::node(Tree::Leaf { wall: 0, k: 1 }, Tree::Leaf { wall: 1, k: 1 });
        assert!(ts.iter().any(|(t, _)| *t == joined));
        let (n, g) = joined.multiplicity(&d).unwrap();
        assert_eq!(n, v(&[1, -1]));
        let t12 = Coefficient::var(Var::T(1)).mul(&Coefficient::var(Var::T(2)), &Ring::free());
        assert_eq!(g.scalar_along(&v(&[1, 1]), &n), Some(t12));
        assert_eq!(joined.support(&d).unwrap(), Some(SupportR2::ray(vec![q(0), q(0)], v(&[-1, -1]))));
        // Parallel children vanish.
        let par = Tree::node(Tree::Leaf { wall: 0, k: 1 }, Tree::Leaf { wall: 0, k: 1 });
        assert!(par.multiplicity(&d).is_none());
        assert_eq!(par.aut(), 2);
    }

    #[test]
    fn single_wall_leaves_only() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 3, &[v(&[1, 0])]).unwrap();
        let ts = enumerate_trees(&d, TreeKind::Labeled, 3);
        let with_g: Vec<_> = ts.iter().filter(|(t, _)| t.multiplicity(&d).is_some()).collect();
        assert_eq!(with_g.len(), 2);
        assert!(with_g.iter().all(|(t, _)| t.leaf_count() == 1));
    }

    #[test]
    fn genericity() {
        let alg = LieAlgebra::classical(2, Ring::truncated(2));
        let d = standard_initial(&alg, 4, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert!(check_generic(&d, 4).unwrap().is_some());
        let p = perturb(&d, 2, 7).unwrap();
        assert_eq!(p.walls.len(), 6);
        assert!(check_generic(&p, 4).unwrap().is_none());
    }

    #[test]
    fn weighted_excludes_repeats() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 4, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let ts = enumerate_trees(&d, TreeKind::Weighted, 4);
        for (t, _) in ts {
            let mut w: Vec<usize> = t.leaves().iter().map(|x| x.0).collect();
            let n = w.len();
            w.dedup();
            w.sort();
            w.dedup();
            assert_eq!(w.len(), n);
        }
    }
}
