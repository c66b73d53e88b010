//! Marked trees: cores, the (a_J, ε_J) data, and the orbit-sum comparison
//! against broken-line coefficients.

use crate::diagram::{Diagram, Mode};
use crate::error::{Error, Result};
use crate::lattice::{pair, LatVec, Q};
use crate::lie::AlgElem;
use crate::rings::Coefficient;
use crate::theta::{BrokenLine, Frame};
use crate::trees::{enumerate_trees, Tree, TreeKind};
use std::collections::BTreeMap;

/// A marked tree given by its core: the mark 𝗆 and the labeled trees
/// attached along the core, nearest the marked leaf first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedTree {
    pub mark: LatVec,
    pub attached: Vec<Tree>,
}

impl MarkedTree {
    pub fn aut(&self) -> u64 {
        self.attached.iter().map(Tree::aut).product()
    }

    pub fn core_len(&self) -> usize {
        self.attached.len()
    }
}

/// a_J by iterated action along the core, and ε_J = ∏ sgn⟨−m_{e_{i−1}}, n_{L_i}⟩.
/// None when some attached tree has vanishing multiplicity.
pub fn marked_core(j: &MarkedTree, d: &Diagram, order: u32) -> Result<Option<(AlgElem, i32)>> {
    if d.mode != Mode::Tropical {
        return Err(Error::Unsupported("marked cores are computed in tropical mode".into()));
    }
    let frame = Frame::Tropical(j.mark.clone());
    let mut a = frame.monomial(d, order, &LatVec::zero(d.rank()));
    let mut m = j.mark.clone();
    let mut eps = 1;
    for t in &j.attached {
        let Some((n, g)) = t.multiplicity(d) else { return Ok(None) };
        eps *= pair(&m.neg(), &n).signum() as i32;
        a = a.act(&g.with_order(order));
        m = m.add(&t.m(d));
    }
    Ok(Some((a, eps)))
}

struct Attach {
    tree: Tree,
    m: LatVec,
}

/// Multisets from `pool` (indices with repetition, non-decreasing) whose m's sum to target.
fn multisets(pool: &[usize], ms: &[LatVec], target: &LatVec, deg: &dyn Fn(&LatVec) -> i64) -> Vec<Vec<usize>> {
    fn go(
        pool: &[usize],
        ms: &[LatVec],
        start: usize,
        rest: &LatVec,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        deg: &dyn Fn(&LatVec) -> i64,
    ) {
        if rest.is_zero() {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        for (pi, &i) in pool.iter().enumerate().skip(start) {
            let r = rest.sub(&ms[i]);
            if deg(&ms[i]) <= 0 || deg(&r) < 0 {
                continue;
            }
            cur.push(i);
            go(pool, ms, pi, &r, cur, out, deg);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(pool, ms, 0, target, &mut Vec::new(), &mut out, deg);
    out
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Σ over marked-tree orbits matching the bends of γ of
/// (−1)^l ε_J ∏c_w a_J / (|Aut(J)| |Iso|), with every c_w = 1, as the
/// coefficient of the final monomial. `d_in` is the diagram the trees
/// are built on.
pub fn orbit_sum(d_in: &Diagram, line: &BrokenLine, mark: &LatVec, k: u32) -> Result<Coefficient> {
    let attach: Vec<Attach> = enumerate_trees(d_in, TreeKind::Labeled, k)
        .into_iter()
        .filter_map(|(t, _)| {
            t.multiplicity(d_in)?;
            Some(Attach { m: t.m(d_in), tree: t })
        })
        .collect();
    let ms: Vec<LatVec> = attach.iter().map(|a| a.m.clone()).collect();
    let deg = |m: &LatVec| if m.0.iter().any(|&c| c < 0) { -1 } else { d_in.alg.deg(m) };
    let mut choices: Vec<Vec<Vec<usize>>> = Vec::new();
    for b in &line.bends {
        let mut pool = Vec::new();
        for (i, a) in attach.iter().enumerate() {
            if let Some(s) = a.tree.support(d_in)? {
                if s.contains(&b.point) {
                    pool.push(i);
                }
            }
        }
        let target = b.after.sub(&b.before);
        choices.push(multisets(&pool, &ms, &target, &deg));
    }
    let mut total = Coefficient::zero();
    let mut idx = vec![0usize; choices.len()];
    if choices.iter().any(|c| c.is_empty()) {
        return Ok(total);
    }
    loop {
        let mut attached = Vec::new();
        let mut iso: i64 = 1;
        for (c, &i) in choices.iter().zip(&idx) {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for &a in &c[i] {
                attached.push(attach[a].tree.clone());
                *counts.entry(a).or_default() += 1;
            }
            iso *= counts.values().map(|&n| factorial(n)).product::<i64>();
        }
        let j = MarkedTree { mark: mark.clone(), attached };
        if let Some((a, eps)) = marked_core(&j, d_in, k)? {
            let l = j.core_len() as i64;
            let sign = if l % 2 == 0 { eps } else { -eps };
            let w = Q::new(sign.into(), (j.aut() as i64 * iso).into());
            let c = a.coeff(&line.final_offset);
            total.add_assign(&c.scale(&w));
        }
        let mut p = 0;
        loop {
            if p == idx.len() {
                return Ok(total);
            }
            idx[p] += 1;
            if idx[p] < choices[p].len() {
                break;
            }
            idx[p] = 0;
            p += 1;
        }
    }
}

/// Whether the orbit sum reproduces the broken line's coefficient.
pub fn orbit_sum_check(d_in: &Diagram, line: &BrokenLine, mark: &LatVec, k: u32) -> Result<bool> {
    Ok(orbit_sum(d_in, line, mark, k)? == line.coeff)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{complete, standard_initial};
    use crate::lattice::qf;
    use crate::lie::LieAlgebra;
    use crate::rings::{Ring, Var};
    use crate::theta::enumerate_broken_lines;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn trivial_core() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 4, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let j = MarkedTree { mark: v(&[2, 1]), attached: vec![] };
        let (a, e) = marked_core(&j, &d, 4).unwrap().unwrap();
        assert_eq!(e, 1);
        assert_eq!(a, AlgElem::monomial(&d.alg, 4, &v(&[2, 1])));
    }

    #[test]
    fn one_leaf_core() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 4, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        // Wall 0 has n = (0,1); ⟨(2,3), n⟩ = 3.
        let j = MarkedTree { mark: v(&[2, 3]), attached: vec![Tree::Leaf { wall: 0, k: 1 }] };
        let (a, e) = marked_core(&j, &d, 4).unwrap().unwrap();
        assert_eq!(e, -1);
        let c = a.coeff(&v(&[1, 0]));
        assert_eq!(c, Coefficient::var(Var::T(1)).scale_int(3));
        let flat = MarkedTree { mark: v(&[2, 0]), attached: vec![Tree::Leaf { wall: 0, k: 1 }] };
        assert_eq!(marked_core(&flat, &d, 4).unwrap().unwrap().1, 0);
    }

    #[test]
    fn orbit_sums_match_broken_lines() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 4, &[v(&[1, 0]), v(&[0, 1])]).unwrap();
        let c = complete(&d, 4).unwrap();
        let mark = v(&[-1, 2]);
        let qpt = vec![qf(5, 3), qf(-7, 11)];
        let lines = enumerate_broken_lines(&c, &Frame::Tropical(mark.clone()), &qpt, 4).unwrap();
        assert!(lines.iter().any(|l| l.bends.len() == 2));
        for l in &lines {
            assert!(orbit_sum_check(&d, l, &mark, 4).unwrap(), "{l:?}");
        }
    }
}
