//! Worked examples checked against oracles computed independently of the
//! code path under test.

use scatter::completion::{complete, perturb_with_offsets, standard_initial};
use scatter::diagram::{Diagram, Mode, Support, Wall};
use scatter::group::GroupElement;
use scatter::lattice::{q, qf, LatVec, SupportR2, Q};
use scatter::lie::{Alg, AlgElem, LieAlgebra, LieElement};
use scatter::quiver::{initial_diagram, quantum_dilog_log, quiver_theta, QuiverData};
use scatter::rings::{perturbation_substitute, Coefficient, RatV, Ring, Var};
use scatter::trees::tree_sum_diagram;

fn v(c: &[i64]) -> LatVec {
    LatVec::new(c)
}

fn u(i: u32, j: u32) -> Coefficient {
    Coefficient::var(Var::U(i, j))
}

/// Single wall 1 + t1 z^{(1,0)} on the x-axis.
fn x_axis(k: u32) -> Diagram {
    let alg = LieAlgebra::classical(2, Ring::free());
    standard_initial(&alg, k, &[v(&[1, 0])]).unwrap()
}

/// Σ_j x^j/j! in the algebra, by repeated multiplication.
fn exp_series(x: &AlgElem, one: &AlgElem) -> AlgElem {
    let mut out = one.clone();
    let mut pw = one.clone();
    for k in 1..x.order as i64 {
        pw = pw.mul(x).scale(&Q::new(1.into(), k.into()));
        out = out.add(&pw);
    }
    out
}

/// The log as an element of the quantum torus at base (0, 0).
fn as_alg(l: &LieElement, alg: &Alg) -> AlgElem {
    let z = LatVec::zero(2);
    let mut a = AlgElem::zero(alg, l.order, z.clone(), Some(z));
    for (m, c) in l.terms() {
        a.add_term(m, c[0].clone());
    }
    a
}

#[test]
fn perturbing_one_wall_with_one_copy() {
    let d = x_axis(4);
    let p = perturb_with_offsets(&d, 1, &[qf(3, 1009)]).unwrap();
    assert_eq!(p.walls.len(), 1);
    // log(1 + t1 x) has t1-linear part x ∂_{(0,1)}; it becomes u11 x ∂_{(0,1)}.
    let expect = LieElement::classical(&p.alg, 4, &v(&[1, 0]), &v(&[0, 1]), u(1, 1));
    assert_eq!(p.walls[0].theta.log, expect);
    assert_eq!(p.walls[0].support, Support::R2(SupportR2::line(vec![q(0), qf(3, 1009)], v(&[1, 0]))));
}

#[test]
fn perturbing_one_wall_with_two_copies() {
    let d = x_axis(4);
    let p = perturb_with_offsets(&d, 2, &[qf(1, 1009), qf(-2, 2018), qf(5, 3027)]).unwrap();
    assert_eq!(p.walls.len(), 3);
    let n = v(&[0, 1]);
    let g1 = |c: Coefficient| LieElement::classical(&p.alg, 4, &v(&[1, 0]), &n, c);
    // g_2 = −½ x² ∂, scaled by 2! u11 u12.
    let g2 = LieElement::classical(&p.alg, 4, &v(&[2, 0]), &n, u(1, 1).mul(&u(1, 2), &Ring::free()).scale_int(-1));
    let logs: Vec<&LieElement> = p.walls.iter().map(|w| &w.theta.log).collect();
    assert_eq!(logs, vec![&g1(u(1, 1)), &g1(u(1, 2)), &g2]);

    // Substituting t1 ↦ u11 + u12 into log(1 + t1 x) gives the same sum.
    let sum = logs.iter().fold(LieElement::zero(&p.alg, 4), |a, b| a.add(b));
    let mut subst = LieElement::zero(&p.alg, 4);
    for (m, c) in d.walls[0].theta.log.terms() {
        subst.add_term(m, c.iter().map(|x| perturbation_substitute(x, 2)).collect());
    }
    assert_eq!(sum, subst);
}

#[test]
fn two_single_order_walls_scatter_one_ray() {
    let alg = LieAlgebra::classical(2, Ring::free());
    let k = 3;
    let mut d = Diagram::new(Mode::Tropical, &alg, k);
    let (a, b) = (qf(2, 1009), qf(-7, 1013));
    for (m, n, var, base) in [
        (v(&[1, 0]), v(&[0, 1]), u(1, 1), vec![q(0), a.clone()]),
        (v(&[0, 1]), v(&[1, 0]), u(2, 1), vec![b.clone(), q(0)]),
    ] {
        let log = LieElement::classical(&alg, k, &m, &n, var);
        let s = Support::R2(SupportR2::line(base, m.clone()));
        d.push(Wall::new(Mode::Tropical, m, Some(n), s, GroupElement::exp(log)).unwrap().as_initial()).unwrap();
    }
    let c = complete(&d, k).unwrap();
    let added: Vec<&Wall> = c.walls.iter().filter(|w| !w.initial).collect();
    assert_eq!(added.len(), 1);
    // Ray from the crossing point (b, a) along −(1,1).
    assert_eq!(added[0].support, Support::R2(SupportR2::ray(vec![b, a], v(&[-1, -1]))));
    // The commutator of the two logs is u11 u21 z^{(1,1)} ∂_{(1,−1)}; the
    // sign depends on which side the wall cancels from.
    let uu = u(1, 1).mul(&u(2, 1), &Ring::free());
    let log = &added[0].theta.log;
    let sc = log.scalar_along(&v(&[1, 1]), &v(&[1, -1])).unwrap();
    assert!(sc == uu || sc == uu.neg(), "{sc:?}");
    assert!(c.equivalent(&tree_sum_diagram(&d, k).unwrap(), k).unwrap());
}

#[test]
fn rank_one_quiver_wall_is_the_dilogarithm() {
    let qd = QuiverData::new(1, &[]).unwrap();
    let d = initial_diagram(&qd, 5).unwrap();
    assert_eq!(d.walls.len(), 1);
    let log = &d.walls[0].theta.log;
    assert_eq!(*log, quantum_dilog_log(&d.alg, 5, &v(&[1])));
    // ẑ^{f}/(v − v^{−1}) + ẑ^{2f}/(2(v² − v^{−2})) + …
    for j in 1..5i64 {
        let want = Coefficient::scalar(RatV::inv_v_difference(j).scale(&Q::new(1.into(), j.into())));
        assert_eq!(log.component(&v(&[j])).unwrap()[0], want);
    }
    // The homogeneous pieces commute.
    let g1 = log.degree_part(1);
    let g2 = log.degree_part(2);
    assert!(g1.bracket(&g2).is_zero());
}

#[test]
fn group_action_is_conjugation_in_the_quantum_torus() {
    let qd = QuiverData::a2();
    let d = initial_diagram(&qd, 6).unwrap();
    let alg = d.alg.clone();
    let z = LatVec::zero(2);
    let one = AlgElem::qmonomial(&alg, 6, &z, &z);
    let l = &d.walls[0].theta.log;
    let e = exp_series(&as_alg(l, &alg), &one);
    let einv = exp_series(&as_alg(&l.neg(), &alg), &one);
    assert_eq!(e.mul(&einv), one);
    for n in [v(&[1, 0]), v(&[0, 1]), v(&[2, 1])] {
        let a = AlgElem::qmonomial(&alg, 6, &z, &n);
        assert_eq!(d.walls[0].theta.apply(&a), e.mul(&a).mul(&einv), "n = {n}");
    }
}

#[test]
fn a2_theta_across_the_first_wall() {
    let k = 5;
    let c = complete(&initial_diagram(&QuiverData::a2(), k).unwrap(), k).unwrap();
    let alg = c.alg.clone();
    let z = LatVec::zero(2);
    let one = AlgElem::qmonomial(&alg, k, &z, &z);
    let n = v(&[1, 0]);
    // From (1,1) to (−2, 1/3) only f_1^⊥ is crossed, against f_1.
    let th = quiver_theta(&c, &n, &[q(-2), qf(1, 3)], k).unwrap();
    let l = &c.walls[0].theta.log;
    assert_eq!(c.walls[0].m, v(&[1, 0]));
    let e = exp_series(&as_alg(l, &alg), &one);
    let einv = exp_series(&as_alg(&l.neg(), &alg), &one);
    let zn = AlgElem::qmonomial(&alg, k, &z, &n);
    assert_eq!(th, einv.mul(&zn).mul(&e));
    assert_ne!(th, zn);
}
