use proptest::prelude::*;
use scatter::completion::{perturb, standard_initial};
use scatter::group::{bch, GroupElement};
use scatter::json;
use scatter::lattice::{intersect_supports, pair, q, qf, LatVec, SkewForm, SupportR2};
use scatter::lie::{Alg, AlgElem, LieAlgebra, LieElement};
use scatter::rings::{perturbation_substitute, Coefficient, LaurentV, NilMono, RatV, Ring, Var};

fn vecs(r: usize, lo: i64, hi: i64) -> impl Strategy<Value = LatVec> {
    prop::collection::vec(lo..hi, r).prop_map(LatVec)
}

fn cone_vec() -> impl Strategy<Value = LatVec> {
    vecs(2, 0, 3).prop_filter("nonzero", |m| !m.is_zero())
}

/// Polynomials in t1, t2 with small rational coefficients.
fn poly() -> impl Strategy<Value = Coefficient> {
    prop::collection::vec((0u32..3, 0u32..3, -5i64..6, 1i64..4), 0..4).prop_map(|ts| {
        let ring = Ring::free();
        let mut c = Coefficient::zero();
        for (a, b, n, d) in ts {
            let mut t = Coefficient::rational(qf(n, d));
            for _ in 0..a {
                t = t.mul(&Coefficient::var(Var::T(1)), &ring);
            }
            for _ in 0..b {
                t = t.mul(&Coefficient::var(Var::T(2)), &ring);
            }
            c.add_assign(&t);
        }
        c
    })
}

/// Coefficients mixing t-monomials and Laurent scalars.
fn coeff() -> impl Strategy<Value = Coefficient> {
    (poly(), -3i32..4, -4i64..5).prop_map(|(p, e, k)| {
        let l = LaurentV::from_terms([(e, q(k)), (0, q(1))]);
        p.add(&Coefficient::one()).scale_ratv(&RatV::from(l))
    })
}

fn quantum_alg() -> Alg {
    LieAlgebra::quantum(SkewForm::new(vec![vec![0, 1], vec![-1, 0]]).unwrap(), Ring::free())
}

fn classical_elem(alg: &Alg, order: u32) -> impl Strategy<Value = LieElement> {
    let alg = alg.clone();
    prop::collection::vec((cone_vec(), 1i64..3, coeff()), 1..3).prop_map(move |ts| {
        let mut g = LieElement::zero(&alg, order);
        for (m, k, c) in ts {
            let n = LatVec::new(&[-m.0[1], m.0[0]]).scale(k);
            g = g.add(&LieElement::classical(&alg, order, &m, &n, c));
        }
        g
    })
}

fn quantum_elem(alg: &Alg, order: u32) -> impl Strategy<Value = LieElement> {
    let alg = alg.clone();
    prop::collection::vec((cone_vec(), coeff()), 1..3).prop_map(move |ts| {
        let mut g = LieElement::zero(&alg, order);
        for (m, c) in ts {
            g = g.add(&LieElement::quantum(&alg, order, &m, c));
        }
        g
    })
}

proptest! {
    #[test]
    fn pairing_is_bilinear(a in vecs(3, -50, 50), b in vecs(3, -50, 50), n in vecs(3, -50, 50), k in -9i64..10) {
        prop_assert_eq!(pair(&a.add(&b), &n), pair(&a, &n) + pair(&b, &n));
        prop_assert_eq!(pair(&a.scale(k), &n), k * pair(&a, &n));
        prop_assert_eq!(pair(&a, &n.add(&b)), pair(&a, &n) + pair(&a, &b));
    }

    #[test]
    fn primitive_divides(m in vecs(3, -60, 60)) {
        prop_assume!(!m.is_zero());
        let p = m.primitive();
        prop_assert_eq!(p.content(), 1);
        prop_assert_eq!(p.scale(m.content()), m.clone());
        prop_assert_eq!(m.multiple_of(&p), Some(m.content()));
    }

    #[test]
    fn intersection_is_symmetric(
        a in (-9i64..10, -9i64..10, vecs(2, -3, 4), any::<bool>()),
        b in (-9i64..10, -9i64..10, vecs(2, -3, 4), any::<bool>()),
    ) {
        prop_assume!(!a.2.is_zero() && !b.2.is_zero());
        let mk = |(x, y, d, ray): (i64, i64, LatVec, bool)| {
            let base = vec![qf(x, 3), qf(y, 2)];
            if ray { SupportR2::ray(base, d) } else { SupportR2::line(base, d) }
        };
        let (s, t) = (mk(a), mk(b));
        let st = intersect_supports(&s, &t);
        prop_assert_eq!(&st, &intersect_supports(&t, &s));
        if let scatter::lattice::Intersection::Point(x) = &st {
            prop_assert!(s.contains(x) && t.contains(x));
        }
    }

    #[test]
    fn quantum_integers(n in -12i64..13) {
        let qn = LaurentV::quantum_integer(n);
        let vd = LaurentV::from_terms([(1, q(1)), (-1, q(-1))]);
        prop_assert_eq!(qn.mul(&vd), LaurentV::v_difference(n));
        prop_assert_eq!(qn.bar(), qn.clone());
        prop_assert_eq!(LaurentV::quantum_integer(-n), qn.neg());
    }

    #[test]
    fn substitution_is_a_ring_map(a in poly(), b in poly(), l in 1u32..4) {
        let ring = Ring::free();
        let f = |c: &Coefficient| perturbation_substitute(c, l);
        prop_assert_eq!(f(&a.add(&b)), f(&a).add(&f(&b)));
        prop_assert_eq!(f(&a.mul(&b, &ring)), f(&a).mul(&f(&b), &ring));
    }

    #[test]
    fn coefficient_ring_axioms(a in coeff(), b in coeff(), c in coeff()) {
        let ring = Ring::truncated(2);
        prop_assert_eq!(a.mul(&b, &ring).mul(&c, &ring), a.mul(&b.mul(&c, &ring), &ring));
        prop_assert_eq!(a.mul(&b, &ring), b.mul(&a, &ring));
        prop_assert_eq!(a.mul(&b.add(&c), &ring), a.mul(&b, &ring).add(&a.mul(&c, &ring)));
    }

    #[test]
    fn nilpotent_variables_square_to_zero(i in 1u32..4, j in 1u32..4) {
        let u = Coefficient::var(Var::U(i, j));
        prop_assert!(u.mul(&u, &Ring::free()).is_zero());
        prop_assert_eq!(Coefficient::term(NilMono::var(Var::U(i, j)), RatV::one()), u);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classical_bracket_laws(x in classical_elem(&LieAlgebra::classical(2, Ring::free()), 6),
                              y in classical_elem(&LieAlgebra::classical(2, Ring::free()), 6),
                              z in classical_elem(&LieAlgebra::classical(2, Ring::free()), 6)) {
        prop_assert_eq!(x.bracket(&y), y.bracket(&x).neg());
        let jac = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn quantum_bracket_laws(x in quantum_elem(&quantum_alg(), 6),
                            y in quantum_elem(&quantum_alg(), 6),
                            z in quantum_elem(&quantum_alg(), 6)) {
        prop_assert_eq!(x.bracket(&y), y.bracket(&x).neg());
        let jac = x.bracket(&y.bracket(&z)).add(&y.bracket(&z.bracket(&x))).add(&z.bracket(&x.bracket(&y)));
        prop_assert!(jac.is_zero());
    }

    #[test]
    fn bch_is_associative(x in quantum_elem(&quantum_alg(), 5),
                          y in quantum_elem(&quantum_alg(), 5),
                          z in quantum_elem(&quantum_alg(), 5)) {
        prop_assert_eq!(bch(&bch(&x, &y), &z), bch(&x, &bch(&y, &z)));
        prop_assert!(bch(&x, &x.neg()).is_zero());
    }

    #[test]
    fn action_is_a_homomorphism(x in classical_elem(&LieAlgebra::classical(2, Ring::free()), 5),
                                y in classical_elem(&LieAlgebra::classical(2, Ring::free()), 5),
                                m in vecs(2, -2, 3)) {
        let (g, h) = (GroupElement::exp(x), GroupElement::exp(y));
        let a = AlgElem::monomial(g.alg(), 5, &m);
        prop_assert_eq!(g.mul(&h).apply(&a), g.apply(&h.apply(&a)));
        prop_assert_eq!(g.inverse().apply(&g.apply(&a)), a);
    }

    #[test]
    fn quantum_action_is_a_homomorphism(x in quantum_elem(&quantum_alg(), 5),
                                        y in quantum_elem(&quantum_alg(), 5),
                                        m in vecs(2, -2, 3), n in vecs(2, -2, 3)) {
        let (g, h) = (GroupElement::exp(x), GroupElement::exp(y));
        let a = AlgElem::qmonomial(g.alg(), 5, &m, &n);
        prop_assert_eq!(g.mul(&h).apply(&a), g.apply(&h.apply(&a)));
    }

    #[test]
    fn truncation_commutes_with_bracket(x in classical_elem(&LieAlgebra::classical(2, Ring::free()), 7),
                                        y in classical_elem(&LieAlgebra::classical(2, Ring::free()), 7),
                                        k in 2u32..7) {
        prop_assert_eq!(x.bracket(&y).with_order(k), x.with_order(k).bracket(&y.with_order(k)));
        prop_assert_eq!(bch(&x, &y).with_order(k), bch(&x.with_order(k), &y.with_order(k)));
    }

    #[test]
    fn json_round_trips(x in classical_elem(&LieAlgebra::classical(2, Ring::free()), 6),
                        y in quantum_elem(&quantum_alg(), 6),
                        c in coeff()) {
        let back = json::lie_from(&json::lie_to(&x), &x.alg, 6).unwrap();
        prop_assert_eq!(back, x);
        let back = json::lie_from(&json::lie_to(&y), &y.alg, 6).unwrap();
        prop_assert_eq!(back, y);
        prop_assert_eq!(json::coeff_from(&json::coeff_to(&c), &Ring::free()).unwrap(), c);
    }

    #[test]
    fn diagram_json_round_trips(seed in 0u64..1000, k in 2u32..5) {
        let alg = LieAlgebra::classical(2, Ring::truncated(2));
        let d = standard_initial(&alg, k, &[LatVec::new(&[1, 0]), LatVec::new(&[0, 1])]).unwrap();
        let p = perturb(&d, 2, seed).unwrap();
        let text = json::to_string(&json::diagram_to(&p));
        let back = json::diagram_from(&json::parse(&text, "mem").unwrap()).unwrap();
        prop_assert_eq!(json::to_string(&json::diagram_to(&back)), text);
    }
}
