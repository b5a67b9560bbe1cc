//! Generator-level displays checked against hand expansions.

use std::sync::Arc;

use uqqn::actions::{derive_action, ActionKind};
use uqqn::braidiso::{iota, map_hom, sigma, tau, tau_bar, Braiding, Tensor2};
use uqqn::invariants::{build_xyzw, invariance_failure, Setting, TensorElement4, Variant};
use uqqn::presentations::{Elem, Family, Gen, Presentation};
use uqqn::supertensor::{build_j, build_r_minus, build_r_plus, build_s, TensorOperator};
use uqqn::texpr::{check_identity, parse};
use uqqn::{QField, Scalar};

fn g(fam: Family, f: i32, w: i32) -> Gen {
    Gen::new(fam, f, w)
}

fn pres(fam: Family, frames: usize, n: usize) -> Arc<Presentation<Scalar>> {
    Arc::new(Presentation::new(fam, frames, n).unwrap())
}

fn xi() -> Scalar {
    Scalar::xi()
}

#[test]
fn s_at_n2_unit_entry() {
    let s = build_s::<Scalar>(2);
    assert_eq!(s.get(&[(1, 1), (2, 2)]), Scalar::from_int(1));
    assert_eq!(s.get(&[(2, 2), (2, 2)]), Scalar::q());
}

#[test]
fn j_commutes_with_s_on_first_leg() {
    for n in 1..=3 {
        let s = build_s::<Scalar>(n);
        let j1 = build_j::<Scalar>(n).tensor(&TensorOperator::identity(vec![n]));
        assert_eq!(j1.op_mul(&s).unwrap(), s.op_mul(&j1).unwrap(), "n = {n}");
    }
}

#[test]
fn r_blocks_are_submatrices_of_s() {
    for m in 1..=3 {
        let s = build_s::<Scalar>(m);
        assert_eq!(build_r_plus::<Scalar>(m), s.restrict(|i| i > 0), "m = {m}");
        assert_eq!(build_r_minus::<Scalar>(m), s.restrict(|i| i < 0), "m = {m}");
    }
}

#[test]
fn theta_on_t_j1_t_i2() {
    let a = pres(Family::A, 1, 2);
    let th = Braiding::theta(a.clone(), a.clone()).unwrap();
    let t = |w| vec![g(Family::A, 1, w)];
    let mut want = Tensor2::zero();
    want.add_term([t(2), t(1)], Scalar::from_int(1));
    want.add_term([t(1), t(2)], xi());
    want.add_term([t(-1), t(-2)], xi());
    assert_eq!(th.on_gens(g(Family::A, 1, 1), g(Family::A, 1, 2)), want);

    let mut want = Tensor2::zero();
    want.add_term([t(2), t(2)], Scalar::q());
    want.add_term([t(-2), t(-2)], xi());
    assert_eq!(th.on_gens(g(Family::A, 1, 2), g(Family::A, 1, 2)), want);
}

#[test]
fn theta_on_distinct_frames_keeps_frames() {
    let a_k = pres(Family::A, 1, 2);
    let a_r = pres(Family::A, 2, 2);
    let th = Braiding::theta(a_k, a_r).unwrap();
    let img = th.on_gens(g(Family::A, 1, 1), g(Family::A, 2, 2));
    for ([x, y], _) in img.terms() {
        assert_eq!((x[0].frame, y[0].frame), (2, 1));
    }
    assert_eq!(img.len(), 3);
}

fn sign(e: u32) -> Scalar {
    Scalar::sign(e)
}

fn par(a: i32) -> u32 {
    (a < 0) as u32
}

fn idx(n: i32) -> Vec<i32> {
    (-n..=n).filter(|&a| a != 0).collect()
}

#[test]
fn theta_generator_display() {
    for n in 1..=2 {
        let (a_k, a_r) = (pres(Family::A, 1, n as usize), pres(Family::A, 2, n as usize));
        let th = Braiding::theta(a_k, a_r).unwrap();
        for i in [1, 2] {
            let t = |f, w| vec![g(Family::A, f, w)];
            for a in idx(n) {
                for b in idx(n) {
                    let mut want = Tensor2::zero();
                    let d = uqqn::supertensor::phi_exp(b, a);
                    want.add_term([t(i, a), t(1, b)], sign(par(a) * par(b)) * Scalar::qpow(d));
                    if b < a {
                        want.add_term([t(i, b), t(1, a)], xi());
                    }
                    if -b < a {
                        want.add_term([t(i, -b), t(1, -a)], sign(par(a)) * xi());
                    }
                    assert_eq!(th.on_gens(g(Family::A, 1, b), g(Family::A, i, a)), want, "n={n} i={i} a={a} b={b}");
                }
            }
        }
    }
}

#[test]
fn theta_bar_generator_display() {
    for n in 1..=2 {
        let (b_l, b_s) = (pres(Family::Bar, 1, n as usize), pres(Family::Bar, 2, n as usize));
        let tb = Braiding::theta_bar(b_l, b_s).unwrap();
        let t = |f, w| vec![g(Family::Bar, f, w)];
        for al in [-1, -2] {
            for a in idx(n) {
                for b in idx(n) {
                    let mut want = Tensor2::zero();
                    let d = uqqn::supertensor::phi_exp(b, a);
                    want.add_term([t(al, a), t(-1, b)], sign((par(a) + 1) * (par(b) + 1)) * Scalar::qpow(d));
                    if a < b {
                        want.add_term([t(al, b), t(-1, a)], -xi());
                    }
                    if a < -b {
                        want.add_term([t(al, -b), t(-1, -a)], -(sign(par(b)) * xi()));
                    }
                    assert_eq!(
                        tb.on_gens(g(Family::Bar, -1, b), g(Family::Bar, al, a)),
                        want,
                        "n={n} al={al} a={a} b={b}"
                    );
                }
            }
        }
    }
}

#[test]
fn braided_product_is_theta_on_generators() {
    let a = pres(Family::A, 1, 1);
    let th = Arc::new(Braiding::theta(a.clone(), a.clone()).unwrap());
    let alg = uqqn::braidiso::BraidedAlgebra::new(th.clone());
    let (y, x) = (g(Family::A, 1, -1), g(Family::A, 1, 1));
    let left = Tensor2::pure([vec![], vec![y]]);
    let right = Tensor2::pure([vec![x], vec![]]);
    assert_eq!(alg.mul(&left, &right), th.on_gens(y, x));
}

#[test]
fn iota_shifts_frames() {
    for a in [-2, -1, 1, 2] {
        let e = Elem::<Scalar>::gen(g(Family::A, 1, a));
        assert_eq!(iota(1, &e), Elem::gen(g(Family::A, 2, a)));
        assert_eq!(iota(0, &e), e);
    }
}

#[test]
fn sigma_on_pure_generators() {
    let target = pres(Family::A, 2, 2);
    for a in [-2, -1, 1, 2] {
        for b in [-2, -1, 1, 2] {
            let t = Tensor2::pure([vec![g(Family::A, 1, a)], vec![g(Family::A, 1, b)]]);
            let want = target.normal_form(&[g(Family::A, 2, a), g(Family::A, 1, b)]);
            assert_eq!(sigma(&target, 1, &t), want);
        }
    }
    assert_eq!(sigma(&target, 1, &Tensor2::pure([vec![], vec![]])), Elem::one());
}

#[test]
fn tau_multiplies_by_j() {
    // (T J)_{ia} = sum_c t_ic J_{ca} = (-1)^{|a|} t_{i,-a}
    for a in [-2, -1, 1, 2] {
        let want_sign = if a < 0 { Scalar::from_int(-1) } else { Scalar::from_int(1) };
        assert_eq!(tau::<Scalar>(g(Family::APi, 1, a)), (want_sign, g(Family::A, 1, -a)));
    }
    assert_eq!(tau::<Scalar>(g(Family::APi, 1, 1)).1, g(Family::A, 1, -1));
}

#[test]
fn tau_maps_relations_into_the_ideal() {
    let a = pres(Family::A, 2, 2);
    for rel in pres(Family::APi, 2, 2).relation_elements() {
        assert!(map_hom(&a, tau::<Scalar>, &rel).is_zero(), "{rel}");
    }
    let b = pres(Family::Bar, 2, 2);
    for rel in pres(Family::BarPi, 2, 2).relation_elements() {
        assert!(map_hom(&b, tau_bar::<Scalar>, &rel).is_zero(), "{rel}");
    }
}

#[test]
fn api_matrix_relation_a22() {
    let env = uqqn::cli::texpr_env(2, 2).unwrap();
    let rep = check_identity(
        &parse("R+^{12} Tcheck^{1[3]} Tcheck^{2[3]} == Tcheck^{2[3]} Tcheck^{1[3]} SJ^{12}").unwrap(),
        &env,
    )
    .unwrap();
    assert!(rep.pass, "{:?}", rep.witness);
}

#[test]
fn phi_diagonal_and_off_pattern() {
    let phi = derive_action(ActionKind::Phi, pres(Family::A, 1, 2)).unwrap();
    let t11 = Elem::gen(g(Family::A, 1, 1));
    assert_eq!(phi.apply(1, 1, &t11).unwrap(), t11.scale(&Scalar::q()));
    for b in [-2, -1, 1, 2] {
        for c in [-2, -1, 1, 2] {
            let want = Scalar::qpow(uqqn::supertensor::phi_exp(c, b));
            assert_eq!(phi.on_gen(b, b, g(Family::A, 1, c)), Elem::gen(g(Family::A, 1, c)).scale(&want));
        }
    }
    // L_{12} only moves weight 1 to weight 2 (and -1 to -2 through the xi-terms of S)
    for c in [-2, 2] {
        assert!(phi.on_gen(1, 2, g(Family::A, 1, c)).is_zero());
    }
}

#[test]
fn w_minus_one_at_n1() {
    let invs = build_xyzw::<Scalar>(1, 1, 1, 1, 1, Variant::Corrected);
    let w = invs.iter().find(|i| i.family == 'w' && i.indices == (1, -1)).expect("w_{1,-1}");
    let mut want = TensorElement4::zero();
    want.add_term([vec![], vec![g(Family::APi, 1, -1)], vec![], vec![g(Family::BarPi, -1, -1)]], Scalar::from_int(-1));
    want.add_term([vec![], vec![g(Family::APi, 1, 1)], vec![], vec![g(Family::BarPi, -1, 1)]], Scalar::from_int(1));
    assert_eq!(w.elem, want);
}

#[test]
fn act4_fixes_x11() {
    let set = Setting::<Scalar>::new(1, 1, 1, 1, 1).unwrap();
    let invs = build_xyzw::<Scalar>(1, 1, 1, 1, 1, Variant::Corrected);
    let x = &invs.iter().find(|i| i.family == 'x').unwrap().elem;
    assert_eq!(set.act4(1, 1, x).unwrap(), *x);
    assert_eq!(set.act4(-1, 1, x).unwrap(), TensorElement4::zero());
}

#[test]
fn t11_is_not_invariant() {
    let set = Setting::<Scalar>::new(1, 1, 1, 1, 1).unwrap();
    let z = TensorElement4::pure([vec![g(Family::A, 1, 1)], vec![], vec![], vec![]]);
    assert!(invariance_failure(&set, &z).unwrap().is_some());
}

#[test]
fn named_invariants_at_n2() {
    let set = Setting::<Scalar>::new(2, 1, 1, 1, 1).unwrap();
    let invs = build_xyzw::<Scalar>(1, 1, 1, 1, 2, Variant::Corrected);
    for (fam, idx) in [('y', (1, 1)), ('z', (1, -1)), ('w', (1, -1))] {
        let z = &invs.iter().find(|i| i.family == fam && i.indices == idx).unwrap().elem;
        assert_eq!(invariance_failure(&set, z).unwrap(), None, "{fam}{idx:?}");
    }
}
