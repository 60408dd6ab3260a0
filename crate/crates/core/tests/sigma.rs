use ivpp_core::mapkit::{builtin_toda3, iterate, parse_map, DEFAULT_TERM_CEILING};
use ivpp_core::sigma::*;
use ivpp_core::symcore::{parse_poly, parse_ratfunc, Poly, RatFunc, Scalar, VarSet};
use ivpp_core::Error;
use rand::{Rng, SeedableRng};

fn toda_conditions() -> SigmaConditions {
    let it = iterate(&builtin_toda3(), 2, DEFAULT_TERM_CEILING).unwrap();
    build_conditions(&it, 0).unwrap()
}

fn hv() -> VarSet {
    VarSet::of(&["r", "t", "f", "g"])
}

#[test]
fn toda_conditions_have_two_zero_conditions() {
    let c = toda_conditions();
    assert_eq!(c.zero_conditions.len(), 2);
    let xv = builtin_toda3().vars().clone();
    assert_eq!(c.zero_conditions[0], parse_poly("y*w + y*z + v*w", &xv).unwrap());
    let names: Vec<&str> = c.invariant_conditions.iter().map(|(_, n)| n.as_str()).collect();
    assert_eq!(names, ["r", "t", "f", "g"]);
}

#[test]
fn u_component_conditions_start_with_its_denominator() {
    let it = iterate(&builtin_toda3(), 2, DEFAULT_TERM_CEILING).unwrap();
    let c = build_conditions(&it, 3).unwrap();
    let xv = builtin_toda3().vars().clone();
    assert_eq!(c.zero_conditions[0], parse_poly("z*u + z*x + w*u", &xv).unwrap());
}

#[test]
fn toda_parameterization_passes() {
    let rep = verify_param(&toda_conditions(), &builtin_toda_param()).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.zero_residuals.len(), 2);
    assert_eq!(rep.invariant_residuals.len(), 4);
}

#[test]
fn toda_parameterization_coordinates() {
    let p = builtin_toda_param();
    let h = hv();
    assert_eq!(p.values[1], parse_ratfunc("g^2*f/(-g^2*t + f^2*r)", &h).unwrap());
    assert_eq!(p.values[3], parse_ratfunc("-(r + g)*(-g^2*t + f^2*r)/g^3", &h).unwrap());
}

#[test]
fn scaled_coordinate_fails_on_r() {
    let mut p = builtin_toda_param();
    p.values[0] = p.values[0].scale(&Scalar::from_int(2));
    let rep = verify_param(&toda_conditions(), &p).unwrap();
    assert!(!rep.passed());
    let (name, res) = &rep.invariant_residuals[0];
    assert_eq!(name, "r");
    // x y z doubles, so the residual is 2r - r.
    assert_eq!(*res, RatFunc::from_poly(Poly::var(&hv(), 0)));
}

#[test]
fn text_round_trip() {
    let p = builtin_toda_param();
    assert_eq!(Parameterization::from_text(&p.to_text()).unwrap(), p);
}

#[test]
fn identity_parameterization_of_a_full_rank_map() {
    let m = parse_map("map swap\nvars x y\ninv a = x + y\ninv b = x*y\nX = y\nY = x\n").unwrap();
    let it = iterate(&m, 1, DEFAULT_TERM_CEILING).unwrap();
    let c = build_conditions(&it, 0).unwrap();
    assert!(c.zero_conditions.is_empty());
    // p = d, so a parameterization by the invariant values needs a square
    // root; the trivial map with H_k = x_k is parameterized by h itself.
    let m = parse_map("map id\nvars x y\ninv a = x\ninv b = y\nX = x\nY = y\n").unwrap();
    let it = iterate(&m, 1, DEFAULT_TERM_CEILING).unwrap();
    let c = build_conditions(&it, 0).unwrap();
    let h = VarSet::of(&["a", "b"]);
    let p = Parameterization::new(
        h.clone(),
        vec![RatFunc::from_poly(Poly::var(&h, 0)), RatFunc::from_poly(Poly::var(&h, 1))],
    )
    .unwrap();
    assert!(verify_param(&c, &p).unwrap().passed());
    let e = eliminate_triangular(&c, &[0, 1]).unwrap();
    assert_eq!(e.param, p);
}

#[test]
fn exact_points_on_the_variety() {
    let c = toda_conditions();
    let p = builtin_toda_param();
    let map = builtin_toda3();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let hp = |s: &str| parse_poly(s, &hv()).unwrap();
    let poles = [hp("g"), hp("f"), hp("-g^2*t+f^2*r"), hp("-g^2*t+g*f^2+f^2*r")];
    let mut checked = 0;
    while checked < 50 {
        let h: Vec<Scalar> = (0..4)
            .map(|_| Scalar::new(rng.gen_range(-30i64..=30), rng.gen_range(1i64..=12)))
            .collect();
        if poles.iter().any(|q| q.eval(&h).is_zero()) {
            continue;
        }
        let x: Vec<Scalar> = p.values.iter().map(|v| v.eval(&h).unwrap()).collect();
        for (k, (inv, _)) in c.invariant_conditions.iter().enumerate() {
            assert_eq!(inv.eval(&x), h[k]);
        }
        for z in &c.zero_conditions {
            assert!(z.eval(&x).is_zero());
        }
        assert_eq!(map.invariants().len(), 4);
        checked += 1;
    }
}

#[test]
fn elimination_recovers_the_toda_parameterization() {
    let c = toda_conditions();
    // Solve for v, u, z, y, x, w in turn.
    let e = eliminate_triangular(&c, &[4, 3, 2, 1, 0, 5]).unwrap();
    assert_eq!(e.param, builtin_toda_param());
    assert!(verify_param(&c, &e.param).unwrap().passed());
    let hp = |s: &str| parse_poly(s, &hv()).unwrap();
    for q in ["g", "f"] {
        assert!(e.excluded.contains(&hp(q)), "{q}");
    }
}

#[test]
fn elimination_of_a_one_variable_system() {
    let m = parse_map("map shift\nvars x\ninv h = x\nX = x\n").unwrap();
    let it = iterate(&m, 1, DEFAULT_TERM_CEILING).unwrap();
    let c = build_conditions(&it, 0).unwrap();
    let e = eliminate_triangular(&c, &[0]).unwrap();
    let h = VarSet::of(&["h"]);
    assert_eq!(e.param.values, vec![RatFunc::from_poly(Poly::var(&h, 0))]);
    assert!(e.excluded.is_empty());
}

#[test]
fn quadratic_stage_is_unsolvable() {
    let m = parse_map("map sq\nvars x\ninv h = x^2\nX = -x\n").unwrap();
    let it = iterate(&m, 1, DEFAULT_TERM_CEILING).unwrap();
    let c = build_conditions(&it, 0).unwrap();
    match eliminate_triangular(&c, &[0]) {
        Err(Error::Unsolvable { stage, reason }) => {
            assert_eq!(stage, 1);
            assert!(reason.contains("degree 2"), "{reason}");
        }
        other => panic!("expected Unsolvable, got {other:?}"),
    }
}

#[test]
fn bad_solve_order_is_rejected() {
    let c = toda_conditions();
    assert!(eliminate_triangular(&c, &[0, 1, 2]).is_err());
    assert!(eliminate_triangular(&c, &[0, 0, 1, 2, 3, 4]).is_err());
}
