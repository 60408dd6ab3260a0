//! Generators and property bodies shared by the property suite and the
//! acceptance run.

#![allow(dead_code)]

use ivpp_core::symcore::gcd::normalize;
use ivpp_core::symcore::{gcd, squarefree, squarefree_part, substitute, Poly, RatFunc, Scalar, Term, VarSet};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Outcome = Result<(), TestCaseError>;

pub fn vars() -> VarSet {
    VarSet::of(&["x", "y", "z"])
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Scalar::new(n, d))
}

fn poly_with(max_terms: usize, max_exp: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, 3), scalar()), 0..=max_terms).prop_map(|ts| {
        let terms = ts
            .into_iter()
            .map(|(e, c)| Term {
                exps: e.into_iter().collect(),
                coeff: c,
            })
            .collect();
        Poly::from_terms(&vars(), terms)
    })
}

fn poly() -> impl Strategy<Value = Poly> {
    poly_with(5, 3)
}

fn nonzero() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn nonconstant(max_terms: usize) -> impl Strategy<Value = Poly> {
    poly_with(max_terms, 2).prop_filter("nonconstant", |p| !p.is_constant())
}

pub fn ring_input() -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (poly(), poly(), poly())
}

pub fn ring_axioms((a, b, c): (Poly, Poly, Poly)) -> Outcome {
    prop_assert_eq!(a.add(&b), b.add(&a));
    prop_assert_eq!(a.mul(&b), b.mul(&a));
    prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
    prop_assert!(a.sub(&a).is_zero());
    prop_assert_eq!(a.mul(&Poly::one(&vars())), a.clone());
    prop_assert_eq!(a.add(&Poly::zero(&vars())), a);
    Ok(())
}

pub fn gcd_input() -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (nonzero(), nonzero(), nonconstant(3))
}

pub fn gcd_divides((a, b, c): (Poly, Poly, Poly)) -> Outcome {
    let g = gcd(&a, &b);
    prop_assert!(g.divides(&a));
    prop_assert!(g.divides(&b));
    let h = gcd(&a.mul(&c), &b.mul(&c));
    prop_assert!(c.divides(&h));
    // gcd(ac, bc) = c gcd(a, b) up to a unit.
    prop_assert!(h.associate_of(&c.mul(&g)));
    Ok(())
}

pub fn division_input() -> impl Strategy<Value = (Poly, Poly)> {
    (poly(), nonzero())
}

pub fn division_round_trip((a, b): (Poly, Poly)) -> Outcome {
    prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a));
    Ok(())
}

pub fn squarefree_input() -> impl Strategy<Value = (Poly, Poly, u32)> {
    (nonconstant(3), nonconstant(3), 1u32..=3)
}

pub fn squarefree_reconstructs((a, b, e): (Poly, Poly, u32)) -> Outcome {
    let p = a.mul(&b.pow(e));
    let parts = squarefree(&p).unwrap();
    let rebuilt = parts.iter().fold(Poly::one(&vars()), |acc, (f, m)| acc.mul(&f.pow(*m)));
    prop_assert!(rebuilt.associate_of(&p));
    for (i, (f, _)) in parts.iter().enumerate() {
        prop_assert_eq!(squarefree_part(f).unwrap(), normalize(f));
        for (g, _) in &parts[i + 1..] {
            prop_assert!(gcd(f, g).is_constant());
        }
    }
    let sq = squarefree_part(&p).unwrap();
    prop_assert!(sq.divides(&p));
    prop_assert!(squarefree_part(&a.mul(&b)).unwrap().associate_of(&sq));
    Ok(())
}

pub type SubstInput = (Poly, Poly, Vec<Poly>, Vec<Poly>, Vec<Scalar>);

pub fn substitution_input() -> impl Strategy<Value = SubstInput> {
    (
        poly(),
        poly(),
        prop::collection::vec(poly_with(3, 2), 3),
        prop::collection::vec(poly_with(2, 1).prop_filter("nonzero", |p| !p.is_zero()), 3),
        prop::collection::vec(scalar(), 3),
    )
}

pub fn substitution_homomorphism((a, b, n, d, pt): SubstInput) -> Outcome {
    let v = vars();
    let vals: Vec<Option<RatFunc>> = n
        .iter()
        .zip(&d)
        .map(|(n, d)| Some(RatFunc::new(n.clone(), d.clone()).unwrap()))
        .collect();
    let sa = substitute(&a, &vals, &v).unwrap();
    let sb = substitute(&b, &vals, &v).unwrap();
    prop_assert_eq!(substitute(&a.mul(&b), &vals, &v).unwrap(), sa.mul(&sb));
    prop_assert_eq!(substitute(&a.add(&b), &vals, &v).unwrap(), sa.add(&sb));
    // Evaluating after substitution agrees with evaluating at the image
    // point, away from poles.
    let image: Option<Vec<Scalar>> = vals.iter().map(|r| r.as_ref().unwrap().eval(&pt).ok()).collect();
    if let (Some(img), Ok(direct)) = (image, sa.eval(&pt)) {
        prop_assert_eq!(direct, a.eval(&img));
    }
    Ok(())
}

pub fn reduction_input() -> impl Strategy<Value = (Poly, Poly, Poly)> {
    (poly(), nonzero(), nonzero())
}

pub fn reduction_idempotent((n, d, c): (Poly, Poly, Poly)) -> Outcome {
    let r = RatFunc::new(n.clone(), d.clone()).unwrap();
    prop_assert_eq!(r.renormalize(), r.clone());
    prop_assert_eq!(RatFunc::new(r.num().clone(), r.den().clone()).unwrap(), r.clone());
    prop_assert_eq!(RatFunc::new(n.mul(&c), d.mul(&c)).unwrap(), r.clone());
    prop_assert!(gcd(r.num(), r.den()).is_constant());
    Ok(())
}
