//! Multivariate gcd.
//!
//! The inputs are first imaged modulo a prime one variable at a time. A
//! univariate image gcd of degree zero in every shared variable proves the
//! inputs coprime; the image degrees also bound the true gcd degree, which
//! lets a divisor candidate be tried by trial division. The general case goes
//! to the modular algorithm, with a primitive remainder sequence as the last
//! resort.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::modp;
use super::mono::Exps;
use super::poly::Poly;

pub fn normalize(p: &Poly) -> Poly {
    p.primitive_part()
}

/// Greatest common divisor, primitive with positive leading coefficient.
/// `gcd(a, 0)` is `normalize(a)`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    assert!(a.vars() == b.vars(), "varset mismatch in gcd");
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let one = Poly::one(a.vars());
    if a.is_constant() || b.is_constant() {
        return one;
    }
    let ma = min_exps(a);
    let mb = min_exps(b);
    let m: Exps = ma.iter().zip(&mb).map(|(x, y)| *x.min(y)).collect();
    let a = strip_monomial(a, &ma);
    let b = strip_monomial(b, &mb);
    let g = gcd_core(&a, &b);
    normalize(&g.mul_monomial(&m))
}

/// gcd of a list; `1` if the list is empty.
pub fn gcd_many<'a, I: IntoIterator<Item = &'a Poly>>(vars: &super::varset::VarSet, ps: I) -> Poly {
    let mut g: Option<Poly> = None;
    for p in ps {
        let next = match &g {
            None => normalize(p),
            Some(g) => gcd(g, p),
        };
        if next.is_one() {
            return next;
        }
        g = Some(next);
    }
    g.unwrap_or_else(|| Poly::one(vars))
}

/// Cheap coprimality proof. `true` means the inputs are certainly coprime;
/// `false` means nothing.
pub fn certainly_coprime(a: &Poly, b: &Poly) -> bool {
    if a.is_constant() || b.is_constant() {
        return !(a.is_zero() && b.is_zero());
    }
    let m: Vec<bool> = min_exps(a)
        .iter()
        .zip(min_exps(b).iter())
        .map(|(x, y)| *x > 0 && *y > 0)
        .collect();
    if m.iter().any(|x| *x) {
        return false;
    }
    let sa = a.support();
    let sb = b.support();
    let shared: Vec<usize> = sa.iter().copied().filter(|v| sb.contains(v)).collect();
    if shared.is_empty() {
        // A common factor would have to be free of every variable.
        return true;
    }
    match modp_bounds(a, b, &shared) {
        Some(bounds) => bounds.iter().all(|(_, d)| *d == 0),
        None => false,
    }
}

/// Content of `p` with respect to `var`: gcd of its coefficients in `var`.
pub fn content_in(p: &Poly, var: usize) -> Poly {
    let cs = p.coeffs_in(var);
    gcd_many(p.vars(), cs.iter().filter(|c| !c.is_zero()))
}

fn min_exps(p: &Poly) -> Exps {
    let mut m: Exps = p.terms()[0].exps.clone();
    for t in &p.terms()[1..] {
        for (x, e) in m.iter_mut().zip(t.exps.iter()) {
            *x = (*x).min(*e);
        }
    }
    m
}

fn strip_monomial(p: &Poly, m: &[u32]) -> Poly {
    if m.iter().all(|x| *x == 0) {
        return p.clone();
    }
    let terms = p
        .terms()
        .iter()
        .map(|t| super::poly::Term {
            exps: t.exps.iter().zip(m).map(|(a, b)| a - b).collect(),
            coeff: t.coeff.clone(),
        })
        .collect();
    Poly::from_sorted_terms(p.vars(), terms)
}

/// Both inputs nonzero, nonconstant and free of monomial content.
fn gcd_core(a: &Poly, b: &Poly) -> Poly {
    let vars = a.vars();
    if a.is_constant() || b.is_constant() {
        return Poly::one(vars);
    }
    if a.nterms() == b.nterms() && a.associate_of(b) {
        return normalize(a);
    }
    let sa = a.support();
    let sb = b.support();
    // A variable that occurs in only one input cannot occur in the gcd, which
    // must then divide every coefficient with respect to that variable.
    if let Some(&v) = sa.iter().find(|v| !sb.contains(v)) {
        return gcd_with_coeffs(b, a, v);
    }
    if let Some(&v) = sb.iter().find(|v| !sa.contains(v)) {
        return gcd_with_coeffs(a, b, v);
    }
    if let Some(bounds) = modp_bounds(a, b, &sa) {
        if bounds.iter().all(|(_, d)| *d == 0) {
            return Poly::one(vars);
        }
        if let Some(&(v, _)) = bounds.iter().find(|(_, d)| *d == 0) {
            let mut cs = a.coeffs_in(v);
            cs.extend(b.coeffs_in(v));
            cs.retain(|c| !c.is_zero());
            cs.sort_by_key(|c| c.nterms());
            return gcd_many(vars, cs.iter());
        }
        let (small, big) = if a.nterms() <= b.nterms() { (a, b) } else { (b, a) };
        let ds = small.degrees();
        if bounds.iter().all(|(v, d)| ds[*v] == *d) && big.div_exact(small).is_some() {
            return normalize(small);
        }
    }
    if let Some(g) = super::mgcd::modular_gcd(a, b) {
        return g;
    }
    prs_gcd(a, b, main_variable(a, b))
}

fn gcd_with_coeffs(other: &Poly, p: &Poly, v: usize) -> Poly {
    let mut cs = p.coeffs_in(v);
    cs.retain(|c| !c.is_zero());
    cs.sort_by_key(|c| c.nterms());
    let mut g = normalize(other);
    for c in &cs {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Variable occurring in the most terms of the two inputs.
fn main_variable(a: &Poly, b: &Poly) -> usize {
    let n = a.vars().len();
    let mut count = vec![0usize; n];
    for t in a.terms().iter().chain(b.terms()) {
        for (i, e) in t.exps.iter().enumerate() {
            if *e > 0 {
                count[i] += 1;
            }
        }
    }
    (0..n).max_by_key(|i| (count[*i], std::cmp::Reverse(*i))).unwrap()
}

/// Upper bounds on the degree of the gcd in each variable of `vars`, from
/// univariate images modulo a prime. `None` if no good evaluation point was
/// found for some variable.
fn modp_bounds(a: &Poly, b: &Poly, vars: &[usize]) -> Option<Vec<(usize, u32)>> {
    let n = a.vars().len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_9cd0 ^ (a.nterms() as u64) << 20 ^ b.nterms() as u64);
    let da = a.degrees();
    let db = b.degrees();
    let mut out = Vec::with_capacity(vars.len());
    for &v in vars {
        let mut found = None;
        for _ in 0..4 {
            let pt: Vec<u64> = (0..n).map(|_| rng.gen_range(1..modp::P)).collect();
            let (Some(ia), Some(ib)) = (modp::eval_except(a, v, &pt), modp::eval_except(b, v, &pt))
            else {
                continue;
            };
            if ia[da[v] as usize] == 0 || ib[db[v] as usize] == 0 {
                continue;
            }
            let g = modp::upoly_gcd(&ia, &ib);
            found = Some(g.len() as u32 - 1);
            break;
        }
        out.push((v, found?));
    }
    Some(out)
}

/// Primitive PRS in `var`.
fn prs_gcd(a: &Poly, b: &Poly, var: usize) -> Poly {
    let ca = content_in(a, var);
    let cb = content_in(b, var);
    let c = gcd(&ca, &cb);
    let mut x = a.div_exact(&ca).expect("content divides");
    let mut y = b.div_exact(&cb).expect("content divides");
    if x.degree_in(var) < y.degree_in(var) {
        std::mem::swap(&mut x, &mut y);
    }
    let g = loop {
        if y.degree_in(var) == 0 {
            // y is a nonzero v-free primitive polynomial, hence constant.
            break Poly::one(a.vars());
        }
        let r = prem(&x, &y, var);
        if r.is_zero() {
            break y;
        }
        let cr = content_in(&r, var);
        let r = r.div_exact(&cr).expect("content divides");
        x = y;
        y = r;
    };
    normalize(&c.mul(&normalize(&g)))
}

/// Sparse pseudo-remainder of `a` by `b` in `var` (without the trailing
/// power of the leading coefficient, which is content in `var`).
pub fn prem(a: &Poly, b: &Poly, var: usize) -> Poly {
    let vars = a.vars();
    let mut r = a.coeffs_in(var);
    let bc = b.coeffs_in(var);
    let db = bc.len() - 1;
    let lcb = &bc[db];
    while r.len() > db {
        let lr = r.pop().unwrap();
        if lr.is_zero() {
            continue;
        }
        let s = r.len() - db;
        for c in r.iter_mut() {
            *c = c.mul(lcb);
        }
        for (i, bi) in bc.iter().enumerate().take(db) {
            r[s + i] = r[s + i].sub(&lr.mul(bi));
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    Poly::from_coeffs_in(vars, var, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_poly;

    #[test]
    fn textbook_cases() {
        let v = crate::symcore::VarSet::of(&["x", "y"]);
        let a = parse_poly("x^2-y^2", &v).unwrap();
        let b = parse_poly("x^2+2*x*y+y^2", &v).unwrap();
        assert_eq!(gcd(&a, &b), parse_poly("x+y", &v).unwrap());
        assert_eq!(gcd(&a, &Poly::zero(&v)), a);
        let c = parse_poly("-2*x+4*y", &v).unwrap();
        assert_eq!(gcd(&c, &Poly::zero(&v)), parse_poly("x-2*y", &v).unwrap());
    }

    #[test]
    fn toda_denominators_coprime() {
        let v = crate::symcore::VarSet::of(&["x", "y", "z", "u", "v", "w"]);
        let a = parse_poly("y*w+y*z+v*w", &v).unwrap();
        let b = parse_poly("z*u+z*x+w*u", &v).unwrap();
        assert!(gcd(&a, &b).is_one());
        assert!(certainly_coprime(&a, &b));
    }

    #[test]
    fn hidden_common_factor() {
        let v = crate::symcore::VarSet::of(&["r", "t", "f", "g"]);
        let c = parse_poly("t*f+g", &v).unwrap();
        let a = c.mul(&parse_poly("f^2*r-g^2*t+3", &v).unwrap());
        let b = c.mul(&parse_poly("r-t^3", &v).unwrap());
        assert_eq!(gcd(&a, &b), c);
        assert!(!certainly_coprime(&a, &b));
    }
}
