//! Squarefree decomposition by Yun's algorithm, refined by splitting off
//! contents with respect to each variable.

use super::gcd::{content_in, gcd};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Pairwise coprime squarefree factors with multiplicities. The product of
/// `factor^mult` equals `p` up to a rational scalar. Factors are primitive
/// with positive leading coefficient and returned in a canonical order.
pub fn squarefree(p: &Poly) -> Result<Vec<(Poly, u32)>> {
    if p.is_zero() {
        return Err(Error::ZeroInput("squarefree decomposition".into()));
    }
    let mut out = Vec::new();
    decompose(&p.primitive_part(), 1, &mut out);
    let mut refined = Vec::with_capacity(out.len());
    for (f, m) in out {
        for g in split_contents(&f) {
            refined.push((g, m));
        }
    }
    refined.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.canonical_cmp(&b.0)));
    Ok(refined)
}

/// Product of the distinct factors, primitive; `1` for constants.
pub fn squarefree_part(p: &Poly) -> Result<Poly> {
    let fs = squarefree(p)?;
    let list: Vec<Poly> = fs.into_iter().map(|(f, _)| f).collect();
    Ok(Poly::product(p.vars(), &list).primitive_part())
}

fn decompose(p: &Poly, scale: u32, out: &mut Vec<(Poly, u32)>) {
    if p.is_constant() {
        return;
    }
    // Monomial content splits into single variables.
    let n = p.vars().len();
    let mut m = vec![u32::MAX; n];
    for t in p.terms() {
        for (x, e) in m.iter_mut().zip(t.exps.iter()) {
            *x = (*x).min(*e);
        }
    }
    if m.iter().any(|x| *x > 0) {
        for (i, &e) in m.iter().enumerate() {
            if e > 0 {
                out.push((Poly::var(p.vars(), i), e * scale));
            }
        }
        let rest = Poly::from_terms(
            p.vars(),
            p.terms()
                .iter()
                .map(|t| super::poly::Term {
                    exps: t.exps.iter().zip(&m).map(|(a, b)| a - b).collect(),
                    coeff: t.coeff.clone(),
                })
                .collect(),
        );
        decompose(&rest, scale, out);
        return;
    }
    let degs = p.degrees();
    let v = (0..n)
        .filter(|i| degs[*i] > 0)
        .min_by_key(|i| (degs[*i], *i))
        .unwrap();
    let c = content_in(p, v);
    let q = if c.is_one() {
        p.clone()
    } else {
        decompose(&c, scale, out);
        p.div_exact(&c).expect("content divides")
    };
    yun(&q, v, scale, out);
}

/// Yun's algorithm in `v` for `q` primitive in `v`.
fn yun(q: &Poly, v: usize, scale: u32, out: &mut Vec<(Poly, u32)>) {
    let dq = q.derivative(v);
    let a0 = gcd(q, &dq);
    let mut b = q.div_exact(&a0).expect("gcd divides");
    let mut c = dq.div_exact(&a0).expect("gcd divides");
    let mut d = c.sub(&b.derivative(v));
    let mut i = 1;
    while !b.is_constant() {
        let a = gcd(&b, &d);
        if !a.is_constant() {
            out.push((a.primitive_part(), i * scale));
        }
        b = b.div_exact(&a).expect("gcd divides");
        c = d.div_exact(&a).expect("gcd divides");
        d = c.sub(&b.derivative(v));
        i += 1;
    }
}

/// Splits a squarefree polynomial into coprime pieces along its contents in
/// each variable.
fn split_contents(f: &Poly) -> Vec<Poly> {
    if f.is_constant() {
        return Vec::new();
    }
    for v in f.support() {
        let c = content_in(f, v);
        if !c.is_constant() {
            let rest = f.div_exact(&c).expect("content divides");
            let mut out = split_contents(&c);
            out.extend(split_contents(&rest));
            return out;
        }
    }
    vec![f.primitive_part()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_poly, VarSet};

    #[test]
    fn square_times_linear() {
        let v = VarSet::of(&["x", "y"]);
        let p = parse_poly("(x+y)^2*(x-y)", &v).unwrap();
        let got = squarefree(&p).unwrap();
        assert_eq!(
            got,
            vec![
                (parse_poly("x-y", &v).unwrap(), 1),
                (parse_poly("x+y", &v).unwrap(), 2)
            ]
        );
    }

    #[test]
    fn monomial_split() {
        let v = VarSet::of(&["r", "t", "f", "g"]);
        let p = parse_poly("t*g^2", &v).unwrap();
        let got = squarefree(&p).unwrap();
        assert_eq!(
            got,
            vec![
                (parse_poly("t", &v).unwrap(), 1),
                (parse_poly("g", &v).unwrap(), 2)
            ]
        );
    }

    #[test]
    fn content_split() {
        let v = VarSet::of(&["r", "t", "f", "g"]);
        let p = parse_poly("(t*f+g)*(r+g)^3*(r-t^3)", &v).unwrap();
        let got = squarefree(&p).unwrap();
        assert_eq!(got.len(), 3);
        let rebuilt = Poly::product(
            &v,
            &got.iter().map(|(f, m)| f.pow(*m)).collect::<Vec<_>>(),
        );
        assert!(rebuilt.associate_of(&p));
    }
}
