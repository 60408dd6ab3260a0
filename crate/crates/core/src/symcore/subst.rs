//! Substitution of rational functions for the variables of a polynomial.
//!
//! With `x_i = n_i / d_i` and `e_i` the degree of `p` in `x_i`, the value of
//! `p` is `N / prod d_i^e_i` where `N` is a polynomial assembled coefficient by
//! coefficient. Any common factor of `N` and the denominator divides some
//! `d_i`, so reduction only needs gcds against the individual `d_i`.

use std::collections::HashMap;

use super::gcd::gcd;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::varset::VarSet;
use crate::error::{Error, Result};
use crate::par;

/// Numerator and denominator of a substitution before reduction.
#[derive(Debug, Clone)]
pub struct Cleared {
    pub num: Poly,
    /// Denominator as `(d_i, e_i)` pairs; the product of `d_i^e_i`.
    pub den: Vec<(Poly, u32)>,
}

impl Cleared {
    pub fn den_product(&self) -> Poly {
        let vars = self.num.vars();
        let fs: Vec<Poly> = self.den.iter().map(|(d, e)| d.pow(*e)).collect();
        Poly::product(vars, &fs)
    }

    pub fn reduce(self) -> RatFunc {
        let Cleared { mut num, den } = self;
        let vars = num.vars().clone();
        if num.is_zero() {
            return RatFunc::zero(&vars);
        }
        let mut copies: Vec<Poly> = Vec::new();
        for (d, e) in den {
            if d.is_constant() {
                copies.push(d.pow(e));
                continue;
            }
            let mut k = 0;
            while k < e {
                let g = gcd(&num, &d);
                if g.is_one() {
                    break;
                }
                num = num.div_exact(&g).expect("gcd divides");
                copies.push(d.div_exact(&g).expect("gcd divides"));
                k += 1;
            }
            if k < e {
                copies.push(d.pow(e - k));
            }
        }
        let den = Poly::product(&vars, &copies);
        RatFunc::from_coprime(num, den)
    }
}

/// Substitutes `values[i]` for variable `i` of `p`. Entries may be `None` for
/// variables that do not occur in `p`.
pub fn substitute_cleared(p: &Poly, values: &[Option<RatFunc>], target: &VarSet) -> Result<Cleared> {
    assert_eq!(values.len(), p.vars().len());
    let degs = p.degrees();
    let mut order = Vec::new();
    for (i, &d) in degs.iter().enumerate() {
        if d == 0 {
            continue;
        }
        match &values[i] {
            None => return Err(Error::Unassigned(p.vars().name(i).to_string())),
            Some(v) if v.vars() != target => {
                return Err(Error::VarsetMismatch(format!(
                    "value for `{}` lives in {:?}, expected {:?}",
                    p.vars().name(i),
                    v.vars(),
                    target
                )))
            }
            Some(_) => order.push(i),
        }
    }
    // Highest degree outermost keeps the inner recursion shallow and wide.
    order.sort_by_key(|i| std::cmp::Reverse(degs[*i]));
    let ctx = Ctx {
        order: &order,
        tables: order
            .iter()
            .map(|&i| power_table(values[i].as_ref().unwrap(), degs[i]))
            .collect(),
        target,
    };
    let num = ctx.rec(p, 0);
    let den = order
        .iter()
        .filter(|&&i| !values[i].as_ref().unwrap().den().is_one())
        .map(|&i| (values[i].as_ref().unwrap().den().clone(), degs[i]))
        .collect();
    Ok(Cleared { num, den })
}

/// `table[j] = n^j * d^(e-j)` for `j = 0..=e`.
fn power_table(v: &RatFunc, e: u32) -> Vec<Poly> {
    let e = e as usize;
    let mut np = vec![Poly::one(v.vars())];
    let mut dp = vec![Poly::one(v.vars())];
    for k in 1..=e {
        np.push(np[k - 1].mul(v.num()));
        dp.push(if v.den().is_one() {
            dp[0].clone()
        } else {
            dp[k - 1].mul(v.den())
        });
    }
    (0..=e).map(|j| np[j].mul(&dp[e - j])).collect()
}

struct Ctx<'a> {
    order: &'a [usize],
    tables: Vec<Vec<Poly>>,
    target: &'a VarSet,
}

impl Ctx<'_> {
    fn rec(&self, p: &Poly, level: usize) -> Poly {
        if p.is_zero() {
            return Poly::zero(self.target);
        }
        if level == self.order.len() {
            return Poly::constant(self.target, p.constant_term());
        }
        let v = self.order[level];
        let table = &self.tables[level];
        let cs = p.coeffs_in(v);
        let parts = par::map_range(cs.len(), |j| {
            if cs[j].is_zero() {
                return Poly::zero(self.target);
            }
            self.rec(&cs[j], level + 1).mul(&table[j])
        });
        let mut acc = Poly::zero(self.target);
        for x in parts {
            acc = acc.add(&x);
        }
        acc
    }
}

/// Exact reduced value of `p` under the assignment.
pub fn substitute(p: &Poly, values: &[Option<RatFunc>], target: &VarSet) -> Result<RatFunc> {
    Ok(substitute_cleared(p, values, target)?.reduce())
}

/// Substitution by variable name.
pub fn substitute_named(p: &Poly, assignment: &HashMap<String, RatFunc>, target: &VarSet) -> Result<RatFunc> {
    let values: Vec<Option<RatFunc>> = p
        .vars()
        .names()
        .iter()
        .map(|n| assignment.get(n).cloned())
        .collect();
    substitute(p, &values, target)
}

/// Composition `r(values)`; fails if the denominator becomes identically zero.
pub fn compose(r: &RatFunc, values: &[Option<RatFunc>], target: &VarSet) -> Result<RatFunc> {
    let n = substitute(r.num(), values, target)?;
    let d = substitute(r.den(), values, target)?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    n.div(&d)
}
