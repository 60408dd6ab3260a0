//! Rational functions kept as products over a shared coprime factor base.
//!
//! Iterating a rational map produces numerators and denominators that are
//! products of a few recurring polynomials; expanding them is wasteful and
//! factoring them after the fact is expensive. Here every value is
//! `unit * prod b_i^e_i` over base polynomials `b_i` that are pairwise coprime.
//! A sum extracts the common factor (minimum exponents), expands only the
//! leftovers and factors the result back over the base by trial division.
//! Whatever is not explained by the base is inserted with gcd-closure: if a
//! new polynomial shares a factor with an entry, the entry is retired and
//! rewritten as a product of its coprime pieces.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gcd::{certainly_coprime, gcd};
use super::modp;
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::scalar::Scalar;
use super::varset::VarSet;
use crate::error::{Error, Result};
use crate::par;

/// A value over a [`FactorBase`]; zero has a zero unit and no factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factored {
    pub unit: Scalar,
    /// `(base index, exponent)` sorted by index, exponents nonzero.
    pub exps: Vec<(usize, i32)>,
}

impl Factored {
    pub fn zero() -> Factored {
        Factored {
            unit: Scalar::zero(),
            exps: Vec::new(),
        }
    }

    pub fn constant(c: Scalar) -> Factored {
        Factored {
            unit: c,
            exps: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn exponent(&self, id: usize) -> i32 {
        self.exps
            .binary_search_by_key(&id, |(i, _)| *i)
            .map(|k| self.exps[k].1)
            .unwrap_or(0)
    }

    fn from_map(unit: Scalar, m: HashMap<usize, i32>) -> Factored {
        if unit.is_zero() {
            return Factored::zero();
        }
        let mut exps: Vec<(usize, i32)> = m.into_iter().filter(|(_, e)| *e != 0).collect();
        exps.sort_unstable();
        Factored { unit, exps }
    }

    pub fn mul(&self, other: &Factored) -> Factored {
        if self.is_zero() || other.is_zero() {
            return Factored::zero();
        }
        let mut m: HashMap<usize, i32> = self.exps.iter().copied().collect();
        for (i, e) in &other.exps {
            *m.entry(*i).or_insert(0) += e;
        }
        Factored::from_map(&self.unit * &other.unit, m)
    }

    pub fn recip(&self) -> Result<Factored> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Factored {
            unit: self.unit.recip(),
            exps: self.exps.iter().map(|(i, e)| (*i, -e)).collect(),
        })
    }

    pub fn div(&self, other: &Factored) -> Result<Factored> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, k: u32) -> Factored {
        if k == 0 {
            return Factored::constant(Scalar::one());
        }
        Factored {
            unit: self.unit.pow(k),
            exps: self.exps.iter().map(|(i, e)| (*i, e * k as i32)).collect(),
        }
    }

    pub fn neg(&self) -> Factored {
        Factored {
            unit: -&self.unit,
            exps: self.exps.clone(),
        }
    }

    /// Factors with positive (numerator) exponent.
    pub fn numerator_factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|(i, e)| (*i, *e as u32))
    }

    /// Factors with negative (denominator) exponent, as positive powers.
    pub fn denominator_factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.exps
            .iter()
            .filter(|(_, e)| *e < 0)
            .map(|(i, e)| (*i, (-e) as u32))
    }
}

#[derive(Clone, Debug)]
enum Status {
    Active,
    /// Replaced by a product of other entries.
    Retired(Vec<(usize, i32)>),
}

#[derive(Clone, Debug)]
struct Entry {
    poly: Poly,
    degrees: Vec<u32>,
    status: Status,
}

/// Growing set of pairwise coprime, primitive polynomials.
#[derive(Clone, Debug)]
pub struct FactorBase {
    vars: VarSet,
    entries: Vec<Entry>,
    rng: ChaCha8Rng,
    term_ceiling: usize,
}

impl FactorBase {
    pub fn new(vars: &VarSet) -> FactorBase {
        FactorBase {
            vars: vars.clone(),
            entries: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(0xfac7_0b5e),
            term_ceiling: usize::MAX,
        }
    }

    /// Expansions larger than `limit` terms fail with a resource cutoff.
    pub fn with_term_ceiling(mut self, limit: usize) -> FactorBase {
        self.term_ceiling = limit;
        self
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn poly(&self, id: usize) -> &Poly {
        &self.entries[id].poly
    }

    pub fn is_active(&self, id: usize) -> bool {
        matches!(self.entries[id].status, Status::Active)
    }

    pub fn active_ids(&self) -> Vec<usize> {
        (0..self.entries.len()).filter(|i| self.is_active(*i)).collect()
    }

    fn check(&self, p: &Poly, context: &str) -> Result<()> {
        if p.nterms() > self.term_ceiling {
            return Err(Error::ResourceCutoff {
                terms: p.nterms(),
                limit: self.term_ceiling,
                context: context.to_string(),
            });
        }
        Ok(())
    }

    /// Rewrites retired indices in terms of active ones.
    pub fn canon(&self, v: &Factored) -> Factored {
        if v.exps.iter().all(|(i, _)| self.is_active(*i)) {
            return v.clone();
        }
        let mut m: HashMap<usize, i32> = HashMap::new();
        let mut stack: Vec<(usize, i32)> = v.exps.clone();
        while let Some((i, e)) = stack.pop() {
            match &self.entries[i].status {
                Status::Active => *m.entry(i).or_insert(0) += e,
                Status::Retired(parts) => {
                    stack.extend(parts.iter().map(|(j, f)| (*j, f * e)));
                }
            }
        }
        Factored::from_map(v.unit.clone(), m)
    }

    fn push_entry(&mut self, p: Poly) -> usize {
        let degrees = p.degrees();
        self.entries.push(Entry {
            poly: p,
            degrees,
            status: Status::Active,
        });
        self.entries.len() - 1
    }

    /// Inserts a nonconstant polynomial and returns its factorization over the
    /// (possibly refined) base.
    fn insert(&mut self, p: Poly) -> Vec<(usize, i32)> {
        let mut out: Vec<(usize, i32)> = Vec::new();
        let mut work: Vec<(Poly, i32)> = vec![(p.primitive_part(), 1)];
        while let Some((mut q, m)) = work.pop() {
            let mut i = 0;
            while i < self.entries.len() && !q.is_constant() {
                if !self.is_active(i) {
                    i += 1;
                    continue;
                }
                let b = self.entries[i].poly.clone();
                if certainly_coprime(&q, &b) {
                    i += 1;
                    continue;
                }
                let g = gcd(&q, &b);
                if g.is_constant() {
                    i += 1;
                    continue;
                }
                if g == b {
                    q = q.div_exact(&b).expect("gcd divides");
                    out.push((i, m));
                    // b may divide q again
                    continue;
                }
                // Split b into g and b/g; both go through insertion so they
                // end up coprime to everything else.
                let rest = b.div_exact(&g).expect("gcd divides");
                self.entries[i].status = Status::Retired(Vec::new());
                let gparts = self.insert(g.clone());
                let mut parts = gparts.clone();
                parts.extend(self.insert(rest));
                self.entries[i].status = Status::Retired(merge(parts));
                q = q.div_exact(&g).expect("gcd divides");
                out.extend(gparts.iter().map(|(j, e)| (*j, e * m)));
                i = 0;
            }
            if !q.is_constant() {
                let id = self.push_entry(q.primitive_part());
                out.push((id, m));
            }
        }
        merge(out)
    }

    /// Divides out active entries to maximal multiplicity. Returns the
    /// factors found and the cofactor.
    fn trial_divide(&mut self, p: &Poly) -> (Vec<(usize, i32)>, Poly) {
        let mut q = p.clone();
        let mut found = Vec::new();
        for i in 0..self.entries.len() {
            if !self.is_active(i) || q.is_constant() {
                continue;
            }
            loop {
                let e = &self.entries[i];
                let qd = q.degrees();
                if e.degrees.iter().zip(&qd).any(|(a, b)| a > b)
                    || e.poly.total_degree() > q.total_degree()
                {
                    break;
                }
                if !self.modp_may_divide(&q, i) {
                    break;
                }
                match q.div_exact(&self.entries[i].poly) {
                    Some(r) => {
                        found.push((i, 1));
                        q = r;
                    }
                    None => break,
                }
            }
        }
        (merge(found), q)
    }

    /// Univariate image test: `false` proves the entry does not divide `q`.
    fn modp_may_divide(&mut self, q: &Poly, id: usize) -> bool {
        let b = &self.entries[id].poly;
        let v = match b.support().into_iter().max_by_key(|v| b.degree_in(*v)) {
            Some(v) => v,
            None => return true,
        };
        let n = self.vars.len();
        for _ in 0..3 {
            let pt: Vec<u64> = (0..n).map(|_| self.rng.gen_range(1..modp::P)).collect();
            let (Some(bi), Some(qi)) = (modp::eval_except(b, v, &pt), modp::eval_except(q, v, &pt))
            else {
                continue;
            };
            if bi.last() == Some(&0) {
                continue;
            }
            return modp::upoly_rem(&qi, &bi).is_empty();
        }
        true
    }

    /// Factors a polynomial over the base, extending the base as needed.
    pub fn factor(&mut self, p: &Poly) -> Factored {
        if p.is_zero() {
            return Factored::zero();
        }
        let (c, pp) = p.content_and_primitive();
        let mut unit = c;
        let mut m: HashMap<usize, i32> = HashMap::new();
        let (found, rest) = self.trial_divide(&pp);
        for (i, e) in found {
            *m.entry(i).or_insert(0) += e;
        }
        if !rest.is_constant() {
            // Separate monomial content so single variables get their own entries.
            let (mono, core) = split_monomial(&rest);
            for (var, e) in mono {
                let xv = Poly::var(&self.vars, var);
                for (i, f) in self.insert(xv) {
                    *m.entry(i).or_insert(0) += f * e as i32;
                }
            }
            if !core.is_constant() {
                for (i, f) in self.insert(core) {
                    *m.entry(i).or_insert(0) += f;
                }
            }
        } else {
            unit = &unit * &rest.constant_value().unwrap();
        }
        // Unit is fixed by the product of the primitive entries.
        let v = self.canon(&Factored::from_map(unit, m));
        self.fix_unit(p, v)
    }

    /// Recomputes the unit so that the expansion equals `p` exactly.
    fn fix_unit(&self, p: &Poly, v: Factored) -> Factored {
        let (num, den) = self.expand_parts(&v);
        debug_assert!(den.is_one());
        let lc_p = p.leading_coeff();
        let lc_n = num.leading_coeff();
        Factored {
            unit: &lc_p / &lc_n,
            exps: v.exps,
        }
    }

    pub fn factor_ratfunc(&mut self, r: &RatFunc) -> Factored {
        let n = self.factor(r.num());
        let d = self.factor(r.den());
        let n = self.canon(&n);
        let d = self.canon(&d);
        n.div(&d).expect("denominator nonzero")
    }

    pub fn var(&mut self, i: usize) -> Factored {
        let p = Poly::var(&self.vars.clone(), i);
        self.factor(&p)
    }

    fn product_of(&self, fs: impl Iterator<Item = (usize, u32)>) -> Poly {
        let list: Vec<Poly> = fs.map(|(i, e)| self.entries[i].poly.pow(e)).collect();
        Poly::product(&self.vars, &list)
    }

    /// Expanded numerator and denominator, without the unit.
    fn expand_parts(&self, v: &Factored) -> (Poly, Poly) {
        let v = self.canon(v);
        let n = self.product_of(v.numerator_factors());
        let d = self.product_of(v.denominator_factors());
        (n, d)
    }

    /// The value as a reduced rational function.
    pub fn expand(&self, v: &Factored) -> Result<RatFunc> {
        if v.is_zero() {
            return Ok(RatFunc::zero(&self.vars));
        }
        let (n, d) = self.expand_parts(v);
        self.check(&n, "expanding numerator")?;
        self.check(&d, "expanding denominator")?;
        Ok(RatFunc::from_coprime(n.scale(&v.unit), d))
    }

    /// Evaluates `p` at factored values of its variables.
    pub fn eval_poly(&mut self, p: &Poly, vals: &[Factored]) -> Result<Factored> {
        assert_eq!(vals.len(), p.vars().len());
        let vals: Vec<Factored> = vals.iter().map(|v| self.canon(v)).collect();
        let terms: Vec<Factored> = p
            .terms()
            .iter()
            .map(|t| {
                let mut acc = Factored::constant(t.coeff.clone());
                for (i, e) in t.exps.iter().enumerate() {
                    if *e > 0 {
                        acc = acc.mul(&vals[i].pow(*e));
                    }
                }
                acc
            })
            .filter(|f| !f.is_zero())
            .collect();
        self.sum(&terms)
    }

    /// Sum of factored values.
    pub fn sum(&mut self, terms: &[Factored]) -> Result<Factored> {
        let terms: Vec<Factored> = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| self.canon(t))
            .collect();
        match terms.len() {
            0 => return Ok(Factored::zero()),
            1 => return Ok(terms[0].clone()),
            _ => {}
        }
        // Common factor: minimum exponent of each base index over all terms.
        let mut ids: Vec<usize> = terms.iter().flat_map(|t| t.exps.iter().map(|(i, _)| *i)).collect();
        ids.sort_unstable();
        ids.dedup();
        let common: Vec<(usize, i32)> = ids
            .iter()
            .map(|&i| (i, terms.iter().map(|t| t.exponent(i)).min().unwrap()))
            .filter(|(_, e)| *e != 0)
            .collect();
        let common = Factored {
            unit: Scalar::one(),
            exps: common,
        };
        let inv = common.recip()?;
        let leftovers: Vec<Factored> = terms.iter().map(|t| t.mul(&inv)).collect();
        let expanded = par::map(&leftovers, |t| {
            debug_assert!(t.exps.iter().all(|(_, e)| *e >= 0));
            self.product_of(t.numerator_factors()).scale(&t.unit)
        });
        let mut s = Poly::zero(&self.vars);
        for x in &expanded {
            self.check(x, "expanding a summand")?;
            s = s.add(x);
        }
        self.check(&s, "summing")?;
        if s.is_zero() {
            return Ok(Factored::zero());
        }
        let fs = self.factor(&s);
        let common = self.canon(&common);
        Ok(self.canon(&common.mul(&fs)))
    }

    pub fn add(&mut self, a: &Factored, b: &Factored) -> Result<Factored> {
        self.sum(&[a.clone(), b.clone()])
    }

    pub fn sub(&mut self, a: &Factored, b: &Factored) -> Result<Factored> {
        self.sum(&[a.clone(), b.neg()])
    }
}

fn merge(v: Vec<(usize, i32)>) -> Vec<(usize, i32)> {
    let mut m: HashMap<usize, i32> = HashMap::new();
    for (i, e) in v {
        *m.entry(i).or_insert(0) += e;
    }
    let mut out: Vec<(usize, i32)> = m.into_iter().filter(|(_, e)| *e != 0).collect();
    out.sort_unstable();
    out
}

fn split_monomial(p: &Poly) -> (Vec<(usize, u32)>, Poly) {
    let n = p.vars().len();
    let mut m = vec![u32::MAX; n];
    for t in p.terms() {
        for (x, e) in m.iter_mut().zip(t.exps.iter()) {
            *x = (*x).min(*e);
        }
    }
    if m.iter().all(|x| *x == 0) {
        return (Vec::new(), p.clone());
    }
    let core = Poly::from_terms(
        p.vars(),
        p.terms()
            .iter()
            .map(|t| super::poly::Term {
                exps: t.exps.iter().zip(&m).map(|(a, b)| a - b).collect(),
                coeff: t.coeff.clone(),
            })
            .collect(),
    );
    let mono = m.iter().enumerate().filter(|(_, e)| **e > 0).map(|(i, e)| (i, *e)).collect();
    (mono, core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_poly;

    #[test]
    fn factor_and_expand() {
        let v = VarSet::of(&["x", "y"]);
        let mut fb = FactorBase::new(&v);
        let a = parse_poly("(x+y)^2*(x-y)*x", &v).unwrap();
        let fa = fb.factor(&a);
        assert_eq!(fb.expand(&fa).unwrap(), RatFunc::from_poly(a.clone()));
        let b = parse_poly("-3*(x+y)*y", &v).unwrap();
        let fbv = fb.factor(&b);
        let q = fa.div(&fbv).unwrap();
        let expect = RatFunc::new(a.clone(), b.clone()).unwrap();
        assert_eq!(fb.expand(&q).unwrap(), expect);
    }

    #[test]
    fn splitting_retires_entries() {
        let v = VarSet::of(&["x", "y"]);
        let mut fb = FactorBase::new(&v);
        let ab = parse_poly("(x+1)*(y+2)", &v).unwrap();
        let f1 = fb.factor(&ab);
        let a = parse_poly("(x+1)*(x-y)", &v).unwrap();
        let f2 = fb.factor(&a);
        let f1 = fb.canon(&f1);
        assert_eq!(fb.expand(&f1).unwrap(), RatFunc::from_poly(ab));
        assert_eq!(fb.expand(&f2).unwrap(), RatFunc::from_poly(a));
        let act = fb.active_ids();
        for (k, &i) in act.iter().enumerate() {
            for &j in &act[k + 1..] {
                assert!(gcd(fb.poly(i), fb.poly(j)).is_one());
            }
        }
    }

    #[test]
    fn sums_cancel_common_parts() {
        let v = VarSet::of(&["x", "y"]);
        let mut fb = FactorBase::new(&v);
        let a = fb.factor(&parse_poly("x*(x+y)", &v).unwrap());
        let b = fb.factor(&parse_poly("y*(x+y)", &v).unwrap());
        let s = fb.add(&a, &b).unwrap();
        assert_eq!(
            fb.expand(&s).unwrap(),
            RatFunc::from_poly(parse_poly("(x+y)^2", &v).unwrap())
        );
        let z = fb.sub(&a, &a).unwrap();
        assert!(z.is_zero());
    }
}
