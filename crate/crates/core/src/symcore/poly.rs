use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::kernel;
use super::mono::{grlex_cmp, total_degree, Exps};
use super::scalar::Scalar;
use super::varset::VarSet;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exps: Exps,
    pub coeff: Scalar,
}

impl Term {
    pub fn degree(&self) -> u32 {
        total_degree(&self.exps)
    }
}

/// Sparse multivariate polynomial over the rationals.
///
/// Terms are kept in descending graded-lex order with no zero coefficients;
/// two polynomials are equal iff their varsets and term lists are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: VarSet,
    terms: Vec<Term>,
}

impl Poly {
    pub fn zero(vars: &VarSet) -> Poly {
        Poly {
            vars: vars.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(vars: &VarSet, c: Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(vars);
        }
        Poly {
            vars: vars.clone(),
            terms: vec![Term {
                exps: SmallVec::from_elem(0, vars.len()),
                coeff: c,
            }],
        }
    }

    pub fn one(vars: &VarSet) -> Poly {
        Poly::constant(vars, Scalar::one())
    }

    /// The polynomial consisting of variable `i` alone.
    pub fn var(vars: &VarSet, i: usize) -> Poly {
        let mut e: Exps = SmallVec::from_elem(0, vars.len());
        e[i] = 1;
        Poly {
            vars: vars.clone(),
            terms: vec![Term {
                exps: e,
                coeff: Scalar::one(),
            }],
        }
    }

    pub fn var_named(vars: &VarSet, name: &str) -> Result<Poly> {
        let i = vars
            .index_of(name)
            .ok_or_else(|| Error::Unassigned(name.to_string()))?;
        Ok(Poly::var(vars, i))
    }

    pub fn monomial(vars: &VarSet, exps: Exps, coeff: Scalar) -> Poly {
        assert_eq!(exps.len(), vars.len());
        Poly::from_terms(vars, vec![Term { exps, coeff }])
    }

    /// Builds a polynomial from unsorted terms, combining duplicates.
    pub fn from_terms(vars: &VarSet, mut terms: Vec<Term>) -> Poly {
        for t in &terms {
            assert_eq!(t.exps.len(), vars.len(), "exponent vector length");
        }
        terms.sort_by(|a, b| grlex_cmp(&b.exps, &a.exps));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.exps == t.exps => last.coeff += &t.coeff,
                _ => {
                    if let Some(last) = out.last() {
                        if last.coeff.is_zero() {
                            out.pop();
                        }
                    }
                    out.push(t)
                }
            }
        }
        if out.last().is_some_and(|t| t.coeff.is_zero()) {
            out.pop();
        }
        Poly {
            vars: vars.clone(),
            terms: out,
        }
    }

    /// Builds from terms already sorted in descending grlex with distinct,
    /// nonzero entries.
    pub(crate) fn from_sorted_terms(vars: &VarSet, terms: Vec<Term>) -> Poly {
        debug_assert!(terms
            .windows(2)
            .all(|w| grlex_cmp(&w[0].exps, &w[1].exps) == Ordering::Greater));
        debug_assert!(terms.iter().all(|t| !t.coeff.is_zero()));
        Poly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<Term> {
        self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].degree() == 0)
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].coeff.is_one()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_zero() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            Some(self.terms[0].coeff.clone())
        } else {
            None
        }
    }

    /// Coefficient of the constant term.
    pub fn constant_term(&self) -> Scalar {
        match self.terms.last() {
            Some(t) if t.degree() == 0 => t.coeff.clone(),
            _ => Scalar::zero(),
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|t| t.exps[var]).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.vars.len()];
        for t in &self.terms {
            for (i, e) in t.exps.iter().enumerate() {
                d[i] = d[i].max(*e);
            }
        }
        d
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, d)| **d > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Scalar {
        self.terms
            .first()
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Scalar::zero)
    }

    /// Single-term polynomial with coefficient 1?
    pub fn as_single_variable(&self) -> Option<usize> {
        if self.terms.len() != 1 || !self.terms[0].coeff.is_one() {
            return None;
        }
        let e = &self.terms[0].exps;
        if total_degree(e) != 1 {
            return None;
        }
        e.iter().position(|x| *x == 1)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn check_vars(&self, other: &Poly) {
        assert!(
            self.vars == other.vars,
            "varset mismatch: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn neg(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: -&t.coeff,
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t.exps.clone(),
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    fn merge(&self, other: &Poly, negate_other: bool) -> Poly {
        self.check_vars(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let tb = |t: &Term| {
            if negate_other {
                Term {
                    exps: t.exps.clone(),
                    coeff: -&t.coeff,
                }
            } else {
                t.clone()
            }
        };
        while i < a.len() && j < b.len() {
            match grlex_cmp(&a[i].exps, &b[j].exps) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(tb(&b[j]));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].coeff - &b[j].coeff
                    } else {
                        &a[i].coeff + &b[j].coeff
                    };
                    if !c.is_zero() {
                        out.push(Term {
                            exps: a[i].exps.clone(),
                            coeff: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(tb));
        Poly {
            vars: self.vars.clone(),
            terms: out,
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_vars(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.vars);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        kernel::mul(self, other)
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Product of a list of polynomials, multiplying smallest first.
    pub fn product(vars: &VarSet, factors: &[Poly]) -> Poly {
        let mut v: Vec<Poly> = factors.to_vec();
        if v.is_empty() {
            return Poly::one(vars);
        }
        while v.len() > 1 {
            v.sort_by_key(|p| std::cmp::Reverse(p.nterms()));
            let a = v.pop().unwrap();
            let b = v.pop().unwrap();
            v.push(a.mul(&b));
        }
        v.pop().unwrap()
    }

    /// Multiplies by the monomial `x^exps`.
    pub fn mul_monomial(&self, exps: &[u32]) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    exps: t
                        .exps
                        .iter()
                        .zip(exps)
                        .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                        .collect(),
                    coeff: t.coeff.clone(),
                })
                .collect(),
        }
    }

    /// Rational content with the sign of the leading coefficient, so that
    /// `self / content` has coprime integer coefficients and a positive
    /// leading coefficient. Zero for the zero polynomial.
    pub fn content(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::zero();
        }
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for t in &self.terms {
            num = num.gcd(t.coeff.numer());
            den = den.lcm(t.coeff.denom());
        }
        let c = Scalar::new(num, den);
        if self.terms[0].coeff.is_negative() {
            -c
        } else {
            c
        }
    }

    /// Primitive integer polynomial with positive leading coefficient.
    pub fn primitive_part(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        if c.is_one() {
            return self.clone();
        }
        self.scale(&c.recip())
    }

    /// Splits into `(content, primitive part)`.
    pub fn content_and_primitive(&self) -> (Scalar, Poly) {
        let c = self.content();
        if c.is_zero() {
            return (c, self.clone());
        }
        (c.clone(), self.scale(&c.recip()))
    }

    pub fn is_primitive(&self) -> bool {
        !self.is_zero() && self.content().is_one()
    }

    /// Integer coefficients (valid when the content is an integer).
    pub(crate) fn int_coeffs(&self) -> Option<Vec<BigInt>> {
        self.terms
            .iter()
            .map(|t| t.coeff.is_integer().then(|| t.coeff.numer().clone()))
            .collect()
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms
            .iter()
            .map(|t| t.coeff.numer().bits().max(t.coeff.denom().bits()))
            .max()
            .unwrap_or(0)
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps[var] > 0)
            .map(|t| {
                let mut e = t.exps.clone();
                let k = e[var];
                e[var] -= 1;
                Term {
                    exps: e,
                    coeff: &t.coeff * &Scalar::from(k as i64),
                }
            })
            .collect();
        Poly::from_terms(&self.vars, terms)
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of
    /// `var^k`, a polynomial free of `var` over the same varset.
    pub fn coeffs_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<Term>> = vec![Vec::new(); d + 1];
        for t in &self.terms {
            let k = t.exps[var] as usize;
            let mut e = t.exps.clone();
            e[var] = 0;
            buckets[k].push(Term {
                exps: e,
                coeff: t.coeff.clone(),
            });
        }
        // Removing one variable from a grlex-sorted list keeps each bucket
        // sorted only within equal degrees, so re-sort.
        buckets
            .into_iter()
            .map(|ts| Poly::from_terms(&self.vars, ts))
            .collect()
    }

    /// Inverse of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(vars: &VarSet, var: usize, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for t in &c.terms {
                debug_assert_eq!(t.exps[var], 0);
                let mut e = t.exps.clone();
                e[var] = k as u32;
                terms.push(Term {
                    exps: e,
                    coeff: t.coeff.clone(),
                });
            }
        }
        Poly::from_terms(vars, terms)
    }

    /// Leading coefficient with respect to `var`.
    pub fn lc_in(&self, var: usize) -> Poly {
        let d = self.degree_in(var);
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exps[var] == d)
            .map(|t| {
                let mut e = t.exps.clone();
                e[var] = 0;
                Term {
                    exps: e,
                    coeff: t.coeff.clone(),
                }
            })
            .collect();
        Poly::from_terms(&self.vars, terms)
    }

    /// Sets variable `var` to the constant `value`.
    pub fn eval_var(&self, var: usize, value: &Scalar) -> Poly {
        let d = self.degree_in(var);
        let mut pw = Vec::with_capacity(d as usize + 1);
        pw.push(Scalar::one());
        for k in 1..=d as usize {
            let next = &pw[k - 1] * value;
            pw.push(next);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e = t.exps.clone();
                let k = e[var] as usize;
                e[var] = 0;
                Term {
                    exps: e,
                    coeff: &t.coeff * &pw[k],
                }
            })
            .collect();
        Poly::from_terms(&self.vars, terms)
    }

    /// Exact value at a full assignment (`point[i]` is the value of variable `i`).
    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.vars.len());
        let degs = self.degrees();
        let powers: Vec<Vec<Scalar>> = degs
            .iter()
            .zip(point)
            .map(|(&d, v)| {
                let mut pw = vec![Scalar::one()];
                for k in 1..=d as usize {
                    let next = &pw[k - 1] * v;
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut acc = Scalar::zero();
        for t in &self.terms {
            let mut m = t.coeff.clone();
            for (i, e) in t.exps.iter().enumerate() {
                if *e > 0 {
                    m *= &powers[i][*e as usize];
                }
            }
            acc += &m;
        }
        acc
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// variable that occurs in `self`.
    pub fn promote(&self, target: &VarSet) -> Result<Poly> {
        if &self.vars == target {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        let degs = self.degrees();
        for (i, name) in self.vars.names().iter().enumerate() {
            match target.index_of(name) {
                Some(j) => map.push(Some(j)),
                None if degs[i] == 0 => map.push(None),
                None => {
                    return Err(Error::VarsetMismatch(format!(
                        "variable `{name}` not in {target:?}"
                    )))
                }
            }
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut e: Exps = SmallVec::from_elem(0, target.len());
                for (i, x) in t.exps.iter().enumerate() {
                    if let Some(j) = map[i] {
                        e[j] = *x;
                    }
                }
                Term {
                    exps: e,
                    coeff: t.coeff.clone(),
                }
            })
            .collect();
        Ok(Poly::from_terms(target, terms))
    }

    /// Equality up to a nonzero rational factor.
    pub fn associate_of(&self, other: &Poly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.primitive_part() == other.primitive_part()
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self`.
    ///
    /// # Panics
    /// If `divisor` is zero.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        self.check_vars(divisor);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        kernel::div_exact(self, divisor)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Deterministic total order comparing terms from the leading one down.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = grlex_cmp(&a.exps, &b.exps)
                .then_with(|| a.coeff.as_rational().cmp(b.coeff.as_rational()));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .iter()
            .map(|t| t.coeff.numer().abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::ops::Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl std::ops::Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl std::ops::Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        Poly::mul(self, rhs)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}
