use std::fmt;

use super::gcd::gcd;
use super::poly::Poly;
use super::scalar::Scalar;
use super::varset::VarSet;
use crate::error::{Error, Result};

/// A denominator vanished during exact evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoleSignal;

impl fmt::Display for PoleSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("pole: denominator vanishes")
    }
}

/// Reduced quotient of polynomials.
///
/// The denominator is primitive with a positive leading coefficient and
/// coprime to the numerator, which carries all rational content. This makes
/// the representation canonical, so `==` is equality of functions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.vars() != den.vars() {
            return Err(Error::VarsetMismatch(format!(
                "{:?} vs {:?}",
                num.vars(),
                den.vars()
            )));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::zero(num.vars());
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides"),
                den.div_exact(&g).expect("gcd divides"),
            )
        };
        Self::normalize_unit(num, den)
    }

    fn normalize_unit(num: Poly, den: Poly) -> RatFunc {
        let c = den.content();
        if c.is_one() {
            return RatFunc { num, den };
        }
        let ci = c.recip();
        RatFunc {
            num: num.scale(&ci),
            den: den.scale(&ci),
        }
    }

    /// Builds from parts already known to be coprime.
    pub fn from_coprime(num: Poly, den: Poly) -> RatFunc {
        assert!(!den.is_zero());
        if num.is_zero() {
            return RatFunc::zero(num.vars());
        }
        Self::normalize_unit(num, den)
    }

    pub fn zero(vars: &VarSet) -> RatFunc {
        RatFunc {
            num: Poly::zero(vars),
            den: Poly::one(vars),
        }
    }

    pub fn one(vars: &VarSet) -> RatFunc {
        RatFunc::from_poly(Poly::one(vars))
    }

    pub fn constant(vars: &VarSet, c: Scalar) -> RatFunc {
        RatFunc::from_poly(Poly::constant(vars, c))
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let vars = p.vars().clone();
        RatFunc {
            num: p,
            den: Poly::one(&vars),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        self.add_signed(other, false)
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add_signed(other, true)
    }

    fn add_signed(&self, other: &RatFunc, negate: bool) -> RatFunc {
        let on = if negate { other.num.neg() } else { other.num.clone() };
        if self.is_zero() {
            return RatFunc {
                num: on,
                den: other.den.clone(),
            };
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::reduce(self.num.add(&on), self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            // With coprime denominators the sum is already reduced.
            let num = self.num.mul(&other.den).add(&on.mul(&self.den));
            if num.is_zero() {
                return RatFunc::zero(self.vars());
            }
            return Self::normalize_unit(num, self.den.mul(&other.den));
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d1).add(&on.mul(&b1));
        let den = self.den.mul(&d1);
        Self::reduce(num, den)
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero(self.vars());
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let q = |a: &Poly, g: &Poly| {
            if g.is_one() {
                a.clone()
            } else {
                a.div_exact(g).expect("gcd divides")
            }
        };
        let num = q(&self.num, &g1).mul(&q(&other.num, &g2));
        let den = q(&self.den, &g2).mul(&q(&other.den, &g1));
        Self::normalize_unit(num, den)
    }

    pub fn recip(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize_unit(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        // Powers of coprime polynomials stay coprime.
        Self::normalize_unit(self.num.pow(e), self.den.pow(e))
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.vars());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Exact value at a full assignment.
    pub fn eval(&self, point: &[Scalar]) -> std::result::Result<Scalar, PoleSignal> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(PoleSignal);
        }
        Ok(&self.num.eval(point) / &d)
    }

    /// Reducing an already reduced value: returns an equal value.
    pub fn renormalize(&self) -> RatFunc {
        Self::reduce(self.num.clone(), self.den.clone())
    }

    pub fn promote(&self, target: &VarSet) -> Result<RatFunc> {
        Ok(RatFunc {
            num: self.num.promote(target)?,
            den: self.den.promote(target)?,
        })
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::ops::Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::add(self, rhs)
    }
}

impl std::ops::Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::sub(self, rhs)
    }
}

impl std::ops::Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::mul(self, rhs)
    }
}

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::parse_ratfunc;

    #[test]
    fn reduced_form() {
        let v = VarSet::of(&["f", "g"]);
        let a = parse_ratfunc("(2*g*f - 2*g^2)/(-4*f^2+4*g*f)", &v).unwrap();
        assert_eq!(a, parse_ratfunc("-1/2*g/f", &v).unwrap());
        assert!(a.den().content().is_one());
    }

    #[test]
    fn opposite_values_cancel() {
        let v = VarSet::of(&["f", "g"]);
        let a = parse_ratfunc("-g/f", &v).unwrap();
        let b = parse_ratfunc("g/f", &v).unwrap();
        assert!(a.add(&b).is_zero());
        assert!(a.mul(&b.recip().unwrap()).add(&RatFunc::one(&v)).is_zero());
    }
}
