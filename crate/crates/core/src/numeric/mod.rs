//! Multiprecision complex arithmetic and the numeric kernels behind the
//! periodicity verifier: compiled polynomial evaluation, simultaneous root
//! finding and dense linear solves.

mod homotopy;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::IBig;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symcore::{Poly, RatFunc, Scalar};

pub use homotopy::level_set_point;

/// Binary multiprecision float with round-half-even.
pub type Real = FBig<HalfEven, 2>;

/// Working precision in bits for `digits` significant decimal digits, with
/// guard bits on top.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32
}

fn real_from_int(n: &num_bigint::BigInt, prec: usize) -> Real {
    let i: IBig = n.to_string().parse().expect("decimal integer");
    Real::from(i).with_precision(prec).value()
}

pub fn real_from_scalar(s: &Scalar, prec: usize) -> Real {
    let n = real_from_int(s.numer(), prec);
    if s.is_integer() {
        return n;
    }
    n / real_from_int(s.denom(), prec)
}

pub fn real_from_f64(x: f64, prec: usize) -> Real {
    Real::try_from(x)
        .expect("finite float")
        .with_precision(prec)
        .value()
}

fn real_zero(prec: usize) -> Real {
    real_from_f64(0.0, prec)
}

/// Complex number as a pair of multiprecision floats.
#[derive(Clone, Debug, PartialEq)]
pub struct MpComplex {
    pub re: Real,
    pub im: Real,
}

impl MpComplex {
    pub fn zero(prec: usize) -> MpComplex {
        MpComplex {
            re: real_zero(prec),
            im: real_zero(prec),
        }
    }

    pub fn one(prec: usize) -> MpComplex {
        MpComplex {
            re: real_from_f64(1.0, prec),
            im: real_zero(prec),
        }
    }

    pub fn from_scalar(s: &Scalar, prec: usize) -> MpComplex {
        MpComplex {
            re: real_from_scalar(s, prec),
            im: real_zero(prec),
        }
    }

    pub fn from_c64(z: Complex64, prec: usize) -> MpComplex {
        MpComplex {
            re: real_from_f64(z.re, prec),
            im: real_from_f64(z.im, prec),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().value(), self.im.to_f64().value())
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.re == Real::ZERO && self.im == Real::ZERO
    }

    pub fn conj(&self) -> MpComplex {
        MpComplex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sq(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sq().sqrt()
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64().value()
    }

    pub fn scale(&self, k: &Real) -> MpComplex {
        MpComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    /// Decimal rendering `a+bi` with `digits` significant digits per part.
    pub fn to_decimal(&self, digits: usize) -> String {
        // Parts below the working accuracy relative to the modulus print as 0.
        let size = self.abs_f64();
        let noise = size * 2f64.powi(-(self.precision() as i32) + 8);
        let part = |x: &Real| -> String {
            let m = x.to_f64().value().abs();
            if *x == Real::ZERO || m <= noise {
                return "0".into();
            }
            let d = x.to_decimal().value().with_precision(digits).value();
            if (1e-6..1e21).contains(&m) {
                format!("{d}")
            } else {
                format!("{d:e}")
            }
        };
        let re = part(&self.re);
        let im = part(&self.im);
        if im.starts_with('-') {
            format!("{re}{im}i")
        } else {
            format!("{re}+{im}i")
        }
    }
}

impl fmt::Display for MpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(20))
    }
}

impl Add for &MpComplex {
    type Output = MpComplex;
    fn add(self, o: &MpComplex) -> MpComplex {
        MpComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &MpComplex {
    type Output = MpComplex;
    fn sub(self, o: &MpComplex) -> MpComplex {
        MpComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &MpComplex {
    type Output = MpComplex;
    fn mul(self, o: &MpComplex) -> MpComplex {
        MpComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for &MpComplex {
    type Output = MpComplex;
    fn div(self, o: &MpComplex) -> MpComplex {
        let n = o.norm_sq();
        MpComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &n,
            im: (&self.im * &o.re - &self.re * &o.im) / &n,
        }
    }
}

impl Neg for &MpComplex {
    type Output = MpComplex;
    fn neg(self) -> MpComplex {
        MpComplex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// Field operations shared by double and multiprecision complex numbers.
pub trait Field: Clone + Send + Sync + std::fmt::Debug {
    /// Precision context (unused for doubles).
    type Ctx: Copy + Send + Sync + std::fmt::Debug;
    fn zero_in(ctx: Self::Ctx) -> Self;
    fn one_in(ctx: Self::Ctx) -> Self;
    fn from_scalar_in(s: &Scalar, ctx: Self::Ctx) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn magnitude(&self) -> f64;
}

impl Field for Complex64 {
    type Ctx = ();
    fn zero_in(_: ()) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_in(_: ()) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_scalar_in(s: &Scalar, _: ()) -> Self {
        Complex64::new(s.to_f64(), 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Field for MpComplex {
    type Ctx = usize;
    fn zero_in(prec: usize) -> Self {
        MpComplex::zero(prec)
    }
    fn one_in(prec: usize) -> Self {
        MpComplex::one(prec)
    }
    fn from_scalar_in(s: &Scalar, prec: usize) -> Self {
        MpComplex::from_scalar(s, prec)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn magnitude(&self) -> f64 {
        self.abs_f64()
    }
}

/// A polynomial with coefficients converted once, for repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly<T: Field> {
    terms: Vec<(T, Vec<(usize, u32)>)>,
    degrees: Vec<u32>,
    ctx: T::Ctx,
}

impl<T: Field> CompiledPoly<T> {
    pub fn new(p: &Poly, ctx: T::Ctx) -> CompiledPoly<T> {
        let terms = p
            .terms()
            .iter()
            .map(|t| {
                let exps = t
                    .exps
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| (i, *e))
                    .collect();
                (T::from_scalar_in(&t.coeff, ctx), exps)
            })
            .collect();
        CompiledPoly {
            terms,
            degrees: p.degrees(),
            ctx,
        }
    }

    fn powers(&self, x: &[T]) -> Vec<Vec<T>> {
        self.degrees
            .iter()
            .zip(x)
            .map(|(d, xi)| {
                let mut pw = Vec::with_capacity(*d as usize + 1);
                pw.push(T::one_in(self.ctx));
                for k in 1..=*d as usize {
                    let next = pw[k - 1].mul(xi);
                    pw.push(next);
                }
                pw
            })
            .collect()
    }

    pub fn eval(&self, x: &[T]) -> T {
        let pw = self.powers(x);
        let mut acc = T::zero_in(self.ctx);
        for (c, exps) in &self.terms {
            let mut m = c.clone();
            for (i, e) in exps {
                m = m.mul(&pw[*i][*e as usize]);
            }
            acc = acc.add(&m);
        }
        acc
    }

    /// `sum |c| |x|^e`, the natural scale for judging a residual as small.
    pub fn eval_scale(&self, x: &[T]) -> f64 {
        let ax: Vec<f64> = x.iter().map(Field::magnitude).collect();
        self.terms
            .iter()
            .map(|(c, exps)| {
                exps.iter()
                    .fold(c.magnitude(), |m, (i, e)| m * ax[*i].powi(*e as i32))
            })
            .sum()
    }
}

/// A rational function compiled for evaluation.
#[derive(Clone, Debug)]
pub struct CompiledRat<T: Field> {
    pub num: CompiledPoly<T>,
    pub den: CompiledPoly<T>,
}

impl<T: Field> CompiledRat<T> {
    pub fn new(r: &RatFunc, ctx: T::Ctx) -> CompiledRat<T> {
        CompiledRat {
            num: CompiledPoly::new(r.num(), ctx),
            den: CompiledPoly::new(r.den(), ctx),
        }
    }

    /// `None` when the denominator is negligible relative to its scale.
    pub fn eval(&self, x: &[T], rel_floor: f64) -> Option<T> {
        let d = self.den.eval(x);
        let scale = self.den.eval_scale(x);
        if d.magnitude() <= rel_floor * scale.max(f64::MIN_POSITIVE) {
            return None;
        }
        Some(self.num.eval(x).div(&d))
    }
}

/// Gaussian elimination with partial pivoting. `None` on a zero pivot.
pub fn solve_linear<T: Field>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|i, j| {
            a[*i][col]
                .magnitude()
                .partial_cmp(&a[*j][col].magnitude())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        let pm = a[piv][col].magnitude();
        if pm == 0.0 || !pm.is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col].div(&a[col][col]);
            for k in col..n {
                let v = a[row][k].sub(&f.mul(&a[col][k]));
                a[row][k] = v;
            }
            let v = b[row].sub(&f.mul(&b[col]));
            b[row] = v;
        }
    }
    let mut x: Vec<T> = b.clone();
    for row in (0..n).rev() {
        let mut s = b[row].clone();
        for k in row + 1..n {
            s = s.sub(&a[row][k].mul(&x[k]));
        }
        x[row] = s.div(&a[row][row]);
    }
    Some(x)
}

fn horner(coeffs: &[MpComplex], z: &MpComplex) -> (MpComplex, MpComplex) {
    let n = coeffs.len() - 1;
    let mut p = coeffs[n].clone();
    let mut dp = MpComplex::zero(z.precision());
    for c in coeffs[..n].iter().rev() {
        dp = &(&dp * z) + &p;
        p = &(&p * z) + c;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[k] z^k` by the Aberth-Ehrlich iteration.
/// The leading coefficient must be nonzero.
pub fn roots(coeffs: &[MpComplex], prec: usize) -> Result<Vec<MpComplex>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    if coeffs[n].is_zero() {
        return Err(Error::Numeric("leading coefficient is zero".into()));
    }
    if n == 1 {
        return Ok(vec![&(-&coeffs[0]) / &coeffs[1]]);
    }
    // Starting circle from the Fujiwara bound, computed in log space so huge
    // coefficients cannot overflow a double.
    let lead = coeffs[n].abs().to_f64().value().ln();
    let mut log_r = f64::NEG_INFINITY;
    for (k, c) in coeffs[..n].iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let v = (c.abs().to_f64().value().ln() - lead) / (n - k) as f64;
        log_r = log_r.max(v);
    }
    let radius = if log_r.is_finite() { log_r.exp().clamp(1e-30, 1e30) } else { 1.0 };
    let mut z: Vec<MpComplex> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            MpComplex::from_c64(Complex64::from_polar(radius, th), prec)
        })
        .collect();
    let eps = 2f64.powi(-(prec as i32) + 12);
    let mut done = vec![false; n];
    for _ in 0..2000 {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(coeffs, &z[k]);
            if p.is_zero() {
                done[k] = true;
                continue;
            }
            let ratio = &p / &dp;
            let mut sum = MpComplex::zero(prec);
            for j in 0..n {
                if j != k {
                    sum = &sum + &(&MpComplex::one(prec) / &(&z[k] - &z[j]));
                }
            }
            let denom = &MpComplex::one(prec) - &(&ratio * &sum);
            let w = &ratio / &denom;
            let step = w.abs_f64();
            let size = z[k].abs_f64().max(1e-300);
            z[k] = &z[k] - &w;
            if step <= eps * size.max(1.0) || (step <= eps && size < 1.0) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            return Ok(z);
        }
    }
    Err(Error::Numeric(format!("root finder did not converge (degree {n})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_poly, VarSet};

    #[test]
    fn rational_conversion_is_accurate() {
        let prec = bits_for_digits(50);
        let x = MpComplex::from_scalar(&Scalar::new(1, 3), prec);
        let three = MpComplex::from_scalar(&Scalar::from_int(3), prec);
        let d = &(&x * &three) - &MpComplex::one(prec);
        assert!(d.abs_f64() < 1e-50);
    }

    #[test]
    fn roots_of_unity_and_multiples() {
        let prec = bits_for_digits(40);
        // z^5 - 1
        let mut c = vec![MpComplex::zero(prec); 6];
        c[0] = -&MpComplex::one(prec);
        c[5] = MpComplex::one(prec);
        let rs = roots(&c, prec).unwrap();
        assert_eq!(rs.len(), 5);
        for r in &rs {
            let (p, _) = horner(&c, r);
            assert!(p.abs_f64() < 1e-35);
            assert!((r.abs_f64() - 1.0).abs() < 1e-30);
        }
        // (z - 2)(z + 1/3): 3z^2 - 5z - 2
        let c: Vec<MpComplex> = [-2, -5, 3]
            .iter()
            .map(|k| MpComplex::from_scalar(&Scalar::from_int(*k), prec))
            .collect();
        let mut rs: Vec<f64> = roots(&c, prec).unwrap().iter().map(|r| r.to_c64().re).collect();
        rs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((rs[0] + 1.0 / 3.0).abs() < 1e-15 && (rs[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn linear_solve_and_compiled_eval() {
        let vars = VarSet::of(&["x", "y"]);
        let p = parse_poly("x^2*y - 3*y + 1/2", &vars).unwrap();
        let prec = bits_for_digits(30);
        let cp: CompiledPoly<MpComplex> = CompiledPoly::new(&p, prec);
        let pt = [
            MpComplex::from_scalar(&Scalar::from_int(2), prec),
            MpComplex::from_scalar(&Scalar::from_int(5), prec),
        ];
        let v = cp.eval(&pt);
        assert!((v.to_c64().re - 5.5).abs() < 1e-12);
        let a = vec![
            vec![Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0)],
            vec![Complex64::new(1.0, 1.0), Complex64::new(1.0, 0.0)],
        ];
        let b = vec![Complex64::new(4.0, 0.0), Complex64::new(3.0, 1.0)];
        let x = solve_linear(a, b).unwrap();
        assert!((x[1] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((x[0] * Complex64::new(1.0, 1.0) + x[1] - Complex64::new(3.0, 1.0)).norm() < 1e-14);
    }
}
