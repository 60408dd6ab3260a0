//! Arithmetic modulo the Mersenne prime 2^61 - 1, used for evaluation-based
//! bounds and certificates.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::poly::Poly;
use super::scalar::Scalar;

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let lo = (t as u64) & P;
    let hi = (t >> 61) as u64;
    add(lo, hi)
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> u64 {
    debug_assert!(a != 0);
    pow(a, P - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let mut r = n % &m;
    if r < BigInt::from(0) {
        r += &m;
    }
    r.to_u64().unwrap()
}

/// Image of a rational, or `None` if its denominator vanishes mod p.
pub fn scalar(s: &Scalar) -> Option<u64> {
    let d = bigint_mod(s.denom());
    if d == 0 {
        return None;
    }
    Some(mul(bigint_mod(s.numer()), inv(d)))
}

fn powers(x: u64, d: u32) -> Vec<u64> {
    let mut v = Vec::with_capacity(d as usize + 1);
    v.push(1);
    for k in 1..=d as usize {
        v.push(mul(v[k - 1], x));
    }
    v
}

/// Value at a full point mod p.
pub fn eval(p: &Poly, point: &[u64]) -> Option<u64> {
    let degs = p.degrees();
    let pw: Vec<Vec<u64>> = degs
        .iter()
        .zip(point)
        .map(|(&d, &x)| powers(x, d))
        .collect();
    let mut acc = 0;
    for t in p.terms() {
        let mut m = scalar(&t.coeff)?;
        for (i, e) in t.exps.iter().enumerate() {
            if *e > 0 {
                m = mul(m, pw[i][*e as usize]);
            }
        }
        acc = add(acc, m);
    }
    Some(acc)
}

/// Univariate image in `var` with the other variables set from `point`
/// (`point[var]` is ignored). Coefficients are indexed by degree.
pub fn eval_except(p: &Poly, var: usize, point: &[u64]) -> Option<Vec<u64>> {
    let degs = p.degrees();
    let pw: Vec<Vec<u64>> = degs
        .iter()
        .zip(point)
        .enumerate()
        .map(|(i, (&d, &x))| if i == var { vec![1] } else { powers(x, d) })
        .collect();
    let mut out = vec![0u64; degs[var] as usize + 1];
    for t in p.terms() {
        let mut m = scalar(&t.coeff)?;
        for (i, e) in t.exps.iter().enumerate() {
            if *e > 0 && i != var {
                m = mul(m, pw[i][*e as usize]);
            }
        }
        let k = t.exps[var] as usize;
        out[k] = add(out[k], m);
    }
    Some(out)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd of two univariate polynomials mod p (coefficients by degree).
pub fn upoly_gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = upoly_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(&lc) = a.last() {
        let il = inv(lc);
        for c in a.iter_mut() {
            *c = mul(*c, il);
        }
    }
    a
}

pub fn upoly_rem(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let il = inv(b[db]);
    while r.len() > db {
        let lead = mul(*r.last().unwrap(), il);
        let shift = r.len() - 1 - db;
        for (i, &c) in b.iter().enumerate() {
            r[shift + i] = sub(r[shift + i], mul(lead, c));
        }
        trim(&mut r);
    }
    r
}

/// Evaluates a univariate polynomial (coefficients by degree) at `x`.
pub fn upoly_eval(a: &[u64], x: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| add(mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = 123456789u64;
        assert_eq!(mul(a, inv(a)), 1);
        assert_eq!(sub(3, 5), P - 2);
        assert_eq!(pow(2, 61), 1);
    }

    #[test]
    fn univariate_gcd() {
        // (x+1)(x+2) and (x+1)(x+3)
        let a = vec![2, 3, 1];
        let b = vec![3, 4, 1];
        assert_eq!(upoly_gcd(&a, &b), vec![1, 1]);
    }
}
