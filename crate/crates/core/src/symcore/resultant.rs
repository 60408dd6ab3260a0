//! Resultants as Sylvester determinants, evaluated by fraction-free
//! (Bareiss) elimination.

use super::poly::Poly;
use crate::error::{Error, Result};

/// Sylvester matrix of `a` and `b` with respect to `var`.
pub fn sylvester(a: &Poly, b: &Poly, var: usize) -> Vec<Vec<Poly>> {
    let vars = a.vars();
    let ca = a.coeffs_in(var);
    let cb = b.coeffs_in(var);
    let m = ca.len() - 1;
    let n = cb.len() - 1;
    let size = m + n;
    let zero = Poly::zero(vars);
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in ca.iter().enumerate() {
            row[i + m - k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in cb.iter().enumerate() {
            row[i + n - k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant of a square polynomial matrix.
pub fn det_bareiss(mut m: Vec<Vec<Poly>>) -> Poly {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n));
    let vars = m[0][0].vars().clone();
    let mut negate = false;
    let mut prev = Poly::one(&vars);
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Poly::zero(&vars);
            };
            m.swap(k, p);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = Poly::zero(&vars);
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

/// `Res_var(a, b)`. Both inputs must be nonzero.
pub fn resultant(a: &Poly, b: &Poly, var: usize) -> Result<Poly> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput("resultant".into()));
    }
    let m = a.degree_in(var);
    let n = b.degree_in(var);
    if m == 0 && n == 0 {
        return Ok(Poly::one(a.vars()));
    }
    if m == 0 {
        return Ok(a.pow(n));
    }
    if n == 0 {
        return Ok(b.pow(m));
    }
    Ok(det_bareiss(sylvester(a, b, var)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::{parse_poly, VarSet};

    #[test]
    fn common_root_detected() {
        let v = VarSet::of(&["x", "y"]);
        // x^2 - y and x - 2 share a root iff y = 4
        let a = parse_poly("x^2-y", &v).unwrap();
        let b = parse_poly("x-2", &v).unwrap();
        let r = resultant(&a, &b, 0).unwrap();
        assert!(r.associate_of(&parse_poly("y-4", &v).unwrap()));
    }

    #[test]
    fn quadratic_pair() {
        let v = VarSet::of(&["x", "a"]);
        // Res_x(x^2 + a, x^2 - 1) = (a + 1)^2
        let r = resultant(
            &parse_poly("x^2+a", &v).unwrap(),
            &parse_poly("x^2-1", &v).unwrap(),
            0,
        )
        .unwrap();
        assert_eq!(r, parse_poly("(a+1)^2", &v).unwrap());
    }
}
