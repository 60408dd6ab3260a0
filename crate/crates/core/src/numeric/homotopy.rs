//! Points on a level set `H(x) = h` of polynomial invariants.
//!
//! A random complex start `x*` lies on its own level set `h* = H(x*)`.
//! Holding `d - p` coordinates fixed, the remaining ones are continued in
//! double precision along `H(x) = h* + s (h - h*)` from `s = 0` to `s = 1`,
//! then polished by Newton's method at full precision.

use num_complex::Complex64;
use rand::Rng;

use super::{solve_linear, CompiledPoly, Field, MpComplex};
use crate::symcore::Poly;

struct System<T: Field> {
    h: Vec<CompiledPoly<T>>,
    jac: Vec<Vec<CompiledPoly<T>>>,
}

impl<T: Field> System<T> {
    fn new(invariants: &[Poly], ctx: T::Ctx) -> System<T> {
        let n = invariants.first().map_or(0, |p| p.vars().len());
        System {
            h: invariants.iter().map(|p| CompiledPoly::new(p, ctx)).collect(),
            jac: invariants
                .iter()
                .map(|p| (0..n).map(|v| CompiledPoly::new(&p.derivative(v), ctx)).collect())
                .collect(),
        }
    }

    fn values(&self, x: &[T]) -> Vec<T> {
        self.h.iter().map(|p| p.eval(x)).collect()
    }

    fn jacobian(&self, x: &[T], cols: &[usize]) -> Vec<Vec<T>> {
        self.jac
            .iter()
            .map(|row| cols.iter().map(|c| row[*c].eval(x)).collect())
            .collect()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn det(mut a: Vec<Vec<Complex64>>) -> Complex64 {
    let n = a.len();
    let mut d = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let piv = (c..n)
            .max_by(|i, j| a[*i][c].norm().partial_cmp(&a[*j][c].norm()).unwrap())
            .unwrap();
        if a[piv][c].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != c {
            a.swap(piv, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                let v = a[c][k];
                a[r][k] -= f * v;
            }
        }
    }
    d
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Continues the free coordinates from `x` at `s = 0` to `s = 1`.
fn track(
    sys: &System<Complex64>,
    cols: &[usize],
    mut x: Vec<Complex64>,
    start: &[Complex64],
    target: &[Complex64],
) -> Option<Vec<Complex64>> {
    let dh: Vec<Complex64> = start.iter().zip(target).map(|(a, b)| b - a).collect();
    let goal = |s: f64| -> Vec<Complex64> { start.iter().zip(&dh).map(|(a, d)| a + d * s).collect() };
    let mut s = 0.0f64;
    let mut ds = 0.02f64;
    let mut steps = 0;
    while s < 1.0 {
        steps += 1;
        if steps > 20_000 || ds < 1e-12 {
            return None;
        }
        let step = ds.min(1.0 - s);
        let s1 = s + step;
        // Euler predictor: J dx/ds = dh.
        let v = solve_linear(sys.jacobian(&x, cols), dh.clone())?;
        let mut y = x.clone();
        for (c, vi) in cols.iter().zip(&v) {
            y[*c] += vi * step;
        }
        let g = goal(s1);
        let mut ok = false;
        for _ in 0..5 {
            let r: Vec<Complex64> = sys.values(&y).iter().zip(&g).map(|(a, b)| a - b).collect();
            let Some(dx) = solve_linear(sys.jacobian(&y, cols), r) else { break };
            for (c, d) in cols.iter().zip(&dx) {
                y[*c] -= d;
            }
            if norm(&dx) <= 1e-10 * (1.0 + norm(&y)) {
                ok = true;
                break;
            }
        }
        let moved = cols.iter().map(|c| (y[*c] - x[*c]).norm()).fold(0.0, f64::max);
        if ok && moved <= 0.25 * (1.0 + norm(&x)) {
            x = y;
            s = s1;
            ds = (ds * 1.6).min(0.1);
            if norm(&x) > 1e8 {
                return None;
            }
        } else {
            ds *= 0.5;
        }
    }
    Some(x)
}

/// A point `x` with `H(x) = target` to full working precision, or `None`
/// when the continuation fails (degenerate fiber, path to infinity).
pub fn level_set_point<R: Rng>(
    invariants: &[Poly],
    target: &[MpComplex],
    prec: usize,
    rng: &mut R,
) -> Option<Vec<MpComplex>> {
    let d = invariants.first()?.vars().len();
    let p = invariants.len();
    if p == 0 || p > d || target.len() != p {
        return None;
    }
    let fsys: System<Complex64> = System::new(invariants, ());
    let x0: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let h0 = fsys.values(&x0);
    let cols = subsets(d, p)
        .into_iter()
        .map(|c| {
            let dv = det(fsys.jacobian(&x0, &c)).norm();
            (c, dv)
        })
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())?
        .0;
    let goal: Vec<Complex64> = target.iter().map(MpComplex::to_c64).collect();
    let xf = track(&fsys, &cols, x0, &h0, &goal)?;

    let msys: System<MpComplex> = System::new(invariants, prec);
    let mut x: Vec<MpComplex> = xf.iter().map(|z| MpComplex::from_c64(*z, prec)).collect();
    let tol = 2f64.powi(-(prec as i32) + 24);
    for _ in 0..80 {
        let r: Vec<MpComplex> = msys.values(&x).iter().zip(target).map(|(a, b)| a - b).collect();
        let dx = solve_linear(msys.jacobian(&x, &cols), r)?;
        for (c, di) in cols.iter().zip(&dx) {
            x[*c] = &x[*c] - di;
        }
        let size = x.iter().map(|z| z.abs_f64()).fold(1.0, f64::max);
        let step = dx.iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
        if step <= tol * size {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapkit::builtin_toda3;
    use crate::numeric::bits_for_digits;
    use crate::symcore::Scalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lands_on_the_requested_level_set() {
        let m = builtin_toda3();
        let inv: Vec<Poly> = m.invariants().iter().map(|(_, h)| h.clone()).collect();
        let prec = bits_for_digits(50);
        let target: Vec<MpComplex> = [3, -2, 5, 7]
            .iter()
            .map(|k| MpComplex::from_scalar(&Scalar::from_int(*k), prec))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = level_set_point(&inv, &target, prec, &mut rng).expect("continuation succeeds");
        for (h, t) in inv.iter().zip(&target) {
            let v = CompiledPoly::<MpComplex>::new(h, prec).eval(&x);
            assert!((&v - t).abs_f64() < 1e-45);
        }
    }
}
