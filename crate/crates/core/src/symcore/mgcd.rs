//! Modular multivariate gcd: dense evaluation and interpolation modulo word
//! primes (after Brown), lifted to the integers by Chinese remaindering and
//! certified by trial division.
//!
//! Images are sparse lists of `(key, coeff)` where the key packs the exponent
//! vector in 16-bit fields with the first variable most significant, so key
//! order is lexicographic order.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mono::Exps;
use super::poly::{Poly, Term};
use super::scalar::Scalar;

const MAX_VARS: usize = 8;
const MAX_DEG: u32 = (1 << 15) - 1;
const GUARD: u128 = {
    let mut g = 0u128;
    let mut i = 0;
    while i < MAX_VARS {
        g |= 1u128 << (16 * i + 15);
        i += 1;
    }
    g
};
const PRIME_COUNT: usize = 48;

type Mp = Vec<(u128, u64)>;
type Upoly = Vec<u64>;

#[inline]
fn shift(i: usize) -> u32 {
    16 * (MAX_VARS - 1 - i) as u32
}

#[inline]
fn exp_of(key: u128, i: usize) -> u32 {
    ((key >> shift(i)) & 0xffff) as u32
}

#[inline]
fn divides_key(b: u128, a: u128) -> bool {
    ((a | GUARD) - b) & GUARD == GUARD
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let f = Fp { p: n };
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_COUNT);
        let mut n = (1u64 << 62) - 1;
        while out.len() < PRIME_COUNT {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

#[derive(Clone, Copy)]
struct Fp {
    p: u64,
}

impl Fp {
    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    fn reduce(self, n: &BigInt) -> u64 {
        let r = n.mod_floor(&BigInt::from(self.p));
        r.to_u64().unwrap()
    }

    // Univariate helpers, coefficients indexed by degree, no trailing zeros.

    fn trim(v: &mut Upoly) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn urem(self, a: &[u64], b: &[u64]) -> Upoly {
        let mut r = a.to_vec();
        Self::trim(&mut r);
        let db = b.len() - 1;
        let il = self.inv(b[db]);
        while r.len() > db {
            let lead = self.mul(*r.last().unwrap(), il);
            let s = r.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                r[s + i] = self.sub(r[s + i], self.mul(lead, c));
            }
            Self::trim(&mut r);
        }
        r
    }

    fn monic(self, mut a: Upoly) -> Upoly {
        if let Some(&lc) = a.last() {
            if lc != 1 {
                let il = self.inv(lc);
                for c in a.iter_mut() {
                    *c = self.mul(*c, il);
                }
            }
        }
        a
    }

    fn ugcd(self, a: &[u64], b: &[u64]) -> Upoly {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        Self::trim(&mut a);
        Self::trim(&mut b);
        while !b.is_empty() {
            let r = self.urem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(a)
    }

    /// Quotient of an exact division.
    fn udiv(self, a: &[u64], b: &[u64]) -> Upoly {
        let db = b.len() - 1;
        if a.len() < b.len() {
            return Vec::new();
        }
        let mut r = a.to_vec();
        let mut q = vec![0u64; a.len() - db];
        let il = self.inv(b[db]);
        for s in (0..q.len()).rev() {
            let lead = self.mul(r[s + db], il);
            q[s] = lead;
            if lead != 0 {
                for (i, &c) in b.iter().enumerate() {
                    r[s + i] = self.sub(r[s + i], self.mul(lead, c));
                }
            }
        }
        Self::trim(&mut q);
        q
    }

    fn umul(self, a: &[u64], b: &[u64]) -> Upoly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        out
    }

    fn ueval(self, a: &[u64], x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Groups an image by the exponents of variables `0..k`, giving each group
/// as a dense polynomial in variable `k`. Variable `k` must be the least
/// significant variable that occurs.
fn runs(a: &Mp, k: usize) -> Vec<(u128, Upoly)> {
    let ymask = 0xffffu128 << shift(k);
    let mut out: Vec<(u128, Upoly)> = Vec::new();
    for &(key, c) in a {
        let base = key & !ymask;
        let e = exp_of(key, k) as usize;
        match out.last_mut() {
            Some((b, u)) if *b == base => {
                if u.len() <= e {
                    u.resize(e + 1, 0);
                }
                u[e] = c;
            }
            _ => {
                let mut u = vec![0u64; e + 1];
                u[e] = c;
                out.push((base, u));
            }
        }
    }
    out
}

fn from_runs(rs: &[(u128, Upoly)], k: usize) -> Mp {
    let mut out = Vec::new();
    for (base, u) in rs {
        for (e, &c) in u.iter().enumerate().rev() {
            if c != 0 {
                out.push((*base | ((e as u128) << shift(k)), c));
            }
        }
    }
    out
}

fn monic_mp(f: Fp, mut a: Mp) -> Mp {
    if let Some(&(_, lc)) = a.first() {
        if lc != 1 {
            let il = f.inv(lc);
            for t in a.iter_mut() {
                t.1 = f.mul(t.1, il);
            }
        }
    }
    a
}

/// Exact-division test modulo p.
fn divides(f: Fp, b: &Mp, a: &Mp) -> bool {
    if a.is_empty() {
        return true;
    }
    let (lmb, lcb) = b[0];
    let il = f.inv(lcb);
    let mut r: BTreeMap<u128, u64> = a.iter().copied().collect();
    while let Some((&m, &c)) = r.iter().next_back() {
        if !divides_key(lmb, m) {
            return false;
        }
        let qk = m - lmb;
        let qc = f.mul(c, il);
        for &(bk, bc) in b {
            let key = bk + qk;
            let v = f.mul(qc, bc);
            let slot = r.entry(key).or_insert(0);
            *slot = f.sub(*slot, v);
            if *slot == 0 {
                r.remove(&key);
            }
        }
    }
    true
}

/// Monic gcd of two nonzero images in variables `0..=k`.
fn gcd_rec(f: Fp, a: &Mp, b: &Mp, k: usize, rng: &mut ChaCha8Rng) -> Option<Mp> {
    if k == 0 {
        let ua = &runs(a, 0)[0].1;
        let ub = &runs(b, 0)[0].1;
        return Some(from_runs(&[(0, f.ugcd(ua, ub))], 0));
    }
    let ra = runs(a, k);
    let rb = runs(b, k);
    let dya = ra.iter().map(|r| r.1.len() - 1).max().unwrap();
    let dyb = rb.iter().map(|r| r.1.len() - 1).max().unwrap();
    if dya == 0 && dyb == 0 {
        return gcd_rec(f, a, b, k - 1, rng);
    }
    let content = |rs: &[(u128, Upoly)]| {
        let mut c = rs[0].1.clone();
        for r in &rs[1..] {
            if c.len() == 1 {
                break;
            }
            c = f.ugcd(&c, &r.1);
        }
        f.monic(c)
    };
    let ca = content(&ra);
    let cb = content(&rb);
    let c = f.ugcd(&ca, &cb);
    let ra: Vec<(u128, Upoly)> = ra.into_iter().map(|(k, u)| (k, f.udiv(&u, &ca))).collect();
    let rb: Vec<(u128, Upoly)> = rb.into_iter().map(|(k, u)| (k, f.udiv(&u, &cb))).collect();
    let lca = ra[0].1.clone();
    let lcb = rb[0].1.clone();
    let gamma = f.ugcd(&lca, &lcb);
    let dya = ra.iter().map(|r| r.1.len() - 1).max().unwrap();
    let dyb = rb.iter().map(|r| r.1.len() - 1).max().unwrap();
    let bound = dya.min(dyb) + gamma.len() - 1;
    let pa = from_runs(&ra, k);
    let pb = from_runs(&rb, k);
    let eval_at = |rs: &[(u128, Upoly)], x: u64| -> Mp {
        rs.iter()
            .filter_map(|(key, u)| {
                let v = f.ueval(u, x);
                (v != 0).then_some((*key, v))
            })
            .collect()
    };
    let with_content = |h: Vec<(u128, Upoly)>| -> Mp {
        let h: Vec<(u128, Upoly)> = h.into_iter().map(|(k, u)| (k, f.umul(&u, &c))).collect();
        monic_mp(f, from_runs(&h, k))
    };

    let mut g_acc: Vec<(u128, Upoly)> = Vec::new();
    let mut q: Upoly = vec![1];
    let mut npts = 0usize;
    let mut attempts = 0usize;
    while attempts < 4 * bound + 40 {
        attempts += 1;
        let x = rng.gen_range(1..f.p);
        if f.ueval(&lca, x) == 0 || f.ueval(&lcb, x) == 0 {
            continue;
        }
        let ea = eval_at(&ra, x);
        let eb = eval_at(&rb, x);
        let g = gcd_rec(f, &ea, &eb, k - 1, rng)?;
        if g.len() == 1 && g[0].0 == 0 {
            return Some(monic_mp(f, from_runs(&[(0, c)], k)));
        }
        let s = f.ueval(&gamma, x);
        let g: Mp = g.into_iter().map(|(key, v)| (key, f.mul(v, s))).collect();
        let lm = g[0].0;
        if npts > 0 {
            let cur = g_acc[0].0;
            if lm > cur {
                continue;
            }
            if lm < cur {
                npts = 0;
            }
        }
        let mut changed = true;
        if npts == 0 {
            g_acc = g.iter().map(|&(key, v)| (key, vec![v])).collect();
            q = vec![1];
        } else {
            // Newton step: G += (g - G(x)) * q / q(x).
            let qx_inv = f.inv(f.ueval(&q, x));
            let mut merged: Vec<(u128, Upoly)> = Vec::with_capacity(g_acc.len().max(g.len()));
            let mut it_g = g.iter().peekable();
            changed = false;
            for (key, u) in std::mem::take(&mut g_acc) {
                while let Some(&&(gk, gv)) = it_g.peek() {
                    if gk <= key {
                        break;
                    }
                    let scale = f.mul(gv, qx_inv);
                    merged.push((gk, q.iter().map(|&c| f.mul(c, scale)).collect()));
                    changed = true;
                    it_g.next();
                }
                let gv = match it_g.peek() {
                    Some(&&(gk, gv)) if gk == key => {
                        it_g.next();
                        gv
                    }
                    _ => 0,
                };
                let diff = f.sub(gv, f.ueval(&u, x));
                if diff == 0 {
                    merged.push((key, u));
                    continue;
                }
                changed = true;
                let scale = f.mul(diff, qx_inv);
                let mut nu = u;
                if nu.len() < q.len() {
                    nu.resize(q.len(), 0);
                }
                for (i, &qc) in q.iter().enumerate() {
                    nu[i] = f.add(nu[i], f.mul(qc, scale));
                }
                Fp::trim(&mut nu);
                if !nu.is_empty() {
                    merged.push((key, nu));
                }
            }
            for &(gk, gv) in it_g {
                let scale = f.mul(gv, qx_inv);
                merged.push((gk, q.iter().map(|&c| f.mul(c, scale)).collect()));
                changed = true;
            }
            g_acc = merged;
        }
        q = f.umul(&q, &[f.sub(0, x), 1]);
        npts += 1;
        if !changed || npts > bound {
            let h = content(&g_acc);
            let cand: Vec<(u128, Upoly)> = g_acc.iter().map(|(k, u)| (*k, f.udiv(u, &h))).collect();
            let hp = from_runs(&cand, k);
            if divides(f, &hp, &pa) && divides(f, &hp, &pb) {
                return Some(with_content(cand));
            }
            if npts > bound {
                npts = 0;
            }
        }
    }
    None
}

/// Integer gcd of two nonzero integer-coefficient polynomials, or `None` if
/// the inputs fall outside what the modular method handles (more than eight
/// variables, huge degrees) or no prime succeeded.
pub(crate) fn modular_gcd(a: &Poly, b: &Poly) -> Option<Poly> {
    let vars = a.vars();
    let da = a.degrees();
    let db = b.degrees();
    let mut order: Vec<usize> = (0..vars.len()).filter(|&i| da[i] > 0 || db[i] > 0).collect();
    if order.is_empty() {
        return Some(Poly::one(vars));
    }
    if order.len() > MAX_VARS || order.iter().any(|&i| da[i].max(db[i]) > MAX_DEG) {
        return None;
    }
    // Highest degree variable as the innermost (univariate) one.
    order.sort_by_key(|&i| (std::cmp::Reverse(da[i].min(db[i])), i));
    let nv = order.len();
    let key_of = |e: &[u32]| -> u128 {
        order
            .iter()
            .enumerate()
            .fold(0u128, |acc, (slot, &v)| acc | ((e[v] as u128) << shift(slot)))
    };
    let ints = |p: &Poly| -> Option<Vec<(u128, BigInt)>> {
        let mut v: Vec<(u128, BigInt)> = p
            .terms()
            .iter()
            .map(|t| t.coeff.is_integer().then(|| (key_of(&t.exps), t.coeff.numer().clone())))
            .collect::<Option<_>>()?;
        v.sort_by_key(|x| std::cmp::Reverse(x.0));
        Some(v)
    };
    let ia = ints(&a.primitive_part())?;
    let ib = ints(&b.primitive_part())?;
    let gamma = ia[0].1.gcd(&ib[0].1);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d67_6364 ^ ((ia.len() as u64) << 32) ^ ib.len() as u64);
    let mut acc: Option<(BTreeMap<u128, BigInt>, BigInt)> = None;
    let image = |f: Fp, v: &[(u128, BigInt)]| -> Mp {
        v.iter()
            .filter_map(|(k, c)| {
                let r = f.reduce(c);
                (r != 0).then_some((*k, r))
            })
            .collect()
    };
    let mut last_lift: Option<Poly> = None;
    for &p in primes() {
        let f = Fp { p };
        if f.reduce(&ia[0].1) == 0 || f.reduce(&ib[0].1) == 0 {
            continue;
        }
        let (ap, bp) = (image(f, &ia), image(f, &ib));
        let Some(g) = gcd_rec(f, &ap, &bp, nv - 1, &mut rng) else {
            continue;
        };
        if g.len() == 1 && g[0].0 == 0 {
            return Some(Poly::one(vars));
        }
        let s = f.reduce(&gamma);
        let g: Vec<(u128, u64)> = g.into_iter().map(|(k, c)| (k, f.mul(c, s))).collect();
        let lm = g[0].0;
        let next = match acc.take() {
            Some((m, modulus)) if m.keys().next_back() == Some(&lm) => {
                let pb = BigInt::from(p);
                let minv = BigInt::from(f.inv(f.reduce(&modulus)));
                let mut out = BTreeMap::new();
                let mut gi = g.iter().map(|&(k, c)| (k, c)).collect::<BTreeMap<_, _>>();
                for (k, r) in m {
                    let c = gi.remove(&k).unwrap_or(0);
                    out.insert(k, crt(&r, &modulus, c, &pb, &minv));
                }
                for (k, c) in gi {
                    out.insert(k, crt(&BigInt::zero(), &modulus, c, &pb, &minv));
                }
                (out, &modulus * &pb)
            }
            Some((m, modulus)) if m.keys().next_back().is_some_and(|&cur| cur < lm) => {
                // This prime is unlucky.
                acc = Some((m, modulus));
                continue;
            }
            _ => (
                g.iter().map(|&(k, c)| (k, BigInt::from(c))).collect(),
                BigInt::from(p),
            ),
        };
        let lifted = lift(vars, &order, &next.0, &next.1);
        acc = Some(next);
        let Some(h) = lifted else { continue };
        if (last_lift.as_ref() == Some(&h) || last_lift.is_none())
            && a.div_exact(&h).is_some() && b.div_exact(&h).is_some() {
                return Some(h);
            }
        last_lift = Some(h);
    }
    None
}

fn crt(r: &BigInt, m: &BigInt, c: u64, p: &BigInt, minv: &BigInt) -> BigInt {
    // x = r + m * ((c - r) * m^-1 mod p)
    let t = ((BigInt::from(c) - r) * minv).mod_floor(p);
    r + m * t
}

/// Symmetric lift of the accumulated residues, made primitive.
fn lift(vars: &super::varset::VarSet, order: &[usize], m: &BTreeMap<u128, BigInt>, modulus: &BigInt) -> Option<Poly> {
    let half: BigInt = modulus >> 1;
    let mut terms = Vec::with_capacity(m.len());
    for (&k, r) in m {
        let v = if r > &half { r - modulus } else { r.clone() };
        if v.is_zero() {
            continue;
        }
        let mut e: Exps = std::iter::repeat_n(0, vars.len()).collect();
        for (slot, &var) in order.iter().enumerate() {
            e[var] = exp_of(k, slot);
        }
        terms.push(Term {
            exps: e,
            coeff: Scalar::from(v),
        });
    }
    if terms.is_empty() {
        return None;
    }
    Some(Poly::from_terms(vars, terms).primitive_part())
}
