//! Integer multiplication and exact division kernels.
//!
//! Both kernels work on primitive integer parts; rational content is split off
//! by the callers and reapplied afterwards.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use super::mono::{MonoKey, Packer, Wide};
use super::poly::{Poly, Term};
use super::scalar::Scalar;
use crate::par;

/// Work (term pairs) above which multiplication is split across threads.
const PAR_MUL_WORK: usize = 1 << 16;

fn int_parts(p: &Poly) -> (Scalar, Vec<BigInt>) {
    let c = p.content();
    let q = p.scale(&c.recip());
    let ints = q.int_coeffs().expect("primitive part is integral");
    (c, ints)
}

fn to_keys<K, F: Fn(&Term) -> K>(p: &Poly, f: F) -> Vec<K> {
    p.terms().iter().map(f).collect()
}

/// `a * b` for polynomials with matching varsets, both nonzero.
pub(crate) fn mul(a: &Poly, b: &Poly) -> Poly {
    let vars = a.vars();
    let (ca, ia) = int_parts(a);
    let (cb, ib) = int_parts(b);
    let c = &ca * &cb;
    let deg = a.total_degree() + b.total_degree();
    let terms: Vec<Term> = match Packer::new(vars.len(), deg) {
        Some(pk) => {
            let ka = to_keys(a, |t| pk.pack(&t.exps));
            let kb = to_keys(b, |t| pk.pack(&t.exps));
            mul_keys(&ka, &ia, &kb, &ib)
                .into_iter()
                .map(|(k, v)| Term {
                    exps: pk.unpack(k),
                    coeff: &Scalar::from(v) * &c,
                })
                .collect()
        }
        None => {
            let ka = to_keys(a, |t| Wide(t.exps.clone()));
            let kb = to_keys(b, |t| Wide(t.exps.clone()));
            mul_keys(&ka, &ia, &kb, &ib)
                .into_iter()
                .map(|(k, v)| Term {
                    exps: k.0,
                    coeff: &Scalar::from(v) * &c,
                })
                .collect()
        }
    };
    Poly::from_sorted_terms(vars, terms)
}

fn bits_of(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.bits()).max().unwrap_or(0)
}

fn mul_keys<K: MonoKey>(ka: &[K], ia: &[BigInt], kb: &[K], ib: &[BigInt]) -> Vec<(K, BigInt)> {
    // Put the longer operand on the outside so chunks have balanced work.
    let (ka, ia, kb, ib) = if ka.len() >= kb.len() {
        (ka, ia, kb, ib)
    } else {
        (kb, ib, ka, ia)
    };
    let pair_bits = bits_of(ia) + bits_of(ib);
    let count_bits = 64 - (kb.len().min(ka.len()) as u64).leading_zeros() as u64;
    let small = pair_bits + count_bits + 1 < 126;
    let work = ka.len() * kb.len();
    let chunks = if par::parallel_enabled() && work >= PAR_MUL_WORK {
        (ka.len() / 32).clamp(1, 64)
    } else {
        1
    };
    let step = ka.len().div_ceil(chunks);
    let mut out: Vec<(K, BigInt)> = if small {
        let sa: Vec<i128> = ia.iter().map(|x| x.to_i128().unwrap()).collect();
        let sb: Vec<i128> = ib.iter().map(|x| x.to_i128().unwrap()).collect();
        let parts = par::map_range(chunks, |ci| {
            let lo = ci * step;
            let hi = ((ci + 1) * step).min(ka.len());
            let mut acc: FxHashMap<K, i128> = FxHashMap::default();
            acc.reserve((hi.saturating_sub(lo)) * kb.len() / 2 + 16);
            for i in lo..hi {
                for j in 0..kb.len() {
                    *acc.entry(ka[i].mul(&kb[j])).or_insert(0) += sa[i] * sb[j];
                }
            }
            acc
        });
        let mut total: FxHashMap<K, i128> = FxHashMap::default();
        let mut iter = parts.into_iter();
        if let Some(first) = iter.next() {
            total = first;
        }
        for p in iter {
            for (k, v) in p {
                *total.entry(k).or_insert(0) += v;
            }
        }
        total
            .into_iter()
            .filter(|(_, v)| *v != 0)
            .map(|(k, v)| (k, BigInt::from(v)))
            .collect()
    } else {
        let parts = par::map_range(chunks, |ci| {
            let lo = ci * step;
            let hi = ((ci + 1) * step).min(ka.len());
            let mut acc: FxHashMap<K, BigInt> = FxHashMap::default();
            for i in lo..hi {
                for j in 0..kb.len() {
                    let e = acc.entry(ka[i].mul(&kb[j])).or_insert_with(BigInt::zero);
                    *e += &ia[i] * &ib[j];
                }
            }
            acc
        });
        let mut total: FxHashMap<K, BigInt> = FxHashMap::default();
        for p in parts {
            if total.is_empty() {
                total = p;
                continue;
            }
            for (k, v) in p {
                *total.entry(k).or_insert_with(BigInt::zero) += v;
            }
        }
        total.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    };
    out.sort_unstable_by(|x, y| y.0.cmp(&x.0));
    out
}

/// Exact quotient `a / b`, or `None` when `b` does not divide `a`.
pub(crate) fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    let vars = a.vars();
    if a.is_zero() {
        return Some(Poly::zero(vars));
    }
    if let Some(c) = b.constant_value() {
        return Some(a.scale(&c.recip()));
    }
    // Cheap necessary conditions before any coefficient work.
    if a.total_degree() < b.total_degree() {
        return None;
    }
    let da = a.degrees();
    let db = b.degrees();
    if da.iter().zip(&db).any(|(x, y)| x < y) {
        return None;
    }
    let lo_a = &a.terms().last().unwrap().exps;
    let lo_b = &b.terms().last().unwrap().exps;
    let low_deg_a: u32 = lo_a.iter().sum();
    let low_deg_b: u32 = lo_b.iter().sum();
    if low_deg_a < low_deg_b {
        return None;
    }
    let (ca, ia) = int_parts(a);
    let (cb, ib) = int_parts(b);
    let c = &ca / &cb;
    let terms: Vec<Term> = match Packer::new(vars.len(), a.total_degree()) {
        Some(pk) => {
            let ka = to_keys(a, |t| pk.pack(&t.exps));
            let kb = to_keys(b, |t| pk.pack(&t.exps));
            let q = div_keys(&ka, &ia, &kb, &ib)?;
            q.into_iter()
                .map(|(k, v)| Term {
                    exps: pk.unpack(k),
                    coeff: &Scalar::from(v) * &c,
                })
                .collect()
        }
        None => {
            let ka = to_keys(a, |t| Wide(t.exps.clone()));
            let kb = to_keys(b, |t| Wide(t.exps.clone()));
            let q = div_keys(&ka, &ia, &kb, &ib)?;
            q.into_iter()
                .map(|(k, v)| Term {
                    exps: k.0,
                    coeff: &Scalar::from(v) * &c,
                })
                .collect()
        }
    };
    Some(Poly::from_sorted_terms(vars, terms))
}

/// Division over the integers with a primitive divisor; by Gauss's lemma an
/// exact rational quotient is then integral, so any non-integral coefficient
/// step proves non-divisibility.
fn div_keys<K: MonoKey>(ka: &[K], ia: &[BigInt], kb: &[K], ib: &[BigInt]) -> Option<Vec<(K, BigInt)>> {
    let mut rem: BTreeMap<K, BigInt> = ka.iter().cloned().zip(ia.iter().cloned()).collect();
    let lead_k = &kb[0];
    let lead_c = &ib[0];
    let low_k = kb.last().unwrap();
    let mut quot: Vec<(K, BigInt)> = Vec::new();
    while let Some((k, v)) = rem.pop_last() {
        // Everything left is strictly below k; if k is below lt(b) no
        // multiple of b can cancel it.
        let m = k.div(lead_k)?;
        let (qc, r) = v.div_rem(lead_c);
        if !r.is_zero() {
            return None;
        }
        for (bk, bc) in kb.iter().zip(ib.iter()).skip(1) {
            let key = m.mul(bk);
            let delta = &qc * bc;
            match rem.entry(key) {
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    *e.get_mut() -= delta;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(-delta);
                }
            }
        }
        // The smallest term of the remainder must stay divisible by the
        // smallest term of b.
        if let Some((lk, _)) = rem.first_key_value() {
            lk.div(low_k)?;
        }
        quot.push((m, qc));
    }
    debug_assert!(quot.iter().all(|(_, c)| !c.is_zero()));
    Some(quot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::varset::VarSet;

    fn p(vars: &VarSet, s: &[(i64, &[u32])]) -> Poly {
        Poly::from_terms(
            vars,
            s.iter()
                .map(|(c, e)| Term {
                    exps: e.iter().copied().collect(),
                    coeff: Scalar::from(*c),
                })
                .collect(),
        )
    }

    #[test]
    fn mul_and_divide() {
        let v = VarSet::of(&["x", "y"]);
        let a = p(&v, &[(1, &[1, 0]), (1, &[0, 1])]);
        let b = p(&v, &[(1, &[1, 0]), (-1, &[0, 1])]);
        let prod = a.mul(&b);
        assert_eq!(prod, p(&v, &[(1, &[2, 0]), (-1, &[0, 2])]));
        assert_eq!(div_exact(&prod, &b), Some(a.clone()));
        let x2p1 = p(&v, &[(1, &[2, 0]), (1, &[0, 0])]);
        let xp1 = p(&v, &[(1, &[1, 0]), (1, &[0, 0])]);
        assert_eq!(div_exact(&x2p1, &xp1), None);
    }

    #[test]
    fn wide_keys_agree_with_packed() {
        let names: Vec<String> = (0..9).map(|i| format!("a{i}")).collect();
        let v = VarSet::new(&names).unwrap();
        let mut e1 = [0u32; 9];
        e1[0] = 1;
        let mut e2 = [0u32; 9];
        e2[8] = 2;
        let a = p(&v, &[(3, &e1), (-2, &e2), (1, &[0; 9])]);
        let sq = a.mul(&a);
        assert_eq!(sq.nterms(), 6);
        assert_eq!(div_exact(&sq, &a), Some(a));
    }
}
