//! Monomial keys used inside the arithmetic kernels.
//!
//! When the variable count and degrees allow it, an exponent vector is packed
//! into a `u128` as `[total degree | e_1 | ... | e_n]` in 16-bit fields. Integer
//! order on the packed value is then graded lexicographic order, addition is
//! monomial multiplication, and divisibility is a single SWAR test.

use std::cmp::Ordering;
use std::hash::Hash;

use smallvec::SmallVec;

pub type Exps = SmallVec<[u32; 8]>;

/// Largest exponent (and total degree) representable in a packed field.
pub const PACK_LIMIT: u32 = 1 << 15;
/// Variables that fit beside the degree field.
pub const PACK_MAX_VARS: usize = 7;

const FIELD_BITS: u32 = 16;
const GUARD: u128 = {
    let mut g = 0u128;
    let mut i = 0;
    while i < 8 {
        g |= 0x8000u128 << (i * 16);
        i += 1;
    }
    g
};

pub fn total_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Graded lexicographic comparison: total degree first, then lexicographic by
/// variable order.
pub fn grlex_cmp(a: &[u32], b: &[u32]) -> Ordering {
    total_degree(a)
        .cmp(&total_degree(b))
        .then_with(|| a.cmp(b))
}

pub trait MonoKey: Clone + Ord + Eq + Hash + Send + Sync {
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Option<Self>;
}

#[derive(Clone, Copy, Debug)]
pub struct Packer {
    nvars: usize,
}

impl Packer {
    /// Returns a packer if `nvars` variables with degrees bounded by
    /// `max_total_degree` fit the packed layout.
    pub fn new(nvars: usize, max_total_degree: u32) -> Option<Packer> {
        (nvars <= PACK_MAX_VARS && max_total_degree < PACK_LIMIT).then_some(Packer { nvars })
    }

    pub fn pack(&self, e: &[u32]) -> Packed {
        let mut k: u128 = total_degree(e) as u128;
        for &x in e {
            k = (k << FIELD_BITS) | x as u128;
        }
        Packed(k)
    }

    pub fn unpack(&self, k: Packed) -> Exps {
        let mut out: Exps = SmallVec::from_elem(0, self.nvars);
        let mut v = k.0;
        for i in (0..self.nvars).rev() {
            out[i] = (v & 0xffff) as u32;
            v >>= FIELD_BITS;
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Packed(pub u128);

impl MonoKey for Packed {
    #[inline]
    fn mul(&self, other: &Self) -> Self {
        Packed(self.0 + other.0)
    }

    #[inline]
    fn div(&self, other: &Self) -> Option<Self> {
        if ((self.0 | GUARD).wrapping_sub(other.0)) & GUARD == GUARD {
            Some(Packed(self.0 - other.0))
        } else {
            None
        }
    }
}

/// Unpacked fallback key ordered by graded lex.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Wide(pub Exps);

impl PartialOrd for Wide {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Wide {
    fn cmp(&self, other: &Self) -> Ordering {
        grlex_cmp(&self.0, &other.0)
    }
}

impl MonoKey for Wide {
    fn mul(&self, other: &Self) -> Self {
        Wide(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    fn div(&self, other: &Self) -> Option<Self> {
        let mut out = Exps::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Wide(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_order_is_grlex() {
        let p = Packer::new(3, 100).unwrap();
        let mons: Vec<Exps> = vec![
            SmallVec::from_slice(&[0, 0, 2]),
            SmallVec::from_slice(&[1, 0, 0]),
            SmallVec::from_slice(&[0, 1, 1]),
            SmallVec::from_slice(&[2, 0, 0]),
            SmallVec::from_slice(&[1, 1, 0]),
        ];
        for a in &mons {
            for b in &mons {
                assert_eq!(p.pack(a).cmp(&p.pack(b)), grlex_cmp(a, b));
            }
            assert_eq!(&p.unpack(p.pack(a)), a);
        }
    }

    #[test]
    fn packed_divisibility() {
        let p = Packer::new(3, 100).unwrap();
        let a = p.pack(&[3, 1, 2]);
        let b = p.pack(&[1, 1, 0]);
        let c = p.pack(&[0, 2, 0]);
        assert_eq!(a.div(&b).map(|k| p.unpack(k).to_vec()), Some(vec![2, 0, 2]));
        assert!(a.div(&c).is_none());
        assert_eq!(b.mul(&c), p.pack(&[1, 3, 0]));
    }
}
