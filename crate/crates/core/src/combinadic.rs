//! Fixed-weight bit vectors: binomials, combinadic rank/unrank and ordered iteration.
//!
//! Masks use bit `t` for position `t + 1` of an `len`-bit block. Combinadic order is
//! ascending numeric order of the mask, so rank 0 is the mask with the lowest `weight`
//! bits set.

use num::BigUint;

/// `C(n, k)` in `u64`; `0` when `k > n`. Panics on overflow, which cannot happen for
/// block lengths below 64 with the weights used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial overflows u64")
}

pub fn binomial_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The `rank`-th `len`-bit mask of Hamming weight `weight` in ascending order.
pub fn unrank_fixed_weight(len: u32, weight: u32, mut rank: u64) -> u64 {
    debug_assert!(len < 64);
    debug_assert!(rank < binomial(len as u64, weight as u64));
    let mut ones = weight as u64;
    let mut mask = 0u64;
    for bit in (0..len as u64).rev() {
        if ones == 0 {
            break;
        }
        let below = binomial(bit, ones);
        if rank >= below {
            rank -= below;
            mask |= 1 << bit;
            ones -= 1;
        }
    }
    mask
}

/// Inverse of [`unrank_fixed_weight`].
pub fn rank_fixed_weight(mask: u64) -> u64 {
    let mut rank = 0;
    let mut seen = 0u64;
    for bit in 0..64u64 {
        if mask >> bit & 1 == 1 {
            seen += 1;
            rank += binomial(bit, seen);
        }
    }
    rank
}

/// Every `len`-bit mask of the given weight, ascending (Gosper's hack).
#[derive(Debug, Clone)]
pub struct FixedWeight {
    next: Option<u64>,
    limit: u64,
}

impl FixedWeight {
    pub fn new(len: u32, weight: u32) -> Self {
        assert!(len < 64, "block length must be below 64");
        let next = if weight > len {
            None
        } else {
            Some((1u64 << weight) - 1)
        };
        FixedWeight {
            next,
            limit: 1u64 << len,
        }
    }
}

impl Iterator for FixedWeight {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let low = cur & cur.wrapping_neg();
            let ripple = cur + low;
            let succ = (((ripple ^ cur) >> 2) / low) | ripple;
            (succ < self.limit).then_some(succ)
        };
        Some(cur)
    }
}

/// Positions (0-based) of the set bits of `mask`, ascending.
pub fn ones(mask: u64) -> impl Iterator<Item = u32> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let t = rest.trailing_zeros();
            rest &= rest - 1;
            Some(t)
        }
    })
}

/// Mixed-radix odometer over `radices`, first coordinate varying slowest.
pub(crate) fn odometer(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let empty = radices.contains(&0);
    let mut cur = if empty {
        None
    } else {
        Some(vec![0usize; radices.len()])
    };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut state = cur.take().unwrap();
        let mut i = radices.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            state[i] += 1;
            if state[i] < radices[i] {
                cur = Some(state);
                break;
            }
            state[i] = 0;
        }
        Some(out)
    })
}
