//! Exact rational helpers: `p/q` text form and comparisons against powers of two with
//! rational exponents, done by clearing denominators so no floating point is involved.

use std::cmp::Ordering;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// `p/q` in lowest terms, always with an explicit denominator.
pub fn fmt_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e
}

/// Compares a positive rational `value` with `2^exponent` for a rational exponent `p/q`:
/// `value` vs `2^(p/q)` has the same ordering as `value^q` vs `2^p`.
pub fn cmp_pow2(value: &BigRational, exponent: &BigRational) -> Ordering {
    if !value.is_positive() {
        return Ordering::Less;
    }
    let p = exponent.numer();
    let q = exponent
        .denom()
        .to_u32()
        .expect("exponent denominator too large for exact comparison");
    let lhs_num = value.numer().pow(q);
    let lhs_den = value.denom().pow(q);
    let shift = p.abs().to_u64().expect("exponent too large");
    // value^q = a/b against 2^p: compare a * 2^{max(0,-p)} with b * 2^{max(0,p)}.
    if p.is_negative() {
        (lhs_num * pow2(shift)).cmp(&lhs_den)
    } else {
        lhs_num.cmp(&(lhs_den * pow2(shift)))
    }
}

/// `value <= 2^exponent`, exactly. Non-positive values always satisfy it.
pub fn le_pow2(value: &BigRational, exponent: &BigRational) -> bool {
    cmp_pow2(value, exponent) != Ordering::Greater
}

/// Largest integer `s` with `s < 2^exponent` (strict), for a non-negative exponent.
pub fn largest_below_pow2(exponent: &BigRational) -> u64 {
    let mut lo = 0u64;
    let mut hi = 1u64;
    while cmp_pow2(&BigRational::from_integer(hi.into()), exponent) == Ordering::Less {
        lo = hi;
        hi = hi.checked_mul(2).expect("size budget overflows u64");
    }
    // invariant: lo < 2^e <= hi
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if cmp_pow2(&BigRational::from_integer(mid.into()), exponent) == Ordering::Less {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
