//! Seeded desk-scale instance families.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{full_mask, SetCoverError, SetCoverInstance, SetSelection, MAX_SETS};

/// `m` distinct non-all-ones vectors, each coordinate zero with probability
/// `zero_density`.
pub fn random_instance(
    n: usize,
    m: usize,
    zero_density: f64,
    seed: u64,
) -> Result<SetCoverInstance, SetCoverError> {
    if n == 0 {
        return Err(SetCoverError::NoSets);
    }
    if n > MAX_SETS {
        return Err(SetCoverError::TooManySets(n));
    }
    if m == 0 {
        return Err(SetCoverError::EmptyUniverse);
    }
    if !(zero_density > 0.0 && zero_density <= 1.0) {
        return Err(SetCoverError::BadParameter(format!(
            "zero_density must lie in (0, 1], got {zero_density}"
        )));
    }
    let available = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    if m as u64 > available {
        return Err(SetCoverError::TooManyElements {
            requested: m as u64,
            available,
        });
    }
    let full = full_mask(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<u64> = Vec::with_capacity(m);
    let max_attempts = 10_000 * m;
    let mut attempts = 0;
    while out.len() < m {
        attempts += 1;
        if attempts > max_attempts {
            return Err(SetCoverError::BadParameter(format!(
                "zero_density {zero_density} too extreme to draw {m} distinct elements"
            )));
        }
        let mut v = full;
        for i in 0..n {
            if rng.gen_bool(zero_density) {
                v &= !(1 << i);
            }
        }
        if v != full && !out.contains(&v) {
            out.push(v);
        }
    }
    SetCoverInstance::from_vectors(n, &out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedInstance {
    pub instance: SetCoverInstance,
    /// The planted cover; `opt_exact` equals its size.
    pub cover: SetSelection,
}

/// Planted instance with `n - opt_target` extra random elements. See
/// [`planted_instance_with_extras`].
pub fn planted_instance(
    n: usize,
    opt_target: usize,
    seed: u64,
) -> Result<PlantedInstance, SetCoverError> {
    planted_instance_with_extras(n, opt_target, n.saturating_sub(opt_target), seed)
}

/// Picks a random cover `P` of size `opt_target`. For every `p` in `P` the element that
/// is zero only at `p` is added, which forces `p` into every cover, so the optimum is
/// exactly `|P|`. Up to `extras` further random elements, each zero somewhere in `P`,
/// are appended (duplicates are dropped).
pub fn planted_instance_with_extras(
    n: usize,
    opt_target: usize,
    extras: usize,
    seed: u64,
) -> Result<PlantedInstance, SetCoverError> {
    if n == 0 {
        return Err(SetCoverError::NoSets);
    }
    if n > MAX_SETS {
        return Err(SetCoverError::TooManySets(n));
    }
    if opt_target == 0 || opt_target > n {
        return Err(SetCoverError::BadParameter(format!(
            "opt_target must lie in 1..={n}, got {opt_target}"
        )));
    }
    let full = full_mask(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = sample(&mut rng, n, opt_target).into_vec();
    picked.sort_unstable();
    let cover = SetSelection(picked.iter().fold(0, |m, &p| m | 1 << p));
    let mut vectors: Vec<u64> = picked.iter().map(|&p| full & !(1 << p)).collect();
    for _ in 0..extras {
        let mut v: u64 = rng.gen::<u64>() & full;
        let p = picked[rng.gen_range(0..picked.len())];
        v &= !(1 << p);
        vectors.push(v);
    }
    let instance = SetCoverInstance::from_vectors(n, &vectors)?;
    Ok(PlantedInstance { instance, cover })
}
