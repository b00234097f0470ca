use itertools::Itertools;

use crate::bounds::{ceil_log2, sperner_min_t};
use crate::error::{Error, Result};
use crate::model::{threshold_device, CircuitBuilder, KeyDistribution, PadlockId, ThresholdSystem};

pub(crate) fn check_kn(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::parameter(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

fn one_key_each(n: usize) -> KeyDistribution {
    KeyDistribution::from_lists((0..n as u32).map(|i| [i]))
}

/// One padlock per participant behind a k-out-of-n device.
pub fn build_direct(k: usize, n: usize) -> Result<ThresholdSystem> {
    check_kn(k, n)?;
    ThresholdSystem::new(threshold_device(k, n as u32)?, one_key_each(n))
}

/// A single padlock whose key every participant holds.
pub fn build_single(n: usize) -> Result<ThresholdSystem> {
    check_kn(1, n)?;
    let mut b = CircuitBuilder::new(1);
    let root = b.lock(PadlockId(0))?;
    ThresholdSystem::new(
        b.finish(root),
        KeyDistribution::from_lists((0..n).map(|_| [0u32])),
    )
}

/// 2-out-of-n with shared keys on the smallest ground set carrying `n`
/// distinct half-size subsets.
pub fn build_2_of_n(n: usize) -> Result<ThresholdSystem> {
    if n < 2 {
        return Err(Error::parameter(format!(
            "2-out-of-n needs n >= 2, got {n}"
        )));
    }
    let t = sperner_min_t(n as u64) as usize;
    if t >= n {
        return build_direct(2, n);
    }
    let half = t / 2;
    let keys = KeyDistribution::from_lists((0..t as u32).combinations(half).take(n));
    ThresholdSystem::new(threshold_device(half + 1, t as u32)?, keys)
}

/// Double daisy chain: one white and one black padlock per binary digit; a
/// participant holds the colour of each of its digits.
pub fn build_double_daisy(n: usize) -> Result<ThresholdSystem> {
    if n < 2 {
        return Err(Error::parameter(format!(
            "daisy chain needs n >= 2, got {n}"
        )));
    }
    let bits = ceil_log2(n as u64) as u32;
    let mut b = CircuitBuilder::new(2 * bits);
    let links = (0..bits)
        .map(|i| {
            let pair = b.locks([PadlockId(2 * i), PadlockId(2 * i + 1)])?;
            b.and(pair)
        })
        .collect::<Result<Vec<_>>>()?;
    let root = b.or(links)?;
    let keys = KeyDistribution::from_lists(
        (0..n).map(|p| (0..bits).map(move |i| 2 * i + ((p >> i) & 1) as u32)),
    );
    ThresholdSystem::new(b.finish(root), keys)
}

/// Four participants A, B, C, D opening with `AB + BC + CD`.
pub fn build_benaloh() -> Result<ThresholdSystem> {
    let mut b = CircuitBuilder::new(4);
    let l = b.locks((0..4).map(PadlockId))?;
    let clauses = [[0, 1], [1, 2], [2, 3]]
        .iter()
        .map(|[x, y]| b.and(vec![l[*x], l[*y]]))
        .collect::<Result<Vec<_>>>()?;
    let root = b.threshold(1, clauses)?;
    ThresholdSystem::new(b.finish(root), one_key_each(4))
}

/// Weighted device where participant `i` holds the key of the padlock with
/// weight `weights[i]`.
pub fn build_weighted(weights: &[u32], required: u32) -> Result<ThresholdSystem> {
    build_weighted_with_owners(weights, required, one_key_each(weights.len()))
}

/// Weighted device over padlocks `0..weights.len()` with an explicit key
/// distribution.
pub fn build_weighted_with_owners(
    weights: &[u32],
    required: u32,
    keys: KeyDistribution,
) -> Result<ThresholdSystem> {
    if weights.is_empty() {
        return Err(Error::parameter("no weights given"));
    }
    let total: u64 = weights.iter().map(|w| u64::from(*w)).sum();
    if weights.contains(&0) || required == 0 || u64::from(required) > total {
        return Err(Error::parameter(format!(
            "weighted threshold {required} infeasible for weights {weights:?}"
        )));
    }
    let mut b = CircuitBuilder::new(weights.len() as u32);
    let leaves = b.locks((0..weights.len() as u32).map(PadlockId))?;
    let root = b.weighted(required, weights.to_vec(), leaves)?;
    ThresholdSystem::new(b.finish(root), keys)
}
