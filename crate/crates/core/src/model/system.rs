use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;

use super::circuit::{DeviceCircuit, PadlockId, PadlockSet};
use crate::error::{Error, Result};

/// Default bound on the participant count for exhaustive coalition enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Hard ceiling: coalitions are enumerated as `u64` masks.
pub const MAX_ENUMERATION_LIMIT: usize = 63;

pub(crate) fn check_limit(n: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_ENUMERATION_LIMIT);
    if n > limit {
        return Err(Error::capacity(format!(
            "{n} participants exceed the enumeration limit of {limit}"
        )));
    }
    Ok(())
}

/// Which padlock keys each participant holds. Duplicated keys of one padlock
/// are not materialized: holding a key is membership of the padlock id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyDistribution {
    keys: Vec<Vec<PadlockId>>,
}

impl KeyDistribution {
    pub fn new(keys: Vec<Vec<PadlockId>>) -> Self {
        let keys = keys
            .into_iter()
            .map(|mut k| {
                k.sort_unstable();
                k.dedup();
                k
            })
            .collect();
        KeyDistribution { keys }
    }

    /// Builds a distribution from plain integer key lists.
    pub fn from_lists<I, J>(lists: I) -> Self
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = u32>,
    {
        KeyDistribution::new(
            lists
                .into_iter()
                .map(|l| l.into_iter().map(PadlockId).collect())
                .collect(),
        )
    }

    pub fn participants(&self) -> usize {
        self.keys.len()
    }

    pub fn keys_of(&self, participant: usize) -> &[PadlockId] {
        &self.keys[participant]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[PadlockId]> {
        self.keys.iter().map(Vec::as_slice)
    }

    /// Total number of distributed keys, counting duplicates.
    pub fn key_count(&self) -> usize {
        self.keys.iter().map(Vec::len).sum()
    }

    /// Maximum number of keys held by one participant.
    pub fn rank(&self) -> usize {
        self.keys.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Distinct padlocks for which at least one key was handed out.
    pub fn distinct_keys(&self) -> BTreeSet<PadlockId> {
        self.keys.iter().flatten().copied().collect()
    }

    /// How many participants hold a key of each padlock `0..padlocks`.
    pub fn owner_counts(&self, padlocks: usize) -> Vec<usize> {
        let mut counts = vec![0; padlocks];
        for id in self.keys.iter().flatten() {
            if id.index() >= counts.len() {
                counts.resize(id.index() + 1, 0);
            }
            counts[id.index()] += 1;
        }
        counts
    }

    pub fn as_sets(&self) -> Vec<PadlockSet> {
        self.keys
            .iter()
            .map(|k| k.iter().copied().collect())
            .collect()
    }
}

/// Participants, a device circuit and the keys handed out for its padlocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSystem {
    circuit: DeviceCircuit,
    keys: KeyDistribution,
}

impl ThresholdSystem {
    /// Validates that every key refers to a declared padlock and that every
    /// padlock used by the circuit has at least one key holder.
    pub fn new(circuit: DeviceCircuit, keys: KeyDistribution) -> Result<Self> {
        let padlocks = circuit.padlocks();
        for (p, ks) in keys.iter().enumerate() {
            if let Some(bad) = ks.iter().find(|id| id.index() >= padlocks) {
                return Err(Error::structure(format!(
                    "participant {p} holds key of undeclared padlock {}",
                    bad.0
                )));
            }
        }
        let owners = keys.owner_counts(padlocks);
        if let Some(orphan) = circuit
            .used_padlocks()
            .iter()
            .find(|id| owners[id.index()] == 0)
        {
            return Err(Error::structure(format!(
                "padlock {} is used by the circuit but nobody holds its key",
                orphan.0
            )));
        }
        Ok(ThresholdSystem { circuit, keys })
    }

    pub fn participants(&self) -> usize {
        self.keys.participants()
    }

    pub fn circuit(&self) -> &DeviceCircuit {
        &self.circuit
    }

    pub fn keys(&self) -> &KeyDistribution {
        &self.keys
    }

    pub fn padlock_count(&self) -> usize {
        self.circuit.padlocks()
    }

    pub fn key_count(&self) -> usize {
        self.keys.key_count()
    }

    pub fn rank(&self) -> usize {
        self.keys.rank()
    }

    /// Union of the key sets of `coalition`.
    pub fn opened_by(&self, coalition: &[usize]) -> Result<PadlockSet> {
        let mut opened = PadlockSet::with_capacity(self.padlock_count());
        for &p in coalition {
            if p >= self.participants() {
                return Err(Error::parameter(format!(
                    "participant {p} out of range 0..{}",
                    self.participants()
                )));
            }
            for id in self.keys.keys_of(p) {
                opened.insert(*id);
            }
        }
        Ok(opened)
    }

    pub fn coalition_open(&self, coalition: &[usize]) -> Result<bool> {
        Ok(self.circuit.evaluate(&self.opened_by(coalition)?))
    }

    pub(crate) fn mask_open(&self, sets: &[PadlockSet], mask: u64) -> bool {
        let mut opened = PadlockSet::with_capacity(self.padlock_count());
        let mut m = mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            opened.union_with(&sets[p]);
            m &= m - 1;
        }
        self.circuit.evaluate(&opened)
    }

    pub fn realized_access_structure(&self) -> Result<AccessStructure> {
        self.realized_access_structure_limited(DEFAULT_ENUMERATION_LIMIT)
    }

    /// Minimal authorized coalitions, by enumerating all `2^n` coalitions.
    pub fn realized_access_structure_limited(&self, limit: usize) -> Result<AccessStructure> {
        let n = self.participants();
        check_limit(n, limit)?;
        let sets = self.keys.as_sets();
        let total: u64 = 1u64 << n;
        let open: Vec<bool> = (0..total)
            .into_par_iter()
            .map(|mask| self.mask_open(&sets, mask))
            .collect();
        let mut minimal: Vec<u64> = (0..total)
            .filter(|&mask| {
                open[mask as usize]
                    && (0..n).all(|p| mask & (1 << p) == 0 || !open[(mask & !(1 << p)) as usize])
            })
            .collect();
        minimal.sort_by_key(|m| (m.count_ones(), mask_to_vec(*m)));
        Ok(AccessStructure {
            participants: n,
            minimal: minimal.into_iter().map(mask_to_vec).collect(),
        })
    }
}

pub(crate) fn mask_to_vec(mask: u64) -> Vec<usize> {
    (0..64).filter(|p| mask & (1u64 << p) != 0).collect()
}

pub(crate) fn vec_to_mask(coalition: &[usize]) -> u64 {
    coalition.iter().fold(0, |m, p| m | (1u64 << p))
}

/// Monotone access structure, represented by its minimal authorized sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    participants: usize,
    minimal: Vec<Vec<usize>>,
}

impl AccessStructure {
    /// Builds an access structure from arbitrary authorized sets, reducing them
    /// to an antichain.
    pub fn from_sets(participants: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut masks: Vec<u64> = Vec::with_capacity(sets.len());
        for s in &sets {
            if let Some(p) = s.iter().find(|p| **p >= participants) {
                return Err(Error::parameter(format!("participant {p} out of range")));
            }
            masks.push(vec_to_mask(s));
        }
        masks.sort_unstable();
        masks.dedup();
        let keep: Vec<u64> = masks
            .iter()
            .copied()
            .filter(|m| !masks.iter().any(|o| o != m && o & m == *o))
            .collect();
        let mut minimal: Vec<Vec<usize>> = keep.into_iter().map(mask_to_vec).collect();
        minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(AccessStructure {
            participants,
            minimal,
        })
    }

    /// All `k`-subsets of `n` participants.
    pub fn threshold(k: usize, n: usize) -> Self {
        AccessStructure {
            participants: n,
            minimal: (0..n).combinations(k).collect(),
        }
    }

    pub fn participants(&self) -> usize {
        self.participants
    }

    pub fn minimal_sets(&self) -> &[Vec<usize>] {
        &self.minimal
    }

    /// Whether `coalition` contains some minimal authorized set.
    pub fn authorizes(&self, coalition: &[usize]) -> bool {
        let mask = vec_to_mask(coalition);
        self.minimal
            .iter()
            .any(|s| vec_to_mask(s) & mask == vec_to_mask(s))
    }

    pub fn is_antichain(&self) -> bool {
        let masks: Vec<u64> = self.minimal.iter().map(|s| vec_to_mask(s)).collect();
        masks
            .iter()
            .enumerate()
            .all(|(i, a)| masks.iter().enumerate().all(|(j, b)| i == j || a & b != *a))
    }
}
