//! Recursive k-out-of-n systems.
//!
//! The participants are split into a group G of `ceil(n/2)` and a group H of
//! `floor(n/2)`. The door opens through a k-out-of-|G| system whose keys are
//! also copied to H, or through `i`-out-of-|G| AND `(k-i)`-out-of-|H| for some
//! `0 < i < k`. Subsystems are the cheapest known ones.

use std::collections::HashMap;

use crate::bounds::{bose_order, skolem_order, split_sizes, Plan, RecursivePlanner};
use crate::constructions::basic::{build_2_of_n, build_direct, build_single};
use crate::constructions::triads::{bose_triples, skolem_triples, system_from_triads};
use crate::error::{Error, Result};
use crate::model::{CircuitBuilder, KeyDistribution, PadlockId, ThresholdSystem};

/// Recursive k-out-of-n system; its padlock count equals
/// [`crate::bounds::recursive_padlock_count`].
pub fn build_recursive(k: usize, n: usize) -> Result<ThresholdSystem> {
    if k < 2 || k > n {
        return Err(Error::parameter(format!(
            "recursive scheme needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let mut ctx = Context::default();
    let plan = ctx.planner.top_plan(k as u64, n as u64);
    ctx.build(plan, k, n)
}

#[derive(Default)]
struct Context {
    planner: RecursivePlanner,
    cache: HashMap<(usize, usize), ThresholdSystem>,
}

impl Context {
    fn best(&mut self, k: usize, n: usize) -> Result<ThresholdSystem> {
        if let Some(s) = self.cache.get(&(k, n)) {
            return Ok(s.clone());
        }
        let plan = self.planner.best_plan(k as u64, n as u64);
        let s = self.build(plan, k, n)?;
        self.cache.insert((k, n), s.clone());
        Ok(s)
    }

    fn build(&mut self, plan: Plan, k: usize, n: usize) -> Result<ThresholdSystem> {
        match plan {
            Plan::Single => build_single(n),
            Plan::Direct => build_direct(k, n),
            Plan::TwoOfN => build_2_of_n(n),
            Plan::Bose => {
                let v = bose_order(n as u64) as u32;
                system_from_triads(&bose_triples(v)?[..n], 6 * v + 3)
            }
            Plan::Skolem => {
                let mu = skolem_order(n as u64) as u32;
                system_from_triads(&skolem_triples(mu)?[..n], 6 * mu + 1)
            }
            Plan::Split => self.split(k, n),
        }
    }

    fn split(&mut self, k: usize, n: usize) -> Result<ThresholdSystem> {
        let (n0, n1) = split_sizes(n as u64);
        let (n0, n1) = (n0 as usize, n1 as usize);
        let whole = self.best(k, n0)?;
        let pairs = (1..k)
            .map(|i| Ok((self.best(i, n0)?, self.best(k - i, n1)?)))
            .collect::<Result<Vec<_>>>()?;
        compose(&whole, &pairs, n0, n1)
    }
}

/// `OR(whole, AND(g_1, h_1), ...)` where G members hold their keys of `whole`
/// and every `g_i`, and H member `j` holds G member `j`'s keys of `whole` and
/// its keys of every `h_i`.
pub fn compose(
    whole: &ThresholdSystem,
    pairs: &[(ThresholdSystem, ThresholdSystem)],
    n0: usize,
    n1: usize,
) -> Result<ThresholdSystem> {
    if whole.participants() != n0 || n1 > n0 {
        return Err(Error::parameter(
            "group sizes do not match the inner system",
        ));
    }
    if let Some((g, h)) = pairs
        .iter()
        .find(|(g, h)| g.participants() != n0 || h.participants() != n1)
    {
        return Err(Error::parameter(format!(
            "subsystems over {} and {} participants, expected {n0} and {n1}",
            g.participants(),
            h.participants()
        )));
    }
    let total: usize = whole.padlock_count()
        + pairs
            .iter()
            .map(|(g, h)| g.padlock_count() + h.padlock_count())
            .sum::<usize>();
    let mut b = CircuitBuilder::new(total as u32);
    let mut g_keys: Vec<Vec<u32>> = vec![Vec::new(); n0];
    let mut h_keys: Vec<Vec<u32>> = vec![Vec::new(); n1];
    let mut offset = 0u32;
    let mut place =
        |b: &mut CircuitBuilder, s: &ThresholdSystem, owners: &mut [Vec<u32>]| -> Result<_> {
            let node = b.embed(s.circuit(), offset)?;
            for (p, ks) in owners.iter_mut().enumerate() {
                ks.extend(s.keys().keys_of(p).iter().map(|id| id.0 + offset));
            }
            offset += s.padlock_count() as u32;
            Ok(node)
        };
    let mut branches = vec![place(&mut b, whole, &mut g_keys)?];
    for (j, keys) in h_keys.iter_mut().enumerate() {
        keys.extend(whole.keys().keys_of(j).iter().map(|id| id.0));
    }
    for (g, h) in pairs {
        let left = place(&mut b, g, &mut g_keys)?;
        let right = place(&mut b, h, &mut h_keys)?;
        branches.push(b.and(vec![left, right])?);
    }
    let root = b.or(branches)?;
    let keys = KeyDistribution::new(
        g_keys
            .into_iter()
            .chain(h_keys)
            .map(|ks| ks.into_iter().map(PadlockId).collect())
            .collect(),
    );
    ThresholdSystem::new(b.finish(root), keys)
}
