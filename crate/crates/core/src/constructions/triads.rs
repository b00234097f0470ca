//! 3-out-of-n systems on Steiner triple systems.
//!
//! Keys are numbered `1..=t` in the triad lists and map to padlock ids
//! `0..t`. Three holders of distinct triads own at least six keys, and exactly
//! six only when their triads pairwise meet without a common key. The device
//! therefore opens on any seven keys or on the six-key union of such a triple.

use std::collections::HashMap;

use crate::bounds::{bose_order, bose_padlocks, skolem_order, skolem_padlocks};
use crate::constructions::basic::build_direct;
use crate::error::{Error, Result};
use crate::model::{CircuitBuilder, KeyDistribution, PadlockId, ThresholdSystem};
use crate::verifier::Triad;

/// Steiner triple system on `6v + 3` points.
pub fn bose_triples(v: u32) -> Result<Vec<Triad>> {
    if v == 0 {
        return Err(Error::parameter("Bose construction needs v >= 1"));
    }
    let m = 2 * v + 1;
    let half = m.div_ceil(2);
    let mut out = Vec::with_capacity((m * (3 * m - 1) / 2) as usize);
    for x in 1..=m {
        out.push([x, x + m, x + 2 * m]);
    }
    for x in 1..=m {
        for y in x + 1..=m {
            let c = ((x + y) * half + m - 1) % m;
            for k in 0..3 {
                out.push([x + k * m, y + k * m, 1 + c + ((k + 1) % 3) * m]);
            }
        }
    }
    Ok(out)
}

/// Steiner triple system on `6 mu + 1` points, built from the half-idempotent
/// commutative quasigroup on `Z_{2 mu}`.
pub fn skolem_triples(mu: u32) -> Result<Vec<Triad>> {
    if mu == 0 {
        return Err(Error::parameter("Skolem construction needs mu >= 1"));
    }
    let q = 2 * mu;
    let point = |x: u32, i: u32| 1 + x + q * (i % 3);
    let infinity = 3 * q + 1;
    let op = |x: u32, y: u32| {
        let s = (x + y) % q;
        if s % 2 == 0 {
            s / 2
        } else {
            mu + s / 2
        }
    };
    let mut out = Vec::with_capacity((mu * (6 * mu + 1)) as usize);
    for x in 0..mu {
        out.push([point(x, 0), point(x, 1), point(x, 2)]);
    }
    for x in 0..mu {
        for i in 0..3 {
            out.push([infinity, point(mu + x, i), point(x, i + 1)]);
        }
    }
    for x in 0..q {
        for y in x + 1..q {
            for i in 0..3 {
                out.push([point(x, i), point(y, i), point(op(x, y), i + 1)]);
            }
        }
    }
    Ok(out)
}

/// Maximal packing of order 9 with 12 blocks.
pub fn nine_point_triads() -> Vec<Triad> {
    vec![
        [1, 4, 7],
        [2, 5, 8],
        [3, 6, 9],
        [1, 2, 6],
        [4, 5, 9],
        [3, 7, 8],
        [1, 3, 5],
        [4, 6, 8],
        [2, 7, 9],
        [2, 3, 4],
        [5, 6, 7],
        [1, 8, 9],
    ]
}

/// Thirteen triads over 11 keys.
pub fn eleven_key_triads() -> Vec<Triad> {
    vec![
        [1, 2, 3],
        [1, 4, 5],
        [1, 6, 7],
        [1, 8, 9],
        [1, 10, 11],
        [2, 4, 6],
        [2, 5, 7],
        [2, 8, 10],
        [2, 9, 11],
        [3, 4, 7],
        [3, 5, 6],
        [3, 8, 11],
        [3, 9, 10],
    ]
}

fn sorted(t: &Triad) -> Triad {
    let mut s = *t;
    s.sort_unstable();
    s
}

/// Six-key triples of a pair packing, found through its pair index.
///
/// Requires every pair of keys to lie in at most one triad. Indices are
/// increasing within each triple and the list is sorted.
pub fn six_key_triples_indexed(triads: &[Triad]) -> Vec<[usize; 3]> {
    let mut by_pair: HashMap<(u32, u32), usize> = HashMap::new();
    let triads: Vec<Triad> = triads.iter().map(sorted).collect();
    for (i, [a, b, c]) in triads.iter().enumerate() {
        for pair in [(*a, *b), (*a, *c), (*b, *c)] {
            by_pair.insert(pair, i);
        }
    }
    let mut out = Vec::new();
    for a in 0..triads.len() {
        for b in a + 1..triads.len() {
            let common: Vec<u32> = triads[a]
                .iter()
                .filter(|x| triads[b].contains(x))
                .copied()
                .collect();
            if common.len() != 1 {
                continue;
            }
            for x in triads[a].iter().filter(|x| **x != common[0]) {
                for y in triads[b].iter().filter(|y| **y != common[0]) {
                    let pair = (*x.min(y), *x.max(y));
                    if let Some(&c) = by_pair.get(&pair) {
                        if c > b && !triads[c].contains(&common[0]) {
                            out.push([a, b, c]);
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// 3-out-of-n system handing triad `i` to participant `i`, over `padlocks`
/// keys numbered from 1. Correct when the triads form a pair packing.
pub fn system_from_triads(triads: &[Triad], padlocks: u32) -> Result<ThresholdSystem> {
    if triads.len() < 3 {
        return Err(Error::parameter("a 3-out-of-n triad system needs n >= 3"));
    }
    if let Some(bad) = triads
        .iter()
        .find(|t| t.iter().any(|x| *x == 0 || *x > padlocks))
    {
        return Err(Error::parameter(format!(
            "triad {bad:?} outside keys 1..={padlocks}"
        )));
    }
    let mut b = CircuitBuilder::new(padlocks);
    let all = b.locks((0..padlocks).map(PadlockId))?;
    let mut branches = vec![b.threshold(7.min(padlocks as usize), all)?];
    for [x, y, z] in six_key_triples_indexed(triads) {
        let mut keys: Vec<u32> = [triads[x], triads[y], triads[z]]
            .iter()
            .flatten()
            .map(|k| k - 1)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let leaves = b.locks(keys.into_iter().map(PadlockId))?;
        branches.push(b.and(leaves)?);
    }
    let root = b.or(branches)?;
    let keys = KeyDistribution::from_lists(triads.iter().map(|t| t.map(|k| k - 1)));
    ThresholdSystem::new(b.finish(root), keys)
}

/// 3-out-of-n on the first `n` Bose triads; the direct device when that is
/// not smaller.
pub fn build_3_of_n(n: usize) -> Result<ThresholdSystem> {
    if n < 3 {
        return build_direct(3, n);
    }
    if bose_padlocks(n as u64) >= n as u64 {
        return build_direct(3, n);
    }
    let v = bose_order(n as u64) as u32;
    let triads = bose_triples(v)?;
    system_from_triads(&triads[..n], 6 * v + 3)
}

/// 3-out-of-n on the first `n` triads of the `6 mu + 1` point system; the
/// direct device when that is not smaller.
pub fn build_3_of_n_skolem(n: usize) -> Result<ThresholdSystem> {
    if n < 3 {
        return build_direct(3, n);
    }
    if skolem_padlocks(n as u64) >= n as u64 {
        return build_direct(3, n);
    }
    let mu = skolem_order(n as u64) as u32;
    let triads = skolem_triples(mu)?;
    system_from_triads(&triads[..n], 6 * mu + 1)
}

/// The 11-padlock device for the first `n >= 5` holders of [`eleven_key_triads`]:
/// seven keys, or six keys together with three of keys 8..11 or five of keys
/// 1..7.
pub fn fixture_eleven_keys(n: usize) -> Result<ThresholdSystem> {
    let triads = eleven_key_triads();
    if !(5..=triads.len()).contains(&n) {
        return Err(Error::parameter(format!(
            "fixture has 5..=13 participants, got {n}"
        )));
    }
    let mut b = CircuitBuilder::new(11);
    let all = b.locks((0..11).map(PadlockId))?;
    let seven = b.threshold(7, all.clone())?;
    let six = b.threshold(6, all.clone())?;
    let high = b.threshold(3, all[7..].to_vec())?;
    let low = b.threshold(5, all[..7].to_vec())?;
    let either = b.or(vec![high, low])?;
    let guarded = b.and(vec![six, either])?;
    let root = b.or(vec![seven, guarded])?;
    let keys = KeyDistribution::from_lists(triads[..n].iter().map(|t| t.map(|k| k - 1)));
    ThresholdSystem::new(b.finish(root), keys)
}

/// 3-out-of-13 with 11 padlocks.
pub fn fixture_13_participants() -> Result<ThresholdSystem> {
    fixture_eleven_keys(13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::johnson_bound;
    use crate::verifier::{
        check_packing, check_sperner, count_six_key_triples, six_key_pairs, six_key_triples,
        verify_threshold,
    };

    #[test]
    fn bose_sizes_and_packing() {
        for v in 1..=4 {
            let t = bose_triples(v).unwrap();
            let m = 2 * v + 1;
            assert_eq!(t.len() as u32, m * (3 * m - 1) / 2);
            assert!(check_packing(&t, 2, 1).unwrap(), "v={v}");
            let points = 6 * v + 3;
            assert_eq!(t.len() as u64, johnson_bound(points as u64, 3));
            assert!(t.iter().flatten().all(|x| (1..=points).contains(x)));
        }
        assert!(bose_triples(0).is_err());
    }

    #[test]
    fn skolem_sizes_and_packing() {
        for mu in 1..=4 {
            let t = skolem_triples(mu).unwrap();
            assert_eq!(t.len() as u32, mu * (6 * mu + 1));
            assert!(check_packing(&t, 2, 1).unwrap(), "mu={mu}");
            let points = 6 * mu + 1;
            assert_eq!(t.len() as u64, johnson_bound(points as u64, 3));
        }
    }

    #[test]
    fn table_counts() {
        let t1 = nine_point_triads();
        assert!(check_packing(&t1, 2, 1).unwrap());
        assert_eq!(count_six_key_triples(&t1), 72);
        let t2 = eleven_key_triads();
        assert!(check_packing(&t2, 2, 1).unwrap());
        assert_eq!(count_six_key_triples(&t2), 56);
        assert_eq!(six_key_pairs(&t2).len(), 24);
        assert_eq!(count_six_key_triples(&bose_triples(1).unwrap()), 72);
    }

    #[test]
    fn indexed_enumeration_matches_brute_force() {
        let mut cases = vec![
            nine_point_triads(),
            eleven_key_triads(),
            bose_triples(2).unwrap(),
            skolem_triples(2).unwrap(),
        ];
        cases.push(bose_triples(2).unwrap()[..20].to_vec());
        for triads in cases {
            assert_eq!(six_key_triples_indexed(&triads), six_key_triples(&triads));
        }
    }

    #[test]
    fn bose_twelve() {
        let s = build_3_of_n(12).unwrap();
        assert_eq!((s.padlock_count(), s.key_count()), (9, 36));
        assert_eq!(s.circuit().latch_count(), 82);
        assert!(verify_threshold(&s, 3).unwrap().verdict);
        let s = build_3_of_n(11).unwrap();
        assert_eq!(s.padlock_count(), 9);
        assert!(verify_threshold(&s, 3).unwrap().verdict);
        assert_eq!(build_3_of_n(3).unwrap(), build_direct(3, 3).unwrap());
    }

    #[test]
    fn triad_systems_verify() {
        for n in 3..=16 {
            let s = build_3_of_n(n).unwrap();
            assert!(verify_threshold(&s, 3).unwrap().verdict, "bose n={n}");
            assert!(check_sperner(s.keys()).antichain);
            let s = build_3_of_n_skolem(n).unwrap();
            assert!(verify_threshold(&s, 3).unwrap().verdict, "skolem n={n}");
        }
        let s = build_3_of_n_skolem(13).unwrap();
        assert_eq!(s.padlock_count(), 13);
        let s = system_from_triads(&nine_point_triads(), 9).unwrap();
        assert!(verify_threshold(&s, 3).unwrap().verdict);
    }

    #[test]
    fn fixture_thirteen() {
        let s = fixture_13_participants().unwrap();
        assert_eq!((s.padlock_count(), s.key_count()), (11, 39));
        assert!(verify_threshold(&s, 3).unwrap().verdict);
        for n in 5..=12 {
            assert!(
                verify_threshold(&fixture_eleven_keys(n).unwrap(), 3)
                    .unwrap()
                    .verdict,
                "n={n}"
            );
        }
        assert!(fixture_eleven_keys(4).is_err());
    }
}
