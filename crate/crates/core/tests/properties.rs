use itertools::Itertools;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padlock_core::bounds::lower_bound;
use padlock_core::constructions::*;
use padlock_core::knots::{build_knot, KnotWord, Symbol, Token};
use padlock_core::model::{
    AccessStructure, CircuitBuilder, DeviceCircuit, KeyDistribution, NodeId, PadlockId, PadlockSet,
    ThresholdSystem,
};
use padlock_core::sharing::{deal, min_field_size, reconstruct, ReplaySource, RngSource};
use padlock_core::verifier::{check_necessary_condition, check_sperner, verify_threshold};

#[derive(Debug, Clone)]
struct GateSpec {
    weighted: bool,
    required: u32,
    picks: Vec<(usize, u32)>,
}

fn gate_spec() -> impl Strategy<Value = GateSpec> {
    (
        any::<bool>(),
        0u32..8,
        prop::collection::vec((0usize..64, 1u32..4), 1..5),
    )
        .prop_map(|(weighted, required, picks)| GateSpec {
            weighted,
            required,
            picks,
        })
}

fn circuit_strategy() -> impl Strategy<Value = DeviceCircuit> {
    (1u32..7, prop::collection::vec(gate_spec(), 1..7)).prop_map(|(padlocks, specs)| {
        let mut b = CircuitBuilder::new(padlocks);
        let mut nodes: Vec<NodeId> = b.locks((0..padlocks).map(PadlockId)).unwrap();
        for spec in specs {
            let mut picks: Vec<(NodeId, u32)> = spec
                .picks
                .iter()
                .map(|(i, w)| (nodes[i % nodes.len()], *w))
                .collect();
            picks.sort_by_key(|p| p.0);
            picks.dedup_by_key(|p| p.0);
            let children: Vec<NodeId> = picks.iter().map(|p| p.0).collect();
            let node = if spec.weighted {
                let weights: Vec<u32> = picks.iter().map(|p| p.1).collect();
                let total: u32 = weights.iter().sum();
                b.weighted(1 + spec.required % total, weights, children)
                    .unwrap()
            } else {
                let m = 1 + spec.required as usize % children.len();
                b.threshold(m, children).unwrap()
            };
            nodes.push(node);
        }
        b.finish(*nodes.last().unwrap())
    })
}

fn set_from_mask(mask: u32, padlocks: usize) -> PadlockSet {
    (0..padlocks)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| PadlockId(i as u32))
        .collect()
}

proptest! {
    #[test]
    fn evaluation_is_monotone(c in circuit_strategy(), a in any::<u32>(), b in any::<u32>()) {
        let p = c.padlocks();
        let small = a & b;
        let big = a | b;
        if c.evaluate(&set_from_mask(small, p)) {
            prop_assert!(c.evaluate(&set_from_mask(big, p)));
        }
    }

    #[test]
    fn all_opens_none_closes(c in circuit_strategy()) {
        prop_assert!(c.evaluate(&PadlockSet::full(c.padlocks())));
        prop_assert!(!c.evaluate(&PadlockSet::new()));
    }

    #[test]
    fn access_structure_matches_opening(c in circuit_strategy()) {
        let n = c.padlocks();
        let used = c.used_padlocks();
        let keys = KeyDistribution::from_lists((0..n as u32).map(|i| if used.contains(PadlockId(i)) { vec![i] } else { vec![] }));
        let s = ThresholdSystem::new(c, keys).unwrap();
        let a = s.realized_access_structure().unwrap();
        prop_assert!(a.is_antichain());
        for mask in 0u64..1 << n {
            let coalition: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            prop_assert_eq!(a.authorizes(&coalition), s.coalition_open(&coalition).unwrap());
        }
    }

    #[test]
    fn sharing_mirrors_opening(c in circuit_strategy(), secret in any::<u64>(), seed in any::<u64>()) {
        let q = min_field_size(&c);
        let secret = secret % q;
        let d = deal(&c, secret, q, &mut RngSource(ChaCha8Rng::seed_from_u64(seed))).unwrap();
        let replay = deal(&c, secret, q, &mut ReplaySource::new(d.transcript.clone())).unwrap();
        prop_assert_eq!(&replay, &d);
        for mask in 0u32..1 << c.padlocks() {
            let opened = set_from_mask(mask, c.padlocks());
            let shares: Vec<_> = d.shares.iter().filter(|s| opened.contains(PadlockId(s.padlock))).cloned().collect();
            let got = reconstruct(&c, &shares, q).unwrap();
            prop_assert_eq!(got.is_some(), c.evaluate(&opened));
            if let Some(v) = got {
                prop_assert_eq!(v, secret);
            }
        }
    }

    #[test]
    fn reduction_is_confluent(raw in prop::collection::vec((0u32..4, any::<bool>()), 0..40), opened in 0u64..8, seed in any::<u64>()) {
        let tokens: Vec<Token> = raw
            .iter()
            .map(|(s, inv)| Token { symbol: if *s == 3 { Symbol::Ring } else { Symbol::Gen(*s) }, inverse: *inv })
            .collect();
        let word = KnotWord::new(3, tokens.clone()).unwrap();
        let set: Vec<usize> = (0..3).filter(|i| opened & (1 << i) != 0).collect();
        let canonical = word.reduce(&set);
        prop_assert_eq!(canonical.reduce(&set), canonical.clone());

        // Cancel adjacent inverse pairs in random order until none remain.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w: Vec<Token> = tokens
            .into_iter()
            .filter(|t| !matches!(t.symbol, Symbol::Gen(i) if set.contains(&(i as usize))))
            .collect();
        loop {
            let spots: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i + 1] == w[i].inv()).collect();
            let Some(&i) = spots.choose(&mut rng) else { break };
            w.drain(i..i + 2);
        }
        prop_assert_eq!(w, canonical.tokens().to_vec());
    }

    #[test]
    fn threshold_equals_unit_weights(c in 1usize..=10, m in 1usize..=10) {
        let m = 1 + (m - 1) % c;
        let mut b = CircuitBuilder::new(c as u32);
        let leaves = b.locks((0..c as u32).map(PadlockId)).unwrap();
        let root = b.threshold(m, leaves).unwrap();
        let plain = b.finish(root);
        let mut b = CircuitBuilder::new(c as u32);
        let leaves = b.locks((0..c as u32).map(PadlockId)).unwrap();
        let root = b.weighted(m as u32, vec![1; c], leaves).unwrap();
        let weighted = b.finish(root);
        for mask in 0u32..1 << c {
            let s = set_from_mask(mask, c);
            prop_assert_eq!(plain.evaluate(&s), weighted.evaluate(&s));
        }
    }
}

fn fixtures() -> Vec<(String, ThresholdSystem, usize)> {
    let mut out = Vec::new();
    for n in 2..=12 {
        out.push((format!("two {n}"), build_2_of_n(n).unwrap(), 2));
        out.push((format!("daisy {n}"), build_double_daisy(n).unwrap(), 2));
    }
    for n in 3..=12 {
        out.push((format!("bose {n}"), build_3_of_n(n).unwrap(), 3));
        out.push((format!("skolem {n}"), build_3_of_n_skolem(n).unwrap(), 3));
    }
    for n in 5..=13 {
        out.push((
            format!("eleven-key {n}"),
            fixture_eleven_keys(n).unwrap(),
            3,
        ));
    }
    for n in 2..=12 {
        for k in 2..=n {
            out.push((
                format!("recursive {k} {n}"),
                build_recursive(k, n).unwrap(),
                k,
            ));
        }
    }
    for n in 1..=8 {
        for k in 1..=n {
            out.push((format!("direct {k} {n}"), build_direct(k, n).unwrap(), k));
        }
    }
    out
}

#[test]
fn fixtures_verify_and_satisfy_necessary_conditions() {
    for (name, s, k) in fixtures() {
        let report = verify_threshold(&s, k).unwrap();
        assert!(report.verdict, "{name}");
        if k >= 2 {
            assert!(check_sperner(s.keys()).antichain, "{name}");
        }
        if k >= 3 && s.padlock_count() < s.participants() {
            assert!(
                check_necessary_condition(s.keys(), k).unwrap().holds,
                "{name}"
            );
        }
        let n = s.participants();
        if k >= 2 && n <= 12 {
            assert!(
                lower_bound(k as u64, n as u64).unwrap() <= s.padlock_count() as u64,
                "{name}"
            );
        }
    }
}

#[test]
fn verifier_agrees_with_access_structure() {
    for (name, s, k) in fixtures().into_iter().filter(|f| f.1.participants() <= 10) {
        let a = s.realized_access_structure().unwrap();
        for j in 1..=s.participants() {
            let verdict = verify_threshold(&s, j).unwrap().verdict;
            assert_eq!(
                verdict,
                a == AccessStructure::threshold(j, s.participants()),
                "{name} j={j}"
            );
            assert_eq!(verdict, j == k, "{name} j={j}");
        }
    }
}

#[test]
fn sharing_matches_opening_on_fixtures() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, s, _) in fixtures().into_iter().filter(|f| f.1.participants() <= 8) {
        let q = min_field_size(s.circuit());
        let d = deal(s.circuit(), q - 1, q, &mut RngSource(&mut rng)).unwrap();
        for coalition in (0..s.participants()).powerset() {
            let opened = s.opened_by(&coalition).unwrap();
            let shares: Vec<_> = d
                .shares
                .iter()
                .filter(|x| opened.contains(PadlockId(x.padlock)))
                .cloned()
                .collect();
            let got = reconstruct(s.circuit(), &shares, q).unwrap();
            let expected = s.coalition_open(&coalition).unwrap().then_some(q - 1);
            assert_eq!(got, expected, "{name} {coalition:?}");
        }
    }
}

#[test]
fn any_threshold_subset_interpolates_alike() {
    let c = padlock_core::model::threshold_device(3, 6).unwrap();
    let d = deal(&c, 4, 7, &mut ReplaySource::new(vec![5, 2])).unwrap();
    for subset in d.shares.iter().cloned().combinations(3) {
        assert_eq!(reconstruct(&c, &subset, 7).unwrap(), Some(4));
    }
}

#[test]
fn knots_are_monotone_and_balanced() {
    for n in 1..=6usize {
        for k in 1..=n {
            let w = build_knot(k, n).unwrap();
            let open: Vec<bool> = (0u64..1 << n)
                .map(|m| w.is_open(&(0..n).filter(|i| m & (1 << i) != 0).collect::<Vec<_>>()))
                .collect();
            for a in 0..1usize << n {
                for b in 0..1usize << n {
                    if a & b == a && open[a] {
                        assert!(open[b], "k={k} n={n} {a:b} {b:b}");
                    }
                }
            }
            if k < n {
                assert_eq!(w.len() % 2, 0);
                assert!(w.occurrences().iter().all(|c| *c >= 2));
            }
        }
    }
}

#[test]
fn bose_pairs_never_cover_a_triple() {
    for v in 1..=2 {
        assert!(padlock_core::verifier::six_key_triples_beyond_pairs(
            &bose_triples(v).unwrap()
        ));
    }
    assert!(padlock_core::verifier::six_key_triples_beyond_pairs(
        &nine_point_triads()
    ));
    assert!(padlock_core::verifier::six_key_triples_beyond_pairs(
        &eleven_key_triads()
    ));
}

#[test]
fn two_of_n_hyperedges_are_distinct() {
    for n in 2..=64 {
        let s = build_2_of_n(n).unwrap();
        let sets: Vec<_> = s.keys().iter().collect();
        assert_eq!(sets.iter().unique().count(), n);
        assert!(check_sperner(s.keys()).antichain);
    }
}
