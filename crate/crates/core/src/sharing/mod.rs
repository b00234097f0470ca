//! Secret sharing compiled from a device circuit.
//!
//! Every gate `m`-out-of-`c` at node secret `s` draws a polynomial of degree
//! `m - 1` with constant term `s` and hands `f(i)` to its `i`-th child. A
//! weighted child of weight `w` takes `w` consecutive points. A padlock leaf
//! keeps the value it receives, so a padlock reached along several paths
//! carries several values. Reconstruction interpolates bottom-up and succeeds
//! exactly when the circuit opens.

mod field;

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    parse_json, DeviceCircuit, Gate, NodeId, PadlockId, PadlockSet, ThresholdSystem,
};

pub use field::{is_prime, next_prime_above, PrimeField};

/// Supplier of the dealer's random polynomial coefficients.
pub trait CoefficientSource {
    /// A uniformly random element of `0..q`.
    fn next_coefficient(&mut self, q: u64) -> u64;
}

/// Coefficients drawn from a random number generator.
#[derive(Debug, Clone)]
pub struct RngSource<R>(pub R);

impl<R: Rng> CoefficientSource for RngSource<R> {
    fn next_coefficient(&mut self, q: u64) -> u64 {
        self.0.gen_range(0..q)
    }
}

/// Coefficients replayed from a recorded transcript.
#[derive(Debug, Clone)]
pub struct ReplaySource {
    values: Vec<u64>,
    next: usize,
}

impl ReplaySource {
    pub fn new(values: Vec<u64>) -> Self {
        ReplaySource { values, next: 0 }
    }
}

impl CoefficientSource for ReplaySource {
    fn next_coefficient(&mut self, q: u64) -> u64 {
        let v = self.values.get(self.next).copied().unwrap_or(0) % q;
        self.next += 1;
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Share {
    pub padlock: u32,
    /// Evaluation points from the root gate down to the leaf.
    pub point_path: Vec<u64>,
    pub value: u64,
}

/// All shares of one dealing with the coefficients it consumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dealing {
    pub q: u64,
    pub shares: Vec<Share>,
    pub transcript: Vec<u64>,
}

/// The shares a participant receives for the keys it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharePackage {
    pub participant: usize,
    pub shares: Vec<Share>,
}

/// Child list of a gate with weighted children repeated by weight.
fn expanded(gate: &Gate) -> Option<(u64, Vec<NodeId>)> {
    match gate {
        Gate::Lock(_) => None,
        Gate::Threshold { required, children } => Some((u64::from(*required), children.clone())),
        Gate::Weighted {
            required,
            weights,
            children,
        } => Some((
            u64::from(*required),
            children
                .iter()
                .zip(weights)
                .flat_map(|(c, w)| std::iter::repeat_n(*c, *w as usize))
                .collect(),
        )),
    }
}

/// Largest fan-in after expanding weighted children.
pub fn max_expanded_fan_in(circuit: &DeviceCircuit) -> u64 {
    circuit
        .gates()
        .iter()
        .filter_map(|g| expanded(g).map(|(_, ch)| ch.len() as u64))
        .max()
        .unwrap_or(0)
}

/// Smallest prime larger than every gate's fan-in.
pub fn min_field_size(circuit: &DeviceCircuit) -> u64 {
    next_prime_above(max_expanded_fan_in(circuit))
}

fn check_field(circuit: &DeviceCircuit, q: u64) -> Result<PrimeField> {
    let field = PrimeField::new(q)?;
    let need = min_field_size(circuit);
    if q < need {
        return Err(Error::capacity(format!(
            "field size {q} below the required {need}"
        )));
    }
    Ok(field)
}

struct Recorder<'a, S: CoefficientSource + ?Sized> {
    source: &'a mut S,
    transcript: Vec<u64>,
}

impl<S: CoefficientSource + ?Sized> Recorder<'_, S> {
    fn draw(&mut self, q: u64) -> u64 {
        let v = self.source.next_coefficient(q) % q;
        self.transcript.push(v);
        v
    }
}

/// Shares `secret` along every root-to-leaf path of `circuit`.
pub fn deal<S: CoefficientSource + ?Sized>(
    circuit: &DeviceCircuit,
    secret: u64,
    q: u64,
    source: &mut S,
) -> Result<Dealing> {
    let field = check_field(circuit, q)?;
    if secret >= q {
        return Err(Error::parameter(format!(
            "secret {secret} outside the field of size {q}"
        )));
    }
    let mut rec = Recorder {
        source,
        transcript: Vec::new(),
    };
    let mut shares = Vec::new();
    let mut path = Vec::new();
    deal_node(
        circuit,
        circuit.root(),
        secret,
        &field,
        &mut rec,
        &mut path,
        &mut shares,
    );
    Ok(Dealing {
        q,
        shares,
        transcript: rec.transcript,
    })
}

fn deal_node<S: CoefficientSource + ?Sized>(
    circuit: &DeviceCircuit,
    node: NodeId,
    value: u64,
    field: &PrimeField,
    rec: &mut Recorder<'_, S>,
    path: &mut Vec<u64>,
    shares: &mut Vec<Share>,
) {
    let gate = circuit.gate(node);
    let Some((required, children)) = expanded(gate) else {
        if let Gate::Lock(p) = gate {
            shares.push(Share {
                padlock: p.0,
                point_path: path.clone(),
                value,
            });
        }
        return;
    };
    let mut coefficients = vec![value];
    coefficients.extend((1..required).map(|_| rec.draw(field.modulus())));
    for (i, child) in children.iter().enumerate() {
        let x = i as u64 + 1;
        path.push(x);
        deal_node(
            circuit,
            *child,
            field.eval(&coefficients, x),
            field,
            rec,
            path,
            shares,
        );
        path.pop();
    }
}

/// Recovers the secret from the shares of opened padlocks, or `None` when
/// they do not open the circuit.
pub fn reconstruct(circuit: &DeviceCircuit, shares: &[Share], q: u64) -> Result<Option<u64>> {
    let field = check_field(circuit, q)?;
    let mut known: HashMap<&[u64], &Share> = HashMap::new();
    for s in shares {
        if s.value >= q {
            return Err(Error::Integrity(format!(
                "share value {} outside the field",
                s.value
            )));
        }
        match leaf_at(circuit, &s.point_path) {
            Some(p) if p == PadlockId(s.padlock) => {}
            _ => {
                return Err(Error::Integrity(format!(
                    "no leaf of padlock {} at point path {:?}",
                    s.padlock, s.point_path
                )))
            }
        }
        if let Some(prev) = known.insert(&s.point_path, s) {
            if prev.value != s.value {
                return Err(Error::Integrity(format!(
                    "conflicting values at point path {:?}",
                    s.point_path
                )));
            }
        }
    }
    let mut path = Vec::new();
    resolve(circuit, circuit.root(), &field, &known, &mut path)
}

fn leaf_at(circuit: &DeviceCircuit, path: &[u64]) -> Option<PadlockId> {
    let mut node = circuit.root();
    for x in path {
        let (_, children) = expanded(circuit.gate(node))?;
        node = *children.get((*x as usize).checked_sub(1)?)?;
    }
    match circuit.gate(node) {
        Gate::Lock(p) => Some(*p),
        _ => None,
    }
}

fn resolve(
    circuit: &DeviceCircuit,
    node: NodeId,
    field: &PrimeField,
    known: &HashMap<&[u64], &Share>,
    path: &mut Vec<u64>,
) -> Result<Option<u64>> {
    let Some((required, children)) = expanded(circuit.gate(node)) else {
        return Ok(known.get(path.as_slice()).map(|s| s.value));
    };
    let mut points = Vec::new();
    for (i, child) in children.iter().enumerate() {
        let x = i as u64 + 1;
        path.push(x);
        let v = resolve(circuit, *child, field, known, path)?;
        path.pop();
        if let Some(v) = v {
            points.push((x, v));
        }
    }
    if (points.len() as u64) < required {
        return Ok(None);
    }
    let basis = &points[..required as usize];
    for &(x, y) in &points[required as usize..] {
        if field.interpolate_at(basis, x)? != y {
            return Err(Error::Integrity(format!(
                "shares under point path {path:?} do not lie on one polynomial"
            )));
        }
    }
    field.interpolate_at_zero(basis).map(Some)
}

/// Shares held by each participant of `system`.
pub fn packages(system: &ThresholdSystem, dealing: &Dealing) -> Vec<SharePackage> {
    (0..system.participants())
        .map(|p| {
            let keys = system.keys().keys_of(p);
            SharePackage {
                participant: p,
                shares: dealing
                    .shares
                    .iter()
                    .filter(|s| keys.contains(&PadlockId(s.padlock)))
                    .cloned()
                    .collect(),
            }
        })
        .collect()
}

/// Shares of the padlocks a coalition can open.
pub fn coalition_shares(
    system: &ThresholdSystem,
    shares: &[Share],
    coalition: &[usize],
) -> Result<Vec<Share>> {
    let opened: PadlockSet = system.opened_by(coalition)?;
    Ok(shares
        .iter()
        .filter(|s| opened.contains(PadlockId(s.padlock)))
        .cloned()
        .collect())
}

/// Number of random coefficients one dealing over `circuit` consumes.
pub fn randomness_size(circuit: &DeviceCircuit) -> u64 {
    fn walk(c: &DeviceCircuit, node: NodeId, memo: &mut HashMap<NodeId, u64>) -> u64 {
        if let Some(v) = memo.get(&node) {
            return *v;
        }
        let v = match expanded(c.gate(node)) {
            None => 0,
            Some((m, ch)) => m - 1 + ch.iter().map(|x| walk(c, *x, memo)).sum::<u64>(),
        };
        memo.insert(node, v);
        v
    }
    walk(circuit, circuit.root(), &mut HashMap::new())
}

/// Default bound on `q^(randomness + 1)` for [`privacy_check`].
pub const DEFAULT_PRIVACY_BUDGET: u64 = 10_000_000;

/// Whether the shares of the `unauthorized` padlocks are identically
/// distributed for every secret, by enumerating all dealer randomness.
pub fn privacy_check(circuit: &DeviceCircuit, q: u64, unauthorized: &[PadlockId]) -> Result<bool> {
    privacy_check_with_budget(circuit, q, unauthorized, DEFAULT_PRIVACY_BUDGET)
}

pub fn privacy_check_with_budget(
    circuit: &DeviceCircuit,
    q: u64,
    unauthorized: &[PadlockId],
    budget: u64,
) -> Result<bool> {
    check_field(circuit, q)?;
    let r = randomness_size(circuit);
    let total = u32::try_from(r + 1)
        .ok()
        .and_then(|e| q.checked_pow(e))
        .filter(|t| *t <= budget)
        .ok_or_else(|| {
            Error::capacity(format!(
                "{q}^{} dealings exceed the budget of {budget}",
                r + 1
            ))
        })?;
    let per_secret = total / q;
    let mut reference: Option<BTreeMap<Vec<u64>, u64>> = None;
    for secret in 0..q {
        let mut views: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        for index in 0..per_secret {
            let coefficients: Vec<u64> = (0..r).map(|i| index / q.pow(i as u32) % q).collect();
            let dealing = deal(circuit, secret, q, &mut ReplaySource::new(coefficients))?;
            let view: Vec<u64> = dealing
                .shares
                .iter()
                .filter(|s| unauthorized.contains(&PadlockId(s.padlock)))
                .map(|s| s.value)
                .collect();
            *views.entry(view).or_default() += 1;
        }
        match &reference {
            None => reference = Some(views),
            Some(first) if *first != views => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// SHA-256 of the canonical JSON form of `circuit`, in hex.
pub fn circuit_hash(circuit: &DeviceCircuit) -> String {
    let doc = serde_json::to_string(&circuit.to_doc()).expect("circuit documents always serialize");
    hex::encode(Sha256::digest(doc.as_bytes()))
}

/// On-disk form of a dealing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShareFile {
    pub q: u64,
    pub circuit_hash: String,
    pub shares: Vec<Share>,
}

impl ShareFile {
    pub fn new(circuit: &DeviceCircuit, dealing: &Dealing) -> Self {
        ShareFile {
            q: dealing.q,
            circuit_hash: circuit_hash(circuit),
            shares: dealing.shares.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("share files always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    /// Errors unless the file was dealt for `circuit`.
    pub fn check_circuit(&self, circuit: &DeviceCircuit) -> Result<()> {
        if self.circuit_hash != circuit_hash(circuit) {
            return Err(Error::Integrity(
                "share file was dealt for a different circuit".into(),
            ));
        }
        Ok(())
    }
}
