//! Monotone threshold circuits over padlock leaves.
//!
//! A circuit is stored as an arena of gates in which every gate only refers to
//! gates created before it. The arena order is therefore a topological order
//! and evaluation is a single forward pass. Identical gates are interned, so a
//! padlock used under several parents is one shared leaf (one physical chain
//! running through several latches).

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense padlock identifier, `0 <= id < padlock count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PadlockId(pub u32);

impl PadlockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PadlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// A set of opened padlocks.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PadlockSet(FixedBitSet);

impl PadlockSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(padlocks: usize) -> Self {
        PadlockSet(FixedBitSet::with_capacity(padlocks))
    }

    pub fn insert(&mut self, id: PadlockId) {
        self.0.grow(id.index() + 1);
        self.0.insert(id.index());
    }

    pub fn contains(&self, id: PadlockId) -> bool {
        self.0.contains(id.index())
    }

    pub fn union_with(&mut self, other: &PadlockSet) {
        self.0.union_with(&other.0);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_subset(&self, other: &PadlockSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = PadlockId> + '_ {
        self.0.ones().map(|i| PadlockId(i as u32))
    }

    /// All padlocks `0..padlocks`.
    pub fn full(padlocks: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(padlocks);
        bits.insert_range(..);
        PadlockSet(bits)
    }
}

impl FromIterator<PadlockId> for PadlockSet {
    fn from_iter<I: IntoIterator<Item = PadlockId>>(iter: I) -> Self {
        let mut set = PadlockSet::new();
        for id in iter {
            set.insert(id);
        }
        set
    }
}

/// Index of a gate inside a [`DeviceCircuit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    Lock(PadlockId),
    /// Opens when at least `required` children are open.
    Threshold {
        required: u32,
        children: Vec<NodeId>,
    },
    /// Opens when the weights of the open children sum to at least `required`.
    Weighted {
        required: u32,
        weights: Vec<u32>,
        children: Vec<NodeId>,
    },
}

impl Gate {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Gate::Lock(_) => &[],
            Gate::Threshold { children, .. } | Gate::Weighted { children, .. } => children,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceCircuit {
    padlocks: u32,
    gates: Vec<Gate>,
    root: NodeId,
}

impl DeviceCircuit {
    /// Number of declared padlocks (leaves may use any id below this).
    pub fn padlocks(&self) -> usize {
        self.padlocks as usize
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn gate(&self, id: NodeId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Whether the door opens when exactly the padlocks in `opened` are open.
    pub fn evaluate(&self, opened: &PadlockSet) -> bool {
        let mut open = vec![false; self.gates.len()];
        for (i, gate) in self.gates.iter().enumerate() {
            open[i] = match gate {
                Gate::Lock(id) => opened.contains(*id),
                Gate::Threshold { required, children } => {
                    let mut count = 0u32;
                    for c in children {
                        if open[c.index()] {
                            count += 1;
                            if count >= *required {
                                break;
                            }
                        }
                    }
                    count >= *required
                }
                Gate::Weighted {
                    required,
                    weights,
                    children,
                } => {
                    let total: u64 = children
                        .iter()
                        .zip(weights)
                        .filter(|(c, _)| open[c.index()])
                        .map(|(_, w)| u64::from(*w))
                        .sum();
                    total >= u64::from(*required)
                }
            };
        }
        open[self.root.index()]
    }

    /// Padlocks that appear as a leaf somewhere below the root.
    pub fn used_padlocks(&self) -> PadlockSet {
        let mut seen = vec![false; self.gates.len()];
        let mut stack = vec![self.root];
        let mut used = PadlockSet::with_capacity(self.padlocks());
        while let Some(id) = stack.pop() {
            if std::mem::replace(&mut seen[id.index()], true) {
                continue;
            }
            match self.gate(id) {
                Gate::Lock(p) => used.insert(*p),
                gate => stack.extend_from_slice(gate.children()),
            }
        }
        used
    }

    /// Largest number of children of any gate reachable from the root.
    pub fn max_fan_in(&self) -> usize {
        self.gates
            .iter()
            .map(|g| g.children().len())
            .max()
            .unwrap_or(0)
    }

    /// Latches of the physical device: fan-ins of every gate, except plain
    /// conjunctions of padlocks, which are chains through their parent's latch.
    pub fn latch_count(&self) -> usize {
        self.gates
            .iter()
            .map(|g| match g {
                Gate::Lock(_) => 0,
                Gate::Threshold { required, children }
                    if *required as usize == children.len()
                        && children.len() > 1
                        && children
                            .iter()
                            .all(|c| matches!(self.gate(*c), Gate::Lock(_))) =>
                {
                    0
                }
                g => g.children().len(),
            })
            .sum()
    }

    /// Copy of this circuit with every padlock id shifted by `offset`.
    pub fn shifted(&self, offset: u32, padlocks: u32) -> Result<DeviceCircuit> {
        let mut builder = CircuitBuilder::new(padlocks);
        let root = builder.embed(self, offset)?;
        Ok(builder.finish(root))
    }
}

/// Incrementally builds an acyclic, validated [`DeviceCircuit`].
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    padlocks: u32,
    gates: Vec<Gate>,
    interned: HashMap<Gate, NodeId>,
}

impl CircuitBuilder {
    pub fn new(padlocks: u32) -> Self {
        CircuitBuilder {
            padlocks,
            gates: Vec::new(),
            interned: HashMap::new(),
        }
    }

    pub fn padlocks(&self) -> u32 {
        self.padlocks
    }

    fn push(&mut self, gate: Gate) -> NodeId {
        if let Some(id) = self.interned.get(&gate) {
            return *id;
        }
        let id = NodeId(self.gates.len() as u32);
        self.gates.push(gate.clone());
        self.interned.insert(gate, id);
        id
    }

    fn check_children(&self, children: &[NodeId]) -> Result<()> {
        if children.is_empty() {
            return Err(Error::structure("gate without children"));
        }
        if let Some(c) = children.iter().find(|c| c.index() >= self.gates.len()) {
            return Err(Error::structure(format!("unknown child node {}", c.0)));
        }
        Ok(())
    }

    pub fn lock(&mut self, id: PadlockId) -> Result<NodeId> {
        if id.0 >= self.padlocks {
            return Err(Error::structure(format!(
                "padlock {} not declared (circuit has {} padlocks)",
                id.0, self.padlocks
            )));
        }
        Ok(self.push(Gate::Lock(id)))
    }

    pub fn threshold(&mut self, required: usize, children: Vec<NodeId>) -> Result<NodeId> {
        self.check_children(&children)?;
        if required == 0 || required > children.len() {
            return Err(Error::structure(format!(
                "threshold {required} outside 1..={}",
                children.len()
            )));
        }
        Ok(self.push(Gate::Threshold {
            required: required as u32,
            children,
        }))
    }

    pub fn weighted(
        &mut self,
        required: u32,
        weights: Vec<u32>,
        children: Vec<NodeId>,
    ) -> Result<NodeId> {
        self.check_children(&children)?;
        if weights.len() != children.len() {
            return Err(Error::structure(format!(
                "{} weights for {} children",
                weights.len(),
                children.len()
            )));
        }
        if weights.contains(&0) {
            return Err(Error::structure("weights must be positive"));
        }
        let total: u64 = weights.iter().map(|w| u64::from(*w)).sum();
        if required == 0 || u64::from(required) > total {
            return Err(Error::structure(format!(
                "weighted threshold {required} outside 1..={total}"
            )));
        }
        Ok(self.push(Gate::Weighted {
            required,
            weights,
            children,
        }))
    }

    /// n-out-of-n over `children`; a single child is returned unchanged.
    pub fn and(&mut self, children: Vec<NodeId>) -> Result<NodeId> {
        if children.len() == 1 {
            return Ok(children[0]);
        }
        self.threshold(children.len(), children)
    }

    /// 1-out-of-n over `children`; a single child is returned unchanged.
    pub fn or(&mut self, children: Vec<NodeId>) -> Result<NodeId> {
        if children.len() == 1 {
            return Ok(children[0]);
        }
        self.threshold(1, children)
    }

    /// Leaves for a list of padlocks.
    pub fn locks<I>(&mut self, ids: I) -> Result<Vec<NodeId>>
    where
        I: IntoIterator<Item = PadlockId>,
    {
        ids.into_iter().map(|id| self.lock(id)).collect()
    }

    /// Copies `other` into this builder with padlock ids shifted by `offset`.
    pub fn embed(&mut self, other: &DeviceCircuit, offset: u32) -> Result<NodeId> {
        let mut map = Vec::with_capacity(other.gates.len());
        for gate in &other.gates {
            let id = match gate {
                Gate::Lock(p) => self.lock(PadlockId(p.0 + offset))?,
                Gate::Threshold { required, children } => {
                    let ch = children.iter().map(|c| map[c.index()]).collect();
                    self.threshold(*required as usize, ch)?
                }
                Gate::Weighted {
                    required,
                    weights,
                    children,
                } => {
                    let ch = children.iter().map(|c| map[c.index()]).collect();
                    self.weighted(*required, weights.clone(), ch)?
                }
            };
            map.push(id);
        }
        Ok(map[other.root.index()])
    }

    /// Finishes the circuit, keeping only gates reachable from `root`.
    pub fn finish(self, root: NodeId) -> DeviceCircuit {
        let mut reachable = vec![false; self.gates.len()];
        reachable[root.index()] = true;
        for i in (0..self.gates.len()).rev() {
            if reachable[i] {
                for c in self.gates[i].children() {
                    reachable[c.index()] = true;
                }
            }
        }
        let mut remap = vec![NodeId(u32::MAX); self.gates.len()];
        let mut gates = Vec::new();
        for (i, gate) in self.gates.into_iter().enumerate() {
            if !reachable[i] {
                continue;
            }
            let gate = match gate {
                Gate::Lock(p) => Gate::Lock(p),
                Gate::Threshold { required, children } => Gate::Threshold {
                    required,
                    children: children.iter().map(|c| remap[c.index()]).collect(),
                },
                Gate::Weighted {
                    required,
                    weights,
                    children,
                } => Gate::Weighted {
                    required,
                    weights,
                    children: children.iter().map(|c| remap[c.index()]).collect(),
                },
            };
            remap[i] = NodeId(gates.len() as u32);
            gates.push(gate);
        }
        DeviceCircuit {
            padlocks: self.padlocks,
            gates,
            root: remap[root.index()],
        }
    }
}

/// `required`-out-of-`padlocks` device with one padlock per latch.
pub fn threshold_device(required: usize, padlocks: u32) -> Result<DeviceCircuit> {
    let mut b = CircuitBuilder::new(padlocks);
    let leaves = b.locks((0..padlocks).map(PadlockId))?;
    let root = b.threshold(required, leaves)?;
    Ok(b.finish(root))
}
