//! Lower and upper bounds on the minimal number of padlocks of a k-out-of-n
//! threshold system, and exact cost counters for the constructions.
//!
//! All arithmetic is exact: binomials and wrapping counts use big integers.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Smallest `t` with `C(t, floor(t/2)) >= n`: the size of the smallest ground
/// set carrying an antichain of `n` sets.
pub fn sperner_min_t(n: u64) -> u64 {
    let target = BigUint::from(n);
    (1..)
        .find(|&t| binomial(t, t / 2) >= target)
        .expect("binomials are unbounded")
}

/// `ceil(log2(n))` for `n >= 1`.
pub fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(64 - (n - 1).leading_zeros())
    }
}

/// Padlocks of the double daisy chain, `2 ceil(log2 n)`.
pub fn daisy_padlocks(n: u64) -> u64 {
    2 * ceil_log2(n)
}

/// Johnson's upper bound on the number of blocks of size `k` in a pair
/// packing of `t` points, `floor(t/k * floor((t-1)/(k-1)))`.
pub fn johnson_bound(t: u64, k: u64) -> u64 {
    assert!(k >= 2, "block size must be at least 2");
    if t == 0 {
        return 0;
    }
    t * ((t - 1) / (k - 1)) / k
}

/// Smallest `v` such that the Bose system on `6v + 3` points has at least `n`
/// triads.
pub fn bose_order(n: u64) -> u64 {
    (0..)
        .find(|v| (2 * v + 1) * (3 * v + 1) >= n)
        .expect("unbounded")
}

/// Padlocks of the Bose-based 3-out-of-n system, `6 ceil((sqrt(24n+1)-5)/12) + 3`.
pub fn bose_padlocks(n: u64) -> u64 {
    6 * bose_order(n) + 3
}

/// Smallest `mu` such that a triple system on `6 mu + 1` points has at least
/// `n` triads.
pub fn skolem_order(n: u64) -> u64 {
    (0..).find(|m| m * (6 * m + 1) >= n).expect("unbounded")
}

/// Padlocks of the 3-out-of-n system on a `6 mu + 1` point triple system,
/// `6 ceil((sqrt(24n+1)-1)/12) + 1`.
pub fn skolem_padlocks(n: u64) -> u64 {
    6 * skolem_order(n) + 1
}

/// Length of the knotted word for a k-out-of-n system.
pub fn knot_wrapping_count(k: u64, n: u64) -> Result<BigUint> {
    if k == 0 || k > n {
        return Err(Error::parameter(format!("threshold {k} outside 1..={n}")));
    }
    let mut memo = HashMap::new();
    Ok(wrappings(k, n, &mut memo))
}

fn wrappings(k: u64, n: u64, memo: &mut HashMap<(u64, u64), BigUint>) -> BigUint {
    if k == n {
        return BigUint::from(n);
    }
    if k + 1 == n {
        return BigUint::from(2 * n);
    }
    if let Some(w) = memo.get(&(k, n)) {
        return w.clone();
    }
    let w = if k == 1 {
        (BigUint::one() + wrappings(1, n - 1, memo)) * 2u32
    } else {
        (BigUint::from(3u32) + wrappings(k - 1, n - 1, memo) + wrappings(k, n - 1, memo)) * 2u32
    };
    memo.insert((k, n), w.clone());
    w
}

/// The construction used for a k-out-of-n subsystem of the recursive scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plan {
    /// One padlock whose key everybody holds.
    Single,
    /// One padlock per participant behind a k-out-of-n device.
    Direct,
    /// Shared-key 2-out-of-n system on the minimal Sperner ground set.
    TwoOfN,
    /// 3-out-of-n system on Bose triads.
    Bose,
    /// 3-out-of-n system on a `6 mu + 1` point triple system.
    Skolem,
    /// Split into two halves with OR/AND composition.
    Split,
}

/// Chooses between constructions by padlock count and memoizes the counts.
#[derive(Debug, Default)]
pub struct RecursivePlanner {
    padlocks: HashMap<(u64, u64), u64>,
    prefix_keys: HashMap<(u64, u64, u64), u64>,
}

pub fn split_sizes(n: u64) -> (u64, u64) {
    (n.div_ceil(2), n / 2)
}

impl RecursivePlanner {
    pub fn new() -> Self {
        Self::default()
    }

    /// Plan for the outermost system: 2-out-of-n and small systems directly,
    /// everything else split.
    pub fn top_plan(&self, k: u64, n: u64) -> Plan {
        if k == 2 {
            Plan::TwoOfN
        } else if k * (k + 1) / 2 >= n {
            Plan::Direct
        } else {
            Plan::Split
        }
    }

    /// Cheapest known plan for a subsystem; ties keep the earlier option.
    pub fn best_plan(&mut self, k: u64, n: u64) -> Plan {
        match k {
            1 => Plan::Single,
            2 => Plan::TwoOfN,
            _ => {
                let mut best = (n, Plan::Direct);
                if k == 3 {
                    for (cost, plan) in [
                        (bose_padlocks(n), Plan::Bose),
                        (skolem_padlocks(n), Plan::Skolem),
                    ] {
                        if cost < best.0 {
                            best = (cost, plan);
                        }
                    }
                }
                if k < n && k * (k + 1) / 2 < n {
                    let cost = self.split_padlocks(k, n);
                    if cost < best.0 {
                        best = (cost, Plan::Split);
                    }
                }
                best.1
            }
        }
    }

    pub fn plan_padlocks(&mut self, plan: Plan, k: u64, n: u64) -> u64 {
        match plan {
            Plan::Single => 1,
            Plan::Direct => n,
            Plan::TwoOfN => sperner_min_t(n),
            Plan::Bose => bose_padlocks(n),
            Plan::Skolem => skolem_padlocks(n),
            Plan::Split => self.split_padlocks(k, n),
        }
    }

    pub fn best_padlocks(&mut self, k: u64, n: u64) -> u64 {
        let plan = self.best_plan(k, n);
        self.plan_padlocks(plan, k, n)
    }

    fn split_padlocks(&mut self, k: u64, n: u64) -> u64 {
        if let Some(p) = self.padlocks.get(&(k, n)) {
            return *p;
        }
        let (n0, n1) = split_sizes(n);
        let mut total = self.best_padlocks(k, n0);
        for i in 1..k {
            total += self.best_padlocks(i, n0) + self.best_padlocks(k - i, n1);
        }
        self.padlocks.insert((k, n), total);
        total
    }

    /// Keys held by participants `0..m` of the system built by `plan`.
    pub fn plan_prefix_keys(&mut self, plan: Plan, k: u64, n: u64, m: u64) -> u64 {
        match plan {
            Plan::Single | Plan::Direct => m,
            Plan::TwoOfN => {
                let t = sperner_min_t(n);
                if t == n {
                    m
                } else {
                    m * (t / 2)
                }
            }
            Plan::Bose | Plan::Skolem => 3 * m,
            Plan::Split => self.split_prefix_keys(k, n, m),
        }
    }

    fn best_prefix_keys(&mut self, k: u64, n: u64, m: u64) -> u64 {
        let plan = self.best_plan(k, n);
        self.plan_prefix_keys(plan, k, n, m)
    }

    fn split_prefix_keys(&mut self, k: u64, n: u64, m: u64) -> u64 {
        if let Some(c) = self.prefix_keys.get(&(k, n, m)) {
            return *c;
        }
        let (n0, n1) = split_sizes(n);
        // Members of the first half come first; the second half repeats the
        // inner system's keys of its first n1 members.
        let g = m.min(n0);
        let h = m.saturating_sub(n0);
        let mut total = self.best_prefix_keys(k, n0, g) + self.best_prefix_keys(k, n0, h);
        for i in 1..k {
            total += self.best_prefix_keys(i, n0, g) + self.best_prefix_keys(k - i, n1, h);
        }
        self.prefix_keys.insert((k, n, m), total);
        total
    }
}

fn check_recursive_args(k: u64, n: u64) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::parameter(format!(
            "recursive scheme needs 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// Exact padlock count of the recursive k-out-of-n system, without building it.
pub fn recursive_padlock_count(k: u64, n: u64) -> Result<u64> {
    check_recursive_args(k, n)?;
    let mut planner = RecursivePlanner::new();
    let plan = planner.top_plan(k, n);
    Ok(planner.plan_padlocks(plan, k, n))
}

/// Exact average number of keys per participant of the recursive system.
pub fn recursive_key_average(k: u64, n: u64) -> Result<Ratio<u64>> {
    check_recursive_args(k, n)?;
    let mut planner = RecursivePlanner::new();
    let plan = planner.top_plan(k, n);
    Ok(Ratio::new(planner.plan_prefix_keys(plan, k, n, n), n))
}

/// Named lower-bound rules.
pub mod rules {
    pub const SINGLE_PADLOCK: &str = "single-padlock";
    pub const AT_LEAST_K: &str = "at-least-k";
    pub const TWO_NEEDS_FOUR: &str = "two-out-of-n-needs-four";
    pub const SPERNER: &str = "sperner";
    pub const SPERNER_EVEN: &str = "sperner-even";
    pub const TRIANGULAR: &str = "triangular";
}

/// Named constructions used as upper-bound witnesses.
pub mod witnesses {
    pub const SINGLE_PADLOCK: &str = "single-padlock";
    pub const DIRECT: &str = "direct";
    pub const TWO_OF_N: &str = "two-of-n";
    pub const DOUBLE_DAISY: &str = "double-daisy";
    pub const BOSE: &str = "bose";
    pub const SKOLEM: &str = "skolem";
    pub const RECURSIVE: &str = "recursive";
}

fn check_kn(k: u64, n: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::parameter(format!(
            "need 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    Ok(())
}

/// Every applicable lower-bound rule with its value.
pub fn lower_bound_rules(k: u64, n: u64) -> Result<Vec<(&'static str, u64)>> {
    check_kn(k, n)?;
    if k == 1 {
        return Ok(vec![(rules::SINGLE_PADLOCK, 1)]);
    }
    let mut out = vec![(rules::AT_LEAST_K, k)];
    if k == 2 && n >= 3 {
        out.push((rules::TWO_NEEDS_FOUR, if n == 3 { 3 } else { 4 }));
    }
    let t = sperner_min_t(n);
    out.push((rules::SPERNER, t));
    if k >= 3 && t % 2 == 0 && binomial(t, t / 2) == BigUint::from(n) {
        out.push((rules::SPERNER_EVEN, t + 1));
    }
    out.push((rules::TRIANGULAR, n.min(k * (k + 1) / 2)));
    Ok(out)
}

pub fn lower_bound(k: u64, n: u64) -> Result<u64> {
    Ok(lower_bound_rules(k, n)?
        .iter()
        .map(|(_, v)| *v)
        .max()
        .unwrap_or(1))
}

/// Padlock counts of every construction applicable to `(k, n)`, capped at `n`.
pub fn construction_costs(k: u64, n: u64) -> Result<Vec<(&'static str, u64)>> {
    check_kn(k, n)?;
    let mut out = vec![(witnesses::DIRECT, n)];
    match k {
        1 => out.push((witnesses::SINGLE_PADLOCK, 1)),
        2 => {
            out.push((witnesses::TWO_OF_N, sperner_min_t(n)));
            out.push((witnesses::DOUBLE_DAISY, daisy_padlocks(n).max(2)));
        }
        3 => {
            out.push((witnesses::BOSE, bose_padlocks(n)));
            out.push((witnesses::SKOLEM, skolem_padlocks(n)));
        }
        _ => {}
    }
    if k >= 3 && k * (k + 1) / 2 < n {
        out.push((witnesses::RECURSIVE, recursive_padlock_count(k, n)?));
    }
    Ok(out.into_iter().map(|(name, c)| (name, c.min(n))).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundResult {
    pub lower: u64,
    pub upper: u64,
    pub lower_witnesses: Vec<String>,
    pub upper_witness: String,
    pub k: u64,
    pub n: u64,
}

impl BoundResult {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Best known lower and upper bounds on the minimal padlock count.
pub fn best_known(k: u64, n: u64) -> Result<BoundResult> {
    let lower_rules = lower_bound_rules(k, n)?;
    let lower = lower_rules.iter().map(|(_, v)| *v).max().unwrap_or(1);
    let (upper_witness, upper) = construction_costs(k, n)?
        .into_iter()
        .fold(None::<(&str, u64)>, |best, (name, c)| match best {
            Some((_, b)) if b <= c => best,
            _ => Some((name, c)),
        })
        .expect("direct construction always applies");
    debug_assert!(
        lower <= upper,
        "lower bound {lower} above construction {upper} for ({k}, {n})"
    );
    Ok(BoundResult {
        lower,
        upper,
        lower_witnesses: lower_rules
            .iter()
            .filter(|(_, v)| *v == lower)
            .map(|(name, _)| name.to_string())
            .collect(),
        upper_witness: upper_witness.to_string(),
        k,
        n,
    })
}

/// One row of a bounds table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: u64,
    pub n: u64,
    pub at_least_k: u64,
    pub sperner: u64,
    pub triangular: u64,
    pub lower: u64,
    pub upper: u64,
    pub upper_witness: String,
}

fn row(k: u64, n: u64) -> Result<BoundRow> {
    let b = best_known(k, n)?;
    Ok(BoundRow {
        k,
        n,
        at_least_k: k,
        sperner: if k >= 2 { sperner_min_t(n) } else { 1 },
        triangular: n.min(k * (k + 1) / 2),
        lower: b.lower,
        upper: b.upper,
        upper_witness: b.upper_witness,
    })
}

/// Rows for `k = 1..=k_max` at fixed `n`.
pub fn table_for_n(n: u64, k_max: u64) -> Result<Vec<BoundRow>> {
    (1..=k_max.min(n)).map(|k| row(k, n)).collect()
}

/// Rows for `n = k..=n_max` at fixed `k`.
pub fn table_for_k(k: u64, n_max: u64) -> Result<Vec<BoundRow>> {
    (k.max(1)..=n_max).map(|n| row(k, n)).collect()
}

/// `recursive_padlock_count(k, n) / log2(n)^(k-1)` as a float, for asymptotic checks.
pub fn recursive_count_ratio(k: u64, n: u64) -> Result<f64> {
    let count = recursive_padlock_count(k, n)?.to_f64().unwrap_or(f64::NAN);
    Ok(count / (n as f64).log2().powi(k as i32 - 1))
}
