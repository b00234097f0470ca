//! Knotted padlock systems as words in a free group.
//!
//! A wire wrapped around padlock shackles is a word over generators
//! `x1..xn` (one per padlock) and a ring `O` that can never be opened.
//! Opening a padlock sets its generator to the identity; the door opens when
//! the word then reduces to the empty word.
//!
//! Text form: whitespace-separated tokens `x3`, `x3'` (inverse), `O`, `O'`.

use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::vec_to_mask;
use crate::verifier::{verify_layers, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// Generator of padlock `i`, zero-based.
    Gen(u32),
    Ring,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub symbol: Symbol,
    pub inverse: bool,
}

impl Token {
    pub fn gen(i: u32) -> Self {
        Token {
            symbol: Symbol::Gen(i),
            inverse: false,
        }
    }

    pub fn ring() -> Self {
        Token {
            symbol: Symbol::Ring,
            inverse: false,
        }
    }

    pub fn inv(self) -> Self {
        Token {
            inverse: !self.inverse,
            ..self
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.symbol {
            Symbol::Gen(i) => write!(f, "x{}", i + 1)?,
            Symbol::Ring => f.write_str("O")?,
        }
        if self.inverse {
            f.write_str("'")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnotWord {
    generators: u32,
    tokens: Vec<Token>,
}

impl KnotWord {
    pub fn new(generators: u32, tokens: Vec<Token>) -> Result<Self> {
        if let Some(t) = tokens
            .iter()
            .find(|t| matches!(t.symbol, Symbol::Gen(i) if i >= generators))
        {
            return Err(Error::structure(format!(
                "token {t} outside x1..x{generators}"
            )));
        }
        Ok(KnotWord { generators, tokens })
    }

    pub fn parse(text: &str, generators: u32) -> Result<Self> {
        let tokens = text
            .split_whitespace()
            .map(|raw| {
                let (body, inverse) = match raw.strip_suffix('\'') {
                    Some(b) => (b, true),
                    None => (raw, false),
                };
                let symbol = if body == "O" {
                    Symbol::Ring
                } else {
                    let i: u32 = body
                        .strip_prefix('x')
                        .and_then(|d| d.parse().ok())
                        .filter(|i| *i >= 1)
                        .ok_or_else(|| Error::parameter(format!("bad knot token {raw:?}")))?;
                    Symbol::Gen(i - 1)
                };
                Ok(Token { symbol, inverse })
            })
            .collect::<Result<Vec<_>>>()?;
        KnotWord::new(generators, tokens)
    }

    pub fn generators(&self) -> u32 {
        self.generators
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Occurrences of each generator.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut counts = vec![0; self.generators as usize];
        for t in &self.tokens {
            if let Symbol::Gen(i) = t.symbol {
                counts[i as usize] += 1;
            }
        }
        counts
    }

    /// Free-group normal form after setting the `opened` generators to 1.
    pub fn reduce(&self, opened: &[usize]) -> KnotWord {
        KnotWord {
            generators: self.generators,
            tokens: reduce_tokens(&self.tokens, vec_to_mask(opened)),
        }
    }

    pub fn is_open(&self, opened: &[usize]) -> bool {
        opens(&self.tokens, vec_to_mask(opened))
    }
}

impl fmt::Display for KnotWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn is_opened(t: &Token, mask: u64) -> bool {
    matches!(t.symbol, Symbol::Gen(i) if mask & (1u64 << i) != 0)
}

fn reduce_tokens(tokens: &[Token], mask: u64) -> Vec<Token> {
    let mut stack: Vec<Token> = Vec::with_capacity(tokens.len());
    for t in tokens.iter().filter(|t| !is_opened(t, mask)) {
        if stack.last() == Some(&t.inv()) {
            stack.pop();
        } else {
            stack.push(*t);
        }
    }
    stack
}

fn opens(tokens: &[Token], mask: u64) -> bool {
    reduce_tokens(tokens, mask).is_empty()
}

/// Default cap on the word length accepted by [`verify_knot_threshold`].
pub const DEFAULT_WORD_CAP: usize = 1 << 20;

pub fn verify_knot_threshold(word: &KnotWord, k: usize) -> Result<VerificationReport> {
    verify_knot_threshold_limited(
        word,
        k,
        crate::model::DEFAULT_ENUMERATION_LIMIT,
        DEFAULT_WORD_CAP,
    )
}

pub fn verify_knot_threshold_limited(
    word: &KnotWord,
    k: usize,
    limit: usize,
    word_cap: usize,
) -> Result<VerificationReport> {
    if word.len() > word_cap {
        return Err(Error::capacity(format!(
            "word of length {} exceeds the cap of {word_cap}",
            word.len()
        )));
    }
    let n = word.generators() as usize;
    verify_layers(n, k, n, limit, |c| opens(&word.tokens, vec_to_mask(c)))
}

fn inverse_of(tokens: &[Token]) -> Vec<Token> {
    tokens.iter().rev().map(|t| t.inv()).collect()
}

fn knot_tokens(k: usize, gens: &[u32], out: &mut Vec<Token>) {
    let n = gens.len();
    let x: Vec<Token> = gens.iter().map(|g| Token::gen(*g)).collect();
    if k == n {
        out.extend(&x);
    } else if k + 1 == n {
        out.extend(&x);
        out.extend(x.iter().map(|t| t.inv()));
    } else if k == 1 {
        let mut rest = Vec::new();
        knot_tokens(1, &gens[1..], &mut rest);
        out.push(x[0]);
        out.extend(&rest);
        out.push(x[0].inv());
        out.extend(inverse_of(&rest));
    } else {
        let mut lower = Vec::new();
        knot_tokens(k - 1, &gens[1..], &mut lower);
        let mut same = Vec::new();
        knot_tokens(k, &gens[1..], &mut same);
        let ring = Token::ring();
        out.push(x[0]);
        out.extend(&lower);
        out.push(ring);
        out.extend(&same);
        out.push(ring.inv());
        out.extend(inverse_of(&lower));
        out.push(x[0].inv());
        out.push(ring);
        out.extend(inverse_of(&same));
        out.push(ring.inv());
    }
}

/// Knotted k-out-of-n word: a commutator of `x1 X` with a ring-conjugate of
/// `Y`, where `X` is (k-1)-out-of-(n-1) and `Y` is k-out-of-(n-1) over the
/// remaining generators.
pub fn build_knot(k: usize, n: usize) -> Result<KnotWord> {
    if k == 0 || k > n || n > 63 {
        return Err(Error::parameter(format!(
            "knot needs 1 <= k <= n <= 63, got k={k}, n={n}"
        )));
    }
    let expected = crate::bounds::knot_wrapping_count(k as u64, n as u64)?;
    if expected > BigUint::from(1u64 << 32) {
        return Err(Error::capacity(format!(
            "word of length {expected} is too long to build"
        )));
    }
    let gens: Vec<u32> = (0..n as u32).collect();
    let mut tokens = Vec::new();
    knot_tokens(k, &gens, &mut tokens);
    KnotWord::new(n as u32, tokens)
}

/// Result of [`search_minimal`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub length: usize,
    pub word: String,
    /// Complete candidate words tested against the threshold property.
    pub examined: u64,
}

/// Default bound on the symmetry-reduced search space.
pub const DEFAULT_SEARCH_BUDGET: f64 = 1e10;

/// Shortest k-out-of-n word over `x1..xn` and their inverses (no ring), up to
/// `max_len` tokens.
///
/// Only reduced, cyclically reduced words are tried, with generators first
/// appearing in order `x1, x2, ...` and positively. For `k < n` every
/// generator must have exponent sum zero and occur at least twice, so only
/// even lengths from `2n` are searched.
pub fn search_minimal(k: usize, n: usize, max_len: usize) -> Result<Option<SearchResult>> {
    search_minimal_with_budget(k, n, max_len, DEFAULT_SEARCH_BUDGET)
}

pub fn search_minimal_with_budget(
    k: usize,
    n: usize,
    max_len: usize,
    budget: f64,
) -> Result<Option<SearchResult>> {
    if k == 0 || k > n || n > 16 {
        return Err(Error::parameter(format!(
            "search needs 1 <= k <= n <= 16, got k={k}, n={n}"
        )));
    }
    let lengths: Vec<usize> = if k < n {
        (2 * n..=max_len).step_by(2).collect()
    } else {
        (n..=max_len).collect()
    };
    let symmetry: f64 = (1..=n).map(|i| 2.0 * i as f64).product();
    let space: f64 = lengths
        .iter()
        .map(|l| (2.0 * n as f64).powi(*l as i32) / symmetry)
        .sum();
    if space > budget {
        return Err(Error::capacity(format!(
            "search space of about {space:.3e} words exceeds the budget of {budget:.3e}"
        )));
    }
    let mut examined = 0;
    for len in lengths {
        let searcher = Searcher { k, n, len };
        let (found, count) = searcher.run();
        examined += count;
        if let Some(tokens) = found {
            let word = KnotWord::new(n as u32, tokens)?;
            return Ok(Some(SearchResult {
                length: len,
                word: word.to_string(),
                examined,
            }));
        }
    }
    Ok(None)
}

/// Tokens are encoded as `2g` for `x(g+1)` and `2g + 1` for its inverse.
struct Searcher {
    k: usize,
    n: usize,
    len: usize,
}

struct State {
    word: Vec<u8>,
    sums: Vec<i32>,
    counts: Vec<u32>,
    seen: usize,
    examined: u64,
}

impl Searcher {
    fn run(&self) -> (Option<Vec<Token>>, u64) {
        // The first token is always x1; branch in parallel on the second.
        let prefixes: Vec<u8> = (0..2 * self.n as u8).collect();
        let results: Vec<(Option<Vec<u8>>, u64)> = prefixes
            .par_iter()
            .map(|&second| {
                let mut st = State {
                    word: Vec::with_capacity(self.len),
                    sums: vec![0; self.n],
                    counts: vec![0; self.n],
                    seen: 0,
                    examined: 0,
                };
                if !self.push(&mut st, 0) || !self.push(&mut st, second) {
                    return (None, 0);
                }
                let found = self.dfs(&mut st);
                (found.then(|| st.word.clone()), st.examined)
            })
            .collect();
        let examined = results.iter().map(|r| r.1).sum();
        let found = results.into_iter().find_map(|r| r.0).map(|w| {
            w.into_iter()
                .map(|c| Token {
                    symbol: Symbol::Gen(u32::from(c / 2)),
                    inverse: c % 2 == 1,
                })
                .collect()
        });
        (found, examined)
    }

    /// Appends `c` if allowed by the canonical-form rules.
    fn push(&self, st: &mut State, c: u8) -> bool {
        let g = (c / 2) as usize;
        let inverse = c % 2 == 1;
        if st.word.len() >= self.len {
            return false;
        }
        if let Some(&last) = st.word.last() {
            if last ^ 1 == c {
                return false;
            }
        }
        if g > st.seen || (g == st.seen && inverse) {
            return false;
        }
        st.word.push(c);
        if g == st.seen {
            st.seen += 1;
        }
        st.sums[g] += if inverse { -1 } else { 1 };
        st.counts[g] += 1;
        true
    }

    fn pop(&self, st: &mut State) {
        let c = st.word.pop().expect("pop on empty word");
        let g = (c / 2) as usize;
        st.sums[g] -= if c % 2 == 1 { -1 } else { 1 };
        st.counts[g] -= 1;
        if st.counts[g] == 0 {
            st.seen -= 1;
        }
    }

    fn feasible(&self, st: &State) -> bool {
        let remaining = self.len - st.word.len();
        let unseen = self.n - st.seen;
        if self.k < self.n {
            let imbalance: usize = st.sums.iter().map(|s| s.unsigned_abs() as usize).sum();
            let short: usize = st.counts[..st.seen]
                .iter()
                .map(|c| 2usize.saturating_sub(*c as usize))
                .sum();
            remaining >= imbalance.max(short) + 2 * unseen && (remaining - imbalance) % 2 == 0
        } else {
            remaining >= unseen
        }
    }

    fn dfs(&self, st: &mut State) -> bool {
        if !self.feasible(st) {
            return false;
        }
        if st.word.len() == self.len {
            if st.word[0] ^ 1 == st.word[self.len - 1] {
                return false;
            }
            st.examined += 1;
            return self.verifies(&st.word);
        }
        for c in 0..2 * self.n as u8 {
            if self.push(st, c) {
                if self.dfs(st) {
                    return true;
                }
                self.pop(st);
            }
        }
        false
    }

    fn verifies(&self, word: &[u8]) -> bool {
        let tokens: Vec<Token> = word
            .iter()
            .map(|c| Token {
                symbol: Symbol::Gen(u32::from(c / 2)),
                inverse: c % 2 == 1,
            })
            .collect();
        let full = (1u64 << self.n) - 1;
        (0..=full).all(|mask| {
            let size = mask.count_ones() as usize;
            if size == self.k {
                opens(&tokens, mask)
            } else if size + 1 == self.k {
                !opens(&tokens, mask)
            } else {
                true
            }
        })
    }
}
