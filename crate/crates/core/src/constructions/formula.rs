//! Negation-free boolean formulas in disjunctive or conjunctive normal form.
//!
//! Text grammar, whitespace-insensitive:
//!
//! ```text
//! dnf := clause ('+' clause)*    clause := lit ('.' lit)*
//! cnf := clause ('*' clause)*    clause := lit ('+' lit)*
//! ```
//!
//! A clause may be wrapped in parentheses. Variables are identifiers and are
//! numbered by first appearance.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CircuitBuilder, DeviceCircuit, KeyDistribution, NodeId, PadlockId, ThresholdSystem,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalForm {
    Dnf,
    Cnf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    kind: NormalForm,
    variables: Vec<String>,
    clauses: Vec<Vec<usize>>,
}

impl Formula {
    /// Formula over `variables` with clauses given as variable indices.
    pub fn new(kind: NormalForm, variables: Vec<String>, clauses: Vec<Vec<usize>>) -> Result<Self> {
        if clauses.is_empty() {
            return Err(Error::parameter("empty formula"));
        }
        let mut used = vec![false; variables.len()];
        for clause in &clauses {
            if clause.is_empty() {
                return Err(Error::parameter("empty clause"));
            }
            for &v in clause {
                let slot = used
                    .get_mut(v)
                    .ok_or_else(|| Error::parameter(format!("variable index {v} out of range")))?;
                *slot = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::parameter(format!(
                "variable {} occurs in no clause",
                variables[v]
            )));
        }
        Ok(Formula {
            kind,
            variables,
            clauses,
        })
    }

    pub fn parse(text: &str, kind: NormalForm) -> Result<Self> {
        let (clause_sep, literal_sep) = match kind {
            NormalForm::Dnf => ('+', '.'),
            NormalForm::Cnf => ('*', '+'),
        };
        let mut variables: Vec<String> = Vec::new();
        let mut clauses = Vec::new();
        for (ci, raw) in text.split(clause_sep).enumerate() {
            let mut clause_text = raw.trim();
            if let Some(inner) = clause_text.strip_prefix('(') {
                clause_text = inner
                    .strip_suffix(')')
                    .ok_or_else(|| {
                        Error::parameter(format!("clause {} has unbalanced parentheses", ci + 1))
                    })?
                    .trim();
            }
            let mut clause = Vec::new();
            for lit in clause_text.split(literal_sep).map(str::trim) {
                let valid = lit
                    .chars()
                    .next()
                    .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                    && lit.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                if !valid {
                    return Err(Error::parameter(format!(
                        "bad variable {lit:?} in clause {}",
                        ci + 1
                    )));
                }
                let v = match variables.iter().position(|x| x == lit) {
                    Some(v) => v,
                    None => {
                        variables.push(lit.to_string());
                        variables.len() - 1
                    }
                };
                if clause.contains(&v) {
                    return Err(Error::parameter(format!(
                        "variable {lit} repeated in clause {}",
                        ci + 1
                    )));
                }
                clause.push(v);
            }
            clauses.push(clause);
        }
        Formula::new(kind, variables, clauses)
    }

    pub fn kind(&self) -> NormalForm {
        self.kind
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn clauses(&self) -> &[Vec<usize>] {
        &self.clauses
    }

    /// Truth value under an assignment indexed like [`Formula::variables`].
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        let clause_true = |c: &Vec<usize>| match self.kind {
            NormalForm::Dnf => c.iter().all(|v| assignment[*v]),
            NormalForm::Cnf => c.iter().any(|v| assignment[*v]),
        };
        match self.kind {
            NormalForm::Dnf => self.clauses.iter().any(clause_true),
            NormalForm::Cnf => self.clauses.iter().all(clause_true),
        }
    }

    /// Circuit with padlock `i` standing for variable `i`.
    pub fn compile(&self) -> Result<DeviceCircuit> {
        match self.kind {
            NormalForm::Dnf => compile_dnf(self),
            NormalForm::Cnf => compile_cnf(self),
        }
    }

    /// System in which variable `i` is a participant holding padlock `i`.
    pub fn to_system(&self) -> Result<ThresholdSystem> {
        let keys = KeyDistribution::from_lists((0..self.variables.len() as u32).map(|i| [i]));
        ThresholdSystem::new(self.compile()?, keys)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (clause_sep, literal_sep) = match self.kind {
            NormalForm::Dnf => (" + ", "."),
            NormalForm::Cnf => (" * ", "+"),
        };
        let text = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<&str> = c.iter().map(|v| self.variables[*v].as_str()).collect();
                if c.len() > 1 {
                    format!("({})", lits.join(literal_sep))
                } else {
                    lits.join(literal_sep)
                }
            })
            .collect::<Vec<_>>()
            .join(clause_sep);
        f.write_str(&text)
    }
}

fn clause_leaves(b: &mut CircuitBuilder, clause: &[usize]) -> Result<Vec<NodeId>> {
    b.locks(clause.iter().map(|v| PadlockId(*v as u32)))
}

fn check_kind(f: &Formula, kind: NormalForm) -> Result<()> {
    if f.kind != kind {
        return Err(Error::parameter(format!("expected a {kind:?} formula")));
    }
    Ok(())
}

/// One latch per clause; each variable's chain runs through every clause
/// containing it.
pub fn compile_dnf(f: &Formula) -> Result<DeviceCircuit> {
    check_kind(f, NormalForm::Dnf)?;
    let mut b = CircuitBuilder::new(f.variables.len() as u32);
    let clauses = f
        .clauses
        .iter()
        .map(|c| {
            let leaves = clause_leaves(&mut b, c)?;
            b.and(leaves)
        })
        .collect::<Result<Vec<_>>>()?;
    let root = b.threshold(1, clauses)?;
    Ok(b.finish(root))
}

/// A t-out-of-t device over one 1-out-of-k device per clause.
pub fn compile_cnf(f: &Formula) -> Result<DeviceCircuit> {
    check_kind(f, NormalForm::Cnf)?;
    let mut b = CircuitBuilder::new(f.variables.len() as u32);
    let clauses = f
        .clauses
        .iter()
        .map(|c| {
            let leaves = clause_leaves(&mut b, c)?;
            b.or(leaves)
        })
        .collect::<Result<Vec<_>>>()?;
    let root = b.threshold(clauses.len(), clauses)?;
    Ok(b.finish(root))
}

#[cfg(test)]
mod tests {
    use itertools::Itertools;

    use super::*;
    use crate::constructions::build_benaloh;
    use crate::model::{Gate, PadlockSet};

    fn assignments(m: usize) -> impl Iterator<Item = Vec<bool>> {
        (0..1u32 << m).map(move |mask| (0..m).map(|i| mask & (1 << i) != 0).collect())
    }

    fn opened(a: &[bool]) -> PadlockSet {
        a.iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(i, _)| PadlockId(i as u32))
            .collect()
    }

    #[test]
    fn parse_dnf() {
        let f = Formula::parse("A.B + A.C + B.D + E", NormalForm::Dnf).unwrap();
        assert_eq!(f.variables(), &["A", "B", "C", "D", "E"]);
        assert_eq!(f.clauses(), &[vec![0, 1], vec![0, 2], vec![1, 3], vec![4]]);
        assert_eq!(f.to_string(), "(A.B) + (A.C) + (B.D) + E");
        let c = compile_dnf(&f).unwrap();
        assert_eq!(c.padlocks(), 5);
        assert_eq!(c.gate(c.root()).children().len(), 4);
    }

    #[test]
    fn parse_errors() {
        assert!(Formula::parse("", NormalForm::Dnf).is_err());
        assert!(Formula::parse("A + ", NormalForm::Dnf).is_err());
        assert!(Formula::parse("A.A", NormalForm::Dnf).is_err());
        assert!(Formula::parse("(A.B", NormalForm::Dnf).is_err());
        assert!(Formula::parse("1x", NormalForm::Cnf).is_err());
    }

    #[test]
    fn single_clause() {
        let f = Formula::parse("A", NormalForm::Dnf).unwrap();
        let c = compile_dnf(&f).unwrap();
        assert_eq!(c.padlocks(), 1);
        assert!(
            matches!(c.gate(c.root()), Gate::Threshold { required: 1, children } if children.len() == 1)
        );
    }

    #[test]
    fn cnf_figure() {
        let f = Formula::parse("(A+B+C) * D * (C+E)", NormalForm::Cnf).unwrap();
        let c = compile_cnf(&f).unwrap();
        assert_eq!(c.padlocks(), 5);
        assert!(matches!(
            c.gate(c.root()),
            Gate::Threshold { required: 3, .. }
        ));
        let f = Formula::parse("A * B", NormalForm::Cnf).unwrap();
        let c = compile_cnf(&f).unwrap();
        assert!(
            matches!(c.gate(c.root()), Gate::Threshold { required: 2, children } if children.len() == 2)
        );
        assert!(compile_dnf(&f).is_err());
    }

    #[test]
    fn dnf_matches_benaloh() {
        let f = Formula::parse("A.B + C.D + B.C", NormalForm::Dnf).unwrap();
        assert_eq!(
            f.to_system().unwrap().realized_access_structure().unwrap(),
            build_benaloh()
                .unwrap()
                .realized_access_structure()
                .unwrap()
        );
    }

    #[test]
    fn circuits_match_truth_tables() {
        for (text, kind) in [
            ("A.B + A.C + B.D + E", NormalForm::Dnf),
            ("(A+B+C) * D * (C+E)", NormalForm::Cnf),
            ("a.b.c + d.e.f + g.h + i.j.k.l", NormalForm::Dnf),
            (
                "(a+b) * (c+d) * (e+f) * (g+h) * (i+j) * (k+l)",
                NormalForm::Cnf,
            ),
        ] {
            let f = Formula::parse(text, kind).unwrap();
            let c = f.compile().unwrap();
            assert_eq!(c.padlocks(), f.variables().len());
            for a in assignments(f.variables().len()) {
                assert_eq!(c.evaluate(&opened(&a)), f.evaluate(&a), "{text} {a:?}");
            }
        }
    }

    #[test]
    fn cnf_agrees_with_its_expansion() {
        let cnf = Formula::parse("(A+B+C) * D * (C+E)", NormalForm::Cnf).unwrap();
        let clauses = cnf
            .clauses()
            .iter()
            .map(|c| c.iter().copied())
            .multi_cartesian_product()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let dnf = Formula::new(NormalForm::Dnf, cnf.variables().to_vec(), clauses).unwrap();
        assert_eq!(
            cnf.to_system()
                .unwrap()
                .realized_access_structure()
                .unwrap(),
            dnf.to_system()
                .unwrap()
                .realized_access_structure()
                .unwrap()
        );
    }
}
