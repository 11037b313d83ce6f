//! Literals, clauses and DIMACS CNF input.

use std::fmt;
use std::io::{self, Write};

use thiserror::Error;

use crate::exchange::LinkHandle;

/// A propositional variable, stored 0-based. DIMACS variable `k` is `Var(k - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based DIMACS number.
    #[inline]
    pub fn dimacs(self) -> u32 {
        self.0 + 1
    }

    #[inline]
    pub fn lit(self, positive: bool) -> Lit {
        Lit(self.0 << 1 | (!positive) as u32)
    }
}

/// A literal encoded as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, positive: bool) -> Lit {
        var.lit(positive)
    }

    /// Builds a literal from a non-zero signed DIMACS integer.
    pub fn from_dimacs(value: i32) -> Lit {
        assert!(value != 0, "0 is not a literal");
        Var(value.unsigned_abs() - 1).lit(value > 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().dimacs() as i32;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    #[inline]
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A normalized clause: sorted, duplicate free, not tautological, non-empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn into_lits(self) -> Vec<Lit> {
        self.lits
    }

    pub fn from_dimacs(values: &[i32]) -> Normalized {
        normalize_clause(values.iter().map(|&v| Lit::from_dimacs(v)).collect())
    }
}

/// Result of [`normalize_clause`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Clause(Clause),
    Tautology,
    Empty,
}

/// Sorts and deduplicates `lits`, detecting tautologies and the empty clause.
pub fn normalize_clause(mut lits: Vec<Lit>) -> Normalized {
    if lits.is_empty() {
        return Normalized::Empty;
    }
    lits.sort_unstable();
    lits.dedup();
    // l and !l are adjacent after sorting
    if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
        return Normalized::Tautology;
    }
    Normalized::Clause(Clause { lits })
}

/// Per-clause bookkeeping used by the database, vivification and sharing.
#[derive(Clone, Debug)]
pub struct ClauseMeta {
    pub lbd: u32,
    pub activity: f64,
    pub learned: bool,
    pub imported: bool,
    /// Set once, never cleared.
    pub vivify_attempted: bool,
    /// Exempt from database reduction.
    pub protected: bool,
    pub link: Option<LinkHandle>,
}

impl ClauseMeta {
    pub fn original(len: usize) -> ClauseMeta {
        ClauseMeta {
            lbd: len.max(1) as u32,
            activity: 0.0,
            learned: false,
            imported: false,
            vivify_attempted: false,
            protected: false,
            link: None,
        }
    }

    pub fn learned(lbd: u32) -> ClauseMeta {
        ClauseMeta {
            lbd: lbd.max(1),
            learned: true,
            ..ClauseMeta::original(1)
        }
    }

    /// Checks the structural invariants against the owning clause's length.
    pub fn is_consistent(&self, len: usize) -> bool {
        self.lbd >= 1 && self.lbd as usize <= len.max(1) && (!self.imported || self.learned)
    }
}

/// An immutable CNF problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<Clause>,
    has_empty_clause: bool,
}

impl Formula {
    /// Builds a formula from raw literal lists, normalizing each clause.
    ///
    /// Panics if a literal refers to a variable beyond `num_vars`.
    pub fn new(num_vars: u32, clauses: impl IntoIterator<Item = Vec<Lit>>) -> Formula {
        let mut formula = Formula {
            num_vars,
            clauses: Vec::new(),
            has_empty_clause: false,
        };
        for lits in clauses {
            assert!(
                lits.iter().all(|l| l.var().0 < num_vars),
                "literal out of range"
            );
            formula.push(normalize_clause(lits));
        }
        formula
    }

    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i32]]) -> Formula {
        Formula::new(
            num_vars,
            clauses
                .iter()
                .map(|c| c.iter().map(|&v| Lit::from_dimacs(v)).collect()),
        )
    }

    fn push(&mut self, normalized: Normalized) {
        match normalized {
            Normalized::Clause(c) => self.clauses.push(c),
            Normalized::Tautology => {}
            Normalized::Empty => self.has_empty_clause = true,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// True if the input contained an empty clause, making it trivially unsatisfiable.
    pub fn has_empty_clause(&self) -> bool {
        self.has_empty_clause
    }

    /// Writes the formula in DIMACS CNF.
    pub fn write_dimacs<W: Write>(&self, mut out: W) -> io::Result<()> {
        let count = self.clauses.len() + self.has_empty_clause as usize;
        writeln!(out, "p cnf {} {}", self.num_vars, count)?;
        if self.has_empty_clause {
            writeln!(out, "0")?;
        }
        for clause in &self.clauses {
            for lit in clause.lits() {
                write!(out, "{} ", lit)?;
            }
            writeln!(out, "0")?;
        }
        Ok(())
    }

    pub fn to_dimacs_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("DIMACS output is ASCII")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("missing or malformed \"p cnf\" header")]
    MissingHeader,
    #[error("line {line}: literal {literal} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { line: usize, literal: i64, num_vars: u32 },
    #[error("line {line}: clause not terminated by 0 at end of input")]
    UnterminatedClause { line: usize },
    #[error("line {line}: invalid token {token:?}")]
    InvalidToken { line: usize, token: String },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::MissingHeader => None,
            ParseError::LiteralOutOfRange { line, .. }
            | ParseError::UnterminatedClause { line }
            | ParseError::InvalidToken { line, .. } => Some(*line),
        }
    }
}

/// Parses DIMACS CNF text.
///
/// Accepts `c` comment lines anywhere and stops at a SATLIB-style `%` line.
/// Clauses beyond the header count are kept (a warning is logged).
pub fn parse_dimacs(input: &[u8]) -> Result<Formula, ParseError> {
    let text = String::from_utf8_lossy(input);
    let mut header: Option<(u32, usize)> = None;
    let mut formula = Formula {
        num_vars: 0,
        clauses: Vec::new(),
        has_empty_clause: false,
    };
    let mut current: Vec<Lit> = Vec::new();
    let mut seen = 0usize;
    let mut last_line = 0;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", vars, clauses] if header.is_none() => {
                    let vars = vars.parse().map_err(|_| ParseError::MissingHeader)?;
                    let clauses = clauses.parse().map_err(|_| ParseError::MissingHeader)?;
                    header = Some((vars, clauses));
                    formula.num_vars = vars;
                    continue;
                }
                _ => return Err(ParseError::MissingHeader),
            }
        }
        let Some((num_vars, _)) = header else {
            return Err(ParseError::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| ParseError::InvalidToken {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                formula.push(normalize_clause(std::mem::take(&mut current)));
                seen += 1;
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(ParseError::LiteralOutOfRange {
                    line: line_no,
                    literal: value,
                    num_vars,
                });
            }
            current.push(Lit::from_dimacs(value as i32));
        }
    }

    let Some((_, declared)) = header else {
        return Err(ParseError::MissingHeader);
    };
    if !current.is_empty() {
        return Err(ParseError::UnterminatedClause {
            line: last_line,
        });
    }
    if seen > declared {
        log::warn!("header declares {declared} clauses, found {seen}");
    }
    Ok(formula)
}
