//! CNF formulas: DIMACS reading and printing, normalization to clauses of
//! size two or three, evaluation and a truth-table oracle.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Largest variable count accepted by [`sat_oracle`].
pub const ORACLE_MAX_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header")]
    MalformedHeader { line: usize },
    #[error("line {line}: literal {literal} out of range")]
    LiteralOutOfRange { line: usize, literal: i64 },
    #[error("line {line}: clause is not terminated by 0")]
    UnterminatedClause { line: usize },
    #[error("line {line}: clause has {len} literals, at most 3 allowed")]
    ClauseTooLarge { line: usize, len: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: invalid token {token:?}")]
    BadToken { line: usize, token: String },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("input is not valid UTF-8")]
    NotUtf8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable index must be at least 1")]
    ZeroVariable,
    #[error("variable {var} exceeds declared count {num_vars}")]
    VariableOutOfRange { var: u32, num_vars: usize },
    #[error("clause {index} has {len} literals, expected 1 to 3")]
    BadClauseSize { index: usize, len: usize },
    #[error("assignment has no value for variable {var}")]
    IncompleteAssignment { var: u32 },
    #[error("truth-table oracle supports at most {max} variables, got {got}")]
    TooManyVariables { got: usize, max: usize },
}

/// A signed variable occurrence. Variables are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Result<Self, FormulaError> {
        if var == 0 {
            return Err(FormulaError::ZeroVariable);
        }
        Ok(Literal { var, negated })
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, false).expect("variable index must be positive")
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, true).expect("variable index must be positive")
    }

    /// Builds a literal from its DIMACS integer form.
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 || lit.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal {
            var: lit.unsigned_abs() as u32,
            negated: lit < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }

    /// Whether `value` for this literal's variable makes the literal true.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var)
        } else {
            write!(f, "x{}", self.var)
        }
    }
}

/// A conjunction of clauses of at most three literals each.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        for (index, clause) in clauses.iter().enumerate() {
            if clause.is_empty() || clause.len() > 3 {
                return Err(FormulaError::BadClauseSize {
                    index,
                    len: clause.len(),
                });
            }
            for lit in clause {
                if lit.var as usize > num_vars {
                    return Err(FormulaError::VariableOutOfRange {
                        var: lit.var,
                        num_vars,
                    });
                }
            }
        }
        Ok(Formula { num_vars, clauses })
    }

    /// Convenience constructor from DIMACS-style signed integers.
    pub fn from_ints(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        let clauses = clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal::from_dimacs(l).ok_or(FormulaError::ZeroVariable))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Formula::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// Prints the formula in DIMACS form.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "⊤");
        }
        for (j, clause) in self.clauses.iter().enumerate() {
            if j > 0 {
                write!(f, " ∧ ")?;
            }
            write!(f, "(")?;
            for (h, lit) in clause.iter().enumerate() {
                if h > 0 {
                    write!(f, " ∨ ")?;
                }
                write!(f, "{lit}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Truth values keyed by variable index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: BTreeMap<u32, bool>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// All `num_vars` variables set to false.
    pub fn all_false(num_vars: usize) -> Self {
        (1..=num_vars as u32).map(|v| (v, false)).collect()
    }

    /// Bit `v - 1` of `mask` is the value of variable `v`.
    pub fn from_mask(num_vars: usize, mask: u64) -> Self {
        (1..=num_vars as u32)
            .map(|v| (v, mask >> (v - 1) & 1 == 1))
            .collect()
    }

    pub fn set(&mut self, var: u32, value: bool) {
        self.values.insert(var, value);
    }

    pub fn get(&self, var: u32) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, bool)> + '_ {
        self.values.iter().map(|(&v, &b)| (v, b))
    }

    pub fn literal_true(&self, lit: Literal) -> Option<bool> {
        self.get(lit.var).map(|b| lit.satisfied_by(b))
    }
}

impl FromIterator<(u32, bool)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (u32, bool)>>(iter: I) -> Self {
        Assignment {
            values: iter.into_iter().collect(),
        }
    }
}

/// Parses DIMACS CNF text. Clauses may span lines; errors carry 1-based line
/// numbers (for clause errors, the line on which the clause started).
pub fn parse_dimacs(text: &[u8]) -> Result<Formula, DimacsError> {
    let text = std::str::from_utf8(text).map_err(|_| DimacsError::NotUtf8)?;
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut clause_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() || !current.is_empty() || !clauses.is_empty() {
                return Err(DimacsError::MalformedHeader { line });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(DimacsError::MalformedHeader { line });
            }
            let n = parts[2]
                .parse()
                .map_err(|_| DimacsError::MalformedHeader { line })?;
            let m = parts[3]
                .parse()
                .map_err(|_| DimacsError::MalformedHeader { line })?;
            header = Some((n, m));
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MalformedHeader { line })?;
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                if current.is_empty() {
                    return Err(DimacsError::EmptyClause { line });
                }
                if current.len() > 3 {
                    return Err(DimacsError::ClauseTooLarge {
                        line: clause_line,
                        len: current.len(),
                    });
                }
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(DimacsError::LiteralOutOfRange {
                    line,
                    literal: value,
                });
            }
            if current.is_empty() {
                clause_line = line;
            }
            current.push(Literal::from_dimacs(value).expect("nonzero literal"));
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::MalformedHeader {
        line: last_line.max(1),
    })?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause { line: clause_line });
    }
    if declared != clauses.len() {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    Ok(Formula { num_vars, clauses })
}

/// True iff every clause has a literal made true by `assignment`.
pub fn evaluate(formula: &Formula, assignment: &Assignment) -> Result<bool, FormulaError> {
    for var in 1..=formula.num_vars as u32 {
        if assignment.get(var).is_none() {
            return Err(FormulaError::IncompleteAssignment { var });
        }
    }
    Ok(formula.clauses.iter().all(|clause| {
        clause
            .iter()
            .any(|&lit| assignment.literal_true(lit).unwrap_or(false))
    }))
}

/// Exhaustive truth-table search. Assignments are tried in increasing order
/// of their bitmask, so the all-false assignment is tried first.
pub fn sat_oracle(formula: &Formula) -> Result<Option<Assignment>, FormulaError> {
    let n = formula.num_vars;
    if n > ORACLE_MAX_VARS {
        return Err(FormulaError::TooManyVariables {
            got: n,
            max: ORACLE_MAX_VARS,
        });
    }
    let masks: Vec<(u64, u64)> = formula
        .clauses
        .iter()
        .map(|clause| {
            clause.iter().fold((0u64, 0u64), |(pos, neg), lit| {
                let bit = 1u64 << (lit.var - 1);
                if lit.negated {
                    (pos, neg | bit)
                } else {
                    (pos | bit, neg)
                }
            })
        })
        .collect();
    let found = (0u64..1u64 << n).find(|&mask| {
        masks
            .iter()
            .all(|&(pos, neg)| mask & pos != 0 || !mask & neg != 0)
    });
    Ok(found.map(|mask| Assignment::from_mask(n, mask)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationStatus {
    /// All clauses have two or three literals over distinct variables.
    Reducible,
    /// Propagation satisfied every clause.
    DecidedSat,
    /// Propagation derived the empty clause.
    DecidedUnsat,
}

/// Result of [`normalize`]. The inner formula is over renamed variables
/// `1..=k`; `original_var(i)` maps them back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedFormula {
    formula: Formula,
    status: NormalizationStatus,
    original_vars: Vec<u32>,
    fixed: BTreeMap<u32, bool>,
    original_num_vars: usize,
}

impl NormalizedFormula {
    /// Wraps a formula that is already in reducible shape, with the identity
    /// renaming. Returns `None` if some clause has the wrong size, repeats a
    /// variable, or some variable does not occur.
    pub fn from_reducible(formula: Formula) -> Option<Self> {
        let mut seen = vec![false; formula.num_vars + 1];
        for clause in formula.clauses() {
            if clause.len() < 2 {
                return None;
            }
            for (a, la) in clause.iter().enumerate() {
                seen[la.var as usize] = true;
                if clause[a + 1..].iter().any(|lb| lb.var == la.var) {
                    return None;
                }
            }
        }
        if seen[1..].iter().any(|&s| !s) {
            return None;
        }
        let n = formula.num_vars;
        Some(NormalizedFormula {
            formula,
            status: NormalizationStatus::Reducible,
            original_vars: (1..=n as u32).collect(),
            fixed: BTreeMap::new(),
            original_num_vars: n,
        })
    }

    /// Rebuilds a normalized formula from its parts, e.g. when reading an
    /// instance file. `original_vars[i]` is the original index of variable `i + 1`.
    pub fn from_parts(
        formula: Formula,
        original_vars: Vec<u32>,
        fixed: BTreeMap<u32, bool>,
        original_num_vars: usize,
    ) -> Option<Self> {
        if original_vars.len() != formula.num_vars() {
            return None;
        }
        let mut normalized = Self::from_reducible(formula)?;
        normalized.original_vars = original_vars;
        normalized.fixed = fixed;
        normalized.original_num_vars = original_num_vars;
        Some(normalized)
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn status(&self) -> NormalizationStatus {
        self.status
    }

    pub fn original_num_vars(&self) -> usize {
        self.original_num_vars
    }

    /// Original index of renamed variable `var`.
    pub fn original_var(&self, var: u32) -> u32 {
        self.original_vars[var as usize - 1]
    }

    pub fn original_vars(&self) -> &[u32] {
        &self.original_vars
    }

    /// Original variables whose value was forced by unit propagation.
    pub fn fixed(&self) -> &BTreeMap<u32, bool> {
        &self.fixed
    }

    /// Extends an assignment of the renamed variables to one of the original
    /// formula: forced values are restored, dropped variables become false.
    pub fn lift(&self, assignment: &Assignment) -> Assignment {
        let mut out = Assignment::all_false(self.original_num_vars);
        for (&var, &value) in &self.fixed {
            out.set(var, value);
        }
        for (new, &orig) in self.original_vars.iter().enumerate() {
            if let Some(value) = assignment.get(new as u32 + 1) {
                out.set(orig, value);
            }
        }
        out
    }

    /// Restricts an assignment of the original variables to the renamed ones.
    pub fn project(&self, assignment: &Assignment) -> Assignment {
        self.original_vars
            .iter()
            .enumerate()
            .filter_map(|(new, &orig)| assignment.get(orig).map(|b| (new as u32 + 1, b)))
            .collect()
    }
}

/// Deduplicates literals, drops tautologies, unit-propagates, and renames the
/// surviving variables to `1..=k` in increasing original order.
pub fn normalize(formula: &Formula) -> NormalizedFormula {
    let mut clauses: Vec<Vec<Literal>> = Vec::new();
    for clause in formula.clauses() {
        let mut lits: Vec<Literal> = Vec::with_capacity(clause.len());
        let mut tautology = false;
        for &lit in clause {
            if lits.contains(&lit) {
                continue;
            }
            if lits.contains(&lit.negate()) {
                tautology = true;
                break;
            }
            lits.push(lit);
        }
        if !tautology {
            clauses.push(lits);
        }
    }

    let mut fixed: BTreeMap<u32, bool> = BTreeMap::new();
    let decided = |status, fixed| NormalizedFormula {
        formula: Formula {
            num_vars: 0,
            clauses: Vec::new(),
        },
        status,
        original_vars: Vec::new(),
        fixed,
        original_num_vars: formula.num_vars,
    };

    while let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) {
        fixed.insert(unit.var, !unit.negated);
        let mut next = Vec::with_capacity(clauses.len());
        for clause in clauses {
            if clause.contains(&unit) {
                continue;
            }
            let reduced: Vec<Literal> =
                clause.into_iter().filter(|&l| l != unit.negate()).collect();
            if reduced.is_empty() {
                return decided(NormalizationStatus::DecidedUnsat, fixed);
            }
            next.push(reduced);
        }
        clauses = next;
    }

    if clauses.is_empty() {
        return decided(NormalizationStatus::DecidedSat, fixed);
    }

    let mut used: Vec<u32> = clauses.iter().flatten().map(|l| l.var).collect();
    used.sort_unstable();
    used.dedup();
    let rename: BTreeMap<u32, u32> = used
        .iter()
        .enumerate()
        .map(|(i, &orig)| (orig, i as u32 + 1))
        .collect();
    let clauses = clauses
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|l| Literal {
                    var: rename[&l.var],
                    negated: l.negated,
                })
                .collect()
        })
        .collect();
    NormalizedFormula {
        formula: Formula {
            num_vars: used.len(),
            clauses,
        },
        status: NormalizationStatus::Reducible,
        original_vars: used,
        fixed,
        original_num_vars: formula.num_vars,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_formula() -> Formula {
        Formula::from_ints(4, &[&[1, -2, 3], &[1, 3], &[-1, -3, -4]]).unwrap()
    }

    #[test]
    fn parses_smallest_file() {
        let f = parse_dimacs(b"p cnf 1 1\n1 0").unwrap();
        assert_eq!(f.num_vars(), 1);
        assert_eq!(f.clauses(), &[vec![Literal::pos(1)]]);
    }

    #[test]
    fn parses_running_example() {
        let f = parse_dimacs(b"p cnf 4 3\n1 -2 3 0\n1 3 0\n-1 -3 -4 0").unwrap();
        assert_eq!(f, sample_formula());
    }

    #[test]
    fn parse_errors_name_lines() {
        assert_eq!(
            parse_dimacs(b"p cnf 2 1\n1 2 3 0"),
            Err(DimacsError::LiteralOutOfRange {
                line: 2,
                literal: 3
            })
        );
        assert_eq!(
            parse_dimacs(b"p cnf x 1\n1 0"),
            Err(DimacsError::MalformedHeader { line: 1 })
        );
        assert_eq!(
            parse_dimacs(b"c hi\np cnf 2 1\n1 2"),
            Err(DimacsError::UnterminatedClause { line: 3 })
        );
        assert_eq!(
            parse_dimacs(b"p cnf 4 1\n1 2\n3 4 0"),
            Err(DimacsError::ClauseTooLarge { line: 2, len: 4 })
        );
        assert_eq!(
            parse_dimacs(b"1 2 0\n"),
            Err(DimacsError::MalformedHeader { line: 1 })
        );
        assert_eq!(
            parse_dimacs(b"p cnf 2 2\n1 2 0\n"),
            Err(DimacsError::ClauseCountMismatch {
                declared: 2,
                found: 1
            })
        );
    }

    #[test]
    fn printer_is_byte_exact() {
        assert_eq!(
            sample_formula().to_dimacs(),
            "p cnf 4 3\n1 -2 3 0\n1 3 0\n-1 -3 -4 0\n"
        );
    }

    #[test]
    fn evaluate_examples() {
        let alpha: Assignment = [(1, false), (2, false), (3, true), (4, true)]
            .into_iter()
            .collect();
        assert_eq!(evaluate(&sample_formula(), &alpha), Ok(true));
        let empty = Formula::new(3, vec![]).unwrap();
        assert_eq!(evaluate(&empty, &Assignment::all_false(3)), Ok(true));
        let f = Formula::from_ints(2, &[&[1, 2]]).unwrap();
        assert_eq!(evaluate(&f, &Assignment::all_false(2)), Ok(false));
        assert_eq!(
            evaluate(&f, &[(1, true)].into_iter().collect()),
            Err(FormulaError::IncompleteAssignment { var: 2 })
        );
    }

    #[test]
    fn oracle_examples() {
        let alpha = sat_oracle(&sample_formula()).unwrap().unwrap();
        assert_eq!(evaluate(&sample_formula(), &alpha), Ok(true));

        let unsat = Formula::from_ints(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        assert_eq!(sat_oracle(&unsat), Ok(None));

        let empty = Formula::new(3, vec![]).unwrap();
        assert_eq!(sat_oracle(&empty), Ok(Some(Assignment::all_false(3))));

        let big = Formula::new(25, vec![]).unwrap();
        assert_eq!(
            sat_oracle(&big),
            Err(FormulaError::TooManyVariables { got: 25, max: 24 })
        );
    }

    #[test]
    fn normalize_examples() {
        let f = Formula::from_ints(2, &[&[1], &[-1, 2]]).unwrap();
        let nf = normalize(&f);
        assert_eq!(nf.status(), NormalizationStatus::DecidedSat);
        let lifted = nf.lift(&Assignment::new());
        assert_eq!(evaluate(&f, &lifted), Ok(true));

        let f = Formula::from_ints(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(normalize(&f).status(), NormalizationStatus::DecidedUnsat);

        let f = Formula::from_ints(2, &[&[1, 1, 2]]).unwrap();
        let nf = normalize(&f);
        assert_eq!(nf.status(), NormalizationStatus::Reducible);
        assert_eq!(
            nf.formula().clauses(),
            &[vec![Literal::pos(1), Literal::pos(2)]]
        );
    }

    #[test]
    fn normalize_drops_tautologies_and_renames() {
        let f = Formula::from_ints(5, &[&[2, -2, 1], &[3, -5], &[5, 3, 3]]).unwrap();
        let nf = normalize(&f);
        assert_eq!(nf.status(), NormalizationStatus::Reducible);
        assert_eq!(nf.formula().num_vars(), 2);
        assert_eq!(nf.original_vars(), &[3, 5]);
        assert_eq!(nf.formula().num_clauses(), 2);
        let lifted = nf.lift(&[(1, true), (2, false)].into_iter().collect());
        assert_eq!(lifted.get(3), Some(true));
        assert_eq!(lifted.get(1), Some(false));
        assert_eq!(evaluate(&f, &lifted), Ok(true));
    }

    #[test]
    fn from_reducible_rejects_bad_shapes() {
        assert!(NormalizedFormula::from_reducible(sample_formula()).is_some());
        let unit = Formula::from_ints(2, &[&[1], &[1, 2]]).unwrap();
        assert!(NormalizedFormula::from_reducible(unit).is_none());
        let unused = Formula::from_ints(3, &[&[1, 2]]).unwrap();
        assert!(NormalizedFormula::from_reducible(unused).is_none());
        let repeated = Formula::from_ints(2, &[&[1, 1, 2]]).unwrap();
        assert!(NormalizedFormula::from_reducible(repeated).is_none());
    }
}
