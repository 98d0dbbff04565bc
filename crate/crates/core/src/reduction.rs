//! 3-SAT to SUBSET-SUM by the base-10 digit table, with witness transport.
//!
//! Columns: one per variable, then one per clause. Each variable `x` gets a
//! "true" row (1 in its own column and in every clause column where `x`
//! occurs) and a "false" row (same, for `¬x`). Each clause gets two slack rows
//! with a single 1 in its column. The target has 1 in every variable column
//! and 3 in every clause column. A clause with 1 to 3 literals is satisfied
//! by between 1 and 3 true occurrences; the two slack rows top the column up
//! to exactly 3, which is impossible when no occurrence is true. A column sum
//! never exceeds 3 + 2, so base 10 never carries.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::Error;
use crate::protocol::{Instance, WitnessSubset};

/// Largest variable count [`brute_sat`] will enumerate.
pub const DEFAULT_SAT_LIMIT: usize = 20;

/// CNF over variables `1..=num_vars`; literal `-k` is `¬x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self, Error> {
        for (i, c) in clauses.iter().enumerate() {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Precondition(format!(
                        "clause {} has literal {lit} outside 1..={num_vars}",
                        i + 1
                    )));
                }
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    /// `assignment[k - 1]` is the value of `x_k`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self.clauses.iter().all(|c| {
                c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
            })
    }
}

/// DIMACS: optional `c` comment lines, a `p cnf <vars> <clauses>` header, then
/// zero-terminated clauses (which may span lines).
impl FromStr for Cnf {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let line_start = offset;
            offset += line.len();
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
                continue;
            }
            let err = |token: &str, reason: &str| {
                let col = line.find(token).unwrap_or(0);
                Error::Parse {
                    token: token.to_string(),
                    position: line_start + col + 1,
                    reason: reason.to_string(),
                }
            };
            if trimmed.starts_with('p') {
                let parts: Vec<&str> = trimmed.split_whitespace().collect();
                if header.is_some() {
                    return Err(err(trimmed, "duplicate header"));
                }
                if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                    return Err(err(trimmed, "expected `p cnf <vars> <clauses>`"));
                }
                let v = parts[2].parse().map_err(|_| err(parts[2], "bad variable count"))?;
                let c = parts[3].parse().map_err(|_| err(parts[3], "bad clause count"))?;
                header = Some((v, c));
                continue;
            }
            let Some((num_vars, _)) = header else {
                return Err(err(trimmed, "clause before the `p cnf` header"));
            };
            for token in trimmed.split_whitespace() {
                let lit: i32 = token.parse().map_err(|_| err(token, "expected an integer literal"))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > num_vars {
                    return Err(err(token, "literal exceeds the declared variable count"));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((num_vars, num_clauses)) = header else {
            return Err(Error::Parse {
                token: String::new(),
                position: 1,
                reason: "missing `p cnf` header".into(),
            });
        };
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != num_clauses {
            return Err(Error::Parse {
                token: format!("p cnf {num_vars} {num_clauses}"),
                position: 1,
                reason: format!("header declares {num_clauses} clauses, found {}", clauses.len()),
            });
        }
        Cnf::new(num_vars, clauses)
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.num_vars, self.clauses.len())?;
        for c in &self.clauses {
            for l in c {
                write!(f, "{l} ")?;
            }
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// What a value of the reduced instance stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowRole {
    /// `x_k = true` (1-based `k`).
    VariableTrue(usize),
    VariableFalse(usize),
    /// Slack row `slot` (0 or 1) of clause `clause` (1-based).
    ClauseSlack { clause: usize, slot: usize },
    /// Stand-in value so a formula with no variables still yields `n >= 1`.
    Padding,
}

impl fmt::Display for RowRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowRole::VariableTrue(k) => write!(f, "x{k}=true"),
            RowRole::VariableFalse(k) => write!(f, "x{k}=false"),
            RowRole::ClauseSlack { clause, slot } => write!(f, "clause{clause}.slack{slot}"),
            RowRole::Padding => f.write_str("padding"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub instance: Instance,
    /// `roles[i]` describes `instance.values[i]`.
    pub roles: Vec<RowRole>,
    /// Digit columns, variables first.
    pub columns: usize,
}

/// Decimal digits (column-major: column 0 is the most significant) to a number.
fn digits_to_number(digits: &[u8]) -> BigUint {
    let s: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
    if s.is_empty() {
        BigUint::default()
    } else {
        s.parse().expect("decimal digits")
    }
}

/// The digit table behind [`reduce_3sat`]: `(target_digits, row_digits, roles)`.
pub fn digit_table(cnf: &Cnf) -> Result<(Vec<u8>, Vec<Vec<u8>>, Vec<RowRole>), Error> {
    let v = cnf.num_vars;
    let c = cnf.clauses.len();
    for (j, clause) in cnf.clauses.iter().enumerate() {
        if clause.is_empty() {
            return Err(Error::Precondition(format!("clause {} is empty", j + 1)));
        }
        if clause.len() > 3 {
            return Err(Error::Precondition(format!(
                "clause {} has {} literals; at most 3 are allowed",
                j + 1,
                clause.len()
            )));
        }
    }
    let width = v + c;
    let mut rows = Vec::with_capacity(2 * v + 2 * c);
    let mut roles = Vec::with_capacity(rows.capacity());
    for k in 1..=v {
        for positive in [true, false] {
            let mut d = vec![0u8; width];
            d[k - 1] = 1;
            for (j, clause) in cnf.clauses.iter().enumerate() {
                let hits = clause
                    .iter()
                    .filter(|&&l| l.unsigned_abs() as usize == k && (l > 0) == positive)
                    .count();
                d[v + j] = hits as u8;
            }
            rows.push(d);
            roles.push(if positive { RowRole::VariableTrue(k) } else { RowRole::VariableFalse(k) });
        }
    }
    for j in 0..c {
        for slot in 0..2 {
            let mut d = vec![0u8; width];
            d[v + j] = 1;
            rows.push(d);
            roles.push(RowRole::ClauseSlack { clause: j + 1, slot });
        }
    }
    let mut target = vec![1u8; v];
    target.extend(std::iter::repeat_n(3u8, c));
    Ok((target, rows, roles))
}

pub fn reduce_3sat(cnf: &Cnf) -> Result<ReductionOutput, Error> {
    let (target, rows, mut roles) = digit_table(cnf)?;
    let mut values: Vec<BigUint> = rows.iter().map(|r| digits_to_number(r)).collect();
    if values.is_empty() {
        values.push(BigUint::default());
        roles.push(RowRole::Padding);
    }
    Ok(ReductionOutput {
        instance: Instance::new(digits_to_number(&target), values)?,
        roles,
        columns: target.len(),
    })
}

/// Selects the row matching each variable's value, plus enough slack rows to
/// bring every clause column to exactly 3.
pub fn map_witness(cnf: &Cnf, assignment: &[bool]) -> Result<WitnessSubset, Error> {
    if assignment.len() != cnf.num_vars {
        return Err(Error::Precondition(format!(
            "assignment has {} values for {} variables",
            assignment.len(),
            cnf.num_vars
        )));
    }
    if !cnf.is_satisfied_by(assignment) {
        return Err(Error::Precondition("assignment does not satisfy the formula".into()));
    }
    let out = reduce_3sat(cnf)?;
    let selection = out
        .roles
        .iter()
        .map(|role| match *role {
            RowRole::VariableTrue(k) => assignment[k - 1],
            RowRole::VariableFalse(k) => !assignment[k - 1],
            RowRole::ClauseSlack { clause, slot } => {
                let true_hits = cnf.clauses[clause - 1]
                    .iter()
                    .filter(|&&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
                    .count();
                slot < 3 - true_hits
            }
            RowRole::Padding => false,
        })
        .collect();
    Ok(WitnessSubset(selection))
}

/// Exhaustive search; returns a satisfying assignment if one exists.
pub fn brute_sat(cnf: &Cnf, limit: usize) -> Result<Option<Vec<bool>>, Error> {
    if cnf.num_vars > limit {
        return Err(Error::LimitExceeded { what: "number of variables", size: cnf.num_vars, limit });
    }
    Ok((0..1u64 << cnf.num_vars)
        .map(|mask| (0..cnf.num_vars).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .find(|a| cnf.is_satisfied_by(a)))
}

/// Every satisfying assignment.
pub fn all_models(cnf: &Cnf, limit: usize) -> Result<Vec<Vec<bool>>, Error> {
    if cnf.num_vars > limit {
        return Err(Error::LimitExceeded { what: "number of variables", size: cnf.num_vars, limit });
    }
    Ok((0..1u64 << cnf.num_vars)
        .map(|mask| (0..cnf.num_vars).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|a| cnf.is_satisfied_by(a))
        .collect())
}

/// All formulas with `1..=max_vars` variables and at most `max_clauses`
/// clauses, where a clause is a nonempty set of at most three literals over
/// distinct variables and a formula is a multiset of clauses.
pub fn small_cnf_family(max_vars: usize, max_clauses: usize) -> Vec<Cnf> {
    let mut family = Vec::new();
    for v in 1..=max_vars {
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        for vars in 1u32..1 << v {
            let chosen: Vec<i32> = (0..v as i32).filter(|i| vars >> i & 1 == 1).map(|i| i + 1).collect();
            if chosen.len() > 3 {
                continue;
            }
            for signs in 0u32..1 << chosen.len() {
                clauses.push(
                    chosen
                        .iter()
                        .enumerate()
                        .map(|(i, &x)| if signs >> i & 1 == 1 { -x } else { x })
                        .collect(),
                );
            }
        }
        // Multisets as nondecreasing index sequences.
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((picked, from)) = stack.pop() {
            family.push(Cnf {
                num_vars: v,
                clauses: picked.iter().map(|&i| clauses[i].clone()).collect(),
            });
            if picked.len() < max_clauses {
                for i in from..clauses.len() {
                    let mut next = picked.clone();
                    next.push(i);
                    stack.push((next, i));
                }
            }
        }
    }
    family
}
