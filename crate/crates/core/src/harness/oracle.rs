//! Model checking and an exhaustive reference solver for small formulas.

use crate::cdcl::SolveStatus;
use crate::formula::{Formula, Lit, Var};

/// Largest variable count [`brute_force`] accepts.
pub const MAX_BRUTE_FORCE_VARS: u32 = 25;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("{num_vars} variables exceed the brute-force limit of {MAX_BRUTE_FORCE_VARS}")]
    TooLarge { num_vars: u32 },
}

/// True iff `model` assigns every variable and satisfies every clause.
pub fn verify_model(formula: &Formula, model: &[bool]) -> bool {
    if formula.has_empty_clause() || model.len() < formula.num_vars() as usize {
        return false;
    }
    formula
        .clauses()
        .iter()
        .all(|c| c.lits().iter().any(|&l| model[l.var().index()] == l.is_positive()))
}

// Bit i of LOW_PATTERNS[v] is the value of variable v in assignment i, for v < 6.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Enumerates all assignments, 64 at a time. Returns the first model in
/// counting order (variable 0 is the least significant bit).
pub fn brute_force(formula: &Formula) -> Result<SolveStatus, OracleError> {
    let n = formula.num_vars();
    if n > MAX_BRUTE_FORCE_VARS {
        return Err(OracleError::TooLarge { num_vars: n });
    }
    if formula.has_empty_clause() {
        return Ok(SolveStatus::Unsat);
    }
    let low_bits = n.min(6);
    let width_mask = if low_bits == 6 { u64::MAX } else { (1u64 << (1u64 << low_bits)) - 1 };
    let blocks: u64 = 1u64 << n.saturating_sub(6);
    let clauses: Vec<&[Lit]> = formula.clauses().iter().map(|c| c.lits()).collect();

    for block in 0..blocks {
        let mut alive = width_mask;
        for lits in &clauses {
            let mut sat = 0u64;
            for &l in *lits {
                let v = l.var().0;
                let word = if v < 6 {
                    LOW_PATTERNS[v as usize]
                } else if block >> (v - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                };
                sat |= if l.is_positive() { word } else { !word };
            }
            alive &= sat;
            if alive == 0 {
                break;
            }
        }
        if alive != 0 {
            let index = (block << 6) | alive.trailing_zeros() as u64;
            let model = (0..n).map(|v| index >> v & 1 == 1).collect();
            return Ok(SolveStatus::Sat(model));
        }
    }
    Ok(SolveStatus::Unsat)
}

/// True iff every model of `formula` satisfies `clause`.
///
/// The formula is simplified under the negation of `clause` and the
/// remaining variables are enumerated, so the size limit applies to those.
pub fn implied(formula: &Formula, clause: &[Lit]) -> Result<bool, OracleError> {
    if formula.has_empty_clause() {
        return Ok(true);
    }
    let n = formula.num_vars() as usize;
    // value[v]: Some(b) if the negated clause fixes v to b
    let mut value: Vec<Option<bool>> = vec![None; n];
    for &l in clause {
        match value[l.var().index()] {
            // both polarities in the clause: a tautology
            Some(v) if v == l.is_positive() => return Ok(true),
            _ => value[l.var().index()] = Some(!l.is_positive()),
        }
    }
    let mut rename: Vec<Option<u32>> = vec![None; n];
    let mut free = 0u32;
    let mut reduced = Vec::new();
    for c in formula.clauses() {
        let mut rest = Vec::new();
        let mut satisfied = false;
        for &l in c.lits() {
            match value[l.var().index()] {
                Some(v) if v == l.is_positive() => {
                    satisfied = true;
                    break;
                }
                Some(_) => {}
                None => rest.push(l),
            }
        }
        if satisfied {
            continue;
        }
        if rest.is_empty() {
            return Ok(true);
        }
        let renamed = rest
            .into_iter()
            .map(|l| {
                let slot = &mut rename[l.var().index()];
                let v = *slot.get_or_insert_with(|| {
                    free += 1;
                    free - 1
                });
                Var(v).lit(l.is_positive())
            })
            .collect();
        reduced.push(renamed);
    }
    Ok(brute_force(&Formula::new(free, reduced))? == SolveStatus::Unsat)
}

/// Pigeonhole formula: `pigeons` pigeons into `holes` holes.
pub fn pigeonhole(pigeons: u32, holes: u32) -> Formula {
    let var = |p: u32, h: u32| Var(p * holes + h).lit(true);
    let mut clauses = Vec::new();
    for p in 0..pigeons {
        clauses.push((0..holes).map(|h| var(p, h)).collect());
    }
    for h in 0..holes {
        for p in 0..pigeons {
            for q in p + 1..pigeons {
                clauses.push(vec![!var(p, h), !var(q, h)]);
            }
        }
    }
    Formula::new(pigeons * holes, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_examples() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2]]);
        assert!(verify_model(&f, &[true, false]));
        let g = Formula::from_dimacs_clauses(1, &[&[1], &[-1]]);
        assert!(!verify_model(&g, &[true]));
        assert!(!verify_model(&g, &[false]));
        assert!(verify_model(&Formula::new(0, []), &[]));
        assert!(!verify_model(&f, &[true]));
    }

    #[test]
    fn brute_force_examples() {
        let f = Formula::from_dimacs_clauses(2, &[&[1, 2], &[-1, 2]]);
        let SolveStatus::Sat(m) = brute_force(&f).unwrap() else {
            panic!("expected SAT");
        };
        assert!(verify_model(&f, &m));
        assert_eq!(brute_force(&pigeonhole(4, 3)).unwrap(), SolveStatus::Unsat);
        assert!(matches!(brute_force(&pigeonhole(3, 3)).unwrap(), SolveStatus::Sat(_)));
        assert_eq!(
            brute_force(&Formula::new(26, [])),
            Err(OracleError::TooLarge { num_vars: 26 })
        );
        assert!(matches!(brute_force(&Formula::new(0, [])).unwrap(), SolveStatus::Sat(_)));
    }

    #[test]
    fn brute_force_uses_high_variables() {
        // only satisfiable with every variable true, including those >= 6
        let n = 9;
        let mut clauses: Vec<Vec<Lit>> = (0..n).map(|v| vec![Var(v).lit(true)]).collect();
        clauses.push((0..n).map(|v| Var(v).lit(true)).collect());
        let f = Formula::new(n, clauses);
        assert_eq!(brute_force(&f).unwrap(), SolveStatus::Sat(vec![true; 9]));
        let mut g: Vec<Vec<Lit>> = f.clauses().iter().map(|c| c.lits().to_vec()).collect();
        g.push(vec![Var(8).lit(false)]);
        assert_eq!(brute_force(&Formula::new(n, g)).unwrap(), SolveStatus::Unsat);
    }

    #[test]
    fn implied_example() {
        // (¬a ∨ b) ∧ (b ∨ c ∨ a) implies (b ∨ c)
        let f = Formula::from_dimacs_clauses(3, &[&[-1, 2], &[2, 3, 1]]);
        let bc = [Lit::from_dimacs(2), Lit::from_dimacs(3)];
        assert!(implied(&f, &bc).unwrap());
        assert!(!implied(&f, &[Lit::from_dimacs(3)]).unwrap());
        assert!(implied(&f, &[Lit::from_dimacs(1), Lit::from_dimacs(-1)]).unwrap());
        assert!(implied(&Formula::new(2, [vec![]]), &[]).unwrap());
        assert!(!implied(&Formula::new(2, []), &[]).unwrap());
    }

    #[test]
    fn implied_matches_direct_check() {
        use crate::harness::gen_random_3sat;
        for seed in 0..60 {
            let f = gen_random_3sat(12, 30, seed);
            let c: Vec<Lit> = f.clauses()[0].lits().iter().map(|&l| !l).take(2).collect();
            let negated = f
                .clauses()
                .iter()
                .map(|c| c.lits().to_vec())
                .chain(c.iter().map(|&l| vec![!l]));
            let direct = brute_force(&Formula::new(12, negated)).unwrap() == SolveStatus::Unsat;
            assert_eq!(implied(&f, &c).unwrap(), direct, "seed {seed}");
        }
    }
}
