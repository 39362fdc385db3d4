//! Prenex form for positive formulas and disjunctive/conjunctive normal forms
//! for quantifier-free ones.

use super::classify::is_positive;
use super::{Formula, Quantifier, Term};
use crate::error::{Error, Result};

/// An equation or its negation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub lhs: Term,
    pub rhs: Term,
}

impl Literal {
    pub fn to_formula(&self) -> Formula {
        let eq = Formula::eq(self.lhs.clone(), self.rhs.clone());
        if self.positive {
            eq
        } else {
            Formula::not(eq)
        }
    }

    fn negated(&self) -> Self {
        Self {
            positive: !self.positive,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalMode {
    Dnf,
    Cnf,
}

/// Clauses of a DNF: the formula is the disjunction of the conjunctions.
pub fn to_dnf(f: &Formula) -> Result<Vec<Vec<Literal>>> {
    if !f.is_quantifier_free() {
        return Err(Error::invalid("normal forms need a quantifier-free formula"));
    }
    Ok(dnf(f, true))
}

/// Clauses of a CNF: the formula is the conjunction of the disjunctions.
pub fn to_cnf(f: &Formula) -> Result<Vec<Vec<Literal>>> {
    if !f.is_quantifier_free() {
        return Err(Error::invalid("normal forms need a quantifier-free formula"));
    }
    // CNF of f is the dual of the DNF of ~f.
    Ok(dnf(f, false)
        .into_iter()
        .map(|c| c.iter().map(Literal::negated).collect())
        .collect())
}

/// DNF of `f` (if `polarity`) or of `~f`.
fn dnf(f: &Formula, polarity: bool) -> Vec<Vec<Literal>> {
    match f {
        Formula::Eq(a, b) => vec![vec![Literal {
            positive: polarity,
            lhs: a.clone(),
            rhs: b.clone(),
        }]],
        Formula::Not(g) => dnf(g, !polarity),
        Formula::And(fs) | Formula::Or(fs) => {
            let conjunctive = matches!(f, Formula::And(_)) == polarity;
            if conjunctive {
                let mut acc = vec![Vec::new()];
                for g in fs {
                    let part = dnf(g, polarity);
                    acc = acc
                        .iter()
                        .flat_map(|c| {
                            part.iter().map(move |d| {
                                let mut x = c.clone();
                                x.extend(d.iter().cloned());
                                x
                            })
                        })
                        .collect();
                }
                acc
            } else {
                fs.iter().flat_map(|g| dnf(g, polarity)).collect()
            }
        }
        Formula::Exists(..) | Formula::Forall(..) => unreachable!("checked quantifier-free"),
    }
}

fn join(parts: Vec<Formula>, conj: bool) -> Formula {
    match parts.len() {
        1 => parts.into_iter().next().unwrap(),
        _ if conj => Formula::And(parts),
        _ => Formula::Or(parts),
    }
}

/// Equivalent formula in the requested normal form.
pub fn qf_normal(f: &Formula, mode: NormalMode) -> Result<Formula> {
    let (clauses, outer_conj) = match mode {
        NormalMode::Dnf => (to_dnf(f)?, false),
        NormalMode::Cnf => (to_cnf(f)?, true),
    };
    Ok(join(
        clauses
            .into_iter()
            .map(|c| join(c.iter().map(Literal::to_formula).collect(), !outer_conj))
            .collect(),
        outer_conj,
    ))
}

/// Pulls every quantifier of a positive formula to the front.
pub fn prenex_positive(f: &Formula) -> Result<Formula> {
    if !is_positive(f) {
        return Err(Error::invalid("prenex conversion is only defined for positive formulas"));
    }
    // binders are made unique first, so pulling them out cannot capture
    let (prefix, matrix) = pull(&f.with_unique_binders());
    Ok(prefix.into_iter().rev().fold(matrix, |acc, (q, v)| match q {
        Quantifier::Exists => Formula::exists(&v, acc),
        Quantifier::Forall => Formula::forall(&v, acc),
    }))
}

fn pull(f: &Formula) -> (Vec<(Quantifier, String)>, Formula) {
    match f {
        Formula::Eq(..) | Formula::Not(_) => (Vec::new(), f.clone()),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let q = if matches!(f, Formula::Exists(..)) {
                Quantifier::Exists
            } else {
                Quantifier::Forall
            };
            let (mut p, m) = pull(g);
            p.insert(0, (q, v.clone()));
            (p, m)
        }
        Formula::And(fs) | Formula::Or(fs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::new();
            for g in fs {
                let (p, m) = pull(g);
                prefix.extend(p);
                parts.push(m);
            }
            let m = if matches!(f, Formula::And(_)) {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            };
            (prefix, m)
        }
    }
}
