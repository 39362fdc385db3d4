//! Bounded decisions for existential and universal sentences, and the
//! downward-persistence check for positive ones.

use super::{eval_finite, params_at, Compiled};
use crate::error::{Error, Result};
use crate::formula::{classify, is_positive, to_dnf, Class, Formula, Literal, Term};
use crate::galois_tree::{level_tuples, GaloisTree, PathPrefix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoryVerdict {
    True,
    False,
    Unknown,
}

impl TheoryVerdict {
    fn flip(self) -> Self {
        match self {
            Self::True => Self::False,
            Self::False => Self::True,
            Self::Unknown => Self::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Letter {
    Var(String, bool),
    Param(usize, bool),
}

impl Letter {
    fn inverse(&self) -> Self {
        match self {
            Letter::Var(v, s) => Letter::Var(v.clone(), !s),
            Letter::Param(i, s) => Letter::Param(*i, !s),
        }
    }
}

fn word(t: &Term, inverted: bool, out: &mut Vec<Letter>) {
    match t {
        Term::Identity => {}
        Term::Var(v) => push_reduced(out, Letter::Var(v.clone(), !inverted)),
        Term::Param(i) => push_reduced(out, Letter::Param(*i, !inverted)),
        Term::Inverse(a) => word(a, !inverted, out),
        Term::Compose(a, b) => {
            if inverted {
                word(b, true, out);
                word(a, true, out);
            } else {
                word(a, false, out);
                word(b, false, out);
            }
        }
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// Does `lhs = rhs` hold in the free group on the variables and parameters?
pub fn free_group_trivial(lhs: &Term, rhs: &Term) -> bool {
    let mut w = Vec::new();
    word(lhs, false, &mut w);
    word(rhs, true, &mut w);
    w.is_empty()
}

struct Disjunct {
    equations: Compiled,
    inequations: Compiled,
    equations_trivial: bool,
}

fn conj(lits: &[&Literal]) -> Formula {
    match lits.len() {
        0 => Formula::eq(Term::Identity, Term::Identity),
        1 => lits[0].to_formula(),
        _ => Formula::And(lits.iter().map(|l| l.to_formula()).collect()),
    }
}

fn decide_existential(
    tree: &GaloisTree,
    vars: &[String],
    clauses: &[Vec<Literal>],
    params: &[PathPrefix],
    depth: usize,
) -> Result<TheoryVerdict> {
    let mut live = Vec::new();
    for c in clauses {
        if c.iter().any(|l| !l.positive && free_group_trivial(&l.lhs, &l.rhs)) {
            continue;
        }
        let (eqs, neqs): (Vec<&Literal>, Vec<&Literal>) = c.iter().partition(|l| l.positive);
        live.push(Disjunct {
            equations_trivial: eqs.iter().all(|l| free_group_trivial(&l.lhs, &l.rhs)),
            equations: Compiled::new(&conj(&eqs), vars)?,
            inequations: Compiled::new(&conj(&neqs), vars)?,
        });
    }
    if live.is_empty() {
        return Ok(TheoryVerdict::False);
    }
    for n in 0..=depth {
        let p = params_at(tree, params, n)?;
        let tuples = level_tuples(tree, n, vars.len());
        // inequations persist upward, so a realization is final when the
        // equations hold everywhere
        for d in live.iter().filter(|d| d.equations_trivial) {
            if tuples.iter().any(|t| d.inequations.eval(tree, n, &t.entries, &p)) {
                return Ok(TheoryVerdict::True);
            }
        }
        // equations persist downward, so an empty level rules them out above
        if live
            .iter()
            .all(|d| !tuples.iter().any(|t| d.equations.eval(tree, n, &t.entries, &p)))
        {
            return Ok(TheoryVerdict::False);
        }
    }
    Ok(TheoryVerdict::Unknown)
}

/// Decides an existential or universal prenex sentence from the levels up
/// to `depth`, answering `Unknown` when that evidence is not conclusive.
pub fn existential_theory(
    tree: &GaloisTree,
    phi: &Formula,
    params: &[PathPrefix],
    depth: usize,
) -> Result<TheoryVerdict> {
    tree.level(depth)?;
    phi.check_params(params.len())?;
    if !phi.free_vars().is_empty() {
        return Err(Error::UnboundVariable(phi.free_vars().into_iter().next().unwrap()));
    }
    let tags = classify(phi);
    let (prefix, matrix) = phi.prefix();
    let vars: Vec<String> = prefix.iter().map(|(_, v)| v.to_string()).collect();
    if tags.contains(&Class::ExistentialPrenex) {
        decide_existential(tree, &vars, &to_dnf(matrix)?, params, depth)
    } else if tags.contains(&Class::UniversalPrenex) {
        let negated = Formula::not(matrix.clone());
        Ok(decide_existential(tree, &vars, &to_dnf(&negated)?, params, depth)?.flip())
    } else {
        Err(Error::Unsupported(
            "bounded decision needs an existential or universal prenex sentence".into(),
        ))
    }
}

/// Truth at level `k + 1` implies truth at level `k`, for every `k < n`.
pub fn transfer_check(tree: &GaloisTree, phi: &Formula, params: &[PathPrefix], n: usize) -> Result<bool> {
    if !is_positive(phi) {
        return Err(Error::invalid("transfer check needs a positive sentence"));
    }
    let values = (0..=n)
        .map(|k| eval_finite(tree, phi, k, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.windows(2).all(|w| !w[1] || w[0]))
}
