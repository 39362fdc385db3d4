//! First-order formulas in the language of groups with parameter slots `a0, a1, ...`.

mod classify;
mod normal;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

pub use classify::{classify, is_positive, is_qf_negative, is_separated, pi_level, sigma_level, Class};
pub use normal::{prenex_positive, qf_normal, to_cnf, to_dnf, Literal, NormalMode};
pub use parse::{parse, parse_open};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Param(usize),
    Identity,
    Compose(Box<Term>, Box<Term>),
    Inverse(Box<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn compose(a: Term, b: Term) -> Self {
        Term::Compose(Box::new(a), Box::new(b))
    }

    pub fn inverse(a: Term) -> Self {
        Term::Inverse(Box::new(a))
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Param(_) | Term::Identity => {}
            Term::Compose(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Inverse(a) => a.collect_vars(out),
        }
    }

    fn max_param(&self) -> Option<usize> {
        match self {
            Term::Param(i) => Some(*i),
            Term::Var(_) | Term::Identity => None,
            Term::Compose(a, b) => a.max_param().max(b.max_param()),
            Term::Inverse(a) => a.max_param(),
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Compose(a, b) => Term::compose(a.rename(from, to), b.rename(from, to)),
            Term::Inverse(a) => Term::inverse(a.rename(from, to)),
            t => t.clone(),
        }
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn exists(v: &str, f: Formula) -> Self {
        Formula::Exists(v.to_string(), Box::new(f))
    }

    pub fn forall(v: &str, f: Formula) -> Self {
        Formula::Forall(v.to_string(), Box::new(f))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().filter(|v| !bound.contains(v)));
            }
            Formula::Not(f) => f.free_into(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.free_into(bound, out)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.free_into(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name that occurs, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.names_into(&mut out);
        out
    }

    fn names_into(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Eq(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Formula::Not(f) => f.names_into(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.names_into(out)),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                out.insert(v.clone());
                f.names_into(out);
            }
        }
    }

    /// Highest parameter index used.
    pub fn max_param(&self) -> Option<usize> {
        match self {
            Formula::Eq(a, b) => a.max_param().max(b.max_param()),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.max_param(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_param).max(),
        }
    }

    /// Errors if some `a_i` has `i >= available`.
    pub fn check_params(&self, available: usize) -> crate::Result<()> {
        match self.max_param() {
            Some(i) if i >= available => Err(crate::Error::BadParameter { index: i, available }),
            _ => Ok(()),
        }
    }

    /// Substitutes `to` for free occurrences of `from`.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.rename(from, to), b.rename(from, to)),
            Formula::Not(f) => Formula::not(f.rename_free(from, to)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_free(from, to)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_free(from, to)).collect()),
            Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => self.clone(),
            Formula::Exists(v, f) => Formula::exists(v, f.rename_free(from, to)),
            Formula::Forall(v, f) => Formula::forall(v, f.rename_free(from, to)),
        }
    }

    /// Renames binders so that no two quantifiers bind the same name and no
    /// binder reuses a free name. Clashes get suffixes `_2`, `_3`, ...
    pub fn with_unique_binders(&self) -> Formula {
        let mut taken = self.free_vars();
        let all = self.all_names();
        self.unique_into(&mut taken, &all)
    }

    fn unique_into(&self, taken: &mut BTreeSet<String>, all: &BTreeSet<String>) -> Formula {
        match self {
            Formula::Eq(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.unique_into(taken, all)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.unique_into(taken, all)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.unique_into(taken, all)).collect()),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                let fresh = if taken.contains(v) {
                    (2..)
                        .map(|k| format!("{v}_{k}"))
                        .find(|c| !taken.contains(c) && !all.contains(c))
                        .unwrap()
                } else {
                    v.clone()
                };
                taken.insert(fresh.clone());
                let body = f.rename_free(v, &fresh).unique_into(taken, all);
                match self {
                    Formula::Exists(..) => Formula::exists(&fresh, body),
                    _ => Formula::forall(&fresh, body),
                }
            }
        }
    }

    /// Splits off the leading quantifier prefix.
    pub fn prefix(&self) -> (Vec<(Quantifier, &str)>, &Formula) {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Exists(v, f) => {
                    out.push((Quantifier::Exists, v.as_str()));
                    cur = f;
                }
                Formula::Forall(v, f) => {
                    out.push((Quantifier::Forall, v.as_str()));
                    cur = f;
                }
                _ => return (out, cur),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Param(i) => write!(f, "a{i}"),
            Term::Identity => write!(f, "e"),
            Term::Compose(a, b) => {
                write!(f, "{a}*")?;
                match **b {
                    Term::Compose(..) => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
            Term::Inverse(a) => match **a {
                Term::Var(_) | Term::Param(_) | Term::Identity => write!(f, "{a}^-1"),
                _ => write!(f, "({a})^-1"),
            },
        }
    }
}

impl Formula {
    // 0: quantified, 1: disjunction, 2: conjunction, 3: atomic or negation
    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Or(fs) if fs.len() != 1 => 1,
            Formula::And(fs) if fs.len() != 1 => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Not(g) => {
                write!(f, "~")?;
                match **g {
                    Formula::Not(_) => g.fmt_at(f, 3),
                    _ => {
                        write!(f, "(")?;
                        g.fmt_at(f, 0)?;
                        write!(f, ")")
                    }
                }
            }
            Formula::And(fs) | Formula::Or(fs) if fs.is_empty() => {
                let truth = matches!(self, Formula::And(_));
                write!(f, "{}", if truth { "e = e" } else { "~(e = e)" })
            }
            Formula::And(fs) | Formula::Or(fs) if fs.len() == 1 => fs[0].fmt_at(f, min),
            Formula::And(fs) | Formula::Or(fs) => {
                let (sep, child_min) = match self {
                    Formula::And(_) => (" & ", 3),
                    _ => (" | ", 2),
                };
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    g.fmt_at(f, child_min)?;
                }
                Ok(())
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let q = if matches!(self, Formula::Exists(..)) { "exists" } else { "forall" };
                write!(f, "{q} {v}. ")?;
                match g.precedence() {
                    1 | 2 => {
                        write!(f, "(")?;
                        g.fmt_at(f, 0)?;
                        write!(f, ")")
                    }
                    _ => g.fmt_at(f, 0),
                }
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
