//! Syntactic classification: positive, quantifier-free negative, separated,
//! and the separated quantifier hierarchy.

use super::{Formula, Quantifier};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    Positive,
    QFNegative,
    Separated,
    SigmaSeparated(usize),
    PiSeparated(usize),
    ExistentialPrenex,
    UniversalPrenex,
    General,
}

impl std::fmt::Display for Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Class::Positive => f.write_str("positive"),
            Class::QFNegative => f.write_str("qf-negative"),
            Class::Separated => f.write_str("separated"),
            Class::SigmaSeparated(n) => write!(f, "sigma{n}-separated"),
            Class::PiSeparated(n) => write!(f, "pi{n}-separated"),
            Class::ExistentialPrenex => f.write_str("existential-prenex"),
            Class::UniversalPrenex => f.write_str("universal-prenex"),
            Class::General => f.write_str("general"),
        }
    }
}

/// No negation anywhere.
pub fn is_positive(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::Not(_) => false,
        Formula::And(fs) | Formula::Or(fs) => fs.iter().all(is_positive),
        Formula::Exists(_, g) | Formula::Forall(_, g) => is_positive(g),
    }
}

/// Negated equations combined with `&` and `|` only.
pub fn is_qf_negative(f: &Formula) -> bool {
    match f {
        Formula::Not(g) => matches!(**g, Formula::Eq(..)),
        Formula::And(fs) | Formula::Or(fs) => !fs.is_empty() && fs.iter().all(is_qf_negative),
        _ => false,
    }
}

fn conjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(fs) => fs.iter().for_each(|g| conjuncts(g, out)),
        _ => out.push(f),
    }
}

/// Positive, or a conjunction of a positive part and a quantifier-free
/// negative part (either part may be absent).
pub fn is_separated(f: &Formula) -> bool {
    if is_positive(f) || is_qf_negative(f) {
        return true;
    }
    let mut cs = Vec::new();
    conjuncts(f, &mut cs);
    cs.iter().all(|g| is_positive(g) || is_qf_negative(g))
}

fn strip_block(f: &Formula, q: Quantifier) -> &Formula {
    let mut cur = f;
    loop {
        match (cur, q) {
            (Formula::Exists(_, g), Quantifier::Exists) | (Formula::Forall(_, g), Quantifier::Forall) => cur = g,
            _ => return cur,
        }
    }
}

/// Least `n` with `f` Σ_n-separated (quantifier blocks may be empty).
pub fn sigma_level(f: &Formula) -> Option<usize> {
    if is_separated(f) {
        return Some(0);
    }
    match f {
        Formula::Exists(..) => pi_level(strip_block(f, Quantifier::Exists)).map(|n| n + 1),
        Formula::Forall(..) => pi_level(f).map(|n| n + 1),
        _ => None,
    }
}

/// Least `n` with `f` Π_n-separated.
pub fn pi_level(f: &Formula) -> Option<usize> {
    if is_separated(f) {
        return Some(0);
    }
    match f {
        Formula::Forall(..) => sigma_level(strip_block(f, Quantifier::Forall)).map(|n| n + 1),
        Formula::Exists(..) => sigma_level(f).map(|n| n + 1),
        _ => None,
    }
}

/// Every class that applies. Σ/Π levels are reported at their least value;
/// the level implied by an empty leading block is left out.
pub fn classify(f: &Formula) -> Vec<Class> {
    let mut out = Vec::new();
    if is_positive(f) {
        out.push(Class::Positive);
    }
    if is_qf_negative(f) {
        out.push(Class::QFNegative);
    }
    let separated = is_separated(f);
    if separated {
        out.push(Class::Separated);
    }
    if separated || !matches!(f, Formula::Forall(..)) {
        if let Some(n) = sigma_level(f) {
            out.push(Class::SigmaSeparated(n));
        }
    }
    if separated || !matches!(f, Formula::Exists(..)) {
        if let Some(n) = pi_level(f) {
            out.push(Class::PiSeparated(n));
        }
    }
    let (prefix, matrix) = f.prefix();
    if !prefix.is_empty() && matrix.is_quantifier_free() {
        if prefix.iter().all(|(q, _)| *q == Quantifier::Exists) {
            out.push(Class::ExistentialPrenex);
        }
        if prefix.iter().all(|(q, _)| *q == Quantifier::Forall) {
            out.push(Class::UniversalPrenex);
        }
    }
    if out.is_empty() {
        out.push(Class::General);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn tags(s: &str) -> Vec<Class> {
        classify(&parse(s).unwrap())
    }

    #[test]
    fn positive_existential() {
        let t = tags("exists G. G*G = a0");
        assert!(t.contains(&Class::Positive));
        assert!(t.contains(&Class::SigmaSeparated(0)));
        assert!(t.contains(&Class::ExistentialPrenex));
        assert!(!t.contains(&Class::General));
    }

    #[test]
    fn existential_with_inequation() {
        let t = tags("exists G. (G*G = a0 & ~(G = e))");
        assert_eq!(t, vec![Class::SigmaSeparated(1), Class::ExistentialPrenex]);
    }

    #[test]
    fn mixed_clauses_are_general() {
        assert_eq!(tags("(a0 = e | ~(a1 = e)) & (a1 = e | ~(a0 = e))"), vec![Class::General]);
    }

    #[test]
    fn sigma_two_shape() {
        let t = tags("exists G. forall H. (~(G = e) & G*H = H*G)");
        assert_eq!(t, vec![Class::SigmaSeparated(2)]);
        let t = tags("forall G. exists H. (H*H = G & ~(H = e))");
        assert_eq!(t, vec![Class::PiSeparated(2)]);
    }

    #[test]
    fn qf_negative() {
        let t = tags("~(a0 = e) | ~(a1 = a0)");
        assert_eq!(
            t,
            vec![Class::QFNegative, Class::Separated, Class::SigmaSeparated(0), Class::PiSeparated(0)]
        );
    }

    #[test]
    fn universal_prenex_with_negation() {
        let t = tags("forall G. (G = e | ~(G*G = e))");
        assert_eq!(t, vec![Class::UniversalPrenex]);
    }
}
