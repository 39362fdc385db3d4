//! Stage-by-stage approximations of the witness subtree for existential and
//! Σ2-separated sentences, and the witness search built on them.
//!
//! At stage `s` the anchor `gamma` ranges over tuples at levels `<= s`. With
//! conditions `own_i` (checked at the anchor's level) and `ext_i` (checked at
//! level `s`), `gamma` qualifies through index `i` when `own_i(gamma)` holds
//! and some tuple at level `s` extending `gamma` satisfies `ext_i`. The anchor
//! is the shortest, then leftmost, qualifying tuple; `i` is the least index.
//!
//! Existential prenex sentence with DNF matrix `a_0 | a_1 | ...`: `own_i = ext_i = a_i`.
//! Σ2-separated `exists G. forall H. (alpha & phi)`: one index, with
//! `own = forall H. alpha` and `ext = forall H. phi`.

use std::collections::HashSet;

use super::{dfs, params_at, Compiled, SearchOutcome};
use crate::error::{Error, Result};
use crate::formula::{
    classify, is_positive, is_qf_negative, qf_normal, sigma_level, Class, Formula, NormalMode, Quantifier, Term,
};
use crate::galois_tree::{level_tuples, GaloisTree, PathPrefix, ProductNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotKind {
    /// Only the restriction of the anchor.
    Prefix,
    /// Extensions of the anchor satisfying the extension condition.
    Satisfying,
    /// No satisfying extension: every child of the previous level.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnapshotLevel {
    pub level: usize,
    pub kind: SnapshotKind,
    pub members: Vec<ProductNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageState {
    pub stage: usize,
    pub gamma: Option<ProductNode>,
    pub disjunct_index: Option<usize>,
    /// Levels `0..=depth` of the approximating tree; empty without an anchor.
    pub snapshot: Vec<SnapshotLevel>,
    /// Stages at which the anchor or its index changed, up to this stage.
    pub reset_history: Vec<usize>,
}

impl StageState {
    pub fn contains(&self, node: &ProductNode) -> bool {
        self.snapshot
            .get(node.level)
            .is_some_and(|l| l.members.binary_search(node).is_ok())
    }
}

pub struct StageConstruction<'t> {
    tree: &'t GaloisTree,
    vars: Vec<String>,
    params: Vec<PathPrefix>,
    own: Vec<Compiled>,
    ext: Vec<Compiled>,
    depth: usize,
}

fn conjunction(parts: Vec<Formula>) -> Formula {
    match parts.len() {
        0 => Formula::eq(Term::Identity, Term::Identity),
        1 => parts.into_iter().next().unwrap(),
        _ => Formula::And(parts),
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(fs) => fs.iter().for_each(|g| flatten_and(g, out)),
        _ => out.push(f.clone()),
    }
}

fn is_literal(f: &Formula) -> bool {
    match f {
        Formula::Eq(..) => true,
        Formula::Not(g) => matches!(**g, Formula::Eq(..)),
        _ => false,
    }
}

fn is_literal_conjunction(f: &Formula) -> bool {
    match f {
        Formula::And(fs) => fs.iter().all(is_literal_conjunction),
        _ => is_literal(f),
    }
}

fn check_depth(tree: &GaloisTree, params: &[PathPrefix], depth: usize) -> Result<()> {
    tree.level(depth)?;
    params_at(tree, params, depth)?;
    Ok(())
}

impl<'t> StageConstruction<'t> {
    /// For `exists G1 ... Gm. (a_0 | a_1 | ...)` with each `a_i` a conjunction of literals.
    pub fn sigma1(tree: &'t GaloisTree, phi: &Formula, params: &[PathPrefix], depth: usize) -> Result<Self> {
        let (prefix, matrix) = phi.prefix();
        if prefix.is_empty() || prefix.iter().any(|(q, _)| *q != Quantifier::Exists) || !matrix.is_quantifier_free() {
            return Err(Error::invalid("expected an existential prenex sentence"));
        }
        let disjuncts: Vec<Formula> = match matrix {
            Formula::Or(fs) => fs.clone(),
            f => vec![f.clone()],
        };
        if !disjuncts.iter().all(is_literal_conjunction) {
            return Err(Error::invalid("matrix is not in disjunctive normal form"));
        }
        phi.check_params(params.len())?;
        check_depth(tree, params, depth)?;
        let vars: Vec<String> = prefix.iter().map(|(_, v)| v.to_string()).collect();
        let compiled = disjuncts
            .iter()
            .map(|d| Compiled::new(d, &vars))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tree,
            vars,
            params: params.to_vec(),
            own: compiled.clone(),
            ext: compiled,
            depth,
        })
    }

    /// For `exists G. forall H. (alpha & phi)`, `alpha` quantifier-free negative
    /// and `phi` positive; either block may be empty.
    pub fn sigma2(tree: &'t GaloisTree, psi: &Formula, params: &[PathPrefix], depth: usize) -> Result<Self> {
        let mut cur = psi;
        let mut vars = Vec::new();
        while let Formula::Exists(v, g) = cur {
            vars.push(v.clone());
            cur = g;
        }
        let mut hvars = Vec::new();
        while let Formula::Forall(v, g) = cur {
            hvars.push(v.clone());
            cur = g;
        }
        let mut parts = Vec::new();
        flatten_and(cur, &mut parts);
        let (mut alpha, mut phi) = (Vec::new(), Vec::new());
        if is_qf_negative(cur) {
            alpha.push(cur.clone());
        } else {
            for p in parts {
                if is_positive(&p) {
                    phi.push(p);
                } else if is_qf_negative(&p) {
                    alpha.push(p);
                } else {
                    return Err(Error::invalid(format!(
                        "not of the form exists G. forall H. (negative & positive): `{p}`"
                    )));
                }
            }
        }
        psi.check_params(params.len())?;
        check_depth(tree, params, depth)?;
        let close = |f: Formula| hvars.iter().rev().fold(f, |acc, h| Formula::forall(h, acc));
        let own = Compiled::new(&close(conjunction(alpha)), &vars)?;
        let ext = Compiled::new(&close(conjunction(phi)), &vars)?;
        Ok(Self {
            tree,
            vars,
            params: params.to_vec(),
            own: vec![own],
            ext: vec![ext],
            depth,
        })
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn holds(&self, c: &Compiled, t: &ProductNode) -> bool {
        let p = params_at(self.tree, &self.params, t.level).expect("depth checked");
        c.eval(self.tree, t.level, &t.entries, &p)
    }

    fn anchor(&self, s: usize) -> Option<(ProductNode, usize)> {
        let top = level_tuples(self.tree, s, self.arity());
        let sat: Vec<Vec<&ProductNode>> = self
            .ext
            .iter()
            .map(|c| top.iter().filter(|t| self.holds(c, t)).collect())
            .collect();
        for level in 0..=s {
            let reach: Vec<HashSet<ProductNode>> = sat
                .iter()
                .map(|ts| ts.iter().map(|t| t.restrict(self.tree, level)).collect())
                .collect();
            for g in level_tuples(self.tree, level, self.arity()) {
                for (i, r) in reach.iter().enumerate() {
                    if r.contains(&g) && self.holds(&self.own[i], &g) {
                        return Some((g, i));
                    }
                }
            }
        }
        None
    }

    fn snapshot(&self, gamma: &ProductNode, i: usize) -> Vec<SnapshotLevel> {
        let mut levels: Vec<SnapshotLevel> = (0..=gamma.level.min(self.depth))
            .map(|n| SnapshotLevel {
                level: n,
                kind: SnapshotKind::Prefix,
                members: vec![gamma.restrict(self.tree, n)],
            })
            .collect();
        let mut descendants = vec![gamma.clone()];
        for n in gamma.level + 1..=self.depth {
            descendants = descendants.iter().flat_map(|d| d.children(self.tree)).collect();
            let mut sat: Vec<ProductNode> =
                descendants.iter().filter(|d| self.holds(&self.ext[i], d)).cloned().collect();
            let kind = if sat.is_empty() {
                sat = levels[n - 1].members.iter().flat_map(|d| d.children(self.tree)).collect();
                SnapshotKind::Trivial
            } else {
                SnapshotKind::Satisfying
            };
            sat.sort();
            levels.push(SnapshotLevel {
                level: n,
                kind,
                members: sat,
            });
        }
        levels
    }

    /// Stages `0..=upto`.
    pub fn run(&self, upto: usize) -> Result<Vec<StageState>> {
        if upto > self.depth {
            return Err(Error::OutOfRange {
                level: upto,
                height: self.depth,
            });
        }
        let mut out: Vec<StageState> = Vec::with_capacity(upto + 1);
        let mut history = Vec::new();
        for s in 0..=upto {
            let chosen = self.anchor(s);
            let (gamma, idx) = match &chosen {
                Some((g, i)) => (Some(g.clone()), Some(*i)),
                None => (None, None),
            };
            let changed = match out.last() {
                Some(prev) => prev.gamma != gamma || prev.disjunct_index != idx,
                None => gamma.is_some(),
            };
            if changed {
                history.push(s);
            }
            let snapshot = match &chosen {
                Some((g, i)) => self.snapshot(g, *i),
                None => Vec::new(),
            };
            out.push(StageState {
                stage: s,
                gamma,
                disjunct_index: idx,
                snapshot,
                reset_history: history.clone(),
            });
        }
        Ok(out)
    }
}

/// Stage `s` for an existential prenex sentence with DNF matrix.
pub fn sigma1_stage(tree: &GaloisTree, phi: &Formula, params: &[PathPrefix], s: usize) -> Result<StageState> {
    let c = StageConstruction::sigma1(tree, phi, params, tree.height())?;
    Ok(c.run(s)?.pop().unwrap())
}

/// Stage `s` for a Σ2-separated sentence.
pub fn sigma2_stage(tree: &GaloisTree, psi: &Formula, params: &[PathPrefix], s: usize) -> Result<StageState> {
    let c = StageConstruction::sigma2(tree, psi, params, tree.height())?;
    Ok(c.run(s)?.pop().unwrap())
}

#[derive(Debug, Clone)]
pub struct WitnessRun {
    pub states: Vec<StageState>,
    pub outcome: SearchOutcome,
    /// Last reset, when the final stage has an anchor.
    pub s0: Option<usize>,
}

impl WitnessRun {
    pub fn final_state(&self) -> &StageState {
        self.states.last().unwrap()
    }
}

/// Builds the construction the sentence's class calls for.
pub fn construction_for<'t>(
    tree: &'t GaloisTree,
    sentence: &Formula,
    params: &[PathPrefix],
    depth: usize,
) -> Result<StageConstruction<'t>> {
    if !sentence.free_vars().is_empty() {
        return Err(Error::UnboundVariable(sentence.free_vars().into_iter().next().unwrap()));
    }
    if classify(sentence).contains(&Class::ExistentialPrenex) {
        let (prefix, matrix) = sentence.prefix();
        let dnf = qf_normal(matrix, NormalMode::Dnf)?;
        let phi = prefix.iter().rev().fold(dnf, |acc, (_, v)| Formula::exists(v, acc));
        StageConstruction::sigma1(tree, &phi, params, depth)
    } else if sigma_level(sentence).is_some_and(|n| n <= 2) {
        StageConstruction::sigma2(tree, sentence, params, depth)
    } else {
        Err(Error::Unsupported(
            "witness search needs an existential prenex sentence or a Σ2-separated one".into(),
        ))
    }
}

/// Runs every stage up to `max_depth`, then searches the final approximation
/// for a chain of witness tuples.
pub fn witness_stages(
    tree: &GaloisTree,
    sentence: &Formula,
    params: &[PathPrefix],
    max_depth: usize,
) -> Result<WitnessRun> {
    let c = construction_for(tree, sentence, params, max_depth)?;
    let states = c.run(max_depth)?;
    let last = states.last().unwrap();
    let (outcome, s0) = if last.gamma.is_some() {
        let mut chain = Vec::new();
        let mut deepest = None;
        let found = dfs(
            tree,
            &ProductNode::root(c.arity()),
            max_depth,
            &mut chain,
            &mut deepest,
            &mut |t| Ok(last.contains(t)),
        )?;
        let outcome = if found {
            SearchOutcome::WitnessPrefix(chain, max_depth)
        } else {
            SearchOutcome::DepthExhausted(deepest.unwrap_or(0))
        };
        (outcome, last.reset_history.last().copied())
    } else if is_positive(sentence) {
        let died = states
            .iter()
            .rev()
            .take_while(|s| s.gamma.is_none())
            .last()
            .map_or(max_depth, |s| s.stage);
        (SearchOutcome::RefutedFinite(died), None)
    } else {
        (SearchOutcome::DepthExhausted(max_depth), None)
    };
    Ok(WitnessRun { states, outcome, s0 })
}
