//! Truth in the finite groups `Aut(F_n)`, formula-defined subtrees of the
//! product tree, leftmost path search, stage constructions and bounded
//! decisions for existential and universal sentences.

mod stages;
mod theory;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};
use crate::galois_tree::{level_tuples, GaloisTree, PathPrefix, ProductNode};

pub use stages::{
    construction_for, sigma1_stage, sigma2_stage, witness_stages, SnapshotKind, SnapshotLevel, StageConstruction, StageState,
    WitnessRun,
};
pub use theory::{existential_theory, free_group_trivial, transfer_check, TheoryVerdict};

#[derive(Debug, Clone)]
enum CTerm {
    Slot(usize),
    Param(usize),
    Identity,
    Mul(Box<CTerm>, Box<CTerm>),
    Inv(Box<CTerm>),
}

#[derive(Debug, Clone)]
enum CForm {
    Eq(CTerm, CTerm),
    Not(Box<CForm>),
    And(Vec<CForm>),
    Or(Vec<CForm>),
    Exists(usize, Box<CForm>),
    Forall(usize, Box<CForm>),
}

/// A formula with variables resolved to environment slots. The designated
/// free variables occupy slots `0..free`.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    form: CForm,
    slots: usize,
    free: usize,
}

impl Compiled {
    pub(crate) fn new(f: &Formula, free: &[String]) -> Result<Self> {
        let mut scope: Vec<(String, usize)> = free.iter().cloned().zip(0..).collect();
        let mut next = free.len();
        let form = compile_form(f, &mut scope, &mut next)?;
        Ok(Self {
            form,
            slots: next,
            free: free.len(),
        })
    }

    /// Truth at level `n` with the free variables bound to `free_vals` and the
    /// parameters to node indices `params` (both at level `n`).
    pub(crate) fn eval(&self, tree: &GaloisTree, n: usize, free_vals: &[usize], params: &[usize]) -> bool {
        debug_assert_eq!(free_vals.len(), self.free);
        let mut env = vec![0usize; self.slots];
        env[..self.free].copy_from_slice(free_vals);
        let ctx = Ctx { tree, n, params };
        ctx.form(&self.form, &mut env)
    }
}

fn compile_term(t: &Term, scope: &[(String, usize)]) -> Result<CTerm> {
    Ok(match t {
        Term::Var(v) => CTerm::Slot(
            scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, s)| *s)
                .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        ),
        Term::Param(i) => CTerm::Param(*i),
        Term::Identity => CTerm::Identity,
        Term::Compose(a, b) => CTerm::Mul(Box::new(compile_term(a, scope)?), Box::new(compile_term(b, scope)?)),
        Term::Inverse(a) => CTerm::Inv(Box::new(compile_term(a, scope)?)),
    })
}

fn compile_form(f: &Formula, scope: &mut Vec<(String, usize)>, next: &mut usize) -> Result<CForm> {
    Ok(match f {
        Formula::Eq(a, b) => CForm::Eq(compile_term(a, scope)?, compile_term(b, scope)?),
        Formula::Not(g) => CForm::Not(Box::new(compile_form(g, scope, next)?)),
        Formula::And(fs) => CForm::And(fs.iter().map(|g| compile_form(g, scope, next)).collect::<Result<_>>()?),
        Formula::Or(fs) => CForm::Or(fs.iter().map(|g| compile_form(g, scope, next)).collect::<Result<_>>()?),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let slot = *next;
            *next += 1;
            scope.push((v.clone(), slot));
            let body = Box::new(compile_form(g, scope, next)?);
            scope.pop();
            if matches!(f, Formula::Exists(..)) {
                CForm::Exists(slot, body)
            } else {
                CForm::Forall(slot, body)
            }
        }
    })
}

struct Ctx<'a> {
    tree: &'a GaloisTree,
    n: usize,
    params: &'a [usize],
}

impl Ctx<'_> {
    fn term(&self, t: &CTerm, env: &[usize]) -> usize {
        let tab = self.tree.table(self.n);
        match t {
            CTerm::Slot(s) => env[*s],
            CTerm::Param(i) => self.params[*i],
            CTerm::Identity => tab.identity(),
            CTerm::Mul(a, b) => tab.compose(self.term(a, env), self.term(b, env)),
            CTerm::Inv(a) => tab.invert(self.term(a, env)),
        }
    }

    fn form(&self, f: &CForm, env: &mut [usize]) -> bool {
        match f {
            CForm::Eq(a, b) => self.term(a, env) == self.term(b, env),
            CForm::Not(g) => !self.form(g, env),
            CForm::And(fs) => fs.iter().all(|g| self.form(g, env)),
            CForm::Or(fs) => fs.iter().any(|g| self.form(g, env)),
            CForm::Exists(slot, g) | CForm::Forall(slot, g) => {
                let want = matches!(f, CForm::Exists(..));
                for i in 0..self.tree.size(self.n) {
                    env[*slot] = i;
                    if self.form(g, env) == want {
                        return want;
                    }
                }
                !want
            }
        }
    }
}

/// Parameter node indices at level `n`.
pub(crate) fn params_at(tree: &GaloisTree, params: &[PathPrefix], n: usize) -> Result<Vec<usize>> {
    params
        .iter()
        .map(|p| {
            if p.top_level() < n {
                Err(Error::OutOfRange {
                    level: n,
                    height: p.top_level(),
                })
            } else {
                tree.level(n)?;
                Ok(p.at(n))
            }
        })
        .collect()
}

/// Truth of a sentence in `Aut(F_n)`, parameters restricted to level `n`.
pub fn eval_finite(tree: &GaloisTree, sentence: &Formula, n: usize, params: &[PathPrefix]) -> Result<bool> {
    let c = Compiled::new(sentence, &[])?;
    sentence.check_params(params.len())?;
    tree.level(n)?;
    let p = params_at(tree, params, n)?;
    Ok(c.eval(tree, n, &[], &p))
}

/// A formula `psi(G_1..G_m, a)` defining the subtree of tuples satisfying it.
#[derive(Debug, Clone)]
pub struct SubtreeSpec {
    body: Formula,
    vars: Vec<String>,
    params: Vec<PathPrefix>,
    compiled: Compiled,
}

impl SubtreeSpec {
    pub fn new(body: Formula, vars: Vec<String>, params: Vec<PathPrefix>) -> Result<Self> {
        body.check_params(params.len())?;
        let compiled = Compiled::new(&body, &vars)?;
        Ok(Self {
            body,
            vars,
            params,
            compiled,
        })
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn params(&self) -> &[PathPrefix] {
        &self.params
    }

    fn holds(&self, tree: &GaloisTree, candidate: &ProductNode) -> Result<bool> {
        let p = params_at(tree, &self.params, candidate.level)?;
        Ok(self.compiled.eval(tree, candidate.level, &candidate.entries, &p))
    }

    /// Members at level `n`, lexicographic.
    pub fn members(&self, tree: &GaloisTree, n: usize) -> Result<Vec<ProductNode>> {
        tree.level(n)?;
        let mut out = Vec::new();
        for t in level_tuples(tree, n, self.arity()) {
            if self.holds(tree, &t)? {
                out.push(t);
            }
        }
        Ok(out)
    }
}

pub fn in_subtree(tree: &GaloisTree, spec: &SubtreeSpec, candidate: &ProductNode) -> Result<bool> {
    if candidate.entries.len() != spec.arity() {
        return Err(Error::invalid(format!(
            "candidate has {} entries but the formula has {} free variables",
            candidate.entries.len(),
            spec.arity()
        )));
    }
    let tab = tree.level(candidate.level)?;
    if candidate.entries.iter().any(|&i| i >= tab.size()) {
        return Err(Error::invalid("candidate names a node that does not exist"));
    }
    spec.holds(tree, candidate)
}

/// Does every member at level `k + 1 <= n` restrict to a member at level `k`?
pub fn check_subtree_closure(tree: &GaloisTree, spec: &SubtreeSpec, n: usize) -> Result<bool> {
    tree.level(n)?;
    for k in 0..n {
        for m in spec.members(tree, k + 1)? {
            if !spec.holds(tree, &m.restrict(tree, k))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// A chain of tuples at levels `0..=certified_depth`, each in the subtree.
    WitnessPrefix(Vec<ProductNode>, usize),
    /// The subtree has no node at this level.
    RefutedFinite(usize),
    /// No chain reaches the requested depth although every level is inhabited;
    /// carries the deepest level a chain reached.
    DepthExhausted(usize),
}

/// Leftmost-first depth-first search for a chain through the subtree.
pub fn koenig_search(tree: &GaloisTree, spec: &SubtreeSpec, max_depth: usize) -> Result<SearchOutcome> {
    tree.level(max_depth)?;
    let mut deepest = None;
    let root = ProductNode::root(spec.arity());
    let mut chain = Vec::new();
    if dfs(tree, &root, max_depth, &mut chain, &mut deepest, &mut |t| spec.holds(tree, t))? {
        return Ok(SearchOutcome::WitnessPrefix(chain, max_depth));
    }
    for n in 0..=max_depth {
        if spec.members(tree, n)?.is_empty() {
            return Ok(SearchOutcome::RefutedFinite(n));
        }
    }
    Ok(SearchOutcome::DepthExhausted(deepest.unwrap_or(0)))
}

pub(crate) fn dfs(
    tree: &GaloisTree,
    node: &ProductNode,
    max_depth: usize,
    chain: &mut Vec<ProductNode>,
    deepest: &mut Option<usize>,
    member: &mut dyn FnMut(&ProductNode) -> Result<bool>,
) -> Result<bool> {
    if !member(node)? {
        return Ok(false);
    }
    chain.push(node.clone());
    *deepest = (*deepest).max(Some(node.level));
    if node.level == max_depth {
        return Ok(true);
    }
    for c in node.children(tree) {
        if dfs(tree, &c, max_depth, chain, deepest, member)? {
            return Ok(true);
        }
    }
    chain.pop();
    Ok(false)
}

/// Machine-readable summary of a check, serialized as JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictRecord {
    pub sentence: String,
    pub tower_id: String,
    pub depth: usize,
    pub verdict: String,
    /// Node indices of the witness tuple, one entry per level.
    pub witness: Option<Vec<Vec<usize>>>,
    pub s0: Option<usize>,
    pub reset_history: Vec<usize>,
}

impl VerdictRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Environment-free lookup used by tests and the CLI: node indices for a
/// named assignment at one level.
pub fn eval_open(
    tree: &GaloisTree,
    formula: &Formula,
    n: usize,
    assignment: &HashMap<String, usize>,
    params: &[PathPrefix],
) -> Result<bool> {
    let names: Vec<String> = formula.free_vars().into_iter().collect();
    let vals = names
        .iter()
        .map(|v| assignment.get(v).copied().ok_or_else(|| Error::UnboundVariable(v.clone())))
        .collect::<Result<Vec<_>>>()?;
    formula.check_params(params.len())?;
    let tab = tree.level(n)?;
    if vals.iter().any(|&i| i >= tab.size()) {
        return Err(Error::invalid("assignment names a node that does not exist"));
    }
    let c = Compiled::new(formula, &names)?;
    Ok(c.eval(tree, n, &vals, &params_at(tree, params, n)?))
}
