//! Test-side oracles: group tables rebuilt from field arithmetic, a direct
//! formula evaluator over them, and a seeded sentence generator.
#![allow(dead_code)]

use std::collections::HashMap;

use qbar_core::galois_tree::{self, TreeNode};
use qbar_core::{Formula, PathPrefix, QPoly, Term, Tower};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tower(schedule: &[&str]) -> Tower {
    let polys: Vec<QPoly> = schedule.iter().map(|s| s.parse().unwrap()).collect();
    Tower::from_schedule(&polys).unwrap()
}

/// Multiplication tables computed by composing automorphisms as field maps.
pub struct Oracle {
    pub nodes: Vec<Vec<TreeNode>>,
    pub mul: Vec<Vec<Vec<usize>>>,
    pub identity: Vec<usize>,
    pub inverse: Vec<Vec<usize>>,
}

impl Oracle {
    pub fn new(tower: &Tower, up_to: usize) -> Self {
        let mut o = Oracle {
            nodes: vec![],
            mul: vec![],
            identity: vec![],
            inverse: vec![],
        };
        for n in 0..=up_to {
            let nodes = galois_tree::level_nodes(tower, n).unwrap();
            let z = tower.field(n).unwrap().generator();
            let find = |t: &TreeNode| nodes.iter().position(|x| x == t).unwrap();
            let mul: Vec<Vec<usize>> = nodes
                .iter()
                .map(|a| {
                    nodes
                        .iter()
                        .map(|b| {
                            // a(b(z)) = b(z) evaluated at a(z)
                            let image = galois_tree::apply(tower, a, &b.image_of_z).unwrap();
                            find(&TreeNode { level: n, image_of_z: image })
                        })
                        .collect()
                })
                .collect();
            let id = nodes.iter().position(|t| t.image_of_z == z).unwrap();
            let inverse = (0..nodes.len())
                .map(|i| (0..nodes.len()).find(|&j| mul[i][j] == id).unwrap())
                .collect();
            o.nodes.push(nodes.clone());
            o.mul.push(mul);
            o.identity.push(id);
            o.inverse.push(inverse);
        }
        o
    }

    pub fn size(&self, n: usize) -> usize {
        self.nodes[n].len()
    }

    fn term(&self, t: &Term, n: usize, env: &HashMap<String, usize>, params: &[usize]) -> usize {
        match t {
            Term::Var(v) => env[v],
            Term::Param(i) => params[*i],
            Term::Identity => self.identity[n],
            Term::Compose(a, b) => self.mul[n][self.term(a, n, env, params)][self.term(b, n, env, params)],
            Term::Inverse(a) => self.inverse[n][self.term(a, n, env, params)],
        }
    }

    pub fn holds(&self, f: &Formula, n: usize, env: &mut HashMap<String, usize>, params: &[usize]) -> bool {
        match f {
            Formula::Eq(a, b) => self.term(a, n, env, params) == self.term(b, n, env, params),
            Formula::Not(g) => !self.holds(g, n, env, params),
            Formula::And(gs) => gs.iter().all(|g| self.holds(g, n, env, params)),
            Formula::Or(gs) => gs.iter().any(|g| self.holds(g, n, env, params)),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let exists = matches!(f, Formula::Exists(..));
                let saved = env.get(v).copied();
                let mut result = !exists;
                for i in 0..self.size(n) {
                    env.insert(v.clone(), i);
                    if self.holds(g, n, env, params) == exists {
                        result = exists;
                        break;
                    }
                }
                match saved {
                    Some(s) => env.insert(v.clone(), s),
                    None => env.remove(v),
                };
                result
            }
        }
    }

    pub fn eval(&self, f: &Formula, n: usize, params: &[PathPrefix]) -> bool {
        let p: Vec<usize> = params.iter().map(|a| a.at(n)).collect();
        self.holds(f, n, &mut HashMap::new(), &p)
    }
}

/// Seeded generator of random sentences.
pub struct Gen {
    pub rng: ChaCha8Rng,
}

pub struct Shape {
    pub positive: bool,
    pub blocks: usize,
    pub params: usize,
}

impl Gen {
    pub fn term(&mut self, vars: &[String], params: usize, depth: u32) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.45);
        if leaf {
            let k = self.rng.gen_range(0..vars.len() + params + 1);
            if k < vars.len() {
                Term::Var(vars[k].clone())
            } else if k < vars.len() + params {
                Term::Param(k - vars.len())
            } else {
                Term::Identity
            }
        } else if self.rng.gen_bool(0.25) {
            Term::inverse(self.term(vars, params, depth - 1))
        } else {
            Term::compose(self.term(vars, params, depth - 1), self.term(vars, params, depth - 1))
        }
    }

    pub fn literal(&mut self, vars: &[String], params: usize, positive: bool) -> Formula {
        let eq = Formula::eq(self.term(vars, params, 2), self.term(vars, params, 2));
        if positive || self.rng.gen_bool(0.6) {
            eq
        } else {
            Formula::not(eq)
        }
    }

    pub fn matrix(&mut self, vars: &[String], params: usize, positive: bool, depth: u32) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.35) {
            return self.literal(vars, params, positive);
        }
        let k = self.rng.gen_range(2..=3);
        let parts = (0..k).map(|_| self.matrix(vars, params, positive, depth - 1)).collect();
        let f = if self.rng.gen_bool(0.5) {
            Formula::And(parts)
        } else {
            Formula::Or(parts)
        };
        if !positive && self.rng.gen_bool(0.15) {
            Formula::not(f)
        } else {
            f
        }
    }

    /// Prenex sentence with alternating blocks of one or two variables.
    pub fn sentence(&mut self, shape: &Shape) -> Formula {
        let mut blocks: Vec<(bool, Vec<String>)> = Vec::new();
        let mut exists = self.rng.gen_bool(0.5);
        let mut count = 0;
        for _ in 0..shape.blocks {
            let k = self.rng.gen_range(1..=2);
            let names = (0..k)
                .map(|_| {
                    count += 1;
                    format!("G{count}")
                })
                .collect();
            blocks.push((exists, names));
            exists = !exists;
        }
        let vars: Vec<String> = blocks.iter().flat_map(|(_, v)| v.clone()).collect();
        let mut f = self.matrix(&vars, shape.params, shape.positive, 2);
        for (ex, names) in blocks.into_iter().rev() {
            for v in names.into_iter().rev() {
                f = if ex { Formula::exists(&v, f) } else { Formula::forall(&v, f) };
            }
        }
        f
    }

    pub fn path(&mut self, tree: &qbar_core::GaloisTree, depth: usize) -> PathPrefix {
        let rng = &mut self.rng;
        PathPrefix::root().extend_with(tree, depth, |k| rng.gen_range(0..k)).unwrap()
    }
}
