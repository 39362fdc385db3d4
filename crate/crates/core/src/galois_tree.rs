//! The Galois tree of a tower: level-`n` nodes are the automorphisms of `F_n`,
//! each stored as the image of `z_n`; a node's parent is its restriction.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numberfield::{embed, FieldElement, NumberField};
use crate::poly::{Field, Rational};
use crate::tower::Tower;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TreeNode {
    pub level: usize,
    pub image_of_z: FieldElement,
}

fn same_level(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LevelMismatch { left: a, right: b })
    }
}

/// All automorphisms of `F_n`, in canonical order.
pub fn level_nodes(tower: &Tower, n: usize) -> Result<Vec<TreeNode>> {
    Ok(tower
        .level(n)?
        .conjugates_of_z
        .iter()
        .map(|c| TreeNode {
            level: n,
            image_of_z: c.clone(),
        })
        .collect())
}

pub fn identity(tower: &Tower, n: usize) -> Result<TreeNode> {
    Ok(TreeNode {
        level: n,
        image_of_z: tower.field(n)?.generator(),
    })
}

/// `sigma(e)` for the automorphism `sigma` of the node's level.
pub fn apply(tower: &Tower, node: &TreeNode, e: &FieldElement) -> Result<FieldElement> {
    same_level(node.level, e.level)?;
    let f = tower.check_element(e)?;
    Ok(embed(f, e, &node.image_of_z))
}

pub fn compose(tower: &Tower, f: &TreeNode, g: &TreeNode) -> Result<TreeNode> {
    same_level(f.level, g.level)?;
    Ok(TreeNode {
        level: f.level,
        image_of_z: apply(tower, f, &g.image_of_z)?,
    })
}

pub fn invert(tower: &Tower, f: &TreeNode) -> Result<TreeNode> {
    let z = tower.field(f.level)?.generator();
    for h in level_nodes(tower, f.level)? {
        if apply(tower, &h, &f.image_of_z)? == z {
            return Ok(h);
        }
    }
    Err(Error::invalid("node is not an automorphism of its level"))
}

/// Restriction of `node` to `F_m`.
pub fn restrict(tower: &Tower, node: &TreeNode, m: usize) -> Result<TreeNode> {
    let n = node.level;
    if m > n {
        return Err(Error::invalid(format!("cannot restrict a level-{n} node to level {m}")));
    }
    let image = apply(tower, node, &tower.lifted_generator(m, n)?)?;
    for c in &tower.level(m)?.conjugates_of_z {
        if tower.lift(c, n)? == image {
            return Ok(TreeNode {
                level: m,
                image_of_z: c.clone(),
            });
        }
    }
    Err(Error::invalid("restriction is not a stored conjugate"))
}

/// Level-`(n+1)` nodes restricting to `node`.
pub fn children(tower: &Tower, node: &TreeNode) -> Result<Vec<TreeNode>> {
    let n = node.level;
    if n >= tower.height() {
        return Err(Error::OutOfRange {
            level: n + 1,
            height: tower.height(),
        });
    }
    let mut out = Vec::new();
    for c in level_nodes(tower, n + 1)? {
        if &restrict(tower, &c, n)? == node {
            out.push(c);
        }
    }
    Ok(out)
}

pub fn node_order(a: &TreeNode, b: &TreeNode) -> Result<Ordering> {
    same_level(a.level, b.level)?;
    Ok(a.image_of_z.coords.cmp(&b.image_of_z.coords))
}

/// Group tables for one level, indexed by canonical position.
#[derive(Debug, Clone)]
pub struct LevelTable {
    nodes: Vec<TreeNode>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
}

impl LevelTable {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn compose(&self, i: usize, j: usize) -> usize {
        self.mul[i * self.nodes.len() + j]
    }

    pub fn invert(&self, i: usize) -> usize {
        self.inv[i]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }
}

/// The tree truncated at the tower height, with every group operation tabulated.
#[derive(Debug, Clone)]
pub struct GaloisTree {
    tower: Tower,
    levels: Vec<LevelTable>,
}

/// Columns `sigma(z^j)` of the matrix of `sigma` on the power basis.
fn apply_matrix(field: &NumberField, image: &FieldElement) -> Vec<Vec<Rational>> {
    let mut cols = Vec::with_capacity(field.degree());
    let mut p = field.one();
    for _ in 0..field.degree() {
        cols.push(p.coords.clone());
        p = field.mul(&p, image);
    }
    cols
}

fn mat_vec(cols: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); cols[0].len()];
    for (c, x) in cols.iter().zip(v) {
        if x.is_zero() {
            continue;
        }
        for (o, y) in out.iter_mut().zip(c) {
            *o += x * y;
        }
    }
    out
}

impl GaloisTree {
    pub fn new(tower: &Tower) -> Result<Self> {
        let mut levels: Vec<LevelTable> = Vec::with_capacity(tower.height() + 1);
        for n in 0..=tower.height() {
            let field = tower.field(n)?;
            let nodes = level_nodes(tower, n)?;
            let d = nodes.len();
            let index: HashMap<&[Rational], usize> = nodes
                .iter()
                .enumerate()
                .map(|(i, x)| (x.image_of_z.coords.as_slice(), i))
                .collect();
            let lookup = |coords: &[Rational]| {
                index
                    .get(coords)
                    .copied()
                    .ok_or_else(|| Error::Validation(format!("level {n} is not closed under composition")))
            };
            let mats: Vec<_> = nodes.iter().map(|x| apply_matrix(field, &x.image_of_z)).collect();
            let mut mul = Vec::with_capacity(d * d);
            for m in &mats {
                for g in &nodes {
                    mul.push(lookup(&mat_vec(m, &g.image_of_z.coords))?);
                }
            }
            let identity = lookup(&field.generator().coords)?;
            let inv = (0..d)
                .map(|i| (0..d).find(|&j| mul[j * d + i] == identity).unwrap())
                .collect();
            let parent = if n == 0 {
                vec![0; d]
            } else {
                let prev = &levels[n - 1];
                let embed_prev = &tower.level(n)?.embed_prev;
                let lifted: HashMap<Vec<Rational>, usize> = prev
                    .nodes
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (embed(field, &x.image_of_z, embed_prev).coords, i))
                    .collect();
                mats.iter()
                    .map(|m| {
                        lifted
                            .get(&mat_vec(m, &embed_prev.coords))
                            .copied()
                            .ok_or_else(|| Error::Validation(format!("restriction from level {n} failed")))
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            if n > 0 {
                let prev = levels.last_mut().unwrap();
                for (i, &p) in parent.iter().enumerate() {
                    prev.children[p].push(i);
                }
            }
            levels.push(LevelTable {
                nodes,
                mul,
                inv,
                identity,
                parent,
                children: vec![Vec::new(); d],
            });
        }
        Ok(Self {
            tower: tower.clone(),
            levels,
        })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Result<&LevelTable> {
        self.levels.get(n).ok_or(Error::OutOfRange {
            level: n,
            height: self.height(),
        })
    }

    /// Table access for a level already known to exist.
    pub fn table(&self, n: usize) -> &LevelTable {
        &self.levels[n]
    }

    pub fn size(&self, n: usize) -> usize {
        self.levels[n].size()
    }

    pub fn parent(&self, n: usize, i: usize) -> usize {
        self.levels[n].parent[i]
    }

    /// Children at level `n + 1`, in canonical order. Empty at the top level.
    pub fn children(&self, n: usize, i: usize) -> &[usize] {
        &self.levels[n].children[i]
    }

    /// Index of the restriction of node `(n, i)` to level `m <= n`.
    pub fn restrict(&self, n: usize, mut i: usize, m: usize) -> usize {
        for k in (m + 1..=n).rev() {
            i = self.levels[k].parent[i];
        }
        i
    }

    /// Index of a node given its image.
    pub fn index_of(&self, node: &TreeNode) -> Result<usize> {
        self.level(node.level)?
            .nodes
            .iter()
            .position(|x| x == node)
            .ok_or_else(|| Error::invalid("not a node of this tree"))
    }

    /// DOT rendering of levels `0..=max_level`; edges optionally carry `sigma(z_n)`.
    pub fn to_dot(&self, max_level: usize, annotate: bool) -> Result<String> {
        self.level(max_level)?;
        let mut s = String::from("digraph galois_tree {\n  node [shape=box];\n");
        for n in 0..=max_level {
            for i in 0..self.size(n) {
                writeln!(s, "  \"{n}:{i}\";").unwrap();
            }
        }
        for n in 1..=max_level {
            for i in 0..self.size(n) {
                let p = self.parent(n, i);
                write!(s, "  \"{}:{p}\" -> \"{n}:{i}\"", n - 1).unwrap();
                if annotate {
                    let img = self.levels[n].nodes[i].image_of_z.display_in(&format!("z{n}"));
                    write!(s, " [label=\"{img}\"]").unwrap();
                }
                s.push_str(";\n");
            }
        }
        s.push_str("}\n");
        Ok(s)
    }
}

/// A compatible chain of nodes at levels `0..=top`, stored by canonical index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathPrefix {
    indices: Vec<usize>,
}

impl PathPrefix {
    /// Checks compatibility under restriction.
    pub fn new(tree: &GaloisTree, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::invalid("a path needs at least the root"));
        }
        tree.level(indices.len() - 1)?;
        for (n, &i) in indices.iter().enumerate() {
            if i >= tree.size(n) {
                return Err(Error::invalid(format!("no node {n}:{i}")));
            }
            if n > 0 && tree.parent(n, i) != indices[n - 1] {
                return Err(Error::invalid(format!("node {n}:{i} does not extend {}:{}", n - 1, indices[n - 1])));
            }
        }
        Ok(Self { indices })
    }

    /// The chain ending in node `(n, i)`.
    pub fn ending_at(tree: &GaloisTree, n: usize, i: usize) -> Self {
        let mut indices: Vec<usize> = (0..=n).rev().map(|m| tree.restrict(n, i, m)).collect();
        indices.reverse();
        Self { indices }
    }

    pub fn root() -> Self {
        Self { indices: vec![0] }
    }

    pub fn top_level(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn at(&self, n: usize) -> usize {
        self.indices[n]
    }

    pub fn nodes(&self, tree: &GaloisTree) -> Vec<TreeNode> {
        self.indices
            .iter()
            .enumerate()
            .map(|(n, &i)| tree.table(n).nodes()[i].clone())
            .collect()
    }

    /// Extends to level `to` by choosing, at each new level, a child via `pick`,
    /// which receives the number of children.
    pub fn extend_with(&self, tree: &GaloisTree, to: usize, mut pick: impl FnMut(usize) -> usize) -> Result<Self> {
        tree.level(to)?;
        let mut indices = self.indices.clone();
        indices.truncate(to + 1);
        while indices.len() <= to {
            let n = indices.len() - 1;
            let kids = tree.children(n, indices[n]);
            let k = pick(kids.len());
            indices.push(kids[k.min(kids.len() - 1)]);
        }
        Ok(Self { indices })
    }

    pub fn leftmost(tree: &GaloisTree, to: usize) -> Result<Self> {
        Self::root().extend_with(tree, to, |_| 0)
    }

    pub fn rightmost(tree: &GaloisTree, to: usize) -> Result<Self> {
        Self::root().extend_with(tree, to, |k| k - 1)
    }

    /// The levelwise composite `self ∘ other`.
    pub fn compose(&self, tree: &GaloisTree, other: &Self) -> Result<Self> {
        if self.indices.len() != other.indices.len() {
            return Err(Error::LevelMismatch {
                left: self.top_level(),
                right: other.top_level(),
            });
        }
        Ok(Self {
            indices: self
                .indices
                .iter()
                .zip(&other.indices)
                .enumerate()
                .map(|(n, (&a, &b))| tree.table(n).compose(a, b))
                .collect(),
        })
    }
}

/// An `m`-tuple of nodes at one level of the product tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductNode {
    pub level: usize,
    pub entries: Vec<usize>,
}

impl ProductNode {
    pub fn root(arity: usize) -> Self {
        Self {
            level: 0,
            entries: vec![0; arity],
        }
    }

    pub fn restrict(&self, tree: &GaloisTree, m: usize) -> Self {
        Self {
            level: m,
            entries: self.entries.iter().map(|&i| tree.restrict(self.level, i, m)).collect(),
        }
    }

    /// Does `self` restrict to `other`?
    pub fn extends(&self, tree: &GaloisTree, other: &Self) -> bool {
        other.level <= self.level && &self.restrict(tree, other.level) == other
    }

    /// All tuples at level `n + 1` restricting to `self`, in lexicographic order.
    pub fn children(&self, tree: &GaloisTree) -> Vec<Self> {
        let lists: Vec<&[usize]> = self.entries.iter().map(|&i| tree.children(self.level, i)).collect();
        product(&lists)
            .into_iter()
            .map(|entries| Self {
                level: self.level + 1,
                entries,
            })
            .collect()
    }
}

/// Cartesian product in lexicographic order.
pub fn product(lists: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for l in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                l.iter().map(move |&x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// All `m`-tuples at level `n`, lexicographic in canonical index order.
pub fn level_tuples(tree: &GaloisTree, n: usize, m: usize) -> Vec<ProductNode> {
    let all: Vec<usize> = (0..tree.size(n)).collect();
    let lists = vec![all.as_slice(); m];
    product(&lists)
        .into_iter()
        .map(|entries| ProductNode { level: n, entries })
        .collect()
}
