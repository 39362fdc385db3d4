//! Parameter path specifications.
//!
//! A list is comma separated; each item is `SPEC` or `aK=SPEC`:
//!
//! - `1:0/2:3` explicit chain of `level:index` selectors (the root is implied)
//! - `leftmost`, `rightmost`, `random` (random uses the seed)
//! - `square:SPEC`, `inverse:SPEC` levelwise square or inverse of another spec
//!
//! Chains shorter than the requested depth are extended by leftmost children.

use anyhow::{anyhow, bail, Context, Result};
use qbar_core::{GaloisTree, PathPrefix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct ParamBuilder<'t> {
    tree: &'t GaloisTree,
    depth: usize,
    rng: ChaCha8Rng,
}

impl<'t> ParamBuilder<'t> {
    pub fn new(tree: &'t GaloisTree, depth: usize, seed: u64) -> Self {
        Self {
            tree,
            depth,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// One path to the builder's depth.
    pub fn path(&mut self, spec: &str) -> Result<PathPrefix> {
        let spec = spec.trim();
        let tree = self.tree;
        let depth = self.depth;
        if let Some(inner) = spec.strip_prefix("square:") {
            let h = self.path(inner)?;
            return Ok(h.compose(tree, &h)?);
        }
        if let Some(inner) = spec.strip_prefix("inverse:") {
            let h = self.path(inner)?;
            let idx = (0..=depth).map(|n| tree.table(n).invert(h.at(n))).collect();
            return Ok(PathPrefix::new(tree, idx)?);
        }
        let p = match spec {
            "leftmost" => PathPrefix::leftmost(tree, depth)?,
            "rightmost" => PathPrefix::rightmost(tree, depth)?,
            "random" => {
                let rng = &mut self.rng;
                PathPrefix::root().extend_with(tree, depth, |k| rng.gen_range(0..k))?
            }
            _ => {
                let mut idx = vec![0];
                for (pos, sel) in spec.split('/').enumerate() {
                    let (l, i) = parse_selector(sel)?;
                    if l == 0 && pos == 0 {
                        idx[0] = i;
                        continue;
                    }
                    if l != idx.len() {
                        bail!("selector `{sel}` is out of sequence: expected level {}", idx.len());
                    }
                    idx.push(i);
                }
                PathPrefix::new(tree, idx).with_context(|| format!("bad path `{spec}`"))?
            }
        };
        if p.top_level() < depth {
            Ok(p.extend_with(tree, depth, |_| 0)?)
        } else {
            Ok(p)
        }
    }

    /// A full parameter list; named items must cover `a0..aK` exactly once.
    pub fn list(&mut self, items: &[String]) -> Result<Vec<PathPrefix>> {
        let mut slots: Vec<Option<PathPrefix>> = Vec::new();
        let mut next = 0;
        for item in items.iter().flat_map(|s| split_items(s)) {
            let (k, spec) = match item.split_once('=') {
                Some((name, spec)) => {
                    let k = name
                        .trim()
                        .strip_prefix('a')
                        .and_then(|d| d.parse::<usize>().ok())
                        .ok_or_else(|| anyhow!("bad parameter name `{name}`"))?;
                    (k, spec)
                }
                None => (next, item.as_str()),
            };
            if slots.len() <= k {
                slots.resize(k + 1, None);
            }
            if slots[k].is_some() {
                bail!("parameter a{k} given twice");
            }
            slots[k] = Some(self.path(spec)?);
            next = k + 1;
        }
        slots
            .into_iter()
            .enumerate()
            .map(|(k, p)| p.ok_or_else(|| anyhow!("parameter a{k} is missing")))
            .collect()
    }
}

/// Comma-separated items, blanks dropped.
fn split_items(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

/// `level:index`.
pub fn parse_selector(s: &str) -> Result<(usize, usize)> {
    let (l, i) = s
        .trim()
        .split_once(':')
        .ok_or_else(|| anyhow!("selector `{s}` should look like level:index"))?;
    let l = l.trim().parse().with_context(|| format!("bad level in `{s}`"))?;
    let i = i.trim().parse().with_context(|| format!("bad index in `{s}`"))?;
    Ok((l, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qbar_core::{QPoly, Tower};

    fn klein() -> GaloisTree {
        let t = Tower::from_schedule(&[QPoly::from_ints(&[-2, 0, 1]), QPoly::from_ints(&[-3, 0, 1])]).unwrap();
        GaloisTree::new(&t).unwrap()
    }

    #[test]
    fn explicit_chain() {
        let t = klein();
        let mut b = ParamBuilder::new(&t, 2, 0);
        let i = t.children(1, 1)[1];
        let p = b.path(&format!("1:1/2:{i}")).unwrap();
        assert_eq!(p.indices(), &[0, 1, i]);
        let short = b.path("1:1").unwrap();
        assert_eq!(short.indices(), &[0, 1, t.children(1, 1)[0]]);
        assert!(b.path("2:0").is_err());
        assert!(b.path("1:7").is_err());
    }

    #[test]
    fn named_and_positional() {
        let t = klein();
        let mut b = ParamBuilder::new(&t, 2, 0);
        let ps = b.list(&["a1=rightmost".into(), "a0=leftmost".into()]).unwrap();
        assert_eq!(ps[0], PathPrefix::leftmost(&t, 2).unwrap());
        assert_eq!(ps[1], PathPrefix::rightmost(&t, 2).unwrap());
        let ps = b.list(&["leftmost, square:rightmost".into()]).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(b.list(&["a1=leftmost".into()]).is_err());
        assert!(b.list(&["a0=leftmost,a0=rightmost".into()]).is_err());
    }

    #[test]
    fn random_is_seeded() {
        let t = klein();
        let a = ParamBuilder::new(&t, 2, 7).path("random").unwrap();
        let b = ParamBuilder::new(&t, 2, 7).path("random").unwrap();
        assert_eq!(a, b);
    }
}
