//! Towers `F_0 = Q ⊂ F_1 ⊂ ...` of normal number fields, each presented by a
//! primitive generator `z_n`, plus the JSON cache format.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::factor::{factor_over_q, is_irreducible_over_q};
use crate::numberfield::{
    embed, factor_over_field, primitive_element, FieldElement, KPoly, NumberField,
};
use crate::poly::{Field, QPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerLevel {
    field: NumberField,
    /// Image of `z_(n-1)` in the power basis of `z_n`; `1` at level 0.
    pub embed_prev: FieldElement,
    /// The schedule polynomial whose splitting produced this level.
    pub generator_used: Option<QPoly>,
    /// All roots of the minimal polynomial of `z_n`, sorted by coordinates.
    pub conjugates_of_z: Vec<FieldElement>,
}

impl TowerLevel {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn minpoly_of_z(&self) -> &QPoly {
        self.field.minpoly()
    }

    pub fn degree(&self) -> usize {
        self.field.degree()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    levels: Vec<TowerLevel>,
}

impl Default for Tower {
    fn default() -> Self {
        Self::new()
    }
}

impl Tower {
    /// The one-level tower `[Q]`.
    pub fn new() -> Self {
        let field = NumberField::rationals();
        let one = field.one();
        Self {
            levels: vec![TowerLevel {
                field,
                embed_prev: one.clone(),
                generator_used: None,
                conjugates_of_z: vec![one],
            }],
        }
    }

    /// Builds a tower by extending `[Q]` with each polynomial in turn.
    pub fn from_schedule(schedule: &[QPoly]) -> Result<Self> {
        let mut t = Self::new();
        for p in schedule {
            t = extend_tower(&t, p)?;
        }
        Ok(t)
    }

    /// Index of the top level.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Result<&TowerLevel> {
        self.levels.get(n).ok_or(Error::OutOfRange {
            level: n,
            height: self.height(),
        })
    }

    pub fn field(&self, n: usize) -> Result<&NumberField> {
        Ok(self.level(n)?.field())
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.levels.iter().map(TowerLevel::degree).collect()
    }

    pub fn top(&self) -> &TowerLevel {
        self.levels.last().unwrap()
    }

    pub fn check_element(&self, e: &FieldElement) -> Result<&NumberField> {
        let f = self.field(e.level)?;
        if e.coords.len() != f.degree() {
            return Err(Error::invalid(format!(
                "element has {} coordinates but level {} has degree {}",
                e.coords.len(),
                e.level,
                f.degree()
            )));
        }
        Ok(f)
    }

    /// Image of `e` under the inclusion `F_from ⊂ F_to`.
    pub fn lift(&self, e: &FieldElement, to: usize) -> Result<FieldElement> {
        self.check_element(e)?;
        if to < e.level {
            return Err(Error::invalid(format!(
                "cannot lift from level {} down to level {to}",
                e.level
            )));
        }
        self.level(to)?;
        let mut cur = e.clone();
        for k in e.level + 1..=to {
            let lvl = &self.levels[k];
            cur = embed(&lvl.field, &cur, &lvl.embed_prev);
        }
        Ok(cur)
    }

    /// `z_m` written at level `n >= m`.
    pub fn lifted_generator(&self, m: usize, n: usize) -> Result<FieldElement> {
        let z = self.field(m)?.generator();
        self.lift(&z, n)
    }

    /// Checks every structural invariant; used when loading caches.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        let base = &self.levels[0];
        if base.minpoly_of_z() != &QPoly::from_ints(&[-1, 1]) {
            return bad("level 0 must be Q with generator 1".into());
        }
        for (n, lvl) in self.levels.iter().enumerate() {
            let f = &lvl.field;
            if f.level() != n {
                return bad(format!("level {n} labelled {}", f.level()));
            }
            if !is_irreducible_over_q(lvl.minpoly_of_z())? {
                return bad(format!("minimal polynomial at level {n} is reducible"));
            }
            if lvl.conjugates_of_z.len() != lvl.degree() {
                return bad(format!(
                    "level {n} is not certified normal: {} conjugates for degree {}",
                    lvl.conjugates_of_z.len(),
                    lvl.degree()
                ));
            }
            for c in lvl.conjugates_of_z.iter().chain([&lvl.embed_prev]) {
                if c.level != n || c.coords.len() != lvl.degree() {
                    return bad(format!("malformed element at level {n}"));
                }
            }
            if !lvl.conjugates_of_z.windows(2).all(|w| w[0].coords < w[1].coords) {
                return bad(format!("conjugates at level {n} not strictly sorted"));
            }
            let ring = f.ring();
            let m = f.lift_poly(lvl.minpoly_of_z());
            if lvl.conjugates_of_z.iter().any(|c| !ring.eval(&m, c).is_zero()) {
                return bad(format!("a stored conjugate at level {n} is not a root"));
            }
            if n == 0 {
                continue;
            }
            let prev = &self.levels[n - 1];
            if lvl.degree() % prev.degree() != 0 {
                return bad(format!("degree at level {n} not a multiple of level {}", n - 1));
            }
            let mp = f.lift_poly(prev.minpoly_of_z());
            if !ring.eval(&mp, &lvl.embed_prev).is_zero() {
                return bad(format!("embedding at level {n} does not satisfy the previous minimal polynomial"));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let file = TowerFile {
            format: FORMAT_TAG.to_string(),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(n, l)| LevelFile {
                    level: n,
                    degree: l.degree(),
                    minpoly_of_z: encode_vec(l.minpoly_of_z().coeffs()),
                    embed_prev: encode_vec(&l.embed_prev.coords),
                    generator_used: l.generator_used.as_ref().map(|g| encode_vec(g.coeffs())),
                    conjugates_of_z: l.conjugates_of_z.iter().map(|c| encode_vec(&c.coords)).collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses and validates a cache file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TowerFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.format != FORMAT_TAG {
            return Err(Error::Format(format!("unknown format tag `{}`", file.format)));
        }
        if file.levels.is_empty() {
            return Err(Error::Format("tower has no levels".into()));
        }
        let mut levels = Vec::with_capacity(file.levels.len());
        for (n, l) in file.levels.into_iter().enumerate() {
            if l.level != n {
                return Err(Error::Format(format!("level {} out of order", l.level)));
            }
            let field = NumberField::new(n, QPoly::from_rationals(decode_vec(&l.minpoly_of_z)?))
                .map_err(|e| Error::Format(e.to_string()))?;
            if field.degree() != l.degree {
                return Err(Error::Format(format!("degree mismatch at level {n}")));
            }
            let elem = |v: &[String]| -> Result<FieldElement> {
                Ok(FieldElement {
                    level: n,
                    coords: decode_vec(v)?,
                })
            };
            levels.push(TowerLevel {
                embed_prev: elem(&l.embed_prev)?,
                generator_used: match &l.generator_used {
                    Some(g) => Some(QPoly::from_rationals(decode_vec(g)?)),
                    None => None,
                },
                conjugates_of_z: l.conjugates_of_z.iter().map(|c| elem(c)).collect::<Result<_>>()?,
                field,
            });
        }
        let t = Self { levels };
        t.validate()?;
        Ok(t)
    }

    /// Short content hash of the cache serialization.
    pub fn id(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

const FORMAT_TAG: &str = "qbar-tower/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    format: String,
    levels: Vec<LevelFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelFile {
    level: usize,
    degree: usize,
    minpoly_of_z: Vec<String>,
    embed_prev: Vec<String>,
    generator_used: Option<Vec<String>>,
    conjugates_of_z: Vec<Vec<String>>,
}

fn encode_vec(v: &[Rational]) -> Vec<String> {
    v.iter()
        .map(|q| format!("{}/{}", q.numer(), q.denom()))
        .collect()
}

fn decode_vec(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| decode_rational(s)).collect()
}

fn decode_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Format(format!("bad rational `{s}`"));
    let (n, d) = s.split_once('/').ok_or_else(bad)?;
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d <= BigInt::zero() {
        return Err(bad());
    }
    let q = Rational::new(n.clone(), d.clone());
    // Only lowest terms are accepted so that save(load(x)) == x.
    if q.numer() != &n || q.denom() != &d {
        return Err(bad());
    }
    Ok(q)
}

/// Adjoins all roots of `x_poly` to the top field, returning a tower with one
/// more level, or an unchanged copy if `x_poly` already splits there.
pub fn extend_tower(tower: &Tower, x_poly: &QPoly) -> Result<Tower> {
    if x_poly.degree().unwrap_or(0) == 0 {
        return Err(Error::invalid("generator must have positive degree"));
    }
    if !is_irreducible_over_q(x_poly)? {
        let parts: Vec<String> = factor_over_q(x_poly)?
            .iter()
            .map(|(f, _)| format!("({f})"))
            .collect();
        return Err(Error::invalid(format!(
            "{x_poly} is reducible over Q: {}",
            parts.join("*")
        )));
    }
    let top = tower.top();
    let base = top.field().clone();
    let mut cur = base.clone();
    let mut roots = Vec::new();
    let mut pending: Vec<KPoly> = Vec::new();
    for (f, _) in factor_over_field(&cur, &cur.lift_poly(x_poly))? {
        if f.degree() == Some(1) {
            roots.push(cur.neg(&f.coeffs()[0]));
        } else {
            pending.push(f);
        }
    }
    if pending.is_empty() {
        return Ok(tower.clone());
    }

    let mut base_gen = base.generator();
    let mut shifts = Vec::new();
    while let Some(g) = pending.first().cloned() {
        let pe = primitive_element(&cur, &g)?;
        let big = pe.field.clone();
        let push = |e: &FieldElement| embed(&big, e, &pe.old_gen);
        base_gen = push(&base_gen);
        roots = roots.iter().map(push).collect();
        let big_ring = big.ring();
        let mut next: Vec<KPoly> = Vec::new();
        for (i, f) in pending.iter().enumerate() {
            let mut h = big_ring.from_vec(f.coeffs().iter().map(push).collect());
            if i == 0 {
                h = big_ring.div_exact(&h, &big_ring.linear_root(&pe.new_root))?;
            }
            if h.degree().unwrap_or(0) == 0 {
                continue;
            }
            for (part, _) in factor_over_field(&big, &h)? {
                if part.degree() == Some(1) {
                    roots.push(big.neg(&part.coeffs()[0]));
                } else {
                    next.push(part);
                }
            }
        }
        roots.push(pe.new_root.clone());
        shifts.push(pe.shift);
        pending = next;
        cur = big;
    }

    let n = tower.height() + 1;
    let field = NumberField::new(n, cur.minpoly().clone())?;
    let relabel = |e: FieldElement| FieldElement { level: n, ..e };
    let base_gen = relabel(base_gen);
    let roots: Vec<FieldElement> = roots.into_iter().map(relabel).collect();

    // Each automorphism is fixed by its action on z_n and on the adjoined roots,
    // so every conjugate of the new generator arises from some such choice.
    let lifted_conj: Vec<FieldElement> = top
        .conjugates_of_z
        .iter()
        .map(|c| embed(&field, c, &base_gen))
        .collect();
    let m = field.lift_poly(field.minpoly());
    let ring = field.ring();
    let mut conjugates = BTreeSet::new();
    let mut choice = vec![0usize; shifts.len()];
    'outer: loop {
        for c in &lifted_conj {
            let mut w = c.clone();
            for (k, &r) in shifts.iter().zip(&choice) {
                w = field.add(&roots[r], &field.mul(&field.integer(*k as i64), &w));
            }
            if ring.eval(&m, &w).is_zero() {
                conjugates.insert(w.coords);
            }
        }
        for slot in choice.iter_mut() {
            *slot += 1;
            if *slot < roots.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    let conjugates_of_z: Vec<FieldElement> = conjugates
        .into_iter()
        .map(|coords| FieldElement { level: n, coords })
        .collect();
    if conjugates_of_z.len() != field.degree() {
        return Err(Error::Validation(format!(
            "normal closure check failed: {} conjugates for degree {}",
            conjugates_of_z.len(),
            field.degree()
        )));
    }
    let mut levels = tower.levels.clone();
    levels.push(TowerLevel {
        field,
        embed_prev: base_gen,
        generator_used: Some(x_poly.clone()),
        conjugates_of_z,
    });
    Ok(Tower { levels })
}

/// A rational in lowest terms from numerator and denominator.
pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Is `e` equal to the rational `1`?
pub fn is_one(e: &FieldElement) -> bool {
    e.as_rational().is_some_and(One::is_one)
}
