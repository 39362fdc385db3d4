//! Complete factorization over `Q`.
//!
//! Squarefree decomposition over `Q`, then Berlekamp–Zassenhaus on each
//! squarefree part: factor modulo a well-chosen prime, Hensel-lift to a
//! modulus beyond the Mignotte bound, and recombine lifted factors by
//! trial division over `Z`.

pub mod modp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{PolyRing, QPoly, Rational, RationalField};
use modp::{PolyP, Zp};

type ZPoly = Vec<BigInt>;

/// Factors a nonzero rational polynomial into monic irreducibles with
/// multiplicities. Constants yield an empty list; the content is dropped.
/// Output is sorted by degree, then by coefficients.
pub fn factor_over_q(p: &QPoly) -> Result<Vec<(QPoly, usize)>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let ring = PolyRing::new(&RationalField);
    let mut out = Vec::new();
    for (part, mult) in ring.squarefree_decomposition(p)? {
        for f in factor_squarefree_integer(&primitive_integer(&part)) {
            out.push((monic_rational(&f), mult));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// True when `p` has positive degree and no nontrivial factorization over `Q`.
pub fn is_irreducible_over_q(p: &QPoly) -> Result<bool> {
    if p.degree().unwrap_or(0) == 0 {
        return Ok(false);
    }
    let f = factor_over_q(p)?;
    Ok(f.len() == 1 && f[0].1 == 1)
}

/// Clears denominators and removes the content; positive leading coefficient.
pub(crate) fn primitive_integer(p: &QPoly) -> ZPoly {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: ZPoly = p
        .coeffs()
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    primitive_part(&ints)
}

fn primitive_part(f: &[BigInt]) -> ZPoly {
    let content = f.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return f.to_vec();
    }
    let sign = if f.last().is_some_and(|c| c.is_negative()) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    f.iter().map(|c| c / &content * &sign).collect()
}

fn monic_rational(f: &[BigInt]) -> QPoly {
    let lc = f.last().expect("nonzero").clone();
    QPoly::from_rationals(
        f.iter()
            .map(|c| Rational::new(c.clone(), lc.clone()))
            .collect(),
    )
}

fn trim(mut f: ZPoly) -> ZPoly {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Exact division over `Z`; `None` if `b` does not divide `a`.
fn zdiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return if a.is_empty() { Some(Vec::new()) } else { None };
    }
    let lb = &b[db];
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &rem[k + db];
        if c.is_zero() {
            continue;
        }
        let (q, r) = c.div_rem(lb);
        if !r.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &q * bj;
        }
        quot[k] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(trim(quot))
}

/// Symmetric residue in `(-m/2, m/2]`.
fn mods(c: &BigInt, m: &BigInt) -> BigInt {
    let r = c.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

fn mods_poly(f: &[BigInt], m: &BigInt) -> ZPoly {
    trim(f.iter().map(|c| mods(c, m)).collect())
}

fn to_modp(f: &[BigInt], p: u64) -> PolyP {
    let pb = BigInt::from(p);
    let mut out: PolyP = f
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().expect("residue fits"))
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

fn from_modp(f: &[u64]) -> ZPoly {
    f.iter().map(|&c| BigInt::from(c)).collect()
}

fn small_primes() -> impl Iterator<Item = u64> {
    (3u64..).step_by(2).filter(|&n| {
        let mut d = 3;
        while d * d <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        true
    })
}

/// Picks the prime (among the first few admissible ones) giving the fewest
/// modular factors; ties go to the smaller prime.
fn choose_prime(f: &[BigInt]) -> (u64, usize) {
    let lc = f.last().unwrap();
    let mut best: Option<(u64, usize)> = None;
    let mut tried = 0;
    for p in small_primes() {
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let zp = Zp::new(p);
        let fp = to_modp(f, p);
        if fp.len() != f.len() || !zp.is_squarefree(&fp) {
            continue;
        }
        let count = zp.count_factors(&zp.monic(&fp));
        if best.is_none_or(|(_, c)| count < c) {
            best = Some((p, count));
        }
        tried += 1;
        if tried >= 7 || count == 1 {
            break;
        }
    }
    best.expect("some prime is admissible for a squarefree polynomial")
}

fn coefficient_bound(f: &[BigInt]) -> BigInt {
    let sumsq: BigInt = f.iter().map(|c| c * c).sum();
    let norm = sumsq.sqrt() + 1;
    let n = f.len() - 1;
    (BigInt::one() << n) * norm * f.last().unwrap().abs()
}

/// Lifts `f ≡ g*h (mod p)` with `g` monic to a factorization modulo `p^k`.
fn hensel_pair(f: &[BigInt], g: &PolyP, h: &PolyP, zp: &Zp, k: u32) -> (ZPoly, ZPoly) {
    let p = BigInt::from(zp.p);
    let (one, s, t) = zp.ext_gcd(g, h);
    debug_assert_eq!(one, vec![1]);
    let mut big_g = from_modp(g);
    let mut big_h = from_modp(h);
    let mut pj = p.clone();
    for _ in 1..k {
        let diff: ZPoly = {
            let gh = zmul(&big_g, &big_h);
            let n = f.len().max(gh.len());
            (0..n)
                .map(|i| {
                    f.get(i).cloned().unwrap_or_default() - gh.get(i).cloned().unwrap_or_default()
                })
                .collect()
        };
        let e: ZPoly = diff.iter().map(|c| c / &pj).collect();
        let ep = to_modp(&e, zp.p);
        let (q, r) = zp.div_rem(&zp.mul(&t, &ep), g);
        let dh = zp.add(&zp.mul(&s, &ep), &zp.mul(&q, h));
        let add_scaled = |base: &mut ZPoly, delta: &PolyP| {
            if base.len() < delta.len() {
                base.resize(delta.len(), BigInt::zero());
            }
            for (i, &d) in delta.iter().enumerate() {
                base[i] += &pj * BigInt::from(d);
            }
        };
        add_scaled(&mut big_g, &r);
        add_scaled(&mut big_h, &dh);
        pj *= &p;
        big_g = mods_poly(&big_g, &pj);
        big_h = mods_poly(&big_h, &pj);
    }
    (big_g, big_h)
}

/// Lifts all monic modular factors of `f` to monic factors modulo `p^k`.
fn hensel_lift(f: &[BigInt], factors: &[PolyP], zp: &Zp, k: u32) -> Vec<ZPoly> {
    let m = BigInt::from(zp.p).pow(k);
    let mut target = f.to_vec();
    let mut out = Vec::with_capacity(factors.len());
    for i in 0..factors.len() - 1 {
        let lc = to_modp(&[target.last().unwrap().clone()], zp.p);
        let rest = factors[i + 1..]
            .iter()
            .fold(lc, |acc, u| zp.mul(&acc, u));
        let (g, h) = hensel_pair(&target, &factors[i], &rest, zp, k);
        out.push(g);
        target = h;
    }
    let lc = target.last().unwrap().clone();
    let inv = lc.extended_gcd(&m).x;
    out.push(mods_poly(
        &target.iter().map(|c| c * &inv).collect::<Vec<_>>(),
        &m,
    ));
    out
}

fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Irreducible factors over `Z` of a primitive squarefree polynomial with
/// positive leading coefficient.
fn factor_squarefree_integer(f: &[BigInt]) -> Vec<ZPoly> {
    if f.len() <= 2 {
        return vec![f.to_vec()];
    }
    let (p, count) = choose_prime(f);
    if count == 1 {
        return vec![f.to_vec()];
    }
    let zp = Zp::new(p);
    let modular = zp.factor_squarefree(&zp.monic(&to_modp(f, p)));

    let bound = coefficient_bound(f) * 2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut m = pb.clone();
    while m <= bound {
        m *= &pb;
        k += 1;
    }
    let mut lifted = hensel_lift(f, &modular, &zp, k);

    let mut out = Vec::new();
    let mut rest = f.to_vec();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut hit: Option<(Vec<usize>, ZPoly, ZPoly)> = None;
        let lc = rest.last().unwrap().clone();
        let constant = &lc * &rest[0];
        for_each_subset(lifted.len(), size, |sub| {
            let c0 = sub
                .iter()
                .fold(lc.clone(), |acc, &i| mods(&(acc * &lifted[i][0]), &m));
            if !constant.is_zero() && (c0.is_zero() || !(&constant % &c0).is_zero()) {
                return false;
            }
            let cand = sub
                .iter()
                .fold(vec![lc.clone()], |acc, &i| mods_poly(&zmul(&acc, &lifted[i]), &m));
            let cand = primitive_part(&cand);
            if let Some(q) = zdiv_exact(&rest, &cand) {
                hit = Some((sub.to_vec(), cand, q));
                true
            } else {
                false
            }
        });
        match hit {
            Some((sub, cand, q)) => {
                out.push(cand);
                rest = primitive_part(&q);
                let mut i = 0;
                lifted.retain(|_| {
                    let keep = !sub.contains(&i);
                    i += 1;
                    keep
                });
            }
            None => size += 1,
        }
    }
    if rest.len() > 1 {
        out.push(rest);
    }
    out
}
