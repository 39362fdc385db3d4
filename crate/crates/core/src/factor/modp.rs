//! Polynomials over the prime field `Z/p`, `p < 2^31`, with Cantor–Zassenhaus
//! factorization.

use num_bigint::BigUint;

/// Coefficients constant term first, reduced into `[0, p)`, no trailing zeros.
pub type PolyP = Vec<u64>;

#[derive(Debug, Clone, Copy)]
pub struct Zp {
    pub p: u64,
}

impl Zp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p > 2 && p < (1 << 31));
        Self { p }
    }

    fn trim(&self, mut a: PolyP) -> PolyP {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn pow_scalar(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        b %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        acc
    }

    pub fn inv_scalar(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow_scalar(a, self.p - 2)
    }

    pub fn reduce_signed(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> PolyP {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        self.trim(out)
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> PolyP {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                (a.get(i).copied().unwrap_or(0) + self.p - b.get(i).copied().unwrap_or(0)) % self.p
            })
            .collect();
        self.trim(out)
    }

    pub fn scale(&self, a: &[u64], c: u64) -> PolyP {
        self.trim(a.iter().map(|x| x * c % self.p).collect())
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> PolyP {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        self.trim(out)
    }

    pub fn div_rem(&self, a: &[u64], b: &[u64]) -> (PolyP, PolyP) {
        assert!(!b.is_empty(), "division by zero polynomial mod p");
        let db = b.len() - 1;
        let mut rem = a.to_vec();
        if rem.len() <= db {
            return (Vec::new(), self.trim(rem));
        }
        let li = self.inv_scalar(b[db]);
        let mut quot = vec![0u64; rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = rem[k + db];
            if c == 0 {
                continue;
            }
            let q = c * li % self.p;
            for (j, &bj) in b.iter().enumerate() {
                rem[k + j] = (rem[k + j] + self.p - q * bj % self.p) % self.p;
            }
            quot[k] = q;
        }
        rem.truncate(db);
        (self.trim(quot), self.trim(rem))
    }

    pub fn rem(&self, a: &[u64], b: &[u64]) -> PolyP {
        self.div_rem(a, b).1
    }

    pub fn monic(&self, a: &[u64]) -> PolyP {
        match a.last() {
            None => Vec::new(),
            Some(&l) => self.scale(a, self.inv_scalar(l)),
        }
    }

    pub fn gcd(&self, a: &[u64], b: &[u64]) -> PolyP {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `s*a + t*b = g` monic.
    pub fn ext_gcd(&self, a: &[u64], b: &[u64]) -> (PolyP, PolyP, PolyP) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let li = self.inv_scalar(*r0.last().expect("gcd of zero polynomials"));
        (self.scale(&r0, li), self.scale(&s0, li), self.scale(&t0, li))
    }

    pub fn derivative(&self, a: &[u64]) -> PolyP {
        self.trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * (i as u64 % self.p) % self.p)
                .collect(),
        )
    }

    /// `base^e mod m` for an arbitrary-size exponent.
    pub fn pow_mod(&self, base: &[u64], e: &BigUint, m: &[u64]) -> PolyP {
        let mut acc = vec![1u64];
        let base = self.rem(base, m);
        for i in (0..e.bits()).rev() {
            acc = self.rem(&self.mul(&acc, &acc), m);
            if e.bit(i) {
                acc = self.rem(&self.mul(&acc, &base), m);
            }
        }
        acc
    }

    pub fn is_squarefree(&self, a: &[u64]) -> bool {
        self.gcd(a, &self.derivative(a)).len() == 1
    }

    /// Distinct-degree factorization of a monic squarefree polynomial:
    /// `(product of all irreducible factors of degree d, d)`.
    pub fn distinct_degree(&self, f: &[u64]) -> Vec<(PolyP, usize)> {
        let mut out = Vec::new();
        let mut f = f.to_vec();
        let x = vec![0u64, 1];
        let mut h = x.clone();
        let p = BigUint::from(self.p);
        let mut d = 0;
        while f.len() > 1 {
            d += 1;
            if 2 * d > f.len() - 1 {
                let deg = f.len() - 1;
                out.push((f, deg));
                break;
            }
            h = self.pow_mod(&h, &p, &f);
            let g = self.gcd(&f, &self.sub(&h, &x));
            if g.len() > 1 {
                f = self.div_rem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, d));
            }
        }
        out
    }

    /// Splits a monic product of distinct irreducibles of degree `d` into
    /// its factors (Cantor–Zassenhaus, odd `p`).
    pub fn equal_degree(&self, f: &[u64], d: usize, rng: &mut SplitMix) -> Vec<PolyP> {
        let n = f.len() - 1;
        if n == d {
            return vec![f.to_vec()];
        }
        let exp = (BigUint::from(self.p).pow(d as u32) - 1u32) / 2u32;
        loop {
            let a: PolyP = self.trim((0..n).map(|_| rng.next() % self.p).collect());
            if a.len() < 2 {
                continue;
            }
            let b = self.sub(&self.pow_mod(&a, &exp, f), &[1]);
            let g = self.gcd(f, &b);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.div_rem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&self.monic(&h), d, rng));
                return out;
            }
        }
    }

    /// Complete factorization of a monic squarefree polynomial into monic irreducibles.
    pub fn factor_squarefree(&self, f: &[u64]) -> Vec<PolyP> {
        let mut rng = SplitMix::new(0x9E37_79B9_7F4A_7C15 ^ self.p);
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree(f) {
            out.extend(self.equal_degree(&g, d, &mut rng));
        }
        out.sort();
        out
    }

    /// Number of irreducible factors of a monic squarefree polynomial.
    pub fn count_factors(&self, f: &[u64]) -> usize {
        self.distinct_degree(f)
            .iter()
            .map(|(g, d)| (g.len() - 1) / d)
            .sum()
    }
}

/// Small deterministic generator for the splitting step.
#[derive(Debug, Clone)]
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}
