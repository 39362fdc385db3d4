//! Dense univariate polynomials over an exact field.
//!
//! The coefficient field is passed explicitly as a [`Field`] context, so the
//! same routines serve both `Q[x]` and `F_n[x]` for a number field `F_n`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Arithmetic context for a coefficient field.
pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem>;
    /// Image of a rational number in this field.
    fn from_rational(&self, q: &Rational) -> Self::Elem;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
}

/// The rational numbers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalField;

impl Field for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        a - b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn inv(&self, a: &Rational) -> Result<Rational> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(a.recip())
        }
    }
    fn from_rational(&self, q: &Rational) -> Rational {
        q.clone()
    }
    fn is_one(&self, a: &Rational) -> bool {
        a.is_one()
    }
}

/// Coefficients stored constant term first. The zero polynomial has no
/// coefficients; otherwise the last coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly<E> {
    coeffs: Vec<E>,
}

pub type QPoly = Poly<Rational>;

impl<E> Poly<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Option<&E> {
        self.coeffs.get(i)
    }

    pub fn map<F, T>(&self, f: F) -> Poly<T>
    where
        F: FnMut(&E) -> T,
    {
        Poly {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl QPoly {
    /// Builds a rational polynomial from integer coefficients, constant term first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        PolyRing::new(&RationalField).from_vec(
            coeffs
                .iter()
                .map(|&c| Rational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn from_rationals(coeffs: Vec<Rational>) -> Self {
        PolyRing::new(&RationalField).from_vec(coeffs)
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * at + c;
        }
        acc
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Renders the polynomial in the variable `var`, highest degree first.
    pub fn display_in(&self, var: &str) -> String {
        format_terms(
            self.coeffs
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone())),
            var,
        )
    }
}

pub(crate) fn format_terms(terms: impl Iterator<Item = (usize, Rational)>, var: &str) -> String {
    let mut out = String::new();
    for (i, c) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs.is_one() {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl QPoly {
    /// Parses sums of terms like `3/2*x^2`, `-x`, `5` in the variable `var`.
    pub fn parse_in(text: &str, var: &str) -> Result<Self> {
        let bad = |pos: usize, msg: &str| Error::Syntax { pos, msg: msg.to_string() };
        let src: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        for w in src.windows(2) {
            let gap = w[0].0 + w[0].1.len_utf8() != w[1].0;
            if gap && w[0].1.is_alphanumeric() && w[1].1.is_alphanumeric() {
                return Err(bad(w[1].0, "expected an operator"));
            }
        }
        let var: Vec<char> = var.chars().collect();
        let mut coeffs: Vec<Rational> = Vec::new();
        let mut i = 0;
        let at = |i: usize| src.get(i).map_or(text.len(), |p| p.0);
        if src.is_empty() {
            return Err(bad(0, "empty polynomial"));
        }
        while i < src.len() {
            let mut sign = Rational::one();
            if src[i].1 == '+' || src[i].1 == '-' {
                if src[i].1 == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if i > 0 {
                return Err(bad(at(i), "expected `+` or `-`"));
            }
            let digits = |i: &mut usize| {
                let start = *i;
                while *i < src.len() && src[*i].1.is_ascii_digit() {
                    *i += 1;
                }
                src[start..*i].iter().map(|p| p.1).collect::<String>()
            };
            let mut coef = None;
            let num = digits(&mut i);
            if !num.is_empty() {
                let mut c = Rational::from_integer(num.parse().unwrap());
                if i < src.len() && src[i].1 == '/' {
                    i += 1;
                    let den = digits(&mut i);
                    if den.is_empty() {
                        return Err(bad(at(i), "expected a denominator"));
                    }
                    let d: BigInt = den.parse().unwrap();
                    if d.is_zero() {
                        return Err(bad(at(i - 1), "zero denominator"));
                    }
                    c /= Rational::from_integer(d);
                }
                coef = Some(c);
                if i < src.len() && src[i].1 == '*' {
                    i += 1;
                    if !src[i..].iter().map(|p| p.1).take(var.len()).eq(var.iter().copied()) {
                        return Err(bad(at(i), "expected the variable after `*`"));
                    }
                }
            }
            let mut exp = 0usize;
            if src[i..].iter().map(|p| p.1).take(var.len()).eq(var.iter().copied()) && !var.is_empty() {
                i += var.len();
                exp = 1;
                if i < src.len() && src[i].1 == '^' {
                    i += 1;
                    let e = digits(&mut i);
                    exp = e.parse().map_err(|_| bad(at(i), "expected an exponent"))?;
                }
            } else if coef.is_none() {
                return Err(bad(at(i), "expected a coefficient or the variable"));
            }
            let c = sign * coef.unwrap_or_else(Rational::one);
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, Rational::zero());
            }
            coeffs[exp] += c;
        }
        Ok(Self::from_rationals(coeffs))
    }
}

impl std::str::FromStr for QPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_in(s, "x")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

/// Polynomial arithmetic over a borrowed coefficient field.
#[derive(Debug, Clone, Copy)]
pub struct PolyRing<'a, F: Field> {
    pub field: &'a F,
}

impl<'a, F: Field> PolyRing<'a, F> {
    pub fn new(field: &'a F) -> Self {
        Self { field }
    }

    pub fn from_vec(&self, mut coeffs: Vec<F::Elem>) -> Poly<F::Elem> {
        while coeffs.last().is_some_and(|c| self.field.is_zero(c)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero(&self) -> Poly<F::Elem> {
        Poly { coeffs: Vec::new() }
    }

    pub fn one(&self) -> Poly<F::Elem> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: F::Elem) -> Poly<F::Elem> {
        self.from_vec(vec![c])
    }

    pub fn x(&self) -> Poly<F::Elem> {
        self.from_vec(vec![self.field.zero(), self.field.one()])
    }

    /// `x - c`
    pub fn linear_root(&self, c: &F::Elem) -> Poly<F::Elem> {
        self.from_vec(vec![self.field.neg(c), self.field.one()])
    }

    pub fn from_rational_poly(&self, p: &QPoly) -> Poly<F::Elem> {
        self.from_vec(p.coeffs.iter().map(|c| self.field.from_rational(c)).collect())
    }

    pub fn is_one(&self, p: &Poly<F::Elem>) -> bool {
        p.coeffs.len() == 1 && self.field.is_one(&p.coeffs[0])
    }

    pub fn add(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        let n = a.coeffs.len().max(b.coeffs.len());
        let zero = self.field.zero();
        let coeffs = (0..n)
            .map(|i| {
                let x = a.coeffs.get(i).unwrap_or(&zero);
                let y = b.coeffs.get(i).unwrap_or(&zero);
                self.field.add(x, y)
            })
            .collect();
        self.from_vec(coeffs)
    }

    pub fn neg(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.field.neg(c)).collect(),
        }
    }

    pub fn sub(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly<F::Elem>, c: &F::Elem) -> Poly<F::Elem> {
        self.from_vec(a.coeffs.iter().map(|x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Poly<F::Elem> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut out = vec![self.field.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.field.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                let t = self.field.mul(x, y);
                out[i + j] = self.field.add(&out[i + j], &t);
            }
        }
        self.from_vec(out)
    }

    pub fn pow(&self, a: &Poly<F::Elem>, mut e: u32) -> Poly<F::Elem> {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn product<'p>(&self, ps: impl IntoIterator<Item = &'p Poly<F::Elem>>) -> Poly<F::Elem>
    where
        F::Elem: 'p,
    {
        ps.into_iter().fold(self.one(), |acc, p| self.mul(&acc, p))
    }

    /// Quotient and remainder; errors when dividing by zero.
    pub fn div_rem(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
    ) -> Result<(Poly<F::Elem>, Poly<F::Elem>)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = self.field.inv(b.leading().unwrap())?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((self.zero(), a.clone()));
        }
        let mut quot = vec![self.field.zero(); rem.len() - db];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + db];
            if self.field.is_zero(c) {
                continue;
            }
            let q = self.field.mul(c, &lead_inv);
            for (j, bj) in b.coeffs.iter().enumerate() {
                let t = self.field.mul(&q, bj);
                rem[k + j] = self.field.sub(&rem[k + j], &t);
            }
            quot[k] = q;
        }
        rem.truncate(db);
        Ok((self.from_vec(quot), self.from_vec(rem)))
    }

    pub fn rem(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        Ok(self.div_rem(a, b)?.1)
    }

    /// Exact quotient; errors if `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        let (q, r) = self.div_rem(a, b)?;
        if !r.is_zero() {
            return Err(Error::invalid("inexact polynomial division"));
        }
        Ok(q)
    }

    pub fn monic(&self, a: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        match a.leading() {
            None => Ok(a.clone()),
            Some(l) => Ok(self.scale(a, &self.field.inv(l)?)),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, a: &Poly<F::Elem>, b: &Poly<F::Elem>) -> Result<Poly<F::Elem>> {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = self.monic(&r)?;
        }
        self.monic(&x)
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` monic.
    pub fn ext_gcd(
        &self,
        a: &Poly<F::Elem>,
        b: &Poly<F::Elem>,
    ) -> Result<(Poly<F::Elem>, Poly<F::Elem>, Poly<F::Elem>)> {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one(), self.zero());
        let (mut t0, mut t1) = (self.zero(), self.one());
        while !r1.is_zero() {
            let (q, r) = self.div_rem(&r0, &r1)?;
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        match r0.leading() {
            None => Ok((r0, s0, t0)),
            Some(l) => {
                let li = self.field.inv(l)?;
                Ok((self.scale(&r0, &li), self.scale(&s0, &li), self.scale(&t0, &li)))
            }
        }
    }

    pub fn derivative(&self, a: &Poly<F::Elem>) -> Poly<F::Elem> {
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let k = Rational::from_integer(BigInt::from(i));
                self.field.mul(c, &self.field.from_rational(&k))
            })
            .collect();
        self.from_vec(coeffs)
    }

    pub fn eval(&self, a: &Poly<F::Elem>, at: &F::Elem) -> F::Elem {
        let mut acc = self.field.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.field.add(&self.field.mul(&acc, at), c);
        }
        acc
    }

    /// `a(x + shift)`.
    pub fn taylor_shift(&self, a: &Poly<F::Elem>, shift: &F::Elem) -> Poly<F::Elem> {
        let lin = self.from_vec(vec![shift.clone(), self.field.one()]);
        let mut acc = self.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, &lin), &self.constant(c.clone()));
        }
        acc
    }

    pub fn is_squarefree(&self, a: &Poly<F::Elem>) -> Result<bool> {
        let g = self.gcd(a, &self.derivative(a))?;
        Ok(g.degree() == Some(0))
    }

    /// Yun's squarefree decomposition of a monic polynomial of positive degree:
    /// pairs `(s_i, i)` with `a = prod s_i^i`, each `s_i` squarefree, monic, nonconstant.
    pub fn squarefree_decomposition(
        &self,
        a: &Poly<F::Elem>,
    ) -> Result<Vec<(Poly<F::Elem>, usize)>> {
        let a = self.monic(a)?;
        let da = self.derivative(&a);
        let b = self.gcd(&a, &da)?;
        let mut c = self.div_exact(&a, &b)?;
        let mut d = self.sub(&self.div_exact(&da, &b)?, &self.derivative(&c));
        let mut out = Vec::new();
        let mut i = 1;
        while c.degree().unwrap_or(0) > 0 {
            let g = self.gcd(&c, &d)?;
            c = self.div_exact(&c, &g)?;
            d = self.sub(&self.div_exact(&d, &g)?, &self.derivative(&c));
            if g.degree().unwrap_or(0) > 0 {
                out.push((g, i));
            }
            i += 1;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(coeffs: &[i64]) -> QPoly {
        QPoly::from_ints(coeffs)
    }

    #[test]
    fn parse_polynomials() {
        assert_eq!("x^2-2".parse::<QPoly>().unwrap(), q(&[-2, 0, 1]));
        assert_eq!("x^4 - 10*x^2 + 1".parse::<QPoly>().unwrap(), q(&[1, 0, -10, 0, 1]));
        assert_eq!("-x + 3x^3 + x".parse::<QPoly>().unwrap(), q(&[0, 0, 0, 3]));
        let p = QPoly::parse_in("1/2*z - 3/4", "z").unwrap();
        assert_eq!(p.display_in("z"), "1/2*z - 3/4");
        assert!(matches!("x^2 2".parse::<QPoly>(), Err(Error::Syntax { pos: 4, .. })));
        assert!("1/0".parse::<QPoly>().is_err());
        assert!("".parse::<QPoly>().is_err());
        assert!("y".parse::<QPoly>().is_err());
    }

    #[test]
    fn div_rem_reconstructs() {
        let r = PolyRing::new(&RationalField);
        let a = q(&[5, -3, 0, 2, 7]);
        let b = q(&[1, 0, 3]);
        let (quo, rem) = r.div_rem(&a, &b).unwrap();
        assert_eq!(r.add(&r.mul(&quo, &b), &rem), a);
        assert!(rem.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_of_products() {
        let r = PolyRing::new(&RationalField);
        let common = q(&[-2, 0, 1]);
        let a = r.mul(&common, &q(&[1, 1]));
        let b = r.mul(&common, &q(&[3, 0, 1]));
        assert_eq!(r.gcd(&a, &b).unwrap(), common);
    }

    #[test]
    fn ext_gcd_bezout() {
        let r = PolyRing::new(&RationalField);
        let a = q(&[-1, 0, 1]);
        let b = q(&[2, 1]);
        let (g, s, t) = r.ext_gcd(&a, &b).unwrap();
        assert!(r.is_one(&g));
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &b)), g);
    }

    #[test]
    fn yun_multiplicities() {
        let r = PolyRing::new(&RationalField);
        // (x-1)^3 (x+2)
        let a = r.mul(&r.pow(&q(&[-1, 1]), 3), &q(&[2, 1]));
        let sqf = r.squarefree_decomposition(&a).unwrap();
        assert_eq!(sqf, vec![(q(&[2, 1]), 1), (q(&[-1, 1]), 3)]);
    }

    #[test]
    fn taylor_shift_matches_eval() {
        let r = PolyRing::new(&RationalField);
        let a = q(&[3, -1, 0, 2]);
        let s = Rational::from_integer(5.into());
        let shifted = r.taylor_shift(&a, &s);
        for t in -3..4 {
            let t = Rational::from_integer(t.into());
            assert_eq!(shifted.eval(&t), a.eval(&(&t + &s)));
        }
    }

    #[test]
    fn display() {
        assert_eq!(q(&[-2, 0, 1]).to_string(), "x^2 - 2");
        assert_eq!(q(&[1, -10, 0, 1]).display_in("z"), "z^3 - 10*z + 1");
        assert_eq!(q(&[]).to_string(), "0");
    }
}
