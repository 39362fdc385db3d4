//! Arithmetic in a number field `Q(z) = Q[x]/(m)`, factorization over it by
//! norms, and primitive elements of simple extensions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::factor::factor_over_q;
use crate::poly::{Field, Poly, PolyRing, QPoly, Rational, RationalField};

/// An element of `F_n`, as coordinates in the power basis `1, z, ..., z^(d-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    pub level: usize,
    pub coords: Vec<Rational>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self.coords.split_first() {
            Some((c, rest)) if rest.iter().all(Zero::is_zero) => Some(c),
            _ => None,
        }
    }

    /// The coordinate polynomial `sum coords[i] x^i`.
    pub fn to_poly(&self) -> QPoly {
        QPoly::from_rationals(self.coords.clone())
    }

    /// Renders the element as a polynomial in `var`.
    pub fn display_in(&self, var: &str) -> String {
        self.to_poly().display_in(var)
    }
}

/// A number field given by the monic minimal polynomial of its generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberField {
    level: usize,
    minpoly: QPoly,
}

pub type KPoly = Poly<FieldElement>;

impl NumberField {
    /// `minpoly` must be monic and irreducible over `Q`; irreducibility is
    /// the caller's responsibility (checked by tower validation).
    pub fn new(level: usize, minpoly: QPoly) -> Result<Self> {
        match minpoly.degree() {
            None | Some(0) => return Err(Error::invalid("minimal polynomial must have degree >= 1")),
            _ => {}
        }
        if !minpoly.is_monic() {
            return Err(Error::invalid("minimal polynomial must be monic"));
        }
        Ok(Self { level, minpoly })
    }

    /// The field `Q`, presented by the generator `1` (minimal polynomial `x - 1`).
    pub fn rationals() -> Self {
        Self {
            level: 0,
            minpoly: QPoly::from_ints(&[-1, 1]),
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.minpoly.degree().unwrap()
    }

    pub fn minpoly(&self) -> &QPoly {
        &self.minpoly
    }

    pub fn ring(&self) -> PolyRing<'_, Self> {
        PolyRing::new(self)
    }

    /// Reduces an arbitrary rational polynomial modulo the minimal polynomial.
    pub fn from_poly(&self, p: &QPoly) -> FieldElement {
        self.reduce(p.coeffs().to_vec())
    }

    pub fn from_coords(&self, coords: Vec<Rational>) -> Result<FieldElement> {
        if coords.len() != self.degree() {
            return Err(Error::invalid(format!(
                "expected {} coordinates, got {}",
                self.degree(),
                coords.len()
            )));
        }
        Ok(FieldElement {
            level: self.level,
            coords,
        })
    }

    pub fn rational(&self, q: Rational) -> FieldElement {
        let mut coords = vec![Rational::zero(); self.degree()];
        coords[0] = q;
        FieldElement {
            level: self.level,
            coords,
        }
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        self.rational(Rational::from_integer(BigInt::from(n)))
    }

    /// The generator `z` (equal to `1` when the field is `Q`).
    pub fn generator(&self) -> FieldElement {
        self.from_poly(&QPoly::x())
    }

    fn reduce(&self, mut c: Vec<Rational>) -> FieldElement {
        let d = self.degree();
        let m = self.minpoly.coeffs();
        while c.len() > d {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = c.len() - d;
            for (j, mj) in m.iter().take(d).enumerate() {
                c[base + j] -= &top * mj;
            }
        }
        c.resize(d, Rational::zero());
        FieldElement {
            level: self.level,
            coords: c,
        }
    }

    /// Norm `N_{K/Q}(a)`: determinant of multiplication by `a`.
    pub fn norm(&self, a: &FieldElement) -> Rational {
        let d = self.degree();
        let mut cols = Vec::with_capacity(d);
        let mut basis = self.one();
        let z = self.generator();
        for _ in 0..d {
            cols.push(self.mul(a, &basis).coords);
            basis = self.mul(&basis, &z);
        }
        determinant(cols)
    }

    /// `N(x) = prod_sigma sigma(g)(x)`, the norm of a polynomial over this field,
    /// computed by evaluation at `deg N + 1` rational points and interpolation.
    pub fn norm_poly(&self, g: &KPoly) -> QPoly {
        let e = g.degree().expect("norm of the zero polynomial");
        let n = e * self.degree();
        let points: Vec<Rational> = (0..=n)
            .map(|t| Rational::from_integer(BigInt::from(t)))
            .collect();
        let values: Vec<Rational> = points
            .iter()
            .map(|t| {
                let at = self.rational(t.clone());
                self.norm(&self.ring().eval(g, &at))
            })
            .collect();
        interpolate(&points, &values)
    }

    /// Embeds `Q[x]` into `K[x]`.
    pub fn lift_poly(&self, p: &QPoly) -> KPoly {
        self.ring().from_rational_poly(p)
    }
}

impl Field for NumberField {
    type Elem = FieldElement;

    fn zero(&self) -> FieldElement {
        self.rational(Rational::zero())
    }

    fn one(&self) -> FieldElement {
        self.rational(Rational::one())
    }

    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        debug_assert_eq!(a.coords.len(), b.coords.len());
        FieldElement {
            level: self.level,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            level: self.level,
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let d = self.degree();
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        self.reduce(prod)
    }

    fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            level: self.level,
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let qr = PolyRing::new(&RationalField);
        let (g, s, _) = qr.ext_gcd(&a.to_poly(), &self.minpoly)?;
        if g.degree() != Some(0) {
            return Err(Error::invalid("minimal polynomial is reducible"));
        }
        Ok(self.from_poly(&s))
    }

    fn from_rational(&self, q: &Rational) -> FieldElement {
        self.rational(q.clone())
    }
}

/// Determinant of a square matrix given by columns, by Gaussian elimination.
pub(crate) fn determinant(mut cols: Vec<Vec<Rational>>) -> Rational {
    let n = cols.len();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| !cols[r][c].is_zero()) else {
            return Rational::zero();
        };
        if pivot != c {
            cols.swap(pivot, c);
            det = -det;
        }
        let p = cols[c][c].clone();
        det *= &p;
        for r in c + 1..n {
            if cols[r][c].is_zero() {
                continue;
            }
            let f = &cols[r][c] / &p;
            for k in c..n {
                let t = &f * &cols[c][k];
                cols[r][k] -= t;
            }
        }
    }
    det
}

/// Newton interpolation through `(points[i], values[i])`.
pub(crate) fn interpolate(points: &[Rational], values: &[Rational]) -> QPoly {
    let n = points.len();
    let mut coef = values.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&points[i] - &points[i - j]);
        }
    }
    let ring = PolyRing::new(&RationalField);
    let mut acc = QPoly::from_rationals(vec![coef[n - 1].clone()]);
    for i in (0..n - 1).rev() {
        acc = ring.add(
            &ring.mul(&acc, &ring.linear_root(&points[i])),
            &QPoly::from_rationals(vec![coef[i].clone()]),
        );
    }
    acc
}

fn canonical_sort(factors: &mut [(KPoly, usize)]) {
    factors.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.coeffs().iter().map(|c| &c.coords).cmp(b.0.coeffs().iter().map(|c| &c.coords)))
    });
}

/// Complete factorization of `p` over `field` into monic irreducibles with
/// multiplicities, sorted by degree then coefficients.
pub fn factor_over_field(field: &NumberField, p: &KPoly) -> Result<Vec<(KPoly, usize)>> {
    if p.is_zero() {
        return Err(Error::invalid("cannot factor the zero polynomial"));
    }
    if p.coeffs().iter().any(|c| c.coords.len() != field.degree()) {
        return Err(Error::invalid("coefficients do not belong to this field"));
    }
    if p.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let ring = field.ring();
    let mut out = Vec::new();
    for (part, mult) in ring.squarefree_decomposition(p)? {
        for g in factor_squarefree_over_field(field, &part)? {
            out.push((g, mult));
        }
    }
    canonical_sort(&mut out);
    Ok(out)
}

/// Smallest `k = 0, 1, 2, ...` with `N(g(x - k z))` squarefree, and that norm.
fn squarefree_norm(field: &NumberField, g: &KPoly) -> Result<(usize, KPoly, QPoly)> {
    let ring = field.ring();
    let qring = PolyRing::new(&RationalField);
    let z = field.generator();
    for k in 0usize.. {
        let shift = field.neg(&field.mul(&field.integer(k as i64), &z));
        let shifted = ring.taylor_shift(g, &shift);
        let norm = field.norm_poly(&shifted);
        if qring.is_squarefree(&norm)? {
            return Ok((k, shifted, norm));
        }
    }
    unreachable!()
}

fn factor_squarefree_over_field(field: &NumberField, g: &KPoly) -> Result<Vec<KPoly>> {
    let ring = field.ring();
    let g = ring.monic(g)?;
    if g.degree() == Some(1) {
        return Ok(vec![g]);
    }
    let (k, shifted, norm) = squarefree_norm(field, &g)?;
    let factors = factor_over_q(&norm)?;
    if factors.len() == 1 {
        return Ok(vec![g]);
    }
    let unshift = field.mul(&field.integer(k as i64), &field.generator());
    let mut rest = shifted;
    let mut out = Vec::with_capacity(factors.len());
    for (h, _) in factors {
        let common = ring.gcd(&rest, &field.lift_poly(&h))?;
        if common.degree().unwrap_or(0) >= 1 {
            rest = ring.div_exact(&rest, &common)?;
            out.push(ring.taylor_shift(&common, &unshift));
        }
    }
    Ok(out)
}

/// A primitive element `w = theta + shift * z` of `K(theta)`, `theta` a root of
/// an irreducible `g` over `K = Q(z)`.
#[derive(Debug, Clone)]
pub struct PrimitiveElement {
    /// The field `Q(w)`.
    pub field: NumberField,
    pub shift: usize,
    /// `z` written in the power basis of `w`.
    pub old_gen: FieldElement,
    /// `theta` written in the power basis of `w`.
    pub new_root: FieldElement,
}

impl PrimitiveElement {
    pub fn minpoly(&self) -> &QPoly {
        self.field.minpoly()
    }
}

/// Finds `w = theta + k z` for the least `k >= 0` such that `Q(w) = K(theta)`.
/// A linear `g` adjoins nothing: the field and generator are returned unchanged.
pub fn primitive_element(field: &NumberField, g: &KPoly) -> Result<PrimitiveElement> {
    let ring = field.ring();
    let g = ring.monic(g)?;
    let e = g
        .degree()
        .filter(|&e| e >= 1)
        .ok_or_else(|| Error::invalid("need a polynomial of positive degree"))?;
    if e == 1 {
        return Ok(PrimitiveElement {
            field: field.clone(),
            shift: 0,
            old_gen: field.generator(),
            new_root: field.neg(&g.coeffs()[0]),
        });
    }
    let (k, _, norm) = squarefree_norm(field, &g)?;
    let big = NumberField::new(field.level + 1, norm)?;
    let big_ring = big.ring();
    let w = big.generator();

    // z is the unique common root of m(y) and g(w - k y) in Q(w)[y].
    let y_sub = big_ring.from_vec(vec![w.clone(), big.integer(-(k as i64))]);
    let mut composed = big_ring.zero();
    for c in g.coeffs().iter().rev() {
        let c_in_y = big_ring.from_rational_poly(&c.to_poly());
        composed = big_ring.add(&big_ring.mul(&composed, &y_sub), &c_in_y);
    }
    let m_in_y = big_ring.from_rational_poly(field.minpoly());
    let common = big_ring.gcd(&m_in_y, &composed)?;
    if common.degree() != Some(1) {
        return Err(Error::invalid("polynomial is not irreducible over the field"));
    }
    let old_gen = big.neg(&common.coeffs()[0]);
    let new_root = big.sub(&w, &big.mul(&big.integer(k as i64), &old_gen));
    Ok(PrimitiveElement {
        field: big,
        shift: k,
        old_gen,
        new_root,
    })
}

/// Evaluates the coordinate polynomial of `a` (an element of `Q(z)`) at the
/// image of `z` in `target`: the embedding determined by `z |-> image`.
pub fn embed(target: &NumberField, a: &FieldElement, image: &FieldElement) -> FieldElement {
    let mut acc = target.zero();
    for c in a.coords.iter().rev() {
        acc = target.add(&target.mul(&acc, image), &target.rational(c.clone()));
    }
    acc
}
