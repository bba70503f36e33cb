//! Differential polynomials over the rationals with `m` commuting derivations.
//!
//! A [`DerivativeVar`] is `∂_1^{i_1}⋯∂_m^{i_m} y_k`, stored as its exponent
//! vector and indeterminate index. A [`DiffPoly`] is a sparse map from
//! [`Monomial`]s (power products of derivatives) to non-zero rational
//! coefficients. The representation is canonical, so polynomial equality is
//! structural equality. Term storage is shared behind an `Arc`, which makes
//! clones cheap across decomposition branches.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

pub type Exponents = SmallVec<[u32; 4]>;

/// The ring context: number of derivations `m` and indeterminates `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    m: usize,
    n: usize,
}

impl Ring {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Precondition(format!(
                "ring needs m >= 1 and n >= 1, got m={m} n={n}"
            )));
        }
        Ok(Ring { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The derivative `θ y_indet` with `θ` given by `exps`; `indet` is 1-based.
    pub fn var(&self, indet: usize, exps: &[u32]) -> Result<DerivativeVar> {
        let v = DerivativeVar::new(indet, exps);
        self.check_var(&v)?;
        Ok(v)
    }

    /// The undifferentiated indeterminate `y_indet`.
    pub fn indet(&self, indet: usize) -> Result<DerivativeVar> {
        self.var(indet, &vec![0; self.m])
    }

    pub fn check_var(&self, v: &DerivativeVar) -> Result<()> {
        if v.exps.len() != self.m {
            return Err(Error::ContextMismatch(format!(
                "{v} has {} exponents, ring has m={}",
                v.exps.len(),
                self.m
            )));
        }
        if v.indet == 0 || v.indet as usize > self.n {
            return Err(Error::ContextMismatch(format!(
                "indeterminate index {} outside 1..={}",
                v.indet, self.n
            )));
        }
        Ok(())
    }

    pub fn check_poly(&self, f: &DiffPoly) -> Result<()> {
        f.variables().iter().try_for_each(|v| self.check_var(v))
    }

    /// `∂_j f` for a 1-based derivation index `j`.
    pub fn differentiate(&self, f: &DiffPoly, j: usize) -> Result<DiffPoly> {
        if j == 0 || j > self.m {
            return Err(Error::DerivationOutOfRange { index: j, m: self.m });
        }
        self.check_poly(f)?;
        Ok(f.derive(j - 1))
    }

    /// `θ f` where `θ = ∂_1^{theta_1}⋯∂_m^{theta_m}`.
    pub fn apply_theta(&self, f: &DiffPoly, theta: &[u32]) -> Result<DiffPoly> {
        if theta.len() != self.m {
            return Err(Error::ContextMismatch(format!(
                "operator has {} exponents, ring has m={}",
                theta.len(),
                self.m
            )));
        }
        self.check_poly(f)?;
        Ok(f.apply_theta(theta))
    }
}

/// A derivative `θ y_k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivativeVar {
    indet: u32,
    exps: Exponents,
}

impl DerivativeVar {
    pub fn new(indet: usize, exps: &[u32]) -> Self {
        DerivativeVar {
            indet: indet as u32,
            exps: Exponents::from_slice(exps),
        }
    }

    /// 1-based indeterminate index.
    pub fn indet(&self) -> usize {
        self.indet as usize
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn order(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn weight(&self, w: &WeightVector) -> u64 {
        self.exps
            .iter()
            .zip(w.components())
            .map(|(&e, &c)| e as u64 * c)
            .sum()
    }

    /// `∂_j` applied to this derivative (0-based `j`).
    pub fn derive(&self, j: usize) -> DerivativeVar {
        let mut d = self.clone();
        d.exps[j] += 1;
        d
    }

    pub fn apply_theta(&self, theta: &[u32]) -> DerivativeVar {
        let mut d = self.clone();
        for (e, t) in d.exps.iter_mut().zip(theta) {
            *e += t;
        }
        d
    }

    /// `true` when `other = θ self` for some `θ` (possibly the identity).
    pub fn divides(&self, other: &DerivativeVar) -> bool {
        self.indet == other.indet
            && self.exps.len() == other.exps.len()
            && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `true` when `other = θ self` for some `θ ≠ id`.
    pub fn properly_divides(&self, other: &DerivativeVar) -> bool {
        self != other && self.divides(other)
    }

    /// The operator `θ` with `θ self = other`, if `self` divides `other`.
    pub fn quotient(&self, other: &DerivativeVar) -> Option<Exponents> {
        self.divides(other)
            .then(|| other.exps.iter().zip(&self.exps).map(|(b, a)| b - a).collect())
    }
}

impl fmt::Display for DerivativeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y{}", self.indet)?;
        if self.exps.iter().any(|&e| e != 0) {
            write!(f, "[")?;
            for (i, e) in self.exps.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DerivativeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Weights `c_1..c_m` of the derivations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<u64>);

impl WeightVector {
    pub fn new(c: Vec<u64>) -> Result<Self> {
        if c.is_empty() || c.contains(&0) {
            return Err(Error::Precondition(format!(
                "weights must be a non-empty vector of positive integers, got {c:?}"
            )));
        }
        Ok(WeightVector(c))
    }

    /// All weights equal to one (the orderly case).
    pub fn uniform(m: usize) -> Self {
        WeightVector(vec![1; m])
    }

    pub fn components(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|&c| c == 1)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Power product of derivatives, sorted by variable, no zero exponents.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(DerivativeVar, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var_pow(v: DerivativeVar, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(DerivativeVar, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &DerivativeVar) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// The monomial with the exponent of `v` replaced by `e`.
    fn with_degree(&self, v: &DerivativeVar, e: u32) -> Monomial {
        let mut out = self.0.clone();
        match out.binary_search_by(|(w, _)| w.cmp(v)) {
            Ok(i) if e == 0 => {
                out.remove(i);
            }
            Ok(i) => out[i].1 = e,
            Err(_) if e == 0 => {}
            Err(i) => out.insert(i, (v.clone(), e)),
        }
        Monomial(out)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().rev().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

type Terms = BTreeMap<Monomial, Rational>;

/// A differential polynomial with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiffPoly {
    terms: Arc<Terms>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::from_terms([(Monomial::one(), c)])
    }

    pub fn var(v: DerivativeVar) -> Self {
        DiffPoly::from_terms([(Monomial::var_pow(v, 1), Rational::one())])
    }

    pub fn monomial(c: Rational, m: Monomial) -> Self {
        DiffPoly::from_terms([(m, c)])
    }

    /// Collects terms, adding coefficients of repeated monomials.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut map = Terms::new();
        for (m, c) in terms {
            add_term(&mut map, m, c);
        }
        DiffPoly { terms: Arc::new(map) }
    }

    fn from_map(map: Terms) -> Self {
        DiffPoly { terms: Arc::new(map) }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if this polynomial lies in the coefficient field (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_one())
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn variables(&self) -> BTreeSet<DerivativeVar> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains_var(&self, v: &DerivativeVar) -> bool {
        self.terms.keys().any(|m| m.degree_in(v) > 0)
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly::from_map(self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect())
    }

    pub fn mul_monomial(&self, c: &Rational, mono: &Monomial) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly::from_map(
            self.terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut result = DiffPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn degree_in(&self, v: &DerivativeVar) -> u32 {
        self.terms.keys().map(|m| m.degree_in(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^d` when this polynomial is viewed as univariate in `v`.
    pub fn coeff_in(&self, v: &DerivativeVar, d: u32) -> DiffPoly {
        DiffPoly::from_map(
            self.terms
                .iter()
                .filter(|(m, _)| m.degree_in(v) == d)
                .map(|(m, c)| (m.with_degree(v, 0), c.clone()))
                .collect(),
        )
    }

    /// Formal partial derivative `∂f/∂v`.
    pub fn partial(&self, v: &DerivativeVar) -> DiffPoly {
        let mut map = Terms::new();
        for (m, c) in self.terms.iter() {
            let e = m.degree_in(v);
            if e > 0 {
                add_term(&mut map, m.with_degree(v, e - 1), c * &Rational::from(e as i64));
            }
        }
        DiffPoly::from_map(map)
    }

    /// `∂_j` (0-based) by the product rule; constants differentiate to zero.
    pub fn derive(&self, j: usize) -> DiffPoly {
        let mut map = Terms::new();
        for (m, c) in self.terms.iter() {
            for (idx, (v, e)) in m.0.iter().enumerate() {
                let mut factors = m.0.clone();
                if *e == 1 {
                    factors.remove(idx);
                } else {
                    factors[idx].1 -= 1;
                }
                let reduced = Monomial(factors);
                let term = reduced.mul(&Monomial::var_pow(v.derive(j), 1));
                add_term(&mut map, term, c * &Rational::from(*e as i64));
            }
        }
        DiffPoly::from_map(map)
    }

    /// Applies `θ = ∂_1^{theta_1}⋯∂_m^{theta_m}` by repeated differentiation.
    pub fn apply_theta(&self, theta: &[u32]) -> DiffPoly {
        let mut f = self.clone();
        for (j, &t) in theta.iter().enumerate() {
            for _ in 0..t {
                f = f.derive(j);
            }
        }
        f
    }

    /// Maximum order of a derivative occurring in `f`; `None` for constants.
    pub fn order(&self) -> Option<u64> {
        self.variables().iter().map(DerivativeVar::order).max()
    }

    /// Maximum exponent of `∂_j` (1-based) over derivatives occurring in `f`.
    pub fn order_in(&self, j: usize) -> Option<u64> {
        self.variables()
            .iter()
            .map(|v| v.exps().get(j - 1).copied().unwrap_or(0) as u64)
            .max()
    }

    /// Maximum weight of a derivative occurring in `f`; `None` for constants.
    pub fn weight(&self, w: &WeightVector) -> Option<u64> {
        self.variables().iter().map(|v| v.weight(w)).max()
    }

    /// Whether every monomial has degree exactly one.
    pub fn is_linear_homogeneous(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 1)
    }

    /// Scalar multiple with coprime integer coefficients and a positive
    /// coefficient on the largest monomial. Zero stays zero.
    pub fn primitive(&self) -> DiffPoly {
        let Some(content) = Rational::content(self.terms.values()) else {
            return DiffPoly::zero();
        };
        let lead_negative = self
            .terms
            .values()
            .next_back()
            .map(Rational::is_negative)
            .unwrap_or(false);
        let divisor = if lead_negative { -content } else { content };
        if divisor.is_one() {
            return self.clone();
        }
        let inv = divisor.recip().expect("content is non-zero");
        self.scale(&inv)
    }
}

fn add_term(map: &mut Terms, m: Monomial, c: Rational) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut map = (*big.terms).clone();
        for (m, c) in small.terms.iter() {
            add_term(&mut map, m.clone(), c.clone());
        }
        DiffPoly::from_map(map)
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut map = (*self.terms).clone();
        for (m, c) in rhs.terms.iter() {
            add_term(&mut map, m.clone(), -c);
        }
        DiffPoly::from_map(map)
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut map = Terms::new();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in rhs.terms.iter() {
                add_term(&mut map, ma.mul(mb), ca * cb);
            }
        }
        DiffPoly::from_map(map)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly::from_map(self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$method(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

/// Prints terms from the largest monomial down, e.g. `y1[1]^2 - 4*y1`.
impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Maximum weight over a set of polynomials, ignoring constants.
pub fn set_weight<'a>(polys: impl IntoIterator<Item = &'a DiffPoly>, w: &WeightVector) -> Option<u64> {
    polys.into_iter().filter_map(|f| f.weight(w)).max()
}

/// Maximum order over a set of polynomials, ignoring constants.
pub fn set_order<'a>(polys: impl IntoIterator<Item = &'a DiffPoly>) -> Option<u64> {
    polys.into_iter().filter_map(DiffPoly::order).max()
}
