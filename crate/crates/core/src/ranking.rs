//! Weighted rankings and the notions built on them: leaders, initials,
//! separants, ranks, (partial) reducedness and triangular sets.
//!
//! Derivatives are ordered by weight first. Ties are broken by indeterminate
//! index (lower index ranks lower) and then by reverse-lexicographic
//! comparison of exponent vectors, reading `∂_m` first. Both tie-breaks are
//! invariant under applying a common `θ`, so the result is a ranking; with
//! all weights equal to one it is orderly.

use std::cmp::Ordering;

use crate::diffpoly::{DerivativeVar, DiffPoly, WeightVector};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedRanking {
    weights: WeightVector,
}

/// `lead(f)^deg`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank {
    pub leader: DerivativeVar,
    pub degree: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetClass {
    None,
    WeakDTriangular,
    DTriangular,
    Autoreduced,
}

impl WeightedRanking {
    pub fn new(weights: WeightVector) -> Self {
        WeightedRanking { weights }
    }

    pub fn orderly(m: usize) -> Self {
        WeightedRanking::new(WeightVector::uniform(m))
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    /// Total order on derivatives; assumes both come from this ring.
    pub fn cmp_vars(&self, u: &DerivativeVar, v: &DerivativeVar) -> Ordering {
        u.weight(&self.weights)
            .cmp(&v.weight(&self.weights))
            .then_with(|| u.indet().cmp(&v.indet()))
            .then_with(|| u.exps().iter().rev().cmp(v.exps().iter().rev()))
    }

    pub fn compare_vars(&self, u: &DerivativeVar, v: &DerivativeVar) -> Result<Ordering> {
        for x in [u, v] {
            if x.exps().len() != self.m() {
                return Err(Error::ContextMismatch(format!(
                    "{x} does not belong to a ring with m={}",
                    self.m()
                )));
            }
        }
        Ok(self.cmp_vars(u, v))
    }

    /// Highest-ranked derivative occurring in `f`.
    pub fn leader(&self, f: &DiffPoly) -> Result<DerivativeVar> {
        f.variables()
            .into_iter()
            .max_by(|a, b| self.cmp_vars(a, b))
            .ok_or(Error::Constant)
    }

    pub fn rank(&self, f: &DiffPoly) -> Result<Rank> {
        let leader = self.leader(f)?;
        let degree = f.degree_in(&leader);
        Ok(Rank { leader, degree })
    }

    /// Leading coefficient of `f` viewed as univariate in its leader.
    pub fn initial(&self, f: &DiffPoly) -> Result<DiffPoly> {
        let r = self.rank(f)?;
        Ok(f.coeff_in(&r.leader, r.degree))
    }

    /// `∂f/∂lead(f)`.
    pub fn separant(&self, f: &DiffPoly) -> Result<DiffPoly> {
        let u = self.leader(f)?;
        Ok(f.partial(&u))
    }

    pub fn cmp_rank(&self, a: &Rank, b: &Rank) -> Ordering {
        self.cmp_vars(&a.leader, &b.leader)
            .then(a.degree.cmp(&b.degree))
    }

    /// Pre-order on non-constant polynomials: `Equal` means same leader and
    /// same leader degree, not equal polynomials.
    pub fn compare_rank(&self, f: &DiffPoly, g: &DiffPoly) -> Result<Ordering> {
        Ok(self.cmp_rank(&self.rank(f)?, &self.rank(g)?))
    }

    /// Rank comparison of weak d-triangular sets. A set that extends an
    /// equal-rank prefix of the other ranks lower.
    pub fn compare_triangular_sets(&self, a: &[DiffPoly], b: &[DiffPoly]) -> Result<Ordering> {
        let ranks = |s: &[DiffPoly]| -> Result<Vec<Rank>> {
            if self.classify_set(s) == SetClass::None {
                return Err(Error::NotWeakTriangular(format!("{s:?}")));
            }
            let mut r = s.iter().map(|f| self.rank(f)).collect::<Result<Vec<_>>>()?;
            r.sort_by(|x, y| self.cmp_rank(x, y));
            Ok(r)
        };
        let (ra, rb) = (ranks(a)?, ranks(b)?);
        for (x, y) in ra.iter().zip(&rb) {
            match self.cmp_rank(x, y) {
                Ordering::Equal => continue,
                other => return Ok(other),
            }
        }
        Ok(rb.len().cmp(&ra.len()))
    }

    /// No proper derivative of `lead(g)` occurs in `f`.
    pub fn is_partially_reduced(&self, f: &DiffPoly, g: &DiffPoly) -> Result<bool> {
        let u = self.leader(g)?;
        Ok(!f.variables().iter().any(|v| u.properly_divides(v)))
    }

    /// Partially reduced and `deg_{lead(g)} f < deg_{lead(g)} g`.
    pub fn is_reduced(&self, f: &DiffPoly, g: &DiffPoly) -> Result<bool> {
        let r = self.rank(g)?;
        Ok(self.is_partially_reduced(f, g)? && f.degree_in(&r.leader) < r.degree)
    }

    /// Strongest class the set belongs to.
    pub fn classify_set(&self, a: &[DiffPoly]) -> SetClass {
        let Ok(leaders) = a.iter().map(|f| self.leader(f)).collect::<Result<Vec<_>>>() else {
            return SetClass::None;
        };
        for (i, u) in leaders.iter().enumerate() {
            for v in &leaders[i + 1..] {
                if u.divides(v) || v.divides(u) {
                    return SetClass::None;
                }
            }
        }
        let pairwise = |test: &dyn Fn(&DiffPoly, &DiffPoly) -> bool| {
            a.iter().enumerate().all(|(i, f)| {
                a.iter()
                    .enumerate()
                    .all(|(j, g)| i == j || test(f, g))
            })
        };
        if pairwise(&|f, g| self.is_reduced(f, g).unwrap_or(false)) {
            SetClass::Autoreduced
        } else if pairwise(&|f, g| self.is_partially_reduced(f, g).unwrap_or(false)) {
            SetClass::DTriangular
        } else {
            SetClass::WeakDTriangular
        }
    }

    /// Orders polynomials by rank with constants first; ties broken by the
    /// canonical text form.
    pub fn cmp_polys(&self, f: &DiffPoly, g: &DiffPoly) -> Ordering {
        match (self.rank(f).ok(), self.rank(g).ok()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(a), Some(b)) => self.cmp_rank(&a, &b),
        }
        .then_with(|| f.to_string().cmp(&g.to_string()))
    }
}

/// One element of a [`TriangularSet`] together with its cached rank data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub poly: DiffPoly,
    pub leader: DerivativeVar,
    pub degree: u32,
    pub initial: DiffPoly,
    pub separant: DiffPoly,
}

impl Element {
    pub fn new(poly: DiffPoly, r: &WeightedRanking) -> Result<Self> {
        let Rank { leader, degree } = r.rank(&poly)?;
        let initial = poly.coeff_in(&leader, degree);
        let separant = poly.partial(&leader);
        Ok(Element {
            poly,
            leader,
            degree,
            initial,
            separant,
        })
    }
}

/// A weak d-triangular set, kept in increasing leader order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriangularSet {
    elems: Vec<Element>,
}

impl TriangularSet {
    pub fn empty() -> Self {
        TriangularSet::default()
    }

    pub fn new(polys: impl IntoIterator<Item = DiffPoly>, r: &WeightedRanking) -> Result<Self> {
        let mut set = TriangularSet::empty();
        for f in polys {
            set = set.insert(Element::new(f, r)?, r)?;
        }
        Ok(set)
    }

    /// Adds an element whose leader is incomparable with every existing leader.
    pub fn insert(&self, e: Element, r: &WeightedRanking) -> Result<Self> {
        if let Some(clash) = self
            .elems
            .iter()
            .find(|x| x.leader.divides(&e.leader) || e.leader.divides(&x.leader))
        {
            return Err(Error::NotWeakTriangular(format!(
                "leaders {} and {} are comparable",
                clash.leader, e.leader
            )));
        }
        let mut elems = self.elems.clone();
        let at = elems
            .binary_search_by(|x| r.cmp_vars(&x.leader, &e.leader))
            .unwrap_err();
        elems.insert(at, e);
        Ok(TriangularSet { elems })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elems
    }

    pub fn polys(&self) -> impl Iterator<Item = &DiffPoly> + '_ {
        self.elems.iter().map(|e| &e.poly)
    }

    pub fn leaders(&self) -> Vec<DerivativeVar> {
        self.elems.iter().map(|e| e.leader.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, leader: &DerivativeVar) -> Option<&Element> {
        self.elems.iter().find(|e| &e.leader == leader)
    }

    /// Initials and separants, `H_A`.
    pub fn h_set(&self) -> Vec<DiffPoly> {
        self.elems
            .iter()
            .flat_map(|e| [e.initial.clone(), e.separant.clone()])
            .collect()
    }

    pub fn retain(&self, keep: impl Fn(&Element) -> bool) -> Self {
        TriangularSet {
            elems: self.elems.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }
}
