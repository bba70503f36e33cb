//! Ritt reduction with respect to a weak d-triangular set.
//!
//! Each loop step looks at the highest-ranked derivative `v` of the current
//! polynomial. If `v = θ lead(a)` with `θ ≠ id`, the prolongation `θa` is
//! linear in `v` with leading coefficient `sep(a)`, and `v` is eliminated by
//! pseudo-division against it. In full mode, if `v = lead(a)` and the degree
//! of `v` is at least `deg(a)`, the degree is lowered by algebraic
//! pseudo-division against `a` itself, at the cost of a factor `init(a)`.
//! Only derivatives below `v` are introduced, so the loop terminates.
//!
//! The certified entry points ([`partial_reduce`], [`full_reduce`]) return a
//! [`ReductionCertificate`] recording the identity
//! `scale · multiplier · f = Σ cofactor · θ(a) + remainder`. The fast entry
//! points ([`pd_red`], [`d_red`]) skip the bookkeeping and keep intermediate
//! results primitive.

use std::collections::BTreeMap;

use crate::diffpoly::{DerivativeVar, DiffPoly, Exponents, Monomial};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::ranking::{Element, TriangularSet, WeightedRanking};

/// Least common derivative of two derivatives of the same indeterminate.
pub fn lcd(u: &DerivativeVar, v: &DerivativeVar) -> Option<DerivativeVar> {
    if u.indet() != v.indet() || u.exps().len() != v.exps().len() {
        return None;
    }
    let exps: Vec<u32> = u.exps().iter().zip(v.exps()).map(|(a, b)| *a.max(b)).collect();
    Some(DerivativeVar::new(u.indet(), &exps))
}

/// `Δ(f, g) = sep(g)·φ(f) − sep(f)·ψ(g)` where `φ lead(f) = ψ lead(g)` is the
/// least common derivative; zero when the leaders have none.
pub fn delta_polynomial(f: &DiffPoly, g: &DiffPoly, r: &WeightedRanking) -> Result<DiffPoly> {
    Ok(delta_elements(&Element::new(f.clone(), r)?, &Element::new(g.clone(), r)?))
}

pub(crate) fn delta_elements(f: &Element, g: &Element) -> DiffPoly {
    let Some(u) = lcd(&f.leader, &g.leader) else {
        return DiffPoly::zero();
    };
    let phi = f.leader.quotient(&u).expect("lcd is a derivative of both leaders");
    let psi = g.leader.quotient(&u).expect("lcd is a derivative of both leaders");
    &(&g.separant * &f.poly.apply_theta(&phi)) - &(&f.separant * &g.poly.apply_theta(&psi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorKind {
    Initial,
    Separant,
}

/// `init(A[element])^power` or `sep(A[element])^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplierFactor {
    pub element: usize,
    pub kind: FactorKind,
    pub power: u32,
}

/// `cofactor · θ(A[element])` with `θ = ∂^theta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinationTerm {
    pub theta: Exponents,
    pub element: usize,
    pub cofactor: DiffPoly,
}

/// Witness for `scale · multiplier · f = Σ cofactor_i · θ_i(A[element_i]) + remainder`.
/// Element indices refer to the triangular set in increasing leader order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub multiplier: Vec<MultiplierFactor>,
    pub combination: Vec<CombinationTerm>,
    pub remainder: DiffPoly,
    pub scale: Rational,
}

impl ReductionCertificate {
    /// Expands the multiplier factor list into a polynomial.
    pub fn multiplier_poly(&self, set: &TriangularSet) -> DiffPoly {
        self.multiplier.iter().fold(DiffPoly::one(), |acc, fac| {
            let e = &set.elements()[fac.element];
            let base = match fac.kind {
                FactorKind::Initial => &e.initial,
                FactorKind::Separant => &e.separant,
            };
            &acc * &base.pow(fac.power)
        })
    }

    /// Checks the certificate identity by exact expansion.
    pub fn verify(&self, f: &DiffPoly, set: &TriangularSet) -> bool {
        if self.combination.iter().any(|t| t.element >= set.len())
            || self.multiplier.iter().any(|t| t.element >= set.len())
        {
            return false;
        }
        let lhs = (&self.multiplier_poly(set) * f).scale(&self.scale);
        let rhs = self.combination.iter().fold(self.remainder.clone(), |acc, t| {
            let a = &set.elements()[t.element].poly;
            &acc + &(&t.cofactor * &a.apply_theta(&t.theta))
        });
        lhs == rhs
    }

    /// Whether only separants occur in the multiplier (`S_A^∞`).
    pub fn uses_only_separants(&self) -> bool {
        self.multiplier.iter().all(|f| f.kind == FactorKind::Separant)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ReduceOptions {
    /// Divide the remainder by its rational content, recording the factor in
    /// the certificate's `scale`.
    pub normalize: bool,
}

struct Tracker {
    multiplier: BTreeMap<(usize, FactorKind), u32>,
    combination: BTreeMap<(usize, Exponents), DiffPoly>,
}

impl Tracker {
    fn new() -> Self {
        Tracker {
            multiplier: BTreeMap::new(),
            combination: BTreeMap::new(),
        }
    }

    fn record(&mut self, element: usize, kind: FactorKind, lc: &DiffPoly, theta: Exponents, quotient: DiffPoly) {
        *self.multiplier.entry((element, kind)).or_insert(0) += 1;
        for q in self.combination.values_mut() {
            *q = &*q * lc;
        }
        let slot = self
            .combination
            .entry((element, theta))
            .or_insert_with(DiffPoly::zero);
        *slot = &*slot + &quotient;
    }
}

enum Step<'a> {
    Prolong { idx: usize, elem: &'a Element, theta: Exponents, var: DerivativeVar },
    Algebraic { idx: usize, elem: &'a Element },
}

fn next_step<'a>(f: &DiffPoly, set: &'a TriangularSet, r: &WeightedRanking, full: bool) -> Option<Step<'a>> {
    let mut vars: Vec<DerivativeVar> = f.variables().into_iter().collect();
    vars.sort_by(|a, b| r.cmp_vars(b, a));
    for v in vars {
        for (idx, e) in set.elements().iter().enumerate() {
            if e.leader.properly_divides(&v) {
                let theta = e.leader.quotient(&v).expect("leader divides v");
                return Some(Step::Prolong { idx, elem: e, theta, var: v });
            }
            if full && e.leader == v && f.degree_in(&v) >= e.degree {
                return Some(Step::Algebraic { idx, elem: e });
            }
        }
    }
    None
}

fn reduce(
    f: &DiffPoly,
    set: &TriangularSet,
    r: &WeightedRanking,
    full: bool,
    mut tracker: Option<&mut Tracker>,
    keep_primitive: bool,
) -> DiffPoly {
    let mut cur = f.clone();
    while let Some(step) = next_step(&cur, set, r, full) {
        let (idx, kind, divisor, var, lc, div_deg, theta) = match step {
            Step::Prolong { idx, elem, theta, var } => {
                let g = elem.poly.apply_theta(&theta);
                (idx, FactorKind::Separant, g, var, elem.separant.clone(), 1, theta)
            }
            Step::Algebraic { idx, elem } => (
                idx,
                FactorKind::Initial,
                elem.poly.clone(),
                elem.leader.clone(),
                elem.initial.clone(),
                elem.degree,
                Exponents::from_elem(0, elem.leader.exps().len()),
            ),
        };
        // pseudo-divide `cur` by `divisor` with respect to `var`
        loop {
            let d = cur.degree_in(&var);
            if d < div_deg {
                break;
            }
            let c = cur.coeff_in(&var, d);
            let quotient = c.mul_monomial(&Rational::one(), &Monomial::var_pow(var.clone(), d - div_deg));
            cur = &(&lc * &cur) - &(&quotient * &divisor);
            if let Some(t) = tracker.as_deref_mut() {
                t.record(idx, kind, &lc, theta.clone(), quotient);
            }
            if keep_primitive {
                cur = cur.primitive();
            }
        }
    }
    cur
}

fn certified(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking, full: bool, opts: ReduceOptions) -> ReductionCertificate {
    let mut tracker = Tracker::new();
    let mut remainder = reduce(f, set, r, full, Some(&mut tracker), false);
    let mut scale = Rational::one();
    let mut combination: Vec<CombinationTerm> = tracker
        .combination
        .into_iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|((element, theta), cofactor)| CombinationTerm { theta, element, cofactor })
        .collect();
    if opts.normalize {
        if let Some(content) = Rational::content(remainder.terms().map(|(_, c)| c)) {
            let inv = content.recip().expect("content is non-zero");
            remainder = remainder.scale(&inv);
            for t in &mut combination {
                t.cofactor = t.cofactor.scale(&inv);
            }
            scale = inv;
        }
    }
    ReductionCertificate {
        multiplier: tracker
            .multiplier
            .into_iter()
            .map(|((element, kind), power)| MultiplierFactor { element, kind, power })
            .collect(),
        combination,
        remainder,
        scale,
    }
}

/// Differential partial remainder with certificate; the multiplier lies in `S_A^∞`.
pub fn partial_reduce(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking) -> ReductionCertificate {
    certified(f, set, r, false, ReduceOptions::default())
}

/// Differential remainder with certificate; the multiplier lies in `H_A^∞`.
pub fn full_reduce(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking) -> ReductionCertificate {
    certified(f, set, r, true, ReduceOptions::default())
}

pub fn partial_reduce_with(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking, opts: ReduceOptions) -> ReductionCertificate {
    certified(f, set, r, false, opts)
}

pub fn full_reduce_with(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking, opts: ReduceOptions) -> ReductionCertificate {
    certified(f, set, r, true, opts)
}

/// Partial remainder, up to a non-zero rational factor.
pub fn pd_red(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking) -> DiffPoly {
    reduce(f, set, r, false, None, true).primitive()
}

/// Full remainder, up to a non-zero rational factor.
pub fn d_red(f: &DiffPoly, set: &TriangularSet, r: &WeightedRanking) -> DiffPoly {
    reduce(f, set, r, true, None, true).primitive()
}

/// Checks that `f` is (partially) reduced with respect to every element.
pub fn is_reduced_wrt(f: &DiffPoly, set: &TriangularSet, full: bool) -> bool {
    let vars = f.variables();
    set.elements().iter().all(|e| {
        !vars.iter().any(|v| e.leader.properly_divides(v)) && (!full || f.degree_in(&e.leader) < e.degree)
    })
}

/// Builds a triangular set, reporting which input failed.
pub fn triangular(polys: &[DiffPoly], r: &WeightedRanking) -> Result<TriangularSet> {
    TriangularSet::new(polys.iter().cloned(), r).map_err(|e| match e {
        Error::Constant => Error::NotWeakTriangular("contains a constant".into()),
        other => other,
    })
}
