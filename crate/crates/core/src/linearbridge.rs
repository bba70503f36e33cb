//! Linear homogeneous differential polynomials in one indeterminate are the
//! same thing as ordinary polynomials: `c·∂_1^{i_1}⋯∂_m^{i_m} y` corresponds
//! to `c·x_1^{i_1}⋯x_m^{i_m}`, and differentiating by `∂_j` is multiplying by
//! `x_j`. This module provides that correspondence, a small Buchberger
//! engine under the monomial order induced by the orderly ranking, and the
//! cross-check between Rosenfeld-Gröbner and Gröbner bases on linear input.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decompose::{rosenfeld_groebner, DecomposeOptions};
use crate::diffpoly::{DerivativeVar, DiffPoly, Monomial};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::ranking::WeightedRanking;

/// Graded order on exponent vectors: total degree first, then the larger
/// exponent of `x_m`, then of `x_{m−1}`, and so on. On derivatives of one
/// indeterminate this is exactly the orderly ranking.
pub fn cmp_monomials(a: &[u32], b: &[u32]) -> Ordering {
    let deg = |e: &[u32]| e.iter().map(|&x| x as u64).sum::<u64>();
    deg(a).cmp(&deg(b)).then_with(|| a.iter().rev().cmp(b.iter().rev()))
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// A polynomial in `x_1, …, x_m` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgPoly {
    m: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl AlgPoly {
    pub fn zero(m: usize) -> Self {
        AlgPoly {
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, c: Rational) -> Self {
        AlgPoly::monomial(c, vec![0; m])
    }

    pub fn monomial(c: Rational, exps: Vec<u32>) -> Self {
        let mut p = AlgPoly::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(m: usize, terms: impl IntoIterator<Item = (Vec<u32>, Rational)>) -> Self {
        let mut p = AlgPoly::zero(m);
        for (e, c) in terms {
            p.add_term(e, &c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: &Rational) {
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Leading exponent and coefficient under [`cmp_monomials`].
    pub fn leading(&self) -> Option<(&Vec<u32>, &Rational)> {
        self.terms.iter().max_by(|a, b| cmp_monomials(a.0, b.0))
    }

    pub fn add(&self, other: &AlgPoly) -> AlgPoly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn sub(&self, other: &AlgPoly) -> AlgPoly {
        self.add(&other.scale(&Rational::from(-1)))
    }

    pub fn scale(&self, c: &Rational) -> AlgPoly {
        if c.is_zero() {
            return AlgPoly::zero(self.m);
        }
        AlgPoly {
            m: self.m,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// `c · x^e · self`.
    pub fn mul_term(&self, c: &Rational, e: &[u32]) -> AlgPoly {
        if c.is_zero() {
            return AlgPoly::zero(self.m);
        }
        AlgPoly {
            m: self.m,
            terms: self
                .terms
                .iter()
                .map(|(x, v)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), v * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &AlgPoly) -> AlgPoly {
        let mut p = AlgPoly::zero(self.m.max(other.m));
        for (e, c) in &other.terms {
            for (x, v) in &self.mul_term(c, e).terms {
                p.add_term(x.clone(), v);
            }
        }
        p
    }

    /// Scalar multiple with leading coefficient one.
    pub fn monic(&self) -> AlgPoly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip().expect("leading coefficient is non-zero")),
            None => self.clone(),
        }
    }
}

impl fmt::Display for AlgPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| cmp_monomials(b.0, a.0));
        for (i, (e, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            match i {
                0 if c.is_negative() => f.write_str("-")?,
                0 => {}
                _ => write!(f, " {sign} ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { format!("x{}", j + 1) } else { format!("x{}^{k}", j + 1) })
                .collect();
            let abs = c.abs();
            match (vars.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{abs}")?,
                (false, true) => f.write_str(&vars.join("*"))?,
                (false, false) => write!(f, "{abs}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// `Σ c·x^θ ↦ Σ c·θy_1`.
pub fn to_differential(p: &AlgPoly) -> DiffPoly {
    DiffPoly::from_terms(
        p.terms()
            .map(|(e, c)| (Monomial::var_pow(DerivativeVar::new(1, e), 1), c.clone())),
    )
}

/// Inverse of [`to_differential`]; `f` must be linear homogeneous in the
/// derivatives of a single indeterminate.
pub fn to_algebraic(f: &DiffPoly, m: usize) -> Result<AlgPoly> {
    let mut indet = None;
    let mut p = AlgPoly::zero(m);
    for (mono, c) in f.terms() {
        let [(v, 1)] = mono.factors() else {
            return Err(Error::NotLinear(f.to_string()));
        };
        if *indet.get_or_insert(v.indet()) != v.indet() || v.exps().len() != m {
            return Err(Error::NotLinear(f.to_string()));
        }
        p.add_term(v.exps().to_vec(), c);
    }
    Ok(p)
}

/// Full multivariate division remainder of `f` by `g`.
pub fn normal_form(f: &AlgPoly, g: &[AlgPoly]) -> AlgPoly {
    let divisors: Vec<(&AlgPoly, &Vec<u32>, &Rational)> = g
        .iter()
        .filter_map(|p| p.leading().map(|(e, c)| (p, e, c)))
        .collect();
    let mut rem = AlgPoly::zero(f.m);
    let mut cur = f.clone();
    while let Some((e, c)) = cur.leading().map(|(e, c)| (e.clone(), c.clone())) {
        match divisors.iter().find(|(_, le, _)| divides(le, &e)) {
            Some((p, le, lc)) => {
                let shift: Vec<u32> = e.iter().zip(le.iter()).map(|(a, b)| a - b).collect();
                let factor = c.checked_div(lc).expect("leading coefficient is non-zero");
                cur = cur.sub(&p.mul_term(&factor, &shift));
            }
            None => {
                rem.add_term(e.clone(), &c);
                cur.terms.remove(&e);
            }
        }
    }
    rem
}

fn s_polynomial(f: &AlgPoly, g: &AlgPoly) -> AlgPoly {
    let (fe, fc) = f.leading().expect("non-zero");
    let (ge, gc) = g.leading().expect("non-zero");
    let lcm: Vec<u32> = fe.iter().zip(ge).map(|(a, b)| *a.max(b)).collect();
    let sf: Vec<u32> = lcm.iter().zip(fe).map(|(a, b)| a - b).collect();
    let sg: Vec<u32> = lcm.iter().zip(ge).map(|(a, b)| a - b).collect();
    f.mul_term(&fc.recip().expect("non-zero"), &sf)
        .sub(&g.mul_term(&gc.recip().expect("non-zero"), &sg))
}

/// Reduced Gröbner basis, monic and sorted by increasing leading monomial.
pub fn buchberger(f: &[AlgPoly]) -> Vec<AlgPoly> {
    let mut basis: Vec<AlgPoly> = f.iter().filter(|p| !p.is_zero()).map(AlgPoly::monic).collect();
    let mut pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .collect();
    while let Some((i, j)) = pairs.pop() {
        let (ei, ej) = (basis[i].leading().expect("non-zero").0, basis[j].leading().expect("non-zero").0);
        // coprime leading monomials: the S-polynomial reduces to zero
        if ei.iter().zip(ej).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let r = normal_form(&s_polynomial(&basis[i], &basis[j]), &basis);
        if !r.is_zero() {
            let k = basis.len();
            basis.push(r.monic());
            pairs.extend((0..k).map(|i| (i, k)));
        }
    }
    // minimise, then inter-reduce
    let mut minimal: Vec<AlgPoly> = Vec::new();
    for (i, p) in basis.iter().enumerate() {
        let e = p.leading().expect("non-zero").0;
        let redundant = basis.iter().enumerate().any(|(j, q)| {
            let qe = q.leading().expect("non-zero").0;
            j != i && divides(qe, e) && (qe != e || j < i)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut reduced: Vec<AlgPoly> = (0..minimal.len())
        .map(|i| {
            let others: Vec<AlgPoly> = minimal
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, q)| q.clone())
                .collect();
            let p = &minimal[i];
            let (e, c) = p.leading().expect("non-zero");
            let tail = p.sub(&AlgPoly::monomial(c.clone(), e.clone()));
            AlgPoly::monomial(c.clone(), e.clone()).add(&normal_form(&tail, &others)).monic()
        })
        .collect();
    reduced.sort_by(|a, b| cmp_monomials(a.leading().expect("non-zero").0, b.leading().expect("non-zero").0));
    reduced
}

/// Fraction-free elimination of each leader from the elements above it, in
/// increasing leader order. Leaders and orders are unchanged.
pub fn linear_autoreduce(a: &[DiffPoly], r: &WeightedRanking) -> Result<Vec<DiffPoly>> {
    let mut sorted: Vec<DiffPoly> = a.to_vec();
    sorted.sort_by(|x, y| r.cmp_polys(x, y));
    let mut done: Vec<(DerivativeVar, DiffPoly)> = Vec::new();
    for f in sorted {
        let mut cur = f;
        for (lead, g) in done.iter().rev() {
            let c = cur.coeff_in(lead, 1);
            if c.is_zero() {
                continue;
            }
            let lc = g.coeff_in(lead, 1);
            cur = &(&lc * &cur) - &(&c * g);
        }
        let cur = cur.primitive();
        let lead = r.leader(&cur)?;
        done.push((lead, cur));
    }
    Ok(done.into_iter().map(|(_, g)| g).collect())
}

#[derive(Clone, Debug)]
pub struct CrossCheckReport {
    pub input: Vec<AlgPoly>,
    pub systems: usize,
    pub all_linear: bool,
    /// Image of the autoreduced characteristic set, monic and sorted.
    pub image: Vec<AlgPoly>,
    pub groebner: Vec<AlgPoly>,
    pub leading_terms_equal: bool,
    pub image_reduces_to_zero: bool,
    pub basis_reduces_to_zero: bool,
    pub bases_equal: bool,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.systems <= 1
            && self.all_linear
            && self.leading_terms_equal
            && self.image_reduces_to_zero
            && self.basis_reduces_to_zero
    }
}

/// Runs Rosenfeld-Gröbner on the differential images of `f` under the
/// orderly ranking and compares with the reduced Gröbner basis of `(f)`.
pub fn cross_check(f: &[AlgPoly], m: usize) -> Result<CrossCheckReport> {
    if f.iter().any(|p| p.m() != m) {
        return Err(Error::ContextMismatch(format!("expected polynomials in x1..x{m}")));
    }
    if f.iter().all(AlgPoly::is_zero) {
        return Err(Error::Precondition("cross-check needs a non-zero generator".into()));
    }
    let r = WeightedRanking::orderly(m);
    let diff: Vec<DiffPoly> = f.iter().map(to_differential).collect();
    let dec = rosenfeld_groebner(&diff, &[DiffPoly::one()], &r, &DecomposeOptions::default())?;
    let groebner = buchberger(f);
    let mut report = CrossCheckReport {
        input: f.to_vec(),
        systems: dec.systems.len(),
        all_linear: true,
        image: Vec::new(),
        groebner,
        leading_terms_equal: false,
        image_reduces_to_zero: false,
        basis_reduces_to_zero: false,
        bases_equal: false,
    };
    let Some(sys) = dec.systems.first() else {
        // an empty decomposition means the unit ideal
        let unit = report.groebner == vec![AlgPoly::constant(m, Rational::one())];
        report.leading_terms_equal = unit;
        report.image_reduces_to_zero = unit;
        report.basis_reduces_to_zero = unit;
        report.bases_equal = unit;
        return Ok(report);
    };
    report.all_linear = sys.a.polys().all(DiffPoly::is_linear_homogeneous)
        && sys.h.iter().all(|h| h.is_constant() || h.is_linear_homogeneous());
    let a: Vec<DiffPoly> = sys.a.polys().cloned().collect();
    let mut image = linear_autoreduce(&a, &r)?
        .iter()
        .map(|g| to_algebraic(g, m).map(|p| p.monic()))
        .collect::<Result<Vec<_>>>()?;
    image.sort_by(|x, y| cmp_monomials(x.leading().expect("non-zero").0, y.leading().expect("non-zero").0));
    let lead_set = |ps: &[AlgPoly]| -> Vec<Vec<u32>> { ps.iter().map(|p| p.leading().expect("non-zero").0.clone()).collect() };
    report.leading_terms_equal = lead_set(&image) == lead_set(&report.groebner);
    report.image_reduces_to_zero = image.iter().all(|p| normal_form(p, &report.groebner).is_zero());
    report.basis_reduces_to_zero = report.groebner.iter().all(|p| normal_form(p, &image).is_zero());
    report.bases_equal = image == report.groebner;
    report.image = image;
    Ok(report)
}

/// A seeded random sparse system: `1..=3` generators in `m` variables with
/// total degree at most `max_degree`, each with one to three terms.
pub fn random_linear_system(rng: &mut ChaCha8Rng, m: usize, max_degree: u32) -> Vec<AlgPoly> {
    let gens = rng.gen_range(1..=3);
    (0..gens)
        .map(|_| loop {
            let terms = rng.gen_range(1..=3);
            let p = AlgPoly::from_terms(
                m,
                (0..terms).map(|_| {
                    let mut e = vec![0u32; m];
                    let deg = rng.gen_range(0..=max_degree);
                    for _ in 0..deg {
                        e[rng.gen_range(0..m)] += 1;
                    }
                    let mut c = rng.gen_range(-3i64..=3);
                    if c == 0 {
                        c = 1;
                    }
                    (e, Rational::from(c))
                }),
            );
            if !p.is_zero() {
                break p;
            }
        })
        .collect()
}

/// `count` random systems from `seed`, with `m` cycling through `1..=3`.
pub fn seeded_systems(seed: u64, count: usize) -> Vec<(usize, Vec<AlgPoly>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let m = i % 3 + 1;
            (m, random_linear_system(&mut rng, m, 3))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::{Ring, WeightVector};
    use crate::parse::{parse_alg_poly, parse_poly};
    use proptest::prelude::*;

    fn x(s: &str, m: usize) -> AlgPoly {
        parse_alg_poly(s, m).unwrap()
    }

    fn xs(s: &[&str], m: usize) -> Vec<AlgPoly> {
        s.iter().map(|p| x(p, m)).collect()
    }

    #[test]
    fn correspondence_examples() {
        let ring = Ring::new(2, 1).unwrap();
        let p = x("x1^2 + x2", 2);
        let f = parse_poly("y1[2,0] + y1[0,1]", &ring).unwrap();
        assert_eq!(to_differential(&p), f);
        assert_eq!(to_algebraic(&f, 2).unwrap(), p);
        assert_eq!(to_differential(&x("1", 2)), parse_poly("y1", &ring).unwrap());
        assert!(to_algebraic(&parse_poly("y1^2", &ring).unwrap(), 2).is_err());
        assert!(to_algebraic(&parse_poly("y1 + 1", &ring).unwrap(), 2).is_err());
    }

    #[test]
    fn buchberger_examples() {
        assert_eq!(buchberger(&xs(&["x1"], 2)), xs(&["x1"], 2));
        let gb = buchberger(&xs(&["x1 - x2", "x2^2"], 2));
        assert_eq!(gb.len(), 2);
        // x2 outranks x1 at equal degree, so the basis is {x2 - x1, x1^2}
        assert!(gb.contains(&x("x2 - x1", 2)) && gb.contains(&x("x1^2", 2)));
        assert_eq!(buchberger(&xs(&["x1*x2 - 1", "x1^2"], 2)), xs(&["1"], 2));
    }

    #[test]
    fn monomial_order_matches_orderly_ranking() {
        let r = WeightedRanking::orderly(3);
        let exps = [[0, 0, 1], [1, 0, 0], [2, 0, 0], [0, 1, 1], [1, 1, 0], [0, 0, 0]];
        for a in &exps {
            for b in &exps {
                let (u, v) = (DerivativeVar::new(1, a), DerivativeVar::new(1, b));
                assert_eq!(cmp_monomials(a, b), r.cmp_vars(&u, &v));
            }
        }
    }

    #[test]
    fn cross_check_examples() {
        for (sys, m) in [(vec!["x1", "x2"], 2), (vec!["x1^2 - x2", "x2^2"], 2), (vec!["x1*x2 - 1", "x1^2"], 2)] {
            let rep = cross_check(&xs(&sys, m), m).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(rep.bases_equal);
        }
    }

    #[test]
    fn seeded_systems_are_reproducible() {
        assert_eq!(seeded_systems(7, 5), seeded_systems(7, 5));
    }

    proptest! {
        #[test]
        fn round_trip(m in 1usize..4, terms in proptest::collection::vec((proptest::collection::vec(0u32..4, 3), -5i64..6), 0..5)) {
            let p = AlgPoly::from_terms(m, terms.into_iter().map(|(e, c)| (e[..m].to_vec(), Rational::from(c))));
            prop_assert_eq!(to_algebraic(&to_differential(&p), m).unwrap(), p.clone());
            if let Some(d) = p.total_degree() {
                let w = WeightVector::uniform(m);
                prop_assert_eq!(to_differential(&p).weight(&w), Some(d as u64));
            }
        }
    }
}
