//! The divisibility order on `Z^m_{≥0} × {1..n}`, antichain sequences with a
//! degree-growth bound, and an exhaustive maximal-length search for tiny
//! instances.

use num_bigint::BigUint;

use crate::bounds::GrowthFunction;
use crate::diffpoly::{DerivativeVar, WeightVector};
use crate::error::{Error, Result};

/// Cap on the number of candidate points the exhaustive search accepts.
pub const MAX_CANDIDATES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosetPoint {
    pub coords: Vec<u64>,
    pub indet: usize,
}

impl PosetPoint {
    pub fn new(coords: Vec<u64>, indet: usize) -> Self {
        PosetPoint { coords, indet }
    }

    pub fn degree(&self) -> u64 {
        self.coords.iter().sum()
    }

    /// `self ≼ other`: same indeterminate, componentwise `≤`.
    pub fn precedes(&self, other: &PosetPoint) -> bool {
        self.indet == other.indet
            && self.coords.len() == other.coords.len()
            && self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b)
    }
}

pub fn comparable(a: &PosetPoint, b: &PosetPoint) -> bool {
    a.precedes(b) || b.precedes(a)
}

/// `∂^i y_k ↦ ((c_1 i_1, …, c_m i_m), k)`; the degree of the image is the weight.
pub fn map_from_derivative(u: &DerivativeVar, w: &WeightVector) -> PosetPoint {
    PosetPoint {
        coords: u
            .exps()
            .iter()
            .zip(w.components())
            .map(|(&e, &c)| e as u64 * c)
            .collect(),
        indet: u.indet(),
    }
}

/// Pairwise incomparable and, when `f` is given, `deg(s_i) ≤ f(i)`.
pub fn is_antichain_sequence(s: &[PosetPoint], f: Option<&GrowthFunction>) -> bool {
    let pairwise = s
        .iter()
        .enumerate()
        .all(|(i, a)| s[i + 1..].iter().all(|b| !comparable(a, b)));
    pairwise
        && f.is_none_or(|f| {
            s.iter()
                .enumerate()
                .all(|(i, p)| BigUint::from(p.degree()) <= f.eval(i as u64 + 1))
        })
}

fn compositions(m: usize, total: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if prefix.len() == m - 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(m, total - first, prefix, out);
        prefix.pop();
    }
}

struct Search<'a> {
    cands: &'a [PosetPoint],
    /// `limit[j]` is the largest degree allowed at position `j + 1`.
    limit: Vec<u64>,
    best: usize,
    hit_cap: bool,
}

impl Search<'_> {
    fn run(&mut self, start: usize, chosen: &mut Vec<usize>) {
        self.best = self.best.max(chosen.len());
        if chosen.len() == self.limit.len() {
            self.hit_cap = true;
            return;
        }
        let cap = self.limit[chosen.len()];
        let open: Vec<usize> = (start..self.cands.len())
            .filter(|&i| chosen.iter().all(|&c| !comparable(&self.cands[c], &self.cands[i])))
            .collect();
        if chosen.len() + open.len() <= self.best {
            return;
        }
        for (k, &i) in open.iter().enumerate() {
            if self.cands[i].degree() > cap {
                break;
            }
            if chosen.len() + open.len() - k <= self.best {
                break;
            }
            chosen.push(i);
            self.run(i + 1, chosen);
            chosen.pop();
        }
    }
}

/// Exact maximal length of an antichain sequence in `Z^m × {1..n}` with
/// `deg(s_i) ≤ f(i)`, searched up to length `depth_cap`.
///
/// A feasible set stays feasible when sorted by degree (`f` is
/// non-decreasing), so only degree-sorted sequences are enumerated.
pub fn brute_force_max_length(m: usize, n: usize, f: &GrowthFunction, depth_cap: usize) -> Result<usize> {
    if m == 0 || n == 0 || depth_cap == 0 {
        return Err(Error::Precondition("m, n and the depth cap must be positive".into()));
    }
    let mut limit = Vec::with_capacity(depth_cap);
    for j in 1..=depth_cap as u64 {
        let v = f.eval(j);
        let v = u64::try_from(&v).map_err(|_| Error::SearchSpaceOverflow(format!("f({j}) = {v}")))?;
        limit.push(v);
    }
    let max_deg = *limit.iter().max().expect("depth_cap > 0");
    let mut cands = Vec::new();
    for d in 0..=max_deg {
        let mut layer = Vec::new();
        compositions(m, d, &mut Vec::new(), &mut layer);
        for k in 1..=n {
            cands.extend(layer.iter().map(|c| PosetPoint::new(c.clone(), k)));
            if cands.len() > MAX_CANDIDATES {
                return Err(Error::SearchSpaceOverflow(format!(
                    "more than {MAX_CANDIDATES} points of degree at most {max_deg}"
                )));
            }
        }
    }
    let mut search = Search {
        cands: &cands,
        limit,
        best: 0,
        hit_cap: false,
    };
    search.run(0, &mut Vec::new());
    if search.hit_cap {
        return Err(Error::SearchSpaceOverflow(format!(
            "an antichain reached the depth cap {depth_cap}"
        )));
    }
    Ok(search.best)
}
