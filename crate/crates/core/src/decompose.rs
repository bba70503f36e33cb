//! The Rosenfeld-Gröbner main loop together with `auto-partial-reduce` and
//! `update`, instrumented with the weight monitor and antichain witness used
//! by the order bounds.
//!
//! Pending quadruples form a FIFO queue. From `G ∪ D` the element of minimal
//! rank is selected, constants first, ties broken by the canonical text form.
//! Everything that enters a quadruple is made primitive first; scaling by a
//! non-zero rational changes neither ideals nor saturations.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::diffpoly::{set_weight, DerivativeVar, DiffPoly};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::ranking::{Element, SetClass, TriangularSet, WeightedRanking};
use crate::reduction::{d_red, delta_elements, is_reduced_wrt, pd_red};

/// `(G, D, A, H)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Quadruple {
    pub g: BTreeSet<DiffPoly>,
    pub d: BTreeSet<DiffPoly>,
    pub a: TriangularSet,
    pub h: BTreeSet<DiffPoly>,
}

impl Quadruple {
    pub fn new(
        g: impl IntoIterator<Item = DiffPoly>,
        d: impl IntoIterator<Item = DiffPoly>,
        a: TriangularSet,
        h: impl IntoIterator<Item = DiffPoly>,
    ) -> Self {
        Quadruple {
            g: g.into_iter().collect(),
            d: d.into_iter().collect(),
            a,
            h: h.into_iter().collect(),
        }
    }

    /// `W(G ∪ D ∪ A ∪ H)`, zero when only constants occur.
    pub fn weight(&self, r: &WeightedRanking) -> u64 {
        set_weight(
            self.g.iter().chain(&self.d).chain(self.a.polys()).chain(&self.h),
            r.weights(),
        )
        .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coherence {
    Verified,
    Unverified,
    Failed,
}

/// A regular differential system `(A, H)`; `H` is listed in increasing rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularSystem {
    pub a: TriangularSet,
    pub h: Vec<DiffPoly>,
    pub coherence: Coherence,
}

impl RegularSystem {
    pub fn weight(&self, r: &WeightedRanking) -> u64 {
        set_weight(self.a.polys().chain(&self.h), r.weights()).unwrap_or(0)
    }
}

/// Which rule put a quadruple on the queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Input,
    /// The selected polynomial reduced to zero.
    Discard,
    Update,
    SeparantBranch,
    InitialBranch,
}

#[derive(Clone, Debug)]
pub struct LogEntry {
    pub id: usize,
    pub parent: Option<usize>,
    pub rule: Provenance,
    pub quadruple: Quadruple,
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BranchOutcome {
    /// Index into the output system list.
    System(usize),
    /// A non-zero constant was reached.
    Inconsistent,
    /// `auto-partial-reduce` detected `1 ∈ [A]:H^∞`.
    AutoReduceEmpty,
}

/// Per-branch record: the antichain witness `s_1, s_2, …` and the successive
/// leader sets `L(A_i)` (recorded whenever `update` changes `A`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchRecord {
    pub witness: Vec<DerivativeVar>,
    pub leader_history: Vec<Vec<DerivativeVar>>,
    pub outcome: BranchOutcome,
}

#[derive(Clone, Debug, Default)]
pub struct DecompositionTrace {
    /// Only filled when [`DecomposeOptions::log_quadruples`] is set.
    pub quadruple_log: Vec<LogEntry>,
    pub max_weight_seen: u64,
    pub branches: Vec<BranchRecord>,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub systems: Vec<RegularSystem>,
    pub trace: DecompositionTrace,
    /// `h = W(F ∪ K)`.
    pub input_weight: u64,
}

impl Decomposition {
    /// Empty output: `1 ∈ {F}:K^∞` was detected.
    pub fn is_inconsistent(&self) -> bool {
        self.systems.is_empty()
    }
}

/// What had been computed when the step budget ran out.
#[derive(Clone, Debug)]
pub struct PartialRun {
    pub systems: Vec<RegularSystem>,
    pub trace: DecompositionTrace,
    pub pending: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct DecomposeOptions {
    /// Maximum number of main-loop iterations.
    pub budget: usize,
    /// Process each queue generation on the rayon pool. Output is identical
    /// to the sequential run.
    pub parallel: bool,
    pub log_quadruples: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            budget: 1_000_000,
            parallel: false,
            log_quadruples: false,
        }
    }
}

fn normalized(f: &DiffPoly) -> DiffPoly {
    f.primitive()
}

/// Same set up to non-zero scalar factors.
fn contains_scaled(set: &BTreeSet<DiffPoly>, f: &DiffPoly) -> bool {
    set.contains(f) || set.contains(&normalized(f))
}

/// Algorithm `update`: adds `p` to `A`, moving the elements whose leaders are
/// derivatives of `lead(p)` back to `G` and recording the new Δ-polynomials.
pub fn update(q: &Quadruple, p: &DiffPoly, r: &WeightedRanking) -> Result<Quadruple> {
    if p.is_constant() {
        return Err(Error::Precondition("update needs a non-constant polynomial".into()));
    }
    if !is_reduced_wrt(p, &q.a, true) {
        return Err(Error::Precondition(format!("{p} is not reduced with respect to A")));
    }
    let e = Element::new(p.clone(), r)?;
    let moved = q.a.retain(|a| e.leader.divides(&a.leader));
    let kept = q.a.retain(|a| !e.leader.divides(&a.leader));

    let mut g = q.g.clone();
    g.extend(moved.polys().cloned());
    let mut d = q.d.clone();
    for a in kept.elements() {
        let delta = delta_elements(&e, a);
        if !delta.is_zero() {
            d.insert(normalized(&delta));
        }
    }
    let mut h = q.h.clone();
    h.insert(normalized(&e.separant));
    h.insert(normalized(&e.initial));
    let a = kept.insert(e, r)?;
    Ok(Quadruple { g, d, a, h })
}

/// Algorithm `auto-partial-reduce`. `None` means `1 ∈ [A]:H^∞` was detected.
pub fn auto_partial_reduce(a: &TriangularSet, h: &BTreeSet<DiffPoly>, r: &WeightedRanking) -> Option<RegularSystem> {
    let mut b = TriangularSet::empty();
    for el in a.elements() {
        let red = pd_red(&el.poly, &b, r);
        let rank = r.rank(&red).ok()?;
        if rank.leader != el.leader || rank.degree != el.degree {
            return None;
        }
        b = b.insert(Element::new(red, r).ok()?, r).ok()?;
    }
    let h_a: BTreeSet<DiffPoly> = a.h_set().iter().map(normalized).collect();
    let mut k: BTreeSet<DiffPoly> = b.h_set().iter().map(normalized).collect();
    for p in h {
        if !h_a.contains(&normalized(p)) {
            k.insert(pd_red(p, &b, r));
        }
    }
    if k.iter().any(DiffPoly::is_zero) {
        return None;
    }
    let mut h: Vec<DiffPoly> = k.into_iter().collect();
    h.sort_by(|x, y| r.cmp_polys(x, y));
    let mut sys = RegularSystem {
        a: b,
        h,
        coherence: Coherence::Unverified,
    };
    sys.coherence = check_regular_system(&sys, r);
    Some(sys)
}

/// Structural clauses are checked exactly; Δ-coherence by reducing every
/// Δ-polynomial to zero, which is sufficient but not necessary.
pub fn check_regular_system(s: &RegularSystem, r: &WeightedRanking) -> Coherence {
    let polys: Vec<DiffPoly> = s.a.polys().cloned().collect();
    if r.classify_set(&polys) < SetClass::DTriangular {
        return Coherence::Failed;
    }
    if s.h.iter().any(|h| h.is_zero() || !is_reduced_wrt(h, &s.a, false)) {
        return Coherence::Failed;
    }
    let h: BTreeSet<DiffPoly> = s.h.iter().map(normalized).collect();
    if !s.a.elements().iter().all(|e| contains_scaled(&h, &e.separant)) {
        return Coherence::Failed;
    }
    // With H_A ⊆ H every multiplier of a full reduction lies in H^∞, and the
    // prolongations used all have leaders below the lcd.
    let h_a_in_h = s.a.elements().iter().all(|e| contains_scaled(&h, &e.initial));
    let elems = s.a.elements();
    for (i, f) in elems.iter().enumerate() {
        for g in &elems[i + 1..] {
            let delta = delta_elements(f, g);
            if delta.is_zero() {
                continue;
            }
            let rem = if h_a_in_h { d_red(&delta, &s.a, r) } else { pd_red(&delta, &s.a, r) };
            if !rem.is_zero() {
                return Coherence::Unverified;
            }
        }
    }
    Coherence::Verified
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    Yes,
    Unknown,
}

/// `Yes` when `f` fully reduces to zero against every system; an empty
/// decomposition contains everything.
pub fn sufficient_membership(f: &DiffPoly, systems: &[RegularSystem], r: &WeightedRanking) -> Membership {
    if f.is_zero() || systems.iter().all(|s| d_red(f, &s.a, r).is_zero()) {
        Membership::Yes
    } else {
        Membership::Unknown
    }
}

/// Every leader of an earlier `A_i` is a derivative of some leader of each
/// later `A_j`.
pub fn branch_is_sound(history: &[Vec<DerivativeVar>]) -> bool {
    history.iter().enumerate().all(|(i, earlier)| {
        history[i + 1..]
            .iter()
            .all(|later| earlier.iter().all(|f| later.iter().any(|g| g.divides(f))))
    })
}

#[derive(Clone)]
struct Item {
    id: usize,
    quad: Quadruple,
    witness: Vec<DerivativeVar>,
    history: Vec<Vec<DerivativeVar>>,
}

struct Child {
    rule: Provenance,
    quad: Quadruple,
    witness: Vec<DerivativeVar>,
    history: Vec<Vec<DerivativeVar>>,
}

enum Finished {
    System(RegularSystem),
    Dead(BranchOutcome),
}

struct StepResult {
    parent: usize,
    children: Vec<Child>,
    finished: Option<(Finished, Vec<DerivativeVar>, Vec<Vec<DerivativeVar>>)>,
}

fn select(q: &Quadruple, r: &WeightedRanking) -> DiffPoly {
    q.g.iter()
        .chain(&q.d)
        .min_by(|x, y| r.cmp_polys(x, y))
        .expect("G ∪ D is non-empty")
        .clone()
}

fn process(item: Item, r: &WeightedRanking) -> Result<StepResult> {
    let Item { id, quad, witness, history } = item;
    let mut res = StepResult {
        parent: id,
        children: Vec::new(),
        finished: None,
    };
    if quad.g.is_empty() && quad.d.is_empty() {
        let done = match auto_partial_reduce(&quad.a, &quad.h, r) {
            Some(sys) => Finished::System(sys),
            None => Finished::Dead(BranchOutcome::AutoReduceEmpty),
        };
        res.finished = Some((done, witness, history));
        return Ok(res);
    }

    let p = select(&quad, r);
    let mut g_bar = quad.g.clone();
    g_bar.remove(&p);
    let mut d_bar = quad.d.clone();
    d_bar.remove(&p);
    let p_bar = d_red(&p, &quad.a, r);

    if p_bar.is_zero() {
        res.children.push(Child {
            rule: Provenance::Discard,
            quad: Quadruple { g: g_bar, d: d_bar, a: quad.a, h: quad.h },
            witness,
            history,
        });
        return Ok(res);
    }
    if p_bar.is_constant() {
        res.finished = Some((Finished::Dead(BranchOutcome::Inconsistent), witness, history));
        return Ok(res);
    }

    let e = Element::new(p_bar.clone(), r)?;
    let rank_power = DiffPoly::var(e.leader.clone()).pow(e.degree);
    let p_i = normalized(&(&p_bar - &(&e.initial * &rank_power)));
    let p_s = normalized(
        &(&p_bar.scale(&Rational::from(e.degree as i64)) - &(&DiffPoly::var(e.leader.clone()) * &e.separant)),
    );
    let init = normalized(&e.initial);
    let sep = normalized(&e.separant);

    let base = Quadruple {
        g: g_bar.clone(),
        d: d_bar.clone(),
        a: quad.a.clone(),
        h: quad.h.clone(),
    };
    let updated = update(&base, &p_bar, r)?;
    let mut w_up = witness.clone();
    if !w_up.iter().any(|s| e.leader.divides(s)) {
        w_up.push(e.leader.clone());
    }
    let mut h_up = history.clone();
    h_up.push(updated.a.leaders());
    res.children.push(Child {
        rule: Provenance::Update,
        quad: updated,
        witness: w_up,
        history: h_up,
    });

    let mut g_s = g_bar.clone();
    g_s.insert(p_s);
    g_s.insert(sep);
    let mut h_s = quad.h.clone();
    h_s.insert(init.clone());
    res.children.push(Child {
        rule: Provenance::SeparantBranch,
        quad: Quadruple { g: g_s, d: d_bar.clone(), a: quad.a.clone(), h: h_s },
        witness: witness.clone(),
        history: history.clone(),
    });

    let mut g_i = g_bar;
    g_i.insert(p_i);
    g_i.insert(init);
    res.children.push(Child {
        rule: Provenance::InitialBranch,
        quad: Quadruple { g: g_i, d: d_bar, a: quad.a, h: quad.h },
        witness,
        history,
    });
    Ok(res)
}

/// Algorithm Rosenfeld-Gröbner on `{F}:K^∞`.
pub fn rosenfeld_groebner(
    f: &[DiffPoly],
    k: &[DiffPoly],
    r: &WeightedRanking,
    opts: &DecomposeOptions,
) -> Result<Decomposition> {
    let input_weight = set_weight(f.iter().chain(k), r.weights()).unwrap_or(0);
    let start = Quadruple::new(
        f.iter().map(normalized),
        [],
        TriangularSet::empty(),
        k.iter().map(normalized),
    );
    let mut trace = DecompositionTrace {
        max_weight_seen: start.weight(r),
        ..Default::default()
    };
    if opts.log_quadruples {
        trace.quadruple_log.push(LogEntry {
            id: 0,
            parent: None,
            rule: Provenance::Input,
            weight: trace.max_weight_seen,
            quadruple: start.clone(),
        });
    }
    let mut systems = Vec::new();
    let mut next_id = 1;
    let mut queue = vec![Item {
        id: 0,
        quad: start,
        witness: Vec::new(),
        history: vec![Vec::new()],
    }];

    while !queue.is_empty() {
        let room = opts.budget.saturating_sub(trace.steps);
        if room == 0 {
            return Err(Error::BudgetExhausted {
                budget: opts.budget,
                partial: Box::new(PartialRun {
                    systems,
                    trace,
                    pending: queue.len(),
                }),
            });
        }
        // One FIFO generation: children of this batch go behind everything
        // that is already waiting.
        let rest = if queue.len() > room { queue.split_off(room) } else { Vec::new() };
        let batch = std::mem::replace(&mut queue, rest);
        trace.steps += batch.len();
        let results: Vec<Result<StepResult>> = if opts.parallel {
            batch.into_par_iter().map(|it| process(it, r)).collect()
        } else {
            batch.into_iter().map(|it| process(it, r)).collect()
        };
        for res in results {
            let res = res?;
            if let Some((done, witness, leader_history)) = res.finished {
                let outcome = match done {
                    Finished::System(sys) => {
                        trace.max_weight_seen = trace.max_weight_seen.max(sys.weight(r));
                        systems.push(sys);
                        BranchOutcome::System(systems.len() - 1)
                    }
                    Finished::Dead(o) => o,
                };
                trace.branches.push(BranchRecord {
                    witness,
                    leader_history,
                    outcome,
                });
            }
            for child in res.children {
                let id = next_id;
                next_id += 1;
                let weight = child.quad.weight(r);
                trace.max_weight_seen = trace.max_weight_seen.max(weight);
                if opts.log_quadruples {
                    trace.quadruple_log.push(LogEntry {
                        id,
                        parent: Some(res.parent),
                        rule: child.rule,
                        quadruple: child.quad.clone(),
                        weight,
                    });
                }
                queue.push(Item {
                    id,
                    quad: child.quad,
                    witness: child.witness,
                    history: child.history,
                });
            }
        }
    }
    Ok(Decomposition {
        systems,
        trace,
        input_weight,
    })
}

/// Orders systems for comparisons that should not depend on branch order.
pub fn canonical_order(systems: &mut [RegularSystem], r: &WeightedRanking) {
    systems.sort_by(|x, y| {
        let xa: Vec<_> = x.a.polys().collect();
        let ya: Vec<_> = y.a.polys().collect();
        cmp_lists(&xa, &ya, r).then_with(|| cmp_lists(&x.h.iter().collect::<Vec<_>>(), &y.h.iter().collect::<Vec<_>>(), r))
    });
}

fn cmp_lists(a: &[&DiffPoly], b: &[&DiffPoly], r: &WeightedRanking) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match r.cmp_polys(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}
