//! Serializable reports. Every JSON document the binary prints is one of
//! these, tagged by `kind`; `schema/report.schema.json` describes them.

use serde::Serialize;

use rgdiff::bounds::{BoundReport, DerivationBound, LengthRoute};
use rgdiff::decompose::{BranchOutcome, Coherence, DecompositionTrace, Provenance, Quadruple, RegularSystem};
use rgdiff::linearbridge::{AlgPoly, CrossCheckReport};
use rgdiff::reduction::{FactorKind, ReductionCertificate};
use rgdiff::{DerivativeVar, DiffPoly, TriangularSet};

fn strings<'a, T: ToString + 'a>(xs: impl IntoIterator<Item = &'a T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

#[derive(Serialize)]
pub struct SystemOut {
    pub a: Vec<String>,
    pub h: Vec<String>,
    pub coherence: &'static str,
    pub weight: u64,
}

pub fn coherence_name(c: Coherence) -> &'static str {
    match c {
        Coherence::Verified => "verified",
        Coherence::Unverified => "unverified",
        Coherence::Failed => "failed",
    }
}

impl SystemOut {
    pub fn new(s: &RegularSystem, weight: u64) -> Self {
        SystemOut {
            a: strings(s.a.polys()),
            h: strings(&s.h),
            coherence: coherence_name(s.coherence),
            weight,
        }
    }
}

#[derive(Serialize)]
pub struct BranchOut {
    pub outcome: String,
    pub witness: Vec<String>,
}

pub fn outcome_name(o: &BranchOutcome) -> String {
    match o {
        BranchOutcome::System(i) => format!("system {}", i + 1),
        BranchOutcome::Inconsistent => "inconsistent".into(),
        BranchOutcome::AutoReduceEmpty => "empty after auto-reduction".into(),
    }
}

#[derive(Serialize)]
pub struct BoundCheck {
    pub bound: String,
    pub observed: u64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct DecomposeReport {
    pub kind: &'static str,
    pub m: usize,
    pub n: usize,
    pub weights: Vec<u64>,
    pub h: u64,
    pub weight_equals_order: bool,
    pub inconsistent: bool,
    pub systems: Vec<SystemOut>,
    pub branches: Vec<BranchOut>,
    pub steps: usize,
    pub max_weight_seen: u64,
    pub output_bound: BoundCheck,
    pub quadruple_bound: BoundCheck,
}

#[derive(Serialize)]
pub struct QuadrupleOut {
    pub g: Vec<String>,
    pub d: Vec<String>,
    pub a: Vec<String>,
    pub h: Vec<String>,
}

impl QuadrupleOut {
    pub fn new(q: &Quadruple) -> Self {
        QuadrupleOut {
            g: strings(&q.g),
            d: strings(&q.d),
            a: strings(q.a.polys()),
            h: strings(&q.h),
        }
    }
}

#[derive(Serialize)]
pub struct LogEntryOut {
    pub id: usize,
    pub parent: Option<usize>,
    pub rule: &'static str,
    pub weight: u64,
    pub quadruple: QuadrupleOut,
}

#[derive(Serialize)]
pub struct TraceBranchOut {
    pub outcome: String,
    pub witness: Vec<String>,
    pub leader_history: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct TraceReport {
    pub kind: &'static str,
    pub steps: usize,
    pub max_weight_seen: u64,
    pub quadruples: Vec<LogEntryOut>,
    pub branches: Vec<TraceBranchOut>,
}

fn rule_name(p: Provenance) -> &'static str {
    match p {
        Provenance::Input => "input",
        Provenance::Discard => "discard",
        Provenance::Update => "update",
        Provenance::SeparantBranch => "separant",
        Provenance::InitialBranch => "initial",
    }
}

impl TraceReport {
    pub fn new(t: &DecompositionTrace) -> Self {
        TraceReport {
            kind: "trace",
            steps: t.steps,
            max_weight_seen: t.max_weight_seen,
            quadruples: t
                .quadruple_log
                .iter()
                .map(|e| LogEntryOut {
                    id: e.id,
                    parent: e.parent,
                    rule: rule_name(e.rule),
                    weight: e.weight,
                    quadruple: QuadrupleOut::new(&e.quadruple),
                })
                .collect(),
            branches: t
                .branches
                .iter()
                .map(|b| TraceBranchOut {
                    outcome: outcome_name(&b.outcome),
                    witness: strings(&b.witness),
                    leader_history: b.leader_history.iter().map(strings).collect(),
                })
                .collect(),
        }
    }
}

pub fn witness_text(w: &[DerivativeVar]) -> String {
    if w.is_empty() {
        "(empty)".into()
    } else {
        strings(w).join(", ")
    }
}

#[derive(Serialize)]
pub struct BoundsReport {
    pub kind: &'static str,
    pub m: usize,
    pub n: u64,
    pub h: u64,
    pub weights: Vec<u64>,
    pub length: u64,
    pub route: &'static str,
    pub growth: String,
    pub weight_bound: String,
    pub quadruple_bound: String,
    pub per_derivation: Vec<String>,
    /// `None` when no system was given to check `W(F ∪ K) = H(F ∪ K)`.
    pub weight_equals_order: Option<bool>,
    pub note: Option<&'static str>,
}

pub fn route_name(r: LengthRoute) -> &'static str {
    match r {
        LengthRoute::ClosedFormM2N1 => "closed form h+1",
        LengthRoute::RecursionM2 => "b_n recursion",
        LengthRoute::RecursionM3N1 => "c_h recursion",
        LengthRoute::PsiSequence => "psi_n",
        LengthRoute::ZeroWeight => "zero weight",
        LengthRoute::SingleDerivation => "single derivation",
    }
}

pub fn derivation_text(b: &DerivationBound) -> String {
    b.to_string()
}

impl BoundsReport {
    pub fn new(rep: &BoundReport, weights: Vec<u64>, weight_equals_order: Option<bool>, note: Option<&'static str>) -> Self {
        BoundsReport {
            kind: "bounds",
            m: rep.m,
            n: rep.n,
            h: rep.h,
            weights,
            length: rep.length,
            route: route_name(rep.route),
            growth: rep.growth.to_string(),
            weight_bound: rep.weight_bound.to_string(),
            quadruple_bound: rep.quadruple_bound.to_string(),
            per_derivation: rep.per_derivation.iter().map(derivation_text).collect(),
            weight_equals_order,
            note,
        }
    }
}

#[derive(Serialize)]
pub struct FactorOut {
    pub element: usize,
    pub kind: &'static str,
    pub power: u32,
}

#[derive(Serialize)]
pub struct TermOut {
    pub element: usize,
    pub theta: Vec<u32>,
    pub cofactor: String,
}

#[derive(Serialize)]
pub struct ReduceReport {
    pub kind: &'static str,
    pub mode: &'static str,
    pub input: String,
    pub set: Vec<String>,
    pub remainder: String,
    pub scale: String,
    pub multiplier: Vec<FactorOut>,
    pub combination: Vec<TermOut>,
    pub verified: bool,
}

impl ReduceReport {
    pub fn new(f: &DiffPoly, set: &TriangularSet, cert: &ReductionCertificate, partial: bool) -> Self {
        ReduceReport {
            kind: "reduce",
            mode: if partial { "partial" } else { "full" },
            input: f.to_string(),
            set: strings(set.polys()),
            remainder: cert.remainder.to_string(),
            scale: cert.scale.to_string(),
            multiplier: cert
                .multiplier
                .iter()
                .map(|m| FactorOut {
                    element: m.element,
                    kind: match m.kind {
                        FactorKind::Initial => "initial",
                        FactorKind::Separant => "separant",
                    },
                    power: m.power,
                })
                .collect(),
            combination: cert
                .combination
                .iter()
                .map(|t| TermOut {
                    element: t.element,
                    theta: t.theta.to_vec(),
                    cofactor: t.cofactor.to_string(),
                })
                .collect(),
            verified: cert.verify(f, set),
        }
    }
}

#[derive(Serialize)]
pub struct MemberReport {
    pub kind: &'static str,
    pub poly: String,
    pub answer: &'static str,
    pub systems: usize,
    pub weight_equals_order: bool,
}

#[derive(Serialize)]
pub struct CrossCheckOut {
    pub m: usize,
    pub input: Vec<String>,
    pub systems: usize,
    pub all_linear: bool,
    pub image: Vec<String>,
    pub groebner: Vec<String>,
    pub leading_terms_equal: bool,
    pub image_reduces_to_zero: bool,
    pub basis_reduces_to_zero: bool,
    pub bases_equal: bool,
    pub passed: bool,
}

fn alg(ps: &[AlgPoly]) -> Vec<String> {
    strings(ps)
}

impl CrossCheckOut {
    pub fn new(m: usize, r: &CrossCheckReport) -> Self {
        CrossCheckOut {
            m,
            input: alg(&r.input),
            systems: r.systems,
            all_linear: r.all_linear,
            image: alg(&r.image),
            groebner: alg(&r.groebner),
            leading_terms_equal: r.leading_terms_equal,
            image_reduces_to_zero: r.image_reduces_to_zero,
            basis_reduces_to_zero: r.basis_reduces_to_zero,
            bases_equal: r.bases_equal,
            passed: r.passed(),
        }
    }
}

#[derive(Serialize)]
pub struct LinearCheckReport {
    pub kind: &'static str,
    pub seed: Option<u64>,
    pub checks: Vec<CrossCheckOut>,
    pub failures: usize,
}

#[derive(Serialize)]
pub struct M2N1Out {
    pub h: u64,
    pub length: u64,
    pub weight: String,
    pub ord_c2: String,
    pub ord_c3: String,
    pub note: Option<&'static str>,
}

#[derive(Serialize)]
pub struct M2Out {
    pub n: u64,
    pub h: u64,
    pub length: u64,
    pub weight: String,
    pub ord_c2: String,
    pub ord_c3: String,
    pub note: Option<String>,
}

#[derive(Serialize)]
pub struct M3N1Out {
    pub h: u64,
    pub c: Vec<u64>,
    pub length: u64,
    pub weight: String,
}

#[derive(Serialize)]
pub struct GeneralOut {
    pub m: usize,
    pub n: u64,
    pub h: u64,
    pub length: u64,
    pub weight: String,
}

#[derive(Serialize)]
pub struct TablesReport {
    pub kind: &'static str,
    pub m2_n1: Vec<M2N1Out>,
    pub m2: Vec<M2Out>,
    pub m3_n1: Vec<M3N1Out>,
    pub general: Vec<GeneralOut>,
}
