//! Acceptance suite. `criteria_report` prints one PASS/FAIL line per
//! criterion; the individual `criterion_*` tests fail on any violation
//! except the documented table typo in criterion 1.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rgdiff::antichain::{brute_force_max_length, is_antichain_sequence, map_from_derivative};
use rgdiff::bounds::{
    bound_report, c_sequence, length_m2, psi_sequence, psi_trace, refined_m2, scaled_fibonacci,
    table_m2, table_m2_n1, DerivationBound, GrowthFunction,
};
use rgdiff::decompose::branch_is_sound;
use rgdiff::linearbridge::{cross_check, seeded_systems};
use rgdiff::parse::parse_alg_poly;
use rgdiff::reduction::{full_reduce, is_reduced_wrt, partial_reduce};
use rgdiff::{
    parse_poly, parse_system, rosenfeld_groebner, DecomposeOptions, DiffPoly, Ring, TriangularSet,
    WeightVector, WeightedRanking,
};

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, start: Instant) -> Outcome {
    let t = start.elapsed();
    check(t < limit, || format!("took {t:?}, limit {limit:?}"))
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn bound_cell(v: Option<u64>) -> DerivationBound {
    v.map_or(DerivationBound::NotApplicable, |x| DerivationBound::Bound(big(x)))
}

/// The published `m = 2, n = 1` weights. The h = 5 entry is 55 there but
/// the recursion, the closed form and the published c = 2, 3 rows
/// (26 = 53/2, 17 = 53/3) all give 53.
const PUBLISHED_M2N1: [u64; 10] = [1, 4, 11, 25, 55, 106, 205, 386, 713, 1297];

fn criterion_1_check() -> Outcome {
    let start = Instant::now();
    let c2 = [None, Some(2), Some(5), Some(12), Some(26), Some(53), Some(102), Some(193), Some(356), Some(648)];
    let c3 = [None, None, Some(3), Some(8), Some(17), Some(35), Some(68), Some(128), Some(237), Some(432)];
    let table = table_m2_n1();
    let mut errs = Vec::new();
    for (i, cell) in table.iter().enumerate() {
        if cell.weight != big(PUBLISHED_M2N1[i]) {
            errs.push(format!("h={} weight {} (published {})", cell.h, cell.weight, PUBLISHED_M2N1[i]));
        }
        if cell.ord_c2 != bound_cell(c2[i]) || cell.ord_c3 != bound_cell(c3[i]) {
            errs.push(format!("h={} per-derivation {} {}", cell.h, cell.ord_c2, cell.ord_c3));
        }
    }
    timed(Duration::from_secs(1), start)?;
    check(errs.is_empty(), || errs.join("; "))
}

fn criterion_2_check() -> Outcome {
    let start = Instant::now();
    let rows = table_m2().map_err(|e| e.to_string())?;
    let lengths = [5, 9, 18, 34];
    let weights = [4u64, 77, 9960, 31_206_974];
    let c2 = [None, Some(38), Some(4980), Some(15_603_487)];
    let c3 = [None, None, Some(3320), Some(10_402_324)];
    for (i, row) in rows.iter().take(4).enumerate() {
        check(row.n == 2 && row.h == i as u64 + 1, || format!("row order {row:?}"))?;
        check(row.length == lengths[i], || format!("n=2 h={} length {}", row.h, row.length))?;
        check(length_m2(2, row.h).ok() == Some(lengths[i]), || "length_m2 disagrees".into())?;
        check(row.weight == big(weights[i]), || format!("n=2 h={} weight {}", row.h, row.weight))?;
        check(refined_m2(2, row.h, row.length + 1) == row.weight, || "weight is not f(2,h)_{b+1}".into())?;
        check(row.ord_c2 == bound_cell(c2[i]) && row.ord_c3 == bound_cell(c3[i]), || {
            format!("n=2 h={} per-derivation {} {}", row.h, row.ord_c2, row.ord_c3)
        })?;
        check(row.note.is_none(), || "unexpected note".into())?;
    }
    let last = rows.get(4).ok_or("missing (n=3, h=1) row")?;
    check(last.n == 3 && last.h == 1 && last.length == 12, || format!("(3,1) row {last:?}"))?;
    let note = last.note.as_deref().unwrap_or("");
    check(note.contains("discrepancy") && note.contains("11") && note.contains("90"), || {
        format!("missing discrepancy annotation: {note:?}")
    })?;
    check(refined_m2(3, 1, 12) == big(90), || "f(3,1)_12 != 90".into())?;
    timed(Duration::from_secs(1), start)
}

fn criterion_3_check() -> Outcome {
    let start = Instant::now();
    let w = |m| WeightVector::uniform(m);
    let cases = [(3usize, 1u64, 3u64, 3u64), (3, 2, 10, 178), (4, 1, 5, 8), (5, 1, 20, 10946)];
    for (m, h, len, weight) in cases {
        let rep = bound_report(m, 1, h, &w(m)).map_err(|e| e.to_string())?;
        check(rep.length == len && rep.weight_bound == big(weight), || {
            format!("m={m} h={h}: length {} weight {}", rep.length, rep.weight_bound)
        })?;
        let psi = psi_sequence(&GrowthFunction::ScaledFibonacci { h }, m, 1).map_err(|e| e.to_string())?;
        check(psi == len, || format!("m={m} h={h}: psi gives {psi}"))?;
        check(scaled_fibonacci(h, len + 1) == big(weight), || "weight is not h*fib(L+1)".into())?;
    }
    let c = c_sequence(2).map_err(|e| e.to_string())?;
    check(c.last() == Some(&10), || format!("c sequence {c:?}"))?;
    timed(Duration::from_secs(10), start)
}

fn criterion_4_check() -> Outcome {
    let start = [1u64, 0, 0, 0].map(big);
    let trace = psi_trace(&GrowthFunction::fibonacci(), 4, 1, &start).map_err(|e| e.to_string())?;
    let states: Vec<Vec<u64>> = trace
        .iter()
        .map(|s| s.u.iter().map(|x| x.to_u64().unwrap()).collect())
        .collect();
    let expected = vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 2, 0], vec![0, 0, 1, 2], vec![0, 0, 0, 5]];
    check(states == expected, || format!("states {states:?}"))?;
    let ret = trace.last().map(|s| s.index);
    check(ret == Some(5), || format!("returned {ret:?}"))
}

fn criterion_5_check() -> Outcome {
    let start = Instant::now();
    for m in 1..=2usize {
        for n in 1..=3u64 {
            for c in 1..=3u64 {
                let f = GrowthFunction::Constant(c);
                let brute = brute_force_max_length(m, n as usize, &f, 40).map_err(|e| e.to_string())?;
                let psi = psi_sequence(&f, m, n).map_err(|e| e.to_string())?;
                check(brute as u64 <= psi, || format!("m={m} n={n} f={c}: brute {brute} > psi {psi}"))?;
            }
        }
    }
    for h in 1..=2u64 {
        let f = GrowthFunction::RefinedM2 { n: 1, h };
        let brute = brute_force_max_length(2, 1, &f, h as usize + 3).map_err(|e| e.to_string())?;
        check(brute as u64 == h + 1, || format!("f(1,{h}): brute {brute}"))?;
    }
    timed(Duration::from_secs(30), start)
}

/// Random polynomial text with order ≤ 3 and total degree ≤ 3.
fn random_poly(rng: &mut ChaCha8Rng, m: usize, n: usize) -> String {
    let var = |rng: &mut ChaCha8Rng| {
        let mut exps = vec![0u32; m];
        let order = rng.gen_range(0..=3u32);
        for _ in 0..order {
            exps[rng.gen_range(0..m)] += 1;
        }
        let list: Vec<String> = exps.iter().map(u32::to_string).collect();
        format!("y{}[{}]", rng.gen_range(1..=n), list.join(","))
    };
    let terms = rng.gen_range(1..=4);
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut c = rng.gen_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        let deg = rng.gen_range(0..=3);
        let mut mono = vec![c.to_string()];
        for _ in 0..deg {
            mono.push(var(rng));
        }
        out.push(format!("({})", mono.join("*")));
    }
    out.join(" + ")
}

fn random_set(rng: &mut ChaCha8Rng, ring: &Ring, r: &WeightedRanking) -> TriangularSet {
    loop {
        let size = rng.gen_range(1..=2);
        let polys: Vec<DiffPoly> = (0..size)
            .map(|_| parse_poly(&random_poly(rng, ring.m(), ring.n()), ring).unwrap())
            .collect();
        if polys.iter().any(DiffPoly::is_constant) {
            continue;
        }
        if let Ok(set) = TriangularSet::new(polys, r) {
            return set;
        }
    }
}

fn criterion_6_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut instances = 0;
    while instances < 240 {
        let (m, n) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let ring = Ring::new(m, n).unwrap();
        let w = WeightVector::new((0..m).map(|_| rng.gen_range(1..=2)).collect()).unwrap();
        let r = WeightedRanking::new(w.clone());
        let set = random_set(&mut rng, &ring, &r);
        let f = parse_poly(&random_poly(&mut rng, m, n), &ring).unwrap();
        for full in [false, true] {
            let cert = if full { full_reduce(&f, &set, &r) } else { partial_reduce(&f, &set, &r) };
            let ctx = || format!("f = {f}, A = {:?}, full = {full}", set.polys().map(|p| p.to_string()).collect::<Vec<_>>());
            check(cert.verify(&f, &set), || format!("identity fails: {}", ctx()))?;
            check(is_reduced_wrt(&cert.remainder, &set, full), || format!("remainder {} not reduced: {}", cert.remainder, ctx()))?;
            let (wr, wf) = (cert.remainder.weight(&w).unwrap_or(0), f.weight(&w).unwrap_or(0));
            check(wr <= wf, || format!("weight grew {wf} -> {wr}: {}", ctx()))?;
        }
        instances += 1;
    }
    Ok(())
}

/// Desk systems in the input grammar.
pub const DESK_SUITE: &[&str] = &[
    "ring m=1 n=1 w=[1]; F: y1[1]^2 - 4*y1;",
    "ring m=1 n=1 w=[1]; F: y1[1] - y1;",
    "ring m=1 n=2 w=[1]; F: y1[1] - y2; y2[1] - y1;",
    "ring m=1 n=1 w=[1]; F: y1[2]*y1 - y1[1]^2;",
    "ring m=1 n=1 w=[1]; F: y1; y1[1] - 1;",
    "ring m=2 n=1 w=[1,1]; F: y1[1,0] - y1[0,1];",
    "ring m=2 n=1 w=[1,1]; F: y1[0,1] - y1[2,0];",
    "ring m=2 n=1 w=[1,1]; F: y1[1,0]^2 - y1[0,1]; y1[0,1]*y1 - y1[1,0];",
    "ring m=2 n=1 w=[1,1]; F: y1[0,2] - y1[1,0]^2; y1[2,0] - y1;",
    "ring m=2 n=1 w=[1,1]; F: y1[2,0]*y1[0,1] - y1[1,0]^2;",
    "ring m=2 n=1 w=[1,1]; F: y1[1,0] - y1^2; y1[0,1] - y1;",
    "ring m=2 n=1 w=[1,3]; F: y1[0,1] + y1*y1[1,0] + y1[3,0];",
    "ring m=2 n=2 w=[1,1]; F: y1[1,0] - y2[0,1]; y1[0,1] + y2[1,0];",
    "ring m=3 n=1 w=[1,1,2]; F: y1[0,0,1] - y1[2,0,0] - y1[0,2,0];",
    "ring m=2 n=2 w=[1,1]; F: y1^2 - y2; y2^2 - 1; K: y1;",
];

struct DeskRun {
    text: &'static str,
    m: usize,
    n: u64,
    h: u64,
    w: WeightVector,
    dec: rgdiff::Decomposition,
}

fn desk_runs() -> Result<Vec<DeskRun>, String> {
    DESK_SUITE
        .iter()
        .map(|text| {
            let spec = parse_system(text).map_err(|e| format!("{text}: {e}"))?;
            let r = WeightedRanking::new(spec.weights.clone());
            let dec = rosenfeld_groebner(&spec.f, &spec.k, &r, &DecomposeOptions::default())
                .map_err(|e| format!("{text}: {e}"))?;
            Ok(DeskRun {
                text,
                m: spec.ring.m(),
                n: spec.ring.n() as u64,
                h: dec.input_weight,
                w: spec.weights,
                dec,
            })
        })
        .collect()
}

/// Literal reading: every quadruple and output against `weight_bound`.
fn criterion_7_check() -> Outcome {
    let runs = desk_runs()?;
    check(runs.len() >= 10, || "suite too small".into())?;
    let mut errs = Vec::new();
    for run in &runs {
        let rep = bound_report(run.m, run.n, run.h, &run.w).map_err(|e| e.to_string())?;
        let seen = big(run.dec.trace.max_weight_seen);
        if seen > rep.weight_bound {
            errs.push(format!("{}: max weight {seen} > bound {}", run.text, rep.weight_bound));
        }
    }
    check(errs.is_empty(), || errs.join("; "))
}

/// The bounds as proved: outputs against `weight_bound`, every quadruple
/// against `quadruple_bound` (they differ only for `m = 2`).
fn proved_bounds_check() -> Outcome {
    for run in &desk_runs()? {
        let rep = bound_report(run.m, run.n, run.h, &run.w).map_err(|e| e.to_string())?;
        let seen = big(run.dec.trace.max_weight_seen);
        check(seen <= rep.quadruple_bound, || {
            format!("{}: max weight {seen} > quadruple bound {}", run.text, rep.quadruple_bound)
        })?;
        let r = WeightedRanking::new(run.w.clone());
        for s in &run.dec.systems {
            check(big(s.weight(&r)) <= rep.weight_bound, || {
                format!("{}: output weight {} > bound {}", run.text, s.weight(&r), rep.weight_bound)
            })?;
        }
    }
    Ok(())
}

fn criterion_8_check() -> Outcome {
    let runs = desk_runs()?;
    for run in &runs {
        let fib = GrowthFunction::ScaledFibonacci { h: run.h };
        let refined = GrowthFunction::RefinedM2 { n: run.n, h: run.h };
        for b in &run.dec.trace.branches {
            let pts: Vec<_> = b.witness.iter().map(|u| map_from_derivative(u, &run.w)).collect();
            check(is_antichain_sequence(&pts, Some(&fib)), || format!("{}: witness {:?} vs h*fib", run.text, b.witness))?;
            if run.m == 2 {
                check(is_antichain_sequence(&pts, Some(&refined)), || {
                    format!("{}: witness {:?} vs f(n,h)", run.text, b.witness)
                })?;
            }
            check(branch_is_sound(&b.leader_history), || format!("{}: unsound branch", run.text))?;
        }
    }
    Ok(())
}

const FIXED_LINEAR: &[(usize, &[&str])] = &[
    (1, &["x1^2 - 1"]),
    (2, &["x1 - x2", "x2^2"]),
    (2, &["x1^2 - x2", "x1*x2 - 1"]),
    (3, &["x1 - x2*x3", "x2^2 - x3", "x3^3 - x1"]),
    (3, &["x1*x2 - x3", "x1^2 - 1", "x2^2 - x3^2"]),
];

fn criterion_9_check() -> Outcome {
    let start = Instant::now();
    let mut systems: Vec<(usize, Vec<_>)> = FIXED_LINEAR
        .iter()
        .map(|(m, ps)| (*m, ps.iter().map(|p| parse_alg_poly(p, *m).unwrap()).collect()))
        .collect();
    systems.extend(seeded_systems(2024, 20));
    for (m, sys) in &systems {
        let rep = cross_check(sys, *m).map_err(|e| e.to_string())?;
        check(rep.systems <= 1, || format!("{} systems", rep.systems))?;
        check(rep.passed(), || format!("cross-check failed: {rep:?}"))?;
    }
    timed(Duration::from_secs(60), start)
}

fn criterion_10_check() -> Outcome {
    for (text, expected) in [
        ("ring m=3 n=1 w=[1,1,2]; F: y1[0,0,1] - y1[2,0,0] - y1[0,2,0];", 2),
        ("ring m=2 n=1 w=[1,3]; F: y1[0,1] + y1*y1[1,0] + y1[3,0];", 3),
    ] {
        let spec = parse_system(text).map_err(|e| e.to_string())?;
        let f = &spec.f[0];
        let weight = f.weight(&spec.weights);
        let order = f.order();
        check(weight == Some(expected) && order == Some(expected), || {
            format!("{text}: weight {weight:?} order {order:?}")
        })?;
    }
    Ok(())
}

const CRITERIA: [fn() -> Outcome; 10] = [
    criterion_1_check,
    criterion_2_check,
    criterion_3_check,
    criterion_4_check,
    criterion_5_check,
    criterion_6_check,
    criterion_7_check,
    criterion_8_check,
    criterion_9_check,
    criterion_10_check,
];

/// Criteria expected to fail, with the reason.
const KNOWN_FAILURES: &[(usize, &str)] = &[
    (
        1,
        "the published h=5 weight 55 contradicts f(1,5)_7 = 53 and the published per-derivation cells 26, 17",
    ),
    (
        7,
        "for m = 2 the refined bound covers only the output; intermediate delta-polynomials may exceed it \
         (the bounds as proved are checked by proved_weight_bounds)",
    ),
];

/// Writes straight to stderr so the lines survive libtest's output capture.
fn report(line: String) {
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn criteria_report() {
    let mut unexpected = Vec::new();
    for (i, crit) in CRITERIA.iter().enumerate() {
        let id = i + 1;
        let outcome = crit();
        match &outcome {
            Ok(()) => report(format!("criterion {id}: PASS")),
            Err(e) => report(format!("criterion {id}: FAIL ({e})")),
        }
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == id);
        match (outcome.is_ok(), known) {
            (false, Some((_, why))) => report(format!("criterion {id}: known failure: {why}")),
            (false, None) => unexpected.push(id),
            (true, Some(_)) => report(format!("criterion {id}: known failure no longer reproduces")),
            (true, None) => {}
        }
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}

#[test]
fn criterion_1_fails_only_on_the_h5_cell() {
    let table = table_m2_n1();
    for (i, cell) in table.iter().enumerate() {
        let expected = if cell.h == 5 { 53 } else { PUBLISHED_M2N1[i] };
        assert_eq!(cell.weight, big(expected), "h={}", cell.h);
    }
    assert_eq!(refined_m2(1, 5, 7), big(53));
}

#[test]
fn criterion_2() {
    criterion_2_check().unwrap();
}

#[test]
fn criterion_3() {
    criterion_3_check().unwrap();
}

#[test]
fn criterion_4() {
    criterion_4_check().unwrap();
}

#[test]
fn criterion_5() {
    criterion_5_check().unwrap();
}

#[test]
fn criterion_6() {
    criterion_6_check().unwrap();
}

#[test]
fn criterion_7_violations_are_intermediate_m2_only() {
    let runs = desk_runs().unwrap();
    for run in &runs {
        let rep = bound_report(run.m, run.n, run.h, &run.w).unwrap();
        if big(run.dec.trace.max_weight_seen) > rep.weight_bound {
            assert_eq!(run.m, 2, "{}", run.text);
        }
    }
}

#[test]
fn proved_weight_bounds() {
    proved_bounds_check().unwrap();
}

#[test]
fn criterion_8() {
    criterion_8_check().unwrap();
}

#[test]
fn criterion_9() {
    criterion_9_check().unwrap();
}

#[test]
fn criterion_10() {
    criterion_10_check().unwrap();
}
