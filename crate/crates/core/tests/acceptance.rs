//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paramcirc_core::algebra::{rat, RatMatrix, Rational, SparsePoly, Var};
use paramcirc_core::arithmetize::{count_satisfying, standard_arithmetization, CountOptions};
use paramcirc_core::circuit::Circuit;
use paramcirc_core::elim::{
    eliminate_enum, eliminate_enum_truncated, eliminate_multmatrix, family, family_with_rng, witness_delta_rank, witness_l_independence, FamilyKind,
};
use paramcirc_core::identity::{
    correctness_set_size, det_point_count, equiv, multilinear_injective, Mode, Verdict,
};
use paramcirc_core::pochhammer::{gen_chain, verify_chain, ChainVerdict, RejectReason};
use paramcirc_core::random::{corrupt, random_bool_circuit, random_circuit, Shape};
use paramcirc_core::semantics::{degree_bounds, eval_nodes, eval_numeric, interpret, Budget};
use paramcirc_core::transforms::reduce;
use paramcirc_core::Error;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

/// `Π_{0≤j<2ⁿ} (Y − (j + T·Π U_i^{[j]_i}))` straight from binary digits.
fn closed_form(n: usize) -> SparsePoly {
    let y = SparsePoly::var(Var::Y);
    let t = SparsePoly::var(Var::Param(1));
    let mut f = SparsePoly::one();
    for j in 0..1i64 << n {
        let mut mono = SparsePoly::one();
        for i in 0..n {
            if (j >> i) & 1 == 1 {
                mono = &mono * &SparsePoly::var(Var::Param(2 + i as u32));
            }
        }
        let root = &SparsePoly::int(j) + &(&t * &mono);
        f = &f * &(&y - &root);
    }
    f
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    for n in 1..=4 {
        let fam = family(FamilyKind::Basic, n).map_err(|e| e.to_string())?;
        let f = eliminate_enum(&fam.problem, Budget::default()).map_err(|e| e.to_string())?.f;
        check(f == closed_form(n), || format!("n={n}: F differs from the binary-digit product"))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("n=1..4 exact, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    for n in 1..=3 {
        let basic = family(FamilyKind::Basic, n).map_err(|e| e.to_string())?;
        let by_enum = eliminate_enum(&basic.problem, Budget::default()).map_err(|e| e.to_string())?;
        let by_matrix = eliminate_multmatrix(&basic.problem, Budget::default()).map_err(|e| e.to_string())?;
        check(by_enum.f == by_matrix.f, || format!("basic n={n}: oracles disagree"))?;

        let hat = family(FamilyKind::Hat, n).map_err(|e| e.to_string())?;
        let f_hat = eliminate_multmatrix(&hat.problem, Budget::default()).map_err(|e| e.to_string())?.f;
        let s_zero: BTreeMap<Var, Rational> = (1..=n).map(|i| (Var::Param((1 + n + i) as u32), rat(0))).collect();
        check(f_hat.eval(&s_zero) == by_enum.f, || format!("hat n={n}: F̂ at S=0 differs from F"))?;
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("n=1..3 exact, {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for kind in [FamilyKind::Basic, FamilyKind::BoolHard] {
        let mut ranks = Vec::new();
        for n in 1..=4 {
            let fam = family(kind, n).map_err(|e| e.to_string())?;
            let res = eliminate_enum_truncated(&fam.problem, 1, Budget::default()).map_err(|e| e.to_string())?;
            let delta = witness_delta_rank(&res, n);
            let l = witness_l_independence(&res, n).map_err(|e| e.to_string())?;
            if delta.rank != 1 << n {
                failures.push(format!("{kind} n={n}: Δ-rank {} ≠ {}", delta.rank, 1 << n));
            }
            if !l.passed() {
                failures.push(format!("{kind} n={n}: L rank {} ≠ {}", l.rank, 1 << n));
            }
            ranks.push((delta.rank, l.rank));
        }
        rows.push(format!("{kind} (Δ, L) ranks {ranks:?}"));
    }
    within(Duration::from_secs(60), start)?;
    if !failures.is_empty() {
        return Err(format!("{}; {}", failures.join(", "), rows.join("; ")));
    }
    Ok(format!("{}, {:.2?}", rows.join("; "), start.elapsed()))
}

fn criterion_4() -> Outcome {
    let mut rows = Vec::new();
    for n in 1..=4 {
        let fam = family(FamilyKind::Basic, n).map_err(|e| e.to_string())?;
        let size = fam.circuit.metrics().nonscalar_size;
        check(size <= 3 * n + 2, || format!("n={n}: nonscalar size {size} > {}", 3 * n + 2))?;
        let f = eliminate_enum(&fam.problem, Budget::default()).map_err(|e| e.to_string())?.f;
        let rank = RatMatrix::from_polys(&f.coeff_vector(Var::Y)).rank();
        check(rank >= 1 << n, || format!("n={n}: coefficient rank {rank} < {}", 1 << n))?;
        rows.push(format!("n={n}: L={size} rank={rank}"));
    }
    Ok(rows.join("; "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0u64;
    for k in 0..100 {
        let m = rng.gen_range(1..=10u32);
        let gates = rng.gen_range(1..=30);
        let b = random_bool_circuit(m, None, gates, &mut rng);
        let arith = standard_arithmetization(&b);
        for z in 0u32..1 << m {
            let bits: Vec<bool> = (0..m).map(|i| (z >> i) & 1 == 1).collect();
            let truth = b.eval(&bits);
            let point: Vec<Rational> = bits.iter().map(|&x| rat(x as i64)).collect();
            let vals = eval_nodes(&arith.circuit, &[], &point).map_err(|e| e.to_string())?;
            for (pos, &(_, g)) in arith.node_map.iter().enumerate() {
                let v = &vals[arith.circuit.position(g).unwrap()];
                check(*v == rat(truth[pos] as i64), || format!("circuit {k}, point {z}, node {}", b.nodes()[pos].id))?;
                checked += 1;
            }
        }
    }
    Ok(format!("100 circuits, {checked} node values, 0 failures"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut squared = 0;
    for k in 0..50 {
        let r = rng.gen_range(0..=3u32);
        let n = rng.gen_range(1..=8u32);
        let b = random_bool_circuit(r + n, Some((r, n)), rng.gen_range(2..=20), &mut rng);
        let u: Vec<bool> = (0..r).map(|_| rng.gen()).collect();
        let q = if k % 2 == 0 { 1 } else { 2 };
        squared += (q == 2) as u32;
        let rep = count_satisfying(&b, &u, CountOptions { q, ..Default::default() }).map_err(|e| e.to_string())?;
        check(rep.by_order == Some(rep.by_truth_table), || format!("run {k}: order route {:?} vs {}", rep.by_order, rep.by_truth_table))?;
        check(rep.by_trace == Some(rep.by_truth_table), || format!("run {k}: trace route {:?} vs {}", rep.by_trace, rep.by_truth_table))?;
        check(rep.phi1_degree <= rep.h_degree, || format!("run {k}: deg φ₁ {} > deg H {}", rep.phi1_degree, rep.h_degree))?;
    }
    Ok(format!("50 runs ({squared} with q=2), all three counts agree"))
}

fn finals(c: &Circuit) -> Result<Vec<paramcirc_core::algebra::RatFunc>, Error> {
    Ok(interpret(c, Budget::default())?.finals().into_iter().cloned().collect())
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut merged = 0usize;
    while done < 300 {
        let shape = Shape {
            params: rng.gen_range(0..=2),
            inputs: rng.gen_range(1..=3),
            internal: rng.gen_range(1..=14),
            outputs: rng.gen_range(1..=3),
            divisions: rng.gen_bool(0.3),
        };
        let c = random_circuit(shape, &mut rng);
        let before = match finals(&c) {
            Ok(f) => f,
            Err(Error::InconsistentCircuit(_)) | Err(Error::BudgetExceeded(_)) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let r = reduce(&c, Budget::default()).map_err(|e| e.to_string())?;
        let after = finals(&r).map_err(|e| e.to_string())?;
        check(before.iter().zip(&after).all(|(a, b)| a.equals(b)), || format!("circuit {done}: finals changed"))?;
        check(r.nodes().len() <= c.nodes().len(), || format!("circuit {done}: node count grew"))?;
        let again = reduce(&r, Budget::default()).map_err(|e| e.to_string())?;
        check(again == r, || format!("circuit {done}: reduction not idempotent"))?;
        merged += c.nodes().len() - r.nodes().len();
        done += 1;
    }
    Ok(format!("300 circuits, {merged} nodes merged, 0 violations"))
}

/// Whether two division-free one-input circuits compute different
/// polynomials, decided by exact evaluation at more points than the degree.
fn semantics_differ(a: &Circuit, b: &Circuit) -> bool {
    let d = degree_bounds(a).unwrap()[0].max(degree_bounds(b).unwrap()[0]);
    (0..=d as i64).any(|x| eval_numeric(a, &[], &[rat(x)]).unwrap() != eval_numeric(b, &[], &[rat(x)]).unwrap())
}

fn criterion_8() -> Outcome {
    let chains: Vec<_> = (0..=8).map(|n| gen_chain(n).unwrap()).collect();
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for chain in &chains {
            let rep = verify_chain(chain, 8, &mut rng);
            check(rep.accepted(), || format!("seed {seed}: valid chain of depth {} rejected", chain.depth()))?;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut caught = 0;
    let mut skipped = 0;
    while caught < 100 {
        let n = rng.gen_range(1..=6);
        let mut chain = chains[n].clone();
        let level = rng.gen_range(1..=n);
        let Some((_, bad)) = corrupt(&chain.levels[level], &mut rng) else { continue };
        if !semantics_differ(&chain.levels[level], &bad) {
            skipped += 1;
            continue;
        }
        chain.levels[level] = bad;
        let rep = verify_chain(&chain, 8, &mut rng);
        let ChainVerdict::Reject(rej) = rep.verdict else {
            return Err(format!("corruption {caught} at level {level} accepted"));
        };
        check(rej.level == level as u32 && rej.reason == RejectReason::LevelMismatch, || format!("corruption {caught}: {rej:?}"))?;
        let w = rej.witness.ok_or("missing witness")?;
        check(w.confirm(&chain, rej.level), || format!("corruption {caught}: witness does not re-verify"))?;
        caught += 1;
    }

    for l in 0..=1000u64 {
        let b = det_point_count(l);
        let m = BigUint::from(4u8) * BigUint::from(l + 2).pow(2) + BigUint::from(2u8);
        check(BigUint::from(b.count) == m && b.bits == 2 * (l + 1), || format!("L={l}: {b:?}"))?;
    }
    Ok(format!(
        "900 valid chains accepted, 100/100 corruptions rejected ({skipped} neutral skipped), formulas L=0..1000"
    ))
}

fn criterion_9() -> Outcome {
    for n in 1..=1000u64 {
        let b = correctness_set_size(n);
        let k = BigUint::from(16u8) * BigUint::from(n).pow(2) + BigUint::from(2u8);
        check(BigUint::from(b.count) == k && b.bits == 4 * n, || format!("n={n}: {b:?}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut resamples = Vec::new();
    for n in 1..=3usize {
        let fam = family_with_rng(FamilyKind::Points, n, &mut rng).map_err(|e| e.to_string())?;
        let pts = fam.points.as_ref().unwrap();
        let xi = &pts.xi;
        let bound = correctness_set_size(n as u64);
        check(xi.set.points.len() as u128 == bound.count, || format!("n={n}: wrong point count"))?;
        check(xi.set.max_bits() <= bound.bits, || format!("n={n}: point exceeds {} bits", bound.bits))?;
        check(multilinear_injective(&xi.set.points, n), || format!("n={n}: encoding not injective"))?;
        resamples.push(xi.resamples);

        // Decoding the point values recovers F exactly.
        let k = pts.evaluation.outputs().len();
        let lambda: Vec<usize> = (0..k).collect();
        let composed = paramcirc_core::transforms::compose(&pts.evaluation, &pts.decoder, &lambda)
            .map_err(|e| e.to_string())?;
        let f = eliminate_enum(&fam.problem, Budget::default()).map_err(|e| e.to_string())?.f;
        let f_circ = Circuit::from_polys("F", n as u32 + 1, 1, &[f.substitute(Var::Y, &SparsePoly::var(Var::Input(1)))])
            .map_err(|e| e.to_string())?;
        let report = equiv(&composed, &f_circ, Mode::Exact, Budget::default(), &mut rng).map_err(|e| e.to_string())?;
        check(report.verdict == Verdict::Equal, || format!("n={n}: decoded product differs from F"))?;
    }
    Ok(format!("formulas n=1..1000, injective and decoding to F for n=1..3 (resamples {resamples:?})"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("closed-form elimination", criterion_1),
        ("oracle cross-equivalence", criterion_2),
        ("lower-bound witnesses", criterion_3),
        ("input/output gap", criterion_4),
        ("arithmetization", criterion_5),
        ("counting", criterion_6),
        ("reduction soundness", criterion_7),
        ("pochhammer protocol", criterion_8),
        ("identity-testing formulas", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
