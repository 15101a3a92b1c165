//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qfq::fiber::{center_dim_solve, is_two_sided_ideal, radical_basis, specialize, FiberPoint};
use qfq::hilbert::{euler_characteristic, hilbert_polynomial, sheaf_cohomology, TwistMultiset};
use qfq::index::{enumerate_index_set, weight_histogram};
use qfq::qparams::{
    canonical_generic, classify, enumerate_admissible, enumerate_generic, Permutation,
};
use qfq::rewrite::{
    graded_dimension, is_central, multiply, normal_form, normal_form_scheduled, quintic_relation,
    AlgElement, Monomial, Word,
};
use qfq::structure::{
    build_table, frobenius_pairing, is_symmetric_pairing, row_sum_criterion, verify_associativity,
    VerifyMode,
};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn classification() -> Outcome {
    let start = Instant::now();
    let report = classify();
    let secs = start.elapsed().as_secs_f64();
    check(
        report.generic_count == 3000 && report.orbit_count_all_actions == 1 && secs <= 60.0,
        format!("3000 generic, 1 orbit ({secs:.1}s)"),
        format!(
            "{} generic, {} orbits ({secs:.1}s)",
            report.generic_count, report.orbit_count_all_actions
        ),
    )
}

fn grading_histogram() -> Outcome {
    let h = weight_histogram(&enumerate_index_set());
    check(h == [1, 121, 381, 121, 1], format!("{h:?}"), format!("{h:?}"))
}

fn table_soundness() -> Outcome {
    let start = Instant::now();
    let admissible = enumerate_admissible();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut matrices = vec![canonical_generic()];
    matrices.extend(admissible.choose_multiple(&mut rng, 25).copied());
    for (k, n) in matrices.iter().enumerate() {
        let t = build_table(n).map_err(|e| e.to_string())?;
        let exact = verify_associativity(&t, VerifyMode::ExactBilinear).map_err(|e| e.to_string())?;
        let sampled = verify_associativity(
            &t,
            VerifyMode::Sampled {
                count: 1_000_000,
                seed: k as u64,
            },
        )
        .map_err(|e| e.to_string())?;
        if !exact.passed || !sampled.passed {
            return Err(format!("matrix {n:?}: exact {:?}, sampled {:?}", exact.violation, sampled.violation));
        }
    }
    let generic = enumerate_generic();
    let imperfect = generic
        .par_iter()
        .filter(|n| !frobenius_pairing(&build_table(n).unwrap()).is_perfect())
        .count();
    let secs = start.elapsed().as_secs_f64();
    check(
        imperfect == 0 && secs <= 300.0,
        format!("26 tables sound, {} perfect pairings ({secs:.1}s)", generic.len()),
        format!("{imperfect} imperfect pairings ({secs:.1}s)"),
    )
}

fn symmetry_equivalence() -> Outcome {
    let admissible = enumerate_admissible();
    let agree = admissible
        .par_iter()
        .filter(|n| is_symmetric_pairing(&build_table(n).unwrap()) == row_sum_criterion(n))
        .count();
    check(
        agree == admissible.len(),
        format!("{agree}/{} agree", admissible.len()),
        format!("{agree}/{} agree", admissible.len()),
    )
}

fn rewriting() -> Outcome {
    let start = Instant::now();
    let n = qfq::qparams::act_permute(&canonical_generic(), &Permutation::new(&[1, 0, 2, 3, 4]).unwrap());
    let quintic_zero = quintic_relation(&n).map_err(|e| e.to_string())?.is_zero();
    let central = (0..5).all(|i| {
        let mut e = [0; 5];
        e[i] = 5;
        let x = normal_form(&Monomial(e).to_word(), &n).unwrap();
        is_central(&x, &n).unwrap()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let draw = |rng: &mut ChaCha8Rng| -> AlgElement {
        let d = rng.gen_range(0..=6);
        normal_form(&Word::random(rng, d), &n).unwrap()
    };
    let mut assoc_fail = 0;
    for _ in 0..10_000 {
        let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        let l = multiply(&multiply(&x, &y, &n).unwrap(), &z, &n).unwrap();
        let r = multiply(&x, &multiply(&y, &z, &n).unwrap(), &n).unwrap();
        assoc_fail += (l != r) as usize;
    }
    let mut confluence_fail = 0;
    for _ in 0..10_000 {
        let d = rng.gen_range(0..=10);
        let w = Word::random(&mut rng, d);
        let a = normal_form(&w, &n).unwrap();
        let b = normal_form_scheduled(&w, &n, &mut rng).unwrap();
        confluence_fail += (a != b) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        quintic_zero && central && assoc_fail == 0 && confluence_fail == 0 && secs <= 120.0,
        format!("Σt_k⁵ = 0, t_i⁵ central, 10⁴ triples associative, 10⁴ words confluent ({secs:.1}s)"),
        format!(
            "quintic zero {quintic_zero}, central {central}, {assoc_fail} associativity and {confluence_fail} confluence failures ({secs:.1}s)"
        ),
    )
}

fn dimension_bridge() -> Outcome {
    let p = hilbert_polynomial(&TwistMultiset::sheaf_algebra());
    let mut mismatches = Vec::new();
    let mut values = Vec::new();
    for n in 0..=3i64 {
        let g = BigInt::from(graded_dimension(5 * n as u64));
        let h = p.eval_int(n).expect("integer-valued");
        values.push(format!("n={n}: {g} vs {h}"));
        if g != h {
            mismatches.push(n);
        }
    }
    check(
        mismatches.is_empty(),
        values.join(", "),
        format!("mismatch at n = {mismatches:?} ({})", values.join(", ")),
    )
}

fn cohomology() -> Outcome {
    let tw = TwistMultiset::sheaf_algebra();
    let p = hilbert_polynomial(&tw);
    for n in -5..=10 {
        let h = sheaf_cohomology(&tw, n);
        if h[1] != 0 || h[2] != 0 {
            return Err(format!("h at n={n} is {h:?}"));
        }
        let chi = euler_characteristic(&h);
        if Some(chi.clone()) != p.eval_int(n) {
            return Err(format!("χ({n}) = {chi} differs from p({n}) = {}", p.eval(n)));
        }
    }
    Ok("h¹ = h² = 0 and χ = p on -5..=10".into())
}

fn fiber_oracle() -> Outcome {
    let start = Instant::now();
    let t = build_table(&canonical_generic()).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for c in [[1, 1, 1, 1, -4], [1, -1, 1, -1, 0], [1, 2, -3, 4, -4]] {
        let p = FiberPoint::from_ints(c).map_err(|e| e.to_string())?;
        let f = specialize(&t, &p).map_err(|e| e.to_string())?;
        let (graded, solved) = (f.center_dim_graded(), center_dim_solve(&f));
        let rad = radical_basis(&f);
        if graded != solved || !is_two_sided_ideal(&f, &rad) {
            return Err(format!("at {p}: center {graded} vs {solved}, radical dim {}", rad.len()));
        }
        parts.push(format!("{p}: center {graded}, radical {}", rad.len()));
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        secs <= 600.0,
        format!("{} ({secs:.1}s)", parts.join("; ")),
        format!("too slow ({secs:.1}s)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("classification reproduction", classification),
        ("grading histogram", grading_histogram),
        ("structure-table soundness", table_soundness),
        ("symmetry criterion equivalence", symmetry_equivalence),
        ("rewriting suite", rewriting),
        ("dimension bridge", dimension_bridge),
        ("cohomology hypotheses", cohomology),
        ("fiber oracle equivalence", fiber_oracle),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
