//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use rigidity::certify::{
    certify_universal_rigidity, farkas_alternative_search, farkas_alternative_search_with, max_rank_psd_stress_search,
    stress_space_psd_scan, Path, Verdict,
};
use rigidity::edm::{build_v_basis, kv, tv};
use rigidity::falsify::{equivalent_framework_search, sweep_direction, Slice};
use rigidity::flex::{quadratic_at_infinity_edges, quadratic_at_infinity_gale};
use rigidity::framework::{congruence_check, equivalence_residual};
use rigidity::gale::{gale_matrix, general_position_check, GaleMatrix};
use rigidity::generate::{lateration_corpus, mixed_corpus};
use rigidity::lateration::{find_lateration_order, purify};
use rigidity::report::build_report;
use rigidity::stress::stress_space_basis;
use rigidity::{fixtures, linalg, Budget, Framework, Tolerances};

// Pinned tolerances.
const SWEEP_TOL: f64 = 1e-6;
const SWEEP_LOW: f64 = 0.05;
const SWEEP_HIGH: f64 = 1.95;
const SWEEP_STEP: f64 = 0.01;
const PSD_REL: f64 = 1e-9;
const RANK_REL: f64 = 1e-9;
const EQUILIBRIUM_REL: f64 = 1e-9;
const MISSING_REL: f64 = 1e-10;
const INVERSE_REL: f64 = 1e-10;
const EQUIVALENCE_REL: f64 = 1e-9;
const NONCONGRUENCE_REL: f64 = 1e-6;
const FARKAS_VALUE_TOL: f64 = 1e-12;

const CORPUS_SEED: u64 = 0;
const CORPUS_SIZE: usize = 100;
const FALSIFIER_SAMPLES: usize = 1000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Rank from eigenvalue magnitudes relative to the largest.
fn rank_oracle(s: &DMatrix<f64>) -> usize {
    let eig = s.clone().symmetric_eigen();
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eig.eigenvalues.iter().filter(|v| v.abs() > RANK_REL * top).count()
}

fn squared_distance(q: &DMatrix<f64>, i: usize, j: usize) -> f64 {
    (q.row(i) - q.row(j)).norm_squared()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = fixtures::square();
    let cert = certify_universal_rigidity(&f, 0, &Budget::default(), &tol()).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::NotUniversallyRigid, || format!("verdict {:?}", cert.verdict))?;
    cert.reverify(&f, &tol()).map_err(|e| e.to_string())?;

    // y = -e_24: the squared distance d24 equals 2 - t
    let y = [-1.0];
    let t_max = Slice::new(&f).max_feasible_step(&y, &tol());
    ensure((t_max - 2.0).abs() <= SWEEP_TOL, || format!("t_max = {t_max}"))?;
    let steps = ((SWEEP_HIGH - SWEEP_LOW) / SWEEP_STEP).round() as usize;
    let targets: Vec<f64> = (0..=steps).map(|k| SWEEP_LOW + SWEEP_STEP * k as f64).collect();
    let ts: Vec<f64> = targets.iter().map(|d| 2.0 - d).collect();
    let witnesses = sweep_direction(&f, &y, &ts, &tol()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (w, &target) in witnesses.iter().zip(&targets) {
        let d24 = squared_distance(w.q.matrix(), 1, 3);
        worst = worst.max((d24 - target).abs());
        let eq = equivalence_residual(f.graph(), f.config(), &w.q).map_err(|e| e.to_string())?;
        ensure(eq <= EQUIVALENCE_REL, || format!("equivalence residual {eq:e} at d24={target}"))?;
        ensure(!congruence_check(f.config(), &w.q, NONCONGRUENCE_REL).unwrap(), || format!("congruent at d24={target}"))?;
    }
    ensure(worst <= SWEEP_TOL, || format!("d24 off target by {worst:e}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "square: {} via {}; {} witnesses cover d24 in [{SWEEP_LOW}, {SWEEP_HIGH}] (max error {worst:.1e}), t_max = {t_max:.12}, {elapsed:.3} s",
        cert.verdict.as_str(),
        cert.path.as_str(),
        witnesses.len()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = fixtures::counterexample();
    let gp = general_position_check(f.config(), &tol());
    ensure(!gp.in_general_position, || "reported in general position".into())?;
    ensure(gp.dependent_subsets == vec![vec![1, 3, 4]], || format!("dependent subsets {:?}", gp.dependent_subsets))?;
    let scan = stress_space_psd_scan(&f, 90, &tol()).map_err(|e| e.to_string())?;
    ensure((1..=3).contains(&scan.stress_space_dim), || format!("stress space dimension {}", scan.stress_space_dim))?;
    ensure(scan.max_psd_rank < f.gale_dim(), || format!("PSD element of rank {}", scan.max_psd_rank))?;
    ensure(scan.max_normalized_lambda_min <= 1e-9, || format!("lambda_min/|Psi| reaches {:e}", scan.max_normalized_lambda_min))?;
    let cert = certify_universal_rigidity(&f, 0, &Budget::default(), &tol()).map_err(|e| e.to_string())?;
    ensure(cert.verdict == Verdict::Inconclusive, || format!("verdict {:?}", cert.verdict))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!(
        "counterexample: dependent triple {{2,4,5}}; stress space dim {} scanned over {} directions, max PSD rank {} < {}; check {}; {elapsed:.3} s",
        scan.stress_space_dim,
        scan.directions,
        scan.max_psd_rank,
        f.gale_dim(),
        cert.verdict.as_str()
    ))
}

fn purification_holds(f: &Framework) -> Result<(), String> {
    let order = find_lateration_order(f.graph(), f.dim(), 100_000).map_err(|e| e.to_string())?.ok_or("no lateration order")?;
    let z = gale_matrix(f.config(), &tol()).map_err(|e| e.to_string())?;
    let out = purify(f, &order, &z, &tol()).map_err(|e| e.to_string())?;
    let s = out.stress.matrix();
    let eig = s.clone().symmetric_eigen();
    let lo = eig.eigenvalues.min();
    let hi = eig.eigenvalues.max();
    ensure(lo >= -PSD_REL * hi, || format!("lambda_min {lo:e}, lambda_max {hi:e}"))?;
    let expected = f.n() - f.dim() - 1;
    ensure(rank_oracle(s) == expected, || format!("rank {} != {expected}", rank_oracle(s)))?;
    let norm = s.norm();
    let eq = (f.config().extended_matrix() * s).norm();
    ensure(eq <= EQUILIBRIUM_REL * norm, || format!("|PS| = {eq:e}"))?;
    for (i, j) in f.missing_edges() {
        ensure(s[(i, j)].abs() <= MISSING_REL * norm, || format!("s_{}{} = {:e}", i + 1, j + 1, s[(i, j)]))?;
    }
    Ok(())
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    purification_holds(&fixtures::lateration()).map_err(|e| format!("lateration fixture: {e}"))?;
    let corpus = lateration_corpus(CORPUS_SEED, CORPUS_SIZE);
    for (idx, f) in corpus.iter().enumerate() {
        purification_holds(f).map_err(|e| format!("corpus #{idx} (n={}, r={}): {e}", f.n(), f.dim()))?;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!("purification verified on the fixture and {} random lateration frameworks, {elapsed:.3} s", corpus.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut worst = 0.0f64;
    for _ in 0..CORPUS_SIZE {
        let n = rng.random_range(2..=10);
        let v = build_v_basis::<f64>(n);
        let mut d = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let x: f64 = rng.random_range(0.0..10.0);
                d[(i, j)] = x;
                d[(j, i)] = x;
            }
        }
        let back = kv(tv(&d, &v).map_err(|e| e.to_string())?.matrix(), &v);
        let err = linalg::max_abs(&(&back - &d)) / linalg::max_abs(&d);
        ensure(err <= INVERSE_REL, || format!("kv(tv(D)) error {err:e} at n={n}"))?;
        worst = worst.max(err);

        let x0 = DMatrix::from_fn(n - 1, n - 1, |_, _| StandardNormal.sample(&mut rng));
        let x = linalg::symmetrize(&x0);
        let back = tv(&kv(&x, &v), &v).map_err(|e| e.to_string())?;
        let err = linalg::max_abs(&(back.matrix() - &x)) / linalg::max_abs(&x);
        ensure(err <= INVERSE_REL, || format!("tv(kv(X)) error {err:e} at n={n}"))?;
        worst = worst.max(err);
    }
    Ok(format!("{CORPUS_SIZE} pairs of round trips, worst relative error {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 5);
    let frameworks: Vec<Framework> = mixed_corpus(CORPUS_SEED + 5, 400)
        .into_iter()
        .filter(|f| stress_space_basis(f, &tol()).map(|b| b.dim() > 0).unwrap_or(false))
        .collect();
    ensure(!frameworks.is_empty(), || "no framework with a nonzero stress".into())?;
    let mut violations = 0;
    let mut max_rank_seen = 0;
    for k in 0..CORPUS_SIZE {
        let f = &frameworks[k % frameworks.len()];
        let basis = stress_space_basis(f, &tol()).map_err(|e| e.to_string())?;
        let coeffs: Vec<f64> = (0..basis.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = basis.stress(&coeffs);
        let eq = (f.config().extended_matrix() * &s).norm();
        ensure(eq <= EQUILIBRIUM_REL * s.norm().max(1e-300), || format!("sample {k} is not a stress: {eq:e}"))?;
        let rank = rank_oracle(&s);
        max_rank_seen = max_rank_seen.max(rank);
        if rank > f.n() - f.dim() - 1 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} rank violations"))?;
    Ok(format!("{CORPUS_SIZE} random stresses from {} frameworks, 0 violations (largest rank {max_rank_seen})", frameworks.len()))
}

fn criterion_6() -> Outcome {
    let corpus = mixed_corpus(CORPUS_SEED, CORPUS_SIZE);
    let mut agree = 0;
    let mut flexes = 0;
    for (idx, f) in corpus.iter().enumerate() {
        let edge = quadratic_at_infinity_edges(f, &tol()).is_some();
        let z = gale_matrix(f.config(), &tol()).map_err(|e| e.to_string())?;
        let gale = quadratic_at_infinity_gale(f, &z, &tol()).map_err(|e| e.to_string())?.is_some();
        ensure(edge == gale, || format!("framework #{idx}: edge form {edge}, Gale form {gale}"))?;
        agree += 1;
        flexes += usize::from(edge);
    }
    ensure(flexes > 0 && flexes < corpus.len(), || format!("degenerate corpus: {flexes} flexes"))?;
    Ok(format!("{agree}/{} agree ({flexes} with an affine flex)", corpus.len()))
}

fn criterion_7() -> Outcome {
    let corpus = mixed_corpus(CORPUS_SEED, CORPUS_SIZE);
    let budget = Budget::default();
    let (mut psi_count, mut farkas_count) = (0, 0);
    for (idx, f) in corpus.iter().enumerate() {
        let psi = max_rank_psd_stress_search(f, 0, &budget, &tol()).map_err(|e| e.to_string())?.is_some();
        let farkas = farkas_alternative_search(f, 0, &budget, &tol()).map_err(|e| e.to_string())?.is_some();
        ensure(!(psi && farkas), || format!("framework #{idx}: both searches succeeded"))?;
        psi_count += usize::from(psi);
        farkas_count += usize::from(farkas);
    }
    let f = fixtures::square();
    let z = GaleMatrix::new(f.config(), DMatrix::from_column_slice(4, 1, &[1.0, -1.0, 1.0, -1.0]), &tol()).map_err(|e| e.to_string())?;
    let cert =
        farkas_alternative_search_with(&f, z, 0, &budget, &tol()).map_err(|e| e.to_string())?.ok_or("square: Farkas search failed")?;
    ensure(cert.missing == vec![(1, 3)], || format!("missing pairs {:?}", cert.missing))?;
    ensure((cert.x[0] - 1.0).abs() <= FARKAS_VALUE_TOL, || format!("x = {:?}", cert.x))?;
    ensure((cert.a[(0, 0)] - 2.0).abs() <= FARKAS_VALUE_TOL, || format!("Z^T E^24 Z = {}", cert.a[(0, 0)]))?;
    Ok(format!(
        "never both on {} frameworks (Psi found {psi_count}, Farkas found {farkas_count}); square: Z^T E^24 Z = {}",
        corpus.len(),
        cert.a[(0, 0)]
    ))
}

fn criterion_8() -> Outcome {
    let corpus = lateration_corpus(CORPUS_SEED, CORPUS_SIZE);
    let mut certified = 0;
    for (idx, f) in corpus.iter().enumerate() {
        let cert = certify_universal_rigidity(f, 0, &Budget::default(), &tol()).map_err(|e| e.to_string())?;
        if cert.path != Path::GeneralPositionStress {
            continue;
        }
        certified += 1;
        if let Some(w) = equivalent_framework_search(f, idx as u64, FALSIFIER_SAMPLES, &tol()) {
            return Err(format!("framework #{idx}: witness with distance change {:e}", w.distance_change));
        }
    }
    ensure(certified > 0, || "no certificate issued".into())?;
    Ok(format!("{certified} certified frameworks, {FALSIFIER_SAMPLES} samples each, 0 witnesses"))
}

fn criterion_9() -> Outcome {
    let budget = Budget::default();
    let run = || -> Result<Vec<String>, String> {
        fixtures::all_texts()
            .into_iter()
            .map(|(name, text)| {
                let f = rigidity::parse_framework(&text).map_err(|e| e.to_string())?;
                let cert = certify_universal_rigidity(&f, 0, &budget, &tol()).map_err(|e| e.to_string())?;
                Ok(build_report(name, &f, &cert, 0, &budget, &tol(), None).to_json())
            })
            .collect()
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || "reports differ between runs".into())?;
    Ok(format!("{} fixture reports byte-identical across two runs", first.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("square fold sweep and non-rigidity", criterion_1),
        ("counterexample: collinear triple, no rank-2 PSD stress, inconclusive", criterion_2),
        ("purification on lateration frameworks", criterion_3),
        ("tv and kv are mutually inverse", criterion_4),
        ("stress rank bound", criterion_5),
        ("edge-form and Gale-form flex detectors agree", criterion_6),
        ("Psi search and Farkas search are exclusive", criterion_7),
        ("certificates survive the falsifier", criterion_8),
        ("deterministic reports", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", k + 1);
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
