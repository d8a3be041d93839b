//! Acceptance suite: one test and one printed line per criterion, over
//! `k ∈ {0, 1, 2}` with 20 seeds each. The suite is computed once.

use std::sync::OnceLock;
use std::time::Instant;

use g2spectral::checks::{aggregate, global_suite, seed_suite, Check, CheckStatus, CriterionSummary, SuiteOptions};
use g2spectral::octonion::G2Algebra;
use rayon::prelude::*;

const KS: [usize; 3] = [0, 1, 2];
const SEEDS: u64 = 20;
const FRAMES: usize = 20;

const TITLES: [&str; 9] = [
    "algebra kernel",
    "invariant theory",
    "characteristic polynomial shape",
    "symmetry reduction",
    "spectral curve counts",
    "derived-curve counts",
    "isospectrality",
    "fiberwise structure",
    "cover coherence",
];

struct Suite {
    checks: Vec<Check>,
    summary: Vec<CriterionSummary>,
}

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let start = Instant::now();
        let alg = G2Algebra::new().expect("g2 basis");
        let mut checks = global_suite(&alg, FRAMES);
        let opts = SuiteOptions::default();
        let jobs: Vec<(usize, u64)> = KS.iter().flat_map(|&k| (0..SEEDS).map(move |s| (k, s))).collect();
        let per_seed: Vec<Vec<Check>> = jobs
            .par_iter()
            .map(|&(k, s)| {
                let mut cs = seed_suite(&alg, k, s, &opts);
                for c in &mut cs {
                    if c.detail.is_empty() {
                        c.detail = format!("k={k} seed={s}");
                    } else {
                        c.detail = format!("k={k} seed={s}: {}", c.detail);
                    }
                }
                cs
            })
            .collect();
        checks.extend(per_seed.into_iter().flatten());
        let summary = aggregate(&checks);
        eprintln!("acceptance suite computed in {:.1}s", start.elapsed().as_secs_f64());
        Suite { checks, summary }
    })
}

fn criterion(n: u8) {
    let s = suite();
    let sum = &s.summary[n as usize - 1];
    let verdict = if sum.passed { "PASS" } else { "FAIL" };
    println!("criterion {n} [{verdict}] {} ({} checks)", TITLES[n as usize - 1], sum.checks);
    for f in &sum.failures {
        println!("    failed  {f}");
    }
    for f in &sum.flagged {
        println!("    flagged {f}");
    }
    let failing: Vec<&Check> =
        s.checks.iter().filter(|c| c.criterion == n && c.status == CheckStatus::Fail && c.quorum.is_none()).collect();
    for c in failing.iter().take(5) {
        println!("    e.g. {} = {} (bound {}) {}", c.name, c.value, c.bound, c.detail);
    }
    assert!(sum.passed, "criterion {n} failed: {:?}", sum.failures);
}

#[test]
fn criterion_1_algebra_kernel() {
    criterion(1);
}

#[test]
fn criterion_2_invariant_theory() {
    criterion(2);
}

#[test]
fn criterion_3_charpoly_shape() {
    criterion(3);
}

#[test]
fn criterion_4_symmetry_reduction() {
    criterion(4);
}

#[test]
fn criterion_5_spectral_curve_counts() {
    criterion(5);
}

#[test]
fn criterion_6_derived_curve_counts() {
    criterion(6);
}

#[test]
fn criterion_7_isospectrality() {
    criterion(7);
}

#[test]
fn criterion_8_fiberwise_structure() {
    criterion(8);
}

#[test]
fn criterion_9_cover_coherence() {
    criterion(9);
}
