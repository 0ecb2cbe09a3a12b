//! Acceptance suite: one PASS/FAIL line per criterion, with the tolerances
//! used. Runs as a plain binary so the lines are always printed.

use std::time::{Duration, Instant};

use num_traits::Zero;
use qfock::analysis::{self, deformation_scan, dilation_deviation, gram_min_eigenvalues, phi_hk_check};
use qfock::combinatorics::{CosetOrientation, PartialPartition, SubsetCoset};
use qfock::fock::{CountMode, FockSpace, FockVector, SpaceConfig, Word};
use qfock::identities::{self, ClaimReading, FaultInjection};
use qfock::wick;
use qfock::QPolynomial;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn exact(d: usize, n: usize) -> FockSpace<QPolynomial> {
    FockSpace::exact(SpaceConfig::new(d, 1, n)).unwrap()
}

fn words_up_to(d: usize, n: usize) -> Vec<Word> {
    let space = exact(d, n);
    (0..=n).flat_map(|k| space.enumerate_words(k).unwrap().to_vec()).collect()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn figures() -> Outcome {
    let mut bad = Vec::new();
    let mut check = |name: &str, got: usize, want: usize| {
        if got != want {
            bad.push(format!("{name}: {got} != {want}"));
        }
    };
    let fig1 = PartialPartition::new(8, 4, vec![(2, 5), (4, 7)]).unwrap();
    check("fig1 iota", fig1.crossings(), 3);
    let fig2 = PartialPartition::new(8, 4, vec![(1, 6), (2, 5)]).unwrap();
    check("fig2 iota'", fig2.iota_prime().unwrap(), 6);
    check("fig2 iota", fig2.crossings(), 4);
    let rho2 = fig1.partition_triple().unwrap();
    check("iota(A2)", rho2.left_inversions(), 1);
    check("iota(B2)", rho2.right_inversions(), 1);
    check("iota(sigma2)", rho2.pairing_inversions(), 0);
    check("iota'(rho2)", fig1.iota_prime().unwrap(), 3);
    let rho3 = PartialPartition::new(8, 4, vec![(1, 6), (2, 5), (4, 7)]).unwrap();
    let t3 = rho3.partition_triple().unwrap();
    check("iota(A3)", t3.left_inversions(), 2);
    check("iota(B3)", t3.right_inversions(), 0);
    check("iota(sigma3)", t3.pairing_inversions(), 1);
    check("iota'(rho3)", rho3.iota_prime().unwrap(), 6);
    let a2 = SubsetCoset::new(4, vec![2, 4]).unwrap();
    check("coset {2,4}", a2.inversions(CosetOrientation::ComplementFirst), 1);
    let a3 = SubsetCoset::new(4, vec![1, 2, 4]).unwrap();
    check("coset {1,2,4}", a3.inversions(CosetOrientation::ComplementFirst), 2);
    outcome(bad.is_empty(), if bad.is_empty() { "14 values, exact".into() } else { bad.join("; ") })
}

fn iota_closed_form() -> Outcome {
    let start = Instant::now();
    let scan = identities::iota_prime_identity_scan(8, FaultInjection::default()).unwrap();
    let elapsed = start.elapsed();
    let ok = scan.report.passed() && scan.report.cases > 900 && elapsed < Duration::from_secs(30);
    outcome(
        ok,
        format!(
            "n <= 8: {} partitions, {} violations, {:.2?} (limit 30 s)",
            scan.report.cases,
            scan.report.violations.len(),
            elapsed
        ),
    )
}

fn wick_axiom() -> Outcome {
    let mut cases = 0;
    let mut bad = 0;
    for d in 1..=2 {
        let space = exact(d, 4);
        for w in words_up_to(d, 4) {
            cases += 1;
            let xi = FockVector::word(w.clone());
            let op = wick::wick_operator(&space, &xi, Some(0..=0)).unwrap();
            let image = space.apply(&op, &FockVector::vacuum()).unwrap();
            if image != xi {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{cases} words, d <= 2, n <= 4, exact: {bad} failures"))
}

fn moment_formula() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for d in 1..=2 {
        let space = exact(d, 4);
        for w in words_up_to(d, 8) {
            cases += 1;
            let hs: Vec<Vec<QPolynomial>> = w.letters().iter().map(|&l| space.unit(l)).collect();
            let pairs = wick::moment_pair_partitions(&space, &hs);
            let matrix = wick::vacuum_moment_matrix(&space, &hs).unwrap();
            if pairs != matrix {
                bad.push(format!("{w}: {pairs} vs {matrix}"));
            }
        }
    }
    let space = exact(1, 2);
    let e1 = space.unit(qfock::fock::Letter::first(1));
    let fourth = wick::moment_pair_partitions(&space, &vec![e1; 4]);
    let anchor = fourth == QPolynomial::from_i64_coeffs(&[2, 1]);
    outcome(
        bad.is_empty() && anchor,
        format!("{cases} words, length <= 8, d <= 2, exact; tau(s(e1)^4) = {fourth}; {} mismatches", bad.len()),
    )
}

fn inclusion_exclusion() -> Outcome {
    let mut cases = 0;
    let mut violations = 0;
    for d in 1..=2 {
        for n in 0..=5 {
            for k in 0..=n {
                let r = identities::inclusion_exclusion_verify(n, k, d, FaultInjection::default()).unwrap();
                cases += r.cases;
                violations += r.violations.len();
            }
        }
    }
    let plain = identities::claim_scan(8, 3, ClaimReading::PrimePlain, FaultInjection::default()).unwrap();
    let prime = identities::claim_scan(8, 3, ClaimReading::PrimePrime, FaultInjection::default()).unwrap();
    outcome(
        violations == 0 && plain.nonzero.is_empty() && plain.partitions > 0,
        format!(
            "{cases} words n <= 5, {violations} violations; claim (iota' + iota): {} partitions, {} nonzero; \
             (iota' + iota'): {} nonzero",
            plain.partitions,
            plain.nonzero.len(),
            prime.nonzero.len()
        ),
    )
}

fn two_mode() -> Outcome {
    let mut cases = 0;
    let mut violations = 0;
    for n in 0..=6 {
        let r = identities::two_mode_verify(n, 2).unwrap();
        cases += r.cases;
        violations += r.violations.len();
    }
    outcome(violations == 0, format!("{cases} (word, k, j) cases, n <= 6, d = 2, exact: {violations} violations"))
}

fn three_product() -> Outcome {
    let space = exact(2, 8);
    let words: Vec<Word> = words_up_to(2, 8);
    let mut cases = 0;
    let mut bad = Vec::new();
    for x in &words {
        for y in &words {
            if x.degree() + y.degree() > 8 {
                continue;
            }
            for z in &words {
                let total = x.degree() + y.degree() + z.degree();
                if total > 8 {
                    continue;
                }
                cases += 1;
                let (xv, yv, zv) = (FockVector::word(x.clone()), FockVector::word(y.clone()), FockVector::word(z.clone()));
                let formula = wick::three_wick_trace(&space, &xv, &yv, &zv).unwrap();
                // τ(W(ξ)W(η)W(θ)) = ⟨W(ξ)*Ω, W(η)θ⟩ with W(ξ)* = W(rev ξ)
                let oracle = if total % 2 == 1 {
                    QPolynomial::zero()
                } else {
                    let right = wick::wick_apply(&space, &yv, &zv).unwrap();
                    space.q_inner(&xv.reversed(), &right)
                };
                if formula != oracle {
                    bad.push(format!("({x}, {y}, {z})"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} triples, n+m+l <= 8, d = 2, exact: {} mismatches", bad.len()))
}

fn clt() -> Outcome {
    let space = exact(2, 3);
    let mut cases = 0;
    let mut bad = Vec::new();
    for w in words_up_to(2, 6) {
        let hs: Vec<Vec<QPolynomial>> = w.letters().iter().map(|&l| space.unit(l)).collect();
        let limit = wick::moment_pair_partitions(&space, &hs);
        for n in 1..=4 {
            cases += 1;
            let v = wick::clt_finite(&space, n, &hs).unwrap();
            if v != limit {
                bad.push(format!("{w}, N = {n}"));
            }
        }
    }
    for m in 1..=3 {
        let ws = space.enumerate_words(m).unwrap().to_vec();
        for f in &ws {
            for h in &ws {
                let fs: Vec<Vec<QPolynomial>> = f.letters().iter().map(|&l| space.unit(l)).collect();
                let hs: Vec<Vec<QPolynomial>> = h.letters().iter().map(|&l| space.unit(l)).collect();
                let inner = space.q_inner(&FockVector::word(f.clone()), &FockVector::word(h.clone()));
                for n in 1..=4usize {
                    cases += 1;
                    let r = wick::offdiag_wick_coefficient(&space, n, &fs, &hs).unwrap();
                    let falling: i64 = (0..m).map(|i| n as i64 - i as i64).product::<i64>().max(0);
                    let scale = qfock::scalars::rational(falling, (n as i64).pow(m as u32));
                    let expected = inner.scale(&scale);
                    if r.colored != expected || r.closed_form != expected {
                        bad.push(format!("{f} / {h}, N = {n}"));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{cases} cases, N in 1..=4, exact: {} mismatches", bad.len()))
}

fn dilation() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 1..=2 {
        for q in [-0.7, 0.0, 0.5] {
            let dbl = FockSpace::float(SpaceConfig::new(d, 2, 4), q).unwrap();
            let single = FockSpace::float(SpaceConfig::new(d, 1, 4), q).unwrap();
            for t in [0.1, 0.5] {
                worst = worst.max(dilation_deviation(&dbl, &single, t).unwrap());
            }
        }
    }
    outcome(worst < 1e-12, format!("max blockwise deviation {worst:.2e} (tol 1e-12), d <= 2, N = 4"))
}

fn phi_and_schatten() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut worst_dev: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for q in [-0.9, -0.5, 0.5, 0.9] {
        let dbl = FockSpace::float(SpaceConfig::new(2, 2, 3), q).unwrap();
        let single = FockSpace::float(SpaceConfig::new(2, 1, 3), q).unwrap();
        let (h, k) = ([0.8, -0.3], [0.4, 1.1]);
        worst_dev = worst_dev.max(phi_hk_check(&dbl, &single, &h, &k).unwrap().max_deviation);
        let phi = analysis::phi_hk_operator(&dbl, &single, &h, &k).unwrap();
        let inner: f64 = h[0] * k[0] + h[1] * k[1];
        for p in [1.0, 2.0, 3.5] {
            let norm = analysis::schatten_norm(&single, &phi, p).unwrap().norm;
            let closed = (0..=3).map(|n| q.abs().powf(p * n as f64) * 2f64.powi(n)).sum::<f64>().powf(1.0 / p) * inner.abs();
            worst_rel = worst_rel.max((norm - closed).abs() / closed);
        }
    }
    ok &= worst_dev < 1e-10 && worst_rel < 1e-10;
    for (q, d) in [(0.5f64, 2usize), (0.8, 3)] {
        let threshold = -(d as f64).ln() / q.abs().ln();
        let reported = analysis::schatten_threshold(q, d).unwrap();
        ok &= (reported - threshold).abs() < 1e-12;
        let above = analysis::schatten_term_ratio(q, d, 1.1 * threshold);
        let below = analysis::schatten_term_ratio(q, d, 0.9 * threshold);
        ok &= above < 1.0 && below > 1.0;
        let conv = analysis::schatten_partial_sums(q, d, 1.1 * threshold, 400);
        let div = analysis::schatten_partial_sums(q, d, 0.9 * threshold, 400);
        let tail = conv[400] - conv[399];
        ok &= tail < 1e-6 && div[400] > 1e3 * div[40];
        notes.push(format!("({q},{d}): p* = {threshold:.4}, ratios {above:.3}/{below:.3}"));
    }
    outcome(
        ok,
        format!(
            "phi deviation {worst_dev:.1e}, Schatten rel err {worst_rel:.1e} (tol 1e-10); {}",
            notes.join(", ")
        ),
    )
}

fn deformation() -> Outcome {
    let q = 0.5;
    let space = FockSpace::float(SpaceConfig::new(2, 2, 4), q).unwrap();
    let mut worst: f64 = 0.0;
    let mut identities_checked = 0;
    for t in [0.05, 0.2, 0.45] {
        let alpha = space.second_quantize(&space.rotation(t).unwrap()).unwrap();
        for n in 0..=4 {
            let words: Vec<Word> =
                space.enumerate_words(n).unwrap().iter().filter(|w| w.second_copy_count() == 0).cloned().collect();
            let images: Vec<FockVector<f64>> =
                words.iter().map(|w| space.apply(&alpha, &FockVector::word(w.clone())).unwrap()).collect();
            for kcut in 1..=n {
                let a = (-2.0 * t).exp();
                let weight: f64 = (kcut..=n).map(|m| binom(n, m) * a.powi((n - m) as i32) * (1.0 - a).powi(m as i32)).sum();
                let tails: Vec<FockVector<f64>> =
                    images.iter().map(|v| space.copy_count_projection(v, kcut, CountMode::AtLeast).unwrap()).collect();
                for (i, x) in words.iter().enumerate() {
                    for (j, y) in words.iter().enumerate() {
                        identities_checked += 1;
                        let (xv, yv) = (FockVector::word(x.clone()), FockVector::word(y.clone()));
                        let left = space.q_inner(&tails[i], &tails[j]);
                        let right = weight * space.q_inner(&xv, &yv);
                        let scale = space.q_norm(&xv) * space.q_norm(&yv);
                        worst = worst.max((left - right).abs() / scale);
                    }
                }
            }
        }
    }
    let mut constants = Vec::new();
    let mut finite = true;
    for kcut in 1..=2 {
        let grid: Vec<f64> = (1..=9).map(|i| 0.5f64.powi(kcut) * i as f64 / 10.0).collect();
        let report = deformation_scan(&space, kcut as usize, 4, &grid).unwrap();
        let dev = report.rows.iter().map(|r| r.matrix_deviation).fold(0.0, f64::max);
        finite &= report.all_finite && dev < 1e-10;
        constants.push(format!("C_{kcut} ~ {:.4}", report.max_ratio));
    }
    outcome(
        worst < 1e-10 && finite,
        format!(
            "{identities_checked} word pairs, max rel deviation {worst:.1e} (tol 1e-10); q = {q}, {}",
            constants.join(", ")
        ),
    )
}

fn gram_positivity() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for q in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        for d in 1..=3 {
            let space = FockSpace::float(SpaceConfig::new(d, 1, 5), q).unwrap();
            let mins = gram_min_eigenvalues(&space).unwrap();
            let m = mins.iter().copied().fold(f64::INFINITY, f64::min);
            ok &= m > 0.0;
            worst = worst.min(m);
            if q == 0.0 {
                for n in 0..=5 {
                    let g = space.gram_matrix(n).unwrap();
                    let dim = g.rows();
                    ok &= (0..dim).all(|i| (0..dim).all(|j| *g.get(i, j) == if i == j { 1.0 } else { 0.0 }));
                }
            }
        }
    }
    outcome(ok, format!("smallest eigenvalue {worst:.3e} over q in {{0, +-0.5, +-0.9}}, d <= 3, degree <= 5; q = 0 Gram is the identity"))
}

fn main() {
    // libtest arguments such as --nocapture are accepted and ignored
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("figure statistics", figures),
        ("iota' closed form", iota_closed_form),
        ("Wick axiom", wick_axiom),
        ("moment formula", moment_formula),
        ("inclusion-exclusion and claim", inclusion_exclusion),
        ("two-mode w^j equality", two_mode),
        ("three-product trace", three_product),
        ("CLT exactness", clt),
        ("dilation identity", dilation),
        ("diagonal Phi and Schatten", phi_and_schatten),
        ("deformation estimate", deformation),
        ("Gram positivity", gram_positivity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        if !o.passed {
            failed += 1;
        }
        println!("[{status}] {:>2}. {name}: {} [{:.2?}]", i + 1, o.detail, start.elapsed());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
