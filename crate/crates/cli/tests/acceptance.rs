//! Acceptance gate: ten pinned criteria covering attractor convergence,
//! the six-way classifier, remetrization contracts, coding maps and
//! output determinism. Each test prints a single PASS line (visible
//! with --nocapture) and fails loudly otherwise.

use std::process::Command;
use std::time::Instant;

use hutchfrac_core::corpus::{edelstein_exp_with_box, load_example, ALL_NAMES};
use hutchfrac_core::hutchinson::{
    attractor_deterministic, attractor_deterministic_with, chaos_game, coding_map,
    hutchinson_step, SymbolStream,
};
use hutchfrac_core::metrics::{hausdorff, pd_eval};
use hutchfrac_core::oscillation::{classify, Certificate};
use hutchfrac_core::remetrize::{
    build_banach_power, build_banach_power_unchecked, build_remetrized, verify_banach_under,
    verify_edelstein_under, verify_krasnoselskii_under, AlphaSequence,
};
use hutchfrac_core::rng::Rng;
use hutchfrac_core::spaces::eval_word;
use hutchfrac_core::{
    Cloud, Condition, IfsSystem, Point, PseudometricDescriptor, Verdict, Word,
};

fn pass(line: &str) {
    println!("PASS {line}");
}

fn stop_metric(entry: &hutchfrac_core::corpus::CorpusEntry) -> PseudometricDescriptor {
    PseudometricDescriptor::MaxOf(entry.multimetric.members().to_vec())
}

#[test]
fn criterion_01_banach_attractor_convergence_rates() {
    for (name, ratio, tol) in [("cantor", 1.0f64 / 3.0, 1e-6), ("sierpinski", 0.5, 2e-2)] {
        let start = Instant::now();
        let entry = load_example(name).unwrap();
        let trace = attractor_deterministic_with(
            &entry.system,
            &entry.seed_cloud,
            &stop_metric(&entry),
            tol,
            30,
            None,
        )
        .unwrap();
        assert!(trace.converged, "{name}: no convergence");
        let r0 = trace.residuals[0];
        for (n, &r) in trace.residuals.iter().enumerate().take(21) {
            let bound = ratio.powi(n as i32) * r0 * 1.01;
            assert!(
                r <= bound,
                "{name}: residual_{n} = {r} exceeds {bound}"
            );
        }
        let secs = start.elapsed().as_secs_f64();
        assert!(secs < 30.0, "{name}: run took {secs:.1}s, budget 30s");
    }
    pass("criterion 1: residual_n <= ratio^n * residual_0 * 1.01 (cantor 1/3, sierpinski 1/2), each run < 30s");
}

#[test]
fn criterion_02_attractor_invariance() {
    for name in ALL_NAMES {
        let entry = load_example(name).unwrap();
        let banach_everywhere = entry
            .expected
            .iter()
            .all(|e| e.verdicts[0] == Verdict::Verified);
        if !banach_everywhere || !entry.system.self_mapping_declared() {
            continue;
        }
        let tol = if name == "sierpinski" { 1e-2 } else { 1e-3 };
        let d = stop_metric(&entry);
        let trace =
            attractor_deterministic(&entry.system, &entry.seed_cloud, &d, tol, 64).unwrap();
        assert!(trace.converged, "{name}: no convergence");
        let image = hutchinson_step(&entry.system, &trace.final_cloud).unwrap();
        for member in entry.multimetric.members() {
            let dh = hausdorff(member, &image, &trace.final_cloud).unwrap();
            assert!(
                dh <= 2.0 * tol,
                "{name}: d_H(F(A), A) = {dh} > 2 * {tol}"
            );
        }
    }
    pass("criterion 2: d_H(F(A), A) <= 2*tol for every self-mapping Banach fixture");
}

#[test]
fn criterion_03_two_map_interval_counterexample() {
    let entry = load_example("fg_interval").unwrap();
    let report = classify(&entry.system, &entry.multimetric, &entry.classify_config).unwrap();
    let finding = report.per_metric[0].finding(Condition::Eventual);
    assert_eq!(finding.verdict, Verdict::Refuted);
    let w = finding.witness.as_ref().expect("witness");
    let word = w.word.as_ref().expect("witness word");
    assert!(
        !word.is_empty() && word.letters().chunks(2).all(|c| c == [0, 1]),
        "witness word {word} is not of the alternating form"
    );
    assert_eq!((w.pair.0.coord(0), w.pair.1.coord(0)), (0.0, 2.0));
    assert_eq!((w.images.0.coord(0), w.images.1.coord(0)), (0.0, 1.0));
    let dist = pd_eval(&PseudometricDescriptor::Euclidean, &w.images.0, &w.images.1).unwrap();
    assert_eq!(dist, 1.0);
    // each member map on its own has a constant second iterate, so the
    // singleton systems are eventually contracting
    for map in entry.system.maps() {
        let single = IfsSystem::new(
            vec![map.clone()],
            entry.system.domain().clone(),
            true,
        )
        .unwrap();
        let rep = classify(&single, &entry.multimetric, &entry.classify_config).unwrap();
        let f = rep.per_metric[0].finding(Condition::Eventual);
        assert_eq!(f.verdict, Verdict::Verified);
        assert_eq!(f.certificate, Some(Certificate::ConstantIterate { depth: 2 }));
    }
    pass("criterion 3: {f,g} refutes eventual with word (f,g)^n and pair (0,2) -> (0,1) at distance 1; singletons verify via constant second iterate");
}

#[test]
fn criterion_04_edelstein_without_attractor() {
    for b in [10.0, 20.0, 40.0] {
        let entry = edelstein_exp_with_box(b).unwrap();
        let report =
            classify(&entry.system, &entry.multimetric, &entry.classify_config).unwrap();
        assert_eq!(
            report.per_metric[0].verdict(Condition::Edelstein),
            Verdict::Verified,
            "box [0, {b}]"
        );
    }
    let mut x = 0.0f64;
    for _ in 0..1000 {
        x += (-x).exp();
    }
    assert!((6.5..=7.5).contains(&x), "f^1000(0) = {x}");
    for _ in 1000..1_000_000 {
        x += (-x).exp();
    }
    assert!(x > 13.0, "f^1e6(0) = {x}");
    pass("criterion 4: edelstein verified on [0,B] for B in {10,20,40}; orbit f^1000(0) in [6.5,7.5], f^1e6(0) > 13");
}

#[test]
fn criterion_05_remetrization_contract() {
    let start = Instant::now();
    let entry = load_example("sierpinski").unwrap();
    let rm = build_remetrized(
        &entry.system,
        PseudometricDescriptor::Euclidean,
        AlphaSequence::TwoMinusHalfPow,
        entry.invariant_cloud.clone(),
        1e-3,
        32,
    )
    .unwrap();
    assert_eq!(rm.depth(), 12, "eps 1e-3 must select depth 12");
    let diam = 2f64.sqrt();
    let mut rng = Rng::new(0);
    let dom = entry.system.domain();
    let sample = |rng: &mut Rng| {
        Point::new(
            (0..2)
                .map(|i| {
                    dom.lo().coord(i) + rng.unit_f64() * (dom.hi().coord(i) - dom.lo().coord(i))
                })
                .collect(),
        )
        .unwrap()
    };
    for _ in 0..500 {
        let (x, y) = (sample(&mut rng), sample(&mut rng));
        let base = pd_eval(&PseudometricDescriptor::Euclidean, &x, &y).unwrap();
        let v = rm.eval(&x, &y).value;
        assert!(v + 1e-12 >= base, "rhat {v} below base {base}");
        assert!(v <= 2.0 * diam + 1e-3 + 1e-9, "rhat {v} above 2*diam+eps");
    }
    let ed = verify_edelstein_under(&rm, 500, 1).unwrap();
    assert!(ed.violations.is_empty(), "{} violations", ed.violations.len());
    let kr = verify_krasnoselskii_under(&rm, 0.01, 3.0, 500, 2).unwrap();
    assert!(kr.sup_ratio < 1.0, "sup ratio {}", kr.sup_ratio);
    assert!(kr.passed);
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 120.0, "took {secs:.1}s, budget 120s");
    pass("criterion 5: sierpinski remetrization depth 12, base <= rhat <= 2*diam+eps on 500 pairs, 0 edelstein violations, krasnoselskii sup ratio < 1, < 120s");
}

#[test]
fn criterion_06_banach_power_contract() {
    let entry = load_example("swap_halve").unwrap();
    let bp = build_banach_power(
        &entry.system,
        PseudometricDescriptor::SupNorm,
        2,
        1.2,
        256,
    )
    .unwrap();
    assert!((bp.lambda() - 0.5).abs() < 1e-12);
    let check = verify_banach_under(&bp, 500, 3).unwrap();
    assert!(check.violations.is_empty());
    assert!(
        check.max_ratio <= 1.0 / 1.2 + 1e-6,
        "max ratio {}",
        check.max_ratio
    );
    // negative control: forcing a = 1.5 (so a^2 * lambda > 1) must
    // produce observable expansion
    let forced = build_banach_power_unchecked(
        &entry.system,
        PseudometricDescriptor::SupNorm,
        2,
        1.5,
        0.5,
        12,
    );
    let bad = verify_banach_under(&forced, 500, 3).unwrap();
    assert!(!bad.violations.is_empty(), "negative control found no violation");
    pass("criterion 6: swap_halve banach-power (m=2, lambda=0.5, a=1.2) max ratio <= 1/1.2 + 1e-6 on 500 pairs; a=1.5 control violates");
}

#[test]
fn criterion_07_hausdorff_non_admissibility() {
    let h = 0.01;
    let n = 101;
    let mut square = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            square.push(Point::new(vec![i as f64 * h, j as f64 * h]).unwrap());
        }
    }
    let diagonal: Vec<Point> = (0..n)
        .map(|i| Point::new(vec![i as f64 * h, i as f64 * h]).unwrap())
        .collect();
    let square = Cloud::new(square, 0.0).unwrap();
    let diagonal = Cloud::new(diagonal, 0.0).unwrap();
    let d1 = hausdorff(&PseudometricDescriptor::Coordinate(0), &square, &diagonal).unwrap();
    let d2 = hausdorff(&PseudometricDescriptor::Coordinate(1), &square, &diagonal).unwrap();
    let de = hausdorff(&PseudometricDescriptor::Euclidean, &square, &diagonal).unwrap();
    assert!(d1 <= h, "d_1,H = {d1}");
    assert!(d2 <= h, "d_2,H = {d2}");
    assert!((0.70..=0.7072).contains(&de), "euclidean d_H = {de}");
    pass("criterion 7: coordinate Hausdorff distances <= 0.01 while euclidean d_H in [0.70, 0.7072]");
}

#[test]
fn criterion_08_implication_chain_consistency() {
    for name in ALL_NAMES {
        let entry = load_example(name).unwrap();
        let report =
            classify(&entry.system, &entry.multimetric, &entry.classify_config).unwrap();
        assert!(report.chain_consistent(), "{name}: inconsistent chain");
    }
    pass("criterion 8: every corpus report is implication-chain consistent");
}

#[test]
fn criterion_09_coding_map_matches_word_oracle() {
    let entry = load_example("cantor").unwrap();
    let ifs = &entry.system;
    let x0 = Point::scalar(0.5);
    let mut rng = Rng::new(9);
    for _ in 0..64 {
        let pre: Vec<usize> = (0..rng.index(5)).map(|_| rng.index(2)).collect();
        let per: Vec<usize> = (0..1 + rng.index(4)).map(|_| rng.index(2)).collect();
        let stream = SymbolStream::new(Word::new(pre), Word::new(per)).unwrap();
        let coded = coding_map(ifs, &stream, &x0, &entry.multimetric, 1e-18, 200).unwrap();
        let prefix: Vec<usize> = (0..40).map(|i| stream.letter(i)).collect();
        let oracle = eval_word(ifs, &Word::new(prefix), &x0).unwrap();
        let gap = (coded.point.coord(0) - oracle.coord(0)).abs();
        // 3^-38 is smaller than one ulp of a point in [0, 1], so the
        // bound carries an explicit rounding term
        let bound = 3f64.powi(-38) + 4.0 * f64::EPSILON;
        assert!(gap <= bound, "gap {gap} above 3^-38 plus rounding");
    }
    for (letter, fixed) in [(0usize, 0.0f64), (1, 1.0)] {
        let coded = coding_map(
            ifs,
            &SymbolStream::constant(letter),
            &x0,
            &entry.multimetric,
            1e-18,
            200,
        )
        .unwrap();
        assert!(
            (coded.point.coord(0) - fixed).abs() <= 1e-12,
            "constant stream {letter}: {} vs {fixed}",
            coded.point.coord(0)
        );
    }
    pass("criterion 9: 64 eventually-periodic streams within 3^-38 of depth-40 words; constant streams hit fixed points to 1e-12");
}

#[test]
fn criterion_10_byte_identical_outputs() {
    let dir = std::env::temp_dir().join(format!("hutchfrac-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("sierpinski.json");
    let status = Command::new(env!("CARGO_BIN_EXE_hutchfrac"))
        .args(["corpus", "export", "sierpinski", "--out"])
        .arg(&config)
        .status()
        .unwrap();
    assert!(status.success());
    let run = |tag: &str, algo: &str| -> (Vec<u8>, Vec<u8>) {
        let csv = dir.join(format!("{tag}.csv"));
        let ppm = dir.join(format!("{tag}.ppm"));
        let out = Command::new(env!("CARGO_BIN_EXE_hutchfrac"))
            .args([
                "attractor",
                "--seed",
                "7",
                "--tol",
                "2e-2",
                "--algorithm",
                algo,
                "--iterations",
                "20000",
                "--width",
                "128",
                "--height",
                "128",
                "--out-csv",
            ])
            .arg(&csv)
            .arg("--render-ppm")
            .arg(&ppm)
            .arg(&config)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{tag} run failed");
        (std::fs::read(&csv).unwrap(), std::fs::read(&ppm).unwrap())
    };
    for algo in ["deterministic", "chaos"] {
        let a = run(&format!("{algo}-a"), algo);
        let b = run(&format!("{algo}-b"), algo);
        assert_eq!(a.0, b.0, "{algo}: CSV outputs differ");
        assert_eq!(a.1, b.1, "{algo}: PPM outputs differ");
        assert!(!a.0.is_empty() && !a.1.is_empty());
    }
    // the library-level chaos game is deterministic in the seed too
    let entry = load_example("sierpinski").unwrap();
    let start = entry.seed_cloud.points()[0].clone();
    let c1 = chaos_game(&entry.system, &start, 20000, 100, 7).unwrap();
    let c2 = chaos_game(&entry.system, &start, 20000, 100, 7).unwrap();
    assert_eq!(c1.points(), c2.points());
    pass("criterion 10: repeated deterministic and chaos-game runs with identical seeds give byte-identical CSV/PPM");
}
