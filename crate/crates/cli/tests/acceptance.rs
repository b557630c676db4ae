//! Acceptance suite: one test per criterion, printing one pass/fail line.
//!
//! Criterion 5's middle clause (slope 13/10 at diagram depth 12 versus lap
//! horizon 20) is a known red: the depth-12 diagram of that renormalizable
//! slope has entropy log(golden)/2 = 0.240606 while the map's entropy is
//! log 1.3 = 0.262364, so no growth estimator at n_max = 20 can agree with
//! it within 0.02. The test states the facts and fails honestly.

use entromap_core::analysis::{self, BoundsParams};
use entromap_core::builtins::builtin_map;
use entromap_core::graphs::{
    bowen_empirical, check_convergence, count_closed, count_closed_bounded, gurevic_entropy,
    parry_measure, phi_decompose, spectral_entropy, ClosedPath, OrientedGraph, TaggedGraph,
};
use entromap_core::hofbauer::build_diagram;
use entromap_core::maps::{identity, logistic, tent, PiecewiseMonotoneMap};
use entromap_core::perturb::{
    certify_horseshoe, construct_perturbation, cr_distance, find_tangency,
    random_c2_perturbations, tangency_family, theoretical_chain, verify_certificate,
    PerturbationParams, TangencySearch,
};
use entromap_core::scalar::{Interval, Scalar};
use num_bigint::BigUint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::time::Instant;

const LN2: f64 = std::f64::consts::LN_2;
const CORPUS_SEED: u64 = 0x5eed_0401;

fn random_digraph_corpus(count: usize) -> Vec<OrientedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=6usize);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if rng.gen_bool(0.4) {
                    edges.push((a, b));
                }
            }
        }
        out.push(OrientedGraph::new(n, edges).unwrap());
    }
    out
}

/// Independent oracle: raw DFS over adjacency, visiting every closed path.
fn enumerate_closed_paths(
    graph: &OrientedGraph,
    u: usize,
    p: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    fn dfs(
        graph: &OrientedGraph,
        u: usize,
        remaining: usize,
        path: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let last = *path.last().unwrap();
        if remaining == 0 {
            if last == u {
                visit(path);
            }
            return;
        }
        for &w in graph.out(last) {
            path.push(w);
            dfs(graph, u, remaining - 1, path, visit);
            path.pop();
        }
    }
    let mut path = vec![u];
    dfs(graph, u, p, &mut path, visit);
}

fn max_return_len(path: &[usize]) -> usize {
    let u = path[0];
    let mut longest = 0;
    let mut start = 0;
    for (i, &v) in path.iter().enumerate().skip(1) {
        if v == u {
            longest = longest.max(i - start);
            start = i;
        }
    }
    longest
}

#[test]
fn acceptance_01_exact_path_count_oracle() {
    let t0 = Instant::now();
    let corpus = random_digraph_corpus(200);
    for (gi, graph) in corpus.iter().enumerate() {
        for u in 0..graph.vertex_count() {
            for p in 1..=10usize {
                let mut total = 0u64;
                let mut bounded = [0u64; 6];
                enumerate_closed_paths(graph, u, p, &mut |path| {
                    total += 1;
                    let longest = max_return_len(path);
                    for m in 1..=5 {
                        if longest <= m {
                            bounded[m] += 1;
                        }
                    }
                });
                assert_eq!(
                    count_closed(graph, u, p),
                    BigUint::from(total),
                    "graph {gi} u={u} p={p}"
                );
                for m in 1..=5usize {
                    assert_eq!(
                        count_closed_bounded(graph, u, p, m),
                        BigUint::from(bounded[m]),
                        "graph {gi} u={u} p={p} M={m}"
                    );
                }
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime {elapsed:.1}s exceeds 30s");
    println!("ACCEPTANCE 1 (exact path-count oracle, 200 graphs): PASS ({elapsed:.1}s)");
}

#[test]
fn acceptance_02_phi_injectivity() {
    let t0 = Instant::now();
    let corpus = random_digraph_corpus(200);
    let m = 3usize;
    for (gi, graph) in corpus.iter().enumerate() {
        for u in 0..graph.vertex_count() {
            let mut seen = HashSet::new();
            for p in 1..=10usize {
                let mut collision = None;
                enumerate_closed_paths(graph, u, p, &mut |path| {
                    let cp = ClosedPath::new(graph, path.to_vec()).unwrap();
                    let d = phi_decompose(&cp, u, m).unwrap();
                    let key = (
                        d.short.vertices().to_vec(),
                        d.long.vertices().to_vec(),
                        d.long_starts.iter().copied().collect::<Vec<_>>(),
                    );
                    if !seen.insert(key) {
                        collision = Some(path.to_vec());
                    }
                });
                assert!(
                    collision.is_none(),
                    "graph {gi} u={u} p={p}: collision on {:?}",
                    collision
                );
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "runtime {elapsed:.1}s exceeds 30s");
    println!("ACCEPTANCE 2 (return-decomposition injectivity): PASS ({elapsed:.1}s)");
}

#[test]
fn acceptance_03_gurevic_limit_vs_spectral_radius() {
    let golden = OrientedGraph::golden_mean();
    let est = gurevic_entropy(&golden, 0, 40).unwrap();
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let err = (est.value - phi.ln()).abs();
    assert!(err <= 0.01, "golden-mean error {err}");
    assert!((phi.ln() - 0.481212).abs() < 1e-6);

    let k3 = OrientedGraph::complete(3);
    let est3 = gurevic_entropy(&k3, 0, 40).unwrap();
    let err3 = (est3.value - 3.0_f64.ln()).abs();
    assert!(err3 <= 0.005, "complete-3 error {err3}");
    println!(
        "ACCEPTANCE 3 (growth limit vs spectral radius): PASS (golden err {err:.2e}, K3 err {err3:.2e})"
    );
}

#[test]
fn acceptance_04_periodic_orbit_equidistribution() {
    let golden = OrientedGraph::golden_mean();
    let emp = bowen_empirical(&golden, 24).unwrap();
    let parry = parry_measure(&golden).unwrap();
    let tv: f64 = emp
        .iter()
        .zip(&parry.vertex_probs)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0;
    assert!(tv <= 0.05, "total variation {tv}");

    for k in [3usize, 5, 8] {
        let cycle = OrientedGraph::cycle(k);
        let emp = bowen_empirical(&cycle, k).unwrap();
        for mass in emp {
            assert!((mass - 1.0 / k as f64).abs() <= 1e-12, "cycle {k}");
        }
    }
    println!("ACCEPTANCE 4 (periodic-orbit equidistribution): PASS (tv {tv:.2e})");
}

#[test]
fn acceptance_05_diagram_entropy_correctness() {
    let mut failures: Vec<String> = Vec::new();

    // full tent at depth 1
    let t2 = tent(Scalar::from_int(2)).unwrap();
    let p2 = t2.natural_partition().unwrap();
    let h1 = analysis::entropy_hofbauer(&t2, &p2, 1, 0).unwrap().estimate.value;
    if (h1 - 0.693147).abs() > 1e-6 {
        failures.push(format!("tent 2 at depth 1: {h1} vs 0.693147"));
    } else {
        println!("  clause: tent 2 depth 1 = {h1:.9} PASS");
    }

    // slope family at depth 12 versus lap horizon 20
    for (num, den) in [(13i64, 10i64), (3, 2), (9, 5)] {
        let m = tent(Scalar::ratio(num, den)).unwrap();
        let part = m.natural_partition().unwrap();
        let hof = analysis::entropy_hofbauer(&m, &part, 12, 0).unwrap();
        let lap = analysis::entropy_lap(&m, 20, 1 << 26).unwrap();
        let gap = (hof.estimate.value - lap.value).abs();
        if gap > 0.02 {
            failures.push(format!(
                "tent {num}/{den}: |diagram({:.6}) - lap({:.6})| = {gap:.4} > 0.02",
                hof.estimate.value, lap.value
            ));
            println!("  clause: tent {num}/{den} agreement FAIL (gap {gap:.4})");
        } else {
            println!("  clause: tent {num}/{den} agreement PASS (gap {gap:.4})");
        }
        // monotone truncation sequence
        let seq = &hof.estimate.sequence;
        for w in seq.windows(2) {
            if w[1].1 < w[0].1 - 1e-9 {
                failures.push(format!(
                    "tent {num}/{den}: h(D_N) drops at N={} ({} -> {})",
                    w[1].0, w[0].1, w[1].1
                ));
            }
        }
    }

    if failures.is_empty() {
        println!("ACCEPTANCE 5 (diagram entropy correctness): PASS");
    } else {
        println!("ACCEPTANCE 5 (diagram entropy correctness): FAIL");
        panic!(
            "clauses failed: {:?}. Known limitation for slope 13/10: it is \
             renormalizable, its depth-12 diagram is the golden-mean stage \
             (entropy ln(phi)/2 = 0.240606) while the map entropy is \
             ln(1.3) = 0.262364; the exact lap counts at n <= 20 put every \
             consistent growth estimate at or above 0.2755, so the 0.02 \
             tolerance cannot be met at these horizons (depth 28 or lap \
             horizon 40 both close the gap; see the convergence sequences).",
            failures
        );
    }
}

#[test]
fn acceptance_06_bound_arithmetic() {
    let t2 = tent(Scalar::from_int(2)).unwrap();
    let rep = analysis::bounds_report(&t2, 2.0, &BoundsParams::default()).unwrap();
    assert!((rep.h - 0.6931).abs() <= 1e-4, "h = {}", rep.h);
    assert!((rep.r_growth - 0.6931).abs() <= 1e-4, "R = {}", rep.r_growth);
    assert!((rep.yomdin_bound - 1.0397).abs() <= 1e-4, "yomdin = {}", rep.yomdin_bound);
    assert!(
        (rep.main_theorem_bound - 0.6931).abs() <= 1e-4,
        "main = {}",
        rep.main_theorem_bound
    );

    let suite: Vec<PiecewiseMonotoneMap> = vec![
        t2,
        tent(Scalar::ratio(3, 2)).unwrap(),
        tent(Scalar::ratio(9, 5)).unwrap(),
        identity(),
        logistic(Scalar::from_int(4)).unwrap(),
        tangency_family(3).unwrap(),
    ];
    for (i, map) in suite.iter().enumerate() {
        for r in [1.0, 2.0, 3.0] {
            let rep = analysis::bounds_report(map, r, &BoundsParams::default()).unwrap();
            assert!(
                rep.main_theorem_bound <= rep.yomdin_bound + 1e-12,
                "map {i} r={r}: main {} > yomdin {}",
                rep.main_theorem_bound,
                rep.yomdin_bound
            );
        }
    }
    println!("ACCEPTANCE 6 (bound arithmetic): PASS");
}

#[test]
fn acceptance_07_no_jump_under_small_perturbations() {
    let t0 = Instant::now();
    let t2 = tent(Scalar::from_int(2)).unwrap();
    let maps = random_c2_perturbations(&t2, 50, 0x0701, 0.01).unwrap();
    let mut worst = 0.0_f64;
    for (i, g) in maps.iter().enumerate() {
        let d = cr_distance(&t2, g, 2.0, 4000).unwrap();
        assert!(d <= 0.01, "perturbation {i} too far: {d}");
        let h = analysis::entropy_lap(g, 14, 1 << 24).unwrap().value;
        worst = worst.max(h);
        assert!(
            h <= 0.6931 + 0.05,
            "perturbation {i} jumped: entropy {h}"
        );
    }
    let elapsed = t0.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s exceeds 60s");
    println!(
        "ACCEPTANCE 7 (no entropy jump across 50 small perturbations): PASS (max {worst:.5}, {elapsed:.1}s)"
    );
}

#[test]
fn acceptance_08_jump_construction() {
    // formula clause: monotone chain exceeding 90% of the limit rate
    let lambda = 4.0_f64;
    let target = lambda.ln() / 3.0;
    let mut prev = f64::NEG_INFINITY;
    for l in 1..=300u32 {
        let v = theoretical_chain(0.01, lambda, 3.0, 1.0, l);
        assert!(v >= prev - 1e-15, "chain not monotone at l={l}");
        prev = v;
    }
    let v300 = theoretical_chain(0.01, lambda, 3.0, 1.0, 300);
    assert!(v300 > 0.9 * target, "chain at 300 = {v300} vs 0.9*target {}", 0.9 * target);

    // certification clause at l = 15
    let f = tangency_family(3).unwrap();
    let t = find_tangency(&f, &TangencySearch::default())
        .unwrap()
        .expect("family tangency");
    assert_eq!(t.multiplier.to_f64(), 4.0);
    let params = PerturbationParams {
        delta: 0.1,
        l: 15,
        amp_const: 25.6,
        r: 3.0,
    };
    let g = construct_perturbation(&f, &t, &params).unwrap();
    let window = Interval::new(Scalar::Float(0.6), Scalar::Float(0.8));
    let cert = certify_horseshoe(&g, 15, &window, None).unwrap();
    assert!(
        cert.entropy_bound >= 0.15,
        "certified entropy {} below 0.15 ({} branches)",
        cert.entropy_bound,
        cert.branch_count()
    );
    // independent re-verification of every covering claim
    assert!(verify_certificate(&g, &cert, 2).unwrap());
    println!(
        "ACCEPTANCE 8 (jump construction): PASS (chain(300) {v300:.4}, certified {:.4} with {} branches)",
        cert.entropy_bound,
        cert.branch_count()
    );
}

#[test]
fn acceptance_09_edge_growth_law() {
    let mut checked = 0usize;
    let mut suite: Vec<PiecewiseMonotoneMap> = vec![logistic(Scalar::from_int(4)).unwrap()];
    for (num, den) in [(2i64, 1i64), (13, 10), (3, 2), (9, 5)] {
        suite.push(tent(Scalar::ratio(num, den)).unwrap());
    }
    for map in &suite {
        let part = map.natural_partition().unwrap();
        let norm = map.sup_deriv_norm(1, 1 << 16).unwrap();
        for depth in [1usize, 6, 12] {
            let d = build_diagram(map, &part, depth).unwrap();
            for &(a, b) in &d.edges {
                let la = d.vertices[a].length();
                let lb = d.vertices[b].length();
                assert!(
                    lb.to_f64() <= la.to_f64() * norm.to_f64() * (1.0 + 1e-12),
                    "{} N={depth}: edge ({a},{b}) violates the growth law",
                    map.name()
                );
                checked += 1;
            }
        }
    }
    println!("ACCEPTANCE 9 (edge growth law): PASS ({checked} edges)");
}

#[test]
fn acceptance_10_convergence_checker() {
    let golden = OrientedGraph::golden_mean();
    let tag_all = |g: &OrientedGraph| TaggedGraph {
        graph: g.clone(),
        tagged: (0..g.vertex_count()).collect(),
    };

    // constant sequence with the identity matching
    let seq = vec![tag_all(&golden); 3];
    let matching: Vec<Vec<usize>> = seq.iter().map(|t| t.tagged.clone()).collect();
    let rep = check_convergence(&seq, &golden, Some(&matching), 4, 12).unwrap();
    assert!(rep.ok, "constant sequence: {:?}", rep.violations);

    // subgraph sequence, matching searched
    let sub = OrientedGraph::new(2, [(0, 0), (0, 1)]).unwrap();
    let rep = check_convergence(&[tag_all(&sub)], &golden, None, 4, 12).unwrap();
    assert!(rep.ok, "subgraph sequence: {:?}", rep.violations);

    // planted extra 2-loop at b, identity matching: violation at p = 2
    let extra = OrientedGraph::new(3, [(0, 0), (0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
    let seq = vec![TaggedGraph {
        graph: extra,
        tagged: vec![1],
    }];
    let rep = check_convergence(&seq, &golden, Some(&[vec![1]]), 4, 12).unwrap();
    assert!(!rep.ok);
    assert_eq!(rep.violations.len(), 1);
    assert_eq!(rep.violations[0].p, 2, "violation reported at the loop length");
    println!("ACCEPTANCE 10 (convergence checker fixtures): PASS");
}

#[test]
fn acceptance_11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_entromap");
    let dir = std::env::temp_dir().join(format!("entromap-acc11-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();

    let golden_path = dir.join("golden.json");
    std::fs::write(
        &golden_path,
        r#"{"vertices":[{"id":0,"label":"a"},{"id":1,"label":"b"}],"edges":[[0,0],[0,1],[1,0]]}"#,
    )
    .unwrap();

    let runs: Vec<Vec<String>> = vec![
        vec![
            "entropy".into(),
            "--map".into(),
            "builtin:tent:1.5".into(),
            "--depth".into(),
            "6".into(),
            "--nmax".into(),
            "10".into(),
        ],
        vec![
            "diagram".into(),
            "--map".into(),
            "builtin:tent:1.8".into(),
            "--depth".into(),
            "5".into(),
        ],
        vec![
            "markov".into(),
            "counts".into(),
            "--graph".into(),
            golden_path.display().to_string(),
            "--vertex".into(),
            "a".into(),
            "--pmax".into(),
            "12".into(),
        ],
    ];
    let artifacts = [
        vec!["bounds.csv", "convergence_lap.csv", "convergence_hofbauer.csv"],
        vec!["diagram.json"],
        vec!["counts.csv"],
    ];
    for (run, files) in runs.iter().zip(&artifacts) {
        let mut outputs: Vec<Vec<(String, Vec<u8>)>> = Vec::new();
        for attempt in 0..2 {
            let out = dir.join(format!("run{attempt}"));
            let status = std::process::Command::new(bin)
                .args(run)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            assert!(
                status.status.success(),
                "command {:?} failed: {}",
                run,
                String::from_utf8_lossy(&status.stderr)
            );
            outputs.push(
                files
                    .iter()
                    .map(|f| (f.to_string(), std::fs::read(out.join(f)).unwrap()))
                    .collect(),
            );
        }
        for ((name, a), (_, b)) in outputs[0].iter().zip(&outputs[1]) {
            assert_eq!(a, b, "artifact {name} differs between identical runs");
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("ACCEPTANCE 11 (byte-identical reruns): PASS");
}
