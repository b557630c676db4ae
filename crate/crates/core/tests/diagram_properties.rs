//! Diagram-level invariants over map families: the edge growth law, depth
//! growth, truncation monotonicity, the steep-branch generation bound, and
//! the uniformity bound across a converging family.

use entromap_core::graphs::{check_convergence, OrientedGraph, TaggedGraph};
use entromap_core::hofbauer::{build_diagram, in_e_nk, partition_subset_pm};
use entromap_core::maps::tent;
use entromap_core::scalar::Scalar;

fn tent_map(p: i64, q: i64) -> entromap_core::maps::PiecewiseMonotoneMap {
    tent(Scalar::ratio(p, q)).unwrap()
}

#[test]
fn edge_growth_law_holds_on_every_edge() {
    for (p, q) in [(2i64, 1i64), (13, 10), (3, 2), (9, 5), (17, 10)] {
        let m = tent_map(p, q);
        let part = m.natural_partition().unwrap();
        let norm = m.sup_deriv_norm(1, 1 << 16).unwrap();
        for depth in [1usize, 4, 8] {
            let d = build_diagram(&m, &part, depth).unwrap();
            for &(a, b) in &d.edges {
                let la = d.vertices[a].length();
                let lb = d.vertices[b].length();
                assert!(
                    lb <= la.clone() * norm.clone(),
                    "edge growth violated: slope {p}/{q} N={depth} edge ({a},{b}): {} > {} * {}",
                    lb.to_f64(),
                    norm.to_f64(),
                    la.to_f64()
                );
            }
        }
    }
}

#[test]
fn depth_grows_by_at_most_one_along_edges() {
    let m = tent_map(9, 5);
    let part = m.natural_partition().unwrap();
    let d = build_diagram(&m, &part, 10).unwrap();
    for &(a, b) in &d.edges {
        assert!(d.vertices[b].depth <= d.vertices[a].depth + 1);
    }
}

#[test]
fn truncations_nest_as_vertex_sets() {
    let m = tent_map(3, 2);
    let part = m.natural_partition().unwrap();
    let mut previous: Vec<(usize, (f64, f64))> = Vec::new();
    for depth in 1..=10 {
        let d = build_diagram(&m, &part, depth).unwrap();
        let current: Vec<(usize, (f64, f64))> = d
            .vertices
            .iter()
            .map(|v| (v.base_letter, v.image_interval.to_f64_pair()))
            .collect();
        for old in &previous {
            assert!(
                current.iter().any(|c| {
                    c.0 == old.0
                        && (c.1 .0 - old.1 .0).abs() < 1e-12
                        && (c.1 .1 - old.1 .1).abs() < 1e-12
                }),
                "vertex {:?} lost at depth {depth}",
                old
            );
        }
        previous = current;
    }
}

#[test]
fn steep_vertices_are_generated_by_steep_branches() {
    // every vertex of D_N with L >= 1/K has all its letters in P(m) for
    // m > K * max(1, ||f'||)^N
    for (p, q) in [(3i64, 2i64), (9, 5)] {
        let m = tent_map(p, q);
        let part = m.natural_partition().unwrap();
        let n = 6usize;
        let k = 4u32;
        let norm = m.sup_deriv_norm(1, 1 << 16).unwrap().to_f64().max(1.0);
        let m_threshold = (k as f64 * norm.powi(n as i32)).ceil() as u32 + 1;
        let pm = partition_subset_pm(&m, &part, m_threshold);
        let d = build_diagram(&m, &part, n).unwrap();
        for v in &d.vertices {
            if in_e_nk(v, n, k) {
                for &letter in &v.significative_word.0 {
                    assert!(
                        pm.contains(&letter),
                        "letter {letter} of a steep vertex escapes P({m_threshold})"
                    );
                }
            }
        }
    }
}

#[test]
fn uniformity_bound_across_a_converging_family() {
    // tent slopes 3/2 + 1/j converge to 3/2; the tagged-vertex counts stay
    // bounded by the word-count bound over the steep branches
    let n = 5usize;
    let k = 3u32;
    let mut tagged_counts = Vec::new();
    for j in [10i64, 20, 40, 80] {
        let m = tent(Scalar::ratio(3 * j + 2, 2 * j)).unwrap();
        let part = m.natural_partition().unwrap();
        let d = build_diagram(&m, &part, n).unwrap();
        let count = d.vertices.iter().filter(|v| in_e_nk(v, n, k)).count();
        let norm = m.sup_deriv_norm(1, 1 << 16).unwrap().to_f64().max(1.0);
        let m_threshold = (k as f64 * norm.powi(n as i32)).ceil() as u32 + 1;
        let pm_size = partition_subset_pm(&m, &part, m_threshold).len();
        // words of length <= n over the steep alphabet
        let bound: usize = (1..=n).map(|l| pm_size.pow(l as u32)).sum();
        assert!(count <= bound, "j={j}: {count} > {bound}");
        tagged_counts.push(count);
    }
    let sup = tagged_counts.iter().copied().max().unwrap();
    assert!(sup < usize::MAX);
    assert!(sup <= 62, "uniformity bound unexpectedly large: {sup}");
}

#[test]
fn diagram_sequences_converge_to_their_limit_diagram() {
    // constant family: D_N(tent 9/5) against itself through the checker
    let m = tent_map(9, 5);
    let part = m.natural_partition().unwrap();
    let d = build_diagram(&m, &part, 6).unwrap();
    let graph = OrientedGraph::from(&d);
    let tagged: Vec<usize> = (0..d.vertex_count())
        .filter(|&v| in_e_nk(&d.vertices[v], 6, 2))
        .collect();
    let seq = vec![
        TaggedGraph {
            graph: graph.clone(),
            tagged: tagged.clone(),
        };
        3
    ];
    let matching: Vec<Vec<usize>> = seq.iter().map(|t| t.tagged.clone()).collect();
    let report = check_convergence(&seq, &graph, Some(&matching), 4, 10).unwrap();
    assert!(report.ok, "violations: {:?}", report.violations);
}
