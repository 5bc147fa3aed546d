use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanner_core::arrangement::{build_arrangement, min_depth_in_lens};
use spanner_core::geometry::Disk;
use spanner_core::connector::monte_carlo_connector;
use spanner_core::generate::{generate, Generator};
use spanner_core::graph::{components_after_attack, intersection_graph, Edge};
use spanner_core::rng::{substream, Purpose};
use spanner_core::shallow_edges;
use spanner_core::sparsifier::{build_spanner, compute_alpha, round_count, round_edges, Preset, Provenance, SpannerConfig};

/// Small constants so that rounds actually run at test sizes.
fn small(eps: f64, seed: u64) -> SpannerConfig {
    SpannerConfig { eps, c_alpha: 1.0, c_exp_size: 1.0, c_exp_rep: 13.0, seed, preset: Preset::Custom }
}

fn without_timing(report: &str) -> String {
    report.lines().filter(|l| !l.starts_with("timing.")).collect::<Vec<_>>().join("\n")
}

#[test]
fn calibration_build_is_sandwiched() {
    let inst = generate(Generator::UNIFORM, 200, 21).unwrap();
    let cfg = SpannerConfig::calibration(0.5, 4);
    let (spanner, report) = build_spanner(&inst, &cfg).unwrap();
    let full = intersection_graph(&inst);
    let g = spanner.graph();
    assert!(g.is_subgraph_of(&full));
    for e in shallow_edges(inst.disks(), report.alpha).unwrap() {
        assert!(g.contains_edge(e.pair.0, e.pair.1));
    }
}

#[test]
fn rounds_add_only_intersecting_pairs() {
    for seed in 0..4 {
        let inst = generate(Generator::UNIFORM, 200, 40 + seed).unwrap();
        let cfg = small(0.5, seed);
        let (spanner, report) = build_spanner(&inst, &cfg).unwrap();
        assert!(report.alpha < 200);
        assert_eq!(report.rounds.len(), round_count(200, report.alpha));
        for (k, r) in report.rounds.iter().enumerate() {
            assert_eq!(r.alpha_i, report.alpha << k);
        }
        let full = intersection_graph(&inst);
        let g = spanner.graph();
        assert!(g.is_subgraph_of(&full));
        let base: BTreeSet<Edge> = shallow_edges(inst.disks(), report.alpha).unwrap().into_iter().map(|e| e.pair).collect();
        for &(e, p) in spanner.edges() {
            assert_eq!(p == Provenance::Base, base.contains(&e));
        }
        assert_eq!(report.total_edges, report.base_edges + report.rounds.iter().map(|r| r.edges_added).sum::<usize>());
        let empty = BTreeSet::new();
        assert_eq!(
            components_after_attack(&g, &empty).partition(),
            components_after_attack(&full, &empty).partition(),
            "seed {seed}"
        );
    }
}

#[test]
fn build_is_deterministic_across_thread_counts() {
    let inst = generate(Generator::Clustered, 250, 8).unwrap();
    let cfg = small(0.5, 99);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| build_spanner(&inst, &cfg).unwrap())
    };
    let (s1, r1) = run(1);
    let (s4, r4) = run(4);
    assert_eq!(s1, s4);
    assert_eq!(without_timing(&r1.to_text()), without_timing(&r4.to_text()));
    let (s1b, _) = run(1);
    assert_eq!(s1, s1b);
}

#[test]
fn round_replays_from_substream() {
    let inst = generate(Generator::UNIFORM, 120, 5).unwrap();
    let full = intersection_graph(&inst);
    let alpha = 130;
    let seed = 17;
    let out = round_edges(&inst, 1, alpha, 1, seed).unwrap();

    let mut rng = substream(seed, Purpose::Coloring, 1, 1);
    let colors: Vec<u32> = (0..inst.len()).map(|_| rng.gen_range(1..=alpha as u32)).collect();
    let want: BTreeSet<Edge> = full
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| {
            let (x, y) = (colors[a].min(colors[b]), colors[a].max(colors[b]));
            y == x + 1 || (x == 1 && y == alpha as u32)
        })
        .collect();
    let got: BTreeSet<Edge> = out.edges.iter().map(|e| e.0).collect();
    assert_eq!(got, want);
    for (e, p) in &out.edges {
        let Provenance::Layer { round, repetition, color } = *p else { panic!("round edge tagged base") };
        assert_eq!((round, repetition), (1, 1));
        let (x, y) = (colors[e.0], colors[e.1]);
        assert!(color == x.max(y) || (color == 1 && x.max(y) == alpha as u32));
    }
    assert_eq!(out.report.heavy_unions, 0);
    assert_eq!(out.report.ignored_faces(), 0);
}

#[test]
fn shallow_round_stays_inside_shallow_edges() {
    let inst = generate(Generator::UNIFORM, 80, 6).unwrap();
    let arr = build_arrangement(inst.disks(), None).unwrap();
    let alpha = arr.max_depth();
    let shallow: BTreeSet<Edge> = shallow_edges(inst.disks(), alpha).unwrap().into_iter().map(|e| e.pair).collect();
    let out = round_edges(&inst, 2, alpha, 5, 3).unwrap();
    assert!(out.edges.iter().all(|(e, _)| shallow.contains(e)));
}

#[test]
fn heavy_unions_are_resolved_by_bipartite_arrangements() {
    // Eight colors over a deep stack push class unions above alpha = 2.
    let inst = generate(Generator::Stacked, 40, 2).unwrap();
    let (alpha, round, seed) = (2usize, 3usize, 11u64);
    let out = round_edges(&inst, round, alpha, 3, seed).unwrap();
    assert!(out.report.heavy_unions > 0);
    assert!(out.report.sampled_faces > 0);
    assert!(out.report.ignored_faces() > 0);
    let xi = (alpha << (round - 1)) as u32;
    let colorings: Vec<Vec<u32>> = (1..=3)
        .map(|j| {
            let mut rng = substream(seed, Purpose::Coloring, round as u64, j);
            (0..inst.len()).map(|_| rng.gen_range(1..=xi)).collect()
        })
        .collect();
    for (e, p) in &out.edges {
        let Provenance::Layer { repetition, color, .. } = *p else { panic!("round edge tagged base") };
        let colors = &colorings[repetition - 1];
        let prev = if color == 1 { xi } else { color - 1 };
        let union: Vec<Disk> =
            inst.disks().iter().copied().filter(|d| colors[d.id] == color || colors[d.id] == prev).collect();
        let (a, b) = (&inst.disks()[e.0], &inst.disks()[e.1]);
        assert!(min_depth_in_lens(a, b, &union).unwrap().0 <= alpha);
    }
}

#[test]
fn stacked_instances_never_ignore_faces() {
    for seed in 0..5 {
        let inst = generate(Generator::Stacked, 150, seed).unwrap();
        let cfg = small(0.5, seed);
        let (_, report) = build_spanner(&inst, &cfg).unwrap();
        assert!(!report.rounds.is_empty());
        assert_eq!(report.ignored_faces(), 0, "seed {seed}");
    }
}

#[test]
fn faces_see_connectors_in_the_spanner() {
    let inst = generate(Generator::Stacked, 120, 4).unwrap();
    let cfg = small(0.5, 4);
    let alpha = compute_alpha(inst.len(), &cfg);
    let (spanner, _) = build_spanner(&inst, &cfg).unwrap();
    let g = spanner.graph();
    let arr = build_arrangement(inst.disks(), None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut deep_checked = 0;
    let mut step = 0usize;
    arr.visit_covers(|face, cover| {
        step += 1;
        if cover.len() < 2 || !step.is_multiple_of(37) {
            return;
        }
        let ids: Vec<usize> = cover.iter().map(|&c| arr.disk_id(c)).collect();
        let sub = g.induced(&ids);
        if cover.len() <= alpha {
            assert_eq!(sub.edge_count(), ids.len() * (ids.len() - 1) / 2, "face {} not a clique", face.id);
        } else {
            let rate = monte_carlo_connector(&sub, cfg.eps / 4.0, 2000, &mut rng);
            assert_eq!(rate, 0.0, "face {} depth {}", face.id, face.depth);
            deep_checked += 1;
        }
    });
    assert!(deep_checked > 0);
}
