//! The acceptance gate: one test per criterion, each printing a
//! single summary line (visible with `--nocapture`). The oracles here
//! are written independently of the library internals — brute-force
//! closure enumeration over all object subsets, and direct subset
//! counting for stability — so the fast implementations are checked
//! against first principles.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fcatax::ingest::{self, IngestConfig, LogKind};
use fcatax::lattice::{enumerate_concepts, ConceptLattice};
use fcatax::selection::{
    iceberg_filter, selection_overlap, stability_threshold_filter, top_k_extent, top_k_stability,
};
use fcatax::stability::{stability_all, stability_bruteforce, verify_counting_identity};
use fcatax::{AttributeSet, FormalContext, ObjectSet};

/// Serializes the two long-running tests so neither eats into the
/// other's time budget.
static HEAVY: Mutex<()> = Mutex::new(());

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// A concept as plain index sets, the common coin for comparing the
/// library's output with the oracles below.
type RawConcept = (Vec<usize>, Vec<usize>);

fn raw_concepts(lat: impl IntoIterator<Item = (ObjectSet, AttributeSet)>) -> BTreeSet<RawConcept> {
    lat.into_iter()
        .map(|(e, i)| (e.iter().collect(), i.iter().collect()))
        .collect()
}

/// Oracle: every concept is the closure of some object subset, so
/// enumerating all 2^|G| subsets and closing each finds exactly the
/// concepts.
fn oracle_concepts(ctx: &FormalContext) -> BTreeSet<RawConcept> {
    let n = ctx.object_count();
    let mut found = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&g| mask & (1 << g) != 0).collect();
        let subset = ctx.objects_from_indices(members.iter().copied()).unwrap();
        let intent = ctx.derive_objects(&subset);
        let extent = ctx.derive_attributes(&intent);
        found.insert((extent.iter().collect(), intent.iter().collect()));
    }
    found
}

fn random_context(rng: &mut ChaCha8Rng, max_side: usize, density: f64) -> FormalContext {
    let n = rng.random_range(1..=max_side);
    let m = rng.random_range(1..=max_side);
    let objects: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let attributes: Vec<String> = (0..m).map(|j| format!("m{j}")).collect();
    let mut pairs = Vec::new();
    for g in 0..n {
        for a in 0..m {
            if rng.random::<f64>() < density {
                pairs.push((g, a));
            }
        }
    }
    FormalContext::new(objects, attributes, &pairs).unwrap()
}

/// The shared corpus for criteria 1 and 2: 200 contexts with sides up
/// to 12, cycling through densities 0.1, 0.3, 0.5.
fn corpus() -> Vec<FormalContext> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFCA0);
    (0..200)
        .map(|i| random_context(&mut rng, 12, [0.1, 0.3, 0.5][i % 3]))
        .collect()
}

#[test]
fn criterion_1_lattice_oracle_equivalence() {
    let start = Instant::now();
    let mut total_concepts = 0usize;
    for (i, ctx) in corpus().iter().enumerate() {
        let got = raw_concepts(
            enumerate_concepts(ctx)
                .unwrap()
                .into_iter()
                .map(|c| (c.extent, c.intent)),
        );
        let want = oracle_concepts(ctx);
        assert_eq!(got, want, "context #{i} disagrees with the oracle");
        total_concepts += got.len();
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed < Duration::from_secs(10),
        "corpus took {elapsed:?}, budget is 10 s"
    );
    println!(
        "criterion 1 (lattice oracle equivalence): PASS — 200 contexts, \
         {total_concepts} concepts, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_stability_oracle_equivalence() {
    let start = Instant::now();
    for (i, ctx) in corpus().iter().enumerate() {
        let lat = ConceptLattice::from_context(ctx).unwrap();
        let fast = stability_all(ctx, &lat);
        for id in 0..lat.len() {
            let f = fast.get(id).unwrap();
            let s = stability_bruteforce(ctx, lat.concept(id).unwrap()).unwrap();
            assert_eq!(
                f.generator_count, s.generator_count,
                "context #{i}, concept {id}: generator counts differ"
            );
            assert!(
                (f.sigma - s.sigma).abs() <= 1e-12,
                "context #{i}, concept {id}: sigma {} vs oracle {}",
                f.sigma,
                s.sigma
            );
        }
        // The subset-counting identity, summed here from scratch
        // rather than through the library's own checker.
        let total: num_bigint::BigUint = (0..lat.len())
            .map(|id| fast.get(id).unwrap().generator_count.clone())
            .sum();
        let expected = num_bigint::BigUint::from(1u8) << ctx.object_count();
        assert_eq!(total, expected, "context #{i}: counting identity broken");
        assert!(verify_counting_identity(&fast, ctx));
    }
    println!(
        "criterion 2 (stability oracle equivalence): PASS — 200 contexts, {:.2?}",
        start.elapsed()
    );
}

#[test]
fn criterion_3_toy_fixture_golden_values() {
    let ctx = fcatax::io::read_cxt_file(fixture("toy.cxt")).unwrap();
    let lat = ConceptLattice::from_context(&ctx).unwrap();
    assert_eq!(lat.len(), 4);

    let extent_names = |id: usize| -> Vec<&str> {
        lat.concept(id)
            .unwrap()
            .extent
            .iter()
            .map(|g| ctx.object_names()[g].as_str())
            .collect()
    };
    assert_eq!(extent_names(0), Vec::<&str>::new());
    assert_eq!(extent_names(1), ["g1"]);
    assert_eq!(extent_names(2), ["g2"]);
    assert_eq!(extent_names(3), ["g1", "g2", "g3"]);

    let edges: BTreeSet<(usize, usize)> = lat.edges().collect();
    assert_eq!(edges, BTreeSet::from([(0, 1), (0, 2), (1, 3), (2, 3)]));

    let report = stability_all(&ctx, &lat);
    let sigmas: Vec<f64> = (0..4).map(|id| report.sigma(id)).collect();
    assert_eq!(sigmas, [1.0, 0.5, 0.5, 0.625]);

    // The command-line outputs must match the committed golden files
    // byte for byte.
    let dir = tempfile::tempdir().unwrap();
    let toy = fixture("toy.cxt");
    let produced = [
        (
            vec!["lattice", toy.to_str().unwrap(), "--out"],
            dir.path().join("lattice.json"),
            "golden/toy_lattice.json",
        ),
        (
            vec!["stability", toy.to_str().unwrap(), "--out"],
            dir.path().join("stability.json"),
            "golden/toy_stability.json",
        ),
    ];
    for (args, out, golden) in &produced {
        let mut full: Vec<&str> = args.clone();
        full.push(out.to_str().unwrap());
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_fcatax"))
            .args(&full)
            .output()
            .unwrap();
        assert!(status.status.success());
        assert_eq!(
            std::fs::read(out).unwrap(),
            std::fs::read(fixture(golden)).unwrap(),
            "{golden} drifted"
        );
    }
    let dot = dir.path().join("top2.dot");
    let json = dir.path().join("top2.json");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_fcatax"))
        .args([
            "select",
            toy.to_str().unwrap(),
            "--top-stability",
            "2",
            "--dot",
            dot.to_str().unwrap(),
            "--out",
            json.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(status.status.success());
    assert_eq!(
        std::fs::read(&dot).unwrap(),
        std::fs::read(fixture("golden/toy_top2_stability.dot")).unwrap()
    );
    assert_eq!(
        std::fs::read(&json).unwrap(),
        std::fs::read(fixture("golden/toy_top2_stability.json")).unwrap()
    );

    println!("criterion 3 (toy fixture golden values): PASS — 4 concepts, goldens byte-exact");
}

#[test]
fn criterion_4_closure_law_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFCA4);
    let random_subset = |rng: &mut ChaCha8Rng, ctx: &FormalContext| -> ObjectSet {
        let members = (0..ctx.object_count()).filter(|_| rng.random::<bool>());
        ctx.objects_from_indices(members).unwrap()
    };

    for case in 0..1000 {
        let ctx = random_context(&mut rng, 10, [0.1, 0.3, 0.5][case % 3]);
        let a = random_subset(&mut rng, &ctx);
        let mut b = random_subset(&mut rng, &ctx);
        // Make A ⊆ B for the monotone laws.
        for g in a.iter() {
            b.insert(g);
        }

        let closure_a = ctx.close_objects(&a);
        assert!(a.is_subset(&closure_a), "case {case}: not extensive");
        assert_eq!(
            ctx.close_objects(&closure_a),
            closure_a,
            "case {case}: not idempotent"
        );
        assert!(
            closure_a.is_subset(&ctx.close_objects(&b)),
            "case {case}: not monotone"
        );
        assert!(
            ctx.derive_objects(&b).is_subset(&ctx.derive_objects(&a)),
            "case {case}: derivation not antitone"
        );
        assert_eq!(
            ctx.derive_objects(&closure_a),
            ctx.derive_objects(&a),
            "case {case}: triple-prime identity broken"
        );
    }
    println!("criterion 4 (closure-law suite): PASS — 1000 cases per law, zero failures");
}

#[test]
fn criterion_5_iceberg_and_threshold_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFCA5);
    for case in 0..100 {
        let ctx = random_context(&mut rng, 9, [0.1, 0.3, 0.5][case % 3]);
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        let report = stability_all(&ctx, &lat);

        // Iceberg selections are order filters: anything above a
        // selected concept (larger extent by inclusion) is selected.
        let min_extent = rng.random_range(0..=ctx.object_count() + 1);
        let sel: BTreeSet<usize> = iceberg_filter(&lat, min_extent).selected_ids.into_iter().collect();
        for &id in &sel {
            let extent = &lat.concept(id).unwrap().extent;
            for other in 0..lat.len() {
                if extent.is_subset(&lat.concept(other).unwrap().extent) {
                    assert!(
                        sel.contains(&other),
                        "case {case}: iceberg({min_extent}) is not an order filter"
                    );
                }
            }
        }

        // Raising either threshold can only shrink the selection.
        let loose = iceberg_filter(&lat, min_extent);
        let tight = iceberg_filter(&lat, min_extent + 1);
        let loose_ids: BTreeSet<usize> = loose.selected_ids.iter().copied().collect();
        assert!(tight.selected_ids.iter().all(|id| loose_ids.contains(id)));

        let theta = rng.random::<f64>();
        let loose = stability_threshold_filter(&lat, &report, theta);
        let tight = stability_threshold_filter(&lat, &report, theta + (1.0 - theta) / 2.0);
        let loose_ids: BTreeSet<usize> = loose.selected_ids.iter().copied().collect();
        assert!(
            tight.selected_ids.iter().all(|id| loose_ids.contains(id)),
            "case {case}: threshold filter not monotone"
        );
    }
    println!("criterion 5 (iceberg and threshold laws): PASS — 100 lattices");
}

/// A user×site context at production scale: 4125
/// objects, 225 attributes, 3% incidence.
fn synthetic_large(seed: u64) -> FormalContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects: Vec<String> = (0..4125).map(|i| format!("u{i:04}")).collect();
    let attributes: Vec<String> = (0..225).map(|j| format!("s{j:03}")).collect();
    let mut pairs = Vec::new();
    for g in 0..4125 {
        for m in 0..225 {
            if rng.random::<f64>() < 0.03 {
                pairs.push((g, m));
            }
        }
    }
    FormalContext::new(objects, attributes, &pairs).unwrap()
}

#[test]
fn criterion_6_production_scale_workload() {
    let _guard = HEAVY.lock().unwrap_or_else(|p| p.into_inner());
    let ctx = synthetic_large(0x5CA1E);

    let start = Instant::now();
    let lat = ConceptLattice::from_context(&ctx).unwrap();
    let report = stability_all(&ctx, &lat);
    let elapsed = start.elapsed();

    assert!(verify_counting_identity(&report, &ctx));
    assert!(
        elapsed < Duration::from_secs(120),
        "full lattice + stability took {elapsed:?}, budget is 120 s"
    );

    // Criteria 1–2 must also hold on random 12×12 minors of this
    // context.
    let mut rng = ChaCha8Rng::seed_from_u64(0x313013);
    for _ in 0..20 {
        let rows = rand::seq::index::sample(&mut rng, ctx.object_count(), 12);
        let cols = rand::seq::index::sample(&mut rng, ctx.attribute_count(), 12);
        let mut pairs = Vec::new();
        for (gi, g) in rows.iter().enumerate() {
            for (mi, m) in cols.iter().enumerate() {
                if ctx.incident(g, m) {
                    pairs.push((gi, mi));
                }
            }
        }
        let minor = FormalContext::new(
            rows.iter().map(|g| ctx.object_names()[g].clone()).collect(),
            cols.iter().map(|m| ctx.attribute_names()[m].clone()).collect(),
            &pairs,
        )
        .unwrap();

        let got = raw_concepts(
            enumerate_concepts(&minor)
                .unwrap()
                .into_iter()
                .map(|c| (c.extent, c.intent)),
        );
        assert_eq!(got, oracle_concepts(&minor), "minor disagrees with oracle");

        let minor_lat = ConceptLattice::from_context(&minor).unwrap();
        let fast = stability_all(&minor, &minor_lat);
        for id in 0..minor_lat.len() {
            let slow = stability_bruteforce(&minor, minor_lat.concept(id).unwrap()).unwrap();
            assert_eq!(fast.get(id).unwrap().generator_count, slow.generator_count);
        }
        assert!(verify_counting_identity(&fast, &minor));
    }

    // The concept count is workload documentation, not a contract.
    println!(
        "criterion 6 (production-scale workload): PASS — {} concepts in {elapsed:.2?} \
         (count recorded, not asserted); 20 minors match the oracles",
        lat.len()
    );
}

#[test]
fn criterion_7_extent_vs_stability_selection_overlap() {
    let _guard = HEAVY.lock().unwrap_or_else(|p| p.into_inner());
    let mut outcomes = Vec::new();
    for seed in 0..10u64 {
        let ctx = synthetic_large(seed);
        let lat = ConceptLattice::from_context(&ctx).unwrap();
        let report = stability_all(&ctx, &lat);

        let by_extent = top_k_extent(&lat, 25);
        let by_stability = top_k_stability(&lat, &report, 25, false);
        let overlap = selection_overlap(&by_extent, &by_stability).unwrap();

        let a: BTreeSet<usize> = by_extent.selected_ids.iter().copied().collect();
        let b: BTreeSet<usize> = by_stability.selected_ids.iter().copied().collect();
        let identical = a == b;
        let disjoint = overlap.common.is_empty();
        outcomes.push((seed, overlap.jaccard, !identical && !disjoint));
        println!(
            "criterion 7, seed {seed}: jaccard {:.4}, identical {identical}, disjoint {disjoint}",
            overlap.jaccard
        );
    }
    let successes = outcomes.iter().filter(|(_, _, ok)| *ok).count();
    // Soft property: the expectation is ≥ 8 of 10 seeds, but a miss is
    // reported rather than failing the build.
    if successes >= 8 {
        println!(
            "criterion 7 (extent vs stability overlap): PASS — rankings overlap \
             without coinciding on {successes}/10 seeds"
        );
    } else {
        println!(
            "criterion 7 (extent vs stability overlap): SOFT MISS — only \
             {successes}/10 seeds; logged, not fatal"
        );
    }
}

#[test]
fn criterion_8_ingestion_round_trip() {
    let parsed = ingest::parse_usage_log_file(fixture("toy_external.csv"), LogKind::External).unwrap();
    assert!(parsed.rejected.is_empty());

    // Default threshold: strictly more than 20 sessions. The fixture
    // puts every incident pair at 21 and every non-incident pair at
    // exactly 20, so strict-greater is load-bearing.
    let ctx = ingest::build_context(&parsed.records, &IngestConfig::default()).unwrap();
    let expected = FormalContext::new(
        vec!["g1".into(), "g2".into(), "g3".into()],
        vec!["m1".into(), "m2".into(), "m3".into()],
        &[(0, 0), (0, 1), (1, 1), (1, 2), (2, 1)],
    )
    .unwrap();
    assert_eq!(ctx, expected, "round trip does not reproduce the toy context");

    // With a greater-or-equal threshold the 20-session rows would
    // survive and every cell would be incident.
    let full = ingest::build_context(
        &parsed.records,
        &IngestConfig {
            min_sessions: 19,
            ..IngestConfig::default()
        },
    )
    .unwrap();
    assert_eq!(full.object_count() * full.attribute_count(), 9);
    assert!((0..3).all(|g| (0..3).all(|m| full.incident(g, m))));

    println!("criterion 8 (ingestion round trip): PASS — toy context reproduced exactly");
}
