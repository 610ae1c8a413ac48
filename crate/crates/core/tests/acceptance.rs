//! Acceptance suite: every guarantee checkable at desk scale, one test per
//! criterion, each printing a PASS line with the measured values (run with
//! `cargo test --test acceptance -- --nocapture` to see them).

use std::sync::LazyLock;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entroloc::analysis::{leaf_entropy, pruned_leaf_entropy, run_benchmark};
use entroloc::fixtures;
use entroloc::geom::{rat, rat_i, Line, Point, Rat, Segment};
use entroloc::measure::{entropy_bits, ConditionalSampler, MeasureSpec};
use entroloc::partition::{
    build_measure_partition, incremental_cell_masses, PartitionParams,
};
use entroloc::subdivision::{normalize_unit_square, Subdivision};
use entroloc::trapmap::TrapMap;
use entroloc::tree::{build_tree, query, NodeKind, PartitionTree, Region, TreeParams};

struct Built {
    g: Subdivision,
    d: MeasureSpec,
    tree: PartitionTree,
    backup: TrapMap,
}

fn build(g: Subdivision, d: MeasureSpec, seed: u64) -> Built {
    let (g, d, _) = normalize_unit_square(&g, &d).expect("normalizes");
    let params = TreeParams { seed, ..TreeParams::default() };
    let tree = build_tree(&g, &d, &params).expect("builds");
    let mut backup = TrapMap::build(&g, seed);
    backup.assign_labels(&g);
    Built { g, d, tree, backup }
}

/// The entropy-sensitivity ladder: grids with the fixed hot-cell measure.
static LADDER: LazyLock<Vec<(usize, Built)>> = LazyLock::new(|| {
    [(256usize, 101u64), (1024, 102), (4096, 103)]
        .into_iter()
        .map(|(n, seed)| (n, build(fixtures::grid(n), fixtures::hot_cell_measure(), seed)))
        .collect()
});

static TRI: LazyLock<Built> =
    LazyLock::new(|| build(fixtures::tri(), fixtures::uniform_measure_on_box(), 201));

static ISLANDS3: LazyLock<Built> =
    LazyLock::new(|| build(fixtures::islands(3), fixtures::islands_measure(3), 202));

fn uniform_point(rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        rat((rng.next_u64() % (1 << 20)) as i64, 1 << 20),
        rat((rng.next_u64() % (1 << 20)) as i64, 1 << 20),
    )
}

/// Point at rational parameter t along a random edge, offset by an exact
/// hair to a random side.
fn near_edge_point(g: &Subdivision, rng: &mut ChaCha8Rng) -> Point {
    let segs = g.segments();
    let s: &Segment = &segs[(rng.next_u64() as usize) % segs.len()];
    let t = rat((rng.next_u64() % 1021) as i64 + 2, 1025);
    let base = s.at(&t);
    let dx = &s.b.x - &s.a.x;
    let dy = &s.b.y - &s.a.y;
    let scale = {
        let ax = if dx < rat_i(0) { -dx.clone() } else { dx.clone() };
        let ay = if dy < rat_i(0) { -dy.clone() } else { dy.clone() };
        ax.max(ay)
    };
    let eps = rat(1, 1 << 20) / scale;
    let side = if rng.next_u64().is_multiple_of(2) { rat_i(1) } else { rat_i(-1) };
    Point::new(&base.x - &side * &eps * dy, &base.y + side * eps * dx)
}

fn oracle_sweep(name: &str, b: &Built, seed: u64) -> (usize, usize) {
    let sampler = ConditionalSampler::new(&b.d, &b.d.cover_triangle()).expect("positive mass");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = (0..10_000).map(|_| sampler.sample(&mut rng)).collect();
    points.extend((0..1_000).map(|_| uniform_point(&mut rng)));
    points.extend((0..1_000).map(|_| near_edge_point(&b.g, &mut rng)));
    let mut checked = 0usize;
    let mut skipped_boundary = 0usize;
    for p in &points {
        let (expect, boundary) = b.g.brute_locate(p);
        if boundary {
            skipped_boundary += 1;
            continue;
        }
        let (got, _) = query(&b.tree, &b.backup, b.g.outer_label(), p);
        assert_eq!(got, expect, "{name}: mismatch at {p:?}");
        checked += 1;
    }
    (checked, skipped_boundary)
}

#[test]
fn criterion_1_oracle_equivalence() {
    let started = Instant::now();
    let mut total = 0usize;
    let (c, s) = oracle_sweep("tri", &TRI, 301);
    total += c + s;
    let (c2, s2) = oracle_sweep("islands3", &ISLANDS3, 302);
    total += c2 + s2;
    let grid = &LADDER.iter().find(|(n, _)| *n == 4096).unwrap().1;
    let (c3, s3) = oracle_sweep("grid4096", grid, 303);
    total += c3 + s3;
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 120, "oracle sweep took {elapsed:.2?}");
    println!(
        "criterion 1 PASS: oracle equivalence on 3 fixtures ({} points incl. boundary-skipped, {:.1?})",
        total, elapsed
    );
}

#[test]
fn criterion_2_theorem_conditions_exact() {
    let measures: [(&str, MeasureSpec); 3] = [
        ("uniform", fixtures::unit_uniform()),
        ("skewed", fixtures::skewed_99_1()),
        ("disconnected", fixtures::disconnected_measure()),
    ];
    let params = PartitionParams::default();
    for r in [2usize, 4, 8] {
        let bound = rat(3, r as i64);
        for (name, d) in &measures {
            let mut retries: Vec<u32> = Vec::new();
            for seed in 0..20u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
                let b = build_measure_partition(d, r, &params, &mut rng)
                    .unwrap_or_else(|e| panic!("build r={r} {name} seed={seed}: {e}"));
                let masses = incremental_cell_masses(d, &b.seq);
                let total: Rat = masses.iter().sum();
                assert_eq!(total, rat_i(1), "r={r} {name} seed={seed}: union mass");
                for m in &masses {
                    assert!(*m <= bound, "r={r} {name} seed={seed}: mass {m} > 3/{r}");
                }
                retries.push(b.retries);
            }
            retries.sort_unstable();
            let median = retries[retries.len() / 2];
            assert!(median <= 20, "r={r} {name}: median retries {median}");
        }
    }
    println!("criterion 2 PASS: Pr(union)=1 and max mass <= 3/r exactly for r in {{2,4,8}} x 3 measures x 20 seeds");
}

#[test]
fn criterion_3_entropy_sensitivity() {
    let mut means = Vec::new();
    let mut cqs = Vec::new();
    for (n, b) in LADDER.iter() {
        let rep = run_benchmark(
            &format!("grid{n}"),
            &b.g,
            &b.d,
            &b.tree,
            &b.backup,
            10_000,
            400 + *n as u64,
        )
        .unwrap();
        means.push((*n, rep.mean_comparisons));
        cqs.push(rep.c_q);
    }
    let lo = means.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
    let hi = means.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    assert!(
        hi / lo <= 1.5,
        "mean comparisons vary too much across the ladder: {means:?}"
    );
    for c in &cqs {
        assert!(*c <= 32.0, "c_q {c} exceeds 32");
    }
    println!(
        "criterion 3 PASS: means {:?} (ratio {:.3}, log2 n grows by 4), c_q max {:.2} <= 32",
        means,
        hi / lo,
        cqs.iter().fold(0.0f64, |a, &b| a.max(b))
    );
}

#[test]
fn criterion_4_crossing_budgets() {
    let started = Instant::now();
    // Spanning trees on 64 and 256 random points, exhaustive test lines.
    for (n, seed) in [(64usize, 21u64), (256, 22)] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<Point> = Vec::with_capacity(n);
        while pts.len() < n {
            let q = uniform_point(&mut rng);
            if !pts.contains(&q) {
                pts.push(q);
            }
        }
        let tree = entroloc::lowcross::spanning_tree_low_crossing(&pts).unwrap();
        let budget = 4.0 * (n as f64).sqrt() * ((n + 1) as f64).ln();
        assert!(
            (tree.max_test_line_crossings as f64) <= budget,
            "tree({n}): {} > {budget:.1}",
            tree.max_test_line_crossings
        );
        println!(
            "criterion 4: spanning tree |V|={n} max crossings {} (budget {budget:.1})",
            tree.max_test_line_crossings
        );
    }

    // Triangulated arrangements for r in {4, 8}: exhaustive sweep over lines
    // through triangulation vertex pairs.
    for (r, seed) in [(4usize, 23u64), (8, 24)] {
        let d = fixtures::skewed_99_1();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = build_measure_partition(&d, r, &PartitionParams::default(), &mut rng).unwrap();
        let region = entroloc::geom::ConvexPolygon::rectangle(
            &rat_i(0),
            &rat_i(0),
            &rat_i(1),
            &rat_i(1),
        );
        let sc = entroloc::lowcross::triangulate_arrangement(&b.seq, &region).unwrap();
        let mut edges: Vec<Segment> = Vec::new();
        let mut verts: Vec<Point> = Vec::new();
        for t in &sc.triangulation.triangles {
            for e in t.edges() {
                edges.push(e.canonical());
            }
            verts.extend(t.verts().iter().cloned());
        }
        edges.sort_by(|a, b| a.a.lex_cmp(&b.a).then_with(|| a.b.lex_cmp(&b.b)));
        edges.dedup();
        verts.sort_by(|a, b| a.lex_cmp(b));
        verts.dedup();
        let budget = 4.0 * (r as f64).sqrt() * (1.0 + (r as f64).log2()) * 6.0;
        let mut worst = 0usize;
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                let Ok(line) = Line::through(&verts[i], &verts[j]) else { continue };
                let c = edges
                    .iter()
                    .filter(|e| line.side(&e.a) * line.side(&e.b) < 0)
                    .count();
                worst = worst.max(c);
            }
        }
        assert!(
            (worst as f64) <= budget,
            "triangulation r={r}: {worst} crossings > budget {budget:.1}"
        );
        println!(
            "criterion 4: triangulation r={r} max line crossings {worst} (budget {budget:.0}, {} verts)",
            verts.len()
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() <= 300, "crossing budgets took {elapsed:.2?}");
    println!("criterion 4 PASS: all crossing budgets hold ({elapsed:.1?})");
}

#[test]
fn criterion_5_exact_tiling_identities() {
    for (name, b) in [("tri", &*TRI), ("islands3", &*ISLANDS3)]
        .into_iter()
        .chain(LADDER.iter().map(|(n, b)| (if *n == 256 { "grid256" } else if *n == 1024 { "grid1024" } else { "grid4096" }, b)))
    {
        for (i, node) in b.tree.nodes.iter().enumerate() {
            if matches!(node.kind, NodeKind::Internal) {
                let child_area: Rat = node
                    .children
                    .iter()
                    .map(|&c| b.tree.nodes[c].region.area())
                    .sum();
                assert_eq!(child_area, node.region.area(), "{name}: node {i} tiling");
            }
        }
        let leaf_total: Rat = b.tree.leaves_with_masses().into_iter().map(|(_, m)| m).sum();
        assert_eq!(leaf_total, rat_i(1), "{name}: leaf masses");
        assert!(b.backup.tiles_box_exactly(), "{name}: trapezoid tiling");
    }
    println!("criterion 5 PASS: child-area, leaf-mass, and trapezoid tiling identities exact on all fixtures");
}

#[test]
fn criterion_6_entropy_identities() {
    let quarters = [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)];
    assert!((entropy_bits(quarters.iter()).unwrap() - 2.0).abs() < 1e-12);
    let skew = [rat(1, 2), rat(1, 4), rat(1, 4)];
    assert!((entropy_bits(skew.iter()).unwrap() - 1.5).abs() < 1e-12);
    for (name, b) in [("tri", &*TRI), ("islands3", &*ISLANDS3)]
        .into_iter()
        .chain(LADDER.iter().map(|(n, b)| (if *n == 256 { "grid256" } else if *n == 1024 { "grid1024" } else { "grid4096" }, b)))
    {
        let hl = leaf_entropy(&b.tree);
        let hp = pruned_leaf_entropy(&b.tree);
        let bound = 2.0 * (b.tree.max_children().max(2) as f64).log2();
        assert!(
            (hl - hp).abs() <= bound + 1e-9,
            "{name}: |H(L)-H(L')| = {} > {bound}",
            (hl - hp).abs()
        );
    }
    println!("criterion 6 PASS: entropy closed forms within 1e-12; |H(L)-H(L')| <= 2 log2(max children) everywhere");
}

#[test]
fn criterion_7_backup_quality() {
    let b = &LADDER.iter().find(|(n, _)| *n == 4096).unwrap().1;
    let n = b.g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut total = 0usize;
    let mut checked = 0usize;
    let queries = 10_000usize;
    for _ in 0..queries {
        let p = uniform_point(&mut rng);
        let (label, comparisons) = b.backup.locate(&p);
        total += comparisons;
        let (expect, boundary) = b.g.brute_locate(&p);
        if !boundary {
            assert_eq!(label, expect, "backup disagrees at {p:?}");
            checked += 1;
        }
    }
    let mean = total as f64 / queries as f64;
    let bound = 8.0 * ((n + 1) as f64).log2();
    assert!(mean <= bound, "mean search depth {mean:.2} > {bound:.2}");
    println!(
        "criterion 7 PASS: n=4096 backup mean depth {mean:.2} <= {bound:.2}, {checked} off-boundary labels agree"
    );
}

#[test]
fn criterion_8_sublinear_filter() {
    let ratios: Vec<(usize, usize, f64)> = LADDER
        .iter()
        .map(|(n, b)| (*n, b.tree.node_count(), b.tree.node_count() as f64 / *n as f64))
        .collect();
    for w in ratios.windows(2) {
        assert!(
            w[1].2 < w[0].2,
            "node/n ratio not strictly decreasing: {ratios:?}"
        );
    }
    println!("criterion 8 PASS: node/n ratios strictly decreasing across the ladder: {ratios:?}");
}

/// Shared-fixture sanity: roots are unit squares with mass 1.
#[test]
fn shared_builds_are_well_formed() {
    for (_, b) in LADDER.iter() {
        assert!(matches!(b.tree.nodes[0].region, Region::UnitSquare));
        assert_eq!(b.tree.nodes[0].mass, rat_i(1));
    }
}
