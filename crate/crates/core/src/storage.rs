//! Structure serialization (versioned JSON) and the full re-verification
//! pass over a loaded structure.
//!
//! The tree is stored in full (regions, masses, kinds, per-level partitions
//! and spanning-tree edges); the trapezoidal backup is stored as its seed
//! and rebuilt deterministically on load. Rationals are "p/q" strings.

use serde::{Deserialize, Serialize};

use crate::analysis::{leaf_entropy, pruned_leaf_entropy};
use crate::geom::{format_rat, parse_rat, Point, Rat, Segment, Triangle};
use crate::measure::{measure_from_json, measure_to_json, MeasureSpec};
use crate::partition::{
    crossing_budget, incremental_cell_masses, max_test_line_crossings, PartitionParams,
    PartitionSequence, Strategy,
};
use crate::subdivision::{subdivision_from_json, subdivision_to_json, Subdivision, Transform};
use crate::trapmap::TrapMap;
use crate::tree::{LeafReason, LevelBuild, NodeKind, PartitionTree, Region, TreeNode, TreeParams};
use crate::{Error, Result};

pub const FORMAT_TAG: &str = "entroloc-structure/v1";

/// Everything a query or verification pass needs, as loaded from disk.
pub struct Structure {
    pub g: Subdivision,
    pub d: MeasureSpec,
    pub transform: Transform,
    pub tree: PartitionTree,
    pub backup_seed: u64,
    pub c_stab: f64,
}

impl Structure {
    /// Rebuilds and labels the backup map (deterministic per seed).
    pub fn backup(&self) -> TrapMap {
        let mut m = TrapMap::build(&self.g, self.backup_seed);
        m.assign_labels(&self.g);
        m
    }
}

// --- DTOs ---------------------------------------------------------------------

type RatStr = String;
type PointFile = [RatStr; 2];
type TriangleFile = [PointFile; 3];

#[derive(Serialize, Deserialize)]
struct StructureFile {
    format: String,
    params: ParamsFile,
    transform: TransformFile,
    n: usize,
    depth_cap: usize,
    outer_label: String,
    backup_seed: u64,
    subdivision: serde_json::Value,
    measure: serde_json::Value,
    nodes: Vec<NodeFile>,
    degraded: Vec<usize>,
    stats: StatsFile,
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    r: usize,
    alpha: RatStr,
    seed: u64,
    strategy: String,
    m_cap: usize,
    max_retries: u32,
    c_cross: f64,
    c_stab: f64,
}

#[derive(Serialize, Deserialize)]
struct TransformFile {
    scale: RatStr,
    dx: RatStr,
    dy: RatStr,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RegionFile {
    Square,
    Triangle { verts: TriangleFile },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum KindFile {
    Internal,
    Terminal { label: String },
    Nonterminal { reason: String },
}

#[derive(Serialize, Deserialize)]
struct LevelFile {
    triangles: Vec<TriangleFile>,
    retries: u32,
    max_incremental_mass: RatStr,
    max_line_crossings: usize,
    test_line_count: usize,
    tree_edges: Vec<[PointFile; 2]>,
    tree_max_crossings: usize,
    trapezoid_fallbacks: usize,
}

#[derive(Serialize, Deserialize)]
struct NodeFile {
    parent: Option<usize>,
    depth: usize,
    region: RegionFile,
    mass: RatStr,
    kind: KindFile,
    children: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    level: Option<LevelFile>,
}

#[derive(Serialize, Deserialize)]
struct StatsFile {
    node_count: usize,
    terminal_leaves: usize,
    max_children: usize,
    total_retries: u32,
    leaf_entropy_bits: f64,
    pruned_leaf_entropy_bits: f64,
}

fn point_file(p: &Point) -> PointFile {
    [format_rat(&p.x), format_rat(&p.y)]
}

fn point_parse(f: &PointFile) -> Result<Point> {
    Ok(Point::new(parse_rat(&f[0])?, parse_rat(&f[1])?))
}

fn triangle_file(t: &Triangle) -> TriangleFile {
    let v = t.verts();
    [point_file(&v[0]), point_file(&v[1]), point_file(&v[2])]
}

fn triangle_parse(f: &TriangleFile) -> Result<Triangle> {
    Triangle::new(point_parse(&f[0])?, point_parse(&f[1])?, point_parse(&f[2])?)
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::RecursiveMedian => "recursive-median",
        Strategy::QuantileGrid => "quantile-grid",
    }
}

fn strategy_parse(s: &str) -> Result<Strategy> {
    match s {
        "recursive-median" => Ok(Strategy::RecursiveMedian),
        "quantile-grid" => Ok(Strategy::QuantileGrid),
        _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
    }
}

fn reason_name(r: &LeafReason) -> &'static str {
    match r {
        LeafReason::DepthCap => "depth_cap",
        LeafReason::ZeroMass => "zero_mass",
        LeafReason::BuildFailed => "build_failed",
    }
}

fn reason_parse(s: &str) -> Result<LeafReason> {
    match s {
        "depth_cap" => Ok(LeafReason::DepthCap),
        "zero_mass" => Ok(LeafReason::ZeroMass),
        "build_failed" => Ok(LeafReason::BuildFailed),
        _ => Err(Error::Parse(format!("unknown leaf reason {s:?}"))),
    }
}

pub fn structure_to_json(s: &Structure) -> serde_json::Value {
    let tree = &s.tree;
    let nodes: Vec<NodeFile> = tree
        .nodes
        .iter()
        .map(|n| NodeFile {
            parent: n.parent,
            depth: n.depth,
            region: match &n.region {
                Region::UnitSquare => RegionFile::Square,
                Region::Tri(t) => RegionFile::Triangle { verts: triangle_file(t) },
            },
            mass: format_rat(&n.mass),
            kind: match &n.kind {
                NodeKind::Internal => KindFile::Internal,
                NodeKind::Terminal { label } => KindFile::Terminal { label: label.clone() },
                NodeKind::Nonterminal { reason } => {
                    KindFile::Nonterminal { reason: reason_name(reason).into() }
                }
            },
            children: n.children.clone(),
            level: n.level.as_ref().map(|l| LevelFile {
                triangles: l.seq.triangles().iter().map(triangle_file).collect(),
                retries: l.retries,
                max_incremental_mass: format_rat(&l.max_incremental_mass),
                max_line_crossings: l.max_line_crossings,
                test_line_count: l.test_line_count,
                tree_edges: l
                    .tree_edges
                    .iter()
                    .map(|e| [point_file(&e.a), point_file(&e.b)])
                    .collect(),
                tree_max_crossings: l.tree_max_crossings,
                trapezoid_fallbacks: l.trapezoid_fallbacks,
            }),
        })
        .collect();
    let file = StructureFile {
        format: FORMAT_TAG.to_string(),
        params: ParamsFile {
            r: tree.params.r,
            alpha: format_rat(&tree.params.alpha),
            seed: tree.params.seed,
            strategy: strategy_name(tree.params.partition.strategy).into(),
            m_cap: tree.params.partition.m_cap,
            max_retries: tree.params.partition.max_retries,
            c_cross: tree.params.partition.c_cross,
            c_stab: s.c_stab,
        },
        transform: TransformFile {
            scale: format_rat(&s.transform.scale),
            dx: format_rat(&s.transform.dx),
            dy: format_rat(&s.transform.dy),
        },
        n: tree.n,
        depth_cap: tree.depth_cap,
        outer_label: s.g.outer_label().to_string(),
        backup_seed: s.backup_seed,
        subdivision: subdivision_to_json(&s.g),
        measure: measure_to_json(&s.d),
        nodes,
        degraded: tree.degraded.clone(),
        stats: StatsFile {
            node_count: tree.node_count(),
            terminal_leaves: tree.terminal_leaf_count(),
            max_children: tree.max_children(),
            total_retries: tree.total_retries(),
            leaf_entropy_bits: leaf_entropy(tree),
            pruned_leaf_entropy_bits: pruned_leaf_entropy(tree),
        },
    };
    serde_json::to_value(file).expect("structure serializes")
}

pub fn structure_from_json(v: &serde_json::Value) -> Result<Structure> {
    let file: StructureFile = serde_json::from_value(v.clone())
        .map_err(|e| Error::Parse(format!("structure file: {e}")))?;
    if file.format != FORMAT_TAG {
        return Err(Error::Parse(format!(
            "unsupported structure format {:?} (expected {FORMAT_TAG:?})",
            file.format
        )));
    }
    let g = subdivision_from_json(&file.subdivision)?;
    let d = measure_from_json(&file.measure)?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for nf in &file.nodes {
        let region = match &nf.region {
            RegionFile::Square => Region::UnitSquare,
            RegionFile::Triangle { verts } => Region::Tri(triangle_parse(verts)?),
        };
        let kind = match &nf.kind {
            KindFile::Internal => NodeKind::Internal,
            KindFile::Terminal { label } => NodeKind::Terminal { label: label.clone() },
            KindFile::Nonterminal { reason } => {
                NodeKind::Nonterminal { reason: reason_parse(reason)? }
            }
        };
        let level = match &nf.level {
            None => None,
            Some(l) => {
                let mut tris = Vec::with_capacity(l.triangles.len());
                for t in &l.triangles {
                    tris.push(triangle_parse(t)?);
                }
                let mut edges = Vec::with_capacity(l.tree_edges.len());
                for [a, b] in &l.tree_edges {
                    edges.push(Segment::new(point_parse(a)?, point_parse(b)?)?);
                }
                Some(LevelBuild {
                    seq: PartitionSequence::new(tris),
                    retries: l.retries,
                    max_incremental_mass: parse_rat(&l.max_incremental_mass)?,
                    max_line_crossings: l.max_line_crossings,
                    test_line_count: l.test_line_count,
                    tree_edges: edges,
                    tree_max_crossings: l.tree_max_crossings,
                    trapezoid_fallbacks: l.trapezoid_fallbacks,
                })
            }
        };
        nodes.push(TreeNode {
            parent: nf.parent,
            depth: nf.depth,
            region,
            mass: parse_rat(&nf.mass)?,
            kind,
            children: nf.children.clone(),
            level,
        });
    }
    let tree = PartitionTree {
        nodes,
        params: TreeParams {
            r: file.params.r,
            alpha: parse_rat(&file.params.alpha)?,
            seed: file.params.seed,
            partition: PartitionParams {
                strategy: strategy_parse(&file.params.strategy)?,
                m_cap: file.params.m_cap,
                max_retries: file.params.max_retries,
                c_cross: file.params.c_cross,
            },
        },
        depth_cap: file.depth_cap,
        n: file.n,
        degraded: file.degraded.clone(),
        attempt_log: Vec::new(),
    };
    Ok(Structure {
        g,
        d,
        transform: Transform {
            scale: parse_rat(&file.transform.scale)?,
            dx: parse_rat(&file.transform.dx)?,
            dy: parse_rat(&file.transform.dy)?,
        },
        tree,
        backup_seed: file.backup_seed,
        c_stab: file.params.c_stab,
    })
}

pub fn save_structure(s: &Structure, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&structure_to_json(s))?)?;
    Ok(())
}

pub fn load_structure(path: &std::path::Path) -> Result<Structure> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("structure file: {e}")))?;
    structure_from_json(&v)
}

// --- verification --------------------------------------------------------------

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifySummary {
    pub nodes_checked: usize,
    pub partitions_checked: usize,
    pub terminal_labels_checked: usize,
    pub max_partition_mass_slack: f64,
    pub backup_trapezoids: usize,
}

fn fail(path: String, reason: String) -> Error {
    Error::VerifyFailed { path, reason }
}

/// Re-runs every exact invariant on a loaded structure: partition conditions
/// per node (coverage, 3/r masses, crossing budget), tiling identities,
/// stored-mass consistency, terminal labels against the brute oracle, leaf
/// mass total, and the backup's exact tiling. Fails with the offending node
/// path.
pub fn verify_structure(s: &Structure) -> Result<VerifySummary> {
    let tree = &s.tree;
    let mut summary = VerifySummary::default();
    if tree.nodes.is_empty() {
        return Err(fail("root".into(), "empty tree".into()));
    }
    if !matches!(tree.nodes[0].region, Region::UnitSquare) {
        return Err(fail("node 0".into(), "root region must be the unit square".into()));
    }
    if tree.nodes[0].mass != Rat::from_integer(1.into()) {
        return Err(fail("node 0".into(), "root mass must be 1".into()));
    }

    // Top-down walk carrying the conditioned measure.
    let mut stack: Vec<(usize, MeasureSpec)> = vec![(0, s.d.clone())];
    let bound = crate::geom::rat(3, tree.params.r as i64);
    let budget = crossing_budget(tree.params.r, tree.params.partition.c_cross) + 1;
    while let Some((id, measure)) = stack.pop() {
        let node = &tree.nodes[id];
        let path = format!("node {id} (depth {})", node.depth);
        summary.nodes_checked += 1;

        match (&node.kind, node.level.is_some()) {
            (NodeKind::Internal, false) => {
                return Err(fail(path, "internal node without a stored partition".into()))
            }
            (NodeKind::Internal, true) => {}
            (_, true) => return Err(fail(path, "leaf node carries a partition".into())),
            _ => {}
        }

        let Some(level) = &node.level else { continue };
        // Partition conditions, exactly.
        let masses = incremental_cell_masses(&measure, &level.seq);
        let total: Rat = masses.iter().sum();
        if total != Rat::from_integer(1.into()) {
            return Err(fail(path, format!("partition union mass {total} != 1")));
        }
        let max_mass = masses.iter().max().cloned().unwrap_or_default();
        if max_mass > bound {
            return Err(fail(path, format!("incremental mass {max_mass} exceeds 3/r")));
        }
        if max_mass != level.max_incremental_mass {
            return Err(fail(path, "stored max incremental mass does not match".into()));
        }
        let (crossings, _) = max_test_line_crossings(&level.seq);
        if crossings > budget {
            return Err(fail(path, format!("crossings {crossings} exceed budget {budget}")));
        }
        summary.partitions_checked += 1;
        let slack = crate::geom::rat_to_f64(&(&bound - &max_mass));
        summary.max_partition_mass_slack = summary.max_partition_mass_slack.max(slack);

        // Children tile the region and carry consistent masses.
        let child_area: Rat = node.children.iter().map(|&c| tree.nodes[c].region.area()).sum();
        if child_area != node.region.area() {
            return Err(fail(
                path,
                format!("children areas {child_area} != region area {}", node.region.area()),
            ));
        }
        let mut child_mass_total = Rat::default();
        for &c in &node.children {
            let child = &tree.nodes[c];
            let cpath = format!("node {c} (depth {})", child.depth);
            let Region::Tri(t) = &child.region else {
                return Err(fail(cpath, "non-root node must have a triangle region".into()));
            };
            let q = measure.prob_triangle(t);
            let expect = &node.mass * &q;
            if expect != child.mass {
                return Err(fail(cpath, "stored mass disagrees with the measure".into()));
            }
            child_mass_total += q;
            match &child.kind {
                NodeKind::Terminal { label } => {
                    match s.g.triangle_face_classification(t) {
                        crate::subdivision::Classification::Single(f)
                            if s.g.face_label(f) == label => {}
                        crate::subdivision::Classification::Single(f) => {
                            return Err(fail(
                                cpath,
                                format!(
                                    "terminal label {label:?} but region lies in {:?}",
                                    s.g.face_label(f)
                                ),
                            ))
                        }
                        crate::subdivision::Classification::Multiple => {
                            return Err(fail(
                                cpath,
                                format!("terminal label {label:?} but region spans faces"),
                            ))
                        }
                    }
                    summary.terminal_labels_checked += 1;
                }
                NodeKind::Internal => {
                    stack.push((c, measure.condition(t)?));
                }
                NodeKind::Nonterminal { .. } => {}
            }
        }
        if child_mass_total != Rat::from_integer(1.into()) {
            return Err(fail(path, format!("child masses sum to {child_mass_total}, not 1")));
        }
    }

    // Leaf masses over the whole tree.
    let leaf_total: Rat = tree.leaves_with_masses().into_iter().map(|(_, m)| m).sum();
    if leaf_total != Rat::from_integer(1.into()) {
        return Err(fail("tree".into(), format!("leaf masses sum to {leaf_total}")));
    }

    // Backup: rebuilt deterministically; must tile its box exactly.
    let backup = s.backup();
    if !backup.tiles_box_exactly() {
        return Err(fail("backup".into(), "trapezoidal map does not tile the box".into()));
    }
    summary.backup_trapezoids = backup.trapezoid_count();
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::subdivision::normalize_unit_square;
    use crate::tree::build_tree;

    fn build_structure(seed: u64) -> Structure {
        let (g, d, transform) =
            normalize_unit_square(&fixtures::islands(2), &fixtures::islands_skew_measure(2))
                .unwrap();
        let params = TreeParams { r: 4, seed, ..TreeParams::default() };
        let tree = build_tree(&g, &d, &params).unwrap();
        Structure { g, d, transform, tree, backup_seed: seed, c_stab: 6.0 }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let s = build_structure(9);
        let v1 = structure_to_json(&s);
        let s2 = structure_from_json(&v1).unwrap();
        let v2 = structure_to_json(&s2);
        assert_eq!(
            serde_json::to_string(&v1).unwrap(),
            serde_json::to_string(&v2).unwrap()
        );
    }

    #[test]
    fn fresh_build_verifies() {
        let s = build_structure(10);
        let summary = verify_structure(&s).unwrap();
        assert!(summary.partitions_checked >= 1);
        assert!(summary.terminal_labels_checked >= 1);
    }

    #[test]
    fn corrupted_label_fails_verification() {
        let mut s = build_structure(11);
        let victim = s
            .tree
            .nodes
            .iter()
            .position(|n| matches!(n.kind, NodeKind::Terminal { .. }))
            .expect("has terminal leaves");
        if let NodeKind::Terminal { label } = &mut s.tree.nodes[victim].kind {
            *label = "bogus".to_string();
        }
        let err = verify_structure(&s).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(&format!("node {victim}")), "message: {msg}");
    }

    #[test]
    fn perturbed_vertex_fails_tiling() {
        let mut s = build_structure(12);
        // Perturb one child triangle vertex: the area identity must break.
        let victim = s.tree.nodes[0].children[0];
        if let Region::Tri(t) = &s.tree.nodes[victim].region {
            let v = t.verts();
            let moved = Triangle::new(
                Point::new(&v[0].x + crate::geom::rat(1, 1 << 20), v[0].y.clone()),
                v[1].clone(),
                v[2].clone(),
            )
            .unwrap();
            s.tree.nodes[victim].region = Region::Tri(moved);
        }
        let err = verify_structure(&s).unwrap_err();
        assert!(err.to_string().contains("node 0"), "message: {err}");
    }
}
