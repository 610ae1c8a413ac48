//! The recursive distribution-sensitive partition tree and its two-phase
//! query.
//!
//! Each internal node holds a measure partition of its region; the Steiner
//! triangulation of the induced arrangement provides the children, ordered
//! by decreasing mass so the linear descent scan finds heavy children early.
//! Terminal leaves sit inside a single face of the subdivision and answer
//! queries outright; every other leaf defers to the trapezoidal backup.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::geom::{orient, rat_i, ConvexPolygon, Point, Rat, Segment, Triangle};
use crate::measure::MeasureSpec;
use crate::partition::{
    build_measure_partition, PartitionParams, PartitionSequence,
};
use crate::subdivision::{Classification, Subdivision};
use crate::trapmap::TrapMap;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeafReason {
    DepthCap,
    ZeroMass,
    BuildFailed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Internal,
    Terminal { label: String },
    Nonterminal { reason: LeafReason },
}

/// Node region: the unit square at the root, a closed triangle below.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Region {
    UnitSquare,
    Tri(Triangle),
}

impl Region {
    pub fn polygon(&self) -> ConvexPolygon {
        match self {
            Region::UnitSquare => {
                ConvexPolygon::rectangle(&rat_i(0), &rat_i(0), &rat_i(1), &rat_i(1))
            }
            Region::Tri(t) => t.to_polygon(),
        }
    }

    pub fn area(&self) -> Rat {
        match self {
            Region::UnitSquare => rat_i(1),
            Region::Tri(t) => t.area(),
        }
    }
}

/// Per-node record of the partition build, kept for verification and
/// rendering.
#[derive(Clone, Debug)]
pub struct LevelBuild {
    pub seq: PartitionSequence,
    pub retries: u32,
    pub max_incremental_mass: Rat,
    pub max_line_crossings: usize,
    pub test_line_count: usize,
    pub tree_edges: Vec<Segment>,
    pub tree_max_crossings: usize,
    pub trapezoid_fallbacks: usize,
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub parent: Option<usize>,
    pub depth: usize,
    pub region: Region,
    /// Exact mass of the region under the root measure.
    pub mass: Rat,
    pub kind: NodeKind,
    /// Children ordered by decreasing mass (ties: lexicographic triangle).
    pub children: Vec<usize>,
    pub level: Option<LevelBuild>,
}

#[derive(Clone, Debug)]
pub struct TreeParams {
    pub r: usize,
    pub alpha: Rat,
    pub seed: u64,
    pub partition: PartitionParams,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            r: 8,
            alpha: crate::geom::rat(1, 4),
            seed: 0,
            partition: PartitionParams::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PartitionTree {
    pub nodes: Vec<TreeNode>,
    pub params: TreeParams,
    pub depth_cap: usize,
    pub n: usize,
    /// Nodes degraded to nonterminal leaves by a failed level build.
    pub degraded: Vec<usize>,
    /// Per-attempt verification rows from the build (not serialized).
    pub attempt_log: Vec<AttemptLogRow>,
}

#[derive(Clone, Debug)]
pub struct AttemptLogRow {
    pub node: usize,
    pub attempt: u32,
    pub m: usize,
    pub covers_all: bool,
    pub max_incremental_mass: Rat,
    pub max_line_crossings: usize,
    pub accepted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    /// Point-line sign tests, including the 4 unit-square checks.
    pub comparisons: usize,
    pub depth: usize,
    pub terminal: bool,
    pub used_backup: bool,
}

/// floor(alpha * log_r n), computed exactly: the largest d >= 0 with
/// r^(b*d) <= n^a for alpha = a/b.
pub fn exact_depth_cap(n: usize, r: usize, alpha: &Rat) -> usize {
    use num_bigint::BigInt;
    assert!(r >= 2 && n >= 1);
    let a: u32 = alpha.numer().try_into().expect("alpha numerator fits u32");
    let b: u32 = alpha.denom().try_into().expect("alpha denominator fits u32");
    let target = BigInt::from(n).pow(a);
    let step = BigInt::from(r).pow(b);
    let mut lhs = step.clone();
    let mut d = 0usize;
    while lhs <= target && d < 64 {
        d += 1;
        lhs *= &step;
    }
    d
}

fn node_seed(seed: u64, node: u64) -> u64 {
    let mut z = seed ^ node.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const NODE_BUDGET: usize = 500_000;

/// Builds the tree for a normalized pair (G, D). The root partitions the
/// unit square; each Steiner-triangulation face becomes a child, classified
/// terminal / nonterminal / internal; internal children recurse on the
/// conditioned measure. Build failures below the root degrade to
/// nonterminal leaves (the backup stays correct); a root failure is an
/// error.
pub fn build_tree(g: &Subdivision, d: &MeasureSpec, params: &TreeParams) -> Result<PartitionTree> {
    if params.r < 2 {
        return Err(Error::Invalid("tree requires r >= 2".into()));
    }
    if !(params.alpha.is_positive() && params.alpha < crate::geom::rat(1, 2)) {
        return Err(Error::Invalid("tree requires 0 < alpha < 1/2".into()));
    }
    if !d.contained_in_unit_square() {
        return Err(Error::Invalid("measure support must lie in the unit square".into()));
    }
    let depth_cap = exact_depth_cap(g.n(), params.r, &params.alpha);
    let mut tree = PartitionTree {
        nodes: vec![TreeNode {
            parent: None,
            depth: 0,
            region: Region::UnitSquare,
            mass: Rat::one(),
            kind: NodeKind::Internal,
            children: Vec::new(),
            level: None,
        }],
        params: params.clone(),
        depth_cap,
        n: g.n(),
        degraded: Vec::new(),
        attempt_log: Vec::new(),
    };
    expand_node(&mut tree, 0, g, d)?;
    Ok(tree)
}

fn expand_node(
    tree: &mut PartitionTree,
    node: usize,
    g: &Subdivision,
    measure: &MeasureSpec,
) -> Result<()> {
    use rand::SeedableRng;
    let mut rng =
        rand_chacha::ChaCha8Rng::seed_from_u64(node_seed(tree.params.seed, node as u64));
    let build = match build_measure_partition(measure, tree.params.r, &tree.params.partition, &mut rng)
    {
        Ok(b) => b,
        Err(e) => {
            if node == 0 {
                return Err(e);
            }
            tree.nodes[node].kind = NodeKind::Nonterminal { reason: LeafReason::BuildFailed };
            tree.degraded.push(node);
            return Ok(());
        }
    };
    let region_poly = tree.nodes[node].region.polygon();
    let scaffold = match crate::lowcross::triangulate_arrangement(&build.seq, &region_poly) {
        Ok(s) => s,
        Err(e) => {
            if node == 0 {
                return Err(e);
            }
            tree.nodes[node].kind = NodeKind::Nonterminal { reason: LeafReason::BuildFailed };
            tree.degraded.push(node);
            return Ok(());
        }
    };
    for a in &build.attempts {
        tree.attempt_log.push(AttemptLogRow {
            node,
            attempt: a.attempt,
            m: a.m,
            covers_all: a.covers_all,
            max_incremental_mass: a.max_incremental_mass.clone(),
            max_line_crossings: a.max_line_crossings,
            accepted: a.accepted,
        });
    }
    tree.nodes[node].level = Some(LevelBuild {
        seq: build.seq,
        retries: build.retries,
        max_incremental_mass: build.report.max_incremental_mass.clone(),
        max_line_crossings: build.report.max_line_crossings,
        test_line_count: build.report.test_line_count,
        tree_edges: scaffold.tree.segments(),
        tree_max_crossings: scaffold.tree.max_test_line_crossings,
        trapezoid_fallbacks: scaffold.triangulation.trapezoid_fallbacks,
    });

    // Children: triangulation triangles with exact conditional masses.
    let mut kids: Vec<(Triangle, Rat)> = scaffold
        .triangulation
        .triangles
        .into_iter()
        .map(|t| {
            let q = measure.prob_triangle(&t);
            (t, q)
        })
        .collect();
    let total: Rat = kids.iter().map(|(_, q)| q.clone()).sum();
    if total != Rat::one() {
        return Err(Error::Degenerate(format!(
            "child masses sum to {total}, not 1 (node {node})"
        )));
    }
    kids.sort_by(|(ta, qa), (tb, qb)| qb.cmp(qa).then_with(|| ta.lex_key().cmp(&tb.lex_key())));

    let node_mass = tree.nodes[node].mass.clone();
    let child_depth = tree.nodes[node].depth + 1;
    let mut recurse: Vec<(usize, Rat)> = Vec::new();
    for (t, q) in kids {
        if tree.nodes.len() >= NODE_BUDGET {
            return Err(Error::Invalid("tree node budget exceeded".into()));
        }
        let classification = g.triangle_face_classification(&t);
        let kind = match classification {
            Classification::Single(f) => {
                NodeKind::Terminal { label: g.face_label(f).to_string() }
            }
            Classification::Multiple => {
                if child_depth > tree.depth_cap {
                    NodeKind::Nonterminal { reason: LeafReason::DepthCap }
                } else if q.is_zero() {
                    NodeKind::Nonterminal { reason: LeafReason::ZeroMass }
                } else {
                    NodeKind::Internal
                }
            }
        };
        let id = tree.nodes.len();
        let recurse_here = kind == NodeKind::Internal;
        tree.nodes.push(TreeNode {
            parent: Some(node),
            depth: child_depth,
            region: Region::Tri(t),
            mass: &node_mass * &q,
            kind,
            children: Vec::new(),
            level: None,
        });
        tree.nodes[node].children.push(id);
        if recurse_here {
            recurse.push((id, q));
        }
    }
    for (id, _q) in recurse {
        let Region::Tri(t) = tree.nodes[id].region.clone() else { unreachable!() };
        let conditioned = measure.condition(&t)?;
        expand_node(tree, id, g, &conditioned)?;
    }
    Ok(())
}

impl PartitionTree {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn max_children(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> impl Iterator<Item = (usize, &TreeNode)> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| !matches!(n.kind, NodeKind::Internal))
    }

    /// All leaves with their exact masses; sums to 1.
    pub fn leaves_with_masses(&self) -> Vec<(usize, Rat)> {
        self.leaves().map(|(i, n)| (i, n.mass.clone())).collect()
    }

    /// Leaves as labeled probability cells (cell id = node index).
    pub fn leaf_cells(&self) -> Vec<crate::measure::CellProbability> {
        self.leaves()
            .map(|(i, n)| crate::measure::CellProbability {
                cell: format!("leaf{i}"),
                mass: n.mass.clone(),
            })
            .collect()
    }

    pub fn terminal_leaf_count(&self) -> usize {
        self.leaves()
            .filter(|(_, n)| matches!(n.kind, NodeKind::Terminal { .. }))
            .count()
    }

    /// Total retries across all level builds.
    pub fn total_retries(&self) -> u32 {
        self.nodes.iter().filter_map(|n| n.level.as_ref()).map(|l| l.retries).sum()
    }
}

/// Closed point-in-triangle scan with early exit; returns (contained,
/// comparisons spent).
fn scan_triangle(p: &Point, t: &Triangle, comparisons: &mut usize) -> bool {
    let v = t.verts();
    for i in 0..3 {
        *comparisons += 1;
        if orient(&v[i], &v[(i + 1) % 3], p) < 0 {
            return false;
        }
    }
    true
}

/// Two-phase query: 4 unit-square comparisons, descent by first-containing
/// child in stored (mass-descending) order, then either a terminal label or
/// the trapezoidal backup. The returned label equals the brute oracle's for
/// any point off all edges.
pub fn query(
    tree: &PartitionTree,
    backup: &TrapMap,
    outer_label: &str,
    p: &Point,
) -> (String, QueryStats) {
    let mut stats = QueryStats { comparisons: 4, depth: 0, terminal: false, used_backup: false };
    let zero = Rat::zero();
    let one = Rat::one();
    if p.x < zero || p.x > one || p.y < zero || p.y > one {
        stats.used_backup = true;
        return (outer_label.to_string(), stats);
    }
    let mut node = 0usize;
    loop {
        match &tree.nodes[node].kind {
            NodeKind::Terminal { label } => {
                stats.terminal = true;
                return (label.clone(), stats);
            }
            NodeKind::Nonterminal { .. } => {
                let (label, c) = backup.locate(p);
                stats.comparisons += c;
                stats.used_backup = true;
                return (label.to_string(), stats);
            }
            NodeKind::Internal => {
                let mut found = None;
                for &c in &tree.nodes[node].children {
                    let Region::Tri(t) = &tree.nodes[c].region else { unreachable!() };
                    if scan_triangle(p, t, &mut stats.comparisons) {
                        found = Some(c);
                        break;
                    }
                }
                match found {
                    Some(c) => {
                        node = c;
                        stats.depth += 1;
                    }
                    None => {
                        // Children tile the region, so this only happens for
                        // the root on boundary-degenerate input; stay correct
                        // via the backup.
                        let (label, c) = backup.locate(p);
                        stats.comparisons += c;
                        stats.used_backup = true;
                        return (label.to_string(), stats);
                    }
                }
            }
        }
    }
}
