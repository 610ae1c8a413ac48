//! The input subdivision: ingestion, validation, normalization, and the
//! brute-force location oracle.
//!
//! Faces are given explicitly in the input (label + one representative
//! interior point). The oracle decomposes the plane into vertical slabs
//! between vertex abscissae, orders the spanning edges inside each slab, and
//! joins cells across slab boundaries (minus vertical edges) with union-find.
//! That computes the edge-bounded regions exactly for any valid plane graph,
//! disconnected or not, and a validator checks the regions are in bijection
//! with the declared faces.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::geom::{
    format_rat, orient, parse_rat, rat, rat_i, segments_intersect, Point, Rat,
    Segment, SegmentRelation, Triangle,
};
use crate::measure::{MeasureComponent, MeasureSpec};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Face {
    pub label: String,
    pub rep: Point,
}

/// A possibly disconnected planar subdivision with labeled faces.
#[derive(Clone, Debug)]
pub struct Subdivision {
    vertices: Vec<Point>,
    edges: Vec<(usize, usize)>,
    faces: Vec<Face>,
    segments: Vec<Segment>,
    locator: Locator,
    /// region id -> face index
    region_face: Vec<usize>,
    outer_face: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    Single(usize),
    Multiple,
}

impl Subdivision {
    pub fn new(vertices: Vec<Point>, edges: Vec<(usize, usize)>, faces: Vec<Face>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Invalid("subdivision needs at least one vertex".into()));
        }
        {
            let mut order: Vec<usize> = (0..vertices.len()).collect();
            order.sort_by(|&a, &b| vertices[a].lex_cmp(&vertices[b]));
            for w in order.windows(2) {
                if vertices[w[0]] == vertices[w[1]] {
                    return Err(Error::Invalid(format!(
                        "duplicate vertex {:?}",
                        vertices[w[0]]
                    )));
                }
            }
        }
        let mut segments = Vec::with_capacity(edges.len());
        for &(i, j) in &edges {
            if i >= vertices.len() || j >= vertices.len() {
                return Err(Error::Invalid(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::Invalid(format!("self-loop edge at vertex {i}")));
            }
            segments.push(Segment::new(vertices[i].clone(), vertices[j].clone())?);
        }
        validate_planarity(&edges, &segments)?;
        if faces.is_empty() {
            return Err(Error::Invalid("subdivision needs at least one face".into()));
        }
        {
            let mut seen = BTreeMap::new();
            for f in &faces {
                if seen.insert(f.label.clone(), ()).is_some() {
                    return Err(Error::Invalid(format!("duplicate face label {:?}", f.label)));
                }
            }
        }

        let locator = Locator::build(&vertices, &segments);

        // Representative points must sit in pairwise distinct regions, off
        // all edges, and cover every region.
        let mut region_face = vec![usize::MAX; locator.region_count];
        for (fi, f) in faces.iter().enumerate() {
            let (region, on_boundary) = locator.locate_region(&f.rep);
            if on_boundary {
                return Err(Error::Invalid(format!(
                    "representative point of face {:?} lies on an edge or vertex",
                    f.label
                )));
            }
            if region_face[region] != usize::MAX {
                return Err(Error::Invalid(format!(
                    "faces {:?} and {:?} share an edge-bounded region",
                    faces[region_face[region]].label, f.label
                )));
            }
            region_face[region] = fi;
        }
        if let Some(r) = region_face.iter().position(|&f| f == usize::MAX) {
            return Err(Error::Invalid(format!(
                "{} edge-bounded regions but {} faces declared (region {} has no representative)",
                locator.region_count,
                faces.len(),
                r
            )));
        }
        let outer_face = region_face[locator.outer_region];
        Ok(Subdivision { vertices, edges, faces, segments, locator, region_face, outer_face })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Structure size: the vertex count.
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn outer_label(&self) -> &str {
        &self.faces[self.outer_face].label
    }

    pub fn face_index(&self, label: &str) -> Option<usize> {
        self.faces.iter().position(|f| f.label == label)
    }

    /// Exact location oracle: the face containing p. For p on an edge or
    /// vertex the flag is set and the label is one of the incident faces
    /// (deterministic choice).
    pub fn brute_locate(&self, p: &Point) -> (&str, bool) {
        let (region, on_boundary) = self.locator.locate_region(p);
        (&self.faces[self.region_face[region]].label, on_boundary)
    }

    /// Single(face) iff no edge of G meets the open interior of t and no
    /// vertex of G lies strictly inside t.
    pub fn triangle_face_classification(&self, t: &Triangle) -> Classification {
        let (bx0, by0, bx1, by1) = t.bbox();
        for v in &self.vertices {
            if v.x < bx0 || v.x > bx1 || v.y < by0 || v.y > by1 {
                continue;
            }
            if crate::geom::point_in_triangle(v, t) == crate::geom::Containment::Interior {
                return Classification::Multiple;
            }
        }
        for s in &self.segments {
            let (ex0, ex1) = if s.a.x <= s.b.x { (&s.a.x, &s.b.x) } else { (&s.b.x, &s.a.x) };
            let (ey0, ey1) = if s.a.y <= s.b.y { (&s.a.y, &s.b.y) } else { (&s.b.y, &s.a.y) };
            if *ex1 < bx0 || *ex0 > bx1 || *ey1 < by0 || *ey0 > by1 {
                continue;
            }
            if crate::geom::segment_meets_triangle_interior(s, t) {
                return Classification::Multiple;
            }
        }
        let (label, _) = self.brute_locate(&t.centroid());
        Classification::Single(self.face_index(label).expect("known label"))
    }

    pub fn face_label(&self, idx: usize) -> &str {
        &self.faces[idx].label
    }
}

fn validate_planarity(edges: &[(usize, usize)], segments: &[Segment]) -> Result<()> {
    // Sweep by min-x so only bbox-overlapping pairs get the exact test.
    let mut order: Vec<usize> = (0..segments.len()).collect();
    let key = |s: &Segment| -> (Rat, Rat) {
        let x = s.a.x.clone().min(s.b.x.clone());
        let y = s.a.y.clone().min(s.b.y.clone());
        (x, y)
    };
    let keys: Vec<(Rat, Rat)> = segments.iter().map(key).collect();
    let max_x: Vec<Rat> = segments.iter().map(|s| s.a.x.clone().max(s.b.x.clone())).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if keys[j].0 > max_x[i] {
                break;
            }
            let (si, sj) = (&segments[i], &segments[j]);
            match segments_intersect(si, sj) {
                SegmentRelation::Disjoint => {}
                SegmentRelation::Cross => return Err(Error::NonPlanarInput(i, j)),
                SegmentRelation::Touch => {
                    let (a, b) = edges[i];
                    let (c, d) = edges[j];
                    if a != c && a != d && b != c && b != d {
                        // Contact away from a shared endpoint (T-junction).
                        return Err(Error::NonPlanarInput(i, j));
                    }
                }
            }
        }
    }
    Ok(())
}

// --- slab locator -----------------------------------------------------------

#[derive(Clone, Debug)]
struct SlabEdge {
    /// Left and right endpoints (l.x < r.x).
    l: Point,
    r: Point,
}

#[derive(Clone, Debug)]
struct Slab {
    /// Indices into the spanning-edge pool, sorted bottom to top.
    edges: Vec<u32>,
    /// Cell id of interval k (k in 0..=edges.len()).
    cell_base: usize,
}

#[derive(Clone, Debug)]
struct Locator {
    /// Distinct vertex abscissae, ascending.
    xs: Vec<Rat>,
    /// Non-vertical edges oriented left to right.
    spanning: Vec<SlabEdge>,
    /// Slab i covers (xs[i-1], xs[i]) for interior i; sentinels at the ends.
    slabs: Vec<Slab>,
    /// Vertical edges grouped by abscissa: xs index -> sorted (ylo, yhi).
    verticals: BTreeMap<usize, Vec<(Rat, Rat)>>,
    /// Vertices in lexicographic order (for binary-search membership).
    vertex_set: Vec<Point>,
    region_of_cell: Vec<usize>,
    region_count: usize,
    outer_region: usize,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Locator {
    fn build(vertices: &[Point], segments: &[Segment]) -> Locator {
        let mut xs: Vec<Rat> = vertices.iter().map(|p| p.x.clone()).collect();
        xs.sort();
        xs.dedup();

        let mut verticals: BTreeMap<usize, Vec<(Rat, Rat)>> = BTreeMap::new();
        let mut spanning: Vec<SlabEdge> = Vec::new();
        for s in segments {
            if s.a.x == s.b.x {
                let xi = xs.binary_search(&s.a.x).expect("vertex abscissa");
                let (lo, hi) = if s.a.y <= s.b.y {
                    (s.a.y.clone(), s.b.y.clone())
                } else {
                    (s.b.y.clone(), s.a.y.clone())
                };
                verticals.entry(xi).or_default().push((lo, hi));
            } else if s.a.x < s.b.x {
                spanning.push(SlabEdge { l: s.a.clone(), r: s.b.clone() });
            } else {
                spanning.push(SlabEdge { l: s.b.clone(), r: s.a.clone() });
            }
        }
        for v in verticals.values_mut() {
            v.sort();
        }

        // Interior slabs between consecutive xs, plus sentinels at both
        // ends. A sweep keeps the active edge set instead of re-filtering.
        let interior = xs.len().saturating_sub(1);
        let mut starts: Vec<Vec<u32>> = vec![Vec::new(); xs.len()];
        let mut ends: Vec<Vec<u32>> = vec![Vec::new(); xs.len()];
        for (e, se) in spanning.iter().enumerate() {
            let si = xs.binary_search(&se.l.x).expect("vertex abscissa");
            let ei = xs.binary_search(&se.r.x).expect("vertex abscissa");
            starts[si].push(e as u32);
            ends[ei].push(e as u32);
        }
        let mut slabs: Vec<Slab> = Vec::with_capacity(interior + 2);
        slabs.push(Slab { edges: Vec::new(), cell_base: 0 }); // x < xs[0]
        let mut active: Vec<u32> = Vec::new();
        for i in 0..interior {
            for &e in &starts[i] {
                active.push(e);
            }
            active.retain(|&e| !ends[i].contains(&e));
            let mid = (&xs[i] + &xs[i + 1]) / rat_i(2);
            let mut in_slab = active.clone();
            // Order by y at the slab midpoint; edges are non-crossing so the
            // order holds throughout the open slab.
            let ys: Vec<Rat> =
                in_slab.iter().map(|&e| y_at(&spanning[e as usize], &mid)).collect();
            let mut idx: Vec<usize> = (0..in_slab.len()).collect();
            idx.sort_by(|&a, &b| ys[a].cmp(&ys[b]));
            in_slab = idx.iter().map(|&k| in_slab[k]).collect();
            slabs.push(Slab { edges: in_slab, cell_base: 0 });
        }
        slabs.push(Slab { edges: Vec::new(), cell_base: 0 }); // x > xs.last

        let mut next = 0usize;
        for slab in &mut slabs {
            slab.cell_base = next;
            next += slab.edges.len() + 1;
        }
        let cell_count = next;

        let mut uf = UnionFind::new(cell_count);
        // Join cells across each slab boundary where the shared open vertical
        // interval minus vertical edges is nonempty. The interval lists are
        // sorted by height, so a two-pointer merge visits every overlapping
        // pair once.
        for bi in 0..xs.len() {
            let left = &slabs[bi];
            let right = &slabs[bi + 1];
            let x = &xs[bi];
            let empty = Vec::new();
            let vert = verticals.get(&bi).unwrap_or(&empty);
            let left_bounds = interval_bounds(&spanning, left, x);
            let right_bounds = interval_bounds(&spanning, right, x);
            let (mut li, mut ri) = (0usize, 0usize);
            while li < left_bounds.len() && ri < right_bounds.len() {
                let (llo, lhi) = &left_bounds[li];
                let (rlo, rhi) = &right_bounds[ri];
                let lo = max_bound(llo, rlo);
                let hi = min_bound(lhi, rhi);
                if open_interval_nonempty_minus(&lo, &hi, vert) {
                    uf.union(left.cell_base + li, right.cell_base + ri);
                }
                // Advance whichever interval ends first.
                let advance_left = match (lhi, rhi) {
                    (Bound::Infinite, Bound::Infinite) => true,
                    (Bound::Infinite, _) => false,
                    (_, Bound::Infinite) => true,
                    (Bound::At(a), Bound::At(b)) => a <= b,
                };
                if advance_left {
                    li += 1;
                } else {
                    ri += 1;
                }
            }
        }

        let mut region_of_cell = vec![usize::MAX; cell_count];
        let mut region_count = 0;
        for c in 0..cell_count {
            let root = uf.find(c);
            if region_of_cell[root] == usize::MAX {
                region_of_cell[root] = region_count;
                region_count += 1;
            }
            region_of_cell[c] = region_of_cell[root];
        }
        let outer_region = region_of_cell[0];

        let mut vertex_set = vertices.to_vec();
        vertex_set.sort_by(|a, b| a.lex_cmp(b));
        Locator {
            xs,
            spanning,
            slabs,
            verticals,
            vertex_set,
            region_of_cell,
            region_count,
            outer_region,
        }
    }

    /// (region id, on-boundary flag).
    fn locate_region(&self, p: &Point) -> (usize, bool) {
        if self.xs.is_empty() {
            return (self.outer_region, false);
        }
        let mut on_boundary = self.vertex_set.binary_search_by(|v| v.lex_cmp(p)).is_ok();
        // Count of abscissae <= p.x selects the slab.
        let le = self.xs.partition_point(|x| x <= &p.x);
        let at_boundary = le > 0 && self.xs[le - 1] == p.x;
        // On a boundary abscissa, evaluate in the slab ending there (the
        // left rule); any edge contact is flagged separately.
        let slab_idx = if at_boundary { le - 1 } else { le };
        if at_boundary {
            let xi = le - 1;
            if let Some(vs) = self.verticals.get(&xi) {
                if vs.iter().any(|(lo, hi)| *lo <= p.y && p.y <= *hi) {
                    on_boundary = true;
                }
            }
        }
        let slab = &self.slabs[slab_idx];
        let mut below = 0usize;
        for &ei in &slab.edges {
            let e = &self.spanning[ei as usize];
            match orient(&e.l, &e.r, p) {
                1 => below += 1,
                0 => on_boundary = true,
                _ => {}
            }
        }
        (self.region_of_cell[slab.cell_base + below], on_boundary)
    }
}

/// Exact y of the edge's line at abscissa x (the edge spans it).
fn y_at(e: &SlabEdge, x: &Rat) -> Rat {
    let dx = &e.r.x - &e.l.x;
    &e.l.y + (x - &e.l.x) * (&e.r.y - &e.l.y) / dx
}

#[derive(Clone, Debug)]
enum Bound {
    Infinite,
    At(Rat),
}

fn interval_bounds(spanning: &[SlabEdge], slab: &Slab, x: &Rat) -> Vec<(Bound, Bound)> {
    let ys: Vec<Rat> = slab
        .edges
        .iter()
        .map(|&e| y_at(&spanning[e as usize], x))
        .collect();
    let mut out = Vec::with_capacity(ys.len() + 1);
    for k in 0..=ys.len() {
        let lo = if k == 0 { Bound::Infinite } else { Bound::At(ys[k - 1].clone()) };
        let hi = if k == ys.len() { Bound::Infinite } else { Bound::At(ys[k].clone()) };
        out.push((lo, hi));
    }
    out
}

fn max_bound(a: &Bound, b: &Bound) -> Bound {
    match (a, b) {
        (Bound::Infinite, x) | (x, Bound::Infinite) => x.clone(),
        (Bound::At(x), Bound::At(y)) => Bound::At(x.clone().max(y.clone())),
    }
}

fn min_bound(a: &Bound, b: &Bound) -> Bound {
    match (a, b) {
        (Bound::Infinite, x) | (x, Bound::Infinite) => x.clone(),
        (Bound::At(x), Bound::At(y)) => Bound::At(x.clone().min(y.clone())),
    }
}

/// True iff the open interval (lo, hi) minus the union of the closed spans
/// is nonempty. Infinite bounds denote -inf / +inf.
fn open_interval_nonempty_minus(lo: &Bound, hi: &Bound, spans: &[(Rat, Rat)]) -> bool {
    if let (Bound::At(l), Bound::At(h)) = (lo, hi) {
        if l >= h {
            return false;
        }
    }
    // Walk sorted spans, tracking how far coverage extends from lo.
    let mut cover = match lo {
        Bound::Infinite => return true, // spans are finite, cannot cover (-inf, ..)
        Bound::At(l) => l.clone(),
    };
    for (slo, shi) in spans {
        if *shi <= cover {
            continue;
        }
        if *slo > cover {
            return true; // gap (cover, slo) inside the interval
        }
        cover = shi.clone();
        if let Bound::At(h) = hi {
            if cover >= *h {
                return false;
            }
        }
    }
    match hi {
        Bound::Infinite => true,
        Bound::At(h) => cover < *h,
    }
}

// --- normalization ----------------------------------------------------------

/// Uniform scale + translation applied to both G and D so everything fits in
/// [1/8, 7/8]^2 inside the unit square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transform {
    pub scale: Rat,
    pub dx: Rat,
    pub dy: Rat,
}

impl Transform {
    pub fn identity() -> Self {
        Transform { scale: rat_i(1), dx: rat_i(0), dy: rat_i(0) }
    }

    pub fn apply(&self, p: &Point) -> Point {
        Point::new(&self.dx + &self.scale * &p.x, &self.dy + &self.scale * &p.y)
    }

    pub fn unapply(&self, p: &Point) -> Point {
        Point::new((&p.x - &self.dx) / &self.scale, (&p.y - &self.dy) / &self.scale)
    }

    pub fn apply_triangle(&self, t: &Triangle) -> Triangle {
        let v = t.verts();
        Triangle::new(self.apply(&v[0]), self.apply(&v[1]), self.apply(&v[2]))
            .expect("uniform scaling preserves nondegeneracy")
    }

    pub fn is_identity(&self) -> bool {
        self.scale == rat_i(1) && self.dx.is_zero() && self.dy.is_zero()
    }
}

/// Maps the bounding box of G, D's support, and the face representatives into
/// [1/8, 7/8]^2 with a single uniform scale. Triangle probabilities are
/// invariant under the pair transformation.
pub fn normalize_unit_square(
    g: &Subdivision,
    d: &MeasureSpec,
) -> Result<(Subdivision, MeasureSpec, Transform)> {
    let mut x0 = g.vertices[0].x.clone();
    let mut y0 = g.vertices[0].y.clone();
    let mut x1 = x0.clone();
    let mut y1 = y0.clone();
    let mut extend = |p: &Point| {
        if p.x < x0 {
            x0 = p.x.clone();
        }
        if p.x > x1 {
            x1 = p.x.clone();
        }
        if p.y < y0 {
            y0 = p.y.clone();
        }
        if p.y > y1 {
            y1 = p.y.clone();
        }
    };
    for v in &g.vertices {
        extend(v);
    }
    for f in &g.faces {
        extend(&f.rep);
    }
    let (mx0, my0, mx1, my1) = d.support_bbox();
    extend(&Point::new(mx0, my0));
    extend(&Point::new(mx1, my1));

    let w = &x1 - &x0;
    let h = &y1 - &y0;
    let extent = w.clone().max(h.clone());
    let scale = if extent.is_zero() { rat_i(1) } else { rat(3, 4) / &extent };
    // Center the shorter axis inside [1/8, 7/8].
    let dx = rat(1, 8) + (rat(3, 4) - &w * &scale) / rat_i(2) - &x0 * &scale;
    let dy = rat(1, 8) + (rat(3, 4) - &h * &scale) / rat_i(2) - &y0 * &scale;
    let t = Transform { scale, dx, dy };

    let vertices: Vec<Point> = g.vertices.iter().map(|p| t.apply(p)).collect();
    let faces: Vec<Face> = g
        .faces
        .iter()
        .map(|f| Face { label: f.label.clone(), rep: t.apply(&f.rep) })
        .collect();
    let g2 = Subdivision::new(vertices, g.edges.clone(), faces)?;
    let comps: Vec<MeasureComponent> = d
        .components()
        .iter()
        .map(|c| MeasureComponent { support: t.apply_triangle(&c.support), weight: c.weight.clone() })
        .collect();
    let d2 = MeasureSpec::new(comps)?;
    Ok((g2, d2, t))
}

// --- file format -------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SubdivisionFile {
    vertices: Vec<[String; 2]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<FaceFile>,
}

#[derive(Serialize, Deserialize)]
struct FaceFile {
    label: String,
    point: [String; 2],
}

pub fn subdivision_to_json(g: &Subdivision) -> serde_json::Value {
    let file = SubdivisionFile {
        vertices: g
            .vertices
            .iter()
            .map(|p| [format_rat(&p.x), format_rat(&p.y)])
            .collect(),
        edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        faces: g
            .faces
            .iter()
            .map(|f| FaceFile {
                label: f.label.clone(),
                point: [format_rat(&f.rep.x), format_rat(&f.rep.y)],
            })
            .collect(),
    };
    serde_json::to_value(file).expect("subdivision serializes")
}

pub fn subdivision_from_json(v: &serde_json::Value) -> Result<Subdivision> {
    let file: SubdivisionFile = serde_json::from_value(v.clone())
        .map_err(|e| Error::Parse(format!("subdivision file: {e}")))?;
    let mut vertices = Vec::with_capacity(file.vertices.len());
    for [x, y] in &file.vertices {
        vertices.push(Point::new(parse_rat(x)?, parse_rat(y)?));
    }
    let edges: Vec<(usize, usize)> = file.edges.iter().map(|&[i, j]| (i, j)).collect();
    let mut faces = Vec::with_capacity(file.faces.len());
    for f in &file.faces {
        faces.push(Face {
            label: f.label.clone(),
            rep: Point::new(parse_rat(&f.point[0])?, parse_rat(&f.point[1])?),
        });
    }
    Subdivision::new(vertices, edges, faces)
}

pub fn load_subdivision(path: &std::path::Path) -> Result<Subdivision> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("subdivision file: {e}")))?;
    subdivision_from_json(&v)
}

pub fn save_subdivision(g: &Subdivision, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&subdivision_to_json(g))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::geom::Containment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    fn triangle_fixture() -> Subdivision {
        Subdivision::new(
            vec![p(0, 0), p(4, 0), p(0, 4)],
            vec![(0, 1), (1, 2), (2, 0)],
            vec![
                Face { label: "inner".into(), rep: Point::new(rat(1, 2), rat(1, 2)) },
                Face { label: "outer".into(), rep: p(10, 10) },
            ],
        )
        .unwrap()
    }

    #[test]
    fn load_single_triangle() {
        let g = triangle_fixture();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.faces().len(), 2);
        assert_eq!(g.outer_label(), "outer");
    }

    #[test]
    fn two_disjoint_squares_accepted() {
        // 8 vertices, 8 edges, 3 faces: disconnected input is first-class.
        let g = fixtures::islands(2);
        assert_eq!(g.n(), 8);
        assert_eq!(g.edges().len(), 8);
        assert_eq!(g.faces().len(), 3);
    }

    #[test]
    fn crossing_edges_rejected() {
        let r = Subdivision::new(
            vec![p(0, 0), p(2, 2), p(0, 2), p(2, 0)],
            vec![(0, 1), (2, 3)],
            vec![Face { label: "outer".into(), rep: p(5, 5) }],
        );
        assert!(matches!(r, Err(Error::NonPlanarInput(0, 1))));
    }

    #[test]
    fn t_junction_rejected() {
        let r = Subdivision::new(
            vec![p(0, 0), p(2, 0), p(1, 0), p(1, 2)],
            vec![(0, 1), (2, 3)],
            vec![Face { label: "outer".into(), rep: p(5, 5) }],
        );
        assert!(matches!(r, Err(Error::NonPlanarInput(_, _))));
    }

    #[test]
    fn brute_locate_cases() {
        let g = triangle_fixture();
        let centroid = Point::new(rat(4, 3), rat(4, 3));
        assert_eq!(g.brute_locate(&centroid), ("inner", false));
        assert_eq!(g.brute_locate(&p(100, 100)), ("outer", false));
        // On an edge: boundary flag set, label is one of the incident faces.
        let on_edge = Point::new(rat_i(2), rat_i(0));
        let (label, boundary) = g.brute_locate(&on_edge);
        assert!(boundary);
        assert!(label == "inner" || label == "outer");
        // On a vertex.
        let (_, boundary) = g.brute_locate(&p(0, 0));
        assert!(boundary);
    }

    #[test]
    fn brute_locate_agrees_with_representatives() {
        for g in [triangle_fixture(), fixtures::islands(3), fixtures::grid(16)] {
            for f in g.faces() {
                let (label, boundary) = g.brute_locate(&f.rep);
                assert_eq!(label, f.label);
                assert!(!boundary);
            }
        }
    }

    #[test]
    fn grid_locate_exhaustive_cell_centers() {
        let g = fixtures::grid(16); // 4x4 vertices, 3x3 cells
        let m = 3i64;
        for i in 0..m {
            for j in 0..m {
                let c = Point::new(
                    rat(1, 8) + rat(5, 8) * rat(2 * i + 1, 2 * m),
                    rat(1, 8) + rat(5, 8) * rat(2 * j + 1, 2 * m),
                );
                let (label, boundary) = g.brute_locate(&c);
                assert!(!boundary);
                assert_eq!(label, format!("c{i}_{j}"));
            }
        }
    }

    /// Second location route for cycle-only subdivisions: per-cycle ray
    /// parity. Valid when every component is a simple cycle (islands).
    fn parity_locate(g: &Subdivision, p: &Point) -> String {
        // Gather cycles as edge sets via union-find on vertex indices.
        let mut uf: Vec<usize> = (0..g.n()).collect();
        fn find(uf: &mut Vec<usize>, i: usize) -> usize {
            if uf[i] != i {
                let r = find(uf, uf[i]);
                uf[i] = r;
            }
            uf[i]
        }
        for &(i, j) in g.edges() {
            let (a, b) = (find(&mut uf, i), find(&mut uf, j));
            if a != b {
                uf[a] = b;
            }
        }
        let mut inside: Vec<usize> = Vec::new();
        let comps: std::collections::BTreeSet<usize> =
            (0..g.n()).map(|i| find(&mut uf, i)).collect();
        for &c in &comps {
            let mut crossings = 0;
            for (k, &(i, _j)) in g.edges().iter().enumerate() {
                if find(&mut uf, i) != c {
                    continue;
                }
                let s = &g.segments()[k];
                // Upward ray parity with the usual half-open rule.
                let (lo, hi) = if s.a.x <= s.b.x { (&s.a, &s.b) } else { (&s.b, &s.a) };
                if lo.x <= p.x && p.x < hi.x && orient(lo, hi, p) < 0 {
                    crossings += 1;
                }
            }
            if crossings % 2 == 1 {
                inside.push(c);
            }
        }
        for f in g.faces() {
            let mut rep_inside: Vec<usize> = Vec::new();
            for &c in &comps {
                let mut crossings = 0;
                for (k, &(i, _j)) in g.edges().iter().enumerate() {
                    if find(&mut uf, i) != c {
                        continue;
                    }
                    let s = &g.segments()[k];
                    let (lo, hi) = if s.a.x <= s.b.x { (&s.a, &s.b) } else { (&s.b, &s.a) };
                    if lo.x <= f.rep.x && f.rep.x < hi.x && orient(lo, hi, &f.rep) < 0 {
                        crossings += 1;
                    }
                }
                if crossings % 2 == 1 {
                    rep_inside.push(c);
                }
            }
            if rep_inside == inside {
                return f.label.clone();
            }
        }
        panic!("no face matched parity vector");
    }

    #[test]
    fn slab_oracle_matches_parity_oracle_on_islands() {
        let g = fixtures::islands(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut checked = 0;
        while checked < 1000 {
            let q = Point::new(
                rat((rng.next_u64() % 4000) as i64 - 500, 1000),
                rat((rng.next_u64() % 2000) as i64 - 500, 1000),
            );
            let (label, boundary) = g.brute_locate(&q);
            if boundary {
                continue;
            }
            assert_eq!(label, parity_locate(&g, &q));
            checked += 1;
        }
    }

    use rand::RngCore;

    #[test]
    fn classification_cases() {
        let g = triangle_fixture();
        let inside = Triangle::new(
            Point::new(rat(1, 2), rat(1, 2)),
            Point::new(rat(3, 2), rat(1, 2)),
            Point::new(rat(1, 2), rat(3, 2)),
        )
        .unwrap();
        assert_eq!(
            g.triangle_face_classification(&inside),
            Classification::Single(g.face_index("inner").unwrap())
        );
        let straddling = Triangle::new(p(-1, 1), p(1, 1), p(0, 2)).unwrap();
        assert_eq!(g.triangle_face_classification(&straddling), Classification::Multiple);
    }

    #[test]
    fn island_swallowed_by_triangle_is_multiple() {
        // A triangle containing an entire island in its interior must be
        // Multiple: the island's edges meet its interior.
        let g = fixtures::islands(2);
        let (x0, y0, x1, y1) = {
            let vs = g.vertices();
            let mut x0 = vs[0].x.clone();
            let mut y0 = vs[0].y.clone();
            let (mut x1, mut y1) = (x0.clone(), y0.clone());
            for v in &vs[..4] {
                x0 = x0.min(v.x.clone());
                y0 = y0.min(v.y.clone());
                x1 = x1.max(v.x.clone());
                y1 = y1.max(v.y.clone());
            }
            (x0, y0, x1, y1)
        };
        let w = &x1 - &x0;
        let big = Triangle::new(
            Point::new(&x0 - &w, &y0 - &w),
            Point::new(&x1 + rat_i(3) * &w, &y0 - &w),
            Point::new(&x0 - &w, &y1 + rat_i(3) * &w),
        )
        .unwrap();
        assert_eq!(g.triangle_face_classification(&big), Classification::Multiple);
    }

    #[test]
    fn classification_single_implies_sample_agreement() {
        let g = fixtures::islands(2);
        // Small triangle inside island 0's face.
        let f = &g.faces()[0];
        let eps = rat(1, 100);
        let t = Triangle::new(
            Point::new(&f.rep.x - &eps, &f.rep.y - &eps),
            Point::new(&f.rep.x + &eps, &f.rep.y - &eps),
            Point::new(f.rep.x.clone(), &f.rep.y + &eps),
        )
        .unwrap();
        let Classification::Single(fi) = g.triangle_face_classification(&t) else {
            panic!("expected single");
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let q = crate::measure::sample_in_triangle(&t, &mut rng);
            let (label, _) = g.brute_locate(&q);
            assert_eq!(label, g.face_label(fi));
        }
    }

    #[test]
    fn normalization_scales_into_margin_box() {
        let g = triangle_fixture();
        let d = MeasureSpec::uniform_on(
            Triangle::new(p(0, 0), p(4, 0), p(0, 4)).unwrap(),
        );
        let (g2, d2, t) = normalize_unit_square(&g, &d).unwrap();
        assert!(d2.contained_in_unit_square());
        for v in g2.vertices() {
            assert!(v.x >= rat(1, 8) && v.x <= rat(7, 8));
            assert!(v.y >= rat(1, 8) && v.y <= rat(7, 8));
        }
        // Pure scaling: G in [0,10]^2 maps with scale 3/40.
        assert_eq!(t.scale, rat(3, 4) / rat_i(10));

        // Probability invariance over transformed triangle pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cover = d.cover_triangle();
        for _ in 0..50 {
            let a = d.sample_conditional(&cover, &mut rng).unwrap();
            let b = d.sample_conditional(&cover, &mut rng).unwrap();
            let c = d.sample_conditional(&cover, &mut rng).unwrap();
            let Ok(tri) = Triangle::new(a, b, c) else { continue };
            assert_eq!(d.prob_triangle(&tri), d2.prob_triangle(&t.apply_triangle(&tri)));
        }
    }

    #[test]
    fn normalization_identity_when_already_in_box() {
        let g = fixtures::grid(16);
        let d = fixtures::uniform_measure_on_box();
        let (_, _, t) = normalize_unit_square(&g, &d).unwrap();
        assert!(t.is_identity());
    }

    #[test]
    fn file_round_trip_identity() {
        let g = fixtures::islands(3);
        let v = subdivision_to_json(&g);
        let g2 = subdivision_from_json(&v).unwrap();
        let v2 = subdivision_to_json(&g2);
        assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&v2).unwrap());
    }

    #[test]
    fn representative_on_edge_rejected() {
        let r = Subdivision::new(
            vec![p(0, 0), p(4, 0), p(0, 4)],
            vec![(0, 1), (1, 2), (2, 0)],
            vec![
                Face { label: "inner".into(), rep: p(1, 0) },
                Face { label: "outer".into(), rep: p(10, 10) },
            ],
        );
        assert!(r.is_err());
    }

    #[test]
    fn region_face_mismatch_rejected() {
        // Two reps in the same region.
        let r = Subdivision::new(
            vec![p(0, 0), p(4, 0), p(0, 4)],
            vec![(0, 1), (1, 2), (2, 0)],
            vec![
                Face { label: "a".into(), rep: p(1, 1) },
                Face { label: "b".into(), rep: Point::new(rat(1, 2), rat(1, 2)) },
            ],
        );
        assert!(r.is_err());
        // Missing face for a region.
        let r2 = Subdivision::new(
            vec![p(0, 0), p(4, 0), p(0, 4)],
            vec![(0, 1), (1, 2), (2, 0)],
            vec![Face { label: "outer".into(), rep: p(10, 10) }],
        );
        assert!(r2.is_err());
    }

    #[test]
    fn point_in_triangle_boundary_semantics() {
        let t = Triangle::new(p(0, 0), p(2, 0), p(0, 2)).unwrap();
        assert_eq!(crate::geom::point_in_triangle(&p(1, 0), &t), Containment::Boundary);
        assert_eq!(
            crate::geom::point_in_triangle(&Point::new(rat(1, 2), rat(1, 2)), &t),
            Containment::Interior
        );
        assert_eq!(crate::geom::point_in_triangle(&p(2, 2), &t), Containment::Outside);
    }
}
