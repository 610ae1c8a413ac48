//! Geometric scaffolding for one partition level: the low-crossing spanning
//! tree over the construction vertices, the segment arrangement it induces
//! together with the partition triangles and the region boundary, and a
//! low-stabbing Steiner triangulation of the arrangement faces.
//!
//! Adding the spanning tree makes the union of segments connected, so every
//! bounded face is simply connected and comes out of face extraction as one
//! (weakly simple) boundary walk; the triangulation machinery must survive
//! repeated vertices (spurs from degree-1 tree vertices and pinch points).

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::geom::{orient, rat_i, ConvexPolygon, Line, Point, Rat, Segment, Triangle};
use crate::partition::PartitionSequence;
use crate::{Error, Result};

// --- low-crossing spanning tree ----------------------------------------------

#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub points: Vec<Point>,
    /// Tree edges as index pairs into `points`.
    pub edges: Vec<(usize, usize)>,
    /// Exhaustive maximum over the vertex-pair test lines of the number of
    /// tree edges with endpoints strictly on opposite sides.
    pub max_test_line_crossings: usize,
    pub test_line_count: usize,
}

impl SpanningTree {
    pub fn segments(&self) -> Vec<Segment> {
        self.edges
            .iter()
            .map(|&(i, j)| Segment { a: self.points[i].clone(), b: self.points[j].clone() })
            .collect()
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Iterative-reweighting greedy spanning tree: maintain multiplicative
/// weights on every line through a point pair, repeatedly connect two
/// components with the candidate segment of minimum weighted crossing count,
/// then double the weights of the lines it crosses. Deterministic; ties
/// break on lexicographic index order.
pub fn spanning_tree_low_crossing(points: &[Point]) -> Result<SpanningTree> {
    let n = points.len();
    if n < 2 {
        return Err(Error::Invalid("spanning tree needs at least 2 points".into()));
    }
    let mut lines: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if points[i] != points[j] {
                lines.push((i, j));
            }
        }
    }
    let mut signs: Vec<i8> = Vec::with_capacity(lines.len() * n);
    for &(a, b) in &lines {
        for p in points {
            signs.push(orient(&points[a], &points[b], p) as i8);
        }
    }
    let sign = |l: usize, p: usize| signs[l * n + p];
    let crosses = |l: usize, u: usize, v: usize| (sign(l, u) as i32) * (sign(l, v) as i32) < 0;

    // Candidate pool: exhaustive for small inputs, otherwise shortest pairs
    // plus a deterministic long-range spread.
    let mut all_pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            all_pairs.push((i, j));
        }
    }
    let exhaustive = n <= 72;
    if !exhaustive {
        all_pairs.sort_by(|&(a, b), &(c, d)| {
            sq_dist(&points[a], &points[b])
                .cmp(&sq_dist(&points[c], &points[d]))
                .then_with(|| (a, b).cmp(&(c, d)))
        });
    }

    let mut weights: Vec<f64> = vec![1.0; lines.len()];
    let mut dsu = Dsu::new(n);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    while edges.len() + 1 < n {
        let mut best: Option<((usize, usize), f64)> = None;
        let consider = |u: usize, v: usize, best: &mut Option<((usize, usize), f64)>| {
            let cost: f64 = (0..lines.len())
                .filter(|&l| crosses(l, u, v))
                .map(|l| weights[l])
                .sum();
            let better = match best {
                None => true,
                Some((e, c)) => cost < *c || (cost == *c && (u, v) < *e),
            };
            if better {
                *best = Some(((u, v), cost));
            }
        };
        let budget = if exhaustive { usize::MAX } else { 96 };
        let mut seen = 0usize;
        for &(u, v) in all_pairs.iter() {
            if dsu.find(u) == dsu.find(v) {
                continue;
            }
            consider(u, v, &mut best);
            seen += 1;
            if seen >= budget {
                break;
            }
        }
        if !exhaustive {
            let stride = (all_pairs.len() / 512).max(1);
            for (k, &(u, v)) in all_pairs.iter().enumerate() {
                if k % stride != 0 || dsu.find(u) == dsu.find(v) {
                    continue;
                }
                consider(u, v, &mut best);
            }
        }
        let ((u, v), _) = best.expect("distinct points are connectable");
        dsu.union(u, v);
        for (l, w) in weights.iter_mut().enumerate() {
            if crosses(l, u, v) {
                *w *= 2.0;
            }
        }
        edges.push((u, v));
    }

    let mut max_cross = 0usize;
    for l in 0..lines.len() {
        let c = edges.iter().filter(|&&(u, v)| crosses(l, u, v)).count();
        max_cross = max_cross.max(c);
    }
    Ok(SpanningTree {
        points: points.to_vec(),
        edges,
        max_test_line_crossings: max_cross,
        test_line_count: lines.len(),
    })
}

fn sq_dist(a: &Point, b: &Point) -> Rat {
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    &dx * &dx + &dy * &dy
}

// --- segment arrangement ------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FaceWalk {
    /// Vertex indices along the boundary walk (weakly simple: repeats
    /// allowed).
    pub walk: Vec<usize>,
    /// Signed shoelace area: positive for bounded faces.
    pub area: Rat,
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    pub verts: Vec<Point>,
    /// Arrangement edges after splitting at all intersections.
    pub edges: Vec<(usize, usize)>,
    pub faces: Vec<FaceWalk>,
    pub outer_face: usize,
}

impl Arrangement {
    pub fn bounded_faces(&self) -> impl Iterator<Item = (usize, &FaceWalk)> {
        self.faces.iter().enumerate().filter(|(_, f)| f.area.is_positive())
    }

    pub fn walk_points(&self, face: usize) -> Vec<Point> {
        self.faces[face].walk.iter().map(|&v| self.verts[v].clone()).collect()
    }

    pub fn edge_segments(&self) -> Vec<Segment> {
        self.edges
            .iter()
            .map(|&(u, v)| Segment { a: self.verts[u].clone(), b: self.verts[v].clone() })
            .collect()
    }
}

/// Builds the planar arrangement of the segments: splits every segment at
/// every intersection (proper crossings, T-contacts, collinear overlaps),
/// dedups, and extracts the boundary walk of every face by angular next-edge
/// traversal.
pub fn build_arrangement(segments: &[Segment]) -> Result<Arrangement> {
    let mut cuts: Vec<Vec<Point>> =
        segments.iter().map(|s| vec![s.a.clone(), s.b.clone()]).collect();
    for i in 0..segments.len() {
        for j in i + 1..segments.len() {
            let (si, sj) = (&segments[i], &segments[j]);
            let collinear = orient(&si.a, &si.b, &sj.a) == 0 && orient(&si.a, &si.b, &sj.b) == 0;
            if collinear {
                for p in [&sj.a, &sj.b] {
                    if crate::geom::point_on_segment(p, si) {
                        cuts[i].push((*p).clone());
                    }
                }
                for p in [&si.a, &si.b] {
                    if crate::geom::point_on_segment(p, sj) {
                        cuts[j].push((*p).clone());
                    }
                }
            } else if let Some(p) = crate::geom::segment_intersection_point(si, sj) {
                cuts[i].push(p.clone());
                cuts[j].push(p);
            }
        }
    }

    let mut subsegments: Vec<(Point, Point)> = Vec::new();
    for (s, mut pts) in segments.iter().zip(cuts) {
        let along = |p: &Point| -> Rat {
            if s.a.x != s.b.x {
                (&p.x - &s.a.x) / (&s.b.x - &s.a.x)
            } else {
                (&p.y - &s.a.y) / (&s.b.y - &s.a.y)
            }
        };
        pts.sort_by_key(|p| along(p));
        pts.dedup();
        for w in pts.windows(2) {
            let (a, b) = if w[0].lex_cmp(&w[1]) == Ordering::Less {
                (w[0].clone(), w[1].clone())
            } else {
                (w[1].clone(), w[0].clone())
            };
            subsegments.push((a, b));
        }
    }
    subsegments.sort_by(|(a1, b1), (a2, b2)| a1.lex_cmp(a2).then_with(|| b1.lex_cmp(b2)));
    subsegments.dedup();

    let mut verts: Vec<Point> = subsegments
        .iter()
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect();
    verts.sort_by(|a, b| a.lex_cmp(b));
    verts.dedup();
    let vid = |p: &Point| -> usize {
        verts.binary_search_by(|v| v.lex_cmp(p)).expect("endpoint is a vertex")
    };
    let edges: Vec<(usize, usize)> = subsegments.iter().map(|(a, b)| (vid(a), vid(b))).collect();

    // Half-edges: 2k is u->v of edge k, 2k+1 is v->u.
    let he_count = edges.len() * 2;
    let origin = |h: usize| -> usize {
        let (u, v) = edges[h / 2];
        if h.is_multiple_of(2) {
            u
        } else {
            v
        }
    };
    let target = |h: usize| -> usize { origin(h ^ 1) };

    let mut rings: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for h in 0..he_count {
        rings[origin(h)].push(h);
    }
    let dir = |h: usize| -> (Rat, Rat) {
        let (o, t) = (&verts[origin(h)], &verts[target(h)]);
        (&t.x - &o.x, &t.y - &o.y)
    };
    let angle_class = |d: &(Rat, Rat)| -> u8 {
        if d.1.is_positive() || (d.1.is_zero() && d.0.is_positive()) {
            0
        } else {
            1
        }
    };
    for ring in rings.iter_mut() {
        ring.sort_by(|&h1, &h2| {
            let (d1, d2) = (dir(h1), dir(h2));
            let (c1, c2) = (angle_class(&d1), angle_class(&d2));
            c1.cmp(&c2).then_with(|| {
                let cross = &d1.0 * &d2.1 - &d1.1 * &d2.0;
                if cross.is_positive() {
                    Ordering::Less
                } else if cross.is_negative() {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            })
        });
    }

    // Interior stays on the left: after arriving at v along h, continue with
    // the clockwise neighbor of h's twin around v.
    let next = |h: usize| -> usize {
        let v = target(h);
        let twin = h ^ 1;
        let ring = &rings[v];
        let k = ring.iter().position(|&x| x == twin).expect("twin in ring");
        ring[(k + ring.len() - 1) % ring.len()]
    };

    let mut visited = vec![false; he_count];
    let mut faces: Vec<FaceWalk> = Vec::new();
    for start in 0..he_count {
        if visited[start] {
            continue;
        }
        let mut walk = Vec::new();
        let mut h = start;
        loop {
            visited[h] = true;
            walk.push(origin(h));
            h = next(h);
            if h == start {
                break;
            }
        }
        let area = walk_area(&verts, &walk);
        faces.push(FaceWalk { walk, area });
    }
    let outer_face = faces
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.area.cmp(&b.area))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(Arrangement { verts, edges, faces, outer_face })
}

fn walk_area(verts: &[Point], walk: &[usize]) -> Rat {
    let mut twice = Rat::zero();
    for i in 0..walk.len() {
        let p = &verts[walk[i]];
        let q = &verts[walk[(i + 1) % walk.len()]];
        twice += &p.x * &q.y - &q.x * &p.y;
    }
    twice / rat_i(2)
}

// --- Steiner triangulation of a weakly simple face ----------------------------

#[derive(Clone, Debug, Default)]
pub struct FaceTriangulation {
    pub triangles: Vec<Triangle>,
    pub steiner_points: Vec<Point>,
    /// How many subproblems needed the guaranteed trapezoid fallback.
    pub trapezoid_fallbacks: usize,
}

/// Balanced recursive triangulation of a weakly simple boundary walk:
/// spur-prune, split by a near-halving valid diagonal (or a Steiner chord to
/// the first boundary hit when no diagonal exists), recurse; a vertical
/// trapezoid decomposition is the guaranteed fallback. Exact tiling: the
/// output areas sum to the walk area.
pub fn steiner_triangulate_face(walk_points: &[Point]) -> Result<FaceTriangulation> {
    let area = poly_area(walk_points);
    if !area.is_positive() {
        return Err(Error::DegenerateFace);
    }
    let mut out = FaceTriangulation::default();
    triangulate_walk(walk_points.to_vec(), 0, &mut out)?;
    let sum: Rat = out.triangles.iter().map(|t| t.area()).sum();
    if sum != area {
        return Err(Error::Degenerate(format!(
            "triangulation area mismatch: {sum} vs {area}"
        )));
    }
    Ok(out)
}

fn poly_area(pts: &[Point]) -> Rat {
    let mut twice = Rat::zero();
    for i in 0..pts.len() {
        let p = &pts[i];
        let q = &pts[(i + 1) % pts.len()];
        twice += &p.x * &q.y - &q.x * &p.y;
    }
    twice / rat_i(2)
}

fn prune_spurs(walk: &mut Vec<Point>) {
    loop {
        let mut removed = false;
        let mut i = 0;
        while walk.len() >= 3 && i < walk.len() {
            let n = walk.len();
            let prev = &walk[(i + n - 1) % n];
            let next = &walk[(i + 1) % n];
            if prev == next {
                // Spur tip at i: drop the tip and one duplicate neighbor.
                let a = i;
                let b = (i + 1) % walk.len();
                let (first, second) = if a < b { (b, a) } else { (a, b) };
                walk.remove(first);
                walk.remove(second);
                removed = true;
                i = 0;
            } else {
                i += 1;
            }
        }
        if !removed {
            return;
        }
    }
}

fn triangulate_walk(mut walk: Vec<Point>, depth: usize, out: &mut FaceTriangulation) -> Result<()> {
    prune_spurs(&mut walk);
    let n = walk.len();
    if n < 3 || !poly_area(&walk).is_positive() {
        return Ok(());
    }
    if n == 3 {
        if let Ok(t) = Triangle::new(walk[0].clone(), walk[1].clone(), walk[2].clone()) {
            out.triangles.push(t);
        }
        return Ok(());
    }
    if depth > 64 {
        return trapezoid_fallback(&walk, out);
    }

    // Candidate diagonals ordered by balance: split distance from n/2 down.
    let half = n / 2;
    for d in (2..=half).rev() {
        for i in 0..n {
            let j = (i + d) % n;
            if valid_diagonal(&walk, i, j) {
                let (w1, w2) = split_walk(&walk, i, j);
                triangulate_walk(w1, depth + 1, out)?;
                triangulate_walk(w2, depth + 1, out)?;
                return Ok(());
            }
        }
    }

    // Steiner chord: aim from each position at the midpoint of the opposite
    // edge, cut at the first boundary contact.
    for i in 0..n {
        let k = (i + n / 2) % n;
        let target =
            Segment { a: walk[k].clone(), b: walk[(k + 1) % n].clone() }.midpoint();
        if let Some((w1, w2, steiner)) = steiner_chord_split(&walk, i, &target) {
            if let Some(z) = steiner {
                out.steiner_points.push(z);
            }
            triangulate_walk(w1, depth + 1, out)?;
            triangulate_walk(w2, depth + 1, out)?;
            return Ok(());
        }
    }

    trapezoid_fallback(&walk, out)
}

/// Is the open segment walk[i] -> walk[j] a valid splitting diagonal?
fn valid_diagonal(walk: &[Point], i: usize, j: usize) -> bool {
    let n = walk.len();
    let (p, q) = (&walk[i], &walk[j]);
    if p == q {
        return false;
    }
    if !enters_interior(walk, i, q) || !enters_interior(walk, j, p) {
        return false;
    }
    let diag = Segment { a: p.clone(), b: q.clone() };
    for k in 0..n {
        let (a, b) = (&walk[k], &walk[(k + 1) % n]);
        if a == b {
            continue;
        }
        let edge = Segment { a: a.clone(), b: b.clone() };
        match crate::geom::segments_intersect(&diag, &edge) {
            crate::geom::SegmentRelation::Cross => return false,
            crate::geom::SegmentRelation::Touch => {
                // Contact must be at the diagonal endpoints, which are walk
                // vertices; contact at an edge midpoint is a real block.
                let p_mid = p != a && p != b && crate::geom::point_on_segment(p, &edge);
                let q_mid = q != a && q != b && crate::geom::point_on_segment(q, &edge);
                if p_mid || q_mid {
                    return false;
                }
                for w in [a, b] {
                    if w != p && w != q && crate::geom::point_on_segment(w, &diag) {
                        return false;
                    }
                }
            }
            crate::geom::SegmentRelation::Disjoint => {}
        }
    }
    for w in walk {
        if w != p && w != q && crate::geom::point_on_segment(w, &diag) {
            return false;
        }
    }
    true
}

/// Does the direction from walk position i toward `to` point strictly into
/// the face interior (the wedge between the outgoing and incoming edges at
/// that position, interior on the left of a CCW walk)?
fn enters_interior(walk: &[Point], i: usize, to: &Point) -> bool {
    let n = walk.len();
    let p = &walk[i];
    let nxt = &walk[(i + 1) % n];
    let prv = &walk[(i + n - 1) % n];
    let c_uw = orient(p, nxt, prv);
    let c_ud = orient(p, nxt, to);
    let c_dw = orient(p, to, prv);
    if c_uw > 0 {
        // Convex corner: strictly inside the cone.
        c_ud > 0 && c_dw > 0
    } else if c_uw < 0 {
        // Reflex corner: not inside the closed complementary cone.
        !(c_ud <= 0 && c_dw <= 0)
    } else if dot_sign(p, nxt, prv) < 0 {
        // Straight passthrough: interior is the open left halfplane.
        c_ud > 0
    } else {
        // Zero-angle pinch: nothing fits strictly inside.
        false
    }
}

fn dot_sign(p: &Point, a: &Point, b: &Point) -> i32 {
    let v = (&a.x - &p.x) * (&b.x - &p.x) + (&a.y - &p.y) * (&b.y - &p.y);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

fn split_walk(walk: &[Point], i: usize, j: usize) -> (Vec<Point>, Vec<Point>) {
    let n = walk.len();
    let mut w1 = Vec::new();
    let mut k = i;
    loop {
        w1.push(walk[k].clone());
        if k == j {
            break;
        }
        k = (k + 1) % n;
    }
    let mut w2 = Vec::new();
    let mut k = j;
    loop {
        w2.push(walk[k].clone());
        if k == i {
            break;
        }
        k = (k + 1) % n;
    }
    (w1, w2)
}

enum Contact {
    Vertex(usize),
    Edge(usize, Point),
}

/// Shoots a chord from walk[i] toward `target`, cutting at the first
/// boundary contact; splits the walk there, inserting a Steiner point when
/// the contact lands mid-edge.
fn steiner_chord_split(
    walk: &[Point],
    i: usize,
    target: &Point,
) -> Option<(Vec<Point>, Vec<Point>, Option<Point>)> {
    let n = walk.len();
    let p = &walk[i];
    if p == target || !enters_interior(walk, i, target) {
        return None;
    }
    let ray = Segment { a: p.clone(), b: target.clone() };
    let param = |z: &Point| -> Rat {
        if p.x != target.x {
            (&z.x - &p.x) / (&target.x - &p.x)
        } else {
            (&z.y - &p.y) / (&target.y - &p.y)
        }
    };
    let mut best: Option<(Rat, Contact)> = None;
    for (k, w) in walk.iter().enumerate() {
        if k == i || w == p {
            continue;
        }
        if crate::geom::point_on_segment(w, &ray) {
            let t = param(w);
            if t.is_positive() && best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, Contact::Vertex(k)));
            }
        }
    }
    for k in 0..n {
        let (a, b) = (&walk[k], &walk[(k + 1) % n]);
        if a == b || a == p || b == p {
            continue;
        }
        let edge = Segment { a: a.clone(), b: b.clone() };
        if let Some(z) = crate::geom::segment_intersection_point(&ray, &edge) {
            if z == *p || z == *a || z == *b {
                continue; // vertex contacts handled above
            }
            let t = param(&z);
            if t.is_positive() && best.as_ref().is_none_or(|(bt, _)| t < *bt) {
                best = Some((t, Contact::Edge(k, z)));
            }
        }
    }
    match best? {
        (_, Contact::Vertex(j)) => {
            if valid_diagonal(walk, i, j) {
                let (w1, w2) = split_walk(walk, i, j);
                Some((w1, w2, None))
            } else {
                None
            }
        }
        (_, Contact::Edge(k, z)) => {
            if k == i || (k + 1) % n == i {
                return None; // adjacent-edge contact gives a degenerate split
            }
            let mut extended: Vec<Point> = Vec::with_capacity(n + 1);
            extended.extend_from_slice(&walk[..=k]);
            extended.push(z.clone());
            extended.extend_from_slice(&walk[k + 1..]);
            let zi = k + 1;
            let i2 = if i > k { i + 1 } else { i };
            let (w1, w2) = split_walk(&extended, i2, zi);
            Some((w1, w2, Some(z)))
        }
    }
}

/// Guaranteed-correct fallback: vertical decomposition of the face into
/// trapezoids, each emitted as one or two triangles.
fn trapezoid_fallback(walk: &[Point], out: &mut FaceTriangulation) -> Result<()> {
    out.trapezoid_fallbacks += 1;
    let n = walk.len();
    let mut xs: Vec<Rat> = walk.iter().map(|p| p.x.clone()).collect();
    xs.sort();
    xs.dedup();
    let edges: Vec<(Point, Point)> = (0..n)
        .filter_map(|k| {
            let (a, b) = (&walk[k], &walk[(k + 1) % n]);
            match a.x.cmp(&b.x) {
                Ordering::Less => Some((a.clone(), b.clone())),
                Ordering::Greater => Some((b.clone(), a.clone())),
                Ordering::Equal => None,
            }
        })
        .collect();
    let y_at = |e: &(Point, Point), x: &Rat| -> Rat {
        let dx = &e.1.x - &e.0.x;
        &e.0.y + (x - &e.0.x) * (&e.1.y - &e.0.y) / dx
    };
    for w in xs.windows(2) {
        let (x0, x1) = (&w[0], &w[1]);
        let mid = (x0 + x1) / rat_i(2);
        let mut active: Vec<&(Point, Point)> =
            edges.iter().filter(|(l, r)| l.x <= *x0 && r.x >= *x1).collect();
        active.sort_by_key(|a| y_at(a, &mid));
        for pair in active.windows(2) {
            let (bot, top) = (pair[0], pair[1]);
            let rep = Point::new(mid.clone(), (y_at(bot, &mid) + y_at(top, &mid)) / rat_i(2));
            if !point_in_walk(walk, &rep) {
                continue;
            }
            let poly = ConvexPolygon::new(vec![
                Point::new(x0.clone(), y_at(bot, x0)),
                Point::new(x1.clone(), y_at(bot, x1)),
                Point::new(x1.clone(), y_at(top, x1)),
                Point::new(x0.clone(), y_at(top, x0)),
            ]);
            for t in poly.fan_triangulate() {
                for v in t.verts() {
                    if walk.iter().all(|w| w != v) {
                        out.steiner_points.push(v.clone());
                    }
                }
                out.triangles.push(t);
            }
        }
    }
    Ok(())
}

/// Crossing-parity membership used only for trapezoid representatives,
/// which never land on the boundary.
fn point_in_walk(walk: &[Point], p: &Point) -> bool {
    let n = walk.len();
    let mut inside = false;
    for k in 0..n {
        let (a, b) = (&walk[k], &walk[(k + 1) % n]);
        if a.x == b.x {
            continue;
        }
        let (lo, hi) = if a.x <= b.x { (a, b) } else { (b, a) };
        if lo.x <= p.x && p.x < hi.x && orient(lo, hi, p) < 0 {
            inside = !inside;
        }
    }
    inside
}

// --- full scaffold for one tree level ----------------------------------------

#[derive(Clone, Debug)]
pub struct SteinerTriangulation {
    pub triangles: Vec<Triangle>,
    pub steiner_points: Vec<Point>,
    /// Triangle index -> bounded-face index in the arrangement.
    pub face_of: Vec<usize>,
    pub trapezoid_fallbacks: usize,
}

#[derive(Clone, Debug)]
pub struct RegionScaffold {
    pub tree: SpanningTree,
    pub arrangement: Arrangement,
    pub triangulation: SteinerTriangulation,
}

/// Builds the full level scaffold for a partition inside a convex region:
/// spanning tree over triangle corners plus region corners, arrangement of
/// {tree edges, triangle edges, region boundary} clipped to the region, and
/// the Steiner triangulation of every bounded face. The faces tile the
/// region exactly.
pub fn triangulate_arrangement(
    seq: &PartitionSequence,
    region: &ConvexPolygon,
) -> Result<RegionScaffold> {
    let mut vertex_set: Vec<Point> = seq.vertex_set();
    vertex_set.extend(region.verts().iter().cloned());
    vertex_set.sort_by(|a, b| a.lex_cmp(b));
    vertex_set.dedup();
    let tree = spanning_tree_low_crossing(&vertex_set)?;

    let mut raw: Vec<Segment> = Vec::new();
    let rv = region.verts();
    for i in 0..rv.len() {
        raw.push(Segment { a: rv[i].clone(), b: rv[(i + 1) % rv.len()].clone() });
    }
    for t in seq.triangles() {
        raw.extend(t.edges());
    }
    raw.extend(tree.segments());

    let mut clipped: Vec<Segment> = Vec::new();
    for s in &raw {
        if let Some(c) = clip_segment_to_convex(s, region) {
            clipped.push(c.canonical());
        }
    }
    clipped.sort_by(|a, b| a.a.lex_cmp(&b.a).then_with(|| a.b.lex_cmp(&b.b)));
    clipped.dedup();

    let arrangement = build_arrangement(&clipped)?;
    let mut triangulation = SteinerTriangulation {
        triangles: Vec::new(),
        steiner_points: Vec::new(),
        face_of: Vec::new(),
        trapezoid_fallbacks: 0,
    };
    let mut total_area = Rat::zero();
    for (fi, fw) in arrangement.bounded_faces() {
        let pts = arrangement.walk_points(fi);
        let ft = steiner_triangulate_face(&pts)?;
        total_area += &fw.area;
        triangulation.trapezoid_fallbacks += ft.trapezoid_fallbacks;
        triangulation.steiner_points.extend(ft.steiner_points);
        for t in ft.triangles {
            triangulation.triangles.push(t);
            triangulation.face_of.push(fi);
        }
    }
    if total_area != region.area() {
        return Err(Error::Degenerate(format!(
            "arrangement faces do not tile the region: {total_area} vs {}",
            region.area()
        )));
    }
    Ok(RegionScaffold { tree, arrangement, triangulation })
}

/// Clips a segment to a convex region; None when the intersection is empty
/// or a single point.
pub fn clip_segment_to_convex(s: &Segment, region: &ConvexPolygon) -> Option<Segment> {
    let vs = region.verts();
    let n = vs.len();
    if n < 3 {
        return None;
    }
    let mut lo = Rat::zero();
    let mut hi = rat_i(1);
    for i in 0..n {
        let l = Line::through(&vs[i], &vs[(i + 1) % n]).ok()?;
        let flip = l.side(&vs[(i + 2) % n]) < 0;
        let mut fa = l.eval(&s.a);
        let mut fb = l.eval(&s.b);
        if flip {
            fa = -fa;
            fb = -fb;
        }
        let diff = &fb - &fa;
        if diff.is_zero() {
            if fa.is_negative() {
                return None;
            }
            continue;
        }
        let t0 = -&fa / &diff;
        if diff.is_positive() {
            if t0 > lo {
                lo = t0;
            }
        } else if t0 < hi {
            hi = t0;
        }
        if lo >= hi {
            return None;
        }
    }
    let a = s.at(&lo);
    let b = s.at(&hi);
    if a == b {
        return None;
    }
    Some(Segment { a, b })
}
