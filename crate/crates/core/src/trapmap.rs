//! Worst-case backup structure: a randomized incremental trapezoidal map
//! with a point-location DAG (x-nodes on endpoints, y-nodes on segments,
//! leaves on trapezoids).
//!
//! Degenerate x-coordinates are removed up front by an exact symbolic shear
//! x' = x + delta*y with delta a rational chosen small enough that distinct
//! vertices keep distinct sheared abscissae and no x-order flips. The map is
//! built and queried in sheared coordinates; trapezoid representatives are
//! unsheared for labeling against the brute-force oracle. The shear has unit
//! determinant, so exact areas (and the tiling identity) carry over.

use num_traits::{Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{orient, rat_i, Point, Rat, Segment};
use crate::subdivision::Subdivision;

#[derive(Clone, Debug)]
enum Node {
    X { point: Point, left: usize, right: usize },
    Y { seg: usize, above: usize, below: usize },
    Leaf { trap: usize },
}

#[derive(Clone, Debug)]
struct Trapezoid {
    /// Bounding segment indices; None means the box top/bottom.
    top: Option<usize>,
    bottom: Option<usize>,
    leftp: Point,
    rightp: Point,
    node: usize,
    alive: bool,
    /// Face label, assigned after construction.
    label: Option<String>,
}

#[derive(Clone, Debug)]
pub struct TrapMap {
    nodes: Vec<Node>,
    root: usize,
    traps: Vec<Trapezoid>,
    /// Inserted segments in sheared coordinates, left endpoint first.
    segments: Vec<Segment>,
    shear: Rat,
    box_y: (Rat, Rat),
    box_x: (Rat, Rat),
    pub seed: u64,
}

impl TrapMap {
    /// Randomized incremental construction over G's edges; same seed, same
    /// structure.
    pub fn build(g: &Subdivision, seed: u64) -> TrapMap {
        let shear = pick_shear(g.vertices());
        let sheared: Vec<Segment> = g
            .segments()
            .iter()
            .map(|s| {
                let a = shear_point(&s.a, &shear);
                let b = shear_point(&s.b, &shear);
                if a.lex_cmp(&b) == std::cmp::Ordering::Less {
                    Segment { a, b }
                } else {
                    Segment { a: b, b: a }
                }
            })
            .collect();

        // Bounding box in sheared coordinates.
        let (mut x0, mut y0, mut x1, mut y1) =
            (rat_i(0), rat_i(0), rat_i(1) + &shear, rat_i(1));
        for s in &sheared {
            for p in [&s.a, &s.b] {
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
            }
        }
        let one = rat_i(1);
        x0 -= &one;
        y0 -= &one;
        x1 += &one;
        y1 += &one;

        let mut map = TrapMap {
            nodes: Vec::new(),
            root: 0,
            traps: Vec::new(),
            segments: Vec::new(),
            shear,
            box_y: (y0.clone(), y1.clone()),
            box_x: (x0.clone(), x1.clone()),
            seed,
        };
        let t0 = map.new_trap(None, None, Point::new(x0, y0.clone()), Point::new(x1, y0));
        map.nodes.push(Node::Leaf { trap: t0 });
        map.traps[t0].node = 0;
        map.root = 0;

        let mut order: Vec<usize> = (0..sheared.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Fisher-Yates.
        for i in (1..order.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        for &ei in &order {
            map.insert(sheared[ei].clone());
        }
        map
    }

    fn new_trap(&mut self, top: Option<usize>, bottom: Option<usize>, leftp: Point, rightp: Point) -> usize {
        self.traps.push(Trapezoid { top, bottom, leftp, rightp, node: usize::MAX, alive: true, label: None });
        self.traps.len() - 1
    }

    fn leaf(&mut self, trap: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { trap });
        self.traps[trap].node = id;
        id
    }

    fn seg_y_at(&self, seg: usize, x: &Rat) -> Rat {
        let s = &self.segments[seg];
        let dx = &s.b.x - &s.a.x;
        &s.a.y + (x - &s.a.x) * (&s.b.y - &s.a.y) / dx
    }

    fn top_y_at(&self, t: &Trapezoid, x: &Rat) -> Rat {
        match t.top {
            Some(s) => self.seg_y_at(s, x),
            None => self.box_y.1.clone(),
        }
    }

    fn bottom_y_at(&self, t: &Trapezoid, x: &Rat) -> Rat {
        match t.bottom {
            Some(s) => self.seg_y_at(s, x),
            None => self.box_y.0.clone(),
        }
    }

    /// Locate for insertion-time walking: x-ties resolve to the right, y-ties
    /// by the direction of the segment being inserted.
    fn locate_for_insert(&self, p: &Point, toward: &Point) -> usize {
        let mut n = self.root;
        loop {
            match &self.nodes[n] {
                Node::X { point, left, right } => {
                    n = if p.x < point.x { *left } else { *right };
                }
                Node::Y { seg, above, below } => {
                    let s = &self.segments[*seg];
                    let side = match orient(&s.a, &s.b, p) {
                        0 => orient(&s.a, &s.b, toward),
                        o => o,
                    };
                    assert!(side != 0, "collinear overlapping segments");
                    n = if side > 0 { *above } else { *below };
                }
                Node::Leaf { trap } => return *trap,
            }
        }
    }

    fn insert(&mut self, s: Segment) {
        let seg_id = self.segments.len();
        self.segments.push(s.clone());
        let (p, q) = (s.a.clone(), s.b.clone());

        // All trapezoids crossed, left to right, found by repeated DAG
        // lookups of points on s just past each right wall.
        let mut crossed = vec![self.locate_for_insert(&p, &q)];
        loop {
            let t = &self.traps[*crossed.last().unwrap()];
            if q.lex_cmp(&t.rightp) != std::cmp::Ordering::Greater {
                break;
            }
            let x = t.rightp.x.clone();
            let probe = Point::new(x.clone(), self.seg_y_at(seg_id, &x));
            crossed.push(self.locate_for_insert(&probe, &q));
        }

        // Split every crossed trapezoid, merging consecutive pieces that
        // share the same top/bottom.
        let mut prev_above: Option<usize> = None;
        let mut prev_below: Option<usize> = None;
        let k = crossed.len();
        for (i, &ti) in crossed.iter().enumerate() {
            let t = self.traps[ti].clone();
            self.traps[ti].alive = false;
            let first = i == 0;
            let last = i + 1 == k;

            let mid_left = if first { p.clone() } else { t.leftp.clone() };
            let mid_right = if last { q.clone() } else { t.rightp.clone() };

            // Above piece: merge with the previous one when the top matches.
            let above_trap = match prev_above {
                Some(pa) if self.traps[pa].top == t.top => {
                    self.traps[pa].rightp = mid_right.clone();
                    pa
                }
                _ => {
                    let na = self.new_trap(t.top, Some(seg_id), mid_left.clone(), mid_right.clone());
                    self.leaf(na);
                    na
                }
            };
            prev_above = Some(above_trap);
            let below_trap = match prev_below {
                Some(pb) if self.traps[pb].bottom == t.bottom => {
                    self.traps[pb].rightp = mid_right.clone();
                    pb
                }
                _ => {
                    let nb = self.new_trap(Some(seg_id), t.bottom, mid_left.clone(), mid_right.clone());
                    self.leaf(nb);
                    nb
                }
            };
            prev_below = Some(below_trap);

            let y_node = |map: &mut TrapMap| -> Node {
                Node::Y {
                    seg: seg_id,
                    above: map.traps[above_trap].node,
                    below: map.traps[below_trap].node,
                }
            };

            // Optional left / right remainder pieces.
            let left_piece = if first && t.leftp.lex_cmp(&p) == std::cmp::Ordering::Less {
                let l = self.new_trap(t.top, t.bottom, t.leftp.clone(), p.clone());
                self.leaf(l);
                Some(l)
            } else {
                None
            };
            let right_piece = if last && q.lex_cmp(&t.rightp) == std::cmp::Ordering::Less {
                let r = self.new_trap(t.top, t.bottom, q.clone(), t.rightp.clone());
                self.leaf(r);
                Some(r)
            } else {
                None
            };

            // Assemble the replacement subtree in the old leaf slot.
            let mut inner = y_node(self);
            if let Some(rp) = right_piece {
                let yid = self.nodes.len();
                self.nodes.push(inner);
                inner = Node::X { point: q.clone(), left: yid, right: self.traps[rp].node };
            }
            if let Some(lp) = left_piece {
                let iid = self.nodes.len();
                self.nodes.push(inner);
                inner = Node::X { point: p.clone(), left: self.traps[lp].node, right: iid };
            }
            self.nodes[t.node] = inner;
        }
    }

    /// DAG descent in original coordinates; boundary ties resolve
    /// deterministically (x-ties right, y-ties above). Returns the face
    /// label and the number of comparisons performed.
    pub fn locate(&self, p: &Point) -> (&str, usize) {
        let sp = shear_point(p, &self.shear);
        let mut comparisons = 0usize;
        let mut n = self.root;
        loop {
            match &self.nodes[n] {
                Node::X { point, left, right } => {
                    comparisons += 1;
                    n = if sp.x < point.x { *left } else { *right };
                }
                Node::Y { seg, above, below } => {
                    comparisons += 1;
                    let s = &self.segments[*seg];
                    n = if orient(&s.a, &s.b, &sp) >= 0 { *above } else { *below };
                }
                Node::Leaf { trap } => {
                    let label = self.traps[*trap]
                        .label
                        .as_deref()
                        .expect("labels assigned after build");
                    return (label, comparisons);
                }
            }
        }
    }

    /// Labels every trapezoid with the face of G containing it, via the
    /// brute-force oracle on the unsheared representative point.
    pub fn assign_labels(&mut self, g: &Subdivision) {
        let reps: Vec<(usize, Point)> = self
            .traps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive)
            .map(|(i, t)| (i, self.trap_rep(t)))
            .collect();
        for (i, rep) in reps {
            let unsheared = unshear_point(&rep, &self.shear);
            let (label, _) = g.brute_locate(&unsheared);
            self.traps[i].label = Some(label.to_string());
        }
    }

    /// A point strictly inside the trapezoid (midpoint of the vertical
    /// midline).
    fn trap_rep(&self, t: &Trapezoid) -> Point {
        let x = (&t.leftp.x + &t.rightp.x) / rat_i(2);
        let y = (self.top_y_at(t, &x) + self.bottom_y_at(t, &x)) / rat_i(2);
        Point::new(x, y)
    }

    pub fn trapezoid_count(&self) -> usize {
        self.traps.iter().filter(|t| t.alive).count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Exact total area of all trapezoids; equals the box area exactly when
    /// the map tiles it. Quadratic-ish in practice because unrelated
    /// denominators pile up in the accumulator; prefer [`Self::tiles_box_exactly`]
    /// for large maps.
    pub fn total_area(&self) -> Rat {
        let mut sum = Rat::zero();
        for t in self.traps.iter().filter(|t| t.alive) {
            let w = &t.rightp.x - &t.leftp.x;
            if !w.is_positive() {
                continue;
            }
            let hl = self.top_y_at(t, &t.leftp.x) - self.bottom_y_at(t, &t.leftp.x);
            let hr = self.top_y_at(t, &t.rightp.x) - self.bottom_y_at(t, &t.rightp.x);
            sum += (hl + hr) / rat_i(2) * w;
        }
        sum
    }

    /// Exact tiling identity, checked without large-denominator sums. The
    /// total area telescopes per segment side:
    ///
    ///   sum of trap areas = sum_s [ integral of s over its top cover
    ///                             - integral of s over its bottom cover ]
    ///                     + box contributions,
    ///
    /// so the sum equals the box area exactly iff, for every segment (and
    /// for the box top/bottom), the x-intervals of the trapezoids bounded by
    /// that side partition its span with no gap or overlap. Together with
    /// top-above-bottom at every trapezoid midline, that is the exact
    /// identity "the map tiles the box".
    pub fn tiles_box_exactly(&self) -> bool {
        // side key: (segment index or box marker, is_top_side_of_trap)
        let mut covers: Vec<Vec<(Rat, Rat)>> = vec![Vec::new(); 2 * self.segments.len() + 2];
        let key = |seg: Option<usize>, top_side: bool| -> usize {
            match seg {
                Some(s) => 2 * s + usize::from(top_side),
                None => 2 * self.segments.len() + usize::from(top_side),
            }
        };
        for t in self.traps.iter().filter(|t| t.alive) {
            if t.leftp.x >= t.rightp.x {
                return false;
            }
            let mid = (&t.leftp.x + &t.rightp.x) / rat_i(2);
            if self.top_y_at(t, &mid) <= self.bottom_y_at(t, &mid) {
                return false;
            }
            covers[key(t.top, true)].push((t.leftp.x.clone(), t.rightp.x.clone()));
            covers[key(t.bottom, false)].push((t.leftp.x.clone(), t.rightp.x.clone()));
        }
        let spans = |seg: Option<usize>| -> (Rat, Rat) {
            match seg {
                Some(s) => (self.segments[s].a.x.clone(), self.segments[s].b.x.clone()),
                None => (self.box_x.0.clone(), self.box_x.1.clone()),
            }
        };
        for (k, cover) in covers.iter_mut().enumerate() {
            let seg = if k / 2 == self.segments.len() { None } else { Some(k / 2) };
            let (lo, hi) = spans(seg);
            cover.sort_by(|a, b| a.0.cmp(&b.0));
            let mut cur = lo;
            for (a, b) in cover.iter() {
                if *a != cur {
                    return false;
                }
                cur = b.clone();
            }
            if cur != hi {
                return false;
            }
        }
        true
    }

    pub fn box_area(&self) -> Rat {
        (&self.box_x.1 - &self.box_x.0) * (&self.box_y.1 - &self.box_y.0)
    }

    /// Structural fingerprint for reproducibility checks.
    pub fn fingerprint(&self) -> String {
        use crate::geom::format_rat;
        let mut s = String::new();
        for t in self.traps.iter().filter(|t| t.alive) {
            s.push_str(&format!(
                "{:?}/{:?}/{}/{}/{};",
                t.top,
                t.bottom,
                format_rat(&t.leftp.x),
                format_rat(&t.rightp.x),
                t.label.as_deref().unwrap_or("")
            ));
        }
        s
    }
}

fn shear_point(p: &Point, delta: &Rat) -> Point {
    Point::new(&p.x + delta * &p.y, p.y.clone())
}

fn unshear_point(p: &Point, delta: &Rat) -> Point {
    Point::new(&p.x - delta * &p.y, p.y.clone())
}

/// delta = (smallest nonzero gap between vertex abscissae) / (4 * (1 + y
/// extent)): small enough that distinct vertices keep distinct sheared
/// abscissae and no strict x-order flips.
fn pick_shear(vertices: &[Point]) -> Rat {
    let mut xs: Vec<Rat> = vertices.iter().map(|p| p.x.clone()).collect();
    xs.sort();
    xs.dedup();
    let mut min_dx: Option<Rat> = None;
    for w in xs.windows(2) {
        let d = &w[1] - &w[0];
        if min_dx.as_ref().is_none_or(|m| d < *m) {
            min_dx = Some(d);
        }
    }
    let min_dx = min_dx.unwrap_or_else(|| rat_i(1));
    let mut y_extent = rat_i(1);
    if let (Some(lo), Some(hi)) = (
        vertices.iter().map(|p| &p.y).min(),
        vertices.iter().map(|p| &p.y).max(),
    ) {
        let e = hi - lo;
        if e > y_extent {
            y_extent = e;
        }
    }
    min_dx / (rat_i(4) * (rat_i(1) + y_extent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::measure::ConditionalSampler;

    #[test]
    fn single_triangle_labels_verified() {
        let g = fixtures::tri();
        let mut m = TrapMap::build(&g, 7);
        m.assign_labels(&g);
        assert!(m.trapezoid_count() >= 4);
        assert!(m.trapezoid_count() <= 4 * g.edges().len() + 8);
        assert_eq!(m.total_area(), m.box_area());
        assert!(m.tiles_box_exactly());
        // Label agreement on every trapezoid representative.
        for t in m.traps.iter().filter(|t| t.alive) {
            let rep = unshear_point(&m.trap_rep(t), &m.shear);
            let (expect, boundary) = g.brute_locate(&rep);
            assert!(!boundary);
            assert_eq!(t.label.as_deref(), Some(expect));
        }
        // Query agreement at a few fixed points.
        let inner = Point::new(rat(1, 4), rat(1, 4));
        assert_eq!(m.locate(&inner).0, "inner");
        let outer = Point::new(rat(3, 4), rat(3, 4));
        assert_eq!(m.locate(&outer).0, "outer");
    }

    #[test]
    fn two_islands_exhaustive_centroid_check() {
        let g = fixtures::islands(2);
        let mut m = TrapMap::build(&g, 11);
        m.assign_labels(&g);
        assert_eq!(m.total_area(), m.box_area());
        for t in m.traps.iter().filter(|t| t.alive) {
            let rep = unshear_point(&m.trap_rep(t), &m.shear);
            let (expect, _) = g.brute_locate(&rep);
            assert_eq!(t.label.as_deref(), Some(expect));
        }
    }

    #[test]
    fn grid_queries_agree_with_oracle() {
        let g = fixtures::grid(64);
        let mut m = TrapMap::build(&g, 3);
        m.assign_labels(&g);
        assert_eq!(m.total_area(), m.box_area());
        let d = fixtures::uniform_measure_on_box();
        let sampler = ConditionalSampler::new(&d, &d.cover_triangle()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 1000 {
            let p = sampler.sample(&mut rng);
            let (expect, boundary) = g.brute_locate(&p);
            if boundary {
                continue;
            }
            let (got, _) = m.locate(&p);
            assert_eq!(got, expect);
            checked += 1;
        }
    }

    #[test]
    fn random_segment_soup_depth_bound() {
        // 4096 disjoint random segments: mean search depth over 10^4 queries
        // stays under 8*log2(n+1).
        let n = 4096usize;
        let g = fixtures::random_disjoint_segments(n, 5);
        let mut m = TrapMap::build(&g, 13);
        m.assign_labels(&g);
        assert!(m.tiles_box_exactly());
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut total = 0usize;
        let queries = 10_000usize;
        for _ in 0..queries {
            let p = Point::new(
                rat((rng.next_u64() % 1_000_000) as i64, 1_000_000),
                rat((rng.next_u64() % 1_000_000) as i64, 1_000_000),
            );
            let (_, comparisons) = m.locate(&p);
            total += comparisons;
        }
        let mean = total as f64 / queries as f64;
        let bound = 8.0 * ((n + 1) as f64).log2();
        eprintln!("trap map mean depth {mean:.2} (bound {bound:.2})");
        assert!(mean <= bound, "mean depth {mean} over bound {bound}");
    }

    #[test]
    fn same_seed_identical_structure() {
        let g = fixtures::islands(3);
        let mut a = TrapMap::build(&g, 42);
        a.assign_labels(&g);
        let mut b = TrapMap::build(&g, 42);
        b.assign_labels(&g);
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = TrapMap::build(&g, 43);
        // Different seed: almost surely a different incremental history.
        assert_ne!(a.fingerprint(), c.fingerprint());
        // Identical comparison counts per query.
        let p = Point::new(rat(1, 2), rat(1, 2));
        assert_eq!(a.locate(&p), b.locate(&p));
    }

    use rand::RngCore;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;
    use crate::geom::rat;
}
