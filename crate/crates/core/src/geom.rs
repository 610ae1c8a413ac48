//! Exact planar geometry kernel over arbitrary-precision rationals.
//!
//! Every predicate and construction here is exact: results are identical
//! across platforms and runs. Floating point only appears in rendering and
//! reporting, never on the build path.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

/// Rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses "p/q", "p", "-p/q" or a plain decimal like "0.25" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational numerator {n:?}")))?;
        let denom: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational denominator {d:?}")))?;
        if denom.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(numer, denom));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let frac_num: BigInt = frac
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let whole = Rat::from_integer(int_part.abs()) + Rat::new(frac_num, scale);
        return Ok(if sign < 0 { -whole } else { whole });
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rat::from_integer(n))
}

/// Canonical "p/q" form, always reduced with positive denominator.
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rational to f64 that survives numerators/denominators beyond f64 range.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    // Shift both into comfortable f64 territory, then rescale.
    let shift_n = (nb - 80).max(0);
    let shift_d = (db - 80).max(0);
    let n = (numer >> shift_n).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> shift_d).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi((shift_n - shift_d) as i32)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rat,
    pub y: Rat,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Point {
    pub fn new(x: Rat, y: Rat) -> Self {
        Point { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        Point::new(rat_i(x), rat_i(y))
    }

    /// Lexicographic (x, y) order; the symbolic shear used wherever ties on x
    /// must break deterministically.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.x), rat_to_f64(&self.y))
    }
}

/// Sign of the cross product (q - p) x (r - p): +1 counterclockwise, 0
/// collinear, -1 clockwise. Exact: a floating filter decides clear cases and
/// anything within the certified error bound falls back to integer
/// arithmetic.
pub fn orient(p: &Point, q: &Point, r: &Point) -> i32 {
    let (px, py) = p.to_f64();
    let (qx, qy) = q.to_f64();
    let (rx, ry) = r.to_f64();
    let t1 = (qx - px) * (ry - py);
    let t2 = (qy - py) * (rx - px);
    let det = t1 - t2;
    let detsum = t1.abs() + t2.abs();
    // Inputs carry one rounding each, the expression a handful more; the
    // true accumulated relative bound is ~2^-49, so 4e-12 is conservative.
    if det.abs() > detsum * 4e-12 && det.is_finite() {
        return if det > 0.0 { 1 } else { -1 };
    }
    orient_exact(p, q, r)
}

fn orient_exact(p: &Point, q: &Point, r: &Point) -> i32 {
    // sign((qx-px)(ry-py) - (qy-py)(rx-px)) with each coordinate n/d (d > 0):
    // cross-multiplied into one integer sign test, no intermediate reduction.
    let na = q.x.numer() * p.x.denom() - p.x.numer() * q.x.denom();
    let nb = r.y.numer() * p.y.denom() - p.y.numer() * r.y.denom();
    let nc = q.y.numer() * p.y.denom() - p.y.numer() * q.y.denom();
    let nd = r.x.numer() * p.x.denom() - p.x.numer() * r.x.denom();
    let da = q.x.denom() * p.x.denom();
    let db = r.y.denom() * p.y.denom();
    let dc = q.y.denom() * p.y.denom();
    let dd = r.x.denom() * p.x.denom();
    let lhs = na * nb * dc * dd;
    let rhs = nc * nd * da * db;
    match lhs.cmp(&rhs) {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if a == b {
            return Err(Error::Degenerate("zero-length segment".into()));
        }
        Ok(Segment { a, b })
    }

    /// Endpoints in lexicographic order; canonical form for dedup.
    pub fn canonical(&self) -> Segment {
        if self.a.lex_cmp(&self.b) == Ordering::Greater {
            Segment { a: self.b.clone(), b: self.a.clone() }
        } else {
            self.clone()
        }
    }

    pub fn midpoint(&self) -> Point {
        let half = rat(1, 2);
        Point::new(
            (&self.a.x + &self.b.x) * &half,
            (&self.a.y + &self.b.y) * half,
        )
    }

    /// Point at parameter t along a -> b.
    pub fn at(&self, t: &Rat) -> Point {
        Point::new(
            &self.a.x + t * (&self.b.x - &self.a.x),
            &self.a.y + t * (&self.b.y - &self.a.y),
        )
    }
}

/// True iff p lies on the closed segment s.
pub fn point_on_segment(p: &Point, s: &Segment) -> bool {
    if orient(&s.a, &s.b, p) != 0 {
        return false;
    }
    let (lo_x, hi_x) = if s.a.x <= s.b.x { (&s.a.x, &s.b.x) } else { (&s.b.x, &s.a.x) };
    let (lo_y, hi_y) = if s.a.y <= s.b.y { (&s.a.y, &s.b.y) } else { (&s.b.y, &s.a.y) };
    *lo_x <= p.x && p.x <= *hi_x && *lo_y <= p.y && p.y <= *hi_y
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SegmentRelation {
    Disjoint,
    /// Contact along shared boundary points only (single point involving an
    /// endpoint, or collinear single-point abutment).
    Touch,
    /// Interiors intersect: a proper crossing or a collinear overlap of
    /// positive length.
    Cross,
}

/// Exact classification of how two segments meet.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> SegmentRelation {
    let d1 = orient(&s2.a, &s2.b, &s1.a);
    let d2 = orient(&s2.a, &s2.b, &s1.b);
    let d3 = orient(&s1.a, &s1.b, &s2.a);
    let d4 = orient(&s1.a, &s1.b, &s2.b);

    if d1 * d2 < 0 && d3 * d4 < 0 {
        return SegmentRelation::Cross;
    }
    if d1 == 0 && d2 == 0 && d3 == 0 && d4 == 0 {
        // Collinear: compare parameter intervals along the dominant axis.
        let use_x = s1.a.x != s1.b.x;
        let key = |p: &Point| if use_x { p.x.clone() } else { p.y.clone() };
        let (mut a1, mut b1) = (key(&s1.a), key(&s1.b));
        if a1 > b1 {
            std::mem::swap(&mut a1, &mut b1);
        }
        let (mut a2, mut b2) = (key(&s2.a), key(&s2.b));
        if a2 > b2 {
            std::mem::swap(&mut a2, &mut b2);
        }
        let lo = a1.max(a2);
        let hi = b1.min(b2);
        return match lo.cmp(&hi) {
            Ordering::Less => SegmentRelation::Cross,
            Ordering::Equal => SegmentRelation::Touch,
            Ordering::Greater => SegmentRelation::Disjoint,
        };
    }
    // Non-collinear with at least one zero orientation: possible single-point
    // contact at an endpoint of one of the segments.
    let touches = (d1 == 0 && point_on_segment(&s1.a, s2))
        || (d2 == 0 && point_on_segment(&s1.b, s2))
        || (d3 == 0 && point_on_segment(&s2.a, s1))
        || (d4 == 0 && point_on_segment(&s2.b, s1));
    if touches {
        SegmentRelation::Touch
    } else {
        SegmentRelation::Disjoint
    }
}

/// Intersection point of two properly crossing (or touching, non-collinear)
/// segments, if any.
pub fn segment_intersection_point(s1: &Segment, s2: &Segment) -> Option<Point> {
    let d = (&s1.b.x - &s1.a.x) * (&s2.b.y - &s2.a.y) - (&s1.b.y - &s1.a.y) * (&s2.b.x - &s2.a.x);
    if d.is_zero() {
        return None;
    }
    let t = ((&s2.a.x - &s1.a.x) * (&s2.b.y - &s2.a.y)
        - (&s2.a.y - &s1.a.y) * (&s2.b.x - &s2.a.x))
        / &d;
    let u = ((&s2.a.x - &s1.a.x) * (&s1.b.y - &s1.a.y)
        - (&s2.a.y - &s1.a.y) * (&s1.b.x - &s1.a.x))
        / d;
    let zero = Rat::zero();
    let one = Rat::one();
    if t < zero || t > one || u < zero || u > one {
        return None;
    }
    Some(s1.at(&t))
}

/// Line a x + b y + c = 0 with integer coefficients in lowest terms and the
/// leading nonzero coefficient positive.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Line {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Line {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Result<Self> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::Degenerate("line with zero normal".into()));
        }
        let mut g = a.gcd(&b).gcd(&c);
        if g.is_zero() {
            g = BigInt::one();
        }
        let (mut a, mut b, mut c) = (a / &g, b / &g, c / g);
        let lead_neg = if !a.is_zero() { a.is_negative() } else { b.is_negative() };
        if lead_neg {
            a = -a;
            b = -b;
            c = -c;
        }
        Ok(Line { a, b, c })
    }

    /// Line through two distinct points.
    pub fn through(p: &Point, q: &Point) -> Result<Self> {
        // (y_q - y_p) x - (x_q - x_p) y + (x_q y_p - x_p y_q) = 0
        let a = &q.y - &p.y;
        let b = &p.x - &q.x;
        let c = &q.x * &p.y - &p.x * &q.y;
        // Clear denominators.
        let da = a.denom().clone();
        let db = b.denom().clone();
        let dc = c.denom().clone();
        let l = da.lcm(&db).lcm(&dc);
        let scale = Rat::from_integer(l);
        let ai = (a * &scale).to_integer();
        let bi = (b * &scale).to_integer();
        let ci = (c * scale).to_integer();
        Line::new(ai, bi, ci)
    }

    /// Horizontal line y = k.
    pub fn horizontal(k: &Rat) -> Self {
        Line::new(BigInt::zero(), k.denom().clone(), -k.numer().clone()).unwrap()
    }

    /// Vertical line x = k.
    pub fn vertical(k: &Rat) -> Self {
        Line::new(k.denom().clone(), BigInt::zero(), -k.numer().clone()).unwrap()
    }

    /// Sign of a x + b y + c at p. Integer cross-multiplication, no
    /// intermediate reduction.
    pub fn side(&self, p: &Point) -> i32 {
        let (xn, xd) = (p.x.numer(), p.x.denom());
        let (yn, yd) = (p.y.numer(), p.y.denom());
        let v = &self.a * xn * yd + &self.b * yn * xd + &self.c * xd * yd;
        match v.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }

    /// Exact signed value of a x + b y + c at p.
    pub fn eval(&self, p: &Point) -> Rat {
        Rat::from_integer(self.a.clone()) * &p.x
            + Rat::from_integer(self.b.clone()) * &p.y
            + Rat::from_integer(self.c.clone())
    }
}

/// Closed halfplane: the side of `line` where the sign of a x + b y + c
/// matches `keep` (boundary always included).
#[derive(Clone, Debug)]
pub struct HalfPlane {
    pub line: Line,
    pub keep_positive: bool,
}

impl HalfPlane {
    pub fn new(line: Line, keep_positive: bool) -> Self {
        HalfPlane { line, keep_positive }
    }

    /// The complementary closed halfplane.
    pub fn complement(&self) -> HalfPlane {
        HalfPlane { line: self.line.clone(), keep_positive: !self.keep_positive }
    }

    pub fn contains(&self, p: &Point) -> bool {
        let s = self.line.side(p);
        if self.keep_positive {
            s >= 0
        } else {
            s <= 0
        }
    }

    /// Signed value that is >= 0 exactly on the kept side.
    fn kept_value(&self, p: &Point) -> Rat {
        let v = self.line.eval(p);
        if self.keep_positive {
            v
        } else {
            -v
        }
    }
}

/// Closed triangle stored in counterclockwise orientation.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Triangle {
    verts: [Point; 3],
}

impl Triangle {
    pub fn new(v0: Point, v1: Point, v2: Point) -> Result<Self> {
        match orient(&v0, &v1, &v2) {
            0 => Err(Error::Degenerate("collinear triangle".into())),
            1 => Ok(Triangle { verts: [v0, v1, v2] }),
            _ => Ok(Triangle { verts: [v0, v2, v1] }),
        }
    }

    pub fn verts(&self) -> &[Point; 3] {
        &self.verts
    }

    pub fn edges(&self) -> [Segment; 3] {
        [
            Segment { a: self.verts[0].clone(), b: self.verts[1].clone() },
            Segment { a: self.verts[1].clone(), b: self.verts[2].clone() },
            Segment { a: self.verts[2].clone(), b: self.verts[0].clone() },
        ]
    }

    pub fn area(&self) -> Rat {
        let [a, b, c] = &self.verts;
        ((&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x)) / rat_i(2)
    }

    pub fn centroid(&self) -> Point {
        let [a, b, c] = &self.verts;
        let third = rat(1, 3);
        Point::new(
            (&a.x + &b.x + &c.x) * &third,
            (&a.y + &b.y + &c.y) * third,
        )
    }

    pub fn to_polygon(&self) -> ConvexPolygon {
        ConvexPolygon { verts: self.verts.to_vec() }
    }

    pub fn bbox(&self) -> (Rat, Rat, Rat, Rat) {
        let xs: Vec<&Rat> = self.verts.iter().map(|p| &p.x).collect();
        let ys: Vec<&Rat> = self.verts.iter().map(|p| &p.y).collect();
        (
            (*xs.iter().min().unwrap()).clone(),
            (*ys.iter().min().unwrap()).clone(),
            (*xs.iter().max().unwrap()).clone(),
            (*ys.iter().max().unwrap()).clone(),
        )
    }

    /// Deterministic total order on triangles (lexicographic on vertices).
    pub fn lex_key(&self) -> Vec<Rat> {
        self.verts
            .iter()
            .flat_map(|p| [p.x.clone(), p.y.clone()])
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Containment {
    Outside,
    Boundary,
    Interior,
}

/// Where p sits relative to the closed triangle t.
pub fn point_in_triangle(p: &Point, t: &Triangle) -> Containment {
    let v = t.verts();
    let s0 = orient(&v[0], &v[1], p);
    let s1 = orient(&v[1], &v[2], p);
    let s2 = orient(&v[2], &v[0], p);
    if s0 < 0 || s1 < 0 || s2 < 0 {
        Containment::Outside
    } else if s0 == 0 || s1 == 0 || s2 == 0 {
        Containment::Boundary
    } else {
        Containment::Interior
    }
}

/// True iff the line's point set meets the open interior of t: the vertices
/// of t must lie strictly on both sides.
pub fn line_crosses_triangle_interior(l: &Line, t: &Triangle) -> bool {
    let mut neg = false;
    let mut pos = false;
    for v in t.verts() {
        match l.side(v) {
            s if s < 0 => neg = true,
            s if s > 0 => pos = true,
            _ => {}
        }
    }
    neg && pos
}

/// True iff the open interior of segment s meets the open interior of t.
pub fn segment_meets_triangle_interior(s: &Segment, t: &Triangle) -> bool {
    // Clip the parameter interval of s against the three closed edge
    // halfplanes, then test the midpoint of the clipped piece for strict
    // interiority (a piece lying along an edge has a boundary midpoint).
    let mut lo = Rat::zero();
    let mut hi = Rat::one();
    let v = t.verts();
    for i in 0..3 {
        let l = Line::through(&v[i], &v[(i + 1) % 3]).expect("nondegenerate edge");
        // Normalize so the interior side evaluates positive.
        let flip = l.side(&v[(i + 2) % 3]) < 0;
        let mut fa = l.eval(&s.a);
        let mut fb = l.eval(&s.b);
        if flip {
            fa = -fa;
            fb = -fb;
        }
        let diff = &fb - &fa;
        if diff.is_zero() {
            if fa.is_negative() {
                return false;
            }
            continue;
        }
        let t_at_zero = -&fa / &diff;
        if diff.is_positive() {
            if t_at_zero > lo {
                lo = t_at_zero;
            }
        } else if t_at_zero < hi {
            hi = t_at_zero;
        }
        if lo >= hi {
            return false;
        }
    }
    let mid = (lo + hi) / rat_i(2);
    point_in_triangle(&s.at(&mid), t) == Containment::Interior
}

/// Convex polygon in counterclockwise order; may be empty. Canonicalization
/// removes duplicate and collinear-interior vertices, and collapses anything
/// with zero area to the empty polygon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConvexPolygon {
    verts: Vec<Point>,
}

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon { verts: Vec::new() }
    }

    /// Canonicalizes a CCW-ish vertex ring. Returns the empty polygon for
    /// degenerate input (fewer than 3 effective vertices or zero area).
    pub fn new(verts: Vec<Point>) -> Self {
        // Drop consecutive duplicates (cyclically).
        let mut vs: Vec<Point> = Vec::with_capacity(verts.len());
        for v in verts {
            if vs.last() != Some(&v) {
                vs.push(v);
            }
        }
        while vs.len() > 1 && vs.first() == vs.last() {
            vs.pop();
        }
        // Drop collinear interior vertices (cyclically, until stable).
        loop {
            if vs.len() < 3 {
                return ConvexPolygon::empty();
            }
            let n = vs.len();
            let mut removed = false;
            let mut keep: Vec<Point> = Vec::with_capacity(n);
            for i in 0..n {
                let prev = &vs[(i + n - 1) % n];
                let next = &vs[(i + 1) % n];
                if orient(prev, &vs[i], next) == 0 {
                    removed = true;
                } else {
                    keep.push(vs[i].clone());
                }
            }
            vs = keep;
            if !removed {
                break;
            }
        }
        let poly = ConvexPolygon { verts: vs };
        if poly.area() <= Rat::zero() {
            return ConvexPolygon::empty();
        }
        poly
    }

    pub fn rectangle(x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat) -> Self {
        ConvexPolygon::new(vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0.clone()),
            Point::new(x1.clone(), y1.clone()),
            Point::new(x0.clone(), y1.clone()),
        ])
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn verts(&self) -> &[Point] {
        &self.verts
    }

    /// Exact shoelace area; 0 for the empty polygon.
    pub fn area(&self) -> Rat {
        if self.verts.len() < 3 {
            return Rat::zero();
        }
        let mut twice = Rat::zero();
        let n = self.verts.len();
        for i in 0..n {
            let p = &self.verts[i];
            let q = &self.verts[(i + 1) % n];
            twice += &p.x * &q.y - &q.x * &p.y;
        }
        twice / rat_i(2)
    }

    /// Fan triangulation from the first vertex, skipping degenerate slivers.
    pub fn fan_triangulate(&self) -> Vec<Triangle> {
        let mut out = Vec::new();
        if self.verts.len() < 3 {
            return out;
        }
        let apex = &self.verts[0];
        for w in self.verts[1..].windows(2) {
            if orient(apex, &w[0], &w[1]) != 0 {
                out.push(Triangle::new(apex.clone(), w[0].clone(), w[1].clone()).unwrap());
            }
        }
        out
    }

    pub fn contains(&self, p: &Point) -> bool {
        let n = self.verts.len();
        if n < 3 {
            return false;
        }
        (0..n).all(|i| orient(&self.verts[i], &self.verts[(i + 1) % n], p) >= 0)
    }
}

/// Exact intersection of a convex polygon with a closed halfplane
/// (Sutherland-Hodgman). The empty polygon is its own result.
pub fn clip_convex(poly: &ConvexPolygon, h: &HalfPlane) -> ConvexPolygon {
    if poly.is_empty() {
        return ConvexPolygon::empty();
    }
    let vs = poly.verts();
    let n = vs.len();
    let vals: Vec<Rat> = vs.iter().map(|p| h.kept_value(p)).collect();
    let mut out: Vec<Point> = Vec::with_capacity(n + 2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (vi, vj) = (&vals[i], &vals[j]);
        if !vi.is_negative() {
            out.push(vs[i].clone());
        }
        if (vi.is_negative() && vj.is_positive()) || (vi.is_positive() && vj.is_negative()) {
            let t = -vi.clone() / (vj - vi);
            out.push(Point::new(
                &vs[i].x + &t * (&vs[j].x - &vs[i].x),
                &vs[i].y + &t * (&vs[j].y - &vs[i].y),
            ));
        }
    }
    ConvexPolygon::new(out)
}

/// Intersection of a convex polygon with a closed triangle.
pub fn clip_to_triangle(poly: &ConvexPolygon, t: &Triangle) -> ConvexPolygon {
    let v = t.verts();
    let mut cur = poly.clone();
    for i in 0..3 {
        let l = Line::through(&v[i], &v[(i + 1) % 3]).expect("nondegenerate edge");
        // CCW triangle: interior is the positive side.
        let interior_positive = l.side(&v[(i + 2) % 3]) > 0;
        cur = clip_convex(&cur, &HalfPlane::new(l, interior_positive));
        if cur.is_empty() {
            break;
        }
    }
    cur
}
