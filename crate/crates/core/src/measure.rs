//! The query distribution and its oracles.
//!
//! A measure is a finite mixture of uniform densities over support triangles.
//! This family is closed under conditioning on a triangle (the only
//! conditioning the construction ever performs), and both oracles - exact
//! triangle mass and conditional sampling - reduce to exact convex clipping.

use num_traits::{One, Signed, Zero};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::geom::{
    clip_to_triangle, format_rat, parse_rat, rat_to_f64, ConvexPolygon, Point, Rat, Triangle,
};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct MeasureComponent {
    pub support: Triangle,
    pub weight: Rat,
}

/// A probability measure: weights are positive exact rationals summing to 1,
/// each spread uniformly over its support triangle.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    components: Vec<MeasureComponent>,
}

impl MeasureSpec {
    pub fn new(components: Vec<MeasureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Invalid("measure needs at least one component".into()));
        }
        let mut total = Rat::zero();
        for c in &components {
            if !c.weight.is_positive() {
                return Err(Error::Invalid("component weights must be positive".into()));
            }
            total += &c.weight;
        }
        if total != Rat::one() {
            return Err(Error::Invalid(format!(
                "component weights must sum to 1, got {}",
                total
            )));
        }
        Ok(MeasureSpec { components })
    }

    /// Uniform distribution over a triangle.
    pub fn uniform_on(t: Triangle) -> Self {
        MeasureSpec {
            components: vec![MeasureComponent { support: t, weight: Rat::one() }],
        }
    }

    pub fn components(&self) -> &[MeasureComponent] {
        &self.components
    }

    /// Axis-aligned bounding box of the support: (x0, y0, x1, y1).
    pub fn support_bbox(&self) -> (Rat, Rat, Rat, Rat) {
        let mut it = self.components.iter();
        let first = it.next().expect("nonempty").support.bbox();
        it.fold(first, |(x0, y0, x1, y1), c| {
            let (a, b, c2, d) = c.support.bbox();
            (x0.min(a), y0.min(b), x1.max(c2), y1.max(d))
        })
    }

    /// A triangle strictly containing the support: a right triangle hugging
    /// the support bounding box (legs of length w+h+3p with pad p), so a
    /// concentrated measure keeps a concentrated cover. Deterministic.
    pub fn cover_triangle(&self) -> Triangle {
        let (x0, y0, x1, y1) = self.support_bbox();
        let w = &x1 - &x0;
        let h = &y1 - &y0;
        let mut extent = w.clone().max(h.clone());
        if extent.is_zero() {
            extent = Rat::one();
        }
        let pad = extent / Rat::from_integer(8.into());
        let legs = &w + &h + Rat::from_integer(3.into()) * &pad;
        let a = Point::new(&x0 - &pad, &y0 - &pad);
        let b = Point::new(&a.x + &legs, a.y.clone());
        let c = Point::new(a.x.clone(), &a.y + &legs);
        Triangle::new(a, b, c).expect("cover triangle is nondegenerate")
    }

    pub fn contained_in_unit_square(&self) -> bool {
        let (x0, y0, x1, y1) = self.support_bbox();
        !x0.is_negative() && !y0.is_negative() && x1 <= Rat::one() && y1 <= Rat::one()
    }

    /// Exact mass of a convex region.
    pub fn prob_polygon(&self, poly: &ConvexPolygon) -> Rat {
        if poly.is_empty() {
            return Rat::zero();
        }
        let mut total = Rat::zero();
        for c in &self.components {
            let inter = intersect_support(&c.support, poly);
            if !inter.is_empty() {
                total += &c.weight * inter.area() / c.support.area();
            }
        }
        total
    }

    /// Oracle 1: exact D(t) for a closed triangle t.
    pub fn prob_triangle(&self, t: &Triangle) -> Rat {
        self.prob_polygon(&t.to_polygon())
    }

    /// The conditional measure D restricted to t, renormalized. Each clipped
    /// support region is fan-triangulated so the result stays in the mixture
    /// family; weights sum to 1 exactly.
    pub fn condition(&self, t: &Triangle) -> Result<MeasureSpec> {
        let total = self.prob_triangle(t);
        if total.is_zero() {
            return Err(Error::ZeroMassRegion);
        }
        let mut out = Vec::new();
        for c in &self.components {
            let inter = clip_to_triangle(&c.support.to_polygon(), t);
            if inter.is_empty() {
                continue;
            }
            let support_area = c.support.area();
            for piece in inter.fan_triangulate() {
                let w = &c.weight * piece.area() / &support_area / &total;
                if w.is_positive() {
                    out.push(MeasureComponent { support: piece, weight: w });
                }
            }
        }
        MeasureSpec::new(out)
    }

    /// Oracle 2: draw a point distributed as D conditioned on t.
    ///
    /// One-shot convenience; for bulk sampling build a [`ConditionalSampler`]
    /// once and reuse it.
    pub fn sample_conditional(&self, t: &Triangle, rng: &mut impl RngCore) -> Result<Point> {
        Ok(ConditionalSampler::new(self, t)?.sample(rng))
    }
}

/// Precomputed decomposition of D conditioned on a triangle: the clipped
/// support pieces with cumulative masses, ready for area-weighted sampling.
#[derive(Clone, Debug)]
pub struct ConditionalSampler {
    pieces: Vec<Triangle>,
    /// Prefix sums of piece masses (unnormalized).
    cumulative: Vec<Rat>,
    total: Rat,
}

impl ConditionalSampler {
    pub fn new(d: &MeasureSpec, t: &Triangle) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = Rat::zero();
        for c in &d.components {
            let inter = clip_to_triangle(&c.support.to_polygon(), t);
            if inter.is_empty() {
                continue;
            }
            let support_area = c.support.area();
            for piece in inter.fan_triangulate() {
                let w = &c.weight * piece.area() / &support_area;
                if w.is_positive() {
                    total += &w;
                    pieces.push(piece);
                    cumulative.push(total.clone());
                }
            }
        }
        if total.is_zero() {
            return Err(Error::ZeroMassRegion);
        }
        Ok(ConditionalSampler { pieces, cumulative, total })
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> Point {
        let u = rand_unit(rng) * &self.total;
        let i = self.cumulative.partition_point(|c| *c <= u);
        sample_in_triangle(&self.pieces[i.min(self.pieces.len() - 1)], rng)
    }
}

fn intersect_support(support: &Triangle, poly: &ConvexPolygon) -> ConvexPolygon {
    clip_to_triangle(poly, support)
}

/// Uniform rational in [0, 1) with denominator 2^32.
fn rand_unit(rng: &mut impl RngCore) -> Rat {
    Rat::new(rng.next_u32().into(), (1u64 << 32).into())
}

/// Uniform point in a closed triangle via the folded-barycentric trick.
pub fn sample_in_triangle(t: &Triangle, rng: &mut impl RngCore) -> Point {
    let mut u = rand_unit(rng);
    let mut v = rand_unit(rng);
    if &u + &v > Rat::one() {
        u = Rat::one() - u;
        v = Rat::one() - v;
    }
    let [a, b, c] = t.verts();
    Point::new(
        &a.x + &u * (&b.x - &a.x) + &v * (&c.x - &a.x),
        &a.y + &u * (&b.y - &a.y) + &v * (&c.y - &a.y),
    )
}

/// A named cell of a partition with its probability mass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellProbability {
    pub cell: String,
    pub mass: Rat,
}

/// Entropy of labeled cells; masses of a complete partition sum to 1.
pub fn entropy_of_cells(cells: &[CellProbability]) -> Result<f64> {
    entropy_bits(cells.iter().map(|c| &c.mass))
}

/// Partition entropy in bits: sum of p*log2(1/p) with 0*log(1/0) = 0.
pub fn entropy_bits<'a>(masses: impl IntoIterator<Item = &'a Rat>) -> Result<f64> {
    let mut h = 0.0;
    for m in masses {
        if m.is_negative() {
            return Err(Error::NegativeMass);
        }
        if m.is_zero() {
            continue;
        }
        let p = rat_to_f64(m);
        h -= p * p.log2();
    }
    Ok(h)
}

// --- file format -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    components: Vec<ComponentFile>,
}

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    triangle: [[String; 2]; 3],
    weight: String,
}

pub fn measure_to_json(m: &MeasureSpec) -> serde_json::Value {
    let components = m
        .components()
        .iter()
        .map(|c| {
            let v = c.support.verts();
            ComponentFile {
                triangle: [
                    [format_rat(&v[0].x), format_rat(&v[0].y)],
                    [format_rat(&v[1].x), format_rat(&v[1].y)],
                    [format_rat(&v[2].x), format_rat(&v[2].y)],
                ],
                weight: format_rat(&c.weight),
            }
        })
        .collect::<Vec<_>>();
    serde_json::to_value(MeasureFile { components }).expect("measure serializes")
}

pub fn measure_from_json(v: &serde_json::Value) -> Result<MeasureSpec> {
    let file: MeasureFile = serde_json::from_value(v.clone())
        .map_err(|e| Error::Parse(format!("measure file: {e}")))?;
    let mut components = Vec::new();
    for c in &file.components {
        let mut pts = Vec::new();
        for [x, y] in &c.triangle {
            pts.push(Point::new(parse_rat(x)?, parse_rat(y)?));
        }
        let support = Triangle::new(pts[0].clone(), pts[1].clone(), pts[2].clone())
            .map_err(|_| Error::Parse("degenerate support triangle".into()))?;
        components.push(MeasureComponent { support, weight: parse_rat(&c.weight)? });
    }
    MeasureSpec::new(components)
}

pub fn load_measure(path: &std::path::Path) -> Result<MeasureSpec> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("measure file: {e}")))?;
    measure_from_json(&v)
}

pub fn save_measure(m: &MeasureSpec, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&measure_to_json(m))?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{rat, rat_i};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(x: i64, y: i64) -> Point {
        Point::from_i64(x, y)
    }

    fn pr(xn: i64, xd: i64, yn: i64, yd: i64) -> Point {
        Point::new(rat(xn, xd), rat(yn, yd))
    }

    /// Uniform over the unit square as two half-square triangles.
    pub(crate) fn unit_square_measure() -> MeasureSpec {
        MeasureSpec::new(vec![
            MeasureComponent {
                support: Triangle::new(p(0, 0), p(1, 0), p(1, 1)).unwrap(),
                weight: rat(1, 2),
            },
            MeasureComponent {
                support: Triangle::new(p(0, 0), p(1, 1), p(0, 1)).unwrap(),
                weight: rat(1, 2),
            },
        ])
        .unwrap()
    }

    #[test]
    fn prob_triangle_cases() {
        let d = unit_square_measure();
        let t = Triangle::new(p(0, 0), p(1, 0), p(0, 1)).unwrap();
        assert_eq!(d.prob_triangle(&t), rat(1, 2));
        let far = Triangle::new(p(5, 5), p(6, 5), p(5, 6)).unwrap();
        assert_eq!(d.prob_triangle(&far), rat_i(0));
        // Containment / disjointness with a 7/10 : 3/10 mixture.
        let da = Triangle::new(p(0, 0), p(1, 0), p(0, 1)).unwrap();
        let db = Triangle::new(p(10, 10), p(11, 10), p(10, 11)).unwrap();
        let d2 = MeasureSpec::new(vec![
            MeasureComponent { support: da, weight: rat(7, 10) },
            MeasureComponent { support: db, weight: rat(3, 10) },
        ])
        .unwrap();
        let big = Triangle::new(p(-1, -1), p(5, -1), p(-1, 5)).unwrap();
        assert_eq!(d2.prob_triangle(&big), rat(7, 10));
    }

    #[test]
    fn prob_additive_across_chord() {
        let d = unit_square_measure();
        let whole = Triangle::new(p(0, 0), p(2, 0), p(0, 2)).unwrap();
        let a = Triangle::new(p(0, 0), p(1, 0), p(0, 2)).unwrap();
        let b = Triangle::new(p(1, 0), p(2, 0), p(0, 2)).unwrap();
        assert_eq!(d.prob_triangle(&a) + d.prob_triangle(&b), d.prob_triangle(&whole));
        // Monotone under containment.
        assert!(d.prob_triangle(&a) <= d.prob_triangle(&whole));
    }

    #[test]
    fn sampling_means_match_analytic_values() {
        let d = unit_square_measure();
        let cover = d.cover_triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let q = d.sample_conditional(&cover, &mut rng).unwrap();
            let (x, y) = q.to_f64();
            sx += x;
            sy += y;
        }
        // Mean of U([0,1]^2) is (1/2, 1/2); 3 sigma of the sample mean is
        // 3*sqrt(1/12/n) ~ 0.00274.
        assert!((sx / n as f64 - 0.5).abs() < 0.00274, "mean x {}", sx / n as f64);
        assert!((sy / n as f64 - 0.5).abs() < 0.00274, "mean y {}", sy / n as f64);
    }

    #[test]
    fn conditional_sampling_restricts_support() {
        let d = unit_square_measure();
        // Triangle whose intersection with the square is the left half
        // [0,1/2] x [0,1].
        let t = Triangle::new(pr(1, 2, -2, 1), pr(1, 2, 3, 1), pr(-9, 2, -2, 1)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 100_000;
        let mut sx = 0.0;
        for _ in 0..n {
            let q = d.sample_conditional(&t, &mut rng).unwrap();
            assert!(q.x <= rat(1, 2) && q.x >= rat_i(0));
            sx += q.to_f64().0;
        }
        // Mean x of U([0,1/2]) is 1/4; 3 sigma ~ 0.00137.
        assert!((sx / n as f64 - 0.25).abs() < 0.00137, "mean x {}", sx / n as f64);
    }

    #[test]
    fn zero_mass_region_is_an_error() {
        let d = unit_square_measure();
        let far = Triangle::new(p(5, 5), p(6, 5), p(5, 6)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(d.sample_conditional(&far, &mut rng), Err(Error::ZeroMassRegion)));
        assert!(matches!(d.condition(&far), Err(Error::ZeroMassRegion)));
    }

    #[test]
    fn conditioning_identity_on_full_support() {
        let d = unit_square_measure();
        let cover = d.cover_triangle();
        let c = d.condition(&cover).unwrap();
        // Same measure as a function: agree on a family of probe triangles.
        for (a, b, cc) in [
            ((0, 0), (1, 0), (0, 1)),
            ((0, 0), (2, 0), (0, 2)),
            ((-1, -1), (3, 0), (0, 3)),
        ] {
            let t = Triangle::new(
                p(a.0, a.1),
                p(b.0, b.1),
                p(cc.0, cc.1),
            )
            .unwrap();
            assert_eq!(d.prob_triangle(&t), c.prob_triangle(&t));
        }
    }

    #[test]
    fn conditioning_chain_rule_exact() {
        // prob(condition(D,t), s) * prob(D,t) = prob(D, s ∩ t), checked via
        // the clipping oracle over a deterministic family of triangles.
        let d = unit_square_measure();
        let t = Triangle::new(p(0, 0), p(1, 0), p(0, 1)).unwrap();
        let pt = d.prob_triangle(&t);
        let cond = d.condition(&t).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let cover = d.cover_triangle();
        for _ in 0..100 {
            let a = d.sample_conditional(&cover, &mut rng).unwrap();
            let b = d.sample_conditional(&cover, &mut rng).unwrap();
            let c = d.sample_conditional(&cover, &mut rng).unwrap();
            let Ok(s) = Triangle::new(a, b, c) else { continue };
            let inter = clip_to_triangle(&s.to_polygon(), &t);
            let direct = d.prob_polygon(&inter);
            assert_eq!(cond.prob_triangle(&s) * &pt, direct);
        }
    }

    #[test]
    fn entropy_closed_forms() {
        let quarters = [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)];
        assert!((entropy_bits(quarters.iter()).unwrap() - 2.0).abs() < 1e-12);
        let single = [rat_i(1)];
        assert_eq!(entropy_bits(single.iter()).unwrap(), 0.0);
        let skew = [rat(1, 2), rat(1, 4), rat(1, 4)];
        assert!((entropy_bits(skew.iter()).unwrap() - 1.5).abs() < 1e-12);
        assert!(matches!(
            entropy_bits([rat(-1, 2)].iter()),
            Err(Error::NegativeMass)
        ));
        // Maximized at uniform.
        for k in 1..12usize {
            let cells: Vec<Rat> = (0..k).map(|_| rat(1, k as i64)).collect();
            assert!(entropy_bits(cells.iter()).unwrap() <= (k as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn conditional_histogram_chi_square() {
        // Occupancy of a fixed sub-triangle vs its exact conditional mass:
        // 2-cell chi-square must stay below the p=0.001 critical value.
        let d = unit_square_measure();
        let cover = d.cover_triangle();
        let sub = Triangle::new(p(0, 0), pr(1, 2, 0, 1), pr(0, 1, 1, 2)).unwrap();
        let expect = rat_to_f64(&d.prob_triangle(&sub));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000usize;
        let mut inside = 0usize;
        for _ in 0..n {
            let q = d.sample_conditional(&cover, &mut rng).unwrap();
            if crate::geom::point_in_triangle(&q, &sub) != crate::geom::Containment::Outside {
                inside += 1;
            }
        }
        let e1 = expect * n as f64;
        let e0 = (1.0 - expect) * n as f64;
        let o1 = inside as f64;
        let o0 = (n - inside) as f64;
        let chi2 = (o1 - e1).powi(2) / e1 + (o0 - e0).powi(2) / e0;
        assert!(chi2 < 10.828, "chi-square {chi2} exceeds p=0.001 critical value");
    }

    #[test]
    fn file_round_trip_is_identity() {
        let d = unit_square_measure();
        let v = measure_to_json(&d);
        let d2 = measure_from_json(&v).unwrap();
        let v2 = measure_to_json(&d2);
        assert_eq!(serde_json::to_string(&v).unwrap(), serde_json::to_string(&v2).unwrap());
    }

    #[test]
    fn invalid_weights_rejected() {
        let t = Triangle::new(p(0, 0), p(1, 0), p(0, 1)).unwrap();
        assert!(MeasureSpec::new(vec![MeasureComponent {
            support: t.clone(),
            weight: rat(1, 2)
        }])
        .is_err());
        assert!(MeasureSpec::new(vec![
            MeasureComponent { support: t.clone(), weight: rat(3, 2) },
            MeasureComponent { support: t, weight: rat(-1, 2) },
        ])
        .is_err());
    }
}
