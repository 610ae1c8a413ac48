//! Deterministic test and benchmark fixtures.
//!
//! The planar fixtures are laid out inside [1/8, 7/8]^2 so normalization is
//! the identity, which keeps hand-computed coordinates valid after
//! `normalize_unit_square`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{rat, rat_i, Point, Rat, Triangle};
use crate::measure::{MeasureComponent, MeasureSpec};
use crate::subdivision::{Face, Subdivision};

/// Single triangle: 3 vertices, 3 edges, inner + outer faces.
pub fn tri() -> Subdivision {
    let v = vec![
        Point::new(rat(1, 8), rat(1, 8)),
        Point::new(rat(7, 8), rat(1, 8)),
        Point::new(rat(1, 8), rat(7, 8)),
    ];
    Subdivision::new(
        v,
        vec![(0, 1), (1, 2), (2, 0)],
        vec![
            Face { label: "inner".into(), rep: Point::new(rat(1, 4), rat(1, 4)) },
            Face { label: "outer".into(), rep: Point::new(rat(3, 4), rat(3, 4)) },
        ],
    )
    .expect("tri fixture is valid")
}

/// k >= 2 disjoint axis-aligned squares in a row ("islands"), alternating
/// with equal-width gaps across [1/8, 7/8].
pub fn islands(k: usize) -> Subdivision {
    assert!(k >= 2, "islands fixture needs k >= 2");
    let s = rat(3, 4) / rat_i(2 * k as i64 - 1);
    let y0 = rat(1, 8);
    let y1 = &y0 + &s;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut faces = Vec::new();
    for i in 0..k {
        let x0 = rat(1, 8) + rat_i(2 * i as i64) * &s;
        let x1 = &x0 + &s;
        let base = vertices.len();
        vertices.push(Point::new(x0.clone(), y0.clone()));
        vertices.push(Point::new(x1.clone(), y0.clone()));
        vertices.push(Point::new(x1.clone(), y1.clone()));
        vertices.push(Point::new(x0.clone(), y1.clone()));
        edges.push((base, base + 1));
        edges.push((base + 1, base + 2));
        edges.push((base + 2, base + 3));
        edges.push((base + 3, base));
        faces.push(Face {
            label: format!("island{i}"),
            rep: Point::new(&x0 + &s / rat_i(2), &y0 + &s / rat_i(2)),
        });
    }
    faces.push(Face {
        label: "sea".into(),
        rep: Point::new(rat(1, 8) + rat(3, 2) * &s, &y0 + &s / rat_i(2)),
    });
    Subdivision::new(vertices, edges, faces).expect("islands fixture is valid")
}

/// Regular grid with n = (m+1)^2 vertices spanning [1/8, 3/4]^2, cells
/// labeled `c{i}_{j}`, outer representative at (7/8, 7/8).
pub fn grid(n: usize) -> Subdivision {
    let side = (n as f64).sqrt().round() as usize;
    assert!(side * side == n && side >= 2, "grid size must be a perfect square >= 4");
    let m = side - 1;
    let coord = |i: usize| rat(1, 8) + rat(5, 8) * rat(i as i64, m as i64);
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let mut vertices = Vec::with_capacity(n);
    for i in 0..=m {
        for j in 0..=m {
            vertices.push(Point::new(coord(i), coord(j)));
        }
    }
    let mut edges = Vec::new();
    for i in 0..=m {
        for j in 0..=m {
            if i < m {
                edges.push((idx(i, j), idx(i + 1, j)));
            }
            if j < m {
                edges.push((idx(i, j), idx(i, j + 1)));
            }
        }
    }
    let mut faces = Vec::new();
    for i in 0..m {
        for j in 0..m {
            faces.push(Face {
                label: format!("c{i}_{j}"),
                rep: Point::new(
                    rat(1, 8) + rat(5, 8) * rat(2 * i as i64 + 1, 2 * m as i64),
                    rat(1, 8) + rat(5, 8) * rat(2 * j as i64 + 1, 2 * m as i64),
                ),
            });
        }
    }
    faces.push(Face { label: "outer".into(), rep: Point::new(rat(7, 8), rat(7, 8)) });
    Subdivision::new(vertices, edges, faces).expect("grid fixture is valid")
}

fn square_measure(x0: Rat, y0: Rat, x1: Rat, y1: Rat, w: Rat) -> Vec<MeasureComponent> {
    let half = &w / rat_i(2);
    vec![
        MeasureComponent {
            support: Triangle::new(
                Point::new(x0.clone(), y0.clone()),
                Point::new(x1.clone(), y0.clone()),
                Point::new(x1.clone(), y1.clone()),
            )
            .unwrap(),
            weight: half.clone(),
        },
        MeasureComponent {
            support: Triangle::new(
                Point::new(x0.clone(), y0),
                Point::new(x1, y1.clone()),
                Point::new(x0, y1),
            )
            .unwrap(),
            weight: half,
        },
    ]
}

/// Uniform over [0,1]^2.
pub fn unit_uniform() -> MeasureSpec {
    MeasureSpec::new(square_measure(rat_i(0), rat_i(0), rat_i(1), rat_i(1), rat_i(1))).unwrap()
}

/// Uniform over [1/8, 7/8]^2 (the normalized frame).
pub fn uniform_measure_on_box() -> MeasureSpec {
    MeasureSpec::new(square_measure(rat(1, 8), rat(1, 8), rat(7, 8), rat(7, 8), rat_i(1))).unwrap()
}

fn tiny_triangle(cx: &Rat, cy: &Rat, r: &Rat) -> Triangle {
    Triangle::new(
        Point::new(cx - r, cy - r),
        Point::new(cx + r, cy - r),
        Point::new(cx.clone(), cy + r),
    )
    .unwrap()
}

/// 99% of the mass in a tiny triangle, 1% in a medium one.
pub fn skewed_99_1() -> MeasureSpec {
    let c = rat(1, 2);
    MeasureSpec::new(vec![
        MeasureComponent { support: tiny_triangle(&c, &c, &rat(1, 64)), weight: rat(99, 100) },
        MeasureComponent {
            support: Triangle::new(
                Point::new(rat(1, 4), rat(1, 4)),
                Point::new(rat(3, 4), rat(1, 4)),
                Point::new(rat(1, 4), rat(3, 4)),
            )
            .unwrap(),
            weight: rat(1, 100),
        },
    ])
    .unwrap()
}

/// Three well-separated support triangles (disconnected support).
pub fn disconnected_measure() -> MeasureSpec {
    MeasureSpec::new(vec![
        MeasureComponent {
            support: tiny_triangle(&rat(1, 4), &rat(1, 4), &rat(1, 16)),
            weight: rat(1, 2),
        },
        MeasureComponent {
            support: tiny_triangle(&rat(3, 4), &rat(1, 4), &rat(1, 16)),
            weight: rat(3, 10),
        },
        MeasureComponent {
            support: tiny_triangle(&rat(1, 2), &rat(3, 4), &rat(1, 16)),
            weight: rat(1, 5),
        },
    ])
    .unwrap()
}

/// The entropy-sensitivity measure: >= 98% of the mass in a tiny triangle
/// that sits strictly inside one grid cell for every ladder size
/// (m in {3, 15, 31, 63}), the rest in a slightly larger triangle around it.
///
/// The center (7/16, 7/16) corresponds to grid parameter t = 1/2, which is
/// never on a grid line for odd m; the nearest line is 5/(16m) away
/// (~0.00496 for m = 63). The support radius of at most 1/1024 leaves room
/// for the support-covering triangle (~3.3 radii) inside the same cell.
pub fn hot_cell_measure() -> MeasureSpec {
    let c = rat(7, 16);
    MeasureSpec::new(vec![
        MeasureComponent { support: tiny_triangle(&c, &c, &rat(1, 2048)), weight: rat(49, 50) },
        MeasureComponent { support: tiny_triangle(&c, &c, &rat(1, 1024)), weight: rat(1, 50) },
    ])
    .unwrap()
}

/// Two-island skew: 98% inside island 0's face, 2% spread over a triangle
/// straddling the sea and both islands.
pub fn islands_skew_measure(k: usize) -> MeasureSpec {
    assert!(k >= 2);
    let s = rat(3, 4) / rat_i(2 * k as i64 - 1);
    let cx = rat(1, 8) + &s / rat_i(2);
    let cy = rat(1, 8) + &s / rat_i(2);
    let r = &s / rat_i(8);
    MeasureSpec::new(vec![
        MeasureComponent { support: tiny_triangle(&cx, &cy, &r), weight: rat(49, 50) },
        MeasureComponent {
            support: Triangle::new(
                Point::new(rat(5, 32), rat(5, 32)),
                Point::new(rat(27, 32), rat(5, 32)),
                Point::new(rat(5, 32), rat(27, 32)),
            )
            .unwrap(),
            weight: rat(1, 50),
        },
    ])
    .unwrap()
}

/// Measure putting mass over each island plus the sea, for disconnected
/// oracle sweeps.
pub fn islands_measure(k: usize) -> MeasureSpec {
    assert!(k >= 3);
    let s = rat(3, 4) / rat_i(2 * k as i64 - 1);
    let center = |i: usize| rat(1, 8) + rat_i(2 * i as i64) * &s + &s / rat_i(2);
    let cy = rat(1, 8) + &s / rat_i(2);
    let r = &s / rat_i(8);
    MeasureSpec::new(vec![
        MeasureComponent { support: tiny_triangle(&center(0), &cy, &r), weight: rat(1, 2) },
        MeasureComponent { support: tiny_triangle(&center(1), &cy, &r), weight: rat(3, 10) },
        MeasureComponent { support: tiny_triangle(&center(2), &cy, &r), weight: rat(1, 10) },
        // A slab of sea between islands 0 and 1.
        MeasureComponent {
            support: tiny_triangle(&(rat(1, 8) + rat(3, 2) * &s), &cy, &r),
            weight: rat(1, 10),
        },
    ])
    .unwrap()
}

/// n pairwise disjoint short random segments (a forest-free edge soup):
/// exactly one face. Deterministic per seed.
pub fn random_disjoint_segments(n: usize, seed: u64) -> Subdivision {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = 1 << 7; // hash grid resolution
    let mut occupied = vec![false; cells * cells];
    let mut vertices: Vec<Point> = Vec::with_capacity(2 * n);
    let mut edges = Vec::new();
    let denom = 1i64 << 20;
    while edges.len() < n {
        let gx = (rng.next_u64() % (cells as u64 - 2)) as usize + 1;
        let gy = (rng.next_u64() % (cells as u64 - 2)) as usize + 1;
        if occupied[gx * cells + gy] {
            continue;
        }
        occupied[gx * cells + gy] = true;
        // Segment inside the open grid cell: endpoints jittered around the
        // cell center so segments in distinct cells cannot meet.
        let fx = (gx as i64) * denom / cells as i64;
        let fy = (gy as i64) * denom / cells as i64;
        let span = denom / cells as i64;
        let j1 = (rng.next_u64() % (span as u64 / 4)) as i64;
        let j2 = (rng.next_u64() % (span as u64 / 4)) as i64;
        let a = Point::new(rat(fx + span / 8 + j1, denom), rat(fy + span / 8 + j2, denom));
        let b = Point::new(
            rat(fx + span / 2 + j2, denom),
            rat(fy + span / 2 + (j1 + j2) % (span / 4), denom),
        );
        if a == b {
            continue;
        }
        let base = vertices.len();
        vertices.push(a);
        vertices.push(b);
        edges.push((base, base + 1));
    }
    Subdivision::new(
        vertices,
        edges,
        vec![Face { label: "outer".into(), rep: Point::new(rat(1, denom), rat(1, denom)) }],
    )
    .expect("segment soup is valid")
}
