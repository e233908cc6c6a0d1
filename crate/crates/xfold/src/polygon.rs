//! Points, convex polygons, and their H-representations.
//!
//! Polygons are stored as counter-clockwise vertex lists.  Regular `n`-gons
//! are float-mode only (their coordinates are irrational); parabola-grid
//! polygons are exact-rational with integer coordinates.

use num::bigint::BigInt;
use num::integer::{gcd, lcm};
use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::mat::{dot, Mat};
use crate::scalar::{Rat, Scalar, ScalarMode};
use crate::tol;

/// A point with a fixed number of coordinates, all in one scalar mode.
#[derive(Clone, Debug, PartialEq)]
pub struct PointVec<S> {
    coords: Vec<S>,
}

impl<S: Scalar> PointVec<S> {
    pub fn new(coords: Vec<S>) -> Self {
        PointVec { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [S] {
        &mut self.coords
    }

    /// First coordinate; panics unless 2-dimensional.
    pub fn x(&self) -> &S {
        assert_eq!(self.dim(), 2);
        &self.coords[0]
    }

    pub fn y(&self) -> &S {
        assert_eq!(self.dim(), 2);
        &self.coords[1]
    }

    pub fn max_abs(&self) -> S {
        let mut best = S::zero();
        for c in &self.coords {
            let a = c.abs();
            if a.cmp_total(&best) == std::cmp::Ordering::Greater {
                best = a;
            }
        }
        best
    }
}

pub fn point2<S: Scalar>(x: S, y: S) -> PointVec<S> {
    PointVec::new(vec![x, y])
}

/// 2D cross product of `b - a` and `c - b`.
fn turn_cross<S: Scalar>(a: &PointVec<S>, b: &PointVec<S>, c: &PointVec<S>) -> S {
    let e1x = b.x().clone() - a.x().clone();
    let e1y = b.y().clone() - a.y().clone();
    let e2x = c.x().clone() - b.x().clone();
    let e2y = c.y().clone() - b.y().clone();
    e1x * e2y - e1y * e2x
}

fn edge_len_sq<S: Scalar>(a: &PointVec<S>, b: &PointVec<S>) -> S {
    let ex = b.x().clone() - a.x().clone();
    let ey = b.y().clone() - a.y().clone();
    ex.clone() * ex + ey.clone() * ey
}

/// A convex polygon: counter-clockwise vertex list, strictly convex.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonV<S> {
    vertices: Vec<PointVec<S>>,
}

impl<S: Scalar> PolygonV<S> {
    /// Builds and validates: `n >= 3`, 2D, no repeated vertices, strictly
    /// convex counter-clockwise order.
    pub fn new(vertices: Vec<PointVec<S>>) -> Result<Self, Error> {
        let p = PolygonV { vertices };
        p.validate()?;
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[PointVec<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &PointVec<S> {
        &self.vertices[i]
    }

    fn validate(&self) -> Result<(), Error> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidSize(format!("polygon needs >= 3 vertices, got {n}")));
        }
        for v in &self.vertices {
            if v.dim() != 2 {
                return Err(Error::InvalidSize("polygon vertices must be 2-dimensional".into()));
            }
        }
        for i in 0..n {
            if self.vertices[i] == self.vertices[(i + 1) % n] {
                return Err(Error::InvalidInput(format!("repeated vertex at index {i}")));
            }
        }
        // Strict convexity, counter-clockwise: every consecutive turn is a
        // strict left turn.  In float mode "strict" is relative to the edge
        // lengths so the test stays meaningful for very flat turns.
        for i in 0..n {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            let c = &self.vertices[(i + 2) % n];
            let cross = turn_cross(a, b, c);
            let ok = match S::MODE {
                ScalarMode::Rational => cross.is_positive(),
                ScalarMode::Float64 => {
                    let scale = (edge_len_sq(a, b).to_f64() * edge_len_sq(b, c).to_f64()).sqrt();
                    cross.to_f64() > tol::CONVEXITY_REL * scale
                }
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "polygon is not strictly convex counter-clockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(())
    }

    /// Twice the signed area (shoelace); positive for counter-clockwise.
    pub fn signed_area_x2(&self) -> S {
        let n = self.vertices.len();
        let mut acc = S::zero();
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            acc = acc + (p.x().clone() * q.y().clone() - q.x().clone() * p.y().clone());
        }
        acc
    }
}

/// An inequality system `A x <= b` (one row per facet).
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystemH<S> {
    a: Mat<S>,
    b: Vec<S>,
}

impl<S: Scalar> LinearSystemH<S> {
    pub fn new(a: Mat<S>, b: Vec<S>) -> Result<Self, Error> {
        if a.rows() != b.len() {
            return Err(Error::InvalidSize(format!(
                "H-system has {} rows but {} offsets",
                a.rows(),
                b.len()
            )));
        }
        for i in 0..a.rows() {
            if a.row(i).iter().all(|v| v.is_zero()) {
                return Err(Error::InvalidInput(format!("zero row {i} in H-system")));
            }
        }
        Ok(LinearSystemH { a, b })
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn d(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &Mat<S> {
        &self.a
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// `b_i - A_i x`: the slack of `x` against facet `i`.
    pub fn slack_at(&self, i: usize, x: &PointVec<S>) -> S {
        self.b[i].clone() - dot(self.a.row(i), x.coords())
    }
}

/// Regular `n`-gon with unit circumradius, vertex `j` (1-based) at angle
/// `2*pi*(j-1)/n`, counter-clockwise.  Float mode only: the coordinates are
/// irrational for every `n >= 3` except degenerate axes-aligned cases, so an
/// exact-rational request is refused rather than silently approximated.
pub fn make_regular_ngon(n: usize, mode: ScalarMode) -> Result<PolygonV<f64>, Error> {
    if mode == ScalarMode::Rational {
        return Err(Error::UnsupportedMode(
            "regular polygons have irrational coordinates; use float64".into(),
        ));
    }
    if n < 3 {
        return Err(Error::InvalidSize(format!("regular polygon needs n >= 3, got {n}")));
    }
    let mut vertices = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        vertices.push(point2(theta.cos(), theta.sin()));
    }
    let poly = PolygonV::new(vertices)?;
    // The vertex barycenter of a regular polygon is the origin; roundoff in
    // the trigonometric sums stays far below this bound.
    let (mut sx, mut sy) = (0.0, 0.0);
    for v in poly.vertices() {
        sx += v.x();
        sy += v.y();
    }
    let bary = (sx / n as f64).hypot(sy / n as f64);
    if bary > tol::BARYCENTER_ABS {
        return Err(Error::NumericalFailure(format!(
            "regular {n}-gon barycenter {bary:e} off origin"
        )));
    }
    Ok(poly)
}

/// Outward edge normal of a counter-clockwise polygon: the edge direction
/// rotated by -90 degrees.
fn outward_normal<S: Scalar>(vi: &PointVec<S>, vj: &PointVec<S>) -> (S, S) {
    let ex = vj.x().clone() - vi.x().clone();
    let ey = vj.y().clone() - vi.y().clone();
    (ey, S::zero() - ex)
}

/// H-representation of a convex polygon, one row per edge in vertex order
/// (row `i` is the edge from vertex `i` to vertex `i+1`).
///
/// Float mode scales every row to `b_i = 1`, which requires the origin to be
/// strictly interior (true for regular polygons).  Rational mode emits the
/// primitive integer normal obtained from the edge cross product, so integral
/// vertices give an integral system.
pub fn polygon_to_hrep<S: Scalar>(p: &PolygonV<S>) -> Result<LinearSystemH<S>, Error> {
    let n = p.n();
    let mut rows = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let vi = p.vertex(i);
        let vj = p.vertex((i + 1) % n);
        let (nx, ny) = outward_normal(vi, vj);
        let b0 = nx.clone() * vi.x().clone() + ny.clone() * vi.y().clone();
        match S::MODE {
            ScalarMode::Float64 => {
                if b0.to_f64() <= tol::CONVEXITY_REL {
                    return Err(Error::InvalidInput(
                        "float H-representation needs the origin strictly interior".into(),
                    ));
                }
                rows.push(vec![nx / b0.clone(), ny / b0.clone()]);
                b.push(S::one());
            }
            ScalarMode::Rational => {
                let (px, py, pb) = primitive_row(&nx, &ny, &b0);
                rows.push(vec![px, py]);
                b.push(pb);
            }
        }
    }
    LinearSystemH::new(Mat::from_rows(rows)?, b)
}

/// Clears denominators and divides by the gcd of the normal's numerators,
/// preserving orientation.  Only meaningful in rational mode; the generic
/// signature keeps `polygon_to_hrep` in one piece.
fn primitive_row<S: Scalar>(nx: &S, ny: &S, b0: &S) -> (S, S, S) {
    debug_assert!(S::MODE == ScalarMode::Rational);
    let rx = Rat::parse(&nx.render()).expect("rational render round-trips");
    let ry = Rat::parse(&ny.render()).expect("rational render round-trips");
    let rb = Rat::parse(&b0.render()).expect("rational render round-trips");
    // Scale both normal entries to integers, then divide out their gcd; the
    // combined factor is positive, so orientation is preserved.
    let scale = lcm(rx.denom().clone(), ry.denom().clone());
    let ix = (&rx * Rat::from_integer(scale.clone())).to_integer();
    let iy = (&ry * Rat::from_integer(scale.clone())).to_integer();
    let g = gcd(ix, iy);
    debug_assert!(!g.is_zero(), "zero edge normal");
    let factor = Rat::new(scale, g);
    let px = rx * &factor;
    let py = ry * &factor;
    let pb = rb * &factor;
    (
        S::parse(&px.render()).expect("round-trip"),
        S::parse(&py.render()).expect("round-trip"),
        S::parse(&pb.render()).expect("round-trip"),
    )
}

/// Chooses the grid abscissas of a parabola polygon.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSelector {
    /// Explicit distinct values in `[1, 2n]`.
    Subset(Vec<u64>),
    /// Uniform random choice of `n` distinct values in `[1, 2n]`, fully
    /// determined by the seed.
    Seed(u64),
}

/// Convex polygon with vertices `(z, z^2)` for `n` distinct grid values
/// `z in [1, 2n]`; exact-rational mode with integer coordinates inside
/// `[2n] x [4n^2]`.  Vertices are ordered by increasing `z`, which is the
/// counter-clockwise order for points on an upward parabola.
pub fn make_grid_parabola_polygon(n: usize, selector: &GridSelector) -> Result<PolygonV<Rat>, Error> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("parabola polygon needs n >= 3, got {n}")));
    }
    let bound = 2 * n as u64;
    let mut zs: Vec<u64> = match selector {
        GridSelector::Subset(values) => {
            if values.len() != n {
                return Err(Error::InvalidSelector(format!(
                    "subset has {} values, expected {n}",
                    values.len()
                )));
            }
            let mut sorted = values.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != n {
                return Err(Error::InvalidSelector("subset has repeated values".into()));
            }
            if sorted.iter().any(|&z| z < 1 || z > bound) {
                return Err(Error::InvalidSelector(format!("subset values must lie in [1, {bound}]")));
            }
            sorted
        }
        GridSelector::Seed(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let idx = rand::seq::index::sample(&mut rng, bound as usize, n);
            let mut zs: Vec<u64> = idx.iter().map(|i| i as u64 + 1).collect();
            zs.sort_unstable();
            zs
        }
    };
    zs.sort_unstable();
    let vertices = zs
        .into_iter()
        .map(|z| {
            let z = BigInt::from(z);
            point2(Rat::from_integer(z.clone()), Rat::from_integer(&z * &z))
        })
        .collect();
    PolygonV::new(vertices)
}
