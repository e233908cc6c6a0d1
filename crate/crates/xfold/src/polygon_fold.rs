//! Folding a regular polygon onto a wedge: symmetry axes, conditional
//! reflections, and the rank-`2*ceil(log2 n)` nonnegative factorization of
//! the slack matrix they induce.
//!
//! The construction repeatedly halves the polygon: axis `i` is chosen so that
//! reflecting the "far" half of the surviving wedge lands on the near half,
//! and after `q = ceil(log2 n)` halvings every vertex has been mapped onto
//! `v_1` and every facet onto one of the two facets containing `v_1`.  Each
//! halving step contributes one 2-slot column pair to the factors: the slack
//! lost when facet and vertex fold in from opposite sides of the axis is
//! exactly `2 * d(a, axis) * d(v, axis)`, a product of two nonnegative
//! per-object quantities.
//!
//! Everything here is float-mode: regular polygons have irrational vertices.

use crate::error::Error;
use crate::mat::Mat;
use crate::polygon::{make_regular_ngon, polygon_to_hrep, LinearSystemH, PointVec, PolygonV};
use crate::scalar::ScalarMode;
use crate::slack::{slack_matrix, NonnegFactorization, SlackMatrix};
use crate::tol;

/// A reflection axis through the origin, stored by its unit normal, oriented
/// so the closed halfplane `{x : normal . x >= 0}` contains `v_1 = (1, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FoldAxis {
    pub index: usize,
    pub normal: [f64; 2],
}

impl FoldAxis {
    pub fn new(index: usize, normal: [f64; 2]) -> Result<Self, Error> {
        let len = normal[0].hypot(normal[1]);
        if (len - 1.0).abs() > tol::UNIT_NORM {
            return Err(Error::InvalidInput(format!(
                "axis normal has length {len}, expected 1"
            )));
        }
        // v_1 = (1, 0) must lie in the closed positive halfplane.
        if normal[0] < -tol::ON_AXIS {
            return Err(Error::InvalidInput(
                "axis normal oriented away from the first vertex".into(),
            ));
        }
        Ok(FoldAxis { index, normal })
    }

    /// Signed distance `normal . x` (the normal is unit).
    pub fn signed_dist(&self, x: [f64; 2]) -> f64 {
        self.normal[0] * x[0] + self.normal[1] * x[1]
    }

    /// Mirror image across the axis.
    pub fn reflect(&self, x: [f64; 2]) -> [f64; 2] {
        let s = 2.0 * self.signed_dist(x);
        [x[0] - s * self.normal[0], x[1] - s * self.normal[1]]
    }
}

/// The halving axes of a regular `n`-gon, in folding order.
///
/// With vertices numbered counter-clockwise from `v_1 = (1, 0)`, the `i`-th
/// axis runs through the origin and the midpoint of `v_ceil(k/2)` and
/// `v_ceil((k+1)/2)`, where `k` starts at `n` and becomes `floor((k+1)/2)`
/// each step; the loop runs until `k = 1`, i.e. `ceil(log2 n)` times.  For
/// odd `k` the two indices coincide and the axis passes through that vertex.
pub fn folding_axes(n: usize) -> Result<Vec<FoldAxis>, Error> {
    if n < 3 {
        return Err(Error::InvalidSize(format!("folding needs n >= 3, got {n}")));
    }
    let mut axes = Vec::new();
    let mut k = n;
    let mut i = 0;
    while k > 1 {
        // Midpoint of v_ceil(k/2) and v_ceil((k+1)/2) sits at angle
        // pi*(k-1)/n: the two vertex angles are 2*pi*(j-1)/n and their index
        // sum is k + 1.
        let phi = std::f64::consts::PI * (k as f64 - 1.0) / n as f64;
        // Rotate the axis direction by -90 degrees; phi is in (0, pi), so
        // sin(phi) > 0 puts v_1 on the nonnegative side.
        let axis = FoldAxis::new(i, [phi.sin(), -phi.cos()])?;
        let mid = midpoint_of(n, k);
        if axis.signed_dist(mid).abs() > tol::ON_AXIS {
            return Err(Error::NumericalFailure(format!(
                "axis {i} misses its defining midpoint"
            )));
        }
        axes.push(axis);
        k = (k + 1) / 2;
        i += 1;
    }
    debug_assert_eq!(axes.len() as u32, crate::ceil_log2(n as u64));
    Ok(axes)
}

fn vertex_of(n: usize, j: usize) -> [f64; 2] {
    let theta = 2.0 * std::f64::consts::PI * (j as f64 - 1.0) / n as f64;
    [theta.cos(), theta.sin()]
}

fn midpoint_of(n: usize, k: usize) -> [f64; 2] {
    let a = vertex_of(n, k.div_ceil(2));
    let b = vertex_of(n, (k + 1).div_ceil(2));
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
}

/// One conditional reflection: points on the nonnegative side of the axis
/// (within `1e-12` of it counts as on it) stay put with flag `true`; points
/// strictly below reflect with flag `false`.
pub fn conditional_reflect(x: [f64; 2], axis: &FoldAxis) -> ([f64; 2], bool) {
    if axis.signed_dist(x) < -tol::ON_AXIS {
        (axis.reflect(x), false)
    } else {
        (x, true)
    }
}

/// The trace of an object through all axes: `q + 1` points and `q` side
/// flags (`true` = no reflection at that step).
#[derive(Clone, Debug, PartialEq)]
pub struct FoldingSequence {
    pub points: Vec<[f64; 2]>,
    pub side_flags: Vec<bool>,
}

impl FoldingSequence {
    pub fn q(&self) -> usize {
        self.side_flags.len()
    }

    pub fn terminal(&self) -> [f64; 2] {
        *self.points.last().expect("sequence is never empty")
    }
}

fn fold_point(x: [f64; 2], axes: &[FoldAxis]) -> FoldingSequence {
    let mut points = Vec::with_capacity(axes.len() + 1);
    let mut side_flags = Vec::with_capacity(axes.len());
    points.push(x);
    let mut cur = x;
    for axis in axes {
        let (next, flag) = conditional_reflect(cur, axis);
        // Reflections through the origin's axes are isometries.
        debug_assert!(
            (next[0].hypot(next[1]) - cur[0].hypot(cur[1])).abs()
                <= tol::NORM_PRESERVE_REL * cur[0].hypot(cur[1]).max(1.0)
        );
        points.push(next);
        side_flags.push(flag);
        cur = next;
    }
    FoldingSequence { points, side_flags }
}

/// Folds a vertex of the regular `n`-gon the axes were built for; the
/// terminal point must be `v_1 = (1, 0)`.
pub fn vertex_folding_sequence(v: [f64; 2], axes: &[FoldAxis]) -> Result<FoldingSequence, Error> {
    let seq = fold_point(v, axes);
    let t = seq.terminal();
    let err = (t[0] - 1.0).hypot(t[1]);
    if err > tol::FOLD_TERMINAL {
        return Err(Error::FoldingDivergence(format!(
            "vertex folded to ({}, {}), {err:e} away from v1",
            t[0], t[1]
        )));
    }
    Ok(seq)
}

/// Folds a facet by its normal (the right-hand side `beta` is untouched:
/// the axes pass through the origin, so reflecting a facet reflects its
/// normal and keeps its offset).  The terminal facet must contain `v_1`,
/// i.e. have zero slack there — it is one of the two facets at `v_1`.
pub fn facet_folding_sequence(
    a: [f64; 2],
    beta: f64,
    axes: &[FoldAxis],
) -> Result<FoldingSequence, Error> {
    let seq = fold_point(a, axes);
    let t = seq.terminal();
    let slack_at_v1 = beta - t[0]; // v_1 = (1, 0)
    if slack_at_v1.abs() > tol::FOLD_TERMINAL {
        return Err(Error::FoldingDivergence(format!(
            "facet folded to normal ({}, {}) with slack {slack_at_v1:e} at v1",
            t[0], t[1]
        )));
    }
    Ok(seq)
}

/// Which factor's slot rule to apply when reading entries off a sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldRole {
    Facet,
    Vertex,
}

/// The length-`2q` slot vector of one folded object.
///
/// Step `i` owns slots `2i` and `2i + 1`, and receives `sqrt(2) * d_i` where
/// `d_i` is the object's distance to axis `i` before step `i`.  A reflected
/// facet writes to slot `2i`, an unreflected one to `2i + 1`; vertices use
/// the mirrored rule.  The inner product of a facet row with a vertex column
/// therefore picks up `2 * d_a * d_v` exactly when the two folded from
/// opposite sides — the telescoping slack correction.
pub fn polygon_folding_factors(
    seq: &FoldingSequence,
    axes: &[FoldAxis],
    role: FoldRole,
) -> Vec<f64> {
    assert_eq!(seq.q(), axes.len(), "sequence and axes disagree");
    let mut out = vec![0.0; 2 * axes.len()];
    for (i, axis) in axes.iter().enumerate() {
        let d = axis.signed_dist(seq.points[i]).abs();
        let entry = std::f64::consts::SQRT_2 * d;
        let reflected = !seq.side_flags[i];
        let slot = match (role, reflected) {
            (FoldRole::Facet, true) | (FoldRole::Vertex, false) => 2 * i,
            (FoldRole::Facet, false) | (FoldRole::Vertex, true) => 2 * i + 1,
        };
        out[slot] = entry;
    }
    out
}

fn pt(p: &PointVec<f64>) -> [f64; 2] {
    [*p.x(), *p.y()]
}

/// Builds the regular `n`-gon, its facet system, and the rank-`2q`
/// nonnegative factorization of its slack matrix, without materializing the
/// slack matrix itself (it has `n^2` entries; verification can stream).
///
/// A column pair of an axis may come out identically zero — the step never
/// moved any facet (or any vertex) — and is kept, because the factorization's
/// advertised rank is exactly `2q`.
pub fn build_polygon_factors(
    n: usize,
) -> Result<(PolygonV<f64>, LinearSystemH<f64>, NonnegFactorization<f64>), Error> {
    let poly = make_regular_ngon(n, ScalarMode::Float64)?;
    let h = polygon_to_hrep(&poly)?;
    let axes = folding_axes(n)?;
    let q = axes.len();
    let mut t = Mat::zeros(n, 2 * q);
    for i in 0..n {
        let a = [h.a()[(i, 0)], h.a()[(i, 1)]];
        let seq = facet_folding_sequence(a, h.b()[i], &axes)?;
        let row = polygon_folding_factors(&seq, &axes, FoldRole::Facet);
        for (l, val) in row.into_iter().enumerate() {
            t[(i, l)] = val;
        }
    }
    let mut u = Mat::zeros(2 * q, n);
    for j in 0..n {
        let seq = vertex_folding_sequence(pt(poly.vertex(j)), &axes)?;
        let col = polygon_folding_factors(&seq, &axes, FoldRole::Vertex);
        for (l, val) in col.into_iter().enumerate() {
            u[(l, j)] = val;
        }
    }
    let f = NonnegFactorization::new(t, u)?;
    Ok((poly, h, f))
}

/// As [`build_polygon_factors`], but also materializes the `n x n` slack
/// matrix — intended for `n` up to a few thousand.
pub fn build_polygon_factorization(
    n: usize,
) -> Result<(SlackMatrix<f64>, NonnegFactorization<f64>), Error> {
    let (poly, h, f) = build_polygon_factors(n)?;
    let s = slack_matrix(&h, &poly.vertices().to_vec())?;
    Ok((s, f))
}

/// One step of the slack bookkeeping that makes the factorization work.
#[derive(Clone, Copy, Debug)]
pub struct TelescopeStep {
    pub step: usize,
    /// Slack before the step: `beta - a(i) . v(i)`.
    pub lhs: f64,
    /// Slack after the step plus the correction term.
    pub rhs: f64,
    /// `2 * d(a(i), axis) * d(v(i), axis)` when facet and vertex fold from
    /// strictly opposite sides, else 0.
    pub correction: f64,
    pub opposite_sides: bool,
    pub err: f64,
}

/// Per-step report of the telescoping identity for one (facet, vertex) pair.
#[derive(Clone, Debug)]
pub struct TelescopeReport {
    pub steps: Vec<TelescopeStep>,
    /// Slack of the terminal vertex against the terminal facet; the folding
    /// construction drives this to 0.
    pub final_slack: f64,
    /// Initial slack `beta - a . v`, which the corrections must sum to.
    pub initial_slack: f64,
    pub ok: bool,
}

/// Traces `beta - a(i) . v(i)` through the axes and checks, step by step,
/// that the slack stays constant except for a drop of `2 d_a d_v` whenever
/// facet and vertex fold in from opposite sides.  Report-only: numerical
/// disagreement is returned, not thrown.
pub fn telescoping_slack_check(
    a: [f64; 2],
    beta: f64,
    v: [f64; 2],
    axes: &[FoldAxis],
) -> TelescopeReport {
    let fa = fold_point(a, axes);
    let fv = fold_point(v, axes);
    let slack = |i: usize| -> f64 {
        beta - (fa.points[i][0] * fv.points[i][0] + fa.points[i][1] * fv.points[i][1])
    };
    let mut steps = Vec::with_capacity(axes.len());
    let mut ok = true;
    for (i, axis) in axes.iter().enumerate() {
        let d_a = axis.signed_dist(fa.points[i]).abs();
        let d_v = axis.signed_dist(fv.points[i]).abs();
        let opposite = fa.side_flags[i] != fv.side_flags[i];
        let correction = if opposite { 2.0 * d_a * d_v } else { 0.0 };
        let lhs = slack(i);
        let rhs = slack(i + 1) + correction;
        let err = (lhs - rhs).abs();
        if err > tol::TELESCOPE_STEP {
            ok = false;
        }
        steps.push(TelescopeStep { step: i, lhs, rhs, correction, opposite_sides: opposite, err });
    }
    let final_slack = slack(axes.len());
    if final_slack.abs() > tol::TELESCOPE_TOTAL {
        ok = false;
    }
    TelescopeReport { steps, final_slack, initial_slack: slack(0), ok }
}
