//! The extension `Q = {(x, y) : Ax + Ty = b, y >= 0}` built from a slack
//! factorization, plus the two halves of the projection certificate:
//! vertex lifting (`P ⊆ π(Q)`) and per-facet LP maximization (`π(Q) ⊆ P`).
//!
//! Q has at most `r` facets (one per `y_l >= 0` row), which is the whole
//! point: `r` can be far below the facet count of P itself.

use rayon::prelude::*;

use crate::error::Error;
use crate::lp::{solve, LpOutcome, LpProblem, Relation, Sense};
use crate::mat::{dot, Mat};
use crate::polygon::{LinearSystemH, PointVec};
use crate::scalar::{Scalar, ScalarMode};
use crate::slack::NonnegFactorization;
use crate::tol;

/// `Q = {(x, y) : Ax + Ty = b, y >= 0}` in `R^{d+r}`.
#[derive(Clone, Debug)]
pub struct ExtendedSystem<S> {
    a: Mat<S>,
    t: Mat<S>,
    b: Vec<S>,
}

impl<S: Scalar> ExtendedSystem<S> {
    pub fn a(&self) -> &Mat<S> {
        &self.a
    }

    pub fn t(&self) -> &Mat<S> {
        &self.t
    }

    pub fn b(&self) -> &[S] {
        &self.b
    }

    /// Number of equality rows (= facets of P).
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Ambient dimension of P.
    pub fn d(&self) -> usize {
        self.a.cols()
    }

    /// Number of lifted coordinates; also Q's facet upper bound.
    pub fn r(&self) -> usize {
        self.t.cols()
    }
}

/// Assembles Q from an H-system and a factorization of its slack matrix.
///
/// The product check `TU = S` is the caller's job (`verify_factorization`);
/// this only enforces shape consistency.  `T >= 0` is an invariant of
/// [`NonnegFactorization`] itself.
pub fn build_extension<S: Scalar>(
    h: &LinearSystemH<S>,
    f: &NonnegFactorization<S>,
) -> Result<ExtendedSystem<S>, Error> {
    if f.t().rows() != h.m() {
        return Err(Error::InvalidSize(format!(
            "factorization has {} rows but the H-system has {} facets",
            f.t().rows(),
            h.m()
        )));
    }
    Ok(ExtendedSystem { a: h.a().clone(), t: f.t().clone(), b: h.b().to_vec() })
}

/// Lifts vertex `j` to `(v_j, U^j)` and certifies it satisfies Q's
/// equations: exactly in rational mode, within `1e-9 * ||b||_inf` in float
/// mode.  The `y`-part is nonnegative by the factorization invariant.
pub fn lift_vertex<S: Scalar>(
    j: usize,
    f: &NonnegFactorization<S>,
    h: &LinearSystemH<S>,
    vertices: &[PointVec<S>],
) -> Result<PointVec<S>, Error> {
    if j >= vertices.len() || f.u().cols() != vertices.len() {
        return Err(Error::InvalidSize(format!(
            "vertex index {j} out of range for {} vertices / {} factor columns",
            vertices.len(),
            f.u().cols()
        )));
    }
    let v = &vertices[j];
    if v.dim() != h.d() {
        return Err(Error::InvalidSize("vertex dimension differs from the H-system".into()));
    }
    let mut coords = v.coords().to_vec();
    coords.extend(f.u().col(j).cloned());
    let lifted = PointVec::new(coords);

    let bmax = vec_max_abs(h.b());
    for i in 0..h.m() {
        let mut lhs = dot(h.a().row(i), v.coords());
        for (l, y) in f.u().col(j).enumerate() {
            if !y.is_zero() {
                lhs = lhs + f.t()[(i, l)].clone() * y.clone();
            }
        }
        let resid = (lhs - h.b()[i].clone()).abs();
        let bad = match S::MODE {
            ScalarMode::Rational => !resid.is_zero(),
            ScalarMode::Float64 => resid.to_f64() > tol::VERIFY_REL * bmax.to_f64(),
        };
        if bad {
            return Err(Error::LiftFailure(format!(
                "vertex {j} misses equation {i} by {:e}",
                resid.to_f64()
            )));
        }
    }
    Ok(lifted)
}

fn vec_max_abs<S: Scalar>(v: &[S]) -> S {
    let mut m = S::zero();
    for x in v {
        m = m.max_with(&x.abs());
    }
    m
}

/// One row of the projection certificate: the LP value of `max A_i x` over
/// Q compared against `b_i`.
#[derive(Clone, Debug)]
pub struct ProjectionReport<S> {
    /// `optimum - b_i` per facet row.
    pub gaps: Vec<S>,
    /// Rows whose LP was unbounded (certification failure).
    pub unbounded_rows: Vec<usize>,
    pub max_gap: S,
    pub worst_row: usize,
    pub pass: bool,
}

/// Maximizes every facet functional `A_i x` over Q.  π(Q) ⊆ P holds iff no
/// optimum exceeds `b_i`; together with all vertices lifting feasibly this
/// certifies π(Q) = P without any projection algorithm.
pub fn check_projection_inclusion<S: Scalar>(
    q: &ExtendedSystem<S>,
    h: &LinearSystemH<S>,
) -> Result<ProjectionReport<S>, Error> {
    if h.m() != q.m() || h.d() != q.d() {
        return Err(Error::InvalidSize("H-system does not match the extension".into()));
    }
    let (m, d, r) = (q.m(), q.d(), q.r());

    // Shared constraint data: [A | T] (x, y) = b, x free, y >= 0.
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = q.a.row(i).to_vec();
        row.extend_from_slice(q.t.row(i));
        rows.push(row);
    }
    let amat = Mat::from_rows(rows)?;
    let rel = vec![Relation::Eq; m];
    let mut lower: Vec<Option<S>> = vec![None; d];
    lower.extend((0..r).map(|_| Some(S::zero())));
    let upper: Vec<Option<S>> = vec![None; d + r];

    let outcomes: Vec<Result<LpOutcome<S>, Error>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut objective = q.a.row(i).to_vec();
            objective.extend((0..r).map(|_| S::zero()));
            let p = LpProblem::new(
                amat.clone(),
                rel.clone(),
                q.b.clone(),
                lower.clone(),
                upper.clone(),
                objective,
                Sense::Maximize,
            )?;
            solve(&p)
        })
        .collect();

    let mut gaps = Vec::with_capacity(m);
    let mut unbounded_rows = Vec::new();
    let mut worst: Option<(S, usize)> = None;
    for (i, out) in outcomes.into_iter().enumerate() {
        match out? {
            LpOutcome::Optimal { value, .. } => {
                let gap = value - q.b[i].clone();
                let bigger = match &worst {
                    None => true,
                    Some((g, _)) => gap.cmp_total(g) == std::cmp::Ordering::Greater,
                };
                if bigger {
                    worst = Some((gap.clone(), i));
                }
                gaps.push(gap);
            }
            LpOutcome::Unbounded => {
                unbounded_rows.push(i);
                gaps.push(S::zero());
            }
            LpOutcome::Infeasible => {
                return Err(Error::InvalidInput(format!(
                    "extension is empty (row {i} LP infeasible)"
                )));
            }
        }
    }
    let (max_gap, worst_row) = worst.unwrap_or((S::zero(), 0));
    let gap_ok = match S::MODE {
        ScalarMode::Rational => !max_gap.is_positive(),
        ScalarMode::Float64 => {
            max_gap.to_f64() <= tol::PROJECTION_REL * vec_max_abs(&q.b).to_f64()
        }
    };
    let pass = unbounded_rows.is_empty() && gap_ok;
    Ok(ProjectionReport { gaps, unbounded_rows, max_gap, worst_row, pass })
}
