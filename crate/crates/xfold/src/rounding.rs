//! Rounding an extension to polynomially-bounded coefficients while keeping
//! its lattice-point recovery exact.
//!
//! Pipeline: bound-check the integral H-system against `Δ = ((d+1)N)^d`,
//! stack `[A | T]`, select a row subset of maximal parallelepiped volume,
//! round `T` onto the grid `(1/(4r(d+r)Δ))·Z`, pad to `d+r` rows, and test
//! integer points by an exact box-LP within the band `ε = 1/(4(d+r))`.
//! Recovery (`X = P ∩ Z^d` reproduced exactly) is certified by exhaustive
//! enumeration over the bounding box.
//!
//! Everything here is exact rational arithmetic; the only tolerance is the
//! band width `ε`, which is part of the statement being tested, not a
//! numerical fudge.

use num::{BigInt, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::bounds::rational_rank;
use crate::error::Error;
use crate::lp::{solve, LpOutcome, LpProblem, Relation};
use crate::mat::{dot, Mat};
use crate::polygon::{point2, polygon_to_hrep, LinearSystemH, PolygonV};
use crate::scalar::{rat_int, Rat, Scalar};
use crate::slack::{slack_matrix, NonnegFactorization};

/// Cap on `C(m, k)` below which row selection is exhaustive (global
/// optimum); above it a greedy-plus-swap local optimum is used, which still
/// gives the Cramer bound `|λ_i| ≤ 1` (swap-optimality is exactly what that
/// bound needs).
const EXHAUSTIVE_CAP: u128 = 100_000;

/// Cap on lattice points enumerated by [`verify_recovery`].
const ENUM_CAP: u128 = 1_000_000;

/// The rounded system `(Ā, T̄, b̄)` with exactly `d + r` rows.
#[derive(Clone, Debug)]
pub struct RoundedSystem {
    a_bar: Mat<Rat>,
    t_bar: Mat<Rat>,
    b_bar: Vec<Rat>,
    delta: Rat,
}

impl RoundedSystem {
    pub fn a_bar(&self) -> &Mat<Rat> {
        &self.a_bar
    }

    pub fn t_bar(&self) -> &Mat<Rat> {
        &self.t_bar
    }

    pub fn b_bar(&self) -> &[Rat] {
        &self.b_bar
    }

    pub fn delta(&self) -> &Rat {
        &self.delta
    }

    pub fn d(&self) -> usize {
        self.a_bar.cols()
    }

    pub fn r(&self) -> usize {
        self.t_bar.cols()
    }

    /// The band half-width `1/(4(d+r))`.
    pub fn epsilon(&self) -> Rat {
        Rat::ratio(1, 4 * (self.d() + self.r()) as i64)
    }

    /// The grid step `1/(4r(d+r)Δ)` that every `T̄` entry is a multiple of.
    pub fn grid_step(&self) -> Rat {
        Rat::one() / (rat_int(4) * rat_int(self.r() as i64) * rat_int((self.d() + self.r()) as i64) * self.delta.clone())
    }
}

/// `((d+1)·N)^d`, the coefficient bound Δ.
pub fn compute_delta(d: u32, n_bound: u64) -> Result<Rat, Error> {
    if d < 2 || n_bound < 2 {
        return Err(Error::InvalidInput(format!(
            "delta needs d >= 2 and N >= 2, got d={d}, N={n_bound}"
        )));
    }
    let base = BigInt::from(d as u64 + 1) * BigInt::from(n_bound);
    Ok(rat_int(num::pow::pow(base, d as usize)))
}

/// Δ for the parabola-grid family: vertices live in `[2n] × [4n²]`, so
/// `N = 4n²` and `Δ = (3·4n²)² = 144·n⁴`.
pub fn parabola_delta(n: usize) -> Result<Rat, Error> {
    let nn = n as u64;
    compute_delta(2, 4 * nn * nn)
}

/// Checks `‖A‖∞ ≤ Δ`, `‖b‖∞ ≤ Δ`, and the slack bound `‖S‖∞ ≤ Δ²`.
/// Returns `false` (rather than erroring) on any violation, including a
/// vertex escaping its facet — the bound is then meaningless.
pub fn check_coefficient_bounds(
    h: &LinearSystemH<Rat>,
    vertices: &[crate::polygon::PointVec<Rat>],
    delta: &Rat,
) -> bool {
    if h.a().max_abs_entry() > *delta {
        return false;
    }
    for bi in h.b() {
        if bi.abs() > *delta {
            return false;
        }
    }
    let s = match slack_matrix(h, vertices) {
        Ok(s) => s,
        Err(_) => return false,
    };
    s.smax() <= delta.clone() * delta.clone()
}

/// `[A | T]` stacked row-wise: the matrix whose row span the selection
/// works in.
pub fn stack_rows(a: &Mat<Rat>, t: &Mat<Rat>) -> Result<Mat<Rat>, Error> {
    if a.rows() != t.rows() {
        return Err(Error::InvalidSize("A and T row counts differ".into()));
    }
    let rows = (0..a.rows())
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.extend_from_slice(t.row(i));
            row
        })
        .collect();
    Mat::from_rows(rows)
}

/// Exact determinant of a small square matrix (destructive Gaussian
/// elimination with partial pivoting).
fn det_exact(mut m: Vec<Vec<Rat>>) -> Rat {
    let k = m.len();
    let mut det = Rat::one();
    for col in 0..k {
        let pivot = (col..k).find(|&i| !m[i][col].is_zero());
        let Some(pivot) = pivot else {
            return Rat::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for i in col + 1..k {
            if m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone() / p.clone();
            for j in col..k {
                let sub = f.clone() * m[col][j].clone();
                m[i][j] = m[i][j].clone() - sub;
            }
        }
    }
    det
}

/// Squared parallelepiped volume of the selected rows: the Gram
/// determinant `det(M_I M_Iᵀ)`.
fn gram_volume_sq(m: &Mat<Rat>, idx: &[usize]) -> Rat {
    let k = idx.len();
    let mut g = vec![vec![Rat::zero(); k]; k];
    for (p, &i) in idx.iter().enumerate() {
        for (q, &j) in idx.iter().enumerate().skip(p) {
            let v = dot(m.row(i), m.row(j));
            g[p][q] = v.clone();
            g[q][p] = v;
        }
    }
    det_exact(g)
}

fn binomial_capped(m: usize, k: usize, cap: u128) -> Option<u128> {
    if k > m {
        return Some(0);
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((m - i) as u128)?;
        acc /= (i + 1) as u128;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

pub(crate) fn select_rows_exhaustive(m: &Mat<Rat>, k: usize) -> Result<Vec<usize>, Error> {
    use itertools::Itertools;
    let mut best: Option<(Rat, Vec<usize>)> = None;
    for idx in (0..m.rows()).combinations(k) {
        let vol = gram_volume_sq(m, &idx);
        let better = match &best {
            None => true,
            Some((bv, _)) => vol > *bv,
        };
        if better {
            best = Some((vol, idx));
        }
    }
    match best {
        Some((vol, idx)) if vol.is_positive() => Ok(idx),
        _ => Err(Error::DegenerateInput(format!(
            "no {k} rows of the stacked matrix are linearly independent"
        ))),
    }
}

pub(crate) fn select_rows_greedy(m: &Mat<Rat>, k: usize) -> Result<Vec<usize>, Error> {
    let n = m.rows();
    let mut idx: Vec<usize> = Vec::with_capacity(k);
    let mut vol = Rat::one();
    for _ in 0..k {
        let mut best: Option<(Rat, usize)> = None;
        for j in 0..n {
            if idx.contains(&j) {
                continue;
            }
            idx.push(j);
            let v = gram_volume_sq(m, &idx);
            idx.pop();
            if v.is_positive() && best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                best = Some((v, j));
            }
        }
        let Some((v, j)) = best else {
            return Err(Error::DegenerateInput(format!(
                "greedy selection stalled at {} of {k} independent rows",
                idx.len()
            )));
        };
        idx.push(j);
        vol = v;
    }
    // Swap to local optimality: the Cramer bound |λ_i| ≤ 1 needs exactly
    // that no single-row swap increases the volume.
    loop {
        let mut improved = false;
        'scan: for pos in 0..k {
            for j in 0..n {
                if idx.contains(&j) {
                    continue;
                }
                let old = idx[pos];
                idx[pos] = j;
                let v = gram_volume_sq(m, &idx);
                if v > vol {
                    vol = v;
                    improved = true;
                    break 'scan;
                }
                idx[pos] = old;
            }
        }
        if !improved {
            break;
        }
    }
    idx.sort_unstable();
    Ok(idx)
}

/// Picks `k` rows of the stacked `[A | T]` matrix spanning a maximal-volume
/// parallelepiped: globally maximal when `C(m, k)` is small enough to
/// enumerate, swap-optimal otherwise.  The returned indices are sorted.
pub fn select_max_volume_rows(m: &Mat<Rat>, k: usize) -> Result<Vec<usize>, Error> {
    if k == 0 || k > m.rows() {
        return Err(Error::InvalidInput(format!(
            "selection size {k} out of range for {} rows",
            m.rows()
        )));
    }
    match binomial_capped(m.rows(), k, EXHAUSTIVE_CAP) {
        Some(_) => select_rows_exhaustive(m, k),
        None => select_rows_greedy(m, k),
    }
}

/// The unique coefficients `λ` with `Σ_i λ_i · M_{I_i} = M_ℓ`, or `None`
/// when row `ℓ` is outside the span of the selected rows.  Used to check
/// the Cramer bound `|λ_i| ≤ 1` on selections.
pub fn expansion_coefficients(m: &Mat<Rat>, idx: &[usize], ell: usize) -> Option<Vec<Rat>> {
    let k = idx.len();
    let w = m.cols();
    // Solve the overdetermined w×k system C λ = m_ell exactly.
    let mut aug: Vec<Vec<Rat>> = (0..w)
        .map(|c| {
            let mut row: Vec<Rat> = idx.iter().map(|&i| m[(i, c)].clone()).collect();
            row.push(m[(ell, c)].clone());
            row
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(k);
    let mut rr = 0usize;
    for col in 0..k {
        let Some(p) = (rr..w).find(|&i| !aug[i][col].is_zero()) else {
            // Selected rows dependent; caller picked a bad set.
            return None;
        };
        aug.swap(rr, p);
        let pv = aug[rr][col].clone();
        for i in 0..w {
            if i == rr || aug[i][col].is_zero() {
                continue;
            }
            let f = aug[i][col].clone() / pv.clone();
            for j in col..=k {
                let sub = f.clone() * aug[rr][j].clone();
                aug[i][j] = aug[i][j].clone() - sub;
            }
        }
        pivot_rows.push(rr);
        rr += 1;
    }
    // Inconsistent leftover → not in the span.
    for i in rr..w {
        if !aug[i][k].is_zero() {
            return None;
        }
    }
    Some(
        pivot_rows
            .iter()
            .enumerate()
            .map(|(col, &row)| aug[row][k].clone() / aug[row][col].clone())
            .collect(),
    )
}

/// Nearest multiple of `step`, ties toward zero (inputs are nonnegative, so
/// ties round down).
fn round_to_grid(x: &Rat, step: &Rat) -> Rat {
    debug_assert!(!x.is_negative() && step.is_positive());
    let q = x / step;
    let fl = q.floor();
    let frac = q - fl.clone();
    let half = Rat::ratio(1, 2);
    let level = if frac > half { fl + Rat::one() } else { fl };
    level * step
}

/// Selects rows `I`, rounds `T_I` onto the grid, pads with zero rows to
/// exactly `d + r`.  `A` and `b` must be integral with `‖·‖∞ ≤ Δ`, and `T`
/// nonnegative with `‖T‖∞ ≤ Δ` (the normalized-pair bound).
pub fn round_system(
    a: &Mat<Rat>,
    t: &Mat<Rat>,
    b: &[Rat],
    idx: &[usize],
    delta: &Rat,
) -> Result<RoundedSystem, Error> {
    let m = a.rows();
    let (d, r) = (a.cols(), t.cols());
    if t.rows() != m || b.len() != m {
        return Err(Error::InvalidSize("A, T, b row counts differ".into()));
    }
    if d == 0 || r == 0 {
        return Err(Error::InvalidInput("empty system".into()));
    }
    if idx.len() > d + r || idx.iter().any(|&i| i >= m) {
        return Err(Error::InvalidInput("row selection out of range".into()));
    }
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Err(Error::InvalidInput("row selection has duplicates".into()));
    }
    for v in a.data() {
        if !v.is_integer() || v.abs() > *delta {
            return Err(Error::InvalidInput("A must be integral with |entries| <= delta".into()));
        }
    }
    for v in b {
        if !v.is_integer() || v.abs() > *delta {
            return Err(Error::InvalidInput("b must be integral with |entries| <= delta".into()));
        }
    }
    for v in t.data() {
        if v.is_negative() {
            return Err(Error::InvalidInput("T must be nonnegative".into()));
        }
    }
    if t.max_abs_entry() > *delta {
        return Err(Error::InvalidInput(
            "T exceeds delta; normalize the factorization first".into(),
        ));
    }

    let step = Rat::one()
        / (rat_int(4) * rat_int(r as i64) * rat_int((d + r) as i64) * delta.clone());
    let mut a_rows = Vec::with_capacity(d + r);
    let mut t_rows = Vec::with_capacity(d + r);
    let mut b_bar = Vec::with_capacity(d + r);
    for &i in &sorted {
        a_rows.push(a.row(i).to_vec());
        t_rows.push(t.row(i).iter().map(|v| round_to_grid(v, &step)).collect::<Vec<_>>());
        b_bar.push(b[i].clone());
    }
    while a_rows.len() < d + r {
        a_rows.push(vec![Rat::zero(); d]);
        t_rows.push(vec![Rat::zero(); r]);
        b_bar.push(Rat::zero());
    }

    #[cfg(debug_assertions)]
    {
        let half_step = step.clone() / rat_int(2);
        for (row, &i) in sorted.iter().enumerate() {
            for l in 0..r {
                let err = (t_rows[row][l].clone() - t[(i, l)].clone()).abs();
                debug_assert!(err <= half_step, "rounding moved an entry by more than step/2");
                debug_assert!((t_rows[row][l].clone() / step.clone()).is_integer());
            }
        }
    }

    let rs = RoundedSystem {
        a_bar: Mat::from_rows(a_rows)?,
        t_bar: Mat::from_rows(t_rows)?,
        b_bar,
        delta: delta.clone(),
    };
    debug_assert!(rs.t_bar.max_abs_entry() <= *delta);
    Ok(rs)
}

/// Whole-pipeline convenience: stack `[A | T]`, take `k = rank`, select
/// max-volume rows, round.  `f` must already be normalized (its `T` is
/// checked against Δ).
pub fn build_rounded_system(
    h: &LinearSystemH<Rat>,
    f: &NonnegFactorization<Rat>,
    delta: &Rat,
) -> Result<RoundedSystem, Error> {
    if f.t().rows() != h.m() {
        return Err(Error::InvalidSize("factorization rows differ from facets".into()));
    }
    let stacked = stack_rows(h.a(), f.t())?;
    let k = rational_rank(&stacked);
    let idx = select_max_volume_rows(&stacked, k)?;
    round_system(h.a(), f.t(), h.b(), &idx, delta)
}

/// Exact box-LP membership: is there `y ∈ [0, Δ]^r` with
/// `‖Āx + T̄y − b̄‖∞ ≤ ε`?
pub fn membership_test(rs: &RoundedSystem, x: &[i64]) -> Result<bool, Error> {
    if x.len() != rs.d() {
        return Err(Error::InvalidSize(format!(
            "point has dimension {}, system expects {}",
            x.len(),
            rs.d()
        )));
    }
    let eps = rs.epsilon();
    let xr: Vec<Rat> = x.iter().map(|&v| Rat::from_int(v)).collect();

    let mut lp_rows: Vec<Vec<Rat>> = Vec::new();
    let mut rel = Vec::new();
    let mut rhs = Vec::new();
    for i in 0..rs.a_bar.rows() {
        // c_i = b̄_i − Ā_i·x; the row constrains T̄_i·y to [c_i − ε, c_i + ε].
        let c = rs.b_bar[i].clone() - dot(rs.a_bar.row(i), &xr);
        let trow = rs.t_bar.row(i);
        if trow.iter().all(|v| v.is_zero()) {
            if c.abs() > eps {
                return Ok(false);
            }
            continue; // satisfied for every y; padded rows land here
        }
        lp_rows.push(trow.to_vec());
        rel.push(Relation::Le);
        rhs.push(c.clone() + eps.clone());
        lp_rows.push(trow.to_vec());
        rel.push(Relation::Ge);
        rhs.push(c - eps.clone());
    }
    if lp_rows.is_empty() {
        return Ok(true);
    }
    let r = rs.r();
    let p = LpProblem::feasibility(
        Mat::from_rows(lp_rows)?,
        rel,
        rhs,
        vec![Some(Rat::zero()); r],
        vec![Some(rs.delta.clone()); r],
    )?;
    match solve(&p)? {
        LpOutcome::Optimal { .. } => Ok(true),
        LpOutcome::Infeasible => Ok(false),
        LpOutcome::Unbounded => unreachable!("feasibility over a box cannot be unbounded"),
    }
}

#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub points_checked: u64,
    /// Lattice points where the rounded system and the exact H-system
    /// disagree, sorted lexicographically.
    pub disagreements: Vec<[i64; 2]>,
    pub pass: bool,
}

/// Exhaustively compares [`membership_test`] against exact `P ∩ Z²`
/// membership over the bounding box of `p`: pass iff zero disagreements,
/// i.e. the rounded system recovers the lattice points of `P` exactly.
pub fn verify_recovery(rs: &RoundedSystem, p: &PolygonV<Rat>) -> Result<RecoveryReport, Error> {
    if rs.d() != 2 {
        return Err(Error::InvalidInput("recovery enumeration is 2-d only".into()));
    }
    let h = polygon_to_hrep(p)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for v in p.vertices() {
        for (coord, bucket) in [(v.x(), &mut xs), (v.y(), &mut ys)] {
            if !coord.is_integer() {
                return Err(Error::InvalidInput("polygon vertices must be integral".into()));
            }
            bucket.push(coord.to_integer().to_i64().ok_or_else(|| {
                Error::TooLarge("vertex coordinate exceeds i64".into())
            })?);
        }
    }
    let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let total = (x1 - x0 + 1) as u128 * (y1 - y0 + 1) as u128;
    if total > ENUM_CAP {
        return Err(Error::TooLarge(format!(
            "bounding box has {total} lattice points (cap {ENUM_CAP})"
        )));
    }

    let points: Vec<[i64; 2]> = (x0..=x1)
        .flat_map(|x| (y0..=y1).map(move |y| [x, y]))
        .collect();
    let disagreements: Vec<[i64; 2]> = points
        .par_iter()
        .map(|&[x, y]| -> Result<Option<[i64; 2]>, Error> {
            let pt = point2(Rat::from_int(x), Rat::from_int(y));
            let in_p = (0..h.m()).all(|i| !h.slack_at(i, &pt).is_negative());
            let in_x = membership_test(rs, &[x, y])?;
            Ok(if in_p != in_x { Some([x, y]) } else { None })
        })
        .collect::<Result<Vec<_>, Error>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(RecoveryReport {
        points_checked: points.len() as u64,
        pass: disagreements.is_empty(),
        disagreements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{make_grid_parabola_polygon, GridSelector};
    use crate::slack::normalize_pair;

    fn ri(v: i64) -> Rat {
        Rat::from_int(v)
    }

    #[test]
    fn delta_values() {
        assert_eq!(compute_delta(2, 2).unwrap(), ri(36));
        assert_eq!(compute_delta(3, 2).unwrap(), ri(512));
        assert_eq!(parabola_delta(3).unwrap(), ri(144 * 81));
        assert_eq!(parabola_delta(8).unwrap(), ri(144 * 4096));
        assert!(compute_delta(1, 5).is_err());
        assert!(compute_delta(2, 1).is_err());
    }

    #[test]
    fn grid_rounding_rule() {
        let step = Rat::ratio(1, 8);
        // Fixpoint on the grid.
        assert_eq!(round_to_grid(&Rat::ratio(3, 8), &step), Rat::ratio(3, 8));
        // Generic nearest.
        assert_eq!(round_to_grid(&Rat::ratio(2, 7), &step), Rat::ratio(2, 8));
        // Exact tie rounds toward zero.
        assert_eq!(round_to_grid(&Rat::ratio(3, 16), &step), Rat::ratio(1, 8));
        // Error never exceeds half a step.
        for num in 0..40i64 {
            let x = Rat::ratio(num, 13);
            let err = (round_to_grid(&x, &step) - x).abs();
            assert!(err <= Rat::ratio(1, 16));
        }
    }

    #[test]
    fn volume_selection_prefers_long_orthogonal_rows() {
        let m = Mat::from_rows(vec![
            vec![ri(3), ri(0), ri(0)],
            vec![ri(0), ri(2), ri(0)],
            vec![ri(0), ri(0), ri(1)],
        ])
        .unwrap();
        assert_eq!(select_max_volume_rows(&m, 2).unwrap(), vec![0, 1]);
        // Duplicate rows are never co-selected (their volume is zero).
        let m = Mat::from_rows(vec![
            vec![ri(5), ri(0)],
            vec![ri(5), ri(0)],
            vec![ri(0), ri(1)],
        ])
        .unwrap();
        assert_eq!(select_max_volume_rows(&m, 2).unwrap(), vec![0, 2]);
        // Rank-deficient request fails.
        assert!(matches!(select_max_volume_rows(&m, 3), Err(Error::DegenerateInput(_))));
    }

    fn parabola_pipeline(n: usize) -> (PolygonV<Rat>, LinearSystemH<Rat>, NonnegFactorization<Rat>, Rat) {
        let subset: Vec<u64> = (1..=n as u64).collect();
        let p = make_grid_parabola_polygon(n, &GridSelector::Subset(subset)).unwrap();
        let h = polygon_to_hrep(&p).unwrap();
        let s = slack_matrix(&h, p.vertices()).unwrap();
        let f = normalize_pair(&NonnegFactorization::trivial_from_slack(&s)).unwrap();
        let delta = parabola_delta(n).unwrap();
        (p, h, f, delta)
    }

    #[test]
    fn exhaustive_and_greedy_selection_agree_on_parabola_rows() {
        let (_, h, f, _) = parabola_pipeline(4);
        let stacked = stack_rows(h.a(), f.t()).unwrap();
        let k = rational_rank(&stacked);
        assert_eq!(k, 3);
        let ex = select_rows_exhaustive(&stacked, k).unwrap();
        let gr = select_rows_greedy(&stacked, k).unwrap();
        assert_eq!(
            gram_volume_sq(&stacked, &ex),
            gram_volume_sq(&stacked, &gr),
            "greedy landed on a smaller volume"
        );
    }

    #[test]
    fn cramer_coefficients_stay_in_the_unit_box() {
        let (_, h, f, _) = parabola_pipeline(4);
        let stacked = stack_rows(h.a(), f.t()).unwrap();
        let idx = select_max_volume_rows(&stacked, 3).unwrap();
        for ell in 0..stacked.rows() {
            if idx.contains(&ell) {
                continue;
            }
            let lambda = expansion_coefficients(&stacked, &idx, ell)
                .expect("every row lies in the span of a max-volume selection");
            for l in &lambda {
                assert!(l.abs() <= Rat::one(), "lambda {} escapes [-1,1]", l);
            }
            // And the right-hand sides combine consistently.
            let combo: Rat = idx
                .iter()
                .zip(&lambda)
                .map(|(&i, l)| l.clone() * h.b()[i].clone())
                .fold(Rat::zero(), |a, v| a + v);
            assert_eq!(combo, h.b()[ell]);
        }
    }

    #[test]
    fn coefficient_bounds_accept_the_parabola_and_reject_scaled_systems() {
        let (p, h, _, delta) = parabola_pipeline(3);
        assert!(check_coefficient_bounds(&h, p.vertices(), &delta));
        // Scaling A and b by delta² bursts the bound.
        let factor = delta.clone() * delta.clone();
        let a = h.a().map(|v| v.clone() * factor.clone());
        let b: Vec<Rat> = h.b().iter().map(|v| v.clone() * factor.clone()).collect();
        let scaled = LinearSystemH::new(a, b).unwrap();
        assert!(!check_coefficient_bounds(&scaled, p.vertices(), &delta));
    }

    #[test]
    fn rounded_system_shape_and_invariants() {
        let (_, h, f, delta) = parabola_pipeline(4);
        let rs = build_rounded_system(&h, &f, &delta).unwrap();
        let (d, r) = (rs.d(), rs.r());
        assert_eq!((d, r), (2, 4));
        assert_eq!(rs.a_bar().rows(), d + r);
        assert_eq!(rs.t_bar().rows(), d + r);
        assert_eq!(rs.b_bar().len(), d + r);
        assert!(rs.t_bar().max_abs_entry() <= delta);
        let step = rs.grid_step();
        for v in rs.t_bar().data() {
            assert!((v.clone() / step.clone()).is_integer());
            assert!(!v.is_negative());
        }
        assert_eq!(rs.epsilon(), Rat::ratio(1, 24));
    }

    #[test]
    fn membership_on_vertices_interior_and_outside_points() {
        let (p, h, f, delta) = parabola_pipeline(3);
        let rs = build_rounded_system(&h, &f, &delta).unwrap();
        // Vertices are members.
        for v in p.vertices() {
            let x = [
                v.x().to_integer().to_i64().unwrap(),
                v.y().to_integer().to_i64().unwrap(),
            ];
            assert!(membership_test(&rs, &x).unwrap(), "vertex {x:?}");
        }
        // The one non-vertex lattice point of conv{(1,1),(2,4),(3,9)}:
        // at x = 2 the triangle spans 4 <= y <= 5.
        assert!(membership_test(&rs, &[2, 5]).unwrap());
        // Points outside (below the lower chords / past the closing edge).
        assert!(!membership_test(&rs, &[2, 3]).unwrap());
        assert!(!membership_test(&rs, &[3, 1]).unwrap());
        assert!(!membership_test(&rs, &[0, 0]).unwrap());
    }

    #[test]
    fn recovery_is_exact_on_the_small_parabola() {
        let (p, _, f, delta) = parabola_pipeline(3);
        let h = polygon_to_hrep(&p).unwrap();
        let rs = build_rounded_system(&h, &f, &delta).unwrap();
        let report = verify_recovery(&rs, &p).unwrap();
        assert_eq!(report.points_checked, 27); // [1,3] × [1,9]
        assert!(report.pass, "disagreements: {:?}", report.disagreements);
    }

    #[test]
    fn recovery_is_exact_on_the_unit_square() {
        let p = PolygonV::new(vec![
            point2(ri(0), ri(0)),
            point2(ri(1), ri(0)),
            point2(ri(1), ri(1)),
            point2(ri(0), ri(1)),
        ])
        .unwrap();
        let h = polygon_to_hrep(&p).unwrap();
        let s = slack_matrix(&h, p.vertices()).unwrap();
        let f = normalize_pair(&NonnegFactorization::trivial_from_slack(&s)).unwrap();
        let delta = compute_delta(2, 2).unwrap();
        assert!(check_coefficient_bounds(&h, p.vertices(), &delta));
        let rs = build_rounded_system(&h, &f, &delta).unwrap();
        let report = verify_recovery(&rs, &p).unwrap();
        assert_eq!(report.points_checked, 4);
        assert!(report.pass);
    }

    #[test]
    fn corrupted_rhs_breaks_recovery() {
        // Tightening facet 0 (edge (1,1)-(2,4): 3x - y <= 2 becomes <= 1)
        // cuts off the vertex (1,1), a lattice point of the box, so the
        // rounded system must disagree with exact membership there.  (A +1
        // relaxation would only add area below y = 1, outside the box, and
        // recovery would rightly still pass.)
        let (p, h, f, delta) = parabola_pipeline(3);
        let mut b = h.b().to_vec();
        b[0] = b[0].clone() - Rat::one();
        let h_bad = LinearSystemH::new(h.a().clone(), b).unwrap();
        let rs = build_rounded_system(&h_bad, &f, &delta).unwrap();
        let report = verify_recovery(&rs, &p).unwrap();
        assert!(!report.pass);
        assert!(report.disagreements.contains(&[1, 1]));
    }
}
