//! Slack matrices, nonnegative factorizations, normalization, and the
//! normalized-pair entry bound.
//!
//! For a polytope `{x : A x <= b}` with points `v_1..v_n`, the slack matrix
//! is `S_ij = b_i - A_i v_j`.  A nonnegative factorization `S = T U` with `r`
//! inner columns witnesses an extended formulation with `r` extra
//! inequalities, so everything downstream cares about three things: exact
//! nonnegativity, the residual `|S - TU|`, and the entry bound
//! `max{|T|, |U|} <= sqrt(|TU|)` that holds for normalized pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::mat::Mat;
use crate::polygon::{LinearSystemH, PointVec};
use crate::scalar::{Scalar, ScalarMode};
use crate::tol;

/// An entrywise-nonnegative matrix of facet/vertex slacks.
#[derive(Clone, Debug, PartialEq)]
pub struct SlackMatrix<S> {
    mat: Mat<S>,
}

impl<S: Scalar> SlackMatrix<S> {
    /// Wraps a matrix after checking exact entrywise nonnegativity (float
    /// roundoff handling belongs to [`slack_matrix`], which clamps).
    pub fn from_mat(mat: Mat<S>) -> Result<Self, Error> {
        for i in 0..mat.rows() {
            for j in 0..mat.cols() {
                if mat[(i, j)].is_negative() {
                    return Err(Error::NotContained(format!("negative slack at ({i}, {j})")));
                }
            }
        }
        Ok(SlackMatrix { mat })
    }

    pub fn m(&self) -> usize {
        self.mat.rows()
    }

    pub fn n(&self) -> usize {
        self.mat.cols()
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.mat
    }

    /// `|S|`: the largest entry (all entries are nonnegative).
    pub fn smax(&self) -> S {
        self.mat.max_abs_entry()
    }

    /// True when every row and every column contains a (near-)zero entry —
    /// facet tightness and vertex tightness for slack matrices of polytopes
    /// whose points are exactly the vertices.
    pub fn tightness_ok(&self) -> bool {
        let thr = match S::MODE {
            ScalarMode::Rational => S::zero(),
            ScalarMode::Float64 => self.smax() * S::ratio(1, 1_000_000_000),
        };
        let is_tight = |v: &S| v.cmp_total(&thr) != std::cmp::Ordering::Greater;
        let (m, n) = (self.m(), self.n());
        for i in 0..m {
            if !self.mat.row(i).iter().any(&is_tight) {
                return false;
            }
        }
        for j in 0..n {
            if !(0..m).any(|i| is_tight(&self.mat[(i, j)])) {
                return false;
            }
        }
        true
    }
}

/// `S_ij = b_i - A_i v_j` for every facet row of `h` and every point.
///
/// Rational mode demands exact nonnegativity.  Float mode clamps entries in
/// `[-1e-9 * |S|, 0)` to zero (roundoff) and rejects anything below that as a
/// genuine containment violation.
pub fn slack_matrix<S: Scalar>(
    h: &LinearSystemH<S>,
    points: &[PointVec<S>],
) -> Result<SlackMatrix<S>, Error> {
    let m = h.m();
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidSize("slack matrix needs at least one point".into()));
    }
    for (j, p) in points.iter().enumerate() {
        if p.dim() != h.d() {
            return Err(Error::InvalidSize(format!(
                "point {j} has dimension {}, H-system has {}",
                p.dim(),
                h.d()
            )));
        }
    }
    let mut mat = Mat::zeros(m, n);
    for i in 0..m {
        for (j, p) in points.iter().enumerate() {
            mat[(i, j)] = h.slack_at(i, p);
        }
    }
    match S::MODE {
        ScalarMode::Rational => SlackMatrix::from_mat(mat),
        ScalarMode::Float64 => {
            let scale = mat.max_abs_entry().to_f64();
            let floor = -tol::CLAMP_REL * scale;
            for i in 0..m {
                for j in 0..n {
                    let e = mat[(i, j)].to_f64();
                    if e < 0.0 {
                        if e < floor {
                            return Err(Error::NotContained(format!(
                                "slack {e:e} at ({i}, {j}) is below the roundoff floor {floor:e}"
                            )));
                        }
                        mat[(i, j)] = S::zero();
                    }
                }
            }
            Ok(SlackMatrix { mat })
        }
    }
}

/// A pair of entrywise-nonnegative factors `T` (m×r) and `U` (r×n).
///
/// A column of `T` may be identically zero (paired with anything in `U`):
/// folding constructions emit one column pair per reflection step whether or
/// not the step moved mass, because the advertised rank counts steps.  Such
/// dead pairs contribute nothing to the product; [`Self::drop_dead_pairs`]
/// removes them, and [`normalize_pair`] refuses them.
#[derive(Clone, Debug, PartialEq)]
pub struct NonnegFactorization<S> {
    t: Mat<S>,
    u: Mat<S>,
}

impl<S: Scalar> NonnegFactorization<S> {
    pub fn new(t: Mat<S>, u: Mat<S>) -> Result<Self, Error> {
        if t.cols() != u.rows() {
            return Err(Error::InvalidSize(format!(
                "factor shapes disagree: T is {}x{}, U is {}x{}",
                t.rows(),
                t.cols(),
                u.rows(),
                u.cols()
            )));
        }
        for (name, m) in [("T", &t), ("U", &u)] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    if m[(i, j)].is_negative() {
                        return Err(Error::InvalidInput(format!(
                            "negative {name} entry at ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(NonnegFactorization { t, u })
    }

    pub fn t(&self) -> &Mat<S> {
        &self.t
    }

    pub fn u(&self) -> &Mat<S> {
        &self.u
    }

    /// Factorization rank: the inner dimension.
    pub fn r(&self) -> usize {
        self.t.cols()
    }

    pub fn product(&self) -> Mat<S> {
        self.t.mul(&self.u)
    }

    /// Indices `l` whose `T` column or `U` row is identically zero.
    pub fn dead_pairs(&self) -> Vec<usize> {
        (0..self.r())
            .filter(|&l| {
                self.t.col_max_abs(l).is_zero() || self.u.row_max_abs(l).is_zero()
            })
            .collect()
    }

    /// Removes dead pairs; the product is unchanged.
    pub fn drop_dead_pairs(&self) -> NonnegFactorization<S> {
        let dead = self.dead_pairs();
        if dead.is_empty() {
            return self.clone();
        }
        let keep: Vec<usize> = (0..self.r()).filter(|l| !dead.contains(l)).collect();
        let mut t = Mat::zeros(self.t.rows(), keep.len());
        let mut u = Mat::zeros(keep.len(), self.u.cols());
        for (new_l, &l) in keep.iter().enumerate() {
            for i in 0..self.t.rows() {
                t[(i, new_l)] = self.t[(i, l)].clone();
            }
            for j in 0..self.u.cols() {
                u[(new_l, j)] = self.u[(l, j)].clone();
            }
        }
        NonnegFactorization { t, u }
    }

    /// The trivial rank-`n` factorization `S = S * I` of a slack matrix
    /// (one coordinate per vertex).
    pub fn trivial_from_slack(s: &SlackMatrix<S>) -> NonnegFactorization<S> {
        let n = s.n();
        let mut eye = Mat::zeros(n, n);
        for j in 0..n {
            eye[(j, j)] = S::one();
        }
        NonnegFactorization { t: s.mat().clone(), u: eye }
    }
}

/// Outcome of comparing `S` against `T U`.
#[derive(Clone, Debug)]
pub struct VerifyReport<S> {
    /// `max |S_ij - (TU)_ij|` over the checked entries.
    pub max_residual: S,
    /// Entry where the maximum was attained.
    pub argmax: (usize, usize),
    /// Largest checked `S` entry (the scale the tolerance is relative to).
    pub smax: S,
    pub entries_checked: u64,
    /// Both factors entrywise nonnegative.
    pub factors_nonneg: bool,
    /// Residual within `rel_tol * smax` (float) or exactly zero (rational),
    /// and the factors are nonnegative.
    pub pass: bool,
}

fn residual_pass<S: Scalar>(max_residual: &S, smax: &S, rel_tol: f64) -> bool {
    match S::MODE {
        ScalarMode::Rational => max_residual.is_zero(),
        ScalarMode::Float64 => max_residual.to_f64() <= rel_tol * smax.to_f64(),
    }
}

fn factors_nonneg<S: Scalar>(f: &NonnegFactorization<S>) -> bool {
    // Construction already rejects negatives; re-checked here so the report
    // stands on its own for deserialized factors.
    let ok = |m: &Mat<S>| m.data().iter().all(|v| !v.is_negative());
    ok(f.t()) && ok(f.u())
}

/// Full entrywise comparison of a materialized slack matrix against `T U`.
/// Rational mode requires exact equality (`rel_tol` ignored).
pub fn verify_factorization<S: Scalar>(
    s: &SlackMatrix<S>,
    f: &NonnegFactorization<S>,
    rel_tol: f64,
) -> VerifyReport<S> {
    assert_eq!(s.m(), f.t().rows(), "row counts disagree");
    assert_eq!(s.n(), f.u().cols(), "column counts disagree");
    let m = s.m();
    let n = s.n();
    let mut max_residual = S::zero();
    let mut argmax = (0, 0);
    for i in 0..m {
        let trow = f.t().row(i);
        for j in 0..n {
            let mut tu = S::zero();
            for l in 0..f.r() {
                if !trow[l].is_zero() {
                    tu = tu + trow[l].clone() * f.u()[(l, j)].clone();
                }
            }
            let res = (s.mat()[(i, j)].clone() - tu).abs();
            if res.cmp_total(&max_residual) == std::cmp::Ordering::Greater {
                max_residual = res;
                argmax = (i, j);
            }
        }
    }
    let smax = s.smax();
    let nonneg = factors_nonneg(f);
    let pass = nonneg && residual_pass(&max_residual, &smax, rel_tol);
    VerifyReport {
        max_residual,
        argmax,
        smax,
        entries_checked: (m as u64) * (n as u64),
        factors_nonneg: nonneg,
        pass,
    }
}

/// Entry sampling plan for [`verify_factorization_streaming`].
#[derive(Clone, Copy, Debug)]
pub enum VerifySampling {
    /// Every entry.
    Full,
    /// `count` entries at seeded-uniform positions (with replacement).
    Random { seed: u64, count: u64 },
}

/// Compares `T U` against slacks computed on the fly from the
/// H-representation and the points, never materializing `S`.  Columns are
/// scanned in parallel; the reported maximum is deterministic (ties broken by
/// lowest entry index).
pub fn verify_factorization_streaming<S: Scalar>(
    h: &LinearSystemH<S>,
    points: &[PointVec<S>],
    f: &NonnegFactorization<S>,
    rel_tol: f64,
    sampling: VerifySampling,
) -> VerifyReport<S> {
    assert_eq!(h.m(), f.t().rows(), "row counts disagree");
    assert_eq!(points.len(), f.u().cols(), "column counts disagree");
    let m = h.m();
    let n = points.len();

    // (residual, smax-so-far, argmax) per checked entry, max-reduced.
    #[derive(Clone)]
    struct Acc<S> {
        res: S,
        at: (usize, usize),
        smax: S,
        count: u64,
    }
    let entry_residual = |i: usize, j: usize| -> (S, S) {
        let slack = h.slack_at(i, &points[j]);
        let mut tu = S::zero();
        let trow = f.t().row(i);
        for l in 0..f.r() {
            if !trow[l].is_zero() {
                tu = tu + trow[l].clone() * f.u()[(l, j)].clone();
            }
        }
        ((slack.clone() - tu).abs(), slack.abs())
    };
    let zero_acc = || Acc { res: S::zero(), at: (0, 0), smax: S::zero(), count: 0 };
    let fold_entry = |mut a: Acc<S>, i: usize, j: usize| {
        let (res, s) = entry_residual(i, j);
        if res.cmp_total(&a.res) == std::cmp::Ordering::Greater {
            a.res = res;
            a.at = (i, j);
        }
        a.smax = a.smax.max_with(&s);
        a.count += 1;
        a
    };
    let merge = |a: Acc<S>, b: Acc<S>| -> Acc<S> {
        let mut out = match a.res.cmp_total(&b.res) {
            std::cmp::Ordering::Greater => a.clone(),
            std::cmp::Ordering::Less => b.clone(),
            std::cmp::Ordering::Equal => {
                if a.at <= b.at {
                    a.clone()
                } else {
                    b.clone()
                }
            }
        };
        out.smax = a.smax.max_with(&b.smax);
        out.count = a.count + b.count;
        out
    };

    let acc = match sampling {
        VerifySampling::Full => (0..n)
            .into_par_iter()
            .fold(zero_acc, |mut a, j| {
                for i in 0..m {
                    a = fold_entry(a, i, j);
                }
                a
            })
            .reduce(zero_acc, merge),
        VerifySampling::Random { seed, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs: Vec<(u32, u32)> = (0..count)
                .map(|_| (rng.gen_range(0..m as u32), rng.gen_range(0..n as u32)))
                .collect();
            pairs
                .par_chunks(8192)
                .fold(zero_acc, |mut a, chunk| {
                    for &(i, j) in chunk {
                        a = fold_entry(a, i as usize, j as usize);
                    }
                    a
                })
                .reduce(zero_acc, merge)
        }
    };

    let nonneg = factors_nonneg(f);
    let pass = nonneg && residual_pass(&acc.res, &acc.smax, rel_tol);
    VerifyReport {
        max_residual: acc.res,
        argmax: acc.at,
        smax: acc.smax,
        entries_checked: acc.count,
        factors_nonneg: nonneg,
        pass,
    }
}

/// Rescales each column/row pair so `|T^l| = |U_l|`.
///
/// The scale is the geometric mean of the two norms.  Float mode takes it
/// directly.  Rational mode uses the exact rational square root when
/// `|T^l| * |U_l|` is a perfect rational square, and otherwise a rational
/// approximation of the geometric mean accurate to 128 fractional bits —
/// the norms then agree to one part in 2^120, and the product `T U` is
/// preserved exactly in both cases because the two scalings are exact
/// reciprocals.
pub fn normalize_pair<S: Scalar>(f: &NonnegFactorization<S>) -> Result<NonnegFactorization<S>, Error> {
    let mut t = f.t().clone();
    let mut u = f.u().clone();
    for l in 0..f.r() {
        let nt = t.col_max_abs(l);
        let nu = u.row_max_abs(l);
        if nt.is_zero() {
            return Err(Error::DegenerateFactor(format!("column {l} of T is identically zero")));
        }
        if nu.is_zero() {
            return Err(Error::DegenerateFactor(format!("row {l} of U is identically zero")));
        }
        let lambda = (nu / nt.clone()).sqrt_near();
        debug_assert!(lambda.is_positive());
        t.scale_col(l, &lambda);
        u.scale_row(l, &(S::one() / lambda));
    }
    Ok(NonnegFactorization { t, u })
}

/// The normalized-pair entry bound: for a normalized nonnegative pair,
/// `max{|T|, |U|} <= sqrt(|TU|)`.
///
/// Float mode checks that literally, with `1e-9` relative slack, so the
/// result genuinely depends on normalization.  Rational mode checks the
/// scale-invariant square `|T^l| * |U_l| <= |TU|` for every `l` — exactly
/// the condition the literal bound reduces to once the pair is normalized,
/// but free of the irrational square root (a normalized pair's common norm
/// is the geometric mean of the two sides, which need not be rational).
pub fn check_factor_norm_bound<S: Scalar>(f: &NonnegFactorization<S>) -> bool {
    let smax = f.product().max_abs_entry();
    match S::MODE {
        ScalarMode::Rational => (0..f.r()).all(|l| {
            let prod = f.t().col_max_abs(l) * f.u().row_max_abs(l);
            prod.cmp_total(&smax) != std::cmp::Ordering::Greater
        }),
        ScalarMode::Float64 => {
            let tmax = f.t().max_abs_entry().to_f64();
            let umax = f.u().max_abs_entry().to_f64();
            let bound = smax.to_f64().sqrt() * (1.0 + tol::NORM_BOUND_REL);
            tmax.max(umax) <= bound
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{make_regular_ngon, point2, polygon_to_hrep, PolygonV};
    use crate::scalar::Rat;
    use num::Zero;

    fn rational_square() -> (LinearSystemH<Rat>, Vec<PointVec<Rat>>) {
        let verts = vec![
            point2(Rat::from_int(1), Rat::from_int(-1)),
            point2(Rat::from_int(1), Rat::from_int(1)),
            point2(Rat::from_int(-1), Rat::from_int(1)),
            point2(Rat::from_int(-1), Rat::from_int(-1)),
        ];
        let p = PolygonV::new(verts).unwrap();
        let h = polygon_to_hrep(&p).unwrap();
        let pts = p.vertices().to_vec();
        (h, pts)
    }

    #[test]
    fn square_slack_entries_are_zero_or_two() {
        let (h, pts) = rational_square();
        let s = slack_matrix(&h, &pts).unwrap();
        assert_eq!((s.m(), s.n()), (4, 4));
        assert_eq!(s.smax(), Rat::from_int(2));
        assert!(s.tightness_ok());
        for i in 0..4 {
            let zeros = (0..4).filter(|&j| s.mat()[(i, j)].is_zero()).count();
            let twos = (0..4)
                .filter(|&j| s.mat()[(i, j)] == Rat::from_int(2))
                .count();
            assert_eq!((zeros, twos), (2, 2));
        }
    }

    #[test]
    fn octagon_slack_max_is_two_at_opposite_vertex() {
        let p = make_regular_ngon(8, crate::scalar::ScalarMode::Float64).unwrap();
        let h = polygon_to_hrep(&p).unwrap();
        let s = slack_matrix(&h, &p.vertices().to_vec()).unwrap();
        // Max slack of a b=1 system is 1 - min_j A_i v_j; for facet 0 the
        // farthest vertex is antipodal to the edge midpoint and the slack is
        // exactly 2 up to roundoff.
        assert!((s.smax() - 2.0).abs() < 1e-12);
        assert!(s.tightness_ok());
    }

    #[test]
    fn containment_violations_are_rejected() {
        let (h, mut pts) = rational_square();
        pts.push(point2(Rat::from_int(3), Rat::from_int(0)));
        assert!(matches!(slack_matrix(&h, &pts), Err(Error::NotContained(_))));
    }

    #[test]
    fn trivial_factorization_verifies_exactly() {
        let (h, pts) = rational_square();
        let s = slack_matrix(&h, &pts).unwrap();
        let f = NonnegFactorization::trivial_from_slack(&s);
        assert_eq!(f.r(), 4);
        let rep = verify_factorization(&s, &f, 0.0);
        assert!(rep.pass);
        assert!(rep.max_residual.is_zero());
        assert_eq!(rep.entries_checked, 16);
    }

    #[test]
    fn perturbed_factor_fails_verification() {
        let (h, pts) = rational_square();
        let s = slack_matrix(&h, &pts).unwrap();
        let f = NonnegFactorization::trivial_from_slack(&s);
        let mut u = f.u().clone();
        u[(1, 2)] = u[(1, 2)].clone() + Rat::from_int(1);
        let bad = NonnegFactorization::new(f.t().clone(), u).unwrap();
        let rep = verify_factorization(&s, &bad, 0.0);
        assert!(!rep.pass);
        // T e_1 leaks into column 2: residual column = slack column 1, max 2.
        assert_eq!(rep.max_residual, Rat::from_int(2));
        assert_eq!(rep.argmax.1, 2);
    }

    #[test]
    fn streaming_full_matches_dense_verification() {
        let (h, pts) = rational_square();
        let s = slack_matrix(&h, &pts).unwrap();
        let f = NonnegFactorization::trivial_from_slack(&s);
        let rep = verify_factorization_streaming(&h, &pts, &f, 0.0, VerifySampling::Full);
        assert!(rep.pass);
        assert_eq!(rep.entries_checked, 16);
        assert_eq!(rep.smax, Rat::from_int(2));
        let rep2 = verify_factorization_streaming(
            &h,
            &pts,
            &f,
            0.0,
            VerifySampling::Random { seed: 11, count: 64 },
        );
        assert!(rep2.pass);
        assert_eq!(rep2.entries_checked, 64);
    }

    #[test]
    fn normalize_balances_norms_and_preserves_product() {
        // T column (2,0), U row (1/2, 1/2) -> column (1,0), row (1,1).
        let t = Mat::from_rows(vec![vec![Rat::from_int(2)], vec![Rat::from_int(0)]]).unwrap();
        let u = Mat::from_rows(vec![vec![Rat::ratio(1, 2), Rat::ratio(1, 2)]]).unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        let g = normalize_pair(&f).unwrap();
        assert_eq!(g.t()[(0, 0)], Rat::from_int(1));
        assert_eq!(g.t()[(1, 0)], Rat::from_int(0));
        assert_eq!(g.u()[(0, 0)], Rat::from_int(1));
        assert_eq!(g.u()[(0, 1)], Rat::from_int(1));
        assert_eq!(f.product(), g.product());
        // Idempotent.
        let g2 = normalize_pair(&g).unwrap();
        assert_eq!(g.t(), g2.t());
        assert_eq!(g.u(), g2.u());
    }

    #[test]
    fn normalize_with_irrational_geometric_mean_stays_exact_on_product() {
        // Norms 1 and 2: geometric mean sqrt(2) is irrational, so the scale
        // is the 128-bit rational approximation; the product must still be
        // exact and the norms nearly equal.
        let t = Mat::from_rows(vec![vec![Rat::from_int(1)]]).unwrap();
        let u = Mat::from_rows(vec![vec![Rat::from_int(2)]]).unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        let g = normalize_pair(&f).unwrap();
        assert_eq!(g.product(), f.product());
        let nt = g.t().col_max_abs(0).to_f64();
        let nu = g.u().row_max_abs(0).to_f64();
        assert!((nt - nu).abs() <= 1e-12 * nu);
        assert!((nt - 2f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn normalize_rejects_dead_pairs_and_drop_removes_them() {
        let t = Mat::from_rows(vec![vec![Rat::from_int(1), Rat::from_int(0)]]).unwrap();
        let u = Mat::from_rows(vec![
            vec![Rat::from_int(1)],
            vec![Rat::from_int(5)],
        ])
        .unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        assert_eq!(f.dead_pairs(), vec![1]);
        assert!(matches!(normalize_pair(&f), Err(Error::DegenerateFactor(_))));
        let g = f.drop_dead_pairs();
        assert_eq!(g.r(), 1);
        assert_eq!(g.product(), f.product());
        assert!(normalize_pair(&g).is_ok());
    }

    #[test]
    fn entry_bound_equality_case_and_unnormalized_failure() {
        // T=(2), U=(2), TU=(4): equality holds.
        let t = Mat::from_rows(vec![vec![2.0f64]]).unwrap();
        let u = Mat::from_rows(vec![vec![2.0f64]]).unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        assert!(check_factor_norm_bound(&f));
        // Unnormalized T=(4), U=(1): max entry 4 > sqrt(4) = 2.
        let t = Mat::from_rows(vec![vec![4.0f64]]).unwrap();
        let u = Mat::from_rows(vec![vec![1.0f64]]).unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        assert!(!check_factor_norm_bound(&f));
        let g = normalize_pair(&f).unwrap();
        assert!(check_factor_norm_bound(&g));
    }

    #[test]
    fn rational_entry_bound_accepts_tied_product_columns() {
        // Norm product equals the max product entry: no rational scaling can
        // push both sides under sqrt(2) literally, but the scale-invariant
        // form certifies the pair, before and after normalization.
        let t = Mat::from_rows(vec![vec![Rat::from_int(1)]]).unwrap();
        let u = Mat::from_rows(vec![vec![Rat::from_int(2)]]).unwrap();
        let f = NonnegFactorization::new(t, u).unwrap();
        assert!(check_factor_norm_bound(&f));
        let g = normalize_pair(&f).unwrap();
        assert!(check_factor_norm_bound(&g));
    }
}
