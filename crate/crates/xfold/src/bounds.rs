//! Lower bounds that can actually be computed and reported next to a
//! construction's rank: the face-counting bound (an extension with k facets
//! has at most 2^k faces to shadow P's with) and the linear rank of the
//! slack matrix, which never exceeds its nonnegative rank.

use num::bigint::BigInt;
use num::integer::lcm;
use num::Zero;

use crate::ceil_log2;
use crate::error::Error;
use crate::mat::Mat;
use crate::scalar::{Rat, Scalar, ScalarMode};
use crate::slack::SlackMatrix;
use crate::tol;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub face_count_bound: u32,
    pub linear_rank_bound: u32,
    pub construction_rank: Option<u32>,
    /// `construction_rank - max(bounds)`; negative would mean a bound is
    /// violated (never for valid constructions).
    pub gap: Option<i64>,
}

/// `⌈log₂ f⌉`: an extension of a polytope with `f` faces needs at least
/// this many facets.
pub fn face_count_lower_bound(face_count: u64) -> Result<u32, Error> {
    if face_count == 0 {
        return Err(Error::InvalidInput("face count must be at least 1".into()));
    }
    Ok(ceil_log2(face_count))
}

/// Exact rank over the rationals: rows are scaled integral, then reduced by
/// fraction-free (Bareiss) elimination with full pivoting.  Intermediate
/// entries are minors of the scaled matrix, so they stay bounded and the
/// divisions are exact.
pub fn rational_rank(m: &Mat<Rat>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            let scale = m
                .row(i)
                .iter()
                .fold(BigInt::from(1), |acc, v| lcm(acc, v.denom().clone()));
            m.row(i)
                .iter()
                .map(|v| v.numer() * (&scale / v.denom()))
                .collect()
        })
        .collect();

    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        // Any nonzero pivot works; the arithmetic is exact.
        let mut pivot = None;
        'search: for i in step..rows {
            for j in step..cols {
                if !a[i][j].is_zero() {
                    pivot = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pivot else {
            break;
        };
        a.swap(step, pi);
        if pj != step {
            for row in a.iter_mut() {
                row.swap(step, pj);
            }
        }
        let piv = a[step][step].clone();
        for i in step + 1..rows {
            for j in step + 1..cols {
                let num = &a[i][j] * &piv - &a[i][step] * &a[step][j];
                debug_assert!((&num % &prev).is_zero(), "Bareiss division must be exact");
                a[i][j] = num / &prev;
            }
            a[i][step] = BigInt::from(0);
        }
        prev = piv;
        rank += 1;
    }
    rank
}

/// Numerical rank: Gaussian elimination with full pivoting, keeping pivots
/// above `1e-9 · σ_max`.  σ_max is estimated by power iteration on `MᵀM`
/// from a deterministic start vector.
pub fn float_rank(m: &Mat<f64>) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    if rows == 0 || cols == 0 {
        return 0;
    }
    let sigma = sigma_max(m);
    if sigma == 0.0 {
        return 0;
    }
    let thr = tol::RANK_REL * sigma;

    let mut a: Vec<Vec<f64>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0f64);
        for i in step..rows {
            for j in step..cols {
                let v = a[i][j].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= thr {
            break;
        }
        let (pi, pj, _) = best;
        a.swap(step, pi);
        if pj != step {
            for row in a.iter_mut() {
                row.swap(step, pj);
            }
        }
        let piv = a[step][step];
        for i in step + 1..rows {
            let f = a[i][step] / piv;
            if f == 0.0 {
                continue;
            }
            for j in step..cols {
                a[i][j] -= f * a[step][j];
            }
        }
        rank += 1;
    }
    rank
}

/// Largest singular value via power iteration on `MᵀM`; deterministic and
/// accurate to far more digits than the rank threshold needs.
fn sigma_max(m: &Mat<f64>) -> f64 {
    let (rows, cols) = (m.rows(), m.cols());
    let mut v = vec![1.0f64; cols];
    let mut lambda = 0.0f64;
    for _ in 0..200 {
        // w = Mᵀ (M v)
        let mut mv = vec![0.0f64; rows];
        for i in 0..rows {
            let row = m.row(i);
            let mut acc = 0.0;
            for j in 0..cols {
                acc += row[j] * v[j];
            }
            mv[i] = acc;
        }
        let mut w = vec![0.0f64; cols];
        for i in 0..rows {
            let row = m.row(i);
            let c = mv[i];
            if c == 0.0 {
                continue;
            }
            for j in 0..cols {
                w[j] += row[j] * c;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let new_lambda = norm; // ‖MᵀM v‖ with ‖v‖ = 1 → σ_max² estimate
        for x in w.iter_mut() {
            *x /= norm;
        }
        v = w;
        if (new_lambda - lambda).abs() <= 1e-13 * new_lambda.max(1.0) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    lambda.sqrt()
}

/// Dispatches to the mode-appropriate rank routine.
pub fn linear_rank_lower_bound<S: Scalar>(s: &SlackMatrix<S>) -> usize {
    match S::MODE {
        ScalarMode::Rational => {
            // Render/parse is an exact round-trip for rationals.
            let m = s.mat().map(|v| Rat::parse(&v.render()).expect("rational round-trip"));
            rational_rank(&m)
        }
        ScalarMode::Float64 => {
            let m = s.mat().map(|v| v.to_f64());
            float_rank(&m)
        }
    }
}

/// Assembles the report; `gap` is how much headroom the construction has
/// over the best lower bound.
pub fn bounds_report<S: Scalar>(
    face_count: u64,
    s: &SlackMatrix<S>,
    construction_rank: Option<u32>,
) -> Result<BoundsReport, Error> {
    let face_count_bound = face_count_lower_bound(face_count)?;
    let linear_rank_bound = linear_rank_lower_bound(s) as u32;
    let gap = construction_rank
        .map(|r| i64::from(r) - i64::from(face_count_bound.max(linear_rank_bound)));
    Ok(BoundsReport { face_count_bound, linear_rank_bound, construction_rank, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{
        make_grid_parabola_polygon, make_regular_ngon, polygon_to_hrep, GridSelector,
    };
    use crate::scalar::ScalarMode;
    use crate::slack::slack_matrix;

    #[test]
    fn face_count_bound_values() {
        assert_eq!(face_count_lower_bound(18).unwrap(), 5); // 8-gon: 2n+2
        assert_eq!(face_count_lower_bound(32).unwrap(), 5); // 15-gon
        assert_eq!(face_count_lower_bound(1).unwrap(), 0);
        assert_eq!(face_count_lower_bound(2).unwrap(), 1);
        assert!(face_count_lower_bound(0).is_err());
        // Monotone.
        let mut prev = 0;
        for f in 1..500u64 {
            let b = face_count_lower_bound(f).unwrap();
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn exact_rank_of_small_matrices() {
        let ri = |v: i64| Rat::from_int(v);
        let m = Mat::from_rows(vec![
            vec![ri(1), ri(2), ri(3)],
            vec![ri(2), ri(4), ri(6)],
            vec![ri(0), ri(0), ri(5)],
        ])
        .unwrap();
        assert_eq!(rational_rank(&m), 2);
        assert_eq!(rational_rank(&Mat::<Rat>::zeros(3, 4)), 0);
        // Fractional entries: rank must ignore scaling.
        let m = Mat::from_rows(vec![
            vec![Rat::ratio(1, 3), Rat::ratio(1, 6)],
            vec![Rat::ratio(2, 5), Rat::ratio(1, 5)],
        ])
        .unwrap();
        assert_eq!(rational_rank(&m), 1);
    }

    #[test]
    fn square_slack_has_rank_three() {
        use crate::polygon::{point2, PolygonV};
        let ri = |v: i64| Rat::from_int(v);
        let p = PolygonV::new(vec![
            point2(ri(1), ri(1)),
            point2(ri(-1), ri(1)),
            point2(ri(-1), ri(-1)),
            point2(ri(1), ri(-1)),
        ])
        .unwrap();
        let h = polygon_to_hrep(&p).unwrap();
        let s = slack_matrix(&h, p.vertices()).unwrap();
        assert_eq!(linear_rank_lower_bound(&s), 3);
    }

    #[test]
    fn grid_polygon_slacks_have_rank_three_exactly() {
        for n in 3..=6usize {
            let subset: Vec<u64> = (1..=n as u64).collect();
            let p = make_grid_parabola_polygon(n, &GridSelector::Subset(subset)).unwrap();
            let h = polygon_to_hrep(&p).unwrap();
            let s = slack_matrix(&h, p.vertices()).unwrap();
            assert_eq!(linear_rank_lower_bound(&s), 3, "n = {n}");
        }
    }

    #[test]
    fn permutahedron_slack_rank_is_n() {
        use crate::perm_fold::build_permutahedron_factorization;
        for n in 2..=4usize {
            let (s, _) = build_permutahedron_factorization(n).unwrap();
            // Affine dimension n-1, plus one for the inhomogeneous part.
            assert_eq!(linear_rank_lower_bound(&s), n, "n = {n}");
        }
    }

    #[test]
    fn float_slack_rank_is_three_for_regular_polygons() {
        for n in [8usize, 16, 33] {
            let p = make_regular_ngon(n, ScalarMode::Float64).unwrap();
            let h = polygon_to_hrep(&p).unwrap();
            let s = slack_matrix(&h, p.vertices()).unwrap();
            assert_eq!(linear_rank_lower_bound(&s), 3, "n = {n}");
        }
    }

    #[test]
    fn float_rank_thresholds_noise_but_keeps_signal() {
        let m = Mat::from_rows(vec![
            vec![1.0, 0.0, 1e-15],
            vec![0.0, 1.0, 1e-15],
            vec![1.0, 1.0, 2e-15],
        ])
        .unwrap();
        assert_eq!(float_rank(&m), 2);
        assert_eq!(float_rank(&Mat::<f64>::zeros(2, 2)), 0);
    }

    #[test]
    fn report_carries_the_gap() {
        use crate::polygon_fold::build_polygon_factorization;
        let (s, f) = build_polygon_factorization(8).unwrap();
        let report = bounds_report(18, &s, Some(f.r() as u32)).unwrap();
        assert_eq!(report.face_count_bound, 5);
        assert_eq!(report.linear_rank_bound, 3);
        assert_eq!(report.construction_rank, Some(6));
        assert_eq!(report.gap, Some(1));
    }
}
