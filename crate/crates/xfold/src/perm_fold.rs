//! Exact nonnegative factorization of the permutahedron's slack matrix via a
//! sorting network.
//!
//! Sorting a point with comparators is a folding sequence: comparator
//! `(j, k)` conditionally reflects across the hyperplane `x_j = x_k`, and
//! after the whole network every vertex lands on `(1, 2, ..., n)` and every
//! facet indicator on a sorted (suffix) indicator of the same cardinality —
//! the facet it folds to contains the terminal vertex, so the terminal slack
//! is zero.  Each comparator step changes the slack `g(|S|) - a . v` by
//! `|a_j - a_k| * |v_j - v_k|` exactly when facet and vertex sit strictly on
//! opposite sides of the hyperplane, which is the 2-slot entry rule of the
//! factors.  All arithmetic is integer-exact.

use crate::error::Error;
use crate::mat::Mat;
use crate::network::{batcher_network, ComparatorNetwork};
use crate::permutahedron::{permutahedron_vertices, Permutahedron};
use crate::scalar::{Rat, Scalar};
use crate::slack::{NonnegFactorization, SlackMatrix};

/// Folds one integer point through the network, emitting the `2 * size`
/// slot entries.  `first_slot_on_swap` selects the facet rule (swapped →
/// slot `2i`) or, when false, the mirrored vertex rule (swapped → slot
/// `2i + 1`).
fn fold_entries(x: &mut [i64], net: &ComparatorNetwork, first_slot_on_swap: bool) -> Vec<i64> {
    let mut out = vec![0i64; 2 * net.size()];
    for (i, &(j, k)) in net.comparators().iter().enumerate() {
        let gap = (x[j - 1] - x[k - 1]).abs();
        let swapped = x[j - 1] > x[k - 1];
        if swapped {
            x.swap(j - 1, k - 1);
        }
        let slot = if swapped == first_slot_on_swap { 2 * i } else { 2 * i + 1 };
        out[slot] = gap;
    }
    out
}

fn is_sorted_ascending(x: &[i64]) -> bool {
    x.windows(2).all(|w| w[0] <= w[1])
}

/// Builds the `(2^n - 2) x n!` slack matrix of the `n`-permutahedron and its
/// exact integer nonnegative factorization of rank twice the sorting-network
/// size.  Facet rows follow the size-then-lex subset order, vertex columns
/// the lexicographic permutation order.
pub fn build_permutahedron_factorization(
    n: usize,
) -> Result<(SlackMatrix<Rat>, NonnegFactorization<Rat>), Error> {
    let poly = Permutahedron::new(n)?;
    let net = batcher_network(n)?;
    let r = 2 * net.size();
    let subsets = poly.facet_subsets();
    let m = subsets.len();

    // Facet side: fold each subset's 0/1 indicator.  The right-hand side
    // g(|S|) rides along unchanged — a swap maps the subset to another of
    // the same size, which the indicator's preserved coordinate sum attests.
    let mut t = Mat::zeros(m, r);
    let mut indicators = Vec::with_capacity(m);
    for (row, sub) in subsets.iter().enumerate() {
        let mut a = vec![0i64; n];
        for &j in sub {
            a[j - 1] = 1;
        }
        let entries = fold_entries(&mut a, &net, true);
        debug_assert_eq!(a.iter().sum::<i64>(), sub.len() as i64);
        // Terminal facet: the suffix indicator of the same cardinality.
        let s = sub.len();
        let terminal_ok =
            a.iter().take(n - s).all(|&c| c == 0) && a.iter().skip(n - s).all(|&c| c == 1);
        if !terminal_ok {
            return Err(Error::FoldingDivergence(format!(
                "facet {sub:?} folded to {a:?}, not the suffix indicator"
            )));
        }
        for (l, e) in entries.into_iter().enumerate() {
            t[(row, l)] = Rat::from_int(e);
        }
        let mut ind = vec![0i64; n];
        for &j in sub {
            ind[j - 1] = 1;
        }
        indicators.push(ind);
    }

    // Vertex side: fold each permutation; the network must sort it.
    let verts: Vec<Vec<i64>> = permutahedron_vertices(&poly)?
        .map(|p| {
            p.coords()
                .iter()
                .map(|c| {
                    debug_assert!(c.is_integer());
                    i64::try_from(c.to_integer()).expect("coordinates fit i64")
                })
                .collect()
        })
        .collect();
    let nv = verts.len();
    let mut u = Mat::zeros(r, nv);
    for (col, v) in verts.iter().enumerate() {
        let mut x = v.clone();
        let entries = fold_entries(&mut x, &net, false);
        if !is_sorted_ascending(&x) {
            return Err(Error::FoldingDivergence(format!(
                "vertex {v:?} folded to {x:?}, not to (1..{n})"
            )));
        }
        for (l, e) in entries.into_iter().enumerate() {
            u[(l, col)] = Rat::from_int(e);
        }
    }

    // Slack matrix, directly from the definition: g(|S|) - sum_{j in S} v_j.
    let mut s = Mat::zeros(m, nv);
    for (i, ind) in indicators.iter().enumerate() {
        let g = poly.g(subsets[i].len()) as i64;
        for (j, v) in verts.iter().enumerate() {
            let dot: i64 = ind.iter().zip(v).map(|(a, b)| a * b).sum();
            let slack = g - dot;
            debug_assert!(slack >= 0);
            if slack != 0 {
                s[(i, j)] = Rat::from_int(slack);
            }
        }
    }

    let s = SlackMatrix::from_mat(s)?;
    let f = NonnegFactorization::new(t, u)?;
    Ok((s, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutahedron::permutahedron_hrep;
    use crate::slack::{slack_matrix, verify_factorization};
    use num::{Signed, Zero};

    #[test]
    fn three_permutahedron_factorizes_exactly() {
        let (s, f) = build_permutahedron_factorization(3).unwrap();
        assert_eq!((s.m(), s.n()), (6, 6));
        assert_eq!(f.r(), 6); // 2 * 3 comparators
        let rep = verify_factorization(&s, &f, 0.0);
        assert!(rep.pass);
        assert!(rep.max_residual.is_zero());
        assert!(s.tightness_ok());
    }

    #[test]
    fn four_permutahedron_factorizes_exactly() {
        let (s, f) = build_permutahedron_factorization(4).unwrap();
        assert_eq!((s.m(), s.n()), (14, 24));
        assert_eq!(f.r(), 10); // 2 * 5 comparators
        let rep = verify_factorization(&s, &f, 0.0);
        assert!(rep.pass);
        assert!(rep.max_residual.is_zero());
    }

    #[test]
    fn slack_matrix_matches_hrep_evaluation() {
        // The folding builder computes slacks arithmetically; the polytope
        // route computes them from the H-representation.  They must agree
        // entry for entry.
        for n in [3usize, 4] {
            let (s, _) = build_permutahedron_factorization(n).unwrap();
            let k = Permutahedron::new(n).unwrap();
            let h = permutahedron_hrep(&k).unwrap();
            let verts: Vec<_> = permutahedron_vertices(&k).unwrap().collect();
            let s2 = slack_matrix(&h, &verts).unwrap();
            assert_eq!(s.mat(), s2.mat(), "n = {n}");
        }
    }

    #[test]
    fn terminal_vertex_has_zero_slack_on_terminal_facets() {
        // The identity permutation is the last lexicographic... first, in
        // fact: (1,2,...,n) is the first column.  Suffix-indicator facets
        // are tight there.
        let (s, _) = build_permutahedron_factorization(4).unwrap();
        let k = Permutahedron::new(4).unwrap();
        let subs = k.facet_subsets();
        for (i, sub) in subs.iter().enumerate() {
            let sz = sub.len();
            let is_suffix = *sub == ((4 - sz + 1)..=4).collect::<Vec<_>>();
            if is_suffix {
                assert!(s.mat()[(i, 0)].is_zero(), "suffix facet {sub:?}");
            }
        }
    }

    #[test]
    fn smax_is_floor_n_squared_over_four() {
        for (n, want) in [(3usize, 2i64), (4, 4), (5, 6)] {
            let (s, _) = build_permutahedron_factorization(n).unwrap();
            assert_eq!(s.smax(), Rat::from_int(want), "n = {n}");
        }
    }

    #[test]
    fn factor_entries_are_zero_or_gap_sized() {
        // T entries are |a_j - a_k| of 0/1 vectors: 0 or 1.  U entries are
        // coordinate gaps of permutations: 0..n-1.
        let (_, f) = build_permutahedron_factorization(4).unwrap();
        for e in f.t().data() {
            assert!(e.is_zero() || *e == Rat::from_int(1));
        }
        let three = Rat::from_int(3);
        assert!(f.u().data().iter().all(|e| !e.is_negative() && *e <= three));
    }

    #[test]
    fn cap_and_size_errors() {
        assert!(matches!(build_permutahedron_factorization(1), Err(Error::InvalidSize(_))));
        assert!(matches!(build_permutahedron_factorization(9), Err(Error::TooLarge(_))));
    }
}
