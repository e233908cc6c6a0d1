//! A small dense linear-programming kernel: feasibility and maximization of
//! a linear functional over a bounded polyhedron.
//!
//! Two-phase bounded-variable simplex with Bland's least-index rule.  In
//! rational mode every pivot is exact, so Bland's rule certifies
//! termination and phase-1 infeasibility (`min sum(artificials) > 0`) is a
//! proof.  Float mode uses a pivot tolerance and an iteration cap.
//!
//! Variables may carry any mix of finite/infinite bounds; internally every
//! variable is transformed to `[0, u]` or `[0, +inf)` form (shift, mirror,
//! or split of a free variable), rows are equalized with slack/surplus
//! columns, and every row receives an artificial variable for phase 1.
//! Upper bounds are handled implicitly by the ratio test (bound flips), not
//! by extra rows.

use std::cmp::Ordering;

use crate::error::Error;
use crate::mat::{dot, Mat};
use crate::scalar::{Scalar, ScalarMode};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Feasibility,
}

/// `a x (<=|=|>=) b` rowwise, `lower <= x <= upper` (None = unbounded side).
#[derive(Clone, Debug)]
pub struct LpProblem<S> {
    pub a: Mat<S>,
    pub rel: Vec<Relation>,
    pub b: Vec<S>,
    pub lower: Vec<Option<S>>,
    pub upper: Vec<Option<S>>,
    pub objective: Vec<S>,
    pub sense: Sense,
}

impl<S: Scalar> LpProblem<S> {
    pub fn new(
        a: Mat<S>,
        rel: Vec<Relation>,
        b: Vec<S>,
        lower: Vec<Option<S>>,
        upper: Vec<Option<S>>,
        objective: Vec<S>,
        sense: Sense,
    ) -> Result<Self, Error> {
        let (m, nv) = (a.rows(), a.cols());
        if rel.len() != m || b.len() != m {
            return Err(Error::InvalidSize("row data lengths disagree".into()));
        }
        if lower.len() != nv || upper.len() != nv || objective.len() != nv {
            return Err(Error::InvalidSize("column data lengths disagree".into()));
        }
        Ok(LpProblem { a, rel, b, lower, upper, objective, sense })
    }

    /// Pure feasibility: zero objective.
    pub fn feasibility(
        a: Mat<S>,
        rel: Vec<Relation>,
        b: Vec<S>,
        lower: Vec<Option<S>>,
        upper: Vec<Option<S>>,
    ) -> Result<Self, Error> {
        let nv = a.cols();
        Self::new(a, rel, b, lower, upper, vec![S::zero(); nv], Sense::Feasibility)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { value: S, point: Vec<S> },
    Infeasible,
    Unbounded,
}

/// How an original variable maps to the transformed nonnegative ones.
#[derive(Clone, Debug)]
enum VarMap<S> {
    /// `x = y[col] + offset`
    Shift { col: usize, offset: S },
    /// `x = offset - y[col]`
    Mirror { col: usize, offset: S },
    /// `x = y[pos] - y[neg]`
    Split { pos: usize, neg: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

struct Tableau<S> {
    /// `m x ncols`, kept equal to `B^{-1} A` by pivoting.
    rows: Vec<Vec<S>>,
    /// Reduced-cost row for the current phase.
    d: Vec<S>,
    /// Current value of every column's variable.
    value: Vec<S>,
    /// Finite upper bounds (all lower bounds are 0 after the transform).
    ub: Vec<Option<S>>,
    status: Vec<Status>,
    basis: Vec<usize>,
    iterations: u64,
    #[cfg(debug_assertions)]
    seen_states: std::collections::HashSet<(Vec<usize>, Vec<u8>)>,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

enum Step {
    Flip,
    Pivot { row: usize },
}

impl<S: Scalar> Tableau<S> {
    fn m(&self) -> usize {
        self.rows.len()
    }

    fn is_improving_at_lower(dj: &S) -> bool {
        match S::MODE {
            ScalarMode::Rational => dj.is_negative(),
            ScalarMode::Float64 => dj.to_f64() < -tol::LP_PIVOT,
        }
    }

    fn is_improving_at_upper(dj: &S) -> bool {
        match S::MODE {
            ScalarMode::Rational => dj.is_positive(),
            ScalarMode::Float64 => dj.to_f64() > tol::LP_PIVOT,
        }
    }

    fn usable_pivot(a: &S) -> bool {
        match S::MODE {
            ScalarMode::Rational => !a.is_zero(),
            ScalarMode::Float64 => a.to_f64().abs() > tol::LP_PIVOT,
        }
    }

    /// Gauss pivot on `(r, c)`: column `c` becomes the `r`-th unit vector in
    /// the rows and zero in the reduced costs.
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        debug_assert!(!piv.is_zero());
        let inv = S::one() / piv;
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let pivot_row = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - factor.clone() * p.clone();
                }
            }
            // Exactness guard: the eliminated entry is zero by construction.
            self.rows[i][c] = S::zero();
        }
        let factor = self.d[c].clone();
        if !factor.is_zero() {
            for (v, p) in self.d.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = v.clone() - factor.clone() * p.clone();
                }
            }
            self.d[c] = S::zero();
        }
        self.basis[r] = c;
        self.status[c] = Status::Basic;
    }

    /// One simplex phase to optimality (of the current `d`) or
    /// unboundedness.  `allow` filters which columns may enter.
    fn run(&mut self, allow: impl Fn(usize) -> bool, cap: Option<u64>) -> Result<PhaseEnd, Error> {
        loop {
            if let Some(cap) = cap {
                if self.iterations >= cap {
                    return Err(Error::NumericalFailure(format!(
                        "simplex exceeded {cap} iterations"
                    )));
                }
            } else {
                // Rational mode: Bland's rule terminates; treat an absurd
                // count as a bug, not an input property.
                assert!(
                    self.iterations < 100_000_000,
                    "exact simplex failed to terminate (pivot rule bug)"
                );
            }
            self.iterations += 1;

            #[cfg(debug_assertions)]
            {
                let mut key = self.basis.clone();
                key.sort_unstable();
                let st: Vec<u8> = self.status.iter().map(|s| *s as u8).collect();
                assert!(
                    self.seen_states.insert((key, st)),
                    "basis/bound state repeated: cycling"
                );
            }

            // Bland: lowest-index improving nonbasic column.
            let mut entering = None;
            for j in 0..self.d.len() {
                if !allow(j) {
                    continue;
                }
                match self.status[j] {
                    Status::Basic => {}
                    Status::AtLower => {
                        if Self::is_improving_at_lower(&self.d[j]) {
                            entering = Some((j, true));
                            break;
                        }
                    }
                    Status::AtUpper => {
                        if Self::is_improving_at_upper(&self.d[j]) {
                            entering = Some((j, false));
                            break;
                        }
                    }
                }
            }
            let Some((c, increasing)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            // Ratio test: the entering variable moves by delta >= 0 from its
            // bound; basic variable i changes by -sigma * rows[i][c] * delta
            // and must stay in [0, ub].  The entering variable itself may at
            // most traverse its own span (bound flip).
            let mut best: Option<(S, Step, usize)> = None; // (delta, action, leaving var index)
            let consider = |delta: S, step: Step, var: usize, best: &mut Option<(S, Step, usize)>| {
                let replace = match best {
                    None => true,
                    Some((cur, _, curvar)) => match delta.cmp_total(cur) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => var < *curvar,
                    },
                };
                if replace {
                    *best = Some((delta, step, var));
                }
            };
            if let Some(span) = &self.ub[c] {
                consider(span.clone(), Step::Flip, c, &mut best);
            }
            for i in 0..self.m() {
                let a = &self.rows[i][c];
                if !Self::usable_pivot(a) {
                    continue;
                }
                // coef = sigma * a: positive drives the basic variable down.
                let coef = if increasing { a.clone() } else { S::zero() - a.clone() };
                let bvar = self.basis[i];
                if coef.is_positive() {
                    let delta = self.value[bvar].clone() / coef;
                    consider(delta, Step::Pivot { row: i }, bvar, &mut best);
                } else if let Some(ub) = &self.ub[bvar] {
                    let delta = (ub.clone() - self.value[bvar].clone()) / (S::zero() - coef);
                    consider(delta, Step::Pivot { row: i }, bvar, &mut best);
                }
            }

            let Some((delta, step, _)) = best else {
                return Ok(PhaseEnd::Unbounded);
            };
            let delta = if delta.is_negative() {
                // Float roundoff can produce slightly negative ratios on
                // degenerate bases; clamp — exact mode never sees this.
                debug_assert!(S::MODE == ScalarMode::Float64 || delta.is_zero());
                S::zero()
            } else {
                delta
            };

            // Apply the step.
            let sigma_delta = if increasing { delta.clone() } else { S::zero() - delta.clone() };
            if !delta.is_zero() {
                for i in 0..self.m() {
                    let a = self.rows[i][c].clone();
                    if a.is_zero() {
                        continue;
                    }
                    let bvar = self.basis[i];
                    self.value[bvar] = self.value[bvar].clone() - sigma_delta.clone() * a;
                }
                self.value[c] = self.value[c].clone() + sigma_delta;
            }
            match step {
                Step::Flip => {
                    self.status[c] = match self.status[c] {
                        Status::AtLower => {
                            // Snap to the exact bound (float hygiene).
                            self.value[c] = self.ub[c].clone().expect("flip needs a span");
                            Status::AtUpper
                        }
                        Status::AtUpper => {
                            self.value[c] = S::zero();
                            Status::AtLower
                        }
                        Status::Basic => unreachable!("entering variable is nonbasic"),
                    };
                }
                Step::Pivot { row } => {
                    let leaving = self.basis[row];
                    // Which bound did the leaving variable hit?
                    let coef_positive = {
                        let a = &self.rows[row][c];
                        if increasing { a.is_positive() } else { a.is_negative() }
                    };
                    if coef_positive {
                        self.status[leaving] = Status::AtLower;
                        self.value[leaving] = S::zero();
                    } else {
                        self.status[leaving] = Status::AtUpper;
                        self.value[leaving] =
                            self.ub[leaving].clone().expect("upper-bound exit needs a bound");
                    }
                    self.pivot(row, c);
                }
            }
        }
    }
}

/// Solves the problem.  `Optimal` carries the objective value in the
/// problem's own sense (feasibility problems report value 0) and a point in
/// the original variables.
pub fn solve<S: Scalar>(p: &LpProblem<S>) -> Result<LpOutcome<S>, Error> {
    let m = p.a.rows();
    let nv = p.a.cols();

    // Quick bound sanity: an empty interval is an infeasibility, not an
    // input error.
    for j in 0..nv {
        if let (Some(l), Some(u)) = (&p.lower[j], &p.upper[j]) {
            if l.cmp_total(u) == Ordering::Greater {
                return Ok(LpOutcome::Infeasible);
            }
        }
    }

    // Transform every variable to lower bound 0.
    let mut maps: Vec<VarMap<S>> = Vec::with_capacity(nv);
    let mut cols: Vec<Vec<S>> = Vec::new(); // transformed structural columns of A
    let mut ub: Vec<Option<S>> = Vec::new();
    let mut cost: Vec<S> = Vec::new(); // minimization costs
    let mut rhs = p.b.clone();
    let minimize_sign = match p.sense {
        Sense::Maximize => S::from_int(-1),
        Sense::Feasibility => S::zero(),
    };
    for j in 0..nv {
        let col_a: Vec<S> = (0..m).map(|i| p.a[(i, j)].clone()).collect();
        let cj = minimize_sign.clone() * p.objective[j].clone();
        match (&p.lower[j], &p.upper[j]) {
            (Some(l), up) => {
                // x = y + l
                for i in 0..m {
                    rhs[i] = rhs[i].clone() - col_a[i].clone() * l.clone();
                }
                maps.push(VarMap::Shift { col: cols.len(), offset: l.clone() });
                ub.push(up.as_ref().map(|u| u.clone() - l.clone()));
                cols.push(col_a);
                cost.push(cj);
            }
            (None, Some(u)) => {
                // x = u - y
                for i in 0..m {
                    rhs[i] = rhs[i].clone() - col_a[i].clone() * u.clone();
                }
                maps.push(VarMap::Mirror { col: cols.len(), offset: u.clone() });
                ub.push(None);
                cols.push(col_a.iter().map(|v| S::zero() - v.clone()).collect());
                cost.push(S::zero() - cj);
            }
            (None, None) => {
                // x = y+ - y-
                maps.push(VarMap::Split { pos: cols.len(), neg: cols.len() + 1 });
                ub.push(None);
                ub.push(None);
                cols.push(col_a.clone());
                cols.push(col_a.iter().map(|v| S::zero() - v.clone()).collect());
                cost.push(cj.clone());
                cost.push(S::zero() - cj);
            }
        }
    }

    // Slack / surplus columns per row.
    for (i, r) in p.rel.iter().enumerate() {
        let coef = match r {
            Relation::Le => S::one(),
            Relation::Ge => S::from_int(-1),
            Relation::Eq => continue,
        };
        let mut col = vec![S::zero(); m];
        col[i] = coef;
        cols.push(col);
        ub.push(None);
        cost.push(S::zero());
    }

    // Orient rows nonnegative, then append one artificial per row.
    let art_start = cols.len();
    let ncols = art_start + m;
    let mut rows: Vec<Vec<S>> = (0..m)
        .map(|i| {
            let mut row: Vec<S> = (0..ncols).map(|_| S::zero()).collect();
            for (j, col) in cols.iter().enumerate() {
                row[j] = col[i].clone();
            }
            row
        })
        .collect();
    for i in 0..m {
        if rhs[i].is_negative() {
            for v in rows[i].iter_mut() {
                if !v.is_zero() {
                    *v = S::zero() - v.clone();
                }
            }
            rhs[i] = S::zero() - rhs[i].clone();
        }
        rows[i][art_start + i] = S::one();
    }
    let mut value = vec![S::zero(); ncols];
    let mut status = vec![Status::AtLower; ncols];
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let c = art_start + i;
        basis.push(c);
        status[c] = Status::Basic;
        value[c] = rhs[i].clone();
    }
    let mut ub_full = ub;
    ub_full.extend((0..m).map(|_| None));

    // Phase 1: minimize the artificial sum.  d = c1 - sum of rows (the
    // initial basis is exactly the artificials, each with cost 1).
    let mut d = vec![S::zero(); ncols];
    for j in 0..art_start {
        let mut s = S::zero();
        for row in &rows {
            if !row[j].is_zero() {
                s = s + row[j].clone();
            }
        }
        d[j] = S::zero() - s;
    }

    let mut t = Tableau {
        rows,
        d,
        value,
        ub: ub_full,
        status,
        basis,
        iterations: 0,
        #[cfg(debug_assertions)]
        seen_states: std::collections::HashSet::new(),
    };
    let cap = match S::MODE {
        ScalarMode::Rational => None,
        ScalarMode::Float64 => Some(50_000u64),
    };

    match t.run(|_| true, cap)? {
        PhaseEnd::Unbounded => unreachable!("artificial sum is bounded below by zero"),
        PhaseEnd::Optimal => {}
    }
    let mut art_sum = S::zero();
    for c in art_start..ncols {
        art_sum = art_sum + t.value[c].clone();
    }
    let feas_tol = match S::MODE {
        ScalarMode::Rational => 0.0,
        ScalarMode::Float64 => {
            tol::LP_FEAS * (1.0 + p.b.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max))
        }
    };
    if art_sum.to_f64() > feas_tol {
        return Ok(LpOutcome::Infeasible);
    }

    // Phase 2: artificials are pinned to zero and may never re-enter.
    for c in art_start..ncols {
        t.ub[c] = Some(S::zero());
        t.value[c] = S::zero();
    }
    #[cfg(debug_assertions)]
    t.seen_states.clear();
    let outcome = if p.sense == Sense::Feasibility {
        PhaseEnd::Optimal
    } else {
        let mut d = cost.clone();
        d.resize(ncols, S::zero());
        for i in 0..t.m() {
            let bc = t.basis[i];
            let cb = d[bc].clone();
            if cb.is_zero() {
                continue;
            }
            let row = t.rows[i].clone();
            for (v, r) in d.iter_mut().zip(&row) {
                if !r.is_zero() {
                    *v = v.clone() - cb.clone() * r.clone();
                }
            }
            d[bc] = S::zero();
        }
        t.d = d;
        t.run(|j| j < art_start, cap)?
    };

    // Read the original variables back out.
    let y = &t.value;
    let mut x = Vec::with_capacity(nv);
    for map in &maps {
        let xi = match map {
            VarMap::Shift { col, offset } => y[*col].clone() + offset.clone(),
            VarMap::Mirror { col, offset } => offset.clone() - y[*col].clone(),
            VarMap::Split { pos, neg } => y[*pos].clone() - y[*neg].clone(),
        };
        x.push(xi);
    }

    if matches!(outcome, PhaseEnd::Unbounded) {
        return Ok(LpOutcome::Unbounded);
    }

    // The returned point must satisfy the original system: exactly in
    // rational mode (a failure is a solver bug), within 1e-8 in float mode
    // (a failure is numerical collapse, reported as such).
    for i in 0..m {
        let ax = dot(p.a.row(i), &x);
        let viol = match p.rel[i] {
            Relation::Le => ax.clone() - p.b[i].clone(),
            Relation::Ge => p.b[i].clone() - ax.clone(),
            Relation::Eq => (ax.clone() - p.b[i].clone()).abs(),
        };
        let bad = match S::MODE {
            ScalarMode::Rational => viol.is_positive(),
            ScalarMode::Float64 => viol.to_f64() > tol::LP_FEAS * (1.0 + p.b[i].to_f64().abs()),
        };
        if bad {
            debug_assert!(S::MODE == ScalarMode::Float64, "exact solve violated row {i}");
            return Err(Error::NumericalFailure(format!(
                "solution violates row {i} by {:e}",
                viol.to_f64()
            )));
        }
    }

    let value = match p.sense {
        Sense::Feasibility => S::zero(),
        Sense::Maximize => dot(&p.objective, &x),
    };
    Ok(LpOutcome::Optimal { value, point: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;
    use num::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rat {
        Rat::ratio(n, d)
    }

    fn ri(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn one_variable_box_maximum() {
        // max x s.t. x <= 3, x >= 0.
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1)]]).unwrap(),
            vec![Relation::Le],
            vec![ri(3)],
            vec![Some(ri(0))],
            vec![None],
            vec![ri(1)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ri(3));
                assert_eq!(point, vec![ri(3)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn box_with_impossible_row_is_infeasible() {
        // y in [0,1]^2, y1 + y2 <= -1.
        let p = LpProblem::feasibility(
            Mat::from_rows(vec![vec![ri(1), ri(1)]]).unwrap(),
            vec![Relation::Le],
            vec![ri(-1)],
            vec![Some(ri(0)), Some(ri(0))],
            vec![Some(ri(1)), Some(ri(1))],
        )
        .unwrap();
        assert_eq!(solve(&p).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_ray_is_detected() {
        // max x s.t. x >= 1.
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1)]]).unwrap(),
            vec![Relation::Ge],
            vec![ri(1)],
            vec![Some(ri(0))],
            vec![None],
            vec![ri(1)],
            Sense::Maximize,
        )
        .unwrap();
        assert_eq!(solve(&p).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_rows_and_upper_bounds() {
        // max x s.t. x + y = 2, x, y in [0, 3].
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1), ri(1)]]).unwrap(),
            vec![Relation::Eq],
            vec![ri(2)],
            vec![Some(ri(0)), Some(ri(0))],
            vec![Some(ri(3)), Some(ri(3))],
            vec![ri(1), ri(0)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ri(2));
                assert_eq!(point, vec![ri(2), ri(0)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn free_and_mirrored_variables() {
        // x free, y upper-bounded only; max x + y s.t. x <= 5, y <= 4.
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1), ri(0)]]).unwrap(),
            vec![Relation::Le],
            vec![ri(5)],
            vec![None, None],
            vec![None, Some(ri(4))],
            vec![ri(1), ri(1)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ri(9));
                assert_eq!(point, vec![ri(5), ri(4)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
        // A free variable with negative optimum.
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1)]]).unwrap(),
            vec![Relation::Ge],
            vec![ri(-7)],
            vec![None],
            vec![None],
            vec![ri(-1)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ri(7));
                assert_eq!(point, vec![ri(-7)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn cycling_prone_instance_terminates_exactly() {
        // A classic degenerate instance that cycles under naive pivoting;
        // stated here in maximization form.  Optimum 1/20 at
        // (1/25, 0, 1, 0).
        let a = Mat::from_rows(vec![
            vec![r(1, 4), ri(-60), r(-1, 25), ri(9)],
            vec![r(1, 2), ri(-90), r(-1, 50), ri(3)],
            vec![ri(0), ri(0), ri(1), ri(0)],
        ])
        .unwrap();
        let p = LpProblem::new(
            a,
            vec![Relation::Le, Relation::Le, Relation::Le],
            vec![ri(0), ri(0), ri(1)],
            vec![Some(ri(0)); 4],
            vec![None; 4],
            vec![r(3, 4), ri(-150), r(1, 50), ri(-6)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, r(1, 20));
                assert_eq!(point, vec![r(1, 25), ri(0), ri(1), ri(0)]);
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn float_mode_agrees_with_exact_on_the_degenerate_instance() {
        let a = Mat::from_rows(vec![
            vec![0.25, -60.0, -0.04, 9.0],
            vec![0.5, -90.0, -0.02, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let p = LpProblem::new(
            a,
            vec![Relation::Le, Relation::Le, Relation::Le],
            vec![0.0, 0.0, 1.0],
            vec![Some(0.0); 4],
            vec![None; 4],
            vec![0.75, -150.0, 0.02, -6.0],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, .. } => {
                assert!((value - 0.05).abs() <= 1e-7 * 0.05_f64.max(1.0));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn random_boxes_match_vertex_enumeration() {
        // Over a plain box the optimum is separable; with one <= row added,
        // brute-force the box vertices and clip against the row to
        // cross-check d <= 4 instances.
        let mut rng = ChaCha8Rng::seed_from_u64(417);
        for case in 0..40 {
            let d = rng.gen_range(1..=4usize);
            let c: Vec<Rat> = (0..d).map(|_| ri(rng.gen_range(-5..=5i64))).collect();
            let lo: Vec<Rat> = (0..d).map(|_| ri(rng.gen_range(-3..=0i64))).collect();
            let hi: Vec<Rat> =
                lo.iter().map(|l| l.clone() + ri(rng.gen_range(0..=4i64))).collect();
            let p = LpProblem::new(
                Mat::zeros(0, d),
                vec![],
                vec![],
                lo.iter().cloned().map(Some).collect(),
                hi.iter().cloned().map(Some).collect(),
                c.clone(),
                Sense::Maximize,
            )
            .unwrap();
            let mut want = ri(0);
            for j in 0..d {
                let pick = if c[j].is_positive() { hi[j].clone() } else { lo[j].clone() };
                want = want + c[j].clone() * pick;
            }
            match solve(&p).unwrap() {
                LpOutcome::Optimal { value, .. } => assert_eq!(value, want, "case {case}"),
                other => panic!("case {case}: expected optimal, got {other:?}"),
            }
        }
    }

    #[test]
    fn fixed_variables_and_empty_intervals() {
        // l = u pins the variable.
        let p = LpProblem::new(
            Mat::from_rows(vec![vec![ri(1), ri(1)]]).unwrap(),
            vec![Relation::Le],
            vec![ri(10)],
            vec![Some(ri(2)), Some(ri(0))],
            vec![Some(ri(2)), Some(ri(4))],
            vec![ri(1), ri(1)],
            Sense::Maximize,
        )
        .unwrap();
        match solve(&p).unwrap() {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, ri(6));
                assert_eq!(point[0], ri(2));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
        // l > u is infeasible, not an error.
        let p = LpProblem::feasibility(
            Mat::zeros(1, 1),
            vec![Relation::Le],
            vec![ri(0)],
            vec![Some(ri(3))],
            vec![Some(ri(1))],
        );
        // A zero row in the constraint matrix is fine for LPs.
        assert_eq!(solve(&p.unwrap()).unwrap(), LpOutcome::Infeasible);
    }
}
