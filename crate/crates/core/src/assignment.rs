//! Max-weight station/RU assignment.
//!
//! Stations and RUs may stay unmatched, so the problem is padded to a square
//! `max(K, N)` matrix with zero-weight dummies and negative weights are
//! floored at zero. The padded instance is solved as a min-cost perfect
//! matching with the O(n^3) Hungarian method (row-by-row augmentation with
//! dual potentials). Pairs whose weight is not strictly positive are dropped
//! from the returned schedule; they contribute nothing to the objective.

use crate::domain::{Matrix, ScheduleMatrix};
use crate::error::{Error, Result};

pub type WeightMatrix = Matrix<f64>;

/// Largest `max(K, N)` accepted by [`brute_force_assignment`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub schedule: ScheduleMatrix,
    /// `sum s[k][n] * w[k][n]` over the returned schedule.
    pub value: f64,
}

fn check(w: &WeightMatrix) -> Result<()> {
    if w.rows() == 0 || w.cols() == 0 {
        return Err(Error::Input("empty weight matrix".into()));
    }
    if let Some(pos) = w.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::Input(format!(
            "non-finite weight at ({}, {})",
            pos / w.cols(),
            pos % w.cols()
        )));
    }
    Ok(())
}

/// Solves `max sum s[k][n] w[k][n]` over partial one-to-one assignments.
pub fn max_weight_assignment(w: &WeightMatrix) -> Result<Assignment> {
    check(w)?;
    let (k, n) = w.dims();
    let size = k.max(n);

    // 1-based cost matrix with row/column 0 unused.
    let cost = |i: usize, j: usize| -> f64 {
        if i <= k && j <= n {
            -w.at(i - 1, j - 1).max(0.0)
        } else {
            0.0
        }
    };

    let mut u = vec![0.0f64; size + 1];
    let mut v = vec![0.0f64; size + 1];
    // owner[j]: row matched to column j (0 = free).
    let mut owner = vec![0usize; size + 1];
    let mut way = vec![0usize; size + 1];
    let mut minv = vec![0.0f64; size + 1];
    let mut used = vec![false; size + 1];

    for i in 1..=size {
        owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=size {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=size {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut schedule = ScheduleMatrix::empty(k, n);
    let mut value = 0.0;
    for j in 1..=n {
        let i = owner[j];
        if i >= 1 && i <= k {
            let wij = w.at(i - 1, j - 1);
            if wij > 0.0 {
                schedule.assign.set(i - 1, j - 1, 1);
                value += wij;
            }
        }
    }
    Ok(Assignment { schedule, value })
}

/// Exhaustive search over every partial injective station-to-RU map.
/// Test oracle for [`max_weight_assignment`]; refuses `max(K, N) > 8`.
pub fn brute_force_assignment(w: &WeightMatrix) -> Result<Assignment> {
    check(w)?;
    let (k, n) = w.dims();
    if k.max(n) > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge(k.max(n)));
    }

    struct Search<'a> {
        w: &'a WeightMatrix,
        used: Vec<bool>,
        current: Vec<Option<usize>>,
        best_value: f64,
        best: Vec<Option<usize>>,
    }

    impl Search<'_> {
        fn visit(&mut self, station: usize, acc: f64) {
            if station == self.w.rows() {
                if acc > self.best_value {
                    self.best_value = acc;
                    self.best.clone_from(&self.current);
                }
                return;
            }
            self.current[station] = None;
            self.visit(station + 1, acc);
            for ru in 0..self.w.cols() {
                if self.used[ru] {
                    continue;
                }
                self.used[ru] = true;
                self.current[station] = Some(ru);
                self.visit(station + 1, acc + self.w.at(station, ru));
                self.current[station] = None;
                self.used[ru] = false;
            }
        }
    }

    let mut search = Search {
        w,
        used: vec![false; n],
        current: vec![None; k],
        best_value: 0.0,
        best: vec![None; k],
    };
    search.visit(0, 0.0);

    let pairs: Vec<(usize, usize)> = search
        .best
        .iter()
        .enumerate()
        .filter_map(|(s, r)| r.map(|r| (s, r)))
        .collect();
    Ok(Assignment {
        schedule: ScheduleMatrix::from_pairs(k, n, &pairs),
        value: search.best_value,
    })
}
