//! Exact rational simplex for packing programs
//! `max c·x  s.t.  A x <= b,  x >= 0` with `b >= 0`.
//!
//! The slack basis is feasible from the start, so no phase one is needed.
//! Bland's rule guarantees termination. The dual solution is read off the
//! reduced costs of the slack columns.

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: Rational,
    /// Primal optimum, one entry per column.
    pub primal: Vec<Rational>,
    /// Dual optimum, one entry per row.
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("right-hand side must be nonnegative")]
    NegativeRhs,
    #[error("row {0} has the wrong width")]
    Shape(usize),
}

pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(LpError::Shape(b.len()));
    }
    if let Some(i) = a.iter().position(|row| row.len() != n) {
        return Err(LpError::Shape(i));
    }
    if b.iter().any(Rational::is_negative) {
        return Err(LpError::NegativeRhs);
    }

    let width = n + m;
    // Rows 0..m are constraints; each row holds `width` coefficients then the rhs.
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(width + 1);
            row.extend(a[i].iter().cloned());
            row.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    // Objective row stores reduced costs `-c` (entering candidates are negative).
    let mut obj: Vec<Rational> = c.iter().map(|v| -v.clone()).collect();
    obj.extend((0..=m).map(|_| Rational::zero()));
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        let pivot = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v = &*v / &pivot;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v = &*v - &(&f * p);
                    }
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (v, p) in obj.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v = &*v - &(&f * p);
                }
            }
        }
        basis[r] = enter;
    }

    let mut primal = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            primal[bv] = t[i][width].clone();
        }
    }
    let dual = (0..m).map(|i| obj[n + i].clone()).collect();
    Ok(LpSolution { value: obj[width].clone(), primal, dual })
}
