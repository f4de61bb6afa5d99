//! Dense rational linear algebra on small matrices (Gaussian elimination).

use num_traits::{One, Zero};

use crate::num::{IntVector, Rat, RatVector};

/// Reduced row echelon form; returns the reduced rows and pivot columns.
pub fn rref(rows: &[Vec<Rat>], ncols: usize) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rat>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

pub fn rank_int(rows: &[IntVector], ncols: usize) -> usize {
    let r: Vec<Vec<Rat>> = rows.iter().map(|v| v.to_rat().0).collect();
    rank(&r, ncols)
}

/// Basis of the right null space `{x : rows * x = 0}`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (m, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m[i][f].clone();
            }
            x
        })
        .collect()
}

/// Some solution of `rows * x = rhs`, or `None` when inconsistent.
pub fn solve(rows: &[Vec<Rat>], rhs: &[Rat], ncols: usize) -> Option<Vec<Rat>> {
    let aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let (m, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = m[i][ncols].clone();
    }
    Some(x)
}

/// Solves for a row vector `y` with `y * basis = target` (basis given by rows).
pub fn solve_left(basis: &[RatVector], target: &RatVector) -> Option<RatVector> {
    let n = target.len();
    let k = basis.len();
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|j| (0..k).map(|i| basis[i][j].clone()).collect())
        .collect();
    solve(&rows, &target.0, k).map(RatVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn nullspace_of_single_row() {
        let rows = vec![vec![rat(1, 1), rat(-1, 1)]];
        let ns = nullspace(&rows, 2);
        assert_eq!(ns, vec![vec![rat(1, 1), rat(1, 1)]]);
    }

    #[test]
    fn solve_detects_inconsistency() {
        let rows = vec![vec![rat(1, 1), rat(1, 1)], vec![rat(2, 1), rat(2, 1)]];
        assert!(solve(&rows, &[rat(1, 1), rat(3, 1)], 2).is_none());
        let x = solve(&rows, &[rat(1, 1), rat(2, 1)], 2).unwrap();
        assert_eq!(&x[0] + &x[1], rat(1, 1));
    }
}
