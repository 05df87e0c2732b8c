//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::poly::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Matrix,
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

fn size(r: &Rational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

/// Row-reduces `m` (each row of length `ncols`), pivoting on the entry of
/// smallest bit size to limit coefficient growth.
pub fn rref(mut m: Matrix, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let best = (r..m.len()).filter(|&i| !m[i][col].is_zero()).min_by_key(|&i| size(&m[i][col]));
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for v in m[r].iter_mut().skip(col) {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Rref { rows: m, pivots, ncols }
}

pub fn rank(m: &Matrix, ncols: usize) -> usize {
    rref(m.clone(), ncols).pivots.len()
}

/// A basis of `{x | m x = 0}`.
pub fn kernel(m: &Matrix, ncols: usize) -> Matrix {
    let red = rref(m.clone(), ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in red.rows.iter().zip(&red.pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Inverse of a square matrix, if it is invertible.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let augmented: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let red = rref(augmented, 2 * n);
    if red.pivots.len() < n || red.pivots[n - 1] >= n {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    Some(red.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Indices of a maximal set of linearly independent rows of `m`, chosen
/// greedily in order.
pub fn independent_rows(m: &Matrix, ncols: usize) -> Vec<usize> {
    let t = transpose(m, ncols);
    rref(t, m.len()).pivots
}

pub fn transpose(m: &Matrix, ncols: usize) -> Matrix {
    (0..ncols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(m: &Matrix, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
        .collect()
}
