//! Dense linear algebra used by the GP and hull code.

use alloc::vec;
use alloc::vec::Vec;


/// Relative pivot floor below which a Cholesky pivot counts as zero.
const PIVOT_RTOL: f64 = 1e-13;

/// Lower-triangular Cholesky factor stored row-packed so rows can be appended.
#[derive(Clone, Debug, Default)]
pub struct Cholesky {
    n: usize,
    /// Row `i` occupies `packed[i*(i+1)/2 ..= i*(i+1)/2 + i]`.
    packed: Vec<f64>,
}

/// Index of the pivot that failed during factorization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotPositiveDefinite(pub usize);

impl Cholesky {
    pub fn empty() -> Self {
        Cholesky::default()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn row(&self, i: usize) -> &[f64] {
        let start = i * (i + 1) / 2;
        &self.packed[start..start + i + 1]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.row(i)[j]
        }
    }

    /// Factor a symmetric matrix given as a closure over `(i, j)` with `j <= i`.
    pub fn factor_with<F: Fn(usize, usize) -> f64>(
        n: usize,
        entry: F,
    ) -> Result<Self, NotPositiveDefinite> {
        let mut chol = Cholesky {
            n: 0,
            packed: Vec::with_capacity(n * (n + 1) / 2),
        };
        let mut col = Vec::with_capacity(n);
        for i in 0..n {
            col.clear();
            col.extend((0..i).map(|j| entry(i, j)));
            chol.append(&col, entry(i, i))?;
        }
        Ok(chol)
    }

    /// Factor a row-major `n x n` symmetric positive definite matrix.
    pub fn factor(a: &[f64], n: usize) -> Result<Self, NotPositiveDefinite> {
        assert_eq!(a.len(), n * n, "matrix shape mismatch");
        Cholesky::factor_with(n, |i, j| a[i * n + j])
    }

    /// Extend the factored matrix by one row/column. `cross` holds the new
    /// off-diagonal entries against the existing rows, `diag` the new diagonal.
    ///
    /// The result equals factoring the bordered matrix from scratch.
    pub fn append(&mut self, cross: &[f64], diag: f64) -> Result<(), NotPositiveDefinite> {
        assert_eq!(cross.len(), self.n, "border length mismatch");
        let l = self.solve_lower(cross);
        let pivot = diag - l.iter().map(|v| v * v).sum::<f64>();
        if !(pivot > PIVOT_RTOL * diag.abs().max(f64::MIN_POSITIVE)) || !pivot.is_finite() {
            return Err(NotPositiveDefinite(self.n));
        }
        self.packed.extend_from_slice(&l);
        self.packed.push(pivot.sqrt());
        self.n += 1;
        Ok(())
    }

    /// Solve `L y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n);
        let mut y = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let row = self.row(i);
            let s: f64 = row[..i].iter().zip(&y).map(|(l, v)| l * v).sum();
            y.push((b[i] - s) / row[i]);
        }
        y
    }

    /// Solve `L^T x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n);
        let mut x = y.to_vec();
        for i in (0..self.n).rev() {
            let row = self.row(i);
            x[i] /= row[i];
            let xi = x[i];
            for (xj, l) in x[..i].iter_mut().zip(&row[..i]) {
                *xj -= l * xi;
            }
        }
        x
    }

    /// Solve `(L L^T) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }
}

/// Solve a small dense system with partial pivoting. Returns `None` when singular.
pub fn solve_dense(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i * n + k].abs().total_cmp(&m[j * n + k].abs()))?;
        if m[p * n + k].abs() <= 1e-14 * scale {
            return None;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        for i in k + 1..n {
            let f = m[i * n + k] / m[k * n + k];
            if f != 0.0 {
                for j in k..n {
                    m[i * n + j] -= f * m[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| m[k * n + j] * x[j]).sum();
        x[k] = (x[k] - s) / m[k * n + k];
    }
    Some(x)
}

/// Unit vector spanning the null space of the `rows.len() x dim` matrix, if
/// that null space is exactly one-dimensional (up to tolerance `tol`, relative).
pub fn null_vector(rows: &[Vec<f64>], dim: usize, tol: f64) -> Option<Vec<f64>> {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut pivot_cols = Vec::with_capacity(dim);
    let mut r = 0;
    for c in 0..dim {
        if r == m.len() {
            break;
        }
        let p = (r..m.len()).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() <= tol * scale {
            continue;
        }
        m.swap(r, p);
        let inv = 1.0 / m[r][c];
        for v in m[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..m.len() {
            if i != r {
                let f = m[i][c];
                if f != 0.0 {
                    for j in 0..dim {
                        m[i][j] -= f * m[r][j];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if pivot_cols.len() + 1 != dim {
        return None;
    }
    let free = (0..dim).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![0.0; dim];
    v[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -m[row][free];
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let c = Cholesky::factor(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| c.get(i, k) * c.get(j, k)).sum();
                assert!((s - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        let x = c.solve(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_is_rejected() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(Cholesky::factor(&a, 2).unwrap_err(), NotPositiveDefinite(1));
    }

    #[test]
    fn dense_solve_and_null_vector() {
        let a = [0.0, 2.0, 1.0, 1.0];
        let x = solve_dense(&a, &[4.0, 3.0], 2).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        assert!(solve_dense(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0], 2).is_none());

        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]];
        let v = null_vector(&rows, 3, 1e-12).unwrap();
        assert!(v[0].abs() < 1e-12 && (v[1] + v[2]).abs() < 1e-12);
        let rank_deficient = vec![vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]];
        assert!(null_vector(&rank_deficient, 3, 1e-12).is_none());
    }
}
