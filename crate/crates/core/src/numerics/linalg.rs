//! Small dense linear algebra: Gaussian elimination with partial pivoting and
//! fixed-size 4×4 helpers.

use thiserror::Error;

use super::poly::{PolyError, PolynomialReal};

/// Largest system `linear_solve_dense` is meant for.
pub const MAX_DENSE_DIM: usize = 16;

pub type Mat4 = [[f64; 4]; 4];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("dimension mismatch: matrix is {rows}x{cols}, right-hand side has {rhs}")]
    DimensionMismatch { rows: usize, cols: usize, rhs: usize },
    #[error("system of dimension {0} exceeds the dense limit of 16")]
    TooLarge(usize),
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    rows: n,
                    cols: r.len(),
                    rhs: n,
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solve `m·x = b` by LU elimination with partial pivoting.
pub fn linear_solve_dense(m: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = m.n;
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch {
            rows: n,
            cols: n,
            rhs: b.len(),
        });
    }
    if n > MAX_DENSE_DIM {
        return Err(LinalgError::TooLarge(n));
    }
    let threshold = n as f64 * f64::EPSILON * m.max_abs();
    let mut a = m.data.clone();
    let mut x = b.to_vec();

    for col in 0..n {
        let (piv_row, piv) = (col..n)
            .map(|r| (r, a[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv > threshold) {
            return Err(LinalgError::SingularMatrix { column: col, pivot: piv });
        }
        if piv_row != col {
            for k in 0..n {
                a.swap(col * n + k, piv_row * n + k);
            }
            x.swap(col, piv_row);
        }
        let d = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / d;
            if factor == 0.0 {
                continue;
            }
            a[r * n + col] = 0.0;
            for k in col + 1..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            x[r] -= factor * x[col];
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (x[row] - s) / a[row * n + row];
    }
    Ok(x)
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat4_transpose(a: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat4_frobenius(a: &Mat4) -> f64 {
    a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn mat4_max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn mat4_scale(a: &Mat4, s: f64) -> Mat4 {
    a.map(|row| row.map(|v| v * s))
}

fn minor(a: &Mat4, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        1 => a[rows[0]][cols[0]],
        2 => a[rows[0]][cols[0]] * a[rows[1]][cols[1]] - a[rows[0]][cols[1]] * a[rows[1]][cols[0]],
        _ => {
            let r = rows[0];
            cols.iter()
                .enumerate()
                .map(|(pos, &c)| {
                    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                    let sub: Vec<usize> = cols.iter().copied().filter(|&k| k != c).collect();
                    sign * a[r][c] * minor(a, &rows[1..], &sub)
                })
                .sum()
        }
    }
}

/// Characteristic polynomial det(sI − A) of a 4×4 matrix, from sums of principal
/// minors.
pub fn characteristic_polynomial(a: &Mat4) -> Result<PolynomialReal, PolyError> {
    let mut coeffs = vec![1.0];
    for k in 1..=4usize {
        let mut sum = 0.0;
        for mask in 0u8..16 {
            if mask.count_ones() as usize != k {
                continue;
            }
            let idx: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
            sum += minor(a, &idx, &idx);
        }
        coeffs.push(if k % 2 == 0 { sum } else { -sum });
    }
    PolynomialReal::new(coeffs)
}
