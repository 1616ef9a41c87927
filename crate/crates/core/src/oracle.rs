//! Dense reference computations used to validate the Toeplitz algebra.
//!
//! These materialize the full matrix and use general-purpose algorithms
//! (scaling and squaring, Gaussian elimination) that share nothing with the
//! column recursions in [`crate::toeplitz`].

use crate::error::{Error, Result};
use crate::toeplitz::ToeplitzLT;

pub const MAX_ORDER: usize = 64;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn from_toeplitz(q: &ToeplitzLT) -> Self {
        let col = q.first_column();
        let n = col.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.set(i, j, col[i - j]);
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    fn matmul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// `exp(Q)` for the dense form of `q`, by scaling and squaring around a
/// degree-18 Taylor polynomial.
pub fn dense_exp_oracle(q: &ToeplitzLT) -> Result<Dense> {
    let n = q.order();
    if n > MAX_ORDER {
        return Err(Error::Size { order: n, limit: MAX_ORDER });
    }
    let a = Dense::from_toeplitz(q);
    let norm = a.norm_inf();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let mut scaled = a.clone();
    scaled.data.iter_mut().for_each(|v| *v *= scale);

    let mut result = Dense::identity(n);
    let mut term = Dense::identity(n);
    for k in 1..=18 {
        term = term.matmul(&scaled);
        let inv_k = 1.0 / k as f64;
        term.data.iter_mut().for_each(|v| *v *= inv_k);
        for (r, t) in result.data.iter_mut().zip(&term.data) {
            *r += t;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &Dense, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.n;
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m.get(i, col).abs().total_cmp(&m.get(j, col).abs()))
            .unwrap();
        if m.get(pivot, col) == 0.0 {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot, j));
                m.set(pivot, j, tmp);
            }
            x.swap(col, pivot);
        }
        for i in col + 1..n {
            let f = m.get(i, col) / m.get(col, col);
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m.set(i, j, m.get(i, j) - f * m.get(col, j));
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m.get(i, j) * x[j]).sum();
        x[i] = (x[i] - s) / m.get(i, i);
    }
    Ok(x)
}

/// First column of `Q^{-1}` via the dense solve `Q x = e_1`.
pub fn dense_inverse_first_column(q: &ToeplitzLT) -> Result<Vec<f64>> {
    let a = Dense::from_toeplitz(q);
    let mut e1 = vec![0.0; a.n];
    e1[0] = 1.0;
    dense_solve(&a, &e1)
}
