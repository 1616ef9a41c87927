//! Lower-triangular Toeplitz matrices stored by their first column.
//!
//! Such a matrix is a truncated power series: products are truncated
//! convolutions, the exponential is `exp` of the series, and the inverse is
//! the reciprocal series. The dense `M x M` matrix is never formed here.

use crate::error::{domain, Error, Result};

/// Lower-triangular Toeplitz matrix `Q` with first column `(q_0, ..., q_{M-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzLT {
    col: Vec<f64>,
}

/// A first column produced by an operation on a [`ToeplitzLT`].
#[derive(Debug, Clone, PartialEq)]
pub struct Column(pub Vec<f64>);

impl ToeplitzLT {
    pub fn new(first_column: Vec<f64>) -> Result<Self> {
        if first_column.is_empty() {
            return Err(domain("ToeplitzLT::new", "order must be at least 1"));
        }
        if let Some(bad) = first_column.iter().find(|v| !v.is_finite()) {
            return Err(domain("ToeplitzLT::new", format!("entries must be finite, got {bad}")));
        }
        Ok(Self { col: first_column })
    }

    pub fn order(&self) -> usize {
        self.col.len()
    }

    pub fn first_column(&self) -> &[f64] {
        &self.col
    }

    /// `c * Q`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.col.iter().map(|q| c * q).collect())
    }

    /// Strictly lower part `Q - q_0 I`, i.e. the column `(0, q_1, ..., q_{M-1})`.
    pub fn nilpotent_part(&self) -> Self {
        let mut col = self.col.clone();
        col[0] = 0.0;
        Self { col }
    }
}

impl Column {
    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// First column of the product of two lower-triangular Toeplitz matrices of
/// the same order: the truncated convolution of their first columns.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "convolve: orders differ");
    (0..a.len())
        .map(|n| (0..=n).map(|i| a[i] * b[n - i]).sum())
        .collect()
}

/// First column of `exp(Q)`.
///
/// `x_0 = e^{q_0}` and `x_n = Σ_{i<n} (n-i)/n · q_{n-i} · x_i`, which is the
/// coefficient recursion of `X(z) = exp(Q(z))` obtained from `X' = Q' X`.
pub fn exp_first_column(q: &ToeplitzLT) -> Result<Column> {
    let col = &q.col;
    let x0 = col[0].exp();
    if !x0.is_finite() {
        return Err(Error::Range {
            func: "exp_first_column",
            msg: format!("exp({}) overflows", col[0]),
        });
    }
    let m = col.len();
    let mut x = Vec::with_capacity(m);
    x.push(x0);
    for n in 1..m {
        let nf = n as f64;
        let xn: f64 = (0..n)
            .map(|i| (n - i) as f64 / nf * col[n - i] * x[i])
            .sum();
        x.push(xn);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Range {
            func: "exp_first_column",
            msg: "recursion overflowed".into(),
        });
    }
    Ok(Column(x))
}

/// Sum of the first column of `exp(Q)`.
///
/// This is the coverage summand `Σ_n (-s)^n/n! L^{(n)}(s)` at a fixed serving
/// distance. It coincides with the induced 1-norm whenever the column is
/// non-negative, which holds for every physical model in this crate.
pub fn l1_exp(q: &ToeplitzLT) -> Result<f64> {
    Ok(exp_first_column(q)?.sum())
}

/// First column of `Q^{-1}` by forward substitution.
pub fn inv_first_column(q: &ToeplitzLT) -> Result<Column> {
    let col = &q.col;
    let q0 = col[0];
    if q0 == 0.0 {
        return Err(Error::Singular("diagonal entry q_0 is zero".into()));
    }
    let m = col.len();
    let mut y = Vec::with_capacity(m);
    y.push(1.0 / q0);
    for n in 1..m {
        let acc: f64 = (0..n).map(|i| col[n - i] * y[i]).sum();
        y.push(-acc / q0);
    }
    Ok(Column(y))
}

/// Column sum of `(Q - q_0 I)^n`; exactly zero for `n >= M`.
pub fn nilpotent_power_l1(q: &ToeplitzLT, n: usize) -> f64 {
    let m = q.order();
    if n >= m {
        return 0.0;
    }
    let shift = q.nilpotent_part().col;
    let mut power = vec![0.0; m];
    power[0] = 1.0;
    for _ in 0..n {
        power = convolve(&power, &shift);
    }
    power.iter().sum()
}
