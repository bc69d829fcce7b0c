//! Special-function and linear-algebra kernels.
//!
//! Factorial-type magnitudes are kept in log space so that binomial
//! coefficients for M in the hundreds never overflow; linear values are only
//! materialized once a whole amplitude or moment term has been assembled.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::ORDER_CAP;

/// A non-negative magnitude stored as its natural logarithm.
///
/// `-inf` encodes zero, which lets out-of-range binomial coefficients and
/// annihilation below the vacuum flow through sums without branching.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogReal(f64);

impl LogReal {
    pub const ZERO: LogReal = LogReal(f64::NEG_INFINITY);
    pub const ONE: LogReal = LogReal(0.0);

    pub fn from_ln(log_magnitude: f64) -> Self {
        LogReal(log_magnitude)
    }

    /// Panics on negative input.
    pub fn from_value(value: f64) -> Self {
        assert!(value >= 0.0, "LogReal cannot hold negative value {value}");
        LogReal(value.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn exp(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self^(1/2)`.
    pub fn sqrt(self) -> Self {
        LogReal(0.5 * self.0)
    }

    /// `base^k` for a non-negative base given in linear space, with `0^0 = 1`.
    pub fn powi(base: f64, k: usize) -> Self {
        if k == 0 {
            LogReal::ONE
        } else {
            LogReal(k as f64 * base.ln())
        }
    }
}

impl std::ops::Mul for LogReal {
    type Output = LogReal;

    fn mul(self, rhs: LogReal) -> LogReal {
        if self.is_zero() || rhs.is_zero() {
            LogReal::ZERO
        } else {
            LogReal(self.0 + rhs.0)
        }
    }
}

impl std::ops::Div for LogReal {
    type Output = LogReal;

    fn div(self, rhs: LogReal) -> LogReal {
        assert!(!rhs.is_zero(), "division by a zero LogReal");
        if self.is_zero() {
            LogReal::ZERO
        } else {
            LogReal(self.0 - rhs.0)
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// `ln C(m, n)`; zero encoding outside `0 <= n <= m`.
pub fn log_binomial(m: usize, n: i64) -> LogReal {
    if n < 0 || n as u64 > m as u64 {
        return LogReal::ZERO;
    }
    let n = n as usize;
    if n == 0 || n == m {
        return LogReal::ONE;
    }
    LogReal(ln_factorial(m) - ln_factorial(n) - ln_factorial(m - n))
}

/// `ln(n! / (n - r)!)`; zero encoding when `r > n`.
pub fn log_falling_factorial(n: usize, r: usize) -> LogReal {
    if r > n {
        return LogReal::ZERO;
    }
    if r == 0 {
        return LogReal::ONE;
    }
    LogReal(ln_factorial(n) - ln_factorial(n - r))
}

fn stirling_table() -> &'static [[u64; ORDER_CAP + 1]; ORDER_CAP + 1] {
    static TABLE: OnceLock<[[u64; ORDER_CAP + 1]; ORDER_CAP + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut s = [[0u64; ORDER_CAP + 1]; ORDER_CAP + 1];
        s[0][0] = 1;
        for e in 1..=ORDER_CAP {
            for f in 1..=e {
                s[e][f] = f as u64 * s[e - 1][f] + s[e - 1][f - 1];
            }
        }
        s
    })
}

/// Stirling number of the second kind `S2(e, f)`, exact for `e <= 20`.
pub fn stirling2(e: usize, f: usize) -> Result<u64> {
    if e > ORDER_CAP {
        return Err(Error::OrderCap {
            order: e,
            cap: ORDER_CAP,
        });
    }
    if f > e {
        return Ok(0);
    }
    Ok(stirling_table()[e][f])
}

/// Pivot magnitudes below this are treated as an exact zero.
pub const PIVOT_TOLERANCE: f64 = 1e-300;

/// Determinant by LU factorization with partial pivoting.
///
/// The empty matrix has determinant 1.
pub fn determinant(m: &[Vec<f64>]) -> Result<f64> {
    let n = m.len();
    if let Some((i, row)) = m.iter().enumerate().find(|(_, row)| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "row {i} has {} entries in a matrix with {n} rows",
            row.len()
        )));
    }
    let mut lu: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&a, &b| lu[a][col].abs().total_cmp(&lu[b][col].abs()))
            .expect("non-empty pivot range");
        let pivot = lu[pivot_row][col];
        if pivot.abs() < PIVOT_TOLERANCE {
            return Ok(0.0);
        }
        if pivot_row != col {
            lu.swap(pivot_row, col);
            det = -det;
        }
        det *= pivot;
        let (upper, lower) = lu.split_at_mut(col + 1);
        let pivot_tail = &upper[col][col + 1..];
        for row in lower {
            let factor = row[col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for (x, &u) in row[col + 1..].iter_mut().zip(pivot_tail) {
                *x -= factor * u;
            }
        }
    }
    Ok(det)
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}
