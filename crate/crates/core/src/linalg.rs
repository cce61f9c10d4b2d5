//! Small dense helpers that do not warrant a matrix library.

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Sign and log-magnitude of a determinant, `None` when the matrix is singular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub sign: f64,
    pub ln_abs: f64,
}

/// Gaussian elimination with partial (in-column) pivoting on a row-major `n×n` matrix.
pub fn log_det(mut a: Vec<f64>, n: usize) -> Option<LogDet> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let mut sign = 1.0;
    let mut ln_abs = 0.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty pivot range");
        let p = a[pivot * n + col];
        if p == 0.0 || !p.is_finite() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            sign = -sign;
        }
        if p < 0.0 {
            sign = -sign;
        }
        ln_abs += p.abs().ln();
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor != 0.0 {
                for k in col..n {
                    a[row * n + k] -= factor * a[col * n + k];
                }
            }
        }
    }
    Some(LogDet { sign, ln_abs })
}
