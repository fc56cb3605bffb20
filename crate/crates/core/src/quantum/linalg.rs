//! Small dense helpers on top of faer.

use faer::{c64, Mat};
use rayon::prelude::*;

/// `A x` for column-major `A`.
pub(crate) fn matvec(a: &Mat<c64>, x: &[c64]) -> Vec<c64> {
    let mut y = vec![c64::new(0.0, 0.0); a.nrows()];
    for (k, &xk) in x.iter().enumerate() {
        if xk == c64::new(0.0, 0.0) {
            continue;
        }
        for (yi, &aik) in y.iter_mut().zip(a.col_as_slice(k)) {
            *yi += aik * xk;
        }
    }
    y
}

/// `A† x`.
pub(crate) fn adjoint_matvec(a: &Mat<c64>, x: &[c64]) -> Vec<c64> {
    (0..a.ncols())
        .into_par_iter()
        .map(|k| a.col_as_slice(k).iter().zip(x).map(|(aik, xi)| aik.conj() * xi).sum())
        .collect()
}

/// `⟨x, y⟩ = Σ x_i conj(y_i)`.
pub(crate) fn inner(x: &[c64], y: &[c64]) -> c64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn norm(x: &[c64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |A_ij - B_ij|`.
pub(crate) fn max_abs_diff(a: &Mat<c64>, b: &Mat<c64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for (x, y) in a.col_as_slice(j).iter().zip(b.col_as_slice(j)) {
            m = m.max((x - y).norm());
        }
    }
    m
}

pub(crate) fn identity(n: usize) -> Mat<c64> {
    Mat::from_fn(n, n, |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
}

/// Largest singular value.
pub(crate) fn spectral_norm(a: &Mat<c64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    match a.singular_values() {
        Ok(s) => s.first().copied().unwrap_or(0.0),
        Err(_) => f64::NAN,
    }
}
