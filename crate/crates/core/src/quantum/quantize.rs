use std::f64::consts::PI;

use faer::{c64, Mat};
use serde::Serialize;

use super::linalg::{identity, max_abs_diff};
use crate::classical::TorusMap;
use crate::{Error, Result};

/// Unitarity contract on `U`.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Largest even-dimension quantization the parity error lists.
const ADMISSIBLE_LIST_MAX: usize = 64;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Whether `(A, N)` admits the generating-function kernel: even `N` needs
/// `|b| = 1`, odd `N` needs `b` invertible mod `N`.
pub fn is_admissible(a: [[i64; 2]; 2], n: usize) -> bool {
    let b = a[0][1];
    if n < 2 || b == 0 {
        return false;
    }
    if n % 2 == 0 {
        b.abs() == 1
    } else {
        gcd(b, n as i64) == 1
    }
}

fn mod_inverse(x: i64, n: i64) -> Option<i64> {
    let (mut r0, mut r1) = (x.rem_euclid(n), n);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(n))
}

/// Quantization of a linear toral automorphism `A = [[a, b], [c, d]]` on
/// `ℂ^N` (position basis `q_j = j/N`, `ħ = 1/(2πN)`), from the generating
/// function `(a q² − 2 q q' + d q'²)/(2b)`:
///
/// - even `N`: `U[j,k] = N^{-1/2} exp(iπ (a k² − 2 j k + d j²)/(N b))`;
/// - odd `N`: `U[j,k] = N^{-1/2} ω^{h (a k² − 2 j k + d j²)}` with
///   `ω = e^{2πi/N}` and `h = (2b)^{-1} mod N`.
///
/// The result is checked for unitarity.
pub fn quantize(map: &TorusMap<f64>, n: usize) -> Result<Mat<c64>> {
    if !map.is_linear() {
        return Err(Error::invalid("only linear automorphisms have an exact quantization here"));
    }
    let a = map.matrix();
    if a[0][1] == 0 {
        return Err(Error::invalid("the generating-function kernel needs A[0][1] != 0"));
    }
    if !is_admissible(a, n) {
        return Err(Error::Parity {
            n,
            admissible: (2..=ADMISSIBLE_LIST_MAX).filter(|&m| is_admissible(a, m)).collect(),
        });
    }
    let (aa, b, d) = (a[0][0], a[0][1], a[1][1]);
    let ni = n as i64;
    let scale = 1.0 / (n as f64).sqrt();
    let q = |j: i64, k: i64| aa * k * k - 2 * j * k + d * j * j;
    let u = if n % 2 == 0 {
        // phase π q / (N b), reduced mod 2 N |b| in integers
        let period = 2 * ni * b.abs();
        Mat::from_fn(n, n, |j, k| {
            let r = (q(j as i64, k as i64) * b.signum()).rem_euclid(period);
            c64::from_polar(scale, PI * r as f64 / (ni * b.abs()) as f64)
        })
    } else {
        let h = mod_inverse(2 * b, ni).expect("admissible odd N has (2b)^-1");
        Mat::from_fn(n, n, |j, k| {
            let r = ((q(j as i64, k as i64) % ni) * h).rem_euclid(ni);
            c64::from_polar(scale, 2.0 * PI * r as f64 / n as f64)
        })
    };
    let defect = unitarity_defect(&u);
    if !(defect <= UNITARITY_TOL) {
        return Err(Error::contract(format!("‖U†U − I‖_max = {defect:e} at N = {n}")));
    }
    Ok(u)
}

/// `‖U†U − I‖_max`.
pub fn unitarity_defect(u: &Mat<c64>) -> f64 {
    let g = u.adjoint() * u;
    max_abs_diff(&g, &identity(u.nrows()))
}

/// Phase-space translation `T(n) = Z^{n₁} X^{-n₂}`, where
/// `X|j⟩ = |j+1⟩` and `Z|j⟩ = e^{2πij/N}|j⟩`. Up to a phase this is the
/// quantization of the Fourier mode `e^{2πi(n₁ q + n₂ p)}`. The matrix is a phased
/// permutation, returned as `(row of column k, phase)`.
pub fn translation(n_dim: usize, n: [i64; 2]) -> Vec<(usize, c64)> {
    let ni = n_dim as i64;
    (0..ni)
        .map(|k| {
            let j = (k - n[1]).rem_euclid(ni);
            (j as usize, c64::from_polar(1.0, 2.0 * PI * ((n[0] * j).rem_euclid(ni)) as f64 / n_dim as f64))
        })
        .collect()
}

/// `T(n)` as a dense matrix.
pub fn translation_matrix(n_dim: usize, n: [i64; 2]) -> Mat<c64> {
    let mut t = Mat::<c64>::zeros(n_dim, n_dim);
    for (k, (j, ph)) in translation(n_dim, n).into_iter().enumerate() {
        t[(j, k)] = ph;
    }
    t
}

/// Label map of the exact Egorov property: `U† T(n) U ∝ T(Aᵀ n)` for the
/// Fourier labels above.
pub fn egorov_label(a: [[i64; 2]; 2], n: [i64; 2]) -> [i64; 2] {
    [a[0][0] * n[0] + a[1][0] * n[1], a[0][1] * n[0] + a[1][1] * n[1]]
}

#[derive(Clone, Debug, Serialize)]
pub struct EgorovEntry {
    pub n: [i64; 2],
    pub image: [i64; 2],
    /// `c(n)` in `U† T(n) U = c(n) T(image)`.
    pub ratio: [f64; 2],
    /// `‖U† T(n) U − c(n) T(image)‖_max`.
    pub defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EgorovReport {
    pub dimension: usize,
    pub radius: i64,
    pub entries: Vec<EgorovEntry>,
    pub max_defect: f64,
    /// `max |1 − |c(n)||`.
    pub max_modulus_defect: f64,
}

impl EgorovReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.max_defect <= tol && self.max_modulus_defect <= tol
    }
}

/// Checks exact Egorov for all nonzero `|n|_∞ ≤ radius`.
pub fn egorov_check(u: &Mat<c64>, a: [[i64; 2]; 2], radius: i64) -> EgorovReport {
    let n_dim = u.nrows();
    let mut entries = Vec::new();
    for n1 in -radius..=radius {
        for n2 in -radius..=radius {
            if n1 == 0 && n2 == 0 {
                continue;
            }
            let n = [n1, n2];
            let image = egorov_label(a, n);
            let conj = u.adjoint() * translation_matrix(n_dim, n) * u;
            let target = translation(n_dim, image);
            // c = ⟨T(m), U†T(n)U⟩_HS / N
            let c: c64 = target.iter().enumerate().map(|(k, &(j, ph))| ph.conj() * conj[(j, k)]).sum::<c64>() / n_dim as f64;
            let mut expected = Mat::<c64>::zeros(n_dim, n_dim);
            for (k, (j, ph)) in target.into_iter().enumerate() {
                expected[(j, k)] = ph * c;
            }
            entries.push(EgorovEntry { n, image, ratio: [c.re, c.im], defect: max_abs_diff(&conj, &expected) });
        }
    }
    let max_defect = entries.iter().map(|e| e.defect).fold(0.0, f64::max);
    let max_modulus_defect = entries.iter().map(|e| (1.0 - e.ratio[0].hypot(e.ratio[1])).abs()).fold(0.0, f64::max);
    EgorovReport { dimension: n_dim, radius, entries, max_defect, max_modulus_defect }
}
