use std::cmp::Ordering;

use faer::{c64, Mat};
use serde::Serialize;

use super::linalg::{adjoint_matvec, matvec, norm};
use crate::classical::DampingProfile;
use crate::{Error, Result};

/// Default cap on the dense eigensolver dimension.
pub const DENSE_SOLVER_CAP: usize = 4096;

/// Residual contract `‖Mv − λv‖ ≤ RESIDUAL_TOL · ‖M‖`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `M = D U` with `D = diag(e^{-V(j/N)})`: one step of the map followed by
/// damping.
#[derive(Clone, Debug)]
pub struct DampedPropagator {
    u: Mat<c64>,
    d: Vec<f64>,
    v: Vec<f64>,
    m: Mat<c64>,
}

impl DampedPropagator {
    /// `v` holds `V(j/N)`; it must be finite and nonnegative.
    pub fn new(u: Mat<c64>, v: Vec<f64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n || v.len() != n {
            return Err(Error::invalid(format!("U is {}×{}, V has {} samples", u.nrows(), u.ncols(), v.len())));
        }
        if let Some(j) = v.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid(format!("V({j}/N) = {} is not a finite nonnegative value", v[j])));
        }
        let d: Vec<f64> = v.iter().map(|x| (-x).exp()).collect();
        if let Some(j) = d.iter().position(|&x| x <= 0.0) {
            return Err(Error::invalid(format!("damping factor underflows at j = {j}; M would be singular")));
        }
        let m = Mat::from_fn(n, n, |i, k| u[(i, k)] * d[i]);
        Ok(Self { u, d, v, m })
    }

    pub fn undamped(u: Mat<c64>) -> Self {
        let n = u.nrows();
        Self::new(u, vec![0.0; n]).expect("zero damping is valid")
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &Mat<c64> {
        &self.u
    }

    pub fn m(&self) -> &Mat<c64> {
        &self.m
    }

    pub fn damping_factors(&self) -> &[f64] {
        &self.d
    }

    pub fn damping_samples(&self) -> &[f64] {
        &self.v
    }

    /// `‖M‖₂ = max_j D_j`, exact since `U` is unitary.
    pub fn norm(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// `log |det M| = −Σ_j V(j/N)`.
    pub fn log_abs_det(&self) -> f64 {
        -self.v.iter().sum::<f64>()
    }

    /// `M x`.
    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let mut y = matvec(&self.u, x);
        y.iter_mut().zip(&self.d).for_each(|(y, d)| *y *= d);
        y
    }

    /// `M^{-1} x = U† D^{-1} x`.
    pub fn apply_inverse(&self, x: &[c64]) -> Vec<c64> {
        let y: Vec<c64> = x.iter().zip(&self.d).map(|(x, d)| x / d).collect();
        adjoint_matvec(&self.u, &y)
    }

    /// `M† x = U† D x`.
    pub fn apply_adjoint(&self, x: &[c64]) -> Vec<c64> {
        let y: Vec<c64> = x.iter().zip(&self.d).map(|(x, d)| x * d).collect();
        adjoint_matvec(&self.u, &y)
    }

    /// `(M†)^{-1} x = D^{-1} U x`.
    pub fn apply_adjoint_inverse(&self, x: &[c64]) -> Vec<c64> {
        let mut y = matvec(&self.u, x);
        y.iter_mut().zip(&self.d).for_each(|(y, d)| *y /= d);
        y
    }

    pub fn apply_power(&self, x: &[c64], p: usize) -> Vec<c64> {
        (0..p).fold(x.to_vec(), |v, _| self.apply(&v))
    }

    /// `M^{-1} A` for a dense `A`.
    pub fn inverse_times(&self, a: &Mat<c64>) -> Mat<c64> {
        let n = self.dim();
        let scaled = Mat::from_fn(n, a.ncols(), |i, k| a[(i, k)] / self.d[i]);
        self.u.adjoint() * scaled
    }

    /// `M A` for a dense `A`.
    pub fn times(&self, a: &Mat<c64>) -> Mat<c64> {
        let ua = &self.u * a;
        Mat::from_fn(self.dim(), a.ncols(), |i, k| ua[(i, k)] * self.d[i])
    }
}

/// `M = diag(e^{-V(j/N)}) U`.
pub fn damped_propagator(u: Mat<c64>, v: &DampingProfile<f64>) -> Result<DampedPropagator> {
    let n = u.nrows();
    DampedPropagator::new(u, v.sample(n))
}

/// One eigenpair of `M`.
#[derive(Clone, Debug)]
pub struct EigenmodeRecord {
    pub id: usize,
    pub eigenvalue: c64,
    /// `γ = −log |λ|`.
    pub decay_rate: f64,
    /// `arg λ ∈ (−π, π]`.
    pub phase: f64,
    /// Unit-norm eigenvector.
    pub vector: Vec<c64>,
    /// `‖M v − λ v‖`.
    pub residual: f64,
}

/// Serializable view of an [`EigenmodeRecord`] without the vector.
#[derive(Clone, Debug, Serialize)]
pub struct EigenmodeSummary {
    pub id: usize,
    pub re: f64,
    pub im: f64,
    pub decay_rate: f64,
    pub phase: f64,
    pub residual: f64,
}

impl EigenmodeRecord {
    pub fn summary(&self) -> EigenmodeSummary {
        EigenmodeSummary {
            id: self.id,
            re: self.eigenvalue.re,
            im: self.eigenvalue.im,
            decay_rate: self.decay_rate,
            phase: self.phase,
            residual: self.residual,
        }
    }
}

/// All eigenpairs of `M`, ordered by decay rate and then phase, with
/// identifiers assigned in that order.
pub fn spectrum(prop: &DampedPropagator) -> Result<Vec<EigenmodeRecord>> {
    spectrum_with_cap(prop, DENSE_SOLVER_CAP)
}

pub fn spectrum_with_cap(prop: &DampedPropagator, cap: usize) -> Result<Vec<EigenmodeRecord>> {
    let n = prop.dim();
    if n > cap {
        return Err(Error::CapExceeded { requested: n as u128, cap: cap as u64 });
    }
    let evd = prop
        .m()
        .eigen()
        .map_err(|e| Error::NoConvergence(format!("dense eigensolver failed at N = {n} ({e:?}), ‖M‖ = {}", prop.norm())))?;
    let vals = evd.S().column_vector();
    let vecs = evd.U();
    let bound = RESIDUAL_TOL * prop.norm();
    let mut modes = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = vals[i];
        let mut v: Vec<c64> = (0..n).map(|r| vecs[(r, i)]).collect();
        let s = norm(&v);
        v.iter_mut().for_each(|x| *x /= s);
        let mv = prop.apply(&v);
        let residual = norm(&mv.iter().zip(&v).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
        if !(residual <= bound) {
            return Err(Error::NoConvergence(format!(
                "eigenpair {i} at N = {n} has residual {residual:e} > {bound:e} (λ = {lambda})"
            )));
        }
        modes.push(EigenmodeRecord {
            id: 0,
            eigenvalue: lambda,
            decay_rate: -lambda.norm().ln(),
            phase: lambda.arg(),
            vector: v,
            residual,
        });
    }
    modes.sort_by(|a, b| {
        a.decay_rate.partial_cmp(&b.decay_rate).unwrap_or(Ordering::Equal).then(a.phase.partial_cmp(&b.phase).unwrap_or(Ordering::Equal))
    });
    for (i, m) in modes.iter_mut().enumerate() {
        m.id = i;
    }
    Ok(modes)
}

/// Replaces the vectors of each cluster of eigenvalues closer than `tol`
/// by an orthonormal basis of their span (modified Gram–Schmidt). Only
/// meaningful for normal `M`, where eigenspaces are orthogonal.
pub fn orthonormalize_clusters(modes: &mut [EigenmodeRecord], tol: f64) {
    let n = modes.len();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..n).filter(|&j| !done[j] && (modes[j].eigenvalue - modes[i].eigenvalue).norm() < tol).collect();
        for &j in &cluster {
            done[j] = true;
        }
        let mut basis: Vec<Vec<c64>> = Vec::with_capacity(cluster.len());
        for &j in &cluster {
            let mut v = modes[j].vector.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = super::linalg::inner(&v, b);
                    v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let s = norm(&v);
            v.iter_mut().for_each(|x| *x /= s);
            basis.push(v.clone());
            modes[j].vector = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::TorusMap;
    use crate::quantum::quantize;

    fn cat_u(n: usize) -> Mat<c64> {
        quantize(&TorusMap::cat(), n).unwrap()
    }

    #[test]
    fn undamped_is_unitary_spectrum() {
        let prop = DampedPropagator::undamped(cat_u(32));
        let s = spectrum(&prop).unwrap();
        assert_eq!(s.len(), 32);
        assert!(s.iter().all(|m| m.decay_rate.abs() <= 1e-10));
    }

    #[test]
    fn constant_damping_shifts_every_rate() {
        let prop = damped_propagator(cat_u(24), &DampingProfile::constant(0.7).unwrap()).unwrap();
        let s = spectrum(&prop).unwrap();
        assert!(s.iter().all(|m| (m.decay_rate - 0.7).abs() <= 1e-10));
    }

    #[test]
    fn sum_rule_matches_determinant() {
        let v = DampingProfile::trig(0.6, vec![0.3, 0.1], vec![0.2]).unwrap();
        let prop = damped_propagator(cat_u(40), &v).unwrap();
        let s = spectrum(&prop).unwrap();
        let gsum: f64 = s.iter().map(|m| m.decay_rate).sum();
        // oracle: direct determinant of M
        let ld = prop.m().determinant().norm().ln();
        assert!((gsum + ld).abs() < 1e-8, "{gsum} vs {}", -ld);
        assert!((gsum + prop.log_abs_det()).abs() < 1e-8);
        let vs = prop.damping_samples();
        let (lo, hi) = (vs.iter().copied().fold(f64::INFINITY, f64::min), vs.iter().copied().fold(0.0, f64::max));
        assert!(s.iter().all(|m| m.decay_rate >= lo - 1e-8 && m.decay_rate <= hi + 1e-8));
    }

    #[test]
    fn damping_placement_does_not_change_spectrum() {
        let v = DampingProfile::trig(0.5, vec![0.4], vec![]).unwrap();
        let u = cat_u(20);
        let prop = damped_propagator(u.clone(), &v).unwrap();
        let d = prop.damping_factors().to_vec();
        let ud = Mat::from_fn(20, 20, |i, k| u[(i, k)] * d[k]);
        let mut a: Vec<f64> = prop.m().eigenvalues().unwrap().iter().map(|z| z.norm()).collect();
        let mut b: Vec<f64> = ud.eigenvalues().unwrap().iter().map(|z| z.norm()).collect();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));
    }

    #[test]
    fn inverse_and_adjoint_actions() {
        let v = DampingProfile::trig(0.5, vec![0.4], vec![]).unwrap();
        let prop = damped_propagator(cat_u(16), &v).unwrap();
        let x: Vec<c64> = (0..16).map(|i| c64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let back = prop.apply_inverse(&prop.apply(&x));
        assert!(back.iter().zip(&x).all(|(a, b)| (a - b).norm() < 1e-12));
        let back = prop.apply_adjoint_inverse(&prop.apply_adjoint(&x));
        assert!(back.iter().zip(&x).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn negative_damping_rejected() {
        assert!(DampedPropagator::new(cat_u(4), vec![0.0, -0.1, 0.0, 0.0]).is_err());
    }
}
