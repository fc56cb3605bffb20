use serde::{Deserialize, Serialize};

use crate::{Error, Real, Result};

/// Upper bound on `κ · max|s'|` accepted for the perturbation. The shear
/// stays well inside the cone-preserving range of the cat map, so the
/// perturbed system remains Anosov.
pub const ANOSOV_SHEAR_LIMIT: f64 = 0.5;

/// Steps used to relax onto the unstable direction.
pub const UNSTABLE_RELAXATION_STEPS: usize = 40;

/// Trigonometric polynomial `s(x) = Σ_m c_m cos(2π m x) + s_m sin(2π m x)`,
/// `m = 1, 2, …`, scaled by `kappa`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct Shear<T> {
    pub kappa: T,
    #[serde(default)]
    pub cos: Vec<T>,
    #[serde(default)]
    pub sin: Vec<T>,
}

impl<T: Real> Shear<T> {
    fn eval(&self, x: T) -> T {
        let tau = T::TAU();
        let mut s = T::zero();
        for (m, &c) in self.cos.iter().enumerate() {
            s += c * (tau * T::from_usize_lossy(m + 1) * x).cos();
        }
        for (m, &c) in self.sin.iter().enumerate() {
            s += c * (tau * T::from_usize_lossy(m + 1) * x).sin();
        }
        self.kappa * s
    }

    fn derivative(&self, x: T) -> T {
        let tau = T::TAU();
        let mut s = T::zero();
        for (m, &c) in self.cos.iter().enumerate() {
            let w = tau * T::from_usize_lossy(m + 1);
            s -= c * w * (w * x).sin();
        }
        for (m, &c) in self.sin.iter().enumerate() {
            let w = tau * T::from_usize_lossy(m + 1);
            s += c * w * (w * x).cos();
        }
        self.kappa * s
    }

    /// `κ Σ 2π m (|c_m| + |s_m|) ≥ max|κ s'|`.
    pub fn slope_bound(&self) -> T {
        let tau = T::TAU();
        let term = |m: usize, c: T| tau * T::from_usize_lossy(m + 1) * c.abs();
        let sum: T = self.cos.iter().enumerate().map(|(m, &c)| term(m, c)).sum::<T>()
            + self.sin.iter().enumerate().map(|(m, &c)| term(m, c)).sum::<T>();
        self.kappa.abs() * sum
    }
}

pub(crate) fn wrap<T: Real>(v: T) -> T {
    let r = v - v.floor();
    if r >= T::one() {
        r - T::one()
    } else {
        r
    }
}

/// `(x, p) ↦ S(A (x, p))` on the torus, where `S(x, p) = (x, p + s(x))`.
/// The shear acts after the linear part so the composite keeps area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct TorusMap<T> {
    linear: [[i64; 2]; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shear: Option<Shear<T>>,
}

impl<T: Real> TorusMap<T> {
    pub fn linear(a: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(a, None)
    }

    pub fn cat() -> Self {
        Self { linear: [[2, 1], [1, 1]], shear: None }
    }

    pub fn new(a: [[i64; 2]; 2], shear: Option<Shear<T>>) -> Result<Self> {
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det != 1 {
            return Err(Error::invalid(format!("det A = {det}, need 1")));
        }
        let tr = a[0][0] + a[1][1];
        if tr.abs() <= 2 {
            return Err(Error::invalid(format!("|trace A| = {} is not hyperbolic", tr.abs())));
        }
        if let Some(s) = &shear {
            if !(s.kappa >= T::zero()) {
                return Err(Error::invalid("shear amplitude must be nonnegative"));
            }
            if s.slope_bound() > T::lit(ANOSOV_SHEAR_LIMIT) {
                return Err(Error::invalid(format!(
                    "shear slope bound {} exceeds the persistence limit {ANOSOV_SHEAR_LIMIT}",
                    s.slope_bound()
                )));
            }
        }
        let shear = shear.filter(|s| s.kappa > T::zero() && (s.cos.iter().chain(&s.sin).any(|&c| c != T::zero())));
        Ok(Self { linear: a, shear })
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.linear
    }

    pub fn shear(&self) -> Option<&Shear<T>> {
        self.shear.as_ref()
    }

    pub fn is_linear(&self) -> bool {
        self.shear.is_none()
    }

    fn a(&self) -> [[T; 2]; 2] {
        let f = |v: i64| T::lit(v as f64);
        [[f(self.linear[0][0]), f(self.linear[0][1])], [f(self.linear[1][0]), f(self.linear[1][1])]]
    }

    /// Largest eigenvalue of `A` in modulus.
    pub fn lambda_max(&self) -> T {
        let tr = T::lit((self.linear[0][0] + self.linear[1][1]).abs() as f64);
        (tr + (tr * tr - T::lit(4.0)).sqrt()) / T::lit(2.0)
    }

    /// Unit eigenvector of `A` for the eigenvalue of modulus `λ_max`.
    pub fn linear_unstable_direction(&self) -> [T; 2] {
        let a = self.a();
        let tr = a[0][0] + a[1][1];
        let mu = tr.signum() * self.lambda_max();
        // (A - μ)v = 0 using whichever row is better conditioned
        let v = if a[0][1].abs() >= a[1][0].abs() { [a[0][1], mu - a[0][0]] } else { [mu - a[1][1], a[1][0]] };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }

    pub fn step(&self, z: [T; 2]) -> [T; 2] {
        let a = self.a();
        let x = a[0][0] * z[0] + a[0][1] * z[1];
        let mut p = a[1][0] * z[0] + a[1][1] * z[1];
        let x = wrap(x);
        if let Some(s) = &self.shear {
            p += s.eval(x);
        }
        [x, wrap(p)]
    }

    pub fn inverse_step(&self, z: [T; 2]) -> [T; 2] {
        let a = self.a();
        let p = match &self.shear {
            Some(s) => z[1] - s.eval(z[0]),
            None => z[1],
        };
        [wrap(a[1][1] * z[0] - a[0][1] * p), wrap(a[0][0] * p - a[1][0] * z[0])]
    }

    pub fn iterate(&self, z: [T; 2], t: usize) -> [T; 2] {
        (0..t).fold(z, |z, _| self.step(z))
    }

    /// `Dg(z)`.
    pub fn jacobian(&self, z: [T; 2]) -> [[T; 2]; 2] {
        let a = self.a();
        let k = match &self.shear {
            Some(s) => s.derivative(wrap(a[0][0] * z[0] + a[0][1] * z[1])),
            None => T::zero(),
        };
        [[a[0][0], a[0][1]], [a[1][0] + k * a[0][0], a[1][1] + k * a[0][1]]]
    }

    /// Unit vector spanning `E^u(z)`: the unstable direction of `A` pushed
    /// forward from `g^{-m}(z)`.
    pub fn unstable_direction(&self, z: [T; 2]) -> [T; 2] {
        let v = self.linear_unstable_direction();
        if self.is_linear() {
            return v;
        }
        let mut back = Vec::with_capacity(UNSTABLE_RELAXATION_STEPS);
        let mut w = z;
        for _ in 0..UNSTABLE_RELAXATION_STEPS {
            w = self.inverse_step(w);
            back.push(w);
        }
        back.iter().rev().fold(v, |v, &p| normalise(apply(self.jacobian(p), v)))
    }

    /// One-step `log J^u(z) = -log |Dg(z) v|` for unit `v ∈ E^u(z)`.
    pub fn log_unstable_jacobian(&self, z: [T; 2]) -> T {
        if self.is_linear() {
            return -self.lambda_max().ln();
        }
        let v = self.unstable_direction(z);
        let w = apply(self.jacobian(z), v);
        -w[0].hypot(w[1]).ln()
    }

    /// `log J^u_t(z) = -log |Dg^t(z) v|`, from the full matrix product.
    pub fn log_unstable_jacobian_t(&self, z: [T; 2], t: usize) -> T {
        let v = self.unstable_direction(z);
        let mut m = [[T::one(), T::zero()], [T::zero(), T::one()]];
        let mut p = z;
        for _ in 0..t {
            m = matmul(self.jacobian(p), m);
            p = self.step(p);
        }
        let w = apply(m, v);
        -w[0].hypot(w[1]).ln()
    }
}

fn apply<T: Real>(m: [[T; 2]; 2], v: [T; 2]) -> [T; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn matmul<T: Real>(a: [[T; 2]; 2], b: [[T; 2]; 2]) -> [[T; 2]; 2] {
    let mut c = [[T::zero(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn normalise<T: Real>(v: [T; 2]) -> [T; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Largest Lyapunov exponent at `z`. Linear maps take the analytic value
/// `log λ_max`; perturbed maps use the tangent cocycle over `t` steps,
/// renormalised every step.
pub fn lyapunov_exponent<T: Real>(map: &TorusMap<T>, z: [T; 2], t: usize) -> Result<T> {
    if t == 0 {
        return Err(Error::pre("T must be at least 1"));
    }
    if map.is_linear() {
        return Ok(map.lambda_max().ln());
    }
    let mut v = map.linear_unstable_direction();
    let mut p = z;
    let mut sum = T::zero();
    for _ in 0..t {
        let w = apply(map.jacobian(p), v);
        let n = w[0].hypot(w[1]);
        sum += n.ln();
        v = [w[0] / n, w[1] / n];
        p = map.step(p);
    }
    Ok(sum / T::from_usize_lossy(t))
}
