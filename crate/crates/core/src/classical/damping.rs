use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::map::wrap;
use super::partition::TorusPartition;
use crate::{Error, Real, Result};

/// Magic bytes opening a damping grid file.
pub const GRID_MAGIC: &[u8; 8] = b"PLVGRID1";

/// Resolution used to check nonnegativity of closed-form profiles.
const CHECK_POINTS: usize = 4096;

/// Values at or below this count as "V vanishes here".
pub const ZERO_THRESHOLD: f64 = 1e-14;

/// Damping `V(x) ≥ 0`, a function of position only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub enum DampingProfile<T> {
    /// `V(x) = c₀ + Σ_m a_m cos(2π m x) + b_m sin(2π m x)`, `m ≥ 1`.
    Trig {
        constant: T,
        #[serde(default)]
        cos: Vec<T>,
        #[serde(default)]
        sin: Vec<T>,
    },
    /// Samples `V(j/n)`, piecewise constant in between.
    Grid { values: Vec<T> },
    /// One value per strip.
    Cells { partition: TorusPartition<T>, values: Vec<T> },
}

impl<T: Real> DampingProfile<T> {
    pub fn zero() -> Self {
        Self::Trig { constant: T::zero(), cos: Vec::new(), sin: Vec::new() }
    }

    pub fn constant(v: T) -> Result<Self> {
        Self::trig(v, Vec::new(), Vec::new())
    }

    pub fn trig(constant: T, cos: Vec<T>, sin: Vec<T>) -> Result<Self> {
        let v = Self::Trig { constant, cos, sin };
        v.validate()?;
        Ok(v)
    }

    pub fn grid(values: Vec<T>) -> Result<Self> {
        let v = Self::Grid { values };
        v.validate()?;
        Ok(v)
    }

    pub fn cells(partition: TorusPartition<T>, values: Vec<T>) -> Result<Self> {
        let v = Self::Cells { partition, values };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |v: &T| !(v.is_finite() && *v >= T::zero());
        match self {
            Self::Trig { constant, cos, sin } => {
                if !constant.is_finite() || cos.iter().chain(sin).any(|c| !c.is_finite()) {
                    return Err(Error::invalid("damping coefficients must be finite"));
                }
                let min = (0..CHECK_POINTS)
                    .map(|j| trig_value(*constant, cos, sin, T::from_usize_lossy(j) / T::from_usize_lossy(CHECK_POINTS)))
                    .fold(T::infinity(), T::min);
                if min < -T::tolerance(1e-12) {
                    return Err(Error::invalid(format!("damping takes the negative value {min}")));
                }
            }
            Self::Grid { values } => {
                if values.is_empty() {
                    return Err(Error::invalid("damping grid is empty"));
                }
                if let Some(i) = values.iter().position(bad) {
                    return Err(Error::invalid(format!("damping grid value {i} is {}", values[i])));
                }
            }
            Self::Cells { partition, values } => {
                if !partition.is_strips() {
                    return Err(Error::invalid("cell damping needs a strip partition"));
                }
                if values.len() != partition.size() {
                    return Err(Error::invalid(format!("{} cell values for {} cells", values.len(), partition.size())));
                }
                if let Some(i) = values.iter().position(bad) {
                    return Err(Error::invalid(format!("damping value on cell {i} is {}", values[i])));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            // roundoff can push a touching zero slightly negative
            Self::Trig { constant, cos, sin } => trig_value(*constant, cos, sin, x).max(T::zero()),
            Self::Grid { values } => {
                let n = T::from_usize_lossy(values.len());
                let mut u = wrap(x) * n;
                if (u - u.round()).abs() < T::lit(1e-9) {
                    u = u.round();
                }
                values[u.floor().to_usize().unwrap_or(0) % values.len()]
            }
            Self::Cells { partition, values } => values[partition.cell_of_position(x)],
        }
    }

    /// `V(j/n)` for `j = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<T> {
        (0..n).map(|j| self.eval(T::from_usize_lossy(j) / T::from_usize_lossy(n))).collect()
    }

    pub fn is_strictly_positive(&self, resolution: usize) -> bool {
        self.sample(resolution).iter().all(|&v| v > T::lit(ZERO_THRESHOLD))
    }

    /// Whether a sampled value in `[lo, hi)` vanishes. Closed-form profiles
    /// are probed at `resolution` points of the interval; grid and cell
    /// profiles are read exactly.
    pub fn vanishes_on(&self, lo: T, hi: T, resolution: usize) -> bool {
        let zero = T::lit(ZERO_THRESHOLD);
        match self {
            Self::Cells { values, partition } => {
                let mid = (lo + hi) / T::lit(2.0);
                values[partition.cell_of_position(mid)] <= zero
            }
            Self::Grid { values } => {
                let n = values.len();
                let nf = T::from_usize_lossy(n);
                let start = (lo * nf).ceil().to_i64().unwrap_or(0);
                let end = (hi * nf).ceil().to_i64().unwrap_or(0);
                (start..end).any(|j| values[j.rem_euclid(n as i64) as usize] <= zero)
            }
            Self::Trig { .. } => {
                let r = resolution.max(2);
                (0..=r).any(|i| {
                    let x = lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(r);
                    x < hi && self.eval(x) <= zero
                })
            }
        }
    }
}

fn trig_value<T: Real>(constant: T, cos: &[T], sin: &[T], x: T) -> T {
    let tau = T::TAU();
    let mut v = constant;
    for (m, &c) in cos.iter().enumerate() {
        v += c * (tau * T::from_usize_lossy(m + 1) * x).cos();
    }
    for (m, &c) in sin.iter().enumerate() {
        v += c * (tau * T::from_usize_lossy(m + 1) * x).sin();
    }
    v
}

impl DampingProfile<f64> {
    /// Grid file: 8 magic bytes, `n` as little-endian u64, then `n`
    /// little-endian f64 values.
    pub fn write_grid<W: Write>(values: &[f64], mut out: W) -> Result<()> {
        out.write_all(GRID_MAGIC)?;
        out.write_all(&(values.len() as u64).to_le_bytes())?;
        for v in values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_grid<R: Read>(mut input: R) -> Result<Self> {
        let mut head = [0u8; 16];
        input.read_exact(&mut head)?;
        if &head[..8] != GRID_MAGIC {
            return Err(Error::invalid("not a damping grid file (bad magic)"));
        }
        let n = u64::from_le_bytes(head[8..].try_into().expect("8 bytes")) as usize;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != 8 * n {
            return Err(Error::invalid(format!("grid header says {n} values, file holds {} bytes", body.len())));
        }
        let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Self::grid(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_rejects_negative() {
        assert!(DampingProfile::trig(0.5, vec![1.0], vec![]).is_err());
        let v = DampingProfile::<f64>::trig(1.0, vec![1.0], vec![]).unwrap();
        assert!((v.eval(0.0) - 2.0).abs() < 1e-15);
        assert!(v.eval(0.5).abs() < 1e-15);
        assert!(v.vanishes_on(0.45, 0.55, 10));
        assert!(!v.vanishes_on(0.0, 0.3, 100));
    }

    #[test]
    fn cells_and_grid() {
        let part = TorusPartition::strips_with_offset(8, -1.0 / 16.0).unwrap();
        let mut vals = vec![1.0; 8];
        vals[0] = 0.0;
        let v = DampingProfile::cells(part.clone(), vals).unwrap();
        assert_eq!(v.eval(0.0), 0.0);
        assert_eq!(v.eval(0.99), 0.0);
        assert_eq!(v.eval(0.1), 1.0);
        assert!(v.vanishes_on(-1.0 / 16.0, 1.0 / 16.0, 1));
        assert!(DampingProfile::cells(part, vec![1.0; 3]).is_err());

        let g = DampingProfile::grid(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.sample(4), vec![0.0, 1.0, 2.0, 3.0]);
        assert!(g.vanishes_on(-0.1, 0.1, 1));
        assert!(!g.vanishes_on(0.1, 0.9, 1));
        assert!(DampingProfile::grid(vec![-1.0]).is_err());
    }

    #[test]
    fn grid_file_round_trip() {
        let vals = vec![0.0, 0.25, 1.5, f64::MIN_POSITIVE];
        let mut buf = Vec::new();
        DampingProfile::write_grid(&vals, &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * vals.len());
        let back = DampingProfile::read_grid(buf.as_slice()).unwrap();
        assert_eq!(back, DampingProfile::Grid { values: vals });
        buf[0] = b'X';
        assert!(DampingProfile::read_grid(buf.as_slice()).is_err());
    }
}
