use std::io::Write;

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::Serialize;

use super::cylinder::{family_functionals, family_mass, PartitionOperators};
use super::propagator::{damped_propagator, spectrum, DampedPropagator, EigenmodeRecord};
use super::quantize::quantize;
use crate::classical::{DampingProfile, TorusMap};
use crate::symbolic::{sigma_p_tau, Alphabet, CylinderFamily, DEFAULT_ENUMERATION_CAP};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub gamma_min: f64,
    #[serde(rename = "gamma_min_log_N")]
    pub gamma_min_log_n: f64,
}

impl GapRow {
    pub fn from_spectrum(n: usize, modes: &[EigenmodeRecord]) -> Self {
        let gamma_min = modes.iter().map(|m| m.decay_rate).fold(f64::INFINITY, f64::min);
        Self { n, gamma_min, gamma_min_log_n: gamma_min * (n as f64).ln() }
    }
}

/// Damped cat-map propagator and its spectrum at dimension `n`.
pub fn damped_spectrum(map: &TorusMap<f64>, v: &DampingProfile<f64>, n: usize) -> Result<(DampedPropagator, Vec<EigenmodeRecord>)> {
    let prop = damped_propagator(quantize(map, n)?, v)?;
    let modes = spectrum(&prop)?;
    Ok((prop, modes))
}

/// `min_i γ_i` and `γ_min log N` for each `N`.
pub fn gap_scan(map: &TorusMap<f64>, v: &DampingProfile<f64>, dims: &[usize]) -> Result<Vec<GapRow>> {
    dims.iter().map(|&n| damped_spectrum(map, v, n).map(|(_, s)| GapRow::from_spectrum(n, &s))).collect()
}

/// Modes with `γ ≤ C / log N`.
pub fn slow_modes(modes: &[EigenmodeRecord], n: usize, c_window: f64) -> impl Iterator<Item = &EigenmodeRecord> {
    let cut = c_window / (n as f64).ln();
    modes.iter().filter(move |m| m.decay_rate <= cut)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub eigenmode_id: usize,
    pub decay_rate: f64,
    pub mass_on_sigma: f64,
    pub mass_on_w: f64,
}

/// Family data shared across a mass scan.
#[derive(Clone, Debug)]
pub struct MassScanFamilies {
    pub w: CylinderFamily,
    pub sigma: CylinderFamily,
    pub tau: f64,
}

impl MassScanFamilies {
    pub fn new(w: CylinderFamily, tau: f64, n: usize, alphabet: &Alphabet) -> Result<Self> {
        let sigma = sigma_p_tau(&w, tau, n, alphabet, DEFAULT_ENUMERATION_CAP)?;
        Ok(Self { w, sigma, tau })
    }
}

/// `Re Σ_{α∈W} μ(α)` and `Re Σ_{α∈Σ_n(W,τ)} μ(α)` for every mode in the
/// window `γ ≤ C / log N`.
pub fn mass_scan(
    families: &MassScanFamilies,
    props: &PartitionOperators,
    prop: &DampedPropagator,
    modes: &[EigenmodeRecord],
    c_window: f64,
) -> Result<Vec<MassRow>> {
    let n = prop.dim();
    let selected: Vec<&EigenmodeRecord> = slow_modes(modes, n, c_window).collect();
    selected
        .par_iter()
        .map(|m| {
            Ok(MassRow {
                n,
                eigenmode_id: m.id,
                decay_rate: m.decay_rate,
                mass_on_sigma: family_mass(&m.vector, &families.sigma, props, prop)?.re,
                mass_on_w: family_mass(&m.vector, &families.w, props, prop)?.re,
            })
        })
        .collect()
}

/// Mean of `Re μ(α)` over `modes`, for every word of `family`.
pub fn mode_average(
    family: &CylinderFamily,
    props: &PartitionOperators,
    prop: &DampedPropagator,
    modes: &[EigenmodeRecord],
) -> Result<Vec<f64>> {
    let per_mode: Vec<Vec<c64>> = modes
        .par_iter()
        .map(|m| family_functionals(&m.vector, family, props, prop))
        .collect::<Result<_>>()?;
    let count = modes.len().max(1) as f64;
    Ok((0..family.len()).map(|i| per_mode.iter().map(|v| v[i].re).sum::<f64>() / count).collect())
}

/// `(1/N) tr Π_α` for each word, summing `⟨Π_α e_j, e_j⟩` over the
/// position basis. For normal `M` this equals the average of `μ(α)` over
/// an orthonormal eigenbasis.
pub fn cylinder_traces(family: &CylinderFamily, props: &PartitionOperators, prop: &DampedPropagator) -> Result<Vec<f64>> {
    let n = prop.dim();
    let basis = |j: usize| -> Vec<c64> { (0..n).map(|i| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }).collect() };
    let per_column: Vec<Vec<c64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let e = basis(j);
            family_functionals(&e, family, props, prop)
        })
        .collect::<Result<_>>()?;
    Ok((0..family.len()).map(|i| per_column.iter().map(|v| v[i].re).sum::<f64>() / n as f64).collect())
}

/// Magic bytes of a matrix dump.
pub const MATRIX_MAGIC: &[u8; 8] = b"PLMATRX1";

/// What a matrix dump holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum MatrixKind {
    Unitary = 1,
    Propagator = 2,
    Cylinder = 3,
    Eigenvectors = 4,
}

/// Writes `m` as 8 magic bytes, `N` and `kind` as little-endian u64, then
/// `N²` complex128 entries (re, im little-endian f64) in row-major order.
pub fn write_matrix<W: Write>(m: &Mat<c64>, kind: MatrixKind, mut out: W) -> Result<()> {
    let n = m.nrows();
    out.write_all(MATRIX_MAGIC)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(kind as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * n * m.ncols());
    for i in 0..n {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

/// Inverse of [`write_matrix`]; returns the kind code and the matrix.
pub fn read_matrix(bytes: &[u8]) -> Result<(u64, Mat<c64>)> {
    use crate::Error;
    if bytes.len() < 24 || &bytes[..8] != MATRIX_MAGIC {
        return Err(Error::invalid("not a matrix dump"));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let kind = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let body = &bytes[24..];
    if body.len() != 16 * n * n {
        return Err(Error::invalid(format!("dump of a {n}×{n} matrix holds {} bytes", body.len())));
    }
    let f = |o: usize| f64::from_le_bytes(body[o..o + 8].try_into().expect("8 bytes"));
    Ok((kind, Mat::from_fn(n, n, |i, j| {
        let o = 16 * (i * n + j);
        c64::new(f(o), f(o + 8))
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::TorusPartition;
    use crate::symbolic::enumerate_words;

    #[test]
    fn gcc_and_undamped_gaps() {
        let cat = TorusMap::cat();
        let rows = gap_scan(&cat, &DampingProfile::constant(0.4).unwrap(), &[16, 32]).unwrap();
        assert!(rows.iter().all(|r| r.gamma_min >= 0.4 - 1e-10));
        let rows = gap_scan(&cat, &DampingProfile::zero(), &[16, 32]).unwrap();
        assert!(rows.iter().all(|r| r.gamma_min.abs() <= 1e-10));
    }

    #[test]
    fn mass_scan_trivial_families() {
        let cat = TorusMap::cat();
        let part = TorusPartition::strips(2).unwrap();
        let v = DampingProfile::trig(0.5, vec![0.5], vec![]).unwrap();
        let (prop, modes) = damped_spectrum(&cat, &v, 32).unwrap();
        let props = PartitionOperators::new(&part, 32).unwrap();
        let alpha = Alphabet::full(2).unwrap();
        let all = CylinderFamily::from_words(2, enumerate_words(&alpha, 2, 1 << 10).unwrap()).unwrap();
        let fam = MassScanFamilies::new(all, 0.5, 4, &alpha).unwrap();
        for r in mass_scan(&fam, &props, &prop, &modes, 1e3).unwrap() {
            assert!((r.mass_on_w - 1.0).abs() < 1e-10);
            assert!((r.mass_on_sigma - 1.0).abs() < 1e-10);
        }
        let empty = MassScanFamilies::new(CylinderFamily::new(2), 0.5, 4, &alpha).unwrap();
        for r in mass_scan(&empty, &props, &prop, &modes, 1e3).unwrap() {
            assert_eq!((r.mass_on_w, r.mass_on_sigma), (0.0, 0.0));
        }
    }

    #[test]
    fn matrix_dump_round_trip() {
        let u = quantize(&TorusMap::cat(), 6).unwrap();
        let mut buf = Vec::new();
        write_matrix(&u, MatrixKind::Unitary, &mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 16 * 36);
        let (kind, back) = read_matrix(&buf).unwrap();
        assert_eq!(kind, 1);
        assert_eq!(super::super::linalg::max_abs_diff(&u, &back), 0.0);
    }
}
