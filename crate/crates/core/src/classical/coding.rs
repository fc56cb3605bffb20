use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::damping::DampingProfile;
use super::map::TorusMap;
use super::partition::{TorusPartition, BOUNDARY_TOLERANCE};
use crate::scalar::LogSumExp;
use crate::symbolic::{Alphabet, Symbol, SymbolWord, WeightTable, DEFAULT_FLOOR_LOG};
use crate::thermo::Potential;
use crate::{Error, Real, Result};

/// Sub-cell shift of sampling grids, so grid points avoid the rational
/// boundaries partitions are usually built from.
const GRID_SHIFT: [f64; 2] = [0.5 + 0.123_456_789_1, 0.5 - 0.271_828_182_8];

fn grid_point<T: Real>(i: usize, j: usize, r: usize) -> [T; 2] {
    let rf = r as f64;
    let x = ((i as f64 + GRID_SHIFT[0]) / rf).fract();
    let p = ((j as f64 + GRID_SHIFT[1]) / rf).fract();
    [T::lit(x), T::lit(p)]
}

/// Realised transitions `M_a ∩ g^{-1} M_b ≠ ∅` together with the sampled
/// supremum of the one-step `log J^u` on each, from a `resolution²` grid.
fn sampled_transitions<T: Real>(map: &TorusMap<T>, partition: &TorusPartition<T>, resolution: usize) -> Vec<Option<T>> {
    let k = partition.size();
    let tol = T::lit(BOUNDARY_TOLERANCE);
    (0..resolution)
        .into_par_iter()
        .map(|i| {
            let mut sup: Vec<Option<T>> = vec![None; k * k];
            for j in 0..resolution {
                let z = grid_point::<T>(i, j, resolution);
                let (Some(a), Some(b)) = (partition.cell_checked(z, tol), partition.cell_checked(map.step(z), tol)) else {
                    continue;
                };
                let lj = map.log_unstable_jacobian(z);
                let e = &mut sup[a * k + b];
                *e = Some(e.map_or(lj, |v: T| v.max(lj)));
            }
            sup
        })
        .reduce(
            || vec![None; k * k],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    *a = match (*a, b) {
                        (Some(u), Some(v)) => Some(u.max(v)),
                        (u, v) => u.or(v),
                    };
                }
                x
            },
        )
}

/// Transition support of the coding, sampled on a `resolution²` grid.
pub fn realized_transitions<T: Real>(map: &TorusMap<T>, partition: &TorusPartition<T>, resolution: usize) -> Vec<bool> {
    sampled_transitions(map, partition, resolution).iter().map(Option::is_some).collect()
}

/// `log J^u(a, b)`: the supremum of the one-step unstable Jacobian over
/// `M_a ∩ g^{-1} M_b`, or `floor_log` when no sample lands there. Linear
/// maps give the constant `-log λ_max` on every realised pair. The cap is
/// `0` since `J^u ≤ 1` on an expanding direction.
pub fn weight_table_from_map<T: Real>(
    map: &TorusMap<T>,
    partition: &TorusPartition<T>,
    resolution: usize,
    floor_log: Option<T>,
) -> Result<WeightTable<T>> {
    if resolution == 0 {
        return Err(Error::pre("need at least one sample per axis"));
    }
    let floor = floor_log.unwrap_or(T::lit(DEFAULT_FLOOR_LOG));
    let k = partition.size();
    let sup = sampled_transitions(map, partition, resolution);
    let log_j: Vec<T> = sup
        .iter()
        .map(|s| match s {
            Some(_) if map.is_linear() => -map.lambda_max().ln(),
            Some(v) => v.max(floor),
            None => floor,
        })
        .collect();
    let cap = log_j.iter().copied().fold(T::zero(), T::max);
    WeightTable::new(k, log_j, floor, cap)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UndampedPressure<T> {
    /// `(1/n) log Σ J^u_n(α)^{1/2}` over surviving words; `-inf` when none
    /// survive.
    pub value: T,
    pub depth: usize,
    /// Cells on which `V` has a sampled zero.
    pub undamped_cells: Vec<usize>,
    pub surviving_words: f64,
}

/// Finite-depth upper estimate of the pressure of the undamped set for
/// `½ log J^u`. A word survives when each letter is a cell where `V`
/// vanishes somewhere and each transition is realised by the map. The sum
/// is accumulated by dynamic programming over the last letter, so no
/// enumeration cap applies.
///
/// The estimate concerns the set of orbits that never see `V > 0`; the
/// weakly undamped set (supports of invariant measures with `∫V = 0`) may be
/// larger in general and is not targeted.
pub fn undamped_pressure<T: Real>(
    map: &TorusMap<T>,
    partition: &TorusPartition<T>,
    v: &DampingProfile<T>,
    n: usize,
    resolution: usize,
) -> Result<UndampedPressure<T>> {
    if n < 2 {
        return Err(Error::pre("undamped pressure needs depth n >= 2"));
    }
    let table = weight_table_from_map(map, partition, resolution, None)?;
    let realized = realized_transitions(map, partition, resolution);
    let k = partition.size();
    let undamped: Vec<usize> = (0..k)
        .filter(|&i| {
            let (lo, hi) = partition.position_interval(i).expect("cell index in range");
            v.vanishes_on(lo, hi, resolution)
        })
        .collect();
    let alive: Vec<bool> = (0..k).map(|i| undamped.contains(&i)).collect();
    let half = T::lit(0.5);
    let mut logw: Vec<T> = (0..k).map(|i| if alive[i] { T::zero() } else { T::neg_infinity() }).collect();
    let mut count: Vec<f64> = alive.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
    for _ in 1..n {
        let mut next = vec![T::neg_infinity(); k];
        let mut next_count = vec![0.0; k];
        for b in (0..k).filter(|&b| alive[b]) {
            let mut acc = LogSumExp::default();
            for a in (0..k).filter(|&a| alive[a] && realized[a * k + b]) {
                acc.push(logw[a] + half * table.log_j(a as Symbol, b as Symbol));
                next_count[b] += count[a];
            }
            next[b] = acc.value();
        }
        logw = next;
        count = next_count;
    }
    let total = crate::scalar::log_sum_exp(logw.iter().copied());
    Ok(UndampedPressure {
        value: if total.is_finite() { total / T::from_usize_lossy(n) } else { T::neg_infinity() },
        depth: n,
        undamped_cells: undamped,
        surviving_words: count.iter().sum(),
    })
}

/// Edge shift of a nonnegative integer matrix `A`: one symbol per edge of
/// the multigraph with `A[i][j]` edges `i → j`, and `e → f` allowed when
/// `e` ends where `f` starts. It is a Markov coding of the toral
/// automorphism with transition spectral radius `λ_max`, so the constant
/// potential `-log λ_max` is its unstable Jacobian.
#[derive(Clone, Debug)]
pub struct EdgeShift<T> {
    pub alphabet: Alphabet,
    /// `(source, target)` of every symbol.
    pub edges: Vec<(usize, usize)>,
    pub log_ju: Potential<T>,
}

pub fn edge_shift_coding<T: Real>(map: &TorusMap<T>) -> Result<EdgeShift<T>> {
    let a = map.matrix();
    if a.iter().flatten().any(|&v| v < 0) {
        return Err(Error::invalid("edge-shift coding needs a nonnegative matrix"));
    }
    let mut edges = Vec::new();
    for (i, row) in a.iter().enumerate() {
        for (j, &m) in row.iter().enumerate() {
            edges.extend(std::iter::repeat_n((i, j), m as usize));
        }
    }
    let e = edges.len();
    let adj: Vec<bool> = (0..e * e).map(|x| edges[x / e].1 == edges[x % e].0).collect();
    let alphabet = Alphabet::from_flat(e, adj)?;
    Ok(EdgeShift { alphabet, edges, log_ju: Potential::constant(e, -map.lambda_max().ln()) })
}

/// Lebesgue measure of every realised `n`-cylinder
/// `M_{α₀} ∩ g^{-1} M_{α₁} ∩ … ∩ g^{-(n-1)} M_{α_{n-1}}`, from a shifted
/// `resolution²` grid. Grid points whose orbit passes within the boundary
/// tolerance of a cell edge are dropped and the rest renormalised.
pub fn cylinder_areas<T: Real>(
    map: &TorusMap<T>,
    partition: &TorusPartition<T>,
    n: usize,
    resolution: usize,
) -> Result<BTreeMap<SymbolWord, T>> {
    if n == 0 || resolution == 0 {
        return Err(Error::pre("need n >= 1 and a nonempty grid"));
    }
    let tol = T::lit(BOUNDARY_TOLERANCE);
    let counts = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let mut local: BTreeMap<Vec<Symbol>, u64> = BTreeMap::new();
            let mut word = Vec::with_capacity(n);
            'points: for j in 0..resolution {
                word.clear();
                let mut z = grid_point::<T>(i, j, resolution);
                for _ in 0..n {
                    match partition.cell_checked(z, tol) {
                        Some(c) => word.push(c as Symbol),
                        None => continue 'points,
                    }
                    z = map.step(z);
                }
                *local.entry(word.clone()).or_default() += 1;
            }
            local
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (w, c) in b {
                *a.entry(w).or_default() += c;
            }
            a
        });
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::pre("every grid point hit a boundary"));
    }
    Ok(counts
        .into_iter()
        .map(|(w, c)| (SymbolWord::from_letters(w), T::lit(c as f64 / total as f64)))
        .collect())
}
