use serde::{Deserialize, Serialize};

use super::map::{wrap, TorusMap};
use crate::symbolic::{Symbol, SymbolWord};
use crate::{Error, Real, Result};

/// Distance to a cell boundary below which an itinerary is refused.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// Grid points `j/N` this close to a strip boundary are snapped onto it, so
/// that they land in the cell to the right as the half-open convention says.
const GRID_SNAP: f64 = 1e-9;

/// Axis-aligned rectangle `[x0, x1) × [p0, p1)` inside the unit square.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub p0: T,
    pub p1: T,
}

impl<T: Real> Rect<T> {
    fn contains(&self, z: [T; 2]) -> bool {
        z[0] >= self.x0 && z[0] < self.x1 && z[1] >= self.p0 && z[1] < self.p1
    }

    fn boundary_distance(&self, z: [T; 2]) -> T {
        let d = |v: T, e: T| {
            let r = (v - e).abs();
            r.min(T::one() - r)
        };
        d(z[0], self.x0).min(d(z[0], self.x1)).min(d(z[1], self.p0)).min(d(z[1], self.p1))
    }

    fn area(&self) -> T {
        (self.x1 - self.x0) * (self.p1 - self.p0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub enum TorusPartition<T> {
    /// Cell `i` is the strip `x ∈ [offset + i/k, offset + (i+1)/k)` mod 1.
    Strips { k: usize, offset: T },
    Rectangles { cells: Vec<Rect<T>> },
}

impl<T: Real> TorusPartition<T> {
    pub fn strips(k: usize) -> Result<Self> {
        Self::strips_with_offset(k, T::zero())
    }

    pub fn strips_with_offset(k: usize, offset: T) -> Result<Self> {
        if k == 0 || k > Symbol::MAX as usize {
            return Err(Error::invalid("strip count must be in 1..=65535"));
        }
        if !offset.is_finite() {
            return Err(Error::invalid("offset must be finite"));
        }
        Ok(Self::Strips { k, offset })
    }

    /// Rectangles must be disjoint and tile the unit square.
    pub fn rectangles(cells: Vec<Rect<T>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::invalid("partition needs at least one cell"));
        }
        let tol = T::tolerance(1e-12);
        for (i, c) in cells.iter().enumerate() {
            let inside = |v: T| v >= T::zero() && v <= T::one();
            if !(inside(c.x0) && inside(c.x1) && inside(c.p0) && inside(c.p1) && c.x0 < c.x1 && c.p0 < c.p1) {
                return Err(Error::invalid(format!("cell {i} is not a nonempty rectangle in the unit square")));
            }
            for (j, d) in cells.iter().enumerate().skip(i + 1) {
                let overlap = (c.x1.min(d.x1) - c.x0.max(d.x0)).max(T::zero()) * (c.p1.min(d.p1) - c.p0.max(d.p0)).max(T::zero());
                if overlap > tol {
                    return Err(Error::invalid(format!("cells {i} and {j} overlap")));
                }
            }
        }
        let area: T = cells.iter().map(Rect::area).sum();
        if (area - T::one()).abs() > tol {
            return Err(Error::invalid(format!("cells cover area {area}, not 1")));
        }
        Ok(Self::Rectangles { cells })
    }

    pub fn size(&self) -> usize {
        match self {
            Self::Strips { k, .. } => *k,
            Self::Rectangles { cells } => cells.len(),
        }
    }

    pub fn is_strips(&self) -> bool {
        matches!(self, Self::Strips { .. })
    }

    /// Cell containing `z`, or `None` within `tol` of a boundary.
    pub fn cell_checked(&self, z: [T; 2], tol: T) -> Option<usize> {
        match self {
            Self::Strips { k, offset } => {
                let u = wrap(z[0] - *offset) * T::from_usize_lossy(*k);
                let d = (u - u.round()).abs() / T::from_usize_lossy(*k);
                if d < tol {
                    return None;
                }
                Some(u.floor().to_usize().unwrap_or(0).min(k - 1))
            }
            Self::Rectangles { cells } => {
                let z = [wrap(z[0]), wrap(z[1])];
                let i = cells.iter().position(|c| c.contains(z))?;
                (cells[i].boundary_distance(z) >= tol).then_some(i)
            }
        }
    }

    /// Cell containing `z` under the half-open convention, boundaries
    /// included.
    pub fn cell(&self, z: [T; 2]) -> usize {
        match self {
            Self::Strips { .. } => self.cell_of_position(z[0]),
            Self::Rectangles { cells } => {
                let z = [wrap(z[0]), wrap(z[1])];
                cells.iter().position(|c| c.contains(z)).unwrap_or(0)
            }
        }
    }

    /// Strip index of the position `x`, with positions within `1e-9·(1/k)`
    /// of a boundary assigned to the right-hand strip. Rectangles answer
    /// for `p = 0`.
    pub fn cell_of_position(&self, x: T) -> usize {
        match self {
            Self::Strips { k, offset } => {
                let kf = T::from_usize_lossy(*k);
                let mut u = wrap(x - *offset) * kf;
                if (u - u.round()).abs() < T::lit(GRID_SNAP) {
                    u = u.round();
                }
                u.floor().to_usize().unwrap_or(0) % k
            }
            Self::Rectangles { .. } => self.cell([x, T::zero()]),
        }
    }

    /// Position interval `[lo, hi)` of a strip, before reduction mod 1.
    pub fn strip_interval(&self, i: usize) -> Option<(T, T)> {
        match self {
            Self::Strips { k, offset } if i < *k => {
                let kf = T::from_usize_lossy(*k);
                Some((*offset + T::from_usize_lossy(i) / kf, *offset + T::from_usize_lossy(i + 1) / kf))
            }
            _ => None,
        }
    }

    /// Position extent covered by cell `i`, before reduction mod 1.
    pub fn position_interval(&self, i: usize) -> Option<(T, T)> {
        match self {
            Self::Strips { .. } => self.strip_interval(i),
            Self::Rectangles { cells } => cells.get(i).map(|c| (c.x0, c.x1)),
        }
    }
}

/// `n`-letter itinerary of `z`: letter `t` is the cell of `g^t z`.
pub fn itinerary<T: Real>(map: &TorusMap<T>, partition: &TorusPartition<T>, z: [T; 2], n: usize) -> Result<SymbolWord> {
    let tol = T::lit(BOUNDARY_TOLERANCE);
    let mut letters = Vec::with_capacity(n);
    let mut p = z;
    for t in 0..n {
        match partition.cell_checked(p, tol) {
            Some(c) => letters.push(c as Symbol),
            None => return Err(Error::BoundaryHit { time: t, point: [p[0].to_f64_lossy(), p[1].to_f64_lossy()] }),
        }
        p = map.step(p);
    }
    Ok(SymbolWord::from_letters(letters))
}
