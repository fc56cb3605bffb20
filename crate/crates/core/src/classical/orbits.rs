use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::map::TorusMap;
use crate::thermo::OrbitSampler;
use crate::Real;

/// Lebesgue-distributed points on the torus with the flat metric
/// `max(|Δx|, |Δp|)` (both differences taken mod 1).
pub struct TorusSampler<T> {
    map: TorusMap<T>,
}

impl<T: Real> TorusSampler<T> {
    pub fn new(map: TorusMap<T>) -> Self {
        Self { map }
    }

    fn grid(eps: T) -> i64 {
        (T::one() / eps).floor().to_i64().unwrap_or(1).max(1)
    }

    fn coords(p: &[T; 2], m: i64) -> (i64, i64) {
        let mf = T::lit(m as f64);
        let c = |v: T| ((v * mf).floor().to_i64().unwrap_or(0)).rem_euclid(m);
        (c(p[0]), c(p[1]))
    }
}

impl<T: Real> OrbitSampler<T> for TorusSampler<T> {
    type Point = [T; 2];

    fn sample(&self, rng: &mut ChaCha8Rng) -> [T; 2] {
        [T::lit(rng.random::<f64>()), T::lit(rng.random::<f64>())]
    }

    fn step(&self, p: &[T; 2]) -> [T; 2] {
        self.map.step(*p)
    }

    fn distance(&self, a: &[T; 2], b: &[T; 2]) -> T {
        let d = |u: T, v: T| {
            let r = (u - v).abs();
            r.min(T::one() - r)
        };
        d(a[0], b[0]).max(d(a[1], b[1]))
    }

    fn cell(&self, p: &[T; 2], eps: T) -> Option<u64> {
        let m = Self::grid(eps);
        let (i, j) = Self::coords(p, m);
        Some((i * m + j) as u64)
    }

    fn neighbour_cells(&self, p: &[T; 2], eps: T) -> Vec<u64> {
        // cells have side 1/m ≥ eps, so neighbours within eps are adjacent
        let m = Self::grid(eps);
        let (i, j) = Self::coords(p, m);
        let mut keys: Vec<u64> = (-1..=1)
            .flat_map(|di| (-1..=1).map(move |dj| ((i + di).rem_euclid(m) * m + (j + dj).rem_euclid(m)) as u64))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::separated_set_growth;

    #[test]
    fn cat_growth_near_log_lambda() {
        let s = TorusSampler::new(TorusMap::<f64>::cat());
        let g = separated_set_growth(&s, 0.1, &[2, 3, 4, 5], 60_000, 3).unwrap();
        assert!((g.slope - 0.962_423_65).abs() < 0.15, "{g:?}");
    }
}
