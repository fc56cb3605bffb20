use serde::{Deserialize, Serialize};

use super::family::CylinderFamily;
use super::words::Symbol;
use crate::{Error, Real, Result};

/// Default `log Λ`. Deep enough that the clamp only acts on empty
/// intersections and never distorts sums over realized words.
pub const DEFAULT_FLOOR_LOG: f64 = -50.0;

/// Pairwise discrete unstable Jacobian `log J^u(a, b)` with its floor
/// `log Λ` and cap `λ₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeightTable<T>", into = "RawWeightTable<T>")]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct WeightTable<T> {
    size: usize,
    log_j: Vec<T>,
    floor_log: T,
    cap_log: T,
}

#[derive(Serialize, Deserialize)]
struct RawWeightTable<T> {
    #[serde(rename = "logJ")]
    log_j: Vec<T>,
    #[serde(rename = "floorLog")]
    floor_log: T,
    #[serde(rename = "capLog")]
    cap_log: T,
}

impl<T: Real> TryFrom<RawWeightTable<T>> for WeightTable<T> {
    type Error = Error;

    fn try_from(raw: RawWeightTable<T>) -> Result<Self> {
        let k = (raw.log_j.len() as f64).sqrt().round() as usize;
        if k * k != raw.log_j.len() {
            return Err(Error::invalid(format!("logJ has {} entries, not a square", raw.log_j.len())));
        }
        Self::new(k, raw.log_j, raw.floor_log, raw.cap_log)
    }
}

impl<T: Real> From<WeightTable<T>> for RawWeightTable<T> {
    fn from(w: WeightTable<T>) -> Self {
        Self { log_j: w.log_j, floor_log: w.floor_log, cap_log: w.cap_log }
    }
}

impl<T: Real> WeightTable<T> {
    /// `log_j` is row-major `k × k`.
    pub fn new(k: usize, log_j: Vec<T>, floor_log: T, cap_log: T) -> Result<Self> {
        if log_j.len() != k * k || k == 0 {
            return Err(Error::invalid(format!("logJ must have {} entries", k * k)));
        }
        if !cap_log.is_finite() || !floor_log.is_finite() {
            return Err(Error::invalid("floorLog and capLog must be finite"));
        }
        if let Some(bad) = log_j.iter().position(|&v| !(v >= floor_log && v <= cap_log)) {
            return Err(Error::invalid(format!(
                "logJ[{}][{}] = {} outside [floorLog, capLog] = [{floor_log}, {cap_log}]",
                bad / k,
                bad % k,
                log_j[bad]
            )));
        }
        Ok(Self { size: k, log_j, floor_log, cap_log })
    }

    /// Every pair carries `value`; the cap is `max(value, 0)`.
    pub fn constant(k: usize, value: T) -> Result<Self> {
        let floor = T::lit(DEFAULT_FLOOR_LOG).min(value);
        Self::new(k, vec![value; k * k], floor, value.max(T::zero()))
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn log_j(&self, a: Symbol, b: Symbol) -> T {
        self.log_j[a as usize * self.size + b as usize]
    }

    pub fn entries(&self) -> &[T] {
        &self.log_j
    }

    pub fn floor_log(&self) -> T {
        self.floor_log
    }

    pub fn cap_log(&self) -> T {
        self.cap_log
    }

    /// `log J^u_n(α) = Σ_i log J^u(α_i, α_{i+1})`; zero for words of
    /// length 0 or 1.
    pub fn log_weight(&self, letters: &[Symbol]) -> T {
        letters.windows(2).map(|w| self.log_j(w[0], w[1])).sum()
    }
}

/// `J^u_n(α)`, computed in log space.
pub fn word_weight<T: Real>(letters: &[Symbol], weights: &WeightTable<T>) -> T {
    weights.log_weight(letters).exp()
}

/// `Σ_{α ∈ family} J^u_{n₀}(α)^s`.
pub fn pressure_sum<T: Real>(family: &CylinderFamily, weights: &WeightTable<T>, s: T) -> T {
    family.iter().map(|w| (s * weights.log_weight(w.letters())).exp()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::SymbolWord;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn weight_examples() {
        let lambda = 0.7;
        let w = WeightTable::constant(3, -lambda).unwrap();
        assert_eq!(word_weight(&[2], &w), 1.0);
        assert_eq!(word_weight(&[], &w), 1.0);
        for n in 1..10usize {
            let word: Vec<Symbol> = (0..n).map(|i| (i % 3) as Symbol).collect();
            assert!(close(word_weight(&word, &w), (-lambda * (n as f64 - 1.0)).exp(), 1e-14));
        }
        // cat map: ((3+√5)/2)^{-2} ≈ 0.1458980338
        let golden_sq = (3.0 + 5f64.sqrt()) / 2.0;
        let cat = WeightTable::constant(2, -golden_sq.ln()).unwrap();
        assert!(close(word_weight(&[0, 1, 1], &cat), 0.145898033750315, 1e-12));
    }

    #[test]
    fn pressure_sum_examples() {
        let w = WeightTable::new(2, vec![-1.0, -2.0, -0.5, -0.5], -50.0, 0.0).unwrap();
        assert_eq!(pressure_sum(&CylinderFamily::new(2), &w, 0.5), 0.0);
        let fam = CylinderFamily::from_words(2, [SymbolWord::from(vec![0, 0]), SymbolWord::from(vec![0, 1])]).unwrap();
        // e^{-1/2} + e^{-1}
        assert!(close(pressure_sum(&fam, &w, 0.5), 0.9744101008, 1e-9));

        let lambda = 0.3;
        let c = WeightTable::constant(2, -lambda).unwrap();
        let all = CylinderFamily::from_words(
            3,
            crate::symbolic::enumerate_words(&crate::symbolic::Alphabet::full(2).unwrap(), 3, 64).unwrap(),
        )
        .unwrap();
        assert!(close(pressure_sum(&all, &c, 0.5), 8.0 * (-lambda * 2.0f64 / 2.0).exp(), 1e-13));
    }

    #[test]
    fn invariants_enforced() {
        assert!(WeightTable::new(2, vec![0.0, 1.0, 0.0, 0.0], -1.0, 0.5).is_err());
        assert!(WeightTable::new(2, vec![0.0; 4], -1.0, f64::INFINITY).is_err());
        assert!(WeightTable::new(2, vec![-2.0, 0.0, 0.0, 0.0], -1.0, 0.5).is_err());
    }

    #[test]
    fn json_schema() {
        let w = WeightTable::new(2, vec![-1.0, -2.0, -0.5, -0.25], -50.0, 0.0).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"logJ":[-1.0,-2.0,-0.5,-0.25],"floorLog":-50.0,"capLog":0.0}"#);
        let back: WeightTable<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<WeightTable<f64>>(r#"{"logJ":[1,2,3],"floorLog":-1,"capLog":5}"#).is_err());
    }

    #[test]
    fn single_precision_instantiation() {
        let w = WeightTable::<f32>::constant(2, -0.5).unwrap();
        assert!((word_weight(&[0, 1, 0], &w) - (-1.0f32).exp()).abs() < 1e-6);
    }
}
