use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use super::linalg::{identity, inner, max_abs_diff};
use super::propagator::DampedPropagator;
use crate::classical::TorusPartition;
use crate::symbolic::{CylinderFamily, Symbol};
use crate::{Error, Result};

/// Sharp position projectors `π_i`: `π_i |j⟩ = |j⟩` when the grid point
/// `j/N` lies in strip `i`, and `0` otherwise.
#[derive(Clone, Debug)]
pub struct PartitionOperators {
    cells: usize,
    labels: Vec<usize>,
}

impl PartitionOperators {
    pub fn new(partition: &TorusPartition<f64>, n: usize) -> Result<Self> {
        if !partition.is_strips() {
            return Err(Error::invalid("position projectors need a strip partition"));
        }
        let labels = (0..n).map(|j| partition.cell_of_position(j as f64 / n as f64)).collect();
        Ok(Self { cells: partition.size(), labels })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Cell of each grid point.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Grid points in cell `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.labels[j] == i).collect()
    }

    /// `π_i x`.
    pub fn project(&self, i: usize, x: &[c64]) -> Vec<c64> {
        x.iter().zip(&self.labels).map(|(&v, &l)| if l == i { v } else { c64::new(0.0, 0.0) }).collect()
    }

    fn project_in_place(&self, i: usize, x: &mut [c64]) {
        for (v, &l) in x.iter_mut().zip(&self.labels) {
            if l != i {
                *v = c64::new(0.0, 0.0);
            }
        }
    }

    pub fn projector(&self, i: usize) -> Mat<c64> {
        let n = self.dim();
        Mat::from_fn(n, n, |r, c| if r == c && self.labels[r] == i { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) })
    }

    /// Max-norm defects of `Σ π_i = I`, `π_i π_j = δ_ij π_i`, from the dense
    /// matrices.
    pub fn identity_defects(&self) -> (f64, f64) {
        let n = self.dim();
        let ps: Vec<Mat<c64>> = (0..self.cells).map(|i| self.projector(i)).collect();
        let mut sum = Mat::<c64>::zeros(n, n);
        for p in &ps {
            sum += p;
        }
        let sum_defect = max_abs_diff(&sum, &identity(n));
        let mut prod_defect: f64 = 0.0;
        for (i, p) in ps.iter().enumerate() {
            for (j, q) in ps.iter().enumerate() {
                let pq = p * q;
                let target = if i == j { p.clone() } else { Mat::zeros(n, n) };
                prod_defect = prod_defect.max(max_abs_diff(&pq, &target));
            }
        }
        (sum_defect, prod_defect)
    }
}

/// Time convention for cylinder operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeConvention {
    /// `Π_α = π_{α_{n−1}}(n−1) ⋯ π_{α₁}(1) π_{α₀}` with
    /// `A(t) = M^{−t} A M^t`.
    Heisenberg,
    /// `π_{α_{n−1}} M π_{α_{n−2}} M ⋯ M π_{α₀}`; equals `M^{n−1} Π_α`.
    Interleaved,
}

fn check_word(word: &[Symbol], props: &PartitionOperators) -> Result<()> {
    if word.is_empty() {
        return Err(Error::invalid("cylinder words must be nonempty"));
    }
    if let Some(&s) = word.iter().find(|&&s| s as usize >= props.cells()) {
        return Err(Error::invalid(format!("symbol {s} outside the {}-cell partition", props.cells())));
    }
    Ok(())
}

/// Dense cylinder operator.
pub fn cylinder_operator(
    word: &[Symbol],
    props: &PartitionOperators,
    prop: &DampedPropagator,
    convention: TimeConvention,
) -> Result<Mat<c64>> {
    check_word(word, props)?;
    let n = prop.dim();
    if props.dim() != n {
        return Err(Error::invalid("projectors and propagator differ in dimension"));
    }
    let mask = |p: &mut Mat<c64>, i: Symbol| {
        for r in 0..n {
            if props.labels[r] != i as usize {
                for c in 0..n {
                    p[(r, c)] = c64::new(0.0, 0.0);
                }
            }
        }
    };
    let mut p = props.projector(word[0] as usize);
    for &s in &word[1..] {
        p = prop.times(&p);
        mask(&mut p, s);
    }
    if convention == TimeConvention::Heisenberg {
        for _ in 1..word.len() {
            p = prop.inverse_times(&p);
        }
    }
    Ok(p)
}

/// `π_{α_{n−1}} M ⋯ M π_{α₀} x`.
pub fn interleaved_apply(word: &[Symbol], props: &PartitionOperators, prop: &DampedPropagator, x: &[c64]) -> Vec<c64> {
    let mut v = props.project(word[0] as usize, x);
    for &s in &word[1..] {
        v = prop.apply(&v);
        props.project_in_place(s as usize, &mut v);
    }
    v
}

/// `Π_α x` in the Heisenberg convention.
pub fn cylinder_apply(word: &[Symbol], props: &PartitionOperators, prop: &DampedPropagator, x: &[c64]) -> Vec<c64> {
    let w = interleaved_apply(word, props, prop, x);
    (1..word.len()).fold(w, |v, _| prop.apply_inverse(&v))
}

/// `μ(α) = ⟨Π_α ψ, ψ⟩`.
pub fn quantum_functional(psi: &[c64], word: &[Symbol], props: &PartitionOperators, prop: &DampedPropagator) -> Result<c64> {
    check_word(word, props)?;
    let w = interleaved_apply(word, props, prop, psi);
    let y = dual_vector(psi, prop, word.len());
    Ok(inner(&w, &y))
}

/// `(M†)^{−(n−1)} ψ`, so that `μ(α) = ⟨interleaved(α) ψ, y⟩`.
fn dual_vector(psi: &[c64], prop: &DampedPropagator, n: usize) -> Vec<c64> {
    (1..n).fold(psi.to_vec(), |v, _| prop.apply_adjoint_inverse(&v))
}

/// `μ(α)` for every member of `family`, walking the words in lexicographic
/// order and reusing interleaved prefixes.
pub fn family_functionals(
    psi: &[c64],
    family: &CylinderFamily,
    props: &PartitionOperators,
    prop: &DampedPropagator,
) -> Result<Vec<c64>> {
    let n = family.word_length();
    if family.is_empty() {
        return Ok(Vec::new());
    }
    let y = dual_vector(psi, prop, n);
    let mut stack: Vec<Vec<c64>> = Vec::with_capacity(n);
    let mut prev: Option<&[Symbol]> = None;
    let mut out = Vec::with_capacity(family.len());
    for w in family.iter() {
        let word = w.letters();
        check_word(word, props)?;
        let lcp = prev.map_or(0, |p| p.iter().zip(word).take_while(|(a, b)| a == b).count());
        stack.truncate(lcp);
        for t in lcp..n {
            let v = match stack.last() {
                None => props.project(word[0] as usize, psi),
                Some(last) => {
                    let mut v = prop.apply(last);
                    props.project_in_place(word[t] as usize, &mut v);
                    v
                }
            };
            stack.push(v);
        }
        out.push(inner(stack.last().expect("nonempty word"), &y));
        prev = Some(word);
    }
    Ok(out)
}

/// `Σ_{α∈W} μ(α)`.
pub fn family_mass(psi: &[c64], family: &CylinderFamily, props: &PartitionOperators, prop: &DampedPropagator) -> Result<c64> {
    Ok(family_functionals(psi, family, props, prop)?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{DampingProfile, TorusMap};
    use crate::quantum::{damped_propagator, quantize};
    use crate::symbolic::{enumerate_words, Alphabet, SymbolWord};

    fn setup(n: usize, k: usize) -> (PartitionOperators, DampedPropagator) {
        let part = TorusPartition::strips(k).unwrap();
        let v = DampingProfile::trig(0.5, vec![0.3], vec![0.1]).unwrap();
        let prop = damped_propagator(quantize(&TorusMap::cat(), n).unwrap(), &v).unwrap();
        (PartitionOperators::new(&part, n).unwrap(), prop)
    }

    fn random_state(n: usize, seed: u64) -> Vec<c64> {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let v: Vec<c64> = (0..n).map(|_| c64::new(next(), next())).collect();
        let nrm = super::super::linalg::norm(&v);
        v.into_iter().map(|x| x / nrm).collect()
    }

    #[test]
    fn projector_identities() {
        let (props, _) = setup(30, 4);
        assert_eq!(props.identity_defects(), (0.0, 0.0));
    }

    #[test]
    fn length_one_is_projector() {
        let (props, prop) = setup(16, 2);
        let p = cylinder_operator(&[1], &props, &prop, TimeConvention::Heisenberg).unwrap();
        assert_eq!(max_abs_diff(&p, &props.projector(1)), 0.0);
    }

    #[test]
    fn cylinders_resolve_identity() {
        let (props, prop) = setup(32, 3);
        let mut sum = Mat::<c64>::zeros(32, 32);
        for w in enumerate_words(&Alphabet::full(3).unwrap(), 3, 1 << 20).unwrap() {
            sum += cylinder_operator(w.letters(), &props, &prop, TimeConvention::Heisenberg).unwrap();
        }
        assert!(max_abs_diff(&sum, &identity(32)) < 1e-10);
    }

    #[test]
    fn conventions_related_by_powers() {
        let (props, prop) = setup(24, 2);
        let w = [0, 1, 1];
        let h = cylinder_operator(&w, &props, &prop, TimeConvention::Heisenberg).unwrap();
        let i = cylinder_operator(&w, &props, &prop, TimeConvention::Interleaved).unwrap();
        let back = prop.times(&prop.times(&h));
        assert!(max_abs_diff(&back, &i) < 1e-12);
    }

    #[test]
    fn functional_matches_dense_operator() {
        let (props, prop) = setup(24, 3);
        let psi = random_state(24, 5);
        let w = [2, 0, 1];
        let pi = cylinder_operator(&w, &props, &prop, TimeConvention::Heisenberg).unwrap();
        let pv: Vec<c64> = (0..24).map(|r| (0..24).map(|c| pi[(r, c)] * psi[c]).sum()).collect();
        let direct = inner(&pv, &psi);
        let mu = quantum_functional(&psi, &w, &props, &prop).unwrap();
        assert!((direct - mu).norm() < 1e-12);
        let via_apply = inner(&cylinder_apply(&w, &props, &prop, &psi), &psi);
        assert!((via_apply - mu).norm() < 1e-12);
    }

    #[test]
    fn family_walk_matches_single_words() {
        let (props, prop) = setup(20, 3);
        let psi = random_state(20, 9);
        let fam = CylinderFamily::from_words(
            3,
            [vec![0, 0, 1], vec![0, 0, 2], vec![0, 2, 1], vec![2, 1, 1]].into_iter().map(SymbolWord::from_letters),
        )
        .unwrap();
        let vals = family_functionals(&psi, &fam, &props, &prop).unwrap();
        for (w, v) in fam.iter().zip(&vals) {
            let single = quantum_functional(&psi, w.letters(), &props, &prop).unwrap();
            assert!((single - v).norm() < 1e-13);
        }
    }

    #[test]
    fn undamped_conjugation_shifts_time() {
        let part = TorusPartition::strips(2).unwrap();
        let u = quantize(&TorusMap::cat(), 16).unwrap();
        let prop = DampedPropagator::undamped(u.clone());
        let props = PartitionOperators::new(&part, 16).unwrap();
        // U^{-1} Π_{01} U = π_0(1) π_1(2) = Π_{a01} summed over a
        let p = cylinder_operator(&[0, 1], &props, &prop, TimeConvention::Heisenberg).unwrap();
        let lhs = u.adjoint() * &p * &u;
        let mut rhs = Mat::<c64>::zeros(16, 16);
        for a in 0..2 {
            rhs += cylinder_operator(&[a, 0, 1], &props, &prop, TimeConvention::Heisenberg).unwrap();
        }
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }
}
