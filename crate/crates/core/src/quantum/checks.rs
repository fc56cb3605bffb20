use faer::{c64, Mat};
use serde::Serialize;

use super::cylinder::{cylinder_apply, family_functionals, quantum_functional, PartitionOperators};
use super::linalg::{inner, norm, spectral_norm};
use super::propagator::{DampedPropagator, RESIDUAL_TOL};
use crate::symbolic::{enumerate_words, Alphabet, CylinderFamily, Symbol, SymbolWord, WeightTable, DEFAULT_ENUMERATION_CAP};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct SubinvarianceReport {
    /// `Re μ([α])`.
    pub lhs: f64,
    /// `|λ|^{−2p} Re μ(σ^{−p}[α])`.
    pub rhs: f64,
    pub slack: f64,
    /// `|μ([α]) − |λ|^{−2p} Σ_β ⟨(M^p)† M^p Π_{β.α} ψ, ψ⟩|`.
    pub identity_defect: f64,
}

fn prefixed(beta: &[Symbol], word: &[Symbol]) -> Vec<Symbol> {
    beta.iter().chain(word).copied().collect()
}

/// Compares `μ([α])` with `|λ|^{−2p} μ(σ^{−p}[α])`, where `σ^{−p}[α]` is the
/// union of the cylinders `[β.α]` over all `|β| = p`, and evaluates the
/// exact rewriting `μ([α]) = |λ|^{−2p} Σ_β ⟨(M^p)† M^p Π_{β.α} ψ, ψ⟩`
/// without using the eigenvalue relation on the right.
pub fn subinvariance_check(
    psi: &[c64],
    lambda: c64,
    word: &[Symbol],
    p: usize,
    props: &PartitionOperators,
    prop: &DampedPropagator,
) -> Result<SubinvarianceReport> {
    let mpsi = prop.apply(psi);
    let res = norm(&mpsi.iter().zip(psi).map(|(a, b)| a - lambda * b).collect::<Vec<_>>());
    if !(res <= RESIDUAL_TOL * prop.norm() * norm(psi).max(1.0)) {
        return Err(Error::pre(format!("ψ is not an eigenvector of M (residual {res:e})")));
    }
    let k = props.cells();
    let scale = lambda.norm().powi(-2 * p as i32);
    let mu = quantum_functional(psi, word, props, prop)?;
    let shifted = CylinderFamily::from_words(
        word.len() + p,
        enumerate_words(&Alphabet::full(k)?, p, DEFAULT_ENUMERATION_CAP)?.map(|b| SymbolWord::from_letters(prefixed(b.letters(), word))),
    )?;
    let mu_shift: c64 = family_functionals(psi, &shifted, props, prop)?.into_iter().sum();

    let mp_psi = prop.apply_power(psi, p);
    let mut rewritten = c64::new(0.0, 0.0);
    for b in enumerate_words(&Alphabet::full(k)?, p, DEFAULT_ENUMERATION_CAP)? {
        let v = cylinder_apply(&prefixed(b.letters(), word), props, prop, psi);
        rewritten += inner(&prop.apply_power(&v, p), &mp_psi);
    }
    let lhs = mu.re;
    let rhs = scale * mu_shift.re;
    Ok(SubinvarianceReport { lhs, rhs, slack: rhs - lhs, identity_defect: (mu - rewritten * scale).norm() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DispersiveReport {
    pub norm: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Default word-length budget of the dispersive check: `n ≤ κ log N`.
pub const DISPERSIVE_KAPPA: f64 = 1.0;

/// `‖π_{γ_{n−1}} U ⋯ U π_{γ₀}‖` against
/// `2 N^{1/2} J^u_n(γ)^{1/2} (1 + c_ε)^n`. The product is formed from the
/// blocks of `U` between consecutive strips, so its cost is set by the
/// strip width rather than by `N`.
pub fn dispersive_norm_check(
    word: &[Symbol],
    u: &Mat<c64>,
    props: &PartitionOperators,
    weights: &WeightTable<f64>,
    c_eps: f64,
) -> Result<DispersiveReport> {
    let n = u.nrows();
    if word.is_empty() {
        return Err(Error::invalid("empty word"));
    }
    let budget = (DISPERSIVE_KAPPA * (n as f64).ln()).floor().max(1.0) as usize;
    if word.len() > budget {
        return Err(Error::CapExceeded { requested: word.len() as u128, cap: budget as u64 });
    }
    let norm = interleaved_norm(word, u, props);
    let bound = 2.0 * (n as f64).sqrt() * (0.5 * weights.log_weight(word)).exp() * (1.0 + c_eps).powi(word.len() as i32);
    Ok(DispersiveReport { norm, bound, ratio: norm / bound })
}

/// Operator norm of `π_{γ_{n−1}} U ⋯ U π_{γ₀}`.
pub fn interleaved_norm(word: &[Symbol], u: &Mat<c64>, props: &PartitionOperators) -> f64 {
    let supports: Vec<Vec<usize>> = word.iter().map(|&s| props.support(s as usize)).collect();
    if supports.iter().any(Vec::is_empty) {
        return 0.0;
    }
    let first = &supports[0];
    let mut p = Mat::from_fn(first.len(), first.len(), |i, j| if i == j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
    for t in 1..word.len() {
        let (rows, cols) = (&supports[t], &supports[t - 1]);
        let block = Mat::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]);
        p = block * p;
    }
    spectral_norm(&p)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub word_length: usize,
    /// `‖Σ_α Q_α ψ‖²`.
    pub lhs: f64,
    /// `Re Σ_α ⟨Q_α ψ, ψ⟩`.
    pub rhs: f64,
    pub defect: f64,
    /// `Re Σ_{α≠α'} ⟨Q_α ψ, Q_{α'} ψ⟩`.
    pub cross_terms: f64,
    /// `Re Σ_α (‖Q_α ψ‖² − ⟨Q_α ψ, ψ⟩)`.
    pub diagonal_terms: f64,
}

/// Almost-orthogonality of the operators
/// `Q_α = π_{α_{n−1}} π_{α_{n−2}}(−1) ⋯ π_{α₀}(1−n) = (interleaved) M^{−(n−1)}`
/// on `ψ`, over the words of `words`.
pub fn orthogonality_defect(
    psi: &[c64],
    words: &CylinderFamily,
    props: &PartitionOperators,
    prop: &DampedPropagator,
) -> Result<OrthogonalityReport> {
    let n = words.word_length();
    let start = (1..n).fold(psi.to_vec(), |v, _| prop.apply_inverse(&v));
    let dim = prop.dim();
    let qs: Vec<Vec<c64>> = words.iter().map(|w| super::cylinder::interleaved_apply(w.letters(), props, prop, &start)).collect();
    let mut total = vec![c64::new(0.0, 0.0); dim];
    for q in &qs {
        total.iter_mut().zip(q).for_each(|(t, x)| *t += x);
    }
    let lhs = norm(&total).powi(2);
    let rhs: f64 = qs.iter().map(|q| inner(q, psi).re).sum();
    let mut cross = 0.0;
    let mut diag = 0.0;
    for (i, a) in qs.iter().enumerate() {
        diag += norm(a).powi(2) - inner(a, psi).re;
        for b in &qs[i + 1..] {
            cross += 2.0 * inner(a, b).re;
        }
    }
    Ok(OrthogonalityReport { word_length: n, lhs, rhs, defect: lhs - rhs, cross_terms: cross, diagonal_terms: diag })
}
