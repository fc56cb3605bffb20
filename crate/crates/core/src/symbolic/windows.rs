use super::family::CylinderFamily;
use super::weights::WeightTable;
use super::words::{check_cap, enumerate_words, Alphabet, Symbol, SymbolWord};
use crate::{Error, Real, Result};

/// Number of windows `[α_j, …, α_{j+n₀-1}]`, `0 ≤ j ≤ p-n₀`, that belong to `family`.
pub fn window_hits(letters: &[Symbol], family: &CylinderFamily) -> usize {
    let n0 = family.word_length();
    if letters.len() < n0 {
        return 0;
    }
    letters.windows(n0).filter(|w| family.contains(w)).count()
}

fn meets_fraction(hits: usize, windows: usize, tau: f64) -> bool {
    // hits / windows >= tau, with slack for binary fractions such as 0.7
    hits as f64 + 1e-9 >= tau * windows as f64
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&tau) {
        return Err(Error::pre(format!("tau = {tau} outside [1/2, 1]")));
    }
    Ok(())
}

/// `Σ_p(W, τ)`: the length-`p` words whose fraction of `W`-windows is at least `τ`.
pub fn sigma_p_tau(
    family: &CylinderFamily,
    tau: f64,
    p: usize,
    alphabet: &Alphabet,
    cap: u64,
) -> Result<CylinderFamily> {
    let n0 = family.word_length();
    check_tau(tau)?;
    if p < n0 {
        return Err(Error::pre(format!("p = {p} shorter than the family word length {n0}")));
    }
    let windows = p - n0 + 1;
    let mut out = CylinderFamily::new(p);
    if family.is_empty() {
        return Ok(out);
    }
    let mut stream = enumerate_words(alphabet, p, cap)?;
    while let Some(w) = stream.advance() {
        if meets_fraction(window_hits(w, family), windows, tau) {
            out.insert(SymbolWord::from_letters(w.to_vec()))?;
        }
    }
    Ok(out)
}

/// `Σ_{α ∈ Σ_p(W, τ)} J^u_p(α)^s` without materializing the family.
///
/// Dynamic programming over (last `max(n₀-1, 1)` letters, hit count); the
/// result is the same finite sum as enumerating `Σ_p(W, τ)` word by word.
pub fn sigma_p_tau_weight_sum<T: Real>(
    family: &CylinderFamily,
    tau: f64,
    p: usize,
    alphabet: &Alphabet,
    weights: &WeightTable<T>,
    s: T,
    cap: u64,
) -> Result<T> {
    let n0 = family.word_length();
    check_tau(tau)?;
    if p < n0 || n0 == 0 {
        return Err(Error::pre(format!("need 1 <= n0 = {n0} <= p = {p}")));
    }
    let k = alphabet.size();
    let m = (n0 - 1).max(1);
    check_cap(k, m, cap)?;
    let states = k.pow(m as u32);
    let windows = p - n0 + 1;
    let decode = |mut idx: usize| -> Vec<Symbol> {
        let mut v = vec![0; m];
        for slot in v.iter_mut().rev() {
            *slot = (idx % k) as Symbol;
            idx /= k;
        }
        v
    };

    let mut dp = vec![vec![T::zero(); windows + 1]; states];
    let mut stream = enumerate_words(alphabet, m, cap)?;
    while let Some(w) = stream.advance() {
        let idx = w.iter().fold(0usize, |acc, &s| acc * k + s as usize);
        let hits = if n0 == 1 { usize::from(family.contains(w)) } else { 0 };
        dp[idx][hits] += (s * weights.log_weight(w)).exp();
    }

    let mut window = Vec::with_capacity(n0);
    for _ in m..p {
        let mut next = vec![vec![T::zero(); windows + 1]; states];
        for (idx, row) in dp.iter().enumerate() {
            if row.iter().all(|v| v.is_zero()) {
                continue;
            }
            let letters = decode(idx);
            let last = letters[m - 1];
            for c in 0..k as Symbol {
                if !alphabet.allows(last, c) {
                    continue;
                }
                window.clear();
                if n0 > 1 {
                    window.extend_from_slice(&letters);
                }
                window.push(c);
                let hit = usize::from(family.contains(&window));
                let factor = (s * weights.log_j(last, c)).exp();
                let new_idx = (idx * k + c as usize) % states;
                for (h, &v) in row.iter().enumerate() {
                    if !v.is_zero() {
                        next[new_idx][(h + hit).min(windows)] += v * factor;
                    }
                }
            }
        }
        dp = next;
    }

    Ok(dp
        .iter()
        .flat_map(|row| row.iter().enumerate())
        .filter(|(h, _)| meets_fraction(*h, windows, tau))
        .map(|(_, &v)| v)
        .sum())
}

/// Decomposition `[b₀; c₀; …; b_{l-1}; c_{l-1}; b_l]` of a word along the
/// stopping times of its `W`-windows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StoppingDecomposition {
    /// Alternating `b`/`c` pieces, always of odd length `2l + 1`.
    pub pieces: Vec<SymbolWord>,
    pub stopping_times: Vec<usize>,
}

impl StoppingDecomposition {
    /// Number `l` of `c`-pieces.
    pub fn count(&self) -> usize {
        self.stopping_times.len()
    }

    pub fn b_pieces(&self) -> impl Iterator<Item = &SymbolWord> {
        self.pieces.iter().step_by(2)
    }

    pub fn c_pieces(&self) -> impl Iterator<Item = &SymbolWord> {
        self.pieces.iter().skip(1).step_by(2)
    }

    pub fn reconstruct(&self) -> SymbolWord {
        SymbolWord::from_letters(self.pieces.iter().flat_map(|p| p.letters().iter().copied()).collect())
    }
}

/// Greedy stopping times: `t₀` is the first window in `W`, and
/// `t_{l+1} = inf{t_l + n₀ ≤ j ≤ p - n₀ : window_j ∈ W}` until undefined.
pub fn stopping_decomposition(word: &SymbolWord, family: &CylinderFamily) -> Result<StoppingDecomposition> {
    let n0 = family.word_length();
    let letters = word.letters();
    let p = letters.len();
    if p < n0 {
        return Err(Error::pre(format!("word length {p} shorter than n0 = {n0}")));
    }
    let mut times = Vec::new();
    if n0 > 0 {
        let mut j = 0;
        while j + n0 <= p {
            if family.contains(&letters[j..j + n0]) {
                times.push(j);
                j += n0;
            } else {
                j += 1;
            }
        }
    }
    let mut pieces = Vec::with_capacity(2 * times.len() + 1);
    let mut cursor = 0;
    for &t in &times {
        pieces.push(SymbolWord::from_letters(letters[cursor..t].to_vec()));
        pieces.push(SymbolWord::from_letters(letters[t..t + n0].to_vec()));
        cursor = t + n0;
    }
    pieces.push(SymbolWord::from_letters(letters[cursor..].to_vec()));
    Ok(StoppingDecomposition { pieces, stopping_times: times })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::DEFAULT_ENUMERATION_CAP;

    fn w(s: &str) -> SymbolWord {
        SymbolWord::from_letters(s.bytes().map(|b| (b - b'0') as Symbol).collect())
    }

    fn fam(n0: usize, words: &[&str]) -> CylinderFamily {
        CylinderFamily::from_words(n0, words.iter().map(|s| w(s))).unwrap()
    }

    fn names(f: &CylinderFamily) -> Vec<String> {
        f.iter().map(|x| x.to_string().replace('.', "")).collect()
    }

    #[test]
    fn sigma_examples() {
        let a = Alphabet::full(2).unwrap();
        let s = sigma_p_tau(&fam(2, &["00"]), 0.5, 3, &a, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(names(&s), ["000", "001", "100"]);

        let all = fam(2, &["00", "01", "10", "11"]);
        for tau in [0.5, 0.8, 1.0] {
            assert_eq!(sigma_p_tau(&all, tau, 6, &a, DEFAULT_ENUMERATION_CAP).unwrap().len(), 64);
        }
        assert!(sigma_p_tau(&CylinderFamily::new(2), 0.5, 5, &a, DEFAULT_ENUMERATION_CAP).unwrap().is_empty());
        assert!(sigma_p_tau(&all, 0.4, 6, &a, DEFAULT_ENUMERATION_CAP).is_err());
        assert!(sigma_p_tau(&all, 0.5, 1, &a, DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn stopping_examples() {
        let d = stopping_decomposition(&w("00100"), &fam(2, &["00"])).unwrap();
        assert_eq!(d.stopping_times, vec![0, 3]);
        assert_eq!(d.pieces, vec![w(""), w("00"), w("1"), w("00"), w("")]);

        let d = stopping_decomposition(&w("111"), &fam(2, &["00"])).unwrap();
        assert!(d.stopping_times.is_empty());
        assert_eq!(d.pieces, vec![w("111")]);

        let d = stopping_decomposition(&w("0000"), &fam(2, &["00"])).unwrap();
        assert_eq!(d.stopping_times, vec![0, 2]);
        assert_eq!(d.pieces, vec![w(""), w("00"), w(""), w("00"), w("")]);
    }

    #[test]
    fn dp_sum_matches_enumeration() {
        let a = Alphabet::golden_mean();
        let weights = WeightTable::new(2, vec![-0.3, -1.1, -0.7, -50.0], -50.0, 0.0).unwrap();
        for (n0, members) in [(1, vec!["0"]), (2, vec!["00", "10"]), (3, vec!["010", "000", "100"])] {
            let f = fam(n0, &members);
            for p in n0..=10 {
                for tau in [0.5, 0.75, 1.0] {
                    let brute: f64 = sigma_p_tau(&f, tau, p, &a, DEFAULT_ENUMERATION_CAP)
                        .unwrap()
                        .iter()
                        .map(|x| (0.5f64 * weights.log_weight(x.letters())).exp())
                        .sum();
                    let dp = sigma_p_tau_weight_sum(&f, tau, p, &a, &weights, 0.5, DEFAULT_ENUMERATION_CAP).unwrap();
                    assert!((brute - dp).abs() <= 1e-12 * (1.0 + brute), "n0={n0} p={p} tau={tau}: {brute} vs {dp}");
                }
            }
        }
    }
}
