//! Exact checks of the Wick-product decomposition identities.
//!
//! `w^j_{n,k}` contracts `j` letters of the left factor against `j` letters of
//! the right factor. It has two presentations: a sum over subset pairs
//! `(A, B)` and a sum over partial partitions `ρ` weighted by `q^{ι′(ρ)}`.
//! The inclusion–exclusion identity `Σ_j (-1)^j q^{C(j,2)} w^j_{n,k} = β_{n,k}`
//! is checked by applying each product `W(left) W(right)` to the vacuum.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{
    binomial, combinations, enumerate_partial_partitions, factorial, CosetOrientation, PartialPartition,
    SubsetCoset,
};
use crate::error::{QfockError, Result};
use crate::fock::{FockSpace, FockVector, Letter, SpaceConfig, Word};
use crate::scalars::{QPolynomial, Scalar};
use crate::wick::wick_apply;

/// Formal combination `Σ c · W(left) W(right)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WickPairCombination<S> {
    terms: BTreeMap<(Word, Word), S>,
}

impl<S: Scalar> Default for WickPairCombination<S> {
    fn default() -> Self {
        WickPairCombination { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> WickPairCombination<S> {
    pub fn add_term(&mut self, left: Word, right: Word, c: S) {
        if c.is_zero() {
            return;
        }
        let key = (left, right);
        let remove = match self.terms.get_mut(&key) {
            Some(slot) => {
                *slot += c;
                slot.is_zero()
            }
            None => {
                self.terms.insert(key.clone(), c);
                false
            }
        };
        if remove {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, &S)> {
        self.terms.iter().map(|((l, r), c)| (l, r, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::default();
        for ((l, r), c) in &self.terms {
            out.add_term(l.clone(), r.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Self, s: &S) {
        for ((l, r), c) in &other.terms {
            self.add_term(l.clone(), r.clone(), c.clone() * s.clone());
        }
    }

    /// `Σ c · W(left) W(right) Ω = Σ c · W(left) right`.
    pub fn apply_to_vacuum(&self, space: &FockSpace<S>) -> Result<FockVector<S>> {
        let mut out = FockVector::zero();
        for ((l, r), c) in &self.terms {
            let v = wick_apply(space, &FockVector::word(l.clone()), &FockVector::word(r.clone()))?;
            out.add_scaled(&v, c);
        }
        Ok(out)
    }
}

impl<S: Scalar> fmt::Display for WickPairCombination<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((l, r), c)| format!("({c})·W({l})W({r})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Which presentation of `w^j_{n,k}` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WMode {
    /// `Σ_{A,B} q^{ι(A)+ι(B)} ⟨ξL_A, ξR_B⟩_q W(ξL_{A^c}) W(ξR_{B^c})`.
    SubsetSum,
    /// `Σ_ρ q^{ι′(ρ)} Π⟨h_a, h_b⟩ W(ξL_ρ) W(ξR_ρ)`.
    RhoSum,
}

/// `w^j_{n,k}(ξL ⊗ ξR)` with `n - k = deg ξL`, `k = deg ξR`. Out-of-range `j`
/// gives the empty combination. In rho-sum mode the result carries the extra
/// factor `q^{C(j,2)}`.
pub fn w_jnk<S: Scalar>(
    space: &FockSpace<S>,
    left: &Word,
    right: &Word,
    j: usize,
    mode: WMode,
) -> Result<WickPairCombination<S>> {
    for w in [left, right] {
        if !space.contains_word(w) {
            return Err(QfockError::SpaceMismatch(format!("word {w} is not in the configured space")));
        }
    }
    let (nl, k) = (left.degree(), right.degree());
    let mut out = WickPairCombination::default();
    if j > nl.min(k) {
        return Ok(out);
    }
    match mode {
        WMode::SubsetSum => {
            for a in combinations(nl, j) {
                let a = SubsetCoset::new(nl, a)?;
                for b in combinations(k, j) {
                    let b = SubsetCoset::new(k, b)?;
                    let bracket = space.word_inner(&left.select(a.elements()), &right.select(b.elements()));
                    if bracket.is_zero() {
                        continue;
                    }
                    let exp = a.inversions(CosetOrientation::ComplementFirst)
                        + b.inversions(CosetOrientation::SubsetFirst);
                    out.add_term(
                        left.select(&a.complement()),
                        right.select(&b.complement()),
                        space.q_pow(exp) * bracket,
                    );
                }
            }
        }
        WMode::RhoSum => {
            let whole = left.concat(right);
            let letters = whole.letters();
            let n = whole.degree();
            for rho in enumerate_partial_partitions(n, k, j)? {
                if !rho.pairs().iter().all(|&(a, b)| letters[a - 1] == letters[b - 1]) {
                    continue;
                }
                let (l_rest, r_rest): (Vec<usize>, Vec<usize>) =
                    rho.singletons().iter().partition(|&&p| p <= nl);
                out.add_term(whole.select(&l_rest), whole.select(&r_rest), space.q_pow(rho.iota_prime()?));
            }
        }
    }
    Ok(out)
}

/// Letter tagged with a color in `0..=j`.
pub type ColoredLetter = (Letter, usize);

/// Kind of coloring in [`color_map`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColorKind {
    /// Every bijection from the chosen positions onto `1..=j` (the map `y_j`).
    Arbitrary,
    /// The `i`-th largest chosen position gets color `j - i + 1`, so colors
    /// increase from left to right (the map `z_j`).
    Decreasing,
}

/// Sum of colored words, all with coefficient one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ColoredVector {
    pub terms: Vec<Vec<ColoredLetter>>,
}

impl ColoredVector {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    crate::combinatorics::permutations(items.len())
        .map(|p| p.images().iter().map(|&i| items[i - 1]).collect())
        .collect()
}

/// Color `j` letters of `ξ` with the colors `1..=j`; the rest get color 0.
pub fn color_map(xi: &Word, j: usize, kind: ColorKind) -> Result<ColoredVector> {
    let n = xi.degree();
    if j > n {
        return Err(QfockError::Domain(format!("cannot color {j} letters of a word of degree {n}")));
    }
    let colors: Vec<usize> = (1..=j).collect();
    let mut terms = Vec::new();
    for a in combinations(n, j) {
        let assignments = match kind {
            ColorKind::Arbitrary => permutations_of(&colors),
            // ascending positions take ascending colors
            ColorKind::Decreasing => vec![colors.clone()],
        };
        for assignment in assignments {
            let mut word: Vec<ColoredLetter> = xi.letters().iter().map(|&l| (l, 0)).collect();
            for (&pos, &c) in a.iter().zip(&assignment) {
                word[pos - 1].1 = c;
            }
            terms.push(word);
        }
    }
    Ok(ColoredVector { terms })
}

/// Expected number of terms of [`color_map`].
pub fn color_map_count(n: usize, j: usize, kind: ColorKind) -> u64 {
    match kind {
        ColorKind::Arbitrary => binomial(n, j) * factorial(j),
        ColorKind::Decreasing => binomial(n, j),
    }
}

/// Outcome of an exhaustive verification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub cases: usize,
    pub violations: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: VerificationReport) {
        self.cases += other.cases;
        self.violations.extend(other.violations);
    }
}

/// Switches that deliberately corrupt a verifier, so callers can check that
/// failures are reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FaultInjection {
    pub enabled: bool,
}

/// Largest degree the inclusion–exclusion verifier accepts.
pub const MAX_IE_DEGREE: usize = 8;

/// `Σ_j (-1)^j q^{C(j,2)} w^j_{n,k}(ξ) Ω = ξ` for every degree-`n` word over
/// `d` letters, with exact polynomial coefficients.
pub fn inclusion_exclusion_verify(n: usize, k: usize, d: usize, fault: FaultInjection) -> Result<VerificationReport> {
    if k > n {
        return Err(QfockError::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if n > MAX_IE_DEGREE {
        return Err(QfockError::Resource(format!("degree {n} above the verifier bound {MAX_IE_DEGREE}")));
    }
    let space = FockSpace::exact(SpaceConfig::new(d, 1, n))?;
    let words = space.enumerate_words(n)?.to_vec();
    let results: Vec<Result<VerificationReport>> = words
        .par_iter()
        .map(|xi| {
            let (left, right) = split_word(xi, n - k);
            let mut total = FockVector::zero();
            for j in 0..=k.min(n - k) {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let mut coef = QPolynomial::from_i64(sign) * space.q_pow(j * j.saturating_sub(1) / 2);
                if fault.enabled && j == 1 {
                    coef = -coef;
                }
                let w = w_jnk(&space, &left, &right, j, WMode::SubsetSum)?;
                total.add_scaled(&w.apply_to_vacuum(&space)?, &coef);
            }
            let expected = FockVector::word(xi.clone());
            let mut report = VerificationReport { cases: 1, violations: Vec::new() };
            if total != expected {
                report.violations.push(format!("{xi}: got {total}"));
            }
            Ok(report)
        })
        .collect();
    let mut report = VerificationReport::default();
    for r in results {
        report.merge(r?);
    }
    Ok(report)
}

fn split_word(xi: &Word, at: usize) -> (Word, Word) {
    let letters = xi.letters();
    (Word::new(letters[..at].to_vec()), Word::new(letters[at..].to_vec()))
}

/// Statistic applied to the inner partition in the alternating sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimReading {
    /// `q^{ι′(ρ) + ι′(σ)}`.
    PrimePrime,
    /// `q^{ι′(ρ) + ι(σ)}`.
    PrimePlain,
}

/// `Σ_{j=0}^m (-1)^j Σ_{ρ ∪ σ = π, |ρ| = j} q^{ι′(ρ) + stat(σ)}` where `ρ`
/// runs over `j`-element subsets of the pairs of `π` and `σ` is the rest of
/// `π`, relabeled onto `n - 2j` points after deleting the points of `ρ`.
pub fn alternating_claim(pi: &PartialPartition, reading: ClaimReading) -> Result<QPolynomial> {
    if !pi.respects_split() {
        return Err(QfockError::Domain(format!("{pi} has a pair not straddling the split")));
    }
    let n = pi.ground_size();
    let k = pi.right_block();
    let pairs = pi.pairs();
    let m = pairs.len();
    let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
    for j in 0..=m {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        for chosen in combinations(m, j) {
            let rho_pairs: Vec<(usize, usize)> = chosen.iter().map(|&i| pairs[i - 1]).collect();
            let rho = PartialPartition::new(n, k, rho_pairs.clone())?;
            let sigma = pi.remove_pairs(&rho_pairs)?;
            let inner = match reading {
                ClaimReading::PrimePrime => sigma.iota_prime()?,
                ClaimReading::PrimePlain => sigma.crossings(),
            };
            *counts.entry(rho.iota_prime()? + inner).or_default() += sign;
        }
    }
    let top = counts.keys().next_back().copied().unwrap_or(0);
    let mut dense = vec![0i64; top + 1];
    for (e, c) in counts {
        dense[e] = c;
    }
    Ok(QPolynomial::from_counts(&dense))
}

/// Per-reading result of the alternating-sum scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimScan {
    pub reading: ClaimReading,
    pub partitions: usize,
    /// Partitions with at least one pair whose alternating sum is nonzero.
    pub nonzero: Vec<String>,
}

/// Every partition with `1..=max_pairs` pairs, `n ≤ n_max`, all `k`.
pub fn claim_scan(n_max: usize, max_pairs: usize, reading: ClaimReading, fault: FaultInjection) -> Result<ClaimScan> {
    let cases: Vec<(usize, usize, usize)> = (0..=n_max)
        .flat_map(|n| (0..=n).flat_map(move |k| (1..=max_pairs.min(k).min(n - k)).map(move |j| (n, k, j))))
        .collect();
    let results: Vec<Result<(usize, Vec<String>)>> = cases
        .par_iter()
        .map(|&(n, k, j)| {
            let mut count = 0;
            let mut bad = Vec::new();
            for pi in enumerate_partial_partitions(n, k, j)? {
                count += 1;
                let mut value = alternating_claim(&pi, reading)?;
                if fault.enabled && count == 1 && n == 2 {
                    value += QPolynomial::q();
                }
                if !value.is_zero() {
                    bad.push(format!("{pi} (k = {k}): {value}"));
                }
            }
            Ok((count, bad))
        })
        .collect();
    let mut scan = ClaimScan { reading, partitions: 0, nonzero: Vec::new() };
    for r in results {
        let (c, bad) = r?;
        scan.partitions += c;
        scan.nonzero.extend(bad);
    }
    Ok(scan)
}

/// Largest ground set accepted by [`iota_prime_identity_scan`].
pub const MAX_SCAN_N: usize = 10;

/// Result of the exhaustive `ι′` closed-form scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IotaScan {
    pub n_max: usize,
    pub report: VerificationReport,
    /// Violations if the right subset used the complement-first
    /// representative instead.
    pub alternative_orientation_violations: usize,
}

/// `ι′(ρ) = ι(A) + ι(B) + ι(σ) + C(j,2)` for every partial partition with
/// `n ≤ n_max`.
pub fn iota_prime_identity_scan(n_max: usize, fault: FaultInjection) -> Result<IotaScan> {
    if n_max > MAX_SCAN_N {
        return Err(QfockError::Resource(format!("n_max = {n_max} above the scan bound {MAX_SCAN_N}")));
    }
    let cases: Vec<(usize, usize, usize)> = (0..=n_max)
        .flat_map(|n| (0..=n).flat_map(move |k| (0..=k.min(n - k)).map(move |j| (n, k, j))))
        .collect();
    let results: Vec<Result<(VerificationReport, usize)>> = cases
        .par_iter()
        .map(|&(n, k, j)| {
            let mut report = VerificationReport::default();
            let mut alt = 0;
            for rho in enumerate_partial_partitions(n, k, j)? {
                report.cases += 1;
                let triple = rho.partition_triple()?;
                let mut lhs = rho.iota_prime()?;
                if fault.enabled && j == 2 && report.cases == 1 {
                    lhs += 1;
                }
                let rhs = triple.closed_form();
                if lhs != rhs {
                    report.violations.push(format!("{rho} (k = {k}): iota' = {lhs}, closed form = {rhs}"));
                }
                let alt_rhs = rhs - triple.right_inversions() + triple.right.inversions(CosetOrientation::ComplementFirst);
                if lhs != alt_rhs {
                    alt += 1;
                }
            }
            Ok((report, alt))
        })
        .collect();
    let mut report = VerificationReport::default();
    let mut alternative_orientation_violations = 0;
    for r in results {
        let (rep, alt) = r?;
        report.merge(rep);
        alternative_orientation_violations += alt;
    }
    Ok(IotaScan { n_max, report, alternative_orientation_violations })
}

/// Two-mode equality `q^{C(j,2)} w^j(subset-sum) = w^j(rho-sum)` for every
/// split of every degree-`n` word over `d` letters.
pub fn two_mode_verify(n: usize, d: usize) -> Result<VerificationReport> {
    let space = FockSpace::exact(SpaceConfig::new(d, 1, n))?;
    let mut report = VerificationReport::default();
    for xi in space.enumerate_words(n)? {
        for k in 0..=n {
            let (left, right) = split_word(xi, n - k);
            for j in 0..=k.min(n - k) {
                report.cases += 1;
                let subset = w_jnk(&space, &left, &right, j, WMode::SubsetSum)?;
                let rho = w_jnk(&space, &left, &right, j, WMode::RhoSum)?;
                let scaled = subset.scale(&space.q_pow(j * j.saturating_sub(1) / 2));
                if scaled != rho {
                    report.violations.push(format!("{xi}, k = {k}, j = {j}: {scaled} vs {rho}"));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn exact(d: usize, n: usize) -> FockSpace<QPolynomial> {
        FockSpace::exact(SpaceConfig::new(d, 1, n)).unwrap()
    }

    #[test]
    fn w_examples() {
        let s = exact(2, 4);
        let l = Word::from_indices(&[1, 2]);
        let r = Word::from_indices(&[2]);
        let w0 = w_jnk(&s, &l, &r, 0, WMode::SubsetSum).unwrap();
        assert_eq!(w0.terms().collect::<Vec<_>>(), vec![(&l, &r, &QPolynomial::one())]);
        let e1 = Word::from_indices(&[1]);
        let w1 = w_jnk(&s, &e1, &e1, 1, WMode::SubsetSum).unwrap();
        assert_eq!(w1.terms().collect::<Vec<_>>(), vec![(&Word::empty(), &Word::empty(), &QPolynomial::one())]);
        assert!(w_jnk(&s, &e1, &e1, 2, WMode::SubsetSum).unwrap().is_empty());
    }

    #[test]
    fn two_modes_agree_small() {
        for n in 0..=4 {
            let r = two_mode_verify(n, 2).unwrap();
            assert!(r.passed(), "{:?}", r.violations);
        }
    }

    #[test]
    fn color_counts() {
        let xi = Word::from_indices(&[1, 2, 1, 2]);
        for j in 0..=4 {
            for kind in [ColorKind::Arbitrary, ColorKind::Decreasing] {
                assert_eq!(color_map(&xi, j, kind).unwrap().len() as u64, color_map_count(4, j, kind));
            }
        }
        let zero = color_map(&xi, 0, ColorKind::Decreasing).unwrap();
        assert!(zero.terms[0].iter().all(|&(_, c)| c == 0));
        let two = Word::from_indices(&[1, 2]);
        assert_eq!(color_map(&two, 1, ColorKind::Arbitrary).unwrap(), color_map(&two, 1, ColorKind::Decreasing).unwrap());
        assert!(color_map(&two, 3, ColorKind::Arbitrary).is_err());
    }

    #[test]
    fn decreasing_colors_descend() {
        let xi = Word::from_indices(&[1, 1, 1, 1, 1]);
        for term in color_map(&xi, 3, ColorKind::Decreasing).unwrap().terms {
            let colors: Vec<usize> = term.iter().map(|&(_, c)| c).filter(|&c| c > 0).collect();
            assert_eq!(colors, vec![1, 2, 3]);
        }
    }

    #[test]
    fn inclusion_exclusion_small() {
        let r = inclusion_exclusion_verify(2, 1, 1, FaultInjection::default()).unwrap();
        assert_eq!(r.cases, 1);
        assert!(r.passed());
        let r = inclusion_exclusion_verify(1, 0, 2, FaultInjection::default()).unwrap();
        assert!(r.passed());
        let r = inclusion_exclusion_verify(2, 1, 1, FaultInjection { enabled: true }).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn claim_base_cases() {
        let empty = PartialPartition::all_singletons(4, 2);
        for reading in [ClaimReading::PrimePrime, ClaimReading::PrimePlain] {
            assert_eq!(alternating_claim(&empty, reading).unwrap(), QPolynomial::one());
            let one = PartialPartition::new(5, 2, vec![(2, 5)]).unwrap();
            assert!(alternating_claim(&one, reading).unwrap().is_zero());
        }
        let bad = PartialPartition::new(4, 2, vec![(1, 2)]).unwrap();
        assert!(alternating_claim(&bad, ClaimReading::PrimePlain).is_err());
    }

    #[test]
    fn iota_scan_small() {
        let scan = iota_prime_identity_scan(6, FaultInjection::default()).unwrap();
        assert!(scan.report.passed());
        assert!(scan.alternative_orientation_violations > 0);
        assert!(iota_prime_identity_scan(11, FaultInjection::default()).is_err());
        let faulty = iota_prime_identity_scan(6, FaultInjection { enabled: true }).unwrap();
        assert!(!faulty.report.passed());
    }
}
