//! Wick products and moment formulas.
//!
//! `W(ξ)` for a word `ξ = h_1 ⊗ … ⊗ h_n` is expanded over subsets `A` of
//! positions: creations of the letters outside `A` (in order) followed by
//! annihilations of the letters in `A` (in order), weighted by `q^{ι(A)}`
//! where `ι(A)` counts inversions of the representative `(A^c, A)`.

use serde::Serialize;

use crate::combinatorics::{
    combinations, enumerate_pair_partitions, enumerate_partial_partitions, CosetOrientation,
    PairPartition, SubsetCoset,
};
use crate::error::{QfockError, Result};
use crate::fock::{BlockOperator, FockSpace, FockVector, Letter, Word};
use crate::scalars::{rational, Scalar};

/// One summand of the coset expansion of a word.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetTerm<S> {
    pub subset: SubsetCoset,
    pub coefficient: S,
    /// Letters outside the subset, in order.
    pub left: Word,
    /// Letters of the subset, in order.
    pub right: Word,
}

/// Level-`k` coset expansion of a homogeneous vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetExpansion<S> {
    pub degree: usize,
    pub k: usize,
    pub terms: Vec<CosetTerm<S>>,
}

/// Euclidean pairing of two one-particle coordinate vectors.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x.clone() * y.clone();
        }
    }
    acc
}

fn homogeneous_degree<S: Scalar>(xi: &FockVector<S>) -> Result<usize> {
    if xi.is_zero() {
        return Ok(0);
    }
    xi.homogeneous_degree()
        .ok_or_else(|| QfockError::Domain("expected a homogeneous vector; split it by degree first".into()))
}

fn subset_letters(w: &Word, subset: &[usize]) -> Word {
    w.select(subset)
}

/// `R*_{n,k}` on a homogeneous degree-`n` vector.
pub fn r_star<S: Scalar>(space: &FockSpace<S>, xi: &FockVector<S>, k: usize) -> Result<CosetExpansion<S>> {
    space.check_vector(xi)?;
    let n = homogeneous_degree(xi)?;
    if k > n {
        return Err(QfockError::Domain(format!("level k = {k} exceeds degree {n}")));
    }
    let mut terms = Vec::new();
    for (w, c) in xi.terms() {
        for a in combinations(n, k) {
            let subset = SubsetCoset::new(n, a)?;
            let coefficient = space.q_pow(subset.inversions(CosetOrientation::ComplementFirst)) * c.clone();
            let left = subset_letters(w, &subset.complement());
            let right = subset_letters(w, subset.elements());
            terms.push(CosetTerm { subset, coefficient, left, right });
        }
    }
    Ok(CosetExpansion { degree: n, k, terms })
}

/// `W(w)v` for a basis word `w`, without truncation.
fn wick_word_apply<S: Scalar>(space: &FockSpace<S>, w: &Word, v: &FockVector<S>) -> FockVector<S> {
    let n = w.degree();
    let mut out = FockVector::zero();
    let top = v.max_degree().unwrap_or(0);
    for k in 0..=n.min(top) {
        for a in combinations(n, k) {
            let subset = SubsetCoset::new(n, a).expect("combinations yields valid subsets");
            let mut acc = v.clone();
            for &p in subset.elements().iter().rev() {
                acc = space.annihilate_letter(w.letters()[p - 1], &acc);
                if acc.is_zero() {
                    break;
                }
            }
            if acc.is_zero() {
                continue;
            }
            for p in subset.complement().into_iter().rev() {
                acc = space.create_letter(w.letters()[p - 1], &acc);
            }
            out.add_scaled(&acc, &space.q_pow(subset.inversions(CosetOrientation::ComplementFirst)));
        }
    }
    out
}

/// `W(ξ)v` for homogeneous `ξ`, computed on vectors without truncation.
pub fn wick_apply<S: Scalar>(space: &FockSpace<S>, xi: &FockVector<S>, v: &FockVector<S>) -> Result<FockVector<S>> {
    space.check_letters(xi)?;
    space.check_letters(v)?;
    homogeneous_degree(xi)?;
    let mut out = FockVector::zero();
    for (w, c) in xi.terms() {
        out.add_scaled(&wick_word_apply(space, w, v), c);
    }
    Ok(out)
}

/// Block matrix of `W(ξ)` on the given source degrees (all degrees if
/// `None`). Components leaving the truncation are dropped.
pub fn wick_operator<S: Scalar>(
    space: &FockSpace<S>,
    xi: &FockVector<S>,
    sources: Option<std::ops::RangeInclusive<usize>>,
) -> Result<BlockOperator<S>> {
    space.check_vector(xi)?;
    homogeneous_degree(xi)?;
    let sources = sources.unwrap_or_else(|| space.all_degrees());
    Ok(space.operator_from_action(sources, |w| {
        let mut out = FockVector::zero();
        for (x, c) in xi.terms() {
            out.add_scaled(&wick_word_apply(space, x, &FockVector::word(w.clone())), c);
        }
        out
    }))
}

/// `Σ_{σ ∈ P_2(m)} q^{ι(σ)} Π ⟨h_i, h_j⟩`.
pub fn moment_pair_partitions<S: Scalar>(space: &FockSpace<S>, hs: &[Vec<S>]) -> S {
    let mut acc = S::zero();
    for sigma in enumerate_pair_partitions(hs.len()) {
        let weight = pair_weight(&sigma, |a, b| dot(&hs[a - 1], &hs[b - 1]));
        if !weight.is_zero() {
            acc += space.q_pow(sigma.crossings()) * weight;
        }
    }
    acc
}

fn pair_weight<S: Scalar>(sigma: &PairPartition, mut pairing: impl FnMut(usize, usize) -> S) -> S {
    let mut w = S::one();
    for &(a, b) in sigma.pairs() {
        let p = pairing(a, b);
        if p.is_zero() {
            return S::zero();
        }
        w = w * p;
    }
    w
}

fn letter_inner(a: &Letter, b: &Letter) -> bool {
    a == b
}

/// Words over basis letters: `⟨rev x, y⟩_q`.
fn reversed_inner<S: Scalar>(space: &FockSpace<S>, x: &Word, y: &Word) -> S {
    space.word_inner(&x.reversed(), y)
}

/// `τ(W(ξ)W(η)W(θ))` by the subset-sum formula
/// `Σ q^{ι(A)+ι(B)+ι(C)} ⟨ξ_A, η_B⟩⟨ξ_{A^c}, θ_C⟩⟨η_{B^c}, θ_{C^c}⟩`,
/// where each bracket pairs the reversed left word with the right word, `A`
/// and `C` use the complement-first representative and `B` the subset-first
/// one.
pub fn three_wick_trace<S: Scalar>(
    space: &FockSpace<S>,
    xi: &FockVector<S>,
    eta: &FockVector<S>,
    theta: &FockVector<S>,
) -> Result<S> {
    for v in [xi, eta, theta] {
        space.check_vector(v)?;
    }
    let (n, m, l) = (homogeneous_degree(xi)?, homogeneous_degree(eta)?, homogeneous_degree(theta)?);
    if (n + m + l) % 2 == 1 || n + m < l {
        return Ok(S::zero());
    }
    // |A| = |B| = a, |C| = n - a, |C^c| = m - a
    let a = (n + m - l) / 2;
    if a > n || a > m {
        return Ok(S::zero());
    }
    let mut acc = S::zero();
    for (x, cx) in xi.terms() {
        for (y, cy) in eta.terms() {
            for (z, cz) in theta.terms() {
                let t = three_word_trace(space, x, y, z, a);
                if !t.is_zero() {
                    acc += t * cx.clone() * cy.clone() * cz.clone();
                }
            }
        }
    }
    Ok(acc)
}

fn three_word_trace<S: Scalar>(space: &FockSpace<S>, x: &Word, y: &Word, z: &Word, a: usize) -> S {
    let (n, m, l) = (x.degree(), y.degree(), z.degree());
    let mut acc = S::zero();
    for aset in combinations(n, a) {
        let aset = SubsetCoset::new(n, aset).expect("valid subset");
        for bset in combinations(m, a) {
            let bset = SubsetCoset::new(m, bset).expect("valid subset");
            let first = reversed_inner(space, &x.select(aset.elements()), &y.select(bset.elements()));
            if first.is_zero() {
                continue;
            }
            for cset in combinations(l, n - a) {
                let cset = SubsetCoset::new(l, cset).expect("valid subset");
                let second = reversed_inner(space, &x.select(&aset.complement()), &z.select(cset.elements()));
                if second.is_zero() {
                    continue;
                }
                let third = reversed_inner(space, &y.select(&bset.complement()), &z.select(&cset.complement()));
                if third.is_zero() {
                    continue;
                }
                let exp = aset.inversions(CosetOrientation::ComplementFirst)
                    + bset.inversions(CosetOrientation::SubsetFirst)
                    + cset.inversions(CosetOrientation::ComplementFirst);
                acc += space.q_pow(exp) * first.clone() * second * third;
            }
        }
    }
    acc
}

/// `W(ξ_{1..n-k}) W(ξ_{n-k+1..n}) Ω` by the expansion over partial
/// partitions whose pairs straddle the split:
/// `Σ_σ q^{ι(σ)} Π_{pairs} ⟨h_a, h_b⟩ ξ_σ`, with `ξ_σ` the word with the
/// paired letters removed.
pub fn wick_split_product<S: Scalar>(space: &FockSpace<S>, xi: &FockVector<S>, k: usize) -> Result<FockVector<S>> {
    space.check_vector(xi)?;
    let n = homogeneous_degree(xi)?;
    if k > n {
        return Err(QfockError::Domain(format!("split k = {k} exceeds degree {n}")));
    }
    let mut out = FockVector::zero();
    for j in 0..=k.min(n - k) {
        for sigma in enumerate_partial_partitions(n, k, j)? {
            let weight = space.q_pow(sigma.crossings());
            for (w, c) in xi.terms() {
                let letters = w.letters();
                if sigma.pairs().iter().all(|&(a, b)| letter_inner(&letters[a - 1], &letters[b - 1])) {
                    out.add_term(w.select(sigma.singletons()), weight.clone() * c.clone());
                }
            }
        }
    }
    Ok(out)
}

fn colorings(n_colors: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n_colors.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut code| {
        let mut c = vec![0; len];
        for slot in c.iter_mut() {
            *slot = code % n_colors;
            code /= n_colors;
        }
        c
    })
}

/// `N^{-e}` as an exact scalar.
fn inverse_power<S: Scalar>(n: usize, e: usize) -> S {
    S::from_rational(&rational(1, (n as i64).pow(e as u32)))
}

/// Largest `N^m` the colored brute-force evaluations will enumerate.
const MAX_COLORINGS: usize = 1 << 22;

/// `τ(u_N(h_1) ⋯ u_N(h_m))` with `u_N(h) = N^{-1/2} Σ_j s(h ⊗ e_j)`,
/// evaluated by the moment formula on colored letters: every coloring of the
/// `m` positions is enumerated, and a pair contributes only when its two
/// colors agree.
pub fn clt_finite<S: Scalar>(space: &FockSpace<S>, n_colors: usize, hs: &[Vec<S>]) -> Result<S> {
    if n_colors == 0 {
        return Err(QfockError::Domain("N must be at least 1".into()));
    }
    let m = hs.len();
    if m % 2 == 1 {
        return Ok(S::zero());
    }
    if n_colors.checked_pow(m as u32).is_none_or(|t| t > MAX_COLORINGS) {
        return Err(QfockError::Resource(format!("{n_colors}^{m} colorings exceed the enumeration bound")));
    }
    let partitions: Vec<PairPartition> = enumerate_pair_partitions(m).collect();
    let mut counts = vec![0i64; partitions.len()];
    for c in colorings(n_colors, m) {
        for (i, sigma) in partitions.iter().enumerate() {
            if sigma.pairs().iter().all(|&(a, b)| c[a - 1] == c[b - 1]) {
                counts[i] += 1;
            }
        }
    }
    let mut acc = S::zero();
    for (sigma, count) in partitions.iter().zip(counts) {
        let weight = pair_weight(sigma, |a, b| dot(&hs[a - 1], &hs[b - 1]));
        acc += space.q_pow(sigma.crossings()) * weight * S::from_i64(count);
    }
    Ok(acc * inverse_power(n_colors, m / 2))
}

/// Both sides of the finite-`N` off-diagonal Wick coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct OffDiagonal<S> {
    /// `N^{-m} Σ_k Σ_{j distinct} τ(s_{k_m}(f_m)⋯s_{k_1}(f_1) s_{j_1}(h_1)⋯s_{j_m}(h_m))`.
    pub colored: S,
    /// `N^{-m} Π_{i<m}(N-i) ⟨f_1⊗…⊗f_m, h_1⊗…⊗h_m⟩_q`.
    pub closed_form: S,
}

pub fn offdiag_wick_coefficient<S: Scalar>(
    space: &FockSpace<S>,
    n_colors: usize,
    fs: &[Vec<S>],
    hs: &[Vec<S>],
) -> Result<OffDiagonal<S>> {
    if n_colors == 0 {
        return Err(QfockError::Domain("N must be at least 1".into()));
    }
    let m = hs.len();
    if fs.len() != m {
        return Err(QfockError::SpaceMismatch(format!("{} left vectors but {m} right vectors", fs.len())));
    }
    if n_colors.checked_pow(2 * m as u32).is_none_or(|t| t > MAX_COLORINGS) {
        return Err(QfockError::Resource(format!("{n_colors}^{} colorings exceed the enumeration bound", 2 * m)));
    }
    // positions 1..m carry f_m..f_1, positions m+1..2m carry h_1..h_m
    let letters: Vec<&Vec<S>> = fs.iter().rev().chain(hs.iter()).collect();
    let partitions: Vec<PairPartition> = enumerate_pair_partitions(2 * m).collect();
    let mut counts = vec![0i64; partitions.len()];
    for left in colorings(n_colors, m) {
        for right in colorings(n_colors, m) {
            let distinct = (0..m).all(|a| (a + 1..m).all(|b| right[a] != right[b]));
            if !distinct {
                continue;
            }
            let color = |p: usize| if p <= m { left[p - 1] } else { right[p - m - 1] };
            for (i, sigma) in partitions.iter().enumerate() {
                if sigma.pairs().iter().all(|&(a, b)| color(a) == color(b)) {
                    counts[i] += 1;
                }
            }
        }
    }
    let mut colored = S::zero();
    for (sigma, count) in partitions.iter().zip(counts) {
        if count == 0 {
            continue;
        }
        let weight = pair_weight(sigma, |a, b| dot(letters[a - 1], letters[b - 1]));
        colored += space.q_pow(sigma.crossings()) * weight * S::from_i64(count);
    }
    colored = colored * inverse_power(n_colors, m);

    let falling: i64 = (0..m).map(|i| n_colors as i64 - i as i64).product::<i64>().max(0);
    let f = space.tensor_of(fs)?;
    let h = space.tensor_of(hs)?;
    let closed_form = space.q_inner(&f, &h) * S::from_i64(falling) * inverse_power(n_colors, m);
    Ok(OffDiagonal { colored, closed_form })
}

/// `τ(s(h_1) ⋯ s(h_m))` from materialized field operators; the space must
/// reach degree `m / 2`.
pub fn vacuum_moment_matrix<S: Scalar>(space: &FockSpace<S>, hs: &[Vec<S>]) -> Result<S> {
    if space.max_degree() < hs.len() / 2 {
        return Err(QfockError::Domain(format!(
            "truncation degree {} is too small for a moment of order {}",
            space.max_degree(),
            hs.len()
        )));
    }
    let mut v = FockVector::vacuum();
    for h in hs.iter().rev() {
        let f = space.field_operator(h)?;
        v = space.apply(&f, &v)?;
    }
    Ok(v.coefficient(&Word::empty()))
}

/// Scalar identity operator times `c`, i.e. `W(cΩ)`.
pub fn scalar_operator<S: Scalar>(space: &FockSpace<S>, c: S) -> BlockOperator<S> {
    if c.is_one() {
        space.identity()
    } else {
        space.identity().scale(&c)
    }
}
