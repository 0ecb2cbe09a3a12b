//! Degree-truncated q-Fock space over a real one-particle space of dimension
//! `d` (or its double `H ⊕ H`).
//!
//! Vectors are sparse maps from basis words to coefficients. Operators are
//! stored as dense blocks between degrees, indexed by `(target, source)`.
//! Creation out of the top degree is dropped, so any identity involving `c`
//! creations is exact on inputs of degree at most `max_degree - c`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{QfockError, Result};
use crate::linalg::{operator_norm, DenseMatrix, GramFactor};
use crate::scalars::{QPolynomial, Scalar, ScalarMode};

/// Default bound on the total number of basis words of a truncated space.
pub const DEFAULT_MAX_DIM: usize = 5000;

/// Which summand of `H ⊕ H` a letter belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CopyId {
    First,
    Second,
}

/// Basis vector `e_index` of one copy of the one-particle space.
/// Ordering puts every first-copy letter before every second-copy letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Letter {
    pub copy: CopyId,
    /// 1-based.
    pub index: usize,
}

impl Letter {
    pub fn first(index: usize) -> Self {
        Letter { copy: CopyId::First, index }
    }

    pub fn second(index: usize) -> Self {
        Letter { copy: CopyId::Second, index }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.copy {
            CopyId::First => write!(f, "e{}", self.index),
            CopyId::Second => write!(f, "~e{}", self.index),
        }
    }
}

/// Simple tensor of basis letters. Words compare by length first, then
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// First-copy word from 1-based indices.
    pub fn from_indices(indices: &[usize]) -> Self {
        Word(indices.iter().map(|&i| Letter::first(i)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Letters at the given 1-based positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Word {
        Word(positions.iter().map(|&p| self.0[p - 1]).collect())
    }

    /// The word with the 0-based position `pos` deleted.
    pub fn without(&self, pos: usize) -> Word {
        let mut v = self.0.clone();
        v.remove(pos);
        Word(v)
    }

    pub fn prepend(&self, letter: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn second_copy_count(&self) -> usize {
        self.0.iter().filter(|l| l.copy == CopyId::Second).count()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("Ω");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join("⊗"))
    }
}

/// Sparse vector of the (algebraic) Fock space. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    terms: BTreeMap<Word, S>,
}

impl<S: Scalar> Default for FockVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> FockVector<S> {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    pub fn vacuum() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, S::one())
    }

    pub fn term(w: Word, c: S) -> Self {
        let mut v = Self::zero();
        v.add_term(w, c);
        v
    }

    pub fn add_term(&mut self, w: Word, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &S)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Word, S)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, w: &Word) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::degree).max()
    }

    /// Degree if every term has the same degree.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(Word::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &S) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), c.clone() * s.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-S::one());
        out
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, s);
        out
    }

    /// Bilinear extension of word concatenation.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a.clone() * b.clone());
            }
        }
        out
    }

    /// Reverse every word (the vector of `W(ξ)*` for real coefficients).
    pub fn reversed(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.reversed(), c.clone());
        }
        out
    }

    /// Keep only the terms whose word satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> Self {
        FockVector {
            terms: self.terms.iter().filter(|(w, _)| keep(w)).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn map_coefficients<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> FockVector<T> {
        let mut out = FockVector::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Equality up to `tol` per coefficient (exact in polynomial mode).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.sub(other);
        diff.terms.values().all(|c| c.approx_eq(&S::zero(), tol))
    }
}

impl<S: Scalar> fmt::Display for FockVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("({c})·{w}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Orthogonal projection onto the degree-`n` component.
pub fn degree_projection<S: Scalar>(v: &FockVector<S>, n: usize) -> FockVector<S> {
    v.filter(|w| w.degree() == n)
}

/// How [`FockSpace::copy_count_projection`] selects words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMode {
    /// Exactly `m` second-copy letters (the subspace `F_m`).
    Exact,
    /// At least `m` second-copy letters (the complement of `E_{m-1}`).
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LadderKind {
    Create,
    Annihilate,
}

/// Shape of a truncated space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceConfig {
    /// Dimension of one copy of the one-particle space.
    pub d: usize,
    /// 1 for `H`, 2 for `H ⊕ H`.
    pub copies: usize,
    /// Truncation degree `N`.
    pub max_degree: usize,
}

impl SpaceConfig {
    pub fn new(d: usize, copies: usize, max_degree: usize) -> Self {
        SpaceConfig { d, copies, max_degree }
    }

    pub fn letters_per_copy(&self) -> usize {
        self.d
    }

    pub fn one_particle_dim(&self) -> usize {
        self.d * self.copies
    }

    pub fn total_dim(&self) -> usize {
        let base = self.one_particle_dim();
        (0..=self.max_degree).map(|n| base.saturating_pow(n as u32)).fold(0usize, usize::saturating_add)
    }
}

/// Matrix of an operator between degree blocks; missing blocks are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator<S> {
    dims: Vec<usize>,
    blocks: BTreeMap<(usize, usize), DenseMatrix<S>>,
}

impl<S: Scalar> BlockOperator<S> {
    pub fn zero(dims: Vec<usize>) -> Self {
        BlockOperator { dims, blocks: BTreeMap::new() }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let blocks = dims.iter().enumerate().map(|(n, &d)| ((n, n), DenseMatrix::identity(d))).collect();
        BlockOperator { dims, blocks }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn max_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn block(&self, target: usize, source: usize) -> Option<&DenseMatrix<S>> {
        self.blocks.get(&(target, source))
    }

    /// Block `(target, source)`, materializing zeros if absent.
    pub fn block_or_zero(&self, target: usize, source: usize) -> DenseMatrix<S> {
        self.blocks
            .get(&(target, source))
            .cloned()
            .unwrap_or_else(|| DenseMatrix::zeros(self.dims[target], self.dims[source]))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &DenseMatrix<S>)> {
        self.blocks.iter()
    }

    pub fn set_block(&mut self, target: usize, source: usize, m: DenseMatrix<S>) {
        assert_eq!((m.rows(), m.cols()), (self.dims[target], self.dims[source]), "block shape mismatch");
        if m.is_zero() {
            self.blocks.remove(&(target, source));
        } else {
            self.blocks.insert((target, source), m);
        }
    }

    fn accumulate(&mut self, target: usize, source: usize, m: DenseMatrix<S>) {
        let next = match self.blocks.remove(&(target, source)) {
            Some(prev) => &prev + &m,
            None => m,
        };
        self.set_block(target, source, next);
    }

    /// Operator product `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!(self.dims, rhs.dims, "operators live on different spaces");
        let mut out = Self::zero(self.dims.clone());
        for (&(t, m), a) in &self.blocks {
            for (&(m2, s), b) in rhs.blocks.range((m, 0)..=(m, usize::MAX)) {
                debug_assert_eq!(m, m2);
                out.accumulate(t, s, a * b);
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dims, rhs.dims, "operators live on different spaces");
        let mut out = self.clone();
        for (&(t, s), b) in &rhs.blocks {
            out.accumulate(t, s, b.clone());
        }
        out
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.dims.clone());
        for (&(t, s), b) in &self.blocks {
            out.set_block(t, s, b.scale(c));
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-S::one()))
    }

    /// The `(Ω, Ω)` matrix element, i.e. the vacuum state `τ(A)`.
    pub fn vacuum_expectation(&self) -> S {
        self.block(0, 0).map(|b| b.get(0, 0).clone()).unwrap_or_else(S::zero)
    }

    /// Keep only blocks whose source degree lies in `sources` and target
    /// degree in `targets`.
    pub fn restrict(&self, sources: std::ops::RangeInclusive<usize>, targets: std::ops::RangeInclusive<usize>) -> Self {
        let mut out = Self::zero(self.dims.clone());
        for (&(t, s), b) in &self.blocks {
            if sources.contains(&s) && targets.contains(&t) {
                out.set_block(t, s, b.clone());
            }
        }
        out
    }

    /// Largest entrywise difference over all blocks (floating mode).
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        let mut keys: Vec<(usize, usize)> = self.blocks.keys().chain(other.blocks.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().try_fold(0.0f64, |m, (t, s)| {
            self.block_or_zero(t, s).max_abs_diff(&other.block_or_zero(t, s)).map(|d| m.max(d))
        })
    }
}

/// Truncated Fock space with its word bases and the deformation parameter
/// stored as a value of the scalar ring.
pub struct FockSpace<S> {
    cfg: SpaceConfig,
    q: S,
    bases: Vec<Vec<Word>>,
    index: Vec<HashMap<Word, usize>>,
    gram_factors: Vec<OnceLock<std::result::Result<GramFactor, f64>>>,
}

impl FockSpace<QPolynomial> {
    /// Space over generic `q`.
    pub fn exact(cfg: SpaceConfig) -> Result<Self> {
        Self::new(cfg, QPolynomial::q())
    }
}

impl FockSpace<f64> {
    /// Space at a fixed numerical `q` with `|q| < 1`.
    pub fn float(cfg: SpaceConfig, q: f64) -> Result<Self> {
        ScalarMode::float(q)?;
        Self::new(cfg, q)
    }
}

impl<S: Scalar> FockSpace<S> {
    pub fn new(cfg: SpaceConfig, q: S) -> Result<Self> {
        Self::with_limit(cfg, q, DEFAULT_MAX_DIM)
    }

    pub fn with_limit(cfg: SpaceConfig, q: S, max_dim: usize) -> Result<Self> {
        if cfg.d == 0 {
            return Err(QfockError::Domain("one-particle dimension must be at least 1".into()));
        }
        if cfg.copies != 1 && cfg.copies != 2 {
            return Err(QfockError::Domain(format!("copies must be 1 or 2, got {}", cfg.copies)));
        }
        let total = cfg.total_dim();
        if total > max_dim {
            return Err(QfockError::Resource(format!(
                "truncated space has {total} basis words, above the limit of {max_dim}"
            )));
        }
        let letters: Vec<Letter> = [CopyId::First, CopyId::Second][..cfg.copies]
            .iter()
            .flat_map(|&copy| (1..=cfg.d).map(move |index| Letter { copy, index }))
            .collect();
        let mut bases = vec![vec![Word::empty()]];
        for n in 1..=cfg.max_degree {
            let prev = &bases[n - 1];
            let mut next = Vec::with_capacity(prev.len() * letters.len());
            for w in prev {
                for &l in &letters {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            bases.push(next);
        }
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect())
            .collect();
        let gram_factors = (0..=cfg.max_degree).map(|_| OnceLock::new()).collect();
        Ok(FockSpace { cfg, q, bases, index, gram_factors })
    }

    pub fn config(&self) -> SpaceConfig {
        self.cfg
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn q_pow(&self, k: usize) -> S {
        self.q.pow(k as u32)
    }

    pub fn max_degree(&self) -> usize {
        self.cfg.max_degree
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Word basis of one degree, lexicographic with first-copy letters first.
    pub fn enumerate_words(&self, degree: usize) -> Result<&[Word]> {
        self.bases.get(degree).map(Vec::as_slice).ok_or_else(|| {
            QfockError::Domain(format!("degree {degree} exceeds the truncation degree {}", self.cfg.max_degree))
        })
    }

    pub fn index_of(&self, w: &Word) -> Option<usize> {
        self.index.get(w.degree())?.get(w).copied()
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        self.index_of(w).is_some()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if self.contains_word(w) {
            Ok(())
        } else {
            Err(QfockError::SpaceMismatch(format!("word {w} is not in the configured space")))
        }
    }

    pub fn check_vector(&self, v: &FockVector<S>) -> Result<()> {
        v.terms().try_for_each(|(w, _)| self.check_word(w))
    }

    /// Like [`check_vector`](Self::check_vector) but allows any degree.
    pub fn check_letters(&self, v: &FockVector<S>) -> Result<()> {
        let d = self.cfg.d;
        let copies = self.cfg.copies;
        v.terms().try_for_each(|(w, _)| {
            let ok = w.letters().iter().all(|l| {
                l.index >= 1 && l.index <= d && (copies == 2 || l.copy == CopyId::First)
            });
            if ok {
                Ok(())
            } else {
                Err(QfockError::SpaceMismatch(format!("word {w} uses letters outside the configured space")))
            }
        })
    }

    pub fn one_particle_dim(&self) -> usize {
        self.cfg.one_particle_dim()
    }

    pub fn letter_position(&self, l: Letter) -> usize {
        let copy = match l.copy {
            CopyId::First => 0,
            CopyId::Second => 1,
        };
        copy * self.cfg.d + l.index - 1
    }

    pub fn letter_at(&self, pos: usize) -> Letter {
        let copy = if pos < self.cfg.d { CopyId::First } else { CopyId::Second };
        Letter { copy, index: pos % self.cfg.d + 1 }
    }

    /// Coordinate vector of a single letter in the one-particle space.
    pub fn unit(&self, l: Letter) -> Vec<S> {
        let mut h = vec![S::zero(); self.one_particle_dim()];
        h[self.letter_position(l)] = S::one();
        h
    }

    fn check_one_particle(&self, h: &[S]) -> Result<()> {
        if h.len() == self.one_particle_dim() {
            Ok(())
        } else {
            Err(QfockError::SpaceMismatch(format!(
                "one-particle vector has length {}, expected {}",
                h.len(),
                self.one_particle_dim()
            )))
        }
    }

    /// `⟨u, v⟩_q` on basis words, by expanding over the position the first
    /// letter of `u` is matched to (the `j`-th match contributes `q^{j-1}`).
    pub fn word_inner(&self, u: &Word, v: &Word) -> S {
        if u.degree() != v.degree() {
            return S::zero();
        }
        let mut cu = u.0.clone();
        let mut cv = v.0.clone();
        cu.sort_unstable();
        cv.sort_unstable();
        if cu != cv {
            return S::zero();
        }
        self.word_inner_rec(&u.0, &v.0)
    }

    fn word_inner_rec(&self, u: &[Letter], v: &[Letter]) -> S {
        let Some((first, rest)) = u.split_first() else {
            return S::one();
        };
        let mut acc = S::zero();
        for (j, l) in v.iter().enumerate() {
            if l == first {
                let mut remaining = v.to_vec();
                remaining.remove(j);
                let inner = self.word_inner_rec(rest, &remaining);
                if !inner.is_zero() {
                    acc += self.q_pow(j) * inner;
                }
            }
        }
        acc
    }

    /// Bilinear q-inner product; distinct degrees are orthogonal.
    pub fn q_inner(&self, v: &FockVector<S>, w: &FockVector<S>) -> S {
        let mut acc = S::zero();
        for (a, x) in v.terms() {
            for (b, y) in w.terms() {
                if a.degree() == b.degree() {
                    let g = self.word_inner(a, b);
                    if !g.is_zero() {
                        acc += x.clone() * y.clone() * g;
                    }
                }
            }
        }
        acc
    }

    pub fn checked_q_inner(&self, v: &FockVector<S>, w: &FockVector<S>) -> Result<S> {
        self.check_vector(v)?;
        self.check_vector(w)?;
        Ok(self.q_inner(v, w))
    }

    /// Gram matrix of the degree-`n` word basis.
    pub fn gram_matrix(&self, degree: usize) -> Result<DenseMatrix<S>> {
        let basis = self.enumerate_words(degree)?;
        let mut g = DenseMatrix::zeros(basis.len(), basis.len());
        // only rearrangements of each other have nonzero entries
        let mut classes: HashMap<Vec<Letter>, Vec<usize>> = HashMap::new();
        for (i, w) in basis.iter().enumerate() {
            let mut key = w.0.clone();
            key.sort_unstable();
            classes.entry(key).or_default().push(i);
        }
        for members in classes.values() {
            for &i in members {
                for &j in members {
                    if j < i {
                        continue;
                    }
                    let v = self.word_inner_rec(&basis[i].0, &basis[j].0);
                    g.set(j, i, v.clone());
                    g.set(i, j, v);
                }
            }
        }
        Ok(g)
    }

    /// `l(h)v` without truncation.
    pub fn create(&self, h: &[S], v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (pos, c) in h.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let l = self.letter_at(pos);
            for (w, a) in v.terms() {
                out.add_term(w.prepend(l), c.clone() * a.clone());
            }
        }
        out
    }

    /// `l*(h)v`: the `j`-th letter is removed with weight `q^{j-1}⟨h, h_j⟩`.
    pub fn annihilate(&self, h: &[S], v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (w, a) in v.terms() {
            for (j, &l) in w.letters().iter().enumerate() {
                let c = &h[self.letter_position(l)];
                if c.is_zero() {
                    continue;
                }
                out.add_term(w.without(j), self.q_pow(j) * c.clone() * a.clone());
            }
        }
        out
    }

    pub fn create_letter(&self, l: Letter, v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (w, a) in v.terms() {
            out.add_term(w.prepend(l), a.clone());
        }
        out
    }

    pub fn annihilate_letter(&self, l: Letter, v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (w, a) in v.terms() {
            for (j, &m) in w.letters().iter().enumerate() {
                if m == l {
                    out.add_term(w.without(j), self.q_pow(j) * a.clone());
                }
            }
        }
        out
    }

    /// Materialize an operator from its action on basis words of the given
    /// source degrees. Components above the truncation degree are dropped.
    pub fn operator_from_action(
        &self,
        sources: impl IntoIterator<Item = usize>,
        mut action: impl FnMut(&Word) -> FockVector<S>,
    ) -> BlockOperator<S> {
        let dims = self.dims();
        let mut out = BlockOperator::zero(dims.clone());
        for s in sources {
            if s > self.cfg.max_degree {
                continue;
            }
            let mut cols: BTreeMap<usize, DenseMatrix<S>> = BTreeMap::new();
            for (ci, w) in self.bases[s].iter().enumerate() {
                for (tw, c) in action(w).into_terms() {
                    let t = tw.degree();
                    if t > self.cfg.max_degree {
                        continue;
                    }
                    let Some(ri) = self.index[t].get(&tw).copied() else { continue };
                    cols.entry(t).or_insert_with(|| DenseMatrix::zeros(dims[t], dims[s])).add_at(ri, ci, c);
                }
            }
            for (t, m) in cols {
                out.set_block(t, s, m);
            }
        }
        out
    }

    pub fn all_degrees(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.cfg.max_degree
    }

    pub fn identity(&self) -> BlockOperator<S> {
        BlockOperator::identity(self.dims())
    }

    pub fn ladder(&self, h: &[S], kind: LadderKind) -> Result<BlockOperator<S>> {
        self.check_one_particle(h)?;
        Ok(match kind {
            LadderKind::Create => {
                self.operator_from_action(self.all_degrees(), |w| self.create(h, &FockVector::word(w.clone())))
            }
            LadderKind::Annihilate => {
                self.operator_from_action(self.all_degrees(), |w| self.annihilate(h, &FockVector::word(w.clone())))
            }
        })
    }

    /// `s(h) = l(h) + l*(h)`.
    pub fn field_operator(&self, h: &[S]) -> Result<BlockOperator<S>> {
        self.check_one_particle(h)?;
        Ok(self.operator_from_action(self.all_degrees(), |w| {
            let v = FockVector::word(w.clone());
            self.create(h, &v).add(&self.annihilate(h, &v))
        }))
    }

    /// `h_1 ⊗ … ⊗ h_m` expanded in the word basis.
    pub fn tensor_of(&self, hs: &[Vec<S>]) -> Result<FockVector<S>> {
        let mut acc = FockVector::<S>::vacuum();
        for h in hs {
            self.check_one_particle(h)?;
            let mut next = FockVector::zero();
            for (w, c) in acc.terms() {
                for (pos, x) in h.iter().enumerate() {
                    if !x.is_zero() {
                        let mut letters = w.letters().to_vec();
                        letters.push(self.letter_at(pos));
                        next.add_term(Word::new(letters), c.clone() * x.clone());
                    }
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// `u^{⊗n}` applied to a vector, degree by degree.
    pub fn tensor_power_apply(&self, u: &DenseMatrix<S>, v: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (w, c) in v.terms() {
            let mut acc = FockVector::term(Word::empty(), c.clone());
            for &l in w.letters() {
                let col = self.letter_position(l);
                let mut next = FockVector::zero();
                for (pw, pc) in acc.terms() {
                    for row in 0..u.rows() {
                        let x = u.get(row, col);
                        if x.is_zero() {
                            continue;
                        }
                        let mut letters = pw.0.clone();
                        letters.push(self.letter_at(row));
                        next.add_term(Word(letters), pc.clone() * x.clone());
                    }
                }
                acc = next;
            }
            out.add_assign(&acc);
        }
        out
    }

    /// Second quantization of a one-particle contraction: `u^{⊗n}` on each
    /// degree. Contractivity is checked whenever the entries are numbers.
    pub fn second_quantize(&self, u: &DenseMatrix<S>) -> Result<BlockOperator<S>> {
        let n = self.one_particle_dim();
        if u.rows() != n || u.cols() != n {
            return Err(QfockError::SpaceMismatch(format!(
                "one-particle map is {}x{}, expected {n}x{n}",
                u.rows(),
                u.cols()
            )));
        }
        let numeric: Option<Vec<f64>> =
            (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| u.get(r, c).to_f64()).collect();
        if let Some(vals) = numeric {
            let norm = operator_norm(&DMatrix::from_row_slice(n, n, &vals));
            if norm > 1.0 + 1e-12 {
                return Err(QfockError::Domain(format!("one-particle map has norm {norm} > 1")));
            }
        }
        Ok(self.operator_from_action(self.all_degrees(), |w| self.tensor_power_apply(u, &FockVector::word(w.clone()))))
    }

    /// Apply a block operator to a vector; components outside the truncation
    /// are an error.
    pub fn apply(&self, op: &BlockOperator<S>, v: &FockVector<S>) -> Result<FockVector<S>> {
        self.check_vector(v)?;
        let mut out = FockVector::zero();
        for s in self.all_degrees() {
            let comp: Vec<S> = self.coordinates(v, s);
            if comp.iter().all(S::is_zero) {
                continue;
            }
            for (&(t, s2), block) in op.blocks() {
                if s2 != s {
                    continue;
                }
                let image = block.mul_vec(&comp);
                for (i, c) in image.into_iter().enumerate() {
                    out.add_term(self.bases[t][i].clone(), c);
                }
            }
        }
        Ok(out)
    }

    /// Coordinates of the degree-`n` component in the word basis.
    pub fn coordinates(&self, v: &FockVector<S>, n: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.bases.get(n).map_or(0, Vec::len)];
        for (w, c) in v.terms() {
            if w.degree() == n {
                if let Some(i) = self.index_of(w) {
                    out[i] = c.clone();
                }
            }
        }
        out
    }

    pub fn from_coordinates(&self, n: usize, coords: &[S]) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (i, c) in coords.iter().enumerate() {
            out.add_term(self.bases[n][i].clone(), c.clone());
        }
        out
    }

    /// Restriction to words with exactly / at least `m` second-copy letters.
    pub fn copy_count_projection(&self, v: &FockVector<S>, m: usize, mode: CountMode) -> Result<FockVector<S>> {
        if self.cfg.copies != 2 {
            return Err(QfockError::Domain("copy-count projections need the doubled space".into()));
        }
        Ok(v.filter(|w| match mode {
            CountMode::Exact => w.second_copy_count() == m,
            CountMode::AtLeast => w.second_copy_count() >= m,
        }))
    }

    /// Conditional expectation onto the first copy, `Γ(P_1)`, at vector level.
    pub fn first_copy_expectation(&self, v: &FockVector<S>) -> Result<FockVector<S>> {
        self.copy_count_projection(v, 0, CountMode::Exact)
    }

    /// Coordinate projection of `H ⊕ H` onto one of the copies.
    pub fn copy_projection(&self, copy: CopyId) -> DenseMatrix<S> {
        let n = self.one_particle_dim();
        DenseMatrix::from_fn(n, n, |r, c| {
            if r == c && self.letter_at(r).copy == copy {
                S::one()
            } else {
                S::zero()
            }
        })
    }

    /// Compress an operator on the doubled space to the first-copy words and
    /// re-express it on `single`, the space over one copy.
    pub fn first_copy_compression(&self, op: &BlockOperator<S>, single: &FockSpace<S>) -> Result<BlockOperator<S>> {
        if self.cfg.copies != 2 || single.cfg.copies != 1 || single.cfg.d != self.cfg.d {
            return Err(QfockError::SpaceMismatch("compression needs a doubled space and its first copy".into()));
        }
        let top = single.cfg.max_degree.min(self.cfg.max_degree);
        let mut out = BlockOperator::zero(single.dims());
        for (&(t, s), block) in op.blocks() {
            if t > top || s > top {
                continue;
            }
            let rows: Vec<usize> = single.bases[t].iter().map(|w| self.index[t][w]).collect();
            let cols: Vec<usize> = single.bases[s].iter().map(|w| self.index[s][w]).collect();
            let m = DenseMatrix::from_fn(rows.len(), cols.len(), |r, c| block.get(rows[r], cols[c]).clone());
            out.set_block(t, s, m);
        }
        Ok(out)
    }
}

impl FockSpace<f64> {
    pub fn gram_factor(&self, degree: usize) -> Result<&GramFactor> {
        let slot = self
            .gram_factors
            .get(degree)
            .ok_or_else(|| QfockError::Domain(format!("degree {degree} exceeds the truncation degree")))?;
        let res = slot.get_or_init(|| {
            let g = self.gram_matrix(degree).expect("degree checked above").to_nalgebra();
            GramFactor::new(&g, degree).map_err(|e| match e {
                QfockError::GramFactorization { min_eigenvalue, .. } => min_eigenvalue,
                _ => f64::NAN,
            })
        });
        res.as_ref().map_err(|&min_eigenvalue| QfockError::GramFactorization { degree, min_eigenvalue })
    }

    pub fn q_norm(&self, v: &FockVector<f64>) -> f64 {
        self.q_inner(v, v).max(0.0).sqrt()
    }

    /// Adjoint with respect to the q-inner product: block `(s, t)` of the
    /// result is `G_s^{-1} A_{ts}^T G_t`.
    pub fn q_adjoint(&self, op: &BlockOperator<f64>) -> Result<BlockOperator<f64>> {
        let mut out = BlockOperator::zero(self.dims());
        for (&(t, s), block) in op.blocks() {
            let gt = self.gram_matrix(t)?.to_nalgebra();
            let gs_inv = &self.gram_factor(s)?.inverse;
            let adj = gs_inv * block.to_nalgebra().transpose() * gt;
            out.set_block(s, t, DenseMatrix::from_nalgebra(&adj));
        }
        Ok(out)
    }

    /// Rotation `R_t` of `H ⊕ H`.
    pub fn rotation(&self, t: f64) -> Result<DenseMatrix<f64>> {
        if self.cfg.copies != 2 {
            return Err(QfockError::Domain("the rotation acts on the doubled space".into()));
        }
        let d = self.cfg.d;
        let c = (-t).exp();
        let s = (1.0 - (-2.0 * t).exp()).sqrt();
        Ok(DenseMatrix::from_fn(2 * d, 2 * d, |r, col| {
            let (br, ir) = (r / d, r % d);
            let (bc, ic) = (col / d, col % d);
            if ir != ic {
                return 0.0;
            }
            match (br, bc) {
                (0, 0) | (1, 1) => c,
                (0, 1) => -s,
                _ => s,
            }
        }))
    }
}

/// `c · Id` on a one-particle space of dimension `n`.
pub fn scalar_one_particle<S: Scalar>(n: usize, c: S) -> DenseMatrix<S> {
    DenseMatrix::identity(n).scale(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::permutations;
    use num_traits::{One, Zero};

    fn qp(c: &[i64]) -> QPolynomial {
        QPolynomial::from_i64_coeffs(c)
    }

    fn exact(d: usize, copies: usize, n: usize) -> FockSpace<QPolynomial> {
        FockSpace::exact(SpaceConfig::new(d, copies, n)).unwrap()
    }

    fn w(ix: &[usize]) -> FockVector<QPolynomial> {
        FockVector::word(Word::from_indices(ix))
    }

    /// Defining permutation sum for basis words.
    fn brute_inner(u: &Word, v: &Word) -> QPolynomial {
        if u.degree() != v.degree() {
            return QPolynomial::zero();
        }
        let mut acc = QPolynomial::zero();
        for p in permutations(u.degree()) {
            if (1..=u.degree()).all(|j| u.letters()[j - 1] == v.letters()[p.apply(j) - 1]) {
                acc += QPolynomial::monomial(p.inversions());
            }
        }
        acc
    }

    #[test]
    fn word_enumeration() {
        let s = exact(2, 1, 3);
        assert_eq!(s.enumerate_words(0).unwrap(), &[Word::empty()]);
        assert_eq!(s.enumerate_words(2).unwrap().len(), 4);
        assert!(s.enumerate_words(4).is_err());
        let dbl = exact(2, 2, 2);
        let deg1 = dbl.enumerate_words(1).unwrap();
        assert_eq!(deg1, &[Word::new(vec![Letter::first(1)]), Word::new(vec![Letter::first(2)]),
            Word::new(vec![Letter::second(1)]), Word::new(vec![Letter::second(2)])]);
        let deg2 = dbl.enumerate_words(2).unwrap();
        assert!(deg2.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn q_inner_examples() {
        let s = exact(2, 1, 3);
        assert_eq!(s.q_inner(&w(&[1, 1]), &w(&[1, 1])), qp(&[1, 1]));
        assert_eq!(s.q_inner(&w(&[1, 2]), &w(&[2, 1])), qp(&[0, 1]));
        assert_eq!(s.q_inner(&w(&[1]), &w(&[1, 1])), QPolynomial::zero());
        let other = exact(3, 1, 1);
        assert!(s.checked_q_inner(&w(&[3]), &w(&[3])).is_err());
        assert!(other.checked_q_inner(&w(&[3]), &w(&[3])).is_ok());
    }

    #[test]
    fn word_inner_matches_permutation_sum() {
        let s = exact(2, 2, 4);
        for n in 0..=4 {
            let basis = s.enumerate_words(n).unwrap();
            for u in basis.iter().step_by(3) {
                for v in basis {
                    assert_eq!(s.word_inner(u, v), brute_inner(u, v), "{u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn gram_examples() {
        let s = exact(3, 1, 2);
        assert_eq!(s.gram_matrix(1).unwrap(), DenseMatrix::identity(3));
        let one = exact(1, 1, 2);
        assert_eq!(*one.gram_matrix(2).unwrap().get(0, 0), qp(&[1, 1]));
        let free = FockSpace::float(SpaceConfig::new(2, 1, 4), 0.0).unwrap();
        for n in 0..=4 {
            let g = free.gram_matrix(n).unwrap();
            assert_eq!(g, DenseMatrix::identity(g.rows()));
        }
        assert!(FockSpace::float(SpaceConfig::new(2, 1, 2), 1.0).is_err());
    }

    #[test]
    fn ladder_examples() {
        let s = exact(2, 1, 3);
        let e1 = s.unit(Letter::first(1));
        let create = s.ladder(&e1, LadderKind::Create).unwrap();
        let ann = s.ladder(&e1, LadderKind::Annihilate).unwrap();
        assert_eq!(s.apply(&create, &FockVector::vacuum()).unwrap(), w(&[1]));
        assert_eq!(s.apply(&ann, &w(&[2, 1])).unwrap(), FockVector::term(Word::from_indices(&[2]), QPolynomial::q()));
        assert!(s.apply(&ann, &FockVector::vacuum()).unwrap().is_zero());
        assert!(s.ladder(&[QPolynomial::one()], LadderKind::Create).is_err());
        // creation out of the top degree is dropped
        assert!(create.block(4, 3).is_none());
        assert_eq!(create.blocks().count(), 3);
    }

    #[test]
    fn field_operator_moments() {
        let s = exact(1, 1, 4);
        let e1 = s.unit(Letter::first(1));
        let f = s.field_operator(&e1).unwrap();
        assert_eq!(s.apply(&f, &FockVector::vacuum()).unwrap(), w(&[1]));
        let f2 = f.compose(&f);
        assert_eq!(f2.vacuum_expectation(), QPolynomial::one());
        let f4 = f2.compose(&f2);
        assert_eq!(f4.vacuum_expectation(), qp(&[2, 1]));
        assert_eq!(f2.compose(&f).vacuum_expectation(), QPolynomial::zero());
        assert_eq!(s.identity().vacuum_expectation(), QPolynomial::one());
    }

    #[test]
    fn adjointness_exact() {
        let s = exact(2, 1, 4);
        for l in [Letter::first(1), Letter::first(2)] {
            let h = s.unit(l);
            for a in 0..=3 {
                for xi in s.enumerate_words(a).unwrap() {
                    let lx = s.create(&h, &FockVector::word(xi.clone()));
                    for eta in s.enumerate_words(a + 1).unwrap() {
                        let ey = FockVector::word(eta.clone());
                        let lhs = s.q_inner(&lx, &ey);
                        let rhs = s.q_inner(&FockVector::word(xi.clone()), &s.annihilate(&h, &ey));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn q_adjoint_of_creation_is_annihilation() {
        let s = FockSpace::float(SpaceConfig::new(2, 1, 4), -0.6).unwrap();
        let h = vec![0.3, -1.2];
        let create = s.ladder(&h, LadderKind::Create).unwrap();
        let ann = s.ladder(&h, LadderKind::Annihilate).unwrap();
        let adj = s.q_adjoint(&create).unwrap();
        // the top annihilation block has no creation partner under truncation
        let diff = adj.max_abs_diff(&ann.restrict(1..=4, 0..=3)).unwrap();
        assert!(diff < 1e-10, "{diff}");
    }

    #[test]
    fn second_quantization_examples() {
        let s = FockSpace::float(SpaceConfig::new(2, 1, 3), 0.4).unwrap();
        let id = s.second_quantize(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(id.max_abs_diff(&s.identity()), Some(0.0));
        let t = 0.7f64;
        let tt = s.second_quantize(&scalar_one_particle(2, (-t).exp())).unwrap();
        for n in 0..=3 {
            let b = tt.block(n, n).unwrap();
            let expected = DenseMatrix::identity(b.rows()).scale(&(-(n as f64) * t).exp());
            assert!(b.max_abs_diff(&expected).unwrap() < 1e-14);
        }
        let big = scalar_one_particle(2, 1.5);
        assert!(s.second_quantize(&big).is_err());
        assert!(s.second_quantize(&DenseMatrix::identity(3)).is_err());
    }

    #[test]
    fn dilation_compresses_to_semigroup() {
        let single = FockSpace::float(SpaceConfig::new(2, 1, 3), 0.3).unwrap();
        let dbl = FockSpace::float(SpaceConfig::new(2, 2, 3), 0.3).unwrap();
        let t = 0.25;
        let alpha = dbl.second_quantize(&dbl.rotation(t).unwrap()).unwrap();
        let e1 = dbl.second_quantize(&dbl.copy_projection(CopyId::First)).unwrap();
        let comp = dbl.first_copy_compression(&e1.compose(&alpha), &single).unwrap();
        let tt = single.second_quantize(&scalar_one_particle(2, (-t).exp())).unwrap();
        assert!(comp.max_abs_diff(&tt).unwrap() < 1e-12);
    }

    #[test]
    fn projections() {
        let s = exact(2, 2, 3);
        let v = w(&[1, 2]).add(&w(&[1])).add(&FockVector::vacuum());
        assert_eq!(degree_projection(&v, 2), w(&[1, 2]));
        assert!(degree_projection(&w(&[1, 2]), 1).is_zero());
        let total = (0..=3).fold(FockVector::zero(), |acc, n| acc.add(&degree_projection(&v, n)));
        assert_eq!(total, v);
        assert_eq!(s.copy_count_projection(&w(&[1, 2]), 0, CountMode::Exact).unwrap(), w(&[1, 2]));
        assert!(s.copy_count_projection(&w(&[1, 2]), 1, CountMode::Exact).unwrap().is_zero());
        let single = exact(2, 1, 3);
        assert!(single.copy_count_projection(&w(&[1]), 0, CountMode::Exact).is_err());
    }

    #[test]
    fn rotation_column() {
        let s = FockSpace::float(SpaceConfig::new(1, 2, 1), 0.2).unwrap();
        let t = 0.4f64;
        let r = s.rotation(t).unwrap();
        let alpha = s.second_quantize(&r).unwrap();
        let h = FockVector::word(Word::new(vec![Letter::first(1)]));
        let ah = s.apply(&alpha, &h).unwrap();
        let tail = s.copy_count_projection(&ah, 1, CountMode::AtLeast).unwrap();
        let expected = FockVector::term(Word::new(vec![Letter::second(1)]), (1.0 - (-2.0 * t).exp()).sqrt());
        assert!(tail.approx_eq(&expected, 1e-15));
    }
}
