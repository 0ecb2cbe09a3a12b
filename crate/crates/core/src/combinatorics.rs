//! Permutations, subsets viewed as coset representatives, pair partitions and
//! partial partitions, together with their crossing statistics.
//!
//! All ground sets are `{1, ..., n}` and every element is stored 1-based so
//! that values printed by the CLI read the same as the usual notation.

use std::fmt;

use serde::Serialize;

use crate::error::{QfockError, Result};

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Permutation of `{1..n}` in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v == 0 || v > n || seen[v] {
                return Err(QfockError::Domain(format!(
                    "{images:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Image of `i` (1-based).
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// Number of pairs `i < j` with `p(i) > p(j)`.
    pub fn inversions(&self) -> usize {
        let n = self.images.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.images.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All permutations of `{1..n}` in lexicographic order.
pub fn permutations(n: usize) -> Permutations {
    Permutations { current: Some((1..=n).collect()) }
}

pub struct Permutations {
    current: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.current.take()?;
        let mut next = cur.clone();
        // standard next-permutation step
        let n = next.len();
        let mut i = n;
        while i >= 2 && next[i - 2] >= next[i - 1] {
            i -= 1;
        }
        if i >= 2 {
            let pivot = i - 2;
            let mut j = n - 1;
            while next[j] <= next[pivot] {
                j -= 1;
            }
            next.swap(pivot, j);
            next[pivot + 1..].reverse();
            self.current = Some(next);
        }
        Some(Permutation { images: cur })
    }
}

/// `k`-element subsets of `{1..n}` as increasing vectors, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Combinations {
    Combinations {
        n,
        current: if k <= n { Some((1..=k).collect()) } else { None },
    }
}

pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.take()?;
        let k = cur.len();
        let mut next = cur.clone();
        let mut i = k;
        while i > 0 && next[i - 1] == self.n - (k - i) {
            i -= 1;
        }
        if i > 0 {
            next[i - 1] += 1;
            for t in i..k {
                next[t] = next[t - 1] + 1;
            }
            self.current = Some(next);
        }
        Some(cur)
    }
}

/// Orientation of the coset representative attached to a subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosetOrientation {
    /// The complement is listed first, then the subset: `(A^c, A)`.
    ComplementFirst,
    /// The subset is listed first, then the complement: `(A, A^c)`.
    SubsetFirst,
}

/// A `k`-subset of `{1..n}`, standing for a right coset of `S_{n-k} x S_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SubsetCoset {
    n: usize,
    elements: Vec<usize>,
}

impl SubsetCoset {
    pub fn new(n: usize, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(QfockError::Domain(format!("repeated element in {elements:?}")));
        }
        if elements.iter().any(|&e| e == 0 || e > n) {
            return Err(QfockError::Domain(format!("{elements:?} is not a subset of 1..{n}")));
        }
        Ok(SubsetCoset { n, elements })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n).filter(|e| self.elements.binary_search(e).is_err()).collect()
    }

    /// Minimal-length coset representative `(A^c, A)` and its inversion count.
    pub fn coset_data(&self) -> (Permutation, usize) {
        self.representative(CosetOrientation::ComplementFirst)
    }

    pub fn representative(&self, orientation: CosetOrientation) -> (Permutation, usize) {
        let comp = self.complement();
        let images: Vec<usize> = match orientation {
            CosetOrientation::ComplementFirst => {
                comp.iter().chain(self.elements.iter()).copied().collect()
            }
            CosetOrientation::SubsetFirst => {
                self.elements.iter().chain(comp.iter()).copied().collect()
            }
        };
        let perm = Permutation { images };
        let inv = perm.inversions();
        (perm, inv)
    }

    pub fn inversions(&self, orientation: CosetOrientation) -> usize {
        // count without materializing the permutation
        let mut count = 0;
        for &a in &self.elements {
            let below = a - 1 - self.elements.iter().filter(|&&b| b < a).count();
            let above = self.n - a - self.elements.iter().filter(|&&b| b > a).count();
            count += match orientation {
                CosetOrientation::ComplementFirst => above,
                CosetOrientation::SubsetFirst => below,
            };
        }
        count
    }
}

/// Crossing count of a collection of pairs and singletons: pair-pair
/// crossings `i < k < j < l` plus pair-singleton crossings `i < k < j`.
fn crossing_count(pairs: &[(usize, usize)], singletons: &[usize]) -> usize {
    let mut count = 0;
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[x + 1..] {
            if (i < k && k < j && j < l) || (k < i && i < l && l < j) {
                count += 1;
            }
        }
        count += singletons.iter().filter(|&&m| i < m && m < j).count();
    }
    count
}

/// Perfect matching of `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PairPartition {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        let mut norm = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a == 0 || b > n || a == b || seen[a] || seen[b] {
                return Err(QfockError::Domain(format!("invalid pair ({a},{b}) for n = {n}")));
            }
            seen[a] = true;
            seen[b] = true;
            norm.push((a, b));
        }
        if seen[1..].iter().any(|s| !s) {
            return Err(QfockError::Domain("pairs do not cover the ground set".into()));
        }
        norm.sort_unstable();
        Ok(PairPartition { n, pairs: norm })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn crossings(&self) -> usize {
        crossing_count(&self.pairs, &[])
    }
}

/// All pair partitions of `{1..m}`, lexicographic in the sorted pair list.
/// Empty for odd `m`.
pub fn enumerate_pair_partitions(m: usize) -> PairPartitions {
    PairPartitions {
        m,
        choices: if m.is_multiple_of(2) { Some(vec![0; m / 2]) } else { None },
    }
}

/// Odometer over partner choices: step `i` pairs the smallest unmatched point
/// with the `choices[i]`-th remaining point.
pub struct PairPartitions {
    m: usize,
    choices: Option<Vec<usize>>,
}

impl PairPartitions {
    fn build(m: usize, choices: &[usize]) -> PairPartition {
        let mut free: Vec<usize> = (1..=m).collect();
        let mut pairs = Vec::with_capacity(choices.len());
        for &c in choices {
            let a = free.remove(0);
            let b = free.remove(c);
            pairs.push((a, b));
        }
        PairPartition { n: m, pairs }
    }
}

impl Iterator for PairPartitions {
    type Item = PairPartition;

    fn next(&mut self) -> Option<PairPartition> {
        let choices = self.choices.take()?;
        let out = Self::build(self.m, &choices);
        let mut next = choices;
        let h = next.len();
        let mut i = h;
        while i > 0 {
            // at step i-1 there are m - 2(i-1) - 1 candidates
            let limit = self.m - 2 * (i - 1) - 1;
            if next[i - 1] + 1 < limit {
                next[i - 1] += 1;
                for c in &mut next[i..] {
                    *c = 0;
                }
                self.choices = Some(next);
                break;
            }
            i -= 1;
        }
        Some(out)
    }
}

/// Partition of `{1..n}` into pairs and singletons, with a distinguished
/// right block `{n-k+1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PartialPartition {
    n: usize,
    k: usize,
    pairs: Vec<(usize, usize)>,
    singletons: Vec<usize>,
}

impl PartialPartition {
    pub fn new(n: usize, k: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if k > n {
            return Err(QfockError::Domain(format!("right block size {k} exceeds n = {n}")));
        }
        let mut seen = vec![false; n + 1];
        let mut norm = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (a, b) = (a.min(b), a.max(b));
            if a == 0 || b > n || a == b || seen[a] || seen[b] {
                return Err(QfockError::Domain(format!("invalid pair ({a},{b}) for n = {n}")));
            }
            seen[a] = true;
            seen[b] = true;
            norm.push((a, b));
        }
        norm.sort_unstable();
        let singletons = (1..=n).filter(|&i| !seen[i]).collect();
        Ok(PartialPartition { n, k, pairs: norm, singletons })
    }

    /// Build from explicit blocks of size one or two.
    pub fn from_blocks(n: usize, k: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut covered = 0;
        for b in blocks {
            match b.as_slice() {
                [_] => covered += 1,
                [x, y] => {
                    pairs.push((*x, *y));
                    covered += 2;
                }
                _ => {
                    return Err(QfockError::Domain(format!("block {b:?} has size other than 1 or 2")))
                }
            }
        }
        let p = Self::new(n, k, pairs)?;
        let expected: usize = 2 * p.pairs.len() + p.singletons.len();
        if covered != n || expected != n {
            return Err(QfockError::Domain("blocks do not partition the ground set".into()));
        }
        let mut all: Vec<usize> = blocks.iter().flatten().copied().collect();
        all.sort_unstable();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(QfockError::Domain("blocks do not partition the ground set".into()));
        }
        Ok(p)
    }

    pub fn all_singletons(n: usize, k: usize) -> Self {
        PartialPartition { n, k, pairs: Vec::new(), singletons: (1..=n).collect() }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn right_block(&self) -> usize {
        self.k
    }

    /// Pairs sorted by left endpoint.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn singletons(&self) -> &[usize] {
        &self.singletons
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Every pair has its left point in `{1..n-k}` and right point in the
    /// right block.
    pub fn respects_split(&self) -> bool {
        let split = self.n - self.k;
        self.pairs.iter().all(|&(a, b)| a <= split && b > split)
    }

    fn require_split(&self) -> Result<()> {
        if self.respects_split() {
            Ok(())
        } else {
            Err(QfockError::Domain(format!(
                "{self} has a pair not straddling the split at {}",
                self.n - self.k
            )))
        }
    }

    pub fn crossings(&self) -> usize {
        crossing_count(&self.pairs, &self.singletons)
    }

    /// Recursive statistic: pairs are inserted in decreasing order of left
    /// endpoint; each insertion adds the number of current singletons strictly
    /// inside it plus twice the number of inserted pairs nested inside it.
    pub fn iota_prime(&self) -> Result<usize> {
        self.require_split()?;
        let mut inserted: Vec<(usize, usize)> = Vec::with_capacity(self.pairs.len());
        let mut paired = vec![false; self.n + 1];
        let mut total = 0;
        for &(l1, l2) in self.pairs.iter().rev() {
            let singles = (l1 + 1..l2).filter(|&m| !paired[m]).count();
            let nested = inserted.iter().filter(|&&(a, b)| l1 < a && b < l2).count();
            total += singles + 2 * nested;
            paired[l1] = true;
            paired[l2] = true;
            inserted.push((l1, l2));
        }
        Ok(total)
    }

    /// Decompose into (left endpoints, right endpoints relabeled into
    /// `{1..k}`, pairing pattern).
    pub fn partition_triple(&self) -> Result<PartitionTriple> {
        self.require_split()?;
        let split = self.n - self.k;
        let lefts: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
        let mut rights: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        rights.sort_unstable();
        let pattern: Vec<usize> = self
            .pairs
            .iter()
            .map(|&(_, b)| rights.binary_search(&b).unwrap() + 1)
            .collect();
        Ok(PartitionTriple {
            left: SubsetCoset::new(split, lefts)?,
            right: SubsetCoset::new(self.k, rights.iter().map(|b| b - split).collect())?,
            pairing: Permutation::new(pattern)?,
        })
    }

    /// Remove the given pairs (which must belong to this partition) and
    /// relabel the remaining points in order. The right block shrinks by the
    /// number of removed pairs.
    pub fn remove_pairs(&self, removed: &[(usize, usize)]) -> Result<PartialPartition> {
        let mut gone = vec![false; self.n + 1];
        for p in removed {
            if !self.pairs.contains(p) {
                return Err(QfockError::Domain(format!("{p:?} is not a pair of {self}")));
            }
            gone[p.0] = true;
            gone[p.1] = true;
        }
        let mut label = vec![0; self.n + 1];
        let mut next = 0;
        for i in 1..=self.n {
            if !gone[i] {
                next += 1;
                label[i] = next;
            }
        }
        let right_removed = removed.iter().filter(|p| p.1 > self.n - self.k).count()
            + removed.iter().filter(|p| p.0 > self.n - self.k).count();
        let pairs = self
            .pairs
            .iter()
            .filter(|p| !removed.contains(p))
            .map(|&(a, b)| (label[a], label[b]))
            .collect();
        PartialPartition::new(next, self.k - right_removed, pairs)
    }
}

impl fmt::Display for PartialPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut blocks: Vec<Vec<usize>> = self
            .pairs
            .iter()
            .map(|&(a, b)| vec![a, b])
            .chain(self.singletons.iter().map(|&s| vec![s]))
            .collect();
        blocks.sort_by_key(|b| b[0]);
        let parts: Vec<String> = blocks
            .iter()
            .map(|b| {
                let inner: Vec<String> = b.iter().map(|x| x.to_string()).collect();
                format!("{{{}}}", inner.join(","))
            })
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Left endpoints, right endpoints and the pairing between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionTriple {
    /// Left endpoints as a subset of `{1..n-k}`.
    pub left: SubsetCoset,
    /// Right endpoints shifted down by `n-k`, as a subset of `{1..k}`.
    pub right: SubsetCoset,
    /// `pairing(s)` is the rank among right endpoints of the partner of the
    /// `s`-th left endpoint.
    pub pairing: Permutation,
}

impl PartitionTriple {
    /// Inversions of the left subset, complement listed first.
    pub fn left_inversions(&self) -> usize {
        self.left.inversions(CosetOrientation::ComplementFirst)
    }

    /// Inversions of the right subset, subset listed first.
    pub fn right_inversions(&self) -> usize {
        self.right.inversions(CosetOrientation::SubsetFirst)
    }

    pub fn pairing_inversions(&self) -> usize {
        self.pairing.inversions()
    }

    /// `iota(A) + iota(B) + iota(sigma) + C(j, 2)`.
    pub fn closed_form(&self) -> usize {
        let j = self.pairing.len();
        self.left_inversions() + self.right_inversions() + self.pairing_inversions() + j * j.saturating_sub(1) / 2
    }
}

/// Elements of `P_{1,2}^{j,k}(n)`: partial partitions with exactly `j` pairs,
/// each joining a point of `{1..n-k}` to a point of `{n-k+1..n}`.
pub fn enumerate_partial_partitions(n: usize, k: usize, j: usize) -> Result<PartialPartitions> {
    if k > n || j > k.min(n - k) {
        return Err(QfockError::Domain(format!(
            "j = {j} out of range for n = {n}, k = {k} (need j <= min(k, n-k))"
        )));
    }
    Ok(PartialPartitions::new(n, k, j))
}

/// Depth-first enumeration in lexicographic order of the pair list. Level `i`
/// holds the `i`-th smallest left endpoint and its partner.
pub struct PartialPartitions {
    n: usize,
    k: usize,
    j: usize,
    lefts: Vec<usize>,
    rights: Vec<usize>,
    done: bool,
}

impl PartialPartitions {
    fn new(n: usize, k: usize, j: usize) -> Self {
        let mut it = PartialPartitions { n, k, j, lefts: vec![0; j], rights: vec![0; j], done: false };
        if !it.fill_from(0) {
            it.done = true;
        }
        it
    }

    fn split(&self) -> usize {
        self.n - self.k
    }

    fn smallest_free_right(&self, level: usize, above: usize) -> Option<usize> {
        (above + 1..=self.n)
            .filter(|&r| r > self.split())
            .find(|r| !self.rights[..level].contains(r))
    }

    /// Reset levels `from..j` to their minimal choices.
    fn fill_from(&mut self, from: usize) -> bool {
        for lvl in from..self.j {
            let left = if lvl == 0 { 1 } else { self.lefts[lvl - 1] + 1 };
            if left + (self.j - lvl - 1) > self.split() {
                return false;
            }
            self.lefts[lvl] = left;
            match self.smallest_free_right(lvl, 0) {
                Some(r) => self.rights[lvl] = r,
                None => return false,
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        let mut lvl = self.j;
        while lvl > 0 {
            let i = lvl - 1;
            if let Some(r) = self.smallest_free_right(i, self.rights[i]) {
                self.rights[i] = r;
                if self.fill_from(i + 1) {
                    return true;
                }
            }
            // move the left endpoint of this level forward
            let max_left = self.split() - (self.j - i - 1);
            while self.lefts[i] < max_left {
                self.lefts[i] += 1;
                if let Some(r) = self.smallest_free_right(i, 0) {
                    self.rights[i] = r;
                    if self.fill_from(i + 1) {
                        return true;
                    }
                }
            }
            lvl -= 1;
        }
        false
    }
}

impl Iterator for PartialPartitions {
    type Item = PartialPartition;

    fn next(&mut self) -> Option<PartialPartition> {
        if self.done {
            return None;
        }
        let pairs: Vec<(usize, usize)> =
            self.lefts.iter().copied().zip(self.rights.iter().copied()).collect();
        let out = PartialPartition::new(self.n, self.k, pairs).expect("enumerator emits valid partitions");
        if !self.advance() {
            self.done = true;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn fig1() -> PartialPartition {
        PartialPartition::from_blocks(8, 4, &[vec![1], vec![2, 5], vec![3], vec![4, 7], vec![6], vec![8]]).unwrap()
    }

    fn fig2() -> PartialPartition {
        PartialPartition::from_blocks(8, 4, &[vec![1, 6], vec![2, 5], vec![3], vec![4], vec![7], vec![8]]).unwrap()
    }

    fn rho3() -> PartialPartition {
        PartialPartition::from_blocks(8, 4, &[vec![1, 6], vec![2, 5], vec![3], vec![4, 7], vec![8]]).unwrap()
    }

    #[test]
    fn inversions_examples() {
        assert_eq!(Permutation::identity(5).inversions(), 0);
        assert_eq!(Permutation::new(vec![2, 1]).unwrap().inversions(), 1);
        assert_eq!(Permutation::new(vec![1, 3, 2, 4]).unwrap().inversions(), 1);
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
    }

    #[test]
    fn crossings_examples() {
        assert_eq!(fig1().crossings(), 3);
        assert_eq!(fig2().crossings(), 4);
        assert_eq!(PartialPartition::all_singletons(6, 3).crossings(), 0);
    }

    #[test]
    fn pair_partition_counts() {
        assert_eq!(enumerate_pair_partitions(2).count(), 1);
        assert_eq!(enumerate_pair_partitions(3).count(), 0);
        let four: Vec<usize> = enumerate_pair_partitions(4).map(|p| p.crossings()).collect();
        let mut sorted = four.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 0, 1]);
        assert_eq!(enumerate_pair_partitions(0).count(), 1);
        for n in 1..=5 {
            let all: Vec<PairPartition> = enumerate_pair_partitions(2 * n).collect();
            let double_factorial: u64 = (1..=2 * n as u64 - 1).step_by(2).product();
            assert_eq!(all.len() as u64, double_factorial);
            let distinct: HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(all.windows(2).all(|w| w[0].pairs() < w[1].pairs()));
        }
    }

    #[test]
    fn partial_partition_counts_and_order() {
        let only: Vec<_> = enumerate_partial_partitions(2, 1, 1).unwrap().collect();
        assert_eq!(only, vec![PartialPartition::new(2, 1, vec![(1, 2)]).unwrap()]);
        assert_eq!(enumerate_partial_partitions(4, 2, 1).unwrap().count(), 4);
        assert!(enumerate_partial_partitions(8, 4, 2).unwrap().any(|p| p == fig1()));
        assert!(enumerate_partial_partitions(4, 1, 2).is_err());
        for n in 0..=8 {
            for k in 0..=n {
                for j in 0..=k.min(n - k) {
                    let all: Vec<_> = enumerate_partial_partitions(n, k, j).unwrap().collect();
                    let expected = binomial(n - k, j) * binomial(k, j) * factorial(j);
                    assert_eq!(all.len() as u64, expected, "n={n} k={k} j={j}");
                    assert!(all.windows(2).all(|w| w[0].pairs() < w[1].pairs()));
                    assert!(all.iter().all(|p| p.respects_split() && p.num_pairs() == j));
                }
            }
        }
    }

    #[test]
    fn coset_data_examples() {
        let top = SubsetCoset::new(5, vec![4, 5]).unwrap();
        assert_eq!(top.coset_data(), (Permutation::identity(5), 0));
        let a2 = SubsetCoset::new(4, vec![2, 4]).unwrap();
        assert_eq!(a2.coset_data(), (Permutation::new(vec![1, 3, 2, 4]).unwrap(), 1));
        let a3 = SubsetCoset::new(4, vec![1, 2, 4]).unwrap();
        assert_eq!(a3.coset_data(), (Permutation::new(vec![3, 1, 2, 4]).unwrap(), 2));
    }

    #[test]
    fn coset_representative_is_minimal() {
        // the coset of A is every sigma sending the last k positions onto A
        for n in 0..=6 {
            for k in 0..=n {
                for a in combinations(n, k) {
                    let sub = SubsetCoset::new(n, a.clone()).unwrap();
                    let min = permutations(n)
                        .filter(|p| {
                            let mut tail: Vec<usize> = p.images()[n - k..].to_vec();
                            tail.sort_unstable();
                            tail == a
                        })
                        .map(|p| p.inversions())
                        .min()
                        .unwrap();
                    let (rep, inv) = sub.coset_data();
                    assert_eq!(inv, min);
                    assert_eq!(rep.inversions(), inv);
                    assert_eq!(sub.inversions(CosetOrientation::ComplementFirst), inv);
                    assert_eq!(
                        sub.inversions(CosetOrientation::SubsetFirst),
                        sub.representative(CosetOrientation::SubsetFirst).1
                    );
                }
            }
        }
    }

    #[test]
    fn iota_prime_examples() {
        assert_eq!(PartialPartition::all_singletons(8, 4).iota_prime().unwrap(), 0);
        assert_eq!(fig2().iota_prime().unwrap(), 6);
        assert_eq!(fig1().iota_prime().unwrap(), 3);
        assert_eq!(rho3().iota_prime().unwrap(), 6);
        let bad = PartialPartition::new(4, 2, vec![(1, 2)]).unwrap();
        assert!(bad.iota_prime().is_err());
    }

    #[test]
    fn partition_triple_examples() {
        let t = fig1().partition_triple().unwrap();
        assert_eq!(t.left.elements(), &[2, 4]);
        assert_eq!(t.right.elements(), &[1, 3]);
        assert_eq!(t.pairing, Permutation::identity(2));
        assert_eq!((t.left_inversions(), t.right_inversions(), t.pairing_inversions()), (1, 1, 0));
        assert_eq!(t.closed_form(), 3);

        let t = rho3().partition_triple().unwrap();
        assert_eq!((t.left_inversions(), t.right_inversions(), t.pairing_inversions()), (2, 0, 1));
        assert_eq!(t.closed_form(), 6);

        let t = PartialPartition::all_singletons(5, 2).partition_triple().unwrap();
        assert!(t.left.is_empty() && t.right.is_empty() && t.pairing.is_empty());
        assert_eq!(t.closed_form(), 0);
    }

    #[test]
    fn single_pair_statistics_agree() {
        for n in 2..=8 {
            for k in 1..n {
                for p in enumerate_partial_partitions(n, k, 1).unwrap() {
                    assert_eq!(p.iota_prime().unwrap(), p.crossings());
                }
            }
        }
    }

    #[test]
    fn remove_pairs_relabels() {
        let r = rho3().remove_pairs(&[(1, 6)]).unwrap();
        // remaining points 2,3,4,5,7,8 -> 1..6
        assert_eq!(r.ground_size(), 6);
        assert_eq!(r.right_block(), 3);
        assert_eq!(r.pairs(), &[(1, 4), (3, 5)]);
        assert!(r.respects_split());
    }

    #[test]
    fn combinations_and_permutations() {
        assert_eq!(combinations(4, 2).count(), 6);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(2, 3).count(), 0);
        assert_eq!(permutations(4).count(), 24);
        assert_eq!(permutations(0).count(), 1);
    }
}
