//! Floating-point estimates: the diagonal map `Φ_{h,k}`, Schatten norms with
//! respect to the q-inner product, block decay of `Φ_{ξ,η}`, and the
//! deformation estimate for the rotation dilation.
//!
//! Operators of the form `x ↦ E_M(a x b)` are evaluated on vectors `xΩ` with
//! `x = W(ζ)`: `x b Ω = W(ζ) (bΩ)`, so no right-multiplication operator needs
//! to be materialized. Vector-level evaluation is untruncated, hence exact on
//! every degree of the configured space.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{QfockError, Result};
use crate::fock::{degree_projection, BlockOperator, CountMode, FockSpace, FockVector, Letter, Word};
use crate::linalg::{min_eigenvalue, singular_values, DenseMatrix};
use crate::scalars::Scalar;
use crate::wick::{dot, wick_apply};

fn require_doubled<S: Scalar>(space: &FockSpace<S>) -> Result<()> {
    if space.config().copies == 2 {
        Ok(())
    } else {
        Err(QfockError::Domain("this computation needs the doubled space H ⊕ H".into()))
    }
}

fn check_single_copy<S: Scalar>(doubled: &FockSpace<S>, single: &FockSpace<S>) -> Result<()> {
    let (a, b) = (doubled.config(), single.config());
    if b.copies != 1 || a.d != b.d || b.max_degree > a.max_degree {
        return Err(QfockError::SpaceMismatch("single-copy space does not sit inside the doubled space".into()));
    }
    Ok(())
}

/// `(0, h)` in coordinates of `H ⊕ H`.
pub fn tilde<S: Scalar>(space: &FockSpace<S>, h: &[S]) -> Result<Vec<S>> {
    let d = space.config().d;
    if h.len() != d {
        return Err(QfockError::SpaceMismatch(format!("vector has length {}, expected {d}", h.len())));
    }
    let mut out = vec![S::zero(); 2 * d];
    out[d..].clone_from_slice(h);
    Ok(out)
}

/// `Φ_{h,k}` on the single-copy space, built from
/// `Φ(W(ζ))Ω = E_1(s(h̃) W(ζ) k̃)`.
pub fn phi_hk_operator<S: Scalar>(
    doubled: &FockSpace<S>,
    single: &FockSpace<S>,
    h: &[S],
    k: &[S],
) -> Result<BlockOperator<S>> {
    require_doubled(doubled)?;
    check_single_copy(doubled, single)?;
    let ht = tilde(doubled, h)?;
    let kt = doubled.tensor_of(&[tilde(doubled, k)?])?;
    let mut failure = None;
    let op = single.operator_from_action(single.all_degrees(), |zeta| {
        let run = || -> Result<FockVector<S>> {
            let y = wick_apply(doubled, &FockVector::word(zeta.clone()), &kt)?;
            let z = doubled.create(&ht, &y).add(&doubled.annihilate(&ht, &y));
            doubled.first_copy_expectation(&z)
        };
        run().unwrap_or_else(|e| {
            failure.get_or_insert(e);
            FockVector::zero()
        })
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(op),
    }
}

/// The diagonal operator `Σ_n c q^n P_n`.
pub fn diagonal_operator<S: Scalar>(space: &FockSpace<S>, c: &S) -> BlockOperator<S> {
    let mut op = BlockOperator::zero(space.dims());
    for n in space.all_degrees() {
        let coef = space.q_pow(n) * c.clone();
        op.set_block(n, n, DenseMatrix::identity(space.dims()[n]).scale(&coef));
    }
    op
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCheck {
    /// `⟨h, k⟩`.
    pub inner: f64,
    pub max_deviation: f64,
    /// Highest degree compared.
    pub max_degree: usize,
}

/// Largest blockwise deviation between `Φ_{h,k}` and `Σ q^n ⟨h,k⟩ P_n`.
pub fn phi_hk_check(doubled: &FockSpace<f64>, single: &FockSpace<f64>, h: &[f64], k: &[f64]) -> Result<PhiCheck> {
    let phi = phi_hk_operator(doubled, single, h, k)?;
    let inner = dot(h, k);
    let expected = diagonal_operator(single, &inner);
    let max_deviation = phi.max_abs_diff(&expected).unwrap_or(f64::INFINITY);
    Ok(PhiCheck { inner, max_deviation, max_degree: single.max_degree() })
}

/// Singular values of one degree block with respect to the q-inner products
/// on source and target.
pub fn block_singular_values(space: &FockSpace<f64>, op: &BlockOperator<f64>, target: usize, source: usize) -> Result<Vec<f64>> {
    let m = op.block_or_zero(target, source).to_nalgebra();
    let gt = &space.gram_factor(target)?.sqrt;
    let gs = &space.gram_factor(source)?.inv_sqrt;
    Ok(singular_values(&(gt * m * gs)))
}

/// Operator norm of one degree block with respect to the q-inner products.
pub fn block_norm(space: &FockSpace<f64>, op: &BlockOperator<f64>, target: usize, source: usize) -> Result<f64> {
    Ok(block_singular_values(space, op, target, source)?.first().copied().unwrap_or(0.0))
}

/// Largest operator size assembled for a non-block-diagonal Schatten norm.
pub const MAX_ASSEMBLED_DIM: usize = 800;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchattenReport {
    pub p: f64,
    pub norm: f64,
    /// Singular values per degree when the operator preserves degree.
    pub degree_singular_values: Vec<(usize, Vec<f64>)>,
    /// `-ln d / ln|q|`.
    pub threshold: f64,
    pub truncation: usize,
}

/// Schatten `p`-norm of a truncated operator, singular values taken with
/// respect to the q-inner product.
pub fn schatten_norm(space: &FockSpace<f64>, op: &BlockOperator<f64>, p: f64) -> Result<SchattenReport> {
    if !(p >= 1.0) {
        return Err(QfockError::Domain(format!("Schatten exponent must be at least 1, got {p}")));
    }
    let diagonal = op.blocks().all(|(&(t, s), _)| t == s);
    let mut degree_singular_values = Vec::new();
    let values: Vec<f64> = if diagonal {
        for n in space.all_degrees() {
            degree_singular_values.push((n, block_singular_values(space, op, n, n)?));
        }
        degree_singular_values.iter().flat_map(|(_, v)| v.iter().copied()).collect()
    } else {
        singular_values(&assemble_orthonormal(space, op)?)
    };
    let norm = values.iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
    let cfg = space.config();
    Ok(SchattenReport {
        p,
        norm,
        degree_singular_values,
        threshold: schatten_threshold(*space.q(), cfg.one_particle_dim())?,
        truncation: cfg.max_degree,
    })
}

fn assemble_orthonormal(space: &FockSpace<f64>, op: &BlockOperator<f64>) -> Result<DMatrix<f64>> {
    let dims = space.dims();
    let total: usize = dims.iter().sum();
    if total > MAX_ASSEMBLED_DIM {
        return Err(QfockError::Resource(format!("assembling a {total}x{total} operator exceeds {MAX_ASSEMBLED_DIM}")));
    }
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &d| {
        let o = *acc;
        *acc += d;
        Some(o)
    }).collect();
    let mut full = DMatrix::zeros(total, total);
    for (&(t, s), block) in op.blocks() {
        let m = &space.gram_factor(t)?.sqrt * block.to_nalgebra() * &space.gram_factor(s)?.inv_sqrt;
        full.view_mut((offsets[t], offsets[s]), (dims[t], dims[s])).copy_from(&m);
    }
    Ok(full)
}

/// `-ln d / ln|q|`: the diagonal map `Σ q^n P_n` is Schatten `p`-class
/// exactly for `p` above this value. Zero when `q = 0` or `d = 1`.
pub fn schatten_threshold(q: f64, d: usize) -> Result<f64> {
    if !(q.abs() < 1.0) {
        return Err(QfockError::Domain(format!("|q| must be below 1, got {q}")));
    }
    if d == 0 {
        return Err(QfockError::Domain("dimension must be at least 1".into()));
    }
    if q == 0.0 || d == 1 {
        return Ok(0.0);
    }
    Ok(-(d as f64).ln() / q.abs().ln())
}

/// `Σ_{n ≤ N} |q|^{pn} d^n` for `N = 0..=n_max`.
pub fn schatten_partial_sums(q: f64, d: usize, p: f64, n_max: usize) -> Vec<f64> {
    let ratio = q.abs().powf(p) * d as f64;
    let mut term = 1.0;
    let mut acc = 0.0;
    (0..=n_max)
        .map(|_| {
            acc += term;
            term *= ratio;
            acc
        })
        .collect()
}

/// Closed form of the truncated Schatten norm of `Σ c q^n P_n`.
pub fn diagonal_schatten_closed_form(q: f64, d: usize, p: f64, n_max: usize, c: f64) -> f64 {
    schatten_partial_sums(q, d, p, n_max).last().copied().unwrap_or(0.0).powf(1.0 / p) * c.abs()
}

/// Growth ratio `|q|^p d` between successive Schatten terms.
pub fn schatten_term_ratio(q: f64, d: usize, p: f64) -> f64 {
    q.abs().powf(p) * d as f64
}

/// `Φ_{ξ,η}(x) = E_M(W(ξ)* x W(η))` on the single-copy space, from
/// `Φ(W(ζ))Ω = E_1(W(rev ξ) W(ζ) η)`.
pub fn phi_xi_eta_operator<S: Scalar>(
    doubled: &FockSpace<S>,
    single: &FockSpace<S>,
    xi: &FockVector<S>,
    eta: &FockVector<S>,
) -> Result<BlockOperator<S>> {
    require_doubled(doubled)?;
    check_single_copy(doubled, single)?;
    let xi_star = xi.reversed();
    let mut failure = None;
    let op = single.operator_from_action(single.all_degrees(), |zeta| {
        let run = || -> Result<FockVector<S>> {
            let y = wick_apply(doubled, &FockVector::word(zeta.clone()), eta)?;
            let z = wick_apply(doubled, &xi_star, &y)?;
            doubled.first_copy_expectation(&z)
        };
        run().unwrap_or_else(|e| {
            failure.get_or_insert(e);
            FockVector::zero()
        })
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(op),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockNorm {
    pub target: usize,
    pub source: usize,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    /// Number of second-copy letters in each of `ξ` and `η`.
    pub k: usize,
    pub block_norms: Vec<BlockNorm>,
    /// `deg ξ + deg η`; blocks farther from the diagonal vanish.
    pub band_width: usize,
    /// Largest norm among blocks outside the band.
    pub off_band_max: f64,
    /// Least-squares slope of `ln ‖Φ_{jj}‖` against `j`, i.e. `ln r̂`.
    pub log_rate: f64,
    pub rate: f64,
    pub constant: f64,
    /// `k ln|q|`.
    pub expected_log_rate: f64,
    pub truncation: usize,
}

fn homogeneous_in_fk(v: &FockVector<f64>, k: usize) -> Result<usize> {
    let n = v
        .homogeneous_degree()
        .ok_or_else(|| QfockError::Domain("expected a nonzero homogeneous vector".into()))?;
    if v.terms().any(|(w, _)| w.second_copy_count() != k) {
        return Err(QfockError::Domain(format!("vector is not in F_{k}")));
    }
    Ok(n)
}

/// Block norms of `Φ_{ξ,η}` and the fitted decay of its diagonal blocks.
pub fn block_decay(
    doubled: &FockSpace<f64>,
    single: &FockSpace<f64>,
    xi: &FockVector<f64>,
    eta: &FockVector<f64>,
    k: usize,
) -> Result<DecayReport> {
    let n1 = homogeneous_in_fk(xi, k)?;
    let n2 = homogeneous_in_fk(eta, k)?;
    let q = *single.q();
    if q == 0.0 {
        return Err(QfockError::Domain("decay rates need q ≠ 0".into()));
    }
    let phi = phi_xi_eta_operator(doubled, single, xi, eta)?;
    let band_width = n1 + n2;
    let mut block_norms = Vec::new();
    let mut off_band_max: f64 = 0.0;
    for t in single.all_degrees() {
        for s in single.all_degrees() {
            let norm = block_norm(single, &phi, t, s)?;
            if t.abs_diff(s) > band_width {
                off_band_max = off_band_max.max(norm);
            }
            block_norms.push(BlockNorm { target: t, source: s, norm });
        }
    }
    let points: Vec<(f64, f64)> = block_norms
        .iter()
        .filter(|b| b.target == b.source && b.norm > 0.0)
        .map(|b| (b.source as f64, b.norm.ln()))
        .collect();
    if points.len() < 2 {
        return Err(QfockError::Domain("fewer than two nonzero diagonal blocks to fit".into()));
    }
    let (slope, intercept) = least_squares(&points);
    Ok(DecayReport {
        k,
        block_norms,
        band_width,
        off_band_max,
        log_rate: slope,
        rate: slope.exp(),
        constant: intercept.exp(),
        expected_log_rate: k as f64 * q.abs().ln(),
        truncation: single.max_degree(),
    })
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `Σ_{m=kcut}^n C(n,m) e^{-2t(n-m)} (1 - e^{-2t})^m`.
pub fn tail_weight(n: usize, kcut: usize, t: f64) -> f64 {
    let a = (-2.0 * t).exp();
    (kcut..=n).map(|m| binomial(n, m) as f64 * a.powi((n - m) as i32) * (1.0 - a).powi(m as i32)).sum()
}

/// `2(1 - e^{-ns})`.
pub fn displacement_weight(n: usize, s: f64) -> f64 {
    2.0 * (1.0 - (-(n as f64) * s).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationIdentity {
    /// `⟨E^⊥ α_t x, E^⊥ α_t y⟩_q` from the matrices.
    pub inner_left: f64,
    /// `Σ_{m≥kcut} C(n,m) e^{-2t(n-m)} (1-e^{-2t})^m ⟨x, y⟩_q`.
    pub inner_right: f64,
    /// `‖(α_{t^kcut} - id) x‖²` from the matrices.
    pub displacement_left: f64,
    /// `2(1 - e^{-n t^kcut}) ‖x‖²`.
    pub displacement_right: f64,
    /// Set when `kcut > n`, where the tail sum is empty.
    pub empty_tail: bool,
}

fn first_copy_degree(v: &FockVector<f64>) -> Result<usize> {
    if v.terms().any(|(w, _)| w.second_copy_count() > 0) {
        return Err(QfockError::Domain("expected a first-copy vector".into()));
    }
    v.homogeneous_degree().ok_or_else(|| QfockError::Domain("expected a nonzero homogeneous vector".into()))
}

/// Both sides of the two identities behind the deformation estimate.
pub fn deformation_identity(
    space: &FockSpace<f64>,
    kcut: usize,
    t: f64,
    x: &FockVector<f64>,
    y: &FockVector<f64>,
) -> Result<DeformationIdentity> {
    require_doubled(space)?;
    if t < 0.0 {
        return Err(QfockError::Domain(format!("t must be nonnegative, got {t}")));
    }
    let alpha = space.second_quantize(&space.rotation(t)?)?;
    let alpha_s = space.second_quantize(&space.rotation(t.powi(kcut as i32))?)?;
    identity_with(space, kcut, t, &alpha, &alpha_s, x, y)
}

fn identity_with(
    space: &FockSpace<f64>,
    kcut: usize,
    t: f64,
    alpha: &BlockOperator<f64>,
    alpha_s: &BlockOperator<f64>,
    x: &FockVector<f64>,
    y: &FockVector<f64>,
) -> Result<DeformationIdentity> {
    let n = first_copy_degree(x)?;
    if first_copy_degree(y)? != n {
        return Err(QfockError::Domain("x and y must have the same degree".into()));
    }
    let ax = space.copy_count_projection(&space.apply(alpha, x)?, kcut, CountMode::AtLeast)?;
    let ay = space.copy_count_projection(&space.apply(alpha, y)?, kcut, CountMode::AtLeast)?;
    let moved = space.apply(alpha_s, x)?.sub(x);
    let xx = space.q_inner(x, x);
    Ok(DeformationIdentity {
        inner_left: space.q_inner(&ax, &ay),
        inner_right: tail_weight(n, kcut, t) * space.q_inner(x, y),
        displacement_left: space.q_inner(&moved, &moved),
        displacement_right: displacement_weight(n, t.powi(kcut as i32)) * xx,
        empty_tail: kcut > n,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationRow {
    pub n: usize,
    pub t: f64,
    /// `‖(α_{t^k} - id) x‖²` for unit `x`.
    pub left: f64,
    /// `‖E^⊥_{k-1} α_t x‖²` for unit `x`.
    pub right: f64,
    /// `‖(α_{t^k} - id) x‖ / ‖E^⊥_{k-1} α_t x‖`.
    pub ratio: f64,
    /// Largest deviation of the matrix computation from the closed forms,
    /// over the degree-`n` basis words.
    pub matrix_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeformationReport {
    pub kcut: usize,
    pub rows: Vec<DeformationRow>,
    /// Empirical constant: the largest ratio on the grid.
    pub max_ratio: f64,
    pub all_finite: bool,
}

/// Ratio of the two sides of the deformation estimate over a grid of `t`
/// and degrees `kcut..=n_max`, with each closed form checked against the
/// matrices on every basis word.
pub fn deformation_scan(space: &FockSpace<f64>, kcut: usize, n_max: usize, t_grid: &[f64]) -> Result<DeformationReport> {
    require_doubled(space)?;
    if kcut == 0 {
        return Err(QfockError::Domain("kcut must be at least 1".into()));
    }
    if n_max < kcut {
        return Err(QfockError::Domain(format!("degree {n_max} is below kcut = {kcut}")));
    }
    if n_max > space.max_degree() {
        return Err(QfockError::Domain(format!("degree {n_max} exceeds the truncation {}", space.max_degree())));
    }
    let bound = 0.5f64.powi(kcut as i32);
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0 && t < bound)) {
        return Err(QfockError::Domain(format!("t = {t} outside (0, 2^-{kcut})")));
    }
    let alphas: Vec<(BlockOperator<f64>, BlockOperator<f64>)> = t_grid
        .par_iter()
        .map(|&t| {
            Ok((
                space.second_quantize(&space.rotation(t)?)?,
                space.second_quantize(&space.rotation(t.powi(kcut as i32))?)?,
            ))
        })
        .collect::<Result<_>>()?;
    let grid: Vec<(usize, usize)> = (kcut..=n_max).flat_map(|n| (0..t_grid.len()).map(move |i| (n, i))).collect();
    let rows: Vec<Result<DeformationRow>> = grid
        .par_iter()
        .map(|&(n, i)| {
            let t = t_grid[i];
            let (alpha, alpha_s) = &alphas[i];
            let left = displacement_weight(n, t.powi(kcut as i32));
            let right = tail_weight(n, kcut, t);
            let mut matrix_deviation: f64 = 0.0;
            let words: Vec<Word> = space
                .enumerate_words(n)?
                .iter()
                .filter(|w| w.second_copy_count() == 0)
                .cloned()
                .collect();
            for w in words {
                let x = FockVector::word(w);
                let id = identity_with(space, kcut, t, alpha, alpha_s, &x, &x)?;
                let norm2 = space.q_inner(&x, &x);
                matrix_deviation = matrix_deviation
                    .max((id.inner_left - id.inner_right).abs() / norm2)
                    .max((id.displacement_left - id.displacement_right).abs() / norm2);
            }
            Ok(DeformationRow { n, t, left, right, ratio: (left / right).sqrt(), matrix_deviation })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let all_finite = rows.iter().all(|r| r.ratio.is_finite());
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(DeformationReport { kcut, rows, max_ratio, all_finite })
}

/// `‖Σ_{n>N} e^{-nt} P_n x‖_q`.
pub fn ou_tail(space: &FockSpace<f64>, x: &FockVector<f64>, t: f64, cutoff: usize) -> Result<f64> {
    if t < 0.0 {
        return Err(QfockError::Domain(format!("t must be nonnegative, got {t}")));
    }
    space.check_vector(x)?;
    let mut tail = FockVector::zero();
    for n in cutoff + 1..=space.max_degree() {
        tail.add_scaled(&degree_projection(x, n), &(-(n as f64) * t).exp());
    }
    Ok(space.q_norm(&tail))
}

/// Largest blockwise deviation between the first-copy compression of
/// `Γ(R_t)` and `T_t = Γ(e^{-t})`.
pub fn dilation_deviation(doubled: &FockSpace<f64>, single: &FockSpace<f64>, t: f64) -> Result<f64> {
    require_doubled(doubled)?;
    check_single_copy(doubled, single)?;
    let alpha = doubled.second_quantize(&doubled.rotation(t)?)?;
    let e1 = doubled.second_quantize(&doubled.copy_projection(crate::fock::CopyId::First))?;
    let compressed = doubled.first_copy_compression(&e1.compose(&alpha), single)?;
    let d = single.one_particle_dim();
    let semigroup = single.second_quantize(&DenseMatrix::identity(d).scale(&(-t).exp()))?;
    Ok(compressed.max_abs_diff(&semigroup).unwrap_or(f64::INFINITY))
}

/// Smallest Gram eigenvalue per degree.
pub fn gram_min_eigenvalues(space: &FockSpace<f64>) -> Result<Vec<f64>> {
    space.all_degrees().map(|n| Ok(min_eigenvalue(&space.gram_matrix(n)?.to_nalgebra()))).collect()
}

/// Unit letter helper for the first copy.
pub fn first_letter(space: &FockSpace<f64>, index: usize) -> Vec<f64> {
    space.unit(Letter::first(index))[..space.config().d].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SpaceConfig;

    fn spaces(d: usize, n: usize, q: f64) -> (FockSpace<f64>, FockSpace<f64>) {
        (
            FockSpace::float(SpaceConfig::new(d, 2, n), q).unwrap(),
            FockSpace::float(SpaceConfig::new(d, 1, n), q).unwrap(),
        )
    }

    #[test]
    fn phi_is_diagonal() {
        let (dbl, single) = spaces(2, 3, -0.5);
        let r = phi_hk_check(&dbl, &single, &[1.0, 0.5], &[0.3, -2.0]).unwrap();
        assert!(r.max_deviation < 1e-12, "{r:?}");
        let phi = phi_hk_operator(&dbl, &single, &[1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!((phi.vacuum_expectation() - 1.0).abs() < 1e-15);
        let b = phi.block(1, 1).unwrap();
        assert!((b.get(0, 0) + 0.5).abs() < 1e-15);
        let orth = phi_hk_operator(&dbl, &single, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!(orth.blocks().count(), 0);
        assert!(phi_hk_check(&single, &single, &[1.0, 0.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn schatten_examples() {
        assert!((schatten_threshold(0.5, 2).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(schatten_threshold(0.7, 1).unwrap(), 0.0);
        assert_eq!(schatten_threshold(0.0, 3).unwrap(), 0.0);
        assert!(schatten_threshold(1.0, 3).is_err());
        let sums = schatten_partial_sums(0.5, 2, 2.0, 60);
        assert!((sums[60].sqrt() - 2f64.sqrt()).abs() < 1e-12);
        let single = FockSpace::float(SpaceConfig::new(2, 1, 3), 0.5).unwrap();
        let mut id = BlockOperator::zero(single.dims());
        id.set_block(2, 2, DenseMatrix::identity(4));
        let r = schatten_norm(&single, &id, 2.0).unwrap();
        assert!((r.norm - 2.0).abs() < 1e-12);
        let diag = diagonal_operator(&single, &1.0);
        let r = schatten_norm(&single, &diag, 3.0).unwrap();
        let closed = diagonal_schatten_closed_form(0.5, 2, 3.0, 3, 1.0);
        assert!((r.norm - closed).abs() < 1e-12 * closed);
        assert!(schatten_norm(&single, &diag, 0.5).is_err());
    }

    #[test]
    fn decay_single_letter() {
        let (dbl, single) = spaces(1, 5, 0.6);
        let ht = FockVector::word(Word::new(vec![Letter::second(1)]));
        let r = block_decay(&dbl, &single, &ht, &ht, 1).unwrap();
        assert!((r.log_rate - 0.6f64.ln()).abs() < 1e-10);
        assert!(r.off_band_max == 0.0);
        let first = FockVector::word(Word::new(vec![Letter::first(1)]));
        assert!(block_decay(&dbl, &single, &first, &ht, 1).is_err());
    }

    #[test]
    fn deformation_examples() {
        let dbl = FockSpace::float(SpaceConfig::new(2, 2, 3), 0.4).unwrap();
        let h = FockVector::word(Word::new(vec![Letter::first(1)]));
        let t = 0.3;
        let id = deformation_identity(&dbl, 1, t, &h, &h).unwrap();
        let expected = 1.0 - (-2.0 * t).exp();
        assert!((id.inner_left - expected).abs() < 1e-12);
        assert!((id.inner_right - expected).abs() < 1e-12);
        let zero = deformation_identity(&dbl, 1, 0.0, &h, &h).unwrap();
        assert!(zero.inner_left.abs() < 1e-15 && zero.inner_right == 0.0);
        let rep = deformation_scan(&dbl, 1, 1, &[0.1]).unwrap();
        let ratio2 = 2.0 * (1.0 - (-0.1f64).exp()) / (1.0 - (-0.2f64).exp());
        assert!((rep.rows[0].ratio.powi(2) - ratio2).abs() < 1e-12);
        assert!(deformation_scan(&dbl, 2, 1, &[0.1]).is_err());
        assert!(deformation_scan(&dbl, 1, 2, &[0.6]).is_err());
    }

    #[test]
    fn tail_examples() {
        let s = FockSpace::float(SpaceConfig::new(2, 1, 3), 0.3).unwrap();
        let x = FockVector::word(Word::from_indices(&[1, 2]));
        let t = 0.4;
        assert!((ou_tail(&s, &x, t, 1).unwrap() - (-2.0 * t).exp()).abs() < 1e-15);
        assert_eq!(ou_tail(&s, &x, 0.0, 3).unwrap(), 0.0);
        assert_eq!(ou_tail(&s, &x, t, 2).unwrap(), 0.0);
    }

    #[test]
    fn dilation_and_gram() {
        let (dbl, single) = spaces(1, 3, 0.5);
        assert!(dilation_deviation(&dbl, &single, 0.1).unwrap() < 1e-12);
        assert!(gram_min_eigenvalues(&single).unwrap().iter().all(|&x| x > 0.0));
    }
}
