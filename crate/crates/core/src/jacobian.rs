//! Derivatives of the step map and the m-fold iteration map, the rank
//! conditions behind the lower-bound argument (G1: uniform state
//! contraction, G2: full-rank input Jacobian at a fixed point), and
//! conditional Lyapunov exponents with the singular-value dimension bound.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::drivers::InputWindow;
use crate::error::{CoreError, Result};
use crate::linalg::{qr_positive, singular_values_desc, spectral_norm};
use crate::pullback::solve_fixed_point;
use crate::reservoir::ReservoirParams;
use crate::{cvt, RealScalar};

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_RANK_RTOL: f64 = 1e-10;

/// Internal tolerance for the fixed-point solves behind G2 checks.
const FIXED_POINT_TOL: f64 = 1e-12;
const FIXED_POINT_MAX_ITER: usize = 1_000_000;

/// Exponent cap standing in for minus infinity (near `ln` of the smallest
/// positive double); reported when a Jacobian product is rank deficient.
pub const EXPONENT_CAP: f64 = -745.0;

/// SVD-based rank decision, with the full singular-value list kept so the
/// decision stays auditable.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport<T: RealScalar> {
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    /// Descending.
    pub singular_values: Vec<T>,
    pub numerical_rank: usize,
    /// Absolute threshold actually applied.
    pub tolerance_used: T,
    pub full_rank: bool,
}

/// Conditional Lyapunov exponents (per-step natural-log rates, descending)
/// and the dimension bound they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport<T: RealScalar> {
    pub exponents: Vec<T>,
    pub steps_used: usize,
    pub dimension_bound: T,
    /// True when one or more exponents collapsed to [`EXPONENT_CAP`].
    pub capped: bool,
}

/// Outcome of the G1 sweep: the analytic bound together with the worst
/// sampled Jacobian norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G1Report<T: RealScalar> {
    pub analytic_bound: T,
    pub sampled_max: T,
    pub holds: bool,
}

/// Outcome of a perturbation sweep around a full-rank base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PersistenceReport {
    /// Trials whose perturbed weights kept D1F full rank.
    pub retained: usize,
    /// Trials that ran but lost full rank.
    pub degraded: usize,
    /// Trials skipped because the perturbed `||W||_2` reached 1.
    pub skipped: usize,
}

impl PersistenceReport {
    /// Fraction of executed (non-skipped) trials retaining full rank.
    pub fn fraction(&self) -> f64 {
        let ran = self.retained + self.degraded;
        if ran == 0 {
            f64::NAN
        } else {
            self.retained as f64 / ran as f64
        }
    }
}

/// State Jacobian of the step map:
/// `(1 - alpha) I + alpha diag(sech^2(W x + W_in u)) W`.
pub fn d2_g<T: RealScalar>(
    params: &ReservoirParams<T>,
    input: &DVector<T>,
    state: &DVector<T>,
) -> Result<DMatrix<T>> {
    if input.len() != params.input_dim() || state.len() != params.state_dim() {
        return Err(CoreError::InvalidArgument(format!(
            "shapes ({}, {}) do not match params ({}, {})",
            input.len(),
            state.len(),
            params.input_dim(),
            params.state_dim()
        )));
    }
    let n = params.state_dim();
    let alpha = params.leak_rate();
    let mut pre = params.recurrent() * state;
    pre.gemv(T::one(), params.input_matrix(), input, T::one());
    // sech^2 = 1 - tanh^2
    let gains: Vec<T> = pre.iter().map(|&a| T::one() - a.tanh() * a.tanh()).collect();
    let mut jac = DMatrix::from_fn(n, n, |i, j| alpha * gains[i] * params.recurrent()[(i, j)]);
    for i in 0..n {
        jac[(i, i)] += T::one() - alpha;
    }
    Ok(jac)
}

/// Jacobian of the m-fold iteration map with respect to the stacked input
/// block, as the horizontal concatenation of m blocks: block k is
/// `(prod_{i<k} D_i W) D_k W_in`, with `D_i` the activation gains along the
/// intermediate states. Only defined for the plain tanh map (`alpha = 1`);
/// the block is consumed right-to-left exactly like [`m_fold_map`].
pub fn d1_f_blocks<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    state: &DVector<T>,
) -> Result<DMatrix<T>> {
    if params.leak_rate() != T::one() {
        return Err(CoreError::Unsupported(
            "d1_f_blocks is defined for leak_rate = 1 only".into(),
        ));
    }
    if block.is_empty() {
        return Err(CoreError::InvalidArgument("block must be nonempty".into()));
    }
    if block.dim() != params.input_dim() || state.len() != params.state_dim() {
        return Err(CoreError::InvalidArgument(
            "block/state shapes do not match params".into(),
        ));
    }
    let n_r = params.state_dim();
    let n_in = params.input_dim();
    let m = block.len();

    // states[i] is the state after consuming the last i block elements;
    // with alpha = 1 each equals tanh of its pre-activation, so the
    // activation gain there is 1 - states[i]^2.
    let mut states = Vec::with_capacity(m + 1);
    states.push(state.clone());
    for u in block.vectors().iter().rev() {
        let next = params.step(u, states.last().unwrap())?;
        states.push(next);
    }

    let mut out = DMatrix::<T>::zeros(n_r, m * n_in);
    let mut prefix = DMatrix::<T>::identity(n_r, n_r);
    for k in 1..=m {
        // Gain of the step that consumed block element k (1-based, so the
        // post-step state is states[m - k + 1]).
        let post = &states[m - k + 1];
        let gains: Vec<T> = post.iter().map(|&y| T::one() - y * y).collect();
        let scaled_win = DMatrix::from_fn(n_r, n_in, |i, j| {
            gains[i] * params.input_matrix()[(i, j)]
        });
        let block_k = &prefix * scaled_win;
        out.view_mut((0, (k - 1) * n_in), (n_r, n_in)).copy_from(&block_k);
        if k < m {
            let scaled_w = DMatrix::from_fn(n_r, n_r, |i, j| {
                gains[i] * params.recurrent()[(i, j)]
            });
            prefix *= scaled_w;
        }
    }
    Ok(out)
}

/// The D-weighted Kalman-type matrix `[DC | (DW)DC | ... | (DW)^{n-1}DC]`.
/// With `D = I` this is the classical controllability matrix of `(W, C)`.
pub fn kalman_type_matrix<T: RealScalar>(
    diag: &DVector<T>,
    w: &DMatrix<T>,
    column: &DVector<T>,
) -> Result<DMatrix<T>> {
    let n = w.nrows();
    if w.ncols() != n || diag.len() != n || column.len() != n || n == 0 {
        return Err(CoreError::InvalidArgument(
            "need square W with matching diagonal and column lengths".into(),
        ));
    }
    let mut out = DMatrix::<T>::zeros(n, n);
    let mut col = DVector::from_fn(n, |i, _| diag[i] * column[i]);
    out.set_column(0, &col);
    for k in 1..n {
        let wc = w * &col;
        col = DVector::from_fn(n, |i, _| diag[i] * wc[i]);
        out.set_column(k, &col);
    }
    Ok(out)
}

/// Numerical rank of a matrix: singular values above
/// `relative_tolerance * sigma_max * max(rows, cols)` count.
pub fn numerical_rank<T: RealScalar>(
    matrix: &DMatrix<T>,
    relative_tolerance: T,
) -> Result<RankReport<T>> {
    if matrix.is_empty() {
        return Err(CoreError::InvalidArgument("matrix is empty".into()));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidArgument(
            "matrix entries must be finite".into(),
        ));
    }
    let sv = singular_values_desc(matrix);
    let sigma_max = sv[0];
    let max_dim = cvt::<T>(matrix.nrows().max(matrix.ncols()) as f64);
    let threshold = relative_tolerance * sigma_max * max_dim;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    Ok(RankReport {
        matrix_rows: matrix.nrows(),
        matrix_cols: matrix.ncols(),
        full_rank: rank == matrix.nrows().min(matrix.ncols()),
        numerical_rank: rank,
        singular_values: sv,
        tolerance_used: threshold,
    })
}

/// [`numerical_rank`] with the default relative tolerance `1e-10`.
pub fn numerical_rank_default<T: RealScalar>(matrix: &DMatrix<T>) -> Result<RankReport<T>> {
    numerical_rank(matrix, cvt(DEFAULT_RANK_RTOL))
}

/// Condition G1: the analytic bound `(1 - alpha) + alpha ||W||_2` must be
/// below 1. Also reports the worst `||D_2 g||_2` over seeded samples of
/// `(u, x)` from `[0,1]^{N_in} x [-1,1]^{N_r}` as a cross-check.
pub fn check_g1<T: RealScalar>(
    params: &ReservoirParams<T>,
    samples: usize,
    seed: u64,
) -> Result<G1Report<T>> {
    if samples == 0 {
        return Err(CoreError::InvalidArgument("samples must be >= 1".into()));
    }
    let alpha = params.leak_rate();
    let analytic = (T::one() - alpha) + alpha * spectral_norm(params.recurrent());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_max = T::zero();
    for _ in 0..samples {
        let u = DVector::from_fn(params.input_dim(), |_, _| cvt::<T>(rng.gen::<f64>()));
        let x = DVector::from_fn(params.state_dim(), |_, _| {
            cvt::<T>(2.0 * rng.gen::<f64>() - 1.0)
        });
        let norm = spectral_norm(&d2_g(params, &u, &x)?);
        if norm > sampled_max {
            sampled_max = norm;
        }
    }
    Ok(G1Report {
        analytic_bound: analytic,
        sampled_max,
        holds: analytic < T::one(),
    })
}

/// Condition G2 for one block: solve the fixed point of the m-fold map and
/// report the numerical rank of the input Jacobian there. `full_rank = true`
/// certifies G2 for this block.
pub fn check_g2<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    rank_rtol: T,
) -> Result<RankReport<T>> {
    let m = block.len();
    if m * params.input_dim() < params.state_dim() {
        return Err(CoreError::InvalidArgument(format!(
            "G2 needs m * N_in >= N_r, got {} * {} < {}",
            m,
            params.input_dim(),
            params.state_dim()
        )));
    }
    let fp = solve_fixed_point(params, block, cvt(FIXED_POINT_TOL), FIXED_POINT_MAX_ITER)?;
    let jac = d1_f_blocks(params, block, &fp.point)?;
    numerical_rank(&jac, rank_rtol)
}

/// Perturb all weight entries by seeded uniform `[-radius, radius]`, re-solve
/// the fixed point and re-check G2. Openness of the full-rank set predicts a
/// retained fraction tending to 1 as the radius shrinks. Perturbations that
/// push `||W||_2` to 1 or beyond are skipped and counted separately.
pub fn perturbation_persistence<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    radius: T,
    trials: usize,
    seed: u64,
) -> Result<PersistenceReport> {
    if radius < T::zero() {
        return Err(CoreError::InvalidArgument("radius must be >= 0".into()));
    }
    let base = check_g2(params, block, cvt(DEFAULT_RANK_RTOL))?;
    if !base.full_rank {
        return Err(CoreError::Precondition(
            "base point must be full rank for a persistence sweep".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PersistenceReport {
        retained: 0,
        degraded: 0,
        skipped: 0,
    };
    for _ in 0..trials {
        let mut jitter =
            |v: T| v + radius * cvt::<T>(2.0 * rng.gen::<f64>() - 1.0);
        let w = params.recurrent().map(&mut jitter);
        let win = params.input_matrix().map(&mut jitter);
        if spectral_norm(&w) >= T::one() {
            report.skipped += 1;
            continue;
        }
        let perturbed = ReservoirParams::new(w, win, params.leak_rate())?;
        let rank = check_g2(&perturbed, block, cvt(DEFAULT_RANK_RTOL))?;
        if rank.full_rank {
            report.retained += 1;
        } else {
            report.degraded += 1;
        }
    }
    Ok(report)
}

/// Conditional Lyapunov exponents along one driven trajectory: an
/// orthonormal frame is pushed through the state Jacobians with QR
/// re-orthonormalisation every `renorm_every` steps, and the per-step log
/// growth rates are averaged over the run. Rank-deficient products are
/// reported as [`EXPONENT_CAP`] and flagged.
pub fn conditional_lyapunov<T: RealScalar>(
    params: &ReservoirParams<T>,
    inputs: &InputWindow<T>,
    initial: &DVector<T>,
    renorm_every: usize,
) -> Result<SpectrumReport<T>> {
    if inputs.is_empty() {
        return Err(CoreError::InvalidArgument(
            "need at least one input step".into(),
        ));
    }
    if renorm_every == 0 {
        return Err(CoreError::InvalidArgument(
            "renorm_every must be >= 1".into(),
        ));
    }
    if initial.len() != params.state_dim() || inputs.dim() != params.input_dim() {
        return Err(CoreError::InvalidArgument(
            "input/initial shapes do not match params".into(),
        ));
    }
    let n_r = params.state_dim();
    let mut x = initial.clone();
    let mut frame = DMatrix::<T>::identity(n_r, n_r);
    let mut sums = vec![T::zero(); n_r];
    let mut since = 0usize;
    let accumulate = |frame: &mut DMatrix<T>, sums: &mut Vec<T>| {
        let (q, r) = qr_positive(frame);
        for (j, sum) in sums.iter_mut().enumerate() {
            *sum += r[(j, j)].ln();
        }
        *frame = q;
    };
    for u in inputs.vectors() {
        let jac = d2_g(params, u, &x)?;
        frame = &jac * &frame;
        x = params.step(u, &x)?;
        since += 1;
        if since == renorm_every {
            accumulate(&mut frame, &mut sums);
            since = 0;
        }
    }
    if since > 0 {
        accumulate(&mut frame, &mut sums);
    }
    let steps = inputs.len();
    let denom = cvt::<T>(steps as f64);
    let cap = cvt::<T>(EXPONENT_CAP);
    let mut capped = false;
    let mut exponents: Vec<T> = sums
        .iter()
        .map(|&s| {
            let lambda = s / denom;
            if !lambda.is_finite() || lambda < cap {
                capped = true;
                cap
            } else {
                lambda
            }
        })
        .collect();
    exponents.sort_by(|a, b| b.partial_cmp(a).expect("exponents are finite"));
    let dimension_bound = lyapunov_dimension_bound(&exponents);
    Ok(SpectrumReport {
        exponents,
        steps_used: steps,
        dimension_bound,
        capped,
    })
}

/// Kaplan-Yorke style bound from a descending exponent list: the smallest m
/// with `sum_{j<=m+1} lambda_j < 0` gives `m + sum_{j<=m} lambda_j /
/// (-lambda_{m+1})`; 0 when already the top exponent is negative, saturating
/// at the state dimension when no partial sum goes negative.
pub fn lyapunov_dimension_bound<T: RealScalar>(exponents: &[T]) -> T {
    let n = exponents.len();
    let mut prefix = T::zero();
    for (m, &lambda) in exponents.iter().enumerate() {
        if prefix + lambda < T::zero() {
            return cvt::<T>(m as f64) + prefix / -lambda;
        }
        prefix += lambda;
    }
    cvt::<T>(n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::random_periodic_block;
    use approx::assert_relative_eq;

    #[test]
    fn d2_g_at_origin_is_w() {
        let p = ReservoirParams::<f64>::generate(1, 4, 2, 0.9, 1.0).unwrap();
        let jac = d2_g(&p, &DVector::zeros(2), &DVector::zeros(4)).unwrap();
        assert_relative_eq!(jac, *p.recurrent(), epsilon = 1e-15);
    }

    #[test]
    fn d2_g_norm_obeys_the_analytic_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let p = ReservoirParams::<f64>::generate(rng.gen(), 5, 2, 0.9, 0.7).unwrap();
            let u = DVector::from_fn(2, |_, _| rng.gen::<f64>());
            let x = DVector::from_fn(5, |_, _| 2.0 * rng.gen::<f64>() - 1.0);
            let jac = d2_g(&p, &u, &x).unwrap();
            let bound = 0.3 + 0.7 * 0.9;
            assert!(spectral_norm(&jac) <= bound + 1e-12);
        }
    }

    #[test]
    fn d1_f_blocks_of_zero_block_is_the_kalman_chain() {
        let p = ReservoirParams::<f64>::generate(8, 3, 2, 0.9, 1.0).unwrap();
        let m = 4;
        let block = InputWindow::new(vec![DVector::zeros(2); m])
            .unwrap()
            .into_periodic()
            .unwrap();
        let jac = d1_f_blocks(&p, &block, &DVector::zeros(3)).unwrap();
        // All gains are 1, so block k is W^{k-1} W_in.
        let mut expected = DMatrix::<f64>::zeros(3, m * 2);
        let mut power = DMatrix::<f64>::identity(3, 3);
        for k in 0..m {
            let blk = &power * p.input_matrix();
            expected.view_mut((0, k * 2), (3, 2)).copy_from(&blk);
            power = &power * p.recurrent();
        }
        assert_relative_eq!(jac, expected, epsilon = 1e-14);
    }

    #[test]
    fn d1_f_blocks_m1_is_the_one_step_chain_rule() {
        let p = ReservoirParams::<f64>::generate(9, 3, 2, 0.9, 1.0).unwrap();
        let block = random_periodic_block::<f64>(10, 1, 2).unwrap();
        let x = DVector::from_vec(vec![0.1, -0.3, 0.2]);
        let jac = d1_f_blocks(&p, &block, &x).unwrap();
        let y = p.step(block.get(0), &x).unwrap();
        let expected = DMatrix::from_fn(3, 2, |i, j| {
            (1.0 - y[i] * y[i]) * p.input_matrix()[(i, j)]
        });
        assert_relative_eq!(jac, expected, epsilon = 1e-14);
    }

    #[test]
    fn d1_f_blocks_requires_unit_leak() {
        let p = ReservoirParams::<f64>::generate(9, 3, 2, 0.9, 0.5).unwrap();
        let block = random_periodic_block::<f64>(10, 2, 2).unwrap();
        match d1_f_blocks(&p, &block, &DVector::zeros(3)) {
            Err(CoreError::Unsupported(_)) => {}
            other => panic!("expected unsupported-configuration, got {other:?}"),
        }
    }

    #[test]
    fn kalman_permutation_case() {
        let d = DVector::from_vec(vec![1.0, 1.0]);
        let w = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let c = DVector::from_vec(vec![0.0, 1.0]);
        let k = kalman_type_matrix(&d, &w, &c).unwrap();
        assert_eq!(k, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!(numerical_rank_default(&k).unwrap().full_rank);
    }

    #[test]
    fn kalman_repeated_column_case() {
        let d = DVector::from_vec(vec![1.0, 1.0]);
        let w = DMatrix::<f64>::identity(2, 2);
        let c = DVector::from_vec(vec![1.0, 0.0]);
        let k = kalman_type_matrix(&d, &w, &c).unwrap();
        assert_eq!(k.column(0), k.column(1));
        assert_eq!(numerical_rank_default(&k).unwrap().numerical_rank, 1);
    }

    #[test]
    fn rank_report_basics() {
        let eye = DMatrix::<f64>::identity(5, 5);
        let r = numerical_rank_default(&eye).unwrap();
        assert_eq!(r.numerical_rank, 5);
        assert!(r.full_rank);

        let a = DVector::from_vec(vec![1.0, 2.0, -1.0]);
        let b = DVector::from_vec(vec![0.5, 0.3]);
        let outer = &a * b.transpose();
        let r = numerical_rank_default(&outer).unwrap();
        assert_eq!(r.numerical_rank, 1);
        assert!(!r.full_rank);
        assert_eq!(r.matrix_rows, 3);
        assert_eq!(r.matrix_cols, 2);
        assert_eq!(
            r.numerical_rank,
            r.singular_values
                .iter()
                .filter(|&&s| s > r.tolerance_used)
                .count()
        );
    }

    #[test]
    fn rank_is_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = DMatrix::<f64>::from_fn(4, 6, |_, _| rng.gen::<f64>() - 0.5);
        let base = numerical_rank_default(&m).unwrap().numerical_rank;
        let mut permuted = m.clone();
        permuted.swap_rows(0, 3);
        permuted.swap_columns(1, 4);
        assert_eq!(
            numerical_rank_default(&permuted).unwrap().numerical_rank,
            base
        );
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let m = DMatrix::<f64>::zeros(0, 0);
        assert!(numerical_rank_default(&m).is_err());
    }

    #[test]
    fn g1_for_contractive_and_expansive_norms() {
        let p = ReservoirParams::<f64>::generate(1, 5, 2, 0.99, 1.0).unwrap();
        let g1 = check_g1(&p, 50, 7).unwrap();
        assert!(g1.holds);
        assert_relative_eq!(g1.analytic_bound, 0.99, epsilon = 1e-10);
        assert!(g1.sampled_max <= 0.99 + 1e-12);

        let q = ReservoirParams::<f64>::generate(1, 5, 2, 1.2, 1.0).unwrap();
        assert!(!check_g1(&q, 10, 7).unwrap().holds);

        let z = ReservoirParams::new(
            DMatrix::<f64>::zeros(3, 3),
            DMatrix::<f64>::identity(3, 3),
            1.0,
        )
        .unwrap();
        let g1z = check_g1(&z, 5, 1).unwrap();
        assert!(g1z.holds);
        assert_eq!(g1z.analytic_bound, 0.0);
    }

    #[test]
    fn g2_zero_block_reduces_to_kalman_genericity() {
        let mut full = 0;
        for seed in 0..20u64 {
            let p = ReservoirParams::<f64>::generate(seed, 5, 2, 0.99, 1.0).unwrap();
            let block = InputWindow::new(vec![DVector::zeros(2); 3])
                .unwrap()
                .into_periodic()
                .unwrap();
            if check_g2(&p, &block, 1e-10).unwrap().full_rank {
                full += 1;
            }
        }
        assert_eq!(full, 20);
    }

    #[test]
    fn g2_rejects_undersized_blocks() {
        let p = ReservoirParams::<f64>::generate(2, 5, 2, 0.99, 1.0).unwrap();
        let block = random_periodic_block::<f64>(3, 2, 2).unwrap();
        match check_g2(&p, &block, 1e-10) {
            Err(CoreError::InvalidArgument(msg)) => {
                assert!(msg.contains("m * N_in >= N_r"), "message: {msg}")
            }
            other => panic!("expected invalid-argument, got {other:?}"),
        }
    }

    #[test]
    fn g2_with_zero_input_matrix_has_rank_zero() {
        let p = ReservoirParams::new(
            ReservoirParams::<f64>::generate(4, 5, 2, 0.99, 1.0)
                .unwrap()
                .recurrent()
                .clone(),
            DMatrix::<f64>::zeros(5, 2),
            1.0,
        )
        .unwrap();
        let block = random_periodic_block::<f64>(5, 30, 2).unwrap();
        let r = check_g2(&p, &block, 1e-10).unwrap();
        assert_eq!(r.numerical_rank, 0);
        assert!(!r.full_rank);
    }

    #[test]
    fn persistence_with_zero_radius_is_total() {
        let p = ReservoirParams::<f64>::generate(6, 5, 2, 0.99, 1.0).unwrap();
        let block = random_periodic_block::<f64>(7, 30, 2).unwrap();
        let rep = perturbation_persistence(&p, &block, 0.0, 5, 11).unwrap();
        assert_eq!(rep.retained, 5);
        assert_eq!(rep.fraction(), 1.0);
    }

    #[test]
    fn linear_regime_recovers_diagonal_spectrum() {
        let w = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.25]));
        let p = ReservoirParams::new(w, DMatrix::<f64>::zeros(2, 1), 1.0).unwrap();
        let inputs = InputWindow::new(vec![DVector::zeros(1); 500]).unwrap();
        let rep = conditional_lyapunov(&p, &inputs, &DVector::zeros(2), 1).unwrap();
        assert_relative_eq!(rep.exponents[0], 0.5f64.ln(), epsilon = 1e-9);
        assert_relative_eq!(rep.exponents[1], 0.25f64.ln(), epsilon = 1e-9);
        assert_eq!(rep.dimension_bound, 0.0);
        assert!(!rep.capped);
    }

    #[test]
    fn zero_recurrence_caps_all_exponents() {
        let p = ReservoirParams::new(
            DMatrix::<f64>::zeros(3, 3),
            DMatrix::from_element(3, 2, 0.5),
            1.0,
        )
        .unwrap();
        let inputs = random_periodic_block::<f64>(8, 50, 2).unwrap();
        let rep = conditional_lyapunov(&p, &inputs, &DVector::zeros(3), 5).unwrap();
        assert!(rep.capped);
        for &l in &rep.exponents {
            assert_eq!(l, EXPONENT_CAP);
        }
        assert_eq!(rep.dimension_bound, 0.0);
    }

    #[test]
    fn contraction_bounds_the_top_exponent() {
        let p = ReservoirParams::<f64>::generate(12, 6, 2, 0.9, 1.0).unwrap();
        let inputs = random_periodic_block::<f64>(13, 600, 2).unwrap();
        let rep = conditional_lyapunov(&p, &inputs, &DVector::zeros(6), 4).unwrap();
        let mu = p.contraction_report().state_lipschitz;
        assert!(rep.exponents[0] <= mu.ln() + 1e-9);
        assert!(rep.dimension_bound == 0.0);
        assert_eq!(rep.steps_used, 600);
        // Sorted descending.
        for w in rep.exponents.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn dimension_bound_interpolates() {
        // lambda = (0.5, -1): m = 1, bound = 1 + 0.5/1 = 1.5
        let b = lyapunov_dimension_bound(&[0.5f64, -1.0]);
        assert_relative_eq!(b, 1.5, epsilon = 1e-12);
        // all nonnegative: saturates at N_r
        let b = lyapunov_dimension_bound(&[0.2f64, 0.1, 0.0]);
        assert_eq!(b, 3.0);
        // top exponent negative: 0
        let b = lyapunov_dimension_bound(&[-0.1f64, -0.5]);
        assert_eq!(b, 0.0);
    }
}
