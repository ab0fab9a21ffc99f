//! Fractal dimension estimation for point clouds: the Grassberger-Procaccia
//! correlation sum and direct grid box counting, plus the log-log slope fit
//! that turns a scaling curve into a dimension estimate.
//!
//! Pair counting is exact (no tree acceleration, no sampling) and costs
//! O(N^2); the estimation pipeline caps clouds at
//! [`EstimatorConfig::max_points`] via a deterministic strided subsample
//! before counting.

use std::collections::HashSet;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::pullback::{PointCloud, LABEL_WASHOUT};
use crate::{cvt, RealScalar};

/// Which scaling statistic a curve holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Occupied-cell counts `N(eps)` on an anchored grid.
    BoxCounting,
    /// Correlation sums `C(r)` (fraction of admissible pairs closer than r).
    Correlation,
}

/// A scaling statistic sampled on an ascending radii grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingCurve<T: RealScalar> {
    pub radii: Vec<T>,
    pub values: Vec<T>,
    pub kind: CurveKind,
    /// Dimension of the ambient space the cloud lives in, when known;
    /// used as a sanity cap on fitted slopes.
    pub ambient_dim: Option<usize>,
}

impl<T: RealScalar> ScalingCurve<T> {
    /// `(ln radius, ln value)` pairs for the strictly positive values,
    /// together with their indices into `radii`.
    pub fn log_log_pairs(&self) -> Vec<(usize, T, T)> {
        self.radii
            .iter()
            .zip(&self.values)
            .enumerate()
            .filter(|(_, (_, &v))| v > T::zero())
            .map(|(i, (&r, &v))| (i, r.ln(), v.ln()))
            .collect()
    }

    /// Two-column CSV `radius,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "radius,value")?;
        for (r, v) in self.radii.iter().zip(&self.values) {
            writeln!(
                out,
                "{:.16e},{:.16e}",
                r.to_f64().unwrap_or(f64::NAN),
                v.to_f64().unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }
}

/// How the fit window on the log-log curve is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangePolicy {
    /// Longest stable window, see [`fit_dimension`].
    Auto,
    /// Inclusive index range into the radii grid.
    Manual { lo: usize, hi: usize },
}

/// A fitted dimension value with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate<T: RealScalar> {
    pub value: T,
    /// Inclusive radii-index range the fit used.
    pub fit_range: (usize, usize),
    /// RMS of the log-log fit residuals.
    pub fit_residual: T,
    pub method: CurveKind,
    /// True when the raw slope exceeded `ambient + 0.5` and was capped.
    pub capped: bool,
}

/// Tunables of the estimation pipeline, surfaced in the experiment config.
#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub method: CurveKind,
    pub n_radii: usize,
    pub range_policy: RangePolicy,
    /// Temporal exclusion window applied to clouds labelled "washout".
    pub theiler_window: usize,
    /// Clouds larger than this are strided down before pair counting.
    pub max_points: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            method: CurveKind::Correlation,
            n_radii: 24,
            range_policy: RangePolicy::Auto,
            theiler_window: 10,
            max_points: 100_000,
        }
    }
}

/// Temporal exclusion used by [`correlation_sum`] for trajectory-ordered
/// clouds (the "washout" label).
pub const DEFAULT_THEILER_WINDOW: usize = 10;

/// Smallest fit window, in curve points.
const MIN_WINDOW_POINTS: usize = 5;
/// Maximal deviation of a window's two-point slopes from their median.
const SLOPE_TOLERANCE: f64 = 0.2;

/// Correlation sums over the given radii. Clouds labelled "washout" carry a
/// trajectory ordering, so pairs closer than [`DEFAULT_THEILER_WINDOW`] time
/// steps are excluded from both numerator and denominator.
pub fn correlation_sum<T: RealScalar>(
    points: &PointCloud<T>,
    radii: &[T],
) -> Result<ScalingCurve<T>> {
    let exclusion = if points.label() == LABEL_WASHOUT {
        DEFAULT_THEILER_WINDOW
    } else {
        0
    };
    correlation_sum_with_exclusion(points, radii, exclusion)
}

/// [`correlation_sum`] with an explicit temporal exclusion window:
/// pairs with `|i - j| < exclusion` are skipped.
pub fn correlation_sum_with_exclusion<T: RealScalar>(
    points: &PointCloud<T>,
    radii: &[T],
    exclusion: usize,
) -> Result<ScalingCurve<T>> {
    if points.len() < 2 {
        return Err(CoreError::InvalidArgument(
            "correlation sums need at least 2 points".into(),
        ));
    }
    validate_radii(radii)?;
    let n = points.len();
    let dim = points.dim();
    let gap = exclusion.max(1);
    if n <= gap {
        return Err(CoreError::InvalidArgument(format!(
            "no admissible pairs: {n} points with exclusion window {exclusion}"
        )));
    }

    let flat: Vec<T> = points
        .points()
        .iter()
        .flat_map(|p| p.iter().copied())
        .collect();
    let edges: Vec<T> = radii.iter().map(|&r| r * r).collect();
    let top = *edges.last().unwrap();
    let k = edges.len();

    let (hist, total) = (0..n - gap)
        .into_par_iter()
        .fold(
            || (vec![0u64; k + 1], 0u64),
            |(mut hist, mut total), i| {
                let a = &flat[i * dim..(i + 1) * dim];
                for j in (i + gap)..n {
                    let b = &flat[j * dim..(j + 1) * dim];
                    let mut d2 = T::zero();
                    for c in 0..dim {
                        let diff = a[c] - b[c];
                        d2 += diff * diff;
                    }
                    total += 1;
                    if d2 < top {
                        let idx = edges.partition_point(|&e| e <= d2);
                        hist[idx] += 1;
                    }
                }
                (hist, total)
            },
        )
        .reduce(
            || (vec![0u64; k + 1], 0u64),
            |(mut ha, ta), (hb, tb)| {
                for (a, b) in ha.iter_mut().zip(&hb) {
                    *a += b;
                }
                (ha, ta + tb)
            },
        );

    let mut values = Vec::with_capacity(k);
    let mut acc = 0u64;
    for &h in hist.iter().take(k) {
        acc += h;
        values.push(cvt::<T>(acc as f64 / total as f64));
    }
    Ok(ScalingCurve {
        radii: radii.to_vec(),
        values,
        kind: CurveKind::Correlation,
        ambient_dim: Some(dim),
    })
}

/// Occupied-cell counts on axis-aligned grids of side `eps`, anchored at the
/// cloud's coordinatewise minimum. Exact integer counts.
pub fn box_count<T: RealScalar>(points: &PointCloud<T>, epsilons: &[T]) -> Result<ScalingCurve<T>> {
    if points.is_empty() {
        return Err(CoreError::InvalidArgument(
            "box counting needs a nonempty cloud".into(),
        ));
    }
    validate_radii(epsilons)?;
    let dim = points.dim();
    let mins: Vec<T> = (0..dim)
        .map(|c| {
            points
                .points()
                .iter()
                .map(|p| p[c])
                .fold(T::max_value().unwrap(), |m, v| if v < m { v } else { m })
        })
        .collect();
    let mut values = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let mut cells: HashSet<Vec<i64>> = HashSet::new();
        for p in points.points() {
            let cell: Vec<i64> = (0..dim)
                .map(|c| {
                    ((p[c] - mins[c]) / eps)
                        .floor()
                        .to_f64()
                        .map(|v| v as i64)
                        .unwrap_or(0)
                })
                .collect();
            cells.insert(cell);
        }
        values.push(cvt::<T>(cells.len() as f64));
    }
    Ok(ScalingCurve {
        radii: epsilons.to_vec(),
        values,
        kind: CurveKind::BoxCounting,
        ambient_dim: Some(dim),
    })
}

/// Least-squares slope of the log-log scaling curve.
///
/// The Auto policy works on the dimension scale (correlation slopes as-is,
/// box-counting slopes negated): the lowest and highest tenth of the usable
/// points are set aside and the longest contiguous window of at least 5
/// points whose local two-point slopes stay within 0.2 of their window
/// median is fitted; among equally long windows the one with the larger
/// median slope wins. Slopes above `ambient + 0.5` are capped and flagged.
pub fn fit_dimension<T: RealScalar>(
    curve: &ScalingCurve<T>,
    range_policy: RangePolicy,
) -> Result<DimensionEstimate<T>> {
    let pairs = curve.log_log_pairs();
    let sign = match curve.kind {
        CurveKind::Correlation => 1.0,
        CurveKind::BoxCounting => -1.0,
    };
    let (window, fitted): (&[(usize, T, T)], _) = match range_policy {
        RangePolicy::Manual { lo, hi } => {
            if lo > hi {
                return Err(CoreError::InvalidArgument(
                    "manual range must have lo <= hi".into(),
                ));
            }
            let lo_pos = pairs.partition_point(|&(i, _, _)| i < lo);
            let hi_pos = pairs.partition_point(|&(i, _, _)| i <= hi);
            let slice = &pairs[lo_pos..hi_pos];
            if slice.len() < 4 {
                return Err(CoreError::EstimationFailed(format!(
                    "manual range [{lo}, {hi}] holds {} usable points, need >= 4",
                    slice.len()
                )));
            }
            (slice, least_squares(slice)?)
        }
        RangePolicy::Auto => {
            let trimmed = trim_deciles(&pairs);
            if trimmed.len() < MIN_WINDOW_POINTS {
                return Err(CoreError::EstimationFailed(format!(
                    "only {} usable curve points after trimming; supply a Manual range",
                    trimmed.len()
                )));
            }
            let slopes: Vec<f64> = trimmed
                .windows(2)
                .map(|w| {
                    let (_, x0, y0) = w[0];
                    let (_, x1, y1) = w[1];
                    sign * ((y1 - y0) / (x1 - x0)).to_f64().unwrap_or(f64::NAN)
                })
                .collect();
            let best = best_window(&slopes).ok_or_else(|| {
                CoreError::EstimationFailed(
                    "no stable scaling window found; supply a Manual range".into(),
                )
            })?;
            let slice = &trimmed[best.0..=best.1 + 1];
            (slice, least_squares(slice)?)
        }
    };
    let (slope, residual) = fitted;
    let raw = cvt::<T>(sign) * slope;
    let (value, capped) = match curve.ambient_dim {
        Some(d) => {
            let cap = cvt::<T>(d as f64 + 0.5);
            if raw > cap {
                (cap, true)
            } else {
                (raw, false)
            }
        }
        None => (raw, false),
    };
    Ok(DimensionEstimate {
        value,
        fit_range: (window.first().unwrap().0, window.last().unwrap().0),
        fit_residual: residual,
        method: curve.kind,
        capped,
    })
}

/// Drop the bottom and top tenth of the usable points.
fn trim_deciles<T: Copy>(pairs: &[T]) -> &[T] {
    let k = pairs.len();
    let drop = k / 10;
    &pairs[drop..k - drop]
}

/// Longest run of consecutive slopes within [`SLOPE_TOLERANCE`] of their
/// median (at least `MIN_WINDOW_POINTS - 1` slopes); ties go to the larger
/// median. Returns inclusive slope-index bounds.
fn best_window(slopes: &[f64]) -> Option<(usize, usize)> {
    let k = slopes.len();
    let min_slopes = MIN_WINDOW_POINTS - 1;
    let mut best: Option<(usize, usize, f64)> = None;
    for a in 0..k {
        for b in (a + min_slopes - 1)..k {
            let w = &slopes[a..=b];
            if w.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let med = median(w);
            if w.iter().all(|&s| (s - med).abs() < SLOPE_TOLERANCE) {
                let better = match best {
                    None => true,
                    Some((ba, bb, bmed)) => {
                        let len = b - a;
                        let blen = bb - ba;
                        len > blen || (len == blen && med > bmed)
                    }
                };
                if better {
                    best = Some((a, b, med));
                }
            }
        }
    }
    best.map(|(a, b, _)| (a, b))
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Slope and RMS residual of the least-squares line through the points.
fn least_squares<T: RealScalar>(pts: &[(usize, T, T)]) -> Result<(T, T)> {
    let n = cvt::<T>(pts.len() as f64);
    let mut sx = T::zero();
    let mut sy = T::zero();
    for &(_, x, y) in pts {
        sx += x;
        sy += y;
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for &(_, x, y) in pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return Err(CoreError::EstimationFailed(
            "degenerate fit range (all radii equal)".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = T::zero();
    for &(_, x, y) in pts {
        let r = y - (slope * x + intercept);
        ss += r * r;
    }
    Ok((slope, (ss / n).sqrt()))
}

/// Default radii grid: `n` logarithmically spaced values between the
/// smallest nonzero pairwise distance and half the diameter, both measured
/// on a deterministic subsample of at most 1000 points.
pub fn default_radii<T: RealScalar>(points: &PointCloud<T>, n: usize) -> Result<Vec<T>> {
    if n < 2 {
        return Err(CoreError::InvalidArgument("need at least 2 radii".into()));
    }
    if points.len() < 2 {
        return Err(CoreError::InvalidArgument(
            "need at least 2 points for a radii grid".into(),
        ));
    }
    let sample = points.strided_subsample(1000);
    let mut min_d = T::max_value().unwrap();
    let mut max_d = T::zero();
    for i in 0..sample.len() {
        for j in (i + 1)..sample.len() {
            let d = (&sample.points()[i] - &sample.points()[j]).norm();
            if d > T::zero() && d < min_d {
                min_d = d;
            }
            if d > max_d {
                max_d = d;
            }
        }
    }
    if max_d == T::zero() {
        return Err(CoreError::InvalidArgument(
            "cloud has zero diameter".into(),
        ));
    }
    let hi = max_d / cvt::<T>(2.0);
    let mut lo = min_d;
    if !(lo < hi) {
        lo = hi / cvt::<T>(1000.0);
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / cvt::<T>((n - 1) as f64);
    Ok((0..n)
        .map(|i| (llo + step * cvt::<T>(i as f64)).exp())
        .collect())
}

/// End-to-end estimate for a point cloud, applying the single-point and
/// zero-diameter conventions (dimension 0) and the subsample cap.
pub fn estimate_dimension<T: RealScalar>(
    points: &PointCloud<T>,
    config: &EstimatorConfig,
) -> Result<DimensionEstimate<T>> {
    let zero = DimensionEstimate {
        value: T::zero(),
        fit_range: (0, 0),
        fit_residual: T::zero(),
        method: config.method,
        capped: false,
    };
    if points.len() <= 1 {
        return Ok(zero);
    }
    let working = points.strided_subsample(config.max_points);
    match default_radii(&working, config.n_radii) {
        Ok(radii) => {
            let curve = match config.method {
                CurveKind::Correlation => {
                    let exclusion = if working.label() == LABEL_WASHOUT {
                        config.theiler_window
                    } else {
                        0
                    };
                    correlation_sum_with_exclusion(&working, &radii, exclusion)?
                }
                CurveKind::BoxCounting => box_count(&working, &radii)?,
            };
            fit_dimension(&curve, config.range_policy)
        }
        // Zero diameter: every point coincides.
        Err(CoreError::InvalidArgument(msg)) if msg.contains("zero diameter") => Ok(zero),
        Err(e) => Err(e),
    }
}

fn validate_radii<T: RealScalar>(radii: &[T]) -> Result<()> {
    if radii.is_empty() {
        return Err(CoreError::InvalidArgument("radii list is empty".into()));
    }
    if radii[0] <= T::zero() {
        return Err(CoreError::InvalidArgument("radii must be positive".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::InvalidArgument(
            "radii must be strictly ascending".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud_from(rows: Vec<Vec<f64>>, label: &str) -> PointCloud<f64> {
        let dim = rows[0].len();
        let pts = rows.into_iter().map(DVector::from_vec).collect();
        PointCloud::new(pts, dim, label).unwrap()
    }

    fn uniform_cloud(n: usize, dim: usize, seed: u64) -> PointCloud<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts = (0..n)
            .map(|_| DVector::from_fn(dim, |_, _| rng.gen::<f64>()))
            .collect();
        PointCloud::new(pts, dim, "uniform").unwrap()
    }

    #[test]
    fn identical_pair_saturates_at_one() {
        let cloud = cloud_from(vec![vec![0.5, 0.5], vec![0.5, 0.5]], "pair");
        let curve = correlation_sum(&cloud, &[0.1, 1.0]).unwrap();
        assert_eq!(curve.values, vec![1.0, 1.0]);
    }

    #[test]
    fn correlation_needs_two_points() {
        let cloud = cloud_from(vec![vec![0.0]], "single");
        assert!(correlation_sum(&cloud, &[0.5]).is_err());
    }

    #[test]
    fn segment_curve_matches_uniform_formula() {
        // For uniform points on [0, L]: C(r) ~ 2r/L - (r/L)^2.
        let cloud = uniform_cloud(4000, 1, 9);
        let radii = [0.05, 0.1, 0.2, 0.4];
        let curve = correlation_sum(&cloud, &radii).unwrap();
        for (&r, &c) in radii.iter().zip(&curve.values) {
            let expected = 2.0 * r - r * r;
            assert!(
                (c - expected).abs() < 0.02,
                "C({r}) = {c}, expected {expected}"
            );
        }
    }

    #[test]
    fn correlation_sums_are_nondecreasing_and_normalized() {
        let cloud = uniform_cloud(500, 3, 10);
        let radii = default_radii(&cloud, 16).unwrap();
        let curve = correlation_sum(&cloud, &radii).unwrap();
        for w in curve.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(*curve.values.last().unwrap() <= 1.0);
    }

    #[test]
    fn box_count_single_point_is_one_cell() {
        let cloud = cloud_from(vec![vec![0.3, 0.7]], "single");
        let curve = box_count(&cloud, &[0.1, 0.5, 2.0]).unwrap();
        assert_eq!(curve.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn box_count_lattice_matches_grid() {
        // k x k lattice filling the unit square, counted with cells of side
        // 1/k: every cell is occupied.
        let k = 20usize;
        let mut rows = Vec::new();
        for i in 0..k {
            for j in 0..k {
                rows.push(vec![i as f64 / k as f64, j as f64 / k as f64]);
            }
        }
        let cloud = cloud_from(rows, "lattice");
        let curve = box_count(&cloud, &[0.999 / k as f64]).unwrap();
        assert_eq!(curve.values[0], (k * k) as f64);
    }

    #[test]
    fn box_counts_nonincreasing_on_dyadic_grids() {
        let cloud = uniform_cloud(2000, 2, 11);
        let eps: Vec<f64> = (0..8).map(|i| 0.01 * 2f64.powi(i)).collect();
        let curve = box_count(&cloud, &eps).unwrap();
        for w in curve.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn exact_power_law_recovers_slope() {
        let radii: Vec<f64> = (0..20).map(|i| 0.01 * 1.4f64.powi(i)).collect();
        let values: Vec<f64> = radii.iter().map(|r| r.powf(1.5)).collect();
        let curve = ScalingCurve {
            radii,
            values,
            kind: CurveKind::Correlation,
            ambient_dim: None,
        };
        let est = fit_dimension(&curve, RangePolicy::Auto).unwrap();
        assert!((est.value - 1.5).abs() < 1e-6, "value {}", est.value);
        assert!(est.fit_residual < 1e-9);
        assert!(!est.capped);
    }

    #[test]
    fn manual_range_is_respected() {
        let radii: Vec<f64> = (0..12).map(|i| 0.01 * 2f64.powi(i)).collect();
        let values: Vec<f64> = radii.iter().map(|r| r * r).collect();
        let curve = ScalingCurve {
            radii,
            values,
            kind: CurveKind::Correlation,
            ambient_dim: None,
        };
        let est = fit_dimension(&curve, RangePolicy::Manual { lo: 2, hi: 9 }).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9);
        assert_eq!(est.fit_range, (2, 9));
        assert!(fit_dimension(&curve, RangePolicy::Manual { lo: 2, hi: 3 }).is_err());
    }

    #[test]
    fn unit_square_reads_two() {
        let cloud = uniform_cloud(10_000, 2, 12);
        let est = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        assert!(
            (est.value - 2.0).abs() <= 0.1,
            "square dimension {}",
            est.value
        );
    }

    #[test]
    fn segment_reads_one() {
        let cloud = uniform_cloud(10_000, 1, 13);
        let est = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        assert!(
            (est.value - 1.0).abs() <= 0.05,
            "segment dimension {}",
            est.value
        );
    }

    #[test]
    fn cantor_sample_reads_log2_over_log3() {
        // Depth-12 middle-thirds construction: all 2^12 left endpoints.
        let mut xs = vec![0.0f64];
        for _ in 0..12 {
            let mut next = Vec::with_capacity(xs.len() * 2);
            for &x in &xs {
                next.push(x / 3.0);
                next.push(x / 3.0 + 2.0 / 3.0);
            }
            xs = next;
        }
        let cloud = cloud_from(xs.into_iter().map(|x| vec![x]).collect(), "cantor");
        let cfg = EstimatorConfig {
            method: CurveKind::BoxCounting,
            ..Default::default()
        };
        let est = estimate_dimension(&cloud, &cfg).unwrap();
        let target = 2f64.ln() / 3f64.ln();
        assert!(
            (est.value - target).abs() <= 0.05,
            "cantor dimension {} vs {target}",
            est.value
        );
    }

    #[test]
    fn single_point_is_zero_by_convention() {
        let cloud = cloud_from(vec![vec![1.0, 2.0, 3.0]], "single");
        let est = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        assert_eq!(est.value, 0.0);
        let same = cloud_from(vec![vec![1.0, 2.0]; 50], "coincident");
        let est = estimate_dimension(&same, &EstimatorConfig::default()).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn estimates_are_isometry_invariant() {
        let cloud = uniform_cloud(2000, 2, 14);
        let base = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        // Rotate by 30 degrees and translate.
        let (s, c) = (30f64.to_radians().sin(), 30f64.to_radians().cos());
        let moved: Vec<DVector<f64>> = cloud
            .points()
            .iter()
            .map(|p| {
                DVector::from_vec(vec![c * p[0] - s * p[1] + 5.0, s * p[0] + c * p[1] - 2.0])
            })
            .collect();
        let moved = PointCloud::new(moved, 2, "uniform").unwrap();
        let rotated = estimate_dimension(&moved, &EstimatorConfig::default()).unwrap();
        assert!((rotated.value - base.value).abs() < 1e-9);
    }

    #[test]
    fn estimates_are_scale_covariant() {
        let cloud = uniform_cloud(2000, 2, 15);
        let base = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        let scaled: Vec<DVector<f64>> = cloud.points().iter().map(|p| p * 37.0).collect();
        let scaled = PointCloud::new(scaled, 2, "uniform").unwrap();
        let est = estimate_dimension(&scaled, &EstimatorConfig::default()).unwrap();
        assert!((est.value - base.value).abs() < 0.02);
    }

    #[test]
    fn theiler_exclusion_applies_to_washout_clouds() {
        // A slow 1-D walk: adjacent samples are spatially close, so without
        // the temporal exclusion the small-r sums are inflated.
        let n = 2000;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![(i as f64 * 0.01).sin()]).collect();
        let washout = cloud_from(rows.clone(), LABEL_WASHOUT);
        let plain = cloud_from(rows, "plain");
        let radii = [1e-4, 1e-3];
        let with = correlation_sum(&washout, &radii).unwrap();
        let without = correlation_sum(&plain, &radii).unwrap();
        assert!(with.values[0] < without.values[0]);
    }

    #[test]
    fn subset_estimate_is_close() {
        let cloud = uniform_cloud(10_000, 2, 16);
        let full = estimate_dimension(&cloud, &EstimatorConfig::default()).unwrap();
        let tenth = cloud.strided_subsample(1000);
        let sub = estimate_dimension(&tenth, &EstimatorConfig::default()).unwrap();
        assert!(full.value >= sub.value - 0.2);
    }
}
