//! The cocycle of the driven reservoir, washout approximations of
//! pullback-attractor fibres, and fixed points of the m-fold iteration map
//! for periodic input blocks.
//!
//! Orientation convention, fixed once for the whole crate:
//! [`cocycle`] consumes a window left-to-right (`vectors[0]` first), while
//! [`m_fold_map`] consumes a periodic block right-to-left (`vectors[m-1]`
//! innermost), matching the nesting of the m-fold composition.

use std::io::{BufRead, Write};

use nalgebra::DVector;

use crate::drivers::InputWindow;
use crate::error::{CoreError, Result};
use crate::reservoir::ReservoirParams;
use crate::{cvt, RealScalar};

/// Full state history of one driven run: `states[0]` is the initial state,
/// `states[k] = g(inputs[k-1], states[k-1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct CocycleRun<T: RealScalar> {
    pub states: Vec<DVector<T>>,
    pub inputs_used: InputWindow<T>,
    pub initial_state: DVector<T>,
}

impl<T: RealScalar> CocycleRun<T> {
    /// The state after all inputs were consumed.
    pub fn final_state(&self) -> &DVector<T> {
        self.states.last().expect("a run always holds the initial state")
    }
}

/// A finite sample of reservoir states, tagged with how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud<T: RealScalar> {
    points: Vec<DVector<T>>,
    dim: usize,
    label: String,
}

/// Labels with agreed-on meaning elsewhere in the crate.
pub const LABEL_WASHOUT: &str = "washout";
pub const LABEL_PERIODIC_ORBIT: &str = "periodic-orbit";

impl<T: RealScalar> PointCloud<T> {
    pub fn new(points: Vec<DVector<T>>, dim: usize, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::InvalidArgument("cloud dimension must be >= 1".into()));
        }
        if points.iter().any(|p| p.len() != dim) {
            return Err(CoreError::InvalidArgument(
                "cloud points must share a common dimension".into(),
            ));
        }
        if points.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
            return Err(CoreError::InvalidArgument(
                "cloud points must be finite".into(),
            ));
        }
        Ok(Self {
            points,
            dim,
            label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[DVector<T>] {
        &self.points
    }

    /// Merge clouds of equal dimension under a new label.
    pub fn pooled(clouds: &[PointCloud<T>], label: impl Into<String>) -> Result<Self> {
        let dim = clouds
            .first()
            .map(|c| c.dim)
            .ok_or_else(|| CoreError::InvalidArgument("nothing to pool".into()))?;
        let mut points = Vec::new();
        for c in clouds {
            if c.dim != dim {
                return Err(CoreError::InvalidArgument(
                    "pooled clouds must share a dimension".into(),
                ));
            }
            points.extend_from_slice(&c.points);
        }
        Self::new(points, dim, label)
    }

    /// Evenly strided subsample of at most `cap` points, preserving order.
    /// Deterministic, so repeated runs stay byte-identical.
    pub fn strided_subsample(&self, cap: usize) -> Self {
        if self.len() <= cap || cap == 0 {
            return self.clone();
        }
        let n = self.len();
        let mut points = Vec::with_capacity(cap);
        let mut last = usize::MAX;
        for k in 0..cap {
            let idx = if cap == 1 { 0 } else { k * (n - 1) / (cap - 1) };
            if idx != last {
                points.push(self.points[idx].clone());
                last = idx;
            }
        }
        Self {
            points,
            dim: self.dim,
            label: self.label.clone(),
        }
    }

    /// CSV: header `dim=N,label=<tag>`, one point per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "dim={},label={}", self.dim, self.label)?;
        for p in &self.points {
            let row: Vec<String> = p
                .iter()
                .map(|x| format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN)))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty cloud file".into()))??;
        let (dim_part, label_part) = header
            .split_once(',')
            .ok_or_else(|| CoreError::Parse(format!("bad cloud header `{header}`")))?;
        let dim: usize = dim_part
            .strip_prefix("dim=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| CoreError::Parse(format!("bad dim field `{dim_part}`")))?;
        let label = label_part
            .strip_prefix("label=")
            .ok_or_else(|| CoreError::Parse(format!("bad label field `{label_part}`")))?;
        let mut points = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Result<Vec<T>> = line
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map(cvt::<T>)
                        .map_err(|_| CoreError::Parse(format!("bad float `{v}`")))
                })
                .collect();
            points.push(DVector::from_vec(vals?));
        }
        Self::new(points, dim, label)
    }
}

/// A solved fixed point `z = F(block, z)` of the m-fold iteration map.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointResult<T: RealScalar> {
    pub point: DVector<T>,
    pub residual: T,
    pub iterations: usize,
    pub block: InputWindow<T>,
}

/// Run the cocycle: fold the step map over the window left-to-right,
/// keeping the full state history (`states[0]` = initial).
pub fn cocycle<T: RealScalar>(
    params: &ReservoirParams<T>,
    inputs: &InputWindow<T>,
    initial: &DVector<T>,
) -> Result<CocycleRun<T>> {
    if initial.len() != params.state_dim() {
        return Err(CoreError::InvalidArgument(format!(
            "initial state has length {}, expected {}",
            initial.len(),
            params.state_dim()
        )));
    }
    if !inputs.is_empty() && inputs.dim() != params.input_dim() {
        return Err(CoreError::InvalidArgument(format!(
            "window dimension {} does not match input_dim {}",
            inputs.dim(),
            params.input_dim()
        )));
    }
    let mut states = Vec::with_capacity(inputs.len() + 1);
    states.push(initial.clone());
    for u in inputs.vectors() {
        let next = params.step(u, states.last().unwrap())?;
        states.push(next);
    }
    Ok(CocycleRun {
        states,
        inputs_used: inputs.clone(),
        initial_state: initial.clone(),
    })
}

/// Run the cocycle and keep only the states with index strictly beyond
/// `washout_fraction * n`; the retained tail approximates pullback fibres.
pub fn washout_sample<T: RealScalar>(
    params: &ReservoirParams<T>,
    inputs: &InputWindow<T>,
    initial: &DVector<T>,
    washout_fraction: f64,
) -> Result<PointCloud<T>> {
    if !(0.0 < washout_fraction && washout_fraction < 1.0) {
        return Err(CoreError::InvalidArgument(
            "washout_fraction must lie in (0, 1)".into(),
        ));
    }
    let n = inputs.len();
    let cutoff = (washout_fraction * n as f64).floor() as usize;
    let retained = n.saturating_sub(cutoff);
    if retained < 2 {
        let min_len = (2.0 / (1.0 - washout_fraction)).ceil() as usize;
        return Err(CoreError::InvalidArgument(format!(
            "window of length {n} leaves {retained} post-washout points; need length >= {min_len}"
        )));
    }
    let run = cocycle(params, inputs, initial)?;
    let points: Vec<DVector<T>> = run.states[cutoff + 1..].to_vec();
    PointCloud::new(points, params.state_dim(), LABEL_WASHOUT)
}

/// The m-fold iteration map `F(block, x)`: the block is consumed
/// right-to-left, so `vectors[m-1]` is applied first and `vectors[0]` last.
pub fn m_fold_map<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    state: &DVector<T>,
) -> Result<DVector<T>> {
    if block.period().is_none() {
        return Err(CoreError::InvalidArgument(
            "m_fold_map needs a periodic block (period flag set)".into(),
        ));
    }
    let mut x = state.clone();
    for u in block.vectors().iter().rev() {
        x = params.step(u, &x)?;
    }
    Ok(x)
}

/// Picard iteration `z <- F(block, z)` from `z = 0`, stopped by the
/// a-posteriori contraction bound so that `tolerance` bounds the true error:
/// with `q = mu^m`, stop once the step norm is `<= tolerance (1 - q) / q`.
pub fn solve_fixed_point<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    tolerance: T,
    max_iterations: usize,
) -> Result<FixedPointResult<T>> {
    if !(tolerance > T::zero()) {
        return Err(CoreError::InvalidArgument("tolerance must be positive".into()));
    }
    let report = params.contraction_report();
    if !report.is_contraction {
        return Err(CoreError::Precondition(format!(
            "state Lipschitz constant mu = {:?} is not < 1",
            report.state_lipschitz.to_f64()
        )));
    }
    let m = block.len() as i32;
    let q = report.state_lipschitz.powi(m);
    let threshold = if q > T::zero() {
        tolerance * (T::one() - q) / q
    } else {
        T::max_value().unwrap()
    };
    let mut z = DVector::<T>::zeros(params.state_dim());
    let mut last_step = T::zero();
    for k in 0..max_iterations {
        let next = m_fold_map(params, block, &z)?;
        last_step = (&next - &z).norm();
        z = next;
        if last_step <= threshold {
            let image = m_fold_map(params, block, &z)?;
            let residual = (&image - &z).norm();
            return Ok(FixedPointResult {
                point: z,
                residual,
                iterations: k + 1,
                block: block.clone(),
            });
        }
    }
    Err(CoreError::NonConvergence {
        iterations: max_iterations,
        last_step: last_step.to_f64().unwrap_or(f64::NAN),
    })
}

/// The periodic pullback orbit generated by a fixed point: the m points
/// `z, g(u_m, z), g(u_{m-1}, g(u_m, z)), ...` (the intermediate states of
/// the m-fold composition). Applying the one remaining step returns to `z`
/// within twice the solver residual.
pub fn periodic_orbit<T: RealScalar>(
    params: &ReservoirParams<T>,
    block: &InputWindow<T>,
    fixed_point: &FixedPointResult<T>,
) -> Result<PointCloud<T>> {
    if fixed_point.block != *block {
        return Err(CoreError::InvalidArgument(
            "fixed point was solved against a different block".into(),
        ));
    }
    let m = block.len();
    let mut points = Vec::with_capacity(m);
    points.push(fixed_point.point.clone());
    let mut x = fixed_point.point.clone();
    for u in block.vectors().iter().rev().take(m.saturating_sub(1)) {
        x = params.step(u, &x)?;
        points.push(x.clone());
    }
    PointCloud::new(points, params.state_dim(), LABEL_PERIODIC_ORBIT)
}

/// Both sides of the finite-horizon input-perturbation bound: the left side
/// is `||Phi(n,u,x) - Phi(n,v,x)||`, the right side the geometric sum
/// `eta * sum_i mu^i ||u[n-i] - v[n-i]||`. The caller asserts `lhs <= rhs`.
pub fn lipschitz_bound_check<T: RealScalar>(
    params: &ReservoirParams<T>,
    u: &InputWindow<T>,
    v: &InputWindow<T>,
    initial: &DVector<T>,
) -> Result<(T, T)> {
    if u.len() != v.len() || u.dim() != v.dim() {
        return Err(CoreError::InvalidArgument(
            "windows must have equal shape".into(),
        ));
    }
    let run_u = cocycle(params, u, initial)?;
    let run_v = cocycle(params, v, initial)?;
    let lhs = (run_u.final_state() - run_v.final_state()).norm();
    let report = params.contraction_report();
    let n = u.len();
    let mut rhs = T::zero();
    for i in 0..n {
        let gap = (u.get(n - 1 - i) - v.get(n - 1 - i)).norm();
        rhs += report.state_lipschitz.powi(i as i32) * gap;
    }
    rhs *= report.input_lipschitz;
    Ok((lhs, rhs))
}
