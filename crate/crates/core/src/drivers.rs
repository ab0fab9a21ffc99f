//! Input sequences that drive the reservoir: RK4-integrated Lorenz/Rössler
//! trajectories, coordinate observations, random periodic blocks, and the
//! weighted metric on finite input windows.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::linalg::qr_positive;
use crate::{cvt, RealScalar};

/// Which chaotic flow generates the driving signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeKind {
    Lorenz,
    Rossler,
}

/// A three-dimensional autonomous flow with its parameter triple:
/// `(sigma, rho, beta)` for Lorenz, `(a, b, c)` for Rössler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSystem<T: RealScalar> {
    kind: OdeKind,
    params: [T; 3],
}

impl<T: RealScalar> OdeSystem<T> {
    pub fn lorenz(sigma: T, rho: T, beta: T) -> Self {
        Self {
            kind: OdeKind::Lorenz,
            params: [sigma, rho, beta],
        }
    }

    pub fn rossler(a: T, b: T, c: T) -> Self {
        Self {
            kind: OdeKind::Rossler,
            params: [a, b, c],
        }
    }

    /// Lorenz with the classical `(10, 28, 8/3)` parameters.
    pub fn lorenz_classic() -> Self {
        Self::lorenz(cvt(10.0), cvt(28.0), cvt(8.0 / 3.0))
    }

    /// Rössler with the classical `(0.2, 0.2, 5.7)` parameters.
    pub fn rossler_classic() -> Self {
        Self::rossler(cvt(0.2), cvt(0.2), cvt(5.7))
    }

    pub fn kind(&self) -> OdeKind {
        self.kind
    }

    pub fn params(&self) -> [T; 3] {
        self.params
    }

    /// Right-hand side of the flow.
    pub fn vector_field(&self, u: &Vector3<T>) -> Vector3<T> {
        let [p0, p1, p2] = self.params;
        match self.kind {
            OdeKind::Lorenz => Vector3::new(
                p0 * (u[1] - u[0]),
                u[0] * (p1 - u[2]) - u[1],
                u[0] * u[1] - p2 * u[2],
            ),
            OdeKind::Rossler => {
                Vector3::new(-u[1] - u[2], u[0] + p0 * u[1], p1 + u[2] * (u[0] - p2))
            }
        }
    }

    /// Analytic Jacobian of the vector field at `u`.
    pub fn jacobian(&self, u: &Vector3<T>) -> Matrix3<T> {
        let [p0, p1, p2] = self.params;
        let zero = T::zero();
        let one = T::one();
        match self.kind {
            OdeKind::Lorenz => Matrix3::new(
                -p0,
                p0,
                zero,
                p1 - u[2],
                -one,
                -u[0],
                u[1],
                u[0],
                -p2,
            ),
            OdeKind::Rossler => Matrix3::new(
                zero,
                -one,
                -one,
                one,
                p0,
                zero,
                u[2],
                zero,
                u[0] - p2,
            ),
        }
    }
}

/// Uniformly spaced samples of a flow, with the transient already removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T: RealScalar> {
    pub points: Vec<Vector3<T>>,
    pub dt: T,
    pub t_start: T,
}

/// A finite block of input vectors. `period` is set when the block is one
/// period of an m-periodic sequence, in which case its length equals m.
#[derive(Debug, Clone, PartialEq)]
pub struct InputWindow<T: RealScalar> {
    vectors: Vec<DVector<T>>,
    dim: usize,
    period: Option<usize>,
}

impl<T: RealScalar> InputWindow<T> {
    /// A plain (non-periodic) window. The vectors must share one dimension.
    pub fn new(vectors: Vec<DVector<T>>) -> Result<Self> {
        let dim = match vectors.first() {
            Some(v) => v.len(),
            None => {
                return Err(CoreError::InvalidArgument(
                    "window needs at least one vector; use `empty` for a zero-length window".into(),
                ))
            }
        };
        Self::with_dim(vectors, dim)
    }

    /// A zero-length window of known input dimension, valid as a cocycle
    /// input (the run then consists of the initial state alone).
    pub fn empty(dim: usize) -> Self {
        Self {
            vectors: Vec::new(),
            dim,
            period: None,
        }
    }

    fn with_dim(vectors: Vec<DVector<T>>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(CoreError::InvalidArgument(
                "input dimension must be >= 1".into(),
            ));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(CoreError::InvalidArgument(
                "window vectors must share a common dimension".into(),
            ));
        }
        Ok(Self {
            vectors,
            dim,
            period: None,
        })
    }

    /// Mark this window as one period of an m-periodic sequence (m = length).
    pub fn into_periodic(mut self) -> Result<Self> {
        if self.vectors.is_empty() {
            return Err(CoreError::InvalidArgument(
                "a periodic block must be nonempty".into(),
            ));
        }
        self.period = Some(self.vectors.len());
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn vectors(&self) -> &[DVector<T>] {
        &self.vectors
    }

    /// Element access, 0-based: `get(k)` is the input consumed at step k+1.
    pub fn get(&self, index: usize) -> &DVector<T> {
        &self.vectors[index]
    }

    /// The first `n` vectors as a plain window.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            vectors: self.vectors[..n.min(self.len())].to_vec(),
            dim: self.dim,
            period: None,
        }
    }

    /// Vectors `from..` as a plain window (the shifted remainder).
    pub fn tail(&self, from: usize) -> Self {
        Self {
            vectors: self.vectors[from.min(self.len())..].to_vec(),
            dim: self.dim,
            period: None,
        }
    }

    /// CSV with a `dim=..,period=..` header and one row per time index.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let period = match self.period {
            Some(m) => m.to_string(),
            None => "none".into(),
        };
        writeln!(out, "dim={},period={}", self.dim, period)?;
        for v in &self.vectors {
            let row: Vec<String> = v
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
            .ok_or_else(|| CoreError::Parse("empty window file".into()))??;
        let (dim_part, period_part) = header
            .split_once(',')
            .ok_or_else(|| CoreError::Parse(format!("bad window header `{header}`")))?;
        let dim: usize = dim_part
            .strip_prefix("dim=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| CoreError::Parse(format!("bad dim field `{dim_part}`")))?;
        let period_str = period_part
            .strip_prefix("period=")
            .ok_or_else(|| CoreError::Parse(format!("bad period field `{period_part}`")))?;
        let mut vectors = Vec::new();
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
            vectors.push(DVector::from_vec(vals?));
        }
        let window = Self::with_dim(vectors, dim)?;
        match period_str {
            "none" => Ok(window),
            m => {
                let m: usize = m
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad period `{m}`")))?;
                if m != window.len() {
                    return Err(CoreError::Parse(format!(
                        "period {} does not match window length {}",
                        m,
                        window.len()
                    )));
                }
                window.into_periodic()
            }
        }
    }
}

const BLOWUP_LIMIT: f64 = 1e6;

/// Classical fixed-step RK4 from t = 0 to `t_end`; samples with
/// `k dt <= t_transient` are dropped, so the Lorenz setup dt = 0.01,
/// t_end = 50, t_transient = 10 retains exactly 4000 points.
pub fn rk4_integrate<T: RealScalar>(
    system: &OdeSystem<T>,
    initial: Vector3<T>,
    dt: T,
    t_end: T,
    t_transient: T,
) -> Result<Trajectory<T>> {
    if !(dt > T::zero()) {
        return Err(CoreError::InvalidArgument("dt must be positive".into()));
    }
    if !(t_transient < t_end) {
        return Err(CoreError::InvalidArgument(
            "t_transient must be smaller than t_end".into(),
        ));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidArgument(
            "initial condition must be finite".into(),
        ));
    }
    let dt_f = dt.to_f64().unwrap();
    let n_steps = (t_end.to_f64().unwrap() / dt_f).round() as usize;
    let k_min = {
        let trans = t_transient.to_f64().unwrap();
        if trans <= 0.0 {
            1
        } else {
            (trans / dt_f + 1e-9).floor() as usize + 1
        }
    };
    if k_min > n_steps {
        return Err(CoreError::InvalidArgument(
            "transient discards the whole trajectory".into(),
        ));
    }
    let mut x = initial;
    let mut points = Vec::with_capacity(n_steps - k_min + 1);
    let limit = cvt::<T>(BLOWUP_LIMIT);
    for k in 1..=n_steps {
        x = rk4_step(system, &x, dt);
        if x.iter().any(|v| v.abs() > limit || !v.is_finite()) {
            return Err(CoreError::NumericalBlowup {
                step: k,
                detail: format!("component magnitude exceeded {BLOWUP_LIMIT:e}"),
            });
        }
        if k >= k_min {
            points.push(x);
        }
    }
    Ok(Trajectory {
        points,
        dt,
        t_start: cvt::<T>(k_min as f64) * dt,
    })
}

fn rk4_step<T: RealScalar>(system: &OdeSystem<T>, x: &Vector3<T>, dt: T) -> Vector3<T> {
    let half = cvt::<T>(0.5);
    let sixth = T::one() / cvt::<T>(6.0);
    let two = cvt::<T>(2.0);
    let k1 = system.vector_field(x);
    let k2 = system.vector_field(&(x + k1 * (dt * half)));
    let k3 = system.vector_field(&(x + k2 * (dt * half)));
    let k4 = system.vector_field(&(x + k3 * dt));
    x + (k1 + k2 * two + k3 * two + k4) * (dt * sixth)
}

/// Project every trajectory point onto the chosen coordinates and scale.
pub fn observe<T: RealScalar>(
    trajectory: &Trajectory<T>,
    coordinates: &[usize],
    scale: T,
) -> Result<InputWindow<T>> {
    if coordinates.is_empty() {
        return Err(CoreError::InvalidArgument(
            "at least one coordinate index is required".into(),
        ));
    }
    if let Some(&bad) = coordinates.iter().find(|&&c| c >= 3) {
        return Err(CoreError::InvalidArgument(format!(
            "coordinate index {bad} out of range for dimension 3"
        )));
    }
    let vectors: Vec<DVector<T>> = trajectory
        .points
        .iter()
        .map(|p| DVector::from_iterator(coordinates.len(), coordinates.iter().map(|&c| p[c] * scale)))
        .collect();
    InputWindow::with_dim(vectors, coordinates.len())
}

/// One period of a random m-periodic input sequence: m vectors with i.i.d.
/// uniform [0, 1] entries from a seeded ChaCha8 stream.
pub fn random_periodic_block<T: RealScalar>(
    seed: u64,
    period: usize,
    input_dim: usize,
) -> Result<InputWindow<T>> {
    if period == 0 || input_dim == 0 {
        return Err(CoreError::InvalidArgument(
            "period and input_dim must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors: Vec<DVector<T>> = (0..period)
        .map(|_| DVector::from_fn(input_dim, |_, _| cvt::<T>(rng.gen::<f64>())))
        .collect();
    InputWindow::with_dim(vectors, input_dim)?.into_periodic()
}

/// Finite-window truncation of the weighted sequence metric
/// `d^w(u, v) = sup_n w_|n| ||u[n] - v[n]||` with weights `w_n = C^-n`
/// centred at a caller-chosen index.
pub fn weighted_distance<T: RealScalar>(
    a: &InputWindow<T>,
    b: &InputWindow<T>,
    decay: T,
    center: usize,
) -> Result<T> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(CoreError::InvalidArgument(format!(
            "window shapes differ: {}x{} vs {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    if !(decay > T::one()) {
        return Err(CoreError::InvalidArgument(
            "decay constant must exceed 1".into(),
        ));
    }
    if center >= a.len() {
        return Err(CoreError::InvalidArgument(format!(
            "center {} out of range for window length {}",
            center,
            a.len()
        )));
    }
    let mut best = T::zero();
    for i in 0..a.len() {
        let offset = center.abs_diff(i) as i32;
        let weight = decay.powi(-offset);
        let gap = (a.get(i) - b.get(i)).norm();
        let weighted = weight * gap;
        if weighted > best {
            best = weighted;
        }
    }
    Ok(best)
}

/// Lyapunov exponents (per unit time, natural log) of the flow itself,
/// estimated by QR re-orthonormalisation of the RK4 variational dynamics.
/// The full exponent spectrum is returned in descending order.
pub fn ode_lyapunov_exponents<T: RealScalar>(
    system: &OdeSystem<T>,
    initial: Vector3<T>,
    dt: T,
    t_end: T,
    t_transient: T,
    renorm_every: usize,
) -> Result<Vec<T>> {
    if renorm_every == 0 {
        return Err(CoreError::InvalidArgument(
            "renorm_every must be >= 1".into(),
        ));
    }
    if !(dt > T::zero()) || !(t_transient < t_end) {
        return Err(CoreError::InvalidArgument(
            "need dt > 0 and t_transient < t_end".into(),
        ));
    }
    let dt_f = dt.to_f64().unwrap();
    let n_steps = (t_end.to_f64().unwrap() / dt_f).round() as usize;
    let n_transient = ((t_transient.to_f64().unwrap() / dt_f).round() as usize).min(n_steps);

    let mut x = initial;
    for _ in 0..n_transient {
        x = rk4_step(system, &x, dt);
    }
    let mut frame = DMatrix::<T>::identity(3, 3);
    let mut sums = [T::zero(); 3];
    let mut since_renorm = 0usize;
    let accumulated = n_steps - n_transient;
    for _ in 0..accumulated {
        let (next, tangent) = rk4_variational_step(system, &x, dt);
        let tangent = DMatrix::from_iterator(3, 3, tangent.iter().copied());
        frame = tangent * frame;
        x = next;
        since_renorm += 1;
        if since_renorm == renorm_every {
            let (q, r) = qr_positive(&frame);
            for (j, sum) in sums.iter_mut().enumerate() {
                *sum += r[(j, j)].ln();
            }
            frame = q;
            since_renorm = 0;
        }
    }
    if since_renorm > 0 {
        let (_, r) = qr_positive(&frame);
        for (j, sum) in sums.iter_mut().enumerate() {
            *sum += r[(j, j)].ln();
        }
    }
    let span = cvt::<T>(accumulated as f64) * dt;
    let mut exps: Vec<T> = sums.iter().map(|&s| s / span).collect();
    exps.sort_by(|a, b| b.partial_cmp(a).expect("finite exponents"));
    Ok(exps)
}

/// RK4 step together with the exact tangent map of that step, obtained by
/// running the variational equation through the same stages.
fn rk4_variational_step<T: RealScalar>(
    system: &OdeSystem<T>,
    x: &Vector3<T>,
    dt: T,
) -> (Vector3<T>, Matrix3<T>) {
    let half = cvt::<T>(0.5);
    let sixth = T::one() / cvt::<T>(6.0);
    let two = cvt::<T>(2.0);
    let eye = Matrix3::<T>::identity();

    let k1 = system.vector_field(x);
    let m1 = system.jacobian(x);
    let x2 = x + k1 * (dt * half);
    let k2 = system.vector_field(&x2);
    let m2 = system.jacobian(&x2) * (eye + m1 * (dt * half));
    let x3 = x + k2 * (dt * half);
    let k3 = system.vector_field(&x3);
    let m3 = system.jacobian(&x3) * (eye + m2 * (dt * half));
    let x4 = x + k3 * dt;
    let k4 = system.vector_field(&x4);
    let m4 = system.jacobian(&x4) * (eye + m3 * dt);

    let next = x + (k1 + k2 * two + k3 * two + k4) * (dt * sixth);
    let tangent = eye + (m1 + m2 * two + m3 * two + m4) * (dt * sixth);
    (next, tangent)
}

impl<T: RealScalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with a `dt=..,t_start=..` header and one `x,y,z` row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "dt={:.16e},t_start={:.16e}",
            self.dt.to_f64().unwrap_or(f64::NAN),
            self.t_start.to_f64().unwrap_or(f64::NAN)
        )?;
        for p in &self.points {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e}",
                p[0].to_f64().unwrap_or(f64::NAN),
                p[1].to_f64().unwrap_or(f64::NAN),
                p[2].to_f64().unwrap_or(f64::NAN)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lorenz_setup_retains_4000_points() {
        let sys = OdeSystem::<f64>::lorenz_classic();
        let traj = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 50.0, 10.0).unwrap();
        assert_eq!(traj.len(), 4000);
        assert_relative_eq!(traj.t_start, 10.01, epsilon = 1e-12);
    }

    #[test]
    fn equilibrium_stays_put() {
        let sys = OdeSystem::<f64>::lorenz_classic();
        let traj = rk4_integrate(&sys, Vector3::zeros(), 0.01, 2.0, 0.5).unwrap();
        for p in &traj.points {
            assert!(p.norm() < 1e-12);
        }
    }

    #[test]
    fn blowup_is_reported_with_step_index() {
        // Unphysical parameters blow the Lorenz flow up quickly.
        let sys = OdeSystem::lorenz(1e3, 1e3, -1e3);
        let err = rk4_integrate(&sys, Vector3::new(10.0, 10.0, 10.0), 0.05, 10.0, 0.0);
        match err {
            Err(CoreError::NumericalBlowup { step, .. }) => assert!(step >= 1),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn observe_scales_and_projects() {
        let sys = OdeSystem::<f64>::lorenz_classic();
        let traj = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 2.0, 1.0).unwrap();
        let win = observe(&traj, &[0, 2], 0.01).unwrap();
        assert_eq!(win.dim(), 2);
        assert_eq!(win.len(), traj.len());
        for (v, p) in win.vectors().iter().zip(&traj.points) {
            assert_relative_eq!(v[0], 0.01 * p[0], epsilon = 1e-15);
            assert_relative_eq!(v[1], 0.01 * p[2], epsilon = 1e-15);
        }
        assert!(observe(&traj, &[], 1.0).is_err());
        assert!(observe(&traj, &[3], 1.0).is_err());
    }

    #[test]
    fn observe_with_zero_scale_is_zero() {
        let sys = OdeSystem::<f64>::rossler_classic();
        let traj = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 2.0, 0.0).unwrap();
        let win = observe(&traj, &[0], 0.0).unwrap();
        assert!(win.vectors().iter().all(|v| v[0] == 0.0));
    }

    #[test]
    fn periodic_block_is_deterministic_and_in_unit_cube() {
        let a = random_periodic_block::<f64>(3, 30, 2).unwrap();
        let b = random_periodic_block::<f64>(3, 30, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 30);
        assert_eq!(a.period(), Some(30));
        for v in a.vectors() {
            assert!(v.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        let single = random_periodic_block::<f64>(9, 1, 1).unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn weighted_distance_basics() {
        let a = random_periodic_block::<f64>(1, 5, 2).unwrap();
        assert_eq!(weighted_distance(&a, &a, 2.0, 2).unwrap(), 0.0);

        // Differ only at the center: the weight there is C^0 = 1.
        let mut vecs = a.vectors().to_vec();
        vecs[2] = &vecs[2] + DVector::from_vec(vec![0.3, -0.4]);
        let b = InputWindow::new(vecs).unwrap();
        assert_relative_eq!(weighted_distance(&a, &b, 2.0, 2).unwrap(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn weighted_distance_matches_enumeration() {
        let a = random_periodic_block::<f64>(10, 5, 3).unwrap();
        let b = random_periodic_block::<f64>(11, 5, 3).unwrap();
        let c = 2.0f64;
        let center = 2usize;
        let brute = (0..5)
            .map(|i| c.powi(-((i as i32 - center as i32).abs())) * (a.get(i) - b.get(i)).norm())
            .fold(0.0f64, f64::max);
        assert_relative_eq!(
            weighted_distance(&a, &b, c, center).unwrap(),
            brute,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Endpoint error against a dt/8 reference should shrink ~16x when dt
        // halves, on a short smooth non-chaotic window.
        let sys = OdeSystem::<f64>::rossler_classic();
        let x0 = Vector3::new(1.0, 1.0, 1.0);
        let endpoint = |dt: f64| {
            rk4_integrate(&sys, x0, dt, 1.0, 0.0)
                .unwrap()
                .points
                .last()
                .cloned()
                .unwrap()
        };
        let reference = endpoint(0.01 / 8.0);
        let err_h = (endpoint(0.01) - reference).norm();
        let err_h2 = (endpoint(0.005) - reference).norm();
        let ratio = err_h / err_h2;
        assert!(
            (8.0..=32.0).contains(&ratio),
            "order-4 ratio expected near 16, got {ratio}"
        );
    }

    #[test]
    fn rossler_reference_integration_agrees() {
        // dt = 0.01 vs dt = 0.001 reference over t in [10, 50]; the third
        // component stays bounded and |u1| < 15 as a sanity corridor.
        let sys = OdeSystem::<f64>::rossler_classic();
        let coarse = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 50.0, 10.0).unwrap();
        let fine = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.001, 50.0, 10.0).unwrap();
        let mut sup_gap = 0.0f64;
        for (k, p) in coarse.points.iter().enumerate() {
            let q = fine.points[(k + 1) * 10 - 1];
            sup_gap = sup_gap.max((p - q).norm());
        }
        assert!(sup_gap < 1e-2, "sup-norm gap {sup_gap}");
        let max_u1 = coarse
            .points
            .iter()
            .map(|p| p[0].abs())
            .fold(0.0, f64::max);
        assert!(max_u1 < 15.0);
        assert!(coarse.points.iter().all(|p| p[2] > -1e-6 && p[2] < 1e3));
    }

    #[test]
    fn observe_commutes_with_truncation() {
        let sys = OdeSystem::<f64>::lorenz_classic();
        let traj = rk4_integrate(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 3.0, 0.0).unwrap();
        let full = observe(&traj, &[0, 1], 0.01).unwrap();
        let trunc_then = full.truncated(100);
        let mut short = traj.clone();
        short.points.truncate(100);
        let then_trunc = observe(&short, &[0, 1], 0.01).unwrap();
        assert_eq!(trunc_then.vectors(), then_trunc.vectors());
    }

    #[test]
    fn lorenz_lyapunov_spectrum_is_classical() {
        let sys = OdeSystem::<f64>::lorenz_classic();
        let exps =
            ode_lyapunov_exponents(&sys, Vector3::new(1.0, 1.0, 1.0), 0.01, 200.0, 20.0, 5)
                .unwrap();
        // Classical values approximately (0.906, 0, -14.57).
        assert!((exps[0] - 0.906).abs() < 0.1, "lambda1 = {}", exps[0]);
        assert!(exps[1].abs() < 0.05, "lambda2 = {}", exps[1]);
        assert!((exps[2] + 14.57).abs() < 0.5, "lambda3 = {}", exps[2]);
    }

    #[test]
    fn window_csv_round_trip() {
        let w = random_periodic_block::<f64>(5, 7, 3).unwrap();
        let mut buf = Vec::new();
        w.write_csv(&mut buf).unwrap();
        let back = InputWindow::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(w, back);
    }
}
