//! The reservoir map `g(u, x) = (1 - alpha) x + alpha tanh(W x + W_in u)`
//! for leaky tanh echo state networks: seeded weight generation, the single
//! driven step, and Lipschitz/contraction constants.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::linalg::spectral_norm;
use crate::{cvt, RealScalar};

/// Fixed random weights of an echo state network, immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirParams<T: RealScalar> {
    recurrent: DMatrix<T>,
    input: DMatrix<T>,
    leak_rate: T,
}

/// Lipschitz constants of the reservoir map: `mu` in the state argument,
/// `eta` in the input argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport<T: RealScalar> {
    pub state_lipschitz: T,
    pub input_lipschitz: T,
    pub is_contraction: bool,
}

impl<T: RealScalar> ReservoirParams<T> {
    /// Build parameters from explicit matrices, validating every invariant.
    pub fn new(recurrent: DMatrix<T>, input: DMatrix<T>, leak_rate: T) -> Result<Self> {
        if recurrent.nrows() == 0 || recurrent.nrows() != recurrent.ncols() {
            return Err(CoreError::InvalidArgument(format!(
                "recurrent matrix must be square and nonempty, got {}x{}",
                recurrent.nrows(),
                recurrent.ncols()
            )));
        }
        if input.nrows() != recurrent.nrows() || input.ncols() == 0 {
            return Err(CoreError::InvalidArgument(format!(
                "input matrix must be {}xN_in with N_in >= 1, got {}x{}",
                recurrent.nrows(),
                input.nrows(),
                input.ncols()
            )));
        }
        if !(leak_rate > T::zero() && leak_rate <= T::one()) {
            return Err(CoreError::InvalidArgument(
                "leak_rate must lie in (0, 1]".into(),
            ));
        }
        if recurrent.iter().any(|v| !v.is_finite()) || input.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "weight matrices must have finite entries".into(),
            ));
        }
        Ok(Self {
            recurrent,
            input,
            leak_rate,
        })
    }

    /// Draw both weight matrices i.i.d. uniform on `[-1, 1]` from a seeded
    /// ChaCha8 stream (row-major fill, recurrent matrix first), then rescale
    /// the recurrent matrix so its largest singular value equals
    /// `target_norm`. Identical seeds give bit-identical parameters.
    pub fn generate(
        seed: u64,
        state_dim: usize,
        input_dim: usize,
        target_norm: T,
        leak_rate: T,
    ) -> Result<Self> {
        if state_dim == 0 || input_dim == 0 {
            return Err(CoreError::InvalidArgument(
                "state_dim and input_dim must be >= 1".into(),
            ));
        }
        if !(target_norm > T::zero()) {
            return Err(CoreError::InvalidArgument(
                "target_norm must be positive".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize, m: usize| -> DMatrix<T> {
            let mut out = DMatrix::zeros(n, m);
            for i in 0..n {
                for j in 0..m {
                    out[(i, j)] = cvt::<T>(2.0 * rng.gen::<f64>() - 1.0);
                }
            }
            out
        };
        let mut recurrent = draw(state_dim, state_dim);
        let input = draw(state_dim, input_dim);
        let norm = spectral_norm(&recurrent);
        if norm == T::zero() {
            return Err(CoreError::InvalidArgument(
                "drawn recurrent matrix is zero and cannot be rescaled".into(),
            ));
        }
        recurrent *= target_norm / norm;
        Self::new(recurrent, input, leak_rate)
    }

    pub fn state_dim(&self) -> usize {
        self.recurrent.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.input.ncols()
    }

    /// The recurrent weight matrix `W`.
    pub fn recurrent(&self) -> &DMatrix<T> {
        &self.recurrent
    }

    /// The input coupling matrix `W_in`.
    pub fn input_matrix(&self) -> &DMatrix<T> {
        &self.input
    }

    pub fn leak_rate(&self) -> T {
        self.leak_rate
    }

    /// One driven update `(1 - alpha) x + alpha tanh(W x + W_in u)`.
    pub fn step(&self, input: &DVector<T>, state: &DVector<T>) -> Result<DVector<T>> {
        if input.len() != self.input_dim() {
            return Err(CoreError::InvalidArgument(format!(
                "input has length {}, expected {}",
                input.len(),
                self.input_dim()
            )));
        }
        if state.len() != self.state_dim() {
            return Err(CoreError::InvalidArgument(format!(
                "state has length {}, expected {}",
                state.len(),
                self.state_dim()
            )));
        }
        let mut pre = &self.recurrent * state;
        pre.gemv(T::one(), &self.input, input, T::one());
        let alpha = self.leak_rate;
        let one_minus = T::one() - alpha;
        Ok(DVector::from_fn(self.state_dim(), |i, _| {
            one_minus * state[i] + alpha * pre[i].tanh()
        }))
    }

    /// Lipschitz bounds of the step map: `mu = (1 - alpha) + alpha ||W||_2`
    /// in the state and `eta = alpha ||W_in||_2` in the input. Both bound the
    /// true constants since `sech^2 <= 1`.
    pub fn contraction_report(&self) -> ContractionReport<T> {
        let alpha = self.leak_rate;
        let mu = (T::one() - alpha) + alpha * spectral_norm(&self.recurrent);
        let eta = alpha * spectral_norm(&self.input);
        ContractionReport {
            state_lipschitz: mu,
            input_lipschitz: eta,
            is_contraction: mu < T::one(),
        }
    }

    /// Serialize as text: one header line, then `W` and `W_in` rows.
    pub fn write_matrices<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "state_dim={},input_dim={},leak_rate={:.16e}",
            self.state_dim(),
            self.input_dim(),
            self.leak_rate.to_f64().unwrap_or(f64::NAN)
        )?;
        let mut dump = |m: &DMatrix<T>| -> Result<()> {
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols())
                    .map(|j| format!("{:.16e}", m[(i, j)].to_f64().unwrap_or(f64::NAN)))
                    .collect();
                writeln!(out, "{}", row.join(","))?;
            }
            Ok(())
        };
        dump(&self.recurrent)?;
        dump(&self.input)
    }

    /// Inverse of [`write_matrices`](Self::write_matrices).
    pub fn read_matrices<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| CoreError::Parse("empty matrix file".into()))??;
        let mut state_dim = None;
        let mut input_dim = None;
        let mut leak = None;
        for field in header.split(',') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| CoreError::Parse(format!("bad header field `{field}`")))?;
            match key {
                "state_dim" => state_dim = Some(parse_usize(value)?),
                "input_dim" => input_dim = Some(parse_usize(value)?),
                "leak_rate" => leak = Some(parse_f64(value)?),
                other => return Err(CoreError::Parse(format!("unknown header key `{other}`"))),
            }
        }
        let (n_r, n_in, alpha) = match (state_dim, input_dim, leak) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(CoreError::Parse("incomplete matrix header".into())),
        };
        let mut rows = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<T>> = line
                .split(',')
                .map(|v| parse_f64(v).map(cvt::<T>))
                .collect();
            rows.push(row?);
        }
        if rows.len() != 2 * n_r {
            return Err(CoreError::Parse(format!(
                "expected {} matrix rows, found {}",
                2 * n_r,
                rows.len()
            )));
        }
        let build = |chunk: &[Vec<T>], cols: usize| -> Result<DMatrix<T>> {
            if chunk.iter().any(|r| r.len() != cols) {
                return Err(CoreError::Parse("ragged matrix row".into()));
            }
            Ok(DMatrix::from_fn(chunk.len(), cols, |i, j| chunk[i][j]))
        };
        let recurrent = build(&rows[..n_r], n_r)?;
        let input = build(&rows[n_r..], n_in)?;
        Self::new(recurrent, input, cvt(alpha))
    }
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| CoreError::Parse(format!("bad integer `{s}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| CoreError::Parse(format!("bad float `{s}`")))
}
