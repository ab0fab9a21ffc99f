//! Small shared linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::RealScalar;

/// Singular values of `m`, sorted in descending order.
///
/// nalgebra does not guarantee an ordering, so we sort explicitly.
pub fn singular_values_desc<T: RealScalar>(m: &DMatrix<T>) -> Vec<T> {
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<T> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    sv
}

/// Largest singular value (operator 2-norm). Zero for an all-zero matrix.
pub fn spectral_norm<T: RealScalar>(m: &DMatrix<T>) -> T {
    singular_values_desc(m)
        .first()
        .copied()
        .unwrap_or_else(T::zero)
}

/// QR factorization with the sign convention `diag(R) >= 0`.
///
/// Columns of `Q` and rows of `R` are flipped together, so `Q * R` is
/// unchanged. The non-negative diagonal makes `ln(R[j][j])` well defined for
/// Lyapunov bookkeeping.
pub fn qr_positive<T: RealScalar>(m: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    let k = r.nrows().min(r.ncols());
    for j in 0..k {
        if r[(j, j)] < T::zero() {
            for i in 0..r.ncols() {
                r[(j, i)] = -r[(j, i)];
            }
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    (q, r)
}
