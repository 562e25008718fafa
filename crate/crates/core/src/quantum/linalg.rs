use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest absolute entry of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotHermitian(f64::NAN));
    }
    let d = hermiticity_defect(m);
    if d > HERMITIAN_TOL {
        return Err(Error::NotHermitian(d));
    }
    Ok(())
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
///
/// Entries must be finite; [`check_hermitian`] enforces this for every
/// matrix that reaches an observable or density operator.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // Symmetrize so rounding asymmetry does not leak into the decomposition.
    let sym = Mat::<C64>::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = sym
        .self_adjoint_eigen(Side::Lower)
        .expect("eigendecomposition of a finite Hermitian matrix");
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values = order.iter().map(|&k| s[k].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

pub fn operator_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|v| v.abs()).sum()
}

pub fn outer(a: &[C64], b: &[C64]) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn eigen_of_pauli_y() {
        let i = C64::new(0.0, 1.0);
        let y = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&y);
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let recon = &vecs * CMatrix::from_diagonal(&DVector::from_iterator(2, vals.iter().map(|&v| C64::new(v, 0.0)))) * vecs.adjoint();
        assert!((recon - y).iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn kron_layout() {
        let a = CMatrix::from_fn(2, 2, |i, j| C64::new((2 * i + j) as f64, 0.0));
        let id = CMatrix::identity(2, 2);
        let k = kron(&a, &id);
        assert_eq!(k[(2, 0)], C64::new(2.0, 0.0));
        assert_eq!(k[(3, 1)], C64::new(2.0, 0.0));
        assert_eq!(k[(2, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(check_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn rank_two_difference_with_sparse_support() {
        // |a⟩⟨a| − |b⟩⟨b| where a and b differ on two of 24 points.
        let amp = 1.0 / 24f64.sqrt();
        let mut a = vec![C64::new(0.0, 0.0); 48];
        let mut b = a.clone();
        for x in 0..24 {
            b[2 * x] = C64::new(amp, 0.0);
            a[2 * x + usize::from((6..8).contains(&x))] = C64::new(amp, 0.0);
        }
        let d = outer(&a, &a) - outer(&b, &b);
        let vals = hermitian_eigenvalues(&d);
        assert!(vals.iter().all(|v| v.is_finite()));
        let expected = (1.0 - (22.0f64 / 24.0).powi(2)).sqrt();
        assert!((vals[47] - expected).abs() < 1e-12 && (vals[0] + expected).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let m = CMatrix::from_element(2, 2, C64::new(f64::NAN, 0.0));
        assert!(check_hermitian(&m).is_err());
    }
}
