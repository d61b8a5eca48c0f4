//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::fock::{same_basis, Basis, StateVector};
use crate::{Error, Result};

/// Stacks state vectors as the columns of a dense matrix.
pub fn columns(vs: &[StateVector]) -> Result<DMatrix<C64>> {
    let first = vs.first().ok_or_else(|| Error::InvalidParameter("no vectors".into()))?;
    let n = first.dim();
    let mut m = DMatrix::zeros(n, vs.len());
    for (k, v) in vs.iter().enumerate() {
        if !same_basis(v.basis(), first.basis()) {
            return Err(Error::DimensionMismatch("vectors on different bases".into()));
        }
        m.set_column(k, &DVector::from_column_slice(v.amplitudes()));
    }
    Ok(m)
}

/// Splits the columns of `m` into state vectors over `basis`.
pub fn to_states(basis: &Basis, m: &DMatrix<C64>) -> Result<Vec<StateVector>> {
    (0..m.ncols())
        .map(|k| StateVector::new(Arc::clone(basis), m.column(k).iter().copied().collect()))
        .collect()
}

/// Orthonormal basis of the numerical nullspace of `m`: right-singular
/// vectors whose singular value is at most `tol`.
pub fn nullspace(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let n = m.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    // Pad so the SVD returns a full set of right-singular vectors.
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right-singular vectors");
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] <= tol).collect();
    let mut out = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for r in 0..n {
            out[(r, c)] = v_t[(k, r)].conj();
        }
    }
    out
}

/// Canonical orthonormal basis for the column span of the isometry `q`:
/// Gram–Schmidt over the projector columns `P e_j` in index order, then the
/// first significant amplitude of each vector is made real-positive.
pub fn canonicalize(q: &DMatrix<C64>) -> DMatrix<C64> {
    let (n, r) = (q.nrows(), q.ncols());
    let mut accepted: Vec<DVector<C64>> = Vec::with_capacity(r);
    for j in 0..n {
        if accepted.len() == r {
            break;
        }
        let coeff = q.row(j).transpose().map(|x| x.conj());
        if coeff.norm() < 1e-9 {
            continue;
        }
        let mut v: DVector<C64> = q * coeff;
        for _ in 0..2 {
            for a in &accepted {
                let ov = a.dotc(&v);
                v -= a * ov;
            }
        }
        let nv = v.norm();
        if nv > 1e-6 {
            v /= C64::new(nv, 0.0);
            if let Some(first) = v.iter().find(|x| x.norm() > 1e-9).copied() {
                let ph = first / first.norm();
                v /= ph;
            }
            accepted.push(v);
        }
    }
    let mut out = DMatrix::zeros(n, accepted.len());
    for (k, v) in accepted.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

/// Frobenius distance between the orthogonal projectors onto the column
/// spans of two isometries, `√(‖(I−P_B)A‖² + ‖(I−P_A)B‖²)`.
///
/// Computed from the residuals rather than `dA + dB − 2‖A†B‖²`, which loses
/// half the significant digits to cancellation.
pub fn projector_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.nrows() != b.nrows() {
        return f64::INFINITY;
    }
    let ra = a - b * (b.adjoint() * a);
    let rb = b - a * (a.adjoint() * b);
    (ra.norm_squared() + rb.norm_squared()).sqrt()
}

/// `exp(i·t·H)` for Hermitian `H`, via eigendecomposition.
pub fn expm_i_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, t * l)));
    v * phases * v.adjoint()
}

/// Hermitian eigendecomposition `(eigenvalues, eigenvectors)`.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(h.clone());
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Largest entry-wise magnitude of `a − b`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest entry-wise magnitude of `A†A − I`.
pub fn unitarity_defect(a: &DMatrix<C64>) -> f64 {
    let g = a.adjoint() * a;
    max_abs_diff(&g, &DMatrix::identity(a.ncols(), a.ncols()))
}

/// Whether `a = e^{iθ} b` within `tol` (max-entry norm), with θ.
///
/// The phase is read off the largest-magnitude entry of `b`.
pub fn equal_up_to_global_phase(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) -> (bool, f64, f64) {
    if a.shape() != b.shape() {
        return (false, 0.0, f64::INFINITY);
    }
    let (k, bk) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .map(|(k, v)| (k, *v))
        .unwrap_or((0, C64::new(0.0, 0.0)));
    if bk.norm() == 0.0 {
        let dev = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
        return (dev <= tol, 0.0, dev);
    }
    let ratio = a.as_slice()[k] / bk;
    let theta = ratio.arg();
    let ph = C64::from_polar(1.0, theta);
    let dev = a.iter().zip(b.iter()).map(|(x, y)| (x - ph * y).norm()).fold(0.0, f64::max);
    (dev <= tol, theta, dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let m = DMatrix::from_row_slice(2, 3, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let ns = nullspace(&m, 1e-9);
        assert_eq!(ns.ncols(), 1);
        let r = &m * &ns;
        assert!(r.iter().all(|x| x.norm() < 1e-12));
        let can = canonicalize(&ns);
        assert!((can[(0, 0)] - c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((can[(1, 0)] + c(std::f64::consts::FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn expm_matches_taylor_series() {
        let h = DMatrix::from_row_slice(
            3,
            3,
            &[c(1.0, 0.0), c(0.3, 0.2), c(0.0, 0.0), c(0.3, -0.2), c(-2.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)],
        );
        let t = 0.7;
        let u = expm_i_hermitian(&h, t);
        let x = &h * c(0.0, t);
        let mut term = DMatrix::<C64>::identity(3, 3);
        let mut sum = term.clone();
        for k in 1..60 {
            term = &term * &x / c(k as f64, 0.0);
            sum += &term;
        }
        assert!(max_abs_diff(&u, &sum) < 1e-12);
        assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn global_phase_detection() {
        let u = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let (ok, th, _) = equal_up_to_global_phase(&u, &u, 1e-12);
        assert!(ok && th.abs() < 1e-15);
        let neg = &u * c(-1.0, 0.0);
        let (ok, th, _) = equal_up_to_global_phase(&neg, &u, 1e-12);
        assert!(ok && (th.abs() - std::f64::consts::PI).abs() < 1e-12);
        let mut other = u.clone();
        other[(1, 1)] = c(0.5, 0.0);
        assert!(!equal_up_to_global_phase(&other, &u, 1e-12).0);
    }

    #[test]
    fn projector_distance_ignores_basis_rotation() {
        let a = DMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = DMatrix::from_row_slice(3, 2, &[c(s, 0.0), c(0.0, s), c(s, 0.0), c(0.0, -s), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(projector_distance(&a, &b) < 1e-12);
        let e = DMatrix::from_row_slice(3, 1, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((projector_distance(&a.columns(0, 1).into_owned(), &e) - 2f64.sqrt()).abs() < 1e-12);
    }
}
