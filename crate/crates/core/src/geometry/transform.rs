use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};

/// Symmetric square root `A = Rᵀ diag(√λ) R` of an SPD matrix, so `A Aᵀ = K`.
pub fn anisotropic_transform(k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !k.is_square() || k.nrows() == 0 {
        return invalid("K must be a non-empty square matrix");
    }
    let scale = k.abs().max().max(f64::MIN_POSITIVE);
    if (k - k.transpose()).abs().max() > 1e-12 * scale {
        return invalid("K is not symmetric");
    }
    let eig = SymmetricEigen::new(k.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return invalid("K is not positive definite");
    }
    let sqrt_l = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let q = &eig.eigenvectors;
    Ok(q * sqrt_l * q.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 9.0]));
        let a = anisotropic_transform(&k).unwrap();
        assert!((a[(0, 0)] - 2.0).abs() < 1e-14 && (a[(1, 1)] - 3.0).abs() < 1e-14);
        assert!(a[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn identity_and_rejections() {
        let a = anisotropic_transform(&DMatrix::identity(3, 3)).unwrap();
        assert!((a - DMatrix::<f64>::identity(3, 3)).abs().max() < 1e-15);
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(anisotropic_transform(&neg).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!(anisotropic_transform(&asym).is_err());
    }
}
