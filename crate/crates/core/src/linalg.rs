//! Small dense helpers shared by the solvers.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Complex, Matrix4, SMatrix, SVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix4 = Matrix4<C64>;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Maps quadratures `(x_a, p_a, x_P, p_P)` to modes `(a, a†, P, P†)` with
/// `a = (x + i p)/sqrt(2)`.
pub fn mode_from_quadrature() -> CMatrix4 {
    let s = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    let is = I * FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let t = CMatrix4::new(
        s,  is, z, z,
        s, -is, z, z,
        z, z, s,  is,
        z, z, s, -is,
    );
    t
}

/// Inverse of [`mode_from_quadrature`]: `x = (a + a†)/sqrt(2)`,
/// `p = -i (a - a†)/sqrt(2)`.
pub fn quadrature_from_mode() -> CMatrix4 {
    let s = c(FRAC_1_SQRT_2);
    let z = c(0.0);
    let is = I * FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let t = CMatrix4::new(
        s,   s,  z,  z,
        -is, is, z,  z,
        z,   z,  s,  s,
        z,   z, -is, is,
    );
    t
}

/// Re-expresses a linear generator on `(a, a†, P, P†)` in the quadrature
/// basis. The result is real for any generator obeying the
/// conjugation-swap symmetry; the imaginary residue is returned alongside.
pub fn to_quadrature_basis(generator: &CMatrix4) -> (Matrix4<f64>, f64) {
    let q = quadrature_from_mode() * generator * mode_from_quadrature();
    let residue = q.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (q.map(|z| z.re), residue)
}

/// Symplectic form for the ordering `(x_a, p_a, x_P, p_P)`.
pub fn symplectic_form() -> Matrix4<f64> {
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 1.0, 0.0, 0.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        0.0, 0.0, -1.0, 0.0,
    );
    omega
}

/// Solves `f X + X fᵀ + q = 0` through the Kronecker-vectorised system.
/// Returns `None` when the operator `I⊗f + f⊗I` is singular.
pub fn solve_lyapunov(f: &Matrix4<f64>, q: &Matrix4<f64>) -> Option<Matrix4<f64>> {
    let id = Matrix4::<f64>::identity();
    let op: SMatrix<f64, 16, 16> = id.kronecker(f) + f.kronecker(&id);
    let rhs: SVector<f64, 16> = SVector::from_iterator(q.iter().map(|v| -v));
    let vec = op.lu().solve(&rhs)?;
    let x = Matrix4::from_iterator(vec.iter().copied());
    Some((x + x.transpose()) * 0.5)
}

pub fn lyapunov_residual(f: &Matrix4<f64>, x: &Matrix4<f64>, q: &Matrix4<f64>) -> f64 {
    (f * x + x * f.transpose() + q).norm()
}

/// Smallest eigenvalue of the Hermitian matrix `sigma + (i/2) Omega`.
/// Non-negative iff `sigma` is a physical covariance matrix.
pub fn uncertainty_min_eigenvalue(sigma: &Matrix4<f64>) -> f64 {
    let h = sigma.map(c) + symplectic_form().map(|v| I * (0.5 * v));
    SymmetricEigen::new(h).eigenvalues.min()
}

/// Symplectic eigenvalues (each listed once, ascending). Vacuum gives 1/2.
pub fn symplectic_eigenvalues(sigma: &Matrix4<f64>) -> [f64; 2] {
    // Ωσ has spectrum ±iν.
    let mut nu: Vec<f64> = (symplectic_form() * sigma)
        .complex_eigenvalues()
        .iter()
        .map(|z| z.im.abs())
        .collect();
    nu.sort_by(f64::total_cmp);
    [0.5 * (nu[0] + nu[1]), 0.5 * (nu[2] + nu[3])]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_change_round_trips() {
        let id = quadrature_from_mode() * mode_from_quadrature();
        assert!((id - CMatrix4::identity()).norm() < 1e-15);
    }

    #[test]
    fn lyapunov_decoupled_oscillator() {
        // Damped oscillator at frequency 0.3 with decay 0.1/2 driven by vacuum noise.
        #[rustfmt::skip]
        let f = Matrix4::new(
            -0.05, 0.3, 0.0, 0.0,
            -0.3, -0.05, 0.0, 0.0,
            0.0, 0.0, -0.2, 0.0,
            0.0, 0.0, 0.0, -0.2,
        );
        let q = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.05, 0.05, 0.2, 0.2));
        let x = solve_lyapunov(&f, &q).unwrap();
        assert!((x - Matrix4::identity() * 0.5).norm() < 1e-14);
        assert!(lyapunov_residual(&f, &x, &q) < 1e-14);
    }

    #[test]
    fn vacuum_is_minimum_uncertainty() {
        let vac = Matrix4::identity() * 0.5;
        assert!(uncertainty_min_eigenvalue(&vac).abs() < 1e-14);
        let [a, b] = symplectic_eigenvalues(&vac);
        assert!((a - 0.5).abs() < 1e-14 && (b - 0.5).abs() < 1e-14);
        // Too little noise in both quadratures is unphysical.
        let sub = Matrix4::identity() * 0.3;
        assert!(uncertainty_min_eigenvalue(&sub) < 0.0);
    }

    #[test]
    fn squeezed_state_symplectic_values() {
        let r: f64 = 0.7;
        let mut s = Matrix4::identity() * 0.5;
        s[(0, 0)] = 0.5 * (-2.0 * r).exp();
        s[(1, 1)] = 0.5 * (2.0 * r).exp();
        s[(2, 2)] = 1.5;
        s[(3, 3)] = 1.5;
        let [a, b] = symplectic_eigenvalues(&s);
        assert!((a - 0.5).abs() < 1e-12, "{a}");
        assert!((b - 1.5).abs() < 1e-12, "{b}");
    }
}
