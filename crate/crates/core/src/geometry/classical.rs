//! Classical conformally parametrized surfaces: Gauss-Codazzi residuals,
//! fundamental forms, shape operator and curvatures.
//!
//! The complex coordinates `z` and `zbar` are treated as two independent
//! complex jet variables (polarization); reality of the mean curvature is
//! the caller's responsibility. The jet slots are read as (plus = z,
//! minus = zbar).

use num_complex::Complex64;
use thiserror::Error;

use crate::jet::{Jet, JetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("jet order too low for second derivatives")]
    OrderExhausted,
    #[error("conformal factor e^u is singular at the point")]
    SingularMetric,
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// The data of a classical conformal surface at a point: jets of `u` (the
/// conformal exponent), the mean curvature `H` and the Hopf differentials
/// `Q`, `Qbar` in the independent variables (z, zbar).
#[derive(Debug, Clone)]
pub struct ClassicalData {
    pub u: Jet,
    pub h: Jet,
    pub q: Jet,
    pub qbar: Jet,
}

/// Residuals of the classical Gauss-Codazzi system:
/// Gauss `∂∂̄u + H²e^u/2 - 2QQ̄e^{-u}`, Codazzi `∂Q̄ - e^u ∂̄H / 2` and
/// `∂̄Q - e^u ∂H / 2`.
pub fn classical_gc_residuals(d: &ClassicalData) -> Result<[Jet; 3], ClassicalError> {
    if d.u.order() < 2 {
        return Err(ClassicalError::OrderExhausted);
    }
    let eu = d.u.exp();
    let emu = d.u.scale_complex(Complex64::new(-1.0, 0.0)).exp();
    let half = Complex64::new(0.5, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let du_mixed = d.u.partial_plus()?.partial_minus()?;
    let ord2 = du_mixed.order();
    let gauss = du_mixed
        .try_add(
            &d.h.try_mul(&d.h)?
                .try_mul(&eu)?
                .scale_complex(half)
                .truncated(ord2),
        )?
        .try_sub(
            &d.q.try_mul(&d.qbar)?
                .try_mul(&emu)?
                .scale_complex(two)
                .truncated(ord2),
        )?;

    let ord1 = d.u.order() - 1;
    let codazzi1 = d.qbar.partial_plus()?.try_sub(
        &eu.truncated(ord1)
            .try_mul(&d.h.partial_minus()?)?
            .scale_complex(half),
    )?;
    let codazzi2 = d.q.partial_minus()?.try_sub(
        &eu.truncated(ord1)
            .try_mul(&d.h.partial_plus()?)?
            .scale_complex(half),
    )?;

    Ok([gauss, codazzi1, codazzi2])
}

/// Shape operator, principal curvatures, mean and Gaussian curvatures at the
/// base point.
#[derive(Debug, Clone)]
pub struct ClassicalCurvatures {
    pub shape: [[Complex64; 2]; 2],
    pub k1: Complex64,
    pub k2: Complex64,
    pub mean: Complex64,
    pub gauss: Complex64,
    pub umbilic: bool,
}

/// Pointwise curvature data from the matrix
/// `B = e^{-u} [[Q+Q̄+e^u H, i(Q-Q̄)], [i(Q-Q̄), -(Q+Q̄)+e^u H]]`;
/// the umbilic flag tests `|Q Q̄| = 0` at tolerance.
pub fn classical_curvatures(
    d: &ClassicalData,
    tol: f64,
) -> Result<ClassicalCurvatures, ClassicalError> {
    let u0 = d.u.body();
    let eu = u0.exp();
    if eu.norm() < 1e-300 {
        return Err(ClassicalError::SingularMetric);
    }
    let emu = (-u0).exp();
    let h0 = d.h.body();
    let q0 = d.q.body();
    let qb0 = d.qbar.body();
    let i = Complex64::new(0.0, 1.0);
    let b11 = emu * (q0 + qb0 + eu * h0);
    let b12 = emu * i * (q0 - qb0);
    let b21 = b12;
    let b22 = emu * (-(q0 + qb0) + eu * h0);
    let mean = (b11 + b22) * Complex64::new(0.5, 0.0);
    let gauss = b11 * b22 - b12 * b21;
    let disc = (mean * mean - gauss).sqrt();
    let k1 = mean + disc;
    let k2 = mean - disc;
    let umbilic = (q0 * qb0).norm() <= tol;
    Ok(ClassicalCurvatures {
        shape: [[b11, b12], [b21, b22]],
        k1,
        k2,
        mean,
        gauss,
        umbilic,
    })
}

/// Coefficient matrices of the first and second fundamental forms in the
/// real coordinates (x, y): `I = e^u diag(1,1)`,
/// `II = [[Q+Q̄+e^u H, i(Q-Q̄)], [i(Q-Q̄), -(Q+Q̄)+e^u H]]`.
pub fn classical_fundamental_forms(
    d: &ClassicalData,
) -> ([[Complex64; 2]; 2], [[Complex64; 2]; 2]) {
    let eu = d.u.body().exp();
    let h0 = d.h.body();
    let q0 = d.q.body();
    let qb0 = d.qbar.body();
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let first = [[eu, zero], [zero, eu]];
    let second = [
        [q0 + qb0 + eu * h0, i * (q0 - qb0)],
        [i * (q0 - qb0), -(q0 + qb0) + eu * h0],
    ];
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::BasePoint;

    const TOL: f64 = 1e-10;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_data(base: BasePoint, order: usize, u: f64, h: f64, q: f64) -> ClassicalData {
        ClassicalData {
            u: Jet::constant(base, order, c(u, 0.0)),
            h: Jet::constant(base, order, c(h, 0.0)),
            q: Jet::constant(base, order, c(q, 0.0)),
            qbar: Jet::constant(base, order, c(q, 0.0)),
        }
    }

    #[test]
    fn flat_data_passes() {
        let base = BasePoint::real(0.3, -0.2);
        let d = constant_data(base, 4, 0.7, 0.0, 0.0);
        let r = classical_gc_residuals(&d).unwrap();
        for j in r {
            assert!(j.max_abs_coeff() < TOL);
        }
    }

    #[test]
    fn gauss_residual_of_constant_curvature() {
        // u = 0, H = 1, Q = 0: Gauss residual is 1/2
        let base = BasePoint::real(0.0, 0.0);
        let d = constant_data(base, 4, 0.0, 1.0, 0.0);
        let r = classical_gc_residuals(&d).unwrap();
        assert!((r[0].body() - c(0.5, 0.0)).norm() < TOL);
        assert!(r[1].max_abs_coeff() < TOL);
        assert!(r[2].max_abs_coeff() < TOL);
    }

    #[test]
    fn order_too_low_rejected() {
        let base = BasePoint::real(0.0, 0.0);
        let d = constant_data(base, 1, 0.0, 0.0, 0.0);
        assert!(matches!(
            classical_gc_residuals(&d),
            Err(ClassicalError::OrderExhausted)
        ));
    }

    #[test]
    fn curvature_spot_checks() {
        let base = BasePoint::real(0.0, 0.0);
        // H = 1, Q = 0, u = 0: sphere-like point, k1 = k2 = 1, umbilic
        let d = constant_data(base, 2, 0.0, 1.0, 0.0);
        let cur = classical_curvatures(&d, 1e-12).unwrap();
        assert!((cur.k1 - c(1.0, 0.0)).norm() < TOL);
        assert!((cur.k2 - c(1.0, 0.0)).norm() < TOL);
        assert!((cur.gauss - c(1.0, 0.0)).norm() < TOL);
        assert!(cur.umbilic);

        // Q = 1, H = 0, u = 0: shape operator diag(2, -2) by hand
        let d = constant_data(base, 2, 0.0, 0.0, 1.0);
        let cur = classical_curvatures(&d, 1e-12).unwrap();
        assert!((cur.shape[0][0] - c(2.0, 0.0)).norm() < TOL);
        assert!((cur.shape[1][1] - c(-2.0, 0.0)).norm() < TOL);
        assert!((cur.gauss - c(-4.0, 0.0)).norm() < TOL);
        assert!((cur.k1 - c(2.0, 0.0)).norm() < TOL);
        assert!((cur.k2 - c(-2.0, 0.0)).norm() < TOL);
        assert!(!cur.umbilic);
    }

    #[test]
    fn fundamental_forms_spot_checks() {
        let base = BasePoint::real(0.0, 0.0);
        // real Q: off-diagonal second-form entries vanish
        let d = constant_data(base, 2, 0.0, 0.5, 0.7);
        let (_first, second) = classical_fundamental_forms(&d);
        assert!(second[0][1].norm() < TOL);
        assert!(second[1][0].norm() < TOL);

        // u = 0, H = 0, Q = i: II = [[0, -2], [-2, 0]]
        let d = ClassicalData {
            u: Jet::constant(base, 2, c(0.0, 0.0)),
            h: Jet::constant(base, 2, c(0.0, 0.0)),
            q: Jet::constant(base, 2, c(0.0, 1.0)),
            qbar: Jet::constant(base, 2, c(0.0, -1.0)),
        };
        let (_first, second) = classical_fundamental_forms(&d);
        assert!(second[0][0].norm() < TOL);
        assert!((second[0][1] - c(-2.0, 0.0)).norm() < TOL);
        assert!((second[1][0] - c(-2.0, 0.0)).norm() < TOL);
        assert!(second[1][1].norm() < TOL);
    }
}
