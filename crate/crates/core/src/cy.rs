//! The dimension-3 obstruction: singularity of the Cotton-York tensor.
//!
//! A limiting Carleman weight near `p` forces `det CY_p = 0`. Singular
//! traceless symmetric 3×3 matrices are exactly `Q·diag(λ, −λ, 0)·Qᵀ`; away
//! from zero they form a hypersurface in the 5-dimensional space of
//! traceless symmetric matrices.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// `‖CY‖` below this is classified as zero.
pub const CY_FLOOR: f64 = 1e-12;
/// Default relative tolerance for `|det CY| < tol · ‖CY‖³`.
pub const TOL_DET: f64 = 1e-9;

/// A traceless symmetric 3×3 matrix in an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CottonYorkTensor(Matrix<f64>);

impl CottonYorkTensor {
    pub fn new(m: Matrix<f64>) -> Result<Self> {
        if m.dim() != 3 {
            return Err(Error::InvalidArgument("Cotton-York tensor must be 3 × 3".into()));
        }
        let norm = m.norm();
        let slack = 1e-10 * norm + 1e-15;
        if m.distance(&m.transpose()) > slack {
            return Err(Error::InvalidArgument("Cotton-York tensor must be symmetric".into()));
        }
        if m.trace().abs() > slack {
            return Err(Error::InvalidArgument(format!(
                "Cotton-York tensor must be traceless, trace {:e}",
                m.trace()
            )));
        }
        Ok(CottonYorkTensor(m))
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self> {
        Self::new(Matrix::from_fn(3, |[i, j]| rows[i][j]))
    }

    pub fn diagonal(d: [f64; 3]) -> Result<Self> {
        Self::new(Matrix::from_fn(3, |[i, j]| if i == j { d[i] } else { 0.0 }))
    }

    /// From the upper triangle `a11, a12, a13, a22, a23, a33`.
    pub fn from_upper(u: [f64; 6]) -> Result<Self> {
        Self::from_rows([[u[0], u[1], u[2]], [u[1], u[3], u[4]], [u[2], u[4], u[5]]])
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Eigenvalues in ascending order, by the trigonometric closed form.
    pub fn eigenvalues(&self) -> [f64; 3] {
        symmetric_eigenvalues(&self.0)
    }

    /// Coordinates in the orthonormal basis of traceless symmetric matrices
    /// `(e11−e22)/√2, (e11+e22−2e33)/√6, (e12+e21)/√2, (e13+e31)/√2,
    /// (e23+e32)/√2`.
    pub fn coordinates(&self) -> [f64; 5] {
        let m = &self.0;
        let s2 = std::f64::consts::SQRT_2;
        [
            (m[[0, 0]] - m[[1, 1]]) / s2,
            (m[[0, 0]] + m[[1, 1]] - 2.0 * m[[2, 2]]) / 6f64.sqrt(),
            s2 * m[[0, 1]],
            s2 * m[[0, 2]],
            s2 * m[[1, 2]],
        ]
    }

    pub fn from_coordinates(c: [f64; 5]) -> Self {
        let s2 = std::f64::consts::SQRT_2;
        let s6 = 6f64.sqrt();
        let d = [c[0] / s2 + c[1] / s6, -c[0] / s2 + c[1] / s6, -2.0 * c[1] / s6];
        let (x, y, z) = (c[2] / s2, c[3] / s2, c[4] / s2);
        CottonYorkTensor(Matrix::from_fn(3, |[i, j]| match (i.min(j), i.max(j)) {
            (0, 1) => x,
            (0, 2) => y,
            (1, 2) => z,
            _ => d[i],
        }))
    }

    /// `CY` of the opposite orientation.
    pub fn reversed(&self) -> Self {
        CottonYorkTensor(self.0.scale(-1.0))
    }
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending.
pub fn symmetric_eigenvalues(a: &Matrix<f64>) -> [f64; 3] {
    let p1 = a[[0, 1]].powi(2) + a[[0, 2]].powi(2) + a[[1, 2]].powi(2);
    let q = a.trace() / 3.0;
    let mut ev = if p1 == 0.0 {
        [a[[0, 0]], a[[1, 1]], a[[2, 2]]]
    } else {
        let p2 = (a[[0, 0]] - q).powi(2) + (a[[1, 1]] - q).powi(2) + (a[[2, 2]] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = Matrix::from_fn(3, |[i, j]| (a[[i, j]] - if i == j { q } else { 0.0 }) / p);
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let hi = q + 2.0 * p * phi.cos();
        let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        [lo, 3.0 * q - hi - lo, hi]
    };
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum CyClass {
    Zero,
    /// Eigenvalues `λ, −λ, 0` with `λ > 0`.
    RegularSingular { lambda: f64 },
    Nonsingular,
}

impl CyClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CyClass::Zero => "zero",
            CyClass::RegularSingular { .. } => "regular_singular",
            CyClass::Nonsingular => "nonsingular",
        }
    }
}

pub fn classify_cy(cy: &CottonYorkTensor, tol: f64) -> CyClass {
    let norm = cy.norm();
    if norm < CY_FLOOR {
        return CyClass::Zero;
    }
    if cy.determinant().abs() < tol * norm.powi(3) {
        let ev = cy.eigenvalues();
        CyClass::RegularSingular {
            lambda: 0.5 * (ev[2] - ev[0]),
        }
    } else {
        CyClass::Nonsingular
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict3 {
    NoLcwCertified,
    Inconclusive,
}

/// A nonsingular `CY` rules out a limiting Carleman weight; a singular one
/// decides nothing.
pub fn obstruction_verdict_3d(cy: &CottonYorkTensor, tol: f64) -> Verdict3 {
    match classify_cy(cy, tol) {
        CyClass::Nonsingular => Verdict3::NoLcwCertified,
        _ => Verdict3::Inconclusive,
    }
}

fn check_rotation(q: &Matrix<f64>) -> Result<()> {
    if q.dim() != 3
        || q.transpose().matmul(q).distance(&Matrix::identity(3)) > 1e-10
        || (q.determinant() - 1.0).abs() > 1e-10
    {
        return Err(Error::InvalidArgument("Q must be a rotation".into()));
    }
    Ok(())
}

/// `Q·diag(λ, −λ, 0)·Qᵀ`.
pub fn stratum_param(lambda: f64, q: &Matrix<f64>) -> Result<CottonYorkTensor> {
    check_rotation(q)?;
    let d = [lambda, -lambda, 0.0];
    let m = Matrix::from_fn(3, |[i, j]| (0..3).map(|k| q[[i, k]] * d[k] * q[[j, k]]).sum());
    Ok(CottonYorkTensor(m))
}

/// Rotation `exp(ω̂)` by Rodrigues' formula.
pub fn rotation_exp(w: [f64; 3]) -> Matrix<f64> {
    let theta = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let k = Matrix::from_fn(3, |[i, j]| match (i, j) {
        (0, 1) => -w[2],
        (0, 2) => w[1],
        (1, 0) => w[2],
        (1, 2) => -w[0],
        (2, 0) => -w[1],
        (2, 1) => w[0],
        _ => 0.0,
    });
    let k2 = k.matmul(&k);
    let (a, b) = if theta < 1e-8 {
        (1.0 - theta * theta / 6.0, 0.5 - theta * theta / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Matrix::from_fn(3, |[i, j]| {
        (if i == j { 1.0 } else { 0.0 }) + a * k[[i, j]] + b * k2[[i, j]]
    })
}

/// Central-difference Jacobian of `(λ, ω) ↦ stratum_param(λ, Q·exp(ω̂))` at
/// `ω = 0`, as a 5 × 4 matrix in traceless coordinates.
pub fn stratum_jacobian(lambda: f64, q: &Matrix<f64>) -> Result<DMatrix<f64>> {
    check_rotation(q)?;
    let h = 1e-6;
    let eval = |x: [f64; 4]| -> Result<[f64; 5]> {
        let r = q.matmul(&rotation_exp([x[1], x[2], x[3]]));
        Ok(stratum_param(x[0], &r)?.coordinates())
    };
    let mut jac = DMatrix::zeros(5, 4);
    for k in 0..4 {
        let mut xp = [lambda, 0.0, 0.0, 0.0];
        let mut xm = xp;
        xp[k] += h;
        xm[k] -= h;
        let (fp, fm) = (eval(xp)?, eval(xm)?);
        for r in 0..5 {
            jac[(r, k)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Numerical rank of [`stratum_jacobian`] with relative threshold `1e-6`.
pub fn stratum_jacobian_rank(lambda: f64, q: &Matrix<f64>) -> Result<usize> {
    let s = stratum_jacobian(lambda, q)?.singular_values();
    let smax = s.max();
    Ok(s.iter().filter(|&&x| x > 1e-6 * smax).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_examples() {
        let a = CottonYorkTensor::diagonal([1.0, -1.0, 0.0]).unwrap();
        assert_eq!(classify_cy(&a, TOL_DET), CyClass::RegularSingular { lambda: 1.0 });
        assert_eq!(obstruction_verdict_3d(&a, TOL_DET), Verdict3::Inconclusive);
        let b = CottonYorkTensor::diagonal([2.0, -1.0, -1.0]).unwrap();
        assert_eq!(b.determinant(), 2.0);
        assert_eq!(classify_cy(&b, TOL_DET), CyClass::Nonsingular);
        assert_eq!(obstruction_verdict_3d(&b, TOL_DET), Verdict3::NoLcwCertified);
        assert_eq!(
            classify_cy(&CottonYorkTensor::diagonal([0.0; 3]).unwrap(), TOL_DET),
            CyClass::Zero
        );
        assert!(CottonYorkTensor::diagonal([1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn eigenvalues_closed_form() {
        let a = CottonYorkTensor::from_upper([1.0, 2.0, 0.5, -3.0, 0.25, 2.0]).unwrap();
        let ev = a.eigenvalues();
        assert!((ev.iter().product::<f64>() - a.determinant()).abs() < 1e-12);
        assert!(ev.iter().sum::<f64>().abs() < 1e-12);
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        assert!((sq - a.norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn coordinates_are_isometric() {
        let a = CottonYorkTensor::from_upper([1.0, 2.0, 0.5, -3.0, 0.25, 2.0]).unwrap();
        let c = a.coordinates();
        let n: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - a.norm()).abs() < 1e-14);
        assert!(CottonYorkTensor::from_coordinates(c).matrix().distance(a.matrix()) < 1e-14);
    }

    #[test]
    fn stratum_basics() {
        let id = Matrix::identity(3);
        let a = stratum_param(1.0, &id).unwrap();
        assert_eq!(a, CottonYorkTensor::diagonal([1.0, -1.0, 0.0]).unwrap());
        assert_eq!(stratum_param(0.0, &rotation_exp([0.3, 0.1, -2.0])).unwrap().norm(), 0.0);
        assert!(stratum_param(1.0, &id.scale(2.0)).is_err());
        assert_eq!(stratum_jacobian_rank(0.7, &rotation_exp([0.3, 0.1, -2.0])).unwrap(), 4);
    }
}
