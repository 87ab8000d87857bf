//! Pointwise curvature of a metric given in coordinates.
//!
//! Index conventions: `R_ijkl = ⟨R(∂_i, ∂_j) ∂_l, ∂_k⟩` with
//! `R(X, Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_[X,Y]`, so the curvature operator on
//! bivectors is `ρ(e_i ∧ e_j, e_k ∧ e_l) = R_ijkl` and `R_ijij` is the
//! sectional curvature of the plane `e_i ∧ e_j` (positive on round spheres).
//! Ricci is `Ric_ik = Σ_j R_ijkj` in an orthonormal frame.
//!
//! Operator-level quantities in [`CurvaturePackage`] are stored in the
//! g-orthonormal frame obtained from the Cholesky factor of `g`. Derivatives
//! are carried by [`Jet3`] arithmetic and are exact up to roundoff.

use crate::error::{Error, Result};
use crate::field::{metric_jets, MetricField, MetricJets};
use crate::jet::Jet3;
use crate::scalar::{Field, Real};
use crate::tensor::{Matrix, Tensor};

pub type Tensor3<T> = Tensor<T, 3>;
pub type Tensor4<T> = Tensor<T, 4>;

/// Christoffel symbols `Γ^k_ij` as jets exact through second order.
#[derive(Debug, Clone)]
pub struct Christoffel<T> {
    n: usize,
    inverse_metric: Vec<Jet3<T>>,
    gamma: Vec<Jet3<T>>,
}

impl<T: Real> Christoffel<T> {
    fn at(&self, k: usize, i: usize, j: usize) -> &Jet3<T> {
        &self.gamma[(k * self.n + i) * self.n + j]
    }

    /// `Γ^k_ij` indexed `[k, i, j]`.
    pub fn values(&self) -> Tensor3<T> {
        Tensor3::from_fn(self.n, |[k, i, j]| self.at(k, i, j).value())
    }

    /// `∂_a Γ^k_ij` indexed `[a, k, i, j]`.
    pub fn first_derivatives(&self) -> Tensor4<T> {
        Tensor4::from_fn(self.n, |[a, k, i, j]| self.at(k, i, j).grad(a))
    }

    /// `∂_a ∂_b Γ^k_ij` indexed `[a, b, k, i, j]`.
    pub fn second_derivative(&self, a: usize, b: usize, k: usize, i: usize, j: usize) -> T {
        self.at(k, i, j).hess(a, b)
    }

    pub fn inverse_metric(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, |[i, j]| self.inverse_metric[i * self.n + j].value())
    }
}

fn invert_jets<T: Real>(g: &MetricJets<T>) -> Result<Vec<Jet3<T>>> {
    let n = g.dimension();
    let mut a: Vec<Vec<Jet3<T>>> = (0..n)
        .map(|i| (0..n).map(|j| g.jet(i, j).clone()).collect())
        .collect();
    let mut inv: Vec<Vec<Jet3<T>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Jet3::constant(n, if i == j { T::one() } else { T::zero() }))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // Gauss-Jordan; positive definiteness makes every pivot positive.
    for c in 0..n {
        if !(a[c][c].value() > T::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        let piv = a[c][c].recip();
        for j in 0..n {
            a[c][j] = &a[c][j] * &piv;
            inv[c][j] = &inv[c][j] * &piv;
        }
        for r in 0..n {
            if r == c {
                continue;
            }
            let f = a[r][c].clone();
            for j in 0..n {
                a[r][j] = &a[r][j] - &(&f * &a[c][j]);
                inv[r][j] = &inv[r][j] - &(&f * &inv[c][j]);
            }
        }
    }
    Ok(inv.into_iter().flatten().collect())
}

/// `Γ^k_ij = ½ g^{kl}(∂_i g_jl + ∂_j g_il − ∂_l g_ij)` with two exact derivatives.
pub fn christoffel<T: Real>(mj: &MetricJets<T>) -> Result<Christoffel<T>> {
    let n = mj.dimension();
    let inverse_metric = invert_jets(mj)?;
    // dg[(l * n + i) * n + j] = ∂_l g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(mj.jet(i, j).partial(l));
            }
        }
    }
    let d = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];
    let half = T::lit(0.5);
    let mut gamma = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut acc: Option<Jet3<T>> = None;
                for l in 0..n {
                    let lowered = &(d(i, j, l) + d(j, i, l)) - d(l, i, j);
                    let term = &inverse_metric[k * n + l] * &lowered;
                    acc = Some(match acc {
                        None => term,
                        Some(s) => &s + &term,
                    });
                }
                gamma.push(acc.expect("n >= 1").scale(half));
            }
        }
    }
    Ok(Christoffel {
        n,
        inverse_metric,
        gamma,
    })
}

fn sum_jets<T: Real>(terms: impl Iterator<Item = Jet3<T>>) -> Jet3<T> {
    terms
        .reduce(|a, b| &a + &b)
        .expect("at least one term")
}

/// Coordinate `R_ijkl` as jets exact through first order.
fn riemann_jets<T: Real>(chr: &Christoffel<T>, mj: &MetricJets<T>) -> Vec<Jet3<T>> {
    let n = chr.n;
    let dgamma: Vec<Vec<Jet3<T>>> = (0..n)
        .map(|a| chr.gamma.iter().map(|g| g.partial(a)).collect())
        .collect();
    let dg = |a: usize, k: usize, i: usize, j: usize| &dgamma[a][(k * n + i) * n + j];
    // up[((l * n + i) * n + j) * n + k] = R^l_ijk, the ∂_l component of R(∂_i, ∂_j)∂_k
    let mut up = Vec::with_capacity(n.pow(4));
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lin = dg(i, l, j, k) - dg(j, l, i, k);
                    let quad = sum_jets((0..n).map(|a| {
                        &(chr.at(l, i, a) * chr.at(a, j, k)) - &(chr.at(l, j, a) * chr.at(a, i, k))
                    }));
                    up.push(&lin + &quad);
                }
            }
        }
    }
    let r_up = |l: usize, i: usize, j: usize, k: usize| &up[((l * n + i) * n + j) * n + k];
    let mut down = Vec::with_capacity(n.pow(4));
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    down.push(sum_jets((0..n).map(|m| mj.jet(k, m) * r_up(m, i, j, l))));
                }
            }
        }
    }
    down
}

/// Coordinate components `R_ijkl` of the (0,4) curvature tensor.
pub fn riemann<T: Real>(chr: &Christoffel<T>, mj: &MetricJets<T>) -> Tensor4<T> {
    let jets = riemann_jets(chr, mj);
    let n = chr.n;
    Tensor4::from_fn(n, |[i, j, k, l]| jets[((i * n + j) * n + k) * n + l].value())
}

/// Ricci tensor and scalar curvature from `R` in an orthonormal frame.
pub fn ricci_scalar<T: Field>(r: &Tensor4<T>) -> (Matrix<T>, T) {
    let n = r.dim();
    let ric = Matrix::from_fn(n, |[a, c]| {
        (0..n).fold(T::zero(), |acc, b| acc + r[[a, b, c, b]])
    });
    let s = ric.trace();
    (ric, s)
}

/// `S = (Ric − s g / (2(n−1))) / (n−2)`, requires `n ≥ 3`.
pub fn schouten<T: Field>(ric: &Matrix<T>, s: T, g: &Matrix<T>) -> Matrix<T> {
    let n = ric.dim();
    assert!(n >= 3, "Schouten tensor needs dimension at least 3");
    let two_nm1 = T::from_usize_exact(2 * (n - 1));
    let nm2 = T::from_usize_exact(n - 2);
    ric.zip_with(g, |r, gij| (r - s * gij / two_nm1) / nm2)
}

/// Kulkarni–Nomizu product
/// `(α⊙β)_ijkl = α_ik β_jl + α_jl β_ik − α_il β_jk − α_jk β_il`.
pub fn kulkarni_nomizu<T: Field>(alpha: &Matrix<T>, beta: &Matrix<T>) -> Tensor4<T> {
    Tensor4::from_fn(alpha.dim(), |[i, j, k, l]| {
        alpha[[i, k]] * beta[[j, l]] + alpha[[j, l]] * beta[[i, k]]
            - alpha[[i, l]] * beta[[j, k]]
            - alpha[[j, k]] * beta[[i, l]]
    })
}

/// `W = R − S ⊙ g`.
pub fn weyl_tensor<T: Field>(r: &Tensor4<T>, s: &Matrix<T>, g: &Matrix<T>) -> Tensor4<T> {
    let sg = kulkarni_nomizu(s, g);
    r.zip_with(&sg, |a, b| a - b)
}

/// Covariant derivative `(∇_a S)_bc = ∂_a S_bc − Γ^d_ab S_dc − Γ^d_ac S_bd`,
/// indexed `[a, b, c]`; `ds` is `∂_a S_bc` and `gamma` is `Γ^d_ab` as `[d, a, b]`.
pub fn covariant_derivative<T: Field>(s: &Matrix<T>, ds: &Tensor3<T>, gamma: &Tensor3<T>) -> Tensor3<T> {
    let n = s.dim();
    Tensor3::from_fn(n, |[a, b, c]| {
        (0..n).fold(ds[[a, b, c]], |acc, d| {
            acc - gamma[[d, a, b]] * s[[d, c]] - gamma[[d, a, c]] * s[[b, d]]
        })
    })
}

/// `C_ijk = (∇_i S)_jk − (∇_j S)_ik`.
pub fn cotton<T: Field>(s: &Matrix<T>, ds: &Tensor3<T>, gamma: &Tensor3<T>) -> Tensor3<T> {
    cotton_from_nabla(&covariant_derivative(s, ds, gamma))
}

fn cotton_from_nabla<T: Field>(nabla: &Tensor3<T>) -> Tensor3<T> {
    Tensor3::from_fn(nabla.dim(), |[i, j, k]| nabla[[i, j, k]] - nabla[[j, i, k]])
}

/// Permutation symbol on three indices.
pub fn levi_civita<T: Field>(i: usize, j: usize, k: usize) -> T {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => T::one(),
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -T::one(),
        _ => T::zero(),
    }
}

/// `CY_ij = ½ C_kli g_jm ε^{klm} / √det g`, times `orientation = ±1`.
pub fn cotton_york<T: Real>(c: &Tensor3<T>, g: &Matrix<T>, orientation: i8) -> Result<Matrix<T>> {
    if c.dim() != 3 || g.dim() != 3 {
        return Err(Error::InvalidArgument(
            "the Cotton-York tensor is defined in dimension 3 only".into(),
        ));
    }
    let scale = T::lit(0.5 * f64::from(orientation.signum())) / g.determinant().sqrt();
    let mut out = Matrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = T::zero();
            for k in 0..3 {
                for l in 0..3 {
                    for m in 0..3 {
                        let eps: T = levi_civita(k, l, m);
                        if eps != T::zero() {
                            acc = acc + c[[k, l, i]] * g[[j, m]] * eps;
                        }
                    }
                }
            }
            out[[i, j]] = acc * scale;
        }
    }
    Ok(out)
}

/// Largest violation of `R_ijkl + R_jkil + R_kijl = 0`.
pub fn bianchi_defect<T: Real>(r: &Tensor4<T>) -> T {
    let n = r.dim();
    crate::tensor::indices::<4>(n).fold(T::zero(), |m, [i, j, k, l]| {
        m.max((r[[i, j, k, l]] + r[[j, k, i, l]] + r[[k, i, j, l]]).abs())
    })
}

/// Every pointwise curvature quantity at one chart point.
#[derive(Debug, Clone)]
pub struct CurvaturePackage<T> {
    pub point: Vec<T>,
    /// `+1` for the coordinate orientation, `−1` for the opposite one.
    pub orientation: i8,
    /// Coordinate metric `g_ij`.
    pub metric: Matrix<T>,
    /// Columns are the orthonormal frame vectors in coordinate components.
    pub frame: Matrix<T>,
    /// `coframe[[i, a]]` is the `a`-th frame component of `∂_i`.
    pub coframe: Matrix<T>,
    /// Coordinate Christoffel symbols `Γ^k_ij` as `[k, i, j]`.
    pub christoffel: Tensor3<T>,
    /// Coordinate derivatives `∂_a Γ^k_ij` as `[a, k, i, j]`.
    pub christoffel_derivatives: Tensor4<T>,
    pub riemann: Tensor4<T>,
    pub ricci: Matrix<T>,
    pub scalar: T,
    pub schouten: Matrix<T>,
    /// `(∇_a S)_bc` as `[a, b, c]`.
    pub schouten_derivative: Tensor3<T>,
    pub cotton: Tensor3<T>,
    /// Present only in dimension 3.
    pub cotton_york: Option<Matrix<T>>,
    pub weyl: Tensor4<T>,
}

impl<T: Real> CurvaturePackage<T> {
    /// Runs the full pipeline on `metric` at `point`.
    pub fn compute<M: MetricField + ?Sized>(metric: &M, point: &[T], orientation: i8) -> Result<Self> {
        let mj = metric_jets(metric, point)?;
        Self::from_jets(&mj, orientation)
    }

    pub fn from_jets(mj: &MetricJets<T>, orientation: i8) -> Result<Self> {
        let n = mj.dimension();
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidArgument("orientation must be +1 or -1".into()));
        }
        let g = mj.metric();
        let chol = g.cholesky()?;
        let frame = chol.lower_inverse().transpose();
        let coframe = chol.clone();

        let chr = christoffel(mj)?;
        let gamma = chr.values();
        let r_jets = riemann_jets(&chr, mj);
        let rj = |i: usize, j: usize, k: usize, l: usize| &r_jets[((i * n + j) * n + k) * n + l];

        // Schouten in coordinates, as jets, for its first derivatives.
        let ginv = &chr.inverse_metric;
        let ric_jets: Vec<Jet3<T>> = (0..n * n)
            .map(|ac| {
                let (a, c) = (ac / n, ac % n);
                sum_jets(
                    (0..n * n).map(|bd| &ginv[bd] * rj(a, bd / n, c, bd % n)),
                )
            })
            .collect();
        let s_jet = sum_jets((0..n * n).map(|ac| &ginv[ac] * &ric_jets[ac]));
        let c1 = T::lit(1.0 / (2.0 * (n as f64 - 1.0)));
        let c2 = T::lit(1.0 / (n as f64 - 2.0));
        let schouten_jets: Vec<Jet3<T>> = (0..n * n)
            .map(|ac| {
                let (a, c) = (ac / n, ac % n);
                (&ric_jets[ac] - &(&s_jet * mj.jet(a, c)).scale(c1)).scale(c2)
            })
            .collect();
        let s_coord = Matrix::from_fn(n, |[a, c]| schouten_jets[a * n + c].value());
        let ds = Tensor3::from_fn(n, |[a, b, c]| schouten_jets[b * n + c].grad(a));
        let nabla_coord = covariant_derivative(&s_coord, &ds, &gamma);
        let cotton_coord = cotton_from_nabla(&nabla_coord);

        let r_coord = Tensor4::from_fn(n, |[i, j, k, l]| rj(i, j, k, l).value());
        let riemann = r_coord.change_frame(&frame);
        let (ricci, scalar) = ricci_scalar(&riemann);
        let identity = Matrix::identity(n);
        let schouten_frame = schouten(&ricci, scalar, &identity);
        let weyl = weyl_tensor(&riemann, &schouten_frame, &identity);
        let cotton_york = if n == 3 {
            Some(cotton_york(&cotton_coord, &g, orientation)?.change_frame(&frame))
        } else {
            None
        };

        Ok(CurvaturePackage {
            point: mj.point().to_vec(),
            orientation,
            metric: g,
            christoffel: gamma,
            christoffel_derivatives: chr.first_derivatives(),
            riemann,
            ricci,
            scalar,
            schouten: schouten_frame,
            schouten_derivative: nabla_coord.change_frame(&frame),
            cotton: cotton_coord.change_frame(&frame),
            cotton_york,
            weyl,
            frame,
            coframe,
        })
    }

    pub fn dimension(&self) -> usize {
        self.metric.dim()
    }

    /// Pulls a frame tensor back to coordinate components.
    pub fn to_coordinates<const R: usize>(&self, t: &Tensor<T, R>) -> Tensor<T, R> {
        t.change_frame(&self.coframe.transpose())
    }

    /// The same package expressed in the frame `e'_a = Σ_i e_i Q_ia`, with
    /// `Q` orthogonal. An orientation-reversing `Q` flips the sign of `CY`.
    pub fn rotate_frame(&self, q: &Matrix<T>) -> Self {
        let sign = if q.determinant() < T::zero() { -T::one() } else { T::one() };
        CurvaturePackage {
            frame: self.frame.matmul(q),
            coframe: self.coframe.matmul(q),
            riemann: self.riemann.change_frame(q),
            ricci: self.ricci.change_frame(q),
            schouten: self.schouten.change_frame(q),
            schouten_derivative: self.schouten_derivative.change_frame(q),
            cotton: self.cotton.change_frame(q),
            cotton_york: self
                .cotton_york
                .as_ref()
                .map(|cy| cy.change_frame(q).scale(sign)),
            weyl: self.weyl.change_frame(q),
            ..self.clone()
        }
    }
}
