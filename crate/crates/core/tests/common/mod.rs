//! Shared fixtures: random metric documents and a finite-difference
//! curvature oracle that never touches the jet arithmetic.
#![allow(dead_code)]

use lcw_core::dsl::{parse_metric, MetricSpec};
use lcw_core::tensor::Matrix;
use lcw_core::{Tensor3, Tensor4};
use rand::Rng;

pub fn coords(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("x{k}")).collect()
}

/// Builds a metric document from upper-triangular entry strings.
pub fn metric_from_upper(names: &[String], upper: &[Vec<String>], half_width: f64) -> MetricSpec {
    let n = names.len();
    let g: Vec<String> = upper
        .iter()
        .map(|row| format!("[{}]", row.iter().map(|e| format!("\"{e}\"")).collect::<Vec<_>>().join(",")))
        .collect();
    let domain: Vec<String> = names
        .iter()
        .map(|c| format!("\"{c}\":[{},{}]", -half_width, half_width))
        .collect();
    let doc = format!(
        r#"{{"dimension":{n},"coordinates":[{}],"g":[{}],"domain":{{{}}}}}"#,
        names.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(","),
        g.join(","),
        domain.join(",")
    );
    parse_metric(&doc).unwrap_or_else(|e| panic!("{e}\n{doc}"))
}

fn coeff<R: Rng>(rng: &mut R, scale: f64) -> String {
    format!("{:e}", rng.random_range(-scale..scale))
}

/// `c · x_a x_b …` with 1–3 random factors drawn from `vars`.
fn monomial<R: Rng>(rng: &mut R, vars: &[String], scale: f64) -> String {
    let deg = rng.random_range(1..=3);
    let mut s = format!("({})", coeff(rng, scale));
    for _ in 0..deg {
        s.push('*');
        s.push_str(&vars[rng.random_range(0..vars.len())]);
    }
    s
}

/// Random polynomial (degree ≤ 3) in `vars`, plus `base`.
pub fn random_polynomial<R: Rng>(rng: &mut R, vars: &[String], base: &str, terms: usize, scale: f64) -> String {
    let mut s = base.to_string();
    for _ in 0..terms {
        s.push('+');
        s.push_str(&monomial(rng, vars, scale));
    }
    s
}

/// Dense random polynomial metric on `[-½, ½]ⁿ`, positive definite there.
pub fn random_polynomial_metric<R: Rng>(rng: &mut R, n: usize) -> MetricSpec {
    let names = coords(n);
    let upper: Vec<Vec<String>> = (0..n)
        .map(|i| {
            (i..n)
                .map(|j| {
                    let base = if i == j { "1" } else { "0" };
                    random_polynomial(rng, &names, base, 4, if i == j { 0.3 } else { 0.15 })
                })
                .collect()
        })
        .collect();
    metric_from_upper(&names, &upper, 0.5)
}

/// Random analytic metric in the variables `vars`: polynomial entries plus
/// transcendental terms, diagonally dominant.
pub fn random_analytic_entries<R: Rng>(rng: &mut R, vars: &[String]) -> Vec<Vec<String>> {
    let m = vars.len();
    (0..m)
        .map(|i| {
            (i..m)
                .map(|j| {
                    let v = &vars[rng.random_range(0..m)];
                    let w = &vars[rng.random_range(0..m)];
                    if i == j {
                        format!(
                            "{}+({})*sin({v}*{w})+exp(({})*{v})-1",
                            random_polynomial(rng, vars, "1", 3, 0.2),
                            coeff(rng, 0.2),
                            coeff(rng, 0.3)
                        )
                    } else {
                        format!("{}+({})*cos({v})", random_polynomial(rng, vars, "0", 2, 0.1), coeff(rng, 0.05))
                    }
                })
                .collect()
        })
        .collect()
}

/// `dx₀² + h(x₁, …)` with `h` random analytic.
pub fn random_product_metric<R: Rng>(rng: &mut R, n: usize) -> MetricSpec {
    let names = coords(n);
    let h = random_analytic_entries(rng, &names[1..]);
    let mut upper = vec![std::iter::once("1".to_string()).chain((1..n).map(|_| "0".to_string())).collect::<Vec<_>>()];
    upper.extend(h);
    metric_from_upper(&names, &upper, 0.5)
}

/// `e^{2f} δ` with `f` a random polynomial.
pub fn random_conformally_flat<R: Rng>(rng: &mut R, n: usize) -> (MetricSpec, String) {
    let names = coords(n);
    let f = random_polynomial(rng, &names, "0", 5, 0.4);
    let upper = (0..n)
        .map(|i| (i..n).map(|j| if i == j { format!("exp(2*({f}))") } else { "0".into() }).collect())
        .collect::<Vec<_>>();
    (metric_from_upper(&names, &upper, 0.5), f)
}

/// Round sphere of radius 1 in stereographic coordinates.
pub fn sphere(n: usize) -> MetricSpec {
    let names = coords(n);
    let r2 = names.iter().map(|c| format!("{c}^2")).collect::<Vec<_>>().join("+");
    let upper = (0..n)
        .map(|i| (i..n).map(|j| if i == j { format!("4/(1+{r2})^2") } else { "0".into() }).collect())
        .collect::<Vec<_>>();
    metric_from_upper(&names, &upper, 0.8)
}

pub fn euclidean(n: usize) -> MetricSpec {
    let names = coords(n);
    let upper = (0..n)
        .map(|i| (i..n).map(|j| if i == j { "1".into() } else { "0".into() }).collect())
        .collect::<Vec<_>>();
    metric_from_upper(&names, &upper, 1.0)
}

pub fn random_point<R: Rng>(rng: &mut R, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half_width..half_width)).collect()
}

pub fn rel(a: f64, scale: f64) -> f64 {
    a / scale.max(1e-300)
}

/// Curvature computed from metric values only, by nested central differences.
pub struct FdOracle<'a> {
    pub spec: &'a MetricSpec,
    pub h: f64,
}

impl FdOracle<'_> {
    pub fn metric(&self, x: &[f64]) -> Matrix<f64> {
        let rows = self.spec.eval::<f64>(x, ()).unwrap();
        Matrix::from_fn(x.len(), |[i, j]| rows[i][j])
    }

    /// Fourth-order central difference of `f` along axis `k`.
    fn diff<const R: usize>(&self, x: &[f64], k: usize, h: f64, f: &dyn Fn(&[f64]) -> lcw_core::tensor::Tensor<f64, R>) -> lcw_core::tensor::Tensor<f64, R> {
        let shift = |s: f64| {
            let mut y = x.to_vec();
            y[k] += s * h;
            f(&y)
        };
        let (p1, m1, p2, m2) = (shift(1.0), shift(-1.0), shift(2.0), shift(-2.0));
        let mut out = p1.clone();
        let data: Vec<f64> = (0..p1.as_slice().len())
            .map(|a| {
                (8.0 * (p1.as_slice()[a] - m1.as_slice()[a]) - (p2.as_slice()[a] - m2.as_slice()[a])) / (12.0 * h)
            })
            .collect();
        for (idx, v) in lcw_core::tensor::indices::<R>(x.len()).zip(data) {
            out[idx] = v;
        }
        out
    }

    fn inverse(g: &Matrix<f64>) -> Matrix<f64> {
        let n = g.dim();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g[[i, j]]).try_inverse().unwrap();
        Matrix::from_fn(n, |[i, j]| m[(i, j)])
    }

    /// `Γ^k_ij` as `[k, i, j]`.
    pub fn christoffel(&self, x: &[f64]) -> Tensor3 {
        let n = x.len();
        let g = self.metric(x);
        let gi = Self::inverse(&g);
        let dg: Vec<Matrix<f64>> = (0..n).map(|k| self.diff(x, k, self.h, &|y| self.metric(y))).collect();
        Tensor3::from_fn(n, |[k, i, j]| {
            (0..n)
                .map(|l| 0.5 * gi[[k, l]] * (dg[i][[j, l]] + dg[j][[i, l]] - dg[l][[i, j]]))
                .sum()
        })
    }

    /// Coordinate `R_ijkl = g_km R^m_ijl`.
    pub fn riemann(&self, x: &[f64]) -> Tensor4 {
        let n = x.len();
        let gam = self.christoffel(x);
        let dgam: Vec<Tensor3> = (0..n).map(|a| self.diff(x, a, self.h, &|y| self.christoffel(y))).collect();
        let g = self.metric(x);
        let up = Tensor4::from_fn(n, |[l, i, j, k]| {
            let mut v = dgam[i][[l, j, k]] - dgam[j][[l, i, k]];
            for a in 0..n {
                v += gam[[l, i, a]] * gam[[a, j, k]] - gam[[l, j, a]] * gam[[a, i, k]];
            }
            v
        });
        Tensor4::from_fn(n, |[i, j, k, l]| (0..n).map(|m| g[[k, m]] * up[[m, i, j, l]]).sum())
    }

    /// Coordinate Schouten tensor.
    pub fn schouten(&self, x: &[f64]) -> Matrix<f64> {
        let n = x.len();
        let r = self.riemann(x);
        let gi = Self::inverse(&self.metric(x));
        let ric = Matrix::from_fn(n, |[a, c]| {
            let mut s = 0.0;
            for b in 0..n {
                for d in 0..n {
                    s += gi[[b, d]] * r[[a, b, c, d]];
                }
            }
            s
        });
        let s: f64 = (0..n * n).map(|k| gi[[k / n, k % n]] * ric[[k / n, k % n]]).sum();
        let g = self.metric(x);
        let nf = n as f64;
        Matrix::from_fn(n, |[a, c]| (ric[[a, c]] - s * g[[a, c]] / (2.0 * (nf - 1.0))) / (nf - 2.0))
    }

    /// Coordinate Cotton tensor `∇_i S_jk − ∇_j S_ik`.
    pub fn cotton(&self, x: &[f64]) -> Tensor3 {
        let n = x.len();
        let s = self.schouten(x);
        let ds: Vec<Matrix<f64>> = (0..n).map(|a| self.diff(x, a, self.h, &|y| self.schouten(y))).collect();
        let gam = self.christoffel(x);
        let nabla = Tensor3::from_fn(n, |[a, b, c]| {
            let mut v = ds[a][[b, c]];
            for d in 0..n {
                v -= gam[[d, a, b]] * s[[d, c]] + gam[[d, a, c]] * s[[b, d]];
            }
            v
        });
        Tensor3::from_fn(n, |[i, j, k]| nabla[[i, j, k]] - nabla[[j, i, k]])
    }
}
