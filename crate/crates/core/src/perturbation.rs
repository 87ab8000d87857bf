//! Metrics with prescribed curvature or prescribed Cotton-York tensor at the
//! origin of a flat chart.
//!
//! Curvature: `g_ij = δ_ij − ⅓ Σ_hk R*_ihjk x^h x^k φ(x)` has Riemann tensor
//! `R*` at `0` (the quadratic term of a metric in normal coordinates).
//! Cotton-York: with `g_ij = δ_ij + φ Σ A_ij^{klm} x^k x^l x^m` the metric,
//! its first and second derivatives are flat at `0`, so `CY(0)` is linear in
//! `A`; the 60 → 5 map is assembled by running the pipeline on basis
//! coefficients and inverted in the least-norm sense.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bivector::{self, curvature_projector, CurvatureOperator};
use crate::curvature::{CurvaturePackage, Tensor4};
use crate::cy::CottonYorkTensor;
use crate::dsl::{BinOp, Expr, MetricSpec, MAX_DIMENSION, MIN_DIMENSION};
use crate::error::{Error, Result};
use crate::field::MetricField;
use crate::jet::Jet3;
use crate::scalar::Real;
use crate::tensor::Matrix;

/// An algebraic curvature operator: symmetric on Λ² and Bianchi-free.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicCurvature(CurvatureOperator<f64>);

impl AlgebraicCurvature {
    pub fn new(op: CurvatureOperator<f64>) -> Result<Self> {
        let n = op.dimension();
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
            return Err(Error::Dimension(n));
        }
        let norm = op.norm();
        if op.asymmetry() > 1e-12 * norm {
            return Err(Error::InvalidArgument("curvature operator is not symmetric".into()));
        }
        let b = bivector::bianchi_map(&op).iter().map(|x| x * x).sum::<f64>().sqrt();
        if b > 1e-12 * norm {
            return Err(Error::InvalidArgument(format!(
                "first Bianchi identity fails: defect {b:e}"
            )));
        }
        Ok(AlgebraicCurvature(op))
    }

    pub fn from_tensor(r: &Tensor4<f64>) -> Result<Self> {
        Self::new(bivector::to_operator(r)?)
    }

    pub fn zeros(n: usize) -> Self {
        AlgebraicCurvature(CurvatureOperator::zeros(n))
    }

    /// Gaussian direction in `ker b`, rescaled to Frobenius norm `norm`.
    pub fn random<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> Result<Self> {
        let p = curvature_projector(n)?;
        let m = p.matrix().nrows();
        let x = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let op = bivector::from_coordinates(n, &(p.matrix() * x));
        let s = norm / op.norm();
        Self::new(op.scale(s))
    }

    pub fn dimension(&self) -> usize {
        self.0.dimension()
    }

    pub fn operator(&self) -> &CurvatureOperator<f64> {
        &self.0
    }

    pub fn tensor(&self) -> Tensor4<f64> {
        self.0.to_tensor()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// `φ ≡ 1`, valid on a global chart.
    ConstantOne,
    /// `exp(1 − 1/(1 − |x − p|²/ρ²))` inside the ball, `0` outside.
    SmoothBump,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffSpec {
    pub kind: CutoffKind,
    pub radius: f64,
    pub center: Vec<f64>,
}

impl CutoffSpec {
    pub fn constant_one(n: usize) -> Self {
        CutoffSpec {
            kind: CutoffKind::ConstantOne,
            radius: f64::INFINITY,
            center: vec![0.0; n],
        }
    }

    pub fn bump(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument("bump radius must be positive".into()));
        }
        Ok(CutoffSpec {
            kind: CutoffKind::SmoothBump,
            radius,
            center,
        })
    }

    fn jet<T: Real>(&self, vars: &[Jet3<T>]) -> Result<Jet3<T>> {
        let n = vars.len();
        match self.kind {
            CutoffKind::ConstantOne => Jet3::constant(n, T::one()),
            CutoffKind::SmoothBump => {
                let inv = T::lit(1.0 / (self.radius * self.radius));
                let mut s = Jet3::constant(n, T::one())?;
                for (x, &c) in vars.iter().zip(&self.center) {
                    let d = x - &Jet3::constant(n, T::lit(c))?;
                    s = &s - &(&d * &d).scale(inv);
                }
                // Every derivative of the bump vanishes on and outside the sphere.
                if s.value() <= T::zero() {
                    return Jet3::constant(n, T::zero());
                }
                let e = &Jet3::constant(n, T::one())? - &s.recip();
                Ok(e.exp())
            }
        }
    }

    /// `φ` at a point.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self.kind {
            CutoffKind::ConstantOne => 1.0,
            CutoffKind::SmoothBump => {
                let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
                let s = 1.0 - r2 / (self.radius * self.radius);
                if s <= 0.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / s).exp()
                }
            }
        }
    }
}

/// One polynomial term `coeff · Π x^{vars}` of a metric perturbation.
#[derive(Debug, Clone, PartialEq)]
struct Term {
    coeff: f64,
    vars: Vec<usize>,
}

/// `g_ij = δ_ij + φ(x) P_ij(x)` with polynomial `P`, evaluated natively so
/// that non-polynomial cutoffs keep exact jets.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbedMetric {
    n: usize,
    /// Upper triangle, row-major over `i ≤ j`.
    terms: Vec<Vec<Term>>,
    cutoff: CutoffSpec,
    half_width: f64,
}

fn upper_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * n - i * (i + 1) / 2 + j
}

impl PerturbedMetric {
    fn new(n: usize, terms: Vec<Vec<Term>>, cutoff: CutoffSpec, half_width: f64) -> Result<Self> {
        if cutoff.center.len() != n {
            return Err(Error::InvalidArgument("cutoff center has the wrong length".into()));
        }
        Ok(PerturbedMetric {
            n,
            terms,
            cutoff,
            half_width,
        })
    }

    pub fn cutoff(&self) -> &CutoffSpec {
        &self.cutoff
    }

    /// The chart is `[-w, w]ⁿ`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// `g` at a point, in plain floating point.
    pub fn metric_at(&self, x: &[f64]) -> Matrix<f64> {
        let phi = self.cutoff.value(x);
        Matrix::from_fn(self.n, |[i, j]| {
            let p: f64 = self.terms[upper_index(self.n, i, j)]
                .iter()
                .map(|t| t.coeff * t.vars.iter().map(|&k| x[k]).product::<f64>())
                .sum();
            (if i == j { 1.0 } else { 0.0 }) + phi * p
        })
    }

    /// Checks positive definiteness on a grid of the chart box; returns the
    /// smallest Cholesky pivot seen.
    pub fn check_positive(&self) -> Result<f64> {
        let k: usize = if self.n <= 5 { 5 } else { 3 };
        let mut idx = vec![0usize; self.n];
        let mut worst = f64::INFINITY;
        loop {
            let x: Vec<f64> = idx
                .iter()
                .map(|&a| self.half_width * (2.0 * a as f64 / (k - 1) as f64 - 1.0))
                .collect();
            let l = self.metric_at(&x).cholesky().map_err(|_| {
                Error::InvalidArgument(format!(
                    "perturbed metric is not positive definite at {x:?}; shrink the perturbation"
                ))
            })?;
            for i in 0..self.n {
                worst = worst.min(l[[i, i]]);
            }
            let mut d = 0;
            loop {
                if d == self.n {
                    return Ok(worst);
                }
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    /// Expression form; only available for `φ ≡ 1`, since the bump is
    /// piecewise and the expression language has no conditionals.
    pub fn to_spec(&self) -> Result<MetricSpec> {
        if self.cutoff.kind != CutoffKind::ConstantOne {
            return Err(Error::InvalidArgument(
                "a smooth bump cutoff has no closed-form expression".into(),
            ));
        }
        let n = self.n;
        let components = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut e = Expr::number(if i == j { 1.0 } else { 0.0 });
                        for t in &self.terms[upper_index(n, i, j)] {
                            let mono = t
                                .vars
                                .iter()
                                .fold(Expr::number(t.coeff.abs()), |acc, &k| {
                                    Expr::binary(BinOp::Mul, acc, Expr::var(k))
                                });
                            let op = if t.coeff < 0.0 { BinOp::Sub } else { BinOp::Add };
                            e = if e.is_zero() && t.coeff >= 0.0 {
                                mono
                            } else {
                                Expr::binary(op, e, mono)
                            };
                        }
                        e
                    })
                    .collect()
            })
            .collect();
        let coordinates = (1..=n).map(|k| format!("x{k}")).collect();
        let w = self.half_width;
        MetricSpec::new(coordinates, components, Some(vec![(-w, w); n]))
    }
}

impl MetricField for PerturbedMetric {
    fn dimension(&self) -> usize {
        self.n
    }

    fn component_jets<T: Real>(&self, point: &[T]) -> Result<Vec<Vec<Jet3<T>>>> {
        let n = self.n;
        let vars = point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet3::variable(i, x, n))
            .collect::<Result<Vec<_>>>()?;
        let phi = self.cutoff.jet(&vars)?;
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                let mut p = Jet3::constant(n, T::zero())?;
                for t in &self.terms[upper_index(n, i, j)] {
                    let mono = t.vars.iter().fold(Jet3::constant(n, T::lit(t.coeff))?, |acc, &k| &acc * &vars[k]);
                    p = &p + &mono;
                }
                let delta = Jet3::constant(n, if i == j { T::one() } else { T::zero() })?;
                upper.push(&delta + &(&phi * &p));
            }
        }
        Ok((0..n)
            .map(|i| (0..n).map(|j| upper[upper_index(n, i, j)].clone()).collect())
            .collect())
    }

    fn contains(&self, point: &[f64]) -> bool {
        point.iter().all(|x| x.abs() <= self.half_width)
    }
}

/// Metric on `[-w, w]ⁿ` whose curvature at the origin is `R*`.
pub fn perturb_curvature(r: &AlgebraicCurvature, cutoff: &CutoffSpec, half_width: f64) -> Result<PerturbedMetric> {
    let n = r.dimension();
    let t = r.tensor();
    let mut terms = vec![Vec::new(); n * (n + 1) / 2];
    for i in 0..n {
        for j in i..n {
            for h in 0..n {
                for k in h..n {
                    // Symmetrized over (h, k).
                    let c = if h == k {
                        t[[i, h, j, k]]
                    } else {
                        t[[i, h, j, k]] + t[[i, k, j, h]]
                    };
                    if c != 0.0 {
                        terms[upper_index(n, i, j)].push(Term {
                            coeff: -c / 3.0,
                            vars: vec![h, k],
                        });
                    }
                }
            }
        }
    }
    let metric = PerturbedMetric::new(n, terms, cutoff.clone(), half_width)?;
    metric.check_positive()?;
    Ok(metric)
}

/// Index pairs `i ≤ j` of a symmetric 3×3 matrix.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Sorted index triples `k ≤ l ≤ m` in {0,1,2}.
pub fn sym_triples() -> [[usize; 3]; 10] {
    let mut out = [[0; 3]; 10];
    let mut a = 0;
    for k in 0..3 {
        for l in k..3 {
            for m in l..3 {
                out[a] = [k, l, m];
                a += 1;
            }
        }
    }
    out
}

fn multiplicity(t: [usize; 3]) -> f64 {
    match (t[0] == t[1], t[1] == t[2]) {
        (true, true) => 1.0,
        (false, false) => 6.0,
        _ => 3.0,
    }
}

/// `A_ij^{klm}`, symmetric in `(i, j)` and in `(k, l, m)`; stored as 6 × 10.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CottonCoefficients {
    values: Vec<f64>,
}

impl CottonCoefficients {
    pub const LEN: usize = 60;

    pub fn zeros() -> Self {
        CottonCoefficients {
            values: vec![0.0; Self::LEN],
        }
    }

    pub fn from_vec(values: Vec<f64>) -> Result<Self> {
        if values.len() != Self::LEN {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                Self::LEN,
                values.len()
            )));
        }
        Ok(CottonCoefficients { values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// `A_ij^{klm}` for arbitrary index order.
    pub fn get(&self, i: usize, j: usize, klm: [usize; 3]) -> f64 {
        let mut t = klm;
        t.sort_unstable();
        let p = SYM_PAIRS.iter().position(|&(a, b)| (a, b) == (i.min(j), i.max(j))).unwrap();
        let q = sym_triples().iter().position(|&x| x == t).unwrap();
        self.values[p * 10 + q]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `g_ij = δ_ij + φ Σ_{klm} A_ij^{klm} x^k x^l x^m` on `[-w, w]³`.
    pub fn metric(&self, cutoff: &CutoffSpec, half_width: f64) -> Result<PerturbedMetric> {
        let triples = sym_triples();
        let mut terms = vec![Vec::new(); 6];
        for (p, _) in SYM_PAIRS.iter().enumerate() {
            for (q, t) in triples.iter().enumerate() {
                let a = self.values[p * 10 + q];
                if a != 0.0 {
                    terms[p].push(Term {
                        coeff: a * multiplicity(*t),
                        vars: t.to_vec(),
                    });
                }
            }
        }
        PerturbedMetric::new(3, terms, cutoff.clone(), half_width)
    }
}

fn cy_at_origin(metric: &PerturbedMetric) -> Result<CottonYorkTensor> {
    let pkg = CurvaturePackage::<f64>::compute(metric, &[0.0; 3], 1)?;
    CottonYorkTensor::new(pkg.cotton_york.expect("dimension 3"))
}

/// The linear map `A ↦ CY(0)` as a 5 × 60 matrix in traceless coordinates.
#[derive(Debug, Clone)]
pub struct CyLinearMap {
    pub matrix: DMatrix<f64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl CyLinearMap {
    pub fn apply(&self, a: &CottonCoefficients) -> CottonYorkTensor {
        let y = &self.matrix * DVector::from_column_slice(a.as_slice());
        CottonYorkTensor::from_coordinates([y[0], y[1], y[2], y[3], y[4]])
    }
}

fn assemble_cy_map() -> Result<CyLinearMap> {
    let cutoff = CutoffSpec::constant_one(3);
    let columns = (0..CottonCoefficients::LEN)
        .into_par_iter()
        .map(|c| {
            let mut v = vec![0.0; CottonCoefficients::LEN];
            v[c] = 1.0;
            let m = CottonCoefficients::from_vec(v)?.metric(&cutoff, 0.1)?;
            Ok(cy_at_origin(&m)?.coordinates())
        })
        .collect::<Result<Vec<[f64; 5]>>>()?;
    let matrix = DMatrix::from_fn(5, CottonCoefficients::LEN, |r, c| columns[c][r]);
    let s: Vec<f64> = matrix.singular_values().iter().copied().collect();
    let smax = s.iter().copied().fold(0.0, f64::max);
    let rank = s.iter().filter(|&&x| x > 1e-10 * smax).count();
    Ok(CyLinearMap {
        matrix,
        rank,
        singular_values: s,
    })
}

/// The assembled map, built once.
pub fn cy_linear_map() -> Result<&'static CyLinearMap> {
    static MAP: OnceLock<std::result::Result<CyLinearMap, String>> = OnceLock::new();
    MAP.get_or_init(|| assemble_cy_map().map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::InvalidArgument(e.clone()))
}

#[derive(Debug, Clone)]
pub struct CySolution {
    pub coefficients: CottonCoefficients,
    pub metric: PerturbedMetric,
    /// `CY(0)` recomputed through the full pipeline.
    pub achieved: CottonYorkTensor,
}

/// Least-norm coefficients realizing `target` as `CY(0)`, verified by a
/// fresh pipeline run on the resulting metric over `[-w, w]³`.
pub fn solve_cy_target(target: &CottonYorkTensor, half_width: f64) -> Result<CySolution> {
    let map = cy_linear_map()?;
    if map.rank < 5 {
        return Err(Error::RankDeficient {
            rank: map.rank,
            expected: 5,
        });
    }
    let y = DVector::from_column_slice(&target.coordinates());
    let svd = map.matrix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let a = svd
        .solve(&y, 1e-10 * smax)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let coefficients = CottonCoefficients::from_vec(a.iter().copied().collect())?;
    let metric = coefficients.metric(&CutoffSpec::constant_one(3), half_width)?;
    metric.check_positive()?;
    let achieved = cy_at_origin(&metric)?;
    Ok(CySolution {
        coefficients,
        metric,
        achieved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::kulkarni_nomizu;

    #[test]
    fn zero_curvature_is_flat() {
        let m = perturb_curvature(&AlgebraicCurvature::zeros(4), &CutoffSpec::constant_one(4), 1.0).unwrap();
        let spec = m.to_spec().unwrap();
        let pkg = CurvaturePackage::<f64>::compute(&spec, &[0.0; 4], 1).unwrap();
        assert_eq!(pkg.riemann.max_abs(), 0.0);
    }

    #[test]
    fn space_form_round_trip() {
        let id = Matrix::identity(4);
        let r = AlgebraicCurvature::from_tensor(&kulkarni_nomizu(&id, &id).scale(0.5)).unwrap();
        let m = perturb_curvature(&r, &CutoffSpec::constant_one(4), 0.5).unwrap();
        let pkg = CurvaturePackage::<f64>::compute(&m, &[0.0; 4], 1).unwrap();
        assert!(pkg.riemann.distance(&r.tensor()) < 1e-9);
        // The expression form gives the same answer.
        let pkg2 = CurvaturePackage::<f64>::compute(&m.to_spec().unwrap(), &[0.0; 4], 1).unwrap();
        assert!(pkg2.riemann.distance(&r.tensor()) < 1e-9);
    }

    #[test]
    fn positivity_failure_reported() {
        let id = Matrix::identity(4);
        let r = AlgebraicCurvature::from_tensor(&kulkarni_nomizu(&id, &id).scale(5.0)).unwrap();
        assert!(perturb_curvature(&r, &CutoffSpec::constant_one(4), 1.0).is_err());
    }

    #[test]
    fn bump_is_local() {
        let id = Matrix::identity(3);
        let r = AlgebraicCurvature::from_tensor(&kulkarni_nomizu(&id, &id).scale(0.5)).unwrap();
        let cut = CutoffSpec::bump(vec![0.0; 3], 0.5).unwrap();
        let m = perturb_curvature(&r, &cut, 1.0).unwrap();
        assert!(m.to_spec().is_err());
        let g = m.metric_at(&[0.6, 0.0, 0.1]);
        assert_eq!(g, Matrix::identity(3));
        let pkg = CurvaturePackage::<f64>::compute(&m, &[0.0; 3], 1).unwrap();
        assert!(pkg.riemann.distance(&r.tensor()) < 1e-12);
        let outside = CurvaturePackage::<f64>::compute(&m, &[0.7, 0.1, 0.0], 1).unwrap();
        assert_eq!(outside.riemann.max_abs(), 0.0);
    }

    #[test]
    fn coefficient_lookup_is_symmetric() {
        let a = CottonCoefficients::from_vec((0..60).map(|x| x as f64).collect()).unwrap();
        assert_eq!(a.get(0, 2, [2, 1, 0]), a.get(2, 0, [0, 1, 2]));
        assert_eq!(a.get(1, 1, [0, 0, 0]), 30.0);
    }

    #[test]
    fn zero_target() {
        let sol = solve_cy_target(&CottonYorkTensor::diagonal([0.0; 3]).unwrap(), 1.0).unwrap();
        assert_eq!(sol.coefficients.norm(), 0.0);
        assert!(sol.achieved.norm() < 1e-15);
    }
}
