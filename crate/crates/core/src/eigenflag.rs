//! The eigenflag test for Weyl operators.
//!
//! `W` has the eigenflag property at a unit vector `v` when
//! `W(v∧w₁, w₂∧w₃) = 0` for all `w_i ⊥ v`. The residual
//!
//! ```text
//! E(v) = Σ_a Σ_{b<c} W(v∧w_a, w_b∧w_c)²      (w an orthonormal basis of v⊥)
//! ```
//!
//! is computed without choosing a basis: with `T_ibc = Σ_p v_p W_pibc` and
//! `P = I − vvᵀ`, `E = ½‖T ×₂ P ×₃ P‖²`. Global minimization over the sphere
//! is a heuristic multistart search; for `n = 4` a grid bound can certify a
//! positive minimum.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bivector::{BivectorBasis, CurvatureOperator, WeylOperator};
use crate::curvature::Tensor4;
use crate::error::{Error, Result};
use crate::tensor::Matrix;

/// Normalized residual below which the eigenflag property is accepted.
pub const TOL_EIGENFLAG: f64 = 1e-8;
/// Normalized residual above which it is rejected.
pub const TOL_NOT_EIGENFLAG: f64 = 1e-4;
/// Relative floor: `‖W‖ < WEYL_FLOOR · (1 + ‖R‖)` counts as zero.
pub const WEYL_FLOOR: f64 = 1e-12;

const UNIT_TOL: f64 = 1e-10;

/// `E` and its gradient for a fixed operator, with the (0,4) tensor cached.
#[derive(Debug, Clone)]
pub struct Residual {
    n: usize,
    w: Tensor4<f64>,
}

struct Parts {
    t: Vec<f64>,
    q: Vec<f64>,
}

impl Residual {
    pub fn new(w: &WeylOperator) -> Self {
        Self::from_operator(w.operator())
    }

    pub fn from_operator(op: &CurvatureOperator<f64>) -> Self {
        Residual {
            n: op.dimension(),
            w: op.to_tensor(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    fn parts(&self, v: &[f64]) -> Parts {
        let n = self.n;
        let w = self.w.as_slice();
        let n3 = n * n * n;
        let mut t = vec![0.0; n3];
        for (p, &vp) in v.iter().enumerate() {
            if vp != 0.0 {
                for (tx, wx) in t.iter_mut().zip(&w[p * n3..(p + 1) * n3]) {
                    *tx += vp * wx;
                }
            }
        }
        // Project the last two slots onto v⊥: X − v (vᵀX) per slot.
        let mut q = t.clone();
        for i in 0..n {
            let block = &mut q[i * n * n..(i + 1) * n * n];
            for c in 0..n {
                let s: f64 = (0..n).map(|b| v[b] * block[b * n + c]).sum();
                for b in 0..n {
                    block[b * n + c] -= v[b] * s;
                }
            }
            for b in 0..n {
                let s: f64 = (0..n).map(|c| v[c] * block[b * n + c]).sum();
                for c in 0..n {
                    block[b * n + c] -= v[c] * s;
                }
            }
        }
        Parts { t, q }
    }

    fn value_unchecked(&self, v: &[f64]) -> f64 {
        0.5 * self.parts(v).q.iter().map(|x| x * x).sum::<f64>()
    }

    /// `E(v)`; `v` must be a unit vector.
    pub fn value(&self, v: &[f64]) -> Result<f64> {
        check_unit(v, self.n)?;
        Ok(self.value_unchecked(v))
    }

    /// `‖T ×₂ P ×₃ P‖`, i.e. `√(2E)`.
    pub fn projected_norm(&self, v: &[f64]) -> f64 {
        self.parts(v).q.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn value_and_gradient_unchecked(&self, v: &[f64]) -> (f64, Vec<f64>) {
        let n = self.n;
        let n2 = n * n;
        let n3 = n2 * n;
        let Parts { t, q } = self.parts(v);
        let e = 0.5 * q.iter().map(|x| x * x).sum::<f64>();
        let w = self.w.as_slice();
        // U_ik = Σ_bc v_b T_ibc P_kc
        let mut u = vec![0.0; n2];
        for i in 0..n {
            let mut vt = vec![0.0; n];
            for b in 0..n {
                for c in 0..n {
                    vt[c] += v[b] * t[i * n2 + b * n + c];
                }
            }
            let s: f64 = (0..n).map(|c| vt[c] * v[c]).sum();
            for k in 0..n {
                u[i * n + k] = vt[k] - s * v[k];
            }
        }
        let mut grad = vec![0.0; n];
        for (qi, g) in grad.iter_mut().enumerate() {
            let direct: f64 = w[qi * n3..(qi + 1) * n3]
                .iter()
                .zip(&q)
                .map(|(a, b)| a * b)
                .sum();
            let mut cross = 0.0;
            for i in 0..n {
                for k in 0..n {
                    cross += q[i * n2 + qi * n + k] * u[i * n + k];
                }
            }
            *g = direct - 2.0 * cross;
        }
        // Riemannian gradient: project onto v⊥.
        let s: f64 = grad.iter().zip(v).map(|(g, x)| g * x).sum();
        for (g, x) in grad.iter_mut().zip(v) {
            *g -= s * x;
        }
        (e, grad)
    }

    /// Riemannian gradient of `E` at the unit vector `v`.
    pub fn gradient(&self, v: &[f64]) -> Result<Vec<f64>> {
        check_unit(v, self.n)?;
        Ok(self.value_and_gradient_unchecked(v).1)
    }

    pub fn value_and_gradient(&self, v: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_unit(v, self.n)?;
        Ok(self.value_and_gradient_unchecked(v))
    }
}

fn check_unit(v: &[f64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::InvalidArgument(format!(
            "vector has length {}, expected {n}",
            v.len()
        )));
    }
    let norm = dot(v, v).sqrt();
    if !((norm - 1.0).abs() <= UNIT_TOL) {
        return Err(Error::InvalidArgument(format!("vector is not unit (norm {norm})")));
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// `E(v)` for a Weyl operator.
pub fn residual(w: &WeylOperator, v: &[f64]) -> Result<f64> {
    Residual::new(w).value(v)
}

/// Riemannian gradient of `E` at `v`.
pub fn residual_gradient(w: &WeylOperator, v: &[f64]) -> Result<Vec<f64>> {
    Residual::new(w).gradient(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EigenflagWithinTol,
    NotEigenflag,
    Inconclusive,
    WeylNegligible,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EigenflagWithinTol => "eigenflag_within_tol",
            Verdict::NotEigenflag => "not_eigenflag",
            Verdict::Inconclusive => "inconclusive",
            Verdict::WeylNegligible => "weyl_negligible",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    /// Number of low-discrepancy starts; `None` means `8n`.
    pub starts: Option<usize>,
    pub max_iter: usize,
    pub gtol: f64,
    pub seed: u64,
    pub tol_eigenflag: f64,
    pub tol_not_eigenflag: f64,
    /// `‖R‖` at the point, used only for the negligibility floor.
    pub curvature_norm: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            starts: None,
            max_iter: 500,
            gtol: 1e-12,
            seed: 0,
            tol_eigenflag: TOL_EIGENFLAG,
            tol_not_eigenflag: TOL_NOT_EIGENFLAG,
            curvature_norm: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenflagReport {
    /// `min E / ‖W‖²`.
    pub residual_min: f64,
    pub minimizer: Vec<f64>,
    /// `min E` for the operator as given.
    pub raw_residual: f64,
    pub weyl_norm: f64,
    pub starts: usize,
    pub converged: Vec<bool>,
    pub verdict: Verdict,
    /// Distinct (up to sign) local minimizers with residual below the
    /// eigenflag tolerance, in start order.
    pub zero_set: Vec<Vec<f64>>,
}

impl EigenflagReport {
    pub fn all_failed(&self) -> bool {
        !self.converged.is_empty() && self.converged.iter().all(|c| !c)
    }
}

/// Deterministic starting points: a shifted Kronecker sequence in the cube
/// mapped radially to the sphere, followed by the frame vectors, with
/// antipodal duplicates removed.
pub fn start_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    // α_k = φ^{-k} with φ the positive root of x^{n+1} = x + 1.
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (n as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=n).map(|k| phi.powi(-(k as i32))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count + n);
    let push = |v: Vec<f64>, out: &mut Vec<Vec<f64>>| {
        if out.iter().all(|u| dot(u, &v).abs() < 1.0 - 1e-12) {
            out.push(v);
        }
    };
    let mut i = 1u64;
    while out.len() < count && i < 64 * (count as u64 + 1) {
        let mut v: Vec<f64> = (0..n)
            .map(|k| 2.0 * (shift[k] + i as f64 * alpha[k]).fract() - 1.0)
            .collect();
        i += 1;
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-3 {
            continue;
        }
        normalize(&mut v);
        push(v, &mut out);
    }
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        push(e, &mut out);
    }
    out
}

#[derive(Debug, Clone)]
struct Run {
    v: Vec<f64>,
    value: f64,
    converged: bool,
}

fn descend(f: &Residual, start: &[f64], opts: &MinimizeOptions) -> Run {
    let mut v = start.to_vec();
    let (mut e, mut g) = f.value_and_gradient_unchecked(&v);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut converged = false;
    for _ in 0..opts.max_iter {
        let gg = dot(&g, &g);
        if gg.sqrt() <= opts.gtol || e == 0.0 {
            converged = true;
            break;
        }
        // Barzilai–Borwein initial step, capped at one radian of motion.
        let mut step = match &prev {
            Some((pv, pg)) => {
                let s: Vec<f64> = v.iter().zip(pv).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g.iter().zip(pg).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y).abs();
                if sy > 0.0 {
                    dot(&s, &s) / sy
                } else {
                    1.0
                }
            }
            None => 1.0,
        };
        step = step.min(1.0 / gg.sqrt());
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = v.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            normalize(&mut trial);
            let et = f.value_unchecked(&trial);
            if et <= e - 1e-4 * step * gg {
                accepted = Some((trial, et));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((trial, et)) => {
                let (_, gt) = f.value_and_gradient_unchecked(&trial);
                prev = Some((std::mem::replace(&mut v, trial), std::mem::replace(&mut g, gt)));
                e = et;
            }
            None => {
                // No decrease is representable: stationary to working precision.
                converged = gg.sqrt() <= 1e-6 * (1.0 + e.sqrt());
                break;
            }
        }
    }
    Run {
        v,
        value: e,
        converged,
    }
}

/// Multistart minimization of `E` over the unit sphere.
pub fn min_residual(w: &WeylOperator, opts: &MinimizeOptions) -> Result<EigenflagReport> {
    let n = w.dimension();
    let norm = w.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite);
    }
    if norm < WEYL_FLOOR * (1.0 + opts.curvature_norm) {
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        return Ok(EigenflagReport {
            residual_min: 0.0,
            minimizer: e0,
            raw_residual: 0.0,
            weyl_norm: norm,
            starts: 0,
            converged: Vec::new(),
            verdict: Verdict::WeylNegligible,
            zero_set: Vec::new(),
        });
    }
    let f = Residual::from_operator(&w.operator().scale(1.0 / norm));
    let count = opts.starts.unwrap_or(8 * n);
    let starts = start_points(n, count, opts.seed);
    let runs: Vec<Run> = starts.par_iter().map(|s| descend(&f, s, opts)).collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r.clone())
        .expect("at least one start");
    let mut zero_set: Vec<Vec<f64>> = Vec::new();
    for r in &runs {
        if r.value < opts.tol_eigenflag && zero_set.iter().all(|z| dot(z, &r.v).abs() < 1.0 - 1e-6) {
            zero_set.push(r.v.clone());
        }
    }
    let residual_min = best.value;
    let verdict = if residual_min < opts.tol_eigenflag {
        Verdict::EigenflagWithinTol
    } else if residual_min > opts.tol_not_eigenflag {
        Verdict::NotEigenflag
    } else {
        Verdict::Inconclusive
    };
    Ok(EigenflagReport {
        residual_min,
        raw_residual: residual_min * norm * norm,
        minimizer: best.v,
        weyl_norm: norm,
        starts: runs.len(),
        converged: runs.iter().map(|r| r.converged).collect(),
        verdict,
        zero_set,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    /// Lower bound on `min E / ‖W‖²`; positive means certified.
    pub bound: f64,
    pub grid_min: f64,
    /// Lipschitz constant of `v ↦ ‖T ×₂ P ×₃ P‖` in geodesic distance.
    pub lipschitz: f64,
    /// Geodesic covering radius of the grid.
    pub delta: f64,
    pub points: usize,
}

impl Certificate {
    pub fn certified(&self) -> bool {
        self.bound > 0.0
    }
}

/// Grid lower bound for `min E` on `S³` (`n = 4`).
///
/// Every unit vector, up to sign, is the radial image of a point on one of
/// the four faces `x_k = +1` of the cube `[-1,1]⁴`. Each face carries an
/// `m³` grid, so every point is within chord `(√3/2)h` of a grid image
/// (radial projection is 1-Lipschitz outside the unit ball). The map
/// `v ↦ T ×₂ P ×₃ P` has Lipschitz constant `3√λ_max(G)`,
/// `G_pq = Σ W_pibc W_qibc`, giving `min E ≥ ½(min‖Q‖ − Lδ)²₊`.
pub fn certify_positive_minimum(w: &WeylOperator, resolution: usize) -> Result<Certificate> {
    if w.dimension() != 4 {
        return Err(Error::InvalidArgument("grid certification is implemented for n = 4 only".into()));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    let norm = w.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidArgument("zero Weyl operator cannot be normalized".into()));
    }
    let f = Residual::from_operator(&w.operator().scale(1.0 / norm));
    let n = 4;
    let ws = f.w.as_slice();
    let n3 = n * n * n;
    let gram = DMatrix::from_fn(n, n, |p, q| dot(&ws[p * n3..(p + 1) * n3], &ws[q * n3..(q + 1) * n3]));
    let lmax = SymmetricEigen::new(gram).eigenvalues.max().max(0.0);
    let lipschitz = 3.0 * lmax.sqrt();

    let m = resolution;
    let h = 2.0 / (m - 1) as f64;
    let chord = 3f64.sqrt() / 2.0 * h;
    let delta = if chord >= 2.0 {
        std::f64::consts::PI
    } else {
        2.0 * (chord / 2.0).asin()
    };
    let coord = |k: usize| -1.0 + h * k as f64;
    let grid_min_norm = (0..n * m)
        .into_par_iter()
        .map(|fa| {
            let (face, a) = (fa / m, fa % m);
            let mut best = f64::INFINITY;
            let mut v = [0.0; 4];
            for b in 0..m {
                for c in 0..m {
                    let free = [coord(a), coord(b), coord(c)];
                    let mut it = free.iter();
                    for (k, x) in v.iter_mut().enumerate() {
                        *x = if k == face { 1.0 } else { *it.next().unwrap() };
                    }
                    normalize(&mut v);
                    best = best.min(f.projected_norm(&v));
                }
            }
            best
        })
        .reduce(|| f64::INFINITY, f64::min);
    let gap = (grid_min_norm - lipschitz * delta).max(0.0);
    let bound = if grid_min_norm > lipschitz * delta { 0.5 * gap * gap } else { 0.0 };
    Ok(Certificate {
        bound,
        grid_min: 0.5 * grid_min_norm * grid_min_norm,
        lipschitz,
        delta,
        points: n * m * m * m,
    })
}

/// `n³/3 − n² − 4n/3 + 2`, exactly.
pub fn codim_eigenflag(n: usize) -> Result<u64> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "codimension formula needs n ≥ 4, got {n}"
        )));
    }
    let n = n as i128;
    let num = n * n * n - 3 * n * n - 4 * n + 6;
    debug_assert_eq!(num % 3, 0);
    Ok((num / 3) as u64)
}

/// Operator with eigenvalue pairs `(a, a, b, b, c, c)` on the simple
/// bivectors `f₁∧f₂, f₃∧f₄ | f₁∧f₃, f₄∧f₂ | f₁∧f₄, f₂∧f₃` of the frame `f`.
pub fn construct_stratum4(eigenvalues: (f64, f64, f64), frame: &Matrix<f64>) -> Result<WeylOperator> {
    let (a, b, c) = eigenvalues;
    if (a + b + c).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "eigenvalues must sum to zero, got {}",
            a + b + c
        )));
    }
    if frame.dim() != 4 {
        return Err(Error::InvalidArgument("frame must be 4 × 4".into()));
    }
    let qtq = frame.transpose().matmul(frame);
    if qtq.distance(&Matrix::identity(4)) > 1e-10 {
        return Err(Error::InvalidArgument("frame is not orthogonal".into()));
    }
    let basis = BivectorBasis::new(4);
    let f: Vec<Vec<f64>> = (0..4).map(|j| frame.column(j)).collect();
    let planes = [
        (0, 1, a),
        (2, 3, a),
        (0, 2, b),
        (3, 1, b),
        (0, 3, c),
        (1, 2, c),
    ];
    let mut m = Matrix::zeros(6);
    for (i, j, lambda) in planes {
        let bv = basis.wedge(&f[i], &f[j]);
        for x in 0..6 {
            for y in 0..6 {
                m[[x, y]] += lambda * bv[x] * bv[y];
            }
        }
    }
    WeylOperator::new(CurvatureOperator::from_matrix(4, m))
}

/// Multiplicity pattern of the spectrum of a Weyl operator in dimension 4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "pattern")]
pub enum SpectrumPattern {
    Zero,
    /// Three distinct eigenvalues, each of multiplicity 2.
    ThreePairs { a: f64, b: f64, c: f64 },
    /// `λ` with multiplicity 2 and `−λ/2` with multiplicity 4.
    DoubleQuadruple { lambda: f64 },
    Other,
}

/// Groups the eigenvalues of `w` (n = 4) with tolerance `tol · ‖W‖`.
pub fn spectrum_pattern(w: &WeylOperator, tol: f64) -> Result<SpectrumPattern> {
    if w.dimension() != 4 {
        return Err(Error::InvalidArgument("spectrum patterns are defined for n = 4".into()));
    }
    let norm = w.norm();
    if norm < WEYL_FLOOR {
        return Ok(SpectrumPattern::Zero);
    }
    let m = w.operator().matrix();
    let dm = DMatrix::from_fn(6, 6, |i, j| m[[i, j]]);
    let mut ev: Vec<f64> = SymmetricEigen::new(dm).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let eps = tol * norm;
    let mut groups: Vec<(f64, usize)> = Vec::new();
    for x in ev {
        match groups.last_mut() {
            Some((mean, k)) if (x - *mean).abs() <= eps => {
                *mean = (*mean * *k as f64 + x) / (*k + 1) as f64;
                *k += 1;
            }
            _ => groups.push((x, 1)),
        }
    }
    let mult: Vec<usize> = groups.iter().map(|g| g.1).collect();
    Ok(match mult.as_slice() {
        [2, 2, 2] => SpectrumPattern::ThreePairs {
            a: groups[0].0,
            b: groups[1].0,
            c: groups[2].0,
        },
        [2, 4] | [4, 2] => {
            let lambda = groups.iter().find(|g| g.1 == 2).unwrap().0;
            let rest = groups.iter().find(|g| g.1 == 4).unwrap().0;
            if (rest + lambda / 2.0).abs() <= eps {
                SpectrumPattern::DoubleQuadruple { lambda }
            } else {
                SpectrumPattern::Other
            }
        }
        _ => SpectrumPattern::Other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stratum(a: f64, b: f64) -> WeylOperator {
        construct_stratum4((a, b, -a - b), &Matrix::identity(4)).unwrap()
    }

    #[test]
    fn zero_operator() {
        let w = WeylOperator::zeros(4);
        let v = [0.5, 0.5, 0.5, 0.5];
        assert_eq!(residual(&w, &v).unwrap(), 0.0);
        assert!(residual_gradient(&w, &v).unwrap().iter().all(|x| *x == 0.0));
        let rep = min_residual(&w, &MinimizeOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::WeylNegligible);
    }

    #[test]
    fn non_unit_vector_rejected() {
        assert!(residual(&stratum(1.0, 1.0), &[1.0, 1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn stratum_example() {
        let w = stratum(1.0, 1.0);
        assert!(residual(&w, &[1.0, 0.0, 0.0, 0.0]).unwrap() < 1e-24);
        let g = residual_gradient(&w, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));
        assert!(construct_stratum4((1.0, 1.0, -1.0), &Matrix::identity(4)).is_err());
        assert_eq!(stratum(0.0, 0.0).norm(), 0.0);
    }

    #[test]
    fn codimension_values() {
        assert_eq!(codim_eigenflag(4).unwrap(), 2);
        assert_eq!(codim_eigenflag(5).unwrap(), 12);
        assert_eq!(codim_eigenflag(6).unwrap(), 30);
        assert!(codim_eigenflag(3).is_err());
    }

    #[test]
    fn spectrum_patterns() {
        assert_eq!(
            spectrum_pattern(&stratum(1.0, 1.0), 1e-9).unwrap(),
            SpectrumPattern::DoubleQuadruple { lambda: -2.0 }
        );
        assert!(matches!(
            spectrum_pattern(&stratum(1.0, 2.0), 1e-9).unwrap(),
            SpectrumPattern::ThreePairs { .. }
        ));
        assert_eq!(spectrum_pattern(&WeylOperator::zeros(4), 1e-9).unwrap(), SpectrumPattern::Zero);
    }

    #[test]
    fn start_set_is_antipode_free() {
        let s = start_points(4, 32, 7);
        assert_eq!(s.len(), 36);
        for (i, a) in s.iter().enumerate() {
            assert!((dot(a, a) - 1.0).abs() < 1e-14);
            for b in &s[..i] {
                assert!(dot(a, b).abs() < 1.0 - 1e-12);
            }
        }
        assert_eq!(s, start_points(4, 32, 7));
    }

    #[test]
    fn certificate_rejects_zero_and_stratum() {
        assert!(certify_positive_minimum(&WeylOperator::zeros(4), 5).is_err());
        let c = certify_positive_minimum(&stratum(1.0, 2.0), 9).unwrap();
        assert!(!c.certified());
    }
}
