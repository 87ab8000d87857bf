//! Sampling experiments: random Weyl operators and grid scans of a metric.
//!
//! These give evidence, not proofs, that generic operators avoid the
//! eigenflag set and that the obstructions vanish only on thin sets.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bivector::{self, weyl_projector, WeylOperator};
use crate::dsl::MetricSpec;
use crate::eigenflag::{min_residual, EigenflagReport, MinimizeOptions};
use crate::error::{Error, Result};
use crate::json::format_f64;
use crate::report::{evaluate_point, ObstructOptions};
use crate::tensor::Matrix;

/// Gaussian operator projected onto the Weyl space, unit Frobenius norm.
pub fn sample_weyl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeylOperator> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "Weyl space is trivial for n = {n}"
        )));
    }
    let p = weyl_projector(n)?;
    let m = p.matrix().nrows();
    let x = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let op = bivector::from_coordinates(n, &(p.matrix() * x));
    let s = 1.0 / op.norm();
    WeylOperator::new(op.scale(s))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let (q, r) = (qr.q(), qr.r());
    Matrix::from_fn(n, |[i, j]| q[(i, j)] * r[(j, j)].signum())
}

/// Rotation (determinant +1) with Haar distribution.
pub fn random_rotation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix<f64> {
    let mut q = random_orthogonal(n, rng);
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[[i, 0]] = -q[[i, 0]];
        }
    }
    q
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub min: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    /// Empirical 5% quantile, used as a calibrated "clearly positive" level.
    pub threshold: f64,
    /// Normalized minimum residual of each sample, in sampling order.
    pub residuals: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl SampleStats {
    pub fn from_residuals(n: usize, seed: u64, residuals: Vec<f64>) -> Self {
        let mut s = residuals.clone();
        s.sort_by(f64::total_cmp);
        let q05 = quantile(&s, 0.05);
        SampleStats {
            n,
            count: s.len(),
            seed,
            min: s.first().copied().unwrap_or(f64::NAN),
            q05,
            q50: quantile(&s, 0.5),
            q95: quantile(&s, 0.95),
            threshold: q05,
            residuals,
        }
    }

    /// `index,residual` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,residual\n");
        for (i, r) in self.residuals.iter().enumerate() {
            out.push_str(&format!("{i},{}\n", format_f64(*r)));
        }
        out
    }
}

/// `count` operators drawn from one seeded stream, in order.
pub fn sample_operators(n: usize, count: usize, seed: u64) -> Result<Vec<WeylOperator>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample_weyl(n, &mut rng)).collect()
}

/// Runs the eigenflag minimization on each operator (in parallel, in order).
pub fn minimize_all(ops: &[WeylOperator], opts: &MinimizeOptions) -> Result<Vec<EigenflagReport>> {
    ops.par_iter().map(|w| min_residual(w, opts)).collect()
}

pub fn residual_statistics(n: usize, count: usize, seed: u64, opts: &MinimizeOptions) -> Result<SampleStats> {
    let ops = sample_operators(n, count, seed)?;
    let reports = minimize_all(&ops, opts)?;
    Ok(SampleStats::from_residuals(
        n,
        seed,
        reports.iter().map(|r| r.residual_min).collect(),
    ))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub point: Vec<f64>,
    pub norm: f64,
    pub obstruction: f64,
    pub verdict: String,
}

/// Grid points of the domain box, `counts[k]` per axis, endpoints included
/// (a count of 1 gives the midpoint). First coordinate varies slowest.
pub fn grid_points(spec: &MetricSpec, counts: &[usize]) -> Result<Vec<Vec<f64>>> {
    let n = spec.dimension();
    if counts.len() != n || counts.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "grid needs {n} positive counts"
        )));
    }
    let axes: Vec<Vec<f64>> = spec
        .domain
        .iter()
        .zip(counts)
        .map(|(&(lo, hi), &k)| {
            if k == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..k).map(|a| lo + (hi - lo) * a as f64 / (k - 1) as f64).collect()
            }
        })
        .collect();
    let mut points = vec![Vec::new()];
    for axis in &axes {
        points = points
            .into_iter()
            .flat_map(|p| {
                axis.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    Ok(points)
}

/// Evaluates the obstruction on a grid; per-point failures become rows with
/// verdict `error: …`.
pub fn scan_metric(spec: &MetricSpec, counts: &[usize], opts: &ObstructOptions) -> Result<Vec<ScanRow>> {
    let points = grid_points(spec, counts)?;
    Ok(points
        .into_par_iter()
        .map(|p| match evaluate_point(spec, &p, opts) {
            Ok(r) => ScanRow {
                point: p,
                norm: r.norm,
                obstruction: r.obstruction,
                verdict: r.detail.to_string(),
            },
            Err(e) => ScanRow {
                point: p,
                norm: f64::NAN,
                obstruction: f64::NAN,
                verdict: format!("error: {e}").replace(',', ";"),
            },
        })
        .collect())
}

/// CSV with header `x1,...,xn,norm,obstruction,verdict`.
pub fn scan_csv(n: usize, rows: &[ScanRow]) -> String {
    let mut out: String = (1..=n).map(|k| format!("x{k},")).collect();
    out.push_str("norm,obstruction,verdict\n");
    for r in rows {
        for x in &r.point {
            out.push_str(&format_f64(*x));
            out.push(',');
        }
        out.push_str(&format!("{},{},{}\n", format_f64(r.norm), format_f64(r.obstruction), r.verdict));
    }
    out
}
