//! Pointwise obstruction verdicts and the aggregated report.
//!
//! The verdicts are one-sided: the tests are necessary conditions, so a
//! failure certifies that no limiting Carleman weight exists near the point,
//! while a pass decides nothing.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::bivector::{project_weyl, to_operator};
use crate::curvature::CurvaturePackage;
use crate::cy::{classify_cy, CottonYorkTensor, CyClass, TOL_DET};
use crate::dsl::MetricSpec;
use crate::eigenflag::{min_residual, MinimizeOptions, Verdict};
use crate::error::Result;
use crate::field::MetricField;

pub const HEADLINE_NO_LCW: &str =
    "no limiting Carleman weight exists on any neighborhood containing this point";
pub const HEADLINE_INCONCLUSIVE: &str = "inconclusive: necessary condition holds at all sampled points";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    WeylEigenflag,
    CottonYork,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointVerdict {
    NoLcwCertified,
    Inconclusive,
    WeylNegligible,
    Zero,
}

impl PointVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            PointVerdict::NoLcwCertified => "no_lcw_certified",
            PointVerdict::Inconclusive => "inconclusive",
            PointVerdict::WeylNegligible => "weyl_negligible",
            PointVerdict::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ObstructOptions {
    pub minimize: MinimizeOptions,
    pub tol_det: f64,
    pub orientation: i8,
}

impl Default for ObstructOptions {
    fn default() -> Self {
        ObstructOptions {
            minimize: MinimizeOptions::default(),
            tol_det: TOL_DET,
            orientation: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub point: Vec<f64>,
    /// `‖W‖` (n ≥ 4) or `‖CY‖` (n = 3), frame components.
    pub norm: f64,
    /// Normalized eigenflag residual (n ≥ 4) or `det CY` (n = 3).
    pub obstruction: f64,
    pub verdict: PointVerdict,
    /// Eigenflag verdict or Cotton-York class behind `verdict`.
    pub detail: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimizer: Option<Vec<f64>>,
    /// Set when no optimizer start converged.
    pub optimizer_failed: bool,
}

pub fn branch_for(n: usize) -> Branch {
    if n == 3 {
        Branch::CottonYork
    } else {
        Branch::WeylEigenflag
    }
}

/// Runs the pipeline and the obstruction test at one point.
pub fn evaluate_point<M: MetricField + ?Sized>(metric: &M, point: &[f64], opts: &ObstructOptions) -> Result<PointReport> {
    let pkg = CurvaturePackage::<f64>::compute(metric, point, opts.orientation)?;
    if let Some(cy) = &pkg.cotton_york {
        let cy = CottonYorkTensor::new(cy.clone())?;
        let class = classify_cy(&cy, opts.tol_det);
        let verdict = match class {
            CyClass::Zero => PointVerdict::Zero,
            CyClass::RegularSingular { .. } => PointVerdict::Inconclusive,
            CyClass::Nonsingular => PointVerdict::NoLcwCertified,
        };
        return Ok(PointReport {
            point: point.to_vec(),
            norm: cy.norm(),
            obstruction: cy.determinant(),
            verdict,
            detail: class.as_str(),
            minimizer: None,
            optimizer_failed: false,
        });
    }
    let w = project_weyl(&to_operator(&pkg.weyl)?)?;
    let mopts = MinimizeOptions {
        curvature_norm: pkg.riemann.norm(),
        ..opts.minimize.clone()
    };
    let rep = min_residual(&w, &mopts)?;
    let verdict = match rep.verdict {
        Verdict::NotEigenflag => PointVerdict::NoLcwCertified,
        Verdict::WeylNegligible => PointVerdict::WeylNegligible,
        Verdict::EigenflagWithinTol | Verdict::Inconclusive => PointVerdict::Inconclusive,
    };
    Ok(PointReport {
        point: point.to_vec(),
        norm: rep.weyl_norm,
        obstruction: rep.residual_min,
        verdict,
        detail: rep.verdict.as_str(),
        minimizer: (rep.verdict != Verdict::WeylNegligible).then(|| rep.minimizer.clone()),
        optimizer_failed: rep.all_failed(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub tol_eigenflag: f64,
    pub tol_not_eigenflag: f64,
    pub tol_det: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub name: Option<String>,
    /// The metric document the report was computed from.
    pub metric: Value,
    pub dimension: usize,
    pub branch: Branch,
    pub headline: &'static str,
    pub points: Vec<PointReport>,
    pub tolerances: Tolerances,
    pub orientation: i8,
    pub seed: u64,
    pub starts: usize,
    pub version: &'static str,
}

impl ObstructionReport {
    pub fn certified(&self) -> bool {
        self.points.iter().any(|p| p.verdict == PointVerdict::NoLcwCertified)
    }

    pub fn optimizer_failed(&self) -> bool {
        self.points.iter().any(|p| p.optimizer_failed)
    }
}

/// Evaluates every point (in parallel, reported in input order).
pub fn obstruct(spec: &MetricSpec, points: &[Vec<f64>], opts: &ObstructOptions) -> Result<ObstructionReport> {
    let reports = points
        .par_iter()
        .map(|p| evaluate_point(spec, p, opts))
        .collect::<Result<Vec<_>>>()?;
    let n = spec.dimension();
    let mut report = ObstructionReport {
        name: spec.name.clone(),
        metric: spec.to_json(),
        dimension: n,
        branch: branch_for(n),
        headline: HEADLINE_INCONCLUSIVE,
        points: reports,
        tolerances: Tolerances {
            tol_eigenflag: opts.minimize.tol_eigenflag,
            tol_not_eigenflag: opts.minimize.tol_not_eigenflag,
            tol_det: opts.tol_det,
        },
        orientation: opts.orientation,
        seed: opts.minimize.seed,
        starts: opts.minimize.starts.unwrap_or(8 * n),
        version: crate::VERSION,
    };
    if report.certified() {
        report.headline = HEADLINE_NO_LCW;
    }
    Ok(report)
}
