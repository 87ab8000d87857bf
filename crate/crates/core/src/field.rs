//! Metrics as sources of exact third-order jets at a chart point.

use crate::dsl::MetricSpec;
use crate::error::{Error, Result};
use crate::jet::Jet3;
use crate::scalar::Real;
use crate::tensor::Matrix;

/// Anything that can produce the component jets of a metric at a point.
pub trait MetricField: Sync {
    fn dimension(&self) -> usize;

    /// Jets of `g_ij` expanded at `point`; must be symmetric in `(i, j)`.
    fn component_jets<T: Real>(&self, point: &[T]) -> Result<Vec<Vec<Jet3<T>>>>;

    fn contains(&self, _point: &[f64]) -> bool {
        true
    }
}

impl MetricField for MetricSpec {
    fn dimension(&self) -> usize {
        MetricSpec::dimension(self)
    }

    fn component_jets<T: Real>(&self, point: &[T]) -> Result<Vec<Vec<Jet3<T>>>> {
        let n = self.dimension();
        let vars = point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet3::variable(i, x, n))
            .collect::<Result<Vec<_>>>()?;
        self.eval(&vars, n)
    }

    fn contains(&self, point: &[f64]) -> bool {
        self.in_domain(point)
    }
}

/// `g_ij` and its coordinate derivatives through third order at one point.
#[derive(Debug, Clone)]
pub struct MetricJets<T> {
    point: Vec<T>,
    g: Vec<Vec<Jet3<T>>>,
}

impl<T: Real> MetricJets<T> {
    pub fn dimension(&self) -> usize {
        self.point.len()
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn jet(&self, i: usize, j: usize) -> &Jet3<T> {
        &self.g[i][j]
    }

    pub fn value(&self, i: usize, j: usize) -> T {
        self.g[i][j].value()
    }

    /// `∂_k g_ij`
    pub fn d1(&self, k: usize, i: usize, j: usize) -> T {
        self.g[i][j].grad(k)
    }

    /// `∂_k ∂_l g_ij`
    pub fn d2(&self, k: usize, l: usize, i: usize, j: usize) -> T {
        self.g[i][j].hess(k, l)
    }

    /// `∂_k ∂_l ∂_m g_ij`
    pub fn d3(&self, k: usize, l: usize, m: usize, i: usize, j: usize) -> T {
        self.g[i][j].third(k, l, m)
    }

    pub fn metric(&self) -> Matrix<T> {
        Matrix::from_fn(self.dimension(), |[i, j]| self.value(i, j))
    }
}

/// Evaluates the metric's jets at `point` and checks positive definiteness.
pub fn metric_jets<T: Real, M: MetricField + ?Sized>(metric: &M, point: &[T]) -> Result<MetricJets<T>> {
    let n = metric.dimension();
    if point.len() != n {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, metric has dimension {n}",
            point.len()
        )));
    }
    let as_f64: Vec<f64> = point.iter().map(|x| x.as_f64()).collect();
    if !metric.contains(&as_f64) {
        return Err(Error::InvalidArgument(format!(
            "point {as_f64:?} lies outside the chart domain"
        )));
    }
    let g = metric.component_jets(point)?;
    if g.iter().flatten().any(|j| !j.is_finite()) {
        return Err(Error::NonFinite);
    }
    let jets = MetricJets {
        point: point.to_vec(),
        g,
    };
    jets.metric().cholesky()?;
    Ok(jets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_metric;

    fn spec(entries: &str) -> MetricSpec {
        parse_metric(&format!(
            r#"{{"dimension":3,"coordinates":["x1","x2","x3"],"g":{entries}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn constant_metric_has_zero_derivatives() {
        let s = spec(r#"[["2","0.5","0"],["1","0"],["3"]]"#);
        let mj = metric_jets(&s, &[0.1, -0.2, 0.3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let jet = mj.jet(i, j);
                assert!(jet.coefficients()[1..].iter().all(|&c| c == 0.0));
            }
        }
        assert_eq!(mj.value(0, 1), 0.5);
    }

    #[test]
    fn polynomial_entry() {
        let s = spec(r#"[["1+x1^2","0","0"],["1","0"],["1"]]"#);
        let mj = metric_jets(&s, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(mj.d1(0, 0, 0), 2.0);
        assert_eq!(mj.d2(0, 0, 0, 0), 2.0);
        assert_eq!(mj.d3(0, 0, 0, 0, 0), 0.0);
        assert_eq!(mj.d1(1, 0, 0), 0.0);
    }

    #[test]
    fn rejects_indefinite_and_out_of_domain() {
        let s = spec(r#"[["x1","0","0"],["1","0"],["1"]]"#);
        assert!(matches!(
            metric_jets(&s, &[-0.5, 0.0, 0.0]),
            Err(Error::NotPositiveDefinite)
        ));
        assert!(metric_jets(&s, &[2.0, 0.0, 0.0]).is_err());
        assert!(metric_jets(&s, &[0.5, 0.0]).is_err());
    }
}
