use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use super::ast::{Expr, Func};
use super::parser::parse_expr;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_DIMENSION: usize = 3;
pub const MAX_DIMENSION: usize = 8;

/// A Riemannian metric on a coordinate chart, given entrywise by expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub name: Option<String>,
    pub coordinates: Vec<String>,
    /// Row-major `n × n`; symmetric by construction.
    pub components: Vec<Vec<Expr>>,
    /// Per-coordinate `[lo, hi]`, `[-1, 1]` when not given.
    pub domain: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawMetric {
    #[serde(default)]
    name: Option<String>,
    dimension: usize,
    coordinates: Vec<String>,
    g: Vec<Vec<Option<Value>>>,
    #[serde(default)]
    domain: Option<BTreeMap<String, [f64; 2]>>,
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Func::from_name(s).is_none()
}

impl MetricSpec {
    /// Builds a spec from already parsed entries, enforcing symmetry.
    pub fn new(
        coordinates: Vec<String>,
        components: Vec<Vec<Expr>>,
        domain: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        let n = coordinates.len();
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
            return Err(Error::Dimension(n));
        }
        for (i, c) in coordinates.iter().enumerate() {
            if !valid_identifier(c) {
                return Err(Error::Schema(format!("invalid coordinate name {c:?}")));
            }
            if coordinates[..i].contains(c) {
                return Err(Error::Schema(format!("duplicate coordinate {c:?}")));
            }
        }
        if components.len() != n || components.iter().any(|r| r.len() != n) {
            return Err(Error::Schema(format!("g must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if components[i][j] != components[j][i] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        if components
            .iter()
            .flatten()
            .any(|e| e.max_var().is_some_and(|v| v >= n))
        {
            return Err(Error::Schema("expression references an undeclared coordinate".into()));
        }
        let domain = domain.unwrap_or_else(|| vec![(-1.0, 1.0); n]);
        if domain.len() != n || domain.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return Err(Error::Schema("domain needs lo <= hi for every coordinate".into()));
        }
        Ok(MetricSpec {
            name: None,
            coordinates,
            components,
            domain,
        })
    }

    pub fn dimension(&self) -> usize {
        self.coordinates.len()
    }

    pub fn in_domain(&self, point: &[f64]) -> bool {
        point.len() == self.dimension()
            && point
                .iter()
                .zip(&self.domain)
                .all(|(&x, &(lo, hi))| lo <= x && x <= hi)
    }

    /// Center of the domain box.
    pub fn center(&self) -> Vec<f64> {
        self.domain.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// Evaluates every entry; the result is symmetric because the lower
    /// triangle is copied from the upper one.
    pub fn eval<S: Scalar>(&self, vars: &[S], ctx: S::Context) -> Result<Vec<Vec<S>>> {
        let n = self.dimension();
        let mut rows: Vec<Vec<Option<S>>> = vec![vec![None; n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.components[i][j].eval(vars, ctx)?;
                rows[j][i] = Some(v.clone());
                rows[i][j] = Some(v);
            }
        }
        Ok(rows
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.expect("filled")).collect())
            .collect())
    }

    pub fn to_json(&self) -> Value {
        let g: Vec<Vec<String>> = self
            .components
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| e.display(&self.coordinates).to_string())
                    .collect()
            })
            .collect();
        let domain: serde_json::Map<String, Value> = self
            .coordinates
            .iter()
            .zip(&self.domain)
            .map(|(c, &(lo, hi))| (c.clone(), json!([lo, hi])))
            .collect();
        let mut doc = json!({
            "dimension": self.dimension(),
            "coordinates": self.coordinates,
            "g": g,
            "domain": domain,
        });
        if let Some(name) = &self.name {
            doc["name"] = json!(name);
        }
        doc
    }
}

fn entry_expr(v: &Value, coords: &[String], i: usize, j: usize) -> Result<Expr> {
    let parsed = match v {
        Value::String(s) => parse_expr(s, coords),
        Value::Number(x) => {
            let x = x
                .as_f64()
                .ok_or_else(|| Error::Schema(format!("g[{i}][{j}] is not a finite number")))?;
            return Ok(Expr::number(x));
        }
        _ => {
            return Err(Error::Schema(format!(
                "g[{i}][{j}] must be an expression string or a number"
            )))
        }
    };
    parsed.map_err(|source| Error::Parse {
        context: format!("g[{i}][{j}]"),
        source,
    })
}

/// Reads a metric document.
///
/// `g` is either a full `n × n` array, in which `null` entries below the
/// diagonal are filled from the upper triangle, or the upper triangle alone
/// with row `i` holding `n - i` entries.
pub fn parse_metric(document: &str) -> Result<MetricSpec> {
    let raw: RawMetric = serde_json::from_str(document)
        .map_err(|e| Error::Schema(e.to_string()))?;
    let n = raw.dimension;
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
        return Err(Error::Dimension(n));
    }
    if raw.coordinates.len() != n {
        return Err(Error::Schema(format!(
            "expected {n} coordinates, got {}",
            raw.coordinates.len()
        )));
    }
    if raw.g.len() != n {
        return Err(Error::Schema(format!("g must have {n} rows")));
    }
    let coords = &raw.coordinates;
    let triangular = raw.g.iter().enumerate().all(|(i, r)| r.len() == n - i)
        && raw.g.iter().any(|r| r.len() != n);
    let mut upper: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
    let mut lower: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
    for (i, row) in raw.g.iter().enumerate() {
        if !triangular && row.len() != n {
            return Err(Error::Schema(format!("row {i} of g has {} entries", row.len())));
        }
        for (k, v) in row.iter().enumerate() {
            let j = if triangular { i + k } else { k };
            let Some(v) = v else { continue };
            let e = entry_expr(v, coords, i, j)?;
            if j >= i {
                upper[i][j] = Some(e);
            } else {
                lower[i][j] = Some(e);
            }
        }
    }
    let mut components = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = if j >= i { (i, j) } else { (j, i) };
            let e = match (&upper[a][b], &lower[b][a]) {
                (Some(u), Some(l)) if u != l => return Err(Error::Asymmetric { i: a, j: b }),
                (Some(u), _) => u.clone(),
                (None, Some(l)) => l.clone(),
                (None, None) => return Err(Error::Schema(format!("g[{a}][{b}] is missing"))),
            };
            components[i].push(e);
        }
    }
    let domain = match raw.domain {
        None => None,
        Some(map) => {
            for key in map.keys() {
                if !coords.contains(key) {
                    return Err(Error::Schema(format!("domain names unknown coordinate {key}")));
                }
            }
            Some(
                coords
                    .iter()
                    .map(|c| map.get(c).map_or((-1.0, 1.0), |&[lo, hi]| (lo, hi)))
                    .collect(),
            )
        }
    };
    let mut spec = MetricSpec::new(raw.coordinates.clone(), components, domain)?;
    spec.name = raw.name;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_four() {
        let doc = r#"{"dimension":4,"coordinates":["a","b","c","d"],
            "g":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]]}"#;
        let spec = parse_metric(doc).unwrap();
        assert_eq!(spec.dimension(), 4);
        assert_eq!(spec.components.iter().flatten().count(), 16);
        assert_eq!(spec.domain, vec![(-1.0, 1.0); 4]);
        let g = spec.eval(&[0.3, 0.1, 0.0, -0.2], ()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn stereographic_sphere_triangular() {
        let f = "4/(1+x1^2+x2^2+x3^2+x4^2)^2";
        let doc = format!(
            r#"{{"dimension":4,"coordinates":["x1","x2","x3","x4"],
            "g":[["{f}",0,0,0],["{f}",0,0],["{f}",0],["{f}"]],
            "domain":{{"x1":[-0.5,0.5]}}}}"#
        );
        let spec = parse_metric(&doc).unwrap();
        assert_eq!(spec.domain[0], (-0.5, 0.5));
        assert_eq!(spec.domain[3], (-1.0, 1.0));
        let g = spec.eval(&[0.0; 4], ()).unwrap();
        assert_eq!(g[2][2], 4.0);
        assert_eq!(g[3][1], 0.0);
    }

    #[test]
    fn asymmetric_entries_rejected() {
        let doc = r#"{"dimension":3,"coordinates":["x1","x2","x3"],
            "g":[["1","x1","0"],["x2","1","0"],["0","0","1"]]}"#;
        assert!(matches!(parse_metric(doc), Err(Error::Asymmetric { i: 0, j: 1 })));
    }

    #[test]
    fn lower_triangle_may_be_null() {
        let doc = r#"{"dimension":3,"coordinates":["x","y","z"],
            "g":[["1","x*y","0"],[null,"2","0"],[null,null,"1"]]}"#;
        let spec = parse_metric(doc).unwrap();
        assert_eq!(spec.components[1][0], spec.components[0][1]);
    }

    #[test]
    fn schema_errors() {
        let base = r#"{"dimension":2,"coordinates":["x","y"],"g":[["1","0"],["0","1"]]}"#;
        assert!(matches!(parse_metric(base), Err(Error::Dimension(2))));
        let bad = r#"{"dimension":3,"coordinates":["x","y"],"g":[]}"#;
        assert!(matches!(parse_metric(bad), Err(Error::Schema(_))));
        let bad = r#"{"dimension":3,"coordinates":["x","y","sin"],
            "g":[["1","0","0"],["0","1","0"],["0","0","1"]]}"#;
        assert!(matches!(parse_metric(bad), Err(Error::Schema(_))));
        let bad = r#"{"dimension":3,"coordinates":["x","y","z"],
            "g":[["1","0","0"],["0","w","0"],["0","0","1"]]}"#;
        assert!(matches!(parse_metric(bad), Err(Error::Parse { .. })));
        assert!(parse_metric("not json").is_err());
    }

    #[test]
    fn json_round_trip() {
        let doc = r#"{"name":"warped","dimension":3,"coordinates":["x","y","z"],
            "g":[["1+x^2","0.5*sin(y)","0"],["1+z^2","0"],["exp(-x)"]],
            "domain":{"z":[0,2]}}"#;
        let spec = parse_metric(doc).unwrap();
        let again = parse_metric(&spec.to_json().to_string()).unwrap();
        assert_eq!(spec, again);
    }
}
