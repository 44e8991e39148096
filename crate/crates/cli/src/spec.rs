//! Map documents (TOML) and their validation into a normalized lifting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use qasdyn_core::iterator::Budget;
use qasdyn_core::projmap::{HomogeneousMap, ProjectivePoint};
use qasdyn_core::Polynomial;

use crate::error::CliError;
use crate::expr::{self, parse_joint, parse_polynomial};

pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_TOLERANCE: &str = "1e-12";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorHint {
    pub factor: String,
    #[serde(default = "one")]
    pub multiplicity: u32,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<FactorHint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness_points: Vec<Vec<i64>>,
}

impl Hints {
    fn is_empty(&self) -> bool {
        *self == Hints::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    #[serde(default = "default_horizon")]
    pub horizon: usize,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,
}

fn default_horizon() -> usize {
    DEFAULT_HORIZON
}

fn default_max_terms() -> usize {
    Budget::default().max_terms
}

fn default_max_degree() -> u32 {
    Budget::default().max_degree
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            horizon: DEFAULT_HORIZON,
            max_terms: default_max_terms(),
            max_degree: default_max_degree(),
        }
    }
}

fn default_tolerance() -> String {
    DEFAULT_TOLERANCE.to_string()
}

/// A map document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub variables: Vec<String>,
    pub components: Vec<String>,
    #[serde(default = "default_tolerance")]
    pub tolerance: String,
    #[serde(default, skip_serializing_if = "Hints::is_empty")]
    pub hints: Hints,
    #[serde(default)]
    pub limits: Limits,
}

impl MapSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Document(e.to_string().trim_end().to_string()))
    }

    /// Canonical encoding; also the input of the content hash.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("map spec serializes")
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_terms: self.limits.max_terms,
            max_degree: self.limits.max_degree,
        }
    }

    pub fn tolerance(&self) -> Result<BigRational, CliError> {
        match expr::parse_rational(&self.tolerance) {
            Some(t) if t.is_positive() => Ok(t),
            _ => Err(CliError::Validation(format!(
                "tolerance '{}' is not a positive number",
                self.tolerance
            ))),
        }
    }
}

/// A validated map with parsed hints.
#[derive(Clone, Debug)]
pub struct ParsedMap {
    pub spec: MapSpec,
    pub map: HomogeneousMap,
    pub h0: Option<Polynomial>,
    pub factors: Option<Vec<(Polynomial, u32)>>,
    pub witness_points: Vec<ProjectivePoint>,
    pub tolerance: BigRational,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses and validates: homogeneous components of one degree, and a
/// nonzero Jacobian determinant.
pub fn parse_map(spec: &MapSpec) -> Result<ParsedMap, CliError> {
    let vars = &spec.variables;
    if vars.is_empty() {
        return Err(CliError::Validation("no variables".into()));
    }
    for (i, v) in vars.iter().enumerate() {
        if !is_identifier(v) {
            return Err(CliError::Validation(format!("'{v}' is not a valid variable name")));
        }
        if vars[..i].contains(v) {
            return Err(CliError::Validation(format!("variable '{v}' is listed twice")));
        }
    }
    if spec.components.len() != vars.len() {
        return Err(CliError::Validation(format!(
            "{} components for {} variables",
            spec.components.len(),
            vars.len()
        )));
    }
    let raw = parse_joint(&spec.components, vars).map_err(|(i, e)| CliError::Parse {
        field: format!("components[{i}]"),
        error: e,
    })?;
    let mut degree = None;
    for (i, p) in raw.iter().enumerate() {
        if p.is_zero() {
            return Err(CliError::Validation(format!("component {i} is zero")));
        }
        if !p.is_homogeneous() {
            return Err(CliError::Validation(format!(
                "component {i} ({}) is not homogeneous",
                spec.components[i].trim()
            )));
        }
        let d = p.total_degree().unwrap_or(0);
        match degree {
            None => degree = Some(d),
            Some(d0) if d0 != d => {
                return Err(CliError::Validation(format!(
                    "component {i} has degree {d}, component 0 has degree {d0}"
                )))
            }
            _ => {}
        }
    }
    if degree == Some(0) {
        return Err(CliError::Validation("components are constant".into()));
    }
    let map = HomogeneousMap::new(raw).map_err(|e| CliError::Validation(e.to_string()))?;
    if map.jacobian_determinant().is_zero() {
        return Err(CliError::Validation(
            "not dominating: the Jacobian determinant vanishes identically".into(),
        ));
    }
    let h0 = match &spec.hints.h0 {
        Some(s) => Some(parse_hint(s, vars, "hints.h0")?.canonicalize()),
        None => None,
    };
    let factors = if spec.hints.factors.is_empty() {
        None
    } else {
        let mut out = Vec::new();
        for (i, f) in spec.hints.factors.iter().enumerate() {
            if f.multiplicity == 0 {
                return Err(CliError::Validation(format!("hints.factors[{i}] has multiplicity 0")));
            }
            let p = parse_hint(&f.factor, vars, &format!("hints.factors[{i}]"))?;
            out.push((p.canonicalize(), f.multiplicity));
        }
        Some(out)
    };
    let mut witness_points = Vec::new();
    for (i, pt) in spec.hints.witness_points.iter().enumerate() {
        let p = (pt.len() == vars.len())
            .then(|| ProjectivePoint::new(pt.iter().map(|&c| BigInt::from(c)).collect()))
            .flatten()
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "hints.witness_points[{i}] needs {} coordinates, not all zero",
                    vars.len()
                ))
            })?;
        witness_points.push(p);
    }
    if spec.hints.n0 == Some(0) {
        return Err(CliError::Validation("hints.n0 must be positive".into()));
    }
    let tolerance = spec.tolerance()?;
    Ok(ParsedMap {
        spec: spec.clone(),
        map,
        h0,
        factors,
        witness_points,
        tolerance,
    })
}

fn parse_hint(src: &str, vars: &[String], field: &str) -> Result<Polynomial, CliError> {
    let p = parse_polynomial(src, vars).map_err(|e| CliError::Parse {
        field: field.to_string(),
        error: e,
    })?;
    if p.is_constant() || !p.is_homogeneous() {
        return Err(CliError::Validation(format!(
            "{field} must be a nonconstant homogeneous polynomial"
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(components: &str) -> String {
        format!("variables = [\"z\", \"w\", \"t\"]\ncomponents = [{components}]\n")
    }

    #[test]
    fn round_trips_through_toml() {
        let spec = MapSpec::from_toml(&doc("\"z^2\", \"w^2\", \"t^2\"")).unwrap();
        assert_eq!(spec.limits, Limits::default());
        assert_eq!(spec.tolerance, DEFAULT_TOLERANCE);
        let again = MapSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn inhomogeneous_components_are_rejected() {
        let spec = MapSpec::from_toml(&doc("\"z^2 + w\", \"w^2\", \"t^2\"")).unwrap();
        let err = parse_map(&spec).unwrap_err();
        assert!(err.to_string().contains("not homogeneous"), "{err}");
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let spec = MapSpec::from_toml(&doc("\"z^2\", \"w^3\", \"t^2\"")).unwrap();
        assert!(parse_map(&spec).unwrap_err().to_string().contains("degree"));
    }

    #[test]
    fn degenerate_maps_are_rejected() {
        let spec = MapSpec::from_toml(&doc("\"z^2\", \"z^2\", \"t^2\"")).unwrap();
        assert!(parse_map(&spec).unwrap_err().to_string().contains("not dominating"));
    }

    #[test]
    fn rational_components_are_cleared_jointly() {
        let spec = MapSpec::from_toml(&doc("\"(1/2)*z^2\", \"w^2\", \"t^2\"")).unwrap();
        let m = parse_map(&spec).unwrap();
        let shown: Vec<String> = m
            .map
            .components()
            .iter()
            .map(|p| p.display_with(&spec.variables).to_string())
            .collect();
        assert_eq!(shown, ["z^2", "2*w^2", "2*t^2"]);
    }

    #[test]
    fn syntax_errors_report_positions() {
        let spec = MapSpec::from_toml(&doc("\"z^2\", \"w^2\", \"t^2 +* z\"")).unwrap();
        let err = parse_map(&spec).unwrap_err();
        assert_eq!(err.to_string(), "components[2]: line 1, column 6: expected an operand, found '*'");
        let err = MapSpec::from_toml("variables = [\"z\"\ncomponents = 3").unwrap_err();
        assert!(matches!(err, CliError::Document(_)));
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("{}colour = 1\n", doc("\"z\", \"w\", \"t\""));
        assert!(MapSpec::from_toml(&text).is_err());
    }
}
