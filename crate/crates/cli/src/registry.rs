//! Built-in example maps, stored as map documents.

use crate::error::CliError;
use crate::spec::MapSpec;

pub struct Example {
    pub key: &'static str,
    pub summary: &'static str,
    pub document: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        key: "nguyen-ex1",
        summary: "quadratic map with d(f^n) = n + 1; {t = 0} collapses to [1:1:1]",
        document: r#"variables = ["z", "w", "t"]
components = [
    "2*t*z - z^2 - w^2",
    "2*t*w - z^2 - w^2",
    "2*t^2 - z^2 - w^2",
]

[hints]
h0 = "t"
n0 = 1

[limits]
horizon = 12
"#,
    },
    Example {
        key: "nguyen-ex3",
        summary: "degree-7 map with degrees 1, 7, 44, 273 and lambda1 = (7 + sqrt(29))/2",
        document: r#"variables = ["z", "w", "t"]
components = [
    "(z+w+t)^2*(z^3+w^3+t^3)*z^2 - 27*z^3*w^4",
    "(z+w+t)^2*(z^3+w^3+t^3)*w^2 - 27*z^3*w^4",
    "(z+w+t)^2*(z^3+w^3+t^3)*t^2 - 27*z^3*w^4",
]

[hints]
h0 = "(z+w+t)^2*(z^3+w^3+t^3)"
n0 = 1
factors = [
    { factor = "z+w+t", multiplicity = 2 },
    { factor = "z^3+w^3+t^3", multiplicity = 1 },
]

[limits]
horizon = 3
"#,
    },
    Example {
        key: "bonifant-fornaess-d2m2",
        summary: "quadratic map whose collapse orbit enters the indeterminacy locus inside H0",
        document: r#"variables = ["z", "w", "t"]
components = [
    "z*t",
    "-t^2",
    "w*t + z^2",
]

[limits]
horizon = 10
"#,
    },
    Example {
        key: "monomial-square",
        summary: "[z^2 : w^2 : t^2], algebraically stable with d(f^n) = 2^n",
        document: r#"variables = ["z", "w", "t"]
components = ["z^2", "w^2", "t^2"]

[limits]
horizon = 10
"#,
    },
    Example {
        key: "identity",
        summary: "the identity of P^2",
        document: r#"variables = ["z", "w", "t"]
components = ["z", "w", "t"]
"#,
    },
];

pub fn lookup(key: &str) -> Result<&'static Example, CliError> {
    EXAMPLES
        .iter()
        .find(|e| e.key == key)
        .ok_or_else(|| CliError::UnknownExample(key.to_string()))
}

pub fn load(key: &str) -> Result<MapSpec, CliError> {
    MapSpec::from_toml(lookup(key)?.document)
}
