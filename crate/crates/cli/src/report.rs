//! Report documents and their JSON and text renderings.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use qasdyn_core::degdyn::{
    CharPoly, ClosedForm, DynamicalDegreeReport, Prediction, RecurrenceModel, RootAnalysis, RootCase,
    RootEnclosure,
};
use qasdyn_core::iterator::{CrossCheck, IterationLedger, StopReason};
use qasdyn_core::projmap::{HomogeneousMap, OrbitEnd, ProjectivePoint};
use qasdyn_core::structure::{Condition, PostIndeterminacy, QasVerdict, StructureReport};
use qasdyn_core::Polynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, Serialize)]
pub struct MapSection {
    pub variables: Vec<String>,
    pub components: Vec<String>,
    pub degree: u32,
    pub spec_hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StrippedRow {
    pub n: usize,
    pub degree: u32,
    pub factor: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckSection {
    pub agree: bool,
    pub compared: usize,
    pub first_divergence: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrentSection {
    /// Every division by `H0 ∘ F_{n-n0-1}` was exact.
    pub certified: bool,
    pub steps_certified: usize,
    pub cross_check: Option<CrossCheckSection>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct H0Section {
    pub polynomial: String,
    pub degree: u32,
    pub hint_agrees: Option<bool>,
    pub recurrent: RecurrentSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct MismatchSection {
    pub n: usize,
    pub predicted: String,
    pub actual: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceSection {
    pub order: usize,
    pub coefficients: Vec<String>,
    pub seed: Vec<String>,
    pub matches_sequence: bool,
    pub first_mismatch: Option<MismatchSection>,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormSection {
    pub kind: &'static str,
    /// `s_n = sum_j P_j(n) * root_j^n`, with `P_j` given by its coefficients
    /// (constant first).
    pub roots: Vec<String>,
    pub coefficients: Vec<Vec<String>>,
    pub exact: bool,
    pub digits: Option<u64>,
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharPolySection {
    pub d: u64,
    pub h: u64,
    pub n0: usize,
    pub coefficients: Vec<String>,
    pub display: String,
    pub source: &'static str,
    pub matches_recurrence: Option<bool>,
    pub double_root: Option<String>,
    pub closed_form: Option<ClosedFormSection>,
    pub diagnostic: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Lambda1Section {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hi: Option<String>,
    pub approx: String,
    pub width: String,
    /// Root of this monic integer polynomial.
    pub algebraic_integer_witness: String,
    pub status: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioSection {
    pub n: usize,
    pub ratio: String,
    pub approx: String,
    /// Upper bound on `|ratio - lambda1|`.
    pub deviation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessSection {
    pub component: String,
    pub condition: &'static str,
    pub step: usize,
    pub point: Vec<String>,
    pub in_h0: bool,
    pub in_indeterminacy: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentSection {
    pub factor: String,
    pub multiplicity: u32,
    pub height: Option<usize>,
    pub collapse_image: Option<Vec<String>>,
    pub after_indeterminacy: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct QasSection {
    pub verdict: &'static str,
    pub witnesses: Vec<WitnessSection>,
    pub assumptions: Vec<String>,
    pub reasons: Vec<String>,
    pub components: Vec<ComponentSection>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub iterate_ms: f64,
    pub recurrent_ms: f64,
    pub structure_ms: f64,
    pub degdyn_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BudgetSection {
    pub horizon: usize,
    pub steps_computed: usize,
    pub max_terms: usize,
    pub max_degree: u32,
    pub terms_used: usize,
    pub stopped: &'static str,
    pub detail: Option<String>,
    pub exhausted_before_verdict: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub map: MapSection,
    pub degrees: Vec<u32>,
    pub stripped: Vec<StrippedRow>,
    pub h0: Option<H0Section>,
    pub n0: Option<usize>,
    pub recurrence: Option<RecurrenceSection>,
    pub charpoly: Option<CharPolySection>,
    pub case: Option<&'static str>,
    pub lambda1: Option<Lambda1Section>,
    pub ratio_check: Option<RatioSection>,
    pub qas: QasSection,
    pub timings: Option<Timings>,
    pub budget: BudgetSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct IterateReport {
    pub map: MapSection,
    pub degrees: Vec<u32>,
    pub stripped: Vec<StrippedRow>,
    pub budget: BudgetSection,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    pub sequence: Vec<String>,
    pub recurrence: Option<RecurrenceSection>,
    pub charpoly: Option<CharPolySection>,
    pub case: Option<&'static str>,
    pub lambda1: Option<Lambda1Section>,
    pub ratio_check: Option<RatioSection>,
    pub diagnostic: Option<String>,
}

// ---------------------------------------------------------------------------
// Section builders

pub fn poly_string(p: &Polynomial, vars: &[String]) -> String {
    p.display_with(vars).to_string()
}

pub fn point_strings(p: &ProjectivePoint) -> Vec<String> {
    p.coords().iter().map(|c| c.to_string()).collect()
}

fn approx(q: &BigRational) -> String {
    format!("{}", q.to_f64().unwrap_or(f64::NAN))
}

pub fn map_section(map: &HomogeneousMap, vars: &[String], spec_hash: String) -> MapSection {
    MapSection {
        variables: vars.to_vec(),
        components: map.components().iter().map(|p| poly_string(p, vars)).collect(),
        degree: map.degree(),
        spec_hash,
    }
}

pub fn stripped_rows(ledger: &IterationLedger, vars: &[String]) -> Vec<StrippedRow> {
    ledger
        .steps
        .iter()
        .map(|s| StrippedRow {
            n: s.n,
            degree: s.stripped.total_degree().unwrap_or(0),
            factor: poly_string(&s.stripped, vars),
        })
        .collect()
}

pub fn budget_section(ledger: &IterationLedger, horizon: usize, exhausted_before_verdict: bool) -> BudgetSection {
    let (stopped, detail) = match &ledger.stop {
        StopReason::Horizon => ("horizon", None),
        StopReason::Budget { detail, .. } => ("budget", Some(detail.clone())),
    };
    BudgetSection {
        horizon,
        steps_computed: ledger.last(),
        max_terms: ledger.state.budget.max_terms,
        max_degree: ledger.state.budget.max_degree,
        terms_used: ledger.state.terms_used,
        stopped,
        detail,
        exhausted_before_verdict,
    }
}

pub fn cross_check_section(cc: &CrossCheck) -> CrossCheckSection {
    CrossCheckSection {
        agree: cc.agree,
        compared: cc.compared,
        first_divergence: cc.first_divergence,
    }
}

pub fn recurrence_section(model: &RecurrenceModel, prediction: &Prediction, status: &'static str) -> RecurrenceSection {
    RecurrenceSection {
        order: model.order(),
        coefficients: model.coefficients().iter().map(|c| c.to_string()).collect(),
        seed: model.seed().iter().map(|c| c.to_string()).collect(),
        matches_sequence: prediction.matches,
        first_mismatch: prediction.first_mismatch.as_ref().map(|m| MismatchSection {
            n: m.n,
            predicted: m.predicted.to_string(),
            actual: m.actual.to_string(),
        }),
        status,
    }
}

pub fn closed_form_section(form: &ClosedForm) -> ClosedFormSection {
    let s = |q: &BigRational| q.to_string();
    match form {
        ClosedForm::Geometric { ratio, coefficient } => ClosedFormSection {
            kind: "geometric",
            roots: vec![s(ratio)],
            coefficients: vec![vec![s(coefficient)]],
            exact: true,
            digits: None,
            residual: None,
        },
        ClosedForm::DoubleRoot { root, linear, constant } => ClosedFormSection {
            kind: "double-root",
            roots: vec![s(root)],
            coefficients: vec![vec![s(constant), s(linear)]],
            exact: true,
            digits: None,
            residual: None,
        },
        ClosedForm::Quadratic { roots, coefficients } => ClosedFormSection {
            kind: "quadratic",
            roots: roots.iter().map(|r| r.to_string()).collect(),
            coefficients: coefficients.iter().map(|c| vec![c.to_string()]).collect(),
            exact: true,
            digits: None,
            residual: None,
        },
        ClosedForm::Numeric(nf) => ClosedFormSection {
            kind: "numeric",
            roots: nf.terms.iter().map(|t| t.root.format(nf.digits)).collect(),
            coefficients: nf
                .terms
                .iter()
                .map(|t| t.coefficients.iter().map(|c| c.format(nf.digits)).collect())
                .collect(),
            exact: false,
            digits: Some(nf.digits),
            residual: Some(nf.residual.with_prec(6).to_scientific_notation()),
        },
    }
}

pub fn charpoly_section(
    cp: &CharPoly,
    source: &'static str,
    matches_recurrence: Option<bool>,
    roots: &RootAnalysis,
    closed_form: Option<&ClosedForm>,
) -> CharPolySection {
    let diagnostic = roots.competing_modulus.map(|m| {
        format!("no real dominant root of QAS shape: a root of modulus {m:.12} is not dominated by a real root")
    });
    CharPolySection {
        d: cp.d(),
        h: cp.h(),
        n0: cp.n0(),
        coefficients: cp.coefficients().iter().map(|c| c.to_string()).collect(),
        display: cp.to_string(),
        source,
        matches_recurrence,
        double_root: roots.double_root.as_ref().map(|r| r.to_string()),
        closed_form: closed_form.map(closed_form_section),
        diagnostic,
    }
}

pub fn case_label(roots: &RootAnalysis) -> &'static str {
    match roots.case {
        RootCase::DistinctRoots => "distinct-roots",
        RootCase::DoubleRoot => "double-root",
    }
}

pub fn lambda1_section(report: &DynamicalDegreeReport, status: &'static str) -> Lambda1Section {
    let e = &report.lambda1;
    let (exact, lo, hi) = match e {
        RootEnclosure::Exact(r) => (Some(r.to_string()), None, None),
        RootEnclosure::Interval { lo, hi } => (None, Some(lo.to_string()), Some(hi.to_string())),
    };
    Lambda1Section {
        exact,
        lo,
        hi,
        approx: format!("{}", e.midpoint()),
        width: format!("{:.3e}", e.width().to_f64().unwrap_or(f64::NAN)),
        algebraic_integer_witness: report.charpoly.to_string(),
        status,
    }
}

pub fn ratio_section(report: &DynamicalDegreeReport) -> RatioSection {
    let r = &report.ratio_check;
    RatioSection {
        n: r.n,
        ratio: r.ratio.to_string(),
        approx: approx(&r.ratio),
        deviation: format!("{:.3e}", r.deviation.to_f64().unwrap_or(f64::NAN)),
    }
}

pub fn qas_section(structure: &StructureReport, vars: &[String]) -> QasSection {
    let (verdict, witnesses, reasons) = match &structure.verdict {
        QasVerdict::CertifiedAtHorizon => ("certified-at-horizon", Vec::new(), Vec::new()),
        QasVerdict::NotQas { witnesses } => ("not-qas", witnesses.clone(), Vec::new()),
        QasVerdict::Inconclusive { reasons } => ("inconclusive", Vec::new(), reasons.clone()),
    };
    QasSection {
        verdict,
        witnesses: witnesses
            .iter()
            .map(|w| WitnessSection {
                component: poly_string(&w.component, vars),
                condition: match w.condition {
                    Condition::AvoidsH0 => "avoids-h0",
                    Condition::AvoidsIndeterminacy => "avoids-indeterminacy",
                },
                step: w.step,
                point: point_strings(&w.point),
                in_h0: w.in_h0,
                in_indeterminacy: w.in_indeterminacy,
            })
            .collect(),
        assumptions: structure.assumptions.clone(),
        reasons,
        components: structure
            .components
            .iter()
            .map(|c| ComponentSection {
                factor: poly_string(&c.factor, vars),
                multiplicity: c.multiplicity,
                height: c.height,
                collapse_image: c.collapse.as_ref().map(|cert| point_strings(&cert.image)),
                after_indeterminacy: match &c.post_indeterminacy {
                    PostIndeterminacy::Hypersurface { step } => {
                        format!("nonconstant at step {step}: the image is a hypersurface")
                    }
                    PostIndeterminacy::PointContinues { from_step, orbit } => format!(
                        "point orbit from step {from_step}: {} points, {}",
                        orbit.points.len(),
                        match orbit.end {
                            OrbitEnd::EnteredIndeterminacy { step } => format!("reaches I(f) at orbit index {step}"),
                            OrbitEnd::Cycle { entry, period } => format!("cycle of period {period} entered at {entry}"),
                            OrbitEnd::Horizon => "no repetition within the orbit horizon".to_string(),
                        }
                    ),
                    PostIndeterminacy::Inconclusive { reason } => format!("inconclusive: {reason}"),
                },
            })
            .collect(),
        error: None,
    }
}

pub fn qas_error_section(verdict: &'static str, reason: String) -> QasSection {
    QasSection {
        verdict,
        witnesses: Vec::new(),
        assumptions: Vec::new(),
        reasons: vec![reason.clone()],
        components: Vec::new(),
        error: Some(reason),
    }
}

// ---------------------------------------------------------------------------
// Rendering

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

fn degree_table(out: &mut String, degrees: &[u32], stripped: &[StrippedRow]) {
    for (d, s) in degrees.iter().zip(stripped) {
        let _ = writeln!(out, "  n={}  d={}  stripped_deg={}", s.n, d, s.degree);
    }
}

fn dynamics_text(
    out: &mut String,
    recurrence: &Option<RecurrenceSection>,
    charpoly: &Option<CharPolySection>,
    case: Option<&str>,
    lambda1: &Option<Lambda1Section>,
    ratio: &Option<RatioSection>,
) {
    match recurrence {
        Some(r) => {
            let _ = writeln!(
                out,
                "recurrence   ({}) order {}, {}{}",
                r.coefficients.join(", "),
                r.order,
                if r.matches_sequence { "reproduces the sequence" } else { "does not reproduce the sequence" },
                if r.status == "observational" { " [observational]" } else { "" }
            );
        }
        None => out.push_str("recurrence   none fitted\n"),
    }
    if let Some(c) = charpoly {
        let _ = writeln!(out, "charpoly     {}  ({})", c.display, case.unwrap_or("?"));
        if let Some(cf) = &c.closed_form {
            let terms: Vec<String> = cf
                .roots
                .iter()
                .zip(&cf.coefficients)
                .map(|(r, c)| format!("[{}] * ({})^n", c.join(", "), r))
                .collect();
            let _ = writeln!(out, "closed form  {} ({})", terms.join(" + "), cf.kind);
        }
        if let Some(d) = &c.diagnostic {
            let _ = writeln!(out, "diagnostic   {d}");
        }
    }
    if let Some(l) = lambda1 {
        match (&l.exact, &l.lo, &l.hi) {
            (Some(x), _, _) => {
                let _ = writeln!(out, "lambda1      = {x} exactly [{}]", l.status);
            }
            (_, Some(lo), Some(hi)) => {
                let _ = writeln!(out, "lambda1      ~ {} in [{lo}, {hi}] (width {}) [{}]", l.approx, l.width, l.status);
            }
            _ => {}
        }
    }
    if let Some(r) = ratio {
        let _ = writeln!(out, "ratio check  s_{}/s_{} ~ {}, |ratio - lambda1| <= {}", r.n, r.n - 1, r.approx, r.deviation);
    }
}

pub fn analysis_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let vars = r.map.variables.join(":");
    let _ = writeln!(out, "map          [{vars}] -> [{}]", r.map.components.join(" : "));
    let _ = writeln!(out, "degree       {}", r.map.degree);
    let _ = writeln!(
        out,
        "iteration    {} of {} steps (stopped on {})",
        r.budget.steps_computed, r.budget.horizon, r.budget.stopped
    );
    degree_table(&mut out, &r.degrees, &r.stripped);
    match (&r.h0, r.n0) {
        (Some(h), Some(n0)) => {
            let _ = writeln!(out, "h0           {} (degree {}), n0 = {n0}", h.polynomial, h.degree);
            let rec = &h.recurrent;
            if let Some(e) = &rec.error {
                let _ = writeln!(out, "recurrent    failed: {e}");
            } else {
                let _ = writeln!(
                    out,
                    "recurrent    {} exact divisions{}",
                    rec.steps_certified,
                    match &rec.cross_check {
                        Some(c) if c.agree => format!(", ledgers agree on {} steps", c.compared),
                        Some(c) => format!(", ledgers diverge at step {:?}", c.first_divergence),
                        None => String::new(),
                    }
                );
            }
        }
        _ => out.push_str("h0           no degree drop within the horizon\n"),
    }
    dynamics_text(&mut out, &r.recurrence, &r.charpoly, r.case, &r.lambda1, &r.ratio_check);
    let _ = writeln!(out, "qas          {}", r.qas.verdict);
    for c in &r.qas.components {
        let image = c
            .collapse_image
            .as_ref()
            .map(|p| format!("[{}]", p.join(":")))
            .unwrap_or_else(|| "no collapse found".into());
        let _ = writeln!(
            out,
            "  component  {} (multiplicity {}): {}, height {}; {}",
            c.factor,
            c.multiplicity,
            image,
            c.height.map(|h| h.to_string()).unwrap_or_else(|| "?".into()),
            c.after_indeterminacy
        );
    }
    for w in &r.qas.witnesses {
        let _ = writeln!(
            out,
            "  witness    {} at step {}: [{}] (in h0: {}, in I(f): {})",
            w.condition,
            w.step,
            w.point.join(":"),
            w.in_h0,
            w.in_indeterminacy
        );
    }
    for reason in &r.qas.reasons {
        let _ = writeln!(out, "  reason     {reason}");
    }
    for a in &r.qas.assumptions {
        let _ = writeln!(out, "  assumes    {a}");
    }
    if let Some(t) = &r.timings {
        let _ = writeln!(
            out,
            "timings      iterate {:.1} ms, recurrent {:.1} ms, structure {:.1} ms, degdyn {:.1} ms",
            t.iterate_ms, t.recurrent_ms, t.structure_ms, t.degdyn_ms
        );
    }
    out
}

pub fn iterate_text(r: &IterateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "map          [{}] -> [{}]", r.map.variables.join(":"), r.map.components.join(" : "));
    let _ = writeln!(
        out,
        "iteration    {} of {} steps (stopped on {})",
        r.budget.steps_computed, r.budget.horizon, r.budget.stopped
    );
    degree_table(&mut out, &r.degrees, &r.stripped);
    for s in r.stripped.iter().filter(|s| s.degree > 0) {
        let _ = writeln!(out, "  stripped at n={}: {}", s.n, s.factor);
    }
    out
}

pub fn recurrence_text(r: &RecurrenceReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sequence     {}", r.sequence.join(", "));
    dynamics_text(&mut out, &r.recurrence, &r.charpoly, r.case, &r.lambda1, &r.ratio_check);
    if let Some(d) = &r.diagnostic {
        let _ = writeln!(out, "diagnostic   {d}");
    }
    out
}
