//! The analysis pipeline: iterate, find `H0`, certify the recurrent law,
//! check the QAS conditions, then fit and solve the degree recurrence.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use qasdyn_core::degdyn::{
    classify_roots, closed_form, dynamical_degree, extend_and_ratio, fit_recurrence, predict_degrees,
    predict_sequence, CharPoly, DynamicalDegreeReport, RecurrenceModel, RootAnalysis, DEFAULT_RATIO_N,
};
use qasdyn_core::iterator::{cross_check, iterate_naive, iterate_recurrent, CrossCheck, IterationLedger};
use qasdyn_core::structure::{discover_h0, qas_check, QasOptions, QasVerdict, StructureReport};
use qasdyn_core::Polynomial;

use crate::report::*;
use crate::spec::ParsedMap;

#[derive(Clone, Debug)]
pub struct Options {
    pub horizon: Option<usize>,
    pub tolerance: Option<BigRational>,
    pub timings: bool,
    pub ratio_n: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            horizon: None,
            tolerance: None,
            timings: false,
            ratio_n: DEFAULT_RATIO_N,
        }
    }
}

/// Intermediate results kept for inspection.
#[derive(Clone, Debug)]
pub struct Artifacts {
    pub naive: IterationLedger,
    pub h0: Option<(Polynomial, usize)>,
    pub recurrent: Option<IterationLedger>,
    pub cross_check: Option<CrossCheck>,
    pub structure: Option<StructureReport>,
    pub model: Option<RecurrenceModel>,
    pub charpoly: Option<CharPoly>,
    pub roots: Option<RootAnalysis>,
    pub dynamical: Option<DynamicalDegreeReport>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub artifacts: Artifacts,
}

impl Analysis {
    /// 3 when the budget stopped iteration before any degree drop was seen.
    pub fn exit_code(&self) -> i32 {
        if self.report.budget.exhausted_before_verdict {
            3
        } else {
            0
        }
    }
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn to_big(v: &[u32]) -> Vec<BigInt> {
    v.iter().map(|&d| BigInt::from(d)).collect()
}

pub fn iterate_only(parsed: &ParsedMap, horizon: Option<usize>, spec_hash: String) -> IterateReport {
    let spec = &parsed.spec;
    let horizon = horizon.unwrap_or(spec.limits.horizon);
    let naive = iterate_naive(&parsed.map, horizon, spec.budget());
    let exhausted = naive.stopped_on_budget() && discover_h0(&naive).is_none();
    IterateReport {
        map: map_section(&parsed.map, &spec.variables, spec_hash),
        degrees: naive.degrees(),
        stripped: stripped_rows(&naive, &spec.variables),
        budget: budget_section(&naive, horizon, exhausted),
    }
}

pub fn run_pipeline(parsed: &ParsedMap, opts: &Options, spec_hash: String) -> Analysis {
    let spec = &parsed.spec;
    let vars = &spec.variables;
    let map = &parsed.map;
    let horizon = opts.horizon.unwrap_or(spec.limits.horizon);
    let tol = opts.tolerance.clone().unwrap_or_else(|| parsed.tolerance.clone());
    let budget = spec.budget();

    let clock = Instant::now();
    let naive = iterate_naive(map, horizon, budget);
    let t_iterate = clock.elapsed();

    let clock = Instant::now();
    let h0 = discover_h0(&naive);
    let mut recurrent = None;
    let mut cc = None;
    let h0_section = h0.as_ref().map(|(h, n0)| {
        let hint_agrees = match (&parsed.h0, parsed.spec.hints.n0) {
            (None, None) => None,
            (hint, hint_n0) => Some(hint.as_ref().is_none_or(|p| p == h) && hint_n0.is_none_or(|m| m == *n0)),
        };
        let rec = match iterate_recurrent(map, h, *n0, naive.last(), budget) {
            Ok(ledger) => {
                let check = cross_check(&naive, &ledger);
                let steps_certified = ledger.steps.iter().filter(|s| s.certificate.is_some()).count();
                let section = RecurrentSection {
                    certified: check.agree,
                    steps_certified,
                    cross_check: Some(cross_check_section(&check)),
                    error: None,
                };
                recurrent = Some(ledger);
                cc = Some(check);
                section
            }
            Err(e) => RecurrentSection {
                certified: false,
                steps_certified: 0,
                cross_check: None,
                error: Some(e.to_string()),
            },
        };
        H0Section {
            polynomial: poly_string(h, vars),
            degree: h.total_degree().unwrap_or(0),
            hint_agrees,
            recurrent: rec,
        }
    });
    let t_recurrent = clock.elapsed();

    let clock = Instant::now();
    let qas_opts = QasOptions {
        witness_points: parsed.witness_points.clone(),
        ..QasOptions::default()
    };
    let (structure, qas) = match qas_check(map, &naive, parsed.factors.as_deref(), &qas_opts) {
        Ok(s) => {
            let section = qas_section(&s, vars);
            (Some(s), section)
        }
        Err(e) => (None, qas_error_section("inconclusive", e.to_string())),
    };
    let t_structure = clock.elapsed();

    let clock = Instant::now();
    let certified = matches!(
        structure.as_ref().map(|s| &s.verdict),
        Some(QasVerdict::CertifiedAtHorizon)
    ) && cc.as_ref().is_some_and(|c| c.agree);
    let status = if certified { "certified" } else { "observational" };
    let degrees = naive.degrees();
    let model = fit_recurrence(&to_big(&degrees));
    let prediction = model.as_ref().map(|m| predict_degrees(m, &naive));
    let not_qas = matches!(
        structure.as_ref().map(|s| &s.verdict),
        Some(QasVerdict::NotQas { .. })
    );
    // Without a QAS certificate or refutation, H0 fixes the characteristic
    // polynomial; otherwise fall back to the fitted recurrence.
    let chosen = match &h0 {
        Some((h, n0)) if !not_qas => CharPoly::new(map.degree() as u64, h.total_degree().unwrap_or(0) as u64, *n0)
            .ok()
            .map(|c| (c, "h0")),
        _ => None,
    }
    .or_else(|| model.as_ref().and_then(CharPoly::from_model).map(|c| (c, "recurrence")));

    let mut roots = None;
    let mut dynamical = None;
    let mut charpoly_section_out = None;
    let mut case = None;
    let mut lambda1 = None;
    let mut ratio_check = None;
    if let Some((cp, source)) = chosen {
        let analysis = classify_roots(&cp, &tol);
        let form = match &model {
            Some(m) if cp.matches_model(m) => closed_form(&cp, m.seed()).ok(),
            _ => analysis.closed_form.clone(),
        };
        charpoly_section_out = Some(charpoly_section(
            &cp,
            source,
            model.as_ref().map(|m| cp.matches_model(m)),
            &analysis,
            form.as_ref(),
        ));
        case = Some(case_label(&analysis));
        if let Ok(dd) = dynamical_degree(&cp, &tol, opts.ratio_n) {
            lambda1 = Some(lambda1_section(&dd, status));
            ratio_check = Some(ratio_section(&dd));
            dynamical = Some(dd);
        }
        roots = Some(analysis);
    }
    let recurrence = model
        .as_ref()
        .zip(prediction.as_ref())
        .map(|(m, p)| recurrence_section(m, p, status));
    let t_degdyn = clock.elapsed();

    let exhausted = naive.stopped_on_budget() && h0.is_none();
    let report = AnalysisReport {
        map: map_section(map, vars, spec_hash),
        degrees,
        stripped: stripped_rows(&naive, vars),
        n0: h0.as_ref().map(|(_, n0)| *n0),
        h0: h0_section,
        recurrence,
        charpoly: charpoly_section_out,
        case,
        lambda1,
        ratio_check,
        qas,
        timings: opts.timings.then(|| Timings {
            iterate_ms: ms(t_iterate),
            recurrent_ms: ms(t_recurrent),
            structure_ms: ms(t_structure),
            degdyn_ms: ms(t_degdyn),
        }),
        budget: budget_section(&naive, horizon, exhausted),
    };
    Analysis {
        report,
        artifacts: Artifacts {
            naive,
            h0,
            recurrent,
            cross_check: cc,
            structure,
            model,
            charpoly: chosen.map(|(c, _)| c),
            roots,
            dynamical,
        },
    }
}

/// Fits a recurrence to an integer sequence and solves it when it has the
/// QAS or algebraically stable shape.
pub fn analyze_sequence(sequence: &[BigInt], tol: &BigRational, ratio_n: usize) -> RecurrenceReport {
    let mut report = RecurrenceReport {
        sequence: sequence.iter().map(|s| s.to_string()).collect(),
        recurrence: None,
        charpoly: None,
        case: None,
        lambda1: None,
        ratio_check: None,
        diagnostic: None,
    };
    let Some(model) = fit_recurrence(sequence) else {
        report.diagnostic = Some(format!(
            "no recurrence of order at most {} fits {} terms",
            sequence.len() / 2,
            sequence.len()
        ));
        return report;
    };
    let prediction = predict_sequence(&model, sequence);
    report.recurrence = Some(recurrence_section(&model, &prediction, "observational"));
    match CharPoly::from_model(&model) {
        Some(cp) => {
            let analysis = classify_roots(&cp, tol);
            let form = closed_form(&cp, model.seed()).ok();
            report.charpoly = Some(charpoly_section(&cp, "recurrence", Some(true), &analysis, form.as_ref()));
            report.case = Some(case_label(&analysis));
            match dynamical_degree(&cp, tol, ratio_n) {
                Ok(dd) => {
                    report.lambda1 = Some(lambda1_section(&dd, "observational"));
                    report.ratio_check = Some(ratio_section(&dd));
                }
                Err(e) => report.diagnostic = Some(e.to_string()),
            }
        }
        None => {
            let note = match extend_and_ratio(&model, ratio_n) {
                Ok((_, r)) => format!(
                    "recurrence is not of QAS shape; s_{ratio_n}/s_{} ~ {}",
                    ratio_n - 1,
                    r.to_f64().unwrap_or(f64::NAN)
                ),
                Err(e) => format!("recurrence is not of QAS shape; {e}"),
            };
            report.diagnostic = Some(note);
        }
    }
    report
}
