//! The machine-readable report emitted by `test` and `fit-gpd`.
//!
//! JSON output is deterministic: object keys are sorted (serde_json's
//! default map is a BTreeMap) and floats use shortest round-trip
//! formatting, so identical inputs and flags give byte-identical bytes.

use serde_json::{json, Value};

use crate::cli::input::InputDigest;
use crate::empirics::TestReport;
use crate::gpdfit::GpdFit;
use crate::Result;

pub const REPORT_SCHEMA: &str = "cvtail-report/1";

/// GPD fit section of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct GpdFitSection {
    pub fit: GpdFit,
    /// The profile maximum sat on the search-bracket edge.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub version: String,
    pub seed: u64,
    pub reps: Option<usize>,
    pub input: InputDigest,
    pub tests: Vec<TestReport>,
    pub gpd_fit: Option<GpdFitSection>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(seed: u64, reps: Option<usize>, input: InputDigest) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            reps,
            input,
            tests: Vec::new(),
            gpd_fit: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": REPORT_SCHEMA,
            "version": self.version,
            "seed": self.seed,
            "reps": self.reps,
            "input": {
                "source": self.input.source,
                "n": self.input.n,
                "min": self.input.min,
                "max": self.input.max,
                "zeros_dropped": self.input.zeros_dropped,
            },
            "tests": self.tests.iter().map(test_json).collect::<Vec<_>>(),
            "gpd_fit": self.gpd_fit.as_ref().map(fit_json),
            "warnings": self.warnings,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let d = &self.input;
        out.push_str(&format!(
            "input: {} (n={}, min={}, max={}, zeros dropped={})\n",
            d.source, d.n, d.min, d.max, d.zeros_dropped
        ));
        for t in &self.tests {
            out.push_str(&format!("statistic: {}\n", t.statistic));
            out.push_str(&format!("observed: {}\n", t.observed));
            out.push_str(&format!("n: {}\n", t.n));
            if let Some(m) = t.m {
                out.push_str(&format!("m: {m}\n"));
            }
            if let Some(cvs) = &t.threshold_cvs {
                let joined = cvs.iter().map(|c| format!("{c:.3}")).collect::<Vec<_>>().join(", ");
                out.push_str(&format!("threshold cvs: {{{joined}}}\n"));
            }
            match (t.p_value(), t.p_method()) {
                (Some(p), Some(method)) => {
                    out.push_str(&format!("p-value: {p} ({})\n", method.token()));
                }
                _ => out.push_str("p-value: not computed\n"),
            }
        }
        if let Some(section) = &self.gpd_fit {
            let f = &section.fit;
            out.push_str(&format!("xi: {}\n", f.xi));
            out.push_str(&format!("beta: {}\n", f.beta));
            if f.xi != 0.0 {
                out.push_str(&format!("power of tail (1/xi): {}\n", 1.0 / f.xi));
            }
            match f.implied_cv {
                Some(cv) => out.push_str(&format!("implied residual cv: {cv}\n")),
                None => out.push_str("implied residual cv: undefined (xi >= 1/2)\n"),
            }
            out.push_str(&format!("log-likelihood: {}\n", f.loglik));
            if section.boundary {
                out.push_str("note: profile maximum on the search boundary\n");
            }
            if f.is_non_regular() {
                out.push_str("note: xi > 1, maximum likelihood is non-regular here\n");
            }
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }

    /// CSV rendering: one row per test (threshold CVs joined with ';'),
    /// or one row for a GPD fit.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.gpd_fit.is_some() {
            w.write_record(["xi", "beta", "inv_xi", "implied_cv", "loglik", "boundary", "n", "seed"])
                .map_err(|e| crate::Error::Config(format!("csv: {e}")))?;
            if let Some(section) = &self.gpd_fit {
                let f = &section.fit;
                w.write_record([
                    format!("{}", f.xi),
                    format!("{}", f.beta),
                    if f.xi != 0.0 { format!("{}", 1.0 / f.xi) } else { String::new() },
                    f.implied_cv.map(|c| format!("{c}")).unwrap_or_default(),
                    format!("{}", f.loglik),
                    section.boundary.to_string(),
                    self.input.n.to_string(),
                    self.seed.to_string(),
                ])
                .map_err(|e| crate::Error::Config(format!("csv: {e}")))?;
            }
        } else {
            w.write_record([
                "statistic", "observed", "n", "m", "p_value", "p_method", "threshold_cvs", "seed",
            ])
            .map_err(|e| crate::Error::Config(format!("csv: {e}")))?;
            for t in &self.tests {
                w.write_record([
                    t.statistic.token(),
                    format!("{}", t.observed),
                    t.n.to_string(),
                    t.m.map(|m| m.to_string()).unwrap_or_default(),
                    t.p_value().map(|p| format!("{p}")).unwrap_or_default(),
                    t.p_method().map(|m| m.token().to_string()).unwrap_or_default(),
                    t.threshold_cvs
                        .as_ref()
                        .map(|cvs| cvs.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(";"))
                        .unwrap_or_default(),
                    self.seed.to_string(),
                ])
                .map_err(|e| crate::Error::Config(format!("csv: {e}")))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| crate::Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn test_json(t: &TestReport) -> Value {
    json!({
        "statistic": t.statistic.token(),
        "name": t.statistic.to_string(),
        "observed": t.observed,
        "n": t.n,
        "m": t.m,
        "p_value": t.p_value(),
        "p_method": t.p_method().map(|m| m.token()),
        "threshold_cvs": t.threshold_cvs,
    })
}

fn fit_json(section: &GpdFitSection) -> Value {
    let f = &section.fit;
    json!({
        "xi": f.xi,
        "beta": f.beta,
        "inv_xi": if f.xi != 0.0 { Some(1.0 / f.xi) } else { None },
        "implied_cv": f.implied_cv,
        "loglik": f.loglik,
        "boundary": section.boundary,
        "non_regular": f.is_non_regular(),
    })
}
