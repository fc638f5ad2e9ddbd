use std::io::Write;

use asymptolim::{PolySolution, SolveResult};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::run::{Outcome, Report};

/// 17 significant digits.
fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn render(report: &Report) -> Result<String, CliError> {
    match report.config.output_format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => render_csv(report),
    }
}

fn solve_row(r: &SolveResult) -> Vec<String> {
    vec![
        "limit".into(),
        r.n.to_string(),
        num(r.empirical),
        num(r.closed_form),
        num(r.abs_error),
        r.meta.clone(),
    ]
}

fn render_csv(report: &Report) -> Result<String, CliError> {
    let config = serde_json::to_string(&report.config).map_err(|e| CliError::Output(e.to_string()))?;
    let mut head = format!(
        "# asymptolim {} schema {} status {}\n# config {config}\n",
        report.version,
        report.schema,
        serde_json::to_string(&report.status).map_err(|e| CliError::Output(e.to_string()))?
    )
    .into_bytes();
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    match &report.result {
        Outcome::Solve(r) | Outcome::Poly(PolySolution::Limit(r)) => {
            w.write_record(["verdict", "n", "empirical", "closed_form", "abs_error", "meta"]).map_err(io)?;
            w.write_record(solve_row(r)).map_err(io)?;
        }
        Outcome::Poly(PolySolution::Divergent {
            n,
            n_terms,
            empirical,
            meta,
        }) => {
            w.write_record(["verdict", "n", "empirical", "closed_form", "abs_error", "meta"]).map_err(io)?;
            let meta = format!("{meta}; N(n) = {n_terms}");
            w.write_record(["divergent", &n.to_string(), &num(*empirical), "inf", "inf", &meta]).map_err(io)?;
        }
        Outcome::Probe(p) => {
            let r = &p.report;
            let mut header = vec!["n".to_string(), "sup_error".into(), "monotone_decay".into()];
            header.extend(r.grid.iter().map(|t| format!("t={}", num(*t))));
            w.write_record(&header).map_err(io)?;
            for (k, (n, row)) in r.n_list.iter().zip(&r.cdf_values).enumerate() {
                let decay = if k == 0 {
                    String::new()
                } else {
                    r.monotone_decay[k - 1].to_string()
                };
                let mut rec = vec![n.to_string(), num(r.sup_errors[k]), decay];
                rec.extend(row.iter().map(|v| num(*v)));
                w.write_record(&rec).map_err(io)?;
            }
            let mut rec = vec!["limit".to_string(), String::new(), String::new()];
            rec.extend(r.target_values.iter().map(|v| num(*v)));
            w.write_record(&rec).map_err(io)?;
            let mut rec = vec!["excluded".to_string(), String::new(), String::new()];
            rec.extend(r.excluded.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(io)?;
        }
        Outcome::Integrate(q) => {
            w.write_record(["law", "f", "lo", "hi", "value", "abs_error", "evaluations"]).map_err(io)?;
            w.write_record([
                q.law.clone(),
                q.f.to_string(),
                num(q.lo),
                num(q.hi),
                num(q.value),
                num(q.abs_error),
                q.evaluations.to_string(),
            ])
            .map_err(io)?;
        }
        Outcome::Special(s) => {
            w.write_record(["function", "value", "truncation_bound", "terms"]).map_err(io)?;
            w.write_record([
                s.function.clone(),
                num(s.value),
                s.truncation_bound.map(num).unwrap_or_default(),
                s.terms.map(|t| t.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
    }
    head.extend(w.into_inner().map_err(|e| CliError::Output(e.to_string()))?);
    String::from_utf8(head).map_err(|e| CliError::Output(e.to_string()))
}

/// Writes to the configured path, or stdout.
pub fn emit(report: &Report) -> Result<(), CliError> {
    let text = render(report)?;
    match &report.config.output_path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}
