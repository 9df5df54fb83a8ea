use std::io::Write;

use ncindex::indexengines::{IndexReport, ReportRow};

use crate::config::OutputFormat;

/// Serialize a report. CSV carries one data row per method plus a final
/// verdict row; JSON-lines mirrors the fields; the table is aligned for
/// humans. All numeric fields use fixed formatting so identical runs emit
/// identical bytes (runtime_ms excepted, by design).
pub fn emit_report(report: &IndexReport, format: OutputFormat, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => emit_csv(report, out),
        OutputFormat::JsonLines => emit_jsonl(report, out),
        OutputFormat::Table => emit_table(report, out),
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

fn emit_csv(report: &IndexReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "model,class,method,value_re,value_im,rounded,gap,runtime_ms,verdict")?;
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},",
            r.model,
            r.class,
            r.method,
            fmt_f(r.value_re),
            fmt_f(r.value_im),
            r.rounded,
            fmt_f(r.gap),
            r.runtime_ms
        )?;
    }
    writeln!(out, ",,verdict,,,,,,{}", report.verdict())?;
    Ok(())
}

fn json_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn emit_jsonl(report: &IndexReport, out: &mut dyn Write) -> std::io::Result<()> {
    for r in &report.rows {
        writeln!(
            out,
            "{{\"model\":\"{}\",\"class\":\"{}\",\"method\":\"{}\",\"value_re\":{},\"value_im\":{},\"rounded\":{},\"gap\":{},\"runtime_ms\":{}}}",
            json_escape(&r.model),
            json_escape(&r.class),
            json_escape(&r.method),
            fmt_f(r.value_re),
            fmt_f(r.value_im),
            r.rounded,
            fmt_f(r.gap),
            r.runtime_ms
        )?;
    }
    writeln!(out, "{{\"verdict\":{}}}", report.verdict())?;
    Ok(())
}

fn emit_table(report: &IndexReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "{:<28} {:<12} {:<14} {:>16} {:>10} {:>8} {:>10}",
        "model", "class", "method", "value", "imag", "rounded", "gap"
    )?;
    for r in &report.rows {
        writeln!(
            out,
            "{:<28} {:<12} {:<14} {:>16.8} {:>10.2e} {:>8} {:>10.2e}",
            r.model, r.class, r.method, r.value_re, r.value_im, r.rounded, r.gap
        )?;
    }
    writeln!(out, "verdict: {}", if report.verdict() { "AGREE" } else { "DISAGREE" })?;
    Ok(())
}

/// Parse a CSV report back into rows (used by the round-trip checks); the
/// verdict row is returned separately.
pub fn parse_csv_report(text: &str) -> Result<(Vec<ReportRow>, bool), String> {
    let mut rows = Vec::new();
    let mut verdict = None;
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() >= 9 && parts[2] == "verdict" {
            verdict = Some(parts[8].trim() == "true");
            continue;
        }
        if parts.len() < 9 {
            return Err(format!("line {} malformed: {line:?}", i + 1));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|e| format!("line {}: {e}", i + 1));
        rows.push(ReportRow {
            model: parts[0].to_string(),
            class: parts[1].to_string(),
            method: parts[2].to_string(),
            value_re: parse_f(parts[3])?,
            value_im: parse_f(parts[4])?,
            rounded: parts[5].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            gap: parse_f(parts[6])?,
            tolerance: 0.0,
            runtime_ms: parts[7].parse().map_err(|e| format!("line {}: {e}", i + 1))?,
            diagnostics: String::new(),
        });
    }
    Ok((rows, verdict.ok_or("missing verdict row")?))
}
