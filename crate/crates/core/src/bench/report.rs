//! CSV and SVG output for risk reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::experiment::{EstimatorKind, RiskReport};
use crate::error::{io_error, Result};

pub const ROWS_HEADER: &str = "scenario,n,trial,estimator,risk";
pub const AGGREGATES_HEADER: &str = "scenario,n,estimator,mean_risk,ci_halfwidth";
pub const SELECTIONS_HEADER: &str = "scenario,n,trial,chosen";

pub fn rows_csv(report: &RiskReport) -> String {
    let mut out = format!("{ROWS_HEADER}\n");
    for r in &report.rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.scenario, r.n, r.trial, r.estimator, r.risk);
    }
    out
}

pub fn aggregates_csv(report: &RiskReport) -> String {
    let mut out = format!("{AGGREGATES_HEADER}\n");
    for a in &report.aggregates {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            a.scenario, a.n, a.estimator, a.mean_risk, a.ci_halfwidth
        );
    }
    out
}

pub fn selections_csv(report: &RiskReport) -> String {
    let mut out = format!("{SELECTIONS_HEADER}\n");
    for s in &report.selections {
        let _ = writeln!(out, "{},{},{},{}", s.scenario, s.n, s.trial, s.chosen);
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

/// Writes `rows.csv`, `aggregates.csv`, `selections.csv` and one
/// `<scenario>.svg` per scenario into `dir`, returning the paths written.
pub fn emit_report(report: &RiskReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut written = vec![
        write(dir.join("rows.csv"), &rows_csv(report))?,
        write(dir.join("aggregates.csv"), &aggregates_csv(report))?,
        write(dir.join("selections.csv"), &selections_csv(report))?,
    ];
    let mut scenarios: Vec<&str> = Vec::new();
    for a in &report.aggregates {
        if !scenarios.contains(&a.scenario.as_str()) {
            scenarios.push(&a.scenario);
        }
    }
    for s in scenarios {
        written.push(write(dir.join(format!("{s}.svg")), &risk_svg(report, s))?);
    }
    Ok(written)
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn colour(e: EstimatorKind) -> &'static str {
    match e {
        EstimatorKind::Baseline => "#1f77b4",
        EstimatorKind::BestSymmetric => "#ff7f0e",
    }
}

/// Log-log plot of mean risk against `n` with Wald whiskers.
pub fn risk_svg(report: &RiskReport, scenario: &str) -> String {
    let aggs: Vec<_> = report.aggregates.iter().filter(|a| a.scenario == scenario).collect();
    let floor = aggs
        .iter()
        .map(|a| a.mean_risk)
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min)
        .min(1.0)
        * 0.5;
    let lo_y = |v: f64| v.max(floor).log10();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for a in &aggs {
        let x = (a.n as f64).log10();
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(lo_y(a.mean_risk - a.ci_halfwidth));
        y1 = y1.max(lo_y(a.mean_risk + a.ci_halfwidth));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-9 {
        x0 -= 0.1;
        x1 += 0.1;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.1;
        y1 += 0.1;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |lx: f64| LEFT + (lx - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |ly: f64| H - BOTTOM - (ly - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{scenario}: mean risk vs n (log-log, 95% Wald CI)</text>"#,
        W / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{LEFT} {TOP} V{} H{}" stroke="black" fill="none"/>"#,
        H - BOTTOM,
        W - RIGHT
    );
    let mut ns: Vec<usize> = aggs.iter().map(|a| a.n).collect();
    ns.dedup();
    for n in &ns {
        let x = px((*n as f64).log10());
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{t}" stroke="black"/><text x="{x:.2}" y="{l}" text-anchor="middle">{n}</text>"#,
            b = H - BOTTOM,
            t = H - BOTTOM + 5.0,
            l = H - BOTTOM + 18.0
        );
    }
    for k in 0..5 {
        let ly = y0 + (y1 - y0) * k as f64 / 4.0;
        let y = py(ly);
        let _ = writeln!(
            svg,
            r#"<line x1="{a}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{t}" y="{yt:.2}" text-anchor="end">{v:.3e}</text>"#,
            a = LEFT - 5.0,
            t = LEFT - 8.0,
            yt = y + 4.0,
            v = 10f64.powf(ly)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0
    );
    for (row, est) in EstimatorKind::ALL.iter().enumerate() {
        let series: Vec<_> = aggs.iter().filter(|a| a.estimator == *est).collect();
        if series.is_empty() {
            continue;
        }
        let c = colour(*est);
        let pts: Vec<String> = series
            .iter()
            .map(|a| format!("{:.2},{:.2}", px((a.n as f64).log10()), py(lo_y(a.mean_risk))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" stroke="{c}" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
        for a in &series {
            let x = px((a.n as f64).log10());
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{c}"/><circle cx="{x:.2}" cy="{:.2}" r="3" fill="{c}"/>"#,
                py(lo_y(a.mean_risk - a.ci_halfwidth)),
                py(lo_y(a.mean_risk + a.ci_halfwidth)),
                py(lo_y(a.mean_risk))
            );
        }
        let slope = report
            .slope(scenario, *est)
            .map(|s| format!("{s:.3}"))
            .unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{c}">{est} (slope {slope})</text>"#,
            LEFT + 12.0,
            TOP + 16.0 * (row as f64 + 1.0)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::experiment::RiskRow;

    #[test]
    fn empty_report_has_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let written = emit_report(&RiskReport::default(), dir.path()).unwrap();
        assert_eq!(written.len(), 3);
        assert_eq!(
            fs::read_to_string(dir.path().join("rows.csv")).unwrap(),
            format!("{ROWS_HEADER}\n")
        );
        assert_eq!(
            fs::read_to_string(dir.path().join("aggregates.csv")).unwrap(),
            format!("{AGGREGATES_HEADER}\n")
        );
    }

    #[test]
    fn single_row_report() {
        let report = RiskReport::from_rows(
            vec![RiskRow {
                scenario: "t2_g1".into(),
                n: 30,
                trial: 0,
                estimator: EstimatorKind::Baseline,
                risk: 0.125,
            }],
            vec![],
        );
        let rows = rows_csv(&report);
        assert_eq!(rows.lines().count(), 2);
        assert_eq!(rows.lines().nth(1).unwrap(), "t2_g1,30,0,baseline,0.125");
        assert_eq!(
            aggregates_csv(&report).lines().nth(1).unwrap(),
            "t2_g1,30,baseline,0.125,0"
        );
        let dir = tempfile::tempdir().unwrap();
        let written = emit_report(&report, dir.path()).unwrap();
        assert!(written.iter().any(|p| p.ends_with("t2_g1.svg")));
        let svg = fs::read_to_string(dir.path().join("t2_g1.svg")).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn io_errors_name_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_report(&RiskReport::default(), &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}
