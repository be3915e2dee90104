//! Deterministic report writers: CSV tables, JSON reports that embed the
//! resolved configuration, and minimal self-contained SVG log-log plots.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;

/// Every JSON report carries the library version and the fully resolved
/// configuration, so a report file alone reproduces the run.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    version: &'static str,
    config: &'a ExperimentConfig,
    result: T,
}

pub fn ensure_dir(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

pub fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    cfg: &ExperimentConfig,
    result: T,
) -> Result<PathBuf, String> {
    let path = dir.join(format!("{name}.json"));
    let report = Report { version: elastowave::VERSION, config: cfg, result };
    let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    fs::write(&path, text + "\n").map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

/// RFC 4180 CSV with a header row; all values printed with 17 significant
/// digits so round-trips are exact.
pub fn write_table(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: &[Vec<f64>],
) -> Result<PathBuf, String> {
    let path = dir.join(format!("{name}.csv"));
    let file = File::create(&path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let mut out = BufWriter::new(file);
    let write = |out: &mut BufWriter<File>| -> std::io::Result<()> {
        writeln!(out, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        out.flush()
    };
    write(&mut out).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Log-log polyline plot of one or more positive series. Points with a
/// nonpositive coordinate are dropped (they have no log-log image).
pub fn write_loglog_svg(
    dir: &Path,
    name: &str,
    title: &str,
    series: &[(&str, &[(f64, f64)])],
) -> Result<PathBuf, String> {
    let path = dir.join(format!("{name}.svg"));
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.is_empty() {
        return Err(format!("plot {name}: no positive data"));
    }
    let (mut x0, mut x1, mut y0, mut y1) =
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    // degenerate ranges still need a visible box
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (SVG_W - 2.0 * MARGIN);
    let py = |y: f64| SVG_H - MARGIN - (y - y0) / (y1 - y0) * (SVG_H - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\" font-family=\"monospace\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#333\"/>\n",
        m = MARGIN,
        w = SVG_W - 2.0 * MARGIN,
        h = SVG_H - 2.0 * MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{title}</text>\n",
        SVG_W / 2.0,
        MARGIN / 2.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">log10 x: [{:.2}, {:.2}]</text>\n",
        SVG_W / 2.0,
        SVG_H - MARGIN / 3.0,
        x0,
        x1
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">\
         log10 y: [{:.2}, {:.2}]</text>\n",
        MARGIN / 3.0,
        SVG_H / 2.0,
        MARGIN / 3.0,
        SVG_H / 2.0,
        y0,
        y1
    ));
    for (i, (label, s)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
            .collect();
        if coords.is_empty() {
            continue;
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{label}</text>\n",
            MARGIN + 10.0,
            MARGIN + 16.0 * (i + 1) as f64
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(&path, svg).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use elastowave::ModelParams;

    #[test]
    fn csv_and_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::defaults(ModelParams::new(1.0, 2.0, 0.25, 0.75).unwrap());
        let rows = vec![vec![1.0, 2.5e-3], vec![10.0, 1.25e-4]];
        let csv = write_table(dir.path(), "series", &["t", "norm"], &rows).unwrap();
        let text = fs::read_to_string(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,norm");
        let back: Vec<f64> =
            lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(back, rows[0]);

        let json = write_json(dir.path(), "report", &cfg, serde_json::json!({"x": 1})).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
        assert_eq!(v["version"], elastowave::VERSION);
        assert_eq!(v["config"]["params"]["a"], 1.0);
        assert_eq!(v["result"]["x"], 1);
    }

    #[test]
    fn svg_plot_contains_all_series() {
        let dir = tempfile::tempdir().unwrap();
        let s1 = [(1.0, 1.0), (10.0, 0.1)];
        let s2 = [(1.0, 2.0), (10.0, 0.5)];
        let path = write_loglog_svg(
            dir.path(),
            "plot",
            "demo",
            &[("solution", &s1[..]), ("gap", &s2[..])],
        )
        .unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.contains("solution") && text.contains("gap"));
    }
}
