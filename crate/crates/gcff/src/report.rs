//! Plain-text evaluation reports: `key = value` lines followed by
//! whitespace-aligned tables, stable enough for golden-file diffs.

use std::fmt::Write as _;

use gcff_core::metrics::{CardinalityReport, EvalReport, GTM_TOLERANCES};

fn rate(v: f64) -> String {
    format!("{v:.4}")
}

fn table(out: &mut String, title: &str, rows: &[Vec<String>]) {
    let cols = rows.iter().map(|r| r.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.len()).max().unwrap_or(0))
        .collect();
    writeln!(out, "\n[{title}]").unwrap();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                if c == 0 {
                    format!("{s:<w$}", w = widths[c])
                } else {
                    format!("{s:>w$}", w = widths[c])
                }
            })
            .collect();
        writeln!(out, "{}", cells.join("  ").trim_end()).unwrap();
    }
}

/// Rows laid out with one column per group size, then the mean and
/// standard deviation.
pub fn cardinality_rows(report: &CardinalityReport) -> Vec<Vec<String>> {
    let mut head = vec!["k".to_string()];
    let mut f1 = vec!["f1".to_string()];
    let mut groups = vec!["groups".to_string()];
    for row in &report.rows {
        head.push(row.size.to_string());
        f1.push(rate(row.f1));
        groups.push(row.groups.to_string());
    }
    head.extend(["avg".to_string(), "std".to_string()]);
    f1.extend([rate(report.mean), rate(report.std)]);
    vec![head, f1, groups]
}

pub fn render(report: &EvalReport) -> String {
    let mut out = String::new();
    let kv = |out: &mut String, k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    kv(&mut out, "tolerance", rate(report.tolerance));
    kv(&mut out, "frames", report.frames.len().to_string());
    kv(&mut out, "tp", report.total.tp.to_string());
    kv(&mut out, "fp", report.total.fp.to_string());
    kv(&mut out, "fn", report.total.fn_.to_string());
    kv(&mut out, "precision", rate(report.scores.precision));
    kv(&mut out, "recall", rate(report.scores.recall));
    kv(&mut out, "f1", rate(report.scores.f1));
    if let Some((_, gtm)) = report.gtm {
        kv(&mut out, "gtm", rate(gtm));
    }

    let mut frames = vec![["frame", "tp", "fp", "fn", "precision", "recall", "f1"]
        .map(String::from)
        .to_vec()];
    for f in &report.frames {
        frames.push(vec![
            f.frame_id.clone(),
            f.counts.tp.to_string(),
            f.counts.fp.to_string(),
            f.counts.fn_.to_string(),
            rate(f.scores.precision),
            rate(f.scores.recall),
            rate(f.scores.f1),
        ]);
    }
    table(&mut out, "frames", &frames);

    if let Some((curve, _)) = report.gtm {
        let mut rows = vec![vec!["T".to_string(), "f1".to_string()]];
        for (t, f) in GTM_TOLERANCES.iter().zip(curve) {
            rows.push(vec![rate(*t), rate(f)]);
        }
        table(&mut out, "f1 by tolerance", &rows);
    }
    if let Some(card) = &report.cardinality {
        table(&mut out, "f1 by cardinality", &cardinality_rows(card));
    }
    out
}
