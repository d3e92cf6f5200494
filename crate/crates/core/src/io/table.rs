//! CSV tables for phase diagrams and traces.
//!
//! Files are plain RFC-4180 with a single header row. Floats are written with
//! `Display`, which round-trips exactly. Failed cells have empty fields.

use std::io::{Read, Write};

use crate::error::{DtcError, Result};
use crate::sweep::PhaseDiagram;

use super::{tag_label, TraceResult};

pub const DIAGRAM_HEADER: [&str; 5] = ["x_param", "y_param", "value", "stderr", "n_realizations"];
pub const TRACE_HEADER: [&str; 8] = ["period", "tag", "time", "site", "x", "y", "z", "length"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per cell, y-major, x varying fastest.
pub fn write_diagram_csv<W: Write>(diagram: &PhaseDiagram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGRAM_HEADER)?;
    let n = diagram.n_realizations.to_string();
    for (iy, y) in diagram.y_values.iter().enumerate() {
        for (ix, x) in diagram.x_values.iter().enumerate() {
            w.write_record([
                x.to_string(),
                y.to_string(),
                opt(diagram.value(ix, iy)),
                opt(diagram.stderr_at(ix, iy)),
                n.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A row read back from a diagram CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagramRow {
    pub x: f64,
    pub y: f64,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub n_realizations: usize,
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    rec.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| DtcError::Config(format!("bad field {} on CSV line {line}", i + 1)))
}

fn parse_opt(rec: &csv::StringRecord, i: usize, line: usize) -> Result<Option<f64>> {
    match rec.get(i) {
        Some("") => Ok(None),
        _ => parse_field(rec, i, line).map(Some),
    }
}

pub fn read_diagram_csv<R: Read>(input: R) -> Result<Vec<DiagramRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(DIAGRAM_HEADER) {
        return Err(DtcError::Config("unexpected diagram CSV header".into()));
    }
    r.records()
        .enumerate()
        .map(|(k, rec)| {
            let rec = rec?;
            let line = k + 2;
            Ok(DiagramRow {
                x: parse_field(&rec, 0, line)?,
                y: parse_field(&rec, 1, line)?,
                value: parse_opt(&rec, 2, line)?,
                stderr: parse_opt(&rec, 3, line)?,
                n_realizations: parse_field(&rec, 4, line)?,
            })
        })
        .collect()
}

/// Long format: one row per (sample, site).
pub fn write_trace_csv<W: Write>(trace: &TraceResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for row in &trace.rows {
        let [x, y, z] = row.vector;
        w.write_record([
            row.period.to_string(),
            tag_label(row.tag),
            row.time.to_string(),
            row.site.to_string(),
            x.to_string(),
            y.to_string(),
            z.to_string(),
            row.length().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column series, e.g. area fraction against pulse count.
pub fn write_series_csv<W: Write>(
    x_name: &str,
    y_name: &str,
    points: &[(f64, f64)],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([x_name, y_name])?;
    for (x, y) in points {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::SampleTag;
    use crate::io::TraceRow;
    use crate::sweep::{CellDiagnostic, Provenance, SweepParam};

    fn diagram() -> PhaseDiagram {
        let plan = crate::presets::preset("fig6a").unwrap().sweep.unwrap();
        PhaseDiagram {
            x_param: SweepParam::JMean,
            x_values: vec![0.0, 0.1 + 0.2],
            y_param: SweepParam::Epsilon,
            y_values: vec![0.5],
            values: vec![Some(1.0 / 3.0), None],
            stderr: vec![Some(1e-17), None],
            n_realizations: 7,
            diagnostics: vec![CellDiagnostic {
                x_index: 1,
                y_index: 0,
                message: "x".into(),
            }],
            provenance: Provenance {
                plan,
                master_seed: 1,
                version: "0".into(),
            },
        }
    }

    #[test]
    fn diagram_round_trips_bit_exact() {
        let d = diagram();
        let mut buf = Vec::new();
        write_diagram_csv(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x_param,y_param,value,stderr,n_realizations\n"));
        assert!(text.contains("0.30000000000000004,0.5,,,7"));
        let rows = read_diagram_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].value, Some(1.0 / 3.0));
        assert_eq!(rows[0].stderr, Some(1e-17));
        assert_eq!(rows[1].x, 0.1 + 0.2);
        assert_eq!(rows[1].value, None);
    }

    #[test]
    fn trace_rows_carry_tags() {
        let trace = TraceResult {
            rows: vec![TraceRow {
                period: 3,
                tag: SampleTag::PrePulse,
                time: 3.0,
                site: 1,
                vector: [0.0, 0.6, 0.8],
            }],
            realizations: 1,
            max_norm_error: 0.0,
        };
        let mut buf = Vec::new();
        write_trace_csv(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "3,pre,3,1,0,0.6,0.8,1");
    }
}
