//! CSV artifacts. Writers may prepend `# ` provenance lines, which the
//! readers skip.

use std::io::{Read, Write};

use activegm::TraceRow;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::battery::TrialReport;
use crate::error::Result;
use crate::summary::{CurveRow, EscSummary};

pub fn write_csv<W: Write, T: Serialize>(mut out: W, rows: &[T], header: &[&str], provenance: &str) -> Result<()> {
    for line in provenance.lines() {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

pub const REPORT_HEADER: [&str; 10] = [
    "algo",
    "graph",
    "seed",
    "c",
    "hamming",
    "exact",
    "scalar_total",
    "effective_samples",
    "edges_correct_fraction",
    "status",
];

pub const ESC_HEADER: [&str; 6] = ["algo", "graph", "target", "mean_esc", "trials", "censored"];

pub const CURVE_HEADER: [&str; 6] = ["algo", "graph", "c", "mean_effective_samples", "mean_hamming", "trials"];

pub const TRACE_HEADER: [&str; 6] = ["stage", "ell", "subset_size", "n_select", "n_verify", "scalar_total"];

pub fn write_reports<W: Write>(out: W, rows: &[TrialReport], provenance: &str) -> Result<()> {
    write_csv(out, rows, &REPORT_HEADER, provenance)
}

pub fn read_reports<R: Read>(input: R) -> Result<Vec<TrialReport>> {
    read_csv(input)
}

pub fn write_esc<W: Write>(out: W, rows: &[EscSummary], provenance: &str) -> Result<()> {
    write_csv(out, rows, &ESC_HEADER, provenance)
}

pub fn write_curve<W: Write>(out: W, rows: &[CurveRow], provenance: &str) -> Result<()> {
    write_csv(out, rows, &CURVE_HEADER, provenance)
}

pub fn write_trace<W: Write>(out: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.stage.to_string(),
            r.ell.to_string(),
            r.subset_size.to_string(),
            r.n_select.to_string(),
            r.n_verify.to_string(),
            r.scalar_total.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
