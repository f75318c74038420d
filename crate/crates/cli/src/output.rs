use std::io::Write;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::{Format, OutputArgs};

/// A command's result: a JSON document, plus a flat table for CSV output.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(&report.json)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header)?;
            for row in &report.rows {
                w.write_record(row)?;
            }
            Ok(w.into_inner().context("flushing CSV")?)
        }
    }
}

pub fn emit(report: &Report, args: &OutputArgs) -> Result<()> {
    let bytes = render(report, args.format)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
