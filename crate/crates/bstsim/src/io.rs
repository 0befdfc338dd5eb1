//! CSV and JSON emission.
//!
//! CSV streams use LF line endings, write their header eagerly and flush
//! after every data row, so an interrupted run leaves a valid prefix on
//! disk. JSON documents are pretty-printed with a trailing newline.

use std::io::Write;

use serde::Serialize;

use crate::analysis::FringeTraceRow;
use crate::error::{Error, Result};
use crate::oracle::{DistributionTable, StatValue};
use crate::profile::TrajectoryRecord;

/// Streaming writer for the trajectory schema
/// `n,H,h,F,R_height,R_saturation`; recentred cells are left empty when
/// absent.
pub struct TrajectoryCsvWriter<W: Write> {
    sink: W,
}

impl<W: Write> TrajectoryCsvWriter<W> {
    pub fn new(mut sink: W) -> Result<Self> {
        sink.write_all(b"n,H,h,F,R_height,R_saturation\n")?;
        sink.flush()?;
        Ok(TrajectoryCsvWriter { sink })
    }

    pub fn record(&mut self, record: &TrajectoryRecord) -> Result<()> {
        let r_h = record.r_height.map(fmt_float).unwrap_or_default();
        let r_s = record.r_saturation.map(fmt_float).unwrap_or_default();
        writeln!(
            self.sink,
            "{},{},{},{},{},{}",
            record.n, record.height, record.saturation, record.fringe, r_h, r_s
        )?;
        self.sink.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.sink
    }
}

/// Write a complete trajectory in one call.
pub fn write_trajectory_csv<W: Write>(sink: W, records: &[TrajectoryRecord]) -> Result<()> {
    let mut writer = TrajectoryCsvWriter::new(sink)?;
    for record in records {
        writer.record(record)?;
    }
    Ok(())
}

/// Write fringe-trace rows under the schema `n,F,F_minus1,F_minus2`.
/// Rows must carry a three-level window.
pub fn write_fringe_csv<W: Write>(mut sink: W, rows: &[FringeTraceRow]) -> Result<()> {
    sink.write_all(b"n,F,F_minus1,F_minus2\n")?;
    sink.flush()?;
    for row in rows {
        if row.window.len() != 3 {
            return Err(Error::invalid(format!(
                "fringe CSV rows need a three-level window, got {}",
                row.window.len()
            )));
        }
        writeln!(
            sink,
            "{},{},{},{}",
            row.n, row.window[0], row.window[1], row.window[2]
        )?;
        sink.flush()?;
    }
    Ok(())
}

/// Write limit samples under the schema `sample_index,value`.
pub fn write_zeta_csv<W: Write>(mut sink: W, samples: &[f64]) -> Result<()> {
    sink.write_all(b"sample_index,value\n")?;
    sink.flush()?;
    for (i, v) in samples.iter().enumerate() {
        writeln!(sink, "{},{}", i, fmt_float(*v))?;
        sink.flush()?;
    }
    Ok(())
}

/// Shortest round-trip decimal form; stable across runs.
fn fmt_float(v: f64) -> String {
    format!("{v}")
}

#[derive(Serialize)]
struct TableEntryJson {
    value: serde_json::Value,
    p: String,
}

#[derive(Serialize)]
struct TableJson<'a> {
    n: u64,
    statistic: &'a str,
    entries: Vec<TableEntryJson>,
}

/// Render an exact distribution table as JSON with probabilities kept as
/// rational strings, e.g. `{"n":4,"statistic":"H","entries":[{"value":2,
/// "p":"1/3"},{"value":3,"p":"2/3"}]}`.
pub fn distribution_table_json(table: &DistributionTable) -> String {
    let entries = table
        .entries
        .iter()
        .map(|(value, p)| TableEntryJson {
            value: match *value {
                StatValue::Scalar(v) => serde_json::json!(v),
                StatValue::Triple(h, s, f) => serde_json::json!([h, s, f]),
            },
            p: p.to_string(),
        })
        .collect();
    let doc = TableJson {
        n: table.n,
        statistic: table.statistic.label(),
        entries,
    };
    to_pretty_string(&doc)
}

/// Pretty-print any serializable document with a trailing newline.
pub fn to_pretty_string<T: Serialize>(doc: &T) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("serializable document");
    text.push('\n');
    text
}

/// Write any serializable document as pretty JSON.
pub fn write_json<W: Write, T: Serialize>(mut sink: W, doc: &T) -> Result<()> {
    sink.write_all(to_pretty_string(doc).as_bytes())?;
    sink.flush()?;
    Ok(())
}
