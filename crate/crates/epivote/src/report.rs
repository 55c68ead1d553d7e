// Copyright 2026 The epivote Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! CSV and JSON report sinks.
//!
//! Columns are `id, metric, value, log10, method, context`. Values are
//! written as `{:.16e}`, which is enough digits to parse back to the same
//! `f64`.

use std::io::Write;

use epivote_core::simulate::ReportRow;
use serde::Serialize;

use crate::error::CliError;

pub const COLUMNS: [&str; 6] = ["id", "metric", "value", "log10", "method", "context"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

#[derive(Serialize)]
struct JsonRow<'a> {
    id: &'a str,
    metric: &'a str,
    value: String,
    log10: Option<String>,
    method: &'a str,
    context: &'a str,
}

pub fn write_rows<W: Write>(rows: &[ReportRow], format: Format, out: W) -> Result<(), CliError> {
    let err = |e: &dyn std::fmt::Display| CliError::Output(e.to_string());
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(COLUMNS).map_err(|e| err(&e))?;
            for r in rows {
                let log10 = r.log10.map(format_value).unwrap_or_default();
                w.write_record([
                    r.id.as_str(),
                    r.metric.as_str(),
                    &format_value(r.value),
                    &log10,
                    r.method.as_str(),
                    r.context.as_str(),
                ])
                .map_err(|e| err(&e))?;
            }
            w.flush().map_err(|e| err(&e))
        }
        Format::Json => {
            let json: Vec<JsonRow> = rows
                .iter()
                .map(|r| JsonRow {
                    id: &r.id,
                    metric: &r.metric,
                    value: format_value(r.value),
                    log10: r.log10.map(format_value),
                    method: &r.method,
                    context: &r.context,
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &json).map_err(|e| err(&e))?;
            writeln!(out).map_err(|e| err(&e))
        }
    }
}

/// Reads a CSV report back into rows.
pub fn read_csv(text: &str) -> Result<Vec<ReportRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Output(e.to_string()))?;
        let num = |s: &str| -> Result<f64, CliError> {
            s.parse()
                .map_err(|_| CliError::Output(format!("bad number `{s}`")))
        };
        rows.push(ReportRow {
            id: rec[0].to_string(),
            metric: rec[1].to_string(),
            value: num(&rec[2])?,
            log10: if rec[3].is_empty() {
                None
            } else {
                Some(num(&rec[3])?)
            },
            method: rec[4].to_string(),
            context: rec[5].to_string(),
        });
    }
    Ok(rows)
}
