use std::fs::File;
use std::io::{self, Write};

use anyhow::{Context, Result};
use aqm::experiments::Check;
use serde::Serialize;
use serde_json::Value;

use crate::{Common, Format};

#[derive(Debug, Serialize)]
pub struct Report {
    pub experiment: &'static str,
    pub config: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    /// Rows written in CSV mode. Not part of the JSON report.
    #[serde(skip)]
    pub table: Option<Table>,
}

#[derive(Debug)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(
        experiment: &'static str,
        config: impl Serialize,
        results: impl Serialize,
        checks: Vec<Check>,
    ) -> Result<Self> {
        let pass = checks.iter().all(|c| c.pass);
        Ok(Self {
            experiment,
            config: serde_json::to_value(config)?,
            results: serde_json::to_value(results)?,
            checks,
            pass,
            table: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

fn sink(common: &Common) -> Result<Box<dyn Write>> {
    Ok(match &common.out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit(common: &Common, report: &Report) -> Result<()> {
    let mut out = sink(common)?;
    match common.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            match &report.table {
                Some(t) => {
                    w.write_record(&t.header)?;
                    for row in &t.rows {
                        w.write_record(row)?;
                    }
                }
                None => {
                    for c in &report.checks {
                        w.serialize(c)?;
                    }
                }
            }
            w.flush()?;
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            eprintln!(
                "{}: {} of {} checks passed",
                report.experiment,
                report.checks.len() - failed,
                report.checks.len()
            );
        }
    }
    Ok(())
}
