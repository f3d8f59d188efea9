//! Count-record CSV: header `label,count,correction`, LF line endings.

use serde::{Deserialize, Serialize};

use qfc_core::tomography::CountRecord;

use crate::CliError;

#[derive(Serialize, Deserialize)]
struct Row {
    label: String,
    count: f64,
    correction: f64,
}

pub fn write_counts(counts: &[CountRecord]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for c in counts {
        w.serialize(Row { label: c.label.clone(), count: c.count, correction: c.correction })
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

pub fn read_counts(text: &str) -> Result<Vec<CountRecord>, CliError> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| CliError::Config(format!("bad count file: {e}")))?;
    if headers.iter().collect::<Vec<_>>() != ["label", "count", "correction"] {
        return Err(CliError::Config("count file header must be `label,count,correction`".into()));
    }
    r.deserialize::<Row>()
        .map(|row| {
            let row = row.map_err(|e| CliError::Config(format!("bad count row: {e}")))?;
            Ok(CountRecord { label: row.label, count: row.count, correction: row.correction })
        })
        .collect()
}
