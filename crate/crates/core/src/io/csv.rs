//! Diagnostics time series as CSV.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::diagnostics::record::{DiagnosticsRecord, CSV_COLUMNS};
use crate::error::{Error, Result};

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("CSV: {other:?}")),
    }
}

/// Streams records to any writer, header first.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(w);
        inner.write_record(CSV_COLUMNS).map_err(csv_err)?;
        Ok(CsvSink { inner })
    }

    pub fn push(&mut self, r: &DiagnosticsRecord) -> Result<()> {
        self.inner
            .write_record(r.values().iter().map(|v| format!("{v:.16e}")))
            .map_err(csv_err)?;
        // rows must survive an aborted run
        self.inner.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

impl CsvSink<File> {
    pub fn create(path: &Path) -> Result<Self> {
        Self::new(File::create(path)?)
    }
}

pub fn records_to_string(records: &[DiagnosticsRecord]) -> Result<String> {
    let mut sink = CsvSink::new(Vec::new())?;
    for r in records {
        sink.push(r)?;
    }
    Ok(String::from_utf8(sink.into_inner()?).expect("CSV is ASCII"))
}

pub fn parse_records(text: &str) -> Result<Vec<DiagnosticsRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_err)?;
    if header.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    rdr.records()
        .enumerate()
        .map(|(i, row)| {
            let row = row.map_err(csv_err)?;
            let line = row.iter().collect::<Vec<_>>().join(",");
            DiagnosticsRecord::from_csv_row(&line)
                .ok_or_else(|| Error::Config(format!("malformed CSV row {}", i + 2)))
        })
        .collect()
}

pub fn read_records(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    parse_records(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::grid::GridSpec;

    #[test]
    fn round_trip() {
        let g = GridSpec::new(8, 8.0, 1.0).unwrap();
        let r0 = DiagnosticsRecord::compute(&SpectralField::zeros(&g, 3), 0.0, 1.0, 1.0, None).unwrap();
        let mut r1 = r0;
        r1.t = 0.1;
        r1.l2_v = 1.0 / 3.0;
        let text = records_to_string(&[r0, r1]).unwrap();
        assert!(text.starts_with("t,l2_v,l2_grad_v,sqrt_t_l2_grad_v,"));
        assert_eq!(text.lines().count(), 3);
        let back = parse_records(&text).unwrap();
        assert_eq!(back[1].values(), r1.values());
    }
}
