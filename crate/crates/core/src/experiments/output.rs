use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{ConcentrationSummary, DecompositionSummary, ExperimentError, LadderReport};

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<(), ExperimentError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Experiment outputs with a CSV form.
pub trait CsvRows {
    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<(), ExperimentError>;
}

pub fn write_csv<T: CsvRows>(path: impl AsRef<Path>, value: &T) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    value.write_rows(&mut w)?;
    w.flush()?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

impl CsvRows for ConcentrationSummary {
    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<(), ExperimentError> {
        w.write_record(["alpha", "count"])?;
        for (a, c) in &self.histogram {
            w.write_record([a.to_string(), c.to_string()])?;
        }
        Ok(())
    }
}

impl CsvRows for DecompositionSummary {
    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<(), ExperimentError> {
        w.write_record(["trial", "t", "stars", "alpha", "alpha_H", "residual"])?;
        for r in &self.records {
            w.write_record([
                r.trial_index.to_string(),
                opt(r.t),
                opt(r.star_count),
                opt(r.alpha),
                opt(r.alpha_remainder),
                opt(r.decomposition_residual),
            ])?;
        }
        Ok(())
    }
}

impl CsvRows for LadderReport {
    fn write_rows<W: Write>(&self, w: &mut csv::Writer<W>) -> Result<(), ExperimentError> {
        w.write_record(["rung", "p_i", "median", "q05", "q95"])?;
        for r in &self.per_rung {
            w.write_record([r.rung.to_string(), r.p_i.to_string(), opt(r.median), opt(r.q05), opt(r.q95)])?;
        }
        Ok(())
    }
}
