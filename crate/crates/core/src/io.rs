//! CSV serialisation of sampled paths.
//!
//! Real paths use the header `t,value`, planar paths `t,re,im`. Numbers are
//! written with 17 significant digits so a round trip is lossless.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Grid, PathValue, SampledPath};

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_path<V: PathValue, W: Write>(path: &SampledPath<V>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t"];
    header.extend_from_slice(V::COLUMNS);
    w.write_record(&header)?;
    let mut cols = Vec::with_capacity(V::COLUMNS.len());
    for (&t, &v) in path.times().iter().zip(path.values()) {
        cols.clear();
        v.push_columns(&mut cols);
        let mut rec = vec![fmt(t)];
        rec.extend(cols.iter().map(|&c| fmt(c)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_path<V: PathValue, R: Read>(input: R) -> Result<SampledPath<V>> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = r.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("t")
        .chain(V::COLUMNS.iter().copied())
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Malformed(format!(
            "expected header `{}`, got `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut cols = Vec::with_capacity(expected.len());
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        cols.clear();
        for field in rec.iter() {
            let x: f64 = field.parse().map_err(|_| {
                Error::Malformed(format!("row {}: `{field}` is not a number", line + 1))
            })?;
            cols.push(x);
        }
        if cols.len() != expected.len() {
            return Err(Error::Malformed(format!(
                "row {}: wrong column count",
                line + 1
            )));
        }
        times.push(cols[0]);
        values.push(V::from_columns(&cols[1..]).expect("column count checked"));
    }
    SampledPath::new(Grid::new(times)?, values)
}

pub fn save_path<V: PathValue>(path: &SampledPath<V>, file: impl AsRef<Path>) -> Result<()> {
    write_path(path, File::create(file)?)
}

pub fn load_path<V: PathValue>(file: impl AsRef<Path>) -> Result<SampledPath<V>> {
    read_path(File::open(file)?)
}
