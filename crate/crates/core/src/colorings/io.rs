//! Coloring files: CSV with header `x,y,z,color`, one row per site in
//! canonical order.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ColoringError, ColoringSpec};
use crate::lattice::Site;

#[derive(Serialize, Deserialize)]
struct Row {
    x: i64,
    y: i64,
    z: i64,
    color: u32,
}

fn csv_error(e: csv::Error) -> ColoringError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        kind => ColoringError::Format {
            line,
            message: format!("{kind:?}"),
        },
    }
}

pub fn write_coloring<W: Write>(colors: &BTreeMap<Site, u32>, out: W) -> Result<(), ColoringError> {
    let mut w = csv::Writer::from_writer(out);
    for (s, &color) in colors {
        w.serialize(Row {
            x: s.x(),
            y: s.y(),
            z: s.z(),
            color,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coloring_file(
    colors: &BTreeMap<Site, u32>,
    path: impl AsRef<Path>,
) -> Result<(), ColoringError> {
    write_coloring(colors, File::create(path)?)
}

/// Reads a coloring file as an explicit spec. Duplicate sites are rejected.
pub fn read_coloring<R: Read>(input: R) -> Result<ColoringSpec, ColoringError> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "y", "z", "color"] {
        return Err(ColoringError::Format {
            line: 1,
            message: "header must be `x,y,z,color`".into(),
        });
    }
    let mut map = BTreeMap::new();
    for rec in r.into_deserialize::<Row>() {
        let row = rec.map_err(csv_error)?;
        let s = Site::new(row.x, row.y, row.z)?;
        if map.insert(s, row.color).is_some() {
            return Err(ColoringError::Format {
                line: 0,
                message: format!("site {s} colored twice"),
            });
        }
    }
    Ok(ColoringSpec::Explicit(map))
}

pub fn read_coloring_file(path: impl AsRef<Path>) -> Result<ColoringSpec, ColoringError> {
    read_coloring(File::open(path)?)
}
