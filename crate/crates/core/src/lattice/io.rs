//! Region files: JSON lines, one `{"x":..,"y":..,"z":..}` object per site,
//! in canonical order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{LatticeError, Provenance, Region, Site};

pub fn write_region<W: Write>(region: &Region, mut out: W) -> Result<(), LatticeError> {
    for s in region.iter() {
        writeln!(out, "{{\"x\":{},\"y\":{},\"z\":{}}}", s.x(), s.y(), s.z())?;
    }
    Ok(())
}

pub fn write_region_file(region: &Region, path: impl AsRef<Path>) -> Result<(), LatticeError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_region(region, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Reads a region; blank lines are skipped, parity violations rejected.
pub fn read_region<R: Read>(input: R) -> Result<Region, LatticeError> {
    let mut sites = Vec::new();
    for (n, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let site: Site = serde_json::from_str(&line).map_err(|e| LatticeError::Format {
            line: n + 1,
            message: e.to_string(),
        })?;
        sites.push(site);
    }
    Region::new(sites, Provenance::Explicit)
}

pub fn read_region_file(path: impl AsRef<Path>) -> Result<Region, LatticeError> {
    read_region(File::open(path)?)
}
