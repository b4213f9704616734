//! `CHQ1` field dumps: one JSON header line followed by little-endian f64
//! payloads, one per declared field, in declaration order.

use super::{Field, GridSpec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub const DUMP_FORMAT: &str = "CHQ1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpHeader {
    pub format: String,
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub dtype: String,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dump {
    pub grid: GridSpec,
    pub fields: Vec<(String, Field)>,
}

impl Dump {
    pub fn get(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

pub fn write_dump<W: Write>(mut out: W, fields: &[(&str, &Field)]) -> Result<()> {
    let grid = match fields.first() {
        Some((_, f)) => *f.grid(),
        None => return Err(Error::Dump("no fields to write".into())),
    };
    for (_, f) in fields {
        grid.check_same(f.grid())?;
    }
    let header = DumpHeader {
        format: DUMP_FORMAT.into(),
        dim: grid.dim(),
        n: grid.n(),
        length: grid.length(),
        dtype: "f64le".into(),
        fields: fields.iter().map(|(n, _)| n.to_string()).collect(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Dump(e.to_string()))?;
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    let mut bytes = Vec::with_capacity(grid.len() * 8);
    for (_, f) in fields {
        bytes.clear();
        for v in f.values() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&bytes)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_dump<R: BufRead>(mut input: R) -> Result<Dump> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    if !line.ends_with('\n') {
        return Err(Error::Dump("header line not terminated".into()));
    }
    let header: DumpHeader = serde_json::from_str(line.trim_end_matches('\n'))
        .map_err(|e| Error::Dump(e.to_string()))?;
    if header.format != DUMP_FORMAT {
        return Err(Error::Dump(format!("unknown format {:?}", header.format)));
    }
    if header.dtype != "f64le" {
        return Err(Error::Dump(format!("unsupported dtype {:?}", header.dtype)));
    }
    let grid = GridSpec::new(header.dim, header.n, header.length)?;
    let mut buf = vec![0u8; grid.len() * 8];
    let mut fields = Vec::with_capacity(header.fields.len());
    for name in header.fields {
        input
            .read_exact(&mut buf)
            .map_err(|e| Error::Dump(format!("payload for {name:?}: {e}")))?;
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        fields.push((name, Field::from_values(grid, values)?));
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Dump("trailing bytes after payload".into()));
    }
    Ok(Dump { grid, fields })
}
