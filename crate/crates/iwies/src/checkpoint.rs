//! Textual policy checkpoints.
//!
//! Format: a header line
//! `iwies-theta v1 <input_dim> <hidden-dims comma-separated> <output_dim> <clip>`
//! followed by one decimal value per line in parameter-vector order (per
//! layer: weights row-major, then biases). Values are written in shortest
//! round-trip form, so a write/read cycle is bit-exact.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::policy::{MlpArchitecture, ParameterVector};
use crate::scalar::Scalar;

const MAGIC: &str = "iwies-theta";
const VERSION: &str = "v1";

/// Serialize an architecture and parameter vector to a writer.
pub fn write_checkpoint<T: Scalar, W: Write>(
    out: &mut W,
    arch: &MlpArchitecture<T>,
    theta: &ParameterVector<T>,
) -> Result<()> {
    let expected = arch.param_count();
    if theta.len() != expected {
        return Err(Error::ShapeMismatch {
            context: "checkpoint parameters",
            expected,
            actual: theta.len(),
        });
    }
    let hidden = arch
        .hidden
        .iter()
        .map(|h| h.to_string())
        .collect::<Vec<_>>()
        .join(",");
    writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {}",
        arch.input_dim, hidden, arch.output_dim, arch.action_clip
    )?;
    for v in theta.as_slice() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Parse a checkpoint from a reader.
pub fn read_checkpoint<T: Scalar, R: BufRead>(
    input: R,
) -> Result<(MlpArchitecture<T>, ParameterVector<T>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse {
            line: 1,
            message: "empty checkpoint".into(),
        })??;

    // split on single spaces: the hidden-dims field may be empty
    let fields: Vec<&str> = header.split(' ').collect();
    let header_err = |message: String| Error::Parse { line: 1, message };
    if fields.len() != 6 || fields[0] != MAGIC || fields[1] != VERSION {
        return Err(header_err(format!(
            "expected `{MAGIC} {VERSION} <in> <hidden> <out> <clip>`, got `{header}`"
        )));
    }
    let input_dim: usize = fields[2]
        .parse()
        .map_err(|_| header_err(format!("bad input dimension `{}`", fields[2])))?;
    let hidden: Vec<usize> = if fields[3].is_empty() {
        Vec::new()
    } else {
        fields[3]
            .split(',')
            .map(|h| {
                h.parse()
                    .map_err(|_| header_err(format!("bad hidden dimension `{h}`")))
            })
            .collect::<Result<_>>()?
    };
    let output_dim: usize = fields[4]
        .parse()
        .map_err(|_| header_err(format!("bad output dimension `{}`", fields[4])))?;
    let clip: T = fields[5]
        .parse()
        .map_err(|_| header_err(format!("bad clip bound `{}`", fields[5])))?;
    let arch = MlpArchitecture::new(input_dim, hidden, output_dim, clip)
        .map_err(|e| header_err(e.to_string()))?;

    let expected = arch.param_count();
    let mut values = Vec::with_capacity(expected);
    for (index, line) in lines.enumerate() {
        let line_no = index + 2;
        let line = line?;
        let v: T = line.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad parameter value `{line}`"),
        })?;
        values.push(v);
        if values.len() > expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than {expected} parameter values"),
            });
        }
    }
    if values.len() != expected {
        return Err(Error::Parse {
            line: values.len() + 2,
            message: format!("expected {expected} parameter values, got {}", values.len()),
        });
    }
    let theta = ParameterVector::new(values).map_err(|e| Error::Parse {
        line: 2,
        message: e.to_string(),
    })?;
    Ok((arch, theta))
}

/// Write a checkpoint file.
pub fn save_checkpoint<T: Scalar, P: AsRef<Path>>(
    path: P,
    arch: &MlpArchitecture<T>,
    theta: &ParameterVector<T>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_checkpoint(&mut out, arch, theta)?;
    out.flush()?;
    Ok(())
}

/// Read a checkpoint file.
pub fn load_checkpoint<T: Scalar, P: AsRef<Path>>(
    path: P,
) -> Result<(MlpArchitecture<T>, ParameterVector<T>)> {
    read_checkpoint(BufReader::new(File::open(path)?))
}
