//! CSV and JSON export.
//!
//! Trajectory CSV columns, in this order:
//! `t,E,E_star,D,kinetic,potential_linear,potential_kirchhoff,thermal,S`.
//! Floats carry 17 significant digits so values round-trip exactly.

use std::io::{self, BufRead, Write};

use crate::diagnostics::EnergyRecord;
use crate::error::{Error, Result};

pub const TRAJECTORY_HEADER: &str =
    "t,E,E_star,D,kinetic,potential_linear,potential_kirchhoff,thermal,S";

/// `{:.16e}` with negative zero printed as zero.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn write_trajectory_csv<W: Write>(records: &[EnergyRecord], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in records {
        let row = [
            r.t,
            r.energy,
            r.higher_energy,
            r.dissipation,
            r.kinetic,
            r.potential_linear,
            r.potential_kirchhoff,
            r.thermal,
            r.grad_norm_sq,
        ];
        let line: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

/// Read back a trajectory CSV written by [`write_trajectory_csv`]. The
/// accumulated-dissipation field is not part of the file and reads as 0.
pub fn read_trajectory_csv<R: BufRead>(r: R) -> Result<Vec<EnergyRecord>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::invalid("empty trajectory CSV"))?;
    if header.trim() != TRAJECTORY_HEADER {
        return Err(Error::invalid(format!("unexpected CSV header `{header}`")));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("CSV row {}: {e}", i + 2)))?;
        if vals.len() != 9 {
            return Err(Error::invalid(format!(
                "CSV row {} has {} columns, expected 9",
                i + 2,
                vals.len()
            )));
        }
        out.push(EnergyRecord {
            t: vals[0],
            energy: vals[1],
            higher_energy: vals[2],
            dissipation: vals[3],
            kinetic: vals[4],
            potential_linear: vals[5],
            potential_kirchhoff: vals[6],
            thermal: vals[7],
            grad_norm_sq: vals[8],
            dissipated: 0.0,
        });
    }
    Ok(out)
}
