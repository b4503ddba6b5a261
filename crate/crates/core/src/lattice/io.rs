//! CSV export of lattice data: one row per point, coordinates first.

use std::io::Write;

use super::Lattice;
use crate::error::{Error, Result};

const AXIS_NAMES: [&str; 4] = ["t", "x", "y", "z"];

/// Writes the lattice coordinates followed by the named columns.
pub fn write_csv<W: Write>(writer: W, lattice: &Lattice, columns: &[(&str, &[f64])]) -> Result<()> {
    if columns.iter().any(|(_, c)| c.len() != lattice.len()) {
        return Err(Error::LatticeMismatch);
    }
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> =
        AXIS_NAMES[..lattice.ndim()].iter().copied().chain(columns.iter().map(|(n, _)| *n)).collect();
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for (i, multi) in lattice.indices() {
        row.clear();
        for a in 0..lattice.ndim() {
            row.push(format!("{:.16e}", lattice.coord(a, multi[a])));
        }
        for (_, c) in columns {
            row.push(format!("{:.16e}", c[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_rows() {
        let l = Lattice::new(vec![0.0, 1.0], vec![0.5, 0.25], vec![5, 5]).unwrap();
        let vals: Vec<f64> = (0..25).map(|i| i as f64).collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &l, &[("u", &vals)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x,u");
        assert_eq!(lines.len(), 26);
        assert!(lines[2].starts_with("0.0000000000000000e0,1.2500000000000000e0,1.0"));
    }
}
