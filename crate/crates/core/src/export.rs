//! Comma-separated tables for plotting. Header row, `.` decimal point,
//! shortest round-trip float formatting.

use std::io::Write;

use crate::error::Result;
use crate::network::ThreePortZ;
use crate::sparams::ThreePortS;

const UPPER: [(usize, usize, &str); 6] = [
    (0, 0, "11"),
    (0, 1, "12"),
    (0, 2, "13"),
    (1, 1, "22"),
    (1, 2, "23"),
    (2, 2, "33"),
];

/// Formats a float for CSV; infinities become `-inf` / `inf`.
pub fn csv_number(x: f64) -> String {
    if x.is_infinite() {
        if x < 0.0 {
            "-inf".into()
        } else {
            "inf".into()
        }
    } else {
        format!("{x:e}")
    }
}

/// Upper triangle of Z as real/imaginary pairs.
pub fn write_z_csv<W: Write>(sweep: &[ThreePortZ], mut out: W) -> Result<()> {
    let mut header = String::from("frequency_hz");
    for (_, _, tag) in UPPER {
        header.push_str(&format!(",z{tag}_re,z{tag}_im"));
    }
    writeln!(out, "{header}")?;
    for z in sweep {
        let mut row = csv_number(z.frequency);
        for (i, j, _) in UPPER {
            let v = z.z[(i, j)];
            row.push(',');
            row.push_str(&csv_number(v.re));
            row.push(',');
            row.push_str(&csv_number(v.im));
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// |S21| and |S31| in dB, optionally followed by every S entry.
pub fn write_s_csv<W: Write>(sweep: &[ThreePortS], full: bool, mut out: W) -> Result<()> {
    let mut header = String::from("frequency_hz,s21_db,s31_db");
    if full {
        for i in 1..=3 {
            for j in 1..=3 {
                header.push_str(&format!(",s{i}{j}_re,s{i}{j}_im"));
            }
        }
    }
    writeln!(out, "{header}")?;
    for s in sweep {
        let mut row = format!(
            "{},{},{}",
            csv_number(s.frequency),
            csv_number(s.s21_db()),
            csv_number(s.s31_db())
        );
        if full {
            for v in s.s.transpose().iter() {
                row.push(',');
                row.push_str(&csv_number(v.re));
                row.push(',');
                row.push_str(&csv_number(v.im));
            }
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Generic numeric table.
pub fn write_table<W: Write>(columns: &[&str], rows: &[Vec<f64>], mut out: W) -> Result<()> {
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        let cells: Vec<String> = row.iter().map(|&x| csv_number(x)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{z_sweep, FrequencyGrid};
    use crate::physics::TsvModel;
    use crate::sparams::s_sweep;

    fn text(f: impl FnOnce(&mut Vec<u8>)) -> String {
        let mut buf = Vec::new();
        f(&mut buf);
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn z_and_s_tables() {
        let grid = FrequencyGrid::logarithmic(1e6, 1e10, 5).unwrap();
        let zs = z_sweep(&grid, &TsvModel::reference()).unwrap();
        let ss = s_sweep(&zs, 50.0).unwrap();

        let z = text(|b| write_z_csv(&zs, b).unwrap());
        let lines: Vec<&str> = z.lines().collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0].split(',').count(), 13);
        assert!(lines[0].starts_with("frequency_hz,z11_re,z11_im,z12_re"));
        let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[0], 1e6);
        assert_eq!(cells[1], zs[0].z[(0, 0)].re);

        let s = text(|b| write_s_csv(&ss, false, b).unwrap());
        assert!(s.starts_with("frequency_hz,s21_db,s31_db\n"));
        let last: Vec<f64> = s
            .lines()
            .last()
            .unwrap()
            .split(',')
            .map(|c| c.parse().unwrap())
            .collect();
        assert_eq!(last[1], ss[4].s21_db());

        let full = text(|b| write_s_csv(&ss, true, b).unwrap());
        let row: Vec<f64> = full
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|c| c.parse().unwrap())
            .collect();
        assert_eq!(row.len(), 21);
        // s21 is row-major entry (2, 1)
        assert_eq!(row[3 + 2 * 3], ss[0].s[(1, 0)].re);
    }

    #[test]
    fn infinities_are_spelled_out() {
        let t = text(|b| write_table(&["a", "b"], &[vec![0.1, f64::NEG_INFINITY]], b).unwrap());
        assert_eq!(t, "a,b\n1e-1,-inf\n");
        assert_eq!("-inf".parse::<f64>().unwrap(), f64::NEG_INFINITY);
    }
}
