//! CSV, 16-bit binary PGM and plain-text metadata writers.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::DensityField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Pgm(PgmScale),
    Meta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmScale {
    /// `[0, max p] → [0, 65535]`.
    Linear,
    /// `log10(p / max p)` over four decades mapped to `[0, 65535]`.
    Log,
}

const LOG_DECADES: f64 = 4.0;

pub fn export_field(field: &DensityField, format: ExportFormat, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    match format {
        ExportFormat::Csv => write_csv(field, &mut w),
        ExportFormat::Pgm(scale) => write_pgm(field, scale, &mut w),
        ExportFormat::Meta => write_meta(field, &mut w),
    }
    .and_then(|_| w.flush())
    .map_err(|e| Error::io(path, e))
}

/// Header `x_m,z_m,p`, then one sample per line in row-major order with 17
/// significant digits.
pub fn write_csv<W: Write>(field: &DensityField, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "x_m,z_m,p")?;
    let g = &field.grid;
    let xs = g.xs();
    for iz in 0..g.nz {
        let z = g.z(iz);
        for (ix, x) in xs.iter().enumerate() {
            writeln!(w, "{x:.16e},{z:.16e},{:.16e}", field.at(ix, iz))?;
        }
    }
    Ok(())
}

/// Parses a file written by [`write_csv`] into `(x, z, p)` triples.
pub fn read_csv(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if n == 0 {
            if line.trim() != "x_m,z_m,p" {
                return Err(Error::domain(format!(
                    "{}: unexpected CSV header {line:?}",
                    path.display()
                )));
            }
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::domain(format!("{}:{}: bad number {s:?}", path.display(), n + 1)))
        };
        if cols.len() != 3 {
            return Err(Error::domain(format!(
                "{}:{}: expected 3 columns",
                path.display(),
                n + 1
            )));
        }
        out.push((parse(cols[0])?, parse(cols[1])?, parse(cols[2])?));
    }
    Ok(out)
}

/// Binary P5, width `nx`, height `nz`, maxval 65535, big-endian samples.
/// The first image row is the first grid row (smallest z).
pub fn write_pgm<W: Write>(field: &DensityField, scale: PgmScale, w: &mut W) -> std::io::Result<()> {
    let g = &field.grid;
    write!(w, "P5\n{} {}\n65535\n", g.nx, g.nz)?;
    let max = field.values.iter().copied().fold(0.0f64, f64::max);
    let mut buf = Vec::with_capacity(field.values.len() * 2);
    for &p in &field.values {
        buf.extend_from_slice(&pixel(p, max, scale).to_be_bytes());
    }
    w.write_all(&buf)
}

pub(crate) fn pixel(p: f64, max: f64, scale: PgmScale) -> u16 {
    if !(max > 0.0) || !(p > 0.0) {
        return 0;
    }
    let t = match scale {
        PgmScale::Linear => p / max,
        PgmScale::Log => ((p / max).log10() + LOG_DECADES) / LOG_DECADES,
    };
    (t.clamp(0.0, 1.0) * 65535.0).round() as u16
}

/// Scenario echo, grid, extrema and fingerprints as `key = value` lines.
pub fn write_meta<W: Write>(field: &DensityField, w: &mut W) -> std::io::Result<()> {
    let g = &field.grid;
    writeln!(w, "# scenario")?;
    w.write_all(field.echo.as_bytes())?;
    writeln!(w, "# grid")?;
    writeln!(w, "grid.x_min = {:e}", g.x_min)?;
    writeln!(w, "grid.x_max = {:e}", g.x_max)?;
    writeln!(w, "grid.z_min = {:e}", g.z_min)?;
    writeln!(w, "grid.z_max = {:e}", g.z_max)?;
    writeln!(w, "grid.nx = {}", g.nx)?;
    writeln!(w, "grid.nz = {}", g.nz)?;
    writeln!(w, "# result")?;
    let e = &field.extrema;
    writeln!(w, "p_min = {:.16e}", e.min)?;
    writeln!(w, "p_max = {:.16e}", e.max)?;
    writeln!(w, "argmax_x = {:.16e}", g.x(e.argmax.0))?;
    writeln!(w, "argmax_z = {:.16e}", g.z(e.argmax.1))?;
    writeln!(w, "fingerprint = {}", field.fingerprint)?;
    writeln!(w, "values_sha256 = {}", field.values_digest())
}

#[cfg(test)]
mod tests {
    use super::super::{extrema, GridSpec};
    use super::*;

    fn field(values: Vec<f64>, nx: usize, nz: usize) -> DensityField {
        let grid = GridSpec::new(-1e-6, 1e-6, 0.0, 0.1, nx, nz).unwrap();
        DensityField {
            grid,
            extrema: extrema(&values, nx),
            values,
            fingerprint: "f".into(),
            echo: "a = 1\n".into(),
        }
    }

    #[test]
    fn zero_field_pgm() {
        let mut out = Vec::new();
        write_pgm(&field(vec![0.0; 4], 2, 2), PgmScale::Linear, &mut out).unwrap();
        assert_eq!(&out[..], b"P5\n2 2\n65535\n\0\0\0\0\0\0\0\0");
    }

    #[test]
    fn pgm_max_is_full_scale_big_endian() {
        let mut out = Vec::new();
        write_pgm(&field(vec![0.5, 2.0, 1.0, 0.0], 2, 2), PgmScale::Linear, &mut out).unwrap();
        let header = b"P5\n2 2\n65535\n".len();
        let px: Vec<u16> = out[header..]
            .chunks(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect();
        assert_eq!(px, vec![16384, 65535, 32768, 0]);
    }

    #[test]
    fn log_scale_spans_four_decades() {
        assert_eq!(pixel(1.0, 1.0, PgmScale::Log), 65535);
        assert_eq!(pixel(1e-4, 1.0, PgmScale::Log), 0);
        assert_eq!(pixel(1e-6, 1.0, PgmScale::Log), 0);
        assert_eq!(pixel(1e-2, 1.0, PgmScale::Log), 32768);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let values = vec![0.1, 1.0 / 3.0, 2.718281828459045e-30, 6.02e23, 0.0, f64::MIN_POSITIVE];
        let f = field(values.clone(), 3, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        export_field(&f, ExportFormat::Csv, &path).unwrap();
        let rows = read_csv(&path).unwrap();
        assert_eq!(rows.len(), 6);
        for (i, (x, z, p)) in rows.iter().enumerate() {
            assert_eq!(p.to_bits(), values[i].to_bits());
            assert_eq!(x.to_bits(), f.grid.x(i % 3).to_bits());
            assert_eq!(z.to_bits(), f.grid.z(i / 3).to_bits());
        }
    }

    #[test]
    fn meta_lists_fingerprint() {
        let mut out = Vec::new();
        write_meta(&field(vec![0.0, 1.0, 2.0, 3.0], 2, 2), &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.contains("a = 1\n"));
        assert!(s.contains("fingerprint = f\n"));
        assert!(s.contains("grid.nx = 2\n"));
        assert!(s.contains("values_sha256 = "));
    }

    #[test]
    fn io_errors_carry_path() {
        let f = field(vec![0.0; 4], 2, 2);
        let err = export_field(&f, ExportFormat::Csv, Path::new("/nonexistent/dir/f.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/f.csv"), "{err}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn linear_map_is_monotone(a in 0.0f64..10.0, b in 0.0f64..10.0, m in 10.0f64..100.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                prop_assert!(pixel(lo, m, PgmScale::Linear) <= pixel(hi, m, PgmScale::Linear));
                prop_assert!(pixel(lo, m, PgmScale::Log) <= pixel(hi, m, PgmScale::Log));
            }
        }
    }
}
