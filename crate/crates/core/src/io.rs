//! CSV and summary writers for run artifacts.
//!
//! Floats are written with the shortest round-trip representation, so equal
//! inputs give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scene::Grid2D;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Per-cell complex raster: a grid header line, its values, then one
/// `i,j,re,im` row per cell in storage order.
pub fn write_raster(path: &Path, grid: &Grid2D, values: &[Complex64]) -> Result<()> {
    if values.len() != grid.num_cells() {
        return Err(Error::domain(format!(
            "raster has {} values for {} cells",
            values.len(),
            grid.num_cells()
        )));
    }
    let mut w = create(path)?;
    let o = grid.origin();
    writeln!(w, "n1,n2,h,origin1,origin2")?;
    writeln!(w, "{},{},{},{},{}", grid.n1(), grid.n2(), grid.h(), o[0], o[1])?;
    writeln!(w, "i,j,re,im")?;
    for (n, v) in values.iter().enumerate() {
        let (i, j) = grid.ij(n);
        writeln!(w, "{i},{j},{},{}", v.re, v.im)?;
    }
    w.flush()?;
    Ok(())
}

/// Raster contents read back by [`read_raster`].
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub n1: usize,
    pub n2: usize,
    pub h: f64,
    pub origin: [f64; 2],
    /// Values in storage order `j * n1 + i`.
    pub values: Vec<Complex64>,
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::config_at(line, format!("cannot parse {s:?}")))
}

/// Parses a file written by [`write_raster`].
pub fn read_raster(path: &Path) -> Result<Raster> {
    let text = std::fs::read_to_string(path)?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 3 || lines[0] != "n1,n2,h,origin1,origin2" || lines[2] != "i,j,re,im" {
        return Err(Error::config("not a raster file"));
    }
    let head: Vec<&str> = lines[1].split(',').collect();
    if head.len() != 5 {
        return Err(Error::config_at(2, "grid header needs five fields"));
    }
    let (n1, n2): (usize, usize) = (parse_field(head[0], 2)?, parse_field(head[1], 2)?);
    let h = parse_field(head[2], 2)?;
    let origin = [parse_field(head[3], 2)?, parse_field(head[4], 2)?];
    let mut values = vec![Complex64::new(f64::NAN, f64::NAN); n1 * n2];
    let mut seen = 0;
    for (idx, line) in lines.iter().enumerate().skip(3) {
        let no = idx + 1;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::config_at(no, "row needs i,j,re,im"));
        }
        let (i, j): (usize, usize) = (parse_field(f[0], no)?, parse_field(f[1], no)?);
        if i >= n1 || j >= n2 {
            return Err(Error::config_at(no, format!("cell ({i}, {j}) outside the grid")));
        }
        values[j * n1 + i] = Complex64::new(parse_field(f[2], no)?, parse_field(f[3], no)?);
        seen += 1;
    }
    if seen != n1 * n2 {
        return Err(Error::config(format!(
            "raster has {seen} rows for {} cells",
            n1 * n2
        )));
    }
    Ok(Raster {
        n1,
        n2,
        h,
        origin,
        values,
    })
}

/// `iteration,relative_residual`, one row per history entry.
pub fn write_residual_history(path: &Path, history: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "iteration,relative_residual")?;
    for (it, r) in history.iter().enumerate() {
        writeln!(w, "{it},{r}")?;
    }
    w.flush()?;
    Ok(())
}

/// `re,im,label` with `matrix_eig` rows followed by `symbol_point` rows.
pub fn write_spectrum(path: &Path, eigenvalues: &[Complex64], predicted: &[Complex64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "re,im,label")?;
    for z in eigenvalues {
        writeln!(w, "{},{},matrix_eig", z.re, z.im)?;
    }
    for z in predicted {
        writeln!(w, "{},{},symbol_point", z.re, z.im)?;
    }
    w.flush()?;
    Ok(())
}

/// `re,im,label` with only `symbol_point` rows.
pub fn write_symbol_points(path: &Path, predicted: &[Complex64]) -> Result<()> {
    write_spectrum(path, &[], predicted)
}

/// One sampled field component, numerical next to reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldComparisonRow {
    pub x: [f64; 2],
    pub field: &'static str,
    pub numerical: Complex64,
    pub reference: Complex64,
}

/// `x1,x2,field,re_num,im_num,re_ref,im_ref`.
pub fn write_field_comparison(path: &Path, rows: &[FieldComparisonRow]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x1,x2,field,re_num,im_num,re_ref,im_ref")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.x[0], r.x[1], r.field, r.numerical.re, r.numerical.im, r.reference.re, r.reference.im
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid2D::new([-0.3, 0.1], 0.1, 3, 2).unwrap();
        let values: Vec<Complex64> = (0..6)
            .map(|n| Complex64::new(0.1 * n as f64, -1.0 / (n as f64 + 3.0)))
            .collect();
        let path = dir.path().join("r.csv");
        write_raster(&path, &grid, &values).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("n1,n2,h,origin1,origin2\n3,2,0.1,-0.3,0.1\ni,j,re,im\n0,0,0,"));
        let r = read_raster(&path).unwrap();
        assert_eq!((r.n1, r.n2, r.h, r.origin), (3, 2, 0.1, [-0.3, 0.1]));
        assert_eq!(r.values, values);
        assert!(write_raster(&path, &grid, &values[..5]).is_err());
    }

    #[test]
    fn corrupt_raster_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(
            &path,
            "n1,n2,h,origin1,origin2\n2,1,0.1,0,0\ni,j,re,im\n0,0,1,0\n",
        )
        .unwrap();
        assert!(read_raster(&path).is_err());
        std::fs::write(
            &path,
            "n1,n2,h,origin1,origin2\n1,1,0.1,0,0\ni,j,re,im\n0,0,x,0\n",
        )
        .unwrap();
        match read_raster(&path) {
            Err(Error::Config { line: Some(4), .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tables_have_headers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("h.csv");
        write_residual_history(&p, &[1.0, 0.5]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "iteration,relative_residual\n0,1\n1,0.5\n"
        );
        let one = Complex64::new(1.0, 0.0);
        write_spectrum(&p, &[Complex64::new(2.0, -0.5)], &[one]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "re,im,label\n2,-0.5,matrix_eig\n1,0,symbol_point\n"
        );
        let row = FieldComparisonRow {
            x: [0.5, 0.0],
            field: "E1",
            numerical: one,
            reference: one,
        };
        write_field_comparison(&p, &[row]).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "x1,x2,field,re_num,im_num,re_ref,im_ref\n0.5,0,E1,1,0,1,0\n"
        );
    }

    #[test]
    fn summary_keeps_order() {
        let mut s = Summary::new();
        s.push("mode", "forward").push("iterations", 12);
        assert_eq!(s.render(), "mode = forward\niterations = 12\n");
        assert_eq!(s.get("iterations"), Some("12"));
        assert_eq!(s.get("missing"), None);
    }
}
