//! Text artifacts: a manifest per run directory, and CSV and `key = value`
//! files whose single `#` header line carries the manifest's SHA-256.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Float format of every artifact: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Artifacts {
    pub dir: PathBuf,
    pub hash: String,
}

impl Artifacts {
    /// Creates `dir` and writes `manifest` into it.
    pub fn create(dir: &Path, manifest: &str) -> Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("manifest"), manifest)?;
        let hash = Sha256::digest(manifest.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self {
            dir: dir.to_path_buf(),
            hash,
        })
    }

    fn header(&self) -> String {
        format!("# manifest_sha256 = {}\n", self.hash)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write_text(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, format!("{}{body}", self.header()))?;
        Ok(path)
    }

    pub fn write_csv(&self, name: &str, columns: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
        let mut body = columns.join(",");
        body.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_float(*x)).collect();
            body.push_str(&cells.join(","));
            body.push('\n');
        }
        self.write_text(name, &body)
    }
}

fn missing(path: &Path, e: std::io::Error) -> Error {
    Error::MissingPrerequisite(format!("cannot read {}: {e}", path.display()))
}

/// Column names and rows of an artifact CSV.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path).map_err(|e| missing(path, e))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let columns: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if row.len() != columns.len() {
            return Err(Error::Config(format!("{}: ragged row", path.display())));
        }
        rows.push(row);
    }
    Ok((columns, rows))
}

/// `key = value` pairs of an artifact report.
pub fn read_report(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| missing(path, e))?;
    Ok(text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

/// Radial columns `R0, R1, …` of an orbital CSV, checked against `grid`.
pub fn read_orbital_columns(path: &Path, grid: &RadialGrid) -> Result<Vec<Vec<f64>>> {
    let (columns, rows) = read_csv(path)?;
    if columns.first().map(String::as_str) != Some("r") {
        return Err(Error::Config(format!("{}: first column must be r", path.display())));
    }
    if rows.len() != grid.len() || rows.iter().zip(grid.r()).any(|(row, r)| (row[0] - r).abs() > 1e-12 * r) {
        return Err(Error::MissingPrerequisite(format!(
            "{} was written on a different grid",
            path.display()
        )));
    }
    Ok((1..columns.len()).map(|j| rows.iter().map(|row| row[j]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::default_grid;

    #[test]
    fn header_carries_the_manifest_hash() {
        let dir = tempfile::tempdir().unwrap();
        let art = Artifacts::create(dir.path(), "abc").unwrap();
        assert_eq!(art.hash, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let path = art.write_text("x.report", "k = 1\n").unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert_eq!(text, format!("# manifest_sha256 = {}\nk = 1\n", art.hash));
        assert_eq!(fs::read_to_string(dir.path().join("manifest")).unwrap(), "abc");
    }

    #[test]
    fn csv_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let art = Artifacts::create(dir.path(), "m").unwrap();
        let rows = vec![vec![0.1, -1.0 / 3.0], vec![1e-300, f64::MAX]];
        let path = art.write_csv("t.csv", &["a", "b"], &rows).unwrap();
        let (columns, back) = read_csv(&path).unwrap();
        assert_eq!(columns, ["a", "b"]);
        assert_eq!(back, rows);
    }

    #[test]
    fn reports_parse_as_key_value_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let art = Artifacts::create(dir.path(), "m").unwrap();
        let path = art.write_text("r.report", "a = 1\nno separator\nb = x y\n").unwrap();
        let map = read_report(&path).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map["b"], "x y");
    }

    #[test]
    fn orbital_columns_must_match_the_grid() {
        let dir = tempfile::tempdir().unwrap();
        let art = Artifacts::create(dir.path(), "m").unwrap();
        let g = default_grid();
        let rows: Vec<Vec<f64>> = g.r().iter().map(|r| vec![*r, 2.0 * r]).collect();
        let path = art.write_csv("o.csv", &["r", "R0"], &rows).unwrap();
        assert_eq!(read_orbital_columns(&path, &g).unwrap()[0][3], 2.0 * g.r()[3]);
        let other = crate::grid::make_log_grid(100, 1e-4, 40.0).unwrap();
        assert!(matches!(read_orbital_columns(&path, &other), Err(Error::MissingPrerequisite(_))));
        assert!(matches!(read_csv(&dir.path().join("absent.csv")), Err(Error::MissingPrerequisite(_))));
    }
}
