use std::path::Path;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::c64;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

fn records(text: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = vec![];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::InvalidInput(format!("CSV: {e}")))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Square complex matrix from rows of interleaved `re,im` pairs.
pub fn parse_matrix_csv(text: &str) -> Result<Mat<c64>> {
    let mut rows: Vec<Vec<c64>> = vec![];
    for (line, cells) in records(text)? {
        let nums: std::result::Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
        let nums = nums.map_err(|e| Error::InvalidInput(format!("matrix line {line}: {e}")))?;
        if nums.len() % 2 != 0 {
            return Err(Error::InvalidInput(format!("matrix line {line}: odd number of values, expected re,im pairs")));
        }
        rows.push(nums.chunks(2).map(|p| c64::new(p[0], p[1])).collect());
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput("matrix file has no rows".into()));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::InvalidInput(format!("matrix row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn read_matrix_csv(path: &Path) -> Result<Mat<c64>> {
    parse_matrix_csv(&read(path)?)
}

pub fn format_matrix_csv(m: &Mat<c64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let cells: Vec<String> = (0..m.ncols()).map(|j| format!("{:?},{:?}", m[(i, j)].re, m[(i, j)].im)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Sampled potential with columns `x,v` (header optional), sorted by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPotential {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl SampledPotential {
    /// Piecewise-linear interpolation, constant beyond the end samples.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return self.v[0];
        }
        if x >= self.x[n - 1] {
            return self.v[n - 1];
        }
        let j = self.x.partition_point(|xi| *xi <= x);
        let (x0, x1) = (self.x[j - 1], self.x[j]);
        let t = (x - x0) / (x1 - x0);
        self.v[j - 1] * (1.0 - t) + self.v[j] * t
    }
}

pub fn parse_potential_csv(text: &str) -> Result<SampledPotential> {
    let mut pts = vec![];
    for (line, cells) in records(text)? {
        if pts.is_empty() && cells.first().is_some_and(|c| c.parse::<f64>().is_err()) {
            if cells != ["x", "v"] {
                return Err(Error::InvalidInput(format!("potential line {line}: expected header `x,v`")));
            }
            continue;
        }
        if cells.len() != 2 {
            return Err(Error::InvalidInput(format!("potential line {line}: expected two columns x,v")));
        }
        let parse = |c: &str| c.parse::<f64>().map_err(|e| Error::InvalidInput(format!("potential line {line}: {e}")));
        pts.push((parse(&cells[0])?, parse(&cells[1])?));
    }
    if pts.is_empty() {
        return Err(Error::InvalidInput("potential file has no samples".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidInput("potential file repeats an x value".into()));
    }
    let (x, v) = pts.into_iter().unzip();
    Ok(SampledPotential { x, v })
}

pub fn read_potential_csv(path: &Path) -> Result<SampledPotential> {
    parse_potential_csv(&read(path)?)
}
