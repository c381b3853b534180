use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Lower-edge mass above which the support is reported as truncated.
pub const TRUNCATION_MASS: f64 = 1e-6;

/// A CDF given at knots `x_0 < x_1 < ...` and linearly interpolated between them.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
    source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadReport {
    pub knots: usize,
    pub first_f: f64,
    pub last_f: f64,
    /// `first_f` exceeds [`TRUNCATION_MASS`]: mass below the first knot is missing.
    pub truncated_lower: bool,
    /// `last_f < 1`: the remaining mass is placed at the last knot.
    pub truncated_upper: bool,
}

impl TabulatedCdf {
    /// Build from knot vectors; same validation as the file loader.
    pub fn new(xs: Vec<f64>, fs: Vec<f64>, source: impl Into<String>) -> Result<(Self, LoadReport)> {
        if xs.len() != fs.len() {
            return Err(Error::Tabulated { line: 0, reason: "x and F lengths differ".into() });
        }
        if xs.len() < 2 {
            return Err(Error::Tabulated { line: 0, reason: "need at least two knots".into() });
        }
        for i in 0..xs.len() {
            // header is line 1
            let line = i + 2;
            let (x, f) = (xs[i], fs[i]);
            if !x.is_finite() || !f.is_finite() {
                return Err(Error::Tabulated { line, reason: "non-finite value".into() });
            }
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Tabulated { line, reason: format!("F = {f} outside [0, 1]") });
            }
            if i > 0 {
                if x <= xs[i - 1] {
                    return Err(Error::Tabulated {
                        line,
                        reason: "x must be strictly increasing".into(),
                    });
                }
                if f < fs[i - 1] {
                    return Err(Error::Tabulated { line, reason: "F must be nondecreasing".into() });
                }
            }
        }
        let first_f = fs[0];
        let last_f = *fs.last().unwrap();
        let report = LoadReport {
            knots: xs.len(),
            first_f,
            last_f,
            truncated_lower: first_f > TRUNCATION_MASS,
            truncated_upper: last_f < 1.0,
        };
        Ok((TabulatedCdf { xs, fs, source: source.into() }, report))
    }

    /// Parse `x,F` CSV text.
    pub fn from_reader<R: Read>(reader: R, source: &str) -> Result<(Self, LoadReport)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Tabulated { line: 1, reason: e.to_string() })?
            .clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "F" {
            return Err(Error::Tabulated { line: 1, reason: "header must be `x,F`".into() });
        }
        let mut xs = Vec::new();
        let mut fs = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Tabulated { line, reason: e.to_string() })?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Tabulated { line, reason: format!("not a number: `{s}`") })
            };
            xs.push(parse(&rec[0])?);
            fs.push(parse(&rec[1])?);
        }
        Self::new(xs, fs, source)
    }

    pub fn load(path: &Path) -> Result<(Self, LoadReport)> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_reader(file, &path.display().to_string())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn support(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let j = self.xs.partition_point(|&k| k <= x);
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (f0, f1) = (self.fs[j - 1], self.fs[j]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }

    /// Smallest `x` with `cdf(x) >= u` on the interpolant.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= self.fs[0] {
            return self.xs[0];
        }
        let j = self.fs.partition_point(|&f| f < u);
        if j >= self.fs.len() {
            return *self.xs.last().unwrap();
        }
        let (x0, x1) = (self.xs[j - 1], self.xs[j]);
        let (f0, f1) = (self.fs[j - 1], self.fs[j]);
        x0 + (u - f0) * (x1 - x0) / (f1 - f0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_interpolates() {
        let text = "x,F\n0,0\n1,0.5\n3,1\n";
        let (t, rep) = TabulatedCdf::from_reader(text.as_bytes(), "mem").unwrap();
        assert!(!rep.truncated_lower);
        assert!(!rep.truncated_upper);
        assert_eq!(t.cdf(-1.0), 0.0);
        assert_eq!(t.cdf(0.5), 0.25);
        assert_eq!(t.cdf(2.0), 0.75);
        assert_eq!(t.cdf(5.0), 1.0);
        assert_eq!(t.quantile(0.75), 2.0);
        assert_eq!(t.quantile(0.25), 0.5);
    }

    #[test]
    fn flags_truncated_support() {
        let text = "x,F\n1,0.2\n2,0.9\n";
        let (_, rep) = TabulatedCdf::from_reader(text.as_bytes(), "mem").unwrap();
        assert!(rep.truncated_lower);
        assert!(rep.truncated_upper);
    }

    #[test]
    fn rejects_malformed_tables() {
        let cases = [
            ("a,b\n0,0\n1,1\n", 1),
            ("x,F\n0,0\n0,1\n", 3),
            ("x,F\n0,0.5\n1,0.4\n", 3),
            ("x,F\n0,0\n1,1.5\n", 3),
            ("x,F\n0,0\n1,abc\n", 3),
        ];
        for (text, want_line) in cases {
            match TabulatedCdf::from_reader(text.as_bytes(), "mem") {
                Err(Error::Tabulated { line, .. }) => assert_eq!(line, want_line, "{text:?}"),
                other => panic!("expected error for {text:?}, got {other:?}"),
            }
        }
    }
}
