use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;

/// Full-precision decimal (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Render a table with a fixed header row.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

/// Artifact sink for one run. Writes happen in call order from one thread.
pub struct Sink {
    dir: PathBuf,
    csv: bool,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, csv: bool) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            csv,
            written: Vec::new(),
        })
    }

    pub fn text(&mut self, name: &str, content: &str) -> anyhow::Result<()> {
        let p = self.dir.join(name);
        fs::write(&p, content).with_context(|| format!("writing {}", p.display()))?;
        self.written.push(p);
        Ok(())
    }

    /// Returns the table text so callers can render from it.
    pub fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<String> {
        let s = csv_string(header, rows)?;
        if self.csv {
            self.text(name, &s)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, std::f64::consts::PI, -1e-300, 12345.678901234567] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn table_has_header() {
        let s = csv_string(&["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(s, "a,b\n1,2\n");
    }
}
