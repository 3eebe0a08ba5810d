//! File writers. Every file carries the tool version, the configuration
//! digest and the seed.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::Failure;

pub const TOOL: &str = "planar-dirac";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_digest: &'a str,
    pub seed: u64,
    pub result: T,
}

pub struct Stamp<'a> {
    pub command: &'static str,
    pub config_digest: &'a str,
    pub seed: u64,
}

impl<'a> Stamp<'a> {
    pub fn wrap<T: Serialize>(&self, result: T) -> Envelope<'a, T> {
        Envelope { tool: TOOL, version: VERSION, command: self.command, config_digest: self.config_digest, seed: self.seed, result }
    }

    fn header(&self) -> String {
        format!(
            "# tool: {TOOL} {VERSION}\n# command: {}\n# config_digest: {}\n# seed: {}\n",
            self.command, self.config_digest, self.seed
        )
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io(path, e))
}

/// CSV with `#` comment lines ahead of the header row.
pub fn write_csv(path: &Path, stamp: &Stamp, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(stamp.header().as_bytes()).map_err(|e| io(path, e))?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(header).map_err(|e| io(path, e))?;
    for row in rows {
        csv.write_record(row).map_err(|e| io(path, e))?;
    }
    csv.flush().map_err(|e| io(path, e))
}

/// 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-3.0), "-3.0000000000000000e0");
        assert_eq!(float(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_has_stamp_then_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let stamp = Stamp { command: "spectrum", config_digest: "abc", seed: 7 };
        write_csv(&path, &stamp, &["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# tool: planar-dirac {VERSION}"));
        assert_eq!(lines[2], "# config_digest: abc");
        assert_eq!(lines[3], "# seed: 7");
        assert_eq!(lines[4], "a,b");
        assert_eq!(lines[5], "1,\"x,y\"");
    }
}
