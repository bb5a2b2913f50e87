//! Number formatting, CSV/JSON rendering and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use abelian_walk::measures::{entropy, gini, tv_to_uniform};
use abelian_walk::ProbabilityVector;
use serde::{Serialize, Serializer};

use crate::error::CliError;

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest text that reads back as `round12(x)`.
pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:?}", round12(x))
}

/// A float serialized with 12 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(round12(self.0))
        } else {
            s.serialize_none()
        }
    }
}

pub fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().copied().map(Num).collect()
}

/// One row of a trajectory table.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRow {
    pub n: usize,
    pub q: Vec<Num>,
    pub entropy_nats: Num,
    pub gini: Num,
    pub tv_to_u: Num,
}

pub fn trajectory_rows(path: &[ProbabilityVector]) -> Vec<TrajectoryRow> {
    path.iter()
        .enumerate()
        .map(|(n, q)| TrajectoryRow {
            n,
            q: nums(q.as_slice()),
            entropy_nats: Num(entropy(q)),
            gini: Num(gini(q)),
            tv_to_u: Num(tv_to_uniform(q)),
        })
        .collect()
}

/// Renders rows of already-formatted cells with a header.
pub fn csv_table(
    header: &[String],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(format!("csv: {e}")))
}

/// `n,q_0,...,q_{l-1},entropy_nats,gini,tv_to_u`.
pub fn trajectory_csv(path: &[ProbabilityVector]) -> Result<Vec<u8>, CliError> {
    let len = path.first().map(|q| q.len()).unwrap_or(0);
    let mut header = vec!["n".to_string()];
    header.extend((0..len).map(|k| format!("q_{k}")));
    header.extend(["entropy_nats", "gini", "tv_to_u"].map(String::from));
    let rows = path.iter().enumerate().map(|(n, q)| {
        let mut row = vec![n.to_string()];
        row.extend(q.as_slice().iter().map(|&v| fmt12(v)));
        row.push(fmt12(entropy(q)));
        row.push(fmt12(gini(q)));
        row.push(fmt12(tv_to_uniform(q)));
        row
    });
    csv_table(&header, rows)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out =
        serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(format!("json: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// A named output file held in memory until everything has been computed.
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

/// Writes every artifact through a temporary file in `dir` and renames it into place.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let target = dir.join(&a.file_name);
        let io = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", target.display()));
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(&a.bytes).map_err(io)?;
        tmp.as_file().sync_all().map_err(io)?;
        tmp.persist(&target).map_err(|e| io(e.error))?;
        written.push(target);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt12(0.1 + 0.2), "0.3");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt12(70.0 / 256.0), "0.2734375");
        assert_eq!(fmt12(123456789.123456), "123456789.123");
        assert_eq!(fmt12(-0.0), "0.0");
        assert_eq!(fmt12(1.23456789012345e-20), "1.23456789012e-20");
        assert_eq!(
            serde_json::to_string(&Num(1.0 / 3.0)).unwrap(),
            "0.333333333333"
        );
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn trajectory_header() {
        let path = vec![ProbabilityVector::delta(3, 0).unwrap()];
        let text = String::from_utf8(trajectory_csv(&path).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("n,q_0,q_1,q_2,entropy_nats,gini,tv_to_u")
        );
        assert_eq!(lines.next(), Some("0,1.0,0.0,0.0,0.0,0.5,0.666666666667"));
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn atomic_write_leaves_only_targets() {
        let dir = tempfile::tempdir().unwrap();
        let arts = [
            Artifact {
                file_name: "a.csv".into(),
                bytes: b"x\n".to_vec(),
            },
            Artifact {
                file_name: "b.json".into(),
                bytes: b"{}\n".to_vec(),
            },
        ];
        write_all(dir.path(), &arts).unwrap();
        let mut names: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["a.csv", "b.json"]);
        assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), b"x\n");
    }
}
