//! File formats: numeric CSV matrices, tab-separated weighted edge lists,
//! mono 16-bit WAV, and CSV reports.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::linalg::DenseMatrix;
use crate::{Error, Result};

/// Weight range accepted without a warning.
pub const WEIGHT_RANGE: (f64, f64) = (0.0, 2.0);

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::RaggedRows {
            line,
            expected: expected_len as usize,
            found: len as usize,
        },
        other => Error::Parse {
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

fn parse_number(field: &str, line: usize, column: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("`{field}` is not a number"),
    })
}

/// Reads a rectangular numeric CSV. A first row in which no field parses as
/// a number is taken as a header.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut data = Vec::new();
    let mut cols = 0;
    let mut rows = 0;
    for (index, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(index + 1, |p| p.line() as usize);
        if index == 0 && record.iter().all(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if rows == 0 {
            cols = record.len();
        }
        for (j, field) in record.iter().enumerate() {
            data.push(parse_number(field, line, j + 1)?);
        }
        rows += 1;
    }
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput(format!("{} has no data rows", path.display())));
    }
    DenseMatrix::from_row_major(rows, cols, data)
}

/// Writes `m` without a header, 17 significant digits per entry.
pub fn write_matrix_csv(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    write_with(path, |out| {
        for i in 0..m.rows() {
            let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    })
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_with(
    path: impl AsRef<Path>,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EdgeList {
    /// Node names in order of first appearance; the index is the matrix row.
    pub nodes: Vec<String>,
    /// `(a, b, weight)` records as read, by node index.
    pub edges: Vec<(usize, usize, f64)>,
    /// Non-fatal problems such as weights outside [`WEIGHT_RANGE`].
    pub warnings: Vec<String>,
}

impl EdgeList {
    /// Symmetric adjacency; a repeated pair keeps its last weight.
    pub fn adjacency(&self) -> Result<DenseMatrix> {
        let n = self.nodes.len();
        if n == 0 {
            return Err(Error::EmptyInput("edge list has no edges".into()));
        }
        let mut m = DenseMatrix::zeros(n, n);
        for &(a, b, w) in &self.edges {
            m[(a, b)] = w;
            m[(b, a)] = w;
        }
        Ok(m)
    }
}

/// Reads `node_a<TAB>node_b<TAB>weight` lines; `#` starts a comment line.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<(EdgeList, DenseMatrix)> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(b'\t')
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut list = EdgeList::default();
    let mut index: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(Error::RaggedRows {
                line,
                expected: 3,
                found: record.len(),
            });
        }
        let weight = parse_number(&record[2], line, 3)?;
        if !weight.is_finite() {
            return Err(Error::Parse {
                line,
                column: 3,
                message: format!("weight `{}` is not finite", &record[2]),
            });
        }
        if !(WEIGHT_RANGE.0..=WEIGHT_RANGE.1).contains(&weight) {
            list.warnings.push(format!(
                "line {line}: weight {weight} outside [{}, {}]",
                WEIGHT_RANGE.0, WEIGHT_RANGE.1
            ));
        }
        let mut node = |name: &str| {
            *index.entry(name.to_string()).or_insert_with(|| {
                list.nodes.push(name.to_string());
                list.nodes.len() - 1
            })
        };
        let a = node(&record[0]);
        let b = node(&record[1]);
        list.edges.push((a, b, weight));
    }
    let adjacency = list.adjacency()?;
    Ok((list, adjacency))
}

/// Mono 16-bit PCM samples scaled to `[−1, 1)`, and the sample rate.
pub fn read_wav(path: impl AsRef<Path>) -> Result<(Vec<f64>, u32)> {
    let path = path.as_ref();
    let reader = hound::WavReader::open(path)?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::UnsupportedFormat(format!("{} channels, expected mono", spec.channels)));
    }
    if spec.sample_format != hound::SampleFormat::Int || spec.bits_per_sample != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "{}-bit {:?} samples, expected 16-bit PCM",
            spec.bits_per_sample, spec.sample_format
        )));
    }
    let samples = reader
        .into_samples::<i16>()
        .map(|s| s.map(|v| f64::from(v) / 32768.0))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput(format!("{} has no samples", path.display())));
    }
    Ok((samples, spec.sample_rate))
}

/// Writes mono 16-bit PCM, clamping to `[−1, 1)` and rounding to the
/// nearest quantization step.
pub fn write_wav(samples: &[f64], sample_rate: u32, path: impl AsRef<Path>) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)?;
    for &s in samples {
        let q = (s * 32768.0).round().clamp(-32768.0, 32767.0);
        writer.write_sample(q as i16)?;
    }
    writer.finalize()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn csv_examples() {
        let dir = tempfile::tempdir().unwrap();
        let m = read_matrix_csv(write(&dir, "a.csv", "1,2\n3,4\n")).unwrap();
        assert_eq!(m, DenseMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap());
        let h = read_matrix_csv(write(&dir, "h.csv", "x,y\n1, 2\n3,4e0\n")).unwrap();
        assert_eq!(h, m);
        assert!(matches!(
            read_matrix_csv(write(&dir, "r.csv", "1,2\n3\n")),
            Err(Error::RaggedRows { line: 2, expected: 2, found: 1 })
        ));
        assert!(matches!(
            read_matrix_csv(write(&dir, "p.csv", "1,2\n3,zz\n")),
            Err(Error::Parse { line: 2, column: 2, .. })
        ));
        assert!(matches!(read_matrix_csv(write(&dir, "e.csv", "")), Err(Error::EmptyInput(_))));
        assert!(matches!(read_matrix_csv(dir.path().join("missing.csv")), Err(Error::Io { .. })));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let m = DenseMatrix::from_fn(50, 40, |i, j| ((i * 40 + j) as f64 * 0.7).sin() * 1e3 / (1.0 + j as f64));
        let p = dir.path().join("m.csv");
        write_matrix_csv(&m, &p).unwrap();
        assert_eq!(read_matrix_csv(&p).unwrap(), m);
        let first = std::fs::read(&p).unwrap();
        write_matrix_csv(&m, &p).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), first);
    }

    #[test]
    fn edge_list_examples() {
        let dir = tempfile::tempdir().unwrap();
        let (list, adj) = read_edge_list(write(&dir, "g.tsv", "# comment\na\tb\t1.5\nb\tc\t0.5\n")).unwrap();
        assert_eq!(list.nodes, ["a", "b", "c"]);
        assert_eq!(adj.count_nonzero(), 4);
        assert_eq!(adj, adj.transpose());
        assert_eq!(adj[(0, 1)], 1.5);

        let (_, adj) = read_edge_list(write(&dir, "s.tsv", "a\ta\t0.7\na\tb\t1\nb\ta\t2\n")).unwrap();
        assert_eq!(adj[(0, 0)], 0.7);
        assert_eq!(adj[(0, 1)], 2.0);

        let (list, _) = read_edge_list(write(&dir, "w.tsv", "a\tb\t3\n")).unwrap();
        assert_eq!(list.warnings.len(), 1);

        assert!(matches!(read_edge_list(write(&dir, "e.tsv", "")), Err(Error::EmptyInput(_))));
        assert!(matches!(read_edge_list(write(&dir, "c.tsv", "# only\n")), Err(Error::EmptyInput(_))));
        assert!(matches!(
            read_edge_list(write(&dir, "bad.tsv", "a\tb\tx\n")),
            Err(Error::Parse { line: 1, column: 3, .. })
        ));
        assert!(matches!(read_edge_list(write(&dir, "short.tsv", "a\tb\n")), Err(Error::RaggedRows { .. })));
    }

    #[test]
    fn wav_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tone.wav");
        let tone: Vec<f64> = (0..8000).map(|t| 0.8 * (2.0 * PI * 440.0 * t as f64 / 8000.0).sin()).collect();
        write_wav(&tone, 8000, &p).unwrap();
        let (back, rate) = read_wav(&p).unwrap();
        assert_eq!(rate, 8000);
        assert_eq!(back.len(), tone.len());
        assert!(tone.iter().zip(&back).all(|(a, b)| (a - b).abs() <= 1.0 / 32768.0));

        write_wav(&[2.0, -2.0], 8000, &p).unwrap();
        let (clamped, _) = read_wav(&p).unwrap();
        assert_eq!(clamped, [32767.0 / 32768.0, -1.0]);
    }

    #[test]
    fn wav_rejections() {
        let dir = tempfile::tempdir().unwrap();
        let stereo = dir.path().join("stereo.wav");
        let spec = hound::WavSpec {
            channels: 2,
            sample_rate: 8000,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(&stereo, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&stereo), Err(Error::UnsupportedFormat(_))));

        let empty = dir.path().join("empty.wav");
        write_wav(&[], 8000, &empty).unwrap();
        assert!(matches!(read_wav(&empty), Err(Error::EmptyInput(_))));
    }
}
