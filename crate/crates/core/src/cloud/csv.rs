//! Cloud persistence.
//!
//! Layout, one cloud per file:
//!
//! ```text
//! # n=4 N=3 spec=sphere:d=2,r=1 seed=7
//! # weights=2.5000000000000000e-1,...      (only when weights are attached)
//! x0,x1,x2
//! 1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0
//! ...
//! ```
//!
//! Coordinates and weights are written with 17 significant digits, so a
//! save/load round trip reproduces every `f64` bit for bit. A cloud with no
//! provenance writes `spec=none seed=-1`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::cloud::{parse_spec, PointCloud};
use crate::error::{Error, Result};

pub fn save_csv(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_csv(cloud, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_csv(cloud: &PointCloud, w: &mut impl Write) -> Result<()> {
    let seed = cloud.seed().map(|s| s.to_string()).unwrap_or_else(|| "-1".to_owned());
    writeln!(
        w,
        "# n={} N={} spec={} seed={}",
        cloud.n(),
        cloud.ambient_dim(),
        cloud.spec_string(),
        seed
    )?;
    if let Some(weights) = cloud.weights() {
        write!(w, "# weights=")?;
        for (i, wi) in weights.iter().enumerate() {
            if i > 0 {
                write!(w, ",")?;
            }
            write!(w, "{wi:.16e}")?;
        }
        writeln!(w)?;
    }
    let header: Vec<String> = (0..cloud.ambient_dim()).map(|k| format!("x{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in cloud.rows() {
        let row: Vec<String> = p.iter().map(|c| format!("{c:.16e}")).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<PointCloud> {
    read_csv(&mut BufReader::new(File::open(path)?))
}

pub fn read_csv(r: &mut impl Read) -> Result<PointCloud> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let bad = |line: usize, msg: String| Error::MalformedFile { line: line + 1, msg };

    let (_, first) = lines
        .next()
        .ok_or_else(|| bad(0, "empty file".into()))
        .and_then(|(i, l)| l.map(|l| (i, l)).map_err(Error::Io))?;
    let meta = parse_meta_line(&first).map_err(|msg| bad(0, msg))?;

    let mut weights: Option<Vec<f64>> = None;
    let mut rows: Vec<f64> = Vec::with_capacity(meta.n * meta.dim);
    let mut data_rows = 0usize;
    let mut saw_column_header = false;
    for (i, line) in lines {
        let line = line.map_err(Error::Io)?;
        if let Some(rest) = line.strip_prefix("# weights=") {
            if saw_column_header || data_rows > 0 {
                return Err(bad(i, "weights line must precede the data".into()));
            }
            if weights.is_some() {
                return Err(bad(i, "duplicate weights line".into()));
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                rest.split(',').map(|f| f.trim().parse::<f64>()).collect();
            let ws = parsed.map_err(|e| bad(i, format!("bad weight: {e}")))?;
            if ws.len() != meta.n {
                return Err(bad(i, format!("{} weights for n={}", ws.len(), meta.n)));
            }
            weights = Some(ws);
            continue;
        }
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_column_header {
            // Column header row ("x0,x1,..."); validated loosely, the
            // field count is what matters.
            let cols = line.split(',').count();
            if cols != meta.dim {
                return Err(bad(i, format!("header has {cols} columns, expected {}", meta.dim)));
            }
            saw_column_header = true;
            continue;
        }
        if data_rows == meta.n {
            return Err(bad(i, format!("more data rows than n={}", meta.n)));
        }
        let mut fields = 0usize;
        for f in line.split(',') {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|e| bad(i, format!("bad coordinate '{}': {e}", f.trim())))?;
            if !v.is_finite() {
                return Err(bad(i, format!("non-finite coordinate {v}")));
            }
            rows.push(v);
            fields += 1;
        }
        if fields != meta.dim {
            return Err(bad(i, format!("row has {fields} fields, expected {}", meta.dim)));
        }
        data_rows += 1;
    }
    if data_rows != meta.n {
        return Err(Error::MalformedFile {
            line: data_rows + if weights.is_some() { 3 } else { 2 },
            msg: format!("expected n={} data rows, found {data_rows}", meta.n),
        });
    }

    let mut cloud = PointCloud::from_flat(rows, meta.dim)?;
    if let Some(ws) = weights {
        // Positivity is enforced; normalization is not re-checked so that
        // any cloud this crate can hold survives a round trip.
        cloud = cloud.with_unnormalized_weights(ws)?;
    }
    if let Some(parsed) = meta.spec {
        cloud = cloud.with_spec(parsed.spec);
        if let Some(a) = parsed.density_amplitude {
            cloud = cloud.with_density_amplitude(a);
        }
    }
    if let Some(seed) = meta.seed {
        cloud = cloud.with_seed(seed);
    }
    Ok(cloud)
}

struct MetaLine {
    n: usize,
    dim: usize,
    spec: Option<crate::cloud::ParsedSpec>,
    seed: Option<u64>,
}

fn parse_meta_line(line: &str) -> std::result::Result<MetaLine, String> {
    let rest = line
        .strip_prefix("# ")
        .ok_or_else(|| "missing '# n=.. N=.. spec=.. seed=..' header".to_owned())?;
    let mut n = None;
    let mut dim = None;
    let mut spec_field = None;
    let mut seed_field = None;
    for part in rest.split_whitespace() {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("bad header field '{part}'"))?;
        match k {
            "n" => n = Some(v.parse::<usize>().map_err(|e| format!("bad n: {e}"))?),
            "N" => dim = Some(v.parse::<usize>().map_err(|e| format!("bad N: {e}"))?),
            "spec" => spec_field = Some(v.to_owned()),
            "seed" => seed_field = Some(v.to_owned()),
            other => return Err(format!("unknown header field '{other}'")),
        }
    }
    let n = n.ok_or("header missing n")?;
    let dim = dim.ok_or("header missing N")?;
    let spec_field = spec_field.ok_or("header missing spec")?;
    let seed_field = seed_field.ok_or("header missing seed")?;
    let spec = if spec_field == "none" {
        None
    } else {
        Some(parse_spec(&spec_field).map_err(|e| e.to_string())?)
    };
    let seed = if seed_field == "-1" {
        None
    } else {
        Some(seed_field.parse::<u64>().map_err(|e| format!("bad seed: {e}"))?)
    };
    Ok(MetaLine { n, dim, spec, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloud::{quadrature_grid, sample_uniform, sample_weighted_circle, ManifoldSpec};

    fn round_trip(cloud: &PointCloud) -> PointCloud {
        let mut buf = Vec::new();
        write_csv(cloud, &mut buf).unwrap();
        read_csv(&mut buf.as_slice()).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let cloud = sample_uniform(&ManifoldSpec::Sphere { d: 3, r: 1.5 }, 64, 99).unwrap();
        let back = round_trip(&cloud);
        assert_eq!(back.points_flat(), cloud.points_flat());
        assert_eq!(back.seed(), Some(99));
        assert_eq!(back.spec(), cloud.spec());
        assert!(back.weights().is_none());
    }

    #[test]
    fn round_trip_keeps_weights_and_density_tag() {
        let grid = quadrature_grid(&ManifoldSpec::Sphere { d: 2, r: 1.0 }, 6).unwrap();
        let back = round_trip(&grid);
        assert_eq!(back.weights().unwrap(), grid.weights().unwrap());

        let w = sample_weighted_circle(2.0, 0.25, 10, 3).unwrap();
        let back = round_trip(&w);
        assert_eq!(back.density_amplitude(), Some(0.25));
        assert_eq!(back.points_flat(), w.points_flat());
        assert_eq!(back.spec(), Some(&ManifoldSpec::Circle { r: 2.0 }));
    }

    #[test]
    fn anonymous_clouds_round_trip_without_provenance() {
        let cloud = PointCloud::from_rows(&[vec![0.25, -1.0], vec![3.5, 0.125]]).unwrap();
        let mut buf = Vec::new();
        write_csv(&cloud, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# n=2 N=2 spec=none seed=-1\n"), "got: {text}");
        let back = read_csv(&mut buf.as_slice()).unwrap();
        assert_eq!(back.points_flat(), cloud.points_flat());
        assert!(back.spec().is_none());
        assert!(back.seed().is_none());
    }

    #[test]
    fn malformed_files_report_line_numbers() {
        let cases: [(&str, usize); 6] = [
            ("x0,x1\n1,2\n", 1),                                     // no meta header
            ("# n=2 N=2 spec=none seed=-1\nx0,x1\n1,2\n", 3),        // too few rows
            ("# n=1 N=2 spec=none seed=-1\nx0,x1\n1,2\n3,4\n", 4),   // too many rows
            ("# n=1 N=2 spec=none seed=-1\nx0,x1\n1,oops\n", 3),     // bad number
            ("# n=1 N=2 spec=none seed=-1\nx0,x1\n1,2,3\n", 3),      // ragged row
            ("# n=1 N=2 spec=klein:r=1 seed=-1\nx0,x1\n1,2\n", 1),   // bad spec
        ];
        for (text, want_line) in cases {
            match read_csv(&mut text.as_bytes()) {
                Err(Error::MalformedFile { line, .. }) => {
                    assert_eq!(line, want_line, "file: {text:?}")
                }
                other => panic!("expected malformed-file error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn load_rejects_missing_file() {
        assert!(matches!(load_csv("/nonexistent/cloud.csv"), Err(Error::Io(_))));
    }
}
