//! File formats: trajectory, spectrum and data CSV, atomic writes.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};
use crate::stepper::Trajectory;

pub const TRAJECTORY_HEADER: &str = "t,L2,lip,H32,H2,A_phi,B_phi,P_phi,mu_phi,Q,besov,holder,logE,dt,status";
pub const SPECTRUM_HEADER: &str = "k,xi,re,im";
pub const DATA_HEADER: &str = "x,f";

/// Shortest round-trip representation; `NaN`, `inf` and `-inf` otherwise.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, mut out: W) -> Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for row in &traj.rows {
        let r = &row.report;
        let cols = [
            r.t,
            r.l2,
            r.lip,
            r.h32(),
            r.h2(),
            r.a_phi,
            r.b_phi,
            r.p_phi,
            r.mu_phi,
            r.q_functional,
            r.besov_half_sq,
            r.holder_c2beta,
            r.log_energy,
            row.dt,
        ];
        let mut line: Vec<String> = cols.iter().map(|&v| fmt_f64(v)).collect();
        line.push(row.status.as_str().to_string());
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trajectory_csv(traj, &mut buf).expect("writing to memory");
    buf
}

/// One row per coefficient in storage order: mode `k`, wavenumber, and the
/// real and imaginary parts.
pub fn write_spectrum_csv<W: Write>(f: &Field, mut out: W) -> Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    let grid = f.grid();
    for (slot, c) in f.spectrum().iter().enumerate() {
        writeln!(
            out,
            "{},{},{},{}",
            grid.mode(slot),
            fmt_f64(grid.wavenumber(slot)),
            fmt_f64(c.re),
            fmt_f64(c.im)
        )?;
    }
    Ok(())
}

/// Samples as `x,f` rows.
pub fn write_data_csv<W: Write>(f: &Field, mut out: W) -> Result<()> {
    writeln!(out, "{DATA_HEADER}")?;
    for (x, v) in f.grid().nodes().iter().zip(f.samples()) {
        writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*v))?;
    }
    Ok(())
}

/// Reads `x,f` rows on uniform nodes `x_j = j L / N`; `L` is inferred from
/// the spacing.
pub fn read_data_csv<R: BufRead>(input: R) -> Result<Field> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty data file".into()))??;
    if header.trim() != DATA_HEADER {
        return Err(Error::Parse(format!("expected header `{DATA_HEADER}`, found `{}`", header.trim())));
    }
    let (mut xs, mut fs) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut next = |what: &str| -> Result<f64> {
            let s = parts
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing {what}", i + 2)))?;
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {what}: {e}", i + 2)))
        };
        xs.push(next("x")?);
        fs.push(next("f")?);
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::Parse("data file needs at least two rows".into()));
    }
    let dx = xs[1] - xs[0];
    if xs[0] != 0.0 || !(dx > 0.0) {
        return Err(Error::Parse("nodes must start at x = 0 and increase".into()));
    }
    for (j, x) in xs.iter().enumerate() {
        if (x - j as f64 * dx).abs() > 1e-9 * dx * n as f64 {
            return Err(Error::Parse(format!("row {} is off the uniform grid", j + 2)));
        }
    }
    let grid = Grid::new(dx * n as f64, n)?;
    Field::from_samples(grid, fs)
}

/// Writes `bytes` to a temporary file beside `path`, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn shortest_round_trip() {
        for v in [0.1, 1e-300, -2.5e17, 1.0 / 3.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn data_round_trip() {
        let g = Grid::new(2.0 * PI, 16).unwrap();
        let f = Field::from_fn(g, |x| x.sin() + 0.25 * (3.0 * x).cos()).unwrap();
        let mut buf = Vec::new();
        write_data_csv(&f, &mut buf).unwrap();
        let back = read_data_csv(&buf[..]).unwrap();
        assert_eq!(back.samples(), f.samples());
        assert!((back.grid().length() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(read_data_csv(&b"x,y\n0,1\n"[..]).is_err());
        assert!(read_data_csv(&b"x,f\n0,1\n1,2\n3,4\n"[..]).is_err());
        assert!(read_data_csv(&b"x,f\n0,1\n1,zz\n"[..]).is_err());
    }

    #[test]
    fn spectrum_rows() {
        let g = Grid::new(2.0 * PI, 8).unwrap();
        let f = Field::from_fn(g, |x| x.cos()).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SPECTRUM_HEADER);
        assert_eq!(lines.len(), 9);
        assert!(lines[2].starts_with("1,1.0,0.5"));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
    }
}
