//! System definition files and trajectory CSV output.
//!
//! A system file is line-oriented UTF-8:
//!
//! ```text
//! # commutant-v1
//! name = A
//! a2 = 1
//! a1 = 2 + 2*sin(w0*t)
//! a0 = 5 - 0.5*cos(2*w0*t) + 2*sin(w0*t) + w0*cos(w0*t)
//! param w0 = 1
//! domain = 0, 20
//! ```
//!
//! `#` starts a comment, blank lines are ignored, values may be wrapped in
//! double quotes, and `a2`, `a1`, `a0` and `domain` are required. Parameter
//! values and domain bounds are constant expressions such as `337/32`.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::channel::DemoReport;
use crate::expr::{parse_expr, Expr, ExprError, Params};
use crate::sim::Trajectory;
use crate::system::{Domain, LtvSystem, SystemError};

/// Optional first line written by [`save_system`].
pub const FORMAT_HEADER: &str = "# commutant-v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}` (first given on line {first})")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}: {key}: {source}")]
    Expr {
        line: usize,
        key: String,
        #[source]
        source: ExprError,
    },
    #[error("missing key {0}")]
    MissingKey(&'static str),
    #[error("invalid system: {0}")]
    System(#[from] SystemError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Removes a trailing comment, ignoring `#` inside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

fn unquote(value: &str, line: usize) -> Result<&str, IoError> {
    let v = value.trim();
    match (v.starts_with('"'), v.len() >= 2 && v.ends_with('"')) {
        (true, true) => Ok(&v[1..v.len() - 1]),
        (true, false) => Err(IoError::Syntax {
            line,
            message: "unterminated quote".into(),
        }),
        _ if v.contains('"') => Err(IoError::Syntax {
            line,
            message: "stray quote".into(),
        }),
        _ => Ok(v),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn constant(text: &str, line: usize, key: &str) -> Result<f64, IoError> {
    let wrap = |source| IoError::Expr {
        line,
        key: key.to_string(),
        source,
    };
    parse_expr(text)
        .and_then(|e| e.eval_const(&Params::new()))
        .map_err(wrap)
}

/// Parses system-file text. `origin` names the source in the system name
/// when the file has no `name` key.
pub fn parse_system(text: &str, origin: &str) -> Result<LtvSystem, IoError> {
    let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
    let mut name = None;
    let mut coeffs: [Option<Expr>; 3] = [None, None, None];
    let mut rhs = None;
    let mut domain = None;
    let mut params = Params::new();
    let mut param_lines: BTreeMap<String, usize> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| IoError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        let value = unquote(value, line)?;

        if let Some(id) = key.strip_prefix("param").filter(|r| r.starts_with(char::is_whitespace)) {
            let id = id.trim();
            if !is_identifier(id) || id == "t" || id == "x" {
                return Err(IoError::Syntax {
                    line,
                    message: format!("invalid parameter name `{id}`"),
                });
            }
            if let Some(&first) = param_lines.get(id) {
                return Err(IoError::DuplicateKey {
                    line,
                    key: format!("param {id}"),
                    first,
                });
            }
            params.insert(id.to_string(), constant(value, line, key)?);
            param_lines.insert(id.to_string(), line);
            continue;
        }

        let canonical: &'static str = match key {
            "name" => "name",
            "a2" => "a2",
            "a1" => "a1",
            "a0" => "a0",
            "rhs" => "rhs",
            "domain" => "domain",
            other => {
                return Err(IoError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        };
        if let Some(&first) = seen.get(canonical) {
            return Err(IoError::DuplicateKey {
                line,
                key: canonical.to_string(),
                first,
            });
        }
        seen.insert(canonical, line);

        let expr = |v: &str| {
            parse_expr(v).map_err(|source| IoError::Expr {
                line,
                key: canonical.to_string(),
                source,
            })
        };
        match canonical {
            "name" => name = Some(value.to_string()),
            "a2" => coeffs[0] = Some(expr(value)?),
            "a1" => coeffs[1] = Some(expr(value)?),
            "a0" => coeffs[2] = Some(expr(value)?),
            "rhs" => rhs = Some(expr(value)?),
            _ => {
                let (lo, hi) = value.split_once(',').ok_or_else(|| IoError::Syntax {
                    line,
                    message: "domain must be `lo, hi`".into(),
                })?;
                let (lo, hi) = (
                    constant(lo.trim(), line, "domain")?,
                    constant(hi.trim(), line, "domain")?,
                );
                domain = Some(Domain::new(lo, hi)?);
            }
        }
    }

    let [a2, a1, a0] = coeffs;
    let a2 = a2.ok_or(IoError::MissingKey("a2"))?;
    let a1 = a1.ok_or(IoError::MissingKey("a1"))?;
    let a0 = a0.ok_or(IoError::MissingKey("a0"))?;
    let domain = domain.ok_or(IoError::MissingKey("domain"))?;
    let name = name.unwrap_or_else(|| origin.to_string());
    Ok(LtvSystem::new(name, a2, a1, a0, rhs, params, domain)?)
}

/// Reads and validates a system file.
pub fn load_system(path: impl AsRef<Path>) -> Result<LtvSystem, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let origin = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_system(&text, &origin)
}

fn quote_if_needed(s: &str) -> String {
    if s.contains('#') || s.trim() != s || s.is_empty() {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

/// Renders a system in the file format. Floats use the shortest
/// representation that reads back to the same value.
pub fn render_system(sys: &LtvSystem) -> String {
    let mut out = String::new();
    out.push_str(FORMAT_HEADER);
    out.push('\n');
    out.push_str(&format!("name = {}\n", quote_if_needed(sys.name())));
    out.push_str(&format!("a2 = {}\n", sys.a2()));
    out.push_str(&format!("a1 = {}\n", sys.a1()));
    out.push_str(&format!("a0 = {}\n", sys.a0()));
    if let Some(rhs) = sys.forcing() {
        out.push_str(&format!("rhs = {rhs}\n"));
    }
    for (k, v) in sys.params() {
        out.push_str(&format!("param {k} = {v:?}\n"));
    }
    let d = sys.domain();
    out.push_str(&format!("domain = {:?}, {:?}\n", d.lo, d.hi));
    out
}

pub fn save_system(sys: &LtvSystem, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, render_system(sys)).map_err(io_err(path))
}

/// Formats `v` with 15 significant digits, in positional notation when the
/// exponent lies in `[-5, 15)` and in scientific notation otherwise.
pub fn format_sig15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp) as usize;
        trim(&format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// Writes a trajectory as CSV: header `t,<columns>`, one row per sample.
pub fn write_trajectory_to<W: Write>(traj: &Trajectory, out: W) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    write!(w, "t")?;
    for name in traj.names() {
        write!(w, ",{name}")?;
    }
    writeln!(w)?;
    let columns: Vec<&[f64]> = traj.columns().map(|(_, c)| c).collect();
    for k in 0..traj.len() {
        write!(w, "{}", format_sig15(traj.time(k)))?;
        for c in &columns {
            write!(w, ",{}", format_sig15(c[k]))?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn write_trajectory(traj: &Trajectory, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_trajectory_to(traj, file).map_err(io_err(path))
}

/// File name used for a structure's trajectory, e.g. `03_AAB-B.csv`.
pub fn structure_file_name(index: usize, structure: &str) -> String {
    format!("{:02}_{}.csv", index, structure.replace("->", "-"))
}

/// Writes one CSV per structure plus `report.txt` into `dir`, creating it if
/// needed. Returns the written paths.
pub fn write_demo(report: &DemoReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, IoError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for (i, run) in report.runs.iter().enumerate() {
        let path = dir.join(structure_file_name(i, &run.structure.to_string()));
        write_trajectory(&run.trajectory, &path)?;
        written.push(path);
    }
    let path = dir.join("report.txt");
    fs::write(&path, report.render()).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::params;

    const SYSTEM_A: &str = "\
# reference system
name = A
a2 = 1
a1 = \"2 + 2*sin(w0*t)\"   # quoted
a0 = 5 - 0.5*cos(2*w0*t) + 2*sin(w0*t) + w0*cos(w0*t)
param w0 = 1
domain = 0, 20
";

    #[test]
    fn parses_reference_system() {
        let sys = parse_system(SYSTEM_A, "file").unwrap();
        assert_eq!(sys.name(), "A");
        assert_eq!(sys.params(), &params([("w0", 1.0)]));
        assert_eq!(sys.domain(), Domain::new(0.0, 20.0).unwrap());
        let t: f64 = 1.1;
        let [a2, a1, a0] = sys.coeff_values(t).unwrap();
        assert_eq!((a2, a1), (1.0, 2.0 + 2.0 * t.sin()));
        assert!((a0 - (5.0 - 0.5 * (2.0 * t).cos() + 2.0 * t.sin() + t.cos())).abs() < 1e-15);
    }

    #[test]
    fn missing_key_is_reported() {
        let text = SYSTEM_A.replace("a0 = ", "# a0 = ");
        assert!(matches!(parse_system(&text, "f"), Err(IoError::MissingKey("a0"))));
        assert_eq!(parse_system(&text, "f").unwrap_err().to_string(), "missing key a0");
    }

    #[test]
    fn duplicate_key_names_second_line() {
        let text = format!("{SYSTEM_A}a2 = 2\n");
        match parse_system(&text, "f") {
            Err(IoError::DuplicateKey { line, key, first }) => assert_eq!((line, key.as_str(), first), (8, "a2", 3)),
            other => panic!("{other:?}"),
        }
        let text = format!("{SYSTEM_A}param w0 = 2\n");
        assert!(matches!(
            parse_system(&text, "f"),
            Err(IoError::DuplicateKey { line: 8, .. })
        ));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            parse_system("A2 = 1", "f"),
            Err(IoError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            parse_system("a2 1", "f"),
            Err(IoError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_system("a2 = \"1", "f"),
            Err(IoError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_system("\n\na2 = 1 +", "f"),
            Err(IoError::Expr { line: 3, .. })
        ));
        assert!(matches!(parse_system("param 2x = 1", "f"), Err(IoError::Syntax { .. })));
        assert!(matches!(parse_system("domain = 1", "f"), Err(IoError::Syntax { .. })));
        let bad_domain = "a2 = 1\na1 = 0\na0 = 1\ndomain = 2, 1\n";
        assert!(matches!(
            parse_system(bad_domain, "f"),
            Err(IoError::System(SystemError::InvalidDomain { .. }))
        ));
    }

    #[test]
    fn rational_parameters_and_default_name() {
        let text = "a2 = 0.5\na1 = 0\na0 = k0\nparam k0 = 337/32\ndomain = 0, 2*pi\n";
        let sys = parse_system(text, "fallback").unwrap();
        assert_eq!(sys.name(), "fallback");
        assert_eq!(sys.params()["k0"], 10.53125);
        assert_eq!(sys.domain().hi, 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn save_and_load_round_trip() {
        let sys = parse_system(SYSTEM_A, "f").unwrap().with_name("odd # name");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.sys");
        save_system(&sys, &path).unwrap();
        let back = load_system(&path).unwrap();
        assert_eq!(back.name(), sys.name());
        assert_eq!(back.coeffs(), sys.coeffs());
        assert_eq!(back.params(), sys.params());
        assert_eq!(back.domain(), sys.domain());
    }

    #[test]
    fn sig15_formatting() {
        assert_eq!(format_sig15(0.0), "0");
        assert_eq!(format_sig15(-30.0), "-30");
        assert_eq!(format_sig15(0.1), "0.1");
        assert_eq!(format_sig15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(format_sig15(12345.678), "12345.678");
        assert_eq!(format_sig15(1.5e-9), "1.5e-9");
        assert_eq!(format_sig15(2.0e20), "2e20");
        assert_eq!(format_sig15(std::f64::consts::PI), "3.14159265358979");
    }

    #[test]
    fn empty_trajectory_is_header_only() {
        let traj = Trajectory::new(0.0, 0.1, vec!["input".into(), "y1".into(), "dy1".into()]);
        let mut buf = Vec::new();
        write_trajectory_to(&traj, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,input,y1,dy1\n");
    }
}
