//! Instance text format.
//!
//! ```text
//! islands-instance 1
//! n 3
//! colors 2
//! 0 0/1 0/1 0
//! 1 1/2 3/1 1
//! 2 -7/3 1/1 0
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are written
//! as `num/den`; integers and finite decimals such as `-0.125` are accepted on
//! input and converted exactly.

use std::path::Path;

use islands::geom::{Point, Scalar};
use islands::island::Instance;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::{io_err, CliError};

pub const MAGIC: &str = "islands-instance";
pub const VERSION: u32 = 1;

pub fn serialize_scalar(v: &Scalar) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `a/b`, `a`, or a decimal literal.
pub fn parse_scalar(s: &str) -> Result<Scalar, String> {
    let bad = || format!("malformed rational {s:?}");
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = parse_int(n).ok_or_else(bad)?;
        let d: BigInt = parse_int(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Scalar::new(n, d));
    }
    if let Some(v) = parse_int(s) {
        return Ok(Scalar::from_integer(v));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').ok_or_else(bad)?;
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if (whole.is_empty() && frac.is_empty()) || !digits(whole) || !digits(frac) {
        return Err(bad());
    }
    let num: BigInt = format!("{whole}{frac}").parse().unwrap_or_default();
    let den = BigInt::from(10).pow(frac.len() as u32);
    let v = Scalar::new(num, den);
    Ok(if neg { -v } else { v })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = format!(
        "{MAGIC} {VERSION}\nn {}\ncolors {}\n",
        inst.len(),
        inst.color_count()
    );
    for (i, p) in inst.points().iter().enumerate() {
        out.push_str(&format!(
            "{i} {} {} {}\n",
            serialize_scalar(&p.x),
            serialize_scalar(&p.y),
            inst.color(i)
        ));
    }
    out
}

pub fn parse_instance(text: &str, path: &Path) -> Result<Instance, CliError> {
    let err = |line: usize, msg: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut header = |key: &str| -> Result<(usize, String), CliError> {
        let (no, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing {key} line")))?;
        let mut it = l.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(k), Some(v), None) if k == key => Ok((no, v.to_string())),
            _ => Err(err(no, format!("expected `{key} <value>`"))),
        }
    };
    let (no, version) = header(MAGIC)?;
    if version != VERSION.to_string() {
        return Err(err(no, format!("unsupported version {version}")));
    }
    let count = |(no, v): (usize, String)| {
        v.parse::<usize>()
            .map_err(|_| err(no, format!("bad count {v:?}")))
    };
    let n = count(header("n")?)?;
    let colors = count(header("colors")?)?;

    let mut points = Vec::with_capacity(n);
    let mut cols = Vec::with_capacity(n);
    for (no, l) in lines {
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 4 {
            return Err(err(no, "expected `index x y color`".into()));
        }
        let idx: usize = f[0].parse().map_err(|_| err(no, "bad index".into()))?;
        if idx != points.len() {
            return Err(err(no, format!("index {idx} out of order")));
        }
        let x = parse_scalar(f[1]).map_err(|m| err(no, m))?;
        let y = parse_scalar(f[2]).map_err(|m| err(no, m))?;
        let c: usize = f[3].parse().map_err(|_| err(no, "bad color".into()))?;
        points.push(Point::new(x, y));
        cols.push(c);
    }
    if points.len() != n {
        return Err(err(
            0,
            format!("header says {n} points, found {}", points.len()),
        ));
    }
    Instance::new(points, cols, colors).map_err(|e| err(0, e.to_string()))
}

pub fn read_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_instance(&text, path)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<(), CliError> {
    std::fs::write(path, serialize_instance(inst)).map_err(io_err(path))
}

/// True when the first meaningful line carries the instance magic.
pub fn looks_like_instance(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with(MAGIC))
}

/// Formats a rational for tables: integers bare, others as `num/den`.
pub fn show_ratio(v: &Scalar) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else if v.is_negative() {
        format!("-{}", show_ratio(&-v))
    } else {
        v.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use islands::geom::ratio;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("-4").unwrap(), ratio(-4, 1));
        assert_eq!(parse_scalar("-0.125").unwrap(), ratio(-1, 8));
        assert_eq!(parse_scalar(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_scalar("2.").unwrap(), ratio(2, 1));
        for bad in ["1/0", "a", "1//2", "", ".", "1.2.3", "--1", "1e3", "1/-"] {
            assert!(parse_scalar(bad).is_err(), "{bad}");
        }
        assert_eq!(serialize_scalar(&ratio(6, -4)), "-3/2");
        assert_eq!(serialize_scalar(&ratio(5, 1)), "5/1");
    }

    #[test]
    fn roundtrip() {
        let text = "islands-instance 1\nn 3\ncolors 2\n0 0/1 0/1 0\n1 1/2 3/1 1\n2 -7/3 1/1 0\n";
        let inst = parse_instance(text, Path::new("t")).unwrap();
        assert_eq!(serialize_instance(&inst), text);
    }

    #[test]
    fn decimals_and_comments() {
        let text = "# made by hand\nislands-instance 1\nn 2\n\ncolors 1\n0 0.5 1 0\n1 -2 3/4 0\n";
        let inst = parse_instance(text, Path::new("t")).unwrap();
        assert_eq!(inst.point(0), &Point::from_ratios((1, 2), (1, 1)));
        assert!(serialize_instance(&inst).contains("0 1/2 1/1 0\n"));
    }

    #[test]
    fn rejects() {
        let cases = [
            "islands-instance 2\nn 0\ncolors 1\n",
            "islands-instance 1\nn 2\ncolors 1\n0 0 0 0\n1 0/1 0 0\n",
            "islands-instance 1\nn 1\ncolors 1\n0 1/0 0 0\n",
            "islands-instance 1\nn 2\ncolors 1\n0 0 0 0\n",
            "islands-instance 1\nn 1\ncolors 1\n1 0 0 0\n",
            "islands-instance 1\nn 1\ncolors 1\n0 0 0 1\n",
            "n 1\ncolors 1\n0 0 0 0\n",
        ];
        for c in cases {
            assert!(parse_instance(c, Path::new("t")).is_err(), "{c}");
        }
        let dup = parse_instance(cases[1], Path::new("t")).unwrap_err();
        assert!(dup.to_string().contains("duplicate"), "{dup}");
    }

    #[test]
    fn ratio_display() {
        assert_eq!(show_ratio(&ratio(8, 5)), "8/5");
        assert_eq!(show_ratio(&ratio(3, 3)), "1");
        assert_eq!(show_ratio(&ratio(-1, 2)), "-1/2");
    }
}
