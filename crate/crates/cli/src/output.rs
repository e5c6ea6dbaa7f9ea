//! Numeric formatting and output sinks.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Formats like C's `%.12g`: 12 significant digits, trailing zeros trimmed,
/// scientific notation when the exponent falls outside `[-4, 12)`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= 12 {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{}{:02}", if exp < 0 { "-" } else { "+" }, exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

/// Collects output lines and delivers them to stdout or a file.
pub struct Sink {
    out_path: Option<PathBuf>,
    lines: Vec<String>,
}

impl Sink {
    pub fn new(out_path: Option<&Path>) -> Sink {
        Sink {
            out_path: out_path.map(Path::to_path_buf),
            lines: Vec::new(),
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn finish(self) -> Result<()> {
        let body = self.lines.join("\n") + "\n";
        match &self.out_path {
            Some(path) => std::fs::write(path, body)
                .with_context(|| format!("cannot write {}", path.display())),
            None => {
                std::io::stdout()
                    .write_all(body.as_bytes())
                    .context("cannot write to stdout")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_printf_behavior() {
        assert_eq!(fmt_g(0.0), "0");
        assert_eq!(fmt_g(1.0), "1");
        assert_eq!(fmt_g(0.25), "0.25");
        assert_eq!(fmt_g(0.6), "0.6");
        assert_eq!(fmt_g(-0.5), "-0.5");
        assert_eq!(fmt_g(0.0001), "0.0001");
        assert_eq!(fmt_g(0.00001), "1e-05");
        assert_eq!(fmt_g(9.357622968840175e-14), "9.35762296884e-14");
        assert_eq!(fmt_g(-2.6284858133554434e21), "-2.62848581336e+21");
        assert_eq!(fmt_g(1e12), "1e+12");
        assert_eq!(fmt_g(123456789012.0), "123456789012");
        assert_eq!(fmt_g(0.9999999999999999), "1");
        assert_eq!(fmt_g(-3.010299956639812), "-3.01029995664");
        assert_eq!(fmt_g(0.5000000000000001), "0.5");
    }
}
