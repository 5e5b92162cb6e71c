//! Sweep output: a `# key=value` config block followed by plain CSV.

use std::fmt::Write as _;
use std::path::Path;

use super::config::SweepConfig;
use super::sweep::{CurveRow, EntropyCurve};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "k,k_over_n,s_tilde_mean,s_tilde_stderr,excluded_fraction,gibbs_entropy,giant_fraction";

const FAILED_KEY: &str = "failed_realizations";

// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Render the file contents. Rows whose realizations partly failed are
/// listed in a `failed_realizations` line as `k:count` pairs.
pub fn render_csv(curve: &EntropyCurve, cfg: &SweepConfig) -> String {
    let mut s = String::new();
    for (k, v) in cfg.echo() {
        let _ = writeln!(s, "# {k}={v}");
    }
    let failed: Vec<String> =
        curve.rows.iter().filter(|r| r.failed > 0).map(|r| format!("{}:{}", r.k, r.failed)).collect();
    let _ = writeln!(s, "# {FAILED_KEY}={}", failed.join(";"));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.k,
            num(r.k_over_n),
            num(r.s_tilde_mean),
            num(r.s_tilde_stderr),
            num(r.excluded_fraction),
            num(r.gibbs_entropy),
            num(r.giant_fraction)
        );
    }
    s
}

pub fn emit_csv(curve: &EntropyCurve, cfg: &SweepConfig, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(curve, cfg)).map_err(|source| Error::Io { path: path.into(), source })
}

/// Parse a file produced by [`render_csv`] back into its config and curve.
pub fn parse_csv(text: &str) -> Result<(SweepConfig, EntropyCurve)> {
    let mut echo: Vec<(&str, &str)> = Vec::new();
    let mut failed: Vec<(usize, usize)> = Vec::new();
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let perr = |message: String| Error::Parse { line: lineno, message };
        if let Some(rest) = line.strip_prefix('#') {
            let (k, v) = rest.trim_start().split_once('=').ok_or_else(|| perr("expected `# key=value`".into()))?;
            if k == FAILED_KEY {
                for pair in v.split(';').filter(|p| !p.is_empty()) {
                    let (a, b) = pair.split_once(':').ok_or_else(|| perr(format!("bad failure entry `{pair}`")))?;
                    let a = a.parse().map_err(|_| perr(format!("bad k `{a}`")))?;
                    let b = b.parse().map_err(|_| perr(format!("bad count `{b}`")))?;
                    failed.push((a, b));
                }
            } else {
                echo.push((k, v));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if !seen_header {
            if line != CSV_HEADER {
                return Err(perr(format!("unexpected header `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(perr(format!("expected 7 fields, found {}", f.len())));
        }
        let x = |i: usize| f[i].parse::<f64>().map_err(|_| perr(format!("bad number `{}`", f[i])));
        let k: usize = f[0].parse().map_err(|_| perr(format!("bad k `{}`", f[0])))?;
        rows.push(CurveRow {
            k,
            k_over_n: x(1)?,
            s_tilde_mean: x(2)?,
            s_tilde_stderr: x(3)?,
            excluded_fraction: x(4)?,
            gibbs_entropy: x(5)?,
            giant_fraction: x(6)?,
            failed: 0,
        });
    }
    if !seen_header {
        return Err(Error::Parse { line: text.lines().count(), message: "missing CSV header".into() });
    }
    for (k, count) in failed {
        let r = rows.iter_mut().find(|r| r.k == k).ok_or_else(|| {
            Error::InvalidArgument(format!("failure count for k={k}, which has no row"))
        })?;
        r.failed = count;
    }
    let cfg = SweepConfig::from_echo(echo)?;
    Ok((cfg.clone(), EntropyCurve { n: cfg.n, rows }))
}

pub fn read_csv(path: &Path) -> Result<(SweepConfig, EntropyCurve)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    parse_csv(&text)
}
