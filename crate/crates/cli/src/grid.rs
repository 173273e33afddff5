//! Axis syntax for sweeps.
//!
//! Real axes accept `a,b,c` or `start:stop:count` (inclusive, evenly spaced).
//! Integer axes accept `a,b,c` or `start:stop` (inclusive).

use crate::error::CliError;

pub fn parse_real_axis(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|s| parse_real(name, s))
            .collect::<Result<Vec<_>, _>>()?,
        [start, stop, count] => {
            let start = parse_real(name, start)?;
            let stop = parse_real(name, stop)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| CliError::usage(format!("--{name}: bad point count {count:?}")))?;
            linspace(start, stop, count).ok_or_else(|| {
                CliError::usage(format!("--{name}: a range needs at least one point"))
            })?
        }
        _ => {
            return Err(CliError::usage(format!(
                "--{name}: expected a comma list or start:stop:count, got {text:?}"
            )))
        }
    };
    Ok(values)
}

pub fn parse_int_axis(name: &str, text: &str) -> Result<Vec<usize>, CliError> {
    let text = text.trim();
    let values: Vec<usize> = match text.split_once(':') {
        Some((a, b)) => {
            let a = parse_int(name, a)?;
            let b = parse_int(name, b)?;
            if a > b {
                return Err(CliError::usage(format!("--{name}: empty range {text:?}")));
            }
            (a..=b).collect()
        }
        None => text
            .split(',')
            .map(|s| parse_int(name, s))
            .collect::<Result<_, _>>()?,
    };
    Ok(values)
}

pub fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|s| parse_real(name, s)).collect()
}

fn parse_real(name: &str, s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(CliError::usage(format!("--{name}: {s:?} is not a finite number"))),
    }
}

fn parse_int(name: &str, s: &str) -> Result<usize, CliError> {
    let s = s.trim();
    s.parse()
        .map_err(|_| CliError::usage(format!("--{name}: {s:?} is not a nonnegative integer")))
}

/// `count` evenly spaced points from `start` to `stop`, both included.
pub fn linspace(start: f64, stop: f64, count: usize) -> Option<Vec<f64>> {
    match count {
        0 => None,
        1 => Some(vec![start]),
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            Some(
                (0..count)
                    .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                    .collect(),
            )
        }
    }
}
