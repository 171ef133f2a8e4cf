//! Value-list syntax shared by config keys and `sweep --grid`.
//!
//! * `a:b:step`: `a, a + step, ...` up to `b` inclusive (empty when `a > b`)
//! * `log:a:b:n`: `n` log-spaced points from `a` to `b`
//! * `x,y,z`: explicit list
//! * empty string: empty list

use photometrix::optimize::logspace;

use crate::CliError;

/// Values are rounded to 12 significant digits so that `0.9:1.0:0.02` ends on
/// exactly `1.0` instead of a neighbouring double.
fn tidy(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn number(key: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{s}` as a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("`{key}`: `{s}` is not finite")));
    }
    Ok(v)
}

pub fn parse_values(key: &str, spec: &str) -> Result<Vec<f64>, CliError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(rest) = spec.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("`{key}`: expected log:a:b:n, got `{spec}`")));
        }
        let (a, b) = (number(key, parts[0])?, number(key, parts[1])?);
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("`{key}`: bad point count `{}`", parts[2])))?;
        if !(a > 0.0 && b > 0.0) {
            return Err(CliError::Config(format!("`{key}`: log grids need positive ends, got `{spec}`")));
        }
        return Ok(logspace(a, b, n).into_iter().map(tidy).collect());
    }
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Config(format!("`{key}`: expected a:b:step, got `{spec}`")));
        }
        let (a, b, step) = (number(key, parts[0])?, number(key, parts[1])?, number(key, parts[2])?);
        if !(step > 0.0) {
            return Err(CliError::Config(format!("`{key}`: step must be > 0, got `{spec}`")));
        }
        if a > b {
            return Ok(Vec::new());
        }
        // tolerate rounding in (b - a)/step
        let count = ((b - a) / step * (1.0 + 1e-12) + 1e-9).floor() as usize + 1;
        if count > 10_000_000 {
            return Err(CliError::Config(format!("`{key}`: `{spec}` has {count} points")));
        }
        return Ok((0..count).map(|k| tidy(a + k as f64 * step)).collect());
    }
    spec.split(',').map(|s| number(key, s)).collect()
}

/// Like [`parse_values`] but every value must be a non-negative integer.
pub fn parse_counts(key: &str, spec: &str) -> Result<Vec<usize>, CliError> {
    parse_values(key, spec)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(CliError::Config(format!("`{key}`: `{v}` is not a non-negative integer")))
            }
        })
        .collect()
}
