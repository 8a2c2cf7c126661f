use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;
use toric_core::geometry::RawConfig;
use toric_core::{
    ControlPoints, LiftingFunction, PointConfig, Projection, Triangulation, WeightVector,
};

use crate::CliError;

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn decode<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_value(read_json(path)?)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn required<'a>(p: &'a Option<std::path::PathBuf>, flag: &str) -> Result<&'a Path, CliError> {
    p.as_deref()
        .ok_or_else(|| CliError::Parse(format!("--{flag} is required for this command")))
}

pub fn config(path: &Path) -> Result<PointConfig, CliError> {
    let raw: RawConfig = decode(path)?;
    Ok(PointConfig::try_from(raw)?)
}

/// A list whose entries are numbers (1-vectors) or arrays of numbers.
pub fn point_list(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = || CliError::Parse(format!("{}: expected a list of points", path.display()));
    let Value::Array(items) = read_json(path)? else {
        return Err(bad());
    };
    items
        .iter()
        .map(|item| match item {
            Value::Number(n) => n.as_f64().map(|v| vec![v]).ok_or_else(bad),
            Value::Array(cs) => cs.iter().map(|c| c.as_f64().ok_or_else(bad)).collect(),
            _ => Err(bad()),
        })
        .collect()
}

pub fn controls(path: &Path, n: usize) -> Result<ControlPoints, CliError> {
    let b = ControlPoints::new(point_list(path)?)?;
    if b.len() != n {
        return Err(CliError::Domain(format!(
            "{} control points for {n} exponents",
            b.len()
        )));
    }
    Ok(b)
}

pub fn weights(path: Option<&Path>, n: usize) -> Result<WeightVector, CliError> {
    let Some(path) = path else {
        return Ok(WeightVector::ones(n));
    };
    let w = WeightVector::new(decode(path)?)?;
    if w.len() != n {
        return Err(CliError::Domain(format!(
            "{} weights for {n} exponents",
            w.len()
        )));
    }
    Ok(w)
}

pub fn lifting(path: &Path) -> Result<LiftingFunction, CliError> {
    Ok(LiftingFunction::new(decode(path)?)?)
}

pub fn projection(path: &Path) -> Result<Projection, CliError> {
    decode(path)
}

pub fn triangulation(path: &Path) -> Result<Triangulation, CliError> {
    decode(path)
}
