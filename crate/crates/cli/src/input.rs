//! Matrix and Jordan-structure files.
//!
//! A matrix file is `{"n": 2, "entries": [[1, 2], [3, [0, 1]]]}`: each entry
//! is a real number or a `[re, im]` pair.

use std::fs;
use std::path::Path;

use kronsum::spectral::JordanSpec;
use kronsum::{CMatrix, Complex};
use serde_json::Value;

use crate::CliError;

pub fn load_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let value = read_json(path)?;
    parse_matrix(&value).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

/// `{"blocks": [{"value": 2, "sizes": [2, 1]}, ...], "transform": <matrix>}`
/// with `transform` optional.
pub fn load_jordan_spec(path: &Path) -> Result<JordanSpec, CliError> {
    let value = read_json(path)?;
    parse_jordan_spec(&value).map_err(|msg| CliError::Usage(format!("{}: {msg}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("{}: parse error at line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })
}

pub fn parse_matrix(value: &Value) -> Result<CMatrix, String> {
    let obj = value.as_object().ok_or("expected an object with fields \"n\" and \"entries\"")?;
    let n = obj.get("n").ok_or("missing field \"n\"")?;
    let n = n.as_u64().ok_or_else(|| format!("\"n\" must be a non-negative integer, got {n}"))? as usize;
    let rows = obj.get("entries").ok_or("missing field \"entries\"")?;
    let rows = rows.as_array().ok_or("\"entries\" must be an array of rows")?;
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| format!("row {} is not an array", i + 1))?;
        if row.len() != rows[0].as_array().map_or(0, Vec::len) {
            return Err(format!(
                "ragged entries: row {} has {} entries but row 1 has {}",
                i + 1,
                row.len(),
                rows[0].as_array().map_or(0, Vec::len)
            ));
        }
        for (j, entry) in row.iter().enumerate() {
            data.push(parse_entry(entry).map_err(|msg| format!("row {}, column {}: {msg}", i + 1, j + 1))?);
        }
    }
    let cols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    if rows.len() != cols {
        return Err(format!("matrix is not square: {} rows of {} entries", rows.len(), cols));
    }
    if rows.is_empty() {
        return Err("matrix has no entries".into());
    }
    if rows.len() != n {
        return Err(format!("\"n\" is {n} but the entries form a {0}x{0} matrix", rows.len()));
    }
    CMatrix::new(n, n, data).map_err(|e| e.to_string())
}

fn parse_entry(entry: &Value) -> Result<Complex, String> {
    match entry {
        Value::Number(_) => Ok(Complex::new(parse_number(entry)?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => Ok(Complex::new(parse_number(&pair[0])?, parse_number(&pair[1])?)),
        other => Err(format!("expected a number or a [re, im] pair, got {other}")),
    }
}

fn parse_number(v: &Value) -> Result<f64, String> {
    if !v.is_number() {
        return Err(format!("expected a number, got {v}"));
    }
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(format!("entry {v} is not a finite double")),
    }
}

pub fn parse_jordan_spec(value: &Value) -> Result<JordanSpec, String> {
    let obj = value.as_object().ok_or("expected an object with a \"blocks\" field")?;
    let blocks = obj.get("blocks").and_then(Value::as_array).ok_or("\"blocks\" must be an array")?;
    let mut parsed = Vec::with_capacity(blocks.len());
    for (k, block) in blocks.iter().enumerate() {
        let value = block.get("value").ok_or_else(|| format!("block {}: missing \"value\"", k + 1))?;
        let value = parse_entry(value).map_err(|msg| format!("block {}: {msg}", k + 1))?;
        let sizes = block
            .get("sizes")
            .and_then(Value::as_array)
            .ok_or_else(|| format!("block {}: \"sizes\" must be an array", k + 1))?;
        let sizes = sizes
            .iter()
            .map(|s| s.as_u64().filter(|&s| s > 0).map(|s| s as usize))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| format!("block {}: sizes must be positive integers", k + 1))?;
        if sizes.is_empty() {
            return Err(format!("block {}: no sizes given", k + 1));
        }
        parsed.push((value, sizes));
    }
    if parsed.is_empty() {
        return Err("no blocks given".into());
    }
    let spec = JordanSpec::new(parsed);
    match obj.get("transform") {
        None | Some(Value::Null) => Ok(spec),
        Some(t) => {
            let p = parse_matrix(t).map_err(|msg| format!("transform: {msg}"))?;
            if p.rows() != spec.order() {
                return Err(format!(
                    "transform has order {} but the blocks have total order {}",
                    p.rows(),
                    spec.order()
                ));
            }
            Ok(spec.with_transform(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CMatrix, String> {
        parse_matrix(&serde_json::from_str(text).unwrap())
    }

    #[test]
    fn real_and_complex_entries() {
        let m = parse(r#"{"n":2,"entries":[[1,2],[3,4]]}"#).unwrap();
        assert!(m.is_real());
        assert_eq!(m[(1, 0)], Complex::new(3.0, 0.0));
        let m = parse(r#"{"n":1,"entries":[[[0,1]]]}"#).unwrap();
        assert_eq!(m[(0, 0)], Complex::new(0.0, 1.0));
    }

    #[test]
    fn malformed_files_are_named() {
        let err = parse(r#"{"n":2,"entries":[[1,2],[3]]}"#).unwrap_err();
        assert!(err.contains("row 2"), "{err}");
        let err = parse(r#"{"n":2,"entries":[[1,2,3],[4,5,6]]}"#).unwrap_err();
        assert!(err.contains("2 rows of 3"), "{err}");
        let err = parse(r#"{"n":3,"entries":[[1]]}"#).unwrap_err();
        assert!(err.contains("1x1"), "{err}");
        let err = parse(r#"{"n":1,"entries":[["x"]]}"#).unwrap_err();
        assert!(err.contains("row 1, column 1"), "{err}");
        let err = parse(r#"{"n":1,"entries":[[1e400]]}"#).unwrap_err();
        assert!(err.contains("finite"), "{err}");
        assert!(parse(r#"[1, 2]"#).is_err());
    }

    #[test]
    fn jordan_spec_with_transform() {
        let v =
            serde_json::from_str(r#"{"blocks":[{"value":0,"sizes":[2]}],"transform":{"n":2,"entries":[[1,1],[0,1]]}}"#)
                .unwrap();
        let spec = parse_jordan_spec(&v).unwrap();
        assert_eq!(spec.order(), 2);
        assert!(spec.transform.is_some());
        let bad = serde_json::from_str(r#"{"blocks":[{"value":0,"sizes":[2]}],"transform":{"n":1,"entries":[[1]]}}"#)
            .unwrap();
        assert!(parse_jordan_spec(&bad).is_err());
    }
}
