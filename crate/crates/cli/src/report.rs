//! JSON encoding of report values. Every float is written with 17
//! significant digits so reports round-trip bit-exactly.

use kronsum::{CMatrix, Complex};
use serde_json::{Map, Number, Value};

pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    // arbitrary precision keeps the literal as written
    Value::Number(serde_json::from_str::<Number>(&text).expect("formatted float is a JSON number"))
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// A complex scalar as `[re, im]`.
pub fn complex(z: Complex) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}

pub fn complexes(values: &[Complex]) -> Value {
    Value::Array(values.iter().copied().map(complex).collect())
}

/// Same layout as an input file when square; real matrices use scalar
/// entries, anything else `[re, im]` pairs.
pub fn matrix(m: &CMatrix) -> Value {
    let real = m.is_real();
    let entries = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(|&z| if real { num(z.re) } else { complex(z) }).collect()))
        .collect();
    let mut obj = Map::new();
    if m.is_square() {
        obj.insert("n".into(), m.rows().into());
    } else {
        obj.insert("rows".into(), m.rows().into());
        obj.insert("cols".into(), m.cols().into());
    }
    obj.insert("entries".into(), Value::Array(entries));
    Value::Object(obj)
}

pub fn matrices(ms: &[CMatrix]) -> Value {
    Value::Array(ms.iter().map(matrix).collect())
}
