//! JSON helpers. Every number in a document is written as a decimal string
//! so that big integers survive any JSON reader; on input both strings and
//! plain JSON integers are accepted.

use num_bigint::BigInt;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, Rat};

pub fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn count(x: usize) -> Value {
    Value::String(x.to_string())
}

pub fn rat(q: &Rat) -> Value {
    Value::String(q.to_string())
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn counts(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| count(x)).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    let mut obj = Map::new();
    obj.insert("rows".into(), count(m.rows()));
    obj.insert("cols".into(), count(m.cols()));
    obj.insert("entries".into(), ints(m.data()));
    Value::Object(obj)
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Format(format!("missing field `{key}`")))
}

pub fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| Error::Format(format!("`{what}` must be an array")))
}

pub fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Format(format!("`{what}` must be a string")))
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("not an integer: {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n
            .to_string()
            .parse()
            .expect("serde_json integer renders as decimal")),
        other => Err(Error::Format(format!("not an integer: {other}"))),
    }
}

pub fn parse_count(v: &Value) -> Result<usize> {
    let x = parse_int(v)?;
    usize::try_from(x).map_err(|_| Error::Format(format!("not a count: {v}")))
}

pub fn parse_rat(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("not a rational: {s:?}"))),
        _ => Ok(Rat::from_integer(parse_int(v)?)),
    }
}

pub fn parse_ints(v: &Value) -> Result<Vec<BigInt>> {
    as_array(v, "integer list")?.iter().map(parse_int).collect()
}

pub fn parse_counts(v: &Value) -> Result<Vec<usize>> {
    as_array(v, "count list")?.iter().map(parse_count).collect()
}

pub fn parse_matrix(v: &Value) -> Result<IntMatrix> {
    let rows = parse_count(field(v, "rows")?)?;
    let cols = parse_count(field(v, "cols")?)?;
    IntMatrix::new(rows, cols, parse_ints(field(v, "entries")?)?)
}

/// Canonical serialization: `serde_json` keeps object keys sorted, so equal
/// documents render to equal bytes.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn content_hash(v: &Value) -> String {
    sha256_hex(canonical(v).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn ints_accept_strings_and_numbers() {
        assert_eq!(parse_int(&json!("-12")).unwrap(), BigInt::from(-12));
        assert_eq!(parse_int(&json!(7)).unwrap(), BigInt::from(7));
        assert!(parse_int(&json!(1.5)).is_err());
        let big = "123456789012345678901234567890";
        assert_eq!(parse_int(&json!(big)).unwrap().to_string(), big);
    }

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rat(&json!("-3/6")).unwrap().to_string(), "-1/2");
        assert_eq!(parse_rat(&json!(4)).unwrap().to_string(), "4");
    }

    #[test]
    fn matrix_round_trip() {
        let m = IntMatrix::from_i64(2, 3, &[1, 2, 3, -4, 5, 6]).unwrap();
        assert_eq!(parse_matrix(&matrix(&m)).unwrap(), m);
    }
}
