//! Helpers shared by the integration tests.

#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use serde_json::Value;

use densecert::exactnum::serde_fmt::{format_rational, parse_rational};
use densecert::Rational;

/// Paths to every scalar leaf of a JSON document.
fn leaves(v: &Value, path: &mut Vec<Value>, out: &mut Vec<Vec<Value>>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                path.push(Value::String(k.clone()));
                leaves(child, path, out);
                path.pop();
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                path.push(Value::from(i));
                leaves(child, path, out);
                path.pop();
            }
        }
        _ => out.push(path.clone()),
    }
}

fn leaf_mut<'a>(v: &'a mut Value, path: &[Value]) -> &'a mut Value {
    path.iter().fold(v, |node, key| match key {
        Value::String(k) => &mut node[k.as_str()],
        Value::Number(i) => &mut node[i.as_u64().unwrap() as usize],
        _ => unreachable!(),
    })
}

fn nonzero_delta(rng: &mut impl Rng) -> i64 {
    let d = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        d
    } else {
        -d
    }
}

/// Changes one randomly chosen leaf to a different value of the same shape.
/// Returns the mutated document and the path that changed.
pub fn mutate_one_field(doc: &Value, rng: &mut impl Rng) -> (Value, String) {
    let mut paths = Vec::new();
    leaves(doc, &mut Vec::new(), &mut paths);
    let path = &paths[rng.gen_range(0..paths.len())];
    let mut out = doc.clone();
    let leaf = leaf_mut(&mut out, path);
    let replacement = match &*leaf {
        Value::Bool(b) => Value::Bool(!b),
        Value::Number(n) => {
            let x = n.as_i64().unwrap_or(0);
            let y = x + nonzero_delta(rng);
            Value::from(if y < 0 { x + 1 } else { y })
        }
        Value::String(s) => {
            if let Ok(i) = s.parse::<BigInt>() {
                Value::String((i + nonzero_delta(rng)).to_string())
            } else if let Ok(r) = parse_rational(s) {
                let shift = Rational::new(BigInt::from(nonzero_delta(rng)), BigInt::from(1u64) << rng.gen_range(0..80));
                Value::String(format_rational(&(r + shift)))
            } else {
                Value::String(format!("{s}x"))
            }
        }
        Value::Null => Value::Bool(true),
        _ => unreachable!("leaves are scalars"),
    };
    *leaf = replacement;
    let label = path
        .iter()
        .map(|k| k.to_string().trim_matches('"').to_string())
        .collect::<Vec<_>>()
        .join(".");
    (out, label)
}

/// `Σ_{i=0}^{n} 1/i!` from scratch.
pub fn euler_sum(n: u64) -> Rational {
    let mut term = Rational::from_integer(1.into());
    let mut sum = term.clone();
    for i in 1..=n {
        term /= Rational::from_integer(i.into());
        sum += &term;
    }
    sum
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, i| acc * i)
}
