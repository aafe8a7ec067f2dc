//! JSON report values. Keys come out sorted, `-inf` becomes `null`,
//! integral values print without a decimal point and everything else is
//! rounded to 12 significant digits.

use serde_json::{Map, Number, Value};
use tropical_core::{TropicalMatrix, TropicalVector};

use crate::input::Semiring;

/// Largest magnitude at which every integer is exact in an `f64`.
const EXACT_INT: f64 = 9_007_199_254_740_992.0;

pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    if x.fract() == 0.0 && x.abs() < EXACT_INT {
        return Value::from(x as i64);
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded.fract() == 0.0 && rounded.abs() < EXACT_INT {
        return Value::from(rounded as i64);
    }
    Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone, Copy)]
pub struct Writer {
    pub semiring: Semiring,
}

impl Writer {
    pub fn scalar(&self, x: f64) -> Value {
        number(self.semiring.export(x))
    }

    pub fn row(&self, xs: &[f64]) -> Value {
        Value::Array(xs.iter().map(|&x| self.scalar(x)).collect())
    }

    pub fn matrix(&self, a: &TropicalMatrix) -> Value {
        Value::Array(a.rows().map(|r| self.row(r)).collect())
    }

    pub fn vector(&self, v: &TropicalVector) -> Value {
        self.row(v.entries())
    }
}

pub fn indices(xs: &[usize]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

pub fn object<const N: usize>(fields: [(&str, Value); N]) -> Value {
    Value::Object(
        fields
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect::<Map<_, _>>(),
    )
}
