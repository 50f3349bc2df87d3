//! Result documents. Every float is written with 17 significant digits so
//! that it parses back to the same `f64`.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use visicone::Vector;

/// A float that serializes as `d.dddddddddddddddde±x`.
#[derive(Debug, Clone, Copy)]
pub struct Num(pub f64);

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(fmt17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub fn nums(xs: &[f64]) -> Vec<Num> {
    xs.iter().copied().map(Num).collect()
}

pub fn vec(v: &Vector) -> Vec<Num> {
    nums(v.coords())
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("result documents always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            let s = serde_json::to_string(&Num(x)).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn nan_becomes_null() {
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }
}
