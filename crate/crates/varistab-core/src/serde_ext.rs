//! Serialization helpers for extended reals.
//!
//! JSON has no infinities; `±∞` values are emitted as the strings
//! `"+inf"` / `"-inf"` so reports stay valid JSON and byte-stable.

use serde::ser::SerializeSeq;
use serde::Serializer;

use crate::ExtReal;

pub fn ser_ext<S: Serializer>(v: &ExtReal, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ser_opt<S: Serializer>(v: &Option<ExtReal>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(x) => ser_ext(x, s),
    }
}

pub fn ser_vec<S: Serializer>(v: &[ExtReal], s: S) -> Result<S::Ok, S::Error> {
    struct Ext(ExtReal);
    impl serde::Serialize for Ext {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ser_ext(&self.0, s)
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Ext(*x))?;
    }
    seq.end()
}
