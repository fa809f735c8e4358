//! Serialization helpers: reports are printed with 1-based indices.

use serde::ser::SerializeSeq;
use serde::Serializer;

pub fn one_based<S: Serializer>(value: &usize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(*value as u64 + 1)
}

pub fn one_based_vec<S: Serializer>(values: &[usize], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&(*v as u64 + 1))?;
    }
    seq.end()
}

pub fn one_based_pairs<S: Serializer>(values: &[(usize, usize)], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for (a, b) in values {
        seq.serialize_element(&(*a as u64 + 1, *b as u64 + 1))?;
    }
    seq.end()
}

pub fn one_based_vec_opt<S: Serializer>(values: &Option<Vec<usize>>, s: S) -> Result<S::Ok, S::Error> {
    match values {
        Some(v) => {
            let shifted: Vec<u64> = v.iter().map(|x| *x as u64 + 1).collect();
            s.serialize_some(&shifted)
        }
        None => s.serialize_none(),
    }
}
