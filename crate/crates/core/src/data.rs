//! Binary instances and datasets.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },
    #[error("row {row}, column {col}: non-binary value `{value}`")]
    NonBinaryValue {
        row: usize,
        col: usize,
        value: String,
    },
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("duplicate feature name `{0}`")]
    DuplicateName(String),
    #[error("expected {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("instance is empty")]
    EmptyInstance,
}

/// A binary feature vector, optionally labeled.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instance {
    #[serde(with = "bits")]
    pub values: Vec<bool>,
    #[serde(default, with = "opt_bit", skip_serializing_if = "Option::is_none")]
    pub label: Option<bool>,
}

impl Instance {
    pub fn new(values: Vec<bool>) -> Instance {
        Instance {
            values,
            label: None,
        }
    }

    pub fn labeled(values: Vec<bool>, label: bool) -> Instance {
        Instance {
            values,
            label: Some(label),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Parses `"1,0,1"` (whitespace around entries is ignored).
    pub fn parse(text: &str) -> Result<Instance, DataError> {
        let values = text
            .split(',')
            .enumerate()
            .map(|(i, tok)| parse_bit(tok.trim(), 1, i + 1))
            .collect::<Result<Vec<bool>, _>>()?;
        Ok(Instance::new(values))
    }

    /// Copy with features in `flips` inverted.
    pub fn flipped(&self, flips: impl IntoIterator<Item = usize>) -> Instance {
        let mut values = self.values.clone();
        for i in flips {
            values[i] = !values[i];
        }
        Instance::new(values)
    }

    pub fn to_csv_line(&self) -> String {
        let mut s = String::with_capacity(self.values.len() * 2);
        for (i, &b) in self.values.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push(if b { '1' } else { '0' });
        }
        s
    }
}

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<Instance>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>, rows: Vec<Instance>) -> Result<Dataset, DataError> {
        let mut seen = HashSet::new();
        for n in &feature_names {
            if !seen.insert(n) {
                return Err(DataError::DuplicateName(n.clone()));
            }
        }
        for r in &rows {
            if r.len() != feature_names.len() {
                return Err(DataError::ArityMismatch {
                    expected: feature_names.len(),
                    got: r.len(),
                });
            }
        }
        Ok(Dataset {
            feature_names,
            rows,
        })
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Reads a CSV file whose header names the features. When `label_col` is
    /// given, that column becomes the row label instead of a feature.
    pub fn from_csv_path(path: &Path, label_col: Option<&str>) -> Result<Dataset, DataError> {
        let file = std::fs::File::open(path)?;
        Dataset::from_csv_reader(file, label_col)
    }

    /// Rows and columns in errors are 1-based file coordinates (the header is
    /// row 1).
    pub fn from_csv_reader<R: Read>(
        reader: R,
        label_col: Option<&str>,
    ) -> Result<Dataset, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_err(e, 1))?.clone();
        let label_idx = match label_col {
            Some(name) => Some(
                header
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| DataError::MissingLabelColumn(name.to_string()))?,
            ),
            None => None,
        };
        let names: Vec<String> = header
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_idx)
            .map(|(_, h)| h.to_string())
            .collect();
        let mut rows = Vec::new();
        for (k, rec) in rdr.records().enumerate() {
            let row = k + 2;
            let rec = rec.map_err(|e| csv_err(e, row))?;
            if rec.len() != header.len() {
                return Err(DataError::Parse {
                    row,
                    col: rec.len().min(header.len()) + 1,
                    message: format!("expected {} fields, found {}", header.len(), rec.len()),
                });
            }
            let mut values = Vec::with_capacity(names.len());
            let mut label = None;
            for (c, field) in rec.iter().enumerate() {
                let bit = parse_bit(field, row, c + 1)?;
                if Some(c) == label_idx {
                    label = Some(bit);
                } else {
                    values.push(bit);
                }
            }
            rows.push(Instance { values, label });
        }
        Dataset::new(names, rows)
    }
}

fn parse_bit(tok: &str, row: usize, col: usize) -> Result<bool, DataError> {
    match tok {
        "0" => Ok(false),
        "1" => Ok(true),
        "" => Err(DataError::Parse {
            row,
            col,
            message: "empty field".into(),
        }),
        other => Err(DataError::NonBinaryValue {
            row,
            col,
            value: other.to_string(),
        }),
    }
}

fn csv_err(e: csv::Error, row: usize) -> DataError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => DataError::Io(io),
        other => DataError::Parse {
            row,
            col: 0,
            message: format!("{other:?}"),
        },
    }
}

pub(crate) mod bits {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(serde::de::Error::custom("expected 0 or 1")),
            })
            .collect()
    }
}

pub(crate) mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(serde::de::Error::custom("expected 0 or 1")),
        }
    }
}

pub(crate) mod opt_bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<bool>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(b) => s.serialize_some(&u8::from(*b)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<bool>, D::Error> {
        match Option::<u8>::deserialize(d)? {
            None => Ok(None),
            Some(0) => Ok(Some(false)),
            Some(1) => Ok(Some(true)),
            Some(_) => Err(serde::de::Error::custom("expected 0 or 1")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_toy_file() {
        let d = Dataset::from_csv_reader("a,b\n0,1\n1,1\n".as_bytes(), None).unwrap();
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.rows.len(), 2);
        assert_eq!(d.rows[0].values, vec![false, true]);
    }

    #[test]
    fn label_column_is_split_off() {
        let d = Dataset::from_csv_reader("a,y,b\n0,1,1\n".as_bytes(), Some("y")).unwrap();
        assert_eq!(d.feature_names, vec!["a", "b"]);
        assert_eq!(d.rows[0], Instance::labeled(vec![false, true], true));
        assert!(matches!(
            Dataset::from_csv_reader("a,b\n0,1\n".as_bytes(), Some("y")),
            Err(DataError::MissingLabelColumn(_))
        ));
    }

    #[test]
    fn non_binary_value_has_coordinates() {
        let err = Dataset::from_csv_reader("a,b\n0,1\n1,2\n".as_bytes(), None).unwrap_err();
        match err {
            DataError::NonBinaryValue { row, col, value } => {
                assert_eq!((row, col, value.as_str()), (3, 2, "2"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn ragged_row_is_a_parse_error() {
        assert!(matches!(
            Dataset::from_csv_reader("a,b\n0\n".as_bytes(), None),
            Err(DataError::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        assert!(matches!(
            Dataset::from_csv_reader("a,a\n0,1\n".as_bytes(), None),
            Err(DataError::DuplicateName(_))
        ));
    }

    #[test]
    fn hamming_basics() {
        let x = [true, false, true];
        let y = [false, false, false];
        assert_eq!(hamming(&x, &x), 0);
        assert_eq!(hamming(&x, &y), 2);
        assert_eq!(hamming(&y, &x), 2);
    }

    #[test]
    fn instance_json_uses_bits() {
        let i = Instance::labeled(vec![true, false], false);
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(s, r#"{"values":[1,0],"label":0}"#);
        assert_eq!(serde_json::from_str::<Instance>(&s).unwrap(), i);
        assert_eq!(
            Instance::parse("1, 0,1").unwrap().values,
            vec![true, false, true]
        );
        assert!(Instance::parse("1,2").is_err());
    }
}
