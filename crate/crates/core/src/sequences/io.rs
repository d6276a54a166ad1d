//! Column CSV (`j,k,value`) and compact JSON forms of [`Coefficients`].

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarregError};

use super::{Coefficients, LeveledIndexSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsJson {
    pub d: u32,
    pub levels: Vec<usize>,
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub flat: bool,
}

impl CoefficientsJson {
    pub fn from_coefficients(x: &Coefficients) -> Self {
        let set = x.index_set();
        CoefficientsJson {
            d: set.d(),
            levels: set.level_sizes().to_vec(),
            values: x.values().to_vec(),
            flat: set.is_flat(),
        }
    }

    pub fn into_coefficients(self) -> Result<Coefficients> {
        let set = if self.flat {
            if self.levels.len() != 1 {
                return Err(VarregError::Parse("a flat index set has exactly one level".into()));
            }
            LeveledIndexSet::flat(self.levels[0])?
        } else {
            index_set_from_sizes(self.d, self.levels)?
        };
        Coefficients::new(Arc::new(set), self.values)
    }
}

/// Leveled set whose C_Λ is the smallest constant that admits the sizes.
///
/// A single level with more than one coordinate is read as a flat set.
pub(crate) fn index_set_from_sizes(d: u32, sizes: Vec<usize>) -> Result<LeveledIndexSet> {
    if sizes.len() == 1 && sizes[0] != 1 {
        return LeveledIndexSet::flat(sizes[0]);
    }
    let c = sizes.iter().enumerate().map(|(j, &n)| n as f64 / 2f64.powi((j as u32 * d) as i32)).fold(1.0, f64::max);
    LeveledIndexSet::leveled(d, sizes, c)
}

pub fn write_json<W: Write>(x: &Coefficients, writer: W) -> Result<()> {
    serde_json::to_writer_pretty(writer, &CoefficientsJson::from_coefficients(x))?;
    Ok(())
}

pub fn read_json<R: Read>(reader: R) -> Result<Coefficients> {
    let parsed: CoefficientsJson = serde_json::from_reader(reader)?;
    parsed.into_coefficients()
}

pub fn write_csv<W: Write>(x: &Coefficients, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["j", "k", "value"])?;
    let set = x.index_set();
    for j in 0..set.num_levels() {
        for (k, v) in x.level(j).iter().enumerate() {
            w.write_record([j.to_string(), k.to_string(), format!("{v:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads `j,k,value` rows. Rows must be level-major with `k` counting from 0
/// inside each level; the level sizes are taken from the row counts.
pub fn read_csv<R: Read>(reader: R, d: u32) -> Result<Coefficients> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["j", "k", "value"] {
        return Err(VarregError::Parse(format!("expected header j,k,value, found {:?}", headers)));
    }
    let mut sizes: Vec<usize> = Vec::new();
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field =
            |i: usize| record.get(i).ok_or_else(|| VarregError::Parse(format!("row {}: missing field", line + 1)));
        let j: usize = field(0)?.parse().map_err(|e| VarregError::Parse(format!("row {}: j: {e}", line + 1)))?;
        let k: usize = field(1)?.parse().map_err(|e| VarregError::Parse(format!("row {}: k: {e}", line + 1)))?;
        let v: f64 = field(2)?.parse().map_err(|e| VarregError::Parse(format!("row {}: value: {e}", line + 1)))?;
        if j == sizes.len() && k == 0 {
            sizes.push(0);
        }
        if sizes.len() != j + 1 || sizes[j] != k {
            return Err(VarregError::Parse(format!("row {}: (j,k) = ({j},{k}) breaks level-major order", line + 1)));
        }
        sizes[j] += 1;
        values.push(v);
    }
    if sizes.is_empty() {
        return Err(VarregError::Empty("coefficient CSV has no rows".into()));
    }
    let set = index_set_from_sizes(d, sizes)?;
    Coefficients::new(Arc::new(set), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let set = Arc::new(LeveledIndexSet::dyadic(1, 2).unwrap());
        let x = Coefficients::new(set, (0..7).map(|i| (i as f64).sin() * 1e-7).collect()).unwrap();
        let mut buf = Vec::new();
        write_csv(&x, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("j,k,value\n0,0,"));
        let back = read_csv(buf.as_slice(), 1).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn csv_rejects_bad_order() {
        let text = "j,k,value\n0,0,1\n1,1,2\n";
        assert!(read_csv(text.as_bytes(), 1).is_err());
        assert!(read_csv("j,k,value\n".as_bytes(), 1).is_err());
        assert!(read_csv("a,b,c\n0,0,1\n".as_bytes(), 1).is_err());
    }

    #[test]
    fn csv_single_level_is_flat() {
        let x = read_csv("j,k,value\n0,0,1\n0,1,2\n0,2,3\n".as_bytes(), 1).unwrap();
        assert!(x.index_set().is_flat());
        assert_eq!(x.values(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn json_round_trip() {
        let x = Coefficients::flat(vec![1.0, -2.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_json(&x, &mut buf).unwrap();
        assert_eq!(read_json(buf.as_slice()).unwrap(), x);

        let set = Arc::new(LeveledIndexSet::dyadic(2, 1).unwrap());
        let y = Coefficients::new(set, vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let text = serde_json::to_string(&CoefficientsJson::from_coefficients(&y)).unwrap();
        assert_eq!(text, r#"{"d":2,"levels":[1,4],"values":[1.0,2.0,3.0,4.0,5.0]}"#);
        assert_eq!(read_json(text.as_bytes()).unwrap(), y);
    }
}
