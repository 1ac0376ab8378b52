use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact header of a calibration CSV.
pub const CALIBRATION_HEADER: [&str; 7] = ["qubit", "t1_us", "t2_us", "freq_ghz", "readout_err", "x_err", "cnot_errs"];

/// Calibration of one physical qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub qubit: usize,
    pub t1_us: f64,
    pub t2_us: f64,
    /// Informational only.
    pub frequency_ghz: f64,
    pub readout_error: f64,
    pub pauli_x_error: f64,
    /// Neighbor qubit → CNOT error probability.
    pub cnot_errors: BTreeMap<usize, f64>,
}

impl CalibrationRecord {
    /// Checks positivity and probability ranges, then clamps `T2` to `2·T1`
    /// with a warning if it exceeds the physical bound.
    pub fn validated(mut self) -> Result<Self> {
        let q = self.qubit;
        if self.t1_us.is_nan() || self.t2_us.is_nan() || self.t1_us <= 0.0 || self.t2_us <= 0.0 {
            return Err(Error::Calibration(format!("qubit {q}: T1 and T2 must be positive")));
        }
        for (name, p) in [("readout_err", self.readout_error), ("x_err", self.pauli_x_error)]
            .into_iter()
            .chain(self.cnot_errors.values().map(|&p| ("cnot_errs", p)))
        {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Calibration(format!("qubit {q}: {name} {p} is not a probability")));
            }
        }
        if self.t2_us > 2.0 * self.t1_us + 1e-6 {
            log::warn!("qubit {q}: T2 = {} µs exceeds 2·T1 = {} µs; clamping", self.t2_us, 2.0 * self.t1_us);
            self.t2_us = 2.0 * self.t1_us;
        }
        Ok(self)
    }
}

/// Parses `cx<i>_<j>:<float>` tokens joined by `;` (trailing separators and
/// whitespace allowed). Returns `(i, j, error)` triples.
fn parse_cnot_tokens(field: &str, row: usize) -> Result<Vec<(usize, usize, f64)>> {
    let bad = |tok: &str| Error::Calibration(format!("row {row}: unparsable CNOT token {tok:?}"));
    field
        .split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|tok| {
            let (pair, value) = tok.split_once(':').ok_or_else(|| bad(tok))?;
            let (i, j) = pair.trim().strip_prefix("cx").and_then(|p| p.split_once('_')).ok_or_else(|| bad(tok))?;
            let i: usize = i.parse().map_err(|_| bad(tok))?;
            let j: usize = j.parse().map_err(|_| bad(tok))?;
            let v: f64 = value.trim().parse().map_err(|_| bad(tok))?;
            if i == j {
                return Err(bad(tok));
            }
            Ok((i, j, v))
        })
        .collect()
}

/// Reads calibration CSV from any reader. See [`load_calibration`].
pub fn parse_calibration<R: Read>(reader: R) -> Result<Vec<CalibrationRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Calibration(e.to_string()))?.clone();
    let mut col = BTreeMap::new();
    for name in CALIBRATION_HEADER {
        let idx = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Calibration(format!("missing column {name:?}")))?;
        col.insert(name, idx);
    }

    let mut records: Vec<CalibrationRecord> = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Calibration(format!("row {line}: {e}")))?;
        let field = |name: &str| row.get(col[name]).unwrap_or("");
        let num = |name: &str| -> Result<f64> {
            field(name)
                .parse()
                .map_err(|_| Error::Calibration(format!("row {line}: bad {name} value {:?}", field(name))))
        };
        let qubit: usize = field("qubit")
            .trim_start_matches(['Q', 'q'])
            .parse()
            .map_err(|_| Error::Calibration(format!("row {line}: bad qubit {:?}", field("qubit"))))?;
        let mut cnot_errors = BTreeMap::new();
        for (a, b, v) in parse_cnot_tokens(field("cnot_errs"), line)? {
            let neighbor = if a == qubit {
                b
            } else if b == qubit {
                a
            } else {
                return Err(Error::Calibration(format!("row {line}: token cx{a}_{b} does not involve qubit {qubit}")));
            };
            cnot_errors.insert(neighbor, v);
        }
        records.push(CalibrationRecord {
            qubit,
            t1_us: num("t1_us")?,
            t2_us: num("t2_us")?,
            frequency_ghz: num("freq_ghz")?,
            readout_error: num("readout_err")?,
            pauli_x_error: num("x_err")?,
            cnot_errors,
        });
    }
    if records.is_empty() {
        return Err(Error::Calibration("no records".into()));
    }

    // cx_i_j also registers under j's map unless j lists the pair itself.
    let listed: Vec<(usize, usize, f64)> =
        records.iter().flat_map(|r| r.cnot_errors.iter().map(move |(&n, &v)| (r.qubit, n, v))).collect();
    for (q, n, v) in listed {
        if let Some(r) = records.iter_mut().find(|r| r.qubit == n) {
            r.cnot_errors.entry(q).or_insert(v);
        }
    }
    records.into_iter().map(CalibrationRecord::validated).collect()
}

/// Loads a calibration CSV with header
/// `qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs`.
pub fn load_calibration(path: impl AsRef<Path>) -> Result<Vec<CalibrationRecord>> {
    let file =
        std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_calibration(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs
0,97.07,41.56,4.822,3.52e-2,2.73e-4,cx0_1:1.105e-2
1,179.27,106.63,4.76,1.56e-2,1.56e-4,cx1_3:6.796e-3;cx1_2:1.013e-2;cx1_0:1.105e-2
3,123.23,151.27,4.879,1.70e-2,3.40e-4,cx3_1:6.796e-3;cx3_5:1.139e-2
5,133.5,91.77,4.964,9.60e-3,3.17e-4,cx5_3:1.139e-2;cx5_4:1.148e-2;cx5_6:1.156e-2;
";

    #[test]
    fn parses_rows() {
        let recs = parse_calibration(SAMPLE.as_bytes()).unwrap();
        let q0 = &recs[0];
        assert_eq!(q0.t1_us, 97.07);
        assert_eq!(q0.t2_us, 41.56);
        assert_eq!(q0.readout_error, 3.52e-2);
        assert_eq!(q0.pauli_x_error, 2.73e-4);
        assert_eq!(q0.cnot_errors, BTreeMap::from([(1, 1.105e-2)]));
        let q5 = recs.iter().find(|r| r.qubit == 5).unwrap();
        assert_eq!(q5.cnot_errors, BTreeMap::from([(3, 1.139e-2), (4, 1.148e-2), (6, 1.156e-2)]));
    }

    #[test]
    fn empty_file_has_no_records() {
        let e = parse_calibration("qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs\n".as_bytes()).unwrap_err();
        assert_eq!(e, Error::Calibration("no records".into()));
        assert!(parse_calibration("".as_bytes()).is_err());
    }

    #[test]
    fn missing_column() {
        let e = parse_calibration("qubit,t1_us,t2_us\n0,1,1\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("missing column"), "{e}");
    }

    #[test]
    fn bad_cnot_token() {
        let src = "qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs\n0,1,1,5,0.01,0.001,cz0-1:0.1\n";
        let e = parse_calibration(src.as_bytes()).unwrap_err();
        assert!(e.to_string().contains("unparsable CNOT token"), "{e}");
    }

    #[test]
    fn symmetric_completion() {
        let src = "qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs\n0,100,50,5,0.01,0.001,cx0_1:0.02\n1,100,50,5,0.01,0.001,\n";
        let recs = parse_calibration(src.as_bytes()).unwrap();
        assert_eq!(recs[1].cnot_errors, BTreeMap::from([(0, 0.02)]));
    }

    #[test]
    fn t2_clamped() {
        let src = "qubit,t1_us,t2_us,freq_ghz,readout_err,x_err,cnot_errs\n0,10,30,5,0.01,0.001,\n";
        let recs = parse_calibration(src.as_bytes()).unwrap();
        assert_eq!(recs[0].t2_us, 20.0);
    }
}
