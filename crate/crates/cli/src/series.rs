//! Time-series rows for `flow` output.
//!
//! Column order: `t`, the upper triangle of ω as `omega_i_j` (i < j,
//! lexicographic, 1-based), all n² entries of J as `J_i_j` (row-major),
//! `norm_N_sq`, `norm_R_sq`, `drift_Jsq`, `drift_compat`, `drift_closed`,
//! `min_eig_g`, then one column per conserved quantity of the source family.
//!
//! CSV values are written as `{:.16e}`: 17 significant digits, enough to
//! recover every f64 bit-exactly. A missing conserved value is written as
//! `NaN`.

use std::io::{Read, Write};

use scflab::flow::{FlowDiagnostics, FlowState};
use scflab::{Endomorphism, TwoForm};
use serde_json::{Map, Value};

use crate::config::Format;

pub fn columns(n: usize, conserved: &[&str]) -> Vec<String> {
    let mut cols = vec!["t".to_owned()];
    for i in 1..=n {
        for j in i + 1..=n {
            cols.push(format!("omega_{i}_{j}"));
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            cols.push(format!("J_{i}_{j}"));
        }
    }
    for c in ["norm_N_sq", "norm_R_sq", "drift_Jsq", "drift_compat", "drift_closed", "min_eig_g"] {
        cols.push(c.to_owned());
    }
    cols.extend(conserved.iter().map(|s| s.to_string()));
    cols
}

pub fn values(state: &FlowState, diag: &FlowDiagnostics, conserved: &[&str]) -> Vec<f64> {
    let mut v = vec![state.t];
    v.extend(state.omega.upper_triangle());
    v.extend(state.j.row_major());
    v.extend([
        diag.norm_n_sq,
        diag.norm_r_sq,
        diag.drift_jsq,
        diag.drift_compat,
        diag.drift_closed,
        diag.min_eig_g,
    ]);
    for name in conserved {
        let found = diag.conserved.iter().find(|(k, _)| k == name).map(|(_, x)| *x);
        v.push(found.unwrap_or(f64::NAN));
    }
    v
}

/// Rebuild the state stored in a row written for dimension `n`.
pub fn state_from_row(n: usize, row: &[f64]) -> scflab::Result<FlowState> {
    let m = n * (n - 1) / 2;
    let omega = TwoForm::from_upper_triangle(n, &row[1..1 + m])?;
    let j = Endomorphism::from_row_major(n, &row[1 + m..1 + m + n * n])?;
    Ok(FlowState::new(row[0], omega, j))
}

pub struct SeriesWriter<W: Write> {
    format: Format,
    columns: Vec<String>,
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
}

impl<W: Write> SeriesWriter<W> {
    pub fn new(out: W, format: Format, columns: Vec<String>) -> std::io::Result<Self> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&columns)?;
                Ok(Self {
                    format,
                    columns,
                    csv: Some(w),
                    raw: None,
                })
            }
            Format::Jsonl => Ok(Self {
                format,
                columns,
                csv: None,
                raw: Some(out),
            }),
        }
    }

    pub fn write_row(&mut self, row: &[f64]) -> std::io::Result<()> {
        debug_assert_eq!(row.len(), self.columns.len());
        match self.format {
            Format::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(row.iter().map(|x| format!("{x:.16e}")))?;
            }
            Format::Jsonl => {
                let mut obj = Map::new();
                for (name, x) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), Value::from(*x));
                }
                let w = self.raw.as_mut().expect("jsonl writer");
                serde_json::to_writer(&mut *w, &obj)?;
                w.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    /// Flush and hand back the underlying writer.
    pub fn finish(self) -> std::io::Result<W> {
        match (self.csv, self.raw) {
            (Some(w), _) => w.into_inner().map_err(|e| e.into_error()),
            (None, Some(mut w)) => {
                w.flush()?;
                Ok(w)
            }
            (None, None) => unreachable!(),
        }
    }
}

/// Parse a CSV series back into its header and numeric rows.
pub fn read_csv<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<f64>>), Box<dyn std::error::Error>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(rec.iter().map(str::parse::<f64>).collect::<Result<Vec<_>, _>>()?);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use scflab::catalog::heisenberg_sum;
    use scflab::flow::{integrate_entry, IntegratorConfig};

    #[test]
    fn column_layout() {
        let cols = columns(4, &["c"]);
        assert_eq!(cols.len(), 1 + 6 + 16 + 6 + 1);
        assert_eq!(cols[1], "omega_1_2");
        assert_eq!(cols[6], "omega_3_4");
        assert_eq!(cols[7], "J_1_1");
        assert_eq!(cols[8], "J_1_2");
        assert_eq!(cols[22], "J_4_4");
        assert_eq!(cols[23], "norm_N_sq");
        assert_eq!(cols[29], "c");
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let e = heisenberg_sum(1.3, 0.7, 2.1).unwrap();
        let cfg = IntegratorConfig {
            record_every: 7,
            ..IntegratorConfig::new(0.3, 1e-2)
        };
        let traj = integrate_entry(&e, &cfg).unwrap();
        let names = e.conserved_names();
        let cols = columns(6, &names);
        let mut w = SeriesWriter::new(Vec::new(), Format::Csv, cols.clone()).unwrap();
        let rows: Vec<Vec<f64>> = traj.records.iter().map(|(s, d)| values(s, d, &names)).collect();
        for row in &rows {
            w.write_row(row).unwrap();
        }
        let bytes = w.finish().unwrap();
        let (header, back) = read_csv(bytes.as_slice()).unwrap();
        assert_eq!(header, cols);
        assert_eq!(back.len(), traj.records.len());
        for ((row, orig), (state, _)) in back.iter().zip(&rows).zip(&traj.records) {
            let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(row), bits(orig));
            assert_eq!(&state_from_row(6, row).unwrap(), state);
        }
    }

    #[test]
    fn jsonl_rows_are_objects() {
        let cols = columns(2, &[]);
        let mut w = SeriesWriter::new(Vec::new(), Format::Jsonl, cols.clone()).unwrap();
        let row: Vec<f64> = (0..cols.len()).map(|i| i as f64 * 0.1).collect();
        w.write_row(&row).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        let v: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(v["J_2_1"], Value::from(0.4));
        assert_eq!(v.as_object().unwrap().len(), cols.len());
    }
}
