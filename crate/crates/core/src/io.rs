//! CSV and JSON encodings of complex matrices and vectors.
//!
//! CSV rows interleave real and imaginary parts: `re(0), im(0), re(1), im(1), …`.
//! JSON encodes each complex number as a `[re, im]` pair.

use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};

use crate::error::{GlctError, Result};
use crate::scalar::{cplx, Cplx, Real};

pub fn complex_pair<T: Real>(z: Cplx<T>) -> [f64; 2] {
    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
}

pub fn vector_pairs<T: Real>(v: &DVector<Cplx<T>>) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_pair(z)).collect()
}

/// Row-major nested pairs.
pub fn matrix_pairs<T: Real>(m: &DMatrix<Cplx<T>>) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|&z| complex_pair(z)).collect()).collect()
}

pub fn vector_from_pairs<T: Real>(v: &[[f64; 2]]) -> DVector<Cplx<T>> {
    DVector::from_iterator(v.len(), v.iter().map(|p| cplx(T::lit(p[0]), T::lit(p[1]))))
}

pub fn write_complex_matrix_csv<T: Real, W: Write>(m: &DMatrix<Cplx<T>>, out: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in m.row_iter() {
        let rec: Vec<String> = row.iter().flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)]).collect();
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_complex_matrix_csv<T: Real, R: Read>(r: R) -> Result<DMatrix<Cplx<T>>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(r);
    let mut rows: Vec<Vec<Cplx<T>>> = Vec::new();
    for (idx, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = idx + 1;
        if rec.len() % 2 != 0 {
            return Err(GlctError::Parse { line, message: "odd number of columns".into() });
        }
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| GlctError::Parse { line, message: format!("'{s}': {e}") }))
            .collect::<Result<Vec<_>>>()?;
        let row: Vec<_> = vals.chunks(2).map(|p| cplx(T::lit(p[0]), T::lit(p[1]))).collect();
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(GlctError::Parse { line, message: "ragged row".into() });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Single-column signal file, one complex value per line as `re,im`.
pub fn write_signal_csv<T: Real, W: Write>(v: &DVector<Cplx<T>>, out: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["node_id", "re", "im"])?;
    for (i, z) in v.iter().enumerate() {
        wr.write_record(&[i.to_string(), format!("{:e}", z.re), format!("{:e}", z.im)])?;
    }
    wr.flush()?;
    Ok(())
}

/// Reads a signal with columns `node_id,value` (real) or `node_id,re,im`.
/// A header row is optional.
pub fn read_signal_csv<T: Real, R: Read>(r: R) -> Result<DVector<Cplx<T>>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(r);
    let mut vals = Vec::new();
    for (idx, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = idx + 1;
        if idx == 0 && rec.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let num = |k: usize| -> Result<f64> {
            let s = rec.get(k).ok_or_else(|| GlctError::Parse { line, message: format!("missing column {k}") })?;
            s.parse::<f64>().map_err(|e| GlctError::Parse { line, message: format!("'{s}': {e}") })
        };
        let id = num(0)? as usize;
        if id != vals.len() {
            return Err(GlctError::Parse { line, message: format!("expected node_id {}, found {id}", vals.len()) });
        }
        let im = if rec.len() > 2 { num(2)? } else { 0.0 };
        vals.push(cplx(T::lit(num(1)?), T::lit(im)));
    }
    Ok(DVector::from_vec(vals))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_csv_round_trip() {
        let m = DMatrix::from_fn(3, 2, |i, j| Cplx::new(i as f64 + 0.5, -(j as f64) / 3.0));
        let mut buf = Vec::new();
        write_complex_matrix_csv(&m, &mut buf).unwrap();
        let back: DMatrix<Cplx<f64>> = read_complex_matrix_csv(buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_csv_rejects_odd_columns() {
        let err = read_complex_matrix_csv::<f64, _>("1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, GlctError::Parse { line: 1, .. }));
    }

    #[test]
    fn signal_csv_round_trip_and_real_form() {
        let v = DVector::from_vec(vec![Cplx::new(1.0, 2.0), Cplx::new(-0.25, 0.0)]);
        let mut buf = Vec::new();
        write_signal_csv(&v, &mut buf).unwrap();
        assert_eq!(read_signal_csv::<f64, _>(buf.as_slice()).unwrap(), v);
        let real: DVector<Cplx<f64>> = read_signal_csv("node_id,value\n0,1.5\n1,2\n".as_bytes()).unwrap();
        assert_eq!(real[1], Cplx::new(2.0, 0.0));
        assert!(read_signal_csv::<f64, _>("node_id,value\n1,1.5\n".as_bytes()).is_err());
        let bare: DVector<Cplx<f64>> = read_signal_csv("0,1.5\n1,2,-1\n".as_bytes()).unwrap();
        assert_eq!(bare[1], Cplx::new(2.0, -1.0));
        assert!(matches!(read_signal_csv::<f64, _>("0,1\n1,x\n".as_bytes()), Err(GlctError::Parse { line: 2, .. })));
    }

    #[test]
    fn json_pairs() {
        let v = DVector::from_vec(vec![Cplx::new(1.0f64, -1.0)]);
        let p = vector_pairs(&v);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[1.0,-1.0]]");
        assert_eq!(vector_from_pairs::<f64>(&p), v);
    }
}
