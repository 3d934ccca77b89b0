//! Signal tables, noise injection and generated stand-in datasets.
//!
//! A signal table has header `node_id,t_0,t_1,…` and one row per node. Node
//! coordinates use the `id,x,y` layout read by `glct_core::graph::read_coords`.

use std::fs::File;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};

use glct_core::graph::{read_coords, write_coords, GraphSignal};
use glct_core::{GlctError, Result};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Published real-data protocol: dataset name and its three evaluation times.
#[derive(Debug, Clone, Copy)]
pub struct DatasetProtocol {
    pub name: &'static str,
    pub times: [usize; 3],
}

pub const DATASETS: [DatasetProtocol; 3] = [
    DatasetProtocol { name: "sst", times: [200, 500, 800] },
    DatasetProtocol { name: "pm25", times: [50, 125, 200] },
    DatasetProtocol { name: "covid", times: [50, 80, 110] },
];

/// Station count of every real-data graph.
pub const STATIONS: usize = 50;

/// Mixes `parts` into `base`; used to give every suite cell its own stream.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    // splitmix64 finalizer
    let mix = |mut z: u64| {
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ p.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}

fn parse_err(line: usize, message: impl Into<String>) -> GlctError {
    GlctError::Parse { line, message: message.into() }
}

/// Node-by-time table: `columns[t]` holds the time index of column `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTable {
    pub times: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl SignalTable {
    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    /// Signal at time index `time`.
    pub fn signal(&self, time: usize) -> Result<GraphSignal<f64>> {
        let col = self
            .times
            .iter()
            .position(|&t| t == time)
            .ok_or_else(|| GlctError::InvalidParameter(format!("no column t_{time} in signal table")))?;
        Ok(GraphSignal::from_real(&self.values.iter().map(|row| row[col]).collect::<Vec<_>>()))
    }
}

/// Parses a signal table; rows may come in any order but node ids must cover
/// `0..n` exactly once.
pub fn read_signal_table<R: Read>(r: R) -> Result<SignalTable> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(r);
    let mut records = rd.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(parse_err(1, "empty signal table")),
    };
    if header.get(0) != Some("node_id") {
        return Err(parse_err(1, "first header column must be node_id"));
    }
    let times = header
        .iter()
        .skip(1)
        .map(|h| h.strip_prefix("t_").and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| parse_err(1, format!("bad time column '{h}'"))))
        .collect::<Result<Vec<_>>>()?;

    let mut rows: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    for (idx, rec) in records.enumerate() {
        let rec = rec?;
        let line = idx + 2;
        if rec.len() != times.len() + 1 {
            return Err(parse_err(line, format!("expected {} fields, found {}", times.len() + 1, rec.len())));
        }
        let id: usize = rec[0].parse().map_err(|_| parse_err(line, format!("bad node_id '{}'", &rec[0])))?;
        let vals = rec
            .iter()
            .skip(1)
            .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| parse_err(line, format!("non-numeric cell '{c}'"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push((id, vals, line));
    }
    rows.sort_by_key(|r| r.0);
    for (expect, (id, _, line)) in rows.iter().enumerate() {
        if *id != expect {
            return Err(parse_err(*line, format!("node_id {expect} missing or duplicated")));
        }
    }
    Ok(SignalTable { times, values: rows.into_iter().map(|r| r.1).collect() })
}

pub fn write_signal_table(table: &SignalTable, path: &Path) -> Result<()> {
    let mut wr = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header = vec!["node_id".to_string()];
    header.extend(table.times.iter().map(|t| format!("t_{t}")));
    wr.write_record(&header)?;
    for (i, row) in table.values.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|v| format!("{v:e}")));
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

/// Station coordinates and the clean signals at `times`.
#[derive(Debug, Clone)]
pub struct Snapshots {
    pub coords: Vec<Vec<f64>>,
    pub signals: Vec<GraphSignal<f64>>,
}

pub fn load_snapshots(coords_csv: &Path, signals_csv: &Path, times: &[usize]) -> Result<Snapshots> {
    let coords = read_coords(File::open(coords_csv)?)?;
    let table = read_signal_table(File::open(signals_csv)?)?;
    if table.nodes() != coords.len() {
        return Err(GlctError::DimensionMismatch { expected: coords.len(), found: table.nodes() });
    }
    let signals = times.iter().map(|&t| table.signal(t)).collect::<Result<Vec<_>>>()?;
    Ok(Snapshots { coords, signals })
}

/// `f + s·z` with `z` i.i.d. standard normal (real) from a seeded stream.
pub fn add_noise(f: &GraphSignal<f64>, s: f64, seed: u64) -> Result<GraphSignal<f64>> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(GlctError::InvalidParameter(format!("noise level {s} must be finite and >= 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = f.values().map(|z| {
        let e: f64 = StandardNormal.sample(&mut rng);
        z + nalgebra::Complex::new(s * e, 0.0)
    });
    Ok(GraphSignal::new(v))
}

/// Smooth spatio-temporal field sampled at `n` random stations for times
/// `0..=horizon`.
///
/// Three gaussian blobs drift along closed orbits over the unit square on top of
/// a slow seasonal swing, so neighbouring stations carry correlated values.
pub fn generate_stand_in(n: usize, horizon: usize, seed: u64) -> (Vec<Vec<f64>>, SignalTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.random::<f64>(), rng.random::<f64>()]).collect();
    let blobs: Vec<[f64; 5]> = (0..3)
        .map(|_| {
            [
                1.0 + 2.0 * rng.random::<f64>(),         // amplitude
                0.15 + 0.2 * rng.random::<f64>(),        // orbit radius
                std::f64::consts::TAU * rng.random::<f64>(), // phase
                150.0 + 300.0 * rng.random::<f64>(),     // period
                0.15 + 0.1 * rng.random::<f64>(),        // width
            ]
        })
        .collect();
    let period = (horizon.max(1) as f64) * 0.8;
    let times: Vec<usize> = (0..=horizon).collect();
    let values = coords
        .iter()
        .map(|x| {
            times
                .iter()
                .map(|&t| {
                    let t = t as f64;
                    let season = 0.5 * (std::f64::consts::TAU * t / period + 3.0 * x[1]).sin();
                    blobs.iter().fold(season, |acc, b| {
                        let ang = b[2] + std::f64::consts::TAU * t / b[3];
                        let (cx, cy) = (0.5 + b[1] * ang.cos(), 0.5 + b[1] * ang.sin());
                        let r2 = (x[0] - cx).powi(2) + (x[1] - cy).powi(2);
                        acc + b[0] * (-r2 / (2.0 * b[4] * b[4])).exp()
                    })
                })
                .collect()
        })
        .collect();
    (coords, SignalTable { times, values })
}

/// Writes `<name>_coords.csv` and `<name>_signals.csv` for every dataset in
/// [`DATASETS`], each covering times up to its last evaluation time.
pub fn write_stand_ins(dir: &Path, seed: u64) -> Result<Vec<(PathBuf, PathBuf)>> {
    std::fs::create_dir_all(dir)?;
    DATASETS
        .iter()
        .enumerate()
        .map(|(i, ds)| {
            let (coords, table) = generate_stand_in(STATIONS, ds.times[2], derive_seed(seed, &[i as u64]));
            let cp = dir.join(format!("{}_coords.csv", ds.name));
            let sp = dir.join(format!("{}_signals.csv", ds.name));
            write_coords(&coords, BufWriter::new(File::create(&cp)?))?;
            write_signal_table(&table, &sp)?;
            Ok((cp, sp))
        })
        .collect()
}

/// Real part of a signal, for CSV output of real-valued data.
pub fn real_parts(f: &GraphSignal<f64>) -> DVector<f64> {
    f.values().map(|z| z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "node_id,t_0,t_1,t_2\n1,4,5,6\n0,1,2,3\n";

    #[test]
    fn table_rows_sorted_by_node() {
        let t = read_signal_table(TABLE.as_bytes()).unwrap();
        assert_eq!(t.times, vec![0, 1, 2]);
        assert_eq!(t.values, vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]);
        assert_eq!(real_parts(&t.signal(2).unwrap()).as_slice(), &[3.0, 6.0]);
        assert!(t.signal(9).is_err());
    }

    #[test]
    fn table_errors_carry_line_numbers() {
        let cases = [
            ("node_id,t_0\n0,1\n2,3\n", 3, "node_id 1"),
            ("node_id,t_0,t_1\n0,1\n", 2, "expected 3"),
            ("node_id,t_0\n0,abc\n", 2, "non-numeric"),
            ("id,t_0\n0,1\n", 1, "node_id"),
        ];
        for (text, want, needle) in cases {
            match read_signal_table(text.as_bytes()) {
                Err(GlctError::Parse { line, message }) => {
                    assert_eq!(line, want, "{text}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn noise_is_seeded() {
        let f = GraphSignal::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(add_noise(&f, 0.0, 5).unwrap(), f);
        assert_eq!(add_noise(&f, 0.7, 5).unwrap(), add_noise(&f, 0.7, 5).unwrap());
        assert_ne!(add_noise(&f, 0.7, 5).unwrap(), add_noise(&f, 0.7, 6).unwrap());
        assert!(add_noise(&f, -1.0, 5).is_err());
    }

    #[test]
    fn noise_variance() {
        let f = GraphSignal::zeros(10_000);
        let y = add_noise(&f, 1.0, 11).unwrap();
        let var = y.values().iter().map(|z| z.re * z.re).sum::<f64>() / 10_000.0;
        assert!((0.94..=1.06).contains(&var), "{var}");
        assert!(y.values().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn seeds_differ_per_part() {
        assert_ne!(derive_seed(1, &[0]), derive_seed(1, &[1]));
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(3, &[4, 5]), derive_seed(3, &[4, 5]));
    }

    #[test]
    fn stand_in_is_deterministic() {
        let (c1, t1) = generate_stand_in(50, 20, 3);
        let (c2, t2) = generate_stand_in(50, 20, 3);
        assert_eq!((c1.len(), t1.times.len()), (50, 21));
        assert_eq!(c1, c2);
        assert_eq!(t1, t2);
    }
}
