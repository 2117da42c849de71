//! Results CSV: fixed column order, rows sorted by algorithm name, map and seed, reals
//! at six significant digits and `inf` for failed trials.

use gridnav_core::numfmt::sig6;

use crate::params::Algo;
use crate::trial::TrialResult;
use crate::BenchError;

pub const CSV_HEADER: [&str; 8] = [
    "algo",
    "map",
    "seed",
    "success",
    "path_len",
    "iterations_to_best",
    "wall_ms",
    "collisions",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    /// Keep the `wall_ms` column; dropping it makes output reproducible.
    pub wall_time: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { wall_time: true }
    }
}

pub fn sort_results(rows: &mut [TrialResult]) {
    rows.sort_by(|a, b| (a.algo.name(), &a.map, a.seed).cmp(&(b.algo.name(), &b.map, b.seed)));
}

pub fn emit_csv(rows: &[TrialResult], opts: CsvOptions) -> String {
    let mut sorted = rows.to_vec();
    sort_results(&mut sorted);
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let header: Vec<&str> = CSV_HEADER
        .iter()
        .copied()
        .filter(|h| opts.wall_time || *h != "wall_ms")
        .collect();
    w.write_record(&header).expect("writing to memory");
    for r in &sorted {
        let mut rec = vec![
            r.algo.to_string(),
            r.map.clone(),
            r.seed.to_string(),
            r.success.to_string(),
            sig6(r.path_len),
            r.iterations_to_best.to_string(),
        ];
        if opts.wall_time {
            rec.push(sig6(r.wall_ms));
        }
        rec.push(r.collisions.to_string());
        w.write_record(&rec).expect("writing to memory");
    }
    String::from_utf8(w.into_inner().expect("flushing to memory")).expect("fields are UTF-8")
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> Result<T, BenchError> {
    let raw = rec.get(i).ok_or_else(|| BenchError::Csv(format!("missing `{name}`")))?;
    raw.parse()
        .map_err(|_| BenchError::Csv(format!("bad `{name}` value `{raw}`")))
}

/// Reads a results CSV written by [`emit_csv`]; `wall_ms` is 0 when the
/// column was dropped.
pub fn parse_csv(text: &str) -> Result<Vec<TrialResult>, BenchError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| BenchError::Csv(e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let with_wall = cols == CSV_HEADER;
    let without: Vec<&str> = CSV_HEADER.iter().copied().filter(|h| *h != "wall_ms").collect();
    if !with_wall && cols != without {
        return Err(BenchError::Csv(format!("unexpected header {cols:?}")));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| BenchError::Csv(e.to_string()))?;
        let algo: Algo = rec
            .get(0)
            .unwrap_or_default()
            .parse()
            .map_err(|e: BenchError| BenchError::Csv(e.to_string()))?;
        let last = if with_wall { 7 } else { 6 };
        out.push(TrialResult {
            algo,
            map: field(&rec, 1, "map")?,
            seed: field(&rec, 2, "seed")?,
            success: field(&rec, 3, "success")?,
            path_len: field(&rec, 4, "path_len")?,
            iterations_to_best: field(&rec, 5, "iterations_to_best")?,
            wall_ms: if with_wall { field(&rec, 6, "wall_ms")? } else { 0.0 },
            collisions: field(&rec, last, "collisions")?,
        });
    }
    Ok(out)
}
