use std::io::Write;

use crate::error::Result;
use crate::format::num;

use super::{RunFailure, RunRecord};

pub const RECORD_HEADER: [&str; 18] = [
    "graph_id",
    "strategy",
    "phi",
    "sample_id",
    "b",
    "alpha",
    "pi_t",
    "pi_t_prime",
    "tau",
    "d_in",
    "d_out",
    "degree_ratio",
    "l_b",
    "inserted_count",
    "biased_weight",
    "iters_before",
    "iters_after",
    "wall_time_ms",
];

fn optional(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes run records as CSV. With `timing` off the `wall_time_ms` column is
/// left empty so that reruns produce identical bytes.
pub fn write_records_csv<W: Write>(records: &[RunRecord], out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.graph_id.clone(),
            r.strategy.as_str().to_owned(),
            num(r.phi),
            r.sample_id.to_string(),
            num(r.b),
            optional(r.alpha),
            num(r.pi_t),
            num(r.pi_t_prime),
            num(r.tau),
            num(r.d_in),
            num(r.d_out),
            num(r.degree_ratio),
            num(r.l_b),
            r.inserted_count.to_string(),
            num(r.biased_weight),
            r.iters_before.to_string(),
            r.iters_after.to_string(),
            if timing {
                optional(r.wall_time_ms)
            } else {
                String::new()
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line; same timing rule as the CSV writer.
pub fn write_records_jsonl<W: Write>(
    records: &[RunRecord],
    mut out: W,
    timing: bool,
) -> Result<()> {
    for r in records {
        let mut value = serde_json::to_value(r)?;
        if !timing {
            value["wall_time_ms"] = serde_json::Value::Null;
        }
        if !r.degree_ratio.is_finite() {
            value["degree_ratio"] = serde_json::Value::String("inf".into());
        }
        serde_json::to_writer(&mut out, &value)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Failure manifest: one row per failed run.
pub fn write_failures_csv<W: Write>(failures: &[RunFailure], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "phi", "sample_id", "b", "alpha", "error"])?;
    for f in failures {
        w.write_record([
            f.strategy.as_str().to_owned(),
            num(f.phi),
            f.sample_id.to_string(),
            num(f.b),
            optional(f.alpha),
            f.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
