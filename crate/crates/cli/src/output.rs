use std::fs::File;
use std::io::{self, BufWriter, Write};

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::Failure;

/// Writes `rows` as CSV (with `# key=value` header lines) or as a JSON document
/// `{"meta": {...}, "rows": [...]}`.
pub fn write_table<R: Serialize>(cfg: &RunConfig, out: Option<&std::path::Path>, rows: &[R]) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cfg.format {
        Format::Csv => {
            for (k, v) in cfg.entries() {
                writeln!(sink, "# {k}={v}")?;
            }
            let mut w = csv::Writer::from_writer(&mut sink);
            for r in rows {
                w.serialize(r).map_err(|e| Failure::Contract(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a, R> {
                meta: serde_json::Map<String, serde_json::Value>,
                rows: &'a [R],
            }
            let meta = cfg
                .entries()
                .into_iter()
                .map(|(k, v)| (k, serde_json::Value::String(v)))
                .collect();
            serde_json::to_writer_pretty(&mut sink, &Doc { meta, rows }).map_err(|e| Failure::Contract(e.to_string()))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}
