//! Output writers. Every artifact is written to a temp file in the target
//! directory and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use traffic_ilp_core::analytics::{Axis, Histogram};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report values serialize");
    out.push(b'\n');
    out
}

pub fn csv_bytes<H, R, F>(headers: &[H], rows: R) -> Vec<u8>
where
    H: AsRef<str>,
    R: IntoIterator<Item = Vec<F>>,
    F: AsRef<str>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(headers.iter().map(AsRef::as_ref)).expect("in-memory write");
    for r in rows {
        w.write_record(r.iter().map(AsRef::as_ref)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

/// Long format `axis,bin,count`, one row per bin.
pub fn histogram_rows(histograms: &[Histogram]) -> Vec<u8> {
    csv_bytes(
        &["axis", "bin", "count"],
        histograms.iter().flat_map(|h| {
            h.bins.iter().enumerate().map(move |(i, c)| {
                vec![h.axis.name().to_string(), bin_name(h.axis, i), c.to_string()]
            })
        }),
    )
}

fn bin_name(axis: Axis, i: usize) -> String {
    axis.bin_label(i).to_string()
}

/// Relative paths of every `.json` file under `root`, sorted, skipping
/// `skip`.
pub fn json_artifacts(root: &Path, skip: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir)? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "json") && p != skip {
                out.push(p.strip_prefix(root).expect("under root").to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}

/// One JSON object keyed by relative artifact path.
pub fn bundle(root: &Path, files: &[PathBuf]) -> std::io::Result<Value> {
    let mut map = serde_json::Map::new();
    for f in files {
        let text = fs::read(root.join(f))?;
        let v: Value = serde_json::from_slice(&text)
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        let key = f
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect::<Vec<_>>()
            .join("/");
        map.insert(key, v);
    }
    Ok(Value::Object(map))
}
