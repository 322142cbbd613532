//! Atomic file writes and CSV emission.

use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::LabError;

/// Writes through a temporary file in the target directory, then renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let io = |e: std::io::Error| LabError::Io(path.display().to_string(), e);
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// CSV text: a `#` comment line, a header row, then the records.
pub fn csv_bytes(
    comment: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<Vec<u8>, LabError> {
    let mut buf = Vec::new();
    writeln!(buf, "# {comment}").expect("write to Vec");
    let mut w = csv::Writer::from_writer(&mut buf);
    let fail = |e: csv::Error| LabError::Format(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    w.flush().map_err(|e| LabError::Format(e.to_string()))?;
    drop(w);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comment_then_header() {
        let b = csv_bytes("seed=1", &["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(String::from_utf8(b).unwrap(), "# seed=1\na,b\n1,\"x,y\"\n");
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
