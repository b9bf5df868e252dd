//! Result files: CSV tables, the edge-list format and atomic writes.

use std::fs;
use std::io::Write;
use std::path::Path;

use secinvest_core::GraphInstance;

use crate::error::AppError;

/// A named output file held in memory until the whole run has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

/// Builds a CSV table row by row.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self, name: &str) -> Artifact {
        Artifact {
            name: name.to_string(),
            bytes: self.writer.into_inner().expect("in-memory flush"),
        }
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Parses a CSV artifact back into a header and rows.
pub fn read_table(bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<String>>), AppError> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader
        .headers()
        .map_err(|e| AppError::Validation(format!("csv: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| AppError::Validation(format!("csv: {e}")))?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Edge list: `# key=value` metadata lines (including `n`), then one
/// `u v` pair per line with `u < v`.
pub fn edge_list(g: &GraphInstance) -> Artifact {
    let m = &g.meta;
    let mut out = String::new();
    out.push_str("# secinvest edge list\n");
    out.push_str(&format!("# n={}\n", g.n()));
    out.push_str(&format!("# edges={}\n", g.edge_count()));
    if let Some(s) = m.seed {
        out.push_str(&format!("# seed={s}\n"));
    }
    if let Some(r) = m.target_r {
        out.push_str(&format!("# target_r={r}\n"));
    }
    out.push_str(&format!("# initial_r={}\n", m.initial_r));
    out.push_str(&format!("# achieved_r={}\n", m.achieved_r));
    out.push_str(&format!("# degenerate={}\n", m.degenerate));
    out.push_str(&format!("# rewiring_attempts={}\n", m.rewiring_attempts));
    out.push_str(&format!("# rewiring_accepted={}\n", m.rewiring_accepted));
    out.push_str(&format!("# budget_exhausted={}\n", m.budget_exhausted));
    out.push_str(&format!("# parity_redraws={}\n", m.parity_redraws));
    out.push_str(&format!("# capped_degrees={}\n", m.capped_degrees));
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    Artifact {
        name: "edges.txt".into(),
        bytes: out.into_bytes(),
    }
}

/// Reads the edge-list format. Metadata other than `n` is ignored.
pub fn read_edge_list(text: &str) -> Result<GraphInstance, AppError> {
    let bad = |line: usize, msg: &str| AppError::Validation(format!("edge list line {line}: {msg}"));
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some(v) = meta.trim().strip_prefix("n=") {
                n = Some(v.parse::<usize>().map_err(|_| bad(i + 1, "n is not an integer"))?);
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(bad(i + 1, "expected two node indices"));
        };
        let u = a.parse::<usize>().map_err(|_| bad(i + 1, "node index is not an integer"))?;
        let v = b.parse::<usize>().map_err(|_| bad(i + 1, "node index is not an integer"))?;
        edges.push((u, v));
    }
    let n = n.ok_or_else(|| AppError::Validation("edge list: missing `# n=` header".into()))?;
    Ok(GraphInstance::from_edges(n, &edges)?)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), AppError> {
    let io = |e: std::io::Error, what: &str| AppError::Io(format!("{what} {}: {e}", dir.join(name).display()));
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| io(e, "cannot create"))?;
    f.write_all(bytes).map_err(|e| io(e, "cannot write"))?;
    f.sync_all().map_err(|e| io(e, "cannot sync"))?;
    fs::rename(&tmp, dir.join(name)).map_err(|e| io(e, "cannot rename into"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trips() {
        let g = GraphInstance::from_edges(5, &[(0, 1), (1, 2), (3, 1), (4, 0)]).unwrap();
        let a = edge_list(&g);
        let back = read_edge_list(std::str::from_utf8(&a.bytes).unwrap()).unwrap();
        assert_eq!(back.n(), 5);
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn edge_list_rejects_garbage() {
        assert!(read_edge_list("0 1\n").is_err());
        assert!(read_edge_list("# n=3\n0 1 2\n").is_err());
        assert!(read_edge_list("# n=3\n0 0\n").is_err());
        assert!(read_edge_list("# n=3\n0 7\n").is_err());
    }

    #[test]
    fn tables_round_trip() {
        let mut t = Table::new(&["a", "b"]);
        t.row([num(0.1), "x,y".to_string()]);
        let art = t.finish("t.csv");
        let (h, rows) = read_table(&art.bytes).unwrap();
        assert_eq!(h, ["a", "b"]);
        assert_eq!(rows, [["0.1", "x,y"]]);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        write_atomic(dir.path(), "f.txt", b"hi").unwrap();
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, ["f.txt"]);
        assert_eq!(fs::read(dir.path().join("f.txt")).unwrap(), b"hi");
    }
}
