//! Edge-list and ranking-file input/output.
//!
//! Edge lists are UTF-8 text with one `u v` pair of 0-based node ids per
//! line and `#`-prefixed comment lines; an optional `# nodes: K` header
//! declares the node count (needed to preserve trailing isolated nodes).
//! Ranking files are CSV with the header `node,rank`.

use std::io::{BufRead, Write};

use agony_core::{DirectedGraph, Ranking};

/// Errors raised while reading edge lists or ranking files.
#[derive(Debug, thiserror::Error)]
pub enum FileFormatError {
    /// A data line did not contain two integer tokens.
    #[error("line {line}: expected two integer node ids, got {content:?}")]
    Parse {
        /// 1-based line number.
        line: usize,
        /// The offending line.
        content: String,
    },
    /// An edge referenced a node id at or beyond the declared count.
    #[error("line {line}: node id {id} is outside the declared node count {declared}")]
    IdBeyondDeclared {
        /// 1-based line number.
        line: usize,
        /// Offending node id.
        id: u64,
        /// Declared node count from the `# nodes:` header.
        declared: u64,
    },
    /// A node id too large for the in-memory representation.
    #[error("line {line}: node id {id} exceeds the supported maximum")]
    IdTooLarge {
        /// 1-based line number.
        line: usize,
        /// Offending node id.
        id: u64,
    },
    /// Ranking CSV violations: bad header, missing/duplicate nodes, rank 0.
    #[error("ranking file: {0}")]
    Ranking(String),
    /// Underlying IO failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What was cleaned up while loading an edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct LoadStats {
    /// Duplicate edges dropped.
    pub duplicates: u64,
    /// Self-loops dropped.
    pub self_loops: u64,
    /// Node count declared by a `# nodes:` header, if any.
    pub declared_nodes: Option<u64>,
}

/// Reads a SNAP-style edge list.
///
/// Node count is `1 + max id` unless a `# nodes: K` comment declares it
/// (ids must then stay below `K`). Duplicate edges and self-loops are
/// dropped and counted, not treated as errors.
///
/// # Errors
///
/// [`FileFormatError::Parse`] with the 1-based line number on malformed
/// lines; IO errors are passed through.
pub fn load_edge_list(reader: impl BufRead) -> Result<(DirectedGraph, LoadStats), FileFormatError> {
    let mut stats = LoadStats::default();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut max_id: Option<u64> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let number = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("nodes:") {
                if let Ok(declared) = rest.trim().parse::<u64>() {
                    stats.declared_nodes = Some(declared);
                }
            }
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (u, v) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => {
                let parse = |tok: &str| {
                    tok.parse::<u64>().map_err(|_| FileFormatError::Parse {
                        line: number,
                        content: trimmed.to_owned(),
                    })
                };
                (parse(a)?, parse(b)?)
            }
            _ => return Err(FileFormatError::Parse { line: number, content: trimmed.to_owned() }),
        };
        for id in [u, v] {
            if let Some(declared) = stats.declared_nodes {
                if id >= declared {
                    return Err(FileFormatError::IdBeyondDeclared { line: number, id, declared });
                }
            }
            if id >= u64::from(u32::MAX) {
                return Err(FileFormatError::IdTooLarge { line: number, id });
            }
            max_id = Some(max_id.map_or(id, |m: u64| m.max(id)));
        }
        if u == v {
            stats.self_loops += 1;
            continue;
        }
        edges.push((u as u32, v as u32));
    }
    edges.sort_unstable();
    let before = edges.len();
    edges.dedup();
    stats.duplicates = (before - edges.len()) as u64;
    let node_count = stats.declared_nodes.or_else(|| max_id.map(|m| m + 1)).unwrap_or(0);
    let graph =
        DirectedGraph::new(node_count as usize, edges).expect("edges validated while parsing");
    Ok((graph, stats))
}

/// Writes an edge list that [`load_edge_list`] reads back identically
/// (a `# nodes:` header preserves isolated nodes).
///
/// # Errors
///
/// IO errors from the underlying writer.
pub fn save_edge_list(mut writer: impl Write, g: &DirectedGraph) -> std::io::Result<()> {
    writeln!(writer, "# nodes: {}", g.node_count())?;
    for &(u, v) in g.edges() {
        writeln!(writer, "{u} {v}")?;
    }
    Ok(())
}

/// Reads a `node,rank` CSV into a [`Ranking`].
///
/// Every node id in `0..N` must appear exactly once (any order), where
/// `N` is the number of data rows; ranks are positive integers.
///
/// # Errors
///
/// [`FileFormatError::Ranking`] describing the violation.
pub fn read_ranking_csv(reader: impl std::io::Read) -> Result<Ranking, FileFormatError> {
    let mut csv_reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    {
        let headers = csv_reader.headers().map_err(|e| FileFormatError::Ranking(e.to_string()))?;
        let fields: Vec<&str> = headers.iter().map(str::trim).collect();
        if fields != ["node", "rank"] {
            return Err(FileFormatError::Ranking(format!(
                "expected header \"node,rank\", got {:?}",
                fields.join(",")
            )));
        }
    }
    let mut entries: Vec<(u64, u32)> = Vec::new();
    for (idx, record) in csv_reader.records().enumerate() {
        let record = record.map_err(|e| FileFormatError::Ranking(e.to_string()))?;
        let row = idx + 2; // 1-based, after the header
        if record.len() != 2 {
            return Err(FileFormatError::Ranking(format!("row {row}: expected 2 fields")));
        }
        let node: u64 = record[0].trim().parse().map_err(|_| {
            FileFormatError::Ranking(format!("row {row}: bad node id {:?}", &record[0]))
        })?;
        let rank: u32 = record[1].trim().parse().map_err(|_| {
            FileFormatError::Ranking(format!("row {row}: bad rank {:?}", &record[1]))
        })?;
        if rank == 0 {
            return Err(FileFormatError::Ranking(format!("row {row}: rank must be >= 1")));
        }
        entries.push((node, rank));
    }
    let n = entries.len() as u64;
    let mut ranks = vec![0u32; entries.len()];
    let mut seen = vec![false; entries.len()];
    for (node, rank) in entries {
        if node >= n {
            return Err(FileFormatError::Ranking(format!(
                "node id {node} out of range for {n} rows"
            )));
        }
        if seen[node as usize] {
            return Err(FileFormatError::Ranking(format!("duplicate node id {node}")));
        }
        seen[node as usize] = true;
        ranks[node as usize] = rank;
    }
    Ranking::new(ranks).map_err(|e| FileFormatError::Ranking(e.to_string()))
}

/// Writes a [`Ranking`] as `node,rank` CSV.
///
/// # Errors
///
/// IO errors from the underlying writer.
pub fn write_ranking_csv(mut writer: impl Write, r: &Ranking) -> std::io::Result<()> {
    writeln!(writer, "node,rank")?;
    for (node, &rank) in r.ranks().iter().enumerate() {
        writeln!(writer, "{node},{rank}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn parses_simple_lists() {
        let (g, stats) = load_edge_list(Cursor::new("0 1\n1 2\n")).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(stats, LoadStats::default());
    }

    #[test]
    fn drops_duplicates_and_self_loops_with_counts() {
        let input = "# comment\n0 1\n0 1\n2 2\n";
        let (g, stats) = load_edge_list(Cursor::new(input)).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(stats.duplicates, 1);
        assert_eq!(stats.self_loops, 1);
    }

    #[test]
    fn reports_parse_errors_with_line_numbers() {
        let err = load_edge_list(Cursor::new("0 1\n0 x\n")).unwrap_err();
        assert!(matches!(err, FileFormatError::Parse { line: 2, .. }));
        let err = load_edge_list(Cursor::new("0\n")).unwrap_err();
        assert!(matches!(err, FileFormatError::Parse { line: 1, .. }));
        let err = load_edge_list(Cursor::new("0 1 2\n")).unwrap_err();
        assert!(matches!(err, FileFormatError::Parse { line: 1, .. }));
    }

    #[test]
    fn honors_declared_node_count() {
        let (g, stats) = load_edge_list(Cursor::new("# nodes: 5\n0 1\n")).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(stats.declared_nodes, Some(5));
        let err = load_edge_list(Cursor::new("# nodes: 2\n0 3\n")).unwrap_err();
        assert!(matches!(err, FileFormatError::IdBeyondDeclared { line: 2, id: 3, declared: 2 }));
    }

    #[test]
    fn save_then_load_round_trips() {
        let g = DirectedGraph::new(6, [(0, 1), (2, 0), (4, 3)]).unwrap();
        let mut buf = Vec::new();
        save_edge_list(&mut buf, &g).unwrap();
        let (back, stats) = load_edge_list(Cursor::new(buf)).unwrap();
        assert_eq!(back, g);
        assert_eq!(stats.declared_nodes, Some(6));
    }

    #[test]
    fn ranking_round_trips() {
        let r = Ranking::new(vec![2, 1, 2, 3]).unwrap();
        let mut buf = Vec::new();
        write_ranking_csv(&mut buf, &r).unwrap();
        assert!(buf.starts_with(b"node,rank\n"));
        let back = read_ranking_csv(Cursor::new(buf)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn ranking_csv_rejects_bad_inputs() {
        let cases = [
            "node,value\n0,1\n",     // wrong header
            "node,rank\n0,1\n0,2\n", // duplicate node
            "node,rank\n1,1\n",      // missing node 0
            "node,rank\n0,0\n",      // rank zero
            "node,rank\n0,x\n",      // non-numeric rank
        ];
        for case in cases {
            assert!(read_ranking_csv(Cursor::new(case)).is_err(), "{case:?}");
        }
    }
}
