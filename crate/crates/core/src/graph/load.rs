use std::path::Path;

use super::{Graph, VertexId, Weight};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct LoadOptions {
    pub weighted: bool,
    pub symmetrize: bool,
}

/// Diagnostics collected while loading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub lines: usize,
    pub edges_read: usize,
    /// Arcs dropped because symmetrization produced them twice.
    pub collapsed_duplicates: usize,
    pub matrix_market: bool,
}

pub fn load_edge_list(path: impl AsRef<Path>, opts: LoadOptions) -> Result<(Graph, LoadStats)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, opts)
}

/// Parses a whitespace-separated edge list ("src dst [weight]" per line,
/// `#`/`%` comments) or a Matrix Market coordinate file.
pub fn parse_edge_list(text: &str, opts: LoadOptions) -> Result<(Graph, LoadStats)> {
    let mut stats = LoadStats::default();
    let mut lines = text.lines().enumerate().peekable();

    if let Some((_, first)) = lines.peek() {
        if first.trim_start().starts_with("%%MatrixMarket") {
            let header = first.to_ascii_lowercase();
            if !header.contains("coordinate") {
                return Err(Error::MalformedInput {
                    line: 1,
                    msg: "only coordinate Matrix Market files are supported".into(),
                });
            }
            stats.matrix_market = true;
        }
    }

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut weights: Vec<Weight> = Vec::new();
    let mut max_id: Option<u64> = None;
    let mut mm_size_seen = false;

    for (idx, raw) in lines {
        let line_no = idx + 1;
        stats.lines += 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if stats.matrix_market && !mm_size_seen {
            // "rows cols nnz"
            if toks.len() != 3 {
                return Err(Error::MalformedInput {
                    line: line_no,
                    msg: "expected Matrix Market size line".into(),
                });
            }
            mm_size_seen = true;
            continue;
        }
        if toks.len() < 2 || toks.len() > 3 {
            return Err(Error::MalformedInput {
                line: line_no,
                msg: format!("expected \"src dst [weight]\", got {line:?}"),
            });
        }
        let parse_id = |t: &str| -> Result<u64> {
            let v: u64 = t.parse().map_err(|_| Error::MalformedInput {
                line: line_no,
                msg: format!("bad vertex id {t:?}"),
            })?;
            if stats.matrix_market {
                v.checked_sub(1).ok_or(Error::MalformedInput {
                    line: line_no,
                    msg: "Matrix Market ids are 1-based".into(),
                })
            } else {
                Ok(v)
            }
        };
        let s = parse_id(toks[0])?;
        let d = parse_id(toks[1])?;
        if s.max(d) >= VertexId::MAX as u64 {
            return Err(Error::MalformedInput {
                line: line_no,
                msg: format!("vertex id {} too large", s.max(d)),
            });
        }
        if opts.weighted {
            let Some(tok) = toks.get(2) else {
                return Err(Error::MalformedInput {
                    line: line_no,
                    msg: "missing weight".into(),
                });
            };
            let w: Weight = tok.parse().map_err(|_| Error::MalformedInput {
                line: line_no,
                msg: format!("bad weight {tok:?}"),
            })?;
            weights.push(w);
        }
        max_id = Some(max_id.map_or(s.max(d), |m: u64| m.max(s).max(d)));
        edges.push((s as VertexId, d as VertexId));
    }

    let Some(max_id) = max_id else {
        return Err(Error::NoEdges);
    };
    stats.edges_read = edges.len();
    let n = max_id as usize + 1;
    let g = Graph::from_edges(n, edges, opts.weighted.then_some(weights))?;
    if opts.symmetrize {
        let (s, collapsed) = g.symmetrized();
        stats.collapsed_duplicates = collapsed;
        log::info!("symmetrized: {collapsed} duplicate arcs collapsed");
        return Ok((s, stats));
    }
    Ok((g, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_two_edges() {
        let (g, _) = parse_edge_list(
            "0 1\n1 2",
            LoadOptions {
                weighted: false,
                symmetrize: true,
            },
        )
        .unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 4);
        let arcs: Vec<_> = g.edge_multiset().iter().map(|t| (t.0, t.1)).collect();
        assert_eq!(arcs, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn weighted_csr() {
        let (g, _) = parse_edge_list(
            "0 1 5\n0 2 7",
            LoadOptions {
                weighted: true,
                symmetrize: false,
            },
        )
        .unwrap();
        assert_eq!(g.out_offsets(), &[0, 2, 2, 2]);
        assert_eq!(g.out_neighbors(), &[1, 2]);
        assert_eq!(g.weights().unwrap(), &[5, 7]);
    }

    #[test]
    fn empty_file_has_no_edges() {
        let err = parse_edge_list("", LoadOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "no edges");
        let err = parse_edge_list("# only a comment\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoEdges));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_edge_list("0 1\n# c\n1 x\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 3, .. }), "{err}");
        let err = parse_edge_list("0 1 2 3\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 1, .. }));
    }

    #[test]
    fn weight_token_rules() {
        // ignored when unweighted
        let (g, _) = parse_edge_list("0 1 9\n", LoadOptions::default()).unwrap();
        assert!(!g.is_weighted());
        // required when weighted
        let err = parse_edge_list(
            "0 1 9\n1 2\n",
            LoadOptions {
                weighted: true,
                symmetrize: false,
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::MalformedInput { line: 2, .. }));
    }

    #[test]
    fn matrix_market_is_one_based() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n% c\n3 3 2\n1 2\n3 1\n";
        let (g, stats) = parse_edge_list(text, LoadOptions::default()).unwrap();
        assert!(stats.matrix_market);
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.coo_src(), &[0, 2]);
        assert_eq!(g.coo_dst(), &[1, 0]);
    }

    #[test]
    fn self_loops_and_parallel_edges_are_kept() {
        let (g, _) = parse_edge_list("0 0\n0 1\n0 1\n", LoadOptions::default()).unwrap();
        assert_eq!(g.num_edges(), 3);
    }
}
