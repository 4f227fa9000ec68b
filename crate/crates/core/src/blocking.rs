//! EdgeBlocking: COO edges regrouped into destination-range segments so
//! that vertex-data writes during a full-edge pass stay inside a window of
//! `N` vertices at a time.

use std::io::{Read, Write};
use std::path::Path;

use crate::engine::ExecConfig;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, Weight};
use crate::par::{even_split, Pool};

/// Default budget for one segment's vertex data.
pub const DEFAULT_CACHE_BUDGET: usize = 2 << 20;

const MAGIC: &[u8; 8] = b"GSBLOCK1";

/// Largest segment size whose vertex data fits in `cache_budget` bytes.
pub fn default_segment_size(bytes_per_vertex: usize, cache_budget: usize) -> usize {
    (cache_budget / bytes_per_vertex.max(1)).max(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockedGraph {
    num_vertices: usize,
    vertices_per_segment: usize,
    src: Vec<VertexId>,
    dst: Vec<VertexId>,
    weight: Option<Vec<Weight>>,
    /// `segment_start[s]` is one past the last edge of segment `s`; the
    /// segment begins at `segment_start[s - 1]` (or 0 for the first).
    segment_start: Vec<usize>,
}

/// Two-pass stable partition of the COO edges by `dst / n`.
pub fn block_edges(g: &Graph, n: usize) -> Result<BlockedGraph> {
    if n == 0 {
        return Err(Error::ZeroSegmentSize);
    }
    let num_segments = g.num_vertices().div_ceil(n).max(1);
    let coo_dst = g.coo_dst();

    let mut segment_size = vec![0usize; num_segments];
    for &d in coo_dst {
        segment_size[d as usize / n] += 1;
    }
    let mut cursor = vec![0usize; num_segments];
    let mut acc = 0;
    for (c, &s) in cursor.iter_mut().zip(&segment_size) {
        *c = acc;
        acc += s;
    }

    let m = g.num_edges();
    let mut src = vec![0; m];
    let mut dst = vec![0; m];
    let mut weight = g.coo_weights().map(|_| vec![0; m]);
    for (e, (s, d)) in g.edges().enumerate() {
        let seg = d as usize / n;
        let idx = cursor[seg];
        src[idx] = s;
        dst[idx] = d;
        if let (Some(w), Some(gw)) = (weight.as_mut(), g.coo_weights()) {
            w[idx] = gw[e];
        }
        cursor[seg] += 1;
    }

    Ok(BlockedGraph {
        num_vertices: g.num_vertices(),
        vertices_per_segment: n,
        src,
        dst,
        weight,
        // after the second pass every cursor sits at its segment's end
        segment_start: cursor,
    })
}

impl BlockedGraph {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.src.len()
    }

    pub fn vertices_per_segment(&self) -> usize {
        self.vertices_per_segment
    }

    pub fn number_of_segments(&self) -> usize {
        self.segment_start.len()
    }

    pub fn segment_start(&self) -> &[usize] {
        &self.segment_start
    }

    pub fn edges_src(&self) -> &[VertexId] {
        &self.src
    }

    pub fn edges_dst(&self) -> &[VertexId] {
        &self.dst
    }

    pub fn edges_weight(&self) -> Option<&[Weight]> {
        self.weight.as_deref()
    }

    /// Edge index range of segment `s`.
    pub fn segment(&self, s: usize) -> std::ops::Range<usize> {
        let start = if s == 0 { 0 } else { self.segment_start[s - 1] };
        start..self.segment_start[s]
    }

    #[inline]
    pub fn edge(&self, e: usize) -> (VertexId, VertexId, Weight) {
        (self.src[e], self.dst[e], self.weight.as_ref().map_or(1, |w| w[e]))
    }

    pub fn edge_multiset(&self) -> Vec<(VertexId, VertexId, Weight)> {
        let mut v: Vec<_> = (0..self.num_edges()).map(|e| self.edge(e)).collect();
        v.sort_unstable();
        v
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let put = |w: &mut dyn Write, x: u64| w.write_all(&x.to_le_bytes());
        w.write_all(MAGIC)?;
        put(&mut w, self.num_vertices as u64)?;
        put(&mut w, self.num_edges() as u64)?;
        put(&mut w, self.vertices_per_segment as u64)?;
        put(&mut w, self.number_of_segments() as u64)?;
        put(&mut w, u64::from(self.weight.is_some()))?;
        for &s in &self.segment_start {
            put(&mut w, s as u64)?;
        }
        for &s in &self.src {
            put(&mut w, s as u64)?;
        }
        for &d in &self.dst {
            put(&mut w, d as u64)?;
        }
        if let Some(ws) = &self.weight {
            for &x in ws {
                put(&mut w, x as u64)?;
            }
        }
        w.flush()
    }

    pub fn read_from(mut r: impl Read) -> Result<BlockedGraph> {
        let bad = |m: &str| Error::BadBlockedFile(m.to_string());
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| bad(&e.to_string()))?;
        if buf.len() < 8 || &buf[..8] != MAGIC {
            return Err(bad("missing magic"));
        }
        let mut words = buf[8..].chunks_exact(8).map(|c| {
            u64::from_le_bytes(c.try_into().expect("chunk of 8"))
        });
        if (buf.len() - 8) % 8 != 0 {
            return Err(bad("truncated word"));
        }
        let mut next = || words.next().ok_or_else(|| bad("truncated"));
        let num_vertices = next()? as usize;
        let m = next()? as usize;
        let n = next()? as usize;
        let segs = next()? as usize;
        let weighted = next()? != 0;
        let segment_start = (0..segs).map(|_| next().map(|x| x as usize)).collect::<Result<Vec<_>>>()?;
        let mut ids = |len| -> Result<Vec<VertexId>> {
            (0..len)
                .map(|_| {
                    let x = next()?;
                    if x as usize >= num_vertices {
                        return Err(bad("vertex id out of range"));
                    }
                    Ok(x as VertexId)
                })
                .collect()
        };
        let src = ids(m)?;
        let dst = ids(m)?;
        let weight = if weighted {
            Some((0..m).map(|_| next().map(|x| x as Weight)).collect::<Result<Vec<_>>>()?)
        } else {
            None
        };
        if next().is_ok() {
            return Err(bad("trailing data"));
        }
        let bg = BlockedGraph {
            num_vertices,
            vertices_per_segment: n,
            src,
            dst,
            weight,
            segment_start,
        };
        bg.check().map_err(|m| bad(&m))?;
        Ok(bg)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(std::io::BufWriter::new(f)).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BlockedGraph> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        BlockedGraph::read_from(std::io::BufReader::new(f))
    }

    /// Structural invariants: segment boundaries and destination locality.
    pub fn check(&self) -> std::result::Result<(), String> {
        let n = self.vertices_per_segment;
        if n == 0 {
            return Err("zero segment size".into());
        }
        if self.segment_start.len() != self.num_vertices.div_ceil(n).max(1) {
            return Err("segment count mismatch".into());
        }
        if !self.segment_start.windows(2).all(|w| w[0] <= w[1]) {
            return Err("segment_start not monotone".into());
        }
        if self.segment_start.last() != Some(&self.num_edges()) {
            return Err("last segment end differs from edge count".into());
        }
        for s in 0..self.number_of_segments() {
            for e in self.segment(s) {
                if self.dst[e] as usize / n != s {
                    return Err(format!("edge {e} is outside segment {s}"));
                }
            }
        }
        Ok(())
    }
}

/// Calls `process_edge(src, dst, weight)` exactly once per edge, one
/// segment at a time with a barrier between segments; inside a segment the
/// edges are split evenly across the workers.
pub fn apply_blocked<F>(bg: &BlockedGraph, process_edge: F, exec: &ExecConfig)
where
    F: Fn(VertexId, VertexId, Weight) + Sync + Send,
{
    let pool = Pool::new(exec.num_workers, exec.deterministic);
    pool.install(|| apply_blocked_on(bg, &process_edge, &pool));
}

pub(crate) fn apply_blocked_on<F>(bg: &BlockedGraph, process_edge: &F, pool: &Pool)
where
    F: Fn(VertexId, VertexId, Weight) + Sync + Send,
{
    for s in 0..bg.number_of_segments() {
        let seg = bg.segment(s);
        if seg.is_empty() {
            continue;
        }
        let parts = even_split(seg.len(), pool.workers());
        pool.for_each(parts.len(), |t| {
            for e in parts[t].clone() {
                let (u, v, w) = bg.edge(seg.start + e);
                process_edge(u, v, w);
            }
        });
    }
}
