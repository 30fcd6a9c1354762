//! Ordered multi-hypergraphs: vertices, hyperarcs, queries and restriction.
//!
//! A [`Hypergraph`] is immutable once built. Arcs are stored in flat
//! compressed-row arrays so the traversal algorithms can walk tail lists and
//! adjacency lists without chasing per-arc allocations.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroU32;

use thiserror::Error;

/// Dense 0-based vertex index.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// 1-based hyperarc index. Index 0 is the "no arc" sentinel and is never a
/// real arc; predecessor tables use `Option<ArcId>` and print `None` as `0`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(NonZeroU32);

impl ArcId {
    /// Panics on `0`, which is reserved for the sentinel, and on indices
    /// beyond `u32::MAX`.
    pub fn new(one_based: usize) -> ArcId {
        let raw = u32::try_from(one_based).expect("arc index exceeds u32");
        ArcId(NonZeroU32::new(raw).expect("arc index 0 is reserved"))
    }

    #[inline]
    pub(crate) fn from_slot(slot: usize) -> ArcId {
        // build() caps the arc count, so this neither wraps nor hits zero
        ArcId(NonZeroU32::new(slot as u32 + 1).expect("slot within the arc cap"))
    }

    /// The 1-based index.
    #[inline]
    pub fn get(self) -> usize {
        self.0.get() as usize
    }

    /// 0-based position in arc-indexed tables.
    #[inline]
    pub fn slot(self) -> usize {
        self.0.get() as usize - 1
    }

    /// Renders an optional arc the way predecessor tables are printed.
    pub fn or_zero(arc: Option<ArcId>) -> usize {
        arc.map_or(0, ArcId::get)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Input description of one hyperarc for [`Hypergraph::build`].
///
/// `tails` is an ordered list of `(vertex, multiplicity)` runs; `A*2 B` is
/// `[(A, 2), (B, 1)]`. The same vertex may appear in several runs.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcSpec {
    pub head: VertexId,
    pub tails: Vec<(VertexId, u32)>,
    pub length: f64,
}

impl ArcSpec {
    pub fn new(head: VertexId, tails: &[(VertexId, u32)], length: f64) -> ArcSpec {
        ArcSpec {
            head,
            tails: tails.to_vec(),
            length,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("arc {arc}: vertex {vertex} out of range (graph has {count} vertices)")]
    VertexOutOfRange {
        arc: usize,
        vertex: usize,
        count: usize,
    },
    #[error("arc {arc}: negative length {length}")]
    NegativeLength { arc: usize, length: f64 },
    #[error("arc {arc}: length is not a finite number")]
    NonFiniteLength { arc: usize },
    #[error("arc {arc}: tail vertex {vertex} has zero multiplicity")]
    ZeroMultiplicity { arc: usize, vertex: usize },
    #[error("arc {arc}: empty tail list")]
    EmptyTails { arc: usize },
    #[error("{0} arcs exceed the supported maximum of 2^32 - 2")]
    TooManyArcs(usize),
    #[error("duplicate vertex name `{0}`")]
    DuplicateName(String),
    #[error("adjacency of vertex {vertex} disagrees with the arc list")]
    AdjacencyMismatch { vertex: usize },
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    SubsetOutOfRange { vertex: usize, count: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("query has no source vertices")]
    NoSources,
    #[error("source vertex {0} listed twice")]
    DuplicateSource(usize),
    #[error("source vertex {vertex}: initial cost {cost} is negative or not finite")]
    BadInitialCost { vertex: usize, cost: f64 },
    #[error("vertex {vertex} out of range (graph has {count} vertices)")]
    OutOfRange { vertex: usize, count: usize },
}

/// A set of source vertices with initial costs, plus a destination.
#[derive(Clone, Debug, PartialEq)]
pub struct Query {
    sources: Vec<(VertexId, f64)>,
    target: VertexId,
}

impl Query {
    pub fn new(sources: Vec<(VertexId, f64)>, target: VertexId) -> Result<Query, QueryError> {
        check_sources(&sources)?;
        Ok(Query { sources, target })
    }

    pub fn sources(&self) -> &[(VertexId, f64)] {
        &self.sources
    }

    pub fn source_vertices(&self) -> Vec<VertexId> {
        self.sources.iter().map(|&(v, _)| v).collect()
    }

    pub fn target(&self) -> VertexId {
        self.target
    }

    /// Checks that every vertex of the query exists in `g`.
    pub fn check_against(&self, g: &Hypergraph) -> Result<(), QueryError> {
        let count = g.vertex_count();
        for v in self.sources.iter().map(|s| s.0).chain([self.target]) {
            if v.0 >= count {
                return Err(QueryError::OutOfRange { vertex: v.0, count });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_sources(sources: &[(VertexId, f64)]) -> Result<(), QueryError> {
    if sources.is_empty() {
        return Err(QueryError::NoSources);
    }
    let mut seen = std::collections::HashSet::new();
    for &(v, cost) in sources {
        if !seen.insert(v) {
            return Err(QueryError::DuplicateSource(v.0));
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(QueryError::BadInitialCost { vertex: v.0, cost });
        }
    }
    Ok(())
}

/// Borrowed view of one hyperarc.
#[derive(Copy, Clone, Debug)]
pub struct Arc<'g> {
    pub id: ArcId,
    pub head: VertexId,
    pub length: f64,
    /// Tail occurrences in order, one entry per occurrence.
    pub tails: &'g [VertexId],
    /// Distinct tail vertices with their occurrence counts, ordered by first
    /// occurrence.
    pub distinct_tails: &'g [(VertexId, u32)],
}

impl Arc<'_> {
    /// Number of tail occurrences, counting multiplicity.
    pub fn arity(&self) -> usize {
        self.tails.len()
    }

    /// Occurrence count of `v` among the tails (0 if absent).
    pub fn multiplicity(&self, v: VertexId) -> u32 {
        self.distinct_tails
            .iter()
            .find(|&&(t, _)| t == v)
            .map_or(0, |&(_, m)| m)
    }
}

/// An immutable ordered multi-hypergraph with forward and backward adjacency.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    names: Vec<Option<String>>,
    name_index: HashMap<String, VertexId>,
    heads: Vec<VertexId>,
    lengths: Vec<f64>,
    tail_offsets: Vec<usize>,
    tails: Vec<VertexId>,
    distinct_offsets: Vec<usize>,
    distinct: Vec<(VertexId, u32)>,
    // arcs in which a vertex occurs as a tail, once per arc, with multiplicity
    fwd_offsets: Vec<usize>,
    fwd: Vec<(ArcId, u32)>,
    // arcs whose head is the vertex
    bwd_offsets: Vec<usize>,
    bwd: Vec<ArcId>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.heads == other.heads
            && self.lengths == other.lengths
            && self.tails == other.tails
            && self.tail_offsets == other.tail_offsets
    }
}

impl Hypergraph {
    /// Builds a validated hypergraph. `names` fixes the vertex count; arc
    /// order is preserved, so the `i`-th spec becomes arc `i + 1`.
    pub fn build(names: Vec<Option<String>>, arcs: Vec<ArcSpec>) -> Result<Hypergraph, GraphError> {
        let n = names.len();
        if arcs.len() >= u32::MAX as usize {
            return Err(GraphError::TooManyArcs(arcs.len()));
        }
        let mut name_index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if let Some(name) = name {
                if name_index.insert(name.clone(), VertexId(i)).is_some() {
                    return Err(GraphError::DuplicateName(name.clone()));
                }
            }
        }
        for (slot, spec) in arcs.iter().enumerate() {
            let arc = slot + 1;
            if spec.head.0 >= n {
                return Err(GraphError::VertexOutOfRange {
                    arc,
                    vertex: spec.head.0,
                    count: n,
                });
            }
            if spec.length.is_nan() || spec.length.is_infinite() {
                return Err(GraphError::NonFiniteLength { arc });
            }
            if spec.length < 0.0 {
                return Err(GraphError::NegativeLength {
                    arc,
                    length: spec.length,
                });
            }
            if spec.tails.is_empty() {
                return Err(GraphError::EmptyTails { arc });
            }
            for &(t, m) in &spec.tails {
                if t.0 >= n {
                    return Err(GraphError::VertexOutOfRange {
                        arc,
                        vertex: t.0,
                        count: n,
                    });
                }
                if m == 0 {
                    return Err(GraphError::ZeroMultiplicity { arc, vertex: t.0 });
                }
            }
        }
        Ok(Self::assemble(names, name_index, arcs))
    }

    fn assemble(
        names: Vec<Option<String>>,
        name_index: HashMap<String, VertexId>,
        arcs: Vec<ArcSpec>,
    ) -> Hypergraph {
        let n = names.len();
        let m = arcs.len();
        let mut heads = Vec::with_capacity(m);
        let mut lengths = Vec::with_capacity(m);
        let mut tail_offsets = Vec::with_capacity(m + 1);
        let mut tails = Vec::new();
        let mut distinct_offsets = Vec::with_capacity(m + 1);
        let mut distinct: Vec<(VertexId, u32)> = Vec::new();
        tail_offsets.push(0);
        distinct_offsets.push(0);
        for spec in &arcs {
            heads.push(spec.head);
            lengths.push(spec.length);
            let start = distinct.len();
            for &(t, mult) in &spec.tails {
                tails.extend(std::iter::repeat_n(t, mult as usize));
                match distinct[start..].iter_mut().find(|(v, _)| *v == t) {
                    Some(entry) => entry.1 += mult,
                    None => distinct.push((t, mult)),
                }
            }
            tail_offsets.push(tails.len());
            distinct_offsets.push(distinct.len());
        }

        let mut fwd_count = vec![0usize; n + 1];
        let mut bwd_count = vec![0usize; n + 1];
        for slot in 0..m {
            bwd_count[heads[slot].0 + 1] += 1;
            for &(t, _) in &distinct[distinct_offsets[slot]..distinct_offsets[slot + 1]] {
                fwd_count[t.0 + 1] += 1;
            }
        }
        for i in 0..n {
            fwd_count[i + 1] += fwd_count[i];
            bwd_count[i + 1] += bwd_count[i];
        }
        let fwd_offsets = fwd_count.clone();
        let bwd_offsets = bwd_count.clone();
        let mut fwd = vec![(ArcId::new(1), 0u32); fwd_offsets[n]];
        let mut bwd = vec![ArcId::new(1); bwd_offsets[n]];
        let mut fwd_fill = fwd_count;
        let mut bwd_fill = bwd_count;
        for slot in 0..m {
            let id = ArcId::from_slot(slot);
            let h = heads[slot].0;
            bwd[bwd_fill[h]] = id;
            bwd_fill[h] += 1;
            for &(t, mult) in &distinct[distinct_offsets[slot]..distinct_offsets[slot + 1]] {
                fwd[fwd_fill[t.0]] = (id, mult);
                fwd_fill[t.0] += 1;
            }
        }

        Hypergraph {
            names,
            name_index,
            heads,
            lengths,
            tail_offsets,
            tails,
            distinct_offsets,
            distinct,
            fwd_offsets,
            fwd,
            bwd_offsets,
            bwd,
        }
    }

    /// A hypergraph with no vertices and no arcs.
    pub fn empty() -> Hypergraph {
        Self::assemble(Vec::new(), HashMap::new(), Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn arc_count(&self) -> usize {
        self.heads.len()
    }

    /// Total input size: vertices plus, per arc, the head and every tail
    /// occurrence.
    pub fn size(&self) -> usize {
        self.vertex_count() + self.arc_count() + self.tails.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId)
    }

    pub fn arc_ids(&self) -> impl ExactSizeIterator<Item = ArcId> {
        (0..self.arc_count()).map(ArcId::from_slot)
    }

    pub fn arcs(&self) -> impl ExactSizeIterator<Item = Arc<'_>> + '_ {
        self.arc_ids().map(move |id| self.arc(id))
    }

    pub fn arc(&self, id: ArcId) -> Arc<'_> {
        let s = id.slot();
        Arc {
            id,
            head: self.heads[s],
            length: self.lengths[s],
            tails: &self.tails[self.tail_offsets[s]..self.tail_offsets[s + 1]],
            distinct_tails: &self.distinct[self.distinct_offsets[s]..self.distinct_offsets[s + 1]],
        }
    }

    #[inline]
    pub fn head(&self, id: ArcId) -> VertexId {
        self.heads[id.slot()]
    }

    #[inline]
    pub fn length(&self, id: ArcId) -> f64 {
        self.lengths[id.slot()]
    }

    #[inline]
    pub fn distinct_tails(&self, id: ArcId) -> &[(VertexId, u32)] {
        let s = id.slot();
        &self.distinct[self.distinct_offsets[s]..self.distinct_offsets[s + 1]]
    }

    /// Arcs in which `v` occurs as a tail, once per arc, with `v`'s
    /// multiplicity in that arc.
    #[inline]
    pub fn tail_of(&self, v: VertexId) -> &[(ArcId, u32)] {
        &self.fwd[self.fwd_offsets[v.0]..self.fwd_offsets[v.0 + 1]]
    }

    /// Arcs whose head is `v`.
    #[inline]
    pub fn head_of(&self, v: VertexId) -> &[ArcId] {
        &self.bwd[self.bwd_offsets[v.0]..self.bwd_offsets[v.0 + 1]]
    }

    pub fn name(&self, v: VertexId) -> Option<&str> {
        self.names[v.0].as_deref()
    }

    /// The vertex name, or `$<id>` for unnamed vertices.
    pub fn display_name(&self, v: VertexId) -> String {
        match &self.names[v.0] {
            Some(name) => name.clone(),
            None => format!("${}", v.0),
        }
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.name_index.get(name).copied()
    }

    pub fn names(&self) -> &[Option<String>] {
        &self.names
    }

    /// Arc specs in index order; `build(names, specs())` reproduces the graph.
    pub fn arc_specs(&self) -> Vec<ArcSpec> {
        self.arcs()
            .map(|a| ArcSpec {
                head: a.head,
                tails: runs(a.tails),
                length: a.length,
            })
            .collect()
    }

    /// Re-derives both adjacency directions from the arc list and checks that
    /// they agree with the stored ones.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertex_count();
        let mut fwd: Vec<Vec<(ArcId, u32)>> = vec![Vec::new(); n];
        let mut bwd: Vec<Vec<ArcId>> = vec![Vec::new(); n];
        for arc in self.arcs() {
            if arc.head.0 >= n {
                return Err(GraphError::VertexOutOfRange {
                    arc: arc.id.get(),
                    vertex: arc.head.0,
                    count: n,
                });
            }
            if arc.tails.is_empty() {
                return Err(GraphError::EmptyTails { arc: arc.id.get() });
            }
            if !(arc.length >= 0.0 && arc.length.is_finite()) {
                return Err(GraphError::NegativeLength {
                    arc: arc.id.get(),
                    length: arc.length,
                });
            }
            bwd[arc.head.0].push(arc.id);
            let mut seen: Vec<VertexId> = Vec::new();
            for &t in arc.tails {
                if t.0 >= n {
                    return Err(GraphError::VertexOutOfRange {
                        arc: arc.id.get(),
                        vertex: t.0,
                        count: n,
                    });
                }
                if !seen.contains(&t) {
                    seen.push(t);
                    let m = arc.tails.iter().filter(|&&x| x == t).count() as u32;
                    fwd[t.0].push((arc.id, m));
                }
            }
        }
        for v in self.vertices() {
            let mut stored_fwd = self.tail_of(v).to_vec();
            let mut derived_fwd = std::mem::take(&mut fwd[v.0]);
            stored_fwd.sort();
            derived_fwd.sort();
            if stored_fwd != derived_fwd || self.head_of(v) != bwd[v.0].as_slice() {
                return Err(GraphError::AdjacencyMismatch { vertex: v.0 });
            }
        }
        Ok(())
    }

    /// Restriction to a vertex subset: keeps the arcs whose head and every
    /// tail lie in `keep`. Vertex and arc relative order are preserved.
    pub fn restrict(&self, keep: &[VertexId]) -> Result<Subgraph, GraphError> {
        let mut mask = vec![false; self.vertex_count()];
        for &v in keep {
            if v.0 >= mask.len() {
                return Err(GraphError::SubsetOutOfRange {
                    vertex: v.0,
                    count: mask.len(),
                });
            }
            mask[v.0] = true;
        }
        Ok(self.restrict_mask(&mask, |_| true))
    }

    /// Restriction by vertex mask, with an additional per-arc filter. An arc
    /// survives iff `keep_arc` accepts it and its head and tails are all kept.
    pub fn restrict_mask(&self, keep_vertex: &[bool], keep_arc: impl Fn(ArcId) -> bool) -> Subgraph {
        assert_eq!(keep_vertex.len(), self.vertex_count());
        let mut vertex_map = vec![None; self.vertex_count()];
        let mut vertex_origin = Vec::new();
        let mut names = Vec::new();
        for v in self.vertices() {
            if keep_vertex[v.0] {
                vertex_map[v.0] = Some(VertexId(vertex_origin.len()));
                vertex_origin.push(v);
                names.push(self.names[v.0].clone());
            }
        }
        let mut arc_map = vec![None; self.arc_count()];
        let mut arc_origin = Vec::new();
        let mut specs = Vec::new();
        for arc in self.arcs() {
            let inside = keep_vertex[arc.head.0] && arc.tails.iter().all(|t| keep_vertex[t.0]);
            if inside && keep_arc(arc.id) {
                let map = |v: VertexId| vertex_map[v.0].expect("kept vertex");
                specs.push(ArcSpec {
                    head: map(arc.head),
                    tails: runs(arc.tails).into_iter().map(|(t, m)| (map(t), m)).collect(),
                    length: arc.length,
                });
                arc_map[arc.id.slot()] = Some(ArcId::from_slot(arc_origin.len()));
                arc_origin.push(arc.id);
            }
        }
        let name_index = names
            .iter()
            .enumerate()
            .filter_map(|(i, n)| n.clone().map(|n| (n, VertexId(i))))
            .collect();
        Subgraph {
            graph: Hypergraph::assemble(names, name_index, specs),
            vertex_map,
            vertex_origin,
            arc_map,
            arc_origin,
        }
    }
}

/// Collapses consecutive equal tail occurrences into `(vertex, count)` runs.
pub(crate) fn runs(tails: &[VertexId]) -> Vec<(VertexId, u32)> {
    let mut out: Vec<(VertexId, u32)> = Vec::new();
    for &t in tails {
        match out.last_mut() {
            Some((v, m)) if *v == t => *m += 1,
            _ => out.push((t, 1)),
        }
    }
    out
}

/// A restriction `G⟨V′⟩` together with the index maps between the parent
/// graph and the restricted one.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Hypergraph,
    /// parent vertex -> restricted vertex
    pub vertex_map: Vec<Option<VertexId>>,
    /// restricted vertex -> parent vertex
    pub vertex_origin: Vec<VertexId>,
    /// parent arc slot -> restricted arc
    pub arc_map: Vec<Option<ArcId>>,
    /// restricted arc slot -> parent arc
    pub arc_origin: Vec<ArcId>,
}

impl Subgraph {
    /// The trivial restriction of an empty parent.
    pub fn empty_of(parent: &Hypergraph) -> Subgraph {
        parent.restrict_mask(&vec![false; parent.vertex_count()], |_| false)
    }

    pub fn map_vertex(&self, v: VertexId) -> Option<VertexId> {
        self.vertex_map.get(v.0).copied().flatten()
    }

    pub fn map_arc(&self, a: ArcId) -> Option<ArcId> {
        self.arc_map.get(a.slot()).copied().flatten()
    }

    pub fn origin_vertex(&self, v: VertexId) -> VertexId {
        self.vertex_origin[v.0]
    }

    pub fn origin_arc(&self, a: ArcId) -> ArcId {
        self.arc_origin[a.slot()]
    }

    /// Maps a query into the restricted graph. Sources outside the
    /// restriction are dropped; `None` if the target or every source is gone.
    pub fn map_query(&self, q: &Query) -> Option<Query> {
        let target = self.map_vertex(q.target())?;
        let sources: Vec<_> = q
            .sources()
            .iter()
            .filter_map(|&(v, c)| self.map_vertex(v).map(|v| (v, c)))
            .collect();
        Query::new(sources, target).ok()
    }

    /// Composes `self` (a restriction of some `G`) with `inner` (a
    /// restriction of `self.graph`), giving a restriction of `G`.
    pub fn compose(&self, inner: Subgraph) -> Subgraph {
        let vertex_origin: Vec<_> = inner.vertex_origin.iter().map(|&v| self.origin_vertex(v)).collect();
        let arc_origin: Vec<_> = inner.arc_origin.iter().map(|&a| self.origin_arc(a)).collect();
        let mut vertex_map = vec![None; self.vertex_map.len()];
        for (i, v) in vertex_origin.iter().enumerate() {
            vertex_map[v.0] = Some(VertexId(i));
        }
        let mut arc_map = vec![None; self.arc_map.len()];
        for (i, a) in arc_origin.iter().enumerate() {
            arc_map[a.slot()] = Some(ArcId::from_slot(i));
        }
        Subgraph {
            graph: inner.graph,
            vertex_map,
            vertex_origin,
            arc_map,
            arc_origin,
        }
    }
}

/// Incremental builder that declares vertices by name on first use.
#[derive(Default, Debug)]
pub struct HypergraphBuilder {
    names: Vec<Option<String>>,
    index: HashMap<String, VertexId>,
    arcs: Vec<ArcSpec>,
}

impl HypergraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, declaring it if needed.
    pub fn vertex(&mut self, name: &str) -> VertexId {
        if let Some(&v) = self.index.get(name) {
            return v;
        }
        let v = VertexId(self.names.len());
        self.names.push(Some(name.to_string()));
        self.index.insert(name.to_string(), v);
        v
    }

    pub fn unnamed_vertex(&mut self) -> VertexId {
        self.names.push(None);
        VertexId(self.names.len() - 1)
    }

    /// Adds `head <- tails @ length`, returning the new arc's id.
    pub fn arc(&mut self, head: &str, tails: &[(&str, u32)], length: f64) -> ArcId {
        let head = self.vertex(head);
        let tails = tails.iter().map(|&(t, m)| (self.vertex(t), m)).collect();
        self.arcs.push(ArcSpec { head, tails, length });
        ArcId::from_slot(self.arcs.len() - 1)
    }

    pub fn arc_ids(&mut self, spec: ArcSpec) -> ArcId {
        self.arcs.push(spec);
        ArcId::from_slot(self.arcs.len() - 1)
    }

    pub fn build(self) -> Result<Hypergraph, GraphError> {
        Hypergraph::build(self.names, self.arcs)
    }
}
