//! Min-priority queue over vertex ids with DECREASE-KEY by lazy re-insertion.
//!
//! Each vertex has at most one live key; superseded heap entries are skipped
//! on extraction. Equal keys are extracted lowest vertex id first.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::VertexId;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum State {
    Absent,
    Queued,
    Extracted,
}

#[derive(Copy, Clone, Debug)]
struct Entry {
    key: f64,
    vertex: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

#[derive(Debug)]
pub(crate) struct MinQueue {
    heap: BinaryHeap<Entry>,
    key: Vec<f64>,
    state: Vec<State>,
}

impl MinQueue {
    pub(crate) fn new(vertices: usize) -> MinQueue {
        MinQueue {
            heap: BinaryHeap::new(),
            key: vec![f64::INFINITY; vertices],
            state: vec![State::Absent; vertices],
        }
    }

    pub(crate) fn insert(&mut self, v: VertexId, key: f64) {
        debug_assert_eq!(self.state[v.0], State::Absent, "insert of a vertex already seen");
        self.push(v, key);
    }

    /// Lowers the key of a queued vertex. Returns `false`, leaving the queue
    /// untouched, if `v` is not currently queued.
    pub(crate) fn decrease_key(&mut self, v: VertexId, key: f64) -> bool {
        if self.state[v.0] != State::Queued {
            return false;
        }
        debug_assert!(key <= self.key[v.0]);
        self.push(v, key);
        true
    }

    /// Inserts or re-queues `v` with `key` regardless of its current state.
    pub(crate) fn push(&mut self, v: VertexId, key: f64) {
        self.key[v.0] = key;
        self.state[v.0] = State::Queued;
        self.heap.push(Entry { key, vertex: v.0 });
    }

    pub(crate) fn extract_min(&mut self) -> Option<(VertexId, f64)> {
        while let Some(Entry { key, vertex }) = self.heap.pop() {
            if self.state[vertex] == State::Queued && self.key[vertex].total_cmp(&key) == Ordering::Equal {
                self.state[vertex] = State::Extracted;
                return Some((VertexId(vertex), key));
            }
        }
        None
    }
}
