//! Graph coloring: decision, chromatic number, vertex-criticality, cliques
//! and exhaustive enumeration of proper colorings.
//!
//! All searches share one engine. Each uncolored vertex keeps a count of
//! neighbours holding each color, so its set of still-available colors is
//! maintained incrementally and undone on backtrack. The next vertex to color
//! is one with the fewest available colors (lowest index on ties, unless
//! configured otherwise); a step that leaves a neighbour with no available
//! color is undone immediately.

use serde::Serialize;
use thiserror::Error;

use crate::design::CollinearityGraph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChromaError {
    #[error("graph has chromatic number {actual}, not {expected}")]
    ChromaticMismatch { expected: usize, actual: usize },
    #[error("coloring has {found} entries for a graph on {expected} vertices")]
    SizeMismatch { expected: usize, found: usize },
}

/// A total map from vertices to colors `0..num_colors`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub assignment: Vec<usize>,
    pub num_colors: usize,
}

impl Coloring {
    pub fn new(assignment: Vec<usize>, num_colors: usize) -> Self {
        Coloring {
            assignment,
            num_colors,
        }
    }

    pub fn is_proper(&self, graph: &CollinearityGraph) -> Result<bool, ChromaError> {
        if self.assignment.len() != graph.num_vertices() {
            return Err(ChromaError::SizeMismatch {
                expected: graph.num_vertices(),
                found: self.assignment.len(),
            });
        }
        Ok(self.assignment.iter().all(|&c| c < self.num_colors)
            && graph
                .edges()
                .iter()
                .all(|&(u, v)| self.assignment[u] != self.assignment[v]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestIndex,
    HighestIndex,
}

/// Partial assignment identifying one subtree of the enumeration.
pub type Prefix = Vec<(usize, usize)>;

const UNCOLORED: usize = usize::MAX;

/// Backtracking state over a fixed graph and palette size.
pub struct ColoringSearch<'g> {
    graph: &'g CollinearityGraph,
    neighbors: Vec<Vec<usize>>,
    colors: usize,
    tie_break: TieBreak,
    assignment: Vec<usize>,
    // blocked[v * colors + c]: neighbours of v currently holding c
    blocked: Vec<u32>,
    available: Vec<usize>,
    uncolored: usize,
}

impl<'g> ColoringSearch<'g> {
    pub fn new(graph: &'g CollinearityGraph, colors: usize) -> Self {
        let n = graph.num_vertices();
        ColoringSearch {
            graph,
            neighbors: (0..n).map(|v| graph.neighbors(v).collect()).collect(),
            colors,
            tie_break: TieBreak::default(),
            assignment: vec![UNCOLORED; n],
            blocked: vec![0; n * colors],
            available: vec![colors; n],
            uncolored: n,
        }
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn graph(&self) -> &CollinearityGraph {
        self.graph
    }

    fn reset(&mut self) {
        self.assignment.fill(UNCOLORED);
        self.blocked.fill(0);
        self.available.fill(self.colors);
        self.uncolored = self.assignment.len();
    }

    fn assign(&mut self, v: usize, c: usize) {
        self.assignment[v] = c;
        self.uncolored -= 1;
        for &u in &self.neighbors[v] {
            let slot = &mut self.blocked[u * self.colors + c];
            if *slot == 0 {
                self.available[u] -= 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize, c: usize) {
        self.assignment[v] = UNCOLORED;
        self.uncolored += 1;
        for &u in &self.neighbors[v] {
            let slot = &mut self.blocked[u * self.colors + c];
            *slot -= 1;
            if *slot == 0 {
                self.available[u] += 1;
            }
        }
    }

    #[inline]
    fn is_free(&self, v: usize, c: usize) -> bool {
        self.blocked[v * self.colors + c] == 0
    }

    /// After coloring `v`, some uncolored neighbour has nothing left.
    fn wiped_out(&self, v: usize) -> bool {
        self.neighbors[v]
            .iter()
            .any(|&u| self.assignment[u] == UNCOLORED && self.available[u] == 0)
    }

    fn select(&self) -> usize {
        let mut best = UNCOLORED;
        let mut best_avail = usize::MAX;
        let n = self.assignment.len();
        let mut consider = |v: usize| {
            if self.assignment[v] == UNCOLORED && self.available[v] < best_avail {
                best = v;
                best_avail = self.available[v];
            }
        };
        match self.tie_break {
            TieBreak::LowestIndex => (0..n).for_each(&mut consider),
            TieBreak::HighestIndex => (0..n).rev().for_each(&mut consider),
        }
        best
    }

    /// Visits every proper coloring exactly once.
    pub fn for_each<F: FnMut(&[usize])>(&mut self, mut visit: F) {
        self.for_each_in(&[], &mut visit);
    }

    /// Visits every proper coloring extending `prefix`, where `prefix` is one
    /// of the subtrees returned by [`ColoringSearch::subtrees`].
    pub fn for_each_in<F: FnMut(&[usize])>(&mut self, prefix: &[(usize, usize)], visit: &mut F) {
        self.reset();
        if self.assignment.is_empty() {
            visit(&self.assignment);
            return;
        }
        if self.colors == 0 {
            return;
        }
        for &(v, c) in prefix {
            self.assign(v, c);
        }
        self.enumerate(visit);
    }

    fn enumerate<F: FnMut(&[usize])>(&mut self, visit: &mut F) {
        if self.uncolored == 0 {
            visit(&self.assignment);
            return;
        }
        let v = self.select();
        for c in 0..self.colors {
            if !self.is_free(v, c) {
                continue;
            }
            self.assign(v, c);
            if !self.wiped_out(v) {
                self.enumerate(visit);
            }
            self.unassign(v, c);
        }
    }

    pub fn count(&mut self) -> u64 {
        let mut n = 0u64;
        self.for_each(|_| n += 1);
        n
    }

    /// Splits the search tree into disjoint subtrees by expanding branching
    /// steps breadth-first until at least `min_count` subtrees exist or no
    /// subtree can be expanded further. Enumerating every returned prefix
    /// with [`ColoringSearch::for_each_in`] visits each proper coloring
    /// exactly once.
    pub fn subtrees(&mut self, min_count: usize) -> Vec<Prefix> {
        let mut frontier: Vec<Prefix> = vec![Vec::new()];
        if self.colors == 0 && !self.assignment.is_empty() {
            return Vec::new();
        }
        loop {
            if frontier.len() >= min_count {
                return frontier;
            }
            let mut next = Vec::new();
            let mut expanded = false;
            for prefix in &frontier {
                self.reset();
                for &(v, c) in prefix {
                    self.assign(v, c);
                }
                if self.uncolored == 0 {
                    next.push(prefix.clone());
                    continue;
                }
                expanded = true;
                let v = self.select();
                for c in 0..self.colors {
                    if !self.is_free(v, c) {
                        continue;
                    }
                    self.assign(v, c);
                    if !self.wiped_out(v) {
                        let mut child = prefix.clone();
                        child.push((v, c));
                        next.push(child);
                    }
                    self.unassign(v, c);
                }
            }
            frontier = next;
            if !expanded {
                return frontier;
            }
        }
    }

    /// Whether a proper coloring exists. Colors are interchangeable here, so
    /// a vertex may only take an already used color or the next unused one.
    pub fn exists(&mut self) -> bool {
        self.reset();
        if self.assignment.is_empty() {
            return true;
        }
        if self.colors == 0 {
            return false;
        }
        self.search_one(0)
    }

    fn search_one(&mut self, used: usize) -> bool {
        if self.uncolored == 0 {
            return true;
        }
        let v = self.select();
        let limit = (used + 1).min(self.colors);
        for c in 0..limit {
            if !self.is_free(v, c) {
                continue;
            }
            self.assign(v, c);
            let found = !self.wiped_out(v) && self.search_one(used.max(c + 1));
            self.unassign(v, c);
            if found {
                return true;
            }
        }
        false
    }
}

/// Folds over all proper `colors`-colorings.
pub fn enumerate_proper_colorings<A, F>(
    graph: &CollinearityGraph,
    colors: usize,
    init: A,
    mut fold: F,
) -> A
where
    F: FnMut(A, &[usize]) -> A,
{
    let mut acc = Some(init);
    ColoringSearch::new(graph, colors).for_each(|c| {
        let a = acc.take().expect("accumulator present");
        acc = Some(fold(a, c));
    });
    acc.expect("accumulator present")
}

pub fn count_proper_colorings(graph: &CollinearityGraph, colors: usize) -> u64 {
    ColoringSearch::new(graph, colors).count()
}

pub fn is_q_colorable(graph: &CollinearityGraph, q: usize) -> bool {
    if q >= graph.num_vertices() {
        return true;
    }
    ColoringSearch::new(graph, q).exists()
}

/// Size of a largest clique.
pub fn clique_number(graph: &CollinearityGraph) -> usize {
    let mut best = 0;
    let candidates: Vec<usize> = (0..graph.num_vertices()).collect();
    grow_clique(graph, 0, &candidates, &mut best, usize::MAX);
    best
}

pub fn has_clique(graph: &CollinearityGraph, size: usize) -> bool {
    if size == 0 {
        return true;
    }
    let mut best = 0;
    let candidates: Vec<usize> = (0..graph.num_vertices()).collect();
    grow_clique(graph, 0, &candidates, &mut best, size);
    best >= size
}

/// Branch and bound over cliques, stopping once `target` is reached.
fn grow_clique(
    graph: &CollinearityGraph,
    size: usize,
    candidates: &[usize],
    best: &mut usize,
    target: usize,
) {
    if size > *best {
        *best = size;
    }
    for (i, &v) in candidates.iter().enumerate() {
        if *best >= target || size + candidates.len() - i <= *best {
            return;
        }
        let next: Vec<usize> = candidates[i + 1..]
            .iter()
            .copied()
            .filter(|&u| graph.has_edge(v, u))
            .collect();
        grow_clique(graph, size + 1, &next, best, target);
    }
}

/// Number of colors used by the saturation-degree greedy coloring.
pub fn greedy_upper_bound(graph: &CollinearityGraph) -> usize {
    let n = graph.num_vertices();
    let mut color = vec![UNCOLORED; n];
    let mut used = 0;
    for _ in 0..n {
        let mut best = UNCOLORED;
        let mut best_key = (0, 0);
        for v in (0..n).filter(|&v| color[v] == UNCOLORED) {
            let mut seen: Vec<usize> = graph
                .neighbors(v)
                .filter_map(|u| (color[u] != UNCOLORED).then_some(color[u]))
                .collect();
            seen.sort_unstable();
            seen.dedup();
            let key = (seen.len(), graph.degree(v));
            if best == UNCOLORED || key > best_key {
                best = v;
                best_key = key;
            }
        }
        let c = (0..)
            .find(|&c| graph.neighbors(best).all(|u| color[u] != c))
            .expect("some color is free");
        color[best] = c;
        used = used.max(c + 1);
    }
    used
}

/// Least `q` admitting a proper `q`-coloring: candidates between the clique
/// number and the greedy bound are tried in increasing order.
pub fn chromatic_number(graph: &CollinearityGraph) -> usize {
    let lower = clique_number(graph);
    let upper = greedy_upper_bound(graph);
    (lower..upper)
        .find(|&q| is_q_colorable(graph, q))
        .unwrap_or(upper)
}

/// Whether deleting any single vertex lowers the chromatic number below `q`,
/// where `q` must be the chromatic number of `graph`.
pub fn is_vertex_critical(graph: &CollinearityGraph, q: usize) -> Result<bool, ChromaError> {
    let actual = chromatic_number(graph);
    if actual != q {
        return Err(ChromaError::ChromaticMismatch {
            expected: q,
            actual,
        });
    }
    Ok(vertex_critical_unchecked(graph, q))
}

pub(crate) fn vertex_critical_unchecked(graph: &CollinearityGraph, q: usize) -> bool {
    if q == 0 {
        return true;
    }
    let n = graph.num_vertices();
    // A q-clique missing some vertex survives that vertex's deletion.
    if n > q && has_clique(graph, q) {
        return false;
    }
    (0..n).all(|v| is_q_colorable(&graph.without_vertex(v), q - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChromaReport {
    pub chi: usize,
    pub is_vertex_critical: bool,
    pub max_clique_lower_bound: usize,
    pub has_clique_of: Option<(usize, bool)>,
}

pub fn chroma_report(graph: &CollinearityGraph, clique_query: Option<usize>) -> ChromaReport {
    let chi = chromatic_number(graph);
    ChromaReport {
        chi,
        is_vertex_critical: vertex_critical_unchecked(graph, chi),
        max_clique_lower_bound: clique_number(graph),
        has_clique_of: clique_query.map(|s| (s, has_clique(graph, s))),
    }
}
