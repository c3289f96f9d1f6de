//! Automorphisms of designs and graphs, and canonical keys for designs.
//!
//! Group orders are computed by a backtracking search over point images.
//! Points are first split into classes by iterated neighbourhood refinement
//! of a weighted pair matrix (co-occurrence counts for designs, adjacency for
//! graphs), and a point may only map into its own class. Partial maps must
//! preserve the pair matrix; complete maps of a design are finally checked
//! against the block multiset.
//!
//! Canonical keys use individualization and refinement on the point/block
//! incidence structure, keeping the least encoded leaf and pruning children
//! that are related by automorphisms discovered along the way.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::design::{BlockDesign, CollinearityGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("image array is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("permutation acts on {perm} points, design has {design}")]
    SizeMismatch { perm: usize, design: usize },
    #[error("malformed cycle notation: {0}")]
    BadCycle(String),
    #[error("point {point} out of range 0..{n}")]
    PointOutOfRange { point: usize, n: usize },
}

/// A bijection of `0..n`, stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointPermutation {
    image: Vec<usize>,
}

impl PointPermutation {
    pub fn identity(n: usize) -> Self {
        PointPermutation {
            image: (0..n).collect(),
        }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self, SymmetryError> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &x in &image {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(SymmetryError::NotPermutation(n));
            }
        }
        Ok(PointPermutation { image })
    }

    /// Parses cycle notation such as `(2 3)(7 8)(9 10)` on `n` points.
    /// Entries may be separated by spaces or commas; fixed points are omitted.
    pub fn parse_cycles(text: &str, n: usize) -> Result<Self, SymmetryError> {
        let mut image: Vec<usize> = (0..n).collect();
        let mut moved = vec![false; n];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| SymmetryError::BadCycle(text.to_string()))?;
            let close = body
                .find(')')
                .ok_or_else(|| SymmetryError::BadCycle(text.to_string()))?;
            let cycle = body[..close]
                .split(|c: char| c.is_ascii_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| SymmetryError::BadCycle(text.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            for (i, &p) in cycle.iter().enumerate() {
                if p >= n {
                    return Err(SymmetryError::PointOutOfRange { point: p, n });
                }
                if std::mem::replace(&mut moved[p], true) {
                    return Err(SymmetryError::BadCycle(text.to_string()));
                }
                image[p] = cycle[(i + 1) % cycle.len()];
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(PointPermutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, p: usize) -> usize {
        self.image[p]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        PointPermutation {
            image: other.image.iter().map(|&p| self.image[p]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut image = vec![0; self.image.len()];
        for (p, &q) in self.image.iter().enumerate() {
            image[q] = p;
        }
        PointPermutation { image }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.len()), |acc, _| acc.compose(self))
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(p, &q)| p == q)
    }
}

impl fmt::Display for PointPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.len()];
        let mut any = false;
        for start in 0..self.len() {
            if seen[start] || self.image[start] == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut p = start;
            let mut first = true;
            while !seen[p] {
                seen[p] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{p}")?;
                first = false;
                p = self.image[p];
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

fn sorted_block_multiset(blocks: impl Iterator<Item = Vec<usize>>) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = blocks
        .map(|mut b| {
            b.sort_unstable();
            b
        })
        .collect();
    out.sort_unstable();
    out
}

/// Whether `perm` maps the multiset of blocks, read as sets, onto itself.
pub fn is_design_automorphism(
    design: &BlockDesign,
    perm: &PointPermutation,
) -> Result<bool, SymmetryError> {
    if perm.len() != design.num_points() {
        return Err(SymmetryError::SizeMismatch {
            perm: perm.len(),
            design: design.num_points(),
        });
    }
    Ok(maps_blocks_onto_themselves(design, perm.image()))
}

fn maps_blocks_onto_themselves(design: &BlockDesign, image: &[usize]) -> bool {
    let original = sorted_block_multiset(design.blocks().iter().cloned());
    let mapped = sorted_block_multiset(
        design
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&p| image[p]).collect()),
    );
    original == mapped
}

/// Replaces every entry by its rank among the distinct entries.
fn ranks<T: Ord + Clone>(sigs: &[T]) -> Vec<usize> {
    let mut distinct = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(s).expect("present"))
        .collect()
}

/// Symmetric weighted pair matrix over `n` points.
struct PairMatrix {
    n: usize,
    w: Vec<u32>,
}

impl PairMatrix {
    fn of_design(design: &BlockDesign) -> Self {
        let n = design.num_points();
        let mut w = vec![0; n * n];
        for block in design.blocks() {
            for &p in block {
                for &q in block {
                    w[p * n + q] += 1;
                }
            }
        }
        PairMatrix { n, w }
    }

    fn of_graph(graph: &CollinearityGraph) -> Self {
        let n = graph.num_vertices();
        let mut w = vec![0; n * n];
        for (u, v) in graph.edges() {
            w[u * n + v] = 1;
            w[v * n + u] = 1;
        }
        PairMatrix { n, w }
    }

    #[inline]
    fn at(&self, p: usize, q: usize) -> u32 {
        self.w[p * self.n + q]
    }

    /// Equitable refinement starting from the diagonal (degrees).
    fn classes(&self) -> Vec<usize> {
        let n = self.n;
        let mut colors = ranks(&(0..n).map(|p| self.at(p, p)).collect::<Vec<_>>());
        let mut count = colors.iter().max().map_or(0, |m| m + 1);
        loop {
            let sigs: Vec<(usize, Vec<(u32, usize)>)> = (0..n)
                .map(|p| {
                    let mut nb: Vec<(u32, usize)> = (0..n)
                        .filter(|&q| q != p && self.at(p, q) > 0)
                        .map(|q| (self.at(p, q), colors[q]))
                        .collect();
                    nb.sort_unstable();
                    (colors[p], nb)
                })
                .collect();
            let next = ranks(&sigs);
            let next_count = next.iter().max().map_or(0, |m| m + 1);
            colors = next;
            if next_count == count {
                return colors;
            }
            count = next_count;
        }
    }
}

/// Backtracking over point images that preserve a pair matrix.
struct AutSearch<'a> {
    pairs: PairMatrix,
    classes: Vec<usize>,
    order: Vec<usize>,
    leaf_ok: Option<&'a dyn Fn(&[usize]) -> bool>,
}

impl<'a> AutSearch<'a> {
    fn new(pairs: PairMatrix, leaf_ok: Option<&'a dyn Fn(&[usize]) -> bool>) -> Self {
        let classes = pairs.classes();
        let n = pairs.n;
        // Small classes first, then points tied to already placed ones.
        let mut class_size = vec![0usize; n];
        for &c in &classes {
            class_size[c] += 1;
        }
        let mut order = Vec::with_capacity(n);
        let mut placed = vec![false; n];
        while order.len() < n {
            let next = (0..n)
                .filter(|&p| !placed[p])
                .min_by_key(|&p| {
                    let links = order.iter().filter(|&&q| pairs.at(p, q) > 0).count();
                    (class_size[classes[p]], std::cmp::Reverse(links), p)
                })
                .expect("unplaced point");
            placed[next] = true;
            order.push(next);
        }
        AutSearch {
            pairs,
            classes,
            order,
            leaf_ok,
        }
    }

    fn visit<F: FnMut(&[usize])>(&self, visit: &mut F) {
        let n = self.pairs.n;
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        self.extend(0, &mut image, &mut used, visit);
    }

    fn extend<F: FnMut(&[usize])>(
        &self,
        depth: usize,
        image: &mut [usize],
        used: &mut [bool],
        visit: &mut F,
    ) {
        let n = self.pairs.n;
        if depth == n {
            if self.leaf_ok.is_none_or(|ok| ok(image)) {
                visit(image);
            }
            return;
        }
        let p = self.order[depth];
        for q in 0..n {
            if used[q] || self.classes[q] != self.classes[p] {
                continue;
            }
            if self.pairs.at(p, p) != self.pairs.at(q, q) {
                continue;
            }
            let consistent = self.order[..depth]
                .iter()
                .all(|&s| self.pairs.at(p, s) == self.pairs.at(q, image[s]));
            if !consistent {
                continue;
            }
            image[p] = q;
            used[q] = true;
            self.extend(depth + 1, image, used, visit);
            used[q] = false;
            image[p] = usize::MAX;
        }
    }
}

/// Calls `visit` on every automorphism of the design.
pub fn for_each_design_automorphism<F: FnMut(&PointPermutation)>(design: &BlockDesign, mut visit: F) {
    let check = |image: &[usize]| maps_blocks_onto_themselves(design, image);
    let search = AutSearch::new(PairMatrix::of_design(design), Some(&check));
    search.visit(&mut |image| {
        visit(&PointPermutation {
            image: image.to_vec(),
        })
    });
}

/// Order of the group of point permutations preserving the block multiset.
pub fn design_aut_order(design: &BlockDesign) -> u64 {
    let mut count = 0;
    for_each_design_automorphism(design, |_| count += 1);
    count
}

pub fn graph_aut_order(graph: &CollinearityGraph) -> u64 {
    let search = AutSearch::new(PairMatrix::of_graph(graph), None);
    let mut count = 0;
    search.visit(&mut |_| count += 1);
    count
}

/// Isomorphism-invariant key: equal for two designs exactly when some point
/// relabeling carries one block multiset onto the other.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    num_points: usize,
    block_size: usize,
    blocks: Vec<Vec<usize>>,
}

impl CanonicalKey {
    /// The canonically relabeled design, with sorted blocks in sorted order.
    pub fn to_design(&self) -> BlockDesign {
        BlockDesign::with_num_points(self.blocks.clone(), self.num_points)
            .expect("canonical blocks are valid")
    }
}

pub fn canonical_key(design: &BlockDesign) -> CanonicalKey {
    let mut canon = Canonizer::new(design, true);
    canon.run();
    canon.key()
}

struct Canonizer {
    n: usize,
    blocks: Vec<Vec<usize>>,
    memberships: Vec<Vec<usize>>,
    block_size: usize,
    prune: bool,
    first: Option<(Vec<Vec<usize>>, Vec<usize>)>,
    best: Option<(Vec<Vec<usize>>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
    leaves_like_first: u64,
}

impl Canonizer {
    fn new(design: &BlockDesign, prune: bool) -> Self {
        Canonizer {
            n: design.num_points(),
            blocks: design.sorted_blocks(),
            memberships: design.memberships(),
            block_size: design.block_size(),
            prune,
            first: None,
            best: None,
            automorphisms: Vec::new(),
            leaves_like_first: 0,
        }
    }

    fn run(&mut self) {
        let start = vec![0; self.n];
        let mut path = Vec::new();
        self.search(start, &mut path);
    }

    fn key(&self) -> CanonicalKey {
        CanonicalKey {
            num_points: self.n,
            block_size: self.block_size,
            blocks: self.best.as_ref().map(|b| b.0.clone()).unwrap_or_default(),
        }
    }

    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut count = distinct(&colors);
        loop {
            let block_sigs: Vec<Vec<usize>> = self
                .blocks
                .iter()
                .map(|b| {
                    let mut s: Vec<usize> = b.iter().map(|&p| colors[p]).collect();
                    s.sort_unstable();
                    s
                })
                .collect();
            let block_colors = ranks(&block_sigs);
            let point_sigs: Vec<(usize, Vec<usize>)> = (0..self.n)
                .map(|p| {
                    let mut s: Vec<usize> =
                        self.memberships[p].iter().map(|&b| block_colors[b]).collect();
                    s.sort_unstable();
                    (colors[p], s)
                })
                .collect();
            colors = ranks(&point_sigs);
            let next = distinct(&colors);
            if next == count {
                return colors;
            }
            count = next;
        }
    }

    fn encode(&self, labels: &[usize]) -> Vec<Vec<usize>> {
        sorted_block_multiset(
            self.blocks
                .iter()
                .map(|b| b.iter().map(|&p| labels[p]).collect()),
        )
    }

    /// Automorphism `p -> a^{-1}(b(p))` from two leaves with equal encodings.
    fn record_automorphism(&mut self, a: &[usize], b: &[usize]) {
        let mut inv = vec![0; self.n];
        for (p, &l) in a.iter().enumerate() {
            inv[l] = p;
        }
        let gamma: Vec<usize> = b.iter().map(|&l| inv[l]).collect();
        if gamma.iter().enumerate().any(|(p, &q)| p != q) && !self.automorphisms.contains(&gamma) {
            self.automorphisms.push(gamma);
        }
    }

    fn search(&mut self, colors: Vec<usize>, path: &mut Vec<usize>) {
        let colors = self.refine(colors);
        let cells = distinct(&colors);
        if cells == self.n {
            let form = self.encode(&colors);
            match &self.first {
                None => {
                    self.first = Some((form.clone(), colors.clone()));
                    self.best = Some((form, colors));
                    self.leaves_like_first = 1;
                    return;
                }
                Some((f, labels)) if *f == form => {
                    let labels = labels.clone();
                    self.leaves_like_first += 1;
                    self.record_automorphism(&labels, &colors);
                }
                _ => {}
            }
            let (best_form, best_labels) = self.best.as_ref().expect("set with first");
            if form == *best_form {
                let labels = best_labels.clone();
                self.record_automorphism(&labels, &colors);
            } else if form < *best_form {
                self.best = Some((form, colors));
            }
            return;
        }
        // Target cell: the first non-singleton cell.
        let mut size = vec![0usize; cells];
        for &c in &colors {
            size[c] += 1;
        }
        let target = (0..cells).find(|&c| size[c] > 1).expect("not discrete");
        let cell: Vec<usize> = (0..self.n).filter(|&p| colors[p] == target).collect();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            if self.prune && !tried.is_empty() && self.equivalent_to_tried(v, &tried, path) {
                continue;
            }
            tried.push(v);
            let child: Vec<usize> = colors
                .iter()
                .enumerate()
                .map(|(p, &c)| 2 * c + usize::from(c == target && p != v))
                .collect();
            path.push(v);
            self.search(ranks(&child), path);
            path.pop();
        }
    }

    /// Whether `v` lies in the orbit of a tried vertex under the discovered
    /// automorphisms that fix `path` pointwise.
    fn equivalent_to_tried(&self, v: usize, tried: &[usize], path: &[usize]) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for gamma in &self.automorphisms {
            if path.iter().any(|&p| gamma[p] != p) {
                continue;
            }
            for (p, &q) in gamma.iter().enumerate() {
                let (a, b) = (find(&mut parent, p), find(&mut parent, q));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        let root = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == root)
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut seen = BTreeMap::new();
    for &c in colors {
        seen.insert(c, ());
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{parse_block_list, parse_symbolic};
    use proptest::prelude::*;

    const FIRST: &str = "1,3,2,0,4; 6,0,5,8,7; 9,10,13,11,12; 14,9,10,1,5; 1,3,2,6,11; \
                         12,4,5,8,7; 14,9,13,2,7; 14,10,13,3,8; 6,11,0,12,4";
    const SECOND: &str = "0,1,2,3,4; 0,5,6,7,8; 9,10,11,12,13; 1,5,9,10,14; 1,2,3,6,11; \
                          4,5,7,8,12; 2,7,9,13,14; 3,8,10,13,14; 0,4,6,11,12";

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Group order by trying every permutation.
    fn brute_aut(design: &BlockDesign) -> u64 {
        all_permutations(design.num_points())
            .iter()
            .filter(|img| maps_blocks_onto_themselves(design, img))
            .count() as u64
    }

    /// Leaves of the unpruned refinement tree carrying the first leaf's
    /// encoding; their number equals the automorphism group order.
    fn aut_by_leaves(design: &BlockDesign) -> u64 {
        let mut c = Canonizer::new(design, false);
        c.run();
        c.leaves_like_first
    }

    #[test]
    fn cycle_notation() {
        let tau = PointPermutation::parse_cycles("(2 3)(7 8)(9 10)", 15).unwrap();
        assert_eq!(tau.apply(2), 3);
        assert_eq!(tau.apply(0), 0);
        assert_eq!(tau.to_string(), "(2 3)(7 8)(9 10)");
        assert_eq!(PointPermutation::identity(3).to_string(), "()");
        assert!(PointPermutation::parse_cycles("(1 2", 5).is_err());
        assert!(PointPermutation::parse_cycles("(1 1)", 5).is_err());
        assert!(PointPermutation::parse_cycles("(1 9)", 5).is_err());
        assert!(PointPermutation::parse_cycles("1 2", 5).is_err());
        assert!(PointPermutation::from_image(vec![0, 0]).is_err());
        assert_eq!(PointPermutation::parse_cycles("(0,1)", 2).unwrap().image(), &[1, 0]);
    }

    #[test]
    fn generators_of_the_main_design() {
        let d = parse_block_list(FIRST).unwrap();
        let tau = PointPermutation::parse_cycles("(2 3)(7 8)(9 10)", 15).unwrap();
        let omega =
            PointPermutation::parse_cycles("(1 7 3 5 2 8)(9 13 10)(4 6)(11 12)", 15).unwrap();
        assert_eq!(is_design_automorphism(&d, &tau), Ok(true));
        assert_eq!(is_design_automorphism(&d, &omega), Ok(true));
        let swap = PointPermutation::parse_cycles("(0 1)", 15).unwrap();
        assert_eq!(is_design_automorphism(&d, &swap), Ok(false));
        assert!(is_design_automorphism(&d, &PointPermutation::identity(4)).is_err());

        assert!(tau.pow(2).is_identity());
        assert!(omega.pow(6).is_identity());
        assert!(!omega.pow(3).is_identity() && !omega.pow(2).is_identity());
        assert_eq!(tau.compose(&omega).compose(&tau), omega.inverse());
    }

    #[test]
    fn group_orders() {
        let d = parse_block_list(FIRST).unwrap();
        assert_eq!(design_aut_order(&d), 12);
        assert_eq!(graph_aut_order(&d.collinearity()), 288);
        assert_eq!(aut_by_leaves(&d), 12);

        let aronhold = parse_symbolic("(abc)(abd)(acd)(bcd)").unwrap();
        assert_eq!(design_aut_order(&aronhold), 24);
        assert_eq!(brute_aut(&aronhold), 24);

        let quadric = parse_symbolic("(abcde)^2").unwrap();
        assert_eq!(design_aut_order(&quadric), 120);
        assert_eq!(aut_by_leaves(&quadric), 120);

        assert_eq!(graph_aut_order(&CollinearityGraph::complete(4)), 24);
        assert_eq!(graph_aut_order(&CollinearityGraph::cycle(5)), 10);
    }

    #[test]
    fn group_is_closed_under_products() {
        let d = parse_block_list(FIRST).unwrap();
        let mut elements = Vec::new();
        for_each_design_automorphism(&d, |g| elements.push(g.clone()));
        for a in &elements {
            assert_eq!(is_design_automorphism(&d, &a.inverse()), Ok(true));
            for b in &elements {
                assert_eq!(is_design_automorphism(&d, &a.compose(b)), Ok(true));
            }
        }
    }

    #[test]
    fn design_group_divides_graph_group() {
        for s in ["(abc)(abd)(acd)(bcd)", "(abc)^2(ade)(adf)(bdf)(bef)(cde)(cef)", "(abcde)^2"] {
            let d = parse_symbolic(s).unwrap();
            assert_eq!(graph_aut_order(&d.collinearity()) % design_aut_order(&d), 0);
        }
    }

    #[test]
    fn canonical_keys() {
        let a = parse_block_list(FIRST).unwrap();
        let b = parse_block_list(SECOND).unwrap();
        assert_eq!(canonical_key(&a), canonical_key(&b));
        let aronhold = parse_symbolic("(abc)(abd)(acd)(bcd)").unwrap();
        assert_ne!(canonical_key(&a), canonical_key(&aronhold));
        let rep = canonical_key(&a).to_design();
        assert_eq!(canonical_key(&rep), canonical_key(&a));
    }

    #[test]
    fn keys_separate_non_isomorphic_designs() {
        let c4 = parse_block_list("0,1; 1,2; 2,3; 3,0").unwrap();
        let doubled = parse_block_list("0,1; 0,1; 2,3; 2,3").unwrap();
        assert_ne!(canonical_key(&c4), canonical_key(&doubled));
        let shifted = parse_block_list("2,1; 1,0; 0,3; 3,2").unwrap();
        assert_eq!(canonical_key(&c4), canonical_key(&shifted));
    }

    fn arb_design() -> impl Strategy<Value = BlockDesign> {
        (2usize..7, 1usize..3, 1usize..6).prop_flat_map(|(n, extra, b)| {
            let k = (extra + 1).min(n);
            proptest::collection::vec(
                proptest::sample::subsequence((0..n).collect::<Vec<_>>(), k),
                b,
            )
            .prop_map(move |blocks| BlockDesign::with_num_points(blocks, n).unwrap())
        })
    }

    fn brute_isomorphic(a: &BlockDesign, b: &BlockDesign) -> bool {
        a.num_points() == b.num_points()
            && a.num_blocks() == b.num_blocks()
            && a.block_size() == b.block_size()
            && all_permutations(a.num_points()).iter().any(|img| {
                sorted_block_multiset(
                    a.blocks().iter().map(|blk| blk.iter().map(|&p| img[p]).collect()),
                ) == sorted_block_multiset(b.blocks().iter().cloned())
            })
    }

    proptest! {
        #[test]
        fn key_is_relabeling_invariant(d in arb_design(), seed in any::<u64>()) {
            let n = d.num_points();
            let mut image: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                image.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut blocks: Vec<Vec<usize>> =
                d.blocks().iter().map(|b| b.iter().rev().map(|&p| image[p]).collect()).collect();
            blocks.reverse();
            let e = BlockDesign::with_num_points(blocks, n).unwrap();
            prop_assert_eq!(canonical_key(&d), canonical_key(&e));
        }

        #[test]
        fn key_equality_is_isomorphism(a in arb_design(), b in arb_design()) {
            prop_assert_eq!(canonical_key(&a) == canonical_key(&b), brute_isomorphic(&a, &b));
        }

        #[test]
        fn aut_order_matches_brute_force(d in arb_design()) {
            let order = design_aut_order(&d);
            prop_assert_eq!(order, brute_aut(&d));
            prop_assert_eq!(order, aut_by_leaves(&d));
            let n = d.num_points() as u64;
            prop_assert_eq!((1..=n).product::<u64>() % order, 0);
        }
    }
}
