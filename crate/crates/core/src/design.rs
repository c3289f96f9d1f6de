//! Block designs: ordered blocks over a finite point set, their two textual
//! encodings, structural validation and the collinearity graph.
//!
//! A block is an ordered tuple of distinct points. The order of the blocks
//! inside a design is irrelevant for the encoded invariant, but the order of
//! the points inside a block fixes the sign of the corresponding determinant
//! factor, so it is preserved verbatim by parsing and serialization.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesignError {
    #[error("empty design")]
    Empty,
    #[error("invalid token `{0}`")]
    InvalidToken(String),
    #[error("block {block} repeats point {point}")]
    DuplicatePoint { block: usize, point: usize },
    #[error("block {block} has {found} points, expected {expected}")]
    InconsistentBlockSize {
        block: usize,
        found: usize,
        expected: usize,
    },
    #[error("point {point} out of range for a design on {num_points} points")]
    PointOutOfRange { point: usize, num_points: usize },
    #[error("unbalanced parentheses at byte {0}")]
    Unbalanced(usize),
    #[error("unexpected character `{ch}` at byte {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("exponent must be a positive integer, got `{0}`")]
    BadExponent(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<DesignError>,
    },
    #[error("designs are not reorderings of the same block multiset")]
    NotReorderings,
}

/// Ordered blocks over the points `0..num_points`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockDesign {
    num_points: usize,
    blocks: Vec<Vec<usize>>,
    block_size: usize,
    degrees: Vec<usize>,
}

impl BlockDesign {
    /// Builds a design, inferring the number of points as `max index + 1`.
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self, DesignError> {
        let num_points = blocks
            .iter()
            .flatten()
            .max()
            .map_or(0, |&p| p + 1);
        Self::with_num_points(blocks, num_points)
    }

    /// Builds a design on an explicit point set, which may contain points
    /// that occur in no block.
    pub fn with_num_points(
        blocks: Vec<Vec<usize>>,
        num_points: usize,
    ) -> Result<Self, DesignError> {
        let first = blocks.first().ok_or(DesignError::Empty)?;
        let block_size = first.len();
        if block_size == 0 {
            return Err(DesignError::Empty);
        }
        let mut degrees = vec![0; num_points];
        for (b, block) in blocks.iter().enumerate() {
            if block.len() != block_size {
                return Err(DesignError::InconsistentBlockSize {
                    block: b,
                    found: block.len(),
                    expected: block_size,
                });
            }
            for (i, &p) in block.iter().enumerate() {
                if p >= num_points {
                    return Err(DesignError::PointOutOfRange {
                        point: p,
                        num_points,
                    });
                }
                if block[..i].contains(&p) {
                    return Err(DesignError::DuplicatePoint { block: b, point: p });
                }
                degrees[p] += 1;
            }
        }
        Ok(BlockDesign {
            num_points,
            blocks,
            block_size,
            degrees,
        })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Number of blocks containing each point.
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// The common point degree, if every point has the same one.
    pub fn point_degree(&self) -> Option<usize> {
        let (&first, rest) = self.degrees.split_first()?;
        rest.iter().all(|&d| d == first).then_some(first)
    }

    pub fn is_biregular(&self) -> bool {
        self.point_degree().is_some_and(|d| d > 0)
    }

    /// Indices of the blocks containing each point, in increasing order.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_points];
        for (b, block) in self.blocks.iter().enumerate() {
            for &p in block {
                out[p].push(b);
            }
        }
        out
    }

    /// Blocks as sorted point sets, in block order.
    pub fn sorted_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks
            .iter()
            .map(|b| {
                let mut s = b.clone();
                s.sort_unstable();
                s
            })
            .collect()
    }

    /// Applies a point relabeling `p -> image[p]` to every block, keeping
    /// block order and within-block order.
    pub fn relabeled(&self, image: &[usize]) -> Result<Self, DesignError> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|&p| image[p]).collect())
            .collect();
        Self::with_num_points(blocks, self.num_points)
    }

    /// Block-list serialization, e.g. `0,1,2; 0,1,3`.
    pub fn to_block_list(&self) -> String {
        self.to_string()
    }

    /// Symbolic serialization with letters `a..z`, or `None` for designs on
    /// more than 26 points. Consecutive equal blocks are folded into powers.
    pub fn to_symbolic(&self) -> Option<String> {
        if self.num_points > 26 {
            return None;
        }
        let mut out = String::new();
        let mut i = 0;
        while i < self.blocks.len() {
            let mut run = 1;
            while i + run < self.blocks.len() && self.blocks[i + run] == self.blocks[i] {
                run += 1;
            }
            out.push('(');
            out.extend(self.blocks[i].iter().map(|&p| (b'a' + p as u8) as char));
            out.push(')');
            if run > 1 {
                out.push_str(&format!("^{run}"));
            }
            i += run;
        }
        Some(out)
    }

    pub fn collinearity(&self) -> CollinearityGraph {
        collinearity(self)
    }
}

impl fmt::Display for BlockDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, block) in self.blocks.iter().enumerate() {
            if b > 0 {
                f.write_str("; ")?;
            }
            for (i, p) in block.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for BlockDesign {
    type Err = DesignError;

    /// Accepts either encoding: symbolic when the text starts with `(`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim_start().starts_with('(') {
            parse_symbolic(s)
        } else {
            parse_block_list(s)
        }
    }
}

/// Parses `block (';' block)*` with `block := int (',' int)*`.
pub fn parse_block_list(text: &str) -> Result<BlockDesign, DesignError> {
    let compact: String = text.chars().filter(|c| !c.is_ascii_whitespace()).collect();
    if compact.is_empty() {
        return Err(DesignError::Empty);
    }
    let mut blocks = Vec::new();
    for block in compact.split(';') {
        let points = block
            .split(',')
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| DesignError::InvalidToken(tok.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        blocks.push(points);
    }
    BlockDesign::new(blocks)
}

/// Parses a product of bracket factors such as `(abc)^2(ade)(adf)`.
pub fn parse_symbolic(text: &str) -> Result<BlockDesign, DesignError> {
    let bytes = text.as_bytes();
    let mut blocks = Vec::new();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    loop {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            break;
        }
        match bytes[pos] {
            b'(' => {}
            b')' => return Err(DesignError::Unbalanced(pos)),
            _ => {
                return Err(DesignError::UnexpectedChar {
                    ch: text[pos..].chars().next().unwrap_or('?'),
                    pos,
                })
            }
        }
        let open = pos;
        pos += 1;
        let mut block = Vec::new();
        loop {
            skip_ws(&mut pos);
            match bytes.get(pos) {
                None | Some(b'(') => return Err(DesignError::Unbalanced(open)),
                Some(b')') => break,
                Some(c @ b'a'..=b'z') => block.push((c - b'a') as usize),
                Some(_) => {
                    return Err(DesignError::UnexpectedChar {
                        ch: text[pos..].chars().next().unwrap_or('?'),
                        pos,
                    })
                }
            }
            pos += 1;
        }
        pos += 1;
        if block.is_empty() {
            return Err(DesignError::Empty);
        }
        skip_ws(&mut pos);
        let mut reps = 1;
        if bytes.get(pos) == Some(&b'^') {
            pos += 1;
            skip_ws(&mut pos);
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let tok = &text[start..pos];
            reps = match tok.parse::<usize>() {
                Ok(n) if n > 0 => n,
                _ => return Err(DesignError::BadExponent(tok.to_string())),
            };
        }
        for _ in 0..reps {
            blocks.push(block.clone());
        }
    }
    BlockDesign::new(blocks)
}

/// Parses a graph-list file: one block-list design per line, `#` comments
/// and blank lines ignored.
pub fn parse_graph_list(text: &str) -> Result<Vec<BlockDesign>, DesignError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| {
            l.parse::<BlockDesign>().map_err(|e| DesignError::Line {
                line: i + 1,
                source: Box::new(e),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_biregular: bool,
    pub observed_degrees: Vec<usize>,
    /// Two points lie in exactly the same blocks.
    pub has_repeated_vertices: bool,
    /// Two blocks are equal as sets.
    pub has_repeated_blocks: bool,
}

impl ValidationReport {
    /// Repeated vertices force the encoded invariant to vanish when the
    /// common point degree is odd.
    pub fn forces_vanishing(&self) -> bool {
        self.has_repeated_vertices
            && self.is_biregular
            && self.observed_degrees.first().is_some_and(|d| d % 2 == 1)
    }
}

pub fn validate(design: &BlockDesign) -> ValidationReport {
    let mut memberships = design.memberships();
    memberships.sort_unstable();
    let has_repeated_vertices = memberships.windows(2).any(|w| w[0] == w[1]);

    let mut sets = design.sorted_blocks();
    sets.sort_unstable();
    let has_repeated_blocks = sets.windows(2).any(|w| w[0] == w[1]);

    ValidationReport {
        is_biregular: design.is_biregular(),
        observed_degrees: design.degrees().to_vec(),
        has_repeated_vertices,
        has_repeated_blocks,
    }
}

/// Simple undirected graph stored as adjacency bit rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CollinearityGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl CollinearityGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        CollinearityGraph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `{u, v}`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "vertex out of range");
        if u == v {
            return;
        }
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(i, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.edge_count() == self.n * self.n.saturating_sub(1) / 2
    }

    /// Induced subgraph on all vertices but `v`; later vertices shift down by one.
    pub fn without_vertex(&self, v: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced(&keep)
    }

    /// Induced subgraph on `keep`, vertex `keep[i]` becoming `i`.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut g = Self::empty(keep.len());
        for (i, &a) in keep.iter().enumerate() {
            for (j, &b) in keep.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Disjoint union with `extra` isolated vertices appended.
    pub fn with_isolated(&self, extra: usize) -> Self {
        let mut g = Self::empty(self.n + extra);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        g
    }

    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

/// Union of one clique per block.
pub fn collinearity(design: &BlockDesign) -> CollinearityGraph {
    let mut g = CollinearityGraph::empty(design.num_points());
    for block in design.blocks() {
        for (i, &u) in block.iter().enumerate() {
            for &v in &block[i + 1..] {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Parity of the permutation sorting `tuple`, as `+1` or `-1`.
pub(crate) fn sort_sign(tuple: &[usize]) -> i32 {
    let mut inversions = 0;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign relating two designs whose blocks agree as sets up to reordering:
/// the product over matched blocks of the parity of the within-block
/// reordering. Independent of how equal blocks are matched.
pub fn reorder_sign(a: &BlockDesign, b: &BlockDesign) -> Result<i32, DesignError> {
    if a.num_points() != b.num_points() || a.num_blocks() != b.num_blocks() {
        return Err(DesignError::NotReorderings);
    }
    let mut sa = a.sorted_blocks();
    let mut sb = b.sorted_blocks();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(DesignError::NotReorderings);
    }
    Ok(a
        .blocks()
        .iter()
        .chain(b.blocks())
        .map(|blk| sort_sign(blk))
        .product())
}
