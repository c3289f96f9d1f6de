//! Isomorph-free generation of biregular designs and the chromatic filter
//! pipeline applied to each candidate.
//!
//! Generation grows designs one block at a time. Every level keeps one
//! representative per isomorphism class of partial designs (by canonical
//! key), so each class of complete designs is produced exactly once: removing
//! any block of a complete design yields a partial design whose class was
//! kept at the previous level.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::census::binomial;
use crate::chroma;
use crate::design::{validate, BlockDesign};
use crate::symmetry::{canonical_key, CanonicalKey};

/// Raw candidates the brute-force enumerator is willing to look at.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000_000;

/// Candidate extensions examined per level unless generation is unbounded.
pub const DEFAULT_LEVEL_LIMIT: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(
        "inconsistent parameters: {num_blocks} blocks of size {block_size} \
         cannot give {num_points} points of degree {point_degree}"
    )]
    Inconsistent {
        num_points: usize,
        num_blocks: usize,
        block_size: usize,
        point_degree: usize,
    },
    #[error("search space of {0} candidates exceeds the limit of {1}")]
    GuardExceeded(u64, u64),
    #[error("checkpoint does not match the parameters: {0}")]
    BadCheckpoint(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenParams {
    pub num_points: usize,
    pub num_blocks: usize,
    pub block_size: usize,
    pub point_degree: usize,
    pub allow_repeated_blocks: bool,
}

impl GenParams {
    pub fn new(num_points: usize, num_blocks: usize, block_size: usize, point_degree: usize) -> Self {
        GenParams {
            num_points,
            num_blocks,
            block_size,
            point_degree,
            allow_repeated_blocks: true,
        }
    }

    pub fn check(&self) -> Result<(), GenError> {
        let ok = self.num_blocks * self.block_size == self.num_points * self.point_degree
            && self.block_size >= 1
            && self.block_size <= self.num_points
            && self.num_blocks >= 1;
        if ok {
            Ok(())
        } else {
            Err(GenError::Inconsistent {
                num_points: self.num_points,
                num_blocks: self.num_blocks,
                block_size: self.block_size,
                point_degree: self.point_degree,
            })
        }
    }
}

/// Level-by-level generator; the frontier after level `l` holds one
/// partial design with `l` blocks per isomorphism class.
#[derive(Debug, Clone)]
pub struct Generator {
    params: GenParams,
    level: usize,
    frontier: BTreeMap<CanonicalKey, BlockDesign>,
    level_limit: Option<usize>,
}

impl Generator {
    pub fn new(params: GenParams) -> Result<Self, GenError> {
        params.check()?;
        let first = BlockDesign::with_num_points(
            vec![(0..params.block_size).collect()],
            params.num_points,
        )
        .expect("first block is valid");
        let mut frontier = BTreeMap::new();
        frontier.insert(canonical_key(&first), first);
        let mut gen = Generator {
            params,
            level: 1,
            frontier,
            level_limit: Some(DEFAULT_LEVEL_LIMIT),
        };
        gen.frontier.retain(|_, d| feasible(&params, d));
        Ok(gen)
    }

    /// Resumes from a saved frontier of partial designs that all have the
    /// same number of blocks.
    pub fn resume(params: GenParams, designs: Vec<BlockDesign>) -> Result<Self, GenError> {
        params.check()?;
        let level = designs.first().map_or(0, BlockDesign::num_blocks);
        let mut frontier = BTreeMap::new();
        for d in designs {
            if d.num_blocks() != level
                || d.block_size() != params.block_size
                || d.num_points() > params.num_points
            {
                return Err(GenError::BadCheckpoint(d.to_string()));
            }
            let d = BlockDesign::with_num_points(d.blocks().to_vec(), params.num_points)
                .map_err(|e| GenError::BadCheckpoint(e.to_string()))?;
            if d.degrees().iter().any(|&x| x > params.point_degree) {
                return Err(GenError::BadCheckpoint(d.to_string()));
            }
            frontier.insert(canonical_key(&d), d);
        }
        Ok(Generator {
            params,
            level,
            frontier,
            level_limit: Some(DEFAULT_LEVEL_LIMIT),
        })
    }

    /// `None` removes the per-level guard.
    pub fn with_level_limit(mut self, limit: Option<usize>) -> Self {
        self.level_limit = limit;
        self
    }

    pub fn params(&self) -> &GenParams {
        &self.params
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn frontier(&self) -> impl Iterator<Item = &BlockDesign> {
        self.frontier.values()
    }

    pub fn frontier_len(&self) -> usize {
        self.frontier.len()
    }

    pub fn is_complete(&self) -> bool {
        self.level >= self.params.num_blocks || self.frontier.is_empty()
    }

    /// Adds one block in every possible way and keeps one design per class.
    pub fn step(&mut self) -> Result<(), GenError> {
        if self.is_complete() {
            return Ok(());
        }
        let p = self.params;
        let mut next = BTreeMap::new();
        let mut examined = 0usize;
        for design in self.frontier.values() {
            let open: Vec<usize> = (0..p.num_points)
                .filter(|&x| design.degrees()[x] < p.point_degree)
                .collect();
            let existing = design.sorted_blocks();
            for block in subsets(&open, p.block_size) {
                if !p.allow_repeated_blocks && existing.contains(&block) {
                    continue;
                }
                let mut blocks = design.blocks().to_vec();
                blocks.push(block);
                let child = BlockDesign::with_num_points(blocks, p.num_points)
                    .expect("block over open points");
                if !feasible(&p, &child) {
                    continue;
                }
                examined += 1;
                if let Some(limit) = self.level_limit {
                    if examined > limit {
                        return Err(GenError::GuardExceeded(examined as u64, limit as u64));
                    }
                }
                let key = canonical_key(&child);
                next.entry(key.clone()).or_insert_with(|| key.to_design());
            }
        }
        self.frontier = next;
        self.level += 1;
        Ok(())
    }

    /// Runs to completion and returns the complete designs, ordered by
    /// canonical key.
    pub fn finish(mut self) -> Result<Vec<BlockDesign>, GenError> {
        while !self.is_complete() {
            self.step()?;
        }
        Ok(self
            .frontier
            .into_values()
            .filter(|d| d.num_blocks() == self.params.num_blocks)
            .collect())
    }
}

/// Whether the remaining blocks can still complete the degrees.
fn feasible(p: &GenParams, d: &BlockDesign) -> bool {
    let remaining = p.num_blocks - d.num_blocks();
    let deficits = d.degrees().iter().map(|&x| p.point_degree - x);
    let open = deficits.clone().filter(|&x| x > 0).count();
    deficits.clone().all(|x| x <= remaining) && (remaining == 0 || open >= p.block_size)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// One representative per isomorphism class of designs with the given
/// parameters.
pub fn generate(params: GenParams) -> Result<impl Iterator<Item = BlockDesign>, GenError> {
    Ok(Generator::new(params)?.finish()?.into_iter())
}

/// Enumerates every multiset of blocks directly and keeps one design per
/// class. Intended as a check on [`generate`] for tiny parameters.
pub fn brute_force_generate(params: GenParams) -> Result<Vec<BlockDesign>, GenError> {
    params.check()?;
    let all = subsets(&(0..params.num_points).collect::<Vec<_>>(), params.block_size);
    let candidates = binomial(
        (all.len() + params.num_blocks - 1) as u64,
        params.num_blocks as u64,
    );
    if candidates > BRUTE_FORCE_LIMIT.into() {
        let shown = u64::try_from(&candidates).unwrap_or(u64::MAX);
        return Err(GenError::GuardExceeded(shown, BRUTE_FORCE_LIMIT));
    }
    let mut classes = BTreeMap::new();
    let mut chosen = vec![0usize; params.num_blocks];
    multisets(all.len(), params.num_blocks, 0, 0, &mut chosen, &mut |idx| {
        if !params.allow_repeated_blocks && idx.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let mut degrees = vec![0; params.num_points];
        for &i in idx {
            for &p in &all[i] {
                degrees[p] += 1;
            }
        }
        if degrees.iter().all(|&x| x == params.point_degree) {
            let d = BlockDesign::with_num_points(
                idx.iter().map(|&i| all[i].clone()).collect(),
                params.num_points,
            )
            .expect("valid blocks");
            let key = canonical_key(&d);
            classes.entry(key.clone()).or_insert_with(|| key.to_design());
        }
    });
    Ok(classes.into_values().collect())
}

fn multisets<F: FnMut(&[usize])>(
    n: usize,
    k: usize,
    depth: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    visit: &mut F,
) {
    if depth == k {
        visit(chosen);
        return;
    }
    for i in start..n {
        chosen[depth] = i;
        multisets(n, k, depth + 1, i, chosen, visit);
    }
}

/// Outcome of the filter pipeline, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PipelineVerdict {
    RejectedRepeatedVertices,
    RejectedChi { chi: usize },
    RejectedHasClique,
    RejectedNotVertexCritical,
    Viable,
}

impl PipelineVerdict {
    pub fn is_viable(&self) -> bool {
        matches!(self, PipelineVerdict::Viable)
    }
}

impl fmt::Display for PipelineVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineVerdict::RejectedRepeatedVertices => f.write_str("rejected_repeated_vertices"),
            PipelineVerdict::RejectedChi { chi } => write!(f, "rejected_chi:{chi}"),
            PipelineVerdict::RejectedHasClique => f.write_str("rejected_has_clique"),
            PipelineVerdict::RejectedNotVertexCritical => f.write_str("rejected_not_vertex_critical"),
            PipelineVerdict::Viable => f.write_str("viable"),
        }
    }
}

/// Discards designs whose invariant vanishes for structural reasons or
/// lacks the chromatic property for `target_colors` colors.
///
/// 1. Two points in the same blocks with odd point degree: the invariant is
///    its own negative.
/// 2. Chromatic number different from `target_colors`.
/// 3. A `target_colors`-clique not covering all points: deleting a point
///    outside it keeps the chromatic number.
/// 4. Some point deletion keeps the chromatic number.
pub fn pipeline_filter(design: &BlockDesign, target_colors: usize) -> PipelineVerdict {
    if validate(design).forces_vanishing() {
        return PipelineVerdict::RejectedRepeatedVertices;
    }
    let graph = design.collinearity();
    let chi = chroma::chromatic_number(&graph);
    if chi != target_colors {
        return PipelineVerdict::RejectedChi { chi };
    }
    if graph.num_vertices() > chi && chroma::has_clique(&graph, chi) {
        return PipelineVerdict::RejectedHasClique;
    }
    if !chroma::vertex_critical_unchecked(&graph, chi) {
        return PipelineVerdict::RejectedNotVertexCritical;
    }
    PipelineVerdict::Viable
}
