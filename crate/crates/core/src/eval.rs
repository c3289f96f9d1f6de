//! Exact evaluation of a design-encoded invariant at `F = L_1^d + ... + L_r^d`.
//!
//! Expanding the symbolic product multilinearly, each point of the design
//! picks one of the forms. The choice is a coloring of the points, and its
//! term is the product over blocks of the determinant whose rows are the
//! chosen forms in block order. Colorings that repeat a form inside a block
//! contribute zero, so only proper colorings of the collinearity graph are
//! visited. All block determinants come from one table indexed by the ordered
//! tuple of colors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::chroma::ColoringSearch;
use crate::design::{BlockDesign, CollinearityGraph};

/// Largest determinant table that will be materialized.
pub const MAX_TABLE_ENTRIES: usize = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("forms have dimension {forms}, but blocks have size {blocks}")]
    DimensionMismatch { forms: usize, blocks: usize },
    #[error("form {index} has {len} entries, expected {expected}")]
    RaggedForms {
        index: usize,
        len: usize,
        expected: usize,
    },
    #[error("invalid integer `{0}` in form file")]
    InvalidEntry(String),
    #[error("form file contains no forms")]
    NoForms,
    #[error("determinant table with {colors}^{size} entries is too large")]
    TableTooLarge { colors: usize, size: usize },
    #[error("number of parts must be at least 1")]
    InvalidParts,
    #[error("{value} is not divisible by {divisor}")]
    NotDivisible { value: BigInt, divisor: BigInt },
}

/// Exact determinant by fraction-free elimination.
pub fn det(rows: &[Vec<BigInt>]) -> Result<BigInt, EvalError> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(EvalError::NotSquare {
                row: i,
                len: r.len(),
                expected: n,
            });
        }
    }
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut m = rows.to_vec();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { -d } else { d })
}

/// An ordered list of linear forms, each given by its coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormSet {
    forms: Vec<Vec<BigInt>>,
    dim: usize,
}

impl FormSet {
    pub fn new(forms: Vec<Vec<BigInt>>) -> Result<Self, EvalError> {
        let dim = forms.first().ok_or(EvalError::NoForms)?.len();
        Self::with_dim(forms, dim)
    }

    /// Allows an empty list, whose dimension cannot be inferred.
    pub fn with_dim(forms: Vec<Vec<BigInt>>, dim: usize) -> Result<Self, EvalError> {
        for (i, f) in forms.iter().enumerate() {
            if f.len() != dim {
                return Err(EvalError::RaggedForms {
                    index: i,
                    len: f.len(),
                    expected: dim,
                });
            }
        }
        Ok(FormSet { forms, dim })
    }

    pub fn from_i64<R: AsRef<[i64]>>(forms: &[R]) -> Result<Self, EvalError> {
        Self::new(
            forms
                .iter()
                .map(|f| f.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The standard basis vectors.
    pub fn standard_basis(dim: usize) -> Self {
        let forms = (0..dim)
            .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        FormSet { forms, dim }
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn forms(&self) -> &[Vec<BigInt>] {
        &self.forms
    }

    /// The first `count` forms.
    pub fn take(&self, count: usize) -> Self {
        FormSet {
            forms: self.forms.iter().take(count).cloned().collect(),
            dim: self.dim,
        }
    }

    pub fn push(&mut self, form: Vec<BigInt>) -> Result<(), EvalError> {
        if form.len() != self.dim {
            return Err(EvalError::RaggedForms {
                index: self.forms.len(),
                len: form.len(),
                expected: self.dim,
            });
        }
        self.forms.push(form);
        Ok(())
    }

    pub fn scaled(&self, t: &BigInt) -> Self {
        FormSet {
            forms: self
                .forms
                .iter()
                .map(|f| f.iter().map(|x| x * t).collect())
                .collect(),
            dim: self.dim,
        }
    }

    /// Each form `L` becomes the row vector `L * matrix`.
    pub fn transformed(&self, matrix: &[Vec<BigInt>]) -> Result<Self, EvalError> {
        if matrix.len() != self.dim {
            return Err(EvalError::DimensionMismatch {
                forms: self.dim,
                blocks: matrix.len(),
            });
        }
        let forms = self
            .forms
            .iter()
            .map(|f| {
                (0..self.dim)
                    .map(|j| f.iter().zip(matrix).map(|(x, row)| x * &row[j]).sum())
                    .collect()
            })
            .collect();
        Ok(FormSet {
            forms,
            dim: self.dim,
        })
    }

    /// Form `i` of the result is form `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        FormSet {
            forms: order.iter().map(|&i| self.forms[i].clone()).collect(),
            dim: self.dim,
        }
    }
}

impl FromStr for FormSet {
    type Err = EvalError;

    /// One comma-separated vector per line; blank lines and `#` comments
    /// are skipped.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let forms = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(',')
                    .map(|tok| {
                        let tok = tok.trim();
                        tok.parse::<BigInt>()
                            .map_err(|_| EvalError::InvalidEntry(tok.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        FormSet::new(forms)
    }
}

impl fmt::Display for FormSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for form in &self.forms {
            let line: Vec<String> = form.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Determinants of every ordered tuple of forms of length `dim`.
#[derive(Debug, Clone)]
pub struct DetTable {
    colors: usize,
    size: usize,
    values: Vec<BigInt>,
}

impl DetTable {
    pub fn build(forms: &FormSet) -> Result<Self, EvalError> {
        let (colors, size) = (forms.len(), forms.dim());
        let entries = u32::try_from(size)
            .ok()
            .and_then(|s| colors.checked_pow(s))
            .filter(|&e| e <= MAX_TABLE_ENTRIES)
            .ok_or(EvalError::TableTooLarge { colors, size })?;
        let mut values = Vec::with_capacity(entries);
        let mut tuple = vec![0usize; size];
        let mut rows = Vec::with_capacity(size);
        for idx in 0..entries {
            let mut rest = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = rest % colors;
                rest /= colors;
            }
            let repeated = (0..size).any(|i| tuple[..i].contains(&tuple[i]));
            if repeated {
                values.push(BigInt::zero());
                continue;
            }
            rows.clear();
            rows.extend(tuple.iter().map(|&c| forms.forms()[c].clone()));
            values.push(det(&rows)?);
        }
        Ok(DetTable {
            colors,
            size,
            values,
        })
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Row-major index of an ordered color tuple.
    pub fn index(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &c| acc * self.colors + c)
    }

    pub fn get(&self, tuple: &[usize]) -> &BigInt {
        &self.values[self.index(tuple)]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
}

/// Exact running sum that stays in `i128` until it would overflow.
#[derive(Debug, Clone, Default)]
struct ExactSum {
    small: i128,
    big: BigInt,
}

impl ExactSum {
    #[inline]
    fn add_small(&mut self, x: i128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                self.big += self.small;
                self.small = x;
            }
        }
    }

    fn add_big(&mut self, x: &BigInt) {
        self.big += x;
    }

    fn merge(&mut self, other: ExactSum) {
        self.big += other.big;
        self.big += other.small;
    }

    fn into_bigint(self) -> BigInt {
        self.big + self.small
    }
}

/// Value of an evaluation together with the number of proper colorings
/// that were summed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub value: BigInt,
    pub colorings: u64,
}

/// A design prepared for evaluation at a fixed form set.
pub struct Evaluator<'a> {
    design: &'a BlockDesign,
    graph: CollinearityGraph,
    table: DetTable,
    // table entries as i128, present when every coloring term fits
    small: Option<Vec<i128>>,
    strides: Vec<usize>,
}

impl<'a> Evaluator<'a> {
    pub fn new(design: &'a BlockDesign, forms: &FormSet) -> Result<Self, EvalError> {
        if forms.dim() != design.block_size() {
            return Err(EvalError::DimensionMismatch {
                forms: forms.dim(),
                blocks: design.block_size(),
            });
        }
        let table = DetTable::build(forms)?;
        let max_abs = table
            .values()
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        // Every term is a product of num_blocks entries bounded by max_abs.
        let term_bound = num_traits::pow(max_abs, design.num_blocks());
        let small = if term_bound < (BigInt::one() << 126) {
            Some(
                table
                    .values()
                    .iter()
                    .map(|v| v.to_i128().expect("bounded by term bound"))
                    .collect(),
            )
        } else {
            None
        };
        let colors = forms.len();
        let strides = (0..design.block_size())
            .rev()
            .map(|i| colors.pow(i as u32))
            .collect();
        Ok(Evaluator {
            design,
            graph: design.collinearity(),
            table,
            small,
            strides,
        })
    }

    pub fn table(&self) -> &DetTable {
        &self.table
    }

    pub fn uses_fixed_width(&self) -> bool {
        self.small.is_some()
    }

    #[inline]
    fn slot(&self, block: &[usize], coloring: &[usize]) -> usize {
        block
            .iter()
            .zip(&self.strides)
            .map(|(&p, &s)| coloring[p] * s)
            .sum()
    }

    /// The product of block determinants for one coloring.
    pub fn term(&self, coloring: &[usize]) -> BigInt {
        self.design
            .blocks()
            .iter()
            .map(|b| &self.table.values()[self.slot(b, coloring)])
            .product()
    }

    fn accumulate(&self, sum: &mut ExactSum, coloring: &[usize]) {
        match &self.small {
            Some(small) => {
                let mut t: i128 = 1;
                for b in self.design.blocks() {
                    t *= small[self.slot(b, coloring)];
                }
                sum.add_small(t);
            }
            None => sum.add_big(&self.term(coloring)),
        }
    }

    fn fold_prefixes(&self, prefixes: &[Vec<(usize, usize)>]) -> (ExactSum, u64) {
        let mut search = ColoringSearch::new(&self.graph, self.table.colors());
        let mut sum = ExactSum::default();
        let mut count = 0u64;
        for p in prefixes {
            search.for_each_in(p, &mut |c: &[usize]| {
                self.accumulate(&mut sum, c);
                count += 1;
            });
        }
        (sum, count)
    }

    pub fn run(&self) -> Evaluation {
        let (sum, colorings) = self.fold_prefixes(&[Vec::new()]);
        Evaluation {
            value: sum.into_bigint(),
            colorings,
        }
    }

    /// Splits the coloring tree into at least `parts` subtrees when possible,
    /// deals them round-robin to `parts` workers and adds the partial sums.
    /// The result does not depend on `parts`.
    pub fn run_parallel(&self, parts: usize) -> Result<Evaluation, EvalError> {
        if parts == 0 {
            return Err(EvalError::InvalidParts);
        }
        let prefixes = ColoringSearch::new(&self.graph, self.table.colors()).subtrees(parts);
        let partials: Vec<(ExactSum, u64)> = (0..parts)
            .into_par_iter()
            .map(|i| {
                let mine: Vec<_> = prefixes.iter().skip(i).step_by(parts).cloned().collect();
                self.fold_prefixes(&mine)
            })
            .collect();
        let mut total = ExactSum::default();
        let mut colorings = 0;
        for (s, c) in partials {
            total.merge(s);
            colorings += c;
        }
        Ok(Evaluation {
            value: total.into_bigint(),
            colorings,
        })
    }
}

fn empty_forms_value(design: &BlockDesign, forms: &FormSet) -> Option<BigInt> {
    // No colors at all: there is no coloring of a nonempty point set.
    (forms.is_empty() && design.num_points() > 0).then(BigInt::zero)
}

/// Sum over proper colorings of products of block determinants.
pub fn evaluate(design: &BlockDesign, forms: &FormSet) -> Result<BigInt, EvalError> {
    Ok(evaluate_detailed(design, forms)?.value)
}

pub fn evaluate_detailed(design: &BlockDesign, forms: &FormSet) -> Result<Evaluation, EvalError> {
    if let Some(v) = empty_forms_value(design, forms) {
        check_dims(design, forms)?;
        return Ok(Evaluation {
            value: v,
            colorings: 0,
        });
    }
    Ok(Evaluator::new(design, forms)?.run())
}

/// Same value as [`evaluate`], computed over `parts` independent pieces of
/// the coloring search.
pub fn parallel_evaluate(
    design: &BlockDesign,
    forms: &FormSet,
    parts: usize,
) -> Result<BigInt, EvalError> {
    if parts == 0 {
        return Err(EvalError::InvalidParts);
    }
    if let Some(v) = empty_forms_value(design, forms) {
        check_dims(design, forms)?;
        return Ok(v);
    }
    Ok(Evaluator::new(design, forms)?.run_parallel(parts)?.value)
}

fn check_dims(design: &BlockDesign, forms: &FormSet) -> Result<(), EvalError> {
    if forms.dim() != design.block_size() {
        return Err(EvalError::DimensionMismatch {
            forms: forms.dim(),
            blocks: design.block_size(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchEvaluation {
    pub values: Vec<BigInt>,
    /// gcd of the absolute values of the nonzero values, 0 if there are none
    pub gcd: BigInt,
    pub normalized: Vec<BigInt>,
}

pub fn evaluate_batch(designs: &[BlockDesign], forms: &FormSet) -> Result<BatchEvaluation, EvalError> {
    let values = designs
        .iter()
        .map(|d| evaluate(d, forms))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(normalize(values))
}

pub fn normalize(values: Vec<BigInt>) -> BatchEvaluation {
    let gcd = values
        .iter()
        .filter(|v| !v.is_zero())
        .fold(BigInt::zero(), |g, v| g.gcd(v));
    let normalized = values
        .iter()
        .map(|v| if gcd.is_zero() { BigInt::zero() } else { v / &gcd })
        .collect();
    BatchEvaluation {
        values,
        gcd,
        normalized,
    }
}

/// Exact quotient, failing when `divisor` does not divide `value`.
pub fn divide_exact(value: &BigInt, divisor: &BigInt) -> Result<BigInt, EvalError> {
    if divisor.is_zero() || !(value % divisor).is_zero() {
        return Err(EvalError::NotDivisible {
            value: value.clone(),
            divisor: divisor.clone(),
        });
    }
    Ok(value / divisor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::parse_symbolic;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Leibniz expansion over all permutations.
    fn leibniz(m: &[Vec<BigInt>]) -> BigInt {
        fn go(m: &[Vec<BigInt>], row: usize, used: &mut Vec<bool>, perm: &mut Vec<usize>) -> BigInt {
            let n = m.len();
            if row == n {
                let mut inv = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if perm[i] > perm[j] {
                            inv += 1;
                        }
                    }
                }
                let p: BigInt = (0..n).map(|i| m[i][perm[i]].clone()).product();
                return if inv % 2 == 0 { p } else { -p };
            }
            let mut total = BigInt::zero();
            for c in 0..n {
                if !used[c] {
                    used[c] = true;
                    perm.push(c);
                    total += go(m, row + 1, used, perm);
                    perm.pop();
                    used[c] = false;
                }
            }
            total
        }
        go(m, 0, &mut vec![false; m.len()], &mut Vec::new())
    }

    #[test]
    fn determinant_examples() {
        let id = FormSet::standard_basis(5);
        assert_eq!(det(id.forms()).unwrap(), BigInt::one());

        let rows = big(&[&[1, 2, 3], &[4, 5, 6], &[1, 2, 3]]);
        assert!(det(&rows).unwrap().is_zero());

        let rows = big(&[
            &[0, 1, 0, 0, 0],
            &[0, 0, 1, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 0, 0, 0, 1],
            &[1, 1, 1, 1, 1],
        ]);
        assert_eq!(leibniz(&rows), BigInt::one());
        assert_eq!(det(&rows).unwrap(), BigInt::one());

        assert_eq!(det(&[]).unwrap(), BigInt::one());
        assert!(matches!(
            det(&big(&[&[1, 2], &[3]])),
            Err(EvalError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn determinant_matches_leibniz_with_pivoting() {
        let rows = big(&[
            &[0, 0, 2, -1],
            &[0, 3, 1, 4],
            &[5, -2, 0, 1],
            &[1, 1, 1, 1],
        ]);
        assert_eq!(det(&rows).unwrap(), leibniz(&rows));
        let wide = big(&[&[7, -3, 2, 9, 1, 0], &[2, 2, 0, -5, 4, 1], &[0, 1, 1, 1, -1, 3],
            &[6, 0, -2, 3, 3, 2], &[1, 4, 9, 16, 25, 36], &[-1, 1, -1, 1, -1, 1]]);
        assert_eq!(det(&wide).unwrap(), leibniz(&wide));
    }

    #[test]
    fn table_entries_are_determinants() {
        let forms = FormSet::from_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 2, 5]]).unwrap();
        let table = DetTable::build(&forms).unwrap();
        assert_eq!(table.values().len(), 64);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let rows = vec![
                        forms.forms()[a].clone(),
                        forms.forms()[b].clone(),
                        forms.forms()[c].clone(),
                    ];
                    assert_eq!(table.get(&[a, b, c]), &leibniz(&rows));
                }
            }
        }
    }

    #[test]
    fn form_file_parsing() {
        let f: FormSet = "# forms\n1, 0\n\n-3,4\n".parse().unwrap();
        assert_eq!((f.len(), f.dim()), (2, 2));
        assert_eq!(f.to_string(), "1,0\n-3,4\n");
        assert!(matches!("1,2\n3".parse::<FormSet>(), Err(EvalError::RaggedForms { index: 1, .. })));
        assert!(matches!("1,x".parse::<FormSet>(), Err(EvalError::InvalidEntry(_))));
        assert!(matches!("".parse::<FormSet>(), Err(EvalError::NoForms)));
    }

    #[test]
    fn dimension_checks() {
        let d = parse_symbolic("(abc)(abd)(acd)(bcd)").unwrap();
        let forms = FormSet::standard_basis(4);
        assert!(matches!(
            evaluate(&d, &forms),
            Err(EvalError::DimensionMismatch { forms: 4, blocks: 3 })
        ));
        let none = FormSet::with_dim(Vec::new(), 3).unwrap();
        assert_eq!(evaluate(&d, &none).unwrap(), BigInt::zero());
        assert_eq!(parallel_evaluate(&d, &none, 3).unwrap(), BigInt::zero());
        assert_eq!(parallel_evaluate(&d, &forms.take(3), 0), Err(EvalError::InvalidParts));
    }

    #[test]
    fn big_terms_take_the_exact_path() {
        let d = parse_symbolic("(ab)^2").unwrap();
        let huge: BigInt = BigInt::one() << 100u32;
        let forms = FormSet::new(vec![
            vec![huge.clone(), BigInt::zero()],
            vec![BigInt::zero(), huge.clone()],
        ])
        .unwrap();
        let ev = Evaluator::new(&d, &forms).unwrap();
        assert!(!ev.uses_fixed_width());
        // two colorings, each det(.)^2 = huge^4
        let expected = BigInt::from(2) * num_traits::pow(huge, 4);
        assert_eq!(ev.run().value, expected);
        assert_eq!(ev.run_parallel(3).unwrap().value, expected);
    }

    #[test]
    fn running_sum_spills_exactly() {
        let mut s = ExactSum::default();
        for _ in 0..4 {
            s.add_small(i128::MAX);
        }
        s.add_small(-5);
        assert_eq!(s.into_bigint(), BigInt::from(i128::MAX) * 4 - 5);
    }

    #[test]
    fn batch_gcd_conventions() {
        let b = normalize(vec![BigInt::from(-12), BigInt::zero(), BigInt::from(18)]);
        assert_eq!(b.gcd, BigInt::from(6));
        assert_eq!(b.normalized, vec![BigInt::from(-2), BigInt::zero(), BigInt::from(3)]);
        let z = normalize(vec![BigInt::zero(), BigInt::zero()]);
        assert!(z.gcd.is_zero());
        assert!(z.normalized.iter().all(Zero::is_zero));
    }

    #[test]
    fn exact_division() {
        assert_eq!(divide_exact(&BigInt::from(1_843_200), &BigInt::from(57_600)).unwrap(), BigInt::from(32));
        assert!(divide_exact(&BigInt::from(10), &BigInt::from(3)).is_err());
        assert!(divide_exact(&BigInt::from(10), &BigInt::zero()).is_err());
    }

    #[test]
    fn form_transformations() {
        let f = FormSet::from_i64(&[[1, 2], [3, 4]]).unwrap();
        let swap = big(&[&[0, 1], &[1, 0]]);
        assert_eq!(f.transformed(&swap).unwrap(), FormSet::from_i64(&[[2, 1], [4, 3]]).unwrap());
        assert_eq!(f.permuted(&[1, 0]), FormSet::from_i64(&[[3, 4], [1, 2]]).unwrap());
        assert_eq!(f.scaled(&BigInt::from(-2)), FormSet::from_i64(&[[-2, -4], [-6, -8]]).unwrap());
        assert_eq!(f.take(1).len(), 1);
    }
}
