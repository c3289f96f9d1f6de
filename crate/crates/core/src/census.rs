//! Closed-form and generating-function counts.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

/// Secant index `k`, form degree `d` and projective dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AHTriple {
    pub k: u64,
    pub d: u64,
    pub n: u64,
}

impl AHTriple {
    pub fn new(k: u64, d: u64, n: u64) -> Self {
        AHTriple { k, d, n }
    }

    /// `N + 1 = C(n + d, d)`, the dimension of the space of forms.
    pub fn forms_dimension(&self) -> BigUint {
        binomial(self.n + self.d, self.d)
    }
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// Number of `rows × cols` nonnegative integer arrays with every row summing
/// to `row_sum` and every column to `col_sum`, counted up to permutation of
/// the columns.
///
/// Such a class is a multiset of `cols` column types, a column type being a
/// composition of `col_sum` into `rows` parts. The count is accumulated over
/// the column types in turn, with a state made of the first `rows - 1`
/// partial row sums and the number of columns used; the last row sum is then
/// forced by the totals.
pub fn count_weight_arrays(rows: usize, cols: usize, row_sum: usize, col_sum: usize) -> BigInt {
    if rows * row_sum != cols * col_sum {
        return BigInt::zero();
    }
    if rows == 0 || cols == 0 {
        // only the empty array
        return BigInt::one();
    }
    match weight_array_dp::<u128>(rows, cols, row_sum, col_sum) {
        Some(n) => BigInt::from(n),
        None => BigInt::from(
            weight_array_dp::<BigUint>(rows, cols, row_sum, col_sum).expect("exact arithmetic"),
        ),
    }
}

trait Counter: Clone + Zero + One {
    fn checked_plus(&self, other: &Self) -> Option<Self>;
}

impl Counter for u128 {
    fn checked_plus(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
}

impl Counter for BigUint {
    fn checked_plus(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
}

fn weight_array_dp<C: Counter>(rows: usize, cols: usize, row_sum: usize, col_sum: usize) -> Option<C> {
    let free = rows - 1;
    let radix = row_sum + 1;
    // state index: partial sums of the first `free` rows in mixed radix, then columns used
    let sum_states = radix.checked_pow(free as u32)?;
    let states = sum_states.checked_mul(cols + 1)?;
    let mut dp = vec![C::zero(); states];
    dp[0] = C::one();

    for t in compositions(col_sum, rows) {
        let head = &t[..free];
        if head.iter().any(|&x| x > row_sum) {
            continue;
        }
        let shift = head.iter().fold(0usize, |acc, &x| acc * radix + x);
        // Unbounded knapsack: visiting states in increasing order lets the
        // same type be taken any number of times.
        for c in 1..=cols {
            for s in 0..sum_states {
                if !fits(s, head, radix) {
                    continue;
                }
                let from = (c - 1) * sum_states + (s - shift);
                if dp[from].is_zero() {
                    continue;
                }
                let to = c * sum_states + s;
                dp[to] = dp[to].checked_plus(&dp[from])?;
            }
        }
    }
    let full = (0..free).fold(0usize, |acc, _| acc * radix + row_sum);
    Some(dp[cols * sum_states + full].clone())
}

/// Whether the mixed-radix digits of `s` dominate `t` componentwise.
fn fits(mut s: usize, t: &[usize], radix: usize) -> bool {
    for &x in t.iter().rev() {
        if s % radix < x {
            return false;
        }
        s /= radix;
    }
    true
}

/// All compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=total {
            prefix.push(x);
            go(total - x, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Monomials of degree `degree` in `vars` variables: `C(vars + degree - 1, degree)`.
pub fn count_total_monomials(vars: u64, degree: u64) -> BigUint {
    if vars == 0 {
        return BigUint::from(u8::from(degree == 0));
    }
    binomial(vars + degree - 1, degree)
}

/// `ceil(m * ceil((m - 1) / 4) / 5)`.
pub fn covering_bound(m: u64) -> u64 {
    let inner = m.saturating_sub(1).div_ceil(4);
    (m * inner).div_ceil(5)
}

/// Codimension of the `k`-th secant variety of the degree-`d` Veronese
/// embedding of `P^n`.
pub fn ah_codimension(t: AHTriple) -> BigUint {
    let AHTriple { k, d, n } = t;
    if d == 2 && 2 <= k && k <= n {
        return binomial(n - k + 2, 2);
    }
    if d == 4 && (2..=4).contains(&n) && k == n * (n + 3) / 2 {
        return BigUint::one();
    }
    if d == 3 && n == 4 && k == 7 {
        return BigUint::one();
    }
    let total = t.forms_dimension();
    let filled = BigUint::from(n + 1) * k;
    if total > filled {
        total - filled
    } else {
        BigUint::zero()
    }
}

/// `C(n + d, d) = (n + 1) k + 1`.
pub fn is_ah_ordinary(t: AHTriple) -> bool {
    t.forms_dimension() == BigUint::from(t.n + 1) * t.k + 1u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Arrays with nonincreasing columns in lexicographic order, one per class.
    fn brute_weight_arrays(rows: usize, cols: usize, row_sum: usize, col_sum: usize) -> u64 {
        let types = compositions(col_sum, rows);
        fn go(
            types: &[Vec<usize>],
            start: usize,
            left: usize,
            sums: &mut Vec<usize>,
            row_sum: usize,
        ) -> u64 {
            if left == 0 {
                return u64::from(sums.iter().all(|&s| s == row_sum));
            }
            let mut total = 0;
            for (i, t) in types.iter().enumerate().skip(start) {
                for (s, x) in sums.iter_mut().zip(t) {
                    *s += x;
                }
                if sums.iter().all(|&s| s <= row_sum) {
                    total += go(types, i, left - 1, sums, row_sum);
                }
                for (s, x) in sums.iter_mut().zip(t) {
                    *s -= x;
                }
            }
            total
        }
        go(&types, 0, cols, &mut vec![0; rows], row_sum)
    }

    #[test]
    fn weight_array_examples() {
        assert_eq!(count_weight_arrays(2, 3, 3, 2), BigInt::from(2));
        assert_eq!(brute_weight_arrays(2, 3, 3, 2), 2);
        assert_eq!(count_weight_arrays(3, 3, 1, 1), BigInt::from(1));
        assert_eq!(count_weight_arrays(3, 4, 1, 1), BigInt::zero());
        assert_eq!(count_weight_arrays(1, 4, 8, 2), BigInt::one());
    }

    #[test]
    fn isobaric_monomials_of_the_degree_fifteen_invariant() {
        assert_eq!(count_weight_arrays(5, 15, 9, 3), BigInt::from(317_881_154u64));
    }

    #[test]
    fn big_counts_fall_back_to_exact_arithmetic() {
        let v = weight_array_dp::<BigUint>(3, 6, 4, 2).unwrap();
        assert_eq!(BigInt::from(v), count_weight_arrays(3, 6, 4, 2));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(count_total_monomials(35, 15), BigUint::from(1_575_580_702_584u64));
        assert_eq!(count_total_monomials(2, 2), BigUint::from(3u32));
        assert_eq!(count_total_monomials(1, 7), BigUint::one());
        assert_eq!(binomial(49, 15), BigUint::from(1_575_580_702_584u64));
    }

    #[test]
    fn covering_bounds() {
        assert_eq!(covering_bound(15), 12);
        assert_eq!(covering_bound(7), 3);
        assert_eq!(covering_bound(3), 1);
        assert_eq!(covering_bound(1), 0);
    }

    #[test]
    fn codimensions() {
        assert_eq!(ah_codimension(AHTriple::new(7, 3, 4)), BigUint::one());
        assert_eq!(ah_codimension(AHTriple::new(2, 2, 3)), BigUint::from(3u32));
        assert_eq!(ah_codimension(AHTriple::new(3, 3, 2)), BigUint::one());
        for (k, n) in [(5, 2), (9, 3), (14, 4)] {
            assert_eq!(ah_codimension(AHTriple::new(k, 4, n)), BigUint::one());
        }
        assert_eq!(ah_codimension(AHTriple::new(4, 2, 4)), BigUint::one());
        assert_eq!(ah_codimension(AHTriple::new(100, 3, 2)), BigUint::zero());
        // naive count would give 15 - 5*3 = 0 for (3, 2, 4); the exception gives C(3, 2)
        assert_eq!(ah_codimension(AHTriple::new(3, 2, 4)), BigUint::from(3u32));
    }

    #[test]
    fn ordinary_triples() {
        assert!(is_ah_ordinary(AHTriple::new(3, 3, 2)));
        assert!(is_ah_ordinary(AHTriple::new(2, 4, 1)));
        assert!(!is_ah_ordinary(AHTriple::new(7, 3, 4)));
        for k in 1..10 {
            assert!(is_ah_ordinary(AHTriple::new(k, 2 * k, 1)));
        }
    }

    proptest! {
        #[test]
        fn dp_matches_enumeration(rows in 1usize..=3, cols in 1usize..=4, col_sum in 0usize..=3) {
            let total = cols * col_sum;
            if total % rows == 0 {
                let row_sum = total / rows;
                prop_assert_eq!(
                    count_weight_arrays(rows, cols, row_sum, col_sum),
                    BigInt::from(brute_weight_arrays(rows, cols, row_sum, col_sum))
                );
            } else {
                prop_assert_eq!(count_weight_arrays(rows, cols, total / rows, col_sum), BigInt::zero());
            }
        }

        #[test]
        fn pascal_recurrence(v in 2u64..40, d in 1u64..40) {
            prop_assert_eq!(
                count_total_monomials(v, d),
                count_total_monomials(v - 1, d) + count_total_monomials(v, d - 1)
            );
        }

        #[test]
        fn ordinary_triples_have_codimension_one(k in 1u64..30, d in 1u64..8, n in 1u64..6) {
            let t = AHTriple::new(k, d, n);
            if is_ah_ordinary(t) {
                prop_assert_eq!(ah_codimension(t), BigUint::one());
            }
        }
    }
}
