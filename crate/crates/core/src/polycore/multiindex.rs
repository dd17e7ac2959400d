use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_traits::One;

/// Exponent tuple `α ∈ ℕⁿ`.
///
/// The total order is graded: lower `|α|` first, and within a degree the
/// exponent of `x1` decreases first (`x1² < x1·x2 < x2²`). Every canonical
/// listing in the crate (polynomial terms, matrix columns, kernel pivots)
/// uses this order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// `eᵢ` scaled by `power`.
    pub fn unit(n: usize, i: usize, power: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = power;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// `|α| = Σ αᵢ`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `α! = α₁!⋯αₙ!`.
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// Multinomial coefficient `|α|! / α!`.
    pub fn multinomial(&self) -> BigInt {
        factorial(self.order()) / self.factorial()
    }

    pub fn has_odd_component(&self) -> bool {
        self.0.iter().any(|a| a % 2 == 1)
    }

    /// `self − other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Scales every component, e.g. `β ↦ 2β`.
    pub fn scaled(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| a * k).collect())
    }

    /// All multi-indices with `|α| = order`, in the canonical order.
    pub fn of_order(n: usize, order: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0; n];
        fill(&mut current, 0, order, &mut out);
        out
    }

    /// All multi-indices with `|α| ≤ max_order`, in the canonical order.
    pub fn up_to(n: usize, max_order: u32) -> Vec<MultiIndex> {
        (0..=max_order).flat_map(|d| Self::of_order(n, d)).collect()
    }
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        fill(current, pos + 1, remaining - a, out);
    }
    current[pos] = 0;
}

pub(crate) fn factorial(k: u32) -> BigInt {
    (2..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_multinomial() {
        let a = MultiIndex::from([2, 2]);
        assert_eq!(a.order(), 4);
        assert_eq!(a.multinomial(), BigInt::from(6));
        assert_eq!(MultiIndex::from([1, 2, 3]).multinomial(), BigInt::from(60));
        assert_eq!(MultiIndex::zero(3).multinomial(), BigInt::one());
    }

    #[test]
    fn graded_order_within_degree() {
        let deg2 = MultiIndex::of_order(2, 2);
        assert_eq!(
            deg2,
            vec![
                MultiIndex::from([2, 0]),
                MultiIndex::from([1, 1]),
                MultiIndex::from([0, 2])
            ]
        );
        let all = MultiIndex::up_to(3, 4);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        // binom(3 + 4, 3)
        assert_eq!(all.len(), 35);
    }

    #[test]
    fn checked_sub_requires_domination() {
        let a = MultiIndex::from([2, 1]);
        assert_eq!(a.checked_sub(&MultiIndex::from([1, 1])), Some(MultiIndex::from([1, 0])));
        assert_eq!(a.checked_sub(&MultiIndex::from([0, 2])), None);
    }
}
