use std::cmp::Ordering;
use std::fmt;

/// Exponent tuple of a monomial `u_1^{e_1} ... u_n^{e_n}`.
///
/// Multi-indices are totally ordered graded-lexicographically: lower degree
/// first, and within one degree the tuple with the larger leading exponent
/// comes first, so for two variables the degree-2 block reads
/// `u1^2, u1*u2, u2^2`. Every coefficient array in the crate uses this order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn zero(num_vars: usize) -> Self {
        Self::new(vec![0; num_vars])
    }

    /// The first-order index `e_var`.
    pub fn unit(num_vars: usize, var: usize) -> Self {
        let mut exponents = vec![0; num_vars];
        exponents[var] = 1;
        Self::new(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn num_vars(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    /// `alpha! = prod_i e_i!`
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&e| (1..=e).map(f64::from).product::<f64>())
            .product()
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        if self.num_vars() != other.num_vars() {
            return None;
        }
        self.exponents
            .iter()
            .zip(&other.exponents)
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn plus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.num_vars(), other.num_vars());
        Self::new(
            self.exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// All multi-indices in `num_vars` variables of exactly `degree`, in order.
    pub fn of_degree(num_vars: usize, degree: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = vec![0u32; num_vars];
        fill_degree(&mut current, 0, degree as u32, &mut out);
        out
    }

    /// All multi-indices with `lo <= degree <= hi`, in order.
    pub fn up_to_degree(num_vars: usize, lo: usize, hi: usize) -> Vec<Self> {
        (lo..=hi)
            .flat_map(|d| Self::of_degree(num_vars, d))
            .collect()
    }
}

fn fill_degree(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex::new(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(current, pos + 1, remaining - e, out);
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_two_block_order() {
        let block = MultiIndex::of_degree(2, 2);
        let exps: Vec<_> = block.iter().map(|a| a.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn enumeration_is_sorted_and_counts_match() {
        for n in 1..=4 {
            for r in 0..=5 {
                let all = MultiIndex::up_to_degree(n, 0, r);
                let mut sorted = all.clone();
                sorted.sort();
                assert_eq!(all, sorted);
                assert_eq!(all.len(), crate::binomial(n + r, r));
            }
        }
    }

    #[test]
    fn factorial_and_sub() {
        let a = MultiIndex::new(vec![3, 2]);
        assert_eq!(a.factorial(), 12.0);
        assert_eq!(a.degree(), 5);
        let b = MultiIndex::new(vec![1, 2]);
        assert_eq!(a.checked_sub(&b), Some(MultiIndex::new(vec![2, 0])));
        assert_eq!(b.checked_sub(&a), None);
    }
}
