use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::MultiIndex;

/// Index tables shared by every jet with the same `(num_vars, order)`.
#[derive(Debug)]
pub(crate) struct JetLayout {
    pub num_vars: usize,
    pub order: usize,
    pub indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// For each slot `k`, all pairs `(i, j)` with `indices[i] + indices[j] == indices[k]`.
    pub products: Vec<Vec<(usize, usize)>>,
    /// `block_start[d]` is the first slot of degree `d`; one extra entry marks the end.
    pub block_start: Vec<usize>,
}

impl JetLayout {
    fn build(num_vars: usize, order: usize) -> Self {
        let indices = MultiIndex::up_to_degree(num_vars, 0, order);
        let degrees: Vec<usize> = indices.iter().map(MultiIndex::degree).collect();
        let lookup: HashMap<MultiIndex, usize> = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        let mut products = vec![Vec::new(); indices.len()];
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                let k = lookup[&a.plus(b)];
                products[k].push((i, j));
            }
        }
        let mut block_start = Vec::with_capacity(order + 2);
        let mut slot = 0;
        for d in 0..=order {
            block_start.push(slot);
            while slot < degrees.len() && degrees[slot] == d {
                slot += 1;
            }
        }
        block_start.push(indices.len());
        Self {
            num_vars,
            order,
            indices,
            lookup,
            products,
            block_start,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

type LayoutCache = Mutex<HashMap<(usize, usize), Arc<JetLayout>>>;

pub(crate) fn layout(num_vars: usize, order: usize) -> Arc<JetLayout> {
    static CACHE: OnceLock<LayoutCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((num_vars, order))
        .or_insert_with(|| Arc::new(JetLayout::build(num_vars, order)))
        .clone()
}
