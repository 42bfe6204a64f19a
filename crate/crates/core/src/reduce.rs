//! Deterministic data-parallel summation.
//!
//! Work is cut into fixed-size chunks of the index space (independent of the
//! number of worker threads), each chunk is folded sequentially in index
//! order, and the chunk results are combined by a fixed pairwise tree. The
//! floating point result is therefore identical for any pool size.

use rayon::prelude::*;

/// Index-space chunk length used by every parallel sum in the crate.
pub const CHUNK: u64 = 64;

/// Folds `0..total` in fixed chunks; `map(start, end)` handles one chunk.
pub fn chunked_tree_sum<R, F, G>(total: u64, map: F, combine: G) -> Option<R>
where
    R: Send,
    F: Fn(u64, u64) -> R + Sync + Send,
    G: Fn(R, R) -> R,
{
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<R> = (0..chunks)
        .into_par_iter()
        .map(|c| map(c * CHUNK, ((c + 1) * CHUNK).min(total)))
        .collect();
    tree_reduce(parts, combine)
}

/// Pairwise reduction `((x0+x1)+(x2+x3))+…` in input order.
pub fn tree_reduce<R, G: Fn(R, R) -> R>(mut items: Vec<R>, combine: G) -> Option<R> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_bits_for_any_pool_size() {
        let f = |s: u64, e: u64| (s..e).map(|i| 1.0 / (i as f64 + 0.37)).sum::<f64>();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| chunked_tree_sum(10_000, f, |a, b| a + b).unwrap())
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    #[test]
    fn tree_order_is_pairwise() {
        let r = tree_reduce(vec!["a", "b", "c"].into_iter().map(String::from).collect(), |a, b| {
            format!("({a}{b})")
        });
        assert_eq!(r.unwrap(), "((ab)c)");
    }
}
