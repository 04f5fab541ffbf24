//! Execution strategy for the data-parallel loops (strategy enumeration,
//! θ-grid scans). With the `parallel` feature disabled every path runs
//! sequentially and [`Execution::Parallel`] is accepted but ignored.

/// How a data-parallel loop is run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build will actually fan out across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..len`, preserving order.
pub(crate) fn map_range<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Folds `0..len` into per-chunk accumulators and merges them. `merge` must
/// be associative and commutative for the result to be order-independent.
pub(crate) fn fold_range<A, Init, Step, Merge>(
    exec: Execution,
    len: u64,
    init: Init,
    step: Step,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Step: Fn(A, u64) -> A + Sync + Send,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len)
            .into_par_iter()
            .fold(&init, &step)
            .reduce(&init, &merge);
    }
    let _ = (exec, &merge);
    (0..len).fold(init(), step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let v = map_range(exec, 100, |i| i * i);
            assert_eq!(v[7], 49);
            assert_eq!(v.len(), 100);
            let s = fold_range(exec, 1000, || 0u64, |a, i| a + i, |a, b| a + b);
            assert_eq!(s, 999 * 1000 / 2);
        }
    }
}
