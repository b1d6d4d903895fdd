//! Data-parallel maps over independent work items (parameter sweeps,
//! randomized invariant draws). With the `parallel` feature disabled every
//! map runs sequentially.

use crate::error::Result;
use crate::flow::{integrate, FlowState, IntegratorConfig, Trajectory};
use crate::lie::LieAlgebra;

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Order-preserving map, parallel when the `parallel` feature is on.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(items, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

/// Integrate many initial states on one algebra.
pub fn integrate_many(
    algebra: &LieAlgebra,
    initials: &[FlowState],
    cfg: &IntegratorConfig,
) -> Vec<Result<Trajectory>> {
    map(initials, |s| integrate(algebra, s, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map_sequential(&xs, |x| x * x);
        assert_eq!(map(&xs, |x| x * x), seq);
        assert_eq!(seq[999], 999 * 999);
    }
}
