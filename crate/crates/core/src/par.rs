//! Order-preserving map over a slice, on the rayon pool when the `parallel`
//! feature is enabled and the caller asks for it.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether this build can run work in parallel.
pub const AVAILABLE: bool = cfg!(feature = "parallel");

pub fn map<T, R, F>(parallel: bool, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && items.len() > 1 {
            return items.par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.iter().map(f).collect()
}
