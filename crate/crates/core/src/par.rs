//! Order-preserving parallel map over independent work items.

use std::num::NonZeroUsize;
use std::thread;

const SEQUENTIAL_BELOW: usize = 16;

/// `items.iter().map(f).collect()`, spread over the available cores.
///
/// Results come back in input order whatever order the threads finish in.
pub(crate) fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], f: F) -> Vec<R> {
    let workers = thread::available_parallelism().map_or(1, NonZeroUsize::get).min(items.len());
    if workers <= 1 || items.len() < SEQUENTIAL_BELOW {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let f = &f;
    thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
