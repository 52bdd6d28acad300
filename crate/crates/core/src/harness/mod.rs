//! Experiment plumbing shared by the CLI and the acceptance suite.

pub mod dist;
pub mod space;
pub mod sweep;
pub mod wrap;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub use dist::{ne_corpus, ne_dist_test, DistReport};
pub use space::{SpaceCell, SpaceReport, SPACE_CSV_HEADER};
pub use sweep::{run_sweep, Check, SweepCell, SweepResult, SweepSpec};
pub use wrap::{modulo_wrap_demo, WrapDemo};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "DYNVC_WORKERS";

pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&w: &usize| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Maps `f` over `items` on `workers` threads; output order matches input order.
pub fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = workers.clamp(1, items.len().max(1));
    if workers == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<u64> = (0..50).collect();
        assert_eq!(parallel_map(&items, 4, |x| x * x), items.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!(parallel_map(&Vec::<u64>::new(), 3, |x| *x).is_empty());
    }
}
