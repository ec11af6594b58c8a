//! Deterministic worker-thread helper.
//!
//! `MA_RADIAL_THREADS` caps the number of worker threads. Every parallel
//! site in the crate computes one output slot per index with a pure
//! function and all reductions (sums, sups, prefix scans) run sequentially
//! afterwards, so results are bitwise independent of the thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Worker count: `MA_RADIAL_THREADS` if set to a positive integer,
/// otherwise the available parallelism capped at 8.
pub fn thread_count() -> usize {
    if let Ok(s) = std::env::var("MA_RADIAL_THREADS") {
        if let Ok(k) = s.trim().parse::<usize>() {
            if k >= 1 {
                return k.min(64);
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8)
}

/// Fill a `Vec<T>` with `f(i)` for `i in 0..len`, splitting the index range
/// over worker threads. Output is identical for any thread count.
pub fn par_map<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_count();
    if threads <= 1 || len < 64 {
        return (0..len).map(f).collect();
    }
    let mut out = vec![T::default(); len];
    let next = AtomicUsize::new(0);
    let chunk = (len / (threads * 4)).max(16);
    let out_ptr = SendPtr(out.as_mut_ptr());
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let next = &next;
            let f = &f;
            let out_ptr = &out_ptr;
            scope.spawn(move || loop {
                let start = next.fetch_add(chunk, Ordering::Relaxed);
                if start >= len {
                    break;
                }
                let end = (start + chunk).min(len);
                for i in start..end {
                    // Safety: each index is claimed by exactly one worker.
                    unsafe { *out_ptr.0.add(i) = f(i) };
                }
            });
        }
    });
    out
}

struct SendPtr<T>(*mut T);
unsafe impl<T: Send> Sync for SendPtr<T> {}
unsafe impl<T: Send> Send for SendPtr<T> {}
