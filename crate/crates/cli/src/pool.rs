//! Scoped worker pool for code-range sweeps: each worker gets a memo
//! snapshot, results and memos merge back in chunk order, so reports do
//! not depend on scheduling.

use nestedorders::Memo;
use std::ops::Range;

/// Splits 0..total into at most `jobs` contiguous non-empty chunks.
pub fn partition(total: u64, jobs: usize) -> Vec<Range<u64>> {
    let jobs = (jobs.max(1) as u64).min(total.max(1));
    let base = total / jobs;
    let extra = total % jobs;
    let mut chunks = Vec::new();
    let mut start = 0;
    for i in 0..jobs {
        let len = base + u64::from(i < extra);
        if len > 0 {
            chunks.push(start..start + len);
            start += len;
        }
    }
    if chunks.is_empty() {
        chunks.push(0..0);
    }
    chunks
}

/// Runs `work` over the chunks of 0..total, in parallel when jobs > 1.
pub fn scan<T, F>(total: u64, jobs: usize, memo: &mut Memo, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>, &mut Memo) -> T + Sync,
{
    let chunks = partition(total, jobs);
    if chunks.len() == 1 {
        return vec![work(chunks.into_iter().next().unwrap(), memo)];
    }
    let base = memo.snapshot();
    let results: Vec<(T, Memo)> = std::thread::scope(|s| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|range| {
                let mut local = base.snapshot();
                let work = &work;
                s.spawn(move || {
                    let t = work(range, &mut local);
                    (t, local)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(results.len());
    for (t, local) in results {
        memo.merge(local);
        out.push(t);
    }
    out
}
