//! Thread fan-out for independent evaluations. `ROUTEGAME_THREADS` caps the
//! worker count; results are merged by index, so output does not depend on
//! the thread count.

pub fn thread_count() -> usize {
    std::env::var("ROUTEGAME_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .min(64)
}

/// Applies `f` to every item on up to `threads` workers, preserving order.
pub fn map_ordered<T, R, F>(items: Vec<T>, threads: usize, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let threads = threads.min(items.len()).max(1);
    if threads == 1 {
        return items.into_iter().map(f).collect();
    }
    let items: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    let chunk_size = items.len().div_ceil(threads);
    let mut indexed: Vec<(usize, R)> = Vec::with_capacity(items.len());
    let chunks: Vec<Vec<(usize, T)>> = {
        let mut chunks = Vec::new();
        let mut rest = items;
        while !rest.is_empty() {
            let tail = rest.split_off(rest.len().min(chunk_size));
            chunks.push(rest);
            rest = tail;
        }
        chunks
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|chunk| {
                let f = &f;
                scope.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|(i, item)| (i, f(item)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            indexed.extend(handle.join().expect("worker panicked"));
        }
    });
    indexed.sort_by_key(|(i, _)| *i);
    indexed.into_iter().map(|(_, r)| r).collect()
}
