use std::sync::atomic::{AtomicUsize, Ordering};

use crate::net::{Label, RESERVED_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("fresh label allocator `{0}` exhausted")]
pub struct AllocatorExhausted(pub String);

/// Source of labels guaranteed not to clash with any label written in a
/// source file, nor with each other.
pub trait FreshLabels: Sync {
    fn fresh(&self) -> Result<Label, AllocatorExhausted>;
}

/// Counter-based allocator in the reserved `%` namespace. Safe to share
/// across threads: two calls never return the same label.
#[derive(Debug)]
pub struct LabelAllocator {
    prefix: String,
    next: AtomicUsize,
}

impl Default for LabelAllocator {
    fn default() -> Self {
        Self::new()
    }
}

impl LabelAllocator {
    pub fn new() -> Self {
        Self::with_prefix(String::new())
    }

    fn with_prefix(prefix: String) -> Self {
        LabelAllocator {
            prefix,
            next: AtomicUsize::new(0),
        }
    }

    /// A child allocator whose labels are disjoint from this allocator's and
    /// from every other scope with a different key. Lets concurrent rewrites
    /// mint labels deterministically.
    pub fn scope(&self, key: usize) -> LabelAllocator {
        LabelAllocator::with_prefix(format!("{}{key}.", self.prefix))
    }

    /// Reserves a block id; pair with [`LabelAllocator::scope`].
    pub fn next_block(&self) -> Result<usize, AllocatorExhausted> {
        self.bump()
    }

    fn bump(&self) -> Result<usize, AllocatorExhausted> {
        self.next
            .fetch_update(Ordering::Relaxed, Ordering::Relaxed, |n| n.checked_add(1))
            .map_err(|_| AllocatorExhausted(self.prefix.clone()))
    }
}

impl FreshLabels for LabelAllocator {
    fn fresh(&self) -> Result<Label, AllocatorExhausted> {
        let n = self.bump()?;
        // scoped labels end in '.', so "%1.2" never collides with "%12"
        Ok(Label::new(format!("{RESERVED_PREFIX}{}{n}", self.prefix)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn concurrent_allocations_are_distinct() {
        let alloc = LabelAllocator::new();
        let labels: Vec<Label> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..4)
                .map(|_| s.spawn(|| (0..500).map(|_| alloc.fresh().unwrap()).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().unwrap())
                .collect()
        });
        let set: HashSet<_> = labels.iter().collect();
        assert_eq!(set.len(), 2000);
        assert!(labels.iter().all(Label::is_reserved));
    }

    #[test]
    fn scopes_are_disjoint() {
        let root = LabelAllocator::new();
        let a = root.scope(1);
        let b = root.scope(12);
        let la: Vec<_> = (0..30).map(|_| a.fresh().unwrap()).collect();
        let lb: Vec<_> = (0..30).map(|_| b.fresh().unwrap()).collect();
        assert!(la.iter().all(|l| !lb.contains(l)));
        assert!(la
            .iter()
            .all(|l| l.as_str() != root.fresh().unwrap().as_str()));
    }
}
