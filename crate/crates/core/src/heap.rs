// SPDX-License-Identifier: Apache-2.0

//! Addressable binary min-heap over dense integer ids.
//!
//! Keys may move in either direction while an item is queued, which the
//! label-correcting group search needs. Equal keys pop the smaller id first.

use std::cmp::Ordering;

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct IndexedHeap {
    heap: Vec<(f64, u32)>,
    pos: Vec<usize>,
}

#[inline]
fn less(a: (f64, u32), b: (f64, u32)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

impl IndexedHeap {
    pub fn new(capacity: usize) -> Self {
        IndexedHeap {
            heap: Vec::new(),
            pos: vec![ABSENT; capacity],
        }
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.pos[id] != ABSENT
    }

    pub fn key(&self, id: usize) -> Option<f64> {
        let p = self.pos[id];
        (p != ABSENT).then(|| self.heap[p].0)
    }

    pub fn peek(&self) -> Option<(usize, f64)> {
        self.heap.first().map(|&(k, id)| (id as usize, k))
    }

    /// Inserts `id`, or moves it to `key` if already queued.
    pub fn push_or_update(&mut self, id: usize, key: f64) {
        let p = self.pos[id];
        if p == ABSENT {
            self.heap.push((key, id as u32));
            let last = self.heap.len() - 1;
            self.pos[id] = last;
            self.sift_up(last);
        } else {
            let old = self.heap[p].0;
            self.heap[p].0 = key;
            if key < old {
                self.sift_up(p);
            } else {
                self.sift_down(p);
            }
        }
    }

    pub fn pop(&mut self) -> Option<(usize, f64)> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.heap.swap(0, last);
        let (key, id) = self.heap.pop().expect("non-empty");
        self.pos[id as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.pos[self.heap[0].1 as usize] = 0;
            self.sift_down(0);
        }
        Some((id as usize, key))
    }

    pub fn clear(&mut self) {
        for &(_, id) in &self.heap {
            self.pos[id as usize] = ABSENT;
        }
        self.heap.clear();
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if less(self.heap[i], self.heap[parent]) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && less(self.heap[r], self.heap[l]) { r } else { l };
            if less(self.heap[child], self.heap[i]) {
                self.swap(i, child);
                i = child;
            } else {
                break;
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].1 as usize] = a;
        self.pos[self.heap[b].1 as usize] = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ties_pop_smaller_id() {
        let mut h = IndexedHeap::new(4);
        h.push_or_update(3, 1.0);
        h.push_or_update(1, 1.0);
        h.push_or_update(2, 0.5);
        assert_eq!(h.pop(), Some((2, 0.5)));
        assert_eq!(h.pop(), Some((1, 1.0)));
        assert_eq!(h.pop(), Some((3, 1.0)));
        assert_eq!(h.pop(), None);
    }

    #[test]
    fn key_can_increase() {
        let mut h = IndexedHeap::new(3);
        h.push_or_update(0, 1.0);
        h.push_or_update(1, 2.0);
        h.push_or_update(0, 5.0);
        assert_eq!(h.pop(), Some((1, 2.0)));
        assert_eq!(h.pop(), Some((0, 5.0)));
    }

    proptest! {
        #[test]
        fn pops_sorted(ops in prop::collection::vec((0usize..20, 0u32..100), 1..200)) {
            let mut h = IndexedHeap::new(20);
            let mut model = std::collections::BTreeMap::new();
            for (id, k) in ops {
                h.push_or_update(id, k as f64);
                model.insert(id, k);
            }
            let mut expected: Vec<(u32, usize)> = model.into_iter().map(|(id, k)| (k, id)).collect();
            expected.sort();
            let got: Vec<(u32, usize)> = std::iter::from_fn(|| h.pop()).map(|(id, k)| (k as u32, id)).collect();
            prop_assert_eq!(got, expected);
        }
    }
}
