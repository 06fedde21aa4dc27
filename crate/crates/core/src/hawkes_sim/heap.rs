/// Binary min-heap over a fixed set of slots `0..n`, one key per slot.
///
/// Keys are updated in place. Equal keys are ordered by slot index so the pop
/// order is fully deterministic.
#[derive(Debug, Clone)]
pub(crate) struct IndexedHeap {
    keys: Vec<f64>,
    heap: Vec<u32>,
    pos: Vec<u32>,
}

impl IndexedHeap {
    pub fn new(keys: Vec<f64>) -> Self {
        let n = keys.len();
        let mut h = IndexedHeap {
            keys,
            heap: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
        };
        for k in (0..n / 2).rev() {
            h.sift_down(k);
        }
        h
    }

    /// `(slot, key)` with the smallest key.
    pub fn peek(&self) -> Option<(usize, f64)> {
        self.heap.first().map(|&s| (s as usize, self.keys[s as usize]))
    }


    pub fn update(&mut self, slot: usize, key: f64) {
        let old = self.keys[slot];
        self.keys[slot] = key;
        let at = self.pos[slot] as usize;
        if key < old {
            self.sift_up(at);
        } else {
            self.sift_down(at);
        }
    }

    #[inline]
    fn less(&self, a: u32, b: u32) -> bool {
        let (ka, kb) = (self.keys[a as usize], self.keys[b as usize]);
        ka < kb || (ka == kb && a < b)
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i as u32;
        self.pos[self.heap[j] as usize] = j as u32;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let p = (i - 1) / 2;
            if self.less(self.heap[i], self.heap[p]) {
                self.swap(i, p);
                i = p;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && self.less(self.heap[l], self.heap[m]) {
                m = l;
            }
            if r < n && self.less(self.heap[r], self.heap[m]) {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn peek_is_minimum_after_updates(
            init in prop::collection::vec(0.0f64..100.0, 1..40),
            ops in prop::collection::vec((0usize..40, 0.0f64..100.0), 0..200),
        ) {
            let n = init.len();
            let mut h = IndexedHeap::new(init.clone());
            let mut keys = init;
            for (slot, key) in ops {
                let slot = slot % n;
                h.update(slot, key);
                keys[slot] = key;
                let (s, k) = h.peek().unwrap();
                let best = keys.iter().copied().fold(f64::INFINITY, f64::min);
                prop_assert_eq!(k, best);
                prop_assert_eq!(keys[s], best);
                prop_assert_eq!(s, keys.iter().position(|&v| v == best).unwrap());
            }
        }
    }
}
