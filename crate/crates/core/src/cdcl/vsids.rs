//! VSIDS variable activities with an indexed max-heap.

use crate::formula::Var;

const RESCALE_LIMIT: f64 = 1e100;

/// Variable activities and the decision order.
///
/// The heap orders by activity, ties broken towards the lower variable index, so
/// the next decision never depends on heap layout.
#[derive(Clone, Debug)]
pub struct Vsids {
    activity: Vec<f64>,
    increment: f64,
    decay: f64,
    heap: Vec<u32>,
    // position in `heap`, or usize::MAX when absent
    position: Vec<usize>,
}

impl Vsids {
    pub fn new(num_vars: usize, decay: f64) -> Vsids {
        assert!(decay > 0.0 && decay < 1.0, "decay must lie in (0, 1)");
        let mut v = Vsids {
            activity: vec![0.0; num_vars],
            increment: 1.0,
            decay,
            heap: Vec::with_capacity(num_vars),
            position: vec![usize::MAX; num_vars],
        };
        for i in 0..num_vars {
            v.insert(Var(i as u32));
        }
        v
    }

    pub fn decay_factor(&self) -> f64 {
        self.decay
    }

    pub fn activity(&self, var: Var) -> f64 {
        self.activity[var.index()]
    }

    pub fn activities(&self) -> &[f64] {
        &self.activity
    }

    pub fn set_activity(&mut self, var: Var, value: f64) {
        let old = self.activity[var.index()];
        self.activity[var.index()] = value;
        if self.contains(var) {
            let pos = self.position[var.index()];
            if value >= old {
                self.sift_up(pos);
            } else {
                self.sift_down(pos);
            }
        }
    }

    pub fn bump(&mut self, var: Var) {
        let a = &mut self.activity[var.index()];
        *a += self.increment;
        if *a > RESCALE_LIMIT {
            for x in self.activity.iter_mut() {
                *x *= 1.0 / RESCALE_LIMIT;
            }
            self.increment *= 1.0 / RESCALE_LIMIT;
        }
        if self.contains(var) {
            self.sift_up(self.position[var.index()]);
        }
    }

    /// Applies one decay step by growing the bump increment.
    pub fn decay(&mut self) {
        self.increment /= self.decay;
    }

    pub fn contains(&self, var: Var) -> bool {
        self.position[var.index()] != usize::MAX
    }

    pub fn insert(&mut self, var: Var) {
        if self.contains(var) {
            return;
        }
        self.position[var.index()] = self.heap.len();
        self.heap.push(var.0);
        self.sift_up(self.heap.len() - 1);
    }

    pub fn peek(&self) -> Option<Var> {
        self.heap.first().map(|&v| Var(v))
    }

    pub fn pop(&mut self) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.position[top as usize] = usize::MAX;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.position[last as usize] = 0;
            self.sift_down(0);
        }
        Some(Var(top))
    }

    #[inline]
    fn before(&self, a: u32, b: u32) -> bool {
        let (x, y) = (self.activity[a as usize], self.activity[b as usize]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.before(var, self.heap[parent]) {
                break;
            }
            self.heap[pos] = self.heap[parent];
            self.position[self.heap[pos] as usize] = pos;
            pos = parent;
        }
        self.heap[pos] = var;
        self.position[var as usize] = pos;
    }

    fn sift_down(&mut self, mut pos: usize) {
        let var = self.heap[pos];
        let len = self.heap.len();
        loop {
            let left = 2 * pos + 1;
            if left >= len {
                break;
            }
            let right = left + 1;
            let child = if right < len && self.before(self.heap[right], self.heap[left]) {
                right
            } else {
                left
            };
            if !self.before(self.heap[child], var) {
                break;
            }
            self.heap[pos] = self.heap[child];
            self.position[self.heap[pos] as usize] = pos;
            pos = child;
        }
        self.heap[pos] = var;
        self.position[var as usize] = pos;
    }
}
