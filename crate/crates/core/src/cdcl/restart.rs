//! Restart policies: Glucose-style dynamic restarts and Luby restarts.

use std::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RestartPolicy {
    /// Restart when the recent LBD average degrades relative to the global one.
    Dynamic { window: usize, k: f64 },
    /// Restart after `unit * luby(i)` conflicts for the i-th restart.
    Luby { unit: u64 },
}

impl Default for RestartPolicy {
    fn default() -> Self {
        RestartPolicy::Dynamic { window: 50, k: 0.8 }
    }
}

/// The Luby sequence, 1-based: 1, 1, 2, 1, 1, 2, 4, 1, 1, 2, ...
pub fn luby(i: u64) -> u64 {
    assert!(i >= 1);
    // find the smallest complete subsequence 2^k - 1 that contains i
    let mut i = i;
    loop {
        let mut k = 1u32;
        while (1u64 << k) - 1 < i {
            k += 1;
        }
        if i == (1u64 << k) - 1 {
            return 1u64 << (k - 1);
        }
        i -= (1u64 << (k - 1)) - 1;
    }
}

/// Dynamic restart test: the window mean scaled by `k` exceeds the global mean.
pub fn dynamic_restart_due(window_mean: f64, global_mean: f64, k: f64) -> bool {
    window_mean * k > global_mean
}

/// Running state consulted by [`RestartState::should_restart`].
#[derive(Clone, Debug)]
pub struct RestartState {
    policy: RestartPolicy,
    recent: VecDeque<u32>,
    recent_sum: u64,
    global_sum: u64,
    global_count: u64,
    since_restart: u64,
    restarts: u64,
}

impl RestartState {
    pub fn new(policy: RestartPolicy) -> RestartState {
        RestartState {
            policy,
            recent: VecDeque::new(),
            recent_sum: 0,
            global_sum: 0,
            global_count: 0,
            since_restart: 0,
            restarts: 0,
        }
    }

    pub fn policy(&self) -> RestartPolicy {
        self.policy
    }

    pub fn on_conflict(&mut self, lbd: u32) {
        self.since_restart += 1;
        self.global_sum += lbd as u64;
        self.global_count += 1;
        if let RestartPolicy::Dynamic { window, .. } = self.policy {
            self.recent.push_back(lbd);
            self.recent_sum += lbd as u64;
            if self.recent.len() > window {
                self.recent_sum -= self.recent.pop_front().unwrap() as u64;
            }
        }
    }

    pub fn should_restart(&self) -> bool {
        match self.policy {
            RestartPolicy::Dynamic { window, k } => {
                if self.recent.len() < window || self.global_count == 0 {
                    return false;
                }
                let window_mean = self.recent_sum as f64 / self.recent.len() as f64;
                let global_mean = self.global_sum as f64 / self.global_count as f64;
                dynamic_restart_due(window_mean, global_mean, k)
            }
            RestartPolicy::Luby { unit } => self.since_restart >= unit * luby(self.restarts + 1),
        }
    }

    pub fn on_restart(&mut self) {
        self.restarts += 1;
        self.since_restart = 0;
        self.recent.clear();
        self.recent_sum = 0;
    }
}
