use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

const WINDOW: Duration = Duration::from_secs(1);

/// Monotonic time source. Tests swap in [`VirtualClock`].
pub trait Clock: Send + Sync {
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

#[derive(Debug)]
pub struct SystemClock {
    origin: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        SystemClock { origin: Instant::now() }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// A clock that only moves when someone sleeps on it.
#[derive(Debug, Default)]
pub struct VirtualClock {
    now: Mutex<Duration>,
}

impl VirtualClock {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn advance(&self, d: Duration) {
        *self.now.lock().unwrap() += d;
    }
}

impl Clock for VirtualClock {
    fn now(&self) -> Duration {
        *self.now.lock().unwrap()
    }

    fn sleep(&self, d: Duration) {
        self.advance(d);
    }
}

/// Sliding-window limiter: at most `per_second` grants in any one-second window.
pub struct RateLimiter {
    per_second: u32,
    clock: Arc<dyn Clock>,
    granted: Mutex<VecDeque<Duration>>,
}

impl fmt::Debug for RateLimiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateLimiter").field("per_second", &self.per_second).finish_non_exhaustive()
    }
}

impl RateLimiter {
    /// # Panics
    /// If `per_second` is zero.
    pub fn new(per_second: u32, clock: Arc<dyn Clock>) -> Self {
        assert!(per_second > 0, "rate limit must be positive");
        RateLimiter { per_second, clock, granted: Mutex::new(VecDeque::new()) }
    }

    pub fn per_second(&self) -> u32 {
        self.per_second
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    /// Blocks until a request may be issued and returns the grant time.
    pub fn acquire(&self) -> Duration {
        loop {
            let wait = {
                let mut granted = self.granted.lock().unwrap();
                let now = self.clock.now();
                while granted.front().is_some_and(|&t| t + WINDOW <= now) {
                    granted.pop_front();
                }
                if granted.len() < self.per_second as usize {
                    granted.push_back(now);
                    return now;
                }
                granted[0] + WINDOW - now
            };
            self.clock.sleep(wait);
        }
    }
}
