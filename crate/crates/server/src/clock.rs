//! Wall clocks for event timestamps.

use std::sync::Mutex;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

/// Source of "seconds since the Unix epoch". Implementations must never go
/// backwards, since the event log promises non-decreasing timestamps.
pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

/// Monotonic clock anchored at the system time of its creation, running
/// `scale` times faster than real time.
///
/// A scale above one compresses experiments: with scale 100 a client that
/// sleeps 20 ms per segment shows up in the log with 2-second gaps, which
/// keeps one-second log resolution meaningful in short test runs.
#[derive(Debug)]
pub struct ScaledClock {
    origin_epoch: f64,
    origin: Instant,
    scale: f64,
}

impl ScaledClock {
    pub fn new(scale: f64) -> Self {
        let origin_epoch = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        ScaledClock {
            origin_epoch,
            origin: Instant::now(),
            scale,
        }
    }

    pub fn real_time() -> Self {
        ScaledClock::new(1.0)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }
}

impl Clock for ScaledClock {
    fn now(&self) -> f64 {
        self.origin_epoch + self.origin.elapsed().as_secs_f64() * self.scale
    }
}

/// Hand-driven clock for tests.
#[derive(Debug, Default)]
pub struct ManualClock {
    now: Mutex<f64>,
}

impl ManualClock {
    pub fn at(now: f64) -> Self {
        ManualClock {
            now: Mutex::new(now),
        }
    }

    pub fn set(&self, now: f64) {
        let mut t = self.now.lock().unwrap();
        assert!(now >= *t, "manual clock cannot go backwards");
        *t = now;
    }

    pub fn advance(&self, seconds: f64) {
        *self.now.lock().unwrap() += seconds;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> f64 {
        *self.now.lock().unwrap()
    }
}
