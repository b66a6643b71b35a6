use chrono::Duration;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::Ramp;
use crate::time::Timestamp;

/// Per-second posting-rate curve with inverse-CDF sampling.
pub struct RateCurve {
    start: Timestamp,
    cumulative: Vec<f64>,
}

impl RateCurve {
    pub fn new(ramp: &Ramp, launch_at: Timestamp) -> Self {
        let minutes = |m: f64| (m * 60.0).round() as usize;
        let trickle = minutes(ramp.trickle_minutes);
        let rise = minutes(ramp.rise_minutes);
        let tail = minutes(ramp.half_life_minutes * ramp.tail_half_lives);
        let half_life = ramp.half_life_minutes * 60.0;
        let burst_start = launch_at - Duration::seconds(minutes(ramp.lead_minutes) as i64);
        let start = burst_start - Duration::seconds(trickle as i64);

        let len = (trickle + rise + tail).max(1);
        let mut cumulative = Vec::with_capacity(len);
        let mut acc = 0.0;
        for s in 0..len {
            let t = s as f64 + 0.5;
            let rate = if s < trickle {
                ramp.trickle_rate
            } else if s < trickle + rise {
                let f = (t - trickle as f64) / rise as f64;
                ramp.trickle_rate + f * (ramp.burst_rate - ramp.trickle_rate)
            } else {
                let since_peak = t - (trickle + rise) as f64;
                ramp.burst_rate * 0.5f64.powf(since_peak / half_life)
            };
            acc += rate;
            cumulative.push(acc);
        }
        RateCurve { start, cumulative }
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn end(&self) -> Timestamp {
        self.start + Duration::seconds(self.cumulative.len() as i64)
    }

    /// One instant drawn from the curve, at millisecond resolution.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Timestamp {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random_range(0.0..total);
        let s = self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1);
        self.start + Duration::seconds(s as i64) + Duration::milliseconds(rng.random_range(0..1000))
    }

    /// `n` instants in ascending order.
    pub fn sample_sorted(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<Timestamp> {
        let mut out: Vec<Timestamp> = (0..n).map(|_| self.sample(rng)).collect();
        out.sort();
        out
    }
}
