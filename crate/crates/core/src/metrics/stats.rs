//! Order statistics and histograms.

use std::collections::BTreeMap;

use serde::Serialize;

/// Nearest-rank quantile of sorted data: the value at 1-based rank
/// `⌈num/den · n⌉` (at least 1). The median of an even-sized sample is the
/// lower middle value; no interpolation is ever performed, so every
/// reported quantile is an observed value.
pub fn quantile(sorted: &[u64], num: usize, den: usize) -> Option<u64> {
    if sorted.is_empty() || den == 0 {
        return None;
    }
    let rank = (num * sorted.len()).div_ceil(den).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

/// Five-number summary plus mean. The default is the all-zero summary
/// reported for empty samples.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub min: u64,
    pub q1: u64,
    pub median: u64,
    pub q3: u64,
    pub max: u64,
    pub mean: f64,
}

impl Summary {
    pub fn of(values: &[u64]) -> Option<Summary> {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let q = |num| quantile(&sorted, num, 4);
        Some(Summary {
            count: sorted.len(),
            min: *sorted.first()?,
            q1: q(1)?,
            median: q(2)?,
            q3: q(3)?,
            max: *sorted.last()?,
            mean: sorted.iter().map(|&v| v as f64).sum::<f64>() / sorted.len() as f64,
        })
    }
}

/// Fixed-width histogram; values above `cap` land in `overflow`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: u64,
    pub cap: Option<u64>,
    /// Bin start → count.
    pub bins: BTreeMap<u64, u64>,
    pub overflow: u64,
}

impl Histogram {
    pub fn new(bin_width: u64, cap: Option<u64>) -> Self {
        Histogram {
            bin_width: bin_width.max(1),
            cap,
            bins: BTreeMap::new(),
            overflow: 0,
        }
    }

    pub fn from_values(values: &[u64], bin_width: u64, cap: Option<u64>) -> Self {
        let mut h = Histogram::new(bin_width, cap);
        for &v in values {
            h.add(v);
        }
        h
    }

    pub fn add(&mut self, value: u64) {
        if self.cap.is_some_and(|cap| value > cap) {
            self.overflow += 1;
            return;
        }
        let start = value / self.bin_width * self.bin_width;
        *self.bins.entry(start).or_default() += 1;
    }

    pub fn total(&self) -> u64 {
        self.bins.values().sum::<u64>() + self.overflow
    }
}
