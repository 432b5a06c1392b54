//! Small numeric helpers shared across modules.

/// Neumaier-compensated running sum.
///
/// Products of many near-one factors and long Monte Carlo accumulations
/// lose digits under naive summation; this keeps the error at one ulp
/// of the true sum regardless of length.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an iterator of f64 values.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Streaming mean/variance accumulator (Welford), mergeable in a fixed
/// order so parallel batches reduce deterministically.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn merge(&mut self, other: Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 +=
            other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample variance (n-1 denominator). `None` for fewer than two samples.
    pub fn sample_variance(&self) -> Option<f64> {
        if self.count < 2 {
            None
        } else {
            Some(self.m2 / (self.count - 1) as f64)
        }
    }

    pub fn sample_std_dev(&self) -> Option<f64> {
        self.sample_variance().map(f64::sqrt)
    }

    /// Standard error of the mean: sample std dev / sqrt(n).
    pub fn std_error(&self) -> f64 {
        match self.sample_variance() {
            Some(var) => (var / self.count as f64).sqrt(),
            None => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_lost_digits() {
        // 1 + 1e-16 repeated: naive summation stays at 1.0 + n*0 for
        // small counts; compensation keeps the tail.
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..1_000_000 {
            acc.add(1e-16);
        }
        let expected = 1.0 + 1e-10;
        assert!((acc.value() - expected).abs() < 1e-14);
    }

    #[test]
    fn moments_match_two_pass() {
        let xs = [0.4, 0.6, 0.1, 0.9, 0.5];
        let mut m = Moments::new();
        for &x in &xs {
            m.push(x);
        }
        let mean: f64 = xs.iter().sum::<f64>() / xs.len() as f64;
        let var: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert!((m.mean() - mean).abs() < 1e-15);
        assert!((m.sample_variance().unwrap() - var).abs() < 1e-15);
    }

    #[test]
    fn moments_merge_is_exact_enough() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut whole = Moments::new();
        for &x in &xs {
            whole.push(x);
        }
        let mut left = Moments::new();
        let mut right = Moments::new();
        for &x in &xs[..411] {
            left.push(x);
        }
        for &x in &xs[411..] {
            right.push(x);
        }
        left.merge(right);
        assert_eq!(left.count(), whole.count());
        assert!((left.mean() - whole.mean()).abs() < 1e-12);
        assert!((left.sample_variance().unwrap() - whole.sample_variance().unwrap()).abs() < 1e-12);
    }
}
