//! Compensated summation used for order-stable reductions.

#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Running mean and variance fed in a fixed order. Uses a shifted
/// compensated sum so the result only depends on the order of `push` calls.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    shift: f64,
    s1: Kahan,
    s2: Kahan,
    total: Kahan,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        if self.n == 0 {
            self.shift = v;
        }
        self.n += 1;
        let c = v - self.shift;
        self.s1.add(c);
        self.s2.add(c * c);
        self.total.add(v);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total.value() / self.n as f64
        }
    }

    /// Unbiased sample variance (0 for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let s1 = self.s1.value();
        ((self.s2.value() - s1 * s1 / n) / (n - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}
