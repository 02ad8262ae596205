//! Compensated accumulators.
//!
//! [`CompensatedSum`] is the Kahan-Babuska-Neumaier running sum. It is exact
//! enough that `sum_{n} - sum_{n-1}` recovers the last addend to within an ulp
//! of the running total, which is what prefix-sum ratios rely on.
//!
//! [`LogWeightedSum`] accumulates `sum_k w_k` and `sum_k w_k v_k` where the
//! weights are supplied as logarithms. The running scale is re-based whenever
//! a larger weight arrives, so weights like `2^100000` never overflow.

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if t.is_finite() {
            if self.sum.abs() >= v.abs() {
                self.comp += (self.sum - t) + v;
            } else {
                self.comp += (v - t) + self.sum;
            }
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.comp
        } else {
            self.sum
        }
    }

    /// Multiplies both the running sum and its compensation term.
    #[inline]
    pub fn scale(&mut self, factor: f64) {
        self.sum *= factor;
        self.comp *= factor;
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Running `(sum w, sum w*v)` with log-domain weights.
#[derive(Debug, Clone, Copy)]
pub struct LogWeightedSum {
    ln_scale: f64,
    weights: CompensatedSum,
    values: CompensatedSum,
}

impl Default for LogWeightedSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogWeightedSum {
    pub const fn new() -> Self {
        Self {
            ln_scale: f64::NEG_INFINITY,
            weights: CompensatedSum::new(),
            values: CompensatedSum::new(),
        }
    }

    /// Adds a weight `exp(ln_w)` carrying the value `v`.
    pub fn push(&mut self, ln_w: f64, v: f64) {
        if ln_w == f64::NEG_INFINITY {
            return;
        }
        if ln_w > self.ln_scale {
            let f = (self.ln_scale - ln_w).exp();
            self.weights.scale(f);
            self.values.scale(f);
            self.ln_scale = ln_w;
        }
        let w = (ln_w - self.ln_scale).exp();
        self.weights.add(w);
        self.values.add(w * v);
    }

    /// Adds a weight without an associated value.
    pub fn push_weight(&mut self, ln_w: f64) {
        self.push(ln_w, 0.0);
    }

    /// `ln(sum w)`; negative infinity when empty.
    pub fn ln_total(&self) -> f64 {
        if self.ln_scale == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.ln_scale + self.weights.value().ln()
    }

    /// `sum w*v / sum w`; NaN when empty.
    pub fn weighted_mean(&self) -> f64 {
        self.values.value() / self.weights.value()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_scale == f64::NEG_INFINITY
    }
}
