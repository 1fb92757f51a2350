//! Deterministic compensated reductions.
//!
//! Every norm and quadrature in the crate reduces through these helpers in
//! a fixed (index) order, so results are reproducible bit-for-bit across
//! runs and thread counts.

use num_complex::Complex64;

/// Neumaier variant of Kahan summation; immune to cancellation ordering
/// issues that plain `sum()` exhibits on large grids.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator in its own order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Accumulator::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Complex compensated sum (independent real/imaginary accumulators).
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexAccumulator {
    re: Accumulator,
    im: Accumulator,
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn kahan_csum<I: IntoIterator<Item = Complex64>>(zs: I) -> Complex64 {
    let mut acc = ComplexAccumulator::new();
    for z in zs {
        acc.add(z);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        // 1 + 1e16 − 1e16 loses the 1 in naive order-sensitive float sums.
        let xs = [1.0, 1e16, -1e16];
        assert_eq!(kahan_sum(xs), 1.0);
    }

    #[test]
    fn matches_exact_on_small_sets() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(kahan_sum(xs.iter().copied()), 499_500.0);
    }
}
