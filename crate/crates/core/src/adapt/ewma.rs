//! Exponentially weighted moving averages of MAC and DSS delays.

/// EWMA over non-negative delay samples (microseconds).
///
/// `smoothing` is the weight of the previous average: a smoothing of zero
/// keeps only the latest sample. The first sample initializes the average.
#[derive(Clone, Debug, PartialEq)]
pub struct EwmaEstimator {
    avg: f64,
    smoothing: f64,
    initialized: bool,
    min_sample: f64,
    max_sample: f64,
}

impl EwmaEstimator {
    pub fn new(smoothing: f64) -> Self {
        assert!(
            (0.0..1.0).contains(&smoothing),
            "smoothing must lie in [0, 1), got {smoothing}"
        );
        EwmaEstimator {
            avg: 0.0,
            smoothing,
            initialized: false,
            min_sample: f64::INFINITY,
            max_sample: f64::NEG_INFINITY,
        }
    }

    /// Folds `sample` into the average and returns the new value.
    ///
    /// A negative sample means a timestamp was taken in the wrong order and
    /// aborts the run.
    pub fn update(&mut self, sample: f64) -> f64 {
        assert!(
            sample >= 0.0 && sample.is_finite(),
            "negative or non-finite delay sample {sample}"
        );
        if self.initialized {
            self.avg = (1.0 - self.smoothing) * sample + self.smoothing * self.avg;
        } else {
            self.avg = sample;
            self.initialized = true;
        }
        self.min_sample = self.min_sample.min(sample);
        self.max_sample = self.max_sample.max(sample);
        self.avg
    }

    pub fn average(&self) -> Option<f64> {
        self.initialized.then_some(self.avg)
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn is_initialized(&self) -> bool {
        self.initialized
    }

    /// True when the average lies within the range of samples seen so far.
    pub fn within_sample_bounds(&self) -> bool {
        !self.initialized
            || (self.avg >= self.min_sample - 1e-9 * self.max_sample.abs().max(1.0)
                && self.avg <= self.max_sample + 1e-9 * self.max_sample.abs().max(1.0))
    }
}
