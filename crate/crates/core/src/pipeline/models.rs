use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Host-to-device copy cost.
///
/// `time(bytes) = base_latency + bytes / (bandwidth * efficiency)
///                + round_trips * rt_latency` (last term only when
/// `validate_on_transfer` is set, modelling blocking validity checks that
/// wait on the device after each copy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferModel {
    /// Peak bytes per second.
    pub bandwidth: f64,
    /// Achieved fraction of peak, in (0, 1].
    pub efficiency: f64,
    pub base_latency: f64,
    pub validate_on_transfer: bool,
    pub round_trips: u32,
    pub rt_latency: f64,
}

impl Default for TransferModel {
    /// 12.3 GB/s peak at full efficiency, two 50 us round trips when
    /// validation is switched on.
    fn default() -> Self {
        TransferModel {
            bandwidth: 12.3e9,
            efficiency: 1.0,
            base_latency: 0.0,
            validate_on_transfer: false,
            round_trips: 2,
            rt_latency: 50e-6,
        }
    }
}

impl TransferModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth.is_finite() && self.bandwidth > 0.0) {
            return Err(Error::invalid("bandwidth must be positive"));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid("efficiency must be in (0, 1]"));
        }
        if self.base_latency < 0.0 || self.rt_latency < 0.0 {
            return Err(Error::invalid("latencies must be non-negative"));
        }
        Ok(())
    }

    /// Extra time per transfer spent on validation round trips.
    pub fn round_trip_overhead(&self) -> f64 {
        if self.validate_on_transfer {
            f64::from(self.round_trips) * self.rt_latency
        } else {
            0.0
        }
    }

    pub fn time(&self, bytes: u64) -> f64 {
        self.base_latency
            + bytes as f64 / (self.bandwidth * self.efficiency)
            + self.round_trip_overhead()
    }

    pub fn with_validation(mut self, on: bool) -> Self {
        self.validate_on_transfer = on;
        self
    }
}

/// Free-function form of [`TransferModel::time`].
pub fn transfer_time(bytes: u64, m: &TransferModel) -> f64 {
    m.time(bytes)
}

/// Device compute cost, affine in the MFG size:
/// `alpha + beta * num_nodes + gamma * num_edges`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ComputeModel {
    fn default() -> Self {
        ComputeModel {
            alpha: 1e-3,
            beta: 2e-8,
            gamma: 5e-9,
        }
    }
}

impl ComputeModel {
    pub fn constant(seconds: f64) -> Self {
        ComputeModel {
            alpha: seconds,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    pub fn time(&self, num_nodes: u64, num_edges: u64) -> f64 {
        (self.alpha + self.beta * num_nodes as f64 + self.gamma * num_edges as f64).max(0.0)
    }

    /// Least-squares fit to `(num_nodes, num_edges, seconds)` samples.
    pub fn fit(samples: &[(u64, u64, f64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::invalid(
                "fitting a compute model needs at least 3 samples",
            ));
        }
        let a = DMatrix::from_fn(samples.len(), 3, |r, c| match c {
            0 => 1.0,
            1 => samples[r].0 as f64,
            _ => samples[r].1 as f64,
        });
        let b = DVector::from_iterator(samples.len(), samples.iter().map(|s| s.2));
        let x = a
            .svd(true, true)
            .solve(&b, 1e-12)
            .map_err(|e| Error::invalid(format!("compute model fit failed: {e}")))?;
        Ok(ComputeModel {
            alpha: x[0],
            beta: x[1],
            gamma: x[2],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bytes_costs_base_latency() {
        let m = TransferModel {
            base_latency: 3e-6,
            ..TransferModel::default()
        };
        assert_eq!(m.time(0), 3e-6);
    }

    #[test]
    fn validation_adds_round_trips() {
        let off = TransferModel {
            round_trips: 3,
            rt_latency: 1e-3,
            ..TransferModel::default()
        };
        let on = off.with_validation(true);
        assert_eq!(on.round_trip_overhead(), 3e-3);
        assert!((on.time(1 << 20) - off.time(1 << 20) - 3e-3).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_bytes() {
        let m = TransferModel::default();
        assert!(m.time(1000) < m.time(1001));
    }

    #[test]
    fn bad_parameters() {
        assert!(TransferModel {
            efficiency: 0.0,
            ..TransferModel::default()
        }
        .validate()
        .is_err());
        assert!(TransferModel {
            efficiency: 1.5,
            ..TransferModel::default()
        }
        .validate()
        .is_err());
        assert!(TransferModel {
            bandwidth: 0.0,
            ..TransferModel::default()
        }
        .validate()
        .is_err());
        assert!(TransferModel::default().validate().is_ok());
    }

    #[test]
    fn fit_recovers_affine_model() {
        let truth = ComputeModel {
            alpha: 2e-3,
            beta: 1e-6,
            gamma: 3e-7,
        };
        let samples: Vec<(u64, u64, f64)> = [(100, 900), (5000, 20000), (1200, 4000), (40, 10)]
            .iter()
            .map(|&(n, e)| (n, e, truth.time(n, e)))
            .collect();
        let fit = ComputeModel::fit(&samples).unwrap();
        assert!((fit.alpha - truth.alpha).abs() < 1e-9);
        assert!((fit.beta - truth.beta).abs() < 1e-12);
        assert!((fit.gamma - truth.gamma).abs() < 1e-12);
        assert!(ComputeModel::fit(&samples[..2]).is_err());
    }
}
