//! Binomial states and their hole-burned (number-state-filtered) variants.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, CompensatedSum, LogReal};

/// Residual norms at or below this cannot be renormalized.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Allowed deviation of `sum |c_n|^2` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// A normalized pure state `sum_n c_n |n>` truncated at `|M>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSuperposition {
    amplitudes: Vec<Complex64>,
}

impl FockSuperposition {
    /// Wraps an amplitude vector, checking that it is non-empty and normalized.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch(
                "a state needs at least one amplitude".into(),
            ));
        }
        let norm = squared_norm(amplitudes.iter());
        if !norm.is_finite() || (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::ParameterRange(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// The number state `|n>` in a space of dimension `dim`.
    pub fn fock(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::ParameterRange(format!(
                "|{n}> does not fit in dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes
            .get(n)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Largest photon number `M` representable in this state.
    pub fn max_photons(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm_squared(&self) -> f64 {
        squared_norm(self.amplitudes.iter())
    }

    /// Multiplies every amplitude by `e^{i phase}`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = Complex64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.amplitudes.iter().all(|c| c.im == 0.0)
    }

    /// `(n, Re c_n, Im c_n)` for every basis index.
    pub fn amplitude_rows(&self) -> Vec<AmplitudeRow> {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| AmplitudeRow {
                n,
                re: c.re,
                im: c.im,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

fn squared_norm<'a>(amplitudes: impl Iterator<Item = &'a Complex64>) -> f64 {
    amplitudes
        .map(|c| c.norm_sqr())
        .collect::<CompensatedSum>()
        .total()
}

/// Binomial-state parameters: success probability `p` and maximum photon number `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinomialParams {
    p: f64,
    max_photons: usize,
}

impl BinomialParams {
    pub fn new(p: f64, max_photons: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ParameterRange(format!("p = {p} is outside [0, 1]")));
        }
        Ok(Self { p, max_photons })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn max_photons(&self) -> usize {
        self.max_photons
    }

    /// `C(M,n) p^n (1-p)^(M-n)`, in log space.
    pub(crate) fn log_weight(&self, n: usize) -> LogReal {
        let m = self.max_photons;
        if n > m {
            return LogReal::ZERO;
        }
        log_binomial(m, n as i64) * LogReal::powi(self.p, n) * LogReal::powi(1.0 - self.p, m - n)
    }

    /// Weight of the vacuum component, `(1 - p)^M`.
    pub fn vacuum_weight(&self) -> f64 {
        LogReal::powi(1.0 - self.p, self.max_photons).exp()
    }

    /// `1 - (1 - p)^M`, evaluated without cancellation for small `p`.
    pub fn filtered_weight(&self) -> f64 {
        if self.max_photons == 0 {
            return 0.0;
        }
        -(self.max_photons as f64 * (-self.p).ln_1p()).exp_m1()
    }

    /// Squared normalization constant of the vacuum-filtered state,
    /// `N0^2 = 1 / (1 - (1 - p)^M)`.
    pub fn vacuum_filtered_norm_squared(&self) -> Result<f64> {
        let residual = self.filtered_weight();
        if self.p == 0.0 || residual <= DEGENERACY_THRESHOLD {
            return Err(Error::Degenerate(format!(
                "vacuum carries the whole binomial state at p = {}, M = {}",
                self.p, self.max_photons
            )));
        }
        Ok(1.0 / residual)
    }
}

/// `|p, M> = sum_n [C(M,n) p^n (1-p)^(M-n)]^(1/2) |n>`.
pub fn binomial_state(params: BinomialParams) -> FockSuperposition {
    let m = params.max_photons;
    let amplitudes = if params.p == 0.0 || params.p == 1.0 {
        let occupied = if params.p == 0.0 { 0 } else { m };
        (0..=m)
            .map(|n| Complex64::new(if n == occupied { 1.0 } else { 0.0 }, 0.0))
            .collect()
    } else {
        (0..=m)
            .map(|n| Complex64::new(params.log_weight(n).sqrt().exp(), 0.0))
            .collect()
    };
    FockSuperposition { amplitudes }
}

/// Removes `|k>` from `state` and renormalizes what is left.
pub fn hole_burn(state: &FockSuperposition, k: usize) -> Result<FockSuperposition> {
    if k > state.max_photons() {
        return Err(Error::ParameterRange(format!(
            "hole index {k} exceeds the maximum photon number {}",
            state.max_photons()
        )));
    }
    let residual = squared_norm(
        state
            .amplitudes
            .iter()
            .enumerate()
            .filter(|&(n, _)| n != k)
            .map(|(_, c)| c),
    );
    if residual <= DEGENERACY_THRESHOLD {
        return Err(Error::Degenerate(format!(
            "burning |{k}> leaves residual norm {residual:e}"
        )));
    }
    let scale = residual.sqrt().recip();
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n == k {
                Complex64::new(0.0, 0.0)
            } else {
                c * scale
            }
        })
        .collect();
    Ok(FockSuperposition { amplitudes })
}

/// Binomial state with the vacuum removed, normalized by the closed-form `N0`.
pub fn vacuum_filtered_binomial(params: BinomialParams) -> Result<FockSuperposition> {
    if params.max_photons == 0 {
        return Err(Error::Degenerate(
            "M = 0 leaves only the vacuum to filter".into(),
        ));
    }
    let norm_squared = LogReal::from_value(params.vacuum_filtered_norm_squared()?);
    let m = params.max_photons;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); m + 1];
    if params.p == 1.0 {
        amplitudes[m] = Complex64::new(1.0, 0.0);
    } else {
        for (n, c) in amplitudes.iter_mut().enumerate().skip(1) {
            *c = Complex64::new((norm_squared * params.log_weight(n)).sqrt().exp(), 0.0);
        }
    }
    Ok(FockSuperposition { amplitudes })
}

/// Photon-number distribution `|c_n|^2`.
pub fn photon_distribution(state: &FockSuperposition) -> Vec<f64> {
    state.amplitudes.iter().map(|c| c.norm_sqr()).collect()
}
