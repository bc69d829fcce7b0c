//! Normally-ordered moments `<a†^t a^r>`.
//!
//! [`moment`] is the general route: a direct sum over the Fock basis valid for
//! any [`FockSuperposition`]. [`moment_closed_form_vfb`] specializes that sum
//! to the vacuum-filtered binomial state in closed form, using only the state
//! parameters; the two must agree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, log_falling_factorial, CompensatedSum, LogReal};
use crate::states::{BinomialParams, FockSuperposition};
use crate::ORDER_CAP;

/// Selects `<a†^t a^r>`: `t` creation and `r` annihilation operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MomentOrder {
    t: usize,
    r: usize,
}

impl MomentOrder {
    pub fn new(t: usize, r: usize) -> Result<Self> {
        let order = t.max(r);
        if order > ORDER_CAP {
            return Err(Error::OrderCap {
                order,
                cap: ORDER_CAP,
            });
        }
        Ok(Self { t, r })
    }

    /// `<a†^l a^l>`.
    pub fn diagonal(l: usize) -> Result<Self> {
        Self::new(l, l)
    }

    pub fn creation(&self) -> usize {
        self.t
    }

    pub fn annihilation(&self) -> usize {
        self.r
    }
}

/// `<psi| a†^t a^r |psi> = sum_n conj(c_{n-r+t}) c_n sqrt(n!/(n-r)!) sqrt((n-r+t)!/(n-r)!)`.
///
/// Terms are accumulated in ascending `n` with compensated summation.
pub fn moment(state: &FockSuperposition, order: MomentOrder) -> Complex64 {
    let (t, r) = (order.t, order.r);
    let m = state.max_photons();
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for n in r..=m {
        let target = n - r + t;
        if target > m {
            break;
        }
        let c_n = state.amplitude(n);
        let c_target = state.amplitude(target);
        if c_n == Complex64::new(0.0, 0.0) || c_target == Complex64::new(0.0, 0.0) {
            continue;
        }
        let factor = (log_falling_factorial(n, r) * log_falling_factorial(target, t))
            .sqrt()
            .exp();
        let term = c_target.conj() * c_n * factor;
        re.add(term.re);
        im.add(term.im);
    }
    Complex64::new(re.total(), im.total())
}

/// Closed form of `<a†^t a^r>` for the vacuum-filtered binomial state:
///
/// `N0^2 sum_n [C(M,n) C(M,n') p^(n+n') (1-p)^(2M-n-n') n!/(n-r)! n'!/(n'-t)!]^(1/2)`
///
/// with `n' = n - r + t` and both `n, n' >= 1`, since the vacuum amplitude is
/// removed. `N0^2 = 1 / (1 - (1-p)^M)`.
pub fn moment_closed_form_vfb(params: BinomialParams, order: MomentOrder) -> Result<f64> {
    let big_m = params.max_photons();
    if big_m == 0 {
        return Err(Error::Degenerate(
            "M = 0 leaves only the vacuum to filter".into(),
        ));
    }
    let norm_squared = params.vacuum_filtered_norm_squared()?;
    let (t, r) = (order.t, order.r);
    let p = params.p();

    let lower = r.max(1).max((1 + r).saturating_sub(t));
    let upper = if t > r {
        big_m - (t - r).min(big_m)
    } else {
        big_m
    };

    let mut acc = CompensatedSum::new();
    for n in lower..=upper {
        let target = n + t - r;
        let log_term = log_binomial(big_m, n as i64)
            * log_binomial(big_m, target as i64)
            * LogReal::powi(p, n + target)
            * LogReal::powi(1.0 - p, 2 * big_m - n - target)
            * log_falling_factorial(n, r)
            * log_falling_factorial(target, t);
        acc.add(log_term.sqrt().exp());
    }
    Ok(norm_squared * acc.total())
}

/// `<a† a>`; the imaginary part of the underlying moment is discarded.
pub fn mean_photon_number(state: &FockSuperposition) -> f64 {
    let n = moment(state, MomentOrder { t: 1, r: 1 });
    debug_assert!(n.im.abs() <= 1e-12, "<a†a> has imaginary part {}", n.im);
    n.re
}
