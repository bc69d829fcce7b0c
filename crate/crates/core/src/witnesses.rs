//! Nonclassicality witnesses built from normally-ordered moments.
//!
//! Every witness flags nonclassicality by a strictly negative value.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{mean_photon_number, moment, MomentOrder};
use crate::numerics::{determinant, log_binomial, stirling2};
use crate::states::FockSuperposition;
use crate::ORDER_CAP;

/// Imaginary parts of Vogel-matrix entries above this are rejected.
pub const REALNESS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Antibunching,
    Hosps,
    Vogel,
}

impl WitnessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessKind::Antibunching => "antibunching",
            WitnessKind::Hosps => "hosps",
            WitnessKind::Vogel => "vogel",
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "antibunching" => Ok(WitnessKind::Antibunching),
            "hosps" => Ok(WitnessKind::Hosps),
            "vogel" => Ok(WitnessKind::Vogel),
            other => Err(Error::Config(format!("unknown witness kind `{other}`"))),
        }
    }
}

/// A single witness evaluation.
///
/// `order` is `l` for antibunching and HOSPS, and the basis size for Vogel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub kind: WitnessKind,
    pub order: usize,
    pub value: f64,
    pub nonclassical: bool,
}

impl WitnessRecord {
    pub fn new(kind: WitnessKind, order: usize, value: f64) -> Self {
        Self {
            kind,
            order,
            value,
            nonclassical: value < 0.0,
        }
    }
}

/// Operator monomials `a†^q a^r` indexing the rows and columns of a moment matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    monomials: Vec<(usize, usize)>,
}

impl MonomialBasis {
    pub fn new(monomials: Vec<(usize, usize)>) -> Result<Self> {
        if monomials.first() != Some(&(0, 0)) {
            return Err(Error::Config(
                "a monomial basis must start with the identity (0, 0)".into(),
            ));
        }
        if let Some(&(q, r)) = monomials.iter().find(|&&(q, r)| q.max(r) > ORDER_CAP / 2) {
            return Err(Error::OrderCap {
                order: 2 * q.max(r),
                cap: ORDER_CAP,
            });
        }
        Ok(Self { monomials })
    }

    /// `{1, a, a†}`.
    pub fn standard() -> Self {
        Self {
            monomials: vec![(0, 0), (0, 1), (1, 0)],
        }
    }

    /// `{1, a†a}`; its determinant reduces to `<a†²a²> - <a†a>²`.
    pub fn number() -> Self {
        Self {
            monomials: vec![(0, 0), (1, 1)],
        }
    }

    pub fn monomials(&self) -> &[(usize, usize)] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

impl Default for MonomialBasis {
    fn default() -> Self {
        Self::standard()
    }
}

fn check_order(l: usize) -> Result<()> {
    if l < 2 {
        return Err(Error::ParameterRange(format!(
            "witness order l = {l} must be at least 2"
        )));
    }
    if l > ORDER_CAP {
        return Err(Error::OrderCap {
            order: l,
            cap: ORDER_CAP,
        });
    }
    Ok(())
}

/// `<a†^l a^l> - <a†a>^l` for any `l >= 1`; zero at `l = 1`.
fn antibunching_value(state: &FockSuperposition, l: usize, mean: f64) -> Result<f64> {
    let factorial_moment = moment(state, MomentOrder::diagonal(l)?).re;
    Ok(factorial_moment - mean.powi(l as i32))
}

/// `d_f(l-1) = <a†^l a^l> - <a†a>^l`.
pub fn antibunching(state: &FockSuperposition, l: usize) -> Result<WitnessRecord> {
    check_order(l)?;
    let mean = mean_photon_number(state);
    Ok(WitnessRecord::new(
        WitnessKind::Antibunching,
        l,
        antibunching_value(state, l, mean)?,
    ))
}

/// `D_h(l-1) = sum_{e=0}^{l} sum_{f=1}^{e} S2(e,f) C(l,e) (-1)^e d(f-1) <N>^(l-e)`,
/// where `d(f-1)` is the antibunching value at order `f`.
pub fn hosps(state: &FockSuperposition, l: usize) -> Result<WitnessRecord> {
    check_order(l)?;
    let mean = mean_photon_number(state);
    let d: Vec<f64> = (0..=l)
        .map(|f| {
            if f == 0 {
                Ok(0.0)
            } else {
                antibunching_value(state, f, mean)
            }
        })
        .collect::<Result<_>>()?;

    let mut value = 0.0;
    for e in 1..=l {
        let binom = log_binomial(l, e as i64).exp().round();
        let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
        let mean_power = mean.powi((l - e) as i32);
        let inner: f64 = (1..=e)
            .map(|f| Ok(stirling2(e, f)? as f64 * d[f]))
            .sum::<Result<f64>>()?;
        value += sign * binom * inner * mean_power;
    }
    Ok(WitnessRecord::new(WitnessKind::Hosps, l, value))
}

/// Moment matrix with entry `(k, j) = <a†^(r_k + q_j) a^(q_k + r_j)>` for
/// basis monomials `a†^q a^r`.
pub fn vogel_matrix(state: &FockSuperposition, basis: &MonomialBasis) -> Result<Vec<Vec<f64>>> {
    let monomials = basis.monomials();
    let mut matrix = vec![vec![0.0; monomials.len()]; monomials.len()];
    for (k, &(qk, rk)) in monomials.iter().enumerate() {
        for (j, &(qj, rj)) in monomials.iter().enumerate() {
            let value = moment(state, MomentOrder::new(rk + qj, qk + rj)?);
            if value.im.abs() > REALNESS_TOLERANCE {
                return Err(Error::ComplexMoment {
                    row: k,
                    col: j,
                    imag: value.im,
                });
            }
            matrix[k][j] = value.re;
        }
    }
    Ok(matrix)
}

/// Determinant of [`vogel_matrix`].
pub fn vogel_det(state: &FockSuperposition, basis: &MonomialBasis) -> Result<WitnessRecord> {
    let matrix = vogel_matrix(state, basis)?;
    Ok(WitnessRecord::new(
        WitnessKind::Vogel,
        basis.len(),
        determinant(&matrix)?,
    ))
}
