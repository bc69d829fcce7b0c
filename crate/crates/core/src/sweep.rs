//! Parameter sweeps over `(family, M, p)` grids and their CSV/JSON output.
//!
//! Grid points are evaluated in parallel and the rows are then sorted by
//! `(witness, order, M, p)`, so the output is byte-identical for any thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{
    binomial_state, hole_burn, vacuum_filtered_binomial, BinomialParams, FockSuperposition,
};
use crate::witnesses::{antibunching, hosps, vogel_det, MonomialBasis, WitnessKind};
use crate::ORDER_CAP;

pub const CSV_HEADER: &str = "family,M,p,hole,witness,order,value,nonclassical,status";

/// Decimal places kept when placing grid points, so `0.1 + 2 * 0.1` prints as `0.3`.
const GRID_DECIMALS: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Binomial,
    VacuumFiltered,
    HoleBurned,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Binomial => "binomial",
            Family::VacuumFiltered => "vacuum_filtered",
            Family::HoleBurned => "hole_burned",
        }
    }

    /// Builds the family member at `(p, M)`; `hole` is only read for [`Family::HoleBurned`].
    pub fn build(&self, params: BinomialParams, hole: Option<usize>) -> Result<FockSuperposition> {
        match self {
            Family::Binomial => Ok(binomial_state(params)),
            Family::VacuumFiltered => vacuum_filtered_binomial(params),
            Family::HoleBurned => {
                let k = hole.ok_or_else(|| {
                    Error::Config("the hole_burned family needs a hole index".into())
                })?;
                hole_burn(&binomial_state(params), k)
            }
        }
    }

    fn hole_column(&self, hole: Option<usize>) -> Option<usize> {
        match self {
            Family::Binomial => None,
            Family::VacuumFiltered => Some(0),
            Family::HoleBurned => hole,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binomial" => Ok(Family::Binomial),
            "vacuum_filtered" => Ok(Family::VacuumFiltered),
            "hole_burned" => Ok(Family::HoleBurned),
            other => Err(Error::Config(format!("unknown state family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisChoice {
    #[default]
    Default,
    Number,
}

impl BasisChoice {
    pub fn basis(&self) -> MonomialBasis {
        match self {
            BasisChoice::Default => MonomialBasis::standard(),
            BasisChoice::Number => MonomialBasis::number(),
        }
    }
}

impl FromStr for BasisChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "default" => Ok(BasisChoice::Default),
            "number" => Ok(BasisChoice::Number),
            other => Err(Error::Config(format!("unknown Vogel basis `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

/// Inclusive grid `start, start + step, ..., <= stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl PGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn single(p: f64) -> Self {
        Self::new(p, p, 1.0)
    }

    fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if !unit.contains(&self.start) || !unit.contains(&self.stop) {
            return Err(Error::Config(format!(
                "p grid {}:{} leaves [0, 1]",
                self.start, self.stop
            )));
        }
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::Config(format!(
                "p grid step {} must be positive",
                self.step
            )));
        }
        if self.stop < self.start {
            return Err(Error::Config(format!(
                "p grid {}:{} is empty",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let scale = 10f64.powi(GRID_DECIMALS);
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| ((self.start + i as f64 * self.step) * scale).round() / scale)
            .filter(|p| (0.0..=1.0).contains(p))
            .collect()
    }
}

impl FromStr for PGrid {
    type Err = Error;

    /// Parses `start:stop:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(Error::Config(format!(
                "p grid `{s}` is not of the form start:stop:step"
            )));
        };
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{v}` in p grid `{s}` is not a number")))
        };
        Ok(PGrid::new(parse(start)?, parse(stop)?, parse(step)?))
    }
}

/// One witness to evaluate at every grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub kind: WitnessKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<BasisChoice>,
}

impl WitnessSpec {
    pub fn antibunching(l: usize) -> Self {
        Self {
            kind: WitnessKind::Antibunching,
            order: Some(l),
            basis: None,
        }
    }

    pub fn hosps(l: usize) -> Self {
        Self {
            kind: WitnessKind::Hosps,
            order: Some(l),
            basis: None,
        }
    }

    pub fn vogel(basis: BasisChoice) -> Self {
        Self {
            kind: WitnessKind::Vogel,
            order: None,
            basis: Some(basis),
        }
    }

    /// Order column as emitted: `l`, or the basis size for Vogel.
    pub fn reported_order(&self) -> usize {
        match self.kind {
            WitnessKind::Vogel => self.basis.unwrap_or_default().basis().len(),
            _ => self.order.unwrap_or(0),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            WitnessKind::Vogel => Ok(()),
            kind => match self.order {
                Some(l) if (2..=ORDER_CAP).contains(&l) => Ok(()),
                Some(l) => Err(Error::Config(format!(
                    "{kind} order {l} must lie in 2..={ORDER_CAP}"
                ))),
                None => Err(Error::Config(format!("{kind} needs an order"))),
            },
        }
    }

    fn evaluate(&self, state: &FockSuperposition) -> Result<f64> {
        let record = match self.kind {
            WitnessKind::Antibunching => antibunching(state, self.reported_order())?,
            WitnessKind::Hosps => hosps(state, self.reported_order())?,
            WitnessKind::Vogel => vogel_det(state, &self.basis.unwrap_or_default().basis())?,
        };
        Ok(record.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hole_index: Option<usize>,
    #[serde(rename = "M_values")]
    pub m_values: Vec<usize>,
    pub p_grid: PGrid,
    pub witnesses: Vec<WitnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad sweep config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.p_grid.validate()?;
        if self.m_values.is_empty() {
            return Err(Error::Config("no M values given".into()));
        }
        if self.witnesses.is_empty() {
            return Err(Error::Config("no witnesses given".into()));
        }
        for w in &self.witnesses {
            w.validate()?;
        }
        match (self.family, self.hole_index) {
            (Family::HoleBurned, None) => {
                return Err(Error::Config(
                    "the hole_burned family needs a hole index".into(),
                ))
            }
            (Family::HoleBurned, Some(k)) => {
                if let Some(&m) = self.m_values.iter().find(|&&m| k > m) {
                    return Err(Error::Config(format!("hole index {k} exceeds M = {m}")));
                }
            }
            (family, Some(_)) => {
                return Err(Error::Config(format!(
                    "a hole index only applies to hole_burned, not {family}"
                )))
            }
            (_, None) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Degenerate,
}

impl RowStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    #[serde(rename = "M")]
    pub m: usize,
    pub p: f64,
    pub hole: Option<usize>,
    pub witness: WitnessKind,
    pub order: usize,
    pub value: Option<f64>,
    pub nonclassical: Option<bool>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn degenerate_count(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == RowStatus::Degenerate)
            .count()
    }
}

/// Runs the sweep on the global rayon pool.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let points = grid_points(config);
    let chunks: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(m, p)| evaluate_point(config, m, p))
        .collect::<Result<_>>()?;
    Ok(assemble(chunks))
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(config: &SweepConfig, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| run_sweep(config))
}

fn grid_points(config: &SweepConfig) -> Vec<(usize, f64)> {
    let ps = config.p_grid.points();
    let mut ms = config.m_values.clone();
    ms.sort_unstable();
    ms.dedup();
    ms.iter()
        .flat_map(|&m| ps.iter().map(move |&p| (m, p)))
        .collect()
}

fn evaluate_point(config: &SweepConfig, m: usize, p: f64) -> Result<Vec<SweepRow>> {
    let params = BinomialParams::new(p, m)?;
    let hole = config.family.hole_column(config.hole_index);
    let state = match config.family.build(params, config.hole_index) {
        Ok(state) => Some(state),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    config
        .witnesses
        .iter()
        .map(|w| {
            let (value, status) = match &state {
                Some(s) => (Some(w.evaluate(s)?), RowStatus::Ok),
                None => (None, RowStatus::Degenerate),
            };
            Ok(SweepRow {
                family: config.family,
                m,
                p,
                hole,
                witness: w.kind,
                order: w.reported_order(),
                value,
                nonclassical: value.map(|v| v < 0.0),
                status,
            })
        })
        .collect()
}

fn assemble(chunks: Vec<Vec<SweepRow>>) -> SweepResult {
    let mut rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.witness
            .as_str()
            .cmp(b.witness.as_str())
            .then(a.order.cmp(&b.order))
            .then(a.m.cmp(&b.m))
            .then(a.p.total_cmp(&b.p))
    });
    rows.dedup();
    SweepResult { rows }
}

/// Formats a witness value with at least 12 significant digits.
///
/// Magnitudes in `[0.1, 1e6)` use 12 fixed decimals; anything else uses
/// scientific notation with a 12-digit mantissa.
pub fn format_value(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let a = v.abs();
    if a == 0.0 || (0.1..1e6).contains(&a) {
        format!("{v:.12}")
    } else {
        format!("{v:.11e}")
    }
}

fn format_row(row: &SweepRow) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.family,
        row.m,
        row.p,
        opt(row.hole.map(|h| h.to_string())),
        row.witness,
        row.order,
        opt(row.value.map(format_value)),
        opt(row.nonclassical.map(|b| b.to_string())),
        row.status.as_str(),
    )
}

pub fn write_csv<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in &result.rows {
        writeln!(out, "{}", format_row(row))?;
    }
    out.flush()
}

pub fn write_json<W: Write>(result: &SweepResult, mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &result.rows)?;
    writeln!(out)?;
    out.flush()
}

pub fn emit<W: Write>(result: &SweepResult, format: OutputFormat, out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(result, out),
        OutputFormat::Json => write_json(result, out),
    }
}

fn optional(s: &str) -> Option<&str> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Parses CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Config(format!("unexpected CSV header {other:?}"))),
    }
    let bad = |line: &str, what: &str| Error::Config(format!("bad {what} in CSV row `{line}`"));
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(bad(line, "field count"));
            }
            Ok(SweepRow {
                family: f[0].parse()?,
                m: f[1].parse().map_err(|_| bad(line, "M"))?,
                p: f[2].parse().map_err(|_| bad(line, "p"))?,
                hole: optional(f[3])
                    .map(str::parse)
                    .transpose()
                    .map_err(|_| bad(line, "hole"))?,
                witness: f[4].parse()?,
                order: f[5].parse().map_err(|_| bad(line, "order"))?,
                value: optional(f[6])
                    .map(str::parse)
                    .transpose()
                    .map_err(|_| bad(line, "value"))?,
                nonclassical: optional(f[7])
                    .map(str::parse)
                    .transpose()
                    .map_err(|_| bad(line, "nonclassical flag"))?,
                status: match f[8] {
                    "ok" => RowStatus::Ok,
                    "degenerate" => RowStatus::Degenerate,
                    _ => return Err(bad(line, "status")),
                },
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { rows })
}

/// A named sweep regenerating the data behind one figure panel.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: SweepConfig,
}

const PRESET_M: [usize; 3] = [5, 10, 15];

fn interior_grid() -> PGrid {
    PGrid::new(0.01, 0.99, 0.01)
}

fn vfb_preset(m_values: Vec<usize>, p_grid: PGrid, witnesses: Vec<WitnessSpec>) -> SweepConfig {
    SweepConfig {
        family: Family::VacuumFiltered,
        hole_index: None,
        m_values,
        p_grid,
        witnesses,
        output_path: None,
        format: OutputFormat::Csv,
    }
}

/// Built-in figure presets. M values and grid steps are representative
/// choices (M in {5, 10, 15}, p step 0.01), not values read off the figures.
pub fn presets() -> Vec<Preset> {
    let m = PRESET_M.to_vec();
    let orders = [2, 3, 4, 5];
    vec![
        Preset {
            name: "fig1a",
            description: "antibunching d(1) vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(
                m.clone(),
                interior_grid(),
                vec![WitnessSpec::antibunching(2)],
            ),
        },
        Preset {
            name: "fig1b",
            description: "antibunching d(2) vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(
                m.clone(),
                interior_grid(),
                vec![WitnessSpec::antibunching(3)],
            ),
        },
        Preset {
            name: "fig1c",
            description: "antibunching d(l-1) vs p for l in 2..=5, vacuum-filtered, M = 10",
            config: vfb_preset(
                vec![10],
                interior_grid(),
                orders
                    .iter()
                    .map(|&l| WitnessSpec::antibunching(l))
                    .collect(),
            ),
        },
        Preset {
            name: "fig2a",
            description: "HOSPS D(1) vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(m.clone(), interior_grid(), vec![WitnessSpec::hosps(2)]),
        },
        Preset {
            name: "fig2b",
            description: "HOSPS D(2) vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(m.clone(), interior_grid(), vec![WitnessSpec::hosps(3)]),
        },
        Preset {
            name: "fig2c",
            description: "HOSPS D(3) vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(m.clone(), interior_grid(), vec![WitnessSpec::hosps(4)]),
        },
        Preset {
            name: "fig2d",
            description: "HOSPS D(l-1) vs p for l in 2..=5, vacuum-filtered, M = 10",
            config: vfb_preset(
                vec![10],
                interior_grid(),
                orders.iter().map(|&l| WitnessSpec::hosps(l)).collect(),
            ),
        },
        Preset {
            name: "fig3a",
            description: "Vogel determinant {1, a, a†} vs p, vacuum-filtered, M in {5,10,15}",
            config: vfb_preset(
                m,
                interior_grid(),
                vec![WitnessSpec::vogel(BasisChoice::Default)],
            ),
        },
        Preset {
            name: "fig3b",
            description: "Vogel determinant {1, a, a†} vs M in 1..=30, vacuum-filtered, p = 0.5",
            config: vfb_preset(
                (1..=30).collect(),
                PGrid::single(0.5),
                vec![WitnessSpec::vogel(BasisChoice::Default)],
            ),
        },
        Preset {
            name: "fig3c",
            description: "Vogel determinant {1, a, a†} vs M in 1..=30, vacuum-filtered, p = 0.9",
            config: vfb_preset(
                (1..=30).collect(),
                PGrid::single(0.9),
                vec![WitnessSpec::vogel(BasisChoice::Default)],
            ),
        },
    ]
}

pub fn preset(name: &str) -> Result<Preset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))
}
