//! Actual time-cost of circuits under duration-controlled or
//! intensity-controlled rotations.
//!
//! Relative costs are exact dyadic rationals in units of `t_unit`. Seconds
//! and tesla only appear at the reporting boundary. In duration control a
//! rotation by `theta` takes time proportional to `|theta|` (taken in
//! `(-pi, pi]`); in intensity control every gate takes one unit and the
//! field strength carries the angle instead.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Serialize, Serializer};

use crate::circuit_ir::{Circuit, Gate};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::route::{cancel_swaps, route_lnn, RoutingStrategy};
use crate::synth::{build_aqft, build_qft, lower_swap, XorMode};

/// Which physical knob sets the rotation angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ControlMode {
    /// Fixed field, angle set by pulse length.
    DurationControl,
    /// Fixed pulse length, angle set by field strength.
    IntensityControl,
}

impl fmt::Display for ControlMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ControlMode::DurationControl => "duration",
            ControlMode::IntensityControl => "intensity",
        })
    }
}

impl FromStr for ControlMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "duration" => Ok(ControlMode::DurationControl),
            "intensity" => Ok(ControlMode::IntensityControl),
            _ => Err(Error::Parse(format!(
                "unknown mode {s:?}; expected duration or intensity"
            ))),
        }
    }
}

/// Which rotation time is taken as one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitPolicy {
    /// `t_unit = tau_0`, the time of a rotation by `pi`.
    TauZero,
    /// `t_unit = tau_{n-1}`, the time of the smallest QFT rotation
    /// `pi / 2^(n-1)` for the circuit width `n`.
    TauNMinusOne,
    /// `t_unit = tau_j` for a fixed reference angle `pi / 2^j`.
    Custom(u64),
}

impl UnitPolicy {
    /// `e` such that the unit angle is `pi / 2^e` for an `n`-qubit circuit.
    fn unit_exponent(self, n: usize) -> u64 {
        match self {
            UnitPolicy::TauZero => 0,
            UnitPolicy::TauNMinusOne => n.saturating_sub(1) as u64,
            UnitPolicy::Custom(j) => j,
        }
    }
}

impl fmt::Display for UnitPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitPolicy::TauZero => f.write_str("tau0"),
            UnitPolicy::TauNMinusOne => f.write_str("tauN"),
            UnitPolicy::Custom(j) => write!(f, "custom:{j}"),
        }
    }
}

impl FromStr for UnitPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau0" => Ok(UnitPolicy::TauZero),
            "tauN" => Ok(UnitPolicy::TauNMinusOne),
            _ => s
                .strip_prefix("custom:")
                .and_then(|j| j.parse().ok())
                .map(UnitPolicy::Custom)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown policy {s:?}; expected tau0, tauN or custom:<j>"
                    ))
                }),
        }
    }
}

/// Strongest field treated as attainable when flagging intensity
/// requirements, in tesla.
pub const DEFAULT_FEASIBLE_FIELD_TESLA: f64 = 45.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HardwareModel {
    pub mode: ControlMode,
    pub unit_policy: UnitPolicy,
    /// Time resolution of the control field, seconds.
    pub t_res: f64,
    /// Time of a rotation by `pi` at the reference field (`tau_0`), seconds.
    /// In intensity control this is the common duration of every gate.
    pub t_ref: f64,
    /// Cost of H, Xor, Swap and `Ry(+-pi/2)` in units of `t_unit`
    /// (duration control only).
    pub fixed_gate_cost: Dyadic,
    /// Field realizing the smallest rotation, tesla.
    pub b_min: Option<f64>,
    pub b_feasible_max: f64,
}

impl Default for HardwareModel {
    fn default() -> Self {
        HardwareModel {
            mode: ControlMode::DurationControl,
            unit_policy: UnitPolicy::TauNMinusOne,
            t_res: 1e-6,
            t_ref: 1e-3,
            fixed_gate_cost: Dyadic::zero(),
            b_min: None,
            b_feasible_max: DEFAULT_FEASIBLE_FIELD_TESLA,
        }
    }
}

impl HardwareModel {
    pub fn new(mode: ControlMode, unit_policy: UnitPolicy) -> Self {
        HardwareModel {
            mode,
            unit_policy,
            ..HardwareModel::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.t_res) {
            return Err(Error::InvalidArgument(format!(
                "t_R must be > 0, got {}",
                self.t_res
            )));
        }
        if !positive(self.t_ref) {
            return Err(Error::InvalidArgument(format!(
                "t_ref must be > 0, got {}",
                self.t_ref
            )));
        }
        if self.fixed_gate_cost.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "fixed gate cost must be >= 0, got {}",
                self.fixed_gate_cost
            )));
        }
        if let Some(b) = self.b_min {
            if !positive(b) {
                return Err(Error::InvalidArgument(format!(
                    "B_min must be > 0, got {b}"
                )));
            }
        }
        Ok(())
    }

    /// Length of one unit in seconds, exact.
    ///
    /// `TauNMinusOne` pins the smallest rotation at the resolution limit,
    /// `tau_{n-1} = t_R`, with the field lowered as `n` grows.
    pub fn t_unit_seconds(&self) -> Dyadic {
        let exact = |v: f64| Dyadic::from_f64(v).expect("validated finite");
        match (self.mode, self.unit_policy) {
            (ControlMode::IntensityControl, _) => exact(self.t_ref),
            (_, UnitPolicy::TauZero) => exact(self.t_ref),
            (_, UnitPolicy::TauNMinusOne) => exact(self.t_res),
            (_, UnitPolicy::Custom(j)) => exact(self.t_ref).mul_pow2(-(j as i64)),
        }
    }

    /// Largest feasible register at a fixed field, when that bound exists.
    pub fn qubit_ceiling(&self) -> Option<u64> {
        match (self.mode, self.unit_policy) {
            (ControlMode::DurationControl, UnitPolicy::TauZero | UnitPolicy::Custom(_)) => {
                Some(max_feasible_qubits(self, self.t_ref).unwrap_or(0))
            }
            _ => None,
        }
    }
}

/// Accounting bucket of a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateClass {
    ControlledRotation,
    SingleQubitRotation,
    Fixed,
    Swap,
}

pub fn gate_class(gate: &Gate) -> GateClass {
    match gate {
        Gate::CPhase { .. } | Gate::Ising { .. } => GateClass::ControlledRotation,
        Gate::Rz(..) | Gate::GlobalPhase(..) => GateClass::SingleQubitRotation,
        Gate::Ry(_, a) if a.reduced_magnitude() == Dyadic::new(1, 1) => GateClass::Fixed,
        Gate::Ry(..) => GateClass::SingleQubitRotation,
        Gate::H(_) | Gate::Xor { .. } => GateClass::Fixed,
        Gate::Swap(..) => GateClass::Swap,
    }
}

/// Duration of one gate in units of `t_unit` for an `n`-qubit circuit.
pub fn gate_duration(gate: &Gate, model: &HardwareModel, n: usize) -> Dyadic {
    if model.mode == ControlMode::IntensityControl {
        return Dyadic::one();
    }
    match (gate_class(gate), gate.angle()) {
        (GateClass::Fixed | GateClass::Swap, _) => model.fixed_gate_cost.clone(),
        (_, Some(angle)) => angle
            .reduced_magnitude()
            .mul_pow2(model.unit_policy.unit_exponent(n) as i64),
        (_, None) => unreachable!("rotation classes always carry an angle"),
    }
}

fn fmt15<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.14e}"))
}

fn fmt15_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => fmt15(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Breakdown {
    pub controlled_rotation: Dyadic,
    pub single_qubit_rotation: Dyadic,
    pub fixed_gates: Dyadic,
    pub swap: Dyadic,
}

impl Breakdown {
    fn add(&mut self, class: GateClass, d: &Dyadic) {
        let slot = match class {
            GateClass::ControlledRotation => &mut self.controlled_rotation,
            GateClass::SingleQubitRotation => &mut self.single_qubit_rotation,
            GateClass::Fixed => &mut self.fixed_gates,
            GateClass::Swap => &mut self.swap,
        };
        *slot = &*slot + d;
    }

    pub fn total(&self) -> Dyadic {
        [
            &self.controlled_rotation,
            &self.single_qubit_rotation,
            &self.fixed_gates,
            &self.swap,
        ]
        .into_iter()
        .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub n: usize,
    pub mode: String,
    pub policy: String,
    /// Sum of all gate durations, units of `t_unit`.
    pub total_relative: Dyadic,
    #[serde(serialize_with = "fmt15")]
    pub total_seconds: f64,
    pub breakdown: Breakdown,
    /// Swap cost if every swap ran as its elementary exchange sequence
    /// instead of at the fixed gate cost.
    pub swap_as_elementary: Dyadic,
    /// Shortest nonzero gate duration, units of `t_unit`.
    pub min_duration: Option<Dyadic>,
    /// Every nonzero gate duration is at least `t_R`.
    pub feasible: bool,
    pub n_b: Option<u64>,
    /// Largest over smallest rotation angle, i.e. `B_max / B_min`, when
    /// exact (intensity control).
    pub intensity_ratio: Option<Dyadic>,
    #[serde(serialize_with = "fmt15_opt")]
    pub b_max_tesla: Option<f64>,
    pub field_feasible: Option<bool>,
}

impl CostReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

fn is_feasible(min_duration: Option<&Dyadic>, model: &HardwareModel) -> bool {
    let t_res = Dyadic::from_f64(model.t_res).expect("validated finite");
    match min_duration {
        None => true,
        Some(d) => d * &model.t_unit_seconds() >= t_res,
    }
}

fn swap_elementary_cost(model: &HardwareModel, n: usize) -> Dyadic {
    let lowered = lower_swap(0, 1, XorMode::Physical).expect("distinct qubits");
    lowered
        .gates()
        .iter()
        .map(|g| gate_duration(g, model, n))
        .sum()
}

/// Exact cost of `circuit` under `model`, with per-class subtotals and the
/// time-resolution feasibility check.
pub fn circuit_cost(circuit: &Circuit, model: &HardwareModel) -> Result<CostReport> {
    model.validate()?;
    let n = circuit.num_qubits();
    let mut breakdown = Breakdown::default();
    let mut min_duration: Option<Dyadic> = None;
    let mut angle_range: Option<(Dyadic, Dyadic)> = None;
    let mut swaps = 0usize;

    for g in circuit.gates() {
        let d = gate_duration(g, model, n);
        let class = gate_class(g);
        breakdown.add(class, &d);
        if class == GateClass::Swap {
            swaps += 1;
        }
        if !d.is_zero() && min_duration.as_ref().is_none_or(|m| &d < m) {
            min_duration = Some(d);
        }
        if let Some(a) = g.angle() {
            let mag = a.reduced_magnitude();
            if !mag.is_zero() {
                angle_range = Some(match angle_range {
                    None => (mag.clone(), mag),
                    Some((lo, hi)) => (lo.min(mag.clone()), hi.max(mag)),
                });
            }
        }
    }

    let total_relative = breakdown.total();
    let total_seconds = (&total_relative * &model.t_unit_seconds()).to_f64();
    let feasible = is_feasible(min_duration.as_ref(), model);
    let swap_as_elementary = &swap_elementary_cost(model, n) * &Dyadic::from_int(swaps);

    let (intensity_ratio, b_max_tesla, field_feasible) = match model.mode {
        ControlMode::IntensityControl => {
            let ratio = angle_range
                .as_ref()
                .and_then(|(lo, hi)| lo.as_power_of_two().map(|e| hi.mul_pow2(-e)));
            let ratio_f64 = angle_range
                .as_ref()
                .map(|(lo, hi)| hi.to_f64() / lo.to_f64())
                .unwrap_or(1.0);
            let b_max = model.b_min.map(|b| b * ratio_f64);
            let ok = b_max.map(|b| b <= model.b_feasible_max);
            let ratio = if angle_range.is_none() {
                Some(Dyadic::one())
            } else {
                ratio
            };
            (ratio, b_max, ok)
        }
        ControlMode::DurationControl => (None, None, None),
    };

    Ok(CostReport {
        n,
        mode: model.mode.to_string(),
        policy: model.unit_policy.to_string(),
        total_relative,
        total_seconds,
        breakdown,
        swap_as_elementary,
        min_duration,
        feasible,
        n_b: model.qubit_ceiling(),
        intensity_ratio,
        b_max_tesla,
        field_feasible,
    })
}

/// Sum over QFT rotations at distances `1..max_distance` of `(n - d) 2^(e - d)`.
fn rotation_sum(n: usize, max_distance: usize, unit_exp: u64) -> Dyadic {
    (1..max_distance.min(n))
        .map(|d| Dyadic::from_int((n - d) as u64).mul_pow2(unit_exp as i64 - d as i64))
        .sum()
}

/// Controlled-rotation cost of the exact QFT in closed form:
/// `n + 2^(1-n) - 2` for `TauZero` and `(n-2) 2^(n-1) + 1` for
/// `TauNMinusOne`; `Custom(j)` scales the `TauZero` value by `2^j`.
pub fn qft_cost_closed_form(n: usize, policy: UnitPolicy) -> Result<Dyadic> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "QFT needs at least one qubit".into(),
        ));
    }
    let n_int = BigInt::from(n);
    let tau_zero =
        || &(&Dyadic::from_int(n_int.clone()) + &Dyadic::pow2(1 - n as i64)) - &Dyadic::from_int(2);
    Ok(match policy {
        UnitPolicy::TauZero => tau_zero(),
        UnitPolicy::TauNMinusOne => {
            // (n-2) * 2^(n-1) + 1, negative first factor only at n = 1
            let lead = Dyadic::from_int(&n_int - 2).mul_pow2(n as i64 - 1);
            &lead + &Dyadic::one()
        }
        UnitPolicy::Custom(j) => tau_zero().mul_pow2(j as i64),
    })
}

/// Largest `n` with `tau_0 / 2^(n-1) >= t_R`, found by exact comparison of
/// the two times as dyadic rationals.
pub fn max_feasible_qubits(model: &HardwareModel, tau0_seconds: f64) -> Result<u64> {
    if !(tau0_seconds.is_finite() && tau0_seconds > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tau_0 must be > 0, got {tau0_seconds}"
        )));
    }
    if !(model.t_res.is_finite() && model.t_res > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "t_R must be > 0, got {}",
            model.t_res
        )));
    }
    let tau0 = Dyadic::from_f64(tau0_seconds).expect("finite");
    let t_res = Dyadic::from_f64(model.t_res).expect("finite");
    if tau0 < t_res {
        return Err(Error::Infeasible(format!(
            "tau_0 = {tau0_seconds} s is below the time resolution t_R = {} s",
            model.t_res
        )));
    }
    // tau0 / t_res = p / q with integers p, q
    let p = tau0.numerator().magnitude() << t_res.log2_den();
    let q = t_res.numerator().magnitude() << tau0.log2_den();
    // largest k with q * 2^k <= p; p >= q so k >= 0
    let mut k = p.bits() - q.bits();
    if (&q << k) > p {
        k -= 1;
    }
    Ok(k + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityRequirement {
    /// `theta_0 / theta_{n-1} = 2^(n-1)`.
    pub ratio: BigUint,
    pub b_max_tesla: f64,
}

/// Field needed for the largest QFT rotation when the smallest one is
/// realized by `b_min_tesla`.
pub fn intensity_requirement(n: usize, b_min_tesla: f64) -> Result<IntensityRequirement> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "QFT needs at least one qubit".into(),
        ));
    }
    if !(b_min_tesla.is_finite() && b_min_tesla > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "B_min must be > 0, got {b_min_tesla}"
        )));
    }
    let ratio = BigUint::one() << (n - 1);
    let b_max_tesla = Dyadic::from_f64(b_min_tesla)
        .expect("finite")
        .mul_pow2(n as i64 - 1)
        .to_f64();
    Ok(IntensityRequirement { ratio, b_max_tesla })
}

/// Which circuit family a cost curve tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    Qft,
    /// AQFT with distance cutoff `m`, capped at `n` for small registers.
    Aqft(usize),
    /// QFT routed with the default strategy and swap-reduced.
    QftRoutedReduced,
}

/// Largest register for curve kinds that materialize the circuit.
pub const MATERIALIZED_CAP: usize = 64;
/// Largest register for closed-form curve kinds.
pub const CLOSED_FORM_CAP: usize = 4096;

impl CurveKind {
    fn cap(self) -> usize {
        match self {
            CurveKind::QftRoutedReduced => MATERIALIZED_CAP,
            _ => CLOSED_FORM_CAP,
        }
    }

    fn distance(self, n: usize) -> usize {
        match self {
            CurveKind::Aqft(m) => m.min(n),
            _ => n,
        }
    }

    /// The circuit the row describes, without bit reversal.
    pub fn materialize(self, n: usize) -> Result<Circuit> {
        match self {
            CurveKind::Qft => build_qft(n, false),
            CurveKind::Aqft(_) => build_aqft(n, self.distance(n), false),
            CurveKind::QftRoutedReduced => {
                let qft = build_qft(n, false)?;
                Ok(cancel_swaps(&route_lnn(&qft, RoutingStrategy::default())).circuit)
            }
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::Qft => f.write_str("qft"),
            CurveKind::Aqft(m) => write!(f, "aqft:{m}"),
            CurveKind::QftRoutedReduced => f.write_str("qft-routed-reduced"),
        }
    }
}

impl FromStr for CurveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qft" => Ok(CurveKind::Qft),
            "qft-routed-reduced" => Ok(CurveKind::QftRoutedReduced),
            _ => s
                .strip_prefix("aqft:")
                .and_then(|m| m.parse().ok())
                .filter(|&m| m >= 1)
                .map(CurveKind::Aqft)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown circuit {s:?}; expected qft, aqft:<m> or qft-routed-reduced"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveRow {
    pub n: usize,
    pub relative_cost: Dyadic,
    pub feasible: bool,
    pub n_b: Option<u64>,
    pub policy: String,
    pub mode: String,
    pub circuit: String,
}

fn closed_form_row(n: usize, model: &HardwareModel, kind: CurveKind) -> CurveRow {
    let m = kind.distance(n);
    let rotations: usize = (1..m).map(|d| n - d).sum();
    let (total, min_duration) = match model.mode {
        ControlMode::IntensityControl => (Dyadic::from_int(n + rotations), Some(Dyadic::one())),
        ControlMode::DurationControl => {
            let e = model.unit_policy.unit_exponent(n);
            let fixed = &model.fixed_gate_cost * &Dyadic::from_int(n);
            let total = &rotation_sum(n, m, e) + &fixed;
            // smallest rotation is theta_{m-1}; Hadamards cost the fixed amount
            let smallest = (m >= 2).then(|| Dyadic::pow2(e as i64 - (m as i64 - 1)));
            let fixed_unit = Some(model.fixed_gate_cost.clone()).filter(|d| !d.is_zero());
            let min = match (smallest, fixed_unit) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            (total, min)
        }
    };
    CurveRow {
        n,
        relative_cost: total,
        feasible: is_feasible(min_duration.as_ref(), model),
        n_b: model.qubit_ceiling(),
        policy: model.unit_policy.to_string(),
        mode: model.mode.to_string(),
        circuit: kind.to_string(),
    }
}

fn materialized_row(n: usize, model: &HardwareModel, kind: CurveKind) -> Result<CurveRow> {
    let report = circuit_cost(&kind.materialize(n)?, model)?;
    Ok(CurveRow {
        n,
        relative_cost: report.total_relative,
        feasible: report.feasible,
        n_b: report.n_b,
        policy: report.policy,
        mode: report.mode,
        circuit: kind.to_string(),
    })
}

/// Cost row computed by building the circuit and summing gate durations.
/// Agrees exactly with the closed-form row for `Qft` and `Aqft`.
pub fn materialized_curve_row(
    n: usize,
    model: &HardwareModel,
    kind: CurveKind,
) -> Result<CurveRow> {
    model.validate()?;
    if n == 0 || n > MATERIALIZED_CAP {
        return Err(Error::InvalidArgument(format!(
            "materialized rows need 1 <= n <= {MATERIALIZED_CAP}, got {n}"
        )));
    }
    materialized_row(n, model, kind)
}

pub fn cost_curve(
    n_min: usize,
    n_max: usize,
    model: &HardwareModel,
    kind: CurveKind,
) -> Result<Vec<CurveRow>> {
    cost_curve_with(n_min, n_max, model, kind, Execution::default())
}

/// One row per `n` in `n_min..=n_max`, ordered by `n`. QFT and AQFT rows use
/// closed forms; routed rows build and route each circuit. Rows are
/// independent and evaluated in parallel when `exec` allows.
pub fn cost_curve_with(
    n_min: usize,
    n_max: usize,
    model: &HardwareModel,
    kind: CurveKind,
    exec: Execution,
) -> Result<Vec<CurveRow>> {
    model.validate()?;
    if n_min == 0 || n_min > n_max {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= n_min <= n_max, got {n_min}..{n_max}"
        )));
    }
    if n_max > kind.cap() {
        return Err(Error::InvalidArgument(format!(
            "{kind} curves are limited to n <= {}, got {n_max}",
            kind.cap()
        )));
    }
    let ns: Vec<usize> = (n_min..=n_max).collect();
    exec.map_slice(&ns, |&n| match kind {
        CurveKind::QftRoutedReduced => materialized_row(n, model, kind),
        _ => Ok(closed_form_row(n, model, kind)),
    })
    .into_iter()
    .collect()
}

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "relative_cost",
    "feasible",
    "n_b",
    "policy",
    "mode",
    "circuit",
];

/// Writes rows as `n,relative_cost,feasible,n_b,policy,mode,circuit`. An
/// unbounded `n_b` is written as `unbounded`.
pub fn write_curve_csv<W: Write>(rows: &[CurveRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        let n_b = r
            .n_b
            .map_or_else(|| "unbounded".to_string(), |v| v.to_string());
        w.write_record([
            r.n.to_string(),
            r.relative_cost.to_decimal_string(),
            r.feasible.to_string(),
            n_b,
            r.policy.clone(),
            r.mode.clone(),
            r.circuit.clone(),
        ])
        .map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit_ir::{random_circuit, DyadicAngle};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn duration(policy: UnitPolicy) -> HardwareModel {
        HardwareModel::new(ControlMode::DurationControl, policy)
    }

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    /// Oracle: brute-force double sum over (j, k) pairs of 2^(e + j - k).
    fn brute_force(n: usize, unit_exp: i64) -> Dyadic {
        let mut total = Dyadic::zero();
        for j in 0..n {
            for k in (j + 1)..n {
                total = &total + &Dyadic::pow2(unit_exp + j as i64 - k as i64);
            }
        }
        total
    }

    #[test]
    fn gate_duration_examples() {
        let m0 = duration(UnitPolicy::TauZero);
        assert_eq!(
            gate_duration(&Gate::cphase(0, 1, DyadicAngle::theta(0)), &m0, 3),
            Dyadic::one()
        );
        for (j, k) in [(0, 1), (0, 4), (2, 7)] {
            let g = Gate::cphase(j, k, DyadicAngle::theta((k - j) as u64));
            assert_eq!(gate_duration(&g, &m0, 8), Dyadic::pow2(j as i64 - k as i64));
            let mn = duration(UnitPolicy::TauNMinusOne);
            assert_eq!(
                gate_duration(&g, &mn, 8),
                Dyadic::pow2(7 + j as i64 - k as i64)
            );
        }
        let intensity = HardwareModel::new(ControlMode::IntensityControl, UnitPolicy::TauZero);
        assert_eq!(gate_duration(&Gate::H(0), &intensity, 2), Dyadic::one());
    }

    #[test]
    fn negative_angles_cost_their_magnitude() {
        let m = duration(UnitPolicy::TauZero);
        let pos = gate_duration(&Gate::Rz(0, DyadicAngle::theta(1)), &m, 1);
        let neg = gate_duration(&Gate::Rz(0, -DyadicAngle::theta(1)), &m, 1);
        assert_eq!(pos, neg);
        // 3pi/2 is the same rotation as -pi/2
        let wrapped = gate_duration(&Gate::Rz(0, DyadicAngle::new(3, 1).unwrap()), &m, 1);
        assert_eq!(wrapped, pos);
    }

    #[test]
    fn gate_classes() {
        assert_eq!(
            gate_class(&Gate::Ry(0, DyadicAngle::theta(1))),
            GateClass::Fixed
        );
        assert_eq!(
            gate_class(&Gate::Ry(0, -DyadicAngle::theta(1))),
            GateClass::Fixed
        );
        assert_eq!(
            gate_class(&Gate::Ry(0, DyadicAngle::theta(3))),
            GateClass::SingleQubitRotation
        );
        assert_eq!(
            gate_class(&Gate::ising(0, 1, DyadicAngle::theta(2))),
            GateClass::ControlledRotation
        );
        assert_eq!(gate_class(&Gate::Swap(0, 1)), GateClass::Swap);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(
            qft_cost_closed_form(2, UnitPolicy::TauZero).unwrap(),
            d("0.5")
        );
        assert_eq!(
            qft_cost_closed_form(5, UnitPolicy::TauNMinusOne).unwrap(),
            Dyadic::from_int(49)
        );
        assert_eq!(brute_force(5, 4), Dyadic::from_int(49));
        for p in [
            UnitPolicy::TauZero,
            UnitPolicy::TauNMinusOne,
            UnitPolicy::Custom(3),
        ] {
            assert_eq!(qft_cost_closed_form(1, p).unwrap(), Dyadic::zero());
        }
        assert!(qft_cost_closed_form(0, UnitPolicy::TauZero).is_err());
    }

    #[test]
    fn closed_form_matches_brute_force_and_circuit() {
        for n in 2..=16 {
            let c = build_qft(n, false).unwrap();
            for (policy, e) in [
                (UnitPolicy::TauZero, 0i64),
                (UnitPolicy::TauNMinusOne, n as i64 - 1),
                (UnitPolicy::Custom(5), 5),
            ] {
                let closed = qft_cost_closed_form(n, policy).unwrap();
                assert_eq!(closed, brute_force(n, e), "n={n} {policy}");
                let report = circuit_cost(&c, &duration(policy)).unwrap();
                assert_eq!(report.breakdown.controlled_rotation, closed);
                assert_eq!(report.total_relative, report.breakdown.total());
            }
        }
    }

    #[test]
    fn closed_form_is_strictly_increasing() {
        for p in [UnitPolicy::TauZero, UnitPolicy::TauNMinusOne] {
            let v: Vec<Dyadic> = (2..=40)
                .map(|n| qft_cost_closed_form(n, p).unwrap())
                .collect();
            assert!(v.windows(2).all(|w| w[0] < w[1]), "{p}");
        }
    }

    #[test]
    fn intensity_total_is_gate_count() {
        let m = HardwareModel::new(ControlMode::IntensityControl, UnitPolicy::TauNMinusOne);
        let r = circuit_cost(&build_qft(5, false).unwrap(), &m).unwrap();
        assert_eq!(r.total_relative, Dyadic::from_int(15));
        // the circuit's widest rotation is theta_1, so the span is 2^(n-2)
        assert_eq!(r.intensity_ratio, Some(Dyadic::from_int(8)));
    }

    #[test]
    fn ratio_law() {
        let m = duration(UnitPolicy::Custom(2));
        for a in 0..12u64 {
            for b in 0..12u64 {
                let da = gate_duration(&Gate::cphase(0, 1, DyadicAngle::theta(a)), &m, 4);
                let db = gate_duration(&Gate::cphase(0, 1, DyadicAngle::theta(b)), &m, 4);
                assert_eq!(da, db.mul_pow2(b as i64 - a as i64));
            }
        }
    }

    #[test]
    fn policy_consistency_on_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for i in 0..200 {
            let n = 1 + i % 8;
            let c = random_circuit(n, 25, &mut rng);
            let t0 = circuit_cost(&c, &duration(UnitPolicy::TauZero)).unwrap();
            let tn = circuit_cost(&c, &duration(UnitPolicy::TauNMinusOne)).unwrap();
            assert_eq!(tn.total_relative, t0.total_relative.mul_pow2(n as i64 - 1));
            assert_eq!(t0.total_relative, t0.breakdown.total());
        }
    }

    #[test]
    fn feasibility_tracks_resolution() {
        // tau_0 = 1 ms, t_R = 1 us: theta_9 takes ~1.95 us, theta_10 ~0.98 us
        let mut m = duration(UnitPolicy::TauZero);
        m.t_ref = 1e-3;
        m.t_res = 1e-6;
        assert!(
            circuit_cost(&build_qft(10, false).unwrap(), &m)
                .unwrap()
                .feasible
        );
        assert!(
            !circuit_cost(&build_qft(11, false).unwrap(), &m)
                .unwrap()
                .feasible
        );
        assert_eq!(m.qubit_ceiling(), Some(10));

        // pinning tau_{n-1} at t_R keeps every width feasible
        let mn = duration(UnitPolicy::TauNMinusOne);
        assert!(
            circuit_cost(&build_qft(40, false).unwrap(), &mn)
                .unwrap()
                .feasible
        );
        assert_eq!(mn.qubit_ceiling(), None);
    }

    #[test]
    fn fixed_gate_cost_lands_in_its_bucket() {
        let mut m = duration(UnitPolicy::TauZero);
        m.fixed_gate_cost = d("0.25");
        let r = circuit_cost(&build_qft(4, true).unwrap(), &m).unwrap();
        assert_eq!(r.breakdown.fixed_gates, d("1"));
        assert_eq!(r.breakdown.swap, d("0.5"));
        assert_eq!(
            r.breakdown.controlled_rotation,
            qft_cost_closed_form(4, UnitPolicy::TauZero).unwrap()
        );
        assert_eq!(r.total_relative, r.breakdown.total());
    }

    #[test]
    fn swap_priced_both_ways() {
        let m = duration(UnitPolicy::TauZero);
        let c = Circuit::from_gates(
            3,
            crate::Stage::Routed,
            vec![Gate::Swap(0, 1), Gate::Swap(1, 2)],
        )
        .unwrap();
        let r = circuit_cost(&c, &m).unwrap();
        assert_eq!(r.breakdown.swap, Dyadic::zero());
        // per swap: 3 x (D(pi/4) + 2 Rz(-pi/2)) = 3 x 5/4
        assert_eq!(r.swap_as_elementary, d("7.5"));
    }

    #[test]
    fn invalid_models_are_rejected() {
        let m = HardwareModel {
            t_res: 0.0,
            ..HardwareModel::default()
        };
        assert!(circuit_cost(&build_qft(2, false).unwrap(), &m).is_err());
        let m = HardwareModel {
            fixed_gate_cost: d("-1"),
            ..HardwareModel::default()
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn n_b_examples() {
        let mut m = duration(UnitPolicy::TauZero);
        m.t_res = 1e-3;
        assert_eq!(max_feasible_qubits(&m, 1e-3).unwrap(), 1);
        assert_eq!(max_feasible_qubits(&m, 1.0).unwrap(), 10);
        assert_eq!(max_feasible_qubits(&m, 1e-3 * 2f64.powi(99)).unwrap(), 100);
        assert!(matches!(
            max_feasible_qubits(&m, 1e-4),
            Err(Error::Infeasible(_))
        ));
        assert!(max_feasible_qubits(&m, -1.0).is_err());
    }

    #[test]
    fn n_b_just_below_a_power_of_two() {
        let mut m = duration(UnitPolicy::TauZero);
        m.t_res = 1.0;
        let below = f64::from_bits((1024.0f64).to_bits() - 1);
        assert_eq!(max_feasible_qubits(&m, below).unwrap(), 10);
        assert_eq!(max_feasible_qubits(&m, 1024.0).unwrap(), 11);
    }

    #[test]
    fn intensity_examples() {
        let one = intensity_requirement(1, 2.5).unwrap();
        assert_eq!(one.ratio, BigUint::one());
        assert_eq!(one.b_max_tesla, 2.5);
        let hundred = intensity_requirement(100, 1e-3).unwrap();
        assert_eq!(hundred.ratio, BigUint::one() << 99u32);
        assert!((hundred.b_max_tesla / 6.338253001141147e26 - 1.0).abs() < 1e-12);
        assert!(intensity_requirement(0, 1.0).is_err());
        assert!(intensity_requirement(3, 0.0).is_err());
    }

    #[test]
    fn curve_examples() {
        let col = |p, kind| -> Vec<String> {
            cost_curve(2, 5, &duration(p), kind)
                .unwrap()
                .iter()
                .map(|r| r.relative_cost.to_string())
                .collect()
        };
        assert_eq!(
            col(UnitPolicy::TauZero, CurveKind::Qft),
            ["0.5", "1.25", "2.125", "3.0625"]
        );
        assert_eq!(
            col(UnitPolicy::TauNMinusOne, CurveKind::Qft),
            ["1", "5", "17", "49"]
        );
        for p in [UnitPolicy::TauZero, UnitPolicy::TauNMinusOne] {
            let qft = cost_curve(5, 5, &duration(p), CurveKind::Qft).unwrap();
            let aqft = cost_curve(5, 5, &duration(p), CurveKind::Aqft(5)).unwrap();
            assert_eq!(qft[0].relative_cost, aqft[0].relative_cost);
        }
    }

    #[test]
    fn curve_range_errors() {
        let m = HardwareModel::default();
        assert!(cost_curve(0, 3, &m, CurveKind::Qft).is_err());
        assert!(cost_curve(5, 3, &m, CurveKind::Qft).is_err());
        assert!(cost_curve(2, 4097, &m, CurveKind::Qft).is_err());
        assert!(cost_curve(2, 65, &m, CurveKind::QftRoutedReduced).is_err());
        assert!(cost_curve(4096, 4096, &m, CurveKind::Qft).is_ok());
    }

    #[test]
    fn closed_form_rows_match_materialized_rows() {
        let mut models = Vec::new();
        for p in [
            UnitPolicy::TauZero,
            UnitPolicy::TauNMinusOne,
            UnitPolicy::Custom(2),
        ] {
            let mut m = duration(p);
            m.t_ref = 1e-3;
            m.t_res = 1e-5;
            models.push(m.clone());
            m.fixed_gate_cost = d("0.125");
            models.push(m);
        }
        models.push(HardwareModel::new(
            ControlMode::IntensityControl,
            UnitPolicy::TauZero,
        ));
        for m in &models {
            for kind in [CurveKind::Qft, CurveKind::Aqft(1), CurveKind::Aqft(3)] {
                let rows = cost_curve(1, 12, m, kind).unwrap();
                for row in rows {
                    assert_eq!(
                        row,
                        materialized_curve_row(row.n, m, kind).unwrap(),
                        "{kind} {m:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn routed_rows_add_nothing_under_zero_swap_cost() {
        let m = duration(UnitPolicy::TauNMinusOne);
        let routed = cost_curve(2, 8, &m, CurveKind::QftRoutedReduced).unwrap();
        let plain = cost_curve(2, 8, &m, CurveKind::Qft).unwrap();
        for (r, p) in routed.iter().zip(&plain) {
            assert_eq!(r.relative_cost, p.relative_cost);
        }
        // under intensity control every swap is one more unit
        let im = HardwareModel::new(ControlMode::IntensityControl, UnitPolicy::TauZero);
        let r5 = cost_curve(5, 5, &im, CurveKind::QftRoutedReduced).unwrap();
        assert_eq!(r5[0].relative_cost, Dyadic::from_int(15 + 12));
    }

    #[test]
    fn sequential_and_parallel_curves_match() {
        let m = duration(UnitPolicy::TauNMinusOne);
        for kind in [CurveKind::Qft, CurveKind::QftRoutedReduced] {
            let seq = cost_curve_with(2, 20, &m, kind, Execution::Sequential).unwrap();
            let par = cost_curve_with(2, 20, &m, kind, Execution::Parallel).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn aqft_cost_shrinks_with_cutoff() {
        for p in [UnitPolicy::TauZero, UnitPolicy::TauNMinusOne] {
            for n in 2..=12 {
                let costs: Vec<Dyadic> = (1..=n)
                    .map(|m| {
                        circuit_cost(&build_aqft(n, m, false).unwrap(), &duration(p))
                            .unwrap()
                            .total_relative
                    })
                    .collect();
                assert!(costs.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn csv_layout() {
        let rows = cost_curve(2, 3, &duration(UnitPolicy::TauZero), CurveKind::Qft).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,relative_cost,feasible,n_b,policy,mode,circuit\n2,0.5,true,10,tau0,duration,qft\n3,1.25,true,10,tau0,duration,qft\n"
        );
    }

    #[test]
    fn report_json_uses_strings_for_exact_values() {
        let r = circuit_cost(
            &build_qft(3, false).unwrap(),
            &duration(UnitPolicy::TauZero),
        )
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["total_relative"], "1.25");
        assert_eq!(v["breakdown"]["controlled_rotation"], "1.25");
        assert_eq!(v["total_seconds"], "1.25000000000000e-3");
        assert_eq!(v["n_b"], 10);
    }

    proptest! {
        #[test]
        fn n_b_sits_on_the_boundary(k in 0u32..=80, mant in 1.0f64..2.0, t_res_exp in -9i32..0) {
            let mut m = duration(UnitPolicy::TauZero);
            m.t_res = 10f64.powi(t_res_exp);
            let tau0 = m.t_res * 2f64.powi(k as i32) * mant;
            let nb = max_feasible_qubits(&m, tau0).unwrap();
            // oracle: exact check that tau_0 / 2^(n-1) >= t_R holds at n_b and fails above
            let tau = Dyadic::from_f64(tau0).unwrap();
            let tr = Dyadic::from_f64(m.t_res).unwrap();
            prop_assert!(tau.mul_pow2(1 - nb as i64) >= tr);
            prop_assert!(tau.mul_pow2(-(nb as i64)) < tr);
            prop_assert!(nb as i64 - (k as i64 + 1) <= 1 && (k as i64 + 1) - nb as i64 <= 1);
        }

        #[test]
        fn totals_scale_with_fixed_cost(seed in any::<u64>(), n in 1usize..7, fixed in 0i64..64) {
            let c = random_circuit(n, 20, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut m = duration(UnitPolicy::TauZero);
            let base = circuit_cost(&c, &m).unwrap();
            m.fixed_gate_cost = Dyadic::new(fixed, 3);
            let r = circuit_cost(&c, &m).unwrap();
            let fixed_count = c.gates().iter().filter(|g| matches!(gate_class(g), GateClass::Fixed | GateClass::Swap)).count();
            prop_assert_eq!(r.total_relative, &base.total_relative + &(&m.fixed_gate_cost * &Dyadic::from_int(fixed_count)));
        }
    }

    #[test]
    fn names_round_trip() {
        for p in [
            UnitPolicy::TauZero,
            UnitPolicy::TauNMinusOne,
            UnitPolicy::Custom(7),
        ] {
            assert_eq!(p.to_string().parse::<UnitPolicy>().unwrap(), p);
        }
        for k in [
            CurveKind::Qft,
            CurveKind::Aqft(3),
            CurveKind::QftRoutedReduced,
        ] {
            assert_eq!(k.to_string().parse::<CurveKind>().unwrap(), k);
        }
        assert!("aqft:0".parse::<CurveKind>().is_err());
        assert!("fast".parse::<ControlMode>().is_err());
    }
}
