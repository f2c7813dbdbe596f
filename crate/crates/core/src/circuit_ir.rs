//! Gate alphabet, exact angles and the circuit container.
//!
//! Gates are stored in application order: `gates[0]` acts on the state
//! first. Two-qubit gates list the target first and the control second.

use std::fmt;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// An angle `numerator * pi / 2^log2_den`, held exactly.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicAngle(Dyadic);

impl DyadicAngle {
    /// Canonicalizes `numerator * pi / 2^log2_den`.
    pub fn new(numerator: impl Into<BigInt>, log2_den: i64) -> Result<Self> {
        if log2_den < 0 {
            return Err(Error::InvalidArgument(format!(
                "angle denominator exponent must be non-negative, got {log2_den}"
            )));
        }
        Ok(DyadicAngle(Dyadic::new(numerator, log2_den as u64)))
    }

    pub fn zero() -> Self {
        DyadicAngle(Dyadic::zero())
    }

    /// `theta_j = pi / 2^j`.
    pub fn theta(j: u64) -> Self {
        DyadicAngle(Dyadic::new(1, j))
    }

    /// Wraps a value measured in units of pi.
    pub fn from_pi_units(v: Dyadic) -> Self {
        DyadicAngle(v)
    }

    /// The angle divided by pi.
    pub fn pi_units(&self) -> &Dyadic {
        &self.0
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numerator()
    }

    pub fn log2_den(&self) -> u64 {
        self.0.log2_den()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn halve(&self) -> Self {
        DyadicAngle(self.0.half())
    }

    pub fn quarter(&self) -> Self {
        DyadicAngle(self.0.mul_pow2(-2))
    }

    /// Representative in `(-pi, pi]`.
    pub fn reduced(&self) -> Self {
        let two = Dyadic::from_int(2);
        // shift into [0, 2) then fold the upper half down
        let turns = self.0.half().floor();
        let mut r = &self.0 - &Dyadic::from_int(turns * 2);
        if r > Dyadic::one() {
            r = &r - &two;
        }
        DyadicAngle(r)
    }

    /// Magnitude of the representative in `(-pi, pi]`, in units of pi.
    pub fn reduced_magnitude(&self) -> Dyadic {
        self.reduced().0.abs()
    }

    pub fn radians(&self) -> f64 {
        self.0.to_f64() * std::f64::consts::PI
    }
}

impl std::ops::Neg for &DyadicAngle {
    type Output = DyadicAngle;
    fn neg(self) -> DyadicAngle {
        DyadicAngle(-&self.0)
    }
}

impl std::ops::Neg for DyadicAngle {
    type Output = DyadicAngle;
    fn neg(self) -> DyadicAngle {
        -&self
    }
}

impl fmt::Debug for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi/2^{}", self.numerator(), self.log2_den())
    }
}

impl fmt::Display for DyadicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.numerator().to_string().as_str(), self.log2_den()) {
            ("0", _) => write!(f, "0"),
            (n, 0) => write!(f, "{n}pi"),
            (n, k) => write!(f, "{n}pi/2^{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    Ry,
    Rz,
    GlobalPhase,
    CPhase,
    Ising,
    Xor,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::H,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::GlobalPhase,
        GateKind::CPhase,
        GateKind::Ising,
        GateKind::Xor,
        GateKind::Swap,
    ];

    /// Name used in the circuit JSON format.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Ry => "Ry",
            GateKind::Rz => "Rz",
            GateKind::GlobalPhase => "Phi",
            GateKind::CPhase => "CPhase",
            GateKind::Ising => "Ising",
            GateKind::Xor => "Xor",
            GateKind::Swap => "Swap",
        }
    }

    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::Ry | GateKind::Rz | GateKind::GlobalPhase => 1,
            _ => 2,
        }
    }

    pub fn has_angle(self) -> bool {
        !matches!(self, GateKind::H | GateKind::Xor | GateKind::Swap)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate of the alphabet. Two-qubit variants carry the target first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    Ry(usize, DyadicAngle),
    Rz(usize, DyadicAngle),
    /// `e^{i delta} I`; the register index is kept for bookkeeping only.
    GlobalPhase(usize, DyadicAngle),
    CPhase {
        target: usize,
        control: usize,
        angle: DyadicAngle,
    },
    /// The exchange-interaction gate `diag(e^{it}, e^{-it}, e^{-it}, e^{it})`.
    Ising {
        target: usize,
        control: usize,
        angle: DyadicAngle,
    },
    Xor {
        target: usize,
        control: usize,
    },
    Swap(usize, usize),
}

impl Gate {
    /// Builds a gate from its kind, qubit list and optional angle, checking
    /// arity, distinct indices and angle presence.
    pub fn new(kind: GateKind, qubits: &[usize], angle: Option<DyadicAngle>) -> Result<Gate> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidArgument(format!(
                "{kind} takes {} qubit(s), got {}",
                kind.arity(),
                qubits.len()
            )));
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidArgument(format!(
                "{kind} needs two distinct qubits, got ({}, {})",
                qubits[0], qubits[1]
            )));
        }
        let angle = match (kind.has_angle(), angle) {
            (true, Some(a)) => Some(a),
            (false, None) => None,
            (true, None) => {
                return Err(Error::InvalidArgument(format!("{kind} requires an angle")))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidArgument(format!("{kind} takes no angle")))
            }
        };
        let q = qubits[0];
        Ok(match kind {
            GateKind::H => Gate::H(q),
            GateKind::Ry => Gate::Ry(q, angle.unwrap()),
            GateKind::Rz => Gate::Rz(q, angle.unwrap()),
            GateKind::GlobalPhase => Gate::GlobalPhase(q, angle.unwrap()),
            GateKind::CPhase => Gate::CPhase {
                target: q,
                control: qubits[1],
                angle: angle.unwrap(),
            },
            GateKind::Ising => Gate::Ising {
                target: q,
                control: qubits[1],
                angle: angle.unwrap(),
            },
            GateKind::Xor => Gate::Xor {
                target: q,
                control: qubits[1],
            },
            GateKind::Swap => Gate::Swap(q, qubits[1]),
        })
    }

    pub fn cphase(target: usize, control: usize, angle: DyadicAngle) -> Gate {
        Gate::CPhase {
            target,
            control,
            angle,
        }
    }

    pub fn ising(target: usize, control: usize, angle: DyadicAngle) -> Gate {
        Gate::Ising {
            target,
            control,
            angle,
        }
    }

    pub fn xor(target: usize, control: usize) -> Gate {
        Gate::Xor { target, control }
    }

    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H(_) => GateKind::H,
            Gate::Ry(..) => GateKind::Ry,
            Gate::Rz(..) => GateKind::Rz,
            Gate::GlobalPhase(..) => GateKind::GlobalPhase,
            Gate::CPhase { .. } => GateKind::CPhase,
            Gate::Ising { .. } => GateKind::Ising,
            Gate::Xor { .. } => GateKind::Xor,
            Gate::Swap(..) => GateKind::Swap,
        }
    }

    pub fn angle(&self) -> Option<&DyadicAngle> {
        match self {
            Gate::Ry(_, a) | Gate::Rz(_, a) | Gate::GlobalPhase(_, a) => Some(a),
            Gate::CPhase { angle, .. } | Gate::Ising { angle, .. } => Some(angle),
            _ => None,
        }
    }

    /// First (target) qubit and, for two-qubit gates, the second (control).
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Gate::H(q) | Gate::Ry(q, _) | Gate::Rz(q, _) | Gate::GlobalPhase(q, _) => (q, None),
            Gate::CPhase {
                target, control, ..
            }
            | Gate::Ising {
                target, control, ..
            }
            | Gate::Xor { target, control } => (target, Some(control)),
            Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn qubit_list(&self) -> Vec<usize> {
        let (a, b) = self.qubits();
        std::iter::once(a).chain(b).collect()
    }

    pub fn touches(&self, q: usize) -> bool {
        let (a, b) = self.qubits();
        a == q || b == Some(q)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits().1.is_some()
    }

    /// Same gate with every index passed through `f`, roles preserved.
    pub fn map_qubits(&self, mut f: impl FnMut(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(f(*q)),
            Gate::Ry(q, a) => Gate::Ry(f(*q), a.clone()),
            Gate::Rz(q, a) => Gate::Rz(f(*q), a.clone()),
            Gate::GlobalPhase(q, a) => Gate::GlobalPhase(f(*q), a.clone()),
            Gate::CPhase {
                target,
                control,
                angle,
            } => Gate::cphase(f(*target), f(*control), angle.clone()),
            Gate::Ising {
                target,
                control,
                angle,
            } => Gate::ising(f(*target), f(*control), angle.clone()),
            Gate::Xor { target, control } => Gate::xor(f(*target), f(*control)),
            Gate::Swap(a, b) => Gate::Swap(f(*a), f(*b)),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        let (a, b) = self.qubits();
        for q in std::iter::once(a).chain(b) {
            if q >= num_qubits {
                return Err(Error::Index {
                    index: q,
                    num_qubits,
                });
            }
        }
        if b == Some(a) {
            return Err(Error::InvalidArgument(format!(
                "{} needs two distinct qubits, got ({a}, {a})",
                self.kind()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.qubits();
        write!(f, "{}", self.kind())?;
        match (b, self.angle()) {
            (Some(b), Some(t)) => write!(f, "({a},{b};{t})"),
            (Some(b), None) => write!(f, "({a},{b})"),
            (None, Some(t)) => write!(f, "({a};{t})"),
            (None, None) => write!(f, "({a})"),
        }
    }
}

/// Where a circuit came from in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Synthesized,
    Lowered,
    Routed,
    Reduced,
}

/// Register count plus gates in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    stage: Stage,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Circuit> {
        Circuit::with_stage(num_qubits, Stage::Synthesized)
    }

    pub fn with_stage(num_qubits: usize, stage: Stage) -> Result<Circuit> {
        if num_qubits == 0 {
            return Err(Error::InvalidArgument(
                "a circuit needs at least one qubit".into(),
            ));
        }
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
            stage,
        })
    }

    /// Builds a circuit from a gate list, validating every gate.
    pub fn from_gates(num_qubits: usize, stage: Stage, gates: Vec<Gate>) -> Result<Circuit> {
        let mut c = Circuit::with_stage(num_qubits, stage)?;
        for g in &gates {
            g.validate(num_qubits)?;
        }
        c.gates = gates;
        Ok(c)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Returns the circuit with `gate` applied last.
    pub fn append(mut self, gate: Gate) -> Result<Circuit> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "cannot splice a {}-qubit circuit into a {}-qubit one",
                other.num_qubits, self.num_qubits
            )));
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    pub fn relabel(mut self, stage: Stage) -> Circuit {
        self.stage = stage;
        self
    }

    pub fn census(&self) -> Census {
        gate_census(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("circuit serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).expect("circuit serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        let wire: WireCircuit = serde_json::from_str(s)?;
        Circuit::from_wire(wire)
    }

    fn to_wire(&self) -> WireCircuit {
        WireCircuit {
            n: self.num_qubits,
            stage: self.stage,
            gates: self
                .gates
                .iter()
                .map(|g| WireGate {
                    kind: g.kind().name().to_string(),
                    q: g.qubit_list(),
                    angle: g.angle().map(|a| WireAngle {
                        num: a.numerator().to_string(),
                        log2den: a.log2_den(),
                    }),
                })
                .collect(),
        }
    }

    fn from_wire(wire: WireCircuit) -> Result<Circuit> {
        let mut c = Circuit::with_stage(wire.n, wire.stage)?;
        for (i, g) in wire.gates.into_iter().enumerate() {
            let kind = GateKind::from_name(&g.kind)
                .ok_or_else(|| Error::Parse(format!("gate {i}: unknown kind {:?}", g.kind)))?;
            let angle = g
                .angle
                .map(|a| {
                    let num: BigInt = a.num.parse().map_err(|_| {
                        Error::Parse(format!("gate {i}: bad angle numerator {:?}", a.num))
                    })?;
                    Ok::<_, Error>(DyadicAngle(Dyadic::new(num, a.log2den)))
                })
                .transpose()?;
            c.push(Gate::new(kind, &g.q, angle)?)?;
        }
        Ok(c)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}q]", self.num_qubits)?;
        for g in &self.gates {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct WireCircuit {
    n: usize,
    stage: Stage,
    gates: Vec<WireGate>,
}

#[derive(Serialize, Deserialize)]
struct WireGate {
    kind: String,
    q: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    angle: Option<WireAngle>,
}

#[derive(Serialize, Deserialize)]
struct WireAngle {
    num: String,
    log2den: u64,
}

/// Gate counts per kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Census {
    counts: [usize; 8],
}

impl Census {
    pub fn get(&self, kind: GateKind) -> usize {
        self.counts[kind as usize]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Nonzero entries in alphabet order.
    pub fn entries(&self) -> impl Iterator<Item = (GateKind, usize)> + '_ {
        GateKind::ALL
            .into_iter()
            .map(|k| (k, self.get(k)))
            .filter(|&(_, c)| c > 0)
    }

    pub fn only_kinds(&self, allowed: &[GateKind]) -> bool {
        self.entries().all(|(k, _)| allowed.contains(&k))
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries().map(|(k, c)| format!("{k}: {c}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn gate_census(circuit: &Circuit) -> Census {
    let mut census = Census::default();
    for g in circuit.gates() {
        census.counts[g.kind() as usize] += 1;
    }
    census
}

/// Random circuit over the full alphabet with small dyadic angles.
pub fn random_circuit<R: Rng + ?Sized>(num_qubits: usize, len: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(num_qubits).expect("num_qubits > 0");
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| num_qubits >= 2 || k.arity() == 1)
        .collect();
    for _ in 0..len {
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let a = rng.gen_range(0..num_qubits);
        let mut qubits = vec![a];
        if kind.arity() == 2 {
            let mut b = rng.gen_range(0..num_qubits - 1);
            if b >= a {
                b += 1;
            }
            qubits.push(b);
        }
        let angle = kind
            .has_angle()
            .then(|| DyadicAngle::new(rng.gen_range(-16i64..=16), rng.gen_range(0..7)).unwrap());
        c.push(Gate::new(kind, &qubits, angle).unwrap()).unwrap();
    }
    c
}
