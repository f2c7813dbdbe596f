//! Linear nearest-neighbour routing by adjacent swap chains, and the
//! swap-pair cancellation pass.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit_ir::{Circuit, Gate, Stage};
use crate::error::{Error, Result};
use crate::synth::build_qft;

/// Where the two operands of a non-adjacent gate meet.
///
/// For `U(j, k)` with target `j` below control `k`, `MoveControlToTarget`
/// walks the control's data down to `j+1` and applies `U(j, j+1)`;
/// `MoveTargetToControl` walks the target's data up to `k-1` and applies
/// `U(k-1, k)`; `MeetAt(l)` brings the lower operand to `l` and the upper
/// one to `l+1`. A meeting point outside a gate's span is clamped into it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RoutingStrategy {
    MoveControlToTarget,
    #[default]
    MoveTargetToControl,
    MeetAt(usize),
}

impl RoutingStrategy {
    /// Physical position of the lower operand once the operands are adjacent.
    fn meeting_point(self, target: usize, control: usize) -> usize {
        let (lo, hi) = (target.min(control), target.max(control));
        let target_is_low = target < control;
        match self {
            RoutingStrategy::MoveControlToTarget if target_is_low => lo,
            RoutingStrategy::MoveControlToTarget => hi - 1,
            RoutingStrategy::MoveTargetToControl if target_is_low => hi - 1,
            RoutingStrategy::MoveTargetToControl => lo,
            RoutingStrategy::MeetAt(l) => l.clamp(lo, hi - 1),
        }
    }
}

impl fmt::Display for RoutingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoutingStrategy::MoveControlToTarget => f.write_str("control-to-target"),
            RoutingStrategy::MoveTargetToControl => f.write_str("target-to-control"),
            RoutingStrategy::MeetAt(l) => write!(f, "meet-at:{l}"),
        }
    }
}

impl FromStr for RoutingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "control-to-target" => Ok(RoutingStrategy::MoveControlToTarget),
            "target-to-control" => Ok(RoutingStrategy::MoveTargetToControl),
            _ => s
                .strip_prefix("meet-at:")
                .and_then(|l| l.parse().ok())
                .map(RoutingStrategy::MeetAt)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "unknown strategy {s:?}; expected control-to-target, target-to-control or meet-at:<l>"
                    ))
                }),
        }
    }
}

/// A circuit whose two-qubit gates all act on neighbouring registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    /// Number of `Swap` gates in `circuit`.
    pub swap_count: usize,
    /// Physical register holding each logical qubit at circuit end.
    pub logical_to_physical: Vec<usize>,
}

impl RoutedCircuit {
    pub fn is_adjacent(&self) -> bool {
        all_adjacent(&self.circuit)
    }

    pub fn ends_in_identity(&self) -> bool {
        self.logical_to_physical
            .iter()
            .enumerate()
            .all(|(i, &p)| i == p)
    }
}

/// True when every two-qubit gate acts on registers at distance one.
pub fn all_adjacent(circuit: &Circuit) -> bool {
    circuit.gates().iter().all(|g| match g.qubits() {
        (a, Some(b)) => a.abs_diff(b) == 1,
        _ => true,
    })
}

fn count_swaps(circuit: &Circuit) -> usize {
    circuit
        .gates()
        .iter()
        .filter(|g| matches!(g, Gate::Swap(..)))
        .count()
}

/// Replaces each non-adjacent two-qubit gate by a swap chain, the gate on
/// the meeting pair, and the reversed chain. Adjacent gates pass through.
/// A gate spanning distance `d` costs `2(d - 1)` swaps.
pub fn route_lnn(circuit: &Circuit, strategy: RoutingStrategy) -> RoutedCircuit {
    let n = circuit.num_qubits();
    // position[q]: register currently holding logical q
    let mut position: Vec<usize> = (0..n).collect();
    let mut gates = Vec::with_capacity(circuit.len());

    let apply_swap = |gates: &mut Vec<Gate>, position: &mut [usize], a: usize, b: usize| {
        for p in position.iter_mut() {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
        gates.push(Gate::Swap(a, b));
    };

    for g in circuit.gates() {
        let (t, c) = match g.qubits() {
            (t, Some(c)) => (position[t], position[c]),
            _ => {
                gates.push(g.map_qubits(|q| position[q]));
                continue;
            }
        };
        let (lo, hi) = (t.min(c), t.max(c));
        if hi - lo == 1 {
            gates.push(g.map_qubits(|q| position[q]));
            continue;
        }
        let p = strategy.meeting_point(t, c);
        // lower operand walks up to p, upper operand walks down to p + 1
        let mut chain = Vec::with_capacity(hi - lo - 1);
        for i in lo..p {
            chain.push((i + 1, i));
        }
        for i in ((p + 2)..=hi).rev() {
            chain.push((i - 1, i));
        }
        for &(a, b) in &chain {
            apply_swap(&mut gates, &mut position, a, b);
        }
        gates.push(g.map_qubits(|q| position[q]));
        for &(a, b) in chain.iter().rev() {
            apply_swap(&mut gates, &mut position, b, a);
        }
    }

    let circuit =
        Circuit::from_gates(n, Stage::Routed, gates).expect("routing only permutes valid indices");
    RoutedCircuit {
        swap_count: count_swaps(&circuit),
        circuit,
        logical_to_physical: position,
    }
}

fn same_swap(g: &Gate, a: usize, b: usize) -> bool {
    matches!(*g, Gate::Swap(x, y) if (x, y) == (a, b) || (x, y) == (b, a))
}

/// Deletes pairs of identical swaps separated only by gates on other wires,
/// until no such pair remains.
///
/// One left-to-right pass with a per-wire stack of surviving gates reaches
/// the fixed point: a swap cancels exactly when the most recent surviving
/// gate on both of its wires is the same swap.
pub fn cancel_swaps(routed: &RoutedCircuit) -> RoutedCircuit {
    let n = routed.circuit.num_qubits();
    let mut out: Vec<Option<Gate>> = Vec::with_capacity(routed.circuit.len());
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); n];

    for g in routed.circuit.gates() {
        if let Gate::Swap(a, b) = *g {
            let (ta, tb) = (stacks[a].last().copied(), stacks[b].last().copied());
            if let (Some(i), Some(j)) = (ta, tb) {
                if i == j && out[i].as_ref().is_some_and(|prev| same_swap(prev, a, b)) {
                    out[i] = None;
                    stacks[a].pop();
                    stacks[b].pop();
                    continue;
                }
            }
        }
        let idx = out.len();
        for q in g.qubit_list() {
            stacks[q].push(idx);
        }
        out.push(Some(g.clone()));
    }

    let circuit = Circuit::from_gates(n, Stage::Reduced, out.into_iter().flatten().collect())
        .expect("cancellation only removes gates");
    RoutedCircuit {
        swap_count: count_swaps(&circuit),
        circuit,
        logical_to_physical: routed.logical_to_physical.clone(),
    }
}

/// `(n-1) n (2n-1) / 6`, the quoted swap count for the unreduced QFT.
pub fn quoted_naive_swaps(n: u64) -> u128 {
    let n = n as u128;
    if n == 0 {
        return 0;
    }
    (n - 1) * n * (2 * n - 1) / 6
}

/// `(n-1)(n-2)`, the quoted swap count after cancellation.
pub fn quoted_reduced_swaps(n: u64) -> u128 {
    let n = n as u128;
    if n < 2 {
        return 0;
    }
    (n - 1) * (n - 2)
}

/// Measured swap overhead next to the quoted closed forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwapReport {
    pub n: usize,
    pub strategy: String,
    pub measured: usize,
    pub quoted_naive: u128,
    pub quoted_reduced: u128,
    pub reduced_measured: Option<usize>,
    pub naive_matches: bool,
    pub reduced_matches: Option<bool>,
}

impl SwapReport {
    /// Routes `circuit` and, when `reduce` is set, cancels swap pairs.
    pub fn for_circuit(circuit: &Circuit, strategy: RoutingStrategy, reduce: bool) -> SwapReport {
        let routed = route_lnn(circuit, strategy);
        let reduced = reduce.then(|| cancel_swaps(&routed).swap_count);
        let n = circuit.num_qubits();
        let quoted_naive = quoted_naive_swaps(n as u64);
        let quoted_reduced = quoted_reduced_swaps(n as u64);
        SwapReport {
            n,
            strategy: strategy.to_string(),
            measured: routed.swap_count,
            quoted_naive,
            quoted_reduced,
            reduced_measured: reduced,
            naive_matches: routed.swap_count as u128 == quoted_naive,
            reduced_matches: reduced.map(|r| r as u128 == quoted_reduced),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialization is infallible")
    }
}

/// Swap overhead of routing the QFT on `n` registers. Bit-reversal swaps
/// are routed too when `include_bit_reversal` is set.
pub fn swap_overhead_report(
    n: usize,
    strategy: RoutingStrategy,
    reduce: bool,
    include_bit_reversal: bool,
) -> Result<SwapReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "swap overhead needs at least two qubits, got {n}"
        )));
    }
    let qft = build_qft(n, include_bit_reversal)?;
    Ok(SwapReport::for_circuit(&qft, strategy, reduce))
}
