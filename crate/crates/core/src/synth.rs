//! QFT/AQFT construction and lowering to the practical elementary gates.
//!
//! Sequences are emitted in application order. The controlled-phase ladder
//! processes targets `n-1, n-2, ..., 0`; for each target `j` the
//! controlled rotations `C(j, k)` run from `k = n-1` down to `j+1`, followed
//! by `H(j)`.

use crate::circuit_ir::{Circuit, DyadicAngle, Gate, Stage};
use crate::error::{Error, Result};

/// How far [`lower_circuit`] expands the gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoweringLevel {
    /// Keep H, CPhase, Xor and Swap as they are.
    Logical,
    /// CPhase becomes Xor + Rz + Phi, Swap becomes three Xor.
    XorLevel,
    /// Additionally every Xor becomes the Ry/Rz/Ising exchange sequence, so
    /// only H, Ry, Rz, Phi and Ising remain.
    Elementary,
}

/// Whether Xor gates produced by a lowering stay ideal or are realized with
/// the exchange-interaction sequence (equal to Xor up to `e^{-i pi/4}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum XorMode {
    Ideal,
    Physical,
}

fn check_distinct(j: usize, k: usize) -> Result<()> {
    if j == k {
        Err(Error::InvalidArgument(format!(
            "two-qubit lowering needs distinct qubits, got ({j}, {k})"
        )))
    } else {
        Ok(())
    }
}

fn qft_gates(n: usize, max_distance: usize) -> impl Iterator<Item = Gate> {
    (0..n).rev().flat_map(move |j| {
        ((j + 1)..n)
            .rev()
            .filter(move |&k| k - j < max_distance)
            .map(move |k| Gate::cphase(j, k, DyadicAngle::theta((k - j) as u64)))
            .chain(std::iter::once(Gate::H(j)))
    })
}

/// Appends `Swap(i, n-1-i)` for `i < n/2`.
pub fn append_bit_reversal(circuit: &mut Circuit) {
    let n = circuit.num_qubits();
    for i in 0..n / 2 {
        circuit
            .push(Gate::Swap(i, n - 1 - i))
            .expect("indices are in range and distinct");
    }
}

/// The n-qubit QFT: `n` Hadamards and `n(n-1)/2` controlled rotations
/// `C(j, k; pi/2^(k-j))`, optionally followed by the bit-reversal swaps.
pub fn build_qft(n: usize, include_bit_reversal: bool) -> Result<Circuit> {
    build_aqft(n, n.max(1), include_bit_reversal)
}

/// The QFT with every rotation between qubits at distance `>= m` dropped.
/// `m = n` gives the exact QFT; `m = 1` leaves only the Hadamards.
pub fn build_aqft(n: usize, m: usize, include_bit_reversal: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "QFT needs at least one qubit".into(),
        ));
    }
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "approximation distance must be in 1..={n}, got {m}"
        )));
    }
    let mut c = Circuit::from_gates(n, Stage::Synthesized, qft_gates(n, m).collect())?;
    if include_bit_reversal {
        append_bit_reversal(&mut c);
    }
    Ok(c)
}

fn xor_sequence(j: usize, k: usize) -> [Gate; 5] {
    let quarter_turn = DyadicAngle::theta(1);
    [
        Gate::Ry(j, quarter_turn.clone()),
        Gate::ising(j, k, DyadicAngle::theta(2)),
        Gate::Rz(j, -&quarter_turn),
        Gate::Rz(k, -&quarter_turn),
        Gate::Ry(j, -&quarter_turn),
    ]
}

fn cphase_sequence(j: usize, k: usize, theta: &DyadicAngle) -> [Gate; 6] {
    let half = theta.halve();
    [
        Gate::xor(j, k),
        Gate::Rz(j, half.clone()),
        Gate::xor(j, k),
        Gate::Rz(j, -&half),
        Gate::GlobalPhase(k, theta.quarter()),
        Gate::Rz(k, -&half),
    ]
}

fn swap_sequence(j: usize, k: usize) -> [Gate; 3] {
    [Gate::xor(k, j), Gate::xor(j, k), Gate::xor(k, j)]
}

fn expand_xor(gates: impl IntoIterator<Item = Gate>, mode: XorMode, out: &mut Vec<Gate>) {
    for g in gates {
        match (g, mode) {
            (Gate::Xor { target, control }, XorMode::Physical) => {
                out.extend(xor_sequence(target, control))
            }
            (g, _) => out.push(g),
        }
    }
}

fn pair_circuit(j: usize, k: usize, gates: Vec<Gate>) -> Result<Circuit> {
    Circuit::from_gates(j.max(k) + 1, Stage::Lowered, gates)
}

/// Xor(j, k) from the exchange interaction:
/// `[Ry_j(pi/2), D_jk(pi/4), Rz_j(-pi/2), Rz_k(-pi/2), Ry_j(-pi/2)]`,
/// equal to Xor up to the global phase `e^{-i pi/4}`.
pub fn lower_xor(j: usize, k: usize) -> Result<Circuit> {
    check_distinct(j, k)?;
    pair_circuit(j, k, xor_sequence(j, k).to_vec())
}

/// C_jk(theta) as `[Xor, Rz_j(theta/2), Xor, Rz_j(-theta/2), Phi_k(theta/4),
/// Rz_k(-theta/2)]`. Exact with ideal Xor; with physical Xor it picks up a
/// global phase of `e^{-i pi/2}`.
pub fn lower_cphase(j: usize, k: usize, theta: &DyadicAngle, mode: XorMode) -> Result<Circuit> {
    check_distinct(j, k)?;
    let mut gates = Vec::with_capacity(14);
    expand_xor(cphase_sequence(j, k, theta), mode, &mut gates);
    pair_circuit(j, k, gates)
}

/// Swap as `Xor(k, j) Xor(j, k) Xor(k, j)`.
pub fn lower_swap(j: usize, k: usize, mode: XorMode) -> Result<Circuit> {
    check_distinct(j, k)?;
    let mut gates = Vec::with_capacity(15);
    expand_xor(swap_sequence(j, k), mode, &mut gates);
    pair_circuit(j, k, gates)
}

/// Gate-by-gate lowering of a whole circuit.
///
/// `XorLevel` with [`XorMode::Physical`] expands Xor gates as well, which
/// makes it coincide with `Elementary`; `Elementary` always uses the
/// physical sequence. `Logical` returns the circuit unchanged.
pub fn lower_circuit(circuit: &Circuit, level: LoweringLevel, mode: XorMode) -> Circuit {
    let mode = match level {
        LoweringLevel::Logical => return circuit.clone(),
        LoweringLevel::XorLevel => mode,
        LoweringLevel::Elementary => XorMode::Physical,
    };
    let mut gates = Vec::with_capacity(circuit.len() * 4);
    for g in circuit.gates() {
        match g {
            Gate::CPhase {
                target,
                control,
                angle,
            } => expand_xor(cphase_sequence(*target, *control, angle), mode, &mut gates),
            Gate::Swap(a, b) => expand_xor(swap_sequence(*a, *b), mode, &mut gates),
            other => expand_xor([other.clone()], mode, &mut gates),
        }
    }
    Circuit::from_gates(circuit.num_qubits(), Stage::Lowered, gates)
        .expect("lowering only reuses the original indices")
}
