//! Dense complex oracle for small registers.
//!
//! Basis convention: qubit `q` is bit `q` of the basis index, so qubit 0 is
//! the least significant bit. Inside a two-qubit block the first (target)
//! qubit is the more significant of the pair, i.e. the local index is
//! `(target_bit << 1) | control_bit`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::circuit_ir::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Largest register for which full unitaries are built.
pub const MATRIX_CAP: usize = 12;
/// Largest register for state-vector simulation.
pub const STATE_CAP: usize = 24;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_cap(num_qubits: usize, cap: usize) -> Result<()> {
    if num_qubits > cap {
        Err(Error::Capacity { num_qubits, cap })
    } else {
        Ok(())
    }
}

/// The gate's own 2x2 or 4x4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalMatrix {
    One([[Complex64; 2]; 2]),
    Two([[Complex64; 4]; 4]),
}

fn expi(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn diag4(d: [Complex64; 4]) -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    for (i, v) in d.into_iter().enumerate() {
        m[i][i] = v;
    }
    m
}

fn perm4(p: [usize; 4]) -> [[Complex64; 4]; 4] {
    // column c maps to row p[c]
    let mut m = [[ZERO; 4]; 4];
    for (c, r) in p.into_iter().enumerate() {
        m[r][c] = ONE;
    }
    m
}

pub fn local_matrix(gate: &Gate) -> LocalMatrix {
    match gate {
        Gate::H(_) => {
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            LocalMatrix::One([[s, s], [s, -s]])
        }
        Gate::Ry(_, a) => {
            let half = a.radians() / 2.0;
            let (s, c) = half.sin_cos();
            LocalMatrix::One([
                [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
            ])
        }
        Gate::Rz(_, a) => {
            let half = a.radians() / 2.0;
            LocalMatrix::One([[expi(half), ZERO], [ZERO, expi(-half)]])
        }
        Gate::GlobalPhase(_, a) => {
            let p = expi(a.radians());
            LocalMatrix::One([[p, ZERO], [ZERO, p]])
        }
        Gate::CPhase { angle, .. } => {
            LocalMatrix::Two(diag4([ONE, ONE, ONE, expi(angle.radians())]))
        }
        Gate::Ising { angle, .. } => {
            let t = angle.radians();
            LocalMatrix::Two(diag4([expi(t), expi(-t), expi(-t), expi(t)]))
        }
        // |t c>: flip t when c = 1, so 01 <-> 11
        Gate::Xor { .. } => LocalMatrix::Two(perm4([0, 3, 2, 1])),
        Gate::Swap(..) => LocalMatrix::Two(perm4([0, 2, 1, 3])),
    }
}

/// Dense `2^n x 2^n` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    num_qubits: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn identity(num_qubits: usize) -> Result<Self> {
        check_cap(num_qubits, MATRIX_CAP)?;
        let dim = 1usize << num_qubits;
        let mut data = vec![ZERO; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = ONE;
        }
        Ok(UnitaryMatrix { num_qubits, data })
    }

    /// Wraps row-major data; `data.len()` must be `4^num_qubits`.
    pub fn from_rows(num_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_cap(num_qubits, MATRIX_CAP)?;
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(UnitaryMatrix { num_qubits, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        let dim = self.dim();
        (0..dim).map(|r| self.data[r * dim + col]).collect()
    }

    pub fn scale(&self, s: Complex64) -> UnitaryMatrix {
        UnitaryMatrix {
            num_qubits: self.num_qubits,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        UnitaryMatrix {
            num_qubits: self.num_qubits,
            data,
        }
    }

    /// Plain dense product `self * rhs`.
    pub fn matmul(&self, rhs: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        self.same_shape(rhs)?;
        let dim = self.dim();
        let mut data = vec![ZERO; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.data[r * dim + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * dim..(k + 1) * dim];
                for (out, &b) in data[r * dim..(r + 1) * dim].iter_mut().zip(row) {
                    *out += a * b;
                }
            }
        }
        Ok(UnitaryMatrix {
            num_qubits: self.num_qubits,
            data,
        })
    }

    fn same_shape(&self, other: &UnitaryMatrix) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    /// `tr(self^dagger * other)`, i.e. the Frobenius inner product.
    pub fn inner(&self, other: &UnitaryMatrix) -> Result<Complex64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn frobenius_distance(&self, other: &UnitaryMatrix) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `||U^dagger U - I||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.adjoint().matmul(self).expect("same shape");
        let id = UnitaryMatrix::identity(self.num_qubits).expect("within cap");
        product.frobenius_distance(&id).expect("same shape")
    }

    /// Debug dump: one line per row of space-separated `re,im` pairs.
    pub fn to_text(&self) -> String {
        let dim = self.dim();
        let mut out = String::new();
        for r in 0..dim {
            let row: Vec<String> = (0..dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:.15e},{:.15e}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_cap(num_qubits, STATE_CAP)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} outside dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(num_qubits, STATE_CAP)?;
        if amps.len() != 1 << num_qubits {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                1usize << num_qubits,
                amps.len()
            )));
        }
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn apply_gate(&mut self, gate: &Gate) {
        let amps = &mut self.amps;
        match (local_matrix(gate), gate.qubits()) {
            (LocalMatrix::One(m), (q, None)) => {
                let stride = 1usize << q;
                for base in 0..amps.len() {
                    if base & stride != 0 {
                        continue;
                    }
                    let (a0, a1) = (amps[base], amps[base | stride]);
                    amps[base] = m[0][0] * a0 + m[0][1] * a1;
                    amps[base | stride] = m[1][0] * a0 + m[1][1] * a1;
                }
            }
            (LocalMatrix::Two(m), (t, Some(c))) => {
                let (bt, bc) = (1usize << t, 1usize << c);
                for base in 0..amps.len() {
                    if base & (bt | bc) != 0 {
                        continue;
                    }
                    let idx = [base, base | bc, base | bt, base | bt | bc];
                    let v = idx.map(|i| amps[i]);
                    for (row, &i) in idx.iter().enumerate() {
                        amps[i] = (0..4).map(|k| m[row][k] * v[k]).sum();
                    }
                }
            }
            _ => unreachable!("local matrix arity always matches the gate"),
        }
    }
}

/// Embeds the gate in a `2^n`-dimensional register, identity elsewhere.
pub fn gate_unitary(gate: &Gate, num_qubits: usize) -> Result<UnitaryMatrix> {
    check_cap(num_qubits, MATRIX_CAP)?;
    let (a, b) = gate.qubits();
    for q in std::iter::once(a).chain(b) {
        if q >= num_qubits {
            return Err(Error::Index {
                index: q,
                num_qubits,
            });
        }
    }
    let dim = 1usize << num_qubits;
    let mut data = vec![ZERO; dim * dim];
    // entry (r, c) is the local entry when r and c agree off the gate's wires
    let (mask, local_index): (usize, Box<dyn Fn(usize) -> usize>) = match b {
        None => (1 << a, Box::new(move |i| (i >> a) & 1)),
        Some(b) => (
            (1 << a) | (1 << b),
            Box::new(move |i| (((i >> a) & 1) << 1) | ((i >> b) & 1)),
        ),
    };
    let local = local_matrix(gate);
    for r in 0..dim {
        for c in 0..dim {
            if (r & !mask) != (c & !mask) {
                continue;
            }
            let (lr, lc) = (local_index(r), local_index(c));
            data[r * dim + c] = match &local {
                LocalMatrix::One(m) => m[lr][lc],
                LocalMatrix::Two(m) => m[lr][lc],
            };
        }
    }
    Ok(UnitaryMatrix { num_qubits, data })
}

/// Runs the circuit on `state` gate by gate without building a matrix.
pub fn apply(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    if circuit.num_qubits() != state.num_qubits {
        return Err(Error::InvalidArgument(format!(
            "circuit has {} qubits, state has {}",
            circuit.num_qubits(),
            state.num_qubits
        )));
    }
    let mut out = state.clone();
    for g in circuit.gates() {
        out.apply_gate(g);
    }
    Ok(out)
}

pub fn circuit_unitary(circuit: &Circuit) -> Result<UnitaryMatrix> {
    circuit_unitary_with(circuit, Execution::default())
}

/// Full unitary; column `i` is the circuit applied to `|i>`. Columns are
/// independent and are evaluated in parallel when `exec` allows.
pub fn circuit_unitary_with(circuit: &Circuit, exec: Execution) -> Result<UnitaryMatrix> {
    let n = circuit.num_qubits();
    check_cap(n, MATRIX_CAP)?;
    let dim = 1usize << n;
    let columns = exec.map_range(dim, |i| {
        let basis = StateVector::basis(n, i).expect("within cap");
        apply(circuit, &basis).expect("dimensions match").amps
    });
    let mut data = vec![ZERO; dim * dim];
    for (c, col) in columns.into_iter().enumerate() {
        for (r, z) in col.into_iter().enumerate() {
            data[r * dim + c] = z;
        }
    }
    Ok(UnitaryMatrix {
        num_qubits: n,
        data,
    })
}

/// `F[c, x] = e^{2 pi i c x / N} / sqrt(N)` with `N = 2^n`.
pub fn dft_matrix(num_qubits: usize) -> Result<UnitaryMatrix> {
    check_cap(num_qubits, MATRIX_CAP)?;
    let dim = 1usize << num_qubits;
    let norm = 1.0 / (dim as f64).sqrt();
    let mut data = Vec::with_capacity(dim * dim);
    for c in 0..dim {
        for x in 0..dim {
            // reduce c*x mod N first so the phase argument stays small
            let k = (c * x) % dim;
            data.push(expi(2.0 * PI * k as f64 / dim as f64) * norm);
        }
    }
    Ok(UnitaryMatrix { num_qubits, data })
}

/// Outcome of comparing two unitaries modulo a global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatch {
    pub equal: bool,
    /// `lambda` with `a ~= lambda * b`, present only when `equal`.
    pub phase: Option<Complex64>,
    /// `||a - lambda * b||_F` for the best unit-modulus `lambda` found.
    pub residual: f64,
}

/// Tests whether `a = lambda * b` for some `|lambda| = 1` within `tol`
/// (Frobenius norm).
///
/// `lambda` is the normalized overlap `tr(b^dagger a) / |tr(b^dagger a)|`,
/// which minimizes `||a - lambda b||_F`. When the overlap vanishes the
/// largest-magnitude entry of `b` is used instead.
pub fn equal_up_to_global_phase(
    a: &UnitaryMatrix,
    b: &UnitaryMatrix,
    tol: f64,
) -> Result<PhaseMatch> {
    let overlap = b.inner(a)?;
    let lambda = if overlap.norm() > 1e-300 {
        overlap / overlap.norm()
    } else {
        let (idx, pivot) = b
            .data
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .expect("non-empty matrix");
        let ratio = a.data[idx] / pivot;
        if ratio.norm() > 0.0 {
            ratio / ratio.norm()
        } else {
            ONE
        }
    };
    let residual = a.frobenius_distance(&b.scale(lambda))?;
    let equal = residual <= tol;
    Ok(PhaseMatch {
        equal,
        phase: equal.then_some(lambda),
        residual,
    })
}

/// `|tr(a^dagger b)| / 2^n`; 1 exactly when equal up to phase.
pub fn fidelity(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<f64> {
    Ok(a.inner(b)?.norm() / a.dim() as f64)
}
