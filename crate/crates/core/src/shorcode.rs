//! Repetition codes, the nine-qubit code and its single-error correction.
//!
//! Nine-qubit amplitudes are indexed with qubit 1 as the most significant
//! bit. Qubits are grouped in triplets (1–3, 4–6, 7–9), and each triplet is
//! described in the up/down basis `|↑⟩ = (|000⟩+|111⟩)/√2`,
//! `|↓⟩ = (|000⟩-|111⟩)/√2` together with their single-bit-flipped versions.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumOperation;
use crate::error::{Error, Result};
use crate::linalg::{
    basis_outer, c64, identity, kron, minus_i_sigma_y, sigma_x, sigma_z, trace, ComplexMatrix,
    ComplexVector, C64,
};
use crate::random::{random_unit_vector, rng_for};
use crate::reversal::CodeSubspace;

pub const QUBITS: usize = 9;
pub const DIM: usize = 1 << QUBITS;

/// Norm allowed outside the expected subspace before a state is rejected.
pub const SUBSPACE_TOL: f64 = 1e-9;

/// Fidelities below `1 - FAILURE_TOL` count as decoding failures.
pub const FAILURE_TOL: f64 = 1e-9;

/// Normalized single-qubit state `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalQubit {
    alpha: C64,
    beta: C64,
}

impl LogicalQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "logical amplitudes have norm² {norm}"
            )));
        }
        Ok(LogicalQubit { alpha, beta })
    }

    /// Rescales nonzero amplitudes to unit norm.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero logical amplitudes".into()));
        }
        Self::new(alpha / norm, beta / norm)
    }

    pub fn zero() -> Self {
        LogicalQubit {
            alpha: c64(1.0, 0.0),
            beta: c64(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        LogicalQubit {
            alpha: c64(0.0, 0.0),
            beta: c64(1.0, 0.0),
        }
    }

    /// Haar-random pure state.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v = random_unit_vector(2, rng);
        Self::normalized(v[0], v[1]).expect("unit vector")
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &LogicalQubit) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }

    /// Global phase fixed so that `α ≥ 0`, or `β ≥ 0` when `α` vanishes.
    pub fn gauge_fixed(&self) -> Self {
        let pivot = if self.alpha.norm() > 1e-12 {
            self.alpha
        } else {
            self.beta
        };
        let phase = pivot.conj() / pivot.norm();
        LogicalQubit {
            alpha: self.alpha * phase,
            beta: self.beta * phase,
        }
    }
}

/// Unit vector of nine-qubit amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct NineQubitState {
    amplitudes: ComplexVector,
}

impl NineQubitState {
    pub fn new(amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.len() != DIM {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes, expected {DIM}",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!(
                "nine-qubit state has norm {norm}"
            )));
        }
        Ok(NineQubitState { amplitudes })
    }

    /// Normalizes a nonzero vector.
    pub fn from_unnormalized(amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= 1e-300 {
            return Err(Error::ZeroProbability(norm * norm));
        }
        Self::new(amplitudes.unscale(norm))
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn overlap(&self, other: &NineQubitState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Single-qubit error type. `PhaseBitFlip` is `-iσ₂ = σ₁σ₃`, a phase flip
/// followed by a bit flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliKind {
    Identity,
    BitFlip,
    PhaseFlip,
    PhaseBitFlip,
}

impl PauliKind {
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            PauliKind::Identity => identity(2),
            PauliKind::BitFlip => sigma_x(),
            PauliKind::PhaseFlip => sigma_z(),
            PauliKind::PhaseBitFlip => minus_i_sigma_y(),
        }
    }

    /// Inverse as a 2×2 matrix (`-iσ₂` squares to `-1`).
    pub fn inverse_matrix(self) -> ComplexMatrix {
        match self {
            PauliKind::PhaseBitFlip => -minus_i_sigma_y(),
            other => other.matrix(),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PauliKind::Identity => "1",
            PauliKind::BitFlip => "σ1",
            PauliKind::PhaseFlip => "σ3",
            PauliKind::PhaseBitFlip => "-iσ2",
        }
    }

    fn description(self) -> &'static str {
        match self {
            PauliKind::Identity => "no error",
            PauliKind::BitFlip => "bit flip",
            PauliKind::PhaseFlip => "phase flip",
            PauliKind::PhaseBitFlip => "phase-bit flip",
        }
    }
}

/// A Pauli-type error on one of the nine qubits (numbered 1 to 9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub qubit: usize,
    pub kind: PauliKind,
}

impl ErrorSpec {
    pub fn new(qubit: usize, kind: PauliKind) -> Result<Self> {
        if !(1..=QUBITS).contains(&qubit) {
            return Err(Error::IndexOutOfRange(qubit));
        }
        Ok(ErrorSpec { qubit, kind })
    }

    pub fn none() -> Self {
        ErrorSpec {
            qubit: 1,
            kind: PauliKind::Identity,
        }
    }

    /// The 27 single-qubit errors: bit flips, then phase flips, then
    /// phase-bit flips, each on qubits 1 through 9.
    pub fn all_single_qubit() -> Vec<ErrorSpec> {
        [
            PauliKind::BitFlip,
            PauliKind::PhaseFlip,
            PauliKind::PhaseBitFlip,
        ]
        .into_iter()
        .flat_map(|kind| (1..=QUBITS).map(move |qubit| ErrorSpec { qubit, kind }))
        .collect()
    }

    /// `"bit flip on 4th qubit"`.
    pub fn label(&self) -> String {
        match self.kind {
            PauliKind::Identity => "no error".into(),
            kind => format!("{} on {} qubit", kind.description(), ordinal(self.qubit)),
        }
    }

    /// `"1⊗σ1⊗1⊗…"`.
    pub fn operator_label(&self) -> String {
        (1..=QUBITS)
            .map(|q| {
                if q == self.qubit {
                    self.kind.symbol()
                } else {
                    "1"
                }
            })
            .collect::<Vec<_>>()
            .join("⊗")
    }

    fn triplet(&self) -> usize {
        (self.qubit - 1) / 3
    }

    fn position(&self) -> usize {
        (self.qubit - 1) % 3 + 1
    }
}

fn ordinal(n: usize) -> String {
    let suffix = match n {
        1 => "st",
        2 => "nd",
        3 => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

/// Applies a 2×2 operator to one qubit of a nine-qubit amplitude vector.
pub fn apply_single_qubit(
    v: &ComplexVector,
    qubit: usize,
    op: &ComplexMatrix,
) -> Result<ComplexVector> {
    if !(1..=QUBITS).contains(&qubit) {
        return Err(Error::IndexOutOfRange(qubit));
    }
    if v.len() != DIM || op.shape() != (2, 2) {
        return Err(Error::DimensionMismatch(
            "expected 512 amplitudes and a 2x2 operator".into(),
        ));
    }
    let mask = 1usize << (QUBITS - qubit);
    let mut out = v.clone();
    for i in (0..DIM).filter(|i| i & mask == 0) {
        let j = i | mask;
        let (a0, a1) = (v[i], v[j]);
        out[i] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        out[j] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
    Ok(out)
}

/// One of the eight up/down-type states of a qubit triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TripletState {
    Up,
    Down,
    /// `σ₁` on position 1–3 applied to `|↑⟩`.
    UpFlipped(usize),
    /// `σ₁` on position 1–3 applied to `|↓⟩`.
    DownFlipped(usize),
}

impl TripletState {
    pub fn all() -> [TripletState; 8] {
        use TripletState::*;
        [
            Up,
            Down,
            UpFlipped(1),
            UpFlipped(2),
            UpFlipped(3),
            DownFlipped(1),
            DownFlipped(2),
            DownFlipped(3),
        ]
    }

    pub fn vector(self) -> ComplexVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (sign, flip) = match self {
            TripletState::Up => (1.0, None),
            TripletState::Down => (-1.0, None),
            TripletState::UpFlipped(i) => (1.0, Some(i)),
            TripletState::DownFlipped(i) => (-1.0, Some(i)),
        };
        let mut v = ComplexVector::zeros(8);
        let (mut low, mut high) = (0usize, 7usize);
        if let Some(i) = flip {
            let bit = 1 << (3 - i);
            low ^= bit;
            high ^= bit;
        }
        v[low] = c64(r, 0.0);
        v[high] = c64(sign * r, 0.0);
        v
    }

    pub fn label(self) -> String {
        const SUB: [&str; 4] = ["", "₁", "₂", "₃"];
        match self {
            TripletState::Up => "↑".into(),
            TripletState::Down => "↓".into(),
            TripletState::UpFlipped(i) => format!("↑{}", SUB[i]),
            TripletState::DownFlipped(i) => format!("↓{}", SUB[i]),
        }
    }

    /// Effect of a single-qubit error at position `position` of this triplet,
    /// valid for the unflipped states.
    fn after(self, kind: PauliKind, position: usize) -> TripletState {
        use TripletState::*;
        match (kind, self) {
            (PauliKind::Identity, s) => s,
            (PauliKind::BitFlip, Up) => UpFlipped(position),
            (PauliKind::BitFlip, Down) => DownFlipped(position),
            (PauliKind::PhaseFlip, Up) => Down,
            (PauliKind::PhaseFlip, Down) => Up,
            (PauliKind::PhaseBitFlip, Up) => DownFlipped(position),
            (PauliKind::PhaseBitFlip, Down) => UpFlipped(position),
            (_, s) => s,
        }
    }
}

/// The eight triplet basis states in the order of [`TripletState::all`].
pub fn triplet_basis() -> Vec<ComplexVector> {
    TripletState::all().iter().map(|s| s.vector()).collect()
}

fn product_state(parts: [TripletState; 3]) -> ComplexVector {
    parts[0]
        .vector()
        .kronecker(&parts[1].vector())
        .kronecker(&parts[2].vector())
}

fn product_label(parts: [TripletState; 3]) -> String {
    format!(
        "|{}{}{}⟩",
        parts[0].label(),
        parts[1].label(),
        parts[2].label()
    )
}

fn symbolic_after(error: &ErrorSpec, start: TripletState) -> [TripletState; 3] {
    let mut parts = [start; 3];
    if error.kind != PauliKind::Identity {
        let t = error.triplet();
        parts[t] = parts[t].after(error.kind, error.position());
    }
    parts
}

/// `α|↑↑↑⟩ + β|↓↓↓⟩`.
pub fn encode(q: &LogicalQubit) -> NineQubitState {
    let code = ShorCode::get();
    let v = code.logical_zero.map(|z| z * q.alpha) + code.logical_one.map(|z| z * q.beta);
    NineQubitState::new(v).expect("encoded states are normalized")
}

pub fn apply_error(s: &NineQubitState, e: &ErrorSpec) -> Result<NineQubitState> {
    let e = ErrorSpec::new(e.qubit, e.kind)?;
    let v = apply_single_qubit(s.amplitudes(), e.qubit, &e.kind.matrix())?;
    NineQubitState::new(v)
}

/// One row of the error table.
#[derive(Debug, Clone)]
pub struct Table1Row {
    pub error: ErrorSpec,
    pub error_label: String,
    pub operator_label: String,
    pub state_label: String,
    pub state: NineQubitState,
}

/// The encoded state followed by its image under each of the 27 single-qubit errors.
pub fn table1(q: &LogicalQubit) -> Vec<Table1Row> {
    let encoded = encode(q);
    std::iter::once(ErrorSpec::none())
        .chain(ErrorSpec::all_single_qubit())
        .map(|error| {
            let zero = product_label(symbolic_after(&error, TripletState::Up));
            let one = product_label(symbolic_after(&error, TripletState::Down));
            Table1Row {
                error,
                error_label: error.label(),
                operator_label: error.operator_label(),
                state_label: format!("α{zero}+β{one}"),
                state: apply_error(&encoded, &error).expect("errors in range"),
            }
        })
        .collect()
}

fn format_real(x: f64) -> String {
    // Adding zero folds -0 into 0 so the text does not depend on signed zeros.
    format!("{}", x + 0.0)
}

/// Tab-separated export with columns error, operator, state and the nonzero
/// amplitudes written as `index:(re,im)` separated by spaces.
pub fn table1_tsv(rows: &[Table1Row]) -> String {
    let mut out = String::from("error\toperator\tstate\tamplitudes\n");
    for row in rows {
        let amps: Vec<String> = row
            .state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 1e-15)
            .map(|(i, z)| format!("{i}:({},{})", format_real(z.re), format_real(z.im)))
            .collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            row.error_label,
            row.operator_label,
            row.state_label,
            amps.join(" ")
        );
    }
    out
}

/// An orthogonal two-dimensional subspace reached from the code by a class
/// of errors that act identically on it.
#[derive(Debug, Clone)]
pub struct SyndromeClass {
    pub id: usize,
    pub representative: ErrorSpec,
    pub members: Vec<ErrorSpec>,
    /// `E|0_L⟩` and `E|1_L⟩` for the representative `E`.
    pub basis: [ComplexVector; 2],
    sparse: [Vec<(usize, C64)>; 2],
}

impl SyndromeClass {
    pub fn label(&self) -> String {
        match self.representative.kind {
            PauliKind::Identity => "no error".into(),
            PauliKind::PhaseFlip => format!(
                "phase flip on triplet {}",
                self.representative.triplet() + 1
            ),
            kind => format!(
                "{} on qubit {}",
                kind.description(),
                self.representative.qubit
            ),
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        let [a, b] = &self.basis;
        a * a.adjoint() + b * b.adjoint()
    }

    fn coefficients(&self, v: &ComplexVector) -> (C64, C64) {
        let dot = |s: &[(usize, C64)]| s.iter().map(|&(i, z)| z.conj() * v[i]).sum::<C64>();
        (dot(&self.sparse[0]), dot(&self.sparse[1]))
    }

    fn component(&self, v: &ComplexVector) -> ComplexVector {
        let (a, b) = self.coefficients(v);
        let mut out = ComplexVector::zeros(v.len());
        for (s, w) in self.sparse.iter().zip([a, b]) {
            for &(i, z) in s {
                out[i] += z * w;
            }
        }
        out
    }
}

/// Result of a syndrome measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyndromeOutcome {
    pub class_id: usize,
    pub label: String,
    pub members: Vec<ErrorSpec>,
    pub probability: f64,
}

impl SyndromeOutcome {
    pub fn class(&self) -> &'static SyndromeClass {
        &ShorCode::get().classes[self.class_id]
    }
}

/// Precomputed logical states and the 22 syndrome classes.
#[derive(Debug)]
pub struct ShorCode {
    logical_zero: ComplexVector,
    logical_one: ComplexVector,
    classes: Vec<SyndromeClass>,
}

fn sparse(v: &ComplexVector) -> Vec<(usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, z)| z.norm() > 0.0)
        .map(|(i, &z)| (i, z))
        .collect()
}

impl ShorCode {
    pub fn get() -> &'static ShorCode {
        static CODE: OnceLock<ShorCode> = OnceLock::new();
        CODE.get_or_init(ShorCode::build)
    }

    fn build() -> ShorCode {
        use TripletState::{Down, Up};
        let logical_zero = product_state([Up, Up, Up]);
        let logical_one = product_state([Down, Down, Down]);
        let mut classes = Vec::with_capacity(22);
        let mut push = |representative: ErrorSpec, members: Vec<ErrorSpec>| {
            let apply = |v: &ComplexVector| {
                apply_single_qubit(v, representative.qubit, &representative.kind.matrix())
                    .expect("valid qubit")
            };
            let basis = [apply(&logical_zero), apply(&logical_one)];
            let sparse = [sparse(&basis[0]), sparse(&basis[1])];
            let id = classes.len();
            classes.push(SyndromeClass {
                id,
                representative,
                members,
                basis,
                sparse,
            });
        };
        push(ErrorSpec::none(), vec![ErrorSpec::none()]);
        for qubit in 1..=QUBITS {
            let e = ErrorSpec {
                qubit,
                kind: PauliKind::BitFlip,
            };
            push(e, vec![e]);
        }
        for t in 0..3 {
            let members: Vec<_> = (1..=3)
                .map(|k| ErrorSpec {
                    qubit: 3 * t + k,
                    kind: PauliKind::PhaseFlip,
                })
                .collect();
            push(members[0], members);
        }
        for qubit in 1..=QUBITS {
            let e = ErrorSpec {
                qubit,
                kind: PauliKind::PhaseBitFlip,
            };
            push(e, vec![e]);
        }
        ShorCode {
            logical_zero,
            logical_one,
            classes,
        }
    }

    pub fn logical_zero(&self) -> &ComplexVector {
        &self.logical_zero
    }

    pub fn logical_one(&self) -> &ComplexVector {
        &self.logical_one
    }

    pub fn classes(&self) -> &[SyndromeClass] {
        &self.classes
    }

    /// Class index reached by a single error: 0 for none, 1–9 bit flips,
    /// 10–12 phase flips per triplet, 13–21 phase-bit flips.
    pub fn class_of(&self, e: &ErrorSpec) -> usize {
        match e.kind {
            PauliKind::Identity => 0,
            PauliKind::BitFlip => e.qubit,
            PauliKind::PhaseFlip => 10 + e.triplet(),
            PauliKind::PhaseBitFlip => 12 + e.qubit,
        }
    }

    pub fn code_subspace(&self) -> CodeSubspace {
        CodeSubspace::from_vectors(&[self.logical_zero.clone(), self.logical_one.clone()])
            .expect("orthonormal")
    }

    /// The 44 basis vectors of all classes, zero-logical images first.
    pub fn pooled_states(&self) -> Vec<ComplexVector> {
        let zeros = self.classes.iter().map(|c| c.basis[0].clone());
        let ones = self.classes.iter().map(|c| c.basis[1].clone());
        zeros.chain(ones).collect()
    }

    /// Born weights of each class and the norm of the part outside all of them.
    fn weights(&self, v: &ComplexVector) -> (Vec<f64>, f64) {
        let weights: Vec<f64> = self
            .classes
            .iter()
            .map(|c| {
                let (a, b) = c.coefficients(v);
                a.norm_sqr() + b.norm_sqr()
            })
            .collect();
        let inside: f64 = weights.iter().sum();
        let outside = (v.norm_squared() - inside).max(0.0).sqrt();
        (weights, outside)
    }
}

fn collapse(class: &SyndromeClass, v: &ComplexVector) -> Result<NineQubitState> {
    NineQubitState::from_unnormalized(class.component(v))
}

fn outcome_for(class: &SyndromeClass, probability: f64) -> SyndromeOutcome {
    SyndromeOutcome {
        class_id: class.id,
        label: class.label(),
        members: class.members.clone(),
        probability,
    }
}

/// Picks index `k` with probability `weights[k] / total` from a uniform draw in `[0, 1)`.
fn pick(weights: &[f64], total: f64, u: f64) -> Option<usize> {
    let mut acc = 0.0;
    let target = u * total;
    for (k, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        if target < acc {
            return Some(k);
        }
    }
    None
}

/// Projective measurement onto the 22 orthogonal class subspaces.
pub fn syndrome_measure_with<R: Rng + ?Sized>(
    s: &NineQubitState,
    rng: &mut R,
) -> Result<(SyndromeOutcome, NineQubitState)> {
    let code = ShorCode::get();
    let (mut weights, outside) = code.weights(s.amplitudes());
    if outside > SUBSPACE_TOL {
        return Err(Error::ResidualOutsideSubspaces(outside));
    }
    // Weights at rounding level are treated as exact zeros.
    for w in weights.iter_mut() {
        if *w < 1e-20 {
            *w = 0.0;
        }
    }
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random();
    let k = pick(&weights, total, u)
        .unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).unwrap_or(0));
    let class = &code.classes[k];
    Ok((
        outcome_for(class, weights[k] / total),
        collapse(class, s.amplitudes())?,
    ))
}

/// Syndrome measurement driven by stream 0 of `seed`.
pub fn syndrome_measure(
    s: &NineQubitState,
    seed: u64,
) -> Result<(SyndromeOutcome, NineQubitState)> {
    syndrome_measure_with(s, &mut rng_for(seed, 0))
}

/// Maps the outcome's subspace back to the code with the inverse of the
/// class representative.
pub fn correct(s: &NineQubitState, outcome: &SyndromeOutcome) -> Result<NineQubitState> {
    let class = ShorCode::get()
        .classes
        .get(outcome.class_id)
        .ok_or(Error::IndexOutOfRange(outcome.class_id))?;
    let residual = (s.amplitudes() - class.component(s.amplitudes())).norm();
    if residual > SUBSPACE_TOL {
        return Err(Error::NotInSubspace(residual));
    }
    let rep = class.representative;
    let v = apply_single_qubit(s.amplitudes(), rep.qubit, &rep.kind.inverse_matrix())?;
    NineQubitState::new(v)
}

/// Reads `(α, β)` off a code state, with the global phase fixed.
pub fn decode(s: &NineQubitState) -> Result<LogicalQubit> {
    let code = ShorCode::get();
    let alpha = code.logical_zero.dotc(s.amplitudes());
    let beta = code.logical_one.dotc(s.amplitudes());
    let inside = code.logical_zero.map(|z| z * alpha) + code.logical_one.map(|z| z * beta);
    let residual = (s.amplitudes() - inside).norm();
    if residual > SUBSPACE_TOL {
        return Err(Error::NotInSubspace(residual));
    }
    Ok(LogicalQubit::normalized(alpha, beta)?.gauge_fixed())
}

/// Single-qubit decay with dephasing: `√(1-γ)|0⟩⟨0|`, `√γ|1⟩⟨0|`, `|1⟩⟨1|`.
pub fn decay_channel(gamma: f64) -> Result<QuantumOperation> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain(gamma, "[0, 1]"));
    }
    QuantumOperation::new(vec![
        basis_outer(2, 0, 0).scale((1.0 - gamma).sqrt()),
        basis_outer(2, 1, 0).scale(gamma.sqrt()),
        basis_outer(2, 1, 1),
    ])
}

/// Basis `{1, σ₁, -iσ₂, σ₃}` for single-qubit operators.
pub fn pauli_basis() -> [ComplexMatrix; 4] {
    [identity(2), sigma_x(), minus_i_sigma_y(), sigma_z()]
}

/// Coefficients `c_P = tr(P† m) / 2` of `m` in [`pauli_basis`].
pub fn pauli_coefficients(m: &ComplexMatrix) -> [C64; 4] {
    pauli_basis().map(|p| trace(&(p.adjoint() * m)) / 2.0)
}

/// Record of one decay-and-correct run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayDemo {
    pub input: LogicalQubit,
    pub qubit: usize,
    pub gamma: f64,
    /// Index into the decay operators (0, 1 or 2).
    pub branch: usize,
    pub branch_probability: f64,
    pub outcome: SyndromeOutcome,
    pub output: LogicalQubit,
    pub fidelity: f64,
    pub transcript: Vec<String>,
}

/// Samples a decay branch on one qubit of the encoded state, measures the
/// syndrome, corrects and decodes.
pub fn correct_decay_demo(
    q: &LogicalQubit,
    qubit: usize,
    gamma: f64,
    seed: u64,
) -> Result<DecayDemo> {
    if !(1..=QUBITS).contains(&qubit) {
        return Err(Error::IndexOutOfRange(qubit));
    }
    let channel = decay_channel(gamma)?;
    let mut rng = rng_for(seed, 0);
    let encoded = encode(q);
    let branches: Vec<ComplexVector> = channel
        .kraus()
        .iter()
        .map(|a| apply_single_qubit(encoded.amplitudes(), qubit, a))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = branches.iter().map(|v| v.norm_squared()).collect();
    let total: f64 = weights.iter().sum();
    let u: f64 = rng.random();
    let branch = pick(&weights, total, u)
        .unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).unwrap_or(0));
    let damaged = NineQubitState::from_unnormalized(branches[branch].clone())?;
    let (outcome, collapsed) = syndrome_measure_with(&damaged, &mut rng)?;
    let corrected = correct(&collapsed, &outcome)?;
    let output = decode(&corrected)?;
    let fidelity = q.fidelity(&output);
    let transcript = vec![
        format!(
            "decay operator A{} on qubit {qubit} (probability {:.6})",
            branch + 1,
            weights[branch] / total
        ),
        format!(
            "syndrome class {}: {} (probability {:.6})",
            outcome.class_id, outcome.label, outcome.probability
        ),
        format!(
            "correction: {}",
            if outcome.class_id == 0 {
                "none".to_string()
            } else {
                format!("inverse of {}", outcome.class().representative.label())
            }
        ),
        format!("fidelity {:.12}", fidelity),
    ];
    Ok(DecayDemo {
        input: *q,
        qubit,
        gamma,
        branch,
        branch_probability: weights[branch] / total,
        outcome,
        output,
        fidelity,
        transcript,
    })
}

/// Largest `r` with `2(1 + rN) ≤ 2^N`.
pub fn hamming_bound(n: u32) -> Result<u64> {
    if n == 0 || n > 64 {
        return Err(Error::Domain(n as f64, "1..=64 qubits"));
    }
    Ok((((1u128 << (n - 1)) - 1) / n as u128) as u64)
}

/// Probability that majority voting over three copies fails, by enumerating
/// all eight flip patterns.
pub fn repetition_failure_exact(p: f64) -> f64 {
    (0u8..8)
        .filter(|pattern| pattern.count_ones() >= 2)
        .map(|pattern| {
            let flips = pattern.count_ones() as i32;
            p.powi(flips) * (1.0 - p).powi(3 - flips)
        })
        .sum()
}

/// Empirical and exact logical error rates of the three-bit repetition code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionStats {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub failures: u64,
    pub empirical_rate: f64,
    pub exact_rate: f64,
    /// `3p²`.
    pub leading_order: f64,
    /// Binomial standard deviation of the empirical rate around the exact rate.
    pub sigma: f64,
}

impl RepetitionStats {
    /// Distance between empirical and exact rates in standard deviations.
    pub fn z_score(&self) -> f64 {
        if self.sigma == 0.0 {
            if self.empirical_rate == self.exact_rate {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.empirical_rate - self.exact_rate).abs() / self.sigma
        }
    }
}

/// Seeded Monte Carlo of majority voting; trial `t` uses stream `t` of `seed`.
pub fn classical_repetition(p: f64, trials: u64, seed: u64) -> Result<RepetitionStats> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(p, "[0, 1]"));
    }
    let failures: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(seed, t);
            let flips = (0..3).filter(|_| rng.random::<f64>() < p).count();
            u64::from(flips >= 2)
        })
        .sum();
    let exact = repetition_failure_exact(p);
    let empirical = if trials == 0 {
        0.0
    } else {
        failures as f64 / trials as f64
    };
    let sigma = if trials == 0 {
        0.0
    } else {
        (exact * (1.0 - exact) / trials as f64).sqrt()
    };
    Ok(RepetitionStats {
        p,
        trials,
        seed,
        failures,
        empirical_rate: empirical,
        exact_rate: exact,
        leading_order: 3.0 * p * p,
        sigma,
    })
}

/// Outcome of one noisy encode/correct/decode round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub errors: usize,
    pub fidelity: f64,
    /// The damaged state had weight outside every class subspace and that
    /// part was the measured outcome.
    pub escaped: bool,
}

/// Aggregate logical fidelity under independent single-qubit Pauli noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloStats {
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean_fidelity: f64,
    /// Trials with fidelity below `1 - 1e-9`.
    pub failures: u64,
    pub failure_rate: f64,
    /// Trials whose syndrome fell outside all class subspaces.
    pub escapes: u64,
    /// Number of trials with `k` errors, for `k = 0..=9`.
    pub trials_by_error_count: Vec<u64>,
    pub failures_by_error_count: Vec<u64>,
}

/// One trial: random logical state, each qubit independently hit by
/// `σ₁`, `-iσ₂` or `σ₃` with probability `p/3` each, one syndrome round.
pub fn shor_trial(p: f64, seed: u64, trial: u64) -> Result<TrialOutcome> {
    let mut rng = rng_for(seed, trial);
    let q = LogicalQubit::random(&mut rng);
    let mut v = encode(&q).amplitudes().clone();
    let mut errors = 0;
    for qubit in 1..=QUBITS {
        if rng.random::<f64>() < p {
            let kind = [
                PauliKind::BitFlip,
                PauliKind::PhaseBitFlip,
                PauliKind::PhaseFlip,
            ][rng.random_range(0..3)];
            v = apply_single_qubit(&v, qubit, &kind.matrix())?;
            errors += 1;
        }
    }
    let code = ShorCode::get();
    let (weights, outside) = code.weights(&v);
    let u: f64 = rng.random();
    let total = weights.iter().sum::<f64>() + outside * outside;
    let Some(k) = pick(&weights, total, u) else {
        return Ok(TrialOutcome {
            errors,
            fidelity: 0.0,
            escaped: true,
        });
    };
    let class = &code.classes[k];
    let collapsed = collapse(class, &v)?;
    let outcome = outcome_for(class, weights[k] / total);
    let output = decode(&correct(&collapsed, &outcome)?)?;
    Ok(TrialOutcome {
        errors,
        fidelity: q.fidelity(&output),
        escaped: false,
    })
}

/// Runs `trials` independent trials in parallel; trial `t` draws from stream
/// `t` of `seed`, so the result does not depend on scheduling.
pub fn shor_monte_carlo(p: f64, trials: u64, seed: u64) -> Result<MonteCarloStats> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(p, "[0, 1]"));
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| shor_trial(p, seed, t))
        .collect::<Result<_>>()?;
    let mut by_count = vec![0u64; QUBITS + 1];
    let mut failed_by_count = vec![0u64; QUBITS + 1];
    let mut sum = 0.0;
    let mut failures = 0;
    let mut escapes = 0;
    for o in &outcomes {
        sum += o.fidelity;
        by_count[o.errors] += 1;
        if o.fidelity < 1.0 - FAILURE_TOL {
            failures += 1;
            failed_by_count[o.errors] += 1;
        }
        escapes += u64::from(o.escaped);
    }
    let n = trials.max(1) as f64;
    Ok(MonteCarloStats {
        p,
        trials,
        seed,
        mean_fidelity: if trials == 0 { 1.0 } else { sum / n },
        failures,
        failure_rate: if trials == 0 {
            0.0
        } else {
            failures as f64 / n
        },
        escapes,
        trials_by_error_count: by_count,
        failures_by_error_count: failed_by_count,
    })
}

/// A symmetric set of logical test states: the six axis states of the Bloch
/// sphere followed by seeded random states, `n` in total.
pub fn logical_sample(n: usize, seed: u64) -> Vec<LogicalQubit> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let axes = [
        (c64(1.0, 0.0), c64(0.0, 0.0)),
        (c64(0.0, 0.0), c64(1.0, 0.0)),
        (c64(r, 0.0), c64(r, 0.0)),
        (c64(r, 0.0), c64(-r, 0.0)),
        (c64(r, 0.0), c64(0.0, r)),
        (c64(r, 0.0), c64(0.0, -r)),
    ];
    let mut rng = rng_for(seed, 0);
    axes.iter()
        .map(|&(a, b)| LogicalQubit::normalized(a, b).expect("unit"))
        .chain(std::iter::repeat_with(|| LogicalQubit::random(&mut rng)))
        .take(n)
        .collect()
}

/// Kronecker product of single-qubit operators, qubit 1 first.
pub fn nine_qubit_operator(ops: &[ComplexMatrix; QUBITS]) -> ComplexMatrix {
    ops[1..].iter().fold(ops[0].clone(), |acc, m| kron(&acc, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn gram_is_identity(vs: &[ComplexVector], tol: f64) -> bool {
        vs.iter().enumerate().all(|(i, a)| {
            vs.iter().enumerate().all(|(j, b)| {
                let expected = if i == j { 1.0 } else { 0.0 };
                (a.dotc(b) - c64(expected, 0.0)).norm() <= tol
            })
        })
    }

    fn single_qubit_full(qubit: usize, m: &ComplexMatrix) -> ComplexMatrix {
        let mut ops: [ComplexMatrix; QUBITS] = std::array::from_fn(|_| identity(2));
        ops[qubit - 1] = m.clone();
        nine_qubit_operator(&ops)
    }

    #[test]
    fn triplet_examples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let up = TripletState::Up.vector();
        assert!((up[0] - c64(r, 0.)).norm() < 1e-15 && (up[7] - c64(r, 0.)).norm() < 1e-15);
        let z1 = kron(&kron(&sigma_z(), &identity(2)), &identity(2));
        assert!(((&z1 * &up) - TripletState::Down.vector()).norm() < 1e-15);
        assert!(gram_is_identity(&triplet_basis(), 1e-12));
        for i in 1..=3 {
            let mut ops = [identity(2), identity(2), identity(2)];
            ops[i - 1] = sigma_x();
            let xi = kron(&kron(&ops[0], &ops[1]), &ops[2]);
            assert!(((&xi * &up) - TripletState::UpFlipped(i).vector()).norm() < 1e-15);
            assert!(
                ((&xi * TripletState::Down.vector()) - TripletState::DownFlipped(i).vector())
                    .norm()
                    < 1e-15
            );
            let mut ops = [identity(2), identity(2), identity(2)];
            ops[i - 1] = sigma_z();
            let zi = kron(&kron(&ops[0], &ops[1]), &ops[2]);
            assert!(((&zi * &up) - TripletState::Down.vector()).norm() < 1e-15);
        }
    }

    #[test]
    fn encode_examples() {
        let code = ShorCode::get();
        assert_eq!(
            encode(&LogicalQubit::zero()).amplitudes(),
            code.logical_zero()
        );
        assert_eq!(
            encode(&LogicalQubit::one()).amplitudes(),
            code.logical_one()
        );
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let plus = encode(&LogicalQubit::new(c64(r, 0.), c64(r, 0.)).unwrap());
        assert!((code.logical_zero().dotc(plus.amplitudes()) - c64(r, 0.)).norm() < 1e-15);
        assert!((code.logical_one().dotc(plus.amplitudes()) - c64(r, 0.)).norm() < 1e-15);
        assert!(LogicalQubit::new(c64(1., 0.), c64(1., 0.)).is_err());
    }

    #[test]
    fn apply_error_examples() {
        use TripletState::*;
        let q = LogicalQubit::normalized(c64(0.3, 0.1), c64(-0.2, 0.9)).unwrap();
        let s = encode(&q);
        let combo = |z: [TripletState; 3], o: [TripletState; 3]| {
            product_state(z).map(|x| x * q.alpha()) + product_state(o).map(|x| x * q.beta())
        };
        let x1 = apply_error(&s, &ErrorSpec::new(1, PauliKind::BitFlip).unwrap()).unwrap();
        assert!(
            (x1.amplitudes() - combo([UpFlipped(1), Up, Up], [DownFlipped(1), Down, Down])).norm()
                < 1e-14
        );
        let z4 = apply_error(&s, &ErrorSpec::new(4, PauliKind::PhaseFlip).unwrap()).unwrap();
        assert!((z4.amplitudes() - combo([Up, Down, Up], [Down, Up, Down])).norm() < 1e-14);
        let y7 = apply_error(&s, &ErrorSpec::new(7, PauliKind::PhaseBitFlip).unwrap()).unwrap();
        assert!(
            (y7.amplitudes() - combo([Up, Up, DownFlipped(1)], [Down, Down, UpFlipped(1)])).norm()
                < 1e-14
        );
        assert!(matches!(
            apply_error(
                &s,
                &ErrorSpec {
                    qubit: 10,
                    kind: PauliKind::BitFlip
                }
            ),
            Err(Error::IndexOutOfRange(10))
        ));
        assert!(matches!(
            ErrorSpec::new(0, PauliKind::BitFlip),
            Err(Error::IndexOutOfRange(0))
        ));
    }

    #[test]
    fn single_qubit_application_matches_kronecker() {
        let mut rng = rng_for(71, 0);
        let v = random_unit_vector(DIM, &mut rng);
        for qubit in [1, 5, 9] {
            let m = crate::random::random_ginibre(2, &mut rng);
            let fast = apply_single_qubit(&v, qubit, &m).unwrap();
            let slow = single_qubit_full(qubit, &m) * &v;
            assert!((fast - slow).norm() < 1e-12);
        }
    }

    #[test]
    fn table_structure() {
        let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8)).unwrap();
        let rows = table1(&q);
        assert_eq!(rows.len(), 28);
        assert_eq!(rows[0].error_label, "no error");
        assert_eq!(rows[0].state.amplitudes(), encode(&q).amplitudes());
        assert_eq!(rows[1].error_label, "bit flip on 1st qubit");
        assert_eq!(rows[1].operator_label, "σ1⊗1⊗1⊗1⊗1⊗1⊗1⊗1⊗1");
        assert_eq!(rows[1].state_label, "α|↑₁↑↑⟩+β|↓₁↓↓⟩");
        assert_eq!(rows[11].error_label, "phase flip on 2nd qubit");
        assert_eq!(rows[11].state_label, "α|↓↑↑⟩+β|↑↓↓⟩");
        assert_eq!(rows[14].state_label, "α|↑↓↑⟩+β|↓↑↓⟩");
        assert_eq!(rows[19].operator_label, "-iσ2⊗1⊗1⊗1⊗1⊗1⊗1⊗1⊗1");
        assert_eq!(rows[19].state_label, "α|↓₁↑↑⟩+β|↑₁↓↓⟩");
        assert_eq!(rows[27].state_label, "α|↑↑↓₃⟩+β|↓↓↑₃⟩");
        for t in 0..3 {
            let base = 10 + 3 * t;
            for k in 1..3 {
                assert_eq!(rows[base].state, rows[base + k].state);
            }
        }
    }

    #[test]
    fn pooled_states_are_orthonormal() {
        let code = ShorCode::get();
        let pooled = code.pooled_states();
        assert_eq!(pooled.len(), 44);
        assert!(gram_is_identity(&pooled, 1e-10));
        let mut distinct: Vec<ComplexVector> = Vec::new();
        for row in table1(&LogicalQubit::zero()) {
            if !distinct
                .iter()
                .any(|d| (d - row.state.amplitudes()).norm() < 1e-12)
            {
                distinct.push(row.state.amplitudes().clone());
            }
        }
        assert_eq!(distinct.len(), 22);
        // Orthonormality of the pooled vectors makes the class projectors
        // mutually orthogonal; check one projector is idempotent of rank 2.
        let p = code.classes()[13].projector();
        assert!(max_abs_diff(&crate::linalg::matmul(&p, &p), &p) < 1e-12);
        assert!((trace(&p).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn syndrome_examples() {
        let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8)).unwrap();
        let s = encode(&q);
        let (outcome, collapsed) = syndrome_measure(&s, 1).unwrap();
        assert_eq!(outcome.class_id, 0);
        assert!((collapsed.amplitudes() - s.amplitudes()).norm() < 1e-14);

        let z5 = apply_error(&s, &ErrorSpec::new(5, PauliKind::PhaseFlip).unwrap()).unwrap();
        for seed in 0..20 {
            let (outcome, _) = syndrome_measure(&z5, seed).unwrap();
            assert_eq!(outcome.class_id, 11);
            assert_eq!(outcome.label, "phase flip on triplet 2");
            assert_eq!(outcome.members.len(), 3);
            assert!((outcome.probability - 1.0).abs() < 1e-12);
        }

        // Two flips in one triplet act as a single flip, so use different triplets.
        let mut two = apply_error(&s, &ErrorSpec::new(1, PauliKind::BitFlip).unwrap()).unwrap();
        two = apply_error(&two, &ErrorSpec::new(4, PauliKind::BitFlip).unwrap()).unwrap();
        assert!(matches!(
            syndrome_measure(&two, 0),
            Err(Error::ResidualOutsideSubspaces(_))
        ));
    }

    #[test]
    fn decay_branch_probabilities_match_pauli_expansion() {
        let gamma = 0.6;
        let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8)).unwrap();
        let s = encode(&q);
        let a2 = &decay_channel(gamma).unwrap().kraus()[1].clone();
        let damaged =
            NineQubitState::from_unnormalized(apply_single_qubit(s.amplitudes(), 3, a2).unwrap())
                .unwrap();
        let code = ShorCode::get();
        let (weights, outside) = code.weights(damaged.amplitudes());
        assert!(outside < 1e-12);
        // A₂ = √γ (σ₁ + (-iσ₂)) / 2: equal weight on the two qubit-3 classes.
        let c = pauli_coefficients(a2);
        assert!(c[0].norm() < 1e-15 && c[3].norm() < 1e-15);
        assert!((c[1] - c64(gamma.sqrt() / 2.0, 0.0)).norm() < 1e-15);
        assert!((c[2] - c64(gamma.sqrt() / 2.0, 0.0)).norm() < 1e-15);
        let norm = c[1].norm_sqr() + c[2].norm_sqr();
        let bit = code.class_of(&ErrorSpec::new(3, PauliKind::BitFlip).unwrap());
        let phase_bit = code.class_of(&ErrorSpec::new(3, PauliKind::PhaseBitFlip).unwrap());
        assert!((weights[bit] - c[1].norm_sqr() / norm).abs() < 1e-12);
        assert!((weights[phase_bit] - c[2].norm_sqr() / norm).abs() < 1e-12);
        for seed in 0..10 {
            let (outcome, _) = syndrome_measure(&damaged, seed).unwrap();
            assert!(outcome.class_id == bit || outcome.class_id == phase_bit);
        }
    }

    #[test]
    fn correction_round_trips() {
        let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8)).unwrap();
        let s = encode(&q);
        let x6 = apply_error(&s, &ErrorSpec::new(6, PauliKind::BitFlip).unwrap()).unwrap();
        let (outcome, collapsed) = syndrome_measure(&x6, 3).unwrap();
        let out = decode(&correct(&collapsed, &outcome).unwrap()).unwrap();
        assert!((out.alpha() - c64(0.6, 0.)).norm() < 1e-10);
        assert!((out.beta() - c64(0.0, 0.8)).norm() < 1e-10);
        assert!((q.fidelity(&out) - 1.0).abs() < 1e-10);

        for e in ErrorSpec::all_single_qubit() {
            let damaged = apply_error(&s, &e).unwrap();
            let (outcome, collapsed) = syndrome_measure(&damaged, 0).unwrap();
            assert_eq!(outcome.class_id, ShorCode::get().class_of(&e));
            let out = decode(&correct(&collapsed, &outcome).unwrap()).unwrap();
            assert!((q.fidelity(&out) - 1.0).abs() < 1e-10, "{e:?}");
        }

        // Any member of a degenerate class undoes the error.
        let z2 = apply_error(&s, &ErrorSpec::new(2, PauliKind::PhaseFlip).unwrap()).unwrap();
        let back = apply_error(&z2, &ErrorSpec::new(1, PauliKind::PhaseFlip).unwrap()).unwrap();
        assert!((back.amplitudes() - s.amplitudes()).norm() < 1e-14);

        let wrong = SyndromeOutcome {
            class_id: 4,
            label: String::new(),
            members: vec![],
            probability: 1.0,
        };
        assert!(matches!(correct(&x6, &wrong), Err(Error::NotInSubspace(_))));
        assert!(matches!(decode(&x6), Err(Error::NotInSubspace(_))));
    }

    #[test]
    fn decode_gauge() {
        let q = LogicalQubit::normalized(c64(0.0, -0.6), c64(0.8, 0.0)).unwrap();
        let out = decode(&encode(&q)).unwrap();
        assert!((out.alpha() - c64(0.6, 0.0)).norm() < 1e-14);
        assert!((out.beta() - c64(0.0, 0.8)).norm() < 1e-14);
        let one = decode(&encode(
            &LogicalQubit::normalized(c64(0.0, 0.0), c64(0.0, -1.0)).unwrap(),
        ))
        .unwrap();
        assert!((one.beta() - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn decay_channel_examples() {
        let zero = decay_channel(0.0).unwrap();
        assert!(zero.kraus()[1].iter().all(|z| z.norm() == 0.0));
        let full = decay_channel(1.0).unwrap();
        let out = full.apply_unnormalized(&basis_outer(2, 0, 0)).unwrap();
        assert!(max_abs_diff(&out, &basis_outer(2, 1, 1)) < 1e-15);
        for g in [0.0, 0.3, 0.77, 1.0] {
            assert!(max_abs_diff(&decay_channel(g).unwrap().completeness(), &identity(2)) < 1e-15);
        }
        assert!(matches!(decay_channel(1.5), Err(Error::Domain(..))));

        // A₁ = √(1-γ)(1+σ₃)/2 and A₃ = (1-σ₃)/2.
        let g: f64 = 0.3;
        let ch = decay_channel(g).unwrap();
        let c1 = pauli_coefficients(&ch.kraus()[0]);
        let half = (1.0 - g).sqrt() / 2.0;
        assert!((c1[0] - c64(half, 0.)).norm() < 1e-15 && (c1[3] - c64(half, 0.)).norm() < 1e-15);
        let c3 = pauli_coefficients(&ch.kraus()[2]);
        assert!((c3[0] - c64(0.5, 0.)).norm() < 1e-15 && (c3[3] - c64(-0.5, 0.)).norm() < 1e-15);
    }

    #[test]
    fn decay_demo_recovers() {
        let q = LogicalQubit::normalized(c64(0.6, 0.0), c64(0.0, 0.8)).unwrap();
        for seed in 0..20 {
            let d = correct_decay_demo(&q, 3, 0.0, seed).unwrap();
            assert!(d.branch != 1);
            assert!(d.outcome.class_id == 0 || d.outcome.class_id == 10);
            assert!((d.fidelity - 1.0).abs() < 1e-9);
            let d = correct_decay_demo(&LogicalQubit::zero(), 3, 1.0, seed).unwrap();
            assert_ne!(d.branch, 0);
            let expected: &[usize] = if d.branch == 1 { &[3, 15] } else { &[0, 10] };
            assert!(expected.contains(&d.outcome.class_id));
            assert!((d.fidelity - 1.0).abs() < 1e-9);
        }
        for seed in 0..100 {
            let d = correct_decay_demo(&q, 1 + (seed as usize % 9), 0.5, seed).unwrap();
            assert!((d.fidelity - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_bound(3).unwrap(), 1);
        assert_eq!(hamming_bound(5).unwrap(), 3);
        assert_eq!(hamming_bound(9).unwrap(), 28);
        for n in 1..30u32 {
            let r = hamming_bound(n).unwrap() as u128;
            assert!(2 * (1 + r * n as u128) <= 1u128 << n);
            assert!(2 * (1 + (r + 1) * n as u128) > 1u128 << n);
        }
        assert!(hamming_bound(0).is_err());
    }

    #[test]
    fn repetition_exact_rates() {
        assert_eq!(repetition_failure_exact(0.0), 0.0);
        assert!((repetition_failure_exact(0.1) - 0.028).abs() < 1e-15);
        assert!((repetition_failure_exact(0.5) - 0.5).abs() < 1e-15);
        let third = repetition_failure_exact(1.0 / 3.0);
        assert!((third - 7.0 / 27.0).abs() < 1e-15 && third < 1.0 / 3.0);
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            assert!((repetition_failure_exact(p) - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-15);
        }
        let s = classical_repetition(0.0, 1000, 1).unwrap();
        assert_eq!(s.failures, 0);
        let s = classical_repetition(0.1, 20_000, 5).unwrap();
        assert!(s.z_score() < 4.0, "{s:?}");
        assert!((s.leading_order - 0.03).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_small() {
        let clean = shor_monte_carlo(0.0, 200, 1).unwrap();
        assert_eq!(clean.failures, 0);
        assert!((clean.mean_fidelity - 1.0).abs() < 1e-12);
        let noisy = shor_monte_carlo(0.1, 2000, 2).unwrap();
        assert_eq!(
            noisy.failures_by_error_count[0] + noisy.failures_by_error_count[1],
            0
        );
        assert!(noisy.trials_by_error_count[1] > 0);
        let again = shor_monte_carlo(0.1, 2000, 2).unwrap();
        assert_eq!(noisy, again);
    }

    #[test]
    fn logical_sample_is_normalized() {
        let s = logical_sample(20, 3);
        assert_eq!(s.len(), 20);
        for q in s {
            assert!((q.alpha().norm_sqr() + q.beta().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
