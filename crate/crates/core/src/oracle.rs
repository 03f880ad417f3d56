//! Dense state-vector simulator used as ground truth for the rewrite rules
//! and the measurement patterns.
//!
//! Amplitudes are indexed with the first qubit label as the most significant
//! bit. Phases are never tracked beyond what the matrices give, and
//! comparisons go through [`equal_up_to_phase`].

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use ndarray::{array, Array2};
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{Graph, VertexSet};

/// Largest number of qubits the oracle will allocate.
pub const ORACLE_MAX_QUBITS: usize = 20;
/// Tolerance for equivalence assertions.
pub const EQ_TOL: f64 = 1e-9;
/// Tolerance for self-consistency checks (norms, unitarity).
pub const SELF_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{0} qubits exceed the oracle limit of {ORACLE_MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("unknown qubit label {0}")]
    UnknownLabel(usize),
    #[error("duplicate qubit label {0}")]
    DuplicateLabel(usize),
    #[error("label lists differ: {0:?} vs {1:?}")]
    LabelMismatch(Vec<usize>, Vec<usize>),
    #[error("outcome {outcome} on qubit {qubit} has probability zero")]
    ZeroBranch { qubit: usize, outcome: u8 },
    #[error("amplitude vector of length {0} is not a power of two matching the labels")]
    BadLength(usize),
}

pub type OracleResult<T> = Result<T, OracleError>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One- and two-qubit gates. `P(α)` is the reflection cos(α/2)X + sin(α/2)Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    SqrtX(usize),
    SqrtXDg(usize),
    SqrtZ(usize),
    SqrtZDg(usize),
    P(usize, f64),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl Gate {
    pub fn targets(&self) -> Vec<usize> {
        match *self {
            Gate::H(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::SqrtX(q)
            | Gate::SqrtXDg(q)
            | Gate::SqrtZ(q)
            | Gate::SqrtZDg(q)
            | Gate::P(q, _) => vec![q],
            Gate::Cz(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }

    /// Matrix on the targets, first target most significant.
    pub fn matrix(&self) -> Array2<Complex64> {
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        match *self {
            Gate::H(_) => pauli_x() * c(FRAC_1_SQRT_2, 0.0) + pauli_z() * c(FRAC_1_SQRT_2, 0.0),
            Gate::X(_) => pauli_x(),
            Gate::Y(_) => pauli_y(),
            Gate::Z(_) => pauli_z(),
            Gate::SqrtX(_) => sqrt_pauli(&pauli_x()),
            Gate::SqrtXDg(_) => adjoint(&sqrt_pauli(&pauli_x())),
            Gate::SqrtZ(_) => sqrt_pauli(&pauli_z()),
            Gate::SqrtZDg(_) => adjoint(&sqrt_pauli(&pauli_z())),
            Gate::P(_, a) => pauli_x() * c((a / 2.0).cos(), 0.0) + pauli_z() * c((a / 2.0).sin(), 0.0),
            Gate::Cz(..) => Array2::from_diag(&ndarray::arr1(&[o, o, o, -o])),
            Gate::Swap(..) => array![[o, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, o]],
        }
    }
}

pub fn identity(dim: usize) -> Array2<Complex64> {
    Array2::eye(dim)
}

pub fn pauli_x() -> Array2<Complex64> {
    array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> Array2<Complex64> {
    array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Array2<Complex64> {
    array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// √P = e^{iπ/4}/√2 · (I − iP) for a Pauli matrix P.
pub fn sqrt_pauli(p: &Array2<Complex64>) -> Array2<Complex64> {
    let pre = Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4);
    (identity(2) - p * c(0.0, 1.0)) * pre
}

pub fn adjoint(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product, `a` on the most significant factor.
pub fn kron(a: &Array2<Complex64>, b: &Array2<Complex64>) -> Array2<Complex64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Observable cos(α)Z + sin(α)X of the (X,Z)-plane measurement at angle α.
pub fn observable(alpha: f64) -> Array2<Complex64> {
    pauli_z() * c(alpha.cos(), 0.0) + pauli_x() * c(alpha.sin(), 0.0)
}

/// Basis vector |s^{(α)}⟩ as (amplitude of |0⟩, amplitude of |1⟩).
pub fn basis_vector(alpha: f64, s: u8) -> [f64; 2] {
    let (sn, cs) = (alpha / 2.0).sin_cos();
    if s == 0 {
        [cs, sn]
    } else {
        [sn, -cs]
    }
}

/// Whether `a ≈ λ·b` for some unit-modulus λ, entrywise within `tol`.
/// Returns the phase when it exists.
pub fn matrices_equal_up_to_phase(a: &Array2<Complex64>, b: &Array2<Complex64>, tol: f64) -> Option<Complex64> {
    if a.dim() != b.dim() {
        return None;
    }
    let (idx, pivot) = b.indexed_iter().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
    if pivot.norm() < tol {
        return a.iter().all(|z| z.norm() < tol).then_some(c(1.0, 0.0));
    }
    let lambda = a[idx] / pivot;
    if (lambda.norm() - 1.0).abs() > tol {
        return None;
    }
    a.iter().zip(b.iter()).all(|(x, y)| (x - lambda * y).norm() < tol).then_some(lambda)
}

/// Normalised amplitudes over `2^labels.len()` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<usize>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(labels: Vec<usize>, amps: Vec<Complex64>) -> OracleResult<Self> {
        if labels.len() > ORACLE_MAX_QUBITS {
            return Err(OracleError::TooManyQubits(labels.len()));
        }
        if amps.len() != 1 << labels.len() {
            return Err(OracleError::BadLength(amps.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(OracleError::DuplicateLabel(*l));
            }
        }
        Ok(Self { labels, amps })
    }

    /// Computational basis state with `bits[i]` on `labels[i]`.
    pub fn basis(labels: Vec<usize>, bits: &[u8]) -> OracleResult<Self> {
        let n = labels.len();
        let index = bits.iter().fold(0usize, |acc, &b| acc << 1 | usize::from(b & 1));
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[index] = c(1.0, 0.0);
        Self::from_amplitudes(labels, amps)
    }

    /// |+⟩ on every label.
    pub fn plus(labels: Vec<usize>) -> OracleResult<Self> {
        let n = labels.len();
        if n > ORACLE_MAX_QUBITS {
            return Err(OracleError::TooManyQubits(n));
        }
        let a = c((0.5f64).powf(n as f64 / 2.0), 0.0);
        Self::from_amplitudes(labels, vec![a; 1 << n])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn qubit_count(&self) -> usize {
        self.labels.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|z| *z /= n);
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.amps.iter_mut().for_each(|z| *z *= factor);
    }

    /// Bit position (from the least significant end) of a label.
    fn shift(&self, label: usize) -> OracleResult<usize> {
        let k = self.labels.iter().position(|&l| l == label).ok_or(OracleError::UnknownLabel(label))?;
        Ok(self.labels.len() - 1 - k)
    }

    pub fn inner(&self, other: &StateVector) -> OracleResult<Complex64> {
        if self.labels != other.labels {
            return Err(OracleError::LabelMismatch(self.labels.clone(), other.labels.clone()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Apply a 2×2 matrix on one qubit.
    pub fn apply_single(&mut self, label: usize, m: &Array2<Complex64>) -> OracleResult<()> {
        let bit = 1 << self.shift(label)?;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[[0, 0]] * a0 + m[[0, 1]] * a1;
                self.amps[i | bit] = m[[1, 0]] * a0 + m[[1, 1]] * a1;
            }
        }
        Ok(())
    }

    /// Apply a 4×4 matrix on an ordered pair of qubits, `a` most significant.
    pub fn apply_pair(&mut self, a: usize, b: usize, m: &Array2<Complex64>) -> OracleResult<()> {
        if a == b {
            return Err(OracleError::DuplicateLabel(a));
        }
        let (ba, bb) = (1 << self.shift(a)?, 1 << self.shift(b)?);
        for i in 0..self.amps.len() {
            if i & ba == 0 && i & bb == 0 {
                let idx = [i, i | bb, i | ba, i | ba | bb];
                let v: Vec<Complex64> = idx.iter().map(|&k| self.amps[k]).collect();
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|col| m[[r, col]] * v[col]).sum();
                }
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> OracleResult<&mut Self> {
        match *gate {
            Gate::Cz(a, b) => {
                let (ba, bb) = (1 << self.shift(a)?, 1 << self.shift(b)?);
                if ba == bb {
                    return Err(OracleError::DuplicateLabel(a));
                }
                for (i, z) in self.amps.iter_mut().enumerate() {
                    if i & ba != 0 && i & bb != 0 {
                        *z = -*z;
                    }
                }
            }
            Gate::Swap(a, b) => self.apply_pair(a, b, &gate.matrix())?,
            _ => self.apply_single(gate.targets()[0], &gate.matrix())?,
        }
        Ok(self)
    }

    pub fn apply_gates<'a, I: IntoIterator<Item = &'a Gate>>(&mut self, gates: I) -> OracleResult<&mut Self> {
        for g in gates {
            self.apply_gate(g)?;
        }
        Ok(self)
    }

    /// ⟨s^{(α)}|_u ψ without renormalisation; the qubit is removed.
    pub fn project(&self, label: usize, alpha: f64, s: u8) -> OracleResult<StateVector> {
        let shift = self.shift(label)?;
        let [b0, b1] = basis_vector(alpha, s);
        let bit = 1usize << shift;
        let low = bit - 1;
        let amps = (0..self.amps.len() / 2)
            .map(|j| {
                let i0 = (j & !low) << 1 | (j & low);
                self.amps[i0] * b0 + self.amps[i0 | bit] * b1
            })
            .collect();
        let labels = self.labels.iter().copied().filter(|&l| l != label).collect();
        Ok(StateVector { labels, amps })
    }

    /// Probability of outcome `s` and the renormalised post-measurement state.
    pub fn measure_angle(&self, label: usize, alpha: f64, s: u8) -> OracleResult<(f64, StateVector)> {
        let mut post = self.project(label, alpha, s)?;
        let p = post.norm().powi(2);
        if p < SELF_TOL {
            return Err(OracleError::ZeroBranch { qubit: label, outcome: s });
        }
        post.normalize();
        Ok((p, post))
    }

    /// Probability of outcome `s` without building the post-state.
    pub fn probability(&self, label: usize, alpha: f64, s: u8) -> OracleResult<f64> {
        Ok(self.project(label, alpha, s)?.norm().powi(2))
    }

    /// Same state with labels reordered to `order` (a permutation of the labels).
    pub fn reorder(&self, order: &[usize]) -> OracleResult<StateVector> {
        let mut sorted_a = self.labels.clone();
        let mut sorted_b = order.to_vec();
        sorted_a.sort_unstable();
        sorted_b.sort_unstable();
        if sorted_a != sorted_b {
            return Err(OracleError::LabelMismatch(self.labels.clone(), order.to_vec()));
        }
        let n = order.len();
        let shifts: Vec<usize> = order.iter().map(|&l| self.shift(l)).collect::<OracleResult<_>>()?;
        let amps = (0..self.amps.len())
            .map(|j| {
                let src = (0..n).fold(0usize, |acc, k| acc | ((j >> (n - 1 - k)) & 1) << shifts[k]);
                self.amps[src]
            })
            .collect();
        Ok(StateVector { labels: order.to_vec(), amps })
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> OracleResult<StateVector> {
        let mut labels = self.labels.clone();
        labels.extend(&other.labels);
        let amps = self.amps.iter().flat_map(|a| other.amps.iter().map(move |b| a * b)).collect();
        StateVector::from_amplitudes(labels, amps)
    }

    /// Debug dump: one line `index real imag` per amplitude.
    pub fn dump(&self) -> String {
        self.amps.iter().enumerate().map(|(i, z)| format!("{i} {} {}\n", z.re, z.im)).collect()
    }
}

/// |⟨ψ|φ⟩| > 1 − 1e-9 for normalised states on the same labels.
pub fn equal_up_to_phase(psi: &StateVector, phi: &StateVector) -> OracleResult<bool> {
    Ok(psi.inner(phi)?.norm() > 1.0 - EQ_TOL)
}

/// Z_S ∏_{uv∈E} CZ_{uv} |+⟩^n on labels `0..n`.
pub fn build_graph_state(g: &Graph, sign: &VertexSet) -> OracleResult<StateVector> {
    let n = g.vertex_count();
    let mut psi = StateVector::plus((0..n).collect())?;
    for (u, v) in g.edges() {
        psi.apply_gate(&Gate::Cz(u, v))?;
    }
    for u in sign.iter() {
        psi.apply_gate(&Gate::Z(u))?;
    }
    Ok(psi)
}

/// Adjoin every non-input vertex in |+⟩ and apply one CZ per edge.
///
/// `psi_in` carries the input labels in any order; the result is on labels
/// `0..n` in increasing order.
pub fn entangling_map(graph: &Graph, inputs: &[usize], psi_in: &StateVector) -> OracleResult<StateVector> {
    let n = graph.vertex_count();
    if n > ORACLE_MAX_QUBITS {
        return Err(OracleError::TooManyQubits(n));
    }
    let mut expected = inputs.to_vec();
    let mut got = psi_in.labels().to_vec();
    expected.sort_unstable();
    got.sort_unstable();
    if expected != got {
        return Err(OracleError::LabelMismatch(inputs.to_vec(), psi_in.labels().to_vec()));
    }
    let rest: Vec<usize> = graph.vertices().filter(|v| !inputs.contains(v)).collect();
    let mut psi = psi_in.tensor(&StateVector::plus(rest)?)?.reorder(&(0..n).collect::<Vec<_>>())?;
    for (u, v) in graph.edges() {
        psi.apply_gate(&Gate::Cz(u, v))?;
    }
    Ok(psi)
}

/// Dense matrix of a gate sequence on `qubits` wires labeled `0..qubits`.
pub fn circuit_matrix(qubits: usize, gates: &[Gate]) -> OracleResult<Array2<Complex64>> {
    let dim = 1 << qubits;
    let mut m = Array2::zeros((dim, dim));
    for col in 0..dim {
        let bits: Vec<u8> = (0..qubits).map(|k| (col >> (qubits - 1 - k) & 1) as u8).collect();
        let mut psi = StateVector::basis((0..qubits).collect(), &bits)?;
        psi.apply_gates(gates)?;
        for (row, a) in psi.amplitudes().iter().enumerate() {
            m[[row, col]] = *a;
        }
    }
    Ok(m)
}

/// Read a signed graph state back from amplitudes, if ψ is one.
///
/// Every |G;S⟩ has amplitudes of equal modulus with sign
/// (−1)^{|E(G[x])| + |x ∩ S|}, so S is read off the weight-one amplitudes
/// and the edges off the weight-two ones. The candidate is then rebuilt and
/// compared, so a `Some` answer is always exact.
pub fn decode_signed_graph_state(psi: &StateVector) -> Option<(Graph, VertexSet)> {
    let n = psi.qubit_count();
    let amps = psi.amplitudes();
    let a0 = amps[0];
    if a0.norm() < 1e-6 {
        return None;
    }
    let bit = |u: usize| 1usize << (n - 1 - u);
    let ratio = |i: usize| amps[i] / a0;
    let sign = VertexSet::from_iter(n, (0..n).filter(|&u| ratio(bit(u)).re < 0.0));
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let r = ratio(bit(u) | bit(v)) * ratio(bit(u)) * ratio(bit(v));
            if r.re < 0.0 {
                g.add_edge(u, v);
            }
        }
    }
    let rebuilt = build_graph_state(&g, &sign).ok()?;
    let relabeled = psi.reorder(&(0..n).collect::<Vec<_>>()).ok()?;
    equal_up_to_phase(&rebuilt, &relabeled).ok()?.then_some((g, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GridKind};

    #[test]
    fn graph_state_examples() {
        let k1 = build_graph_state(&Graph::new(1), &VertexSet::new(1)).unwrap();
        assert!(k1.amplitudes().iter().all(|z| (z - c(FRAC_1_SQRT_2, 0.0)).norm() < SELF_TOL));
        let p2 = build_graph_state(&generate(GridKind::Path, 1, 2).unwrap(), &VertexSet::new(2)).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (z, w) in p2.amplitudes().iter().zip(want) {
            assert!((z - c(w, 0.0)).norm() < SELF_TOL);
        }
    }

    #[test]
    fn measurement_probabilities_sum_to_one() {
        let g = generate(GridKind::Triangular, 2, 2).unwrap();
        let psi = build_graph_state(&g, &VertexSet::from_iter(4, [1])).unwrap();
        for alpha in [0.0, 0.3, 1.9, 4.0] {
            let p: f64 = (0..2).map(|s| psi.probability(2, alpha, s).unwrap()).sum();
            assert!((p - 1.0).abs() < SELF_TOL);
        }
    }

    #[test]
    fn zero_branch_is_an_error() {
        let zero = StateVector::basis(vec![0], &[0]).unwrap();
        assert_eq!(zero.measure_angle(0, 0.0, 1), Err(OracleError::ZeroBranch { qubit: 0, outcome: 1 }));
        assert!((zero.measure_angle(0, 0.0, 0).unwrap().0 - 1.0).abs() < SELF_TOL);
    }

    #[test]
    fn reorder_and_tensor_agree() {
        let a = StateVector::basis(vec![2], &[1]).unwrap();
        let b = StateVector::basis(vec![0, 1], &[0, 1]).unwrap();
        let ab = a.tensor(&b).unwrap().reorder(&[0, 1, 2]).unwrap();
        assert_eq!(ab, StateVector::basis(vec![0, 1, 2], &[0, 1, 1]).unwrap());
    }

    #[test]
    fn decode_rejects_product_of_zero_states() {
        let z = StateVector::basis(vec![0, 1], &[0, 0]).unwrap();
        assert!(decode_signed_graph_state(&z).is_none());
        let g = generate(GridKind::Triangular, 2, 2).unwrap();
        let s = VertexSet::from_iter(4, [0, 3]);
        let psi = build_graph_state(&g, &s).unwrap();
        assert_eq!(decode_signed_graph_state(&psi), Some((g, s)));
    }
}
