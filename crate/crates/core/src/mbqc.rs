//! Open graphs, measurement patterns and their simulation with a Pauli frame.
//!
//! A pattern measures every non-output vertex once, in plan order, in the
//! (X,Z)-plane basis {|0^{(α)}⟩, |1^{(α)}⟩}. Each plan entry carries a
//! correction set g(u): when the measurement of u lands on the non-ideal
//! outcome, the byproduct X_{g(u)∖u} Z_{Odd(g(u))∖u} is pushed into the frame.
//! This is sound because ∏_{w∈g} X_w Z_{N(w)} stabilises the entangled state
//! whenever g avoids the inputs, and it flips the outcome of u when it
//! anticommutes with the observable of u. [`Pattern::validate`] checks both
//! conditions and that the byproduct only lands on qubits still present.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSet};
use crate::oracle::{
    entangling_map, identity, kron, matrices_equal_up_to_phase, pauli_x, pauli_z, Gate, OracleError, StateVector,
};
use crate::outcome::{OutcomeError, OutcomeSource};

/// Angles closer than this to a multiple of π/2 count as Pauli bases.
const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MbqcError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
    #[error("cannot compose: {0} outputs against {1} inputs")]
    Arity(usize, usize),
    #[error("wire pattern needs at least 2 vertices, got {0}")]
    WireTooShort(usize),
    #[error("invalid pattern: {0}")]
    Invalid(String),
}

pub type MbqcResult<T> = Result<T, MbqcError>;

/// A graph with ordered input and output vertices. Position `k` in `inputs`
/// (resp. `outputs`) is logical qubit `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenGraph {
    pub graph: Graph,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

impl OpenGraph {
    pub fn new(graph: Graph, inputs: Vec<usize>, outputs: Vec<usize>) -> MbqcResult<Self> {
        for &u in inputs.iter().chain(&outputs) {
            graph.check(u)?;
        }
        for list in [&inputs, &outputs] {
            if (1..list.len()).any(|i| list[..i].contains(&list[i])) {
                return Err(MbqcError::Invalid(format!("repeated vertex in {list:?}")));
            }
        }
        Ok(Self { graph, inputs, outputs })
    }

    /// `k` isolated vertices that are both inputs and outputs.
    pub fn identity(k: usize) -> Self {
        Self { graph: Graph::new(k), inputs: (0..k).collect(), outputs: (0..k).collect() }
    }

    /// Sequential composition: `a` then `b`.
    ///
    /// The inputs of `b` are identified with the outputs of `a` position by
    /// position and every other vertex of `b` is fresh, so the shared set is
    /// exactly outputs(a) = inputs(b). Edges combine by symmetric difference.
    /// Returns the composite and the new label of every vertex of `b`.
    pub fn compose(a: &OpenGraph, b: &OpenGraph) -> MbqcResult<(OpenGraph, Vec<usize>)> {
        if a.outputs.len() != b.inputs.len() {
            return Err(MbqcError::Arity(a.outputs.len(), b.inputs.len()));
        }
        let na = a.graph.vertex_count();
        let mut map = vec![usize::MAX; b.graph.vertex_count()];
        for (k, &i) in b.inputs.iter().enumerate() {
            map[i] = a.outputs[k];
        }
        let mut next = na;
        for slot in map.iter_mut().filter(|m| **m == usize::MAX) {
            *slot = next;
            next += 1;
        }
        let mut graph = Graph::new(next);
        for (u, v) in a.graph.edges() {
            graph.add_edge(u, v);
        }
        for (u, v) in b.graph.edges() {
            graph.toggle_edge(map[u], map[v]);
        }
        let outputs = b.outputs.iter().map(|&o| map[o]).collect();
        Ok((OpenGraph { graph, inputs: a.inputs.clone(), outputs }, map))
    }

    /// Parallel composition: `a` next to `b`, with `b` relabeled after `a`.
    pub fn tensor(a: &OpenGraph, b: &OpenGraph) -> (OpenGraph, Vec<usize>) {
        let na = a.graph.vertex_count();
        let map: Vec<usize> = (0..b.graph.vertex_count()).map(|u| u + na).collect();
        let mut graph = Graph::new(na + b.graph.vertex_count());
        for (u, v) in a.graph.edges() {
            graph.add_edge(u, v);
        }
        for (u, v) in b.graph.edges() {
            graph.add_edge(map[u], map[v]);
        }
        let inputs = a.inputs.iter().copied().chain(b.inputs.iter().map(|&u| map[u])).collect();
        let outputs = a.outputs.iter().copied().chain(b.outputs.iter().map(|&u| map[u])).collect();
        (OpenGraph { graph, inputs, outputs }, map)
    }
}

/// One plan entry: measure `vertex` at `angle`; on outcome 1 (after frame
/// adaptation) push the byproduct of `correction` into the frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub vertex: usize,
    pub angle: f64,
    pub correction: Vec<usize>,
}

/// An open graph plus an ordered measurement plan over its non-outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub open: OpenGraph,
    pub plan: Vec<Measurement>,
}

impl Pattern {
    pub fn identity(k: usize) -> Self {
        Self { open: OpenGraph::identity(k), plan: Vec::new() }
    }

    pub fn compose(a: &Pattern, b: &Pattern) -> MbqcResult<Pattern> {
        let (open, map) = OpenGraph::compose(&a.open, &b.open)?;
        let mut plan = a.plan.clone();
        plan.extend(b.plan.iter().map(|m| relabel(m, &map)));
        Ok(Pattern { open, plan })
    }

    pub fn tensor(a: &Pattern, b: &Pattern) -> Pattern {
        let (open, map) = OpenGraph::tensor(&a.open, &b.open);
        let mut plan = a.plan.clone();
        plan.extend(b.plan.iter().map(|m| relabel(m, &map)));
        Pattern { open, plan }
    }

    /// `gadget` acting on the logical wires starting at `first`, identity on
    /// the other wires of a `width`-wire register.
    pub fn on_wires(width: usize, first: usize, gadget: &Pattern) -> MbqcResult<Pattern> {
        let k = gadget.open.inputs.len();
        if gadget.open.outputs.len() != k || first + k > width {
            return Err(MbqcError::Arity(width, first + k));
        }
        let before = Pattern::tensor(&Pattern::identity(first), gadget);
        Ok(Pattern::tensor(&before, &Pattern::identity(width - first - k)))
    }

    /// Check the plan covers V ∖ O exactly once and every correction set is
    /// usable at the time its vertex is measured.
    pub fn validate(&self) -> MbqcResult<()> {
        let g = &self.open.graph;
        let n = g.vertex_count();
        let outputs = VertexSet::from_iter(n, self.open.outputs.iter().copied());
        let inputs = VertexSet::from_iter(n, self.open.inputs.iter().copied());
        let mut measured = VertexSet::new(n);
        for m in &self.plan {
            let u = m.vertex;
            g.check(u)?;
            if outputs.contains(u) || measured.contains(u) {
                return Err(MbqcError::Invalid(format!("vertex {u} is an output or measured twice")));
            }
            let corr = VertexSet::from_iter(n, m.correction.iter().copied());
            if let Some(&w) = m.correction.iter().find(|&&w| w >= n || inputs.contains(w)) {
                return Err(MbqcError::Invalid(format!("correction of {u} contains input or unknown vertex {w}")));
            }
            let odd = g.odd_neighborhood(&corr);
            let (cos, sin) = (m.angle.cos(), m.angle.sin());
            if (cos.abs() > ANGLE_TOL && !corr.contains(u)) || (sin.abs() > ANGLE_TOL && !odd.contains(u)) {
                return Err(MbqcError::Invalid(format!("correction of {u} does not flip its outcome")));
            }
            let mut touched = corr.clone();
            touched.union_with(&odd);
            touched.remove(u);
            touched.intersect_with(&measured);
            if let Some(w) = touched.iter().next() {
                return Err(MbqcError::Invalid(format!("correction of {u} touches measured vertex {w}")));
            }
            measured.insert(u);
        }
        if measured.len() + outputs.len() != n {
            return Err(MbqcError::Invalid("plan does not cover every non-output vertex".into()));
        }
        Ok(())
    }
}

fn relabel(m: &Measurement, map: &[usize]) -> Measurement {
    Measurement {
        vertex: map[m.vertex],
        angle: m.angle,
        correction: m.correction.iter().map(|&w| map[w]).collect(),
    }
}

/// Path P_n with input 0 and output n−1; every other vertex is X measured.
/// Simulates H when n is even and the identity when n is odd.
pub fn wire_pattern(n: usize) -> MbqcResult<Pattern> {
    if n < 2 {
        return Err(MbqcError::WireTooShort(n));
    }
    let graph = Graph::from_edges(n, (1..n).map(|k| (k - 1, k)))?;
    let plan = (0..n - 1)
        .map(|k| Measurement { vertex: k, angle: FRAC_PI_2, correction: vec![k + 1] })
        .collect();
    Ok(Pattern { open: OpenGraph::new(graph, vec![0], vec![n - 1])?, plan })
}

/// A single edge with both ends inputs and outputs: ΛZ.
pub fn cz_pattern() -> Pattern {
    let graph = Graph::from_edges(2, [(0, 1)]).expect("valid edge");
    Pattern { open: OpenGraph { graph, inputs: vec![0, 1], outputs: vec![0, 1] }, plan: Vec::new() }
}

/// Triangle on input 0, centre 1 and output 2 simulating
/// P(α) = cos(α/2)X + sin(α/2)Z.
///
/// The input is X measured. The centre is measured at plan angle α − π/2,
/// whose observable sin(α)Z − cos(α)X is minus cos(−α)X + sin(−α)Z. Both
/// describe the same basis with the outcomes exchanged; this choice makes
/// the all-zero branch P(α) itself rather than Y·P(α).
pub fn rotation_pattern(alpha: f64) -> Pattern {
    let graph = Graph::complete(3);
    let plan = vec![
        Measurement { vertex: 0, angle: FRAC_PI_2, correction: vec![2] },
        Measurement { vertex: 1, angle: (alpha - FRAC_PI_2).rem_euclid(TAU), correction: vec![1, 2] },
    ];
    Pattern { open: OpenGraph { graph, inputs: vec![0], outputs: vec![2] }, plan }
}

/// Pattern for a circuit of H, P(α) and ΛZ on adjacent wires, built by
/// composing one gadget per gate onto a `width`-wire identity.
pub fn circuit_pattern(width: usize, gates: &[Gate]) -> MbqcResult<Pattern> {
    let mut p = Pattern::identity(width);
    for gate in gates {
        let step = match *gate {
            Gate::H(w) => Pattern::on_wires(width, w, &wire_pattern(2)?)?,
            Gate::P(w, a) => Pattern::on_wires(width, w, &rotation_pattern(a))?,
            Gate::Cz(a, b) if a.abs_diff(b) == 1 => Pattern::on_wires(width, a.min(b), &cz_pattern())?,
            other => return Err(MbqcError::Invalid(format!("no gadget for {other:?}"))),
        };
        p = Pattern::compose(&p, &step)?;
    }
    Ok(p)
}

/// Pending byproducts X^a Z^b per qubit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliFrame {
    pending: BTreeMap<usize, (u8, u8)>,
}

impl PauliFrame {
    pub fn get(&self, u: usize) -> (u8, u8) {
        self.pending.get(&u).copied().unwrap_or((0, 0))
    }

    pub fn flip_x(&mut self, u: usize) {
        self.pending.entry(u).or_default().0 ^= 1;
    }

    pub fn flip_z(&mut self, u: usize) {
        self.pending.entry(u).or_default().1 ^= 1;
    }

    pub fn take(&mut self, u: usize) -> (u8, u8) {
        self.pending.remove(&u).unwrap_or((0, 0))
    }

    pub fn is_trivial(&self) -> bool {
        self.pending.values().all(|&p| p == (0, 0))
    }

    /// ⊗_k X^a Z^b over `qubits`, first qubit most significant.
    pub fn matrix(&self, qubits: &[usize]) -> Array2<Complex64> {
        qubits.iter().fold(identity(1), |acc, &q| {
            let (a, b) = self.get(q);
            let mut m = identity(2);
            if a == 1 {
                m = m.dot(&pauli_x());
            }
            if b == 1 {
                m = m.dot(&pauli_z());
            }
            kron(&acc, &m)
        })
    }
}

/// Angle to actually measure on `u` given its pending byproduct.
///
/// X maps α to π − α and Z maps α to −α. The result is brought into [0, π):
/// α + π is the same basis with the outcomes exchanged, reported as
/// `outcome_flip = 1`.
pub fn adapt_angle(frame: &PauliFrame, u: usize, alpha: f64) -> (f64, u8) {
    let (a, b) = frame.get(u);
    let mut beta = alpha;
    if a == 1 {
        beta = PI - beta;
    }
    if b == 1 {
        beta = -beta;
    }
    let beta = beta.rem_euclid(TAU);
    if beta >= PI {
        (beta - PI, 1)
    } else {
        (beta, 0)
    }
}

/// One measurement as it happened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub vertex: usize,
    pub planned_angle: f64,
    pub adapted_angle: f64,
    /// Raw outcome in the adapted basis.
    pub outcome: u8,
    /// Outcome relative to the planned basis; 1 triggers the correction.
    pub planned_outcome: u8,
    pub probability: f64,
}

/// Output of [`simulate_pattern`].
#[derive(Debug, Clone)]
pub struct Simulation {
    /// State on the outputs, in output order.
    pub output: StateVector,
    /// Byproducts left on the outputs.
    pub frame: PauliFrame,
    pub transcript: Vec<TranscriptEntry>,
}

/// Run the pattern on `psi_in`, whose labels are the input vertices.
///
/// The output satisfies output ≡ F·U·psi_in where U is the map of the
/// all-zero branch and F the recorded frame.
pub fn simulate_pattern(p: &Pattern, psi_in: &StateVector, outcomes: &mut OutcomeSource) -> MbqcResult<Simulation> {
    let psi = entangling_map(&p.open.graph, &p.open.inputs, psi_in)?;
    run_plan(p, psi, outcomes, true)
}

fn run_plan(p: &Pattern, mut psi: StateVector, outcomes: &mut OutcomeSource, normalise: bool) -> MbqcResult<Simulation> {
    let g = &p.open.graph;
    let n = g.vertex_count();
    let mut frame = PauliFrame::default();
    let mut transcript = Vec::with_capacity(p.plan.len());
    for m in &p.plan {
        let (angle, flip) = adapt_angle(&frame, m.vertex, m.angle);
        let t = outcomes.next_bit()?;
        let (probability, post) = if normalise {
            psi.measure_angle(m.vertex, angle, t)?
        } else {
            let post = psi.project(m.vertex, angle, t)?;
            (post.norm().powi(2), post)
        };
        psi = post;
        let s = t ^ flip;
        frame.take(m.vertex);
        if s == 1 {
            let corr = VertexSet::from_iter(n, m.correction.iter().copied());
            for w in corr.iter().filter(|&w| w != m.vertex) {
                frame.flip_x(w);
            }
            for w in g.odd_neighborhood(&corr).iter().filter(|&w| w != m.vertex) {
                frame.flip_z(w);
            }
        }
        transcript.push(TranscriptEntry {
            vertex: m.vertex,
            planned_angle: m.angle,
            adapted_angle: angle,
            outcome: t,
            planned_outcome: s,
            probability,
        });
    }
    let output = psi.reorder(&p.open.outputs)?;
    let mut out_frame = PauliFrame::default();
    for &o in &p.open.outputs {
        let (a, b) = frame.get(o);
        if a == 1 {
            out_frame.flip_x(o);
        }
        if b == 1 {
            out_frame.flip_z(o);
        }
    }
    Ok(Simulation { output, frame: out_frame, transcript })
}

/// Linear map of one outcome branch, `2^|O| × 2^|I|`, without renormalising,
/// together with the frame that branch leaves on the outputs.
pub fn branch_operator(p: &Pattern, raw_outcomes: &[u8]) -> MbqcResult<(Array2<Complex64>, PauliFrame)> {
    let k = p.open.inputs.len();
    let m = p.open.outputs.len();
    let mut op = Array2::zeros((1 << m, 1 << k));
    let mut frame = PauliFrame::default();
    for col in 0..1usize << k {
        let bits: Vec<u8> = (0..k).map(|j| (col >> (k - 1 - j) & 1) as u8).collect();
        let psi_in = StateVector::basis(p.open.inputs.clone(), &bits)?;
        let psi = entangling_map(&p.open.graph, &p.open.inputs, &psi_in)?;
        let sim = run_plan(p, psi, &mut OutcomeSource::forced(raw_outcomes.to_vec()), false)?;
        for (row, a) in sim.output.amplitudes().iter().enumerate() {
            op[[row, col]] = *a;
        }
        frame = sim.frame;
    }
    Ok((op, frame))
}

/// The branch map with its frame undone: F · M, which should be ∝ the target.
pub fn corrected_branch_map(p: &Pattern, raw_outcomes: &[u8]) -> MbqcResult<Array2<Complex64>> {
    let (op, frame) = branch_operator(p, raw_outcomes)?;
    Ok(frame.matrix(&p.open.outputs).dot(&op))
}

/// `a ∝ b` with a non-zero factor, compared after Frobenius normalisation.
pub fn proportional(a: &Array2<Complex64>, b: &Array2<Complex64>, tol: f64) -> bool {
    let norm = |m: &Array2<Complex64>| m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na < tol || nb < tol {
        return false;
    }
    matrices_equal_up_to_phase(&a.mapv(|z| z / na), &b.mapv(|z| z / nb), tol).is_some()
}

/// Every raw outcome string of length `k`, as bit vectors.
pub fn all_branches(k: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..1usize << k).map(move |m| (0..k).map(|j| (m >> j & 1) as u8).collect())
}

#[derive(Serialize, Deserialize)]
struct PlanRepr {
    vertex: usize,
    angle_radians: f64,
    order: usize,
    correction: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
    plan: Vec<PlanRepr>,
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PatternRepr {
            vertices: self.open.graph.vertex_count(),
            edges: self.open.graph.edges().collect(),
            inputs: self.open.inputs.clone(),
            outputs: self.open.outputs.clone(),
            plan: self
                .plan
                .iter()
                .enumerate()
                .map(|(order, m)| PlanRepr {
                    vertex: m.vertex,
                    angle_radians: m.angle,
                    order,
                    correction: m.correction.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = PatternRepr::deserialize(deserializer)?;
        let graph = Graph::from_edges(repr.vertices, repr.edges).map_err(D::Error::custom)?;
        let open = OpenGraph::new(graph, repr.inputs, repr.outputs).map_err(D::Error::custom)?;
        let mut plan = repr.plan;
        plan.sort_by_key(|m| m.order);
        let plan = plan
            .into_iter()
            .map(|m| Measurement { vertex: m.vertex, angle: m.angle_radians, correction: m.correction })
            .collect();
        Ok(Pattern { open, plan })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::EQ_TOL;

    #[test]
    fn compose_examples() {
        let wire = wire_pattern(2).unwrap();
        let (p3, _) = OpenGraph::compose(&wire.open, &wire.open).unwrap();
        assert_eq!(p3.graph, Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!((p3.inputs, p3.outputs), (vec![0], vec![2]));
        let cz = cz_pattern();
        let (twice, _) = OpenGraph::compose(&cz.open, &cz.open).unwrap();
        assert_eq!(twice.graph, Graph::new(2));
        assert!(OpenGraph::compose(&wire.open, &cz.open).is_err());
    }

    #[test]
    fn gadgets_validate() {
        for n in 2..8 {
            wire_pattern(n).unwrap().validate().unwrap();
        }
        cz_pattern().validate().unwrap();
        for a in [0.0, 0.7, 2.3, FRAC_PI_2] {
            rotation_pattern(a).validate().unwrap();
        }
        assert!(wire_pattern(1).is_err());
    }

    #[test]
    fn validation_catches_bad_corrections() {
        let mut p = wire_pattern(3).unwrap();
        p.plan[0].correction = vec![2];
        assert!(p.validate().is_err());
        let mut p = wire_pattern(3).unwrap();
        p.plan[1].correction = vec![0];
        assert!(p.validate().is_err());
    }

    #[test]
    fn adapt_angle_examples() {
        let mut f = PauliFrame::default();
        assert_eq!(adapt_angle(&f, 0, 0.4), (0.4, 0));
        f.flip_z(0);
        let (a, flip) = adapt_angle(&f, 0, FRAC_PI_2);
        assert!((a - FRAC_PI_2).abs() < 1e-15 && flip == 1);
        let mut f = PauliFrame::default();
        f.flip_x(0);
        let (a, flip) = adapt_angle(&f, 0, 0.0);
        assert!(a.abs() < 1e-15 && flip == 1);
    }

    #[test]
    fn wire_of_two_gives_hadamard_on_zero() {
        let p = wire_pattern(2).unwrap();
        let zero = StateVector::basis(vec![0], &[0]).unwrap();
        let sim = simulate_pattern(&p, &zero, &mut OutcomeSource::Zero).unwrap();
        let mut want = StateVector::basis(vec![1], &[0]).unwrap();
        want.apply_gate(&Gate::H(1)).unwrap();
        assert!(sim.frame.is_trivial());
        assert!(crate::oracle::equal_up_to_phase(&sim.output, &want).unwrap());
    }

    #[test]
    fn cz_on_one_one() {
        let (op, _) = branch_operator(&cz_pattern(), &[]).unwrap();
        assert!((op[[3, 3]] + Complex64::new(1.0, 0.0)).norm() < EQ_TOL);
    }

    #[test]
    fn pattern_json_round_trip() {
        let p = Pattern::compose(&wire_pattern(3).unwrap(), &rotation_pattern(0.7)).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Pattern>(&text).unwrap(), p);
    }
}
