//! Signed graph states |G;S⟩ = Z_S|G⟩ and their exact rewrite rules.
//!
//! Every operation returns a new state up to global phase. Deleting vertices
//! compacts labels, exactly like [`Graph::delete_vertex`], so the result of a
//! measurement lines up with the dense oracle once the measured qubit is
//! traced out.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSet};
use crate::outcome::{OutcomeError, OutcomeSource};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Outcome(#[from] OutcomeError),
    #[error("sign set mentions vertex {0} outside the graph")]
    SignOutOfRange(usize),
    #[error("vertex {0} is not isolated, a lone X measurement leaves the signed graph states")]
    NotIsolated(usize),
    #[error("measurement sets overlap on vertex {0}")]
    Overlap(usize),
    #[error("X vertex {0} is still connected after pairing, the plan is not expressible")]
    NotExpressible(usize),
    #[error("malformed signed state text: {0}")]
    Parse(String),
}

pub type StateResult<T> = Result<T, StateError>;

/// Pauli operator i^d X_{S₁} Z_{S₂}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliWord {
    pub x_support: VertexSet,
    pub z_support: VertexSet,
    pub phase_exponent: u8,
}

impl PauliWord {
    pub fn new(x_support: VertexSet, z_support: VertexSet) -> Self {
        Self { x_support, z_support, phase_exponent: 0 }
    }

    pub fn x(n: usize, u: usize) -> Self {
        Self::new(VertexSet::from_iter(n, [u]), VertexSet::new(n))
    }

    pub fn z(n: usize, u: usize) -> Self {
        Self::new(VertexSet::new(n), VertexSet::from_iter(n, [u]))
    }

    /// Y_u = i X_u Z_u.
    pub fn y(n: usize, u: usize) -> Self {
        Self { phase_exponent: 1, ..Self::new(VertexSet::from_iter(n, [u]), VertexSet::from_iter(n, [u])) }
    }
}

/// |G;S⟩ up to global phase.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedGraphState {
    graph: Graph,
    sign: VertexSet,
}

impl SignedGraphState {
    pub fn new(graph: Graph, sign: &VertexSet) -> StateResult<Self> {
        let n = graph.vertex_count();
        if let Some(bad) = sign.iter().find(|&u| u >= n) {
            return Err(StateError::SignOutOfRange(bad));
        }
        let sign = VertexSet::from_iter(n, sign.iter());
        Ok(Self { graph, sign })
    }

    /// |G⟩ = |G;∅⟩.
    pub fn unsigned(graph: Graph) -> Self {
        let sign = VertexSet::new(graph.vertex_count());
        Self { graph, sign }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn sign(&self) -> &VertexSet {
        &self.sign
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Outcome sign set S Δ S₂ Δ Odd(S₁); the graph is unchanged.
    pub fn apply_pauli(&self, p: &PauliWord) -> StateResult<Self> {
        let n = self.vertex_count();
        for u in p.x_support.iter().chain(p.z_support.iter()) {
            self.graph.check(u)?;
        }
        let mut sign = self.sign.clone();
        sign.xor_with(&VertexSet::from_iter(n, p.z_support.iter()));
        sign.xor_with(&self.graph.odd_neighborhood(&p.x_support));
        Ok(Self { graph: self.graph.clone(), sign })
    }

    /// √X†_u √Z_{N(u)} |G;S⟩ = |G*u; S'⟩ with S' = S if u ∉ S and S Δ N(u)
    /// otherwise.
    pub fn apply_lc_op(&self, u: usize) -> StateResult<Self> {
        let graph = self.graph.local_complement(u)?;
        let mut sign = self.sign.clone();
        if sign.contains(u) {
            sign.xor_with(&self.graph.neighborhood(u));
        }
        Ok(Self { graph, sign })
    }

    /// H_u H_v |G;S⟩ for an edge uv.
    ///
    /// The graph becomes G∧uv. With C = N(u) ∩ N(v) and N' the neighbourhoods
    /// after the pivot, the sign is (S ∖ {u,v}) Δ C, further Δ-ed with N'(u)
    /// when u ∈ S and with N'(v) when v ∈ S.
    pub fn apply_hadamard_pair(&self, u: usize, v: usize) -> StateResult<Self> {
        let graph = self.graph.pivot(u, v)?;
        let mut common = self.graph.neighborhood(u);
        common.intersect_with(&self.graph.neighborhood(v));
        let mut sign = self.sign.clone();
        sign.remove(u);
        sign.remove(v);
        sign.xor_with(&common);
        if self.sign.contains(u) {
            sign.xor_with(&graph.neighborhood(u));
        }
        if self.sign.contains(v) {
            sign.xor_with(&graph.neighborhood(v));
        }
        Ok(Self { graph, sign })
    }

    /// √2 ⟨s|_u |G;S⟩ = |G∖u; (S∖u) Δ N(u)^s⟩. Both outcomes occur with
    /// probability ½, isolated or not.
    pub fn measure_z(&self, u: usize, s: u8) -> StateResult<Self> {
        self.graph.check(u)?;
        let mut sign = self.sign.clone();
        sign.remove(u);
        if s & 1 == 1 {
            sign.xor_with(&self.graph.neighborhood(u));
        }
        Ok(self.compact_without(&self.graph.clone(), sign, &[u]))
    }

    /// 2 ⟨outcome_u|_u ⟨outcome_v|_v |G;S⟩ in the X basis, for an edge uv.
    ///
    /// The graph becomes (G∧uv) ∖ u ∖ v and the sign
    /// (S∖{u,v}) Δ C Δ (N(u)∖v)^{outcome_v ⊕ [v∈S]} Δ (N(v)∖u)^{outcome_u ⊕ [u∈S]}
    /// where C = N(u) ∩ N(v).
    pub fn measure_x_pair(&self, u: usize, v: usize, outcome_u: u8, outcome_v: u8) -> StateResult<Self> {
        let mut graph = self.graph.clone();
        let mut sign = self.sign.clone();
        x_pair_in_place(&mut graph, &mut sign, u, v, outcome_u, outcome_v)?;
        Ok(self.compact_without(&graph, sign, &[u, v]))
    }

    /// X measurement of an isolated vertex: the outcome is forced to [u∈S]
    /// and the state becomes |G∖u; S∖u⟩.
    pub fn measure_x_isolated(&self, u: usize) -> StateResult<(u8, Self)> {
        self.graph.check(u)?;
        if self.graph.degree(u) != 0 {
            return Err(StateError::NotIsolated(u));
        }
        let outcome = u8::from(self.sign.contains(u));
        let mut sign = self.sign.clone();
        sign.remove(u);
        Ok((outcome, self.compact_without(&self.graph, sign, &[u])))
    }

    fn compact_without(&self, graph: &Graph, sign: VertexSet, gone: &[usize]) -> Self {
        let mut keep = VertexSet::full(graph.vertex_count());
        for &w in gone {
            keep.remove(w);
        }
        let (graph, old) = graph.induced(&keep);
        let sign = VertexSet::from_iter(old.len(), old.iter().enumerate().filter(|(_, &w)| sign.contains(w)).map(|(i, _)| i));
        Self { graph, sign }
    }

    /// Edge-list block followed by `S: u1 u2 ...`.
    pub fn to_text(&self) -> String {
        let s: Vec<String> = self.sign.iter().map(|u| u.to_string()).collect();
        format!("{}S: {}\n", self.graph.to_edge_list(), s.join(" "))
    }

    pub fn parse_text(text: &str) -> StateResult<Self> {
        let (body, sign_line) = match text.trim_end().rsplit_once('\n') {
            Some((body, last)) if last.trim_start().starts_with("S:") => (body, last),
            _ => return Err(StateError::Parse("missing trailing 'S:' line".into())),
        };
        let graph = Graph::parse_edge_list(body)?;
        let members = sign_line
            .trim_start()
            .trim_start_matches("S:")
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| StateError::Parse(e.to_string())))
            .collect::<StateResult<Vec<_>>>()?;
        let n = graph.vertex_count();
        if let Some(&bad) = members.iter().find(|&&u| u >= n) {
            return Err(StateError::SignOutOfRange(bad));
        }
        Self::new(graph, &VertexSet::from_iter(n, members))
    }
}

impl fmt::Debug for SignedGraphState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{:?}; S={:?}>", self.graph, self.sign)
    }
}

/// The X-pair rule on an uncompacted graph: u and v end up isolated.
fn x_pair_in_place(
    graph: &mut Graph,
    sign: &mut VertexSet,
    u: usize,
    v: usize,
    outcome_u: u8,
    outcome_v: u8,
) -> StateResult<()> {
    graph.check_edge(u, v)?;
    let n = graph.vertex_count();
    let nu = VertexSet::from_iter(n, graph.neighbors(u).iter().copied().filter(|&w| w != v));
    let nv = VertexSet::from_iter(n, graph.neighbors(v).iter().copied().filter(|&w| w != u));
    let mut common = nu.clone();
    common.intersect_with(&nv);
    let (u_in, v_in) = (u8::from(sign.contains(u)), u8::from(sign.contains(v)));
    sign.remove(u);
    sign.remove(v);
    sign.xor_with(&common);
    if (outcome_v ^ v_in) & 1 == 1 {
        sign.xor_with(&nu);
    }
    if (outcome_u ^ u_in) & 1 == 1 {
        sign.xor_with(&nv);
    }
    graph.pivot_mut(u, v)?;
    graph.isolate_mut(u);
    graph.isolate_mut(v);
    Ok(())
}

/// Kind of a replay step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepOp {
    #[serde(rename = "Z")]
    Z,
    #[serde(rename = "Xpair")]
    XPair,
    #[serde(rename = "Xiso")]
    XIso,
}

/// One measurement of a replay, in original labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleStep {
    pub op: StepOp,
    pub vertices: Vec<usize>,
    pub outcomes: Vec<u8>,
}

/// How [`replay_plan`] picks the next adjacent X pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingStrategy {
    /// Smallest X vertex with an X neighbour, paired with its smallest X neighbour.
    #[default]
    LowestEdge,
    /// Largest X vertex with an X neighbour, paired with its largest X neighbour.
    HighestEdge,
}

/// Residual state of a replay together with its schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    pub state: SignedGraphState,
    /// `survivors[i]` is the original label of residual vertex `i`.
    pub survivors: Vec<usize>,
    pub schedule: Vec<ScheduleStep>,
}

/// Measure `z_set` in Z, then `x_set` in X, staying inside the signed graph
/// states.
///
/// All Z measurements come first, in label order. Adjacent X vertices are then
/// consumed in pairs by the X-pair rule until the remaining X vertices are
/// independent; each of those must be isolated by then and is measured with
/// its forced outcome. Outcomes are drawn from `outcomes` one per Z vertex
/// and two per X pair (u first).
pub fn replay_plan(
    st: &SignedGraphState,
    x_set: &VertexSet,
    z_set: &VertexSet,
    outcomes: &mut OutcomeSource,
    strategy: PairingStrategy,
) -> StateResult<Replay> {
    let n = st.vertex_count();
    for u in x_set.iter().chain(z_set.iter()) {
        st.graph.check(u)?;
    }
    if let Some(u) = x_set.iter().find(|&u| z_set.contains(u)) {
        return Err(StateError::Overlap(u));
    }
    let mut graph = st.graph.clone();
    let mut sign = st.sign.clone();
    let mut alive = VertexSet::full(n);
    let mut schedule = Vec::new();

    for u in z_set.iter() {
        let s = outcomes.next_bit()?;
        sign.remove(u);
        if s == 1 {
            for &w in graph.neighbors(u) {
                sign.toggle(w);
            }
        }
        graph.isolate_mut(u);
        alive.remove(u);
        schedule.push(ScheduleStep { op: StepOp::Z, vertices: vec![u], outcomes: vec![s] });
    }

    let is_x = |w: usize| x_set.contains(w);
    let has_x_neighbor = |g: &Graph, w: usize| g.neighbors(w).iter().any(|&y| is_x(y));
    let mut candidates: BTreeSet<usize> = x_set.iter().filter(|&w| has_x_neighbor(&graph, w)).collect();
    loop {
        let picked = match strategy {
            PairingStrategy::LowestEdge => candidates.first().map(|&u| {
                (u, *graph.neighbors(u).iter().find(|&&y| is_x(y)).expect("candidate has an X neighbour"))
            }),
            PairingStrategy::HighestEdge => candidates.last().map(|&u| {
                (u, *graph.neighbors(u).iter().rev().find(|&&y| is_x(y)).expect("candidate has an X neighbour"))
            }),
        };
        let Some((u, v)) = picked else { break };
        let r_u = outcomes.next_bit()?;
        let r_v = outcomes.next_bit()?;
        let touched: Vec<usize> = graph.neighbors(u).iter().chain(graph.neighbors(v)).copied().collect();
        x_pair_in_place(&mut graph, &mut sign, u, v, r_u, r_v)?;
        alive.remove(u);
        alive.remove(v);
        for w in touched.into_iter().chain([u, v]) {
            if is_x(w) && has_x_neighbor(&graph, w) {
                candidates.insert(w);
            } else {
                candidates.remove(&w);
            }
        }
        schedule.push(ScheduleStep { op: StepOp::XPair, vertices: vec![u, v], outcomes: vec![r_u, r_v] });
    }

    let leftover: Vec<usize> = x_set.iter().filter(|&u| alive.contains(u)).collect();
    for u in leftover {
        if graph.degree(u) != 0 {
            return Err(StateError::NotExpressible(u));
        }
        let outcome = u8::from(sign.contains(u));
        sign.remove(u);
        alive.remove(u);
        schedule.push(ScheduleStep { op: StepOp::XIso, vertices: vec![u], outcomes: vec![outcome] });
    }

    let (graph, survivors) = graph.induced(&alive);
    let sign = VertexSet::from_iter(
        survivors.len(),
        survivors.iter().enumerate().filter(|(_, &w)| sign.contains(w)).map(|(i, _)| i),
    );
    Ok(Replay { state: SignedGraphState { graph, sign }, survivors, schedule })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GridKind};

    fn path(n: usize) -> Graph {
        generate(GridKind::Path, 1, n).unwrap()
    }

    fn st(g: Graph, s: &[usize]) -> SignedGraphState {
        let n = g.vertex_count();
        SignedGraphState::new(g, &VertexSet::from_iter(n, s.iter().copied())).unwrap()
    }

    #[test]
    fn pauli_examples() {
        let p3 = st(path(3), &[]);
        assert_eq!(p3.apply_pauli(&PauliWord::x(3, 1)).unwrap(), st(path(3), &[0, 2]));
        assert_eq!(p3.apply_pauli(&PauliWord::z(3, 2)).unwrap(), st(path(3), &[2]));
        let p2 = st(path(2), &[]);
        assert_eq!(p2.apply_pauli(&PauliWord::y(2, 0)).unwrap(), st(path(2), &[0, 1]));
    }

    #[test]
    fn lc_examples() {
        assert_eq!(st(path(3), &[]).apply_lc_op(1).unwrap(), st(Graph::complete(3), &[]));
        assert_eq!(st(path(3), &[1]).apply_lc_op(1).unwrap(), st(Graph::complete(3), &[0, 1, 2]));
    }

    #[test]
    fn hadamard_pair_on_an_edge() {
        assert_eq!(st(path(2), &[]).apply_hadamard_pair(0, 1).unwrap(), st(path(2), &[]));
        assert_eq!(st(path(2), &[0]).apply_hadamard_pair(0, 1).unwrap(), st(path(2), &[1]));
        assert!(st(path(3), &[]).apply_hadamard_pair(0, 2).is_err());
    }

    #[test]
    fn z_measurement_examples() {
        let k3 = st(Graph::complete(3), &[]);
        assert_eq!(k3.measure_z(0, 0).unwrap(), st(path(2), &[]));
        assert_eq!(k3.measure_z(0, 1).unwrap(), st(path(2), &[0, 1]));
    }

    #[test]
    fn x_pair_examples() {
        for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_eq!(st(path(2), &[]).measure_x_pair(0, 1, a, b).unwrap(), st(Graph::new(0), &[]));
        }
        let p3 = st(path(3), &[]);
        assert_eq!(p3.measure_x_pair(0, 1, 0, 1).unwrap(), st(Graph::new(1), &[]));
        assert_eq!(p3.measure_x_pair(0, 1, 1, 0).unwrap(), st(Graph::new(1), &[0]));
    }

    #[test]
    fn x_isolated_examples() {
        let g = Graph::from_edges(3, [(1, 2)]).unwrap();
        assert_eq!(st(g.clone(), &[]).measure_x_isolated(0).unwrap(), (0, st(path(2), &[])));
        assert_eq!(st(g.clone(), &[0, 2]).measure_x_isolated(0).unwrap(), (1, st(path(2), &[1])));
        assert_eq!(st(g, &[]).measure_x_isolated(1), Err(StateError::NotIsolated(1)));
    }

    #[test]
    fn replay_deleting_everything() {
        let g = generate(GridKind::Triangular, 3, 3).unwrap();
        let r = replay_plan(
            &SignedGraphState::unsigned(g),
            &VertexSet::new(9),
            &VertexSet::full(9),
            &mut OutcomeSource::Zero,
            PairingStrategy::LowestEdge,
        )
        .unwrap();
        assert_eq!(r.state, st(Graph::new(0), &[]));
        assert_eq!(r.schedule.len(), 9);
    }

    #[test]
    fn replay_rejects_dangling_x_vertex() {
        let err = replay_plan(
            &SignedGraphState::unsigned(path(3)),
            &VertexSet::from_iter(3, [1]),
            &VertexSet::new(3),
            &mut OutcomeSource::Zero,
            PairingStrategy::LowestEdge,
        );
        assert_eq!(err, Err(StateError::NotExpressible(1)));
    }

    #[test]
    fn text_round_trip() {
        let s = st(Graph::complete(3), &[0, 2]);
        assert_eq!(SignedGraphState::parse_text(&s.to_text()).unwrap(), s);
    }
}
