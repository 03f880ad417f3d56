//! Sweeps comparing every signed-state rewrite rule against the dense oracle.
//!
//! Used by the test suite and by the `selftest` command. A sweep never stops
//! at the first mismatch; it collects up to a handful of failure messages and
//! counts everything.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexSet};
use crate::oracle::{build_graph_state, Gate, StateVector, EQ_TOL, SELF_TOL};
use crate::signed::{PauliWord, SignedGraphState};

const MAX_REPORTED: usize = 10;

#[derive(Debug, Default, Clone)]
pub struct SweepReport {
    pub checks: usize,
    pub failures: usize,
    pub messages: Vec<String>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checks > 0
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.messages.len() < MAX_REPORTED {
                self.messages.push(what());
            }
        }
    }

    pub fn merge(&mut self, other: SweepReport) {
        self.checks += other.checks;
        self.failures += other.failures;
        let room = MAX_REPORTED.saturating_sub(self.messages.len());
        self.messages.extend(other.messages.into_iter().take(room));
    }
}

/// Which Pauli words to try per instance.
#[derive(Debug, Clone, Copy)]
pub enum PauliCoverage {
    /// All 4^n pairs of supports.
    All,
    /// This many uniformly random words.
    Random(usize),
}

/// |⟨a|b⟩| > 1 − 1e-9, comparing amplitudes position by position.
pub fn amplitudes_match(a: &StateVector, b: &StateVector) -> bool {
    if a.amplitudes().len() != b.amplitudes().len() {
        return false;
    }
    let ip: Complex64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x.conj() * y).sum();
    ip.norm() > 1.0 - EQ_TOL
}

fn oracle(st: &SignedGraphState) -> StateVector {
    build_graph_state(st.graph(), st.sign()).expect("sweep sizes stay within the oracle limit")
}

/// Check every rewrite rule on one (G, S) instance.
pub fn check_instance(g: &Graph, sign: &VertexSet, paulis: PauliCoverage, rng: &mut ChaCha8Rng) -> SweepReport {
    let mut rep = SweepReport::default();
    let n = g.vertex_count();
    let st = SignedGraphState::new(g.clone(), sign).expect("sign within range");
    let psi = oracle(&st);
    let tag = || format!("{g:?} S={sign:?}");

    let words: Vec<(u64, u64)> = match paulis {
        PauliCoverage::All => (0..1u64 << n).flat_map(|x| (0..1u64 << n).map(move |z| (x, z))).collect(),
        PauliCoverage::Random(k) => (0..k).map(|_| (rng.gen_range(0..1u64 << n), rng.gen_range(0..1u64 << n))).collect(),
    };
    for (xm, zm) in words {
        let word = PauliWord::new(VertexSet::from_mask(n, xm), VertexSet::from_mask(n, zm));
        let mut phi = psi.clone();
        for u in word.z_support.iter() {
            phi.apply_gate(&Gate::Z(u)).unwrap();
        }
        for u in word.x_support.iter() {
            phi.apply_gate(&Gate::X(u)).unwrap();
        }
        let got = oracle(&st.apply_pauli(&word).unwrap());
        rep.record(amplitudes_match(&got, &phi), || format!("pauli X{xm:b} Z{zm:b} on {}", tag()));
    }

    for u in 0..n {
        let mut phi = psi.clone();
        for &w in g.neighbors(u) {
            phi.apply_gate(&Gate::SqrtZ(w)).unwrap();
        }
        phi.apply_gate(&Gate::SqrtXDg(u)).unwrap();
        let got = oracle(&st.apply_lc_op(u).unwrap());
        rep.record(amplitudes_match(&got, &phi), || format!("lc at {u} on {}", tag()));

        for s in 0..2u8 {
            let ok = match psi.measure_angle(u, 0.0, s) {
                Ok((p, post)) => (p - 0.5).abs() < SELF_TOL && amplitudes_match(&oracle(&st.measure_z(u, s).unwrap()), &post),
                Err(_) => false,
            };
            rep.record(ok, || format!("Z measurement of {u} outcome {s} on {}", tag()));
        }

        if g.degree(u) == 0 {
            let (outcome, rest) = st.measure_x_isolated(u).unwrap();
            let ok = match psi.measure_angle(u, std::f64::consts::FRAC_PI_2, outcome) {
                Ok((p, post)) => (p - 1.0).abs() < SELF_TOL && amplitudes_match(&oracle(&rest), &post),
                Err(_) => false,
            };
            rep.record(ok, || format!("isolated X measurement of {u} on {}", tag()));
        }
    }

    for u in 0..n {
        for &v in g.neighbors(u) {
            let mut phi = psi.clone();
            phi.apply_gate(&Gate::H(u)).unwrap().apply_gate(&Gate::H(v)).unwrap();
            let got = oracle(&st.apply_hadamard_pair(u, v).unwrap());
            rep.record(amplitudes_match(&got, &phi), || format!("hadamard pair {u}{v} on {}", tag()));

            for (ru, rv) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let half = std::f64::consts::FRAC_PI_2;
                let ok = psi
                    .measure_angle(u, half, ru)
                    .and_then(|(p1, mid)| mid.measure_angle(v, half, rv).map(|(p2, post)| (p1 * p2, post)))
                    .map(|(p, post)| {
                        (p - 0.25).abs() < SELF_TOL
                            && amplitudes_match(&oracle(&st.measure_x_pair(u, v, ru, rv).unwrap()), &post)
                    })
                    .unwrap_or(false);
                rep.record(ok, || format!("X pair {u}{v} outcomes ({ru},{rv}) on {}", tag()));
            }
        }
    }
    rep
}

/// Every graph and every sign on up to `max_n` vertices, all Pauli words.
pub fn exhaustive_rule_sweep(max_n: usize) -> SweepReport {
    let mut rep = SweepReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for n in 1..=max_n {
        for g in Graph::all_graphs(n) {
            for s in 0..1u64 << n {
                rep.merge(check_instance(&g, &VertexSet::from_mask(n, s), PauliCoverage::All, &mut rng));
            }
        }
    }
    rep
}

/// `count` random (G, S) instances with 1..=max_n vertices.
pub fn random_rule_sweep(count: usize, max_n: usize, seed: u64) -> SweepReport {
    let mut rep = SweepReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let n = rng.gen_range(1..=max_n);
        let g = random_graph(n, 0.5, &mut rng);
        let s = VertexSet::from_mask(n, rng.gen_range(0..1u64 << n));
        rep.merge(check_instance(&g, &s, PauliCoverage::Random(8), &mut rng));
    }
    rep
}

/// G(n, p) with a seeded generator.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Gram matrix of {|G;S⟩}_S is the identity for every graph on up to
/// `max_n` vertices.
pub fn orthonormality_sweep(max_n: usize) -> SweepReport {
    let mut rep = SweepReport::default();
    for n in 1..=max_n {
        for g in Graph::all_graphs(n) {
            let states: Vec<StateVector> = (0..1u64 << n)
                .map(|s| build_graph_state(&g, &VertexSet::from_mask(n, s)).unwrap())
                .collect();
            let mut worst: f64 = 0.0;
            for (i, a) in states.iter().enumerate() {
                for (j, b) in states.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((a.inner(b).unwrap() - Complex64::new(want, 0.0)).norm());
                }
            }
            rep.record(worst < EQ_TOL, || format!("Gram matrix of {g:?} off by {worst:e}"));
        }
    }
    rep
}

/// Distinct (G, S) pairs on up to `max_n` vertices are never equal up to phase.
pub fn distinctness_sweep(max_n: usize) -> SweepReport {
    let mut rep = SweepReport::default();
    for n in 1..=max_n {
        let all: Vec<(Graph, u64, StateVector)> = Graph::all_graphs(n)
            .flat_map(|g| {
                (0..1u64 << n).map(move |s| {
                    let psi = build_graph_state(&g, &VertexSet::from_mask(n, s)).unwrap();
                    (g.clone(), s, psi)
                })
            })
            .collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let overlap = a.2.inner(&b.2).unwrap().norm();
                rep.record(overlap < 1.0 - EQ_TOL, || format!("{:?};{} ~ {:?};{}", a.0, a.1, b.0, b.1));
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exhaustive_sweep_passes() {
        let rep = exhaustive_rule_sweep(3);
        assert!(rep.passed(), "{:#?}", rep.messages);
    }
}
