//! Embedding an arbitrary graph as a pivot minor of a triangular grid.
//!
//! The graph is first written as a circuit of ΛZ gates acting on |+⟩^n, the
//! circuit is made nearest-neighbour with SWAPs, and the SWAPs are expanded
//! into H and ΛZ. Each (wire, layer) cell of the circuit then becomes a 4×4
//! tile of the grid holding an induced path of X-measured vertices; every
//! other vertex is Z measured. Replaying the resulting plan with the signed
//! graph state rules leaves exactly the source graph on the output vertices.
//!
//! Tile geometry, in (row, column) offsets from the top-left corner of a
//! wire's band and a layer's columns. Every path enters at (1, 0) and leaves
//! towards (1, 4), the entry of the next tile.
//!
//! ```text
//! Id   (1,0) (1,1) (1,2) (1,3)                      4 edges, identity
//! H    (1,0) (1,1) (2,1) (2,2) (1,3)                5 edges, Hadamard
//! ΛZ↑  (1,0) (1,1) (2,1) (3,1) (3,2) (2,3)          6 edges, attach at (3,2)
//! ΛZ↓  (1,0) (2,0) (2,1) (3,1) (3,2) (2,3)          6 edges, attach at (2,1)
//! bridge (4,2) (5,2) in the upper band's offsets, joining the attach points
//! ```
//!
//! The attach points sit an even number of edges after the tile entry, so the
//! logical qubit is there unchanged, and pivoting on the two bridge vertices
//! leaves a single edge between them: a ΛZ. In the last layer the path ends
//! on the output at (1, 3), so Id uses the H shape and H the Id shape to keep
//! the parity right. Adjacent tiles only touch at (1, 3) and (1, 0), except
//! around ΛZ tiles; that is why a wire may not take part in ΛZ gates on two
//! consecutive layers, and why the last layer never holds a ΛZ.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{generate, Graph, GraphError, GridKind, VertexSet};
use crate::outcome::OutcomeSource;
use crate::signed::{replay_plan, PairingStrategy, ScheduleStep, SignedGraphState, StateError};

/// Documented constant c in d ≤ c·n³.
pub const DEPTH_CONSTANT: usize = 18;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("replay failed: {0}")]
    Replay(#[from] StateError),
    #[error("circuit is not planar: {0}")]
    NotPlanar(String),
    #[error("malformed compilation: {0}")]
    Malformed(String),
    #[error("certificate mismatch: {0}")]
    Mismatch(String),
}

pub type CompileResult<T> = Result<T, CompileError>;

/// Gates of preparation circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitGate {
    H(usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CircuitGate {
    fn wires(&self) -> (usize, Option<usize>) {
        match *self {
            CircuitGate::H(w) => (w, None),
            CircuitGate::Cz(a, b) | CircuitGate::Swap(a, b) => (a.min(b), Some(a.max(b))),
        }
    }
}

/// Gate list on `wires` wires. `initial_hadamards` records the H column
/// that turns |0⟩^n into |+⟩^n; the grid starts from |+⟩ already, so layout
/// ignores it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub wires: usize,
    pub initial_hadamards: bool,
    pub gates: Vec<CircuitGate>,
}

impl Circuit {
    pub fn new(wires: usize, gates: Vec<CircuitGate>) -> Self {
        Self { wires, initial_hadamards: false, gates }
    }

    pub fn cz_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, CircuitGate::Cz(..))).count()
    }

    /// Every two-wire gate acts on neighbouring wires and no SWAP is left.
    pub fn is_planar(&self) -> bool {
        self.gates.iter().all(|g| match *g {
            CircuitGate::H(_) => true,
            CircuitGate::Cz(a, b) => a.abs_diff(b) == 1,
            CircuitGate::Swap(..) => false,
        })
    }

    /// Layer index of every gate under the tile rules, and the depth.
    pub fn layering(&self) -> (Vec<usize>, usize) {
        let mut free = vec![0usize; self.wires];
        let mut last_cz: Vec<Option<usize>> = vec![None; self.wires];
        let mut layers = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let layer = match g.wires() {
                (w, None) => free[w],
                (a, Some(b)) => [a, b]
                    .iter()
                    .map(|&w| free[w].max(last_cz[w].map_or(0, |l| l + 2)))
                    .max()
                    .unwrap_or(0),
            };
            let (a, b) = g.wires();
            for w in std::iter::once(a).chain(b) {
                free[w] = layer + 1;
                if b.is_some() {
                    last_cz[w] = Some(layer);
                }
            }
            layers.push(layer);
        }
        let used = free.iter().copied().max().unwrap_or(0);
        let ends_with_cz = last_cz.iter().flatten().any(|&l| l + 1 == used);
        let depth = if used == 0 { 1 } else { used + usize::from(ends_with_cz) };
        (layers, depth)
    }
}

/// The H column followed by one ΛZ per edge.
pub fn prep_circuit(g: &Graph) -> Circuit {
    Circuit {
        wires: g.vertex_count(),
        initial_hadamards: true,
        gates: g.edges().map(|(u, v)| CircuitGate::Cz(u, v)).collect(),
    }
}

/// SWAP = H_a ΛZ H_a H_b ΛZ H_a H_b ΛZ H_a.
fn expand_swap(a: usize, b: usize, out: &mut Vec<CircuitGate>) {
    use CircuitGate::{Cz, H};
    out.extend([H(a), Cz(a, b), H(a), H(b), Cz(a, b), H(a), H(b), Cz(a, b), H(a)]);
}

/// Route every ΛZ onto neighbouring wires and expand the SWAPs.
///
/// ΛZ(i, j) with j > i + 1 becomes: SWAP wire j down to i + 1, ΛZ(i, i + 1),
/// SWAP back. The circuit's unitary is unchanged. Adjacent H pairs on a wire
/// are cancelled afterwards.
pub fn planarize(c: &Circuit) -> Circuit {
    let mut routed = Vec::new();
    for g in &c.gates {
        match *g {
            CircuitGate::Cz(a, b) if a.abs_diff(b) > 1 => {
                let (i, j) = (a.min(b), a.max(b));
                for k in (i + 2..=j).rev() {
                    expand_swap(k - 1, k, &mut routed);
                }
                routed.push(CircuitGate::Cz(i, i + 1));
                for k in i + 2..=j {
                    expand_swap(k - 1, k, &mut routed);
                }
            }
            CircuitGate::Swap(a, b) => expand_swap(a, b, &mut routed),
            other => routed.push(other),
        }
    }
    Circuit { wires: c.wires, initial_hadamards: c.initial_hadamards, gates: cancel_hadamard_pairs(routed) }
}

fn cancel_hadamard_pairs(gates: Vec<CircuitGate>) -> Vec<CircuitGate> {
    let mut out: Vec<Option<CircuitGate>> = Vec::with_capacity(gates.len());
    let mut last_on: BTreeMap<usize, usize> = BTreeMap::new();
    for g in gates {
        match g {
            CircuitGate::H(w) => {
                if let Some(&i) = last_on.get(&w) {
                    if out[i] == Some(CircuitGate::H(w)) {
                        out[i] = None;
                        last_on.remove(&w);
                        continue;
                    }
                }
                last_on.insert(w, out.len());
                out.push(Some(g));
            }
            _ => {
                let (a, b) = g.wires();
                last_on.insert(a, out.len());
                if let Some(b) = b {
                    last_on.insert(b, out.len());
                }
                out.push(Some(g));
            }
        }
    }
    out.into_iter().flatten().collect()
}

/// What a (wire, layer) cell of the grid implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TileKind {
    #[serde(rename = "Id")]
    Id,
    #[serde(rename = "H")]
    H,
    #[serde(rename = "CZ-upper")]
    CzUpper,
    #[serde(rename = "CZ-lower")]
    CzLower,
}

impl fmt::Display for TileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TileKind::Id => "Id",
            TileKind::H => "H",
            TileKind::CzUpper => "CZ-upper",
            TileKind::CzLower => "CZ-lower",
        })
    }
}

const PATH_ID: &[(usize, usize)] = &[(1, 0), (1, 1), (1, 2), (1, 3)];
const PATH_H: &[(usize, usize)] = &[(1, 0), (1, 1), (2, 1), (2, 2), (1, 3)];
const PATH_CZ_UPPER: &[(usize, usize)] = &[(1, 0), (1, 1), (2, 1), (3, 1), (3, 2), (2, 3)];
const PATH_CZ_LOWER: &[(usize, usize)] = &[(1, 0), (2, 0), (2, 1), (3, 1), (3, 2), (2, 3)];
const BRIDGE: &[(usize, usize)] = &[(4, 2), (5, 2)];

/// Path cells of a tile; the terminal layer swaps the Id and H shapes.
fn tile_path(kind: TileKind, terminal: bool) -> &'static [(usize, usize)] {
    match (kind, terminal) {
        (TileKind::Id, false) | (TileKind::H, true) => PATH_ID,
        (TileKind::H, false) | (TileKind::Id, true) => PATH_H,
        (TileKind::CzUpper, _) => PATH_CZ_UPPER,
        (TileKind::CzLower, _) => PATH_CZ_LOWER,
    }
}

/// A triangular grid with its measurement plan and certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridCompilation {
    pub rows: usize,
    pub cols: usize,
    pub wires: usize,
    pub depth: usize,
    pub grid: Graph,
    /// `tiles[w][l]` is the tile of wire `w` in layer `l`.
    pub tiles: Vec<Vec<TileKind>>,
    pub x_set: VertexSet,
    pub z_set: VertexSet,
    /// Output vertex of every wire, in wire order.
    pub outputs: Vec<usize>,
    /// Grid output vertex → source vertex.
    pub output_map: BTreeMap<usize, usize>,
    /// Replay schedule with all-zero outcomes.
    pub schedule: Vec<ScheduleStep>,
}

impl GridCompilation {
    pub fn vertex_count(&self) -> usize {
        self.rows * self.cols
    }

    /// X-measured path cells of every wire, in path order, excluding the
    /// output. Used for oracle checks on small grids.
    pub fn wire_paths(&self) -> Vec<Vec<usize>> {
        (0..self.wires)
            .map(|w| {
                let mut path = Vec::new();
                for l in 0..self.depth {
                    let terminal = l + 1 == self.depth;
                    for &(r, c) in tile_path(self.tiles[w][l], terminal) {
                        path.push((4 * w + r) * self.cols + 4 * l + c);
                    }
                }
                path.pop();
                path
            })
            .collect()
    }
}

/// [`place_tiles`] followed by the all-zero replay that fills the schedule.
pub fn layout(c: &Circuit) -> CompileResult<GridCompilation> {
    let mut comp = place_tiles(c)?;
    let replay = replay_plan(
        &SignedGraphState::unsigned(comp.grid.clone()),
        &comp.x_set,
        &comp.z_set,
        &mut OutcomeSource::Zero,
        PairingStrategy::LowestEdge,
    )?;
    comp.schedule = replay.schedule;
    Ok(comp)
}

/// Place one tile per (wire, layer) cell of a planar, SWAP-free circuit.
/// The schedule is left empty.
pub fn place_tiles(c: &Circuit) -> CompileResult<GridCompilation> {
    if !c.is_planar() {
        return Err(CompileError::NotPlanar("layout needs adjacent ΛZ gates and no SWAP".into()));
    }
    let n = c.wires;
    let (layer_of, depth) = c.layering();
    let mut tiles = vec![vec![TileKind::Id; depth]; n];
    for (g, &l) in c.gates.iter().zip(&layer_of) {
        match g.wires() {
            (w, None) => tiles[w][l] = TileKind::H,
            (a, Some(b)) => {
                tiles[a][l] = TileKind::CzUpper;
                tiles[b][l] = TileKind::CzLower;
            }
        }
    }
    let (rows, cols) = (4 * n, 4 * depth);
    let grid = if n == 0 { Graph::new(0) } else { generate(GridKind::Triangular, rows, cols)? };
    let id = |r: usize, c: usize| r * cols + c;
    let total = rows * cols;
    let mut x_set = VertexSet::new(total);
    for (w, row) in tiles.iter().enumerate() {
        for (l, &kind) in row.iter().enumerate() {
            for &(r, cc) in tile_path(kind, l + 1 == depth) {
                x_set.insert(id(4 * w + r, 4 * l + cc));
            }
            if kind == TileKind::CzUpper {
                for &(r, cc) in BRIDGE {
                    x_set.insert(id(4 * w + r, 4 * l + cc));
                }
            }
        }
    }
    let outputs: Vec<usize> = (0..n).map(|w| id(4 * w + 1, cols - 1)).collect();
    for &o in &outputs {
        x_set.remove(o);
    }
    let mut z_set = VertexSet::full(total);
    z_set.difference_with(&x_set);
    for &o in &outputs {
        z_set.remove(o);
    }
    let output_map = outputs.iter().enumerate().map(|(w, &o)| (o, w)).collect();
    Ok(GridCompilation {
        rows,
        cols,
        wires: n,
        depth,
        grid,
        tiles,
        x_set,
        z_set,
        outputs,
        output_map,
        schedule: Vec::new(),
    })
}

/// prep_circuit, planarize, layout, then check the certificate against `g`.
pub fn compile_graph(g: &Graph) -> CompileResult<GridCompilation> {
    let comp = layout(&planarize(&prep_circuit(g)))?;
    verify(&comp, g, &mut OutcomeSource::Zero)?;
    Ok(comp)
}

/// Result of a successful [`verify`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    /// Residual sign set in source labels; empty for all-zero outcomes.
    pub sign: VertexSet,
    pub schedule: Vec<ScheduleStep>,
}

/// Replay the plan on |grid; ∅⟩ and compare the residual with `g`.
///
/// The residual graph must equal `g` under `output_map` for any outcomes;
/// with [`OutcomeSource::Zero`] the sign must also be empty.
pub fn verify(comp: &GridCompilation, g: &Graph, outcomes: &mut OutcomeSource) -> CompileResult<Verification> {
    verify_with(comp, g, outcomes, PairingStrategy::LowestEdge)
}

/// [`verify`] with an explicit X-pair selection order.
pub fn verify_with(
    comp: &GridCompilation,
    g: &Graph,
    outcomes: &mut OutcomeSource,
    strategy: PairingStrategy,
) -> CompileResult<Verification> {
    check_partition(comp)?;
    if g.vertex_count() != comp.wires {
        return Err(CompileError::Mismatch(format!(
            "compilation has {} outputs, graph has {} vertices",
            comp.wires,
            g.vertex_count()
        )));
    }
    let zero = matches!(outcomes, OutcomeSource::Zero);
    let replay = replay_plan(
        &SignedGraphState::unsigned(comp.grid.clone()),
        &comp.x_set,
        &comp.z_set,
        outcomes,
        strategy,
    )
    .map_err(|e| CompileError::Mismatch(format!("{e}{}", first_divergence(&comp.schedule, &[]))))?;
    let to_source: Vec<usize> = replay
        .survivors
        .iter()
        .map(|o| comp.output_map.get(o).copied())
        .collect::<Option<_>>()
        .ok_or_else(|| CompileError::Mismatch("a non-output vertex survived the replay".into()))?;
    let residual = replay.state.graph().relabel(&to_source);
    if &residual != g {
        return Err(CompileError::Mismatch(format!(
            "residual {residual:?} differs from target{}",
            first_divergence(&comp.schedule, &replay.schedule)
        )));
    }
    let sign = VertexSet::from_iter(g.vertex_count(), replay.state.sign().iter().map(|i| to_source[i]));
    if zero && !sign.is_empty() {
        return Err(CompileError::Mismatch(format!("all-zero replay left sign {sign:?}")));
    }
    Ok(Verification { sign, schedule: replay.schedule })
}

fn first_divergence(recorded: &[ScheduleStep], replayed: &[ScheduleStep]) -> String {
    let strip = |s: &ScheduleStep| (s.op, s.vertices.clone());
    match recorded.iter().zip(replayed).position(|(a, b)| strip(a) != strip(b)) {
        Some(i) => format!(" (first divergent step #{i}: recorded {:?}, replayed {:?})", recorded[i], replayed[i]),
        None if recorded.len() != replayed.len() => {
            format!(" (schedules agree on {} steps, then lengths differ)", recorded.len().min(replayed.len()))
        }
        None => String::new(),
    }
}

fn check_partition(comp: &GridCompilation) -> CompileResult<()> {
    let total = comp.vertex_count();
    if comp.grid.vertex_count() != total {
        return Err(CompileError::Malformed("grid size does not match rows × cols".into()));
    }
    let outputs = VertexSet::from_iter(total, comp.outputs.iter().copied());
    let mut union = comp.x_set.clone();
    union.union_with(&comp.z_set);
    let mut all = union.clone();
    all.union_with(&outputs);
    let disjoint = comp.x_set.is_disjoint(&comp.z_set) && union.is_disjoint(&outputs);
    if !disjoint || all.len() != total || outputs.len() != comp.outputs.len() {
        return Err(CompileError::Malformed("x_set, z_set and outputs must partition the grid".into()));
    }
    Ok(())
}

/// Measured size figures of a compilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub n: usize,
    pub depth: usize,
    pub rows: usize,
    pub cols: usize,
    pub vertices: usize,
    pub depth_bound: usize,
}

impl SizeReport {
    pub fn of(comp: &GridCompilation) -> Self {
        let n = comp.wires;
        Self {
            n,
            depth: comp.depth,
            rows: comp.rows,
            cols: comp.cols,
            vertices: comp.vertex_count(),
            depth_bound: DEPTH_CONSTANT * n.pow(3).max(1),
        }
    }

    pub fn within_bounds(&self) -> bool {
        self.rows == 4 * self.n
            && self.cols == 4 * self.depth
            && self.vertices <= 16 * self.n * self.depth
            && self.depth <= self.depth_bound
    }
}

#[derive(Serialize, Deserialize)]
struct CompilationRepr {
    rows: usize,
    cols: usize,
    tiles: Vec<Vec<TileKind>>,
    x_set: Vec<usize>,
    z_set: Vec<usize>,
    outputs: Vec<usize>,
    output_map: BTreeMap<usize, usize>,
    schedule: Vec<ScheduleStep>,
}

impl Serialize for GridCompilation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CompilationRepr {
            rows: self.rows,
            cols: self.cols,
            tiles: self.tiles.clone(),
            x_set: self.x_set.to_vec(),
            z_set: self.z_set.to_vec(),
            outputs: self.outputs.clone(),
            output_map: self.output_map.clone(),
            schedule: self.schedule.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GridCompilation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = CompilationRepr::deserialize(deserializer)?;
        if r.rows % 4 != 0 || r.cols % 4 != 0 || r.cols == 0 {
            return Err(D::Error::custom("rows and cols must be positive multiples of 4"));
        }
        let grid = if r.rows == 0 {
            Graph::new(0)
        } else {
            generate(GridKind::Triangular, r.rows, r.cols).map_err(D::Error::custom)?
        };
        let total = r.rows * r.cols;
        if let Some(bad) = r.x_set.iter().chain(&r.z_set).chain(&r.outputs).find(|&&u| u >= total) {
            return Err(D::Error::custom(format!("vertex {bad} outside the grid")));
        }
        Ok(GridCompilation {
            rows: r.rows,
            cols: r.cols,
            wires: r.rows / 4,
            depth: r.cols / 4,
            grid,
            tiles: r.tiles,
            x_set: VertexSet::from_iter(total, r.x_set),
            z_set: VertexSet::from_iter(total, r.z_set),
            outputs: r.outputs,
            output_map: r.output_map,
            schedule: r.schedule,
        })
    }
}
