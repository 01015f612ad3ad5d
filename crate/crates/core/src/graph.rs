//! Functional graphs `G(f, Z/mZ)`: construction, rho-shape decomposition,
//! tensor products and the lifted graph of a cycle.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::crt::CrtMap;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::poly::PolyFunc;
use crate::residue::{Modulus, PrimePower};

/// A cycle `v_0 -> v_1 -> ... -> v_{k-1} -> v_0`, rotated so that `v_0` is its
/// smallest vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    vertices: Vec<u64>,
    modulus: u64,
}

impl Cycle {
    /// Builds a cycle from vertices listed in successor order, starting anywhere.
    pub fn from_orbit(mut vertices: Vec<u64>, modulus: u64) -> Self {
        assert!(!vertices.is_empty(), "a cycle has at least one vertex");
        let start = vertices
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| *v)
            .map(|(i, _)| i)
            .unwrap();
        vertices.rotate_left(start);
        Cycle { vertices, modulus }
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// The smallest vertex, `v_0`.
    pub fn first(&self) -> u64 {
        self.vertices[0]
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, v: u64) -> bool {
        self.vertices.contains(&v)
    }

    pub fn to_json(&self) -> Value {
        json!({ "vertices": self.vertices, "size": self.size() })
    }
}

/// The cycle that `v` eventually reaches under `f` modulo `m`, found without
/// building the graph (Brent's cycle finding, then one walk around the cycle).
pub fn cycle_reached_from(f: &PolyFunc, m: u64, v: u64) -> Cycle {
    walk_to_cycle(f, m, v, u64::MAX).expect("unbounded walk always finishes")
}

/// As [`cycle_reached_from`], with an overflow error when the cycle has more
/// than `limits.max_vertices` vertices or the tail is too long to walk within
/// four times that many steps.
pub fn cycle_reached_from_with_limits(
    f: &PolyFunc,
    m: u64,
    v: u64,
    limits: &Limits,
) -> Result<Cycle> {
    walk_to_cycle(f, m, v, limits.max_vertices).ok_or_else(|| {
        Error::overflow(format!(
            "the orbit of {v} mod {m} is longer than the limit of {} vertices",
            limits.max_vertices
        ))
    })
}

/// Brent's search needs fewer than `4 * max(tail, cycle)` steps, which bounds
/// the walk when the cycle is at most `max_len` long.
fn walk_to_cycle(f: &PolyFunc, m: u64, v: u64, max_len: u64) -> Option<Cycle> {
    let max_steps = max_len.saturating_mul(4);
    let map = f.reduce_mod(m);
    let (mut power, mut len, mut steps) = (1u64, 1u64, 0u64);
    let mut tortoise = v % m;
    let mut hare = map.eval(tortoise);
    while tortoise != hare {
        steps += 1;
        if steps > max_steps {
            return None;
        }
        if power == len {
            tortoise = hare;
            power *= 2;
            len = 0;
        }
        hare = map.eval(hare);
        len += 1;
    }
    if len > max_len {
        return None;
    }
    // `hare` is periodic with period `len`.
    let mut orbit = Vec::with_capacity(len as usize);
    let mut x = hare;
    for _ in 0..len {
        orbit.push(x);
        x = map.eval(x);
    }
    Some(Cycle::from_orbit(orbit, m))
}

/// Rho-shape decomposition of a successor array.
struct Decomposition {
    /// Canonical cycles as vertex-index lists, sorted by `(size, v_0)`.
    cycles: Vec<Vec<usize>>,
    /// Index into `cycles` of the cycle each vertex eventually reaches.
    cycle_of: Vec<u32>,
    /// Distance from each vertex to its cycle; zero on cycles.
    tail_len: Vec<u32>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    White,
    Grey,
    Black,
}

/// Three-color iterative pointer chasing, `O(len)` overall.
fn decompose(succ: &[usize]) -> Decomposition {
    let n = succ.len();
    let mut color = vec![Color::White; n];
    let mut cycle_of = vec![u32::MAX; n];
    let mut tail_len = vec![0u32; n];
    let mut raw_cycles: Vec<Vec<usize>> = Vec::new();
    let mut path = Vec::new();

    for start in 0..n {
        if color[start] != Color::White {
            continue;
        }
        let mut v = start;
        while color[v] == Color::White {
            color[v] = Color::Grey;
            path.push(v);
            v = succ[v];
        }
        let (id, mut dist) = if color[v] == Color::Grey {
            // `v` closes a new cycle made of the path suffix starting at `v`.
            let at = path.iter().rposition(|&u| u == v).unwrap();
            let id = raw_cycles.len() as u32;
            let cycle: Vec<usize> = path.drain(at..).collect();
            for &u in &cycle {
                color[u] = Color::Black;
                cycle_of[u] = id;
            }
            raw_cycles.push(cycle);
            (id, 0)
        } else {
            (cycle_of[v], tail_len[v])
        };
        while let Some(u) = path.pop() {
            dist += 1;
            color[u] = Color::Black;
            cycle_of[u] = id;
            tail_len[u] = dist;
        }
    }

    for cycle in &mut raw_cycles {
        let start = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap();
        cycle.rotate_left(start);
    }
    let mut order: Vec<usize> = (0..raw_cycles.len()).collect();
    order.sort_by_key(|&i| (raw_cycles[i].len(), raw_cycles[i][0]));
    let mut rank = vec![0u32; order.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new as u32;
    }
    for c in &mut cycle_of {
        *c = rank[*c as usize];
    }
    let mut slots: Vec<Option<Vec<usize>>> = raw_cycles.into_iter().map(Some).collect();
    let cycles = order.iter().map(|&i| slots[i].take().unwrap()).collect();

    Decomposition {
        cycles,
        cycle_of,
        tail_len,
    }
}

/// The functional graph of a self-map of `Z/mZ`, with its cycle and tail
/// structure computed at construction.
#[derive(Debug, Clone)]
pub struct FunctionalGraph {
    modulus: Modulus,
    succ: Vec<usize>,
    label: Option<String>,
    poly: Option<PolyFunc>,
    cycles: Vec<Cycle>,
    cycle_of: Vec<u32>,
    tail_len: Vec<u32>,
}

impl FunctionalGraph {
    /// Wraps an arbitrary successor array; every entry must lie in `[0, m)`.
    pub fn from_successors(modulus: Modulus, succ: Vec<usize>) -> Result<Self> {
        let m = modulus.value();
        if succ.len() as u64 != m {
            return Err(Error::domain(format!(
                "successor array has {} entries, expected {m}",
                succ.len()
            )));
        }
        if let Some((v, &s)) = succ.iter().enumerate().find(|&(_, &s)| s as u64 >= m) {
            return Err(Error::domain(format!(
                "succ[{v}] = {s} is outside [0, {m})"
            )));
        }
        let d = decompose(&succ);
        let cycles = d
            .cycles
            .into_iter()
            .map(|c| Cycle {
                vertices: c.into_iter().map(|v| v as u64).collect(),
                modulus: m,
            })
            .collect();
        Ok(FunctionalGraph {
            modulus,
            succ,
            label: None,
            poly: None,
            cycles,
            cycle_of: d.cycle_of,
            tail_len: d.tail_len,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn poly(&self) -> Option<&PolyFunc> {
        self.poly.as_ref()
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn succ(&self) -> &[usize] {
        &self.succ
    }

    pub fn successor(&self, v: u64) -> u64 {
        self.succ[v as usize] as u64
    }

    /// All cycles, canonically rotated and sorted by `(size, v_0)`.
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    /// Index into [`cycles`](Self::cycles) of the unique cycle reached from `v`.
    pub fn cycle_index_of(&self, v: u64) -> usize {
        self.cycle_of[v as usize] as usize
    }

    pub fn cycle_containing(&self, v: u64) -> &Cycle {
        &self.cycles[self.cycle_index_of(v)]
    }

    /// Number of steps from `v` to the first periodic vertex on its path.
    pub fn tail_len(&self, v: u64) -> usize {
        self.tail_len[v as usize] as usize
    }

    pub fn is_periodic(&self, v: u64) -> bool {
        self.tail_len[v as usize] == 0
    }

    fn title(&self) -> String {
        match (&self.label, &self.poly) {
            (Some(label), _) => label.clone(),
            (None, Some(f)) => format!("G({f}, Z/{}Z)", self.modulus.value()),
            (None, None) => format!("G(Z/{}Z)", self.modulus.value()),
        }
    }

    /// Graphviz source with one edge line per vertex. With `color_cycles`,
    /// cycle vertices and edges are colored, one color per cycle.
    pub fn to_dot(&self, color_cycles: bool) -> String {
        const PALETTE: [&str; 8] = [
            "red",
            "blue",
            "darkgreen",
            "orange",
            "purple",
            "brown",
            "magenta",
            "cyan4",
        ];
        let mut out = String::new();
        writeln!(out, "digraph {:?} {{", self.title()).unwrap();
        if color_cycles {
            for (i, cycle) in self.cycles.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                for v in cycle.vertices() {
                    writeln!(out, "  {v} [color={color}];").unwrap();
                }
            }
        }
        for (v, &s) in self.succ.iter().enumerate() {
            if color_cycles && self.tail_len[v] == 0 {
                let color = PALETTE[self.cycle_of[v] as usize % PALETTE.len()];
                writeln!(out, "  {v} -> {s} [color={color}];").unwrap();
            } else {
                writeln!(out, "  {v} -> {s};").unwrap();
            }
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "modulus": self.modulus.value(),
            "poly": self.poly.as_ref().map_or(Value::Null, PolyFunc::to_json),
            "succ": self.succ,
            "cycles": self.cycles.iter().map(Cycle::to_json).collect::<Vec<_>>(),
        })
    }
}

/// `G(f, Z/mZ)` under the default vertex limit.
pub fn build_graph(f: &PolyFunc, modulus: &Modulus) -> Result<FunctionalGraph> {
    build_graph_with_limits(f, modulus, &Limits::default())
}

pub fn build_graph_with_limits(
    f: &PolyFunc,
    modulus: &Modulus,
    limits: &Limits,
) -> Result<FunctionalGraph> {
    let m = modulus.value();
    limits.check_vertices(m)?;
    let map = f.reduce_mod(m);
    let succ = (0..m).map(|v| map.eval(v) as usize).collect();
    let mut graph = FunctionalGraph::from_successors(modulus.clone(), succ)?;
    graph.poly = Some(f.clone());
    Ok(graph)
}

/// The tensor product of two functional graphs, evaluated lazily.
///
/// Pair `(x, y)` has index `x * n + y`, where `n` is the right factor's order.
#[derive(Debug, Clone, Copy)]
pub struct ProductGraph<'a> {
    left: &'a FunctionalGraph,
    right: &'a FunctionalGraph,
}

pub fn tensor_product<'a>(
    left: &'a FunctionalGraph,
    right: &'a FunctionalGraph,
) -> ProductGraph<'a> {
    ProductGraph { left, right }
}

impl<'a> ProductGraph<'a> {
    pub fn left(&self) -> &'a FunctionalGraph {
        self.left
    }

    pub fn right(&self) -> &'a FunctionalGraph {
        self.right
    }

    pub fn len(&self) -> usize {
        self.left.len() * self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.right.len() + y
    }

    pub fn pair(&self, index: usize) -> (usize, usize) {
        (index / self.right.len(), index % self.right.len())
    }

    pub fn successor(&self, (x, y): (usize, usize)) -> (usize, usize) {
        (self.left.succ[x], self.right.succ[y])
    }

    /// Tensor-product edge rule: both coordinates must be edges of their factor.
    pub fn has_edge(&self, from: (usize, usize), to: (usize, usize)) -> bool {
        self.left.succ[from.0] == to.0 && self.right.succ[from.1] == to.1
    }

    /// Cycles of the product as pair lists; this materializes the successor array.
    pub fn cycles(&self) -> Vec<Vec<(usize, usize)>> {
        let succ: Vec<usize> = (0..self.len()).map(|i| self.index_successor(i)).collect();
        decompose(&succ)
            .cycles
            .into_iter()
            .map(|c| c.into_iter().map(|i| self.pair(i)).collect())
            .collect()
    }

    fn index_successor(&self, i: usize) -> usize {
        let (x, y) = self.successor(self.pair(i));
        self.index(x, y)
    }
}

/// Checks that `phi` is a graph isomorphism from the product onto `target`.
///
/// Vertex bijectivity is established by recovering both coordinates of each
/// image with the projections mod `m` and mod `n`; edges are compared one
/// product vertex at a time, so nothing of size `m * n` is allocated beyond
/// `target` itself.
pub fn check_isomorphism_via_map(
    product: &ProductGraph<'_>,
    target: &FunctionalGraph,
    phi: &CrtMap,
) -> Result<bool> {
    let (m, n) = (product.left.modulus.value(), product.right.modulus.value());
    if num_integer::gcd(m, n) != 1 {
        return Err(Error::domain(format!("moduli {m} and {n} are not coprime")));
    }
    if phi.m() != m || phi.n() != n {
        return Err(Error::domain(format!(
            "CRT map is for ({}, {}), product is over ({m}, {n})",
            phi.m(),
            phi.n()
        )));
    }
    if target.modulus.value() != m * n || target.len() != product.len() {
        return Ok(false);
    }
    for x in 0..m {
        for y in 0..n {
            let image = phi.apply(x, y);
            if image >= m * n || image % m != x || image % n != y {
                return Ok(false);
            }
            let (sx, sy) = product.successor((x as usize, y as usize));
            if target.successor(image) != phi.apply(sx as u64, sy as u64) {
                return Ok(false);
            }
        }
    }
    // Both graphs have exactly one out-edge per vertex.
    Ok(true)
}

/// The subgraph of `G(f, Z/p^{n+1}Z)` induced by the preimage of a cycle of
/// `G(f, Z/p^nZ)`.
#[derive(Debug, Clone)]
pub struct LiftedGraph {
    modulus: PrimePower,
    /// Sorted vertex values in `[0, p^{n+1})`.
    vertices: Vec<u64>,
    /// Successors as indices into `vertices`.
    succ: Vec<usize>,
    cycles: Vec<Cycle>,
    periodic: usize,
}

impl LiftedGraph {
    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn successor(&self, v: u64) -> Option<u64> {
        let i = self.vertices.binary_search(&v).ok()?;
        Some(self.vertices[self.succ[i]])
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    /// Number of vertices lying on some cycle.
    pub fn periodic_count(&self) -> usize {
        self.periodic
    }
}

/// Checks that `cycle` really is a cycle of `f` modulo `level`.
pub(crate) fn validate_cycle(f: &PolyFunc, level: PrimePower, cycle: &Cycle) -> Result<()> {
    if cycle.modulus() != level.value() {
        return Err(Error::domain(format!(
            "cycle lives modulo {}, expected {}",
            cycle.modulus(),
            level.value()
        )));
    }
    let map = f.reduce_mod(level.value());
    let vs = cycle.vertices();
    let mut seen = vs.to_vec();
    seen.sort_unstable();
    seen.dedup();
    let closes = vs
        .iter()
        .enumerate()
        .all(|(i, &v)| map.eval(v) == vs[(i + 1) % vs.len()]);
    if seen.len() != vs.len() || !closes || vs.iter().any(|&v| v >= level.value()) {
        return Err(Error::domain(format!(
            "vertex list is not a cycle of {f} modulo {level}"
        )));
    }
    Ok(())
}

pub fn lifted_subgraph(f: &PolyFunc, level: PrimePower, cycle: &Cycle) -> Result<LiftedGraph> {
    lifted_subgraph_with_limits(f, level, cycle, &Limits::default())
}

pub fn lifted_subgraph_with_limits(
    f: &PolyFunc,
    level: PrimePower,
    cycle: &Cycle,
    limits: &Limits,
) -> Result<LiftedGraph> {
    validate_cycle(f, level, cycle)?;
    let upper = level.next()?;
    limits.check_vertices(upper.value())?;
    let (p, pn) = (level.prime(), level.value());
    let mut vertices: Vec<u64> = cycle
        .vertices()
        .iter()
        .flat_map(|&a| (0..p).map(move |j| a + j * pn))
        .collect();
    vertices.sort_unstable();
    let map = f.reduce_mod(upper.value());
    let succ: Vec<usize> = vertices
        .iter()
        .map(|&v| {
            vertices
                .binary_search(&map.eval(v))
                .expect("the preimage of a cycle is closed under f")
        })
        .collect();
    let d = decompose(&succ);
    // `vertices` is sorted, so index order agrees with value order.
    let cycles = d
        .cycles
        .into_iter()
        .map(|c| Cycle::from_orbit(c.into_iter().map(|i| vertices[i]).collect(), upper.value()))
        .collect();
    let periodic = d.tail_len.iter().filter(|&&t| t == 0).count();
    Ok(LiftedGraph {
        modulus: upper,
        vertices,
        succ,
        cycles,
        periodic,
    })
}
