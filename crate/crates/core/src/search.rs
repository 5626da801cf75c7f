//! Breadth-first exploration of flip graphs modulo isomorphism.
//!
//! Nodes are canonical keys; a node's map is recovered by decoding its key,
//! and in that labelling the identity is a canonical labelling, so moves out
//! of a node are ranked by smallest flag index. Each BFS level is expanded in
//! parallel and merged in node order, so results do not depend on threads.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_key, CanonicalKey};
use crate::error::{Error, Result};
use crate::map::{SurfaceClass, TriangulationMap};
use crate::moves::{can_flip_at, flip_at, verify_script, Move, MoveScript};
use crate::seeds::standard_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlipMode {
    RegularFlips,
    AllFlips,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: usize,
    pub max_depth: Option<usize>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 1_000_000, max_depth: None }
    }
}

impl SearchBudget {
    pub fn nodes(max_nodes: usize) -> Self {
        SearchBudget { max_nodes, max_depth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub key: CanonicalKey,
    pub vertices: usize,
    pub regular: bool,
    pub depth: usize,
    /// Parent node and the move leading from it to this node.
    pub parent: Option<(usize, Move)>,
}

/// An isomorphism-reduced flip graph explored from a set of roots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipGraphStore {
    pub mode: FlipMode,
    nodes: Vec<Node>,
    index: HashMap<CanonicalKey, usize>,
    edges: Vec<(usize, usize, Move)>,
    complete: bool,
}

impl FlipGraphStore {
    fn new(mode: FlipMode) -> Self {
        FlipGraphStore {
            mode,
            nodes: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            complete: true,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// False when the budget stopped exploration early.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Every flip found, as `(from, to, move)`.
    pub fn edges(&self) -> &[(usize, usize, Move)] {
        &self.edges
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn map(&self, i: usize) -> TriangulationMap {
        self.nodes[i].key.decode().expect("stored keys decode")
    }

    /// Number of distinct neighbours of node `i` (excluding itself).
    pub fn degree(&self, i: usize) -> usize {
        let mut n: Vec<usize> =
            self.edges.iter().filter(|e| e.0 == i && e.1 != i).map(|e| e.1).collect();
        n.sort_unstable();
        n.dedup();
        n.len()
    }

    /// Moves from the root of node `i`'s tree down to `i`.
    pub fn path_to(&self, i: usize) -> Vec<Move> {
        let mut moves = Vec::new();
        let mut cur = i;
        while let Some((p, m)) = self.nodes[cur].parent {
            moves.push(m);
            cur = p;
        }
        moves.reverse();
        moves
    }

    fn root_of(&self, mut i: usize) -> usize {
        while let Some((p, _)) = self.nodes[i].parent {
            i = p;
        }
        i
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct NodeJson {
            key: String,
            v: usize,
            regular: bool,
        }
        #[derive(Serialize)]
        struct StoreJson {
            nodes: Vec<NodeJson>,
            edges: Vec<(usize, usize, String)>,
        }
        let doc = StoreJson {
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeJson { key: n.key.to_hex(), v: n.vertices, regular: n.regular })
                .collect(),
            edges: self.edges.iter().map(|&(i, j, m)| (i, j, move_label(m))).collect(),
        };
        serde_json::to_string(&doc).expect("store serializes")
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph flips {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = if n.regular { "box" } else { "ellipse" };
            let _ = writeln!(out, "  n{i} [label=\"{i} d={}\", shape={shape}];", n.depth);
        }
        for &(i, j, m) in &self.edges {
            let _ = writeln!(out, "  n{i} -> n{j} [label=\"{}\"];", move_label(m));
        }
        out.push_str("}\n");
        out
    }

    fn insert(&mut self, key: CanonicalKey, vertices: usize, regular: bool, depth: usize, parent: Option<(usize, Move)>) -> usize {
        let i = self.nodes.len();
        self.index.insert(key.clone(), i);
        self.nodes.push(Node { key, vertices, regular, depth, parent });
        i
    }
}

fn move_label(m: Move) -> String {
    let kind = match m.kind {
        crate::moves::MoveKind::Flip => "flip",
        crate::moves::MoveKind::Contract => "contract",
        crate::moves::MoveKind::FaceSubdivide => "subdivide",
    };
    format!("{kind}:{}", m.target)
}

/// Neighbours of a canonically labelled map, in rank order.
fn expand(map: &TriangulationMap, mode: FlipMode) -> Vec<(Move, CanonicalKey, usize, bool)> {
    let eo = map.edge_orbits();
    let mut out = Vec::new();
    // With identity labels, edge rank order is the order of smallest flags.
    for (rank, &f) in eo.rep.iter().enumerate() {
        let f = f as usize;
        if !can_flip_at(map, f) {
            continue;
        }
        let child = flip_at(map, f).expect("flippable edge flips");
        let regular = child.is_regular();
        if mode == FlipMode::RegularFlips && !regular {
            continue;
        }
        let v = child.counts().0;
        out.push((Move::flip(rank), canonical_key(&child), v, regular));
    }
    out
}

fn check_roots(roots: &[TriangulationMap], mode: FlipMode) -> Result<()> {
    let first = roots.first().ok_or_else(|| Error::IncompatibleInputs("no roots".into()))?;
    let inv = (first.counts().0, first.surface_class());
    for r in roots {
        if (r.counts().0, r.surface_class()) != inv {
            return Err(Error::IncompatibleInputs(
                "roots differ in vertex count or surface".into(),
            ));
        }
        if mode == FlipMode::RegularFlips && !r.is_regular() {
            return Err(Error::NotRegular);
        }
    }
    Ok(())
}

fn bfs(
    roots: &[TriangulationMap],
    mode: FlipMode,
    budget: SearchBudget,
    target: Option<&CanonicalKey>,
) -> Result<(FlipGraphStore, Option<usize>)> {
    check_roots(roots, mode)?;
    let mut store = FlipGraphStore::new(mode);
    let mut level = Vec::new();
    for r in roots {
        let key = canonical_key(r);
        if store.get(&key).is_none() {
            if store.len() >= budget.max_nodes {
                store.complete = false;
                return Ok((store, None));
            }
            let i = store.insert(key, r.counts().0, r.is_regular(), 0, None);
            level.push(i);
        }
    }
    if let Some(t) = target {
        if let Some(i) = store.get(t) {
            return Ok((store, Some(i)));
        }
    }
    let mut depth = 0;
    while !level.is_empty() {
        let children: Vec<_> = level
            .par_iter()
            .map(|&i| expand(&store.nodes[i].key.decode().expect("stored keys decode"), mode))
            .collect();
        let at_limit = budget.max_depth.is_some_and(|d| depth >= d);
        let mut next = Vec::new();
        for (&i, ch) in level.iter().zip(children) {
            for (mv, key, v, regular) in ch {
                if let Some(j) = store.get(&key) {
                    store.edges.push((i, j, mv));
                    continue;
                }
                if at_limit || store.len() >= budget.max_nodes {
                    store.complete = false;
                    if !at_limit {
                        return Ok((store, None));
                    }
                    continue;
                }
                let hit = target == Some(&key);
                let j = store.insert(key, v, regular, depth + 1, Some((i, mv)));
                store.edges.push((i, j, mv));
                next.push(j);
                if hit {
                    return Ok((store, Some(j)));
                }
            }
        }
        if at_limit {
            break;
        }
        level = next;
        depth += 1;
    }
    Ok((store, None))
}

/// Explores the flip graph from `roots` under `mode` until closed or out of
/// budget (then the store is flagged incomplete).
pub fn explore(
    roots: &[TriangulationMap],
    mode: FlipMode,
    budget: SearchBudget,
) -> Result<FlipGraphStore> {
    bfs(roots, mode, budget, None).map(|(s, _)| s)
}

/// Shortest flip script from `t1` to a map isomorphic to `t2`.
pub fn find_path(
    t1: &TriangulationMap,
    t2: &TriangulationMap,
    mode: FlipMode,
    budget: SearchBudget,
) -> Result<MoveScript> {
    check_roots(&[t1.clone(), t2.clone()], mode)?;
    let target = canonical_key(t2);
    let (store, found) = bfs(std::slice::from_ref(t1), mode, budget, Some(&target))?;
    let i = match found {
        Some(i) => i,
        None if store.is_complete() => return Err(Error::NotConnected),
        None => return Err(Error::Exhausted),
    };
    debug_assert_eq!(store.root_of(i), 0);
    let script = MoveScript {
        start_key: store.nodes[0].key.clone(),
        end_key: target,
        all_regular: mode == FlipMode::RegularFlips,
        moves: store.path_to(i),
    };
    verify_script(&script, t1)?;
    Ok(script)
}

/// All triangulations of a surface with `v` vertices, singular ones included.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub keys: Vec<CanonicalKey>,
    pub regular: Vec<bool>,
}

impl Enumeration {
    pub fn regular_keys(&self) -> Vec<&CanonicalKey> {
        self.keys.iter().zip(&self.regular).filter(|(_, &r)| r).map(|(k, _)| k).collect()
    }
}

/// Closure of the standard seed under all flips.
pub fn enumerate(surface: SurfaceClass, v: usize, budget: SearchBudget) -> Result<Enumeration> {
    let seed = standard_seed(surface, v)?;
    let store = explore(&[seed], FlipMode::AllFlips, budget)?;
    if !store.is_complete() {
        return Err(Error::Exhausted);
    }
    Ok(Enumeration {
        keys: store.nodes.iter().map(|n| n.key.clone()).collect(),
        regular: store.nodes.iter().map(|n| n.regular).collect(),
    })
}
