//! Explicit flip constructions: moving a subdivision vertex between faces,
//! lifting a flip to barycentric subdivisions, and building the second
//! barycentric subdivision out of face subdivisions and regular flips.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::OnceLock;

use crate::canon::{canonical_form, canonical_key};
use crate::error::{Error, Result};
use crate::gluing::Gluing;
use crate::map::{EdgeHandle, FaceHandle, TriangulationMap};
use crate::moves::{barycentric, verify_script, MoveScript, ScriptBuilder};

/// Cap on the local disk search.
pub const LIFT_SEARCH_CAP: usize = 1_000_000;

fn degrees(cv: &[u32], nv: usize) -> Vec<usize> {
    let mut d = vec![0usize; nv];
    for &v in cv {
        d[v as usize] += 1;
    }
    d
}

/// Vertex id of the degree-3 end of `spoke`.
pub(crate) fn cone_vertex(g: &Gluing, spoke: u32) -> Result<u32> {
    let (cv, nv) = g.corner_vertices();
    let deg = degrees(&cv, nv);
    let (a, b) = g.endpoints(&cv, spoke)?;
    match (deg[a as usize] == 3, deg[b as usize] == 3) {
        (true, false) => Ok(a),
        (false, true) => Ok(b),
        _ => Err(Error::GadgetFailed("spoke has no unique degree-3 end".into())),
    }
}

/// Edge ids incident to vertex `w`, with their other endpoint.
fn spokes_of(g: &Gluing, cv: &[u32], w: u32) -> Result<Vec<(u32, u32)>> {
    let mut out = Vec::new();
    for (k, f) in g.faces.iter().enumerate() {
        for (i, s) in f.iter().enumerate() {
            let (x, y) = (cv[3 * k + i], cv[3 * k + (i + 1) % 3]);
            if (x == w || y == w) && !out.iter().any(|&(e, _)| e == s.edge) {
                out.push((s.edge, if x == w { y } else { x }));
            }
        }
    }
    Ok(out)
}

/// Moves the cone vertex at `spoke` across base edge `h` into the neighbouring
/// face: flip `h` (it becomes a spoke), then flip the spoke opposite `h` (it
/// becomes the base edge). Returns `(new spoke, id now carrying the base edge)`.
pub(crate) fn transfer_across(b: &mut ScriptBuilder, spoke: u32, h: u32) -> Result<(u32, u32)> {
    let w = cone_vertex(&b.gluing, spoke)?;
    let (cv, _) = b.gluing.corner_vertices();
    let [p, q, c, d] = b.gluing.quad_vertices(&cv, h)?;
    if c != w && d != w {
        return Err(Error::GadgetFailed("edge does not border the cone vertex".into()));
    }
    let far = if c == w { d } else { c };
    if far == p || far == q || p == q {
        return Err(Error::GadgetFailed("degenerate transfer quadrilateral".into()));
    }
    let opposite = spokes_of(&b.gluing, &cv, w)?
        .into_iter()
        .find(|&(_, x)| x != p && x != q)
        .map(|(e, _)| e)
        .ok_or_else(|| Error::GadgetFailed("no opposite spoke".into()))?;
    b.flip(h)?;
    b.flip(opposite)?;
    Ok((h, opposite))
}

/// Shortest dual path between faces `from` and `to`, as the edge ids crossed.
/// Ties are broken by `order` (edge id -> priority).
pub(crate) fn dual_path(
    g: &Gluing,
    from: usize,
    to: usize,
    order: &HashMap<u32, usize>,
) -> Result<Vec<u32>> {
    let mut by_edge: HashMap<u32, Vec<usize>> = HashMap::new();
    for (k, f) in g.faces.iter().enumerate() {
        for s in f {
            by_edge.entry(s.edge).or_default().push(k);
        }
    }
    let mut prev: Vec<Option<(usize, u32)>> = vec![None; g.face_count()];
    let mut seen = vec![false; g.face_count()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(k) = queue.pop_front() {
        if k == to {
            break;
        }
        let mut edges: Vec<u32> = g.faces[k].iter().map(|s| s.edge).collect();
        edges.sort_by_key(|e| order.get(e).copied().unwrap_or(usize::MAX));
        for e in edges {
            for &n in &by_edge[&e] {
                if !seen[n] {
                    seen[n] = true;
                    prev[n] = Some((k, e));
                    queue.push_back(n);
                }
            }
        }
    }
    if !seen[to] {
        return Err(Error::GadgetFailed("dual graph is disconnected".into()));
    }
    let mut path = Vec::new();
    let mut k = to;
    while let Some((p, e)) = prev[k] {
        path.push(e);
        k = p;
    }
    path.reverse();
    Ok(path)
}

/// Edge id -> canonical rank, for tie-breaking.
pub(crate) fn rank_order(g: &Gluing) -> HashMap<u32, usize> {
    let map = g.to_map();
    let canon = canonical_form(&map);
    let mut out = HashMap::new();
    for (r, &f) in canon.edges_in_order(&map).iter().enumerate() {
        out.insert(g.edge_of_flag(f as usize), r);
    }
    out
}

/// Moves the cone vertex along `path` (base edge ids); returns the new spoke.
pub(crate) fn transfer_along(b: &mut ScriptBuilder, mut spoke: u32, path: &[u32]) -> Result<u32> {
    for &h in path {
        spoke = transfer_across(b, spoke, h)?.0;
    }
    Ok(spoke)
}

/// Regular flips from `s_δ T` to `s_δ′ T`: one two-flip step per edge of a
/// shortest dual path.
pub fn subdivision_transfer(
    map: &TriangulationMap,
    from: FaceHandle,
    to: FaceHandle,
) -> Result<MoveScript> {
    map.check_face(from)?;
    map.check_face(to)?;
    if !map.is_regular() {
        return Err(Error::NotRegular);
    }
    let (g, layout) = Gluing::from_map(map);
    let (kf, kt) = (layout[from.0 as usize] as usize / 6, layout[to.0 as usize] as usize / 6);
    let path = dual_path(&g, kf, kt, &rank_order(&g))?;
    let mut start = g.clone();
    let spokes = start.subdivide(kf)?;
    let start_map = start.to_map();
    let mut b = ScriptBuilder::new(start);
    transfer_along(&mut b, spokes[0], &path)?;
    let script = b.finish();
    let mut end = g;
    end.subdivide(kt)?;
    if script.end_key != canonical_key(&end.to_map()) {
        return Err(Error::GadgetFailed("transfer ended at the wrong map".into()));
    }
    verify_script(&script, &start_map)?;
    Ok(script)
}

// Disk model for lifting a flip: the twelve triangles of the barycentric
// subdivision of the two faces at the flipped edge. Boundary labels run
// around the octagon A, M(y1), D, M(y2), B, M(x1), C, M(x2); 8 and 9 are the
// face centres and 10 the midpoint of the flipped edge.
const A: u8 = 0;
const B: u8 = 4;
const C: u8 = 6;
const D: u8 = 2;
const Z1: u8 = 8;
const Z2: u8 = 9;
const ME: u8 = 10;

type Disk = Vec<[u8; 3]>;

fn tri(a: u8, b: u8, c: u8) -> [u8; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

fn disk(tris: &[[u8; 3]]) -> Disk {
    let mut d: Disk = tris.iter().map(|t| tri(t[0], t[1], t[2])).collect();
    d.sort_unstable();
    d
}

fn lift_start() -> Disk {
    disk(&[
        [A, ME, Z1],
        [ME, B, Z1],
        [B, 5, Z1],
        [5, C, Z1],
        [C, 7, Z1],
        [7, A, Z1],
        [A, ME, Z2],
        [ME, B, Z2],
        [A, 1, Z2],
        [1, D, Z2],
        [D, 3, Z2],
        [3, B, Z2],
    ])
}

fn lift_targets() -> Vec<Disk> {
    let base = [
        [C, ME, Z1],
        [ME, D, Z1],
        [D, 3, Z1],
        [3, B, Z1],
        [B, 5, Z1],
        [5, C, Z1],
        [D, ME, Z2],
        [ME, C, Z2],
        [C, 7, Z2],
        [7, A, Z2],
        [A, 1, Z2],
        [1, D, Z2],
    ];
    let perms = [[8, 9, 10], [8, 10, 9], [9, 8, 10], [9, 10, 8], [10, 8, 9], [10, 9, 8]];
    perms
        .iter()
        .map(|p| {
            let m = |x: u8| if x >= 8 { p[(x - 8) as usize] } else { x };
            disk(&base.iter().map(|t| [m(t[0]), m(t[1]), m(t[2])]).collect::<Vec<_>>())
        })
        .collect()
}

fn is_corner(x: u8) -> bool {
    x < 8 && x.is_multiple_of(2)
}

fn is_mid(x: u8) -> bool {
    x < 8 && x % 2 == 1
}

/// One disk flip: `(p, q)` is replaced by `(r, s)`.
type DiskFlip = (u8, u8, u8, u8);

fn disk_moves(d: &Disk) -> Vec<(DiskFlip, Disk)> {
    let mut by_edge: HashMap<(u8, u8), Vec<usize>> = HashMap::new();
    for (i, t) in d.iter().enumerate() {
        for (x, y) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            by_edge.entry((x, y)).or_default().push(i);
        }
    }
    let mut keys: Vec<_> = by_edge.keys().copied().collect();
    keys.sort_unstable();
    let mut out = Vec::new();
    for (p, q) in keys {
        let ts = &by_edge[&(p, q)];
        if ts.len() != 2 {
            continue;
        }
        let apex = |t: &[u8; 3]| *t.iter().find(|&&x| x != p && x != q).unwrap();
        let (r, s) = (apex(&d[ts[0]]), apex(&d[ts[1]]));
        if r == s || by_edge.contains_key(&(r.min(s), r.max(s))) {
            continue;
        }
        let quad = [p, q, r, s];
        if quad.iter().filter(|&&x| is_corner(x)).count() > 1
            || quad.iter().filter(|&&x| is_mid(x)).count() > 1
        {
            continue;
        }
        let mut next: Disk = d
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ts[0] && *i != ts[1])
            .map(|(_, t)| *t)
            .collect();
        next.push(tri(p, r, s));
        next.push(tri(q, r, s));
        next.sort_unstable();
        out.push(((p, q, r, s), next));
    }
    out
}

fn search_lift() -> Result<Vec<DiskFlip>> {
    let start = lift_start();
    let targets: HashSet<Disk> = lift_targets().into_iter().collect();
    let mut prev: HashMap<Disk, Option<(Disk, DiskFlip)>> = HashMap::new();
    prev.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    while let Some(d) = queue.pop_front() {
        if targets.contains(&d) {
            let mut seq = Vec::new();
            let mut cur = d;
            while let Some(Some((p, m))) = prev.get(&cur).cloned() {
                seq.push(m);
                cur = p;
            }
            seq.reverse();
            return Ok(seq);
        }
        if prev.len() > LIFT_SEARCH_CAP {
            break;
        }
        for (m, next) in disk_moves(&d) {
            if !prev.contains_key(&next) {
                prev.insert(next.clone(), Some((d.clone(), m)));
                queue.push_back(next);
            }
        }
    }
    Err(Error::LiftNotFound)
}

/// The disk flip sequence realising a lifted flip. It is the same for every
/// input: no flip quadrilateral has two original corners or two edge
/// midpoints, so coincidences among A, B, C, D never matter.
fn lift_sequence() -> Result<&'static [DiskFlip]> {
    static SEQ: OnceLock<std::result::Result<Vec<DiskFlip>, Error>> = OnceLock::new();
    SEQ.get_or_init(search_lift).as_ref().map(|v| v.as_slice()).map_err(|e| e.clone())
}

/// Edge ids in `g.barycentric()` to flip, in order, to realise flipping `edge` of `g`.
pub(crate) fn lift_ids(g: &Gluing, edge: u32) -> Result<Vec<u32>> {
    let [(k1, i1), (k2, i2)] = g.sides_of(edge)?;
    if k1 == k2 {
        return Err(Error::FlipBlocked);
    }
    let e2 = 2 * g.id_bound();
    let mut pairs: HashMap<(u8, u8), u32> = HashMap::new();
    let mut add = |k: usize, i0: usize, corners: [u8; 3], mids: [u8; 3], z: u8| {
        for t in 0..3 {
            let j = (i0 + t) % 3;
            let s = g.faces[k][j];
            let near = 2 * s.edge + if s.fwd { 0 } else { 1 };
            let far = near ^ 1;
            let spoke_c = e2 + 6 * k as u32 + j as u32;
            let spoke_m = e2 + 6 * k as u32 + 3 + j as u32;
            let key = |a: u8, b: u8| (a.min(b), a.max(b));
            pairs.insert(key(z, corners[t]), spoke_c);
            pairs.insert(key(z, mids[t]), spoke_m);
            pairs.insert(key(corners[t], mids[t]), near);
            pairs.insert(key(mids[t], corners[(t + 1) % 3]), far);
        }
    };
    add(k1, i1, [A, B, C], [ME, 5, 7], Z1);
    if g.faces[k2][i2].fwd != g.faces[k1][i1].fwd {
        add(k2, i2, [B, A, D], [ME, 1, 3], Z2);
    } else {
        add(k2, i2, [A, B, D], [ME, 3, 1], Z2);
    }
    let mut ids = Vec::new();
    for &(p, q, r, s) in lift_sequence()? {
        let id = pairs
            .remove(&(p.min(q), p.max(q)))
            .ok_or_else(|| Error::GadgetFailed("disk edge without an id".into()))?;
        pairs.insert((r.min(s), r.max(s)), id);
        ids.push(id);
    }
    Ok(ids)
}

fn lift_on(g: &Gluing, edge: u32) -> Result<MoveScript> {
    let ids = lift_ids(g, edge)?;
    let mut b = ScriptBuilder::new(g.barycentric());
    for id in ids {
        b.flip(id)?;
    }
    let script = b.finish();
    let mut after = g.clone();
    after.flip(edge)?;
    if script.end_key != canonical_key(&after.barycentric().to_map()) {
        return Err(Error::GadgetFailed("lifted flip ended at the wrong map".into()));
    }
    Ok(script)
}

fn layout_edge(map: &TriangulationMap, e: EdgeHandle) -> Result<(Gluing, u32)> {
    map.check_edge(e)?;
    let (g, layout) = Gluing::from_map(map);
    let id = g.edge_of_flag(layout[e.0 as usize] as usize);
    if !g.can_flip(id) {
        return Err(Error::FlipBlocked);
    }
    Ok((g, id))
}

/// Flips on `barycentric(T)` that realise flipping `e` of `T`. No flip creates a loop.
pub fn lift_flip_to_bary(map: &TriangulationMap, e: EdgeHandle) -> Result<MoveScript> {
    let (g, id) = layout_edge(map, e)?;
    let script = lift_on(&g, id)?;
    verify_script(&script, &barycentric(map))?;
    Ok(script)
}

/// Flips on the second barycentric subdivision realising flipping `e` of `T`:
/// every flip of the single lift is lifted once more.
pub fn lift_flip_to_bary2(map: &TriangulationMap, e: EdgeHandle) -> Result<MoveScript> {
    let (g, id) = layout_edge(map, e)?;
    let script = lift2_on(&g, id)?;
    verify_script(&script, &barycentric(&barycentric(map)))?;
    Ok(script)
}

pub(crate) fn lift2_on(g: &Gluing, edge: u32) -> Result<MoveScript> {
    let mut level = g.barycentric();
    let mut script: Option<MoveScript> = None;
    for id in lift_ids(g, edge)? {
        let part = lift_on(&level, id)?;
        level.flip(id)?;
        script = Some(match script {
            None => part,
            Some(s) => s.then(&part)?,
        });
    }
    Ok(match script {
        Some(s) => s,
        None => MoveScript::empty(&g.barycentric().barycentric().to_map()),
    })
}

/// One subdivide-and-flip stage on the builder's current map: a centroid in every
/// face, then for every old edge PQ with centres Z1, Z2: flip PQ to Z1Z2,
/// subdivide Z1Z2P, flip Z1Z2 to the new midpoint and Q.
fn bary_stage_on(b: &mut ScriptBuilder) -> Result<()> {
    let faces = b.gluing.face_count();
    let edges = b.gluing.edge_ids();
    for k in 0..faces {
        b.subdivide(k)?;
    }
    for g in edges {
        b.flip(g)?;
        let [(k, _), _] = b.gluing.sides_of(g)?;
        b.subdivide(k)?;
        b.flip(g)?;
    }
    Ok(())
}

/// One stage: `T` to a map isomorphic to `barycentric(T)` using
/// `e(T) + f(T)` subdivisions and regular flips.
pub fn bary_stage(map: &TriangulationMap) -> Result<MoveScript> {
    if !map.is_regular() {
        return Err(Error::NotRegular);
    }
    let mut b = ScriptBuilder::from_map(map);
    bary_stage_on(&mut b)?;
    let script = b.finish();
    if script.end_key != canonical_key(&barycentric(map)) {
        return Err(Error::GadgetFailed("stage ended at the wrong map".into()));
    }
    Ok(script)
}

/// `T` to a map isomorphic to `barycentric(barycentric(T))` with exactly
/// `35(v − χ)` face subdivisions and otherwise regular flips.
pub fn bary_by_subdivisions(map: &TriangulationMap) -> Result<MoveScript> {
    if !map.is_regular() {
        return Err(Error::NotRegular);
    }
    let mut b = ScriptBuilder::from_map(map);
    bary_stage_on(&mut b)?;
    bary_stage_on(&mut b)?;
    let script = b.finish();
    if script.end_key != canonical_key(&barycentric(&barycentric(map))) {
        return Err(Error::GadgetFailed("subdivision ended at the wrong map".into()));
    }
    verify_script(&script, map)?;
    Ok(script)
}
