//! Flips, contractions, face subdivisions and barycentric subdivision, plus
//! replayable move scripts addressed by canonical rank.
//!
//! A move names its target by rank: edges (faces) of the pre-move map are
//! ordered by the smallest canonical label among their flags. Because ranks
//! are isomorphism invariant, a script replays on any relabelling of its
//! start map.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, Canonical, CanonicalKey};
use crate::error::{Error, Result};
use crate::gluing::{side_start_flag, Gluing};
use crate::map::{EdgeHandle, FaceHandle, SurfaceClass, TriangulationMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    Flip,
    Contract,
    #[serde(rename = "subdivide")]
    FaceSubdivide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub target: usize,
}

impl Move {
    pub fn flip(target: usize) -> Self {
        Move { kind: MoveKind::Flip, target }
    }

    pub fn contract(target: usize) -> Self {
        Move { kind: MoveKind::Contract, target }
    }

    pub fn subdivide(target: usize) -> Self {
        Move { kind: MoveKind::FaceSubdivide, target }
    }
}

pub const SCRIPT_FORMAT: &str = "flipkit-script-v1";

/// A replayable sequence of moves between two isomorphism classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoveScript {
    pub start_key: CanonicalKey,
    pub end_key: CanonicalKey,
    pub all_regular: bool,
    pub moves: Vec<Move>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct ScriptJson {
    pub format: String,
    pub start_key: String,
    pub end_key: String,
    pub all_regular: bool,
    pub moves: Vec<Move>,
}

impl MoveScript {
    pub fn empty(map: &TriangulationMap) -> Self {
        let key = canonical_form(map).key;
        MoveScript {
            start_key: key.clone(),
            end_key: key,
            all_regular: map.is_regular(),
            moves: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn count(&self, kind: MoveKind) -> usize {
        self.moves.iter().filter(|m| m.kind == kind).count()
    }

    pub(crate) fn to_json_doc(&self) -> ScriptJson {
        ScriptJson {
            format: SCRIPT_FORMAT.into(),
            start_key: self.start_key.to_hex(),
            end_key: self.end_key.to_hex(),
            all_regular: self.all_regular,
            moves: self.moves.clone(),
        }
    }

    pub(crate) fn from_json_doc(doc: ScriptJson) -> Result<Self> {
        if doc.format != SCRIPT_FORMAT {
            return Err(Error::Format(format!("expected {SCRIPT_FORMAT}, got {}", doc.format)));
        }
        Ok(MoveScript {
            start_key: CanonicalKey::from_hex(&doc.start_key)?,
            end_key: CanonicalKey::from_hex(&doc.end_key)?,
            all_regular: doc.all_regular,
            moves: doc.moves,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_doc()).expect("script serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ScriptJson =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_json_doc(doc)
    }

    /// Concatenates `next`, which must start where `self` ends.
    pub fn then(mut self, next: &MoveScript) -> Result<Self> {
        if self.end_key != next.start_key {
            return Err(Error::EndKeyMismatch);
        }
        self.moves.extend_from_slice(&next.moves);
        self.end_key = next.end_key.clone();
        self.all_regular &= next.all_regular;
        Ok(self)
    }

    /// The inverse script, computed by replaying from `start`.
    ///
    /// Flips invert to flips of the new diagonal and subdivisions to
    /// contractions of a spoke; a contraction is only invertible when one of
    /// its endpoints has degree 3.
    pub fn reversed(&self, start: &TriangulationMap) -> Result<MoveScript> {
        let mut b = ScriptBuilder::from_map(start);
        if b.start_key != self.start_key {
            return Err(Error::StartKeyMismatch);
        }
        let mut inverse = Vec::with_capacity(self.moves.len());
        for mv in &self.moves {
            let inv = b.apply_tracking_inverse(*mv)?;
            inverse.push(inv);
        }
        inverse.reverse();
        let end = b.finish();
        if end.end_key != self.end_key {
            return Err(Error::EndKeyMismatch);
        }
        Ok(MoveScript {
            start_key: self.end_key.clone(),
            end_key: self.start_key.clone(),
            all_regular: self.all_regular,
            moves: inverse,
        })
    }
}

fn face_flags(map: &TriangulationMap, f: usize) -> [usize; 6] {
    let mut out = [f; 6];
    for j in 1..6 {
        out[j] = if j % 2 == 1 { map.s1(out[j - 1]) } else { map.s0(out[j - 1]) };
    }
    out
}

fn layout_edge(map: &TriangulationMap, flag: usize) -> (Gluing, u32) {
    let (g, layout) = Gluing::from_map(map);
    let id = g.edge_of_flag(layout[flag] as usize);
    (g, id)
}

/// True iff the two sides of the edge through `flag` lie on distinct faces.
pub fn can_flip_at(map: &TriangulationMap, flag: usize) -> bool {
    !face_flags(map, flag).contains(&map.s2(flag))
}

pub fn flip_at(map: &TriangulationMap, flag: usize) -> Result<TriangulationMap> {
    if !can_flip_at(map, flag) {
        return Err(Error::FlipBlocked);
    }
    let (mut g, id) = layout_edge(map, flag);
    g.flip(id)?;
    g.to_map_checked()
}

/// Flips `e` and also returns the handle of the new diagonal.
pub fn flip_tracked(map: &TriangulationMap, e: EdgeHandle) -> Result<(TriangulationMap, EdgeHandle)> {
    map.check_edge(e)?;
    if !can_flip_at(map, e.0 as usize) {
        return Err(Error::FlipBlocked);
    }
    let (mut g, id) = layout_edge(map, e.0 as usize);
    g.flip(id)?;
    let out = g.to_map_checked()?;
    let handle = edge_handle_of(&g, &out, id)?;
    Ok((out, handle))
}

/// Subdivides `face` and also returns the three new edges.
pub fn face_subdivide_tracked(
    map: &TriangulationMap,
    face: FaceHandle,
) -> Result<(TriangulationMap, [EdgeHandle; 3])> {
    map.check_face(face)?;
    let (mut g, layout) = Gluing::from_map(map);
    let spokes = g.subdivide(layout[face.0 as usize] as usize / 6)?;
    let out = g.to_map_checked()?;
    let mut handles = [EdgeHandle(0); 3];
    for (h, id) in handles.iter_mut().zip(spokes) {
        *h = edge_handle_of(&g, &out, id)?;
    }
    Ok((out, handles))
}

fn edge_handle_of(g: &Gluing, map: &TriangulationMap, id: u32) -> Result<EdgeHandle> {
    let [(k, i), _] = g.sides_of(id)?;
    let eo = map.edge_orbits();
    Ok(EdgeHandle(eo.rep[eo.index[side_start_flag(k, i)] as usize]))
}

pub fn contract_at(map: &TriangulationMap, flag: usize) -> Result<TriangulationMap> {
    let (mut g, id) = layout_edge(map, flag);
    g.contract(id)?;
    g.to_map_checked().map_err(|_| Error::ContractBlocked)
}

pub fn subdivide_at(map: &TriangulationMap, flag: usize) -> Result<TriangulationMap> {
    let (mut g, layout) = Gluing::from_map(map);
    g.subdivide(layout[flag] as usize / 6)?;
    g.to_map_checked()
}

pub fn can_flip(map: &TriangulationMap, e: EdgeHandle) -> bool {
    map.check_edge(e).is_ok() && can_flip_at(map, e.0 as usize)
}

pub fn flip(map: &TriangulationMap, e: EdgeHandle) -> Result<TriangulationMap> {
    map.check_edge(e)?;
    flip_at(map, e.0 as usize)
}

/// Both the map and the flipped map are regular.
pub fn is_regular_flip(map: &TriangulationMap, e: EdgeHandle) -> bool {
    map.is_regular()
        && can_flip(map, e)
        && flip_at(map, e.0 as usize).map(|m| m.is_regular()).unwrap_or(false)
}

/// Contracts `e`. The result need not be regular; singular inputs are
/// accepted as long as `e` is not a loop and the five edges of the two faces
/// at `e` are distinct.
pub fn contract(map: &TriangulationMap, e: EdgeHandle) -> Result<TriangulationMap> {
    map.check_edge(e)?;
    contract_at(map, e.0 as usize)
}

/// `map` is regular and contracting `e` leaves it regular.
pub fn can_contract(map: &TriangulationMap, e: EdgeHandle) -> bool {
    map.is_regular() && contract(map, e).map(|m| m.is_regular()).unwrap_or(false)
}

/// Link condition: the endpoints' common neighbours are exactly the two apexes,
/// and at least four faces survive.
pub fn link_condition(map: &TriangulationMap, e: EdgeHandle) -> bool {
    if !map.is_regular() || map.check_edge(e).is_err() {
        return false;
    }
    let vo = map.vertex_orbits();
    let eo = map.edge_orbits();
    let f = e.0 as usize;
    let (a, b) = (vo.index[f], vo.index[map.s0(f)]);
    let mut na = HashSet::new();
    let mut nb = HashSet::new();
    for &r in &eo.rep {
        let (x, y) = (vo.index[r as usize], vo.index[map.s0(r as usize)]);
        for (p, q) in [(x, y), (y, x)] {
            if p == a {
                na.insert(q);
            }
            if p == b {
                nb.insert(q);
            }
        }
    }
    let c = vo.index[map.s0(map.s1(map.s0(f)))];
    let g = map.s2(f);
    let d = vo.index[map.s0(map.s1(map.s0(g)))];
    let common: HashSet<u32> = na.intersection(&nb).copied().collect();
    common == HashSet::from([c, d]) && map.flag_count() / 6 - 2 > 3
}

pub fn face_subdivide(map: &TriangulationMap, face: FaceHandle) -> Result<TriangulationMap> {
    map.check_face(face)?;
    subdivide_at(map, face.0 as usize)
}

/// Barycentric subdivision: every face becomes six.
pub fn barycentric(map: &TriangulationMap) -> TriangulationMap {
    Gluing::from_map(map).0.barycentric().to_map()
}

fn resolve(map: &TriangulationMap, canon: &Canonical, mv: Move) -> Result<usize> {
    let order = match mv.kind {
        MoveKind::Flip | MoveKind::Contract => canon.edges_in_order(map),
        MoveKind::FaceSubdivide => canon.faces_in_order(map),
    };
    order
        .get(mv.target)
        .map(|&f| f as usize)
        .ok_or(Error::AddressOutOfRange { target: mv.target, available: order.len() })
}

/// Rank of the edge through `flag` in canonical order.
pub fn edge_rank(map: &TriangulationMap, canon: &Canonical, flag: usize) -> usize {
    let eo = map.edge_orbits();
    let want = eo.index[flag];
    canon
        .edges_in_order(map)
        .iter()
        .position(|&f| eo.index[f as usize] == want)
        .expect("edge exists")
}

pub fn face_rank(map: &TriangulationMap, canon: &Canonical, flag: usize) -> usize {
    let fo = map.face_orbits();
    let want = fo.index[flag];
    canon
        .faces_in_order(map)
        .iter()
        .position(|&f| fo.index[f as usize] == want)
        .expect("face exists")
}

/// Handle of the edge at canonical rank `r`.
pub fn edge_at_rank(map: &TriangulationMap, r: usize) -> Result<EdgeHandle> {
    let canon = canonical_form(map);
    let f = resolve(map, &canon, Move::flip(r))?;
    let eo = map.edge_orbits();
    Ok(EdgeHandle(eo.rep[eo.index[f] as usize]))
}

pub fn face_at_rank(map: &TriangulationMap, r: usize) -> Result<FaceHandle> {
    let canon = canonical_form(map);
    let f = resolve(map, &canon, Move::subdivide(r))?;
    let fo = map.face_orbits();
    Ok(FaceHandle(fo.rep[fo.index[f] as usize]))
}

pub fn apply_move(map: &TriangulationMap, mv: Move) -> Result<TriangulationMap> {
    let canon = canonical_form(map);
    let flag = resolve(map, &canon, mv)?;
    match mv.kind {
        MoveKind::Flip => flip_at(map, flag),
        MoveKind::Contract => contract_at(map, flag),
        MoveKind::FaceSubdivide => subdivide_at(map, flag),
    }
}

/// Replays `script` from `start`, checking the start key.
pub fn apply_script(start: &TriangulationMap, script: &MoveScript) -> Result<TriangulationMap> {
    if canonical_form(start).key != script.start_key {
        return Err(Error::StartKeyMismatch);
    }
    let mut cur = start.clone();
    for &mv in &script.moves {
        cur = apply_move(&cur, mv)?;
    }
    Ok(cur)
}

/// Full replay: start key, every move, regularity when declared, end key.
pub fn verify_script(script: &MoveScript, start: &TriangulationMap) -> Result<()> {
    if canonical_form(start).key != script.start_key {
        return Err(Error::StartKeyMismatch);
    }
    let mut cur = start.clone();
    let mut regular = cur.is_regular();
    if script.all_regular && !regular && !script.moves.is_empty() {
        return Err(Error::NonRegularFlipInRegularScript(0));
    }
    for (i, &mv) in script.moves.iter().enumerate() {
        let next = apply_move(&cur, mv)?;
        let next_regular = next.is_regular();
        if script.all_regular && !(regular && next_regular) {
            return Err(Error::NonRegularFlipInRegularScript(i));
        }
        cur = next;
        regular = next_regular;
    }
    if canonical_form(&cur).key != script.end_key {
        return Err(Error::EndKeyMismatch);
    }
    Ok(())
}

/// Greedy contraction in canonical edge order until no edge is contractible.
pub fn reduce_to_irreducible(map: &TriangulationMap) -> Result<(TriangulationMap, MoveScript)> {
    if !map.is_regular() {
        return Err(Error::NotRegular);
    }
    let start_key = canonical_form(map).key;
    let mut cur = map.clone();
    let mut moves = Vec::new();
    'outer: loop {
        let canon = canonical_form(&cur);
        for (rank, &f) in canon.edges_in_order(&cur).iter().enumerate() {
            if let Ok(next) = contract_at(&cur, f as usize) {
                if next.is_regular() {
                    moves.push(Move::contract(rank));
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    let class = cur.surface_class();
    if class != SurfaceClass::SPHERE {
        let bound = 270 - 171 * class.euler_characteristic;
        assert!(
            cur.counts().0 as i64 <= bound,
            "irreducible triangulation exceeds the vertex bound {bound}"
        );
    }
    let script = MoveScript {
        start_key,
        end_key: canonical_form(&cur).key,
        all_regular: true,
        moves,
    };
    Ok((cur, script))
}

/// Records moves applied to a gluing scheme as a rank-addressed script.
///
/// Every recorded move costs one canonical labelling of the current map.
#[derive(Debug, Clone)]
pub struct ScriptBuilder {
    pub gluing: Gluing,
    start_key: CanonicalKey,
    moves: Vec<Move>,
    all_regular: bool,
    map: TriangulationMap,
    regular: bool,
}

impl ScriptBuilder {
    pub fn new(gluing: Gluing) -> Self {
        let map = gluing.to_map();
        let regular = map.is_regular();
        ScriptBuilder {
            start_key: canonical_form(&map).key,
            gluing,
            moves: Vec::new(),
            all_regular: regular,
            map,
            regular,
        }
    }

    pub fn from_map(map: &TriangulationMap) -> Self {
        Self::new(Gluing::from_map(map).0)
    }

    pub fn start_key(&self) -> &CanonicalKey {
        &self.start_key
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn map(&self) -> &TriangulationMap {
        &self.map
    }

    pub fn is_all_regular(&self) -> bool {
        self.all_regular
    }

    fn commit(&mut self, mv: Move) {
        self.map = self.gluing.to_map();
        let regular = self.map.is_regular();
        self.all_regular &= self.regular && regular;
        self.regular = regular;
        self.moves.push(mv);
    }

    fn edge_flag(&self, id: u32) -> Result<usize> {
        let [(k, i), _] = self.gluing.sides_of(id)?;
        Ok(side_start_flag(k, i))
    }

    pub fn flip(&mut self, id: u32) -> Result<()> {
        let flag = self.edge_flag(id)?;
        let canon = canonical_form(&self.map);
        let rank = edge_rank(&self.map, &canon, flag);
        self.gluing.flip(id)?;
        self.commit(Move::flip(rank));
        Ok(())
    }

    pub fn subdivide(&mut self, face: usize) -> Result<[u32; 3]> {
        if face >= self.gluing.face_count() {
            return Err(Error::InvalidHandle);
        }
        let canon = canonical_form(&self.map);
        let rank = face_rank(&self.map, &canon, 6 * face);
        let spokes = self.gluing.subdivide(face)?;
        self.commit(Move::subdivide(rank));
        Ok(spokes)
    }

    pub fn contract(&mut self, id: u32) -> Result<()> {
        let flag = self.edge_flag(id)?;
        let canon = canonical_form(&self.map);
        let rank = edge_rank(&self.map, &canon, flag);
        self.gluing.contract(id)?;
        self.commit(Move::contract(rank));
        Ok(())
    }

    /// Removes degree-3 vertex `w`, recorded as the contraction of one of its
    /// spokes. Edge ids of the surrounding triangle are kept.
    pub fn unsubdivide(&mut self, w: u32) -> Result<usize> {
        let (cv, _) = self.gluing.corner_vertices();
        let k = (0..cv.len()).find(|&c| cv[c] == w).ok_or(Error::InvalidHandle)? / 3;
        let j = (0..3).find(|&j| cv[3 * k + j] == w).expect("corner found");
        let flag = side_start_flag(k, j);
        let canon = canonical_form(&self.map);
        let rank = edge_rank(&self.map, &canon, flag);
        let merged = self.gluing.unsubdivide(&cv, w)?;
        self.commit(Move::contract(rank));
        Ok(merged)
    }

    /// Applies a rank-addressed move.
    pub fn apply(&mut self, mv: Move) -> Result<()> {
        self.apply_tracking_inverse(mv).map(|_| ())
    }

    pub fn extend(&mut self, script: &MoveScript) -> Result<()> {
        for &mv in &script.moves {
            self.apply(mv)?;
        }
        Ok(())
    }

    /// Applies `mv` and returns the move that undoes it, addressed in the new map.
    fn apply_tracking_inverse(&mut self, mv: Move) -> Result<Move> {
        let canon = canonical_form(&self.map);
        let flag = resolve(&self.map, &canon, mv)?;
        match mv.kind {
            MoveKind::Flip => {
                let id = self.gluing.edge_of_flag(flag);
                if !self.gluing.can_flip(id) {
                    return Err(Error::FlipBlocked);
                }
                self.gluing.flip(id)?;
                self.commit(mv);
                let f = self.edge_flag(id)?;
                let c = canonical_form(&self.map);
                Ok(Move::flip(edge_rank(&self.map, &c, f)))
            }
            MoveKind::FaceSubdivide => {
                let spokes = self.gluing.subdivide(flag / 6)?;
                self.commit(mv);
                let f = self.edge_flag(spokes[0])?;
                let c = canonical_form(&self.map);
                Ok(Move::contract(edge_rank(&self.map, &c, f)))
            }
            MoveKind::Contract => {
                let id = self.gluing.edge_of_flag(flag);
                let (cv, nv) = self.gluing.corner_vertices();
                let (a, b) = self.gluing.endpoints(&cv, id)?;
                let mut degree = vec![0usize; nv];
                for &v in &cv {
                    degree[v as usize] += 1;
                }
                let w = if degree[a as usize] == 3 {
                    Some(a)
                } else if degree[b as usize] == 3 {
                    Some(b)
                } else {
                    None
                };
                match w {
                    Some(w) if a != b => {
                        let merged = self.gluing.unsubdivide(&cv, w)?;
                        self.commit(mv);
                        let c = canonical_form(&self.map);
                        Ok(Move::subdivide(face_rank(&self.map, &c, 6 * merged)))
                    }
                    _ => Err(Error::GadgetFailed(
                        "contraction without a degree-3 endpoint has no subdivision inverse".into(),
                    )),
                }
            }
        }
    }

    pub fn finish(self) -> MoveScript {
        MoveScript {
            start_key: self.start_key,
            end_key: canonical_form(&self.map).key,
            all_regular: self.all_regular,
            moves: self.moves,
        }
    }
}
