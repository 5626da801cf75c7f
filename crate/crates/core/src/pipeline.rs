//! Equivalence certificates between regular triangulations.
//!
//! A certificate is an all-regular move script between two regular maps with
//! the same vertex count. It may pass through larger maps: every face
//! subdivision in it is matched by a later contraction of a degree-3 vertex.
//! Strategy tags `name:start:end` record which construction produced each
//! run of moves.

use serde::{Deserialize, Serialize};

use crate::canon::{canonical_form, canonical_key, CanonicalKey};
use crate::error::{Error, Result};
use crate::gadgets::{
    bary_by_subdivisions, cone_vertex, dual_path, lift2_on, rank_order, transfer_across,
    transfer_along,
};
use crate::gluing::Gluing;
use crate::map::{SurfaceClass, TriangulationMap};
use crate::moves::{
    apply_move, reduce_to_irreducible, verify_script, MoveKind, MoveScript,
    ScriptBuilder, ScriptJson,
};
use crate::search::{explore, find_path, FlipMode, SearchBudget};
use crate::seeds::subdivide_fixed;

/// Vertex thresholds for a surface of Euler characteristic `chi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub chi: i64,
    /// Vertex count above which regular flip equivalence is guaranteed.
    pub n: i64,
    /// Upper bound on the vertex count of an irreducible triangulation.
    pub irreducible_bound: i64,
}

impl Thresholds {
    pub fn for_chi(chi: i64) -> Self {
        Thresholds { chi, n: 9450 - 6020 * chi, irreducible_bound: 270 - 171 * chi }
    }

    /// Number of face subdivisions used to reach the second barycentric
    /// subdivision of a `v`-vertex triangulation.
    pub fn m(&self, v: i64) -> i64 {
        35 * (v - self.chi)
    }
}

pub fn thresholds(surface: SurfaceClass) -> Thresholds {
    Thresholds::for_chi(surface.euler_characteristic)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub script: MoveScript,
    pub strategy: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CertJson {
    #[serde(flatten)]
    script: ScriptJson,
    strategy: Vec<String>,
}

impl EquivalenceCertificate {
    pub fn start_key(&self) -> &CanonicalKey {
        &self.script.start_key
    }

    pub fn end_key(&self) -> &CanonicalKey {
        &self.script.end_key
    }

    pub fn to_json(&self) -> String {
        let doc = CertJson { script: self.script.to_json_doc(), strategy: self.strategy.clone() };
        serde_json::to_string(&doc).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CertJson =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        Ok(EquivalenceCertificate {
            script: MoveScript::from_json_doc(doc.script)?,
            strategy: doc.strategy,
        })
    }

    /// The certificate read backwards: flips invert to flips, subdivisions and
    /// contractions swap roles.
    pub fn reversed(&self) -> Result<Self> {
        let start = self.script.start_key.decode()?;
        let script = self.script.reversed(&start)?;
        let len = script.len();
        let mut strategy = Vec::with_capacity(self.strategy.len());
        for tag in self.strategy.iter().rev() {
            let (name, s, e) = parse_tag(tag).ok_or(Error::Format(format!("bad tag {tag}")))?;
            strategy.push(format!("{name}:{}:{}", len - e, len - s));
        }
        Ok(EquivalenceCertificate { script, strategy })
    }
}

fn parse_tag(tag: &str) -> Option<(&str, usize, usize)> {
    let mut it = tag.rsplitn(3, ':');
    let e = it.next()?.parse().ok()?;
    let s = it.next()?.parse().ok()?;
    let name = it.next()?;
    (s <= e).then_some((name, s, e))
}

/// Outcome of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub reason: Option<String>,
}

impl Verdict {
    fn reject(reason: impl Into<String>) -> Self {
        Verdict { accepted: false, reason: Some(reason.into()) }
    }
}

/// Independent replay of a certificate from its start key.
pub fn verify_certificate(cert: &EquivalenceCertificate) -> Verdict {
    let script = &cert.script;
    if !script.all_regular {
        return Verdict::reject("certificate is not declared all-regular");
    }
    let start = match script.start_key.decode() {
        Ok(m) => m,
        Err(e) => return Verdict::reject(format!("start key: {e}")),
    };
    let end = match script.end_key.decode() {
        Ok(m) => m,
        Err(e) => return Verdict::reject(format!("end key: {e}")),
    };
    if !start.is_regular() || !end.is_regular() {
        return Verdict::reject("endpoints must be regular");
    }
    if start.counts().0 != end.counts().0 {
        return Verdict::reject("endpoints differ in vertex count");
    }
    let net = script.count(MoveKind::FaceSubdivide) as i64 - script.count(MoveKind::Contract) as i64;
    if net != 0 {
        return Verdict::reject("subdivisions and contractions do not balance");
    }
    let mut at = 0;
    for tag in &cert.strategy {
        match parse_tag(tag) {
            Some((_, s, e)) if s == at && e <= script.len() => at = e,
            _ => return Verdict::reject(format!("strategy tag {tag} does not tile the script")),
        }
    }
    if at != script.len() {
        return Verdict::reject("strategy tags do not cover the script");
    }
    match verify_script(script, &start) {
        Ok(()) => Verdict { accepted: true, reason: None },
        Err(e) => Verdict::reject(e.to_string()),
    }
}

/// Concatenates tagged segments into one certificate.
struct Assembly {
    script: Option<MoveScript>,
    tags: Vec<String>,
}

impl Assembly {
    fn new() -> Self {
        Assembly { script: None, tags: Vec::new() }
    }

    fn push(&mut self, name: &str, part: MoveScript) -> Result<()> {
        let at = self.script.as_ref().map_or(0, |s| s.len());
        self.tags.push(format!("{name}:{at}:{}", at + part.len()));
        self.script = Some(match self.script.take() {
            None => part,
            Some(s) => s.then(&part)?,
        });
        Ok(())
    }

    fn finish(self) -> Result<EquivalenceCertificate> {
        let script = self.script.ok_or_else(|| Error::GadgetFailed("empty assembly".into()))?;
        let cert = EquivalenceCertificate { script, strategy: self.tags };
        let verdict = verify_certificate(&cert);
        if !verdict.accepted {
            return Err(Error::GadgetFailed(format!(
                "assembled certificate fails verification: {}",
                verdict.reason.unwrap_or_default()
            )));
        }
        Ok(cert)
    }
}

fn check_pair(t1: &TriangulationMap, t2: &TriangulationMap) -> Result<()> {
    if !t1.is_regular() || !t2.is_regular() {
        return Err(Error::NotRegular);
    }
    if t1.counts().0 != t2.counts().0 || t1.surface_class() != t2.surface_class() {
        return Err(Error::IncompatibleInputs("vertex counts or surfaces differ".into()));
    }
    Ok(())
}

/// Gluing with the cone vertex at `spoke` removed, and the index of the face it sat in.
fn base_of(g: &Gluing, spoke: u32) -> Result<(Gluing, usize)> {
    let w = cone_vertex(g, spoke)?;
    let (cv, _) = g.corner_vertices();
    let mut base = g.clone();
    let k = base.unsubdivide(&cv, w)?;
    Ok((base, k))
}

/// Regular flips from `x` to `s^{m}(S)` given a flip script `next` from
/// `contract(x, rank)` to `s^{m−1}(S)`.
fn negami_step(x: &TriangulationMap, rank: usize, next: &MoveScript) -> Result<MoveScript> {
    let mut b = ScriptBuilder::from_map(x);
    let canon = canonical_form(b.map());
    let flag = *canon
        .edges_in_order(b.map())
        .get(rank)
        .ok_or(Error::AddressOutOfRange { target: rank, available: 0 })? as usize;
    let ec = b.gluing.edge_of_flag(flag);
    let (cv, nv) = b.gluing.corner_vertices();
    let mut deg = vec![0usize; nv];
    cv.iter().for_each(|&v| deg[v as usize] += 1);
    let (t, h) = b.gluing.endpoints(&cv, ec)?;
    let w_is_tail = deg[t as usize] <= deg[h as usize];

    // Fan flips: move the reinstated vertex's neighbours over to the survivor
    // until it is a cone over one face.
    loop {
        let (cv, _) = b.gluing.corner_vertices();
        let (t, h) = b.gluing.endpoints(&cv, ec)?;
        let (w, u) = if w_is_tail { (t, h) } else { (h, t) };
        if cv.iter().filter(|&&v| v == w).count() == 3 {
            break;
        }
        let mut spoke = None;
        'faces: for (k, f) in b.gluing.faces.iter().enumerate() {
            let corners = [cv[3 * k], cv[3 * k + 1], cv[3 * k + 2]];
            if !(corners.contains(&w) && corners.contains(&u)) {
                continue;
            }
            for (i, s) in f.iter().enumerate() {
                let (p, q) = (corners[i], corners[(i + 1) % 3]);
                if s.edge != ec && (p == w || q == w) {
                    spoke = Some(s.edge);
                    break 'faces;
                }
            }
        }
        let spoke = spoke.ok_or_else(|| Error::GadgetFailed("no fan flip available".into()))?;
        b.flip(spoke)?;
    }

    // Replay `next` on the base, moving the cone vertex out of the way of
    // every flipped edge.
    let mut spoke = ec;
    for mv in &next.moves {
        if mv.kind != MoveKind::Flip {
            return Err(Error::GadgetFailed("lifted script must consist of flips".into()));
        }
        let (base, k) = base_of(&b.gluing, spoke)?;
        let map = base.to_map();
        let canon = canonical_form(&map);
        let flag = *canon.edges_in_order(&map).get(mv.target).ok_or(Error::AddressOutOfRange {
            target: mv.target,
            available: map.edges().len(),
        })?;
        let g = base.edge_of_flag(flag as usize);
        let sides: Vec<u32> = base.faces[k].iter().map(|s| s.edge).collect();
        if sides.contains(&g) {
            let h = *sides.iter().find(|&&e| e != g).expect("triangle has three sides");
            spoke = transfer_across(&mut b, spoke, h)?.0;
        }
        b.flip(g)?;
    }

    // Park the cone vertex in the face of rank 0.
    let (base, k) = base_of(&b.gluing, spoke)?;
    let map = base.to_map();
    let target = canonical_form(&map).faces_in_order(&map)[0] as usize / 6;
    let path = dual_path(&base, k, target, &rank_order(&base))?;
    transfer_along(&mut b, spoke, &path)?;
    if !b.is_all_regular() {
        return Err(Error::GadgetFailed("a lifting flip was not regular".into()));
    }
    Ok(b.finish())
}

/// Certificate from `t1` to `s^m(S)`, `m = v(t1) − v(S)`, with the fixed
/// placement that always subdivides the face of canonical rank 0.
/// `contractions` must replay `t1` to `s`.
pub fn negami_lift(
    t1: &TriangulationMap,
    s: &TriangulationMap,
    contractions: &MoveScript,
    budget: SearchBudget,
) -> Result<EquivalenceCertificate> {
    if !t1.is_regular() || !s.is_regular() {
        return Err(Error::NotRegular);
    }
    if contractions.moves.iter().any(|m| m.kind != MoveKind::Contract) {
        return Err(Error::IncompatibleInputs("expected a contraction script".into()));
    }
    verify_script(contractions, t1)?;
    if contractions.end_key != canonical_key(s) {
        return Err(Error::EndKeyMismatch);
    }
    let mut chain = vec![t1.clone()];
    for &mv in &contractions.moves {
        let next = apply_move(chain.last().expect("chain is non-empty"), mv)?;
        chain.push(next);
    }
    let m = contractions.len();
    let mut script = MoveScript::empty(&chain[m]);
    for j in (0..m).rev() {
        script = match negami_step(&chain[j], contractions.moves[j].target, &script) {
            Ok(p) => p,
            Err(Error::GadgetFailed(_)) => {
                let goal = subdivide_fixed(s, m - j);
                find_path(&chain[j], &goal, FlipMode::RegularFlips, budget)?
            }
            Err(e) => return Err(e),
        };
    }
    debug_assert_eq!(script.end_key, canonical_key(&subdivide_fixed(s, m)));
    let mut a = Assembly::new();
    a.push("negami", script)?;
    a.finish_unbalanced()
}

impl Assembly {
    /// Like `finish`, for segments whose endpoints differ in vertex count.
    fn finish_unbalanced(self) -> Result<EquivalenceCertificate> {
        let script = self.script.ok_or_else(|| Error::GadgetFailed("empty assembly".into()))?;
        verify_script(&script, &script.start_key.decode()?)?;
        Ok(EquivalenceCertificate { script, strategy: self.tags })
    }
}

/// `k` subdivisions of the rank-0 face, as a script from `map`.
fn fixed_subdivisions(map: &TriangulationMap, k: usize) -> Result<MoveScript> {
    let mut b = ScriptBuilder::from_map(map);
    for _ in 0..k {
        let canon = canonical_form(b.map());
        let face = canon.faces_in_order(b.map())[0] as usize / 6;
        b.subdivide(face)?;
    }
    Ok(b.finish())
}

/// Flip lifts along a singular flip path, as one script on second
/// barycentric subdivisions.
fn lifted_chain(t1: &TriangulationMap, path: &MoveScript) -> Result<MoveScript> {
    let (mut g, _) = Gluing::from_map(t1);
    let mut out = MoveScript::empty(&g.barycentric().barycentric().to_map());
    for &mv in &path.moves {
        let map = g.to_map();
        let canon = canonical_form(&map);
        let flag = canon.edges_in_order(&map)[mv.target] as usize;
        let id = g.edge_of_flag(flag);
        out = out.then(&lift2_on(&g, id)?)?;
        g.flip(id)?;
    }
    Ok(out)
}

/// Certificate `T1 → T1″ → T2″ → T2`: the second barycentric subdivision of
/// `t1` built from `35(v − χ)` face subdivisions and regular flips, doubly
/// lifted singular flips, and the reverse construction for `t2`.
pub fn corollary_equivalence(
    t1: &TriangulationMap,
    t2: &TriangulationMap,
    budget: SearchBudget,
) -> Result<EquivalenceCertificate> {
    check_pair(t1, t2)?;
    let up = bary_by_subdivisions(t1)?;
    let path = find_path(t1, t2, FlipMode::AllFlips, budget)?;
    let middle = lifted_chain(t1, &path)?;
    let down = bary_by_subdivisions(t2)?.reversed(t2)?;
    let mut a = Assembly::new();
    a.push("bary", up)?;
    a.push("lift2", middle)?;
    a.push("bary-reverse", down)?;
    a.finish()
}

/// Which strategies `certify_equivalence` may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategies {
    pub direct: bool,
    pub theorem: bool,
}

impl Default for Strategies {
    fn default() -> Self {
        Strategies { direct: true, theorem: true }
    }
}

fn theorem_pipeline(
    t1: &TriangulationMap,
    t2: &TriangulationMap,
    budget: SearchBudget,
) -> Result<EquivalenceCertificate> {
    let (s1, c1) = reduce_to_irreducible(t1)?;
    let (s2, c2) = reduce_to_irreducible(t2)?;
    let n1 = negami_lift(t1, &s1, &c1, budget)?;
    let n2 = negami_lift(t2, &s2, &c2, budget)?;
    let top = t1.counts().0;
    let (v1, v2) = (s1.counts().0, s2.counts().0);
    let common = v1.max(v2);
    let u1 = subdivide_fixed(&s1, common - v1);
    let u2 = subdivide_fixed(&s2, common - v2);
    let mut a = Assembly::new();
    a.push("negami", n1.script)?;
    a.push("contract", fixed_subdivisions(&u1, top - common)?.reversed(&u1)?)?;
    if canonical_key(&u1) != canonical_key(&u2) {
        a.push("corollary", corollary_equivalence(&u1, &u2, budget)?.script)?;
    }
    a.push("subdivide", fixed_subdivisions(&u2, top - common)?)?;
    a.push("negami-reverse", n2.script.reversed(t2)?)?;
    a.finish()
}

/// Certificate that `t1` and `t2` are regularly flip equivalent.
///
/// Tries a direct regular-flip search first, then the contraction / lift /
/// barycentric pipeline. Failure is reported as `Exhausted` unless the direct
/// search closed the whole regular component and the pipeline also failed.
pub fn certify_equivalence(
    t1: &TriangulationMap,
    t2: &TriangulationMap,
    budget: SearchBudget,
    strategies: Strategies,
) -> Result<EquivalenceCertificate> {
    check_pair(t1, t2)?;
    let mut closed = false;
    if strategies.direct {
        match find_path(t1, t2, FlipMode::RegularFlips, budget) {
            Ok(script) => {
                let mut a = Assembly::new();
                a.push("direct", script)?;
                return a.finish();
            }
            Err(Error::NotConnected) => closed = true,
            Err(Error::Exhausted) => {}
            Err(e) => return Err(e),
        }
    }
    if strategies.theorem {
        match theorem_pipeline(t1, t2, budget) {
            Ok(cert) => return Ok(cert),
            Err(Error::Exhausted) | Err(Error::NotConnected) => {}
            Err(e) => return Err(e),
        }
    }
    if closed {
        let store = explore(std::slice::from_ref(t1), FlipMode::RegularFlips, budget)?;
        return Err(Error::ProvablyNotConnected(
            store.nodes().iter().map(|n| n.key.to_hex()).collect(),
        ));
    }
    Err(Error::Exhausted)
}
