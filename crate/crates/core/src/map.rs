//! Flag-based combinatorial maps of closed-surface triangulations.
//!
//! A flag is a mutually incident (vertex, edge, face) triple. Three
//! fixed-point-free involutions act on flags: `s0` changes the vertex, `s1`
//! the edge and `s2` the face, keeping the other two entries. Vertices,
//! edges and faces are the orbits of `<s1,s2>`, `<s0,s2>` and `<s0,s1>`.
//! Loops, multiple edges and faces glued to themselves are all expressible,
//! so the type covers singular triangulations as well as regular ones.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::gluing::{Gluing, Side};

/// A vertex, named by the smallest flag in its orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexHandle(pub u32);

/// An edge, named by the smallest flag in its orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeHandle(pub u32);

/// A face, named by the smallest flag in its orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceHandle(pub u32);

/// Euler characteristic and orientability of a closed surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceClass {
    pub euler_characteristic: i64,
    pub orientable: bool,
}

impl SurfaceClass {
    pub const SPHERE: SurfaceClass = SurfaceClass { euler_characteristic: 2, orientable: true };
    pub const TORUS: SurfaceClass = SurfaceClass { euler_characteristic: 0, orientable: true };
    pub const PROJECTIVE_PLANE: SurfaceClass =
        SurfaceClass { euler_characteristic: 1, orientable: false };
    pub const KLEIN_BOTTLE: SurfaceClass =
        SurfaceClass { euler_characteristic: 0, orientable: false };

    /// Orientable surface of the given genus.
    pub fn orientable_genus(genus: u32) -> Self {
        SurfaceClass { euler_characteristic: 2 - 2 * genus as i64, orientable: true }
    }

    /// Whether a closed surface with these invariants exists.
    pub fn is_valid(&self) -> bool {
        let chi = self.euler_characteristic;
        if chi > 2 {
            return false;
        }
        if self.orientable {
            chi % 2 == 0
        } else {
            chi < 2
        }
    }

    pub fn name(&self) -> String {
        match (self.euler_characteristic, self.orientable) {
            (2, true) => "sphere".into(),
            (0, true) => "torus".into(),
            (1, false) => "projective plane".into(),
            (0, false) => "Klein bottle".into(),
            (chi, true) => format!("orientable genus {}", (2 - chi) / 2),
            (chi, false) => format!("non-orientable genus {}", 2 - chi),
        }
    }
}

/// Orbit decomposition of the flag set under one of the three cell subgroups.
#[derive(Debug, Clone)]
pub struct Orbits {
    /// Orbit index of every flag; orbits are numbered by increasing smallest flag.
    pub index: Vec<u32>,
    /// Smallest flag of every orbit.
    pub rep: Vec<u32>,
}

impl Orbits {
    pub fn len(&self) -> usize {
        self.rep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rep.is_empty()
    }
}

/// A triangulation of a connected closed surface, stored as three involutions on flags.
///
/// Values are immutable; every operation that changes the triangulation returns a new map.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangulationMap {
    s: [Vec<u32>; 3],
}

impl TriangulationMap {
    /// Builds a map from raw involution arrays, checking every structural invariant.
    pub fn from_map_arrays(
        flag_count: usize,
        s0: Vec<u32>,
        s1: Vec<u32>,
        s2: Vec<u32>,
    ) -> Result<Self> {
        if s0.len() != flag_count || s1.len() != flag_count || s2.len() != flag_count {
            return Err(Error::LengthMismatch);
        }
        if flag_count == 0 || !flag_count.is_multiple_of(6) {
            return Err(Error::BadFlagCount(flag_count));
        }
        let map = TriangulationMap { s: [s0, s1, s2] };
        map.validate()?;
        Ok(map)
    }

    pub(crate) fn from_arrays_unchecked(s: [Vec<u32>; 3]) -> Self {
        TriangulationMap { s }
    }

    fn validate(&self) -> Result<()> {
        let n = self.flag_count();
        for (inv, arr) in self.s.iter().enumerate() {
            for (flag, &img) in arr.iter().enumerate() {
                let img = img as usize;
                if img >= n {
                    return Err(Error::OutOfRange { inv, flag });
                }
                if img == flag {
                    return Err(Error::FixedPoint { inv, flag });
                }
                if arr[img] as usize != flag {
                    return Err(Error::NotInvolution { inv, flag });
                }
            }
        }
        for f in 0..n {
            // <s0,s2> orbit of size 4 needs s0 and s2 to commute without fixed points
            let a = self.s[0][self.s[2][f] as usize];
            let b = self.s[2][self.s[0][f] as usize];
            if a != b || a as usize == f {
                return Err(Error::EdgeOrbitNot4(f));
            }
        }
        let faces = self.orbits(0, 1);
        let mut sizes = vec![0usize; faces.len()];
        for &o in &faces.index {
            sizes[o as usize] += 1;
        }
        if let Some(o) = sizes.iter().position(|&c| c != 6) {
            return Err(Error::FaceOrbitNot6(faces.rep[o] as usize));
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.flag_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(f) = stack.pop() {
            for arr in &self.s {
                let g = arr[f] as usize;
                if !seen[g] {
                    seen[g] = true;
                    count += 1;
                    stack.push(g);
                }
            }
        }
        count == n
    }

    /// Loads a regular triangulation from a list of vertex triples.
    ///
    /// Each unordered vertex pair must occur in exactly two face sides and every
    /// vertex label must name a single vertex of the resulting surface.
    pub fn from_face_triples(faces: &[[u64; 3]]) -> Result<Self> {
        let mut pair_count: HashMap<(u64, u64), usize> = HashMap::new();
        for (k, f) in faces.iter().enumerate() {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::RepeatedVertexInFace(k));
            }
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                *pair_count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut pairs: Vec<_> = pair_count.iter().collect();
        pairs.sort();
        if let Some((&(a, b), &c)) = pairs.iter().find(|(_, &c)| c != 2) {
            return Err(Error::NonPseudomanifold(a, b, c));
        }
        if faces.is_empty() {
            return Err(Error::Disconnected);
        }
        let ids: HashMap<(u64, u64), u32> =
            pairs.iter().enumerate().map(|(i, (&p, _))| (p, i as u32)).collect();
        let glued: Vec<[Side; 3]> = faces
            .iter()
            .map(|f| {
                let side = |i: usize| {
                    let (a, b) = (f[i], f[(i + 1) % 3]);
                    Side { edge: ids[&(a.min(b), a.max(b))], fwd: a < b }
                };
                [side(0), side(1), side(2)]
            })
            .collect();
        let map = Gluing::from_faces(glued).to_map_checked()?;
        // every label must be one vertex orbit
        let labels: HashSet<u64> = faces.iter().flatten().copied().collect();
        let vertices = map.orbits(1, 2);
        if vertices.len() != labels.len() {
            let vo = &vertices.index;
            let mut owner: HashMap<u64, u32> = HashMap::new();
            for (k, f) in faces.iter().enumerate() {
                for (i, &label) in f.iter().enumerate() {
                    let o = vo[6 * k + 2 * i];
                    if *owner.entry(label).or_insert(o) != o {
                        return Err(Error::PinchedVertex(label));
                    }
                }
            }
        }
        if !map.is_regular() {
            return Err(Error::NotRegular);
        }
        Ok(map)
    }

    /// Exports the vertex triples of every face, labelling vertices by orbit index.
    pub fn to_face_triples(&self) -> Vec<[u64; 3]> {
        let v = self.orbits(1, 2);
        let faces = self.orbits(0, 1);
        faces
            .rep
            .iter()
            .map(|&f| {
                let f = f as usize;
                let a = f;
                let b = self.s0(self.s1(a));
                let c = self.s0(self.s1(b));
                [v.index[a] as u64, v.index[b] as u64, v.index[c] as u64]
            })
            .collect()
    }

    #[inline]
    pub fn flag_count(&self) -> usize {
        self.s[0].len()
    }

    #[inline]
    pub fn s0(&self, f: usize) -> usize {
        self.s[0][f] as usize
    }

    #[inline]
    pub fn s1(&self, f: usize) -> usize {
        self.s[1][f] as usize
    }

    #[inline]
    pub fn s2(&self, f: usize) -> usize {
        self.s[2][f] as usize
    }

    #[inline]
    pub fn involution(&self, i: usize) -> &[u32] {
        &self.s[i]
    }

    /// Orbits of the subgroup generated by `s_a` and `s_b`.
    pub fn orbits(&self, a: usize, b: usize) -> Orbits {
        let n = self.flag_count();
        let mut index = vec![u32::MAX; n];
        let mut rep = Vec::new();
        for start in 0..n {
            if index[start] != u32::MAX {
                continue;
            }
            let o = rep.len() as u32;
            rep.push(start as u32);
            index[start] = o;
            let mut stack = vec![start];
            while let Some(f) = stack.pop() {
                for g in [self.s[a][f] as usize, self.s[b][f] as usize] {
                    if index[g] == u32::MAX {
                        index[g] = o;
                        stack.push(g);
                    }
                }
            }
        }
        Orbits { index, rep }
    }

    pub fn vertex_orbits(&self) -> Orbits {
        self.orbits(1, 2)
    }

    pub fn edge_orbits(&self) -> Orbits {
        self.orbits(0, 2)
    }

    pub fn face_orbits(&self) -> Orbits {
        self.orbits(0, 1)
    }

    pub fn vertices(&self) -> Vec<VertexHandle> {
        self.vertex_orbits().rep.into_iter().map(VertexHandle).collect()
    }

    pub fn edges(&self) -> Vec<EdgeHandle> {
        self.edge_orbits().rep.into_iter().map(EdgeHandle).collect()
    }

    pub fn faces(&self) -> Vec<FaceHandle> {
        self.face_orbits().rep.into_iter().map(FaceHandle).collect()
    }

    /// Number of vertices, edges and faces.
    pub fn counts(&self) -> (usize, usize, usize) {
        let n = self.flag_count();
        (self.vertex_orbits().len(), n / 4, n / 6)
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.counts();
        v as i64 - e as i64 + f as i64
    }

    /// Flags are 2-colourable with every involution swapping colours iff orientable.
    pub fn is_orientable(&self) -> bool {
        let n = self.flag_count();
        let mut colour = vec![u8::MAX; n];
        colour[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for arr in &self.s {
                let g = arr[f] as usize;
                if colour[g] == u8::MAX {
                    colour[g] = 1 - colour[f];
                    queue.push_back(g);
                } else if colour[g] == colour[f] {
                    return false;
                }
            }
        }
        true
    }

    pub fn surface_class(&self) -> SurfaceClass {
        SurfaceClass {
            euler_characteristic: self.euler_characteristic(),
            orientable: self.is_orientable(),
        }
    }

    /// No loops, no multiple edges and more than three faces.
    pub fn is_regular(&self) -> bool {
        if self.flag_count() / 6 <= 3 {
            return false;
        }
        let v = self.vertex_orbits();
        let e = self.edge_orbits();
        let mut seen = HashSet::with_capacity(e.len());
        for &f in &e.rep {
            let a = v.index[f as usize];
            let b = v.index[self.s0(f as usize)];
            if a == b || !seen.insert((a.min(b), a.max(b))) {
                return false;
            }
        }
        true
    }

    /// The vertices at both ends of an edge, as vertex orbit indices.
    pub fn edge_endpoints(&self, vertices: &Orbits, e: EdgeHandle) -> (u32, u32) {
        let f = e.0 as usize;
        (vertices.index[f], vertices.index[self.s0(f)])
    }

    fn check_handle(&self, flag: u32, orbits: &Orbits) -> Result<()> {
        let f = flag as usize;
        if f >= self.flag_count() || orbits.rep[orbits.index[f] as usize] != flag {
            return Err(Error::InvalidHandle);
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: VertexHandle) -> Result<()> {
        self.check_handle(v.0, &self.vertex_orbits())
    }

    pub fn check_edge(&self, e: EdgeHandle) -> Result<()> {
        self.check_handle(e.0, &self.edge_orbits())
    }

    pub fn check_face(&self, f: FaceHandle) -> Result<()> {
        self.check_handle(f.0, &self.face_orbits())
    }

    /// Number of edge ends at `v`; loops count twice.
    pub fn vertex_degree(&self, v: VertexHandle) -> Result<usize> {
        let orbits = self.vertex_orbits();
        self.check_handle(v.0, &orbits)?;
        let o = orbits.index[v.0 as usize];
        Ok(orbits.index.iter().filter(|&&x| x == o).count() / 2)
    }

    /// Boundary walk of a regular neighbourhood of `v`: for every corner at `v`,
    /// the far end of the current edge and the face side opposite to `v`.
    pub fn link_of_vertex(&self, v: VertexHandle) -> Result<Vec<(VertexHandle, EdgeHandle)>> {
        let vo = self.vertex_orbits();
        self.check_handle(v.0, &vo)?;
        let eo = self.edge_orbits();
        let start = v.0 as usize;
        let mut out = Vec::new();
        let mut f = start;
        loop {
            let far = self.s0(f);
            let opposite = self.s1(far);
            out.push((
                VertexHandle(vo.rep[vo.index[far] as usize]),
                EdgeHandle(eo.rep[eo.index[opposite] as usize]),
            ));
            f = self.s2(self.s1(f));
            if f == start {
                break;
            }
        }
        Ok(out)
    }

    /// Relabels flags by `perm` (old flag -> new flag).
    pub fn relabel(&self, perm: &[u32]) -> TriangulationMap {
        let n = self.flag_count();
        let mut s = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for i in 0..3 {
            for f in 0..n {
                s[i][perm[f] as usize] = perm[self.s[i][f] as usize];
            }
        }
        TriangulationMap { s }
    }

    /// Consumes the map, returning `[s0, s1, s2]`.
    pub fn into_arrays(self) -> [Vec<u32>; 3] {
        self.s
    }
}
