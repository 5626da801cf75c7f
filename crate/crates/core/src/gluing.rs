//! Triangle gluing schemes: the working representation for local surgery.
//!
//! Every face is a cyclic list of three sides; side `i` runs from corner `i`
//! to corner `i + 1`. A side names the edge it lies on and whether it runs
//! along the edge's reference direction. Every edge id occurs on exactly two
//! sides. Edge ids stay stable across flips and subdivisions, which lets
//! gadgets follow an edge through a sequence of moves.
//!
//! Converting to a [`TriangulationMap`] lays face `k` out on flags `6k..6k+6`
//! with `s1` pairing `(0,1) (2,3) (4,5)` and `s0` pairing `(1,2) (3,4) (5,0)`,
//! so side `i` owns flags `2i+1` (at corner `i`) and `2i+2 mod 6`.

use crate::error::{Error, Result};
use crate::map::TriangulationMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Side {
    pub edge: u32,
    pub fwd: bool,
}

impl Side {
    pub fn new(edge: u32, fwd: bool) -> Self {
        Side { edge, fwd }
    }

    #[inline]
    pub fn rev(self) -> Side {
        Side { edge: self.edge, fwd: !self.fwd }
    }
}

#[inline]
fn rot(face: [Side; 3], i: usize) -> [Side; 3] {
    [face[i], face[(i + 1) % 3], face[(i + 2) % 3]]
}

/// Side index owning the flag at position `pos` (0..6) of a face block.
#[inline]
pub fn side_of_pos(pos: usize) -> usize {
    ((pos + 5) % 6) / 2
}

/// Layout flag of the start (corner `i`) end of side `i` in face `k`.
#[inline]
pub fn side_start_flag(k: usize, i: usize) -> usize {
    6 * k + 2 * i + 1
}

#[inline]
pub fn side_end_flag(k: usize, i: usize) -> usize {
    6 * k + (2 * i + 2) % 6
}

struct Dsu(Vec<u32>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n as u32).collect())
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let p = self.0[self.0[x as usize] as usize];
            self.0[x as usize] = p;
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b) as usize] = a.min(b);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gluing {
    pub faces: Vec<[Side; 3]>,
    next_edge: u32,
}

impl Gluing {
    pub fn from_faces(faces: Vec<[Side; 3]>) -> Self {
        let next_edge = faces.iter().flatten().map(|s| s.edge + 1).max().unwrap_or(0);
        Gluing { faces, next_edge }
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// One past the largest edge id ever issued.
    pub fn id_bound(&self) -> u32 {
        self.next_edge
    }

    fn fresh_edge(&mut self) -> u32 {
        let e = self.next_edge;
        self.next_edge += 1;
        e
    }

    /// Both sides of every edge id as `(face, side index)`; unused ids stay empty.
    fn side_table(&self) -> Vec<Vec<(usize, usize)>> {
        let mut table = vec![Vec::new(); self.next_edge as usize];
        for (k, f) in self.faces.iter().enumerate() {
            for (i, s) in f.iter().enumerate() {
                table[s.edge as usize].push((k, i));
            }
        }
        table
    }

    pub fn sides_of(&self, edge: u32) -> Result<[(usize, usize); 2]> {
        let mut found = Vec::with_capacity(2);
        for (k, f) in self.faces.iter().enumerate() {
            for (i, s) in f.iter().enumerate() {
                if s.edge == edge {
                    found.push((k, i));
                }
            }
        }
        match found.as_slice() {
            [a, b] => Ok([*a, *b]),
            _ => Err(Error::InvalidHandle),
        }
    }

    pub fn edge_ids(&self) -> Vec<u32> {
        let mut ids: Vec<u32> = self.faces.iter().flatten().map(|s| s.edge).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Builds the flag arrays without validating them.
    pub fn to_map(&self) -> TriangulationMap {
        TriangulationMap::from_arrays_unchecked(self.arrays())
    }

    pub fn to_map_checked(&self) -> Result<TriangulationMap> {
        let table = self.side_table();
        for sides in &table {
            if !sides.is_empty() && sides.len() != 2 {
                let (k, i) = sides[0];
                return Err(Error::EdgeOrbitNot4(side_start_flag(k, i)));
            }
        }
        let [s0, s1, s2] = self.arrays();
        TriangulationMap::from_map_arrays(s0.len(), s0, s1, s2)
    }

    fn arrays(&self) -> [Vec<u32>; 3] {
        let n = 6 * self.faces.len();
        let mut s0 = vec![0u32; n];
        let mut s1 = vec![0u32; n];
        let mut s2 = vec![u32::MAX; n];
        for k in 0..self.faces.len() {
            let b = 6 * k as u32;
            for (x, y) in [(0, 1), (2, 3), (4, 5)] {
                s1[(b + x) as usize] = b + y;
                s1[(b + y) as usize] = b + x;
            }
            for (x, y) in [(1, 2), (3, 4), (5, 0)] {
                s0[(b + x) as usize] = b + y;
                s0[(b + y) as usize] = b + x;
            }
        }
        let mut first: Vec<Option<(usize, usize)>> = vec![None; self.next_edge as usize];
        for (k, f) in self.faces.iter().enumerate() {
            for (i, s) in f.iter().enumerate() {
                let (tail, head) = self.side_tail_head(k, i);
                match first[s.edge as usize].take() {
                    None => first[s.edge as usize] = Some((tail, head)),
                    Some((t, h)) => {
                        s2[t] = tail as u32;
                        s2[tail] = t as u32;
                        s2[h] = head as u32;
                        s2[head] = h as u32;
                    }
                }
            }
        }
        [s0, s1, s2]
    }

    /// Flags of side `i` of face `k` lying at the edge's tail and head.
    fn side_tail_head(&self, k: usize, i: usize) -> (usize, usize) {
        let (a, b) = (side_start_flag(k, i), side_end_flag(k, i));
        if self.faces[k][i].fwd {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Gluing scheme of an arbitrary map plus the flag layout (old flag -> layout flag).
    pub fn from_map(map: &TriangulationMap) -> (Gluing, Vec<u32>) {
        let n = map.flag_count();
        let faces = map.face_orbits();
        let mut layout = vec![0u32; n];
        let mut old = vec![0usize; n];
        for (k, &r) in faces.rep.iter().enumerate() {
            let mut p = r as usize;
            for j in 0..6 {
                layout[p] = (6 * k + j) as u32;
                old[6 * k + j] = p;
                p = if j % 2 == 0 { map.s1(p) } else { map.s0(p) };
            }
        }
        let fc = faces.len();
        let mut sides: Vec<[Side; 3]> = vec![[Side::new(u32::MAX, true); 3]; fc];
        let mut next = 0u32;
        for k in 0..fc {
            for i in 0..3 {
                if sides[k][i].edge != u32::MAX {
                    continue;
                }
                sides[k][i] = Side::new(next, true);
                let x = layout[map.s2(old[side_start_flag(k, i)])] as usize;
                let (k2, pos) = (x / 6, x % 6);
                let i2 = side_of_pos(pos);
                sides[k2][i2] = Side::new(next, pos == 2 * i2 + 1);
                next += 1;
            }
        }
        (Gluing { faces: sides, next_edge: next }, layout)
    }

    /// Edge id carried by a layout flag.
    pub fn edge_of_flag(&self, flag: usize) -> u32 {
        self.faces[flag / 6][side_of_pos(flag % 6)].edge
    }

    /// Vertex id of every corner (`3k + j`) and the number of vertices.
    pub fn corner_vertices(&self) -> (Vec<u32>, usize) {
        let mut dsu = Dsu::new(3 * self.faces.len());
        let mut first: Vec<Option<(u32, u32)>> = vec![None; self.next_edge as usize];
        for (k, f) in self.faces.iter().enumerate() {
            for (i, s) in f.iter().enumerate() {
                let (a, b) = ((3 * k + i) as u32, (3 * k + (i + 1) % 3) as u32);
                let (tail, head) = if s.fwd { (a, b) } else { (b, a) };
                match first[s.edge as usize] {
                    None => first[s.edge as usize] = Some((tail, head)),
                    Some((t, h)) => {
                        dsu.union(t, tail);
                        dsu.union(h, head);
                    }
                }
            }
        }
        let mut ids = vec![u32::MAX; 3 * self.faces.len()];
        let mut out = vec![0u32; 3 * self.faces.len()];
        let mut count = 0u32;
        for (c, slot) in out.iter_mut().enumerate() {
            let r = dsu.find(c as u32) as usize;
            if ids[r] == u32::MAX {
                ids[r] = count;
                count += 1;
            }
            *slot = ids[r];
        }
        (out, count as usize)
    }

    /// Vertex ids at the tail and head of an edge.
    pub fn endpoints(&self, cv: &[u32], edge: u32) -> Result<(u32, u32)> {
        let [(k, i), _] = self.sides_of(edge)?;
        let (a, b) = (cv[3 * k + i], cv[3 * k + (i + 1) % 3]);
        Ok(if self.faces[k][i].fwd { (a, b) } else { (b, a) })
    }

    /// Corner vertices of face `k`.
    pub fn face_vertices(&self, cv: &[u32], k: usize) -> [u32; 3] {
        [cv[3 * k], cv[3 * k + 1], cv[3 * k + 2]]
    }

    /// The two faces at `edge` rotated so the edge comes first, the second one
    /// reoriented to run against the first: `[e A->B, x1 B->C, x2 C->A]` and
    /// `[e B->A, y1 A->D, y2 D->B]`.
    fn quad(&self, edge: u32) -> Result<(usize, usize, [Side; 3], [Side; 3])> {
        let [(k1, i1), (k2, i2)] = self.sides_of(edge)?;
        if k1 == k2 {
            return Err(Error::FlipBlocked);
        }
        let f1 = rot(self.faces[k1], i1);
        let mut f2 = rot(self.faces[k2], i2);
        if f2[0].fwd == f1[0].fwd {
            f2 = [f2[0].rev(), f2[2].rev(), f2[1].rev()];
        }
        Ok((k1, k2, f1, f2))
    }

    /// Apex corners `(C, D)` opposite `edge` and its endpoints `(A, B)`, as vertex ids.
    pub fn quad_vertices(&self, cv: &[u32], edge: u32) -> Result<[u32; 4]> {
        let [(k1, i1), (k2, i2)] = self.sides_of(edge)?;
        if k1 == k2 {
            return Err(Error::FlipBlocked);
        }
        let a = cv[3 * k1 + i1];
        let b = cv[3 * k1 + (i1 + 1) % 3];
        let c = cv[3 * k1 + (i1 + 2) % 3];
        let d = cv[3 * k2 + (i2 + 2) % 3];
        Ok([a, b, c, d])
    }

    pub fn can_flip(&self, edge: u32) -> bool {
        matches!(self.sides_of(edge), Ok([(k1, _), (k2, _)]) if k1 != k2)
    }

    /// Replaces `edge` by the opposite diagonal of its quadrilateral, keeping its id.
    pub fn flip(&mut self, edge: u32) -> Result<()> {
        let (k1, k2, f1, f2) = self.quad(edge)?;
        let (x1, x2, y1, y2) = (f1[1], f1[2], f2[1], f2[2]);
        self.faces[k1] = [Side::new(edge, true), y2, x1];
        self.faces[k2] = [Side::new(edge, false), x2, y1];
        Ok(())
    }

    /// Cones face `k` over a new vertex. Returns the spoke ids from corners 0, 1, 2.
    pub fn subdivide(&mut self, k: usize) -> Result<[u32; 3]> {
        if k >= self.faces.len() {
            return Err(Error::InvalidHandle);
        }
        let [s0, s1, s2] = self.faces[k];
        let (a, b, c) = (self.fresh_edge(), self.fresh_edge(), self.fresh_edge());
        self.faces[k] = [s0, Side::new(b, true), Side::new(a, false)];
        self.faces.push([s1, Side::new(c, true), Side::new(b, false)]);
        self.faces.push([s2, Side::new(a, true), Side::new(c, false)]);
        Ok([a, b, c])
    }

    /// Shrinks `edge` to a point, deleting its two faces and merging their other sides.
    pub fn contract(&mut self, edge: u32) -> Result<()> {
        let (k1, k2, f1, f2) = self.quad(edge).map_err(|_| Error::ContractBlocked)?;
        let (x1, x2, y1, y2) = (f1[1], f1[2], f2[1], f2[2]);
        let mut ids = [edge, x1.edge, x2.edge, y1.edge, y2.edge];
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::ContractBlocked);
        }
        let cv = self.corner_vertices().0;
        let (a, b) = self.endpoints(&cv, edge)?;
        if a == b {
            return Err(Error::ContractBlocked);
        }
        self.faces.remove(k1.max(k2));
        self.faces.remove(k1.min(k2));
        for s in self.faces.iter_mut().flatten() {
            if s.edge == x2.edge {
                *s = if s.fwd == x2.fwd { x1.rev() } else { x1 };
            } else if s.edge == y2.edge {
                *s = if s.fwd == y2.fwd { y1.rev() } else { y1 };
            }
        }
        Ok(())
    }

    /// Removes a degree-3 vertex, merging its three faces into one.
    /// Returns the index of the merged face.
    pub fn unsubdivide(&mut self, cv: &[u32], w: u32) -> Result<usize> {
        let mut at: Vec<(usize, usize)> = Vec::new();
        for k in 0..self.faces.len() {
            for j in 0..3 {
                if cv[3 * k + j] == w {
                    at.push((k, j));
                }
            }
        }
        let fail = || Error::GadgetFailed("vertex is not a face subdivision".into());
        if at.len() != 3 || at[0].0 == at[1].0 || at[1].0 == at[2].0 || at[0].0 == at[2].0 {
            return Err(fail());
        }
        let (k0, j0) = at[0];
        let f0 = rot(self.faces[k0], j0);
        let (sp1, base0, sp2) = (f0[0].edge, f0[1], f0[2].edge);
        let mut b1 = None;
        let mut b2 = None;
        for &(k, j) in &at[1..] {
            let t = rot(self.faces[k], j);
            if t[0].edge == sp2 {
                b1 = Some(t[1]);
            } else if t[2].edge == sp2 {
                b1 = Some(t[1].rev());
            } else if t[2].edge == sp1 {
                b2 = Some(t[1]);
            } else if t[0].edge == sp1 {
                b2 = Some(t[1].rev());
            }
        }
        let (b1, b2) = (b1.ok_or_else(fail)?, b2.ok_or_else(fail)?);
        self.faces[k0] = [base0, b1, b2];
        let mut gone = [at[1].0, at[2].0];
        gone.sort_unstable();
        self.faces.remove(gone[1]);
        self.faces.remove(gone[0]);
        Ok(k0 - gone.iter().filter(|&&g| g < k0).count())
    }

    /// Barycentric subdivision with a fixed id layout.
    ///
    /// Edge `e` splits into halves `2e` (tail side) and `2e + 1`; face `k`
    /// contributes spokes `2E + 6k + i` (corner `i` to centre) and
    /// `2E + 6k + 3 + i` (midpoint of side `i` to centre), and becomes the
    /// six faces `6k..6k+6`.
    pub fn barycentric(&self) -> Gluing {
        let e2 = 2 * self.next_edge;
        let mut faces = Vec::with_capacity(6 * self.faces.len());
        for (k, f) in self.faces.iter().enumerate() {
            let corner = |i: usize| e2 + 6 * k as u32 + i as u32;
            let mid = |i: usize| e2 + 6 * k as u32 + 3 + i as u32;
            for (i, s) in f.iter().enumerate() {
                let (h1, h2) = if s.fwd {
                    (Side::new(2 * s.edge, true), Side::new(2 * s.edge + 1, true))
                } else {
                    (Side::new(2 * s.edge + 1, false), Side::new(2 * s.edge, false))
                };
                faces.push([h1, Side::new(mid(i), true), Side::new(corner(i), false)]);
                faces.push([h2, Side::new(corner((i + 1) % 3), true), Side::new(mid(i), false)]);
            }
        }
        Gluing { faces, next_edge: e2 + 6 * self.faces.len() as u32 }
    }
}
