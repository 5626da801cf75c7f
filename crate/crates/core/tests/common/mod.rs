//! Independent reference enumerations used as ground truth in tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use flipkit::moves::{can_flip, flip};
use flipkit::seeds::{named_seed, seed_names, subdivide_fixed};
use flipkit::{canonical_key, CanonicalKey, TriangulationMap};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Result of the gluing enumeration: key -> regular.
pub type Catalogue = BTreeMap<CanonicalKey, bool>;

struct Gluer {
    faces: usize,
    want_vertices: usize,
    pair: Vec<usize>,
    used: usize,
    out: Catalogue,
}

const OPEN: usize = usize::MAX;

impl Gluer {
    fn corners(&self) -> (Vec<usize>, usize) {
        // Corner 3t + j of triangle t; side (t, j) runs corner j -> j + 1 and is
        // glued orientation-reversingly, so its start meets the partner's end.
        let n = 3 * self.faces;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for side in 0..n {
            let other = self.pair[side];
            let (t, j) = (side / 3, side % 3);
            let (u, k) = (other / 3, other % 3);
            let a = (3 * t + j, 3 * u + (k + 1) % 3);
            let b = (3 * t + (j + 1) % 3, 3 * u + k);
            for (x, y) in [a, b] {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let mut id = vec![OPEN; n];
        let mut count = 0;
        let mut out = vec![0; n];
        for (c, slot) in out.iter_mut().enumerate() {
            let r = find(&mut parent, c);
            if id[r] == OPEN {
                id[r] = count;
                count += 1;
            }
            *slot = id[r];
        }
        (out, count)
    }

    fn leaf(&mut self) {
        let (corner, v) = self.corners();
        if v != self.want_vertices {
            return;
        }
        let n = 6 * self.faces;
        // Flag (t, j, end) = 6t + 2j + end.
        let flag = |t: usize, j: usize, end: usize| 6 * t + 2 * j + end;
        let mut s0 = vec![0u32; n];
        let mut s1 = vec![0u32; n];
        let mut s2 = vec![0u32; n];
        for t in 0..self.faces {
            for j in 0..3 {
                s0[flag(t, j, 0)] = flag(t, j, 1) as u32;
                s0[flag(t, j, 1)] = flag(t, j, 0) as u32;
                s1[flag(t, j, 1)] = flag(t, (j + 1) % 3, 0) as u32;
                s1[flag(t, (j + 1) % 3, 0)] = flag(t, j, 1) as u32;
                let other = self.pair[3 * t + j];
                let (u, k) = (other / 3, other % 3);
                s2[flag(t, j, 0)] = flag(u, k, 1) as u32;
                s2[flag(t, j, 1)] = flag(u, k, 0) as u32;
            }
        }
        let map = TriangulationMap::from_map_arrays(n, s0, s1, s2).expect("oracle builds valid maps");
        let mut pairs = HashSet::new();
        let mut regular = self.faces > 3;
        for side in 0..3 * self.faces {
            let other = self.pair[side];
            if other < side {
                continue;
            }
            let (t, j) = (side / 3, side % 3);
            let (a, b) = (corner[3 * t + j], corner[3 * t + (j + 1) % 3]);
            if a == b || !pairs.insert((a.min(b), a.max(b))) {
                regular = false;
            }
        }
        self.out.insert(canonical_key(&map), regular);
    }

    fn run(&mut self) {
        let first = (0..3 * self.used).find(|&s| self.pair[s] == OPEN);
        let Some(s) = first else {
            if self.used == self.faces {
                self.leaf();
            }
            return;
        };
        for o in s + 1..3 * self.used {
            if self.pair[o] == OPEN {
                self.pair[s] = o;
                self.pair[o] = s;
                self.run();
                self.pair[o] = OPEN;
            }
        }
        if self.used < self.faces {
            let o = 3 * self.used;
            self.used += 1;
            self.pair[s] = o;
            self.pair[o] = s;
            self.run();
            self.pair[o] = OPEN;
            self.used -= 1;
        }
        self.pair[s] = OPEN;
    }
}

/// Every sphere triangulation (loops and multiple edges allowed) with `v`
/// vertices, by exhaustive orientation-reversing gluing of `2(v − 2)` triangles.
pub fn sphere_catalogue(v: usize) -> Catalogue {
    let faces = 2 * (v - 2);
    let mut g = Gluer {
        faces,
        want_vertices: v,
        pair: vec![OPEN; 3 * faces],
        used: 1,
        out: Catalogue::new(),
    };
    g.run();
    g.out
}

/// Simplicial closed surfaces on `n` labelled vertices with `f` triangles,
/// up to isomorphism, by closing open edges one triangle at a time.
pub fn simplicial_catalogue(n: u64, f: usize) -> BTreeMap<CanonicalKey, TriangulationMap> {
    struct State {
        n: u64,
        f: usize,
        tris: Vec<[u64; 3]>,
        count: BTreeMap<(u64, u64), u8>,
        out: BTreeMap<CanonicalKey, TriangulationMap>,
    }
    fn edges(t: [u64; 3]) -> [(u64, u64); 3] {
        [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
    }
    fn go(st: &mut State) {
        let open: Vec<(u64, u64)> =
            st.count.iter().filter(|(_, &c)| c == 1).map(|(&e, _)| e).collect();
        if open.is_empty() {
            let used: HashSet<u64> = st.tris.iter().flatten().copied().collect();
            if st.tris.len() == st.f && used.len() as u64 == st.n {
                if let Ok(m) = TriangulationMap::from_face_triples(&st.tris) {
                    st.out.entry(canonical_key(&m)).or_insert(m);
                }
            }
            return;
        }
        if st.tris.len() >= st.f || open.len() > 3 * (st.f - st.tris.len()) {
            return;
        }
        let (a, b) = open[0];
        let fresh = (0..st.n).find(|x| !st.tris.iter().flatten().any(|y| y == x));
        for x in 0..st.n {
            if x == a || x == b {
                continue;
            }
            let is_used = st.tris.iter().flatten().any(|&y| y == x);
            if !is_used && Some(x) != fresh {
                continue;
            }
            let mut t = [a, b, x];
            t.sort_unstable();
            if st.tris.contains(&t) || edges(t).iter().any(|e| st.count.get(e) == Some(&2)) {
                continue;
            }
            for e in edges(t) {
                *st.count.entry(e).or_insert(0) += 1;
            }
            st.tris.push(t);
            go(st);
            st.tris.pop();
            for e in edges(t) {
                *st.count.get_mut(&e).unwrap() -= 1;
            }
        }
    }
    let mut st = State { n, f, tris: vec![[0, 1, 2]], count: BTreeMap::new(), out: BTreeMap::new() };
    for e in edges([0, 1, 2]) {
        st.count.insert(e, 1);
    }
    go(&mut st);
    st.out
}

/// All shipped seeds with at most `max_flags` flags.
pub fn seed_corpus(max_flags: usize) -> Vec<(String, TriangulationMap)> {
    seed_names()
        .into_iter()
        .map(|n| (n.to_string(), named_seed(n).unwrap()))
        .filter(|(_, m)| m.flag_count() <= max_flags)
        .collect()
}

/// A random regular map: a regular seed, random face subdivisions, then
/// random regular flips.
pub fn random_regular(rng: &mut StdRng, seeds: &[&str], max_extra: usize) -> TriangulationMap {
    let mut m = named_seed(seeds[rng.gen_range(0..seeds.len())]).unwrap();
    for _ in 0..rng.gen_range(0..=max_extra) {
        let faces = m.faces();
        m = flipkit::moves::face_subdivide(&m, faces[rng.gen_range(0..faces.len())]).unwrap();
    }
    for _ in 0..8 {
        let edges = m.edges();
        let e = edges[rng.gen_range(0..edges.len())];
        if can_flip(&m, e) {
            let next = flip(&m, e).unwrap();
            if next.is_regular() {
                m = next;
            }
        }
    }
    m
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Seeds plus a few subdivided variants, used by exhaustive move checks.
pub fn extended_corpus(max_flags: usize) -> Vec<(String, TriangulationMap)> {
    let mut out = seed_corpus(max_flags);
    for (name, k) in [("tetrahedron", 1), ("tetrahedron", 2), ("torus", 1), ("klein_bottle", 1)] {
        let m = subdivide_fixed(&named_seed(name).unwrap(), k);
        if m.flag_count() <= max_flags {
            out.push((format!("{name}+{k}"), m));
        }
    }
    out
}
