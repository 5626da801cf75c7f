//! Canonical labelling of maps up to isomorphism.
//!
//! Flags are relabelled in breadth-first order (`s0`, `s1`, `s2` at each
//! step) from a starting flag, and the involution arrays are read off in
//! that order. The key is the lexicographic minimum over starting flags.
//! Only starting flags from the smallest class of an isomorphism-invariant
//! colour refinement are tried, which keeps the common case near linear
//! while leaving the result independent of the input labelling.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::map::TriangulationMap;

/// Byte encoding of a map that is equal for two maps iff they are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|_| Error::InvalidKey)?;
        let key = CanonicalKey(bytes);
        key.decode_code()?;
        Ok(key)
    }

    /// Number of flags of the encoded map.
    pub fn flag_count(&self) -> usize {
        if self.0.len() < 4 {
            return 0;
        }
        u32::from_le_bytes([self.0[0], self.0[1], self.0[2], self.0[3]]) as usize
    }

    fn decode_code(&self) -> Result<Vec<u32>> {
        let n = self.flag_count();
        let width = if n <= 1 << 16 { 2 } else { 4 };
        let body = &self.0.get(4..).ok_or(Error::InvalidKey)?;
        if n == 0 || body.len() != 3 * n * width {
            return Err(Error::InvalidKey);
        }
        Ok(body
            .chunks(width)
            .map(|c| {
                if width == 2 {
                    u16::from_le_bytes([c[0], c[1]]) as u32
                } else {
                    u32::from_le_bytes([c[0], c[1], c[2], c[3]])
                }
            })
            .collect())
    }

    /// Rebuilds the map in canonical labelling.
    pub fn decode(&self) -> Result<TriangulationMap> {
        let code = self.decode_code()?;
        let n = self.flag_count();
        let mut s = [vec![0u32; n], vec![0u32; n], vec![0u32; n]];
        for l in 0..n {
            for i in 0..3 {
                s[i][l] = code[3 * l + i];
            }
        }
        let [s0, s1, s2] = s;
        TriangulationMap::from_map_arrays(n, s0, s1, s2).map_err(|_| Error::InvalidKey)
    }

    fn encode(n: usize, code: &[u32]) -> Self {
        let width = if n <= 1 << 16 { 2 } else { 4 };
        let mut bytes = Vec::with_capacity(4 + code.len() * width);
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        for &c in code {
            if width == 2 {
                bytes.extend_from_slice(&(c as u16).to_le_bytes());
            } else {
                bytes.extend_from_slice(&c.to_le_bytes());
            }
        }
        CanonicalKey(bytes)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = self.to_hex();
        if h.len() > 24 {
            write!(f, "CanonicalKey({}..{}b)", &h[..24], self.0.len())
        } else {
            write!(f, "CanonicalKey({h})")
        }
    }
}

/// A canonical labelling: the key and the label given to every flag.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub key: CanonicalKey,
    /// `label[flag]` is the flag's position in the canonical order.
    pub label: Vec<u32>,
}

impl Canonical {
    /// Flags in canonical order (`inverse[label] = flag`).
    pub fn inverse(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.label.len()];
        for (f, &l) in self.label.iter().enumerate() {
            inv[l as usize] = f as u32;
        }
        inv
    }

    fn ordered(&self, orbit_index: &[u32], orbit_count: usize) -> Vec<u32> {
        let mut seen = vec![false; orbit_count];
        let mut out = Vec::with_capacity(orbit_count);
        for f in self.inverse() {
            let o = orbit_index[f as usize] as usize;
            if !seen[o] {
                seen[o] = true;
                out.push(f);
            }
        }
        out
    }

    /// For every edge rank, the edge's flag with the smallest canonical label.
    pub fn edges_in_order(&self, map: &TriangulationMap) -> Vec<u32> {
        let o = map.edge_orbits();
        self.ordered(&o.index, o.len())
    }

    pub fn faces_in_order(&self, map: &TriangulationMap) -> Vec<u32> {
        let o = map.face_orbits();
        self.ordered(&o.index, o.len())
    }

    pub fn vertices_in_order(&self, map: &TriangulationMap) -> Vec<u32> {
        let o = map.vertex_orbits();
        self.ordered(&o.index, o.len())
    }
}

#[inline]
fn mix(mut h: u64, x: u64) -> u64 {
    h ^= x.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn distinct(colours: &[u64]) -> usize {
    let mut v = colours.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Starting flags worth trying: the smallest class of a stable colour refinement.
fn start_candidates(map: &TriangulationMap) -> Vec<usize> {
    let n = map.flag_count();
    let vo = map.vertex_orbits();
    let mut size = vec![0u64; vo.len()];
    for &o in &vo.index {
        size[o as usize] += 1;
    }
    let mut colour: Vec<u64> = (0..n).map(|f| mix(1, size[vo.index[f] as usize])).collect();
    let mut classes = distinct(&colour);
    loop {
        let next: Vec<u64> = (0..n)
            .map(|f| {
                let h = mix(colour[f], colour[map.s0(f)]);
                let h = mix(h, colour[map.s1(f)]);
                mix(h, colour[map.s2(f)])
            })
            .collect();
        let c = distinct(&next);
        colour = next;
        if c <= classes {
            break;
        }
        classes = c;
    }
    let mut count: HashMap<u64, usize> = HashMap::new();
    for &c in &colour {
        *count.entry(c).or_insert(0) += 1;
    }
    let best = count
        .iter()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
        .map(|(&c, _)| c)
        .unwrap_or(0);
    (0..n).filter(|&f| colour[f] == best).collect()
}

/// Breadth-first relabelling from `start`; gives up as soon as the code
/// exceeds `best`.
fn encode_from(
    map: &TriangulationMap,
    start: usize,
    best: Option<&[u32]>,
) -> Option<(Vec<u32>, Vec<u32>)> {
    let n = map.flag_count();
    let mut label = vec![u32::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut code = Vec::with_capacity(3 * n);
    label[start] = 0;
    order.push(start);
    let mut tied = best.is_some();
    let mut idx = 0;
    while idx < order.len() {
        let f = order[idx];
        idx += 1;
        for i in 0..3 {
            let g = map.involution(i)[f] as usize;
            if label[g] == u32::MAX {
                label[g] = order.len() as u32;
                order.push(g);
            }
            let v = label[g];
            if tied {
                let b = best.unwrap()[code.len()];
                match v.cmp(&b) {
                    Ordering::Greater => return None,
                    Ordering::Less => tied = false,
                    Ordering::Equal => {}
                }
            }
            code.push(v);
        }
    }
    Some((code, label))
}

/// Canonical labelling of `map`.
pub fn canonical_form(map: &TriangulationMap) -> Canonical {
    let mut best: Option<(Vec<u32>, Vec<u32>)> = None;
    for start in start_candidates(map) {
        if let Some(found) = encode_from(map, start, best.as_ref().map(|b| b.0.as_slice())) {
            let better = match &best {
                None => true,
                Some(b) => found.0 < b.0,
            };
            if better {
                best = Some(found);
            }
        }
    }
    let (code, label) = best.expect("map has at least one flag");
    Canonical { key: CanonicalKey::encode(map.flag_count(), &code), label }
}

pub fn canonical_key(map: &TriangulationMap) -> CanonicalKey {
    canonical_form(map).key
}
