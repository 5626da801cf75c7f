//! Shipped seed triangulations.
//!
//! Minimal seeds per surface live in `seeds/*.json` (map or facet format) and
//! are compiled in; set `FLIPKIT_SEED_DIR` to load same-named files from
//! another directory instead. Every seed is validated against its surface on
//! load. Larger vertex counts are reached by subdividing the face of rank 0.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::io::load_map;
use crate::map::{SurfaceClass, TriangulationMap};
use crate::moves::subdivide_at;
use crate::{canonical_form, Canonical};

pub const SEED_DIR_ENV: &str = "FLIPKIT_SEED_DIR";

struct Asset {
    name: &'static str,
    text: &'static str,
}

const ASSETS: &[Asset] = &[
    Asset { name: "sphere", text: include_str!("../seeds/sphere.json") },
    Asset { name: "tetrahedron", text: include_str!("../seeds/tetrahedron.json") },
    Asset { name: "octahedron", text: include_str!("../seeds/octahedron.json") },
    Asset { name: "torus", text: include_str!("../seeds/torus.json") },
    Asset { name: "k7_torus", text: include_str!("../seeds/k7_torus.json") },
    Asset { name: "klein_bottle", text: include_str!("../seeds/klein_bottle.json") },
    Asset { name: "projective_plane", text: include_str!("../seeds/projective_plane.json") },
    Asset { name: "rp2_6", text: include_str!("../seeds/rp2_6.json") },
    Asset { name: "genus2", text: include_str!("../seeds/genus2.json") },
];

/// Names of all shipped seeds.
pub fn seed_names() -> Vec<&'static str> {
    ASSETS.iter().map(|a| a.name).collect()
}

fn asset_text(name: &str) -> Result<String> {
    if let Ok(dir) = std::env::var(SEED_DIR_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if path.exists() {
            return std::fs::read_to_string(&path)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())));
        }
    }
    ASSETS
        .iter()
        .find(|a| a.name == name)
        .map(|a| a.text.to_string())
        .ok_or_else(|| Error::NoSeedAvailable(name.to_string()))
}

/// Loads a named seed.
pub fn named_seed(name: &str) -> Result<TriangulationMap> {
    load_map(&asset_text(name)?)
}

/// (asset, surface, vertex count) of the minimal seeds.
const TABLE: &[(&str, SurfaceClass, usize)] = &[
    ("sphere", SurfaceClass::SPHERE, 3),
    ("tetrahedron", SurfaceClass::SPHERE, 4),
    ("projective_plane", SurfaceClass::PROJECTIVE_PLANE, 2),
    ("torus", SurfaceClass::TORUS, 1),
    ("klein_bottle", SurfaceClass::KLEIN_BOTTLE, 1),
    ("genus2", SurfaceClass { euler_characteristic: -2, orientable: true }, 1),
];

/// Subdivides the face of canonical rank 0, `m` times.
pub fn subdivide_fixed(map: &TriangulationMap, m: usize) -> TriangulationMap {
    let mut cur = map.clone();
    for _ in 0..m {
        let canon: Canonical = canonical_form(&cur);
        let f = canon.faces_in_order(&cur)[0] as usize;
        cur = subdivide_at(&cur, f).expect("face subdivision is total");
    }
    cur
}

/// A map of `surface` with exactly `v` vertices: the largest shipped seed with
/// at most `v` vertices, then `v − v(seed)` subdivisions.
pub fn standard_seed(surface: SurfaceClass, v: usize) -> Result<TriangulationMap> {
    let (name, _, v0) = TABLE
        .iter()
        .filter(|(_, s, v0)| *s == surface && *v0 <= v)
        .max_by_key(|(_, _, v0)| *v0)
        .ok_or_else(|| Error::NoSeedAvailable(format!("{} with {v} vertices", surface.name())))?;
    let seed = named_seed(name)?;
    let (sv, _, _) = seed.counts();
    if seed.surface_class() != surface || sv != *v0 {
        return Err(Error::Format(format!("seed {name} does not match its table entry")));
    }
    Ok(subdivide_fixed(&seed, v - v0))
}
