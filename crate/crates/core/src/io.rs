//! JSON encodings of maps and simplicial facet lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::TriangulationMap;

pub const MAP_FORMAT: &str = "flipkit-map-v1";
pub const SIMP_FORMAT: &str = "flipkit-simp-v1";

#[derive(Debug, Serialize, Deserialize)]
struct MapJson {
    format: String,
    flags: usize,
    s0: Vec<u32>,
    s1: Vec<u32>,
    s2: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SimpJson {
    format: String,
    faces: Vec<[u64; 3]>,
}

#[derive(Deserialize)]
struct Probe {
    format: String,
}

pub fn map_to_json(map: &TriangulationMap) -> String {
    let [s0, s1, s2] = map.clone().into_arrays();
    let doc = MapJson { format: MAP_FORMAT.into(), flags: s0.len(), s0, s1, s2 };
    serde_json::to_string(&doc).expect("map serializes")
}

pub fn map_from_json(text: &str) -> Result<TriangulationMap> {
    let doc: MapJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if doc.format != MAP_FORMAT {
        return Err(Error::Format(format!("expected {MAP_FORMAT}, got {}", doc.format)));
    }
    TriangulationMap::from_map_arrays(doc.flags, doc.s0, doc.s1, doc.s2)
}

pub fn simp_to_json(faces: &[[u64; 3]]) -> String {
    let doc = SimpJson { format: SIMP_FORMAT.into(), faces: faces.to_vec() };
    serde_json::to_string(&doc).expect("facets serialize")
}

/// Parses a simplicial facet list without building the map.
pub fn simp_faces_from_json(text: &str) -> Result<Vec<[u64; 3]>> {
    let doc: SimpJson = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if doc.format != SIMP_FORMAT {
        return Err(Error::Format(format!("expected {SIMP_FORMAT}, got {}", doc.format)));
    }
    Ok(doc.faces)
}

pub fn simp_from_json(text: &str) -> Result<TriangulationMap> {
    TriangulationMap::from_face_triples(&simp_faces_from_json(text)?)
}

/// Loads either supported format, dispatching on the `format` field.
pub fn load_map(text: &str) -> Result<TriangulationMap> {
    let probe: Probe = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    match probe.format.as_str() {
        MAP_FORMAT => map_from_json(text),
        SIMP_FORMAT => simp_from_json(text),
        other => Err(Error::Format(format!("unknown format {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_json_round_trips_bit_exactly() {
        let t = TriangulationMap::from_face_triples(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
            .unwrap();
        let text = map_to_json(&t);
        assert!(text.starts_with(r#"{"format":"flipkit-map-v1","flags":24,"s0":["#));
        let back = map_from_json(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(map_to_json(&back), text);
    }

    #[test]
    fn simp_json_round_trips_bit_exactly() {
        let text = r#"{"format":"flipkit-simp-v1","faces":[[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#;
        let faces = simp_faces_from_json(text).unwrap();
        assert_eq!(simp_to_json(&faces), text);
        assert_eq!(load_map(text).unwrap().counts(), (4, 6, 4));
    }

    #[test]
    fn truncated_input_is_a_format_error() {
        assert!(matches!(load_map(r#"{"format":"flipkit-map-v1","fl"#), Err(Error::Format(_))));
        assert!(matches!(load_map(r#"{"format":"other"}"#), Err(Error::Format(_))));
    }
}
