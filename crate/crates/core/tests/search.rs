mod common;

use flipkit::moves::is_regular_flip;
use flipkit::search::{enumerate, explore, find_path, FlipMode, SearchBudget};
use flipkit::seeds::{named_seed, standard_seed, subdivide_fixed};
use flipkit::{canonical_key, Error, SurfaceClass};

#[test]
fn tetrahedron_closure_matches_the_oracle() {
    let oracle = common::sphere_catalogue(4);
    let store = explore(&[named_seed("tetrahedron").unwrap()], FlipMode::AllFlips, SearchBudget::default()).unwrap();
    assert!(store.is_complete());
    assert_eq!(store.len(), oracle.len());
    for n in store.nodes() {
        assert_eq!(oracle.get(&n.key), Some(&n.regular));
        assert_eq!(n.vertices, 4);
    }
}

#[test]
fn small_sphere_enumerations_match_the_oracle() {
    for v in 3..=6 {
        let oracle = common::sphere_catalogue(v);
        let en = enumerate(SurfaceClass::SPHERE, v, SearchBudget::default()).unwrap();
        assert_eq!(en.keys.len(), oracle.len(), "v={v}");
        assert_eq!(en.regular_keys().len(), oracle.values().filter(|&&r| r).count(), "v={v}");
    }
}

#[test]
fn regular_component_of_octahedron() {
    let store = explore(&[named_seed("octahedron").unwrap()], FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    assert_eq!(store.len(), 2);
    assert!(store.nodes().iter().all(|n| n.regular));
}

#[test]
fn budget_of_one_is_exhausted() {
    let root = named_seed("octahedron").unwrap();
    let store = explore(std::slice::from_ref(&root), FlipMode::RegularFlips, SearchBudget::nodes(1)).unwrap();
    assert!(!store.is_complete());
    let other = store.nodes()[0].key.clone();
    let two = explore(std::slice::from_ref(&root), FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    let target = two.nodes().iter().find(|n| n.key != other).unwrap().key.decode().unwrap();
    assert_eq!(find_path(&root, &target, FlipMode::RegularFlips, SearchBudget::nodes(1)), Err(Error::Exhausted));
    assert!(matches!(
        enumerate(SurfaceClass::SPHERE, 7, SearchBudget::nodes(10)),
        Err(Error::Exhausted)
    ));
}

#[test]
fn paths_are_shortest_and_verified() {
    let o = named_seed("octahedron").unwrap();
    assert!(find_path(&o, &o, FlipMode::RegularFlips, SearchBudget::default()).unwrap().is_empty());
    let store = explore(std::slice::from_ref(&o), FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    let other = store.map(1);
    let p = find_path(&o, &other, FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    assert_eq!(p.len(), store.nodes()[1].depth);
    assert!(p.all_regular && !p.is_empty());

    let k7s = subdivide_fixed(&named_seed("k7_torus").unwrap(), 1);
    let comp = explore(std::slice::from_ref(&k7s), FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    let far = comp.map(comp.len() - 1);
    let p = find_path(&k7s, &far, FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    assert_eq!(p.end_key, canonical_key(&far));
}

#[test]
fn k7_has_no_regular_neighbours() {
    let k7 = named_seed("k7_torus").unwrap();
    let store = explore(std::slice::from_ref(&k7), FlipMode::RegularFlips, SearchBudget::default()).unwrap();
    assert_eq!(store.len(), 1);
    assert!(store.edges().is_empty());
    assert!(k7.edges().iter().all(|&e| !is_regular_flip(&k7, e)));
    assert!(matches!(
        find_path(&k7, &standard_seed(SurfaceClass::TORUS, 7).unwrap(), FlipMode::RegularFlips, SearchBudget::default()),
        Err(Error::NotRegular)
    ));
}

#[test]
fn exploration_is_deterministic() {
    let roots = [standard_seed(SurfaceClass::TORUS, 3).unwrap()];
    let a = explore(&roots, FlipMode::AllFlips, SearchBudget::default()).unwrap();
    let b = explore(&roots, FlipMode::AllFlips, SearchBudget::default()).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    let class = roots[0].surface_class();
    for i in 0..a.len() {
        let m = a.map(i);
        assert_eq!((m.counts().0, m.surface_class()), (3, class));
    }
}

#[test]
fn klein_bottle_seed() {
    let k = standard_seed(SurfaceClass::KLEIN_BOTTLE, 1).unwrap();
    assert_eq!(k.surface_class(), SurfaceClass::KLEIN_BOTTLE);
    assert_eq!(standard_seed(SurfaceClass::TORUS, 1).unwrap().counts(), (1, 3, 2));
}
