//! Acceptance suite: one pass/fail line per criterion.

mod common;

use std::collections::{BTreeMap, HashSet};
use std::time::Instant;

use flipkit::gadgets::{bary_by_subdivisions, lift_flip_to_bary2};
use flipkit::moves::{
    apply_move, barycentric, can_contract, can_flip, contract, face_subdivide_tracked,
    flip, flip_tracked, is_regular_flip, link_condition, reduce_to_irreducible, verify_script,
};
use flipkit::pipeline::{
    certify_equivalence, thresholds, verify_certificate, EquivalenceCertificate, Strategies,
    Thresholds,
};
use flipkit::search::{enumerate, explore, FlipMode, SearchBudget};
use flipkit::seeds::{named_seed, subdivide_fixed};
use flipkit::{canonical_key, CanonicalKey, MoveKind, SurfaceClass, TriangulationMap};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_formulas() -> Outcome {
    let sphere = thresholds(SurfaceClass::SPHERE);
    let torus = thresholds(SurfaceClass::TORUS);
    ensure(sphere.n == -2590, || format!("N(sphere) = {}", sphere.n))?;
    ensure(torus.n == 9450, || format!("N(torus) = {}", torus.n))?;
    ensure(torus.irreducible_bound == 270, || format!("bound(torus) = {}", torus.irreducible_bound))?;
    for chi in [2, 1, 0, -1, -2, -4] {
        let t = Thresholds::for_chi(chi);
        let expect = 35 * ((270 - 171 * chi) - chi);
        ensure(t.n == expect, || format!("chi={chi}: N={} but 35(bound-chi)={expect}", t.n))?;
        ensure(t.m(t.irreducible_bound) == t.n, || format!("chi={chi}: m(bound) != N"))?;
    }
    Ok("N(sphere)=-2590 N(torus)=9450 bound(torus)=270; identity on 6 chi values".into())
}

fn c2_counting() -> Outcome {
    let mut rng = common::rng(2);
    let seeds = ["tetrahedron", "octahedron", "rp2_6", "sphere", "projective_plane"];
    for i in 0..50 {
        let t = if i < 45 {
            common::random_regular(&mut rng, &seeds[..3], 2)
        } else {
            named_seed(seeds[rng.gen_range(0..seeds.len())]).unwrap()
        };
        let (v, e, f) = t.counts();
        let chi = t.euler_characteristic();
        let (v, e, f) = (v as i64, e as i64, f as i64);
        ensure(f == 2 * (v - chi) && 2 * e == 3 * f, || format!("map {i}: counts {v},{e},{f}"))?;
        let b = barycentric(&t);
        let (bv, be, bf) = b.counts();
        let (bv, be, bf) = (bv as i64, be as i64, bf as i64);
        ensure(bv == 6 * v - 5 * chi, || format!("map {i}: v(T')={bv}, expected {}", 6 * v - 5 * chi))?;
        ensure(bf == 2 * (bv - chi) && 2 * be == 3 * bf, || format!("map {i}: T' counts {bv},{be},{bf}"))?;
        if !t.is_regular() {
            continue;
        }
        let script = bary_by_subdivisions(&t).map_err(|e| format!("map {i}: {e}"))?;
        let m = script.count(MoveKind::FaceSubdivide) as i64;
        ensure(m == 35 * (v - chi) && m == Thresholds::for_chi(chi).m(v), || {
            format!("map {i}: {m} subdivisions, expected {}", 35 * (v - chi))
        })?;
        ensure(script.count(MoveKind::Contract) == 0 && script.all_regular, || {
            format!("map {i}: script is not subdivisions plus regular flips")
        })?;
        ensure(script.end_key == canonical_key(&barycentric(&b)), || format!("map {i}: endpoint is not T''"))?;
    }
    Ok("50 maps: v(T')=6v-5chi, f=2(v-chi), 2e=3f, m=35(v-chi)".into())
}

/// Seed corpus plus every sphere map with at most 60 flags.
fn move_corpus() -> Vec<(String, TriangulationMap)> {
    let mut out = common::extended_corpus(60);
    for v in 3..=7 {
        let en = enumerate(SurfaceClass::SPHERE, v, SearchBudget::default()).unwrap();
        for (i, k) in en.keys.iter().enumerate() {
            out.push((format!("sphere{v}#{i}"), k.decode().unwrap()));
        }
    }
    out
}

fn c3_move_algebra() -> Outcome {
    let corpus = move_corpus();
    let (mut flips, mut subdivs, mut contractible) = (0, 0, 0);
    for (name, t) in &corpus {
        let key = canonical_key(t);
        for e in t.edges() {
            if can_flip(t, e) {
                let (t2, back) = flip_tracked(t, e).map_err(|err| format!("{name}: {err}"))?;
                let t3 = flip(&t2, back).map_err(|err| format!("{name}: reflip {err}"))?;
                ensure(canonical_key(&t3) == key, || format!("{name}: flip twice changed the map"))?;
                flips += 1;
            }
            let op = can_contract(t, e);
            ensure(op == link_condition(t, e), || format!("{name}: contractibility disagrees at {e:?}"))?;
            contractible += op as usize;
        }
        let eo = t.edge_orbits();
        for f in t.faces() {
            let (s, spokes) = face_subdivide_tracked(t, f).map_err(|err| format!("{name}: {err}"))?;
            let mut sides = HashSet::new();
            let mut x = f.0 as usize;
            for _ in 0..3 {
                sides.insert(eo.index[x]);
                x = t.s1(t.s0(x));
            }
            for h in spokes {
                match contract(&s, h) {
                    Ok(back) => ensure(canonical_key(&back) == key, || {
                        format!("{name}: contract after subdivide is not the identity")
                    })?,
                    Err(err) => ensure(sides.len() < 3, || format!("{name}: spoke contraction failed: {err}"))?,
                }
            }
            subdivs += 1;
        }
    }
    Ok(format!(
        "{} maps: {flips} flips, {subdivs} subdivisions, {contractible} contractible edges checked",
        corpus.len()
    ))
}

fn c4_k7() -> Outcome {
    let k7 = named_seed("k7_torus").unwrap();
    let edges = k7.edges();
    ensure(edges.len() == 21, || format!("{} edges", edges.len()))?;
    ensure(edges.iter().all(|&e| can_flip(&k7, e)), || "some edge is not flippable at all".into())?;
    let regular = edges.iter().filter(|&&e| is_regular_flip(&k7, e)).count();
    ensure(regular == 0, || format!("{regular} regular flips"))?;
    Ok("0 of 21 flips are regular".into())
}

struct SphereOracle {
    catalogues: BTreeMap<usize, common::Catalogue>,
}

fn c5_enumeration(oracle: &SphereOracle) -> Outcome {
    let oracle_regular: Vec<usize> =
        oracle.catalogues.values().map(|c| c.values().filter(|&&r| r).count()).collect();
    ensure(oracle_regular == [1, 1, 2, 5, 14], || format!("oracle regular counts {oracle_regular:?}"))?;
    let mut counts = Vec::new();
    for (&v, cat) in &oracle.catalogues {
        let en = enumerate(SurfaceClass::SPHERE, v, SearchBudget::default()).map_err(|e| e.to_string())?;
        let got: BTreeMap<CanonicalKey, bool> = en.keys.iter().cloned().zip(en.regular.iter().copied()).collect();
        ensure(got.len() == cat.len(), || format!("v={v}: {} maps vs oracle {}", got.len(), cat.len()))?;
        ensure(&got == cat, || format!("v={v}: map sets or regularity differ from the oracle"))?;
        let reg = en.regular_keys().len();
        counts.push(format!("v={v}:{reg}/{}", got.len()));
    }
    Ok(format!("regular/total {}", counts.join(" ")))
}

fn direct_only() -> Strategies {
    Strategies { direct: true, theorem: false }
}

fn all_pairs(maps: &[TriangulationMap], label: &str) -> Result<usize, String> {
    let mut n = 0;
    for (i, a) in maps.iter().enumerate() {
        for (j, b) in maps.iter().enumerate().skip(i + 1) {
            let cert = certify_equivalence(a, b, SearchBudget::default(), direct_only())
                .map_err(|e| format!("{label} {i}-{j}: {e}"))?;
            let verdict = verify_certificate(&cert);
            ensure(verdict.accepted, || format!("{label} {i}-{j}: {:?}", verdict.reason))?;
            ensure(cert.script.end_key == canonical_key(b), || format!("{label} {i}-{j}: wrong endpoint"))?;
            n += 1;
        }
    }
    Ok(n)
}

fn torus8_regular() -> Vec<TriangulationMap> {
    common::simplicial_catalogue(8, 16)
        .into_values()
        .filter(|m| m.surface_class() == SurfaceClass::TORUS)
        .collect()
}

fn c6_connectivity(oracle: &SphereOracle, tori: &[TriangulationMap]) -> Outcome {
    let mut pairs = 0;
    for (&v, cat) in &oracle.catalogues {
        let maps: Vec<_> = cat.iter().filter(|(_, &r)| r).map(|(k, _)| k.decode().unwrap()).collect();
        pairs += all_pairs(&maps, &format!("sphere v={v}"))?;
    }
    ensure(tori.len() == 7, || format!("oracle found {} 8-vertex tori", tori.len()))?;
    let component = explore(&[subdivide_fixed(&named_seed("k7_torus").unwrap(), 1)], FlipMode::RegularFlips, SearchBudget::default())
        .map_err(|e| e.to_string())?;
    let found: HashSet<_> = component.nodes().iter().map(|n| n.key.clone()).collect();
    ensure(tori.iter().all(|t| found.contains(&canonical_key(t))), || "a torus lies outside the component".into())?;
    let torus_pairs = all_pairs(tori, "torus v=8")?;
    Ok(format!("{pairs} sphere pairs (v<=8), {torus_pairs} torus pairs (7 tori, v=8), all verified"))
}

fn c7_lift() -> Outcome {
    let mut checked = 0;
    for (name, t) in common::seed_corpus(36) {
        let start = barycentric(&barycentric(&t));
        for e in t.edges() {
            if !can_flip(&t, e) {
                continue;
            }
            let script = lift_flip_to_bary2(&t, e).map_err(|err| format!("{name}: {err}"))?;
            ensure(script.all_regular, || format!("{name}: script not all-regular"))?;
            let target = barycentric(&barycentric(&flip(&t, e).unwrap()));
            ensure(script.end_key == canonical_key(&target), || format!("{name}: wrong endpoint"))?;
            verify_script(&script, &start).map_err(|err| format!("{name}: replay {err}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} flippable edges lifted and replayed"))
}

fn theorem_only() -> Strategies {
    Strategies { direct: false, theorem: true }
}

fn c8_pipeline(oracle: &SphereOracle, tori: &[TriangulationMap]) -> Outcome {
    let mut pairs: Vec<(String, TriangulationMap, TriangulationMap)> = Vec::new();
    let six: Vec<_> = oracle.catalogues[&6].iter().filter(|(_, &r)| r).map(|(k, _)| k.decode().unwrap()).collect();
    for (i, a) in six.iter().enumerate() {
        for (j, b) in six.iter().enumerate() {
            pairs.push((format!("sphere6 {i}-{j}"), a.clone(), b.clone()));
        }
    }
    let irreducible = tori
        .iter()
        .find(|t| reduce_to_irreducible(t).unwrap().0.counts().0 == 8)
        .ok_or("no irreducible 8-vertex torus")?;
    let sk7 = subdivide_fixed(&named_seed("k7_torus").unwrap(), 1);
    pairs.push(("torus8 s(K7)-irreducible".into(), sk7, irreducible.clone()));
    let mut lens = Vec::new();
    for (label, a, b) in &pairs {
        let cert = certify_equivalence(a, b, SearchBudget::default(), theorem_only())
            .map_err(|e| format!("{label}: {e}"))?;
        ensure(cert.strategy.iter().all(|t| !t.starts_with("direct:")), || format!("{label}: used direct search"))?;
        let verdict = verify_certificate(&cert);
        ensure(verdict.accepted, || format!("{label}: {:?}", verdict.reason))?;
        ensure(cert.script.end_key == canonical_key(b), || format!("{label}: wrong endpoint"))?;
        lens.push(format!("{label}:{}", cert.script.len()));
    }
    Ok(format!("moves {}", lens.join(" ")))
}

/// Rank perturbation of move `i` that changes the map it produces.
fn perturb(cert: &EquivalenceCertificate, i: usize, rng: &mut rand::rngs::StdRng) -> Option<EquivalenceCertificate> {
    let s = &cert.script;
    let mut cur = s.start_key.decode().unwrap();
    for mv in &s.moves[..i] {
        cur = apply_move(&cur, *mv).unwrap();
    }
    let honest = canonical_key(&apply_move(&cur, s.moves[i]).unwrap());
    let available = match s.moves[i].kind {
        MoveKind::FaceSubdivide => cur.counts().2,
        _ => cur.counts().1,
    };
    for _ in 0..8 {
        let mut mv = s.moves[i];
        mv.target = (mv.target + rng.gen_range(1..available + 3)) % (available + 2);
        if mv.target == s.moves[i].target {
            continue;
        }
        let changed = apply_move(&cur, mv).map(|m| canonical_key(&m) != honest).unwrap_or(true);
        if changed {
            let mut out = cert.clone();
            out.script.moves[i] = mv;
            return Some(out);
        }
    }
    None
}

fn c9_tamper(oracle: &SphereOracle) -> Outcome {
    let eight: Vec<_> = oracle.catalogues[&8].iter().filter(|(_, &r)| r).map(|(k, _)| k.decode().unwrap()).collect();
    let mut bases = Vec::new();
    for j in 1..eight.len() {
        bases.push(certify_equivalence(&eight[0], &eight[j], SearchBudget::default(), direct_only()).map_err(|e| e.to_string())?);
    }
    let six: Vec<_> = oracle.catalogues[&6].iter().filter(|(_, &r)| r).map(|(k, _)| k.decode().unwrap()).collect();
    bases.push(certify_equivalence(&six[0], &six[1], SearchBudget::default(), theorem_only()).map_err(|e| e.to_string())?);
    for b in &bases {
        ensure(verify_certificate(b).accepted, || "base certificate rejected".into())?;
    }
    let mut rng = common::rng(9);
    let mut kinds = BTreeMap::new();
    let mut tried = 0;
    while tried < 100 {
        let base = &bases[rng.gen_range(0..bases.len())];
        let n = base.script.len();
        let (kind, bad) = match tried % 5 {
            0 | 1 => match perturb(base, rng.gen_range(0..n), &mut rng) {
                Some(c) => ("index", c),
                None => continue,
            },
            2 => {
                let mut c = base.clone();
                c.script.all_regular = false;
                ("flag", c)
            }
            3 => {
                let mut c = base.clone();
                let i = rng.gen_range(0..n);
                c.script.moves[i].kind = if rng.gen_bool(0.5) { MoveKind::Contract } else { MoveKind::FaceSubdivide };
                ("kind", c)
            }
            _ => {
                let mut c = base.clone();
                if rng.gen_bool(0.5) {
                    std::mem::swap(&mut c.script.start_key, &mut c.script.end_key);
                } else {
                    let other = &bases[rng.gen_range(0..bases.len())].script.end_key;
                    if *other == c.script.end_key {
                        continue;
                    }
                    c.script.end_key = other.clone();
                }
                ("key", c)
            }
        };
        let verdict = verify_certificate(&bad);
        ensure(!verdict.accepted, || format!("{kind} tamper #{tried} accepted"))?;
        *kinds.entry(kind).or_insert(0) += 1;
        tried += 1;
    }
    // A byte flip inside a serialized key must also be caught.
    let text = bases[0].to_json();
    let hex = bases[0].script.end_key.to_hex();
    let last = hex.chars().last().unwrap();
    let flipped = format!("{}{}", &hex[..hex.len() - 1], if last == '0' { '1' } else { '0' });
    if let Ok(c) = EquivalenceCertificate::from_json(&text.replace(&hex, &flipped)) {
        ensure(!verify_certificate(&c).accepted, || "serialized key flip accepted".into())?;
    }
    Ok(format!("100 mutations rejected {kinds:?}"))
}

fn main() {
    let t0 = Instant::now();
    let oracle = SphereOracle {
        catalogues: (4..=8).map(|v| (v, common::sphere_catalogue(v))).collect(),
    };
    let tori = torus8_regular();
    println!("oracles computed in {:.1}s", t0.elapsed().as_secs_f64());
    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("formula suite", Box::new(c1_formulas)),
        ("counting suite", Box::new(c2_counting)),
        ("move algebra", Box::new(c3_move_algebra)),
        ("regular-flip obstruction", Box::new(c4_k7)),
        ("enumeration oracle equivalence", Box::new(|| c5_enumeration(&oracle))),
        ("connectivity at desk scale", Box::new(|| c6_connectivity(&oracle, &tori))),
        ("gadget endpoint correctness", Box::new(c7_lift)),
        ("theorem pipeline end-to-end", Box::new(|| c8_pipeline(&oracle, &tori))),
        ("certificate tamper suite", Box::new(|| c9_tamper(&oracle))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
