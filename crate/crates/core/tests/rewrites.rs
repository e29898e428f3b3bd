mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subsurf_core::cellalg::{classify_word, CellComplex};
use subsurf_core::complex::classify_surface;
use subsurf_core::fixtures::word_classification;

#[test]
fn edge_rewrites_preserve_word_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..1000 {
        let mut cc = common::random_word_system(&mut rng);
        let want = word_classification(&cc).unwrap();
        while let Some(&e) = common::live_real_edges(&cc).first() {
            let next = cc.remove_edge(e, true).unwrap();
            assert_eq!(word_classification(&next).unwrap(), want, "{cc} -> {next}");
            cc = next;
        }
    }
}

#[test]
fn classify_word_matches_triangulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..1000 {
        let cc = common::random_word_system(&mut rng);
        for f in 0..cc.faces.len() {
            let one = CellComplex { edges: cc.edges.clone(), faces: vec![cc.faces[f].clone()] };
            assert_eq!(vec![classify_word(&cc, f).unwrap().summary()], word_classification(&one).unwrap(), "{one}");
        }
    }
}

#[test]
fn eliminating_a_surface_keeps_its_type() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let k = common::random_surface_piece(&mut rng);
        let want = classify_surface(&k).unwrap();
        let seq = common::random_elimination(&mut rng, &k).unwrap();
        let last = seq.last().unwrap();
        assert!(last.letters().next().is_none() || common::live_real_edges(last).is_empty());
        for cc in &seq {
            assert_eq!(word_classification(cc).unwrap(), want, "{k:?} at {cc}");
        }
    }
}
