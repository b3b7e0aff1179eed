use proptest::prelude::*;

use atf_core::format::{parse_diagram, parse_lattice, write_diagram, write_lattice};
use atf_core::homology::{
    blowdown_lattice, blowup_compatible, lattice_from_diagram, lattice_of_atf_blowup, verify_log_cy,
};
use atf_core::surgery::{atf_blowdown, atf_blowup, corner_chop, standard_triangle};
use atf_core::torelli::{build_g, search_isometry, verify_isometry};
use atf_core::{AffineMap, BaseDiagram, IMat2, Point, Rat, SearchOptions};

fn unimodular() -> impl Strategy<Value = IMat2> {
    let gens = [
        IMat2([[1, 1], [0, 1]]),
        IMat2([[1, -1], [0, 1]]),
        IMat2([[1, 0], [1, 1]]),
        IMat2([[1, 0], [-1, 1]]),
    ];
    proptest::collection::vec(0usize..4, 0..6).prop_map(move |word| {
        word.iter()
            .fold(IMat2([[1, 0], [0, 1]]), |acc, &g| acc.mul(&gens[g]))
    })
}

fn shift() -> impl Strategy<Value = Point> {
    (-12i64..12, -12i64..12, 1i64..5)
        .prop_map(|(x, y, d)| Point::new(Rat::new(x, d), Rat::new(y, d)))
}

fn toric() -> impl Strategy<Value = BaseDiagram> {
    prop_oneof![
        (2i64..7).prop_map(|s| BaseDiagram::simplex(Rat::int(s))),
        (2i64..7, 2i64..7).prop_map(|(w, h)| BaseDiagram::rectangle(Rat::int(w), Rat::int(h))),
        (1i64..4, 1i64..4, 1i64..4).prop_map(|(k, h, extra)| BaseDiagram::hirzebruch(
            k,
            Rat::int(k * h + extra),
            Rat::int(h)
        )),
    ]
}

fn moved(d: &BaseDiagram, m: IMat2, t: Point) -> BaseDiagram {
    d.transform(&AffineMap::new(m, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn area_and_lattice_are_affine_invariants(d in toric(), m in unimodular(), t in shift()) {
        let e = moved(&d, m, t);
        prop_assert!(e.is_valid());
        prop_assert!(e.delzant_check());
        prop_assert_eq!(e.affine_area().unwrap(), d.affine_area().unwrap());
        prop_assert_eq!(lattice_from_diagram(&e).unwrap(), lattice_from_diagram(&d).unwrap());
    }

    #[test]
    fn blowup_commutes_with_affine_maps(
        d in toric(), m in unimodular(), t in shift(), a in 1i64..4, b in 1i64..4, i in 0usize..4,
    ) {
        let i = i % d.len();
        let len = d.edge_lattice_length(i).unwrap();
        let (off, cap) = (&len * &Rat::new(a, 8), &len * &Rat::new(b, 8));
        let Ok(tri) = standard_triangle(&d, i, &off, &cap) else { return Ok(()) };
        let Ok(up) = atf_blowup(&d, &tri) else { return Ok(()) };
        let map = AffineMap::new(m, t).unwrap();
        let moved_up = atf_blowup(&d.transform(&map), &tri.transform(&map)).unwrap();
        prop_assert_eq!(moved_up, up.transform(&map));
        prop_assert_eq!(atf_blowdown(&up, 0).unwrap(), d.clone());
    }

    #[test]
    fn nodal_and_class_blowups_agree(d in toric(), a in 1i64..4, b in 1i64..4, i in 0usize..4) {
        let i = i % d.len();
        let len = d.edge_lattice_length(i).unwrap();
        let (off, cap) = (&len * &Rat::new(a, 8), &len * &Rat::new(b, 8));
        let Ok(tri) = standard_triangle(&d, i, &off, &cap) else { return Ok(()) };
        if atf_blowup(&d, &tri).is_err() {
            return Ok(());
        }
        let atf = lattice_of_atf_blowup(&d, &tri).unwrap();
        let base = lattice_from_diagram(&d).unwrap();
        let classes = blowup_compatible(&base, i, &cap).unwrap();
        prop_assert!(verify_log_cy(&atf));
        prop_assert_eq!(&atf, &classes);
        prop_assert!(verify_isometry(&build_g(&atf, &classes).unwrap()).is_valid());
        let e = classes.exceptional_classes[0].coords.clone();
        prop_assert_eq!(blowdown_lattice(&classes, &e).unwrap(), base);
    }

    #[test]
    fn chops_stay_delzant(d in toric(), v in 0usize..4, q in 1i64..4) {
        let v = v % d.len();
        let shortest = d.edge_lattice_length(v).unwrap().min(d.edge_lattice_length(d.prev(v)).unwrap());
        let c = &shortest * &Rat::new(q, 4);
        let chopped = corner_chop(&d, v, &c).unwrap();
        prop_assert!(chopped.delzant_check());
        prop_assert!(chopped.minkowski_check());
        prop_assert_eq!(chopped.len(), d.len() + 1);
        let m = lattice_from_diagram(&chopped).unwrap();
        prop_assert!(verify_log_cy(&m));
    }

    #[test]
    fn texts_round_trip(d in toric(), m in unimodular(), t in shift()) {
        let e = moved(&d, m, t);
        let text = write_diagram(&e);
        prop_assert_eq!(parse_diagram(&text).unwrap(), e.clone());
        let lat = lattice_from_diagram(&e).unwrap();
        let text = write_lattice(&lat);
        prop_assert_eq!(parse_lattice(&text).unwrap(), lat);
    }

    #[test]
    fn a_model_is_isometric_to_itself(d in toric(), c in 1i64..4) {
        let base = lattice_from_diagram(&d).unwrap();
        let m = blowup_compatible(&base, 0, &Rat::new(c, 4)).unwrap();
        let opts = SearchOptions { bound: 2, ..SearchOptions::default() };
        let found = search_isometry(&m, &m, &opts).unwrap();
        prop_assert!(found.is_some_and(|cert| cert.is_valid()));
    }
}
