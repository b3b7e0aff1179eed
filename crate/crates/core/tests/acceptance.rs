//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use atf_core::format::{
    parse_certificate_fields, parse_diagram, parse_lattice, parse_scenario, write_diagram,
    write_lattice, write_scenario,
};
use atf_core::geometry::{convex_contains, on_segment};
use atf_core::homology::{
    blowdown_lattice, blowup_compatible, blowup_noncompatible, lattice_from_diagram,
    lattice_of_atf_blowup, lattice_of_atf_diagram, verify_log_cy,
};
use atf_core::pipeline::{locality_diff, run};
use atf_core::render::render_svg;
use atf_core::surgery::{atf_blowdown, atf_blowup, corner_chop, standard_triangle};
use atf_core::torelli::{build_g, search_isometry, verify_isometry};
use atf_core::{
    AffineMap, BaseDiagram, ConvexRegion, IMat2, LatVec, LatticeModel, PipelineReport, Point, Rat,
    RenderStyle, Scenario, SearchOptions,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// Random toric diagrams: a base shape, a few corner chops, then a random
// integral affine map (possibly orientation reversing).

fn random_unimodular(rng: &mut StdRng) -> IMat2 {
    let mut m = IMat2([[1, 0], [0, 1]]);
    for _ in 0..rng.gen_range(0..4) {
        let a = rng.gen_range(-2..=2);
        let e = if rng.gen_bool(0.5) {
            IMat2([[1, a], [0, 1]])
        } else {
            IMat2([[1, 0], [a, 1]])
        };
        m = m.mul(&e);
    }
    if rng.gen_bool(0.3) {
        m = m.mul(&IMat2([[0, 1], [1, 0]]));
    }
    m
}

fn random_toric(rng: &mut StdRng) -> BaseDiagram {
    let mut d = match rng.gen_range(0..3) {
        0 => BaseDiagram::simplex(Rat::int(rng.gen_range(2..7))),
        1 => BaseDiagram::rectangle(Rat::int(rng.gen_range(2..7)), Rat::int(rng.gen_range(2..7))),
        _ => {
            let k = rng.gen_range(1..4);
            let h = rng.gen_range(1..4);
            BaseDiagram::hirzebruch(k, Rat::int(k * h + rng.gen_range(1..5)), Rat::int(h))
        }
    };
    for _ in 0..rng.gen_range(0..3) {
        let v = rng.gen_range(0..d.len());
        let shortest = d
            .edge_lattice_length(v)
            .unwrap()
            .min(d.edge_lattice_length(d.prev(v)).unwrap());
        let c = &shortest * &r(rng.gen_range(1..4), 4);
        if let Ok(chopped) = corner_chop(&d, v, &c) {
            d = chopped;
        }
    }
    let shift = Point::new(r(rng.gen_range(-8..9), 4), r(rng.gen_range(-8..9), 4));
    let map = AffineMap::new(random_unimodular(rng), shift).expect("unimodular");
    d.transform(&map)
}

/// A random diagram with a random standard triangle on one of its edges.
fn random_pair(rng: &mut StdRng) -> (BaseDiagram, usize, Rat, Rat) {
    loop {
        let d = random_toric(rng);
        let i = rng.gen_range(0..d.len());
        let len = d.edge_lattice_length(i).unwrap();
        let a = rng.gen_range(1..7);
        let b = rng.gen_range(1..8 - a);
        let t = &len * &r(a, 8);
        let c = &len * &r(b, 8);
        if let Ok(tri) = standard_triangle(&d, i, &t, &c) {
            if atf_blowup(&d, &tri).is_ok() {
                return (d, i, t, c);
            }
        }
    }
}

fn random_pairs(seed: u64, count: usize) -> Vec<(BaseDiagram, usize, Rat, Rat)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_pair(&mut rng)).collect()
}

// ---------------------------------------------------------------------------
// The scenario suite: five closed toric surfaces, three capacities, two
// offsets, and the whole diagram as the region.

fn shapes() -> Vec<(&'static str, BaseDiagram)> {
    let n = Rat::int;
    vec![
        ("plane", BaseDiagram::simplex(n(3))),
        ("quadric", BaseDiagram::rectangle(n(3), n(3))),
        ("hirzebruch1", BaseDiagram::hirzebruch(1, n(4), n(3))),
        ("hirzebruch2", BaseDiagram::hirzebruch(2, n(8), n(3))),
        ("hirzebruch3", BaseDiagram::hirzebruch(3, n(10), n(3))),
    ]
}

fn suite(compatible: bool) -> Vec<(String, Scenario)> {
    let mut out = Vec::new();
    for (name, d) in shapes() {
        for c in [r(1, 2), r(1, 1), r(3, 2)] {
            for t in [r(1, 4), r(1, 1)] {
                out.push((
                    format!("{name} c={c} t={t}"),
                    Scenario {
                        region: ConvexRegion::new(d.vertices.clone(), 0),
                        diagram: d.clone(),
                        edge_index: 0,
                        capacity: c.clone(),
                        offset: t,
                        margin: r(1, 4),
                        compatible,
                    },
                ));
            }
        }
    }
    out
}

fn run_suite(compatible: bool) -> Result<Vec<(String, Scenario, PipelineReport)>, String> {
    suite(compatible)
        .into_iter()
        .map(|(name, s)| match run(&s) {
            Ok(rep) => Ok((name, s, rep)),
            Err(e) => Err(format!("{name}: {e}")),
        })
        .collect()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

// ---------------------------------------------------------------------------

fn c1_area() -> Check {
    let pairs = random_pairs(1, 200);
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(11);
    let mut chops = 0;
    for (k, (d, i, t, c)) in pairs.iter().enumerate() {
        let before = d.affine_area().unwrap();
        let tri = standard_triangle(d, *i, t, c).unwrap();
        let after = atf_blowup(d, &tri).unwrap().affine_area().unwrap();
        let drop = c * c / 2;
        ensure(&before - &after == drop, || {
            format!("pair {k}: nodal blow-up area {before} -> {after}, expected drop {drop}")
        })?;
        // Chop a random vertex with a size inside both adjacent edges.
        let v = rng.gen_range(0..d.len());
        let shortest = d
            .edge_lattice_length(v)
            .unwrap()
            .min(d.edge_lattice_length(d.prev(v)).unwrap());
        let cc = &shortest * &r(rng.gen_range(1..4), 4);
        if let Ok(ch) = corner_chop(d, v, &cc) {
            chops += 1;
            let after = ch.affine_area().unwrap();
            ensure(&before - &after == &cc * &cc / 2, || {
                format!("pair {k}: chop of size {cc} at {v} gave area {before} -> {after}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(chops >= 150, || {
        format!("only {chops} of 200 corner chops applied")
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "200 blow-ups and {chops} chops exact in {elapsed:?}"
    ))
}

fn primitive_dir(from: &Point, to: &Point) -> LatVec {
    (to - from).primitive_direction().unwrap().0
}

fn c2_node_law() -> Check {
    let pairs = random_pairs(2, 200);
    for (k, (d, i, t, c)) in pairs.iter().enumerate() {
        let tri = standard_triangle(d, *i, t, c).unwrap();
        let out = atf_blowup(d, &tri).unwrap();
        ensure(out.is_valid(), || {
            format!("pair {k}: output invalid: {:?}", out.validate())
        })?;
        ensure(out.nodes.len() == 1, || {
            format!("pair {k}: {} nodes", out.nodes.len())
        })?;
        let n = &out.nodes[0];
        let m = n.monodromy;
        ensure(m.trace() == 2 && m.det() == 1, || {
            format!("pair {k}: trace {} det {}", m.trace(), m.det())
        })?;
        ensure(m.apply(n.eigen_direction) == n.eigen_direction, || {
            format!("pair {k}: eigen direction not fixed")
        })?;
        ensure(m != IMat2([[1, 0], [0, 1]]), || {
            format!("pair {k}: trivial monodromy")
        })?;
        let a = primitive_dir(&n.position, &out.vertices[n.cut_targets.0]);
        let b = primitive_dir(&n.position, &out.vertices[n.cut_targets.1]);
        ensure(m.apply(a) == b, || {
            format!("pair {k}: cut {a:?} maps to {:?}, not {b:?}", m.apply(a))
        })?;
    }
    Ok("200 random nodes: trace 2, det 1, eigenray fixed, cut 1 onto cut 2".into())
}

fn c3_torelli() -> Check {
    let start = Instant::now();
    let reports = run_suite(true)?;
    let elapsed = start.elapsed();
    for (name, _, rep) in &reports {
        ensure(rep.is_valid(), || {
            format!("{name}: failed {:?}", rep.certificate.failed_checks())
        })?;
        let n = rep.map.matrix.len();
        ensure(rep.map.matrix == identity(n), || {
            format!("{name}: map {:?} is not the identity", rep.map.matrix)
        })?;
    }
    ensure(reports.len() >= 30, || {
        format!("only {} scenarios", reports.len())
    })?;
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{} scenarios VALID with identity map in {elapsed:?}",
        reports.len()
    ))
}

fn c4_noncompatible() -> Check {
    let reports = run_suite(false)?;
    for (name, _, rep) in &reports {
        ensure(rep.is_valid(), || {
            format!("{name}: failed {:?}", rep.certificate.failed_checks())
        })?;
        let sym = &rep.symplectic_lattice;
        let n = rep.reduced.len();
        ensure(sym.divisor_classes.len() == n, || {
            format!(
                "{name}: {} divisors for {n} edges",
                sym.divisor_classes.len()
            )
        })?;
        ensure(sym.noncompatible_completion, || {
            format!("{name}: completion flag unset")
        })?;
        ensure(!rep.atf_lattice.noncompatible_completion, || {
            format!("{name}: flag leaked into the almost toric side")
        })?;
        for (j, src) in rep.atf_lattice.divisor_classes.iter().enumerate() {
            if j == rep.reduced_edge {
                continue;
            }
            let image = atf_core::linalg::mat_vec(&rep.map.matrix, &src.coords);
            let dst = sym
                .divisor(&src.label)
                .ok_or_else(|| format!("{name}: no {}", src.label))?;
            ensure(image == dst.coords, || {
                format!("{name}: {} not mapped to its namesake", src.label)
            })?;
        }
    }
    Ok(format!(
        "{} scenarios VALID, n divisors, flag set",
        reports.len()
    ))
}

/// Validity of `g` as an integer matrix, checked from scratch.
fn oracle_valid(s: &LatticeModel, t: &LatticeModel, g: &[Vec<i64>]) -> bool {
    let n = s.rank();
    let apply = |x: &[i64]| -> Vec<i64> {
        (0..n)
            .map(|i| (0..n).map(|j| g[i][j] * x[j]).sum())
            .collect()
    };
    let col = |j: usize| -> Vec<i64> { (0..n).map(|i| g[i][j]).collect() };
    for a in 0..n {
        for b in 0..n {
            if t.pairing(&col(a), &col(b)) != s.gram[a][b] {
                return false;
            }
        }
    }
    let det = if n == 1 {
        g[0][0]
    } else {
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
    };
    if det.abs() != 1 {
        return false;
    }
    let same = |xs: &[atf_core::MarkedClass], ys: &[atf_core::MarkedClass]| {
        xs.len() == ys.len()
            && xs.iter().all(|x| {
                ys.iter()
                    .find(|y| y.label == x.label)
                    .is_some_and(|y| apply(&x.coords) == y.coords)
            })
    };
    if !same(&s.divisor_classes, &t.divisor_classes)
        || !same(&s.exceptional_classes, &t.exceptional_classes)
    {
        return false;
    }
    if apply(&s.c1) != t.c1 {
        return false;
    }
    (0..n).all(|i| {
        let v: Rat = (0..n).map(|j| &s.omega[j] * g[i][j]).sum();
        v == t.omega[i]
    })
}

/// First valid matrix in column-major lexicographic order, no pruning.
fn exhaustive(s: &LatticeModel, t: &LatticeModel, bound: i64) -> Option<Vec<Vec<i64>>> {
    let n = s.rank();
    let side = (2 * bound + 1) as usize;
    let total = side.pow((n * n) as u32);
    for code in 0..total {
        // The most significant digit is row 0 of column 0.
        let mut digits = vec![0i64; n * n];
        let mut rest = code;
        for k in (0..n * n).rev() {
            digits[k] = (rest % side) as i64 - bound;
            rest /= side;
        }
        let g: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| digits[j * n + i]).collect())
            .collect();
        if oracle_valid(s, t, &g) {
            return Some(g);
        }
    }
    None
}

fn c5_oracles() -> Check {
    let mut models: Vec<LatticeModel> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut add = |m: LatticeModel, models: &mut Vec<LatticeModel>| {
        if m.rank() <= 2 && seen.insert(write_lattice(&m)) {
            models.push(m);
        }
    };
    for (_, d) in shapes() {
        add(lattice_from_diagram(&d).unwrap(), &mut models);
    }
    for compatible in [true, false] {
        for (_, _, rep) in run_suite(compatible)? {
            let mut shifted = rep.symplectic_lattice.clone();
            shifted.omega[0] = &shifted.omega[0] + &r(1, 8);
            add(rep.atf_lattice, &mut models);
            add(rep.symplectic_lattice, &mut models);
            add(shifted, &mut models);
        }
    }
    let opts = SearchOptions {
        bound: 3,
        ..SearchOptions::default()
    };
    let (mut pairs, mut positive) = (0, 0);
    for a in &models {
        for b in &models {
            if a.rank() != b.rank() {
                continue;
            }
            pairs += 1;
            let found = search_isometry(a, b, &opts).map_err(|e| e.to_string())?;
            let natural = build_g(a, b)
                .map(|g| verify_isometry(&g).is_valid())
                .unwrap_or(false);
            let oracle = exhaustive(a, b, 3);
            ensure(found.is_some() == natural, || {
                format!("search {} but natural map {}", found.is_some(), natural)
            })?;
            ensure(found.as_ref().map(|c| c.matrix.clone()) == oracle, || {
                format!(
                    "search {:?} vs enumerator {:?}",
                    found.map(|c| c.matrix),
                    oracle
                )
            })?;
            positive += usize::from(natural);
        }
    }
    Ok(format!(
        "{pairs} pairs over {} models agree ({positive} isometric)",
        models.len()
    ))
}

fn c6_functor() -> Check {
    let mut count = 0;
    for (name, s, rep) in run_suite(true)? {
        let tri = s.triangle().unwrap();
        for (label, d, i) in [
            ("ambient", &s.diagram, s.edge_index),
            ("reduced", &rep.reduced, rep.reduced_edge),
        ] {
            let atf = lattice_of_atf_blowup(d, &tri).map_err(|e| format!("{name} {label}: {e}"))?;
            let classes =
                blowup_compatible(&lattice_from_diagram(d).unwrap(), i, &s.capacity).unwrap();
            ensure(atf == classes, || format!("{name} {label}: routes differ"))?;
            count += 1;
        }
    }
    let pairs = random_pairs(6, 100);
    for (k, (d, i, t, c)) in pairs.iter().enumerate() {
        let tri = standard_triangle(d, *i, t, c).unwrap();
        let atf = lattice_of_atf_blowup(d, &tri).map_err(|e| format!("random {k}: {e}"))?;
        let classes = blowup_compatible(&lattice_from_diagram(d).unwrap(), *i, c).unwrap();
        ensure(atf == classes, || format!("random {k}: routes differ"))?;
        count += 1;
    }
    Ok(format!(
        "{count} diagrams: nodal lattice equals class blow-up"
    ))
}

fn c7_round_trips() -> Check {
    let pairs = random_pairs(7, 100);
    for (k, (d, i, t, c)) in pairs.iter().enumerate() {
        let tri = standard_triangle(d, *i, t, c).unwrap();
        let up = atf_blowup(d, &tri).unwrap();
        ensure(atf_blowdown(&up, 0).as_ref() == Ok(d), || {
            format!("pair {k}: blow-down differs")
        })?;
        let m = lattice_from_diagram(d).unwrap();
        let b = blowup_compatible(&m, *i, c).unwrap();
        let e = b.exceptional_classes.last().unwrap().coords.clone();
        ensure(blowdown_lattice(&b, &e).as_ref() == Ok(&m), || {
            format!("pair {k}: lattice blow-down differs")
        })?;
        for diag in [d, &up] {
            let text = write_diagram(diag);
            let back = parse_diagram(&text).map_err(|e| e.to_string())?;
            ensure(&back == diag && write_diagram(&back) == text, || {
                format!("pair {k}: diagram text")
            })?;
        }
        for lat in [&m, &b] {
            let text = write_lattice(lat);
            let back = parse_lattice(&text).map_err(|e| e.to_string())?;
            ensure(&back == lat && write_lattice(&back) == text, || {
                format!("pair {k}: lattice text")
            })?;
        }
    }
    for (name, s, rep) in run_suite(true)? {
        let text = write_scenario(&s);
        let back = parse_scenario(&text).map_err(|e| e.to_string())?;
        ensure(back == s && write_scenario(&back) == text, || {
            format!("{name}: scenario text")
        })?;
        let cert = rep.certificate.to_text();
        let fields = parse_certificate_fields(&cert).map_err(|e| format!("{name}: {e}"))?;
        ensure(
            fields.get("verdict").map(String::as_str) == Some("valid"),
            || format!("{name}: verdict"),
        )?;
        ensure(
            run(&s).unwrap().canonical_text() == rep.canonical_text(),
            || format!("{name}: report unstable"),
        )?;
    }
    Ok("diagram, lattice, scenario and certificate round trips exact".into())
}

fn c8_log_cy() -> Check {
    let mut count = 0;
    let mut check = |what: &str, m: &LatticeModel| -> Result<(), String> {
        count += 1;
        ensure(verify_log_cy(m), || format!("{what}: not log Calabi-Yau"))
    };
    for (name, d) in shapes() {
        let m = lattice_from_diagram(&d).unwrap();
        check(name, &m)?;
        for i in 0..d.len() {
            let b = blowup_compatible(&m, i, &r(1, 2)).unwrap();
            check(name, &b)?;
            check(name, &blowup_noncompatible(&m, i, &r(1, 2)).unwrap())?;
            let twice = blowup_compatible(&b, (i + 1) % d.len(), &r(1, 4)).unwrap();
            check(name, &twice)?;
            let e = b.exceptional_classes[0].coords.clone();
            check(name, &blowdown_lattice(&b, &e).unwrap())?;
        }
    }
    for compatible in [true, false] {
        for (name, _, rep) in run_suite(compatible)? {
            check(&name, &lattice_from_diagram(&rep.reduced).unwrap())?;
            check(&name, &rep.atf_lattice)?;
            check(&name, &rep.symplectic_lattice)?;
            check(&name, &lattice_of_atf_diagram(&rep.ambient_atf).unwrap())?;
        }
    }
    for (k, (d, i, t, c)) in random_pairs(8, 50).iter().enumerate() {
        let tri = standard_triangle(d, *i, t, c).unwrap();
        check(&format!("random {k}"), &lattice_from_diagram(d).unwrap())?;
        check(
            &format!("random {k}"),
            &lattice_of_atf_blowup(d, &tri).unwrap(),
        )?;
    }
    Ok(format!(
        "{count} lattice models satisfy c1 = sum of divisors with positive areas"
    ))
}

fn inside(p: &ConvexRegion, pts: &[&Point]) -> bool {
    convex_contains(
        &p.vertices,
        &pts.iter().map(|&q| q.clone()).collect::<Vec<_>>(),
    )
}

fn c9_locality() -> Check {
    let mut count = 0;
    for compatible in [true, false] {
        for (name, s, rep) in run_suite(compatible)? {
            let (before, after, p) = (&s.diagram, &rep.ambient_atf, &rep.subpolygon);
            ensure(locality_diff(before, after).within(p), || {
                format!("{name}: change outside P")
            })?;
            // Original vertices outside P survive in their cyclic order.
            let kept: Vec<&Point> = before
                .vertices
                .iter()
                .filter(|v| !inside(p, &[v]))
                .collect();
            let order: Vec<usize> = kept
                .iter()
                .map(|v| after.vertices.iter().position(|w| w == *v))
                .collect::<Option<_>>()
                .ok_or_else(|| format!("{name}: a vertex outside P vanished"))?;
            let rises = order.windows(2).filter(|w| w[0] > w[1]).count();
            ensure(rises <= 1, || format!("{name}: vertex order changed"))?;
            // Every edge leaving P is a piece of an original edge with its mark.
            for j in 0..after.len() {
                let (a, b) = after.edge(j);
                if inside(p, &[a, b]) {
                    continue;
                }
                let ok = (0..before.len()).any(|k| {
                    let (c, e) = before.edge(k);
                    on_segment(a, c, e)
                        && on_segment(b, c, e)
                        && before.edge_marks[k] == after.edge_marks[j]
                });
                ensure(ok, || format!("{name}: edge {j} outside P is new"))?;
            }
            count += 1;
        }
    }
    Ok(format!("{count} ambient blow-ups unchanged outside P"))
}

fn c10_render() -> Check {
    let d = BaseDiagram::simplex(Rat::int(3));
    let tri = standard_triangle(&d, 0, &Rat::one(), &Rat::one()).unwrap();
    let up = atf_blowup(&d, &tri).unwrap();
    let first = render_svg(&up, &RenderStyle::default()).map_err(|e| e.to_string())?;
    let second = render_svg(&up, &RenderStyle::default()).map_err(|e| e.to_string())?;
    let solid = first.matches("class=\"edge").count();
    let dashed = first.matches("stroke-dasharray").count();
    let crosses = first.matches("class=\"node cross\"").count();
    ensure((solid, dashed, crosses) == (4, 2, 1), || {
        format!("{solid} solid, {dashed} dashed, {crosses} crosses")
    })?;
    ensure(first == second, || "two renders differ".into())?;
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/simplex_blowup.svg");
    let golden = std::fs::read_to_string(&golden_path)
        .map_err(|e| format!("{}: {e}", golden_path.display()))?;
    ensure(golden == first, || {
        "render differs from the golden file".into()
    })?;
    Ok("4 solid, 2 dashed, 1 cross; matches golden file".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("area bookkeeping", c1_area),
        ("node law", c2_node_law),
        ("torelli reproduction", c3_torelli),
        ("non-compatible balls", c4_noncompatible),
        ("oracle agreement", c5_oracles),
        ("functor identity", c6_functor),
        ("round trips", c7_round_trips),
        ("log Calabi-Yau preservation", c8_log_cy),
        ("locality", c9_locality),
        ("rendering", c10_render),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
