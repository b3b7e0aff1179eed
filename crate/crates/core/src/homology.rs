//! Intersection lattices of the surfaces behind toric and almost toric
//! diagrams, with marked boundary divisors, exceptional classes, the
//! symplectic class and the first Chern class.
//!
//! Classes are integer coordinate vectors in a fixed basis of `H_2`. The
//! symplectic class `omega` is stored as a rational vector in the same
//! basis and paired through the Gram matrix, so the area of a class `x` is
//! `omega^T G x`.

use crate::affine::{IMat2, LatVec};
use crate::diagram::{fan_coefficient, BaseDiagram, EdgeMark};
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};
use crate::rational::Rat;
use crate::surgery::{atf_blowup, Triangle};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MarkedClass {
    pub label: String,
    pub coords: Vec<i64>,
}

impl MarkedClass {
    pub fn new(label: impl Into<String>, coords: Vec<i64>) -> MarkedClass {
        MarkedClass {
            label: label.into(),
            coords,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeModel {
    pub gram: IntMatrix,
    /// Boundary divisor components in cyclic order.
    pub divisor_classes: Vec<MarkedClass>,
    pub exceptional_classes: Vec<MarkedClass>,
    pub omega: Vec<Rat>,
    pub c1: Vec<i64>,
    /// Set when the last blow-up completed a non-compatible ball.
    pub noncompatible_completion: bool,
}

impl LatticeModel {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn pairing(&self, x: &[i64], y: &[i64]) -> i64 {
        linalg::bilinear(&self.gram, x, y)
    }

    /// Symplectic area `<omega, x>`.
    pub fn area(&self, x: &[i64]) -> Rat {
        let gx = linalg::mat_vec(&self.gram, x);
        self.omega.iter().zip(gx).map(|(w, g)| w * g).sum()
    }

    pub fn divisor(&self, label: &str) -> Option<&MarkedClass> {
        self.divisor_classes.iter().find(|c| c.label == label)
    }

    pub fn exceptional(&self, label: &str) -> Option<&MarkedClass> {
        self.exceptional_classes.iter().find(|c| c.label == label)
    }

    /// Dimensions agree, the Gram matrix is symmetric and unimodular.
    pub fn check(&self) -> Result<()> {
        let n = self.rank();
        if self.gram.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("gram matrix is not square".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if self.gram[i][j] != self.gram[j][i] {
                    return Err(Error::Inconsistent("gram matrix is not symmetric".into()));
                }
            }
        }
        if linalg::det(&self.gram).abs() != 1 {
            return Err(Error::Inconsistent(
                "intersection form is not unimodular".into(),
            ));
        }
        let bad = self
            .divisor_classes
            .iter()
            .chain(&self.exceptional_classes)
            .any(|c| c.coords.len() != n);
        if bad || self.omega.len() != n || self.c1.len() != n {
            return Err(Error::Dimension(format!(
                "classes must have {n} coordinates"
            )));
        }
        Ok(())
    }
}

/// Whether `c1` is the sum of the boundary divisors, i.e. the boundary is
/// anticanonical, and every listed class has positive area.
pub fn verify_log_cy(m: &LatticeModel) -> bool {
    let n = m.rank();
    if m.omega.len() != n || m.gram.iter().any(|r| r.len() != n) {
        return false;
    }
    let positive = m
        .divisor_classes
        .iter()
        .chain(&m.exceptional_classes)
        .all(|c| c.coords.len() == n && m.area(&c.coords).is_positive());
    if !positive {
        return false;
    }
    let mut sum = vec![0i64; n];
    for d in &m.divisor_classes {
        if d.coords.len() != n {
            return false;
        }
        for (s, x) in sum.iter_mut().zip(&d.coords) {
            *s += x;
        }
    }
    sum == m.c1
}

fn unit(n: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

/// Coordinates of the first two divisors from the linear relations
/// `sum_j <m, u_j> D_j = 0`, given the remaining ones.
fn first_two_divisors(normals: &[LatVec], rest: &[Vec<i64>]) -> Result<(Vec<i64>, Vec<i64>)> {
    let u = IMat2::from_columns(normals[0], normals[1]);
    let inv = u.inverse().map_err(|_| Error::NotDelzant(1))?;
    let r = rest.first().map_or(0, Vec::len);
    let mut d0 = vec![0i64; r];
    let mut d1 = vec![0i64; r];
    for (uj, dj) in normals[2..].iter().zip(rest) {
        let ab = inv.apply(-*uj);
        for k in 0..r {
            d0[k] += ab.x * dj[k];
            d1[k] += ab.y * dj[k];
        }
    }
    Ok((d0, d1))
}

/// Solves `G omega = target` and checks the result is consistent with the
/// remaining area conditions.
fn solve_omega(gram: &IntMatrix, target: &[Rat], checks: &[(&[i64], Rat)]) -> Result<Vec<Rat>> {
    let omega = linalg::solve(&linalg::to_rat(gram), target)
        .ok_or_else(|| Error::Inconsistent("intersection form is singular".into()))?;
    for (x, area) in checks {
        let gx = linalg::mat_vec(gram, x);
        let got: Rat = omega.iter().zip(gx).map(|(w, g)| w * g).sum();
        if &got != area {
            return Err(Error::Inconsistent("areas do not determine a class".into()));
        }
    }
    Ok(omega)
}

fn cyclically_adjacent(a: usize, b: usize, n: usize) -> bool {
    a != b && ((a + 1) % n == b || (b + 1) % n == a)
}

/// The intersection lattice of the smooth toric surface of a node-free
/// Delzant diagram.
///
/// The basis is `D_2, ..., D_{n-1}`; `D_0` and `D_1` follow from the linear
/// relations among the divisors. Areas of divisors are the lattice lengths
/// of their edges.
pub fn lattice_from_diagram(d: &BaseDiagram) -> Result<LatticeModel> {
    if !d.nodes.is_empty() || d.edge_marks.contains(&EdgeMark::Branch) {
        return Err(Error::HasNodes);
    }
    let a = d.self_intersections()?;
    let n = d.len();
    let r = n - 2;
    let normals = (0..n)
        .map(|j| d.inward_normal(j))
        .collect::<Result<Vec<_>>>()?;
    let lengths = (0..n)
        .map(|j| d.edge_lattice_length(j))
        .collect::<Result<Vec<_>>>()?;
    let rest: Vec<Vec<i64>> = (0..r).map(|k| unit(r, k)).collect();
    let (d0, d1) = first_two_divisors(&normals, &rest)?;
    let mut divisors = vec![d0, d1];
    divisors.extend(rest);
    let gram: IntMatrix = (0..r)
        .map(|p| {
            (0..r)
                .map(|q| {
                    if p == q {
                        a[p + 2]
                    } else {
                        i64::from(cyclically_adjacent(p + 2, q + 2, n))
                    }
                })
                .collect()
        })
        .collect();
    check_divisor_form(&gram, &divisors, &a)?;
    let checks = [
        (&divisors[0][..], lengths[0].clone()),
        (&divisors[1][..], lengths[1].clone()),
    ];
    let omega = solve_omega(&gram, &lengths[2..], &checks)?;
    finish(gram, divisors, Vec::new(), omega)
}

/// The divisors must pair as a cycle of spheres with the given
/// self-intersections.
fn check_divisor_form(gram: &IntMatrix, divisors: &[Vec<i64>], a: &[i64]) -> Result<()> {
    let n = divisors.len();
    for j in 0..n {
        for k in 0..n {
            let want = if j == k {
                a[j]
            } else {
                i64::from(cyclically_adjacent(j, k, n))
            };
            if linalg::bilinear(gram, &divisors[j], &divisors[k]) != want {
                return Err(Error::Inconsistent(format!(
                    "divisors {j} and {k} do not pair as a cycle"
                )));
            }
        }
    }
    Ok(())
}

fn finish(
    gram: IntMatrix,
    divisors: Vec<Vec<i64>>,
    exceptionals: Vec<Vec<i64>>,
    omega: Vec<Rat>,
) -> Result<LatticeModel> {
    let r = gram.len();
    let mut c1 = vec![0i64; r];
    for dv in &divisors {
        for (s, x) in c1.iter_mut().zip(dv) {
            *s += x;
        }
    }
    let m = LatticeModel {
        gram,
        divisor_classes: divisors
            .into_iter()
            .enumerate()
            .map(|(j, c)| MarkedClass::new(format!("D{j}"), c))
            .collect(),
        exceptional_classes: exceptionals
            .into_iter()
            .enumerate()
            .map(|(k, c)| MarkedClass::new(format!("E{}", k + 1), c))
            .collect(),
        omega,
        c1,
        noncompatible_completion: false,
    };
    m.check()?;
    Ok(m)
}

/// Blow-up of a ball of capacity `c` meeting divisor `i` compatibly: adds
/// an exceptional class `E` with `E.E = -1`, `<omega, E> = c`, replaces
/// `D_i` by its proper transform `D_i - E` and `c1` by `c1 - E`.
pub fn blowup_compatible(m: &LatticeModel, i: usize, c: &Rat) -> Result<LatticeModel> {
    if !c.is_positive() {
        return Err(Error::NonPositiveCapacity);
    }
    let di = m.divisor_classes.get(i).ok_or(Error::IndexOutOfRange {
        index: i,
        len: m.divisor_classes.len(),
    })?;
    if &m.area(&di.coords) <= c {
        return Err(Error::NonPositiveArea);
    }
    let r = m.rank();
    let extend = |v: &[i64]| {
        let mut w = v.to_vec();
        w.push(0);
        w
    };
    let mut gram: IntMatrix = m.gram.iter().map(|row| extend(row)).collect();
    let mut last = vec![0i64; r + 1];
    last[r] = -1;
    gram.push(last);
    let mut divisor_classes: Vec<MarkedClass> = m
        .divisor_classes
        .iter()
        .map(|d| MarkedClass::new(d.label.clone(), extend(&d.coords)))
        .collect();
    divisor_classes[i].coords[r] = -1;
    let mut exceptional_classes: Vec<MarkedClass> = m
        .exceptional_classes
        .iter()
        .map(|e| MarkedClass::new(e.label.clone(), extend(&e.coords)))
        .collect();
    let label = next_exceptional_label(m);
    exceptional_classes.push(MarkedClass::new(label, unit(r + 1, r)));
    let mut omega = m.omega.clone();
    omega.push(-c);
    let mut c1 = extend(&m.c1);
    c1[r] = -1;
    let out = LatticeModel {
        gram,
        divisor_classes,
        exceptional_classes,
        omega,
        c1,
        noncompatible_completion: false,
    };
    out.check()?;
    Ok(out)
}

fn next_exceptional_label(m: &LatticeModel) -> String {
    let mut k = m.exceptional_classes.len() + 1;
    while m.exceptional(&format!("E{k}")).is_some() {
        k += 1;
    }
    format!("E{k}")
}

/// Blow-up of a ball that is not compatible with the divisor, followed by
/// the completion that restores an anticanonical boundary with the same
/// number of components. The classes agree with [`blowup_compatible`];
/// the model records the completion.
pub fn blowup_noncompatible(m: &LatticeModel, i: usize, c: &Rat) -> Result<LatticeModel> {
    let mut out = blowup_compatible(m, i, c)?;
    out.noncompatible_completion = true;
    Ok(out)
}

/// Contracts the exceptional class `s`: the result is the lattice `s^perp`
/// with every class projected by `v -> v + (v.s) s`.
pub fn blowdown_lattice(m: &LatticeModel, s: &[i64]) -> Result<LatticeModel> {
    let r = m.rank();
    if s.len() != r {
        return Err(Error::Dimension(format!(
            "class has {} coordinates, expected {r}",
            s.len()
        )));
    }
    if m.pairing(s, s) != -1 || m.pairing(s, &m.c1) != 1 || !m.area(s).is_positive() {
        return Err(Error::NotExceptional);
    }
    if m.divisor_classes
        .iter()
        .any(|d| !matches!(m.pairing(&d.coords, s), 0 | 1))
    {
        return Err(Error::DivisorNotCompatible);
    }
    let project = |v: &[i64]| -> Vec<i64> {
        let k = m.pairing(v, s);
        v.iter().zip(s).map(|(a, b)| a + k * b).collect()
    };
    let basis = complement_basis(m, s, &project)?;
    // Columns of `b` are the new basis vectors in old coordinates.
    let b = linalg::transpose(&basis);
    let coords = |v: &[i64]| -> Result<Vec<i64>> {
        let p = project(v);
        least_squares_integral(&b, &p)
            .ok_or_else(|| Error::Inconsistent("projected class not in the complement".into()))
    };
    let gram = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&b), &m.gram), &b);
    let mut divisor_classes = Vec::new();
    for d in &m.divisor_classes {
        divisor_classes.push(MarkedClass::new(d.label.clone(), coords(&d.coords)?));
    }
    let mut exceptional_classes = Vec::new();
    for e in &m.exceptional_classes {
        if e.coords == s {
            continue;
        }
        exceptional_classes.push(MarkedClass::new(e.label.clone(), coords(&e.coords)?));
    }
    let c1 = coords(&m.c1)?;
    // omega: areas on the new basis determine it.
    let targets: Vec<Rat> = basis.iter().map(|v| m.area(v)).collect();
    let omega = linalg::solve(&linalg::to_rat(&gram), &targets)
        .ok_or_else(|| Error::Inconsistent("complement form is singular".into()))?;
    let out = LatticeModel {
        gram,
        divisor_classes,
        exceptional_classes,
        omega,
        c1,
        noncompatible_completion: false,
    };
    out.check()?;
    Ok(out)
}

/// A basis of `s^perp`, as rows in old coordinates.
fn complement_basis(
    m: &LatticeModel,
    s: &[i64],
    project: &dyn Fn(&[i64]) -> Vec<i64>,
) -> Result<Vec<Vec<i64>>> {
    let r = m.rank();
    if let Some(k) = (0..r).rev().find(|&k| s[k].abs() == 1) {
        return Ok((0..r)
            .filter(|&j| j != k)
            .map(|j| project(&unit(r, j)))
            .collect());
    }
    // Reduce the spanning set of projected unit vectors to a basis.
    let rows: Vec<Vec<i64>> = (0..r).map(|j| project(&unit(r, j))).collect();
    let basis = row_basis(rows);
    if basis.len() + 1 != r {
        return Err(Error::Inconsistent("complement has the wrong rank".into()));
    }
    Ok(basis)
}

/// Integer row echelon reduction by Euclidean steps; returns the non-zero
/// rows, which span the same lattice.
fn row_basis(mut rows: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut top = 0;
    for col in 0..cols {
        loop {
            let nz: Vec<usize> = (top..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                if let Some(&i) = nz.first() {
                    rows.swap(top, i);
                    top += 1;
                }
                break;
            }
            let p = *nz
                .iter()
                .min_by_key(|&&i| rows[i][col].abs())
                .expect("non-empty");
            rows.swap(top, p);
            for i in top + 1..rows.len() {
                let q = rows[i][col] / rows[top][col];
                if q != 0 {
                    for j in 0..cols {
                        rows[i][j] -= q * rows[top][j];
                    }
                }
            }
        }
    }
    rows.truncate(top);
    rows
}

/// Integral `y` with `b y = p` for a full column rank `b`.
fn least_squares_integral(b: &IntMatrix, p: &[i64]) -> Option<Vec<i64>> {
    let bt = linalg::transpose(b);
    let normal = linalg::mat_mul(&bt, b);
    let rhs = linalg::mat_vec(&bt, p);
    let y = linalg::solve_integral(&normal, &rhs)?;
    (linalg::mat_vec(b, &y) == p).then_some(y)
}

struct Component {
    direction: LatVec,
    area: Rat,
    wedges: Vec<usize>,
}

/// The lattice of `atf_blowup(d, tri)`, computed from the blown-up diagram
/// by [`lattice_of_atf_diagram`].
pub fn lattice_of_atf_blowup(d: &BaseDiagram, tri: &Triangle) -> Result<LatticeModel> {
    lattice_of_atf_diagram(&atf_blowup(d, tri)?)
}

/// The lattice of an almost toric diagram whose nodes all sit at the apex
/// of a wedge cut from a boundary edge.
///
/// This works from the diagram itself: boundary components are collected
/// across wedges, their areas summed over the pieces, and their
/// self-intersections read off the fan relation after transporting the
/// next component through the node monodromies. Each wedge carries an
/// exceptional class of area its size. The basis is the total transforms
/// of `D_2, ..., D_{n-1}` followed by the exceptional classes in node
/// order.
pub fn lattice_of_atf_diagram(d: &BaseDiagram) -> Result<LatticeModel> {
    let comps = components(d)?;
    let n = comps.len();
    if n < 3 {
        return Err(Error::NotToric(
            "fewer than three boundary components".into(),
        ));
    }
    let normals: Vec<LatVec> = comps.iter().map(|c| c.direction.rot90()).collect();
    let mut a_prime = Vec::with_capacity(n);
    for k in 0..n {
        let mut next = comps[(k + 1) % n].direction;
        for &w in &comps[k].wedges {
            next = d.nodes[w].monodromy.inverse()?.apply(next);
        }
        let sum = normals[(k + n - 1) % n] + next.rot90();
        a_prime.push(fan_coefficient(sum, normals[k]).ok_or(Error::NotDelzant(k))?);
    }
    let wedge_count = d.nodes.len();
    let owner: Vec<usize> = (0..wedge_count)
        .map(|w| {
            comps
                .iter()
                .position(|c| c.wedges.contains(&w))
                .expect("wedge owner")
        })
        .collect();
    let sizes: Vec<Rat> = (0..wedge_count)
        .map(|w| wedge_size(d, w))
        .collect::<Result<_>>()?;
    let base = n - 2;
    let r = base + wedge_count;

    let mut gram = vec![vec![0i64; r]; r];
    for p in 0..base {
        for q in 0..base {
            let (j, k) = (p + 2, q + 2);
            gram[p][q] = if j == k {
                a_prime[j] + comps[j].wedges.len() as i64
            } else {
                i64::from(cyclically_adjacent(j, k, n))
            };
        }
    }
    for w in 0..wedge_count {
        gram[base + w][base + w] = -1;
    }

    let totals: Vec<Vec<i64>> = (0..base).map(|p| unit(r, p)).collect();
    let (t0, t1) = first_two_divisors(&normals, &totals)?;
    let mut divisors = vec![t0, t1];
    divisors.extend(totals);
    for (w, &k) in owner.iter().enumerate() {
        divisors[k][base + w] -= 1;
    }
    check_divisor_form(&gram, &divisors, &a_prime)?;

    let mut target: Vec<Rat> = (0..base)
        .map(|p| {
            let k = p + 2;
            let mut t = comps[k].area.clone();
            for &w in &comps[k].wedges {
                t += &sizes[w];
            }
            t
        })
        .collect();
    target.extend(sizes.iter().cloned());
    let checks = [
        (&divisors[0][..], comps[0].area.clone()),
        (&divisors[1][..], comps[1].area.clone()),
    ];
    let omega = solve_omega(&gram, &target, &checks)?;
    for (w, s) in sizes.iter().enumerate() {
        let e = unit(r, base + w);
        let gx = linalg::mat_vec(&gram, &e);
        let area: Rat = omega.iter().zip(gx).map(|(o, g)| o * g).sum();
        if &area != s {
            return Err(Error::Inconsistent("exceptional area mismatch".into()));
        }
    }
    let exceptionals = (0..wedge_count).map(|w| unit(r, base + w)).collect();
    finish(gram, divisors, exceptionals, omega)
}

fn wedge_size(d: &BaseDiagram, w: usize) -> Result<Rat> {
    let (t1, t2) = d.nodes[w].cut_targets;
    Ok((&d.vertices[t2] - &d.vertices[t1]).primitive_direction()?.1)
}

/// Boundary components of a diagram with apex-wedge nodes, starting at the
/// edge leaving vertex 0.
fn components(d: &BaseDiagram) -> Result<Vec<Component>> {
    let n = d.len();
    if d.edge_marks.len() != n || n < 3 {
        return Err(Error::NotToric("malformed boundary".into()));
    }
    if d.edge_marks[0] == EdgeMark::Branch || d.edge_marks[n - 1] == EdgeMark::Branch {
        return Err(Error::Inconsistent(
            "walk must start away from a wedge".into(),
        ));
    }
    let mut comps: Vec<Component> = Vec::new();
    let mut after_wedge = false;
    let mut j = 0;
    while j < n {
        let mark = d.edge_marks[j];
        if mark == EdgeMark::Branch {
            let node = d
                .apex_node_at(j + 1)
                .filter(|_| j + 1 < n && d.edge_marks[j + 1] == EdgeMark::Branch)
                .ok_or_else(|| Error::NotToric(format!("branch edge {j} without an apex node")))?;
            comps
                .last_mut()
                .ok_or_else(|| Error::Inconsistent("wedge before any component".into()))?
                .wedges
                .push(node);
            after_wedge = true;
            j += 2;
            continue;
        }
        if !mark.is_divisor() {
            return Err(Error::NotToric(format!(
                "edge {j} is not a boundary divisor"
            )));
        }
        let (dir, len) = d.edge_vector(j).primitive_direction()?;
        match comps.last_mut() {
            Some(c) if after_wedge && c.direction == dir => c.area += &len,
            _ => {
                if after_wedge {
                    return Err(Error::NotToric("wedge does not sit inside one edge".into()));
                }
                comps.push(Component {
                    direction: dir,
                    area: len,
                    wedges: Vec::new(),
                })
            }
        }
        after_wedge = false;
        j += 1;
    }
    // The Delzant condition at corners between components.
    for k in 0..comps.len() {
        let a = comps[k].direction;
        let b = comps[(k + 1) % comps.len()].direction;
        if a.cross(b) != 1 {
            return Err(Error::NotDelzant(k));
        }
    }
    Ok(comps)
}
