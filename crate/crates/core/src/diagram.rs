//! Base diagrams of almost toric fibrations.
//!
//! A diagram stores the drawn region: a counterclockwise boundary walk whose
//! edges carry an [`EdgeMark`], plus the nodes. A node created by a nodal
//! blow-up sits at the apex of a removed triangle; the two walk edges leaving
//! the apex are its branch cuts and are marked [`EdgeMark::Branch`]. The
//! region is never re-glued; the gluing is recorded by the node monodromy.

use std::fmt;

use crate::affine::{is_unimodular_pair, solve2, AffineMap, IMat2, LatVec, Point};
use crate::error::{Error, Result};
use crate::geometry::{self, Location};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeMark {
    /// Original boundary of the base.
    Heavy,
    /// Edge created by symplectic reduction along an interior chord.
    Collapsed,
    /// Edge of a fragment whose preimage is open (not part of the boundary).
    CutBoundary,
    /// One side of a branch cut wedge at a node.
    Branch,
}

impl EdgeMark {
    pub fn token(self) -> &'static str {
        match self {
            EdgeMark::Heavy => "heavy",
            EdgeMark::Collapsed => "collapsed",
            EdgeMark::CutBoundary => "cut",
            EdgeMark::Branch => "branch",
        }
    }

    pub fn from_token(s: &str) -> Option<EdgeMark> {
        Some(match s {
            "heavy" => EdgeMark::Heavy,
            "collapsed" => EdgeMark::Collapsed,
            "cut" => EdgeMark::CutBoundary,
            "branch" => EdgeMark::Branch,
            _ => return None,
        })
    }

    /// Edges that represent boundary divisor components.
    pub fn is_divisor(self) -> bool {
        matches!(self, EdgeMark::Heavy | EdgeMark::Collapsed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub position: Point,
    pub eigen_direction: LatVec,
    pub monodromy: IMat2,
    /// Vertex indices the two branch cuts run to. The monodromy carries the
    /// direction towards the first onto the direction towards the second.
    pub cut_targets: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BaseDiagram {
    pub vertices: Vec<Point>,
    pub edge_marks: Vec<EdgeMark>,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    TooFewVertices,
    MarkCount,
    ZeroLengthEdge,
    SelfIntersection,
    Orientation,
    NotConvex,
    EigenNotPrimitive,
    Monodromy,
    EigenNotFixed,
    CutTarget,
    CutMismatch,
    NodePosition,
    CutOutside,
    BranchUnattached,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn violation(kind: ViolationKind, index: usize, message: String) -> Violation {
    Violation {
        kind,
        index,
        message,
    }
}

impl BaseDiagram {
    pub fn new(vertices: Vec<Point>, edge_marks: Vec<EdgeMark>, nodes: Vec<Node>) -> BaseDiagram {
        BaseDiagram {
            vertices,
            edge_marks,
            nodes,
        }
    }

    /// A node-free polygon with every edge heavy.
    pub fn polygon(vertices: Vec<Point>) -> BaseDiagram {
        let n = vertices.len();
        BaseDiagram::new(vertices, vec![EdgeMark::Heavy; n], Vec::new())
    }

    /// `conv{(0,0), (side,0), (0,side)}`.
    pub fn simplex(side: Rat) -> BaseDiagram {
        BaseDiagram::polygon(vec![
            Point::origin(),
            Point::new(side.clone(), Rat::zero()),
            Point::new(Rat::zero(), side),
        ])
    }

    pub fn rectangle(width: Rat, height: Rat) -> BaseDiagram {
        BaseDiagram::polygon(vec![
            Point::origin(),
            Point::new(width.clone(), Rat::zero()),
            Point::new(width, height.clone()),
            Point::new(Rat::zero(), height),
        ])
    }

    /// The Hirzebruch trapezoid `{0 <= y <= h, 0 <= x <= w - k y}`; needs
    /// `w > k h`.
    pub fn hirzebruch(k: i64, width: Rat, height: Rat) -> BaseDiagram {
        BaseDiagram::polygon(vec![
            Point::origin(),
            Point::new(width.clone(), Rat::zero()),
            Point::new(&width - &(&height * k), height.clone()),
            Point::new(Rat::zero(), height),
        ])
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn check_edge(&self, j: usize) -> Result<()> {
        if j >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.len(),
            });
        }
        Ok(())
    }

    pub fn edge(&self, j: usize) -> (&Point, &Point) {
        let n = self.len();
        (&self.vertices[j % n], &self.vertices[(j + 1) % n])
    }

    pub fn edge_vector(&self, j: usize) -> Point {
        let (a, b) = self.edge(j);
        b - a
    }

    /// Primitive direction of edge `j` along the boundary walk.
    pub fn edge_direction(&self, j: usize) -> Result<LatVec> {
        self.check_edge(j)?;
        Ok(self.edge_vector(j).primitive_direction()?.0)
    }

    pub fn edge_lattice_length(&self, j: usize) -> Result<Rat> {
        self.check_edge(j)?;
        Ok(self.edge_vector(j).primitive_direction()?.1)
    }

    pub fn prev(&self, j: usize) -> usize {
        (j + self.len() - 1) % self.len()
    }

    pub fn next(&self, j: usize) -> usize {
        (j + 1) % self.len()
    }

    /// Whether vertex `v` touches a branch cut edge.
    pub fn vertex_on_cut(&self, v: usize) -> bool {
        self.edge_marks[v] == EdgeMark::Branch || self.edge_marks[self.prev(v)] == EdgeMark::Branch
    }

    /// The node sitting on vertex `v` as a cut apex, if any.
    pub fn apex_node_at(&self, v: usize) -> Option<usize> {
        self.nodes
            .iter()
            .position(|node| self.node_is_apex(node) == Some(v))
    }

    fn node_is_apex(&self, node: &Node) -> Option<usize> {
        let v = self.vertices.iter().position(|p| *p == node.position)?;
        let n = self.len();
        let around = [(v + n - 1) % n, (v + 1) % n];
        let targets = [node.cut_targets.0, node.cut_targets.1];
        let sorted_eq = (targets == around) || (targets == [around[1], around[0]]);
        (sorted_eq
            && self.edge_marks[self.prev(v)] == EdgeMark::Branch
            && self.edge_marks[v] == EdgeMark::Branch)
            .then_some(v)
    }

    pub fn validate(&self) -> Vec<Violation> {
        use ViolationKind::*;
        let mut out = Vec::new();
        let n = self.len();
        if n < 3 {
            out.push(violation(
                TooFewVertices,
                0,
                format!("diagram needs at least 3 vertices, has {n}"),
            ));
            return out;
        }
        if self.edge_marks.len() != n {
            out.push(violation(
                MarkCount,
                self.edge_marks.len(),
                format!("{} edge marks for {} edges", self.edge_marks.len(), n),
            ));
            return out;
        }
        let mut degenerate = false;
        for j in 0..n {
            let (a, b) = self.edge(j);
            if a == b {
                out.push(violation(
                    ZeroLengthEdge,
                    j,
                    format!("edge {j} has zero length"),
                ));
                degenerate = true;
            } else if self.edge_vector(j).primitive_direction().is_err() {
                out.push(violation(
                    ZeroLengthEdge,
                    j,
                    format!("edge {j} direction overflows lattice coordinates"),
                ));
                degenerate = true;
            }
        }
        if degenerate {
            return out;
        }
        if let Some((i, j)) = geometry::self_intersection(&self.vertices) {
            out.push(violation(
                SelfIntersection,
                i,
                format!("edges {i} and {j} intersect"),
            ));
            return out;
        }
        if !geometry::signed_area2(&self.vertices).is_positive() {
            out.push(violation(
                Orientation,
                0,
                "boundary walk is not counterclockwise".to_string(),
            ));
        }
        let plain = self.nodes.is_empty()
            && self
                .edge_marks
                .iter()
                .all(|m| matches!(m, EdgeMark::Heavy | EdgeMark::Collapsed));
        if plain {
            for k in 0..n {
                let o = geometry::orient(
                    &self.vertices[self.prev(k)],
                    &self.vertices[k],
                    &self.vertices[self.next(k)],
                );
                if o < 0 {
                    out.push(violation(
                        NotConvex,
                        k,
                        format!("polygon not convex at vertex {k}"),
                    ));
                }
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            self.validate_node(i, node, &mut out);
        }
        for j in 0..n {
            if self.edge_marks[j] != EdgeMark::Branch {
                continue;
            }
            let attached = [j, self.next(j)]
                .iter()
                .any(|&v| self.apex_node_at(v).is_some());
            if !attached {
                out.push(violation(
                    BranchUnattached,
                    j,
                    format!("branch edge {j} not attached to a node apex"),
                ));
            }
        }
        out
    }

    fn validate_node(&self, i: usize, node: &Node, out: &mut Vec<Violation>) {
        use ViolationKind::*;
        let n = self.len();
        if !node.eigen_direction.is_primitive() {
            out.push(violation(
                EigenNotPrimitive,
                i,
                format!("eigen direction not primitive at node {i}"),
            ));
        }
        if !node.monodromy.is_standard_shear_conjugate() {
            out.push(violation(
                Monodromy,
                i,
                format!("monodromy not conjugate to standard shear at node {i}"),
            ));
        } else if node.monodromy.apply(node.eigen_direction) != node.eigen_direction {
            out.push(violation(
                EigenNotFixed,
                i,
                format!("monodromy does not fix eigen direction at node {i}"),
            ));
        }
        let (t1, t2) = node.cut_targets;
        if t1 >= n || t2 >= n || t1 == t2 {
            out.push(violation(
                CutTarget,
                i,
                format!("cut targets ({t1}, {t2}) invalid at node {i}"),
            ));
            return;
        }
        let d1 = (&self.vertices[t1] - &node.position).primitive_direction();
        let d2 = (&self.vertices[t2] - &node.position).primitive_direction();
        match (d1, d2) {
            (Ok((d1, _)), Ok((d2, _))) => {
                if node.monodromy.apply(d1) != d2 {
                    out.push(violation(
                        CutMismatch,
                        i,
                        format!("monodromy does not carry first cut to second at node {i}"),
                    ));
                }
            }
            _ => {
                out.push(violation(
                    CutTarget,
                    i,
                    format!("cut target coincides with node {i}"),
                ));
                return;
            }
        }
        if self.node_is_apex(node).is_some() {
            return;
        }
        if geometry::locate(&node.position, &self.vertices) != Location::Inside {
            out.push(violation(
                NodePosition,
                i,
                format!("node {i} neither interior nor at a cut apex"),
            ));
            return;
        }
        for t in [t1, t2] {
            if !geometry::contains_polygon(
                &self.vertices,
                &[node.position.clone(), self.vertices[t].clone()],
            ) {
                out.push(violation(
                    CutOutside,
                    i,
                    format!("cut from node {i} to vertex {t} leaves the region"),
                ));
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Whether the primitive directions at every vertex not touching a cut
    /// form a basis of `Z^2`.
    pub fn delzant_check(&self) -> bool {
        self.non_delzant_vertex().is_none()
    }

    /// First vertex (away from cuts) failing the Delzant condition.
    pub fn non_delzant_vertex(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&k| {
            if self.vertex_on_cut(k) {
                return false;
            }
            let out = self.edge_direction(k);
            let back = (&self.vertices[self.prev(k)] - &self.vertices[k]).primitive_direction();
            match (out, back) {
                (Ok(a), Ok((b, _))) => !is_unimodular_pair(a, b).unwrap_or(false),
                _ => true,
            }
        })
    }

    pub fn affine_area(&self) -> Result<Rat> {
        if self.len() < 3 {
            return Err(Error::DegeneratePolygon);
        }
        let a2 = geometry::signed_area2(&self.vertices);
        if a2.is_zero() {
            return Err(Error::DegeneratePolygon);
        }
        if a2.is_negative() {
            return Err(Error::Clockwise);
        }
        Ok(a2 * Rat::new(1, 2))
    }

    fn require_toric(&self) -> Result<()> {
        if !self.nodes.is_empty() {
            return Err(Error::NotToric("diagram has nodes".into()));
        }
        if let Some(j) = self.edge_marks.iter().position(|m| !m.is_divisor()) {
            return Err(Error::NotToric(format!(
                "edge {j} is not a boundary divisor"
            )));
        }
        if self.len() < 3 || self.edge_marks.len() != self.len() {
            return Err(Error::NotToric("malformed boundary".into()));
        }
        if let Some(k) = self.non_delzant_vertex() {
            return Err(Error::NotDelzant(k));
        }
        Ok(())
    }

    /// Inward primitive normal of edge `j`.
    pub fn inward_normal(&self, j: usize) -> Result<LatVec> {
        Ok(self.edge_direction(j)?.rot90())
    }

    /// Self-intersection numbers `a_i` of the toric divisors, determined by
    /// `u_{i-1} + u_{i+1} = -a_i u_i` on inward normals.
    pub fn self_intersections(&self) -> Result<Vec<i64>> {
        self.require_toric()?;
        let n = self.len();
        let normals = (0..n)
            .map(|j| self.inward_normal(j))
            .collect::<Result<Vec<_>>>()?;
        (0..n)
            .map(|i| {
                let u = normals[i];
                let w = normals[(i + n - 1) % n] + normals[(i + 1) % n];
                fan_coefficient(w, u).ok_or(Error::NotDelzant(i))
            })
            .collect()
    }

    /// The diagram's edge vectors, rebuilt as lattice length times primitive
    /// direction, close up.
    pub fn minkowski_check(&self) -> bool {
        let n = self.len();
        if n < 3 || self.edge_marks.len() != n {
            return false;
        }
        let mut sum = Point::origin();
        for j in 0..n {
            match self.edge_vector(j).primitive_direction() {
                Ok((dir, len)) => sum = sum.offset(dir, &len),
                Err(_) => return false,
            }
        }
        sum.is_zero()
    }

    /// The image diagram under `m`. Orientation reversing maps also reverse
    /// the walk so the result stays counterclockwise.
    pub fn transform(&self, m: &AffineMap) -> BaseDiagram {
        let n = self.len();
        let lin = *m.linear();
        let reversed = m.orientation() < 0;
        let index = |k: usize| if reversed { (n - k) % n } else { k };
        let mut vertices = vec![Point::origin(); n];
        for (k, p) in self.vertices.iter().enumerate() {
            vertices[index(k)] = m.apply(p);
        }
        let edge_marks = (0..n)
            .map(|j| {
                if reversed {
                    self.edge_marks[(2 * n - j - 1) % n]
                } else {
                    self.edge_marks[j]
                }
            })
            .collect();
        let nodes = self
            .nodes
            .iter()
            .map(|node| Node {
                position: m.apply(&node.position),
                eigen_direction: lin.apply(node.eigen_direction),
                monodromy: node
                    .monodromy
                    .conjugate_by(&lin)
                    .expect("affine maps are unimodular"),
                cut_targets: (index(node.cut_targets.0), index(node.cut_targets.1)),
            })
            .collect();
        BaseDiagram::new(vertices, edge_marks, nodes)
    }

    /// Search for an integral affine map carrying `self` onto `other`,
    /// preserving marks and nodes.
    pub fn equivalent(&self, other: &BaseDiagram) -> Option<AffineMap> {
        let n = self.len();
        if n < 3 || n != other.len() || self.nodes.len() != other.nodes.len() {
            return None;
        }
        let v0 = &self.vertices[0];
        let e1 = &self.vertices[1] - v0;
        let k2 = (2..n).find(|&k| !e1.cross(&(&self.vertices[k] - v0)).is_zero())?;
        let e2 = &self.vertices[k2] - v0;
        for reversed in [false, true] {
            for shift in 0..n {
                let phi = |i: usize| {
                    if reversed {
                        (shift + n - i % n) % n
                    } else {
                        (shift + i) % n
                    }
                };
                let w0 = &other.vertices[phi(0)];
                let f1 = &other.vertices[phi(1)] - w0;
                let f2 = &other.vertices[phi(k2)] - w0;
                let Some(lin) = solve_linear(&e1, &e2, &f1, &f2) else {
                    continue;
                };
                if (lin.det() < 0) != reversed {
                    continue;
                }
                let t = w0 - &lin.apply_point(v0);
                let Ok(map) = AffineMap::new(lin, t) else {
                    continue;
                };
                let vertices_ok =
                    (0..n).all(|i| map.apply(&self.vertices[i]) == other.vertices[phi(i)]);
                if !vertices_ok {
                    continue;
                }
                let marks_ok = (0..n).all(|i| {
                    let j = if reversed { phi(i + 1) } else { phi(i) };
                    self.edge_marks[i] == other.edge_marks[j]
                });
                if !marks_ok {
                    continue;
                }
                if nodes_match(self, other, &map, &phi) {
                    return Some(map);
                }
            }
        }
        None
    }
}

/// `a` with `w = -a u`, if `w` is an integral multiple of `u`.
pub(crate) fn fan_coefficient(w: LatVec, u: LatVec) -> Option<i64> {
    if w.cross(u) != 0 {
        return None;
    }
    let uu = u.dot(u);
    let wu = w.dot(u);
    (wu % uu == 0).then_some(-wu / uu)
}

/// The integer matrix sending `e1 -> f1`, `e2 -> f2`, if it exists.
fn solve_linear(e1: &Point, e2: &Point, f1: &Point, f2: &Point) -> Option<IMat2> {
    // Rows of L satisfy [e1 e2]^T row = (f1_r, f2_r).
    let m = [[e1.x.clone(), e1.y.clone()], [e2.x.clone(), e2.y.clone()]];
    let (a, b) = solve2(m.clone(), [f1.x.clone(), f2.x.clone()])?;
    let (c, d) = solve2(m, [f1.y.clone(), f2.y.clone()])?;
    Some(IMat2::new(
        a.to_i64()?,
        b.to_i64()?,
        c.to_i64()?,
        d.to_i64()?,
    ))
}

fn nodes_match(
    a: &BaseDiagram,
    b: &BaseDiagram,
    map: &AffineMap,
    phi: &dyn Fn(usize) -> usize,
) -> bool {
    let lin = *map.linear();
    let mut used = vec![false; b.nodes.len()];
    'outer: for node in &a.nodes {
        let pos = map.apply(&node.position);
        let eig = lin.apply(node.eigen_direction);
        let Ok(mono) = node.monodromy.conjugate_by(&lin) else {
            return false;
        };
        let targets = (phi(node.cut_targets.0), phi(node.cut_targets.1));
        for (k, cand) in b.nodes.iter().enumerate() {
            if used[k] || cand.position != pos {
                continue;
            }
            if cand.eigen_direction != eig && cand.eigen_direction != -eig {
                continue;
            }
            let same = cand.cut_targets == targets && cand.monodromy == mono;
            let swapped = cand.cut_targets == (targets.1, targets.0)
                && mono
                    .inverse()
                    .map(|inv| inv == cand.monodromy)
                    .unwrap_or(false);
            if same || swapped {
                used[k] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// A convex sub-region of a base diagram with one side on a boundary edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConvexRegion {
    pub vertices: Vec<Point>,
    /// Index of the ambient diagram edge carrying one side of the region.
    pub designated_edge: usize,
}

impl ConvexRegion {
    pub fn new(vertices: Vec<Point>, designated_edge: usize) -> ConvexRegion {
        ConvexRegion {
            vertices,
            designated_edge,
        }
    }

    pub fn is_convex(&self) -> bool {
        geometry::is_strictly_convex_ccw(&self.vertices)
    }

    /// The region seen as a standalone node-free diagram.
    pub fn as_diagram(&self) -> BaseDiagram {
        BaseDiagram::polygon(self.vertices.clone())
    }

    /// Index of the region side lying inside the designated ambient edge.
    pub fn designated_side(&self, ambient: &BaseDiagram) -> Option<usize> {
        if self.designated_edge >= ambient.len() {
            return None;
        }
        let (p, q) = ambient.edge(self.designated_edge);
        let n = self.vertices.len();
        (0..n).find(|&k| {
            geometry::on_segment(&self.vertices[k], p, q)
                && geometry::on_segment(&self.vertices[(k + 1) % n], p, q)
        })
    }
}

/// Primitive direction from `a` towards `b`.
pub(crate) fn direction(a: &Point, b: &Point) -> Result<LatVec> {
    Ok((b - a).primitive_direction()?.0)
}
