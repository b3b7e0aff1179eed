//! Nodal blow-up and blow-down, corner chops, reduction along a convex
//! sub-region, and the search for a Delzant sub-polygon around a ball.

use crate::affine::{shear_fixing, solve2, AffineMap, LatVec, Point};
use crate::diagram::{direction, BaseDiagram, ConvexRegion, EdgeMark, Node};
use crate::error::{Error, Result};
use crate::geometry::{self, Location, SegmentContact};
use crate::rational::Rat;

/// A standard triangle of size `c`: base from `base_start` along the
/// primitive `base_direction`, apex at `base_start + c * up`, where
/// `det(base_direction, up) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub base_start: Point,
    pub base_direction: LatVec,
    pub size: Rat,
    pub apex: Point,
}

impl Triangle {
    /// Validates that the apex sits where a standard triangle puts it.
    pub fn new(
        base_start: Point,
        base_direction: LatVec,
        size: Rat,
        apex: Point,
    ) -> Result<Triangle> {
        let t = Triangle {
            base_start,
            base_direction,
            size,
            apex,
        };
        t.up()?;
        Ok(t)
    }

    /// The triangle with corner `anchor` in the chart `(along, up)`.
    pub fn in_chart(anchor: Point, along: LatVec, up: LatVec, size: Rat) -> Result<Triangle> {
        if along.cross(up) != 1 {
            return Err(Error::InvalidTriangle(
                "chart is not positively unimodular".into(),
            ));
        }
        let apex = anchor.offset(up, &size);
        Triangle::new(anchor, along, size, apex)
    }

    /// The second chart vector.
    pub fn up(&self) -> Result<LatVec> {
        if !self.size.is_positive() {
            return Err(Error::InvalidTriangle("size must be positive".into()));
        }
        if !self.base_direction.is_primitive() {
            return Err(Error::InvalidTriangle(
                "base direction not primitive".into(),
            ));
        }
        let rel = (&self.apex - &self.base_start).scale(&self.size.recip());
        let (x, y) = match (rel.x.to_i64(), rel.y.to_i64()) {
            (Some(x), Some(y)) => (x, y),
            _ => return Err(Error::InvalidTriangle("apex off the lattice chart".into())),
        };
        let up = LatVec::new(x, y);
        if self.base_direction.cross(up) != 1 {
            return Err(Error::InvalidTriangle(
                "apex does not form a standard triangle".into(),
            ));
        }
        Ok(up)
    }

    pub fn base_end(&self) -> Point {
        self.base_start.offset(self.base_direction, &self.size)
    }

    /// Counterclockwise corners: base start, base end, apex.
    pub fn vertices(&self) -> Vec<Point> {
        vec![self.base_start.clone(), self.base_end(), self.apex.clone()]
    }

    /// Affine area `c^2 / 2`.
    pub fn area(&self) -> Rat {
        &self.size * &self.size * Rat::new(1, 2)
    }

    /// Same corner and chart, size grown by `extra`.
    pub fn grown(&self, extra: &Rat) -> Result<Triangle> {
        let up = self.up()?;
        Triangle::in_chart(
            self.base_start.clone(),
            self.base_direction,
            up,
            &self.size + extra,
        )
    }

    /// Image under an integral affine map. Orientation reversing maps swap
    /// the base ends so the result stays a standard triangle.
    pub fn transform(&self, m: &AffineMap) -> Triangle {
        let dir = m.apply_vec(self.base_direction);
        if m.orientation() > 0 {
            Triangle {
                base_start: m.apply(&self.base_start),
                base_direction: dir,
                size: self.size.clone(),
                apex: m.apply(&self.apex),
            }
        } else {
            Triangle {
                base_start: m.apply(&self.base_end()),
                base_direction: -dir,
                size: self.size.clone(),
                apex: m.apply(&self.apex),
            }
        }
    }
}

/// A symplectic ball as seen in the toric picture: a standard triangle of
/// size `capacity` at `anchor` on edge `edge_index`, plus a safety margin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallPlacement {
    pub anchor: Point,
    pub edge_index: usize,
    pub capacity: Rat,
    /// Whether the ball meets the boundary divisor compatibly.
    pub compatible: bool,
    pub margin: Rat,
}

impl BallPlacement {
    /// The margin-inflated triangle `T(capacity + margin)` in the chart of
    /// the placement edge.
    pub fn footprint(&self, d: &BaseDiagram) -> Result<Triangle> {
        if !self.capacity.is_positive() {
            return Err(Error::NonPositiveCapacity);
        }
        if self.margin.is_negative() {
            return Err(Error::InvalidPlacement("negative margin".into()));
        }
        let (v, u) = edge_chart(d, self.edge_index)?;
        Triangle::in_chart(self.anchor.clone(), v, u, &self.capacity + &self.margin)
    }
}

/// The chart `(v, u)` of edge `i`: `v` its direction, `u` the direction of
/// the adjacent edge at the tail (or one derived at the head) such that
/// `det(v, u) = 1`.
pub fn edge_chart(d: &BaseDiagram, i: usize) -> Result<(LatVec, LatVec)> {
    let v = d.edge_direction(i)?;
    let tail = &d.vertices[i];
    let p = d.prev(i);
    if d.edge_marks[p] != EdgeMark::Branch {
        let u = direction(tail, &d.vertices[p])?;
        if v.cross(u) == 1 {
            return Ok((v, u));
        }
    }
    let nx = d.next(i);
    if d.edge_marks[nx] != EdgeMark::Branch {
        let b = d.edge_direction(nx)?;
        if v.cross(b) == 1 {
            return Ok((v, v + b));
        }
    }
    Err(Error::NoChart(i))
}

/// The standard triangle of size `c` whose base starts at lattice distance
/// `t` from the tail of edge `i`.
pub fn standard_triangle(d: &BaseDiagram, i: usize, t: &Rat, c: &Rat) -> Result<Triangle> {
    if !c.is_positive() {
        return Err(Error::NonPositiveCapacity);
    }
    if t.is_negative() {
        return Err(Error::InvalidTriangle("negative offset".into()));
    }
    let len = d.edge_lattice_length(i)?;
    if (t + c) > len {
        return Err(Error::CapacityTooLarge);
    }
    let (v, u) = edge_chart(d, i)?;
    let tri = Triangle::in_chart(d.vertices[i].offset(v, t), v, u, c.clone())?;
    if !geometry::contains_polygon(&d.vertices, &tri.vertices()) {
        return Err(Error::CapacityTooLarge);
    }
    Ok(tri)
}

/// The edge carrying the triangle's base with matching direction.
fn base_edge(d: &BaseDiagram, tri: &Triangle) -> Option<usize> {
    let end = tri.base_end();
    (0..d.len()).find(|&j| {
        let (a, b) = d.edge(j);
        geometry::on_segment(&tri.base_start, a, b)
            && geometry::on_segment(&end, a, b)
            && d.edge_direction(j).ok() == Some(tri.base_direction)
    })
}

/// Whether `tri` lies in `d` and meets its boundary only along the base,
/// which must sit strictly inside edge `j`.
fn meets_only_along_base(d: &BaseDiagram, tri: &Triangle, j: usize) -> bool {
    let (a, b) = d.edge(j);
    let end = tri.base_end();
    if tri.base_start == *a || end == *b {
        return false;
    }
    if geometry::locate(&tri.apex, &d.vertices) != Location::Inside {
        return false;
    }
    for foot in [&tri.base_start, &end] {
        for k in 0..d.len() {
            let (c, e) = d.edge(k);
            match geometry::segment_contact(&tri.apex, foot, c, e) {
                SegmentContact::Disjoint => {}
                SegmentContact::Point(p) if k == j && p == *foot => {}
                _ => return false,
            }
        }
    }
    true
}

/// Nodal blow-up: removes the standard triangle `tri` from the drawn region
/// and puts a node at its apex.
///
/// The base must lie strictly inside a heavy edge, the apex strictly inside
/// the region, and no other node may sit in the closed triangle. The new
/// node has the base direction as eigen direction and a monodromy carrying
/// the cut towards the base start onto the cut towards the base end.
pub fn atf_blowup(d: &BaseDiagram, tri: &Triangle) -> Result<BaseDiagram> {
    tri.up()?;
    if let Some(v) = d.validate().first() {
        return Err(Error::Surgery(format!("input diagram invalid: {v}")));
    }
    let j = base_edge(d, tri)
        .ok_or_else(|| Error::Surgery("triangle base does not lie on a boundary edge".into()))?;
    if d.edge_marks[j] != EdgeMark::Heavy {
        return Err(Error::Surgery(format!(
            "edge {j} is not a heavy boundary edge"
        )));
    }
    let corners = tri.vertices();
    if d.nodes
        .iter()
        .any(|node| geometry::locate(&node.position, &corners) != Location::Outside)
    {
        return Err(Error::RegionNotFree);
    }
    if !geometry::contains_polygon(&d.vertices, &corners) {
        return Err(Error::CapacityTooLarge);
    }
    if !meets_only_along_base(d, tri, j) {
        return Err(Error::Surgery(
            "triangle must meet the boundary only in the interior of its base edge".into(),
        ));
    }

    let base_end = tri.base_end();
    let d1 = direction(&tri.apex, &tri.base_start)?;
    let d2 = direction(&tri.apex, &base_end)?;
    let monodromy = {
        let v = tri.base_direction;
        // d2 - d1 = k det(v, d1) v for the shear fixing v.
        let s = v.cross(d1);
        let delta = d2 - d1;
        let (num, den) = if v.x != 0 {
            (delta.x, v.x * s)
        } else {
            (delta.y, v.y * s)
        };
        if den == 0 || num % den != 0 {
            return Err(Error::Inconsistent(
                "cut directions not related by a shear".into(),
            ));
        }
        let m = shear_fixing(v, num / den);
        if m.apply(d1) != d2 {
            return Err(Error::Inconsistent(
                "cut directions not related by a shear".into(),
            ));
        }
        m
    };

    let mut vertices = d.vertices.clone();
    vertices.splice(
        j + 1..j + 1,
        [tri.base_start.clone(), tri.apex.clone(), base_end],
    );
    let mut edge_marks = d.edge_marks.clone();
    let mark = edge_marks[j];
    edge_marks.splice(j + 1..j + 1, [EdgeMark::Branch, EdgeMark::Branch, mark]);
    let shift = |k: usize| if k > j { k + 3 } else { k };
    let mut nodes: Vec<Node> = d
        .nodes
        .iter()
        .map(|node| Node {
            cut_targets: (shift(node.cut_targets.0), shift(node.cut_targets.1)),
            ..node.clone()
        })
        .collect();
    nodes.push(Node {
        position: tri.apex.clone(),
        eigen_direction: tri.base_direction,
        monodromy,
        cut_targets: (j + 1, j + 3),
    });
    let out = BaseDiagram::new(vertices, edge_marks, nodes);
    if let Some(v) = out.validate().first() {
        return Err(Error::Inconsistent(format!(
            "blow-up produced an invalid diagram: {v}"
        )));
    }
    Ok(out)
}

/// The wedge triangle of an apex node, if the node is blow-down ready.
fn wedge_of(d: &BaseDiagram, node_index: usize) -> Result<(usize, Triangle)> {
    let node = d.nodes.get(node_index).ok_or(Error::IndexOutOfRange {
        index: node_index,
        len: d.nodes.len(),
    })?;
    let apex = (0..d.len())
        .find(|&v| d.apex_node_at(v) == Some(node_index))
        .ok_or_else(|| Error::NotBlowdownReady("node does not sit at a cut apex".into()))?;
    let p = d.prev(apex);
    let q = d.next(apex);
    let (start, end) = (&d.vertices[p], &d.vertices[q]);
    let before = d.prev(p);
    let base = direction(start, end)?;
    let collinear = direction(&d.vertices[before], start)? == base
        && direction(end, &d.vertices[d.next(q)])? == base;
    if !collinear || d.edge_marks[before] != d.edge_marks[q] || d.edge_marks[q] == EdgeMark::Branch
    {
        return Err(Error::NotBlowdownReady(
            "cut targets do not lie on one boundary edge".into(),
        ));
    }
    let (_, size) = (end - start).primitive_direction()?;
    let tri = Triangle::new(start.clone(), base, size, node.position.clone())
        .map_err(|_| Error::NotBlowdownReady("wedge is not a standard triangle".into()))?;
    Ok((apex, tri))
}

/// Inverse of [`atf_blowup`]: restores the wedge at an apex node and merges
/// the boundary edge it was cut from.
pub fn atf_blowdown(d: &BaseDiagram, node_index: usize) -> Result<BaseDiagram> {
    let (apex, _) = wedge_of(d, node_index)?;
    let n = d.len();
    let removed = [(apex + n - 1) % n, apex, (apex + 1) % n];
    let kept: Vec<usize> = (0..n).filter(|k| !removed.contains(k)).collect();
    let new_index = |k: usize| kept.iter().position(|&x| x == k);
    let vertices = kept.iter().map(|&k| d.vertices[k].clone()).collect();
    let edge_marks = kept.iter().map(|&k| d.edge_marks[k]).collect();
    let mut nodes = Vec::new();
    for (i, node) in d.nodes.iter().enumerate() {
        if i == node_index {
            continue;
        }
        let (Some(a), Some(b)) = (new_index(node.cut_targets.0), new_index(node.cut_targets.1))
        else {
            return Err(Error::NotBlowdownReady(format!(
                "node {i} cuts to a merged vertex"
            )));
        };
        nodes.push(Node {
            cut_targets: (a, b),
            ..node.clone()
        });
    }
    Ok(BaseDiagram::new(vertices, edge_marks, nodes))
}

/// Toric blow-up: cuts the corner at vertex `v` by a heavy edge at lattice
/// distance `c` along both adjacent edges.
pub fn corner_chop(d: &BaseDiagram, v: usize, c: &Rat) -> Result<BaseDiagram> {
    if !c.is_positive() {
        return Err(Error::NonPositiveCapacity);
    }
    if v >= d.len() {
        return Err(Error::IndexOutOfRange {
            index: v,
            len: d.len(),
        });
    }
    if d.vertex_on_cut(v)
        || d.nodes
            .iter()
            .any(|node| node.cut_targets.0 == v || node.cut_targets.1 == v)
    {
        return Err(Error::Surgery(format!("vertex {v} touches a branch cut")));
    }
    let corner = &d.vertices[v];
    let b_out = d.edge_direction(v)?;
    let b_in = direction(corner, &d.vertices[d.prev(v)])?;
    if b_out.cross(b_in) != 1 {
        return Err(Error::NotDelzant(v));
    }
    if &d.edge_lattice_length(v)? <= c || &d.edge_lattice_length(d.prev(v))? <= c {
        return Err(Error::ChopTooLarge(v));
    }
    let p_in = corner.offset(b_in, c);
    let p_out = corner.offset(b_out, c);
    let cut = [corner.clone(), p_out.clone(), p_in.clone()];
    if d.nodes
        .iter()
        .any(|node| geometry::locate(&node.position, &cut) != Location::Outside)
    {
        return Err(Error::RegionNotFree);
    }
    if !geometry::contains_polygon(&d.vertices, &cut) {
        return Err(Error::ChopTooLarge(v));
    }
    let mut vertices = d.vertices.clone();
    vertices.splice(v..=v, [p_in, p_out]);
    let mut edge_marks = d.edge_marks.clone();
    edge_marks.insert(v, EdgeMark::Heavy);
    let shift = |k: usize| if k > v { k + 1 } else { k };
    let nodes = d
        .nodes
        .iter()
        .map(|node| Node {
            cut_targets: (shift(node.cut_targets.0), shift(node.cut_targets.1)),
            ..node.clone()
        })
        .collect();
    Ok(BaseDiagram::new(vertices, edge_marks, nodes))
}

/// Blows down every apex node, returning the filled diagram and the wedges
/// in node order.
fn fill_wedges(d: &BaseDiagram) -> Result<(BaseDiagram, Vec<Option<Triangle>>)> {
    let mut wedges: Vec<Option<Triangle>> = Vec::new();
    for i in 0..d.nodes.len() {
        wedges.push(wedge_of(d, i).ok().map(|(_, t)| t));
    }
    let mut filled = d.clone();
    while let Some(idx) = (0..filled.nodes.len()).find(|&i| wedge_of(&filled, i).is_ok()) {
        filled = atf_blowdown(&filled, idx)?;
    }
    if filled.edge_marks.contains(&EdgeMark::Branch) {
        return Err(Error::NotBlowdownReady(
            "wedges could not all be filled".into(),
        ));
    }
    Ok((filled, wedges))
}

/// Symplectic reduction along the convex region `p`: keeps the part of the
/// diagram over `p`. Sides of `p` along existing edges keep their marks,
/// interior chords become collapsed edges. Nodes whose wedge lies inside
/// `p` are carried along, nodes outside are dropped.
pub fn reduce_along(d: &BaseDiagram, p: &ConvexRegion) -> Result<BaseDiagram> {
    if !p.is_convex() {
        return Err(Error::Surgery("region is not strictly convex".into()));
    }
    if !p.as_diagram().delzant_check() {
        return Err(Error::RegionNotDelzant);
    }
    let (filled, wedges) = fill_wedges(d)?;
    if !geometry::contains_polygon(&filled.vertices, &p.vertices) {
        return Err(Error::RegionNotContained);
    }
    let m = p.vertices.len();
    let mut marks = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (&p.vertices[k], &p.vertices[(k + 1) % m]);
        let mut mark = None;
        for j in 0..filled.len() {
            let (c, e) = filled.edge(j);
            if let SegmentContact::Overlap(x, y) = geometry::segment_contact(a, b, c, e) {
                let whole = (x == *a && y == *b) || (x == *b && y == *a);
                if !whole {
                    return Err(Error::PartialOverlap(k));
                }
                mark = Some(filled.edge_marks[j]);
            }
        }
        marks.push(mark.unwrap_or(EdgeMark::Collapsed));
    }
    let mut carried = Vec::new();
    for (i, node) in d.nodes.iter().enumerate() {
        let at = geometry::locate(&node.position, &p.vertices);
        match (&wedges[i], at) {
            (_, Location::Boundary) => return Err(Error::NodeOnReductionBoundary),
            (Some(w), Location::Inside) => {
                if !geometry::convex_contains(&p.vertices, &w.vertices()) {
                    return Err(Error::NodeOnReductionBoundary);
                }
                carried.push(w.clone());
            }
            (Some(w), Location::Outside) => {
                if !geometry::interiors_disjoint(&p.vertices, &w.vertices()) {
                    return Err(Error::NodeOnReductionBoundary);
                }
            }
            (None, Location::Inside) => {
                return Err(Error::Surgery(format!(
                    "node {i} is not at a cut apex and cannot be carried"
                )))
            }
            (None, Location::Outside) => {}
        }
    }
    let mut out = BaseDiagram::new(p.vertices.clone(), marks, Vec::new());
    for w in &carried {
        out = atf_blowup(&out, w)?;
    }
    Ok(out)
}

/// Options for [`find_delzant_subpolygon_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    /// Number of slack halvings tried.
    pub depth: u32,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { depth: 10 }
    }
}

/// Chart coordinates of `p` relative to `origin` in the basis `(v, u)`.
fn chart_coords(origin: &Point, v: LatVec, u: LatVec, p: &Point) -> (Rat, Rat) {
    let rel = p - origin;
    let m = [
        [Rat::int(v.x), Rat::int(u.x)],
        [Rat::int(v.y), Rat::int(u.y)],
    ];
    solve2(m, [rel.x, rel.y]).expect("unimodular chart")
}

fn from_chart(origin: &Point, v: LatVec, u: LatVec, x: &Rat, y: &Rat) -> Point {
    origin.offset(v, x).offset(u, y)
}

/// Whether `p` is an admissible sub-polygon for the ball: convex, Delzant,
/// inside `r`, containing `tri`, with one side inside edge `i` of `d`, and
/// keeping the placement footprint away from every other side.
pub fn is_acceptable_subpolygon(
    d: &BaseDiagram,
    r: &ConvexRegion,
    i: usize,
    tri: &Triangle,
    placement: &BallPlacement,
    p: &ConvexRegion,
) -> bool {
    if !p.is_convex() || !p.as_diagram().delzant_check() {
        return false;
    }
    if !geometry::convex_contains(&r.vertices, &p.vertices) {
        return false;
    }
    if !geometry::convex_contains(&p.vertices, &tri.vertices()) {
        return false;
    }
    let Some(side) = p.designated_side(d) else {
        return false;
    };
    if p.designated_edge != i {
        return false;
    }
    let Ok(foot) = placement.footprint(d) else {
        return false;
    };
    let m = p.vertices.len();
    let corners = foot.vertices();
    (0..m).all(|k| {
        let (a, b) = (&p.vertices[k], &p.vertices[(k + 1) % m]);
        corners.iter().all(|x| {
            let o = geometry::orient(a, b, x);
            o > 0 || (k == side && o == 0)
        })
    })
}

/// [`find_delzant_subpolygon_with`] with the default search depth.
pub fn find_delzant_subpolygon(
    d: &BaseDiagram,
    r: &ConvexRegion,
    i: usize,
    tri: &Triangle,
    placement: &BallPlacement,
) -> Result<ConvexRegion> {
    find_delzant_subpolygon_with(d, r, i, tri, placement, &SearchConfig::default())
}

/// Finds a Delzant polygon `P` with `tri ⊆ P ⊆ r`, one side along edge `i`
/// and the placement footprint clear of all other sides.
///
/// Candidates are a standard triangle and trapezoids with slanted side of
/// slope `k = 0..3`, built in the chart of the triangle around the hull of
/// the triangle and the footprint, with slack halved at each level. The
/// first acceptable candidate is returned, so the answer is deterministic.
pub fn find_delzant_subpolygon_with(
    d: &BaseDiagram,
    r: &ConvexRegion,
    i: usize,
    tri: &Triangle,
    placement: &BallPlacement,
    config: &SearchConfig,
) -> Result<ConvexRegion> {
    if !r.is_convex() {
        return Err(Error::Surgery("region is not strictly convex".into()));
    }
    if r.designated_edge != i {
        return Err(Error::InvalidPlacement(format!(
            "region is designated on edge {}, not {i}",
            r.designated_edge
        )));
    }
    if placement.edge_index != i {
        return Err(Error::InvalidPlacement(
            "placement sits on another edge".into(),
        ));
    }
    if r.designated_side(d).is_none() {
        return Err(Error::InvalidPlacement(
            "region has no side along the edge".into(),
        ));
    }
    if !geometry::convex_contains(&r.vertices, &tri.vertices()) {
        return Err(Error::CapacityTooLarge);
    }
    let foot = placement.footprint(d)?;
    if base_edge(d, tri) != Some(i) || base_edge(d, &foot) != Some(i) {
        return Err(Error::InvalidPlacement(
            "triangle base not on the designated edge".into(),
        ));
    }
    let origin = tri.base_start.clone();
    let v = tri.base_direction;
    let u = tri.up()?;
    let pts: Vec<(Rat, Rat)> = tri
        .vertices()
        .into_iter()
        .chain(foot.vertices())
        .map(|p| chart_coords(&origin, v, u, &p))
        .collect();
    let max_of = |f: &dyn Fn(&(Rat, Rat)) -> Rat| pts.iter().map(f).max().expect("non-empty");
    let min_x = pts.iter().map(|p| p.0.clone()).min().expect("non-empty");
    let max_y = max_of(&|p| p.1.clone());
    let max_sum = max_of(&|p| &p.0 + &p.1);
    let scale = r
        .designated_side(d)
        .map(|s| {
            let n = r.vertices.len();
            (&r.vertices[(s + 1) % n] - &r.vertices[s])
                .primitive_direction()
                .map(|(_, l)| l)
                .unwrap_or_else(|_| Rat::one())
        })
        .unwrap_or_else(Rat::one);
    let mut eps = scale;
    for _ in 0..config.depth {
        eps = eps * Rat::new(1, 2);
        let x0 = &min_x - &eps;
        let mut candidates: Vec<Vec<(Rat, Rat)>> = Vec::new();
        let s0 = &max_sum + &eps;
        candidates.push(vec![
            (x0.clone(), Rat::zero()),
            (s0.clone(), Rat::zero()),
            (x0.clone(), &s0 - &x0),
        ]);
        let h = &max_y + &eps;
        for k in 0..=3i64 {
            let mut w = max_of(&|p| &p.0 + &p.1 * k) + &eps;
            let top_min = &x0 + &h * k + &eps;
            if w < top_min {
                w = top_min;
            }
            candidates.push(vec![
                (x0.clone(), Rat::zero()),
                (w.clone(), Rat::zero()),
                (&w - &h * k, h.clone()),
                (x0.clone(), h.clone()),
            ]);
        }
        for cand in candidates {
            let verts = cand
                .iter()
                .map(|(x, y)| from_chart(&origin, v, u, x, y))
                .collect();
            let p = ConvexRegion::new(verts, i);
            if is_acceptable_subpolygon(d, r, i, tri, placement, &p) {
                return Ok(p);
            }
        }
    }
    Err(Error::SearchExhausted)
}

/// Whether the placement is a compatible ball on edge `i`: flagged
/// compatible, with its footprint inside `d` and meeting the boundary only
/// along the interior of edge `i`.
pub fn placement_compatible(d: &BaseDiagram, placement: &BallPlacement, i: usize) -> bool {
    if !placement.compatible || placement.edge_index != i {
        return false;
    }
    let Ok(foot) = placement.footprint(d) else {
        return false;
    };
    base_edge(d, &foot) == Some(i)
        && geometry::contains_polygon(&d.vertices, &foot.vertices())
        && meets_only_along_base(d, &foot, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::IMat2;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    fn q(a: i64, b: i64) -> Rat {
        Rat::new(a, b)
    }

    #[test]
    fn model_blowup_of_simplex() {
        let d = BaseDiagram::simplex(r(3));
        let tri = standard_triangle(&d, 0, &r(1), &r(1)).unwrap();
        assert_eq!(tri.apex, Point::ints(1, 1));
        let b = atf_blowup(&d, &tri).unwrap();
        assert!(b.validate().is_empty(), "{:?}", b.validate());
        assert_eq!(
            b.vertices,
            vec![
                Point::ints(0, 0),
                Point::ints(1, 0),
                Point::ints(1, 1),
                Point::ints(2, 0),
                Point::ints(3, 0),
                Point::ints(0, 3)
            ]
        );
        let node = &b.nodes[0];
        assert_eq!(node.eigen_direction, LatVec::new(1, 0));
        assert_eq!(node.monodromy, IMat2::new(1, -1, 0, 1));
        assert_eq!(node.cut_targets, (1, 3));
        assert_eq!(b.affine_area().unwrap(), d.affine_area().unwrap() - q(1, 2));
    }

    #[test]
    fn blowup_round_trips() {
        let d = BaseDiagram::hirzebruch(1, r(4), r(3));
        let tri = standard_triangle(&d, 0, &q(1, 4), &q(3, 2)).unwrap();
        let b = atf_blowup(&d, &tri).unwrap();
        assert_eq!(atf_blowdown(&b, 0).unwrap(), d);
    }

    #[test]
    fn blowup_rejects_corner_and_oversize() {
        let d = BaseDiagram::simplex(r(3));
        let at_corner = standard_triangle(&d, 0, &r(0), &r(1)).unwrap();
        assert!(matches!(atf_blowup(&d, &at_corner), Err(Error::Surgery(_))));
        assert_eq!(
            standard_triangle(&d, 0, &r(1), &r(3)),
            Err(Error::CapacityTooLarge)
        );
    }

    #[test]
    fn second_blowup_in_occupied_region_fails() {
        let d = BaseDiagram::simplex(r(6));
        let tri = standard_triangle(&d, 0, &r(1), &r(2)).unwrap();
        let b = atf_blowup(&d, &tri).unwrap();
        let inner = Triangle::in_chart(
            Point::ints(2, 0),
            LatVec::new(1, 0),
            LatVec::new(0, 1),
            r(1),
        );
        assert!(atf_blowup(&b, &inner.unwrap()).is_err());
    }

    #[test]
    fn chop_of_simplex() {
        let d = BaseDiagram::simplex(r(3));
        let c = corner_chop(&d, 0, &r(1)).unwrap();
        assert_eq!(
            c.vertices,
            vec![
                Point::ints(0, 1),
                Point::ints(1, 0),
                Point::ints(3, 0),
                Point::ints(0, 3)
            ]
        );
        assert!(c.delzant_check());
        assert_eq!(c.self_intersections().unwrap(), vec![-1, 0, 1, 0]);
        assert_eq!(corner_chop(&d, 0, &r(3)), Err(Error::ChopTooLarge(0)));
    }

    #[test]
    fn reduce_to_whole_is_identity() {
        let d = BaseDiagram::rectangle(r(3), r(2));
        let p = ConvexRegion::new(d.vertices.clone(), 0);
        assert_eq!(reduce_along(&d, &p).unwrap(), d);
    }

    #[test]
    fn reduce_marks_chords_collapsed() {
        let d = BaseDiagram::rectangle(r(4), r(2));
        let p = ConvexRegion::new(
            vec![
                Point::ints(0, 0),
                Point::ints(2, 0),
                Point::ints(2, 2),
                Point::ints(0, 2),
            ],
            0,
        );
        let red = reduce_along(&d, &p).unwrap();
        assert_eq!(
            red.edge_marks,
            vec![
                EdgeMark::Heavy,
                EdgeMark::Collapsed,
                EdgeMark::Heavy,
                EdgeMark::Heavy
            ]
        );
    }

    #[test]
    fn reduce_carries_or_rejects_nodes() {
        let d = BaseDiagram::simplex(r(4));
        let tri = standard_triangle(&d, 0, &r(1), &r(1)).unwrap();
        let b = atf_blowup(&d, &tri).unwrap();
        let keep = ConvexRegion::new(
            vec![Point::ints(0, 0), Point::ints(3, 0), Point::ints(0, 3)],
            0,
        );
        let red = reduce_along(&b, &keep).unwrap();
        assert_eq!(red.nodes.len(), 1);
        assert!(red.validate().is_empty());
        // A square whose side runs through the apex.
        let through = ConvexRegion::new(
            vec![
                Point::ints(0, 0),
                Point::ints(1, 0),
                Point::ints(1, 1),
                Point::ints(0, 1),
            ],
            0,
        );
        assert_eq!(
            reduce_along(&b, &through),
            Err(Error::NodeOnReductionBoundary)
        );
        // Away from the wedge the node is dropped.
        let away = ConvexRegion::new(
            vec![
                Point::ints(0, 2),
                Point::ints(1, 2),
                Point::ints(1, 3),
                Point::ints(0, 3),
            ],
            0,
        );
        assert!(reduce_along(&b, &away).unwrap().nodes.is_empty());
    }

    #[test]
    fn partial_overlap_is_rejected() {
        let d = BaseDiagram::simplex(r(2));
        let p = ConvexRegion::new(
            vec![Point::ints(-1, 0), Point::ints(1, 0), Point::ints(-1, 2)],
            0,
        );
        assert!(reduce_along(&d, &p).is_err());
    }

    #[test]
    fn finds_subpolygon_in_square() {
        let d = BaseDiagram::rectangle(r(3), r(3));
        let r_ = ConvexRegion::new(d.vertices.clone(), 0);
        let tri = standard_triangle(&d, 0, &r(1), &r(1)).unwrap();
        let placement = BallPlacement {
            anchor: tri.base_start.clone(),
            edge_index: 0,
            capacity: r(1),
            compatible: true,
            margin: q(1, 4),
        };
        let p = find_delzant_subpolygon(&d, &r_, 0, &tri, &placement).unwrap();
        assert!(is_acceptable_subpolygon(&d, &r_, 0, &tri, &placement, &p));
        assert!(placement_compatible(&d, &placement, 0));
        let red = reduce_along(&d, &p).unwrap();
        assert!(red.validate().is_empty());
    }

    #[test]
    fn transform_keeps_standard_triangles() {
        let d = BaseDiagram::simplex(r(3));
        let tri = standard_triangle(&d, 0, &r(1), &r(1)).unwrap();
        let swap = AffineMap::new(IMat2::new(0, 1, 1, 0), Point::ints(2, -1)).unwrap();
        let t = tri.transform(&swap);
        assert!(t.up().is_ok());
        let mut a = t.vertices();
        let mut b: Vec<Point> = tri.vertices().iter().map(|p| swap.apply(p)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
