//! Exact predicates on rational polygons: orientation, point location,
//! segment intersection and closed containment.

use crate::affine::Point;
use crate::rational::Rat;

/// Sign of `cross(b - a, c - a)`.
pub fn orient(a: &Point, b: &Point, c: &Point) -> i32 {
    (b - a).cross(&(c - a)).signum()
}

/// Whether `p` lies on the closed segment `[a, b]`.
pub fn on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    orient(a, b, p) == 0
        && p.x >= a.x.clone().min(b.x.clone())
        && p.x <= a.x.clone().max(b.x.clone())
        && p.y >= a.y.clone().min(b.y.clone())
        && p.y <= a.y.clone().max(b.y.clone())
}

/// Parameter `s` with `p = a + s (b - a)`, for `p` on the line through `a`, `b`.
pub fn param_on(p: &Point, a: &Point, b: &Point) -> Rat {
    let d = b - a;
    if !d.x.is_zero() {
        (&p.x - &a.x) / &d.x
    } else {
        (&p.y - &a.y) / &d.y
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentContact {
    Disjoint,
    /// A single common point.
    Point(Point),
    /// Collinear overlap of positive length.
    Overlap(Point, Point),
}

impl SegmentContact {
    /// Whether the two segments cross at a point interior to both.
    pub fn is_proper_crossing(&self, a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
        match self {
            SegmentContact::Point(p) => p != a && p != b && p != c && p != d,
            _ => false,
        }
    }
}

pub fn segment_contact(a: &Point, b: &Point, c: &Point, d: &Point) -> SegmentContact {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    if o1 * o2 > 0 {
        return SegmentContact::Disjoint;
    }
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 == 0 && o2 == 0 {
        // Collinear: intersect the parameter ranges along a -> b.
        let s_c = param_on(c, a, b);
        let s_d = param_on(d, a, b);
        let lo = Rat::zero().max(s_c.clone().min(s_d.clone()));
        let hi = Rat::one().min(s_c.max(s_d));
        if lo > hi {
            return SegmentContact::Disjoint;
        }
        let at = |s: &Rat| Point::new(&a.x + s * &(&b.x - &a.x), &a.y + s * &(&b.y - &a.y));
        if lo == hi {
            return SegmentContact::Point(at(&lo));
        }
        return SegmentContact::Overlap(at(&lo), at(&hi));
    }
    if o1 * o2 <= 0 && o3 * o4 <= 0 {
        let r = b - a;
        let s = d - c;
        let denom = r.cross(&s);
        let t = (c - a).cross(&s) / &denom;
        return SegmentContact::Point(Point::new(&a.x + &t * &r.x, &a.y + &t * &r.y));
    }
    SegmentContact::Disjoint
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

pub fn locate(p: &Point, poly: &[Point]) -> Location {
    let n = poly.len();
    let mut inside = false;
    for k in 0..n {
        let a = &poly[k];
        let b = &poly[(k + 1) % n];
        if on_segment(p, a, b) {
            return Location::Boundary;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = &a.x + (&p.y - &a.y) * (&b.x - &a.x) / (&b.y - &a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Location::Inside
    } else {
        Location::Outside
    }
}

/// Twice the signed area.
pub fn signed_area2(poly: &[Point]) -> Rat {
    let n = poly.len();
    (0..n).map(|k| poly[k].cross(&poly[(k + 1) % n])).sum()
}

/// First pair of edges `(i, j)` that intersect illegally, if any.
pub fn self_intersection(poly: &[Point]) -> Option<(usize, usize)> {
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        if a == b {
            return Some((i, i));
        }
        for j in i + 1..n {
            let (c, d) = (&poly[j], &poly[(j + 1) % n]);
            let contact = segment_contact(a, b, c, d);
            let adjacent_next = j == i + 1;
            let adjacent_prev = i == 0 && j == n - 1;
            let ok = match &contact {
                SegmentContact::Disjoint => true,
                SegmentContact::Point(p) => (adjacent_next && p == b) || (adjacent_prev && p == a),
                SegmentContact::Overlap(..) => false,
            };
            if !ok {
                return Some((i, j));
            }
        }
    }
    None
}

/// Convex and counterclockwise, no three consecutive vertices collinear.
pub fn is_strictly_convex_ccw(poly: &[Point]) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|k| orient(&poly[k], &poly[(k + 1) % n], &poly[(k + 2) % n]) > 0)
}

/// Whether every point lies in the closed convex counterclockwise polygon.
pub fn convex_contains(convex: &[Point], pts: &[Point]) -> bool {
    let n = convex.len();
    pts.iter()
        .all(|p| (0..n).all(|k| orient(&convex[k], &convex[(k + 1) % n], p) >= 0))
}

/// Positive area with every vertex on the closed left of every edge line.
fn is_convex_region(poly: &[Point]) -> bool {
    let n = poly.len();
    n >= 3
        && signed_area2(poly).is_positive()
        && (0..n).all(|k| {
            poly.iter()
                .all(|p| orient(&poly[k], &poly[(k + 1) % n], p) >= 0)
        })
}

/// Whether two convex counterclockwise polygons have disjoint interiors,
/// decided by looking for a separating edge line.
pub fn interiors_disjoint(a: &[Point], b: &[Point]) -> bool {
    let separates = |p: &[Point], q: &[Point]| {
        let n = p.len();
        (0..n).any(|k| q.iter().all(|x| orient(&p[k], &p[(k + 1) % n], x) <= 0))
    };
    separates(a, b) || separates(b, a)
}

/// Closed containment of the simple polygon `inner` in the simple polygon
/// `outer`.
pub fn contains_polygon(outer: &[Point], inner: &[Point]) -> bool {
    // A convex outer region contains the hull of the inner vertices.
    if is_convex_region(outer) {
        return convex_contains(outer, inner);
    }
    if inner.iter().any(|p| locate(p, outer) == Location::Outside) {
        return false;
    }
    if outer.iter().any(|p| locate(p, inner) == Location::Inside) {
        return false;
    }
    let n = inner.len();
    let m = outer.len();
    for k in 0..n {
        let (a, b) = (&inner[k], &inner[(k + 1) % n]);
        let mut cuts = vec![Rat::zero(), Rat::one()];
        for j in 0..m {
            let (c, d) = (&outer[j], &outer[(j + 1) % m]);
            match segment_contact(a, b, c, d) {
                SegmentContact::Disjoint => {}
                SegmentContact::Point(p) => cuts.push(param_on(&p, a, b)),
                SegmentContact::Overlap(p, q) => {
                    cuts.push(param_on(&p, a, b));
                    cuts.push(param_on(&q, a, b));
                }
            }
        }
        cuts.sort();
        cuts.dedup();
        for w in cuts.windows(2) {
            let s = (&w[0] + &w[1]) * Rat::new(1, 2);
            let mid = Point::new(&a.x + &s * &(&b.x - &a.x), &a.y + &s * &(&b.y - &a.y));
            if locate(&mid, outer) == Location::Outside {
                return false;
            }
        }
    }
    true
}
