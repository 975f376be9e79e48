//! Newton polygon geometry over exact rationals.
//!
//! A polygon of L_f has abscissae 0..=D with D = d - 1, starts at (0, 0) and
//! ends at (D, a·D/2). Its slopes pair up as α ↔ a - α, so the shear
//! (x, y) ↦ (D - x, y + a·D/2 - a·x) maps the polygon onto itself and maps
//! any point on or above it to a point on or above it. Certification relies
//! on this: reflections of exact coefficient points are exact hull witnesses.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::valuation::{fmt_rational, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Valuation of a computed coefficient.
    Coefficient,
    /// Image of another point under the functional-equation shear.
    Reflection,
    /// (0, 0) or (D, a·D/2).
    Endpoint,
    /// Hodge lower bound, used where nothing else is known.
    Hodge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ValuationPoint {
    pub index: usize,
    pub val: Valuation,
    pub origin: Origin,
}

impl ValuationPoint {
    pub fn exact(index: usize, y: Rational64) -> Self {
        ValuationPoint {
            index,
            val: Valuation::Exact(y),
            origin: Origin::Coefficient,
        }
    }

    pub fn bound(index: usize, y: Rational64) -> Self {
        ValuationPoint {
            index,
            val: Valuation::AtLeast(y),
            origin: Origin::Coefficient,
        }
    }
}

impl Serialize for ValuationPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ValuationPoint", 4)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("ord", &fmt_rational(self.val.value()))?;
        st.serialize_field("exact", &self.val.is_exact())?;
        st.serialize_field("origin", &self.origin)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct NewtonPolygon {
    pub vertices: Vec<(i64, Rational64)>,
    pub slopes: Vec<(Rational64, u32)>,
    pub certified: bool,
    /// Abscissae of hull vertices that rest on bound-only points.
    pub blocking: Vec<usize>,
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let vertices: Vec<(i64, String)> = self
            .vertices
            .iter()
            .map(|&(x, y)| (x, fmt_rational(y)))
            .collect();
        let slopes: Vec<(String, u32)> = self
            .slopes
            .iter()
            .map(|&(r, m)| (fmt_rational(r), m))
            .collect();
        let mut st = s.serialize_struct("NewtonPolygon", 4)?;
        st.serialize_field("vertices", &vertices)?;
        st.serialize_field("slopes", &slopes)?;
        st.serialize_field("certified", &self.certified)?;
        st.serialize_field("blocking", &self.blocking)?;
        st.end()
    }
}

impl NewtonPolygon {
    /// Polygon from (0, 0) with the given nondecreasing slope multiset.
    pub fn from_slopes(slopes: &[(Rational64, u32)], certified: bool) -> Self {
        let mut sorted: BTreeMap<Rational64, u32> = BTreeMap::new();
        for &(s, m) in slopes {
            if m > 0 {
                *sorted.entry(s).or_default() += m;
            }
        }
        let mut vertices = vec![(0i64, Rational64::zero())];
        let mut slopes = Vec::new();
        for (s, m) in sorted {
            let (x, y) = *vertices.last().unwrap();
            vertices.push((x + m as i64, y + s * Rational64::from_integer(m as i64)));
            slopes.push((s, m));
        }
        NewtonPolygon {
            vertices,
            slopes,
            certified,
            blocking: Vec::new(),
        }
    }

    /// Width of the polygon (sum of multiplicities).
    pub fn length(&self) -> u32 {
        self.slopes.iter().map(|s| s.1).sum()
    }

    /// Slopes listed with repetition.
    pub fn slope_list(&self) -> Vec<Rational64> {
        self.slopes
            .iter()
            .flat_map(|&(s, m)| std::iter::repeat_n(s, m as usize))
            .collect()
    }

    /// Height of the polygon at abscissa x (clamped to the support).
    pub fn y_at(&self, x: i64) -> Rational64 {
        let v = &self.vertices;
        if v.is_empty() {
            return Rational64::zero();
        }
        if x <= v[0].0 {
            return v[0].1;
        }
        for w in v.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x <= x1 {
                return y0 + (y1 - y0) * Rational64::new(x - x0, x1 - x0);
            }
        }
        v.last().unwrap().1
    }

    pub fn breakpoints(&self) -> Vec<i64> {
        let n = self.vertices.len();
        if n < 3 {
            return Vec::new();
        }
        self.vertices[1..n - 1].iter().map(|v| v.0).collect()
    }

    /// Same polygon with a slope-0 segment of length 1 prepended (L* from L_f).
    pub fn with_trivial_slope(&self) -> Self {
        let mut slopes = self.slopes.clone();
        slopes.push((Rational64::zero(), 1));
        let mut out = NewtonPolygon::from_slopes(&slopes, self.certified);
        out.blocking = self.blocking.iter().map(|b| b + 1).collect();
        out
    }

    /// Remove one unit of slope 0 (L_f from L*), if present.
    pub fn strip_trivial_slope(&self) -> Self {
        let mut slopes = self.slopes.clone();
        if let Some(s) = slopes.iter_mut().find(|s| s.0.is_zero()) {
            s.1 -= 1;
        }
        NewtonPolygon::from_slopes(&slopes, self.certified)
    }

    /// Is this polygon on or above `other` at every shared integer abscissa?
    pub fn lies_above(&self, other: &NewtonPolygon) -> bool {
        let end = self.length().min(other.length()) as i64;
        (0..=end).all(|x| self.y_at(x) >= other.y_at(x))
    }

    /// Slope multiset is invariant under α ↦ a - α.
    pub fn is_symmetric(&self, a: i64) -> bool {
        let list = self.slope_list();
        let mut mirrored: Vec<Rational64> = list
            .iter()
            .map(|&s| Rational64::from_integer(a) - s)
            .collect();
        mirrored.sort();
        list == mirrored
    }
}

fn cross(o: (i64, Rational64), p: (i64, Rational64), q: (i64, Rational64)) -> Rational64 {
    let (dx1, dy1) = (Rational64::from_integer(p.0 - o.0), p.1 - o.1);
    let (dx2, dy2) = (Rational64::from_integer(q.0 - o.0), q.1 - o.1);
    dx1 * dy2 - dy1 * dx2
}

/// Best information at each abscissa: the lowest exact point if there is
/// one, otherwise the largest lower bound (every bound is valid, so the
/// strongest one wins).
fn best_per_index(points: &[ValuationPoint]) -> BTreeMap<usize, ValuationPoint> {
    let mut best: BTreeMap<usize, ValuationPoint> = BTreeMap::new();
    for &pt in points {
        let keep_current = match best.get(&pt.index) {
            None => false,
            Some(cur) => match (cur.val.is_exact(), pt.val.is_exact()) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => cur.val.value() <= pt.val.value(),
                (false, false) => cur.val.value() >= pt.val.value(),
            },
        };
        if !keep_current {
            best.insert(pt.index, pt);
        }
    }
    best
}

/// Monotone-chain lower hull. Bound points take part at their bound; the
/// result is certified iff every vertex rests on an exact point.
pub fn lower_hull(points: &[ValuationPoint]) -> Result<NewtonPolygon> {
    let best = best_per_index(points);
    let (first, last) = match (best.first_key_value(), best.last_key_value()) {
        (Some((_, f)), Some((_, l))) => (*f, *l),
        _ => return Err(Error::MissingEndpoint),
    };
    if first.index != 0 || !first.val.is_exact() || !last.val.is_exact() {
        return Err(Error::MissingEndpoint);
    }
    let mut hull: Vec<ValuationPoint> = Vec::new();
    for pt in best.values() {
        let q = (pt.index as i64, pt.val.value());
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let p = hull[hull.len() - 1];
            let turn = cross(
                (o.index as i64, o.val.value()),
                (p.index as i64, p.val.value()),
                q,
            );
            if turn <= Rational64::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(*pt);
    }
    let vertices: Vec<(i64, Rational64)> = hull
        .iter()
        .map(|p| (p.index as i64, p.val.value()))
        .collect();
    let slopes = vertices
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            ((w[1].1 - w[0].1) / Rational64::from_integer(dx), dx as u32)
        })
        .collect();
    let blocking: Vec<usize> = hull
        .iter()
        .filter(|p| !p.val.is_exact())
        .map(|p| p.index)
        .collect();
    Ok(NewtonPolygon {
        vertices,
        slopes,
        certified: blocking.is_empty(),
        blocking,
    })
}

/// Slopes a·k/d for k = 1..d-1.
pub fn hodge_polygon(d: usize, a: usize) -> NewtonPolygon {
    let slopes: Vec<(Rational64, u32)> = (1..d)
        .map(|k| (Rational64::new((a * k) as i64, d as i64), 1))
        .collect();
    NewtonPolygon::from_slopes(&slopes, true)
}

fn endpoint_height(d: usize, a: usize) -> Rational64 {
    Rational64::new((a * (d - 1)) as i64, 2)
}

/// Shear each known point (i, t_i) to (D - i, t_i + a·D/2 - a·i), keeping
/// its exactness, and add the exact endpoint (D, a·D/2).
pub fn symmetry_bounds(known: &[ValuationPoint], d: usize, a: usize) -> Vec<ValuationPoint> {
    let dd = d - 1;
    let top = endpoint_height(d, a);
    let mut out: Vec<ValuationPoint> = known
        .iter()
        .filter(|pt| pt.index <= dd)
        .map(|pt| {
            let shift = top - Rational64::from_integer((a * pt.index) as i64);
            ValuationPoint {
                index: dd - pt.index,
                val: pt.val.shift(shift),
                origin: if pt.index == 0 {
                    Origin::Endpoint
                } else {
                    Origin::Reflection
                },
            }
        })
        .collect();
    if !out.iter().any(|p| p.index == dd && p.val.is_exact()) {
        out.push(ValuationPoint {
            index: dd,
            val: Valuation::Exact(top),
            origin: Origin::Endpoint,
        });
    }
    out
}

/// Hull of `exact ∪ bounds` for the degree-(d-1) polygon of L_f.
///
/// Endpoints are added when absent and any abscissa with no information gets
/// the Hodge bound. Certified iff every hull vertex is exact: bound points
/// can only rise, and exact vertices pin the hull from above.
pub fn certify(
    exact: &[ValuationPoint],
    bounds: &[ValuationPoint],
    d: usize,
    a: usize,
) -> NewtonPolygon {
    if d <= 1 {
        return NewtonPolygon::from_slopes(&[], true);
    }
    let dd = d - 1;
    let mut pts: Vec<ValuationPoint> = exact
        .iter()
        .chain(bounds)
        .filter(|p| p.index <= dd)
        .copied()
        .collect();
    pts.push(ValuationPoint {
        index: 0,
        val: Valuation::Exact(Rational64::zero()),
        origin: Origin::Endpoint,
    });
    pts.push(ValuationPoint {
        index: dd,
        val: Valuation::Exact(endpoint_height(d, a)),
        origin: Origin::Endpoint,
    });
    let hodge = hodge_polygon(d, a);
    for i in 1..dd {
        if !pts.iter().any(|p| p.index == i) {
            pts.push(ValuationPoint {
                index: i,
                val: Valuation::AtLeast(hodge.y_at(i as i64)),
                origin: Origin::Hodge,
            });
        }
    }
    lower_hull(&pts).expect("endpoints are present and exact")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolygonDiff {
    pub equal: bool,
    pub only_left: Vec<(String, u32)>,
    pub only_right: Vec<(String, u32)>,
}

/// Exact slope-multiset comparison of two certified polygons.
pub fn polygon_eq(left: &NewtonPolygon, right: &NewtonPolygon) -> Result<PolygonDiff> {
    if !left.certified || !right.certified {
        return Err(Error::Uncertified);
    }
    let mut counts: BTreeMap<Rational64, i64> = BTreeMap::new();
    for &(s, m) in &left.slopes {
        *counts.entry(s).or_default() += m as i64;
    }
    for &(s, m) in &right.slopes {
        *counts.entry(s).or_default() -= m as i64;
    }
    let only_left: Vec<(String, u32)> = counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| (fmt_rational(*s), c as u32))
        .collect();
    let only_right: Vec<(String, u32)> = counts
        .iter()
        .filter(|(_, &c)| c < 0)
        .map(|(s, &c)| (fmt_rational(*s), (-c) as u32))
        .collect();
    Ok(PolygonDiff {
        equal: only_left.is_empty() && only_right.is_empty(),
        only_left,
        only_right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn slopes(list: &[(i64, i64, u32)]) -> Vec<(Rational64, u32)> {
        list.iter().map(|&(n, d, m)| (r(n, d), m)).collect()
    }

    fn exact_points(list: &[(usize, i64, i64)]) -> Vec<ValuationPoint> {
        list.iter()
            .map(|&(i, n, d)| ValuationPoint::exact(i, r(n, d)))
            .collect()
    }

    #[test]
    fn hull_of_untwisted_octic_data() {
        let pts = exact_points(&[
            (0, 0, 1),
            (1, 1, 2),
            (2, 5, 4),
            (3, 2, 1),
            (4, 3, 1),
            (5, 17, 4),
            (6, 11, 2),
            (7, 7, 1),
        ]);
        let np = lower_hull(&pts).unwrap();
        assert_eq!(
            np.slopes,
            slopes(&[(1, 2, 1), (3, 4, 2), (1, 1, 1), (5, 4, 2), (3, 2, 1)])
        );
        assert_eq!(np.breakpoints(), vec![1, 3, 4, 6]);
        assert!(np.certified);
    }

    #[test]
    fn hull_small_cases() {
        let np = lower_hull(&exact_points(&[(0, 0, 1), (1, 1, 1)])).unwrap();
        assert_eq!(np.slopes, slopes(&[(1, 1, 1)]));
        let np = lower_hull(&exact_points(&[(0, 0, 1), (1, 5, 1), (2, 1, 1)])).unwrap();
        assert_eq!(np.vertices, vec![(0, r(0, 1)), (2, r(1, 1))]);
        assert_eq!(np.slopes, slopes(&[(1, 2, 2)]));
        assert_eq!(
            lower_hull(&exact_points(&[(1, 0, 1), (2, 1, 1)])),
            Err(Error::MissingEndpoint)
        );
        assert_eq!(lower_hull(&[]), Err(Error::MissingEndpoint));
    }

    #[test]
    fn hodge_examples() {
        let h = hodge_polygon(8, 2);
        assert_eq!(
            h.slope_list(),
            (1..8).map(|k| r(2 * k, 8)).collect::<Vec<_>>()
        );
        assert_eq!(*h.vertices.last().unwrap(), (7, r(7, 1)));
        assert_eq!(hodge_polygon(2, 1).slopes, slopes(&[(1, 2, 1)]));
        assert_eq!(hodge_polygon(3, 1).slopes, slopes(&[(1, 3, 1), (2, 3, 1)]));
    }

    #[test]
    fn reflection_of_measured_points() {
        let known = exact_points(&[(1, 1, 2), (2, 5, 4), (3, 2, 1)]);
        let refl = symmetry_bounds(&known, 8, 2);
        let get = |i: usize| refl.iter().find(|p| p.index == i).unwrap().val;
        assert_eq!(get(4), Valuation::exact(3, 1));
        assert_eq!(get(5), Valuation::exact(17, 4));
        assert_eq!(get(6), Valuation::exact(11, 2));
        assert_eq!(get(7), Valuation::exact(7, 1));

        let twisted = vec![
            ValuationPoint::bound(2, r(2, 1)),
            ValuationPoint::bound(3, r(3, 1)),
        ];
        let refl = symmetry_bounds(&twisted, 8, 2);
        let get = |i: usize| refl.iter().find(|p| p.index == i).unwrap().val;
        assert_eq!(get(4), Valuation::at_least(4, 1));
        assert_eq!(get(5), Valuation::at_least(5, 1));

        let base = symmetry_bounds(&exact_points(&[(0, 0, 1)]), 8, 2);
        assert_eq!(
            base,
            vec![ValuationPoint {
                index: 7,
                val: Valuation::exact(7, 1),
                origin: Origin::Endpoint
            }]
        );
    }

    #[test]
    fn certify_untwisted_data() {
        let known = exact_points(&[(1, 1, 2), (2, 5, 4), (3, 2, 1)]);
        let refl = symmetry_bounds(&known, 8, 2);
        let np = certify(&known, &refl, 8, 2);
        assert!(np.certified);
        assert_eq!(
            np.slopes,
            slopes(&[(1, 2, 1), (3, 4, 2), (1, 1, 1), (5, 4, 2), (3, 2, 1)])
        );
    }

    #[test]
    fn certify_twisted_data() {
        let mut known = exact_points(&[(1, 1, 2)]);
        known.push(ValuationPoint::bound(2, r(2, 1)));
        known.push(ValuationPoint::bound(3, r(3, 1)));
        let refl = symmetry_bounds(&known, 8, 2);
        let np = certify(&known, &refl, 8, 2);
        assert!(np.certified, "{np:?}");
        assert_eq!(np.slopes, slopes(&[(1, 2, 1), (1, 1, 5), (3, 2, 1)]));
        assert_eq!(np.breakpoints(), vec![1, 6]);
    }

    #[test]
    fn certify_without_interior_data() {
        assert!(certify(&[], &[], 2, 1).certified);
        assert!(!certify(&[], &[], 3, 1).certified);
        assert!(certify(&[], &[], 1, 1).certified);
    }

    #[test]
    fn bound_vertex_blocks_certification() {
        let pts = vec![
            ValuationPoint::exact(0, r(0, 1)),
            ValuationPoint::bound(1, r(0, 1)),
            ValuationPoint::exact(2, r(2, 1)),
        ];
        let np = lower_hull(&pts).unwrap();
        assert!(!np.certified);
        assert_eq!(np.blocking, vec![1]);
    }

    #[test]
    fn comparison() {
        let one = NewtonPolygon::from_slopes(
            &slopes(&[(1, 2, 1), (3, 4, 2), (1, 1, 1), (5, 4, 2), (3, 2, 1)]),
            true,
        );
        let two = NewtonPolygon::from_slopes(&slopes(&[(1, 2, 1), (1, 1, 5), (3, 2, 1)]), true);
        let diff = polygon_eq(&one, &two).unwrap();
        assert!(!diff.equal);
        assert_eq!(
            diff.only_left,
            vec![("3/4".to_string(), 2), ("5/4".to_string(), 2)]
        );
        assert_eq!(diff.only_right, vec![("1/1".to_string(), 4)]);
        assert!(polygon_eq(&one, &one).unwrap().equal);
        let mut loose = one.clone();
        loose.certified = false;
        assert_eq!(polygon_eq(&one, &loose), Err(Error::Uncertified));
    }

    #[test]
    fn trivial_slope_round_trip() {
        let np = NewtonPolygon::from_slopes(&slopes(&[(1, 2, 1)]), true);
        let star = np.with_trivial_slope();
        assert_eq!(star.slopes, slopes(&[(0, 1, 1), (1, 2, 1)]));
        assert_eq!(star.strip_trivial_slope(), np);
        assert!(np.is_symmetric(1));
        assert!(np.lies_above(&hodge_polygon(2, 1)));
    }
}
