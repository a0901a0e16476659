//! Rational polytopes, lattice points, Cayley sums and integral closure.

use std::collections::HashSet;
use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    add_vec, dot, dot_int_rat, rank_of_vectors, rat_from_int, sub_vec, to_int_vec, to_rat_vec, Int,
    IntVector, Rat, RatVector,
};
use crate::cone::{generators_of_system, Cone, Side};
use crate::error::{Error, Result};

/// A finite set of distinct lattice points, kept in insertion order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    rank: usize,
    points: Vec<IntVector>,
}

impl PointSet {
    pub fn new(rank: usize, points: Vec<IntVector>) -> Result<PointSet> {
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: p.len(),
                });
            }
            if !seen.insert(p.clone()) {
                return Err(Error::Invalid(format!(
                    "duplicate point {}",
                    crate::arith::fmt_vec(p)
                )));
            }
        }
        Ok(PointSet { rank, points })
    }

    pub fn from_i64(rank: usize, points: &[&[i64]]) -> Result<PointSet> {
        PointSet::new(rank, points.iter().map(|p| crate::arith::ivec(p)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[IntVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[Int]) -> bool {
        self.points.iter().any(|q| q.as_slice() == p)
    }

    pub fn sorted(&self) -> Vec<IntVector> {
        let mut v = self.points.clone();
        v.sort();
        v
    }

    /// Equality as sets, ignoring order.
    pub fn set_eq(&self, other: &PointSet) -> bool {
        self.rank == other.rank && self.sorted() == other.sorted()
    }
}

/// `{x : ⟨a, x⟩ + b ≥ 0 for every (a, b)}`, required to be bounded for
/// anything that enumerates points.
#[derive(Clone, Debug)]
pub struct Polytope {
    rank: usize,
    inequalities: Vec<(IntVector, Int)>,
    vertices: OnceLock<std::result::Result<Vec<RatVector>, Error>>,
}

impl Polytope {
    pub fn from_inequalities(rank: usize, inequalities: Vec<(IntVector, Int)>) -> Result<Polytope> {
        for (a, _) in &inequalities {
            if a.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: a.len(),
                });
            }
        }
        Ok(Polytope {
            rank,
            inequalities,
            vertices: OnceLock::new(),
        })
    }

    /// Convex hull of rational points.
    pub fn from_points(rank: usize, points: &[RatVector]) -> Result<Polytope> {
        if points.is_empty() {
            let empty = vec![(vec![Int::zero(); rank], -Int::one())];
            return Polytope::from_inequalities(rank, empty);
        }
        let lifted: Vec<RatVector> = points
            .iter()
            .map(|p| {
                if p.len() != rank {
                    return Err(Error::DimensionMismatch {
                        expected: rank,
                        got: p.len(),
                    });
                }
                let mut q = p.clone();
                q.push(Rat::one());
                Ok(q)
            })
            .collect::<Result<_>>()?;
        let cone = Cone::from_rational(Side::N, rank + 1, &lifted)?;
        let h = cone.hrep();
        let mut inequalities = Vec::new();
        let split = |v: &IntVector| (v[..rank].to_vec(), v[rank].clone());
        for f in &h.facets {
            inequalities.push(split(f));
        }
        for e in &h.equations {
            let (a, b) = split(e);
            inequalities.push((a.iter().map(|x| -x).collect(), -&b));
            inequalities.push((a, b));
        }
        Polytope::from_inequalities(rank, inequalities)
    }

    pub fn from_int_points(rank: usize, points: &[IntVector]) -> Result<Polytope> {
        let rat: Vec<RatVector> = points.iter().map(|p| to_rat_vec(p)).collect();
        Polytope::from_points(rank, &rat)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn inequalities(&self) -> &[(IntVector, Int)] {
        &self.inequalities
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.inequalities
            .iter()
            .all(|(a, b)| !(dot_int_rat(a, x) + rat_from_int(b)).is_negative())
    }

    pub fn contains_int(&self, x: &[Int]) -> bool {
        self.inequalities
            .iter()
            .all(|(a, b)| !(dot(a, x) + b).is_negative())
    }

    /// Vertices by double description on the homogenized cone.
    pub fn vertices(&self) -> Result<&[RatVector]> {
        let result = self.vertices.get_or_init(|| {
            let rows: Vec<IntVector> = self
                .inequalities
                .iter()
                .map(|(a, b)| {
                    let mut r = a.clone();
                    r.push(b.clone());
                    r
                })
                .chain(std::iter::once(crate::arith::unit_vector(
                    self.rank + 1,
                    self.rank,
                )))
                .collect();
            let g = generators_of_system(self.rank + 1, &rows);
            let mut vertices: Vec<RatVector> = Vec::new();
            let mut recession = !g.lineality.is_empty();
            for ray in &g.rays {
                let t = &ray[self.rank];
                if t.is_zero() {
                    recession = true;
                } else {
                    vertices.push(
                        ray[..self.rank]
                            .iter()
                            .map(|x| Rat::new(x.clone(), t.clone()))
                            .collect(),
                    );
                }
            }
            if vertices.is_empty() {
                return Ok(Vec::new());
            }
            if recession {
                return Err(Error::Unbounded);
            }
            vertices.sort();
            Ok(vertices)
        });
        result.as_deref().map_err(Clone::clone)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.vertices()?.is_empty())
    }

    /// Affine dimension; −1 for the empty polytope.
    pub fn dim(&self) -> Result<isize> {
        let v = self.vertices()?;
        let Some(first) = v.first() else {
            return Ok(-1);
        };
        let l = crate::arith::denominator_lcm(v.iter().flatten());
        let scale = rat_from_int(&l);
        let diffs: Vec<IntVector> = v[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(first)
                    .map(|(x, y)| ((x - y) * &scale).to_integer())
                    .collect()
            })
            .collect();
        Ok(rank_of_vectors(self.rank, &diffs) as isize)
    }

    pub fn is_lattice(&self) -> Result<bool> {
        Ok(self
            .vertices()?
            .iter()
            .all(|v| v.iter().all(Rat::is_integer)))
    }

    /// Lattice vertices, rejecting polytopes with a fractional vertex.
    pub fn lattice_vertices(&self) -> Result<Vec<IntVector>> {
        self.vertices()?
            .iter()
            .map(|v| to_int_vec(v).ok_or(Error::NonLatticeVertex))
            .collect()
    }

    /// `h · P`.
    pub fn dilate(&self, h: &Int) -> Polytope {
        let ineq = self
            .inequalities
            .iter()
            .map(|(a, b)| (a.clone(), b * h))
            .collect();
        Polytope::from_inequalities(self.rank, ineq).expect("same rank")
    }

    /// Integer points, by recursion over coordinates with exact ranges read
    /// off the projections of the vertex set.
    pub fn lattice_points(&self) -> Result<PointSet> {
        let vertices = self.vertices()?;
        if vertices.is_empty() {
            return PointSet::new(self.rank, Vec::new());
        }
        if self.rank == 0 {
            return PointSet::new(0, vec![Vec::new()]);
        }
        let mut projections: Vec<Vec<(IntVector, Int)>> = Vec::with_capacity(self.rank);
        for k in 1..=self.rank {
            if k == self.rank {
                projections.push(self.inequalities.clone());
            } else {
                let projected: Vec<RatVector> = vertices.iter().map(|v| v[..k].to_vec()).collect();
                projections.push(Polytope::from_points(k, &projected)?.inequalities);
            }
        }
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.rank);
        enumerate_points(&projections, &mut prefix, &mut out);
        PointSet::new(self.rank, out)
    }
}

fn enumerate_points(
    projections: &[Vec<(IntVector, Int)>],
    prefix: &mut IntVector,
    out: &mut Vec<IntVector>,
) {
    let k = prefix.len();
    if k == projections.len() {
        out.push(prefix.clone());
        return;
    }
    let mut lo: Option<Int> = None;
    let mut hi: Option<Int> = None;
    for (a, b) in &projections[k] {
        let rest = dot(&a[..k], prefix) + b;
        let c = &a[k];
        if c.is_zero() {
            if rest.is_negative() {
                return;
            }
            continue;
        }
        // c * x + rest >= 0
        if c.is_positive() {
            let bound = (-&rest).div_ceil(c);
            if lo.as_ref().is_none_or(|l| &bound > l) {
                lo = Some(bound);
            }
        } else {
            let bound = rest.div_floor(&-c);
            if hi.as_ref().is_none_or(|h| &bound < h) {
                hi = Some(bound);
            }
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        unreachable!("projections of a bounded polytope bound every coordinate");
    };
    let mut x = lo;
    while x <= hi {
        prefix.push(x.clone());
        enumerate_points(projections, prefix, out);
        prefix.pop();
        x += 1;
    }
}

pub fn lattice_points(p: &Polytope) -> Result<PointSet> {
    p.lattice_points()
}

/// `conv(P_1 + e_1, …, P_r + e_r)` in rank `d + r`.
pub fn cayley_polytope(parts: &[Polytope], r: usize) -> Result<Polytope> {
    if parts.len() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: parts.len(),
        });
    }
    let Some(first) = parts.first() else {
        return Err(Error::Invalid(
            "a Cayley polytope needs at least one part".into(),
        ));
    };
    let d = first.rank();
    let mut points = Vec::new();
    for (i, part) in parts.iter().enumerate() {
        if part.rank() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: part.rank(),
            });
        }
        for v in part.vertices()? {
            let mut p = v.clone();
            p.extend((0..r).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            points.push(p);
        }
    }
    Polytope::from_points(d + r, &points)
}

/// Whether `S` is all the lattice points of its convex hull.
pub fn is_saturated(s: &PointSet) -> Result<bool> {
    let hull = Polytope::from_int_points(s.rank(), s.points())?;
    let all = hull.lattice_points()?;
    Ok(all.len() == s.len())
}

/// Outcome of an integral-closure check up to a height bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralClosure {
    pub closed: bool,
    pub height_bound: usize,
    /// The first lattice point of `h·Δ` that is not a sum of `h` lattice
    /// points of `Δ`, with its height.
    pub witness: Option<(IntVector, usize)>,
}

/// Checks that every lattice point of `h·Δ`, `2 ≤ h ≤ height_bound`, is a
/// sum of `h` lattice points of `Δ`.
pub fn is_integrally_closed(delta: &Polytope, height_bound: usize) -> Result<IntegralClosure> {
    delta.lattice_vertices()?;
    let base = delta.lattice_points()?.sorted();
    // heights are checked in order, so every point of (h−1)Δ already splits
    for h in 2..=height_bound {
        let previous = delta.dilate(&Int::from(h - 1));
        let dilated = delta.dilate(&Int::from(h)).lattice_points()?;
        let fast = SmallSplitter::new(&previous, &base);
        for p in dilated.sorted() {
            let splits = match fast.as_ref().and_then(|f| f.splits(&p)) {
                Some(answer) => answer,
                None => base.iter().any(|b| previous.contains_int(&sub_vec(&p, b))),
            };
            if !splits {
                return Ok(IntegralClosure {
                    closed: false,
                    height_bound,
                    witness: Some((p, h)),
                });
            }
        }
    }
    Ok(IntegralClosure {
        closed: true,
        height_bound,
        witness: None,
    })
}

/// Machine-integer version of the splitting test, with the values
/// `⟨a, b⟩` precomputed for every inequality and every lattice point of `Δ`.
struct SmallSplitter {
    normals: Vec<Vec<i128>>,
    offsets: Vec<i128>,
    /// `base_values[k][j] = ⟨a_j, b_k⟩`.
    base_values: Vec<Vec<i128>>,
}

impl SmallSplitter {
    fn new(p: &Polytope, base: &[IntVector]) -> Option<Self> {
        let small = |v: &[Int]| {
            v.iter()
                .map(|x| x.to_i64().map(i128::from))
                .collect::<Option<Vec<i128>>>()
        };
        let mut normals = Vec::with_capacity(p.inequalities.len());
        let mut offsets = Vec::with_capacity(p.inequalities.len());
        for (a, c) in &p.inequalities {
            normals.push(small(a)?);
            offsets.push(i128::from(c.to_i64()?));
        }
        let base_values = base
            .iter()
            .map(|b| {
                let b = small(b)?;
                normals
                    .iter()
                    .map(|a| dot_small(a, &b))
                    .collect::<Option<Vec<i128>>>()
            })
            .collect::<Option<Vec<_>>>()?;
        Some(SmallSplitter {
            normals,
            offsets,
            base_values,
        })
    }

    /// `None` when `p` does not fit in machine integers.
    fn splits(&self, p: &[Int]) -> Option<bool> {
        let p: Vec<i128> = p
            .iter()
            .map(|x| x.to_i64().map(i128::from))
            .collect::<Option<_>>()?;
        let values: Vec<i128> = self
            .normals
            .iter()
            .zip(&self.offsets)
            .map(|(a, c)| dot_small(a, &p)?.checked_add(*c))
            .collect::<Option<_>>()?;
        Some(
            self.base_values
                .iter()
                .any(|bv| values.iter().zip(bv).all(|(v, w)| v >= w)),
        )
    }
}

fn dot_small(a: &[i128], b: &[i128]) -> Option<i128> {
    a.iter()
        .zip(b)
        .try_fold(0i128, |acc, (x, y)| acc.checked_add(x.checked_mul(*y)?))
}

/// The polytope spanned by the primitive generators of `c`, which must all
/// lie on `⟨m, ·⟩ = 1`.
pub fn support_polytope(c: &Cone, m: &[Int]) -> Result<Polytope> {
    for (index, g) in c.generators().iter().enumerate() {
        if !dot(g, m).is_one() {
            return Err(Error::OffHyperplane { index });
        }
    }
    Polytope::from_int_points(c.rank(), c.generators())
}

/// Translates every point by `v`.
pub fn translate(points: &[IntVector], v: &[Int]) -> Vec<IntVector> {
    points.iter().map(|p| add_vec(p, v)).collect()
}

/// Differences `p − q` for the first point `q`; handy for affine rank.
pub fn affine_rank(points: &[IntVector]) -> usize {
    let Some(first) = points.first() else {
        return 0;
    };
    let diffs: Vec<IntVector> = points[1..].iter().map(|p| sub_vec(p, first)).collect();
    rank_of_vectors(first.len(), &diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ivec, rvec};

    fn poly(points: &[&[i64]]) -> Polytope {
        let rank = points[0].len();
        let pts: Vec<RatVector> = points.iter().map(|p| rvec(p)).collect();
        Polytope::from_points(rank, &pts).unwrap()
    }

    /// Independent scan over a box, membership by inequalities.
    fn box_scan(p: &Polytope, lo: i64, hi: i64) -> Vec<IntVector> {
        let d = p.rank();
        let mut out = Vec::new();
        let mut cur = vec![lo; d];
        loop {
            let v = ivec(&cur);
            if p.contains_int(&v) {
                out.push(v);
            }
            let mut i = 0;
            loop {
                if i == d {
                    out.sort();
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= hi {
                    break;
                }
                cur[i] = lo;
                i += 1;
            }
        }
    }

    #[test]
    fn unit_square_points() {
        let sq = poly(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(sq.lattice_points().unwrap().len(), 4);
        assert_eq!(sq.dim().unwrap(), 2);
    }

    #[test]
    fn anticanonical_triangle_of_the_plane() {
        let t = poly(&[&[-1, -1], &[2, -1], &[-1, 2]]);
        let pts = t.lattice_points().unwrap();
        assert_eq!(pts.len(), 10);
        assert_eq!(pts.sorted(), box_scan(&t, -3, 3));
    }

    #[test]
    fn unbounded_and_empty() {
        let ray = Polytope::from_inequalities(1, vec![(ivec(&[1]), Int::zero())]).unwrap();
        assert_eq!(ray.lattice_points(), Err(Error::Unbounded));
        let empty = Polytope::from_inequalities(
            1,
            vec![(ivec(&[1]), Int::from(-1)), (ivec(&[-1]), Int::zero())],
        )
        .unwrap();
        assert!(empty.lattice_points().unwrap().is_empty());
        assert_eq!(empty.dim().unwrap(), -1);
    }

    #[test]
    fn lower_dimensional_polytope_points() {
        // a segment in the plane x + y = 3 with a fractional endpoint
        let end = vec![Rat::new(5.into(), 2.into()), Rat::new(1.into(), 2.into())];
        let seg = Polytope::from_points(2, &[rvec(&[0, 3]), end]).unwrap();
        let pts = seg.lattice_points().unwrap();
        assert_eq!(
            pts.sorted(),
            vec![ivec(&[0, 3]), ivec(&[1, 2]), ivec(&[2, 1])]
        );
        assert_eq!(seg.dim().unwrap(), 1);
    }

    #[test]
    fn cayley_of_two_segments() {
        let s = poly(&[&[0], &[1]]);
        let c = cayley_polytope(&[s.clone(), s], 2).unwrap();
        let expected = vec![
            rvec(&[0, 0, 1]),
            rvec(&[0, 1, 0]),
            rvec(&[1, 0, 1]),
            rvec(&[1, 1, 0]),
        ];
        assert_eq!(c.vertices().unwrap(), expected.as_slice());
    }

    #[test]
    fn cayley_of_one_part_is_a_lift() {
        let t = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        let c = cayley_polytope(&[t], 1).unwrap();
        assert_eq!(
            c.vertices().unwrap(),
            &[rvec(&[0, 0, 1]), rvec(&[0, 1, 1]), rvec(&[1, 0, 1])][..]
        );
    }

    #[test]
    fn saturation() {
        assert!(
            is_saturated(&PointSet::from_i64(2, &[&[0, 0], &[1, 0], &[0, 1]]).unwrap()).unwrap()
        );
        assert!(!is_saturated(&PointSet::from_i64(2, &[&[0, 0], &[2, 0]]).unwrap()).unwrap());
    }

    #[test]
    fn integral_closure_positive_cases() {
        let simplex = poly(&[&[0, 0], &[1, 0], &[0, 1]]);
        assert!(is_integrally_closed(&simplex, 3).unwrap().closed);
        let seg = poly(&[&[0], &[2]]);
        assert!(is_integrally_closed(&seg, 2).unwrap().closed);
    }

    #[test]
    fn reeve_simplex_is_not_integrally_closed() {
        let reeve = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 2]]);
        assert_eq!(reeve.lattice_points().unwrap().len(), 4);
        // oracle: points of 2Δ in a box, minus pairwise sums of the 4 vertices
        let doubled = box_scan(&reeve.dilate(&Int::from(2)), -1, 4);
        let verts = reeve.lattice_vertices().unwrap();
        let mut sums = HashSet::new();
        for a in &verts {
            for b in &verts {
                sums.insert(add_vec(a, b));
            }
        }
        let missing: Vec<_> = doubled.into_iter().filter(|p| !sums.contains(p)).collect();
        assert_eq!(missing, vec![ivec(&[1, 1, 1])]);
        let res = is_integrally_closed(&reeve, 3).unwrap();
        assert!(!res.closed);
        assert_eq!(res.witness, Some((ivec(&[1, 1, 1]), 2)));
    }

    #[test]
    fn non_lattice_polytope_rejected() {
        let half =
            Polytope::from_points(1, &[vec![Rat::zero()], vec![Rat::new(1.into(), 2.into())]])
                .unwrap();
        assert_eq!(is_integrally_closed(&half, 2), Err(Error::NonLatticeVertex));
    }

    #[test]
    fn support_polytopes() {
        let orthant = Cone::orthant(Side::N, 3);
        let p = support_polytope(&orthant, &ivec(&[1, 1, 1])).unwrap();
        assert_eq!(p.lattice_points().unwrap().len(), 3);
        assert_eq!(p.dim().unwrap(), 2);
        let square =
            Cone::from_i64(Side::N, &[&[0, 0, 1], &[1, 0, 1], &[1, 1, 1], &[0, 1, 1]]).unwrap();
        let sp = support_polytope(&square, &ivec(&[0, 0, 1])).unwrap();
        assert_eq!(sp.lattice_points().unwrap().len(), 4);
        assert_eq!(
            support_polytope(&orthant, &ivec(&[1, 1, 2])).unwrap_err(),
            Error::OffHyperplane { index: 2 }
        );
    }
}
