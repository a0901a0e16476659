//! Fans, Cox data, toric vector-bundle fans and divisor polytopes.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::arith::{
    dot, gcd_all, rank_of_vectors, smith_normal_form, unit_vector, Int, IntMatrix, IntVector,
    Matrix,
};
use crate::cone::{cones_equal, Cone, Side};
use crate::error::{Error, Result};
use crate::polytope::Polytope;

/// A fan given by primitive rays and maximal cones as sorted ray-index sets.
#[derive(Clone, Debug)]
pub struct Fan {
    rank: usize,
    rays: Vec<IntVector>,
    max_cones: Vec<Vec<usize>>,
    cones: OnceLock<Vec<Cone>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Fan) -> bool {
        self.rank == other.rank && self.canonical() == other.canonical()
    }
}

impl Eq for Fan {}

impl Fan {
    /// Builds and fully validates a fan: primitive distinct rays, strictly
    /// convex cones, every ray used, and face-to-face intersections.
    pub fn new(rank: usize, rays: Vec<IntVector>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let fan = Fan::new_unchecked(rank, rays, max_cones)?;
        fan.validate()?;
        Ok(fan)
    }

    /// Builds a fan checking only shapes and ray data; used for fans whose
    /// cone structure is correct by construction.
    pub fn new_unchecked(
        rank: usize,
        rays: Vec<IntVector>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Fan> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: r.len(),
                });
            }
            if !gcd_all(r).is_one() {
                return Err(Error::InvalidFan(format!(
                    "ray {i} is zero or not primitive"
                )));
            }
        }
        for i in 0..rays.len() {
            if rays[i + 1..].contains(&rays[i]) {
                return Err(Error::InvalidFan(format!("ray {i} is repeated")));
            }
        }
        let mut cones: Vec<Vec<usize>> = Vec::with_capacity(max_cones.len());
        for mut c in max_cones {
            c.sort_unstable();
            c.dedup();
            if let Some(&bad) = c.iter().find(|&&i| i >= rays.len()) {
                return Err(Error::InvalidFan(format!("ray index {bad} out of range")));
            }
            if cones.contains(&c) {
                return Err(Error::InvalidFan("a maximal cone is listed twice".into()));
            }
            cones.push(c);
        }
        Ok(Fan {
            rank,
            rays,
            max_cones: cones,
            cones: OnceLock::new(),
        })
    }

    pub fn from_i64(rays: &[&[i64]], max_cones: &[&[usize]]) -> Result<Fan> {
        let rank = rays.first().map_or(0, |r| r.len());
        Fan::new(
            rank,
            rays.iter().map(|r| crate::arith::ivec(r)).collect(),
            max_cones.iter().map(|c| c.to_vec()).collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        let mut used = vec![false; self.rays.len()];
        for c in &self.max_cones {
            for &i in c {
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(Error::InvalidFan(format!(
                "ray {i} lies in no maximal cone"
            )));
        }
        let cones = self.cones();
        for (i, c) in cones.iter().enumerate() {
            if !c.is_strictly_convex() {
                return Err(Error::InvalidFan(format!(
                    "cone {i} is not strictly convex"
                )));
            }
            // every listed ray of a cone must span one of its edges
            if c.extreme_rays()?.len() != c.generators().len() {
                return Err(Error::InvalidFan(format!(
                    "cone {i} lists a non-extreme ray"
                )));
            }
        }
        for i in 0..cones.len() {
            for j in i + 1..cones.len() {
                let meet = cones[i].intersection(&cones[j])?;
                if !cones[i].has_face(&meet)? || !cones[j].has_face(&meet)? {
                    return Err(Error::InvalidFan(format!(
                        "cones {i} and {j} do not meet along a common face"
                    )));
                }
                let common: Vec<IntVector> = self.max_cones[i]
                    .iter()
                    .filter(|r| self.max_cones[j].contains(r))
                    .map(|&r| self.rays[r].clone())
                    .collect();
                if !cones_equal(&meet, &Cone::new(Side::N, self.rank, common)?)? {
                    return Err(Error::InvalidFan(format!(
                        "cones {i} and {j} meet outside their shared rays"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[IntVector] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn ray_index(&self, v: &[Int]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == v)
    }

    /// The maximal cones as [`Cone`] values, in listing order.
    pub fn cones(&self) -> &[Cone] {
        self.cones.get_or_init(|| {
            self.max_cones
                .iter()
                .map(|c| {
                    let gens = c.iter().map(|&i| self.rays[i].clone()).collect();
                    Cone::new(Side::N, self.rank, gens).expect("rays have the fan's rank")
                })
                .collect()
        })
    }

    /// Rays sorted lexicographically and cones re-indexed and sorted.
    pub fn canonical(&self) -> (Vec<IntVector>, Vec<Vec<usize>>) {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut position = vec![0; self.rays.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let rays = order.iter().map(|&i| self.rays[i].clone()).collect();
        let mut cones: Vec<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut v: Vec<usize> = c.iter().map(|&i| position[i]).collect();
                v.sort_unstable();
                v
            })
            .collect();
        cones.sort();
        (rays, cones)
    }

    pub fn canonicalized(&self) -> Fan {
        let (rays, cones) = self.canonical();
        Fan::new_unchecked(self.rank, rays, cones).expect("canonical form of a valid fan")
    }

    /// Facets of maximal cone `i` as sorted ray-index sets.
    pub fn cone_facets(&self, i: usize) -> Vec<Vec<usize>> {
        let idx = &self.max_cones[i];
        let cone = &self.cones()[i];
        let mut out: Vec<Vec<usize>> = cone
            .facets()
            .iter()
            .map(|f| {
                idx.iter()
                    .copied()
                    .filter(|&r| dot(f, &self.rays[r]).is_zero())
                    .collect()
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn cone_dim(&self, i: usize) -> usize {
        self.cones()[i].dim()
    }

    fn is_pure(&self) -> Option<usize> {
        let dims: Vec<usize> = (0..self.max_cones.len())
            .map(|i| self.cone_dim(i))
            .collect();
        let first = *dims.first()?;
        dims.iter().all(|&d| d == first).then_some(first)
    }

    /// Number of maximal cones containing each facet.
    fn facet_incidence(&self) -> BTreeMap<Vec<usize>, usize> {
        let mut counts = BTreeMap::new();
        for i in 0..self.max_cones.len() {
            for f in self.cone_facets(i) {
                *counts.entry(f).or_insert(0) += 1;
            }
        }
        counts
    }

    pub fn is_simplicial(&self) -> bool {
        (0..self.max_cones.len()).all(|i| self.cone_dim(i) == self.max_cones[i].len())
    }

    /// Every cone's rays extend to a lattice basis.
    pub fn is_smooth(&self) -> bool {
        self.is_simplicial()
            && self.max_cones.iter().all(|c| {
                let rows: Vec<IntVector> = c.iter().map(|&i| self.rays[i].clone()).collect();
                let m = Matrix::from_rows(self.rank, &rows).expect("rays share the rank");
                smith_normal_form(&m)
                    .invariant_factors()
                    .iter()
                    .all(One::is_one)
            })
    }

    /// Pure, full-dimensional, and every facet of a maximal cone is shared by
    /// exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        if self.is_pure() != Some(self.rank) {
            return false;
        }
        if self.rank == 0 {
            return true;
        }
        self.facet_incidence().values().all(|&n| n == 2)
    }

    /// The cone `|F|`, provided the union of the cones is convex.
    ///
    /// Convexity is certified for pure fans by checking that every facet lying
    /// in a single maximal cone sits inside a facet of the cone generated by
    /// all rays.
    pub fn support(&self) -> Result<Cone> {
        let hull = Cone::new(Side::N, self.rank, self.rays.clone())?;
        if self.max_cones.is_empty() {
            return Ok(hull);
        }
        let Some(dim) = self.is_pure() else {
            return Err(Error::NonConvexSupport);
        };
        if dim != hull.dim() {
            return Err(Error::NonConvexSupport);
        }
        for (facet, count) in self.facet_incidence() {
            if count > 2 {
                return Err(Error::InvalidFan(
                    "a facet lies in more than two cones".into(),
                ));
            }
            if count == 2 {
                continue;
            }
            let on_boundary = hull
                .facets()
                .iter()
                .any(|f| facet.iter().all(|&r| dot(f, &self.rays[r]).is_zero()));
            if !on_boundary {
                return Err(Error::NonConvexSupport);
            }
        }
        Ok(hull)
    }

    /// Whether `v` lies in some cone of the fan.
    pub fn contains(&self, v: &[Int]) -> Result<bool> {
        for c in self.cones() {
            if c.contains_int(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn cox_charge_matrix(&self) -> CoxData {
        cox_charge_matrix(self)
    }

    pub fn star_subdivision(&self, ray: &[Int]) -> Result<Fan> {
        star_subdivision(self, ray)
    }

    pub fn monomial_exponents(&self, m: &[Int]) -> Result<MonomialExponents> {
        monomial_exponents(self, m)
    }
}

/// A torus-invariant divisor `Σ a_ρ D_ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusDivisor {
    pub coeffs: IntVector,
}

impl TorusDivisor {
    pub fn new(coeffs: IntVector) -> TorusDivisor {
        TorusDivisor { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> TorusDivisor {
        TorusDivisor::new(crate::arith::ivec(coeffs))
    }

    pub fn zero(n: usize) -> TorusDivisor {
        TorusDivisor::new(vec![Int::zero(); n])
    }

    pub fn negate(&self) -> TorusDivisor {
        TorusDivisor::new(self.coeffs.iter().map(|c| -c).collect())
    }

    fn check(&self, fan: &Fan) -> Result<()> {
        if self.coeffs.len() == fan.rays().len() {
            Ok(())
        } else {
            Err(Error::CoefficientCount {
                expected: fan.rays().len(),
                got: self.coeffs.len(),
            })
        }
    }
}

/// Presentation of the class group `coker(m ↦ (⟨m, u_ρ⟩)_ρ)`: the free part
/// as integer charge rows, the torsion part as `(modulus, row)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxData {
    pub charge_matrix: IntMatrix,
    pub torsion: Vec<(Int, IntVector)>,
}

pub fn cox_charge_matrix(fan: &Fan) -> CoxData {
    let k = fan.rays().len();
    let ray_matrix = Matrix::from_rows(fan.rank(), fan.rays()).expect("rays share the rank");
    let snf = smith_normal_form(&ray_matrix);
    let diag = snf.diagonal();
    let r = snf.rank();
    let free: Vec<IntVector> = (r..k).map(|i| snf.u_inv.row(i).to_vec()).collect();
    let torsion = diag
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero() && !d.is_one())
        .map(|(i, d)| {
            let row = snf
                .u_inv
                .row(i)
                .iter()
                .map(|x| num_integer::Integer::mod_floor(x, d))
                .collect();
            (d.clone(), row)
        })
        .collect();
    CoxData {
        charge_matrix: Matrix::from_rows(k, &free).expect("rows of U⁻¹ have length k"),
        torsion,
    }
}

/// The fan of the total space of `⊕ O(D_i)`: rays `u_ρ − Σ_i a_{iρ} e_i`
/// followed by `e_1, …, e_r`, with one cone per maximal cone of `F`.
pub fn vector_bundle_fan(fan: &Fan, divisors: &[TorusDivisor]) -> Result<Fan> {
    if divisors.is_empty() {
        return Err(Error::NoDivisors);
    }
    for d in divisors {
        d.check(fan)?;
    }
    let (d, r) = (fan.rank(), divisors.len());
    let mut rays: Vec<IntVector> = fan
        .rays()
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let mut v = u.clone();
            v.extend(divisors.iter().map(|div| -&div.coeffs[j]));
            v
        })
        .collect();
    let base = rays.len();
    rays.extend((0..r).map(|i| unit_vector(d + r, d + i)));
    let cones = fan
        .max_cones()
        .iter()
        .map(|c| {
            let mut v = c.clone();
            v.extend(base..base + r);
            v
        })
        .collect();
    Fan::new_unchecked(d + r, rays, cones)
}

/// Replaces each maximal cone containing `ray` by the joins of `ray` with
/// its facets that miss it.
pub fn star_subdivision(fan: &Fan, ray: &[Int]) -> Result<Fan> {
    if ray.len() != fan.rank() {
        return Err(Error::DimensionMismatch {
            expected: fan.rank(),
            got: ray.len(),
        });
    }
    let ray = crate::arith::primitive(ray)?;
    if fan.ray_index(&ray).is_some() {
        return Ok(fan.clone());
    }
    let mut rays = fan.rays().to_vec();
    let new_index = rays.len();
    rays.push(ray.clone());
    let mut cones = Vec::new();
    let mut touched = false;
    for (i, c) in fan.max_cones().iter().enumerate() {
        if !fan.cones()[i].contains_int(&ray)? {
            cones.push(c.clone());
            continue;
        }
        touched = true;
        for facet in fan.cone_facets(i) {
            let facet_cone = Cone::new(
                Side::N,
                fan.rank(),
                facet.iter().map(|&r| fan.rays()[r].clone()).collect(),
            )?;
            if facet_cone.contains_int(&ray)? {
                continue;
            }
            let mut v = facet.clone();
            v.push(new_index);
            if !cones.contains(&v) {
                cones.push(v);
            }
        }
        if fan.cone_dim(i) == 1 {
            cones.push(vec![new_index]);
        }
    }
    if !touched {
        return Err(Error::RayOutsideSupport);
    }
    Fan::new_unchecked(fan.rank(), rays, cones)
}

pub fn support(fan: &Fan) -> Result<Cone> {
    fan.support()
}

/// Every maximal cone of `a` is a face of some cone of `b`.
pub fn is_subfan(a: &Fan, b: &Fan) -> Result<bool> {
    if a.rank() != b.rank() {
        return Err(Error::DimensionMismatch {
            expected: b.rank(),
            got: a.rank(),
        });
    }
    for c in a.cones() {
        let mut found = false;
        for d in b.cones() {
            if d.has_face(c)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_simplicial(fan: &Fan) -> bool {
    fan.is_simplicial()
}

pub fn is_smooth(fan: &Fan) -> bool {
    fan.is_smooth()
}

pub fn is_complete(fan: &Fan) -> bool {
    fan.is_complete()
}

/// `P_D = {m : ⟨m, u_ρ⟩ ≥ −a_ρ}`, rejected when unbounded.
pub fn divisor_polytope(fan: &Fan, d: &TorusDivisor) -> Result<Polytope> {
    d.check(fan)?;
    let ineq = fan
        .rays()
        .iter()
        .zip(&d.coeffs)
        .map(|(u, a)| (u.clone(), a.clone()))
        .collect();
    let p = Polytope::from_inequalities(fan.rank(), ineq)?;
    p.vertices()?;
    Ok(p)
}

/// Exponents `⟨m, u_ρ⟩` of `χ^m` in Cox coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialExponents {
    pub exponents: IntVector,
    /// All exponents are nonnegative, so the monomial is a global function.
    pub global: bool,
}

pub fn monomial_exponents(fan: &Fan, m: &[Int]) -> Result<MonomialExponents> {
    if m.len() != fan.rank() {
        return Err(Error::DimensionMismatch {
            expected: fan.rank(),
            got: m.len(),
        });
    }
    let exponents: IntVector = fan.rays().iter().map(|u| dot(u, m)).collect();
    let global = exponents.iter().all(|e| !e.is_negative());
    Ok(MonomialExponents { exponents, global })
}

/// Renders a monomial from exponents, e.g. `x1^2*x5^2*x9*x11`.
pub fn format_monomial(exponents: &[Int], names: &[String]) -> String {
    let parts: Vec<String> = exponents
        .iter()
        .zip(names)
        .filter(|(e, _)| !e.is_zero())
        .map(|(e, n)| {
            if e.is_one() {
                n.clone()
            } else {
                format!("{n}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Ray-index map from `a` into `b` by equal primitive vectors.
pub fn ray_correspondence(a: &Fan, b: &Fan) -> HashMap<usize, usize> {
    a.rays()
        .iter()
        .enumerate()
        .filter_map(|(i, r)| b.ray_index(r).map(|j| (i, j)))
        .collect()
}

/// Whether the rays of a simplicial fan's cones are linearly independent
/// and the fan spans `rank` dimensions.
pub fn spans(fan: &Fan) -> bool {
    rank_of_vectors(fan.rank(), fan.rays()) == fan.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{ivec, row_lattice_equal};

    fn plane() -> Fan {
        Fan::from_i64(&[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2], &[0, 2]]).unwrap()
    }

    fn line() -> Fan {
        Fan::from_i64(&[&[1], &[-1]], &[&[0], &[1]]).unwrap()
    }

    fn p3() -> Fan {
        let rays: &[&[i64]] = &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]];
        Fan::from_i64(rays, &[&[0, 1, 2], &[0, 1, 3], &[0, 2, 3], &[1, 2, 3]]).unwrap()
    }

    #[test]
    fn plane_is_complete_and_smooth() {
        let f = plane();
        assert!(f.is_complete());
        assert!(f.is_smooth());
        assert!(f.is_simplicial());
    }

    #[test]
    fn index_two_cone() {
        let f = Fan::from_i64(&[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap();
        assert!(f.is_simplicial());
        assert!(!f.is_smooth());
        assert!(!f.is_complete());
    }

    #[test]
    fn overlapping_cones_rejected() {
        let bad = Fan::from_i64(&[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 1], &[0, 2]]);
        assert!(matches!(bad, Err(Error::InvalidFan(_))));
        let unused = Fan::from_i64(&[&[1, 0], &[0, 1]], &[&[0]]);
        assert!(matches!(unused, Err(Error::InvalidFan(_))));
        let not_primitive = Fan::from_i64(&[&[2, 0]], &[&[0]]);
        assert!(matches!(not_primitive, Err(Error::InvalidFan(_))));
    }

    #[test]
    fn plane_charge_matrix() {
        let cox = plane().cox_charge_matrix();
        let expected = IntMatrix::from_i64(&[&[1, 1, 1]]).unwrap();
        assert!(row_lattice_equal(&cox.charge_matrix, &expected));
        assert!(cox.torsion.is_empty());
    }

    #[test]
    fn torsion_is_reported() {
        // rays (1,0), (1,2): class group Z/2
        let f = Fan::from_i64(&[&[1, 0], &[1, 2]], &[&[0, 1]]).unwrap();
        let cox = f.cox_charge_matrix();
        assert_eq!(cox.charge_matrix.rows(), 0);
        assert_eq!(cox.torsion.len(), 1);
        assert_eq!(cox.torsion[0].0, Int::from(2));
    }

    #[test]
    fn trivial_line_bundle_over_the_line() {
        let f = vector_bundle_fan(&line(), &[TorusDivisor::zero(2)]).unwrap();
        assert_eq!(f.rays(), &[ivec(&[1, 0]), ivec(&[-1, 0]), ivec(&[0, 1])]);
        assert_eq!(f.max_cones().len(), 2);
        let validated = Fan::new(2, f.rays().to_vec(), f.max_cones().to_vec()).unwrap();
        assert_eq!(validated, f);
    }

    #[test]
    fn canonical_bundle_of_p3_is_a_star_subdivision() {
        let bundle =
            vector_bundle_fan(&p3(), &[TorusDivisor::from_i64(&[-1, -1, -1, -1])]).unwrap();
        let big: &[&[i64]] = &[
            &[1, 0, 0, 1],
            &[0, 1, 0, 1],
            &[0, 0, 1, 1],
            &[-1, -1, -1, 1],
        ];
        let single = Fan::from_i64(big, &[&[0, 1, 2, 3]]).unwrap();
        let sub = star_subdivision(&single, &ivec(&[0, 0, 0, 1])).unwrap();
        assert_eq!(sub, bundle);
        assert_eq!(sub.max_cones().len(), 4);
        assert!(!is_subfan(&single, &bundle).unwrap());
        assert!(is_subfan(&bundle, &bundle).unwrap());
        assert_eq!(bundle.support().unwrap().generators().len(), 5);
        let cox = bundle.cox_charge_matrix();
        let expected = IntMatrix::from_i64(&[&[1, 1, 1, 1, -4]]).unwrap();
        assert!(row_lattice_equal(&cox.charge_matrix, &expected));
    }

    #[test]
    fn star_subdivision_of_a_quadrant() {
        let f = Fan::from_i64(&[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap();
        let s = star_subdivision(&f, &ivec(&[1, 1])).unwrap();
        let expected = Fan::from_i64(&[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 2], &[2, 1]]).unwrap();
        assert_eq!(s, expected);
        assert_eq!(star_subdivision(&f, &ivec(&[0, 1])).unwrap(), f);
        assert_eq!(
            star_subdivision(&f, &ivec(&[-1, 1])),
            Err(Error::RayOutsideSupport)
        );
        assert!(cones_equal(&s.support().unwrap(), &f.support().unwrap()).unwrap());
    }

    #[test]
    fn non_convex_support_rejected() {
        let f = Fan::from_i64(&[&[1, 0], &[0, 1], &[-1, 0]], &[&[0, 1], &[1, 2]]).unwrap();
        assert!(f.support().is_ok());
        let g =
            Fan::from_i64(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[&[0, 1], &[2, 3]]).unwrap();
        assert_eq!(g.support().unwrap_err(), Error::NonConvexSupport);
        let l = Fan::from_i64(&[&[1, 0], &[0, 1], &[-1, -1]], &[&[0, 1], &[1, 2]]).unwrap();
        assert_eq!(l.support().unwrap_err(), Error::NonConvexSupport);
    }

    #[test]
    fn divisor_polytopes() {
        let seg = divisor_polytope(&line(), &TorusDivisor::from_i64(&[1, 0])).unwrap();
        assert_eq!(
            seg.lattice_points().unwrap().sorted(),
            vec![ivec(&[-1]), ivec(&[0])]
        );
        let zero = divisor_polytope(&plane(), &TorusDivisor::zero(3)).unwrap();
        assert_eq!(zero.lattice_points().unwrap().sorted(), vec![ivec(&[0, 0])]);
        let quartic = divisor_polytope(&p3(), &TorusDivisor::from_i64(&[4, 0, 0, 0])).unwrap();
        assert_eq!(quartic.lattice_points().unwrap().len(), 35);
        let quadrant = Fan::from_i64(&[&[1, 0], &[0, 1]], &[&[0, 1]]).unwrap();
        assert_eq!(
            divisor_polytope(&quadrant, &TorusDivisor::zero(2)).unwrap_err(),
            Error::Unbounded
        );
    }

    #[test]
    fn constant_monomial() {
        let e = monomial_exponents(&plane(), &ivec(&[0, 0])).unwrap();
        assert_eq!(e.exponents, ivec(&[0, 0, 0]));
        assert!(e.global);
        let names: Vec<String> = (1..=3).map(|i| format!("x{i}")).collect();
        assert_eq!(format_monomial(&e.exponents, &names), "1");
        let f = monomial_exponents(&plane(), &ivec(&[2, -1])).unwrap();
        assert!(!f.global);
    }
}
