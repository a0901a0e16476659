//! Rational polyhedral cones with exact duals by double description.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};

use crate::arith::{
    dot, dot_int_rat, integer_kernel, primitive, primitive_from_rat, rank_of_vectors, rat_from_int,
    rref, IntVector, Matrix, Rat, RatMatrix, RatVector,
};
use crate::error::{Error, Result};

/// Which lattice a cone lives in. Duals flip the tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    N,
    M,
}

impl Side {
    pub fn dual(self) -> Side {
        match self {
            Side::N => Side::M,
            Side::M => Side::N,
        }
    }
}

/// Outer description `{x : ⟨f, x⟩ ≥ 0 ∀ f ∈ facets, ⟨e, x⟩ = 0 ∀ e ∈ equations}`.
///
/// Facet normals are primitive and chosen inside the linear span of the
/// cone, so they are unique. Equations form a lattice basis of the
/// orthogonal complement of the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HRep {
    pub facets: Vec<IntVector>,
    pub equations: Vec<IntVector>,
}

/// A finitely generated cone `Cone(v_1, …, v_k)` in a lattice of fixed rank.
#[derive(Clone)]
pub struct Cone {
    rank: usize,
    side: Side,
    generators: Vec<IntVector>,
    hrep: OnceLock<HRep>,
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cone")
            .field("rank", &self.rank)
            .field("side", &self.side)
            .field("generators", &self.generators)
            .finish()
    }
}

impl Cone {
    /// Builds a cone from arbitrary integer generators. Zero vectors are
    /// dropped, the rest are made primitive and positive duplicates removed.
    pub fn new(side: Side, rank: usize, generators: Vec<IntVector>) -> Result<Cone> {
        let mut gens: Vec<IntVector> = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: g.len(),
                });
            }
            if g.iter().all(Zero::is_zero) {
                continue;
            }
            let p = primitive(&g)?;
            if !gens.contains(&p) {
                gens.push(p);
            }
        }
        Ok(Cone {
            rank,
            side,
            generators: gens,
            hrep: OnceLock::new(),
        })
    }

    pub fn from_i64(side: Side, generators: &[&[i64]]) -> Result<Cone> {
        let rank = generators.first().map_or(0, |g| g.len());
        Cone::new(
            side,
            rank,
            generators.iter().map(|g| crate::arith::ivec(g)).collect(),
        )
    }

    /// The cone over rational points, each scaled to its primitive vector.
    pub fn from_rational(side: Side, rank: usize, points: &[RatVector]) -> Result<Cone> {
        let mut gens = Vec::with_capacity(points.len());
        for p in points {
            if p.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: p.len(),
                });
            }
            if p.iter().all(Zero::is_zero) {
                continue;
            }
            gens.push(primitive_from_rat(p)?);
        }
        Cone::new(side, rank, gens)
    }

    pub fn zero(side: Side, rank: usize) -> Cone {
        Cone::new(side, rank, Vec::new()).expect("empty generator list")
    }

    pub fn orthant(side: Side, rank: usize) -> Cone {
        let gens = (0..rank)
            .map(|i| crate::arith::unit_vector(rank, i))
            .collect();
        Cone::new(side, rank, gens).expect("unit vectors are primitive")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn generators(&self) -> &[IntVector] {
        &self.generators
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        rank_of_vectors(self.rank, &self.generators)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dim() == self.rank
    }

    pub fn hrep(&self) -> &HRep {
        self.hrep.get_or_init(|| {
            let g = generators_of_system(self.rank, &self.generators);
            HRep {
                facets: g.rays,
                equations: g.lineality,
            }
        })
    }

    pub fn facets(&self) -> &[IntVector] {
        &self.hrep().facets
    }

    pub fn equations(&self) -> &[IntVector] {
        &self.hrep().equations
    }

    fn check_rank(&self, len: usize) -> Result<()> {
        if len == self.rank {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.rank,
                got: len,
            })
        }
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        self.check_rank(v.len())?;
        let h = self.hrep();
        Ok(h.facets.iter().all(|f| !dot_int_rat(f, v).is_negative())
            && h.equations.iter().all(|e| dot_int_rat(e, v).is_zero()))
    }

    pub fn contains_int(&self, v: &[crate::arith::Int]) -> Result<bool> {
        self.check_rank(v.len())?;
        let h = self.hrep();
        Ok(h.facets.iter().all(|f| !dot(f, v).is_negative())
            && h.equations.iter().all(|e| dot(e, v).is_zero()))
    }

    /// Whether `v` lies in the relative interior.
    pub fn contains_in_relative_interior(&self, v: &[crate::arith::Int]) -> Result<bool> {
        self.check_rank(v.len())?;
        let h = self.hrep();
        Ok(h.facets.iter().all(|f| dot(f, v).is_positive())
            && h.equations.iter().all(|e| dot(e, v).is_zero()))
    }

    /// Integer basis of the lineality space `C ∩ −C`.
    pub fn lineality(&self) -> Vec<IntVector> {
        let h = self.hrep();
        let rows: Vec<IntVector> = h.facets.iter().chain(&h.equations).cloned().collect();
        if rows.is_empty() {
            return (0..self.rank)
                .map(|i| crate::arith::unit_vector(self.rank, i))
                .collect();
        }
        integer_kernel(&Matrix::from_rows(self.rank, &rows).expect("rows share the rank"))
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.lineality().is_empty()
    }

    /// `{m : ⟨m, v⟩ ≥ 0}` over all generators, in the dual lattice.
    pub fn dual(&self) -> Cone {
        let h = self.hrep();
        let mut gens = h.facets.clone();
        for e in &h.equations {
            gens.push(e.clone());
            gens.push(e.iter().map(|x| -x).collect());
        }
        Cone::new(self.side.dual(), self.rank, gens).expect("facet data has the cone's rank")
    }

    /// Generators spanning extreme rays. Only meaningful for strictly convex
    /// cones, where these are the minimal generating set.
    pub fn extreme_rays(&self) -> Result<Vec<IntVector>> {
        if !self.is_strictly_convex() {
            return Err(Error::NotStrictlyConvex);
        }
        let h = self.hrep();
        let d = self.dim();
        Ok(self
            .generators
            .iter()
            .filter(|g| {
                let tight: Vec<IntVector> = h
                    .facets
                    .iter()
                    .filter(|f| dot(f, g).is_zero())
                    .cloned()
                    .collect();
                rank_of_vectors(self.rank, &tight) + 1 == d
            })
            .cloned()
            .collect())
    }

    /// The same cone generated by its extreme rays only.
    pub fn minimized(&self) -> Result<Cone> {
        Cone::new(self.side, self.rank, self.extreme_rays()?)
    }

    pub fn intersection(&self, other: &Cone) -> Result<Cone> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        if self.side != other.side {
            return Err(Error::SideMismatch);
        }
        let mut rows: Vec<IntVector> = Vec::new();
        for h in [self.hrep(), other.hrep()] {
            rows.extend(h.facets.iter().cloned());
            for e in &h.equations {
                rows.push(e.clone());
                rows.push(e.iter().map(|x| -x).collect());
            }
        }
        let g = generators_of_system(self.rank, &rows);
        let mut gens = g.rays;
        for l in g.lineality {
            gens.push(l.iter().map(|x| -x).collect());
            gens.push(l);
        }
        Cone::new(self.side, self.rank, gens)
    }

    /// Whether `face` is a face of this cone (the zero cone is a face of every
    /// strictly convex cone).
    pub fn has_face(&self, face: &Cone) -> Result<bool> {
        for g in face.generators() {
            if !self.contains_int(g)? {
                return Ok(false);
            }
        }
        let point = face
            .generators()
            .iter()
            .fold(vec![crate::arith::Int::zero(); self.rank], |acc, g| {
                crate::arith::add_vec(&acc, g)
            });
        let tight: Vec<&IntVector> = self
            .facets()
            .iter()
            .filter(|f| dot(f, &point).is_zero())
            .collect();
        let minimal: Vec<IntVector> = self
            .generators
            .iter()
            .filter(|g| tight.iter().all(|f| dot(f, g).is_zero()))
            .cloned()
            .collect();
        let minimal_face = Cone::new(self.side, self.rank, minimal)?;
        cones_equal(&minimal_face, face)
    }

    /// Sum of the generators, a point of the relative interior.
    pub fn interior_point(&self) -> IntVector {
        self.generators
            .iter()
            .fold(vec![crate::arith::Int::zero(); self.rank], |acc, g| {
                crate::arith::add_vec(&acc, g)
            })
    }
}

pub fn dual_cone(c: &Cone) -> Cone {
    c.dual()
}

/// Set equality by mutual generator containment.
pub fn cones_equal(a: &Cone, b: &Cone) -> Result<bool> {
    if a.rank != b.rank {
        return Err(Error::DimensionMismatch {
            expected: a.rank,
            got: b.rank,
        });
    }
    if a.side != b.side {
        return Err(Error::SideMismatch);
    }
    for g in a.generators() {
        if !b.contains_int(g)? {
            return Ok(false);
        }
    }
    for g in b.generators() {
        if !a.contains_int(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Generators of `{x : ⟨a, x⟩ ≥ 0 ∀ a ∈ rows}`: a lattice basis of the
/// lineality space plus primitive extreme rays of a pointed complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generated {
    pub lineality: Vec<IntVector>,
    pub rays: Vec<IntVector>,
}

pub fn generators_of_system(dim: usize, rows: &[IntVector]) -> Generated {
    let rows: Vec<IntVector> = rows
        .iter()
        .filter(|r| !r.iter().all(Zero::is_zero))
        .map(|r| primitive(r).expect("nonzero row"))
        .collect();
    if rows.is_empty() {
        return Generated {
            lineality: (0..dim)
                .map(|i| crate::arith::unit_vector(dim, i))
                .collect(),
            rays: Vec::new(),
        };
    }
    let a = Matrix::from_rows(dim, &rows).expect("rows share the dimension");
    let lineality = integer_kernel(&a);

    // independent rows of A span the complement of its kernel
    let (_, pivots) = rref(&a.transpose().to_rat());
    let basis: Vec<IntVector> = pivots.iter().map(|&i| rows[i].clone()).collect();
    let k = basis.len();
    let reduced: Vec<IntVector> = rows
        .iter()
        .map(|r| basis.iter().map(|b| dot(r, b)).collect())
        .collect();

    let rays_y = double_description(k, &reduced, &pivots);
    let mut rays: Vec<IntVector> = rays_y
        .iter()
        .map(|y| {
            let x: IntVector = (0..dim)
                .map(|j| {
                    basis
                        .iter()
                        .zip(y)
                        .fold(crate::arith::Int::zero(), |acc, (b, c)| acc + &b[j] * c)
                })
                .collect();
            primitive(&x).expect("rays of a pointed cone are nonzero")
        })
        .collect();
    rays.sort();
    rays.dedup();
    Generated { lineality, rays }
}

struct Ray {
    y: IntVector,
    zeros: Vec<u64>,
}

fn bit_set(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Extreme rays of the pointed cone `{y ∈ Q^k : R y ≥ 0}` where `R` has rank
/// `k` and the rows at `seed` are linearly independent.
fn double_description(k: usize, rows: &[IntVector], seed: &[usize]) -> Vec<IntVector> {
    if k == 0 {
        return Vec::new();
    }
    let words = rows.len().div_ceil(64);
    let seed_matrix: RatMatrix = Matrix::from_rows(
        k,
        &seed
            .iter()
            .map(|&i| rows[i].iter().map(rat_from_int).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
    .expect("seed rows have length k");
    let inverse = invert(&seed_matrix);

    let mut rays: Vec<Ray> = (0..k)
        .map(|j| {
            let y = primitive_from_rat(&inverse.column(j)).expect("inverse columns are nonzero");
            let mut zeros = vec![0u64; words];
            for (t, &i) in seed.iter().enumerate() {
                if t != j {
                    bit_set(&mut zeros, i);
                }
            }
            Ray { y, zeros }
        })
        .collect();

    let mut processed: Vec<usize> = seed.to_vec();
    for (i, row) in rows.iter().enumerate() {
        if seed.contains(&i) {
            continue;
        }
        let values: Vec<crate::arith::Int> = rays.iter().map(|r| dot(row, &r.y)).collect();
        let mut next: Vec<Ray> = Vec::new();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (idx, v) in values.iter().enumerate() {
            if v.is_positive() {
                pos.push(idx);
            } else if v.is_negative() {
                neg.push(idx);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common: Vec<u64> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[n].zeros)
                    .map(|(a, b)| a & b)
                    .collect();
                let count: u32 = common.iter().map(|w| w.count_ones()).sum();
                if (count as usize) + 2 < k {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(r, ray)| r == p || r == n || !subset(&common, &ray.zeros));
                if !adjacent {
                    continue;
                }
                let vp = &values[p];
                let vn = -&values[n];
                let y: IntVector = rays[p]
                    .y
                    .iter()
                    .zip(&rays[n].y)
                    .map(|(a, b)| a * &vn + b * vp)
                    .collect();
                let y = primitive(&y).expect("combination of independent rays is nonzero");
                let mut zeros = common;
                bit_set(&mut zeros, i);
                next.push(Ray { y, zeros });
            }
        }
        for (idx, mut ray) in rays.into_iter().enumerate() {
            if values[idx].is_negative() {
                continue;
            }
            if values[idx].is_zero() {
                bit_set(&mut ray.zeros, i);
            }
            next.push(ray);
        }
        rays = next;
        processed.push(i);
    }
    rays.into_iter().map(|r| r.y).collect()
}

fn invert(m: &RatMatrix) -> RatMatrix {
    let n = m.rows();
    let mut aug: RatMatrix = Matrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n + i, Rat::from_integer(1.into()));
    }
    let (r, _) = rref(&aug);
    let mut inv: RatMatrix = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, r.get(i, n + j).clone());
        }
    }
    inv
}
