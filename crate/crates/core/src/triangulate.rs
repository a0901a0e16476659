//! Regular triangulations by weight liftings, their incremental extension,
//! regularity certificates and semiprojective fans.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{
    denominator_lcm, dot_int_rat, dot_rat, fm_feasible, primitive_from_rat, rank_of_vectors,
    rat_from_int, solve_rational, to_int_vec, Inequality, Int, IntVector, Matrix, Rat, RatVector,
    SolutionSet,
};
use crate::cone::{cones_equal, Cone, Side};
use crate::error::{Error, Result};
use crate::fan::{is_subfan, Fan};
use crate::polytope::Polytope;

/// Distinct rational points on the hyperplane `⟨m̄, ·⟩ = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointConfig {
    points: Vec<RatVector>,
    functional: RatVector,
}

impl PointConfig {
    pub fn new(points: Vec<RatVector>, functional: RatVector) -> Result<PointConfig> {
        let d = functional.len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            if !dot_rat(p, &functional).is_one() {
                return Err(Error::PointOffHyperplane { index });
            }
            if points[..index].contains(p) {
                return Err(Error::DegenerateConfiguration(format!(
                    "point {index} is repeated"
                )));
            }
        }
        Ok(PointConfig { points, functional })
    }

    /// Affine points `p`, homogenized to `(p, 1)`.
    pub fn affine(points: &[RatVector]) -> Result<PointConfig> {
        let d = points.first().map_or(0, |p| p.len());
        let lifted = points
            .iter()
            .map(|p| {
                let mut q = p.clone();
                q.push(Rat::one());
                q
            })
            .collect();
        let mut functional = vec![Rat::zero(); d + 1];
        functional[d] = Rat::one();
        PointConfig::new(lifted, functional)
    }

    pub fn affine_i64(points: &[&[i64]]) -> Result<PointConfig> {
        let pts: Vec<RatVector> = points.iter().map(|p| crate::arith::rvec(p)).collect();
        PointConfig::affine(&pts)
    }

    /// Scales each nonzero vector `v` to `v / ⟨m̄, v⟩`, which must be positive.
    pub fn from_rays(rays: &[IntVector], functional: &[Rat]) -> Result<PointConfig> {
        let points = rays
            .iter()
            .enumerate()
            .map(|(index, v)| {
                scale_to_hyperplane(v, functional).ok_or(Error::PointOffHyperplane { index })
            })
            .collect::<Result<Vec<_>>>()?;
        PointConfig::new(points, functional.to_vec())
    }

    pub fn points(&self) -> &[RatVector] {
        &self.points
    }

    pub fn functional(&self) -> &[Rat] {
        &self.functional
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension `D`; full-dimensional cells have `D` vertices.
    pub fn ambient(&self) -> usize {
        self.functional.len()
    }

    pub fn index_of(&self, p: &[Rat]) -> Option<usize> {
        self.points.iter().position(|q| q.as_slice() == p)
    }

    fn rank_of(&self, idx: &[usize]) -> usize {
        let vecs: Vec<IntVector> = idx
            .iter()
            .map(|&i| primitive_from_rat(&self.points[i]).expect("points avoid the origin"))
            .collect();
        rank_of_vectors(self.ambient(), &vecs)
    }

    fn is_full(&self) -> bool {
        let all: Vec<usize> = (0..self.len()).collect();
        self.rank_of(&all) == self.ambient()
    }

    fn hull(&self, idx: &[usize]) -> Result<Polytope> {
        let pts: Vec<RatVector> = idx.iter().map(|&i| self.points[i].clone()).collect();
        Polytope::from_points(self.ambient(), &pts)
    }
}

fn scale_to_hyperplane(v: &[Int], functional: &[Rat]) -> Option<RatVector> {
    let h = dot_int_rat(v, functional);
    h.is_positive()
        .then(|| v.iter().map(|x| rat_from_int(x) / &h).collect())
}

/// Nonnegative weights, one per configuration point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightFunction {
    pub weights: Vec<Rat>,
}

impl WeightFunction {
    pub fn new(weights: Vec<Rat>) -> Result<WeightFunction> {
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::Invalid("weights must be nonnegative".into()));
        }
        Ok(WeightFunction { weights })
    }

    pub fn from_i64(weights: &[i64]) -> Result<WeightFunction> {
        WeightFunction::new(crate::arith::rvec(weights))
    }

    /// Adds a constant so that the least weight is zero. On the hyperplane a
    /// constant is a linear function, so the subdivision is unchanged.
    pub fn normalized(weights: Vec<Rat>) -> WeightFunction {
        let min = weights.iter().min().cloned().unwrap_or_else(Rat::zero);
        WeightFunction {
            weights: weights.into_iter().map(|w| w - &min).collect(),
        }
    }
}

/// A lower facet `⟨ū, p⟩ + μ·w ≥ 0` of the lifted cone, with `μ > 0`; the
/// offset `c_F` is zero because all points lie on one hyperplane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerFacet {
    pub u_bar: IntVector,
    pub mu: Int,
    pub cell: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedHull {
    pub lifted: Vec<RatVector>,
    pub lower_facets: Vec<LowerFacet>,
}

impl LiftedHull {
    /// Weight `w` at which `v` lifts strictly above every lower facet:
    /// `1 + max_F (−⟨ū_F, v⟩ / μ_F)`.
    pub fn dominating_weight(&self, v: &[Rat]) -> Rat {
        let max = self
            .lower_facets
            .iter()
            .map(|f| -dot_int_rat(&f.u_bar, v) / rat_from_int(&f.mu))
            .max()
            .unwrap_or_else(Rat::zero);
        max + Rat::one()
    }
}

pub fn lift(cfg: &PointConfig, w: &WeightFunction) -> Result<LiftedHull> {
    if w.weights.len() != cfg.len() {
        return Err(Error::DimensionMismatch {
            expected: cfg.len(),
            got: w.weights.len(),
        });
    }
    if !cfg.is_full() {
        return Err(Error::DegenerateConfiguration(
            "points do not span the hyperplane".into(),
        ));
    }
    let d = cfg.ambient();
    let lifted: Vec<RatVector> = cfg
        .points
        .iter()
        .zip(&w.weights)
        .map(|(p, w)| {
            let mut q = p.clone();
            q.push(w.clone());
            q
        })
        .collect();
    let cone = Cone::from_rational(Side::N, d + 1, &lifted)?;
    let mut lower_facets = Vec::new();
    let tight = |f: &IntVector| -> Vec<usize> {
        (0..lifted.len())
            .filter(|&i| dot_int_rat(f, &lifted[i]).is_zero())
            .collect()
    };
    if let Some(eq) = cone.equations().first() {
        // the weights are linear: a single flat cell
        let eq = if eq[d].is_negative() {
            eq.iter().map(|x| -x).collect()
        } else {
            eq.clone()
        };
        lower_facets.push(LowerFacet {
            u_bar: eq[..d].to_vec(),
            mu: eq[d].clone(),
            cell: (0..lifted.len()).collect(),
        });
    } else {
        for f in cone.facets() {
            if f[d].is_positive() {
                lower_facets.push(LowerFacet {
                    u_bar: f[..d].to_vec(),
                    mu: f[d].clone(),
                    cell: tight(f),
                });
            }
        }
    }
    lower_facets.sort_by(|a, b| a.cell.cmp(&b.cell));
    Ok(LiftedHull {
        lifted,
        lower_facets,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub cells: Vec<Vec<usize>>,
    pub is_triangulation: bool,
}

fn is_simplex(cfg: &PointConfig, cell: &[usize]) -> bool {
    cell.len() == cfg.ambient() && cfg.rank_of(cell) == cfg.ambient()
}

/// Cells of the regular subdivision induced by `w`.
pub fn lower_hull_subdivision(cfg: &PointConfig, w: &WeightFunction) -> Result<Subdivision> {
    let hull = lift(cfg, w)?;
    let mut cells: Vec<Vec<usize>> = hull.lower_facets.into_iter().map(|f| f.cell).collect();
    cells.sort();
    let is_triangulation = cells.iter().all(|c| is_simplex(cfg, c));
    Ok(Subdivision {
        cells,
        is_triangulation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularTriangulation {
    pub cells: Vec<Vec<usize>>,
    pub weights: WeightFunction,
}

impl RegularTriangulation {
    /// Whether the weights induce exactly these cells, all simplices.
    pub fn verify(&self, cfg: &PointConfig) -> Result<bool> {
        let sub = lower_hull_subdivision(cfg, &self.weights)?;
        Ok(sub.is_triangulation && sub.cells == canonical_cells(&self.cells))
    }

    pub fn used_points(&self) -> BTreeSet<usize> {
        self.cells.iter().flatten().copied().collect()
    }
}

fn canonical_cells(cells: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = cells
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    out.sort();
    out
}

/// Coefficients of `p` in the basis given by the vertices of a simplex.
fn barycentric(cfg: &PointConfig, cell: &[usize], p: &[Rat]) -> Option<RatVector> {
    let d = cfg.ambient();
    let mut m: Matrix<Rat> = Matrix::zeros(d, cell.len());
    for (j, &i) in cell.iter().enumerate() {
        for k in 0..d {
            m.set(k, j, cfg.points[i][k].clone());
        }
    }
    match solve_rational(&m, p).ok()? {
        SolutionSet::Unique(x) => Some(x),
        _ => None,
    }
}

/// A strictly feasible weight vector inducing `cells`, found by exact
/// Fourier–Motzkin elimination, or `None` if the triangulation is not regular.
pub fn find_regularity_weights(
    cfg: &PointConfig,
    cells: &[Vec<usize>],
) -> Result<Option<WeightFunction>> {
    let cells = canonical_cells(cells);
    let d = cfg.ambient();
    if cells.is_empty() || cells.iter().any(|c| !is_simplex(cfg, c)) {
        return Err(Error::DegenerateConfiguration(
            "cells must be full simplices".into(),
        ));
    }
    let n = cfg.len();
    let fixed: BTreeSet<usize> = cells[0].iter().copied().collect();
    let free: Vec<usize> = (0..n).filter(|i| !fixed.contains(i)).collect();
    let var_of: BTreeMap<usize, usize> = free.iter().enumerate().map(|(v, &i)| (i, v)).collect();

    // w_p − Σ λ_i w_{c_i} > 0
    let constraint = |p: usize, cell: &[usize], lambda: &[Rat]| -> Inequality {
        let mut coeffs = vec![Rat::zero(); free.len()];
        if let Some(&v) = var_of.get(&p) {
            coeffs[v] += Rat::one();
        }
        for (&c, l) in cell.iter().zip(lambda) {
            if let Some(&v) = var_of.get(&c) {
                coeffs[v] -= l;
            }
        }
        Inequality::strict(coeffs, Rat::zero())
    };

    let mut system = Vec::new();
    let mut ridges: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in cells.iter().enumerate() {
        for skip in 0..c.len() {
            let mut r = c.clone();
            r.remove(skip);
            ridges.entry(r).or_default().push(ci);
        }
    }
    for (ridge, owners) in &ridges {
        match owners.as_slice() {
            [_] => {}
            [a, b] => {
                let apex = *cells[*b]
                    .iter()
                    .find(|i| !ridge.contains(i))
                    .expect("ridge misses one vertex");
                let lambda = barycentric(cfg, &cells[*a], &cfg.points[apex])
                    .ok_or_else(|| Error::DegenerateConfiguration("singular cell".into()))?;
                system.push(constraint(apex, &cells[*a], &lambda));
            }
            _ => {
                return Err(Error::DegenerateConfiguration(
                    "a ridge lies in more than two cells".into(),
                ))
            }
        }
    }
    let used: BTreeSet<usize> = cells.iter().flatten().copied().collect();
    for p in (0..n).filter(|p| !used.contains(p)) {
        let mut placed = false;
        for c in &cells {
            let lambda = barycentric(cfg, c, &cfg.points[p])
                .ok_or_else(|| Error::DegenerateConfiguration("singular cell".into()))?;
            if lambda.iter().all(|l| !l.is_negative()) {
                system.push(constraint(p, c, &lambda));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::DegenerateConfiguration(format!(
                "point {p} is not covered by the cells"
            )));
        }
    }
    let _ = d;
    let Some(x) = fm_feasible(&system, free.len()) else {
        return Ok(None);
    };
    let mut weights = vec![Rat::zero(); n];
    for (v, &i) in free.iter().enumerate() {
        weights[i] = x[v].clone();
    }
    let w = WeightFunction::normalized(weights);
    let tri = RegularTriangulation {
        cells: cells.clone(),
        weights: w.clone(),
    };
    if !tri.verify(cfg)? {
        return Err(Error::BadCertificate);
    }
    Ok(Some(w))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtensionCase {
    /// The point lies in the current hull and is lifted out of the way.
    Inside,
    /// The point lies outside and is coned onto the visible boundary.
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionStep {
    pub point: usize,
    pub case: ExtensionCase,
    pub weight: Rat,
    /// Non-simplex cells appeared and were refined by pulling at the point.
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub config: PointConfig,
    pub triangulation: RegularTriangulation,
    pub steps: Vec<ExtensionStep>,
}

/// Extends a regular triangulation of `l0` to one of `l0 ∪ l1` containing
/// every original simplex, inserting new points in lexicographic order.
pub fn extend_triangulation(
    l0: &PointConfig,
    t0: &RegularTriangulation,
    l1: &[RatVector],
) -> Result<Extension> {
    if !t0.verify(l0)? {
        return Err(Error::BadCertificate);
    }
    let mut new_points: Vec<RatVector> = l1
        .iter()
        .filter(|p| l0.index_of(p).is_none())
        .cloned()
        .collect();
    new_points.sort();
    new_points.dedup();
    let mut all = l0.points.clone();
    all.extend(new_points.iter().cloned());
    let combined = PointConfig::new(all, l0.functional.clone()).map_err(|e| match e {
        Error::PointOffHyperplane { index } => Error::PointOffHyperplane {
            index: index - l0.len(),
        },
        other => other,
    })?;
    let all_idx: Vec<usize> = (0..combined.len()).collect();
    let l0_idx: Vec<usize> = (0..l0.len()).collect();
    if combined.rank_of(&all_idx) != combined.rank_of(&l0_idx) {
        return Err(Error::ExtensionDimension);
    }

    let mut cells = canonical_cells(&t0.cells);
    let mut weights = t0.weights.weights.clone();
    let mut steps = Vec::new();
    for k in l0.len()..combined.len() {
        let current: Vec<usize> = (0..k).collect();
        let sub_cfg = PointConfig::new(combined.points[..k].to_vec(), combined.functional.clone())?;
        let v = &combined.points[k];
        let inside = sub_cfg.hull(&current)?.contains(v);
        if inside {
            let w = weights.iter().max().cloned().unwrap_or_else(Rat::zero) + Rat::one();
            weights.push(w.clone());
            steps.push(ExtensionStep {
                point: k,
                case: ExtensionCase::Inside,
                weight: w,
                refined: false,
            });
            continue;
        }
        let hull = lift(
            &sub_cfg,
            &WeightFunction {
                weights: weights.clone(),
            },
        )?;
        let w = hull.dominating_weight(v);
        weights.push(w.clone());
        let next_cfg =
            PointConfig::new(combined.points[..=k].to_vec(), combined.functional.clone())?;
        let sub = lower_hull_subdivision(
            &next_cfg,
            &WeightFunction {
                weights: weights.clone(),
            },
        )?;
        if cells.iter().any(|c| !sub.cells.contains(c)) {
            return Err(Error::Invalid("extension lost an original cell".into()));
        }
        let mut refined = false;
        if sub.is_triangulation {
            cells = sub.cells;
        } else {
            refined = true;
            let mut out = Vec::new();
            for cell in &sub.cells {
                if is_simplex(&next_cfg, cell) {
                    out.push(cell.clone());
                } else {
                    out.extend(cone_from_point(&next_cfg, cell, k, &cells)?);
                }
            }
            cells = canonical_cells(&out);
            let certified = find_regularity_weights(&next_cfg, &cells)?.ok_or(Error::NotRegular)?;
            weights = certified.weights;
        }
        steps.push(ExtensionStep {
            point: k,
            case: ExtensionCase::Outside,
            weight: weights[k].clone(),
            refined,
        });
    }
    let triangulation = RegularTriangulation {
        cells,
        weights: WeightFunction::normalized(weights),
    };
    if !triangulation.verify(&combined)? {
        return Err(Error::BadCertificate);
    }
    Ok(Extension {
        config: combined,
        triangulation,
        steps,
    })
}

/// Splits a non-simplex cell with apex `apex` into cones over the faces of
/// the previous triangulation lying on its facets away from the apex.
fn cone_from_point(
    cfg: &PointConfig,
    cell: &[usize],
    apex: usize,
    previous: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>> {
    if !cell.contains(&apex) {
        return Err(Error::Invalid(
            "non-simplex cell away from the new point".into(),
        ));
    }
    let d = cfg.ambient();
    let pts: Vec<RatVector> = cell.iter().map(|&i| cfg.points[i].clone()).collect();
    let cone = Cone::from_rational(Side::N, d, &pts)?;
    let mut out = Vec::new();
    for f in cone.facets() {
        if dot_int_rat(f, &cfg.points[apex]).is_zero() {
            continue;
        }
        let on_facet: BTreeSet<usize> = cell
            .iter()
            .copied()
            .filter(|&i| dot_int_rat(f, &cfg.points[i]).is_zero())
            .collect();
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in previous {
            let face: Vec<usize> = c.iter().copied().filter(|i| on_facet.contains(i)).collect();
            if face.len() + 1 == d && cfg.rank_of(&face) + 1 == d {
                faces.insert(face);
            }
        }
        for mut face in faces {
            face.push(apex);
            face.sort_unstable();
            out.push(face);
        }
    }
    Ok(out)
}

/// Recursive pulling triangulation: the first point of `order` in each
/// subconfiguration is coned over the triangulated facets avoiding it.
pub fn pulling_triangulation(cfg: &PointConfig, order: &[usize]) -> Result<Vec<Vec<usize>>> {
    if !cfg.is_full() {
        return Err(Error::DegenerateConfiguration(
            "points do not span the hyperplane".into(),
        ));
    }
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut all: Vec<usize> = (0..cfg.len()).collect();
    all.sort_by_key(|i| rank.get(i).copied().unwrap_or(usize::MAX));
    let cells = pull(cfg, &all)?;
    Ok(canonical_cells(&cells))
}

fn pull(cfg: &PointConfig, subset: &[usize]) -> Result<Vec<Vec<usize>>> {
    let dim = cfg.rank_of(subset);
    if subset.len() == dim {
        return Ok(vec![subset.to_vec()]);
    }
    let a = subset[0];
    let pts: Vec<RatVector> = subset.iter().map(|&i| cfg.points[i].clone()).collect();
    let cone = Cone::from_rational(Side::N, cfg.ambient(), &pts)?;
    let mut out = Vec::new();
    for f in cone.facets() {
        if dot_int_rat(f, &cfg.points[a]).is_zero() {
            continue;
        }
        let face: Vec<usize> = subset
            .iter()
            .copied()
            .filter(|&i| dot_int_rat(f, &cfg.points[i]).is_zero())
            .collect();
        for mut c in pull(cfg, &face)? {
            c.push(a);
            out.push(c);
        }
    }
    Ok(out)
}

/// Integral scaling of a regular triangulation's piecewise-linear function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConicalCertificate {
    pub scale: Int,
    /// Per-cell linear functionals `φ_C` with `φ_C(p) = scale · w(p)` on the
    /// cell's vertices; all integral.
    pub functionals: Vec<IntVector>,
}

pub fn conical_certificate(
    cfg: &PointConfig,
    tri: &RegularTriangulation,
) -> Result<ConicalCertificate> {
    let d = cfg.ambient();
    let mut rational = Vec::with_capacity(tri.cells.len());
    for cell in &tri.cells {
        let mut m: Matrix<Rat> = Matrix::zeros(cell.len(), d);
        let mut b = Vec::with_capacity(cell.len());
        for (r, &i) in cell.iter().enumerate() {
            for k in 0..d {
                m.set(r, k, cfg.points[i][k].clone());
            }
            b.push(tri.weights.weights[i].clone());
        }
        match solve_rational(&m, &b)? {
            SolutionSet::Unique(phi) => rational.push(phi),
            _ => return Err(Error::DegenerateConfiguration("singular cell".into())),
        }
    }
    let scale = denominator_lcm(rational.iter().flatten());
    let s = rat_from_int(&scale);
    let functionals = rational
        .iter()
        .map(|phi| {
            let scaled: RatVector = phi.iter().map(|x| x * &s).collect();
            to_int_vec(&scaled).expect("scaled by the denominator lcm")
        })
        .collect();
    Ok(ConicalCertificate { scale, functionals })
}

/// Result of building a semiprojective simplicial fan on a cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiprojectiveFan {
    pub fan: Fan,
    pub mbar: RatVector,
    pub initial_weights: WeightFunction,
    pub extension: Extension,
    /// Configuration index of each ray of `fan`.
    pub ray_points: Vec<usize>,
}

/// Sum of the primitive generators of the dual, positive on `c ∖ {0}`.
pub fn interior_dual_point(c: &Cone) -> Result<IntVector> {
    if !c.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let dual = c.dual();
    let rays = dual.extreme_rays().map_err(|_| Error::NotStrictlyConvex)?;
    Ok(rays.iter().fold(vec![Int::zero(); c.rank()], |acc, r| {
        crate::arith::add_vec(&acc, r)
    }))
}

/// A simplicial fan with support `sigma_prime` containing `subfan`, from a
/// regular triangulation of the generators on a hyperplane `⟨m̄, ·⟩ = 1`.
pub fn semiprojective_fan(
    sigma_prime: &Cone,
    subfan: &Fan,
    mbar: Option<&[Rat]>,
) -> Result<SemiprojectiveFan> {
    if !sigma_prime.is_strictly_convex() {
        return Err(Error::NotStrictlyConvex);
    }
    if !subfan.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    for r in subfan.rays() {
        if !sigma_prime.contains_int(r)? {
            return Err(Error::Sandwich("subfan ray outside the cone".into()));
        }
    }
    let mbar: RatVector = match mbar {
        Some(m) => m.to_vec(),
        None => crate::arith::to_rat_vec(&interior_dual_point(sigma_prime)?),
    };
    let l0 = PointConfig::from_rays(subfan.rays(), &mbar)?;
    let t0_cells = canonical_cells(subfan.max_cones());
    let w0 = find_regularity_weights(&l0, &t0_cells)?.ok_or(Error::NotRegular)?;
    let t0 = RegularTriangulation {
        cells: t0_cells,
        weights: w0.clone(),
    };
    let l1: Vec<RatVector> = sigma_prime
        .generators()
        .iter()
        .map(|g| {
            scale_to_hyperplane(g, &mbar)
                .ok_or_else(|| Error::Invalid("m̄ is not positive on the cone".into()))
        })
        .collect::<Result<_>>()?;
    let extension = extend_triangulation(&l0, &t0, &l1)?;

    let used = extension.triangulation.used_points();
    let ray_points: Vec<usize> = (0..extension.config.len())
        .filter(|i| used.contains(i))
        .collect();
    let position: BTreeMap<usize, usize> = ray_points
        .iter()
        .enumerate()
        .map(|(r, &i)| (i, r))
        .collect();
    let rays: Vec<IntVector> = ray_points
        .iter()
        .map(|&i| primitive_from_rat(&extension.config.points()[i]))
        .collect::<Result<_>>()?;
    let cones: Vec<Vec<usize>> = extension
        .triangulation
        .cells
        .iter()
        .map(|c| c.iter().map(|i| position[i]).collect())
        .collect();
    let fan = Fan::new_unchecked(sigma_prime.rank(), rays, cones)?;
    debug_assert!(fan.is_simplicial());
    debug_assert!(is_subfan(subfan, &fan).unwrap_or(false));
    debug_assert!(cones_equal(&fan.support()?, sigma_prime).unwrap_or(false));
    Ok(SemiprojectiveFan {
        fan,
        mbar,
        initial_weights: w0,
        extension,
        ray_points,
    })
}

/// A complete simplicial fan whose rays are exactly `rays`: the face fan of
/// their convex hull refined by pulling from the origin, then star
/// subdivided at rays left unused.
pub fn complete_simplicial_fan(rank: usize, rays: &[IntVector]) -> Result<Fan> {
    if rank == 0 {
        return Fan::new_unchecked(0, Vec::new(), vec![Vec::new()]);
    }
    let mut pts: Vec<RatVector> = vec![vec![Rat::zero(); rank]];
    pts.extend(rays.iter().map(|r| crate::arith::to_rat_vec(r)));
    let cfg = PointConfig::affine(&pts)?;
    // the rays must positively span for the face fan to be complete
    let spanned = Cone::new(Side::N, rank, rays.to_vec())?;
    if spanned.lineality().len() != rank {
        return Err(Error::NotComplete);
    }
    let order: Vec<usize> = (0..cfg.len()).collect();
    let cells = pulling_triangulation(&cfg, &order)?;
    let mut used = BTreeSet::new();
    let mut cones = Vec::new();
    for c in cells {
        if !c.contains(&0) {
            return Err(Error::NotComplete);
        }
        let cone: Vec<usize> = c.into_iter().filter(|&i| i != 0).map(|i| i - 1).collect();
        used.extend(cone.iter().copied());
        cones.push(cone);
    }
    let used_rays: Vec<usize> = used.into_iter().collect();
    let position: BTreeMap<usize, usize> =
        used_rays.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let mut fan = Fan::new_unchecked(
        rank,
        used_rays.iter().map(|&i| rays[i].clone()).collect(),
        cones
            .iter()
            .map(|c| c.iter().map(|i| position[i]).collect())
            .collect(),
    )?;
    for (i, r) in rays.iter().enumerate() {
        if !position.contains_key(&i) {
            fan = fan.star_subdivision(r)?;
        }
    }
    // restore the caller's ray order
    let order: Vec<usize> = rays
        .iter()
        .map(|r| fan.ray_index(r).expect("every ray was inserted"))
        .collect();
    let mut back = vec![0; rays.len()];
    for (new, &old) in order.iter().enumerate() {
        back[old] = new;
    }
    let cones = fan
        .max_cones()
        .iter()
        .map(|c| c.iter().map(|&i| back[i]).collect())
        .collect();
    Fan::new_unchecked(rank, rays.to_vec(), cones)
}

/// `lcm` helper exposed for certificate checks.
pub fn lcm_all(values: &[Int]) -> Int {
    values.iter().fold(Int::one(), |acc, v| acc.lcm(v))
}
