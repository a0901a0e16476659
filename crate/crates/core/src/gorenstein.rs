//! Gorenstein cones, splittings, nef partitions and height cases.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{
    dot, dot_int_rat, hermite_normal_form, integer_kernel, rat_from_int, smith_normal_form,
    solve_rational, sub_vec, to_int_vec, Int, IntVector, Matrix, Rat, RatVector, SolutionSet,
};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::TorusDivisor;
use crate::polytope::{PointSet, Polytope};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GorensteinKind {
    NotQGorenstein,
    QGorenstein,
    AlmostGorenstein,
    ReflexiveGorenstein,
}

impl fmt::Display for GorensteinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GorensteinKind::NotQGorenstein => "NotQGorenstein",
            GorensteinKind::QGorenstein => "QGorenstein",
            GorensteinKind::AlmostGorenstein => "AlmostGorenstein",
            GorensteinKind::ReflexiveGorenstein => "ReflexiveGorenstein",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GorensteinCertificate {
    pub kind: GorensteinKind,
    /// Functional with value 1 on every primitive generator.
    pub m_sigma: Option<RatVector>,
    /// Integral element of value 1 on every generator of the dual cone.
    pub n_dual: Option<IntVector>,
    /// `⟨m_σ, n_dual⟩`, present for reflexive cones.
    pub index: Option<Int>,
}

impl GorensteinCertificate {
    /// The degree element as an integer vector, when integral.
    pub fn m_int(&self) -> Option<IntVector> {
        self.m_sigma.as_ref().and_then(|m| to_int_vec(m))
    }

    /// Index as a machine integer, when reflexive.
    pub fn index_usize(&self) -> Option<usize> {
        self.index.as_ref().and_then(|r| r.to_string().parse().ok())
    }
}

/// The rational `m` with `⟨m, v⟩ = 1` on all generators, chosen inside the
/// span of the cone so that it is unique.
pub fn gorenstein_element(c: &Cone) -> Option<RatVector> {
    let gens = c.generators();
    if gens.is_empty() {
        return None;
    }
    let g = Matrix::from_rows(c.rank(), gens).expect("generators share the rank");
    let gram = (&g * &g.transpose()).to_rat();
    let ones = vec![Rat::one(); gens.len()];
    let y = match solve_rational(&gram, &ones).ok()? {
        SolutionSet::None => return None,
        other => other.any().cloned()?,
    };
    let m: RatVector = (0..c.rank())
        .map(|j| {
            gens.iter()
                .zip(&y)
                .fold(Rat::zero(), |acc, (v, c)| acc + rat_from_int(&v[j]) * c)
        })
        .collect();
    gens.iter()
        .all(|v| dot_int_rat(v, &m).is_one())
        .then_some(m)
}

/// Classifies a strictly convex full-dimensional cone.
pub fn classify(c: &Cone) -> Result<GorensteinCertificate> {
    if !c.is_strictly_convex() {
        return Err(Error::NotStrictlyConvex);
    }
    if !c.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let m = gorenstein_element(c);
    let mut cert = GorensteinCertificate {
        kind: GorensteinKind::NotQGorenstein,
        m_sigma: m.clone(),
        n_dual: None,
        index: None,
    };
    let Some(m) = m else {
        return Ok(cert);
    };
    let Some(m_int) = to_int_vec(&m) else {
        cert.kind = GorensteinKind::QGorenstein;
        return Ok(cert);
    };
    cert.kind = GorensteinKind::AlmostGorenstein;
    let dual = c.dual();
    if let Some(n) = gorenstein_element(&dual).and_then(|n| to_int_vec(&n)) {
        cert.kind = GorensteinKind::ReflexiveGorenstein;
        cert.index = Some(dot(&m_int, &n));
        cert.n_dual = Some(n);
    }
    Ok(cert)
}

/// Lattice points of `C ∩ {⟨m, ·⟩ = h}`.
pub fn height_slice(c: &Cone, m: &[Int], h: &Int) -> Result<PointSet> {
    let mut ineq: Vec<(IntVector, Int)> = c
        .facets()
        .iter()
        .map(|f| (f.clone(), Int::zero()))
        .collect();
    for e in c.equations() {
        ineq.push((e.clone(), Int::zero()));
        ineq.push((e.iter().map(|x| -x).collect(), Int::zero()));
    }
    ineq.push((m.to_vec(), -h));
    ineq.push((m.iter().map(|x| -x).collect(), h.clone()));
    let p = Polytope::from_inequalities(c.rank(), ineq)?;
    p.lattice_points()
}

/// `r` height-one lattice points of a cone summing to the dual degree element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingCertificate {
    pub points: Vec<IntVector>,
    /// Some point occurs more than once.
    pub repeats: bool,
}

impl SplittingCertificate {
    /// Re-verifies membership, heights and the sum identity from scratch.
    pub fn verify(&self, c: &Cone, m: &[Int], n: &[Int]) -> bool {
        let mut sum = vec![Int::zero(); c.rank()];
        for p in &self.points {
            if !c.contains_int(p).unwrap_or(false) || !dot(m, p).is_one() {
                return false;
            }
            sum = crate::arith::add_vec(&sum, p);
        }
        sum == n
    }
}

fn reflexive_data(cert: &GorensteinCertificate) -> Result<(IntVector, IntVector, usize)> {
    if cert.kind != GorensteinKind::ReflexiveGorenstein {
        return Err(Error::NotReflexive);
    }
    let m = cert.m_int().ok_or(Error::NotReflexive)?;
    let n = cert.n_dual.clone().ok_or(Error::NotReflexive)?;
    let r = cert.index_usize().ok_or(Error::NotReflexive)?;
    Ok((m, n, r))
}

fn search_splittings(
    c: &Cone,
    m: &[Int],
    n: &[Int],
    r: usize,
    first_only: bool,
) -> Result<Vec<SplittingCertificate>> {
    if r == 0 {
        return Ok(Vec::new());
    }
    let slice = height_slice(c, m, &Int::one())?.sorted();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    split_dfs(c, &slice, n, r, 0, &mut chosen, &mut out, first_only)?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn split_dfs(
    c: &Cone,
    slice: &[IntVector],
    remaining: &[Int],
    r: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SplittingCertificate>,
    first_only: bool,
) -> Result<()> {
    if first_only && !out.is_empty() {
        return Ok(());
    }
    if chosen.len() + 1 == r {
        if let Ok(pos) = slice.binary_search_by(|p| p.as_slice().cmp(remaining)) {
            if pos >= start {
                let mut idx = chosen.clone();
                idx.push(pos);
                let repeats = idx.windows(2).any(|w| w[0] == w[1]);
                out.push(SplittingCertificate {
                    points: idx.iter().map(|&i| slice[i].clone()).collect(),
                    repeats,
                });
            }
        }
        return Ok(());
    }
    for i in start..slice.len() {
        let rest = sub_vec(remaining, &slice[i]);
        if !c.contains_int(&rest)? {
            continue;
        }
        chosen.push(i);
        split_dfs(c, slice, &rest, r, i, chosen, out, first_only)?;
        chosen.pop();
        if first_only && !out.is_empty() {
            return Ok(());
        }
    }
    Ok(())
}

/// The first splitting in canonical order (sorted height-one points,
/// nondecreasing index multisets), if any.
pub fn completely_split(
    c: &Cone,
    cert: &GorensteinCertificate,
) -> Result<Option<SplittingCertificate>> {
    let (m, n, r) = reflexive_data(cert)?;
    Ok(search_splittings(c, &m, &n, r, true)?.into_iter().next())
}

/// Every splitting, in canonical order.
pub fn all_splittings(c: &Cone, cert: &GorensteinCertificate) -> Result<Vec<SplittingCertificate>> {
    let (m, n, r) = reflexive_data(cert)?;
    search_splittings(c, &m, &n, r, false)
}

/// Every way to write `n` as a sum of `⟨m, n⟩` lattice points of `c` at
/// height one against `m`, for explicitly given degree elements.
pub fn splittings_with_elements(
    c: &Cone,
    m: &[Int],
    n: &[Int],
) -> Result<Vec<SplittingCertificate>> {
    let r = dot(m, n);
    let r = r
        .to_usize()
        .ok_or_else(|| Error::Invalid(format!("pairing ⟨m, n⟩ = {r} is not a valid index")))?;
    search_splittings(c, m, n, r, false)
}

/// Nef-partition data of a cone whose primal and dual sides are both
/// completely split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NefPartition {
    pub certificate: GorensteinCertificate,
    /// Splitting points `p_i` in the cone.
    pub splitting: SplittingCertificate,
    /// Splitting points `q_j` in the dual cone.
    pub dual_splitting: SplittingCertificate,
    /// `pairing[i] = j` with `⟨q_j, p_i⟩ = 1`.
    pub pairing: Vec<usize>,
    /// Extreme-ray generators in part `i`, those with `⟨q_{pairing[i]}, v⟩ = 1`.
    pub parts: Vec<Vec<IntVector>>,
    /// Invariant factors of the splitting points; all 1 for a free quotient.
    pub invariant_factors: Vec<Int>,
    /// Lattice basis of `∩ ker q_j`, identified with the quotient lattice.
    pub quotient_basis: Vec<IntVector>,
    /// Distinct nonzero projections of the generators, in quotient coordinates.
    pub projected_rays: Vec<IntVector>,
    /// For each projected ray, the generator it came from.
    pub ray_sources: Vec<IntVector>,
    /// `D′_i`: coefficient 1 on the projected rays from part `i`.
    pub divisors: Vec<TorusDivisor>,
}

impl NefPartition {
    pub fn r(&self) -> usize {
        self.splitting.points.len()
    }

    pub fn quotient_rank(&self) -> usize {
        self.quotient_basis.len()
    }

    /// Image of `x` in the quotient lattice, in basis coordinates.
    pub fn project(&self, x: &[Int]) -> Result<IntVector> {
        let mut y = x.to_vec();
        for (i, p) in self.splitting.points.iter().enumerate() {
            let q = &self.dual_splitting.points[self.pairing[i]];
            let c = dot(q, x);
            y = sub_vec(&y, &crate::arith::scale_vec(p, &c));
        }
        coordinates(&self.quotient_basis, &y)
    }

    /// Part index of a dual-side point `m`: the unique `i` with
    /// `⟨m, p_i⟩ = 1`, all others 0.
    pub fn part_of_dual_point(&self, m: &[Int]) -> Result<usize> {
        let values: Vec<Int> = self.splitting.points.iter().map(|p| dot(m, p)).collect();
        for (part, v) in values.iter().enumerate() {
            if v.is_negative() {
                return Err(Error::NegativeSplitPairing { index: 0, part });
            }
        }
        let ones: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_one()).collect();
        if ones.len() == 1 && values.iter().filter(|v| !v.is_zero()).count() == 1 {
            Ok(ones[0])
        } else {
            Err(Error::InvalidPotential(format!(
                "point pairs with the splitting points as {values:?}, expected a single 1"
            )))
        }
    }
}

fn coordinates(basis: &[IntVector], y: &[Int]) -> Result<IntVector> {
    if basis.is_empty() {
        return if y.iter().all(Zero::is_zero) {
            Ok(Vec::new())
        } else {
            Err(Error::Invalid(
                "vector outside the quotient complement".into(),
            ))
        };
    }
    let a = Matrix::from_rows(y.len(), basis)
        .expect("basis vectors share a length")
        .transpose()
        .to_rat();
    let b: RatVector = y.iter().map(rat_from_int).collect();
    match solve_rational(&a, &b)? {
        SolutionSet::Unique(c) => to_int_vec(&c).ok_or(Error::NonPrimitiveProjection),
        _ => Err(Error::Invalid(
            "vector outside the quotient complement".into(),
        )),
    }
}

fn l1(points: &[IntVector]) -> Int {
    points.iter().flatten().map(|x| x.abs()).sum()
}

/// Nef partition using the first primal splitting in canonical order.
pub fn nef_partition(c: &Cone) -> Result<NefPartition> {
    let cert = classify(c)?;
    let splitting = completely_split(c, &cert)?.ok_or(Error::NotSplit)?;
    nef_partition_with(c, &cert, &splitting.points)
}

/// Nef partition for a prescribed primal splitting. The dual splitting is
/// the one of least total absolute value, ties broken by canonical order.
pub fn nef_partition_with(
    c: &Cone,
    cert: &GorensteinCertificate,
    splitting: &[IntVector],
) -> Result<NefPartition> {
    let (m, n, r) = reflexive_data(cert)?;
    if splitting.len() != r {
        return Err(Error::NotSplit);
    }
    partition(c, cert, &m, &n, splitting)
}

/// Nef-partition data relative to explicit degree elements `m` on the dual
/// side and `n = Σ p_i` on the cone side, without requiring reflexivity.
pub fn nef_partition_with_elements(
    c: &Cone,
    m: &[Int],
    n: &[Int],
    splitting: &[IntVector],
) -> Result<NefPartition> {
    let cert = classify(c)?;
    partition(c, &cert, m, n, splitting)
}

fn partition(
    c: &Cone,
    cert: &GorensteinCertificate,
    m: &[Int],
    n: &[Int],
    splitting: &[IntVector],
) -> Result<NefPartition> {
    let r = splitting.len();
    if r == 0 {
        return Err(Error::NotSplit);
    }
    let splitting = SplittingCertificate {
        points: splitting.to_vec(),
        repeats: (0..splitting.len()).any(|i| splitting[i + 1..].contains(&splitting[i])),
    };
    if !splitting.verify(c, m, n) {
        return Err(Error::NotSplit);
    }
    let dual = c.dual();
    let dual_splittings = search_splittings(&dual, n, m, r, false)?;
    let dual_splitting = dual_splittings
        .into_iter()
        .min_by(|a, b| l1(&a.points).cmp(&l1(&b.points)))
        .ok_or(Error::NotSplit)?;

    let mut pairing = Vec::with_capacity(r);
    for p in &splitting.points {
        let hits: Vec<usize> = (0..r)
            .filter(|&j| dot(&dual_splitting.points[j], p).is_one())
            .collect();
        match hits.as_slice() {
            [j] => pairing.push(*j),
            _ => return Err(Error::NotSplit),
        }
    }

    let generators = c.extreme_rays()?;
    let mut parts: Vec<Vec<IntVector>> = vec![Vec::new(); r];
    for v in &generators {
        let hits: Vec<usize> = (0..r)
            .filter(|&i| dot(&dual_splitting.points[pairing[i]], v).is_one())
            .collect();
        match hits.as_slice() {
            [i] => parts[*i].push(v.clone()),
            _ => return Err(Error::NotSplit),
        }
    }

    let pmat = Matrix::from_rows(c.rank(), &splitting.points).expect("points share the rank");
    let invariant_factors = smith_normal_form(&pmat).invariant_factors();
    if invariant_factors.iter().any(|d| !d.is_one()) || invariant_factors.len() != r {
        return Err(Error::TorsionQuotient(
            invariant_factors.iter().map(|d| d.to_string()).collect(),
        ));
    }
    let qmat = Matrix::from_rows(c.rank(), &dual_splitting.points).expect("points share the rank");
    let kernel = integer_kernel(&qmat);
    let quotient_basis = if kernel.is_empty() {
        Vec::new()
    } else {
        hermite_normal_form(&Matrix::from_rows(c.rank(), &kernel).expect("kernel rows")).row_vecs()
    };

    let mut nef = NefPartition {
        certificate: cert.clone(),
        splitting,
        dual_splitting,
        pairing,
        parts,
        invariant_factors,
        quotient_basis,
        projected_rays: Vec::new(),
        ray_sources: Vec::new(),
        divisors: Vec::new(),
    };
    let mut ray_part = Vec::new();
    for (i, part) in nef.parts.iter().enumerate() {
        for v in part {
            let image = nef.project(v)?;
            if image.iter().all(Zero::is_zero) {
                continue;
            }
            if !crate::arith::gcd_all(&image).is_one() {
                return Err(Error::NonPrimitiveProjection);
            }
            if nef.projected_rays.contains(&image) {
                return Err(Error::Invalid(
                    "two generators project to the same ray".into(),
                ));
            }
            nef.projected_rays.push(image);
            nef.ray_sources.push(v.clone());
            ray_part.push(i);
        }
    }
    nef.divisors = (0..r)
        .map(|i| {
            TorusDivisor::new(
                ray_part
                    .iter()
                    .map(|&p| if p == i { Int::one() } else { Int::zero() })
                    .collect(),
            )
        })
        .collect();
    Ok(nef)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeightCase {
    AllHeights1,
    AllAbove1,
    AllBelow1,
    Mixed,
}

impl fmt::Display for HeightCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HeightCase::AllHeights1 => "AllHeights1",
            HeightCase::AllAbove1 => "AllAbove1",
            HeightCase::AllBelow1 => "AllBelow1",
            HeightCase::Mixed => "Mixed",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightPartition {
    pub case: HeightCase,
    pub nu_eq1: Vec<IntVector>,
    /// Points off height one, with their heights.
    pub nu_ne1: Vec<(IntVector, Rat)>,
}

/// Splits `points` by their height against `m` and classifies the rest.
pub fn nu_height_case(points: &PointSet, m: &[Rat]) -> HeightPartition {
    let mut nu_eq1 = Vec::new();
    let mut nu_ne1 = Vec::new();
    for p in points.points() {
        let h = dot_int_rat(p, m);
        if h.is_one() {
            nu_eq1.push(p.clone());
        } else {
            nu_ne1.push((p.clone(), h));
        }
    }
    let one = Rat::one();
    let case = if nu_ne1.is_empty() {
        HeightCase::AllHeights1
    } else if nu_ne1.iter().all(|(_, h)| h > &one) {
        HeightCase::AllAbove1
    } else if nu_ne1.iter().all(|(_, h)| h < &one) {
        HeightCase::AllBelow1
    } else {
        HeightCase::Mixed
    };
    HeightPartition {
        case,
        nu_eq1,
        nu_ne1,
    }
}
