//! The exoflop pipeline: model assembly, the potential cone, the conical
//! assumption, potential rewriting and the verdict.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::arith::{dot, rat_from_int, to_rat_vec, unit_vector, Int, IntVector, Rat, RatVector};
use crate::cone::{cones_equal, Cone, Side};
use crate::error::{Error, Result};
use crate::fan::{cox_charge_matrix, vector_bundle_fan, CoxData, Fan, TorusDivisor};
use crate::gorenstein::{
    classify, completely_split, gorenstein_element, nef_partition_with_elements, nu_height_case,
    GorensteinCertificate, GorensteinKind, HeightCase, HeightPartition, NefPartition,
    SplittingCertificate,
};
use crate::polytope::{
    is_integrally_closed, is_saturated, support_polytope, IntegralClosure, PointSet, Polytope,
};
use crate::triangulate::{complete_simplicial_fan, semiprojective_fan, SemiprojectiveFan};

pub const PROVISO_GENERIC: &str = "generic coefficients assumed";
pub const PROVISO_SMOOTHNESS: &str = "smoothness unverified";
pub const PROVISO_FANO: &str =
    "Fano property of the output base verified only through completeness";

/// One monomial of a potential: a lattice point with a coefficient label and
/// an optional value. A value of zero removes the point from the support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialTerm {
    pub point: IntVector,
    pub label: String,
    pub value: Option<Rat>,
}

impl PotentialTerm {
    pub fn new(point: IntVector, label: impl Into<String>) -> PotentialTerm {
        PotentialTerm {
            point,
            label: label.into(),
            value: None,
        }
    }

    pub fn is_present(&self) -> bool {
        self.value.as_ref().is_none_or(|v| !v.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSupport {
    rank: usize,
    entries: Vec<PotentialTerm>,
}

impl PotentialSupport {
    pub fn new(rank: usize, entries: Vec<PotentialTerm>) -> Result<PotentialSupport> {
        for (i, e) in entries.iter().enumerate() {
            if e.point.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    got: e.point.len(),
                });
            }
            if entries[..i].iter().any(|f| f.point == e.point) {
                return Err(Error::InvalidPotential(format!("point {i} is repeated")));
            }
            if entries[..i].iter().any(|f| f.label == e.label) {
                return Err(Error::InvalidPotential(format!(
                    "label {} is repeated",
                    e.label
                )));
            }
        }
        Ok(PotentialSupport { rank, entries })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[PotentialTerm] {
        &self.entries
    }

    /// Terms with nonzero coefficient.
    pub fn present(&self) -> Vec<&PotentialTerm> {
        self.entries.iter().filter(|e| e.is_present()).collect()
    }

    pub fn label_of(&self, point: &[Int]) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.point.as_slice() == point)
            .map(|e| e.label.as_str())
    }
}

/// A gauged Landau–Ginzburg model on the total space of `⊕ O(−D_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LGModel {
    pub base: Fan,
    pub divisors: Vec<TorusDivisor>,
    pub bundle: Fan,
    pub potential: PotentialSupport,
    pub cox: CoxData,
    /// Weight 0 on the base coordinates and 1 on each fibre coordinate.
    pub rcharge: IntVector,
}

impl LGModel {
    pub fn d(&self) -> usize {
        self.base.rank()
    }

    pub fn r(&self) -> usize {
        self.divisors.len()
    }

    /// `𝔪 = e*_{d+1} + … + e*_{d+r}` on the dual side.
    pub fn m_frak(&self) -> IntVector {
        self.fibre_sum()
    }

    /// `𝔫 = e_{d+1} + … + e_{d+r}`.
    pub fn n_frak(&self) -> IntVector {
        self.fibre_sum()
    }

    fn fibre_sum(&self) -> IntVector {
        (0..self.d() + self.r())
            .map(|i| {
                if i < self.d() {
                    Int::zero()
                } else {
                    Int::one()
                }
            })
            .collect()
    }

    /// The fibre rays `e_{d+i}`, the identity splitting.
    pub fn fibre_rays(&self) -> Vec<IntVector> {
        (0..self.r())
            .map(|i| unit_vector(self.d() + self.r(), self.d() + i))
            .collect()
    }

    pub fn bundle_support(&self) -> Result<Cone> {
        self.bundle.support()
    }
}

pub fn build_lg_model(
    base: Fan,
    divisors: Vec<TorusDivisor>,
    potential: PotentialSupport,
) -> Result<LGModel> {
    if !base.is_simplicial() {
        return Err(Error::NotSimplicial);
    }
    if !base.is_complete() {
        return Err(Error::NotComplete);
    }
    if divisors.is_empty() {
        return Err(Error::NoDivisors);
    }
    let k = base.rays().len();
    for d in &divisors {
        if d.coeffs.len() != k {
            return Err(Error::CoefficientCount {
                expected: k,
                got: d.coeffs.len(),
            });
        }
    }
    for ray in 0..k {
        let column: Vec<&Int> = divisors.iter().map(|d| &d.coeffs[ray]).collect();
        let ok = column.iter().all(|a| a.is_zero() || a.is_one())
            && column.iter().filter(|a| a.is_one()).count() == 1;
        if !ok {
            return Err(Error::DeltaCondition { ray });
        }
    }
    let negated: Vec<TorusDivisor> = divisors.iter().map(TorusDivisor::negate).collect();
    let bundle = vector_bundle_fan(&base, &negated)?;
    let (d, r) = (base.rank(), divisors.len());
    if potential.rank() != d + r {
        return Err(Error::DimensionMismatch {
            expected: d + r,
            got: potential.rank(),
        });
    }
    if potential.present().is_empty() {
        return Err(Error::EmptyPotential);
    }
    for (index, e) in potential.entries().iter().enumerate() {
        let height: Int = e.point[d..].iter().sum();
        if !height.is_one() {
            return Err(Error::PotentialHeight {
                index,
                height: height.to_string(),
            });
        }
        if bundle.rays().iter().any(|v| dot(v, &e.point).is_negative()) {
            return Err(Error::PotentialOutsideDual { index });
        }
    }
    let cox = cox_charge_matrix(&bundle);
    let rcharge = (0..k + r)
        .map(|j| if j < k { Int::zero() } else { Int::one() })
        .collect();
    Ok(LGModel {
        base,
        divisors,
        bundle,
        potential,
        cox,
        rcharge,
    })
}

#[derive(Clone, Debug)]
pub struct SigmaW {
    pub xi: PointSet,
    pub cone: Cone,
    pub saturated: bool,
    /// Lattice points of the slice `|Σ_{−D}|^∨ ∩ {⟨·, 𝔫⟩ = 1}`.
    pub full_slice: usize,
    /// `conv(Ξ_W)` is strictly smaller than the full slice.
    pub strict: bool,
}

pub fn sigma_w(model: &LGModel) -> Result<SigmaW> {
    let points: Vec<IntVector> = model
        .potential
        .present()
        .iter()
        .map(|e| e.point.clone())
        .collect();
    if points.is_empty() {
        return Err(Error::EmptyPotential);
    }
    let rank = model.d() + model.r();
    let xi = PointSet::new(rank, points)?;
    let cone = Cone::new(Side::M, rank, xi.points().to_vec())?;
    let saturated = is_saturated(&xi)?;
    let n = model.n_frak();
    let mut ineq: Vec<(IntVector, Int)> = model
        .bundle
        .rays()
        .iter()
        .map(|v| (v.clone(), Int::zero()))
        .collect();
    ineq.push((n.clone(), -Int::one()));
    ineq.push((n.iter().map(|x| -x).collect(), Int::one()));
    let full_slice = Polytope::from_inequalities(rank, ineq)?
        .lattice_points()?
        .len();
    let hull_points = Polytope::from_int_points(rank, xi.points())?
        .lattice_points()?
        .len();
    Ok(SigmaW {
        xi,
        cone,
        saturated,
        full_slice,
        strict: hull_points < full_slice,
    })
}

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub m_sigma: Option<RatVector>,
    pub classification: Option<GorensteinCertificate>,
    /// Clause (i): almost Gorenstein with respect to `𝔪`, all rays at height 1.
    pub almost_gorenstein: bool,
    pub splitting: Vec<IntVector>,
    pub splitting_valid: bool,
    /// First canonical splitting, when the cone is reflexive.
    pub canonical_splitting: Option<SplittingCertificate>,
    pub nef: Option<NefPartition>,
    /// `|Σ′_{−D′}|` is convex and lifts onto `σ′`.
    pub bundle_support: bool,
    pub failures: Vec<String>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `|Σ_{−D}| ⊆ σ′ ⊆ σ_W^∨`.
pub fn check_sandwich(model: &LGModel, xi: &PointSet, sigma_prime: &Cone) -> Result<()> {
    if sigma_prime.rank() != model.d() + model.r() {
        return Err(Error::Sandwich("σ′ has the wrong rank".into()));
    }
    for v in model.bundle.rays() {
        if !sigma_prime.contains_int(v)? {
            return Err(Error::Sandwich(format!(
                "bundle ray {} is outside σ′",
                crate::arith::fmt_vec(v)
            )));
        }
    }
    for g in sigma_prime.generators() {
        if let Some(m) = xi.points().iter().find(|m| dot(m, g).is_negative()) {
            return Err(Error::Sandwich(format!(
                "generator {} of σ′ pairs negatively with {}",
                crate::arith::fmt_vec(g),
                crate::arith::fmt_vec(m)
            )));
        }
    }
    Ok(())
}

pub fn check_assumption(
    model: &LGModel,
    xi: &PointSet,
    sigma_prime: &Cone,
    splitting: Option<&[IntVector]>,
) -> Result<AssumptionReport> {
    check_sandwich(model, xi, sigma_prime)?;
    let m = model.m_frak();
    let n = model.n_frak();
    let mut failures = Vec::new();

    let m_sigma = gorenstein_element(sigma_prime);
    let classification = classify(sigma_prime).ok();
    let rays = sigma_prime.extreme_rays()?;
    let heights_one = rays.iter().all(|g| dot(g, &m).is_one());
    let almost_gorenstein = heights_one && m_sigma.as_deref() == Some(to_rat_vec(&m).as_slice());
    if !almost_gorenstein {
        failures.push(
            "(i) σ′ is not almost Gorenstein with respect to 𝔪 with all rays at height 1".into(),
        );
    }

    let splitting: Vec<IntVector> =
        splitting.map_or_else(|| model.fibre_rays(), <[IntVector]>::to_vec);
    let cert = SplittingCertificate {
        points: splitting.clone(),
        repeats: false,
    };
    let splitting_valid = splitting.len() == model.r() && cert.verify(sigma_prime, &m, &n);
    if !splitting_valid {
        failures.push("(ii) splitting points are not height-one points of σ′ summing to 𝔫".into());
    }
    let canonical_splitting = match &classification {
        Some(c) if c.kind == GorensteinKind::ReflexiveGorenstein => {
            completely_split(sigma_prime, c)?
        }
        _ => None,
    };

    let mut nef = None;
    let mut bundle_support = false;
    if splitting_valid {
        match nef_partition_with_elements(sigma_prime, &m, &n, &splitting) {
            Ok(p) => {
                match lifted_bundle_support(&p, sigma_prime) {
                    Ok(true) => bundle_support = true,
                    Ok(false) => {
                        failures.push("(ii) the bundle over Σ′ does not have support σ′".into())
                    }
                    Err(e) => failures.push(format!("(ii) bundle over Σ′: {e}")),
                }
                nef = Some(p);
            }
            Err(e) => failures.push(format!("(ii) vector-bundle projection: {e}")),
        }
    }
    Ok(AssumptionReport {
        m_sigma,
        classification,
        almost_gorenstein,
        splitting,
        splitting_valid,
        canonical_splitting,
        nef,
        bundle_support,
        failures,
    })
}

/// The map `N′ × Z^r → N × Z^r` sending the quotient basis and the fibre
/// basis to the complement basis and the splitting points.
fn lift_from_quotient(nef: &NefPartition, x: &[Int]) -> IntVector {
    let rank = nef.splitting.points[0].len();
    let q = nef.quotient_rank();
    let mut out = vec![Int::zero(); rank];
    for (k, b) in nef.quotient_basis.iter().enumerate() {
        out = crate::arith::add_vec(&out, &crate::arith::scale_vec(b, &x[k]));
    }
    for (i, p) in nef.splitting.points.iter().enumerate() {
        out = crate::arith::add_vec(&out, &crate::arith::scale_vec(p, &x[q + i]));
    }
    out
}

fn lifted_bundle_support(nef: &NefPartition, sigma_prime: &Cone) -> Result<bool> {
    let fan = output_fan(nef, None)?;
    let negated: Vec<TorusDivisor> = nef.divisors.iter().map(TorusDivisor::negate).collect();
    let bundle = vector_bundle_fan(&fan, &negated)?;
    bundle.support()?;
    let lifted: Vec<IntVector> = bundle
        .rays()
        .iter()
        .map(|v| lift_from_quotient(nef, v))
        .collect();
    let cone = Cone::new(Side::N, sigma_prime.rank(), lifted)?;
    cones_equal(&cone, sigma_prime)
}

/// Where the output base fan came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FanSource {
    /// The input base fan, reused because it has exactly the projected rays.
    Input,
    /// Face fan of the projected rays, refined by pulling and star subdivision.
    Pulling,
}

/// A complete simplicial fan on the projected rays, in their order.
fn output_fan(nef: &NefPartition, base: Option<&Fan>) -> Result<Fan> {
    let rays = &nef.projected_rays;
    if let Some(base) = base {
        let same = base.rank() == nef.quotient_rank()
            && base.rays().len() == rays.len()
            && rays.iter().all(|r| base.ray_index(r).is_some());
        if same {
            let cones = base
                .max_cones()
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&i| {
                            rays.iter()
                                .position(|r| r == &base.rays()[i])
                                .expect("same ray set")
                        })
                        .collect()
                })
                .collect();
            return Fan::new_unchecked(base.rank(), rays.clone(), cones);
        }
    }
    complete_simplicial_fan(nef.quotient_rank(), rays)
}

/// One term of a rewritten `g_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewrittenTerm {
    pub label: String,
    pub point: IntVector,
    /// The character on the quotient lattice, `⟨m̄, b_k⟩` over the quotient basis.
    pub m_prime: IntVector,
    /// `⟨m̄, v⟩` for the source `v` of each output ray, in output-ray order.
    pub exponents: IntVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewrittenPotential {
    /// Index `i` of the splitting point `p_i` whose fibre coordinate multiplies `g_i`.
    pub part: usize,
    pub splitting_point: IntVector,
    pub terms: Vec<RewrittenTerm>,
}

/// Splits the potential by the unique splitting point pairing to 1 with each
/// term and tabulates the exponents against the output rays.
pub fn rewrite_potential(
    potential: &PotentialSupport,
    nef: &NefPartition,
) -> Result<Vec<RewrittenPotential>> {
    let r = nef.r();
    let mut out: Vec<RewrittenPotential> = (0..r)
        .map(|i| RewrittenPotential {
            part: i,
            splitting_point: nef.splitting.points[i].clone(),
            terms: Vec::new(),
        })
        .collect();
    let ray_part: Vec<usize> = (0..nef.projected_rays.len())
        .map(|k| {
            nef.divisors
                .iter()
                .position(|d| d.coeffs[k].is_one())
                .expect("each ray lies in one part")
        })
        .collect();
    for (index, e) in potential.entries().iter().enumerate() {
        if !e.is_present() {
            continue;
        }
        for (part, p) in nef.splitting.points.iter().enumerate() {
            if dot(&e.point, p).is_negative() {
                return Err(Error::NegativeSplitPairing { index, part });
            }
        }
        let part = nef.part_of_dual_point(&e.point)?;
        let m_prime: IntVector = nef
            .quotient_basis
            .iter()
            .map(|b| dot(&e.point, b))
            .collect();
        let exponents: IntVector = nef.ray_sources.iter().map(|v| dot(&e.point, v)).collect();
        for (k, u) in nef.projected_rays.iter().enumerate() {
            let expected = dot(&m_prime, u)
                + if ray_part[k] == part {
                    Int::one()
                } else {
                    Int::zero()
                };
            if expected != exponents[k] {
                return Err(Error::Invalid(
                    "exponent table disagrees with the projection".into(),
                ));
            }
        }
        out[part].terms.push(RewrittenTerm {
            label: e.label.clone(),
            point: e.point.clone(),
            m_prime,
            exponents,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteA {
    pub saturated: bool,
    pub dual: Option<GorensteinCertificate>,
    pub split: Option<SplittingCertificate>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteB {
    pub closure: Option<IntegralClosure>,
    pub gorenstein: Option<GorensteinCertificate>,
    pub dual_closure: Option<IntegralClosure>,
    pub passed: bool,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaReport {
    pub route_a: RouteA,
    pub route_b: RouteB,
}

impl CriteriaReport {
    pub fn certified(&self) -> bool {
        self.route_a.passed || self.route_b.passed
    }
}

fn default_height_bound(p: &Polytope) -> usize {
    p.dim().map_or(1, |d| (d - 1).max(1) as usize)
}

/// Evaluates both sufficient criteria for a resolution on a potential support
/// `Ξ` of index `r`: (A) saturation plus a completely split reflexive dual of
/// `Cone(Ξ)`; (B) integrally closed Gorenstein `conv(Ξ)` with integrally
/// closed dual. `height_bound` defaults to one less than the polytope
/// dimension; beyond that every dilate splits off a point of `Δ`.
pub fn verify_resolution_criteria(
    xi: &PointSet,
    r: usize,
    height_bound: Option<usize>,
) -> Result<CriteriaReport> {
    let sigma = Cone::new(Side::M, xi.rank(), xi.points().to_vec())?;
    let saturated = is_saturated(xi)?;
    let dual = sigma.dual();
    let dual_cert = classify(&dual).ok();
    let split = match &dual_cert {
        Some(c) if c.kind == GorensteinKind::ReflexiveGorenstein && c.index_usize() == Some(r) => {
            completely_split(&dual, c)?
        }
        _ => None,
    };
    let route_a = RouteA {
        saturated,
        passed: saturated && split.is_some(),
        dual: dual_cert,
        split,
    };

    let delta = Polytope::from_int_points(xi.rank(), xi.points())?;
    let bound = height_bound.unwrap_or_else(|| default_height_bound(&delta));
    let closure = is_integrally_closed(&delta, bound)?;
    let mut failure = None;
    if !closure.closed {
        failure = Some("conv(Ξ) is not integrally closed".to_string());
    }
    let gorenstein = classify(&sigma).ok();
    let mut dual_closure = None;
    match &gorenstein {
        Some(g) if g.kind == GorensteinKind::ReflexiveGorenstein => {
            let n = g
                .n_dual
                .clone()
                .expect("reflexive cones carry the dual element");
            let nabla = support_polytope(&dual, &n)?;
            let dual_bound = height_bound.unwrap_or_else(|| default_height_bound(&nabla));
            let c = is_integrally_closed(&nabla, dual_bound)?;
            if !c.closed && failure.is_none() {
                failure = Some("the dual Gorenstein polytope is not integrally closed".into());
            }
            dual_closure = Some(c);
        }
        _ => {
            if failure.is_none() {
                failure = Some("Cone(Ξ) is not reflexive Gorenstein".into());
            }
        }
    }
    let route_b = RouteB {
        passed: failure.is_none(),
        closure: Some(closure),
        gorenstein,
        dual_closure,
        failure,
    };
    Ok(CriteriaReport { route_a, route_b })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    CrepantCategoricalResolution,
    FullyFaithfulForward,
    FullyFaithfulBackward,
    Equivalence,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::CrepantCategoricalResolution => "CrepantCategoricalResolution",
            Verdict::FullyFaithfulForward => "FullyFaithfulForward",
            Verdict::FullyFaithfulBackward => "FullyFaithfulBackward",
            Verdict::Equivalence => "Equivalence",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExoflopOptions {
    /// Defaults to `σ_W^∨`.
    pub sigma_prime: Option<Cone>,
    /// Defaults to the fibre rays `e_{d+1}, …, e_{d+r}`.
    pub splitting: Option<Vec<IntVector>>,
    pub smooth_input: bool,
    pub smooth_output: bool,
    pub height_bound: Option<usize>,
    /// Overrides the hyperplane functional used for the extension.
    pub mbar: Option<RatVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSummary {
    pub d: usize,
    pub r: usize,
    pub base_rays: usize,
    pub base_cones: usize,
    pub potential_terms: usize,
}

#[derive(Clone, Debug)]
pub struct OutputSide {
    pub fan: Fan,
    pub fan_source: FanSource,
    pub divisors: Vec<TorusDivisor>,
    pub potentials: Vec<RewrittenPotential>,
    pub bundle: Fan,
    pub cox: CoxData,
    pub smooth_fan: bool,
}

#[derive(Clone, Debug)]
pub struct ExoflopReport {
    pub input: InputSummary,
    pub sigma_w: Option<SigmaW>,
    pub sigma_prime: Option<Cone>,
    pub assumption: Option<AssumptionReport>,
    pub psi: Option<SemiprojectiveFan>,
    pub psi_cox: Option<CoxData>,
    pub heights: Option<HeightPartition>,
    pub output: Option<OutputSide>,
    pub criteria: Option<CriteriaReport>,
    pub smooth_input: bool,
    pub smooth_output: bool,
    pub verdict: Verdict,
    pub provisos: Vec<String>,
    /// The first certificate that failed, for inconclusive reports.
    pub failure: Option<String>,
}

impl ExoflopReport {
    fn fail(mut self, stage: &str, reason: impl fmt::Display) -> ExoflopReport {
        self.verdict = Verdict::Inconclusive;
        self.failure = Some(format!("{stage}: {reason}"));
        self
    }
}

/// Runs the whole pipeline. Errors never escape: each is reported as an
/// inconclusive verdict naming the failing stage.
pub fn run_exoflop(model: &LGModel, options: &ExoflopOptions) -> ExoflopReport {
    let mut provisos = vec![PROVISO_GENERIC.to_string()];
    if options.smooth_input || options.smooth_output {
        provisos.push(format!(
            "smoothness declared by the user: input {}, output {}",
            options.smooth_input, options.smooth_output
        ));
    } else {
        provisos.push(PROVISO_SMOOTHNESS.to_string());
    }
    provisos.push(PROVISO_FANO.to_string());
    let mut report = ExoflopReport {
        input: InputSummary {
            d: model.d(),
            r: model.r(),
            base_rays: model.base.rays().len(),
            base_cones: model.base.max_cones().len(),
            potential_terms: model.potential.present().len(),
        },
        sigma_w: None,
        sigma_prime: None,
        assumption: None,
        psi: None,
        psi_cox: None,
        heights: None,
        output: None,
        criteria: None,
        smooth_input: options.smooth_input,
        smooth_output: options.smooth_output,
        verdict: Verdict::Inconclusive,
        provisos,
        failure: None,
    };

    let sw = match sigma_w(model) {
        Ok(s) => s,
        Err(e) => return report.fail("sigma_w", e),
    };
    let sigma_prime = options
        .sigma_prime
        .clone()
        .unwrap_or_else(|| sw.cone.dual());
    report.criteria = verify_resolution_criteria(&sw.xi, model.r(), options.height_bound).ok();
    let xi = sw.xi.clone();
    report.sigma_w = Some(sw);
    report.sigma_prime = Some(sigma_prime.clone());

    let assumption = match check_assumption(model, &xi, &sigma_prime, options.splitting.as_deref())
    {
        Ok(a) => a,
        Err(e) => return report.fail("assumption", e),
    };
    let passed = assumption.passed();
    let first_failure = assumption.failures.first().cloned();
    let nef = assumption.nef.clone();
    report.assumption = Some(assumption);
    if !passed {
        return report.fail("assumption", first_failure.unwrap_or_default());
    }
    let nef = nef.expect("a passed assumption carries the projection");

    let psi = match semiprojective_fan(&sigma_prime, &model.bundle, options.mbar.as_deref()) {
        Ok(p) => p,
        Err(e) => return report.fail("semiprojective_fan", e),
    };
    let nu = match PointSet::new(sigma_prime.rank(), psi.fan.rays().to_vec()) {
        Ok(p) => p,
        Err(e) => return report.fail("semiprojective_fan", e),
    };
    let heights = nu_height_case(&nu, &to_rat_vec(&model.m_frak()));
    report.psi_cox = Some(cox_charge_matrix(&psi.fan));
    report.psi = Some(psi);
    let case = heights.case;
    report.heights = Some(heights);

    let fan = match output_fan(&nef, Some(&model.base)) {
        Ok(f) => f,
        Err(e) => return report.fail("output fan", e),
    };
    let fan_source = if fan.rank() == model.base.rank() && fan == model.base {
        FanSource::Input
    } else {
        FanSource::Pulling
    };
    let potentials = match rewrite_potential(&model.potential, &nef) {
        Ok(p) => p,
        Err(e) => return report.fail("rewrite_potential", e),
    };
    let negated: Vec<TorusDivisor> = nef.divisors.iter().map(TorusDivisor::negate).collect();
    let bundle = match vector_bundle_fan(&fan, &negated) {
        Ok(b) => b,
        Err(e) => return report.fail("output bundle", e),
    };
    let complete_simplicial = fan.is_complete() && fan.is_simplicial();
    report.output = Some(OutputSide {
        smooth_fan: fan.is_smooth(),
        cox: cox_charge_matrix(&bundle),
        fan,
        fan_source,
        divisors: nef.divisors.clone(),
        potentials,
        bundle,
    });

    report.verdict = match case {
        HeightCase::AllHeights1 if complete_simplicial => {
            if options.smooth_input {
                Verdict::Equivalence
            } else {
                Verdict::CrepantCategoricalResolution
            }
        }
        HeightCase::AllHeights1 => {
            report.failure = Some("output fan is not complete and simplicial".into());
            Verdict::Inconclusive
        }
        HeightCase::AllAbove1 => Verdict::FullyFaithfulBackward,
        HeightCase::AllBelow1 => Verdict::FullyFaithfulForward,
        HeightCase::Mixed => {
            report.failure = Some("rays of Ψ lie both above and below height 1".into());
            Verdict::Inconclusive
        }
    };
    report
}

/// Canonical form of a model's base data: sorted rays, re-indexed cones,
/// divisor coefficients in sorted-ray order, and per-part potential tables
/// as sorted `(m′, exponents)` pairs.
pub type CanonicalModel = (
    Vec<IntVector>,
    Vec<Vec<usize>>,
    Vec<IntVector>,
    Vec<BTreeSet<(IntVector, IntVector)>>,
);

fn canonical_data(
    fan: &Fan,
    divisors: &[TorusDivisor],
    parts: Vec<Vec<(IntVector, IntVector)>>,
) -> CanonicalModel {
    let (rays, cones) = fan.canonical();
    let order: Vec<usize> = rays
        .iter()
        .map(|r| fan.ray_index(r).expect("same rays"))
        .collect();
    let mut divs: Vec<IntVector> = divisors
        .iter()
        .map(|d| order.iter().map(|&i| d.coeffs[i].clone()).collect())
        .collect();
    let mut tables: Vec<BTreeSet<(IntVector, IntVector)>> = parts
        .into_iter()
        .map(|terms| {
            terms
                .into_iter()
                .map(|(m, e)| (m, order.iter().map(|&i| e[i].clone()).collect()))
                .collect()
        })
        .collect();
    // parts are unordered; sort them jointly with their divisors
    let mut joint: Vec<(IntVector, BTreeSet<(IntVector, IntVector)>)> =
        divs.drain(..).zip(tables.drain(..)).collect();
    joint.sort();
    let (divs, tables) = joint.into_iter().unzip();
    (rays, cones, divs, tables)
}

/// The input model in canonical form, with `f_i` tabulated against the base rays.
pub fn canonical_input(model: &LGModel) -> CanonicalModel {
    let d = model.d();
    let mut parts: Vec<Vec<(IntVector, IntVector)>> = vec![Vec::new(); model.r()];
    for e in model.potential.present() {
        let i = e.point[d..]
            .iter()
            .position(|x| x.is_one())
            .expect("height one");
        let m = e.point[..d].to_vec();
        let exps = model
            .base
            .rays()
            .iter()
            .enumerate()
            .map(|(j, u)| dot(&m, u) + &model.divisors[i].coeffs[j])
            .collect();
        parts[i].push((m, exps));
    }
    canonical_data(&model.base, &model.divisors, parts)
}

/// The output side of a report in canonical form.
pub fn canonical_output(out: &OutputSide) -> CanonicalModel {
    let parts = out
        .potentials
        .iter()
        .map(|g| {
            g.terms
                .iter()
                .map(|t| (t.m_prime.clone(), t.exponents.clone()))
                .collect()
        })
        .collect();
    canonical_data(&out.fan, &out.divisors, parts)
}

/// Height of each point against `m`.
pub fn heights(points: &[IntVector], m: &[Rat]) -> Vec<Rat> {
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(m)
                .fold(Rat::zero(), |acc, (x, y)| acc + rat_from_int(x) * y)
        })
        .collect()
}

/// Labels of the terms in each rewritten part, for quick comparisons.
pub fn part_labels(parts: &[RewrittenPotential]) -> Vec<BTreeSet<String>> {
    parts
        .iter()
        .map(|g| g.terms.iter().map(|t| t.label.clone()).collect())
        .collect()
}

/// Exponent table of each term against named rays, keyed by label.
pub fn exponent_table(parts: &[RewrittenPotential]) -> BTreeMap<String, IntVector> {
    parts
        .iter()
        .flat_map(|g| {
            g.terms
                .iter()
                .map(|t| (t.label.clone(), t.exponents.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ivec;

    fn p1() -> Fan {
        Fan::from_i64(&[&[1], &[-1]], &[&[0], &[1]]).unwrap()
    }

    /// Two points on the projective line, as a section of `O(2)`.
    fn p1_model(points: &[&[i64]]) -> Result<LGModel> {
        let terms = points
            .iter()
            .enumerate()
            .map(|(i, p)| PotentialTerm::new(ivec(p), format!("c{}", i + 1)))
            .collect();
        build_lg_model(
            p1(),
            vec![TorusDivisor::from_i64(&[1, 1])],
            PotentialSupport::new(2, terms)?,
        )
    }

    #[test]
    fn model_assembly() {
        let m = p1_model(&[&[1, 1], &[-1, 1], &[0, 1]]).unwrap();
        assert_eq!(
            m.bundle.rays(),
            &[ivec(&[1, 1]), ivec(&[-1, 1]), ivec(&[0, 1])]
        );
        assert_eq!(m.rcharge, ivec(&[0, 0, 1]));
        assert_eq!(m.cox.charge_matrix.rows(), 1);
        let row = m.cox.charge_matrix.row(0).to_vec();
        assert!(row == ivec(&[1, 1, -2]) || row == ivec(&[-1, -1, 2]));
    }

    #[test]
    fn model_rejections() {
        assert_eq!(
            p1_model(&[&[1, 2]]).unwrap_err(),
            Error::PotentialHeight {
                index: 0,
                height: "2".into()
            }
        );
        assert_eq!(
            p1_model(&[&[2, 1]]).unwrap_err(),
            Error::PotentialOutsideDual { index: 0 }
        );
        let bad = build_lg_model(
            p1(),
            vec![
                TorusDivisor::from_i64(&[1, 0]),
                TorusDivisor::from_i64(&[1, 1]),
            ],
            PotentialSupport::new(3, vec![PotentialTerm::new(ivec(&[0, 1, 0]), "c")]).unwrap(),
        );
        assert_eq!(bad.unwrap_err(), Error::DeltaCondition { ray: 0 });
        assert!(PotentialSupport::new(
            2,
            vec![
                PotentialTerm::new(ivec(&[0, 1]), "c"),
                PotentialTerm::new(ivec(&[1, 1]), "c")
            ]
        )
        .is_err());
    }

    #[test]
    fn full_linear_system_is_not_strict() {
        let m = p1_model(&[&[1, 1], &[-1, 1], &[0, 1]]).unwrap();
        let s = sigma_w(&m).unwrap();
        assert_eq!(s.full_slice, 3);
        assert!(!s.strict);
        assert!(s.saturated);
        // the two endpoints alone still span the whole slice
        let ends = sigma_w(&p1_model(&[&[1, 1], &[-1, 1]]).unwrap()).unwrap();
        assert!(!ends.strict);
        assert!(!ends.saturated);
        let half = sigma_w(&p1_model(&[&[1, 1], &[0, 1]]).unwrap()).unwrap();
        assert!(half.strict);
        assert!(half.saturated);
    }

    #[test]
    fn identity_exoflop_on_the_line() {
        let m = p1_model(&[&[1, 1], &[-1, 1], &[0, 1]]).unwrap();
        let support = m.bundle_support().unwrap();
        let report = run_exoflop(
            &m,
            &ExoflopOptions {
                sigma_prime: Some(support),
                ..Default::default()
            },
        );
        assert_eq!(report.failure, None);
        let out = report.output.as_ref().unwrap();
        assert_eq!(out.fan_source, FanSource::Input);
        assert_eq!(canonical_output(out), canonical_input(&m));
        assert_eq!(report.heights.unwrap().case, HeightCase::AllHeights1);
        assert_eq!(report.verdict, Verdict::CrepantCategoricalResolution);
        assert!(report.provisos.iter().any(|p| p == PROVISO_GENERIC));
    }

    #[test]
    fn tall_splitting_point_fails_clause_two() {
        let m = p1_model(&[&[1, 1], &[-1, 1], &[0, 1]]).unwrap();
        let s = sigma_w(&m).unwrap();
        let support = m.bundle_support().unwrap();
        let a = check_assumption(&m, &s.xi, &support, Some(&[ivec(&[0, 2])])).unwrap();
        assert!(!a.splitting_valid);
        assert!(!a.passed());
    }

    #[test]
    fn sandwich_is_enforced() {
        let m = p1_model(&[&[1, 1], &[-1, 1], &[0, 1]]).unwrap();
        let s = sigma_w(&m).unwrap();
        let small = Cone::from_i64(Side::N, &[&[0, 1], &[1, 1]]).unwrap();
        assert!(matches!(
            check_assumption(&m, &s.xi, &small, None),
            Err(Error::Sandwich(_))
        ));
    }

    #[test]
    fn non_saturated_support_fails_route_a() {
        // the corners of a square of side 2, at height one
        let xi = PointSet::from_i64(3, &[&[0, 0, 1], &[2, 0, 1], &[0, 2, 1], &[2, 2, 1]]).unwrap();
        let c = verify_resolution_criteria(&xi, 1, None).unwrap();
        assert!(!c.route_a.saturated);
        assert!(!c.route_a.passed);
    }

    #[test]
    fn reeve_support_fails_route_b() {
        let xi = PointSet::from_i64(
            4,
            &[&[0, 0, 0, 1], &[1, 0, 0, 1], &[0, 1, 0, 1], &[1, 1, 2, 1]],
        )
        .unwrap();
        let c = verify_resolution_criteria(&xi, 1, None).unwrap();
        assert!(!c.route_b.passed);
        let closure = c.route_b.closure.unwrap();
        assert_eq!(closure.witness, Some((ivec(&[1, 1, 1, 2]), 2)));
    }
}
