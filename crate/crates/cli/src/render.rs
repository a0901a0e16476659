//! Human-readable output. Certificates are printed as equations that can be
//! checked by hand.

use std::fmt::Write;

use exoflop_core::arith::{dot, fmt_vec, Int, IntVector};
use exoflop_core::exoflop::{ExoflopReport, LGModel, RewrittenPotential};
use exoflop_core::fixtures::render_potential;
use exoflop_core::gorenstein::{
    GorensteinCertificate, GorensteinKind, NefPartition, SplittingCertificate,
};

/// Labels vectors by a name table, falling back to coordinates.
pub struct Namer<'a> {
    pub names: Vec<(IntVector, &'a str)>,
}

impl<'a> Namer<'a> {
    pub fn new(names: impl IntoIterator<Item = (IntVector, &'a str)>) -> Namer<'a> {
        Namer {
            names: names.into_iter().collect(),
        }
    }

    pub fn get(&self, v: &[Int]) -> Option<&'a str> {
        self.names
            .iter()
            .find(|(u, _)| u.as_slice() == v)
            .map(|(_, n)| *n)
    }

    pub fn label(&self, v: &[Int]) -> String {
        match self.get(v) {
            Some(n) => format!("{n} {}", fmt_vec(v)),
            None => fmt_vec(v),
        }
    }

    pub fn short(&self, v: &[Int]) -> String {
        self.get(v).map_or_else(|| fmt_vec(v), str::to_string)
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn gorenstein_line(c: &GorensteinCertificate) -> String {
    let mut s = c.kind.to_string();
    if let Some(r) = &c.index {
        write!(s, " index {r}").unwrap();
    }
    if let Some(m) = &c.m_sigma {
        write!(s, ", m={}", fmt_vec(m)).unwrap();
    }
    if let Some(n) = &c.n_dual {
        write!(s, ", n={}", fmt_vec(n)).unwrap();
    }
    s
}

/// The defining equations of a Gorenstein certificate on the given rays.
pub fn gorenstein_equations(
    out: &mut String,
    c: &GorensteinCertificate,
    rays: &[IntVector],
    dual_rays: &[IntVector],
) {
    if let Some(m) = c.m_int() {
        for v in rays {
            writeln!(out, "  ⟨m, {}⟩ = {}", fmt_vec(v), dot(&m, v)).unwrap();
        }
    } else if c.kind == GorensteinKind::NotQGorenstein {
        writeln!(out, "  no functional takes the value 1 on every ray").unwrap();
    }
    if let Some(n) = &c.n_dual {
        for u in dual_rays {
            writeln!(out, "  ⟨{}, n⟩ = {}", fmt_vec(u), dot(u, n)).unwrap();
        }
    }
}

pub fn splitting_equations(
    out: &mut String,
    s: &SplittingCertificate,
    m: &[Int],
    n: &[Int],
    namer: &Namer,
) {
    let terms: Vec<String> = s.points.iter().map(|p| namer.short(p)).collect();
    writeln!(out, "  {} = {}", terms.join(" + "), fmt_vec(n)).unwrap();
    for p in &s.points {
        writeln!(
            out,
            "    ⟨{}, {}⟩ = {}",
            fmt_vec(m),
            namer.label(p),
            dot(m, p)
        )
        .unwrap();
    }
}

pub fn nef_lines(out: &mut String, nef: &NefPartition, m: &[Int], n: &[Int], namer: &Namer) {
    writeln!(out, "splitting of the cone:").unwrap();
    splitting_equations(out, &nef.splitting, m, n, namer);
    writeln!(out, "splitting of the dual cone:").unwrap();
    let q: Vec<String> = nef
        .dual_splitting
        .points
        .iter()
        .map(|q| fmt_vec(q))
        .collect();
    writeln!(out, "  {} = {}", q.join(" + "), fmt_vec(m)).unwrap();
    writeln!(out, "pairing:").unwrap();
    for (i, p) in nef.splitting.points.iter().enumerate() {
        let j = nef.pairing[i];
        writeln!(
            out,
            "  ⟨q{}, {}⟩ = {}",
            j + 1,
            namer.short(p),
            dot(&nef.dual_splitting.points[j], p)
        )
        .unwrap();
    }
    for (i, part) in nef.parts.iter().enumerate() {
        let names: Vec<String> = part.iter().map(|v| namer.short(v)).collect();
        writeln!(out, "part {}: {}", i + 1, names.join(", ")).unwrap();
    }
    writeln!(out, "quotient basis: {}", join_vecs(&nef.quotient_basis)).unwrap();
    writeln!(out, "output rays:").unwrap();
    for (k, u) in nef.projected_rays.iter().enumerate() {
        let part = nef
            .divisors
            .iter()
            .position(|d| d.coeffs[k] == Int::from(1));
        writeln!(
            out,
            "  {} = {} (from part {})",
            namer.short(&nef.ray_sources[k]),
            fmt_vec(u),
            part.map_or("?".into(), |p| (p + 1).to_string())
        )
        .unwrap();
    }
}

pub fn join_vecs(vs: &[IntVector]) -> String {
    vs.iter().map(|v| fmt_vec(v)).collect::<Vec<_>>().join(" ")
}

/// Table of `⟨m, u_ρ⟩` for every term against every output ray.
pub fn exponent_table(out: &mut String, parts: &[RewrittenPotential], ray_names: &[String]) {
    let label_width = parts
        .iter()
        .flat_map(|g| g.terms.iter().map(|t| t.label.chars().count()))
        .max()
        .unwrap_or(0)
        .max(5);
    let widths: Vec<usize> = ray_names.iter().map(|n| n.chars().count().max(2)).collect();
    let mut header = format!("  {:label_width$} part", "term");
    for (n, w) in ray_names.iter().zip(&widths) {
        write!(header, " {n:>w$}").unwrap();
    }
    writeln!(out, "{header}").unwrap();
    for g in parts {
        for t in &g.terms {
            let mut row = format!("  {:label_width$} {:>4}", t.label, g.part + 1);
            for (e, w) in t.exponents.iter().zip(&widths) {
                write!(row, " {:>w$}", e.to_string()).unwrap();
            }
            writeln!(out, "{row}").unwrap();
        }
    }
}

pub fn analyze(model: &LGModel, report: &ExoflopReport, namer: &Namer) -> String {
    let mut out = String::new();
    let o = &mut out;
    writeln!(o, "verdict: {}", report.verdict).unwrap();
    for p in &report.provisos {
        writeln!(o, "  proviso: {p}").unwrap();
    }
    if let Some(f) = &report.failure {
        writeln!(o, "  failed at {f}").unwrap();
    }
    let i = &report.input;
    writeln!(
        o,
        "\ninput: d = {}, r = {}, {} base rays, {} maximal cones, {} potential terms",
        i.d, i.r, i.base_rays, i.base_cones, i.potential_terms
    )
    .unwrap();
    let m = model.m_frak();
    let n = model.n_frak();
    writeln!(o, "𝔪 = {}, 𝔫 = {}", fmt_vec(&m), fmt_vec(&n)).unwrap();

    if let Some(sw) = &report.sigma_w {
        writeln!(
            o,
            "\nΞ_W: {} points, saturated: {}, strictly inside the full slice ({} points): {}",
            sw.xi.points().len(),
            yes_no(sw.saturated),
            sw.full_slice,
            yes_no(sw.strict)
        )
        .unwrap();
    }

    if let (Some(a), Some(sp)) = (&report.assumption, &report.sigma_prime) {
        let rays = sp.extreme_rays().unwrap_or_default();
        let dual_rays = sp.dual().extreme_rays().unwrap_or_default();
        writeln!(o, "\nσ′: {} rays", rays.len()).unwrap();
        for v in &rays {
            writeln!(o, "  {}  ⟨𝔪, v⟩ = {}", namer.label(v), dot(&m, v)).unwrap();
        }
        if let Some(c) = &a.classification {
            writeln!(o, "classification: {}", gorenstein_line(c)).unwrap();
            if let Some(cn) = &c.n_dual {
                for u in &dual_rays {
                    writeln!(o, "  ⟨{}, n⟩ = {}", fmt_vec(u), dot(u, cn)).unwrap();
                }
            }
        }
        writeln!(
            o,
            "all rays at height 1 against 𝔪: {}",
            yes_no(a.almost_gorenstein)
        )
        .unwrap();
        if let Some(nef) = &a.nef {
            nef_lines(o, nef, &m, &n, namer);
        }
        writeln!(
            o,
            "bundle support is convex and lifts onto σ′: {}",
            yes_no(a.bundle_support)
        )
        .unwrap();
        for f in &a.failures {
            writeln!(o, "  assumption failed: {f}").unwrap();
        }
    }

    if let Some(psi) = &report.psi {
        writeln!(
            o,
            "\nΨ: {} rays, {} maximal cones, m̄ = {}",
            psi.fan.rays().len(),
            psi.fan.max_cones().len(),
            fmt_vec(&psi.mbar)
        )
        .unwrap();
        for (k, v) in psi.fan.rays().iter().enumerate() {
            let w = &psi.extension.triangulation.weights.weights[psi.ray_points[k]];
            writeln!(o, "  {}  weight {}", namer.label(v), w).unwrap();
        }
        for s in &psi.extension.steps {
            writeln!(
                o,
                "  inserted point {} ({:?}) at weight {}{}",
                s.point,
                s.case,
                s.weight,
                if s.refined { ", refined" } else { "" }
            )
            .unwrap();
        }
    }
    if let Some(h) = &report.heights {
        writeln!(o, "heights of Ψ's rays against 𝔪: {}", h.case).unwrap();
        for (v, ht) in &h.nu_ne1 {
            writeln!(o, "  ⟨𝔪, {}⟩ = {}", namer.label(v), ht).unwrap();
        }
    }

    if let (Some(out_side), Some(nef)) = (
        &report.output,
        report.assumption.as_ref().and_then(|a| a.nef.as_ref()),
    ) {
        let ray_names: Vec<String> = nef.ray_sources.iter().map(|v| namer.short(v)).collect();
        let fibre_names: Vec<String> = nef
            .splitting
            .points
            .iter()
            .map(|p| namer.short(p))
            .collect();
        writeln!(
            o,
            "\noutput base: {} rays, {} maximal cones, fan {:?}, smooth: {}",
            out_side.fan.rays().len(),
            out_side.fan.max_cones().len(),
            out_side.fan_source,
            yes_no(out_side.smooth_fan)
        )
        .unwrap();
        for (i, d) in out_side.divisors.iter().enumerate() {
            let support: Vec<&str> = d
                .coeffs
                .iter()
                .zip(&ray_names)
                .filter(|(c, _)| **c != Int::from(0))
                .map(|(_, n)| n.as_str())
                .collect();
            writeln!(o, "  D′{} = {}", i + 1, support.join(" + ")).unwrap();
        }
        writeln!(o, "charge matrix of the output bundle:").unwrap();
        for row in out_side.cox.charge_matrix.row_vecs() {
            writeln!(o, "  {}", fmt_vec(&row)).unwrap();
        }
        writeln!(o, "exponents ⟨m, u_ρ⟩ + D′:").unwrap();
        exponent_table(o, &out_side.potentials, &ray_names);
        writeln!(
            o,
            "W′ = {}",
            render_potential(&out_side.potentials, &ray_names, &fibre_names)
        )
        .unwrap();
    }

    if let Some(c) = &report.criteria {
        writeln!(
            o,
            "\ncriterion A (saturated, split reflexive dual): {}",
            yes_no(c.route_a.passed)
        )
        .unwrap();
        if let Some(d) = &c.route_a.dual {
            writeln!(o, "  dual of Cone(Ξ): {}", gorenstein_line(d)).unwrap();
        }
        if let Some(s) = &c.route_a.split {
            writeln!(o, "  splitting: {}", join_vecs(&s.points)).unwrap();
        }
        writeln!(
            o,
            "criterion B (integrally closed Gorenstein pair): {}",
            yes_no(c.route_b.passed)
        )
        .unwrap();
        if let Some(cl) = &c.route_b.closure {
            writeln!(
                o,
                "  conv(Ξ) integrally closed up to height {}: {}",
                cl.height_bound,
                yes_no(cl.closed)
            )
            .unwrap();
            if let Some((p, h)) = &cl.witness {
                writeln!(o, "  witness {} at height {h}", fmt_vec(p)).unwrap();
            }
        }
        if let Some(f) = &c.route_b.failure {
            writeln!(o, "  {f}").unwrap();
        }
    }
    out
}
