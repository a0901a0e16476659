//! The subcommands. Each returns its exit code; errors exit with 1.

use std::path::Path;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use exoflop_core::arith::{dot, fmt_vec, IntVector, Rat};
use exoflop_core::cone::Cone;
use exoflop_core::exoflop::{rewrite_potential, run_exoflop, Verdict};
use exoflop_core::fixtures::{self, Check};
use exoflop_core::gorenstein::{
    all_splittings, classify, completely_split, nef_partition_with, nef_partition_with_elements,
    splittings_with_elements, GorensteinKind, NefPartition,
};
use exoflop_core::triangulate::{
    extend_triangulation, find_regularity_weights, lower_hull_subdivision, pulling_triangulation,
    RegularTriangulation,
};

use crate::input::{
    parse_rat_vector, parse_vector_token, ConeDocument, Flags, InputDocument, NamedVector,
    PotentialEntry, TriangulationDocument, VectorRef,
};
use crate::json::{jint_rows, jints, jrats, read_document, InputError, JRat};
use crate::render::{self, Namer};
use crate::report::{
    verify_document, GorensteinDoc, NefDoc, PartDoc, ReportDocument, SCHEMA_VERSION,
};
use crate::{AnalyzeArgs, NefArgs, SplitArgs};

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn located(path: &Path) -> impl Fn(InputError) -> anyhow::Error + '_ {
    move |e| anyhow::Error::new(e).context(path.display().to_string())
}

/// Splits `a,b,[1,2],c` at commas and semicolons outside brackets.
pub fn split_tokens(list: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for ch in list.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' | ';' if depth == 0 => out.push(std::mem::take(&mut cur)),
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out.into_iter()
        .map(|t| t.trim().to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn doc_namer(names: &[NamedVector]) -> Namer<'_> {
    Namer::new(
        names
            .iter()
            .map(|n| (crate::json::ints(&n.vector), n.name.as_str())),
    )
}

pub fn analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let at = located(&args.file);
    let doc: InputDocument = read_document(&args.file)?;
    let model = doc.model().map_err(&at)?;
    let mut options = doc.options().map_err(&at)?;
    let total = doc.total_rank();
    if let Some(path) = &args.sigma_prime {
        let cone_doc: ConeDocument = read_document(path)?;
        if cone_doc.rank != total {
            return Err(located(path)(InputError::at(
                "/rank",
                format!("σ′ must have rank {total}, found {}", cone_doc.rank),
            )));
        }
        options.sigma_prime = Some(cone_doc.cone().map_err(located(path))?);
    }
    if let Some(list) = &args.splitting {
        let splitting = split_tokens(list)
            .into_iter()
            .map(|t| {
                let r = if t.starts_with('[')
                    || t.starts_with(|c: char| c == '-' || c.is_ascii_digit())
                {
                    VectorRef::Vector(jints(&parse_vector_token(&t, total)?))
                } else {
                    VectorRef::Name(t)
                };
                doc.resolve(&r, "--splitting")
            })
            .collect::<Result<Vec<_>, _>>()?;
        options.splitting = Some(splitting);
    }
    options.smooth_input |= args.smooth_input;
    options.smooth_output |= args.smooth_output;
    if args.height_bound.is_some() {
        options.height_bound = args.height_bound;
    }
    if let Some(m) = &args.mbar {
        let m = parse_rat_vector(m).map_err(|e| InputError::at("--mbar", e.message))?;
        if m.len() != total {
            bail!("--mbar: expected {total} entries, found {}", m.len());
        }
        options.mbar = Some(m);
    }

    let report = run_exoflop(&model, &options);
    if args.json {
        print_json(&ReportDocument::new(&model, &report))?;
    } else {
        print!(
            "{}",
            render::analyze(&model, &report, &doc_namer(&doc.names))
        );
    }
    Ok(if report.verdict == Verdict::Inconclusive {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

pub fn verify(path: &Path) -> Result<ExitCode> {
    let doc: ReportDocument = read_document(path)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(located(path)(InputError::at(
            "/schema_version",
            format!("unsupported version {}", doc.schema_version),
        )));
    }
    let checks = verify_document(&doc);
    for c in &checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} certificates re-verified",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn read_cone(path: &Path) -> Result<(ConeDocument, Cone)> {
    let doc: ConeDocument = read_document(path)?;
    let cone = doc.cone().map_err(located(path))?;
    Ok((doc, cone))
}

#[derive(Serialize)]
struct DualOutput {
    rays: Vec<Vec<crate::json::JInt>>,
    lineality: Vec<Vec<crate::json::JInt>>,
    facets: Vec<Vec<crate::json::JInt>>,
}

pub fn dual(path: &Path, json: bool) -> Result<ExitCode> {
    let (doc, cone) = read_cone(path)?;
    let dual = cone.dual();
    let lineality = dual.lineality();
    let rays = if lineality.is_empty() {
        dual.extreme_rays()?
    } else {
        dual.generators().to_vec()
    };
    // facet normals of the dual are the extreme rays of the cone itself
    let facets = if cone.is_strictly_convex() {
        cone.extreme_rays()?
    } else {
        cone.generators().to_vec()
    };
    if json {
        print_json(&DualOutput {
            rays: jint_rows(&rays),
            lineality: jint_rows(&lineality),
            facets: jint_rows(&facets),
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    let namer = doc_namer(&doc.names);
    println!(
        "dual cone: {} generators, lineality rank {}",
        rays.len(),
        lineality.len()
    );
    for u in &rays {
        let values: Vec<String> = facets.iter().map(|g| dot(u, g).to_string()).collect();
        println!("  u = {}  ⟨u, g⟩ = [{}]", fmt_vec(u), values.join(", "));
    }
    for l in &lineality {
        println!("  ±{}", fmt_vec(l));
    }
    println!("generators g of the cone:");
    for g in &facets {
        println!("  {}", namer.label(g));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gorenstein(path: &Path, json: bool) -> Result<ExitCode> {
    let (_, cone) = read_cone(path)?;
    let cert = classify(&cone)?;
    if json {
        print_json(&GorensteinDoc::from(&cert))?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("{}", render::gorenstein_line(&cert));
    let rays = cone.extreme_rays()?;
    let dual_rays = cone.dual().extreme_rays()?;
    let mut out = String::new();
    render::gorenstein_equations(&mut out, &cert, &rays, &dual_rays);
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

/// The degree elements to split against: given explicitly, or those of a
/// reflexive cone.
fn degree_elements(
    doc: &ConeDocument,
    cone: &Cone,
    m: Option<&str>,
    n: Option<&str>,
) -> Result<(
    IntVector,
    IntVector,
    Option<exoflop_core::gorenstein::GorensteinCertificate>,
)> {
    if let (Some(m), Some(n)) = (m, n) {
        let m = parse_vector_token(m, doc.rank).map_err(|e| InputError::at("--m", e.message))?;
        let n = parse_vector_token(n, doc.rank).map_err(|e| InputError::at("--n", e.message))?;
        return Ok((m, n, None));
    }
    let cert = classify(cone)?;
    if cert.kind != GorensteinKind::ReflexiveGorenstein {
        bail!(
            "the cone is {}, not reflexive; give its degree elements with --m and --n",
            cert.kind
        );
    }
    let m = cert
        .m_int()
        .ok_or_else(|| anyhow!("degree element is not integral"))?;
    let n = cert
        .n_dual
        .clone()
        .ok_or_else(|| anyhow!("dual degree element missing"))?;
    Ok((m, n, Some(cert)))
}

#[derive(Serialize)]
struct SplitOutput {
    m: Vec<crate::json::JInt>,
    n: Vec<crate::json::JInt>,
    splittings: Vec<Vec<Vec<crate::json::JInt>>>,
}

pub fn split(args: &SplitArgs) -> Result<ExitCode> {
    let (doc, cone) = read_cone(&args.cone)?;
    let (m, n, cert) = degree_elements(&doc, &cone, args.m.as_deref(), args.n.as_deref())?;
    let mut found = match (&cert, args.all) {
        (Some(c), true) => all_splittings(&cone, c)?,
        (Some(c), false) => completely_split(&cone, c)?.into_iter().collect(),
        (None, _) => splittings_with_elements(&cone, &m, &n)?,
    };
    if !args.all {
        found.truncate(1);
    }
    if args.json {
        print_json(&SplitOutput {
            m: jints(&m),
            n: jints(&n),
            splittings: found.iter().map(|s| jint_rows(&s.points)).collect(),
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    let namer = doc_namer(&doc.names);
    if found.is_empty() {
        println!(
            "no complete splitting against m={}, n={}",
            fmt_vec(&m),
            fmt_vec(&n)
        );
    }
    for (k, s) in found.iter().enumerate() {
        println!("splitting {}:", k + 1);
        let mut out = String::new();
        render::splitting_equations(&mut out, s, &m, &n, &namer);
        print!("{out}");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct NefOutput {
    nef: NefDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    potentials: Option<Vec<PartDoc>>,
}

pub fn nef_partition(args: &NefArgs) -> Result<ExitCode> {
    let (doc, cone) = read_cone(&args.cone)?;
    let splitting = split_tokens(&args.splitting)
        .iter()
        .map(|t| {
            doc.resolve(t)
                .map_err(|e| InputError::at("--splitting", e.message))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (m, n, cert) = degree_elements(&doc, &cone, args.m.as_deref(), args.n.as_deref())?;
    let nef: NefPartition = match &cert {
        Some(c) => nef_partition_with(&cone, c, &splitting)?,
        None => nef_partition_with_elements(&cone, &m, &n, &splitting)?,
    };
    let potentials = match &args.model {
        Some(path) => {
            let model_doc: InputDocument = read_document(path)?;
            let model = model_doc.model().map_err(located(path))?;
            if model_doc.total_rank() != doc.rank {
                bail!(
                    "model has rank {} but the cone has rank {}",
                    model_doc.total_rank(),
                    doc.rank
                );
            }
            Some(rewrite_potential(&model.potential, &nef)?)
        }
        None => None,
    };
    if args.json {
        print_json(&NefOutput {
            nef: NefDoc::from(&nef),
            potentials: potentials
                .as_ref()
                .map(|p| p.iter().map(PartDoc::from).collect()),
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    let namer = doc_namer(&doc.names);
    let mut out = String::new();
    render::nef_lines(&mut out, &nef, &m, &n, &namer);
    if let Some(parts) = &potentials {
        let ray_names: Vec<String> = nef.ray_sources.iter().map(|v| namer.short(v)).collect();
        let fibre_names: Vec<String> = nef
            .splitting
            .points
            .iter()
            .map(|p| namer.short(p))
            .collect();
        out.push_str("exponents ⟨m, u_ρ⟩ + D′:\n");
        render::exponent_table(&mut out, parts, &ray_names);
        out.push_str(&format!(
            "W = {}\n",
            exoflop_core::fixtures::render_potential(parts, &ray_names, &fibre_names)
        ));
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn affine_rows(points: &[Vec<Rat>], affine: bool) -> Vec<Vec<JRat>> {
    points
        .iter()
        .map(|p| jrats(if affine { &p[..p.len() - 1] } else { p }))
        .collect()
}

#[derive(Serialize)]
struct StepOutput {
    point: usize,
    case: String,
    weight: JRat,
    refined: bool,
}

#[derive(Serialize)]
struct TriangulationOutput {
    #[serde(flatten)]
    triangulation: TriangulationDocument,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    steps: Vec<StepOutput>,
}

pub fn triangulate(path: &Path, extend: Option<&Path>, json: bool) -> Result<ExitCode> {
    let at = located(path);
    let doc: TriangulationDocument = read_document(path)?;
    let cfg = doc.config().map_err(&at)?;
    let base = match doc.triangulation().map_err(&at)? {
        Some(t) => {
            if !t.verify(&cfg)? {
                return Err(at(InputError::at(
                    "/weights",
                    "the weights do not induce the listed cells",
                )));
            }
            t
        }
        None => {
            let cells = match (&doc.cells, doc.weights().map_err(&at)?) {
                (_, Some(w)) => {
                    let sub = lower_hull_subdivision(&cfg, &w)?;
                    if !sub.is_triangulation {
                        return Err(at(InputError::at(
                            "/weights",
                            "the weights induce a subdivision that is not a triangulation",
                        )));
                    }
                    sub.cells
                }
                (Some(cells), None) => cells.clone(),
                (None, None) => pulling_triangulation(&cfg, &(0..cfg.len()).collect::<Vec<_>>())?,
            };
            let weights = find_regularity_weights(&cfg, &cells)?
                .ok_or_else(|| at(InputError::at("/cells", "the triangulation is not regular")))?;
            RegularTriangulation { cells, weights }
        }
    };
    let affine = doc.functional.is_none();
    let (config, tri, steps) = match extend {
        Some(new_path) => {
            let new_doc: TriangulationDocument = read_document(new_path)?;
            let width = doc.points.first().map_or(0, Vec::len);
            if let Some(i) = new_doc.points.iter().position(|p| p.len() != width) {
                return Err(located(new_path)(InputError::at(
                    format!("/points/{i}"),
                    format!("expected {width} entries"),
                )));
            }
            let new_points = TriangulationDocument {
                functional: doc.functional.clone(),
                ..new_doc
            }
            .homogenized_points();
            let ext = extend_triangulation(&cfg, &base, &new_points)?;
            (ext.config, ext.triangulation, ext.steps)
        }
        None => (cfg, base, Vec::new()),
    };
    let out_doc = TriangulationDocument {
        points: affine_rows(config.points(), affine),
        functional: doc.functional.clone(),
        cells: Some(tri.cells.clone()),
        weights: Some(jrats(&tri.weights.weights)),
    };
    if json {
        print_json(&TriangulationOutput {
            triangulation: out_doc,
            steps: steps
                .iter()
                .map(|s| StepOutput {
                    point: s.point,
                    case: format!("{:?}", s.case).to_lowercase(),
                    weight: JRat(s.weight.clone()),
                    refined: s.refined,
                })
                .collect(),
        })?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("{} points, {} cells", config.len(), tri.cells.len());
    for (i, p) in config.points().iter().enumerate() {
        let shown = if affine { &p[..p.len() - 1] } else { &p[..] };
        println!(
            "  {i}: {}  weight {}",
            fmt_vec(shown),
            tri.weights.weights[i]
        );
    }
    for c in &tri.cells {
        println!("  cell {c:?}");
    }
    for s in &steps {
        println!(
            "  inserted point {} ({:?}) at weight {}{}",
            s.point,
            s.case,
            s.weight,
            if s.refined { ", refined" } else { "" }
        );
    }
    println!(
        "weights induce exactly these cells: {}",
        render::yes_no(tri.verify(&config)?)
    );
    Ok(ExitCode::SUCCESS)
}

type SuiteResult = Result<Vec<Check>, String>;

const ALL_FIXTURES: [&str; 4] = ["aspinwall", "example62", "lt:2", "lt:3"];

fn valid_fixture(name: &str) -> bool {
    match name.strip_prefix("lt:") {
        Some(n) => n.parse::<usize>().is_ok_and(|n| n >= 2),
        None => name == "aspinwall" || name == "example62",
    }
}

pub fn fixtures_run(names: &[String], threads: Option<usize>) -> Result<ExitCode> {
    let mut list: Vec<String> = Vec::new();
    for n in names {
        if n == "all" {
            list.extend(ALL_FIXTURES.iter().map(|s| s.to_string()));
        } else if valid_fixture(n) {
            list.push(n.clone());
        } else {
            bail!(
                "unknown fixture `{n}`; expected aspinwall, example62, lt:<n> with n ≥ 2, or all"
            );
        }
    }
    if list.is_empty() {
        list.extend(ALL_FIXTURES.iter().map(|s| s.to_string()));
    }
    let workers = threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
        .clamp(1, list.len());
    let results: Mutex<Vec<Option<SuiteResult>>> = Mutex::new(vec![None; list.len()]);
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(name) = list.get(i) else { break };
                let r = fixtures::run_suite(name).map_err(|e| e.to_string());
                results
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    let results = results.into_inner().expect("workers joined");
    let mut all_passed = true;
    for (name, result) in list.iter().zip(results) {
        match result.expect("every fixture ran") {
            Ok(checks) => {
                let failed = checks.iter().filter(|c| !c.passed).count();
                all_passed &= failed == 0;
                println!(
                    "{name}: {}/{} checks passed",
                    checks.len() - failed,
                    checks.len()
                );
                for c in &checks {
                    if c.passed {
                        println!("  PASS {}", c.name);
                    } else {
                        println!("  FAIL {}: {}", c.name, c.detail);
                    }
                }
            }
            Err(e) => {
                all_passed = false;
                println!("{name}: error: {e}");
            }
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

pub fn fixtures_export(name: &str, run: usize) -> Result<ExitCode> {
    if !valid_fixture(name) {
        bail!("unknown fixture `{name}`");
    }
    let fx = fixtures::by_name(name)?;
    let (_, options) = fx
        .runs
        .get(run)
        .ok_or_else(|| anyhow!("fixture {name} has {} runs", fx.runs.len()))?;
    let model = &fx.model;
    let doc = InputDocument {
        lattice_rank: model.d(),
        rays: jint_rows(model.base.rays()),
        max_cones: model.base.max_cones().to_vec(),
        divisors: model.divisors.iter().map(|d| jints(&d.coeffs)).collect(),
        potential: model
            .potential
            .entries()
            .iter()
            .map(|t| PotentialEntry {
                point: jints(&t.point),
                coeff_label: t.label.clone(),
                value: t.value.clone().map(JRat),
            })
            .collect(),
        sigma_prime: options
            .sigma_prime
            .as_ref()
            .map(|c| jint_rows(c.generators())),
        splitting: options.splitting.as_ref().map(|s| {
            s.iter()
                .map(|v| match fx.name_of(v) {
                    Some(n) => VectorRef::Name(n.to_string()),
                    None => VectorRef::Vector(jints(v)),
                })
                .collect()
        }),
        names: fx
            .ray_names
            .iter()
            .map(|(v, n)| NamedVector {
                name: n.clone(),
                vector: jints(v),
            })
            .collect(),
        flags: Flags {
            smooth_input: options.smooth_input,
            smooth_output: options.smooth_output,
            height_bound: options.height_bound,
            mbar: options.mbar.as_ref().map(|m| jrats(m)),
        },
    };
    doc.validate().context("exported document is invalid")?;
    print_json(&doc)?;
    Ok(ExitCode::SUCCESS)
}
