//! Acceptance suite: one PASS/FAIL line per criterion. Expected values are
//! written out literally or recomputed here by independent means.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_bigint::BigInt;

use exoflop_core::arith::{ivec, rvec, IntVector, Rat};
use exoflop_core::cone::{cones_equal, Cone, Side};
use exoflop_core::exoflop::{
    build_lg_model, canonical_input, canonical_output, part_labels, rewrite_potential, run_exoflop,
    PotentialSupport, PotentialTerm, Verdict,
};
use exoflop_core::fan::{Fan, TorusDivisor};
use exoflop_core::fixtures::{self, named_table, Fixture};
use exoflop_core::gorenstein::{
    classify, completely_split, height_slice, nef_partition_with_elements, GorensteinKind,
    HeightCase,
};
use exoflop_core::polytope::{is_integrally_closed, Polytope};
use exoflop_core::triangulate::{find_regularity_weights, PointConfig};
use exoflop_core::Error;

use common::*;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rho() -> Vec<IntVector> {
    [
        [2, 0, -1, 0, 1],
        [0, 2, -1, 0, 1],
        [-1, -1, 2, 1, 0],
        [-1, -1, 0, 1, 0],
        [1, -1, 0, 1, 0],
        [-1, 1, 0, 1, 0],
        [0, 0, 1, 0, 1],
        [0, 0, -1, 0, 1],
        [0, -1, 0, 1, 0],
        [0, 1, 0, 0, 1],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|v| ivec(v))
    .collect()
}

fn cone_of(idx: &[usize]) -> Cone {
    let r = rho();
    Cone::new(Side::N, 5, idx.iter().map(|&i| r[i - 1].clone()).collect()).unwrap()
}

fn labels(v: &[&str]) -> BTreeSet<String> {
    v.iter().map(|s| s.to_string()).collect()
}

type Table = BTreeMap<String, (usize, BTreeMap<usize, usize>)>;

fn table(entries: &[(&str, usize, &[(usize, usize)])]) -> Table {
    entries
        .iter()
        .map(|(l, part, exps)| (l.to_string(), (*part, exps.iter().copied().collect())))
        .collect()
}

fn criterion_1() -> Outcome {
    let m = ivec(&[0, 0, 0, 1, 1]);
    let mut failures = Vec::new();
    for (name, idx) in [
        ("σ", &[1, 2, 3, 4, 5, 6, 7, 8][..]),
        ("σ_1", &[1, 2, 3, 4, 11, 12][..]),
        ("σ_2", &[1, 2, 3, 4, 9, 10][..]),
    ] {
        let c = cone_of(idx);
        let cert = classify(&c).map_err(|e| e.to_string())?;
        if cert.kind != GorensteinKind::ReflexiveGorenstein
            || cert.index != Some(BigInt::from(2))
            || cert.m_int() != Some(m.clone())
        {
            // report which dual rays miss height one for every candidate
            let dual_rays = c.dual().extreme_rays().map_err(|e| e.to_string())?;
            let heights: Vec<String> = dual_rays
                .iter()
                .map(|u| {
                    u.iter()
                        .zip(&m)
                        .map(|(a, b)| a * b)
                        .sum::<BigInt>()
                        .to_string()
                })
                .collect();
            failures.push(format!(
                "{name} classified {} (dual rays at heights [{}] against {:?})",
                cert.kind,
                heights.join(","),
                m
            ));
            continue;
        }
        if completely_split(&c, &cert)
            .map_err(|e| e.to_string())?
            .is_none()
        {
            failures.push(format!("{name} has no splitting"));
        }
    }
    let sigma = cone_of(&[1, 2, 3, 4, 5, 6, 7, 8]);
    let slice: BTreeSet<IntVector> = height_slice(&sigma.dual(), &m, &BigInt::from(1))
        .map_err(|e| e.to_string())?
        .points()
        .iter()
        .cloned()
        .collect();
    let xi: BTreeSet<IntVector> = [
        [1, 0, 0, 1, 0],
        [0, 1, 0, 1, 0],
        [0, 0, 1, 0, 1],
        [-1, -1, -1, 0, 1],
        [0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1],
    ]
    .iter()
    .map(|v| ivec(v))
    .collect();
    if slice != xi {
        failures.push(format!("dual slice {slice:?}"));
    }
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(())
}

fn criterion_2() -> Outcome {
    let fx = fixtures::example62().map_err(|e| e.to_string())?;
    let expected = [
        vec![labels(&["c1", "c2", "c5"]), labels(&["c3", "c4", "c6"])],
        vec![labels(&["c1", "c4", "c5"]), labels(&["c2", "c3", "c6"])],
    ];
    for ((run, options), parts) in fx.runs.iter().zip(&expected) {
        let report = run_exoflop(&fx.model, options);
        let out = report
            .output
            .as_ref()
            .ok_or(format!("{run}: {:?}", report.failure))?;
        ensure!(
            &part_labels(&out.potentials) == parts,
            "{run}: parts {:?}",
            part_labels(&out.potentials)
        );
    }

    // W′ on the bundle over the base itself
    let identity = fixtures::identity_run(&fx.model).map_err(|e| e.to_string())?;
    let nef = identity
        .assumption
        .as_ref()
        .and_then(|a| a.nef.clone())
        .ok_or("identity run has no projection")?;
    let out = identity
        .output
        .as_ref()
        .ok_or("identity run has no output")?;
    let w1 = named_table(&out.potentials, &fx.output_names(&nef));
    let w1_expected = table(&[
        ("c1", 0, &[(1, 2)]),
        ("c2", 0, &[(2, 2)]),
        ("c5", 0, &[(3, 1), (4, 1)]),
        ("c3", 1, &[(3, 2)]),
        ("c4", 1, &[(4, 2)]),
        ("c6", 1, &[(1, 1), (2, 1)]),
    ]);
    ensure!(w1 == w1_expected, "W′ table {w1:?}");

    // W″ on the bundle whose support is σ_2, split by ρ9, ρ10
    let r = rho();
    let m = ivec(&[0, 0, 0, 1, 1]);
    let nef2 = nef_partition_with_elements(
        &cone_of(&[1, 2, 3, 4, 9, 10]),
        &m,
        &m,
        &[r[8].clone(), r[9].clone()],
    )
    .map_err(|e| e.to_string())?;
    let parts2 = rewrite_potential(&fx.model.potential, &nef2).map_err(|e| e.to_string())?;
    let w2 = named_table(&parts2, &fx.output_names(&nef2));
    let w2_expected = table(&[
        ("c1", 0, &[(1, 2)]),
        ("c4", 0, &[(4, 2)]),
        ("c5", 0, &[(3, 1), (4, 1)]),
        ("c2", 1, &[(2, 2)]),
        ("c3", 1, &[(3, 2)]),
        ("c6", 1, &[(1, 1), (2, 1)]),
    ]);
    ensure!(w2 == w2_expected, "W″ table {w2:?}");
    Ok(())
}

/// The family's vectors written out coordinate by coordinate.
fn lt_vectors(n: usize) -> (Vec<IntVector>, IntVector, IntVector) {
    let dim = 2 * n + 1;
    let vec_with = |entries: &[(usize, i64)]| -> IntVector {
        let mut v = vec![0i64; dim];
        for &(i, x) in entries {
            v[i] += x;
        }
        ivec(&v)
    };
    let n_i = n as i64;
    let (t1, t2) = (2 * n - 1, 2 * n);
    let delta1: Vec<(usize, i64)> = (0..n).map(|j| (j, -1)).collect();
    let delta2: Vec<(usize, i64)> = (n..2 * n - 1).map(|j| (j, -1)).collect();
    let mut rays = Vec::new();
    for i in 0..n {
        let mut e = delta2.clone();
        e.extend([(i, n_i), (t2, 1)]);
        rays.push(vec_with(&e));
    }
    for i in n..2 * n - 1 {
        let mut e = delta1.clone();
        e.extend([(i, n_i), (t1, 1)]);
        rays.push(vec_with(&e));
    }
    let mut e = delta1.clone();
    e.push((t1, 1));
    rays.push(vec_with(&e));
    for i in 0..n {
        let mut e = delta1.clone();
        e.extend([(i, n_i), (t1, 1)]);
        rays.push(vec_with(&e));
    }
    for i in n..2 * n - 1 {
        let mut e = delta2.clone();
        e.extend([(i, n_i), (t2, 1)]);
        rays.push(vec_with(&e));
    }
    let mut e = delta2.clone();
    e.push((t2, 1));
    rays.push(vec_with(&e));
    (rays, vec_with(&[(t1, 1)]), vec_with(&[(t2, 1)]))
}

fn lt_table(n: usize) -> Table {
    let mut t = Table::new();
    for i in 1..=2 * n {
        let part = usize::from(i > n);
        t.insert(
            format!("c{i}"),
            (part, BTreeMap::from([(i, n), (i + 2 * n, n)])),
        );
    }
    t.insert(
        format!("c{}", 2 * n + 1),
        (0, (n + 1..=3 * n).map(|j| (j, 1)).collect()),
    );
    let mut last: BTreeMap<usize, usize> = (1..=n).map(|j| (j, 1)).collect();
    last.extend((3 * n + 1..=4 * n).map(|j| (j, 1)));
    t.insert(format!("c{}", 2 * n + 2), (1, last));
    t
}

fn criterion_3() -> Outcome {
    for n in [2, 3] {
        let fx = fixtures::lt(n).map_err(|e| e.to_string())?;
        let (rays, t1, t2) = lt_vectors(n);
        let mut bundle_expected: Vec<IntVector> = rays[..2 * n].to_vec();
        bundle_expected.extend([t1.clone(), t2.clone()]);
        ensure!(
            fx.model.bundle.rays() == bundle_expected.as_slice(),
            "n={n}: bundle rays {:?}",
            fx.model.bundle.rays()
        );

        let report = run_exoflop(&fx.model, &fx.runs[0].1);
        let sw = report
            .sigma_w
            .as_ref()
            .ok_or(format!("n={n}: {:?}", report.failure))?;
        let extreme = sw.cone.dual().extreme_rays().map_err(|e| e.to_string())?;
        let mut listed = rays.clone();
        listed.extend([t1, t2]);
        ensure!(listed.len() == 4 * n + 2, "n={n}: listed {}", listed.len());
        for r in &extreme {
            ensure!(listed.contains(r), "n={n}: extreme ray {r:?} not listed");
        }
        for v in &listed {
            ensure!(in_cone(&extreme, v), "n={n}: listed {v:?} outside σ_W^∨");
            ensure!(
                v.iter()
                    .fold(BigInt::from(0), |g, x| num_integer::Integer::gcd(&g, x))
                    == BigInt::from(1),
                "n={n}: {v:?} not primitive"
            );
        }

        let criteria = report.criteria.as_ref().ok_or("criteria missing")?;
        let dual_index = criteria.route_a.dual.as_ref().and_then(|c| c.index.clone());
        ensure!(
            criteria.route_a.saturated
                && criteria.route_a.split.is_some()
                && criteria.route_a.passed
                && dual_index == Some(BigInt::from(2)),
            "n={n}: route A {:?}",
            criteria.route_a
        );
        let expected_verdict = if n == 2 {
            Verdict::Equivalence
        } else {
            Verdict::CrepantCategoricalResolution
        };
        ensure!(
            report.verdict == expected_verdict,
            "n={n}: verdict {}",
            report.verdict
        );

        let nef = report
            .assumption
            .as_ref()
            .and_then(|a| a.nef.clone())
            .ok_or("no projection")?;
        let out = report.output.as_ref().ok_or("no output")?;
        let got = named_table(&out.potentials, &fx.output_names(&nef));
        ensure!(got == lt_table(n), "n={n}: W̄ table {got:?}");

        if n == 2 {
            let sigma1 = cone_of(&[1, 2, 3, 4, 11, 12]);
            let support = fx.model.bundle_support().map_err(|e| e.to_string())?;
            ensure!(
                cones_equal(&support, &sigma1).map_err(|e| e.to_string())?,
                "support is not σ_1"
            );
            let other = fixtures::example62().map_err(|e| e.to_string())?;
            ensure!(other.model == fx.model, "models differ");
            let a = format!("{report:?}");
            let b = format!("{:?}", run_exoflop(&other.model, &other.runs[0].1));
            ensure!(a == b, "reports differ");
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let fx = fixtures::aspinwall().map_err(|e| e.to_string())?;
    let before = to_rows(&fx.model.cox.charge_matrix);
    ensure!(
        row_lattices_equal(
            &before,
            &[vec![1, 1, 1, 1, -4].into_iter().map(BigInt::from).collect()]
        ),
        "before {before:?}"
    );

    let report = run_exoflop(&fx.model, &fx.runs[0].1);
    let psi = report.psi.as_ref().ok_or(format!("{:?}", report.failure))?;
    let cox = report.psi_cox.as_ref().ok_or("no charge data")?;
    let ordered = fixtures::charge_in_order(
        &cox.charge_matrix,
        &psi.fan,
        &fx,
        &["x1", "x2", "x3", "x0", "u", "y"],
    )
    .ok_or("ray names missing")?;
    let after = to_rows(&ordered);
    // each row is a relation among the rays in that order
    let rays: Vec<IntVector> = [
        [1, 0, 0, 1],
        [0, 1, 0, 1],
        [0, 0, 1, 1],
        [-1, -1, -1, 1],
        [0, 0, 0, 1],
        [-1, 0, 0, 1],
    ]
    .iter()
    .map(|v| ivec(v))
    .collect();
    for row in &after {
        for k in 0..4 {
            let s: BigInt = row.iter().zip(&rays).map(|(c, v)| c * &v[k]).sum();
            ensure!(s == BigInt::from(0), "row {row:?} is not a relation");
        }
    }
    let expected: Vec<Vec<BigInt>> = [[1, 1, 1, 1, -4, 0], [1, 0, 0, 0, -2, 1]]
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    ensure!(row_lattices_equal(&after, &expected), "after {after:?}");

    let key = |fan: &Fan, c: &Vec<usize>| -> BTreeSet<IntVector> {
        c.iter().map(|&i| fan.rays()[i].clone()).collect()
    };
    let old: BTreeSet<BTreeSet<IntVector>> = fx
        .model
        .bundle
        .max_cones()
        .iter()
        .map(|c| key(&fx.model.bundle, c))
        .collect();
    let new: Vec<BTreeSet<IntVector>> = psi
        .fan
        .max_cones()
        .iter()
        .map(|c| key(&psi.fan, c))
        .filter(|c| !old.contains(c))
        .collect();
    let simplex: BTreeSet<IntVector> = [&rays[5], &rays[1], &rays[2], &rays[3]]
        .into_iter()
        .cloned()
        .collect();
    ensure!(new == vec![simplex], "added cones {new:?}");
    ensure!(
        psi.fan.max_cones().len() == old.len() + 1,
        "Ψ has {} cones",
        psi.fan.max_cones().len()
    );

    let heights = report.heights.as_ref().ok_or("no heights")?;
    ensure!(
        heights.case == HeightCase::AllHeights1,
        "height case {:?}",
        heights.case
    );
    ensure!(
        report.verdict == Verdict::Equivalence,
        "verdict {}",
        report.verdict
    );
    ensure!(!report.provisos.is_empty(), "no provisos attached");
    Ok(())
}

const FIXTURES: [&str; 4] = ["aspinwall", "example62", "lt:2", "lt:3"];

fn nef_soundness(fx: &Fixture) -> Outcome {
    let mut runs: Vec<_> = fx
        .runs
        .iter()
        .map(|(n, o)| (n.clone(), run_exoflop(&fx.model, o)))
        .collect();
    runs.push((
        "identity".into(),
        fixtures::identity_run(&fx.model).map_err(|e| e.to_string())?,
    ));
    for (run, report) in runs {
        let nef = report
            .assumption
            .as_ref()
            .and_then(|a| a.nef.clone())
            .ok_or(format!("{}: {run}: no projection", fx.name))?;
        let sp = report.sigma_prime.as_ref().ok_or("no σ′")?;
        for g in sp.extreme_rays().map_err(|e| e.to_string())? {
            let values: Vec<BigInt> = nef
                .dual_splitting
                .points
                .iter()
                .map(|q| q.iter().zip(&g).map(|(a, b)| a * b).sum())
                .collect();
            let ones = values.iter().filter(|v| **v == BigInt::from(1)).count();
            let zeros = values.iter().filter(|v| **v == BigInt::from(0)).count();
            ensure!(
                ones == 1 && zeros + 1 == values.len(),
                "{}: {run}: {g:?} pairs to {values:?}",
                fx.name
            );
        }
    }
    Ok(())
}

fn identity_idempotence(fx: &Fixture) -> Outcome {
    let report = fixtures::identity_run(&fx.model).map_err(|e| e.to_string())?;
    let out = report
        .output
        .as_ref()
        .ok_or(format!("{}: {:?}", fx.name, report.failure))?;
    ensure!(
        canonical_output(out) == canonical_input(&fx.model),
        "{}: identity changed the model",
        fx.name
    );
    ensure!(
        report.heights.as_ref().map(|h| h.case) == Some(HeightCase::AllHeights1),
        "{}: identity heights",
        fx.name
    );
    Ok(())
}

fn criterion_5() -> Outcome {
    run_property(200, cone_strategy(), |(d, g)| check_double_dual(d, &g))
        .map_err(|e| format!("double dual: {e}"))?;
    run_property(100, extension_strategy(), |i| check_extension(&i))
        .map_err(|e| format!("extension: {e}"))?;
    run_property(200, matrix_strategy(), |m| check_snf(&m)).map_err(|e| format!("SNF: {e}"))?;
    run_property(200, system_strategy(), |(n, s)| check_fm(n, &s))
        .map_err(|e| format!("FM: {e}"))?;
    for name in FIXTURES {
        let fx = fixtures::by_name(name).map_err(|e| e.to_string())?;
        nef_soundness(&fx)?;
        identity_idempotence(&fx)?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let reeve = Polytope::from_int_points(
        3,
        &[
            ivec(&[0, 0, 0]),
            ivec(&[1, 0, 0]),
            ivec(&[0, 1, 0]),
            ivec(&[1, 1, 2]),
        ],
    )
    .map_err(|e| e.to_string())?;
    let closure = is_integrally_closed(&reeve, 2).map_err(|e| e.to_string())?;
    ensure!(
        !closure.closed && closure.witness == Some((ivec(&[1, 1, 1]), 2)),
        "Reeve {closure:?}"
    );

    let quarter = |v: [i64; 3]| -> Vec<Rat> {
        rvec(&v)
            .into_iter()
            .map(|x| x / Rat::from_integer(4.into()))
            .collect()
    };
    let cfg = PointConfig::new(
        [
            [4, 0, 0],
            [0, 4, 0],
            [0, 0, 4],
            [2, 1, 1],
            [1, 2, 1],
            [1, 1, 2],
        ]
        .into_iter()
        .map(quarter)
        .collect(),
        rvec(&[1, 1, 1]),
    )
    .map_err(|e| e.to_string())?;
    let twisted = vec![
        vec![0, 1, 4],
        vec![0, 4, 3],
        vec![1, 2, 5],
        vec![1, 5, 4],
        vec![2, 0, 3],
        vec![2, 3, 5],
        vec![3, 4, 5],
    ];
    let w = find_regularity_weights(&cfg, &twisted).map_err(|e| e.to_string())?;
    ensure!(w.is_none(), "twisted triangulation certified by {w:?}");

    let base = Fan::new(1, vec![ivec(&[1]), ivec(&[-1])], vec![vec![0], vec![1]])
        .map_err(|e| e.to_string())?;
    let potential = PotentialSupport::new(
        2,
        vec![
            PotentialTerm::new(ivec(&[0, 1]), "a"),
            PotentialTerm::new(ivec(&[0, 2]), "b"),
        ],
    )
    .map_err(|e| e.to_string())?;
    let err = build_lg_model(base, vec![TorusDivisor::from_i64(&[1, 1])], potential).unwrap_err();
    ensure!(
        matches!(err, Error::PotentialHeight { index: 1, .. }),
        "model error {err:?}"
    );
    Ok(())
}

fn evaluate(n: usize, name: &str, f: fn() -> Outcome) -> bool {
    let start = std::time::Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match outcome {
        Ok(()) => {
            println!("criterion {n} ({name}): PASS [{secs:.1}s]");
            true
        }
        Err(e) => {
            println!("criterion {n} ({name}): FAIL: {e} [{secs:.1}s]");
            false
        }
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("two-bundle cones are reflexive and split", criterion_1),
        ("two-bundle potential rewrites", criterion_2),
        ("Libgober–Teitelbaum family", criterion_3),
        ("quartic with a singular point", criterion_4),
        ("property suites", criterion_5),
        ("negative controls", criterion_6),
    ];
    let results: Vec<bool> = criteria
        .iter()
        .enumerate()
        .map(|(i, (name, f))| evaluate(i + 1, name, *f))
        .collect();
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
