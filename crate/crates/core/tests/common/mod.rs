//! Independent oracles and property checks shared by the integration tests.
//! Nothing here calls the library's own elimination, duality or lattice code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use exoflop_core::arith::{fm_feasible, smith_normal_form, Inequality, IntMatrix, Matrix};
use exoflop_core::cone::{Cone, Side};
use exoflop_core::triangulate::{
    extend_triangulation, lower_hull_subdivision, PointConfig, RegularTriangulation, WeightFunction,
};

pub type Q = BigRational;

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn qv(v: &[BigInt]) -> Vec<Q> {
    v.iter().map(|x| Q::from_integer(x.clone())).collect()
}

/// Row reduction of `rows` augmented by `rhs`; returns one solution of
/// `Σ_j x_j rows[i][j] = rhs[i]` or `None`.
pub fn solve(rows: &[Vec<Q>], rhs: &[Q], nvars: usize) -> Option<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nvars {
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..=nvars {
                    let t = &m[row][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[nvars].is_zero()) {
        return None;
    }
    let mut x = vec![Q::zero(); nvars];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][nvars].clone();
    }
    Some(x)
}

pub fn rank(rows: &[Vec<Q>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                for j in 0..ncols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn det(rows: &[Vec<Q>]) -> Q {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut d = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !m[i][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            m.swap(p, col);
            d = -d;
        }
        d *= &m[col][col];
        for i in col + 1..n {
            let f = &m[i][col] / &m[col][col];
            for j in col..n {
                let t = &m[col][j] * &f;
                m[i][j] -= t;
            }
        }
    }
    d
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..n {
        let extra: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.push(i);
                s
            })
            .collect();
        out.extend(extra);
    }
    out
}

/// Carathéodory: `x ∈ Cone(gens)` iff `x` is a nonnegative combination of
/// some linearly independent subset.
pub fn in_cone(gens: &[Vec<BigInt>], x: &[BigInt]) -> bool {
    let d = x.len();
    let target = qv(x);
    if target.iter().all(Zero::is_zero) {
        return true;
    }
    for s in subsets(gens.len(), d) {
        if s.is_empty() {
            continue;
        }
        let cols: Vec<Vec<Q>> = s.iter().map(|&i| qv(&gens[i])).collect();
        if rank(&cols, d) != s.len() {
            continue;
        }
        // rows of the system are coordinates
        let rows: Vec<Vec<Q>> = (0..d)
            .map(|k| cols.iter().map(|c| c[k].clone()).collect())
            .collect();
        if let Some(lambda) = solve(&rows, &target, s.len()) {
            if lambda.iter().all(|l| !l.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Independent lattice equality for matrices with independent rows: every
/// row of each is an integral combination of the rows of the other.
pub fn row_lattices_equal(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> bool {
    let spans = |x: &[Vec<BigInt>], y: &[Vec<BigInt>]| {
        let ncols = y[0].len();
        let basis: Vec<Vec<Q>> = y.iter().map(|r| qv(r)).collect();
        assert_eq!(
            rank(&basis, ncols),
            y.len(),
            "oracle expects independent rows"
        );
        let rows: Vec<Vec<Q>> = (0..ncols)
            .map(|k| basis.iter().map(|r| r[k].clone()).collect())
            .collect();
        x.iter().all(|r| {
            solve(&rows, &qv(r), y.len()).is_some_and(|c| c.iter().all(|v| v.is_integer()))
        })
    };
    a.len() == b.len() && spans(a, b) && spans(b, a)
}

pub fn to_rows(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn int_vec(entries: &[i64]) -> Vec<BigInt> {
    entries.iter().map(|&x| BigInt::from(x)).collect()
}

// ----------------------------------------------------------------------------
// double dual

pub fn cone_strategy() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=5).prop_flat_map(|d| {
        (
            Just(d),
            prop::collection::vec(prop::collection::vec(-4i64..=4, d), 1..=7),
        )
    })
}

pub fn check_double_dual(d: usize, gens: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let gens: Vec<Vec<BigInt>> = gens.iter().map(|g| int_vec(g)).collect();
    let c = Cone::new(Side::N, d, gens.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assume!(c.is_strictly_convex());
    let dual = c.dual();
    for u in dual.generators() {
        for g in &gens {
            let p: BigInt = u.iter().zip(g).map(|(a, b)| a * b).sum();
            prop_assert!(!p.is_negative(), "dual ray {:?} negative on {:?}", u, g);
        }
    }
    let dd = dual.dual();
    let dd_rays = dd
        .extreme_rays()
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(dd.lineality().is_empty());
    for r in &dd_rays {
        prop_assert!(
            in_cone(&gens, r),
            "double dual ray {:?} outside the cone",
            r
        );
    }
    for g in &gens {
        prop_assert!(
            in_cone(&dd_rays, g),
            "generator {:?} outside the double dual",
            g
        );
    }
    let a: BTreeSet<_> = c
        .extreme_rays()
        .map_err(|e| TestCaseError::fail(e.to_string()))?
        .into_iter()
        .collect();
    let b: BTreeSet<_> = dd_rays.into_iter().collect();
    prop_assert_eq!(a, b);
    Ok(())
}

// ----------------------------------------------------------------------------
// extension of regular triangulations

#[derive(Clone, Debug)]
pub struct ExtensionInstance {
    pub l0: Vec<Vec<i64>>,
    pub weights: Vec<i64>,
    pub l1: Vec<Vec<i64>>,
}

pub fn extension_strategy() -> impl Strategy<Value = ExtensionInstance> {
    (1usize..=3).prop_flat_map(|k| {
        (
            prop::collection::vec(prop::collection::vec(-3i64..=3, k), k + 1..=k + 4),
            prop::collection::vec(0i64..=30, k + 5),
            prop::collection::vec(prop::collection::vec(-4i64..=4, k), 1..=4),
        )
            .prop_map(|(l0, weights, l1)| ExtensionInstance { l0, weights, l1 })
    })
}

fn homogenize(p: &[i64]) -> Vec<Q> {
    p.iter()
        .map(|&x| q(x))
        .chain(std::iter::once(Q::one()))
        .collect()
}

/// Checks that `cells` is a regular triangulation of all of `points`'
/// convex hull certified by `weights`, using only local linear algebra.
pub fn check_regular_triangulation(
    points: &[Vec<Q>],
    cells: &[Vec<usize>],
    weights: &[Q],
) -> Result<(), String> {
    let d = points[0].len();
    let mut ridges: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for cell in cells {
        if cell.len() != d {
            return Err(format!("cell {cell:?} is not a simplex"));
        }
        let rows: Vec<Vec<Q>> = cell.iter().map(|&i| points[i].clone()).collect();
        if det(&rows).is_zero() {
            return Err(format!("cell {cell:?} is degenerate"));
        }
        // the linear functional agreeing with the weights on the cell
        let w: Vec<Q> = cell.iter().map(|&i| weights[i].clone()).collect();
        let a = solve(&rows, &w, d).ok_or("singular cell")?;
        for (i, p) in points.iter().enumerate() {
            let h: Q = a.iter().zip(p).map(|(x, y)| x * y).sum();
            let gap = &weights[i] - h;
            if cell.contains(&i) != gap.is_zero() || gap.is_negative() {
                return Err(format!("cell {cell:?} is not a lower facet at point {i}"));
            }
        }
        for skip in 0..d {
            let mut ridge: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != skip)
                .map(|(_, &i)| i)
                .collect();
            ridge.sort_unstable();
            *ridges.entry(ridge).or_default() += 1;
        }
    }
    for (ridge, count) in ridges {
        // normal of the ridge inside the hyperplane: kernel of its points
        // plus any direction completing to full rank
        let rows: Vec<Vec<Q>> = ridge.iter().map(|&i| points[i].clone()).collect();
        let normal = kernel_vector(&rows, d).ok_or("ridge has no normal")?;
        let side = |p: &Vec<Q>| -> Q { normal.iter().zip(p).map(|(x, y)| x * y).sum() };
        let pos = points.iter().any(|p| side(p).is_positive());
        let neg = points.iter().any(|p| side(p).is_negative());
        let boundary = !(pos && neg);
        match (count, boundary) {
            (1, true) | (2, false) => {}
            _ => {
                return Err(format!(
                    "ridge {ridge:?} meets {count} cells, boundary = {boundary}"
                ))
            }
        }
    }
    Ok(())
}

fn kernel_vector(rows: &[Vec<Q>], d: usize) -> Option<Vec<Q>> {
    let r = rank(rows, d);
    for k in 0..d {
        let mut test = rows.to_vec();
        let e: Vec<Q> = (0..d)
            .map(|j| if j == k { Q::one() } else { Q::zero() })
            .collect();
        test.push(e);
        if rank(&test, d) == r + 1 {
            // solve rows·x = 0 with x_k = 1
            let mut sys = rows.to_vec();
            let mut rhs = vec![Q::zero(); rows.len()];
            let mut pin = vec![Q::zero(); d];
            pin[k] = Q::one();
            sys.push(pin);
            rhs.push(Q::one());
            if let Some(x) = solve(&sys, &rhs, d) {
                return Some(x);
            }
        }
    }
    None
}

pub fn check_extension(inst: &ExtensionInstance) -> Result<(), TestCaseError> {
    let k = inst.l0[0].len();
    let mut l0: Vec<Vec<i64>> = Vec::new();
    for p in &inst.l0 {
        if !l0.contains(p) {
            l0.push(p.clone());
        }
    }
    let pts0: Vec<Vec<Q>> = l0.iter().map(|p| homogenize(p)).collect();
    prop_assume!(rank(&pts0, k + 1) == k + 1);
    let cfg0 = PointConfig::new(
        pts0.clone(),
        (0..=k).map(|j| if j == k { q(1) } else { q(0) }).collect(),
    )
    .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let w0 = WeightFunction::from_i64(&inst.weights[..l0.len()])
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let sub = lower_hull_subdivision(&cfg0, &w0).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assume!(sub.is_triangulation);
    let t0 = RegularTriangulation {
        cells: sub.cells.clone(),
        weights: w0,
    };
    let l1: Vec<Vec<Q>> = inst.l1.iter().map(|p| homogenize(p)).collect();
    let ext =
        extend_triangulation(&cfg0, &t0, &l1).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let pts = ext.config.points().to_vec();
    // the original points keep their indices
    prop_assert_eq!(&pts[..pts0.len()], &pts0[..]);
    let mut expected: BTreeSet<Vec<Q>> = pts0.iter().cloned().collect();
    expected.extend(l1.iter().cloned());
    prop_assert_eq!(pts.iter().cloned().collect::<BTreeSet<_>>(), expected);
    let cells: BTreeSet<Vec<usize>> = ext
        .triangulation
        .cells
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c
        })
        .collect();
    for c in &t0.cells {
        let mut c = c.clone();
        c.sort_unstable();
        prop_assert!(cells.contains(&c), "original cell {:?} lost", c);
    }
    let cells: Vec<Vec<usize>> = cells.into_iter().collect();
    check_regular_triangulation(&pts, &cells, &ext.triangulation.weights.weights)
        .map_err(TestCaseError::fail)?;
    Ok(())
}

// ----------------------------------------------------------------------------
// Smith normal form

pub fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4, 1usize..=5)
        .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-6i64..=6, c), r))
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

fn gcd(a: BigInt, b: BigInt) -> BigInt {
    if b.is_zero() {
        a.abs()
    } else {
        let r = &a % &b;
        gcd(b, r)
    }
}

/// gcd of all `k × k` minors.
fn determinantal_divisor(a: &[Vec<BigInt>], k: usize) -> BigInt {
    let rows = subsets(a.len(), k)
        .into_iter()
        .filter(|s| s.len() == k)
        .collect::<Vec<_>>();
    let cols = subsets(a[0].len(), k)
        .into_iter()
        .filter(|s| s.len() == k)
        .collect::<Vec<_>>();
    let mut g = BigInt::zero();
    for r in &rows {
        for c in &cols {
            let minor: Vec<Vec<Q>> = r
                .iter()
                .map(|&i| {
                    c.iter()
                        .map(|&j| Q::from_integer(a[i][j].clone()))
                        .collect()
                })
                .collect();
            g = gcd(g, det(&minor).to_integer());
        }
    }
    g
}

pub fn check_snf(entries: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let a: Vec<Vec<BigInt>> = entries.iter().map(|r| int_vec(r)).collect();
    let m: IntMatrix =
        Matrix::from_rows(a[0].len(), &a).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let snf = smith_normal_form(&m);
    let (u, s, v) = (to_rows(&snf.u), to_rows(&snf.s), to_rows(&snf.v));
    prop_assert_eq!(mat_mul(&mat_mul(&u, &s), &v), a.clone());
    prop_assert_eq!(
        mat_mul(&mat_mul(&to_rows(&snf.u_inv), &a), &to_rows(&snf.v_inv)),
        s.clone()
    );
    prop_assert_eq!(mat_mul(&u, &to_rows(&snf.u_inv)), identity(a.len()));
    prop_assert_eq!(mat_mul(&v, &to_rows(&snf.v_inv)), identity(a[0].len()));
    for (i, row) in s.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            prop_assert!(i == j || x.is_zero());
        }
    }
    let diag: Vec<BigInt> = (0..a.len().min(a[0].len()))
        .map(|i| s[i][i].clone())
        .collect();
    let mut prefix = BigInt::one();
    for (k, dk) in diag.iter().enumerate() {
        prop_assert!(!dk.is_negative());
        if k > 0 && !diag[k - 1].is_zero() {
            prop_assert!(
                (dk % &diag[k - 1]).is_zero(),
                "{:?} breaks divisibility",
                diag
            );
        }
        prefix *= dk;
        prop_assert_eq!(&prefix, &determinantal_divisor(&a, k + 1));
    }
    Ok(())
}

// ----------------------------------------------------------------------------
// Fourier–Motzkin

pub type System = Vec<(Vec<i64>, i64, bool)>;

pub fn system_strategy() -> impl Strategy<Value = (usize, System)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(
                (
                    prop::collection::vec(-3i64..=3, n),
                    -3i64..=3,
                    any::<bool>(),
                ),
                1..=5,
            ),
        )
    })
}

fn satisfied(row: &(Vec<i64>, i64, bool), x: &[Q]) -> bool {
    let v: Q = row.0.iter().zip(x).map(|(a, b)| q(*a) * b).sum::<Q>() + q(row.1);
    if row.2 {
        v.is_positive()
    } else {
        !v.is_negative()
    }
}

/// Exact feasibility by minimal faces. An auxiliary variable `s ≤ 1` is
/// subtracted from every strict row; the system is feasible iff the maximum
/// of `s` over the weak relaxation is positive, and that maximum is attained
/// on a minimal face, which is cut out by making some rows tight.
pub fn oracle_feasible(n: usize, system: &System) -> bool {
    let mut rows: Vec<(Vec<Q>, Q)> = system
        .iter()
        .map(|(a, c, strict)| {
            let mut r: Vec<Q> = a.iter().map(|&x| q(x)).collect();
            r.push(if *strict { q(-1) } else { q(0) });
            (r, q(*c))
        })
        .collect();
    let mut cap = vec![q(0); n];
    cap.push(q(-1));
    rows.push((cap, q(1)));
    let any_strict = system.iter().any(|r| r.2);
    let mut best: Option<Q> = None;
    for s in subsets(rows.len(), n + 1) {
        let sys: Vec<Vec<Q>> = s.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<Q> = s.iter().map(|&i| -rows[i].1.clone()).collect();
        let Some(x) = solve(&sys, &rhs, n + 1) else {
            continue;
        };
        let ok = rows
            .iter()
            .all(|(a, c)| !(a.iter().zip(&x).map(|(p, v)| p * v).sum::<Q>() + c).is_negative());
        if ok && best.as_ref().is_none_or(|b| &x[n] > b) {
            best = Some(x[n].clone());
        }
    }
    match best {
        None => false,
        Some(s) => !any_strict || s.is_positive(),
    }
}

pub fn check_fm(n: usize, system: &System) -> Result<(), TestCaseError> {
    let ineqs: Vec<Inequality> = system
        .iter()
        .map(|(a, c, strict)| {
            let coeffs = a.iter().map(|&x| q(x)).collect();
            if *strict {
                Inequality::strict(coeffs, q(*c))
            } else {
                Inequality::weak(coeffs, q(*c))
            }
        })
        .collect();
    let got = fm_feasible(&ineqs, n);
    prop_assert_eq!(
        got.is_some(),
        oracle_feasible(n, system),
        "system {:?}",
        system
    );
    if let Some(x) = got {
        for row in system {
            prop_assert!(satisfied(row, &x), "witness {:?} violates {:?}", x, row);
        }
    }
    Ok(())
}

/// Runs a property with a fixed case count and a deterministic seed.
pub fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        max_global_rejects: 100_000,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(
        config,
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    runner.run(&strategy, test).map_err(|e| e.to_string())
}
