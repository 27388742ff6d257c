//! Check records, reports and the full verification run behind
//! `birank verify-paper`.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::atlas::{self, FIXED_IDS};
use crate::bipartite::{birank, classify, mixture, partial_transpose, Birank, ProductVector, Verdict};
use crate::error::Result;
use crate::numerics::{char_poly, rank_tol};
use crate::pencil::{
    ces_standard, fiber_at, fibonacci_points, pencil_from_subspace, rational_normal_curve_defect,
    span_dimension, spanning_product_vectors,
};
use crate::sampling;
use crate::surgery::{greedy_decomposition, is_edge_state, length_2x3, EdgeKind};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Where the claim is made (table row, equation or example).
    pub location: String,
    pub expected: Value,
    pub observed: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, location: impl Into<String>, expected: Value, observed: Value, pass: bool) -> Self {
        Self {
            name: name.into(),
            location: location.into(),
            expected,
            observed,
            tolerance: None,
            pass,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    fn failed(name: &str, location: &str, err: impl std::fmt::Display) -> Self {
        Self::new(name, location, Value::Null, json!({ "error": err.to_string() }), false)
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

/// Output of one command: named result fields plus any checks.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub tau: f64,
    pub grid: usize,
    pub seed: u64,
    pub result: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, tau: f64, grid: usize, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            tau,
            grid,
            seed,
            result: Map::new(),
            checks: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.result
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn push(&mut self, check: Check) {
        if check.pass {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.checks.push(check);
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "command: {}\ntau: {:e}\ngrid: {}\nseed: {}\n",
            self.command, self.tau, self.grid, self.seed
        );
        for (k, v) in &self.result {
            out.push_str(&format!("{k}: {}\n", compact(v)));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} [{}] expected {} observed {}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.location,
                compact(&c.expected),
                compact(&c.observed)
            ));
        }
        if !self.checks.is_empty() {
            out.push_str(&format!(
                "summary: {} passed, {} failed\n",
                self.summary.passed, self.summary.failed
            ));
        }
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

fn guard(name: &str, location: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::failed(name, location, e)])
}

fn birank_json(b: Birank) -> Value {
    json!([b.r, b.s])
}

fn table_checks(id: &str, tau: f64) -> Vec<Check> {
    guard(id, id, || {
        let e = atlas::fixed_example(id)?;
        let chk = e.certificate.check(&e.state, tau)?;
        let mut out = vec![Check::new(
            format!("{id} birank"),
            id,
            birank_json(e.certificate.birank),
            birank_json(chk.birank),
            chk.pass,
        )];
        if let Some(note) = &e.note {
            out.push(Check::new(format!("{id} printed state"), id, json!("printed"), json!(note), false));
        }
        let want = e.certificate.length.unwrap_or(0);
        if e.state.dim_b() == 3 {
            let witness = e.decomposition.as_deref();
            let got = length_2x3(&e.state, witness, tau).map(|r| r.length);
            out.push(Check::new(
                format!("{id} length"),
                id,
                json!(want),
                got.as_ref().map_or_else(|e| json!(e.to_string()), |l| json!(l)),
                got.ok() == Some(want),
            ));
        } else if let Some(t) = &e.decomposition {
            let err = mixture(t)?.matrix().max_abs_diff(e.state.matrix());
            let b = chk.birank;
            out.push(Check::new(
                format!("{id} decomposition size"),
                id,
                json!(want),
                json!(t.len()),
                t.len() == want && want == b.max() && err < 1e-12,
            ));
        }
        Ok(out)
    })
}

fn example26_checks(tau: f64) -> Vec<Check> {
    guard("example26 polynomial", "example26", || {
        let e = atlas::fixed_example("example26")?;
        let pt = partial_transpose(&e.state);
        let cp = char_poly(pt.matrix())?;
        let got: Vec<f64> = cp.coefficients.iter().map(|x| x.re).collect();
        let dev = got
            .iter()
            .zip(atlas::EXAMPLE26_CHAR_POLY)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        let min = crate::numerics::eig_hermitian(pt.matrix())?.min_value();
        Ok(vec![
            Check::new("example26 characteristic polynomial", "example26", json!(atlas::EXAMPLE26_CHAR_POLY), json!(got), dev <= 1e-6)
                .with_tolerance(1e-6),
            Check::new("example26 partial transpose positive", "example26", json!("> 0"), json!(min), min > tau),
        ])
    })
}

fn tura_checks(n: usize, tau: f64, grid: usize) -> Vec<Check> {
    guard(&format!("tura N={n}"), "eq29-30", || {
        let rho = atlas::tura_state(n)?;
        let dev = partial_transpose(&rho)
            .matrix()
            .max_abs_diff(atlas::tura_partial_transpose(n)?.matrix());
        let b = birank(&rho, tau)?;
        let mut out = vec![
            Check::new(format!("tura N={n} partial transpose"), "eq30", json!(0.0), json!(dev), dev <= 1e-12)
                .with_tolerance(1e-12),
            Check::new(format!("tura N={n} birank"), "eq29", json!([n + 1, n + 1]), birank_json(b), b == Birank::new(n + 1, n + 1)),
        ];
        let v = is_edge_state(&rho, grid, tau)?;
        let mut observed = json!({ "verdict": v.verdict, "residual": v.residual });
        if v.verdict == EdgeKind::NotEdge {
            if let Ok(res) = greedy_decomposition(&rho, &[], tau) {
                observed["separable_terms"] = json!(res.length);
                observed["reconstruction_error"] = json!(res.reconstruction_error);
            }
        }
        out.push(Check::new(
            format!("tura N={n} entangled (edge)"),
            "eq29",
            json!("edge"),
            observed,
            v.verdict == EdgeKind::Edge,
        ));
        Ok(out)
    })
}

type Builder = Box<dyn Fn() -> Result<atlas::Construction> + Send + Sync>;

fn family_checks(tau: f64) -> Vec<Check> {
    let mut cases: Vec<(String, &str, Builder)> = Vec::new();
    for n in 3..=6usize {
        for k in 1..n {
            cases.push((format!("lemma27 N={n} k={k}"), "lemma27", Box::new(move || atlas::lemma27_state(n, k, None, None))));
        }
        for k in 0..n {
            for p in 0..n {
                cases.push((format!("prop28 N={n} k={k} p={p}"), "prop28", Box::new(move || atlas::prop28_state(n, k, p, None, None))));
            }
        }
        for j in 1..=n {
            for k in j..=n {
                cases.push((format!("prop25 N={n} j={j} k={k}"), "prop25", Box::new(move || atlas::prop25_separable(n, j, k))));
            }
        }
    }
    cases
        .par_iter()
        .map(|(name, loc, build)| {
            guard(name, loc, || {
                let c = build()?;
                let chk = c.certificate.check(&c.state, tau)?;
                Ok(vec![Check::new(
                    name.clone(),
                    *loc,
                    birank_json(c.certificate.birank),
                    birank_json(chk.birank),
                    chk.pass,
                )])
            })
        })
        .flatten()
        .collect()
}

fn example29_checks(tau: f64) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 4..=6usize {
        for k in 1..n - 1 {
            let name = format!("example29 N={n} k={k}");
            out.extend(guard(&name, "example29", || {
                let e = atlas::example29_state(n, k, None)?;
                let neg = classify(&e.state, tau)?.negative_count;
                let defect = atlas::parts_cross_defect(&e.parts);
                Ok(vec![
                    Check::new(format!("{name} negative count"), "example29", json!(n - k), json!(neg), neg == n - k),
                    Check::new(format!("{name} parts annihilate"), "eq33-36", json!(0.0), json!(defect), defect <= 1e-12)
                        .with_tolerance(1e-12),
                ])
            }));
        }
        out.extend(guard("example29 single", "example29", || {
            let neg = classify(&atlas::example29_single(n)?, tau)?.negative_count;
            Ok(vec![Check::new(format!("example29 single N={n}"), "example29", json!(1), json!(neg), neg == 1)])
        }));
    }
    out
}

fn example21_checks(tau: f64) -> Vec<Check> {
    guard("example21", "example21", || {
        let e = atlas::example21_sigma()?;
        let b = birank(&e.sigma, tau)?;
        let mut five_ok = true;
        for skip in 0..6 {
            let rest: Vec<ProductVector> = e
                .vectors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, v)| v.clone())
                .collect();
            five_ok &= span_dimension(&rest, false, tau)? == 5;
        }
        let cert = atlas::example21_certificate(&e, tau)?;
        Ok(vec![
            Check::new("example21 kernel product vectors", "example21", json!(6), json!(e.vectors.len()), e.vectors.len() == 6),
            Check::new("example21 any five independent", "example21", json!(true), json!(five_ok), five_ok),
            Check::new("example21 birank", "eq15", json!([5, 5]), birank_json(b), b == Birank::new(5, 5)),
            Check::new(
                "example21 remainder coefficient",
                "example21",
                json!("c1 = 1 - c < 0"),
                json!({ "c": cert.threshold, "c1": cert.coefficients[0], "birank": birank_json(cert.birank_after), "ppt": cert.ppt_after }),
                cert.certifies_entanglement() && (cert.coefficients[0] - (1.0 - cert.threshold)).abs() < 1e-6,
            ),
        ])
    })
}

fn lemma14_checks(seed: u64) -> Vec<Check> {
    guard("lemma14", "lemma14", || {
        use rand::Rng;
        let mut rng = sampling::rng(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let (p0, p1, p2) = (rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0), rng.gen_range(0.1..3.0));
            let m = atlas::lemma14_match(p0, p1, p2)?;
            let rho = atlas::lemma14_family(m.a, m.b, m.d)?;
            let img = m.v.matmul(rho.matrix()).matmul(&m.v.adjoint());
            let target = atlas::lemma14_target(p0, p1, p2)?;
            worst = worst.max(img.max_abs_diff(target.matrix()) / target.matrix().max_abs());
        }
        Ok(vec![Check::new("lemma14 V rho V* = sigma", "eq5-12", json!(0.0), json!(worst), worst <= 1e-9).with_tolerance(1e-9)])
    })
}

fn prop2_checks(tau: f64) -> Vec<Check> {
    guard("prop2", "eq4", || {
        let s = atlas::prop2_sigma(1.0, 1.0, 1.0, 1.0)?;
        let dev = partial_transpose(&s).matrix().max_abs_diff(s.matrix()) / s.matrix().max_abs();
        let rank = rank_tol(s.matrix(), tau)?;
        let ppt = classify(&s, tau)?.verdict == Verdict::Ppt;
        Ok(vec![
            Check::new("prop2 invariant under partial transpose", "eq4", json!(0.0), json!(dev), dev <= 1e-12).with_tolerance(1e-12),
            Check::new("prop2 rank and PPT", "eq4", json!([4, true]), json!([rank, ppt]), rank == 4 && ppt),
        ])
    })
}

fn pencil_checks(tau: f64) -> Vec<Check> {
    let mut cases = Vec::new();
    for n in 2..=8usize {
        for k in 1..n {
            cases.push((n, k));
        }
    }
    cases
        .par_iter()
        .map(|&(n, k)| {
            let name = format!("bundle N={n} k={k}");
            guard(&name, "prop24", || {
                let p = pencil_from_subspace(n, &ces_standard(n, k)?, tau)?;
                let pts = fibonacci_points(100);
                let fibers_ok = pts.iter().all(|pt| fiber_at(&p, *pt).is_ok_and(|f| f.basis.len() == n - k));
                let span = spanning_product_vectors(&p)?;
                let d = span_dimension(&span, false, tau)?;
                let dc = {
                    let mut all = span.clone();
                    all.extend(crate::pencil::bundle_members(&p, &fibonacci_points(16))?);
                    span_dimension(&all, true, tau)?
                };
                let mut out = vec![
                    Check::new(format!("{name} fiber dimension"), "prop24", json!(n - k), json!(fibers_ok), fibers_ok),
                    Check::new(format!("{name} spanning rank"), "prop24", json!(2 * n - k), json!(d), d == 2 * n - k),
                    Check::new(format!("{name} partial-conjugate span"), "prop24", json!(2 * n), json!(dc), dc == 2 * n),
                ];
                if k == n - 1 {
                    let worst = pts
                        .iter()
                        .map(|pt| rational_normal_curve_defect(&p, *pt))
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    out.push(
                        Check::new(format!("{name} rational normal curve"), "prop24", json!(0.0), json!(worst), worst <= 1e-9)
                            .with_tolerance(1e-9),
                    );
                }
                Ok(out)
            })
        })
        .flatten()
        .collect()
}

/// Runs every check on the explicit states. Independent groups run in
/// parallel; the report keeps a fixed order.
pub fn verify_paper(tau: f64, grid: usize, seed: u64) -> Report {
    let groups: Vec<Box<dyn Fn() -> Vec<Check> + Send + Sync>> = vec![
        Box::new(move || FIXED_IDS.par_iter().flat_map(|id| table_checks(id, tau)).collect()),
        Box::new(move || example26_checks(tau)),
        Box::new(move || prop2_checks(tau)),
        Box::new(move || lemma14_checks(seed)),
        Box::new(move || example21_checks(tau)),
        Box::new(move || (3..=6).into_par_iter().flat_map(|n| tura_checks(n, tau, grid)).collect()),
        Box::new(move || family_checks(tau)),
        Box::new(move || example29_checks(tau)),
        Box::new(move || pencil_checks(tau)),
    ];
    let results: Vec<Vec<Check>> = groups.par_iter().map(|g| g()).collect();
    let mut report = Report::new("verify-paper", tau, grid, seed);
    for c in results.into_iter().flatten() {
        report.push(c);
    }
    report
}

/// Default seed for randomized checks.
pub const DEFAULT_SEED: u64 = 20121;
