//! Check execution.

use std::time::Instant;

use cav_core::monops::{theorem11_harness, theorem15_verify, theorem17_harness, CcInstance, HarnessReport, Verdict as CcVerdict};
use cav_core::qualif::{check_qc_range, Certificate, QCResult};
use cav_core::quadab::{
    check_qc_t3, infconv_t21, infconv_t3, lemma2_sets, lift_conjugate, remark22_lift, t21_dual_min, t3_conjugates,
    t3_dual_min_with, verify_t21, verify_t21_with, verify_t3, DualityReport,
};
use cav_core::reprfn::{br_check, is_representative, is_strongly_representative, lemma14_check, BrOutcome};
use cav_core::{fmt_f64, fmt_point, Error, ExtReal, Finite, PosInf};

use crate::build::{Check, CheckKind, Model, QcSource, RangeSource};
use crate::suites::run_suite;

/// Default product-grid size cap.
pub const DEFAULT_MAX_CELLS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    /// Multiplies every instance tolerance.
    pub tol_scale: f64,
    /// Check names or kinds to run; `None` runs everything.
    pub checks: Option<Vec<String>>,
    pub seed: u64,
    pub max_cells: usize,
    /// Record wall-clock time per check (breaks byte-determinism).
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol_scale: 1.0,
            checks: None,
            seed: 0,
            max_cells: DEFAULT_MAX_CELLS,
            timing: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Hypotheses fail or there is nothing to check.
    Vacuous,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Vacuous => "vacuous",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub kind: String,
    pub verdict: Verdict,
    pub gap: Option<ExtReal>,
    pub tolerance: Option<f64>,
    pub witness: Option<String>,
    /// Ordered key/value lines.
    pub details: Vec<(String, String)>,
    pub timing_ms: Option<f64>,
}

impl CheckResult {
    fn new(check: &Check) -> Self {
        CheckResult {
            name: check.name.clone(),
            kind: check.kind_name.clone(),
            verdict: Verdict::Fail,
            gap: None,
            tolerance: None,
            witness: None,
            details: Vec::new(),
            timing_ms: None,
        }
    }

    fn detail(&mut self, k: &str, v: impl ToString) {
        self.details.push((k.to_string(), v.to_string()));
    }

    fn error(&mut self, e: &Error) {
        self.verdict = Verdict::Fail;
        self.detail("error", e);
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn fmt_big<T: std::fmt::Display>(v: &[T]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn qualification_details(r: &mut CheckResult, q: &QCResult) {
    r.detail("qualification.generators", q.generators.len());
    r.detail("qualification.subspace", yes(q.is_subspace));
    r.detail("qualification.span_dim", q.basis.len());
    if let Some(m) = q.domains_meet {
        r.detail("qualification.domains_meet", yes(m));
    }
    r.detail("qualification.certificates_verified", yes(q.verify()));
    if let Some(i) = q.failing {
        r.detail("qualification.failing_generator", fmt_point(&q.generators[i]));
        if let Certificate::Separator(phi) = &q.certificates[i] {
            r.detail("qualification.separator", fmt_big(phi));
        }
    }
}

fn scaled_weak_violation(d: &DualityReport, scale: f64) -> Option<usize> {
    let tol = d.weak_tol * scale;
    d.lhs.values().iter().zip(&d.rhs).position(|(l, r)| match (l, r) {
        (Finite(a), Finite(b)) => *a > b + tol,
        _ => false,
    })
}

fn judge_duality(r: &mut CheckResult, d: &DualityReport, exact: bool, tolerance: Option<f64>, scale: f64) {
    let tol = tolerance.unwrap_or(d.strong_tol) * scale;
    r.gap = Some(d.max_gap);
    r.tolerance = Some(if exact { 0.0 } else { tol });
    if let Some(i) = d.worst {
        let p = d.lhs.grid().point_rat(i);
        r.witness = Some(match &d.witness[i] {
            Some(w) => format!("{} via {}", fmt_point(&p), fmt_point(w)),
            None => format!("{} (no feasible dual point)", fmt_point(&p)),
        });
    }
    let weak = scaled_weak_violation(d, scale);
    r.detail("evaluation_points", d.lhs.grid().len());
    r.detail("weak_tolerance", fmt_f64(d.weak_tol * scale));
    r.detail("weak_duality", yes(weak.is_none()));
    if let Some(i) = weak {
        r.detail("weak_violation_at", fmt_point(&d.lhs.grid().point_rat(i)));
    }
    r.detail("strong_tolerance", fmt_f64(d.strong_tol * scale));
    // keyed by role, since f and g may be the same function
    let roles: &[&str] = if d.closed.len() == 1 { &["k"] } else { &["f", "g"] };
    for (role, (_, closed)) in roles.iter().zip(&d.closed) {
        r.detail(&format!("closed.{role}"), yes(*closed));
    }
    qualification_details(r, &d.qualification);
    r.detail("hypotheses", yes(d.hypotheses));
    let within = if exact {
        d.max_gap <= Finite(0.0)
    } else {
        d.max_gap <= Finite(tol)
    };
    r.verdict = if weak.is_some() {
        Verdict::Fail
    } else if !d.hypotheses {
        Verdict::Vacuous
    } else if within {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
}

fn duality(r: &mut CheckResult, d: Result<DualityReport, Error>, exact: bool, tol: Option<f64>, scale: f64) {
    match d {
        Ok(d) => judge_duality(r, &d, exact, tol, scale),
        Err(Error::Improper(msg)) => {
            r.verdict = Verdict::Vacuous;
            r.detail("improper", msg);
        }
        Err(e) => r.error(&e),
    }
}

fn ext_diff(a: ExtReal, b: ExtReal) -> ExtReal {
    match (a, b) {
        (Finite(x), Finite(y)) => Finite((x - y).abs()),
        (PosInf, PosInf) => Finite(0.0),
        _ => PosInf,
    }
}

fn cross_path(r: &mut CheckResult, m: &Model, setup: &str) -> Result<(), Error> {
    let s = &m.setups[setup];
    let lift = remark22_lift(s)?;
    r.tolerance = Some(0.0);
    let h3 = infconv_t3(s);
    let h21 = infconv_t21(&lift.k, lift.w_dim, &lift.c, &lift.d, &lift.x_grid, &lift.u_grid);
    let (h3, h21) = match (h3, h21) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::Improper(_)), Err(Error::Improper(_))) => {
            r.verdict = Verdict::Vacuous;
            r.detail("improper", "both paths");
            return Ok(());
        }
        (a, b) => {
            r.detail("primal_paths", format!("{:?} vs {:?}", a.err(), b.err()));
            r.verdict = Verdict::Fail;
            return Ok(());
        }
    };
    let mut gap = Finite(0.0);
    let mut worst = None;
    for i in 0..h3.grid().len() {
        let d = ext_diff(h3.value(i), h21.value(i));
        if d > gap {
            gap = d;
            worst = Some(format!("primal {}", fmt_point(&h3.grid().point_rat(i))));
        }
    }
    let primal_equal = h3.values() == h21.values();
    let c = t3_conjugates(s)?;
    let ks = lift_conjugate(s, &c)?;
    let dg = s.dual_grid();
    let mut dual_equal = true;
    for i in 0..dg.len() {
        let p = dg.point_rat(i);
        let (v3, _) = t3_dual_min_with(s, &c, &p)?;
        let (v21, _) = t21_dual_min(&ks, lift.w_dim, &lift.c, &lift.d, &p)?;
        if v3 != v21 {
            dual_equal = false;
        }
        let d = ext_diff(v3, v21);
        if d > gap {
            gap = d;
            worst = Some(format!("dual {}", fmt_point(&p)));
        }
    }
    r.gap = Some(gap);
    r.witness = worst;
    r.detail("primal_points", h3.grid().len());
    r.detail("dual_points", dg.len());
    r.detail("primal_equal", yes(primal_equal));
    r.detail("dual_equal", yes(dual_equal));
    r.verdict = if primal_equal && dual_equal { Verdict::Pass } else { Verdict::Fail };
    Ok(())
}

fn describe_instance(inst: &CcInstance) -> String {
    match inst {
        CcInstance::Star { y, c } => format!("star y={} C={} vertices", fmt_point(y), c.vertices().len()),
        CcInstance::Space { c, ystar } => format!("space y*={} C={} vertices", fmt_point(ystar), c.vertices().len()),
    }
}

fn harness(r: &mut CheckResult, h: &HarnessReport) {
    let count = |v: CcVerdict| h.entries.iter().filter(|e| e.verdict == v).count();
    let verified = count(CcVerdict::Verified);
    r.detail("instances", h.entries.len());
    r.detail("verified", verified);
    r.detail("vacuous", count(CcVerdict::Vacuous));
    r.detail("skipped", count(CcVerdict::Skipped));
    r.detail("counterexamples", h.counterexamples());
    for (i, e) in h.entries.iter().enumerate() {
        r.detail(
            &format!("instance.{}", i + 1),
            format!(
                "{}: {:?}, composed {} pairs, monotone {}",
                describe_instance(&e.instance),
                e.verdict,
                e.composed.len(),
                yes(e.composed_monotone)
            ),
        );
    }
    if let Some(e) = h.entries.iter().find(|e| e.verdict == CcVerdict::Counterexample) {
        r.witness = Some(describe_instance(&e.instance));
    } else if let Some((x, s)) = h.entries.iter().find_map(|e| e.cc.witness.as_ref()) {
        r.witness = Some(format!("{} -> {}", fmt_point(x), fmt_point(s)));
    }
    r.verdict = if h.counterexamples() > 0 {
        Verdict::Fail
    } else if verified == 0 {
        Verdict::Vacuous
    } else {
        Verdict::Pass
    };
}

fn run_kind(r: &mut CheckResult, m: &Model, kind: &CheckKind, o: &Options) -> Result<(), Error> {
    let scale = o.tol_scale;
    match kind {
        CheckKind::VerifyT3 { setup, exact, tolerance } => {
            duality(r, verify_t3(&m.setups[setup], None), *exact, *tolerance, scale);
        }
        CheckKind::VerifyT21 { source, exact, tolerance } => {
            let d = match source {
                RangeSource::Range(n) => verify_t21(&m.ranges[n], None),
                RangeSource::Lift(n) => {
                    let s = &m.setups[n];
                    remark22_lift(s).and_then(|l| {
                        let c = t3_conjugates(s)?;
                        verify_t21_with(&l, &lift_conjugate(s, &c)?, None)
                    })
                }
            };
            duality(r, d, *exact, *tolerance, scale);
        }
        CheckKind::CrossPath { setup } => cross_path(r, m, setup)?,
        CheckKind::Qualification { source, expect } => {
            let q = match source {
                QcSource::Setup(n) => check_qc_t3(&m.setups[n])?,
                QcSource::Range(n) => {
                    let s = &m.ranges[n];
                    check_qc_range(&s.k, s.w_dim, &s.c)?
                }
            };
            qualification_details(r, &q);
            let want = expect.unwrap_or(true);
            r.detail("expected_subspace", yes(want));
            r.verdict = if q.verify() && q.is_subspace == want { Verdict::Pass } else { Verdict::Fail };
        }
        CheckKind::Representativity { repr, strong, tolerance } => {
            let f = &m.reprs[repr];
            let tol = tolerance * scale;
            r.tolerance = Some(tol);
            let c = is_representative(f, tol);
            r.detail("closed", yes(c.closed));
            r.detail("representative", yes(c.ok));
            r.detail("worst_margin", fmt_f64(c.worst_margin));
            let mut ok = c.ok;
            let mut gap = c.worst_margin;
            let mut witness = c.worst.clone();
            if *strong {
                let s = is_strongly_representative(f, tol)?;
                r.detail("strongly_representative", yes(s.ok));
                r.detail("conjugate_worst_margin", fmt_f64(s.worst_margin));
                if let Some(p) = &s.worst {
                    r.detail("conjugate_worst_at", fmt_point(p));
                }
                if s.worst.is_some() && s.worst_margin < gap {
                    gap = s.worst_margin;
                    witness = s.worst.clone();
                }
                ok &= s.ok;
            }
            // reported as a shortfall below the pairing: positive means violation
            r.gap = Some(Finite(-gap));
            r.witness = witness.map(|p| fmt_point(&p));
            r.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        }
        CheckKind::Lemma14 { repr, tolerance } => {
            let l = lemma14_check(&m.reprs[repr], tolerance.map(|t| t * scale))?;
            r.detail("graph_pairs", l.graph.len());
            r.detail("transform_graph_pairs", l.at_graph.len());
            r.detail("equal", yes(l.equal));
            if let Some((x, s)) = l.graph.pairs().symmetric_difference(l.at_graph.pairs()).next() {
                r.witness = Some(format!("{} -> {}", fmt_point(x), fmt_point(s)));
            }
            r.verdict = if l.equal { Verdict::Pass } else { Verdict::Fail };
        }
        CheckKind::Theorem11 { operator, grid, window, instances } => {
            harness(r, &theorem11_harness(&m.operators[operator], instances, grid, window)?);
        }
        CheckKind::Theorem15 { f, g, map, variant, tolerance } => {
            let t = theorem15_verify(&m.reprs[f], &m.reprs[g], &m.maps[map], *variant, tolerance.map(|t| t * scale))?;
            r.detail("variant", format!("{variant:?}").to_lowercase());
            qualification_details(r, &t.qualification);
            r.detail("applicable", yes(t.applicable));
            if let Some(c) = &t.hbar_strong {
                r.detail("closure_strongly_representative", yes(c.ok));
            }
            r.detail("graph_pairs", t.graph.len());
            r.detail("expected_pairs", t.expected.len());
            r.detail("equal", yes(t.equal));
            if let Some((x, s)) = t.graph.pairs().symmetric_difference(t.expected.pairs()).next() {
                r.witness = Some(format!("{} -> {}", fmt_point(x), fmt_point(s)));
            }
            r.verdict = if !t.applicable {
                Verdict::Vacuous
            } else if t.success() {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
        }
        CheckKind::Theorem17 { repr, instances } => harness(r, &theorem17_harness(&m.reprs[repr], instances)?),
        CheckKind::Br { repr, alpha, beta, points, tolerance } => {
            let f = &m.reprs[repr];
            let n = f.dim();
            let pts = match points {
                Some(p) => p.clone(),
                None => (0..f.grid().len())
                    .map(|i| {
                        let p = f.grid().point_rat(i);
                        (p[..n].to_vec(), p[n..].to_vec())
                    })
                    .collect(),
            };
            let (mut witnesses, mut vacuous, mut near, mut failures) = (0, 0, 0, 0);
            let mut worst: Option<(f64, String)> = None;
            for (x, xs) in &pts {
                let b = br_check(f, *alpha, *beta, x, xs, tolerance.map(|t| t * scale))?;
                match b.outcome {
                    BrOutcome::Vacuous => vacuous += 1,
                    BrOutcome::Witness => witnesses += 1,
                    BrOutcome::NearMiss => near += 1,
                    BrOutcome::Failure => failures += 1,
                }
                if b.outcome == BrOutcome::Vacuous {
                    continue;
                }
                let score = b.distances.map_or(f64::INFINITY, |(a, c)| (a / alpha).max(c / beta));
                if worst.as_ref().is_none_or(|(s, _)| score > *s) {
                    let w = b
                        .witness
                        .as_ref()
                        .map_or("none".to_string(), |(y, ys)| format!("{} -> {}", fmt_point(y), fmt_point(ys)));
                    worst = Some((score, format!("({}, {}) nearest {w}", fmt_point(x), fmt_point(xs))));
                }
            }
            r.tolerance = Some(1.0);
            r.detail("alpha", fmt_f64(*alpha));
            r.detail("beta", fmt_f64(*beta));
            r.detail("grid_step", fmt_f64(f.grid().max_step()));
            r.detail("points", pts.len());
            r.detail("witnesses", witnesses);
            r.detail("vacuous", vacuous);
            r.detail("near_misses", near);
            r.detail("failures", failures);
            if let Some((score, w)) = worst {
                // largest normalized witness distance; below 1 means inside both balls
                r.gap = Some(Finite(score));
                r.witness = Some(w);
            }
            r.verdict = if failures + near > 0 {
                Verdict::Fail
            } else if witnesses == 0 {
                Verdict::Vacuous
            } else {
                Verdict::Pass
            };
        }
        CheckKind::Lemma2 { generators, map, bx } => {
            let l = lemma2_sets(generators, &m.maps[map], bx)?;
            r.tolerance = Some(0.0);
            r.detail("lhs_points", l.lhs.len());
            r.detail("rhs_points", l.rhs.len());
            r.detail("equal", yes(l.equal));
            if let Some(p) = l.lhs.symmetric_difference(&l.rhs).next() {
                r.witness = Some(fmt_point(p));
            }
            r.verdict = if l.equal { Verdict::Pass } else { Verdict::Fail };
        }
        CheckKind::Suite { suite, cases } => {
            let s = run_suite(*suite, *cases, o.seed);
            r.detail("suite", suite.name());
            r.detail("seed", o.seed);
            r.detail("cases", s.cases);
            r.detail("vacuous", s.vacuous);
            r.detail("failures", s.failures);
            r.witness = s.first_failure.clone();
            r.verdict = if s.failures > 0 {
                Verdict::Fail
            } else if s.vacuous == s.cases {
                Verdict::Vacuous
            } else {
                Verdict::Pass
            };
        }
    }
    Ok(())
}

fn selected(c: &Check, o: &Options) -> bool {
    o.checks
        .as_ref()
        .is_none_or(|f| f.iter().any(|n| *n == c.name || *n == c.kind_name))
}

/// Runs the selected checks in declaration order.
pub fn run_checks(m: &Model, o: &Options) -> Vec<CheckResult> {
    m.checks
        .iter()
        .filter(|c| selected(c, o))
        .map(|c| {
            let start = Instant::now();
            let mut r = CheckResult::new(c);
            if let Err(e) = run_kind(&mut r, m, &c.kind, o) {
                r.error(&e);
            }
            if o.timing {
                r.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            }
            r
        })
        .collect()
}

/// 0 iff every non-vacuous check passed.
pub fn exit_code(results: &[CheckResult]) -> i32 {
    if results.iter().any(|r| r.verdict == Verdict::Fail) {
        1
    } else {
        0
    }
}
