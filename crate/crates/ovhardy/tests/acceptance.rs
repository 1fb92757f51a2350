//! Acceptance gate: one test per advertised end-to-end guarantee of the
//! crate, every check running on the default configuration (d = 1,
//! N = 1024 samples, 2×2 matrix values) and printing a single verdict
//! line.  Run with `--nocapture` to see all verdicts; a failing test
//! always shows its line.
//!
//! Expensive suite runs are shared between tests through `OnceLock`, so
//! the whole gate costs roughly one full verification sweep.

use std::sync::OnceLock;
use std::time::Instant;

use ovhardy::config::RunConfig;
use ovhardy::report::Row;
use ovhardy::suites::{
    atom_suite, carleson_suite, domination_suite, duality_bound_suite, dyadic_suite,
    equivalence_suite, identity_suite,
};

fn verdict(name: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(pass, "{name}: {detail}");
}

fn one<'a>(rows: &'a [Row], check: &str) -> &'a Row {
    rows.iter()
        .find(|r| r.check == check)
        .unwrap_or_else(|| panic!("missing row {check}"))
}

fn every<'a>(rows: &'a [Row], check: &str) -> Vec<&'a Row> {
    let got: Vec<&Row> = rows.iter().filter(|r| r.check == check).collect();
    assert!(!got.is_empty(), "missing rows {check}");
    got
}

/// Identity sweep shared by the first five tests; the elapsed time covers
/// strictly more work than any single budgeted check.
fn identity_run() -> &'static (Vec<Row>, f64) {
    static CELL: OnceLock<(Vec<Row>, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig::default().resolve().expect("default config");
        let start = Instant::now();
        let rows = identity_suite(&cfg).expect("identity suite");
        (rows, start.elapsed().as_secs_f64())
    })
}

/// Norm-equivalence sweep shared by the characterization and the
/// oscillation-norm tests.
fn equivalence_run() -> &'static (Vec<Row>, f64) {
    static CELL: OnceLock<(Vec<Row>, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig::default().resolve().expect("default config");
        let start = Instant::now();
        let rep = equivalence_suite(&cfg).expect("equivalence suite");
        assert_eq!(rep.skipped, 0, "degenerate norms were skipped");
        (rep.rows, start.elapsed().as_secs_f64())
    })
}

fn dyadic_run() -> &'static Vec<Row> {
    static CELL: OnceLock<Vec<Row>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig::default().resolve().expect("default config");
        dyadic_suite(&cfg).expect("dyadic suite")
    })
}

fn carleson_run() -> &'static Vec<Row> {
    static CELL: OnceLock<Vec<Row>> = OnceLock::new();
    CELL.get_or_init(|| {
        let cfg = RunConfig::default().resolve().expect("default config");
        carleson_suite(&cfg).expect("carleson suite")
    })
}

#[test]
fn criterion_01_plancherel() {
    let (rows, secs) = identity_run();
    let r = one(rows, "plancherel");
    let pass = r.observed < 1e-10 && *secs < 5.0;
    verdict(
        "criterion-01-plancherel",
        pass,
        &format!(
            "max relative Plancherel error {:.3e} over 20 band-limited fields \
             (need < 1e-10), sweep took {secs:.2} s (budget 5 s)",
            r.observed
        ),
    );
}

#[test]
fn criterion_02_l2_identity() {
    let (rows, secs) = identity_run();
    let id = one(rows, "l2-identity");
    let range = one(rows, "l2-weight-range");
    let pass = id.observed < 0.02 && range.observed <= 1e-12 && *secs < 60.0;
    verdict(
        "criterion-02-l2-identity",
        pass,
        &format!(
            "square-function identity off by {:.3e} relative (need < 2%), \
             spectral weight escapes [1-1/e, 1] by {:.1e} (need 0), \
             sweep took {secs:.2} s (budget 60 s)",
            id.observed, range.observed
        ),
    );
}

#[test]
fn criterion_03_polarization() {
    let (rows, _) = identity_run();
    let res = one(rows, "polarization");
    let spec = one(rows, "polarization-spectral");
    let pass = res.observed < 0.01 && spec.observed < 1e-8;
    verdict(
        "criterion-03-polarization",
        pass,
        &format!(
            "worst relative polarization residual {:.3e} over 10 field pairs \
             (need < 1%), spectral-oracle mismatch {:.3e} (need < 1e-8)",
            res.observed, spec.observed
        ),
    );
}

#[test]
fn criterion_04_embedding_retraction() {
    let (rows, _) = identity_run();
    let id = one(rows, "fe-identity");
    let refine = one(rows, "fe-refinement");
    let pass = id.observed < 1e-3 && refine.observed <= 1.0;
    verdict(
        "criterion-04-embedding-retraction",
        pass,
        &format!(
            "max relative L2 error of retract(embed(f)) = f is {:.3e} \
             (need < 1e-3); doubling the scale count scales the error by \
             {:.3} (need <= 1, i.e. non-increasing)",
            id.observed, refine.observed
        ),
    );
}

#[test]
fn criterion_05_resolution_of_unity() {
    let (rows, _) = identity_run();
    let defects = every(rows, "resolution-defect");
    assert_eq!(defects.len(), 4, "expected two quadruples in two calculi");
    let worst = defects.iter().map(|r| r.observed).fold(0.0f64, f64::max);
    let pass = worst < 1e-6;
    let listing: Vec<String> = defects
        .iter()
        .map(|r| format!("{} {:.2e}", r.variant, r.observed))
        .collect();
    verdict(
        "criterion-05-resolution-of-unity",
        pass,
        &format!(
            "sup defect over the frequency band per quadruple/calculus: {} \
             (need each < 1e-6)",
            listing.join(", ")
        ),
    );
}

#[test]
fn criterion_06_dyadic_covering() {
    let rows = dyadic_run();
    let failures = every(rows, "cover-failures");
    let suboptimal = every(rows, "cover-suboptimal");
    let ratios = every(rows, "cover-ratio-max");
    let secs = one(rows, "cover-seconds");
    assert_eq!(failures.len(), 2, "expected one covering run per dimension");
    let found = failures.iter().all(|r| r.observed == 0.0);
    let optimal = suboptimal.iter().all(|r| r.observed == 0.0);
    let pass = found && optimal && secs.observed < 10.0 && ratios.iter().all(|r| r.pass);
    let ratio_listing: Vec<String> = ratios
        .iter()
        .map(|r| format!("{} {:.1}", r.variant, r.observed))
        .collect();
    verdict(
        "criterion-06-dyadic-covering",
        pass,
        &format!(
            "10^4 random cubes per dimension d in {{1,2}}: every cube \
             covered ({}), chosen cover side always equals the exhaustive \
             oracle minimum ({}), max volume ratio {}, search took {:.3} s \
             (budget 10 s)",
            if found { "yes" } else { "no" },
            if optimal { "yes" } else { "no" },
            ratio_listing.join(", "),
            secs.observed
        ),
    );
}

#[test]
fn criterion_07_atom_boundedness() {
    let cfg = RunConfig::default().resolve().expect("default config");
    let rows = atom_suite(&cfg).expect("atom suite");
    let invalid = one(&rows, "invalid-count");
    let kinds = one(&rows, "unit-kind-present");
    let worst = one(&rows, "h1-norm-max");
    let drift = one(&rows, "grid-stability");
    let pass = invalid.observed == 0.0
        && kinds.observed == 0.0
        && worst.pass
        && worst.observed.is_finite()
        && drift.observed <= 0.2;
    verdict(
        "criterion-07-atom-boundedness",
        pass,
        &format!(
            "100 random atoms of both kinds all validate; max Hardy norm \
             {:.3} (finite, cap {:.0}); grid doubling moves it by {:.1}% \
             (need <= 20%)",
            worst.observed,
            worst.bound,
            100.0 * drift.observed
        ),
    );
}

#[test]
fn criterion_08_carleson_vs_oscillation() {
    let rows = carleson_run();
    let upper = one(rows, "vs-bmo-upper");
    let lower = one(rows, "vs-bmo-lower");
    let drifts = every(rows, "refinement-drift");
    let stable = drifts.iter().all(|r| r.observed <= 0.2);
    let pass = upper.pass
        && lower.pass
        && upper.observed.is_finite()
        && lower.observed.is_finite()
        && stable;
    let drift_listing: Vec<String> = drifts
        .iter()
        .map(|r| format!("{} {:.1}%", r.variant, 100.0 * r.observed))
        .collect();
    verdict(
        "criterion-08-carleson-vs-oscillation",
        pass,
        &format!(
            "two-sided bracketing over a 20-field family: carleson/bmo <= \
             {:.3}, bmo/carleson <= {:.3} (both finite, cap {:.0}); \
             refinement moves them by {} (need <= 20%)",
            upper.observed,
            lower.observed,
            upper.bound,
            drift_listing.join(", ")
        ),
    );
}

#[test]
fn criterion_09_pointwise_domination() {
    let cfg = RunConfig::default().resolve().expect("default config");
    let rows = domination_suite(&cfg).expect("domination suite");
    let radial = one(&rows, "radial-window-vs-cone");
    let band = one(&rows, "band-radial-vs-cone-sum");
    let pass = radial.pass && band.pass;
    verdict(
        "criterion-09-pointwise-domination",
        pass,
        &format!(
            "single constant per run over every sampled point: averaged \
             window vs half-aperture cone C = {:.3} (cap {:.0}); radial \
             square vs derivative-cone sum C = {:.3} (cap {:.0})",
            radial.observed, radial.bound, band.observed, band.bound
        ),
    );
}

#[test]
fn criterion_10_characterization_equivalence() {
    let (rows, secs) = equivalence_run();
    let uppers = every(rows, "ratio-upper");
    let lowers = every(rows, "ratio-lower-inverse");
    assert_eq!(uppers.len(), 15, "five variants for each p in {{1, 2, 4}}");
    assert_eq!(lowers.len(), 15);
    let c0 = uppers
        .iter()
        .chain(lowers.iter())
        .map(|r| r.observed)
        .fold(0.0f64, f64::max);
    let capped = uppers.iter().chain(lowers.iter()).all(|r| r.pass);
    let drift = one(rows, "refinement-drift");
    let fubini = one(rows, "conic-radial-l2");
    let pass = capped && drift.observed <= 0.2 && fubini.pass && *secs < 600.0;
    verdict(
        "criterion-10-characterization-equivalence",
        pass,
        &format!(
            "for p in {{1, 2, 4}} each of the five scale-family \
             characterizations stays within [1/{c:.2}, {c:.2}] of the \
             reference norm, so any two lie within [1/C, C] for the fixed \
             C = {c2:.2} (cap {cap:.0}); refinement moves the global \
             constant by {d:.2}% (need <= 20%); sweep took {secs:.1} s \
             (budget 600 s)",
            c = c0,
            c2 = c0 * c0,
            cap = uppers[0].bound * uppers[0].bound,
            d = 100.0 * drift.observed,
        ),
    );
}

#[test]
fn criterion_11_duality_bound() {
    let cfg = RunConfig::default().resolve().expect("default config");
    let rep = duality_bound_suite(&cfg).expect("duality suite");
    assert_eq!(rep.skipped, 0, "degenerate pairs were skipped");
    let c = one(&rep.rows, "c-emp");
    let drift = one(&rep.rows, "refinement-drift");
    let pass = c.pass && c.observed.is_finite() && drift.observed <= 0.2;
    verdict(
        "criterion-11-duality-bound",
        pass,
        &format!(
            "empirical pairing constant over {} (p = {}): C = {:.3} \
             (finite, cap {:.0}); scale refinement moves it by {:.2}% \
             (need <= 20%)",
            c.variant,
            c.p,
            c.observed,
            c.bound,
            100.0 * drift.observed
        ),
    );
}

#[test]
fn criterion_12_oscillation_norm_facts() {
    let (rows, _) = equivalence_run();
    let global = one(rows, "bmo-global-vs-local");
    let ambient = one(rows, "linf-rd-vs-bmo");
    let large = one(rows, "large-vs-unit-cubes");
    let pass = global.observed <= 1.0 + 1e-12
        && ambient.pass
        && ambient.observed.is_finite()
        && large.observed <= 1.0 + 1e-9;
    verdict(
        "criterion-12-oscillation-norm-facts",
        pass,
        &format!(
            "global BMO <= local bmo with constant 1 (observed ratio \
             {:.3}); weighted ambient norm <= C bmo with C = {:.3} (cap \
             {:.0}); cubes of side >= 1 stay within the dimensional factor \
             2^(d/2) of the unit-side sup (observed fraction {:.3} of that \
             allowance)",
            global.observed, ambient.observed, ambient.bound, large.observed
        ),
    );
}
