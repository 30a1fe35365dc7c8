//! Acceptance suite: one line per criterion, non-zero exit if any verifying
//! criterion fails. Criterion 5 lies outside the proven regime and is
//! reported without affecting the exit status.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;

use nonherm_clt::ensembles::{sample_matrix, EntryLaw, LawKind};
use nonherm_clt::harness::{
    estimate_moments, normality_diagnostics, run_dimension, run_experiment, DimensionRun, ExperimentConfig,
};
use nonherm_clt::linalg::{eigenvalues, matching_distance, trace_power, ComplexMatrix};
use nonherm_clt::oracles::{gaf_covariance_truncated, gaf_sample, resolvent_covariance, GafConfig};
use nonherm_clt::report::{run_oracle_check, OracleCheckOptions};
use nonherm_clt::rng::{open_unit, Domain, StreamKey};

const SEED: u64 = 20_240_601;
/// Index of `5 + 0i` and `1.5 + 0i` in the default resolvent grid.
const GRID_FIVE: usize = 0;
const GRID_ONE_HALF: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn report(&mut self, id: u32, name: &str, exploratory: bool, started: Instant, o: Outcome) {
        let status = match (o.pass, exploratory) {
            (true, _) => "PASS",
            (false, true) => "MISS (exploratory)",
            (false, false) => "FAIL",
        };
        if !o.pass && !exploratory {
            self.failures += 1;
        }
        println!(
            "criterion {id:>2} {status}: {name}: {} [{:.1}s]",
            o.detail,
            started.elapsed().as_secs_f64()
        );
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn cauchy_identity() -> Outcome {
    let cfg = ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![128], 100, SEED + 1);
    let run = &run_experiment(&cfg, None).expect("run")[0];
    let gaps: Vec<f64> = run.ok_records().filter_map(|r| r.cauchy_gap).collect();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    outcome(
        !gaps.is_empty() && worst <= 1e-8,
        format!("{} of 100 samples inside the contour, worst relative gap {worst:.2e}", gaps.len()),
    )
}

fn coordinates(run: &DimensionRun) -> Vec<Vec<Complex64>> {
    run.ok_records().map(|r| r.coordinates()).collect()
}

fn eigensolver_suite() -> Outcome {
    let law = EntryLaw::new(LawKind::ComplexGaussian);
    let mut worst_trace = 0.0_f64;
    for r in 0..1000 {
        let mut rng = StreamKey::new(SEED + 11, r).stream(Domain::SelfCheck, 64);
        let m = sample_matrix(&law, 64, &mut rng).expect("sample");
        let spec = eigenvalues(&m).expect("eigensolve");
        let fro = m.frobenius_norm();
        let t1 = (spec.sum() - m.trace()).norm() / fro.max(1.0);
        let t2 = (spec.power_sum(2) - trace_power(&m, 2).expect("power")).norm() / (fro * fro).max(1.0);
        worst_trace = worst_trace.max(t1).max(t2);
    }

    let mut worst_root = 0.0_f64;
    let mut rng = StreamKey::new(SEED + 12, 0).stream(Domain::SelfCheck, 8);
    for _ in 0..20 {
        let roots = separated_roots(&mut rng, 8, 0.3);
        let coeffs = expand(&roots);
        let companion = ComplexMatrix::companion(&coeffs[..8]).expect("companion");
        let found = eigenvalues(&companion).expect("eigensolve");
        let oracle: Vec<Complex64> = roots.iter().map(|&r| newton_polish(&coeffs, r)).collect();
        worst_root = worst_root.max(matching_distance(found.eigenvalues(), &oracle));
    }
    outcome(
        worst_trace <= 1e-9 && worst_root <= 1e-8,
        format!("worst trace residual {worst_trace:.2e} (1000 of 64x64), worst companion root error {worst_root:.2e} (20 of degree 8)"),
    )
}

/// Roots in the disk of radius 2 with pairwise distance at least `gap`.
fn separated_roots(rng: &mut rand_chacha::ChaCha20Rng, d: usize, gap: f64) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = Vec::with_capacity(d);
    while roots.len() < d {
        let z = Complex64::from_polar(2.0 * open_unit(rng).sqrt(), std::f64::consts::TAU * open_unit(rng));
        if roots.iter().all(|r| (r - z).norm() >= gap) {
            roots.push(z);
        }
    }
    roots
}

/// Coefficients `c_0..c_d` (ascending, monic) of `Π (z − r)`.
fn expand(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c
}

/// Newton iteration on the expanded polynomial, started at a generating root.
fn newton_polish(coeffs: &[Complex64], start: Complex64) -> Complex64 {
    let mut z = start;
    for _ in 0..50 {
        let (mut p, mut dp) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for &a in coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

fn gaf_consistency() -> Outcome {
    let radii = [1.5, 2.0, 3.0, 5.0, 10.0];
    let mut worst_ratio = 0.0_f64;
    let mut all_within = true;
    for &a in &radii {
        for &b in &radii {
            let z = Complex64::from_polar(a, 0.3);
            let w = Complex64::from_polar(b, -0.7);
            let t = gaf_covariance_truncated(512, z, w).expect("series");
            let gap = (t.partial - resolvent_covariance(z, w).expect("kernel")).norm();
            all_within &= gap <= t.tail_bound;
            if t.tail_bound > 0.0 {
                worst_ratio = worst_ratio.max(gap / t.tail_bound);
            }
        }
    }
    let cfg = GafConfig::default();
    let five = [Complex64::new(5.0, 0.0)];
    let mut rng = StreamKey::new(SEED + 6, 0).stream(Domain::GaussianAnalytic, 512);
    let draws = 10_000;
    let mut acc = 0.0;
    for _ in 0..draws {
        acc += gaf_sample(&cfg, &five, &mut rng).expect("sample")[0].norm_sqr();
    }
    let mc = acc / draws as f64;
    let rel = (mc * 576.0 - 1.0).abs();
    outcome(
        all_within && rel <= 0.10,
        format!("25 grid pairs within tail bound: {all_within} (max gap/bound {worst_ratio:.2}); Monte Carlo E|G(5)|^2 = {mc:.6e} vs 1/576, relative error {rel:.3}"),
    )
}

fn kernel_identities() -> Outcome {
    let rows = run_oracle_check(&OracleCheckOptions::default());
    let worst = |id: &str| {
        rows.iter()
            .filter(|r| r.identity == id)
            .map(|r| r.gap)
            .fold(0.0, f64::max)
    };
    let (b, c) = (worst("bergman"), worst("contour"));
    outcome(
        b <= 1e-4 && c <= 1e-6,
        format!("worst Bergman gap {b:.2e} (tol 1e-4), worst contour gap {c:.2e} (tol 1e-6)"),
    )
}

fn circular_law_and_norms() -> Outcome {
    let cfg = ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![1024], 50, SEED + 8);
    let run = run_dimension(&cfg, 1024, None).expect("run");
    let ok: Vec<_> = run.ok_records().collect();
    let r = ok.len() as f64;
    let ks = run.records[0].esd_ks;
    let norm = ok.iter().map(|x| x.diagnostics.spectral_norm).sum::<f64>() / r;
    let radius = ok.iter().map(|x| x.diagnostics.spectral_radius).sum::<f64>() / r;
    let outside = ok.iter().filter(|x| !x.diagnostics.in_omega).count() as f64 / r;
    outcome(
        ks <= 0.05 && within(norm, 1.85, 2.25) && within(radius, 0.92, 1.12) && outside < 0.02,
        format!("esd_ks {ks:.4}, mean norm {norm:.4}, mean radius {radius:.4}, outside Omega {outside:.3} ({} replicates)", ok.len()),
    )
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().expect("tempdir");
    let mut cfg = ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![8, 16, 32], 40, SEED + 12);
    cfg.outputs = tmp.path().join("unused");
    let cfg_path = tmp.path().join("cfg.toml");
    std::fs::write(&cfg_path, cfg.to_toml_string()).expect("write config");
    let bin = env!("CARGO_BIN_EXE_nonherm-clt");
    let mut snapshots = Vec::new();
    for threads in ["1", "8"] {
        let out = tmp.path().join(format!("threads{threads}"));
        for cmd in ["sample", "analyze", "figures"] {
            let status = Command::new(bin)
                .args(["--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap()])
                .args(["--threads", threads, "--quiet", cmd])
                .status()
                .expect("binary runs");
            if !status.success() {
                return outcome(false, format!("{cmd} at --threads {threads} exited with {status}"));
            }
        }
        snapshots.push(snapshot(&out));
    }
    let same = snapshots[0] == snapshots[1];
    outcome(
        same && !snapshots[0].is_empty(),
        format!("{} files compared byte for byte, identical: {same}", snapshots[0].len()),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .expect("output dir")
        .map(|e| {
            let e = e.expect("entry");
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).expect("read"))
        })
        .collect();
    v.sort();
    v
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };

    let t = Instant::now();
    suite.report(1, "exact Cauchy identity", false, t, cauchy_identity());

    let t = Instant::now();
    let cfg = ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![256], 2000, SEED + 2);
    let run = run_dimension(&cfg, 256, None).expect("shared n = 256 run");
    let est = estimate_moments(&coordinates(&run));
    let shared_time = t.elapsed().as_secs_f64();
    println!(
        "shared run: n = 256, {} of 2000 replicates ok, {shared_time:.1}s",
        run.ok_records().count()
    );

    let t = Instant::now();
    let (v1, v2, c12) = (est.cov(0, 0).re, est.cov(1, 1).re, est.cov(0, 1));
    suite.report(
        2,
        "monomial variance",
        false,
        t,
        outcome(
            within(v1, 0.9, 1.1) && within(v2, 1.7, 2.3) && c12.norm() <= 0.15,
            format!("Var X(z) = {v1:.4}, Var X(z^2) = {v2:.4}, |Cov(z, z^2)| = {:.4}", c12.norm()),
        ),
    );

    let t = Instant::now();
    let (p11, p12) = (est.pseudo(0, 0).norm(), est.pseudo(0, 1).norm());
    suite.report(
        3,
        "pseudo-covariance vanishing",
        false,
        t,
        outcome(
            p11 <= 0.15 && p12 <= 0.15,
            format!("|E X(z)^2| = {p11:.4}, |E X(z)X(z^2)| = {p12:.4}"),
        ),
    );

    let t = Instant::now();
    let nf = cfg.functions.len();
    let g5 = nf + GRID_FIVE;
    let c55 = est.cov(g5, g5).re;
    let rel = (c55 * 576.0 - 1.0).abs();
    let (m5, se5) = (est.mean[g5].norm(), est.mean_se[g5]);
    suite.report(
        4,
        "resolvent covariance at z = w = 5",
        false,
        t,
        outcome(
            rel <= 0.20 && m5 <= 4.0 * se5 + 0.01,
            format!("Cov = {c55:.6e} (1/576 = {:.6e}, relative error {rel:.3}); |mean| = {m5:.2e} <= 4*{se5:.2e} + 0.01", 1.0 / 576.0),
        ),
    );

    let t = Instant::now();
    let g15 = nf + GRID_ONE_HALF;
    let c15 = est.cov(g15, g15).re;
    let rel15 = (c15 / 0.64 - 1.0).abs();
    suite.report(
        5,
        "beyond-theorem resolvent covariance at z = w = 1.5",
        true,
        t,
        outcome(rel15 <= 0.25, format!("Cov = {c15:.4} vs 0.64, relative error {rel15:.3}")),
    );

    let t = Instant::now();
    suite.report(6, "GAF consistency", false, t, gaf_consistency());

    let t = Instant::now();
    suite.report(7, "kernel identities", false, t, kernel_identities());

    let t = Instant::now();
    suite.report(8, "circular law and norms at n = 1024", false, t, circular_law_and_norms());

    let t = Instant::now();
    let tr0 = nf + cfg.z_grid.len();
    let mut ok9 = true;
    let mut parts = Vec::new();
    for s in 0..3 {
        let (m, se) = (est.mean[tr0 + s].norm(), est.mean_se[tr0 + s]);
        ok9 &= m <= 4.0 * se;
        parts.push(format!("s={}: |mean| {m:.3e} / SE {se:.3e}", s + 1));
    }
    suite.report(9, "trace moments", false, t, outcome(ok9, parts.join(", ")));

    let t = Instant::now();
    let ok_records: Vec<_> = run.ok_records().collect();
    let re: Vec<f64> = ok_records.iter().map(|r| r.statistics[0].re).collect();
    let im: Vec<f64> = ok_records.iter().map(|r| r.statistics[0].im).collect();
    let (nre, nim) = (
        normality_diagnostics(&re).expect("enough samples"),
        normality_diagnostics(&im).expect("enough samples"),
    );
    let shape_ok = |n: &nonherm_clt::harness::NormalityReport| !(n.skewness_flag() || n.kurtosis_flag());
    let (c, p) = (est.cov(0, 0).re, est.pseudo(0, 0).re);
    let ratio = (c + p) / (c - p);
    suite.report(
        10,
        "normality of X(z)",
        false,
        t,
        outcome(
            shape_ok(&nre) && shape_ok(&nim) && within(ratio, 0.8, 1.25),
            format!(
                "Re: skew {:.3} kurt {:.3}; Im: skew {:.3} kurt {:.3} (4 SE = {:.3} / {:.3}); Var Re/Var Im = {ratio:.3}",
                nre.skewness,
                nre.excess_kurtosis,
                nim.skewness,
                nim.excess_kurtosis,
                4.0 * nre.skewness_se,
                4.0 * nre.kurtosis_se
            ),
        ),
    );

    let t = Instant::now();
    suite.report(11, "eigensolver suite", false, t, eigensolver_suite());

    let t = Instant::now();
    suite.report(12, "determinism across thread counts", false, t, determinism());

    if suite.failures == 0 {
        println!("acceptance: all verifying criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} verifying criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
