use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::manifest::{write_manifest, ReportBundle};
use super::records::{read_records, write_records, write_spectra, RECORDS_FILE, SPECTRA_FILE};
use super::{ensure_dir, num, write_file, Provenance, ReportError};
use crate::harness::{analyze_runs, convergence_sweep, DimensionAnalysis, DimensionRun, ExperimentConfig, SweepTable};

pub const CONFIG_FILE: &str = "config.toml";
pub const DEVIATIONS_FILE: &str = "deviations.tsv";
pub const NORMALITY_FILE: &str = "normality.tsv";
pub const SWEEP_FILE: &str = "sweep.tsv";
pub const SUMMARY_FILE: &str = "summary.md";

/// Writes the config echo, the records and the showcase spectra. Returns the
/// paths written, in order.
pub fn write_sample_outputs(
    cfg: &ExperimentConfig,
    dir: &Path,
    runs: &[DimensionRun],
) -> Result<Vec<PathBuf>, ReportError> {
    ensure_dir(dir)?;
    let config_path = dir.join(CONFIG_FILE);
    let echo = format!("# {}\n{}", Provenance::of(cfg).line("config"), cfg.echo().to_toml_string());
    write_file(&config_path, &echo)?;
    let records_path = dir.join(RECORDS_FILE);
    write_records(&records_path, cfg, runs)?;
    let spectra_path = dir.join(SPECTRA_FILE);
    write_spectra(&spectra_path, cfg, runs)?;
    Ok(vec![config_path, records_path, spectra_path])
}

/// Loads the configuration stored next to a record file.
pub(crate) fn config_beside(records: &Path) -> Result<ExperimentConfig, ReportError> {
    let dir = records.parent().unwrap_or_else(|| Path::new("."));
    Ok(ExperimentConfig::load(&dir.join(CONFIG_FILE))?)
}

/// Re-estimates everything from persisted records and writes the tables,
/// the summary and the manifest into `out_dir`. Never resamples.
pub fn analyze_directory(records: &Path, out_dir: &Path) -> Result<ReportBundle, ReportError> {
    let cfg = config_beside(records)?;
    let runs = read_records(records, &cfg)?;
    let analyses = analyze_runs(&cfg, &runs)?;
    let sweep = convergence_sweep(&analyses);
    let prov = Provenance::of(&cfg);
    ensure_dir(out_dir)?;

    write_file(&out_dir.join(DEVIATIONS_FILE), &deviations_table(&prov, &analyses))?;
    write_file(&out_dir.join(NORMALITY_FILE), &normality_table(&prov, &analyses))?;
    write_file(&out_dir.join(SWEEP_FILE), &sweep_table(&prov, &sweep))?;
    write_file(&out_dir.join(SUMMARY_FILE), &summary(&prov, &cfg, &analyses, &sweep))?;

    let source_dir = records.parent().unwrap_or_else(|| Path::new("."));
    let mut files: Vec<PathBuf> = vec![source_dir.join(CONFIG_FILE), records.to_owned()];
    let spectra = source_dir.join(SPECTRA_FILE);
    if spectra.exists() {
        files.push(spectra);
    }
    for name in [DEVIATIONS_FILE, NORMALITY_FILE, SWEEP_FILE, SUMMARY_FILE] {
        files.push(out_dir.join(name));
    }
    let manifest = write_manifest(out_dir, &prov, &files)?;
    Ok(ReportBundle {
        experiment_id: prov.config_hash[..16].to_string(),
        config: cfg,
        analyses,
        sweep,
        manifest,
    })
}

fn deviations_table(prov: &Provenance, analyses: &[DimensionAnalysis]) -> String {
    let mut out = format!("# {}\n", prov.line("deviations"));
    out.push_str(
        "n\tquantity\tkind\tregime\tempirical_re\tempirical_im\ttheory_re\ttheory_im\tdeviation\tstandard_error\tallowance\tz_score\tflagged\n",
    );
    for a in analyses {
        for d in &a.deviations {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                a.n,
                d.quantity,
                d.kind.name(),
                d.regime.name(),
                num(d.empirical.re),
                num(d.empirical.im),
                num(d.theory.re),
                num(d.theory.im),
                num(d.deviation),
                num(d.standard_error),
                num(d.allowance),
                num(d.z_score),
                u8::from(d.flagged())
            );
        }
    }
    out
}

fn normality_table(prov: &Provenance, analyses: &[DimensionAnalysis]) -> String {
    let mut out = format!("# {}\n", prov.line("normality"));
    out.push_str(
        "n\tquantity\tsamples\tskewness\tskewness_se\texcess_kurtosis\tkurtosis_se\tks_distance\tks_threshold\tpasses\n",
    );
    for a in analyses {
        for c in &a.normality {
            let r = &c.report;
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                a.n,
                c.quantity,
                r.samples,
                num(r.skewness),
                num(r.skewness_se),
                num(r.excess_kurtosis),
                num(r.kurtosis_se),
                num(r.ks_distance),
                num(r.ks_threshold),
                u8::from(r.passes())
            );
        }
    }
    out
}

fn sweep_table(prov: &Provenance, sweep: &SweepTable) -> String {
    let mut out = format!("# {}\n", prov.line("sweep"));
    out.push_str(
        "n\treplicates\tmean_esd_ks\tmean_spectral_norm\tmean_spectral_radius\tfraction_outside_omega\tmax_covariance_deviation\tmax_covariance_z\n",
    );
    for r in &sweep.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.n,
            r.replicates,
            num(r.mean_esd_ks),
            num(r.mean_spectral_norm),
            num(r.mean_spectral_radius),
            num(r.fraction_outside_omega),
            num(r.max_covariance_deviation),
            num(r.max_covariance_z)
        );
    }
    out
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn summary(prov: &Provenance, cfg: &ExperimentConfig, analyses: &[DimensionAnalysis], sweep: &SweepTable) -> String {
    let law = cfg.entry_law();
    let mut out = format!("<!-- {} -->\n# Experiment summary\n\n", prov.line("summary"));
    let _ = writeln!(out, "- law: {}", cfg.law);
    let _ = writeln!(
        out,
        "- entry assumptions: {}",
        if law.is_compliant() { "compliant" } else { "non-compliant (control)" }
    );
    let _ = writeln!(out, "- replicates per dimension: {}", cfg.replicates);
    let _ = writeln!(out, "- master seed: {}", cfg.master_seed);
    let _ = writeln!(out, "- config sha256: {}", prov.config_hash);
    let _ = writeln!(out, "- code version: {}\n", prov.version);

    out.push_str("## Per dimension\n\n");
    out.push_str("| n | ok | failed | flagged (theorem) | flagged (exploratory) | Cauchy checked | Cauchy skipped | max Cauchy gap | Re/Im variance ratios |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for a in analyses {
        let flagged = |theorem: bool| {
            a.deviations
                .iter()
                .filter(|d| d.flagged() && (d.regime == crate::harness::Regime::Theorem) == theorem)
                .count()
        };
        let ratios: Vec<String> = a.variance_ratios.iter().map(|r| format!("{r:.4}")).collect();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {:.3e} | {} |",
            a.n,
            a.replicates,
            a.failures,
            flagged(true),
            flagged(false),
            a.cauchy_checked,
            a.cauchy_skipped,
            a.max_cauchy_gap,
            ratios.join(", ")
        );
    }

    out.push_str("\n## Normality\n\n");
    let checked: Vec<_> = analyses.iter().flat_map(|a| a.normality.iter().map(move |c| (a.n, c))).collect();
    if checked.is_empty() {
        out.push_str("Not run: fewer than 500 successful replicates per dimension.\n");
    } else {
        for (n, c) in checked {
            let _ = writeln!(
                out,
                "- n = {n}, {}: {}",
                c.quantity,
                if c.report.passes() { "pass" } else { "flagged" }
            );
        }
    }

    out.push_str("\n## Convergence in n\n\n");
    match &sweep.trend {
        None => out.push_str("Not assessed: fewer than three dimensions.\n"),
        Some(t) => {
            let _ = writeln!(out, "- mean radial KS decreasing: {}", yes_no(t.esd_ks_decreasing));
            let _ = writeln!(out, "- mean spectral norm approaching 2: {}", yes_no(t.norm_approaching_limit));
            let _ = writeln!(out, "- mean spectral radius approaching 1: {}", yes_no(t.radius_approaching_limit));
            let _ = writeln!(
                out,
                "- fraction outside the norm event non-increasing: {}",
                yes_no(t.omega_fraction_nonincreasing)
            );
        }
    }
    out.push_str(
        "\nRows whose grid points lie at or inside radius 4 are exploratory: they are reported but are not verification.\n",
    );
    out
}
