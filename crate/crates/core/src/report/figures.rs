use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::records::{read_records, read_spectra, SPECTRA_FILE};
use super::tables::config_beside;
use super::{ensure_dir, num, write_file, Provenance, ReportError};
use crate::harness::{estimate_moments, DimensionRun};
use crate::oracles::limit_covariance_closed;

pub const SCATTER_FILE: &str = "scatter.svg";
pub const QQ_DATA_FILE: &str = "qq.tsv";
pub const QQ_FILE: &str = "qq.svg";
pub const TREND_FILE: &str = "variance_trend.svg";

const SIZE: f64 = 480.0;
const MARGIN: f64 = 48.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterSummary {
    pub n: usize,
    pub points: usize,
    pub inside_radius_1_1: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSummary {
    pub scatter: ScatterSummary,
    pub qq_statistic: String,
    pub qq_points: usize,
    pub trend_dimensions: usize,
}

/// Acklam's rational approximation refined by one Halley step.
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < 0.02425 {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - 0.02425 {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// `(normal quantile, standardized order statistic)` pairs, plotting
/// positions `(k + 0.5) / R`.
pub fn qq_points(samples: &[f64]) -> Vec<(f64, f64)> {
    let r = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / r;
    let sd = (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0)).sqrt();
    let mut z: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    z.iter()
        .enumerate()
        .map(|(k, &v)| (normal_quantile((k as f64 + 0.5) / r), v))
        .collect()
}

/// Linear map from a data box onto the square canvas.
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (SIZE - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (SIZE - 2.0 * MARGIN)
    }
}

fn svg_open(prov: &Provenance, kind: &str, title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <!-- {} -->\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        prov.line(kind),
        SIZE / 2.0
    )
}

fn axes(out: &mut String, fr: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        out,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{w}\" height=\"{w}\" fill=\"none\" stroke=\"black\"/>",
        w = SIZE - 2.0 * MARGIN
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{xlabel}</text>",
        SIZE / 2.0,
        SIZE - 12.0
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {y})\">{ylabel}</text>",
        y = SIZE / 2.0
    );
    for (v, anchor) in [(fr.x0, "start"), (fr.x1, "end")] {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"{anchor}\">{v:.3}</text>",
            fr.px(v),
            SIZE - MARGIN + 14.0
        );
    }
    for v in [fr.y0, fr.y1] {
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{v:.3}</text>",
            MARGIN - 4.0,
            fr.py(v) + 4.0
        );
    }
}

fn scatter_svg(prov: &Provenance, n: usize, eig: &[Complex64]) -> String {
    let fr = Frame {
        x0: -1.5,
        x1: 1.5,
        y0: -1.5,
        y1: 1.5,
    };
    let mut out = svg_open(prov, "scatter", &format!("Eigenvalues, n = {n}"));
    axes(&mut out, &fr, "Re", "Im");
    let r = fr.px(1.0) - fr.px(0.0);
    let _ = writeln!(
        out,
        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r:.2}\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\"/>",
        fr.px(0.0),
        fr.py(0.0)
    );
    out.push_str("<g fill=\"steelblue\" fill-opacity=\"0.7\">\n");
    for z in eig {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.6\"/>",
            fr.px(z.re.clamp(fr.x0, fr.x1)),
            fr.py(z.im.clamp(fr.y0, fr.y1))
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn qq_svg(prov: &Provenance, label: &str, pts: &[(f64, f64)]) -> String {
    let lim = pts
        .iter()
        .flat_map(|&(a, b)| [a.abs(), b.abs()])
        .fold(1.0_f64, f64::max)
        .ceil();
    let fr = Frame {
        x0: -lim,
        x1: lim,
        y0: -lim,
        y1: lim,
    };
    let mut out = svg_open(prov, "qq", &format!("Normal QQ plot, {label}"));
    axes(&mut out, &fr, "normal quantile", "standardized sample");
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"firebrick\"/>",
        fr.px(-lim),
        fr.py(-lim),
        fr.px(lim),
        fr.py(lim)
    );
    out.push_str("<g fill=\"steelblue\">\n");
    for &(a, b) in pts {
        let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\"/>", fr.px(a), fr.py(b));
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Empirical `Var X(f_i)` per dimension against the limit value.
fn trend_svg(prov: &Provenance, series: &[(String, f64, Vec<(usize, f64)>)]) -> String {
    let ns: Vec<f64> = series
        .iter()
        .flat_map(|s| s.2.iter().map(|p| (p.0 as f64).log2()))
        .collect();
    let (mut x0, mut x1) = ns
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if x1 - x0 < 1.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    let y1 = series
        .iter()
        .flat_map(|s| std::iter::once(s.1).chain(s.2.iter().map(|p| p.1)))
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max)
        * 1.2;
    let fr = Frame {
        x0,
        x1,
        y0: 0.0,
        y1: if y1 > 0.0 { y1 } else { 1.0 },
    };
    let mut out = svg_open(prov, "variance-trend", "Variance of linear statistics against n");
    axes(&mut out, &fr, "log2 n", "variance");
    let palette = ["steelblue", "darkorange", "seagreen", "purple", "firebrick"];
    for (i, (label, theory, pts)) in series.iter().enumerate() {
        let color = palette[i % palette.len()];
        let _ = writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\" stroke-dasharray=\"4 3\"/>",
            fr.px(fr.x0),
            fr.py(*theory),
            fr.px(fr.x1),
            fr.py(*theory)
        );
        let path: Vec<String> = pts
            .iter()
            .map(|&(n, v)| format!("{:.2},{:.2}", fr.px((n as f64).log2()), fr.py(v)))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.join(" ")
        );
        for p in &path {
            let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
            let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{color}\"/>");
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{label}</text>",
            MARGIN + 8.0,
            MARGIN + 16.0 + 14.0 * i as f64
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Scatter of the largest dimension's showcase spectrum, QQ data for
/// `Re X(f_0)` at that dimension, and the variance trend. Nothing is written
/// unless every figure can be produced.
pub fn write_figures(records: &Path, out_dir: &Path) -> Result<FigureSummary, ReportError> {
    let cfg = config_beside(records)?;
    let runs: Vec<DimensionRun> = read_records(records, &cfg)?;
    let source_dir = records.parent().unwrap_or_else(|| Path::new("."));
    let spectra = read_spectra(&source_dir.join(SPECTRA_FILE))?;
    let (n, spectrum) = spectra
        .iter()
        .max_by_key(|(n, _)| *n)
        .filter(|(_, s)| s.n() > 0)
        .ok_or(ReportError::EmptySpectrum)?;
    let prov = Provenance::of(&cfg);
    let eig = spectrum.eigenvalues();
    let scatter = ScatterSummary {
        n: *n,
        points: eig.len(),
        inside_radius_1_1: eig.iter().filter(|z| z.norm() <= 1.1).count(),
    };

    let largest = runs.iter().max_by_key(|r| r.n).ok_or(ReportError::NoReplicates)?;
    let xs: Vec<f64> = largest.ok_records().map(|r| r.statistics[0].re).collect();
    if xs.len() < 2 {
        return Err(ReportError::NoReplicates);
    }
    let label = format!("Re X({}), n = {}", cfg.functions[0].label(), largest.n);
    let pts = qq_points(&xs);

    let mut series = Vec::new();
    for (i, f) in cfg.functions.iter().enumerate() {
        let mut values = Vec::new();
        for run in &runs {
            let s: Vec<Vec<Complex64>> = run.ok_records().map(|r| vec![r.statistics[i]]).collect();
            if s.len() >= 2 {
                values.push((run.n, estimate_moments(&s).cov(0, 0).re));
            }
        }
        values.sort_by_key(|p| p.0);
        series.push((format!("X({})", f.label()), limit_covariance_closed(f, f).re, values));
    }

    let mut qq_data = format!("# {}\ntheoretical\tsample\n", prov.line("qq"));
    for &(a, b) in &pts {
        let _ = writeln!(qq_data, "{}\t{}", num(a), num(b));
    }
    ensure_dir(out_dir)?;
    write_file(&out_dir.join(SCATTER_FILE), &scatter_svg(&prov, *n, eig))?;
    write_file(&out_dir.join(QQ_DATA_FILE), &qq_data)?;
    write_file(&out_dir.join(QQ_FILE), &qq_svg(&prov, &label, &pts))?;
    write_file(&out_dir.join(TREND_FILE), &trend_svg(&prov, &series))?;
    Ok(FigureSummary {
        scatter,
        qq_statistic: label,
        qq_points: pts.len(),
        trend_dimensions: runs.len(),
    })
}
