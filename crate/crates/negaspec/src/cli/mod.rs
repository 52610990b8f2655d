//! Command-line harness: validated run configuration, the six commands,
//! exact-vs-predicted spectrum matching, and deterministic report emission.

mod output;

pub use output::{write_svg_scatter, SvgSeries};

use crate::asymptotics::{
    half_filling_closed_forms, predict_fine_structure, total_mean_density, Classification,
    RhPrediction, RootSearchConfig,
};
use crate::deform::{build_deformed, build_plain};
use crate::lattice::{FermiState, Geometry};
use crate::parallel;
use crate::spectra::{
    exact_spectrum, exact_spectrum_with_threshold, logarithmic_negativity, PairClass,
    SpectrumResult,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Predict,
    Density,
    Negativity,
    Compare,
    Sweep,
}

/// Named tolerances; every field has a default, unknown names are rejected.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Matching cap as a fraction of the local mean spacing.
    pub match_cap_factor: f64,
    /// Grid points per predicted root spacing in the root scans.
    pub steps_per_spacing: usize,
    /// Bisection tolerance in β_I for the root scans.
    pub bisect_tol: f64,
    /// Relative |Im λ| under which an eigenvalue is classified real.
    pub real_im_threshold: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            match_cap_factor: 0.5,
            steps_per_spacing: 10,
            bisect_tol: 1e-10,
            real_im_threshold: crate::spectra::REAL_IM_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCell {
    pub k: usize,
    pub l: usize,
    pub gap: usize,
    /// Filling override as (numerator, denominator); falls back to the
    /// top-level filling when absent.
    pub pf: Option<(u64, u64)>,
}

/// One run: a command plus its validated inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Command,
    pub k: usize,
    pub l: usize,
    pub gap: usize,
    /// Filling fraction p_F/π as an exact rational (numerator, denominator).
    pub pf: (u64, u64),
    pub lambda_window: [f64; 2],
    pub thresholds: Thresholds,
    /// Histogram bins for the density command.
    pub bins: usize,
    /// Primary output path; stdout when absent.
    pub out: Option<PathBuf>,
    /// Optional SVG rendering of the primary output.
    pub svg: Option<PathBuf>,
    /// Geometries for the sweep command.
    pub sweep: Vec<SweepCell>,
    /// Use the plain (undeformed) covariance matrix in `spectrum`.
    pub plain: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Spectrum,
            k: 29,
            l: 29,
            gap: 15,
            pf: (1, 2),
            lambda_window: [-0.999, 0.999],
            thresholds: Thresholds::default(),
            bins: 41,
            out: None,
            svg: None,
            sweep: Vec::new(),
            plain: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.k, self.l, self.gap)
    }

    pub fn state(&self) -> Result<FermiState> {
        FermiState::new(self.pf.0, self.pf.1)
    }

    pub fn root_search(&self) -> Result<RootSearchConfig> {
        let [lo, hi] = self.lambda_window;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi || lo <= -1.0 || hi >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "lambda window [{lo}, {hi}] must be an ordered subinterval of (−1, 1)"
            )));
        }
        Ok(RootSearchConfig {
            lambda_window: (lo, hi),
            steps_per_spacing: self.thresholds.steps_per_spacing,
            bisect_tol: self.thresholds.bisect_tol,
        })
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair_class_label(c: &PairClass) -> &'static str {
    match c {
        PairClass::Real => "real",
        PairClass::PairMember(_) => "pair",
    }
}

fn classification_label(c: Classification) -> &'static str {
    match c {
        Classification::Real => "real",
        Classification::ComplexPairs => "complex-pairs",
        Classification::RealSmooth => "real-smooth",
    }
}

/// `source,re_lambda,im_lambda,branch,residual` rows for a spectrum.
pub fn spectrum_csv(spec: &SpectrumResult) -> String {
    let mut s = String::from("source,re_lambda,im_lambda,branch,residual\n");
    for (l, c) in spec.lambdas.iter().zip(&spec.classes) {
        let _ = writeln!(
            s,
            "exact,{},{},{},{}",
            fmt_f(l.re),
            fmt_f(l.im),
            pair_class_label(c),
            fmt_f(spec.residual)
        );
    }
    s
}

/// Prediction rows in the same CSV schema; the residual column carries zero.
pub fn prediction_csv(pred: &RhPrediction) -> String {
    let mut s = String::from("source,re_lambda,im_lambda,branch,residual\n");
    for r in &pred.roots {
        let branch = match r.branch {
            crate::asymptotics::Branch::Plus => "plus",
            crate::asymptotics::Branch::Minus => "minus",
        };
        let _ = writeln!(
            s,
            "rh-prediction,{},{},{},{}",
            fmt_f(r.lambda.re),
            fmt_f(r.lambda.im),
            branch,
            fmt_f(0.0)
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityRow {
    pub lambda: f64,
    pub rho_pred: f64,
    pub count_exact: usize,
    pub bin_width: f64,
}

/// Histogram of exact eigenvalue real parts against the predicted density.
pub fn density_table(
    spec: &SpectrumResult,
    geom: &Geometry,
    window: (f64, f64),
    bins: usize,
) -> Vec<DensityRow> {
    let (lo, hi) = window;
    let bin_width = (hi - lo) / bins as f64;
    (0..bins)
        .map(|i| {
            let a = lo + bin_width * i as f64;
            let b = a + bin_width;
            let center = 0.5 * (a + b);
            let count = spec
                .lambdas
                .iter()
                .filter(|l| l.re >= a && l.re < b)
                .count();
            DensityRow {
                lambda: center,
                rho_pred: total_mean_density(center, geom).unwrap_or(f64::NAN),
                count_exact: count,
                bin_width,
            }
        })
        .collect()
}

fn density_csv(rows: &[DensityRow]) -> String {
    let mut s = String::from("lambda,rho_pred,count_exact,bin_width\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_f(r.lambda),
            fmt_f(r.rho_pred),
            r.count_exact,
            fmt_f(r.bin_width)
        );
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct NegativityReport {
    pub exact: f64,
    pub closed_form: Option<f64>,
    pub ratio: Option<f64>,
    pub geometry: GeometryInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeometryInfo {
    pub k: usize,
    pub l: usize,
    pub gap: usize,
    pub pf: String,
}

fn geometry_info(cfg_k: usize, cfg_l: usize, gap: usize, state: &FermiState) -> GeometryInfo {
    GeometryInfo {
        k: cfg_k,
        l: cfg_l,
        gap,
        pf: format!("{}/{}", state.numer(), state.denom()),
    }
}

fn negativity_report_from(spec: &SpectrumResult) -> Result<NegativityReport> {
    let geom = spec.geometry;
    let state = spec.state;
    let exact = logarithmic_negativity(&spec.lambdas).value;
    let closed_form = if state.is_half_filling() && geom.k == geom.l {
        Some(half_filling_closed_forms(&geom, &state)?.negativity)
    } else {
        None
    };
    let ratio = match closed_form {
        Some(cf) if cf != 0.0 => Some(exact / cf),
        _ => None,
    };
    Ok(NegativityReport {
        exact,
        closed_form,
        ratio,
        geometry: geometry_info(geom.k, geom.l, geom.gap, &state),
    })
}

fn negativity_report(geom: &Geometry, state: &FermiState) -> Result<NegativityReport> {
    negativity_report_from(&exact_spectrum(&build_deformed(geom, state))?)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchedPair {
    pub exact: [f64; 2],
    pub predicted: [f64; 2],
    pub distance: f64,
    pub local_spacing: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub geometry: GeometryInfo,
    pub matched: Vec<MatchedPair>,
    pub unmatched_exact: Vec<[f64; 2]>,
    pub unmatched_predicted: Vec<[f64; 2]>,
    pub match_fraction: f64,
    pub classification_exact: String,
    pub classification_predicted: String,
    pub classification_agrees: bool,
    pub negativity: NegativityReport,
    pub density: Vec<DensityRow>,
}

/// Mean local spacing at each point of a set: the averaged gap between
/// real-part neighbors two indices away (robust to degenerate duplicates).
fn local_spacings(points: &[Complex64]) -> Vec<f64> {
    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .re
            .total_cmp(&points[b].re)
            .then(points[a].im.total_cmp(&points[b].im))
    });
    let mut out = vec![f64::INFINITY; n];
    for (rank, &idx) in order.iter().enumerate() {
        let lo = rank.saturating_sub(2);
        let hi = (rank + 2).min(n - 1);
        if hi > lo {
            let span = points[order[hi]].re - points[order[lo]].re;
            out[idx] = (span / (hi - lo) as f64).abs();
        }
    }
    out
}

/// Greedy nearest-neighbor matching in the complex plane, capped at
/// `cap_factor` times the smaller of the two local mean spacings. Symmetric:
/// swapping the inputs transposes the report.
pub fn match_spectra(
    exact: &SpectrumResult,
    predicted: &RhPrediction,
    window: (f64, f64),
    cap_factor: f64,
) -> Result<ComparisonReport> {
    let ex: Vec<Complex64> = exact
        .lambdas
        .iter()
        .cloned()
        .filter(|l| l.re >= window.0 && l.re <= window.1)
        .collect();
    let pr: Vec<Complex64> = predicted
        .roots
        .iter()
        .map(|r| r.lambda)
        .filter(|l| l.re >= window.0 && l.re <= window.1)
        .collect();
    let sp_ex = local_spacings(&ex);
    let sp_pr = local_spacings(&pr);

    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(ex.len() * pr.len());
    for (i, &e) in ex.iter().enumerate() {
        for (j, &p) in pr.iter().enumerate() {
            let d = (e - p).norm();
            let cap = cap_factor * sp_ex[i].min(sp_pr[j]);
            if d <= cap {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut used_e = vec![false; ex.len()];
    let mut used_p = vec![false; pr.len()];
    let mut matched = Vec::new();
    for (d, i, j) in candidates {
        if used_e[i] || used_p[j] {
            continue;
        }
        used_e[i] = true;
        used_p[j] = true;
        matched.push(MatchedPair {
            exact: [ex[i].re, ex[i].im],
            predicted: [pr[j].re, pr[j].im],
            distance: d,
            local_spacing: sp_ex[i].min(sp_pr[j]),
        });
    }
    matched.sort_by(|a, b| a.exact[0].total_cmp(&b.exact[0]).then(a.exact[1].total_cmp(&b.exact[1])));

    let unmatched_exact: Vec<[f64; 2]> = ex
        .iter()
        .zip(&used_e)
        .filter(|(_, u)| !**u)
        .map(|(l, _)| [l.re, l.im])
        .collect();
    let unmatched_predicted: Vec<[f64; 2]> = pr
        .iter()
        .zip(&used_p)
        .filter(|(_, u)| !**u)
        .map(|(l, _)| [l.re, l.im])
        .collect();
    let match_fraction = if ex.is_empty() {
        1.0
    } else {
        matched.len() as f64 / ex.len() as f64
    };

    let geom = exact.geometry;
    let state = exact.state;
    let classification_exact = if exact.has_complex_pairs() {
        "complex-pairs"
    } else {
        "real"
    };
    Ok(ComparisonReport {
        geometry: geometry_info(geom.k, geom.l, geom.gap, &state),
        matched,
        unmatched_exact,
        unmatched_predicted,
        match_fraction,
        classification_exact: classification_exact.into(),
        classification_predicted: classification_label(predicted.classification).into(),
        classification_agrees: (classification_exact == "complex-pairs")
            == (predicted.classification == Classification::ComplexPairs),
        negativity: negativity_report_from(exact)?,
        density: Vec::new(),
    })
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, content)?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn spectrum_points(spec: &SpectrumResult) -> Vec<(f64, f64)> {
    spec.lambdas.iter().map(|l| (l.re, l.im)).collect()
}

fn prediction_points(pred: &RhPrediction) -> Vec<(f64, f64)> {
    pred.roots.iter().map(|r| (r.lambda.re, r.lambda.im)).collect()
}

/// Execute one command; artifacts land on `out`/`svg` or stdout.
pub fn run(cfg: &RunConfig) -> Result<()> {
    let state = cfg.state()?;
    match cfg.command {
        Command::Spectrum => {
            let geom = cfg.geometry()?;
            let cov = if cfg.plain {
                build_plain(&geom, &state)
            } else {
                build_deformed(&geom, &state)
            };
            let spec = exact_spectrum_with_threshold(&cov, cfg.thresholds.real_im_threshold)?;
            emit(&cfg.out, &spectrum_csv(&spec))?;
            if let Some(svg) = &cfg.svg {
                write_svg_scatter(
                    svg,
                    "deformed spectrum",
                    &[SvgSeries::points("exact", "#1f6fb2", spectrum_points(&spec))],
                )?;
            }
        }
        Command::Predict => {
            let geom = cfg.geometry()?;
            let pred = predict_fine_structure(&geom, &state, &cfg.root_search()?)?;
            emit(&cfg.out, &prediction_csv(&pred))?;
            if let Some(svg) = &cfg.svg {
                write_svg_scatter(
                    svg,
                    "predicted spectrum",
                    &[SvgSeries::points(
                        "prediction",
                        "#b2491f",
                        prediction_points(&pred),
                    )],
                )?;
            }
        }
        Command::Density => {
            let geom = cfg.geometry()?;
            cfg.root_search()?; // validates the window
            let spec = exact_spectrum_with_threshold(
                &build_deformed(&geom, &state),
                cfg.thresholds.real_im_threshold,
            )?;
            let window = (cfg.lambda_window[0], cfg.lambda_window[1]);
            let rows = density_table(&spec, &geom, window, cfg.bins);
            emit(&cfg.out, &density_csv(&rows))?;
            if let Some(svg) = &cfg.svg {
                let curve: Vec<(f64, f64)> =
                    rows.iter().map(|r| (r.lambda, r.rho_pred)).collect();
                let hist: Vec<(f64, f64)> = rows
                    .iter()
                    .map(|r| (r.lambda, r.count_exact as f64 / r.bin_width))
                    .collect();
                write_svg_scatter(
                    svg,
                    "eigenvalue density",
                    &[
                        SvgSeries::line("predicted", "#b2491f", curve),
                        SvgSeries::points("exact histogram", "#1f6fb2", hist),
                    ],
                )?;
            }
        }
        Command::Negativity => {
            let geom = cfg.geometry()?;
            let report = negativity_report(&geom, &state)?;
            emit(&cfg.out, &to_json(&report)?)?;
        }
        Command::Compare => {
            let geom = cfg.geometry()?;
            let spec = exact_spectrum_with_threshold(
                &build_deformed(&geom, &state),
                cfg.thresholds.real_im_threshold,
            )?;
            let pred = predict_fine_structure(&geom, &state, &cfg.root_search()?)?;
            let window = (cfg.lambda_window[0], cfg.lambda_window[1]);
            let mut report =
                match_spectra(&spec, &pred, window, cfg.thresholds.match_cap_factor)?;
            report.density = density_table(&spec, &geom, window, cfg.bins);
            emit(&cfg.out, &to_json(&report)?)?;
            if let Some(svg) = &cfg.svg {
                write_svg_scatter(
                    svg,
                    "exact vs predicted",
                    &[
                        SvgSeries::points("exact", "#1f6fb2", spectrum_points(&spec)),
                        SvgSeries::points("predicted", "#b2491f", prediction_points(&pred)),
                    ],
                )?;
            }
        }
        Command::Sweep => {
            if cfg.sweep.is_empty() {
                return Err(Error::InvalidInput(
                    "sweep requires a non-empty `sweep` list of geometries".into(),
                ));
            }
            let cells = cfg.sweep.clone();
            let default_pf = cfg.pf;
            let results = parallel::map_collect(&cells, |cell| -> Result<String> {
                let pf = cell.pf.unwrap_or(default_pf);
                let state = FermiState::new(pf.0, pf.1)?;
                let geom = Geometry::new(cell.k, cell.l, cell.gap)?;
                let spec = exact_spectrum(&build_deformed(&geom, &state))?;
                let rep = negativity_report_from(&spec)?;
                Ok(format!(
                    "{},{},{},{}/{},{},{},{},{}\n",
                    cell.k,
                    cell.l,
                    cell.gap,
                    pf.0,
                    pf.1,
                    fmt_f(rep.exact),
                    rep.closed_form.map(fmt_f).unwrap_or_default(),
                    rep.ratio.map(fmt_f).unwrap_or_default(),
                    if spec.has_complex_pairs() {
                        "complex-pairs"
                    } else {
                        "real"
                    },
                ))
            });
            let mut csv =
                String::from("k,l,gap,pf,exact,closed_form,ratio,classification\n");
            for r in results {
                csv.push_str(&r?);
            }
            emit(&cfg.out, &csv)?;
        }
    }
    Ok(())
}

/// Map an error to the documented process exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) | Error::Domain(_) => 2,
        _ => 3,
    }
}
