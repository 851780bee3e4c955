//! Field sweeps of the steerability function, finite-difference
//! derivatives, pseudocritical points, and the logarithmic fits that give
//! the critical exponent.
//!
//! Near `h_c = 1` the derivative diverges logarithmically,
//! `dS/dh ≈ κ₁ ln|h − 1| + const` in the thermodynamic limit, while on a
//! ring of `N` spins its extremum grows as `κ₂ ln N + const`. The exponent
//! follows as `ν = |κ₁ / κ₂|`.
//!
//! `dS/dh` is negative and unbounded below at the transition, so "peak"
//! here always means the extremum of `|dS/dh|`, and peak heights are
//! reported as magnitudes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::steering::{self, AxisSet};
use crate::xychain::{reduced_state, ChainParams, ChainSize};

/// Critical field of the transverse-field XY chain.
pub const H_CRITICAL: f64 = 1.0;

/// Evenly spaced field values `lo, lo + step, …, hi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl HRange {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::InvalidParameter("field range must be finite".into()));
        }
        if lo >= hi || step <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "field range needs lo < hi and step > 0, got {lo}:{hi}:{step}"
            )));
        }
        let n = (hi - lo) / step;
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "step {step} does not divide [{lo}, {hi}]"
            )));
        }
        Ok(HRange { lo, hi, step })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            self.hi
        } else {
            // Snap to 12 significant figures so decimal grids print as typed.
            let x = self.lo + i as f64 * self.step;
            let snapped: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            if (snapped - x).abs() <= 1e-9 * self.step {
                snapped
            } else {
                x
            }
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

/// Central differences at interior points, one-sided at the ends.
pub fn finite_differences(values: &[f64], step: f64) -> Vec<f64> {
    let n = values.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|i| {
                if i == 0 {
                    (values[1] - values[0]) / step
                } else if i == n - 1 {
                    (values[n - 1] - values[n - 2]) / step
                } else {
                    (values[i + 1] - values[i - 1]) / (2.0 * step)
                }
            })
            .collect(),
    }
}

/// Quantities evaluated at a single field value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValues {
    pub s: f64,
    /// Smallest eigenvalue of the partial transpose.
    pub lambda1: f64,
    pub concurrence: f64,
    /// Steering-inequality value at the optimal orientation.
    pub s_ineq: Option<f64>,
    /// Steering-inequality value with the canonical axes.
    pub s_ineq_canonical: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub h: f64,
    pub values: PointValues,
    pub ds_dh: f64,
    pub ds_ineq_dh: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub gamma: f64,
    pub size: ChainSize,
    pub r: usize,
    pub range: HRange,
    /// Number of inequality settings, when the inequality columns are present.
    pub settings: Option<usize>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn h(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.h).collect()
    }

    pub fn s(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.values.s).collect()
    }

    pub fn ds_dh(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ds_dh).collect()
    }

    /// Field values at which `S` changes sign between consecutive rows,
    /// located by linear interpolation. Exact zeros count once.
    pub fn sign_changes(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut last: Option<(f64, f64)> = None;
        for row in &self.rows {
            let (h, s) = (row.h, row.values.s);
            if s == 0.0 {
                continue;
            }
            if let Some((h0, s0)) = last {
                if s0.signum() != s.signum() {
                    out.push(h0 + (h - h0) * s0 / (s0 - s));
                }
            }
            last = Some((h, s));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub gamma: f64,
    pub size: ChainSize,
    pub r: usize,
    pub range: HRange,
    /// Add steering-inequality columns for this axis set.
    pub inequality: Option<AxisSet>,
}

/// Steerability, PT minimum and concurrence (plus the optional inequality
/// value) for one chain configuration.
pub fn evaluate_point(params: &ChainParams, inequality: Option<&AxisSet>) -> Result<PointValues> {
    let state = reduced_state(params)?;
    let pt = state.pt_eigenvalues();
    let mut out = PointValues {
        s: pt.steerability(),
        lambda1: pt.values()[0],
        concurrence: state.concurrence(),
        ..Default::default()
    };
    if let Some(axes) = inequality {
        let v = steering::violation_with(&state, axes)?;
        out.s_ineq = Some(v.value);
        out.s_ineq_canonical = Some(v.canonical_value);
    }
    Ok(out)
}

pub fn sweep(config: &SweepConfig) -> Result<SweepTable> {
    let axes = config.inequality.as_ref();
    let base = ChainParams::new(
        config.gamma,
        config.range.lo.max(0.0),
        config.size,
        config.r,
    )?;
    let table = sweep_with(config.range, |h| evaluate_point(&base.with_h(h)?, axes))?;
    Ok(SweepTable {
        gamma: config.gamma,
        size: config.size,
        r: config.r,
        settings: axes.map(AxisSet::n_settings),
        ..table
    })
}

/// Evaluates `eval` on every grid point in parallel and attaches derivative
/// columns. The returned table carries placeholder chain metadata.
pub fn sweep_with<F>(range: HRange, eval: F) -> Result<SweepTable>
where
    F: Fn(f64) -> Result<PointValues> + Sync,
{
    let hs = range.points();
    let values = hs
        .par_iter()
        .map(|&h| eval(h).map_err(|e| e.at_field(h)))
        .collect::<Result<Vec<_>>>()?;

    let s: Vec<f64> = values.iter().map(|v| v.s).collect();
    let ds = finite_differences(&s, range.step);
    let ineq: Option<Vec<f64>> = values.iter().map(|v| v.s_ineq).collect();
    let dineq = ineq.map(|col| finite_differences(&col, range.step));

    let rows = hs
        .iter()
        .zip(values)
        .enumerate()
        .map(|(i, (&h, v))| SweepRow {
            h,
            values: v,
            ds_dh: ds[i],
            ds_ineq_dh: dineq.as_ref().map(|d| d[i]),
        })
        .collect();
    Ok(SweepTable {
        gamma: f64::NAN,
        size: ChainSize::Thermodynamic,
        r: 1,
        range,
        settings: None,
        rows,
    })
}

/// Location and height of the `|dS/dh|` extremum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub h_m: f64,
    /// Refined `|dS/dh|` at `h_m`.
    pub peak: f64,
}

/// Discrete argmax of `|dS/dh|`, refined by the parabola through it and its
/// two neighbours. A maximum on the first or last row is an error.
pub fn pseudocritical(table: &SweepTable) -> Result<Peak> {
    let d: Vec<f64> = table.rows.iter().map(|r| r.ds_dh.abs()).collect();
    let (i, _) = d
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidParameter("empty sweep table".into()))?;
    if i == 0 || i + 1 == d.len() {
        return Err(Error::PeakOnBoundary { h: table.rows[i].h });
    }
    let (y0, y1, y2) = (d[i - 1], d[i], d[i + 1]);
    let curvature = y0 - 2.0 * y1 + y2;
    let step = table.range.step;
    if curvature >= 0.0 {
        // Flat top; nothing to refine.
        return Ok(Peak {
            h_m: table.rows[i].h,
            peak: y1,
        });
    }
    let offset = 0.5 * (y0 - y2) / curvature;
    Ok(Peak {
        h_m: table.rows[i].h + offset * step,
        peak: y1 - 0.125 * (y0 - y2) * (y0 - y2) / curvature,
    })
}

/// Coarse grid and zoom schedule for locating the pseudocritical point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakSearch {
    pub coarse: HRange,
    /// Number of zoom passes after the coarse sweep.
    pub zoom_levels: usize,
    /// Step reduction per zoom pass.
    pub zoom_factor: usize,
    /// Half-width of each zoom window in units of the previous step.
    pub half_width: usize,
}

impl Default for PeakSearch {
    fn default() -> Self {
        PeakSearch {
            coarse: HRange {
                lo: 0.5,
                hi: 1.5,
                step: 0.002,
            },
            zoom_levels: 3,
            zoom_factor: 10,
            half_width: 3,
        }
    }
}

/// The pseudocritical point of a finite ring.
///
/// The derivative peak has width of order 1/N, so a fixed grid stops
/// resolving it once N grows past a few hundred; each zoom pass resamples a
/// window around the current estimate with a finer step.
pub fn locate_peak(gamma: f64, n: usize, r: usize, search: &PeakSearch) -> Result<Peak> {
    let config = SweepConfig {
        gamma,
        size: ChainSize::Finite(n),
        r,
        range: search.coarse,
        inequality: None,
    };
    let mut peak = pseudocritical(&sweep(&config)?)?;
    let mut step = search.coarse.step;
    for _ in 0..search.zoom_levels {
        let fine = step / search.zoom_factor as f64;
        let half = search.half_width as f64 * step;
        let lo = (peak.h_m - half).max(0.0);
        let range = HRange::new(lo, lo + 2.0 * half, fine)?;
        peak = pseudocritical(&sweep(&SweepConfig {
            range,
            ..config.clone()
        })?)?;
        step = fine;
    }
    Ok(peak)
}

/// Ordinary least-squares line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidParameter(
            "a line fit needs at least two paired points".into(),
        ));
    }
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - xm) * (y - ym);
        sxx += (x - xm) * (x - xm);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LineFit {
        slope,
        intercept,
        rms,
    })
}

/// Steerability of the thermodynamic-limit state at field `h`.
pub fn steerability_limit(gamma: f64, h: f64, r: usize) -> Result<f64> {
    let state = reduced_state(&ChainParams::thermodynamic(gamma, h, r)?)?;
    Ok(state.steerability())
}

/// Central-difference `dS/dh` in the thermodynamic limit.
pub fn derivative_limit(gamma: f64, h: f64, r: usize, step: f64) -> Result<f64> {
    let plus = steerability_limit(gamma, h + step, r)?;
    let minus = steerability_limit(gamma, h - step, r)?;
    Ok((plus - minus) / (2.0 * step))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// h < h_c
    Below,
    /// h > h_c
    Above,
    /// Both sides pooled into one fit.
    Both,
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Below => "below",
            Side::Above => "above",
            Side::Both => "both",
        })
    }
}

/// Distance window and sampling for the κ₁ fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kappa1Config {
    /// `(d_lo, d_hi)` in `|h − 1|`.
    pub window: (f64, f64),
    /// Log-uniform samples per side.
    pub samples: usize,
    /// Derivative step as a fraction of `|h − 1|`.
    pub relative_step: f64,
}

impl Default for Kappa1Config {
    fn default() -> Self {
        Kappa1Config {
            window: (1e-3, 5e-2),
            samples: 24,
            relative_step: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kappa1Fit {
    pub side: Side,
    pub fit: LineFit,
    /// `(h, dS/dh)` samples used in the fit.
    pub samples: Vec<(f64, f64)>,
}

impl Kappa1Config {
    pub fn validate(&self) -> Result<()> {
        let (d_lo, d_hi) = self.window;
        if !(d_lo > 0.0 && d_lo < d_hi && d_hi <= 0.1) {
            return Err(Error::InvalidParameter(format!(
                "κ₁ window must satisfy 0 < d_lo < d_hi ≤ 0.1, got ({d_lo}, {d_hi})"
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidParameter(
                "κ₁ fit needs at least 2 samples".into(),
            ));
        }
        if !(self.relative_step > 0.0 && self.relative_step < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relative derivative step must lie in (0, 1), got {}",
                self.relative_step
            )));
        }
        Ok(())
    }
}

impl Kappa1Fit {
    pub fn kappa1(&self) -> f64 {
        self.fit.slope
    }
}

/// Samples `dS/dh` log-uniformly in `|h − 1|` within the window and fits it
/// against `ln|h − 1|`.
pub fn fit_kappa1(gamma: f64, r: usize, side: Side, config: &Kappa1Config) -> Result<Kappa1Fit> {
    config.validate()?;
    let (d_lo, d_hi) = config.window;
    let m = config.samples;
    let distances: Vec<f64> = (0..m)
        .map(|i| {
            let t = i as f64 / (m - 1) as f64;
            (d_lo.ln() + t * (d_hi.ln() - d_lo.ln())).exp()
        })
        .collect();
    let signs: &[f64] = match side {
        Side::Below => &[-1.0],
        Side::Above => &[1.0],
        Side::Both => &[-1.0, 1.0],
    };
    let hs: Vec<f64> = signs
        .iter()
        .flat_map(|s| distances.iter().map(move |d| H_CRITICAL + s * d))
        .collect();
    let samples = hs
        .par_iter()
        .map(|&h| {
            let d = (h - H_CRITICAL).abs();
            derivative_limit(gamma, h, r, config.relative_step * d)
                .map(|v| (h, v))
                .map_err(|e| e.at_field(h))
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = samples
        .iter()
        .map(|(h, _)| (h - H_CRITICAL).abs().ln())
        .collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    Ok(Kappa1Fit {
        side,
        fit: linear_fit(&xs, &ys)?,
        samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizePeak {
    pub n: usize,
    pub h_m: f64,
    pub peak: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kappa2Fit {
    pub fit: LineFit,
    pub peaks: Vec<SizePeak>,
}

impl Kappa2Fit {
    pub fn kappa2(&self) -> f64 {
        self.fit.slope
    }
}

/// Fits the pseudocritical peak height against `ln N`.
pub fn fit_kappa2(gamma: f64, r: usize, sizes: &[usize], search: &PeakSearch) -> Result<Kappa2Fit> {
    validate_size_ladder(sizes)?;
    let peaks = sizes
        .par_iter()
        .map(|&n| {
            locate_peak(gamma, n, r, search).map(|p| SizePeak {
                n,
                h_m: p.h_m,
                peak: p.peak,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Kappa2Fit {
        fit: fit_peaks(&peaks)?,
        peaks,
    })
}

/// At least 5 odd sizes, the largest at least 1601.
pub fn validate_size_ladder(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "κ₂ fit needs at least 5 sizes, got {}",
            sizes.len()
        )));
    }
    if sizes.iter().copied().max().unwrap_or(0) < 1601 {
        return Err(Error::InvalidParameter(
            "κ₂ fit needs a largest size of at least 1601".into(),
        ));
    }
    for &n in sizes {
        ChainSize::Finite(n).validate()?;
    }
    Ok(())
}

pub fn fit_peaks(peaks: &[SizePeak]) -> Result<LineFit> {
    let xs: Vec<f64> = peaks.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = peaks.iter().map(|p| p.peak).collect();
    linear_fit(&xs, &ys)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingConfig {
    pub gamma: f64,
    pub r: usize,
    pub kappa1: Kappa1Config,
    /// Side whose κ₁ is used for ν.
    pub headline_side: Side,
    pub sizes: Vec<usize>,
    pub search: PeakSearch,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            gamma: 0.6,
            r: 1,
            kappa1: Kappa1Config::default(),
            headline_side: Side::Below,
            sizes: vec![101, 201, 401, 801, 1601, 3201],
            search: PeakSearch::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingFit {
    pub kappa1: f64,
    pub kappa1_side: Side,
    pub kappa1_window: (f64, f64),
    pub below: Kappa1Fit,
    pub above: Kappa1Fit,
    pub pooled: Kappa1Fit,
    pub kappa2: Kappa2Fit,
    pub nu: f64,
}

impl ScalingConfig {
    pub fn validate(&self) -> Result<()> {
        ChainParams::thermodynamic(self.gamma, H_CRITICAL, self.r)?;
        self.kappa1.validate()?;
        validate_size_ladder(&self.sizes)
    }
}

impl ScalingFit {
    /// True when `|h_m(N) − 1|` strictly decreases along the size ladder.
    pub fn drifts_toward_critical(&self) -> bool {
        self.kappa2
            .peaks
            .windows(2)
            .all(|w| (w[1].h_m - H_CRITICAL).abs() < (w[0].h_m - H_CRITICAL).abs())
    }
}

pub fn scaling_analysis(config: &ScalingConfig) -> Result<ScalingFit> {
    config.validate()?;
    let fit_side = |side| fit_kappa1(config.gamma, config.r, side, &config.kappa1);
    let below = fit_side(Side::Below)?;
    let above = fit_side(Side::Above)?;
    let pooled = fit_side(Side::Both)?;
    let kappa2 = fit_kappa2(config.gamma, config.r, &config.sizes, &config.search)?;
    let kappa1 = match config.headline_side {
        Side::Below => below.kappa1(),
        Side::Above => above.kappa1(),
        Side::Both => pooled.kappa1(),
    };
    Ok(ScalingFit {
        kappa1,
        kappa1_side: config.headline_side,
        kappa1_window: config.kappa1.window,
        nu: (kappa1 / kappa2.kappa2()).abs(),
        below,
        above,
        pooled,
        kappa2,
    })
}
