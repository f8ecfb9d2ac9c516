//! Poles, regime labels, Lamb shift, spectrum sweeps and lineshape features.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bands::bloch_point;
use crate::error::{Error, Result};
use crate::params::{Band, System};
use crate::scattering::amplitudes;

/// The two single-excitation poles in the complex `Delta_k` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolePair {
    pub pole_plus: Complex64,
    pub pole_minus: Complex64,
}

/// `2 alpha(1 - alpha)(s e^{-i phi} - 1) + 1`; equals 1 for A and B.
fn sublattice_factor(system: &System, phi: f64, band: Band) -> Complex64 {
    let a = system.coupling.alpha();
    2.0 * a * (1.0 - a) * (band.sign() * Complex64::from_polar(1.0, -phi) - 1.0) + 1.0
}

/// Poles at control-field resonance (`Delta_c = 0`) for momentum `k`:
/// `i g^2 E A / (4 t1 t2 sin k) +- sqrt(Omega^2/4 + (i g^2 E A / (4 t1 t2 sin k))^2)`
/// with the principal square root.
pub fn poles(system: &System, k: f64, band: Band) -> Result<PolePair> {
    if system.emitter.delta_c != 0.0 {
        return Err(Error::Unsupported(
            "pole formula holds only at control-field resonance (delta_c = 0)",
        ));
    }
    let sin_k = k.sin();
    if sin_k.abs() < 1e-12 {
        return Err(Error::BandEdge {
            omega: bloch_point(k, &system.waveguide).omega * band.sign(),
        });
    }
    let p = bloch_point(k, &system.waveguide);
    let energy = band.sign() * p.omega;
    let g = system.emitter.g;
    let half_width = Complex64::new(0.0, 1.0) * g * g * energy * sublattice_factor(system, p.phi, band)
        / (4.0 * system.t1() * system.t2() * sin_k);
    let om = system.emitter.omega_rabi;
    let root = (Complex64::new(om * om / 4.0, 0.0) + half_width * half_width).sqrt();
    Ok(PolePair {
        pole_plus: half_width + root,
        pole_minus: half_width - root,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Lorentzian,
    Eit,
    Ats,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Lorentzian => "lorentzian",
            Regime::Eit => "eit",
            Regime::Ats => "ats",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub label: Regime,
    pub ratio: f64,
}

/// Control-field strength relative to the emitter linewidth,
/// `|Omega| |2 t1 t2 sin k| / (g^2 omega_k |A|)`, bucketed with the
/// heuristic cutoffs 0.25 and 4.
pub fn classify_regime(system: &System, k: f64, band: Band) -> RegimeLabel {
    let p = bloch_point(k, &system.waveguide);
    let om = system.emitter.omega_rabi.abs();
    let width = system.emitter.g.powi(2) * p.omega * sublattice_factor(system, p.phi, band).norm();
    let ratio = if om == 0.0 {
        0.0
    } else if width == 0.0 {
        f64::INFINITY
    } else {
        om * (2.0 * system.t1() * system.t2() * k.sin()).abs() / width
    };
    let label = if ratio < 0.25 {
        Regime::Lorentzian
    } else if ratio <= 4.0 {
        Regime::Eit
    } else {
        Regime::Ats
    };
    RegimeLabel { label, ratio }
}

/// Displacement `g^2 alpha(1 - alpha) / t1` of the transmission zero.
pub fn lamb_shift(system: &System) -> f64 {
    let a = system.coupling.alpha();
    system.emitter.g.powi(2) * a * (1.0 - a) / system.t1()
}

/// Strong-drive dip positions `lamb_shift / 2 +- Omega / 2`, lower first.
pub fn ats_dip_positions(system: &System) -> (f64, f64) {
    let centre = lamb_shift(system) / 2.0;
    let half = system.emitter.omega_rabi / 2.0;
    (centre - half, centre + half)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRecord {
    pub delta_k: f64,
    pub omega_rabi: f64,
    pub t: (f64, f64),
    pub r: (f64, f64),
    #[serde(rename = "T")]
    pub trans: f64,
    #[serde(rename = "R")]
    pub refl: f64,
}

/// Sampled spectrum. Records are ordered with `omega_rabi` outer and
/// `delta_k` inner; grid points outside the passband are dropped and
/// counted in `skipped`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    pub dk_axis: Vec<f64>,
    pub omega_axis: Vec<f64>,
    pub records: Vec<SpectrumRecord>,
    pub skipped: usize,
}

impl SpectrumGrid {
    /// Records belonging to one drive strength.
    pub fn row(&self, omega_rabi: f64) -> Vec<SpectrumRecord> {
        self.records
            .iter()
            .filter(|r| r.omega_rabi == omega_rabi)
            .copied()
            .collect()
    }
}

fn sweep_row(system: &System, dk_grid: &[f64], band: Band) -> (Vec<SpectrumRecord>, usize) {
    let mut out = Vec::with_capacity(dk_grid.len());
    let mut skipped = 0;
    for &dk in dk_grid {
        match amplitudes(system, system.emitter.omega_e + dk, band) {
            Ok((t, r)) => out.push(SpectrumRecord {
                delta_k: dk,
                omega_rabi: system.emitter.omega_rabi,
                t: (t.re, t.im),
                r: (r.re, r.im),
                trans: t.norm_sqr(),
                refl: r.norm_sqr(),
            }),
            Err(_) => skipped += 1,
        }
    }
    (out, skipped)
}

/// Transmission spectrum versus detuning `Delta_k = omega - omega_e`.
pub fn sweep_spectrum(system: &System, dk_grid: &[f64], band: Band) -> Result<SpectrumGrid> {
    let (records, skipped) = sweep_row(system, dk_grid, band);
    if records.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(SpectrumGrid {
        dk_axis: dk_grid.to_vec(),
        omega_axis: vec![system.emitter.omega_rabi],
        records,
        skipped,
    })
}

/// Transmission over a (`Delta_k`, `Omega`) grid. Rows are evaluated in
/// parallel and assembled in grid order.
pub fn sweep_contour(
    system: &System,
    dk_grid: &[f64],
    omega_grid: &[f64],
    band: Band,
) -> Result<SpectrumGrid> {
    let rows = omega_grid
        .par_iter()
        .map(|&om| Ok(sweep_row(&system.with_omega_rabi(om)?, dk_grid, band)))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(dk_grid.len() * omega_grid.len());
    let mut skipped = 0;
    for (row, s) in rows {
        records.extend(row);
        skipped += s;
    }
    if records.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(SpectrumGrid {
        dk_axis: dk_grid.to_vec(),
        omega_axis: omega_grid.to_vec(),
        records,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Dip,
    Peak,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineshapeFeature {
    pub kind: FeatureKind,
    pub position: f64,
    /// `1 - T_min` for dips, `T_max` for peaks.
    pub depth: f64,
    pub fwhm: f64,
    /// Left half-width over right half-width.
    pub asymmetry: f64,
}

/// Finds dips (local minima with `T < 0.5`) and peaks (local maxima with
/// `T > 0.5` lying between two dips) in one spectrum row.
///
/// Widths are measured at half prominence: halfway between the extremum and
/// the lower of the two bounding shoulders (the highest point reached before
/// the curve passes the extremum level again on each side). Crossings are
/// linearly interpolated. For an isolated dip recovering to T = 1 this is the
/// usual half-depth width.
pub fn extract_features(x: &[f64], y: &[f64]) -> Result<Vec<LineshapeFeature>> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "axis has {} points but values have {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument(
            "feature extraction needs at least 3 points".into(),
        ));
    }
    let neg: Vec<f64> = y.iter().map(|v| -v).collect();
    let dips: Vec<LineshapeFeature> = extrema(x, y)
        .into_iter()
        .filter(|&i| y[i] < 0.5)
        .map(|i| {
            let (fwhm, asym) = width(x, y, i);
            LineshapeFeature {
                kind: FeatureKind::Dip,
                position: x[i],
                depth: 1.0 - y[i],
                fwhm,
                asymmetry: asym,
            }
        })
        .collect();

    let mut out = Vec::new();
    for w in extrema(x, &neg).into_iter().filter(|&i| y[i] > 0.5) {
        let between = dips.iter().any(|d| d.position < x[w]) && dips.iter().any(|d| d.position > x[w]);
        if between {
            let (fwhm, asym) = width(x, &neg, w);
            out.push(LineshapeFeature {
                kind: FeatureKind::Peak,
                position: x[w],
                depth: y[w],
                fwhm,
                asymmetry: asym,
            });
        }
    }
    out.extend(dips);
    out.sort_by(|a, b| a.position.total_cmp(&b.position));
    Ok(out)
}

/// Indices of strict local minima; a flat bottom is reported once at its
/// centre.
fn extrema(x: &[f64], y: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        if y[i] < y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] > y[i] {
                out.push((i + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Half-prominence width and asymmetry of the minimum at `i`.
fn width(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let n = y.len();
    let floor = y[i];
    let mut left_top = floor;
    let mut j = i;
    while j > 0 && y[j - 1] >= floor {
        j -= 1;
        left_top = left_top.max(y[j]);
    }
    let mut right_top = floor;
    let mut j = i;
    while j + 1 < n && y[j + 1] >= floor {
        j += 1;
        right_top = right_top.max(y[j]);
    }
    let half = floor + (left_top.min(right_top) - floor) / 2.0;

    let mut j = i;
    while j > 0 && y[j] < half {
        j -= 1;
    }
    let xl = if y[j] < half {
        x[j]
    } else {
        x[j] + (half - y[j]) * (x[j + 1] - x[j]) / (y[j + 1] - y[j])
    };
    let mut j = i;
    while j + 1 < n && y[j] < half {
        j += 1;
    }
    let xr = if y[j] < half {
        x[j]
    } else {
        x[j - 1] + (half - y[j - 1]) * (x[j] - x[j - 1]) / (y[j] - y[j - 1])
    };
    let (l, r) = (x[i] - xl, xr - x[i]);
    let asym = if r > 0.0 { l / r } else { f64::INFINITY };
    (xr - xl, asym)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bands::momentum_from_energy;
    use crate::linspace;
    use crate::params::{validate, CouplingConfig, EmitterParams, WaveguideParams};

    fn system(delta: f64, coupling: CouplingConfig, omega_rabi: f64, g: f64) -> System {
        let em = EmitterParams {
            omega_e: 1.5,
            delta_c: 0.0,
            omega_rabi,
            g,
            x1: 20,
        };
        validate(WaveguideParams::new(delta), em, coupling).unwrap()
    }

    fn k_at(s: &System, w: f64) -> f64 {
        momentum_from_energy(w, &s.waveguide, Band::Upper).unwrap()
    }

    #[test]
    fn weak_field_poles() {
        let s = system(0.5, CouplingConfig::A, 0.0, 0.2);
        let k = k_at(&s, 1.5);
        let p = poles(&s, k, Band::Upper).unwrap();
        let width = 0.04 * 1.5 / (2.0 * 0.75 * k.sin());
        assert!((p.pole_plus - Complex64::new(0.0, width)).norm() < 1e-14);
        assert_eq!(p.pole_minus.norm(), 0.0);
    }

    #[test]
    fn strong_field_poles_approach_half_rabi() {
        let s = system(0.5, CouplingConfig::A, 2.0, 0.01);
        let k = k_at(&s, 1.5);
        let p = poles(&s, k, Band::Upper).unwrap();
        assert!((p.pole_plus.re - 1.0).abs() < 1e-6);
        assert!((p.pole_minus.re + 1.0).abs() < 1e-6);
        assert!(p.pole_plus.im >= 0.0 && p.pole_minus.im >= 0.0);
    }

    #[test]
    fn weak_field_ab_pole_sits_at_lamb_shift() {
        for delta in [0.5, -0.5] {
            let s = system(delta, CouplingConfig::ab(0.5).unwrap(), 0.0, 0.2);
            let p = poles(&s, k_at(&s, 1.5), Band::Upper).unwrap();
            let nonzero = if p.pole_plus.norm() > p.pole_minus.norm() {
                p.pole_plus
            } else {
                p.pole_minus
            };
            assert!((nonzero.re - lamb_shift(&s)).abs() < 1e-14);
        }
    }

    #[test]
    fn poles_need_resonant_drive() {
        let mut s = system(0.5, CouplingConfig::A, 0.1, 0.2);
        s.emitter.delta_c = 0.01;
        assert!(matches!(
            poles(&s, 1.0, Band::Upper),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn regimes() {
        let s = system(0.5, CouplingConfig::A, 0.0, 0.2);
        let k = k_at(&s, 1.5);
        assert_eq!(classify_regime(&s, k, Band::Upper).label, Regime::Lorentzian);
        let strong = classify_regime(&s.with_omega_rabi(0.4).unwrap(), k, Band::Upper);
        assert_eq!(strong.label, Regime::Ats);
        // Hand value: 0.4 * 2 * 0.75 * sin k / (0.04 * 1.5).
        let expect = 0.4 * 1.5 * k.sin() / 0.06;
        assert!((strong.ratio - expect).abs() < 1e-12);
        let weak = classify_regime(&s.with_omega_rabi(0.009).unwrap(), k, Band::Upper);
        assert!((weak.ratio - 0.009 * 1.5 * k.sin() / 0.06).abs() < 1e-12);
        assert!(weak.ratio > 0.2 && weak.ratio < 0.3);
        assert_eq!(
            classify_regime(&s.with_omega_rabi(0.05).unwrap(), k, Band::Upper).label,
            Regime::Eit
        );
    }

    #[test]
    fn lamb_shift_examples() {
        let ab = CouplingConfig::ab(0.5).unwrap();
        assert_eq!(lamb_shift(&system(0.5, CouplingConfig::A, 0.0, 0.2)), 0.0);
        assert_eq!(lamb_shift(&system(0.5, CouplingConfig::B, 0.0, 0.2)), 0.0);
        assert!((lamb_shift(&system(0.5, ab, 0.0, 0.2)) - 1.0 / 150.0).abs() < 1e-15);
        assert!((lamb_shift(&system(-0.5, ab, 0.0, 0.2)) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn ats_positions() {
        let (lo, hi) = ats_dip_positions(&system(0.5, CouplingConfig::A, 0.4, 0.2));
        assert_eq!((lo, hi), (-0.2, 0.2));
        let (lo, hi) = ats_dip_positions(&system(0.5, CouplingConfig::ab(0.5).unwrap(), 0.4, 0.2));
        assert!((lo - (1.0 / 300.0 - 0.2)).abs() < 1e-15);
        assert!((hi - (1.0 / 300.0 + 0.2)).abs() < 1e-15);
        let (lo2, hi2) =
            ats_dip_positions(&system(0.5, CouplingConfig::ab(0.5).unwrap(), 0.8, 0.2));
        assert!(((hi2 - lo2) - 2.0 * (hi - lo)).abs() < 1e-15);
    }

    #[test]
    fn lorentzian_spectrum_has_single_central_dip() {
        let s = system(0.5, CouplingConfig::A, 0.0, 0.1);
        let grid = linspace(-0.2, 0.2, 401);
        let spec = sweep_spectrum(&s, &grid, Band::Upper).unwrap();
        let t: Vec<f64> = spec.records.iter().map(|r| r.trans).collect();
        let feats = extract_features(&grid, &t).unwrap();
        assert_eq!(feats.len(), 1);
        assert_eq!(feats[0].kind, FeatureKind::Dip);
        assert!(feats[0].position.abs() < 1e-12);
        assert!(t[200] < 1e-20);
        assert!(t[0] > 0.9 && t[400] > 0.9);
    }

    #[test]
    fn a_spectrum_nearly_symmetric_at_resonant_drive() {
        // The potential is odd in the detuning at Delta_c = 0, but omega_k and
        // sin k vary across the grid, so T is only symmetric near resonance.
        use crate::scattering::effective_potential;
        for dk in linspace(0.001, 0.3, 300) {
            let a = effective_potential(dk, 0.0, 0.1, 0.2);
            let b = effective_potential(-dk, 0.0, 0.1, 0.2);
            if let (Ok(a), Ok(b)) = (a, b) {
                assert!((a.v + b.v).abs() <= 1e-12 * a.v.abs().max(1.0));
            }
        }
        let s = system(0.5, CouplingConfig::A, 0.1, 0.2);
        let grid = linspace(-0.01, 0.01, 201);
        let spec = sweep_spectrum(&s, &grid, Band::Upper).unwrap();
        let n = spec.records.len();
        for i in 0..n {
            let a = spec.records[i].trans;
            let b = spec.records[n - 1 - i].trans;
            assert!((a - b).abs() < 2e-3);
        }
    }

    #[test]
    fn ats_dips_match_half_rabi() {
        let s = system(0.5, CouplingConfig::A, 0.4, 0.2);
        let grid = linspace(-0.45, 0.45, 10_000);
        let spec = sweep_spectrum(&s, &grid, Band::Upper).unwrap();
        let t: Vec<f64> = spec.records.iter().map(|r| r.trans).collect();
        let dips: Vec<_> = extract_features(&grid, &t)
            .unwrap()
            .into_iter()
            .filter(|f| f.kind == FeatureKind::Dip)
            .collect();
        assert_eq!(dips.len(), 2);
        assert!((dips[0].position + 0.2).abs() < 5e-3);
        assert!((dips[1].position - 0.2).abs() < 5e-3);
    }

    #[test]
    fn ats_dip_error_shrinks_with_grid() {
        let s = system(0.5, CouplingConfig::A, 0.4, 0.2);
        let err = |n: usize| {
            let grid = linspace(-0.45, 0.45, n);
            let spec = sweep_spectrum(&s, &grid, Band::Upper).unwrap();
            let t: Vec<f64> = spec.records.iter().map(|r| r.trans).collect();
            let d = extract_features(&grid, &t).unwrap();
            let d = d.iter().find(|f| f.kind == FeatureKind::Dip).unwrap();
            (d.position + 0.2).abs()
        };
        // Dip positions are exact zeros of T, so the error is bounded by the
        // grid spacing.
        assert!(err(1001) <= 0.9 / 1000.0);
        assert!(err(2001) <= 0.9 / 2000.0);
    }

    #[test]
    fn contour_row_matches_spectrum() {
        let s = system(0.5, CouplingConfig::A, 0.0, 0.2);
        let dk = linspace(-0.1, 0.1, 41);
        let om = linspace(0.0, 0.4, 5);
        let c = sweep_contour(&s, &dk, &om, Band::Upper).unwrap();
        let spec = sweep_spectrum(&s, &dk, Band::Upper).unwrap();
        assert_eq!(c.row(0.0), spec.records);
        assert_eq!(c.records.len(), 41 * 5);
        assert_eq!(c.records[41].omega_rabi, om[1]);
    }

    #[test]
    fn sweeps_skip_out_of_band_points() {
        let s = system(0.5, CouplingConfig::A, 0.0, 0.2);
        let spec = sweep_spectrum(&s, &linspace(-1.0, 0.0, 11), Band::Upper).unwrap();
        assert!(spec.skipped > 0);
        assert!(spec.records.iter().all(|r| r.delta_k >= -0.5));
        assert_eq!(
            sweep_spectrum(&s, &[-0.8, 0.6], Band::Upper),
            Err(Error::EmptyGrid)
        );
    }

    #[test]
    fn unit_transmission_at_transparency() {
        let s = system(0.5, CouplingConfig::A, 0.2, 0.2);
        let spec = sweep_spectrum(&s, &[0.0], Band::Upper).unwrap();
        assert!((spec.records[0].trans - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feature_extraction_basics() {
        assert!(extract_features(&[0.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(extract_features(&[0.0, 1.0, 2.0], &[1.0, 1.0]).is_err());
        assert!(extract_features(&[0.0, 1.0, 2.0], &[1.0, 0.9, 1.0])
            .unwrap()
            .is_empty());
        // Triangle dip of depth 1 and half-depth width 1.
        let x = linspace(-2.0, 2.0, 401);
        let y: Vec<f64> = x.iter().map(|v| v.abs().min(1.0)).collect();
        let f = extract_features(&x, &y).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f[0].fwhm - 1.0).abs() < 1e-12);
        assert!((f[0].asymmetry - 1.0).abs() < 1e-12);
        assert!((f[0].depth - 1.0).abs() < 1e-12);
    }

    #[test]
    fn peak_between_dips() {
        let s = system(0.5, CouplingConfig::A, 0.4, 0.2);
        let grid = linspace(-0.45, 0.45, 2001);
        let t: Vec<f64> = sweep_spectrum(&s, &grid, Band::Upper)
            .unwrap()
            .records
            .iter()
            .map(|r| r.trans)
            .collect();
        let f = extract_features(&grid, &t).unwrap();
        let kinds: Vec<_> = f.iter().map(|f| f.kind).collect();
        assert_eq!(kinds, [FeatureKind::Dip, FeatureKind::Peak, FeatureKind::Dip]);
        assert!(f[1].position.abs() < 1e-12);
        assert!(f.iter().all(|f| f.fwhm > 0.0 && f.asymmetry > 0.0));
    }
}
