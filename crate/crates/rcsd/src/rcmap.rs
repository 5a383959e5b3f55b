//! The reaction-coordinate mapping.
//!
//! Each Lorentzian peak of the original spectral density becomes one
//! collective mode with frequency Ω and coupling g fixed by the first and
//! inverse moments of the peak,
//!
//!   g² = (1/Ω) ∫₀^∞ ω J(ω) dω,   Ω² = ∫₀^∞ ω J(ω) dω / ∫₀^∞ J(ω)/ω dω,
//!
//! and the residual bath seen by that mode carries the mapped density
//!
//!   J_rc(ω) = 2 g² J(ω) / (W(ω)² + π² J(ω)²),
//!
//! with W the Cauchy principal-value transform of the odd extension of J.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::Pchip;
use crate::specden::{cauchy_transform, moment_integrals, LorentzianPeak, QuadratureConfig};

/// A mapped collective mode. The truncation dimension is assigned
/// separately from the benchmark table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionCoordinate {
    frequency: f64,
    coupling: f64,
    peak: LorentzianPeak,
    dim: Option<usize>,
}

impl ReactionCoordinate {
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn peak(&self) -> &LorentzianPeak {
        &self.peak
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// Assign the ladder truncation; at least two levels.
    pub fn with_dimension(mut self, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Domain(format!("RC dimension must be at least 2, got {m}")));
        }
        self.dim = Some(m);
        Ok(self)
    }
}

/// Ω and g from the moment integrals of a single peak.
pub fn rc_parameters(peak: &LorentzianPeak, cfg: &QuadratureConfig) -> Result<ReactionCoordinate> {
    let m = moment_integrals(peak, cfg)?;
    let frequency = (m.first / m.inverse).sqrt();
    let coupling = (m.first / frequency).sqrt();
    Ok(ReactionCoordinate { frequency, coupling, peak: *peak, dim: None })
}

/// Residual spectral density of one mapped mode, evaluated by direct
/// quadrature of the principal-value transform.
pub fn mapped_sd_direct(rc: &ReactionCoordinate, omega: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::Domain(format!("mapped SD requires ω > 0, got {omega}")));
    }
    let j = rc.peak.evaluate(omega);
    let w = cauchy_transform(&rc.peak, omega, cfg)?.value;
    let g2 = rc.coupling * rc.coupling;
    Ok(2.0 * g2 * j / (w * w + std::f64::consts::PI * std::f64::consts::PI * j * j))
}

const GRID_MIN: f64 = 1e-3;
const GRID_MAX: f64 = 1e2;
const GRID_POINTS: usize = 512;

/// Mapped spectral density with the principal-value transform cached on a
/// log-spaced grid.
///
/// W is smooth on [10⁻³, 10²] and is the only expensive factor, so rate
/// evaluations at many Bohr frequencies interpolate W (monotone cubic in
/// ln ω) and keep J exact. Below the grid the density is linear with the
/// fitted low-frequency slope; above it the direct quadrature takes over.
#[derive(Debug, Clone)]
pub struct MappedSd {
    rc: ReactionCoordinate,
    w_interp: Pchip,
    slope: f64,
    cfg: QuadratureConfig,
}

impl MappedSd {
    pub fn new(rc: &ReactionCoordinate, cfg: &QuadratureConfig) -> Result<Self> {
        let ln_min = GRID_MIN.ln();
        let ln_max = GRID_MAX.ln();
        let mut xs = Vec::with_capacity(GRID_POINTS);
        let mut ws = Vec::with_capacity(GRID_POINTS);
        for i in 0..GRID_POINTS {
            let ln_w = ln_min + (ln_max - ln_min) * i as f64 / (GRID_POINTS - 1) as f64;
            xs.push(ln_w);
            ws.push(cauchy_transform(&rc.peak, ln_w.exp(), cfg)?.value);
        }
        let w_interp = Pchip::new(xs, ws);

        let mut mapped = MappedSd { rc: *rc, w_interp, slope: 0.0, cfg: *cfg };
        mapped.slope = mapped.fit_low_frequency_slope();
        Ok(mapped)
    }

    /// Least-squares slope through the origin of J_rc over ω ∈ [10⁻³, 10⁻²],
    /// taken at the cached grid points in that window.
    fn fit_low_frequency_slope(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        let ln_min = self.w_interp.x_min();
        let ln_max = self.w_interp.x_max();
        for i in 0..GRID_POINTS {
            let omega = (ln_min + (ln_max - ln_min) * i as f64 / (GRID_POINTS - 1) as f64).exp();
            if omega > 1e-2 {
                break;
            }
            num += self.evaluate_on_grid(omega) * omega;
            den += omega * omega;
        }
        num / den
    }

    fn evaluate_on_grid(&self, omega: f64) -> f64 {
        let j = self.rc.peak.evaluate(omega);
        let w = self.w_interp.eval(omega.ln());
        let g2 = self.rc.coupling * self.rc.coupling;
        2.0 * g2 * j / (w * w + std::f64::consts::PI * std::f64::consts::PI * j * j)
    }

    /// J_rc(ω) for ω > 0.
    pub fn evaluate(&self, omega: f64) -> f64 {
        if omega < GRID_MIN {
            self.slope * omega
        } else if omega > GRID_MAX {
            // beyond the cache; Bohr frequencies never reach here for the
            // sampled parameter box, but stay correct if a caller does
            mapped_sd_direct(&self.rc, omega, &self.cfg).unwrap_or(0.0)
        } else {
            self.evaluate_on_grid(omega)
        }
    }

    /// Fitted dJ_rc/dω at ω = 0⁺; owns the ω = 0 limit of the thermal rates.
    pub fn low_frequency_slope(&self) -> f64 {
        self.slope
    }

    pub fn rc(&self) -> &ReactionCoordinate {
        &self.rc
    }
}

/// One λ row of the truncation-dimension table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LambdaBin {
    /// Exactly this coupling value.
    Point(f64),
    /// Half-open interval (lo, hi].
    HalfOpen { lo: f64, hi: f64 },
}

impl LambdaBin {
    fn contains(&self, lambda: f64) -> bool {
        match *self {
            LambdaBin::Point(v) => (lambda - v).abs() <= 1e-12,
            LambdaBin::HalfOpen { lo, hi } => lambda > lo && lambda <= hi,
        }
    }
}

/// Minimum RC dimensions over the sampled (λ, ν) box, benchmarked on the
/// pure-dephasing model and valid for any width in [0.15, 0.25].
///
/// Rows are λ bins ordered from the strongest coupling down to the point
/// row at λ = 0.1; columns are ν bins with edges
/// 0.54, 0.57, 0.7, 0.75, 0.88, 1.2, 1.8 and an unbounded last column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionTable {
    nu_edges: Vec<f64>,
    rows: Vec<(LambdaBin, Vec<usize>)>,
    nu_max: f64,
    gamma_range: (f64, f64),
}

pub const DIMENSION_TABLE_FORMAT: &str = "rcdim-table v1";

impl DimensionTable {
    /// The benchmarked table shipped with the crate.
    pub fn shipped() -> Self {
        let rows = vec![
            (LambdaBin::HalfOpen { lo: 0.21, hi: 0.25 }, vec![10, 8, 7, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.2, hi: 0.21 }, vec![9, 8, 7, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.19, hi: 0.2 }, vec![9, 7, 7, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.18, hi: 0.19 }, vec![9, 7, 6, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.14, hi: 0.18 }, vec![8, 7, 6, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.13, hi: 0.14 }, vec![7, 7, 6, 6, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.12, hi: 0.13 }, vec![7, 7, 6, 5, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.11, hi: 0.12 }, vec![7, 6, 6, 5, 5, 4, 3]),
            (LambdaBin::HalfOpen { lo: 0.1, hi: 0.11 }, vec![7, 6, 5, 5, 5, 4, 3]),
            (LambdaBin::Point(0.1), vec![7, 6, 5, 5, 4, 4, 3]),
        ];
        DimensionTable {
            nu_edges: vec![0.54, 0.57, 0.7, 0.75, 0.88, 1.2, 1.8],
            rows,
            nu_max: 2.0,
            gamma_range: (0.15, 0.25),
        }
    }

    pub fn nu_edges(&self) -> &[f64] {
        &self.nu_edges
    }

    pub fn nu_max(&self) -> f64 {
        self.nu_max
    }

    pub fn rows(&self) -> &[(LambdaBin, Vec<usize>)] {
        &self.rows
    }

    fn nu_column(&self, nu: f64) -> Result<usize> {
        if nu < self.nu_edges[0] || nu > self.nu_max {
            return Err(Error::TableLookup(format!(
                "ν = {nu} outside [{}, {}]",
                self.nu_edges[0], self.nu_max
            )));
        }
        // last column is everything at or beyond the last edge
        Ok(self
            .nu_edges
            .iter()
            .skip(1)
            .position(|e| nu < *e)
            .unwrap_or(self.nu_edges.len() - 1))
    }

    /// Table entry for the (λ-bin, ν-bin) containing the peak.
    pub fn lookup(&self, peak: &LorentzianPeak) -> Result<usize> {
        let (g_lo, g_hi) = self.gamma_range;
        if peak.gamma() < g_lo || peak.gamma() > g_hi {
            return Err(Error::TableLookup(format!(
                "γ = {} outside benchmarked range [{g_lo}, {g_hi}]",
                peak.gamma()
            )));
        }
        let col = self.nu_column(peak.nu())?;
        // search from the weak-coupling end so the point row wins ties
        for (bin, cells) in self.rows.iter().rev() {
            if bin.contains(peak.lambda()) {
                return Ok(cells[col]);
            }
        }
        Err(Error::TableLookup(format!("λ = {} outside [0.1, 0.25]", peak.lambda())))
    }

    /// Versioned plain-text grid: rows are λ bins, columns ν bins.
    pub fn to_text(&self) -> String {
        let mut s = format!("{DIMENSION_TABLE_FORMAT}\n");
        s.push_str(&format!(
            "nu-edges: {}\n",
            self.nu_edges.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
        ));
        s.push_str(&format!("nu-max: {}\n", self.nu_max));
        s.push_str(&format!("gamma-range: {} {}\n", self.gamma_range.0, self.gamma_range.1));
        for (bin, cells) in &self.rows {
            let head = match bin {
                LambdaBin::Point(v) => format!("lambda point {v}"),
                LambdaBin::HalfOpen { lo, hi } => format!("lambda {lo} {hi}"),
            };
            let cells = cells.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ");
            s.push_str(&format!("{head} : {cells}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let parse_err = |line: usize, msg: String| Error::Parse { line: line + 1, msg };

        let (i, header) = lines
            .next()
            .ok_or_else(|| parse_err(0, "empty table file".into()))?;
        if header.trim() != DIMENSION_TABLE_FORMAT {
            return Err(parse_err(i, format!("expected header `{DIMENSION_TABLE_FORMAT}`")));
        }

        let mut nu_edges = Vec::new();
        let mut nu_max = f64::NAN;
        let mut gamma_range = (f64::NAN, f64::NAN);
        let mut rows = Vec::new();

        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("nu-edges:") {
                nu_edges = rest
                    .split_whitespace()
                    .map(|t| t.parse::<f64>().map_err(|e| parse_err(i, format!("bad edge `{t}`: {e}"))))
                    .collect::<Result<_>>()?;
            } else if let Some(rest) = line.strip_prefix("nu-max:") {
                nu_max = rest.trim().parse().map_err(|e| parse_err(i, format!("bad nu-max: {e}")))?;
            } else if let Some(rest) = line.strip_prefix("gamma-range:") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(parse_err(i, "gamma-range needs two values".into()));
                }
                gamma_range = (
                    toks[0].parse().map_err(|e| parse_err(i, format!("bad gamma: {e}")))?,
                    toks[1].parse().map_err(|e| parse_err(i, format!("bad gamma: {e}")))?,
                );
            } else if let Some(rest) = line.strip_prefix("lambda") {
                let (head, cells_text) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(i, "row needs a `:` separator".into()))?;
                let head: Vec<&str> = head.split_whitespace().collect();
                let bin = match head.as_slice() {
                    ["point", v] => LambdaBin::Point(
                        v.parse().map_err(|e| parse_err(i, format!("bad point: {e}")))?,
                    ),
                    [lo, hi] => LambdaBin::HalfOpen {
                        lo: lo.parse().map_err(|e| parse_err(i, format!("bad bound: {e}")))?,
                        hi: hi.parse().map_err(|e| parse_err(i, format!("bad bound: {e}")))?,
                    },
                    _ => return Err(parse_err(i, format!("bad λ bin `{}`", head.join(" ")))),
                };
                let cells = cells_text
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|e| parse_err(i, format!("bad entry `{t}`: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                rows.push((bin, cells));
            } else {
                return Err(parse_err(i, format!("unrecognised line `{line}`")));
            }
        }

        if nu_edges.is_empty() || rows.is_empty() || !nu_max.is_finite() || !gamma_range.0.is_finite() {
            return Err(Error::Parse { line: 0, msg: "incomplete table file".into() });
        }
        let ncols = nu_edges.len();
        if rows.iter().any(|(_, cells)| cells.len() != ncols) {
            return Err(Error::Parse { line: 0, msg: "row width does not match edge count".into() });
        }
        Ok(DimensionTable { nu_edges, rows, nu_max, gamma_range })
    }
}

/// Truncation dimension for a peak from the benchmark table.
pub fn assign_rc_dimension(peak: &LorentzianPeak, table: &DimensionTable) -> Result<usize> {
    table.lookup(peak)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn peak(lambda: f64, gamma: f64, nu: f64) -> LorentzianPeak {
        LorentzianPeak::new(lambda, gamma, nu).unwrap()
    }

    #[test]
    fn rc_frequency_invariant_under_coupling_scale() {
        let cfg = QuadratureConfig::default();
        let a = rc_parameters(&peak(0.1, 0.2, 1.3), &cfg).unwrap();
        let b = rc_parameters(&peak(0.2, 0.2, 1.3), &cfg).unwrap();
        assert_abs_diff_eq!(a.frequency(), b.frequency(), epsilon = 1e-10);
        // g scales linearly with λ
        assert_abs_diff_eq!(b.coupling() / a.coupling(), 2.0, epsilon = 1e-8);
    }

    #[test]
    fn rc_parameters_reference_values() {
        // for this SD family Ω = ν exactly and g = sqrt(πλ²/(2ν))
        let cfg = QuadratureConfig::default();
        let rc = rc_parameters(&peak(0.25, 0.25, 1.0), &cfg).unwrap();
        assert_abs_diff_eq!(rc.frequency(), 1.0, epsilon = 1e-9);
        let g_expect = (std::f64::consts::PI * 0.25 * 0.25 / 2.0).sqrt();
        assert_abs_diff_eq!(rc.coupling(), g_expect, epsilon = 1e-9);
        assert_abs_diff_eq!(rc.coupling(), 0.3133, epsilon = 1e-4);
    }

    #[test]
    fn rc_parameters_round_trip_through_moments() {
        let cfg = QuadratureConfig::default();
        for (l, g, n) in [(0.1, 0.15, 2.0), (0.22, 0.24, 0.9)] {
            let p = peak(l, g, n);
            let rc = rc_parameters(&p, &cfg).unwrap();
            let m = moment_integrals(&p, &cfg).unwrap();
            let g2 = rc.coupling() * rc.coupling();
            assert_abs_diff_eq!(g2 * rc.frequency(), m.first, epsilon = 1e-8 * m.first);
            assert_abs_diff_eq!(g2 / rc.frequency(), m.inverse, epsilon = 1e-8 * m.inverse);
        }
    }

    #[test]
    fn dimension_requires_at_least_two_levels() {
        let cfg = QuadratureConfig::default();
        let rc = rc_parameters(&peak(0.2, 0.2, 1.0), &cfg).unwrap();
        assert!(rc.with_dimension(1).is_err());
        assert_eq!(rc.with_dimension(5).unwrap().dim(), Some(5));
    }

    #[test]
    fn table_reproduces_printed_cells() {
        let t = DimensionTable::shipped();
        assert_eq!(t.lookup(&peak(0.24, 0.2, 0.55)).unwrap(), 10);
        assert_eq!(t.lookup(&peak(0.1, 0.2, 1.9)).unwrap(), 3);
        assert_eq!(t.lookup(&peak(0.15, 0.2, 1.0)).unwrap(), 5);
        // remaining corner cells
        assert_eq!(t.lookup(&peak(0.24, 0.2, 1.9)).unwrap(), 3);
        assert_eq!(t.lookup(&peak(0.1, 0.2, 0.55)).unwrap(), 7);
    }

    #[test]
    fn table_lookup_is_total_and_monotone_on_the_box() {
        let t = DimensionTable::shipped();
        let lambdas: Vec<f64> = (0..=60).map(|i| 0.1 + 0.15 * i as f64 / 60.0).collect();
        let nus: Vec<f64> = (0..=73).map(|i| 0.54 + 1.46 * i as f64 / 73.0).collect();
        for &l in &lambdas {
            let mut prev = usize::MAX;
            for &n in &nus {
                let m = t.lookup(&peak(l, 0.2, n)).unwrap();
                assert!(m <= prev, "M must not increase with ν (λ = {l}, ν = {n})");
                prev = m;
            }
        }
        for &n in &nus {
            let mut prev = 0;
            for &l in &lambdas {
                let m = t.lookup(&peak(l, 0.2, n)).unwrap();
                assert!(m >= prev, "M must not decrease with λ (λ = {l}, ν = {n})");
                prev = m;
            }
        }
    }

    #[test]
    fn table_rejects_out_of_range_parameters() {
        let t = DimensionTable::shipped();
        assert!(t.lookup(&peak(0.3, 0.2, 1.0)).is_err());
        assert!(t.lookup(&peak(0.05, 0.2, 1.0)).is_err());
        assert!(t.lookup(&peak(0.2, 0.2, 2.5)).is_err());
        assert!(t.lookup(&peak(0.2, 0.2, 0.5)).is_err());
        assert!(t.lookup(&peak(0.2, 0.3, 1.0)).is_err());
    }

    #[test]
    fn table_text_round_trip() {
        let t = DimensionTable::shipped();
        let text = t.to_text();
        assert!(text.starts_with(DIMENSION_TABLE_FORMAT));
        let back = DimensionTable::from_text(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn table_parser_rejects_malformed_input() {
        assert!(DimensionTable::from_text("").is_err());
        assert!(DimensionTable::from_text("wrong header\n").is_err());
        let truncated = format!("{DIMENSION_TABLE_FORMAT}\nnu-edges: 0.5 1.0\n");
        assert!(DimensionTable::from_text(&truncated).is_err());
    }
}
