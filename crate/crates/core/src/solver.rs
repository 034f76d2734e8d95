//! Radial shooting for the regularized and hard-core `-g²/r⁴` potentials.
//!
//! Bound states are located by matching an inward-integrated decaying
//! solution to the regular interior solution. The interior is analytic for
//! the square well and integrated outward from `ψ(R_c) = 0` for the hard
//! core. Phase shifts come from outward integration at `E = k²` to a radius
//! where the tail is negligible.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::ode::{Propagation, Propagator, Sample, DEFAULT_RTOL};
use crate::quad;
use crate::rgflow::CutoffConfig;
use crate::roots::{bisect, sign_changes};

/// The two regularizations of the `-g²/r⁴` tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PotentialSpec {
    /// `-α_s²/R²` for `r < R`, `-g²/r⁴` for `r ≥ R`.
    Regularized { alpha_s: f64, r: f64, g: f64 },
    /// `ψ(R_c) = 0`, `-g²/r⁴` for `r > R_c`.
    HardCore { rc: f64, g: f64 },
}

impl PotentialSpec {
    pub fn regularized(alpha_s: f64, r: f64, g: f64) -> Result<Self> {
        if !(r > 0.0) || !(g >= 0.0) || !(alpha_s >= 0.0) {
            return Err(domain(format!(
                "regularized potential needs R > 0, g ≥ 0, α_s ≥ 0 (got R = {r}, g = {g}, α_s = {alpha_s})"
            )));
        }
        Ok(Self::Regularized { alpha_s, r, g })
    }

    pub fn hard_core(rc: f64, g: f64) -> Result<Self> {
        if !(rc > 0.0) || !(g >= 0.0) {
            return Err(domain(format!("hard core needs R_c > 0 and g ≥ 0 (got R_c = {rc}, g = {g})")));
        }
        Ok(Self::HardCore { rc, g })
    }

    pub fn from_config(config: &CutoffConfig) -> Self {
        Self::Regularized { alpha_s: config.alpha_s(), r: config.r(), g: config.g() }
    }

    pub fn g(&self) -> f64 {
        match *self {
            Self::Regularized { g, .. } | Self::HardCore { g, .. } => g,
        }
    }

    /// `R` or `R_c`.
    pub fn inner_radius(&self) -> f64 {
        match *self {
            Self::Regularized { r, .. } => r,
            Self::HardCore { rc, .. } => rc,
        }
    }

    /// Upper bound on κ from the potential minimum.
    pub fn kappa_bound(&self) -> f64 {
        match *self {
            Self::Regularized { alpha_s, r, g } => alpha_s.max(g / r) / r,
            Self::HardCore { rc, g } => g / (rc * rc),
        }
    }

    fn tail(&self) -> impl Fn(f64) -> f64 {
        let g2 = self.g() * self.g();
        move |r: f64| -g2 / (r * r * r * r)
    }
}

/// `V(r)`. The regularized potential takes the tail value at exactly `r = R`.
pub fn eval_potential(r: f64, spec: &PotentialSpec) -> Result<f64> {
    if !(r > 0.0) {
        return Err(domain(format!("radius must be positive, got {r}")));
    }
    match *spec {
        PotentialSpec::Regularized { alpha_s, r: cutoff, g } => {
            if r < cutoff {
                Ok(-alpha_s * alpha_s / (cutoff * cutoff))
            } else {
                Ok(-g * g / r.powi(4))
            }
        }
        PotentialSpec::HardCore { rc, g } => {
            if r < rc {
                Err(domain(format!("r = {r} lies inside the hard core R_c = {rc}")))
            } else {
                Ok(-g * g / r.powi(4))
            }
        }
    }
}

/// Numerical settings. `r_inf`, `r_max` and `r_match` override the default
/// outer start, phase-shift end and hard-core matching radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rtol: f64,
    pub scan_points: usize,
    pub max_scan_doublings: u32,
    pub root_rel_tol: f64,
    pub r_inf: Option<f64>,
    pub r_max: Option<f64>,
    pub r_match: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            scan_points: 200,
            max_scan_doublings: 3,
            root_rel_tol: 1e-10,
            r_inf: None,
            r_max: None,
            r_match: None,
        }
    }
}

impl SolverConfig {
    fn propagator(&self) -> Propagator {
        Propagator::new(self.rtol)
    }

    /// Radius where the bound-state solutions are matched.
    pub fn matching_radius(&self, spec: &PotentialSpec) -> f64 {
        match *spec {
            PotentialSpec::Regularized { r, .. } => r,
            PotentialSpec::HardCore { rc, g } => self.r_match.unwrap_or((2.0 * g).max(2.0 * rc)),
        }
    }

    /// Start of the inward integration, `max(25/κ, 10g, 5 r_match)`.
    pub fn outer_start(&self, kappa: f64, spec: &PotentialSpec) -> f64 {
        let rm = self.matching_radius(spec);
        self.r_inf.unwrap_or_else(|| (25.0 / kappa).max(10.0 * spec.g()).max(5.0 * rm))
    }

    /// End of the phase-shift integration, where `g²/r⁴ ≤ 10⁻¹⁰ k²`.
    pub fn phase_end(&self, k: f64, spec: &PotentialSpec) -> f64 {
        self.r_max.unwrap_or_else(|| {
            let tail = (spec.g() * spec.g() / (1e-10 * k * k)).powf(0.25);
            tail.max(4.0 * spec.inner_radius()).max(10.0 / k)
        })
    }
}

/// Samples of one radial integration. Stored values times
/// `exp(log_scale)` are the solution for the given initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub energy: f64,
    pub r: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub log_scale: f64,
    pub node_count: u32,
}

impl RadialSolution {
    /// Sign changes of the stored samples.
    pub fn sample_sign_changes(&self) -> u32 {
        let mut count = 0;
        let mut last = 0.0;
        for &p in &self.psi {
            if p != 0.0 {
                if last != 0.0 && p.signum() != last {
                    count += 1;
                }
                last = p.signum();
            }
        }
        count
    }
}

/// Integrate `ψ'' = (V - E)ψ` from `r_start` to `r_end` starting at `initial = (ψ, ψ')`.
/// The square-well edge is treated as a breakpoint.
pub fn integrate_radial(
    energy: f64,
    spec: &PotentialSpec,
    r_start: f64,
    r_end: f64,
    initial: (f64, f64),
) -> Result<RadialSolution> {
    integrate_radial_with(energy, spec, r_start, r_end, initial, &SolverConfig::default())
}

pub fn integrate_radial_with(
    energy: f64,
    spec: &PotentialSpec,
    r_start: f64,
    r_end: f64,
    initial: (f64, f64),
    config: &SolverConfig,
) -> Result<RadialSolution> {
    if r_start == r_end {
        return Err(domain("integration interval is empty"));
    }
    if !(r_start > 0.0) || !(r_end > 0.0) {
        return Err(domain("integration endpoints must be positive"));
    }
    if let PotentialSpec::HardCore { rc, .. } = *spec {
        if r_start < rc || r_end < rc {
            return Err(domain(format!("integration interval enters the hard core R_c = {rc}")));
        }
    }
    let prop = config.propagator();
    let mut breaks = vec![r_start];
    if let PotentialSpec::Regularized { r: cutoff, .. } = *spec {
        if (r_start - cutoff) * (r_end - cutoff) < 0.0 {
            breaks.push(cutoff);
        }
    }
    breaks.push(r_end);

    let mut samples: Vec<Sample> = Vec::new();
    let (mut psi, mut dpsi) = initial;
    let mut offset = 0.0;
    let mut nodes = 0;
    let mut last_sign = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        let v_piece = eval_potential(mid, spec)?;
        let mut rec = Vec::new();
        let out = match *spec {
            PotentialSpec::Regularized { r: cutoff, .. } if mid < cutoff => {
                prop.propagate(&|_| v_piece, energy, a, b, psi, dpsi, Some(&mut rec))?
            }
            _ => prop.propagate(&spec.tail(), energy, a, b, psi, dpsi, Some(&mut rec))?,
        };
        let skip = usize::from(!samples.is_empty());
        for &(r, p, d, ls) in rec.iter().skip(skip) {
            samples.push((r, p, d, ls + offset));
        }
        for &(_, p, _, _) in &rec {
            if p != 0.0 {
                if last_sign != 0.0 && p.signum() != last_sign {
                    nodes += 1;
                }
                last_sign = p.signum();
            }
        }
        psi = out.psi;
        dpsi = out.dpsi;
        offset += out.log_scale;
    }
    let log_scale = offset;
    let mut sol = RadialSolution {
        energy,
        r: Vec::with_capacity(samples.len()),
        psi: Vec::with_capacity(samples.len()),
        dpsi: Vec::with_capacity(samples.len()),
        log_scale,
        node_count: nodes,
    };
    for (r, p, d, ls) in samples {
        let f = (ls - log_scale).exp();
        sol.r.push(r);
        sol.psi.push(p * f);
        sol.dpsi.push(d * f);
    }
    Ok(sol)
}

/// Regular solution inside the square well at `E = -κ²`: `sin(qr)/q`,
/// `r`, or `sinh(|q|r)/|q|` for `q² = α_s²/R² - κ²` positive, zero, negative.
#[derive(Debug, Clone, Copy)]
struct WellSolution {
    q2: f64,
}

impl WellSolution {
    fn value_and_slope(&self, r: f64) -> (f64, f64) {
        let q2 = self.q2;
        let x2 = q2 * r * r;
        if x2.abs() < 1e-8 {
            (r * (1.0 - x2 / 6.0 + x2 * x2 / 120.0), 1.0 - x2 / 2.0 + x2 * x2 / 24.0)
        } else if q2 > 0.0 {
            let q = q2.sqrt();
            ((q * r).sin() / q, (q * r).cos())
        } else {
            let q = (-q2).sqrt();
            ((q * r).sinh() / q, (q * r).cosh())
        }
    }

    fn nodes_below(&self, r: f64) -> u32 {
        if self.q2 <= 0.0 {
            return 0;
        }
        let x = self.q2.sqrt() * r / PI;
        if x <= 0.0 {
            0
        } else {
            x.ceil() as u32 - 1
        }
    }
}

/// Interior (regular) and exterior (decaying) solutions at the matching radius.
struct Matching {
    rm: f64,
    inner: (f64, f64),
    outer: Propagation,
    outer_start: f64,
    inner_prop: Option<Propagation>,
    well: Option<WellSolution>,
}

fn match_solutions(
    kappa: f64,
    spec: &PotentialSpec,
    config: &SolverConfig,
    mut inner_rec: Option<&mut Vec<Sample>>,
    outer_rec: Option<&mut Vec<Sample>>,
) -> Result<Matching> {
    let prop = config.propagator();
    let energy = -kappa * kappa;
    let rm = config.matching_radius(spec);
    let r_inf = config.outer_start(kappa, spec);
    if r_inf <= rm {
        return Err(domain(format!("outer start {r_inf} must exceed the matching radius {rm}")));
    }
    let tail = spec.tail();
    let outer = prop.propagate(&tail, energy, r_inf, rm, 1.0, -kappa, outer_rec)?;
    let (inner, inner_prop, well) = match *spec {
        PotentialSpec::Regularized { alpha_s, r, .. } => {
            let well = WellSolution { q2: (alpha_s / r).powi(2) - kappa * kappa };
            if let Some(rec) = inner_rec.as_deref_mut() {
                let (p, d) = well.value_and_slope(r);
                rec.push((r, p, d, 0.0));
            }
            (well.value_and_slope(r), None, Some(well))
        }
        PotentialSpec::HardCore { rc, .. } => {
            let p = prop.propagate(&tail, energy, rc, rm, 0.0, 1.0, inner_rec)?;
            ((p.psi, p.dpsi), Some(p), None)
        }
    };
    Ok(Matching { rm, inner, outer, outer_start: r_inf, inner_prop, well })
}

/// `(ψ'/ψ)_outer - (ψ'/ψ)_inner` at the matching radius. A node of either
/// solution at that radius yields an infinite marker.
pub fn log_derivative_mismatch(kappa: f64, spec: &PotentialSpec) -> Result<f64> {
    log_derivative_mismatch_with(kappa, spec, &SolverConfig::default())
}

pub fn log_derivative_mismatch_with(kappa: f64, spec: &PotentialSpec, config: &SolverConfig) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(domain(format!("κ must be positive, got {kappa}")));
    }
    let m = match_solutions(kappa, spec, config, None, None)?;
    if m.outer.psi == 0.0 || m.inner.0 == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(m.outer.dpsi / m.outer.psi - m.inner.1 / m.inner.0)
}

/// Pole-free matching function `sin(θ_out - θ_in)` with
/// `θ = atan2(ψ, ψ'/k)` at the matching radius. Its zeros coincide with
/// those of the log-derivative mismatch.
pub fn matching_function(kappa: f64, spec: &PotentialSpec, config: &SolverConfig) -> Result<f64> {
    let m = match_solutions(kappa, spec, config, None, None)?;
    let k = kappa + 1.0 / m.rm;
    let (pi, di) = (m.inner.0, m.inner.1 / k);
    let (po, d_o) = (m.outer.psi, m.outer.dpsi / k);
    let ni = pi.hypot(di);
    let no = po.hypot(d_o);
    Ok((po * di - d_o * pi) / (ni * no))
}

/// One bound level. `nodes` counts zeros on `(0, ∞)`; for the hard core this
/// includes `ψ(R_c) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundState {
    pub kappa: f64,
    pub energy: f64,
    pub nodes: u32,
    pub rms_radius: f64,
    pub weakest: bool,
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Pieces of a matched bound-state wavefunction, expressed through the
/// logarithm of the factor that takes stored values to the unnormalized
/// solution whose interior part is the reference.
struct Assembled {
    nodes: u32,
    ln_norm: f64,
    ln_r2: f64,
    /// ln of the factor multiplying stored outer values.
    ln_outer_factor: f64,
    outer_sign: f64,
    matching: Matching,
}

fn assemble(kappa: f64, spec: &PotentialSpec, config: &SolverConfig) -> Result<Assembled> {
    assemble_recording(kappa, spec, config, None, None)
}

fn assemble_recording(
    kappa: f64,
    spec: &PotentialSpec,
    config: &SolverConfig,
    inner_rec: Option<&mut Vec<Sample>>,
    outer_rec: Option<&mut Vec<Sample>>,
) -> Result<Assembled> {
    // Integrating the regular hard-core solution far into the forbidden
    // region amplifies its growing component; assemble the wavefunction at
    // the outer turning point instead. The eigenvalue itself does not care.
    let config = match *spec {
        PotentialSpec::HardCore { rc, g } => {
            let turn = (g / kappa).sqrt();
            let rm = config.matching_radius(spec).min(turn.max(1.05 * rc));
            SolverConfig { r_match: Some(rm), ..*config }
        }
        PotentialSpec::Regularized { .. } => *config,
    };
    let m = match_solutions(kappa, spec, &config, inner_rec, outer_rec)?;
    let rm = m.rm;
    // Interior contribution in the interior's stored scale.
    let (inner_norm, inner_r2, inner_nodes) = match (*spec, m.well, m.inner_prop) {
        (PotentialSpec::Regularized { r, .. }, Some(well), _) => {
            let psi2 = |x: f64| well.value_and_slope(x).0.powi(2);
            let edge = well.value_and_slope(r).0.powi(2).max(r * r);
            let tol = 1e-13 * r * edge;
            let n0 = quad::integrate(psi2, 0.0, r, tol)?.value;
            let n2 = quad::integrate(|x| x * x * psi2(x), 0.0, r, tol * r * r)?.value;
            (n0, n2, well.nodes_below(r))
        }
        // The zero at the core radius counts as a node.
        (_, _, Some(p)) => (p.norm, p.r2_moment, p.nodes + 1),
        _ => unreachable!("interior solution is always present"),
    };
    // Scale the exterior onto the interior at the matching radius.
    let k = kappa + 1.0 / rm;
    let (pi, di) = m.inner;
    let (po, d_o) = (m.outer.psi, m.outer.dpsi);
    let ratio = if po.abs() * k >= d_o.abs() { pi / po } else { di / d_o };
    let ln_c = ratio.abs().ln();
    // Tail beyond the outer start, where ψ ∝ e^{-κr}: the starting value is
    // 1 in scale 0, i.e. exp(-log_scale) in the final stored scale.
    let a = m.outer_start;
    let tail_n0 = 1.0 / (2.0 * kappa);
    let tail_n2 = a * a / (2.0 * kappa) + a / (2.0 * kappa * kappa) + 1.0 / (4.0 * kappa.powi(3));
    let ln_tail = -2.0 * m.outer.log_scale;
    let ln_norm = log_sum_exp(&[
        inner_norm.ln(),
        2.0 * ln_c + m.outer.norm.ln(),
        2.0 * ln_c + ln_tail + tail_n0.ln(),
    ]);
    let ln_r2 = log_sum_exp(&[
        inner_r2.ln(),
        2.0 * ln_c + m.outer.r2_moment.ln(),
        2.0 * ln_c + ln_tail + tail_n2.ln(),
    ]);
    Ok(Assembled {
        nodes: inner_nodes + m.outer.nodes,
        ln_norm,
        ln_r2,
        ln_outer_factor: ln_c,
        outer_sign: ratio.signum(),
        matching: m,
    })
}

/// Nodes of the regular zero-energy solution on `(0, ∞)`, by outward
/// integration to `10³ max(g, R)` and linear extrapolation beyond.
pub fn zero_energy_nodes(spec: &PotentialSpec, config: &SolverConfig) -> Result<u32> {
    let prop = config.propagator();
    let tail = spec.tail();
    let (start, initial, inner_nodes) = match *spec {
        PotentialSpec::Regularized { alpha_s, r, .. } => {
            let well = WellSolution { q2: (alpha_s / r).powi(2) };
            (r, well.value_and_slope(r), well.nodes_below(r))
        }
        PotentialSpec::HardCore { rc, .. } => (rc, (0.0, 1.0), 0),
    };
    let far = 1e3 * spec.g().max(start);
    let out = prop.propagate(&tail, 0.0, start, far, initial.0, initial.1, None)?;
    // Beyond `far` the solution is a straight line to within O(g²/far²).
    let extra = u32::from(out.psi * out.dpsi < 0.0);
    Ok(inner_nodes + out.nodes + extra)
}

/// All bound states with `κ ∈ (10⁻⁶/g, κ_bound]`, deepest first.
pub fn bound_states(spec: &PotentialSpec) -> Result<Vec<BoundState>> {
    bound_states_with(spec, &SolverConfig::default())
}

pub fn bound_states_with(spec: &PotentialSpec, config: &SolverConfig) -> Result<Vec<BoundState>> {
    let kappas = bound_state_kappas(spec, config)?;
    let mut states = kappas
        .par_iter()
        .map(|&kappa| {
            let a = assemble(kappa, spec, config)?;
            Ok(BoundState {
                kappa,
                energy: -kappa * kappa,
                nodes: a.nodes,
                rms_radius: (a.ln_r2 - a.ln_norm).exp().sqrt(),
                weakest: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(last) = states.last_mut() {
        last.weakest = true;
    }
    Ok(states)
}

/// Bound-state κ values, descending.
pub fn bound_state_kappas(spec: &PotentialSpec, config: &SolverConfig) -> Result<Vec<f64>> {
    let g = spec.g();
    if g == 0.0 && matches!(spec, PotentialSpec::HardCore { .. }) {
        return Ok(Vec::new());
    }
    let length = if g > 0.0 { g } else { spec.inner_radius() };
    let k_min = 1e-6 / length;
    let k_max = spec.kappa_bound() * (1.0 + 1e-6);
    if !(k_max > k_min) {
        return Ok(Vec::new());
    }
    let expected = zero_energy_nodes(spec, config)? as usize;
    let mut points = config.scan_points.max(2);
    let mut best: Vec<f64> = Vec::new();
    for _ in 0..=config.max_scan_doublings {
        let ratio = (k_max / k_min).ln() / (points - 1) as f64;
        let grid: Vec<f64> = (0..points)
            .map(|i| if i == points - 1 { k_max } else { k_min * (ratio * i as f64).exp() })
            .collect();
        let values = grid
            .par_iter()
            .map(|&k| matching_function(k, spec, config))
            .collect::<Result<Vec<_>>>()?;
        let brackets = sign_changes(&values);
        let roots = brackets
            .par_iter()
            .map(|&i| {
                bisect(
                    |k| matching_function(k, spec, config).unwrap_or(f64::NAN),
                    grid[i],
                    grid[i + 1],
                    0.0,
                    config.root_rel_tol,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        if roots.len() > best.len() {
            best = roots;
        }
        if best.len() >= expected {
            break;
        }
        points *= 2;
    }
    best.sort_by(|a, b| b.total_cmp(a));
    Ok(best)
}

/// A normalized bound-state wavefunction that can be evaluated anywhere.
#[derive(Debug, Clone)]
pub struct Wavefunction {
    spec: PotentialSpec,
    kappa: f64,
    config: SolverConfig,
    /// `(r, ψ, ψ')` of the normalized solution, ascending in `r`, outside
    /// any analytic interior.
    knots: Vec<(f64, f64, f64)>,
    /// Normalization applied to the analytic well solution.
    well_factor: f64,
    outer_start: f64,
}

pub fn wavefunction(spec: &PotentialSpec, kappa: f64, config: &SolverConfig) -> Result<Wavefunction> {
    let mut inner_rec = Vec::new();
    let mut outer_rec = Vec::new();
    let a = assemble_recording(kappa, spec, config, Some(&mut inner_rec), Some(&mut outer_rec))?;
    let ln_unit = -0.5 * a.ln_norm;
    let mut knots = Vec::new();
    let inner_final_scale = a.matching.inner_prop.map_or(0.0, |p| p.log_scale);
    if matches!(spec, PotentialSpec::HardCore { .. }) {
        for &(r, p, d, ls) in &inner_rec {
            let f = (ls - inner_final_scale + ln_unit).exp();
            knots.push((r, p * f, d * f));
        }
    }
    let outer_final_scale = a.matching.outer.log_scale;
    let mut outer_knots: Vec<(f64, f64, f64)> = outer_rec
        .iter()
        .map(|&(r, p, d, ls)| {
            let f = a.outer_sign * (ls - outer_final_scale + a.ln_outer_factor + ln_unit).exp();
            (r, p * f, d * f)
        })
        .collect();
    outer_knots.reverse();
    knots.extend(outer_knots);
    knots.sort_by(|x, y| x.0.total_cmp(&y.0));
    knots.dedup_by(|x, y| x.0 == y.0);
    Ok(Wavefunction {
        spec: *spec,
        kappa,
        config: *config,
        knots,
        well_factor: ln_unit.exp(),
        outer_start: a.matching.outer_start,
    })
}

impl Wavefunction {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn outer_start(&self) -> f64 {
        self.outer_start
    }

    /// ψ(r); zero inside a hard core, exponential tail beyond the outer start.
    pub fn eval(&self, r: f64) -> Result<f64> {
        match self.spec {
            PotentialSpec::Regularized { alpha_s, r: cutoff, .. } if r < cutoff => {
                let well = WellSolution { q2: (alpha_s / cutoff).powi(2) - self.kappa * self.kappa };
                return Ok(self.well_factor * well.value_and_slope(r).0);
            }
            PotentialSpec::HardCore { rc, .. } if r <= rc => return Ok(0.0),
            _ => {}
        }
        let last = *self.knots.last().expect("knots are never empty");
        if r >= last.0 {
            return Ok(last.1 * (-self.kappa * (r - last.0)).exp());
        }
        let idx = self.knots.partition_point(|k| k.0 <= r).max(1) - 1;
        let (r0, p0, d0) = self.knots[idx];
        if r == r0 {
            return Ok(p0);
        }
        let out = self.config.propagator().propagate(
            &self.spec.tail(),
            -self.kappa * self.kappa,
            r0,
            r,
            p0,
            d0,
            None,
        )?;
        Ok(out.psi * out.log_scale.exp())
    }
}

/// s-wave phase shift at `E = k²`, reduced to `[0, π)`.
pub fn phase_shift(k: f64, spec: &PotentialSpec) -> Result<f64> {
    phase_shift_with(k, spec, &SolverConfig::default())
}

pub fn phase_shift_with(k: f64, spec: &PotentialSpec, config: &SolverConfig) -> Result<f64> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(domain(format!("wave number must be positive, got {k}")));
    }
    let energy = k * k;
    let (start, initial) = match *spec {
        PotentialSpec::Regularized { alpha_s, r, .. } => {
            let q = (energy + (alpha_s / r).powi(2)).sqrt();
            (r, ((q * r).sin(), q * (q * r).cos()))
        }
        PotentialSpec::HardCore { rc, .. } => (rc, (0.0, 1.0)),
    };
    let end = config.phase_end(k, spec);
    let out = config
        .propagator()
        .propagate(&spec.tail(), energy, start, end, initial.0, initial.1, None)?;
    let total = (k * out.psi).atan2(out.dpsi) - k * end;
    Ok(total.rem_euclid(PI).min(PI.next_down()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseCurve {
    pub spec: PotentialSpec,
    /// `(k, δ₀)`, ascending in `k`, unwrapped.
    pub samples: Vec<(f64, f64)>,
    /// Value of `δ₀` as `k → 0`: π with a bound state, 0 without.
    pub anchor: f64,
}

/// Interval halvings allowed while unwrapping one grid step.
const MAX_REFINE_DEPTH: u32 = 24;

/// Largest phase change between neighbours accepted without refinement.
const UNWRAP_STEP: f64 = PI / 4.0;

fn nearest_branch(principal: f64, reference: f64) -> f64 {
    principal + ((reference - principal) / PI).round() * PI
}

fn unwrap_interval(
    spec: &PotentialSpec,
    config: &SolverConfig,
    lo: (f64, f64),
    hi_k: f64,
    hi_principal: f64,
    depth: u32,
    out: &mut Vec<(f64, f64)>,
) -> Result<f64> {
    let hi = nearest_branch(hi_principal, lo.1);
    if (hi - lo.1).abs() <= UNWRAP_STEP {
        return Ok(hi);
    }
    if depth >= MAX_REFINE_DEPTH {
        return Err(Error::CoarseGrid { k_lo: lo.0, k_hi: hi_k });
    }
    let mid_k = (lo.0 * hi_k).sqrt();
    let mid_p = phase_shift_with(mid_k, spec, config)?;
    let mid = unwrap_interval(spec, config, lo, mid_k, mid_p, depth + 1, out)?;
    out.push((mid_k, mid));
    unwrap_interval(spec, config, (mid_k, mid), hi_k, hi_principal, depth + 1, out)
}

/// Unwrapped `δ₀(k)` on an increasing grid. The additive multiple of π is
/// fixed at a wave number well below the grid so that `δ₀ → π` when the
/// potential binds and `δ₀ → 0` otherwise. Points inserted while unwrapping
/// steep sections are kept in the output.
pub fn phase_curve(spec: &PotentialSpec, k_grid: &[f64]) -> Result<PhaseCurve> {
    phase_curve_with(spec, k_grid, &SolverConfig::default())
}

pub fn phase_curve_with(spec: &PotentialSpec, k_grid: &[f64], config: &SolverConfig) -> Result<PhaseCurve> {
    if k_grid.is_empty() {
        return Err(domain("wave-number grid is empty"));
    }
    if k_grid.iter().any(|&k| !(k > 0.0)) || k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("wave-number grid must be positive and strictly increasing"));
    }
    let anchor = if zero_energy_nodes(spec, config)? > 0 { PI } else { 0.0 };
    let length = spec.g().max(spec.inner_radius());
    let k_anchor = (1e-3 / length).min(0.1 * k_grid[0]);
    let principal = k_grid
        .par_iter()
        .map(|&k| phase_shift_with(k, spec, config))
        .collect::<Result<Vec<_>>>()?;
    let start = nearest_branch(phase_shift_with(k_anchor, spec, config)?, anchor);
    let mut samples = Vec::with_capacity(k_grid.len());
    let mut prev = (k_anchor, start);
    for (&k, &p) in k_grid.iter().zip(&principal) {
        let value = unwrap_interval(spec, config, prev, k, p, 0, &mut samples)?;
        samples.push((k, value));
        prev = (k, value);
    }
    // Refinement points below the first requested k are not part of the curve.
    samples.retain(|s| s.0 >= k_grid[0]);
    Ok(PhaseCurve { spec: *spec, samples, anchor })
}
