//! `r4flow` command-line front end: plot-ready datasets for the flow branches,
//! spectra, phase shifts, the correspondence table, the C60 estimate and WKB.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};
use r4flow::correspondence::{
    c60_report, table1, wkb_kappa_finite, wkb_kappa_limit, wkb_level_count, ShortRange, UnitsContext,
};
use r4flow::rgflow::{continuous_flow, continuous_sample, sample_branch, CutoffConfig, FlowCurve, ModelParams};
use r4flow::solver::{bound_states, phase_curve, PotentialSpec};

use output::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "r4flow", version, about = "Renormalized -g²/r⁴ potential: flow, spectra, phase shifts")]
struct Cli {
    #[command(flatten)]
    out: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Significant digits for floating-point values.
    #[arg(long, global = true, default_value_t = 6)]
    precision: usize,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
struct Physics {
    /// Coupling length g of the -g²/r⁴ tail.
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// Zero-energy phase φ (tan φ = L/g).
    #[arg(long, default_value_t = 1.0)]
    phi: f64,
}

#[derive(Args, Debug)]
struct CutoffRange {
    /// Smallest cutoff R.
    #[arg(long)]
    r_min: f64,
    /// Largest cutoff R.
    #[arg(long)]
    r_max: f64,
    /// Number of cutoffs, evenly spaced.
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Square-well strength α_s along a flow branch or a continuous flow.
    #[command(group(ArgGroup::new("branch").required(true).args(["n", "continuous"])))]
    Flow {
        #[command(flatten)]
        physics: Physics,
        /// Fixed branch index n ≥ 0.
        #[arg(long)]
        n: Option<u32>,
        /// Keep this many bound states, switching branches as R decreases.
        #[arg(long)]
        continuous: Option<u32>,
        #[command(flatten)]
        range: CutoffRange,
    },
    /// Bound-state spectrum along the continuous flow.
    Spectrum {
        #[command(flatten)]
        physics: Physics,
        /// Number of bound states carried by the flow.
        #[arg(long = "states", short = 'N')]
        states: u32,
        #[command(flatten)]
        range: CutoffRange,
        /// Drop cutoffs below the minimal cutoff instead of failing.
        #[arg(long)]
        clip: bool,
    },
    /// Unwrapped s-wave phase shift for several cutoffs.
    Phase {
        #[command(flatten)]
        physics: Physics,
        /// Cutoffs R/g, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.4")]
        r_list: Vec<f64>,
        /// Flow branch used at each cutoff.
        #[arg(long, default_value_t = 1)]
        branch: u32,
        /// Smallest gk.
        #[arg(long, default_value_t = 0.01)]
        k_min: f64,
        /// Largest gk.
        #[arg(long, default_value_t = 1.5)]
        k_max: f64,
        /// Number of momenta, evenly spaced.
        #[arg(long, default_value_t = 150)]
        points: usize,
    },
    /// Regularized well versus hard core, with published reference values alongside.
    Table1 {
        /// Coupling length g of the -g²/r⁴ tail.
        #[arg(long, default_value_t = 1.0)]
        g: f64,
        /// Hard-core index s ≥ 1.
        #[arg(long, default_value_t = 1)]
        s: u32,
    },
    /// Electron binding by a polarizable molecule (C60 by default).
    #[command(group(ArgGroup::new("short_range").required(true).args(["phi", "rc_angstrom", "scattering_length"])))]
    C60 {
        /// Polarizability in a₀³.
        #[arg(long, default_value_t = 558.0)]
        alpha_p: f64,
        /// Zero-energy phase φ.
        #[arg(long)]
        phi: Option<f64>,
        /// Effective hard-core radius in Å.
        #[arg(long)]
        rc_angstrom: Option<f64>,
        /// Scattering length in a₀.
        #[arg(long, allow_negative_numbers = true)]
        scattering_length: Option<f64>,
    },
    /// WKB estimate of the weakest level: R → 0 formula and optional finite-R study.
    Wkb {
        #[command(flatten)]
        physics: Physics,
        /// Cutoffs R/g for the finite-R study, comma separated.
        #[arg(long, value_delimiter = ',')]
        r_study: Vec<f64>,
        /// Flow branch supplying α_s in the study.
        #[arg(long, default_value_t = 1)]
        branch: u32,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(r4flow::Error),
    Io(io::Error),
}

impl From<r4flow::Error> for Failure {
    fn from(e: r4flow::Error) -> Self {
        Failure::Library(e)
    }
}

type CmdResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn linear_grid(lo: f64, hi: f64, points: usize) -> CmdResult<Vec<f64>> {
    if points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
        return Err(usage(format!("need 0 < min ≤ max, got {lo} and {hi}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    if hi == lo {
        return Err(usage("min and max coincide but more than one point was requested"));
    }
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| if i == points - 1 { hi } else { lo + step * i as f64 }).collect())
}

fn params(p: &Physics) -> CmdResult<ModelParams> {
    if !(p.g > 0.0) {
        return Err(usage(format!("--g must be positive, got {}", p.g)));
    }
    Ok(ModelParams::new(p.g, p.phi)?)
}

fn flow(physics: &Physics, n: Option<u32>, continuous: Option<u32>, range: &CutoffRange) -> CmdResult<Table> {
    let params = params(physics)?;
    let grid = linear_grid(range.r_min, range.r_max, range.points)?;
    let curve: FlowCurve = match (n, continuous) {
        (Some(n), None) => sample_branch(&params, n, &grid)?,
        (None, Some(0)) => return Err(usage("--continuous must be at least 1")),
        (None, Some(target)) => continuous_flow(&params, target, &grid)?,
        _ => return Err(usage("give exactly one of --n and --continuous")),
    };
    let mut table = Table::new(&["R", "alpha", "omega", "alpha_s", "branch_n", "discontinuity_flag"]);
    for (s, flag) in curve.samples.iter().zip(curve.discontinuity_flags()) {
        table.push(vec![
            Cell::Num(s.r),
            Cell::Num(s.alpha),
            Cell::Num(s.omega.omega),
            Cell::Num(s.alpha_s),
            Cell::Int(s.branch as i64),
            Cell::Flag(flag),
        ]);
    }
    Ok(table)
}

fn spectrum(physics: &Physics, states: u32, range: &CutoffRange, clip: bool) -> CmdResult<Table> {
    if states == 0 {
        return Err(usage("--states must be at least 1"));
    }
    let params = params(physics)?;
    let grid = linear_grid(range.r_min, range.r_max, range.points)?;
    let mut table = Table::new(&["R", "level_index", "g_kappa", "rms_over_g", "weakest_flag"]);
    for &r in &grid {
        let sample = match continuous_sample(&params, states, r) {
            Ok(s) => s,
            Err(r4flow::Error::RMinViolation { .. }) if clip => continue,
            Err(e) => return Err(e.into()),
        };
        let config = CutoffConfig::new(&params, r, sample.alpha_s, sample.branch)?;
        let levels = bound_states(&PotentialSpec::from_config(&config))?;
        let g = params.g();
        for (i, level) in levels.iter().enumerate() {
            table.push(vec![
                Cell::Num(r),
                Cell::Int(i as i64),
                Cell::Num(g * level.kappa),
                Cell::Num(level.rms_radius / g),
                Cell::Flag(level.weakest),
            ]);
        }
    }
    Ok(table)
}

fn phase(physics: &Physics, r_list: &[f64], branch: u32, k_min: f64, k_max: f64, points: usize) -> CmdResult<Table> {
    let params = params(physics)?;
    if r_list.is_empty() || r_list.iter().any(|&r| !(r > 0.0)) {
        return Err(usage("--r-list must hold positive cutoffs"));
    }
    let g = params.g();
    let gk = linear_grid(k_min, k_max, points)?;
    let ks: Vec<f64> = gk.iter().map(|x| x / g).collect();
    let mut table = Table::new(&["g_k", "R_over_g", "delta0"]);
    for &r in r_list {
        let config = CutoffConfig::on_branch(&params, r * g, branch)?;
        let curve = phase_curve(&PotentialSpec::from_config(&config), &ks)?;
        // refinement points inserted while unwrapping are not part of the requested grid
        let mut samples = curve.samples.iter().filter(|s| ks.contains(&s.0));
        for (&x, s) in gk.iter().zip(&mut samples) {
            table.push(vec![Cell::Num(x), Cell::Num(r), Cell::Num(s.1)]);
        }
    }
    Ok(table)
}

/// Reference values printed with the correspondence table: φ, R_c/g, gκ_R,
/// gκ_hc, rms_R/g, rms_hc/g.
#[allow(clippy::approx_constant)]
const REFERENCE_TABLE: [[f64; 6]; 9] = [
    [0.1, 0.21681, 3.09, 3.14, 0.545, 0.548],
    [0.2, 0.22161, 2.73, 2.82, 0.577, 0.583],
    [0.4, 0.23189, 2.18, 2.23, 0.666, 0.672],
    [0.6, 0.24317, 1.69, 1.71, 0.794, 0.796],
    [0.8, 0.25560, 1.23, 1.24, 0.982, 0.984],
    [1.0, 0.26937, 0.830, 0.834, 1.300, 1.300],
    [1.2, 0.28471, 0.484, 0.486, 1.960, 1.961],
    [1.4, 0.30190, 0.196, 0.196, 4.175, 4.176],
    [1.5, 0.31130, 0.0755, 0.0755, 10.09, 10.01],
];

fn correspondence_table(g: f64, s: u32) -> CmdResult<Table> {
    if !(g > 0.0) {
        return Err(usage(format!("--g must be positive, got {g}")));
    }
    if s == 0 {
        return Err(usage("--s must be at least 1"));
    }
    let phis: Vec<f64> = REFERENCE_TABLE.iter().map(|r| r[0]).collect();
    let rows = table1(g, &phis, s)?;
    let mut table = Table::new(&[
        "phi",
        "Rc_over_g",
        "g_kappa_R",
        "g_kappa_hc",
        "rms_R",
        "rms_hc",
        "ref_Rc_over_g",
        "ref_g_kappa_R",
        "ref_g_kappa_hc",
        "ref_rms_R",
        "ref_rms_hc",
    ]);
    for (row, reference) in rows.iter().zip(&REFERENCE_TABLE) {
        let mut cells = vec![
            Cell::Num(row.phi),
            Cell::Num(row.rc_over_g),
            Cell::Num(row.g_kappa_r),
            Cell::Num(row.g_kappa_hc),
            Cell::Num(row.rms_r),
            Cell::Num(row.rms_hc),
        ];
        // reference columns apply to s = 1 only
        cells.extend(reference[1..].iter().map(|&v| if s == 1 { Cell::Num(v) } else { Cell::Empty }));
        table.push(cells);
    }
    Ok(table)
}

fn polarization(alpha_p: f64, short: ShortRange) -> CmdResult<Table> {
    let r = c60_report(alpha_p, short, &UnitsContext::default())?;
    let mut table = Table::new(&[
        "binding_meV",
        "radius_a0",
        "radius_angstrom",
        "scattering_length_a0",
        "g_kappa",
        "phi",
        "g_a0",
        "alpha_p_a0_cubed",
        "r_method_g_kappa",
        "r_method_binding_meV",
    ]);
    table.push(
        [
            r.binding_mev,
            r.radius_a0,
            r.radius_angstrom,
            r.scattering_length_a0,
            r.g_kappa,
            r.phi,
            r.g_a0,
            r.alpha_p_a0_cubed,
            r.r_method_g_kappa,
            r.r_method_binding_mev,
        ]
        .into_iter()
        .map(Cell::Num)
        .collect(),
    );
    Ok(table)
}

fn wkb(physics: &Physics, r_study: &[f64], branch: u32) -> CmdResult<Table> {
    let params = params(physics)?;
    let g = params.g();
    let limit = g * wkb_kappa_limit(g, params.phi())?;
    let mut table = Table::new(&["R_over_g", "alpha_s", "level", "g_kappa", "g_kappa_limit"]);
    table.push(vec![Cell::Num(0.0), Cell::Empty, Cell::Empty, Cell::Num(limit), Cell::Num(limit)]);
    for &r in r_study {
        if !(r > 0.0) {
            return Err(usage("--r-study must hold positive cutoffs"));
        }
        let config = CutoffConfig::on_branch(&params, r * g, branch)?;
        let level = wkb_level_count(config.alpha_s(), r * g, g);
        let kappa = wkb_kappa_finite(config.alpha_s(), r * g, g, level)?;
        table.push(vec![
            Cell::Num(r),
            Cell::Num(config.alpha_s()),
            Cell::Int(level as i64),
            Cell::Num(g * kappa),
            Cell::Num(limit),
        ]);
    }
    Ok(table)
}

fn run(cli: &Cli) -> CmdResult<String> {
    let out = &cli.out;
    if out.precision == 0 || out.precision > 17 {
        return Err(usage("--precision must lie in 1..=17"));
    }
    let table = match &cli.command {
        Command::Flow { physics, n, continuous, range } => flow(physics, *n, *continuous, range)?,
        Command::Spectrum { physics, states, range, clip } => spectrum(physics, *states, range, *clip)?,
        Command::Phase { physics, r_list, branch, k_min, k_max, points } => {
            phase(physics, r_list, *branch, *k_min, *k_max, *points)?
        }
        Command::Table1 { g, s } => correspondence_table(*g, *s)?,
        Command::C60 { alpha_p, phi, rc_angstrom, scattering_length } => {
            let short = ShortRange::from_options(*phi, *rc_angstrom, *scattering_length)?;
            let table = polarization(*alpha_p, short)?;
            if out.format == Format::Json {
                // a single report, not a list
                let obj = table.object(&table.rows[0], out.precision);
                let mut s = serde_json::to_string_pretty(&obj).expect("finite values");
                s.push('\n');
                return Ok(s);
            }
            table
        }
        Command::Wkb { physics, r_study, branch } => wkb(physics, r_study, *branch)?,
    };
    Ok(table.render(out.format, out.precision))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out.output {
        Some(path) => fs::write(path, text).map_err(Failure::Io),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(Failure::Io),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Library(e)) => {
            eprintln!("error: {e}");
            if let r4flow::Error::RMinViolation { r_min, target, .. } = e {
                eprintln!("minimal cutoff for {target} bound states: R_min = {r_min:.4}");
            }
            ExitCode::from(if e.is_domain() { 3 } else { 4 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_endpoints() {
        let g = linear_grid(0.05, 1.5, 400).unwrap();
        assert_eq!(g.len(), 400);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[399], 1.5);
        assert_eq!(linear_grid(0.3, 0.3, 1).unwrap(), vec![0.3]);
        assert!(linear_grid(0.3, 0.2, 5).is_err());
        assert!(linear_grid(0.3, 0.5, 0).is_err());
    }

    #[test]
    fn reference_radii_follow_the_core_formula() {
        for row in REFERENCE_TABLE {
            let rc = 1.0 / (1.5 * PI - row[0]);
            assert!((rc - row[1]).abs() < 1e-5);
        }
    }
}
