//! Experiment registry: maps every experiment id onto one core operation,
//! renders its tables as CSV, and evaluates the optional in-config
//! assertions.

use crate::config::{Config, ConfigError, Result};
use enslab_core::biotsavart::u1_on_axis_tol;
use enslab_core::error::Error as CoreError;
use enslab_core::examples::{
    counterexample_experiment, cubic_divergence_experiment, truncation_zygmund_decay,
    zygmund_membership_scan, CounterexampleConfig, CutoffId,
};
use enslab_core::fields::{make_grid, GridField};
use enslab_core::funcspaces::{
    lorentz_norm_1q, luxemburg_norm, maximal, orlicz_modular, product_lemma_check, rearrange,
    OrliczParams,
};
use rand::Rng as _;
use rand::SeedableRng as _;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Exhaustive list of experiment ids with one-line descriptions.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    (
        "counterexample",
        "viscous and transport enstrophy defects of the singular cutoff datum: \
         L1 masses, concentration fractions, mollified transport residuals",
    ),
    (
        "limitcase",
        "on-axis velocity u1(x1) of the alpha-family datum and the ratio \
         u1 / |log x1|^(1-alpha) as x1 approaches the origin",
    ),
    (
        "cubic-divergence",
        "growth of the truncated cubic velocity integral I_n over the inner \
         half-disk as the truncation index n increases",
    ),
    (
        "zygmund-scan",
        "modular refinement scan separating bounded from divergent log-Zygmund \
         modulars across the critical weight kappa = alpha - 1/2",
    ),
    (
        "truncation-decay",
        "decay of the weighted remainder of the truncated alpha-density as the \
         truncation index grows",
    ),
    (
        "norm-suite",
        "randomized property checks for Lorentz and Orlicz norms: Luxemburg \
         homogeneity, modular attainment, product bound, rearrangement invariance, \
         maximal domination",
    ),
];

/// Everything `run` needs to persist: CSV tables, human-readable notes, and
/// named assertion outcomes that decide the PASS/FAIL verdict.
pub struct Report {
    pub tables: Vec<(String, String)>,
    pub notes: Vec<String>,
    pub assertions: Vec<(String, bool)>,
}

/// What went wrong while running an experiment, separated so `main` can map
/// it onto the documented exit codes.
pub enum RunError {
    /// Bad configuration (exit 2).
    Config(ConfigError),
    /// A quadrature or iteration failed to converge (exit 3).
    NonConvergence(String),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

/// Core errors other than non-convergence stem from parameter values the
/// config supplied, so they surface as configuration errors.
fn core_err(e: CoreError) -> RunError {
    match e {
        CoreError::QuadNonConvergence { .. } => RunError::NonConvergence(e.to_string()),
        other => RunError::Config(ConfigError {
            path: String::new(),
            line: 0,
            message: other.to_string(),
        }),
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn dispatch(cfg: &Config, id: &str) -> std::result::Result<Report, RunError> {
    let report = match id {
        "counterexample" => run_counterexample(cfg)?,
        "limitcase" => run_limitcase(cfg)?,
        "cubic-divergence" => run_cubic_divergence(cfg)?,
        "zygmund-scan" => run_zygmund_scan(cfg)?,
        "truncation-decay" => run_truncation_decay(cfg)?,
        "norm-suite" => run_norm_suite(cfg)?,
        other => {
            return Err(RunError::Config(ConfigError {
                path: String::new(),
                line: 0,
                message: format!(
                    "unknown experiment `{other}`; run `enslab list` for the registry"
                ),
            }))
        }
    };
    cfg.finish()?;
    Ok(report)
}

fn parse_cutoff(cfg: &Config) -> Result<CutoffId> {
    match cfg.str_value("cutoff")? {
        "bump_smoothstep" => Ok(CutoffId::BumpSmoothstep),
        "poly_smoothstep" => Ok(CutoffId::PolySmoothstep),
        other => Err(ConfigError {
            path: String::new(),
            line: 0,
            message: format!(
                "key `cutoff`: `{other}` is not one of bump_smoothstep, poly_smoothstep"
            ),
        }),
    }
}

fn run_counterexample(cfg: &Config) -> std::result::Result<Report, RunError> {
    let exp = CounterexampleConfig {
        cutoff: parse_cutoff(cfg)?,
        grid_n: cfg.usize_value("grid_n")?,
        half_width: cfg.f64_value("half_width")?,
        nu_list: cfg.f64_list("nu_list")?,
        t_list: cfg.f64_list("t_list")?,
        eps_list: cfg.f64_list("eps_list")?,
        transport_n: cfg.usize_value("transport_n")?,
        reg_delta: cfg.f64_value("reg_delta")?,
    };
    let transport_budget = cfg.f64_opt("assert_transport_budget")?;
    let outside_mass = cfg.f64_opt("assert_outside_mass")?;
    let res = counterexample_experiment(&exp).map_err(core_err)?;

    let mut viscous = String::from(
        "nu,t,l1_grid,l1_spectral,mass_r0.05,mass_r0.1,mass_r0.5\n",
    );
    for r in &res.viscous {
        viscous.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            sci(r.nu),
            sci(r.t),
            sci(r.l1_grid),
            sci(r.l1_spectral),
            sci(r.mass_frac[0]),
            sci(r.mass_frac[1]),
            sci(r.mass_frac[2]),
        ));
    }
    let mut transport = String::from("n,eps,l1,sup\n");
    for r in &res.transport {
        transport.push_str(&format!("{},{},{},{}\n", r.n, sci(r.eps), sci(r.l1), sci(r.sup)));
    }

    let mut assertions = Vec::new();
    if let Some(budget) = transport_budget {
        let bound = budget * 4.0 * PI.powi(3);
        let pass = res
            .transport
            .iter()
            .filter(|r| r.n == exp.transport_n)
            .all(|r| r.l1 < bound);
        assertions.push((
            format!("transport defect L1 at n={} below {bound:.3e}", exp.transport_n),
            pass,
        ));
    }
    if let Some(frac) = outside_mass {
        // Checked at the smallest viscosity, where concentration is tightest.
        let pass = res
            .viscous
            .iter()
            .filter(|r| r.nu == *exp.nu_list.last().unwrap())
            .all(|r| 1.0 - r.mass_frac[1] < frac);
        assertions.push((
            format!("viscous mass outside radius 0.1 below {frac:.3e} at smallest nu"),
            pass,
        ));
    }
    Ok(Report {
        tables: vec![
            ("viscous.csv".into(), viscous),
            ("transport.csv".into(), transport),
        ],
        notes: vec![format!(
            "viscous rows: {}, transport rows: {}",
            res.viscous.len(),
            res.transport.len()
        )],
        assertions,
    })
}

fn run_limitcase(cfg: &Config) -> std::result::Result<Report, RunError> {
    let alphas = cfg.f64_list("alpha_list")?;
    let x1_min = cfg.f64_value("x1_min")?;
    let x1_max = cfg.f64_value("x1_max")?;
    let count = cfg.usize_value("x1_count")?;
    let tol = cfg.f64_value("tol")?;
    let positive = cfg.bool_opt("assert_positive_ratio", false)?;
    if !(x1_min > 0.0 && x1_max > x1_min) || count < 2 {
        return Err(RunError::Config(ConfigError {
            path: String::new(),
            line: 0,
            message: "limitcase needs 0 < x1_min < x1_max and x1_count >= 2".into(),
        }));
    }
    let mut csv = String::from("alpha,x1,u1,ratio\n");
    let mut worst_ratio = f64::INFINITY;
    for &alpha in &alphas {
        for i in 0..count {
            let t = i as f64 / (count - 1) as f64;
            let x1 = x1_min * (x1_max / x1_min).powf(t);
            let u1 = u1_on_axis_tol(alpha, x1, tol).map_err(core_err)?;
            let ratio = u1 / (-x1.ln()).powf(1.0 - alpha);
            worst_ratio = worst_ratio.min(ratio);
            csv.push_str(&format!(
                "{},{},{},{}\n",
                sci(alpha),
                sci(x1),
                sci(u1),
                sci(ratio)
            ));
        }
    }
    let mut assertions = Vec::new();
    if positive {
        assertions.push((
            "infimum of u1 / |log x1|^(1-alpha) positive".into(),
            worst_ratio > 0.0,
        ));
    }
    Ok(Report {
        tables: vec![("limitcase.csv".into(), csv)],
        notes: vec![format!("smallest observed ratio: {}", sci(worst_ratio))],
        assertions,
    })
}

fn run_cubic_divergence(cfg: &Config) -> std::result::Result<Report, RunError> {
    let alpha = cfg.f64_value("alpha")?;
    let n_list = cfg.f64_list("n_list")?;
    let increasing = cfg.bool_opt("assert_increasing", false)?;
    let res = cubic_divergence_experiment(alpha, &n_list).map_err(core_err)?;
    let mut csv = String::from("n,i_n,truncation_bound\n");
    for r in &res.rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            sci(r.n),
            sci(r.i_n),
            sci(r.truncation_bound)
        ));
    }
    let mut assertions = Vec::new();
    if increasing {
        let pass = res.rows.windows(2).all(|w| w[1].i_n > w[0].i_n);
        assertions.push(("I_n strictly increasing along n_list".into(), pass));
    }
    Ok(Report {
        tables: vec![("cubic_divergence.csv".into(), csv)],
        notes: vec![format!(
            "fitted log-n growth exponent: {}",
            sci(res.fitted_exponent)
        )],
        assertions,
    })
}

fn run_zygmund_scan(cfg: &Config) -> std::result::Result<Report, RunError> {
    let alpha = cfg.f64_value("alpha")?;
    let kappas = cfg.f64_list("kappa_list")?;
    let rows = zygmund_membership_scan(alpha, &kappas).map_err(core_err)?;
    let mut csv = String::from("kappa,inner_radius,modular,trend_ratio,divergent\n");
    let mut notes = Vec::new();
    for row in &rows {
        for &(radius, modular) in &row.modulars {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                sci(row.kappa),
                sci(radius),
                sci(modular),
                sci(row.trend_ratio),
                u8::from(row.divergent)
            ));
        }
        notes.push(format!(
            "kappa = {}: trend ratio {}, {}",
            sci(row.kappa),
            sci(row.trend_ratio),
            if row.divergent { "divergent" } else { "bounded" }
        ));
    }
    Ok(Report {
        tables: vec![("zygmund_scan.csv".into(), csv)],
        notes,
        assertions: Vec::new(),
    })
}

fn run_truncation_decay(cfg: &Config) -> std::result::Result<Report, RunError> {
    let alpha = cfg.f64_value("alpha")?;
    let kappa = cfg.f64_value("kappa")?;
    let n_list = cfg.f64_list("n_list")?;
    let decreasing = cfg.bool_opt("assert_decreasing", false)?;
    let rows = truncation_zygmund_decay(alpha, kappa, &n_list).map_err(core_err)?;
    let mut csv = String::from("n,remainder\n");
    for &(n, remainder) in &rows {
        csv.push_str(&format!("{},{}\n", sci(n), sci(remainder)));
    }
    let mut assertions = Vec::new();
    if decreasing {
        let pass = rows.windows(2).all(|w| w[1].1 < w[0].1);
        assertions.push(("remainder strictly decreasing along n_list".into(), pass));
    }
    Ok(Report {
        tables: vec![("truncation_decay.csv".into(), csv)],
        notes: Vec::new(),
        assertions,
    })
}

/// Uniform noise field on the configured grid, reproducible from the seed.
fn random_field(n: usize, l: f64, seed: u64) -> std::result::Result<GridField, RunError> {
    let g = make_grid(n, l).map_err(core_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = GridField::zeros(g);
    for v in f.data.iter_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    Ok(f)
}

fn run_norm_suite(cfg: &Config) -> std::result::Result<Report, RunError> {
    let n = cfg.usize_value("grid_n")?;
    let l = cfg.f64_value("half_width")?;
    let seed = cfg.u64_opt("seed", 0)?;
    let pairs = cfg.usize_value("pairs")?;
    let params = OrliczParams::new(2.0, 0.25).map_err(core_err)?;

    let mut product_worst = f64::NEG_INFINITY;
    let mut homog_worst: f64 = 0.0;
    let mut modular_worst: f64 = 0.0;
    let mut rearrange_worst: f64 = 0.0;
    let mut maximal_worst = f64::NEG_INFINITY;
    for i in 0..pairs {
        let a = random_field(n, l, seed.wrapping_add(2 * i as u64))?;
        let b = random_field(n, l, seed.wrapping_add(2 * i as u64 + 1))?;
        product_worst = product_worst.max(product_lemma_check(&a, &b).map_err(core_err)?);

        let norm = luxemburg_norm(&a, &params).map_err(core_err)?;
        let mut doubled = a.clone();
        for v in doubled.data.iter_mut() {
            *v *= 2.0;
        }
        let norm2 = luxemburg_norm(&doubled, &params).map_err(core_err)?;
        homog_worst = homog_worst.max(((norm2 - 2.0 * norm) / norm2).abs());

        let mut unit = a.clone();
        for v in unit.data.iter_mut() {
            *v /= norm;
        }
        let modular = orlicz_modular(&unit, &params).map_err(core_err)?;
        modular_worst = modular_worst.max((modular - 1.0).abs());

        // Reversing the sample order is a measure-preserving rearrangement.
        let mut shuffled = a.clone();
        shuffled.data.reverse();
        let lor = lorentz_norm_1q(&a, 1.5).map_err(core_err)?;
        let lor_s = lorentz_norm_1q(&shuffled, 1.5).map_err(core_err)?;
        let lux_s = luxemburg_norm(&shuffled, &params).map_err(core_err)?;
        rearrange_worst = rearrange_worst
            .max(((lor - lor_s) / lor).abs())
            .max(((norm - lux_s) / norm).abs());

        let fstar = rearrange(&a);
        let fss = maximal(&fstar);
        for (star, ss) in fstar.values().iter().zip(&fss) {
            maximal_worst = maximal_worst.max(star - ss);
        }
    }

    let checks: [(&str, f64, f64); 5] = [
        ("product_lemma_ratio", product_worst, 1.0),
        ("luxemburg_homogeneity", homog_worst, 1e-6),
        ("modular_attainment", modular_worst, 2e-6),
        ("rearrangement_invariance", rearrange_worst, 1e-10),
        ("maximal_domination_deficit", maximal_worst, 1e-12),
    ];
    let mut csv = String::from("check,worst,bound,pass\n");
    let mut assertions = Vec::new();
    for (name, worst, bound) in checks {
        let pass = worst <= bound;
        csv.push_str(&format!("{name},{},{},{}\n", sci(worst), sci(bound), u8::from(pass)));
        assertions.push((format!("{name} <= {bound:.1e}"), pass));
    }
    Ok(Report {
        tables: vec![("norm_suite.csv".into(), csv)],
        notes: vec![format!("checked {pairs} seeded field pairs on n = {n}")],
        assertions,
    })
}
