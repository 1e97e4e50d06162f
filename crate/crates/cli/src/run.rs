//! Command implementations: resolve arguments, run the pipeline, write
//! outputs and the reproducibility manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use svol_core::data::{
    self, load_returns, write_filter_result, write_mif_trace, write_returns, write_se_report,
    write_slice_result, ColumnSpec, ReturnSeries,
};
use svol_core::error::{Error, Result};
use svol_core::filter::{run_filter, FilterOptions, ResamplePolicy};
use svol_core::inference::{evaluate_loglik, numerical_se, slice_likelihood};
use svol_core::mif::{run_mif, MifConfig};
use svol_core::model::{rho_to_f, simulate, Variant};
use svol_core::params::{param_specs, ParamVector};

use crate::args::*;
use crate::svg::{line_chart, Series};

/// Reference estimates used as parameter defaults (daily percent log-returns).
const DEFAULT_FIXED: [f64; 4] = [-0.2506, 0.9805, 0.9003, -0.6579];
const DEFAULT_RW_NO_F0: [f64; 4] = [-0.2610, 0.9818, 0.9222, 0.0086];
const DEFAULT_F0_RHO: f64 = -0.4;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Filter(a) => cmd_filter(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Slice(a) => cmd_slice(a),
        Command::Hessian(a) => cmd_hessian(a),
    }
}

fn variant_of(common: &CommonArgs) -> Result<Variant> {
    common.model.parse()
}

fn resolve_params(variant: Variant, args: &ParamArgs) -> Result<ParamVector> {
    let values = match variant {
        Variant::Fixed => vec![
            args.mu_h.unwrap_or(DEFAULT_FIXED[0]),
            args.phi.unwrap_or(DEFAULT_FIXED[1]),
            args.sigma_eta.unwrap_or(DEFAULT_FIXED[2]),
            args.rho.unwrap_or(DEFAULT_FIXED[3]),
        ],
        Variant::RandomWalk => vec![
            args.mu_h.unwrap_or(DEFAULT_RW_NO_F0[0]),
            args.phi.unwrap_or(DEFAULT_RW_NO_F0[1]),
            args.sigma_eta.unwrap_or(DEFAULT_RW_NO_F0[2]),
            args.sigma_nu.unwrap_or(DEFAULT_RW_NO_F0[3]),
            match args.f0 {
                Some(f0) => f0,
                None => rho_to_f(DEFAULT_F0_RHO)?,
            },
        ],
    };
    if variant == Variant::Fixed && (args.sigma_nu.is_some() || args.f0.is_some()) {
        return Err(Error::domain(
            "--sigma-nu/--f0 apply to the random-walk model only",
        ));
    }
    if variant == Variant::RandomWalk && args.rho.is_some() {
        return Err(Error::domain("--rho applies to the fixed model only"));
    }
    ParamVector::new(variant, values)
}

fn load_data(args: &DataArgs) -> Result<ReturnSeries> {
    let columns = ColumnSpec::new(&args.date_col, &args.value_col);
    let mut series = load_returns(&args.data, &columns)?;
    if args.prices {
        let rets = data::prices_to_returns(series.values(), args.scale)?;
        let dates = series.dates()[1..].to_vec();
        series = ReturnSeries::with_dates(dates, rets)?;
    }
    if args.demean {
        series = series.into_demeaned();
    }
    if let Some(n) = args.expect_n {
        if series.len() != n {
            return Err(Error::domain(format!(
                "expected {n} observations, found {}",
                series.len()
            )));
        }
    }
    Ok(series)
}

fn filter_options(common: &CommonArgs, resample_threshold: Option<f64>) -> FilterOptions {
    FilterOptions {
        resample: match resample_threshold {
            Some(f) => ResamplePolicy::EssThreshold(f),
            None => ResamplePolicy::EveryStep,
        },
        workers: common.workers,
    }
}

fn out_dir(common: &CommonArgs) -> Result<&Path> {
    fs::create_dir_all(&common.out).map_err(|e| Error::io_at(&common.out, e))?;
    Ok(&common.out)
}

struct Manifest {
    command: &'static str,
    flags: BTreeMap<String, String>,
}

impl Manifest {
    fn new(command: &'static str, common: &CommonArgs) -> Self {
        let mut m = Manifest {
            command,
            flags: BTreeMap::new(),
        };
        m.set("model", &common.model);
        m.set("out", &common.out.display().to_string());
        m.set("seed", &common.seed.to_string());
        m.set("workers", &common.workers.to_string());
        m
    }

    fn set(&mut self, key: &str, value: &str) {
        self.flags.insert(key.to_string(), value.to_string());
    }

    fn set_params(&mut self, params: &ParamVector) {
        for (spec, value) in params.specs().iter().zip(params.values()) {
            self.set(spec.name, &data::fmt_float(*value));
        }
    }

    fn set_data(&mut self, args: &DataArgs) {
        self.set("data", &args.data.display().to_string());
        self.set("date_col", &args.date_col);
        self.set("value_col", &args.value_col);
        self.set("prices", &args.prices.to_string());
        self.set("scale", &args.scale.to_string());
        self.set("demean", &args.demean.to_string());
        if let Some(n) = args.expect_n {
            self.set("expect_n", &n.to_string());
        }
    }

    fn write(&self, dir: &Path) -> Result<()> {
        let mut root = serde_json::Map::new();
        root.insert(
            "version".into(),
            serde_json::Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        root.insert(
            "command".into(),
            serde_json::Value::String(self.command.into()),
        );
        let flags: serde_json::Map<String, serde_json::Value> = self
            .flags
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        root.insert("flags".into(), serde_json::Value::Object(flags));
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(root))
            .expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| Error::io_at(&path, e))
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let params = resolve_params(variant, &args.params)?;
    if args.t_len == 0 {
        return Err(Error::domain("--T must be at least 1"));
    }
    let sim = simulate(variant, &params, args.t_len, args.common.seed)?;
    let dir = out_dir(&args.common)?;
    write_returns(&sim.returns, &dir.join("returns.csv"))?;

    let mut latent = String::from("t,h,rho,f\n");
    for i in 0..sim.h.len() {
        latent.push_str(&format!(
            "{},{},{},{}\n",
            i + 1,
            data::fmt_float(sim.h[i]),
            data::fmt_float(sim.rho[i]),
            sim.f
                .as_ref()
                .map(|f| data::fmt_float(f[i]))
                .unwrap_or_default(),
        ));
    }
    let latent_path = dir.join("latent.csv");
    fs::write(&latent_path, latent).map_err(|e| Error::io_at(&latent_path, e))?;

    let mut manifest = Manifest::new("simulate", &args.common);
    manifest.set_params(&params);
    manifest.set("T", &args.t_len.to_string());
    manifest.write(dir)?;
    println!(
        "simulated {} observations -> {}",
        args.t_len,
        dir.join("returns.csv").display()
    );
    Ok(())
}

fn cmd_filter(args: FilterArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let params = resolve_params(variant, &args.params)?;
    if args.particles < 2 {
        return Err(Error::domain("--particles must be at least 2"));
    }
    if let Some(f) = args.resample_threshold {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::domain("--resample-threshold must be in (0,1]"));
        }
    }
    let series = load_data(&args.data)?;
    let options = filter_options(&args.common, args.resample_threshold);
    let result = run_filter(
        variant,
        &params,
        &series,
        args.particles,
        args.common.seed,
        &options,
    )?;
    let dir = out_dir(&args.common)?;
    write_filter_result(&result, &dir.join("filter.csv"))?;

    if args.svg {
        let t_axis = |v: &dyn Fn(&svol_core::filter::PerTimeSummary) -> f64| {
            result
                .per_time
                .iter()
                .map(|p| (p.t as f64, v(p)))
                .collect::<Vec<_>>()
        };
        line_chart(
            &dir.join("filter_rho.svg"),
            "filtered leverage: mean with quartiles",
            &[
                Series {
                    label: "rho mean",
                    color: "#1a60a8",
                    points: t_axis(&|p| p.rho_mean),
                    dashed: false,
                },
                Series {
                    label: "rho q1",
                    color: "#888888",
                    points: t_axis(&|p| p.rho_q1),
                    dashed: true,
                },
                Series {
                    label: "rho q3",
                    color: "#888888",
                    points: t_axis(&|p| p.rho_q3),
                    dashed: true,
                },
            ],
        )?;
        line_chart(
            &dir.join("filter_h.svg"),
            "filtered log-volatility mean",
            &[Series {
                label: "h mean",
                color: "#a83a1a",
                points: t_axis(&|p| p.h_mean),
                dashed: false,
            }],
        )?;
    }

    let mut manifest = Manifest::new("filter", &args.common);
    manifest.set_params(&params);
    manifest.set_data(&args.data);
    manifest.set("particles", &args.particles.to_string());
    if let Some(f) = args.resample_threshold {
        manifest.set("resample_threshold", &f.to_string());
    }
    manifest.set("svg", &args.svg.to_string());
    manifest.write(dir)?;
    println!(
        "loglik {} over {} observations -> {}",
        result.loglik,
        series.len(),
        dir.join("filter.csv").display()
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let start = resolve_params(variant, &args.params)?;
    let series = load_data(&args.data)?;
    let specs = param_specs(variant);
    let mut config = MifConfig::new(
        variant,
        args.iterations,
        args.particles,
        args.alpha,
        args.common.seed,
    );
    config.init_sd = specs
        .iter()
        .map(|s| if s.ivp { args.ivp_sd } else { args.init_sd })
        .collect();
    config.ivp_update_time = args.ivp_time;
    config.workers = args.common.workers;
    config.validate(variant)?;

    let trace = run_mif(variant, &series, &config, &start)?;
    let dir = out_dir(&args.common)?;
    write_mif_trace(&trace, &dir.join("mif_trace.csv"))?;

    if args.svg {
        for (i, spec) in specs.iter().enumerate() {
            let points: Vec<(f64, f64)> = trace
                .records
                .iter()
                .map(|r| (r.iteration as f64, r.params.values()[i]))
                .collect();
            line_chart(
                &dir.join(format!("trace_{}.svg", spec.name)),
                &format!("estimate trajectory: {}", spec.name),
                &[Series {
                    label: spec.name,
                    color: "#1a60a8",
                    points,
                    dashed: false,
                }],
            )?;
        }
    }

    let mut manifest = Manifest::new("fit", &args.common);
    manifest.set_params(&start);
    manifest.set_data(&args.data);
    manifest.set("iterations", &args.iterations.to_string());
    manifest.set("alpha", &args.alpha.to_string());
    manifest.set("particles", &args.particles.to_string());
    manifest.set("init_sd", &args.init_sd.to_string());
    manifest.set("ivp_sd", &args.ivp_sd.to_string());
    manifest.set("ivp_time", &args.ivp_time.to_string());
    manifest.set("svg", &args.svg.to_string());
    manifest.write(dir)?;

    println!("fitted parameters after {} iterations:", args.iterations);
    for (spec, value) in specs.iter().zip(trace.final_params.values()) {
        println!("  {} = {value}", spec.name);
    }
    if let Some(ll) = trace.records.last().and_then(|r| r.loglik) {
        println!("last perturbed-pass loglik: {ll}");
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let params = resolve_params(variant, &args.params)?;
    if args.particles < 2 || args.replicates < 1 {
        return Err(Error::domain(
            "--particles must be >= 2 and --replicates >= 1",
        ));
    }
    let series = load_data(&args.data)?;
    let options = filter_options(&args.common, None);
    let est = evaluate_loglik(
        variant,
        &params,
        &series,
        args.particles,
        args.replicates,
        args.common.seed,
        &options,
    )?;
    let dir = out_dir(&args.common)?;
    let text = format!(
        "mean,mc_se,replicates,particles\n{},{},{},{}\n",
        data::fmt_float(est.mean),
        est.mc_se.map(data::fmt_float).unwrap_or_default(),
        est.replicates,
        est.particles
    );
    let path = dir.join("loglik.csv");
    fs::write(&path, text).map_err(|e| Error::io_at(&path, e))?;

    let mut manifest = Manifest::new("eval", &args.common);
    manifest.set_params(&params);
    manifest.set_data(&args.data);
    manifest.set("particles", &args.particles.to_string());
    manifest.set("replicates", &args.replicates.to_string());
    manifest.write(dir)?;
    match est.mc_se {
        Some(se) => println!("loglik {} (mc se {se})", est.mean),
        None => println!("loglik {} (single replicate)", est.mean),
    }
    Ok(())
}

fn cmd_slice(args: SliceArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let theta = resolve_params(variant, &args.params)?;
    if args.points < 2 {
        return Err(Error::domain("--points must be at least 2"));
    }
    let grid_ok =
        args.grid_min.is_finite() && args.grid_max.is_finite() && args.grid_min < args.grid_max;
    if !grid_ok {
        return Err(Error::domain("--grid-min must be below --grid-max"));
    }
    if args.particles < 2 || args.replicates < 1 {
        return Err(Error::domain(
            "--particles must be >= 2 and --replicates >= 1",
        ));
    }
    let series = load_data(&args.data)?;
    let step = (args.grid_max - args.grid_min) / (args.points - 1) as f64;
    let grid: Vec<f64> = (0..args.points)
        .map(|i| args.grid_min + step * i as f64)
        .collect();
    let options = filter_options(&args.common, None);
    let slice = slice_likelihood(
        variant,
        &theta,
        &series,
        &args.param,
        &grid,
        args.particles,
        args.replicates,
        args.common.seed,
        args.bandwidth,
        &options,
    )?;
    let dir = out_dir(&args.common)?;
    write_slice_result(&slice, &dir.join("slice.csv"))?;

    if args.svg {
        line_chart(
            &dir.join("slice.svg"),
            &format!("sliced log-likelihood: {}", args.param),
            &[
                Series {
                    label: "estimates",
                    color: "#888888",
                    points: grid
                        .iter()
                        .zip(&slice.points)
                        .map(|(g, p)| (*g, p.mean))
                        .collect(),
                    dashed: true,
                },
                Series {
                    label: "smoothed",
                    color: "#1a60a8",
                    points: grid
                        .iter()
                        .zip(&slice.smoothed)
                        .map(|(g, s)| (*g, *s))
                        .collect(),
                    dashed: false,
                },
            ],
        )?;
    }

    let mut manifest = Manifest::new("slice", &args.common);
    manifest.set_params(&theta);
    manifest.set_data(&args.data);
    manifest.set("param", &args.param);
    manifest.set("grid_min", &args.grid_min.to_string());
    manifest.set("grid_max", &args.grid_max.to_string());
    manifest.set("points", &args.points.to_string());
    manifest.set("particles", &args.particles.to_string());
    manifest.set("replicates", &args.replicates.to_string());
    if let Some(b) = args.bandwidth {
        manifest.set("bandwidth", &b.to_string());
    }
    manifest.set("svg", &args.svg.to_string());
    manifest.write(dir)?;
    if slice.widened {
        eprintln!("note: smoothing windows were widened to reach 3 points");
    }
    println!(
        "sliced {} over [{}, {}] ({} points) -> {}",
        args.param,
        args.grid_min,
        args.grid_max,
        args.points,
        dir.join("slice.csv").display()
    );
    Ok(())
}

fn cmd_hessian(args: HessianArgs) -> Result<()> {
    let variant = variant_of(&args.common)?;
    let theta = resolve_params(variant, &args.params)?;
    if args.particles < 2 || args.replicates < 1 {
        return Err(Error::domain(
            "--particles must be >= 2 and --replicates >= 1",
        ));
    }
    if !(args.step.is_finite() && args.step > 0.0) {
        return Err(Error::domain("--step must be positive"));
    }
    let series = load_data(&args.data)?;
    let options = filter_options(&args.common, None);
    let report = numerical_se(
        variant,
        &theta,
        &series,
        args.particles,
        &[args.step],
        args.replicates,
        args.common.seed,
        &options,
    )?;
    let dir = out_dir(&args.common)?;
    write_se_report(&report, &dir.join("hessian_se.csv"))?;

    let mut manifest = Manifest::new("hessian", &args.common);
    manifest.set_params(&theta);
    manifest.set_data(&args.data);
    manifest.set("particles", &args.particles.to_string());
    manifest.set("replicates", &args.replicates.to_string());
    manifest.set("step", &args.step.to_string());
    manifest.write(dir)?;

    if report.projected {
        eprintln!(
            "warning: -Hessian was not positive definite; SEs come from the nearest positive-definite projection"
        );
    }
    for i in 0..report.names.len() {
        println!(
            "  {} = {} (se {})",
            report.names[i], report.estimates[i], report.ses[i]
        );
    }
    Ok(())
}
