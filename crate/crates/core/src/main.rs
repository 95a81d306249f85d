use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dragon_energetics::dataset::{reference_mass_table, CollapsePolicy, Dimension};
use dragon_energetics::ecology::footprint;
use dragon_energetics::energetics::{
    calibrate_dimension_law, daily_consumption, mass_cubic, mass_dimension_law, mass_direct, CubicCalibration,
    EnergyBudget, MassEstimate, WATER_DENSITY,
};
use dragon_energetics::feasibility::evaluate;
use dragon_energetics::growth::fit;
use dragon_energetics::mesh::{parse_point_pair, Axis, LengthMeasure};
use dragon_energetics::mode::ModeSelection;
use dragon_energetics::pipeline::{
    emit_csv, load_dataset, load_mesh_spec, render, run_forward_at, run_report, OutputFormat, PipelineConfig,
    PipelineError, RouteChoice,
};
use dragon_energetics::quantities::Unit;

#[derive(Parser)]
#[command(name = "dragon", version, about = "Growth, mass, metabolic and feasibility calculations for a large flying reptile")]
struct Cli {
    /// TOML or JSON pipeline configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json (default), csv or human.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ForwardFlags {
    /// CSV path or builtin:table1 / builtin:table2.
    #[arg(long)]
    dataset: Option<String>,
    /// How to collapse range cells: midpoint, lo or hi.
    #[arg(long)]
    collapse: Option<CollapsePolicy>,
    /// Tissue density, kg/m^3 (at most 997).
    #[arg(long)]
    rho: Option<f64>,
    /// Fraction of the day spent flying.
    #[arg(long)]
    pf: Option<f64>,
    /// Mass route: law, cubic, direct or table.
    #[arg(long)]
    route: Option<RouteChoice>,
    /// Age at which the mass routes are calibrated, yr.
    #[arg(long)]
    calibration_age: Option<f64>,
    /// OBJ/STL path or builtin:dragonoid, for the direct route.
    #[arg(long)]
    mesh: Option<String>,
    /// paper, physical or both.
    #[arg(long)]
    mode: Option<ModeSelection>,
}

#[derive(Args, Default)]
struct ScenarioFlags {
    /// Backward-scenario mass, kg.
    #[arg(long = "scenario-mass", id = "scenario-mass")]
    mass: Option<f64>,
    /// Backward-scenario flight fraction.
    #[arg(long = "scenario-pf", id = "scenario-pf")]
    pf: Option<f64>,
    /// Backward-scenario lambs eaten per day.
    #[arg(long = "scenario-sheep", id = "scenario-sheep")]
    sheep: Option<f64>,
    /// Backward-scenario assimilation factor, at least 1.
    #[arg(long = "scenario-k", id = "scenario-k")]
    k: Option<f64>,
    /// Backward-scenario other expenditure, J/day.
    #[arg(long = "scenario-e-other", id = "scenario-e-other")]
    e_other: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnergyUnits {
    Kcal,
    Joule,
}

#[derive(Clone, Copy, ValueEnum)]
enum MassRouteArg {
    Cubic,
    Law,
    Direct,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the logistic growth curve to one or more dataset columns.
    Fit {
        #[arg(long)]
        dataset: Option<String>,
        /// How to collapse range cells: midpoint, lo or hi.
        #[arg(long)]
        collapse: Option<CollapsePolicy>,
        /// Column to fit; repeatable. Defaults to body_length.
        #[arg(long = "dimension")]
        dimensions: Vec<Dimension>,
    },
    /// Evaluate fitted curves, mass and energy budget at the given ages.
    Predict {
        /// Age in years; repeatable. Defaults to every dataset age.
        #[arg(long = "age")]
        ages: Vec<f64>,
        #[command(flatten)]
        forward: ForwardFlags,
    },
    /// Mesh volume and reference lengths of an OBJ/STL file.
    Volume {
        /// OBJ/STL path or builtin:dragonoid / builtin:cube / builtin:icosphere.
        file: String,
        /// Reference axis: x, y, z or principal.
        #[arg(long, default_value = "principal")]
        axis: Axis,
        /// Snout endpoints `x1,y1,z1:x2,y2,z2`.
        #[arg(long, value_parser = parse_point_pair)]
        snout: Option<(dragon_energetics::mesh::Point, dragon_energetics::mesh::Point)>,
    },
    /// Mass by one route.
    Mass {
        /// law, cubic or direct.
        #[arg(long)]
        route: MassRouteArg,
        /// Tissue density, kg/m^3.
        #[arg(long, default_value_t = WATER_DENSITY)]
        rho: f64,
        /// Law route: body length, m.
        #[arg(long)]
        length: Option<f64>,
        /// Law route: body width, m.
        #[arg(long)]
        width: Option<f64>,
        /// Law route: shape factor; defaults to the age-6 reference calibration.
        #[arg(long)]
        k: Option<f64>,
        /// Cubic or direct route: target reference length, m.
        #[arg(long)]
        target_length: Option<f64>,
        /// Cubic route: anchor reference length, m.
        #[arg(long, default_value_t = 0.0575)]
        anchor_length: f64,
        /// Cubic route: anchor mass, kg.
        #[arg(long, default_value_t = 2.60)]
        anchor_mass: f64,
        /// Cubic route: model volume, m^3 (with --model-length, replaces the anchor).
        #[arg(long, requires = "model_length")]
        model_volume: Option<f64>,
        /// Cubic route: model reference length, m.
        #[arg(long)]
        model_length: Option<f64>,
        /// Direct route: scaled volume, m^3.
        #[arg(long)]
        volume: Option<f64>,
        /// Direct route: mesh scaled so its axis length equals --target-length.
        #[arg(long)]
        mesh: Option<String>,
        /// Direct route: axis measured on the mesh.
        #[arg(long, default_value = "principal")]
        axis: Axis,
    },
    /// Metabolic budget for a mass and flight fraction.
    Energy {
        /// Body mass, kg.
        #[arg(long)]
        mass: f64,
        /// Fraction of the day spent flying.
        #[arg(long)]
        pf: f64,
        /// Report energies in kcal or joules.
        #[arg(long, value_enum, default_value = "kcal")]
        units: EnergyUnits,
    },
    /// Lambs, land and feed behind a daily energy demand.
    Ecology {
        /// Daily energy demand, kcal/day.
        #[arg(long)]
        daily_kcal: f64,
        /// paper, physical or both.
        #[arg(long, default_value = "paper")]
        mode: ModeSelection,
    },
    /// Daily energy ledger and feasibility verdict.
    Feasibility {
        /// Body mass, kg.
        #[arg(long)]
        mass: f64,
        /// Fraction of the day spent flying.
        #[arg(long)]
        pf: f64,
        /// Lambs eaten per day.
        #[arg(long)]
        sheep: f64,
        /// paper (default), physical or both.
        #[arg(long)]
        mode: Option<ModeSelection>,
        /// Assimilation factor, at least 1.
        #[arg(long)]
        k: Option<f64>,
        /// Other expenditure, J/day.
        #[arg(long)]
        e_other: Option<f64>,
        /// Fire power, W.
        #[arg(long)]
        fire_power: Option<f64>,
        /// Fire duration per use, s.
        #[arg(long)]
        fire_duration: Option<f64>,
    },
    /// Forward and backward pipelines with inconsistency notes.
    Report {
        #[command(flatten)]
        forward: ForwardFlags,
        #[command(flatten)]
        scenario: ScenarioFlags,
        /// Also write growth_curve.csv, mass_vs_age.csv and kcal_vs_age.csv here.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
}

fn base_config(cli: &Cli) -> Result<PipelineConfig, PipelineError> {
    let mut config = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(f) = cli.format {
        config.format = f;
    }
    Ok(config)
}

fn apply_forward(config: &mut PipelineConfig, f: &ForwardFlags) {
    macro_rules! set {
        ($($flag:ident => $field:ident),*) => {$(
            if let Some(v) = f.$flag.clone() {
                config.$field = v;
            }
        )*};
    }
    set!(dataset => dataset, collapse => collapse, rho => rho, pf => p_flight, route => route,
         calibration_age => calibration_age, mode => mode);
    if f.mesh.is_some() {
        config.mesh = f.mesh.clone();
    }
}

fn apply_scenario(config: &mut PipelineConfig, s: &ScenarioFlags) {
    let sc = &mut config.scenario;
    for (flag, field) in [(s.mass, &mut sc.mass), (s.pf, &mut sc.p_flight), (s.sheep, &mut sc.n_sheep), (s.k, &mut sc.k), (s.e_other, &mut sc.e_other)] {
        if let Some(v) = flag {
            *field = v;
        }
    }
}

fn output<T: Serialize>(value: &T, format: OutputFormat) -> Result<(), PipelineError> {
    print!("{}", render(value, format)?);
    Ok(())
}

fn required(name: &str, v: Option<f64>) -> Result<f64, PipelineError> {
    v.ok_or_else(|| PipelineError::Validation(format!("--{name} is required for this route")))
}

fn in_joules(b: EnergyBudget) -> Result<EnergyBudget, PipelineError> {
    let conv = |q: dragon_energetics::quantities::Quantity, u: Unit| {
        q.convert(u).map_err(|e| PipelineError::Validation(e.to_string()))
    };
    Ok(EnergyBudget {
        r_basal: conv(b.r_basal, Unit::Watt)?,
        r_standard: conv(b.r_standard, Unit::Watt)?,
        r_flight: conv(b.r_flight, Unit::Watt)?,
        daily_kcal: conv(b.daily_kcal, Unit::JoulePerDay)?,
        ..b
    })
}

fn mass_command(cmd: &Command) -> Result<MassEstimate, PipelineError> {
    let Command::Mass {
        route, rho, length, width, k, target_length, anchor_length, anchor_mass, model_volume, model_length, volume,
        mesh, axis,
    } = cmd
    else {
        unreachable!("mass_command called with another command")
    };
    let estimate = match route {
        MassRouteArg::Law => {
            let k = match k {
                Some(k) => *k,
                None => {
                    let t2 = load_dataset("builtin:table2")?;
                    let r = t2.records.iter().find(|r| r.age == 6.0).expect("table2 has age 6");
                    let m = reference_mass_table().mass_at(6.0).expect("reference mass at 6");
                    calibrate_dimension_law(r.body_length.lo, r.body_width.lo, WATER_DENSITY, m)?
                }
            };
            mass_dimension_law(required("length", *length)?, required("width", *width)?, *rho, k)?
        }
        MassRouteArg::Cubic => {
            let target = required("target-length", *target_length)?;
            match (model_volume, model_length) {
                (Some(v), Some(l)) => mass_cubic(*v, *l, target, *rho)?,
                _ => {
                    let cal = CubicCalibration::from_anchor(*anchor_length, *anchor_mass, WATER_DENSITY)?;
                    mass_cubic(cal.model_volume, cal.model_ref_length, target, *rho)?
                }
            }
        }
        MassRouteArg::Direct => match (volume, mesh) {
            (Some(v), _) => mass_direct(*v, *rho)?,
            (None, Some(spec)) => {
                let m = load_mesh_spec(spec)?;
                let len = m.characteristic_length(LengthMeasure::Axis(*axis))?;
                let scaled = m.scale_uniform(required("target-length", *target_length)? / len)?;
                mass_direct(scaled.volume()?, *rho)?
            }
            (None, None) => return Err(PipelineError::Validation("direct route needs --volume or --mesh".into())),
        },
    };
    Ok(estimate)
}

fn run(cli: Cli) -> Result<i32, PipelineError> {
    let mut config = base_config(&cli)?;
    let format = config.format;
    match &cli.command {
        Command::Fit { dataset, collapse, dimensions } => {
            if let Some(d) = dataset {
                config.dataset = d.clone();
            }
            if let Some(c) = collapse {
                config.collapse = *c;
            }
            let ds = load_dataset(&config.dataset)?;
            let dims = if dimensions.is_empty() { vec![Dimension::BodyLength] } else { dimensions.clone() };
            let mut fits = Vec::new();
            for d in &dims {
                let result = fit(&ds.series(*d, config.collapse), None)?;
                fits.push((d.column_name(), result.summary()));
            }
            if let [(_, only)] = fits.as_slice() {
                output(only, format)?;
            } else {
                output(&fits.into_iter().collect::<std::collections::BTreeMap<_, _>>(), format)?;
            }
        }
        Command::Predict { ages, forward } => {
            apply_forward(&mut config, forward);
            let report = run_forward_at(&config, (!ages.is_empty()).then_some(ages.as_slice()))?;
            output(&report, format)?;
            return Ok(report.stage_errors().into_iter().map(|k| k.exit_code()).max().unwrap_or(0));
        }
        Command::Volume { file, axis, snout } => {
            let mesh = load_mesh_spec(file)?;
            output(&mesh.summary(*axis, *snout)?, format)?;
        }
        cmd @ Command::Mass { .. } => output(&mass_command(cmd)?, format)?,
        Command::Energy { mass, pf, units } => {
            let budget = daily_consumption(*mass, *pf)?;
            let budget = match units {
                EnergyUnits::Kcal => budget,
                EnergyUnits::Joule => in_joules(budget)?,
            };
            output(&budget, format)?;
        }
        Command::Ecology { daily_kcal, mode } => {
            let reports = mode
                .modes()
                .into_iter()
                .map(|m| footprint(*daily_kcal, &config.sheep_for(m), m))
                .collect::<Result<Vec<_>, _>>()?;
            match reports.as_slice() {
                [only] => output(only, format)?,
                many => output(&many, format)?,
            }
        }
        Command::Feasibility { mass, pf, sheep, mode, k, e_other, fire_power, fire_duration } => {
            let sc = &mut config.scenario;
            sc.mass = *mass;
            sc.p_flight = *pf;
            sc.n_sheep = *sheep;
            sc.k = k.unwrap_or(sc.k);
            sc.e_other = e_other.unwrap_or(sc.e_other);
            config.fire.power = fire_power.unwrap_or(config.fire.power);
            config.fire.duration = fire_duration.unwrap_or(config.fire.duration);
            config.mode = mode.unwrap_or(ModeSelection::Paper);
            config.validate()?;
            let assessments = config
                .mode
                .modes()
                .into_iter()
                .map(|m| evaluate(&config.scenario.inputs(m), &config.fire, Some(&config.sheep_for(m))))
                .collect::<Result<Vec<_>, _>>()?;
            match assessments.as_slice() {
                [only] => output(only, format)?,
                many => output(&many, format)?,
            }
        }
        Command::Report { forward, scenario, emit_csv: dir } => {
            apply_forward(&mut config, forward);
            apply_scenario(&mut config, scenario);
            let report = run_report(&config)?;
            if let Some(dir) = dir {
                emit_csv(dir, &report.forward, config.curve_samples)?;
            }
            output(&report, format)?;
            return Ok(report.worst_error().map_or(0, |k| k.exit_code()));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
