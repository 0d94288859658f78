//! Argument parsing, config resolution and command dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    BackwardConfig, Drive3Config, GridSpec, ModelKind, Observable, ScenarioConfig, ScenarioKind, SideConfig, Spacing,
    Units,
};
use crate::error::{ConfigError, RunError};
use crate::figures::{self, FigureId, ZETA};
use crate::output::{write_dir, write_stream, Manifest};
use crate::run::{self, Artifact, Runner};
use crate::selfcheck;

#[derive(Debug, Parser)]
#[command(name = "isolator", version, about = "Nonreciprocal transmission of waveguide-coupled emitters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-level steady state and port currents at the probe intensity
    Steady2,
    /// Three-level steady state and port currents at the probe intensity
    Steady3,
    /// Transmission observables across the intensity grid
    Sweep,
    /// Incoherent spectral density and power budget at the probe intensity
    Spectrum,
    /// Two-beam sweep with forward port currents
    Twobeam,
    /// Critical intensity and incoherent zero crossing
    Critical,
    /// Figure data tables (all when none are named)
    Figures {
        #[arg(value_enum)]
        which: Vec<FigureId>,
    },
    /// Invariant suite
    Selfcheck,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Steady2 => "steady2",
            Command::Steady3 => "steady3",
            Command::Sweep => "sweep",
            Command::Spectrum => "spectrum",
            Command::Twobeam => "twobeam",
            Command::Critical => "critical",
            Command::Figures { .. } => "figures",
            Command::Selfcheck => "selfcheck",
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    /// JSON scenario file; flags override its fields
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory for CSV files and manifest.json (stdout when absent)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for grid evaluation
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long, global = true, value_enum)]
    pub scenario: Option<ScenarioKind>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_l: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_r: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_nonrad: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_dephase: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub detuning_p: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rabi_c: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub detuning_c: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_dephase_s: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_max: Option<f64>,
    #[arg(long, global = true)]
    pub grid_count: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub grid_spacing: Option<Spacing>,
    #[arg(long, global = true, value_enum)]
    pub grid_units: Option<Units>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub spectrum_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub spectrum_max: Option<f64>,
    #[arg(long, global = true)]
    pub spectrum_count: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub spectrum_spacing: Option<Spacing>,
    #[arg(long, global = true, value_enum)]
    pub spectrum_units: Option<Units>,

    /// Absolute backward intensity (replaces any zeta)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub backward_intensity: Option<f64>,
    /// Backward intensity in units of the critical intensity (replaces any absolute value)
    #[arg(long, global = true, allow_negative_numbers = true, conflicts_with = "backward_intensity")]
    pub zeta: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub phase: Option<f64>,

    /// Comma-separated observables
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub outputs: Option<Vec<Observable>>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    pub intensity: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub intensity_units: Option<Units>,
    #[arg(long, global = true, value_enum)]
    pub side: Option<SideConfig>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn override_grid(g: &mut GridSpec, min: Option<f64>, max: Option<f64>, count: Option<usize>, sp: Option<Spacing>, u: Option<Units>) {
    set(&mut g.min, min);
    set(&mut g.max, max);
    set(&mut g.count, count);
    set(&mut g.spacing, sp);
    set(&mut g.units, u);
}

impl GlobalArgs {
    fn drive3_given(&self) -> bool {
        self.rabi_c.is_some() || self.detuning_c.is_some() || self.gamma_dephase_s.is_some()
    }

    fn backward_given(&self) -> bool {
        self.backward_intensity.is_some() || self.zeta.is_some() || self.phase.is_some()
    }

    fn spectrum_given(&self) -> bool {
        self.spectrum_min.is_some()
            || self.spectrum_max.is_some()
            || self.spectrum_count.is_some()
            || self.spectrum_spacing.is_some()
            || self.spectrum_units.is_some()
    }

    /// Applies every given flag on top of `cfg`. Drive or backward flags
    /// switch the model or scenario unless that is also given explicitly.
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        let p = &mut cfg.params;
        set(&mut p.gamma_l, self.gamma_l);
        set(&mut p.gamma_r, self.gamma_r);
        set(&mut p.gamma_nonrad, self.gamma_nonrad);
        set(&mut p.gamma_dephase, self.gamma_dephase);
        set(&mut p.detuning_p, self.detuning_p);

        if self.drive3_given() {
            let d = cfg.drive3.get_or_insert_with(Drive3Config::default);
            set(&mut d.rabi_c, self.rabi_c);
            set(&mut d.detuning_c, self.detuning_c);
            set(&mut d.gamma_dephase_s, self.gamma_dephase_s);
            cfg.model = ModelKind::ThreeLevel;
        }
        if self.backward_given() {
            let b = cfg.backward.get_or_insert_with(BackwardConfig::default);
            if let Some(i) = self.backward_intensity {
                b.intensity = Some(i);
                b.zeta = None;
            }
            if let Some(z) = self.zeta {
                b.zeta = Some(z);
                b.intensity = None;
            }
            set(&mut b.phase, self.phase);
            cfg.scenario = ScenarioKind::TwoBeam;
        }
        set(&mut cfg.model, self.model);
        set(&mut cfg.scenario, self.scenario);
        if cfg.model == ModelKind::TwoLevel {
            cfg.drive3 = None;
        }
        if cfg.scenario == ScenarioKind::SingleBeam {
            cfg.backward = None;
        }

        override_grid(
            &mut cfg.intensity_grid,
            self.grid_min,
            self.grid_max,
            self.grid_count,
            self.grid_spacing,
            self.grid_units,
        );
        if self.spectrum_given() {
            let g = cfg.spectrum_grid.get_or_insert_with(run::default_spectrum_grid);
            override_grid(g, self.spectrum_min, self.spectrum_max, self.spectrum_count, self.spectrum_spacing, self.spectrum_units);
        }
        if let Some(o) = &self.outputs {
            cfg.outputs = o.clone();
        }
        set(&mut cfg.probe.intensity, self.intensity);
        set(&mut cfg.probe.units, self.intensity_units);
        set(&mut cfg.probe.side, self.side);
    }

    /// Config file, then flags, then the command's required pieces.
    pub fn resolve(&self, command: &Command) -> Result<ScenarioConfig, RunError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
                ScenarioConfig::from_json(&text)?
            }
            None => ScenarioConfig::default(),
        };
        self.apply(&mut cfg);
        match command {
            Command::Steady3 => {
                cfg.model = ModelKind::ThreeLevel;
                cfg.drive3.get_or_insert_with(Drive3Config::default);
            }
            Command::Twobeam => {
                cfg.scenario = ScenarioKind::TwoBeam;
                cfg.backward.get_or_insert(BackwardConfig { zeta: Some(ZETA), ..Default::default() });
            }
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), RunError> {
    let g = &cli.global;
    let runner = Runner::new(g.threads)?;
    let (inputs, artifacts, failed) = match &cli.command {
        Command::Figures { which } => {
            let mut ids = which.clone();
            ids.sort();
            ids.dedup();
            let arts = figures::figures(&runner, &ids)?;
            let names: Vec<&str> = if ids.is_empty() { FigureId::ALL.to_vec() } else { ids }.iter().map(|f| f.file_name()).collect();
            (serde_json::json!({ "figures": names }), arts, 0)
        }
        Command::Selfcheck => {
            let outcomes = selfcheck::run_all();
            for o in &outcomes {
                writeln!(stdout, "{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail)
                    .map_err(|source| RunError::Io { path: "<stdout>".into(), source })?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let arts = vec![Artifact::new("selfcheck.csv", selfcheck::report(&outcomes))];
            (serde_json::json!({ "checks": selfcheck::CHECKS.len() }), arts, failed)
        }
        cmd => {
            let cfg = g.resolve(cmd)?;
            let arts = match cmd {
                Command::Steady2 => vec![run::steady2(&cfg)?],
                Command::Steady3 => vec![run::steady3(&cfg)?],
                Command::Sweep => vec![run::sweep(&runner, &cfg, "sweep.csv")?],
                Command::Spectrum => run::spectrum(&runner, &cfg)?,
                Command::Twobeam => vec![run::twobeam(&runner, &cfg)?],
                Command::Critical => vec![run::critical(&cfg)?],
                Command::Figures { .. } | Command::Selfcheck => unreachable!("handled above"),
            };
            (serde_json::to_value(&cfg).expect("config serializes"), arts, 0)
        }
    };
    let out_dir = match (&cli.command, &g.out) {
        (_, Some(d)) => Some(d.clone()),
        (Command::Figures { .. }, None) => Some(PathBuf::from("figures")),
        _ => None,
    };
    match out_dir {
        Some(dir) => write_dir(&dir, &Manifest::new(cli.command.name(), inputs, &artifacts), &artifacts)?,
        None if matches!(cli.command, Command::Selfcheck) => {}
        None => write_stream(stdout, &artifacts)?,
    }
    if failed > 0 {
        return Err(RunError::SelfCheck { failed });
    }
    Ok(())
}

fn is_broken_pipe(e: &RunError) -> bool {
    matches!(e, RunError::Io { source, .. } if source.kind() == std::io::ErrorKind::BrokenPipe)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with<I, A>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            if is_broken_pipe(&e) {
                return 0;
            }
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
