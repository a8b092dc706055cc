use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use logse::experiments::config::Config;
use logse::experiments::convergence::{converge_space, converge_space_time, converge_time, dyadic_taus, fit_slope};
use logse::experiments::dynamics::{
    dynamics_2d_tanh, dynamics_two_gausson, half_line_centres, local_maxima_1d, reflection_asymmetry, DynamicsConfig,
    DynamicsOutput,
};
use logse::experiments::output::{fmt_real, series_csv, snapshot, write_file};
use logse::experiments::{verify_lemmas, ConvergenceTable, Gausson, StudySetup, TwoGausson, TwoGaussonCase};
use logse::imex::{truncation_check, SchemeConfig};
use logse::{Degree, Dim, Error, FeSpace};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "logse", version, about = "Finite element experiments for the logarithmic Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Temporal convergence against the Gausson on (-1,1)^d.
    #[command(after_help = "Writes <out>/converge_time.csv with columns h,tau,e2,einf,L2.\n\
        Config keys: dim, degree, lambda, T, h, tau (base of tau_j = tau 2^-j), levels, taus, b, zeta.")]
    ConvergeTime(Common),
    /// Spatial convergence (1D) or tau = h^2 refinement (2D).
    #[command(after_help = "Writes <out>/converge_space.csv with columns h,tau,e2,einf,L2.\n\
        Config keys: dim, degree, lambda, T, tau, hs, b, zeta. --long uses tau = 1e-5 and T = 1.")]
    ConvergeSpace(Common),
    /// Two interacting Gaussons on (-40,40).
    #[command(after_help = "Writes <out>/two_gausson_<case>_series.csv (t,mass,energy,linf) and one\n\
        <out>/two_gausson_<case>_t<time>.dat per snapshot with rows `x |u| Re(u) Im(u)`.\n\
        Config keys: case, tau, h, T, lambda, degree, snapshots, record_every.")]
    #[command(name = "dynamics-1d")]
    Dynamics1d(Common),
    /// The tanh(x)tanh(y)exp(-x^2-y^2) profile on (-10,10)^2.
    #[command(after_help = "Writes <out>/tanh_series.csv (t,mass,energy,linf) and one\n\
        <out>/tanh_t<time>.dat per snapshot with rows `x y |u| Re(u) Im(u)`, blank line between rows of y.\n\
        Config keys: tau, h, T, lambda, snapshots, record_every.")]
    #[command(name = "dynamics-2d")]
    Dynamics2d(Common),
    /// Seeded randomized checks of the continuity and Grönwall estimates.
    #[command(after_help = "Writes <out>/verify_lemmas.txt. Config keys: seed, samples.")]
    VerifyLemmas(Common),
    /// Truncation error of the Gausson against its a priori bound.
    #[command(after_help = "Writes <out>/truncation.csv with columns tau,n,norm,bound.\n\
        Config keys: dim, degree, lambda, T, h, taus, b, zeta.")]
    TruncationCheck(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Two-Gausson case: i, ii or iii.
    #[arg(long)]
    case: Option<String>,
    /// Spatial dimension, 1 or 2.
    #[arg(long)]
    dim: Option<usize>,
    /// Samples per randomized check.
    #[arg(long)]
    samples: Option<usize>,
    /// Number of dyadic time steps in a temporal study.
    #[arg(long)]
    levels: Option<usize>,
    /// Full-length configuration where a shortened default exists.
    #[arg(long)]
    long: bool,
    /// Treat constraint warnings as errors.
    #[arg(long)]
    strict: bool,
}

enum Failure {
    /// Invalid input or a violated constraint.
    Input(String),
    /// The numerical method or I/O failed.
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Singular(_) | Error::Overflow(_) | Error::Io(_) => Failure::Solver(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

struct Ctx {
    cfg: Config,
    out: PathBuf,
    long: bool,
    strict: bool,
}

impl Ctx {
    fn new(c: Common) -> Result<Self, Failure> {
        let mut cfg = match &c.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                cfg.set(k, v);
            }
        };
        put("seed", c.seed.map(|v| v.to_string()));
        put("tau", c.tau.map(|v| v.to_string()));
        put("h", c.h.map(|v| v.to_string()));
        put("degree", c.degree.map(|v| v.to_string()));
        put("lambda", c.lambda.map(|v| v.to_string()));
        put("T", c.t_final.map(|v| v.to_string()));
        put("case", c.case);
        put("dim", c.dim.map(|v| v.to_string()));
        put("samples", c.samples.map(|v| v.to_string()));
        put("levels", c.levels.map(|v| v.to_string()));
        Ok(Ctx { cfg, out: c.out, long: c.long, strict: c.strict })
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, Failure> {
        Ok(self.cfg.get_or(key, default)?)
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, Failure> {
        Ok(self.cfg.get_list(key)?)
    }

    fn dim(&self) -> Result<Dim, Failure> {
        match self.get("dim", 1usize)? {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            d => Err(Failure::Input(format!("dim = {d} must be 1 or 2"))),
        }
    }

    fn degree(&self) -> Result<Degree, Failure> {
        Ok(Degree::from_order(self.get("degree", 1usize)?)?)
    }

    fn gausson(&self, dim: Dim) -> Result<Gausson, Failure> {
        let zeta = self.list::<f64>("zeta")?.unwrap_or_default();
        let zeta = [zeta.first().copied().unwrap_or(0.0), zeta.get(1).copied().unwrap_or(0.0)];
        Ok(Gausson::new(dim, self.get("b", 1.0)?, zeta, self.get("lambda", -1.0)?)?)
    }

    fn warn(&self, messages: Vec<String>) -> Outcome {
        for m in &messages {
            eprintln!("warning: {m}");
        }
        if self.strict && !messages.is_empty() {
            return Err(Failure::Input(format!("{} constraint warning(s) under --strict", messages.len())));
        }
        Ok(())
    }

    fn check_scheme(&self, cfg: &SchemeConfig, h: f64, dim: Dim) -> Outcome {
        cfg.validate()?;
        let ratio = cfg.tau / h.powf(dim.as_usize() as f64 / 2.0);
        eprintln!("tau = {}, h = {h}: tau / h^(d/2) = {ratio:.6e}", cfg.tau);
        self.warn(cfg.constraint_warnings(h))
    }

    fn write(&self, name: &str, contents: &str) -> Outcome {
        write_file(&self.out, name, contents)?;
        eprintln!("wrote {}", self.out.join(name).display());
        Ok(())
    }
}

fn print_table(table: &ConvergenceTable) -> Outcome {
    println!("{:>12} {:>12} {:>12} {:>12} {:>12}", "h", "tau", "e2", "einf", "L2");
    for r in &table.rows {
        println!("{:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", r.h, r.tau, r.e2, r.einf, r.big_l2);
    }
    if table.rows.len() > 1 {
        let s = table.slopes()?;
        println!("slopes: e2 {:.4}  einf {:.4}  L2 {:.4}", s.e2, s.einf, s.big_l2);
    }
    Ok(())
}

fn setup(ctx: &Ctx, t_default: f64) -> Result<StudySetup, Failure> {
    let dim = ctx.dim()?;
    Ok(StudySetup {
        gausson: ctx.gausson(dim)?,
        degree: ctx.degree()?,
        t_final: ctx.get("T", t_default)?,
        lower: -1.0,
        upper: 1.0,
    })
}

fn cmd_converge_time(ctx: &Ctx) -> Outcome {
    let s = setup(ctx, 1.0)?;
    let base = if s.gausson.dim() == Dim::One { 0.1 } else { 0.01 };
    let h = ctx.get("h", 2f64.powi(-5))?;
    let taus = match ctx.list("taus")? {
        Some(t) => t,
        None => dyadic_taus(ctx.get("tau", base)?, ctx.get("levels", 5usize)?),
    };
    for &tau in &taus {
        ctx.check_scheme(&s.scheme(tau), h, s.gausson.dim())?;
    }
    let table = converge_time(&s, h, &taus)?;
    print_table(&table)?;
    ctx.write("converge_time.csv", &table.to_csv())
}

fn cmd_converge_space(ctx: &Ctx) -> Outcome {
    let dim = ctx.dim()?;
    let t_default = if ctx.long || dim == Dim::Two { 1.0 } else { 0.01 };
    let s = setup(ctx, t_default)?;
    let table = match dim {
        Dim::One => {
            let tau = ctx.get("tau", if ctx.long { 1e-5 } else { 1e-4 })?;
            let hs = match ctx.list("hs")? {
                Some(hs) => hs,
                None => (1..=5)
                    .map(|j| match s.degree {
                        Degree::Linear => 0.5f64.powi(j),
                        Degree::Quadratic => 1.0 / (j as f64 + 1.0),
                    })
                    .collect(),
            };
            for &h in &hs {
                ctx.check_scheme(&s.scheme(tau), h, dim)?;
            }
            converge_space(&s, tau, &hs)?
        }
        Dim::Two => {
            if ctx.cfg.raw("tau").is_some() {
                eprintln!("warning: tau is ignored in 2D; the study uses tau = h^2");
            }
            let hs = match ctx.list("hs")? {
                Some(hs) => hs,
                None => (1..=4).map(|j| 1.0 / (20.0 + 4.0 * j as f64)).collect(),
            };
            for &h in &hs {
                ctx.check_scheme(&s.scheme(h * h), h, dim)?;
            }
            converge_space_time(&s, &hs)?
        }
    };
    print_table(&table)?;
    ctx.write("converge_space.csv", &table.to_csv())
}

fn dynamics_cfg(ctx: &Ctx, mut cfg: DynamicsConfig) -> Result<DynamicsConfig, Failure> {
    cfg.tau = ctx.get("tau", cfg.tau)?;
    cfg.h = ctx.get("h", cfg.h)?;
    cfg.lambda = ctx.get("lambda", cfg.lambda)?;
    cfg.degree = Degree::from_order(ctx.get("degree", cfg.degree.order())?)?;
    cfg.record_every = ctx.get("record_every", cfg.record_every)?;
    if let Some(t) = ctx.cfg.get::<f64>("T")? {
        if ctx.cfg.raw("snapshots").is_none() {
            cfg.snapshot_times = cfg.snapshot_times.iter().map(|s| s / cfg.t_final * t).collect();
        }
        cfg.t_final = t;
    }
    if let Some(times) = ctx.list("snapshots")? {
        cfg.snapshot_times = times;
    }
    Ok(cfg)
}

fn write_snapshots(ctx: &Ctx, prefix: &str, out: &DynamicsOutput) -> Outcome {
    ctx.write(&format!("{prefix}_series.csv"), &series_csv(&out.series))?;
    for s in &out.snapshots {
        ctx.write(&format!("{prefix}_t{:.4}.dat", s.t), &snapshot(&out.space, &s.state))?;
    }
    Ok(())
}

fn summarize_mass(out: &DynamicsOutput) {
    let m = &out.series.mass;
    if let (Some(first), Some(last)) = (m.first(), m.last()) {
        println!("mass: {} -> {} (relative change {:.3e})", fmt_real(*first), fmt_real(*last), (last - first) / first);
    }
}

fn cmd_dynamics_1d(ctx: &Ctx) -> Outcome {
    let case: TwoGaussonCase = ctx.get::<String>("case", "i".into())?.parse()?;
    let t_default = match case {
        TwoGaussonCase::I => 5.0,
        TwoGaussonCase::Ii => 10.0,
        TwoGaussonCase::Iii => 15.0,
    };
    let cfg = dynamics_cfg(ctx, DynamicsConfig::two_gausson_default(t_default))?;
    let scheme = SchemeConfig::new(cfg.tau, cfg.t_final, cfg.lambda, cfg.degree);
    ctx.check_scheme(&scheme, cfg.h, Dim::One)?;
    let out = dynamics_two_gausson(&TwoGausson::case(case), &cfg)?;
    for s in &out.snapshots {
        let peaks = local_maxima_1d(&out.space, &s.state, 0.1)?;
        let centres = half_line_centres(&out.space, &s.state)?;
        let xs: Vec<String> = peaks.iter().map(|p| format!("{:.3}", p.0)).collect();
        println!(
            "t = {:.4}: maxima of |u| at [{}], half-line centres {:.4} {:.4}",
            s.t,
            xs.join(", "),
            centres[0],
            centres[1]
        );
    }
    summarize_mass(&out);
    write_snapshots(ctx, &format!("two_gausson_{}", case.label()), &out)
}

fn cmd_dynamics_2d(ctx: &Ctx) -> Outcome {
    let cfg = dynamics_cfg(ctx, DynamicsConfig::tanh_default())?;
    let scheme = SchemeConfig::new(cfg.tau, cfg.t_final, cfg.lambda, cfg.degree);
    ctx.check_scheme(&scheme, cfg.h, Dim::Two)?;
    let out = dynamics_2d_tanh(&cfg)?;
    for s in &out.snapshots {
        println!(
            "t = {:.4}: max |u| = {:.6}, reflection asymmetry {:.3e}",
            s.t,
            s.state.max_modulus(),
            reflection_asymmetry(&out.space, &s.state)?
        );
    }
    summarize_mass(&out);
    write_snapshots(ctx, "tanh", &out)
}

fn cmd_verify_lemmas(ctx: &Ctx) -> Outcome {
    let report = verify_lemmas(ctx.get("seed", DEFAULT_SEED)?, ctx.get("samples", 100_000usize)?)?;
    let text = report.render();
    print!("{text}");
    ctx.write("verify_lemmas.txt", &text)?;
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Input("counterexamples found".into()))
    }
}

fn cmd_truncation_check(ctx: &Ctx) -> Outcome {
    let s = setup(ctx, 1.0)?;
    let h = ctx.get("h", 2f64.powi(-5))?;
    let taus = ctx.list("taus")?.unwrap_or_else(|| vec![1e-2, 5e-3, 2.5e-3]);
    let space = FeSpace::new(std::sync::Arc::new(s.mesh(h)?), s.degree)?;
    let mut csv = String::from("tau,n,norm,bound\n");
    let mut maxima = Vec::new();
    let mut violated = 0;
    for &tau in &taus {
        let cfg = SchemeConfig::new(tau, s.t_final, s.gausson.lambda(), s.degree);
        ctx.check_scheme(&cfg, h, s.gausson.dim())?;
        let r = truncation_check(&s.gausson, &space, &cfg)?;
        for (n, (norm, bound)) in r.norms.iter().zip(&r.bounds).enumerate() {
            csv.push_str(&format!("{},{n},{},{}\n", fmt_real(tau), fmt_real(*norm), fmt_real(*bound)));
            violated += usize::from(norm > bound);
        }
        println!("tau = {tau:.4e}: max ||T^n|| = {:.6e}, bound held: {}", r.max_norm(), r.within_bound());
        maxima.push(r.max_norm());
    }
    for (w, t) in maxima.windows(2).zip(taus.windows(2)) {
        println!("ratio {:.4e}/{:.4e}: {:.4}", t[0], t[1], w[0] / w[1]);
    }
    if taus.len() > 1 {
        println!("slope of max ||T^n|| vs tau: {:.4}", fit_slope(&taus, &maxima)?);
    }
    ctx.write("truncation.csv", &csv)?;
    if violated > 0 {
        return Err(Failure::Input(format!("bound violated at {violated} step(s)")));
    }
    Ok(())
}

fn report(e: impl Display) {
    eprintln!("error: {e}");
}

fn run(cli: Cli) -> Outcome {
    let (common, f): (Common, fn(&Ctx) -> Outcome) = match cli.command {
        Command::ConvergeTime(c) => (c, cmd_converge_time),
        Command::ConvergeSpace(c) => (c, cmd_converge_space),
        Command::Dynamics1d(c) => (c, cmd_dynamics_1d),
        Command::Dynamics2d(c) => (c, cmd_dynamics_2d),
        Command::VerifyLemmas(c) => (c, cmd_verify_lemmas),
        Command::TruncationCheck(c) => (c, cmd_truncation_check),
    };
    f(&Ctx::new(common)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            report(m);
            ExitCode::from(1)
        }
        Err(Failure::Solver(m)) => {
            report(m);
            ExitCode::from(2)
        }
    }
}
