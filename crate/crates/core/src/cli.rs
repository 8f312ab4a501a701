//! The `indoor-plan` command line.
//!
//! Exit codes: 0 success or converged, 1 domain failure, 2 input or config
//! error, 3 iteration budget exhausted, 4 network failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::agents::{
    joint_design_pipeline, AgentError, Backend, Backends, IwnBackend, JointDesignOutcome, JointDesignTask,
};
use crate::experiments::{case2, Case1Config, CriterionResult, OracleBenchmark};
use crate::geometry::{validate_plan, ArchitecturalRules, FloorPlan, LoadError, Point2D};
use crate::llm::{ChatClient, LlmEndpointConfig, LlmError, LlmProposer};
use crate::optimizers::{
    aco_optimize, optimize_loop, simulated_annealing_optimize, AcoParams, AnnealParams, GreedyProposer,
    OptimizationTrace, OptimizeError, Outcome, PlanningTask, ProposerError, Scorer, ScriptedProposer,
};
use crate::propagation::{
    check_aps, coverage_fraction, heatmap::render_ppm, CoverageGrid, Evaluator, PropagationError,
    RadioConfig, DEFAULT_CELL_SIZE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;
pub const EXIT_NETWORK: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Failure(String),
    #[error("{0}")]
    Network(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Network(_) => EXIT_NETWORK,
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::InvalidConfig(_) => CliError::Input(e.to_string()),
            LlmError::PromptTooLong { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Network(e.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::InvalidTask(_) | OptimizeError::InvalidParams(_) | OptimizeError::SearchSpaceTooLarge { .. } => {
                CliError::Input(e.to_string())
            }
            OptimizeError::Propagation(ref p) => match p {
                PropagationError::InvalidDeployment(_) => CliError::Failure(e.to_string()),
                _ => CliError::Input(e.to_string()),
            },
            OptimizeError::ProposerFailure { source, .. } => match source {
                ProposerError::Llm(l) => l.into(),
                ProposerError::Other(m) => CliError::Failure(m),
            },
        }
    }
}

impl From<AgentError> for CliError {
    fn from(e: AgentError) -> Self {
        match e {
            AgentError::InvalidTask(_) => CliError::Input(e.to_string()),
            AgentError::Optimize(o) => o.into(),
            AgentError::Llm(l) => l.into(),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    Llm,
    #[default]
    Greedy,
    Aco,
    Anneal,
    Scripted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Rule,
    Llm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSection {
    pub threshold: f64,
    pub coverage_target: f64,
    pub max_aps: usize,
    pub max_iterations: usize,
    pub cell_size: f64,
}

impl Default for TaskSection {
    fn default() -> Self {
        Self {
            threshold: 80.0,
            coverage_target: 0.95,
            max_aps: 2,
            max_iterations: 10,
            cell_size: DEFAULT_CELL_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub kind: OptimizerKind,
    pub aco: AcoParams,
    pub anneal: AnnealParams,
    /// Deployments replayed by the scripted optimizer.
    pub script: Vec<Vec<Point2D>>,
    /// Planning notes for the LLM prompt; the built-in notes when unset.
    pub knowledge: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub layout: BackendKind,
    pub entity: BackendKind,
    pub iwn: OptimizerKind,
}

/// A run configuration file. Relative input paths are resolved against the
/// directory of the file; `out` is relative to the working directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub plan: Option<PathBuf>,
    pub task: TaskSection,
    pub radio: RadioConfig,
    pub optimizer: OptimizerSection,
    pub llm: LlmEndpointConfig,
    /// Required by the stochastic optimizers.
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub joint: JointDesignTask,
    pub agents: AgentSection,
    pub case1: Case1Config,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            plan: None,
            task: TaskSection::default(),
            radio: RadioConfig::default(),
            optimizer: OptimizerSection::default(),
            llm: LlmEndpointConfig::default(),
            seed: None,
            out: PathBuf::from("runs"),
            joint: JointDesignTask::default(),
            agents: AgentSection::default(),
            case1: Case1Config::default(),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Input(format!(
        "{}: parse error at line {}, column {}: {e}",
        path.display(),
        e.line(),
        e.column()
    ))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let mut cfg: RunConfig = serde_json::from_str(&read_text(path)?).map_err(|e| json_error(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.plan.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.optimizer.knowledge.as_mut() {
            resolve(p);
        }
        Ok(cfg)
    }

    fn load_or_default(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

#[derive(Debug, Parser)]
#[command(name = "indoor-plan", version, about = "Indoor access-point planning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a plan file and print every violation.
    Validate(ValidateArgs),
    /// Coverage statistics of a fixed deployment.
    Evaluate(EvaluateArgs),
    /// Run an optimizer and write its trace.
    Optimize(OptimizeArgs),
    /// Joint room layout and AP design.
    JointDesign(JointArgs),
    /// Run a reference experiment and print a pass/fail table.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub plan: PathBuf,
    /// Architectural rules file.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Required door width, meters; overrides the rules file.
    #[arg(long)]
    pub door_width: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TaskOverrides {
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub max_aps: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub cell_size: Option<f64>,
}

impl TaskOverrides {
    fn apply(&self, t: &mut TaskSection) {
        if let Some(v) = self.threshold {
            t.threshold = v;
        }
        if let Some(v) = self.target {
            t.coverage_target = v;
        }
        if let Some(v) = self.max_aps {
            t.max_aps = v;
        }
        if let Some(v) = self.max_iterations {
            t.max_iterations = v;
        }
        if let Some(v) = self.cell_size {
            t.cell_size = v;
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub plan: PathBuf,
    /// AP position as `x,y`; repeat for more APs.
    #[arg(long = "ap", value_name = "X,Y")]
    pub aps: Vec<String>,
    /// Deployment file: `{"aps": [{"x": .., "y": ..}], "config": {..}}`.
    #[arg(long, conflicts_with = "aps")]
    pub deployment: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub cell_size: Option<f64>,
    /// Write a PPM heatmap here.
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output directory name; `run-<unix seconds>-s<seed>` by default.
    #[arg(long)]
    pub run_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub plan: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub optimizer: Option<OptimizerKind>,
    #[command(flatten)]
    pub task: TaskOverrides,
}

#[derive(Debug, Args)]
pub struct JointArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub layout: Option<BackendKind>,
    #[arg(long, value_enum)]
    pub entity: Option<BackendKind>,
    #[arg(long, value_enum)]
    pub iwn: Option<OptimizerKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Case1,
    Case2,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub case: Case,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

pub fn dispatch(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Validate(a) => cmd_validate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::JointDesign(a) => cmd_joint_design(a),
        Command::Reproduce(a) => cmd_reproduce(a),
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<i32, CliError> {
    let plan = FloorPlan::parse_unchecked(&read_text(&args.plan)?).map_err(|e| match e {
        LoadError::Parse { .. } => CliError::Input(format!("{}: {e}", args.plan.display())),
        other => other.into(),
    })?;
    let mut rules = match &args.rules {
        Some(p) => Some(serde_json::from_str::<ArchitecturalRules>(&read_text(p)?).map_err(|e| json_error(p, e))?),
        None => None,
    };
    if let Some(w) = args.door_width {
        rules.get_or_insert_with(ArchitecturalRules::default).door_width = Some(w);
    }
    let violations = validate_plan(&plan, rules.as_ref());
    if violations.is_empty() {
        println!("valid: {}", args.plan.display());
        return Ok(EXIT_OK);
    }
    for v in &violations {
        println!("{v}");
    }
    println!("{} violation(s)", violations.len());
    Ok(EXIT_FAILURE)
}

fn parse_ap(text: &str) -> Result<Point2D, CliError> {
    let bad = || CliError::Input(format!("bad AP position '{text}', expected x,y"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(Point2D::new(x, y))
}

#[derive(Deserialize)]
struct DeploymentFile {
    aps: Vec<Point2D>,
    config: Option<RadioConfig>,
}

/// Structured text for one deployment's statistics.
pub fn stats_report(grid: &CoverageGrid, threshold: f64, aps: &[Point2D]) -> String {
    let s = coverage_fraction(grid, threshold);
    let worst = grid.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::new();
    let aps: Vec<String> = aps.iter().map(|p| format!("({:.3}, {:.3})", p.x, p.y)).collect();
    let _ = writeln!(out, "aps: {}", aps.join(" "));
    let _ = writeln!(out, "threshold_db: {:.2}", s.threshold);
    let _ = writeln!(out, "coverage_fraction: {:.6}", s.coverage_fraction);
    let _ = writeln!(out, "covered_cells: {}", s.covered_cells);
    let _ = writeln!(out, "total_cells: {}", s.total_cells);
    let _ = writeln!(out, "worst_cell: ({:.3}, {:.3})", s.worst_cell.x, s.worst_cell.y);
    let _ = writeln!(out, "worst_pathloss_db: {worst:.3}");
    out
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<i32, CliError> {
    let cfg = RunConfig::load_or_default(args.config.as_deref())?;
    let plan = FloorPlan::load(&args.plan)?;
    let mut radio = cfg.radio;
    let aps = match &args.deployment {
        Some(p) => {
            let d: DeploymentFile = serde_json::from_str(&read_text(p)?).map_err(|e| json_error(p, e))?;
            if let Some(c) = d.config {
                radio = c;
            }
            d.aps
        }
        None => args.aps.iter().map(|a| parse_ap(a)).collect::<Result<_, _>>()?,
    };
    let threshold = args.threshold.unwrap_or(cfg.task.threshold);
    let cell_size = args.cell_size.unwrap_or(cfg.task.cell_size);
    let evaluator = Evaluator::new(&plan, radio, cell_size).map_err(|e| CliError::Input(e.to_string()))?;
    if let Err(reason) = check_aps(&plan, &aps, None) {
        return Err(CliError::Failure(format!("invalid deployment: {reason}")));
    }
    let grid = evaluator
        .grid(&aps)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    print!("{}", stats_report(&grid, threshold, &aps));
    if let Some(path) = &args.heatmap {
        fs::write(path, render_ppm(&grid, threshold)).map_err(|e| io_err(path, e))?;
    }
    Ok(EXIT_OK)
}

fn run_dir(out: &Path, run_id: Option<&str>, seed: u64) -> Result<PathBuf, CliError> {
    let id = match run_id {
        Some(id) => id.to_string(),
        None => {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            format!("run-{secs}-s{seed}")
        }
    };
    let dir = out.join(id);
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// `outcome iterations best_coverage ap_count`
pub fn summary_line(trace: &OptimizationTrace) -> String {
    let aps = trace.best_step().map_or(0, |s| s.deployment.aps.len());
    format!(
        "{} {} {:.6} {}",
        trace.outcome,
        trace.iterations(),
        trace.best_coverage(),
        aps
    )
}

fn write_trace_outputs(dir: &Path, task: &PlanningTask, trace: &OptimizationTrace) -> Result<(), CliError> {
    write_file(&dir.join("trace.jsonl"), trace.to_jsonl())?;
    write_file(&dir.join("plan.json"), task.plan.to_json_pretty())?;
    write_file(&dir.join("summary.txt"), format!("{}\n", summary_line(trace)))?;
    if let Some(best) = trace.best_step() {
        let grid = Evaluator::new(&task.plan, task.radio, task.cell_size)
            .and_then(|e| e.grid(&best.deployment.aps))
            .map_err(|e| CliError::Failure(e.to_string()))?;
        write_file(&dir.join("heatmap.ppm"), render_ppm(&grid, task.threshold))?;
    }
    Ok(())
}

fn knowledge(section: &OptimizerSection) -> Result<String, CliError> {
    match &section.knowledge {
        Some(p) => read_text(p),
        None => Ok(crate::scenarios::KNOWLEDGE.to_string()),
    }
}

fn chat_client(cfg: &LlmEndpointConfig, log: Option<PathBuf>) -> Result<Arc<ChatClient>, CliError> {
    let client = ChatClient::new(cfg.clone())?;
    Ok(Arc::new(match log {
        Some(path) => client.with_log(&path).map_err(|e| io_err(&path, e))?,
        None => client,
    }))
}

fn require_seed(kind: OptimizerKind, seed: Option<u64>) -> Result<(), CliError> {
    if matches!(kind, OptimizerKind::Aco | OptimizerKind::Anneal) && seed.is_none() {
        return Err(CliError::Input(format!(
            "optimizer {kind:?} is stochastic and needs a seed (config \"seed\" or --seed)"
        )));
    }
    Ok(())
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load_or_default(args.run.config.as_deref())?;
    args.task.apply(&mut cfg.task);
    if let Some(p) = &args.plan {
        cfg.plan = Some(p.clone());
    }
    if let Some(k) = args.optimizer {
        cfg.optimizer.kind = k;
    }
    if let Some(s) = args.run.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &args.run.out {
        cfg.out = o.clone();
    }
    let kind = cfg.optimizer.kind;
    require_seed(kind, cfg.seed)?;
    let plan_path = cfg
        .plan
        .clone()
        .ok_or_else(|| CliError::Input("no plan given (config \"plan\" or --plan)".into()))?;
    let t = &cfg.task;
    let task = PlanningTask {
        plan: FloorPlan::load(&plan_path)?,
        coverage_target: t.coverage_target,
        threshold: t.threshold,
        max_aps: t.max_aps,
        max_iterations: t.max_iterations,
        cell_size: t.cell_size,
        radio: cfg.radio,
    };
    task.validate()?;
    let seed = cfg.seed.unwrap_or(0);
    let scorer = Scorer::new(&task)?;
    if kind == OptimizerKind::Llm {
        cfg.llm.validate()?;
    }
    let dir = run_dir(&cfg.out, args.run.run_id.as_deref(), seed)?;

    let result = match kind {
        OptimizerKind::Greedy => optimize_loop(&task, &mut GreedyProposer::new(), &scorer),
        OptimizerKind::Aco => aco_optimize(&task, &AcoParams { seed, ..cfg.optimizer.aco }),
        OptimizerKind::Anneal => simulated_annealing_optimize(&task, &AnnealParams { seed, ..cfg.optimizer.anneal }),
        OptimizerKind::Scripted => {
            let mut p = ScriptedProposer::new(cfg.optimizer.script.clone())?;
            optimize_loop(&task, &mut p, &scorer)
        }
        OptimizerKind::Llm => {
            let client = chat_client(&cfg.llm, Some(dir.join("llm.jsonl")))?;
            let mut p = LlmProposer::new(client, knowledge(&cfg.optimizer)?);
            optimize_loop(&task, &mut p, &scorer)
        }
    };
    let trace = match result {
        Ok(trace) => trace,
        Err(OptimizeError::ProposerFailure { source, partial }) => {
            write_trace_outputs(&dir, &task, &partial)?;
            println!("{}", summary_line(&partial));
            println!("run: {}", dir.display());
            return Err(OptimizeError::ProposerFailure { source, partial }.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_trace_outputs(&dir, &task, &trace)?;
    println!("{}", summary_line(&trace));
    println!("run: {}", dir.display());
    Ok(match trace.outcome {
        Outcome::Converged => EXIT_OK,
        Outcome::Exhausted => EXIT_EXHAUSTED,
    })
}

fn iwn_backend(kind: OptimizerKind, cfg: &RunConfig, client: Option<&Arc<ChatClient>>) -> Result<IwnBackend, CliError> {
    let seed = cfg.seed.unwrap_or(cfg.joint.seed);
    Ok(match kind {
        OptimizerKind::Greedy => IwnBackend::Greedy,
        OptimizerKind::Aco => IwnBackend::Aco(AcoParams { seed, ..cfg.optimizer.aco }),
        OptimizerKind::Anneal => IwnBackend::Anneal(AnnealParams { seed, ..cfg.optimizer.anneal }),
        OptimizerKind::Scripted => IwnBackend::Scripted(cfg.optimizer.script.clone()),
        OptimizerKind::Llm => IwnBackend::Llm {
            client: client.expect("client built for llm backends").clone(),
            knowledge: knowledge(&cfg.optimizer)?,
        },
    })
}

/// Per-round score table of a joint design run.
pub fn rounds_table(outcome: &JointDesignOutcome) -> String {
    let mut out = String::from("round best coverage ap_count iwn_efficiency rationality overall best_so_far\n");
    for r in &outcome.rounds {
        let s = &r.candidates[r.best_candidate].score;
        let _ = writeln!(
            out,
            "{} {} {:.6} {} {:.6} {:.4} {:.6} {:.6}",
            r.round, r.best_candidate, s.coverage, s.ap_count, s.iwn_efficiency, s.rationality, s.overall, r.best_overall
        );
    }
    let s = &outcome.score;
    let _ = writeln!(
        out,
        "best round {} candidate {}: coverage {:.6} with {} APs, efficiency {:.6}, overall {:.6}",
        outcome.origin.0, outcome.origin.1, s.coverage, s.ap_count, s.iwn_efficiency, s.overall
    );
    out
}

pub fn cmd_joint_design(args: &JointArgs) -> Result<i32, CliError> {
    let mut cfg = RunConfig::load_or_default(args.run.config.as_deref())?;
    if let Some(s) = args.run.seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = &args.run.out {
        cfg.out = o.clone();
    }
    let mut task = cfg.joint.clone();
    if let Some(s) = cfg.seed {
        task.seed = s;
    }
    if let Some(n) = args.candidates {
        task.n_candidates = n;
    }
    if let Some(n) = args.rounds {
        task.max_rounds = n;
    }
    if let Some(t) = args.threshold {
        task.threshold = t;
    }
    let layout = args.layout.unwrap_or(cfg.agents.layout);
    let entity = args.entity.unwrap_or(cfg.agents.entity);
    let iwn = args.iwn.unwrap_or(cfg.agents.iwn);
    task.validate()?;

    let dir = run_dir(&cfg.out, args.run.run_id.as_deref(), task.seed)?;
    let uses_llm = layout == BackendKind::Llm || entity == BackendKind::Llm || iwn == OptimizerKind::Llm;
    let client = if uses_llm {
        cfg.llm.validate()?;
        Some(chat_client(&cfg.llm, Some(dir.join("llm.jsonl")))?)
    } else {
        None
    };
    let agent = |k: BackendKind| match k {
        BackendKind::Rule => Backend::Rule,
        BackendKind::Llm => Backend::Llm(client.clone().expect("client built for llm backends")),
    };
    let backends = Backends {
        layout: agent(layout),
        entity: agent(entity),
        iwn: iwn_backend(iwn, &cfg, client.as_ref())?,
    };
    let outcome = joint_design_pipeline(&task, &backends)?;

    let mut history = Vec::new();
    outcome.write_history(&mut history).map_err(|e| io_err(&dir, e))?;
    write_file(&dir.join("rounds.jsonl"), history)?;
    let planning = task.planning_task(outcome.best.plan.clone());
    write_file(&dir.join("trace.jsonl"), outcome.trace.to_jsonl())?;
    write_file(&dir.join("plan.json"), outcome.best.plan.to_json_pretty())?;
    let table = rounds_table(&outcome);
    write_file(&dir.join("summary.txt"), &table)?;
    if !outcome.deployment.aps.is_empty() {
        let grid = Evaluator::new(&planning.plan, planning.radio, planning.cell_size)
            .and_then(|e| e.grid(&outcome.deployment.aps))
            .map_err(|e| CliError::Failure(e.to_string()))?;
        write_file(&dir.join("heatmap.ppm"), render_ppm(&grid, planning.threshold))?;
    }
    print!("{table}");
    println!("run: {}", dir.display());
    Ok(EXIT_OK)
}

fn print_table(results: &[CriterionResult]) -> i32 {
    for r in results {
        println!("{r}");
    }
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

pub fn cmd_reproduce(args: &ReproduceArgs) -> Result<i32, CliError> {
    let cfg = RunConfig::load_or_default(args.config.as_deref())?;
    match args.case {
        Case::Case1 => {
            let mut c1 = cfg.case1.clone();
            if let Some(t) = args.target {
                c1.coverage_target = t;
            }
            if let Some(t) = args.threshold {
                c1.threshold = t;
            }
            if let Some(s) = args.seed {
                c1.aco.seed = s;
            }
            c1.validate()?;
            let bench = OracleBenchmark {
                seed: args.seed.unwrap_or(0),
                ..Default::default()
            };
            let oracle = bench.run()?;
            let report = c1.run()?;
            Ok(print_table(&[oracle.criterion(), report.criterion()]))
        }
        Case::Case2 => {
            let mut task = cfg.joint.clone();
            if let Some(t) = args.target {
                task.coverage_target = t;
            }
            if let Some(t) = args.threshold {
                task.threshold = t;
            }
            if let Some(s) = args.seed {
                task.seed = s;
            }
            task.validate()?;
            let report = case2(&task, &Backends::default())?;
            let rounds: Vec<String> = report
                .outcome
                .best_overall_by_round()
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect();
            let monotone = CriterionResult {
                id: 5,
                name: "case 2, best overall by round".into(),
                passed: report.monotone(),
                detail: rounds.join(" "),
            };
            Ok(print_table(&[
                report.criterion(),
                monotone,
                crate::experiments::efficiency_criterion(),
            ]))
        }
    }
}
