use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use synqc::compiler::{export, Circuit, ExportFormat, QubitConfig};
use synqc::lexicon::Lexicon;
use synqc::pipeline::{self, CompileOptions, Form, Rewrite};
use synqc::pregroup::BasicType;
use synqc::simulator::simulate;
use synqc::training::{optimize, pair_loss, FdConfig, Method, SpsaConfig};
use synqc::{json, Error, ParameterStore};

#[derive(Parser)]
#[command(name = "synqc", version, about = "Sentences to diagrams to parametrised circuits")]
struct Cli {
    /// Lexicon file; defaults to $SYNQC_LEXICON, then the built-in lexicon.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a sentence and print its linkage.
    Parse { sentence: String },
    /// Print the sentence diagram.
    Diagram {
        sentence: String,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Json)]
        format: DiagramFormat,
    },
    /// Print the rewritten diagram a form compiles from.
    Rewrite {
        sentence: String,
        #[command(flatten)]
        compile: CompileArgs,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Json)]
        format: DiagramFormat,
    },
    /// Compile a sentence to circuit JSON.
    Compile {
        sentence: String,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Write the circuit JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the QASM subset with angles resolved.
        #[arg(long)]
        qasm: Option<PathBuf>,
    },
    /// Simulate a sentence or a compiled circuit file.
    Simulate {
        #[arg(required_unless_present = "circuit", conflicts_with = "circuit")]
        sentence: Option<String>,
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Fidelity of the meanings of two sentences.
    Compare {
        a: String,
        b: String,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Exit 1 when the fidelity is below this.
        #[arg(long, default_value_t = 0.99)]
        threshold: f64,
    },
    /// Train shared angles so paired sentences agree.
    Train {
        /// JSON list of {"a", "b"} pairs; defaults to the lexicon's pairs.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Spsa)]
        method: MethodArg,
        /// Maximum number of loss evaluations.
        #[arg(long, default_value_t = 2000)]
        budget: usize,
        #[arg(long)]
        spsa_a: Option<f64>,
        #[arg(long)]
        spsa_c: Option<f64>,
        #[arg(long)]
        learning_rate: Option<f64>,
        /// Exit 1 when the final loss is above this.
        #[arg(long, default_value_t = 0.01)]
        target: f64,
        #[arg(long)]
        out_params: Option<PathBuf>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Write a compiled circuit or diagram in an interchange format.
    Export {
        sentence: String,
        #[command(flatten)]
        compile: CompileArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = ExportArg::Json)]
        format: ExportArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spsa,
    Fd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Json,
    Qasm,
    Dot,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long, default_value = "bigraph")]
    form: Form,
    #[arg(long, default_value = "snake")]
    rewrite: Rewrite,
    /// Qubits per basic type, e.g. `n=1,s=1`; defaults to the lexicon's.
    #[arg(long)]
    qubits: Option<String>,
    /// Ansatz layers per word; defaults to the lexicon's.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args)]
struct ParamArgs {
    /// Parameter store JSON; missing angles are drawn from --seed.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Ungrammatical(_)) { 1 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("synqc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load_lexicon(path: Option<&Path>) -> Result<Lexicon, Error> {
    match path {
        Some(p) => Lexicon::load(p),
        None => Lexicon::from_env(),
    }
}

fn options(lex: &Lexicon, args: &CompileArgs) -> Result<CompileOptions, Error> {
    let mut opts = CompileOptions::new(lex, args.form, args.rewrite);
    if let Some(spec) = &args.qubits {
        let mut qubits = lex.qubits.qubits.clone();
        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
            let (name, count) = part
                .split_once('=')
                .ok_or_else(|| Error::Compile(format!("qubit spec `{part}` is not `type=count`")))?;
            let count: usize =
                count.trim().parse().map_err(|_| Error::Compile(format!("qubit count `{count}` is not a number")))?;
            let base = BasicType::new(name.trim())?;
            if !lex.grammar.contains(&base) {
                return Err(Error::UnknownBasicType(base.to_string()));
            }
            qubits.insert(base, count);
        }
        for (alias, target) in lex.grammar.aliases() {
            if spec.split(',').all(|p| p.split('=').next().map(str::trim) != Some(alias.name())) {
                if let Some(&q) = qubits.get(target) {
                    qubits.insert(alias.clone(), q);
                }
            }
        }
        opts.qubits = QubitConfig::new(qubits, lex.qubits.ansatz_depth)?;
    }
    if let Some(depth) = args.depth {
        opts.qubits.ansatz_depth = depth;
    }
    Ok(opts)
}

fn load_params(args: &ParamArgs, names: &[String]) -> Result<ParameterStore, Error> {
    let mut store = match &args.params {
        Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
        None => ParameterStore::new(),
    };
    store.fill_missing(names, args.seed);
    Ok(store)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    let lex = load_lexicon(cli.lexicon.as_deref())?;
    match cli.command {
        Command::Parse { sentence } => {
            let report = pipeline::parse_report(&lex, &sentence)?;
            emit(None, &json::to_vec(&report)?)?;
            Ok(if report.grammatical { 0 } else { 1 })
        }
        Command::Diagram { sentence, format } => {
            let (_, d) = pipeline::diagram(&lex, &sentence)?;
            emit(None, &render(&d, format)?)?;
            Ok(0)
        }
        Command::Rewrite { sentence, compile, format } => {
            let d = pipeline::compile_diagram(&lex, &sentence, &options(&lex, &compile)?)?;
            emit(None, &render(&d, format)?)?;
            Ok(0)
        }
        Command::Compile { sentence, compile, params, out, qasm } => {
            let c = pipeline::compile(&lex, &sentence, &options(&lex, &compile)?)?;
            emit(out.as_deref(), &export(&c, ExportFormat::Json, None)?)?;
            if let Some(path) = qasm {
                let store = load_params(&params, &c.params)?;
                fs::write(path, export(&c, ExportFormat::Qasm, Some(&store))?).map_err(Error::from)?;
            }
            Ok(0)
        }
        Command::Simulate { sentence, circuit, compile, params } => {
            let c = match (sentence, circuit) {
                (_, Some(path)) => {
                    let c: Circuit = serde_json::from_str(&fs::read_to_string(path).map_err(Error::from)?)
                        .map_err(Error::from)?;
                    c.validate()?;
                    c
                }
                (Some(s), None) => pipeline::compile(&lex, &s, &options(&lex, &compile)?)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let store = load_params(&params, &c.params)?;
            emit(None, &json::to_vec(&simulate(&c, &store)?)?)?;
            Ok(0)
        }
        Command::Compare { a, b, compile, params, threshold } => {
            let opts = options(&lex, &compile)?;
            let names: Vec<String> = [&a, &b]
                .iter()
                .map(|s| pipeline::compile(&lex, s, &opts).map(|c| c.params))
                .collect::<Result<Vec<_>, _>>()?
                .concat();
            let store = load_params(&params, &names)?;
            let report = pipeline::compare(&lex, &a, &b, &opts, &store)?;
            emit(None, &json::to_vec(&report)?)?;
            Ok(if report.fidelity >= threshold { 0 } else { 1 })
        }
        Command::Train {
            pairs,
            compile,
            params,
            method,
            budget,
            spsa_a,
            spsa_c,
            learning_rate,
            target,
            out_params,
            trace,
        } => {
            let opts = options(&lex, &compile)?;
            let pairs: Vec<(String, String)> = match pairs {
                Some(p) => {
                    let list: Vec<synqc::lexicon::PairEntry> =
                        serde_json::from_str(&fs::read_to_string(p).map_err(Error::from)?).map_err(Error::from)?;
                    list.into_iter().map(|e| (e.a, e.b)).collect()
                }
                None => lex.pairs.iter().map(|e| (e.a.clone(), e.b.clone())).collect(),
            };
            let task = pipeline::pair_task(&lex, &pairs, &opts)?;
            let store = load_params(&params, &task.params())?;
            let method = match method {
                MethodArg::Spsa => {
                    let mut cfg = SpsaConfig::default();
                    cfg.a = spsa_a.unwrap_or(cfg.a);
                    cfg.c = spsa_c.unwrap_or(cfg.c);
                    Method::Spsa(cfg)
                }
                MethodArg::Fd => {
                    let mut cfg = FdConfig::default();
                    cfg.learning_rate = learning_rate.unwrap_or(cfg.learning_rate);
                    Method::FiniteDifference(cfg)
                }
            };
            let initial = pair_loss(&task, &store)?;
            let result = optimize(&task, &store, method, budget, params.seed)?;
            if let Some(path) = out_params {
                fs::write(path, json::to_vec(&result.store)?).map_err(Error::from)?;
            }
            if let Some(path) = trace {
                fs::write(path, json::to_vec(&result.trace)?).map_err(Error::from)?;
            }
            let summary = format!(
                "pairs: {}\nparameters: {}\ninitial loss: {}\nfinal loss: {}\nevaluations: {} of {budget}\niterations: {}\n",
                task.pairs.len(),
                task.params().len(),
                json::format_f64(initial),
                json::format_f64(result.best_loss),
                result.evaluations,
                result.trace.last().map_or(0, |t| t.iteration),
            );
            emit(None, summary.as_bytes())?;
            Ok(if result.best_loss <= target { 0 } else { 1 })
        }
        Command::Export { sentence, compile, params, format, out } => {
            let opts = options(&lex, &compile)?;
            let bytes = match format {
                ExportArg::Dot => pipeline::compile_diagram(&lex, &sentence, &opts)?.to_dot().into_bytes(),
                ExportArg::Json => export(&pipeline::compile(&lex, &sentence, &opts)?, ExportFormat::Json, None)?,
                ExportArg::Qasm => {
                    let c = pipeline::compile(&lex, &sentence, &opts)?;
                    let store = load_params(&params, &c.params)?;
                    export(&c, ExportFormat::Qasm, Some(&store))?
                }
            };
            emit(out.as_deref(), &bytes)?;
            Ok(0)
        }
    }
}

fn render(d: &synqc::diagram::Diagram, format: DiagramFormat) -> Result<Vec<u8>, Error> {
    match format {
        DiagramFormat::Json => json::to_vec(d),
        DiagramFormat::Dot => Ok(d.to_dot().into_bytes()),
    }
}
