//! Batch command-line surface over the library: schema checking, theory
//! compilation, network building, inference, the numeric oracle, and dataset
//! comparison. Exit codes: 0 success, 1 check failed (witness printed), 2
//! usage or parse error.

use clap::{Parser, Subcommand};
use cohlog::constructions::{hard_code, schema_to_theory};
use cohlog::finset::{product, FinFunction, FinSet};
use cohlog::minifloat::{build_tables, oracle_eval, FloatFormat, FloatTables};
use cohlog::nn::{
    apply_constraints, build_model, build_network_with_acts, infer, Architecture, NnTheory,
    SpanDataset,
};
use cohlog::schema::check_functorial;
use cohlog::semantics::check_model;
use cohlog::syntax::{parse_theory, print_theory};
use cohlog::text;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cohlog", about = "Coherent-logic engine over finite sets", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Functorial schema commands.
    #[command(subcommand)]
    Schema(SchemaCmd),
    /// Compiles an instance into the theory whose models are its copies.
    Hardcode { schema: PathBuf, instance: PathBuf },
    /// Coherent theory commands.
    #[command(subcommand)]
    Theory(TheoryCmd),
    /// Neural network theory commands.
    #[command(subcommand)]
    Nn(NnCmd),
    /// Span dataset commands.
    #[command(subcommand)]
    Dataset(DatasetCmd),
}

#[derive(Subcommand)]
enum SchemaCmd {
    /// Checks an instance against its schema's path equations.
    Check { schema: PathBuf, instance: PathBuf },
    /// Prints the coherent theory of a schema.
    ToTheory { schema: PathBuf },
}

#[derive(Subcommand)]
enum TheoryCmd {
    /// Checks a structure against a theory's axioms.
    Check { theory: PathBuf, model: PathBuf },
}

#[derive(Clone, clap::Args)]
struct NetArgs {
    /// Architecture string, e.g. `2-relu-2-id-1`.
    #[arg(long)]
    arch: String,
    /// Float format string, e.g. `s1e2m1` or `s1e1m1:sat`.
    #[arg(long)]
    float: String,
    /// Constraint file (`tie`/`fix` lines), applied to the theory.
    #[arg(long)]
    constraints: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NnCmd {
    /// Builds the network theory and the inference interpretation.
    Build {
        #[command(flatten)]
        net: NetArgs,
        /// Output file for the network theory.
        #[arg(long)]
        out_theory: PathBuf,
        /// Output file for the interpretation from the dataset theory.
        #[arg(long)]
        out_interp: PathBuf,
        /// Optional output file for the dataset theory itself.
        #[arg(long)]
        out_span: Option<PathBuf>,
    },
    /// Checks a parameter file as a model of the network theory.
    Check {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        params: PathBuf,
    },
    /// Runs categorical inference (model transport) over the full domain.
    Infer {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluates the network numerically over the full domain.
    Oracle {
        #[command(flatten)]
        net: NetArgs,
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for row evaluation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Subcommand)]
enum DatasetCmd {
    /// Exits 0 iff the two datasets are bit-identical; prints the first
    /// differing row otherwise.
    Diff { a: PathBuf, b: PathBuf },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, content: &str) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve_act(tables: &FloatTables, name: &str) -> Result<FinFunction, String> {
    if let Some(file) = name.strip_prefix("table:") {
        let text = read(Path::new(file))?;
        let pairs = text::parse_activation_pairs(&text).map_err(|e| format!("{file}: {e}"))?;
        tables.activation_from_pairs(&pairs).map_err(|e| e.to_string())
    } else {
        tables.activation(name).map_err(|e| e.to_string())
    }
}

fn setup(net: &NetArgs) -> Result<(FloatTables, Vec<FinFunction>, NnTheory), String> {
    let format = FloatFormat::parse(&net.float).map_err(|e| e.to_string())?;
    let tables = build_tables(format).map_err(|e| e.to_string())?;
    let arch = Architecture::parse(&net.arch, format).map_err(|e| e.to_string())?;
    let acts = arch
        .activations
        .iter()
        .map(|name| resolve_act(&tables, name))
        .collect::<Result<Vec<_>, _>>()?;
    let mut nn =
        build_network_with_acts(&arch, &tables, &acts).map_err(|e| e.to_string())?;
    if let Some(file) = &net.constraints {
        let cs = text::parse_constraints(&read(file)?)
            .map_err(|e| format!("{}: {e}", file.display()))?;
        nn = apply_constraints(&nn, &cs).map_err(|e| e.to_string())?;
    }
    Ok((tables, acts, nn))
}

fn load_params(
    nn: &NnTheory,
    path: &Path,
) -> Result<cohlog::nn::ParamAssignment, String> {
    let params =
        text::parse_params(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    params.validate(&nn.arch).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(params)
}

fn oracle_dataset(
    tables: &FloatTables,
    arch: &Architecture,
    acts: &[FinFunction],
    params: &cohlog::nn::ParamAssignment,
    jobs: usize,
) -> Result<SpanDataset, String> {
    let r = tables.format.size();
    let n_in = arch.widths[0];
    let m_out = *arch.widths.last().unwrap();
    let rows = r
        .checked_pow(n_in as u32)
        .filter(|&x| x <= 1 << 20)
        .ok_or("input domain too large to enumerate")?;
    let in_prod = product(&vec![tables.format.value_set(); n_in]);
    let out_prod = product(&vec![tables.format.value_set(); m_out]);
    let jobs = jobs.clamp(1, rows.max(1));
    let chunk = rows.div_ceil(jobs);
    let mut t_table = vec![0usize; rows];
    std::thread::scope(|scope| -> Result<(), String> {
        let mut handles = Vec::new();
        for (w, slice) in t_table.chunks_mut(chunk).enumerate() {
            let in_prod = &in_prod;
            let out_prod = &out_prod;
            handles.push(scope.spawn(move || -> Result<(), String> {
                for (off, cell) in slice.iter_mut().enumerate() {
                    let x = w * chunk + off;
                    let input = in_prod.index_to_tuple(x);
                    let output = oracle_eval(
                        tables,
                        &arch.widths,
                        acts,
                        &params.weights,
                        &params.biases,
                        &input,
                    )
                    .map_err(|e| e.to_string())?;
                    *cell = out_prod.tuple_to_index(&output);
                }
                Ok(())
            }));
        }
        for h in handles {
            h.join().expect("worker panicked")?;
        }
        Ok(())
    })?;
    let n_set = FinSet::new(rows);
    Ok(SpanDataset {
        format: tables.format,
        n_in,
        m_out,
        n_set: n_set.clone(),
        f: FinFunction::new(n_set.clone(), in_prod.as_finset(), (0..rows).collect())
            .map_err(|e| e.to_string())?,
        t: FinFunction::new(n_set, out_prod.as_finset(), t_table)
            .map_err(|e| e.to_string())?,
    })
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Schema(SchemaCmd::Check { schema, instance }) => {
            let schema = text::parse_schema(&read(&schema)?).map_err(|e| e.to_string())?;
            let inst = text::parse_instance(&read(&instance)?, &schema)
                .map_err(|e| e.to_string())?;
            let verdict = check_functorial(&inst).map_err(|e| e.to_string())?;
            println!("{verdict}");
            Ok(if verdict.is_ok() { 0 } else { 1 })
        }
        Cmd::Schema(SchemaCmd::ToTheory { schema }) => {
            let schema = text::parse_schema(&read(&schema)?).map_err(|e| e.to_string())?;
            let thy = schema_to_theory(&schema).map_err(|e| e.to_string())?;
            print!("{}", print_theory(&thy));
            Ok(0)
        }
        Cmd::Hardcode { schema, instance } => {
            let schema = text::parse_schema(&read(&schema)?).map_err(|e| e.to_string())?;
            let inst = text::parse_instance(&read(&instance)?, &schema)
                .map_err(|e| e.to_string())?;
            let thy = hard_code(&inst).map_err(|e| e.to_string())?;
            print!("{}", print_theory(&thy));
            Ok(0)
        }
        Cmd::Theory(TheoryCmd::Check { theory, model }) => {
            let thy = parse_theory(&read(&theory)?).map_err(|e| e.to_string())?;
            let m = text::parse_structure(&read(&model)?, &thy.signature)
                .map_err(|e| e.to_string())?;
            let report = check_model(&m, &thy).map_err(|e| e.to_string())?;
            println!("{report}");
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Cmd::Nn(NnCmd::Build { net, out_theory, out_interp, out_span }) => {
            let (_, _, nn) = setup(&net)?;
            write_file(&out_theory, &print_theory(&nn.theory))?;
            write_file(&out_interp, &text::print_interpretation(&nn.interp))?;
            if let Some(path) = out_span {
                write_file(&path, &print_theory(&nn.rspan))?;
            }
            Ok(0)
        }
        Cmd::Nn(NnCmd::Check { net, params }) => {
            let (tables, _, nn) = setup(&net)?;
            let params = load_params(&nn, &params)?;
            let m = build_model(&nn, &tables, &params).map_err(|e| e.to_string())?;
            let report = check_model(&m, &nn.theory).map_err(|e| e.to_string())?;
            println!("{report}");
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Cmd::Nn(NnCmd::Infer { net, params, out }) => {
            let (tables, _, nn) = setup(&net)?;
            let params = load_params(&nn, &params)?;
            let m = build_model(&nn, &tables, &params).map_err(|e| e.to_string())?;
            let ds = infer(&nn, &tables, &m).map_err(|e| e.to_string())?;
            write_file(&out, &text::print_dataset(&ds))?;
            Ok(0)
        }
        Cmd::Nn(NnCmd::Oracle { net, params, out, jobs }) => {
            let (tables, acts, nn) = setup(&net)?;
            let params = load_params(&nn, &params)?;
            let ds = oracle_dataset(&tables, &nn.arch, &acts, &params, jobs)?;
            write_file(&out, &text::print_dataset(&ds))?;
            Ok(0)
        }
        Cmd::Dataset(DatasetCmd::Diff { a, b }) => {
            let da = text::parse_dataset(&read(&a)?).map_err(|e| e.to_string())?;
            let db = text::parse_dataset(&read(&b)?).map_err(|e| e.to_string())?;
            match text::dataset_diff(&da, &db) {
                None => {
                    println!("identical");
                    Ok(0)
                }
                Some(row) => {
                    println!("{row}");
                    Ok(1)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
