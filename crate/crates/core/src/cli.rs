//! The `eavsearch` command line.
//!
//! Exit codes: 0 success, 2 bad input (parse errors, bad queries, missing
//! judgments), 3 environment or I/O failure. Data goes to stdout,
//! diagnostics to stderr.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::eval::run_eval;
use crate::graph::{parse_ntriples, Graph, Triple};
use crate::index::{index_basic, index_rules, read_index, write_index, Index, IndexKind};
use crate::inference::{apply_rules, materialize_all, parse_rules, RuleFile};
use crate::query::{evaluate, parse_query, Relation};
use crate::QueryError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "eavsearch",
    version,
    about = "Keyword search over RDF entities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply rules to N-Triples input and write the closed graph.
    Infer {
        /// N-Triples files; stdin when none are given.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Build and persist an index.
    Index {
        /// N-Triples files; stdin when none are given.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        rules: Option<PathBuf>,
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_enum, default_value_t = KindArg::Basic)]
        kind: KindArg,
    },
    /// Run one query.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        query: String,
    },
    /// Read queries from stdin, one per line.
    Repl {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Score a query set against relevance judgments.
    Eval {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        qrels: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Basic,
    Rules,
}

impl From<KindArg> for IndexKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Basic => IndexKind::Basic,
            KindArg::Rules => IndexKind::Rules,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

/// A failed command: exit code plus message.
struct Failure(i32, String);

type Outcome = Result<(), Failure>;

fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, msg.to_string())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))
}

struct Io<'a> {
    stdin: &'a mut dyn BufRead,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn out(&mut self, text: &str) -> Outcome {
        self.stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure(EXIT_IO, format!("stdout: {e}")))
    }

    fn diag(&mut self, text: &str) {
        let _ = writeln!(self.stderr, "{text}");
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_INPUT
                }
            };
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    let outcome = match cli.command {
        Command::Infer {
            inputs,
            rules,
            output,
        } => cmd_infer(&mut io, &inputs, rules.as_deref(), output.as_deref()),
        Command::Index {
            inputs,
            rules,
            index,
            kind,
        } => cmd_index(&mut io, &inputs, rules.as_deref(), &index, kind.into()),
        Command::Query {
            index,
            format,
            query,
        } => cmd_query(&mut io, &index, &query, format),
        Command::Repl { index, format } => cmd_repl(&mut io, &index, format),
        Command::Eval {
            index,
            queries,
            qrels,
        } => cmd_eval(&mut io, &index, &queries, &qrels),
    };
    let _ = io.stdout.flush();
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            io.diag(&format!("error: {msg}"));
            code
        }
    }
}

fn load_triples(io: &mut Io, inputs: &[PathBuf]) -> Result<Vec<Triple>, Failure> {
    if inputs.is_empty() {
        let mut text = String::new();
        io.stdin
            .read_to_string(&mut text)
            .map_err(|e| Failure(EXIT_IO, format!("stdin: {e}")))?;
        return parse_ntriples(&text).map_err(|e| input_err(format!("<stdin>: {e}")));
    }
    let mut triples = Vec::new();
    for path in inputs {
        let text = read_file(path)?;
        triples.extend(
            parse_ntriples(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?,
        );
    }
    Ok(triples)
}

fn load_rules(path: Option<&Path>) -> Result<RuleFile, Failure> {
    match path {
        None => Ok(RuleFile::default()),
        Some(p) => {
            parse_rules(&read_file(p)?).map_err(|e| input_err(format!("{}: {e}", p.display())))
        }
    }
}

/// Parses inputs and rules and runs inference to fixpoint.
fn closed_graph(
    io: &mut Io,
    inputs: &[PathBuf],
    rules: Option<&Path>,
) -> Result<(Graph, Graph, RuleFile), Failure> {
    let triples = load_triples(io, inputs)?;
    let rules = load_rules(rules)?;
    let graph = Graph::from_triples(&triples);
    let closed = apply_rules(&graph, &rules.rules).map_err(input_err)?;
    Ok((graph, closed, rules))
}

fn cmd_infer(
    io: &mut Io,
    inputs: &[PathBuf],
    rules: Option<&Path>,
    output: Option<&Path>,
) -> Outcome {
    let (graph, closed, _) = closed_graph(io, inputs, rules)?;
    let text = closed.to_ntriples();
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?,
        None => io.out(&text)?,
    }
    io.diag(&format!("input edges: {}", graph.edges().len()));
    io.diag(&format!(
        "added: {}",
        closed.edges().len() - graph.edges().len()
    ));
    Ok(())
}

fn cmd_index(
    io: &mut Io,
    inputs: &[PathBuf],
    rules: Option<&Path>,
    dir: &Path,
    kind: IndexKind,
) -> Outcome {
    let (_, closed, rules) = closed_graph(io, inputs, rules)?;
    let index = match kind {
        IndexKind::Basic => index_basic(&closed),
        IndexKind::Rules => {
            if rules.patterns.is_empty() {
                return Err(input_err(
                    "a RULES index needs a rules file with at least one @pattern",
                ));
            }
            index_rules(&materialize_all(&closed, &rules.patterns))
        }
    };
    write_index(&index, dir).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    io.out(&format!("docs: {}\n", index.len()))
}

fn load_index(dir: &Path) -> Result<Index, Failure> {
    read_index(dir).map_err(|e| Failure(EXIT_IO, e.to_string()))
}

/// The error message followed by the query and a caret under the offset.
pub fn caret_diagnostic(query: &str, err: &QueryError) -> String {
    let mut msg = err.to_string();
    if let Some(offset) = err.offset() {
        msg.push_str(&format!("\n  {query}\n  {}^", " ".repeat(offset)));
    }
    msg
}

fn escape_tsv(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

/// Renders a relation: TSV with one line per row, or JSON lines keyed by
/// short field names plus `doc_id` and `score`.
pub fn render(rel: &Relation, format: Format) -> String {
    let mut out = String::new();
    for row in &rel.rows {
        match format {
            Format::Tsv => {
                let cells: Vec<String> = rel
                    .columns
                    .iter()
                    .map(|&f| escape_tsv(row.get(f)))
                    .collect();
                out.push_str(&cells.join("\t"));
            }
            Format::Json => {
                out.push('{');
                for &f in &rel.columns {
                    out.push_str(&format!("{:?}:{},", f.short(), json_str(row.get(f))));
                }
                out.push_str(&format!(
                    "\"doc_id\":{},\"score\":{}}}",
                    row.doc_id, row.score
                ));
            }
        }
        out.push('\n');
    }
    out
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn run_one(io: &mut Io, index: &Index, query: &str, format: Format) -> Outcome {
    let ast = parse_query(query).map_err(|e| Failure(EXIT_INPUT, caret_diagnostic(query, &e)))?;
    let rel = evaluate(index, &ast);
    io.out(&render(&rel, format))?;
    io.diag(&format!("rows: {}", rel.len()));
    Ok(())
}

fn cmd_query(io: &mut Io, dir: &Path, query: &str, format: Format) -> Outcome {
    let index = load_index(dir)?;
    run_one(io, &index, query, format)
}

fn cmd_repl(io: &mut Io, dir: &Path, format: Format) -> Outcome {
    let mut index = load_index(dir)?;
    let mut line = String::new();
    loop {
        let _ = write!(io.stderr, "eavsearch> ");
        let _ = io.stderr.flush();
        line.clear();
        let n = io
            .stdin
            .read_line(&mut line)
            .map_err(|e| Failure(EXIT_IO, format!("stdin: {e}")))?;
        if n == 0 {
            return Ok(());
        }
        let input = line.trim();
        if input.is_empty() {
            continue;
        }
        if input == ":quit" || input == ":q" {
            return Ok(());
        }
        if let Some(rest) = input.strip_prefix(":index") {
            let path = rest.trim();
            if path.is_empty() {
                io.diag("error: usage: :index <dir>");
                continue;
            }
            match load_index(Path::new(path)) {
                Ok(new) => {
                    io.diag(&format!(
                        "index: {} ({} {} docs)",
                        path,
                        new.kind(),
                        new.len()
                    ));
                    index = new;
                }
                Err(Failure(_, msg)) => io.diag(&format!("error: {msg}")),
            }
            continue;
        }
        if input.starts_with(':') {
            io.diag(&format!(
                "error: unknown command {input}; try :index <dir> or :quit"
            ));
            continue;
        }
        match run_one(io, &index, input, format) {
            Ok(()) => io.out("\n")?,
            Err(Failure(EXIT_IO, msg)) => return Err(Failure(EXIT_IO, msg)),
            Err(Failure(_, msg)) => io.diag(&format!("error: {msg}")),
        }
    }
}

fn cmd_eval(io: &mut Io, dir: &Path, queries: &Path, qrels: &Path) -> Outcome {
    let index = load_index(dir)?;
    let queries_text = read_file(queries)?;
    let qrels_text = read_file(qrels)?;
    let report =
        run_eval(&index, &queries_text, &qrels_text).map_err(|e| input_err(format!("{e}")))?;
    io.out(&report.to_tsv())?;
    let missing: Vec<&str> = report.missing().collect();
    if !missing.is_empty() {
        return Err(input_err(format!(
            "no relevance judgments for {}",
            missing.join(", ")
        )));
    }
    Ok(())
}
