use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use orderthree::automata::{
    accepts, parse_automaton, to_text, validate, Configuration, WitnessTree,
};
use orderthree::fragment::classify;
use orderthree::kripke::countermodel_search;
use orderthree::reductions::classical::classical_order3;
use orderthree::reductions::cnf::{cnf_to_conp_context, cnf_to_np_formula, Cnf3};
use orderthree::reductions::lba::{default_pn, lba_to_automaton, LbaDescription};
use orderthree::reductions::{ipc_to_automaton, ipc_to_iipc3};
use orderthree::term::normalize;
use orderthree::{
    parse_context, parse_formula, parse_term, prove, prove_iipc, typecheck, Context, Formula,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "orderthree",
    version,
    about = "Proof search, countermodels and reductions for intuitionistic propositional logic"
)]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula or a judgement `ctx |- goal`.
    Prove {
        /// Formula text, `@file`, or `-` for stdin.
        input: Option<String>,
        /// Print the long normal proof term.
        #[arg(long)]
        term: bool,
        /// Search for a Kripke countermodel with at most N states.
        #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "4")]
        refute: Option<usize>,
        #[arg(long, value_enum, default_value = "ipc")]
        fragment: Fragment,
    },
    /// Translate a formula into another formalism.
    Reduce {
        input: Option<String>,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Encode a DIMACS 3-CNF instance.
    Encode {
        /// DIMACS file, or `-` for stdin.
        file: Option<String>,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Repeat the last literal of short clauses.
        #[arg(long)]
        pad: bool,
    },
    /// Run or validate a monotonic automaton file.
    Automaton {
        #[command(subcommand)]
        action: AutomatonAction,
    },
    /// Report order and fragment membership.
    Classify { input: Option<String> },
    /// Type-check a proof term.
    Check {
        /// Term text, `@file`, or `-` for stdin.
        term: Option<String>,
        /// Expected type.
        #[arg(long = "type", value_name = "FORMULA")]
        ty: Option<String>,
        /// Hypotheses, `x: F, y: G`.
        #[arg(long, default_value = "")]
        context: String,
        /// Also print the normal form.
        #[arg(long)]
        normalize: bool,
    },
    /// Decide a linear bounded automaton on an input through its
    /// monotonic-automaton encoding.
    Lba {
        /// Machine description file, or `-` for stdin.
        file: Option<String>,
        /// Input symbols, separated by spaces.
        #[arg(long)]
        input: String,
        /// Number of step doublings; defaults to a bound on the
        /// configuration count.
        #[arg(long)]
        pn: Option<usize>,
        /// Print the generated automaton instead of running it.
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Subcommand)]
enum AutomatonAction {
    Run {
        file: Option<String>,
        /// Initial configuration `q {r1 r2}`, overriding the file.
        #[arg(long)]
        init: Option<String>,
        /// Print the accepting computation tree.
        #[arg(long)]
        witness: bool,
    },
    Validate {
        file: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fragment {
    Ipc,
    Iipc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Iipc3,
    Automaton,
    Classical3,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Np,
    Conp,
}

/// Outcome of a command: exit code, text lines and JSON fields.
struct Report {
    status: &'static str,
    code: u8,
    text: String,
    data: Value,
}

impl Report {
    fn new(status: &'static str, code: u8, text: String, data: Value) -> Self {
        Report {
            status,
            code,
            text,
            data,
        }
    }
}

type Res<T> = Result<T, String>;

fn read_source(arg: Option<&str>, literal: bool) -> Res<String> {
    match arg {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("reading stdin: {e}"))?;
            Ok(s)
        }
        Some(a) if a.starts_with('@') || !literal => {
            let path = a.strip_prefix('@').unwrap_or(a);
            std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))
        }
        Some(a) => Ok(a.to_string()),
    }
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

/// A formula, or a judgement `ctx |- goal`.
fn parse_judgement(text: &str) -> Res<(Context, Formula)> {
    let text = strip_comments(text);
    let err = |e: orderthree::Error| e.to_string();
    match text.rsplit_once("|-") {
        Some((ctx, goal)) => Ok((
            parse_context(ctx).map_err(err)?,
            parse_formula(goal.trim()).map_err(err)?,
        )),
        None => Ok((Context::new(), parse_formula(text.trim()).map_err(err)?)),
    }
}

fn judgement_text(ctx: &Context, goal: &Formula) -> String {
    if ctx.is_empty() {
        goal.to_string()
    } else {
        format!("{ctx} |- {goal}")
    }
}

fn cmd_prove(
    input: Option<&str>,
    term: bool,
    refute: Option<usize>,
    fragment: Fragment,
) -> Res<Report> {
    let (ctx, goal) = parse_judgement(&read_source(input, true)?)?;
    let result = match fragment {
        Fragment::Ipc => prove(&ctx, &goal),
        Fragment::Iipc => prove_iipc(&ctx, &goal).map_err(|e| e.to_string())?,
    };
    let judgement = judgement_text(&ctx, &goal);
    if let Some(w) = result.witness() {
        let ty =
            typecheck(&ctx, w).map_err(|e| format!("internal: witness does not check: {e}"))?;
        let mut text = String::from("provable\n");
        if term {
            text += &format!("witness: {w}\ncheck: {ty}\n");
        }
        let data = json!({ "judgement": judgement, "witness": w.to_string(), "visited": result.stats.visited });
        return Ok(Report::new("provable", 0, text, data));
    }
    let mut text = String::from("unprovable\n");
    let mut data = json!({ "judgement": judgement, "visited": result.stats.visited });
    if let Some(n) = refute {
        match countermodel_search(&ctx, &goal, n) {
            Some((m, c)) => {
                let transcript = m.transcript(c, &ctx, &goal);
                text += &format!(
                    "countermodel ({} states, refuting at c{c}):\n{m}transcript:\n{transcript}",
                    m.len()
                );
                data["countermodel"] = json!({
                    "states": m.len(),
                    "root": c,
                    "model": m.to_string(),
                    "transcript": transcript,
                });
            }
            None => {
                text += &format!("no countermodel with at most {n} states\n");
                data["countermodel"] = Value::Null;
            }
        }
    }
    Ok(Report::new("unprovable", 1, text, data))
}

fn cmd_reduce(input: Option<&str>, to: Target) -> Res<Report> {
    let (ctx, goal) = parse_judgement(&read_source(input, true)?)?;
    let phi = ctx.implication_to(goal);
    let (text, kind) = match to {
        Target::Iipc3 => (format!("{}\n", ipc_to_iipc3(&phi)), "iipc3"),
        Target::Automaton => {
            let m = ipc_to_automaton(&phi);
            (to_text(&m.automaton, Some(&m.initial)), "automaton")
        }
        Target::Classical3 => (
            format!("{}\n", classical_order3(&phi).map_err(|e| e.to_string())?),
            "classical3",
        ),
    };
    let data = json!({ "target": kind, "artifact": text });
    Ok(Report::new("reduced", 0, text, data))
}

fn cmd_encode(file: Option<&str>, mode: Mode, pad: bool) -> Res<Report> {
    let psi = Cnf3::parse_dimacs(&read_source(file, false)?, pad).map_err(|e| e.to_string())?;
    let text = match mode {
        Mode::Np => format!("{}\n", cnf_to_np_formula(&psi).map_err(|e| e.to_string())?),
        Mode::Conp => {
            let (ctx, goal) = cnf_to_conp_context(&psi).map_err(|e| e.to_string())?;
            let lines: Vec<String> = ctx.iter().map(|(n, f)| format!("{n}: {f}")).collect();
            format!("{}\n|- {goal}\n", lines.join(",\n"))
        }
    };
    let data = json!({ "instance": psi.to_string(), "artifact": text });
    Ok(Report::new("encoded", 0, text, data))
}

fn parse_config(text: &str) -> Res<Configuration> {
    let text = text.trim();
    let (state, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
    let body = rest.trim().trim_start_matches('{').trim_end_matches('}');
    let store = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty());
    Ok(Configuration::new(state, store))
}

fn witness_lines(t: &WitnessTree, depth: usize, out: &mut String) {
    let by = t
        .instruction
        .map(|i| format!(" by #{i}"))
        .unwrap_or_default();
    out.push_str(&format!("{}{}{by}\n", "  ".repeat(depth), t.config));
    for c in &t.children {
        witness_lines(c, depth + 1, out);
    }
}

fn cmd_automaton(action: &AutomatonAction) -> Res<Report> {
    match action {
        AutomatonAction::Validate { file } => {
            let (a, _) = parse_automaton(&read_source(file.as_deref(), false)?)
                .map_err(|e| e.to_string())?;
            let defects = validate(&a);
            let mut text: String = defects.iter().map(|d| format!("{d}\n")).collect();
            text += &format!("{} defects\n", defects.len());
            let data =
                json!({ "defects": defects.iter().map(|d| d.to_string()).collect::<Vec<_>>() });
            let (status, code) = if defects.is_empty() {
                ("valid", 0)
            } else {
                ("invalid", 1)
            };
            Ok(Report::new(status, code, text, data))
        }
        AutomatonAction::Run {
            file,
            init,
            witness,
        } => {
            let (a, file_init) = parse_automaton(&read_source(file.as_deref(), false)?)
                .map_err(|e| e.to_string())?;
            let defects = validate(&a);
            if let Some(d) = defects.first() {
                return Err(format!(
                    "automaton has {} defects; first: {d}",
                    defects.len()
                ));
            }
            let c = match init {
                Some(s) => parse_config(s)?,
                None => file_init
                    .ok_or("no initial configuration: add an 'init:' line or pass --init")?,
            };
            let r = accepts(&a, &c);
            let mut text = format!("{}\n", if r.accepted { "accepting" } else { "rejecting" });
            let mut data = json!({ "initial": c.to_string(), "visited": r.visited });
            if let (true, Some(w)) = (*witness, &r.witness) {
                if !w.is_valid_for(&a) {
                    return Err("internal: witness fails re-validation".into());
                }
                let mut tree = String::new();
                witness_lines(w, 0, &mut tree);
                text += &format!(
                    "witness ({} nodes, height {}, checked):\n{tree}",
                    w.size(),
                    w.height()
                );
                data["witness"] = json!(tree);
            }
            let (status, code) = if r.accepted {
                ("accepting", 0)
            } else {
                ("rejecting", 1)
            };
            Ok(Report::new(status, code, text, data))
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_classify(input: Option<&str>) -> Res<Report> {
    let (ctx, goal) = parse_judgement(&read_source(input, true)?)?;
    let phi = ctx.implication_to(goal);
    let c = classify(&phi);
    let part = c
        .partition
        .as_ref()
        .map(|p| {
            format!(
                " (data: {}; control: {})",
                p.data.join(" "),
                p.control.join(" ")
            )
        })
        .unwrap_or_default();
    let order = c.order.map_or("n/a".to_string(), |k| k.to_string());
    let text = format!(
        "formula: {phi}\nimplicational: {}\norder: {order}\nT1-: {}\nT2-: {}\nT3-: {}{part}\norder-two-plus: {}\n",
        yes(c.is_implicational),
        yes(c.in_t1m),
        yes(c.in_t2m),
        yes(c.in_t3m),
        yes(c.in_order_two_plus),
    );
    let data = json!({
        "formula": phi.to_string(),
        "implicational": c.is_implicational,
        "order": c.order,
        "t1m": c.in_t1m,
        "t2m": c.in_t2m,
        "t3m": c.in_t3m,
        "partition": c.partition.map(|p| json!({ "data": p.data, "control": p.control })),
        "order_two_plus": c.in_order_two_plus,
    });
    Ok(Report::new("classified", 0, text, data))
}

fn cmd_check(term: Option<&str>, ty: Option<&str>, context: &str, norm: bool) -> Res<Report> {
    let err = |e: orderthree::Error| e.to_string();
    let t = parse_term(strip_comments(&read_source(term, true)?).trim()).map_err(err)?;
    let ctx = parse_context(context).map_err(err)?;
    let expected = ty.map(parse_formula).transpose().map_err(err)?;
    let mut data = json!({ "term": t.to_string() });
    let got = match typecheck(&ctx, &t) {
        Ok(f) => f,
        Err(e) => {
            data["error"] = json!(e.to_string());
            return Ok(Report::new(
                "ill-typed",
                1,
                format!("ill-typed: {e}\n"),
                data,
            ));
        }
    };
    data["type"] = json!(got.to_string());
    let mut text = format!("type: {got}\n");
    if norm {
        let n = normalize(&ctx, &t).map_err(err)?;
        text += &format!("normal form: {n}\n");
        data["normal_form"] = json!(n.to_string());
    }
    match expected {
        Some(e) if e != got => {
            text = format!("mismatch: expected {e}\n{text}");
            Ok(Report::new("mismatch", 1, text, data))
        }
        _ => Ok(Report::new("well-typed", 0, text, data)),
    }
}

fn cmd_lba(file: Option<&str>, input: &str, pn: Option<usize>, emit: bool) -> Res<Report> {
    let lba = LbaDescription::parse(&read_source(file, false)?).map_err(|e| e.to_string())?;
    let word: Vec<&str> = input.split_whitespace().collect();
    let p = pn.unwrap_or_else(|| default_pn(&lba, word.len()));
    let (a, c) = lba_to_automaton(&lba, &word, p).map_err(|e| e.to_string())?;
    if emit {
        let text = to_text(&a, Some(&c));
        return Ok(Report::new(
            "encoded",
            0,
            text.clone(),
            json!({ "pn": p, "artifact": text }),
        ));
    }
    let r = accepts(&a, &c);
    let data = json!({ "pn": p, "states": a.states.len(), "registers": a.registers.len(), "visited": r.visited });
    let text = format!(
        "{}\n{} states, {} registers, {} instructions, p_n = {p}\n",
        if r.accepted { "accepting" } else { "rejecting" },
        a.states.len(),
        a.registers.len(),
        a.instructions.len()
    );
    Ok(if r.accepted {
        Report::new("accepting", 0, text, data)
    } else {
        Report::new("rejecting", 1, text, data)
    })
}

fn run(cli: &Cli) -> Res<Report> {
    match &cli.command {
        Command::Prove {
            input,
            term,
            refute,
            fragment,
        } => cmd_prove(input.as_deref(), *term, *refute, *fragment),
        Command::Reduce { input, to } => cmd_reduce(input.as_deref(), *to),
        Command::Encode { file, mode, pad } => cmd_encode(file.as_deref(), *mode, *pad),
        Command::Automaton { action } => cmd_automaton(action),
        Command::Classify { input } => cmd_classify(input.as_deref()),
        Command::Check {
            term,
            ty,
            context,
            normalize,
        } => cmd_check(term.as_deref(), ty.as_deref(), context, *normalize),
        Command::Lba {
            file,
            input,
            pn,
            emit,
        } => cmd_lba(file.as_deref(), input, *pn, *emit),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Prove { .. } => "prove",
        Command::Reduce { .. } => "reduce",
        Command::Encode { .. } => "encode",
        Command::Automaton { .. } => "automaton",
        Command::Classify { .. } => "classify",
        Command::Check { .. } => "check",
        Command::Lba { .. } => "lba",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(r) => {
            if cli.json {
                let env = json!({ "command": name, "status": r.status, "exit_code": r.code, "data": r.data });
                println!("{env}");
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            if cli.json {
                let env = json!({ "command": name, "status": "error", "exit_code": 2, "error": e });
                println!("{env}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(2)
        }
    }
}
