//! Command-line front end: polynomials, parity data, and zero portraits of
//! virtual knots and links given in extended Conway notation.
//!
//! Exit codes: 0 success, 1 domain error (bad input, unsupported family),
//! 2 resource limit (state sum too large).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use vkp::conway::parse_conway;
use vkp::diagram::{VirtualDiagram, DEFAULT_STATE_LIMIT};
use vkp::error::Error;
use vkp::families::{compare_forms, family_eval, family_recursive, FamilyId};
use vkp::laurent::LaurentPolynomial;
use vkp::parity::{nontriviality_certificate, parity_bracket_with_limit};
use vkp::portrait::{portrait_grid, to_csv, to_svg};
use vkp::tuttegraph::{graph_from_conway, reduce_graph, relative_tutte, tutte_to_jones};

#[derive(Parser)]
#[command(name = "vkp", version, about = "virtual knot polynomial toolkit")]
struct Cli {
    /// Emit JSON instead of plain text
    #[arg(long, global = true)]
    json: bool,

    /// Size of the worker thread pool
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,

    /// Classical-crossing limit for state sums
    #[arg(long, global = true, value_name = "N")]
    state_limit: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConwayInput {
    /// Conway expression (quote it: spaces and parentheses)
    #[arg(value_name = "CONWAY", required_unless_present = "file")]
    conway: Option<String>,

    /// Read one Conway expression per line instead
    #[arg(long, conflicts_with = "conway")]
    file: Option<String>,
}

impl ConwayInput {
    fn expressions(&self) -> Result<Vec<String>, Error> {
        match (&self.conway, &self.file) {
            (Some(s), _) => Ok(vec![s.clone()]),
            (None, Some(path)) => Ok(std::fs::read_to_string(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect()),
            (None, None) => unreachable!("clap enforces one input"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolyKind {
    Tutte,
    Bracket,
    Jones,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyForm {
    Closed,
    Recursive,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a Conway expression and print its syntax tree
    Parse(ConwayInput),
    /// Kauffman bracket polynomial of a diagram
    Bracket(ConwayInput),
    /// Jones polynomial of a diagram
    Jones {
        #[command(flatten)]
        input: ConwayInput,
        /// Skip writhe normalization
        #[arg(long)]
        no_normalize: bool,
    },
    /// Reduced relative Tutte polynomial via the graph engine
    Tutte {
        #[command(flatten)]
        input: ConwayInput,
        /// Print the polynomial of the unreduced graph
        #[arg(long)]
        unreduced: bool,
        /// Substitute down to bracket or Jones
        #[arg(long = "as", value_enum, default_value = "tutte")]
        as_: PolyKind,
    },
    /// Closed-form family polynomials
    Family {
        /// Family name (p, i_p, ip_q, ip1_q, ip1_iq, p_i_q, unit_jones, zfamily)
        #[arg(long)]
        id: String,
        #[arg(long, allow_hyphen_values = true)]
        p: i32,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<i32>,
        #[arg(long, value_enum, default_value = "closed")]
        form: FamilyForm,
        #[arg(long = "as", value_enum, default_value = "tutte")]
        as_: PolyKind,
        /// Also evaluate the other form and report agreement
        #[arg(long)]
        compare: bool,
    },
    /// Parity bracket and non-triviality certificate
    Parity {
        #[command(flatten)]
        input: ConwayInput,
        /// Reduce nodal graphs up to per-node reflections as well
        #[arg(long)]
        z: bool,
        /// Also print the flat evaluation (A = -1)
        #[arg(long)]
        flat: bool,
        /// Divide one loop factor out of the scalar
        #[arg(long)]
        normalized: bool,
    },
    /// Zeros of family Jones polynomials over a parameter grid
    Portrait {
        #[arg(long)]
        id: String,
        /// p range as a:b (inclusive)
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// q range as a:b (inclusive)
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Write records as CSV
        #[arg(long)]
        csv: Option<String>,
        /// Write a scatter plot as SVG
        #[arg(long)]
        svg: Option<String>,
    },
    /// Run the end-to-end check suite
    Selftest {
        /// Smaller crossing bounds and grids
        #[arg(long)]
        quick: bool,
    },
}

fn poly_json(p: &LaurentPolynomial) -> serde_json::Value {
    json!(p.to_string())
}

fn family_id(name: &str) -> Result<FamilyId, Error> {
    FamilyId::parse(name).ok_or(Error::UnsupportedFamily { id: name.into() })
}

fn parse_span(s: &str) -> Result<(i32, i32), Error> {
    let err = || Error::Parse {
        pos: 0,
        msg: format!("range `{s}` is not of the form a:b"),
    };
    let (a, b) = s.split_once(':').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

fn run(cli: &Cli) -> Result<String, Error> {
    let limit = cli.state_limit.unwrap_or(DEFAULT_STATE_LIMIT);
    let mut out = String::new();
    let mut emit = |line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    match &cli.command {
        Command::Parse(input) => {
            for text in input.expressions()? {
                let e = parse_conway(&text)?;
                if cli.json {
                    emit(serde_json::to_string(&e).expect("serializable tree"));
                } else {
                    emit(format!("{e:?}"));
                }
            }
        }
        Command::Bracket(input) => {
            for text in input.expressions()? {
                let b = VirtualDiagram::parse(&text)?.kauffman_bracket_with_limit(limit)?;
                if cli.json {
                    emit(json!({"input": text, "bracket": poly_json(&b)}).to_string());
                } else {
                    emit(b.to_string());
                }
            }
        }
        Command::Jones {
            input,
            no_normalize,
        } => {
            for text in input.expressions()? {
                let j = VirtualDiagram::parse(&text)?.jones_with(limit, !no_normalize)?;
                if cli.json {
                    emit(json!({"input": text, "jones": poly_json(&j)}).to_string());
                } else {
                    emit(j.to_string());
                }
            }
        }
        Command::Tutte {
            input,
            unreduced,
            as_,
        } => {
            for text in input.expressions()? {
                let e = parse_conway(&text)?;
                if e.has_negative_leaf() {
                    return Err(Error::Parse {
                        pos: 0,
                        msg: "negative twists have no positive-edge graph here; \
                              use `vkp family` (closed forms) or `vkp jones`"
                            .into(),
                    });
                }
                let g = graph_from_conway(&e)?;
                let g = if *unreduced { g } else { reduce_graph(&g) };
                let t = relative_tutte(&g);
                let writhe = VirtualDiagram::from_conway(&e).writhe();
                let value = match as_ {
                    PolyKind::Tutte => t,
                    PolyKind::Bracket => tutte_to_jones(&t, writhe)?.bracket,
                    PolyKind::Jones => tutte_to_jones(&t, writhe)?.jones,
                };
                if cli.json {
                    emit(json!({"input": text, "polynomial": poly_json(&value)}).to_string());
                } else {
                    emit(value.to_string());
                }
            }
        }
        Command::Family {
            id,
            p,
            q,
            form,
            as_,
            compare,
        } => {
            let id = family_id(id)?;
            let params: Vec<i32> = match q {
                Some(q) => vec![*p, *q],
                None => vec![*p],
            };
            let t = match form {
                FamilyForm::Closed => family_eval(id, &params)?,
                FamilyForm::Recursive => family_recursive(id, &params)?,
            };
            let writhe = VirtualDiagram::from_conway(&vkp::families::family_diagram(
                id, &params,
            )?)
            .writhe();
            let value = match as_ {
                PolyKind::Tutte => t,
                PolyKind::Bracket => tutte_to_jones(&t, writhe)?.bracket,
                PolyKind::Jones => tutte_to_jones(&t, writhe)?.jones,
            };
            let agreement = if *compare {
                Some(compare_forms(id, &params)?.matches())
            } else {
                None
            };
            if cli.json {
                let mut obj = json!({
                    "family": id.name(),
                    "params": params,
                    "polynomial": poly_json(&value),
                });
                if let Some(m) = agreement {
                    obj["forms_agree"] = json!(m);
                }
                emit(obj.to_string());
            } else {
                emit(value.to_string());
                if let Some(m) = agreement {
                    emit(format!(
                        "forms {}",
                        if m { "agree" } else { "DISAGREE (closed form shown by default)" }
                    ));
                }
            }
        }
        Command::Parity {
            input,
            z,
            flat,
            normalized,
        } => {
            for text in input.expressions()? {
                let d = VirtualDiagram::parse(&text)?;
                let pb = parity_bracket_with_limit(&d, *z, limit)?;
                let scalar = if *normalized {
                    pb.normalized_scalar()
                } else {
                    pb.scalar.clone()
                };
                let cert = nontriviality_certificate(&pb);
                if cli.json {
                    let terms: Vec<serde_json::Value> = pb
                        .nodal_terms
                        .iter()
                        .map(|(g, c)| json!({"graph": g.to_string(), "coefficient": c.to_string()}))
                        .collect();
                    let mut obj = json!({
                        "input": text,
                        "scalar": scalar.to_string(),
                        "terms": terms,
                        "certificate": cert,
                    });
                    if *flat {
                        let (s, ts) = pb.eval_flat();
                        obj["flat"] = json!({
                            "scalar": s.to_string(),
                            "terms": ts
                                .iter()
                                .map(|(g, c)| json!({"graph": g.to_string(), "coefficient": c.to_string()}))
                                .collect::<Vec<_>>(),
                        });
                    }
                    emit(obj.to_string());
                } else {
                    emit(format!("scalar: {scalar}"));
                    for (g, c) in &pb.nodal_terms {
                        emit(format!("term: {g}  *  {c}"));
                    }
                    emit(format!("certificate: {cert:?}"));
                    if *flat {
                        let (s, ts) = pb.eval_flat();
                        emit(format!("flat scalar: {s}"));
                        for (g, c) in ts {
                            emit(format!("flat term: {g}  *  {c}"));
                        }
                    }
                }
            }
        }
        Command::Portrait { id, p, q, csv, svg } => {
            let id = family_id(id)?;
            let records = portrait_grid(id, parse_span(p)?, parse_span(q)?)?;
            if let Some(path) = csv {
                std::fs::write(path, to_csv(&records))?;
            }
            if let Some(path) = svg {
                std::fs::write(path, to_svg(&records))?;
            }
            if cli.json {
                emit(
                    json!({
                        "family": id.name(),
                        "records": records.len(),
                        "csv": csv,
                        "svg": svg,
                    })
                    .to_string(),
                );
            } else if csv.is_none() && svg.is_none() {
                emit(to_csv(&records).trim_end().to_string());
            } else {
                emit(format!("{} records written", records.len()));
            }
        }
        Command::Selftest { quick } => {
            let items = vkp::selftest::run(*quick);
            let mut failed = 0usize;
            for item in &items {
                let tag = if item.passed { "PASS" } else { "FAIL" };
                if !item.passed {
                    failed += 1;
                }
                if cli.json {
                    emit(
                        json!({
                            "item": item.name,
                            "passed": item.passed,
                            "details": item.details,
                        })
                        .to_string(),
                    );
                } else if item.details.is_empty() {
                    emit(format!("{tag} {}", item.name));
                } else {
                    emit(format!("{tag} {} — {}", item.name, item.details));
                }
            }
            if failed > 0 {
                print!("{out}");
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("{failed} selftest item(s) failed"),
                });
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .expect("worker pool configured once at startup");
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::StateSumTooLarge { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
