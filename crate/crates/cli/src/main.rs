use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use thdist_core::concepts::{concept_closure, cz_lower_bound, cz_sentential};
use thdist_core::network::{classify_ad, Mode};
use thdist_core::semantics::semantic_profile;
use thdist_core::workbench::{load_catalog, run_paper_suite, verify_all, Catalog, DiskCache};
use thdist_core::{enumerate_models, Error, FiniteModel, Language};

/// Distances between logical theories over finite fragments.
#[derive(Parser)]
#[command(name = "thdist", version)]
struct Cli {
    /// Catalog file; the bundled example catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,

    /// Plain text instead of JSON.
    #[arg(long, global = true)]
    human: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify every certificate of a catalog.
    Check {
        /// Catalog to check; overrides `--catalog`.
        file: Option<PathBuf>,
        /// Largest model size for bounded checks; the catalog policy by default.
        #[arg(long)]
        bound: Option<usize>,
        /// Report refuted certificates and drop them instead of failing.
        #[arg(long)]
        allow_refuted_prune: bool,
    },
    /// Models of a theory of one size, up to isomorphism.
    Models {
        theory: String,
        #[arg(long)]
        size: usize,
    },
    /// Model counts for sizes 1 to K.
    Spectrum {
        theory: String,
        #[arg(long)]
        max_size: usize,
    },
    /// Conceptual size: exact for sentential theories, a lower bound otherwise.
    Cz {
        theory: String,
        /// Formula depth searched for first-order theories.
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Definable relations of a single model.
    Closure {
        model: PathBuf,
        #[arg(long)]
        vars: usize,
        /// Catalog language of the model; read off the model when omitted.
        #[arg(long)]
        language: Option<String>,
    },
    /// Step distance between two theories of a network.
    Dist {
        network: String,
        from: String,
        to: String,
        #[arg(long)]
        directed: bool,
    },
    /// Axiomatic distance read off the axiom-adding relation.
    ClassifyAd {
        network: String,
        from: String,
        to: String,
        /// Take the amalgamation property on trust instead of checking it.
        #[arg(long)]
        assume_property: bool,
    },
    /// Write a network as DOT or JSON.
    Export {
        network: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        directed: bool,
    },
    /// Run the acceptance criteria on the bundled examples.
    PaperSuite,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

enum Outcome {
    Done,
    Refuted,
}

fn catalog(path: Option<&Path>) -> anyhow::Result<Catalog> {
    match path {
        Some(p) => load_catalog(p).with_context(|| format!("loading {}", p.display())),
        None => Ok(Catalog::paper_examples()),
    }
}

fn emit(human: bool, value: Value, text: impl FnOnce() -> String) {
    if human {
        print!("{}", text());
    } else {
        println!("{}", serde_json::to_string_pretty(&value).expect("JSON values serialize"));
    }
}

/// Ranks read off a model file: booleans are rank 0, tuples give their length.
fn infer_language(model: &Value, vars: usize) -> anyhow::Result<Arc<Language>> {
    let interp = model["interp"].as_object().context("model without an `interp` object")?;
    let mut symbols = Vec::new();
    for (name, v) in interp {
        let rank = match v {
            Value::Bool(_) => 0,
            Value::Array(ts) => match ts.first() {
                Some(Value::Array(t)) => t.len(),
                Some(_) => bail!("`{name}` is not a list of tuples"),
                None => bail!("cannot tell the rank of `{name}` from an empty relation; pass --language"),
            },
            _ => bail!("`{name}` is neither a truth value nor a relation"),
        };
        symbols.push((name.clone(), rank));
    }
    Ok(Arc::new(Language::new("model", symbols, vars)?))
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let human = cli.human;
    match cli.command {
        Command::Check {
            file,
            bound,
            allow_refuted_prune,
        } => {
            let cat = catalog(file.as_deref().or(cli.catalog.as_deref()))?;
            let report = verify_all(&cat, bound.unwrap_or(cat.policy.bound));
            let pruned: Vec<String> = report
                .entries
                .iter()
                .filter(|e| allow_refuted_prune && e.certificate.status.is_refuted())
                .map(|e| e.certificate.label())
                .collect();
            let mut value = report.to_json();
            if allow_refuted_prune {
                value["pruned"] = json!(pruned);
            }
            emit(human, value, || {
                let mut s = report.to_human();
                for p in &pruned {
                    s.push_str(&format!("pruned {p}\n"));
                }
                s
            });
            if report.hit_cap() {
                return Err(Error::CapExceeded("a check stopped at a policy cap".into()).into());
            }
            if report.has_errors() {
                bail!("some certificates could not be checked");
            }
            if report.has_refuted() && !allow_refuted_prune {
                return Ok(Outcome::Refuted);
            }
        }
        Command::Models { theory, size } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let cache = DiskCache::from_env();
            let t = cat.theory(&theory)?;
            let models = match &cache {
                Some(c) => c.models(t, size, &cat.policy)?.0,
                None => enumerate_models(t, size, &cat.policy)?,
            };
            let value = json!({
                "theory": theory,
                "size": size,
                "count": models.len(),
                "models": models.iter().map(FiniteModel::to_json).collect::<Vec<_>>(),
            });
            emit(human, value, || {
                let mut s = format!("{theory}: {} models of size {size}\n", models.len());
                for m in models.iter() {
                    s.push_str(&format!("  {}\n", m.to_json()));
                }
                s
            });
        }
        Command::Spectrum { theory, max_size } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let t = cat.theory(&theory)?;
            let profile = match DiskCache::from_env() {
                Some(c) => c.profile(t, max_size, &cat.policy)?,
                None => semantic_profile(t, max_size, &cat.policy)?,
            };
            let spectrum = profile.spectrum();
            emit(human, profile.to_json(), || {
                let counts: Vec<String> = spectrum.iter().enumerate().map(|(i, c)| format!("{}:{c}", i + 1)).collect();
                format!("{theory}: {}\n", counts.join(" "))
            });
        }
        Command::Cz { theory, depth, bound } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let t = cat.theory(&theory)?;
            let cz = if t.is_sentential() {
                cz_sentential(t)?
            } else {
                cz_lower_bound(t, depth, bound.unwrap_or(cat.policy.bound), &cat.policy)?
            };
            emit(human, json!({"theory": theory, "cz": cz.to_json()}), || format!("Cz({theory}) = {cz}\n"));
        }
        Command::Closure { model, vars, language } => {
            let text = std::fs::read_to_string(&model).with_context(|| format!("reading {}", model.display()))?;
            let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", model.display()))?;
            let lang = match language {
                Some(name) => {
                    let cat = catalog(cli.catalog.as_deref())?;
                    let l = cat
                        .languages
                        .iter()
                        .find(|l| l.name() == name)
                        .ok_or_else(|| Error::Dangling(format!("language `{name}`")))?;
                    Arc::new(l.with_var_bound(vars)?)
                }
                None => infer_language(&value, vars)?,
            };
            let m = FiniteModel::from_json(&value, lang)?;
            let closure = concept_closure(&m, vars)?;
            emit(human, closure.to_json(), || {
                let mut s = format!("{} definable relations over {} assignments\n", closure.len(), closure.points);
                for i in 0..closure.len() {
                    s.push_str(&format!("  {}  {}\n", closure.bit_string(i), closure.formula(i)));
                }
                s
            });
        }
        Command::Dist {
            network,
            from,
            to,
            directed,
        } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let r = cat.distance(&network, &from, &to, directed)?;
            emit(human, r.to_json(), || {
                let mut s = format!("d({from}, {to}) = {} [{}]\n", r.value, r.status);
                if let Some(w) = &r.witness {
                    s.push_str(&format!("  path: {}\n", w.nodes.join(" -> ")));
                }
                if let Some(lb) = &r.lower_bound {
                    s.push_str(&format!("  lower bound: {}\n", lb.to_json()));
                }
                for a in &r.asserted {
                    s.push_str(&format!("  assumes {a}\n"));
                }
                s
            });
        }
        Command::ClassifyAd {
            network,
            from,
            to,
            assume_property,
        } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let class = cat.network_class(&network)?;
            let c = classify_ad(&class, &from, &to, assume_property)?;
            emit(
                human,
                json!({"from": from, "to": to, "ad": c.value().to_json(), "assumed": assume_property}),
                || format!("Ad({from}, {to}) = {c}\n"),
            );
        }
        Command::Export {
            network,
            format,
            directed,
        } => {
            let cat = catalog(cli.catalog.as_deref())?;
            let net = cat.build_network(&network, directed.then_some(Mode::Directed))?;
            match format {
                Format::Dot => print!("{}", net.to_dot()),
                Format::Json => println!("{}", serde_json::to_string_pretty(&net.to_json())?),
            }
        }
        Command::PaperSuite => {
            let report = run_paper_suite();
            emit(human, report.to_json(), || report.to_human());
            if !report.all_pass() {
                return Ok(Outcome::Refuted);
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Refuted) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cap = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_cap));
            ExitCode::from(if cap { 3 } else { 2 })
        }
    }
}
