//! Command dispatch: every subcommand loads its input files, runs the
//! corresponding engine checks, prints one report, and turns into an
//! exit code.
//!
//! Exit codes: 0 when everything passes (or the command is a pure
//! query), 1 when a law, proof, or check fails (the report carries a
//! replayable witness), 2 when an input file or argument is malformed.
//! Reports are deterministic: the same inputs and seed produce
//! byte-identical output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context as _};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use relg_core::colim::{self, is_quotient_map};
use relg_core::gset::{MSubobject, Morphism};
use relg_core::harness::{
    close_counterpart, counterpart_check, demodalize_diamonds, maximal_counterpart,
    maximality_probe, representation_report, CounterpartFamily, EvaluationEdge, HarnessError,
};
use relg_core::laws::{
    doctrine_report, modal_law_report, optional_law_report, Diagram, EnumConfig, ZBattery,
};
use relg_core::proof::check_derivation;
use relg_core::report::{LawReport, Status, Witness};
use relg_core::semantics::{interpret_formula, is_model};
use relg_core::syntax::parse_sequent;

use crate::files;

#[derive(Parser)]
#[command(
    name = "relg",
    version,
    about = "Finite counterpart semantics: law suites, evaluation, proofs, quotients, \
             and counterpart harnesses over relational G-sets"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for sampled law instances.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Exhaustive subobject enumeration up to this total carrier size.
    #[arg(long, default_value_t = 14, global = true)]
    pub carrier_bound: usize,
    /// Sample count used past the exhaustive bound.
    #[arg(long, default_value_t = 512, global = true)]
    pub sample_size: usize,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Doctrine,
    Modal,
    Optional,
    All,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Run law suites over one object and its span diagram.
    Laws {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Evaluate a sequent in an interpretation and print its denotation.
    Eval {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Check an interpretation against every axiom of a theory.
    CheckModel {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        theory: PathBuf,
    },
    /// Check a derivation script line by line.
    CheckProof {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long)]
        proof: PathBuf,
    },
    /// Quotient an object by an equivalence relation and certify the map.
    Quotient {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        rel: PathBuf,
    },
    /// Check (or compute) a counterpart family between two classical models.
    Counterpart {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        probes: PathBuf,
        /// Compute the maximal family instead of closing seed pairs.
        #[arg(long)]
        maximal: bool,
        /// Seed pairs to close under function application.
        #[arg(long)]
        seed_pairs: Option<PathBuf>,
    },
    /// Build the evaluation object over verified edges and compare diamonds.
    Repr {
        #[arg(long, required = true, num_args = 1..)]
        models: Vec<PathBuf>,
        #[arg(long, num_args = 0..)]
        edges: Vec<PathBuf>,
        #[arg(long)]
        probes: PathBuf,
    },
}

/// Whether the command's checks all passed; queries always pass.
enum Outcome {
    Pass,
    Fail,
}

pub fn dispatch(cli: Cli) -> i32 {
    match run(cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = EnumConfig {
        bound: cli.carrier_bound,
        sample: cli.sample_size,
        seed: cli.seed,
    };
    match cli.cmd {
        Cmd::Laws { model, suite } => run_laws(&model, suite, &cfg, cli.format),
        Cmd::Eval { interp, formula } => run_eval(&interp, &formula, cli.format),
        Cmd::CheckModel { interp, theory } => run_check_model(&interp, &theory, cli.format),
        Cmd::CheckProof { theory, proof } => run_check_proof(&theory, &proof, cli.format),
        Cmd::Quotient { model, rel } => run_quotient(&model, &rel, &cfg, cli.format),
        Cmd::Counterpart {
            left,
            right,
            probes,
            maximal,
            seed_pairs,
        } => run_counterpart(&left, &right, &probes, maximal, seed_pairs.as_deref(), cli.format),
        Cmd::Repr {
            models,
            edges,
            probes,
        } => run_repr(&models, &edges, &probes, cli.format),
    }
}

// ---------------------------------------------------------------------
// JSON mirrors of the report types.

#[derive(Serialize)]
struct SubDto {
    parts: BTreeMap<String, Vec<String>>,
}

fn sub_dto(s: &MSubobject) -> SubDto {
    let graph = s.ambient().graph();
    let parts = (0..graph.vertex_count())
        .map(|v| (graph.vertex_name(v).to_string(), s.part_names(v)))
        .collect();
    SubDto { parts }
}

#[derive(Serialize)]
struct MorphismDto {
    dom: files::ModelFile,
    cod: files::ModelFile,
    map: BTreeMap<String, Vec<(String, String)>>,
}

fn morphism_dto(m: &Morphism) -> MorphismDto {
    let graph = m.dom().graph();
    let map = (0..graph.vertex_count())
        .map(|v| {
            let rows = m.dom().carrier(v)
                .iter()
                .enumerate()
                .map(|(i, name)| {
                    (name.clone(), m.cod().carrier(v)[m.apply(v, i)].clone())
                })
                .collect();
            (graph.vertex_name(v).to_string(), rows)
        })
        .collect();
    MorphismDto {
        dom: files::model_file_of(m.dom()),
        cod: files::model_file_of(m.cod()),
        map,
    }
}

#[derive(Serialize)]
struct WitnessDto {
    objects: Vec<files::ModelFile>,
    morphism: Option<MorphismDto>,
    subobjects: Vec<SubDto>,
    element: Option<(String, String)>,
    lhs: Option<SubDto>,
    rhs: Option<SubDto>,
    note: String,
}

fn witness_dto(w: &Witness) -> WitnessDto {
    WitnessDto {
        objects: w.objects.iter().map(files::model_file_of).collect(),
        morphism: w.morphism.as_ref().map(morphism_dto),
        subobjects: w.subobjects.iter().map(sub_dto).collect(),
        element: w.element.clone(),
        lhs: w.lhs.as_ref().map(sub_dto),
        rhs: w.rhs.as_ref().map(sub_dto),
        note: w.note.clone(),
    }
}

#[derive(Serialize)]
struct LawReportDto {
    law: String,
    status: String,
    sampled: bool,
    witness: Option<WitnessDto>,
}

fn law_dto(r: &LawReport) -> LawReportDto {
    LawReportDto {
        law: r.law.clone(),
        status: match r.status {
            Status::Holds => "holds".to_string(),
            Status::Fails => "fails".to_string(),
        },
        sampled: r.sampled,
        witness: r.witness.as_ref().map(witness_dto),
    }
}

fn print_json<T: Serialize>(doc: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(doc)?);
    Ok(())
}

/// Prints a law-report list in the chosen format and says whether all
/// of them hold.
fn emit_reports(format: Format, reports: &[LawReport]) -> anyhow::Result<Outcome> {
    match format {
        Format::Text => {
            for r in reports {
                println!("{r}");
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                reports: Vec<LawReportDto>,
            }
            print_json(&Doc {
                version: 1,
                reports: reports.iter().map(law_dto).collect(),
            })?;
        }
    }
    Ok(if reports.iter().all(LawReport::holds_up) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

// ---------------------------------------------------------------------
// laws

fn run_laws(
    model: &std::path::Path,
    suite: Suite,
    cfg: &EnumConfig,
    format: Format,
) -> anyhow::Result<Outcome> {
    let x = files::load_model(model)?;
    let diagram = Diagram::span_of(&x)?;
    let battery = ZBattery::new(x.graph().clone());
    let mut reports = Vec::new();
    if matches!(suite, Suite::Doctrine | Suite::All) {
        reports.extend(doctrine_report(&diagram, cfg)?);
    }
    if matches!(suite, Suite::Modal | Suite::All) {
        reports.extend(modal_law_report(&diagram, &battery, cfg)?);
    }
    if matches!(suite, Suite::Optional | Suite::All) {
        reports.extend(optional_law_report(&diagram, None, cfg)?);
    }
    emit_reports(format, &reports)
}

// ---------------------------------------------------------------------
// eval

fn run_eval(
    interp: &std::path::Path,
    formula: &str,
    format: Format,
) -> anyhow::Result<Outcome> {
    let interp = files::load_interp(interp)?;
    let (ctx, f) = parse_sequent(interp.sig(), formula)
        .map_err(|e| anyhow!("--formula: line {} col {}: {}", e.line, e.col, e.message))?;
    let sub = interpret_formula(&interp, &ctx, &f)?;
    match format {
        Format::Text => {
            let graph = sub.ambient().graph();
            for v in 0..graph.vertex_count() {
                println!(
                    "{}:{{{}}}",
                    graph.vertex_name(v),
                    sub.part_names(v).join(",")
                );
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                parts: BTreeMap<String, Vec<String>>,
            }
            print_json(&Doc {
                version: 1,
                parts: sub_dto(&sub).parts,
            })?;
        }
    }
    Ok(Outcome::Pass)
}

// ---------------------------------------------------------------------
// check-model

fn run_check_model(
    interp: &std::path::Path,
    theory: &std::path::Path,
    format: Format,
) -> anyhow::Result<Outcome> {
    let interp = files::load_interp(interp)?;
    let theory = files::load_theory(theory)?;
    if interp.sig() != &theory.sig {
        bail!("interpretation and theory declare different signatures");
    }
    let checks = is_model(&interp, &theory.axiom_triples())?;
    match format {
        Format::Text => {
            for c in &checks {
                match &c.counterexample {
                    None => println!("axiom {}: holds", c.name),
                    Some((v, e)) => println!("axiom {}: fails at {v}.{e}", c.name),
                }
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct CheckDto {
                name: String,
                holds: bool,
                counterexample: Option<(String, String)>,
            }
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                checks: Vec<CheckDto>,
            }
            print_json(&Doc {
                version: 1,
                checks: checks
                    .iter()
                    .map(|c| CheckDto {
                        name: c.name.clone(),
                        holds: c.holds,
                        counterexample: c.counterexample.clone(),
                    })
                    .collect(),
            })?;
        }
    }
    Ok(if checks.iter().all(|c| c.holds) {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

// ---------------------------------------------------------------------
// check-proof

fn run_check_proof(
    theory: &std::path::Path,
    proof: &std::path::Path,
    format: Format,
) -> anyhow::Result<Outcome> {
    let theory = files::load_theory(theory)?;
    let derivation = files::load_proof(proof, &theory.sig)?;
    let report = check_derivation(&theory, &derivation);
    match format {
        Format::Text => {
            for v in &report.verdicts {
                match &v.error {
                    None => println!("{}: ok", v.line),
                    Some(e) => println!("{}: {e}", v.line),
                }
            }
            match report.first_failure() {
                None => println!("accepted"),
                Some((line, _)) => println!("rejected at line {line}"),
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct VerdictDto {
                line: usize,
                error: Option<String>,
            }
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                accepted: bool,
                lines: Vec<VerdictDto>,
            }
            print_json(&Doc {
                version: 1,
                accepted: report.accepted,
                lines: report
                    .verdicts
                    .iter()
                    .map(|v| VerdictDto {
                        line: v.line,
                        error: v.error.as_ref().map(|e| e.to_string()),
                    })
                    .collect(),
            })?;
        }
    }
    Ok(if report.accepted {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

// ---------------------------------------------------------------------
// quotient

fn run_quotient(
    model: &std::path::Path,
    rel: &std::path::Path,
    cfg: &EnumConfig,
    format: Format,
) -> anyhow::Result<Outcome> {
    let x = files::load_model(model)?;
    let (_, r) = files::load_relation(rel, &x)?;
    let quot = colim::quotient(&x, &r).context("quotient")?;
    let battery = ZBattery::new(x.graph().clone());
    let mut reports = vec![is_quotient_map(&quot.q)];
    reports.push(colim::check_quotient_axiom(&quot.q, &battery, cfg)?);
    // The kernel must reproduce the dividing relation exactly.
    let kernel = colim::kernel(&quot.q)?;
    reports.push(if kernel == r {
        LawReport::holds("quotient.kernel")
    } else {
        LawReport::fails(
            "quotient.kernel",
            Witness {
                lhs: Some(kernel),
                rhs: Some(r),
                note: "kernel of the quotient differs from the relation".to_string(),
                ..Witness::default()
            },
        )
    });
    match format {
        Format::Text => {
            let graph = quot.object.graph();
            for v in 0..graph.vertex_count() {
                println!(
                    "{}: {}",
                    graph.vertex_name(v),
                    quot.object.carrier(v).join(" ")
                );
            }
            for r in &reports {
                println!("{r}");
            }
            Ok(if reports.iter().all(LawReport::holds_up) {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                quotient: files::ModelFile,
                reports: Vec<LawReportDto>,
            }
            print_json(&Doc {
                version: 1,
                quotient: files::model_file_of(&quot.object),
                reports: reports.iter().map(law_dto).collect(),
            })?;
            Ok(if reports.iter().all(LawReport::holds_up) {
                Outcome::Pass
            } else {
                Outcome::Fail
            })
        }
    }
}

// ---------------------------------------------------------------------
// counterpart

fn family_pairs(family: &CounterpartFamily) -> BTreeMap<String, Vec<(String, String)>> {
    family
        .relations()
        .iter()
        .map(|(s, ps)| (s.clone(), ps.iter().cloned().collect()))
        .collect()
}

fn run_counterpart(
    left: &std::path::Path,
    right: &std::path::Path,
    probes: &std::path::Path,
    maximal: bool,
    seed_pairs: Option<&std::path::Path>,
    format: Format,
) -> anyhow::Result<Outcome> {
    let probe_set = files::load_probes(probes)?;
    let dem = demodalize_diamonds(&probe_set.sig, &probe_set.probes)?;
    let left = files::load_classical(left, &dem)?;
    let right = files::load_classical(right, &dem)?;

    let family = if maximal {
        if seed_pairs.is_some() {
            bail!("--maximal and --seed-pairs are mutually exclusive");
        }
        maximal_counterpart(&left, &right, &probe_set.probes, &probe_set.quotients)?
    } else {
        let seed = match seed_pairs {
            Some(p) => files::pair_sets(&files::load_pairs(p)?),
            None => BTreeMap::new(),
        };
        close_counterpart(&seed, &left, &right)?
    };
    let report = counterpart_check(&family, &probe_set.probes, &probe_set.quotients)?;
    let admissible = if maximal {
        Some(maximality_probe(
            &family,
            &probe_set.probes,
            &probe_set.quotients,
        )?)
    } else {
        None
    };

    let pass = report.passes() && admissible.as_ref().is_none_or(Vec::is_empty);
    match format {
        Format::Text => {
            println!("probes:");
            for p in &report.probes {
                println!("  {p}");
            }
            println!("family:");
            for (sort, pairs) in family_pairs(&family) {
                let shown: Vec<String> =
                    pairs.iter().map(|(a, b)| format!("({a}, {b})")).collect();
                println!("  {sort}: {}", shown.join(" "));
            }
            for r in &report.laws {
                println!("{r}");
            }
            if let Some(adds) = &admissible {
                if adds.is_empty() {
                    println!("maximal: yes");
                } else {
                    for (sort, a, b) in adds {
                        println!("admissible addition: {sort} ({a}, {b})");
                    }
                }
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                pairs: BTreeMap<String, Vec<(String, String)>>,
                probes: Vec<String>,
                laws: Vec<LawReportDto>,
                admissible: Option<Vec<(String, String, String)>>,
            }
            print_json(&Doc {
                version: 1,
                pairs: family_pairs(&family),
                probes: report.probes.clone(),
                laws: report.laws.iter().map(law_dto).collect(),
                admissible,
            })?;
        }
    }
    Ok(if pass { Outcome::Pass } else { Outcome::Fail })
}

// ---------------------------------------------------------------------
// repr

fn format_tuples(tuples: &std::collections::BTreeSet<Vec<String>>) -> String {
    if tuples.is_empty() {
        return "{}".to_string();
    }
    let shown: Vec<String> = tuples.iter().map(|t| format!("({})", t.join(","))).collect();
    format!("{{{}}}", shown.join(" "))
}

fn run_repr(
    models: &[PathBuf],
    edges: &[PathBuf],
    probes: &std::path::Path,
    format: Format,
) -> anyhow::Result<Outcome> {
    let probe_set = files::load_probes(probes)?;
    let dem = demodalize_diamonds(&probe_set.sig, &probe_set.probes)?;
    let models: Vec<_> = models
        .iter()
        .map(|p| files::load_classical(p, &dem))
        .collect::<Result<_, _>>()?;
    let mut built_edges = Vec::new();
    for path in edges {
        let doc = files::load_pairs(path)?;
        let find = |name: &str| {
            models
                .iter()
                .find(|m: &&relg_core::harness::ClassicalModel| m.name() == name)
                .cloned()
                .ok_or_else(|| anyhow!("{}: no model named {name}", path.display()))
        };
        let family = CounterpartFamily::new(find(&doc.left)?, find(&doc.right)?, files::pair_sets(&doc))?;
        let name = if doc.name.is_empty() {
            format!("{}-{}", doc.left, doc.right)
        } else {
            doc.name.clone()
        };
        built_edges.push(EvaluationEdge { name, family });
    }

    let report = match representation_report(
        &models,
        &built_edges,
        &probe_set.probes,
        &probe_set.quotients,
    ) {
        Ok(r) => r,
        // A failing edge is a failed check, not a malformed input: say
        // which law broke and exit accordingly.
        Err(HarnessError::EdgeNotVerified { edge, law }) => {
            match format {
                Format::Text => println!("edge {edge}: fails {law}"),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Doc {
                        version: u32,
                        edge: String,
                        fails: String,
                    }
                    print_json(&Doc {
                        version: 1,
                        edge,
                        fails: law,
                    })?;
                }
            }
            return Ok(Outcome::Fail);
        }
        Err(e) => return Err(e.into()),
    };

    match format {
        Format::Text => {
            for c in &report.comparisons {
                println!(
                    "{} / {}: counterpart {} stored {} violations {} gaps {}",
                    c.model,
                    c.probe,
                    format_tuples(&c.counterpart),
                    format_tuples(&c.stored),
                    format_tuples(&c.violations),
                    format_tuples(&c.gaps),
                );
            }
            println!(
                "direction: {}",
                if report.direction_holds() { "holds" } else { "fails" }
            );
        }
        Format::Json => {
            #[derive(Serialize)]
            struct ComparisonDto {
                model: String,
                probe: String,
                counterpart: Vec<Vec<String>>,
                stored: Vec<Vec<String>>,
                violations: Vec<Vec<String>>,
                gaps: Vec<Vec<String>>,
            }
            #[derive(Serialize)]
            struct Doc {
                version: u32,
                probes: Vec<String>,
                comparisons: Vec<ComparisonDto>,
                direction_holds: bool,
            }
            print_json(&Doc {
                version: 1,
                probes: report.probes.clone(),
                comparisons: report
                    .comparisons
                    .iter()
                    .map(|c| ComparisonDto {
                        model: c.model.clone(),
                        probe: c.probe.clone(),
                        counterpart: c.counterpart.iter().cloned().collect(),
                        stored: c.stored.iter().cloned().collect(),
                        violations: c.violations.iter().cloned().collect(),
                        gaps: c.gaps.iter().cloned().collect(),
                    })
                    .collect(),
                direction_holds: report.direction_holds(),
            })?;
        }
    }
    Ok(if report.direction_holds() {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}
