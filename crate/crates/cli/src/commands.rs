//! Subcommand implementations.

use std::io::Write;

use anyhow::{bail, Context, Result};
use log::{info, warn};
use rayon::prelude::*;

use edparse::eval::per_label_report;
use edparse::oracle::{format_trace, oracle_sequence, parse_trace, replay as replay_transitions, NonDerivable};
use edparse::policy::{
    copy_tree_baseline, label_inventory, train as train_model, ModelPolicy, OraclePolicy, Policy, ShiftPolicy,
    TrainOptions,
};
use edparse::{elas_sentence, parse, validate as validate_graph, write_conllu, Evaluation, LinearModel, Sentence, TransitionSystem};

use crate::io::{read_text, read_treebank, read_treebanks, sentence_name, writer};
use crate::{EvalArgs, InputArgs, OracleArgs, Outcome, ParseArgs, PolicyKind, ReplayArgs, StatsArgs, TrainArgs};

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Success
    } else {
        Outcome::Failed
    }
}

pub fn oracle(args: &OracleArgs) -> Result<Outcome> {
    let doc = read_treebank(args.input.input.as_deref())?;
    let sys = TransitionSystem::default();
    let results: Vec<Result<String, String>> = doc
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let name = sentence_name(s, i);
            let gold = s.extract_graph().map_err(|e| format!("{}: {}", name, e))?;
            let budget = args.budget_mult * s.word_count() as usize;
            let run = oracle_sequence(&sys, &gold, budget).map_err(|e| format!("{}: {}", name, e))?;
            match run.failure {
                Some(failure) => Err(format!("{}: not derivable: {}", name, failure)),
                None => Ok(format_trace(&name, &run.transitions())),
            }
        })
        .collect();
    let mut out = writer(args.trace.as_deref())?;
    let mut ok = true;
    for result in results {
        match result {
            Ok(block) => out.write_all(block.as_bytes())?,
            Err(diagnostic) => {
                eprintln!("{}", diagnostic);
                ok = false;
            }
        }
    }
    out.flush()?;
    Ok(outcome(ok))
}

enum ReplayStatus {
    Match,
    Mismatch(String),
    Underivable(String),
}

pub fn replay(args: &ReplayArgs) -> Result<Outcome> {
    let doc = read_treebank(args.input.input.as_deref())?;
    let sys = TransitionSystem::default();
    let traces = match &args.trace {
        Some(path) => {
            let blocks = parse_trace(&read_text(Some(path))?).map_err(anyhow::Error::msg)?;
            if blocks.len() != doc.len() {
                bail!("{} trace blocks for {} sentences", blocks.len(), doc.len());
            }
            Some(blocks)
        }
        None => None,
    };
    let statuses: Vec<ReplayStatus> = doc
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let gold = match s.extract_graph() {
                Ok(g) => g,
                Err(e) => return ReplayStatus::Underivable(e.to_string()),
            };
            let transitions = match &traces {
                Some(blocks) => blocks[i].transitions.clone(),
                None => match oracle_sequence(&sys, &gold, edparse::oracle::default_budget(s.word_count())) {
                    Ok(run) => match run.failure {
                        None => run.transitions(),
                        Some(NonDerivable::Mismatch) => run.transitions(),
                        Some(failure) => return ReplayStatus::Underivable(failure.to_string()),
                    },
                    Err(e) => return ReplayStatus::Underivable(e.to_string()),
                },
            };
            match replay_transitions(&sys, s.word_count(), &transitions) {
                Ok(c) if !c.is_terminal() => ReplayStatus::Mismatch("sequence does not finish".into()),
                Ok(c) if c.to_graph().equal_modulo_null_ids(&gold) => ReplayStatus::Match,
                Ok(_) => ReplayStatus::Mismatch("graph differs from gold".into()),
                Err(e) => ReplayStatus::Mismatch(e.to_string()),
            }
        })
        .collect();
    let mut out = writer(None)?;
    let (mut matched, mut derivable) = (0, 0);
    for (i, (s, status)) in doc.iter().zip(&statuses).enumerate() {
        let name = sentence_name(s, i);
        match status {
            ReplayStatus::Match => {
                matched += 1;
                derivable += 1;
                writeln!(out, "{}\tMATCH", name)?;
            }
            ReplayStatus::Mismatch(why) => {
                derivable += 1;
                writeln!(out, "{}\tMISMATCH\t{}", name, why)?;
            }
            ReplayStatus::Underivable(why) => writeln!(out, "{}\tUNDERIVABLE\t{}", name, why)?,
        }
    }
    let rate = if derivable == 0 { 100.0 } else { 100.0 * matched as f64 / derivable as f64 };
    writeln!(
        out,
        "matched {}/{} derivable ({:.2}%), {} underivable",
        matched,
        derivable,
        rate,
        doc.len() - derivable
    )?;
    out.flush()?;
    Ok(outcome(matched == derivable))
}

pub fn train(args: &TrainArgs) -> Result<Outcome> {
    let doc = read_treebanks(&args.input)?;
    let opts = TrainOptions {
        epochs: args.epochs,
        seed: args.seed,
        feature_dim: args.feature_dim,
        system: TransitionSystem::default(),
    };
    let (model, report) = train_model(&doc, &opts)?;
    for (i, why) in &report.dropped {
        warn!("skipping sentence {}: {}", sentence_name(&doc[*i], *i), why);
    }
    std::fs::write(&args.model, model.to_text()).with_context(|| format!("writing {}", args.model.display()))?;
    let mut out = writer(None)?;
    writeln!(out, "examples\t{}", report.examples)?;
    writeln!(out, "dropped\t{}", report.dropped.len())?;
    for (epoch, accuracy) in report.epoch_accuracy.iter().enumerate() {
        writeln!(out, "epoch\t{}\taccuracy\t{:.4}", epoch + 1, accuracy)?;
    }
    out.flush()?;
    Ok(Outcome::Success)
}

fn parse_with(policy: &mut dyn Policy, sentence: &Sentence, budget_mult: usize) -> Result<Sentence> {
    let sys = TransitionSystem::default();
    let out = parse(&sys, sentence, policy, budget_mult * sentence.word_count() as usize)?;
    if !out.report.is_empty() {
        info!(
            "{}: repaired {} node(s), premature finish: {}",
            sentence.sent_id().unwrap_or("?"),
            out.report.attached_nodes.len(),
            out.report.premature_finish
        );
    }
    Ok(sentence.inject_graph(&out.graph)?)
}

pub fn parse_cmd(args: &ParseArgs) -> Result<Outcome> {
    let doc = read_treebank(args.input.input.as_deref())?;
    let parsed: Vec<Result<Sentence>> = match (args.policy, &args.model) {
        (Some(PolicyKind::Oracle), _) => {
            let gold = read_treebank(args.gold.as_deref())?;
            if gold.len() != doc.len() {
                bail!("gold has {} sentences but input has {}", gold.len(), doc.len());
            }
            doc.par_iter()
                .zip(&gold)
                .enumerate()
                .map(|(i, (s, g))| {
                    if s.word_count() != g.word_count() {
                        bail!("sentence {}: gold has a different number of words", i + 1);
                    }
                    parse_with(&mut OraclePolicy::new(g.extract_graph()?), s, args.budget_mult)
                })
                .collect()
        }
        (Some(PolicyKind::Shift), _) => doc
            .par_iter()
            .map(|s| parse_with(&mut ShiftPolicy, s, args.budget_mult))
            .collect(),
        (Some(PolicyKind::CopyTree), _) => doc
            .par_iter()
            .map(|s| Ok(copy_tree_baseline(s)?))
            .collect(),
        (None, Some(path)) => {
            let model = LinearModel::from_text(&read_text(Some(path))?)
                .with_context(|| format!("loading {}", path.display()))?;
            doc.par_iter()
                .map(|s| parse_with(&mut ModelPolicy::new(&model), s, args.budget_mult))
                .collect()
        }
        (None, None) => bail!("either --model or --policy is required"),
    };
    let parsed = parsed.into_iter().collect::<Result<Vec<_>>>()?;
    let mut out = writer(args.output.as_deref())?;
    write_conllu(&mut out, &parsed)?;
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn eval(args: &EvalArgs) -> Result<Outcome> {
    let gold = read_treebank(Some(&args.gold))?;
    let pred = read_treebank(args.pred.as_deref())?;
    if gold.len() != pred.len() {
        bail!("gold has {} sentences but prediction has {}", gold.len(), pred.len());
    }
    let parts: Vec<Evaluation> = gold
        .par_iter()
        .zip(&pred)
        .enumerate()
        .map(|(i, (g, p))| elas_sentence(i, g, p))
        .collect::<Result<_, _>>()?;
    let mut total = Evaluation::default();
    for part in parts {
        total.merge(part);
    }
    let mut out = writer(None)?;
    writeln!(out, "{}", total.total)?;
    if args.per_label {
        write!(out, "{}", per_label_report(&total))?;
    }
    out.flush()?;
    Ok(Outcome::Success)
}

pub fn validate(args: &InputArgs) -> Result<Outcome> {
    let doc = read_treebank(args.input.as_deref())?;
    let mut out = writer(None)?;
    let mut invalid = 0;
    for (i, s) in doc.iter().enumerate() {
        let name = sentence_name(s, i);
        let violations: Vec<String> = match s.extract_graph() {
            Ok(g) => validate_graph(&g).iter().map(ToString::to_string).collect(),
            Err(e) => vec![e.to_string()],
        };
        if !violations.is_empty() {
            invalid += 1;
        }
        for v in violations {
            writeln!(out, "{}: {}", name, v)?;
        }
    }
    writeln!(out, "{} of {} sentences invalid", invalid, doc.len())?;
    out.flush()?;
    Ok(outcome(invalid == 0))
}

pub fn stats(args: &StatsArgs) -> Result<Outcome> {
    let doc = read_treebanks(&args.input)?;
    let inv = label_inventory(&doc);
    let words: u64 = doc.iter().map(|s| u64::from(s.word_count())).sum();
    let mut out = writer(None)?;
    writeln!(out, "sentences\t{}", doc.len())?;
    writeln!(out, "words\t{}", words)?;
    writeln!(out, "labels\t{}", inv.labels.len())?;
    writeln!(out, "suffixed_labels\t{}", inv.suffixed())?;
    writeln!(out, "transitions\t{}", inv.transition_count())?;
    writeln!(out, "edge_transitions\t{}", inv.edge_transition_count())?;
    for (label, count) in &inv.labels {
        writeln!(out, "label\t{}\t{}", label, count)?;
    }
    out.flush()?;
    Ok(Outcome::Success)
}
