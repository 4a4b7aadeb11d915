//! One function per pipeline stage.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use super::config::RunConfig;
use super::{invalid, strip_header, OutputSet, PipelineError};
use crate::corpus::{
    context_ids, context_units, dedupe_documents, frequency_filter, generate_variants, match_contexts,
    read_corpus_jsonl, read_matches_csv, read_targets_csv, validate_target_list, write_matches_csv,
    write_variants_csv, ContextMatch, Document, FrequencyReport, MatchKind, MatchOptions, TargetSpec,
};
use crate::lexicon::{load_lexicon, read_tagged_contexts, write_tagging_input, TaggingPrep};
use crate::regression::{
    build_feature_rows, read_metadata_csv, regression_report, write_multivariate_csv, write_univariate_csv,
};
use crate::sentiment::{
    aggregate_labels, classify_contexts, compare_approaches, histogram_score, pairwise_iaa, read_labels_jsonl,
    sign_breakdown, target_valence_table, write_approach_comparison_csv, write_labels_jsonl,
    write_sign_breakdown_csv, write_target_valence_csv, ClassifyConfig, ClassifyItem, HttpClassifier, LabelRecord,
    RetryPolicy,
};
use crate::stats::{pearson, spearman, CorrelationResult};
use crate::valence::{
    compute_deltas, domain_summary, modifier_valence, name_pnc_plot_data, read_deltas_csv, read_scores_csv,
    score_contexts, write_deltas_csv, write_scores_csv, Approach, DeltaRecord, DomainSummary, Grouping, ScoreKind,
    ScoreRecord, ValenceError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Command {
    Variants,
    Match,
    Score,
    Sentiment,
    Compare,
    Regress,
    Report,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Variants,
        Command::Match,
        Command::Score,
        Command::Sentiment,
        Command::Compare,
        Command::Regress,
        Command::Report,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Variants => "variants",
            Command::Match => "match",
            Command::Score => "score",
            Command::Sentiment => "sentiment",
            Command::Compare => "compare",
            Command::Regress => "regress",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandReport {
    pub command: Command,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

// Artifact names shared between stages.
const MATCHES: &str = "matches.csv";
const SCORES: &str = "scores.csv";
const DELTAS: &str = "deltas.csv";
const LABEL_SCORES: &str = "label_scores.csv";
const LABEL_DELTAS: &str = "label_deltas.csv";
const TABLE2: &str = "table2_sign_breakdown.csv";
const TABLE3: &str = "table3_approach_comparison.csv";
const TABLE4: &str = "table4_target_valence.csv";
const TABLE6: &str = "table6_univariate.csv";
const TABLE7: &str = "table7_multivariate.csv";

fn csv_err(e: csv::Error) -> PipelineError {
    PipelineError::Failed(e.to_string())
}

fn io_err(e: std::io::Error) -> PipelineError {
    PipelineError::Failed(e.to_string())
}

fn write_csv<F>(out: &mut OutputSet, name: &str, f: F) -> Result<(), PipelineError>
where
    F: FnOnce(&mut Vec<u8>) -> Result<(), PipelineError>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    out.text(name, &buf)
}

fn score_order(a: &ScoreRecord, b: &ScoreRecord) -> std::cmp::Ordering {
    a.approach
        .cmp(&b.approach)
        .then_with(|| a.target_id.cmp(&b.target_id))
        .then_with(|| a.kind.cmp(&b.kind))
}

#[derive(Debug, Clone, Serialize)]
struct Correlations {
    n: usize,
    pearson: Option<CorrelationResult>,
    spearman: Option<CorrelationResult>,
    note: Option<String>,
}

fn correlations(x: &[f64], y: &[f64]) -> Correlations {
    let p = pearson(x, y);
    let s = spearman(x, y);
    let note = match (&p, &s) {
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        _ => None,
    };
    Correlations {
        n: x.len(),
        pearson: p.ok(),
        spearman: s.ok(),
        note,
    }
}

#[derive(Debug, Clone, Serialize)]
struct Unscorable {
    target_id: String,
    kind: &'static str,
    reason: String,
}

pub struct Pipeline {
    cfg: RunConfig,
    hash: String,
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let hash = cfg.hash();
        Ok(Pipeline { cfg, hash })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    pub fn out_dir(&self) -> &Path {
        &self.cfg.out
    }

    pub fn run(&self, command: Command) -> Result<CommandReport, PipelineError> {
        match command {
            Command::Variants => self.variants(),
            Command::Match => self.match_contexts(),
            Command::Score => self.score(),
            Command::Sentiment => self.sentiment(),
            Command::Compare => self.compare(),
            Command::Regress => self.regress(),
            Command::Report => self.report(),
        }
    }

    fn outputs(&self) -> OutputSet<'_> {
        OutputSet::new(&self.cfg.out, &self.hash, self.cfg.seed)
    }

    fn finish(&self, command: Command, out: OutputSet, notes: Vec<String>) -> Result<CommandReport, PipelineError> {
        for n in &notes {
            log::info!("{}: {n}", command.name());
        }
        Ok(CommandReport {
            command,
            outputs: out.finish(command.name())?,
            notes,
        })
    }

    /// Path of an upstream artifact, recorded as an input.
    fn artifact(&self, out: &mut OutputSet, name: &str) -> Result<PathBuf, PipelineError> {
        let path = self.cfg.out.join(name);
        if !path.is_file() {
            return Err(PipelineError::MissingArtifact(path));
        }
        out.input(name, &path)?;
        Ok(path)
    }

    fn input(&self, out: &mut OutputSet, configured: &Path) -> Result<PathBuf, PipelineError> {
        let path = self.cfg.resolve(configured);
        out.input(&configured.display().to_string(), &path)?;
        Ok(path)
    }

    fn required<'p>(&self, field: &str, value: &'p Option<PathBuf>) -> Result<&'p PathBuf, PipelineError> {
        value
            .as_ref()
            .ok_or_else(|| PipelineError::Validation(vec![format!("paths.{field} is required for this command")]))
    }

    fn targets(&self, out: &mut OutputSet) -> Result<Vec<TargetSpec>, PipelineError> {
        let path = self.input(out, &self.cfg.paths.targets)?;
        let targets = read_targets_csv(&path).map_err(invalid)?;
        validate_target_list(&targets).map_err(invalid)?;
        let mut targets = targets;
        targets.sort_by(|a, b| a.target_id.cmp(&b.target_id));
        Ok(targets)
    }

    /// All corpora concatenated in configured order, then deduplicated by URL.
    fn corpus(&self, out: &mut OutputSet) -> Result<Vec<Document>, PipelineError> {
        let mut docs = Vec::new();
        let mut ids = BTreeSet::new();
        for c in &self.cfg.paths.corpora {
            let path = self.input(out, c)?;
            for d in read_corpus_jsonl(&path).map_err(invalid)? {
                if !ids.insert(d.doc_id.clone()) {
                    return Err(invalid(format!("document id {} appears in more than one corpus", d.doc_id)));
                }
                docs.push(d);
            }
        }
        Ok(dedupe_documents(docs))
    }

    fn matches(&self, out: &mut OutputSet) -> Result<Vec<ContextMatch>, PipelineError> {
        let path = self.artifact(out, MATCHES)?;
        read_matches_csv(&path).map_err(invalid)
    }

    fn frequency(&self, targets: &[TargetSpec], matches: &[ContextMatch]) -> Result<FrequencyReport, PipelineError> {
        frequency_filter(targets, matches, self.cfg.min_freq).map_err(invalid)
    }

    fn match_options(&self) -> MatchOptions {
        MatchOptions {
            unit_policy: self.cfg.matching.unit.policy(),
            case_insensitive: self.cfg.matching.case_insensitive,
            exclude_overlaps: self.cfg.matching.exclude_overlaps,
        }
    }

    pub fn variants(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let targets = self.targets(&mut out)?;
        let sets = targets
            .iter()
            .map(generate_variants)
            .collect::<Result<Vec<_>, _>>()
            .map_err(invalid)?;
        let n: usize = sets.iter().map(|s| s.variants.len()).sum();
        write_csv(&mut out, "variants.csv", |b| write_variants_csv(b, &sets).map_err(invalid))?;
        self.finish(Command::Variants, out, vec![format!("{n} variants for {} targets", targets.len())])
    }

    pub fn match_contexts(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let targets = self.targets(&mut out)?;
        let corpus = self.corpus(&mut out)?;
        let options = self.match_options();
        let matches = match_contexts(&corpus, &targets, &options).map_err(invalid)?;
        let freq = self.frequency(&targets, &matches)?;

        write_csv(&mut out, MATCHES, |b| write_matches_csv(b, &matches).map_err(invalid))?;
        write_csv(&mut out, "frequency.csv", |b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["target_id", "pnc_matches", "full_name_matches", "status"]).map_err(csv_err)?;
            let mut rows: Vec<(&crate::corpus::TargetCount, &str)> = freq
                .retained
                .iter()
                .map(|c| (c, "retained"))
                .chain(freq.dropped.iter().map(|c| (c, "below_min_freq")))
                .collect();
            rows.sort_by(|a, b| a.0.target_id.cmp(&b.0.target_id));
            for (c, status) in rows {
                w.write_record([
                    c.target_id.as_str(),
                    &c.pnc_matches.to_string(),
                    &c.full_name_matches.to_string(),
                    status,
                ])
                .map_err(csv_err)?;
            }
            w.flush().map_err(io_err)
        })?;

        let matched: BTreeSet<&str> = matches.iter().map(|m| m.doc_id.as_str()).collect();
        let mut units: Vec<Document> = context_units(&corpus, options.unit_policy)
            .into_iter()
            .filter(|u| matched.contains(u.doc_id.as_str()))
            .collect();
        units.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        write_csv(&mut out, "tagging_input.txt", |b| {
            write_tagging_input(b, &units, &TaggingPrep::default()).map_err(io_err)
        })?;

        let notes = vec![
            format!("{} matches in {} of {} documents", matches.len(), matched.len(), corpus.len()),
            format!(
                "{} targets retained, {} below min_freq={}",
                freq.retained.len(),
                freq.dropped.len(),
                self.cfg.min_freq
            ),
        ];
        self.finish(Command::Match, out, notes)
    }

    pub fn score(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let targets = self.targets(&mut out)?;
        let matches = self.matches(&mut out)?;
        let freq = self.frequency(&targets, &matches)?;
        let lex_path = self.input(&mut out, self.required("lexicon", &self.cfg.paths.lexicon)?)?;
        let lexicon = load_lexicon(&lex_path, self.cfg.scoring.duplicate_policy, self.cfg.seed).map_err(invalid)?;
        let tagged_path = self.input(&mut out, self.required("tagged", &self.cfg.paths.tagged)?)?;
        let tagged = read_tagged_contexts(&tagged_path).map_err(invalid)?;

        let mut scores = Vec::new();
        let mut unscorable = Vec::new();
        let mut missing_tagged = BTreeSet::new();
        for t in targets.iter().filter(|t| freq.is_retained(&t.target_id)) {
            for (kind, score_kind) in [(MatchKind::Pnc, ScoreKind::Pnc), (MatchKind::FullName, ScoreKind::FullName)] {
                let ids = context_ids(&matches, &t.target_id, kind);
                if ids.is_empty() {
                    unscorable.push(Unscorable {
                        target_id: t.target_id.clone(),
                        kind: score_kind.as_str(),
                        reason: "no contexts".into(),
                    });
                    continue;
                }
                let lemmas: Vec<Vec<&str>> = ids
                    .iter()
                    .map(|id| {
                        if tagged.get(id).is_none() {
                            missing_tagged.insert(id.to_string());
                        }
                        tagged.content_lemmas(id).collect()
                    })
                    .collect();
                match score_contexts(&t.target_id, score_kind, &lemmas, &lexicon, self.cfg.scoring.pooling) {
                    Ok(s) => scores.push(s),
                    Err(ValenceError::Unscorable) => unscorable.push(Unscorable {
                        target_id: t.target_id.clone(),
                        kind: score_kind.as_str(),
                        reason: "no content lemma found in the lexicon".into(),
                    }),
                    Err(e) => return Err(invalid(e)),
                }
            }
            match &t.modifier_lemma {
                Some(lemma) => match modifier_valence(t, lemma, &lexicon) {
                    Some(s) => scores.push(s),
                    None => unscorable.push(Unscorable {
                        target_id: t.target_id.clone(),
                        kind: ScoreKind::Modifier.as_str(),
                        reason: format!("modifier lemma {lemma:?} not in the lexicon"),
                    }),
                },
                None => unscorable.push(Unscorable {
                    target_id: t.target_id.clone(),
                    kind: ScoreKind::Modifier.as_str(),
                    reason: "no modifier lemma supplied".into(),
                }),
            }
        }
        scores.sort_by(score_order);
        let of_kind = |k: ScoreKind| -> Vec<ScoreRecord> { scores.iter().filter(|s| s.kind == k).cloned().collect() };
        let (pnc, name, modifier) = (of_kind(ScoreKind::Pnc), of_kind(ScoreKind::FullName), of_kind(ScoreKind::Modifier));
        let deltas = compute_deltas(&pnc, &name, &modifier).map_err(invalid)?;

        write_csv(&mut out, SCORES, |b| write_scores_csv(b, &scores).map_err(csv_err))?;
        write_csv(&mut out, DELTAS, |b| write_deltas_csv(b, &deltas).map_err(csv_err))?;
        write_csv(&mut out, "unscorable.csv", |b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["target_id", "kind", "reason"]).map_err(csv_err)?;
            for u in &unscorable {
                w.write_record([u.target_id.as_str(), u.kind, &u.reason]).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)
        })?;

        let value = |v: &[ScoreRecord], id: &str| v.iter().find(|s| s.target_id == id).map(|s| s.valence);
        let (mut xp, mut xn) = (Vec::new(), Vec::new());
        let (mut mp, mut mm) = (Vec::new(), Vec::new());
        for d in &deltas {
            if let (Some(p), Some(n)) = (value(&pnc, &d.target_id), value(&name, &d.target_id)) {
                xp.push(p);
                xn.push(n);
                if let Some(m) = value(&modifier, &d.target_id) {
                    mp.push(p);
                    mm.push(m);
                }
            }
        }
        let corr: BTreeMap<&str, Correlations> = [
            ("pnc_vs_name", correlations(&xp, &xn)),
            ("modifier_vs_pnc", correlations(&mm, &mp)),
        ]
        .into_iter()
        .collect();
        out.json("correlation.json", &corr)?;

        #[derive(Serialize)]
        struct ScoreSummary<'a> {
            retained_targets: usize,
            pnc_scores: usize,
            name_scores: usize,
            modifier_scores: usize,
            deltas: usize,
            by_domain: DomainSummary,
            overall: DomainSummary,
            missing_tagged_contexts: &'a BTreeSet<String>,
        }
        let summary = ScoreSummary {
            retained_targets: freq.retained.len(),
            pnc_scores: pnc.len(),
            name_scores: name.len(),
            modifier_scores: modifier.len(),
            deltas: deltas.len(),
            by_domain: domain_summary(&deltas, &pnc, &name, &targets, Grouping::Domain),
            overall: domain_summary(&deltas, &pnc, &name, &targets, Grouping::All),
            missing_tagged_contexts: &missing_tagged,
        };
        out.json("score_summary.json", &summary)?;

        let mut notes = vec![format!(
            "{} deltas from {} retained targets, {} unscorable entries",
            deltas.len(),
            freq.retained.len(),
            unscorable.len()
        )];
        if !missing_tagged.is_empty() {
            notes.push(format!("{} contexts have no tagged tokens", missing_tagged.len()));
        }
        self.finish(Command::Score, out, notes)
    }

    /// Label records from the label file and, if configured, the
    /// classification service.
    fn collect_labels(
        &self,
        out: &mut OutputSet,
        targets: &[TargetSpec],
        matches: &[ContextMatch],
        freq: &FrequencyReport,
        notes: &mut Vec<String>,
    ) -> Result<Vec<LabelRecord>, PipelineError> {
        let mut labels = Vec::new();
        if let Some(p) = &self.cfg.paths.labels {
            let path = self.input(out, p)?;
            labels = read_labels_jsonl(&path).map_err(invalid)?;
        }
        let Some(service) = &self.cfg.sentiment.service else {
            if self.cfg.paths.labels.is_none() {
                return Err(PipelineError::Validation(vec![
                    "sentiment needs paths.labels or a sentiment.service".into(),
                ]));
            }
            return Ok(labels);
        };

        let corpus = self.corpus(out)?;
        let units = context_units(&corpus, self.cfg.matching.unit.policy());
        let text: BTreeMap<&str, &str> = units.iter().map(|u| (u.doc_id.as_str(), u.text.as_str())).collect();
        let mut items = Vec::new();
        for t in targets.iter().filter(|t| freq.is_retained(&t.target_id)) {
            for kind in [MatchKind::Pnc, MatchKind::FullName] {
                for id in context_ids(matches, &t.target_id, kind) {
                    if let Some(txt) = text.get(id) {
                        items.push(ClassifyItem {
                            target_id: t.target_id.clone(),
                            context_id: id.to_string(),
                            text: txt.to_string(),
                        });
                    }
                }
            }
        }
        let retry = RetryPolicy {
            max_retries: service.max_retries,
            ..RetryPolicy::default()
        };
        let client = HttpClassifier::new(&service.endpoint, Duration::from_millis(service.timeout_ms), retry)
            .map_err(invalid)?;
        let outcome = classify_contexts(
            &items,
            &client,
            &ClassifyConfig {
                source_id: service.source_id.clone(),
                batch_size: service.batch_size,
                max_in_flight: service.max_in_flight,
            },
        )
        .map_err(invalid)?;

        write_csv(out, "classification_errors.csv", |b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["target_id", "context_id", "message"]).map_err(csv_err)?;
            for e in &outcome.item_errors {
                w.write_record([&e.target_id, &e.context_id, &e.message]).map_err(csv_err)?;
            }
            for f in &outcome.batch_failures {
                for id in &f.context_ids {
                    w.write_record(["", id.as_str(), &f.error.to_string()]).map_err(csv_err)?;
                }
            }
            w.flush().map_err(io_err)
        })?;
        let mut body = Vec::new();
        write_labels_jsonl(&mut body, &outcome.records).map_err(io_err)?;
        out.text("classified_labels.jsonl", &body)?;
        notes.push(format!(
            "service {}: {} labels, {} item errors, {} failed batches",
            service.source_id,
            outcome.records.len(),
            outcome.item_errors.len(),
            outcome.batch_failures.len()
        ));

        let mut seen: BTreeSet<(String, String, String)> = labels
            .iter()
            .map(|l| (l.target_id.clone(), l.context_id.clone(), l.source_id.clone()))
            .collect();
        for r in outcome.records {
            if !seen.insert((r.target_id.clone(), r.context_id.clone(), r.source_id.clone())) {
                return Err(invalid(format!(
                    "service label for ({}, {}, {}) duplicates the label file",
                    r.target_id, r.context_id, r.source_id
                )));
            }
            labels.push(r);
        }
        Ok(labels)
    }

    pub fn sentiment(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let mut notes = Vec::new();
        let targets = self.targets(&mut out)?;
        let matches = self.matches(&mut out)?;
        let freq = self.frequency(&targets, &matches)?;
        let labels = self.collect_labels(&mut out, &targets, &matches, &freq, &mut notes)?;

        let sc = &self.cfg.sentiment;
        let source_of = |s: &str| -> Option<String> {
            if sc.exclude_annotators.iter().any(|e| e == s) {
                None
            } else if sc.human_sources.iter().any(|h| h == s) {
                Some("human".to_string())
            } else {
                Some(s.to_string())
            }
        };
        let approach_of = |source: &str| {
            if source == "human" {
                Approach::Human
            } else {
                Approach::Plm(source.to_string())
            }
        };

        let mut by_source: BTreeMap<String, (Vec<ScoreRecord>, Vec<ScoreRecord>)> = BTreeMap::new();
        for (kind, score_kind) in [(MatchKind::Pnc, ScoreKind::Pnc), (MatchKind::FullName, ScoreKind::FullName)] {
            for h in aggregate_labels(&labels, &matches, kind, source_of) {
                if !freq.is_retained(&h.target_id) {
                    continue;
                }
                let n_contexts = context_ids(&matches, &h.target_id, kind).len();
                let rec = histogram_score(&h, score_kind, approach_of(&h.source_id), n_contexts).map_err(invalid)?;
                let entry = by_source.entry(h.source_id.clone()).or_default();
                match score_kind {
                    ScoreKind::Pnc => entry.0.push(rec),
                    _ => entry.1.push(rec),
                }
            }
        }

        let mut scores = Vec::new();
        let mut deltas = Vec::new();
        for (pnc, name) in by_source.values() {
            deltas.extend(compute_deltas(pnc, name, &[]).map_err(invalid)?);
            scores.extend(pnc.iter().cloned());
            scores.extend(name.iter().cloned());
        }
        scores.sort_by(score_order);
        deltas.sort_by(|a, b| a.approach.cmp(&b.approach).then_with(|| a.target_id.cmp(&b.target_id)));
        write_csv(&mut out, LABEL_SCORES, |b| write_scores_csv(b, &scores).map_err(csv_err))?;
        write_csv(&mut out, LABEL_DELTAS, |b| write_deltas_csv(b, &deltas).map_err(csv_err))?;

        let human: Vec<LabelRecord> = labels.iter().filter(|l| sc.human_sources.contains(&l.source_id)).cloned().collect();
        let exclude: Vec<&str> = sc.exclude_annotators.iter().map(String::as_str).collect();
        match pairwise_iaa(&human, &exclude) {
            Ok(iaa) => {
                if let Some(rho) = iaa.mean_rho {
                    notes.push(format!("mean pairwise annotator rho {rho:.2}"));
                }
                out.json("iaa.json", &iaa)?;
            }
            Err(e) => notes.push(format!("agreement not computed: {e}")),
        }
        notes.push(format!("{} sources, {} deltas", by_source.len(), deltas.len()));
        self.finish(Command::Sentiment, out, notes)
    }

    pub fn compare(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let mut notes = Vec::new();
        let norm_deltas = read_deltas_csv(&self.artifact(&mut out, DELTAS)?).map_err(invalid)?;
        let norm_scores = read_scores_csv(&self.artifact(&mut out, SCORES)?).map_err(invalid)?;
        let label_deltas = read_deltas_csv(&self.artifact(&mut out, LABEL_DELTAS)?).map_err(invalid)?;
        let label_scores = read_scores_csv(&self.artifact(&mut out, LABEL_SCORES)?).map_err(invalid)?;

        let mut deltas_by: BTreeMap<String, Vec<DeltaRecord>> = BTreeMap::new();
        for d in label_deltas.iter().chain(&norm_deltas) {
            deltas_by.entry(d.approach.to_string()).or_default().push(d.clone());
        }
        let table2 = sign_breakdown(&deltas_by);

        let mode = self.cfg.compare.comparison_mode();
        let mut table3 = Vec::new();
        for (source, deltas) in &deltas_by {
            if source == &Approach::Norms.to_string() {
                continue;
            }
            match compare_approaches(deltas, &norm_deltas, mode) {
                Ok(c) => table3.push((source.clone(), c)),
                Err(e) => notes.push(format!("{source}: {e}")),
            }
        }

        let mut scores_by: BTreeMap<String, (Vec<ScoreRecord>, Vec<ScoreRecord>)> = BTreeMap::new();
        for s in label_scores.iter().chain(&norm_scores) {
            let entry = scores_by.entry(s.approach.to_string()).or_default();
            match s.kind {
                ScoreKind::Pnc => entry.0.push(s.clone()),
                ScoreKind::FullName => entry.1.push(s.clone()),
                ScoreKind::Modifier => {}
            }
        }
        let table4 = target_valence_table(&scores_by);

        write_csv(&mut out, TABLE2, |b| write_sign_breakdown_csv(b, &table2).map_err(csv_err))?;
        write_csv(&mut out, TABLE3, |b| write_approach_comparison_csv(b, &table3).map_err(csv_err))?;
        write_csv(&mut out, TABLE4, |b| write_target_valence_csv(b, &table4).map_err(csv_err))?;
        out.json("comparison.json", &table3)?;
        notes.push(format!("{} sources compared against norms", table3.len()));
        self.finish(Command::Compare, out, notes)
    }

    pub fn regress(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let deltas = read_deltas_csv(&self.artifact(&mut out, DELTAS)?).map_err(invalid)?;
        let scores = read_scores_csv(&self.artifact(&mut out, SCORES)?).map_err(invalid)?;
        let meta_path = self.input(&mut out, self.required("metadata", &self.cfg.paths.metadata)?)?;
        let metadata = read_metadata_csv(&meta_path).map_err(invalid)?;
        let rows = build_feature_rows(&deltas, &scores, &metadata);
        let report = regression_report(&rows, &self.cfg.cv_config());

        write_csv(&mut out, TABLE6, |b| write_univariate_csv(b, &report.univariate).map_err(csv_err))?;
        write_csv(&mut out, TABLE7, |b| write_multivariate_csv(b, &report.multivariate).map_err(csv_err))?;
        out.json("regression.json", &report)?;

        let failed = report.univariate.iter().filter(|u| u.fit.is_none()).count()
            + report.multivariate.iter().filter(|m| m.fit.is_none()).count()
            + report.elastic_net.iter().filter(|e| e.fit.is_none()).count();
        let notes = vec![format!("{} feature rows, {failed} fits failed (see report notes)", rows.len())];
        self.finish(Command::Regress, out, notes)
    }

    pub fn report(&self) -> Result<CommandReport, PipelineError> {
        let mut out = self.outputs();
        let targets = self.targets(&mut out)?;
        let matches = self.matches(&mut out)?;
        let scores = read_scores_csv(&self.artifact(&mut out, SCORES)?).map_err(invalid)?;
        let deltas = read_deltas_csv(&self.artifact(&mut out, DELTAS)?).map_err(invalid)?;
        let tables: Vec<(&str, PathBuf)> = [
            ("table2.csv", TABLE2),
            ("table3.csv", TABLE3),
            ("table6.csv", TABLE6),
            ("table7.csv", TABLE7),
        ]
        .into_iter()
        .map(|(dst, src)| Ok((dst, self.artifact(&mut out, src)?)))
        .collect::<Result<_, PipelineError>>()?;

        let freq = self.frequency(&targets, &matches)?;
        let pnc: Vec<ScoreRecord> = scores.iter().filter(|s| s.kind == ScoreKind::Pnc).cloned().collect();
        let name: Vec<ScoreRecord> = scores.iter().filter(|s| s.kind == ScoreKind::FullName).cloned().collect();
        let frequency: BTreeMap<String, usize> = freq
            .retained
            .iter()
            .chain(&freq.dropped)
            .map(|c| (c.target_id.clone(), c.pnc_matches))
            .collect();

        out.json("report/fig1_name_pnc.json", &name_pnc_plot_data(&targets, &pnc, &name, &frequency))?;
        #[derive(Serialize)]
        struct DomainValence {
            by_domain: DomainSummary,
            overall: DomainSummary,
        }
        out.json(
            "report/fig3_domain_valence.json",
            &DomainValence {
                by_domain: domain_summary(&deltas, &pnc, &name, &targets, Grouping::Domain),
                overall: domain_summary(&deltas, &pnc, &name, &targets, Grouping::All),
            },
        )?;
        for (dst, src) in &tables {
            let bytes = std::fs::read(src).map_err(|source| PipelineError::Io {
                path: src.clone(),
                source,
            })?;
            out.text(&format!("report/{dst}"), strip_header(&bytes))?;
        }

        #[derive(Serialize)]
        struct Funnel {
            targets: usize,
            retained: usize,
            below_min_freq: usize,
            min_freq: usize,
            pnc_scored: usize,
            name_scored: usize,
            deltas: usize,
        }
        let funnel = Funnel {
            targets: targets.len(),
            retained: freq.retained.len(),
            below_min_freq: freq.dropped.len(),
            min_freq: self.cfg.min_freq,
            pnc_scored: pnc.len(),
            name_scored: name.len(),
            deltas: deltas.len(),
        };
        out.json("report/summary.json", &funnel)?;
        let notes = vec![format!(
            "funnel: {} targets -> {} retained -> {} deltas",
            funnel.targets, funnel.retained, funnel.deltas
        )];
        self.finish(Command::Report, out, notes)
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T, PipelineError> + Send,
) -> Result<T, PipelineError> {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::Failed(e.to_string()))?
            .install(f),
        None => f(),
    }
}

/// Validates the config and runs one command.
pub fn run_command(cfg: RunConfig, command: Command) -> Result<CommandReport, PipelineError> {
    let threads = cfg.threads;
    let pipeline = Pipeline::new(cfg)?;
    with_threads(threads, || pipeline.run(command))
}

/// Runs every stage in order, stopping at the first failure.
pub fn run_all(cfg: RunConfig) -> Result<Vec<CommandReport>, PipelineError> {
    let threads = cfg.threads;
    let pipeline = Pipeline::new(cfg)?;
    with_threads(threads, || Command::ALL.iter().map(|c| pipeline.run(*c)).collect())
}
