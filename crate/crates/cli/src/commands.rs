use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use genderlex_core::annotate::{extract_candidates, CandidateOptions};
use genderlex_core::audit::{default_exclusions, frequency_table, run_audit, top_terms};
use genderlex_core::corpus::corpus_stats;
use genderlex_core::lexicon::{subtract_with, DictFormat, ThresholdPolicy};
use genderlex_core::report::{render_audit, render_chi2, render_top_terms, report_file_name, ReportFormat};
use genderlex_core::stats::{chi2_2x2, chi2_gof};
use genderlex_core::{
    AuditReport, AvaMode, Category, Corpus, Dictionary, Error, Partition, Pipeline,
    PipelineProfile, Result, StopWords,
};

use crate::args::{AuditArgs, Chi2Command, Chi2Output, Cli, Command, CorpusArgs, DictArgs, ServeArgs};
use crate::config::{check_bind, Config, DEFAULT_BIND, DEFAULT_PORT};
use crate::inputs::{
    default_profile, load_ava, load_corpora, load_dictionaries, CorpusFormat, CorpusSpec, DictSpec,
};
use crate::service::{self, AppState};

pub(crate) fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest { corpus, out: file } => ingest(&cfg, &corpus, file.as_deref(), out),
        Command::Stats {
            corpus,
            profile,
            out: file,
        } => stats(&cfg, &corpus, &profile, file.as_deref(), out),
        Command::Audit(a) => audit(&cfg, &a, out, err),
        Command::Chi2 { test } => chi2(test, out),
        Command::AvaExtract {
            corpus,
            dict,
            sampling,
            out: file,
        } => {
            let opts = CandidateOptions {
                samples_per_corpus: sampling.samples,
                window: sampling.window,
            };
            ava_extract(&cfg, &corpus, &dict, opts, file.as_deref(), out)
        }
        Command::AvaApply {
            dict,
            ava,
            mode,
            out: file,
        } => ava_apply(&cfg, &dict, &ava, mode, file.as_deref(), out, err),
        Command::AnnotateServe(a) => annotate_serve(&cfg, &a, err),
        Command::Report {
            input,
            format,
            out: file,
            out_dir,
        } => report(&cfg, &input, format, file.as_deref(), out_dir, out),
    }
}

fn emit(text: &str, file: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match file {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn corpus_specs(cfg: &Config, a: &CorpusArgs) -> Result<Vec<CorpusSpec>> {
    if !a.corpus.is_empty() {
        return Ok(a
            .corpus
            .iter()
            .map(|s| CorpusSpec::parse(s, a.format, a.partition))
            .collect());
    }
    if cfg.corpus.is_empty() {
        return Err(Error::Validation {
            field: "corpus".into(),
            message: "at least one --corpus is required".into(),
        });
    }
    cfg.corpus
        .iter()
        .map(|c| {
            Ok(CorpusSpec {
                name: c.name.clone(),
                path: c.path.clone(),
                format: c.format.as_deref().map(str::parse::<CorpusFormat>).transpose()?,
                partition: c.partition.as_deref().map(str::parse::<Partition>).transpose()?,
            })
        })
        .collect()
}

fn dict_specs(cfg: &Config, a: &DictArgs) -> Result<Vec<DictSpec>> {
    if !a.dict.is_empty() {
        return Ok(a
            .dict
            .iter()
            .map(|p| DictSpec {
                path: p.clone(),
                format: a.dict_format,
                threshold: a.threshold,
            })
            .collect());
    }
    cfg.dictionary
        .iter()
        .map(|d| {
            Ok(DictSpec {
                path: d.path.clone(),
                format: d.format.as_deref().map(str::parse::<DictFormat>).transpose()?,
                threshold: match (&d.threshold, a.threshold) {
                    (_, Some(t)) => Some(t),
                    (Some(t), None) => Some(t.parse::<ThresholdPolicy>()?),
                    (None, None) => None,
                },
            })
        })
        .collect()
}

fn resolve_profile(cfg: &Config, flag: Option<&str>, d: &Dictionary) -> Result<PipelineProfile> {
    match flag.or(cfg.profile.as_deref()) {
        Some(name) => name.parse(),
        None => default_profile(d),
    }
}

#[derive(Serialize)]
struct CorpusSummary<'a> {
    name: &'a str,
    source_format: genderlex_core::corpus::SourceFormat,
    utterances: usize,
    partitions: BTreeMap<Partition, usize>,
}

fn ingest(cfg: &Config, a: &CorpusArgs, file: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let corpora = load_corpora(&corpus_specs(cfg, a)?)?;
    let summaries: Vec<CorpusSummary> = corpora
        .iter()
        .map(|c| {
            let mut partitions = BTreeMap::new();
            for u in &c.utterances {
                *partitions.entry(u.partition).or_insert(0) += 1;
            }
            CorpusSummary {
                name: &c.name,
                source_format: c.source_format,
                utterances: c.len(),
                partitions,
            }
        })
        .collect();
    emit(&to_json(&summaries), file, out)
}

#[derive(Serialize)]
struct StatsLine<'a> {
    corpus: &'a str,
    profile: &'a str,
    #[serde(flatten)]
    stats: genderlex_core::corpus::CorpusStats,
}

fn stats(
    cfg: &Config,
    a: &CorpusArgs,
    profile: &str,
    file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let profile: PipelineProfile = profile.parse()?;
    let sw = StopWords::english();
    let corpora = load_corpora(&corpus_specs(cfg, a)?)?;
    let rows: Vec<StatsLine> = corpora
        .iter()
        .map(|c| StatsLine {
            corpus: &c.name,
            profile: &profile.name,
            stats: corpus_stats(c, &profile, &sw),
        })
        .collect();
    emit(&to_json(&rows), file, out)
}

fn ava_settings(cfg: &Config, a: &AuditArgs) -> Result<Option<(Vec<genderlex_core::AvaEntry>, AvaMode)>> {
    let source = a
        .ava
        .clone()
        .or_else(|| cfg.ava.as_ref().map(|x| x.path.clone().unwrap_or_else(|| "shipped".into())));
    let Some(source) = source else {
        if a.ava_mode.is_some() {
            return Err(Error::Validation {
                field: "ava_mode".into(),
                message: "--ava-mode needs --ava".into(),
            });
        }
        return Ok(None);
    };
    let mode = match (a.ava_mode, cfg.ava.as_ref().and_then(|x| x.mode.as_deref())) {
        (Some(m), _) => m,
        (None, Some(m)) => m.parse()?,
        (None, None) => AvaMode::Remove,
    };
    Ok(Some((load_ava(&source)?, mode)))
}

fn exclusions(cfg: &Config, a: &AuditArgs, d: &Dictionary) -> Vec<String> {
    if a.no_exclusions {
        Vec::new()
    } else if !a.exclude.is_empty() {
        a.exclude.clone()
    } else if let Some(x) = &cfg.exclusions {
        x.clone()
    } else {
        default_exclusions(d)
    }
}

/// Flag, then the `--out` extension, then the config, then markdown.
fn report_format(flag: Option<ReportFormat>, file: Option<&Path>, cfg: &Config) -> Result<ReportFormat> {
    if let Some(f) = flag {
        return Ok(f);
    }
    if let Some(f) = file
        .and_then(|p| p.extension())
        .and_then(|e| e.to_str())
        .and_then(|e| e.parse().ok())
    {
        return Ok(f);
    }
    match cfg.output.format.as_deref() {
        Some(f) => f.parse(),
        None => Ok(ReportFormat::Markdown),
    }
}

/// Several reports in one stream: JSON arrays, text concatenated.
fn join_rendered(parts: Vec<String>, reports: &[AuditReport], fmt: ReportFormat) -> String {
    if parts.len() == 1 {
        return parts.into_iter().next().expect("one part");
    }
    if fmt == ReportFormat::Json {
        return to_json(&reports);
    }
    parts.join("\n")
}

fn audit(cfg: &Config, a: &AuditArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let corpora = load_corpora(&corpus_specs(cfg, &a.corpus)?)?;
    let dict = load_dictionaries(&dict_specs(cfg, &a.dict)?)?;
    let profile = resolve_profile(cfg, a.profile.as_deref(), &dict)?;
    let pipeline = Pipeline::new(profile, StopWords::english());
    let ava = ava_settings(cfg, a)?;
    let excl = exclusions(cfg, a, &dict);
    let fmt = report_format(a.report_format, a.out.as_deref(), cfg)?;
    let out_dir = a.out_dir.clone().or_else(|| cfg.output.dir.clone());

    let mut reports = Vec::new();
    let mut rendered = Vec::new();
    let mut match_lines = String::new();
    let mut tops = Vec::new();
    for c in &corpora {
        let m = run_audit(
            c,
            &dict,
            &pipeline,
            ava.as_ref().map(|(t, mode)| (t.as_slice(), *mode)),
            &excl,
        )?;
        let r = frequency_table(&m);
        r.check()?;
        let text = render_audit(&r, fmt)?;
        if let Some(dir) = &out_dir {
            if a.out.is_none() {
                fs::create_dir_all(dir)?;
                let p = dir.join(report_file_name(&r.corpus_name, &r.dictionary_name, &r.profile_name, fmt));
                fs::write(&p, &text)?;
                writeln!(err, "wrote {}", p.display())?;
            }
        }
        if a.matches.is_some() {
            match_lines.push_str(&m.to_jsonl());
        }
        if a.top_out.is_some() {
            tops.push(render_top_terms(&c.name, &top_terms(&m, a.top), fmt)?);
        }
        rendered.push(text);
        reports.push(r);
    }
    if let Some(p) = &a.matches {
        fs::write(p, match_lines)?;
    }
    if let Some(p) = &a.top_out {
        fs::write(p, tops.join("\n"))?;
    }
    if out_dir.is_some() && a.out.is_none() {
        return Ok(());
    }
    emit(&join_rendered(rendered, &reports, fmt), a.out.as_deref(), out)
}

fn chi2(test: Chi2Command, out: &mut dyn Write) -> Result<()> {
    let (result, output) = match test {
        Chi2Command::Gof {
            counts,
            expected,
            output,
        } => {
            let exp = (!expected.is_empty()).then_some(expected.as_slice());
            (chi2_gof(&counts, exp)?, output)
        }
        Chi2Command::Ind {
            cells,
            yates: _,
            no_yates,
            output,
        } => {
            let t = [[cells[0], cells[1]], [cells[2], cells[3]]];
            (chi2_2x2(t, !no_yates)?, output)
        }
    };
    let Chi2Output { format, label } = output;
    let text = if format == "text" {
        format!(
            "{} {} {}\n",
            genderlex_core::report::fmt_statistic(result.statistic),
            result.df,
            genderlex_core::report::fmt_p(result.p)
        )
    } else {
        let fmt: ReportFormat = format.parse().map_err(|_| Error::Validation {
            field: "format".into(),
            message: format!("unknown output format `{format}` (expected text, markdown, csv or json)"),
        })?;
        render_chi2(&[(label, result)], fmt)?
    };
    emit(&text, None, out)
}

fn gendered_audits<'a>(
    corpora: &'a [Corpus],
    dict: &Dictionary,
) -> Result<Vec<(genderlex_core::MatchSet, &'a Corpus)>> {
    if !dict.categories().contains(&Category::GenderedLanguage) {
        return Err(Error::Validation {
            field: "dict".into(),
            message: "candidates come from gendered-language dictionaries".into(),
        });
    }
    let pipeline = Pipeline::new(PipelineProfile::gendered_language(), StopWords::english());
    let gl: Vec<_> = dict
        .entries()
        .iter()
        .filter(|e| e.category == Category::GenderedLanguage)
        .cloned()
        .collect();
    let gl = Dictionary::new(dict.name.clone(), gl, dict.metadata.clone());
    corpora
        .iter()
        .map(|c| Ok((run_audit(c, &gl, &pipeline, None, &[])?, c)))
        .collect()
}

fn ava_extract(
    cfg: &Config,
    a: &CorpusArgs,
    d: &DictArgs,
    opts: CandidateOptions,
    file: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    let corpora = load_corpora(&corpus_specs(cfg, a)?)?;
    let dict = load_dictionaries(&dict_specs(cfg, d)?)?;
    let sets = gendered_audits(&corpora, &dict)?;
    let refs: Vec<_> = sets.iter().map(|(m, c)| (m, *c)).collect();
    emit(&to_json(&extract_candidates(&refs, opts)), file, out)
}

fn ava_apply(
    cfg: &Config,
    d: &DictArgs,
    ava: &str,
    mode: AvaMode,
    file: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let dict = load_dictionaries(&dict_specs(cfg, d)?)?;
    let terms = load_ava(ava)?;
    let sub = subtract_with(&dict, &terms, mode, &StopWords::english());
    writeln!(
        err,
        "{}: {} -> {} entries; {} of {} AVA terms not in the dictionary",
        dict.name,
        dict.len(),
        sub.dictionary.len(),
        sub.absent_terms,
        terms.len()
    )?;
    emit(&sub.dictionary.to_entries_jsonl(), file, out)
}

fn annotate_serve(cfg: &Config, a: &ServeArgs, err: &mut dyn Write) -> Result<()> {
    let bind = a
        .bind
        .clone()
        .or_else(|| cfg.service.bind.clone())
        .unwrap_or_else(|| DEFAULT_BIND.to_string());
    let ip = check_bind(&bind, a.unsafe_bind || cfg.service.unsafe_bind)?;
    let port = a.port.or(cfg.service.port).unwrap_or(DEFAULT_PORT);
    let journal_dir: Option<PathBuf> = a.journal_dir.clone().or_else(|| cfg.service.journal_dir.clone());

    let corpora = load_corpora(&corpus_specs(cfg, &a.corpus)?)?;
    let dict = load_dictionaries(&dict_specs(cfg, &a.dict)?)?;
    let profile = resolve_profile(cfg, a.profile.as_deref(), &dict)?;
    let category = match dict.categories().as_slice() {
        [c] => *c,
        _ => Category::GenderedLanguage,
    };
    let opts = CandidateOptions {
        samples_per_corpus: a.sampling.samples,
        window: a.sampling.window,
    };
    let candidates = {
        let sets = gendered_audits(&corpora, &dict)?;
        let refs: Vec<_> = sets.iter().map(|(m, c)| (m, *c)).collect();
        extract_candidates(&refs, opts)
    };
    writeln!(err, "{} candidate terms", candidates.len())?;
    let state = AppState::new(
        corpora,
        Pipeline::new(profile, StopWords::english()),
        category,
        candidates,
        journal_dir,
        service::system_clock(),
    )?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(service::serve(Arc::new(state), SocketAddr::new(ip, port)))?;
    Ok(())
}

fn report(
    cfg: &Config,
    input: &Path,
    format: Option<ReportFormat>,
    file: Option<&Path>,
    out_dir: Option<PathBuf>,
    out: &mut dyn Write,
) -> Result<()> {
    let text = fs::read_to_string(input)?;
    let parse_err = |e: serde_json::Error| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    };
    let reports: Vec<AuditReport> = match serde_json::from_str::<AuditReport>(&text) {
        Ok(r) => vec![r],
        Err(_) => serde_json::from_str(&text).map_err(parse_err)?,
    };
    for r in &reports {
        r.check()?;
    }
    let fmt = report_format(format, file, cfg)?;
    let out_dir = out_dir.or_else(|| cfg.output.dir.clone()).filter(|_| file.is_none());
    let mut rendered = Vec::new();
    for r in &reports {
        let t = render_audit(r, fmt)?;
        if let Some(dir) = &out_dir {
            fs::create_dir_all(dir)?;
            fs::write(
                dir.join(report_file_name(&r.corpus_name, &r.dictionary_name, &r.profile_name, fmt)),
                &t,
            )?;
        }
        rendered.push(t);
    }
    if out_dir.is_some() {
        return Ok(());
    }
    emit(&join_rendered(rendered, &reports, fmt), file, out)
}
