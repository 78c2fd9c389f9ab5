//! Paper-style tables in markdown, CSV and JSON.
//!
//! Ratios and fractions print with three decimals and no leading zero
//! (`.541`, `1.000`), chi-square statistics with two, and p-values with
//! three or as `<.001`. Undefined ratios print as `NA`. JSON output carries
//! the unrounded values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::audit::{AuditReport, TopTerm};
use crate::error::{Error, Result};
use crate::stats::Chi2Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Markdown => "md",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::validation(
                "format",
                format!("unknown report format `{other}` (expected markdown, csv or json)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Audit,
    TopTerms,
    Chi2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub kind: TableKind,
    /// Identifies the report the rows came from.
    pub source: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub title: String,
    pub sections: Vec<Section>,
    pub format: ReportFormat,
}

impl ReportDocument {
    pub fn render(&self) -> Result<String> {
        match self.format {
            ReportFormat::Json => Ok(json(self)),
            ReportFormat::Markdown => {
                let mut out = format!("# {}\n", self.title);
                for s in &self.sections {
                    out.push('\n');
                    out.push_str(&markdown_table(&s.header, &s.rows));
                }
                Ok(out)
            }
            ReportFormat::Csv => {
                let mut out = String::new();
                for (i, s) in self.sections.iter().enumerate() {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(&csv_table(&s.header, &s.rows)?);
                }
                Ok(out)
            }
        }
    }
}

/// `.541`, `1.000`, `NA`.
pub fn fmt_ratio(r: Option<f64>) -> String {
    match r {
        None => "NA".to_string(),
        Some(r) => strip_leading_zero(format!("{r:.3}")),
    }
}

/// `24.4%`
pub fn fmt_percent(r: Option<f64>) -> String {
    match r {
        None => "NA".to_string(),
        Some(r) => format!("{:.1}%", r * 100.0),
    }
}

pub fn fmt_statistic(x: f64) -> String {
    format!("{x:.2}")
}

/// `<.001` below one in a thousand, otherwise three decimals without the
/// leading zero.
pub fn fmt_p(p: f64) -> String {
    if p < 0.001 {
        "<.001".to_string()
    } else {
        strip_leading_zero(format!("{p:.3}"))
    }
}

fn strip_leading_zero(s: String) -> String {
    match s.strip_prefix("0.") {
        Some(rest) => format!(".{rest}"),
        None => match s.strip_prefix("-0.") {
            Some(rest) => format!("-.{rest}"),
            None => s,
        },
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn markdown_table(header: &[String], rows: &[Vec<String>]) -> String {
    let esc = |s: &str| s.replace('|', "\\|");
    let mut out = String::new();
    out.push_str(&format!(
        "| {} |\n",
        header.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | ")
    ));
    out.push_str(&format!(
        "|{}\n",
        header.iter().map(|_| "---|").collect::<String>()
    ));
    for r in rows {
        out.push_str(&format!(
            "| {} |\n",
            r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | ")
        ));
    }
    out
}

fn csv_table(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Table rows for an audit report, one per partition plus the overall row.
pub fn audit_section(report: &AuditReport) -> Section {
    let mut header: Vec<String> = vec!["Dict. Share".into(), "Total Instances".into(), "Partition".into()];
    header.extend(report.genders.iter().map(|g| format!("{} Freq.", g.label())));
    header.extend(report.genders.iter().map(|g| format!("{} Ratio", g.label())));
    let share = &report.dict_share;
    let share_cell = format!(
        "{}/{} ({})",
        share.matched_terms,
        share.total_terms,
        fmt_percent(share.fraction)
    );
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![share_cell.clone(), report.total_instances.to_string(), r.label().to_string()];
            row.extend(report.genders.iter().map(|g| r.frequency(*g).to_string()));
            row.extend(
                report
                    .genders
                    .iter()
                    .map(|g| fmt_ratio(r.ratios.get(g).copied().flatten())),
            );
            row
        })
        .collect();
    Section {
        kind: TableKind::Audit,
        source: format!(
            "{} / {} / {}",
            report.corpus_name, report.dictionary_name, report.profile_name
        ),
        header,
        rows,
    }
}

/// JSON output is the report itself, so it parses back into an equal
/// [`AuditReport`]; markdown and CSV are projections of it.
pub fn render_audit(report: &AuditReport, fmt: ReportFormat) -> Result<String> {
    if fmt == ReportFormat::Json {
        return Ok(json(report));
    }
    ReportDocument {
        title: format!("{} ({})", report.dictionary_name, report.corpus_name),
        sections: vec![audit_section(report)],
        format: fmt,
    }
    .render()
}

pub fn render_top_terms(source: &str, terms: &[TopTerm], fmt: ReportFormat) -> Result<String> {
    if fmt == ReportFormat::Json {
        return Ok(json(&terms));
    }
    let section = Section {
        kind: TableKind::TopTerms,
        source: source.to_string(),
        header: vec!["Rank".into(), "Term".into(), "Gender".into(), "Frequency".into()],
        rows: terms
            .iter()
            .enumerate()
            .map(|(i, t)| {
                vec![
                    (i + 1).to_string(),
                    t.term.clone(),
                    t.gender.label().to_string(),
                    t.frequency.to_string(),
                ]
            })
            .collect(),
    };
    ReportDocument {
        title: format!("Top terms ({source})"),
        sections: vec![section],
        format: fmt,
    }
    .render()
}

#[derive(Serialize)]
struct LabelledChi2<'a> {
    label: &'a str,
    #[serde(flatten)]
    result: &'a Chi2Result,
}

/// One row per test: label, statistic, df, p.
pub fn render_chi2(results: &[(String, Chi2Result)], fmt: ReportFormat) -> Result<String> {
    if fmt == ReportFormat::Json {
        let rows: Vec<LabelledChi2> = results
            .iter()
            .map(|(label, result)| LabelledChi2 { label, result })
            .collect();
        return Ok(json(&rows));
    }
    let section = Section {
        kind: TableKind::Chi2,
        source: "chi2".into(),
        header: vec!["Test".into(), "χ2".into(), "df".into(), "p".into()],
        rows: results
            .iter()
            .map(|(label, r)| {
                vec![label.clone(), fmt_statistic(r.statistic), r.df.to_string(), fmt_p(r.p)]
            })
            .collect(),
    };
    ReportDocument {
        title: "Chi-square tests".into(),
        sections: vec![section],
        format: fmt,
    }
    .render()
}

/// `<corpus>_<dictionary>_<profile>.<ext>`, with characters outside
/// `[A-Za-z0-9.+-]` in each part replaced by `-`.
pub fn report_file_name(corpus: &str, dictionary: &str, profile: &str, fmt: ReportFormat) -> String {
    let clean = |s: &str| {
        let mut out = String::new();
        for c in s.chars() {
            let c = if c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-') {
                c
            } else {
                '-'
            };
            if !(c == '-' && out.ends_with('-')) {
                out.push(c);
            }
        }
        out.trim_matches('-').to_string()
    };
    format!(
        "{}_{}_{}.{}",
        clean(corpus),
        clean(dictionary),
        clean(profile),
        fmt.extension()
    )
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::audit::{frequency_table, DictShare, FrequencyRow, Match, MatchSet};
    use crate::corpus::Partition;
    use crate::lexicon::{Category, DictEntry, DictMetadata, Dictionary, GenderClass};
    use GenderClass::{Feminine as F, Masculine as M};

    fn report(m: u64, f: u64) -> AuditReport {
        let row = |p| {
            let frequencies: BTreeMap<GenderClass, u64> = [(M, m), (F, f)].into();
            let total = m + f;
            FrequencyRow {
                partition: p,
                ratios: frequencies
                    .iter()
                    .map(|(g, x)| (*g, (total > 0).then(|| *x as f64 / total as f64)))
                    .collect(),
                frequencies,
                total,
            }
        };
        AuditReport {
            corpus_name: "massive".into(),
            dictionary_name: "ru (loose)".into(),
            profile_name: "gendered_language".into(),
            dict_share: DictShare {
                matched_terms: 51,
                total_terms: 209,
                fraction: Some(51.0 / 209.0),
            },
            genders: vec![M, F],
            rows: vec![row(Some(Partition::Train)), row(None)],
            total_instances: m + f,
        }
    }

    #[test]
    fn ratio_cells() {
        let md = render_audit(&report(93, 79), ReportFormat::Markdown).unwrap();
        assert!(md.contains("| .541 | .459 |"), "{md}");
        assert!(md.contains("51/209 (24.4%)"));
        assert!(md.contains("Masc. Freq. | Fem. Freq. | Masc. Ratio | Fem. Ratio"));
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_ratio(Some(1.0)), "1.000");
        assert_eq!(fmt_ratio(Some(0.0)), ".000");
        assert_eq!(fmt_ratio(None), "NA");
        assert_eq!(fmt_p(2.3e-7), "<.001");
        assert_eq!(fmt_p(0.0561), ".056");
        assert_eq!(fmt_p(1.0), "1.000");
        assert_eq!(fmt_percent(Some(74.0 / 169.0)), "43.8%");
        assert_eq!(fmt_statistic(26.7273), "26.73");
    }

    #[test]
    fn json_round_trip() {
        let r = report(93, 79);
        let text = render_audit(&r, ReportFormat::Json).unwrap();
        let back: AuditReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_rows() {
        let csv = render_audit(&report(1, 1), ReportFormat::Csv).unwrap();
        let first = csv.lines().next().unwrap();
        assert!(first.starts_with("Dict. Share,Total Instances,Partition"));
        assert_eq!(csv.lines().last().unwrap(), "51/209 (24.4%),2,overall,1,1,.500,.500");
        let quoted = render_top_terms(
            "x",
            &[TopTerm { term: "a,b".into(), gender: F, frequency: 2 }],
            ReportFormat::Csv,
        )
        .unwrap();
        assert!(quoted.contains("1,\"a,b\",Fem.,2"), "{quoted}");
    }

    #[test]
    fn empty_report_has_no_rows() {
        let d = Dictionary::new(
            "d",
            vec![DictEntry::new("king", M, Category::MarkedWord, "s")],
            DictMetadata::default(),
        );
        let m = MatchSet {
            corpus_name: "c".into(),
            dictionary_name: "d".into(),
            profile_name: "p".into(),
            exclusions: vec![],
            matches: Vec::<Match>::new(),
            dictionary: d,
            partitions: BTreeSet::new(),
        };
        let md = render_audit(&frequency_table(&m), ReportFormat::Markdown).unwrap();
        assert_eq!(md.lines().filter(|l| l.starts_with('|')).count(), 2);
    }

    #[test]
    fn four_gender_columns() {
        let mut r = report(71, 50);
        r.genders = vec![M, F, GenderClass::Neutral, GenderClass::Neo];
        let md = render_audit(&r, ReportFormat::Markdown).unwrap();
        let header = md.lines().find(|l| l.starts_with("| Dict")).unwrap();
        assert_eq!(header.matches("Freq.").count(), 4);
        assert_eq!(header.matches("Ratio").count(), 4);
    }

    #[test]
    fn chi2_rows() {
        let rows = vec![
            ("massive".to_string(), Chi2Result { statistic: 26.7273, df: 1, p: 2.3e-7, corrected: false }),
            ("pronouns".to_string(), Chi2Result { statistic: 3.6446, df: 1, p: 0.0561, corrected: false }),
        ];
        let md = render_chi2(&rows, ReportFormat::Markdown).unwrap();
        assert!(md.contains("| massive | 26.73 | 1 | <.001 |"));
        assert!(md.contains("| pronouns | 3.64 | 1 | .056 |"));
        let empty = render_chi2(&[], ReportFormat::Csv).unwrap();
        assert_eq!(empty, "Test,χ2,df,p\n");
    }

    #[test]
    fn file_names() {
        assert_eq!(
            report_file_name("massive", "ru (loose) (without AVA)", "gendered_language", ReportFormat::Csv),
            "massive_ru-loose-without-AVA_gendered-language.csv"
        );
    }
}
