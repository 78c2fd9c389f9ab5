use std::fs;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use genderlex_core::{Error, Result};

pub const DEFAULT_BIND: &str = "127.0.0.1";
pub const DEFAULT_PORT: u16 = 8642;

/// Settings read from a TOML file. Command-line flags take precedence;
/// relative paths resolve against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub corpus: Vec<CorpusConfig>,
    #[serde(default)]
    pub dictionary: Vec<DictionaryConfig>,
    pub profile: Option<String>,
    pub ava: Option<AvaConfig>,
    pub exclusions: Option<Vec<String>>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub service: ServiceConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub path: PathBuf,
    pub name: Option<String>,
    /// `massive` or `redial`.
    pub format: Option<String>,
    pub partition: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    pub path: PathBuf,
    pub format: Option<String>,
    pub threshold: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AvaConfig {
    /// A file, or `shipped` for the bundled list.
    pub path: Option<String>,
    pub mode: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Option<String>,
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: Option<String>,
    pub port: Option<u16>,
    pub journal_dir: Option<PathBuf>,
    #[serde(default)]
    pub unsafe_bind: bool,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.corpus.iter_mut().for_each(|c| join(&mut c.path));
        self.dictionary.iter_mut().for_each(|d| join(&mut d.path));
        if let Some(ava) = &mut self.ava {
            if let Some(p) = &mut ava.path {
                if p != "shipped" && Path::new(p).is_relative() {
                    *p = base.join(&*p).to_string_lossy().into_owned();
                }
            }
        }
        if let Some(d) = &mut self.output.dir {
            join(d);
        }
        if let Some(d) = &mut self.service.journal_dir {
            join(d);
        }
    }
}

/// Refuses non-loopback addresses unless `unsafe_bind` is set; the service
/// has no authentication.
pub fn check_bind(bind: &str, unsafe_bind: bool) -> Result<IpAddr> {
    let ip: IpAddr = bind.parse().map_err(|_| Error::Validation {
        field: "bind".into(),
        message: format!("`{bind}` is not an IP address"),
    })?;
    if !ip.is_loopback() && !unsafe_bind {
        return Err(Error::Validation {
            field: "bind".into(),
            message: format!(
                "refusing to listen on non-loopback address {ip} without --unsafe-bind"
            ),
        });
    }
    Ok(ip)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full() {
        let cfg = Config::parse(
            r#"
profile = "gendered_language"
exclusions = ["alexa"]

[[corpus]]
name = "massive"
path = "data/massive.jsonl"

[[dictionary]]
path = "dicts/ru.csv"
threshold = "loose"

[ava]
path = "shipped"
mode = "flag"

[service]
port = 9000
"#,
        )
        .unwrap();
        assert_eq!(cfg.corpus.len(), 1);
        assert_eq!(cfg.dictionary[0].threshold.as_deref(), Some("loose"));
        assert_eq!(cfg.service.port, Some(9000));
        assert!(!cfg.service.unsafe_bind);
    }

    #[test]
    fn unknown_key_is_parse_error() {
        let err = Config::parse("profile = \"x\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn relative_paths_rebased() {
        let mut cfg = Config::parse("[[corpus]]\npath = \"a.jsonl\"\n[ava]\npath = \"shipped\"\n").unwrap();
        cfg.rebase(Path::new("/etc/gl"));
        assert_eq!(cfg.corpus[0].path, Path::new("/etc/gl/a.jsonl"));
        assert_eq!(cfg.ava.unwrap().path.as_deref(), Some("shipped"));
    }

    #[test]
    fn bind_policy() {
        assert!(check_bind("127.0.0.1", false).is_ok());
        assert!(check_bind("::1", false).is_ok());
        assert!(check_bind("0.0.0.0", false).is_err());
        assert!(check_bind("0.0.0.0", true).is_ok());
        assert!(check_bind("localhost", false).is_err());
    }
}
