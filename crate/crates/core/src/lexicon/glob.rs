use crate::error::{Error, Result};

/// A compiled glob over whole tokens: `*` matches any run of characters
/// (including none), `?` exactly one; everything else is literal. Matching
/// is anchored at both ends and case-insensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matcher {
    source: String,
    kind: Kind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Literal(String),
    Wild(Vec<Tok>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Char(char),
    Any,
    Star,
}

pub fn compile_glob(pattern: &str) -> Result<Matcher> {
    if pattern.is_empty() {
        return Err(Error::validation("pattern", "empty glob pattern"));
    }
    let lowered = pattern.to_lowercase();
    let kind = if lowered.contains(['*', '?']) {
        let mut toks: Vec<Tok> = Vec::with_capacity(lowered.len());
        for c in lowered.chars() {
            let t = match c {
                '*' => Tok::Star,
                '?' => Tok::Any,
                c => Tok::Char(c),
            };
            // consecutive stars are equivalent to one
            if t == Tok::Star && toks.last() == Some(&Tok::Star) {
                continue;
            }
            toks.push(t);
        }
        Kind::Wild(toks)
    } else {
        Kind::Literal(lowered)
    };
    Ok(Matcher {
        source: pattern.to_string(),
        kind,
    })
}

impl Matcher {
    pub fn pattern(&self) -> &str {
        &self.source
    }

    /// The lowercased pattern when it has no wildcards.
    pub fn literal(&self) -> Option<&str> {
        match &self.kind {
            Kind::Literal(s) => Some(s),
            Kind::Wild(_) => None,
        }
    }

    pub fn is_match(&self, token: &str) -> bool {
        if token.chars().any(char::is_uppercase) {
            return self.matches_lower(&token.to_lowercase());
        }
        self.matches_lower(token)
    }

    fn matches_lower(&self, token: &str) -> bool {
        match &self.kind {
            Kind::Literal(s) => s == token,
            Kind::Wild(toks) => wild_match(toks, &token.chars().collect::<Vec<_>>()),
        }
    }
}

/// Iterative matcher that backtracks only to the most recent star.
fn wild_match(pat: &[Tok], text: &[char]) -> bool {
    let (mut p, mut t) = (0, 0);
    let mut star: Option<(usize, usize)> = None;
    while t < text.len() {
        match pat.get(p) {
            Some(Tok::Char(c)) if *c == text[t] => {
                p += 1;
                t += 1;
            }
            Some(Tok::Any) => {
                p += 1;
                t += 1;
            }
            Some(Tok::Star) => {
                star = Some((p, t));
                p += 1;
            }
            _ => match star {
                Some((sp, st)) => {
                    p = sp + 1;
                    t = st + 1;
                    star = Some((sp, st + 1));
                }
                None => return false,
            },
        }
    }
    pat[p..].iter().all(|t| *t == Tok::Star)
}
