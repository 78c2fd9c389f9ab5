//! English Snowball (Porter2) stemmer.
//!
//! Operates on lowercase words. Characters outside `a-z` are treated as
//! consonants; words shorter than three characters are returned unchanged.

/// Returns the Porter2 stem of `word`.
pub fn stem(word: &str) -> String {
    if word.chars().count() < 3 {
        return word.to_string();
    }
    if let Some(special) = exception1(word) {
        return special.to_string();
    }

    let mut w = Word::new(word);
    w.prelude();
    w.mark_regions();
    w.step_1a();
    if exception2(&w.chars) {
        return w.finish();
    }
    w.step_1b();
    w.step_1c();
    w.step_2();
    w.step_3();
    w.step_4();
    w.step_5();
    w.finish()
}

fn exception1(word: &str) -> Option<&'static str> {
    Some(match word {
        "skis" => "ski",
        "skies" => "sky",
        "dying" => "die",
        "lying" => "lie",
        "tying" => "tie",
        "idly" => "idl",
        "gently" => "gentl",
        "ugly" => "ugli",
        "early" => "earli",
        "only" => "onli",
        "singly" => "singl",
        "sky" => "sky",
        "news" => "news",
        "howe" => "howe",
        "atlas" => "atlas",
        "cosmos" => "cosmos",
        "bias" => "bias",
        "andes" => "andes",
        _ => return None,
    })
}

fn exception2(chars: &[char]) -> bool {
    const WORDS: [&str; 8] = [
        "inning", "outing", "canning", "herring", "earring", "proceed", "exceed", "succeed",
    ];
    WORDS
        .iter()
        .any(|w| w.len() == chars.len() && w.chars().eq(chars.iter().copied()))
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

fn is_valid_li(c: char) -> bool {
    matches!(c, 'c' | 'd' | 'e' | 'g' | 'h' | 'k' | 'm' | 'n' | 'r' | 't')
}

fn is_double(a: char, b: char) -> bool {
    a == b && matches!(a, 'b' | 'd' | 'f' | 'g' | 'm' | 'n' | 'p' | 'r' | 't')
}

struct Word {
    /// `Y` marks a consonant y.
    chars: Vec<char>,
    r1: usize,
    r2: usize,
}

impl Word {
    fn new(word: &str) -> Self {
        Word {
            chars: word.chars().collect(),
            r1: 0,
            r2: 0,
        }
    }

    fn finish(self) -> String {
        self.chars
            .into_iter()
            .map(|c| if c == 'Y' { 'y' } else { c })
            .collect()
    }

    fn ends_with(&self, suffix: &str) -> bool {
        let n = suffix.chars().count();
        n <= self.chars.len() && suffix.chars().eq(self.chars[self.chars.len() - n..].iter().copied())
    }

    /// Longest suffix from `candidates` that the word ends with.
    fn longest_suffix<'a>(&self, candidates: &[&'a str]) -> Option<&'a str> {
        candidates
            .iter()
            .filter(|s| self.ends_with(s))
            .max_by_key(|s| s.len())
            .copied()
    }

    fn replace_suffix(&mut self, suffix_len: usize, with: &str) {
        let keep = self.chars.len() - suffix_len;
        self.chars.truncate(keep);
        self.chars.extend(with.chars());
    }

    fn prelude(&mut self) {
        if self.chars.first() == Some(&'\'') {
            self.chars.remove(0);
        }
        if self.chars.first() == Some(&'y') {
            self.chars[0] = 'Y';
        }
        for i in 1..self.chars.len() {
            if self.chars[i] == 'y' && is_vowel(self.chars[i - 1]) {
                self.chars[i] = 'Y';
            }
        }
    }

    fn mark_regions(&mut self) {
        let n = self.chars.len();
        let prefix = ["gener", "commun", "arsen"]
            .iter()
            .find(|p| {
                p.len() <= n && p.chars().eq(self.chars[..p.len()].iter().copied())
            })
            .map(|p| p.len());
        self.r1 = match prefix {
            Some(len) => len,
            None => self.region_after(0),
        };
        self.r2 = self.region_after(self.r1);
    }

    /// Position after the first non-vowel that follows a vowel, at or after `start`.
    fn region_after(&self, start: usize) -> usize {
        let n = self.chars.len();
        let mut i = start;
        while i < n && !is_vowel(self.chars[i]) {
            i += 1;
        }
        while i < n && is_vowel(self.chars[i]) {
            i += 1;
        }
        if i < n {
            i + 1
        } else {
            n
        }
    }

    /// Whether `chars[..end]` ends with a short syllable.
    fn ends_short_syllable(&self, end: usize) -> bool {
        let c = &self.chars[..end];
        match end {
            0 | 1 => false,
            2 => is_vowel(c[0]) && !is_vowel(c[1]),
            _ => {
                let (a, b, d) = (c[end - 3], c[end - 2], c[end - 1]);
                !is_vowel(a) && is_vowel(b) && !is_vowel(d) && !matches!(d, 'w' | 'x' | 'Y')
            }
        }
    }

    fn step_1a(&mut self) {
        if let Some(s) = self.longest_suffix(&["'s'", "'s", "'"]) {
            let n = s.chars().count();
            self.chars.truncate(self.chars.len() - n);
        }
        let Some(s) = self.longest_suffix(&["sses", "ied", "ies", "s", "us", "ss"]) else {
            return;
        };
        let n = self.chars.len();
        match s {
            "sses" => self.replace_suffix(4, "ss"),
            "ied" | "ies" => {
                if n - 3 > 1 {
                    self.replace_suffix(3, "i");
                } else {
                    self.replace_suffix(3, "ie");
                }
            }
            "s" => {
                // a vowel somewhere before the letter preceding the s
                if n >= 2 && self.chars[..n - 2].iter().any(|&c| is_vowel(c)) {
                    self.chars.pop();
                }
            }
            _ => {}
        }
    }

    fn step_1b(&mut self) {
        let Some(s) = self.longest_suffix(&["eed", "eedly", "ed", "edly", "ing", "ingly"]) else {
            return;
        };
        let n = self.chars.len();
        let slen = s.len();
        match s {
            "eed" | "eedly" => {
                if n - slen >= self.r1 {
                    self.replace_suffix(slen, "ee");
                }
            }
            _ => {
                let stem_end = n - slen;
                if !self.chars[..stem_end].iter().any(|&c| is_vowel(c)) {
                    return;
                }
                self.chars.truncate(stem_end);
                if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
                    self.chars.push('e');
                } else if stem_end >= 2
                    && is_double(self.chars[stem_end - 2], self.chars[stem_end - 1])
                {
                    self.chars.pop();
                } else if self.r1 >= stem_end && self.ends_short_syllable(stem_end) {
                    self.chars.push('e');
                }
            }
        }
    }

    fn step_1c(&mut self) {
        let n = self.chars.len();
        if n > 2 && matches!(self.chars[n - 1], 'y' | 'Y') && !is_vowel(self.chars[n - 2]) {
            self.chars[n - 1] = 'i';
        }
    }

    fn step_2(&mut self) {
        const SUFFIXES: [(&str, &str); 24] = [
            ("tional", "tion"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("abli", "able"),
            ("entli", "ent"),
            ("izer", "ize"),
            ("ization", "ize"),
            ("ational", "ate"),
            ("ation", "ate"),
            ("ator", "ate"),
            ("alism", "al"),
            ("aliti", "al"),
            ("alli", "al"),
            ("fulness", "ful"),
            ("ousli", "ous"),
            ("ousness", "ous"),
            ("iveness", "ive"),
            ("iviti", "ive"),
            ("biliti", "ble"),
            ("bli", "ble"),
            ("ogi", "og"),
            ("fulli", "ful"),
            ("lessli", "less"),
            ("li", ""),
        ];
        let keys: Vec<&str> = SUFFIXES.iter().map(|(s, _)| *s).collect();
        let Some(s) = self.longest_suffix(&keys) else {
            return;
        };
        let n = self.chars.len();
        let start = n - s.len();
        if start < self.r1 {
            return;
        }
        let replacement = SUFFIXES.iter().find(|(k, _)| *k == s).unwrap().1;
        match s {
            "ogi" => {
                if start >= 1 && self.chars[start - 1] == 'l' {
                    self.replace_suffix(3, replacement);
                }
            }
            "li" => {
                if start >= 1 && is_valid_li(self.chars[start - 1]) {
                    self.replace_suffix(2, "");
                }
            }
            _ => self.replace_suffix(s.len(), replacement),
        }
    }

    fn step_3(&mut self) {
        const SUFFIXES: [(&str, &str); 9] = [
            ("tional", "tion"),
            ("ational", "ate"),
            ("alize", "al"),
            ("icate", "ic"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
            ("ative", ""),
        ];
        let keys: Vec<&str> = SUFFIXES.iter().map(|(s, _)| *s).collect();
        let Some(s) = self.longest_suffix(&keys) else {
            return;
        };
        let start = self.chars.len() - s.len();
        if start < self.r1 {
            return;
        }
        if s == "ative" && start < self.r2 {
            return;
        }
        let replacement = SUFFIXES.iter().find(|(k, _)| *k == s).unwrap().1;
        self.replace_suffix(s.len(), replacement);
    }

    fn step_4(&mut self) {
        const SUFFIXES: [&str; 18] = [
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent", "ism",
            "ate", "iti", "ous", "ive", "ize", "ion",
        ];
        let Some(s) = self.longest_suffix(&SUFFIXES) else {
            return;
        };
        let start = self.chars.len() - s.len();
        if start < self.r2 {
            return;
        }
        if s == "ion" {
            if start >= 1 && matches!(self.chars[start - 1], 's' | 't') {
                self.chars.truncate(start);
            }
        } else {
            self.chars.truncate(start);
        }
    }

    fn step_5(&mut self) {
        let n = self.chars.len();
        match self.chars.last() {
            Some('e') => {
                let start = n - 1;
                if start >= self.r2 || (start >= self.r1 && !self.ends_short_syllable(start)) {
                    self.chars.pop();
                }
            }
            Some('l') => {
                let start = n - 1;
                if start >= self.r2 && start >= 1 && self.chars[start - 1] == 'l' {
                    self.chars.pop();
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_examples() {
        assert_eq!(stem("running"), "run");
        assert_eq!(stem("run"), "run");
        assert_eq!(stem("numbers"), "number");
        assert_eq!(stem("subtract"), "subtract");
        assert_eq!(stem("ran"), "ran");
    }

    #[test]
    fn short_words_untouched() {
        assert_eq!(stem("a"), "a");
        assert_eq!(stem("is"), "is");
        assert_eq!(stem(""), "");
    }

    #[test]
    fn classic_cases() {
        for (w, s) in [
            ("consign", "consign"),
            ("consigned", "consign"),
            ("consistency", "consist"),
            ("generously", "generous"),
            ("hoping", "hope"),
            ("cries", "cri"),
            ("ties", "tie"),
            ("gas", "gas"),
            ("gaps", "gap"),
            ("kiwis", "kiwi"),
            ("skies", "sky"),
            ("succeeding", "succeed"),
            ("feed", "feed"),
            ("agreed", "agre"),
            ("emotional", "emot"),
            ("beautiful", "beauti"),
            ("powerful", "power"),
        ] {
            assert_eq!(stem(w), s, "stem({w})");
        }
    }
}
