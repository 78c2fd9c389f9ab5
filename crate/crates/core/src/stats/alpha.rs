use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nominal ratings with missing cells: items × raters → category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingsMatrix {
    items: Vec<String>,
    raters: Vec<String>,
    values: BTreeMap<(usize, usize), String>,
}

impl RatingsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from one row per rater; `None` marks a missing rating.
    pub fn from_rows<S: AsRef<str>>(rows: &[Vec<Option<S>>]) -> Self {
        let mut m = RatingsMatrix::new();
        for (r, row) in rows.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                if let Some(v) = v {
                    m.set(&format!("u{i:04}"), &format!("r{r}"), v.as_ref());
                }
            }
        }
        m
    }

    /// Records or overwrites one rating.
    pub fn set(&mut self, item: &str, rater: &str, value: &str) {
        let i = index_of(&mut self.items, item);
        let r = index_of(&mut self.raters, rater);
        self.values.insert((i, r), value.to_string());
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn raters(&self) -> &[String] {
        &self.raters
    }

    pub fn get(&self, item: &str, rater: &str) -> Option<&str> {
        let i = self.items.iter().position(|x| x == item)?;
        let r = self.raters.iter().position(|x| x == rater)?;
        self.values.get(&(i, r)).map(String::as_str)
    }

    /// Values per item, in rater order.
    pub fn units(&self) -> Vec<Vec<&str>> {
        let mut units = vec![Vec::new(); self.items.len()];
        for ((i, _), v) in &self.values {
            units[*i].push(v.as_str());
        }
        units
    }

    /// Restricts to a single item, for per-item agreement.
    pub fn only_item(&self, item: &str) -> RatingsMatrix {
        let mut m = RatingsMatrix::new();
        if let Some(i) = self.items.iter().position(|x| x == item) {
            for ((ii, r), v) in &self.values {
                if *ii == i {
                    m.set(item, &self.raters[*r], v);
                }
            }
        }
        m
    }
}

fn index_of(list: &mut Vec<String>, key: &str) -> usize {
    match list.iter().position(|x| x == key) {
        Some(i) => i,
        None => {
            list.push(key.to_string());
            list.len() - 1
        }
    }
}

/// Krippendorff's alpha with the nominal difference function, computed from
/// the coincidence matrix. Items with fewer than two ratings are ignored.
pub fn kripp_alpha(r: &RatingsMatrix) -> Result<f64> {
    if r.raters.len() < 2 {
        return Err(Error::validation("ratings", "need at least two raters"));
    }
    let units: Vec<Vec<&str>> = r.units().into_iter().filter(|u| u.len() >= 2).collect();
    if units.is_empty() {
        return Err(Error::validation(
            "ratings",
            "no item has two or more ratings",
        ));
    }
    let cats: Vec<&str> = units
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = cats.len();
    let idx = |v: &str| cats.binary_search(&v).expect("category indexed");

    let mut o = vec![0.0f64; k * k];
    for u in &units {
        let m = u.len() as f64;
        let mut counts = vec![0.0f64; k];
        for v in u {
            counts[idx(v)] += 1.0;
        }
        for c in 0..k {
            for d in 0..k {
                let pairs = if c == d {
                    counts[c] * (counts[c] - 1.0)
                } else {
                    counts[c] * counts[d]
                };
                o[c * k + d] += pairs / (m - 1.0);
            }
        }
    }
    let n_c: Vec<f64> = (0..k).map(|c| (0..k).map(|d| o[c * k + d]).sum()).collect();
    let n: f64 = n_c.iter().sum();

    let mut disagree = 0.0;
    let mut expected = 0.0;
    for c in 0..k {
        for d in 0..k {
            if c != d {
                disagree += o[c * k + d];
                expected += n_c[c] * n_c[d];
            }
        }
    }
    if expected == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - (n - 1.0) * disagree / expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(data: &[&[Option<&str>]]) -> RatingsMatrix {
        RatingsMatrix::from_rows(&data.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn unanimous() {
        let x = Some("x");
        let y = Some("y");
        let m = rows(&[&[x, y, x], &[x, y, x], &[x, y, x]]);
        assert_eq!(kripp_alpha(&m).unwrap(), 1.0);
    }

    #[test]
    fn two_rater_disagreement() {
        let m = rows(&[&[Some("x"), Some("x")], &[Some("y"), Some("y")]]);
        assert!((kripp_alpha(&m).unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_value_everywhere() {
        let m = rows(&[&[Some("x")], &[Some("x")]]);
        assert_eq!(kripp_alpha(&m).unwrap(), 1.0);
    }

    #[test]
    fn singly_rated_items_error() {
        let m = rows(&[&[Some("x"), None], &[None, Some("y")]]);
        assert!(kripp_alpha(&m).is_err());
        let mut one = RatingsMatrix::new();
        one.set("a", "r", "x");
        assert!(kripp_alpha(&one).is_err());
    }

    #[test]
    fn krippendorff_reference_example() {
        // four observers, twelve units, nominal data
        let n = None;
        let s = |v: &'static str| Some(v);
        let m = rows(&[
            &[s("1"), s("2"), s("3"), s("3"), s("2"), s("1"), s("4"), s("1"), s("2"), n, n, n],
            &[s("1"), s("2"), s("3"), s("3"), s("2"), s("2"), s("4"), s("1"), s("2"), s("5"), n, s("3")],
            &[n, s("3"), s("3"), s("3"), s("2"), s("3"), s("4"), s("2"), s("2"), s("5"), s("1"), n],
            &[s("1"), s("2"), s("3"), s("3"), s("2"), s("4"), s("4"), s("1"), s("2"), s("5"), s("1"), n],
        ]);
        assert!((kripp_alpha(&m).unwrap() - 0.743).abs() < 1e-3);
    }

    #[test]
    fn overwrite_and_lookup() {
        let mut m = RatingsMatrix::new();
        m.set("love", "r1", "true");
        m.set("love", "r1", "false");
        assert_eq!(m.get("love", "r1"), Some("false"));
        assert_eq!(m.only_item("love").items(), ["love"]);
        assert!(m.only_item("absent").items().is_empty());
    }
}
