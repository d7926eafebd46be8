use std::cmp::Ordering;

use crate::error::{Error, Result};

/// A finite hypothesis class stored as an explicit prediction matrix.
///
/// Row `h` holds the binary predictions of hypothesis `h` on every domain
/// point. Two hypotheses with the same row are the same hypothesis as far as
/// comparisons are concerned, even when their indices differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisClass {
    domain_size: usize,
    predictions: Vec<u8>,
    names: Option<Vec<String>>,
    /// Rank of each hypothesis among the distinct rows sorted lexicographically.
    canonical_rank: Vec<usize>,
    distinct: usize,
}

impl HypothesisClass {
    /// Builds a class from one prediction row per hypothesis.
    pub fn from_rows(rows: Vec<Vec<u8>>) -> Result<Self> {
        let domain_size = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() {
            return Err(Error::Input("hypothesis class must be nonempty".into()));
        }
        if domain_size == 0 {
            return Err(Error::Input("domain must be nonempty".into()));
        }
        let mut predictions = Vec::with_capacity(rows.len() * domain_size);
        for (h, row) in rows.iter().enumerate() {
            if row.len() != domain_size {
                return Err(Error::Input(format!(
                    "row {h} has {} entries, expected {domain_size}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&v| v > 1) {
                return Err(Error::Input(format!("row {h} has non-binary entry {bad}")));
            }
            predictions.extend_from_slice(row);
        }
        let mut class = HypothesisClass {
            domain_size,
            predictions,
            names: None,
            canonical_rank: Vec::new(),
            distinct: 0,
        };
        class.rank_signatures();
        Ok(class)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.len() {
            return Err(Error::Input(format!(
                "{} names given for {} hypotheses",
                names.len(),
                self.len()
            )));
        }
        self.names = Some(names);
        Ok(self)
    }

    fn rank_signatures(&mut self) {
        let n = self.predictions.len() / self.domain_size;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.row(a).cmp(self.row(b)).then(a.cmp(&b)));
        let mut rank = vec![0; n];
        let mut current = 0;
        for (pos, &h) in order.iter().enumerate() {
            if pos > 0 && self.row(order[pos - 1]) != self.row(h) {
                current += 1;
            }
            rank[h] = current;
        }
        self.canonical_rank = rank;
        self.distinct = current + 1;
    }

    /// Threshold functions `h_t(x) = 1[x >= t]` over the points `1..=n`,
    /// one for every `t` in `1..=n+1`. Index `j` is `h_{j+1}`.
    pub fn thresholds(n: usize) -> Result<Self> {
        let rows = (1..=n + 1)
            .map(|t| (1..=n).map(|x| u8::from(x >= t)).collect())
            .collect();
        let names = (1..=n + 1).map(|t| format!("h{t}")).collect();
        Self::from_rows(rows)?.with_names(names)
    }

    /// Indicator functions of the intervals `[a, b]` over the points `1..=n`,
    /// preceded by the all-zero hypothesis.
    pub fn intervals(n: usize) -> Result<Self> {
        let mut rows = vec![vec![0u8; n]];
        let mut names = vec!["empty".to_string()];
        for a in 1..=n {
            for b in a..=n {
                rows.push((1..=n).map(|x| u8::from(a <= x && x <= b)).collect());
                names.push(format!("[{a},{b}]"));
            }
        }
        Self::from_rows(rows)?.with_names(names)
    }

    /// The all-zero target followed by `n` hypotheses, the `i`-th of which is
    /// wrong only on point `i`. Under the uniform distribution its
    /// disagreement coefficient at the target is exactly `n`.
    pub fn worst_case(n: usize) -> Result<Self> {
        let mut rows = vec![vec![0u8; n]];
        let mut names = vec!["target".to_string()];
        for i in 0..n {
            let mut row = vec![0u8; n];
            row[i] = 1;
            rows.push(row);
            names.push(format!("flip{}", i + 1));
        }
        Self::from_rows(rows)?.with_names(names)
    }

    pub fn len(&self) -> usize {
        self.canonical_rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    #[inline]
    pub fn predict(&self, h: usize, x: usize) -> u8 {
        self.predictions[h * self.domain_size + x]
    }

    /// The prediction signature of `h`: its full row.
    pub fn row(&self, h: usize) -> &[u8] {
        &self.predictions[h * self.domain_size..(h + 1) * self.domain_size]
    }

    pub fn name(&self, h: usize) -> String {
        match &self.names {
            Some(names) => names[h].clone(),
            None => format!("h{h}"),
        }
    }

    pub fn same_signature(&self, a: usize, b: usize) -> bool {
        self.canonical_rank[a] == self.canonical_rank[b]
    }

    /// Position of `h`'s signature among the distinct signatures in
    /// lexicographic order.
    pub fn canonical_rank(&self, h: usize) -> usize {
        self.canonical_rank[h]
    }

    pub fn distinct_signatures(&self) -> usize {
        self.distinct
    }

    /// Index of the first hypothesis whose row equals `row`.
    pub fn find_row(&self, row: &[u8]) -> Option<usize> {
        (0..self.len()).find(|&h| self.row(h) == row)
    }

    pub fn check_index(&self, h: usize) -> Result<()> {
        if h < self.len() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "hypothesis index {h} out of range for class of size {}",
                self.len()
            )))
        }
    }

    pub fn compare_signatures(&self, a: usize, b: usize) -> Ordering {
        self.canonical_rank[a].cmp(&self.canonical_rank[b])
    }
}

/// A prediction signature rendered as a string of `0`/`1` characters.
pub fn signature_string(row: &[u8]) -> String {
    row.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}
