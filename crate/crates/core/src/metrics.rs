//! External clustering metrics.

use std::collections::{BTreeMap, HashSet};
use std::hash::Hash;

use crate::error::{Error, Result};

/// Co-occurrence counts of (true, predicted) labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ContingencyTable {
    /// `counts[i][j]`: items with the i-th true label and j-th predicted label,
    /// labels ordered by first appearance.
    pub counts: Vec<Vec<u64>>,
    pub n: u64,
}

impl ContingencyTable {
    pub fn from_labels<A, B>(truth: &[A], pred: &[B]) -> Result<Self>
    where
        A: Eq + Hash + Clone + Ord,
        B: Eq + Hash + Clone + Ord,
    {
        if truth.len() != pred.len() {
            return Err(Error::LengthMismatch {
                left: truth.len(),
                right: pred.len(),
            });
        }
        let t_index = dense_index(truth);
        let p_index = dense_index(pred);
        let mut counts = vec![vec![0u64; p_index.len()]; t_index.len()];
        for (t, p) in truth.iter().zip(pred) {
            counts[t_index[t]][p_index[p]] += 1;
        }
        Ok(ContingencyTable {
            counts,
            n: truth.len() as u64,
        })
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        let width = self.counts.first().map_or(0, Vec::len);
        (0..width)
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn mutual_information(&self) -> f64 {
        let n = self.n as f64;
        let rows = self.row_sums();
        let cols = self.col_sums();
        let mut mi = 0.0;
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &nij) in row.iter().enumerate() {
                if nij > 0 {
                    let nij = nij as f64;
                    mi += nij / n * (n * nij / (rows[i] as f64 * cols[j] as f64)).ln();
                }
            }
        }
        mi.max(0.0)
    }
}

fn dense_index<T: Eq + Hash + Clone + Ord>(labels: &[T]) -> BTreeMap<T, usize> {
    let mut index = BTreeMap::new();
    for l in labels {
        let next = index.len();
        index.entry(l.clone()).or_insert(next);
    }
    index
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// NMI with arithmetic-mean normalization and natural logarithms.
///
/// Two single-cluster labelings score 1; a single-cluster labeling against
/// a non-trivial one scores 0.
pub fn normalized_mutual_information<A, B>(truth: &[A], pred: &[B]) -> Result<f64>
where
    A: Eq + Hash + Clone + Ord,
    B: Eq + Hash + Clone + Ord,
{
    if truth.is_empty() {
        return Err(Error::InvalidParameter(
            "NMI needs at least one label".into(),
        ));
    }
    let table = ContingencyTable::from_labels(truth, pred)?;
    let n = table.n as f64;
    let h_true = entropy(&table.row_sums(), n);
    let h_pred = entropy(&table.col_sums(), n);
    let t_trivial = table.counts.len() == 1;
    let p_trivial = table.counts[0].len() == 1;
    match (t_trivial, p_trivial) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let nmi = table.mutual_information() / (0.5 * (h_true + h_pred));
    Ok(nmi.clamp(0.0, 1.0))
}

/// For each prefix length `n`, the number of distinct predicted labels in the
/// prefix divided by the number of distinct true labels in the full sequence.
pub fn cluster_count_curve<A, B>(pred: &[A], truth: &[B]) -> Result<Vec<(usize, f64)>>
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    let k_true = truth.iter().collect::<HashSet<_>>().len().max(1) as f64;
    let mut seen = HashSet::new();
    Ok(pred
        .iter()
        .enumerate()
        .map(|(i, p)| {
            seen.insert(p);
            (i + 1, seen.len() as f64 / k_true)
        })
        .collect())
}

/// Number of distinct labels.
pub fn num_distinct<T: Eq + Hash>(labels: &[T]) -> usize {
    labels.iter().collect::<HashSet<_>>().len()
}
