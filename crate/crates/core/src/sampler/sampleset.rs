use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::qubo::QuboCompiled;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub sample: Vec<bool>,
    pub energy: f64,
    pub occurrences: usize,
}

/// Aggregated sampler output, sorted by energy and then by sample.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleSet {
    records: Vec<SampleRecord>,
}

fn record_order(a: &SampleRecord, b: &SampleRecord) -> Ordering {
    a.energy
        .total_cmp(&b.energy)
        .then_with(|| a.sample.cmp(&b.sample))
}

impl SampleSet {
    /// Aggregates raw samples, recomputing every energy from scratch.
    pub fn from_samples<I>(q: &QuboCompiled, samples: I) -> Self
    where
        I: IntoIterator<Item = Vec<bool>>,
    {
        let mut counts: BTreeMap<Vec<bool>, usize> = BTreeMap::new();
        for s in samples {
            *counts.entry(s).or_insert(0) += 1;
        }
        let mut records: Vec<SampleRecord> = counts
            .into_iter()
            .map(|(sample, occurrences)| SampleRecord {
                energy: q.energy_unchecked(&sample),
                sample,
                occurrences,
            })
            .collect();
        records.sort_by(record_order);
        Self { records }
    }

    /// Merges records with identical samples, summing occurrences.
    pub fn aggregate(&self) -> Self {
        let mut merged: BTreeMap<Vec<bool>, SampleRecord> = BTreeMap::new();
        for r in &self.records {
            merged
                .entry(r.sample.clone())
                .and_modify(|m| m.occurrences += r.occurrences)
                .or_insert_with(|| r.clone());
        }
        let mut records: Vec<SampleRecord> = merged.into_values().collect();
        records.sort_by(record_order);
        Self { records }
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    pub fn first(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregation_keeps_mass_and_order() {
        let q = QuboCompiled::from_terms(2, &[-1.0, -1.0], [((0, 1), 2.0)], 1.0).unwrap();
        let raw = vec![
            vec![true, true],
            vec![false, true],
            vec![true, false],
            vec![false, true],
            vec![false, false],
        ];
        let set = SampleSet::from_samples(&q, raw);
        assert_eq!(set.total_occurrences(), 5);
        assert_eq!(set.len(), 4);
        let first = set.first().unwrap();
        assert_eq!(first.energy, 0.0);
        assert_eq!(first.sample, vec![false, true]);
        assert_eq!(first.occurrences, 2);
        assert_eq!(set.records()[1].sample, vec![true, false]);
        assert_eq!(set.aggregate(), set);
    }
}
