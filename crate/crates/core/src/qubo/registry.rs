use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

use super::poly::BinaryPolynomial;

static NEXT_REGISTRY_ID: AtomicU64 = AtomicU64::new(1);

/// What a registered array is used for. Slack arrays are auxiliary and are
/// dropped when decoding solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Decision,
    Slack,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrayEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub offset: usize,
    pub kind: ArrayKind,
}

impl ArrayEntry {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn flat(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (&i, &dim) in index.iter().zip(&self.shape) {
            if i >= dim {
                return None;
            }
            flat = flat * dim + i;
        }
        Some(self.offset + flat)
    }

    fn unflatten(&self, mut local: usize) -> Vec<usize> {
        let mut index = vec![0; self.shape.len()];
        for (slot, &dim) in index.iter_mut().zip(&self.shape).rev() {
            *slot = local % dim;
            local /= dim;
        }
        index
    }
}

/// Named binary arrays laid out contiguously in registration order, row-major
/// within each array.
#[derive(Debug, Clone)]
pub struct VariableRegistry {
    id: u64,
    entries: Vec<ArrayEntry>,
    by_name: HashMap<String, usize>,
    total: usize,
}

impl Default for VariableRegistry {
    fn default() -> Self {
        Self::new()
    }
}

impl VariableRegistry {
    pub fn new() -> Self {
        Self {
            id: NEXT_REGISTRY_ID.fetch_add(1, Ordering::Relaxed),
            entries: Vec::new(),
            by_name: HashMap::new(),
            total: 0,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn total_count(&self) -> usize {
        self.total
    }

    pub fn entries(&self) -> &[ArrayEntry] {
        &self.entries
    }

    pub fn entry(&self, name: &str) -> Option<&ArrayEntry> {
        self.by_name.get(name).map(|&i| &self.entries[i])
    }

    /// Registers a decision array and returns the flat index of its first element.
    pub fn register_binary_array(&mut self, name: &str, shape: &[usize]) -> Result<usize> {
        self.register(name, shape, ArrayKind::Decision)
    }

    pub(crate) fn register(
        &mut self,
        name: &str,
        shape: &[usize],
        kind: ArrayKind,
    ) -> Result<usize> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::EmptyShape(name.to_string()));
        }
        let offset = self.total;
        let entry = ArrayEntry {
            name: name.to_string(),
            shape: shape.to_vec(),
            offset,
            kind,
        };
        self.total += entry.len();
        self.by_name.insert(name.to_string(), self.entries.len());
        self.entries.push(entry);
        Ok(offset)
    }

    pub fn resolve(&self, name: &str, index: &[usize]) -> Result<usize> {
        let entry = self
            .entry(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        entry.flat(index).ok_or_else(|| Error::IndexOutOfRange {
            name: name.to_string(),
            index: index.to_vec(),
            shape: entry.shape.clone(),
        })
    }

    /// Inverse of [`resolve`](Self::resolve).
    pub fn locate(&self, flat: usize) -> Result<(&str, Vec<usize>)> {
        if flat >= self.total {
            return Err(Error::FlatIndexOutOfRange(flat));
        }
        let pos = self.entries.partition_point(|e| e.offset <= flat) - 1;
        let entry = &self.entries[pos];
        Ok((&entry.name, entry.unflatten(flat - entry.offset)))
    }

    /// Single-variable polynomial `x[name][index]`.
    pub fn var(&self, name: &str, index: &[usize]) -> Result<BinaryPolynomial> {
        Ok(BinaryPolynomial::variable(
            self.id,
            self.resolve(name, index)?,
        ))
    }

    pub fn constant(&self, value: f64) -> BinaryPolynomial {
        BinaryPolynomial::constant(self.id, value)
    }

    pub fn zero(&self) -> BinaryPolynomial {
        BinaryPolynomial::zero(self.id)
    }

    /// Registers `ceil(upper / step)` slack bits and returns the linear form
    /// `sum_l (l * step) * s_l`. Every multiple of `step` in `[0, upper]` is
    /// representable.
    pub fn add_slack_unary(
        &mut self,
        name: &str,
        upper: f64,
        step: f64,
    ) -> Result<BinaryPolynomial> {
        if step <= 0.0 || !step.is_finite() {
            return Err(Error::InvalidSlack(format!(
                "step must be positive, got {step}"
            )));
        }
        if upper <= 0.0 || !upper.is_finite() {
            return Err(Error::InvalidSlack(format!(
                "upper must be positive, got {upper}"
            )));
        }
        if upper < step {
            return Err(Error::InvalidSlack(format!(
                "upper {upper} is below step {step}"
            )));
        }
        let ratio = upper / step;
        let count = if (ratio - ratio.round()).abs() < 1e-9 {
            ratio.round() as usize
        } else {
            ratio.ceil() as usize
        };
        let weights: Vec<f64> = (1..=count).map(|l| l as f64 * step).collect();
        self.slack_form(name, &weights)
    }

    /// Registers `ceil(log2(upper + 1))` bits with weights `1, 2, 4, ...` where the
    /// last weight is trimmed so the representable range is exactly `[0, upper]`.
    pub fn add_slack_binary(&mut self, name: &str, upper: u64) -> Result<BinaryPolynomial> {
        if upper < 1 {
            return Err(Error::InvalidSlack("binary slack needs upper >= 1".into()));
        }
        let weights: Vec<f64> = binary_slack_weights(upper)
            .into_iter()
            .map(|w| w as f64)
            .collect();
        self.slack_form(name, &weights)
    }

    fn slack_form(&mut self, name: &str, weights: &[f64]) -> Result<BinaryPolynomial> {
        let offset = self.register(name, &[weights.len()], ArrayKind::Slack)?;
        let mut form = self.zero();
        for (l, &w) in weights.iter().enumerate() {
            form.add_term(&[offset + l], w);
        }
        Ok(form)
    }
}

/// Bounded-binary slack weights covering exactly `[0, upper]`.
pub fn binary_slack_weights(upper: u64) -> Vec<u64> {
    let bits = (u64::BITS - upper.leading_zeros()) as usize;
    let mut weights = Vec::with_capacity(bits);
    let mut sum = 0u64;
    for b in 0..bits {
        let w = 1u64 << b;
        if b + 1 == bits {
            weights.push(upper - sum);
        } else {
            weights.push(w);
            sum += w;
        }
    }
    weights
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_indexing() {
        let mut reg = VariableRegistry::new();
        reg.register_binary_array("x", &[2, 3]).unwrap();
        assert_eq!(reg.total_count(), 6);
        assert_eq!(reg.resolve("x", &[1, 2]).unwrap(), 5);
        assert_eq!(reg.locate(5).unwrap(), ("x", vec![1, 2]));
    }

    #[test]
    fn arrays_are_contiguous() {
        let mut reg = VariableRegistry::new();
        reg.register_binary_array("a", &[2]).unwrap();
        let off = reg.register_binary_array("b", &[3]).unwrap();
        assert_eq!(off, 2);
        assert_eq!(reg.resolve("b", &[2]).unwrap(), 4);
        assert_eq!(reg.total_count(), 5);
    }

    #[test]
    fn duplicate_and_empty_rejected() {
        let mut reg = VariableRegistry::new();
        reg.register_binary_array("x", &[2]).unwrap();
        assert!(matches!(
            reg.register_binary_array("x", &[1]),
            Err(Error::DuplicateName(_))
        ));
        assert!(matches!(
            reg.register_binary_array("y", &[]),
            Err(Error::EmptyShape(_))
        ));
        assert!(matches!(
            reg.register_binary_array("z", &[3, 0]),
            Err(Error::EmptyShape(_))
        ));
    }

    #[test]
    fn out_of_range_index() {
        let mut reg = VariableRegistry::new();
        reg.register_binary_array("x", &[2, 2]).unwrap();
        assert!(reg.resolve("x", &[2, 0]).is_err());
        assert!(reg.resolve("x", &[0]).is_err());
        assert!(reg.resolve("nope", &[0]).is_err());
        assert!(reg.locate(4).is_err());
    }

    fn weights(form: &BinaryPolynomial) -> Vec<f64> {
        let mut w: Vec<(usize, f64)> = form.terms().map(|(t, c)| (t[0], c)).collect();
        w.sort_by_key(|&(i, _)| i);
        w.into_iter().map(|(_, c)| c).collect()
    }

    #[test]
    fn unary_slack_counts() {
        let mut reg = VariableRegistry::new();
        let s = reg.add_slack_unary("s", 159.0, 3.0).unwrap();
        assert_eq!(reg.total_count(), 53);
        let w = weights(&s);
        assert_eq!(w.first(), Some(&3.0));
        assert_eq!(w.last(), Some(&159.0));

        let s = reg.add_slack_unary("t", 1.0, 1.0).unwrap();
        assert_eq!(weights(&s), vec![1.0]);

        let s = reg.add_slack_unary("u", 5.0, 2.0).unwrap();
        assert_eq!(weights(&s), vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn unary_slack_rejects_bad_ranges() {
        let mut reg = VariableRegistry::new();
        assert!(reg.add_slack_unary("a", 5.0, 0.0).is_err());
        assert!(reg.add_slack_unary("b", 0.0, 1.0).is_err());
        assert!(reg.add_slack_unary("c", 1.0, 2.0).is_err());
    }

    #[test]
    fn binary_slack_weights_cover_range() {
        assert_eq!(binary_slack_weights(10), vec![1, 2, 4, 3]);
        assert_eq!(binary_slack_weights(1), vec![1]);
        assert_eq!(binary_slack_weights(7), vec![1, 2, 4]);
        for upper in 1..200u64 {
            let w = binary_slack_weights(upper);
            assert_eq!(w.len(), (64 - upper.leading_zeros()) as usize);
            let mut reachable = vec![false; (upper + 1) as usize];
            for mask in 0u32..(1 << w.len()) {
                let v: u64 = (0..w.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| w[b])
                    .sum();
                assert!(v <= upper);
                reachable[v as usize] = true;
            }
            assert!(reachable.iter().all(|&r| r), "upper {upper}");
        }
        let mut reg = VariableRegistry::new();
        assert!(reg.add_slack_binary("s", 0).is_err());
        reg.add_slack_binary("s", 10).unwrap();
        assert_eq!(reg.total_count(), 4);
    }
}
