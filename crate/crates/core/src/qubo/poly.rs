use std::collections::BTreeMap;

use crate::error::{Error, Result};

use super::compiled::QuboCompiled;
use super::registry::VariableRegistry;

/// Multilinear polynomial over binary variables.
///
/// Monomials are kept as sorted, duplicate-free index lists so `x * x = x` is
/// applied on every operation. Terms whose coefficient cancels to exactly zero
/// are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryPolynomial {
    registry: u64,
    terms: BTreeMap<Vec<usize>, f64>,
}

fn reduce(vars: &[usize]) -> Vec<usize> {
    let mut key = vars.to_vec();
    key.sort_unstable();
    key.dedup();
    key
}

fn merge(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl BinaryPolynomial {
    pub(crate) fn zero(registry: u64) -> Self {
        Self {
            registry,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn constant(registry: u64, value: f64) -> Self {
        let mut p = Self::zero(registry);
        p.add_term(&[], value);
        p
    }

    pub(crate) fn variable(registry: u64, index: usize) -> Self {
        let mut p = Self::zero(registry);
        p.add_term(&[index], 1.0);
        p
    }

    pub fn registry_id(&self) -> u64 {
        self.registry
    }

    /// Adds `coeff * prod(vars)`; repeated indices collapse.
    pub fn add_term(&mut self, vars: &[usize], coeff: f64) {
        self.accumulate(reduce(vars), coeff);
    }

    fn accumulate(&mut self, key: Vec<usize>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + coeff;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.terms.iter().map(|(k, &c)| (k.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn constant_term(&self) -> f64 {
        self.terms.get(&Vec::new()).copied().unwrap_or(0.0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        Ok(())
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) -> Result<()> {
        self.check(other)?;
        for (k, &c) in &other.terms {
            self.accumulate(k.clone(), c * factor);
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(other, -1.0)?;
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.registry);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                out.accumulate(merge(a, b), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn square(&self) -> Self {
        // Pairs (a, b) and (b, a) are folded into one doubled product.
        let terms: Vec<(&Vec<usize>, f64)> = self.terms.iter().map(|(k, &c)| (k, c)).collect();
        let mut out = Self::zero(self.registry);
        for (i, &(a, ca)) in terms.iter().enumerate() {
            out.accumulate(a.clone(), ca * ca);
            for &(b, cb) in &terms[i + 1..] {
                out.accumulate(merge(a, b), 2.0 * ca * cb);
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.registry);
        for (k, &c) in &self.terms {
            out.accumulate(k.clone(), c * factor);
        }
        out
    }

    pub fn add_constant(&mut self, value: f64) {
        self.accumulate(Vec::new(), value);
    }

    /// Direct evaluation at a bit assignment.
    pub fn eval(&self, sample: &[bool]) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| k.iter().all(|&i| sample[i]))
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn compile(&self, registry: &VariableRegistry) -> Result<QuboCompiled> {
        if registry.id() != self.registry {
            return Err(Error::RegistryMismatch);
        }
        let n = registry.total_count();
        let mut linear = vec![0.0; n];
        let mut quadratic = BTreeMap::new();
        let mut offset = 0.0;
        for (k, &c) in &self.terms {
            match k.as_slice() {
                [] => offset = c,
                [i] => linear[*i] = c,
                [i, j] => {
                    quadratic.insert((*i, *j), c);
                }
                _ => {
                    return Err(Error::UncompilableDegree {
                        term: k.clone(),
                        degree: k.len(),
                    })
                }
            }
        }
        Ok(QuboCompiled::from_parts(linear, quadratic, offset))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (VariableRegistry, BinaryPolynomial, BinaryPolynomial) {
        let mut reg = VariableRegistry::new();
        reg.register_binary_array("v", &[3]).unwrap();
        let x = reg.var("v", &[0]).unwrap();
        let y = reg.var("v", &[1]).unwrap();
        (reg, x, y)
    }

    #[test]
    fn square_of_constraint() {
        let (reg, x, y) = xy();
        let mut p = x.checked_add(&y).unwrap();
        p.add_constant(-1.0);
        let sq = p.square();
        let terms: Vec<(Vec<usize>, f64)> = sq.terms().map(|(k, c)| (k.to_vec(), c)).collect();
        assert_eq!(
            terms,
            vec![
                (vec![], 1.0),
                (vec![0], -1.0),
                (vec![0, 1], 2.0),
                (vec![1], -1.0)
            ]
        );
        let q = sq.compile(&reg).unwrap();
        assert_eq!(q.energy(&[true, false, false]).unwrap(), 0.0);
        assert_eq!(q.energy(&[true, true, false]).unwrap(), 1.0);
        assert_eq!(q.energy(&[false, false, false]).unwrap(), 1.0);
        assert_eq!(q.energy(&[true, true, true]).unwrap(), 1.0);
    }

    #[test]
    fn multiplicative_identity_and_idempotence() {
        let (reg, x, y) = xy();
        let p = x.checked_add(&y.scaled(3.0)).unwrap();
        assert_eq!(p.checked_mul(&reg.constant(1.0)).unwrap(), p);
        assert_eq!(x.square(), x);
        assert_eq!(x.checked_mul(&x).unwrap(), x);
    }

    #[test]
    fn cancellation_removes_terms() {
        let (_, x, y) = xy();
        let p = x.checked_add(&y).unwrap().checked_sub(&x).unwrap();
        assert_eq!(p, y);
        assert!(x.checked_sub(&x).unwrap().is_zero());
    }

    #[test]
    fn registry_mismatch() {
        let (_, x, _) = xy();
        let (_, z, _) = xy();
        assert!(matches!(x.checked_add(&z), Err(Error::RegistryMismatch)));
        assert!(matches!(x.checked_mul(&z), Err(Error::RegistryMismatch)));
    }

    #[test]
    fn cubic_does_not_compile() {
        let (reg, x, y) = xy();
        let z = reg.var("v", &[2]).unwrap();
        let p = x.checked_mul(&y).unwrap().checked_mul(&z).unwrap();
        assert_eq!(p.degree(), 3);
        match p.compile(&reg) {
            Err(Error::UncompilableDegree { term, degree }) => {
                assert_eq!(term, vec![0, 1, 2]);
                assert_eq!(degree, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
