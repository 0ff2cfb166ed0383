use super::distribution::{cumulative, sample_index};
use super::EmpiricalConditional;
use crate::nn::Dataset;
use crate::rng;
use crate::{Error, Result};

/// A training pair whose input carries the switch value `r` in front.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPair {
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl AugmentedPair {
    pub fn r(&self) -> f64 {
        self.input[0]
    }
}

/// `[r, x_1, ..., x_n]`.
pub fn augment(x: &[f64], r: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::input(format!("r = {r} lies outside [0, 1]")));
    }
    let mut out = Vec::with_capacity(x.len() + 1);
    out.push(r);
    out.extend_from_slice(x);
    Ok(out)
}

/// `pairs_per_input` augmented pairs for every input state of `emp`, with
/// `r ~ U[0, 1)` from the stream seeded by `seed`.
pub fn generate_pairs(emp: &EmpiricalConditional, pairs_per_input: usize, seed: u64) -> Result<Vec<AugmentedPair>> {
    let mut rng = rng::seeded(seed);
    generate_pairs_with(emp, pairs_per_input, || rng::unit(&mut rng))
}

/// [`generate_pairs`] with an explicit source of `r` values. Inputs are
/// visited in table order and `draw` is called once per pair.
pub fn generate_pairs_with<F>(emp: &EmpiricalConditional, pairs_per_input: usize, mut draw: F) -> Result<Vec<AugmentedPair>>
where
    F: FnMut() -> f64,
{
    if emp.is_empty() {
        return Err(Error::input("empirical table is empty"));
    }
    if pairs_per_input == 0 {
        return Err(Error::input("pairs_per_input must be positive"));
    }
    let mut out = Vec::with_capacity(emp.len() * pairs_per_input);
    for entry in emp.entries() {
        let intervals = cumulative(&entry.distribution);
        for _ in 0..pairs_per_input {
            let r = draw();
            let k = sample_index(&intervals, r)?;
            out.push(AugmentedPair { input: augment(&entry.input, r)?, target: entry.outcomes[k].clone() });
        }
    }
    Ok(out)
}

pub fn pairs_to_dataset(pairs: Vec<AugmentedPair>) -> Result<Dataset> {
    Dataset::new(pairs.into_iter().map(|p| (p.input, p.target)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::estimate_empirical;
    use crate::nn::one_hot;

    #[test]
    fn augment_examples() {
        assert_eq!(augment(&[1.0, 0.0, 0.0, 0.0], 0.5).unwrap(), vec![0.5, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(augment(&[], 0.0).unwrap(), vec![0.0]);
        assert_eq!(augment(&[-1.0, 0.0, 1.0], 0.25).unwrap(), vec![0.25, -1.0, 0.0, 1.0]);
        assert!(augment(&[1.0], 1.5).is_err());
        assert!(augment(&[1.0], -0.1).is_err());
    }

    #[test]
    fn walker_training_table() {
        let start = one_hot(4, 0);
        let data: Vec<_> = (1..4).map(|i| (start.clone(), one_hot(4, i))).collect();
        let emp = estimate_empirical(data).unwrap();
        let mut draws = [0.5, 0.2, 0.8, 0.9, 0.1].into_iter();
        let pairs = generate_pairs_with(&emp, 5, || draws.next().unwrap()).unwrap();
        let targets: Vec<_> = pairs.iter().map(|p| p.target.clone()).collect();
        assert_eq!(
            targets,
            vec![one_hot(4, 2), one_hot(4, 1), one_hot(4, 3), one_hot(4, 3), one_hot(4, 1)]
        );
        assert_eq!(pairs[0].input, vec![0.5, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_outcome_ignores_r() {
        let emp = estimate_empirical([(vec![1.0], vec![0.0, 1.0])]).unwrap();
        let pairs = generate_pairs(&emp, 200, 4).unwrap();
        assert!(pairs.iter().all(|p| p.target == vec![0.0, 1.0]));
        assert!(pairs.iter().all(|p| (0.0..1.0).contains(&p.r())));
    }

    #[test]
    fn balanced_per_input_and_deterministic() {
        let emp = estimate_empirical([
            (vec![0.0], vec![1.0]),
            (vec![0.0], vec![1.0]),
            (vec![0.0], vec![2.0]),
            (vec![1.0], vec![3.0]),
        ])
        .unwrap();
        let a = generate_pairs(&emp, 7, 11).unwrap();
        assert_eq!(a.len(), 14);
        assert_eq!(a.iter().filter(|p| p.input[1] == 1.0).count(), 7);
        assert_eq!(a, generate_pairs(&emp, 7, 11).unwrap());
    }
}
