//! Fully connected ReLU networks with a thresholded scalar output.

use std::collections::BTreeSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamming::Classifier;
use crate::points::PointSet;
use crate::seed::{derive_seed, rng_from, Rng, CHUNK};

/// Layer widths `(d, w_1, ..., w_L, 1)`; `hidden` holds `w_1..w_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReluArch {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
}

impl ReluArch {
    pub fn new(input_dim: usize, hidden: Vec<usize>) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::Shape("input dimension must be >= 1".into()));
        }
        if hidden.is_empty() || hidden.contains(&0) {
            return Err(Error::Shape("need at least one hidden layer, all widths >= 1".into()));
        }
        Ok(ReluArch { input_dim, hidden })
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.hidden.len()
    }

    /// `W = Σ_l (w_l w_{l-1} + w_l) + (w_L + 1)`.
    pub fn param_count(&self) -> usize {
        let mut prev = self.input_dim;
        let mut w = 0;
        for &width in &self.hidden {
            w += width * prev + width;
            prev = width;
        }
        w + prev + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    /// `weights[j]` is the incoming weight vector of unit `j`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl DenseLayer {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        DenseLayer { weights: vec![vec![0.0; inputs]; outputs], bias: vec![0.0; outputs] }
    }

    fn random(inputs: usize, outputs: usize, range: f64, rng: &mut Rng) -> Self {
        let mut draw = || rng.random_range(-range..=range);
        let weights = (0..outputs).map(|_| (0..inputs).map(|_| draw()).collect()).collect();
        let bias = (0..outputs).map(|_| draw()).collect();
        DenseLayer { weights, bias }
    }

    fn check(&self, inputs: usize, outputs: usize, what: &str) -> Result<()> {
        if self.weights.len() != outputs
            || self.bias.len() != outputs
            || self.weights.iter().any(|r| r.len() != inputs)
        {
            return Err(Error::Shape(format!("{what}: expected {outputs}x{inputs} weights and {outputs} biases")));
        }
        Ok(())
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>, relu: bool) {
        out.clear();
        for (w, b) in self.weights.iter().zip(&self.bias) {
            let s = w.iter().zip(x).map(|(a, c)| a * c).sum::<f64>() + b;
            out.push(if relu { s.max(0.0) } else { s });
        }
    }
}

/// Weights and biases for every layer of a [`ReluArch`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReluParams {
    arch: ReluArch,
    hidden: Vec<DenseLayer>,
    output: DenseLayer,
}

impl ReluParams {
    pub fn new(arch: ReluArch, hidden: Vec<DenseLayer>, output: DenseLayer) -> Result<Self> {
        if hidden.len() != arch.depth() {
            return Err(Error::Shape(format!("expected {} hidden layers, got {}", arch.depth(), hidden.len())));
        }
        let mut prev = arch.input_dim;
        for (l, (layer, &w)) in hidden.iter().zip(&arch.hidden).enumerate() {
            layer.check(prev, w, &format!("hidden layer {}", l + 1))?;
            prev = w;
        }
        output.check(prev, 1, "output layer")?;
        Ok(ReluParams { arch, hidden, output })
    }

    pub fn zeros(arch: &ReluArch) -> Self {
        let mut prev = arch.input_dim;
        let hidden = arch
            .hidden
            .iter()
            .map(|&w| {
                let l = DenseLayer::zeros(prev, w);
                prev = w;
                l
            })
            .collect();
        ReluParams { arch: arch.clone(), hidden, output: DenseLayer::zeros(prev, 1) }
    }

    /// Every entry i.i.d. uniform on `[-range, range]`.
    pub fn random(arch: &ReluArch, range: f64, rng: &mut Rng) -> Self {
        let mut prev = arch.input_dim;
        let hidden = arch
            .hidden
            .iter()
            .map(|&w| {
                let l = DenseLayer::random(prev, w, range, rng);
                prev = w;
                l
            })
            .collect();
        let output = DenseLayer::random(prev, 1, range, rng);
        ReluParams { arch: arch.clone(), hidden, output }
    }

    /// Realizes the affine halfspace `v·x + b > 0`: the first unit of every
    /// hidden layer carries the signal, the remaining units are zero.
    pub fn halfspace(arch: &ReluArch, v: &[f64], b: f64) -> Result<Self> {
        if v.len() != arch.input_dim {
            return Err(Error::Shape(format!("halfspace normal has dimension {}, expected {}", v.len(), arch.input_dim)));
        }
        let mut p = Self::zeros(arch);
        p.hidden[0].weights[0] = v.to_vec();
        p.hidden[0].bias[0] = b;
        for layer in p.hidden.iter_mut().skip(1) {
            layer.weights[0][0] = 1.0;
        }
        p.output.weights[0][0] = 1.0;
        Ok(p)
    }

    pub fn arch(&self) -> &ReluArch {
        &self.arch
    }
}

/// Evaluates the network and thresholds the output: `+1` if positive, else `-1`.
pub fn relu_forward(params: &ReluParams, x: &[f64]) -> Result<i8> {
    if x.len() != params.arch.input_dim {
        return Err(Error::Shape(format!("input has dimension {}, expected {}", x.len(), params.arch.input_dim)));
    }
    Ok(forward_unchecked(params, x))
}

fn forward_unchecked(params: &ReluParams, x: &[f64]) -> i8 {
    let mut cur = x.to_vec();
    let mut next = Vec::new();
    for layer in &params.hidden {
        layer.apply(&cur, &mut next, true);
        std::mem::swap(&mut cur, &mut next);
    }
    params.output.apply(&cur, &mut next, false);
    if next[0] > 0.0 {
        1
    } else {
        -1
    }
}

/// Labeling induced on a point set.
pub fn relu_labeling(params: &ReluParams, pts: &PointSet) -> Result<Classifier> {
    if pts.dim() != params.arch.input_dim {
        return Err(Error::Shape(format!("points have dimension {}, network expects {}", pts.dim(), params.arch.input_dim)));
    }
    let labels: Vec<i8> = pts.domain().points().iter().map(|x| forward_unchecked(params, x)).collect();
    Classifier::from_signs(pts.id(), &labels)
}

/// Width-2, one-hidden-layer network computing XOR on the unit-square corners:
/// `h1 = ρ(x1 + x2)`, `h2 = ρ(x1 + x2 - 1)`, output `h1 - 2 h2 - 1/2`.
pub fn xor_network() -> ReluParams {
    let arch = ReluArch::new(2, vec![2]).expect("valid arch");
    ReluParams::new(
        arch,
        vec![DenseLayer { weights: vec![vec![1.0, 1.0], vec![1.0, 1.0]], bias: vec![0.0, -1.0] }],
        DenseLayer { weights: vec![vec![1.0, -2.0]], bias: vec![-0.5] },
    )
    .expect("shapes match")
}

/// Distinct labelings of `pts` induced by `num_samples` random parameter
/// draws. Draw `i` uses seed `derive_seed(seed, i)`, so the set only grows as
/// `num_samples` increases.
pub fn sample_relu_labelings(
    arch: &ReluArch,
    pts: &PointSet,
    num_samples: usize,
    seed: u64,
    range: f64,
) -> Result<BTreeSet<Classifier>> {
    if num_samples == 0 {
        return Err(Error::Precondition("num_samples must be >= 1".into()));
    }
    if pts.dim() != arch.input_dim {
        return Err(Error::Shape(format!("points have dimension {}, network expects {}", pts.dim(), arch.input_dim)));
    }
    let chunks = num_samples.div_ceil(CHUNK);
    let sets: Vec<BTreeSet<Classifier>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut set = BTreeSet::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(num_samples) {
                let mut rng = rng_from(derive_seed(seed, i as u64));
                let params = ReluParams::random(arch, range, &mut rng);
                set.insert(relu_labeling(&params, pts).expect("dimension checked"));
            }
            set
        })
        .collect();
    Ok(sets.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corners() -> PointSet {
        PointSet::from_points(vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn param_count_formula() {
        assert_eq!(ReluArch::new(2, vec![2]).unwrap().param_count(), 2 * 2 + 2 + 3);
        assert_eq!(ReluArch::new(3, vec![4, 5]).unwrap().param_count(), (12 + 4) + (20 + 5) + 6);
        assert!(ReluArch::new(2, vec![]).is_err());
        assert!(ReluArch::new(0, vec![1]).is_err());
    }

    #[test]
    fn zero_network_outputs_minus_one() {
        let arch = ReluArch::new(3, vec![4, 2]).unwrap();
        let p = ReluParams::zeros(&arch);
        for x in [[0.0, 0.0, 0.0], [1.0, -2.0, 3.0], [-5.0, 5.0, 0.5]] {
            assert_eq!(relu_forward(&p, &x).unwrap(), -1);
        }
    }

    #[test]
    fn single_unit_positive_case() {
        let arch = ReluArch::new(2, vec![1]).unwrap();
        let p = ReluParams::new(
            arch,
            vec![DenseLayer { weights: vec![vec![1.0, 1.0]], bias: vec![0.0] }],
            DenseLayer { weights: vec![vec![2.0]], bias: vec![0.0] },
        )
        .unwrap();
        assert_eq!(relu_forward(&p, &[0.5, 0.25]).unwrap(), 1);
        assert_eq!(relu_forward(&p, &[-0.5, 0.25]).unwrap(), -1);
    }

    #[test]
    fn xor_construction() {
        let f = relu_labeling(&xor_network(), &corners()).unwrap();
        assert_eq!(f.labels(), vec![-1, 1, 1, -1]);
    }

    #[test]
    fn shape_errors() {
        let arch = ReluArch::new(2, vec![2]).unwrap();
        assert!(relu_forward(&ReluParams::zeros(&arch), &[1.0]).is_err());
        let bad = ReluParams::new(
            arch.clone(),
            vec![DenseLayer { weights: vec![vec![1.0]], bias: vec![0.0] }],
            DenseLayer { weights: vec![vec![1.0]], bias: vec![0.0] },
        );
        assert!(bad.is_err());
        assert!(ReluParams::halfspace(&arch, &[1.0], 0.0).is_err());
    }

    #[test]
    fn halfspace_embedding_through_depth() {
        let arch = ReluArch::new(2, vec![3, 2, 2]).unwrap();
        let p = ReluParams::halfspace(&arch, &[1.0, -1.0], 0.25).unwrap();
        assert_eq!(relu_forward(&p, &[1.0, 0.0]).unwrap(), 1);
        assert_eq!(relu_forward(&p, &[0.0, 1.0]).unwrap(), -1);
    }

    #[test]
    fn sampler_lower_bounds() {
        let arch = ReluArch::new(2, vec![2]).unwrap();
        let pts = corners();
        assert_eq!(sample_relu_labelings(&arch, &pts, 1, 3, 1.0).unwrap().len(), 1);
        let small = sample_relu_labelings(&arch, &pts, 500, 3, 1.0).unwrap();
        let large = sample_relu_labelings(&arch, &pts, 3000, 3, 1.0).unwrap();
        assert!(small.is_subset(&large));
        assert!(large.len() <= 16);
        assert!(sample_relu_labelings(&arch, &pts, 0, 3, 1.0).is_err());
    }
}
