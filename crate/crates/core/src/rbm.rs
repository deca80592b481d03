//! The Bernoulli-Bernoulli restricted Boltzmann machine.
//!
//! Energy of a joint configuration:
//!
//! ```text
//! E(v, h) = -Σᵢⱼ wᵢⱼ vᵢ hⱼ - Σᵢ bᵢ vᵢ - Σⱼ cⱼ hⱼ
//! ```
//!
//! Weights are stored row-major with one row per visible unit, so the
//! couplings of visible unit `i` occupy `weights[i * P .. (i + 1) * P]`.

use rand_distr::{Distribution, Normal};

use crate::{Error, Result, Rng};

/// Largest `D + P` for which the exact enumeration routines will run.
pub const ENUMERATION_LIMIT: usize = 24;

/// A vector of 0/1 units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVec(Vec<u8>);

pub type VisibleState = BinaryVec;
pub type HiddenState = BinaryVec;

impl BinaryVec {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::NonBinaryState { index, value });
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![1; len])
    }

    /// Bit `i` of `index` becomes entry `i`.
    pub fn from_index(index: u64, len: usize) -> Self {
        Self((0..len).map(|i| ((index >> i) & 1) as u8).collect())
    }

    /// Binarizes with `x >= 0.5 → 1`.
    pub fn threshold(probs: &[f64]) -> Self {
        Self(probs.iter().map(|&p| u8::from(p >= 0.5)).collect())
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Self(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i] == 1
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = u8::from(on);
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Indices of the set entries, ascending.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| i)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| f64::from(b)).collect()
    }
}

/// Overflow-safe logistic function.
#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))` without overflow or cancellation.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Numerically stable `log Σ exp(xᵢ)`.
pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Draws each entry independently as Bernoulli(`probs[i]`).
pub fn sample_bernoulli(probs: &[f64], rng: &mut Rng) -> Result<BinaryVec> {
    if let Some((index, &value)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !(0.0..=1.0).contains(*p))
    {
        return Err(Error::InvalidProbability { index, value });
    }
    Ok(sample_unchecked(probs, rng))
}

#[inline]
pub(crate) fn sample_unchecked(probs: &[f64], rng: &mut Rng) -> BinaryVec {
    BinaryVec::from_raw(probs.iter().map(|&p| u8::from(rng.uniform() < p)).collect())
}

/// Model parameters θ = (W, b, c).
#[derive(Debug, Clone, PartialEq)]
pub struct RbmParams {
    visible: usize,
    hidden: usize,
    weights: Vec<f64>,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

impl RbmParams {
    pub fn new(
        visible: usize,
        hidden: usize,
        weights: Vec<f64>,
        visible_bias: Vec<f64>,
        hidden_bias: Vec<f64>,
    ) -> Result<Self> {
        if visible == 0 || hidden == 0 {
            return Err(Error::InvalidArgument(
                "an RBM needs at least one visible and one hidden unit".into(),
            ));
        }
        check_len(visible * hidden, weights.len())?;
        check_len(visible, visible_bias.len())?;
        check_len(hidden, hidden_bias.len())?;
        if weights
            .iter()
            .chain(&visible_bias)
            .chain(&hidden_bias)
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidArgument("parameters must be finite".into()));
        }
        Ok(Self {
            visible,
            hidden,
            weights,
            visible_bias,
            hidden_bias,
        })
    }

    /// Builds parameters from a `D × P` nested weight matrix.
    pub fn from_rows(rows: &[Vec<f64>], visible_bias: Vec<f64>, hidden_bias: Vec<f64>) -> Result<Self> {
        let hidden = hidden_bias.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != hidden) {
            return Err(Error::DimensionMismatch {
                expected: hidden,
                found: bad.len(),
            });
        }
        let weights = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), hidden, weights, visible_bias, hidden_bias)
    }

    pub fn zeros(visible: usize, hidden: usize) -> Result<Self> {
        Self::new(
            visible,
            hidden,
            vec![0.0; visible * hidden],
            vec![0.0; visible],
            vec![0.0; hidden],
        )
    }

    /// Weights drawn from `Normal(0, stddev²)`, biases zero.
    pub fn random(visible: usize, hidden: usize, stddev: f64, rng: &mut Rng) -> Result<Self> {
        let mut params = Self::zeros(visible, hidden)?;
        if stddev > 0.0 {
            let normal = Normal::new(0.0, stddev)
                .map_err(|e| Error::InvalidArgument(format!("weight stddev: {e}")))?;
            for w in &mut params.weights {
                *w = normal.sample(rng);
            }
        } else if stddev < 0.0 || !stddev.is_finite() {
            return Err(Error::InvalidArgument(format!("weight stddev {stddev}")));
        }
        Ok(params)
    }

    pub fn visible_units(&self) -> usize {
        self.visible
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.hidden + j]
    }

    pub fn visible_bias(&self) -> &[f64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [f64], &mut [f64], &mut [f64]) {
        (
            &mut self.weights,
            &mut self.visible_bias,
            &mut self.hidden_bias,
        )
    }

    pub fn check_visible(&self, v: &BinaryVec) -> Result<()> {
        check_len(self.visible, v.len())
    }

    pub fn check_hidden(&self, h: &BinaryVec) -> Result<()> {
        check_len(self.hidden, h.len())
    }

    pub fn energy(&self, v: &VisibleState, h: &HiddenState) -> Result<f64> {
        self.check_visible(v)?;
        self.check_hidden(h)?;
        Ok(self.energy_unchecked(v.as_slice(), h.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, v: &[u8], h: &[u8]) -> f64 {
        let active_h: Vec<usize> = active_indices(h);
        let mut coupling = 0.0;
        let mut vis = 0.0;
        for i in active_indices(v) {
            let row = &self.weights[i * self.hidden..(i + 1) * self.hidden];
            coupling += active_h.iter().map(|&j| row[j]).sum::<f64>();
            vis += self.visible_bias[i];
        }
        let hid: f64 = active_h.iter().map(|&j| self.hidden_bias[j]).sum();
        -coupling - vis - hid
    }

    /// Hidden pre-activations `c + Wᵀv` for a binary visible state.
    pub(crate) fn hidden_input_into(&self, v: &[u8], out: &mut [f64]) {
        out.copy_from_slice(&self.hidden_bias);
        for (i, _) in v.iter().enumerate().filter(|(_, &b)| b == 1) {
            let row = &self.weights[i * self.hidden..(i + 1) * self.hidden];
            for (o, w) in out.iter_mut().zip(row) {
                *o += w;
            }
        }
    }

    /// Visible pre-activations `b + Wh` for a binary hidden state.
    pub(crate) fn visible_input_into(&self, h: &[u8], out: &mut [f64]) {
        let active_h = active_indices(h);
        for (i, (o, row)) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.hidden))
            .enumerate()
        {
            *o = self.visible_bias[i] + active_h.iter().map(|&j| row[j]).sum::<f64>();
        }
    }

    pub(crate) fn hidden_probs(&self, v: &[u8]) -> Vec<f64> {
        let mut out = vec![0.0; self.hidden];
        self.hidden_input_into(v, &mut out);
        out.iter_mut().for_each(|x| *x = logistic(*x));
        out
    }

    pub(crate) fn visible_probs(&self, h: &[u8]) -> Vec<f64> {
        let mut out = vec![0.0; self.visible];
        self.visible_input_into(h, &mut out);
        out.iter_mut().for_each(|x| *x = logistic(*x));
        out
    }

    /// `p(hⱼ = 1 | v) = σ(cⱼ + Σᵢ wᵢⱼ vᵢ)` for every hidden unit.
    pub fn hidden_conditional(&self, v: &VisibleState) -> Result<Vec<f64>> {
        self.check_visible(v)?;
        Ok(self.hidden_probs(v.as_slice()))
    }

    /// `p(vᵢ = 1 | h) = σ(bᵢ + Σⱼ wᵢⱼ hⱼ)`, the expected visible state.
    pub fn visible_conditional(&self, h: &HiddenState) -> Result<Vec<f64>> {
        self.check_hidden(h)?;
        Ok(self.visible_probs(h.as_slice()))
    }

    pub fn sample_hidden(&self, v: &VisibleState, rng: &mut Rng) -> Result<HiddenState> {
        self.check_visible(v)?;
        Ok(sample_unchecked(&self.hidden_probs(v.as_slice()), rng))
    }

    pub fn sample_visible(&self, h: &HiddenState, rng: &mut Rng) -> Result<VisibleState> {
        self.check_hidden(h)?;
        Ok(sample_unchecked(&self.visible_probs(h.as_slice()), rng))
    }

    /// Runs `k` full sweeps (h ~ p(h|v), then v ~ p(v|h)) from `v0` and
    /// returns the final visible state with the hidden state that produced it.
    pub fn gibbs_chain(
        &self,
        v0: &VisibleState,
        k: usize,
        rng: &mut Rng,
    ) -> Result<(VisibleState, HiddenState)> {
        self.check_visible(v0)?;
        if k == 0 {
            return Err(Error::InvalidArgument("Gibbs chain needs k >= 1".into()));
        }
        let mut v = v0.clone();
        let mut h = BinaryVec::zeros(self.hidden);
        for _ in 0..k {
            h = sample_unchecked(&self.hidden_probs(v.as_slice()), rng);
            v = sample_unchecked(&self.visible_probs(h.as_slice()), rng);
        }
        Ok((v, h))
    }

    /// `F(v) = -Σᵢ bᵢvᵢ - Σⱼ log(1 + exp(cⱼ + Σᵢ wᵢⱼvᵢ))`.
    pub fn free_energy(&self, v: &VisibleState) -> Result<f64> {
        self.check_visible(v)?;
        Ok(self.free_energy_unchecked(v.as_slice()))
    }

    pub(crate) fn free_energy_unchecked(&self, v: &[u8]) -> f64 {
        let mut input = vec![0.0; self.hidden];
        self.hidden_input_into(v, &mut input);
        let vis: f64 = active_indices(v).into_iter().map(|i| self.visible_bias[i]).sum();
        -vis - input.into_iter().map(softplus).sum::<f64>()
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.visible + self.hidden > ENUMERATION_LIMIT {
            return Err(Error::TooLargeForEnumeration {
                visible: self.visible,
                hidden: self.hidden,
                limit: ENUMERATION_LIMIT,
            });
        }
        Ok(())
    }

    /// `log Z`, summing `exp(-E(v, h))` over every joint state.
    pub fn log_partition(&self) -> Result<f64> {
        self.check_enumerable()?;
        let mut total = OnlineLogSumExp::default();
        let mut input = vec![0.0; self.hidden];
        for vi in 0..(1u64 << self.visible) {
            let v = BinaryVec::from_index(vi, self.visible);
            self.hidden_input_into(v.as_slice(), &mut input);
            let vis: f64 = v.active().map(|i| self.visible_bias[i]).sum();
            // -E(v, h) = vis + Σⱼ hⱼ inputⱼ
            for hi in 0..(1u64 << self.hidden) {
                let mut neg_energy = vis;
                for (j, x) in input.iter().enumerate() {
                    if (hi >> j) & 1 == 1 {
                        neg_energy += x;
                    }
                }
                total.push(neg_energy);
            }
        }
        Ok(total.value())
    }

    /// The partition function Z.
    pub fn exact_partition(&self) -> Result<f64> {
        Ok(self.log_partition()?.exp())
    }

    /// `p(v) = exp(-F(v)) / Z`.
    pub fn exact_marginal(&self, v: &VisibleState) -> Result<f64> {
        self.check_visible(v)?;
        let log_z = self.log_partition()?;
        Ok((-self.free_energy_unchecked(v.as_slice()) - log_z).exp())
    }

    /// `p(v)` for every visible state, indexed as in [`BinaryVec::from_index`].
    pub fn exact_visible_distribution(&self) -> Result<Vec<f64>> {
        let log_z = self.log_partition()?;
        Ok((0..(1u64 << self.visible))
            .map(|vi| {
                let v = BinaryVec::from_index(vi, self.visible);
                (-self.free_energy_unchecked(v.as_slice()) - log_z).exp()
            })
            .collect())
    }
}

/// Running `log Σ exp(xᵢ)` without storing the terms.
struct OnlineLogSumExp {
    max: f64,
    scaled_sum: f64,
}

impl Default for OnlineLogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
        }
    }
}

impl OnlineLogSumExp {
    fn push(&mut self, x: f64) {
        if x > self.max {
            self.scaled_sum = self.scaled_sum * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled_sum += (x - self.max).exp();
        }
    }

    fn value(&self) -> f64 {
        self.max + self.scaled_sum.ln()
    }
}

fn active_indices(bits: &[u8]) -> Vec<usize> {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect()
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BinaryVec {
        BinaryVec::new(bits.to_vec()).unwrap()
    }

    fn tiny(seed: u64, visible: usize, hidden: usize, scale: f64) -> RbmParams {
        let mut rng = Rng::new(seed);
        let mut p = RbmParams::random(visible, hidden, scale, &mut rng).unwrap();
        let (_, b, c) = p.parts_mut();
        for x in b.iter_mut().chain(c.iter_mut()) {
            *x = scale * (2.0 * rng.uniform() - 1.0);
        }
        p
    }

    #[test]
    fn energy_zero_state_is_zero() {
        let p = tiny(1, 4, 3, 1.0);
        assert_eq!(p.energy(&BinaryVec::zeros(4), &BinaryVec::zeros(3)).unwrap(), 0.0);
    }

    #[test]
    fn energy_zero_params_is_zero() {
        let p = RbmParams::zeros(3, 2).unwrap();
        assert_eq!(p.energy(&bv(&[1, 0, 1]), &bv(&[1, 1])).unwrap(), 0.0);
    }

    #[test]
    fn energy_hand_example() {
        let p = RbmParams::from_rows(&[vec![1.0], vec![-1.0]], vec![0.5, 0.0], vec![0.25]).unwrap();
        let e = p.energy(&bv(&[1, 1]), &bv(&[1])).unwrap();
        assert!((e - (-0.75)).abs() < 1e-15);
    }

    #[test]
    fn energy_rejects_mismatch() {
        let p = RbmParams::zeros(3, 2).unwrap();
        assert_eq!(
            p.energy(&BinaryVec::zeros(2), &BinaryVec::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn energy_flip_delta() {
        let p = tiny(9, 7, 4, 1.5);
        let mut rng = Rng::new(3);
        for _ in 0..50 {
            let mut v = sample_unchecked(&[0.5; 7], &mut rng);
            let h = sample_unchecked(&[0.5; 4], &mut rng);
            let i = (rng.uniform() * 7.0) as usize;
            v.set(i, false);
            let e0 = p.energy(&v, &h).unwrap();
            v.set(i, true);
            let e1 = p.energy(&v, &h).unwrap();
            let expected = -p.visible_bias()[i]
                - h.active().map(|j| p.weight(i, j)).sum::<f64>();
            assert!((e1 - e0 - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn conditionals_zero_params() {
        let p = RbmParams::zeros(3, 2).unwrap();
        assert_eq!(p.hidden_conditional(&bv(&[1, 0, 1])).unwrap(), vec![0.5; 2]);
        assert_eq!(p.visible_conditional(&bv(&[0, 1])).unwrap(), vec![0.5; 3]);
    }

    #[test]
    fn conditionals_hand_examples() {
        let p = RbmParams::from_rows(&[vec![2.0]], vec![0.0], vec![-1.0]).unwrap();
        let ph = p.hidden_conditional(&bv(&[1])).unwrap();
        assert!((ph[0] - 0.731_058_578_630_004_9).abs() < 1e-12);

        let p = RbmParams::from_rows(&[vec![1.0, -1.0]], vec![0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(p.visible_conditional(&bv(&[1, 1])).unwrap(), vec![0.5]);
    }

    #[test]
    fn conditionals_at_zero_state_are_bias_logistic() {
        let p = tiny(4, 5, 3, 2.0);
        let ph = p.hidden_conditional(&BinaryVec::zeros(5)).unwrap();
        for (x, c) in ph.iter().zip(p.hidden_bias()) {
            assert_eq!(*x, logistic(*c));
        }
        let pv = p.visible_conditional(&BinaryVec::zeros(3)).unwrap();
        for (x, b) in pv.iter().zip(p.visible_bias()) {
            assert_eq!(*x, logistic(*b));
        }
    }

    #[test]
    fn hidden_conditional_factorizes() {
        // p(h | v) by enumeration equals the product of per-unit conditionals.
        let p = tiny(11, 4, 3, 1.0);
        let v = bv(&[1, 0, 1, 1]);
        let ph = p.hidden_conditional(&v).unwrap();
        let neg_e: Vec<f64> = (0..8)
            .map(|hi| -p.energy(&v, &BinaryVec::from_index(hi, 3)).unwrap())
            .collect();
        let log_norm = log_sum_exp(neg_e.clone());
        for hi in 0..8u64 {
            let joint = (neg_e[hi as usize] - log_norm).exp();
            let product: f64 = (0..3)
                .map(|j| if (hi >> j) & 1 == 1 { ph[j] } else { 1.0 - ph[j] })
                .product();
            assert!((joint - product).abs() < 1e-12);
        }
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(1000.0), 1.0);
        assert_eq!(logistic(-1000.0), 0.0);
        assert_eq!(logistic(0.0), 0.5);
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-12);
        assert!(softplus(-1000.0) >= 0.0);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sample_bernoulli_extremes_and_errors() {
        let mut rng = Rng::new(0);
        assert_eq!(sample_bernoulli(&[0.0; 8], &mut rng).unwrap(), BinaryVec::zeros(8));
        assert_eq!(sample_bernoulli(&[1.0; 8], &mut rng).unwrap(), BinaryVec::ones(8));
        assert!(matches!(
            sample_bernoulli(&[0.2, 1.5], &mut rng),
            Err(Error::InvalidProbability { index: 1, .. })
        ));
    }

    #[test]
    fn sample_bernoulli_half_mean() {
        let mut rng = Rng::new(42);
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let s = sample_bernoulli(&[0.5; 4], &mut rng).unwrap();
            for i in s.active() {
                counts[i] += 1;
            }
        }
        for c in counts {
            assert!((c as f64 / 1e4 - 0.5).abs() < 0.02);
        }
    }

    #[test]
    fn gibbs_chain_is_deterministic() {
        let p = tiny(5, 6, 3, 1.0);
        let v0 = bv(&[1, 0, 0, 1, 1, 0]);
        let a = p.gibbs_chain(&v0, 7, &mut Rng::new(99)).unwrap();
        let b = p.gibbs_chain(&v0, 7, &mut Rng::new(99)).unwrap();
        assert_eq!(a, b);
        assert!(p.gibbs_chain(&v0, 0, &mut Rng::new(99)).is_err());
    }

    #[test]
    fn free_energy_examples() {
        let p = RbmParams::zeros(4, 3).unwrap();
        let f = p.free_energy(&bv(&[1, 1, 0, 1])).unwrap();
        assert!((f + 3.0 * 2f64.ln()).abs() < 1e-12);

        let p = RbmParams::from_rows(&[vec![1.0]], vec![1.0], vec![0.0]).unwrap();
        let f = p.free_energy(&bv(&[1])).unwrap();
        assert!((f - (-1.0 - (1.0 + 1f64.exp()).ln())).abs() < 1e-12);
        assert!((f + 2.313_261_687_518_223).abs() < 1e-12);
    }

    #[test]
    fn free_energy_matches_brute_force() {
        for seed in 0..10 {
            let p = tiny(seed, 5, 4, 2.0);
            for vi in 0..32 {
                let v = BinaryVec::from_index(vi, 5);
                let brute = -log_sum_exp(
                    (0..16).map(|hi| -p.energy(&v, &BinaryVec::from_index(hi, 4)).unwrap()),
                );
                assert!((brute - p.free_energy(&v).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn partition_examples() {
        let p = RbmParams::zeros(2, 1).unwrap();
        assert!((p.exact_partition().unwrap() - 8.0).abs() < 1e-12);

        let p = RbmParams::new(1, 1, vec![0.0], vec![3f64.ln()], vec![0.0]).unwrap();
        assert!((p.exact_partition().unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn marginals_normalize() {
        for seed in 0..5 {
            let p = tiny(seed, 6, 3, 1.5);
            let total: f64 = (0..64)
                .map(|vi| p.exact_marginal(&BinaryVec::from_index(vi, 6)).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
            let dist: f64 = p.exact_visible_distribution().unwrap().iter().sum();
            assert!((dist - 1.0).abs() < 1e-12);
        }
        let p = RbmParams::zeros(3, 2).unwrap();
        assert!((p.exact_marginal(&bv(&[1, 0, 1])).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn enumeration_guard() {
        let p = RbmParams::zeros(20, 5).unwrap();
        assert!(matches!(
            p.log_partition(),
            Err(Error::TooLargeForEnumeration { .. })
        ));
        assert!(RbmParams::zeros(20, 4).unwrap().log_partition().is_ok());
    }

    #[test]
    fn constructor_validates() {
        assert!(RbmParams::new(0, 1, vec![], vec![], vec![0.0]).is_err());
        assert!(RbmParams::new(2, 1, vec![0.0], vec![0.0; 2], vec![0.0]).is_err());
        assert!(RbmParams::new(1, 1, vec![f64::NAN], vec![0.0], vec![0.0]).is_err());
        assert!(BinaryVec::new(vec![0, 2]).is_err());
    }
}
