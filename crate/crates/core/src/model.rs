//! Network parameters and forward mappings.
//!
//! [`RbfState`] is the conventional single-hidden-layer network
//! `y = Σ_i w_i φ_i(x) + b`. [`StRbfState`] adds a temporal axis: the hidden
//! activation vector of each sample is kept in a tapped delay line of `T`
//! slots and the output is `y(k) = Σ_i Σ_t w_(i,t) Φ_t[i] + b`, where `Φ_t` is
//! the activation vector computed `t − 1` samples ago. Centers are shared
//! across lags.
//!
//! Slots that have not been filled yet hold zero vectors, so with `T = 1` the
//! spatio-temporal network reduces exactly to the conventional one. Feeding
//! each lag a delayed input window instead of a delayed activation gives the
//! same values once the buffer is warm; the two readings only differ in how
//! the pre-history is filled.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, Error, Result};
use crate::kernels::{squared_distance_unchecked, Kernel};

/// `S × D` matrix of neuron centers, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterGrid {
    data: Vec<f64>,
    neurons: usize,
    dim: usize,
}

impl CenterGrid {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let neurons = rows.len();
        if neurons == 0 {
            return Err(Error::invalid("center grid needs at least one neuron"));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::invalid("center grid needs input dimension >= 1"));
        }
        let mut data = Vec::with_capacity(neurons * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend_from_slice(row);
        }
        Self::from_flat(data, neurons, dim)
    }

    pub fn from_flat(data: Vec<f64>, neurons: usize, dim: usize) -> Result<Self> {
        if neurons == 0 || dim == 0 {
            return Err(Error::invalid(format!(
                "center grid must be at least 1x1, got {neurons}x{dim}"
            )));
        }
        check_dim(neurons * dim, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("centers must be finite"));
        }
        Ok(CenterGrid { data, neurons, dim })
    }

    /// Each scalar becomes a center with that value in every input dimension.
    pub fn replicated(values: &[f64], dim: usize) -> Result<Self> {
        let data = values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, dim))
            .collect();
        Self::from_flat(data, values.len(), dim)
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.dim {
            self.data.swap(a * self.dim + j, b * self.dim + j);
        }
    }
}

/// How to build the centers of a fresh network.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterRule {
    /// `lo, lo + step, …` up to and including `hi`, each replicated across
    /// all input dimensions.
    ScalarRange { lo: f64, hi: f64, step: f64 },
    /// Explicit scalar values, each replicated across all input dimensions.
    Explicit(Vec<f64>),
}

impl Default for CenterRule {
    fn default() -> Self {
        CenterRule::ScalarRange {
            lo: -5.0,
            hi: 5.0,
            step: 2.0,
        }
    }
}

impl CenterRule {
    pub fn scalar_values(&self) -> Result<Vec<f64>> {
        match self {
            CenterRule::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::invalid("explicit center list is empty"));
                }
                Ok(v.clone())
            }
            &CenterRule::ScalarRange { lo, hi, step } => {
                if step.is_nan() || step <= 0.0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
                    return Err(Error::invalid(format!(
                        "bad center range lo={lo} hi={hi} step={step}"
                    )));
                }
                let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
                Ok((0..count).map(|j| lo + j as f64 * step).collect())
            }
        }
    }

    pub fn build(&self, dim: usize) -> Result<CenterGrid> {
        CenterGrid::replicated(&self.scalar_values()?, dim)
    }
}

/// Tapped-delay input `[r(k), r(k−1), …, r(k−D+1)]` with zero pre-history.
#[derive(Debug, Clone, PartialEq)]
pub struct InputWindow {
    values: Vec<f64>,
}

impl InputWindow {
    pub fn new(dim: usize) -> Self {
        InputWindow {
            values: vec![0.0; dim],
        }
    }

    /// Shifts every tap one step older and stores `sample` as the newest.
    pub fn push(&mut self, sample: f64) {
        if self.values.is_empty() {
            return;
        }
        self.values.rotate_right(1);
        self.values[0] = sample;
    }

    pub fn reset(&mut self) {
        self.values.fill(0.0);
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Kernel activation of every neuron for input `x`.
pub fn activations(centers: &CenterGrid, kernel: &Kernel, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(centers.dim(), x.len())?;
    let mut out = vec![0.0; centers.neurons()];
    activations_into(centers, kernel, x, &mut out);
    Ok(out)
}

#[inline]
pub(crate) fn activations_into(centers: &CenterGrid, kernel: &Kernel, x: &[f64], out: &mut [f64]) {
    for (o, c) in out.iter_mut().zip(centers.rows()) {
        *o = kernel.eval_unchecked(squared_distance_unchecked(x, c));
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn draw_normal<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    if scale == 0.0 {
        0.0
    } else {
        scale * z
    }
}

fn check_init_scale(scale: f64) -> Result<()> {
    if scale >= 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "init_scale must be finite and non-negative, got {scale}"
        )))
    }
}

/// Conventional RBF network.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfState {
    pub centers: CenterGrid,
    pub kernel: Kernel,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl RbfState {
    pub fn new(centers: CenterGrid, kernel: Kernel, weights: Vec<f64>, bias: f64) -> Result<Self> {
        kernel.validate()?;
        check_dim(centers.neurons(), weights.len())?;
        Ok(RbfState {
            centers,
            kernel,
            weights,
            bias,
        })
    }

    /// Weights and bias drawn i.i.d. from `N(0, init_scale²)`, weights first.
    pub fn init<R: Rng + ?Sized>(
        centers: CenterGrid,
        kernel: Kernel,
        rng: &mut R,
        init_scale: f64,
    ) -> Result<Self> {
        check_init_scale(init_scale)?;
        let weights = (0..centers.neurons())
            .map(|_| draw_normal(rng, init_scale))
            .collect();
        let bias = draw_normal(rng, init_scale);
        Self::new(centers, kernel, weights, bias)
    }

    pub fn neurons(&self) -> usize {
        self.centers.neurons()
    }

    pub fn input_dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn activations(&self, x: &[f64]) -> Result<Vec<f64>> {
        activations(&self.centers, &self.kernel, x)
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        let phi = self.activations(x)?;
        Ok(self.output_from(&phi))
    }

    #[inline]
    pub(crate) fn output_from(&self, phi: &[f64]) -> f64 {
        dot(&self.weights, phi) + self.bias
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    /// Swaps neurons `a` and `b` (center rows and weights).
    pub fn swap_neurons(&mut self, a: usize, b: usize) {
        self.centers.swap_rows(a, b);
        self.weights.swap(a, b);
    }
}

/// Ring buffer of the last `T` activation vectors. Lag 1 is the newest.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationBuffer {
    data: Vec<f64>,
    neurons: usize,
    lags: usize,
    head: usize,
}

impl ActivationBuffer {
    pub fn new(neurons: usize, lags: usize) -> Self {
        ActivationBuffer {
            data: vec![0.0; neurons * lags],
            neurons,
            lags,
            head: 0,
        }
    }

    pub fn lags(&self) -> usize {
        self.lags
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    fn slot(&self, lag: usize) -> usize {
        debug_assert!((1..=self.lags).contains(&lag));
        (self.head + lag - 1) % self.lags
    }

    /// Activation vector at lag `t` (1-based).
    pub fn lag(&self, t: usize) -> &[f64] {
        let s = self.slot(t);
        &self.data[s * self.neurons..(s + 1) * self.neurons]
    }

    fn lag_mut(&mut self, t: usize) -> &mut [f64] {
        let s = self.slot(t);
        &mut self.data[s * self.neurons..(s + 1) * self.neurons]
    }

    /// Evicts the oldest slot and returns the new lag-1 slot for writing.
    fn advance(&mut self) -> &mut [f64] {
        self.head = (self.head + self.lags - 1) % self.lags;
        self.lag_mut(1)
    }

    pub fn push(&mut self, phi: &[f64]) -> Result<()> {
        check_dim(self.neurons, phi.len())?;
        self.advance().copy_from_slice(phi);
        Ok(())
    }

    pub fn clear(&mut self) {
        self.data.fill(0.0);
        self.head = 0;
    }
}

/// Spatio-temporal RBF network. Weight `(i, t)` is stored at
/// `weights[(t − 1)·S + i]` so each lag's weights are contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct StRbfState {
    pub centers: CenterGrid,
    pub kernel: Kernel,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub buffer: ActivationBuffer,
    pub samples_seen: u64,
}

impl StRbfState {
    pub fn new(
        centers: CenterGrid,
        kernel: Kernel,
        lags: usize,
        weights: Vec<f64>,
        bias: f64,
    ) -> Result<Self> {
        kernel.validate()?;
        if lags == 0 {
            return Err(Error::invalid("truncated time T must be >= 1"));
        }
        let s = centers.neurons();
        check_dim(s * lags, weights.len())?;
        Ok(StRbfState {
            buffer: ActivationBuffer::new(s, lags),
            centers,
            kernel,
            weights,
            bias,
            samples_seen: 0,
        })
    }

    /// Weights drawn lag by lag (all neurons of lag 1, then lag 2, …), then
    /// the bias. With `T = 1` this consumes the generator exactly like
    /// [`RbfState::init`].
    pub fn init<R: Rng + ?Sized>(
        centers: CenterGrid,
        kernel: Kernel,
        lags: usize,
        rng: &mut R,
        init_scale: f64,
    ) -> Result<Self> {
        check_init_scale(init_scale)?;
        if lags == 0 {
            return Err(Error::invalid("truncated time T must be >= 1"));
        }
        let weights = (0..centers.neurons() * lags)
            .map(|_| draw_normal(rng, init_scale))
            .collect();
        let bias = draw_normal(rng, init_scale);
        Self::new(centers, kernel, lags, weights, bias)
    }

    pub fn from_rbf(rbf: &RbfState) -> Self {
        Self::new(
            rbf.centers.clone(),
            rbf.kernel,
            1,
            rbf.weights.clone(),
            rbf.bias,
        )
        .expect("valid rbf state")
    }

    pub fn neurons(&self) -> usize {
        self.centers.neurons()
    }

    pub fn lags(&self) -> usize {
        self.buffer.lags()
    }

    pub fn input_dim(&self) -> usize {
        self.centers.dim()
    }

    pub fn weight(&self, neuron: usize, lag: usize) -> f64 {
        self.weights[(lag - 1) * self.neurons() + neuron]
    }

    pub fn weight_mut(&mut self, neuron: usize, lag: usize) -> &mut f64 {
        let s = self.neurons();
        &mut self.weights[(lag - 1) * s + neuron]
    }

    pub fn lag_weights(&self, lag: usize) -> &[f64] {
        let s = self.neurons();
        &self.weights[(lag - 1) * s..lag * s]
    }

    /// Output from the current buffer contents, without pushing anything.
    pub fn output(&self) -> f64 {
        let mut y = 0.0;
        for t in 1..=self.lags() {
            y += dot(self.lag_weights(t), self.buffer.lag(t));
        }
        y + self.bias
    }

    /// Pushes the activation of `x` into the delay line and returns `y(k)`.
    /// Weights are never touched.
    pub fn push_and_forward(&mut self, x: &[f64]) -> Result<f64> {
        check_dim(self.centers.dim(), x.len())?;
        let slot = self.buffer.advance();
        activations_into(&self.centers, &self.kernel, x, slot);
        self.samples_seen += 1;
        Ok(self.output())
    }

    /// Zeroes the delay line and the sample counter.
    pub fn reset_buffer(&mut self) {
        self.buffer.clear();
        self.samples_seen = 0;
    }

    pub fn is_finite(&self) -> bool {
        self.bias.is_finite() && self.weights.iter().all(|w| w.is_finite())
    }

    pub fn swap_neurons(&mut self, a: usize, b: usize) {
        let s = self.neurons();
        self.centers.swap_rows(a, b);
        for t in 0..self.lags() {
            self.weights.swap(t * s + a, t * s + b);
        }
        for t in 1..=self.lags() {
            self.buffer.lag_mut(t).swap(a, b);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_neuron_grid() -> CenterGrid {
        CenterGrid::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap()
    }

    #[test]
    fn activation_examples() {
        let k = Kernel::default();
        let phi = activations(&two_neuron_grid(), &k, &[0.0, 0.0]).unwrap();
        assert_eq!(phi[0], 1.0);
        assert_abs_diff_eq!(phi[1], 0.1353353, epsilon = 1e-7);
        assert_eq!(phi[1], (-2.0f64).exp());

        let phi = activations(&two_neuron_grid(), &k, &[1.0, 1.0]).unwrap();
        assert_eq!(phi[1], 1.0);

        assert!(activations(&two_neuron_grid(), &k, &[1.0]).is_err());
    }

    #[test]
    fn forward_examples() {
        let grid = two_neuron_grid();
        let k = Kernel::default();
        let s = RbfState::new(grid.clone(), k, vec![0.0, 0.0], 0.5).unwrap();
        assert_eq!(s.forward(&[3.0, -2.0]).unwrap(), 0.5);

        let one = CenterGrid::from_rows(&[vec![0.4, -0.2]]).unwrap();
        let s = RbfState::new(one, k, vec![2.0], 0.0).unwrap();
        assert_eq!(s.forward(&[0.4, -0.2]).unwrap(), 2.0);

        let s = RbfState::new(grid, k, vec![1.0, -1.0], 0.1).unwrap();
        assert_abs_diff_eq!(s.forward(&[0.0, 0.0]).unwrap(), 0.9646647, epsilon = 1e-7);
        assert!(s.forward(&[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn weights_must_match_neurons() {
        assert!(RbfState::new(two_neuron_grid(), Kernel::default(), vec![1.0], 0.0).is_err());
        assert!(StRbfState::new(two_neuron_grid(), Kernel::default(), 2, vec![1.0; 3], 0.0).is_err());
        assert!(StRbfState::new(two_neuron_grid(), Kernel::default(), 0, vec![], 0.0).is_err());
    }

    #[test]
    fn strbf_ring_buffer_hand_simulation() {
        let grid = CenterGrid::from_rows(&[vec![0.0]]).unwrap();
        let k = Kernel::default();
        let mut s = StRbfState::new(grid, k, 2, vec![1.0, 1.0], 0.0).unwrap();
        let a1 = (-1.0f64).exp();
        let a2 = (-0.25f64).exp();
        assert_eq!(s.push_and_forward(&[1.0]).unwrap(), a1);
        assert_eq!(s.push_and_forward(&[0.5]).unwrap(), a2 + a1);
        assert_eq!(s.buffer.lag(1), &[a2]);
        assert_eq!(s.buffer.lag(2), &[a1]);
        assert_eq!(s.samples_seen, 2);
        // third push evicts a1
        s.push_and_forward(&[0.0]).unwrap();
        assert_eq!(s.buffer.lag(2), &[a2]);
    }

    #[test]
    fn strbf_bias_only() {
        let grid = CenterGrid::replicated(&[-1.0, 1.0], 3).unwrap();
        let mut s = StRbfState::new(grid, Kernel::default(), 4, vec![0.0; 8], -0.3).unwrap();
        for k in 0..20 {
            let x = [k as f64 * 0.1, 0.0, 1.0];
            assert_eq!(s.push_and_forward(&x).unwrap(), -0.3);
        }
    }

    #[test]
    fn benchmark_architecture_centers() {
        let grid = CenterRule::default().build(3).unwrap();
        assert_eq!(grid.neurons(), 6);
        assert_eq!(grid.dim(), 3);
        let expected = [-5.0, -3.0, -1.0, 1.0, 3.0, 5.0];
        for (row, &v) in grid.rows().zip(&expected) {
            assert_eq!(row, &[v, v, v]);
        }
    }

    #[test]
    fn center_rule_errors() {
        assert!(CenterRule::Explicit(vec![]).build(3).is_err());
        assert!(CenterRule::ScalarRange { lo: 0.0, hi: 1.0, step: 0.0 }.build(1).is_err());
        assert!(CenterRule::ScalarRange { lo: 1.0, hi: 0.0, step: 1.0 }.build(1).is_err());
        assert!(CenterRule::default().build(0).is_err());
        let v = CenterRule::ScalarRange { lo: 0.0, hi: 1.0, step: 0.1 }
            .scalar_values()
            .unwrap();
        assert_eq!(v.len(), 11);
    }

    #[test]
    fn init_is_seeded_and_scaled() {
        let grid = CenterRule::default().build(3).unwrap();
        let k = Kernel::default();
        let a = StRbfState::init(grid.clone(), k, 5, &mut ChaCha8Rng::seed_from_u64(7), 0.1).unwrap();
        let b = StRbfState::init(grid.clone(), k, 5, &mut ChaCha8Rng::seed_from_u64(7), 0.1).unwrap();
        assert_eq!(a, b);
        assert!(a.buffer.lag(3).iter().all(|&v| v == 0.0));

        let z = RbfState::init(grid.clone(), k, &mut ChaCha8Rng::seed_from_u64(7), 0.0).unwrap();
        assert!(z.weights.iter().all(|&w| w == 0.0 && w.is_sign_positive()));
        assert_eq!(z.bias, 0.0);

        assert!(RbfState::init(grid.clone(), k, &mut ChaCha8Rng::seed_from_u64(7), -1.0).is_err());
        assert!(StRbfState::init(grid, k, 0, &mut ChaCha8Rng::seed_from_u64(7), 0.1).is_err());
    }

    #[test]
    fn single_lag_init_matches_rbf_init() {
        let grid = CenterRule::default().build(3).unwrap();
        let k = Kernel::default();
        let r = RbfState::init(grid.clone(), k, &mut ChaCha8Rng::seed_from_u64(3), 0.1).unwrap();
        let s = StRbfState::init(grid, k, 1, &mut ChaCha8Rng::seed_from_u64(3), 0.1).unwrap();
        assert_eq!(r.weights, s.weights);
        assert_eq!(r.bias, s.bias);
    }

    #[test]
    fn input_window_taps() {
        let mut w = InputWindow::new(3);
        w.push(1.0);
        assert_eq!(w.as_slice(), &[1.0, 0.0, 0.0]);
        w.push(2.0);
        w.push(3.0);
        w.push(4.0);
        assert_eq!(w.as_slice(), &[4.0, 3.0, 2.0]);
        w.reset();
        assert_eq!(w.as_slice(), &[0.0; 3]);
    }

    fn random_state(seed: u64, lags: usize) -> StRbfState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let grid = CenterGrid::replicated(&values, 2).unwrap();
        StRbfState::init(grid, Kernel::Gaussian { sigma: 1.3 }, lags, &mut rng, 0.7).unwrap()
    }

    proptest! {
        #[test]
        fn single_lag_reduces_to_rbf(seed in any::<u64>(), xs in proptest::collection::vec(-3.0f64..3.0, 2..40)) {
            let mut st = random_state(seed, 1);
            let rbf = RbfState::new(st.centers.clone(), st.kernel, st.weights.clone(), st.bias).unwrap();
            for x in xs.chunks_exact(2) {
                let a = st.push_and_forward(x).unwrap();
                let b = rbf.forward(x).unwrap();
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn buffer_matches_recomputed_history(seed in any::<u64>(), lags in 1usize..6, xs in proptest::collection::vec(-3.0f64..3.0, 2..30)) {
            let mut st = random_state(seed, lags);
            let inputs: Vec<&[f64]> = xs.chunks_exact(2).collect();
            for x in &inputs {
                st.push_and_forward(x).unwrap();
            }
            let n = inputs.len();
            for t in 1..=lags {
                let expected = if n >= t {
                    activations(&st.centers, &st.kernel, inputs[n - t]).unwrap()
                } else {
                    vec![0.0; st.neurons()]
                };
                prop_assert_eq!(st.buffer.lag(t), expected.as_slice());
            }
        }

        #[test]
        fn output_is_linear_in_parameters(seed in any::<u64>(), lags in 1usize..4, xs in proptest::collection::vec(-3.0f64..3.0, 2..20)) {
            let mut a = random_state(seed, lags);
            let mut b = a.clone();
            b.weights.iter_mut().for_each(|w| *w *= 2.0);
            b.bias *= 2.0;
            let rbf_a = RbfState::new(a.centers.clone(), a.kernel, a.lag_weights(1).to_vec(), a.bias).unwrap();
            let rbf_b = RbfState::new(b.centers.clone(), b.kernel, b.lag_weights(1).to_vec(), b.bias).unwrap();
            for x in xs.chunks_exact(2) {
                let ya = a.push_and_forward(x).unwrap();
                let yb = b.push_and_forward(x).unwrap();
                prop_assert!((yb - 2.0 * ya).abs() <= 1e-12 * ya.abs().max(1e-300));
                let ra = rbf_a.forward(x).unwrap();
                let rb = rbf_b.forward(x).unwrap();
                prop_assert!((rb - 2.0 * ra).abs() <= 1e-12 * ra.abs().max(1e-300));
            }
        }
    }
}
