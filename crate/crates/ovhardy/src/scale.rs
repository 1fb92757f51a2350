//! Quadrature grids for the scale variable ε ∈ (0, 1].
//!
//! A `ScaleGrid` carries nodes ε_1 > ε_2 > … and positive weights so that
//! Σ_j w_j g(ε_j) ≈ ∫_0^{top} g(ε) dε/ε for integrands that vanish like ε²
//! at zero (every squared profile in this crate does).  Log-uniform grids
//! use the midpoint rule in λ = ln ε: the error has a clean Δ² expansion,
//! so doubling the node count reliably quarters it.  Dyadic grids mirror
//! the counting-measure convention of the level-indexed square functions:
//! ε_j = 2^{−j} with unit weights.

use crate::field::GridSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMode {
    /// Midpoint rule in log ε over (floor, top]; the smallest node also
    /// carries the tail mass below `floor` under a quadratic model for g.
    LogUniform,
    /// ε_j = 2^{−j}, unit weight per level (counting measure over levels).
    Dyadic,
}

/// Nodes ε_1 > ε_2 > … in (0, 1] with matching positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub mode: ScaleMode,
    /// Upper end of the represented scale interval (0, top].
    pub top: f64,
}

impl ScaleGrid {
    /// Log-uniform grid: `j` midpoint nodes ε_i = exp(λ_i) with λ_i uniform
    /// in (ln floor, ln top), each of weight Δ = ln(top/floor)/j.
    ///
    /// The smallest node additionally absorbs the scale mass below `floor`
    /// under the model g ∝ ε² (all squared profiles vanish at least that
    /// fast), contributing exactly e^{−Δ}/2.  Σ w = ln(top/floor) + e^{−Δ}/2.
    pub fn log_uniform(j: usize, floor: f64, top: f64) -> Self {
        assert!(j >= 1 && floor > 0.0 && floor < top && top <= 1.0);
        let (lo, hi) = (floor.ln(), top.ln());
        let d = (hi - lo) / j as f64;
        let mut nodes: Vec<f64> = (0..j).map(|i| (lo + (i as f64 + 0.5) * d).exp()).collect();
        let mut weights = vec![d; j];
        weights[0] += 0.5 * (-d).exp();
        nodes.reverse();
        weights.reverse();
        ScaleGrid {
            nodes,
            weights,
            mode: ScaleMode::LogUniform,
            top,
        }
    }

    /// Default local grid for a sampling lattice: `j` nodes on (h/4, 1].
    /// Refining `j` only tightens the spacing — the floor stays put, so the
    /// quadrature error follows a clean Δ² law under doubling.
    pub fn local(grid: &GridSpec, j: usize) -> Self {
        Self::log_uniform(j, 0.25 * grid.h(), 1.0)
    }

    /// Dyadic levels ε_j = 2^{−j}, j = 1..=levels, unit weights.
    pub fn dyadic(levels: usize) -> Self {
        assert!(levels >= 1);
        let nodes: Vec<f64> = (1..=levels).map(|j| 0.5f64.powi(j as i32)).collect();
        ScaleGrid {
            weights: vec![1.0; nodes.len()],
            nodes,
            mode: ScaleMode::Dyadic,
            top: 1.0,
        }
    }

    /// Dyadic grid capped at the grid resolution: levels with 2^{−j} < h are
    /// dropped (their kernels cannot be resolved).
    pub fn dyadic_for(grid: &GridSpec) -> Self {
        let mut levels = 0usize;
        while 0.5f64.powi(levels as i32 + 1) >= grid.h() {
            levels += 1;
        }
        Self::dyadic(levels.max(1))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// (node, weight) pairs, largest scale first.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Quadrature Σ w_j g(ε_j) for ∫_0^{top} g dε/ε.
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        crate::sum::kahan_sum(self.iter().map(|(e, w)| w * g(e)))
    }

    /// Restriction to nodes ε_j ≤ cutoff (tent regions); weights kept.
    pub fn truncated(&self, cutoff: f64) -> Self {
        let keep: Vec<(f64, f64)> = self.iter().filter(|(e, _)| *e <= cutoff).collect();
        ScaleGrid {
            nodes: keep.iter().map(|p| p.0).collect(),
            weights: keep.iter().map(|p| p.1).collect(),
            mode: self.mode,
            top: cutoff.min(self.top),
        }
    }

    pub fn check_invariants(&self) -> bool {
        self.nodes.len() == self.weights.len()
            && !self.nodes.is_empty()
            && self.nodes.windows(2).all(|w| w[0] > w[1])
            && self.nodes.iter().all(|&e| e > 0.0 && e <= 1.0)
            && self.weights.iter().all(|&w| w > 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid1() -> GridSpec {
        GridSpec::desk_1d(1)
    }

    #[test]
    fn default_grid_invariants() {
        let sg = ScaleGrid::local(&grid1(), 64);
        assert!(sg.check_invariants());
        assert_eq!(sg.len(), 64);
        assert!(sg.nodes[0] < 1.0 && sg.nodes[0] > 0.9);
        // Smallest node sits half a log-step above the floor h/4.
        let floor = grid1().h() / 4.0;
        let last = *sg.nodes.last().unwrap();
        assert!(last > floor && last < floor * 1.1);
    }

    #[test]
    fn nodes_are_log_uniform() {
        let sg = ScaleGrid::local(&grid1(), 64);
        let ratio = sg.nodes[0] / sg.nodes[1];
        for w in sg.nodes.windows(2) {
            assert!((w[0] / w[1] - ratio).abs() < 1e-12);
        }
    }

    #[test]
    fn weight_sum_is_exact() {
        // Midpoint panels tile (ln floor, ln top]; the tail below the floor
        // adds e^{−Δ}/2: Σw = ln(top/floor) + e^{−Δ}/2.
        let g = grid1();
        for j in [16usize, 32, 64, 128] {
            let sg = ScaleGrid::local(&g, j);
            let d = (4.0 / g.h()).ln() / j as f64;
            let want = (4.0 / g.h()).ln() + 0.5 * (-d).exp();
            let got: f64 = sg.weights.iter().sum();
            assert!((got - want).abs() < 1e-12, "j={j}: {got} vs {want}");
        }
    }

    #[test]
    fn quadrature_accuracy_and_refinement() {
        // ∫_0^1 b²ε²e^{−bε} dε/ε = 1 − (1+b)e^{−b}; this is the exact shape
        // of the scale integrand behind the embedding-retraction identity.
        let g = grid1();
        for b in [0.5, 1.5, std::f64::consts::PI] {
            let exact = 1.0 - (1.0 + b) * (-b).exp();
            let err = |j: usize| {
                let sg = ScaleGrid::local(&g, j);
                (sg.integrate(|e| b * b * e * e * (-b * e).exp()) - exact).abs()
            };
            let (e32, e64, e128) = (err(32), err(64), err(128));
            assert!(e64 < 5e-4, "b={b}: J=64 error {e64}");
            assert!(e64 <= 0.3 * e32, "b={b}: {e32} → {e64}");
            assert!(e128 <= 0.35 * e64, "b={b}: {e64} → {e128}");
        }
    }

    #[test]
    fn dyadic_levels_and_unit_weights() {
        let sg = ScaleGrid::dyadic(5);
        assert!(sg.check_invariants());
        assert_eq!(sg.nodes, vec![0.5, 0.25, 0.125, 0.0625, 0.03125]);
        assert!(sg.weights.iter().all(|&w| w == 1.0));
        // Default d=1 desk grid resolves exactly 5 levels (2^{−5} = h).
        assert_eq!(ScaleGrid::dyadic_for(&grid1()).len(), 5);
        assert_eq!(ScaleGrid::dyadic_for(&GridSpec::desk_2d(1)).len(), 4);
    }

    #[test]
    fn truncation_drops_large_scales() {
        let g = grid1();
        let sg = ScaleGrid::local(&g, 64);
        let t = sg.truncated(0.25);
        assert!(t.check_invariants());
        assert!(t.nodes.iter().all(|&e| e <= 0.25));
        assert!(t.len() < sg.len());
    }

    #[test]
    fn scaling_box_and_range_together_is_exact() {
        // Halving (floor, top) together maps nodes to half and keeps every
        // weight: the scale quadrature is exactly equivariant under dilation.
        let h = 32.0 / 1024.0;
        let sa = ScaleGrid::log_uniform(64, h / 4.0, 1.0);
        let sb = ScaleGrid::log_uniform(64, h / 8.0, 0.5);
        assert_eq!(sa.len(), sb.len());
        for i in 0..sa.len() {
            assert!((sb.nodes[i] - 0.5 * sa.nodes[i]).abs() < 1e-15);
            assert!((sb.weights[i] - sa.weights[i]).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn invariants_hold_for_any_setup(j in 1usize..200, fpow in 2u32..16, top_num in 2u32..33) {
            let top = top_num as f64 / 32.0;
            let floor = (0.5f64.powi(fpow as i32)).min(top / 2.0);
            let sg = ScaleGrid::log_uniform(j, floor, top);
            prop_assert!(sg.check_invariants());
            prop_assert!(sg.nodes[0] < top);
            let d = (top / floor).ln() / j as f64;
            let want = (top / floor).ln() + 0.5 * (-d).exp();
            let sum: f64 = sg.weights.iter().sum();
            prop_assert!((sum - want).abs() < 1e-10);
        }
    }
}
