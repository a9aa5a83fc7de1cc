//! Finite-strength von Neumann meter for projector observables.
//!
//! For a projector `P` the coupling `exp(−i g P ⊗ p̂)` shifts the pointer by
//! `g` on the `P` component and leaves it alone on `1 − P`, so after
//! postselection the meter wavefunction is
//!
//! ```text
//! ψ(q) = α φ(q) + β φ(q − g),   α = ⟨f|U(1−P)|in⟩,  β = ⟨f|U P|in⟩
//! ```
//!
//! with `φ(q) ∝ exp(−q²/4σ²)` (so `Var Q = σ²`). Pointer moments are taken
//! on a uniform grid: trapezoid rule for integrals, fourth-order central
//! differences for `ψ'`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{Amplitude, Projector};
use crate::scenario::Scenario;

pub const DEFAULT_GRID_POINTS: usize = 4096;
/// Largest pointer density tolerated at the grid edges.
pub const EDGE_DENSITY_MAX: f64 = 1e-14;
/// Postselected meter norms below this count as extinguished.
pub const EXTINCTION: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeterConfig {
    /// Pointer position spread.
    pub sigma: f64,
    /// Coupling strength, in pointer units.
    pub g: f64,
    pub grid_points: usize,
    /// Half-width of the grid; `None` means `12σ + 2g`.
    pub grid_halfwidth: Option<f64>,
}

impl MeterConfig {
    pub fn new(sigma: f64, g: f64) -> Self {
        MeterConfig {
            sigma,
            g,
            grid_points: DEFAULT_GRID_POINTS,
            grid_halfwidth: None,
        }
    }

    pub fn with_grid(mut self, points: usize, halfwidth: Option<f64>) -> Self {
        self.grid_points = points;
        self.grid_halfwidth = halfwidth;
        self
    }

    pub fn halfwidth(&self) -> f64 {
        self.grid_halfwidth.unwrap_or(12.0 * self.sigma + 2.0 * self.g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidMeter(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::InvalidMeter(format!("g must be non-negative, got {}", self.g)));
        }
        if self.grid_points < 5 {
            return Err(Error::InvalidMeter("grid needs at least 5 points".into()));
        }
        let hw = self.halfwidth();
        if !(hw.is_finite() && hw > 0.0) {
            return Err(Error::InvalidMeter(format!("grid half-width must be positive, got {hw}")));
        }
        // closest approach of either pointer branch (centred at 0 and g) to an edge
        let gap = (hw - self.g.abs()).min(hw);
        let edge = if gap <= 0.0 { f64::INFINITY } else { density(gap, self.sigma) };
        if edge >= EDGE_DENSITY_MAX {
            return Err(Error::GridTooNarrow(edge));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerStats {
    pub mean_q: f64,
    pub mean_p: f64,
    /// Probability of passing the postselection with the meter attached.
    pub success_prob: f64,
}

/// Normalized Gaussian pointer amplitude.
fn pointer(q: f64, sigma: f64) -> f64 {
    (2.0 * PI * sigma * sigma).powf(-0.25) * (-q * q / (4.0 * sigma * sigma)).exp()
}

fn density(q: f64, sigma: f64) -> f64 {
    pointer(q, sigma).powi(2)
}

struct Grid {
    q: Vec<f64>,
    step: f64,
}

impl Grid {
    fn new(cfg: &MeterConfig) -> Self {
        let n = cfg.grid_points;
        let hw = cfg.halfwidth();
        let step = 2.0 * hw / (n - 1) as f64;
        Grid {
            q: (0..n).map(|k| -hw + k as f64 * step).collect(),
            step,
        }
    }

    fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.q.len() {
            0.5 * self.step
        } else {
            self.step
        }
    }

    fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.q.len()).map(|k| self.weight(k) * f(k)).sum()
    }

    fn integrate_c(&self, f: impl Fn(usize) -> Amplitude) -> Amplitude {
        (0..self.q.len()).map(|k| self.weight(k) * f(k)).sum()
    }

    fn derivative(&self, psi: &[Amplitude]) -> Vec<Amplitude> {
        let n = psi.len();
        let h = self.step;
        (0..n)
            .map(|k| {
                if k >= 2 && k + 2 < n {
                    (-psi[k + 2] + psi[k + 1] * 8.0 - psi[k - 1] * 8.0 + psi[k - 2]) / (12.0 * h)
                } else if k >= 1 && k + 1 < n {
                    (psi[k + 1] - psi[k - 1]) / (2.0 * h)
                } else if k == 0 {
                    (psi[1] - psi[0]) / h
                } else {
                    (psi[k] - psi[k - 1]) / h
                }
            })
            .collect()
    }
}

/// Amplitudes `(α, β)` of the unshifted and shifted pointer branches.
pub fn branch_amplitudes(s: &Scenario, p: &Projector) -> Result<(Amplitude, Amplitude)> {
    Ok((s.transition(p.complement().operator())?, s.transition(p.operator())?))
}

/// Postselected pointer statistics for one weak(ish) measurement of `p`.
pub fn measure_pointer(s: &Scenario, p: &Projector, cfg: &MeterConfig) -> Result<PointerStats> {
    cfg.validate()?;
    let (alpha, beta) = branch_amplitudes(s, p)?;
    let grid = Grid::new(cfg);
    let psi: Vec<Amplitude> = grid
        .q
        .iter()
        .map(|&q| alpha * pointer(q, cfg.sigma) + beta * pointer(q - cfg.g, cfg.sigma))
        .collect();
    let norm = grid.integrate(|k| psi[k].norm_sqr());
    if norm.is_nan() || norm < EXTINCTION {
        return Err(Error::Extinguished(norm));
    }
    let dpsi = grid.derivative(&psi);
    let mean_q = grid.integrate(|k| grid.q[k] * psi[k].norm_sqr()) / norm;
    let mean_p = grid.integrate_c(|k| psi[k].conj() * dpsi[k]).im / norm;
    Ok(PointerStats {
        mean_q,
        mean_p,
        success_prob: norm,
    })
}

/// Weak-value reading of a single meter: `mean_q/g + i·2σ²·mean_p/g`.
pub fn reading(stats: &PointerStats, sigma: f64, g: f64) -> Amplitude {
    Amplitude::new(stats.mean_q / g, 2.0 * sigma * sigma * stats.mean_p / g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakLimit {
    /// `(g, reading)` for every coupling in the sweep.
    pub readings: Vec<(f64, Amplitude)>,
    /// Richardson-extrapolated `g → 0` estimate.
    pub estimate: Amplitude,
}

/// Sweep the coupling downwards and extrapolate the meter reading to `g = 0`.
///
/// Readings depend on `g` only through `exp(−g²/8σ²)`, so the bias is
/// `O(g²)`; the two smallest couplings are combined to cancel it.
pub fn weak_limit_sweep(s: &Scenario, p: &Projector, sigma: f64, g_sweep: &[f64]) -> Result<WeakLimit> {
    if g_sweep.is_empty() {
        return Err(Error::InvalidSweep("empty sweep".into()));
    }
    if g_sweep.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(Error::InvalidSweep("couplings must be positive".into()));
    }
    if g_sweep.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSweep("couplings must be strictly decreasing".into()));
    }
    let readings = g_sweep
        .iter()
        .map(|&g| {
            let stats = measure_pointer(s, p, &MeterConfig::new(sigma, g))?;
            Ok((g, reading(&stats, sigma, g)))
        })
        .collect::<Result<Vec<_>>>()?;

    let steps: Vec<f64> = readings.windows(2).map(|w| (w[1].1 - w[0].1).norm()).collect();
    for w in steps.windows(2) {
        if w[1] > w[0] + 1e-9 {
            return Err(Error::NonConvergent(w[0], w[1]));
        }
    }

    let estimate = match readings.as_slice() {
        [.., (g1, e1), (g2, e2)] => {
            let (a, b) = (g1 * g1, g2 * g2);
            (e2 * a - e1 * b) / (a - b)
        }
        [(_, e)] => *e,
        [] => unreachable!(),
    };
    Ok(WeakLimit { readings, estimate })
}

pub fn weak_limit_estimate(s: &Scenario, p: &Projector, sigma: f64, g_sweep: &[f64]) -> Result<Amplitude> {
    weak_limit_sweep(s, p, sigma, g_sweep).map(|w| w.estimate)
}

/// How much a first weak measurement of `p1` moves the reading of a second
/// meter coupled to `p2`, in weak-value units (pointer shift divided by `g`).
///
/// Both meters are simulated jointly; the two-dimensional pointer integrals
/// factor into products of one-dimensional grid overlaps. The first-order
/// effect cancels, so the result is `O(g²)` (the raw pointer shift is `O(g³)`).
pub fn sequential_disturbance(s: &Scenario, p1: &Projector, p2: &Projector, sigma: f64, g: f64) -> Result<f64> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidMeter(format!("g must be positive, got {g}")));
    }
    let cfg = MeterConfig::new(sigma, g);
    cfg.validate()?;
    let grid = Grid::new(&cfg);

    // branch[a][k] = φ(q_k − a·g)
    let branch: [Vec<f64>; 2] = [0.0, g].map(|shift| grid.q.iter().map(|&q| pointer(q - shift, sigma)).collect());
    let mut overlap = [[0.0; 2]; 2];
    let mut first_moment = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            overlap[a][b] = grid.integrate(|k| branch[a][k] * branch[b][k]);
            first_moment[a][b] = grid.integrate(|k| grid.q[k] * branch[a][k] * branch[b][k]);
        }
    }

    let pieces = |p: &Projector| [p.complement(), p.clone()];
    let (first, second) = (pieces(p1), pieces(p2));
    // amp[a][b] = ⟨f|U P2^(b) P1^(a)|in⟩
    let mut amp = [[Amplitude::default(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let op = second[b].operator().compose(first[a].operator())?;
            amp[a][b] = s.transition(&op)?;
        }
    }
    let mut norm = 0.0;
    let mut moment = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for a2 in 0..2 {
                for b2 in 0..2 {
                    let w = (amp[a][b].conj() * amp[a2][b2]).re;
                    norm += w * overlap[a][a2] * overlap[b][b2];
                    moment += w * overlap[a][a2] * first_moment[b][b2];
                }
            }
        }
    }
    if norm.is_nan() || norm < EXTINCTION {
        return Err(Error::Extinguished(norm));
    }
    let with_first = moment / norm;
    let alone = measure_pointer(s, p2, &cfg)?.mean_q;
    Ok((with_first - alone).abs() / g)
}
