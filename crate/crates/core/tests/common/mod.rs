//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;
use wvlogic::linalg::{c, Amplitude, Operator, Projector, StateVector, ONE, ZERO};
use wvlogic::scenario::hardy_beamsplitter;
use wvlogic::{ChannelTable, Scenario};

pub fn labels(dim: usize) -> Vec<String> {
    (0..dim).map(|k| format!("e{k}")).collect()
}

pub fn random_amp(rng: &mut StdRng) -> Amplitude {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_vector(rng: &mut StdRng, dim: usize) -> Vec<Amplitude> {
    (0..dim).map(|_| random_amp(rng)).collect()
}

pub fn random_state(rng: &mut StdRng, dim: usize) -> StateVector {
    StateVector::normalized_from(labels(dim), random_vector(rng, dim)).unwrap()
}

/// Columns of a random unitary, by Gram-Schmidt on random vectors.
pub fn random_orthonormal_basis(rng: &mut StdRng, dim: usize) -> Vec<Vec<Amplitude>> {
    let mut basis: Vec<Vec<Amplitude>> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut v = random_vector(rng, dim);
        for b in &basis {
            let proj: Amplitude = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Projector onto the span of the given orthonormal vectors.
pub fn span_projector(dim: usize, vectors: &[Vec<Amplitude>]) -> Projector {
    let mut rows = vec![vec![ZERO; dim]; dim];
    for v in vectors {
        for i in 0..dim {
            for j in 0..dim {
                rows[i][j] += v[i] * v[j].conj();
            }
        }
    }
    Projector::new(Operator::from_rows(rows).unwrap()).unwrap()
}

/// A random projector of random rank in `0..=dim`.
pub fn random_projector(rng: &mut StdRng, dim: usize) -> Projector {
    let basis = random_orthonormal_basis(rng, dim);
    let rank = rng.gen_range(0..=dim);
    span_projector(dim, &basis[..rank])
}

/// A random complete orthogonal family: a random basis split into groups.
pub fn random_complete_family(rng: &mut StdRng, dim: usize) -> Vec<Projector> {
    let basis = random_orthonormal_basis(rng, dim);
    let mut out = Vec::new();
    let mut start = 0;
    while start < dim {
        let len = rng.gen_range(1..=dim - start);
        out.push(span_projector(dim, &basis[start..start + len]));
        start += len;
    }
    out
}

pub fn random_operator(rng: &mut StdRng, dim: usize) -> Operator {
    Operator::from_rows((0..dim).map(|_| random_vector(rng, dim)).collect()).unwrap()
}

pub fn random_unitary(rng: &mut StdRng, dim: usize) -> Operator {
    let cols = random_orthonormal_basis(rng, dim);
    Operator::from_rows((0..dim).map(|i| (0..dim).map(|j| cols[j][i]).collect()).collect()).unwrap()
}

/// Random scenario of dimension 2..=8 with `|⟨f|U|in⟩| ≥ 0.1`, a random
/// evolution half of the time, and a few random channels.
pub fn random_scenario(rng: &mut StdRng) -> Scenario {
    loop {
        let dim = rng.gen_range(2..=8);
        let pre = random_state(rng, dim);
        let post = random_state(rng, dim);
        let evolution = rng.gen_bool(0.5).then(|| random_unitary(rng, dim));
        let mut channels = ChannelTable::new();
        for k in 0..3 {
            channels.insert(format!("P{k}"), random_projector(rng, dim));
        }
        let s = Scenario::new("random", pre, post, evolution, channels).unwrap();
        if s.overlap().norm() >= 0.1 {
            return s;
        }
    }
}

/// Random computational-basis projector (random nonempty proper subset).
pub fn random_basis_projector(rng: &mut StdRng, dim: usize) -> Projector {
    loop {
        let idx: Vec<usize> = (0..dim).filter(|_| rng.gen_bool(0.5)).collect();
        if !idx.is_empty() && idx.len() < dim {
            return Projector::basis(dim, &idx).unwrap();
        }
    }
}

/// Closed-form postselected pointer moments for branch amplitudes `(α, β)`,
/// obtained from Gaussian overlap integrals:
/// with `k = exp(−g²/8σ²)`,
/// `N = |α|² + |β|² + 2 Re(ᾱβ) k`,
/// `⟨Q⟩ = g (|β|² + Re(ᾱβ) k) / N`,
/// `⟨P⟩ = g k Im(ᾱβ) / (2σ² N)`.
pub struct PointerOracle {
    pub mean_q: f64,
    pub mean_p: f64,
    pub norm: f64,
}

pub fn pointer_oracle(alpha: Amplitude, beta: Amplitude, sigma: f64, g: f64) -> PointerOracle {
    let k = (-g * g / (8.0 * sigma * sigma)).exp();
    let cross = alpha.conj() * beta;
    let norm = alpha.norm_sqr() + beta.norm_sqr() + 2.0 * cross.re * k;
    PointerOracle {
        mean_q: g * (beta.norm_sqr() + cross.re * k) / norm,
        mean_p: g * k * cross.im / (2.0 * sigma * sigma * norm),
        norm,
    }
}

/// Branch amplitudes computed directly from the scenario vectors, without
/// going through the meter module.
pub fn branches_by_hand(s: &Scenario, p: &Projector) -> (Amplitude, Amplitude) {
    let bra = s.effective_bra().amps();
    let ket = s.pre_state().amps();
    let dim = s.dim();
    let mut beta = ZERO;
    let mut total = ZERO;
    for i in 0..dim {
        total += bra[i].conj() * ket[i];
        for (j, k) in ket.iter().enumerate() {
            beta += bra[i].conj() * p.operator().get(i, j) * k;
        }
    }
    (total - beta, beta)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// The four printed forms of the Hardy preselected state, each evaluated in
/// detector coordinates (D, B per particle). Arm kets |N⟩, |I⟩ are mapped
/// through the single-particle beamsplitter; detector kets are unit vectors.
pub fn hardy_forms() -> [Vec<Amplitude>; 4] {
    let u = hardy_beamsplitter();
    let det = |k: usize| {
        let mut v = vec![ZERO; 2];
        v[k] = ONE;
        v
    };
    let arm = |k: usize| (0..2).map(|r| u.get(r, k)).collect::<Vec<_>>();
    let ket = |name: char| match name {
        'D' => det(0),
        'B' => det(1),
        'N' => arm(0),
        'I' => arm(1),
        _ => unreachable!(),
    };
    let pair = |p: char, e: char| -> Vec<Amplitude> {
        let (a, b) = (ket(p), ket(e));
        a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
    };
    let combo = |terms: &[(Amplitude, char, char)], norm: f64| -> Vec<Amplitude> {
        let mut out = vec![ZERO; 4];
        for (coef, p, e) in terms {
            for (o, v) in out.iter_mut().zip(pair(*p, *e)) {
                *o += coef * v / norm;
            }
        }
        out
    };
    let i = c(0.0, 1.0);
    let r2 = 2f64.sqrt();
    let (r3, r12) = (3f64.sqrt(), 12f64.sqrt());
    [
        combo(&[(ONE, 'N', 'N'), (i, 'I', 'N'), (i, 'N', 'I')], r3),
        combo(
            &[(-ONE, 'D', 'D'), (i, 'B', 'D'), (i, 'D', 'B'), (c(-3.0, 0.0), 'B', 'B')],
            r12,
        ),
        combo(&[(-i * r2, 'I', 'D'), (i, 'D', 'B'), (c(-3.0, 0.0), 'B', 'B')], r12),
        combo(&[(-i * r2, 'D', 'I'), (i, 'B', 'D'), (c(-3.0, 0.0), 'B', 'B')], r12),
    ]
}

pub fn max_diff(a: &[Amplitude], b: &[Amplitude]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Diagonal fixture on four basis states where `⟨f|k⟩⟨k|in⟩ ∝ x[k]`.
pub fn diagonal_scenario(x: [f64; 4]) -> Scenario {
    let pre = StateVector::normalized_from(labels(4), vec![ONE; 4]).unwrap();
    let post = StateVector::normalized_from(labels(4), x.iter().map(|v| c(*v, 0.0)).collect()).unwrap();
    let mut channels = ChannelTable::new();
    channels.insert("a".into(), Projector::basis(4, &[0, 1]).unwrap());
    channels.insert("b".into(), Projector::basis(4, &[0, 2]).unwrap());
    channels.insert("x".into(), Projector::basis(4, &[0]).unwrap());
    channels.insert("y".into(), Projector::basis(4, &[1]).unwrap());
    Scenario::new("diagonal", pre, post, None, channels).unwrap()
}
