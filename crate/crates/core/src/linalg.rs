//! Dense complex linear algebra over small Hilbert spaces.
//!
//! Everything here is sized for the handful of qubits the scenarios need
//! (dimension 8 or less), so operators are plain row-major `Vec`s.

use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex amplitude.
pub type Amplitude = Complex64;

/// Tolerance for structural checks (idempotence, hermiticity, commutation).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Tolerance for scalar comparisons between computed numbers.
pub const SCALAR_TOL: f64 = 1e-12;

/// Separator placed between factor labels by [`StateVector::tensor`].
pub const LABEL_SEPARATOR: &str = ".";

pub const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub const ONE: Amplitude = Complex64::new(1.0, 0.0);
pub const I: Amplitude = Complex64::new(0.0, 1.0);

/// Shorthand for building an amplitude.
pub fn c(re: f64, im: f64) -> Amplitude {
    Complex64::new(re, im)
}

/// A state vector over a labeled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Amplitude>,
    labels: Vec<String>,
    normalized: bool,
}

impl StateVector {
    /// Build a raw (not normalized) vector. Labels must be unique and match
    /// the amplitude count.
    pub fn new<S: Into<String>>(labels: Vec<S>, amps: Vec<Amplitude>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                left: labels.len(),
                right: amps.len(),
            });
        }
        if amps.is_empty() {
            return Err(Error::ZeroVector("empty state".into()));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        Ok(StateVector {
            amps,
            labels,
            normalized: false,
        })
    }

    /// Build and normalize in one step.
    pub fn normalized_from<S: Into<String>>(labels: Vec<S>, amps: Vec<Amplitude>) -> Result<Self> {
        StateVector::new(labels, amps)?.normalized()
    }

    /// Computational basis vector `|labels[index]⟩`.
    pub fn basis<S: Into<String>>(labels: Vec<S>, index: usize) -> Result<Self> {
        let n = labels.len();
        let mut amps = vec![ZERO; n];
        if index >= n {
            return Err(Error::DimensionMismatch {
                left: index,
                right: n,
            });
        }
        amps[index] = ONE;
        let mut v = StateVector::new(labels, amps)?;
        v.normalized = true;
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// True when the vector was produced by [`StateVector::normalized`] or is a basis vector.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector("state".into()));
        }
        Ok(StateVector {
            amps: self.amps.iter().map(|a| a / n).collect(),
            labels: self.labels.clone(),
            normalized: true,
        })
    }

    /// Same amplitudes expressed against a different label set.
    pub fn relabeled(&self, labels: &[String]) -> Result<Self> {
        let mut v = StateVector::new(labels.to_vec(), self.amps.clone())?;
        v.normalized = self.normalized;
        Ok(v)
    }

    /// Multiply every amplitude by `z`. A unit-modulus `z` keeps the normalized flag.
    pub fn scaled(&self, z: Amplitude) -> Self {
        StateVector {
            amps: self.amps.iter().map(|a| a * z).collect(),
            labels: self.labels.clone(),
            normalized: self.normalized && (z.norm() - 1.0).abs() <= SCALAR_TOL,
        }
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        if self.labels != other.labels {
            return Err(Error::LabelMismatch {
                left: self.labels.join(","),
                right: other.labels.join(","),
            });
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Amplitude> {
        self.check_compatible(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; labels are joined with [`LABEL_SEPARATOR`].
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        let mut labels = Vec::with_capacity(self.dim() * other.dim());
        for (a, la) in self.amps.iter().zip(&self.labels) {
            for (b, lb) in other.amps.iter().zip(&other.labels) {
                amps.push(a * b);
                labels.push(format!("{la}{LABEL_SEPARATOR}{lb}"));
            }
        }
        StateVector {
            amps,
            labels,
            normalized: self.normalized && other.normalized,
        }
    }

    /// Largest entrywise distance to `other` (labels ignored).
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `⟨u|v⟩` as a free function.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Amplitude> {
    u.inner(v)
}

/// A dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Amplitude>,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Operator::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = ONE;
        }
        op
    }

    pub fn from_rows(rows: Vec<Vec<Amplitude>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { left: 0, right: 1 });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            entries.extend(row);
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("operator entries"));
        }
        Ok(Operator { dim, entries })
    }

    /// Sum of `|k⟩⟨k|` over the given basis indices.
    pub fn basis_projector(dim: usize, indices: &[usize]) -> Result<Self> {
        let mut op = Operator::zeros(dim);
        for &k in indices {
            if k >= dim {
                return Err(Error::DimensionMismatch { left: k, right: dim });
            }
            op.entries[k * dim + k] = ONE;
        }
        Ok(op)
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &StateVector, v: &StateVector) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: v.dim(),
            });
        }
        let dim = u.dim();
        let mut entries = Vec::with_capacity(dim * dim);
        for a in u.amps() {
            for b in v.amps() {
                entries.push(a * b.conj());
            }
        }
        Ok(Operator { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Amplitude]> {
        self.entries.chunks(self.dim)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other,
            })
        } else {
            Ok(())
        }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim)?;
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim)?;
        Ok(Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_dim(other.dim)?;
        Ok(Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, z: Amplitude) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * z).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator {
        let n = self.dim;
        let mut out = Operator::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Operator) -> Operator {
        let (n, m) = (self.dim, other.dim);
        let dim = n * m;
        let mut out = Operator::zeros(dim);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * dim + (j * m + l)] = a * other.entries[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product. The result keeps the input labels and is
    /// flagged as not normalized.
    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_dim(v.dim())?;
        let n = self.dim;
        let amps = (0..n)
            .map(|i| {
                self.entries[i * n..(i + 1) * n]
                    .iter()
                    .zip(v.amps())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(StateVector {
            amps,
            labels: v.labels.clone(),
            normalized: false,
        })
    }

    /// `⟨bra|self|ket⟩`. Labels are not compared, only dimensions.
    pub fn matrix_element(&self, bra: &StateVector, ket: &StateVector) -> Result<Amplitude> {
        self.check_dim(bra.dim())?;
        let applied = self.apply(ket)?;
        Ok(bra
            .amps()
            .iter()
            .zip(applied.amps())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Operator, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        let Ok(sq) = self.compose(self) else {
            return false;
        };
        sq.approx_eq(self, tol) && self.adjoint().approx_eq(self, tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint()
            .compose(self)
            .map(|p| p.approx_eq(&Operator::identity(self.dim), tol))
            .unwrap_or(false)
    }

    pub fn commutes(&self, other: &Operator, tol: f64) -> bool {
        match (self.compose(other), other.compose(self)) {
            (Ok(ab), Ok(ba)) => ab.approx_eq(&ba, tol),
            _ => false,
        }
    }

    /// `self · other = 0` within `tol`.
    pub fn orthogonal(&self, other: &Operator, tol: f64) -> bool {
        self.compose(other)
            .map(|p| p.max_abs() <= tol)
            .unwrap_or(false)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{z}")).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

pub fn is_projector(p: &Operator, tol: f64) -> bool {
    p.is_projector(tol)
}

pub fn commutes(a: &Operator, b: &Operator, tol: f64) -> bool {
    a.commutes(b, tol)
}

pub fn orthogonal(p: &Operator, q: &Operator, tol: f64) -> bool {
    p.orthogonal(q, tol)
}

/// An operator verified to be an orthogonal projector.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(Operator);

impl Projector {
    /// Wrap `op` after checking `P² = P` and `P = P†` at [`STRUCTURAL_TOL`].
    pub fn new(op: Operator) -> Option<Self> {
        Projector::with_tolerance(op, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(op: Operator, tol: f64) -> Option<Self> {
        op.is_projector(tol).then_some(Projector(op))
    }

    pub fn identity(dim: usize) -> Self {
        Projector(Operator::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Projector(Operator::zeros(dim))
    }

    /// Projector onto a single normalized state.
    pub fn onto(v: &StateVector) -> Result<Self> {
        let v = v.normalized()?;
        Ok(Projector(Operator::outer(&v, &v)?))
    }

    pub fn basis(dim: usize, indices: &[usize]) -> Result<Self> {
        Ok(Projector(Operator::basis_projector(dim, indices)?))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `1 − P`.
    pub fn complement(&self) -> Projector {
        let id = Operator::identity(self.dim());
        Projector(id.sub(&self.0).expect("same dimension"))
    }

    /// `P ⊗ Q` is again a projector.
    pub fn tensor(&self, other: &Projector) -> Projector {
        Projector(self.0.tensor(&other.0))
    }

    pub fn rank(&self) -> f64 {
        self.0.trace().re
    }
}

impl AsRef<Operator> for Projector {
    fn as_ref(&self) -> &Operator {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus() -> StateVector {
        StateVector::normalized_from(vec!["L", "R"], vec![ONE, ONE]).unwrap()
    }

    fn ieigen() -> StateVector {
        StateVector::normalized_from(vec!["L", "R"], vec![ONE, I]).unwrap()
    }

    #[test]
    fn inner_of_normalized_is_one() {
        let v = ieigen();
        assert!((v.inner(&v).unwrap() - ONE).norm() < SCALAR_TOL);
    }

    #[test]
    fn two_particle_pigeonhole_overlap() {
        let inn = plus().tensor(&plus());
        let f = ieigen().tensor(&ieigen());
        // (1 − 1 − i − i)/4
        let z = f.inner(&inn).unwrap();
        assert!((z - c(0.0, -0.5)).norm() < SCALAR_TOL, "{z}");
    }

    #[test]
    fn three_box_overlap() {
        let labels = vec!["A", "B", "C"];
        let inn = StateVector::normalized_from(labels.clone(), vec![ONE, ONE, ONE]).unwrap();
        let f = StateVector::normalized_from(labels, vec![ONE, ONE, -ONE]).unwrap();
        let z = f.inner(&inn).unwrap();
        assert!((z - c(1.0 / 3.0, 0.0)).norm() < SCALAR_TOL);
    }

    #[test]
    fn inner_rejects_mismatched_bases() {
        let a = plus();
        let b = plus().tensor(&plus());
        assert!(matches!(a.inner(&b), Err(Error::DimensionMismatch { .. })));
        let other = StateVector::normalized_from(vec!["N", "I"], vec![ONE, ONE]).unwrap();
        assert!(matches!(a.inner(&other), Err(Error::LabelMismatch { .. })));
    }

    #[test]
    fn tensor_of_plus_states() {
        let v = plus().tensor(&plus());
        for a in v.amps() {
            assert!((a - c(0.5, 0.0)).norm() < SCALAR_TOL);
        }
        assert_eq!(v.labels(), ["L.L", "L.R", "R.L", "R.R"]);
    }

    #[test]
    fn tensor_identities_and_basis_projectors() {
        let id = Operator::identity(2).tensor(&Operator::identity(2));
        assert_eq!(id, Operator::identity(4));
        let pl = Operator::basis_projector(2, &[0]).unwrap();
        let pll = pl.tensor(&pl);
        assert_eq!(pll, Operator::basis_projector(4, &[0]).unwrap());
    }

    #[test]
    fn apply_projector_to_pigeonhole_state() {
        let inn = plus().tensor(&plus());
        let same = Operator::basis_projector(4, &[0, 3]).unwrap();
        assert_eq!(Operator::identity(4).apply(&inn).unwrap().amps(), inn.amps());
        let out = same.apply(&inn).unwrap();
        assert!(!out.is_normalized());
        assert!((out.norm() - 0.5f64.sqrt()).abs() < SCALAR_TOL);
        let same_state =
            StateVector::normalized_from(inn.labels().to_vec(), vec![ONE, ZERO, ZERO, ONE]).unwrap();
        assert!(out.normalized().unwrap().max_abs_diff(&same_state) < SCALAR_TOL);
    }

    #[test]
    fn apply_box_projector() {
        let inn = StateVector::normalized_from(vec!["A", "B", "C"], vec![ONE, ONE, ONE]).unwrap();
        let pa = Operator::basis_projector(3, &[0]).unwrap();
        let out = pa.apply(&inn).unwrap();
        let want = [c(1.0 / 3f64.sqrt(), 0.0), ZERO, ZERO];
        for (a, b) in out.amps().iter().zip(want) {
            assert!((a - b).norm() < SCALAR_TOL);
        }
    }

    #[test]
    fn same_pair_product_is_triple_same() {
        let pl = Operator::basis_projector(2, &[0]).unwrap();
        let pr = Operator::basis_projector(2, &[1]).unwrap();
        let id = Operator::identity(2);
        let same12 = pl.tensor(&pl).tensor(&id).add(&pr.tensor(&pr).tensor(&id)).unwrap();
        let same23 = id.tensor(&pl).tensor(&pl).add(&id.tensor(&pr).tensor(&pr)).unwrap();
        let triple = pl.tensor(&pl).tensor(&pl).add(&pr.tensor(&pr).tensor(&pr)).unwrap();
        assert!(same12.compose(&same23).unwrap().approx_eq(&triple, SCALAR_TOL));
        assert!(is_projector(&same12, STRUCTURAL_TOL));
        assert!(commutes(&same12, &same23, STRUCTURAL_TOL));
        let ll = pl.tensor(&pl);
        let rr = pr.tensor(&pr);
        assert!(orthogonal(&ll, &rr, STRUCTURAL_TOL));
        assert!(!orthogonal(&ll, &ll, STRUCTURAL_TOL));
    }

    #[test]
    fn add_zero_and_double_adjoint() {
        let p = Operator::basis_projector(3, &[1]).unwrap();
        assert_eq!(p.add(&Operator::zeros(3)).unwrap(), p);
        let a = Operator::from_rows(vec![vec![c(1.0, 2.0), c(0.0, -1.0)], vec![c(3.0, 0.5), c(-2.0, 0.0)]]).unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
        assert!(matches!(a.compose(&p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn non_projectors_are_rejected() {
        let a = Operator::identity(2).scale(c(2.0, 0.0));
        assert!(Projector::new(a).is_none());
        let shear = Operator::from_rows(vec![vec![ONE, ONE], vec![ZERO, ZERO]]).unwrap();
        // idempotent but not self-adjoint
        assert!(shear.compose(&shear).unwrap().approx_eq(&shear, 1e-15));
        assert!(Projector::new(shear).is_none());
    }

    #[test]
    fn state_construction_errors() {
        assert!(matches!(
            StateVector::new(vec!["a", "a"], vec![ONE, ONE]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            StateVector::normalized_from(vec!["a", "b"], vec![ZERO, ZERO]),
            Err(Error::ZeroVector(_))
        ));
        assert!(matches!(
            StateVector::new(vec!["a"], vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite(_))
        ));
    }
}
