//! Pre- and postselected scenarios: states, optional evolution, channels.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};

use crate::audit::AuditPair;
use crate::error::{Error, Result};
use crate::expr::ChannelTable;
use crate::linalg::{c, Amplitude, Operator, Projector, StateVector, I, ONE, STRUCTURAL_TOL, ZERO};

/// Names accepted by [`catalog`].
pub const CATALOG: [&str; 4] = ["pigeonhole2", "pigeonhole3", "three-box", "hardy"];

/// A validated pre/postselected scenario.
///
/// `pre_state` is expressed in the intermediate-time basis (`labels`).
/// `post_state` lives in the frame reached after `evolution`; without an
/// evolution both frames coincide and share labels.
#[derive(Debug, Clone)]
pub struct Scenario {
    name: String,
    pre: StateVector,
    post: StateVector,
    evolution: Option<Operator>,
    channels: ChannelTable,
    effective_bra: StateVector,
    overlap: Amplitude,
    audits: Vec<AuditPair>,
}

impl Scenario {
    pub fn new(
        name: impl Into<String>,
        pre: StateVector,
        post: StateVector,
        evolution: Option<Operator>,
        channels: ChannelTable,
    ) -> Result<Self> {
        let pre = pre.normalized().map_err(|_| Error::ZeroVector("pre-selected state".into()))?;
        let post = post.normalized().map_err(|_| Error::ZeroVector("post-selected state".into()))?;
        let dim = pre.dim();
        if post.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: post.dim(),
            });
        }
        if evolution.is_none() && post.labels() != pre.labels() {
            return Err(Error::LabelMismatch {
                left: pre.labels().join(","),
                right: post.labels().join(","),
            });
        }
        if let Some(u) = &evolution {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: u.dim(),
                });
            }
            if !u.is_unitary(STRUCTURAL_TOL) {
                return Err(Error::NotUnitary);
            }
        }
        for (name, p) in &channels {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
            if !p.operator().is_projector(STRUCTURAL_TOL) {
                return Err(Error::NotProjector(name.clone()));
            }
        }
        let bra = match &evolution {
            Some(u) => u.adjoint().apply(&post)?,
            None => post.clone(),
        };
        let effective_bra = bra.normalized()?.relabeled(pre.labels())?;
        let overlap = effective_bra.inner(&pre)?;
        Ok(Scenario {
            name: name.into(),
            pre,
            post,
            evolution,
            channels,
            effective_bra,
            overlap,
            audits: Vec::new(),
        })
    }

    /// Attach the default audit pairs run by `audit-all`.
    pub fn with_audits(mut self, audits: Vec<AuditPair>) -> Self {
        self.audits = audits;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    pub fn labels(&self) -> &[String] {
        self.pre.labels()
    }

    pub fn pre_state(&self) -> &StateVector {
        &self.pre
    }

    pub fn post_state(&self) -> &StateVector {
        &self.post
    }

    pub fn evolution(&self) -> Option<&Operator> {
        self.evolution.as_ref()
    }

    pub fn channels(&self) -> &ChannelTable {
        &self.channels
    }

    pub fn channel(&self, name: &str) -> Result<&Projector> {
        self.channels
            .get(name)
            .ok_or_else(|| Error::UnboundName(name.to_string()))
    }

    pub fn audits(&self) -> &[AuditPair] {
        &self.audits
    }

    /// `U†|f⟩`: the bra against which intermediate-time matrix elements are taken.
    pub fn effective_bra(&self) -> &StateVector {
        &self.effective_bra
    }

    /// `⟨f|U|in⟩`, recorded at validation.
    pub fn overlap(&self) -> Amplitude {
        self.overlap
    }

    /// `⟨f|U A|in⟩`.
    pub fn transition(&self, a: &Operator) -> Result<Amplitude> {
        a.matrix_element(&self.effective_bra, &self.pre)
    }

    /// Copy with the pre- and postselected states multiplied by unit phases.
    pub fn with_phases(&self, pre_phase: f64, post_phase: f64) -> Result<Scenario> {
        let pre = self.pre.scaled(Amplitude::from_polar(1.0, pre_phase));
        let post = self.post.scaled(Amplitude::from_polar(1.0, post_phase));
        Ok(Scenario::new(
            self.name.clone(),
            pre,
            post,
            self.evolution.clone(),
            self.channels.clone(),
        )?
        .with_audits(self.audits.clone()))
    }
}

/// `U†|f⟩` for a scenario.
pub fn effective_bra(s: &Scenario) -> StateVector {
    s.effective_bra().clone()
}

// ---------------------------------------------------------------------------
// File format

type RawAmp = [f64; 2];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    dim: usize,
    labels: Vec<String>,
    pre: Vec<RawAmp>,
    post: Vec<RawAmp>,
    #[serde(default)]
    evolution: Option<Vec<Vec<RawAmp>>>,
    channels: ChannelList,
    #[serde(default)]
    audits: Vec<AuditPair>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ChannelSpec {
    Basis { basis: Vec<String> },
    Matrix { matrix: Vec<Vec<RawAmp>> },
}

/// Channel map that keeps duplicate keys so they can be reported.
#[derive(Debug)]
struct ChannelList(Vec<(String, ChannelSpec)>);

impl<'de> Deserialize<'de> for ChannelList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ListVisitor;
        impl<'de> Visitor<'de> for ListVisitor {
            type Value = ChannelList;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of channel name to channel definition")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<ChannelList, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, ChannelSpec>()? {
                    out.push((k, v));
                }
                Ok(ChannelList(out))
            }
        }
        d.deserialize_map(ListVisitor)
    }
}

fn amps(raw: &[RawAmp]) -> Vec<Amplitude> {
    raw.iter().map(|[re, im]| c(*re, *im)).collect()
}

fn matrix(raw: &[Vec<RawAmp>], dim: usize, what: &str) -> Result<Operator> {
    if raw.len() != dim || raw.iter().any(|r| r.len() != dim) {
        return Err(Error::MalformedScenario(format!("{what} must be a {dim}x{dim} matrix")));
    }
    Operator::from_rows(raw.iter().map(|r| amps(r)).collect())
}

/// Parse and validate a JSON scenario document. Raw state amplitudes are
/// normalized on load.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedScenario(e.to_string()))?;
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::MalformedScenario("dim must be positive".into()));
    }
    if file.labels.len() != dim {
        return Err(Error::MalformedScenario(format!(
            "expected {dim} labels, found {}",
            file.labels.len()
        )));
    }
    for (what, v) in [("pre", &file.pre), ("post", &file.post)] {
        if v.len() != dim {
            return Err(Error::MalformedScenario(format!(
                "`{what}` has {} amplitudes, expected {dim}",
                v.len()
            )));
        }
    }
    let pre = StateVector::new(file.labels.clone(), amps(&file.pre))?;
    let post = StateVector::new(file.labels.clone(), amps(&file.post))?;
    let evolution = file
        .evolution
        .as_deref()
        .map(|m| matrix(m, dim, "`evolution`"))
        .transpose()?;

    let mut channels = ChannelTable::new();
    for (name, spec) in file.channels.0 {
        if channels.contains_key(&name) {
            return Err(Error::DuplicateChannel(name));
        }
        let op = match spec {
            ChannelSpec::Basis { basis } => {
                let mut idx = Vec::with_capacity(basis.len());
                for label in &basis {
                    let k = file.labels.iter().position(|l| l == label).ok_or_else(|| {
                        Error::MalformedScenario(format!("channel `{name}` names unknown label `{label}`"))
                    })?;
                    idx.push(k);
                }
                Operator::basis_projector(dim, &idx)?
            }
            ChannelSpec::Matrix { matrix: m } => matrix(&m, dim, &format!("channel `{name}`"))?,
        };
        let p = Projector::new(op).ok_or_else(|| Error::NotProjector(name.clone()))?;
        channels.insert(name, p);
    }
    Ok(Scenario::new(file.name, pre, post, evolution, channels)?.with_audits(file.audits))
}

// ---------------------------------------------------------------------------
// Built-in catalog

/// Look up a built-in scenario by name.
pub fn catalog(name: &str) -> Result<Scenario> {
    let s = match name {
        "pigeonhole2" => pigeonhole(2)?,
        "pigeonhole3" => pigeonhole(3)?,
        "three-box" => three_box()?,
        "hardy" => hardy()?,
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    Ok(s.with_audits(default_audits(name)?))
}

fn default_audits(name: &str) -> Result<Vec<AuditPair>> {
    let text = match name {
        "pigeonhole2" => include_str!("../data/audits/pigeonhole2.json"),
        "pigeonhole3" => include_str!("../data/audits/pigeonhole3.json"),
        "three-box" => include_str!("../data/audits/three-box.json"),
        "hardy" => include_str!("../data/audits/hardy.json"),
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    crate::audit::parse_audit_file(text)
}

fn qubit(labels: [&str; 2], amps: [Amplitude; 2]) -> Result<StateVector> {
    StateVector::normalized_from(labels.to_vec(), amps.to_vec())
}

fn tensor_all(states: &[StateVector]) -> StateVector {
    let (first, rest) = states.split_first().expect("at least one factor");
    rest.iter().fold(first.clone(), |acc, s| acc.tensor(s))
}

/// Embed a one-particle operator at `slot` of an `n`-particle qubit register.
fn embed(op: &Operator, slot: usize, n: usize) -> Operator {
    let id = Operator::identity(2);
    (0..n)
        .map(|k| if k == slot { op.clone() } else { id.clone() })
        .reduce(|acc, o| acc.tensor(&o))
        .expect("n > 0")
}

fn projector(op: Operator) -> Projector {
    Projector::new(op).expect("catalog channels are projectors")
}

fn pigeonhole(n: usize) -> Result<Scenario> {
    let mut pre = Vec::with_capacity(n);
    let mut post = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for k in 1..=n {
        let l = [format!("L{k}"), format!("R{k}")];
        let ls = [l[0].as_str(), l[1].as_str()];
        // |+⟩ = (|L⟩ + |R⟩)/√2, |i⟩ = (|L⟩ + i|R⟩)/√2
        pre.push(qubit(ls, [ONE, ONE])?);
        post.push(qubit(ls, [ONE, I])?);
        labels.push(l);
    }
    let pre = tensor_all(&pre);
    let post = tensor_all(&post);

    let left = Operator::basis_projector(2, &[0])?;
    let right = Operator::basis_projector(2, &[1])?;
    let mut channels = ChannelTable::new();
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    for (k, names) in labels.iter().enumerate() {
        let l = embed(&left, k, n);
        let r = embed(&right, k, n);
        channels.insert(names[0].clone(), projector(l.clone()));
        channels.insert(names[1].clone(), projector(r.clone()));
        lefts.push(l);
        rights.push(r);
    }
    for a in 0..n {
        for b in a + 1..n {
            let same = lefts[a].compose(&lefts[b])?.add(&rights[a].compose(&rights[b])?)?;
            let diff = lefts[a].compose(&rights[b])?.add(&rights[a].compose(&lefts[b])?)?;
            channels.insert(format!("same{}{}", a + 1, b + 1), projector(same));
            channels.insert(format!("diff{}{}", a + 1, b + 1), projector(diff));
        }
    }
    if n == 3 {
        let all_left = lefts.iter().skip(1).try_fold(lefts[0].clone(), |acc, p| acc.compose(p))?;
        let all_right = rights.iter().skip(1).try_fold(rights[0].clone(), |acc, p| acc.compose(p))?;
        channels.insert("same123".into(), projector(all_left.add(&all_right)?));
    }
    Scenario::new(format!("pigeonhole{n}"), pre, post, None, channels)
}

fn three_box() -> Result<Scenario> {
    let labels = vec!["A", "B", "C"];
    let pre = StateVector::normalized_from(labels.clone(), vec![ONE, ONE, ONE])?;
    let post = StateVector::normalized_from(labels, vec![ONE, ONE, -ONE])?;
    let mut channels = ChannelTable::new();
    for (k, name) in ["A", "B", "C"].into_iter().enumerate() {
        channels.insert(name.to_string(), Projector::basis(3, &[k])?);
    }
    Scenario::new("three-box", pre, post, None, channels)
}

/// Single-particle 50-50 beamsplitter taking the arm basis (N, I) to the
/// detector basis (D, B):
///
/// ```text
/// |N⟩ -> −(|D⟩ + i|B⟩)/√2
/// |I⟩ -> −(i|D⟩ + |B⟩)/√2
/// ```
///
/// The overall sign is fixed by requiring that the mixed arm/detector
/// rewrites of the Hardy state agree with the pure arm-basis form.
pub fn hardy_beamsplitter() -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_rows(vec![
        vec![c(-s, 0.0), c(0.0, -s)],
        vec![c(0.0, -s), c(-s, 0.0)],
    ])
    .expect("2x2")
}

/// Arm-basis labels (N, I) and detector-basis labels (D, B) for one particle.
pub fn hardy_labels(particle: char) -> ([String; 2], [String; 2]) {
    (
        [format!("N{particle}"), format!("I{particle}")],
        [format!("D{particle}"), format!("B{particle}")],
    )
}

fn hardy() -> Result<Scenario> {
    let (arm_p, det_p) = hardy_labels('p');
    let (arm_e, det_e) = hardy_labels('e');
    let unit = |labels: &[String; 2], k: usize| StateVector::basis(labels.to_vec(), k);
    let arm_basis = unit(&arm_p, 0)?.tensor(&unit(&arm_e, 0)?);
    // (|Np Ne⟩ + i|Ip Ne⟩ + i|Np Ie⟩)/√3, ordered Np.Ne, Np.Ie, Ip.Ne, Ip.Ie
    let pre = StateVector::normalized_from(arm_basis.labels().to_vec(), vec![ONE, I, I, ZERO])?;
    // |Dp De⟩
    let post = unit(&det_p, 0)?.tensor(&unit(&det_e, 0)?);
    let u = hardy_beamsplitter();
    let evolution = u.tensor(&u);

    let n = Operator::basis_projector(2, &[0])?;
    let i = Operator::basis_projector(2, &[1])?;
    let id = Operator::identity(2);
    let singles = [
        ("Np", n.tensor(&id)),
        ("Ip", i.tensor(&id)),
        ("Ne", id.tensor(&n)),
        ("Ie", id.tensor(&i)),
    ];
    let mut channels: ChannelTable = BTreeMap::new();
    for (name, op) in &singles {
        channels.insert(name.to_string(), projector(op.clone()));
    }
    for (pn, p) in [("Np", &n), ("Ip", &i)] {
        for (en, e) in [("Ne", &n), ("Ie", &i)] {
            channels.insert(format!("{pn}{en}"), projector(p.tensor(e)));
        }
    }
    Scenario::new("hardy", pre, post, Some(evolution), channels)
}
