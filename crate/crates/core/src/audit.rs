//! Logic audits of projector weak values.
//!
//! For two channels `a`, `b` the audit weakly measures `a`, `b` and their
//! combination (`a + b` for orthogonal channels, read as OR; `a·b` for
//! commuting channels, read as AND) on the same ensemble, and checks
//! whether the three presence/absence verdicts obey ordinary logic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::evaluate_projector;
use crate::linalg::{Amplitude, Projector, STRUCTURAL_TOL};
use crate::scenario::Scenario;
use crate::strong::{born_prob, collapse, cond_prob_post};
use crate::weak::{weak_value, WeakValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditKind {
    Sum,
    Product,
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuditKind::Sum => "sum",
            AuditKind::Product => "product",
        })
    }
}

/// Two channel expressions and how to combine them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditPair {
    pub a: String,
    pub b: String,
    pub kind: AuditKind,
}

impl AuditPair {
    pub fn new(a: &str, b: &str, kind: AuditKind) -> Self {
        AuditPair {
            a: a.to_string(),
            b: b.to_string(),
            kind,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AuditFile {
    pairs: Vec<AuditPair>,
}

/// Parse an audit-pair file: `{"pairs": [{"a": .., "b": .., "kind": "sum"|"product"}]}`.
pub fn parse_audit_file(text: &str) -> Result<Vec<AuditPair>> {
    serde_json::from_str::<AuditFile>(text)
        .map(|f| f.pairs)
        .map_err(|e| Error::MalformedScenario(format!("audit pairs: {e}")))
}

/// Zero-pattern classes for `(a_w, b_w, (a+b)_w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumCase {
    /// All three vanish.
    I,
    /// None vanishes.
    II,
    /// `a_w`, `b_w` nonzero but `(a+b)_w = 0`.
    III,
    /// Exactly one of `a_w`, `b_w` vanishes; the sum then follows by linearity.
    Degenerate,
}

/// Zero-pattern classes for `(a_w, b_w, (ab)_w)`. Mirrors swap `a` and `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductCase {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VMirror,
    VIMirror,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Sum(SumCase),
    Product(ProductCase),
}

impl Case {
    pub fn label(&self) -> &'static str {
        match self {
            Case::Sum(SumCase::I) => "I",
            Case::Sum(SumCase::II) => "II",
            Case::Sum(SumCase::III) => "III",
            Case::Sum(SumCase::Degenerate) => "I/II-degenerate",
            Case::Product(ProductCase::I) => "i",
            Case::Product(ProductCase::II) => "ii",
            Case::Product(ProductCase::III) => "iii",
            Case::Product(ProductCase::IV) => "iv",
            Case::Product(ProductCase::V) => "v",
            Case::Product(ProductCase::VI) => "vi",
            Case::Product(ProductCase::VMirror) => "v_mirror",
            Case::Product(ProductCase::VIMirror) => "vi_mirror",
        }
    }

    pub fn is_consistent(&self) -> bool {
        !matches!(
            self,
            Case::Sum(SumCase::III)
                | Case::Product(ProductCase::III)
                | Case::Product(ProductCase::IV)
                | Case::Product(ProductCase::VI)
                | Case::Product(ProductCase::VIMirror)
        )
    }

    pub fn narrative(&self) -> &'static str {
        match self {
            Case::Sum(SumCase::I) => {
                "no meter fires: the system was in neither channel, nor in their union; consistent"
            }
            Case::Sum(SumCase::II) => {
                "all three meters fire: presence in a, in b and in (a OR b) agree; consistent"
            }
            Case::Sum(SumCase::III) => {
                "the meters for a and b fire with cancelling readings while the (a OR b) meter stays silent: \
                 present in each channel yet absent from their union, all on one undisturbed ensemble; inconsistent"
            }
            Case::Sum(SumCase::Degenerate) => {
                "exactly one of a, b fires and (a OR b) follows it by linearity; consistent"
            }
            Case::Product(ProductCase::I) => {
                "no meter fires: absent from a, from b and from (a AND b); consistent"
            }
            Case::Product(ProductCase::II) => {
                "all three meters fire: present in a, in b and in (a AND b); consistent"
            }
            Case::Product(ProductCase::III) => {
                "a and b each register presence but (a AND b) registers absence, \
                 so by ordinary logic the system was NOT in a OR NOT in b; inconsistent"
            }
            Case::Product(ProductCase::IV) => {
                "neither a nor b registers presence yet (a AND b) does; inconsistent"
            }
            Case::Product(ProductCase::V) => {
                "present in a, absent from b and hence absent from (a AND b); consistent"
            }
            Case::Product(ProductCase::VI) => {
                "present in a, absent from b, yet present in (a AND b); inconsistent"
            }
            Case::Product(ProductCase::VMirror) => {
                "present in b, absent from a and hence absent from (a AND b); consistent"
            }
            Case::Product(ProductCase::VIMirror) => {
                "present in b, absent from a, yet present in (a AND b); inconsistent"
            }
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Sum(_) => write!(f, "Case {}", self.label()),
            Case::Product(_) => write!(f, "case {}", self.label()),
        }
    }
}

fn pattern_string(a: bool, b: bool, ab: bool) -> String {
    let s = |nz: bool| if nz { "≠0" } else { "0" };
    format!("{}, {}, {}", s(a), s(b), s(ab))
}

/// Map a sum zero-pattern (true = nonzero) onto its case. Patterns that
/// contradict `(a+b)_w = a_w + b_w` are errors.
pub fn sum_case(a: bool, b: bool, sum: bool) -> Result<SumCase> {
    match (a, b, sum) {
        (false, false, false) => Ok(SumCase::I),
        (true, true, true) => Ok(SumCase::II),
        (true, true, false) => Ok(SumCase::III),
        (true, false, true) | (false, true, true) => Ok(SumCase::Degenerate),
        _ => Err(Error::ImpossiblePattern(pattern_string(a, b, sum))),
    }
}

/// Map a product zero-pattern (true = nonzero) onto its case. Total.
pub fn product_case(a: bool, b: bool, ab: bool) -> ProductCase {
    match (a, b, ab) {
        (false, false, false) => ProductCase::I,
        (true, true, true) => ProductCase::II,
        (true, true, false) => ProductCase::III,
        (false, false, true) => ProductCase::IV,
        (true, false, false) => ProductCase::V,
        (true, false, true) => ProductCase::VI,
        (false, true, false) => ProductCase::VMirror,
        (false, true, true) => ProductCase::VIMirror,
    }
}

/// Strong-measurement numbers for the same three projectors. Each comes from
/// a different intermediate measurement and hence a different sample space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongContrast {
    pub born: [f64; 3],
    pub cond_post: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditVerdict {
    pub kind: AuditKind,
    pub case: Case,
    pub consistent: bool,
    /// Weak values of `a`, `b` and the combination, in that order.
    pub weak_values: [WeakValue; 3],
    pub strong: StrongContrast,
    pub narrative: String,
}

fn strong_contrast(s: &Scenario, ops: [&Projector; 3]) -> Result<StrongContrast> {
    let mut born = [0.0; 3];
    let mut cond_post = [0.0; 3];
    for (k, p) in ops.iter().enumerate() {
        born[k] = born_prob(s.pre_state(), p)?;
        cond_post[k] = cond_prob_post(s, p)?;
    }
    Ok(StrongContrast { born, cond_post })
}

fn verdict(
    s: &Scenario,
    kind: AuditKind,
    ops: [&Projector; 3],
    case_of: impl FnOnce(bool, bool, bool) -> Result<Case>,
) -> Result<AuditVerdict> {
    let weak_values = [
        weak_value(s, ops[0].operator())?,
        weak_value(s, ops[1].operator())?,
        weak_value(s, ops[2].operator())?,
    ];
    let case = case_of(
        !weak_values[0].is_zero,
        !weak_values[1].is_zero,
        !weak_values[2].is_zero,
    )?;
    Ok(AuditVerdict {
        kind,
        case,
        consistent: case.is_consistent(),
        weak_values,
        strong: strong_contrast(s, ops)?,
        narrative: case.narrative().to_string(),
    })
}

fn classify_sum_named(s: &Scenario, pa: &Projector, pb: &Projector, names: (&str, &str)) -> Result<AuditVerdict> {
    if !pa.operator().orthogonal(pb.operator(), STRUCTURAL_TOL) {
        return Err(Error::NonOrthogonal(names.0.into(), names.1.into()));
    }
    let sum = Projector::new(pa.operator().add(pb.operator())?)
        .ok_or_else(|| Error::NonOrthogonal(names.0.into(), names.1.into()))?;
    verdict(s, AuditKind::Sum, [pa, pb, &sum], |a, b, ab| {
        sum_case(a, b, ab).map(Case::Sum)
    })
}

fn classify_product_named(
    s: &Scenario,
    pa: &Projector,
    pb: &Projector,
    names: (&str, &str),
) -> Result<AuditVerdict> {
    if !pa.operator().commutes(pb.operator(), STRUCTURAL_TOL) {
        return Err(Error::NonCommuting(names.0.into(), names.1.into()));
    }
    let prod = pa.operator().compose(pb.operator())?;
    if prod.max_abs() <= STRUCTURAL_TOL {
        return Err(Error::ZeroProduct(names.0.into(), names.1.into()));
    }
    let prod = Projector::new(prod).ok_or_else(|| Error::NonCommuting(names.0.into(), names.1.into()))?;
    verdict(s, AuditKind::Product, [pa, pb, &prod], |a, b, ab| {
        Ok(Case::Product(product_case(a, b, ab)))
    })
}

/// Audit `a OR b` as `Pa + Pb`. The projectors must be orthogonal.
pub fn classify_sum(s: &Scenario, pa: &Projector, pb: &Projector) -> Result<AuditVerdict> {
    classify_sum_named(s, pa, pb, ("a", "b"))
}

/// Audit `a AND b` as `Pa·Pb`. The projectors must commute and their
/// product must not be the zero operator.
pub fn classify_product(s: &Scenario, pa: &Projector, pb: &Projector) -> Result<AuditVerdict> {
    classify_product_named(s, pa, pb, ("a", "b"))
}

/// Parse both expressions over the scenario's channels and audit them.
pub fn classify_exprs(s: &Scenario, pair: &AuditPair) -> Result<AuditVerdict> {
    let pa = evaluate_projector(&pair.a, s.channels())?;
    let pb = evaluate_projector(&pair.b, s.channels())?;
    let names = (pair.a.trim(), pair.b.trim());
    match pair.kind {
        AuditKind::Sum => classify_sum_named(s, &pa, &pb, names),
        AuditKind::Product => classify_product_named(s, &pa, &pb, names),
    }
}

/// True when collapsing `|in⟩` onto `pa` and onto `pb` gives different
/// states, i.e. the two strong measurements prepare different ensembles.
pub fn distinct_collapses(s: &Scenario, pa: &Projector, pb: &Projector) -> Result<bool> {
    let a = collapse(s.pre_state(), pa)?;
    let b = collapse(s.pre_state(), pb)?;
    Ok(a.state.max_abs_diff(&b.state) > STRUCTURAL_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub pair: AuditPair,
    pub outcome: Result<AuditVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub scenario: String,
    pub dim: usize,
    /// `⟨f|U|in⟩`.
    pub overlap: Amplitude,
    pub channels: Vec<String>,
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn verdicts(&self) -> impl Iterator<Item = &AuditVerdict> {
        self.entries.iter().filter_map(|e| e.outcome.as_ref().ok())
    }

    pub fn errors(&self) -> impl Iterator<Item = (&AuditPair, &Error)> {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().err().map(|err| (&e.pair, err)))
    }
}

/// Audit every pair; failures are recorded per entry and do not stop the run.
pub fn audit_all(s: &Scenario, pairs: &[AuditPair]) -> AuditReport {
    AuditReport {
        scenario: s.name().to_string(),
        dim: s.dim(),
        overlap: s.overlap(),
        channels: s.channels().keys().cloned().collect(),
        entries: pairs
            .iter()
            .map(|pair| AuditEntry {
                pair: pair.clone(),
                outcome: classify_exprs(s, pair),
            })
            .collect(),
    }
}
