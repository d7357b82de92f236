//! Presentations of closed oriented 3-manifolds and the conversions between
//! them: framed surgery links, lens spaces and their surgery chains,
//! connected sums, cell decompositions, and bare homology data.
//!
//! Every presentation lowers to the data the invariants need: a homology
//! profile always, a torsion linking form when the presentation determines
//! one, a surgery link and a cell complex when available. The linking form
//! of a surgery link is minus the inverse linking matrix transported to
//! chain generators of the cokernel; orientation conventions are fixed so
//! that surgery on a single `-p`-framed unknot is the lens space L(p, 1).

use crate::linalg::{smith_normal_form, unimodular_inverse, IntegerMatrix};
use crate::topology::{homology_from_complex, HomologyProfile, LinkingForm, TopologyError};
use crate::tv::{
    lens_complex, rp3_heegaard_complex, s1xs2_complex, sphere_complex, CellComplex, TvError,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{Map, Value};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ManifoldError {
    #[error("at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("lens parameters must satisfy p >= 1 and gcd(p, q) = 1")]
    InvalidLens,
    #[error("surgery matrix must be square and symmetric")]
    InvalidSurgeryMatrix,
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Complex(#[from] TvError),
}

fn schema(pointer: impl Into<String>, message: impl Into<String>) -> ManifoldError {
    ManifoldError::Schema { pointer: pointer.into(), message: message.into() }
}

/// Sign of the framing on a blow-up component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlowupSign {
    Plus,
    Minus,
}

/// A framed link in S^3, recorded by its symmetric integer linking matrix
/// (framings on the diagonal). The empty link presents S^3 itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurgeryLink {
    matrix: IntegerMatrix,
}

impl SurgeryLink {
    pub fn new(matrix: IntegerMatrix) -> Result<Self, ManifoldError> {
        if !matrix.is_square() || !matrix.is_symmetric() {
            return Err(ManifoldError::InvalidSurgeryMatrix);
        }
        Ok(SurgeryLink { matrix })
    }

    pub fn empty() -> Self {
        SurgeryLink { matrix: IntegerMatrix::zeros(0, 0) }
    }

    pub fn matrix(&self) -> &IntegerMatrix {
        &self.matrix
    }

    pub fn components(&self) -> usize {
        self.matrix.rows()
    }

    /// Adds an unknotted, unlinked component with framing +-1. The surgered
    /// manifold is unchanged; only the presentation grows.
    pub fn blow_up(&self, sign: BlowupSign) -> SurgeryLink {
        let framing = match sign {
            BlowupSign::Plus => 1,
            BlowupSign::Minus => -1,
        };
        SurgeryLink {
            matrix: self.matrix.block_diagonal(&IntegerMatrix::from_rows(&[vec![framing]])),
        }
    }

    /// Signature data (positive, negative, zero eigenvalue counts) of the
    /// linking matrix.
    pub fn signature(&self) -> (usize, usize, usize) {
        crate::linalg::signature(&self.matrix).expect("linking matrix is square and symmetric")
    }

    /// First homology of the surgered manifold, the cokernel of the linking
    /// matrix.
    pub fn homology(&self) -> HomologyProfile {
        let snf = smith_normal_form(&self.matrix);
        HomologyProfile::from_snf_divisors(self.components() - snf.rank, &snf.d[..snf.rank])
    }
}

/// Homology profile and torsion linking form of the surgered manifold.
///
/// With `U L V = D` the chain generators are the classes of the columns of
/// `U^-1`, and the form on them is `-[(U^-1)^T V]_{ji} / d_i` mod 1. Errors
/// when a chain generator fails the unit self-linking assumption, which the
/// downstream phase sums rely on.
pub fn from_surgery(link: &SurgeryLink) -> Result<(HomologyProfile, LinkingForm), ManifoldError> {
    let snf = smith_normal_form(&link.matrix);
    let profile = HomologyProfile::from_snf_divisors(
        link.components() - snf.rank,
        &snf.d[..snf.rank],
    );
    let u_inv = unimodular_inverse(&snf.u).expect("row transform is unimodular");
    // m[i][j] = [(U^-1)^T V]_{ij}; row a of the form uses denominator d_a,
    // so entry (a, b) is -m[b][a] mod d_a.
    let m = u_inv.transpose().mul(&snf.v);
    let torsion_idx: Vec<usize> =
        (0..snf.rank).filter(|&i| snf.d[i] > BigInt::one()).collect();
    let divisors: Vec<BigInt> = torsion_idx.iter().map(|&i| snf.d[i].clone()).collect();
    let d = torsion_idx.len();
    let mut q = IntegerMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let num = (-m.get(torsion_idx[b], torsion_idx[a])).mod_floor(&divisors[a]);
            q.set(a, b, num);
        }
    }
    let form = LinkingForm::new(divisors, q)?;
    Ok((profile, form))
}

/// Homology and linking form of the lens space L(p, q): torsion Z_p with
/// self-linking q* / p, where q q* = 1 mod p. Requires p >= 1 and
/// gcd(p, q) = 1; L(1, q) is S^3.
pub fn lens_space(p: i64, q: i64) -> Result<(HomologyProfile, LinkingForm), ManifoldError> {
    let (p, q) = validate_lens(p, q)?;
    if p == 1 {
        return Ok((HomologyProfile::trivial(), LinkingForm::empty()));
    }
    let p_big = BigInt::from(p);
    let ext = BigInt::from(q).extended_gcd(&p_big);
    debug_assert!(ext.gcd.is_one());
    let q_star = ext.x.mod_floor(&p_big);
    let profile = HomologyProfile::new(0, vec![p_big.clone()])?;
    let form = LinkingForm::new(vec![p_big], IntegerMatrix::diagonal(&[q_star]))?;
    Ok((profile, form))
}

fn validate_lens(p: i64, q: i64) -> Result<(u64, u64), ManifoldError> {
    if p < 1 {
        return Err(ManifoldError::InvalidLens);
    }
    let q = q.mod_floor(&p);
    if p.gcd(&q) != 1 {
        return Err(ManifoldError::InvalidLens);
    }
    Ok((p as u64, q as u64))
}

/// Surgery presentation of L(p, q) as a chain of unknots: framings from the
/// ceiling continued fraction p/q = a1 - 1/(a2 - 1/(...)), with -1 linking
/// between consecutive components. L(1, q) gets the empty link.
pub fn lens_chain(p: i64, q: i64) -> Result<SurgeryLink, ManifoldError> {
    let (p, q) = validate_lens(p, q)?;
    if p == 1 {
        return Ok(SurgeryLink::empty());
    }
    let mut coefficients: Vec<i64> = Vec::new();
    let (mut p, mut q) = (p, q);
    while q > 0 {
        let a = p.div_ceil(q);
        coefficients.push(a as i64);
        let next = a * q - p;
        p = q;
        q = next;
    }
    let n = coefficients.len();
    let mut rows = vec![vec![0i64; n]; n];
    for (i, &a) in coefficients.iter().enumerate() {
        rows[i][i] = a;
        if i + 1 < n {
            rows[i][i + 1] = -1;
            rows[i + 1][i] = -1;
        }
    }
    SurgeryLink::new(IntegerMatrix::from_rows(&rows))
}

/// Profile of a connected sum: b1 adds, torsion divisor chains merge through
/// the Smith form of their block sum.
pub fn profile_sum(parts: &[HomologyProfile]) -> HomologyProfile {
    let b1 = parts.iter().map(|p| p.b1()).sum();
    let all: Vec<BigInt> =
        parts.iter().flat_map(|p| p.torsion().iter().cloned()).collect();
    let snf = smith_normal_form(&IntegerMatrix::diagonal(&all));
    HomologyProfile::from_snf_divisors(b1, &snf.d[..snf.rank])
}

/// Connected sum of presentations carrying linking forms: the orthogonal sum
/// of the forms, renormalized onto chain generators of the merged torsion
/// group. The same `U^-1` column trick as in surgery transport carries the
/// block form to the new generators.
pub fn connected_sum(
    parts: &[(HomologyProfile, LinkingForm)],
) -> Result<(HomologyProfile, LinkingForm), ManifoldError> {
    let b1 = parts.iter().map(|(p, _)| p.b1()).sum();
    let mut all: Vec<BigInt> = Vec::new();
    let mut blocks: Vec<(usize, &LinkingForm)> = Vec::new();
    for (profile, form) in parts {
        debug_assert_eq!(profile.torsion(), form.torsion());
        blocks.push((all.len(), form));
        all.extend(form.torsion().iter().cloned());
    }
    let total = all.len();
    if total == 0 {
        return Ok((HomologyProfile::new(b1, Vec::new())?, LinkingForm::empty()));
    }

    let mut q_rat = vec![vec![BigRational::zero(); total]; total];
    for (offset, form) in &blocks {
        for i in 0..form.rank() {
            for j in 0..form.rank() {
                q_rat[offset + i][offset + j] = form.entry(i, j);
            }
        }
    }

    let snf = smith_normal_form(&IntegerMatrix::diagonal(&all));
    debug_assert_eq!(snf.rank, total);
    let u_inv = unimodular_inverse(&snf.u).expect("row transform is unimodular");

    let kept: Vec<usize> = (0..total).filter(|&i| snf.d[i] > BigInt::one()).collect();
    let divisors: Vec<BigInt> = kept.iter().map(|&i| snf.d[i].clone()).collect();
    let d = kept.len();
    let mut q = IntegerMatrix::zeros(d, d);
    for (a, &ka) in kept.iter().enumerate() {
        for (b, &kb) in kept.iter().enumerate() {
            let mut value = BigRational::zero();
            for i in 0..total {
                let left = u_inv.get(i, ka);
                if left.is_zero() {
                    continue;
                }
                for j in 0..total {
                    let right = u_inv.get(j, kb);
                    if right.is_zero() {
                        continue;
                    }
                    value += BigRational::from(left * right) * &q_rat[i][j];
                }
            }
            let scaled = value * BigRational::from(divisors[a].clone());
            assert!(
                scaled.is_integer(),
                "renormalized numerator must clear its denominator"
            );
            q.set(a, b, scaled.to_integer().mod_floor(&divisors[a]));
        }
    }
    let profile = HomologyProfile::new(b1, divisors.clone())?;
    let form = LinkingForm::new(divisors, q)?;
    Ok((profile, form))
}

/// A closed oriented 3-manifold, in whichever presentation the caller
/// supplied. Lowering methods expose the data each invariant needs; `None`
/// means the presentation does not carry that data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ManifoldPresentation {
    Sphere,
    S1xS2,
    Lens { p: u64, q: u64 },
    Surgery { link: SurgeryLink },
    Homology { profile: HomologyProfile, form: Option<LinkingForm> },
    Cells { complex: CellComplex },
    ConnectedSum { parts: Vec<ManifoldPresentation> },
}

impl ManifoldPresentation {
    /// Validated lens-space presentation; q is normalized into [0, p).
    pub fn lens(p: i64, q: i64) -> Result<Self, ManifoldError> {
        let (p, q) = validate_lens(p, q)?;
        Ok(ManifoldPresentation::Lens { p, q })
    }

    /// First homology, available for every presentation.
    pub fn profile(&self) -> HomologyProfile {
        match self {
            ManifoldPresentation::Sphere => HomologyProfile::trivial(),
            ManifoldPresentation::S1xS2 => {
                HomologyProfile::new(1, Vec::new()).expect("no torsion")
            }
            ManifoldPresentation::Lens { p, .. } => {
                if *p == 1 {
                    HomologyProfile::trivial()
                } else {
                    HomologyProfile::new(0, vec![BigInt::from(*p)]).expect("single divisor")
                }
            }
            ManifoldPresentation::Surgery { link } => link.homology(),
            ManifoldPresentation::Homology { profile, .. } => profile.clone(),
            ManifoldPresentation::Cells { complex } => homology_from_complex(complex),
            ManifoldPresentation::ConnectedSum { parts } => {
                let profiles: Vec<HomologyProfile> =
                    parts.iter().map(|p| p.profile()).collect();
                profile_sum(&profiles)
            }
        }
    }

    /// Torsion linking form when the presentation determines one. `Ok(None)`
    /// means the data is genuinely absent (cell decompositions, homology
    /// presentations without a form); `Err` means the presentation violates
    /// an assumption the form relies on.
    pub fn linking_form(&self) -> Result<Option<LinkingForm>, ManifoldError> {
        match self {
            ManifoldPresentation::Sphere | ManifoldPresentation::S1xS2 => {
                Ok(Some(LinkingForm::empty()))
            }
            ManifoldPresentation::Lens { p, q } => {
                lens_space(*p as i64, *q as i64).map(|(_, form)| Some(form))
            }
            ManifoldPresentation::Surgery { link } => {
                from_surgery(link).map(|(_, form)| Some(form))
            }
            ManifoldPresentation::Homology { profile, form } => {
                if let Some(form) = form {
                    debug_assert_eq!(profile.torsion(), form.torsion());
                }
                Ok(form.clone())
            }
            ManifoldPresentation::Cells { .. } => Ok(None),
            ManifoldPresentation::ConnectedSum { parts } => {
                let mut pairs = Vec::with_capacity(parts.len());
                for part in parts {
                    match part.linking_form()? {
                        Some(form) => pairs.push((part.profile(), form)),
                        None => return Ok(None),
                    }
                }
                connected_sum(&pairs).map(|(_, form)| Some(form))
            }
        }
    }

    /// Surgery presentation when one is available.
    pub fn surgery_link(&self) -> Option<SurgeryLink> {
        match self {
            ManifoldPresentation::Sphere => Some(SurgeryLink::empty()),
            ManifoldPresentation::S1xS2 => {
                Some(SurgeryLink::new(IntegerMatrix::from_rows(&[vec![0]])).expect("symmetric"))
            }
            ManifoldPresentation::Lens { p, q } => {
                Some(lens_chain(*p as i64, *q as i64).expect("validated lens parameters"))
            }
            ManifoldPresentation::Surgery { link } => Some(link.clone()),
            ManifoldPresentation::Homology { .. } | ManifoldPresentation::Cells { .. } => None,
            ManifoldPresentation::ConnectedSum { parts } => {
                let mut matrix = IntegerMatrix::zeros(0, 0);
                for part in parts {
                    matrix = matrix.block_diagonal(part.surgery_link()?.matrix());
                }
                Some(SurgeryLink::new(matrix).expect("block sum of symmetric matrices"))
            }
        }
    }

    /// Cell decomposition when one is available.
    pub fn cell_complex(&self) -> Option<CellComplex> {
        match self {
            ManifoldPresentation::Sphere => Some(sphere_complex()),
            ManifoldPresentation::S1xS2 => Some(s1xs2_complex()),
            ManifoldPresentation::Lens { p, .. } => Some(lens_complex(*p)),
            ManifoldPresentation::Cells { complex } => Some(complex.clone()),
            _ => None,
        }
    }
}

/// Shorthand names accepted wherever a manifold is expected. `Ok(None)`
/// means the string is not a recognized name.
pub fn resolve_named(name: &str) -> Result<Option<ManifoldPresentation>, ManifoldError> {
    let name = name.trim();
    match name {
        "s3" => return Ok(Some(ManifoldPresentation::Sphere)),
        "s1xs2" => return Ok(Some(ManifoldPresentation::S1xS2)),
        "rp3" => return Ok(Some(ManifoldPresentation::lens(2, 1)?)),
        "rp3-heegaard" => {
            return Ok(Some(ManifoldPresentation::Cells { complex: rp3_heegaard_complex() }))
        }
        _ => {}
    }
    if let Some(inner) = name.strip_prefix("lens(").and_then(|s| s.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        let parse = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| schema("", "named manifold syntax is lens(p,q) with integers"))
        };
        if let [p, q] = parts[..] {
            return Ok(Some(ManifoldPresentation::lens(parse(p)?, parse(q)?)?));
        }
        return Err(schema("", "named manifold syntax is lens(p,q) with integers"));
    }
    Ok(None)
}

/// Parses a manifold presentation from its JSON description. Shape errors
/// report a JSON pointer to the offending element; domain violations
/// surface as the corresponding topology errors.
pub fn parse_manifold(text: &str) -> Result<ManifoldPresentation, ManifoldError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_value(&value, "")
}

fn parse_value(value: &Value, ptr: &str) -> Result<ManifoldPresentation, ManifoldError> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema(ptr, "expected an object"))?;
    let kind = obj
        .get("type")
        .ok_or_else(|| schema(format!("{ptr}/type"), "missing required field"))?
        .as_str()
        .ok_or_else(|| schema(format!("{ptr}/type"), "expected a string"))?;
    match kind {
        "s3" => {
            check_keys(obj, &["type"], ptr)?;
            Ok(ManifoldPresentation::Sphere)
        }
        "s1xs2" => {
            check_keys(obj, &["type"], ptr)?;
            Ok(ManifoldPresentation::S1xS2)
        }
        "lens" => {
            check_keys(obj, &["type", "p", "q"], ptr)?;
            let p = require_integer(obj, "p", ptr)?;
            let q = require_integer(obj, "q", ptr)?;
            ManifoldPresentation::lens(p, q)
        }
        "surgery" => {
            check_keys(obj, &["type", "matrix"], ptr)?;
            let matrix = parse_matrix(require_field(obj, "matrix", ptr)?, &field_ptr(ptr, "matrix"))?;
            let link = SurgeryLink::new(matrix)?;
            Ok(ManifoldPresentation::Surgery { link })
        }
        "homology" => {
            check_keys(obj, &["type", "b1", "torsion", "q_matrix"], ptr)?;
            let b1 = require_integer(obj, "b1", ptr)?;
            if b1 < 0 {
                return Err(schema(field_ptr(ptr, "b1"), "expected a nonnegative integer"));
            }
            let torsion_ptr = field_ptr(ptr, "torsion");
            let torsion_val = require_field(obj, "torsion", ptr)?
                .as_array()
                .ok_or_else(|| schema(torsion_ptr.as_str(), "expected an array of integers"))?;
            let mut torsion = Vec::with_capacity(torsion_val.len());
            for (i, entry) in torsion_val.iter().enumerate() {
                let n = entry
                    .as_i64()
                    .ok_or_else(|| schema(format!("{torsion_ptr}/{i}"), "expected an integer"))?;
                torsion.push(BigInt::from(n));
            }
            let profile = HomologyProfile::new(b1 as usize, torsion.clone())?;
            let form = match obj.get("q_matrix") {
                Some(v) => {
                    let q = parse_matrix(v, &field_ptr(ptr, "q_matrix"))?;
                    Some(LinkingForm::new(torsion, q)?)
                }
                None if torsion_val.is_empty() => Some(LinkingForm::empty()),
                None => None,
            };
            Ok(ManifoldPresentation::Homology { profile, form })
        }
        "cells" => {
            check_keys(obj, &["type", "boundary1", "boundary2", "boundary3"], ptr)?;
            let d1 =
                parse_matrix(require_field(obj, "boundary1", ptr)?, &field_ptr(ptr, "boundary1"))?;
            let d2 =
                parse_matrix(require_field(obj, "boundary2", ptr)?, &field_ptr(ptr, "boundary2"))?;
            let d3 =
                parse_matrix(require_field(obj, "boundary3", ptr)?, &field_ptr(ptr, "boundary3"))?;
            let complex = CellComplex::new(d1, d2, d3)?;
            Ok(ManifoldPresentation::Cells { complex })
        }
        "connected_sum" => {
            check_keys(obj, &["type", "parts"], ptr)?;
            let parts_ptr = field_ptr(ptr, "parts");
            let parts_val = require_field(obj, "parts", ptr)?
                .as_array()
                .ok_or_else(|| schema(parts_ptr.as_str(), "expected an array of manifolds"))?;
            let mut parts = Vec::with_capacity(parts_val.len());
            for (i, part) in parts_val.iter().enumerate() {
                parts.push(parse_value(part, &format!("{parts_ptr}/{i}"))?);
            }
            Ok(ManifoldPresentation::ConnectedSum { parts })
        }
        other => Err(schema(
            field_ptr(ptr, "type"),
            format!(
                "unknown manifold type {other:?}; expected one of s3, s1xs2, lens, \
                 surgery, homology, cells, connected_sum"
            ),
        )),
    }
}

fn field_ptr(ptr: &str, key: &str) -> String {
    format!("{ptr}/{key}")
}

fn require_field<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    ptr: &str,
) -> Result<&'a Value, ManifoldError> {
    obj.get(key)
        .ok_or_else(|| schema(field_ptr(ptr, key), "missing required field"))
}

fn require_integer(
    obj: &Map<String, Value>,
    key: &str,
    ptr: &str,
) -> Result<i64, ManifoldError> {
    require_field(obj, key, ptr)?
        .as_i64()
        .ok_or_else(|| schema(field_ptr(ptr, key), "expected an integer"))
}

fn check_keys(
    obj: &Map<String, Value>,
    allowed: &[&str],
    ptr: &str,
) -> Result<(), ManifoldError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(schema(field_ptr(ptr, key), "unexpected field"));
        }
    }
    Ok(())
}

fn parse_matrix(value: &Value, ptr: &str) -> Result<IntegerMatrix, ManifoldError> {
    let rows_val = value
        .as_array()
        .ok_or_else(|| schema(ptr, "expected an array of rows"))?;
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(rows_val.len());
    for (i, row) in rows_val.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| schema(format!("{ptr}/{i}"), "expected an array of integers"))?;
        if i > 0 && row.len() != rows[0].len() {
            return Err(schema(format!("{ptr}/{i}"), "row width differs from the first row"));
        }
        let mut out = Vec::with_capacity(row.len());
        for (j, entry) in row.iter().enumerate() {
            let n = entry.as_i64().ok_or_else(|| {
                schema(
                    format!("{ptr}/{i}/{j}"),
                    "expected an integer within the signed 64-bit range",
                )
            })?;
            out.push(n);
        }
        rows.push(out);
    }
    Ok(IntegerMatrix::from_rows(&rows))
}

/// JSON number carrying an arbitrary-precision decimal integer.
pub(crate) fn number_from_bigint(value: &BigInt) -> Value {
    Value::Number(
        serde_json::Number::from_str(&value.to_string()).expect("decimal integer literal"),
    )
}

pub(crate) fn matrix_to_json(matrix: &IntegerMatrix) -> Value {
    Value::Array(
        (0..matrix.rows())
            .map(|i| {
                Value::Array(
                    (0..matrix.cols()).map(|j| number_from_bigint(matrix.get(i, j))).collect(),
                )
            })
            .collect(),
    )
}

/// Canonical JSON form of a presentation; `parse_manifold` of the rendered
/// text reproduces the presentation exactly.
pub fn serialize_manifold(manifold: &ManifoldPresentation) -> Value {
    let mut obj = Map::new();
    match manifold {
        ManifoldPresentation::Sphere => {
            obj.insert("type".into(), Value::String("s3".into()));
        }
        ManifoldPresentation::S1xS2 => {
            obj.insert("type".into(), Value::String("s1xs2".into()));
        }
        ManifoldPresentation::Lens { p, q } => {
            obj.insert("type".into(), Value::String("lens".into()));
            obj.insert("p".into(), Value::from(*p));
            obj.insert("q".into(), Value::from(*q));
        }
        ManifoldPresentation::Surgery { link } => {
            obj.insert("type".into(), Value::String("surgery".into()));
            obj.insert("matrix".into(), matrix_to_json(link.matrix()));
        }
        ManifoldPresentation::Homology { profile, form } => {
            obj.insert("type".into(), Value::String("homology".into()));
            obj.insert("b1".into(), Value::from(profile.b1() as u64));
            obj.insert(
                "torsion".into(),
                Value::Array(profile.torsion().iter().map(number_from_bigint).collect()),
            );
            if let Some(form) = form {
                if form.rank() > 0 {
                    obj.insert("q_matrix".into(), matrix_to_json(form.numerators()));
                }
            }
        }
        ManifoldPresentation::Cells { complex } => {
            obj.insert("type".into(), Value::String("cells".into()));
            obj.insert("boundary1".into(), matrix_to_json(complex.boundary1()));
            obj.insert("boundary2".into(), matrix_to_json(complex.boundary2()));
            obj.insert("boundary3".into(), matrix_to_json(complex.boundary3()));
        }
        ManifoldPresentation::ConnectedSum { parts } => {
            obj.insert("type".into(), Value::String("connected_sum".into()));
            obj.insert(
                "parts".into(),
                Value::Array(parts.iter().map(serialize_manifold).collect()),
            );
        }
    }
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn bis(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| bi(x)).collect()
    }

    fn numerator(form: &LinkingForm, i: usize, j: usize) -> i64 {
        form.numerators().get(i, j).to_i64().unwrap()
    }

    /// Whether two self-linking numerators over Z_p differ by a unit square,
    /// the generator-change ambiguity of a rank-one form.
    fn same_square_class(p: i64, a: i64, b: i64) -> bool {
        (1..p)
            .filter(|c| c.gcd(&p) == 1)
            .any(|c| (a * c * c).mod_floor(&p) == b.mod_floor(&p))
    }

    #[test]
    fn lens_space_inverts_q() {
        let (profile, form) = lens_space(5, 2).unwrap();
        assert_eq!(profile.torsion(), &bis(&[5])[..]);
        assert_eq!(numerator(&form, 0, 0), 3);
        let (_, form) = lens_space(7, 10).unwrap();
        assert_eq!(numerator(&form, 0, 0), 5);
        let (profile, form) = lens_space(1, 0).unwrap();
        assert_eq!(profile, HomologyProfile::trivial());
        assert_eq!(form.rank(), 0);
        let (_, form) = lens_space(2, 1).unwrap();
        assert_eq!(numerator(&form, 0, 0), 1);
    }

    #[test]
    fn lens_space_rejects_bad_parameters() {
        assert_eq!(lens_space(4, 2).unwrap_err(), ManifoldError::InvalidLens);
        assert_eq!(lens_space(0, 1).unwrap_err(), ManifoldError::InvalidLens);
        assert_eq!(lens_space(-3, 1).unwrap_err(), ManifoldError::InvalidLens);
    }

    #[test]
    fn lens_chain_continued_fraction() {
        let link = lens_chain(5, 2).unwrap();
        assert_eq!(
            link.matrix(),
            &IntegerMatrix::from_rows(&[vec![3, -1], vec![-1, 2]])
        );
        let link = lens_chain(3, 1).unwrap();
        assert_eq!(link.matrix(), &IntegerMatrix::from_rows(&[vec![3]]));
        let link = lens_chain(7, 3).unwrap();
        assert_eq!(
            link.matrix(),
            &IntegerMatrix::from_rows(&[vec![3, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]])
        );
        assert_eq!(link.matrix().determinant(), bi(7));
        assert_eq!(lens_chain(1, 0).unwrap(), SurgeryLink::empty());
    }

    #[test]
    fn chain_surgery_reproduces_lens_data_up_to_sign() {
        // The chain presentation fixes one orientation, the direct form the
        // other convention; they agree up to an overall sign mod 1 (plus the
        // usual generator-change square).
        for p in 2i64..=20 {
            for q in 1..p {
                if p.gcd(&q) != 1 {
                    continue;
                }
                let link = lens_chain(p, q).unwrap();
                let (profile, form) = from_surgery(&link).unwrap();
                assert_eq!(profile.torsion(), &[bi(p)][..], "L({p},{q})");
                assert_eq!(profile.b1(), 0);
                let (direct_profile, direct) = lens_space(p, q).unwrap();
                assert_eq!(profile, direct_profile);
                let chain_num = numerator(&form, 0, 0);
                let direct_num = numerator(&direct, 0, 0);
                assert!(
                    same_square_class(p, chain_num, direct_num)
                        || same_square_class(p, chain_num, -direct_num),
                    "L({p},{q}): chain gives {chain_num} vs direct {direct_num}"
                );
            }
        }
    }

    #[test]
    fn negative_framing_gives_lens_p_1_exactly() {
        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![-5]])).unwrap();
        let (profile, form) = from_surgery(&link).unwrap();
        assert_eq!(profile.torsion(), &bis(&[5])[..]);
        let (_, direct) = lens_space(5, 1).unwrap();
        assert_eq!(form, direct);
    }

    #[test]
    fn surgery_homology_profiles() {
        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![0]])).unwrap();
        let profile = link.homology();
        assert_eq!((profile.b1(), profile.torsion()), (1, &[][..]));

        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 3]])).unwrap();
        let profile = link.homology();
        assert_eq!((profile.b1(), profile.torsion()), (0, &bis(&[6])[..]));

        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![4, 0], vec![0, 0]])).unwrap();
        let profile = link.homology();
        assert_eq!((profile.b1(), profile.torsion()), (1, &bis(&[4])[..]));

        assert_eq!(from_surgery(&SurgeryLink::empty()).unwrap().0, HomologyProfile::trivial());
    }

    #[test]
    fn surgery_rejects_violating_self_linking() {
        // Hyperbolic Z_2 x Z_2 pairing: both self-linkings vanish.
        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![0, 2], vec![2, 0]])).unwrap();
        assert_eq!(
            from_surgery(&link).unwrap_err(),
            ManifoldError::Topology(TopologyError::DiagonalNotUnit)
        );
        // The profile alone is still available.
        assert_eq!(link.homology().torsion(), &bis(&[2, 2])[..]);
    }

    #[test]
    fn surgery_link_validation_and_blowup() {
        assert_eq!(
            SurgeryLink::new(IntegerMatrix::from_rows(&[vec![1, 2], vec![3, 4]])).unwrap_err(),
            ManifoldError::InvalidSurgeryMatrix
        );
        assert_eq!(
            SurgeryLink::new(IntegerMatrix::zeros(2, 3)).unwrap_err(),
            ManifoldError::InvalidSurgeryMatrix
        );
        let link = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![2]])).unwrap();
        let up = link.blow_up(BlowupSign::Plus);
        assert_eq!(up.components(), 2);
        assert_eq!(up.signature(), (2, 0, 0));
        let down = link.blow_up(BlowupSign::Minus);
        assert_eq!(down.signature(), (1, 1, 0));
        // Blowing up does not change the surgered manifold's linking data.
        assert_eq!(from_surgery(&up).unwrap(), from_surgery(&link).unwrap());
        assert_eq!(from_surgery(&down).unwrap(), from_surgery(&link).unwrap());
    }

    #[test]
    fn connected_sum_of_coprime_lens_spaces() {
        let parts = vec![lens_space(2, 1).unwrap(), lens_space(3, 1).unwrap()];
        let (profile, form) = connected_sum(&parts).unwrap();
        assert_eq!(profile.torsion(), &bis(&[6])[..]);
        assert!(same_square_class(6, numerator(&form, 0, 0), 5));
    }

    #[test]
    fn connected_sum_of_equal_lens_spaces() {
        let parts = vec![lens_space(2, 1).unwrap(), lens_space(2, 1).unwrap()];
        let (profile, form) = connected_sum(&parts).unwrap();
        assert_eq!(profile.torsion(), &bis(&[2, 2])[..]);
        assert_eq!(form.numerators(), &IntegerMatrix::identity(2));
    }

    #[test]
    fn profile_sum_merges_chains() {
        let a = HomologyProfile::new(1, bis(&[2, 4])).unwrap();
        let b = HomologyProfile::new(0, bis(&[3])).unwrap();
        let merged = profile_sum(&[a, b]);
        assert_eq!(merged.b1(), 1);
        assert_eq!(merged.torsion(), &bis(&[2, 12])[..]);
    }

    #[test]
    fn presentation_lowering_matrix() {
        let rp3_routes = [
            ManifoldPresentation::lens(2, 1).unwrap(),
            ManifoldPresentation::Surgery {
                link: SurgeryLink::new(IntegerMatrix::from_rows(&[vec![2]])).unwrap(),
            },
            ManifoldPresentation::Cells { complex: rp3_heegaard_complex() },
        ];
        for m in &rp3_routes {
            let profile = m.profile();
            assert_eq!((profile.b1(), profile.torsion()), (0, &bis(&[2])[..]));
        }
        assert!(rp3_routes[0].linking_form().unwrap().is_some());
        assert!(rp3_routes[1].linking_form().unwrap().is_some());
        assert_eq!(rp3_routes[2].linking_form().unwrap(), None);
        assert!(rp3_routes[0].surgery_link().is_some());
        assert_eq!(rp3_routes[2].surgery_link(), None);
        assert!(rp3_routes[0].cell_complex().is_some());
        assert_eq!(rp3_routes[1].cell_complex(), None);

        let sum = ManifoldPresentation::ConnectedSum {
            parts: vec![rp3_routes[0].clone(), ManifoldPresentation::lens(3, 1).unwrap()],
        };
        let profile = sum.profile();
        assert_eq!(profile.torsion(), &bis(&[6])[..]);
        let link = sum.surgery_link().unwrap();
        assert_eq!(link.components(), 2);
        assert!(sum.linking_form().unwrap().is_some());

        let sum_with_cells = ManifoldPresentation::ConnectedSum {
            parts: vec![rp3_routes[2].clone(), rp3_routes[0].clone()],
        };
        assert_eq!(sum_with_cells.linking_form().unwrap(), None);
        assert_eq!(sum_with_cells.surgery_link(), None);
        assert_eq!(sum_with_cells.profile().torsion(), &bis(&[2, 2])[..]);
    }

    #[test]
    fn named_manifolds_resolve() {
        assert_eq!(resolve_named("s3").unwrap(), Some(ManifoldPresentation::Sphere));
        assert_eq!(resolve_named("s1xs2").unwrap(), Some(ManifoldPresentation::S1xS2));
        assert_eq!(
            resolve_named("rp3").unwrap(),
            Some(ManifoldPresentation::Lens { p: 2, q: 1 })
        );
        assert_eq!(
            resolve_named("lens(12,5)").unwrap(),
            Some(ManifoldPresentation::Lens { p: 12, q: 5 })
        );
        assert_eq!(
            resolve_named("lens( 7 , 10 )").unwrap(),
            Some(ManifoldPresentation::Lens { p: 7, q: 3 })
        );
        assert!(matches!(
            resolve_named("rp3-heegaard").unwrap(),
            Some(ManifoldPresentation::Cells { .. })
        ));
        assert_eq!(resolve_named("torus-bundle").unwrap(), None);
        assert_eq!(resolve_named("lens(4,2)").unwrap_err(), ManifoldError::InvalidLens);
        assert!(matches!(
            resolve_named("lens(4)").unwrap_err(),
            ManifoldError::Schema { .. }
        ));
    }

    #[test]
    fn parse_and_serialize_round_trip() {
        let cases = [
            r#"{"type":"s3"}"#.to_string(),
            r#"{"type":"s1xs2"}"#.to_string(),
            r#"{"type":"lens","p":5,"q":2}"#.to_string(),
            r#"{"type":"surgery","matrix":[[3,-1],[-1,2]]}"#.to_string(),
            r#"{"type":"homology","b1":1,"torsion":[2,4],"q_matrix":[[1,1],[2,1]]}"#.to_string(),
            r#"{"type":"homology","b1":0,"torsion":[]}"#.to_string(),
            r#"{"type":"homology","b1":2,"torsion":[3]}"#.to_string(),
            r#"{"type":"cells","boundary1":[[0]],"boundary2":[[1,-1]],"boundary3":[[1,-1],[1,-1]]}"#
                .to_string(),
            r#"{"type":"connected_sum","parts":[{"type":"lens","p":2,"q":1},{"type":"lens","p":3,"q":1}]}"#
                .to_string(),
        ];
        for text in &cases {
            let parsed = parse_manifold(text).unwrap_or_else(|e| panic!("{text}: {e}"));
            let rendered = serde_json::to_string(&serialize_manifold(&parsed)).unwrap();
            let reparsed = parse_manifold(&rendered).unwrap();
            assert_eq!(parsed, reparsed, "{text}");
        }
    }

    #[test]
    fn parse_errors_carry_pointers() {
        let pointer = |text: &str| match parse_manifold(text).unwrap_err() {
            ManifoldError::Schema { pointer, .. } => pointer,
            other => panic!("expected schema error, got {other:?}"),
        };
        assert_eq!(pointer(r#"{"type":"lens","p":5}"#), "/q");
        assert_eq!(pointer(r#"{"type":"warp"}"#), "/type");
        assert_eq!(pointer(r#"{"p":5}"#), "/type");
        assert_eq!(pointer(r#"[1,2]"#), "");
        assert_eq!(pointer(r#"{"type":"surgery","matrix":[[1,0],[1]]}"#), "/matrix/1");
        assert_eq!(pointer(r#"{"type":"surgery","matrix":[[1,0],[0,0.5]]}"#), "/matrix/1/1");
        assert_eq!(pointer(r#"{"type":"lens","p":5,"q":2,"r":1}"#), "/r");
        assert_eq!(
            pointer(r#"{"type":"connected_sum","parts":[{"type":"lens","p":3}]}"#),
            "/parts/0/q"
        );
        assert_eq!(pointer("not json at all"), "");
    }

    #[test]
    fn parse_reports_domain_violations() {
        assert_eq!(
            parse_manifold(r#"{"type":"lens","p":4,"q":2}"#).unwrap_err(),
            ManifoldError::InvalidLens
        );
        assert_eq!(
            parse_manifold(r#"{"type":"surgery","matrix":[[1,2],[3,4]]}"#).unwrap_err(),
            ManifoldError::InvalidSurgeryMatrix
        );
        assert_eq!(
            parse_manifold(r#"{"type":"homology","b1":0,"torsion":[3,2]}"#).unwrap_err(),
            ManifoldError::Topology(TopologyError::InvalidTorsionChain)
        );
        assert_eq!(
            parse_manifold(r#"{"type":"homology","b1":0,"torsion":[4],"q_matrix":[[2]]}"#)
                .unwrap_err(),
            ManifoldError::Topology(TopologyError::DiagonalNotUnit)
        );
        assert!(matches!(
            parse_manifold(
                r#"{"type":"cells","boundary1":[[0],[0]],"boundary2":[[]],"boundary3":[]}"#
            )
            .unwrap_err(),
            ManifoldError::Complex(TvError::Disconnected)
        ));
    }

    #[test]
    fn homology_without_form_lowers_partially() {
        let m = parse_manifold(r#"{"type":"homology","b1":0,"torsion":[4]}"#).unwrap();
        assert_eq!(m.profile().torsion(), &bis(&[4])[..]);
        assert_eq!(m.linking_form().unwrap(), None);
        let m = parse_manifold(r#"{"type":"homology","b1":3,"torsion":[]}"#).unwrap();
        assert_eq!(m.linking_form().unwrap(), Some(LinkingForm::empty()));
    }
}
