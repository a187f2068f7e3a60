//! JSON certificates for colorings, spreads and packings.
//!
//! A certificate names its space through a [`SpaceDescriptor`], carries its object as
//! flat integer arrays, and states the verdicts the issuer computed. Verification
//! rebuilds the space from `(n, q)`, refuses to continue if the descriptor differs, and
//! recomputes every verdict from the payload alone.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coloring::checkers::{CompletenessChecker, OwnerSweep};
use crate::coloring::{is_proper, Color, Coloring};
use crate::geometry::{build_space_with_cap, GeometryError, LineId, SpaceDescriptor, SpaceModel};
use crate::packings::{check_packing, verify_packing_structure, CarrierPacking, Packing, PackingStructure5};
use crate::spreads::{check_spread, quotient_geometry, Spread};

pub const FORMAT: &str = "pgcolor-certificate";
pub const VERSION: u32 = 1;
/// Spaces up to this many lines can be rebuilt during verification.
pub const VERIFY_LINE_CAP: u128 = 20_000;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Format(String),
    #[error("space descriptor does not match PG({n},{q}) as rebuilt: {field} differs")]
    DescriptorMismatch { n: usize, q: usize, field: &'static str },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Coloring,
    Spread,
    Packing,
    PackingStructure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub space: SpaceDescriptor,
}

/// Verdicts recorded by the issuer. Fields that do not apply to a kind are omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub payload_sha256: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proper: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proper_violations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complete: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_pairs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub header: Header,
    pub kind: Kind,
    pub payload: BTreeMap<String, Vec<u64>>,
    pub verdicts: Verdicts,
    #[serde(default)]
    pub notes: Vec<String>,
}

/// Marks "no value" inside integer payload arrays.
pub const NONE: u64 = u64::MAX;

pub fn payload_hash(payload: &BTreeMap<String, Vec<u64>>) -> String {
    let mut h = Sha256::new();
    for (k, v) in payload {
        h.update((k.len() as u64).to_le_bytes());
        h.update(k.as_bytes());
        h.update((v.len() as u64).to_le_bytes());
        for x in v {
            h.update(x.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

impl Certificate {
    fn new(space: &SpaceModel, kind: Kind, payload: BTreeMap<String, Vec<u64>>, notes: Vec<String>) -> Self {
        let header = Header { format: FORMAT.into(), version: VERSION, space: space.descriptor() };
        let mut cert = Certificate { header, kind, payload, verdicts: Verdicts::default(), notes };
        cert.verdicts = compute_verdicts(space, &cert, &OwnerSweep).expect("issuer payload is well formed");
        cert
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CertError> {
        let cert: Certificate = serde_json::from_str(s)?;
        if cert.header.format != FORMAT {
            return Err(CertError::Format(format!("unknown format {:?}", cert.header.format)));
        }
        if cert.header.version != VERSION {
            return Err(CertError::Format(format!("unsupported version {}", cert.header.version)));
        }
        Ok(cert)
    }

    fn array(&self, key: &str) -> Result<&[u64], CertError> {
        self.payload.get(key).map(Vec::as_slice).ok_or_else(|| CertError::Format(format!("payload lacks {key:?}")))
    }
}

fn ids(v: &[LineId]) -> Vec<u64> {
    v.iter().map(|&x| x as u64).collect()
}

pub fn coloring_certificate(space: &SpaceModel, col: &Coloring, notes: Vec<String>) -> Certificate {
    let payload = BTreeMap::from([("colors".to_string(), col.assignment().iter().map(|&c| c as u64).collect())]);
    Certificate::new(space, Kind::Coloring, payload, notes)
}

pub fn spread_certificate(space: &SpaceModel, sp: &Spread, notes: Vec<String>) -> Certificate {
    assert_eq!(sp.t, 1, "certificates hold line spreads");
    let payload = BTreeMap::from([("lines".to_string(), ids(&sp.line_ids(space)))]);
    Certificate::new(space, Kind::Spread, payload, notes)
}

pub fn packing_certificate(space: &SpaceModel, p: &Packing, notes: Vec<String>) -> Certificate {
    let payload = BTreeMap::from([("spread_of_line".to_string(), ids(&p.line_to_spread))]);
    Certificate::new(space, Kind::Packing, payload, notes)
}

/// `family_of_line` is 0 on the base spread and `1 + j*(q^2+q) + (k-1)` on spread `k >= 1`
/// of the packing of carrier `j`. Verification locates each family by its carrier, so the
/// numbering of carriers is free.
pub fn structure_certificate(space: &SpaceModel, s: &PackingStructure5, notes: Vec<String>) -> Certificate {
    let q = space.q();
    let per = q * q + q;
    let mut family = vec![NONE; space.num_lines()];
    for l in s.base_spread.line_ids(space) {
        family[l] = 0;
    }
    for (j, cp) in s.carriers.iter().enumerate() {
        for (k, sp) in cp.packing.iter().enumerate().skip(1) {
            for &l in sp {
                family[l] = (1 + j * per + k - 1) as u64;
            }
        }
    }
    let payload = BTreeMap::from([("family_of_line".to_string(), family)]);
    Certificate::new(space, Kind::PackingStructure, payload, notes)
}

fn to_usize(v: &[u64], bound: usize, what: &str) -> Result<Vec<usize>, CertError> {
    v.iter()
        .map(|&x| if x < bound as u64 { Ok(x as usize) } else { Err(CertError::Format(format!("{what} {x} out of range"))) })
        .collect()
}

fn group(assignment: &[usize]) -> Vec<Vec<LineId>> {
    let n = assignment.iter().max().map_or(0, |m| m + 1);
    let mut out = vec![Vec::new(); n];
    for (l, &f) in assignment.iter().enumerate() {
        out[f].push(l);
    }
    out
}

fn compute_verdicts(space: &SpaceModel, cert: &Certificate, checker: &dyn CompletenessChecker) -> Result<Verdicts, CertError> {
    let n = space.num_lines();
    let mut v = Verdicts { payload_sha256: payload_hash(&cert.payload), ..Verdicts::default() };
    match cert.kind {
        Kind::Coloring => {
            let raw = cert.array("colors")?;
            if raw.len() != n {
                return Err(CertError::Format(format!("{} colors for {n} lines", raw.len())));
            }
            let colors: Vec<Color> = to_usize(raw, Color::MAX as usize, "color")?.into_iter().map(|c| c as Color).collect();
            let col = Coloring::new(space, colors).map_err(|e| CertError::Format(e.to_string()))?;
            let proper = is_proper(space, &col);
            let complete = checker.check(space, &col);
            v.colors = Some(col.k());
            v.proper = Some(proper.is_proper());
            v.proper_violations = Some(proper.total);
            v.complete = Some(complete.is_complete());
            v.missing_pairs = Some(complete.missing_total);
        }
        Kind::Spread => {
            let lines = to_usize(cert.array("lines")?, n, "line")?;
            let members: Vec<_> = lines.iter().map(|&l| space.line_subspace(l)).collect();
            v.partition = Some(check_spread(space, 1, &members).is_ok());
            v.parts = Some(lines.len());
        }
        Kind::Packing => {
            let of = to_usize(cert.array("spread_of_line")?, n, "spread index")?;
            if of.len() != n {
                return Err(CertError::Format(format!("{} entries for {n} lines", of.len())));
            }
            let spreads = group(&of);
            v.partition = Some(spreads.iter().all(|s| !s.is_empty()) && check_packing(space, &spreads).is_ok());
            v.parts = Some(spreads.len());
        }
        Kind::PackingStructure => {
            let raw = cert.array("family_of_line")?;
            if raw.len() != n {
                return Err(CertError::Format(format!("{} entries for {n} lines", raw.len())));
            }
            let families = to_usize(raw, n, "family")?;
            let groups = group(&families);
            v.parts = Some(groups.len());
            v.partition = Some(structure_holds(space, &groups));
        }
    }
    Ok(v)
}

/// Rebuilds a packing structure from the families of a certificate and checks it.
fn structure_holds(space: &SpaceModel, groups: &[Vec<LineId>]) -> bool {
    if space.dim() != 5 || groups.is_empty() {
        return false;
    }
    let Ok(base) = Spread::from_lines(space, &groups[0]) else { return false };
    let Ok(quotient) = quotient_geometry(space, &base) else { return false };
    let q = space.q();
    let per = q * q + q;
    if groups.len() != 1 + per * quotient.big_lines.len() {
        return false;
    }
    let base_lines = base.line_ids(space);
    let mut by_carrier: Vec<Vec<Vec<LineId>>> = vec![Vec::new(); quotient.big_lines.len()];
    for g in &groups[1..] {
        let Some(&first) = g.first() else { return false };
        let pts = space.line_points(first);
        match quotient.big_lines.iter().position(|bl| pts.iter().all(|&p| bl.carrier.contains_point(p))) {
            Some(j) => by_carrier[j].push(g.clone()),
            None => return false,
        }
    }
    if by_carrier.iter().any(|f| f.len() != per) {
        return false;
    }
    let carriers: Vec<CarrierPacking> = quotient
        .big_lines
        .iter()
        .zip(by_carrier)
        .map(|(bl, families)| {
            let mut induced: Vec<LineId> = bl.members.iter().map(|&m| base_lines[m]).collect();
            induced.sort_unstable();
            let mut packing = vec![induced.clone()];
            packing.extend(families);
            CarrierPacking { carrier: bl.carrier.clone(), induced, packing }
        })
        .collect();
    let s = PackingStructure5 { base_spread: base, quotient, carriers, search_nodes: 0 };
    verify_packing_structure(space, &s).is_ok()
}

/// Outcome of re-verifying a certificate whose space matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub recomputed: Verdicts,
    pub discrepancies: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Rebuilds PG(n,q) from the header and checks it against the stored descriptor.
pub fn rebuild_space(header: &Header) -> Result<SpaceModel, CertError> {
    let d = &header.space;
    let space = build_space_with_cap(d.n, d.q, VERIFY_LINE_CAP)?;
    let got = space.descriptor();
    let field = if got.p != d.p || got.e != d.e {
        "field"
    } else if got.irreducible != d.irreducible || got.modulus_base != d.modulus_base {
        "irreducible polynomial"
    } else if got.points != d.points || got.lines != d.lines {
        "point or line count"
    } else if got.line_table_sha256 != d.line_table_sha256 {
        "line table hash"
    } else {
        return Ok(space);
    };
    Err(CertError::DescriptorMismatch { n: d.n, q: d.q, field })
}

pub fn verify(cert: &Certificate) -> Result<VerifyReport, CertError> {
    verify_with(cert, &OwnerSweep)
}

pub fn verify_with(cert: &Certificate, checker: &dyn CompletenessChecker) -> Result<VerifyReport, CertError> {
    let space = rebuild_space(&cert.header)?;
    verify_in(&space, cert, checker)
}

/// Like [`verify_with`] for an already built space; the descriptor is still compared.
pub fn verify_in(space: &SpaceModel, cert: &Certificate, checker: &dyn CompletenessChecker) -> Result<VerifyReport, CertError> {
    if space.descriptor() != cert.header.space {
        return Err(CertError::DescriptorMismatch { n: cert.header.space.n, q: cert.header.space.q, field: "descriptor" });
    }
    let recomputed = compute_verdicts(space, cert, checker)?;
    let mut discrepancies = Vec::new();
    let c = &cert.verdicts;
    if c.payload_sha256 != recomputed.payload_sha256 {
        discrepancies.push(format!("payload hash: claimed {}, recomputed {}", c.payload_sha256, recomputed.payload_sha256));
    }
    let mut cmp = |name: &str, claimed: String, got: String| {
        if claimed != got {
            discrepancies.push(format!("{name}: claimed {claimed}, recomputed {got}"));
        }
    };
    cmp("colors", format!("{:?}", c.colors), format!("{:?}", recomputed.colors));
    cmp("proper", format!("{:?}", c.proper), format!("{:?}", recomputed.proper));
    cmp("proper_violations", format!("{:?}", c.proper_violations), format!("{:?}", recomputed.proper_violations));
    cmp("complete", format!("{:?}", c.complete), format!("{:?}", recomputed.complete));
    cmp("missing_pairs", format!("{:?}", c.missing_pairs), format!("{:?}", recomputed.missing_pairs));
    cmp("partition", format!("{:?}", c.partition), format!("{:?}", recomputed.partition));
    cmp("parts", format!("{:?}", c.parts), format!("{:?}", recomputed.parts));
    Ok(VerifyReport { recomputed, discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_space;
    use crate::packings::{packing_containing_spread, DEFAULT_BUDGET};
    use crate::spreads::geometric_spread;

    #[test]
    fn coloring_round_trip() {
        let s = build_space(3, 2).unwrap();
        let cert = coloring_certificate(&s, &Coloring::discrete(&s), vec!["all distinct".into()]);
        assert_eq!(cert.verdicts.colors, Some(35));
        assert_eq!(cert.verdicts.proper, Some(true));
        assert_eq!(cert.verdicts.complete, Some(false));
        let back = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(back, cert);
        assert!(verify(&back).unwrap().ok());
    }

    #[test]
    fn tampering_is_reported() {
        let s = build_space(3, 2).unwrap();
        let mut cert = coloring_certificate(&s, &Coloring::constant(&s), vec![]);
        cert.payload.get_mut("colors").unwrap()[0] = 2;
        let r = verify(&cert).unwrap();
        assert!(!r.ok());
        assert!(r.discrepancies[0].starts_with("payload hash"));

        let mut cert = coloring_certificate(&s, &Coloring::constant(&s), vec![]);
        cert.header.space.line_table_sha256 = "00".into();
        assert!(matches!(verify(&cert), Err(CertError::DescriptorMismatch { field: "line table hash", .. })));
    }

    #[test]
    fn spread_and_packing() {
        let s = build_space(3, 2).unwrap();
        let sp = geometric_spread(&s, 1).unwrap();
        let cert = spread_certificate(&s, &sp, vec![]);
        assert_eq!((cert.verdicts.partition, cert.verdicts.parts), (Some(true), Some(5)));
        let p = packing_containing_spread(&s, &sp, DEFAULT_BUDGET).unwrap();
        let cert = packing_certificate(&s, &p, vec![]);
        assert_eq!((cert.verdicts.partition, cert.verdicts.parts), (Some(true), Some(7)));
        assert!(verify(&cert).unwrap().ok());
    }

    #[test]
    fn structure_of_pg52() {
        let s = build_space(5, 2).unwrap();
        let st = crate::packings::build_packing_structure5(&s, DEFAULT_BUDGET).unwrap();
        let cert = structure_certificate(&s, &st, vec![]);
        assert_eq!((cert.verdicts.partition, cert.verdicts.parts), (Some(true), Some(127)));
        let mut bad = cert.clone();
        let fam = bad.payload.get_mut("family_of_line").unwrap();
        let (a, b) = (fam.iter().position(|&f| f == 1).unwrap(), fam.iter().position(|&f| f == 2).unwrap());
        fam.swap(a, b);
        let r = verify(&bad).unwrap();
        assert_eq!(r.recomputed.partition, Some(false));
    }

    #[test]
    fn bad_payload_is_a_format_error() {
        let s = build_space(2, 2).unwrap();
        let mut cert = coloring_certificate(&s, &Coloring::constant(&s), vec![]);
        cert.payload.get_mut("colors").unwrap().pop();
        assert!(matches!(verify(&cert), Err(CertError::Format(_))));
        assert!(matches!(Certificate::from_json("{}"), Err(CertError::Json(_))));
    }
}
