//! Marked isometries between lattice models and the certificates that
//! record them.
//!
//! By the symplectic Torelli theorem for log Calabi-Yau surfaces, two
//! pairs whose marked homology data (intersection form, boundary divisor
//! classes, symplectic class) are related by an integral isometry are
//! symplectomorphic as pairs. The certificate records that isometry and
//! every check performed on it.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::format::write_lattice;
use crate::homology::{LatticeModel, MarkedClass};
use crate::linalg::{self, IntMatrix};

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A candidate isometry: `matrix` sends source coordinates to target
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedClassMap {
    pub source: LatticeModel,
    pub target: LatticeModel,
    pub matrix: IntMatrix,
}

pub const CHECK_NAMES: [&str; 5] = [
    "c1_mapped",
    "divisors_mapped",
    "gram_preserved",
    "integral",
    "omega_mapped",
];

pub const PROVENANCE: [&str; 5] = [
    "symplectic Torelli theorem for log Calabi-Yau surfaces: an integral isometry carrying divisor classes and the symplectic class across determines the pair up to symplectomorphism",
    "hypothesis recorded, not checked: boundary components are symplectically orthogonal, as in every toric model",
    "direction: omega is checked in the direction of the integral map, its real extension is taken the same way",
    "area convention: the exceptional class from a ball of capacity c has area c, no factor of pi",
    "scope: the symplectomorphism itself (Moser flows, isotopies near the boundary) is cited, not constructed",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryCertificate {
    pub checks: BTreeMap<String, bool>,
    pub matrix: IntMatrix,
    pub source_digest: String,
    pub target_digest: String,
    pub provenance: Vec<String>,
    /// Hash of the scenario this certificate was produced for, if any.
    pub scenario_digest: Option<String>,
    /// Further notes tied into the digest.
    pub bindings: BTreeMap<String, String>,
}

impl IsometryCertificate {
    pub fn is_valid(&self) -> bool {
        !self.checks.is_empty() && self.checks.values().all(|&ok| ok)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, ok)| !**ok)
            .map(|(k, _)| k.as_str())
            .collect()
    }

    pub fn bind(&mut self, key: &str, value: impl Into<String>) {
        self.bindings.insert(key.to_string(), value.into());
    }

    fn fields(&self) -> BTreeMap<String, String> {
        let mut f = BTreeMap::new();
        for (k, ok) in &self.checks {
            f.insert(
                format!("check.{k}"),
                if *ok { "pass" } else { "fail" }.to_string(),
            );
        }
        f.insert("matrix.rank".into(), self.matrix.len().to_string());
        for (i, row) in self.matrix.iter().enumerate() {
            let row = row.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            f.insert(format!("matrix.row{i:03}"), row);
        }
        for (i, p) in self.provenance.iter().enumerate() {
            f.insert(format!("provenance.{i:02}"), p.clone());
        }
        for (k, v) in &self.bindings {
            f.insert(format!("binding.{k}"), v.clone());
        }
        if let Some(s) = &self.scenario_digest {
            f.insert("scenario.digest".into(), s.clone());
        }
        f.insert("source.digest".into(), self.source_digest.clone());
        f.insert("target.digest".into(), self.target_digest.clone());
        f.insert(
            "verdict".into(),
            if self.is_valid() { "valid" } else { "invalid" }.to_string(),
        );
        f
    }

    /// Header plus `key value` lines in sorted key order; this is the text
    /// the digest covers.
    pub fn canonical_text(&self) -> String {
        let mut out = String::from("certificate v1\n");
        for (k, v) in self.fields() {
            out.push_str(&format!("{k} {v}\n"));
        }
        out
    }

    pub fn digest(&self) -> String {
        sha256_hex(&self.canonical_text())
    }

    /// Canonical text followed by its digest.
    pub fn to_text(&self) -> String {
        let mut out = self.canonical_text();
        out.push_str(&format!("digest {}\n", self.digest()));
        out
    }
}

fn classes_mapped(m: &IntMatrix, src: &[MarkedClass], dst: &[MarkedClass], permute: bool) -> bool {
    if src.len() != dst.len() {
        return false;
    }
    if permute {
        let mut used = vec![false; dst.len()];
        return src.iter().all(|c| {
            let img = linalg::mat_vec(m, &c.coords);
            match (0..dst.len()).find(|&k| !used[k] && dst[k].coords == img) {
                Some(k) => {
                    used[k] = true;
                    true
                }
                None => false,
            }
        });
    }
    src.iter().all(|c| {
        dst.iter()
            .find(|d| d.label == c.label)
            .map(|d| linalg::mat_vec(m, &c.coords) == d.coords)
            .unwrap_or(false)
    })
}

/// Checks the map class by class. Divisors and exceptional classes are
/// matched by label.
pub fn verify_isometry(g: &MarkedClassMap) -> IsometryCertificate {
    verify_isometry_with(g, false)
}

/// As [`verify_isometry`]; with `permute_divisors` the boundary divisors
/// only need to map onto the target divisors as a set.
pub fn verify_isometry_with(g: &MarkedClassMap, permute_divisors: bool) -> IsometryCertificate {
    let (s, t, m) = (&g.source, &g.target, &g.matrix);
    let n = s.rank();
    let shaped = t.rank() == n && m.len() == n && m.iter().all(|r| r.len() == n);
    let mut checks = BTreeMap::new();
    let mut put = |k: &str, v: bool| {
        checks.insert(k.to_string(), v);
    };
    if !shaped || s.check().is_err() || t.check().is_err() {
        for k in CHECK_NAMES {
            put(k, false);
        }
    } else {
        put("integral", linalg::det(m).abs() == 1);
        let pulled = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(m), &t.gram), m);
        put("gram_preserved", pulled == s.gram);
        put(
            "divisors_mapped",
            classes_mapped(m, &s.divisor_classes, &t.divisor_classes, permute_divisors)
                && classes_mapped(m, &s.exceptional_classes, &t.exceptional_classes, false),
        );
        put("omega_mapped", linalg::rat_mat_vec(m, &s.omega) == t.omega);
        put("c1_mapped", linalg::mat_vec(m, &s.c1) == t.c1);
    }
    let mut provenance: Vec<String> = PROVENANCE.iter().map(|p| p.to_string()).collect();
    if permute_divisors {
        provenance.push("divisors matched up to relabelling".into());
    }
    IsometryCertificate {
        checks,
        matrix: m.clone(),
        source_digest: sha256_hex(&write_lattice(s)),
        target_digest: sha256_hex(&write_lattice(t)),
        provenance,
        scenario_digest: None,
        bindings: BTreeMap::new(),
    }
}

/// Positions of the exceptional classes as basis vectors, by label.
fn exceptional_positions(m: &LatticeModel) -> Option<BTreeMap<String, usize>> {
    let mut out = BTreeMap::new();
    for e in &m.exceptional_classes {
        let ones: Vec<usize> = (0..e.coords.len()).filter(|&k| e.coords[k] != 0).collect();
        if ones.len() != 1 || e.coords[ones[0]] != 1 {
            return None;
        }
        out.insert(e.label.clone(), ones[0]);
    }
    Some(out)
}

/// The natural map between two models built over the same base: identity
/// on the base coordinates, exceptional classes matched by label.
pub fn build_g(source: &LatticeModel, target: &LatticeModel) -> Result<MarkedClassMap> {
    let n = source.rank();
    if target.rank() != n {
        return Err(Error::NoSharedBase);
    }
    let (Some(ps), Some(pt)) = (exceptional_positions(source), exceptional_positions(target))
    else {
        return Err(Error::NoSharedBase);
    };
    if ps.keys().ne(pt.keys()) {
        return Err(Error::NoSharedBase);
    }
    let src_labels: Vec<&String> = source.divisor_classes.iter().map(|d| &d.label).collect();
    let dst_labels: Vec<&String> = target.divisor_classes.iter().map(|d| &d.label).collect();
    if src_labels != dst_labels {
        return Err(Error::NoSharedBase);
    }
    let base_s: Vec<usize> = (0..n).filter(|k| !ps.values().any(|v| v == k)).collect();
    let base_t: Vec<usize> = (0..n).filter(|k| !pt.values().any(|v| v == k)).collect();
    let mut matrix = vec![vec![0i64; n]; n];
    for (a, b) in base_s.iter().zip(&base_t) {
        matrix[*b][*a] = 1;
    }
    for (label, a) in &ps {
        matrix[pt[label]][*a] = 1;
    }
    Ok(MarkedClassMap {
        source: source.clone(),
        target: target.clone(),
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Entries range over `[-bound, bound]`.
    pub bound: i64,
    pub permute_divisors: bool,
    pub max_rank: usize,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            bound: 1,
            permute_divisors: false,
            max_rank: 6,
        }
    }
}

fn box_vectors(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            for x in -bound..=bound {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// The certificate of the first map found by [`search_map`].
pub fn search_isometry(
    source: &LatticeModel,
    target: &LatticeModel,
    opts: &SearchOptions,
) -> Result<Option<IsometryCertificate>> {
    Ok(search_map(source, target, opts)?.map(|g| verify_isometry_with(&g, opts.permute_divisors)))
}

/// Enumerates integer matrices with entries in `[-bound, bound]` column by
/// column in lexicographic order, pruning columns whose norm or pairings
/// with earlier columns already disagree with the source form. Returns the
/// first map whose certificate is valid.
pub fn search_map(
    source: &LatticeModel,
    target: &LatticeModel,
    opts: &SearchOptions,
) -> Result<Option<MarkedClassMap>> {
    let n = source.rank();
    if n > opts.max_rank {
        return Err(Error::RankLimit {
            rank: n,
            max: opts.max_rank,
        });
    }
    if target.rank() != n {
        return Err(Error::Dimension(format!(
            "ranks {n} and {} differ",
            target.rank()
        )));
    }
    if opts.bound < 0 {
        return Err(Error::Dimension("negative bound".into()));
    }
    let all = box_vectors(n, opts.bound);
    let norm = |v: &[i64]| linalg::bilinear(&target.gram, v, v);
    let candidates: Vec<Vec<&Vec<i64>>> = (0..n)
        .map(|j| {
            all.iter()
                .filter(|v| norm(v) == source.gram[j][j])
                .collect()
        })
        .collect();
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n);
    let mut found = None;
    dfs(source, target, opts, &candidates, &mut cols, &mut found);
    Ok(found)
}

fn dfs(
    source: &LatticeModel,
    target: &LatticeModel,
    opts: &SearchOptions,
    candidates: &[Vec<&Vec<i64>>],
    cols: &mut Vec<Vec<i64>>,
    found: &mut Option<MarkedClassMap>,
) {
    let j = cols.len();
    let n = source.rank();
    if j == n {
        let matrix = linalg::transpose(cols);
        let g = MarkedClassMap {
            source: source.clone(),
            target: target.clone(),
            matrix,
        };
        if verify_isometry_with(&g, opts.permute_divisors).is_valid() {
            *found = Some(g);
        }
        return;
    }
    for c in &candidates[j] {
        let fits = (0..j).all(|k| linalg::bilinear(&target.gram, c, &cols[k]) == source.gram[j][k]);
        if !fits {
            continue;
        }
        cols.push((*c).clone());
        dfs(source, target, opts, candidates, cols, found);
        cols.pop();
        if found.is_some() {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::BaseDiagram;
    use crate::homology::{blowup_compatible, lattice_from_diagram};
    use crate::rational::Rat;

    #[test]
    fn build_g_identity_on_matching_models() {
        let m = lattice_from_diagram(&BaseDiagram::simplex(Rat::int(3))).unwrap();
        let b = blowup_compatible(&m, 0, &Rat::one()).unwrap();
        let g = build_g(&b, &b).unwrap();
        assert_eq!(g.matrix, linalg::identity(2));
        let cert = verify_isometry(&g);
        assert!(cert.is_valid(), "{:?}", cert.failed_checks());
        assert_eq!(build_g(&m, &b), Err(Error::NoSharedBase));
    }

    #[test]
    fn detects_wrong_area() {
        let m = lattice_from_diagram(&BaseDiagram::simplex(Rat::int(3))).unwrap();
        let a = blowup_compatible(&m, 0, &Rat::one()).unwrap();
        let b = blowup_compatible(&m, 0, &Rat::new(1, 2)).unwrap();
        let cert = verify_isometry(&build_g(&a, &b).unwrap());
        assert!(!cert.is_valid());
        assert_eq!(cert.failed_checks(), vec!["omega_mapped"]);
    }

    #[test]
    fn search_finds_identity_first_for_rigid_model() {
        let m = lattice_from_diagram(&BaseDiagram::simplex(Rat::int(3))).unwrap();
        let b = blowup_compatible(&m, 0, &Rat::one()).unwrap();
        let cert = search_isometry(&b, &b, &SearchOptions::default())
            .unwrap()
            .unwrap();
        assert!(cert.is_valid());
        assert_eq!(cert.matrix, linalg::identity(2));
    }

    #[test]
    fn digest_covers_text() {
        let m = lattice_from_diagram(&BaseDiagram::simplex(Rat::int(3))).unwrap();
        let mut cert = verify_isometry(&build_g(&m, &m).unwrap());
        let before = cert.digest();
        cert.scenario_digest = Some("abc".into());
        assert_ne!(before, cert.digest());
        let fields = crate::format::parse_certificate_fields(&cert.to_text()).unwrap();
        assert_eq!(fields["verdict"], "valid");
    }
}
