//! Fixture algebras and the on-disk `.nilalg` bundle format.
//!
//! A bundle is a JSON document:
//!
//! ```text
//! {
//!   "name": "filiform4",
//!   "provenance": "...",
//!   "dim": 4,
//!   "basis": ["X1", "X2", "X3", "X4"],
//!   "brackets": [{"left": "X2", "right": "X4", "result": {"X1": "-1"}}, ...],
//!   "flag": ["X1", "X2", "X4", "X3"],
//!   "stepwise": {"chain": [3, 4], "layers": [{"m": [...], "z": [...], "v": [...]}, ...]}
//! }
//! ```
//!
//! Rationals are strings (`"p"` or `"p/q"`); omitted brackets are zero.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::lie::{Flag, FlaggedAlgebra, LieAlgebra, LieError};
use crate::linalg::{unit, Field, Scalar, Subspace};
use crate::stepwise::{Layer, StepwiseData};

pub const FILE_EXTENSION: &str = "nilalg";

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unsupported size {size} for fixture {kind}")]
    UnsupportedSize { kind: &'static str, size: usize },
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field {field}: {message}")]
    Field { field: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("cannot write bundle: {0}")]
    NotSerializable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CatalogError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        CatalogError::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn is_parse_error(&self) -> bool {
        matches!(self, CatalogError::Parse { .. } | CatalogError::Field { .. })
    }
}

/// An algebra with its Jordan-Hölder flag and optional stepwise decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraBundle {
    pub algebra: LieAlgebra,
    pub flag: Flag,
    pub stepwise: Option<StepwiseData>,
    pub provenance: String,
}

impl AlgebraBundle {
    pub fn flagged(&self) -> Result<FlaggedAlgebra, LieError> {
        FlaggedAlgebra::new(self.algebra.clone(), self.flag.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Heisenberg,
    UpperTriangular,
    Filiform4,
}

impl std::str::FromStr for FixtureKind {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "heisenberg" => Ok(FixtureKind::Heisenberg),
            "upper_triangular" => Ok(FixtureKind::UpperTriangular),
            "filiform4" => Ok(FixtureKind::Filiform4),
            other => Err(CatalogError::UnknownFixture(other.to_string())),
        }
    }
}

pub fn build_fixture(kind: FixtureKind, size: usize) -> Result<AlgebraBundle, CatalogError> {
    match kind {
        FixtureKind::Heisenberg => heisenberg(size),
        FixtureKind::UpperTriangular => upper_triangular(size),
        FixtureKind::Filiform4 => Ok(filiform4()),
    }
}

fn coord_layer(dim: usize, m: &[usize], z: &[usize], v: &[usize]) -> Layer {
    Layer {
        m: Subspace::coordinate(dim, m),
        z: Subspace::coordinate(dim, z),
        v: Subspace::coordinate(dim, v),
    }
}

/// Heisenberg algebra of dimension `2n+1`: `[X_{2i}, X_{2i+1}] = X_1`.
pub fn heisenberg(n: usize) -> Result<AlgebraBundle, CatalogError> {
    if n == 0 {
        return Err(CatalogError::UnsupportedSize {
            kind: "heisenberg",
            size: n,
        });
    }
    let dim = 2 * n + 1;
    let mut alg = LieAlgebra::abelian_standard(format!("heisenberg{n}"), dim);
    for i in 1..=n {
        alg.set_bracket(2 * i - 1, 2 * i, unit(dim, 0))
            .expect("indices in range");
    }
    let all: Vec<usize> = (0..dim).collect();
    let stepwise = StepwiseData {
        chain: vec![dim],
        layers: vec![coord_layer(dim, &all, &[0], &all[1..])],
    };
    Ok(AlgebraBundle {
        algebra: alg,
        flag: Flag::standard(dim),
        stepwise: Some(stepwise),
        provenance: format!("Heisenberg algebra of dimension {dim}; single flat layer"),
    })
}

/// Strictly upper triangular `n × n` matrices with the hook decomposition.
///
/// Layer `r` is the hook formed by row `r` and column `n+1-r` of the
/// remaining block; its corner `E_{r,n+1-r}` is the center of the layer.
/// Each hook is listed corner first, then row and column entries
/// alternately, moving away from the corner.
pub fn upper_triangular(n: usize) -> Result<AlgebraBundle, CatalogError> {
    if n < 2 {
        return Err(CatalogError::UnsupportedSize {
            kind: "upper_triangular",
            size: n,
        });
    }
    let label = |i: usize, j: usize| {
        if n <= 9 {
            format!("E{i}{j}")
        } else {
            format!("E{i},{j}")
        }
    };
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    let dim = pairs.len();
    let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).expect("upper entry");
    let labels = pairs.iter().map(|&(i, j)| label(i, j)).collect();
    let mut alg = LieAlgebra::abelian(format!("upper_triangular{n}"), labels);
    // [E_ij, E_kl] = δ_jk E_il - δ_li E_kj
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate().skip(a + 1) {
            let mut v = vec![Scalar::zero(); dim];
            if j == k {
                v[index(i, l)] = Scalar::one();
            }
            if l == i {
                v[index(k, j)] = -Scalar::one();
            }
            alg.set_bracket(a, b, v).expect("indices in range");
        }
    }

    let mut order = Vec::with_capacity(dim);
    let mut chain = Vec::new();
    let mut layers = Vec::new();
    for r in 1..=n / 2 {
        let right = n + 1 - r;
        let corner = index(r, right);
        let mut hook = vec![corner];
        for d in 1..=(n - 2 * r) {
            hook.push(index(r, right - d));
            hook.push(index(r + d, right));
        }
        layers.push(coord_layer(dim, &hook, &[corner], &hook[1..]));
        order.extend_from_slice(&hook);
        chain.push(order.len());
    }
    debug_assert_eq!(order.len(), dim);
    Ok(AlgebraBundle {
        algebra: alg,
        flag: Flag::from_order(dim, &order),
        stepwise: Some(StepwiseData { chain, layers }),
        provenance: format!(
            "strictly upper triangular {n}x{n} matrices; hook layers, corner-first flag"
        ),
    })
}

/// Four-dimensional filiform algebra `[X4, X3] = X2`, `[X4, X2] = X1`,
/// flag `(X1, X2, X4, X3)`, two layers.
pub fn filiform4() -> AlgebraBundle {
    let dim = 4;
    let alg = LieAlgebra::abelian_standard("filiform4", dim)
        .with_bracket(3, 2, unit(dim, 1))
        .and_then(|a| a.with_bracket(3, 1, unit(dim, 0)))
        .expect("indices in range");
    let stepwise = StepwiseData {
        chain: vec![3, 4],
        layers: vec![
            coord_layer(dim, &[0, 1, 3], &[0], &[1, 3]),
            coord_layer(dim, &[2], &[2], &[]),
        ],
    };
    AlgebraBundle {
        algebra: alg,
        flag: Flag::from_order(dim, &[0, 1, 3, 2]),
        stepwise: Some(stepwise),
        provenance: "3-step filiform algebra with 1-dimensional center; Heisenberg layer plus a 1-dimensional layer".into(),
    }
}

/// The bundles shipped under `fixtures/`, keyed by file stem.
pub fn shipped_fixtures() -> Result<Vec<(String, AlgebraBundle)>, CatalogError> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push((format!("heisenberg{n}"), heisenberg(n)?));
    }
    out.push(("filiform4".to_string(), filiform4()));
    for n in 3..=5 {
        out.push((format!("upper_triangular{n}"), upper_triangular(n)?));
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BundleDoc {
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
    dim: usize,
    basis: Vec<String>,
    #[serde(default)]
    brackets: Vec<BracketDoc>,
    flag: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stepwise: Option<StepwiseDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BracketDoc {
    left: String,
    right: String,
    result: IndexMap<String, Scalar>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepwiseDoc {
    chain: Vec<usize>,
    layers: Vec<LayerDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    m: Vec<String>,
    z: Vec<String>,
    v: Vec<String>,
}

fn labels_of(alg: &LieAlgebra, v: &Subspace, what: &str) -> Result<Vec<String>, CatalogError> {
    v.basis()
        .iter()
        .map(|x| {
            let mut nz = x.iter().enumerate().filter(|(_, c)| !c.is_zero());
            match (nz.next(), nz.next()) {
                (Some((i, c)), None) if c.is_one() => Ok(alg.labels()[i].clone()),
                _ => Err(CatalogError::NotSerializable(format!(
                    "{what} is not spanned by basis vectors"
                ))),
            }
        })
        .collect()
}

fn to_doc(bundle: &AlgebraBundle) -> Result<BundleDoc, CatalogError> {
    let alg = &bundle.algebra;
    let labels = alg.labels();
    let brackets = alg
        .stored_brackets()
        .map(|(&(i, j), v)| BracketDoc {
            left: labels[i].clone(),
            right: labels[j].clone(),
            result: v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (labels[k].clone(), c.clone()))
                .collect(),
        })
        .collect();
    let flag = bundle
        .flag
        .as_order()
        .ok_or_else(|| CatalogError::NotSerializable("flag is not a basis permutation".into()))?
        .into_iter()
        .map(|i| labels[i].clone())
        .collect();
    let stepwise = match &bundle.stepwise {
        None => None,
        Some(sw) => Some(StepwiseDoc {
            chain: sw.chain.clone(),
            layers: sw
                .layers
                .iter()
                .map(|l| {
                    Ok(LayerDoc {
                        m: labels_of(alg, &l.m, "m")?,
                        z: labels_of(alg, &l.z, "z")?,
                        v: labels_of(alg, &l.v, "v")?,
                    })
                })
                .collect::<Result<_, CatalogError>>()?,
        }),
    };
    Ok(BundleDoc {
        name: alg.name().to_string(),
        provenance: bundle.provenance.clone(),
        dim: alg.dim(),
        basis: labels.to_vec(),
        brackets,
        flag,
        stepwise,
    })
}

fn lookup(labels: &[String], label: &str, field: &str) -> Result<usize, CatalogError> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| CatalogError::field(field, format!("unknown basis label {label:?}")))
}

fn label_subspace(labels: &[String], names: &[String], field: &str) -> Result<Subspace, CatalogError> {
    let mut seen = BTreeSet::new();
    let mut idx = Vec::with_capacity(names.len());
    for n in names {
        let i = lookup(labels, n, field)?;
        if !seen.insert(i) {
            return Err(CatalogError::field(field, format!("label {n:?} repeated")));
        }
        idx.push(i);
    }
    Ok(Subspace::coordinate(labels.len(), &idx))
}

fn from_doc(doc: BundleDoc) -> Result<AlgebraBundle, CatalogError> {
    if doc.dim == 0 {
        return Err(CatalogError::field("dim", "dimension must be at least 1"));
    }
    if doc.basis.len() != doc.dim {
        return Err(CatalogError::field(
            "basis",
            format!("{} labels for dimension {}", doc.basis.len(), doc.dim),
        ));
    }
    let unique: BTreeSet<&String> = doc.basis.iter().collect();
    if unique.len() != doc.dim {
        return Err(CatalogError::field("basis", "duplicate labels"));
    }
    let labels = doc.basis;
    let mut alg = LieAlgebra::abelian(doc.name, labels.clone());
    let mut seen = BTreeSet::new();
    for (n, b) in doc.brackets.iter().enumerate() {
        let field = format!("brackets[{n}]");
        let i = lookup(&labels, &b.left, &field)?;
        let j = lookup(&labels, &b.right, &field)?;
        if i == j {
            return Err(CatalogError::field(&field, "bracket of a label with itself"));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(CatalogError::field(&field, "bracket given twice"));
        }
        let mut v = vec![Scalar::zero(); doc.dim];
        for (label, c) in &b.result {
            v[lookup(&labels, label, &field)?] = c.clone();
        }
        alg.set_bracket(i, j, v)
            .map_err(|e| CatalogError::field(&field, e.to_string()))?;
    }
    if doc.flag.len() != doc.dim {
        return Err(CatalogError::field(
            "flag",
            format!("{} labels for dimension {}", doc.flag.len(), doc.dim),
        ));
    }
    let order = doc
        .flag
        .iter()
        .map(|l| lookup(&labels, l, "flag"))
        .collect::<Result<Vec<_>, _>>()?;
    let flag = Flag::from_order(doc.dim, &order);
    let stepwise = match doc.stepwise {
        None => None,
        Some(sw) => {
            let layers = sw
                .layers
                .iter()
                .enumerate()
                .map(|(n, l)| {
                    let f = |part: &str| format!("stepwise.layers[{n}].{part}");
                    Ok(Layer {
                        m: label_subspace(&labels, &l.m, &f("m"))?,
                        z: label_subspace(&labels, &l.z, &f("z"))?,
                        v: label_subspace(&labels, &l.v, &f("v"))?,
                    })
                })
                .collect::<Result<Vec<_>, CatalogError>>()?;
            if layers.len() != sw.chain.len() {
                return Err(CatalogError::field(
                    "stepwise",
                    "chain and layers differ in length",
                ));
            }
            Some(StepwiseData {
                chain: sw.chain,
                layers,
            })
        }
    };
    let report = alg.validate_structure();
    if !report.jacobi_ok {
        return Err(CatalogError::Validation(format!(
            "Jacobi identity fails on {} triple(s)",
            report.violations.len()
        )));
    }
    if report.nilpotency_class.is_none() {
        return Err(CatalogError::Validation("algebra is not nilpotent".into()));
    }
    let flag_report = flag
        .validate(&alg)
        .map_err(|e| CatalogError::Validation(e.to_string()))?;
    if let Some(j) = flag_report.first_violation {
        return Err(CatalogError::Validation(format!(
            "flag is not Jordan-Hölder: [n, n_{j}] is not contained in n_{}",
            j - 1
        )));
    }
    Ok(AlgebraBundle {
        algebra: alg,
        flag,
        stepwise,
        provenance: doc.provenance,
    })
}

/// Parses and validates a bundle document.
pub fn parse_bundle(text: &str) -> Result<AlgebraBundle, CatalogError> {
    let doc: BundleDoc = serde_json::from_str(text).map_err(|e| CatalogError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_doc(doc)
}

/// Canonical text of a bundle (fixed field order, two-space indent, trailing newline).
pub fn bundle_to_string(bundle: &AlgebraBundle) -> Result<String, CatalogError> {
    let doc = to_doc(bundle)?;
    let mut s = serde_json::to_string_pretty(&doc).expect("bundle documents serialize");
    s.push('\n');
    Ok(s)
}

pub fn load(path: impl AsRef<Path>) -> Result<AlgebraBundle, CatalogError> {
    parse_bundle(&fs::read_to_string(path)?)
}

pub fn save(bundle: &AlgebraBundle, path: impl AsRef<Path>) -> Result<(), CatalogError> {
    fs::write(path, bundle_to_string(bundle)?)?;
    Ok(())
}
