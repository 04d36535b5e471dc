//! The JSON definition-file format and its loaders and writers.
//!
//! A definition file declares one structure (parameters, basis, kind, sparse
//! product tables) plus optional attachments: a bimodule, named operator
//! matrices, named two-slot tensors, and named bilinear forms.  Loading is
//! strict — unknown JSON fields, undeclared basis elements, undeclared
//! variables, duplicate entries, and shape mismatches are all rejected — and
//! writing is canonical, so a derived file's bytes are reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use confalg::bimodule::{ActionTable, Bimodule, ConformalBilinearForm};
use confalg::calgebra::{AlgebraKind, FreeModule, LambdaTable, Structure};
use confalg::operators::ModuleMap;
use confalg::polyring::{parse_poly, Poly, VarRegistry};
use confalg::sequation::TensorElement2;

/// One stored definition: a structure plus optional attachments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionFile {
    /// Free parameter names, in declaration order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    /// Basis names of the underlying free module.
    pub basis: Vec<String>,
    /// Structure kind: `lie`, `left-symmetric`, `associative`, `dendriform`,
    /// `l-dendriform`, `quadri`, or `raw`.
    pub kind: String,
    /// Sparse products per operation name; pairs not mentioned are zero, and
    /// operations required by the kind but absent here get the zero table.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub products: BTreeMap<String, Vec<ProductEntry>>,
    /// Optional bimodule attachment (left-symmetric structures only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimodule: Option<BimoduleDef>,
    /// Named matrices of polynomials in `d` and parameters; `rows[i][j]` is
    /// the coefficient of the j-th target basis vector in the image of the
    /// i-th source basis vector.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub operators: BTreeMap<String, Vec<Vec<String>>>,
    /// Named two-slot tensors: an n x n matrix of polynomials in `d1`, `d2`,
    /// and parameters, with `entry[p][q]` multiplying `e_p (x) e_q`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tensors: BTreeMap<String, Vec<Vec<String>>>,
    /// Named bilinear forms: an n x n matrix of polynomials in `lm` and
    /// parameters, with `entry[i][j]` the value of the form at `(e_i, e_j)`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bilinear_forms: BTreeMap<String, Vec<Vec<String>>>,
}

/// One sparse product cell: the value of `left o_lm right`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductEntry {
    pub left: String,
    pub right: String,
    pub value: Vec<ValueTerm>,
}

/// One summand of a product value: `coeff * basis` with `coeff` a polynomial
/// in `lm`, `d`, and parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueTerm {
    pub basis: String,
    pub coeff: String,
}

/// A bimodule attachment: the representation space and the two action
/// tables, with `l[i][j]` / `r[i][j]` the coefficient vectors (over the
/// space basis) of the i-th algebra generator acting on the j-th space
/// generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleDef {
    pub space: Vec<String>,
    pub l: Vec<Vec<Vec<String>>>,
    pub r: Vec<Vec<Vec<String>>>,
}

/// A definition file parsed and elaborated into a checked structure.
pub struct Loaded {
    /// Display name used in reports (the path as given).
    pub name: String,
    pub def: DefinitionFile,
    pub structure: Structure,
}

/// Read, parse, and elaborate a definition file; `kind_override` replaces
/// the declared kind before elaboration.
pub fn load(path: &Path, kind_override: Option<&str>) -> anyhow::Result<Loaded> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read `{}`", path.display()))?;
    let def: DefinitionFile = serde_json::from_str(&text)
        .with_context(|| format!("`{}` is not a valid definition file", path.display()))?;
    let structure = build_structure(&def, kind_override)
        .with_context(|| format!("`{}` does not elaborate", path.display()))?;
    Ok(Loaded { name: path.display().to_string(), def, structure })
}

/// Elaborate the structure part of a definition.
pub fn build_structure(
    def: &DefinitionFile,
    kind_override: Option<&str>,
) -> anyhow::Result<Structure> {
    let kind = AlgebraKind::parse(kind_override.unwrap_or(&def.kind))?;
    let params: Vec<&str> = def.parameters.iter().map(String::as_str).collect();
    let reg = VarRegistry::new(&params)?;
    let module = FreeModule::new(def.basis.clone())?;
    let rank = module.rank();
    let index = basis_index(&def.basis);

    let mut op_names: BTreeSet<String> = def.products.keys().cloned().collect();
    for required in kind.required_ops() {
        op_names.insert(required.to_string());
    }
    let mut tables = BTreeMap::new();
    for op in op_names {
        let mut entries = vec![vec![vec![Poly::zero(&reg); rank]; rank]; rank];
        let mut seen_pairs = BTreeSet::new();
        for entry in def.products.get(&op).map(Vec::as_slice).unwrap_or(&[]) {
            let i = *index.get(entry.left.as_str()).with_context(|| {
                format!("product `{op}` refers to undeclared basis element `{}`", entry.left)
            })?;
            let j = *index.get(entry.right.as_str()).with_context(|| {
                format!("product `{op}` refers to undeclared basis element `{}`", entry.right)
            })?;
            if !seen_pairs.insert((i, j)) {
                bail!(
                    "product `{op}` lists the pair `({}, {})` twice",
                    entry.left,
                    entry.right
                );
            }
            let mut seen_terms = BTreeSet::new();
            for term in &entry.value {
                let k = *index.get(term.basis.as_str()).with_context(|| {
                    format!("product `{op}` refers to undeclared basis element `{}`", term.basis)
                })?;
                if !seen_terms.insert(k) {
                    bail!(
                        "product `{op}` at `({}, {})` lists basis element `{}` twice",
                        entry.left,
                        entry.right,
                        term.basis
                    );
                }
                entries[i][j][k] = parse_poly(&reg, &term.coeff).with_context(|| {
                    format!("bad coefficient in product `{op}` at `({}, {})`", entry.left, entry.right)
                })?;
            }
        }
        tables.insert(op, LambdaTable::new(rank, &reg, entries)?);
    }
    Ok(Structure::new(kind, &module, &reg, tables)?)
}

fn basis_index(names: &[String]) -> BTreeMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

/// Elaborate the bimodule attachment of a loaded definition.
pub fn build_bimodule(loaded: &Loaded) -> anyhow::Result<Bimodule> {
    let Some(bdef) = &loaded.def.bimodule else {
        bail!("`{}` has no bimodule section", loaded.name);
    };
    let reg = loaded.structure.registry();
    let space = FreeModule::new(bdef.space.clone())?;
    let l = action_table(&bdef.l, loaded.structure.rank(), space.rank(), reg, "l")?;
    let r = action_table(&bdef.r, loaded.structure.rank(), space.rank(), reg, "r")?;
    Ok(Bimodule::new(&loaded.structure, &space, l, r)?)
}

fn action_table(
    raw: &[Vec<Vec<String>>],
    alg_rank: usize,
    space_rank: usize,
    reg: &Arc<VarRegistry>,
    which: &str,
) -> anyhow::Result<ActionTable> {
    let shape_ok = raw.len() == alg_rank
        && raw
            .iter()
            .all(|row| row.len() == space_rank && row.iter().all(|cell| cell.len() == space_rank));
    if !shape_ok {
        bail!(
            "bimodule table `{which}` must be {alg_rank} x {space_rank} cells of {space_rank} \
             coefficients"
        );
    }
    let mut entries = Vec::with_capacity(alg_rank);
    for row in raw {
        let mut out_row = Vec::with_capacity(space_rank);
        for cell in row {
            let parsed: Vec<Poly> = cell
                .iter()
                .map(|t| parse_poly(reg, t))
                .collect::<confalg::Result<_>>()
                .with_context(|| format!("bad coefficient in bimodule table `{which}`"))?;
            out_row.push(parsed);
        }
        entries.push(out_row);
    }
    Ok(ActionTable::new(alg_rank, space_rank, reg, entries)?)
}

fn matrix(
    raw: &[Vec<String>],
    reg: &Arc<VarRegistry>,
    what: &str,
) -> anyhow::Result<Vec<Vec<Poly>>> {
    let mut rows = Vec::with_capacity(raw.len());
    for row in raw {
        rows.push(
            row.iter()
                .map(|t| parse_poly(reg, t))
                .collect::<confalg::Result<_>>()
                .with_context(|| format!("bad entry in {what}"))?,
        );
    }
    Ok(rows)
}

fn named_matrix<'d>(
    section: &'d BTreeMap<String, Vec<Vec<String>>>,
    name: &str,
    what: &str,
    file: &str,
) -> anyhow::Result<&'d Vec<Vec<String>>> {
    section
        .get(name)
        .with_context(|| format!("`{file}` declares no {what} named `{name}`"))
}

/// A named operator matrix as a self-map of the structure's module.
pub fn endomap(loaded: &Loaded, name: &str) -> anyhow::Result<ModuleMap> {
    let raw = named_matrix(&loaded.def.operators, name, "operator", &loaded.name)?;
    let rows = matrix(raw, loaded.structure.registry(), &format!("operator `{name}`"))?;
    Ok(ModuleMap::new(
        loaded.structure.module(),
        loaded.structure.module(),
        loaded.structure.registry(),
        rows,
    )?)
}

/// A named operator matrix as a map from a bimodule's space into its base
/// module.
pub fn space_map(loaded: &Loaded, m: &Bimodule, name: &str) -> anyhow::Result<ModuleMap> {
    let raw = named_matrix(&loaded.def.operators, name, "operator", &loaded.name)?;
    let rows = matrix(raw, loaded.structure.registry(), &format!("operator `{name}`"))?;
    Ok(ModuleMap::new(
        m.space(),
        loaded.structure.module(),
        loaded.structure.registry(),
        rows,
    )?)
}

/// A named two-slot tensor over the structure's module.
pub fn tensor(loaded: &Loaded, name: &str) -> anyhow::Result<TensorElement2> {
    let raw = named_matrix(&loaded.def.tensors, name, "tensor", &loaded.name)?;
    let coeffs = matrix(raw, loaded.structure.registry(), &format!("tensor `{name}`"))?;
    Ok(TensorElement2::new(
        loaded.structure.module(),
        loaded.structure.registry(),
        coeffs,
    )?)
}

/// A named bilinear form over the structure.
pub fn form(loaded: &Loaded, name: &str) -> anyhow::Result<ConformalBilinearForm> {
    let raw = named_matrix(&loaded.def.bilinear_forms, name, "bilinear form", &loaded.name)?;
    let entries = matrix(raw, loaded.structure.registry(), &format!("bilinear form `{name}`"))?;
    Ok(ConformalBilinearForm::new(&loaded.structure, entries)?)
}

// ---------------------------------------------------------------------------
// Writers
// ---------------------------------------------------------------------------

/// Express a structure as a definition, with sparse products in basis order
/// and canonical coefficient strings.
pub fn definition_from_structure(s: &Structure) -> DefinitionFile {
    let reg = s.registry();
    let names = s.module();
    let rank = s.rank();
    let mut products = BTreeMap::new();
    for (op, table) in s.op_tables() {
        let mut list = Vec::new();
        for i in 0..rank {
            for j in 0..rank {
                let terms: Vec<ValueTerm> = table
                    .cell(i, j)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(k, p)| ValueTerm {
                        basis: names.name(k).to_string(),
                        coeff: p.to_string(),
                    })
                    .collect();
                if !terms.is_empty() {
                    list.push(ProductEntry {
                        left: names.name(i).to_string(),
                        right: names.name(j).to_string(),
                        value: terms,
                    });
                }
            }
        }
        if !list.is_empty() {
            products.insert(op.clone(), list);
        }
    }
    DefinitionFile {
        parameters: reg
            .user_parameters()
            .into_iter()
            .map(|v| reg.name(v).to_string())
            .collect(),
        basis: names.names().to_vec(),
        kind: s.kind().name().to_string(),
        products,
        bimodule: None,
        operators: BTreeMap::new(),
        tensors: BTreeMap::new(),
        bilinear_forms: BTreeMap::new(),
    }
}

/// Attach a bimodule section (the definition must describe the bimodule's
/// base structure).
pub fn attach_bimodule(def: &mut DefinitionFile, m: &Bimodule) {
    def.bimodule = Some(BimoduleDef {
        space: m.space().names().to_vec(),
        l: action_strings(m.left()),
        r: action_strings(m.right()),
    });
}

fn action_strings(t: &ActionTable) -> Vec<Vec<Vec<String>>> {
    (0..t.alg_rank())
        .map(|i| {
            (0..t.space_rank())
                .map(|j| t.cell(i, j).iter().map(Poly::to_string).collect())
                .collect()
        })
        .collect()
}

/// Attach a named tensor (over the definition's own module).
pub fn attach_tensor(def: &mut DefinitionFile, name: &str, r: &TensorElement2) {
    let n = r.base().rank();
    let coeffs: Vec<Vec<String>> = (0..n)
        .map(|p| (0..n).map(|q| r.coeff(p, q).to_string()).collect())
        .collect();
    def.tensors.insert(name.to_string(), coeffs);
}

/// Canonical serialization: pretty JSON with sorted object keys and a
/// trailing newline, byte-stable for identical definitions.
pub fn to_json(def: &DefinitionFile) -> String {
    let mut text = serde_json::to_string_pretty(def).expect("definitions serialize");
    text.push('\n');
    text
}
