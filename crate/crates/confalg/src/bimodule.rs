//! Bimodules over left-symmetric conformal structures.
//!
//! A [`Bimodule`] packages a base structure, a free space, and two sesquilinear
//! action tables (left and right).  This module provides the action evaluator,
//! the two defining module laws ([`check_bimodule`]), the classical
//! constructions — adjoint actions, semidirect products, conformal duals, and
//! the two bimodules attached to an L-dendriform structure — plus conformal
//! bilinear forms with their symmetry, nondegeneracy, and cocycle tests, and
//! the pseudo-Hessian construction that turns a qualifying form into an
//! L-dendriform structure.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::calgebra::{
    AlgebraKind, CheckReport, Conversion, Element, FreeModule, LambdaTable, Structure, Violation,
    OP_CIRC, OP_TRI_L, OP_TRI_R,
};
use crate::error::{Error, Result};
use crate::polyring::{
    adjugate, classify_invertibility, determinant, Affine, Invertibility, Poly, VarId, VarRegistry,
    VarRole, VAR_D, VAR_LM, VAR_MU, VAR_NU, VAR_TH,
};

pub(crate) fn same_module(a: &Arc<FreeModule>, b: &Arc<FreeModule>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

// ---------------------------------------------------------------------------
// Action tables
// ---------------------------------------------------------------------------

/// Matrix form of one action of a structure on a free space:
/// `act(e_i)_lm v_j = sum_k T[i][j][k](lm, d) v_k`.
///
/// Entries may use only `d`, `lm`, and parameters; like product tables, the
/// action of general elements is recovered by sesquilinearity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTable {
    alg_rank: usize,
    space_rank: usize,
    entries: Vec<Vec<Vec<Poly>>>,
}

impl ActionTable {
    /// The zero action.
    pub fn zero(alg_rank: usize, space_rank: usize, reg: &Arc<VarRegistry>) -> Self {
        ActionTable {
            alg_rank,
            space_rank,
            entries: vec![vec![vec![Poly::zero(reg); space_rank]; space_rank]; alg_rank],
        }
    }

    /// Validate shapes and entry variables.
    pub fn new(
        alg_rank: usize,
        space_rank: usize,
        reg: &Arc<VarRegistry>,
        entries: Vec<Vec<Vec<Poly>>>,
    ) -> Result<Self> {
        if entries.len() != alg_rank
            || entries.iter().any(|row| row.len() != space_rank)
            || entries.iter().flatten().any(|cell| cell.len() != space_rank)
        {
            return Err(Error::InvalidDefinition(format!(
                "action table must be {alg_rank} x {space_rank} with {space_rank} output \
                 coordinates per cell"
            )));
        }
        for row in &entries {
            for cell in row {
                for p in cell {
                    for v in p.vars_used() {
                        let ok =
                            v == VAR_D || v == VAR_LM || reg.role(v) == VarRole::Parameter;
                        if !ok {
                            return Err(Error::DisallowedVariable(
                                reg.name(v).to_string(),
                                "action-table entries may use only d, lm, and parameters".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(ActionTable { alg_rank, space_rank, entries })
    }

    /// Number of acting basis elements.
    pub fn alg_rank(&self) -> usize {
        self.alg_rank
    }

    /// Rank of the space acted on.
    pub fn space_rank(&self) -> usize {
        self.space_rank
    }

    /// Output coordinates of `act(e_i)_lm v_j`.
    pub fn cell(&self, i: usize, j: usize) -> &[Poly] {
        &self.entries[i][j]
    }

    /// True when every entry vanishes.
    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().flatten().all(Poly::is_zero)
    }

    /// Entry-wise sum (shapes must agree).
    pub fn add(&self, other: &ActionTable) -> ActionTable {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| {
                ra.iter()
                    .zip(rb)
                    .map(|(ca, cb)| ca.iter().zip(cb).map(|(a, b)| a.add(b)).collect())
                    .collect()
            })
            .collect();
        ActionTable { alg_rank: self.alg_rank, space_rank: self.space_rank, entries }
    }

    /// Entry-wise negation.
    pub fn neg(&self) -> ActionTable {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter().map(|cell| cell.iter().map(Poly::neg).collect()).collect()
            })
            .collect();
        ActionTable { alg_rank: self.alg_rank, space_rank: self.space_rank, entries }
    }

    /// The star action on the dual space, from the dual-basis pairing
    /// `(p(d) v_j*)_lm (q(d) v_k) = p(-lm) q(lm) delta_jk`:
    /// `star(T)[i][j][k] = -T[i][k][j]` evaluated at `d -> -lm - d`.
    pub fn star(&self) -> Result<ActionTable> {
        let mut entries =
            vec![vec![vec![Poly::zero(self.registry()); self.space_rank]; self.space_rank];
                self.alg_rank];
        for i in 0..self.alg_rank {
            for j in 0..self.space_rank {
                for k in 0..self.space_rank {
                    entries[i][j][k] = self.entries[i][k][j]
                        .substitute_var(VAR_D, Affine::neg_sum(VAR_LM, VAR_D))?
                        .neg();
                }
            }
        }
        Ok(ActionTable { alg_rank: self.alg_rank, space_rank: self.space_rank, entries })
    }

    /// View a product table as an action of the algebra on its own module
    /// (`act(e_i)_lm e_j = e_i op_lm e_j`).
    pub fn from_lambda_table(t: &LambdaTable) -> ActionTable {
        let n = t.rank();
        let entries = (0..n)
            .map(|i| (0..n).map(|j| t.cell(i, j).to_vec()).collect())
            .collect();
        ActionTable { alg_rank: n, space_rank: n, entries }
    }

    fn registry(&self) -> &Arc<VarRegistry> {
        self.entries[0][0][0].registry()
    }
}

/// Sesquilinear action evaluator shared by bimodules and representations: the
/// acting element's coefficients are evaluated at `d = -lv`, the vector's are
/// shifted by `d = d + lv`, and the table is read at `lm = lv`.  Other live
/// lambda variables ride along; actions at shifted indices such as `-d - lm`
/// are obtained by evaluating at a scratch lambda and substituting it on the
/// result.
pub(crate) fn eval_action_raw(
    base_module: &Arc<FreeModule>,
    space: &Arc<FreeModule>,
    reg: &Arc<VarRegistry>,
    table: &ActionTable,
    a: &Element,
    u: &Element,
    lv: VarId,
) -> Result<Element> {
    if !same_module(a.module(), base_module) {
        return Err(Error::ModuleMismatch(
            "the acting element does not belong to the base module".into(),
        ));
    }
    if !same_module(u.module(), space) {
        return Err(Error::ModuleMismatch(
            "the vector does not belong to the bimodule's space".into(),
        ));
    }
    if reg.role(lv) != VarRole::Lambda {
        return Err(Error::WrongKind {
            expected: "a lambda variable".into(),
            found: format!("`{}` with role {}", reg.name(lv), reg.role(lv)),
        });
    }
    if a.contains_var(lv) {
        return Err(Error::LambdaConflict(format!(
            "lambda variable `{}` is already live in the left operand",
            reg.name(lv)
        )));
    }
    if u.contains_var(lv) {
        return Err(Error::LambdaConflict(format!(
            "lambda variable `{}` is already live in the right operand",
            reg.name(lv)
        )));
    }
    let mut out = vec![Poly::zero(reg); space.rank()];
    for i in 0..base_module.rank() {
        let fi = &a.coeffs()[i];
        if fi.is_zero() {
            continue;
        }
        let fi_eval = fi.substitute_var(VAR_D, Affine::neg_var(lv))?;
        for j in 0..space.rank() {
            let gj = &u.coeffs()[j];
            if gj.is_zero() {
                continue;
            }
            let gj_shift = gj.substitute_var(VAR_D, Affine::sum(VAR_D, lv))?;
            let fg = fi_eval.mul(&gj_shift);
            for (k, out_k) in out.iter_mut().enumerate() {
                let p = &table.cell(i, j)[k];
                if p.is_zero() {
                    continue;
                }
                let p_at = if lv == VAR_LM {
                    p.clone()
                } else {
                    p.substitute_var(VAR_LM, Affine::var(lv))?
                };
                *out_k = out_k.add(&fg.mul(&p_at));
            }
        }
    }
    Element::from_coeffs(space, reg, out)
}

// ---------------------------------------------------------------------------
// Bimodules
// ---------------------------------------------------------------------------

/// A left-symmetric base structure acting on a free space from both sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bimodule {
    base: Structure,
    space: Arc<FreeModule>,
    l: ActionTable,
    r: ActionTable,
}

impl Bimodule {
    /// Validate dimensions and the base kind.
    pub fn new(
        base: &Structure,
        space: &Arc<FreeModule>,
        l: ActionTable,
        r: ActionTable,
    ) -> Result<Self> {
        if base.kind() != AlgebraKind::LeftSymmetric {
            return Err(Error::WrongKind {
                expected: "left-symmetric".into(),
                found: base.kind().name().into(),
            });
        }
        let n = base.rank();
        let s = space.rank();
        for t in [&l, &r] {
            if t.alg_rank() != n || t.space_rank() != s {
                return Err(Error::ModuleMismatch(format!(
                    "action tables must be {n} x {s} for this base and space"
                )));
            }
        }
        Ok(Bimodule { base: base.clone(), space: Arc::clone(space), l, r })
    }

    /// The base structure.
    pub fn base(&self) -> &Structure {
        &self.base
    }

    /// The space acted on.
    pub fn space(&self) -> &Arc<FreeModule> {
        &self.space
    }

    /// The shared variable registry.
    pub fn registry(&self) -> &Arc<VarRegistry> {
        self.base.registry()
    }

    /// The left action table.
    pub fn left(&self) -> &ActionTable {
        &self.l
    }

    /// The right action table.
    pub fn right(&self) -> &ActionTable {
        &self.r
    }

    /// Evaluate `l(a)_lv u` by sesquilinearity.
    pub fn eval_left(&self, a: &Element, u: &Element, lv: VarId) -> Result<Element> {
        self.eval_action(&self.l, a, u, lv)
    }

    /// Evaluate `r(a)_lv u` by sesquilinearity.
    pub fn eval_right(&self, a: &Element, u: &Element, lv: VarId) -> Result<Element> {
        self.eval_action(&self.r, a, u, lv)
    }

    fn eval_action(
        &self,
        table: &ActionTable,
        a: &Element,
        u: &Element,
        lv: VarId,
    ) -> Result<Element> {
        eval_action_raw(self.base.module(), &self.space, self.base.registry(), table, a, u, lv)
    }

    /// Residual of the left module law at `(e_i, e_j, v_k)`:
    /// `l(a o_lm b)_{lm+mu} w - l(a)_lm l(b)_mu w
    ///  - l(b o_mu a)_{lm+mu} w + l(b)_mu l(a)_lm w`.
    pub fn module_left_residual(&self, i: usize, j: usize, k: usize) -> Result<Element> {
        let a = self.base.basis_element(i);
        let b = self.base.basis_element(j);
        let w = Element::basis(&self.space, self.base.registry(), k);
        let ab = self.base.eval_product(OP_CIRC, &a, &b, VAR_LM)?;
        let t1 = self
            .eval_left(&ab, &w, VAR_NU)?
            .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))?;
        let t2 = self.eval_left(&a, &self.eval_left(&b, &w, VAR_MU)?, VAR_LM)?;
        let ba = self.base.eval_product(OP_CIRC, &b, &a, VAR_MU)?;
        let t3 = self
            .eval_left(&ba, &w, VAR_NU)?
            .substitute_var(VAR_NU, Affine::sum(VAR_LM, VAR_MU))?;
        let t4 = self.eval_left(&b, &self.eval_left(&a, &w, VAR_LM)?, VAR_MU)?;
        Ok(t1.sub(&t2).sub(&t3).add(&t4))
    }

    /// Residual of the right module law at `(e_i, e_j, v_k)`:
    /// `r(b)_{-d-lm-mu}(l(a)_lm w) - l(a)_lm (r(b)_{-d-mu} w)
    ///  - r(b)_{-d-lm-mu}(r(a)_{-d-mu} w) + r(a o_lm b)_{-d-mu} w`.
    pub fn module_right_residual(&self, i: usize, j: usize, k: usize) -> Result<Element> {
        let a = self.base.basis_element(i);
        let b = self.base.basis_element(j);
        let w = Element::basis(&self.space, self.base.registry(), k);
        let la_w = self.eval_left(&a, &w, VAR_LM)?;
        let t1 = self
            .eval_right(&b, &la_w, VAR_NU)?
            .substitute_var(VAR_NU, Affine::neg_sum3(VAR_D, VAR_LM, VAR_MU))?;
        let rb_w = self
            .eval_right(&b, &w, VAR_TH)?
            .substitute_var(VAR_TH, Affine::neg_sum(VAR_D, VAR_MU))?;
        let t2 = self.eval_left(&a, &rb_w, VAR_LM)?;
        let ra_w = self
            .eval_right(&a, &w, VAR_TH)?
            .substitute_var(VAR_TH, Affine::neg_sum(VAR_D, VAR_MU))?;
        let t3 = self
            .eval_right(&b, &ra_w, VAR_NU)?
            .substitute_var(VAR_NU, Affine::neg_sum3(VAR_D, VAR_LM, VAR_MU))?;
        let ab = self.base.eval_product(OP_CIRC, &a, &b, VAR_LM)?;
        let t4 = self
            .eval_right(&ab, &w, VAR_TH)?
            .substitute_var(VAR_TH, Affine::neg_sum(VAR_D, VAR_MU))?;
        Ok(t1.sub(&t2).sub(&t3).add(&t4))
    }

    fn violation(&self, id: &str, i: usize, j: usize, k: usize, residual: Element) -> Violation {
        Violation {
            axiom_id: id.to_string(),
            witness: vec![i, j, k],
            witness_names: vec![
                self.base.module().name(i).to_string(),
                self.base.module().name(j).to_string(),
                self.space.name(k).to_string(),
            ],
            residual: residual.nonzero_entries(),
        }
    }
}

/// Check both module laws on every `(e_i, e_j, v_k)` triple.
///
/// Witness tuples are visited in lexicographic order with the left law
/// checked before the right law at each tuple; the first violation is
/// reported.
pub fn check_bimodule(m: &Bimodule) -> Result<CheckReport> {
    let ids = vec!["module_left".to_string(), "module_right".to_string()];
    for i in 0..m.base.rank() {
        for j in 0..m.base.rank() {
            for k in 0..m.space.rank() {
                let left = m.module_left_residual(i, j, k)?;
                if !left.is_zero() {
                    return Ok(CheckReport::fail(ids, m.violation("module_left", i, j, k, left)));
                }
                let right = m.module_right_residual(i, j, k)?;
                if !right.is_zero() {
                    return Ok(CheckReport::fail(
                        ids,
                        m.violation("module_right", i, j, k, right),
                    ));
                }
            }
        }
    }
    Ok(CheckReport::pass(ids))
}

// ---------------------------------------------------------------------------
// Constructions
// ---------------------------------------------------------------------------

/// The structure acting on its own module: `l(a)_lm b = a o_lm b` and
/// `r(a)_lm b = b o_{-d-lm} a`.
pub fn adjoint_bimodule(s: &Structure) -> Result<Bimodule> {
    if s.kind() != AlgebraKind::LeftSymmetric {
        return Err(Error::WrongKind {
            expected: "left-symmetric".into(),
            found: s.kind().name().into(),
        });
    }
    let table = s.op(OP_CIRC)?;
    let n = s.rank();
    let reg = s.registry();
    let mut l_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    let mut r_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                l_entries[i][j][k] = table.cell(i, j)[k].clone();
                r_entries[i][j][k] =
                    table.cell(j, i)[k].substitute_var(VAR_LM, Affine::neg_sum(VAR_D, VAR_LM))?;
            }
        }
    }
    Bimodule::new(
        s,
        s.module(),
        ActionTable::new(n, n, reg, l_entries)?,
        ActionTable::new(n, n, reg, r_entries)?,
    )
}

/// The left-symmetric structure on `A + V` extending the base product by
/// `a o_lm v = l(a)_lm v`, `u o_lm b = r(b)_{-d-lm} u`, and `u o_lm v = 0`.
///
/// The bimodule is re-checked first; space generators whose names collide
/// with base names get a `_v` suffix.
pub fn semidirect_product(m: &Bimodule) -> Result<Structure> {
    let report = check_bimodule(m)?;
    if !report.verdict {
        return Err(Error::Precondition(
            "semidirect product requires a bimodule satisfying both module laws".into(),
        ));
    }
    let n = m.base.rank();
    let sv = m.space.rank();
    let total = n + sv;
    let reg = m.base.registry();
    let mut names: Vec<String> = m.base.module().names().to_vec();
    for name in m.space.names() {
        let mut candidate = name.clone();
        while names.contains(&candidate) {
            candidate.push_str("_v");
        }
        names.push(candidate);
    }
    let module = FreeModule::new(names)?;
    let circ = m.base.op(OP_CIRC)?;
    let mut entries = vec![vec![vec![Poly::zero(reg); total]; total]; total];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                entries[i][j][k] = circ.cell(i, j)[k].clone();
            }
        }
    }
    for i in 0..n {
        for j in 0..sv {
            for k in 0..sv {
                entries[i][n + j][n + k] = m.l.cell(i, j)[k].clone();
            }
        }
    }
    for i in 0..sv {
        for j in 0..n {
            for k in 0..sv {
                entries[n + i][j][n + k] =
                    m.r.cell(j, i)[k].substitute_var(VAR_LM, Affine::neg_sum(VAR_D, VAR_LM))?;
            }
        }
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_CIRC.to_string(), LambdaTable::new(total, reg, entries)?);
    Structure::new(AlgebraKind::LeftSymmetric, &module, reg, ops)
}

/// The dual bimodule `(V*, star(l) - star(r), -star(r))` on the `_star`
/// dual basis, over the same base structure.
pub fn dual_bimodule(m: &Bimodule) -> Result<Bimodule> {
    let names: Vec<String> = m.space.names().iter().map(|n| format!("{n}_star")).collect();
    let dual_space = FreeModule::new(names)?;
    let l_star = m.l.star()?;
    let r_star_neg = m.r.star()?.neg();
    Bimodule::new(&m.base, &dual_space, l_star.add(&r_star_neg), r_star_neg)
}

/// Which derived one-product structure an L-dendriform bimodule sits over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LDendFlavor {
    /// Over the summed product `a tri_r b + a tri_l b`, with actions
    /// `(L_tri_r, R_tri_l)`.
    Horizontal,
    /// Over the product `a tri_r b - b tri_l_{-d-lm} a`, with actions
    /// `(L_tri_r, -L_tri_l)`.
    Vertical,
}

impl LDendFlavor {
    /// Stable kebab-case name.
    pub fn name(self) -> &'static str {
        match self {
            LDendFlavor::Horizontal => "horizontal",
            LDendFlavor::Vertical => "vertical",
        }
    }

    /// Parse a flavor name.
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "horizontal" => LDendFlavor::Horizontal,
            "vertical" => LDendFlavor::Vertical,
            other => {
                return Err(Error::InvalidDefinition(format!("unknown flavor `{other}`")))
            }
        })
    }
}

/// The bimodule an L-dendriform structure carries on its own module: the
/// left action is `L_tri_r` in both flavors, the right action and the base
/// product depend on the flavor.
pub fn l_dendriform_bimodule(s: &Structure, flavor: LDendFlavor) -> Result<Bimodule> {
    if s.kind() != AlgebraKind::LDendriform {
        return Err(Error::WrongKind {
            expected: "l-dendriform".into(),
            found: s.kind().name().into(),
        });
    }
    let n = s.rank();
    let reg = s.registry();
    let tri_r = s.op(OP_TRI_R)?;
    let tri_l = s.op(OP_TRI_L)?;
    let mut l_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                l_entries[i][j][k] = tri_r.cell(i, j)[k].clone();
            }
        }
    }
    let l = ActionTable::new(n, n, reg, l_entries)?;
    let (base, r) = match flavor {
        LDendFlavor::Horizontal => {
            // r(e_i)_lm e_j = e_j tri_l_{-d-lm} e_i
            let mut r_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        r_entries[i][j][k] = tri_l.cell(j, i)[k]
                            .substitute_var(VAR_LM, Affine::neg_sum(VAR_D, VAR_LM))?;
                    }
                }
            }
            (
                s.derive_structure(Conversion::Horizontal)?,
                ActionTable::new(n, n, reg, r_entries)?,
            )
        }
        LDendFlavor::Vertical => {
            // r(e_i)_lm e_j = -(e_i tri_l_lm e_j)
            let mut r_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        r_entries[i][j][k] = tri_l.cell(i, j)[k].neg();
                    }
                }
            }
            (
                s.derive_structure(Conversion::Vertical)?,
                ActionTable::new(n, n, reg, r_entries)?,
            )
        }
    };
    Bimodule::new(&base, s.module(), l, r)
}

/// The dual of the flavor's own bimodule: star-actions on the `_star` basis
/// over the flavor's derived product.
pub fn l_dendriform_dual_bimodule(s: &Structure, flavor: LDendFlavor) -> Result<Bimodule> {
    dual_bimodule(&l_dendriform_bimodule(s, flavor)?)
}

// ---------------------------------------------------------------------------
// Bilinear forms
// ---------------------------------------------------------------------------

/// A conformal bilinear form `B_lm(e_i, e_j)` on a structure's module.
///
/// Entries are polynomials in `lm` and parameters only; values on general
/// elements follow from `B_lm(f(d) a, g(d) b) = f(-lm) g(lm) B_lm(a, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConformalBilinearForm {
    base: Structure,
    entries: Vec<Vec<Poly>>,
}

impl ConformalBilinearForm {
    /// Validate the shape and the entry variables.
    pub fn new(base: &Structure, entries: Vec<Vec<Poly>>) -> Result<Self> {
        let n = base.rank();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidDefinition(format!(
                "bilinear form must be {n} x {n} for this structure"
            )));
        }
        let reg = base.registry();
        for row in &entries {
            for p in row {
                for v in p.vars_used() {
                    let ok = v == VAR_LM || reg.role(v) == VarRole::Parameter;
                    if !ok {
                        return Err(Error::DisallowedVariable(
                            reg.name(v).to_string(),
                            "bilinear-form entries may use only lm and parameters".into(),
                        ));
                    }
                }
            }
        }
        Ok(ConformalBilinearForm { base: base.clone(), entries })
    }

    /// The structure the form lives on.
    pub fn base(&self) -> &Structure {
        &self.base
    }

    /// The entry `B_lm(e_i, e_j)`.
    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    /// All entries, row-major.
    pub fn entries(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    /// Evaluate `B_lv(f, g)` by sesquilinearity: the left argument's
    /// coefficients are evaluated at `d = -lv`, the right argument's at
    /// `d = lv` (nothing survives for `d` to act on in a scalar).
    pub fn eval_form(&self, f: &Element, g: &Element, lv: VarId) -> Result<Poly> {
        if !same_module(f.module(), self.base.module())
            || !same_module(g.module(), self.base.module())
        {
            return Err(Error::ModuleMismatch(
                "form arguments do not belong to the base module".into(),
            ));
        }
        let reg = self.base.registry();
        if reg.role(lv) != VarRole::Lambda {
            return Err(Error::WrongKind {
                expected: "a lambda variable".into(),
                found: format!("`{}` with role {}", reg.name(lv), reg.role(lv)),
            });
        }
        if f.contains_var(lv) {
            return Err(Error::LambdaConflict(format!(
                "lambda variable `{}` is already live in the left operand",
                reg.name(lv)
            )));
        }
        if g.contains_var(lv) {
            return Err(Error::LambdaConflict(format!(
                "lambda variable `{}` is already live in the right operand",
                reg.name(lv)
            )));
        }
        let n = self.base.rank();
        let mut acc = Poly::zero(reg);
        for i in 0..n {
            let fi = f.coeff(i);
            if fi.is_zero() {
                continue;
            }
            let fi_eval = fi.substitute_var(VAR_D, Affine::neg_var(lv))?;
            for j in 0..n {
                let gj = g.coeff(j);
                let b = &self.entries[i][j];
                if gj.is_zero() || b.is_zero() {
                    continue;
                }
                let gj_eval = gj.substitute_var(VAR_D, Affine::var(lv))?;
                let b_at = if lv == VAR_LM {
                    b.clone()
                } else {
                    b.substitute_var(VAR_LM, Affine::var(lv))?
                };
                acc = acc.add(&fi_eval.mul(&gj_eval).mul(&b_at));
            }
        }
        Ok(acc)
    }

    /// True when `B_lm(e_i, e_j) = B_{-lm}(e_j, e_i)` for all entries.
    pub fn is_symmetric(&self) -> Result<bool> {
        let n = self.base.rank();
        for i in 0..n {
            for j in 0..n {
                let flipped =
                    self.entries[j][i].substitute_var(VAR_LM, Affine::neg_var(VAR_LM))?;
                if self.entries[i][j] != flipped {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The pairing matrix `B_{ij}(-d)`, the matrix of the induced map into
    /// the dual module.
    pub fn pairing_matrix(&self) -> Result<Vec<Vec<Poly>>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.substitute_var(VAR_LM, Affine::neg_var(VAR_D)))
                    .collect()
            })
            .collect()
    }

    /// Classify the pairing matrix's determinant.
    pub fn nondegeneracy(&self) -> Result<Invertibility> {
        let det = determinant(&self.pairing_matrix()?, self.base.registry())?;
        Ok(classify_invertibility(&det))
    }

    /// Strict nondegeneracy: the pairing determinant is a nonzero rational
    /// constant, so the induced map into the dual module is invertible.
    pub fn is_nondegenerate(&self) -> Result<bool> {
        Ok(matches!(self.nondegeneracy()?, Invertibility::Unit(_)))
    }

    /// Scalar residual of the 2-cocycle law at `(e_p, e_q, e_r)`:
    /// `B_{lm+mu}(a o_lm b, c) - B_lm(a, b o_mu c)
    ///  - B_{lm+mu}(b o_mu a, c) + B_mu(b, a o_lm c)`.
    pub fn cocycle_residual(&self, p: usize, q: usize, r: usize) -> Result<Poly> {
        let tbl = self.base.op(OP_CIRC)?;
        let reg = self.base.registry();
        let n = self.base.rank();
        let mut acc = Poly::zero(reg);
        for k in 0..n {
            let b_sum = self.entries[k][r].substitute_var(VAR_LM, Affine::sum(VAR_LM, VAR_MU))?;
            // + P_pq^k(lm, -lm-mu) B_kr(lm+mu)
            let p1 =
                tbl.cell(p, q)[k].substitute_var(VAR_D, Affine::neg_sum(VAR_LM, VAR_MU))?;
            acc = acc.add(&p1.mul(&b_sum));
            // - P_qr^k(mu, lm) B_pk(lm)
            let mut to_mu_lm = BTreeMap::new();
            to_mu_lm.insert(VAR_LM, Affine::var(VAR_MU));
            to_mu_lm.insert(VAR_D, Affine::var(VAR_LM));
            let p2 = tbl.cell(q, r)[k].substitute_affine(&to_mu_lm)?;
            acc = acc.sub(&p2.mul(&self.entries[p][k]));
            // - P_qp^k(mu, -lm-mu) B_kr(lm+mu)
            let mut to_mu_neg = BTreeMap::new();
            to_mu_neg.insert(VAR_LM, Affine::var(VAR_MU));
            to_mu_neg.insert(VAR_D, Affine::neg_sum(VAR_LM, VAR_MU));
            let p3 = tbl.cell(q, p)[k].substitute_affine(&to_mu_neg)?;
            acc = acc.sub(&p3.mul(&b_sum));
            // + P_pr^k(lm, mu) B_qk(mu)
            let p4 = tbl.cell(p, r)[k].substitute_var(VAR_D, Affine::var(VAR_MU))?;
            let b_mu = self.entries[q][k].substitute_var(VAR_LM, Affine::var(VAR_MU))?;
            acc = acc.add(&p4.mul(&b_mu));
        }
        Ok(acc)
    }

    /// Check the 2-cocycle law on every basis triple of a left-symmetric
    /// base; the first nonzero residual is reported as a scalar.
    pub fn check_cocycle(&self) -> Result<CheckReport> {
        if self.base.kind() != AlgebraKind::LeftSymmetric {
            return Err(Error::WrongKind {
                expected: "left-symmetric".into(),
                found: self.base.kind().name().into(),
            });
        }
        let ids = vec!["cocycle".to_string()];
        let n = self.base.rank();
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    let res = self.cocycle_residual(p, q, r)?;
                    if !res.is_zero() {
                        let names = self.base.module();
                        return Ok(CheckReport::fail(
                            ids,
                            Violation {
                                axiom_id: "cocycle".to_string(),
                                witness: vec![p, q, r],
                                witness_names: vec![
                                    names.name(p).to_string(),
                                    names.name(q).to_string(),
                                    names.name(r).to_string(),
                                ],
                                residual: vec![("scalar".to_string(), res)],
                            },
                        ));
                    }
                }
            }
        }
        Ok(CheckReport::pass(ids))
    }
}

// ---------------------------------------------------------------------------
// Pseudo-Hessian construction
// ---------------------------------------------------------------------------

/// Split a left-symmetric structure carrying a symmetric, nondegenerate
/// 2-cocycle into an L-dendriform structure.
///
/// Writing `T(e_i) = sum_j B_{ij}(-d) e_j*` for the form's pairing map into
/// the dual module and `(l*, r*) = (star(L) - star(R), -star(R))` for the
/// dual of the adjoint bimodule, the result is
/// `a tri_r b = T^{-1}(l*(a)_lm T(b))` and
/// `a tri_l b = -T^{-1}(r*(a)_lm T(b))`; its vertical derived product
/// recovers the input structure.
pub fn pseudo_hessian_structure(
    s: &Structure,
    form: &ConformalBilinearForm,
) -> Result<Structure> {
    if s.kind() != AlgebraKind::LeftSymmetric {
        return Err(Error::WrongKind {
            expected: "left-symmetric".into(),
            found: s.kind().name().into(),
        });
    }
    if !same_module(form.base().module(), s.module()) {
        return Err(Error::ModuleMismatch(
            "the form is not defined on the structure's module".into(),
        ));
    }
    let form = ConformalBilinearForm::new(s, form.entries.clone())?;
    if !form.is_symmetric()? {
        return Err(Error::Precondition(
            "the pseudo-Hessian construction requires a symmetric form".into(),
        ));
    }
    let det = match form.nondegeneracy()? {
        Invertibility::Unit(c) => c,
        Invertibility::Generic(cond) => {
            return Err(Error::Precondition(format!(
                "the pseudo-Hessian construction requires a nondegenerate form; the pairing \
                 determinant `{cond}` is only generically nonzero"
            )));
        }
        Invertibility::Singular => {
            return Err(Error::Precondition(
                "the pseudo-Hessian construction requires a nondegenerate form; the pairing \
                 determinant is not a unit"
                    .into(),
            ));
        }
    };
    if !form.check_cocycle()?.verdict {
        return Err(Error::Precondition(
            "the pseudo-Hessian construction requires the form to be a 2-cocycle".into(),
        ));
    }
    let reg = s.registry();
    let n = s.rank();
    let tm = form.pairing_matrix()?;
    let adj = adjugate(&tm, reg)?;
    let inv_det = det.recip();
    let dual = dual_bimodule(&adjoint_bimodule(s)?)?;
    let mut tri_r_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    let mut tri_l_entries = vec![vec![vec![Poly::zero(reg); n]; n]; n];
    for i in 0..n {
        let a = s.basis_element(i);
        for j in 0..n {
            let tb = Element::from_coeffs(dual.space(), reg, tm[j].clone())?;
            let x_r = dual.eval_left(&a, &tb, VAR_LM)?;
            let x_l = dual.eval_right(&a, &tb, VAR_LM)?.neg();
            for k in 0..n {
                let mut cr = Poly::zero(reg);
                let mut cl = Poly::zero(reg);
                for t in 0..n {
                    cr = cr.add(&x_r.coeff(t).mul(&adj[t][k]));
                    cl = cl.add(&x_l.coeff(t).mul(&adj[t][k]));
                }
                tri_r_entries[i][j][k] = cr.scale(&inv_det);
                tri_l_entries[i][j][k] = cl.scale(&inv_det);
            }
        }
    }
    let mut ops = BTreeMap::new();
    ops.insert(OP_TRI_R.to_string(), LambdaTable::new(n, reg, tri_r_entries)?);
    ops.insert(OP_TRI_L.to_string(), LambdaTable::new(n, reg, tri_l_entries)?);
    Structure::new(AlgebraKind::LDendriform, s.module(), reg, ops)
}
