//! Ready-made example structures, operator families, bilinear forms, and the
//! classification predicate for weight-zero Rota-Baxter self-maps of the
//! two-generator algebra.
//!
//! Everything here is mirrored by the JSON corpus shipped with the
//! command-line crate, so the same objects can be exercised both through the
//! library API and through definition files.  Constructors for fixed examples
//! return the finished value directly (the data is known to be well formed);
//! constructors that attach an operator to a caller-supplied structure return
//! a [`Result`] because they look up parameter names in the structure's
//! registry.

use std::collections::BTreeMap;

use crate::bimodule::ConformalBilinearForm;
use crate::calgebra::{
    AlgebraKind, FreeModule, LambdaTable, Structure, OP_CIRC, OP_NE, OP_PREC, OP_SUCC, OP_TRI_L,
    OP_TRI_R,
};
use crate::error::{Error, Result};
use crate::operators::ModuleMap;
use crate::polyring::{parse_poly, rat_int, Poly, VarRegistry, VAR_D};

/// Build a structure from operation tables given as sparse string entries:
/// `ops[(name, cells)]` with `cells[(i, j, [(k, poly)])]` meaning the
/// `e_k`-coefficient of `e_i o_lm e_j`.
fn fixture(
    kind: AlgebraKind,
    params: &[&str],
    basis: &[&str],
    ops: &[(&str, &[(usize, usize, &[(usize, &str)])])],
) -> Structure {
    let reg = VarRegistry::new(params).expect("catalog parameter names are valid");
    let module = FreeModule::new(basis.to_vec()).expect("catalog basis names are valid");
    let rank = module.rank();
    let mut tables = BTreeMap::new();
    for (op, cells) in ops {
        let mut entries = vec![vec![vec![Poly::zero(&reg); rank]; rank]; rank];
        for (i, j, cell) in *cells {
            for (k, text) in *cell {
                entries[*i][*j][*k] =
                    parse_poly(&reg, text).expect("catalog table entry parses");
            }
        }
        tables.insert(
            op.to_string(),
            LambdaTable::new(rank, &reg, entries).expect("catalog table is well formed"),
        );
    }
    Structure::new(kind, &module, &reg, tables).expect("catalog structure is well formed")
}

/// Rank-1 left-symmetric structure `a o_lm a = (lm + d + c) a` with a free
/// constant `c`; its commutator is the rank-1 bracket `(d + 2 lm) a`.
pub fn rank_one() -> Structure {
    fixture(
        AlgebraKind::LeftSymmetric,
        &["c"],
        &["a"],
        &[(OP_CIRC, &[(0, 0, &[(0, "lm + d + c")])])],
    )
}

/// Rank-2 left-symmetric structure on generators `L`, `W` whose only product
/// is `L o_lm L = (g0 - g1 lm) lm W`, with `g0` and `g1` free.  The registry
/// also declares the coefficients `a`, `h0`, `h1`, `h2`, `q0`, `q1` consumed
/// by the operator families below, so the families can be attached directly.
pub fn lw() -> Structure {
    fixture(
        AlgebraKind::LeftSymmetric,
        &["g0", "g1", "a", "h0", "h1", "h2", "q0", "q1"],
        &["L", "W"],
        &[(OP_CIRC, &[(0, 0, &[(1, "(g0 - g1*lm)*lm")])])],
    )
}

/// The two-generator structure with the coefficient polynomial frozen to one:
/// `L o_lm L = lm W`, no free parameters.
pub fn lw_unit() -> Structure {
    fixture(
        AlgebraKind::LeftSymmetric,
        &[],
        &["L", "W"],
        &[(OP_CIRC, &[(0, 0, &[(1, "lm")])])],
    )
}

/// Rank-2 associative structure with constant products `u o u = u`,
/// `u o t = t o u = t`, and `t o t = 0` (a unit direction and a square-zero
/// direction).
pub fn current_associative() -> Structure {
    fixture(
        AlgebraKind::Associative,
        &[],
        &["u", "t"],
        &[(
            OP_CIRC,
            &[
                (0, 0, &[(0, "1")]),
                (0, 1, &[(1, "1")]),
                (1, 0, &[(1, "1")]),
            ],
        )],
    )
}

/// Rank-2 constant table `e1 o e2 = e1` that fails associativity; the first
/// violation sits at the triple `(e1, e2, e2)`.
pub fn broken_current() -> Structure {
    fixture(
        AlgebraKind::Associative,
        &[],
        &["e1", "e2"],
        &[(OP_CIRC, &[(0, 1, &[(0, "1")])])],
    )
}

/// Rank-2 Lie structure with the zero bracket.
pub fn zero_pair() -> Structure {
    fixture(AlgebraKind::Lie, &[], &["x", "y"], &[(crate::calgebra::OP_BRACKET, &[])])
}

/// Rank-2 dendriform structure `u succ u = u prec u = t`, with `t` absorbed
/// to zero in every product.
pub fn dendriform_pair() -> Structure {
    fixture(
        AlgebraKind::Dendriform,
        &[],
        &["u", "t"],
        &[
            (OP_SUCC, &[(0, 0, &[(1, "1")])]),
            (OP_PREC, &[(0, 0, &[(1, "1")])]),
        ],
    )
}

/// Rank-2 quadri structure whose only nonzero product is `u ne u = t`.
pub fn quadri_pair() -> Structure {
    fixture(
        AlgebraKind::Quadri,
        &[],
        &["u", "t"],
        &[
            (OP_NE, &[(0, 0, &[(1, "1")])]),
            (crate::calgebra::OP_NW, &[]),
            (crate::calgebra::OP_SW, &[]),
            (crate::calgebra::OP_SE, &[]),
        ],
    )
}

/// Rank-2 left-symmetric structure `x o x = y` with `y` annihilating
/// everything; the base of the pseudo-Hessian example.
pub fn nilpotent_pair() -> Structure {
    fixture(
        AlgebraKind::LeftSymmetric,
        &[],
        &["x", "y"],
        &[(OP_CIRC, &[(0, 0, &[(1, "1")])])],
    )
}

/// The symmetric, nondegenerate 2-cocycle `[[1, 1], [1, 0]]` on a rank-2
/// left-symmetric base; pair it with [`nilpotent_pair`] to run the
/// pseudo-Hessian construction.
pub fn hessian_form(base: &Structure) -> Result<ConformalBilinearForm> {
    let reg = base.registry();
    let texts = [["1", "1"], ["1", "0"]];
    let entries = texts
        .iter()
        .map(|row| row.iter().map(|t| parse_poly(reg, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ConformalBilinearForm::new(base, entries)
}

/// Rank-2 L-dendriform structure on `L`, `W` with
/// `L tri_r_lm L = 2a (g0 - g1 lm) lm W` and
/// `L tri_l_lm L = 2a (d + lm)(g0 + g1 (d + lm)) W`: the vertical split
/// structure that [`scaling_family`] induces on [`lw`] over its adjoint
/// bimodule.
pub fn split_pair() -> Structure {
    fixture(
        AlgebraKind::LDendriform,
        &["g0", "g1", "a"],
        &["L", "W"],
        &[
            (OP_TRI_R, &[(0, 0, &[(1, "2*a*(g0 - g1*lm)*lm")])]),
            (OP_TRI_L, &[(0, 0, &[(1, "2*a*(d + lm)*(g0 + g1*(d + lm))")])]),
        ],
    )
}

/// Parse a matrix of entry strings into a self-map of the structure's module
/// (`rows[i][j]` is the `e_j`-coefficient of the image of `e_i`).
pub fn endomap(s: &Structure, rows: &[&[&str]]) -> Result<ModuleMap> {
    let reg = s.registry();
    let built = rows
        .iter()
        .map(|row| row.iter().map(|t| parse_poly(reg, t)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ModuleMap::new(s.module(), s.module(), reg, built)
}

/// `R(L) = 2a L + (h0 + h1 d + h2 d^2) W`, `R(W) = a W`: a weight-zero
/// Rota-Baxter operator on [`lw`] for every value of the parameters.
pub fn scaling_family(s: &Structure) -> Result<ModuleMap> {
    endomap(s, &[&["2*a", "h0 + h1*d + h2*d^2"], &["0", "a"]])
}

/// `R(L) = (h0 + h1 d + h2 d^2) W`, `R(W) = (q0 + q1 d) W`: a weight-zero
/// Rota-Baxter operator on [`lw`] for every value of the parameters.
pub fn polynomial_family(s: &Structure) -> Result<ModuleMap> {
    endomap(s, &[&["0", "h0 + h1*d + h2*d^2"], &["0", "q0 + q1*d"]])
}

/// `R(L) = (h0 + h1 d + h2 d^2) W`, `R(W) = 0`: the square-zero subfamily of
/// [`polynomial_family`].
pub fn nilpotent_family(s: &Structure) -> Result<ModuleMap> {
    endomap(s, &[&["0", "h0 + h1*d + h2*d^2"], &["0", "0"]])
}

/// `R(L) = (2 + d) L`, `R(W) = W`: a deliberate near-miss of
/// [`scaling_family`] that fails the weight-zero identity at `(L, L)`.
pub fn perturbed_scaling(s: &Structure) -> Result<ModuleMap> {
    endomap(s, &[&["2 + d", "0"], &["0", "1"]])
}

/// The solution families for weight-zero Rota-Baxter self-maps of the
/// two-generator algebra, written `R(L) = p L + h W`, `R(W) = k L + q W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorClass {
    /// The zero map.
    Zero,
    /// `p = k = q = 0` with `h` a nonzero polynomial.
    Nilpotent,
    /// `p = k = 0` with `q` a nonzero polynomial and `h` arbitrary.
    Polynomial,
    /// `k = 0`, `p = 2a`, and `q = a` for a d-free nonzero `a`, with `h`
    /// arbitrary.
    Scaling,
}

impl OperatorClass {
    /// Stable lower-case label, for reports.
    pub fn name(self) -> &'static str {
        match self {
            OperatorClass::Zero => "zero",
            OperatorClass::Nilpotent => "nilpotent",
            OperatorClass::Polynomial => "polynomial",
            OperatorClass::Scaling => "scaling",
        }
    }
}

/// Decide which solution family a rank-2 self-map falls into, if any.
///
/// This is the membership oracle used to cross-check grid searches: on the
/// two-generator algebra a self-map satisfies the weight-zero Rota-Baxter
/// identity exactly when this returns `Some(_)`.  Entries may still involve
/// free parameters; `Scaling` matches whenever `q` is d-free and nonzero with
/// `p = 2q`.
pub fn classify_rb_operator(map: &ModuleMap) -> Result<Option<OperatorClass>> {
    if map.source().rank() != 2
        || map.target().rank() != 2
        || map.source().names() != map.target().names()
    {
        return Err(Error::Precondition(
            "the weight-zero classification applies to self-maps of a rank-2 module".into(),
        ));
    }
    let p = map.entry(0, 0);
    let h = map.entry(0, 1);
    let k = map.entry(1, 0);
    let q = map.entry(1, 1);
    if !k.is_zero() {
        return Ok(None);
    }
    if p.is_zero() {
        return Ok(Some(if q.is_zero() {
            if h.is_zero() {
                OperatorClass::Zero
            } else {
                OperatorClass::Nilpotent
            }
        } else {
            OperatorClass::Polynomial
        }));
    }
    if q.degree_in(VAR_D) == 0 && *p == q.scale(&rat_int(2)) {
        return Ok(Some(OperatorClass::Scaling));
    }
    Ok(None)
}
