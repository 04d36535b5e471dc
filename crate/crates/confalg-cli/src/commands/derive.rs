//! `confalg derive`: compute a new definition from a stored one — structure
//! conversions, semidirect products, dual bimodules, induced split
//! structures, deformed products, the pseudo-Hessian splitting, and the
//! tensor constructions.
//!
//! The derived definition is written to `--out` (with a short report on
//! stdout) or printed as canonical JSON when no `--out` is given.

use anyhow::Context;

use confalg::bimodule::{dual_bimodule, semidirect_product, LDendFlavor};
use confalg::calgebra::Conversion;
use confalg::operators::{deformed_product, induced_l_dendriform};
use confalg::sequation::{canonical_r, r_from_t, ConformalMap};

use crate::report::Report;
use crate::{defs, Cli, DeriveArgs, DeriveWhat};

fn required<'a>(value: &'a Option<String>, flag: &str, what: &str) -> anyhow::Result<&'a str> {
    value
        .as_deref()
        .with_context(|| format!("--what {what} needs {flag}"))
}

pub fn run(cli: &Cli, args: &DeriveArgs) -> anyhow::Result<i32> {
    let loaded = defs::load(&args.file, None)?;
    let s = &loaded.structure;

    let def_out = match args.what {
        DeriveWhat::Commutator => {
            defs::definition_from_structure(&s.derive_structure(Conversion::Commutator)?)
        }
        DeriveWhat::Horizontal => {
            defs::definition_from_structure(&s.derive_structure(Conversion::Horizontal)?)
        }
        DeriveWhat::Vertical => {
            defs::definition_from_structure(&s.derive_structure(Conversion::Vertical)?)
        }
        DeriveWhat::Transpose => {
            defs::definition_from_structure(&s.derive_structure(Conversion::Transpose)?)
        }
        DeriveWhat::Semidirect => {
            let m = defs::build_bimodule(&loaded)?;
            defs::definition_from_structure(&semidirect_product(&m)?)
        }
        DeriveWhat::Dual => {
            let m = defs::build_bimodule(&loaded)?;
            let dual = dual_bimodule(&m)?;
            let mut def = defs::definition_from_structure(s);
            defs::attach_bimodule(&mut def, &dual);
            def
        }
        DeriveWhat::InducedLd => {
            let op = required(&args.op, "--op", "induced-ld")?;
            let flavor = LDendFlavor::parse(&args.flavor)?;
            let m = defs::build_bimodule(&loaded)?;
            let t = defs::space_map(&loaded, &m, op)?;
            defs::definition_from_structure(&induced_l_dendriform(&t, &m, flavor)?)
        }
        DeriveWhat::Deformed => {
            let op = required(&args.op, "--op", "deformed")?;
            let n = defs::endomap(&loaded, op)?;
            defs::definition_from_structure(&deformed_product(s, &n)?)
        }
        DeriveWhat::PseudoHessian => {
            let name = required(&args.form, "--form", "pseudo-hessian")?;
            let form = defs::form(&loaded, name)?;
            defs::definition_from_structure(&confalg::bimodule::pseudo_hessian_structure(
                s, &form,
            )?)
        }
        DeriveWhat::CanonicalR => {
            let flavor = LDendFlavor::parse(&args.flavor)?;
            let (r, ambient) = canonical_r(s, flavor)?;
            let mut def = defs::definition_from_structure(&ambient);
            defs::attach_tensor(&mut def, "canonical", &r);
            def
        }
        DeriveWhat::RFromT => {
            let op = required(&args.op, "--op", "r-from-t")?;
            let m = defs::build_bimodule(&loaded)?;
            let t = defs::space_map(&loaded, &m, op)?;
            let (r, ambient) = r_from_t(&ConformalMap::from_module_map(&t), &m)?;
            let mut def = defs::definition_from_structure(&ambient);
            defs::attach_tensor(&mut def, "r", &r);
            def
        }
    };

    let json = defs::to_json(&def_out);
    if let Some(out) = &args.out {
        std::fs::write(out, &json)
            .with_context(|| format!("cannot write `{}`", out.display()))?;
        let mut report = Report::new("derive", &loaded.name);
        report.detail("kind", &def_out.kind);
        report.detail("basis", def_out.basis.join(", "));
        report.detail("out", out.display().to_string());
        Ok(report.print(cli.json))
    } else {
        crate::report::emit(&json);
        Ok(0)
    }
}
