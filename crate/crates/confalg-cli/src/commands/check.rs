//! `confalg check`: validate a definition file — structure axioms, bimodule
//! laws, and bilinear-form properties.

use confalg::bimodule::check_bimodule;
use confalg::calgebra::AlgebraKind;

use crate::report::Report;
use crate::{defs, CheckArgs, Cli};

pub fn run(_cli: &Cli, args: &CheckArgs) -> anyhow::Result<Report> {
    let loaded = defs::load(&args.file, args.kind.as_deref())?;
    let mut report = Report::new("check", &loaded.name);
    report.detail("kind", loaded.structure.kind().name());
    report.absorb("", &loaded.structure.check_axioms()?);
    if loaded.def.bimodule.is_some() {
        let m = defs::build_bimodule(&loaded)?;
        report.absorb("bimodule", &check_bimodule(&m)?);
    }
    for name in loaded.def.bilinear_forms.keys() {
        let form = defs::form(&loaded, name)?;
        report.push_check(format!("{name}:symmetric"), form.is_symmetric()?);
        report.push_check(format!("{name}:nondegenerate"), form.is_nondegenerate()?);
        if loaded.structure.kind() == AlgebraKind::LeftSymmetric {
            report.absorb(name, &form.check_cocycle()?);
        }
    }
    Ok(report)
}
