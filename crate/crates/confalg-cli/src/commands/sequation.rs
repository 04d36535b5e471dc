//! `confalg sequation`: check a two-slot tensor against the symmetric
//! solution equation (the tensor's double bracket with itself must vanish) —
//! either a tensor stored in the file over its left-symmetric structure, or
//! the canonical tensor of an L-dendriform structure over its ambient
//! semidirect-product structure.

use anyhow::bail;

use confalg::bimodule::LDendFlavor;
use confalg::sequation::{canonical_r, check_s_equation};

use crate::report::Report;
use crate::{defs, Cli, SequationArgs};

pub fn run(_cli: &Cli, args: &SequationArgs) -> anyhow::Result<Report> {
    let loaded = defs::load(&args.file, None)?;
    let mut report = Report::new("sequation", &loaded.name);
    if args.canonical {
        let flavor = LDendFlavor::parse(&args.flavor)?;
        report.detail("tensor", "canonical");
        report.detail("flavor", flavor.name());
        let (r, ambient) = canonical_r(&loaded.structure, flavor)?;
        report.detail("ambient", format!("rank {}", ambient.rank()));
        report.absorb("", &check_s_equation(&ambient, &r)?);
    } else {
        let Some(name) = &args.r else {
            bail!("pass --r NAME or --canonical");
        };
        let r = defs::tensor(&loaded, name)?;
        report.detail("tensor", name);
        report.absorb("", &check_s_equation(&loaded.structure, &r)?);
    }
    Ok(report)
}
