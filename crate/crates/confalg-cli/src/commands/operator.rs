//! `confalg operator`: test a named operator matrix against one of the
//! operator identities, symbolically and (optionally) at random parameter
//! values.

use anyhow::bail;

use confalg::operators::{
    check_compatible_o_operators, check_nijenhuis, check_o_operator, check_rota_baxter,
};
use confalg::polyring::parse_poly;
use confalg::search::{spot_check_family, SearchSubject};

use crate::report::Report;
use crate::{defs, Cli, OperatorArgs, OperatorTest};

pub fn run(cli: &Cli, args: &OperatorArgs) -> anyhow::Result<Report> {
    let loaded = defs::load(&args.file, None)?;
    let s = &loaded.structure;
    let mut report = Report::new("operator", &loaded.name);
    report.detail("op", &args.op);
    report.detail("test", args.test.name());
    if args.op2.is_some() && args.test != OperatorTest::Compatible {
        bail!("only --test compatible uses --op2");
    }

    let spot = |report: &mut Report, subject: &SearchSubject, map| -> anyhow::Result<()> {
        if args.spot > 0 {
            report.detail("spot", args.spot.to_string());
            report.detail("seed", cli.seed.to_string());
            report.absorb("spot", &spot_check_family(subject, map, args.spot, cli.seed)?);
        }
        Ok(())
    };

    match args.test {
        OperatorTest::Rb => {
            let t = defs::endomap(&loaded, &args.op)?;
            let weight = parse_poly(s.registry(), &args.weight)?;
            report.detail("weight", weight.to_string());
            report.absorb("", &check_rota_baxter(s, &t, &weight)?);
            let subject = SearchSubject::RotaBaxter { structure: s, weight };
            spot(&mut report, &subject, &t)?;
        }
        OperatorTest::Nijenhuis => {
            let n = defs::endomap(&loaded, &args.op)?;
            report.absorb("", &check_nijenhuis(s, &n)?);
            let subject = SearchSubject::Nijenhuis { structure: s };
            spot(&mut report, &subject, &n)?;
        }
        OperatorTest::O => {
            let m = defs::build_bimodule(&loaded)?;
            let t = defs::space_map(&loaded, &m, &args.op)?;
            report.absorb("", &check_o_operator(&t, &m)?);
            let subject = SearchSubject::OOperator { bimodule: &m };
            spot(&mut report, &subject, &t)?;
        }
        OperatorTest::Compatible => {
            if args.spot > 0 {
                bail!("spot checks are not available for --test compatible");
            }
            let Some(op2) = &args.op2 else {
                bail!("--test compatible needs --op2");
            };
            report.detail("op2", op2);
            let m = defs::build_bimodule(&loaded)?;
            let t1 = defs::space_map(&loaded, &m, &args.op)?;
            let t2 = defs::space_map(&loaded, &m, op2)?;
            report.absorb("", &check_compatible_o_operators(&t1, &t2, &m)?);
        }
    }
    Ok(report)
}
