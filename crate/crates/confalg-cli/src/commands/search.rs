//! `confalg search`: turn a polynomial operator ansatz into an exact
//! constraint system on its coefficients, report the free directions, and
//! (with `--grid`) enumerate and re-verify every solution over a finite value
//! grid.

use std::str::FromStr;

use anyhow::{bail, Context};

use confalg::polyring::{parse_poly, Rat};
use confalg::search::{generate_system, SearchSubject, DEFAULT_GRID_CAP};

use crate::report::{Report, Solutions};
use crate::{defs, Cli, OperatorTest, SearchArgs};

fn parse_grid(text: &str) -> anyhow::Result<Vec<Rat>> {
    let mut values = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        values.push(
            Rat::from_str(token)
                .ok()
                .with_context(|| format!("`{token}` is not a rational grid value"))?,
        );
    }
    if values.is_empty() {
        bail!("the grid needs at least one value");
    }
    Ok(values)
}

pub fn run(cli: &Cli, args: &SearchArgs) -> anyhow::Result<Report> {
    if args.degree > cli.max_degree {
        bail!(
            "ansatz degree {} exceeds --max-degree {}",
            args.degree,
            cli.max_degree
        );
    }
    let loaded = defs::load(&args.file, None)?;
    let s = &loaded.structure;
    let mut report = Report::new("search", &loaded.name);
    report.detail("test", args.test.name());
    report.detail("degree", args.degree.to_string());

    let bimodule;
    let subject = match args.test {
        OperatorTest::Rb => {
            let weight = parse_poly(s.registry(), &args.weight)?;
            report.detail("weight", weight.to_string());
            SearchSubject::RotaBaxter { structure: s, weight }
        }
        OperatorTest::Nijenhuis => SearchSubject::Nijenhuis { structure: s },
        OperatorTest::O => {
            bimodule = defs::build_bimodule(&loaded)?;
            SearchSubject::OOperator { bimodule: &bimodule }
        }
        OperatorTest::Compatible => bail!("search supports --test rb, nijenhuis, or o"),
    };

    let system = generate_system(&subject, args.degree)?;
    let mut solutions = Solutions {
        unknowns: system.unknowns().len(),
        equations: system.equations().len(),
        free: system.free_directions().into_iter().map(String::from).collect(),
        candidates: None,
        points: None,
    };
    if let Some(grid_text) = &args.grid {
        let values = parse_grid(grid_text)?;
        let grid_display: Vec<String> = values.iter().map(Rat::to_string).collect();
        report.detail("grid", grid_display.join(", "));
        let cap = args.max_points.unwrap_or(DEFAULT_GRID_CAP);
        let found = system.grid_enumerate_capped(&values, cap)?;
        solutions.candidates = Some(found.candidates);
        solutions.points = Some(
            found
                .points
                .iter()
                .map(|point| {
                    point
                        .values
                        .iter()
                        .map(|(name, value)| (name.clone(), value.to_string()))
                        .collect()
                })
                .collect(),
        );
    }
    report.solutions = Some(solutions);
    Ok(report)
}
