use serde::Serialize;
use sparsedisc::oracle::{min_discrepancy_exhaustive_with_limit, MAX_ENUMERATION};
use sparsedisc::{discrepancy, read_coloring, ColoringFile, Discrepancy, OracleError};

use crate::io::{emit, load_instance, read_text, table, to_json};
use crate::{Failure, OracleArgs};

#[derive(Serialize)]
struct Comparison {
    discrepancy: usize,
    gap: usize,
}

#[derive(Serialize)]
struct OracleReport {
    n: usize,
    k: usize,
    minimum: usize,
    witness: Discrepancy,
    chi: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compare: Option<Comparison>,
}

fn limit() -> Result<u128, Failure> {
    match std::env::var("SPARSEDISC_MAX_ENUM") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure(format!(
                "SPARSEDISC_MAX_ENUM must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(MAX_ENUMERATION),
    }
}

pub fn run(args: OracleArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let (chi, best) = match min_discrepancy_exhaustive_with_limit(&inst, args.k, limit()?) {
        Ok(v) => v,
        Err(e @ OracleError::TooLarge { .. }) => {
            return Err(Failure(format!(
                "{e}; use a smaller instance or raise SPARSEDISC_MAX_ENUM"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let compare = match &args.compare {
        Some(path) => {
            let ColoringFile::Integral(other) = read_coloring(&read_text(path)?)? else {
                return Err(Failure("--compare needs an integral coloring".into()));
            };
            if other.k() != args.k || other.n() != inst.n() {
                return Err(Failure(format!(
                    "compared coloring has n = {}, k = {}; expected n = {}, k = {}",
                    other.n(),
                    other.k(),
                    inst.n(),
                    args.k
                )));
            }
            let d = discrepancy(&inst, &other).value;
            Some(Comparison {
                discrepancy: d,
                gap: d - best.value,
            })
        }
        None => None,
    };
    let report = OracleReport {
        n: inst.n(),
        k: args.k,
        minimum: best.value,
        witness: best,
        chi: chi.colors().to_vec(),
        compare,
    };
    let json = to_json(&report);
    if args.pretty {
        let mut rows = vec![
            ("minimum".to_string(), report.minimum.to_string()),
            ("witness".into(), format!("{:?}", report.chi)),
        ];
        if let Some(c) = &report.compare {
            rows.push(("compared".into(), c.discrepancy.to_string()));
            rows.push(("gap".into(), c.gap.to_string()));
        }
        print!("{}", table(&rows));
        if let Some(out) = &args.out {
            emit(Some(out), &json)?;
        }
        Ok(())
    } else {
        emit(args.out.as_deref(), &json)
    }
}
