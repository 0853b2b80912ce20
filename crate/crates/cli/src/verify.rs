use serde::Serialize;
use sparsedisc::coloring::{class_values, eval_F_column, frac_discrepancy};
use sparsedisc::{discrepancy, is_rainbow, read_coloring, ColoringFile, Discrepancy};

use crate::io::{emit, load_instance, read_text, table, to_json};
use crate::{Failure, VerifyArgs};

#[derive(Serialize)]
struct IntegralReport {
    n: usize,
    k: usize,
    discrepancy: usize,
    witness: Discrepancy,
    /// `values[i][ℓ] = f_i(class ℓ)`.
    values: Vec<Vec<usize>>,
    /// `rainbow[i][r]` for set `r` of function `i`.
    rainbow: Vec<Vec<bool>>,
    all_rainbow: bool,
}

#[derive(Serialize)]
struct FractionalReport {
    n: usize,
    k: usize,
    frac_discrepancy: f64,
    values: Vec<Vec<f64>>,
    fractional_rows: usize,
}

pub fn run(args: VerifyArgs) -> Result<(), Failure> {
    let inst = load_instance(&args.input)?;
    let file = read_coloring(&read_text(&args.coloring)?)?;
    if file.k() != args.k {
        return Err(Failure(format!(
            "coloring has k = {}, expected {}",
            file.k(),
            args.k
        )));
    }
    if file.n() != inst.n() {
        return Err(Failure(format!(
            "coloring has {} items, instance has {}",
            file.n(),
            inst.n()
        )));
    }
    let (json, rows) = match file {
        ColoringFile::Integral(chi) => {
            let d = discrepancy(&inst, &chi);
            let rainbow: Vec<Vec<bool>> = inst
                .functions()
                .iter()
                .map(|f| {
                    f.sets()
                        .iter()
                        .map(|s| is_rainbow(s, chi.colors(), args.k))
                        .collect()
                })
                .collect();
            let all_rainbow = rainbow.iter().flatten().all(|&r| r);
            let report = IntegralReport {
                n: inst.n(),
                k: args.k,
                discrepancy: d.value,
                witness: d,
                values: class_values(&inst, &chi),
                rainbow,
                all_rainbow,
            };
            let rows = vec![
                ("discrepancy".to_string(), d.value.to_string()),
                ("witness function".into(), d.function.to_string()),
                ("all sets rainbow".into(), all_rainbow.to_string()),
            ];
            (to_json(&report), rows)
        }
        ColoringFile::Fractional(y) => {
            let values = inst
                .functions()
                .iter()
                .map(|f| (0..args.k).map(|c| eval_F_column(f, &y, c)).collect())
                .collect();
            let report = FractionalReport {
                n: inst.n(),
                k: args.k,
                frac_discrepancy: frac_discrepancy(&inst, &y),
                values,
                fractional_rows: y.num_fractional(),
            };
            let rows = vec![
                (
                    "fractional discrepancy".to_string(),
                    format!("{:e}", report.frac_discrepancy),
                ),
                ("fractional rows".into(), report.fractional_rows.to_string()),
            ];
            (to_json(&report), rows)
        }
    };
    if args.pretty {
        print!("{}", table(&rows));
        if let Some(out) = &args.out {
            emit(Some(out), &json)?;
        }
        Ok(())
    } else {
        emit(args.out.as_deref(), &json)
    }
}
