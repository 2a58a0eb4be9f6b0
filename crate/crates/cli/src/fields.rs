//! Parsers for the small grammars the CLI accepts: point vectors, scalar
//! fields, numeric lists, and seed ranges.

use ricci_core::geometry::ScalarField;

use crate::errors::{CliError, CliResult};

/// Comma-separated floats, e.g. `"1,0,0.5"`. Spaces around entries are fine.
pub fn parse_vector(s: &str) -> CliResult<Vec<f64>> {
    let v: Result<Vec<f64>, _> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::usage(format!("expected a comma-separated vector, got {s:?}"))),
    }
}

/// Field grammar:
///   `coord:i`       coordinate function x_i
///   `const:c`       constant c
///   `sqdist:x,y,z`  squared distance to the given point
///   `fxy:X;Y`       pair-comparison field of base points X and Y
///   `Fxy:X;Y`       the same, divided by |X - Y| (errors when X = Y)
/// where X and Y are comma-separated vectors.
pub fn parse_field(s: &str) -> CliResult<ScalarField> {
    let Some((kind, rest)) = s.split_once(':') else {
        return Err(CliError::usage(format!(
            "field {s:?} is missing a kind prefix (coord:, const:, sqdist:, fxy:, Fxy:)"
        )));
    };
    match kind {
        "coord" => {
            let i: usize = rest.trim().parse().map_err(|_| {
                CliError::usage(format!("coord: wants an axis index, got {rest:?}"))
            })?;
            Ok(ScalarField::coordinate(i))
        }
        "const" => {
            let c: f64 = rest.trim().parse().map_err(|_| {
                CliError::usage(format!("const: wants a number, got {rest:?}"))
            })?;
            Ok(ScalarField::constant(c))
        }
        "sqdist" => Ok(ScalarField::squared_distance_to(parse_vector(rest)?)),
        "fxy" | "Fxy" => {
            let Some((xs, ys)) = rest.split_once(';') else {
                return Err(CliError::usage(format!(
                    "{kind}: wants two vectors separated by ';', got {rest:?}"
                )));
            };
            let x = parse_vector(xs)?;
            let y = parse_vector(ys)?;
            let field = if kind == "fxy" {
                ScalarField::pair_comparison(x, y)
            } else {
                ScalarField::life_sized(x, y)
            };
            field.map_err(CliError::Core)
        }
        other => Err(CliError::usage(format!("unknown field kind {other:?}"))),
    }
}

/// Comma-separated positive integers, e.g. `"500,1000,2000"`.
pub fn parse_usize_list(s: &str) -> CliResult<Vec<usize>> {
    let v: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(CliError::usage(format!("expected a comma-separated integer list, got {s:?}"))),
    }
}

/// Comma-separated floats used for λ-schedules and n-grids.
pub fn parse_f64_list(s: &str) -> CliResult<Vec<f64>> {
    parse_vector(s)
}

/// Seed set: either an exclusive range `a..b` or a comma list `a,b,c`.
pub fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| bad_seeds(s))?;
        let hi: u64 = b.trim().parse().map_err(|_| bad_seeds(s))?;
        if hi <= lo {
            return Err(bad_seeds(s));
        }
        return Ok((lo..hi).collect());
    }
    let v: Result<Vec<u64>, _> = s.split(',').map(|p| p.trim().parse::<u64>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(bad_seeds(s)),
    }
}

fn bad_seeds(s: &str) -> CliError {
    CliError::usage(format!("expected seeds as 'a..b' or a comma list, got {s:?}"))
}
