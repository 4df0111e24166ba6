use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{FormulationError, MipModel, Rational, Sense, VarKind};

const TERMS_PER_LINE: usize = 8;

/// Exact decimal rendering, or an error if the denominator has a prime
/// factor other than 2 and 5.
pub fn format_decimal(r: &Rational) -> Result<String, FormulationError> {
    let mut den = r.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return Err(FormulationError::NonRepresentableCoefficient(format!("{}/{}", r.numer(), r.denom())));
    }
    let places = twos.max(fives);
    let scaled = r.numer() * num_traits::pow(BigInt::from(10), places) / r.denom();
    let digits = scaled.abs().to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return Ok(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int, frac) = padded.split_at(padded.len() - places);
    Ok(format!("{sign}{int}.{frac}"))
}

fn write_terms(out: &mut String, model: &MipModel, terms: &[(usize, Rational)]) -> Result<(), FormulationError> {
    for (i, (v, c)) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_negative() { '-' } else { '+' };
        let name = &model.variables()[*v].name;
        let mag = c.abs();
        if mag.is_one() {
            write!(out, " {sign} {name}").unwrap();
        } else {
            write!(out, " {sign} {} {name}", format_decimal(&mag)?).unwrap();
        }
    }
    Ok(())
}

/// CPLEX LP text. Variables and rows appear in declaration order.
pub fn emit_lp(model: &MipModel) -> Result<String, FormulationError> {
    let mut out = String::new();
    writeln!(out, "\\ {}", model.name).unwrap();
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, model, model.objective())?;
    out.push_str("\nSubject To\n");
    for c in model.constraints() {
        write!(out, " {}:", c.name).unwrap();
        if c.terms.is_empty() {
            // LP format has no empty rows; a zero multiple keeps the row.
            write!(out, " 0 {}", model.variables().first().map_or("", |v| v.name.as_str())).unwrap();
        }
        write_terms(&mut out, model, &c.terms)?;
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        writeln!(out, " {op} {}", format_decimal(&c.rhs)?).unwrap();
    }
    out.push_str("Bounds\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Continuous) {
        let line = match (&v.lower, &v.upper) {
            (None, None) => format!("{} free", v.name),
            (Some(l), None) => format!("{} >= {}", v.name, format_decimal(l)?),
            (None, Some(u)) => format!("-inf <= {} <= {}", v.name, format_decimal(u)?),
            (Some(l), Some(u)) => format!("{} <= {} <= {}", format_decimal(l)?, v.name, format_decimal(u)?),
        };
        writeln!(out, " {line}").unwrap();
    }
    out.push_str("Binaries\n");
    for v in model.variables().iter().filter(|v| v.kind == VarKind::Binary) {
        writeln!(out, " {}", v.name).unwrap();
    }
    out.push_str("End\n");
    Ok(out)
}
