//! Line-oriented text formats.
//!
//! Polynomials, in the variable `t` (or `u`):
//!
//! ```text
//! [1, -3/2, 1/2]            ascending coefficients
//! poly: [1, -3/2, 1/2]      same, with an optional prefix
//! 1/2t^2 - 3/2t + 1         expression form
//! ```
//!
//! Tuples: `a: [6, 10, 15]`, `[6, 10, 15]` or `6,10,15`.
//!
//! Family files hold one `poly:` line per polynomial plus `m:` and `l:`
//! lines. Series files hold `t value` lines where the value is an integer, a
//! rational or `-inf`. In every file `#` starts a comment.
//!
//! System files start with `key: value` header lines (`kind: system` or
//! `kind: exclusion`, `m`, `n1`, `n2`, `objective`) followed by a `[system]`
//! section, or by `[L1]` and `[L2]` sections for exclusion problems. A
//! section may open with `nonneg: all`, `nonneg: none` or a 0/1 list
//! (default: all variables nonnegative); every other line is a row
//! `coeffs | <= | rhs` with `<=`, `=` or `>=`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::eqpfit::{FitResult, SampleSeries, NO_FIT_NOTE};
use crate::error::{Error, Result};
use crate::pilp::{ExclusionProblem, ParametricConstraintSystem, Row};
use crate::qpoly::{rat, ExtendedValue, Poly, Rational};
use crate::reduction::PolyFamily;

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        BigInt::from_str(s).ok().map(Rational::from_integer)
    }
}

/// Splits on commas outside brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_term(term: &str) -> std::result::Result<(Rational, usize), String> {
    let term: String = term.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    let var_at = term.find(['t', 'u']);
    let (coef_str, power) = match var_at {
        None => (term.as_str(), 0),
        Some(i) => {
            let rest = &term[i + 1..];
            let power = if rest.is_empty() {
                1
            } else if let Some(e) = rest.strip_prefix('^') {
                e.parse::<usize>().map_err(|_| format!("bad exponent in '{term}'"))?
            } else {
                return Err(format!("unexpected text after the variable in '{term}'"));
            };
            (&term[..i], power)
        }
    };
    let coef = if coef_str.is_empty() {
        rat(1)
    } else {
        parse_rational(coef_str).ok_or_else(|| format!("bad coefficient '{coef_str}'"))?
    };
    Ok((coef, power))
}

fn parse_expression(s: &str) -> std::result::Result<Poly, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty polynomial".into());
    }
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let mut after_sign = false;
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && !current.trim_end().ends_with('^') {
            if current.trim().is_empty() {
                if after_sign || !terms.is_empty() {
                    return Err(format!("repeated sign in '{s}'"));
                }
            } else {
                terms.push((negative, std::mem::take(&mut current)));
            }
            negative = ch == '-';
            after_sign = true;
        } else {
            current.push(ch);
            if !ch.is_whitespace() {
                after_sign = false;
            }
        }
    }
    if current.trim().is_empty() {
        return Err(format!("dangling sign in '{s}'"));
    }
    terms.push((negative, current));
    let mut coeffs: Vec<Rational> = Vec::new();
    for (neg, term) in terms {
        let (c, k) = parse_term(&term)?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::zero());
        }
        coeffs[k] += if neg { -c } else { c };
    }
    Ok(Poly::new(coeffs))
}

/// A polynomial in list or expression form; see the module docs.
pub fn parse_poly(s: &str) -> Result<Poly> {
    let s = s.trim();
    let s = s.strip_prefix("poly:").map(str::trim).unwrap_or(s);
    if let Some(inner) = s.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::invalid(format!("unterminated coefficient list '{s}'")))?;
        if inner.trim().is_empty() {
            return Ok(Poly::zero());
        }
        let coeffs = inner
            .split(',')
            .map(|c| parse_rational(c).ok_or_else(|| Error::invalid(format!("bad coefficient '{}'", c.trim()))))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Poly::new(coeffs));
    }
    parse_expression(s).map_err(Error::invalid)
}

/// `a: [6, 10, 15]`, `[6, 10, 15]` or `6,10,15`.
pub fn parse_tuple(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    let s = s.strip_prefix("a:").map(str::trim).unwrap_or(s);
    let s = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(s);
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad tuple entry '{}'", x.trim())))
        })
        .collect()
}

fn parse_u64_field(value: &str, line: usize, key: &str) -> Result<u64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("'{key}' needs a nonnegative integer")))
}

pub fn parse_family(text: &str) -> Result<PolyFamily> {
    let mut polys = Vec::new();
    let (mut m, mut l) = (1u64, 1u64);
    for (idx, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::parse(idx + 1, "expected 'key: value'"))?;
        match key.trim() {
            "poly" => polys.push(parse_poly(value).map_err(|e| Error::parse(idx + 1, e.to_string()))?),
            "m" => m = parse_u64_field(value, idx + 1, "m")?,
            "l" => l = parse_u64_field(value, idx + 1, "l")?,
            other => return Err(Error::parse(idx + 1, format!("unknown key '{other}'"))),
        }
    }
    PolyFamily::new(polys, m, l)
}

pub fn format_family(fam: &PolyFamily) -> String {
    let mut out = String::new();
    for p in fam.polys() {
        let _ = writeln!(out, "poly: {}", p.to_list_string());
    }
    let _ = writeln!(out, "m: {}", fam.m());
    let _ = writeln!(out, "l: {}", fam.l());
    out
}

/// Contents of a system file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemFile {
    System {
        sys: ParametricConstraintSystem,
        objective: Option<Vec<Poly>>,
    },
    Exclusion(ExclusionProblem),
}

#[derive(Default)]
struct Section {
    nonneg: Option<Vec<bool>>,
    rows: Vec<(usize, Vec<Poly>, String, Poly)>,
}

fn parse_row(line: &str, idx: usize) -> Result<(usize, Vec<Poly>, String, Poly)> {
    let parts: Vec<&str> = line.split('|').collect();
    if parts.len() != 3 {
        return Err(Error::parse(idx, "a row reads 'coeffs | <= | rhs'"));
    }
    let coeffs = split_top_level(parts[0])
        .into_iter()
        .map(|c| parse_poly(c).map_err(|e| Error::parse(idx, e.to_string())))
        .collect::<Result<Vec<_>>>()?;
    let rhs = parse_poly(parts[2]).map_err(|e| Error::parse(idx, e.to_string()))?;
    Ok((idx, coeffs, parts[1].trim().to_string(), rhs))
}

fn build_system(section: Section, n: usize, name: &str) -> Result<ParametricConstraintSystem> {
    let rows = section
        .rows
        .into_iter()
        .map(|(idx, coeffs, sense, rhs)| {
            if coeffs.len() != n {
                return Err(Error::parse(idx, format!("{name} rows need {n} coefficients, found {}", coeffs.len())));
            }
            match sense.as_str() {
                "<=" => Ok(Row::le(coeffs, rhs)),
                "=" | "==" => Ok(Row::eq(coeffs, rhs)),
                ">=" => Ok(Row::ge(coeffs, rhs)),
                other => Err(Error::parse(idx, format!("unknown sense '{other}'"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let nonneg = section.nonneg.unwrap_or_else(|| vec![true; n]);
    ParametricConstraintSystem::new(n, rows, nonneg)
}

fn parse_nonneg(value: &str, idx: usize) -> Result<Option<Vec<bool>>> {
    match value.trim() {
        "all" => Ok(None),
        "none" => Ok(Some(Vec::new())),
        list => list
            .split(',')
            .map(|f| match f.trim() {
                "1" => Ok(true),
                "0" => Ok(false),
                other => Err(Error::parse(idx, format!("nonneg flags are 0 or 1, got '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Some),
    }
}

pub fn parse_system_file(text: &str) -> Result<SystemFile> {
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    let mut none_flag: BTreeMap<String, bool> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let idx = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !["system", "L1", "L2"].contains(&name.as_str()) {
                return Err(Error::parse(idx, format!("unknown section '[{name}]'")));
            }
            if sections.contains_key(&name) {
                return Err(Error::parse(idx, format!("section '[{name}]' appears twice")));
            }
            sections.insert(name.clone(), Section::default());
            current = Some(name);
            continue;
        }
        match &current {
            None => {
                let (k, v) = line
                    .split_once(':')
                    .ok_or_else(|| Error::parse(idx, "expected a 'key: value' header line"))?;
                header.insert(k.trim().to_string(), (idx, v.trim().to_string()));
            }
            Some(name) => {
                let section = sections.get_mut(name).expect("opened");
                if let Some(v) = line.strip_prefix("nonneg:") {
                    match parse_nonneg(v, idx)? {
                        Some(flags) if flags.is_empty() => {
                            none_flag.insert(name.clone(), true);
                        }
                        flags => section.nonneg = flags,
                    }
                } else {
                    section.rows.push(parse_row(line, idx)?);
                }
            }
        }
    }
    let field = |key: &str| -> Result<Option<u64>> {
        header
            .get(key)
            .map(|(idx, v)| parse_u64_field(v, *idx, key))
            .transpose()
    };
    let objective = header
        .get("objective")
        .map(|(idx, v)| {
            split_top_level(v)
                .into_iter()
                .map(|c| parse_poly(c).map_err(|e| Error::parse(*idx, e.to_string())))
                .collect::<Result<Vec<_>>>()
        })
        .transpose()?;
    let kind = header.get("kind").map(|(_, v)| v.as_str()).unwrap_or("system");
    let system_n = match field("n")? {
        Some(n) => Some(n as usize),
        None => sections.get("system").and_then(|s| s.rows.first()).map(|r| r.1.len()),
    };
    let mut take = |name: &str, n: usize| -> Result<ParametricConstraintSystem> {
        let mut section = sections
            .remove(name)
            .ok_or_else(|| Error::invalid(format!("missing section '[{name}]'")))?;
        if none_flag.get(name).copied().unwrap_or(false) {
            section.nonneg = Some(vec![false; n]);
        }
        build_system(section, n, name)
    };
    match kind {
        "system" => {
            let n = system_n.ok_or_else(|| Error::invalid("a system needs 'n:' or at least one row"))?;
            let sys = take("system", n)?;
            Ok(SystemFile::System { sys, objective })
        }
        "exclusion" => {
            let m = field("m")?.unwrap_or(1);
            let n1 = field("n1")?.ok_or_else(|| Error::invalid("exclusion files need 'n1:'"))? as usize;
            let n2 = field("n2")?.ok_or_else(|| Error::invalid("exclusion files need 'n2:'"))? as usize;
            let sys1 = take("L1", n1 + n2)?;
            let sys2 = take("L2", n2)?;
            let c = objective.unwrap_or_else(|| vec![Poly::constant(rat(1)); n2]);
            Ok(SystemFile::Exclusion(ExclusionProblem::new(m, n1, n2, sys1, sys2, c)?))
        }
        other => Err(Error::invalid(format!("unknown kind '{other}'"))),
    }
}

fn parse_value(s: &str) -> Option<ExtendedValue> {
    if s == "-inf" {
        Some(ExtendedValue::Bottom)
    } else {
        parse_rational(s).map(ExtendedValue::Finite)
    }
}

/// Reads `t value` lines. Keys need not be contiguous here; see
/// [`parse_series`].
pub fn parse_series_map(text: &str) -> Result<BTreeMap<i64, ExtendedValue>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(t), Some(v), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::parse(i + 1, "expected 't value'"));
        };
        let t: i64 = t.parse().map_err(|_| Error::parse(i + 1, format!("bad t '{t}'")))?;
        let v = parse_value(v).ok_or_else(|| Error::parse(i + 1, format!("bad value '{v}'")))?;
        if out.insert(t, v).is_some() {
            return Err(Error::parse(i + 1, format!("t = {t} appears twice")));
        }
    }
    Ok(out)
}

pub fn parse_series(text: &str) -> Result<SampleSeries> {
    SampleSeries::new(parse_series_map(text)?)
}

pub fn format_series(samples: &BTreeMap<i64, ExtendedValue>) -> String {
    let mut out = String::new();
    for (t, v) in samples {
        let _ = writeln!(out, "{t} {v}");
    }
    out
}

/// Fit report as `key=value` lines (`machine`) or as a readable summary.
pub fn format_fit_report(result: &FitResult, machine: bool) -> String {
    let mut out = String::new();
    match result {
        FitResult::Fit { qp, holdout } => {
            if machine {
                let _ = writeln!(out, "result=FIT");
                let _ = writeln!(out, "period={}", qp.period());
                let _ = writeln!(out, "threshold={}", qp.threshold());
                for (r, c) in qp.components().iter().enumerate() {
                    let text = match c {
                        crate::qpoly::Component::Bottom => "-inf".to_string(),
                        crate::qpoly::Component::Poly(p) => p.to_list_string(),
                    };
                    let _ = writeln!(out, "component.{r}={text}");
                }
                let _ = writeln!(out, "holdout.checked={}", holdout.checked);
                let _ = writeln!(out, "holdout.agree={}", holdout.agree);
            } else {
                let _ = writeln!(out, "FIT  period {}  threshold {}", qp.period(), qp.threshold());
                for (r, c) in qp.components().iter().enumerate() {
                    let _ = writeln!(out, "  t = {r} mod {}: {c}", qp.period());
                }
                let _ = writeln!(out, "  holdout: {}/{} samples agree", holdout.agree, holdout.checked);
            }
        }
        FitResult::NoFit { diagnostics } => {
            if machine {
                let _ = writeln!(out, "result=NO_FIT");
                let _ = writeln!(out, "note={NO_FIT_NOTE}");
                for d in diagnostics {
                    let _ = writeln!(out, "diagnostic={d}");
                }
            } else {
                let _ = writeln!(out, "NO_FIT  ({NO_FIT_NOTE})");
                for d in diagnostics {
                    let _ = writeln!(out, "  {d}");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::ratio;
    use proptest::prelude::*;

    #[test]
    fn poly_forms() {
        let half = Poly::new(vec![rat(1), ratio(-3, 2), ratio(1, 2)]);
        assert_eq!(parse_poly("poly: [1, -3/2, 1/2]").unwrap(), half);
        assert_eq!(parse_poly("[1,-3/2,1/2]").unwrap(), half);
        assert_eq!(parse_poly("1/2t^2 - 3/2t + 1").unwrap(), half);
        assert_eq!(parse_poly("2t+1").unwrap(), Poly::from_ints(&[1, 2]));
        assert_eq!(parse_poly("t^2").unwrap(), Poly::from_ints(&[0, 0, 1]));
        assert_eq!(parse_poly("-t + 3 * u^2").unwrap(), Poly::from_ints(&[0, -1, 3]));
        assert_eq!(parse_poly("0").unwrap(), Poly::zero());
        assert_eq!(parse_poly("[]").unwrap(), Poly::zero());
        assert_eq!(parse_poly("-3").unwrap(), Poly::from_ints(&[-3]));
        for bad in ["", "t^x", "2t3", "[1, 2", "1/0", "t +", "x"] {
            assert!(parse_poly(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn tuples() {
        assert_eq!(parse_tuple("a: [6, 10, 15]").unwrap(), vec![6, 10, 15]);
        assert_eq!(parse_tuple("3,5").unwrap(), vec![3, 5]);
        assert!(parse_tuple("3,-5").is_err());
    }

    #[test]
    fn family_round_trip() {
        let fam = parse_family("# cubic\npoly: t\npoly: t^2 + 1\npoly: [-1, 2, 1]\nm: 2\nl: 3\n").unwrap();
        assert_eq!(fam.polys().len(), 3);
        assert_eq!((fam.m(), fam.l()), (2, 3));
        assert_eq!(parse_family(&format_family(&fam)).unwrap(), fam);
        assert!(matches!(parse_family("poly: t\nbogus: 1"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_family("poly: t\npoly: -t\n").is_err());
    }

    #[test]
    fn system_files() {
        let tri = "kind: system\nobjective: 1, 1\n[system]\n1, 1 | <= | t\n";
        match parse_system_file(tri).unwrap() {
            SystemFile::System { sys, objective } => {
                assert_eq!(sys.n(), 2);
                assert!(sys.all_nonneg());
                assert_eq!(objective.unwrap().len(), 2);
            }
            other => panic!("{other:?}"),
        }
        let ex = "kind: exclusion\nm: 1\nn1: 1\nn2: 1\n[L1]\nnonneg: 1, 1\n1, 0 | <= | t\n0, 1 | <= | t\n3, -5 | <= | 0\n-5, 8 | <= | 0\n[L2]\n1 | <= | t\n";
        match parse_system_file(ex).unwrap() {
            SystemFile::Exclusion(p) => {
                assert_eq!((p.m, p.n1, p.n2), (1, 1, 1));
                assert_eq!(p.sys1.rows().len(), 4);
            }
            other => panic!("{other:?}"),
        }
        let free = "[system]\nnonneg: none\n1, [0, 1] | >= | 2\n";
        match parse_system_file(free).unwrap() {
            SystemFile::System { sys, .. } => {
                assert!(!sys.nonneg_flags()[0]);
                assert_eq!(sys.rows()[0].coeffs[1], Poly::from_ints(&[0, -1]));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_system_file("[system]\n1 | < | 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_system_file("[system]\n1, 2 | <= | 2\n1 | <= | 1\n").is_err());
        assert!(parse_system_file("kind: exclusion\nn1: 1\n[L1]\n1, 1 | <= | 1\n").is_err());
    }

    #[test]
    fn series_io() {
        let s = parse_series("# t value\n3 -1\n4 7/2\n5 -inf\n").unwrap();
        assert_eq!(s.get(4), Some(&ExtendedValue::Finite(ratio(7, 2))));
        assert_eq!(s.get(5), Some(&ExtendedValue::Bottom));
        assert_eq!(format_series(s.samples()), "3 -1\n4 7/2\n5 -inf\n");
        assert!(parse_series("1 2\n3 4\n").is_err());
        assert!(parse_series("1 2\n1 3\n").is_err());
        assert!(parse_series("1 x\n").is_err());
    }

    proptest! {
        #[test]
        fn poly_text_round_trip(c in prop::collection::vec((-30i64..=30, 1i64..=6), 0..6)) {
            let p = Poly::new(c.iter().map(|&(n, d)| ratio(n, d)).collect());
            prop_assert_eq!(parse_poly(&p.to_list_string()).unwrap(), p.clone());
            prop_assert_eq!(parse_poly(&p.to_string()).unwrap(), p);
        }
    }
}
