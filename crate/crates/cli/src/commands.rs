use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use parafrob_core::eqpfit::{fit_eqp_with, FitConfig};
use parafrob_core::frobenius::{
    erdos_graham_bound, qualifying_bound, rep_count_exact, Limits, Profile, RepCountTable, Tuple,
};
use parafrob_core::parallel::{self, Execution};
use parafrob_core::pilp::{enumerate_lattice, exclusion_feasible, optimum_values, size_function};
use parafrob_core::qpoly::ExtendedValue;
use parafrob_core::reduction::{crosscheck as run_crosscheck, CrossStatus, PolyFamily};
use parafrob_core::text::{
    format_fit_report, format_series, parse_family, parse_series, parse_series_map, parse_system_file,
    parse_tuple, SystemFile,
};
use parafrob_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::output::table;
use crate::{ComputeArgs, CrosscheckArgs, FitArgs, Format, PilpArgs, SelftestArgs, SeriesArgs};

pub struct Context {
    pub format: Format,
    pub exec: Execution,
}

impl Context {
    fn machine(&self) -> bool {
        self.format == Format::Machine
    }
}

pub struct Report {
    pub text: String,
    pub code: u8,
    pub warnings: Vec<String>,
}

impl Report {
    fn ok(text: String) -> Self {
        Report {
            text,
            code: 0,
            warnings: Vec::new(),
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit(_) | Error::Overflow(_) => 3,
            _ => 2,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: 2,
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn load_family(path: &Path, m: Option<u64>, l: Option<u64>) -> Result<PolyFamily, Failure> {
    let fam = parse_family(&read(path)?).map_err(|e| input_failure(format!("{}: {e}", path.display())))?;
    let m = m.unwrap_or(fam.m());
    let l = l.unwrap_or(fam.l());
    Ok(fam.with_m_l(m, l)?)
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn compute(ctx: &Context, args: &ComputeArgs) -> Result<Report, Failure> {
    let tuple = Tuple::new(parse_tuple(&args.a)?)?;
    if args.l == 0 {
        return Err(input_failure("l must be positive"));
    }
    let limits = Limits::default();
    let base = Profile::compute(&tuple, 1, &limits)?;
    let general = Profile::compute(&tuple, args.m, &limits)?;
    let h = RepCountTable::build(&tuple, args.k_max, u64::MAX, &limits)?;
    let (f, g, f_ml, g_m) = (base.f(1), base.g(), general.f(args.l), general.g());

    let mut out = String::new();
    if ctx.machine() {
        let _ = writeln!(out, "a={}", join(tuple.entries()));
        let _ = writeln!(out, "gcd={}", tuple.gcd());
        let _ = writeln!(out, "F={f}");
        let _ = writeln!(out, "G={g}");
        let _ = writeln!(out, "m={}", args.m);
        let _ = writeln!(out, "l={}", args.l);
        let _ = writeln!(out, "F_ml={f_ml}");
        let _ = writeln!(out, "G_m={g_m}");
        let _ = writeln!(out, "h={}", join(h.counts()));
    } else {
        let rows = vec![
            vec!["a".into(), join(tuple.entries())],
            vec!["gcd".into(), tuple.gcd().to_string()],
            vec!["F".into(), f.to_string()],
            vec!["G".into(), g.to_string()],
            vec![format!("F_{{{},{}}}", args.m, args.l), f_ml.to_string()],
            vec![format!("G_{}", args.m), g_m.to_string()],
        ];
        out.push_str(&table(&["quantity", "value"], &rows));
        out.push('\n');
        let rows: Vec<Vec<String>> = h
            .counts()
            .iter()
            .enumerate()
            .map(|(k, c)| vec![k.to_string(), c.to_string()])
            .collect();
        out.push_str(&table(&["k", "h(k)"], &rows));
    }
    Ok(Report::ok(out))
}

fn read_existing(path: &Path) -> Result<BTreeMap<i64, ExtendedValue>, Failure> {
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    parse_series_map(&read(path)?).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn series(ctx: &Context, args: &SeriesArgs) -> Result<Report, Failure> {
    let fam = load_family(&args.family, args.m, args.l)?;
    fam.check_range(args.t_min, args.t_max)?;
    let f_path = with_suffix(&args.out, "_F.txt");
    let g_path = with_suffix(&args.out, "_G.txt");
    let mut f_map = read_existing(&f_path)?;
    let mut g_map = read_existing(&g_path)?;

    let missing: Vec<i64> = (args.t_min..=args.t_max)
        .filter(|t| !f_map.contains_key(t) || !g_map.contains_key(t))
        .collect();
    let limits = Limits::default();
    let values = parallel::try_map(ctx.exec, &missing, |&t| fam.direct_values(t, &limits))?;
    for (&t, (f, g)) in missing.iter().zip(values) {
        f_map.insert(t, ExtendedValue::from(f));
        g_map.insert(t, ExtendedValue::from(i128::from(g)));
    }
    for (path, map) in [(&f_path, &f_map), (&g_path, &g_map)] {
        fs::write(path, format_series(map)).map_err(|e| input_failure(format!("{}: {e}", path.display())))?;
    }

    let total = (args.t_max - args.t_min + 1) as usize;
    let mut out = String::new();
    if ctx.machine() {
        let _ = writeln!(out, "computed={}", missing.len());
        let _ = writeln!(out, "reused={}", total - missing.len());
        let _ = writeln!(out, "F_file={}", f_path.display());
        let _ = writeln!(out, "G_file={}", g_path.display());
    } else {
        let _ = writeln!(
            out,
            "t = {}..{}: computed {}, reused {}",
            args.t_min,
            args.t_max,
            missing.len(),
            total - missing.len()
        );
        let _ = writeln!(out, "wrote {} and {}", f_path.display(), g_path.display());
    }
    Ok(Report::ok(out))
}

pub fn fit(ctx: &Context, args: &FitArgs) -> Result<Report, Failure> {
    let series = parse_series(&read(&args.series)?).map_err(|e| input_failure(format!("{}: {e}", args.series.display())))?;
    let mut cfg = FitConfig::with_limits(args.d_max, args.deg_max);
    if let Some(h) = args.holdout {
        cfg.holdout = h;
    }
    if let Some(s) = args.min_support {
        cfg.min_support = s;
    }
    let result = fit_eqp_with(&series, &cfg, ctx.exec)?;
    Ok(Report::ok(format_fit_report(&result, ctx.machine())))
}

fn show_opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn crosscheck(ctx: &Context, args: &CrosscheckArgs) -> Result<Report, Failure> {
    let fam = load_family(&args.family, args.m, args.l)?;
    let mut check = run_crosscheck(&fam, args.t_min, args.t_max, args.point_cap, ctx.exec)?;
    if let Some(t) = args.inject_mismatch {
        for row in check.rows.iter_mut().filter(|r| r.t == t) {
            if let Some((f, _)) = row.exclusion.as_mut() {
                if let Some(v) = f.to_i128() {
                    *f = ExtendedValue::from(v + 1);
                }
            }
        }
    }

    let mut warnings = Vec::new();
    let mut diff = 0usize;
    let mut rows = Vec::new();
    for row in &check.rows {
        let status = match row.status() {
            CrossStatus::Equal => "EQUAL",
            CrossStatus::Diff => {
                diff += 1;
                "DIFF"
            }
            CrossStatus::Skipped(reason) => {
                warnings.push(format!("t = {}: skipped, {reason}", row.t));
                "SKIPPED"
            }
        };
        rows.push(vec![
            row.t.to_string(),
            status.to_string(),
            show_opt(row.direct.map(|d| d.0)),
            show_opt(row.exclusion.as_ref().map(|e| e.0.clone())),
            show_opt(row.direct.map(|d| d.1)),
            show_opt(row.exclusion.as_ref().map(|e| e.1)),
        ]);
    }
    let offset = match check.constant_g_offset() {
        Some(o) => o.to_string(),
        None if check.compared().next().is_none() => "-".to_string(),
        None => "varies".to_string(),
    };

    let mut out = String::new();
    if ctx.machine() {
        for r in &rows {
            let _ = writeln!(
                out,
                "t={} status={} F_direct={} F_exclusion={} G_direct={} G_exclusion={}",
                r[0], r[1], r[2], r[3], r[4], r[5]
            );
        }
        let _ = writeln!(out, "r={}", check.r);
        let _ = writeln!(out, "g_offset={offset}");
        let _ = writeln!(out, "diff_rows={diff}");
    } else {
        out.push_str(&table(
            &["t", "status", "F direct", "F exclusion", "G direct", "G exclusion"],
            &rows,
        ));
        let _ = writeln!(out, "\nr = {}, g offset = {offset}, DIFF rows = {diff}", check.r);
    }
    Ok(Report {
        text: out,
        code: if diff > 0 { 4 } else { 0 },
        warnings,
    })
}

fn point_lines(points: &[Vec<i128>]) -> Vec<String> {
    points.iter().map(|p| join(p)).collect()
}

pub fn pilp(ctx: &Context, args: &PilpArgs) -> Result<Report, Failure> {
    let file = parse_system_file(&read(&args.system)?).map_err(|e| input_failure(format!("{}: {e}", args.system.display())))?;
    let mut kv: Vec<(String, String)> = vec![("t".into(), args.t.to_string())];
    let mut listing = Vec::new();
    match &file {
        SystemFile::System { sys, objective } => {
            if args.list {
                let set = enumerate_lattice(sys, args.t, args.point_cap)?;
                kv.push(("count".into(), set.len().to_string()));
                listing = point_lines(&set.points);
            } else {
                kv.push(("count".into(), size_function(sys, args.t, args.point_cap)?.to_string()));
            }
            if let Some(c) = objective {
                let f = optimum_values(sys, c, args.l, args.t, args.point_cap)?;
                for (i, v) in f.iter().enumerate() {
                    kv.push((format!("f.{}", i + 1), v.to_string()));
                }
            }
        }
        SystemFile::Exclusion(ex) => {
            let l3 = exclusion_feasible(ex, args.t, args.point_cap)?;
            kv.push(("g".into(), l3.len().to_string()));
            let ct: Vec<i128> = ex
                .c
                .iter()
                .map(|p| p.eval_int(args.t).and_then(|v| i128::try_from(v).ok()))
                .collect::<Option<_>>()
                .ok_or(Error::Overflow("objective"))?;
            let mut values: Vec<i128> = l3
                .points
                .iter()
                .map(|x| x.iter().zip(&ct).map(|(a, b)| a * b).sum())
                .collect();
            values.sort_unstable_by(|a, b| b.cmp(a));
            for i in 0..args.l {
                let v = values.get(i).map_or(ExtendedValue::Bottom, |&v| ExtendedValue::from(v));
                kv.push((format!("f.{}", i + 1), v.to_string()));
            }
            listing = point_lines(&l3.points);
        }
    }

    let mut out = String::new();
    if ctx.machine() {
        for (k, v) in &kv {
            let _ = writeln!(out, "{k}={v}");
        }
        for p in &listing {
            let _ = writeln!(out, "point={p}");
        }
    } else {
        let rows: Vec<Vec<String>> = kv.into_iter().map(|(k, v)| vec![k, v]).collect();
        out.push_str(&table(&["quantity", "value"], &rows));
        if !listing.is_empty() {
            out.push('\n');
            let rows: Vec<Vec<String>> = listing.into_iter().map(|p| vec![p]).collect();
            out.push_str(&table(&["point"], &rows));
        }
    }
    Ok(Report::ok(out))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn random_tuple(rng: &mut ChaCha8Rng, coprime: bool) -> Tuple {
    loop {
        let n = rng.gen_range(2..=4);
        let entries: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=24)).collect();
        if !coprime || entries.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            return Tuple::new(entries).expect("positive entries");
        }
    }
}

fn check_case(rng: &mut ChaCha8Rng, limits: &Limits) -> Result<Vec<String>, Error> {
    let mut bad = Vec::new();

    // DP against direct enumeration
    let a = random_tuple(rng, false);
    let k_max = rng.gen_range(0..=80);
    let table = RepCountTable::build(&a, k_max, u64::MAX, limits)?;
    for k in 0..=k_max {
        let exact = rep_count_exact(&a, k, limits)?;
        if u128::from(table.counts()[k as usize]) != exact {
            bad.push(format!("h({k}) of {:?}: table {} vs enumeration {exact}", a.entries(), table.counts()[k as usize]));
        }
    }

    // two generators
    let (p, q) = loop {
        let p = rng.gen_range(2..=40u64);
        let q = rng.gen_range(2..=40u64);
        if gcd(p, q) == 1 {
            break (p, q);
        }
    };
    let two = Profile::compute(&Tuple::new(vec![p, q])?, 1, limits)?;
    let (pi, qi) = (i128::from(p), i128::from(q));
    if two.f(1) != pi * qi - pi - qi || u128::from(two.g()) != u128::from((p - 1) * (q - 1) / 2) {
        bad.push(format!("({p}, {q}): F = {}, G = {}", two.f(1), two.g()));
    }

    // window scan against the early-stopping profile, plus scaling
    let a = random_tuple(rng, true);
    let m = rng.gen_range(1..=3u64);
    let bound = u64::try_from(qualifying_bound(&a, m)?.max(0)).map_err(|_| Error::Overflow("bound"))?;
    let full = RepCountTable::build(&a, bound, m, limits)?;
    let qualifying: Vec<i128> = (0..=bound)
        .filter(|&k| full.counts()[k as usize] < m)
        .map(i128::from)
        .collect();
    let prof = Profile::compute(&a, m, limits)?;
    for l in 1..=3u64 {
        let n = qualifying.len() as u64;
        let expect = if l <= n { qualifying[(n - l) as usize] } else { -i128::from(l - n) };
        if prof.f(l) != expect {
            bad.push(format!("F_{{{m},{l}}}{:?}: {} vs scan {expect}", a.entries(), prof.f(l)));
        }
    }
    let g_scan = qualifying.iter().filter(|&&k| k > 0).count() as u64;
    if prof.g() != g_scan {
        bad.push(format!("G_{m}{:?}: {} vs scan {g_scan}", a.entries(), prof.g()));
    }
    let c = rng.gen_range(2..=5u64);
    let scaled = Profile::compute(&a.scaled(c)?, m, limits)?;
    let l = rng.gen_range(1..=3u64);
    if scaled.f(l) != i128::from(c) * prof.f(l) || scaled.g() != prof.g() {
        bad.push(format!("scaling {:?} by {c} breaks F_{{{m},{l}}} or G_{m}", a.entries()));
    }
    if a.len() >= 2 {
        let eg = erdos_graham_bound(&a)?;
        if prof.m() == 1 && prof.f(1) > eg {
            bad.push(format!("F{:?} = {} exceeds the bound {eg}", a.entries(), prof.f(1)));
        }
    }
    Ok(bad)
}

pub fn selftest(ctx: &Context, args: &SelftestArgs) -> Result<Report, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let limits = Limits::default();
    let mut failures = Vec::new();
    for case in 0..args.cases {
        for msg in check_case(&mut rng, &limits)? {
            failures.push(format!("case {case}: {msg}"));
        }
    }
    let mut out = String::new();
    if ctx.machine() {
        let _ = writeln!(out, "seed={}", args.seed);
        let _ = writeln!(out, "cases={}", args.cases);
        let _ = writeln!(out, "failures={}", failures.len());
        for f in &failures {
            let _ = writeln!(out, "failure={f}");
        }
    } else {
        let _ = writeln!(out, "seed {}: {} cases, {} failures", args.seed, args.cases, failures.len());
        for f in &failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    Ok(Report {
        text: out,
        code: if failures.is_empty() { 0 } else { 4 },
        warnings: Vec::new(),
    })
}
