use std::sync::Arc;

use anyhow::anyhow;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use nikhp_core::asymptotics::{
    connection_check, nikishin_equilibrium, rate_report, ratio_report, type_i_ratio_report,
    weak_report, Check, DegreeSchedule, FamilySource, RatioLimitEstimate, RatioOptions,
};
use nikhp_core::hermite_pade::{at_system_probe, certify_perfectness, rank_tolerance, SystemRef};
use nikhp_core::potential::{Arcsine, KKT_TOLERANCE, MIN_GRID};
use nikhp_core::zeros::{interlace_check, kolmogorov_distance, poly_real_zeros, ZeroList};
use nikhp_core::{Complex64, Cplx, Error, Interval, MultiIndex, NikishinSystem};

use crate::config::{decimal, Command, ScheduleSpec};
use crate::report::{cell, Table};
use crate::{Ctx, Failure};

pub(crate) struct CommandOutput {
    pub parameters: Value,
    pub checks: Vec<Check>,
    pub results: Value,
    pub tables: Vec<Table>,
}

type Out = Result<CommandOutput, Failure>;

pub(crate) fn execute(command: Command, ctx: &Ctx) -> Out {
    match command {
        Command::Certify => certify(ctx),
        Command::Zeros => zeros(ctx),
        Command::Interlace => interlace(ctx),
        Command::Equilibrium => equilibrium(ctx),
        Command::Weak => weak(ctx),
        Command::Rate => rate(ctx),
        Command::Ratio => ratio(ctx),
        Command::Connection => connection(ctx),
    }
}

fn cfg_err(msg: impl Into<String>) -> Failure {
    Failure::config(anyhow!(msg.into()))
}

fn table<T: Serialize>(name: &str, rows: &[T]) -> Result<Table, Failure> {
    Table::new(name, rows).map_err(Failure::solver)
}

impl Ctx {
    fn nikishin(&self, command: &str) -> Result<Arc<NikishinSystem>, Failure> {
        self.system
            .as_nikishin()
            .cloned()
            .map_err(|_| cfg_err(format!("system: `{command}` needs a Nikishin system")))
    }

    fn tolerance(&self, default: f64) -> Result<f64, Failure> {
        match &self.cfg.tolerance {
            Some(s) => decimal("tolerance", s).map_err(Failure::config),
            None => Ok(default),
        }
    }

    fn points(&self) -> Result<Vec<Cplx>, Failure> {
        if self.cfg.points.is_empty() {
            return Err(cfg_err("points: at least one test point is required"));
        }
        self.cfg
            .points
            .iter()
            .enumerate()
            .map(|(i, s)| {
                Cplx::parse(self.prec, s).map_err(|e| cfg_err(format!("points[{}]: {e}", i + 1)))
            })
            .collect()
    }

    fn schedule(&self) -> Result<DegreeSchedule, Failure> {
        let m = self.system.m();
        let spec = self
            .cfg
            .schedule
            .as_ref()
            .ok_or_else(|| cfg_err("schedule: this command needs a [schedule] table"))?;
        let s = match spec {
            ScheduleSpec::Diagonal { from, to } => DegreeSchedule::diagonal(m, *from, *to),
            ScheduleSpec::Staircase { from, to } => DegreeSchedule::staircase(m, *from, *to),
            ScheduleSpec::Custom {
                proportions,
                indices,
                diameter,
            } => {
                let p = proportions
                    .iter()
                    .map(|s| decimal("schedule.proportions", s))
                    .collect::<anyhow::Result<Vec<f64>>>()
                    .map_err(Failure::config)?;
                let idx = indices
                    .iter()
                    .map(|c| MultiIndex::new(c.clone()))
                    .collect::<nikhp_core::Result<Vec<_>>>()
                    .map_err(|e| cfg_err(format!("schedule.indices: {e}")))?;
                DegreeSchedule::custom(p, idx, *diameter)
            }
        };
        let s = s.map_err(|e| cfg_err(format!("schedule: {e}")))?;
        if s.m() != m {
            return Err(cfg_err(format!("schedule: expected {m} components, found {}", s.m())));
        }
        Ok(s)
    }

    fn grid(&self) -> Result<usize, Failure> {
        let g = self.cfg.grid.unwrap_or(800);
        if g < MIN_GRID {
            return Err(cfg_err(format!("grid: {g} cells is below the minimum of {MIN_GRID}")));
        }
        Ok(g)
    }

    fn proportions(&self) -> Result<Vec<f64>, Failure> {
        let m = self.system.m();
        match &self.cfg.proportions {
            None => Ok(vec![1.0 / m as f64; m]),
            Some(v) if v.len() != m => Err(cfg_err(format!("proportions: expected {m} entries, found {}", v.len()))),
            Some(v) => v
                .iter()
                .map(|s| decimal("proportions", s))
                .collect::<anyhow::Result<_>>()
                .map_err(Failure::config),
        }
    }

    /// Non-zero decreasing indices with `|n| <= budget`.
    fn decreasing(&self, default: usize) -> Vec<MultiIndex> {
        MultiIndex::enumerate(self.system.m(), self.cfg.budget.unwrap_or(default))
            .into_iter()
            .filter(|n| n.is_decreasing())
            .collect()
    }
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

// ---------------------------------------------------------------- certify

#[derive(Serialize)]
struct CertifyCsv {
    total: usize,
    index: String,
    kind: &'static str,
    margin: String,
    residual: String,
    pass: bool,
    error: String,
}

#[derive(Serialize)]
struct ProbeCsv {
    trial: usize,
    sign_changes: usize,
    bound: usize,
    pass: bool,
}

fn certify(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("certify")?;
    let budget = ctx.cfg.budget.unwrap_or(6);
    let tol = ctx.tolerance(1e-30)?;
    let rep = certify_perfectness(&sys, budget);
    let rows: Vec<CertifyCsv> = rep
        .rows
        .iter()
        .map(|r| {
            let n = MultiIndex::new(r.index.clone()).expect("certified indices are valid");
            CertifyCsv {
                total: n.total(),
                index: n.to_string(),
                kind: r.kind,
                margin: r.margin.map(cell).unwrap_or_default(),
                residual: r.residual.map(cell).unwrap_or_default(),
                pass: r.pass,
                error: r.error.clone().unwrap_or_default(),
            }
        })
        .collect();
    // rows come in (I, II) pairs per index
    let indices = rep.rows.len() / 2;
    let normal = rep.rows.chunks(2).filter(|p| p.iter().all(|r| r.pass)).count();
    let max_residual = max_of(rep.rows.iter().map(|r| r.residual.unwrap_or(f64::INFINITY)));
    let mut checks = vec![
        Check::new(
            "normality",
            rep.pass,
            format!(
                "{normal} of {indices} indices normal for both types at |n| <= {budget}, smallest margin {:.3e} against {:.3e}",
                rep.min_margin(),
                rep.tolerance
            ),
        ),
        Check::new(
            "orthogonality residuals",
            max_residual < tol,
            format!("largest relative residual {max_residual:.3e} against {tol:.1e}"),
        ),
    ];
    let mut tables = vec![table("certify", &rows)?];
    let mut probe_json = Value::Null;
    if let Some(p) = &ctx.cfg.probe {
        let iv = Interval::parse(ctx.prec, &p.interval[0], &p.interval[1])
            .map_err(|e| cfg_err(format!("probe.interval: {e}")))?;
        let pr = at_system_probe(&sys, &p.index, p.trials, &iv, ctx.seed).map_err(|e| match e {
            Error::Invalid(_) => cfg_err(format!("probe: {e}")),
            e => e.into(),
        })?;
        let rows: Vec<ProbeCsv> = pr
            .trials
            .iter()
            .enumerate()
            .map(|(i, t)| ProbeCsv {
                trial: i + 1,
                sign_changes: t.sign_changes,
                bound: pr.bound,
                pass: t.pass,
            })
            .collect();
        let worst = pr.trials.iter().map(|t| t.sign_changes).max().unwrap_or(0);
        checks.push(Check::new(
            "AT-system probe",
            pr.pass,
            format!(
                "{} trials, at most {worst} sign changes against the bound {}",
                pr.trials.len(),
                pr.bound
            ),
        ));
        tables.push(table("probe", &rows)?);
        probe_json = json!({ "trials": pr.trials.len(), "bound": pr.bound, "max_sign_changes": worst });
    }
    Ok(CommandOutput {
        parameters: json!({ "budget": budget, "tolerance": tol, "probe": ctx.cfg.probe }),
        checks,
        results: json!({
            "indices": indices,
            "normal_indices": normal,
            "min_margin": rep.min_margin(),
            "rank_tolerance": rank_tolerance(ctx.prec),
            "max_residual": max_residual,
            "probe": probe_json,
        }),
        tables,
    })
}

// ---------------------------------------------------------------- zeros

#[derive(Serialize)]
struct ZeroCsv {
    total: usize,
    index: String,
    object: &'static str,
    k: usize,
    expected: usize,
    found: usize,
    min_gap: String,
    simple: bool,
    pass: bool,
}

fn zero_row(n: &MultiIndex, object: &'static str, k: usize, expected: usize, z: nikhp_core::Result<&ZeroList>) -> Result<ZeroCsv, Failure> {
    let (found, gap, simple) = match z {
        Ok(z) => (z.len(), cell(z.min_gap()), z.all_simple),
        Err(Error::CountMismatch { found, .. }) => (found, String::new(), false),
        Err(e) => return Err(e.into()),
    };
    Ok(ZeroCsv {
        total: n.total(),
        index: n.to_string(),
        object,
        k,
        expected,
        found,
        min_gap: gap,
        simple,
        pass: found == expected && simple,
    })
}

fn zeros(ctx: &Ctx) -> Out {
    let indices = ctx.decreasing(10);
    let budget = ctx.cfg.budget.unwrap_or(10);
    let m = ctx.system.m();
    let per: Vec<Vec<ZeroCsv>> = indices
        .par_iter()
        .map(|n| -> Result<Vec<ZeroCsv>, Failure> {
            let mut rows = Vec::new();
            let f2 = ctx.cache.type_ii(n)?;
            match &ctx.system {
                SystemRef::Angelesco(sys) => {
                    // n_j zeros on each support
                    for j in 1..=m {
                        let z = poly_real_zeros(f2.q(), sys.measure(j).interval())?;
                        rows.push(zero_row(n, "Q", j, n.get(j), Ok(&z))?);
                    }
                }
                SystemRef::Nikishin(_) => {
                    for k in 0..m {
                        let object = if k == 0 { "Q" } else { "Psi" };
                        rows.push(zero_row(n, object, k, n.tail(k + 1), f2.psi_zeros(k))?);
                    }
                    let f1 = ctx.cache.type_i(n)?;
                    for k in 1..=m {
                        if n.tail(k) == 0 {
                            continue;
                        }
                        rows.push(zero_row(n, "A", k, n.tail(k) - 1, f1.form_zeros(k))?);
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<ZeroCsv> = per.into_iter().flatten().collect();
    let mut checks = Vec::new();
    for (name, objects) in [("type II zero counts", ["Q", "Psi"]), ("type I zero counts", ["A", "A"])] {
        let sel: Vec<&ZeroCsv> = rows.iter().filter(|r| objects.contains(&r.object)).collect();
        if sel.is_empty() {
            continue;
        }
        let bad = sel.iter().filter(|r| !r.pass).count();
        checks.push(Check::new(
            name,
            bad == 0,
            format!("{} of {} zero sets have the predicted count of simple zeros", sel.len() - bad, sel.len()),
        ));
    }
    Ok(CommandOutput {
        parameters: json!({ "budget": budget }),
        checks,
        results: json!({ "indices": indices.len(), "zero_sets": rows.len(), "failures": rows.iter().filter(|r| !r.pass).count() }),
        tables: vec![table("zeros", &rows)?],
    })
}

// ---------------------------------------------------------------- interlace

#[derive(Serialize)]
struct InterlaceCsv {
    total: usize,
    index: String,
    bump: usize,
    object: &'static str,
    k: usize,
    found: usize,
    found_bumped: usize,
    pass: bool,
    witness: String,
}

fn compare(
    n: &MultiIndex,
    l: usize,
    object: &'static str,
    k: usize,
    a: nikhp_core::Result<&ZeroList>,
    b: nikhp_core::Result<&ZeroList>,
) -> Result<InterlaceCsv, Failure> {
    let count = |r: &nikhp_core::Result<&ZeroList>| match r {
        Ok(z) => Ok(z.len()),
        Err(Error::CountMismatch { found, .. }) => Ok(*found),
        Err(e) => Err(Failure::from(e.duplicate())),
    };
    let (found, found_bumped) = (count(&a)?, count(&b)?);
    let (pass, witness) = match (a, b) {
        (Ok(a), Ok(b)) => match interlace_check(a, b) {
            Ok(r) => (
                r.pass,
                r.witness
                    .map(|(x, y)| format!("{:e} {:e}", x.to_f64(), y.to_f64()))
                    .unwrap_or_default(),
            ),
            Err(e) => (false, e.to_string()),
        },
        _ => (false, "zero count mismatch".to_string()),
    };
    Ok(InterlaceCsv {
        total: n.total(),
        index: n.to_string(),
        bump: l,
        object,
        k,
        found,
        found_bumped,
        pass,
        witness,
    })
}

fn interlace(ctx: &Ctx) -> Out {
    ctx.nikishin("interlace")?;
    let m = ctx.system.m();
    let budget = ctx.cfg.budget.unwrap_or(10);
    let jobs: Vec<(MultiIndex, usize)> = ctx
        .decreasing(10)
        .into_iter()
        .flat_map(|n| (1..=m).map(move |l| (n.clone(), l)))
        .collect();
    let per: Vec<Vec<InterlaceCsv>> = jobs
        .par_iter()
        .map(|(n, l)| -> Result<Vec<InterlaceCsv>, Failure> {
            let nb = n.bump(*l);
            let (a2, b2) = (ctx.cache.type_ii(n)?, ctx.cache.type_ii(&nb)?);
            let (a1, b1) = (ctx.cache.type_i(n)?, ctx.cache.type_i(&nb)?);
            let mut rows = Vec::new();
            for k in 0..m {
                let object = if k == 0 { "Q" } else { "Psi" };
                rows.push(compare(n, *l, object, k, a2.psi_zeros(k), b2.psi_zeros(k))?);
            }
            for k in 1..=m {
                if n.tail(k) == 0 {
                    continue;
                }
                rows.push(compare(n, *l, "A", k, a1.form_zeros(k), b1.form_zeros(k))?);
            }
            Ok(rows)
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<InterlaceCsv> = per.into_iter().flatten().collect();
    let mut checks = Vec::new();
    for (name, objects) in [("type II interlacing", ["Q", "Psi"]), ("type I interlacing", ["A", "A"])] {
        let sel: Vec<&InterlaceCsv> = rows.iter().filter(|r| objects.contains(&r.object)).collect();
        let bad = sel.iter().filter(|r| !r.pass).count();
        checks.push(Check::new(
            name,
            bad == 0,
            format!("{} of {} pairs interlace", sel.len() - bad, sel.len()),
        ));
    }
    Ok(CommandOutput {
        parameters: json!({ "budget": budget }),
        checks,
        results: json!({ "pairs": rows.len(), "failures": rows.iter().filter(|r| !r.pass).count() }),
        tables: vec![table("interlace", &rows)?],
    })
}

// ---------------------------------------------------------------- equilibrium

#[derive(Serialize)]
struct CellCsv {
    j: usize,
    left: f64,
    right: f64,
    weight: f64,
    density: f64,
    /// `W_j` at the cell midpoint.
    w: f64,
}

fn equilibrium(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("equilibrium")?;
    let grid = ctx.grid()?;
    let p = ctx.proportions()?;
    let sol = nikishin_equilibrium(&sys, &p, grid).map_err(|e| match e {
        Error::Invalid(_) => cfg_err(format!("equilibrium: {e}")),
        e => e.into(),
    })?;
    let mut rows = Vec::new();
    for (j, l) in sol.lambdas.iter().enumerate() {
        let e = l.edges();
        let ws: Vec<f64> = l
            .nodes()
            .par_iter()
            .map(|x| sol.w_potential(j + 1, Complex64::new(*x, 0.0)))
            .collect();
        for (i, w) in l.weights().iter().enumerate() {
            rows.push(CellCsv {
                j: j + 1,
                left: e[i],
                right: e[i + 1],
                weight: *w,
                density: l.density(i),
                w: ws[i],
            });
        }
    }
    let masses: Vec<f64> = sol.lambdas.iter().map(|l| l.mass()).collect();
    let worst_mass = max_of(masses.iter().map(|m| (m - 1.0).abs()));
    let mut checks = vec![
        Check::new(
            "KKT residual",
            sol.kkt < KKT_TOLERANCE,
            format!("{:.3e} against {KKT_TOLERANCE:.0e}, pointwise spread {:.3e}", sol.kkt, sol.spread),
        ),
        Check::new("unit masses", worst_mass < 1e-10, format!("largest deviation {worst_mass:.3e}")),
    ];
    let mut oracle = Value::Null;
    if sol.m() == 1 {
        let (a, b) = sol.sets[0];
        let d = kolmogorov_distance(&sol.lambdas[0], &Arcsine { a, b });
        let robin = (4.0 / (b - a)).ln();
        let gap = (sol.omegas[0] - robin).abs();
        checks.push(Check::new("arcsine distance", d < 1e-3, format!("{d:.3e}")));
        checks.push(Check::new(
            "equilibrium constant",
            gap < 1e-3,
            format!("omega {:.9} against log(4 / length) = {robin:.9}", sol.omegas[0]),
        ));
        oracle = json!({ "kolmogorov": d, "log_inverse_capacity": robin });
    }
    Ok(CommandOutput {
        parameters: json!({ "grid": grid, "proportions": p }),
        checks,
        results: json!({
            "omegas": sol.omegas,
            "omegas_prime": sol.omegas_prime(),
            "kkt": sol.kkt,
            "spread": sol.spread,
            "masses": masses,
            "iterations": sol.log.len(),
            "oracle": oracle,
        }),
        tables: vec![table("equilibrium", &rows)?, table("equilibrium-log", &sol.log)?],
    })
}

// ---------------------------------------------------------------- weak, rate

fn weak(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("weak")?;
    let schedule = ctx.schedule()?;
    let points = ctx.points()?;
    let grid = ctx.grid()?;
    let tol = ctx.tolerance(0.15)?;
    let eq = nikishin_equilibrium(&sys, schedule.proportions(), grid)?;
    let rep = weak_report(&ctx.cache, &sys, &schedule, &eq, &points, tol)?;
    let last: Vec<Value> = (1..=sys.m())
        .map(|j| {
            let k = rep.series("kolmogorov", j);
            json!({ "j": j, "first": k.first().map(|r| r.measured), "last": k.last().map(|r| r.measured) })
        })
        .collect();
    Ok(CommandOutput {
        parameters: json!({ "schedule": ctx.cfg.schedule, "points": ctx.cfg.points, "grid": grid, "tolerance": tol }),
        results: json!({ "entries": schedule.len(), "kolmogorov": last, "omegas": eq.omegas }),
        tables: vec![table("weak", &rep.rows)?],
        checks: rep.checks,
    })
}

#[derive(Serialize)]
struct RateCsv<'a> {
    total: usize,
    index: &'a str,
    j: usize,
    point: &'a str,
    measured: f64,
    predicted: f64,
    rel_error: f64,
    floor: bool,
}

fn rate(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("rate")?;
    let schedule = ctx.schedule()?;
    let points = ctx.points()?;
    let grid = ctx.grid()?;
    let j = ctx.cfg.component.unwrap_or(1);
    if j == 0 || j > sys.m() {
        return Err(cfg_err(format!("component: {j} is outside 1..={}", sys.m())));
    }
    let eq = nikishin_equilibrium(&sys, schedule.proportions(), grid)?;
    let rep = rate_report(&ctx.cache, &sys, &schedule, j, &eq, &points).map_err(|e| match e {
        Error::OnSupport(_) => cfg_err(format!("points: {e}")),
        e => e.into(),
    })?;
    let rows: Vec<RateCsv> = rep
        .rows
        .iter()
        .map(|r| RateCsv {
            total: r.total,
            index: &r.index,
            j: r.j,
            point: &r.point,
            measured: r.measured,
            predicted: r.predicted,
            rel_error: r.rel_error,
            floor: rep.floor.iter().any(|(t, z)| *t == r.total && *z == r.point),
        })
        .collect();
    let last = rep.rows.last().map(|r| r.total).unwrap_or(0);
    let at_last: Vec<Value> = rep
        .rows
        .iter()
        .filter(|r| r.total == last)
        .map(|r| json!({ "point": r.point, "measured": r.measured, "predicted": r.predicted }))
        .collect();
    Ok(CommandOutput {
        parameters: json!({ "schedule": ctx.cfg.schedule, "points": ctx.cfg.points, "grid": grid, "component": j }),
        results: json!({ "entries": schedule.len(), "floor_rows": rep.floor.len(), "last": at_last }),
        tables: vec![table("rate", &rows)?],
        checks: rep.checks,
    })
}

// ---------------------------------------------------------------- ratio

#[derive(Serialize)]
struct RatioCsv {
    family: &'static str,
    bump: usize,
    k: usize,
    total: usize,
    point: String,
    re: f64,
    im: f64,
    delta: String,
}

fn ratio_rows(family: &'static str, est: &[RatioLimitEstimate], out: &mut Vec<RatioCsv>) {
    for e in est {
        for (t, vals) in e.values.iter().enumerate() {
            for (i, v) in vals.iter().enumerate() {
                let delta = if t == 0 { String::new() } else { cell(e.deltas[i][t - 1]) };
                out.push(RatioCsv {
                    family,
                    bump: e.l,
                    k: e.k,
                    total: e.totals[t],
                    point: e.points[i].clone(),
                    re: v.0,
                    im: v.1,
                    delta,
                });
            }
        }
    }
}

#[derive(Serialize)]
struct BoundaryCsv {
    k: usize,
    x: f64,
    eps_1e_2: f64,
    eps_1e_3: f64,
    eps_1e_4: f64,
    extrapolated: f64,
    neighbours: f64,
    product: f64,
}

fn ratio(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("ratio")?;
    let schedule = ctx.schedule()?;
    let points = ctx.points()?;
    let l = ctx.cfg.bump.unwrap_or(1);
    if l == 0 || l > sys.m() {
        return Err(cfg_err(format!("bump: {l} is outside 1..={}", sys.m())));
    }
    let mut opts = RatioOptions::new(l);
    opts.tolerance = ctx.tolerance(opts.tolerance)?;
    let spec = ctx.cfg.ratio.clone();
    if let Some(r) = &spec {
        if let Some(s) = r.samples {
            opts.samples = s;
        }
        if let Some(s) = &r.radius {
            opts.radius = decimal("ratio.radius", s).map_err(Failure::config)?;
        }
        if let Some(b) = r.boundary_points {
            opts.boundary_points = b;
        }
    }
    if opts.samples < 8 || opts.radius <= 1.0 || opts.boundary_points == 0 {
        return Err(cfg_err("ratio: need samples >= 8, radius > 1 and boundary_points >= 1"));
    }
    let rep = ratio_report(&ctx.cache, &sys, &schedule, &opts, &points)?;
    let mut rows = Vec::new();
    ratio_rows("type-ii", &rep.estimates, &mut rows);
    let boundary: Vec<BoundaryCsv> = rep
        .boundary
        .iter()
        .map(|b| BoundaryCsv {
            k: b.k,
            x: b.x,
            eps_1e_2: b.ladder[0],
            eps_1e_3: b.ladder[1],
            eps_1e_4: b.ladder[2],
            extrapolated: b.extrapolated,
            neighbours: b.neighbours,
            product: b.product,
        })
        .collect();
    let mut checks = rep.checks.clone();
    if spec.as_ref().is_some_and(|r| r.type_i) {
        let t1 = type_i_ratio_report(&ctx.cache, &sys, &schedule, l, &points)?;
        ratio_rows("type-i-polynomial", &t1.polynomials, &mut rows);
        ratio_rows("type-i-form", &t1.forms, &mut rows);
        checks.extend(t1.checks.into_iter().map(|c| Check::new(format!("type I {}", c.name), c.pass, c.detail)));
    }
    let estimates: Vec<Value> = rep
        .estimates
        .iter()
        .map(|e| {
            let vals: Vec<Value> = e
                .points
                .iter()
                .zip(e.estimate())
                .map(|(p, v)| json!({ "point": p, "re": v.0, "im": v.1 }))
                .collect();
            json!({ "k": e.k, "total": e.totals.last(), "values": vals })
        })
        .collect();
    Ok(CommandOutput {
        parameters: json!({ "schedule": ctx.cfg.schedule, "points": ctx.cfg.points, "options": opts }),
        results: json!({ "entries": schedule.len(), "spreads": rep.spreads, "estimates": estimates }),
        tables: vec![table("ratio", &rows)?, table("boundary", &boundary)?],
        checks,
    })
}

// ---------------------------------------------------------------- connection

#[derive(Serialize)]
struct ConnectionCsv {
    j: usize,
    point: String,
    miracle: f64,
    con1: f64,
    con2: f64,
    inversion: f64,
    pass: bool,
}

fn connection(ctx: &Ctx) -> Out {
    let sys = ctx.nikishin("connection")?;
    if sys.m() < 2 {
        return Err(cfg_err("system: the connection identities need at least two measures"));
    }
    let points = ctx.points()?;
    let tol = ctx.tolerance(1e-30)?;
    let n = match &ctx.cfg.index {
        Some(c) => MultiIndex::new(c.clone()).map_err(|e| cfg_err(format!("index: {e}")))?,
        None => {
            let mut c = vec![1; sys.m()];
            c[0] = 2;
            MultiIndex::new(c)?
        }
    };
    if n.m() != sys.m() {
        return Err(cfg_err(format!("index: expected {} components", sys.m())));
    }
    let fam = ctx.cache.type_ii(&n)?;
    let jobs: Vec<(usize, &Cplx)> = (2..=sys.m()).flat_map(|j| points.iter().map(move |z| (j, z))).collect();
    let rows: Vec<ConnectionCsv> = jobs
        .par_iter()
        .map(|(j, z)| -> Result<ConnectionCsv, Failure> {
            let r = connection_check(&fam, *j, z).map_err(|e| match e {
                Error::OnSupport(_) => cfg_err(format!("points: {e}")),
                e => e.into(),
            })?;
            Ok(ConnectionCsv {
                j: r.j,
                pass: r.max() < tol,
                point: r.point,
                miracle: r.miracle,
                con1: r.con1,
                con2: r.con2,
                inversion: r.inversion,
            })
        })
        .collect::<Result<_, _>>()?;
    let worst = |f: fn(&ConnectionCsv) -> f64| max_of(rows.iter().map(f));
    let checks = [
        ("miracle identity", worst(|r| r.miracle)),
        ("connection formula for Psi", worst(|r| r.con1)),
        ("connection formula for Phi", worst(|r| r.con2)),
        ("inversion", worst(|r| r.inversion)),
    ]
    .into_iter()
    .map(|(name, w)| Check::new(name, w < tol, format!("largest relative residual {w:.3e} against {tol:.1e}")))
    .collect();
    Ok(CommandOutput {
        parameters: json!({ "index": n.components(), "points": ctx.cfg.points, "tolerance": tol }),
        results: json!({ "rows": rows.len(), "largest": max_of(rows.iter().map(|r| r.miracle.max(r.con1).max(r.con2).max(r.inversion))) }),
        tables: vec![table("connection", &rows)?],
        checks,
    })
}
