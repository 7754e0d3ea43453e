use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{point_label, solve_all_i, solve_all_ii, to_c64, Check, DegreeSchedule, FamilySource};
use crate::error::{invalid, Error, Result};
use crate::hermite_pade::{MultiIndex, TypeIIFamily};
use crate::measures::NikishinSystem;
use crate::precision::Cplx;

/// `epsilon` values used to approach the supports from both banks.
pub const EPSILON_LADDER: [f64; 3] = [1e-2, 1e-3, 1e-4];

#[derive(Clone, Debug, Serialize)]
pub struct RatioOptions {
    /// The bumped component `l`.
    pub l: usize,
    /// Samples on the circle of the Laurent reconstruction.
    pub samples: usize,
    /// Radius of that circle in the exterior variable of `Delta_k`.
    pub radius: f64,
    /// Interior points of each `Delta_k` where the boundary condition is
    /// tested.
    pub boundary_points: usize,
    /// Allowed relative spread of the boundary product.
    pub tolerance: f64,
}

impl RatioOptions {
    pub fn new(l: usize) -> RatioOptions {
        RatioOptions {
            l,
            samples: 128,
            radius: 1.5,
            boundary_points: 5,
            tolerance: 0.05,
        }
    }
}

/// `Q_{n^l,k} / Q_{n,k}` along the schedule at the test points.
#[derive(Clone, Debug, Serialize)]
pub struct RatioLimitEstimate {
    pub l: usize,
    pub k: usize,
    pub points: Vec<String>,
    /// Totals `|n(t)|` of the schedule.
    pub totals: Vec<usize>,
    /// `values[t][i]`: the ratio at point `i` for schedule entry `t`.
    pub values: Vec<Vec<(f64, f64)>>,
    /// `deltas[i]`: `|R_t - R_{t-1}|` at point `i` for `t = 2, ...`.
    pub deltas: Vec<Vec<f64>>,
}

impl RatioLimitEstimate {
    /// The ratio at the largest index.
    pub fn estimate(&self) -> &[(f64, f64)] {
        self.values.last().map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// `f(c + h (w + 1/w) / 2) = sum_{q <= 1} b_q w^q`, fitted from samples on
/// `|w| = radius`.
#[derive(Clone, Debug, Serialize)]
pub struct LaurentFit {
    pub center: f64,
    pub half: f64,
    pub radius: f64,
    /// `b_1, b_0, b_{-1}, ...`
    pub coeffs: Vec<(f64, f64)>,
}

impl LaurentFit {
    /// Fits from `samples` values at `w_s = radius * exp(2 pi i s / N)`,
    /// keeping powers `q >= -keep`.
    pub fn fit(center: f64, half: f64, radius: f64, values: &[Complex64], keep: usize) -> LaurentFit {
        let n = values.len();
        let coeffs = (0..keep + 2)
            .map(|i| {
                let q = 1 - i as i64;
                let mut s = Complex64::new(0.0, 0.0);
                for (j, v) in values.iter().enumerate() {
                    let th = -2.0 * std::f64::consts::PI * (q as f64) * j as f64 / n as f64;
                    s += v * Complex64::from_polar(1.0, th);
                }
                let b = s / n as f64 / radius.powi(q as i32);
                (b.re, b.im)
            })
            .collect();
        LaurentFit {
            center,
            half,
            radius,
            coeffs,
        }
    }

    /// Sample locations `z_s` for a fit with `n` samples.
    pub fn sample_points(center: f64, half: f64, radius: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|j| {
                let w = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / n as f64);
                center + half * (w + 1.0 / w) / 2.0
            })
            .collect()
    }

    /// The exterior variable `w`, `|w| > 1`, of `z`.
    pub fn exterior(&self, z: Complex64) -> Complex64 {
        let u = (z - self.center) / self.half;
        let w = u + (u - 1.0).sqrt() * (u + 1.0).sqrt();
        if w.norm() < 1.0 {
            1.0 / w
        } else {
            w
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let w = self.exterior(z);
        let wi = 1.0 / w;
        let mut pw = w;
        let mut s = Complex64::new(0.0, 0.0);
        for (re, im) in &self.coeffs {
            s += Complex64::new(*re, *im) * pw;
            pw *= wi;
        }
        s
    }
}

/// The boundary product `|F_k(x)|^2 / |F_{k-1}(x) F_{k+1}(x)|` at one
/// interior point of `Delta_k`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryRow {
    pub k: usize,
    pub x: f64,
    /// `F_k(x + i eps) F_k(x - i eps)` along [`EPSILON_LADDER`].
    pub ladder: Vec<f64>,
    pub extrapolated: f64,
    pub neighbours: f64,
    pub product: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub options: RatioOptions,
    pub estimates: Vec<RatioLimitEstimate>,
    pub fits: Vec<LaurentFit>,
    pub boundary: Vec<BoundaryRow>,
    /// Per `k`: `max / min - 1` of the boundary product.
    pub spreads: Vec<f64>,
    pub checks: Vec<Check>,
}

impl RatioReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn bumped(schedule: &DegreeSchedule, l: usize) -> Result<Vec<MultiIndex>> {
    if l == 0 || l > schedule.m() {
        return invalid(format!("bumped component {l} outside 1..={}", schedule.m()));
    }
    Ok(schedule.indices().iter().map(|n| n.bump(l)).collect())
}

fn q_ratio(a: &TypeIIFamily, b: &TypeIIFamily, k: usize, z: &Cplx) -> Result<Cplx> {
    let num = a.zero_polys()?[k].eval_complex(z);
    let den = b.zero_polys()?[k].eval_complex(z);
    if den.is_zero() {
        return Err(Error::OnSupport(format!("{z} is a zero of Q_{{n,{k}}}")));
    }
    Ok(&num / &den)
}

fn deltas(values: &[Vec<(f64, f64)>], npts: usize) -> Vec<Vec<f64>> {
    (0..npts)
        .map(|i| {
            values
                .windows(2)
                .map(|w| {
                    let a = Complex64::new(w[0][i].0, w[0][i].1);
                    let b = Complex64::new(w[1][i].0, w[1][i].1);
                    (b - a).norm()
                })
                .collect()
        })
        .collect()
}

/// Deltas at or below this are converged to `f64` resolution.
const DELTA_FLOOR: f64 = 1e-13;

/// Stabilisation checks on a set of delta sequences.
fn stabilization_checks(label: &str, all: &[(usize, &Vec<Vec<f64>>)]) -> Vec<Check> {
    let mut monotone = true;
    let mut below = true;
    let mut detail = Vec::new();
    let mut any = false;
    let mut worst: f64 = 0.0;
    for (k, ds) in all {
        for (i, d) in ds.iter().enumerate() {
            worst = worst.max(d.last().copied().unwrap_or(0.0));
            if d.len() >= 3 {
                any = true;
                let t = &d[d.len() - 3..];
                let settled = t.iter().all(|v| *v <= DELTA_FLOOR);
                if !settled && !(t[0] > t[1] && t[1] > t[2]) {
                    monotone = false;
                    detail.push(format!("k={k} point {i}: {:.3e} {:.3e} {:.3e}", t[0], t[1], t[2]));
                }
            }
            if d.len() >= 4 && d[d.len() - 1] > DELTA_FLOOR && d[d.len() - 1] >= d[2] {
                below = false;
                detail.push(format!("k={k} point {i}: last delta {:.3e} >= {:.3e}", d[d.len() - 1], d[2]));
            }
        }
    }
    let detail = if !any {
        "schedule too short".to_string()
    } else if detail.is_empty() {
        format!("largest final delta {worst:.3e}")
    } else {
        detail.join("; ")
    };
    vec![
        Check::new(
            format!("{label} deltas decrease over the last three steps"),
            monotone && any,
            detail.clone(),
        ),
        Check::new(format!("{label} last delta below the early one"), below, detail),
    ]
}

fn to_pair(z: &Cplx) -> (f64, f64) {
    z.to_f64()
}

/// Ratio asymptotics of `Q_{n,k}` under `n -> n^l` along `schedule`, and
/// the boundary value conditions on the reconstructed limits.
pub fn ratio_report(
    source: &dyn FamilySource,
    system: &NikishinSystem,
    schedule: &DegreeSchedule,
    options: &RatioOptions,
    points: &[Cplx],
) -> Result<RatioReport> {
    let m = system.m();
    if schedule.m() != m {
        return invalid("schedule and system disagree on m");
    }
    for z in points {
        for k in 1..=m {
            if system.interval(k).distance(z) == 0.0 {
                return Err(Error::OnSupport(format!("{z} lies on {}", system.interval(k))));
            }
        }
    }
    let l = options.l;
    let up = bumped(schedule, l)?;
    let base = solve_all_ii(source, schedule.indices())?;
    let top = solve_all_ii(source, &up)?;
    let totals: Vec<usize> = schedule.indices().iter().map(|n| n.total()).collect();

    let mut estimates = Vec::new();
    for k in 1..=m {
        let values: Vec<Vec<(f64, f64)>> = base
            .par_iter()
            .zip(top.par_iter())
            .map(|(b, t)| {
                points
                    .iter()
                    .map(|z| q_ratio(t, b, k, z).map(|r| to_pair(&r)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let d = deltas(&values, points.len());
        estimates.push(RatioLimitEstimate {
            l,
            k,
            points: points.iter().map(point_label).collect(),
            totals: totals.clone(),
            values,
            deltas: d,
        });
    }

    let (b, t) = (base.last().unwrap(), top.last().unwrap());
    let p = system.prec();
    let fits: Vec<LaurentFit> = (1..=m)
        .into_par_iter()
        .map(|k| -> Result<LaurentFit> {
            let (a0, b0) = system.interval(k).bounds_f64();
            let (c, h) = (0.5 * (a0 + b0), 0.5 * (b0 - a0));
            let zs = LaurentFit::sample_points(c, h, options.radius, options.samples);
            let vals = zs
                .iter()
                .map(|z| q_ratio(t, b, k, &Cplx::from_f64(p, z.re, z.im)).map(|r| to_c64(&r)))
                .collect::<Result<Vec<_>>>()?;
            let deg = b.zero_polys()?[k].degree();
            let keep = deg.clamp(4, options.samples / 2 - 2);
            Ok(LaurentFit::fit(c, h, options.radius, &vals, keep))
        })
        .collect::<Result<_>>()?;

    let mut boundary = Vec::new();
    let mut spreads = Vec::new();
    for k in 1..=m {
        let fit = &fits[k - 1];
        let g = options.boundary_points;
        let mut prods = Vec::new();
        for i in 0..g {
            let u = -0.8 + 1.6 * i as f64 / (g.max(2) - 1) as f64;
            let x = fit.center + fit.half * u;
            let ladder: Vec<f64> = EPSILON_LADDER
                .iter()
                .map(|e| (fit.eval(Complex64::new(x, *e)) * fit.eval(Complex64::new(x, -*e))).re)
                .collect();
            let (e2, e3) = (EPSILON_LADDER[1], EPSILON_LADDER[2]);
            let (v2, v3) = (ladder[1], ladder[2]);
            let extrapolated = v3 - e3 * (v2 - v3) / (e2 - e3);
            let xr = Cplx::from_f64(p, x, 0.0);
            let mut neighbours = 1.0;
            for kk in [k - 1, k + 1] {
                if kk >= 1 && kk <= m {
                    neighbours *= q_ratio(t, b, kk, &xr)?.abs().to_f64();
                }
            }
            let product = extrapolated.abs() / neighbours;
            prods.push(product);
            boundary.push(BoundaryRow {
                k,
                x,
                ladder,
                extrapolated,
                neighbours,
                product,
            });
        }
        let hi = prods.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = prods.iter().cloned().fold(f64::INFINITY, f64::min);
        spreads.push(hi / lo - 1.0);
    }

    let mut checks = Vec::new();
    for (k, s) in spreads.iter().enumerate() {
        checks.push(Check::new(
            format!("boundary product constant on Delta_{}", k + 1),
            *s <= options.tolerance,
            format!("relative spread {s:.4e}"),
        ));
    }
    // sign conditions at a far real point
    let mut signs = true;
    let mut detail = Vec::new();
    for k in 1..=m {
        let iv = system.interval(k);
        let far = iv.bounds_f64().1 + 1e3 * iv.length_f64().max(1.0);
        let r = q_ratio(t, b, k, &Cplx::from_f64(p, far, 0.0))?.re.to_f64();
        let lead = if k <= l { r / far } else { r };
        signs &= lead > 0.0;
        detail.push(format!("k={k}: {lead:.6}"));
    }
    checks.push(Check::new("leading coefficients positive", signs, detail.join(", ")));
    let real_ok = estimates.iter().all(|e| {
        points.iter().enumerate().all(|(i, z)| {
            !z.is_real() || e.values.iter().all(|v| v[i].1 == 0.0)
        })
    });
    let real_points = points.iter().filter(|z| z.is_real()).count();
    checks.push(Check::new(
        "ratios real on the real axis",
        real_ok,
        format!("{real_points} real test points"),
    ));
    let sets: Vec<(usize, &Vec<Vec<f64>>)> = estimates.iter().map(|e| (e.k, &e.deltas)).collect();
    checks.extend(stabilization_checks("Q ratio", &sets));

    Ok(RatioReport {
        options: options.clone(),
        estimates,
        fits,
        boundary,
        spreads,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TypeIRatioReport {
    pub l: usize,
    /// `A_{n^l,k} / A_{n,k}`, `k = 1..m`.
    pub polynomials: Vec<RatioLimitEstimate>,
    /// `form_k(n^l) / form_k(n)`, `k = 0..m-1`, divided by the same ratio
    /// at the first test point, which removes the normalisation of the
    /// type I family.
    pub forms: Vec<RatioLimitEstimate>,
    pub checks: Vec<Check>,
}

/// Stabilisation of type I ratios along `schedule`.
pub fn type_i_ratio_report(
    source: &dyn FamilySource,
    system: &NikishinSystem,
    schedule: &DegreeSchedule,
    l: usize,
    points: &[Cplx],
) -> Result<TypeIRatioReport> {
    let m = system.m();
    for z in points {
        for k in 1..=m {
            if system.interval(k).distance(z) == 0.0 {
                return Err(Error::OnSupport(format!("{z} lies on {}", system.interval(k))));
            }
        }
    }
    let up = bumped(schedule, l)?;
    let base = solve_all_i(source, schedule.indices())?;
    let top = solve_all_i(source, &up)?;
    let totals: Vec<usize> = schedule.indices().iter().map(|n| n.total()).collect();
    let labels: Vec<String> = points.iter().map(point_label).collect();

    let mut polynomials = Vec::new();
    for k in 1..=m {
        let values: Vec<Vec<(f64, f64)>> = base
            .par_iter()
            .zip(top.par_iter())
            .map(|(b, t)| {
                let (pb, pt) = (&b.zero_polys()?[k], &t.zero_polys()?[k]);
                Ok(points
                    .iter()
                    .map(|z| to_pair(&(&pt.eval_complex(z) / &pb.eval_complex(z))))
                    .collect())
            })
            .collect::<Result<_>>()?;
        let d = deltas(&values, points.len());
        polynomials.push(RatioLimitEstimate {
            l,
            k,
            points: labels.clone(),
            totals: totals.clone(),
            values,
            deltas: d,
        });
    }
    let mut forms = Vec::new();
    if !points.is_empty() {
        for k in 0..m {
            let values: Vec<Vec<(f64, f64)>> = base
                .par_iter()
                .zip(top.par_iter())
                .map(|(b, t)| {
                    let r = points
                        .iter()
                        .map(|z| Ok(&t.form(k, z)? / &b.form(k, z)?))
                        .collect::<Result<Vec<Cplx>>>()?;
                    Ok(r.iter().map(|v| to_pair(&(v / &r[0]))).collect())
                })
                .collect::<Result<_>>()?;
            let d = deltas(&values, points.len());
            forms.push(RatioLimitEstimate {
                l,
                k,
                points: labels.clone(),
                totals: totals.clone(),
                values,
                deltas: d,
            });
        }
    }
    let mut checks = stabilization_checks(
        "A ratio",
        &polynomials.iter().map(|e| (e.k, &e.deltas)).collect::<Vec<_>>(),
    );
    // the first point is the reference and carries no information
    let form_sets: Vec<(usize, Vec<Vec<f64>>)> = forms
        .iter()
        .map(|e| (e.k, e.deltas.iter().skip(1).cloned().collect()))
        .collect();
    checks.extend(stabilization_checks(
        "form ratio",
        &form_sets.iter().map(|(k, d)| (*k, d)).collect::<Vec<_>>(),
    ));
    Ok(TypeIRatioReport {
        l,
        polynomials,
        forms,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::asymptotics::DirectSource;
    use crate::measures::{DensityClass, Interval, Measure};

    const P: u32 = 256;

    fn single(class: DensityClass) -> Arc<NikishinSystem> {
        let s = Measure::new(Interval::from_f64(P, -1.0, 1.0).unwrap(), class, 48).unwrap();
        NikishinSystem::new(vec![s]).unwrap()
    }

    #[test]
    fn laurent_fit_reproduces_exterior_map() {
        let zs = LaurentFit::sample_points(0.0, 1.0, 1.5, 64);
        let vals: Vec<Complex64> = zs.iter().map(|z| (z + (z - 1.0).sqrt() * (z + 1.0).sqrt()) / 2.0).collect();
        let fit = LaurentFit::fit(0.0, 1.0, 1.5, &vals, 20);
        assert!((fit.coeffs[0].0 - 0.5).abs() < 1e-12);
        let v = fit.eval(Complex64::new(0.3, 1e-4)) * fit.eval(Complex64::new(0.3, -1e-4));
        assert!((v.re - 0.25).abs() < 1e-4, "{v}");
    }

    #[test]
    fn single_measure_ratio_limits() {
        let exact = (2.0 + 3f64.sqrt()) / 2.0;
        for class in [DensityClass::chebyshev(P), DensityClass::Legendre] {
            let sys = single(class);
            let sched = DegreeSchedule::diagonal(1, 20, 30).unwrap();
            let z = Cplx::from_f64(P, 2.0, 0.0);
            let rep = ratio_report(&DirectSource(sys.clone()), &sys, &sched, &RatioOptions::new(1), &[z]).unwrap();
            let (re, im) = rep.estimates[0].estimate()[0];
            assert!((re - exact).abs() < 1e-2 && im == 0.0, "{re}");
            assert!(rep.pass(), "{:?}", rep.checks);
            for row in &rep.boundary {
                assert!((row.product - 0.25).abs() < 0.25 * 0.02, "{row:?}");
            }
        }
    }

    #[test]
    fn type_i_short_schedule() {
        let sys = single(DensityClass::Legendre);
        let sched = DegreeSchedule::diagonal(1, 4, 4).unwrap();
        let z = Cplx::from_f64(P, 2.0, 0.5);
        let rep = type_i_ratio_report(&DirectSource(sys.clone()), &sys, &sched, 1, &[z]).unwrap();
        assert!(rep.polynomials[0].deltas[0].is_empty());
        assert_eq!(rep.polynomials[0].values.len(), 1);
        // too short to show stabilisation
        assert!(!rep.checks[0].pass);
    }
}
