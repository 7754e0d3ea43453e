//! Real zeros of polynomials and of general real functions on an interval,
//! interlacing, and normalised zero-counting measures.

use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::colleague_eigenvalues;
use crate::measures::Interval;
use crate::poly::{monomial_to_chebyshev, substitute_affine, Polynomial};
use crate::precision::{pi, pow2, Real};

#[derive(Clone, Debug)]
pub struct ZeroList {
    pub interval: Interval,
    /// Sorted, strictly interior points.
    pub points: Vec<Real>,
    pub all_simple: bool,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.points.iter().map(|x| x.to_f64()).collect()
    }

    /// Smallest gap between consecutive zeros, `inf` with fewer than two.
    pub fn min_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| Float::with_val(w[0].prec(), &w[1] - &w[0]).to_f64())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Interior points of a Chebyshev grid of size `g`, ascending.
fn chebyshev_grid(interval: &Interval, g: usize) -> Vec<Real> {
    let p = interval.prec();
    let c = interval.center();
    let h = interval.half_length();
    let pi = pi(p);
    (0..g)
        .map(|i| {
            let th = Float::with_val(p, &pi * (2 * i + 1) as u32) / (2 * g) as u32;
            Float::with_val(p, &c - Float::with_val(p, th.cos() * &h))
        })
        .collect()
}

fn sign_of(v: &Real) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_sign_negative() {
        -1
    } else {
        1
    }
}

/// Root of `f` in `[lo, hi]` given a sign change, by the Illinois method
/// with bisection safeguards, to working precision.
fn refine(f: &dyn Fn(&Real) -> Real, lo: &Real, hi: &Real, flo: &Real, fhi: &Real) -> Real {
    let p = lo.prec();
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let (mut fa, mut fb) = (flo.clone(), fhi.clone());
    let tol = pow2(p, -(p as i32) + 6);
    let mut side = 0i8;
    for it in 0..(4 * p as usize) {
        let width = Float::with_val(p, &b - &a);
        let scale = Float::with_val(p, a.abs_ref()).max(&Float::with_val(p, b.abs_ref())).max(&Float::with_val(p, 1));
        if width <= Float::with_val(p, &tol * &scale) {
            break;
        }
        let x = if it % 4 == 3 {
            Float::with_val(p, &a + &b) / 2u32
        } else {
            // regula falsi point
            let den = Float::with_val(p, &fb - &fa);
            if den.is_zero() {
                Float::with_val(p, &a + &b) / 2u32
            } else {
                let t = Float::with_val(p, &fb * &width) / den;
                let x = Float::with_val(p, &b - &t);
                if x <= a || x >= b {
                    Float::with_val(p, &a + &b) / 2u32
                } else {
                    x
                }
            }
        };
        let fx = f(&x);
        match sign_of(&fx) {
            0 => return x,
            s if s == sign_of(&fa) => {
                a = x;
                fa = fx;
                if side == -1 {
                    fb /= 2u32;
                }
                side = -1;
            }
            _ => {
                b = x;
                fb = fx;
                if side == 1 {
                    fa /= 2u32;
                }
                side = 1;
            }
        }
    }
    Float::with_val(p, &a + &b) / 2u32
}

/// Sign-change scan of `f` on `grid`, refining every bracket.
fn scan(f: &dyn Fn(&Real) -> Real, grid: &[Real]) -> Result<Vec<Real>> {
    let vals: Vec<Real> = grid.iter().map(f).collect();
    if let Some(i) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!(
            "evaluator is not finite at {}",
            grid[i].to_f64()
        )));
    }
    let mut roots = Vec::new();
    let mut i = 0;
    while i + 1 < grid.len() {
        let (s0, s1) = (sign_of(&vals[i]), sign_of(&vals[i + 1]));
        if s0 == 0 {
            roots.push(grid[i].clone());
        } else if s1 != 0 && s0 != s1 {
            roots.push(refine(f, &grid[i], &grid[i + 1], &vals[i], &vals[i + 1]));
        }
        i += 1;
    }
    if let Some(v) = vals.last() {
        if v.is_zero() {
            roots.push(grid.last().unwrap().clone());
        }
    }
    Ok(roots)
}

fn simple_everywhere(f: &dyn Fn(&Real) -> Real, interval: &Interval, roots: &[Real], fscale: &Real) -> bool {
    let p = interval.prec();
    let h = interval.half_length();
    let step = Float::with_val(p, &h * pow2(p, -(p as i32) / 3));
    let thresh = Float::with_val(p, fscale * pow2(p, -(p as i32) / 2)) / &h;
    roots.iter().all(|r| {
        let up = f(&Float::with_val(p, r + &step));
        let dn = f(&Float::with_val(p, r - &step));
        let d = Float::with_val(p, up - dn) / Float::with_val(p, &step * 2u32);
        Float::with_val(p, d.abs_ref()) > thresh
    })
}

fn max_abs(vals: impl Iterator<Item = Real>, p: u32) -> Real {
    vals.fold(Float::new(p), |m, v| m.max(&Float::with_val(p, v.abs_ref())))
}

/// Real zeros of `p` strictly inside `interval`.
///
/// Candidates come from the `f64` colleague matrix of `p` expanded on the
/// interval; each is bracketed and refined at working precision. A dense
/// sign-change scan guards against candidates lost to clustering.
pub fn poly_real_zeros(poly: &Polynomial, interval: &Interval) -> Result<ZeroList> {
    let prec = interval.prec().max(poly.prec());
    if poly.is_zero() {
        return invalid("zero polynomial has no isolated zeros");
    }
    let deg = poly.degree();
    if deg == 0 {
        return Ok(ZeroList {
            interval: interval.clone(),
            points: Vec::new(),
            all_simple: true,
        });
    }
    let c = interval.center();
    let h = interval.half_length();
    let f = |x: &Real| poly.eval(x);

    let u = substitute_affine(poly.coeffs(), &c, &h);
    let cheb = monomial_to_chebyshev(&u);
    let big = max_abs(cheb.iter().cloned(), prec);
    let cheb64: Vec<f64> = cheb.iter().map(|v| Float::with_val(prec, v / &big).to_f64()).collect();
    let mut cands: Vec<f64> = if cheb64[deg] != 0.0 {
        colleague_eigenvalues(&cheb64)
            .into_iter()
            .filter(|(re, im)| im.abs() < 1e-5 && re.abs() < 1.0 + 1e-6)
            .map(|(re, _)| re.clamp(-1.0, 1.0))
            .collect()
    } else {
        Vec::new()
    };
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();

    let mut from_cands = Vec::new();
    if !cands.is_empty() {
        let mut cuts: Vec<Real> = vec![interval.a().clone()];
        for w in cands.windows(2) {
            cuts.push(interval.from_unit(&Float::with_val(prec, (w[0] + w[1]) / 2.0)));
        }
        cuts.push(interval.b().clone());
        let vals: Vec<Real> = cuts.iter().map(f).collect();
        for i in 0..cuts.len() - 1 {
            let (s0, s1) = (sign_of(&vals[i]), sign_of(&vals[i + 1]));
            if s0 != 0 && s1 != 0 && s0 != s1 {
                from_cands.push(refine(&f, &cuts[i], &cuts[i + 1], &vals[i], &vals[i + 1]));
            } else if s1 == 0 && i + 1 < cuts.len() - 1 {
                from_cands.push(cuts[i + 1].clone());
            }
        }
    }
    let grid = chebyshev_grid(interval, 8 * deg + 64);
    let from_scan = scan(&f, &grid)?;
    let mut points = if from_scan.len() > from_cands.len() {
        from_scan
    } else {
        from_cands
    };
    points.retain(|x| x > interval.a() && x < interval.b());
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let scale = max_abs(grid.iter().map(f), prec);
    let dp = poly.derivative();
    let thresh = Float::with_val(prec, &scale * pow2(prec, -(prec as i32) / 2)) / &h;
    let all_simple = points
        .iter()
        .all(|r| Float::with_val(prec, dp.eval(r).abs_ref()) > thresh);
    Ok(ZeroList {
        interval: interval.clone(),
        points,
        all_simple,
    })
}

/// Sign changes of `f` inside `interval` on a Chebyshev grid of size `grid`.
pub fn sign_change_zeros(f: &dyn Fn(&Real) -> Real, interval: &Interval, grid: usize) -> Result<ZeroList> {
    let g = chebyshev_grid(interval, grid.max(2));
    let points = scan(f, &g)?;
    let scale = max_abs(g.iter().map(f), interval.prec());
    let all_simple = simple_everywhere(f, interval, &points, &scale);
    Ok(ZeroList {
        interval: interval.clone(),
        points,
        all_simple,
    })
}

/// Zeros of a real function known to have exactly `expected` sign changes
/// inside `interval`. The grid is refined once before a mismatch is reported.
pub fn form_zeros(f: &dyn Fn(&Real) -> Real, interval: &Interval, expected: usize) -> Result<ZeroList> {
    let mut g = 8 * expected + 64;
    let mut found = 0;
    for _ in 0..2 {
        let z = sign_change_zeros(f, interval, g)?;
        if z.len() == expected {
            return Ok(z);
        }
        found = z.len();
        g *= 4;
    }
    Err(Error::CountMismatch {
        expected,
        found,
        interval: interval.to_string(),
    })
}

#[derive(Clone, Debug)]
pub struct Interlacing {
    pub pass: bool,
    /// First pair of consecutive points of one list with no point of the
    /// other between them (or a shared point, repeated).
    pub witness: Option<(Real, Real)>,
}

/// Strict interlacing of two zero lists whose lengths differ by at most one.
pub fn interlace_check(z1: &ZeroList, z2: &ZeroList) -> Result<Interlacing> {
    let (n1, n2) = (z1.len(), z2.len());
    if n1.abs_diff(n2) > 1 {
        return invalid(format!("cannot interlace lists of sizes {n1} and {n2}"));
    }
    let mut merged: Vec<(&Real, u8)> = z1
        .points
        .iter()
        .map(|x| (x, 1u8))
        .chain(z2.points.iter().map(|x| (x, 2u8)))
        .collect();
    merged.sort_by(|a, b| a.0.partial_cmp(b.0).unwrap());
    for w in merged.windows(2) {
        if w[0].0 == w[1].0 || w[0].1 == w[1].1 {
            return Ok(Interlacing {
                pass: false,
                witness: Some((w[0].0.clone(), w[1].0.clone())),
            });
        }
    }
    Ok(Interlacing {
        pass: true,
        witness: None,
    })
}

/// A probability distribution on the line that can be compared in
/// Kolmogorov distance.
pub trait Distribution {
    /// Right-continuous distribution function.
    fn cdf(&self, x: f64) -> f64;
    fn cdf_left(&self, x: f64) -> f64;
    /// Points where the supremum of a difference may be attained.
    fn breakpoints(&self) -> Vec<f64>;
}

/// `(1/N) sum delta_{x_i}`.
#[derive(Clone, Debug)]
pub struct CountingMeasure {
    points: Vec<f64>,
}

impl CountingMeasure {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn counting_measure(z: &ZeroList) -> Result<CountingMeasure> {
    if z.is_empty() {
        return invalid("counting measure of an empty zero list");
    }
    Ok(CountingMeasure { points: z.to_f64() })
}

impl Distribution for CountingMeasure {
    fn cdf(&self, x: f64) -> f64 {
        self.points.partition_point(|p| *p <= x) as f64 / self.points.len() as f64
    }

    fn cdf_left(&self, x: f64) -> f64 {
        self.points.partition_point(|p| *p < x) as f64 / self.points.len() as f64
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.points.clone()
    }
}

pub fn kolmogorov_distance(a: &dyn Distribution, b: &dyn Distribution) -> f64 {
    let mut xs = a.breakpoints();
    xs.extend(b.breakpoints());
    xs.iter()
        .map(|&x| {
            let r = (a.cdf(x) - b.cdf(x)).abs();
            let l = (a.cdf_left(x) - b.cdf_left(x)).abs();
            r.max(l)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real;

    fn unit(p: u32) -> Interval {
        Interval::from_f64(p, -1.0, 1.0).unwrap()
    }

    #[test]
    fn quadratic_zeros() {
        let p = 256;
        let q = Polynomial::new(vec![real(p, -0.25), real(p, 0.0), real(p, 1.0)]);
        let z = poly_real_zeros(&q, &unit(p)).unwrap();
        assert_eq!(z.len(), 2);
        assert!(Float::with_val(p, &z.points[0] + 0.5f64).abs() < 1e-70);
        assert!(Float::with_val(p, &z.points[1] - 0.5f64).abs() < 1e-70);
        assert!(z.all_simple);
    }

    #[test]
    fn chebyshev_t20_zeros() {
        let p = 256;
        let mut cheb = vec![Float::new(p); 21];
        cheb[20] = Float::with_val(p, 1);
        let q = Polynomial::new(crate::poly::chebyshev_to_monomial(&cheb));
        let z = poly_real_zeros(&q, &unit(p)).unwrap();
        assert_eq!(z.len(), 20);
        for (i, x) in z.points.iter().enumerate() {
            let k = 19 - i;
            let th = pi(p) * Float::with_val(p, 2 * k + 1) / 40u32;
            assert!(Float::with_val(p, x - th.cos()).abs() < 1e-60);
        }
    }

    #[test]
    fn double_root_is_flagged() {
        let p = 200;
        let q = Polynomial::new(vec![real(p, 0.0), real(p, 0.0), real(p, 1.0)]);
        let z = poly_real_zeros(&q, &unit(p)).unwrap();
        assert!(!z.all_simple || z.is_empty());
    }

    #[test]
    fn form_zeros_of_sine() {
        let p = 256;
        let f = |x: &Real| Float::with_val(p, x * pi(p) * 3u32).sin();
        let i = Interval::from_f64(p, -0.9, 0.9).unwrap();
        let z = form_zeros(&f, &i, 5).unwrap();
        let want = [-2.0 / 3.0, -1.0 / 3.0, 0.0, 1.0 / 3.0, 2.0 / 3.0];
        for (x, w) in z.points.iter().zip(want) {
            let w = Float::with_val(p, w * 3.0) / 3u32;
            assert!(Float::with_val(p, x - w).abs() < 1e-40);
        }
        assert!(matches!(form_zeros(&f, &i, 4), Err(Error::CountMismatch { found: 5, .. })));
    }

    fn list(p: u32, xs: &[f64]) -> ZeroList {
        ZeroList {
            interval: Interval::from_f64(p, 0.0, 5.0).unwrap(),
            points: xs.iter().map(|x| real(p, *x)).collect(),
            all_simple: true,
        }
    }

    #[test]
    fn interlacing_examples() {
        let p = 64;
        assert!(interlace_check(&list(p, &[1.0, 3.0]), &list(p, &[2.0, 4.0])).unwrap().pass);
        let r = interlace_check(&list(p, &[1.0, 2.0]), &list(p, &[3.0, 4.0])).unwrap();
        assert!(!r.pass);
        let (a, b) = r.witness.unwrap();
        assert_eq!((a.to_f64(), b.to_f64()), (1.0, 2.0));
        assert!(!interlace_check(&list(p, &[1.0, 3.0]), &list(p, &[3.0])).unwrap().pass);
        assert!(interlace_check(&list(p, &[1.0, 2.0, 3.0]), &list(p, &[1.5])).is_err());
    }

    #[test]
    fn kolmogorov_of_counting_measures() {
        let p = 64;
        let a = counting_measure(&list(p, &[1.0, 2.0])).unwrap();
        let b = counting_measure(&list(p, &[1.5, 2.5])).unwrap();
        assert!((kolmogorov_distance(&a, &b) - 0.5).abs() < 1e-15);
        assert_eq!(kolmogorov_distance(&a, &a), 0.0);
    }
}
