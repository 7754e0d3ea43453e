use std::sync::{Arc, OnceLock};

use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::precision::{pow2, to_decimal, Cplx, Real};

use super::density::DensityClass;
use super::quadrature::{gauss_from_recurrence, gauss_jacobi, jacobi_recurrence, stieltjes, GaussRule};
use super::Interval;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn apply(self, x: Real) -> Real {
        match self {
            Sign::Positive => x,
            Sign::Negative => -x,
        }
    }
}

#[derive(Clone, Debug)]
enum Shape {
    Class(DensityClass),
    /// `d base` multiplied by the Cauchy transform of `partner`.
    Product {
        base: Arc<Measure>,
        partner: Arc<Measure>,
    },
}

/// Points of reference rules on `[-1, 1]` used by the adaptive integrator.
#[derive(Debug)]
struct PanelRules {
    plain: GaussRule,
    left: GaussRule,
    right: GaussRule,
    both: GaussRule,
}

const PANEL_POINTS: usize = 24;

/// A finite measure on an interval, discretised by a Gauss rule.
///
/// Weights are stored as magnitudes and the sign is kept separately, so
/// `integrate` returns `sign * sum w_i f(x_i)`.
#[derive(Debug)]
pub struct Measure {
    interval: Interval,
    shape: Shape,
    scale: Real,
    sign: Sign,
    alpha: Real,
    beta: Real,
    rule: GaussRule,
    mass: Real,
    descriptor: String,
    panels: OnceLock<PanelRules>,
}

impl Measure {
    pub fn new(interval: Interval, class: DensityClass, nq: usize) -> Result<Measure> {
        let one = Float::with_val(interval.prec(), 1);
        Measure::with_scale(interval, class, one, nq)
    }

    /// A generator with density `scale * class`; `scale` must be positive.
    pub fn with_scale(interval: Interval, class: DensityClass, scale: Real, nq: usize) -> Result<Measure> {
        if !(scale > 0) {
            return invalid("density scale must be positive");
        }
        if nq == 0 {
            return invalid("quadrature size must be positive");
        }
        let p = interval.prec();
        let (alpha, beta) = class.exponents(p);
        let rule = match &class {
            DensityClass::Jacobi { alpha, beta } => {
                let rec = jacobi_recurrence(nq, alpha, beta, &interval, &scale)?;
                gauss_from_recurrence(&rec, nq)?
            }
            DensityClass::Legendre => {
                let z = Float::new(p);
                let rec = jacobi_recurrence(nq, &z, &z, &interval, &scale)?;
                gauss_from_recurrence(&rec, nq)?
            }
            DensityClass::Modulated { q, alpha, beta } => {
                let m = nq + q.degree() / 2 + 1;
                let base = gauss_jacobi(m, alpha, beta, &interval)?;
                let mut weights = Vec::with_capacity(m);
                for (x, w) in base.nodes.iter().zip(&base.weights) {
                    let qx = q.eval(x);
                    if !(qx > 0) {
                        return invalid(format!(
                            "modulating polynomial is not positive at {}",
                            x.to_f64()
                        ));
                    }
                    weights.push(Float::with_val(p, w * &qx) * &scale);
                }
                check_positive_on(q, &interval)?;
                let rec = stieltjes(&base.nodes, &weights, nq)?;
                gauss_from_recurrence(&rec, nq)?
            }
            DensityClass::Tabulated(t) => {
                let (lo, hi) = t.range();
                if interval.a() < lo || interval.b() > hi {
                    return invalid(format!("density table does not cover {interval}"));
                }
                tabulated_rule(t, &interval, &scale, nq)?
            }
        };
        let mass = rule.mass();
        let descriptor = format!(
            "{}|{}|{}|{}|{}",
            to_decimal(interval.a()),
            to_decimal(interval.b()),
            class.descriptor(),
            to_decimal(&scale),
            nq
        );
        Ok(Measure {
            interval,
            shape: Shape::Class(class),
            scale,
            sign: Sign::Positive,
            alpha,
            beta,
            rule,
            mass,
            descriptor,
            panels: OnceLock::new(),
        })
    }

    /// `s(x) dbase(x)` with `s` the Cauchy transform of `partner`.
    pub(crate) fn product(base: &Arc<Measure>, partner: &Arc<Measure>) -> Result<Measure> {
        if !base.interval.disjoint(&partner.interval) {
            return invalid(format!(
                "product measure needs disjoint supports, got {} and {}",
                base.interval, partner.interval
            ));
        }
        let p = base.prec();
        let mut weights = Vec::with_capacity(base.rule.len());
        let mut sign = None;
        for (x, w) in base.rule.nodes.iter().zip(&base.rule.weights) {
            let s = partner.cauchy_transform_real(x)?;
            if s.is_zero() {
                return Err(Error::Quadrature("partner transform vanishes on the base support".into()));
            }
            let sg = if s.is_sign_negative() {
                Sign::Negative
            } else {
                Sign::Positive
            };
            match sign {
                None => sign = Some(sg),
                Some(prev) if prev != sg => {
                    return Err(Error::Quadrature(
                        "partner transform changes sign on the base support".into(),
                    ))
                }
                _ => {}
            }
            weights.push(Float::with_val(p, s.abs_ref()) * w);
        }
        let s_sign = sign.unwrap_or(Sign::Positive);
        let sign = match base.sign {
            Sign::Positive => s_sign,
            Sign::Negative => s_sign.flip(),
        };
        let rule = GaussRule {
            nodes: base.rule.nodes.clone(),
            weights,
        };
        let mass = sign.apply(rule.mass());
        Ok(Measure {
            interval: base.interval.clone(),
            shape: Shape::Product {
                base: base.clone(),
                partner: partner.clone(),
            },
            scale: Float::with_val(p, 1),
            sign,
            alpha: base.alpha.clone(),
            beta: base.beta.clone(),
            rule,
            mass,
            descriptor: format!("product({};{})", base.descriptor, partner.descriptor),
            panels: OnceLock::new(),
        })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn prec(&self) -> u32 {
        self.interval.prec()
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[Real] {
        &self.rule.nodes
    }

    /// Weight magnitudes; multiply by `sign()` for the signed measure.
    pub fn weights(&self) -> &[Real] {
        &self.rule.weights
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Signed total mass.
    pub fn mass(&self) -> &Real {
        &self.mass
    }

    pub fn quadrature_size(&self) -> usize {
        self.rule.len()
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn class(&self) -> Option<&DensityClass> {
        match &self.shape {
            Shape::Class(c) => Some(c),
            Shape::Product { .. } => None,
        }
    }

    /// Endpoint exponents `(alpha, beta)` of `(b - x)^alpha (x - a)^beta`.
    pub fn exponents(&self) -> (&Real, &Real) {
        (&self.alpha, &self.beta)
    }

    /// Positive regular factor of the density at `x`.
    fn smooth(&self, x: &Real) -> Result<Real> {
        match &self.shape {
            Shape::Class(c) => Ok(c.smooth(x) * &self.scale),
            Shape::Product { base, partner } => {
                let s = partner.cauchy_transform_real(x)?;
                Ok(base.smooth(x)? * Float::with_val(x.prec(), s.abs_ref()))
            }
        }
    }

    /// Signed density at an interior point.
    pub fn density(&self, x: &Real) -> Result<Real> {
        if !self.interval.contains(x) {
            return Ok(Float::new(self.prec()));
        }
        let p = self.prec();
        let mut v = self.smooth(x)?;
        let bx = Float::with_val(p, self.interval.b() - x);
        let xa = Float::with_val(p, x - self.interval.a());
        if !self.alpha.is_zero() {
            v *= crate::precision::powf(&bx, &self.alpha);
        }
        if !self.beta.is_zero() {
            v *= crate::precision::powf(&xa, &self.beta);
        }
        Ok(self.sign.apply(v))
    }

    pub fn integrate<F: Fn(&Real) -> Real>(&self, f: F) -> Result<Real> {
        let p = self.prec();
        let mut s = Float::new(p);
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::Quadrature(format!(
                    "integrand is not finite at node {}",
                    x.to_f64()
                )));
            }
            s += v * w;
        }
        Ok(self.sign.apply(s))
    }

    /// Signed moments `int x^r dsigma`, `r = 0..count`.
    pub fn moments(&self, count: usize) -> Vec<Real> {
        let p = self.prec();
        let mut out = vec![Float::new(p); count];
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let mut t = w.clone();
            for m in out.iter_mut() {
                *m += &t;
                t *= x;
            }
        }
        out.into_iter().map(|m| self.sign.apply(m)).collect()
    }

    /// True when the plain Gauss sum resolves `1 / (z - x)` to well below
    /// half the working precision.
    pub fn direct_ok(&self, z: &Cplx) -> bool {
        let len = self.interval.length_f64();
        if self.interval.distance(z) < 0.05 * len {
            return false;
        }
        let rho = self.interval.ellipse_rho(z);
        let n = self.rule.len() as f64;
        2.0 * n * rho.ln() > 0.5 * self.prec() as f64 * std::f64::consts::LN_2
    }

    fn check_off_support(&self, z: &Cplx) -> Result<()> {
        if z.im.is_zero() && self.interval.contains(&z.re) {
            return Err(Error::OnSupport(format!("{z}")));
        }
        Ok(())
    }

    pub fn cauchy_transform(&self, z: &Cplx) -> Result<Cplx> {
        self.cauchy_integral(z, None, &|x: &Real| Float::with_val(x.prec(), 1))
    }

    pub fn cauchy_transform_real(&self, x: &Real) -> Result<Real> {
        self.cauchy_integral_real(x, None, &|x: &Real| Float::with_val(x.prec(), 1))
    }

    /// `int f(x) dsigma(x) / (z - x)`. `at_nodes`, when given, must hold `f`
    /// at the rule nodes; `f` is still needed for the adaptive branch.
    pub fn cauchy_integral(
        &self,
        z: &Cplx,
        at_nodes: Option<&[Real]>,
        f: &dyn Fn(&Real) -> Real,
    ) -> Result<Cplx> {
        self.check_off_support(z)?;
        if z.im.is_zero() {
            let r = self.cauchy_integral_real(&z.re, at_nodes, f)?;
            return Ok(Cplx::from_real(r));
        }
        if !self.direct_ok(z) {
            return self.adaptive(z, f);
        }
        let p = self.prec().max(z.prec());
        let mut re = Float::new(p);
        let mut im = Float::new(p);
        let y2 = Float::with_val(p, z.im.square_ref());
        for (i, (x, w)) in self.rule.nodes.iter().zip(&self.rule.weights).enumerate() {
            let fx = match at_nodes {
                Some(v) => v[i].clone(),
                None => f(x),
            };
            let d = Float::with_val(p, &z.re - x);
            let den = Float::with_val(p, d.square_ref()) + &y2;
            let t = fx * w / den;
            re += Float::with_val(p, &t * &d);
            im -= Float::with_val(p, &t * &z.im);
        }
        Ok(Cplx::new(self.sign.apply(re), self.sign.apply(im)))
    }

    pub fn cauchy_integral_real(
        &self,
        x0: &Real,
        at_nodes: Option<&[Real]>,
        f: &dyn Fn(&Real) -> Real,
    ) -> Result<Real> {
        let z = Cplx::from_real(x0.clone());
        self.check_off_support(&z)?;
        if !self.direct_ok(&z) {
            return Ok(self.adaptive(&z, f)?.re);
        }
        let p = self.prec().max(x0.prec());
        let mut s = Float::new(p);
        for (i, (x, w)) in self.rule.nodes.iter().zip(&self.rule.weights).enumerate() {
            let fx = match at_nodes {
                Some(v) => v[i].clone(),
                None => f(x),
            };
            s += fx * w / Float::with_val(p, x0 - x);
        }
        Ok(self.sign.apply(s))
    }

    fn panel_rules(&self) -> Result<&PanelRules> {
        if let Some(r) = self.panels.get() {
            return Ok(r);
        }
        let p = self.prec();
        let unit = Interval::from_f64(p, -1.0, 1.0)?;
        let z = Float::new(p);
        let rules = PanelRules {
            plain: gauss_jacobi(PANEL_POINTS, &z, &z, &unit)?,
            left: gauss_jacobi(PANEL_POINTS, &z, &self.beta, &unit)?,
            right: gauss_jacobi(PANEL_POINTS, &self.alpha, &z, &unit)?,
            both: gauss_jacobi(PANEL_POINTS, &self.alpha, &self.beta, &unit)?,
        };
        let _ = self.panels.set(rules);
        Ok(self.panels.get().unwrap())
    }

    /// Returns the panel estimate and the integral of its absolute value.
    fn panel(
        &self,
        rules: &PanelRules,
        l: &Real,
        r: &Real,
        z: &Cplx,
        f: &dyn Fn(&Real) -> Real,
    ) -> Result<(Cplx, Real)> {
        let p = self.prec().max(z.prec());
        let at_a = l == self.interval.a();
        let at_b = r == self.interval.b();
        let (rule, ea, eb) = match (at_a, at_b) {
            (true, true) => (&rules.both, true, true),
            (true, false) => (&rules.left, false, true),
            (false, true) => (&rules.right, true, false),
            (false, false) => (&rules.plain, false, false),
        };
        let half = Float::with_val(p, r - l) / 2u32;
        let mid = Float::with_val(p, l + r) / 2u32;
        let mut re = Float::new(p);
        let mut im = Float::new(p);
        let mut mag = Float::new(p);
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let x = Float::with_val(p, t * &half) + &mid;
            let mut v = self.smooth(&x)? * f(&x);
            // singular factors not absorbed into the panel rule
            if !ea && !self.alpha.is_zero() {
                let bx = Float::with_val(p, self.interval.b() - &x);
                v *= crate::precision::powf(&bx, &self.alpha);
            }
            if !eb && !self.beta.is_zero() {
                let xa = Float::with_val(p, &x - self.interval.a());
                v *= crate::precision::powf(&xa, &self.beta);
            }
            v *= w;
            let d = Float::with_val(p, &z.re - &x);
            let den = Float::with_val(p, d.square_ref()) + Float::with_val(p, z.im.square_ref());
            let t = v / &den;
            mag += Float::with_val(p, t.abs_ref()) * den.sqrt();
            re += Float::with_val(p, &t * &d);
            im -= Float::with_val(p, &t * &z.im);
        }
        let mut e = Float::with_val(p, 1);
        if ea {
            e += &self.alpha;
        }
        if eb {
            e += &self.beta;
        }
        let factor = crate::precision::powf(&half, &e);
        let est = Cplx::new(re, im).scale(&factor);
        Ok((est, mag * factor))
    }

    fn adaptive(&self, z: &Cplx, f: &dyn Fn(&Real) -> Real) -> Result<Cplx> {
        let rules = self.panel_rules()?;
        let p = self.prec().max(z.prec());
        let tol = crate::precision::powf(&Float::with_val(p, 10), &Float::with_val(p, -0.3 * self.prec() as f64 / 4.0));
        let a = self.interval.a().clone();
        let b = self.interval.b().clone();
        let (whole, _) = self.panel(rules, &a, &b, z, f)?;
        // split once up front so the absolute scale reflects the pole
        let mut stack: Vec<(Real, Real, Cplx, usize)> = Vec::new();
        let mid = self.interval.center();
        let (la, lam) = self.panel(rules, &a, &mid, z, f)?;
        let (lb, lbm) = self.panel(rules, &mid, &b, z, f)?;
        let scale = lam + lbm;
        let mut total = Cplx::zero(p);
        let first = &la + &lb;
        if (&first - &whole).abs() <= Float::with_val(p, first.abs() * &tol) {
            return Ok(match self.sign {
                Sign::Positive => first,
                Sign::Negative => -&first,
            });
        }
        stack.push((a, mid.clone(), la, 1));
        stack.push((mid, b, lb, 1));
        let floor = pow2(p, -(p as i32));
        let thresh = Float::with_val(p, &tol * &scale).max(&floor);
        let min_width = Float::with_val(p, &floor * self.interval.length_f64());
        while let Some((l, r, est, depth)) = stack.pop() {
            if depth > 120 {
                return Err(Error::Quadrature(format!(
                    "adaptive Cauchy integral did not settle near {z}"
                )));
            }
            let m = Float::with_val(p, &l + &r) / 2u32;
            let (left, _) = self.panel(rules, &l, &m, z, f)?;
            let (right, _) = self.panel(rules, &m, &r, z, f)?;
            let refined = &left + &right;
            let err = (&refined - &est).abs();
            let width = Float::with_val(p, &r - &l);
            if err <= thresh || width < min_width {
                total = &total + &refined;
            } else {
                stack.push((l, m.clone(), left, depth + 1));
                stack.push((m, r, right, depth + 1));
            }
        }
        Ok(match self.sign {
            Sign::Positive => total,
            Sign::Negative => -&total,
        })
    }
}

/// Checks `q > 0` on the interval by locating its real zeros there.
fn check_positive_on(q: &crate::poly::Polynomial, interval: &Interval) -> Result<()> {
    if q.degree() == 0 {
        return if *q.leading() > 0 {
            Ok(())
        } else {
            invalid("modulating constant must be positive")
        };
    }
    let z = crate::zeros::poly_real_zeros(q, interval)?;
    if !z.points.is_empty() {
        return invalid(format!(
            "modulating polynomial vanishes at {} inside {interval}",
            z.points[0].to_f64()
        ));
    }
    let ends_ok = q.eval(interval.a()) > 0 && q.eval(interval.b()) > 0;
    if !ends_ok {
        return invalid(format!("modulating polynomial is not positive on {interval}"));
    }
    Ok(())
}

/// Composite Gauss-Legendre discretisation of a tabulated density, refined
/// until the first `nq` recurrence coefficients stop moving.
fn tabulated_rule(
    t: &super::Table,
    interval: &Interval,
    scale: &Real,
    nq: usize,
) -> Result<GaussRule> {
    let p = interval.prec();
    let mut breaks: Vec<Real> = vec![interval.a().clone()];
    for x in t.xs() {
        if x > interval.a() && x < interval.b() {
            breaks.push(x.clone());
        }
    }
    breaks.push(interval.b().clone());
    let tol = crate::precision::powf(&Float::with_val(p, 10), &Float::with_val(p, -0.3 * p as f64 / 4.0));
    let z = Float::new(p);
    let mut k = nq / 2 + 8;
    let mut prev: Option<super::Recurrence> = None;
    loop {
        let unit = Interval::from_f64(p, -1.0, 1.0)?;
        let gl = gauss_jacobi(k, &z, &z, &unit)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let half = Float::with_val(p, &w[1] - &w[0]) / 2u32;
            let mid = Float::with_val(p, &w[0] + &w[1]) / 2u32;
            for (u, g) in gl.nodes.iter().zip(&gl.weights) {
                let x = Float::with_val(p, u * &half) + &mid;
                let wt = t.eval(&x) * g * &half * scale;
                nodes.push(x);
                weights.push(wt);
            }
        }
        let rec = stieltjes(&nodes, &weights, nq)?;
        if let Some(old) = &prev {
            let mut worst = Float::new(p);
            for i in 0..nq {
                for (x, y) in [(&rec.alpha[i], &old.alpha[i]), (&rec.beta[i], &old.beta[i])] {
                    let d = Float::with_val(p, x - y).abs();
                    let s = Float::with_val(p, x.abs_ref()).max(&Float::with_val(p, 1));
                    worst = worst.max(&(d / s));
                }
            }
            if worst < tol {
                return gauss_from_recurrence(&rec, nq);
            }
        }
        if k > 1024 {
            return Err(Error::Quadrature(
                "tabulated density discretisation did not converge".into(),
            ));
        }
        prev = Some(rec);
        k *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::{pi, real};

    fn legendre(p: u32, a: f64, b: f64, nq: usize) -> Measure {
        Measure::new(Interval::from_f64(p, a, b).unwrap(), DensityClass::Legendre, nq).unwrap()
    }

    #[test]
    fn lebesgue_transform_at_two() {
        let p = 256;
        let m = legendre(p, -1.0, 1.0, 64);
        let v = m.cauchy_transform_real(&real(p, 2.0)).unwrap();
        let exact = Float::with_val(p, 3).ln();
        assert!(Float::with_val(p, v - exact).abs() < 1e-60);
    }

    #[test]
    fn chebyshev_transform_at_two() {
        let p = 256;
        let m = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::chebyshev(p), 64).unwrap();
        let v = m.cauchy_transform_real(&real(p, 2.0)).unwrap();
        // pi / sqrt(3) for the un-normalised weight of mass pi
        let exact = pi(p) / Float::with_val(p, 3).sqrt();
        assert!(Float::with_val(p, v - exact).abs() < 1e-60);
        assert!(Float::with_val(p, m.mass() - pi(p)).abs() < 1e-70);
    }

    #[test]
    fn near_support_uses_adaptive_branch() {
        let p = 160;
        let m = legendre(p, -1.0, 1.0, 20);
        let z = Cplx::from_f64(p, 0.3, 1e-3);
        assert!(!m.direct_ok(&z));
        let v = m.cauchy_transform(&z).unwrap();
        // log((z + 1) / (z - 1))
        let exact = (&z.add_real(&real(p, 1.0)) / &z.sub_real(&real(p, 1.0))).ln();
        let err = (&v - &exact).abs();
        assert!(err < 1e-15, "err {}", err.to_f64());
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let p = 160;
        let m = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::chebyshev(p), 16).unwrap();
        let z = Cplx::from_f64(p, 0.999, 1e-3);
        let v = m.cauchy_transform(&z).unwrap();
        // pi / sqrt(z^2 - 1) on the principal branch away from the cut
        let one = Cplx::one(p);
        let s = (&(&z - &one).sqrt() * &(&z + &one).sqrt()).recip().scale(&pi(p));
        let err = (&v - &s).abs();
        assert!(err < 1e-12, "err {}", err.to_f64());
    }

    #[test]
    fn on_support_is_rejected() {
        let p = 64;
        let m = legendre(p, -1.0, 1.0, 8);
        assert!(matches!(
            m.cauchy_transform_real(&real(p, 0.5)),
            Err(Error::OnSupport(_))
        ));
    }

    #[test]
    fn product_measure_is_negative_left_of_partner() {
        let p = 200;
        let a = Arc::new(legendre(p, -1.0, 1.0, 20));
        let b = Arc::new(legendre(p, 2.0, 3.0, 20));
        let s = Measure::product(&a, &b).unwrap();
        assert_eq!(s.sign(), Sign::Negative);
        assert!(*s.mass() < 0);
        let d = s.density(&real(p, 0.0)).unwrap();
        // -log(3 / 2) at x = 0
        let exact = -Float::with_val(p, 1.5).ln();
        assert!(Float::with_val(p, d - exact).abs() < 1e-40);
        let overlap = Arc::new(legendre(p, 0.5, 3.0, 20));
        assert!(Measure::product(&a, &overlap).is_err());
    }

    #[test]
    fn modulated_density_moments() {
        let p = 200;
        let q = crate::poly::Polynomial::new(vec![real(p, 2.0), real(p, 1.0)]);
        let z = Float::new(p);
        let class = DensityClass::Modulated { q, alpha: z.clone(), beta: z };
        let m = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), class, 10).unwrap();
        // int (2 + x) x^2 dx over [-1, 1] = 4 / 3
        let mom = m.moments(3);
        assert!(Float::with_val(p, &mom[2] - Float::with_val(p, 4) / 3u32).abs() < 1e-50);
        let bad = crate::poly::Polynomial::new(vec![real(p, 0.0), real(p, 1.0)]);
        let class = DensityClass::Modulated { q: bad, alpha: Float::new(p), beta: Float::new(p) };
        assert!(Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), class, 10).is_err());
    }

    #[test]
    fn tabulated_constant_density_matches_legendre() {
        let p = 160;
        let rows: Vec<(String, String)> =
            (0..5).map(|i| (format!("{}", -1.0 + 0.5 * i as f64), "1".to_string())).collect();
        let t = super::super::Table::parse(p, &rows).unwrap();
        let m = Measure::new(Interval::from_f64(p, -1.0, 1.0).unwrap(), DensityClass::Tabulated(t), 12).unwrap();
        let l = legendre(p, -1.0, 1.0, 12);
        for (x, y) in m.nodes().iter().zip(l.nodes()) {
            assert!(Float::with_val(p, x - y).abs() < 1e-30);
        }
    }
}
