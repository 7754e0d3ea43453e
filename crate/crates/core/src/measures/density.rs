use rug::Float;

use crate::error::{invalid, Error, Result};
use crate::poly::Polynomial;
use crate::precision::{to_decimal, Real};

/// Shape of a generating density on `[a, b]`.
///
/// Every class is written as `smooth(x) * (b - x)^alpha * (x - a)^beta`,
/// where the smooth factor is positive on the closed interval.
#[derive(Clone, Debug)]
pub enum DensityClass {
    Jacobi { alpha: Real, beta: Real },
    Legendre,
    /// `q(x) (b - x)^alpha (x - a)^beta` with `q > 0` on the interval.
    Modulated {
        q: Polynomial,
        alpha: Real,
        beta: Real,
    },
    Tabulated(Table),
}

impl DensityClass {
    pub fn chebyshev(prec: u32) -> Self {
        let h = Float::with_val(prec, -0.5);
        DensityClass::Jacobi {
            alpha: h.clone(),
            beta: h,
        }
    }

    pub fn exponents(&self, prec: u32) -> (Real, Real) {
        match self {
            DensityClass::Jacobi { alpha, beta } | DensityClass::Modulated { alpha, beta, .. } => {
                (alpha.clone(), beta.clone())
            }
            DensityClass::Legendre | DensityClass::Tabulated(_) => {
                (Float::new(prec), Float::new(prec))
            }
        }
    }

    pub fn smooth(&self, x: &Real) -> Real {
        match self {
            DensityClass::Jacobi { .. } | DensityClass::Legendre => Float::with_val(x.prec(), 1),
            DensityClass::Modulated { q, .. } => q.eval(x),
            DensityClass::Tabulated(t) => t.eval(x),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DensityClass::Jacobi { .. } => "jacobi",
            DensityClass::Legendre => "legendre",
            DensityClass::Modulated { .. } => "modulated",
            DensityClass::Tabulated(_) => "tabulated",
        }
    }

    /// Canonical text used for content hashing.
    pub fn descriptor(&self) -> String {
        match self {
            DensityClass::Jacobi { alpha, beta } => {
                format!("jacobi({},{})", to_decimal(alpha), to_decimal(beta))
            }
            DensityClass::Legendre => "legendre".into(),
            DensityClass::Modulated { q, alpha, beta } => format!(
                "modulated([{}],{},{})",
                q.to_decimal_strings().join(","),
                to_decimal(alpha),
                to_decimal(beta)
            ),
            DensityClass::Tabulated(t) => {
                let pts: Vec<String> = t
                    .xs
                    .iter()
                    .zip(&t.ws)
                    .map(|(x, w)| format!("{}:{}", to_decimal(x), to_decimal(w)))
                    .collect();
                format!("tabulated([{}])", pts.join(","))
            }
        }
    }
}

/// Positive density samples interpolated by a monotone cubic in log space.
#[derive(Clone, Debug)]
pub struct Table {
    xs: Vec<Real>,
    ws: Vec<Real>,
    logs: Vec<Real>,
    slopes: Vec<Real>,
}

impl Table {
    pub fn new(xs: Vec<Real>, ws: Vec<Real>) -> Result<Self> {
        if xs.len() != ws.len() || xs.len() < 2 {
            return invalid("a density table needs at least two (x, w) pairs");
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return invalid("table abscissae must be strictly increasing");
        }
        if ws.iter().any(|w| !(*w > 0)) {
            return invalid("table values must be positive");
        }
        let p = xs[0].prec();
        let logs: Vec<Real> = ws.iter().map(|w| Float::with_val(p, w.ln_ref())).collect();
        let n = xs.len();
        let d: Vec<Real> = (0..n - 1)
            .map(|i| {
                Float::with_val(p, &logs[i + 1] - &logs[i]) / Float::with_val(p, &xs[i + 1] - &xs[i])
            })
            .collect();
        // Fritsch-Carlson slopes: harmonic mean on monotone stretches, zero at extrema
        let mut slopes = vec![Float::new(p); n];
        slopes[0] = d[0].clone();
        slopes[n - 1] = d[n - 2].clone();
        for i in 1..n - 1 {
            let same_sign = (d[i - 1].is_sign_positive() && d[i].is_sign_positive() && !d[i - 1].is_zero() && !d[i].is_zero())
                || (d[i - 1].is_sign_negative() && d[i].is_sign_negative());
            if same_sign {
                let h0 = Float::with_val(p, &xs[i] - &xs[i - 1]);
                let h1 = Float::with_val(p, &xs[i + 1] - &xs[i]);
                let w1 = Float::with_val(p, &h0 * 2u32) + &h1;
                let w2 = Float::with_val(p, &h1 * 2u32) + &h0;
                let denom = Float::with_val(p, &w1 / &d[i - 1]) + Float::with_val(p, &w2 / &d[i]);
                slopes[i] = (w1 + w2) / denom;
            }
        }
        Ok(Table { xs, ws, logs, slopes })
    }

    pub fn parse(prec: u32, rows: &[(String, String)]) -> Result<Self> {
        let mut xs = Vec::with_capacity(rows.len());
        let mut ws = Vec::with_capacity(rows.len());
        for (x, w) in rows {
            xs.push(crate::precision::parse_real(prec, x)?);
            ws.push(crate::precision::parse_real(prec, w)?);
        }
        Table::new(xs, ws)
    }

    pub fn xs(&self) -> &[Real] {
        &self.xs
    }

    pub fn range(&self) -> (&Real, &Real) {
        (&self.xs[0], self.xs.last().unwrap())
    }

    pub fn eval(&self, x: &Real) -> Real {
        let p = x.prec().max(self.xs[0].prec());
        let n = self.xs.len();
        let i = match self.xs.partition_point(|t| t <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = Float::with_val(p, &self.xs[i + 1] - &self.xs[i]);
        let mut t = Float::with_val(p, x - &self.xs[i]) / &h;
        // clamp outside the table to the end values
        if t < 0 {
            t = Float::new(p);
        } else if t > 1 {
            t = Float::with_val(p, 1);
        }
        let t2 = Float::with_val(p, t.square_ref());
        let t3 = Float::with_val(p, &t2 * &t);
        let h00 = Float::with_val(p, &t3 * 2u32) - Float::with_val(p, &t2 * 3u32) + 1u32;
        let h10 = Float::with_val(p, &t3 - Float::with_val(p, &t2 * 2u32)) + &t;
        let h01 = Float::with_val(p, &t2 * 3u32) - Float::with_val(p, &t3 * 2u32);
        let h11 = Float::with_val(p, &t3 - &t2);
        let v = h00 * &self.logs[i]
            + h10 * &h * &self.slopes[i]
            + h01 * &self.logs[i + 1]
            + h11 * &h * &self.slopes[i + 1];
        v.exp()
    }
}

impl std::str::FromStr for Table {
    type Err = Error;

    /// Two-column text, `x w` or `x,w` per line; `#` starts a comment.
    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for line in s.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("bad table row `{line}`")));
            }
            rows.push((parts[0].to_string(), parts[1].to_string()));
        }
        Table::parse(crate::DEFAULT_PRECISION, &rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::real;

    #[test]
    fn table_interpolates_exponential_exactly_at_nodes() {
        let p = 128;
        let xs: Vec<Real> = (0..6).map(|i| real(p, i as f64 * 0.2)).collect();
        let ws: Vec<Real> = xs.iter().map(|x| Float::with_val(p, x.exp_ref())).collect();
        let t = Table::new(xs.clone(), ws.clone()).unwrap();
        for (x, w) in xs.iter().zip(&ws) {
            assert!(Float::with_val(p, t.eval(x) - w).abs() < 1e-30);
        }
        // log w is linear, so the cubic reproduces it between nodes too
        let x = real(p, 0.53);
        let d = Float::with_val(p, t.eval(&x) - Float::with_val(p, x.exp_ref()));
        assert!(d.abs() < 1e-30);
    }

    #[test]
    fn table_rejects_nonpositive_values() {
        let p = 64;
        let xs = vec![real(p, 0.0), real(p, 1.0)];
        assert!(Table::new(xs.clone(), vec![real(p, 1.0), real(p, 0.0)]).is_err());
        assert!(Table::new(vec![real(p, 1.0), real(p, 0.0)], vec![real(p, 1.0); 2]).is_err());
    }

    #[test]
    fn table_parses_text() {
        let t: Table = "# x w\n0 1\n0.5, 2\n1 4\n".parse().unwrap();
        assert_eq!(t.xs().len(), 3);
    }
}
