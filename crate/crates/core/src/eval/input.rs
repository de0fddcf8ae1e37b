//! Exponentially modulated periodic inputs `u(t) = sum a e^{sigma t} e^{i omega k t}`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InputTerm {
    pub amplitude: Complex64,
    /// Real growth rate `sigma`.
    pub sigma: f64,
    /// Harmonic index `k`.
    pub harmonic: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub terms: Vec<InputTerm>,
}

impl InputSignal {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// `u(t) = e^{sigma t}`.
    pub fn exponential(sigma: f64) -> Self {
        Self {
            terms: vec![InputTerm {
                amplitude: Complex64::new(1.0, 0.0),
                sigma,
                harmonic: 0,
            }],
        }
    }

    pub fn with_term(mut self, amplitude: Complex64, sigma: f64, harmonic: i64) -> Self {
        self.terms.push(InputTerm {
            amplitude,
            sigma,
            harmonic,
        });
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amplitude == Complex64::new(0.0, 0.0))
    }

    /// `(amplitude, exponent)` pairs with exponent `sigma + i omega k`.
    pub fn exponentials(&self, omega: f64) -> Vec<(Complex64, Complex64)> {
        self.terms
            .iter()
            .map(|t| (t.amplitude, Complex64::new(t.sigma, omega * t.harmonic as f64)))
            .collect()
    }

    pub fn evaluate(&self, t: f64, omega: f64) -> Complex64 {
        self.exponentials(omega).iter().map(|(a, mu)| a * (mu * t).exp()).sum()
    }

    /// `L2` norm on `[0, t_end]` by Gauss-Legendre panels.
    pub fn l2_norm(&self, t_end: f64, omega: f64) -> f64 {
        let panels = 400;
        let h = t_end / panels as f64;
        let (nodes, weights) = crate::eval::sim::gauss_legendre(8);
        let mut acc = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            for (x, w) in nodes.iter().zip(&weights) {
                acc += 0.5 * h * w * self.evaluate(a + 0.5 * h * (x + 1.0), omega).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Parses `exp:<sigma>` or a `;`-separated list of `<re>,<im>,<sigma>,<k>`
/// terms; `zero` gives the null input.
impl FromStr for InputSignal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(Self::zero());
        }
        if let Some(rest) = s.strip_prefix("exp:") {
            let sigma: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::UnsupportedInput(format!("bad growth rate in {s:?}")))?;
            return Ok(Self::exponential(sigma));
        }
        let mut out = Self::zero();
        for part in s.split(';').filter(|p| !p.trim().is_empty()) {
            let f: Vec<&str> = part.split(',').map(str::trim).collect();
            let bad = || Error::UnsupportedInput(format!("term {part:?} is not re,im,sigma,k"));
            if f.len() != 4 {
                return Err(bad());
            }
            let re: f64 = f[0].parse().map_err(|_| bad())?;
            let im: f64 = f[1].parse().map_err(|_| bad())?;
            let sigma: f64 = f[2].parse().map_err(|_| bad())?;
            let k: i64 = f[3].parse().map_err(|_| bad())?;
            out = out.with_term(Complex64::new(re, im), sigma, k);
        }
        if out.terms.is_empty() {
            return Err(Error::UnsupportedInput(format!("empty input specification {s:?}")));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let u: InputSignal = "exp:-1".parse().unwrap();
        assert!((u.evaluate(2.0, 1.0).re - (-2.0f64).exp()).abs() < 1e-15);
        let v: InputSignal = "1,0,0,1; 1,0,0,-1".parse().unwrap();
        assert!((v.evaluate(0.3, 1.0).re - 2.0 * 0.3f64.cos()).abs() < 1e-15);
        assert!("zero".parse::<InputSignal>().unwrap().is_zero());
        assert!(matches!("sin(t)".parse::<InputSignal>(), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn l2_norm_of_decay() {
        let u = InputSignal::exponential(-1.0);
        let want = ((1.0 - (-40.0f64).exp()) / 2.0).sqrt();
        assert!((u.l2_norm(20.0, 1.0) - want).abs() < 1e-12);
    }
}
