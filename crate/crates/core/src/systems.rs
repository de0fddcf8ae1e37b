//! LTP systems `x' = A(t) x + b(t) u`, `y = c(t)^* x`, file I/O, and the
//! synthetic benchmark with a known Floquet factorization.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trigfun::{TrigMatFn, TrigVecFn};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct LtpSystem {
    a: TrigMatFn,
    b: TrigVecFn,
    c: TrigVecFn,
}

impl LtpSystem {
    pub fn new(a: TrigMatFn, b: TrigVecFn, c: TrigVecFn) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "A(t) must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        for (name, f) in [("b", &b), ("c", &c)] {
            if f.period() != a.period() {
                return Err(Error::PeriodMismatch {
                    left: a.period(),
                    right: f.period(),
                });
            }
            if f.dim() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name}(t) has dim {}, A(t) is {n}x{n}",
                    f.dim()
                )));
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn period(&self) -> f64 {
        self.a.period()
    }

    pub fn omega(&self) -> f64 {
        self.a.omega()
    }

    pub fn a(&self) -> &TrigMatFn {
        &self.a
    }

    pub fn b(&self) -> &TrigVecFn {
        &self.b
    }

    pub fn c(&self) -> &TrigVecFn {
        &self.c
    }

    /// Same dynamics with replaced ports.
    pub fn with_ports(&self, b: TrigVecFn, c: TrigVecFn) -> Result<Self> {
        Self::new(self.a.clone(), b, c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    n: usize,
    #[serde(rename = "T")]
    period: f64,
    #[serde(rename = "A")]
    a: TrigMatFn,
    b: TrigVecFn,
    c: TrigVecFn,
}

impl From<LtpSystem> for SystemRepr {
    fn from(s: LtpSystem) -> Self {
        Self {
            n: s.n(),
            period: s.period(),
            a: s.a,
            b: s.b,
            c: s.c,
        }
    }
}

impl TryFrom<SystemRepr> for LtpSystem {
    type Error = Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        if r.period != r.a.period() {
            return Err(Error::PeriodMismatch {
                left: r.period,
                right: r.a.period(),
            });
        }
        let sys = LtpSystem::new(r.a, r.b, r.c)?;
        if sys.n() != r.n {
            return Err(Error::DimensionMismatch(format!(
                "declared n = {} but A(t) is {}x{}",
                r.n,
                sys.n(),
                sys.n()
            )));
        }
        Ok(sys)
    }
}

/// Parameters of the benchmark family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub n: usize,
    pub n_slow: usize,
    /// Decades of the slow magnitudes, e.g. `[-4, 0]`.
    pub slow_range: [f64; 2],
    /// Decades of the fast magnitudes, e.g. `[3, 6]`.
    pub fast_range: [f64; 2],
}

impl Default for ExampleSpec {
    fn default() -> Self {
        Self {
            n: 1000,
            n_slow: 10,
            slow_range: [-4.0, 0.0],
            fast_range: [3.0, 6.0],
        }
    }
}

impl ExampleSpec {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            n_slow: n.min(10),
            ..Self::default()
        }
    }
}

/// Known Floquet data of the benchmark: `A = P' P^{-1} + P R P^{-1}`.
#[derive(Debug, Clone)]
pub struct ExampleGroundTruth {
    /// Diagonal of `R` (the Floquet exponents).
    pub r: Vec<f64>,
    pub p: TrigMatFn,
    pub p_inv: TrigMatFn,
    /// `P^{-1} b`, component `j` is the input map of mode `j`.
    pub bhat: TrigVecFn,
    /// `P^H c`, component `j` is the output map of mode `j`.
    pub chat: TrigVecFn,
    /// The ten rightmost exponents, rightmost first.
    pub spectrum_right: Vec<f64>,
}

impl ExampleGroundTruth {
    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn lambdas(&self) -> Vec<Complex64> {
        self.r.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    /// Left Floquet factor `Q = P^{-H}`, so that `Q^H P = I`.
    pub fn q(&self) -> TrigMatFn {
        self.p_inv.adjoint()
    }

    /// Indices sorted by closeness of the exponent to the imaginary axis.
    pub fn order_by_decay(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n()).collect();
        idx.sort_by(|&i, &j| self.r[i].abs().total_cmp(&self.r[j].abs()));
        idx
    }
}

fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..count)
            .map(|j| 10f64.powf(lo + (hi - lo) * j as f64 / (count - 1) as f64))
            .collect(),
    }
}

/// Benchmark system with `P(t) = I + sin(t) N`, where `N` has ones at
/// `(0,1), (2,3), ...`, exponents `-logspace` on the two ranges, `T = 2 pi`
/// and all-ones ports.
pub fn build_example(spec: &ExampleSpec) -> Result<(LtpSystem, ExampleGroundTruth)> {
    let n = spec.n;
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "example dimension must be even and at least 2, got {n}"
        )));
    }
    if spec.n_slow > n {
        return Err(Error::InvalidArgument(format!(
            "n_slow = {} exceeds n = {n}",
            spec.n_slow
        )));
    }
    for (name, r) in [("slow", spec.slow_range), ("fast", spec.fast_range)] {
        if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
            return Err(Error::InvalidArgument(format!(
                "{name} range must be finite and ascending, got {r:?}"
            )));
        }
    }
    let mut r: Vec<f64> = logspace(spec.slow_range[0], spec.slow_range[1], spec.n_slow);
    r.extend(logspace(spec.fast_range[0], spec.fast_range[1], n - spec.n_slow));
    for x in &mut r {
        *x = -*x;
    }

    let period = 2.0 * PI;
    let one = Complex64::new(1.0, 0.0);
    let mut nmat = DMatrix::zeros(n, n);
    for j in (0..n).step_by(2) {
        nmat[(j, j + 1)] = one;
    }
    // sin t = (e^{it} - e^{-it}) / (2i)
    let sin_plus = Complex64::new(0.0, -0.5);
    let sin_minus = Complex64::new(0.0, 0.5);
    let eye = DMatrix::<Complex64>::identity(n, n);
    let p = TrigMatFn::from_harmonics(
        n,
        n,
        period,
        [(-1, &nmat * sin_minus), (0, eye.clone()), (1, &nmat * sin_plus)],
    )?;
    // N^2 = 0, so (I + sin N)^{-1} = I - sin N
    let p_inv = TrigMatFn::from_harmonics(
        n,
        n,
        period,
        [(-1, &nmat * -sin_minus), (0, eye), (1, &nmat * -sin_plus)],
    )?;
    let rmat = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        r.iter().map(|&x| Complex64::new(x, 0.0)),
    ));
    let r_fn = TrigMatFn::constant(period, rmat)?;
    let a = p
        .differentiate()
        .multiply(&p_inv)?
        .add(&p.multiply(&r_fn)?.multiply(&p_inv)?)?
        .trim(0.0);

    let ones = TrigVecFn::constant(period, &DVector::from_element(n, one));
    let bhat = p_inv.apply(&ones)?.trim(0.0);
    let chat = p.adjoint().apply(&ones)?.trim(0.0);

    let mut spectrum_right = r.clone();
    spectrum_right.sort_by(|x, y| y.total_cmp(x));
    spectrum_right.truncate(10);

    let sys = LtpSystem::new(a, ones.clone(), ones)?;
    Ok((
        sys,
        ExampleGroundTruth {
            r,
            p,
            p_inv,
            bhat,
            chat,
            spectrum_right,
        },
    ))
}

/// Random real system with `T = 2 pi`, Fourier depth `depth` and constant
/// ports. The mean part is diagonally shifted so that most draws are stable.
pub fn random_system(n: usize, depth: usize, seed: u64) -> Result<LtpSystem> {
    if n == 0 {
        return Err(Error::InvalidArgument("random system needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = 2.0 * PI;
    let scale = 0.5 / (n as f64).sqrt();
    let mut a0 = DMatrix::from_fn(n, n, |_, _| Complex64::new(scale * rng.random_range(-1.0..1.0), 0.0));
    for j in 0..n {
        let spread = if n > 1 { j as f64 / (n - 1) as f64 } else { 0.0 };
        a0[(j, j)] -= Complex64::new(0.3 + 1.7 * spread, 0.0);
    }
    let mut terms = vec![(0i64, a0)];
    for k in 1..=depth {
        let amp = scale / k as f64;
        let ak = DMatrix::from_fn(n, n, |_, _| {
            Complex64::new(amp * rng.random_range(-1.0..1.0), amp * rng.random_range(-1.0..1.0))
        });
        terms.push((-(k as i64), ak.map(|z| z.conj())));
        terms.push((k as i64, ak));
    }
    let a = TrigMatFn::from_harmonics(n, n, period, terms)?;
    let port = |rng: &mut ChaCha8Rng| {
        DVector::from_fn(n, |_, _| {
            let x: f64 = rng.random_range(0.2..1.0);
            Complex64::new(if rng.random_bool(0.5) { x } else { -x }, 0.0)
        })
    };
    let b = TrigVecFn::constant(period, &port(&mut rng));
    let c = TrigVecFn::constant(period, &port(&mut rng));
    LtpSystem::new(a, b, c)
}
