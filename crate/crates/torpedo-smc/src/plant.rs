//! Linear plant models for the torpedo's depth and pitch dynamics.
//!
//! The vehicle is modelled as two strictly proper SISO subsystems driven by
//! the same fin-deflection input `u`: a fourth-order immersion (depth)
//! channel and a second-order inclination (pitch) channel. Models are
//! entered in factored zero/pole/gain form, expanded into transfer
//! functions, and realized in controllable companion form for simulation.
//!
//! Polynomial expansion multiplies the pole/zero factors with iterated
//! convolution in the order they are listed, so the resulting coefficient
//! bit patterns are reproducible run to run.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced when building or evaluating plant models.
#[derive(Debug, Error, PartialEq)]
pub enum PlantError {
    /// A zpk model needs strictly fewer zeros than poles.
    #[error("zpk model needs strictly fewer zeros than poles ({zeros} zeros, {poles} poles)")]
    NotStrictlyProper { zeros: usize, poles: usize },
    /// Denominator empty or with a zero leading coefficient.
    #[error("denominator must be non-empty with a nonzero leading coefficient")]
    InvalidDenominator,
    /// Numerator zero, empty, or of degree >= the denominator degree.
    #[error("numerator must be nonzero with degree below the denominator degree")]
    InvalidNumerator,
    /// The resolvent (jwI - A) is singular at the requested frequency.
    #[error("frequency response is singular at omega = {omega} rad/s (pole on the evaluation axis)")]
    EvalAtPole { omega: f64 },
}

/// Factored zeros/poles/gain description of a SISO transfer function.
///
/// Zeros and poles are real; the two torpedo channels only need real ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ZpkModel {
    pub zeros: Vec<f64>,
    pub poles: Vec<f64>,
    pub gain: f64,
}

impl ZpkModel {
    pub fn new(zeros: Vec<f64>, poles: Vec<f64>, gain: f64) -> Self {
        Self { zeros, poles, gain }
    }

    /// Expands the factored form into a strictly proper [`TransferFunction`].
    ///
    /// The numerator is `gain * prod(p - zero_i)` and the denominator
    /// `prod(p - pole_i)`, both with coefficients in descending powers.
    pub fn to_tf(&self) -> Result<TransferFunction, PlantError> {
        if self.zeros.len() >= self.poles.len() {
            return Err(PlantError::NotStrictlyProper {
                zeros: self.zeros.len(),
                poles: self.poles.len(),
            });
        }
        let num: Vec<f64> = poly_from_roots(&self.zeros)
            .into_iter()
            .map(|c| c * self.gain)
            .collect();
        let den = poly_from_roots(&self.poles);
        TransferFunction::new(num, den)
    }
}

/// Zero/pole/gain model of the pitch channel.
pub fn inclination_model() -> ZpkModel {
    ZpkModel::new(vec![], vec![0.0, -40.0], 7660.0)
}

/// Zero/pole/gain model of the depth channel.
pub fn immersion_model() -> ZpkModel {
    ZpkModel::new(vec![-6.85], vec![0.0, -1.91, -12.5, -40.0], 6514.0)
}

/// Strictly proper SISO transfer function in polynomial form.
///
/// Coefficients are stored in descending powers of the Laplace variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TransferFunction {
    /// Validates and stores the polynomials. Leading zeros are trimmed from
    /// the numerator; the denominator must already start with a nonzero
    /// coefficient. The function must be strictly proper.
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self, PlantError> {
        if den.is_empty() || den[0] == 0.0 {
            return Err(PlantError::InvalidDenominator);
        }
        let first_nonzero = num.iter().position(|&c| c != 0.0);
        let num: Vec<f64> = match first_nonzero {
            Some(i) => num[i..].to_vec(),
            None => return Err(PlantError::InvalidNumerator),
        };
        if num.len() >= den.len() {
            return Err(PlantError::InvalidNumerator);
        }
        Ok(Self { num, den })
    }

    /// Numerator coefficients, descending powers.
    pub fn num(&self) -> &[f64] {
        &self.num
    }

    /// Denominator coefficients, descending powers.
    pub fn den(&self) -> &[f64] {
        &self.den
    }

    /// Evaluates `H(jw)` by direct polynomial evaluation.
    ///
    /// Evaluation exactly at a pole yields an infinite value rather than an
    /// error; only the state-space path reports pole hits.
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        polyval(&self.num, s) / polyval(&self.den, s)
    }

    /// Realizes the transfer function in controllable companion form.
    ///
    /// `A` carries ones on the superdiagonal and the negated normalized
    /// denominator coefficients in its last row, `B = e_n`, `C` holds the
    /// normalized numerator coefficients in ascending powers padded with
    /// zeros, and `D = 0`.
    pub fn to_state_space(&self) -> StateSpace {
        let n = self.den.len() - 1;
        let lead = self.den[0];
        let mut a = vec![0.0; n * n];
        for i in 0..n.saturating_sub(1) {
            a[i * n + i + 1] = 1.0;
        }
        // coefficient of p^j is den[n - j]; last row gets -a_0 .. -a_{n-1}
        for j in 0..n {
            a[(n - 1) * n + j] = -self.den[n - j] / lead;
        }
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        let mut c = vec![0.0; n];
        let m = self.num.len();
        for k in 0..m {
            // num[k] multiplies p^(m-1-k)
            c[m - 1 - k] = self.num[k] / lead;
        }
        StateSpace { a, b, c, d: 0.0, n }
    }
}

/// Dense state-space realization `xdot = Ax + Bu`, `y = Cx + Du` of a SISO
/// system. `D` is always zero for the strictly proper models built here.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Vec<f64>, // n x n, row-major
    b: Vec<f64>, // n x 1
    c: Vec<f64>, // 1 x n
    d: f64,
    n: usize,
}

impl StateSpace {
    /// State dimension.
    pub fn order(&self) -> usize {
        self.n
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn b(&self, i: usize) -> f64 {
        self.b[i]
    }

    pub fn c(&self, j: usize) -> f64 {
        self.c[j]
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Writes `Ax + Bu` into `out`.
    pub fn derivative_into(&self, x: &[f64], u: f64, out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.n);
        for i in 0..self.n {
            let mut acc = self.b[i] * u;
            let row = &self.a[i * self.n..(i + 1) * self.n];
            for (aij, xj) in row.iter().zip(x) {
                acc += aij * xj;
            }
            out[i] = acc;
        }
    }

    /// `y = Cx` (plus the identically zero feedthrough).
    pub fn output(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(ci, xi)| ci * xi).sum()
    }

    /// `ydot = C(Ax + Bu)`, the exact output rate under the held input.
    pub fn output_rate(&self, x: &[f64], u: f64) -> f64 {
        let mut xdot = vec![0.0; self.n];
        self.derivative_into(x, u, &mut xdot);
        self.output(&xdot)
    }

    /// `yddot = CA(Ax + Bu)`, the output acceleration with the input held
    /// constant over the current interval (its impulsive derivative at
    /// switch instants is excluded).
    pub fn output_accel(&self, x: &[f64], u: f64) -> f64 {
        let mut xdot = vec![0.0; self.n];
        self.derivative_into(x, u, &mut xdot);
        let mut xddot = vec![0.0; self.n];
        self.derivative_into(&xdot, 0.0, &mut xddot);
        self.output(&xddot)
    }

    /// Evaluates `H(jw) = C (jwI - A)^{-1} B + D` through a complex solve.
    pub fn freq_response(&self, omega: f64) -> Result<Complex64, PlantError> {
        let n = self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = Complex64::new(-self.a[i * n + j], if i == j { omega } else { 0.0 });
            }
        }
        let mut rhs: Vec<Complex64> = self.b.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        solve_complex(&mut m, &mut rhs, n).map_err(|_| PlantError::EvalAtPole { omega })?;
        let mut y = Complex64::new(self.d, 0.0);
        for (ci, xi) in self.c.iter().zip(&rhs) {
            y += ci * xi;
        }
        Ok(y)
    }
}

/// The two-channel torpedo plant: a fourth-order immersion (depth)
/// subsystem and a second-order inclination (pitch) subsystem, both driven
/// by the same scalar fin deflection. The stacked state is
/// `[x_z ; x_theta]` with the immersion block first.
#[derive(Debug, Clone, PartialEq)]
pub struct TorpedoPlant {
    immersion: StateSpace,
    inclination: StateSpace,
    x_z: Vec<f64>,
    x_theta: Vec<f64>,
}

impl TorpedoPlant {
    /// Builds the stock torpedo plant from [`immersion_model`] and
    /// [`inclination_model`]. The stacked state has dimension six.
    pub fn torpedo() -> Self {
        Self::from_zpk(&immersion_model(), &inclination_model())
            .expect("stock torpedo models are strictly proper")
    }

    /// Builds a plant from custom zpk channel models. State starts at zero.
    pub fn from_zpk(immersion: &ZpkModel, inclination: &ZpkModel) -> Result<Self, PlantError> {
        let im = immersion.to_tf()?.to_state_space();
        let inc = inclination.to_tf()?.to_state_space();
        let x_z = vec![0.0; im.order()];
        let x_theta = vec![0.0; inc.order()];
        Ok(Self {
            immersion: im,
            inclination: inc,
            x_z,
            x_theta,
        })
    }

    pub fn immersion(&self) -> &StateSpace {
        &self.immersion
    }

    pub fn inclination(&self) -> &StateSpace {
        &self.inclination
    }

    /// Total stacked state dimension.
    pub fn state_dim(&self) -> usize {
        self.x_z.len() + self.x_theta.len()
    }

    /// Stacked state `[x_z ; x_theta]`.
    pub fn state(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.state_dim());
        x.extend_from_slice(&self.x_z);
        x.extend_from_slice(&self.x_theta);
        x
    }

    /// Replaces the stacked state. Panics on a length mismatch.
    pub fn set_state(&mut self, x: &[f64]) {
        assert_eq!(x.len(), self.state_dim(), "stacked state length mismatch");
        let nz = self.x_z.len();
        self.x_z.copy_from_slice(&x[..nz]);
        self.x_theta.copy_from_slice(&x[nz..]);
    }

    /// Resets both channel states to zero.
    pub fn reset(&mut self) {
        self.x_z.iter_mut().for_each(|v| *v = 0.0);
        self.x_theta.iter_mut().for_each(|v| *v = 0.0);
    }

    /// Stacked derivative `[A_z x_z + B_z u ; A_th x_th + B_th u] + phi`
    /// evaluated at an arbitrary stacked state.
    pub fn derivative_at(&self, x: &[f64], u: f64, phi: &[f64], out: &mut [f64]) {
        let nz = self.x_z.len();
        debug_assert_eq!(x.len(), self.state_dim());
        debug_assert_eq!(phi.len(), self.state_dim());
        self.immersion.derivative_into(&x[..nz], u, &mut out[..nz]);
        self.inclination.derivative_into(&x[nz..], u, &mut out[nz..]);
        for (o, p) in out.iter_mut().zip(phi) {
            *o += p;
        }
    }

    /// Stacked derivative at the stored state.
    pub fn derivative(&self, u: f64, phi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.state_dim()];
        self.derivative_at(&self.state(), u, phi, &mut out);
        out
    }

    /// Current outputs `(z, theta)`: depth in meters, pitch in radians.
    pub fn outputs(&self) -> (f64, f64) {
        (
            self.immersion.output(&self.x_z),
            self.inclination.output(&self.x_theta),
        )
    }

    /// Depth output together with its exact first and second derivatives
    /// under the control value held since the last switch instant.
    pub fn depth_signals(&self, u_prev: f64) -> (f64, f64, f64) {
        (
            self.immersion.output(&self.x_z),
            self.immersion.output_rate(&self.x_z, u_prev),
            self.immersion.output_accel(&self.x_z, u_prev),
        )
    }
}

/// Expands `prod (x - r_i)` by iterated convolution in listed order.
fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (i, &coef) in p.iter().enumerate() {
            next[i] += coef;
            next[i + 1] -= coef * r;
        }
        p = next;
    }
    p
}

/// Horner evaluation of a real-coefficient polynomial at a complex point.
fn polyval(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

/// In-place complex Gaussian elimination with partial pivoting.
fn solve_complex(m: &mut [Complex64], rhs: &mut [Complex64], n: usize) -> Result<(), ()> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].norm();
        for row in col + 1..n {
            let mag = m[row * n + col].norm();
            if mag > best {
                best = mag;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Err(());
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            rhs.swap(col, pivot);
        }
        let diag = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / diag;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[row * n + j] -= factor * v;
            }
            let r = rhs[col];
            rhs[row] -= factor * r;
        }
    }
    for col in (0..n).rev() {
        let mut acc = rhs[col];
        for j in col + 1..n {
            acc -= m[col * n + j] * rhs[j];
        }
        rhs[col] = acc / m[col * n + col];
    }
    Ok(())
}
