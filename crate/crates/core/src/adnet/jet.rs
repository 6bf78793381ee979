//! Second-order forward jets carrying value, gradient and Laplacian.
//!
//! For a scalar primitive `φ` the Laplacian obeys
//! `Δ(φ∘z) = φ'(z) Δz + φ''(z) |∇z|²`, which is all a single forward pass needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::loss::FieldOracle;

/// Largest spatial dimension a jet can carry.
pub const MAX_DIM: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    grad: [f64; MAX_DIM],
    pub lap: f64,
    dim: usize,
}

impl Jet2 {
    pub fn constant(value: f64, dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "jet dimension {dim} exceeds {MAX_DIM}");
        Jet2 {
            value,
            grad: [0.0; MAX_DIM],
            lap: 0.0,
            dim,
        }
    }

    /// The coordinate function `x_axis` at `value`.
    pub fn variable(value: f64, axis: usize, dim: usize) -> Self {
        let mut j = Jet2::constant(value, dim);
        j.grad[axis] = 1.0;
        j
    }

    /// Seeds every coordinate of `p`.
    pub fn seed(p: &[f64]) -> Result<Vec<Jet2>> {
        if p.len() > MAX_DIM || p.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "jets support dimensions 1..={MAX_DIM}, got {}",
                p.len()
            )));
        }
        Ok(p.iter()
            .enumerate()
            .map(|(i, &x)| Jet2::variable(x, i, p.len()))
            .collect())
    }

    pub fn from_parts(value: f64, grad: &[f64], lap: f64) -> Self {
        let mut j = Jet2::constant(value, grad.len());
        j.grad[..grad.len()].copy_from_slice(grad);
        j.lap = lap;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad().iter().map(|g| g * g).sum()
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    pub fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut out = self;
        out.value = f;
        for g in out.grad.iter_mut() {
            *g *= df;
        }
        out.lap = df * self.lap + d2f * self.grad_norm_sq();
        out
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.value;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn tanh(self) -> Self {
        let (t, dt, d2t, _) = tanh_derivs(self.value);
        self.chain(t, dt, d2t)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    /// `x^p`; derivatives that vanish at `x = 0` are returned as exactly 0.
    pub fn powf(self, p: f64) -> Self {
        let x = self.value;
        let pow = |e: f64| if x == 0.0 && e > 0.0 { 0.0 } else { x.powf(e) };
        self.chain(pow(p), p * pow(p - 1.0), p * (p - 1.0) * pow(p - 2.0))
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.value;
        let nf = n as f64;
        let pow = |e: i32| if e < 0 && x == 0.0 { f64::INFINITY } else { x.powi(e) };
        let d1 = if n == 0 { 0.0 } else { nf * pow(n - 1) };
        let d2 = if n <= 1 && n >= 0 { 0.0 } else { nf * (nf - 1.0) * pow(n - 2) };
        self.chain(pow(n), d1, d2)
    }

    pub fn relu3(self) -> Self {
        let (f, df, d2f, _) = relu3_derivs(self.value);
        self.chain(f, df, d2f)
    }

    pub fn recip(self) -> Self {
        let x = self.value;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}

/// `tanh` and its first three derivatives.
#[inline]
pub(crate) fn tanh_derivs(x: f64) -> (f64, f64, f64, f64) {
    let t = x.tanh();
    let s = 1.0 - t * t;
    (t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0))
}

/// `max(x,0)³` and its first three derivatives, all zero at `x <= 0`.
#[inline]
pub(crate) fn relu3_derivs(x: f64) -> (f64, f64, f64, f64) {
    if x > 0.0 {
        (x * x * x, 3.0 * x * x, 6.0 * x, 6.0)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.value += rhs.value;
        for (a, b) in self.grad.iter_mut().zip(rhs.grad) {
            *a += b;
        }
        self.lap += rhs.lap;
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self * -1.0
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value = self.value * rhs.value;
        let mut cross = 0.0;
        for i in 0..MAX_DIM {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
            cross += self.grad[i] * rhs.grad[i];
        }
        out.lap = self.lap * rhs.value + 2.0 * cross + self.value * rhs.lap;
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: f64) -> Jet2 {
        self + (-rhs)
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        self.value *= rhs;
        for g in self.grad.iter_mut() {
            *g *= rhs;
        }
        self.lap *= rhs;
        self
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        self * (1.0 / rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        -rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs * self
    }
}

/// A closed-form field written once over jets.
#[derive(Clone, Copy)]
pub struct JetField<F>(pub F);

impl<F: Fn(&[Jet2]) -> Jet2> JetField<F> {
    pub fn jet(&self, p: &[f64]) -> Jet2 {
        let vars = Jet2::seed(p).expect("point dimension within jet capacity");
        (self.0)(&vars)
    }
}

impl<F: Fn(&[Jet2]) -> Jet2> FieldOracle for JetField<F> {
    fn value(&self, p: &[f64]) -> f64 {
        self.jet(p).value
    }
    fn laplacian(&self, p: &[f64]) -> f64 {
        self.jet(p).lap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(p: [f64; 2], f: impl Fn(&[Jet2]) -> Jet2) -> Jet2 {
        JetField(f).jet(&p)
    }

    #[test]
    fn paraboloid_laplacian_is_four() {
        let j = at([0.3, -0.7], |v| v[0] * v[0] + v[1] * v[1]);
        assert_eq!(j.lap, 4.0);
        assert_eq!(j.grad(), &[0.6, -1.4]);
    }

    #[test]
    fn harmonic_exp_cos() {
        for p in [[0.1, 0.2], [0.9, 0.4], [0.5, 0.99]] {
            let j = at(p, |v| v[0].exp() * v[1].cos());
            assert!(j.lap.abs() < 1e-12);
            assert!((j.value - p[0].exp() * p[1].cos()).abs() < 1e-15);
            assert!((j.grad()[1] + p[0].exp() * p[1].sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn sine_product_closed_form() {
        use std::f64::consts::PI;
        let p = [0.23, 0.61];
        let j = at(p, |v| (v[0] * PI).sin() * (v[1] * PI).sin());
        let u = (PI * p[0]).sin() * (PI * p[1]).sin();
        assert!((j.lap + 2.0 * PI * PI * u).abs() < 1e-10);
        assert!((j.grad()[0] - PI * (PI * p[0]).cos() * (PI * p[1]).sin()).abs() < 1e-12);
    }

    #[test]
    fn quotient_and_power_rules() {
        // Δ(1/(1+x²+y²)) = (4r² - 4)/(1+r²)³ in 2-D with r² = x²+y²
        let p = [0.4, 0.3];
        let j = at(p, |v| (1.0 + v[0] * v[0] + v[1] * v[1]).recip());
        let r2: f64 = 0.25;
        assert!((j.lap - (4.0 * r2 - 4.0) / (1.0 + r2).powi(3)).abs() < 1e-13);
        // Δ r^{2p} = (2p)² r^{2p-2} in 2-D
        let q = 9.0 / 4.0;
        let j = at(p, |v| (v[0] * v[0] + v[1] * v[1]).powf(q));
        let expect = (2.0 * q).powi(2) * r2.powf(q - 1.0);
        assert!((j.lap - expect).abs() < 1e-13);
        let origin = at([0.0, 0.0], |v| (v[0] * v[0] + v[1] * v[1]).powf(q));
        assert_eq!((origin.value, origin.lap), (0.0, 0.0));
    }

    #[test]
    fn relu3_derivatives() {
        let j = Jet2::variable(0.5, 0, 1).relu3();
        assert_eq!((j.value, j.grad()[0], j.lap), (0.125, 0.75, 3.0));
        let z = Jet2::variable(0.0, 0, 1).relu3();
        assert_eq!((z.value, z.grad()[0], z.lap), (0.0, 0.0, 0.0));
    }

    #[test]
    fn tanh_third_derivative_matches_differences() {
        let h = 1e-5;
        for x in [-1.3, 0.0, 0.4, 2.0] {
            let (_, _, _, d3) = tanh_derivs(x);
            let fd = (tanh_derivs(x + h).2 - tanh_derivs(x - h).2) / (2.0 * h);
            assert!((d3 - fd).abs() < 1e-8);
        }
    }
}
