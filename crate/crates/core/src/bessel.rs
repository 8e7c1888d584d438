//! Integer-order Bessel functions of the first and second kind for complex argument.
//!
//! `J_n` uses the ascending power series for `|z| <= 12` and a normalized
//! backward (Miller) recurrence beyond that. `Y_n` is the integer-order limit
//! of the second solution, written as a Neumann expansion over the same `J_k`
//! table (the `sin νπ` quotient is 0/0 at integer order).
//!
//! All functions are pure and reentrant.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{ComplexScalar, MathieuError, Result};

pub const MAX_ORDER: i32 = 200;
pub const MAX_ARGUMENT: f64 = 1.0e4;
/// Below this modulus the power series is used directly.
pub const SERIES_RADIUS: f64 = 12.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1.0e250;
const RESCALE_BY: f64 = 1.0e-250;
/// The Miller start order is pushed out until a trial forward recurrence grows past this.
const MILLER_GROWTH: f64 = 1.0e20;
const HANKEL_MIN_IMAG: f64 = 2.0;
const HANKEL_MIN_PHASE: f64 = 0.15;

/// `f(z)` and `f'(z)` for one Bessel function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValue {
    pub value: ComplexScalar,
    pub derivative: ComplexScalar,
}

fn check_range(n: i32, z: ComplexScalar) -> Result<()> {
    if !z.is_finite() {
        return Err(MathieuError::Range(format!("argument {z} is not finite")));
    }
    if n.abs() > MAX_ORDER {
        return Err(MathieuError::Range(format!(
            "order {n} exceeds the supported |n| <= {MAX_ORDER}"
        )));
    }
    if z.norm() > MAX_ARGUMENT {
        return Err(MathieuError::Range(format!(
            "|z| = {} exceeds the supported {MAX_ARGUMENT}",
            z.norm()
        )));
    }
    Ok(())
}

fn reflect(order: usize, n: i32, v: BesselValue) -> BesselValue {
    if n < 0 && order % 2 == 1 {
        BesselValue {
            value: -v.value,
            derivative: -v.derivative,
        }
    } else {
        v
    }
}

fn finite_or_range(v: BesselValue, what: &str, n: i32, z: ComplexScalar) -> Result<BesselValue> {
    if v.value.is_finite() && v.derivative.is_finite() {
        Ok(v)
    } else {
        Err(MathieuError::Range(format!(
            "{what}_{n}({z}) is not representable in double precision"
        )))
    }
}

/// `J_n(z)` and `J'_n(z)`; negative orders via `J_{-n} = (-1)^n J_n`.
pub fn bessel_j(n: i32, z: ComplexScalar) -> Result<BesselValue> {
    check_range(n, z)?;
    let order = n.unsigned_abs() as usize;
    let js = j_table(order + 1, z)?;
    let derivative = if order == 0 {
        -js[1]
    } else {
        (js[order - 1] - js[order + 1]) * 0.5
    };
    let v = BesselValue {
        value: js[order],
        derivative,
    };
    finite_or_range(reflect(order, n, v), "J", n, z)
}

/// `Y_n(z)` and `Y'_n(z)` on the principal branch (cut along the negative real axis).
pub fn bessel_y(n: i32, z: ComplexScalar) -> Result<BesselValue> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(MathieuError::Singularity(format!(
            "Y_{n} has a logarithmic singularity at z = 0"
        )));
    }
    check_range(n, z)?;
    let order = n.unsigned_abs() as usize;
    let js = j_table(order + 1, z)?;
    let v = y_from_table(order, z, &js);
    finite_or_range(reflect(order, n, v), "Y", n, z)
}

/// `J_n(z)` and `Y_n(z)` together, sharing one `J_k` table.
pub fn bessel_jy(n: i32, z: ComplexScalar) -> Result<(BesselValue, BesselValue)> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(MathieuError::Singularity(format!(
            "Y_{n} has a logarithmic singularity at z = 0"
        )));
    }
    check_range(n, z)?;
    let order = n.unsigned_abs() as usize;
    let js = j_table(order + 1, z)?;
    let jv = BesselValue {
        value: js[order],
        derivative: if order == 0 {
            -js[1]
        } else {
            (js[order - 1] - js[order + 1]) * 0.5
        },
    };
    let yv = y_from_table(order, z, &js);
    let j = finite_or_range(reflect(order, n, jv), "J", n, z)?;
    let y = finite_or_range(reflect(order, n, yv), "Y", n, z)?;
    Ok((j, y))
}

/// `J_0 ..= J_L` with `L > nmax` far enough out that the tail is negligible.
fn j_table(nmax: usize, z: ComplexScalar) -> Result<Vec<ComplexScalar>> {
    let modulus = z.norm();
    if modulus <= SERIES_RADIUS {
        let len = nmax + modulus.ceil() as usize + 40;
        let table: Vec<ComplexScalar> = (0..=len).map(|k| j_series(k, z)).collect();
        if table[..=nmax].iter().any(|v| !v.is_finite()) {
            return Err(MathieuError::Range(format!("J_k({z}) is not representable")));
        }
        Ok(table)
    } else {
        miller(nmax, z)
    }
}

/// Ascending series `J_k(z) = (z/2)^k Σ (-z²/4)^j / (j! (k+j)!)`.
fn j_series(k: usize, z: ComplexScalar) -> ComplexScalar {
    let half = z * 0.5;
    let mut prefactor = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        prefactor *= half / j as f64;
    }
    if prefactor == Complex64::new(0.0, 0.0) {
        return prefactor;
    }
    let step = -half * half;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut j = 1usize;
    loop {
        term *= step / ((j * (k + j)) as f64);
        sum += term;
        if (term.norm() <= f64::EPSILON * 0.5 * sum.norm() && j as f64 > half.norm())
            || j > 500
            || term == Complex64::new(0.0, 0.0)
        {
            break;
        }
        j += 1;
    }
    prefactor * sum
}

/// Backward recurrence normalized by `e^{-isz} = J_0 + 2 Σ (-is)^k J_k`, where
/// `s = sign(Im z)` so that the normalizing sum never cancels catastrophically.
fn miller(nmax: usize, z: ComplexScalar) -> Result<Vec<ComplexScalar>> {
    let modulus = z.norm();
    let rz = z.inv() * 2.0;

    // Trial forward recurrence from above the turning point: the start order
    // is where the dominant solution has outgrown the minimal one by MILLER_GROWTH.
    let k0 = nmax.max(modulus.ceil() as usize) + 1;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut cur = Complex64::new(1.0, 0.0);
    let mut k = k0;
    let cap = k0 + 4000;
    while k < cap {
        let next = rz * (k as f64) * cur - prev;
        prev = cur;
        cur = next;
        k += 1;
        if cur.norm() > MILLER_GROWTH {
            break;
        }
    }
    let start = (nmax + 15 + modulus.ceil() as usize).max(k + 10);

    let mut f = vec![Complex64::new(0.0, 0.0); start + 2];
    f[start] = Complex64::new(1.0, 0.0);
    for k in (1..=start).rev() {
        let v = rz * (k as f64) * f[k] - f[k + 1];
        f[k - 1] = v;
        if v.norm() > RESCALE_ABOVE {
            for x in &mut f[k - 1..=start] {
                *x *= RESCALE_BY;
            }
        }
    }
    f.truncate(start + 1);

    let s = if z.im >= 0.0 { 1.0 } else { -1.0 };
    // (-i s)^k cycles with period 4.
    let unit_pow = |k: usize| -> Complex64 {
        match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -s),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, s),
        }
    };
    let mut norm_sum = f[0];
    for (k, fk) in f.iter().enumerate().skip(1) {
        norm_sum += unit_pow(k) * fk * 2.0;
    }
    if norm_sum == Complex64::new(0.0, 0.0) || !norm_sum.is_finite() {
        return Err(MathieuError::Range(format!(
            "Miller normalization failed for z = {z}"
        )));
    }
    let log_factor = Complex64::new(0.0, -s) * z - norm_sum.ln();
    let factor = log_factor.exp();
    let out: Vec<ComplexScalar> = f.iter().map(|fk| fk * factor).collect();
    if out[..=nmax].iter().any(|v| !v.is_finite()) {
        return Err(MathieuError::Range(format!(
            "J_k({z}) overflows double precision"
        )));
    }
    Ok(out)
}

fn y_from_table(order: usize, z: ComplexScalar, js: &[ComplexScalar]) -> BesselValue {
    if use_hankel_route(z) {
        return y_via_hankel(order, z, js);
    }
    let value = y_neumann(order, z, js);
    let derivative = if order == 0 {
        -y_neumann(1, z, js)
    } else {
        (y_neumann(order - 1, z, js) - y_neumann(order + 1, z, js)) * 0.5
    };
    BesselValue { value, derivative }
}

/// Away from the real axis `J_k` grows like `e^{|Im z|}` while `Y_n` can be
/// far smaller, so the Neumann sum cancels. There `Y_n = i (J_n - H1_n)` is
/// used instead (upper half plane; the lower half follows by conjugation).
fn use_hankel_route(z: ComplexScalar) -> bool {
    let phase = z.im.abs().atan2(z.re);
    z.im.abs() >= HANKEL_MIN_IMAG && phase >= HANKEL_MIN_PHASE && phase <= PI - HANKEL_MIN_PHASE
}

fn y_via_hankel(order: usize, z: ComplexScalar, js: &[ComplexScalar]) -> BesselValue {
    let upper = z.im > 0.0;
    let zu = if upper { z } else { z.conj() };
    let ju = |k: usize| if upper { js[k] } else { js[k].conj() };

    // H1 grows with the order in the upper half plane, so forward recurrence is stable.
    let (h0, h1) = hankel1_01(zu);
    let rz = zu.inv() * 2.0;
    let mut hs = Vec::with_capacity(order + 2);
    hs.push(h0);
    hs.push(h1);
    for k in 1..=order {
        let next = rz * (k as f64) * hs[k] - hs[k - 1];
        hs.push(next);
    }
    let i = Complex64::new(0.0, 1.0);
    let y = |k: usize| i * (ju(k) - hs[k]);
    let value = y(order);
    let derivative = if order == 0 {
        -y(1)
    } else {
        (y(order - 1) - y(order + 1)) * 0.5
    };
    if upper {
        BesselValue { value, derivative }
    } else {
        BesselValue {
            value: value.conj(),
            derivative: derivative.conj(),
        }
    }
}

/// `H1_0(z)` and `H1_1(z)` for `0 < ph z < π` from
/// `H1_n(z) = (2 e^{-nπi/2} / πi) ∫_0^∞ e^{iz cosh t} cosh(nt) dt`.
///
/// The integrand decays doubly exponentially and is analytic in the strip
/// `|Im t| < min(ph z, π - ph z)`, so the trapezoidal rule converges geometrically.
fn hankel1_01(z: ComplexScalar) -> (ComplexScalar, ComplexScalar) {
    let phase = z.arg();
    let strip = phase.min(PI - phase);
    let step = strip / 24.0;
    let iz = Complex64::new(0.0, 1.0) * z;
    let mut s0 = iz.exp() * 0.5;
    let mut s1 = s0;
    let mut j = 1usize;
    loop {
        let t = j as f64 * step;
        let e = (iz * t.cosh()).exp();
        s0 += e;
        s1 += e * t.cosh();
        // |e^{iz cosh t}| = e^{-Im z cosh t}; stop once it is negligible against e^{-Im z}.
        if z.im * (t.cosh() - 1.0) > 45.0 + t || j > 200_000 {
            break;
        }
        j += 1;
    }
    // Full-line trapezoid: ∫_{-∞}^{∞} = 2h [f(0)/2 + Σ f(jh)].
    let scale = Complex64::new(0.0, -2.0 / PI) * step;
    let h0 = s0 * scale;
    // e^{-iπ/2} = -i
    let h1 = s1 * scale * Complex64::new(0.0, -1.0);
    (h0, h1)
}

/// Neumann expansion of the integer-order limit of `Y_n`:
///
/// ```text
/// Y_n = -(1/π) Σ_{k<n} n!/k! (2/z)^{n-k} J_k / (n-k)
///       + (2/π)(ln(z/2) - ψ(n+1)) J_n
///       - (2/π) Σ_{k≥1} (-1)^k (n+2k) J_{n+2k} / (k(n+k))
/// ```
///
/// with `ψ(n+1) = H_n - γ`. Evaluated per order, so no recurrence in `n`
/// amplifies rounding error when `|Y_n|` dips well below `|J_0|`.
fn y_neumann(n: usize, z: ComplexScalar, js: &[ComplexScalar]) -> ComplexScalar {
    let two_over_z = z.inv() * 2.0;

    // a_k = n!/k! (2/z)^{n-k}, built downward from a_n = 1.
    let mut head = Complex64::new(0.0, 0.0);
    let mut a = Complex64::new(1.0, 0.0);
    for k in (0..n).rev() {
        a *= two_over_z * ((k + 1) as f64);
        head += a * js[k] / ((n - k) as f64);
    }

    let harmonic: f64 = (1..=n).map(|j| 1.0 / j as f64).sum();
    let digamma = harmonic - EULER_GAMMA;
    let log_part = ((z * 0.5).ln() - digamma) * js[n];

    let mut tail = Complex64::new(0.0, 0.0);
    let mut k = 1usize;
    while n + 2 * k < js.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let piece = js[n + 2 * k] * (sign * (n + 2 * k) as f64 / (k * (n + k)) as f64);
        tail += piece;
        if piece == Complex64::new(0.0, 0.0) && js[n + 2 * k].norm() < f64::MIN_POSITIVE {
            break;
        }
        k += 1;
    }

    (log_part * 2.0 - head - tail * 2.0) / PI
}
