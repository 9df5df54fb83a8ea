use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos coefficients, g = 607/128, 15 terms (Godfrey's set).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_C: [f64; 15] = [
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
];

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && (z.re - z.re.round()).abs() < 1e-300
}

/// Gamma function on the complex plane (Lanczos approximation, reflection for
/// the left half plane).
pub fn gamma_complex(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleError(format!("Gamma pole at z = {}", z.re)));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.5 {
        // reflection: Gamma(z) = pi / (sin(pi z) Gamma(1-z))
        let s = (C64::new(PI, 0.0) * z).sin();
        return C64::new(PI, 0.0) / (s * gamma_unchecked(C64::new(1.0, 0.0) - z));
    }
    let zm1 = z - 1.0;
    let mut acc = C64::new(LANCZOS_C[0], 0.0);
    for (k, &ck) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += C64::new(ck, 0.0) / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    let sqrt_two_pi = (2.0 * PI).sqrt();
    sqrt_two_pi * t.powc(zm1 + 0.5) * (-t).exp() * acc
}

/// log Gamma on the right half plane (used to assemble stable Beta ratios).
pub fn ln_gamma_real(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_real needs x > 0");
    if x < 0.5 {
        return PI.ln() - (PI * x).sin().ln() - ln_gamma_real(1.0 - x);
    }
    let zm1 = x - 1.0;
    let mut acc = LANCZOS_C[0];
    for (k, &ck) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += ck / (zm1 + k as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

// Bernoulli numbers B_2 .. B_20 for the Euler-Maclaurin correction.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta by Euler-Maclaurin: shift the argument until it is large,
/// then apply the Bernoulli correction to order 12.
///
/// Accurate to ~1e-10 relative for Re(s) > -5, |Im(s)| <= 50.
pub fn hurwitz_zeta(s: C64, a: f64) -> Result<C64> {
    if !(a > 0.0) {
        return Err(Error::DomainError(format!("Hurwitz parameter a = {a} must be positive")));
    }
    if (s - C64::new(1.0, 0.0)).norm() < 1e-14 {
        return Err(Error::PoleError("Hurwitz zeta pole at s = 1".into()));
    }
    // shift until (n + a) clears the Bernoulli series scale; in the left
    // half plane the head terms grow like (a+k)^{|Re s|}, so the shift is
    // kept as small as the asymptotics allow to preserve relative accuracy
    let target = if s.re >= 0.0 {
        26.0 + 2.0 * s.norm()
    } else {
        (1.2 * s.im.abs() + 0.9 * s.re.abs() + 2.5).max(5.0)
    };
    let n = if a >= target { 0 } else { (target - a).ceil() as usize };

    // integral-compensated head: summing
    //   (a+k)^{-s} - [(a+k+1)^{1-s} - (a+k)^{1-s}]/(1-s)
    // and closing with a^{1-s}/(s-1) avoids the head-vs-integral
    // cancellation that destroys relative accuracy for Re(s) < 0
    let one = C64::new(1.0, 0.0);
    let mut head = C64::new(0.0, 0.0);
    let mut pow_lo = C64::new(a, 0.0).powc(one - s);
    for k in 0..n {
        let lo = a + k as f64;
        let pow_hi = C64::new(lo + 1.0, 0.0).powc(one - s);
        head += C64::new(lo, 0.0).powc(-s) - (pow_hi - pow_lo) / (one - s);
        pow_lo = pow_hi;
    }
    let x = a + n as f64;
    let xc = C64::new(x, 0.0);
    let mut tail = C64::new(a, 0.0).powc(one - s) / (s - 1.0) + 0.5 * xc.powc(-s);
    // Bernoulli corrections: sum_j B_2j/(2j)! * (s)_{2j-1} * x^{1-s-2j};
    // asymptotic series, truncated at its smallest term
    let mut poch = s; // (s)_1
    let mut fact = 2.0; // (2j)! at j=1
    let mut last_mag = f64::INFINITY;
    for (j, &b2j) in BERNOULLI_EVEN.iter().enumerate() {
        let pw = xc.powc(C64::new(1.0 - (2 * j + 2) as f64, 0.0) - s);
        let term = b2j / fact * poch * pw;
        let mag = term.norm();
        if mag > last_mag {
            break;
        }
        tail += term;
        last_mag = mag;
        // advance (s)_{2j-1} -> (s)_{2j+1} and (2j)! -> (2j+2)!
        poch *= (s + (2 * j + 1) as f64) * (s + (2 * j + 2) as f64);
        let next = (2 * j + 3) as f64 * (2 * j + 4) as f64;
        fact *= next;
    }
    Ok(head + tail)
}
