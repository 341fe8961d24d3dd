//! Parameter sets for the δ-2 regular LWE function and the six conditions
//! they must satisfy.
//!
//! Everything is derived from `(n, k, μ, μ′)`:
//!
//! ```text
//! q = 2^k    m̄ = 2n    ω = nk    m = m̄ + ω
//! α′ = μ′ / (√m · q)    α = m · α′    B = 2    C = 1/√(2π)
//! r_max = q / (2B · √((C · αq · (√(2n) + √(kn) + √n))² + 1))
//! ```
//!
//! [`gen_params`] instantiates the standard family `k = 5⌈log₂ n⌉ + 21`,
//! `μ = ⌈2mn√(2+k)⌉`, `μ′ = μ/m`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::zq::Modulus;
use crate::{Error, Result};

/// A non-negative rational number `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rational {
    pub num: u128,
    pub den: u128,
}

impl Rational {
    pub fn new(num: u128, den: u128) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("rational with zero denominator"));
        }
        Ok(Self { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact equality of values (cross multiplication).
    pub fn same_value(self, other: Rational) -> bool {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(a), Some(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

/// The complete parameter tuple of the δ-2 regular function.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LweParams {
    /// Lattice dimension (security parameter).
    pub n: usize,
    /// `q = 2^k`.
    pub k: u32,
    pub m_bar: usize,
    pub omega: usize,
    pub m: usize,
    /// Infinity-norm bound on input errors.
    pub mu: u64,
    /// Scale of the trapdoor error `e₀`.
    pub mu_prime: Rational,
    pub alpha_prime: f64,
    pub alpha: f64,
    pub gadget_base: f64,
    pub c_const: f64,
    /// Largest euclidean error length the trapdoor inversion corrects.
    pub r_max: f64,
}

/// The constant `C ≈ 1/√(2π)` of the trapdoor quality bound.
pub fn c_constant() -> f64 {
    1.0 / libm::sqrt(2.0 * PI)
}

fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

impl LweParams {
    /// Derives every dependent field from `(n, k, μ, μ′)`.
    pub fn from_parts(n: usize, k: u32, mu: u64, mu_prime: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be positive"));
        }
        Modulus::new(k)?;
        let m_bar = 2 * n;
        let omega = n * k as usize;
        let m = m_bar + omega;
        let q = libm::exp2(f64::from(k));
        let sqrt_m = libm::sqrt(m as f64);
        let alpha_prime = mu_prime.to_f64() / (sqrt_m * q);
        let alpha = m as f64 * alpha_prime;
        let gadget_base = 2.0;
        let c_const = c_constant();
        let nf = n as f64;
        let spread = libm::sqrt(2.0 * nf) + libm::sqrt(k as f64 * nf) + libm::sqrt(nf);
        let inner = c_const * (alpha * q) * spread;
        let r_max = q / (2.0 * gadget_base * libm::sqrt(inner * inner + 1.0));
        Ok(Self {
            n,
            k,
            m_bar,
            omega,
            m,
            mu,
            mu_prime,
            alpha_prime,
            alpha,
            gadget_base,
            c_const,
            r_max,
        })
    }

    /// Same `n` and `k`, a different `μ`, with `μ′ = μ/m` recomputed.
    pub fn with_mu(&self, mu: u64) -> Result<Self> {
        let m = (2 * self.n + self.n * self.k as usize) as u128;
        Self::from_parts(self.n, self.k, mu, Rational::new(u128::from(mu), m)?)
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.k).expect("k validated at construction")
    }

    pub fn q_f64(&self) -> f64 {
        libm::exp2(f64::from(self.k))
    }

    /// Standard deviation `αq` of the gadget trapdoor `R`.
    pub fn trapdoor_sigma(&self) -> f64 {
        self.alpha * self.q_f64()
    }

    /// Standard deviation `α′q` of the REG2 trapdoor error `e₀`.
    pub fn shift_sigma(&self) -> f64 {
        self.alpha_prime * self.q_f64()
    }

    /// Bits per error coordinate in the preimage encoding: `⌈log₂(2μ+1)⌉`.
    pub fn error_bits(&self) -> u32 {
        let span = 2 * u128::from(self.mu) + 1;
        u128::BITS - (span - 1).leading_zeros()
    }

    /// Length of an encoded preimage `(s, e, c)`.
    pub fn domain_bits(&self) -> usize {
        self.n * self.k as usize + self.m * self.error_bits() as usize + 1
    }

    /// True when every derived field equals its recomputation from
    /// `(n, k, μ, μ′)`.
    pub fn is_consistent(&self) -> bool {
        match Self::from_parts(self.n, self.k, self.mu, self.mu_prime) {
            Ok(p) => p == *self,
            Err(_) => false,
        }
    }
}

/// Instantiates the standard parameter family for lattice dimension `n`.
pub fn gen_params(n: usize) -> Result<LweParams> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2"));
    }
    let k = 5 * ceil_log2(n) + 21;
    if k > 127 {
        return Err(Error::ModulusOverflow { n, k });
    }
    let m = 2 * n + n * k as usize;
    // μ = ⌈2mn√(2+k)⌉ = ⌈√(4m²n²(2+k))⌉, computed exactly.
    let (m128, n128) = (m as u128, n as u128);
    let target = 4 * m128 * m128 * n128 * n128 * (2 + u128::from(k));
    let root = target.isqrt();
    let mu = if root * root == target {
        root
    } else {
        root + 1
    };
    let mu = u64::try_from(mu).map_err(|_| Error::ModulusOverflow { n, k })?;
    LweParams::from_parts(n, k, mu, Rational::new(u128::from(mu), m128)?)
}

/// The six parameter conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Constraint {
    /// `n = o(m)`, checked as `m ≥ n(2+k)`.
    Injectivity,
    /// `0 < α < 1`.
    AlphaRange,
    /// `μ′ = μ/m`.
    ShiftScale,
    /// `α′q ≥ 2√n`.
    ReductionWidth,
    /// `n/α′` polynomial, checked as `n/α′ ≤ n^c`.
    PolynomialFactor,
    /// `√m·μ < r_max − μ′√m`.
    InversionRadius,
}

impl Constraint {
    pub const ALL: [Constraint; 6] = [
        Constraint::Injectivity,
        Constraint::AlphaRange,
        Constraint::ShiftScale,
        Constraint::ReductionWidth,
        Constraint::PolynomialFactor,
        Constraint::InversionRadius,
    ];

    /// 1-based position in the list of conditions.
    pub fn number(self) -> u8 {
        match self {
            Constraint::Injectivity => 1,
            Constraint::AlphaRange => 2,
            Constraint::ShiftScale => 3,
            Constraint::ReductionWidth => 4,
            Constraint::PolynomialFactor => 5,
            Constraint::InversionRadius => 6,
        }
    }
}

/// Tunables for the two asymptotic conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintConfig {
    /// Exponent `c` in `n/α′ ≤ n^c`. The standard family needs about 15.6 at
    /// `n = 5`; the default covers every `n ≥ 4`.
    pub poly_exponent: f64,
}

impl Default for ConstraintConfig {
    fn default() -> Self {
        Self {
            poly_exponent: 16.0,
        }
    }
}

/// Outcome of one condition, with both sides of the inequality.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub statement: String,
}

/// Evaluates all six conditions.
pub fn constraint_report(p: &LweParams, config: &ConstraintConfig) -> Vec<ConstraintCheck> {
    let n = p.n as f64;
    let m = p.m as f64;
    let sqrt_m = libm::sqrt(m);
    let mu = p.mu as f64;
    let mu_prime = p.mu_prime.to_f64();
    let mut out = Vec::with_capacity(6);

    let required_m = p.n * (2 + p.k as usize);
    out.push(ConstraintCheck {
        constraint: Constraint::Injectivity,
        holds: p.m >= required_m,
        lhs: m,
        rhs: required_m as f64,
        statement: String::from("m >= n(2+k)"),
    });

    out.push(ConstraintCheck {
        constraint: Constraint::AlphaRange,
        holds: p.alpha > 0.0 && p.alpha < 1.0,
        lhs: p.alpha,
        rhs: 1.0,
        statement: String::from("0 < alpha < 1"),
    });

    let expected = Rational {
        num: u128::from(p.mu),
        den: p.m as u128,
    };
    out.push(ConstraintCheck {
        constraint: Constraint::ShiftScale,
        holds: p.mu_prime.same_value(expected),
        lhs: mu_prime,
        rhs: mu / m,
        statement: String::from("mu' = mu/m"),
    });

    // α′q = μ′/√m ≥ 2√n  ⇔  num² ≥ 4·n·m·den²
    let width_holds = {
        let Rational { num, den } = p.mu_prime;
        let lhs = num.checked_mul(num);
        let rhs = (4 * p.n as u128 * p.m as u128)
            .checked_mul(den)
            .and_then(|v| v.checked_mul(den));
        match (lhs, rhs) {
            (Some(l), Some(r)) => l >= r,
            _ => mu_prime / sqrt_m >= 2.0 * libm::sqrt(n),
        }
    };
    out.push(ConstraintCheck {
        constraint: Constraint::ReductionWidth,
        holds: width_holds,
        lhs: mu_prime / sqrt_m,
        rhs: 2.0 * libm::sqrt(n),
        statement: String::from("alpha' q >= 2 sqrt(n)"),
    });

    let log_factor = libm::log(n) - libm::log(p.alpha_prime);
    let log_bound = config.poly_exponent * libm::log(n);
    out.push(ConstraintCheck {
        constraint: Constraint::PolynomialFactor,
        holds: p.alpha_prime > 0.0 && p.n >= 2 && log_factor <= log_bound,
        lhs: log_factor,
        rhs: log_bound,
        statement: format!("ln(n/alpha') <= {} ln(n)", config.poly_exponent),
    });

    let lhs6 = sqrt_m * mu;
    let rhs6 = p.r_max - mu_prime * sqrt_m;
    out.push(ConstraintCheck {
        constraint: Constraint::InversionRadius,
        holds: lhs6 < rhs6,
        lhs: lhs6,
        rhs: rhs6,
        statement: String::from("sqrt(m) mu < r_max - mu' sqrt(m)"),
    });

    out
}

/// The violated conditions; empty means the parameters are valid.
pub fn check_constraints(p: &LweParams) -> Vec<Constraint> {
    check_constraints_with(p, &ConstraintConfig::default())
}

pub fn check_constraints_with(p: &LweParams, config: &ConstraintConfig) -> Vec<Constraint> {
    constraint_report(p, config)
        .into_iter()
        .filter(|c| !c.holds)
        .map(|c| c.constraint)
        .collect()
}

/// Fails with [`Error::InvalidParams`] listing the violated conditions.
pub fn validate(p: &LweParams) -> Result<()> {
    let violations = check_constraints(p);
    if violations.is_empty() {
        Ok(())
    } else {
        let list: Vec<u8> = violations.iter().map(|c| c.number()).collect();
        Err(Error::InvalidParams(format!(
            "violated constraints {list:?}"
        )))
    }
}
