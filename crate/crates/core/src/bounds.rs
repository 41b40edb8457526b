//! Closed-form budget calculators: answer entropies, the four detection
//! difficulty functions, necessary/sufficient budgets for both querying
//! schemes, the adaptivity-gap envelope, and the exact distance law of
//! the likelihood center on regular trees.

use alloc::format;
use alloc::vec;

use num_bigint::BigUint;
// Float resolves f64 math in builds where no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::estimators::{r_star_ad_sufficient, r_star_na_sufficient};

const LN_2: f64 = core::f64::consts::LN_2;

fn x_ln_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Entropy (nats) of one identity answer: -p ln p - (1-p) ln(1-p).
pub fn entropy_id(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [0, 1], got {p}"
        )));
    }
    Ok(-x_ln_x(p) - x_ln_x(1.0 - p))
}

/// Entropy (nats) of one direction answer over d alternatives:
/// -q ln q - (1-q) ln((1-q)/(d-1)). Equals ln d at q = 1/d.
pub fn entropy_dir(q: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in [0, 1], got {q}"
        )));
    }
    if d < 3 {
        return Err(Error::InvalidParameter("d must be at least 3".into()));
    }
    Ok(-x_ln_x(q) - x_ln_x(1.0 - q) + (1.0 - q) * ((d - 1) as f64).ln())
}

fn check_f_domain(p: f64, q: f64, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter("d must be at least 3".into()));
    }
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in [1/2, 1], got {p}"
        )));
    }
    let q_min = 1.0 / d as f64;
    if !(q_min..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in [1/{d}, 1], got {q}"
        )));
    }
    Ok(())
}

/// Difficulty function of the batch-scheme lower bound:
/// (1 - H2(p)) + p(1-p)(log2 d - H2(q)), entropies in bits.
///
/// Nonnegative on the whole domain; clamped at zero so cancellation
/// noise next to the uninformative corner cannot flip the sign.
pub fn f_ln(p: f64, q: f64, d: usize) -> Result<f64> {
    check_f_domain(p, q, d)?;
    let h_p = entropy_id(p)? / LN_2;
    let h_q = entropy_dir(q, d)? / LN_2;
    Ok(((1.0 - h_p) + p * (1.0 - p) * ((d as f64).log2() - h_q)).max(0.0))
}

/// Difficulty function of the batch-scheme sufficiency bound:
/// 3(p - 1/2)^2 + (d-1) p (1-p) (q - 1/d)^2 / (3d).
pub fn f_n(p: f64, q: f64, d: usize) -> Result<f64> {
    check_f_domain(p, q, d)?;
    let d_f = d as f64;
    let dir = (q - 1.0 / d_f).powi(2);
    Ok(3.0 * (p - 0.5).powi(2) + (d_f - 1.0) * p * (1.0 - p) * dir / (3.0 * d_f))
}

/// Difficulty function of the adaptive-scheme lower bound:
/// (1 - H2(p)) + p(log2 d - H2(q)), entropies in bits. Clamped at zero
/// like [`f_ln`].
pub fn f_la(p: f64, q: f64, d: usize) -> Result<f64> {
    check_f_domain(p, q, d)?;
    let h_p = entropy_id(p)? / LN_2;
    let h_q = entropy_dir(q, d)? / LN_2;
    Ok(((1.0 - h_p) + p * ((d as f64).log2() - h_q)).max(0.0))
}

/// Difficulty function of the adaptive-scheme sufficiency bound:
/// (2d/(d-1))(p - 1/2)^2 + ((d-1)/(d-2))(q - 1/d)^3.
pub fn f_a(p: f64, q: f64, d: usize) -> Result<f64> {
    check_f_domain(p, q, d)?;
    let d_f = d as f64;
    Ok(2.0 * d_f / (d_f - 1.0) * (p - 0.5).powi(2)
        + (d_f - 1.0) / (d_f - 2.0) * (q - 1.0 / d_f).powi(3))
}

/// Shared inputs of the budget calculators. `c_d` (the unspecified
/// degree-dependent constant) and `h_t` (the infection-time entropy
/// surrogate) default to 1; [`h_t_upper`] gives the K/r upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub delta: f64,
    pub p: f64,
    pub q: f64,
    pub d: usize,
    pub c_d: f64,
    pub h_t: f64,
}

impl BoundInputs {
    pub fn new(delta: f64, p: f64, q: f64, d: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        check_f_domain(p, q, d)?;
        Ok(BoundInputs {
            delta,
            p,
            q,
            d,
            c_d: 1.0,
            h_t: 1.0,
        })
    }

    pub fn with_constant(mut self, c_d: f64) -> Result<Self> {
        if !c_d.is_finite() || c_d <= 0.0 {
            return Err(Error::InvalidParameter("c_d must be positive".into()));
        }
        self.c_d = c_d;
        Ok(self)
    }

    pub fn with_time_entropy(mut self, h_t: f64) -> Result<Self> {
        if !h_t.is_finite() || h_t <= 0.0 {
            return Err(Error::InvalidParameter("h_t must be positive".into()));
        }
        self.h_t = h_t;
        Ok(self)
    }

    fn alpha(&self) -> u8 {
        if self.p < 1.0 {
            2
        } else {
            1
        }
    }
}

/// Infection-time entropy upper bound H(T) <= K/r for unit-rate spread.
pub fn h_t_upper(budget: f64, repetition: f64) -> Result<f64> {
    if !repetition.is_finite() || repetition <= 0.0 {
        return Err(Error::InvalidParameter(
            "repetition must be positive".into(),
        ));
    }
    Ok(budget / repetition)
}

fn iterated_log(x: f64, label: &str) -> Result<f64> {
    if x <= core::f64::consts::E {
        return Err(Error::InvalidParameter(format!(
            "{label} must exceed e for the iterated log, got {x}"
        )));
    }
    Ok(x.ln().ln())
}

/// A sufficiency budget together with the repetition count its scheme
/// would be tuned to at that budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetWithRepetition {
    pub budget: f64,
    pub r_star: u32,
}

/// Batch-scheme lower bound: below
/// C H(T) (2/delta)^(1/2) / (f_LN ln ln(2/delta))
/// no batch algorithm reaches detection probability 1 - delta.
pub fn necessary_budget_na(inputs: &BoundInputs) -> Result<f64> {
    let loglog = iterated_log(2.0 / inputs.delta, "2/delta")?;
    let f = f_ln(inputs.p, inputs.q, inputs.d)?;
    Ok(inputs.c_d * inputs.h_t * (2.0 / inputs.delta).sqrt() / (f * loglog))
}

/// Batch-scheme sufficiency: with budget at least
/// (12 d / (d-2)) (2/delta) / (f_N ln ln(2/delta))
/// the tuned batch estimator reaches 1 - delta. The repetition count is
/// the fixed point of re-evaluating its formula at the bound (the bound
/// itself does not move, so one evaluation settles it).
pub fn sufficient_budget_na(inputs: &BoundInputs) -> Result<BudgetWithRepetition> {
    let loglog = iterated_log(2.0 / inputs.delta, "2/delta")?;
    let f = f_n(inputs.p, inputs.q, inputs.d)?;
    let d_f = inputs.d as f64;
    let budget = 12.0 * d_f / (d_f - 2.0) * (2.0 / inputs.delta) / (f * loglog);
    let r_star = if budget.is_finite() && budget >= 2.0 {
        r_star_na_sufficient(inputs.p, inputs.q, inputs.d, budget)?
    } else {
        1
    };
    Ok(BudgetWithRepetition { budget, r_star })
}

/// Adaptive-scheme lower bound: below
/// C H(T) (ln(7/delta))^(alpha/2) / (f_LA ln ln(7/delta))
/// no adaptive algorithm reaches 1 - delta. alpha is 2 for p < 1 and 1
/// for p = 1.
pub fn necessary_budget_ad(inputs: &BoundInputs) -> Result<f64> {
    let loglog = iterated_log(7.0 / inputs.delta, "7/delta")?;
    let f = f_la(inputs.p, inputs.q, inputs.d)?;
    let power = (7.0 / inputs.delta).ln().powf(inputs.alpha() as f64 / 2.0);
    Ok(inputs.c_d * inputs.h_t * power / (f * loglog))
}

/// Adaptive-scheme sufficiency: with budget at least
/// (2(2d-3)/d) (ln(7/delta))^alpha / (f_A ln ln(7/delta))
/// the tuned adaptive estimator reaches 1 - delta.
pub fn sufficient_budget_ad(inputs: &BoundInputs) -> Result<BudgetWithRepetition> {
    let loglog = iterated_log(7.0 / inputs.delta, "7/delta")?;
    let f = f_a(inputs.p, inputs.q, inputs.d)?;
    let d_f = inputs.d as f64;
    let power = (7.0 / inputs.delta).ln().powi(inputs.alpha() as i32);
    let budget = 2.0 * (2.0 * d_f - 3.0) / d_f * power / (f * loglog);
    let r_star = if budget.is_finite() && budget >= 3.0 {
        r_star_ad_sufficient(inputs.p, inputs.q, inputs.d, budget)?
    } else {
        1
    };
    Ok(BudgetWithRepetition { budget, r_star })
}

/// Two-sided envelope of the batch-to-adaptive budget ratio at target
/// error delta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEnvelope {
    pub lower: f64,
    pub upper: f64,
    pub alpha: u8,
}

/// Envelope of the adaptivity gap:
/// U1 (1/delta)^(1/2) / ln^alpha(1/delta) <= gap <=
/// U2 (1/delta) / ln^(alpha/2)(1/delta).
pub fn adaptivity_gap_envelope(inputs: &BoundInputs, u1: f64, u2: f64) -> Result<GapEnvelope> {
    if !u1.is_finite() || u1 <= 0.0 || !u2.is_finite() || u2 <= 0.0 {
        return Err(Error::InvalidParameter(
            "envelope constants must be positive".into(),
        ));
    }
    let inv = 1.0 / inputs.delta;
    let log = inv.ln();
    let alpha = inputs.alpha();
    Ok(GapEnvelope {
        lower: u1 * inv.sqrt() / log.powi(alpha as i32),
        upper: u2 * inv / log.powf(alpha as f64 / 2.0),
        alpha,
    })
}

/// Elementary symmetric polynomial of degree `b` in x_i = 1 + i(d - 2),
/// i = 1..=a, in exact integer arithmetic (O(a b) recurrence).
pub fn g_combinatorial(a: usize, b: usize, d: usize) -> Result<BigUint> {
    if d < 3 {
        return Err(Error::InvalidParameter("d must be at least 3".into()));
    }
    if b > a {
        return Err(Error::InvalidParameter(format!(
            "degree {b} exceeds the number of terms {a}"
        )));
    }
    let mut table = vec![BigUint::zero(); b + 1];
    table[0] = BigUint::one();
    for i in 1..=a {
        let x = BigUint::from(1 + i * (d - 2));
        for j in (1..=b.min(i)).rev() {
            let add = &table[j - 1] * &x;
            table[j] += add;
        }
    }
    Ok(table.pop().expect("table has b + 1 entries"))
}

fn big_ratio(numerator: BigUint, denominator: BigUint) -> f64 {
    let bits = numerator.bits().max(denominator.bits());
    let (n, d) = if bits > 900 {
        let shift = bits - 900;
        (&numerator >> shift, &denominator >> shift)
    } else {
        (numerator, denominator)
    };
    n.to_f64().expect("shifted below f64 range") / d.to_f64().expect("shifted below f64 range")
}

fn check_pmf_domain(d: usize, k: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::InvalidParameter("d must be at least 3".into()));
    }
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    Ok(())
}

/// Probability that the k-th infected node on an infinite d-regular tree
/// sits exactly l hops from the source:
/// G(k-2, k-l-1) d (d-1)^(l-1) / prod_{j=1..k-1} (2 + j(d-2)).
pub fn distance_pmf(d: usize, k: usize, l: usize) -> Result<f64> {
    check_pmf_domain(d, k)?;
    if l == 0 || l > k - 1 {
        return Err(Error::InvalidParameter(format!(
            "l must lie in [1, {}], got {l}",
            k - 1
        )));
    }
    let mut numerator = g_combinatorial(k - 2, k - l - 1, d)?;
    numerator *= BigUint::from(d);
    numerator *= BigUint::from(d - 1).pow((l - 1) as u32);
    let mut denominator = BigUint::one();
    for j in 1..k {
        denominator *= BigUint::from(2 + j * (d - 2));
    }
    Ok(big_ratio(numerator, denominator))
}

/// Closed form of [`distance_pmf`] at l = 1:
/// d prod_{i=1..k-2} (1 + i(d-2)) / prod_{i=1..k-1} (2 + i(d-2)).
pub fn distance_pmf_single_hop(d: usize, k: usize) -> Result<f64> {
    check_pmf_domain(d, k)?;
    let mut numerator = BigUint::from(d);
    for i in 1..=(k - 2) {
        numerator *= BigUint::from(1 + i * (d - 2));
    }
    let mut denominator = BigUint::one();
    for i in 1..k {
        denominator *= BigUint::from(2 + i * (d - 2));
    }
    Ok(big_ratio(numerator, denominator))
}
