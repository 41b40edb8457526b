//! CSV table over the closed-form budget calculators: one row per target
//! error level, with the repetition formulas evaluated at each bound.

use sourceq_core::bounds::{
    adaptivity_gap_envelope, necessary_budget_ad, necessary_budget_na, sufficient_budget_ad,
    sufficient_budget_na, BoundInputs,
};
use sourceq_core::estimators::{r_star_ad_necessary, r_star_na_necessary};

use crate::csv::format_real;
use crate::error::Result;

pub const BOUNDS_HEADER: &str = "delta,p,q,d,k_na_necessary,k_na_sufficient,k_ad_necessary,\
k_ad_sufficient,ag_lower,ag_upper,r_na_necessary,r_na_sufficient,r_ad_necessary,r_ad_sufficient";

#[derive(Debug, Clone, Copy)]
pub struct BoundsQuery {
    pub p: f64,
    pub q: f64,
    pub d: usize,
    pub c_d: f64,
    pub h_t: f64,
    pub u1: f64,
    pub u2: f64,
}

pub fn bounds_csv(deltas: &[f64], query: &BoundsQuery) -> Result<String> {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for &delta in deltas {
        let inputs = BoundInputs::new(delta, query.p, query.q, query.d)?
            .with_constant(query.c_d)?
            .with_time_entropy(query.h_t)?;

        let na_necessary = necessary_budget_na(&inputs)?;
        let na_sufficient = sufficient_budget_na(&inputs)?;
        let ad_necessary = necessary_budget_ad(&inputs)?;
        let ad_sufficient = sufficient_budget_ad(&inputs)?;
        let envelope = adaptivity_gap_envelope(&inputs, query.u1, query.u2)?;

        let r_na_necessary = if na_necessary.is_finite() && na_necessary >= 2.0 {
            r_star_na_necessary(query.p, query.q, query.d, na_necessary)?
        } else {
            1
        };
        let r_ad_necessary = if ad_necessary.is_finite() && ad_necessary >= 3.0 {
            r_star_ad_necessary(query.p, query.q, query.d, ad_necessary)?
        } else {
            1
        };

        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            format_real(delta),
            format_real(query.p),
            format_real(query.q),
            query.d,
            format_real(na_necessary),
            format_real(na_sufficient.budget),
            format_real(ad_necessary),
            format_real(ad_sufficient.budget),
            format_real(envelope.lower),
            format_real(envelope.upper),
            r_na_necessary,
            na_sufficient.r_star,
            r_ad_necessary,
            ad_sufficient.r_star,
        ));
    }
    Ok(out)
}
