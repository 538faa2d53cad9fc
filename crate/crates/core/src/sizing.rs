//! Closed-form upper bounds on the number of states and transitions of the
//! network models, and of the earlier construction that stores whole delay
//! sequences of plant states.
//!
//! All arithmetic is exact.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::packet::DelayBounds;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SizingError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

/// Inputs of the size formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeInputs {
    /// Number of plant abstraction states.
    pub d_card: u64,
    /// Number of plant abstraction inputs.
    pub u_card: u64,
    pub bounds: DelayBounds,
    /// Largest number of successors of a plant state under one input.
    pub k: u64,
}

impl SizeInputs {
    pub fn new(d_card: u64, u_card: u64, bounds: DelayBounds, k: u64) -> Result<Self, SizingError> {
        for (name, v) in [("d_card", d_card), ("u_card", u_card), ("k", k)] {
            if v == 0 {
                return Err(SizingError::NotPositive(name));
            }
        }
        Ok(SizeInputs {
            d_card,
            u_card,
            bounds,
            k,
        })
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn pow(base: u64, exp: u32) -> BigUint {
    big(base).pow(exp)
}

/// `|X| = d · u^Nmax · (Nmax − Nmin + 1)^Nmax` for a static controller.
pub fn state_count_static(si: &SizeInputs) -> BigUint {
    let r = si.bounds.combined();
    big(si.d_card) * pow(si.u_card, r.hi()) * pow(r.width() as u64, r.hi())
}

/// `|X| = (d + 1)^nsc_max · u^nca_max · w_sc^nsc_max · w_ca^nca_max` for a
/// controller with memory, `w` being the number of delay values per channel.
pub fn state_count_dynamic(si: &SizeInputs) -> BigUint {
    let (sc, ca) = (si.bounds.sc(), si.bounds.ca());
    pow(si.d_card + 1, sc.hi())
        * pow(si.u_card, ca.hi())
        * pow(sc.width() as u64, sc.hi())
        * pow(ca.width() as u64, ca.hi())
}

/// Transition bound for the static model: `|X| · u · (Nmax − Nmin + 1) · K`.
pub fn size_static(si: &SizeInputs) -> BigUint {
    state_count_static(si) * big(si.u_card) * big(si.bounds.combined().width() as u64) * big(si.k)
}

/// Transition bound for the dynamic model: `|X| · u · w_sc · w_ca · K`.
pub fn size_dynamic(si: &SizeInputs) -> BigUint {
    state_count_dynamic(si)
        * big(si.u_card)
        * big(si.bounds.sc().width() as u64)
        * big(si.bounds.ca().width() as u64)
        * big(si.k)
}

/// States of the earlier construction: `Σ d^i` over `i ∈ {1} ∪ [Nmin; Nmax]`.
pub fn state_count_prior_work(si: &SizeInputs) -> BigUint {
    let r = si.bounds.combined();
    let mut exps: Vec<u32> = r.values().collect();
    if !r.contains(1) {
        exps.push(1);
    }
    exps.into_iter().map(|i| pow(si.d_card, i)).sum()
}

/// Transition bound of the earlier construction:
/// `|X⋆| · u · (Nmax − Nmin + 1) · K`.
pub fn size_prior_work(si: &SizeInputs) -> BigUint {
    state_count_prior_work(si)
        * big(si.u_card)
        * big(si.bounds.combined().width() as u64)
        * big(si.k)
}

/// Decimal scientific notation with `digits` significant digits, rounding
/// half up: `61593984002400` with 5 digits gives `6.1594e13`.
pub fn scientific(value: &BigUint, digits: usize) -> String {
    let digits = digits.max(1);
    let s = value.to_str_radix(10);
    if s == "0" {
        return format!("{}e0", fixed_mantissa("0".repeat(digits).as_str()));
    }
    let mut exp = s.len() - 1;
    let mut mantissa: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
    if mantissa.len() > digits {
        let round_up = mantissa[digits] >= 5;
        mantissa.truncate(digits);
        if round_up {
            let mut i = digits;
            loop {
                if i == 0 {
                    mantissa.insert(0, 1);
                    mantissa.truncate(digits);
                    exp += 1;
                    break;
                }
                i -= 1;
                if mantissa[i] == 9 {
                    mantissa[i] = 0;
                } else {
                    mantissa[i] += 1;
                    break;
                }
            }
        }
    } else {
        mantissa.resize(digits, 0);
    }
    let text: String = mantissa.iter().map(|d| char::from(b'0' + d)).collect();
    format!("{}e{}", fixed_mantissa(&text), exp)
}

fn fixed_mantissa(d: &str) -> String {
    if d.len() == 1 {
        d.to_string()
    } else {
        format!("{}.{}", &d[..1], &d[1..])
    }
}

/// One row of the size table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeRow {
    pub name: &'static str,
    pub formula: &'static str,
    pub exact: String,
    pub scientific: String,
}

/// All bounds, in the order: prior work, dynamic, static, then state counts.
pub fn size_table(si: &SizeInputs) -> Vec<SizeRow> {
    let row = |name, formula, v: BigUint| SizeRow {
        name,
        formula,
        scientific: scientific(&v, 5),
        exact: v.to_str_radix(10),
    };
    vec![
        row(
            "size_prior_work",
            "sum_{i in {1} u [Nmin;Nmax]} d^i * u * (Nmax-Nmin+1) * K",
            size_prior_work(si),
        ),
        row(
            "size_dynamic",
            "(d+1)^nsc_max * u^(nca_max+1) * w_sc^(nsc_max+1) * w_ca^(nca_max+1) * K",
            size_dynamic(si),
        ),
        row(
            "size_static",
            "d * u^(Nmax+1) * (Nmax-Nmin+1)^(Nmax+1) * K",
            size_static(si),
        ),
        row(
            "states_prior_work",
            "sum_{i in {1} u [Nmin;Nmax]} d^i",
            state_count_prior_work(si),
        ),
        row(
            "states_dynamic",
            "(d+1)^nsc_max * u^nca_max * w_sc^nsc_max * w_ca^nca_max",
            state_count_dynamic(si),
        ),
        row(
            "states_static",
            "d * u^Nmax * (Nmax-Nmin+1)^Nmax",
            state_count_static(si),
        ),
    ]
}
