//! The reduction decomposition: a nonzero stable reduction factors as
//! `P̄(T) = H(T^{p^d})` with `H'(0) ≠ 0`.

use crate::error::Error;
use crate::series::ResidueSeries;
use crate::Result;

#[derive(Debug, Clone)]
pub struct LubinDecomposition {
    pub d: u32,
    pub h: ResidueSeries,
}

/// Decompose `P̄ = H(T^{p^d})` with `d` maximal; succeeds iff `d ≥ 1` and
/// `H'(0) ≠ 0`.
pub fn lubin_decompose(pbar: &ResidueSeries) -> Result<LubinDecomposition> {
    if pbar.is_zero() {
        return Err(Error::NonDecomposable("reduction is zero".into()));
    }
    let p = pbar.rf.p;
    // d = v_p(gcd of exponents), computed as the largest j with p^j
    // dividing every exponent
    let mut d: u32 = 0;
    'outer: loop {
        let step = match (p as u128).checked_pow(d + 1) {
            Some(s) if s < pbar.trunc as u128 => s as usize,
            _ => break,
        };
        for i in 1..pbar.trunc {
            if !pbar.rf.is_zero(&pbar.coeffs[i]) && i % step != 0 {
                break 'outer;
            }
        }
        d += 1;
    }
    if d == 0 {
        return Err(Error::NonDecomposable(
            "some exponent is not divisible by p".into(),
        ));
    }
    let step = (p as usize).pow(d);
    let mut h = ResidueSeries::zero(&pbar.rf, pbar.trunc);
    for i in 1..pbar.trunc {
        if i * step < pbar.trunc {
            h.coeffs[i] = pbar.coeffs[i * step].clone();
        }
    }
    if pbar.rf.is_zero(&h.linear_coeff()) {
        return Err(Error::NonDecomposable("H'(0) = 0".into()));
    }
    Ok(LubinDecomposition { d, h })
}
