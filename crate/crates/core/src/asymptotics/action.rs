use crate::precision::{beta, BigReal, PrecisionContext};

/// `S₀(M) = 2^{-1/(M-1)} · B(1/(M-1), 3/2) / (M-1)`.
pub fn classical_action_prefactor(m: u32, ctx: PrecisionContext) -> BigReal {
    assert!(m >= 2, "M must be at least 2");
    let work = ctx.raised(10);
    let n = (m - 1) as i64;
    let inv = BigReal::from_ratio(1, n, work);
    let b = beta(&inv, &BigReal::from_ratio(3, 2, work), work).expect("positive arguments");
    let two_pow = BigReal::from_i64(2, work).pow(&-&inv);
    (&two_pow * &b).div_int(n).with_context(ctx)
}

/// `A_M = S₀(M)^{M-1}`.
pub fn instanton_action_exact(m: u32, ctx: PrecisionContext) -> BigReal {
    let work = ctx.raised(10);
    classical_action_prefactor(m, work)
        .powi((m - 1) as i64)
        .with_context(ctx)
}
