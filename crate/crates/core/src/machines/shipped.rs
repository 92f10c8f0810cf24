//! Shipped 2DFA(2) machines with supersafe first heads, and their companions.

use super::{PtmBuilder, PtmSpec, TwoHeadBuilder, TwoHeadDfaSpec};
use crate::error::{Error, Result};
use crate::languages::LanguageId;
use crate::tape::{Move, LEFT_END as L_END, RIGHT_END as R_END};

use Move::{Left as L, Right as R, Stay as S};

/// Single-head 2DFA that walks ▷ → ◁ → ▷ and halts on the final ▷.
pub fn round_trip_companion(sigma: &[char]) -> PtmSpec {
    let mut b = PtmBuilder::new(sigma, &[]);
    let out = b.state("out");
    let back = b.state("back");
    let done = b.state("done");
    let rej = b.state("rej");
    b.det(out, L_END, out, R);
    b.det(out, R_END, back, L);
    b.det(back, L_END, done, S);
    for &c in sigma {
        b.det(out, c, out, R);
        b.det(back, c, back, L);
    }
    b.build(out, done, rej).expect("round-trip companion is well formed")
}

/// Single-head 2DFA that walks ▷ → ◁ and halts there.
pub fn right_sweep_companion(sigma: &[char]) -> PtmSpec {
    let mut b = PtmBuilder::new(sigma, &[]);
    let out = b.state("out");
    let done = b.state("done");
    let rej = b.state("rej");
    b.det(out, L_END, out, R);
    b.det(out, R_END, done, S);
    for &c in sigma {
        b.det(out, c, out, R);
    }
    b.build(out, done, rej).expect("sweep companion is well formed")
}

/// EQ: H1 sweeps right then left; H2 steps right per `a` on the way out and
/// left per `b` on the way back, and must end on ▷.
pub fn eq_machine() -> TwoHeadDfaSpec {
    let sigma = ['a', 'b'];
    let mut b = TwoHeadBuilder::new(&sigma);
    let out = b.state("out");
    let back = b.state("back");
    let acc = b.state("acc");
    let rej = b.state("rej");
    for c2 in b.symbols() {
        b.rule(out, L_END, c2, out, R, S);
        if c2 == R_END {
            b.rule(out, 'a', c2, rej, S, S);
        } else {
            b.rule(out, 'a', c2, out, R, R);
        }
        b.rule(out, 'b', c2, out, R, S);
        b.rule(out, R_END, c2, back, L, S);
        b.rule(back, 'a', c2, back, L, S);
        if c2 == L_END {
            b.rule(back, 'b', c2, rej, S, S);
            b.rule(back, L_END, c2, acc, S, S);
        } else {
            b.rule(back, 'b', c2, back, L, L);
            b.rule(back, L_END, c2, rej, S, S);
        }
    }
    b.build(out, acc, rej, Some(1), Some(round_trip_companion(&sigma))).expect("EQ machine is well formed")
}

/// EQ_ab: EQ plus an `a*b*` format check on the way out.
pub fn eq_ab_machine() -> TwoHeadDfaSpec {
    let sigma = ['a', 'b'];
    let mut b = TwoHeadBuilder::new(&sigma);
    let out_a = b.state("out_a");
    let out_b = b.state("out_b");
    let back = b.state("back");
    let acc = b.state("acc");
    let rej = b.state("rej");
    for c2 in b.symbols() {
        b.rule(out_a, L_END, c2, out_a, R, S);
        if c2 == R_END {
            b.rule(out_a, 'a', c2, rej, S, S);
        } else {
            b.rule(out_a, 'a', c2, out_a, R, R);
        }
        b.rule(out_a, 'b', c2, out_b, R, S);
        b.rule(out_b, 'b', c2, out_b, R, S);
        b.rule(out_b, 'a', c2, rej, S, S);
        b.rule(out_a, R_END, c2, back, L, S);
        b.rule(out_b, R_END, c2, back, L, S);
        b.rule(back, 'a', c2, back, L, S);
        if c2 == L_END {
            b.rule(back, 'b', c2, rej, S, S);
            b.rule(back, L_END, c2, acc, S, S);
        } else {
            b.rule(back, 'b', c2, back, L, L);
            b.rule(back, L_END, c2, rej, S, S);
        }
    }
    b.build(out_a, acc, rej, Some(1), Some(round_trip_companion(&sigma))).expect("EQ_ab machine is well formed")
}

/// PAL: H1 sweeps to ◁ while H2 waits on ▷; on the way back H2 walks forward
/// and the two readings must agree.
pub fn pal_machine() -> TwoHeadDfaSpec {
    let sigma = ['a', 'b'];
    let mut b = TwoHeadBuilder::new(&sigma);
    let out = b.state("out");
    let back = b.state("back");
    let acc = b.state("acc");
    let rej = b.state("rej");
    for c2 in b.symbols() {
        b.rule(out, L_END, c2, out, R, S);
        b.rule(out, 'a', c2, out, R, S);
        b.rule(out, 'b', c2, out, R, S);
        if c2 == R_END {
            b.rule(out, R_END, c2, rej, S, S);
        } else {
            b.rule(out, R_END, c2, back, L, R);
        }
        for c1 in sigma {
            if c1 == c2 {
                b.rule(back, c1, c2, back, L, R);
            } else {
                b.rule(back, c1, c2, rej, S, S);
            }
        }
        b.rule(back, L_END, c2, acc, S, S);
    }
    b.build(out, acc, rej, Some(1), Some(round_trip_companion(&sigma))).expect("PAL machine is well formed")
}

/// TWIN: H1 sweeps right; from the `#` on, H2 trails from the start and the
/// two halves are compared symbol by symbol. Halts at ◁.
pub fn twin_machine() -> TwoHeadDfaSpec {
    let sigma = ['a', 'b', '#'];
    let mut b = TwoHeadBuilder::new(&sigma);
    let first = b.state("first");
    let compare = b.state("compare");
    let acc = b.state("acc");
    let rej = b.state("rej");
    for c2 in b.symbols() {
        for c1 in [L_END, 'a', 'b'] {
            b.rule(first, c1, c2, first, R, S);
        }
        if c2 == R_END {
            b.rule(first, '#', c2, rej, S, S);
        } else {
            b.rule(first, '#', c2, compare, R, R);
        }
        b.rule(first, R_END, c2, rej, S, S);
        for c1 in ['a', 'b'] {
            if c1 == c2 {
                b.rule(compare, c1, c2, compare, R, R);
            } else {
                b.rule(compare, c1, c2, rej, S, S);
            }
        }
        b.rule(compare, '#', c2, rej, S, S);
        b.rule(compare, R_END, c2, if c2 == '#' { acc } else { rej }, S, S);
    }
    b.build(first, acc, rej, Some(1), Some(round_trip_companion(&sigma))).expect("TWIN machine is well formed")
}

/// A machine whose first head turns back when the second head is off ▷, so
/// fabricated readings change its trajectory. It is not supersafe.
pub fn non_supersafe_example() -> TwoHeadDfaSpec {
    let sigma = ['a', 'b'];
    let mut b = TwoHeadBuilder::new(&sigma);
    let s = b.state("s");
    let acc = b.state("acc");
    let rej = b.state("rej");
    for c2 in b.symbols() {
        b.rule(s, L_END, c2, s, R, S);
        for c1 in sigma {
            b.rule(s, c1, c2, s, if c2 == L_END { R } else { L }, S);
        }
        b.rule(s, R_END, c2, acc, S, S);
    }
    b.build(s, acc, rej, Some(1), Some(right_sweep_companion(&sigma))).expect("example is well formed")
}

/// The (M, M′) pair for a language that has a shipped machine.
pub fn machine_pair(lang: LanguageId) -> Result<(TwoHeadDfaSpec, TwoHeadDfaSpec)> {
    let m = match lang {
        LanguageId::Eq => eq_machine(),
        LanguageId::EqAb => eq_ab_machine(),
        LanguageId::Pal => pal_machine(),
        LanguageId::Twin => twin_machine(),
        other => return Err(Error::Configuration(format!("no shipped 2DFA(2) for {other}"))),
    };
    let c = m.complement();
    Ok((m, c))
}
