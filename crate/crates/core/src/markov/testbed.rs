//! Small PTMs over {a, b} with known acceptance behaviour, used to check
//! the chain construction against direct simulation.

use crate::machines::{Branch, PtmBuilder, PtmSpec};
use crate::rational::Rational;
use crate::tape::{Move, BLANK, LEFT_END, RIGHT_END};

const SIGMA: [char; 2] = ['a', 'b'];

fn half() -> Rational {
    Rational::new(1, 2)
}

/// Accepts at once.
pub fn immediate_accept() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &[]);
    let (s, acc, rej) = (b.state("start"), b.state("acc"), b.state("rej"));
    b.det(s, LEFT_END, acc, Move::Stay);
    b.build(s, acc, rej).expect("immediate_accept")
}

/// Steps onto the first cell and flips a fair coin.
pub fn coin() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &[]);
    let (s, flip, acc, rej) = (b.state("start"), b.state("flip"), b.state("acc"), b.state("rej"));
    b.det(s, LEFT_END, flip, Move::Right);
    for c in ['a', 'b', RIGHT_END] {
        b.random(flip, c, &[(half(), acc, Move::Stay), (half(), rej, Move::Stay)]);
    }
    b.build(s, acc, rej).expect("coin")
}

/// Symmetric walk from cell 1: accepts at ◁, rejects at ▷. Accepts with
/// probability 1/(n+1).
pub fn gambler() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &[]);
    let (s, walk, acc, rej) = (b.state("start"), b.state("walk"), b.state("acc"), b.state("rej"));
    b.det(s, LEFT_END, walk, Move::Right);
    for c in SIGMA {
        b.random(walk, c, &[(half(), walk, Move::Left), (half(), walk, Move::Right)]);
    }
    b.det(walk, LEFT_END, rej, Move::Stay);
    b.det(walk, RIGHT_END, acc, Move::Stay);
    b.build(s, acc, rej).expect("gambler")
}

/// Toggles work cell 0 with probability 2/3 on every `a`, touches cell 1 at
/// ◁, then accepts iff cell 0 holds `x`. Accepts with probability
/// (1 − (−1/3)^k)/2 for k copies of `a`.
pub fn tape_parity() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &['x']);
    let (s, scan, peek, decide, acc, rej) =
        (b.state("start"), b.state("scan"), b.state("peek"), b.state("decide"), b.state("acc"), b.state("rej"));
    let br = |prob: Rational, to, write, di, dw| Branch { prob, to, write, di, dw };
    let (two, one) = (Rational::new(2, 3), Rational::new(1, 3));
    b.det(s, LEFT_END, scan, Move::Right);
    b.rule(scan, 'a', BLANK, vec![br(two.clone(), scan, 'x', Move::Right, Move::Stay), br(one.clone(), scan, BLANK, Move::Right, Move::Stay)]);
    b.rule(scan, 'a', 'x', vec![br(two, scan, BLANK, Move::Right, Move::Stay), br(one, scan, 'x', Move::Right, Move::Stay)]);
    for k in [BLANK, 'x'] {
        b.det_w(scan, 'b', k, scan, k, Move::Right, Move::Stay);
        b.det_w(scan, RIGHT_END, k, peek, k, Move::Stay, Move::Right);
    }
    b.det_w(peek, RIGHT_END, BLANK, decide, 'x', Move::Stay, Move::Left);
    b.det_w(decide, RIGHT_END, 'x', acc, 'x', Move::Stay, Move::Stay);
    b.det_w(decide, RIGHT_END, BLANK, rej, BLANK, Move::Stay, Move::Stay);
    b.build(s, acc, rej).expect("tape_parity")
}

/// At ▷ accepts with probability ½, otherwise sweeps between the
/// endmarkers forever, crossing every boundary.
pub fn shuttle() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &[]);
    let (s, right, left, acc, rej) = (b.state("start"), b.state("sh-r"), b.state("sh-l"), b.state("acc"), b.state("rej"));
    b.random(s, LEFT_END, &[(half(), acc, Move::Stay), (half(), right, Move::Right)]);
    for c in SIGMA {
        b.det(right, c, right, Move::Right);
        b.det(left, c, left, Move::Left);
    }
    b.det(right, RIGHT_END, left, Move::Left);
    b.det(left, LEFT_END, right, Move::Right);
    b.build(s, acc, rej).expect("shuttle")
}

/// On cell 1 either freezes forever or runs to ◁ and accepts, each with
/// probability ½.
pub fn region_looper() -> PtmSpec {
    let mut b = PtmBuilder::new(&SIGMA, &[]);
    let (s, fork, spin, run, acc, rej) =
        (b.state("start"), b.state("fork"), b.state("spin"), b.state("run"), b.state("acc"), b.state("rej"));
    b.det(s, LEFT_END, fork, Move::Right);
    for c in SIGMA {
        b.random(fork, c, &[(half(), spin, Move::Stay), (half(), run, Move::Right)]);
        b.det(run, c, run, Move::Right);
    }
    b.random(fork, RIGHT_END, &[(half(), spin, Move::Stay), (half(), acc, Move::Stay)]);
    b.det(run, RIGHT_END, acc, Move::Stay);
    for c in [LEFT_END, 'a', 'b', RIGHT_END] {
        b.det(spin, c, spin, Move::Stay);
    }
    b.build(s, acc, rej).expect("region_looper")
}

/// Work cells each machine needs.
pub fn work_cells(name: &str) -> usize {
    if name == "tape-parity" {
        2
    } else {
        1
    }
}

pub fn all() -> Vec<(&'static str, PtmSpec)> {
    vec![
        ("immediate-accept", immediate_accept()),
        ("coin", coin()),
        ("gambler", gambler()),
        ("tape-parity", tape_parity()),
        ("shuttle", shuttle()),
        ("region-looper", region_looper()),
    ]
}

/// Closed-form acceptance probability of a test machine on `w`.
pub fn exact_acceptance(name: &str, w: &str) -> Option<Rational> {
    let n = w.chars().count() as i64;
    let k = w.chars().filter(|&c| c == 'a').count() as i32;
    Some(match name {
        "immediate-accept" => Rational::one(),
        "coin" | "shuttle" | "region-looper" => half(),
        "gambler" => Rational::new(1, n + 1),
        "tape-parity" => (Rational::one() - Rational::new(-1, 3).pow(k)) * half(),
        _ => return None,
    })
}
