//! Membership oracles, padding, and DS-FK witness checking.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Num;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::tape::{canonical_str, STAR};

pub const DEFAULT_MAX_CORE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LanguageId {
    #[serde(rename = "EQ")]
    Eq,
    #[serde(rename = "EQ_ab")]
    EqAb,
    #[serde(rename = "PAL")]
    Pal,
    #[serde(rename = "TWIN")]
    Twin,
    #[serde(rename = "MULT")]
    Mult,
    #[serde(rename = "SQUARE")]
    Square,
    #[serde(rename = "SUBSQUARE")]
    Subsquare,
    #[serde(rename = "POWER")]
    Power,
    #[serde(rename = "POWER_EQ")]
    PowerEq,
}

impl LanguageId {
    pub const ALL: [LanguageId; 9] = [
        LanguageId::Eq,
        LanguageId::EqAb,
        LanguageId::Pal,
        LanguageId::Twin,
        LanguageId::Mult,
        LanguageId::Square,
        LanguageId::Subsquare,
        LanguageId::Power,
        LanguageId::PowerEq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LanguageId::Eq => "EQ",
            LanguageId::EqAb => "EQ_ab",
            LanguageId::Pal => "PAL",
            LanguageId::Twin => "TWIN",
            LanguageId::Mult => "MULT",
            LanguageId::Square => "SQUARE",
            LanguageId::Subsquare => "SUBSQUARE",
            LanguageId::Power => "POWER",
            LanguageId::PowerEq => "POWER_EQ",
        }
    }

    pub fn alphabet(self) -> &'static [char] {
        match self {
            LanguageId::Twin => &['a', 'b', '#'],
            LanguageId::Mult => &['0', '1', '#'],
            _ => &['a', 'b'],
        }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LanguageId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LanguageId::ALL
            .into_iter()
            .find(|l| l.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown language {s:?}")))
    }
}

fn check_alphabet(lang: LanguageId, w: &[char]) -> Result<()> {
    match w.iter().find(|c| !lang.alphabet().contains(c)) {
        Some(&c) => Err(Error::Alphabet { symbol: c, context: lang.name().to_string() }),
        None => Ok(()),
    }
}

/// Splits `a^i b^j`; `None` if `w` is not of that shape.
fn ab_blocks(w: &[char]) -> Option<(usize, usize)> {
    let i = w.iter().take_while(|&&c| c == 'a').count();
    let rest = &w[i..];
    if rest.iter().all(|&c| c == 'b') {
        Some((i, rest.len()))
    } else {
        None
    }
}

fn parse_binary(s: &[char]) -> Option<BigUint> {
    if s.is_empty() {
        return None;
    }
    let text: String = s.iter().collect();
    BigUint::from_str_radix(&text, 2).ok()
}

pub fn membership(lang: LanguageId, w: &str) -> Result<bool> {
    let w: Vec<char> = canonical_str(w).chars().collect();
    check_alphabet(lang, &w)?;
    let count = |c: char| w.iter().filter(|&&x| x == c).count();
    Ok(match lang {
        LanguageId::Eq => count('a') == count('b'),
        LanguageId::EqAb => matches!(ab_blocks(&w), Some((i, j)) if i == j),
        LanguageId::Pal => w.iter().eq(w.iter().rev()),
        LanguageId::Twin => {
            let parts: Vec<&[char]> = w.split(|&c| c == '#').collect();
            parts.len() == 2 && parts[0] == parts[1]
        }
        LanguageId::Mult => {
            let parts: Vec<&[char]> = w.split(|&c| c == '#').collect();
            if parts.len() != 3 {
                false
            } else {
                match (parse_binary(parts[0]), parse_binary(parts[1]), parse_binary(parts[2])) {
                    (Some(x), Some(y), Some(z)) => x * y == z,
                    _ => false,
                }
            }
        }
        LanguageId::Square => matches!(ab_blocks(&w), Some((i, j)) if i > 0 && j == i * i),
        LanguageId::Subsquare => matches!(ab_blocks(&w), Some((i, j)) if j < i * i),
        LanguageId::Power => match ab_blocks(&w) {
            Some((i, j)) if i > 0 => i < 64 && j as u128 == 1u128 << i,
            _ => false,
        },
        LanguageId::PowerEq => {
            let blocks: Vec<&[char]> = w.split(|&c| c == 'b').collect();
            blocks.len() >= 2
                && blocks[0] == ['a']
                && blocks[1..].iter().enumerate().all(|(k, blk)| {
                    let want = 8u128.checked_pow(k as u32).map(|p| 7 * p);
                    want == Some(blk.len() as u128) && blk.iter().all(|&c| c == 'a')
                })
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaddedString {
    pub core: String,
    pub padding_length: usize,
}

impl PaddedString {
    pub fn render(&self) -> String {
        let mut s = self.core.clone();
        s.extend(std::iter::repeat_n(STAR, self.padding_length));
        s
    }
    pub fn total_len(&self) -> usize {
        self.core.chars().count() + self.padding_length
    }
}

pub fn pad(x: &str) -> Result<PaddedString> {
    pad_with_max(x, DEFAULT_MAX_CORE)
}

pub fn pad_with_max(x: &str, max_core: usize) -> Result<PaddedString> {
    let x = canonical_str(x);
    if x.contains(STAR) {
        return Err(Error::Precondition("the core must not contain ⋆".into()));
    }
    let len = x.chars().count();
    if len > max_core || len >= 63 {
        return Err(Error::ResourceBound { len, max: max_core });
    }
    Ok(PaddedString { core: x, padding_length: (1usize << len) - len })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromiseCheck {
    pub core: String,
    pub satisfied: bool,
}

pub fn check_promise(s: &str, star: char) -> PromiseCheck {
    let s = canonical_str(s);
    let chars: Vec<char> = s.chars().collect();
    let cut = chars.iter().position(|&c| c == star).unwrap_or(chars.len());
    let core: String = chars[..cut].iter().collect();
    let suffix_ok = chars[cut..].iter().all(|&c| c == star);
    let satisfied = suffix_ok && cut < 63 && chars.len() == 1usize << cut;
    PromiseCheck { core, satisfied }
}

/// One side of a padded separation problem: the padded language or the padded
/// complement (within the language's alphabet).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LangSide {
    pub lang: LanguageId,
    pub complement: bool,
}

impl LangSide {
    pub fn contains_padded(&self, s: &str) -> bool {
        let pc = check_promise(s, STAR);
        if !pc.satisfied {
            return false;
        }
        match membership(self.lang, &pc.core) {
            Ok(m) => m != self.complement,
            Err(_) => false,
        }
    }
}

impl fmt::Display for LangSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complement {
            write!(f, "co-{}", self.lang)
        } else {
            write!(f, "{}", self.lang)
        }
    }
}

impl FromStr for LangSide {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("co-") {
            Some(rest) => Ok(LangSide { lang: rest.parse()?, complement: true }),
            None => Ok(LangSide { lang: s.parse()?, complement: false }),
        }
    }
}

impl Serialize for LangSide {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LangSide {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessContext {
    pub w: String,
    pub w2: String,
    pub u: String,
    pub v: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSample {
    pub m: usize,
    pub words: Vec<String>,
    pub contexts: Vec<WitnessContext>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsfkWitness {
    pub pair: (LangSide, LangSide),
    pub samples: Vec<WitnessSample>,
    pub growth_constant: Rational,
}

impl DsfkWitness {
    pub fn sampled_ms(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.m).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub m: usize,
    pub words: usize,
    pub pairs_checked: usize,
    pub length_bound: bool,
    pub growth: bool,
    pub context_length: bool,
    pub separation: bool,
    pub failures: Vec<String>,
}

impl SampleReport {
    pub fn passed(&self) -> bool {
        self.length_bound && self.growth && self.context_length && self.separation
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub pair: (LangSide, LangSide),
    pub sampled_m: Vec<usize>,
    pub samples: Vec<SampleReport>,
}

impl WitnessReport {
    pub fn passed(&self) -> bool {
        !self.samples.is_empty() && self.samples.iter().all(SampleReport::passed)
    }
}

/// Checks the DS-FK conditions with g(m) = m and h(m) = 2^m at every sampled m.
pub fn check_dsfk_witness(pair: (LangSide, LangSide), witness: &DsfkWitness) -> Result<WitnessReport> {
    let (a, b) = pair;
    let mut samples = Vec::new();
    for s in &witness.samples {
        let m = s.m;
        let h = if m < 63 { 1usize << m } else { usize::MAX };
        let mut rep = SampleReport {
            m,
            words: s.words.len(),
            pairs_checked: 0,
            length_bound: true,
            growth: true,
            context_length: true,
            separation: true,
            failures: Vec::new(),
        };
        for w in &s.words {
            if w.chars().count() > m {
                rep.length_bound = false;
                rep.failures.push(format!("|{w}| > {m}"));
            }
        }
        let distinct: BTreeSet<&String> = s.words.iter().collect();
        let size = Rational::from_int(distinct.len() as i64);
        if size < witness.growth_constant.pow(m as i32) {
            rep.growth = false;
            rep.failures.push(format!("|W_{m}| = {} < c^{m}", distinct.len()));
        }
        let words: Vec<&String> = distinct.into_iter().collect();
        for (x, w) in words.iter().enumerate() {
            for w2 in &words[x + 1..] {
                let ctx = s
                    .contexts
                    .iter()
                    .find(|c| (&c.w == *w && &c.w2 == *w2) || (&c.w == *w2 && &c.w2 == *w))
                    .ok_or_else(|| Error::IncompleteWitness(format!("m={m}: no context for ({w}, {w2})")))?;
                rep.pairs_checked += 1;
                let s1 = format!("{}{}{}", ctx.u, ctx.w, ctx.v);
                let s2 = format!("{}{}{}", ctx.u, ctx.w2, ctx.v);
                if s1.chars().count() > h || s2.chars().count() > h {
                    rep.context_length = false;
                    rep.failures.push(format!("context for ({w}, {w2}) longer than 2^{m}"));
                }
                let sep = (a.contains_padded(&s1) && b.contains_padded(&s2))
                    || (b.contains_padded(&s1) && a.contains_padded(&s2));
                if !sep {
                    rep.separation = false;
                    rep.failures.push(format!("({w}, {w2}) not separated"));
                }
            }
        }
        samples.push(rep);
    }
    Ok(WitnessReport { pair, sampled_m: witness.sampled_ms(), samples })
}

fn words_over(alphabet: &[char], len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..len {
        out = out
            .iter()
            .flat_map(|p| alphabet.iter().map(move |c| format!("{p}{c}")))
            .collect();
    }
    out
}

fn stars(n: usize) -> String {
    std::iter::repeat_n(STAR, n).collect()
}

fn build_witness(
    lang: LanguageId,
    ms: &[usize],
    c: Rational,
    words: impl Fn(usize) -> Vec<String>,
    v_for: impl Fn(usize, &str) -> String,
) -> DsfkWitness {
    let samples = ms
        .iter()
        .map(|&m| {
            let ws = words(m);
            let mut contexts = Vec::new();
            for (i, w) in ws.iter().enumerate() {
                for w2 in &ws[i + 1..] {
                    contexts.push(WitnessContext {
                        w: w.clone(),
                        w2: w2.clone(),
                        u: String::new(),
                        v: v_for(m, w),
                    });
                }
            }
            WitnessSample { m, words: ws, contexts }
        })
        .collect();
    DsfkWitness {
        pair: (LangSide { lang, complement: false }, LangSide { lang, complement: true }),
        samples,
        growth_constant: c,
    }
}

/// Even m; W_m = {a,b}^{m/2}; u = λ; v = w^R ⋆^{2^m − m}.
pub fn pal_witness(ms: &[usize]) -> DsfkWitness {
    build_witness(
        LanguageId::Pal,
        ms,
        Rational::new(7, 5),
        |m| words_over(&['a', 'b'], m / 2),
        |m, w| format!("{}{}", w.chars().rev().collect::<String>(), stars((1 << m) - m)),
    )
}

/// Odd m > 1; W_m = {a,b}^{(m−1)/2}; u = λ; v = #w ⋆^{2^m − m}.
pub fn twin_witness(ms: &[usize]) -> DsfkWitness {
    build_witness(
        LanguageId::Twin,
        ms,
        Rational::new(5, 4),
        |m| words_over(&['a', 'b'], (m - 1) / 2),
        |m, w| format!("#{w}{}", stars((1 << m) - m)),
    )
}

/// Odd m > 5; W_m = 1{0,1}^{(m−5)/2}; u = λ; v = #1#w ⋆^{2^m − m}.
pub fn mult_witness(ms: &[usize]) -> DsfkWitness {
    build_witness(
        LanguageId::Mult,
        ms,
        Rational::new(11, 10),
        |m| words_over(&['0', '1'], (m - 5) / 2).into_iter().map(|s| format!("1{s}")).collect(),
        |m, w| format!("#1#{w}{}", stars((1 << m) - m)),
    )
}

/// All strings over `alphabet` of length at most `max_len`, shortest first.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    (0..=max_len).flat_map(|l| words_over(alphabet, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_examples() {
        assert!(membership(LanguageId::Eq, "abba").unwrap());
        assert!(membership(LanguageId::Square, "aabbbb").unwrap());
        assert!(membership(LanguageId::Subsquare, "aabbb").unwrap());
        assert!(!membership(LanguageId::Pal, "ab").unwrap());
        assert!(membership(LanguageId::Twin, "ab#ab").unwrap());
        assert!(!membership(LanguageId::Twin, "ab#ab#").unwrap());
        assert!(membership(LanguageId::Mult, "11#10#110").unwrap());
        assert!(!membership(LanguageId::Mult, "11#10#111").unwrap());
        assert!(membership(LanguageId::Power, "abb").unwrap());
        assert!(membership(LanguageId::Power, "aabbbb").unwrap());
        assert!(!membership(LanguageId::Power, "aabbb").unwrap());
        assert!(membership(LanguageId::PowerEq, "abaaaaaaa").unwrap());
        assert!(!membership(LanguageId::PowerEq, "abaaaaaa").unwrap());
        assert!(membership(LanguageId::EqAb, "").unwrap());
        assert!(!membership(LanguageId::EqAb, "ba").unwrap());
        assert!(!membership(LanguageId::Square, "").unwrap());
    }

    #[test]
    fn alphabet_errors() {
        assert!(matches!(membership(LanguageId::Eq, "abc"), Err(Error::Alphabet { symbol: 'c', .. })));
        assert!(membership(LanguageId::Pal, "a#a").is_err());
    }

    #[test]
    fn pad_examples() {
        assert_eq!(pad("ab").unwrap().padding_length, 2);
        assert_eq!(pad("").unwrap().padding_length, 1);
        assert_eq!(pad("aba").unwrap().padding_length, 5);
        assert!(matches!(pad(&"a".repeat(21)), Err(Error::ResourceBound { len: 21, max: 20 })));
    }

    #[test]
    fn promise_examples() {
        assert_eq!(check_promise("ab⋆⋆", STAR), PromiseCheck { core: "ab".into(), satisfied: true });
        assert_eq!(check_promise("ab⋆", STAR), PromiseCheck { core: "ab".into(), satisfied: false });
        assert_eq!(check_promise("⋆", STAR), PromiseCheck { core: "".into(), satisfied: true });
        assert!(!check_promise("a⋆b⋆", STAR).satisfied);
        assert!(check_promise("ab**", STAR).satisfied);
    }

    #[test]
    fn pal_witness_m4() {
        let w = pal_witness(&[4]);
        assert_eq!(w.samples[0].words, vec!["aa", "ab", "ba", "bb"]);
        assert_eq!(w.samples[0].contexts[0].v, format!("aa{}", stars(12)));
        let r = check_dsfk_witness(w.pair, &w).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn twin_witness_m3() {
        let w = twin_witness(&[3]);
        assert_eq!(w.samples[0].words, vec!["a", "b"]);
        let r = check_dsfk_witness(w.pair, &w).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn singleton_fails_growth() {
        let w = DsfkWitness {
            pair: pal_witness(&[2]).pair,
            samples: vec![WitnessSample { m: 2, words: vec!["a".into()], contexts: vec![] }],
            growth_constant: Rational::from_int(2),
        };
        let r = check_dsfk_witness(w.pair, &w).unwrap();
        assert!(!r.samples[0].growth);
        assert!(!r.passed());
    }

    #[test]
    fn missing_context_is_an_error() {
        let mut w = pal_witness(&[4]);
        w.samples[0].contexts.pop();
        assert!(matches!(check_dsfk_witness(w.pair, &w), Err(Error::IncompleteWitness(_))));
    }

    #[test]
    fn witness_json_round_trip() {
        let w = mult_witness(&[7]);
        let text = serde_json::to_string(&w).unwrap();
        assert!(text.contains("\"co-MULT\"") && text.contains("\"11/10\""));
        let back: DsfkWitness = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
    }
}
