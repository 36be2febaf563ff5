//! Promise problems: membership oracles, seeded instance generators, the
//! PAL-to-TWINPAL transform, dissimilarity witnesses and the unary cycle
//! check for EVENODD.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::machines::{compile, CompiledMachine, MachineError, MachineSpec, ModelClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    PromisePal,
    PromiseTwinpal,
    ExpPromiseTwinpal,
    PromiseEq,
    /// `EVENODD^k`.
    EvenOdd(u32),
}

impl Problem {
    /// Name without the EVENODD parameter.
    pub fn family(self) -> &'static str {
        match self {
            Problem::PromisePal => "PromisePAL",
            Problem::PromiseTwinpal => "PromiseTWINPAL",
            Problem::ExpPromiseTwinpal => "EXPPromiseTWINPAL",
            Problem::PromiseEq => "PromiseEQ",
            Problem::EvenOdd(_) => "EVENODD",
        }
    }

    pub fn alphabet(self) -> &'static [char] {
        match self {
            Problem::PromisePal | Problem::PromiseTwinpal | Problem::ExpPromiseTwinpal => &['a', 'b', 'c'],
            Problem::PromiseEq => &['a', 'b'],
            Problem::EvenOdd(_) => &['a'],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::EvenOdd(k) => write!(f, "EVENODD^{k}"),
            p => f.write_str(p.family()),
        }
    }
}

impl Serialize for Problem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Accepts the family names case-insensitively; EVENODD as `EVENODD^k`
/// or `EVENODDk`.
impl FromStr for Problem {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        Ok(match up.as_str() {
            "PROMISEPAL" | "PAL" => Problem::PromisePal,
            "PROMISETWINPAL" | "TWINPAL" => Problem::PromiseTwinpal,
            "EXPPROMISETWINPAL" | "EXPTWINPAL" => Problem::ExpPromiseTwinpal,
            "PROMISEEQ" | "EQ" => Problem::PromiseEq,
            _ => {
                let k = up
                    .strip_prefix("EVENODD")
                    .map(|r| r.trim_start_matches('^'))
                    .and_then(|r| r.parse().ok())
                    .ok_or_else(|| ProblemError::UnknownProblem(s.to_string()))?;
                Problem::EvenOdd(k)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Yes,
    No,
    OutsidePromise,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Yes => "Yes",
            Status::No => "No",
            Status::OutsidePromise => "OutsidePromise",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unary cycle check needs a unary rtDFA")]
    NotUnaryDfa,
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// Instance parameters; absent fields do not apply to the problem.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_len: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PromiseInstance {
    pub problem: Problem,
    pub string: String,
    pub status: Status,
    pub params: Params,
}

// ---------------------------------------------------------------------------
// Membership

pub fn is_palindrome(s: &str) -> bool {
    s.bytes().eq(s.bytes().rev())
}

fn over(w: &str, alphabet: &[char]) -> bool {
    w.chars().all(|c| alphabet.contains(&c))
}

/// Yes if the first half is a palindrome and the second is not, No for
/// the mirror case.
fn pal_pair(u: &str, v: &str) -> Status {
    if u.len() != v.len() {
        return Status::OutsidePromise;
    }
    match (is_palindrome(u), is_palindrome(v)) {
        (true, false) => Status::Yes,
        (false, true) => Status::No,
        _ => Status::OutsidePromise,
    }
}

/// `25^|u|` as a big integer.
pub fn block_threshold(u_len: usize) -> BigInt {
    BigInt::from(25).pow(u_len as u32)
}

/// Decomposes `(u c u c v c v c)^t` into `(u, v, t)`.
fn exp_blocks(w: &str) -> Option<(&str, &str, usize)> {
    let body = w.strip_suffix('c')?;
    let parts: Vec<&str> = body.split('c').collect();
    if !parts.len().is_multiple_of(4) {
        return None;
    }
    let (u, v) = (parts[0], parts[2]);
    let ok = parts.chunks(4).all(|b| b[0] == u && b[1] == u && b[2] == v && b[3] == v);
    ok.then_some((u, v, parts.len() / 4))
}

pub fn membership(problem: Problem, w: &str) -> Status {
    if !over(w, problem.alphabet()) {
        return Status::OutsidePromise;
    }
    match problem {
        Problem::PromisePal => match w.split('c').collect::<Vec<_>>()[..] {
            [u, v] => pal_pair(u, v),
            _ => Status::OutsidePromise,
        },
        Problem::PromiseTwinpal => match w.split('c').collect::<Vec<_>>()[..] {
            [u1, u2, v1, v2] if u1 == u2 && v1 == v2 && !u1.is_empty() => pal_pair(u1, v1),
            _ => Status::OutsidePromise,
        },
        Problem::ExpPromiseTwinpal => match exp_blocks(w) {
            Some((u, v, t)) if !u.is_empty() && BigInt::from(t) >= block_threshold(u.len()) => pal_pair(u, v),
            _ => Status::OutsidePromise,
        },
        Problem::PromiseEq => match w.split('b').map(str::len).collect::<Vec<_>>()[..] {
            [p, q, r] if p == q && p != r => Status::Yes,
            [p, q, r] if p == r && p != q => Status::No,
            _ => Status::OutsidePromise,
        },
        Problem::EvenOdd(k) => evenodd_status(k, &BigInt::from(w.len())),
    }
}

/// Status of `a^length` for `EVENODD^k`.
pub fn evenodd_status(k: u32, length: &BigInt) -> Status {
    let block = BigInt::one() << k;
    let (i, r) = length.div_rem(&block);
    if !r.is_zero() {
        Status::OutsidePromise
    } else if i.is_even() {
        Status::Yes
    } else {
        Status::No
    }
}

// ---------------------------------------------------------------------------
// Generators

/// A generation request. `size` is `|u| = |v|` for the PAL family, the
/// largest block length for PromiseEQ, and the largest `i` for EVENODD.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenRequest {
    pub problem: Problem,
    pub size: usize,
    pub count: usize,
    pub seed: u64,
    /// Block count for EXPPromiseTWINPAL; defaults to `25^size`.
    pub t: Option<u64>,
    /// Fixed status, or `None` to alternate Yes and No.
    pub want: Option<Status>,
}

impl GenRequest {
    pub fn new(problem: Problem, size: usize, count: usize, seed: u64) -> Self {
        GenRequest { problem, size, count, seed, t: None, want: None }
    }
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> String {
    (0..len).map(|_| if rng.random_bool(0.5) { 'a' } else { 'b' }).collect()
}

fn random_palindrome(rng: &mut ChaCha8Rng, len: usize) -> String {
    let half = random_word(rng, len.div_ceil(2));
    let tail: String = half.chars().rev().skip(len % 2).collect();
    half + &tail
}

fn random_non_palindrome(rng: &mut ChaCha8Rng, len: usize) -> String {
    debug_assert!(len >= 2);
    let mut w: Vec<u8> = random_word(rng, len).into_bytes();
    if w == w.iter().rev().copied().collect::<Vec<_>>() {
        w[0] = if w[0] == b'a' { b'b' } else { b'a' };
    }
    String::from_utf8(w).expect("ascii")
}

/// `(u, v)` of length `n` with the wanted status; OutsidePromise pairs
/// have both halves palindromes or both not.
fn pal_halves(rng: &mut ChaCha8Rng, n: usize, want: Status) -> (String, String) {
    match want {
        Status::Yes => (random_palindrome(rng, n), random_non_palindrome(rng, n)),
        Status::No => (random_non_palindrome(rng, n), random_palindrome(rng, n)),
        Status::OutsidePromise => {
            if n >= 2 && rng.random_bool(0.5) {
                (random_non_palindrome(rng, n), random_non_palindrome(rng, n))
            } else {
                (random_palindrome(rng, n), random_palindrome(rng, n))
            }
        }
    }
}

pub fn exp_twinpal_string(u: &str, v: &str, t: usize) -> String {
    format!("{u}c{u}c{v}c{v}c").repeat(t)
}

/// Largest `|u|` the EXPPromiseTWINPAL generator will emit.
pub const EXP_TWINPAL_MAX_U: usize = 2;

pub fn generate(req: &GenRequest) -> Result<Vec<PromiseInstance>, ProblemError> {
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let infeasible = |m: String| Err(ProblemError::Infeasible(m));
    let decided = req.want != Some(Status::OutsidePromise);
    let n = req.size;
    match req.problem {
        Problem::PromisePal | Problem::PromiseTwinpal | Problem::ExpPromiseTwinpal if decided && n < 2 => {
            return infeasible(format!("{} has no Yes or No instances with |u| = {n}: every string shorter than 2 is a palindrome", req.problem));
        }
        Problem::PromiseTwinpal | Problem::ExpPromiseTwinpal if n == 0 => return infeasible("|u| must be positive".into()),
        Problem::ExpPromiseTwinpal if n > EXP_TWINPAL_MAX_U => {
            return infeasible(format!("generator caps |u| at {EXP_TWINPAL_MAX_U}"));
        }
        Problem::ExpPromiseTwinpal => {
            if let Some(t) = req.t {
                if BigInt::from(t) < block_threshold(n) {
                    return infeasible(format!("t = {t} is below 25^{n}"));
                }
            }
        }
        Problem::PromiseEq if n == 0 && decided => return infeasible("PromiseEQ needs m != n, so size >= 1".into()),
        Problem::EvenOdd(_) if n == 0 && req.want == Some(Status::No) => {
            return infeasible("no odd i in 0..=0".into());
        }
        Problem::EvenOdd(k) if k > 40 => return infeasible("EVENODD strings are materialised; k <= 40".into()),
        _ => {}
    }
    let mut out = Vec::with_capacity(req.count);
    for idx in 0..req.count {
        let want = req.want.unwrap_or(if idx % 2 == 0 { Status::Yes } else { Status::No });
        let mut params = Params::default();
        let string = match req.problem {
            Problem::PromisePal => {
                let (u, v) = pal_halves(&mut rng, n, want);
                params.u_len = Some(n);
                format!("{u}c{v}")
            }
            Problem::PromiseTwinpal => {
                let (u, v) = pal_halves(&mut rng, n, want);
                params.u_len = Some(n);
                format!("{u}c{u}c{v}c{v}")
            }
            Problem::ExpPromiseTwinpal => {
                let t = req.t.unwrap_or_else(|| block_threshold(n).to_u64().expect("capped size"));
                let (u, v) = pal_halves(&mut rng, n, want);
                params.u_len = Some(n);
                params.t = Some(t);
                exp_twinpal_string(&u, &v, t as usize)
            }
            Problem::PromiseEq => {
                let m = rng.random_range(0..=n as u64);
                let d = match want {
                    Status::OutsidePromise => m,
                    _ => loop {
                        let d = rng.random_range(0..=n as u64);
                        if d != m {
                            break d;
                        }
                    },
                };
                params.m = Some(m);
                params.n = Some(d);
                let (a, b) = ("a".repeat(m as usize), "a".repeat(d as usize));
                match want {
                    Status::No => format!("{a}b{b}b{a}"),
                    _ => format!("{a}b{a}b{b}"),
                }
            }
            Problem::EvenOdd(k) => {
                params.k = Some(k);
                let block = 1usize << k;
                match want {
                    Status::OutsidePromise => {
                        if block == 1 {
                            return infeasible("every length is a multiple of 2^0".into());
                        }
                        let len = loop {
                            let l = rng.random_range(1..=(n.max(1) * block) + block);
                            if l % block != 0 {
                                break l;
                            }
                        };
                        "a".repeat(len)
                    }
                    _ => {
                        let parity = u64::from(want == Status::No);
                        let top = n as u64;
                        let mut i = rng.random_range(0..=top);
                        if i % 2 != parity {
                            i = if i < top { i + 1 } else { i - 1 };
                        }
                        params.i = Some(i);
                        "a".repeat(i as usize * block)
                    }
                }
            }
        };
        let status = membership(req.problem, &string);
        debug_assert_eq!(status, want, "generator produced the wrong status");
        out.push(PromiseInstance { problem: req.problem, string, status, params });
    }
    Ok(out)
}

/// `a^(i 2^k)` for each `i` in `is`.
pub fn evenodd_instances(k: u32, is: impl IntoIterator<Item = u64>) -> Vec<PromiseInstance> {
    is.into_iter()
        .map(|i| {
            let string = "a".repeat((i as usize) << k);
            PromiseInstance {
                problem: Problem::EvenOdd(k),
                status: membership(Problem::EvenOdd(k), &string),
                string,
                params: Params { k: Some(k), i: Some(i), ..Params::default() },
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// TWINPAL transform

/// `u c v` to `u c u c v c v`.
pub fn twin_expand(w: &str) -> Result<String, ProblemError> {
    if !over(w, &['a', 'b', 'c']) {
        return Err(ProblemError::Malformed(format!("`{w}` is not over {{a, b, c}}")));
    }
    match w.split('c').collect::<Vec<_>>()[..] {
        [u, v] => Ok(format!("{u}c{u}c{v}c{v}")),
        _ => Err(ProblemError::Malformed(format!("`{w}` needs exactly one c"))),
    }
}

// ---------------------------------------------------------------------------
// Dissimilarity witnesses

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DissimilaritySet {
    pub problem: Problem,
    pub m: usize,
    pub strings: Vec<String>,
    /// `(i, j) -> (y, z)` for `i < j`: `y s_i z` and `y s_j z` land on
    /// opposite promise sides.
    #[serde(serialize_with = "pairs_as_list")]
    pub separators: BTreeMap<(usize, usize), (String, String)>,
    /// Longest `y x z` over all pairs.
    pub length: usize,
}

fn pairs_as_list<S: Serializer>(m: &BTreeMap<(usize, usize), (String, String)>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|((i, j), (y, z))| (i, j, y, z)))
}

/// All words of length `m` over `{a, b}` in lexicographic order.
pub fn words(m: usize) -> Vec<String> {
    (0..1usize << m)
        .map(|bits| (0..m).map(|p| if bits >> (m - 1 - p) & 1 == 0 { 'a' } else { 'b' }).collect())
        .collect()
}

fn reversed(s: &str) -> String {
    s.chars().rev().collect()
}

/// PromisePAL: `u_i c u_i` over all `u_i` of length `m`, separated by
/// `y = u_i^r`, `z = u_j^r`. PromiseEQ: `a^1 .. a^m`, separated by
/// `z = b a^i b a^j`.
pub fn build_dissimilarity_witness(problem: Problem, m: usize) -> Result<DissimilaritySet, ProblemError> {
    if m == 0 {
        return Err(ProblemError::Infeasible("witness sets need m >= 1".into()));
    }
    type Separator = Box<dyn Fn(usize, usize) -> (String, String)>;
    let (strings, sep): (Vec<String>, Separator) = match problem {
        Problem::PromisePal => {
            let us = words(m);
            let xs = us.iter().map(|u| format!("{u}c{u}")).collect();
            (xs, Box::new(move |i, j| (reversed(&us[i]), reversed(&us[j]))))
        }
        Problem::PromiseEq => {
            let xs = (1..=m).map(|i| "a".repeat(i)).collect();
            (xs, Box::new(|i, j| (String::new(), format!("b{}b{}", "a".repeat(i + 1), "a".repeat(j + 1)))))
        }
        p => return Err(ProblemError::Infeasible(format!("no witness construction for {p}"))),
    };
    let mut separators = BTreeMap::new();
    let mut length = 0;
    for i in 0..strings.len() {
        for j in i + 1..strings.len() {
            let (y, z) = sep(i, j);
            length = length.max(y.len() + strings[i].len().max(strings[j].len()) + z.len());
            separators.insert((i, j), (y, z));
        }
    }
    Ok(DissimilaritySet { problem, m, strings, separators, length })
}

/// Checks every pair with the membership oracle; returns the first pair
/// that does not separate.
pub fn verify_witness(set: &DissimilaritySet) -> Result<usize, (usize, usize)> {
    for (&(i, j), (y, z)) in &set.separators {
        let a = membership(set.problem, &format!("{y}{}{z}", set.strings[i]));
        let b = membership(set.problem, &format!("{y}{}{z}", set.strings[j]));
        let opposite = matches!((a, b), (Status::Yes, Status::No) | (Status::No, Status::Yes));
        if !opposite {
            return Err((i, j));
        }
    }
    Ok(set.separators.len())
}

// ---------------------------------------------------------------------------
// Unary cycle structure

/// Eventual periodicity of a unary rtDFA: the decision on `a^L` for
/// `L < tail + cycle`, periodic with period `cycle` from `tail` on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleStructure {
    pub tail: usize,
    pub cycle: usize,
    pub accepts: Vec<bool>,
}

impl CycleStructure {
    pub fn of(machine: &CompiledMachine) -> Result<Self, ProblemError> {
        if machine.class() != ModelClass::RtDfa || machine.spec.alphabet.len() != 1 {
            return Err(ProblemError::NotUnaryDfa);
        }
        let step = |s: usize, sym: usize| machine.classical(s, sym, 1).expect("validated").0;
        let accepts_from = |s: usize| match machine.halting(s) {
            Some(h) => h == crate::machines::Halting::Accept,
            None => machine.halting(step(s, 2)) == Some(crate::machines::Halting::Accept),
        };
        let mut s = step(machine.initial, 0);
        let mut seen = HashMap::new();
        let mut accepts = Vec::new();
        loop {
            if let Some(&first) = seen.get(&s) {
                return Ok(CycleStructure { tail: first, cycle: accepts.len() - first, accepts });
            }
            seen.insert(s, accepts.len());
            accepts.push(accepts_from(s));
            // Halting states absorb the rest of the input.
            if machine.halting(s).is_none() {
                s = step(s, 1);
            }
        }
    }

    pub fn accepts(&self, length: &BigInt) -> bool {
        let idx = match length.to_usize() {
            Some(l) if l < self.accepts.len() => l,
            _ => {
                let off = (length - BigInt::from(self.tail)) % BigInt::from(self.cycle);
                self.tail + off.to_usize().expect("below cycle")
            }
        };
        self.accepts[idx]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CycleVerdict {
    Solves { structure: CycleStructure },
    FailsWithCounterexample { i: u64, structure: CycleStructure },
}

/// Decides whether a unary rtDFA solves `EVENODD^k` (accept iff `i` is
/// even on `a^(i 2^k)`). Beyond the tail the decisions are periodic in
/// `i` with a period dividing `2 d`, so checking
/// `i <= ceil(tail / 2^k) + 2 d` covers every case.
pub fn unary_cycle_check(dfa: &MachineSpec, k: u32) -> Result<CycleVerdict, ProblemError> {
    let machine = compile(dfa)?;
    let structure = CycleStructure::of(&machine)?;
    let block = BigInt::one() << k;
    let tail_blocks = BigInt::from(structure.tail).div_ceil(&block).to_u64().unwrap_or(0);
    let last = tail_blocks + 2 * structure.cycle as u64;
    for i in 0..=last {
        let expect = i % 2 == 0;
        if structure.accepts(&(BigInt::from(i) * &block)) != expect {
            return Ok(CycleVerdict::FailsWithCounterexample { i, structure });
        }
    }
    Ok(CycleVerdict::Solves { structure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palindromes_of_each_parity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 0..7 {
            let p = random_palindrome(&mut rng, n);
            assert_eq!(p.len(), n);
            assert!(is_palindrome(&p));
            if n >= 2 {
                assert!(!is_palindrome(&random_non_palindrome(&mut rng, n)));
            }
        }
    }

    #[test]
    fn exp_blocks_rejects_partial_blocks() {
        assert_eq!(exp_blocks("acacbcbc"), Some(("a", "b", 1)));
        assert_eq!(exp_blocks("acacbcb"), None);
        assert_eq!(exp_blocks("acacbcbcac"), None);
        assert_eq!(exp_blocks("c"), None);
    }

    #[test]
    fn words_are_lexicographic() {
        assert_eq!(words(2), ["aa", "ab", "ba", "bb"]);
        assert_eq!(words(0), [""]);
    }
}
