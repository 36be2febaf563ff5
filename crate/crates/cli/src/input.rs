//! Input strings: literal text, run-length shorthand (`a8` is `a^8`,
//! `a2b1a3` is `aabaaa`), or promise instances built from parameters.

use anyhow::{anyhow, bail, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use qfa_core::constructions::ConstructionId;
use qfa_core::problems::{block_threshold, evenodd_status, exp_twinpal_string, membership, Problem, Status};

/// Longest string the CLI will materialise.
pub const MAX_MATERIALISED: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Text(String),
    /// `letter^length`, kept symbolic so very long unary words stay cheap.
    Unary(char, BigInt),
}

impl Input {
    pub fn length(&self) -> BigInt {
        match self {
            Input::Text(s) => BigInt::from(s.chars().count()),
            Input::Unary(_, n) => n.clone(),
        }
    }

    pub fn materialise(&self) -> Result<String> {
        match self {
            Input::Text(s) => Ok(s.clone()),
            Input::Unary(c, n) => {
                let n = n.to_usize().filter(|&n| n <= MAX_MATERIALISED).ok_or_else(|| {
                    anyhow!("input of length {n} is too long to materialise (limit {MAX_MATERIALISED})")
                })?;
                Ok(c.to_string().repeat(n))
            }
        }
    }

    /// Short human-readable rendering for output documents.
    pub fn describe(&self) -> String {
        match self {
            Input::Text(s) if s.len() <= 256 => s.clone(),
            Input::Text(s) => run_length(s),
            Input::Unary(c, n) => format!("{c}^{n}"),
        }
    }

    /// Promise status of this input for `problem`.
    pub fn status(&self, problem: Problem) -> Result<Status> {
        Ok(match (self, problem) {
            (Input::Unary(_, n), Problem::EvenOdd(k)) => evenodd_status(k, n),
            _ => membership(problem, &self.materialise()?),
        })
    }
}

fn run_length(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let mut n = 1;
        while chars.peek() == Some(&c) {
            chars.next();
            n += 1;
        }
        out.push_str(&format!("{c}{n}"));
    }
    out
}

/// Parses `--input`. Strings containing digits are run-length shorthand.
pub fn parse_input(raw: &str) -> Result<Input> {
    if !raw.chars().any(|c| c.is_ascii_digit()) {
        return Ok(Input::Text(raw.to_string()));
    }
    let mut runs: Vec<(char, BigInt)> = Vec::new();
    let mut chars = raw.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_ascii_digit() {
            bail!("malformed shorthand `{raw}`: a count must follow a letter");
        }
        let mut digits = String::new();
        while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            digits.push(*d);
            chars.next();
        }
        let n: BigInt = if digits.is_empty() { BigInt::from(1) } else { digits.parse()? };
        match runs.last_mut() {
            Some((last, m)) if *last == c => *m += n,
            _ => runs.push((c, n)),
        }
    }
    runs.retain(|(_, n)| !n.is_zero());
    match runs.as_slice() {
        [] => Ok(Input::Text(String::new())),
        [(c, n)] => Ok(Input::Unary(*c, n.clone())),
        _ => {
            let mut s = String::new();
            for (c, n) in &runs {
                let n = n.to_usize().filter(|&n| s.len() + n <= MAX_MATERIALISED).ok_or_else(|| anyhow!("input too long"))?;
                s.push_str(&c.to_string().repeat(n));
            }
            Ok(Input::Text(s))
        }
    }
}

/// Instance parameters from the command line.
#[derive(Clone, Debug, Default)]
pub struct InstanceParams {
    pub u: Option<String>,
    pub v: Option<String>,
    pub t: Option<u64>,
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub i: Option<u64>,
    pub swap: bool,
}

impl InstanceParams {
    pub fn any(&self) -> bool {
        self.u.is_some() || self.v.is_some() || self.t.is_some() || self.m.is_some() || self.n.is_some() || self.i.is_some()
    }
}

fn need<T: Clone>(x: &Option<T>, flag: &str, problem: Problem) -> Result<T> {
    x.clone().ok_or_else(|| anyhow!("{problem} instances need --{flag}"))
}

/// Builds the instance string for `problem` from parameters.
pub fn build_instance(problem: Problem, p: &InstanceParams) -> Result<Input> {
    Ok(match problem {
        Problem::PromisePal => Input::Text(format!("{}c{}", need(&p.u, "u", problem)?, need(&p.v, "v", problem)?)),
        Problem::PromiseTwinpal => {
            let (u, v) = (need(&p.u, "u", problem)?, need(&p.v, "v", problem)?);
            Input::Text(format!("{u}c{u}c{v}c{v}"))
        }
        Problem::ExpPromiseTwinpal => {
            let (u, v) = (need(&p.u, "u", problem)?, need(&p.v, "v", problem)?);
            let t = match p.t {
                Some(t) => t,
                None => block_threshold(u.len()).to_u64().ok_or_else(|| anyhow!("25^|u| blocks is too many; pass --t"))?,
            };
            let len = (t as u128) * (4 + 2 * (u.len() + v.len()) as u128);
            if len > MAX_MATERIALISED as u128 {
                bail!("instance of length {len} is too long to materialise");
            }
            Input::Text(exp_twinpal_string(&u, &v, t as usize))
        }
        Problem::PromiseEq => {
            let (m, n) = (need(&p.m, "m", problem)? as usize, need(&p.n, "n", problem)? as usize);
            let (a, b) = ("a".repeat(m), "a".repeat(n));
            Input::Text(if p.swap { format!("{a}b{b}b{a}") } else { format!("{a}b{a}b{b}") })
        }
        Problem::EvenOdd(k) => Input::Unary('a', BigInt::from(need(&p.i, "i", problem)?) << k),
    })
}

/// The promise problem a builtin construction is meant for, if any.
pub fn problem_for(id: ConstructionId) -> Option<Problem> {
    match id {
        ConstructionId::AwPal | ConstructionId::AwEqPhase => None,
        ConstructionId::ExactPalSweeping => Some(Problem::PromisePal),
        ConstructionId::ExactTwinpal => Some(Problem::PromiseTwinpal),
        ConstructionId::LvExptwinpal | ConstructionId::ExactExptwinpal => Some(Problem::ExpPromiseTwinpal),
        ConstructionId::ExactEqRestarting => Some(Problem::PromiseEq),
        ConstructionId::EvenoddMcqfa(k) | ConstructionId::EvenoddDfa(k) => Some(Problem::EvenOdd(k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand() {
        assert_eq!(parse_input("a8").unwrap(), Input::Unary('a', BigInt::from(8)));
        assert_eq!(parse_input("a2b1a3").unwrap(), Input::Text("aabaaa".into()));
        assert_eq!(parse_input("a2a3").unwrap(), Input::Unary('a', BigInt::from(5)));
        assert_eq!(parse_input("abc").unwrap(), Input::Text("abc".into()));
        assert_eq!(parse_input("a0").unwrap(), Input::Text(String::new()));
        assert!(parse_input("8a").is_err());
        let big = parse_input("a100000000000000000000").unwrap();
        assert!(big.materialise().is_err());
        assert_eq!(big.describe(), "a^100000000000000000000");
    }

    #[test]
    fn instances() {
        let p = InstanceParams { u: Some("aa".into()), v: Some("ab".into()), ..Default::default() };
        assert_eq!(build_instance(Problem::PromiseTwinpal, &p).unwrap(), Input::Text("aacaacabcab".into()));
        let eq = InstanceParams { m: Some(1), n: Some(2), swap: true, ..Default::default() };
        assert_eq!(build_instance(Problem::PromiseEq, &eq).unwrap().status(Problem::PromiseEq).unwrap(), Status::No);
        let eo = InstanceParams { i: Some(3), ..Default::default() };
        assert_eq!(build_instance(Problem::EvenOdd(2), &eo).unwrap(), Input::Unary('a', BigInt::from(12)));
        assert!(build_instance(Problem::PromisePal, &InstanceParams::default()).is_err());
    }

    #[test]
    fn run_length_description() {
        assert_eq!(run_length("aabccc"), "a2b1c3");
    }
}
