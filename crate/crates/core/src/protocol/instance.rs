use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::Zero;
use regex::Regex;

use crate::error::Error;
use crate::machine::Choice;

static FORM: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(?:[01]+#)(?:[01]+#)+$").expect("valid regex"));

/// True iff `s` matches `({0,1}+#)({0,1}+#)+` as a whole.
pub fn validate_form(s: &str) -> bool {
    FORM.is_match(s)
}

/// A SUBSET-SUM instance: target `S` and values `a_1..a_n`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub target: BigUint,
    pub values: Vec<BigUint>,
}

impl Instance {
    pub fn new(target: BigUint, values: Vec<BigUint>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::Precondition("an instance needs at least one value".into()));
        }
        Ok(Instance { target, values })
    }

    pub fn from_u64(target: u64, values: &[u64]) -> Result<Self, Error> {
        Self::new(BigUint::from(target), values.iter().map(|&v| BigUint::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of the selected values.
    pub fn selected_sum(&self, selection: &WitnessSubset) -> Result<BigUint, Error> {
        selection.check_len(self.len())?;
        Ok(self
            .values
            .iter()
            .zip(&selection.0)
            .filter(|(_, &s)| s)
            .map(|(v, _)| v)
            .sum())
    }

    pub fn is_witness(&self, selection: &WitnessSubset) -> bool {
        self.selected_sum(selection).is_ok_and(|t| t == self.target)
    }
}

/// Parses the line format `S a1 a2 ... an` (decimal, whitespace separated).
impl FromStr for Instance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let mut numbers = Vec::new();
        let mut offset = 0;
        for token in s.split_whitespace() {
            let position = s[offset..].find(token).map_or(offset, |p| p + offset);
            offset = position + token.len();
            let n = BigUint::from_str(token).map_err(|_| Error::Parse {
                token: token.to_string(),
                position: position + 1,
                reason: "expected a nonnegative decimal integer".into(),
            })?;
            numbers.push(n);
        }
        if numbers.len() < 2 {
            return Err(Error::Parse {
                token: s.trim().to_string(),
                position: offset + 1,
                reason: "expected a target followed by at least one value".into(),
            });
        }
        let target = numbers.remove(0);
        Instance::new(target, numbers)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.target)?;
        for v in &self.values {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

/// Which values a prover claims are in the subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WitnessSubset(pub Vec<bool>);

impl WitnessSubset {
    /// Bit `i` of `mask` selects value `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        WitnessSubset((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn choices(&self) -> Vec<Choice> {
        self.0.iter().map(|&b| Choice::from_bool(b)).collect()
    }

    pub fn from_choices(choices: &[Choice]) -> Self {
        WitnessSubset(choices.iter().map(|c| c.is_select()).collect())
    }

    pub fn check_len(&self, n: usize) -> Result<(), Error> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::SelectionLength { expected: n, got: self.len() })
        }
    }
}

/// Comma-separated `select`/`skip` list.
impl FromStr for WitnessSubset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        let mut out = Vec::new();
        let mut pos = 1;
        for part in s.split(',') {
            let c: Choice = part.parse().map_err(|_| Error::Parse {
                token: part.trim().to_string(),
                position: pos,
                reason: "expected select or skip".into(),
            })?;
            out.push(c.is_select());
            pos += part.len() + 1;
        }
        Ok(WitnessSubset(out))
    }
}

impl fmt::Display for WitnessSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.choices().iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// The input word `w` over `{0, 1, #}`, endmarkers excluded. Always of valid form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TapeString(String);

impl TapeString {
    pub fn parse(s: &str) -> Result<Self, Error> {
        if validate_form(s) {
            Ok(TapeString(s.to_string()))
        } else {
            Err(Error::InvalidForm(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `|w|`, endmarkers excluded.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn decode(&self) -> Instance {
        let mut numbers = self
            .0
            .split_terminator('#')
            .map(|b| BigUint::parse_bytes(b.as_bytes(), 2).expect("form-checked binary"));
        let target = numbers.next().expect("form-checked target");
        Instance { target, values: numbers.collect() }
    }
}

impl fmt::Display for TapeString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn binary(n: &BigUint) -> String {
    if n.is_zero() {
        "0".to_string()
    } else {
        n.to_str_radix(2)
    }
}

/// MSB-first binary fields, each terminated by `#`.
pub fn encode_instance(inst: &Instance) -> TapeString {
    let mut s = String::new();
    for n in std::iter::once(&inst.target).chain(&inst.values) {
        s.push_str(&binary(n));
        s.push('#');
    }
    TapeString(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_examples() {
        assert!(validate_form("1#1#"));
        assert!(validate_form("01#10#"));
        assert!(!validate_form("1#"));
        assert!(!validate_form("#1#"));
        assert!(!validate_form("1#1"));
        assert!(!validate_form(""));
        assert!(!validate_form("1##1#"));
        assert!(!validate_form("12#1#"));
    }

    #[test]
    fn encoding_examples() {
        let i = Instance::from_u64(2, &[1]).unwrap();
        assert_eq!(encode_instance(&i).as_str(), "10#1#");
        let i = Instance::from_u64(3, &[1, 2]).unwrap();
        assert_eq!(encode_instance(&i).as_str(), "11#1#10#");
        let i = Instance::from_u64(0, &[0]).unwrap();
        assert_eq!(encode_instance(&i).as_str(), "0#0#");
    }

    #[test]
    fn round_trip_small_sweep() {
        for n in 1..=4usize {
            let total = 16u64.pow(n as u32 + 1);
            // Stride keeps the sweep quick while touching every digit position.
            for code in (0..total).step_by(if n >= 3 { 7 } else { 1 }) {
                let mut c = code;
                let target = c % 16;
                c /= 16;
                let values: Vec<u64> = (0..n).map(|_| { let v = c % 16; c /= 16; v }).collect();
                let inst = Instance::from_u64(target, &values).unwrap();
                let tape = encode_instance(&inst);
                assert!(validate_form(tape.as_str()));
                assert_eq!(tape.decode(), inst);
            }
        }
    }

    #[test]
    fn leading_zeros_decode_to_same_value() {
        let t = TapeString::parse("0010#01#").unwrap();
        assert_eq!(t.decode(), Instance::from_u64(2, &[1]).unwrap());
    }

    #[test]
    fn instance_parse_errors_name_token_and_position() {
        let err = "3 1 x2".parse::<Instance>().unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                token: "x2".into(),
                position: 5,
                reason: "expected a nonnegative decimal integer".into()
            }
        );
        assert!(matches!("7".parse::<Instance>(), Err(Error::Parse { .. })));
        assert!(matches!("-1 2".parse::<Instance>(), Err(Error::Parse { position: 1, .. })));
        assert_eq!("  5   2 3 ".parse::<Instance>().unwrap(), Instance::from_u64(5, &[2, 3]).unwrap());
    }

    #[test]
    fn witness_parse() {
        let w: WitnessSubset = "select, skip,select".parse().unwrap();
        assert_eq!(w.0, vec![true, false, true]);
        assert_eq!(w.to_string(), "select,skip,select");
        assert!("select,maybe".parse::<WitnessSubset>().is_err());
    }
}
