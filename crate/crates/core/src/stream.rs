//! Datasets as spike streams.
//!
//! Each transaction occupies one pacemaker cycle. Its number appears on the
//! four data lines D3..D0 at phase 1 together with one command line (M, R or
//! E) and, for stores, one attribute line. A '1' bit is a spike, a '0' bit a
//! silent line.

use std::fmt;
use std::str::FromStr;

use crate::engine::PhaseTiming;
use crate::error::StreamError;
use crate::oracle::is_prime;

pub const CODE_WIDTH: usize = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CodeScheme {
    #[default]
    Binary,
    Gray,
}

impl fmt::Display for CodeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeScheme::Binary => "BINARY",
            CodeScheme::Gray => "GRAY",
        })
    }
}

impl FromStr for CodeScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "binary" | "bin" => Ok(CodeScheme::Binary),
            "gray" => Ok(CodeScheme::Gray),
            other => Err(format!("unknown code scheme `{other}`")),
        }
    }
}

pub fn gray_encode(v: u32) -> u32 {
    v ^ (v >> 1)
}

pub fn gray_decode(mut g: u32) -> u32 {
    let mut v = 0;
    while g != 0 {
        v ^= g;
        g >>= 1;
    }
    v
}

/// `width` bits of `v` under `scheme`, most significant first.
pub fn encode_bits(v: u32, scheme: CodeScheme, width: usize) -> Result<Vec<bool>, StreamError> {
    if width < 32 && v >> width != 0 {
        return Err(StreamError::ValueOutOfRange(v));
    }
    let word = match scheme {
        CodeScheme::Binary => v,
        CodeScheme::Gray => gray_encode(v),
    };
    Ok((0..width).rev().map(|i| (word >> i) & 1 == 1).collect())
}

/// D3..D0 for `v`.
pub fn encode_value(v: u32, scheme: CodeScheme) -> Result<[bool; CODE_WIDTH], StreamError> {
    let bits = encode_bits(v, scheme, CODE_WIDTH)?;
    Ok([bits[0], bits[1], bits[2], bits[3]])
}

/// Inverse of [`encode_bits`].
pub fn decode_bits(bits: &[bool], scheme: CodeScheme) -> u32 {
    let word = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
    match scheme {
        CodeScheme::Binary => word,
        CodeScheme::Gray => gray_decode(word),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operation {
    Store,
    Retrieve,
    Erase,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Store => "STORE",
            Operation::Retrieve => "RETRIEVE",
            Operation::Erase => "ERASE",
        }
    }
}

/// The (nPi, Pi) attribute pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Attributes {
    pub non_prime: bool,
    pub prime: bool,
}

impl Attributes {
    pub const NONE: Attributes = Attributes {
        non_prime: false,
        prime: false,
    };
    pub const PRIME: Attributes = Attributes {
        non_prime: false,
        prime: true,
    };
    pub const NON_PRIME: Attributes = Attributes {
        non_prime: true,
        prime: false,
    };

    pub fn from_prime(prime: bool) -> Self {
        if prime {
            Self::PRIME
        } else {
            Self::NON_PRIME
        }
    }

    /// Bit `j` of the pair: 0 is nPi, 1 is Pi.
    pub fn bit(&self, j: usize) -> bool {
        match j {
            0 => self.non_prime,
            1 => self.prime,
            _ => false,
        }
    }
}

impl fmt::Display for Attributes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match (self.non_prime, self.prime) {
            (false, false) => "none",
            (true, false) => "nPi",
            (false, true) => "Pi",
            (true, true) => "nPi+Pi",
        })
    }
}

/// One memory transaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamOp {
    pub value: u8,
    pub op: Operation,
    pub attributes: Option<Attributes>,
}

impl StreamOp {
    pub fn store(value: u8, attributes: Attributes) -> Self {
        StreamOp {
            value,
            op: Operation::Store,
            attributes: Some(attributes),
        }
    }

    pub fn retrieve(value: u8) -> Self {
        StreamOp {
            value,
            op: Operation::Retrieve,
            attributes: None,
        }
    }

    pub fn erase(value: u8) -> Self {
        StreamOp {
            value,
            op: Operation::Erase,
            attributes: None,
        }
    }

    pub fn validate(&self) -> Result<(), StreamError> {
        if self.value as usize >= 1 << CODE_WIDTH {
            return Err(StreamError::ValueOutOfRange(self.value as u32));
        }
        match (self.op, self.attributes) {
            (Operation::Store, None) | (Operation::Store, Some(Attributes::NONE)) => {
                Err(StreamError::MissingAttribute(self.value))
            }
            (Operation::Store, Some(a)) if a.prime && a.non_prime => {
                Err(StreamError::ConflictingAttributes(self.value))
            }
            (Operation::Store, Some(_)) => Ok(()),
            (op, Some(a)) if a != Attributes::NONE => Err(StreamError::UnexpectedAttribute {
                op: op.name(),
                value: self.value,
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StreamOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.op, self.attributes) {
            (Operation::Store, Some(a)) if a.prime => write!(f, "STORE {} PRIME", self.value),
            (Operation::Store, _) => write!(f, "STORE {} NONPRIME", self.value),
            (op, _) => write!(f, "{} {}", op.name(), self.value),
        }
    }
}

/// Input neurons of the stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StreamLine {
    /// Data line carrying bit `i` (D0 is the least significant).
    Data(u8),
    Memorize,
    Retrieve,
    Erase,
    NonPrime,
    Prime,
}

impl StreamLine {
    pub fn label(self) -> String {
        match self {
            StreamLine::Data(i) => format!("D{i}"),
            StreamLine::Memorize => "M".into(),
            StreamLine::Retrieve => "R".into(),
            StreamLine::Erase => "E".into(),
            StreamLine::NonPrime => "nPi".into(),
            StreamLine::Prime => "Pi".into(),
        }
    }

    /// Every line, in raster order from D3 up to Pi.
    pub fn all() -> Vec<StreamLine> {
        let mut lines: Vec<_> = (0..CODE_WIDTH as u8).rev().map(StreamLine::Data).collect();
        lines.extend([
            StreamLine::Memorize,
            StreamLine::Retrieve,
            StreamLine::Erase,
            StreamLine::NonPrime,
            StreamLine::Prime,
        ]);
        lines
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScheduledSpike {
    pub time_ms: u64,
    pub line: StreamLine,
}

/// Phase-1 onset of transaction `index`.
pub fn transaction_onset(timing: &PhaseTiming, index: usize) -> u64 {
    timing.onset(index, 1)
}

/// Spikes for `ops`, transaction `i` on the phase-1 onset of cycle `i`.
pub fn compile_stream(
    ops: &[StreamOp],
    scheme: CodeScheme,
    timing: &PhaseTiming,
) -> Result<Vec<ScheduledSpike>, StreamError> {
    let mut spikes = Vec::new();
    for (i, op) in ops.iter().enumerate() {
        op.validate()?;
        let time_ms = transaction_onset(timing, i);
        let bits = encode_value(op.value as u32, scheme)?;
        for (pos, &bit) in bits.iter().enumerate() {
            if bit {
                let line = StreamLine::Data((CODE_WIDTH - 1 - pos) as u8);
                spikes.push(ScheduledSpike { time_ms, line });
            }
        }
        let command = match op.op {
            Operation::Store => StreamLine::Memorize,
            Operation::Retrieve => StreamLine::Retrieve,
            Operation::Erase => StreamLine::Erase,
        };
        spikes.push(ScheduledSpike {
            time_ms,
            line: command,
        });
        if let Some(a) = op.attributes {
            if a.non_prime {
                spikes.push(ScheduledSpike {
                    time_ms,
                    line: StreamLine::NonPrime,
                });
            }
            if a.prime {
                spikes.push(ScheduledSpike {
                    time_ms,
                    line: StreamLine::Prime,
                });
            }
        }
    }
    spikes.sort();
    Ok(spikes)
}

/// Retrieval order used for both code schemes.
pub const PRIMES_RETRIEVE_ORDER: [u8; 13] = [0, 8, 4, 3, 1, 12, 6, 7, 2, 9, 5, 11, 13];

/// Stores 0..=15 in order flagged prime/non-prime, then retrieves
/// [`PRIMES_RETRIEVE_ORDER`]. Under either code scheme the answers are the
/// same; only the cells used differ.
pub fn primes_scenario() -> Vec<StreamOp> {
    (0..16u8)
        .map(|v| StreamOp::store(v, Attributes::from_prime(is_prime(v as u32))))
        .chain(PRIMES_RETRIEVE_ORDER.iter().map(|&v| StreamOp::retrieve(v)))
        .collect()
}

/// A parsed scenario file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scenario {
    pub scheme: Option<CodeScheme>,
    pub ops: Vec<StreamOp>,
}

impl Scenario {
    /// Parses `CODE BINARY|GRAY`, `STORE v PRIME|NONPRIME`, `RETRIEVE v` and
    /// `ERASE v` lines. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Scenario, StreamError> {
        let mut scenario = Scenario::default();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| StreamError::Parse { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let words: Vec<&str> = content.split_whitespace().collect();
            let keyword = words[0].to_ascii_uppercase();
            let value = |idx: usize| -> Result<u8, StreamError> {
                let word = words
                    .get(idx)
                    .ok_or_else(|| err(format!("{keyword} needs a value")))?;
                let v: u32 = word
                    .parse()
                    .map_err(|_| err(format!("bad value `{word}`")))?;
                if v >= 1 << CODE_WIDTH {
                    return Err(err(format!("value {v} does not fit in {CODE_WIDTH} bits")));
                }
                Ok(v as u8)
            };
            let arity = |n: usize| -> Result<(), StreamError> {
                if words.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{keyword} takes {} argument(s)", n - 1)))
                }
            };
            match keyword.as_str() {
                "CODE" => {
                    arity(2)?;
                    if scenario.scheme.is_some() || !scenario.ops.is_empty() {
                        return Err(err("CODE must be the first line, given once".into()));
                    }
                    scenario.scheme = Some(words[1].parse().map_err(err)?);
                }
                "STORE" => {
                    arity(3)?;
                    let v = value(1)?;
                    let attributes = match words[2].to_ascii_uppercase().as_str() {
                        "PRIME" => Attributes::PRIME,
                        "NONPRIME" => Attributes::NON_PRIME,
                        other => return Err(err(format!("unknown attribute `{other}`"))),
                    };
                    scenario.ops.push(StreamOp::store(v, attributes));
                }
                "RETRIEVE" => {
                    arity(2)?;
                    scenario.ops.push(StreamOp::retrieve(value(1)?));
                }
                "ERASE" => {
                    arity(2)?;
                    scenario.ops.push(StreamOp::erase(value(1)?));
                }
                other => return Err(err(format!("unknown command `{other}`"))),
            }
        }
        Ok(scenario)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(scheme) = self.scheme {
            writeln!(f, "CODE {scheme}")?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing() -> PhaseTiming {
        PhaseTiming {
            t0: 1,
            delta_t: 20,
            phases: 5,
        }
    }

    #[test]
    fn store_five_encodings() {
        assert_eq!(
            encode_value(5, CodeScheme::Binary).unwrap(),
            [false, true, false, true]
        );
        assert_eq!(
            encode_value(5, CodeScheme::Gray).unwrap(),
            [false, true, true, true]
        );
        assert_eq!(encode_value(0, CodeScheme::Gray).unwrap(), [false; 4]);
        assert_eq!(
            encode_value(2, CodeScheme::Gray).unwrap(),
            [false, false, true, true]
        );
        assert_eq!(
            encode_value(3, CodeScheme::Gray).unwrap(),
            [false, false, true, false]
        );
        assert_eq!(
            encode_value(16, CodeScheme::Binary),
            Err(StreamError::ValueOutOfRange(16))
        );
    }

    #[test]
    fn store_five_prime_spikes() {
        let spikes = compile_stream(
            &[StreamOp::store(5, Attributes::PRIME)],
            CodeScheme::Binary,
            &timing(),
        )
        .unwrap();
        let lines: Vec<_> = spikes.iter().map(|s| s.line).collect();
        assert_eq!(
            lines,
            vec![
                StreamLine::Data(0),
                StreamLine::Data(2),
                StreamLine::Memorize,
                StreamLine::Prime
            ]
        );
        assert!(spikes.iter().all(|s| s.time_ms == 1));
    }

    #[test]
    fn retrieve_five_spikes_on_second_cycle() {
        let ops = [StreamOp::store(5, Attributes::PRIME), StreamOp::retrieve(5)];
        let spikes = compile_stream(&ops, CodeScheme::Binary, &timing()).unwrap();
        let second: Vec<_> = spikes
            .iter()
            .filter(|s| s.time_ms == 101)
            .map(|s| s.line)
            .collect();
        assert_eq!(
            second,
            vec![
                StreamLine::Data(0),
                StreamLine::Data(2),
                StreamLine::Retrieve
            ]
        );
    }

    #[test]
    fn empty_stream() {
        assert!(compile_stream(&[], CodeScheme::Gray, &timing())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn invalid_attributes_rejected() {
        let t = timing();
        let missing = StreamOp {
            value: 3,
            op: Operation::Store,
            attributes: None,
        };
        assert_eq!(
            compile_stream(&[missing], CodeScheme::Binary, &t),
            Err(StreamError::MissingAttribute(3))
        );
        let both = StreamOp::store(
            3,
            Attributes {
                non_prime: true,
                prime: true,
            },
        );
        assert_eq!(
            compile_stream(&[both], CodeScheme::Binary, &t),
            Err(StreamError::ConflictingAttributes(3))
        );
        let tagged_read = StreamOp {
            attributes: Some(Attributes::PRIME),
            ..StreamOp::retrieve(3)
        };
        assert!(matches!(
            tagged_read.validate(),
            Err(StreamError::UnexpectedAttribute { .. })
        ));
    }

    #[test]
    fn primes_shape() {
        let ops = primes_scenario();
        assert_eq!(ops.iter().filter(|o| o.op == Operation::Store).count(), 16);
        let retrieves: Vec<u8> = ops
            .iter()
            .filter(|o| o.op == Operation::Retrieve)
            .map(|o| o.value)
            .collect();
        assert_eq!(&retrieves[..3], &[0, 8, 4]);
        let primes: Vec<u8> = ops
            .iter()
            .filter(|o| o.attributes == Some(Attributes::PRIME))
            .map(|o| o.value)
            .collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13]);
    }

    #[test]
    fn scenario_parse_and_print() {
        let text =
            "# demo\nCODE GRAY\nSTORE 5 PRIME\nstore 4 nonprime\nRETRIEVE 5\n\nERASE 5 # gone\n";
        let s = Scenario::parse(text).unwrap();
        assert_eq!(s.scheme, Some(CodeScheme::Gray));
        assert_eq!(
            s.ops,
            vec![
                StreamOp::store(5, Attributes::PRIME),
                StreamOp::store(4, Attributes::NON_PRIME),
                StreamOp::retrieve(5),
                StreamOp::erase(5)
            ]
        );
        assert_eq!(Scenario::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn scenario_errors_carry_line_numbers() {
        let cases = [
            ("STORE 5\n", 1),
            ("RETRIEVE 3\nFETCH 3\n", 2),
            ("\n\nSTORE 16 PRIME\n", 3),
            ("STORE 2 PRIME\nCODE GRAY\n", 2),
            ("ERASE x\n", 1),
            ("CODE OCTAL\n", 1),
        ];
        for (text, line) in cases {
            match Scenario::parse(text) {
                Err(StreamError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert_eq!(Scenario::parse("").unwrap(), Scenario::default());
    }
}
