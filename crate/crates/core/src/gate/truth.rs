use std::fmt;

use crate::error::GateError;

/// An `n`-input Boolean function stored as `2^n` output bits, indexed by the
/// input vector read as a binary number with `x1` as the most significant bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(n: usize, outputs: Vec<bool>) -> Result<Self, GateError> {
        if n >= usize::BITS as usize || outputs.len() != 1usize << n {
            return Err(GateError::TableLength { len: outputs.len() });
        }
        Ok(TruthTable { n, outputs })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        TruthTable {
            n,
            outputs: (0..1usize << n).map(f).collect(),
        }
    }

    /// Parses a bit string whose first character is the output for the
    /// all-ones input and whose last is the output for the all-zeros input.
    pub fn from_bitstring(s: &str) -> Result<Self, GateError> {
        let len = s.chars().count();
        if len == 0 || !len.is_power_of_two() {
            return Err(GateError::TableLength { len });
        }
        let mut outputs = Vec::with_capacity(len);
        for (pos, c) in s.chars().rev().enumerate() {
            outputs.push(match c {
                '0' => false,
                '1' => true,
                other => {
                    return Err(GateError::BitString(format!(
                        "unexpected {other:?} at position {}",
                        len - 1 - pos
                    )))
                }
            });
        }
        TruthTable::new(len.trailing_zeros() as usize, outputs)
    }

    /// Inverse of [`TruthTable::from_bitstring`].
    pub fn to_bitstring(&self) -> String {
        self.outputs
            .iter()
            .rev()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    /// Builds a named function: `AND`, `OR`, `NAND`, `NOR`, `XOR`, `XNOR`,
    /// `CONST0`, `CONST1`, `MAJ:k` or `DICT:i` (1-based input index).
    pub fn named(name: &str, n: usize) -> Result<Self, GateError> {
        if n == 0 || n > 20 {
            return Err(GateError::BitString(format!(
                "input count {n} out of range 1..=20"
            )));
        }
        let upper = name.trim().to_ascii_uppercase();
        let all = (1usize << n) - 1;
        let popcount = |k: usize| k.count_ones() as usize;
        let parse_arg = |rest: &str| {
            rest.parse::<usize>()
                .map_err(|_| GateError::BitString(format!("bad argument in {name:?}")))
        };
        let table = match upper.as_str() {
            "AND" => Self::from_fn(n, |k| k == all),
            "OR" => Self::from_fn(n, |k| k != 0),
            "NAND" => Self::from_fn(n, |k| k != all),
            "NOR" => Self::from_fn(n, |k| k == 0),
            "XOR" => Self::from_fn(n, |k| popcount(k) % 2 == 1),
            "XNOR" => Self::from_fn(n, |k| popcount(k) % 2 == 0),
            "CONST0" | "ZERO" => Self::from_fn(n, |_| false),
            "CONST1" | "ONE" => Self::from_fn(n, |_| true),
            _ => {
                if let Some(rest) = upper.strip_prefix("MAJ:") {
                    let k = parse_arg(rest)?;
                    Self::from_fn(n, |row| popcount(row) >= k)
                } else if let Some(rest) = upper.strip_prefix("DICT:") {
                    let i = parse_arg(rest)?;
                    if i == 0 || i > n {
                        return Err(GateError::BitString(format!(
                            "DICT index {i} outside 1..={n}"
                        )));
                    }
                    Self::from_fn(n, |row| (row >> (n - i)) & 1 == 1)
                } else {
                    return Err(GateError::BitString(format!("unknown function {name:?}")));
                }
            }
        };
        Ok(table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn get(&self, index: usize) -> bool {
        self.outputs[index]
    }

    pub fn complement(&self) -> TruthTable {
        TruthTable {
            n: self.n,
            outputs: self.outputs.iter().map(|b| !b).collect(),
        }
    }

    /// Positive monotonicity: raising any input never lowers the output.
    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// A pair `(low, high)` with `low ⊂ high`, `f(low) = 1` and `f(high) = 0`.
    pub fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        for k in 0..self.outputs.len() {
            if !self.outputs[k] {
                continue;
            }
            for bit in 0..self.n {
                let up = k | (1 << bit);
                if up != k && !self.outputs[up] {
                    return Some((k, up));
                }
            }
        }
        None
    }

    fn is_symmetric(&self) -> bool {
        let mut by_weight: Vec<Option<bool>> = vec![None; self.n + 1];
        for (k, &out) in self.outputs.iter().enumerate() {
            let slot = &mut by_weight[k.count_ones() as usize];
            match slot {
                Some(prev) if *prev != out => return false,
                _ => *slot = Some(out),
            }
        }
        true
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.outputs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", *b as u8)?;
        }
        write!(f, "]")
    }
}

/// Named classes of gate behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateClass {
    ConstantZero,
    ConstantOne,
    And,
    Or,
    Nand,
    Nor,
    /// Output 1 iff at least `k` inputs are 1, for `1 < k < n`.
    Majority(usize),
    /// `f = x_i`, with `i` counted from 1.
    Dictator(usize),
    /// Monotone tables not covered by a more specific class.
    OtherThreshold,
    NonMonotone,
}

impl GateClass {
    /// The majority threshold this class is equivalent to, if any.
    pub fn majority_k(&self, n: usize) -> Option<usize> {
        match *self {
            GateClass::Or => Some(1),
            GateClass::And => Some(n),
            GateClass::Majority(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateClass::ConstantZero => write!(f, "CONST0"),
            GateClass::ConstantOne => write!(f, "CONST1"),
            GateClass::And => write!(f, "AND"),
            GateClass::Or => write!(f, "OR"),
            GateClass::Nand => write!(f, "NAND"),
            GateClass::Nor => write!(f, "NOR"),
            GateClass::Majority(k) => write!(f, "MAJ-{k}"),
            GateClass::Dictator(i) => write!(f, "DICT(x{i})"),
            GateClass::OtherThreshold => write!(f, "OTHER-THRESHOLD"),
            GateClass::NonMonotone => write!(f, "NON-MONOTONE"),
        }
    }
}

/// Recognizes constants first, then AND/OR/NAND/NOR (for `n >= 2`),
/// dictators, and finally symmetric monotone majorities.
pub fn classify(tt: &TruthTable) -> GateClass {
    let n = tt.n();
    let out = tt.outputs();
    let all = out.len() - 1;
    if out.iter().all(|&b| !b) {
        return GateClass::ConstantZero;
    }
    if out.iter().all(|&b| b) {
        return GateClass::ConstantOne;
    }
    if n >= 2 {
        let only = |idx: usize, val: bool| {
            out.iter()
                .enumerate()
                .all(|(k, &b)| b == if k == idx { val } else { !val })
        };
        if only(all, true) {
            return GateClass::And;
        }
        if only(0, false) {
            return GateClass::Or;
        }
        if only(all, false) {
            return GateClass::Nand;
        }
        if only(0, true) {
            return GateClass::Nor;
        }
    }
    for i in 1..=n {
        if out
            .iter()
            .enumerate()
            .all(|(k, &b)| b == ((k >> (n - i)) & 1 == 1))
        {
            return GateClass::Dictator(i);
        }
    }
    if !tt.is_monotone() {
        return GateClass::NonMonotone;
    }
    if tt.is_symmetric() {
        let k = (0..out.len())
            .filter(|&row| out[row])
            .map(|row| row.count_ones() as usize)
            .min()
            .unwrap_or(0);
        return GateClass::Majority(k);
    }
    GateClass::OtherThreshold
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(bits: &[u8]) -> TruthTable {
        let n = bits.len().trailing_zeros() as usize;
        TruthTable::new(n, bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn two_input_classes() {
        assert_eq!(classify(&tt(&[0, 0, 0, 1])), GateClass::And);
        assert_eq!(classify(&tt(&[0, 1, 1, 1])), GateClass::Or);
        assert_eq!(classify(&tt(&[1, 1, 1, 0])), GateClass::Nand);
        assert_eq!(classify(&tt(&[1, 0, 0, 0])), GateClass::Nor);
        assert_eq!(classify(&tt(&[0, 1, 1, 0])), GateClass::NonMonotone);
        assert_eq!(classify(&tt(&[0, 0, 1, 1])), GateClass::Dictator(1));
        assert_eq!(classify(&tt(&[0, 1, 0, 1])), GateClass::Dictator(2));
        assert_eq!(classify(&tt(&[0, 0, 0, 0])), GateClass::ConstantZero);
        assert_eq!(classify(&tt(&[1, 1, 1, 1])), GateClass::ConstantOne);
    }

    #[test]
    fn majority_aliases() {
        assert_eq!(GateClass::And.majority_k(2), Some(2));
        assert_eq!(GateClass::Or.majority_k(2), Some(1));
        let maj2 = TruthTable::named("MAJ:2", 3).unwrap();
        assert_eq!(classify(&maj2), GateClass::Majority(2));
        assert_eq!(
            classify(&TruthTable::named("MAJ:3", 3).unwrap()),
            GateClass::And
        );
    }

    #[test]
    fn other_threshold_and_non_monotone() {
        // x2 & (x1 | x3)
        let f = TruthTable::from_fn(3, |k| (k & 0b010 != 0) && (k & 0b101 != 0));
        assert_eq!(classify(&f), GateClass::OtherThreshold);
        let not_x1 = TruthTable::from_fn(2, |k| k & 0b10 == 0);
        assert_eq!(classify(&not_x1), GateClass::NonMonotone);
    }

    #[test]
    fn bitstring_is_msb_first() {
        let and = TruthTable::from_bitstring("1000").unwrap();
        assert_eq!(and, tt(&[0, 0, 0, 1]));
        assert_eq!(and.to_bitstring(), "1000");
        assert!(TruthTable::from_bitstring("100").is_err());
        assert!(TruthTable::from_bitstring("10a0").is_err());
    }

    #[test]
    fn named_functions() {
        assert_eq!(TruthTable::named("xor", 2).unwrap(), tt(&[0, 1, 1, 0]));
        assert_eq!(TruthTable::named("DICT:2", 2).unwrap(), tt(&[0, 1, 0, 1]));
        assert!(TruthTable::named("DICT:3", 2).is_err());
        assert!(TruthTable::named("FOO", 2).is_err());
    }
}
