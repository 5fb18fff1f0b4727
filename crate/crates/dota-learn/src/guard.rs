//! Integer-bounded guard intervals and the clock region abstraction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A clock constraint `lower ⋈ x ⋈ upper` with natural endpoints; `upper = None` is ∞.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GuardInterval {
    lower: u32,
    lower_closed: bool,
    upper: Option<u32>,
    upper_closed: bool,
}

impl GuardInterval {
    pub fn new(lower: u32, lower_closed: bool, upper: Option<u32>, upper_closed: bool) -> Result<Self> {
        let ok = match upper {
            None => !upper_closed,
            Some(u) => lower < u || (lower == u && lower_closed && upper_closed),
        };
        if !ok {
            return Err(Error::Model(format!(
                "empty or malformed guard {}",
                GuardInterval { lower, lower_closed, upper, upper_closed }
            )));
        }
        Ok(GuardInterval { lower, lower_closed, upper, upper_closed })
    }

    /// `[0, ∞)`.
    pub fn all() -> Self {
        GuardInterval { lower: 0, lower_closed: true, upper: None, upper_closed: false }
    }

    pub fn point(n: u32) -> Self {
        GuardInterval { lower: n, lower_closed: true, upper: Some(n), upper_closed: true }
    }

    pub fn lower(&self) -> u32 {
        self.lower
    }
    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }
    pub fn upper(&self) -> Option<u32> {
        self.upper
    }
    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn contains(&self, v: Rational) -> bool {
        let lo = Rational::from_int(self.lower as i64);
        let above = if self.lower_closed { v >= lo } else { v > lo };
        let below = match self.upper {
            None => true,
            Some(u) => {
                let hi = Rational::from_int(u as i64);
                if self.upper_closed {
                    v <= hi
                } else {
                    v < hi
                }
            }
        };
        above && below
    }

    /// Largest finite endpoint.
    pub fn max_constant(&self) -> u32 {
        self.upper.unwrap_or(0).max(self.lower)
    }

    /// Whether the two intervals share a point.
    pub fn overlaps(&self, other: &GuardInterval) -> bool {
        // Compare with doubled coordinates so open ends become half-steps.
        let (a_lo, a_hi) = self.doubled_bounds();
        let (b_lo, b_hi) = other.doubled_bounds();
        a_lo <= b_hi && b_lo <= a_hi
    }

    // Inclusive bounds on the doubled line: [n -> 2n, (n -> 2n+1, n] -> 2n, n) -> 2n-1.
    fn doubled_bounds(&self) -> (i64, i64) {
        let lo = 2 * self.lower as i64 + if self.lower_closed { 0 } else { 1 };
        let hi = match self.upper {
            None => i64::MAX,
            Some(u) => 2 * u as i64 - if self.upper_closed { 0 } else { 1 },
        };
        (lo, hi)
    }

    /// Whether the doubled-coordinate representative of a region index lies inside.
    /// Region index `2n` is the point `n`, `2n+1` is `(n, n+1)`.
    pub fn contains_region_index(&self, r: u64) -> bool {
        let (lo, hi) = self.doubled_bounds();
        let r = r as i64;
        lo <= r && r <= hi
    }

    /// Intervals covering `[0, ∞)` minus the union of `guards`, in increasing order.
    pub fn complement(guards: &[GuardInterval]) -> Vec<GuardInterval> {
        let mut spans: Vec<(i64, i64)> = guards.iter().map(|g| g.doubled_bounds()).collect();
        spans.sort();
        let mut gaps = Vec::new();
        let mut next: i64 = 0; // first uncovered doubled coordinate
        for (lo, hi) in spans {
            if lo > next {
                gaps.push((next, lo - 1));
            }
            if hi == i64::MAX {
                next = i64::MAX;
                break;
            }
            next = next.max(hi + 1);
        }
        if next != i64::MAX {
            gaps.push((next, i64::MAX));
        }
        gaps.into_iter().map(|(lo, hi)| GuardInterval::from_doubled(lo, hi)).collect()
    }

    fn from_doubled(lo: i64, hi: i64) -> GuardInterval {
        let (lower, lower_closed) = if lo % 2 == 0 { (lo / 2, true) } else { (lo / 2, false) };
        let (upper, upper_closed) = if hi == i64::MAX {
            (None, false)
        } else if hi % 2 == 0 {
            (Some(hi / 2), true)
        } else {
            (Some(hi / 2 + 1), false)
        };
        GuardInterval { lower: lower as u32, lower_closed, upper: upper.map(|u| u as u32), upper_closed }
    }
}

impl fmt::Display for GuardInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lower_closed { '[' } else { '(' };
        match self.upper {
            None => write!(f, "{open}{},+)", self.lower),
            Some(u) => {
                let close = if self.upper_closed { ']' } else { ')' };
                write!(f, "{open}{},{u}{close}", self.lower)
            }
        }
    }
}

impl FromStr for GuardInterval {
    type Err = Error;

    /// Grammar: `'['|'(' nat ',' (nat|'+') ')'|']'`, where `+` is ∞ and must be closed by `)`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("guard {s:?}: {why}"));
        let s = s.trim();
        let lower_closed = match s.chars().next() {
            Some('[') => true,
            Some('(') => false,
            _ => return Err(bad("must start with '[' or '('")),
        };
        let upper_closed = match s.chars().last() {
            Some(']') => true,
            Some(')') => false,
            _ => return Err(bad("must end with ']' or ')'")),
        };
        if s.len() < 2 {
            return Err(bad("too short"));
        }
        let (lo, hi) = s[1..s.len() - 1].split_once(',').ok_or_else(|| bad("missing ','"))?;
        let lower: u32 = lo.trim().parse().map_err(|_| bad("lower bound is not a natural"))?;
        let upper = match hi.trim() {
            "+" | "∞" | "inf" => {
                if upper_closed {
                    return Err(bad("infinite upper bound must be open"));
                }
                None
            }
            t => Some(t.parse::<u32>().map_err(|_| bad("upper bound is not a natural"))?),
        };
        GuardInterval::new(lower, lower_closed, upper, upper_closed)
    }
}

/// Region of a single clock valuation on the unbounded integer grid.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Region {
    /// `[n, n]`
    Point(u64),
    /// `(n, n+1)`
    OpenUnit(u64),
}

impl Ord for Region {
    /// Position on the time line: `[0,0] < (0,1) < [1,1] < …`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Region {
    /// `2n` for `[n,n]`, `2n+1` for `(n,n+1)`.
    pub fn index(&self) -> u64 {
        match *self {
            Region::Point(n) => 2 * n,
            Region::OpenUnit(n) => 2 * n + 1,
        }
    }

    /// Panics on negative valuations.
    pub fn of(v: Rational) -> Region {
        assert!(!v.is_negative(), "negative clock valuation {v}");
        if v.is_integer() {
            Region::Point(v.floor() as u64)
        } else {
            Region::OpenUnit(v.floor() as u64)
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Point(n) => write!(f, "[{n},{n}]"),
            Region::OpenUnit(n) => write!(f, "({n},{})", n + 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> GuardInterval {
        s.parse().unwrap()
    }
    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        for s in ["[4,9]", "(9,+)", "[0,4)", "(5,9]", "[3,3]", "[0,+)"] {
            assert_eq!(g(s).to_string(), s);
        }
        assert!("[9,+]".parse::<GuardInterval>().is_err());
        assert!("(3,3]".parse::<GuardInterval>().is_err());
        assert!("[5,4]".parse::<GuardInterval>().is_err());
        assert!("[a,4]".parse::<GuardInterval>().is_err());
    }

    #[test]
    fn membership() {
        assert!(g("[4,9]").contains(r("4")));
        assert!(g("[4,9]").contains(r("9")));
        assert!(!g("(9,+)").contains(r("9")));
        assert!(g("(9,+)").contains(r("9.5")));
        assert!(!g("[0,4)").contains(r("4")));
        assert!(g("[3,3]").contains(r("3")));
        assert!(!g("[3,3]").contains(r("3.5")));
    }

    #[test]
    fn complement_of_partial_cover() {
        let gaps = GuardInterval::complement(&[g("[4,9]")]);
        let shown: Vec<String> = gaps.iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["[0,4)", "(9,+)"]);
        assert!(GuardInterval::complement(&[g("[0,+)")]).is_empty());
        let shown: Vec<String> =
            GuardInterval::complement(&[]).iter().map(|x| x.to_string()).collect();
        assert_eq!(shown, ["[0,+)"]);
        let shown: Vec<String> = GuardInterval::complement(&[g("(0,3)"), g("(3,+)")])
            .iter()
            .map(|x| x.to_string())
            .collect();
        assert_eq!(shown, ["[0,0]", "[3,3]"]);
    }

    #[test]
    fn overlap_detection() {
        assert!(g("[0,4]").overlaps(&g("[4,9]")));
        assert!(!g("[0,4)").overlaps(&g("[4,9]")));
        assert!(!g("(3,4)").overlaps(&g("[4,+)")));
        assert!(g("(3,+)").overlaps(&g("[10,11]")));
    }

    #[test]
    fn region_of_values() {
        assert_eq!(Region::of(r("4")), Region::Point(4));
        assert_eq!(Region::of(r("5.5")), Region::OpenUnit(5));
        assert_eq!(Region::of(r("0.001")), Region::OpenUnit(0));
        assert!(Region::OpenUnit(0) < Region::Point(1));
        assert!(Region::Point(1) < Region::OpenUnit(1));
    }
}
