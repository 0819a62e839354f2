//! Positive braid words whose closure is a knot.

use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BraidError {
    #[error("could not parse braid term {0:?}")]
    Syntax(String),
    #[error("generator {index} out of range for {strands} strands")]
    OutOfRange { index: i64, strands: usize },
    #[error("negative or zero generator {0}: only positive braids are supported (the series is defined for positive braid knots)")]
    NotPositive(i64),
    #[error("at least two strands are required, got {0}")]
    TooFewStrands(usize),
    #[error("closure is not a knot: permutation has {0} cycles")]
    NotAKnot(usize),
}

impl BraidError {
    /// True for the errors that describe a valid word whose closure is a link.
    pub fn is_non_knot(&self) -> bool {
        matches!(self, BraidError::NotAKnot(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    word: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub index: usize,
    pub crossing_position: usize,
    pub left_pass_strands: Vec<usize>,
    pub right_pass_strands: Vec<usize>,
}

impl BraidWord {
    /// Builds a braid from generator indices in 1..strands, checking the knot condition.
    pub fn new(strands: usize, word: Vec<usize>) -> Result<Self, BraidError> {
        let b = Self::unchecked(strands, word)?;
        let cycles = b.cycle_count();
        if cycles != 1 {
            return Err(BraidError::NotAKnot(cycles));
        }
        Ok(b)
    }

    fn unchecked(strands: usize, word: Vec<usize>) -> Result<Self, BraidError> {
        if strands < 2 {
            return Err(BraidError::TooFewStrands(strands));
        }
        if let Some(&i) = word.iter().find(|&&i| i == 0 || i >= strands) {
            return Err(BraidError::OutOfRange { index: i as i64, strands });
        }
        Ok(BraidWord { strands, word })
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    fn cycle_count(&self) -> usize {
        let p = self.closure_permutation();
        let mut seen = vec![false; p.len()];
        let mut cycles = 0;
        for start in 0..p.len() {
            if !seen[start] {
                cycles += 1;
                let mut i = start;
                while !seen[i] {
                    seen[i] = true;
                    i = p[i];
                }
            }
        }
        cycles
    }

    /// Image of each strand slot (0-based) after running through the word.
    pub fn closure_permutation(&self) -> Vec<usize> {
        let mut slot: Vec<usize> = (0..self.strands).collect();
        for &g in &self.word {
            slot.swap(g - 1, g);
        }
        // slot[k] is the strand that ends in position k; invert it.
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in slot.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }

    pub fn writhe(&self) -> i64 {
        self.word.len() as i64
    }

    pub fn levels(&self) -> Vec<Level> {
        self.word
            .iter()
            .enumerate()
            .map(|(index, &g)| Level {
                index,
                crossing_position: g,
                left_pass_strands: (1..g).collect(),
                right_pass_strands: (g + 2..=self.strands).collect(),
            })
            .collect()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|g| g.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parses `WORD := TERM (SPACE TERM)*`, `TERM := INT | INT '^' INT`.
pub fn parse_braid(text: &str, strands: usize) -> Result<BraidWord, BraidError> {
    let mut word = Vec::new();
    for term in text.split_whitespace() {
        let syntax = || BraidError::Syntax(term.to_string());
        let (g, p) = match term.split_once('^') {
            Some((g, p)) => (g, p.parse::<i64>().map_err(|_| syntax())?),
            None => (term, 1),
        };
        let g: i64 = g.parse().map_err(|_| syntax())?;
        if g <= 0 {
            return Err(BraidError::NotPositive(g));
        }
        if p < 1 {
            return Err(syntax());
        }
        word.extend(std::iter::repeat_n(g as usize, p as usize));
    }
    BraidWord::new(strands, word)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_torus_knots() {
        let t = parse_braid("1 1 1", 2).unwrap();
        assert_eq!(t.word(), &[1, 1, 1]);
        assert_eq!(t.writhe(), 3);
        let c = parse_braid("1^5", 2).unwrap();
        assert_eq!(c.word(), &[1; 5]);
        assert_eq!(c.writhe(), 5);
        assert_eq!(parse_braid("1 2", 3).unwrap().closure_permutation(), vec![2, 0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(parse_braid("1 1", 2), Err(BraidError::NotAKnot(2)));
        assert_eq!(parse_braid("-1 1 1", 2), Err(BraidError::NotPositive(-1)));
        assert_eq!(parse_braid("0", 2), Err(BraidError::NotPositive(0)));
        assert!(matches!(parse_braid("3", 3), Err(BraidError::OutOfRange { index: 3, .. })));
        assert!(matches!(parse_braid("1^x", 2), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_braid("1^0", 2), Err(BraidError::Syntax(_))));
        assert!(matches!(parse_braid("1", 1), Err(BraidError::TooFewStrands(1))));
    }

    #[test]
    fn permutations() {
        let sigma1 = BraidWord::unchecked(2, vec![1]).unwrap();
        assert_eq!(sigma1.closure_permutation(), vec![1, 0]);
        let sq = BraidWord::unchecked(2, vec![1, 1]).unwrap();
        assert_eq!(sq.closure_permutation(), vec![0, 1]);
        let w = BraidWord::new(3, vec![1, 2, 1, 2]).unwrap();
        assert_eq!(w.cycle_count(), 1);
        for k in 1..9 {
            assert_eq!(BraidWord::new(2, vec![1; k]).is_ok(), k % 2 == 1);
        }
    }

    #[test]
    fn level_decomposition() {
        let t = parse_braid("1 1 1", 2).unwrap();
        let lv = t.levels();
        assert_eq!(lv.len(), 3);
        assert!(lv.iter().all(|l| l.crossing_position == 1));
        let w = BraidWord::new(3, vec![1, 2, 1, 2]).unwrap();
        let pos: Vec<usize> = w.levels().iter().map(|l| l.crossing_position).collect();
        assert_eq!(pos, vec![1, 2, 1, 2]);
        assert_eq!(w.levels()[0].right_pass_strands, vec![3]);
        assert_eq!(w.levels()[1].left_pass_strands, vec![1]);
        assert!(BraidWord::unchecked(2, vec![]).unwrap().levels().is_empty());
        assert_eq!(BraidWord::unchecked(2, vec![]).unwrap().writhe(), 0);
    }
}
