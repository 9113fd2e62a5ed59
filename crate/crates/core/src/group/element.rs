use std::cmp::Ordering;
use std::fmt;

/// A letter of a free group: generator `i` is stored as `i + 1`, its inverse as `-(i + 1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter(pub i16);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        let v = generator as i16 + 1;
        Letter(if inverse { -v } else { v })
    }

    pub fn generator(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    fn key(self) -> (u16, bool) {
        (self.0.unsigned_abs(), self.0 < 0)
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A freely reduced word. Ordered shortlex with letters ordered a < a⁻¹ < b < b⁻¹ < ...
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from letters, reducing as it goes.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inverse()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in &other.0 {
            out.push(l);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lamplighter element: finitely many lit lamps and the lighter position.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct Lamp {
    pub lamps: Vec<i64>,
    pub position: i64,
}

impl Lamp {
    pub fn new(mut lamps: Vec<i64>, position: i64) -> Self {
        lamps.sort_unstable();
        let mut out: Vec<i64> = Vec::with_capacity(lamps.len());
        // toggling twice cancels
        for l in lamps {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Lamp { lamps: out, position }
    }

    /// (f,p)(g,q) = (f △ (g+p), p+q)
    pub fn mul(&self, other: &Lamp) -> Lamp {
        let shifted = other.lamps.iter().map(|&l| l + self.position);
        let mut out = Vec::with_capacity(self.lamps.len() + other.lamps.len());
        let mut a = self.lamps.iter().copied().peekable();
        let mut b = shifted.peekable();
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (Some(x), Some(y)) if x == y => {
                    a.next();
                    b.next();
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(x);
                    a.next();
                }
                (Some(_), Some(y)) => {
                    out.push(y);
                    b.next();
                }
                (Some(x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Lamp { lamps: out, position: self.position + other.position }
    }

    pub fn inverse(&self) -> Lamp {
        Lamp { lamps: self.lamps.iter().map(|&l| l - self.position).collect(), position: -self.position }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn tag(self) -> char {
        match self {
            Side::Left => '1',
            Side::Right => '2',
        }
    }
}

/// Canonical form of a group element. Equality of elements is equality of these forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Element {
    Vector(Vec<i64>),
    Word(Word),
    Lamp(Lamp),
    Pair(Box<Element>, Box<Element>),
    /// Alternating normal form of a free product; no syllable is an identity.
    Alternating(Vec<(Side, Element)>),
}

impl Element {
    pub fn as_word(&self) -> Option<&Word> {
        match self {
            Element::Word(w) => Some(w),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[i64]> {
        match self {
            Element::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_lamp(&self) -> Option<&Lamp> {
        match self {
            Element::Lamp(l) => Some(l),
            _ => None,
        }
    }
}

/// Generator names a, b, c, d, f, g, ...; `e` is reserved for the identity.
pub(crate) fn letter_name(g: usize) -> char {
    let skip = if g >= 4 { 1 } else { 0 };
    (b'a' + (g + skip) as u8) as char
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for l in &self.0 {
            write!(f, "{}", letter_name(l.generator()))?;
            if l.is_inverse() {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Vector(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Word(w) => write!(f, "{w}"),
            Element::Lamp(l) => {
                write!(f, "({{")?;
                for (i, x) in l.lamps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}};{})", l.position)
            }
            Element::Pair(a, b) => write!(f, "<{a}|{b}>"),
            Element::Alternating(s) => {
                write!(f, "[")?;
                for (i, (side, x)) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}:{x}", side.tag())?;
                }
                write!(f, "]")
            }
        }
    }
}
