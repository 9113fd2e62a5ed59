use super::element::{Element, Lamp, Side};
use super::GroupSpec;
use crate::error::{Error, Result};

/// Splits `s` on `sep` at bracket depth zero.
fn split_top_level(s: &str, sep: impl Fn(char) -> bool) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' | '<' => depth += 1,
            ')' | ']' | '}' | '>' => depth -= 1,
            _ if depth == 0 && sep(c) => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts.into_iter().filter(|p| !p.trim().is_empty()).collect()
}

fn parse_int(s: &str, whole: &str) -> Result<i64> {
    s.trim().parse::<i64>().map_err(|_| Error::parse(whole, format!("`{}` is not an integer", s.trim())))
}

pub(super) fn parse_element(spec: &GroupSpec, s: &str) -> Result<Element> {
    match spec {
        GroupSpec::FreeAbelian { rank } => {
            let inner = match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                Some(inner) => inner,
                None if *rank == 1 && s.parse::<i64>().is_ok() => s,
                None => return evaluate(spec, s),
            };
            let v = inner.split(',').map(|p| parse_int(p, s)).collect::<Result<Vec<_>>>()?;
            if v.len() != *rank {
                return Err(Error::parse(s, format!("expected {rank} coordinates")));
            }
            Ok(Element::Vector(v))
        }
        GroupSpec::Free { .. } => evaluate(spec, s),
        GroupSpec::Lamplighter => {
            let Some(body) = s.strip_prefix("({").and_then(|r| r.strip_suffix(')')) else {
                return evaluate(spec, s);
            };
            let (lamps, pos) = body.split_once("};").ok_or_else(|| Error::parse(s, "expected `({lamps};position)`"))?;
            let lamps = lamps
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| parse_int(p, s))
                .collect::<Result<Vec<_>>>()?;
            let mut sorted = lamps.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != lamps.len() {
                return Err(Error::parse(s, "repeated lamp"));
            }
            Ok(Element::Lamp(Lamp::new(lamps, parse_int(pos, s)?)))
        }
        GroupSpec::DirectProduct { left, right } => {
            let Some(body) = s.strip_prefix('<').and_then(|r| r.strip_suffix('>')) else {
                return evaluate(spec, s);
            };
            let parts = split_top_level(body, |c| c == '|');
            if parts.len() != 2 {
                return Err(Error::parse(s, "expected `<left|right>`"));
            }
            Ok(Element::Pair(Box::new(left.parse_element(parts[0])?), Box::new(right.parse_element(parts[1])?)))
        }
        GroupSpec::FreeProduct { left, right } => {
            let Some(body) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
                return evaluate(spec, s);
            };
            let mut acc = spec.identity();
            for syl in split_top_level(body, char::is_whitespace) {
                let (tag, x) =
                    syl.split_once(':').ok_or_else(|| Error::parse(s, format!("syllable `{syl}` lacks a side tag")))?;
                let (side, factor) = match tag {
                    "1" => (Side::Left, left),
                    "2" => (Side::Right, right),
                    _ => return Err(Error::parse(s, format!("bad side tag `{tag}`"))),
                };
                let x = factor.parse_element(x)?;
                if !factor.is_identity(&x) {
                    acc = spec.multiply(&acc, &Element::Alternating(vec![(side, x)]));
                }
            }
            Ok(acc)
        }
    }
}

struct ExprParser<'a> {
    spec: &'a GroupSpec,
    names: Vec<(String, Element)>,
    src: &'a str,
    pos: usize,
}

const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

impl<'a> ExprParser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_separators(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() || c == '·' || c == '*' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn power(&self, x: &Element, n: i64) -> Element {
        let base = if n < 0 { self.spec.inverse(x) } else { x.clone() };
        let mut acc = self.spec.identity();
        for _ in 0..n.unsigned_abs() {
            acc = self.spec.multiply(&acc, &base);
        }
        acc
    }

    fn exponent(&mut self) -> Result<i64> {
        let rest = self.rest();
        if let Some(r) = rest.strip_prefix('^') {
            let (neg, r) = match r.strip_prefix('-') {
                Some(r) => (true, r),
                None => (false, r),
            };
            let digits: String = r.chars().take_while(|c| c.is_ascii_digit()).collect();
            if digits.is_empty() {
                return Err(Error::parse(self.src, "missing exponent after `^`"));
            }
            self.pos += rest.len() - r.len() + digits.len();
            let n: i64 = digits.parse().map_err(|_| Error::parse(self.src, "exponent too large"))?;
            return Ok(if neg { -n } else { n });
        }
        let (neg, r) = match rest.strip_prefix('⁻') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let mut n: i64 = 0;
        let mut len = 0;
        for c in r.chars() {
            match SUPERSCRIPT_DIGITS.iter().position(|&d| d == c) {
                Some(d) => {
                    n = n * 10 + d as i64;
                    len += c.len_utf8();
                }
                None => break,
            }
        }
        if len == 0 {
            if neg {
                return Err(Error::parse(self.src, "dangling `⁻`"));
            }
            return Ok(1);
        }
        self.pos += rest.len() - r.len() + len;
        Ok(if neg { -n } else { n })
    }

    fn sequence(&mut self, nested: bool) -> Result<Element> {
        let mut acc = self.spec.identity();
        loop {
            self.skip_separators();
            let rest = self.rest();
            if rest.is_empty() {
                if nested {
                    return Err(Error::parse(self.src, "unbalanced `(`"));
                }
                return Ok(acc);
            }
            if let Some(r) = rest.strip_prefix(')') {
                if !nested {
                    return Err(Error::parse(self.src, "unbalanced `)`"));
                }
                self.pos = self.src.len() - r.len();
                return Ok(acc);
            }
            let atom = if let Some(r) = rest.strip_prefix('(') {
                self.pos = self.src.len() - r.len();
                self.sequence(true)?
            } else if let Some((name, x)) = self.names.iter().find(|(n, _)| rest.starts_with(n.as_str())) {
                self.pos += name.len();
                x.clone()
            } else if rest.starts_with('e') {
                self.pos += 1;
                self.spec.identity()
            } else {
                let tok: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '.').collect();
                let tok = if tok.is_empty() { rest.chars().next().unwrap().to_string() } else { tok };
                return Err(Error::UnknownGenerator(tok));
            };
            let n = self.exponent()?;
            acc = self.spec.multiply(&acc, &self.power(&atom, n));
        }
    }
}

pub(super) fn evaluate(spec: &GroupSpec, expr: &str) -> Result<Element> {
    let mut names: Vec<(String, Element)> = spec.generators().into_iter().map(|g| (g.name, g.element)).collect();
    names.sort_by_key(|n| std::cmp::Reverse(n.0.len()));
    let mut p = ExprParser { spec, names, src: expr, pos: 0 };
    p.sequence(false)
}

pub(super) fn parse_descriptor(s: &str) -> Result<GroupSpec> {
    let tokens = tokenize_descriptor(s)?;
    let mut pos = 0;
    let g = descriptor_expr(&tokens, &mut pos, s)?;
    if pos != tokens.len() {
        return Err(Error::parse(s, "trailing input"));
    }
    Ok(g)
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Times,
    Star,
    Atom(String),
}

fn tokenize_descriptor(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push(Tok::Open);
            }
            ')' => {
                chars.next();
                out.push(Tok::Close);
            }
            '*' => {
                chars.next();
                out.push(Tok::Star);
            }
            '×' => {
                chars.next();
                out.push(Tok::Times);
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_alphanumeric() || c == '^' || c == '-' {
                        atom.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if atom.is_empty() {
                    return Err(Error::parse(s, format!("unexpected `{c}`")));
                }
                out.push(if atom == "x" { Tok::Times } else { Tok::Atom(atom) });
            }
        }
    }
    Ok(out)
}

fn descriptor_expr(t: &[Tok], pos: &mut usize, src: &str) -> Result<GroupSpec> {
    let mut acc = descriptor_term(t, pos, src)?;
    while *pos < t.len() {
        match t[*pos] {
            Tok::Times => {
                *pos += 1;
                acc = GroupSpec::direct_product(acc, descriptor_term(t, pos, src)?);
            }
            Tok::Star => {
                *pos += 1;
                acc = GroupSpec::free_product(acc, descriptor_term(t, pos, src)?);
            }
            _ => break,
        }
    }
    Ok(acc)
}

fn descriptor_term(t: &[Tok], pos: &mut usize, src: &str) -> Result<GroupSpec> {
    match t.get(*pos) {
        Some(Tok::Open) => {
            *pos += 1;
            let g = descriptor_expr(t, pos, src)?;
            if t.get(*pos) != Some(&Tok::Close) {
                return Err(Error::parse(src, "expected `)`"));
            }
            *pos += 1;
            Ok(g)
        }
        Some(Tok::Atom(a)) => {
            *pos += 1;
            atom_group(a).ok_or_else(|| Error::parse(src, format!("unknown group `{a}`")))
        }
        _ => Err(Error::parse(src, "expected a group")),
    }
}

fn atom_group(a: &str) -> Option<GroupSpec> {
    let lower = a.to_ascii_lowercase();
    if lower == "lamplighter" || lower == "l" {
        return Some(GroupSpec::Lamplighter);
    }
    if lower == "z" {
        return Some(GroupSpec::free_abelian(1));
    }
    if let Some(d) = lower.strip_prefix("z^").or_else(|| lower.strip_prefix('z')) {
        return d.parse().ok().map(GroupSpec::free_abelian);
    }
    if let Some(k) = lower.strip_prefix('f') {
        return k.parse().ok().map(GroupSpec::free);
    }
    None
}
