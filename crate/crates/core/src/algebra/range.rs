//! Evaluation of printed parameter ranges such as `-1<=alpha,beta,gamma<=1`,
//! `0<|gamma|<=1`, `0!=gamma<=beta` or `eps=+1,-1`.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::ring::{parse_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Le,
    Lt,
    Ge,
    Gt,
    Ne,
    Eq,
}

fn split(s: &str) -> Option<(Vec<&str>, Vec<Op>)> {
    let mut operands = Vec::new();
    let mut ops = Vec::new();
    let b = s.as_bytes();
    let (mut start, mut i) = (0, 0);
    while i < b.len() {
        let two = if i + 1 < b.len() { &s[i..i + 2] } else { "" };
        let (op, w) = match (two, b[i]) {
            ("<=", _) => (Op::Le, 2),
            (">=", _) => (Op::Ge, 2),
            ("!=", _) => (Op::Ne, 2),
            (_, b'<') => (Op::Lt, 1),
            (_, b'>') => (Op::Gt, 1),
            (_, b'=') => (Op::Eq, 1),
            (_, b'!') => return None,
            _ => {
                i += 1;
                continue;
            }
        };
        operands.push(&s[start..i]);
        ops.push(op);
        i += w;
        start = i;
    }
    operands.push(&s[start..]);
    Some((operands, ops))
}

fn term(t: &str, values: &BTreeMap<String, Rational>) -> Option<Rational> {
    let (neg, body) = match t.as_bytes().first()? {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let v = if let Some(inner) = body.strip_prefix('|').and_then(|x| x.strip_suffix('|')) {
        term(inner, values)?.abs()
    } else if body.starts_with(|c: char| c.is_ascii_digit()) {
        parse_rational(body).ok()?
    } else {
        values.get(body)?.clone()
    };
    Some(if neg { -v } else { v })
}

fn holds(op: Op, a: &Rational, b: &Rational) -> bool {
    match op {
        Op::Le => a <= b,
        Op::Lt => a < b,
        Op::Ge => a >= b,
        Op::Gt => a > b,
        Op::Ne => a != b,
        Op::Eq => a == b,
    }
}

/// Whether `values` satisfy a chain of comparisons. Comma lists mean "each
/// of" except on the right of `=`, where they list the admissible values.
/// `None` when the text cannot be read or a name is unbound.
pub fn range_holds(range: &str, values: &BTreeMap<String, Rational>) -> Option<bool> {
    let s: String = range.chars().filter(|c| !c.is_whitespace()).collect();
    let (operands, ops) = split(&s)?;
    if ops.is_empty() {
        return None;
    }
    let lists = operands
        .iter()
        .map(|o| o.split(',').map(|t| term(t, values)).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    for (k, op) in ops.iter().enumerate() {
        let (l, r) = (&lists[k], &lists[k + 1]);
        let ok = if *op == Op::Eq {
            l.iter().all(|a| r.iter().any(|b| a == b))
        } else {
            l.iter().all(|a| r.iter().all(|b| holds(*op, a, b)))
        };
        if !ok {
            return Some(false);
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn at(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn chains_lists_and_absolute_values() {
        let r = "-1<=alpha,beta,gamma<=1";
        assert_eq!(range_holds(r, &at(&[("alpha", rat(1, 2)), ("beta", rat(-1, 1)), ("gamma", rat(0, 1))])), Some(true));
        assert_eq!(range_holds(r, &at(&[("alpha", rat(1, 2)), ("beta", rat(2, 1)), ("gamma", rat(0, 1))])), Some(false));
        assert_eq!(range_holds("0<|gamma|<=1", &at(&[("gamma", rat(-1, 2))])), Some(true));
        assert_eq!(range_holds("0<|gamma|<=1", &at(&[("gamma", rat(0, 1))])), Some(false));
        assert_eq!(range_holds("0!=gamma<=beta", &at(&[("gamma", rat(-1, 1)), ("beta", rat(0, 1))])), Some(true));
        assert_eq!(range_holds("eps=+1,-1", &at(&[("eps", rat(-1, 1))])), Some(true));
        assert_eq!(range_holds("eps=0,1", &at(&[("eps", rat(-1, 1))])), Some(false));
        assert_eq!(range_holds("p>=0", &at(&[])), None);
    }
}
