//! Canonical rendering. Only core syntax is emitted (`~`, `&`, `B`, `D`,
//! `true`, `false`), with parentheses exactly where reparsing needs them, so
//! parsing a rendered formula gives back the identical tree.

use std::fmt;

use crate::formula::{InnerFormula, OuterFormula};

fn is_and_inner(f: &InnerFormula) -> bool {
    matches!(f, InnerFormula::And(..))
}

fn is_and_outer(f: &OuterFormula) -> bool {
    match f {
        OuterFormula::And(..) => true,
        OuterFormula::Inner(a) => is_and_inner(a),
        _ => false,
    }
}

fn paren_inner(f: &InnerFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_and_inner(f) {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

fn paren_outer(f: &OuterFormula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_and_outer(f) {
        write!(out, "({f})")
    } else {
        write!(out, "{f}")
    }
}

impl fmt::Display for InnerFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnerFormula::Top => f.write_str("true"),
            InnerFormula::Bot => f.write_str("false"),
            InnerFormula::Atom(p) => write!(f, "{p}"),
            InnerFormula::Not(x) => {
                f.write_str("~")?;
                paren_inner(x, f)
            }
            // `&` is left-associative: the right operand keeps its parens
            InnerFormula::And(a, b) => {
                write!(f, "{a} & ")?;
                paren_inner(b, f)
            }
            InnerFormula::Tri { agent, grade, body } => {
                write!(f, "B{{{agent},{grade}}} ")?;
                paren_inner(body, f)
            }
        }
    }
}

impl fmt::Display for OuterFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OuterFormula::Inner(a) => write!(f, "{a}"),
            OuterFormula::Not(x) => {
                f.write_str("~")?;
                paren_outer(x, f)
            }
            OuterFormula::And(a, b) => {
                write!(f, "{a} & ")?;
                paren_outer(b, f)
            }
            OuterFormula::Box { group, grade, body } => {
                write!(f, "D{{{group},{grade}}} ")?;
                paren_outer(body, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::parse;

    #[track_caller]
    fn round_trip(text: &str) -> String {
        let f = parse(text).unwrap();
        let rendered = f.to_string();
        assert_eq!(parse(&rendered).unwrap(), f, "render broke {text:?}");
        rendered
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(round_trip("B{1,2} p"), "B{1,2} p");
        assert_eq!(round_trip("D{1 2,0} p"), "D{1 2,0} p");
        assert_eq!(round_trip("~(p & q)"), "~(p & q)");
        assert_eq!(round_trip("B{1,w} ~p"), "B{1,w} ~p");
        assert_eq!(round_trip("p & q & r"), "p & q & r");
        assert_eq!(round_trip("p & (q & r)"), "p & (q & r)");
    }

    #[test]
    fn macros_render_as_core() {
        assert_eq!(round_trip("p -> q"), "~(p & ~q)");
        assert_eq!(round_trip("Dhat{1,1} p"), "~D{1,1} ~p");
        assert_eq!(round_trip("disagree{1 2,3}"), "D{1 2,2} false");
    }

    #[test]
    fn rendering_is_idempotent() {
        for text in [
            "~(B{1,1} (p & q) & D{1 2,3} ~r)",
            "p <-> q",
            "D{2,1} (p | B{2,2} q)",
            "true & ~false",
        ] {
            let once = round_trip(text);
            assert_eq!(round_trip(&once), once);
        }
    }
}
