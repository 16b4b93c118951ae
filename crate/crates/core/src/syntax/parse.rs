//! Concrete syntax for formulas.
//!
//! ```text
//! formula := true | false | P                     ; P a rank-0 symbol
//!          | (= vI vJ) | (R vI ...)               ; R of rank >= 1
//!          | (and formula*) | (or formula*)
//!          | (not formula) | (implies formula formula) | (iff formula formula)
//!          | (exists vI formula) | (forall vI formula)
//! ```
//!
//! Derived connectives are desugared while parsing, so printing a parsed
//! formula yields only `=`, atoms, `and`, `not` and `exists`.

use std::sync::Arc;

use super::formula::{Formula, Interner};
use super::language::{is_variable_token, Language};
use crate::error::{Error, Pos, Result};
use crate::sexpr::{self, SExpr};

pub fn parse_formula(text: &str, lang: &Language) -> Result<Formula> {
    parse_formula_at(text, lang, Pos { line: 1, col: 1 })
}

/// Parses with positions offset to `origin` (used for formulas embedded in
/// catalog strings).
pub fn parse_formula_at(text: &str, lang: &Language, origin: Pos) -> Result<Formula> {
    let expr = sexpr::read_one_at(text, origin)?;
    formula_from_sexpr(&expr, lang)
}

pub fn formula_from_sexpr(expr: &SExpr, lang: &Language) -> Result<Formula> {
    let mut p = FormulaBuilder {
        lang,
        interner: Interner::new(),
    };
    let f = p.build(expr)?;
    Ok(Arc::unwrap_or_clone(p.interner.intern(f)))
}

struct FormulaBuilder<'a> {
    lang: &'a Language,
    interner: Interner,
}

impl FormulaBuilder<'_> {
    fn var(&self, e: &SExpr) -> Result<usize> {
        let SExpr::Word(w, pos) = e else {
            return Err(Error::syntax(e.pos(), "expected a variable `v<digits>`"));
        };
        if !is_variable_token(w) {
            return Err(Error::syntax(*pos, format!("expected a variable, found `{w}`")));
        }
        let index: usize = w[1..]
            .parse()
            .map_err(|_| Error::syntax(*pos, format!("variable index too large in `{w}`")))?;
        if index >= self.lang.var_bound() {
            return Err(Error::VariableOutOfRange {
                index,
                bound: self.lang.var_bound(),
                pos: *pos,
            });
        }
        Ok(index)
    }

    fn arity(&self, head: &str, args: &[SExpr], n: usize, pos: Pos) -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::syntax(
                pos,
                format!("`{head}` takes {n} argument(s), found {}", args.len()),
            ))
        }
    }

    fn build(&mut self, e: &SExpr) -> Result<Formula> {
        match e {
            SExpr::Str(_, pos) => Err(Error::syntax(*pos, "string literal is not a formula")),
            SExpr::Word(w, pos) => match w.as_str() {
                "true" => Formula::conjunction([], self.lang),
                "false" => Formula::disjunction([], self.lang),
                "=" | "and" | "or" | "not" | "implies" | "iff" | "exists" | "forall" => {
                    Err(Error::syntax(*pos, format!("`{w}` must be applied in parentheses")))
                }
                _ if is_variable_token(w) => {
                    Err(Error::syntax(*pos, format!("variable `{w}` is not a formula")))
                }
                _ => match self.lang.rank(w) {
                    None => Err(Error::UnknownSymbol {
                        name: w.clone(),
                        pos: *pos,
                    }),
                    Some(0) => Ok(Formula::atom(w, Vec::new())),
                    Some(rank) => Err(Error::ArityMismatch {
                        symbol: w.clone(),
                        expected: rank,
                        found: 0,
                        pos: *pos,
                    }),
                },
            },
            SExpr::List(items, pos) => {
                let Some((head, args)) = items.split_first() else {
                    return Err(Error::syntax(*pos, "empty list is not a formula"));
                };
                let Some(h) = head.as_word() else {
                    return Err(Error::syntax(head.pos(), "expected an operator or symbol"));
                };
                match h {
                    "=" => {
                        self.arity(h, args, 2, *pos)?;
                        Ok(Formula::equals(self.var(&args[0])?, self.var(&args[1])?))
                    }
                    "and" | "or" => {
                        let parts = args
                            .iter()
                            .map(|a| self.build(a))
                            .collect::<Result<Vec<_>>>()?;
                        if h == "and" {
                            Formula::conjunction(parts, self.lang)
                        } else {
                            Formula::disjunction(parts, self.lang)
                        }
                    }
                    "not" => {
                        self.arity(h, args, 1, *pos)?;
                        Ok(Formula::not(self.build(&args[0])?))
                    }
                    "implies" | "iff" => {
                        self.arity(h, args, 2, *pos)?;
                        let a = self.build(&args[0])?;
                        let b = self.build(&args[1])?;
                        Ok(if h == "implies" {
                            Formula::implies(a, b)
                        } else {
                            Formula::iff(a, b)
                        })
                    }
                    "exists" | "forall" => {
                        self.arity(h, args, 2, *pos)?;
                        let i = self.var(&args[0])?;
                        let body = self.build(&args[1])?;
                        Ok(if h == "exists" {
                            Formula::exists(i, body)
                        } else {
                            Formula::forall(i, body)
                        })
                    }
                    "true" | "false" => Err(Error::syntax(
                        head.pos(),
                        format!("`{h}` takes no arguments"),
                    )),
                    sym => {
                        let rank = self.lang.rank(sym).ok_or_else(|| Error::UnknownSymbol {
                            name: sym.to_string(),
                            pos: head.pos(),
                        })?;
                        if rank == 0 {
                            return Err(Error::syntax(
                                *pos,
                                format!("rank-0 symbol `{sym}` is written bare, without parentheses"),
                            ));
                        }
                        if rank != args.len() {
                            return Err(Error::ArityMismatch {
                                symbol: sym.to_string(),
                                expected: rank,
                                found: args.len(),
                                pos: *pos,
                            });
                        }
                        let vars = args.iter().map(|a| self.var(a)).collect::<Result<Vec<_>>>()?;
                        Ok(Formula::atom(sym, vars))
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang() -> Language {
        Language::new("L", [("R", 2), ("S", 1)], 2).unwrap()
    }

    #[test]
    fn parses_exists_atom() {
        let f = parse_formula("(exists v0 (R v0 v1))", &lang()).unwrap();
        assert_eq!(f, Formula::exists(0, Formula::atom("R", vec![0, 1])));
    }

    #[test]
    fn forall_desugars_to_not_exists_not() {
        let f = parse_formula("(forall v0 (not (= v0 v1)))", &lang()).unwrap();
        let expected = Formula::not(Formula::exists(
            0,
            Formula::not(Formula::not(Formula::equals(0, 1))),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let err = parse_formula("(R v0)", &lang()).unwrap_err();
        assert!(matches!(
            err,
            Error::ArityMismatch { expected: 2, found: 1, .. }
        ));
    }

    #[test]
    fn unknown_symbol_and_variable_bound() {
        let err = parse_formula("(and (S v0)\n (T v1))", &lang()).unwrap_err();
        assert!(matches!(err, Error::UnknownSymbol { ref name, pos: Pos { line: 2, col: 3 } } if name == "T"));
        let err = parse_formula("(S v2)", &lang()).unwrap_err();
        assert!(matches!(err, Error::VariableOutOfRange { index: 2, bound: 2, .. }));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_formula("(and (S v0)", &lang()).unwrap_err();
        assert!(matches!(err, Error::Syntax { pos: Pos { line: 1, col: 1 }, .. }));
        assert!(parse_formula("(not)", &lang()).is_err());
        assert!(parse_formula("v0", &lang()).is_err());
        assert!(parse_formula("\"R\"", &lang()).is_err());
    }

    #[test]
    fn sentential_constants_are_bare() {
        let s = Language::sentential("S", ["P", "Q"]).unwrap();
        let f = parse_formula("(implies P Q)", &s).unwrap();
        assert_eq!(
            f,
            Formula::implies(Formula::atom("P", vec![]), Formula::atom("Q", vec![]))
        );
        assert!(parse_formula("(P)", &s).is_err());
        assert!(parse_formula("(exists v0 P)", &s).is_err());
    }

    #[test]
    fn nary_connectives_and_constants() {
        let s = Language::sentential("S", ["P", "Q"]).unwrap();
        let p = || Formula::atom("P", vec![]);
        let q = || Formula::atom("Q", vec![]);
        assert_eq!(
            parse_formula("(and P Q P)", &s).unwrap(),
            Formula::and(Formula::and(p(), q()), p())
        );
        assert_eq!(parse_formula("(or P)", &s).unwrap(), p());
        assert_eq!(
            parse_formula("true", &s).unwrap(),
            Formula::or(p(), Formula::not(p()))
        );
        assert_eq!(parse_formula("(or)", &s).unwrap(), parse_formula("false", &s).unwrap());
    }
}
