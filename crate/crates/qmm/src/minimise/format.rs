//! Line-oriented text form of polynomial systems.
//!
//! The grammar, one record per line:
//!
//! ```text
//! polynomial-system <title>
//! variables <count>
//! v <name>                               one line per variable
//! constraints <count>
//! c <label> <condition> <monomial>...    one line per constraint
//! ```
//!
//! A monomial is a signed coefficient optionally followed by a product of
//! declared variable names joined with `*`; a bare coefficient is a
//! constant term. Every constraint asserts that its monomials sum to
//! zero. Tokens are space separated, coefficients print in the shortest
//! decimal form that round-trips, and variable lines appear in declaration
//! order (constraints reference variables by these names).

use std::io::{self, Write};

use super::PolynomialSystem;

impl PolynomialSystem {
    /// Streams the text form into a writer. See the module docs for the
    /// grammar.
    pub fn write_text<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "polynomial-system {}", self.title)?;
        writeln!(out, "variables {}", self.variables.len())?;
        for name in &self.variables {
            writeln!(out, "v {name}")?;
        }
        writeln!(out, "constraints {}", self.constraints.len())?;
        for constraint in &self.constraints {
            write!(out, "c {} {}", constraint.label, constraint.condition.slug())?;
            for m in &constraint.monomials {
                write!(out, " {:+}", m.coefficient)?;
                if !m.variables.is_empty() {
                    let product: Vec<&str> = m
                        .variables
                        .iter()
                        .map(|&v| self.variables[v].as_str())
                        .collect();
                    write!(out, " {}", product.join("*"))?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// The text form in memory; prefer [`PolynomialSystem::write_text`]
    /// for the large systems the encoders produce.
    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("text form is valid UTF-8")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Condition, Constraint, Monomial, PolynomialSystem};

    fn demo_system() -> PolynomialSystem {
        PolynomialSystem {
            title: "demo".into(),
            variables: vec!["x".into(), "y".into(), "z".into()],
            constraints: vec![Constraint {
                label: "mixed".into(),
                condition: Condition::FirstColumn,
                monomials: vec![
                    Monomial {
                        coefficient: 2.0,
                        variables: vec![],
                    },
                    Monomial {
                        coefficient: -0.5,
                        variables: vec![0, 1, 2],
                    },
                    Monomial {
                        coefficient: 1.0,
                        variables: vec![0],
                    },
                ],
            }],
        }
    }

    #[test]
    fn text_form_matches_the_documented_grammar() {
        let text = demo_system().to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines,
            vec![
                "polynomial-system demo",
                "variables 3",
                "v x",
                "v y",
                "v z",
                "constraints 1",
                "c mixed first-column +2 -0.5 x*y*z +1 x",
            ]
        );
    }

    #[test]
    fn coefficients_round_trip_through_the_text_form() {
        let third = 1.0 / 3.0;
        let system = PolynomialSystem {
            title: "roundtrip".into(),
            variables: vec!["x".into()],
            constraints: vec![Constraint {
                label: "c0".into(),
                condition: Condition::CandidateUnitTrace,
                monomials: vec![Monomial {
                    coefficient: third,
                    variables: vec![0],
                }],
            }],
        };
        let text = system.to_text();
        let line = text.lines().last().unwrap();
        let token = line.split(' ').nth(3).unwrap();
        let parsed: f64 = token.parse().unwrap();
        assert_eq!(parsed, third);
    }
}
