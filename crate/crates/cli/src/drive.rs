//! Drives for `qdyn-sim`: each of `omega`, `Omega0`, `Omega1` is an
//! expression in `t` (`pi` is predefined, functions as `math::sin(t)`), or
//! `--omega` names a piecewise-constant table and the other two are omitted.

use std::f64::consts::PI;

use biham_core::qdyn::{DriveSegment, TwoLevelHamiltonian};
use evalexpr::{build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value};

type Num = DefaultNumericTypes;
use serde::Serialize;

use crate::io::{parse_json, read_source, CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Expr {
    text: String,
    node: Node<Num>,
}

impl Expr {
    pub fn parse(text: &str, name: &str) -> CliResult<Self> {
        let node = build_operator_tree::<Num>(text).map_err(|e| CliError::Usage(format!("--{name} '{text}': {e}")))?;
        if let Some(v) = node.iter_variable_identifiers().find(|v| *v != "t" && *v != "pi") {
            return Err(CliError::Usage(format!("--{name} '{text}': unknown variable '{v}'")));
        }
        let e = Expr { text: text.to_string(), node };
        e.try_eval(0.0).map_err(|m| CliError::Usage(format!("--{name} '{text}': {m}")))?;
        Ok(e)
    }

    fn try_eval(&self, t: f64) -> Result<f64, String> {
        let mut ctx = HashMapContext::<Num>::new();
        ctx.set_value("t".into(), Value::Float(t)).map_err(|e| e.to_string())?;
        ctx.set_value("pi".into(), Value::Float(PI)).map_err(|e| e.to_string())?;
        self.node.eval_number_with_context(&ctx).map_err(|e| e.to_string())
    }

    /// NaN when evaluation fails; the caller rejects non-finite trajectories.
    pub fn eval(&self, t: f64) -> f64 {
        self.try_eval(t).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone)]
pub enum Drive {
    Expressions([Expr; 3]),
    Table(Vec<DriveSegment>),
}

/// How the drive was given, echoed in the summary.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveDescription {
    Expressions {
        omega: String,
        #[serde(rename = "Omega0")]
        omega0: String,
        #[serde(rename = "Omega1")]
        omega1: String,
    },
    Table { segments: Vec<DriveSegment> },
}

impl Drive {
    /// `omega` starting with `@` reads a table file, `[` is an inline table.
    pub fn parse(omega: &str, omega0: Option<&str>, omega1: Option<&str>) -> CliResult<Self> {
        let table_src = if let Some(path) = omega.strip_prefix('@') {
            Some(read_source(path)?)
        } else if omega.trim_start().starts_with('[') {
            Some(omega.to_string())
        } else {
            None
        };
        if let Some(src) = table_src {
            if omega0.is_some() || omega1.is_some() {
                return Err(CliError::Usage("--Omega0/--Omega1 cannot be combined with a drive table".into()));
            }
            let segments: Vec<DriveSegment> = parse_json(&src, "drive table")?;
            TwoLevelHamiltonian::<f64>::piecewise(segments.clone()).map_err(|e| CliError::Usage(format!("drive table: {e}")))?;
            return Ok(Drive::Table(segments));
        }
        Ok(Drive::Expressions([
            Expr::parse(omega, "omega")?,
            Expr::parse(omega0.unwrap_or("1"), "Omega0")?,
            Expr::parse(omega1.unwrap_or("0"), "Omega1")?,
        ]))
    }

    pub fn hamiltonian(&self) -> CliResult<TwoLevelHamiltonian<f64>> {
        match self {
            Drive::Table(s) => Ok(TwoLevelHamiltonian::piecewise(s.clone())?),
            Drive::Expressions(e) => {
                let [a, b, c] = e.clone();
                Ok(TwoLevelHamiltonian::new(move |t| (a.eval(t), b.eval(t), c.eval(t))))
            }
        }
    }

    pub fn describe(&self) -> DriveDescription {
        match self {
            Drive::Table(s) => DriveDescription::Table { segments: s.clone() },
            Drive::Expressions([a, b, c]) => {
                DriveDescription::Expressions { omega: a.text.clone(), omega0: b.text.clone(), omega1: c.text.clone() }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions_in_t() {
        let d = Drive::parse("2*t", Some("math::cos(pi*t)"), None).unwrap();
        let h = d.hamiltonian().unwrap();
        let (w, a, b) = h.drive(1.0);
        assert_eq!((w, b), (2.0, 0.0));
        assert!((a + 1.0).abs() < 1e-15);
    }

    #[test]
    fn tables() {
        let d = Drive::parse(r#"[{"start": 0, "omega": 1, "Omega0": 0.5, "Omega1": 0}]"#, None, None).unwrap();
        assert_eq!(d.hamiltonian().unwrap().drive(3.0), (1.0, 0.5, 0.0));
        assert!(Drive::parse("[]", None, None).is_err());
        assert!(Drive::parse(r#"[{"start": 0, "omega": 1}]"#, None, None).is_err());
        assert!(Drive::parse(r#"[{"start": 0, "omega": 1, "Omega0": 0, "Omega1": 0}]"#, Some("1"), None).is_err());
    }

    #[test]
    fn bad_expressions() {
        for e in ["x + 1", "1 +", "true", "\"s\""] {
            assert!(matches!(Drive::parse(e, None, None), Err(CliError::Usage(_))), "{e}");
        }
    }
}
