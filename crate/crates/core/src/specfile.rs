//! TOML problem files.
//!
//! ```toml
//! name = "model"
//! a = -1.0
//! b = 1.0
//! alpha = 0.0
//! beta = 0.0
//! q = { constant = 0.0 }
//! r = { pieces = [{ left = -1.0, right = 1.0, coeffs = [1.0, 0.1] }] }
//! h = { grid = { x = [-1.0, 1.0], values = [1.0, 2.0] } }
//!
//! [sweep]
//! eps = [0.2, 0.1, 0.05, 0.025]
//! n_track = 6
//! truncation = 50.0
//! zeta = [0.0, 1.0]
//! nodes = 512
//! ```
//!
//! Piece coefficients are powers of `x - left`. Errors carry the line of the
//! offending field.

use std::ops::Range;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Deserialize;
use toml::Spanned;

use crate::coeffs::{validate_spec, CoefficientFunction, PolyPiece, ProblemSpec, SpecIssue};
use crate::convergence::SweepConfig;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: Option<String>,
    a: Spanned<f64>,
    b: Spanned<f64>,
    alpha: Spanned<f64>,
    beta: Spanned<f64>,
    q: Spanned<RawCoeff>,
    r: Spanned<RawCoeff>,
    h: Spanned<RawCoeff>,
    sweep: Option<Spanned<RawSweep>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoeff {
    constant: Option<f64>,
    pieces: Option<Vec<RawPiece>>,
    grid: Option<RawGrid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    left: f64,
    right: f64,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    eps: Option<Vec<f64>>,
    n_track: Option<usize>,
    truncation: Option<f64>,
    zeta: Option<[f64; 2]>,
    nodes: Option<usize>,
}

/// Sweep settings a problem file may override.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub eps: Option<Vec<f64>>,
    pub n_track: Option<usize>,
    pub truncation: Option<f64>,
    pub zeta: Option<C64>,
    pub nodes: Option<usize>,
}

impl SweepOverrides {
    pub fn apply(&self, cfg: &mut SweepConfig) {
        if let Some(e) = &self.eps {
            cfg.eps_grid = e.clone();
        }
        if let Some(n) = self.n_track {
            cfg.n_track = n;
        }
        if let Some(t) = self.truncation {
            cfg.truncation = t;
        }
        if let Some(z) = self.zeta {
            cfg.zeta_probe = z;
        }
        if let Some(n) = self.nodes {
            cfg.resolvent_nodes = n;
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub name: Option<String>,
    pub spec: ProblemSpec,
    pub sweep: SweepOverrides,
}

fn line_of(text: &str, span: Option<Range<usize>>) -> usize {
    span.map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
        .unwrap_or(0)
}

fn coeff(raw: &RawCoeff) -> std::result::Result<CoefficientFunction, String> {
    match (&raw.constant, &raw.pieces, &raw.grid) {
        (Some(c), None, None) => Ok(CoefficientFunction::constant(*c)),
        (None, Some(p), None) => CoefficientFunction::piecewise(
            p.iter()
                .map(|p| PolyPiece::new(p.left, p.right, p.coeffs.clone()))
                .collect(),
        )
        .map_err(|e| e.to_string()),
        (None, None, Some(g)) => {
            CoefficientFunction::grid(g.x.clone(), g.values.clone()).map_err(|e| e.to_string())
        }
        _ => Err("give exactly one of `constant`, `pieces`, `grid`".into()),
    }
}

fn issue_field(i: &SpecIssue) -> &'static str {
    match i {
        SpecIssue::OriginNotInterior { .. } => "a",
        SpecIssue::NonFiniteAngle(n)
        | SpecIssue::NotFinite(n)
        | SpecIssue::WeightNotPositive { name: n, .. }
        | SpecIssue::DomainTooShort { name: n, .. } => n,
    }
}

/// Parse a problem file; the problem is validated before it is returned.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let field = e
            .message()
            .split('`')
            .nth(1)
            .unwrap_or("document")
            .to_string();
        Error::Parse {
            line: line_of(text, e.span()),
            field,
            message: e.message().trim().to_string(),
        }
    })?;
    let fail = |field: &str, span: Range<usize>, message: String| Error::Parse {
        line: line_of(text, Some(span)),
        field: field.to_string(),
        message,
    };
    let mut cs = Vec::with_capacity(3);
    for (name, c) in [("q", &raw.q), ("r", &raw.r), ("h", &raw.h)] {
        cs.push(coeff(c.get_ref()).map_err(|m| fail(name, c.span(), m))?);
    }
    let h = cs.pop().expect("three");
    let r = cs.pop().expect("three");
    let q = cs.pop().expect("three");
    let spec = ProblemSpec {
        a: *raw.a.get_ref(),
        b: *raw.b.get_ref(),
        alpha: *raw.alpha.get_ref(),
        beta: *raw.beta.get_ref(),
        q,
        r,
        h,
    };
    if let Some(issue) = validate_spec(&spec).issues.first() {
        let field = issue_field(issue);
        let span = match field {
            "a" => raw.a.span(),
            "alpha" => raw.alpha.span(),
            "beta" => raw.beta.span(),
            "q" => raw.q.span(),
            "r" => raw.r.span(),
            _ => raw.h.span(),
        };
        return Err(fail(field, span, issue.to_string()));
    }
    let sweep = match &raw.sweep {
        None => SweepOverrides::default(),
        Some(s) => {
            let v = s.get_ref();
            if v.eps.as_ref().is_some_and(|e| e.is_empty()) {
                return Err(fail("sweep.eps", s.span(), "eps list is empty".into()));
            }
            SweepOverrides {
                eps: v.eps.clone(),
                n_track: v.n_track,
                truncation: v.truncation,
                zeta: v.zeta.map(|z| C64::new(z[0], z[1])),
                nodes: v.nodes,
            }
        }
    };
    Ok(SpecFile {
        name: raw.name,
        spec,
        sweep,
    })
}

pub fn load_spec(path: &Path) -> Result<SpecFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        field: "file".into(),
        message: format!("{}: {e}", path.display()),
    })?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"
name = "model"
a = -1
b = 2.0
alpha = 0.0
beta = 0.5
q = { constant = 0.0 }
r = { pieces = [{ left = -1.0, right = 2.0, coeffs = [1.0, 0.1] }] }
h = { grid = { x = [-1.0, 1.0], values = [1.0, 2.0] } }

[sweep]
eps = [0.2, 0.1]
zeta = [0.5, 1.0]
"#;

    #[test]
    fn parses_all_coefficient_kinds() {
        let f = parse_spec(GOOD).unwrap();
        assert_eq!(f.name.as_deref(), Some("model"));
        assert_eq!(f.spec.a, -1.0);
        assert!((f.spec.r.eval(0.0) - 1.1).abs() < 1e-14);
        assert!((f.spec.h.eval(0.0) - 1.5).abs() < 1e-14);
        let mut cfg = SweepConfig::default();
        f.sweep.apply(&mut cfg);
        assert_eq!(cfg.eps_grid, vec![0.2, 0.1]);
        assert_eq!(cfg.zeta_probe, C64::new(0.5, 1.0));
    }

    #[test]
    fn syntax_error_has_line() {
        let bad = GOOD.replace("beta = 0.5", "beta = 0.5 0.3");
        match parse_spec(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_weight_points_at_field() {
        let bad = GOOD.replace("values = [1.0, 2.0]", "values = [-1.0, 2.0]");
        match parse_spec(&bad) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(field, "h");
                assert_eq!(line, 9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_fields() {
        assert!(matches!(
            parse_spec(&GOOD.replace("alpha = 0.0\n", "")),
            Err(Error::Parse { .. })
        ));
        let e = parse_spec(&GOOD.replace("q = { constant", "q = { konstant")).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 7, .. }), "{e:?}");
    }
}
