//! The six worked problems with their published brackets and constants.

use crate::model::{compile_x_expr, eval_on_grid, BoundaryForm, GridSpec, MeshFunction, ProblemDefinition, ProblemSpec, ScalarFn};
use crate::monotone::Theorem;
use crate::Result;

#[derive(Clone)]
pub struct CatalogEntry {
    pub index: usize,
    pub problem: ProblemSpec,
    pub alpha0_expr: &'static str,
    pub beta0_expr: &'static str,
    pub alpha0: ScalarFn,
    pub beta0: ScalarFn,
    /// Lipschitz constant as published, kept verbatim.
    pub published_l: f64,
    pub published_theorem: Theorem,
    pub exact_expr: Option<&'static str>,
    pub exact_solution: Option<ScalarFn>,
    pub source: &'static str,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("index", &self.index)
            .field("problem", &self.problem)
            .field("alpha0", &self.alpha0_expr)
            .field("beta0", &self.beta0_expr)
            .field("published_l", &self.published_l)
            .finish_non_exhaustive()
    }
}

impl CatalogEntry {
    pub fn alpha0_on(&self, g: &GridSpec) -> Result<MeshFunction> {
        let a = self.alpha0.clone();
        eval_on_grid(g, move |x| a(x))
    }

    pub fn beta0_on(&self, g: &GridSpec) -> Result<MeshFunction> {
        let b = self.beta0.clone();
        eval_on_grid(g, move |x| b(x))
    }

    /// The entry in the key-value problem format.
    pub fn definition(&self) -> ProblemDefinition {
        ProblemDefinition {
            problem: self.problem.clone(),
            alpha0_expr: Some(self.alpha0_expr.to_string()),
            beta0_expr: Some(self.beta0_expr.to_string()),
        }
    }

    /// Published region `α₀(x) ≤ s ≤ β₀(x)` as text.
    pub fn region(&self) -> String {
        format!("0 <= x <= 1, {} <= s <= {}", self.alpha0_expr, self.beta0_expr)
    }
}

struct Raw {
    label: &'static str,
    m: f64,
    n: f64,
    boundary: (f64, f64, f64),
    f: &'static str,
    alpha0: &'static str,
    beta0: &'static str,
    l: f64,
    theorem: Theorem,
    exact: Option<&'static str>,
    source: &'static str,
}

fn raw_entries() -> [Raw; 6] {
    let e = std::f64::consts::E;
    [
        Raw {
            label: "exponential sink with drift",
            m: 1.0,
            n: 1.0,
            boundary: (1.0, 1.0, 1.0),
            f: "1 - 2*exp(s)",
            alpha0: "-1",
            beta0: "1",
            l: 2.0 * e,
            theorem: Theorem::Thm1,
            exact: None,
            source: "exponential sink with Robin data s(1) + s'(1) = 1",
        },
        Raw {
            label: "linear source with strong drift",
            m: 5.0,
            n: 10.0,
            boundary: (6.0, 1.0, 1.0),
            f: "3*s/4",
            alpha0: "0",
            beta0: "(2 - x^2)/3",
            l: 0.75,
            theorem: Theorem::Thm2,
            exact: None,
            source: "linear source with Robin data 6 s(1) + s'(1) = 1",
        },
        Raw {
            label: "thermal explosion in a cylindrical vessel",
            m: 1.0,
            n: 0.0,
            boundary: (1.0, 0.0, 0.0),
            f: "exp(s)/4",
            alpha0: "0",
            beta0: "(3 - x^2)/4",
            l: 0.25,
            theorem: Theorem::Thm2,
            exact: None,
            source: "Poisson-Boltzmann problem with delta = 1/4 and s(1) = 0",
        },
        Raw {
            label: "radial stress in a circular elastic membrane",
            m: 3.0,
            n: 0.0,
            boundary: (1.0, 0.0, 2.0),
            f: "2/s^2",
            alpha0: "2",
            beta0: "2 + (1 - x^2)/9",
            l: 19.0 / 36.0,
            theorem: Theorem::Thm1,
            exact: None,
            source: "normal-pressure membrane problem with gamma0 = 2, so s(1) = 2",
        },
        Raw {
            label: "Lane-Emden, gamma = 5",
            m: 2.0,
            n: 0.0,
            boundary: (1.0, 0.0, 0.75f64.sqrt()),
            f: "s^5",
            alpha0: "3/4",
            beta0: "(0.7 + x^2/2)^(-1/2)",
            l: 1.58203125,
            theorem: Theorem::Thm2,
            exact: Some("(1 + x^2/3)^(-1/2)"),
            source: "Lane-Emden equation of index 5 with s(1) = sqrt(3/4)",
        },
        Raw {
            label: "heat source in the human head",
            m: 2.0,
            n: 0.0,
            boundary: (2.0, 1.0, 0.0),
            f: "exp(-s)",
            alpha0: "0",
            beta0: "2 - x^2",
            l: e * e,
            theorem: Theorem::Thm1,
            exact: None,
            source: "thermal distribution model with 2 s(1) + s'(1) = 0",
        },
    ]
}

/// All six entries, numbered from 1.
pub fn catalog() -> Vec<CatalogEntry> {
    raw_entries()
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let (a1, a2, c) = r.boundary;
            let problem = ProblemSpec::from_expr(r.label, r.m, r.n, BoundaryForm::new(a1, a2, c), r.f)
                .expect("catalog source expressions parse")
                .with_lipschitz(r.l);
            CatalogEntry {
                index: i + 1,
                problem,
                alpha0_expr: r.alpha0,
                beta0_expr: r.beta0,
                alpha0: compile_x_expr(r.alpha0).expect("catalog expressions parse"),
                beta0: compile_x_expr(r.beta0).expect("catalog expressions parse"),
                published_l: r.l,
                published_theorem: r.theorem,
                exact_expr: r.exact,
                exact_solution: r.exact.map(|src| compile_x_expr(src).expect("catalog expressions parse")),
                source: r.source,
            }
        })
        .collect()
}

/// Entry `index` (1-based).
pub fn catalog_entry(index: usize) -> Option<CatalogEntry> {
    catalog().into_iter().nth(index.checked_sub(1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_entries_with_published_constants() {
        let c = catalog();
        assert_eq!(c.len(), 6);
        assert_eq!(c[2].problem.boundary.c, 0.0);
        assert_eq!(c[3].problem.boundary.c, 2.0);
        assert_eq!(c[4].published_l, 1.58203125);
        assert!(catalog_entry(0).is_none() && catalog_entry(7).is_none());
    }

    #[test]
    fn lane_emden_exact_solution_meets_boundary() {
        let e = catalog_entry(5).unwrap();
        let s = e.exact_solution.unwrap();
        assert!((s(1.0) - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(s(0.0), 1.0);
    }

    #[test]
    fn starting_functions_match_text() {
        let e = catalog_entry(4).unwrap();
        assert_eq!((e.beta0)(0.0), 2.0 + 1.0 / 9.0);
        assert_eq!((e.alpha0)(0.3), 2.0);
    }
}
