//! Recursion skeleton: threshold arithmetic, separation refinement, reduction
//! across separations, irrelevant vertices and the end-to-end pipeline.

mod pipeline;
mod separate;

pub use pipeline::{certify_outcome, ep_pipeline, Outcome, PipelineReport, TraceEvent};
pub use separate::{
    find_irrelevant_vertex, irrelevant_vertex_candidate, reduce_across_separation,
    separate_or_models, IrrelevantMode, IrrelevantSearch, SeparateOutcome, SeparationBranch,
};

use crate::error::DEFAULT_BUDGET;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Stand-in for the grid-minor function, which is never computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kappa {
    Identity,
    Linear { a: u128, b: u128 },
}

impl Kappa {
    pub fn eval(self, g: u128) -> Option<u128> {
        match self {
            Kappa::Identity => Some(g),
            Kappa::Linear { a, b } => a.checked_mul(g)?.checked_add(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    /// Use `14h` as the side of the subgrids hosting H instead of `block`.
    pub use_paper_constants: bool,
    pub kappa: Kappa,
    /// Side of the square subgrids assumed to contain an H-model.
    pub block: usize,
    /// Accept grid models below the guaranteed orders.
    pub permissive: bool,
    pub max_depth: usize,
    /// Step cap handed to every oracle.
    pub budget: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            use_paper_constants: false,
            kappa: Kappa::Identity,
            block: 1,
            permissive: true,
            max_depth: 6,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl EngineConfig {
    /// Subgrid side `14h` and no tolerance for undersized grid models.
    pub fn full_constants() -> Self {
        EngineConfig {
            use_paper_constants: true,
            permissive: false,
            ..Default::default()
        }
    }

    /// Subgrid side for a pattern on `h` vertices.
    pub fn block_for(&self, h: usize) -> usize {
        if self.use_paper_constants {
            14 * h
        } else {
            self.block.max(1)
        }
    }

    pub fn thresholds(&self, k: usize, l: usize, h: usize) -> Thresholds {
        thresholds(k, l, h, self.block_for(h), self.kappa)
    }
}

/// Linear expression `Σ c·κ(g) + constant` in the unevaluated κ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expr {
    pub kappa: BTreeMap<u128, i128>,
    pub constant: i128,
}

impl Expr {
    pub fn constant(c: i128) -> Self {
        Expr {
            kappa: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn kappa_term(g: u128, coeff: i128) -> Self {
        let mut e = Expr::default();
        if coeff != 0 {
            e.kappa.insert(g, coeff);
        }
        e
    }

    pub fn add(&self, other: &Expr) -> Expr {
        let mut out = self.clone();
        for (&g, &c) in &other.kappa {
            let slot = out.kappa.entry(g).or_insert(0);
            *slot += c;
            if *slot == 0 {
                out.kappa.remove(&g);
            }
        }
        out.constant += other.constant;
        out
    }

    pub fn scale(&self, s: i128) -> Expr {
        if s == 0 {
            return Expr::default();
        }
        Expr {
            kappa: self.kappa.iter().map(|(&g, &c)| (g, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn eval(&self, kappa: Kappa) -> Option<u128> {
        let mut total: i128 = self.constant;
        for (&g, &c) in &self.kappa {
            let v = i128::try_from(kappa.eval(g)?).ok()?;
            total = total.checked_add(c.checked_mul(v)?)?;
        }
        u128::try_from(total).ok()
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (g, c) in &self.kappa {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{c}·κ({g})")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            write!(f, " + {}", self.constant)
        } else {
            Ok(())
        }
    }
}

/// `x = kℓ²`.
pub fn x_threshold(k: usize, l: usize) -> u128 {
    (k * l * l) as u128
}

/// `g = 2(4x² + b·x + 3x + 1)(4x² + 1) + x` with `b` the subgrid side.
pub fn g_threshold(k: usize, l: usize, block: usize) -> u128 {
    let x = x_threshold(k, l);
    let b = block as u128;
    2 * (4 * x * x + b * x + 3 * x + 1) * (4 * x * x + 1) + x
}

/// `f¹(ℓ) = κ(g)(h²−h+1)(k−1) + [ℓ≥2]((ℓ−1)f¹(ℓ−1) + kℓ²)` with an extra
/// `κ(g) + 1` in place of `κ(g)` when `safe`.
fn f1_with(k: usize, l: usize, h: usize, block: usize, safe: bool) -> Expr {
    let hh = (h * h - h + 1) as i128;
    let km = k.saturating_sub(1) as i128;
    let mut f = Expr::default();
    for j in 1..=l {
        let g = g_threshold(k, j, block);
        let mut term = Expr::kappa_term(g, hh * km);
        if safe {
            term = term.add(&Expr::constant(hh * km));
        }
        if j >= 2 {
            term = term
                .add(&f.scale(j as i128 - 1))
                .add(&Expr::constant((k * j * j) as i128));
        }
        f = term;
    }
    f
}

pub fn f1_symbolic(k: usize, l: usize, h: usize, block: usize) -> Expr {
    f1_with(k, l, h, block, false)
}

/// `f¹` with `κ(g)+1` in the leading factor, the bag-size form of the
/// bounded-treewidth bound.
pub fn f1_safe_symbolic(k: usize, l: usize, h: usize, block: usize) -> Expr {
    f1_with(k, l, h, block, true)
}

/// `f = ℓ·f¹ + kℓ²`.
pub fn f_symbolic(k: usize, l: usize, h: usize, block: usize) -> Expr {
    f1_symbolic(k, l, h, block)
        .scale(l as i128)
        .add(&Expr::constant((k * l * l) as i128))
}

pub fn f_safe_symbolic(k: usize, l: usize, h: usize, block: usize) -> Expr {
    f1_safe_symbolic(k, l, h, block)
        .scale(l as i128)
        .add(&Expr::constant((k * l * l) as i128))
}

/// Threshold values for one `(k, ℓ, h)`; `None` marks overflow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub x: u128,
    pub g: u128,
    pub f1: String,
    pub f: String,
    pub f1_value: Option<u128>,
    pub f_value: Option<u128>,
    pub f_safe_value: Option<u128>,
}

pub fn thresholds(k: usize, l: usize, h: usize, block: usize, kappa: Kappa) -> Thresholds {
    let f1 = f1_symbolic(k, l, h, block);
    let f = f_symbolic(k, l, h, block);
    Thresholds {
        x: x_threshold(k, l),
        g: g_threshold(k, l, block),
        f1_value: f1.eval(kappa),
        f_value: f.eval(kappa),
        f_safe_value: f_safe_symbolic(k, l, h, block).eval(kappa),
        f1: f1.to_string(),
        f: f.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed form of the `f¹` recursion, unrolled as a sum over levels.
    fn f1_closed(k: usize, l: usize, h: usize, block: usize) -> Expr {
        let hh = (h * h - h + 1) as i128;
        let mut total = Expr::default();
        for j in 1..=l {
            let weight: i128 = (j + 1..=l).map(|i| i as i128 - 1).product();
            let mut term = Expr::kappa_term(g_threshold(k, j, block), hh * (k as i128 - 1));
            if j >= 2 {
                term = term.add(&Expr::constant((k * j * j) as i128));
            }
            total = total.add(&term.scale(weight));
        }
        total
    }

    #[test]
    fn identities_hold_symbolically() {
        for h in 1..=3 {
            for k in 1..=5 {
                for l in 1..=5 {
                    let b = 14 * h;
                    assert_eq!(x_threshold(k, l), (k * l * l) as u128);
                    let f1 = f1_symbolic(k, l, h, b);
                    assert_eq!(f1, f1_closed(k, l, h, b), "k={k} l={l} h={h}");
                    let f = f_symbolic(k, l, h, b);
                    assert_eq!(
                        f,
                        f1.scale(l as i128)
                            .add(&Expr::constant((k * l * l) as i128))
                    );
                    if l >= 2 {
                        let rec = Expr::kappa_term(
                            g_threshold(k, l, b),
                            ((h * h - h + 1) * (k - 1)) as i128,
                        )
                        .add(&f1_symbolic(k, l - 1, h, b).scale(l as i128 - 1))
                        .add(&Expr::constant((k * l * l) as i128));
                        assert_eq!(f1, rec);
                    }
                }
            }
        }
    }

    #[test]
    fn small_values() {
        // k=1 kills every κ term, leaving Σ kj² weighted by the unrolled products.
        assert_eq!(f1_symbolic(1, 1, 1, 14).eval(Kappa::Identity), Some(0));
        assert_eq!(f1_symbolic(1, 2, 1, 14).eval(Kappa::Identity), Some(4));
        assert_eq!(
            f1_symbolic(1, 3, 1, 14).eval(Kappa::Identity),
            Some(2 * 4 + 9)
        );
        assert_eq!(g_threshold(1, 1, 14), 2 * (4 + 14 + 3 + 1) * 5 + 1);
        let e = f1_symbolic(2, 1, 1, 14);
        assert_eq!(
            e.eval(Kappa::Linear { a: 2, b: 1 }),
            Some(2 * g_threshold(2, 1, 14) + 1)
        );
        assert_eq!(
            f1_safe_symbolic(2, 1, 1, 14).eval(Kappa::Identity),
            Some(g_threshold(2, 1, 14) + 1)
        );
    }

    #[test]
    fn thresholds_monotone_in_k() {
        for l in 1..=4 {
            for k in 1..5 {
                assert!(x_threshold(k, l) < x_threshold(k + 1, l));
                assert!(g_threshold(k, l, 14) < g_threshold(k + 1, l, 14));
                let a = f_symbolic(k, l, 2, 28).eval(Kappa::Identity).unwrap();
                let b = f_symbolic(k + 1, l, 2, 28).eval(Kappa::Identity).unwrap();
                assert!(a < b);
            }
        }
    }
}
