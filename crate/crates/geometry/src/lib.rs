//! Exact Wirtinger calculus on the affine chart of the complex Grassmannian:
//! expression trees, the Kahler metric from the potential log det B, exact
//! inverse metric, D operators, and curvature.

mod chart;
mod expr;

pub use chart::{
    apply_multi_d, apply_multi_d_cached, build_chart, curvature_constant,
    curvature_from_potential, curvature_from_potential_cached, d_bar, d_bar_cached, d_up,
    d_up_cached, inv_metric_entry, metric_entry, potential_first_deriv, potential_value_f64,
    random_point, random_regular_point, GrassmannChart,
};
pub use expr::{
    eval_exact, eval_expr, eval_f64, wirtinger_d, DiffCache, EvalMode, EvalOut, ExactEvaluator,
    Expr, ExprNode, Point, Var,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("expression is singular at the evaluation point")]
    EvalSingular,
}
