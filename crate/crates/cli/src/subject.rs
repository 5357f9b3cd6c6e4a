//! Subject specifications for `records` and `exponent`.
//!
//! | spec                          | subject                                   |
//! |-------------------------------|-------------------------------------------|
//! | `golden`                      | the golden line `span{(1, g)}`            |
//! | `algebraic:N`                 | `span{(1, α, …, α^{N−1})}`, `2 ≤ N ≤ 6`   |
//! | `rational:1,1;0,2`            | span of integer vectors                   |
//! | `subspace:0.1,2,3;1,0,0`      | span of real vectors                      |
//! | `theta:2x1:0.3,0.7`           | matrix `Θ`, entries row-major             |
//! | `random_theta:2x1`            | `sample_theta` with `theta_bound`, `seed` |
//! | `random_subspace:3x2`         | random 2-dimensional subspace of `ℝ³`     |

use badapprox::constructions::{
    algebraic_power_line, golden_line, rational_subspace, sample_subspace, sample_theta,
};
use badapprox::engine::Subject;
use badapprox::geometry::{orthonormal_subspace, ThetaMatrix};

use crate::config::ExperimentConfig;
use crate::CliError;

fn bad(spec: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("subject '{spec}': {why}"))
}

fn shape(spec: &str, s: &str) -> Result<(usize, usize), CliError> {
    let (r, c) = s.split_once('x').ok_or_else(|| bad(spec, "expected a shape like 2x1"))?;
    let r = r.trim().parse().map_err(|e| bad(spec, e))?;
    let c = c.trim().parse().map_err(|e| bad(spec, e))?;
    Ok((r, c))
}

fn vectors<T: std::str::FromStr>(spec: &str, s: &str) -> Result<Vec<Vec<T>>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(';')
        .map(|v| v.split(',').map(|x| x.trim().parse::<T>().map_err(|e| bad(spec, e))).collect())
        .collect()
}

pub fn parse_subject(spec: &str, cfg: &ExperimentConfig) -> Result<Subject, CliError> {
    let spec = spec.trim();
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let subject = match kind {
        "golden" => Subject::Subspace(golden_line()),
        "algebraic" => {
            let degree = rest.trim().parse().map_err(|e| bad(spec, e))?;
            Subject::Subspace(algebraic_power_line(degree).map_err(|e| bad(spec, e))?)
        }
        "rational" => Subject::Subspace(rational_subspace(&vectors::<i64>(spec, rest)?).map_err(|e| bad(spec, e))?),
        "subspace" => Subject::Subspace(orthonormal_subspace(&vectors::<f64>(spec, rest)?).map_err(|e| bad(spec, e))?),
        "theta" => {
            let (dims, entries) = rest.split_once(':').ok_or_else(|| bad(spec, "expected theta:RxC:entries"))?;
            let (r, c) = shape(spec, dims)?;
            let entries = vectors::<f64>(spec, entries)?.concat();
            Subject::Theta(ThetaMatrix::from_entries(r, c, entries).map_err(|e| bad(spec, e))?)
        }
        "random_theta" => {
            let (r, c) = shape(spec, rest)?;
            Subject::Theta(sample_theta(r, c, cfg.theta_bound, cfg.seed).map_err(|e| bad(spec, e))?)
        }
        "random_subspace" => {
            let (d, k) = shape(spec, rest)?;
            Subject::Subspace(sample_subspace(d, k, cfg.seed).map_err(|e| bad(spec, e))?)
        }
        _ => return Err(bad(spec, "unknown subject kind")),
    };
    Ok(subject)
}
