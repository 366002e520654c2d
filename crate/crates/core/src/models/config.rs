//! Model family configuration.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The five supported regression families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Ols,
    Ridge,
    Lasso,
    Krr,
    Mlp,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ols => "ols",
            Family::Ridge => "ridge",
            Family::Lasso => "lasso",
            Family::Krr => "krr",
            Family::Mlp => "mlp",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ols" | "lr" => Ok(Family::Ols),
            "ridge" => Ok(Family::Ridge),
            "lasso" => Ok(Family::Lasso),
            "krr" => Ok(Family::Krr),
            "mlp" => Ok(Family::Mlp),
            other => Err(Error::invalid(format!("unknown model family {other:?}"))),
        }
    }
}

/// Gaussian kernel bandwidth: a fixed value or the median pairwise training
/// distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bandwidth {
    MedianHeuristic,
    Fixed(f64),
}

/// Full configuration for any model family; family-specific fields are
/// validated at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub family: Family,
    /// Regularization strength (ridge/lasso/krr); 0 is legal.
    pub lambda: f64,
    /// KRR only.
    pub kernel_bandwidth: Bandwidth,
    /// MLP only; the reference configuration uses 10.
    pub hidden_units: usize,
    /// L1 penalty on the hidden layer's weights and bias (MLP only).
    pub l1_hidden: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Convergence threshold for iterative solvers.
    pub tolerance: f64,
    /// Sweep budget for LASSO coordinate descent.
    pub max_sweeps: usize,
}

impl ModelConfig {
    pub fn ols() -> Self {
        ModelConfig {
            family: Family::Ols,
            lambda: 0.0,
            ..Self::base()
        }
    }

    pub fn ridge(lambda: f64) -> Self {
        ModelConfig {
            family: Family::Ridge,
            lambda,
            ..Self::base()
        }
    }

    pub fn lasso(lambda: f64) -> Self {
        ModelConfig {
            family: Family::Lasso,
            lambda,
            ..Self::base()
        }
    }

    pub fn krr(lambda: f64, kernel_bandwidth: Bandwidth) -> Self {
        ModelConfig {
            family: Family::Krr,
            lambda,
            kernel_bandwidth,
            ..Self::base()
        }
    }

    pub fn mlp(hidden_units: usize, l1_hidden: f64, epochs: usize, learning_rate: f64, seed: u64) -> Self {
        ModelConfig {
            family: Family::Mlp,
            hidden_units,
            l1_hidden,
            epochs,
            learning_rate,
            seed,
            ..Self::base()
        }
    }

    fn base() -> Self {
        ModelConfig {
            family: Family::Ols,
            lambda: 0.0,
            kernel_bandwidth: Bandwidth::MedianHeuristic,
            hidden_units: 10,
            l1_hidden: 0.0,
            epochs: 2000,
            learning_rate: 0.05,
            seed: 0,
            tolerance: 1e-7,
            max_sweeps: 10_000,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda < 0.0 {
            return Err(Error::invalid("lambda must be nonnegative"));
        }
        if self.tolerance <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        match self.family {
            Family::Krr => {
                if let Bandwidth::Fixed(b) = self.kernel_bandwidth {
                    if b <= 0.0 {
                        return Err(Error::invalid("kernel bandwidth must be positive"));
                    }
                }
            }
            Family::Mlp => {
                if self.hidden_units == 0 {
                    return Err(Error::invalid("hidden_units must be ≥ 1"));
                }
                if self.epochs == 0 {
                    return Err(Error::invalid("epochs must be ≥ 1"));
                }
                if self.learning_rate <= 0.0 {
                    return Err(Error::invalid("learning rate must be positive"));
                }
                if self.l1_hidden < 0.0 {
                    return Err(Error::invalid("l1_hidden must be nonnegative"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_catches_bad_fields() {
        let mut c = ModelConfig::krr(0.1, Bandwidth::Fixed(-1.0));
        assert!(c.validate().is_err());
        c.kernel_bandwidth = Bandwidth::Fixed(1.0);
        assert!(c.validate().is_ok());
        let mut m = ModelConfig::mlp(0, 0.0, 100, 0.1, 0);
        assert!(m.validate().is_err());
        m.hidden_units = 10;
        assert!(m.validate().is_ok());
        let mut l = ModelConfig::lasso(-0.1);
        assert!(l.validate().is_err());
        l.lambda = 0.0;
        assert!(l.validate().is_ok());
    }
}
