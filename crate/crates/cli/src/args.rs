use clap::{Args, Parser, Subcommand, ValueEnum};
use qhs_core::numeval::DEFAULT_PRECISION;
use qhs_core::scalar::parse_rational;
use qhs_core::Rational;

#[derive(Parser, Debug)]
#[command(
    name = "qhs",
    version,
    about = "Discrete q-Hermite I polynomials and their Sobolev-type modification: exact tables, identity checks, plot data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coefficients of H_n(x;q) with the recurrence coefficients and normalized norms
    Classical(ClassicalArgs),
    /// Coefficients of the Sobolev-type polynomials
    Sobolev(SobolevArgs),
    /// Check structural identities exactly; exits 1 on any nonzero residual
    Verify(VerifyArgs),
    /// Evaluate polynomials on a uniform grid (data for plotting)
    PlotData(PlotArgs),
    /// Gram matrix under the Sobolev inner product
    Gram(GramArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Comma-separated indices and inclusive ranges, e.g. `0..5` or `1,3,7..9`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

fn index_list(s: &str) -> Result<IndexList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|e| format!("{part:?}: {e}"))?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{part:?}: {e}"))?;
            if a > b {
                return Err(format!("{part:?}: empty range"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|e| format!("{part:?}: {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("the index list is empty".into());
    }
    Ok(IndexList(out))
}

#[derive(Args, Debug)]
pub struct ClassicalArgs {
    /// Base q in (0, 1), as p/q or a decimal
    #[arg(long, value_parser = rational)]
    pub q: Rational,
    #[arg(long)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Base q in (0, 1)
    #[arg(long, value_parser = rational)]
    pub q: Rational,
    /// Mass point, |alpha| > 1
    #[arg(long, value_parser = rational, allow_hyphen_values = true)]
    pub alpha: Rational,
    /// Derivative order in the discrete part of the inner product
    #[arg(long)]
    pub j: usize,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct MassArgs {
    /// Mass λ on the inner-product scale; converted to the scaled mass numerically
    #[arg(long, value_parser = rational)]
    pub lambda: Option<Rational>,
    /// Scaled mass used by the exact layer
    #[arg(long, value_parser = rational)]
    pub lambda_hat: Option<Rational>,
}

#[derive(Args, Debug, Clone)]
pub struct PrecisionArgs {
    /// Significant decimal digits for numeric output
    #[arg(long, env = "QHS_PRECISION", default_value_t = DEFAULT_PRECISION)]
    pub precision: u64,
    /// Significant digits kept when rounding the scaled mass obtained from --lambda
    #[arg(long, default_value_t = 40)]
    pub lambda_digits: u64,
}

#[derive(Args, Debug)]
pub struct SobolevArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub mass: MassArgs,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Scaled mass (exact rational)
    #[arg(long, value_parser = rational)]
    pub lambda_hat: Rational,
    #[arg(long)]
    pub n_max: usize,
    /// `all` or a comma-separated list of identity names
    #[arg(long, default_value = "all")]
    pub checks: String,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Doubles γ_N before building the family, to exercise failure reporting
    #[arg(long, hide = true)]
    pub corrupt_gamma: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub mass: MassArgs,
    /// Indices to tabulate, e.g. `0..5` or `0,2,4`
    #[arg(long, value_parser = index_list)]
    pub n_list: IndexList,
    #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "-1")]
    pub x_min: Rational,
    #[arg(long, value_parser = rational, allow_hyphen_values = true, default_value = "1")]
    pub x_max: Rational,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct GramArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub mass: MassArgs,
    #[arg(long)]
    pub n_max: usize,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    /// Largest accepted relative off-diagonal entry
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_lists() {
        assert_eq!(index_list("0..3").unwrap(), IndexList(vec![0, 1, 2, 3]));
        assert_eq!(index_list("1, 4,6..=7").unwrap(), IndexList(vec![1, 4, 6, 7]));
        assert!(index_list("").is_err());
        assert!(index_list("5..2").is_err());
        assert!(index_list("x").is_err());
    }
}
