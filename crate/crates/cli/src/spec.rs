//! Textual specs accepted on the command line.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::CliError;

/// Built-in test problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    /// `poisson:<m>` or `poisson:<m_x>x<m_y>` (grid points including boundary).
    Poisson { m_x: usize, m_y: usize },
    /// `helmholtz:<m>`.
    Helmholtz { m: usize },
}

impl FromStr for ProblemSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Config(format!("bad problem '{s}' (expected poisson:<m>, poisson:<mx>x<my> or helmholtz:<m>)"));
        let (kind, size) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "poisson" => {
                let (mx, my) = match size.split_once('x') {
                    Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
                    None => {
                        let m = size.parse().map_err(|_| bad())?;
                        (m, m)
                    }
                };
                Ok(ProblemSpec::Poisson { m_x: mx, m_y: my })
            }
            "helmholtz" => Ok(ProblemSpec::Helmholtz { m: size.parse().map_err(|_| bad())? }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Poisson { m_x, m_y } => write!(f, "poisson:{m_x}x{m_y}"),
            ProblemSpec::Helmholtz { m } => write!(f, "helmholtz:{m}"),
        }
    }
}

/// How the unknowns are split into owned sets.
#[derive(Debug, Clone, PartialEq)]
pub enum PartitionSpec {
    Band,
    Greedy,
    /// `file:<path>`: owned sets and overlap read from a partition file.
    File(PathBuf),
}

impl FromStr for PartitionSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "band" => Ok(PartitionSpec::Band),
            "greedy" => Ok(PartitionSpec::Greedy),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(PartitionSpec::File(PathBuf::from(p))),
                _ => Err(CliError::Config(format!("bad partition '{s}' (expected band, greedy or file:<path>)"))),
            },
        }
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionSpec::Band => f.write_str("band"),
            PartitionSpec::Greedy => f.write_str("greedy"),
            PartitionSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Coarse interface basis for ARAS/ARAS2.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    /// `random:<q>[,<seed>]`: `q` random vectors split over subdomains.
    Random { q: usize, seed: u64 },
    /// `svd:<q>[,<tol>]`: SVD of a `q + 2`-sweep RAS trace on the actual problem.
    Svd { q: usize, tol: f64 },
    /// `analytic-eigen:<k>`: `k` dominant eigenvectors of the assembled interface operator.
    AnalyticEigen { k: usize },
    /// `full`: the whole interface (exact coarse operator).
    Full,
    /// `file:<path>`: a space saved by an earlier run.
    File(PathBuf),
}

impl FromStr for BasisSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || {
            CliError::Config(format!(
                "bad basis '{s}' (expected random:<q>[,<seed>], svd:<q>[,<tol>], analytic-eigen:<k>, full or file:<path>)"
            ))
        };
        if s == "full" {
            return Ok(BasisSpec::Full);
        }
        let (kind, args) = s.split_once(':').ok_or_else(bad)?;
        let mut parts = args.split(',');
        let first = parts.next().unwrap_or("");
        let second = parts.next();
        if parts.next().is_some() {
            return Err(bad());
        }
        let count = || first.parse::<usize>().map_err(|_| bad());
        match kind {
            "random" => Ok(BasisSpec::Random { q: count()?, seed: second.map_or(Ok(0), |v| v.parse().map_err(|_| bad()))? }),
            "svd" => Ok(BasisSpec::Svd {
                q: count()?,
                tol: second.map_or(Ok(aras_core::aitken::DEFAULT_SVD_TOL), |v| v.parse().map_err(|_| bad()))?,
            }),
            "analytic-eigen" if second.is_none() => Ok(BasisSpec::AnalyticEigen { k: count()? }),
            "file" if !args.is_empty() => Ok(BasisSpec::File(PathBuf::from(args))),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSpec::Random { q, seed } => write!(f, "random:{q},{seed}"),
            BasisSpec::Svd { q, tol } => write!(f, "svd:{q},{tol:e}"),
            BasisSpec::AnalyticEigen { k } => write!(f, "analytic-eigen:{k}"),
            BasisSpec::Full => f.write_str("full"),
            BasisSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problems() {
        assert_eq!("poisson:32".parse::<ProblemSpec>().unwrap(), ProblemSpec::Poisson { m_x: 32, m_y: 32 });
        assert_eq!("poisson:10x12".parse::<ProblemSpec>().unwrap(), ProblemSpec::Poisson { m_x: 10, m_y: 12 });
        assert_eq!("helmholtz:164".parse::<ProblemSpec>().unwrap(), ProblemSpec::Helmholtz { m: 164 });
        for bad in ["poisson", "poisson:x", "laplace:3", "helmholtz:3x3"] {
            assert!(bad.parse::<ProblemSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn bases() {
        assert_eq!("random:8".parse::<BasisSpec>().unwrap(), BasisSpec::Random { q: 8, seed: 0 });
        assert_eq!("random:8,3".parse::<BasisSpec>().unwrap(), BasisSpec::Random { q: 8, seed: 3 });
        assert_eq!("svd:24".parse::<BasisSpec>().unwrap(), BasisSpec::Svd { q: 24, tol: 1e-12 });
        assert_eq!("svd:24,1e-8".parse::<BasisSpec>().unwrap(), BasisSpec::Svd { q: 24, tol: 1e-8 });
        assert_eq!("analytic-eigen:30".parse::<BasisSpec>().unwrap(), BasisSpec::AnalyticEigen { k: 30 });
        assert_eq!("full".parse::<BasisSpec>().unwrap(), BasisSpec::Full);
        for bad in ["svd", "svd:x", "random:1,2,3", "analytic-eigen:3,4", "eigen:3", "file:"] {
            assert!(bad.parse::<BasisSpec>().is_err(), "{bad}");
        }
        for s in ["random:8,3", "analytic-eigen:30", "full"] {
            assert_eq!(s.parse::<BasisSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn partitions() {
        assert_eq!("greedy".parse::<PartitionSpec>().unwrap(), PartitionSpec::Greedy);
        assert_eq!("file:p.txt".parse::<PartitionSpec>().unwrap(), PartitionSpec::File("p.txt".into()));
        assert!("metis".parse::<PartitionSpec>().is_err());
    }
}
