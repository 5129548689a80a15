//! Job file schema and its resolution into core objects.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use opkit_core::backend::sample::{random_vector, rng, small_integer};
use opkit_core::backend::{
    make_truncated_derivative_instance, vector_from_strings, zero_vector, Matrix, OperatorInstance,
    Vector,
};
use opkit_core::certify::{Certificate, DualCertificate, FactoredOperator, UnivariateSpec};
use opkit_core::groebner::Buchberger;
use opkit_core::planner::IndexSet;
use opkit_core::poly::{integer, parse_rational};
use opkit_core::{Error, ErrorKind, MonomialOrder, Polynomial, Variables, DEFAULT_TERM_CAP};

/// Failure of a CLI run, carrying the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Resource => 3,
                ErrorKind::Verification => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plan,
    Certify,
    Reduce,
    Verify,
    Symmetry,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrderName {
    Lex,
    Grlex,
    Grevlex,
}

impl From<OrderName> for MonomialOrder {
    fn from(o: OrderName) -> Self {
        match o {
            OrderName::Lex => MonomialOrder::Lex,
            OrderName::Grlex => MonomialOrder::GrLex,
            OrderName::Grevlex => MonomialOrder::GrevLex,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSpec {
    TruncatedDerivative {
        k: usize,
        max_degree: u32,
    },
    /// One rational-string grid per variable.
    Matrices(Vec<Vec<Vec<String>>>),
}

/// A vector given explicitly, as a polynomial expression, or by keyword.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum VectorSpec {
    Values(Vec<String>),
    Expression { expression: String },
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub set: IndexSet,
    pub cofactor: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualEntry {
    pub set: IndexSet,
    pub cofactors: BTreeMap<usize, String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificatesSpec {
    #[serde(default)]
    pub alpha: Option<Vec<AlphaEntry>>,
    #[serde(default)]
    pub dual: Option<Vec<DualEntry>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub variables: Option<Vec<String>>,
    #[serde(default)]
    pub factors: Option<Vec<String>>,
    #[serde(default)]
    pub lambdas: Option<Vec<String>>,
    #[serde(default)]
    pub order: Option<OrderName>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub instance: Option<InstanceSpec>,
    #[serde(default)]
    pub f: Option<VectorSpec>,
    #[serde(default)]
    pub constraints: Option<Vec<String>>,
    #[serde(default)]
    pub g: Option<Vec<VectorSpec>>,
    #[serde(default)]
    pub symmetries: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    pub generation: Option<bool>,
    #[serde(default)]
    pub certificates: Option<CertificatesSpec>,
}

impl JobSpec {
    pub fn load(path: &Path) -> CliResult<JobSpec> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

/// Command-line overrides applied on top of the job file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub order: Option<OrderName>,
    pub seed: Option<u64>,
    pub term_cap: Option<usize>,
}

/// Parsed job: variables, factors and engine settings.
pub struct Context {
    pub job: JobSpec,
    pub vars: Variables,
    pub ops: FactoredOperator,
    pub univariate: Option<UnivariateSpec>,
    pub engine: Buchberger,
    pub term_cap: usize,
    pub seed: u64,
}

impl Context {
    pub fn new(job: JobSpec, mode: Mode, overrides: Overrides) -> CliResult<Context> {
        if let Some(m) = job.mode {
            if m != mode {
                return Err(CliError::Input(format!(
                    "job file is for mode {m:?}, command is {mode:?}"
                )));
            }
        }
        let vars = match (&job.variables, &job.lambdas) {
            (Some(names), _) => Variables::new(names)?,
            (None, Some(_)) => Variables::new(["x"])?,
            (None, None) => return Err(CliError::Input("`variables` is required".into())),
        };
        let (factors, univariate) = match (&job.factors, &job.lambdas) {
            (Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "give either `factors` or `lambdas`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(CliError::Input("`factors` or `lambdas` is required".into()))
            }
            (Some(list), None) => (
                list.iter()
                    .map(|s| vars.parse(s))
                    .collect::<Result<Vec<_>, _>>()?,
                None,
            ),
            (None, Some(list)) => {
                if vars.len() != 1 {
                    return Err(CliError::Input(
                        "`lambdas` requires exactly one variable".into(),
                    ));
                }
                let lambdas = list
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<_>, _>>()?;
                let spec = UnivariateSpec::new(lambdas)?;
                (spec.operator().factors().to_vec(), Some(spec))
            }
        };
        let ops = FactoredOperator::new(factors)?;
        let order = overrides.order.or(job.order).unwrap_or(OrderName::Grevlex);
        let term_cap = overrides.term_cap.unwrap_or(DEFAULT_TERM_CAP);
        let engine = Buchberger::new(order.into()).with_term_cap(term_cap);
        let seed = overrides.seed.or(job.seed).unwrap_or(0);
        Ok(Context {
            job,
            vars,
            ops,
            univariate,
            engine,
            term_cap,
            seed,
        })
    }

    pub fn order_name(&self) -> &'static str {
        self.engine.order.name()
    }

    pub fn factor_strings(&self) -> Vec<String> {
        self.ops
            .factors()
            .iter()
            .map(|p| self.vars.format(p))
            .collect()
    }

    pub fn instance(&self) -> CliResult<Option<OperatorInstance>> {
        let Some(spec) = &self.job.instance else {
            return Ok(None);
        };
        let inst = match spec {
            InstanceSpec::TruncatedDerivative { k, max_degree } => {
                make_truncated_derivative_instance(*k, *max_degree)?
            }
            InstanceSpec::Matrices(grids) => OperatorInstance::new(
                grids
                    .iter()
                    .map(|g| Matrix::from_string_grid(g))
                    .collect::<Result<_, _>>()?,
            )?,
        };
        if inst.nvars() != self.vars.len() {
            return Err(CliError::Core(Error::VariableCountMismatch {
                left: self.vars.len(),
                right: inst.nvars(),
            }));
        }
        Ok(Some(inst))
    }

    pub fn require_instance(&self) -> CliResult<OperatorInstance> {
        self.instance()?
            .ok_or_else(|| CliError::Input("this command needs an `instance`".into()))
    }

    pub fn constraints(&self) -> CliResult<Vec<Polynomial>> {
        let list = self
            .job
            .constraints
            .as_ref()
            .ok_or_else(|| CliError::Input("`constraints` is required".into()))?;
        Ok(list
            .iter()
            .map(|s| self.vars.parse(s))
            .collect::<Result<_, _>>()?)
    }

    pub fn supplied_alpha(&self) -> CliResult<Option<Certificate>> {
        let Some(entries) = self
            .job
            .certificates
            .as_ref()
            .and_then(|c| c.alpha.as_ref())
        else {
            return Ok(None);
        };
        let mut map = BTreeMap::new();
        for e in entries {
            if map.insert(e.set, self.vars.parse(&e.cofactor)?).is_some() {
                return Err(CliError::Input(format!("set {} listed twice", e.set)));
            }
        }
        Ok(Some(Certificate::new(self.ops.ground(), map)?))
    }

    pub fn supplied_dual(&self) -> CliResult<Option<DualCertificate>> {
        let Some(entries) = self.job.certificates.as_ref().and_then(|c| c.dual.as_ref()) else {
            return Ok(None);
        };
        let mut map = BTreeMap::new();
        for e in entries {
            let row = e
                .cofactors
                .iter()
                .map(|(i, q)| Ok((*i, self.vars.parse(q)?)))
                .collect::<CliResult<BTreeMap<_, _>>>()?;
            if map.insert(e.set, row).is_some() {
                return Err(CliError::Input(format!("set {} listed twice", e.set)));
            }
        }
        Ok(Some(DualCertificate::new(self.ops.ground(), map)?))
    }

    pub fn supplied_symmetries(&self) -> CliResult<Vec<Matrix>> {
        let grids = self.job.symmetries.as_deref().unwrap_or_default();
        Ok(grids
            .iter()
            .map(|g| Matrix::from_string_grid(g))
            .collect::<Result<_, _>>()?)
    }
}

/// Resolves a vector spec on an instance.
///
/// `random` draws a polynomial of degree at most 3 on monomial-basis
/// instances and a small integer vector otherwise; `random_range` draws
/// `p u` for a random `u`; `zero` is the zero vector.
pub fn resolve_vector(
    spec: &VectorSpec,
    inst: &OperatorInstance,
    vars: &Variables,
    p: &Matrix,
    seed: u64,
) -> CliResult<Vector> {
    let n = inst.dimension();
    let mut r = rng(seed);
    match spec {
        VectorSpec::Values(values) => {
            let v = vector_from_strings(values)?;
            if v.len() != n {
                return Err(CliError::Core(Error::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                }));
            }
            Ok(v)
        }
        VectorSpec::Expression { expression } => Ok(inst.encode(&vars.parse(expression)?)?),
        VectorSpec::Keyword(k) => match k.as_str() {
            "zero" => Ok(zero_vector(n)),
            "random" => Ok(match inst.monomial_basis() {
                Some(basis) => basis
                    .iter()
                    .map(|m| {
                        if m.degree() <= 3 {
                            small_integer(&mut r, 5)
                        } else {
                            integer(0)
                        }
                    })
                    .collect(),
                None => random_vector(&mut r, n, 5),
            }),
            "random_range" => Ok(p.mul_vec(&random_vector(&mut r, n, 5))?),
            other => Err(CliError::Input(format!(
                "unknown vector keyword `{other}` (expected zero, random or random_range)"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(json: &str) -> JobSpec {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn lambdas_default_to_one_variable() {
        let ctx = Context::new(
            job(r#"{"lambdas": ["1", "-2"]}"#),
            Mode::Certify,
            Overrides::default(),
        )
        .unwrap();
        assert_eq!(ctx.vars.names(), ["x"]);
        assert_eq!(ctx.factor_strings(), ["x + 1", "x - 2"]);
    }

    #[test]
    fn mode_mismatch_and_missing_fields_are_input_errors() {
        let e = Context::new(
            job(r#"{"mode": "plan", "variables": ["x"], "factors": ["x"]}"#),
            Mode::Reduce,
            Overrides::default(),
        );
        assert_eq!(e.err().unwrap().exit_code(), 2);
        let e = Context::new(
            job(r#"{"variables": ["x"]}"#),
            Mode::Plan,
            Overrides::default(),
        );
        assert_eq!(e.err().unwrap().exit_code(), 2);
        let e = Context::new(
            job(r#"{"lambdas": ["1", "1"]}"#),
            Mode::Plan,
            Overrides::default(),
        );
        assert_eq!(e.err().unwrap().exit_code(), 2);
    }

    #[test]
    fn overrides_take_precedence() {
        let o = Overrides {
            order: Some(OrderName::Lex),
            seed: Some(9),
            term_cap: Some(50),
        };
        let ctx = Context::new(
            job(r#"{"variables": ["x"], "factors": ["x"], "order": "grlex", "seed": 1}"#),
            Mode::Plan,
            o,
        )
        .unwrap();
        assert_eq!(ctx.order_name(), "lex");
        assert_eq!(ctx.seed, 9);
        assert_eq!(ctx.engine.term_cap, 50);
    }

    #[test]
    fn vectors_resolve_on_instances() {
        let vars = Variables::new(["x", "y"]).unwrap();
        let inst = make_truncated_derivative_instance(2, 3).unwrap();
        let p = Matrix::identity(inst.dimension());
        let by_expr = resolve_vector(
            &VectorSpec::Expression {
                expression: "x*y + 1".into(),
            },
            &inst,
            &vars,
            &p,
            0,
        )
        .unwrap();
        assert_eq!(
            inst.decode(&by_expr).unwrap(),
            vars.parse("x*y + 1").unwrap()
        );
        let zero =
            resolve_vector(&VectorSpec::Keyword("zero".into()), &inst, &vars, &p, 0).unwrap();
        assert_eq!(zero, zero_vector(6));
        let short = resolve_vector(&VectorSpec::Values(vec!["1".into()]), &inst, &vars, &p, 0);
        assert_eq!(short.err().unwrap().exit_code(), 2);
        let bad = resolve_vector(&VectorSpec::Keyword("lots".into()), &inst, &vars, &p, 0);
        assert!(matches!(bad, Err(CliError::Input(_))));
    }

    #[test]
    fn random_vectors_depend_only_on_the_seed() {
        let vars = Variables::new(["x", "y"]).unwrap();
        let inst = make_truncated_derivative_instance(2, 5).unwrap();
        let p = Matrix::identity(inst.dimension());
        let spec = VectorSpec::Keyword("random".into());
        let a = resolve_vector(&spec, &inst, &vars, &p, 4).unwrap();
        assert_eq!(a, resolve_vector(&spec, &inst, &vars, &p, 4).unwrap());
        assert!(inst.decode(&a).unwrap().total_degree().unwrap_or(0) <= 3);
    }
}
