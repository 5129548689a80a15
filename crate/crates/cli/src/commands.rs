//! The six subcommands. Each builds a serializable report plus a prose rendering.

use std::fmt::Write as _;

use serde::Serialize;

use opkit_core::backend::{vector_to_strings, AffineSolutionSet, Matrix, OperatorInstance, Vector};
use opkit_core::certify::{
    dual_certificate, dual_identity_residual, dual_to_alpha, true_decomposition,
    univariate_certificate, verify_certificate, verify_dual, Certificate, DualCertificate,
    FactoredOperator,
};
use opkit_core::planner::{plan, IndexSet, SetSystem};
use opkit_core::reducer::system::{
    find_system_certificate, integrability_failure, SystemReduction,
};
use opkit_core::reducer::{
    kernel_structure, reduction_report, split, KernelStructure, LinearReduction, ReductionReport,
};
use opkit_core::symmetry::{generation_check, is_formal_symmetry, SymmetryContext};
use opkit_core::Variables;

use crate::job::{resolve_vector, CliError, CliResult, Context, Mode, VectorSpec};

/// Rendered result of one command.
pub struct Output {
    pub json: String,
    pub human: String,
    /// False when some verification check in the report failed.
    pub ok: bool,
}

impl Output {
    fn new<T: Serialize>(report: &T, human: String, ok: bool) -> Output {
        Output {
            json: serde_json::to_string_pretty(report).expect("reports serialize"),
            human,
            ok,
        }
    }
}

pub fn run(mode: Mode, ctx: &Context) -> CliResult<Output> {
    match mode {
        Mode::Plan => cmd_plan(ctx),
        Mode::Certify => cmd_certify(ctx),
        Mode::Reduce => cmd_reduce(ctx),
        Mode::Verify => cmd_verify(ctx),
        Mode::Symmetry => cmd_symmetry(ctx),
        Mode::System => cmd_system(ctx),
    }
}

fn sets(s: &SetSystem) -> Vec<IndexSet> {
    s.iter().collect()
}

fn show_sets(s: &[IndexSet]) -> String {
    let inner: Vec<String> = s.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(", "))
}

// ---------------------------------------------------------------- plan

#[derive(Serialize)]
struct GraphReport {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize)]
struct PlanReport {
    command: &'static str,
    variables: Vec<String>,
    order: &'static str,
    factors: Vec<String>,
    coincidence_graph: GraphReport,
    components: Vec<Vec<usize>>,
    regrouped_factors: Vec<String>,
    beta_min: Vec<IndexSet>,
    alpha: Vec<IndexSet>,
    decomposition_available: bool,
    true_decomposition: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

const NO_DECOMPOSITION: &str =
    "no decomposition available: no subset of the factors generates the unit ideal";

fn cmd_plan(ctx: &Context) -> CliResult<Output> {
    let p = plan(ctx.ops.factors(), &ctx.engine)?;
    let report = PlanReport {
        command: "plan",
        variables: ctx.vars.names().to_vec(),
        order: ctx.order_name(),
        factors: ctx.factor_strings(),
        coincidence_graph: GraphReport {
            vertices: p.graph.vertices,
            edges: p.graph.edges.clone(),
        },
        components: p.regrouping.components.clone(),
        regrouped_factors: p
            .regrouping
            .factors
            .iter()
            .map(|q| ctx.vars.format(q))
            .collect(),
        beta_min: sets(&p.beta_min),
        alpha: sets(&p.alpha_opt),
        decomposition_available: p.decomposition_available(),
        true_decomposition: p.has_true_decomposition(),
        note: (!p.decomposition_available()).then(|| NO_DECOMPOSITION.to_string()),
    };
    let mut h = String::new();
    writeln!(h, "Factors (order {}):", report.order).unwrap();
    for (i, f) in report.factors.iter().enumerate() {
        writeln!(h, "  P_{i} = {f}").unwrap();
    }
    let edges: Vec<String> = report
        .coincidence_graph
        .edges
        .iter()
        .map(|(a, b)| format!("{a}-{b}"))
        .collect();
    writeln!(
        h,
        "Coincidence edges: {}",
        if edges.is_empty() {
            "none".into()
        } else {
            edges.join(", ")
        }
    )
    .unwrap();
    writeln!(h, "Components: {:?}", report.components).unwrap();
    for (c, q) in report.components.iter().zip(&report.regrouped_factors) {
        writeln!(h, "  group {c:?}: {q}").unwrap();
    }
    writeln!(h, "Min(beta_P) = {}", show_sets(&report.beta_min)).unwrap();
    writeln!(h, "optimal alpha = {}", show_sets(&report.alpha)).unwrap();
    if let Some(n) = &report.note {
        writeln!(h, "{n}").unwrap();
    }
    Ok(Output::new(&report, h, true))
}

// ---------------------------------------------------------------- certify

#[derive(Serialize)]
struct CofactorReport {
    set: IndexSet,
    cofactor: String,
}

#[derive(Serialize)]
struct AlphaReport {
    factors: Vec<String>,
    alpha: Vec<IndexSet>,
    cofactors: Vec<CofactorReport>,
    residual: String,
    verified: bool,
}

#[derive(Serialize)]
struct IndexedCofactor {
    index: usize,
    cofactor: String,
}

#[derive(Serialize)]
struct IdentityReport {
    set: IndexSet,
    cofactors: Vec<IndexedCofactor>,
    residual: String,
    verified: bool,
}

#[derive(Serialize)]
struct DualReport {
    beta: Vec<IndexSet>,
    identities: Vec<IdentityReport>,
    verified: bool,
}

fn alpha_report(
    cert: &Certificate,
    ops: &FactoredOperator,
    vars: &Variables,
) -> CliResult<AlphaReport> {
    let v = verify_certificate(cert, ops)?;
    Ok(AlphaReport {
        factors: ops.factors().iter().map(|p| vars.format(p)).collect(),
        alpha: sets(cert.alpha()),
        cofactors: cert
            .cofactors()
            .iter()
            .map(|(set, q)| CofactorReport {
                set: *set,
                cofactor: vars.format(q),
            })
            .collect(),
        residual: vars.format(&v.residual),
        verified: v.holds,
    })
}

fn dual_report(
    dual: &DualCertificate,
    ops: &FactoredOperator,
    vars: &Variables,
) -> CliResult<DualReport> {
    let v = verify_dual(dual, ops)?;
    let identities = dual
        .identities()
        .iter()
        .map(|(set, row)| {
            let residual = dual_identity_residual(row, ops);
            IdentityReport {
                set: *set,
                cofactors: row
                    .iter()
                    .map(|(i, q)| IndexedCofactor {
                        index: *i,
                        cofactor: vars.format(q),
                    })
                    .collect(),
                verified: residual.is_zero(),
                residual: vars.format(&residual),
            }
        })
        .collect();
    Ok(DualReport {
        beta: sets(dual.beta()),
        identities,
        verified: v.holds,
    })
}

fn render_alpha(h: &mut String, title: &str, a: &AlphaReport) {
    writeln!(
        h,
        "{title}: alpha = {} ({})",
        show_sets(&a.alpha),
        verdict(a.verified)
    )
    .unwrap();
    let terms: Vec<String> = a
        .cofactors
        .iter()
        .map(|c| format!("({})*P^{}", c.cofactor, c.set))
        .collect();
    writeln!(h, "  1 = {}", terms.join(" + ")).unwrap();
    writeln!(h, "  residual: {}", a.residual).unwrap();
}

fn render_dual(h: &mut String, d: &DualReport) {
    writeln!(
        h,
        "Dual certificate: beta = {} ({})",
        show_sets(&d.beta),
        verdict(d.verified)
    )
    .unwrap();
    for id in &d.identities {
        let terms: Vec<String> = id
            .cofactors
            .iter()
            .map(|c| format!("({})*P_{}", c.cofactor, c.index))
            .collect();
        writeln!(
            h,
            "  {}: 1 = {}  [residual {}]",
            id.set,
            terms.join(" + "),
            id.residual
        )
        .unwrap();
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "verified"
    } else {
        "FAILED"
    }
}

/// Certificates derived from the job: dual over `Min(β_P)`, the optimal α,
/// and a true decomposition of the regrouped factors.
struct Derived {
    dual: Option<DualCertificate>,
    alpha: Certificate,
    grouped: Option<(FactoredOperator, Certificate)>,
    available: bool,
}

fn derive(ctx: &Context) -> CliResult<Derived> {
    if let Some(spec) = &ctx.univariate {
        let (_, cert) = univariate_certificate(spec)?;
        return Ok(Derived {
            dual: None,
            alpha: cert,
            grouped: None,
            available: true,
        });
    }
    let p = plan(ctx.ops.factors(), &ctx.engine)?;
    if !p.decomposition_available() {
        let trivial = Certificate::new(
            ctx.ops.ground(),
            [(
                ctx.ops.universe(),
                opkit_core::Polynomial::one(ctx.ops.nvars()),
            )]
            .into(),
        )?;
        return Ok(Derived {
            dual: None,
            alpha: trivial,
            grouped: None,
            available: false,
        });
    }
    let dual = dual_certificate(&ctx.ops, &p.beta_min, &ctx.engine)?;
    let alpha = dual_to_alpha(&dual, &ctx.ops, ctx.term_cap)?;
    let grouped = if p.has_true_decomposition() && p.regrouping.factors.len() < ctx.ops.len() {
        let g = FactoredOperator::new(p.regrouping.factors.clone())?;
        let cert = true_decomposition(&g, &ctx.engine)?;
        Some((g, cert))
    } else {
        None
    };
    Ok(Derived {
        dual: Some(dual),
        alpha,
        grouped,
        available: true,
    })
}

#[derive(Serialize)]
struct CertifyReport {
    command: &'static str,
    variables: Vec<String>,
    order: &'static str,
    factors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    univariate_coefficients: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dual_certificate: Option<DualReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_certificate: Option<AlphaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_decomposition: Option<AlphaReport>,
    all_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

fn cmd_certify(ctx: &Context) -> CliResult<Output> {
    let d = derive(ctx)?;
    let dual = d
        .dual
        .as_ref()
        .map(|x| dual_report(x, &ctx.ops, &ctx.vars))
        .transpose()?;
    let alpha = d
        .available
        .then(|| alpha_report(&d.alpha, &ctx.ops, &ctx.vars))
        .transpose()?;
    let grouped = d
        .grouped
        .as_ref()
        .map(|(g, c)| alpha_report(c, g, &ctx.vars))
        .transpose()?;
    let all_verified = dual.as_ref().is_none_or(|x| x.verified)
        && alpha.as_ref().is_none_or(|x| x.verified)
        && grouped.as_ref().is_none_or(|x| x.verified);
    let report = CertifyReport {
        command: "certify",
        variables: ctx.vars.names().to_vec(),
        order: ctx.order_name(),
        factors: ctx.factor_strings(),
        univariate_coefficients: ctx.univariate.as_ref().map(|s| {
            (0..s.lambdas().len())
                .map(|i| s.coefficient(i).to_string())
                .collect()
        }),
        dual_certificate: dual,
        alpha_certificate: alpha,
        true_decomposition: grouped,
        all_verified,
        note: (!d.available).then(|| NO_DECOMPOSITION.to_string()),
    };
    let mut h = String::new();
    if let Some(c) = &report.univariate_coefficients {
        writeln!(
            h,
            "Partial-fraction coefficients alpha_i = prod_(j!=i) 1/(lambda_j - lambda_i): {}",
            c.join(", ")
        )
        .unwrap();
    }
    if let Some(x) = &report.dual_certificate {
        render_dual(&mut h, x);
    }
    if let Some(x) = &report.alpha_certificate {
        render_alpha(&mut h, "Alpha certificate", x);
    }
    if let Some(x) = &report.true_decomposition {
        writeln!(h, "Regrouped factors: {}", x.factors.join(", ")).unwrap();
        render_alpha(&mut h, "True decomposition", x);
    }
    if let Some(n) = &report.note {
        writeln!(h, "{n}").unwrap();
    }
    writeln!(h, "All certificates: {}", verdict(all_verified)).unwrap();
    Ok(Output::new(&report, h, all_verified))
}

// ---------------------------------------------------------------- reduce

#[derive(Serialize)]
struct SolutionSetReport {
    empty: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    particular: Option<Vec<String>>,
    kernel: Vec<Vec<String>>,
}

impl From<&AffineSolutionSet> for SolutionSetReport {
    fn from(s: &AffineSolutionSet) -> Self {
        let c = s.canonical();
        SolutionSetReport {
            empty: c.is_empty(),
            dimension: c.dimension(),
            particular: c.particular().map(|p| vector_to_strings(p)),
            kernel: c
                .kernel_basis()
                .iter()
                .map(|k| vector_to_strings(k))
                .collect(),
        }
    }
}

fn show_solutions(s: &SolutionSetReport) -> String {
    match s.dimension {
        None => "no solutions".into(),
        Some(d) => format!("affine space of dimension {d}"),
    }
}

#[derive(Serialize)]
struct SubproblemSolutions {
    set: IndexSet,
    solutions: SolutionSetReport,
}

#[derive(Serialize)]
struct InstanceReduceReport {
    dimension: usize,
    f: Vec<String>,
    f_in_range: bool,
    subproblems: Vec<SubproblemSolutions>,
    recombined: SolutionSetReport,
    direct: SolutionSetReport,
    agrees: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel_structure: Option<KernelStructure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

#[derive(Serialize)]
struct ReduceReport {
    command: &'static str,
    variables: Vec<String>,
    order: &'static str,
    reduction: ReductionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceReduceReport>,
}

fn operator_matrix(ctx: &Context, inst: &OperatorInstance) -> CliResult<Matrix> {
    Ok(inst.instantiate(&ctx.ops.full_product())?)
}

fn cmd_reduce(ctx: &Context) -> CliResult<Output> {
    let d = derive(ctx)?;
    let reduction = reduction_report(&d.alpha, &ctx.ops, &ctx.vars)?;
    let inst_report = match ctx.instance()? {
        None => {
            if ctx.job.f.is_some() {
                return Err(CliError::Input("`f` needs an `instance`".into()));
            }
            None
        }
        Some(inst) => {
            let p = operator_matrix(ctx, &inst)?;
            let spec = ctx
                .job
                .f
                .clone()
                .unwrap_or(VectorSpec::Keyword("random".into()));
            let f = resolve_vector(&spec, &inst, &ctx.vars, &p, ctx.seed)?;
            let out = split(&d.alpha, &ctx.ops, &ctx.vars, &f, &inst)?;
            let homogeneous = f.iter().all(|c| *c == opkit_core::poly::integer(0));
            let kernel = (homogeneous && d.alpha.is_true_decomposition())
                .then(|| kernel_structure(&d.alpha, &ctx.ops, &inst))
                .transpose()?;
            let note = if !out.in_range() {
                Some("f is not in the range of P: no solutions".to_string())
            } else if homogeneous {
                Some("f = 0: the solution set is the kernel of P".to_string())
            } else {
                None
            };
            Some(InstanceReduceReport {
                dimension: inst.dimension(),
                f: vector_to_strings(&f),
                f_in_range: out.in_range(),
                subproblems: out
                    .subproblems
                    .iter()
                    .map(|(set, s)| SubproblemSolutions {
                        set: *set,
                        solutions: s.into(),
                    })
                    .collect(),
                recombined: (&out.recombined).into(),
                direct: (&out.direct).into(),
                agrees: out.agrees(),
                kernel_structure: kernel,
                note,
            })
        }
    };
    let ok = reduction.verified
        && inst_report.as_ref().is_none_or(|r| {
            r.agrees
                && r.kernel_structure
                    .as_ref()
                    .is_none_or(KernelStructure::holds)
        });
    let report = ReduceReport {
        command: "reduce",
        variables: ctx.vars.names().to_vec(),
        order: ctx.order_name(),
        reduction,
        instance: inst_report,
    };
    let mut h = String::new();
    let r = &report.reduction;
    writeln!(
        h,
        "alpha = {} (certificate {})",
        show_sets(&r.alpha.iter().collect::<Vec<_>>()),
        verdict(r.verified)
    )
    .unwrap();
    writeln!(h, "Subproblems:").unwrap();
    for s in &r.subproblems {
        writeln!(
            h,
            "  {}   where P_{} = {}   (order {})",
            s.equation, s.set, s.operator, s.order
        )
        .unwrap();
    }
    writeln!(h, "Recombination: {}", r.recombination).unwrap();
    if let Some(i) = &report.instance {
        writeln!(h, "Instance of dimension {}:", i.dimension).unwrap();
        if let Some(n) = &i.note {
            writeln!(h, "  {n}").unwrap();
        }
        for s in &i.subproblems {
            writeln!(
                h,
                "  subproblem {}: {}",
                s.set,
                show_solutions(&s.solutions)
            )
            .unwrap();
        }
        writeln!(h, "  direct solve: {}", show_solutions(&i.direct)).unwrap();
        writeln!(h, "  recombined:   {}", show_solutions(&i.recombined)).unwrap();
        writeln!(h, "  solution sets agree: {}", i.agrees).unwrap();
    }
    Ok(Output::new(&report, h, ok))
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct Check {
    name: String,
    holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    factors: Vec<String>,
    source: &'static str,
    checks: Vec<Check>,
    all_hold: bool,
}

fn cmd_verify(ctx: &Context) -> CliResult<Output> {
    let supplied_alpha = ctx.supplied_alpha()?;
    let supplied_dual = ctx.supplied_dual()?;
    let source = if supplied_alpha.is_some() || supplied_dual.is_some() {
        "supplied"
    } else {
        "derived"
    };
    let (alpha, dual) = if source == "supplied" {
        (supplied_alpha, supplied_dual)
    } else {
        let d = derive(ctx)?;
        (d.available.then_some(d.alpha), d.dual)
    };
    let mut checks = Vec::new();
    if let Some(dual) = &dual {
        for (set, row) in dual.identities() {
            let residual = dual_identity_residual(row, &ctx.ops);
            checks.push(Check {
                name: format!("dual identity over {set}"),
                holds: residual.is_zero(),
                detail: Some(format!("residual {}", ctx.vars.format(&residual))),
            });
        }
    }
    if let Some(cert) = &alpha {
        let v = verify_certificate(cert, &ctx.ops)?;
        checks.push(Check {
            name: format!("alpha identity over {}", show_sets(&sets(cert.alpha()))),
            holds: v.holds,
            detail: Some(format!("residual {}", ctx.vars.format(&v.residual))),
        });
        if let Some(inst) = ctx.instance()? {
            let red = LinearReduction::new(cert, &ctx.ops, &inst)?;
            let mut sum = Matrix::zeros(inst.dimension(), inst.dimension());
            for part in red.parts() {
                sum = &sum + &(&part.cofactor * &part.complement);
            }
            checks.push(Check {
                name: "instantiated identity sums to the identity matrix".into(),
                holds: sum.is_identity(),
                detail: None,
            });
            let mut r = opkit_core::backend::sample::rng(ctx.seed);
            let u = opkit_core::backend::sample::random_vector(&mut r, inst.dimension(), 5);
            let back = red.recombine(&red.split_vector(&u)?)?;
            checks.push(Check {
                name: "B(F(u)) = u on a random vector".into(),
                holds: back == u,
                detail: None,
            });
            if v.holds && cert.is_true_decomposition() {
                let ks = kernel_structure(cert, &ctx.ops, &inst)?;
                checks.push(Check {
                    name: "kernel splits as a direct sum with complementary projectors".into(),
                    holds: ks.holds(),
                    detail: Some(format!(
                        "dim N(P) = {}, factor kernels {:?}",
                        ks.kernel_dimension, ks.factor_kernel_dimensions
                    )),
                });
            }
        }
    }
    if checks.is_empty() {
        checks.push(Check {
            name: "certificate available".into(),
            holds: false,
            detail: Some(NO_DECOMPOSITION.into()),
        });
    }
    let all_hold = checks.iter().all(|c| c.holds);
    let report = VerifyReport {
        command: "verify",
        factors: ctx.factor_strings(),
        source,
        checks,
        all_hold,
    };
    let mut h = String::new();
    writeln!(h, "Checking {} certificates:", report.source).unwrap();
    for c in &report.checks {
        let detail = c
            .detail
            .as_ref()
            .map(|d| format!(" ({d})"))
            .unwrap_or_default();
        writeln!(
            h,
            "  [{}] {}{}",
            if c.holds { "ok" } else { "FAIL" },
            c.name,
            detail
        )
        .unwrap();
    }
    writeln!(h, "All checks: {}", verdict(all_hold)).unwrap();
    Ok(Output::new(&report, h, all_hold))
}

// ---------------------------------------------------------------- symmetry

type Grid = Vec<Vec<String>>;

#[derive(Serialize)]
struct GeneralizedReport {
    i: usize,
    j: usize,
    s_ij: Grid,
    s_prime_ij: Grid,
    verified: bool,
}

#[derive(Serialize)]
struct SuppliedSymmetry {
    index: usize,
    formal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    s_prime: Option<Grid>,
    generalized: Vec<GeneralizedReport>,
    reconstruction_verified: bool,
    simple_reconstruction_verified: bool,
}

#[derive(Serialize)]
struct GenerationSummary {
    kernel_dimension: usize,
    formal_basis_size: usize,
    induced_dimension: usize,
    generated_dimension: usize,
    reconstructions_verified: usize,
    holds: bool,
}

#[derive(Serialize)]
struct SymmetryReport {
    command: &'static str,
    factors: Vec<String>,
    certificate: AlphaReport,
    dimension: usize,
    symmetries: Vec<SuppliedSymmetry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generation: Option<GenerationSummary>,
    all_verified: bool,
}

fn cmd_symmetry(ctx: &Context) -> CliResult<Output> {
    let inst = ctx.require_instance()?;
    let cert = match &ctx.univariate {
        Some(spec) => univariate_certificate(spec)?.1,
        None => true_decomposition(&ctx.ops, &ctx.engine)?,
    };
    let sym_ctx = SymmetryContext::new(&cert, &ctx.ops, &inst)?;
    let mut symmetries = Vec::new();
    for (index, s) in ctx.supplied_symmetries()?.iter().enumerate() {
        let Some(formal) = is_formal_symmetry(s, sym_ctx.operator())? else {
            symmetries.push(SuppliedSymmetry {
                index,
                formal: false,
                s_prime: None,
                generalized: Vec::new(),
                reconstruction_verified: false,
                simple_reconstruction_verified: false,
            });
            continue;
        };
        let mut generalized = Vec::new();
        let mut parts = Vec::new();
        for i in 0..sym_ctx.len() {
            for j in 0..sym_ctx.len() {
                let g = sym_ctx.generalized_from_formal(&formal, i, j)?;
                let verified = g.verify(sym_ctx.factor(i), sym_ctx.factor(j));
                generalized.push(GeneralizedReport {
                    i,
                    j,
                    s_ij: g.s_ij.to_string_grid(),
                    s_prime_ij: g.s_prime_ij.to_string_grid(),
                    verified,
                });
                parts.push(g);
            }
        }
        let mut rebuilt_ok = true;
        let mut simple_ok = true;
        for g in &parts {
            rebuilt_ok &= sym_ctx
                .formal_from_generalized(g)?
                .verify(sym_ctx.operator());
            simple_ok &= sym_ctx
                .formal_from_generalized_simple(g)?
                .verify(sym_ctx.operator());
        }
        symmetries.push(SuppliedSymmetry {
            index,
            formal: true,
            s_prime: Some(formal.s_prime.to_string_grid()),
            generalized,
            reconstruction_verified: rebuilt_ok,
            simple_reconstruction_verified: simple_ok,
        });
    }
    let generation = if ctx.job.generation.unwrap_or(true) {
        let g = generation_check(&sym_ctx)?;
        Some(GenerationSummary {
            kernel_dimension: g.kernel_dimension,
            formal_basis_size: g.formal_basis_size,
            induced_dimension: g.induced_dimension,
            generated_dimension: g.generated_dimension,
            reconstructions_verified: g.reconstructions_verified,
            holds: g.holds(),
        })
    } else {
        None
    };
    let certificate = alpha_report(&cert, &ctx.ops, &ctx.vars)?;
    let all_verified = certificate.verified
        && symmetries.iter().filter(|s| s.formal).all(|s| {
            s.reconstruction_verified
                && s.simple_reconstruction_verified
                && s.generalized.iter().all(|g| g.verified)
        })
        && generation.as_ref().is_none_or(|g| g.holds);
    let report = SymmetryReport {
        command: "symmetry",
        factors: ctx.factor_strings(),
        certificate,
        dimension: inst.dimension(),
        symmetries,
        generation,
        all_verified,
    };
    let mut h = String::new();
    render_alpha(&mut h, "True decomposition", &report.certificate);
    writeln!(h, "Instance of dimension {}", report.dimension).unwrap();
    for s in &report.symmetries {
        if s.formal {
            let ok = s.generalized.iter().filter(|g| g.verified).count();
            writeln!(
                h,
                "  S#{}: formal symmetry; {ok}/{} generalized pieces verify; reconstruction {}, simple reconstruction {}",
                s.index,
                s.generalized.len(),
                verdict(s.reconstruction_verified),
                verdict(s.simple_reconstruction_verified)
            )
            .unwrap();
        } else {
            writeln!(
                h,
                "  S#{}: not a formal symmetry (does not preserve the kernel of P)",
                s.index
            )
            .unwrap();
        }
    }
    if let Some(g) = &report.generation {
        writeln!(
            h,
            "Generation: dim N(P) = {}, {} basis symmetries, induced maps span {}, generalized pieces span {} ({})",
            g.kernel_dimension,
            g.formal_basis_size,
            g.induced_dimension,
            g.generated_dimension,
            verdict(g.holds)
        )
        .unwrap();
    }
    writeln!(h, "All checks: {}", verdict(all_verified)).unwrap();
    Ok(Output::new(&report, h, all_verified))
}

// ---------------------------------------------------------------- system

#[derive(Serialize)]
struct SystemCertificateReport {
    q: Vec<String>,
    s: Vec<String>,
    residual: String,
    verified: bool,
}

#[derive(Serialize)]
struct InstanceSystemReport {
    dimension: usize,
    f: Vec<String>,
    g: Vec<Vec<String>>,
    integrable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    integrability_failure: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    subsystems: Vec<SolutionSetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recombined: Option<SolutionSetReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    direct: Option<SolutionSetReport>,
    agrees: bool,
}

#[derive(Serialize)]
struct SystemReport {
    command: &'static str,
    factors: Vec<String>,
    constraints: Vec<String>,
    certificate: SystemCertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<InstanceSystemReport>,
}

fn system_data(
    ctx: &Context,
    red: &SystemReduction,
    inst: &OperatorInstance,
) -> CliResult<(Vector, Vec<Vector>)> {
    let p = red.operator();
    match (&ctx.job.f, &ctx.job.g) {
        (Some(f), Some(g)) => {
            if g.len() != red.constraints().len() {
                return Err(CliError::Input(format!(
                    "`g` needs {} vectors",
                    red.constraints().len()
                )));
            }
            let f = resolve_vector(f, inst, &ctx.vars, p, ctx.seed)?;
            let g = g
                .iter()
                .zip(red.constraints())
                .map(|(s, r)| resolve_vector(s, inst, &ctx.vars, r, ctx.seed))
                .collect::<CliResult<Vec<_>>>()?;
            Ok((f, g))
        }
        (None, None) => {
            // consistent data from a random u
            let mut r = opkit_core::backend::sample::rng(ctx.seed);
            let u = opkit_core::backend::sample::random_vector(&mut r, inst.dimension(), 5);
            let f = p.mul_vec(&u)?;
            let g = red
                .constraints()
                .iter()
                .map(|m| m.mul_vec(&u))
                .collect::<Result<_, _>>()?;
            Ok((f, g))
        }
        _ => Err(CliError::Input(
            "give both `f` and `g`, or neither for random consistent data".into(),
        )),
    }
}

fn cmd_system(ctx: &Context) -> CliResult<Output> {
    let constraints = ctx.constraints()?;
    let cert = find_system_certificate(&ctx.ops, &constraints, &ctx.engine)?.ok_or_else(|| {
        CliError::Core(opkit_core::Error::Verification(
            "no system certificate: 1 is not in the ideal of the complementary products and the constraints".into(),
        ))
    })?;
    let residual = cert.residual(&ctx.ops, &constraints)?;
    let certificate = SystemCertificateReport {
        q: cert.q.iter().map(|p| ctx.vars.format(p)).collect(),
        s: cert.s.iter().map(|p| ctx.vars.format(p)).collect(),
        verified: residual.is_zero(),
        residual: ctx.vars.format(&residual),
    };
    let inst_report = match ctx.instance()? {
        None => None,
        Some(inst) => {
            let red = SystemReduction::new(&cert, &ctx.ops, &constraints, &inst)?;
            let (f, g) = system_data(ctx, &red, &inst)?;
            let failure = integrability_failure(red.operator(), red.constraints(), &f, &g)?;
            let base = InstanceSystemReport {
                dimension: inst.dimension(),
                f: vector_to_strings(&f),
                g: g.iter().map(|v| vector_to_strings(v)).collect(),
                integrable: failure.is_none(),
                integrability_failure: failure.clone(),
                subsystems: Vec::new(),
                recombined: None,
                direct: None,
                agrees: false,
            };
            Some(if failure.is_some() {
                base
            } else {
                let s = red.split(&f, &g)?;
                InstanceSystemReport {
                    subsystems: s.subsystems.iter().map(Into::into).collect(),
                    recombined: Some((&s.recombined).into()),
                    direct: Some((&s.direct).into()),
                    agrees: s.agrees(),
                    ..base
                }
            })
        }
    };
    let ok = certificate.verified
        && inst_report
            .as_ref()
            .is_none_or(|r| r.integrable && r.agrees);
    let report = SystemReport {
        command: "system",
        factors: ctx.factor_strings(),
        constraints: constraints.iter().map(|p| ctx.vars.format(p)).collect(),
        certificate,
        instance: inst_report,
    };
    let mut h = String::new();
    let c = &report.certificate;
    let mut terms: Vec<String> =
        c.q.iter()
            .enumerate()
            .map(|(i, q)| format!("({q})*P^{i}"))
            .collect();
    terms.extend(c.s.iter().enumerate().map(|(p, s)| format!("({s})*R_{p}")));
    writeln!(
        h,
        "System certificate ({}): 1 = {}",
        verdict(c.verified),
        terms.join(" + ")
    )
    .unwrap();
    if let Some(i) = &report.instance {
        writeln!(h, "Instance of dimension {}:", i.dimension).unwrap();
        match &i.integrability_failure {
            Some(msg) => writeln!(h, "  data rejected: {msg}").unwrap(),
            None => {
                writeln!(h, "  integrability conditions hold").unwrap();
                for (k, s) in i.subsystems.iter().enumerate() {
                    writeln!(h, "  subsystem {k}: {}", show_solutions(s)).unwrap();
                }
                if let Some(d) = &i.direct {
                    writeln!(h, "  direct solve: {}", show_solutions(d)).unwrap();
                }
                writeln!(h, "  solution sets agree: {}", i.agrees).unwrap();
            }
        }
    }
    Ok(Output::new(&report, h, ok))
}
