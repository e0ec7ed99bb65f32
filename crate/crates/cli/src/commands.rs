use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use xxchain::acceptance::{self, Group};
use xxchain::correlator::{AsymptoticsModel, CorrelatorMethod, CorrelatorTable};
use xxchain::formfactor::{self as ff, Formfactor, Method};
use xxchain::lattice::{ground_state_config, ChainSpec, MomentumConfig, Sector, DEFAULT_ENUMERATION_LIMIT};
use xxchain::momentum::{
    nq_asymptotic_distribution, nq_asymptotic_sum, nq_dft, nq_formfactor_distribution, singularity_constants,
    sum_rule_check, MomentumDistribution,
};
use xxchain::oracle::MAX_SITES;
use xxchain::special::{c0_from_integral, c0_from_ln_rn_constant, constants as bundle, ln_rn_constant};

use crate::output::{Cell, Document, Provenance, VERSION};
use crate::{invalid, Failure};

/// `C0` as quoted through `C0/(2√π) = 0.147088`.
const C0_QUOTED: f64 = 2.0 * 1.772_453_850_905_516 * 0.147088;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelatorChoice {
    Wick,
    Rn,
    Mr,
    Asymptotic,
    All,
}

impl CorrelatorChoice {
    fn method(self) -> Option<CorrelatorMethod> {
        match self {
            CorrelatorChoice::Wick => Some(CorrelatorMethod::WickDet),
            CorrelatorChoice::Rn => Some(CorrelatorMethod::RnProduct),
            CorrelatorChoice::Mr => Some(CorrelatorMethod::MRDet),
            CorrelatorChoice::Asymptotic => Some(CorrelatorMethod::Asymptotic),
            CorrelatorChoice::All => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// G(x) > 0, singularity of n(q) at q = 0.
    Positive,
    /// (−1)ˣ G(x), singularity at q = π.
    Alternating,
}

#[derive(Debug, Clone, Args)]
pub struct CorrelatorArgs {
    /// Chain length (even, with L/2 odd).
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long, value_enum, default_value = "rn")]
    pub method: CorrelatorChoice,
    #[arg(long, default_value_t = 1)]
    pub x_min: usize,
    /// Defaults to L.
    #[arg(long)]
    pub x_max: Option<usize>,
    #[arg(long, value_enum, default_value = "positive")]
    pub convention: Convention,
}

#[derive(Serialize)]
struct CorrelatorConfig {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "M")]
    m: usize,
    method: CorrelatorChoice,
    x_min: usize,
    x_max: usize,
    convention: Convention,
}

pub fn correlator(args: &CorrelatorArgs) -> Result<Document, Failure> {
    let spec = ChainSpec::half_filled(args.l)?;
    spec.require_correlator_sector()?;
    let x_max = args.x_max.unwrap_or(args.l);
    if args.x_min < 1 || x_max > args.l || args.x_min > x_max {
        return Err(invalid(format!("x range {}..{} is not inside 1..{}", args.x_min, x_max, args.l)));
    }
    let cfg = CorrelatorConfig {
        l: args.l,
        m: spec.particles(),
        method: args.method,
        x_min: args.x_min,
        x_max,
        convention: args.convention,
    };
    let methods: Vec<CorrelatorMethod> = match args.method.method() {
        Some(m) => vec![m],
        None => vec![
            CorrelatorMethod::WickDet,
            CorrelatorMethod::RnProduct,
            CorrelatorMethod::MRDet,
            CorrelatorMethod::Asymptotic,
        ],
    };
    let tables = methods
        .iter()
        .map(|&m| {
            let t = CorrelatorTable::compute(&spec, m)?;
            Ok(match args.convention {
                Convention::Positive => t.values,
                Convention::Alternating => t.alternating(),
            })
        })
        .collect::<Result<Vec<Vec<f64>>, Failure>>()?;

    let mut columns = vec!["x"];
    columns.extend(methods.iter().map(|m| m.name()));
    if methods.len() > 1 {
        columns.push("max_exact_deviation");
    }
    let mut doc = Document::new("correlator", &cfg, &columns);
    for m in &methods {
        let p = if m.is_exact() { Provenance::Exact } else { Provenance::Asymptotic };
        doc.tag(m.name(), p);
    }
    if methods.len() > 1 {
        doc.tag("max_exact_deviation", Provenance::Exact);
    }
    for x in args.x_min..=x_max {
        let mut row: Vec<Cell> = vec![(x as i64).into()];
        row.extend(tables.iter().map(|t| Cell::Float(t[x - 1])));
        if methods.len() > 1 {
            let exact: Vec<f64> = methods
                .iter()
                .zip(&tables)
                .filter(|(m, _)| m.is_exact())
                .map(|(_, t)| t[x - 1])
                .collect();
            let mut dev: f64 = 0.0;
            for a in &exact {
                for b in &exact {
                    dev = dev.max(((a - b) / b).abs());
                }
            }
            row.push(dev.into());
        }
        doc.push(row);
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormfactorChoice {
    Product,
    Sindet,
    Ctgdet,
    Brute,
    Lowest,
    /// product, sindet, ctgdet, and brute when L is small enough.
    All,
}

#[derive(Debug, Clone, Args)]
pub struct FormfactorArgs {
    #[arg(long = "L")]
    pub l: usize,
    /// Particles in the ket (default L/2).
    #[arg(long = "M")]
    pub m: Option<usize>,
    /// "ground", or comma-separated half-integer-grid indices n (q = 2π(n+½)/L).
    #[arg(long, default_value = "ground", allow_hyphen_values = true)]
    pub bra: String,
    #[arg(long, value_enum, default_value = "product")]
    pub method: FormfactorChoice,
}

#[derive(Serialize)]
struct FormfactorConfig {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "M")]
    m: usize,
    ket: Vec<i64>,
    bra: Vec<i64>,
    method: FormfactorChoice,
}

fn parse_bra(spec: &ChainSpec, text: &str) -> Result<(MomentumConfig, bool), Failure> {
    if text.trim() == "ground" {
        return Ok((ground_state_config(spec, Sector::HalfIntegerGrid)?, false));
    }
    let idx = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<i64>().map_err(|_| invalid(format!("bad bra index {s:?}"))))
        .collect::<Result<Vec<i64>, Failure>>()?;
    Ok(MomentumConfig::from_unordered(Sector::HalfIntegerGrid, spec.sites(), &idx)?)
}

pub fn formfactor(args: &FormfactorArgs) -> Result<Document, Failure> {
    let spec = ChainSpec::new(args.l, args.m.unwrap_or(args.l / 2))?;
    let ket = ground_state_config(&spec, Sector::IntegerGrid)?;
    let (bra, odd) = parse_bra(&spec, &args.bra)?;
    let methods: Vec<Method> = match args.method {
        FormfactorChoice::Product => vec![Method::Product],
        FormfactorChoice::Sindet => vec![Method::SinDet],
        FormfactorChoice::Ctgdet => vec![Method::CtgDet],
        FormfactorChoice::Brute => vec![Method::BruteForce],
        FormfactorChoice::Lowest => vec![Method::Lowest],
        FormfactorChoice::All => Method::EXACT
            .into_iter()
            .filter(|&m| m != Method::BruteForce || args.l <= MAX_SITES)
            .collect(),
    };
    let cfg = FormfactorConfig {
        l: args.l,
        m: spec.particles(),
        ket: ket.indices().to_vec(),
        bra: bra.indices().to_vec(),
        method: args.method,
    };
    let c0 = bundle().c0;
    let columns = ["method", "log_magnitude", "magnitude", "phase", "psi_sq_sqrt_l_over_c0"];
    let mut doc = Document::new("formfactor", &cfg, &columns);
    for c in &columns[1..] {
        doc.tag(c, Provenance::Exact);
    }
    for m in methods {
        let f: Formfactor = ff::formfactor(&spec, &ket, &bra, m)?;
        // the value for the indices in the order given
        let v = if odd { -f.physical() } else { f.physical() };
        let scaled = (2.0_f64 * v.log_magnitude).exp() * (args.l as f64).sqrt() / c0;
        doc.push(vec![
            m.name().into(),
            v.log_magnitude.into(),
            v.abs().into(),
            v.phase.into(),
            scaled.into(),
        ]);
    }
    Ok(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NqChoice {
    Dft,
    Ffsum,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum C0Choice {
    /// From the integral constant.
    Integral,
    /// The quoted value 2√π·0.147088.
    Value,
}

#[derive(Debug, Clone, Args)]
pub struct NqArgs {
    #[arg(long = "L", default_value_t = 402)]
    pub l: usize,
    #[arg(long, value_enum, default_value = "dft")]
    pub method: NqChoice,
    /// Correlator route feeding the DFT.
    #[arg(long, value_enum, default_value = "rn")]
    pub correlator: CorrelatorChoice,
    /// Exponent of the small-q formula.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "integral")]
    pub c0: C0Choice,
    /// Particle-hole cutoff of the formfactor sum.
    #[arg(long, default_value_t = 2)]
    pub max_ph: usize,
    /// Sum over all bras (overrides --max-ph).
    #[arg(long)]
    pub exhaustive: bool,
    /// Largest number of bras the formfactor sum may visit.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
    pub limit: u128,
    /// Print only the sum of the values (Σ_{n=0}^{L} for the small-q formula).
    #[arg(long)]
    pub sum: bool,
}

#[derive(Serialize)]
struct NqConfig {
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "M")]
    m: usize,
    method: NqChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlator: Option<CorrelatorChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    c0: C0Choice,
    c0_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_particle_hole: Option<usize>,
    sum: bool,
}

pub fn nq(args: &NqArgs) -> Result<Document, Failure> {
    let spec = ChainSpec::half_filled(args.l)?;
    spec.require_correlator_sector()?;
    let c0 = match args.c0 {
        C0Choice::Integral => c0_from_integral()?.c0,
        C0Choice::Value => C0_QUOTED,
    };
    let max_ph = if args.exhaustive { spec.particles() } else { args.max_ph };
    let cfg = NqConfig {
        l: args.l,
        m: spec.particles(),
        method: args.method,
        correlator: (args.method == NqChoice::Dft).then_some(args.correlator),
        alpha: (args.method == NqChoice::Asymptotic).then_some(args.alpha),
        c0: args.c0,
        c0_value: c0,
        max_particle_hole: (args.method == NqChoice::Ffsum).then_some(max_ph),
        sum: args.sum,
    };
    let value_tag = if args.method == NqChoice::Asymptotic { Provenance::Asymptotic } else { Provenance::Exact };
    let scale_tag = match (args.c0, value_tag) {
        (C0Choice::Value, _) => Provenance::PaperConstant,
        (_, t) => t,
    };
    let model = AsymptoticsModel::new(args.alpha, c0, -0.125)?;
    let dist: MomentumDistribution = match args.method {
        NqChoice::Dft => {
            let m = args
                .correlator
                .method()
                .filter(|m| m.is_exact())
                .ok_or_else(|| invalid("--correlator must be wick, rn or mr for the DFT"))?;
            nq_dft(&CorrelatorTable::compute(&spec, m)?)?
        }
        NqChoice::Ffsum => nq_formfactor_distribution(&spec, max_ph, args.limit)?,
        NqChoice::Asymptotic => {
            if args.sum {
                let mut doc = Document::new("nq", &cfg, &["sum"]);
                doc.tag("sum", Provenance::Asymptotic);
                doc.push(vec![nq_asymptotic_sum(&model, &spec, args.l as i64)?.into()]);
                return Ok(doc);
            }
            nq_asymptotic_distribution(&model, &spec)?
        }
    };
    if args.sum {
        let mut doc = Document::new("nq", &cfg, &["sum"]);
        doc.tag("sum", value_tag);
        doc.push(vec![sum_rule_check(&dist).into()]);
        return Ok(doc);
    }
    let mut doc = Document::new("nq", &cfg, &["n", "q", "nq", "nq_sqrt_l_over_c0"]);
    doc.tag("q", Provenance::Exact);
    doc.tag("nq", value_tag);
    doc.tag("nq_sqrt_l_over_c0", scale_tag);
    let root = (args.l as f64).sqrt();
    for (n, q, v) in dist.iter() {
        doc.push(vec![n.into(), q.into(), v.into(), (v * root / c0).into()]);
    }
    Ok(doc)
}

pub fn constants() -> Result<Document, Failure> {
    let b = bundle();
    let model = AsymptoticsModel::xx();
    let s = singularity_constants(&model)?;
    let mut doc = Document::new("constants", &json!({}), &["name", "value", "provenance"]);
    let rows: Vec<(&str, f64, Provenance)> = vec![
        ("c0_integral", b.c0, Provenance::Exact),
        ("c0_integral_error", b.c0_error, Provenance::Exact),
        ("c0_barnes_glaisher", c0_from_ln_rn_constant(ln_rn_constant()), Provenance::Exact),
        ("c0_large_n_fit", c0_from_ln_rn_constant(acceptance::ln_rn_constant_fit(200)), Provenance::Exact),
        ("c0_quoted", C0_QUOTED, Provenance::PaperConstant),
        ("c0_over_2_sqrt_pi", b.c0 / (2.0 * PI.sqrt()), Provenance::Exact),
        ("ln_rn_constant", b.ln_rn_constant, Provenance::Exact),
        ("glaisher_a", b.a_glaisher, Provenance::Exact),
        ("zeta_prime_minus_one", b.zeta_prime_minus_one, Provenance::Exact),
        ("gamma_one_quarter", b.gamma_quarter, Provenance::Exact),
        ("gamma_three_quarters", b.gamma_three_quarter, Provenance::Exact),
        ("c1_over_c0", s.c1 / model.c0, Provenance::Exact),
        ("c1_over_c0_quadrature", s.c1_quadrature / model.c0, Provenance::Exact),
        ("c2_over_c0", s.c2 / model.c0, Provenance::Exact),
        ("c2_prime_over_c0", s.c2_prime / model.c0, Provenance::Exact),
    ];
    for (name, v, p) in rows {
        let tag = serde_json::to_value(p).expect("tags serialize");
        doc.push(vec![name.into(), v.into(), tag.as_str().unwrap_or_default().into()]);
    }
    Ok(doc)
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Comma-separated groups (formfactor, correlator, constants, momentum,
    /// asymptotics) or criterion numbers.
    #[arg(long)]
    pub only: Option<String>,
    /// Machine-readable report.
    #[arg(long)]
    pub json: bool,
}

enum Selector {
    Group(Group),
    Number(u8),
}

fn parse_only(text: &str) -> Result<Vec<Selector>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            if let Some(g) = Group::parse(s) {
                return Ok(Selector::Group(g));
            }
            match s.parse::<u8>() {
                Ok(n) if acceptance::criterion(n).is_some() => Ok(Selector::Number(n)),
                _ => Err(invalid(format!("unknown criterion or group {s:?}"))),
            }
        })
        .collect()
}

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let selectors = args.only.as_deref().map(parse_only).transpose()?;
    let report = acceptance::run(|c| match &selectors {
        None => true,
        Some(sel) => sel.iter().any(|s| match s {
            Selector::Group(g) => c.group == *g,
            Selector::Number(n) => c.number == *n,
        }),
    });
    let passed = report.all_passed();
    if args.json {
        let doc = json!({
            "metadata": {"tool": "xxchain", "version": VERSION, "command": "verify", "config": {"only": args.only}},
            "passed": passed,
            "seconds": report.seconds,
            "checks": report.checks,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
    } else {
        for c in &report.checks {
            println!("{c}");
        }
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        println!(
            "{} of {} checks passed in {:.1} s",
            report.checks.len() - failed,
            report.checks.len(),
            report.seconds
        );
    }
    Ok(if passed { 0 } else { 1 })
}
