use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;

use anyhow::{bail, Context, Result};
use aqm::algebra::{c64, norm, CMatrix, CVector, Element};
use aqm::experiments::chsh::{chsh_local_simulation, chsh_n, ChshConfig, ChshMode};
use aqm::experiments::epr::epr_scenario;
use aqm::experiments::ks::{ks_search, verify, KsAssignment, KsInstance, KsMode};
use aqm::experiments::oscillator::{
    feynman_propagator, generating_functional_two_point, green_function, ground_projector,
    oscillator_ground_projector, wick_pairing_sum, OscillatorConfig, DC_PREFACTOR,
};
use aqm::experiments::two_level::{random_direction, two_level_scenario, TwoLevelConfig};
use aqm::experiments::two_slit::{closure_residual, two_slit_distribution, Slits, TwoSlitConfig};
use aqm::experiments::Check;
use aqm::gns::{gns_construct, is_cyclic, is_exact, is_irreducible};
use aqm::par::keyed_rng;
use aqm::statistics::QuantumState;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::report::{Report, Table};
use crate::{Common, SlitChoice};

const DEFAULT_SEED: u64 = 2024;

fn load<T: DeserializeOwned + Default>(common: &Common) -> Result<T> {
    match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
        }
        None => Ok(T::default()),
    }
}

fn flag(name: &str, ok: bool) -> Check {
    Check::close(name, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
}

fn cell(x: f64) -> String {
    format!("{x:e}")
}

fn complex_matrix(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn chsh(common: &Common, exact: bool, eighth_turn: bool) -> Result<Report> {
    let mut config: ChshConfig = load(common)?;
    if eighth_turn {
        let angles = ChshConfig::eighth_turn_angles();
        config = ChshConfig {
            n_samples: config.n_samples,
            seed: config.seed,
            ..angles
        };
    }
    config.seed = common.seed.unwrap_or(config.seed);
    config.n_samples = common.samples.unwrap_or(config.n_samples);

    let mode = if exact {
        ChshMode::Exact
    } else {
        ChshMode::Sampled
    };
    let result = chsh_n(&config, mode)?;
    let mut checks = vec![Check::close(
        "classical bound by enumeration",
        result.classical_max,
        0.5,
        0.0,
    )];
    let local = if exact {
        checks.push(Check::close(
            "exact N equals 1/sqrt2",
            result.n_exact,
            FRAC_1_SQRT_2,
            common.tolerance.unwrap_or(1e-12),
        ));
        None
    } else {
        let n_hat = result.n_sampled.expect("sampled mode");
        checks.push(Check::close(
            "sampled N equals 1/sqrt2",
            n_hat,
            FRAC_1_SQRT_2,
            common.tolerance.unwrap_or(0.005),
        ));
        let local = chsh_local_simulation(&config)?;
        checks.push(Check::at_most(
            "local simulation within classical bound",
            local.n,
            0.5,
            4.0 * local.std_error,
        ));
        Some(local)
    };

    let rows = config
        .pairs()
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let sampled = result.e_sampled.map(|e| cell(e[k])).unwrap_or_default();
            let se = result.e_std_errors.map(|e| cell(e[k])).unwrap_or_default();
            vec![
                k.to_string(),
                cell(*a),
                cell(*b),
                cell(result.e_table[k]),
                sampled,
                se,
            ]
        })
        .collect();
    let table = Table {
        header: vec!["pair", "a", "b", "e_exact", "e_sampled", "std_error"],
        rows,
    };
    Ok(Report::new(
        "chsh",
        config,
        json!({ "quantum": result, "local": local }),
        checks,
    )?
    .with_table(table))
}

pub fn ks(common: &Common) -> Result<Report> {
    let (instance, source) = match &common.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            (KsInstance::from_json(&text)?, path.display().to_string())
        }
        None => (KsInstance::bundled(), "bundled".to_string()),
    };
    let noncontextual = ks_search(&instance, KsMode::Noncontextual);
    let contextual = ks_search(&instance, KsMode::Contextual);
    let mut checks = vec![flag(
        "contextual witness verifies",
        contextual
            .assignment
            .as_ref()
            .is_some_and(|a| verify(&instance, a)),
    )];
    if let Some(a) = &noncontextual.assignment {
        checks.push(flag(
            "noncontextual assignment verifies",
            verify(&instance, a),
        ));
    }
    if common.config.is_none() {
        checks.push(flag("bundled set is uncolourable", !noncontextual.is_sat()));
    }

    let global = match &noncontextual.assignment {
        Some(KsAssignment::Noncontextual(v)) => Some(v.clone()),
        _ => None,
    };
    let per_context = match &contextual.assignment {
        Some(KsAssignment::Contextual(v)) => v.clone(),
        _ => Vec::new(),
    };
    let join = |v: Vec<String>| v.join(" ");
    let rows = instance
        .contexts
        .iter()
        .enumerate()
        .map(|(c, ctx)| {
            let dirs = join(ctx.iter().map(usize::to_string).collect());
            let contextual = join(per_context[c].iter().map(u8::to_string).collect());
            let global = global
                .as_ref()
                .map(|g| join(ctx.iter().map(|&i| g[i].to_string()).collect()))
                .unwrap_or_default();
            vec![c.to_string(), dirs, contextual, global]
        })
        .collect();
    let table = Table {
        header: vec![
            "context",
            "directions",
            "contextual_values",
            "noncontextual_values",
        ],
        rows,
    };
    let results = json!({
        "source": source,
        "dimension": instance.dim(),
        "n_directions": instance.directions.len(),
        "n_contexts": instance.contexts.len(),
        "noncontextual_sat": noncontextual.is_sat(),
        "noncontextual": noncontextual,
        "contextual": contextual,
    });
    Ok(Report::new("ks", &instance, results, checks)?.with_table(table))
}

pub fn two_slit(common: &Common, choice: SlitChoice) -> Result<Report> {
    let config: TwoSlitConfig = load(common)?;
    let both = two_slit_distribution(&config, Slits::Both)?;
    let a = two_slit_distribution(&config, Slits::AOnly)?;
    let b = two_slit_distribution(&config, Slits::BOnly)?;
    let tol = common.tolerance.unwrap_or(1e-12);
    let norm_gap = [&both, &a, &b]
        .iter()
        .map(|d| (d.total_probability() - 1.0).abs())
        .fold(0.0, f64::max);
    let single = a.max_interference().max(b.max_interference());
    let checks = vec![
        Check::close("normalization gap", norm_gap, 0.0, tol),
        Check::close("single-slit interference", single, 0.0, 0.0),
        Check::above(
            "both-slit interference magnitude",
            both.max_interference(),
            0.01,
        ),
        Check::above(
            "deviation from classical mixture",
            both.max_deviation_from_mixture(),
            0.0,
        ),
        Check::at_most(
            "decomposition closure",
            closure_residual(&config)?,
            0.0,
            1e-10,
        ),
    ];
    let chosen = match choice {
        SlitChoice::Both => both,
        SlitChoice::AOnly => a,
        SlitChoice::BOnly => b,
    };
    let table = Table {
        header: vec![
            "k_index",
            "p_slit_a",
            "p_slit_b",
            "interference",
            "total",
            "classical_mixture",
        ],
        rows: chosen
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.k_index.to_string(),
                    cell(r.p_slit_a),
                    cell(r.p_slit_b),
                    cell(r.interference),
                    cell(r.total),
                    cell(r.classical_mixture),
                ]
            })
            .collect(),
    };
    Ok(Report::new("two-slit", config, &chosen, checks)?.with_table(table))
}

pub fn oscillator(common: &Common) -> Result<Report> {
    let config: OscillatorConfig = load(common)?;
    config.validate()?;
    let distance = norm(
        &(&oscillator_ground_projector(&config) - ground_projector(config.fock_dim).element()),
    )?;

    let mut green = Vec::new();
    let mut two_point_gap: f64 = 0.0;
    let mut kernel_gap: f64 = 0.0;
    for k in 0..=80 {
        let t = -10.0 + 0.25 * k as f64;
        let g = green_function(&config, &[t, 0.0])?;
        let closed = feynman_propagator(t, config.omega);
        let z = generating_functional_two_point(t, config.omega, DC_PREFACTOR);
        two_point_gap = two_point_gap.max((g - closed).norm());
        kernel_gap = kernel_gap.max((z - g).norm());
        green.push((t, g, closed));
    }

    let mut rng = keyed_rng(common.seed.unwrap_or(DEFAULT_SEED), 0x05c);
    let two_point = |a: f64, b: f64| feynman_propagator(a - b, config.omega);
    let mut four_point_gap: f64 = 0.0;
    for _ in 0..common.samples.unwrap_or(100) {
        let times: Vec<f64> = (0..4).map(|_| 2.0 * gaussian(&mut rng)).collect();
        let g = green_function(&config, &times)?;
        four_point_gap = four_point_gap.max((g - wick_pairing_sum(&times, &two_point)).norm());
    }

    let checks = vec![
        Check::close(
            "damped ground projector distance",
            distance,
            (-config.r).exp(),
            1e-12,
        ),
        Check::close(
            "two-point function",
            two_point_gap,
            0.0,
            common.tolerance.unwrap_or(1e-10),
        ),
        Check::close("four-point pairing sum", four_point_gap, 0.0, 1e-9),
        Check::close("generating functional two-point", kernel_gap, 0.0, 1e-10),
    ];
    let table = Table {
        header: vec!["t", "re_g", "im_g", "re_closed_form", "im_closed_form"],
        rows: green
            .iter()
            .map(|(t, g, c)| vec![cell(*t), cell(g.re), cell(g.im), cell(c.re), cell(c.im)])
            .collect(),
    };
    let results = json!({
        "projector_distance": distance,
        "two_point_max_gap": two_point_gap,
        "four_point_max_gap": four_point_gap,
        "dc_prefactor": DC_PREFACTOR,
        "green": green.iter().map(|(t, g, _)| json!({"t": t, "re": g.re, "im": g.im})).collect::<Vec<_>>(),
    });
    Ok(Report::new("oscillator", config, results, checks)?.with_table(table))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
struct EprConfig {
    direction: [f64; 3],
    outcome: f64,
    /// Random directions in the sweep.
    n_directions: u64,
    seed: u64,
}

impl Default for EprConfig {
    fn default() -> Self {
        Self {
            direction: [0.0, 0.0, 1.0],
            outcome: 0.5,
            n_directions: 100,
            seed: DEFAULT_SEED,
        }
    }
}

pub fn epr(common: &Common, direction: Option<Vec<f64>>, outcome: Option<f64>) -> Result<Report> {
    let mut config: EprConfig = load(common)?;
    if let Some(d) = direction {
        let [x, y, z] = d[..] else {
            bail!("--direction takes three components");
        };
        config.direction = [x, y, z];
    }
    config.outcome = outcome.unwrap_or(config.outcome);
    config.seed = common.seed.unwrap_or(config.seed);
    config.n_directions = common.samples.unwrap_or(config.n_directions);
    let tol = common.tolerance.unwrap_or(1e-12);

    let e = epr_scenario(config.direction, config.outcome)?;
    let half = CMatrix::identity(2, 2) * c64(0.5, 0.0);
    let mut rng = keyed_rng(config.seed, 0xe9);
    let mut sweep_gap: f64 = 0.0;
    let mut sweep_anti = true;
    for i in 0..config.n_directions {
        let out = if i % 2 == 0 { 0.5 } else { -0.5 };
        let s = epr_scenario(random_direction(&mut rng), out)?;
        sweep_gap = sweep_gap.max((&s.post_reduced - &s.expected_post_reduced).norm());
        sweep_anti &= s.partner_value == -out && (s.partner_probability - 1.0).abs() <= tol;
    }

    let checks = vec![
        Check::close(
            "post-measurement reduced state",
            (&e.post_reduced - &e.expected_post_reduced).norm(),
            0.0,
            tol,
        ),
        Check::close(
            "pre-measurement reduced state",
            (&e.pre_reduced - half).norm(),
            0.0,
            tol,
        ),
        Check::close("outcome probability", e.outcome_probability, 0.5, tol),
        Check::close("partner value", e.partner_value, -e.outcome, 0.0),
        Check::close("partner certainty", e.partner_probability, 1.0, tol),
        Check::close(
            "sweep: post-measurement reduced states",
            sweep_gap,
            0.0,
            tol,
        ),
        flag("sweep: anti-correlation", sweep_anti),
    ];
    let results = json!({
        "direction": e.direction,
        "outcome": e.outcome,
        "outcome_probability": e.outcome_probability,
        "partner_value": e.partner_value,
        "partner_probability": e.partner_probability,
        "pre_reduced": complex_matrix(&e.pre_reduced),
        "post_reduced": complex_matrix(&e.post_reduced),
        "expected_post_reduced": complex_matrix(&e.expected_post_reduced),
        "sweep_max_gap": sweep_gap,
    });
    Report::new("epr", config, results, checks)
}

pub fn two_level(common: &Common) -> Result<Report> {
    let mut config: TwoLevelConfig = load(common)?;
    config.seed = common.seed.unwrap_or(config.seed);
    config.n_states = common.samples.unwrap_or(config.n_states);
    let mut report = two_level_scenario(&config)?;
    if let Some(tol) = common.tolerance {
        for c in report
            .checks
            .iter_mut()
            .filter(|c| c.name.starts_with("dephased"))
        {
            *c = Check::close(c.name.clone(), c.value, c.expected, tol);
        }
    }
    let table = Table {
        header: vec![
            "a11",
            "a22",
            "re_a12",
            "im_a12",
            "mean",
            "expected",
            "std_error",
        ],
        rows: report
            .ensemble
            .iter()
            .map(|l| {
                let mut row: Vec<String> = l.observable.iter().map(|x| cell(*x)).collect();
                row.extend([cell(l.mean), cell(l.expected), cell(l.std_error)]);
                row
            })
            .collect(),
    };
    let checks = std::mem::take(&mut report.checks);
    Ok(Report::new("two-level", config, &report, checks)?.with_table(table))
}

fn random_pure(rng: &mut ChaCha8Rng, n: usize) -> Result<QuantumState> {
    let v = CVector::from_fn(n, |_, _| c64(gaussian(rng), gaussian(rng)));
    let len = v.norm();
    Ok(QuantumState::pure(&(v / c64(len, 0.0)))?)
}

fn random_full_rank(rng: &mut ChaCha8Rng, n: usize) -> Result<QuantumState> {
    let g = CMatrix::from_fn(n, n, |_, _| c64(gaussian(rng), gaussian(rng)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    Ok(QuantumState::from_density(rho / tr)?)
}

pub fn gns_demo(common: &Common) -> Result<Report> {
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let samples = common.samples.unwrap_or(100);
    let tol = common.tolerance.unwrap_or(1e-10);
    let mut rng = keyed_rng(seed, 0x6e5);
    let cases = vec![
        ("pure M2", 2, true, random_pure(&mut rng, 2)?),
        ("pure M3", 3, true, random_pure(&mut rng, 3)?),
        (
            "maximally mixed M2",
            2,
            false,
            QuantumState::maximally_mixed(2),
        ),
        ("full-rank M3", 3, false, random_full_rank(&mut rng, 3)?),
    ];
    let mut checks = Vec::new();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for (name, n, pure, psi) in cases {
        let rep = gns_construct(n, &psi)?;
        let mut gap: f64 = 0.0;
        for _ in 0..samples {
            let m = CMatrix::from_fn(n, n, |_, _| c64(gaussian(&mut rng), gaussian(&mut rng)));
            let b = Element::new(m)?;
            gap = gap.max((rep.vacuum_expectation(&b)? - psi.functional(&b)?).norm());
        }
        let (irreducible, cyclic, exact) = (is_irreducible(&rep), is_cyclic(&rep), is_exact(&rep));
        let expected_dim = if pure { n } else { n * n };
        checks.push(Check::close(
            format!("{name}: representation dimension"),
            rep.rep_dim() as f64,
            expected_dim as f64,
            0.0,
        ));
        checks.push(flag(
            &format!("{name}: irreducible iff pure"),
            irreducible == pure,
        ));
        checks.push(flag(&format!("{name}: cyclic"), cyclic));
        checks.push(Check::close(
            format!("{name}: vacuum expectation"),
            gap,
            0.0,
            tol,
        ));
        rows.push(vec![
            name.to_string(),
            n.to_string(),
            rep.rep_dim().to_string(),
            irreducible.to_string(),
            cyclic.to_string(),
            exact.to_string(),
            cell(gap),
        ]);
        results.push(json!({
            "state": name,
            "n": n,
            "purity": psi.purity(),
            "rep_dim": rep.rep_dim(),
            "irreducible": irreducible,
            "cyclic": cyclic,
            "exact": exact,
            "vacuum_max_gap": gap,
        }));
    }
    let table = Table {
        header: vec![
            "state",
            "n",
            "rep_dim",
            "irreducible",
            "cyclic",
            "exact",
            "vacuum_max_gap",
        ],
        rows,
    };
    let config = json!({ "seed": seed, "samples": samples });
    Ok(Report::new("gns-demo", config, results, checks)?.with_table(table))
}
