use std::collections::BTreeMap;
use std::path::Path;

use faer::Mat;
use pressure_lab::c64;
use pressure_lab::classical::{undamped_pressure, weight_table_from_map, DampingProfile, TorusMap, TorusPartition};
use pressure_lab::quantum::*;
use pressure_lab::symbolic::*;
use pressure_lab::thermo::*;
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::output::{float, Sink};
use crate::{CliError, Command, Route};

/// Agreement tolerances for the `pressure --route all` cross-check.
pub const BRUTE_TOL: f64 = 0.05;
pub const SEPARATED_TOL: f64 = 0.05;
const COUNTING_SLACK: f64 = 1e-12;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub base: &'a Path,
    pub route: Route,
}

struct Quantum {
    map: TorusMap<f64>,
    partition: TorusPartition<f64>,
    damping: DampingProfile<f64>,
}

impl Context<'_> {
    fn quantum(&self) -> Result<Quantum, CliError> {
        Ok(Quantum { map: self.cfg.torus_map()?, partition: self.cfg.torus_partition()?, damping: self.cfg.damping(self.base)? })
    }

    fn solve(&self, q: &Quantum, n: usize) -> Result<(DampedPropagator, Vec<EigenmodeRecord>), CliError> {
        let prop = damped_propagator(quantize(&q.map, n)?, &q.damping)?;
        let modes = spectrum_with_cap(&prop, self.cfg.quantum.dense_cap)?;
        Ok((prop, modes))
    }

    fn word_length(&self, q: &Quantum, n: usize) -> usize {
        self.cfg.quantum.word_length.unwrap_or_else(|| {
            let l = self.cfg.quantum.kappa * (n as f64).ln() / q.map.lambda_max().ln();
            (l.floor() as usize).max(1)
        })
    }

    fn weights(&self, q: &Quantum) -> Result<WeightTable<f64>, CliError> {
        Ok(weight_table_from_map(&q.map, &q.partition, self.cfg.symbolic.resolution, Some(self.cfg.symbolic.floor_log))?)
    }

    fn all_words(&self, k: usize, n: usize) -> Result<CylinderFamily, CliError> {
        let alphabet = Alphabet::full(k)?;
        let words = enumerate_words(&alphabet, n, self.cfg.symbolic.cap)?;
        Ok(CylinderFamily::from_words(n, words)?)
    }
}

pub fn run(cmd: Command, ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    match cmd {
        Command::Pressure => pressure(ctx, sink),
        Command::Entropy => entropy(ctx, sink),
        Command::CountingLemma => counting(ctx, sink),
        Command::Spectrum => spectrum_cmd(ctx, sink),
        Command::GapScan => gap(ctx, sink),
        Command::MassScan => mass(ctx, sink),
        Command::Functional => functional(ctx, sink),
        Command::DispersiveCheck => dispersive(ctx, sink),
        Command::Subinvariance => subinvariance(ctx, sink),
        Command::Selftest => selftest(ctx, sink),
    }
}

fn word_text(w: &[Symbol]) -> String {
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
}

#[derive(Serialize)]
struct SeparatedRow {
    t: usize,
    size: usize,
    log_sum: f64,
}

fn pressure(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let alphabet = cfg.alphabet()?;
    let phi = cfg.potential()?;
    let want = |r: Route| ctx.route == r || ctx.route == Route::All;
    let exact = transfer_pressure(&alphabet, &phi)?;
    let mut result = BTreeMap::new();
    if want(Route::Transfer) {
        result.insert("transfer", json!({ "value": exact }));
    }
    if want(Route::Brute) {
        let v = brute_force_pressure(&alphabet, &phi, cfg.thermo.brute_depth, cfg.symbolic.cap)?;
        result.insert(
            "brute",
            json!({ "value": v, "depth": cfg.thermo.brute_depth, "deviation": v - exact, "tolerance": BRUTE_TOL, "agrees": (v - exact).abs() <= BRUTE_TOL }),
        );
    }
    if want(Route::Separated) {
        // Least-squares slope of log Σ_F exp(S_T φ) in T; the slope drops
        // the log(1/ε) offset carried by each single-T value.
        let t = &cfg.thermo;
        let sampler = ShiftSampler::new(parry_measure(&alphabet, &Potential::zero(alphabet.size()))?, t.horizon)?;
        let f = |p: &Vec<Symbol>| if p.len() > 1 { phi.pair(p[0], p[1]) } else { 0.0 };
        let rows: Vec<SeparatedRow> = t
            .times
            .iter()
            .map(|&time| {
                let s = separated_set(&sampler, f, t.eps, time, 1, t.samples, cfg.seed)?;
                Ok(SeparatedRow { t: time, size: s.size, log_sum: s.log_sum })
            })
            .collect::<Result<_, CliError>>()?;
        let n = rows.len() as f64;
        let mx = rows.iter().map(|r| r.t as f64).sum::<f64>() / n;
        let my = rows.iter().map(|r| r.log_sum).sum::<f64>() / n;
        let sxy: f64 = rows.iter().map(|r| (r.t as f64 - mx) * (r.log_sum - my)).sum();
        let sxx: f64 = rows.iter().map(|r| (r.t as f64 - mx).powi(2)).sum();
        if rows.len() < 2 || sxx == 0.0 {
            return Err(CliError::Config("field `thermo.times`: need at least two distinct horizons".into()));
        }
        let slope = sxy / sxx;
        result.insert(
            "separated",
            json!({ "value": slope, "eps": t.eps, "samples": t.samples, "sets": rows, "deviation": slope - exact, "tolerance": SEPARATED_TOL, "agrees": (slope - exact).abs() <= SEPARATED_TOL }),
        );
    }
    sink.json("pressure.json", &result)
}

fn entropy(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let alphabet = cfg.alphabet()?;
    let phi = cfg.potential()?;
    let mu = parry_measure(&alphabet, &phi)?;
    let h = markov_entropy(&mu);
    let integral = markov_integral(&mu, &phi)?;
    let smb = smb_entropy_estimate(&mu, cfg.thermo.smb_length, cfg.thermo.smb_samples, cfg.seed)?;
    let result = json!({
        "measure": mu,
        "entropy": h,
        "integral": integral,
        "pressure": transfer_pressure(&alphabet, &phi)?,
        "entropyPlusIntegral": h + integral,
        "smb": { "value": smb, "length": cfg.thermo.smb_length, "samples": cfg.thermo.smb_samples },
        "logK": (alphabet.size() as f64).ln(),
    });
    sink.json("entropy.json", &result)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CountingRow {
    p: usize,
    tau: f64,
    sum: f64,
    log_sum: f64,
    log_sharp: f64,
    log_simplified: f64,
    binomial_hypothesis: bool,
    holds: bool,
}

fn counting(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let q = ctx.quantum()?;
    let k = q.partition.size();
    let alphabet = Alphabet::full(k)?;
    let weights = ctx.weights(&q)?;
    let w = cfg.w_family()?;
    let n0 = w.word_length();
    let mass = pressure_sum(&w, &weights, 0.5);
    let p0 = cfg.symbolic.p0.unwrap_or_else(|| (-2.0 / n0 as f64 * mass.ln()).max(0.0));
    let hypothesis = mass <= (-(n0 as f64) * p0 / 2.0).exp() * (1.0 + COUNTING_SLACK);
    let mut rows = Vec::new();
    for &p in &cfg.symbolic.p {
        if p < n0 {
            return Err(CliError::Config(format!("field `symbolic.p`: length {p} below n0 = {n0}")));
        }
        for &tau in &cfg.symbolic.tau {
            let sum = sigma_p_tau_weight_sum(&w, tau, p, &alphabet, &weights, 0.5, cfg.symbolic.cap)?;
            let b = counting_bound(p, n0, tau, k, weights.cap_log(), p0)?;
            rows.push(CountingRow {
                p,
                tau,
                sum,
                log_sum: sum.ln(),
                log_sharp: b.log_sharp,
                log_simplified: b.log_simplified,
                binomial_hypothesis: b.binomial_hypothesis,
                holds: sum.ln() <= b.log_sharp + COUNTING_SLACK,
            });
        }
    }
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.p.to_string(),
                float(r.tau),
                float(r.sum),
                float(r.log_sharp),
                float(r.log_simplified),
                r.binomial_hypothesis.to_string(),
                r.holds.to_string(),
            ]
        })
        .collect();
    sink.csv("counting_lemma.csv", &["p", "tau", "sum", "log_sharp", "log_simplified", "binomial_hypothesis", "holds"], &csv)?;
    sink.json(
        "counting_lemma.json",
        &json!({
            "K": k, "n0": n0, "lambda0": weights.cap_log(), "P0": p0, "massOnW": mass,
            "pressureHypothesis": hypothesis, "rows": rows,
        }),
    )
}

fn spectrum_cmd(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let q = ctx.quantum()?;
    let mut csv = Vec::new();
    let mut per_n = Vec::new();
    for &n in &ctx.cfg.quantum.dims {
        let (prop, modes) = ctx.solve(&q, n)?;
        let gsum: f64 = modes.iter().map(|m| m.decay_rate).sum();
        let vsum: f64 = prop.damping_samples().iter().sum();
        for m in &modes {
            let s = m.summary();
            csv.push(vec![n.to_string(), s.id.to_string(), float(s.re), float(s.im), float(s.decay_rate), float(s.phase), float(s.residual)]);
        }
        if ctx.cfg.quantum.dump_matrices {
            let mut buf = Vec::new();
            write_matrix(prop.u(), MatrixKind::Unitary, &mut buf)?;
            sink.binary(&format!("unitary_N{n}.bin"), &buf)?;
            buf.clear();
            write_matrix(prop.m(), MatrixKind::Propagator, &mut buf)?;
            sink.binary(&format!("propagator_N{n}.bin"), &buf)?;
            buf.clear();
            let vecs = Mat::<c64>::from_fn(n, modes.len(), |r, c| modes[c].vector[r]);
            write_matrix(&vecs, MatrixKind::Eigenvectors, &mut buf)?;
            sink.binary(&format!("eigenvectors_N{n}.bin"), &buf)?;
        }
        per_n.push(json!({
            "N": n,
            "unitarityDefect": unitarity_defect(prop.u()),
            "decaySum": gsum,
            "dampingSum": vsum,
            "modes": modes.iter().map(EigenmodeRecord::summary).collect::<Vec<_>>(),
        }));
    }
    sink.csv("spectrum.csv", &["N", "id", "re", "im", "decay_rate", "phase", "residual"], &csv)?;
    sink.json("spectrum.json", &per_n)
}

fn gap(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let q = ctx.quantum()?;
    let mut rows = Vec::new();
    for &n in &ctx.cfg.quantum.dims {
        let (_, modes) = ctx.solve(&q, n)?;
        rows.push(GapRow::from_spectrum(n, &modes));
    }
    let up = undamped_pressure(&q.map, &q.partition, &q.damping, ctx.cfg.thermo.undamped_depth, ctx.cfg.symbolic.resolution)?;
    let csv: Vec<Vec<String>> = rows.iter().map(|r| vec![r.n.to_string(), float(r.gamma_min), float(r.gamma_min_log_n)]).collect();
    sink.csv("gap_scan.csv", &["N", "gamma_min", "gamma_min_log_N"], &csv)?;
    sink.json(
        "gap_scan.json",
        &json!({
            "rows": rows,
            "undampedPressure": { "value": up.value, "depth": up.depth, "undampedCells": up.undamped_cells, "survivingWords": up.surviving_words },
        }),
    )
}

fn mass(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let q = ctx.quantum()?;
    let alphabet = Alphabet::full(q.partition.size())?;
    let tau = cfg.symbolic.tau.first().copied().unwrap_or(0.5);
    let families = MassScanFamilies::new(cfg.w_family()?, tau, cfg.quantum.sigma_length, &alphabet)?;
    let mut rows = Vec::new();
    for &n in &cfg.quantum.dims {
        let (prop, modes) = ctx.solve(&q, n)?;
        let props = PartitionOperators::new(&q.partition, n)?;
        rows.extend(mass_scan(&families, &props, &prop, &modes, cfg.quantum.c_window)?);
    }
    let csv: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.n.to_string(), r.eigenmode_id.to_string(), float(r.decay_rate), float(r.mass_on_sigma), float(r.mass_on_w)])
        .collect();
    sink.csv("mass_scan.csv", &["N", "eigenmodeId", "decayRate", "massOnSigma", "massOnW"], &csv)?;
    let max = |f: fn(&MassRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    sink.json(
        "mass_scan.json",
        &json!({
            "tau": tau, "sigmaLength": cfg.quantum.sigma_length, "sigmaSize": families.sigma.len(),
            "cWindow": cfg.quantum.c_window, "modes": rows.len(),
            "maxMassOnW": max(|r| r.mass_on_w), "maxMassOnSigma": max(|r| r.mass_on_sigma), "rows": rows,
        }),
    )
}

fn functional(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let q = ctx.quantum()?;
    let k = q.partition.size();
    let mut csv = Vec::new();
    let mut totals = Vec::new();
    for &n in &cfg.quantum.dims {
        let len = ctx.word_length(&q, n);
        let words = ctx.all_words(k, len)?;
        let (prop, modes) = ctx.solve(&q, n)?;
        let props = PartitionOperators::new(&q.partition, n)?;
        for m in slow_modes(&modes, n, cfg.quantum.c_window) {
            let mu = family_functionals(&m.vector, &words, &props, &prop)?;
            for (w, z) in words.iter().zip(&mu) {
                csv.push(vec![n.to_string(), m.id.to_string(), word_text(w.letters()), float(z.re), float(z.im)]);
            }
            let s: c64 = mu.iter().sum();
            totals.push(json!({ "N": n, "eigenmodeId": m.id, "wordLength": len, "totalRe": s.re, "totalIm": s.im }));
        }
    }
    sink.csv("functional.csv", &["N", "eigenmodeId", "word", "re", "im"], &csv)?;
    sink.json("functional.json", &totals)
}

fn dispersive(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let q = ctx.quantum()?;
    let k = q.partition.size();
    let weights = ctx.weights(&q)?;
    let mut csv = Vec::new();
    let mut summary = Vec::new();
    for &n in &cfg.quantum.dims {
        let len = ctx.word_length(&q, n);
        let u = quantize(&q.map, n)?;
        let props = PartitionOperators::new(&q.partition, n)?;
        let mut worst: f64 = 0.0;
        for w in ctx.all_words(k, len)?.iter() {
            let r = dispersive_norm_check(w.letters(), &u, &props, &weights, cfg.quantum.c_eps)?;
            worst = worst.max(r.ratio);
            csv.push(vec![n.to_string(), word_text(w.letters()), float(r.norm), float(r.bound), float(r.ratio)]);
        }
        summary.push(json!({ "N": n, "wordLength": len, "maxRatio": worst, "holds": worst <= 1.0 }));
    }
    sink.csv("dispersive.csv", &["N", "word", "norm", "bound", "ratio"], &csv)?;
    sink.json("dispersive.json", &json!({ "cEps": cfg.quantum.c_eps, "rows": summary }))
}

fn subinvariance(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cfg = ctx.cfg;
    let q = ctx.quantum()?;
    let w = cfg.w_family()?;
    let mut csv = Vec::new();
    let mut negative = 0;
    let mut worst_identity: f64 = 0.0;
    for &n in &cfg.quantum.dims {
        let (prop, modes) = ctx.solve(&q, n)?;
        let props = PartitionOperators::new(&q.partition, n)?;
        for m in slow_modes(&modes, n, cfg.quantum.c_window) {
            for word in w.iter() {
                for p in 0..=cfg.quantum.k {
                    let r = subinvariance_check(&m.vector, m.eigenvalue, word.letters(), p, &props, &prop)?;
                    negative += usize::from(r.slack < 0.0);
                    worst_identity = worst_identity.max(r.identity_defect);
                    csv.push(vec![
                        n.to_string(),
                        m.id.to_string(),
                        word_text(word.letters()),
                        p.to_string(),
                        float(r.lhs),
                        float(r.rhs),
                        float(r.slack),
                        float(r.identity_defect),
                    ]);
                }
            }
        }
    }
    sink.csv("subinvariance.csv", &["N", "eigenmodeId", "word", "p", "lhs", "rhs", "slack", "identityDefect"], &csv)?;
    sink.json("subinvariance.json", &json!({ "rows": csv.len(), "negativeSlack": negative, "maxIdentityDefect": worst_identity }))
}

#[derive(Serialize)]
struct Check {
    name: String,
    value: f64,
    tolerance: f64,
    pass: bool,
}

fn check(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
    Check { name: name.into(), value, tolerance, pass: value <= tolerance }
}

/// Small exact-identity suite, independent of the config except for the seed.
fn selftest(ctx: &Context, sink: &mut Sink) -> Result<(), CliError> {
    let cat = TorusMap::<f64>::cat();
    let mut checks = Vec::new();
    let state = |n: usize, salt: u64| -> Vec<c64> {
        // Weyl sequence: deterministic and free of structure on the strips.
        let g = 0.618_033_988_749_894_9;
        let v: Vec<c64> = (0..n)
            .map(|j| {
                let t = (j as f64 + 1.0 + (ctx.cfg.seed ^ salt) as f64 * 0.001) * g;
                c64::new((t * 7.0).fract() - 0.5, (t * 13.0).fract() - 0.5)
            })
            .collect();
        let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / s).collect()
    };
    for n in [16, 17, 30] {
        let u = quantize(&cat, n)?;
        checks.push(check(format!("unitarity N={n}"), unitarity_defect(&u), 1e-12));
        let e = egorov_check(&u, cat.matrix(), 2);
        checks.push(check(format!("egorov N={n}"), e.max_defect.max(e.max_modulus_defect), 1e-10));
    }
    let n = 30;
    let k = 3;
    let damping = DampingProfile::trig(0.6, vec![0.35], vec![0.2])?;
    let prop = damped_propagator(quantize(&cat, n)?, &damping)?;
    let props = PartitionOperators::new(&TorusPartition::strips(k)?, n)?;
    let (a, b) = props.identity_defects();
    checks.push(check("projector sum and products", a.max(b), 1e-10));
    for len in 1..=3 {
        let words = ctx.all_words(k, len)?;
        let mut total = Mat::<c64>::zeros(n, n);
        for w in words.iter() {
            total += cylinder_operator(w.letters(), &props, &prop, TimeConvention::Heisenberg)?;
        }
        let defect = (0..n)
            .flat_map(|r| (0..n).map(move |c| (r, c)))
            .map(|(r, c)| (total[(r, c)] - if r == c { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) }).norm())
            .fold(0.0, f64::max);
        checks.push(check(format!("cylinder sum n={len}"), defect, 1e-10));
        let psi = state(n, len as u64);
        let mass = family_mass(&psi, &words, &props, &prop)?;
        checks.push(check(format!("normalisation n={len}"), (mass - c64::new(1.0, 0.0)).norm(), 1e-10));
    }
    let psi = state(n, 99);
    let parent = quantum_functional(&psi, &[2, 0], &props, &prop)?;
    let children: c64 = (0..k as Symbol).map(|s| quantum_functional(&psi, &[2, 0, s], &props, &prop)).sum::<Result<_, _>>()?;
    checks.push(check("refinement", (parent - children).norm(), 1e-12));
    let modes = spectrum(&prop)?;
    let mut rewrite: f64 = 0.0;
    for m in modes.iter().take(2) {
        for p in 0..=2 {
            rewrite = rewrite.max(subinvariance_check(&m.vector, m.eigenvalue, &[1, 2], p, &props, &prop)?.identity_defect);
        }
    }
    checks.push(check("rewriting identity", rewrite, 1e-10));
    let gsum: f64 = modes.iter().map(|m| m.decay_rate).sum();
    let vsum: f64 = prop.damping_samples().iter().sum();
    checks.push(check("decay sum rule", (gsum - vsum).abs(), 1e-8));
    let zero = Potential::<f64>::zero(2);
    checks.push(check("full 2-shift pressure", (transfer_pressure(&Alphabet::full(2)?, &zero)? - 2f64.ln()).abs(), 1e-12));
    let log_g = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    checks.push(check("golden mean pressure", (transfer_pressure(&Alphabet::golden_mean(), &zero)? - log_g).abs(), 1e-12));

    let failed = checks.iter().filter(|c| !c.pass).count();
    sink.json("selftest.json", &json!({ "checks": checks, "failed": failed }))?;
    if failed > 0 {
        return Err(CliError::Checks(failed));
    }
    Ok(())
}
