//! Built-in fixture suite checking every security claim about the attack.
//!
//! Each check returns a [`ClaimResult`]; [`render_report`] turns the list into
//! the deterministic text report printed by `sealsim claims`.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

use num_complex::Complex64;
use rand::Rng;

use crate::analysis::{
    average_fidelity, bit_seal_point, coin_toss_average_fidelity, decode_matrix,
    escape_probability, flat_posterior_mass, mutual_information,
};
use crate::attack::{chau_family, coin_toss_distribution, ChauParams, MeasurementFamily};
use crate::error::Result;
use crate::limits::check_dimension;
use crate::linalg::{apply_and_normalize, StateVector};
use crate::montecarlo::{
    chi_square_check, round_rng, run_experiment, within_sigma, ExperimentConfig, SealSource,
    Strategy, GENERATOR,
};
use crate::report::format_sig;
use crate::seal::{he_seal, lambda_from_he, seal_general, HeSealSpec, LambdaMatrix};

/// Angles used for every fixture seal.
pub const THETA_GRID: [f64; 4] = [0.0, PI / 12.0, FRAC_PI_6, FRAC_PI_4];

pub const NU_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

pub const COMPLETENESS_DIMS: [usize; 5] = [2, 4, 16, 256, 4096];

/// Deliberate defects for negative-control runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Builds the measurement family with `-b` in place of `b`.
    FlipBSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClaimsConfig {
    pub seed: u64,
    pub trials: u64,
    pub fault: Option<Fault>,
}

impl Default for ClaimsConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            trials: 100_000,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimResult {
    pub id: u8,
    pub title: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
}

impl ClaimResult {
    fn new(id: u8, title: &'static str) -> Self {
        Self {
            id,
            title,
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details.push(detail);
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

/// String seals with `m <= 6` on [`THETA_GRID`]: every per-qubit angle
/// assignment for `m <= 3`, one shared angle for `m = 4..=6`.
pub fn he_fixture_suite() -> Vec<HeSealSpec> {
    let mut suite = Vec::new();
    for m in 1..=3u32 {
        for code in 0..4usize.pow(m) {
            let thetas = (0..m)
                .map(|k| THETA_GRID[(code / 4usize.pow(k)) % 4])
                .collect();
            suite.push(HeSealSpec::new(vec![false; m as usize], thetas).expect("grid angles"));
        }
    }
    for m in 4..=6 {
        for theta in THETA_GRID {
            suite.push(HeSealSpec::uniform(vec![false; m], theta).expect("grid angles"));
        }
    }
    suite
}

/// Shared-angle seals for `m = 1..=6`, one per grid angle.
pub fn he_shared_suite() -> Vec<HeSealSpec> {
    (1..=6)
        .flat_map(|m| THETA_GRID.map(|t| HeSealSpec::uniform(vec![false; m], t).expect("grid")))
        .collect()
}

fn describe(spec: &HeSealSpec) -> String {
    let thetas: Vec<String> = spec.thetas().iter().map(|t| format_sig(*t)).collect();
    format!("m={} theta=[{}]", spec.qubits(), thetas.join(","))
}

struct Suite {
    config: ClaimsConfig,
    seals: Vec<(HeSealSpec, LambdaMatrix)>,
}

impl Suite {
    fn family(&self, n: usize, nu: f64) -> Result<MeasurementFamily> {
        match self.config.fault {
            None => chau_family(n, nu),
            Some(Fault::FlipBSign) => {
                let p = ChauParams::new(n, nu)?;
                MeasurementFamily::from_coefficients(n, p.a, -p.b)
            }
        }
    }

    fn completeness(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(1, "POVM completeness of the aI + b|i><i| family");
        let mut worst: f64 = 0.0;
        for n in COMPLETENESS_DIMS {
            let mut row_worst: f64 = 0.0;
            for nu in NU_GRID {
                let family = self.family(n, nu)?;
                let mut dev = family.completeness_deviation();
                if n <= 16 {
                    dev = dev.max(family.dense_completeness_deviation());
                }
                row_worst = row_worst.max(dev);
            }
            r.note(format!("N={n}: max |sum Q^dag Q - I| = {}", format_sig(row_worst)));
            worst = worst.max(row_worst);
        }
        r.check(worst <= 1e-12, format!("worst deviation {} <= 1e-12", format_sig(worst)));
        Ok(r)
    }

    fn closed_form_vs_dense(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(2, "decode probability closed form vs dense simulation");
        let nus: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let mut worst: f64 = 0.0;
        let mut stream = 0u64;
        for n in [2usize, 4, 16] {
            for _ in 0..100 {
                let row = random_row(self.config.seed, stream, n);
                stream += 1;
                for &nu in &nus {
                    let family = self.family(n, nu)?;
                    for i in 0..n {
                        let closed = (1.0 - nu) / n as f64 + nu * row.amplitude(i).norm_sqr();
                        let dense = apply_and_normalize(&family.dense(i), &row)?.probability;
                        worst = worst.max((closed - dense).abs());
                    }
                }
            }
        }
        r.check(
            worst <= 1e-12,
            format!("300 random rows x 11 nu: worst gap {} <= 1e-12", format_sig(worst)),
        );
        Ok(r)
    }

    fn floor(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(3, "decode floor 1/(2N) at nu = 1/2");
        let mut worst_margin = f64::INFINITY;
        for (spec, lambda) in &self.seals {
            let dm = decode_matrix(lambda, 0.5)?;
            let floor = 1.0 / (2.0 * lambda.dim() as f64);
            let margin = dm.min_entry() - floor;
            if margin < -1e-15 {
                r.check(false, format!("{}: min entry below floor by {}", describe(spec), format_sig(-margin)));
            }
            worst_margin = worst_margin.min(margin);
        }
        r.check(
            worst_margin >= -1e-15,
            format!("{} seals: min(entry - 1/(2N)) = {}", self.seals.len(), format_sig(worst_margin)),
        );
        Ok(r)
    }

    fn flat_mass(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(4, "flat posterior mass 1/2 at nu = 1/2");
        let mut worst: f64 = 0.0;
        for (_, lambda) in &self.seals {
            let dm = decode_matrix(lambda, 0.5)?;
            for d in 0..lambda.dim() {
                worst = worst.max((flat_posterior_mass(&dm, d)? - 0.5).abs());
            }
        }
        r.check(
            worst <= 1e-12,
            format!("every seal and decoded value: max |mass - 0.5| = {}", format_sig(worst)),
        );
        Ok(r)
    }

    fn escape(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(5, "escape probability >= 1/2 at nu = 1/2");
        let mut lowest = f64::INFINITY;
        for (_, lambda) in &self.seals {
            lowest = lowest.min(escape_probability(lambda, 0.5)?);
        }
        r.check(
            lowest >= 0.5,
            format!("analytic: lowest message-averaged fidelity {}", format_sig(lowest)),
        );

        let mut within = 0;
        let shared = he_shared_suite();
        for (k, spec) in shared.iter().enumerate() {
            let message = k % spec.dim();
            let config = ExperimentConfig {
                seal: SealSource::He(spec.with_message(message)?),
                strategy: Strategy::Chau { nu: 0.5 },
                trials: self.config.trials,
                seed: self.config.seed.wrapping_add(1000 + k as u64),
            };
            let expected = config.analytic()?.pass_probability;
            let stats = self.run(&config)?;
            if within_sigma(stats.pass_count, stats.trials, expected, 3.0) {
                within += 1;
            } else {
                r.check(
                    false,
                    format!(
                        "{} message {message}: pass rate {} vs analytic {}",
                        describe(spec),
                        format_sig(stats.pass_rate()),
                        format_sig(expected)
                    ),
                );
            }
        }
        r.check(
            within == shared.len(),
            format!(
                "Monte Carlo: {within}/{} seals within 3 sigma at {} rounds",
                shared.len(),
                self.config.trials
            ),
        );
        Ok(r)
    }

    /// Runs an experiment with the suite's (possibly faulty) family.
    fn run(&self, config: &ExperimentConfig) -> Result<crate::montecarlo::EmpiricalStats> {
        match (self.config.fault, config.strategy) {
            (Some(Fault::FlipBSign), Strategy::Chau { nu }) => {
                // Faulty coefficients only exist outside run_experiment; replay by hand.
                let sealed = config.seal.seal()?;
                let family = self.family(sealed.dim(), nu)?;
                let mut stats = crate::montecarlo::EmpiricalStats {
                    decode_counts: vec![0; sealed.dim()],
                    pass_count: 0,
                    trials: config.trials,
                };
                for round in 0..config.trials {
                    let mut rng = round_rng(config.seed, round);
                    let out = crate::attack::run_chau_attack(&sealed, &family, &mut rng)?;
                    stats.decode_counts[out.decoded] += 1;
                    stats.pass_count += u64::from(crate::seal::verify(&sealed, &out.post_state, &mut rng)?);
                }
                Ok(stats)
            }
            _ => run_experiment(config),
        }
    }

    fn fidelity_collapse(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(6, "projective read (nu = 1) fidelity collapse");
        let mut worst: f64 = 0.0;
        for (_, lambda) in &self.seals {
            for i in 0..lambda.dim() {
                let row = lambda.row(i);
                let quartic: f64 = row.iter().map(|l| l.norm_sqr().powi(2)).sum();
                worst = worst.max((average_fidelity(row, 1.0)? - quartic).abs());
            }
        }
        r.check(
            worst <= 1e-12,
            format!("average fidelity vs sum lambda^4: worst gap {}", format_sig(worst)),
        );
        let mut previous = f64::INFINITY;
        for m in [1usize, 4, 10] {
            let n = 1usize << m;
            check_dimension(n)?;
            let sealed = he_seal(&HeSealSpec::uniform(vec![false; m], FRAC_PI_4)?)?;
            let f = average_fidelity(sealed.state.amplitudes(), 1.0)?;
            let target = 1.0 / n as f64;
            r.check(
                (f - target).abs() <= 1e-12 && f < previous,
                format!("theta=pi/4, N={n}: fidelity {} (1/N = {})", format_sig(f), format_sig(target)),
            );
            previous = f;
        }
        Ok(r)
    }

    fn coin_toss(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(7, "coin-toss analog matches the decode distribution");
        let mut worst: f64 = 0.0;
        for (spec, lambda) in &self.seals {
            for q in NU_GRID {
                let dm = decode_matrix(lambda, q)?;
                for msg in 0..spec.dim() {
                    let sealed = seal_general(lambda, msg)?;
                    let coin = coin_toss_distribution(&sealed.state, q)?;
                    for (a, b) in coin.iter().zip(dm.row(msg)) {
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
        r.check(
            worst <= 1e-15,
            format!("closed forms, q = nu on 5-point grid: worst gap {}", format_sig(worst)),
        );

        for (k, (bits, theta)) in [("0", FRAC_PI_6), ("010", PI / 12.0)].into_iter().enumerate() {
            let spec = HeSealSpec::uniform(crate::seal::parse_bits(bits)?, theta)?;
            let lambda = lambda_from_he(&spec)?;
            let expected = decode_matrix(&lambda, 0.5)?.row(spec.message()).to_vec();
            for (label, strategy) in [("chau nu=1/2", Strategy::Chau { nu: 0.5 }), ("coin q=1/2", Strategy::CoinToss { q: 0.5 })] {
                let config = ExperimentConfig {
                    seal: SealSource::He(spec.clone()),
                    strategy,
                    trials: self.config.trials,
                    seed: self.config.seed.wrapping_add(2000 + k as u64),
                };
                let stats = self.run(&config)?;
                let chi = chi_square_check(&stats, &expected)?;
                r.check(
                    chi.pass,
                    format!(
                        "{} {label}: chi2 = {} (critical {}, df {})",
                        describe(&spec),
                        format_sig(chi.statistic),
                        format_sig(chi.critical_value),
                        chi.degrees_of_freedom
                    ),
                );
            }
            let row = lambda.row(spec.message());
            r.note(format!(
                "{}: post-attack fidelity chau {} vs coin {} (reported, not compared)",
                describe(&spec),
                format_sig(average_fidelity(row, 0.5)?),
                format_sig(coin_toss_average_fidelity(row, 0.5)?)
            ));
        }
        Ok(r)
    }

    fn zero_information(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(8, "zero-information endpoints");
        let mut at_zero: f64 = 0.0;
        for (_, lambda) in &self.seals {
            at_zero = at_zero.max(mutual_information(&decode_matrix(lambda, 0.0)?));
        }
        r.check(at_zero <= 1e-12, format!("nu=0, every seal: max MI {} bits", format_sig(at_zero)));

        let mut flat: f64 = 0.0;
        for m in 1..=6 {
            let lambda = lambda_from_he(&HeSealSpec::uniform(vec![false; m], FRAC_PI_4)?)?;
            for k in 0..=10 {
                flat = flat.max(mutual_information(&decode_matrix(&lambda, k as f64 / 10.0)?));
            }
        }
        r.check(flat <= 1e-12, format!("theta=pi/4, every nu: max MI {} bits", format_sig(flat)));

        for n in [2usize, 4, 16, 256] {
            let mi = mutual_information(&decode_matrix(&LambdaMatrix::identity(n)?, 1.0)?);
            let want = (n as f64).log2();
            r.check(
                (mi - want).abs() <= 1e-12,
                format!("identity seal N={n}, nu=1: MI {} bits (log2 N = {})", format_sig(mi), format_sig(want)),
            );
        }
        Ok(r)
    }

    fn bit_seal(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(9, "single-bit seal: beta <= 1/2 at nu = 1/2");
        for theta in THETA_GRID {
            let p = bit_seal_point(theta, 0.5)?;
            r.check(
                p.beta <= 0.5 + 1e-12,
                format!(
                    "theta={}: alpha={} beta={} alpha+beta={} (9/8 = 1.125 shown for reference only)",
                    format_sig(theta),
                    format_sig(p.alpha),
                    format_sig(p.beta),
                    format_sig(p.alpha + p.beta)
                ),
            );
        }
        Ok(r)
    }

    fn cross_construction(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(10, "per-qubit tensor construction equals coefficient model");
        let mut worst: f64 = 0.0;
        let mut states = 0;
        for (spec, lambda) in &self.seals {
            for msg in 0..spec.dim() {
                let direct = he_seal(&spec.with_message(msg)?)?;
                let general = seal_general(lambda, msg)?;
                for (a, b) in direct.state.amplitudes().iter().zip(general.state.amplitudes()) {
                    worst = worst.max((a - b).norm());
                }
                states += 1;
            }
        }
        r.check(
            worst <= 1e-12,
            format!("{states} sealed states: worst amplitude gap {}", format_sig(worst)),
        );
        Ok(r)
    }

    fn reproducibility(&self) -> Result<ClaimResult> {
        let mut r = ClaimResult::new(11, "seeded runs are reproducible");
        let config = ExperimentConfig {
            seal: SealSource::He(HeSealSpec::uniform(vec![true, false, true], PI / 12.0)?),
            strategy: Strategy::Chau { nu: 0.5 },
            trials: self.config.trials.min(20_000),
            seed: self.config.seed,
        };
        let first = self.run(&config)?;
        let second = self.run(&config)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("thread pool");
        let serial = pool.install(|| self.run(&config))?;
        r.check(
            first == second && first == serial,
            format!(
                "{} rounds, seed {}: repeat and single-thread histograms identical; generator {GENERATOR}",
                config.trials, config.seed
            ),
        );
        Ok(r)
    }
}

/// Unit-norm complex row drawn from substream `stream` of `seed`.
pub fn random_row(seed: u64, stream: u64, n: usize) -> StateVector {
    let mut rng = round_rng(seed, stream);
    loop {
        let raw: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        if let Ok(s) = StateVector::normalized(raw) {
            return s;
        }
    }
}

/// Runs every check in order.
pub fn run_claims(config: ClaimsConfig) -> Result<Vec<ClaimResult>> {
    check_dimension(*COMPLETENESS_DIMS.last().expect("nonempty"))?;
    let seals = he_fixture_suite()
        .into_iter()
        .map(|spec| lambda_from_he(&spec).map(|l| (spec, l)))
        .collect::<Result<Vec<_>>>()?;
    let suite = Suite { config, seals };
    Ok(vec![
        suite.completeness()?,
        suite.closed_form_vs_dense()?,
        suite.floor()?,
        suite.flat_mass()?,
        suite.escape()?,
        suite.fidelity_collapse()?,
        suite.coin_toss()?,
        suite.zero_information()?,
        suite.bit_seal()?,
        suite.cross_construction()?,
        suite.reproducibility()?,
    ])
}

pub fn all_pass(results: &[ClaimResult]) -> bool {
    results.iter().all(|r| r.pass)
}

pub fn render_report(config: &ClaimsConfig, results: &[ClaimResult]) -> String {
    let mut out = format!(
        "claims report: seed={} trials={} generator={GENERATOR}\n",
        config.seed, config.trials
    );
    if let Some(fault) = config.fault {
        out.push_str(&format!("injected fault: {fault:?}\n"));
    }
    for r in results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{verdict} [{:>2}] {}\n", r.id, r.title));
        for d in &r.details {
            out.push_str(&format!("       {d}\n"));
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed}/{} claims passed\n", results.len()));
    out
}
