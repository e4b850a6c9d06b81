//! Command implementations behind the `switchcert` binary. All inputs and
//! outputs are JSON; exit codes are 0 (success), 1 (a check or verification
//! failed) and 2 (bad input).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{pauli_basis, random_k_copy_basis, unitary_k_copy_basis, ChannelBasis};
use crate::certify::{emit_bound, verify_certificate, CertifyOptions, EtaOptions, ProofCertificate};
use crate::channels::{haar_unitary, random_channel, random_unitary_channel, KrausChannel};
use crate::circuits::{bipartite_aba_circuit, check_simulation, chiribella_circuit, naive_circuit};
use crate::error::{Error, Result};
use crate::io::{read_json, write_json, BasisJson, ChannelJson, OperatorJson};
use crate::sdp::build::{constraint_pairs, DualIndex};
use crate::sdp::problem::Residuals;
use crate::sdp::{build_dual, build_primal, solve, CausalClass, Restriction, SimulationScenario, SolveStatus, SolverOptions};
use crate::switch::apply_switch;
use crate::tensor::{mats, SpaceLayout};

#[derive(Debug, Parser)]
#[command(name = "switchcert", version, about = "Simulation bounds for the quantum switch")]
pub struct Cli {
    /// Seed for every random choice of the command.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Decimal digits kept when rationalizing a dual point.
    #[arg(long, global = true, default_value_t = 6)]
    pub digits: u32,
    /// Solver feasibility tolerance, or the acceptance threshold of circuit checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisKindArg {
    Pauli,
    Random,
    Unitary,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitArg {
    Naive,
    Aba,
    BipartiteAba,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StateArg {
    Zero,
    One,
    Plus,
    Minus,
}

impl StateArg {
    fn ket(self, d: usize) -> DVector<Complex64> {
        match self {
            StateArg::Zero => mats::ket(d, 0),
            StateArg::One => mats::ket(d, 1),
            StateArg::Plus => pad(mats::plus(), d),
            StateArg::Minus => pad(mats::minus(), d),
        }
    }
}

fn pad(v: DVector<Complex64>, d: usize) -> DVector<Complex64> {
    DVector::from_fn(d, |i, _| if i < v.len() { v[i] } else { Complex64::new(0.0, 0.0) })
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spanning set of single-copy Chois whose k-th powers span the k-copy space.
    Basis {
        #[arg(long, value_enum)]
        kind: BasisKindArg,
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Builds and solves the primal (and for combs the dual) SDP of a scenario.
    Solve {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        basis_a: PathBuf,
        #[arg(long)]
        basis_b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the dual solve.
        #[arg(long)]
        primal_only: bool,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long, short)]
        verbose: bool,
    },
    /// Exact certificate from the dual point of a solution file.
    Certify {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// η grid step is 10^-eta_exponent.
        #[arg(long, default_value_t = 7)]
        eta_exponent: u32,
    },
    /// Exact check of a certificate; exit code 0 iff it is accepted.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Compares a circuit with the switch on random inputs.
    VerifyCircuit {
        #[arg(long, value_enum)]
        which: CircuitArg,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Switch {
        #[command(subcommand)]
        command: SwitchCommand,
    },
    Channel {
        #[command(subcommand)]
        command: ChannelCommand,
    },
    /// Restricted qubit scenarios: numeric optimum, certified bound, published bound.
    Table1 {
        /// Row keys; default runs every row within the size budget.
        #[arg(long, value_delimiter = ',')]
        rows: Vec<String>,
        /// Largest comb dimension attempted; bigger rows are reported as heavy.
        #[arg(long, default_value_t = 32)]
        max_dim: usize,
        /// Use only the first n elements of each basis (valid upper bound, reduced constraint set).
        #[arg(long)]
        subset: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Human-readable summary of solution and certificate files.
    Report { paths: Vec<PathBuf> },
}

#[derive(Debug, Subcommand)]
pub enum SwitchCommand {
    /// Output channel S(A, B); with fixed inputs, a channel from a trivial system.
    Apply {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum)]
        control: Option<StateArg>,
        #[arg(long, value_enum)]
        target: Option<StateArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChannelCommand {
    /// Channel with `rank` Kraus operators from a Haar isometry.
    Random {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Named PSD block of a solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedOperator {
    pub name: String,
    pub operator: OperatorJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimalSection {
    pub status: SolveStatus,
    pub objective: f64,
    pub bound: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub blocks: Vec<NamedOperator>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualSection {
    pub status: SolveStatus,
    pub objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub gamma: OperatorJson,
    pub r: Vec<OperatorJson>,
}

/// Contents of `sol.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub scenario: SimulationScenario,
    pub basis_a: BasisJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_b: Option<BasisJson>,
    pub primal: PrimalSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual: Option<DualSection>,
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub scenario: SimulationScenario,
    pub basis_a: BasisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_b: Option<BasisSpec>,
    pub solver: SolverOptions,
    pub certify: Option<CertifyOptions>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BasisSpec {
    pub kind: String,
    pub copies: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<usize>,
}

impl BasisSpec {
    pub fn build(&self) -> Result<ChannelBasis> {
        let b = match self.kind.as_str() {
            "pauli" => pauli_basis(self.copies)?,
            "random" => random_k_copy_basis(self.copies, self.seed)?,
            "unitary" => unitary_k_copy_basis(self.copies, self.seed)?,
            k => return Err(Error::Invalid(format!("unknown basis kind `{k}`"))),
        };
        Ok(match self.subset {
            Some(n) => b.truncated(n),
            None => b,
        })
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// human-readable output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Certification(_) => 1,
                _ => 2,
            }
        }
    }
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_json(p, value),
        None => {
            writeln!(out, "{}", serde_json::to_string_pretty(value)?)?;
            Ok(())
        }
    }
}

fn solver_options(cli: &Cli) -> SolverOptions {
    let mut o = SolverOptions::default();
    if let Some(t) = cli.tol {
        o.feasibility_tol = t;
    }
    o
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Basis { kind, copies, out: path } => {
            let b = match kind {
                BasisKindArg::Pauli => pauli_basis(*copies)?,
                BasisKindArg::Random => random_k_copy_basis(*copies, cli.seed)?,
                BasisKindArg::Unitary => unitary_k_copy_basis(*copies, cli.seed)?,
            };
            emit(&BasisJson::from_basis(&b), path.as_deref(), out)?;
            Ok(0)
        }
        Command::Solve { scenario, basis_a, basis_b, out: path, primal_only, max_iter, verbose } => {
            let scn: SimulationScenario = read_json(scenario)?;
            let a = read_json::<BasisJson>(basis_a)?.to_basis()?;
            let b = match basis_b {
                Some(p) => Some(read_json::<BasisJson>(p)?.to_basis()?),
                None => None,
            };
            let mut opts = solver_options(cli);
            opts.verbose = *verbose;
            if let Some(m) = max_iter {
                opts.max_iterations = *m;
            }
            let file = solve_scenario(&scn, &a, b.as_ref(), &opts, !primal_only)?;
            if path.is_some() {
                writeln!(out, "{}: p* = {:.8} ({:?})", scn.name(), file.primal.objective, file.primal.status)?;
                if let Some(d) = &file.dual {
                    writeln!(out, "dual bound {:.8} ({:?})", d.objective, d.status)?;
                }
            }
            emit(&file, path.as_deref(), out)?;
            Ok(if file.primal.status == SolveStatus::Infeasible { 1 } else { 0 })
        }
        Command::Certify { solution, out: path, eta_exponent } => {
            let sol: SolutionFile = read_json(solution)?;
            let cert = certify_solution(&sol, &CertifyOptions {
                digits: cli.digits,
                eta: EtaOptions { exponent: *eta_exponent, ..Default::default() },
            })?;
            if path.is_some() {
                writeln!(out, "certified p ≤ {} ≈ {:.7} (η = {})", cert.bound, cert.bound_decimal, cert.eta)?;
            }
            emit(&cert, path.as_deref(), out)?;
            Ok(0)
        }
        Command::Verify { cert } => {
            let c: ProofCertificate = read_json(cert)?;
            let report = verify_certificate(&c);
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(if report.accepted { 0 } else { 1 })
        }
        Command::VerifyCircuit { which, trials, out: path } => {
            let tol = cli.tol.unwrap_or(1e-9);
            let report = circuit_trials(*which, *trials, cli.seed, tol)?;
            emit(&report, path.as_deref(), out)?;
            Ok(if report.all_match { 0 } else { 1 })
        }
        Command::Switch { command: SwitchCommand::Apply { a, b, control, target, out: path } } => {
            let a = read_json::<ChannelJson>(a)?.to_channel()?;
            let b = read_json::<ChannelJson>(b)?.to_channel()?;
            let s = apply_switch(&a, &b)?;
            let ch = match (control, target) {
                (None, None) => s,
                (Some(c), Some(t)) => {
                    if a.in_layout().len() != 1 {
                        return Err(Error::Invalid("fixed inputs need single-system channels".into()));
                    }
                    let psi = c.ket(2).kronecker(&t.ket(a.in_dim()));
                    let kraus = s
                        .kraus()
                        .iter()
                        .map(|k| nalgebra::DMatrix::from_column_slice(k.nrows(), 1, (k * &psi).as_slice()))
                        .collect();
                    KrausChannel::new(kraus, SpaceLayout::single("in", 1), s.out_layout().clone())?
                }
                _ => return Err(Error::Invalid("give both --control and --target, or neither".into())),
            };
            emit(&ChannelJson::from_channel(&ch), path.as_deref(), out)?;
            Ok(0)
        }
        Command::Channel { command: ChannelCommand::Random { dim, rank, out: path } } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let ch = random_channel(*dim, *dim, *rank, &mut rng)?;
            emit(&ChannelJson::from_channel(&ch), path.as_deref(), out)?;
            Ok(0)
        }
        Command::Table1 { rows, max_dim, subset, out: path } => {
            let results = table1(cli, rows, *max_dim, *subset, out)?;
            if let Some(p) = path {
                write_json(p, &results)?;
            }
            let failed = results.iter().any(|r| r.verified == Some(false));
            Ok(if failed { 1 } else { 0 })
        }
        Command::Report { paths } => report(paths, out),
    }
}

/// Primal solve, plus the dual solve and its (Γ, R) point for comb scenarios
/// without ε when `with_dual` is set.
pub fn solve_scenario(
    scn: &SimulationScenario,
    a: &ChannelBasis,
    b: Option<&ChannelBasis>,
    opts: &SolverOptions,
    with_dual: bool,
) -> Result<SolutionFile> {
    scn.validate()?;
    let p = solve(&build_primal(scn, a, b)?, opts)?;
    let primal = PrimalSection {
        status: p.status,
        objective: p.objective,
        bound: p.bound,
        residuals: p.residuals.clone(),
        iterations: p.iterations,
        blocks: p
            .blocks
            .iter()
            .map(|(name, op)| NamedOperator { name: name.clone(), operator: OperatorJson::from_operator(op) })
            .collect(),
    };
    let dual = if with_dual && scn.causal_class == CausalClass::Comb && scn.epsilon == 0.0 {
        let d = solve(&build_dual(scn, a, b)?, opts)?;
        let index = DualIndex::new(scn, constraint_pairs(scn, a, b)?.len())?;
        let (gamma, rs) = index.point(&d.variables)?;
        Some(DualSection {
            status: d.status,
            objective: d.objective,
            residuals: d.residuals.clone(),
            iterations: d.iterations,
            gamma: OperatorJson::from_operator(&gamma),
            r: rs.iter().map(OperatorJson::from_operator).collect(),
        })
    } else {
        None
    };
    Ok(SolutionFile {
        scenario: scn.clone(),
        basis_a: BasisJson::from_basis(a),
        basis_b: if scn.identical_channels { None } else { b.map(BasisJson::from_basis) },
        primal,
        dual,
    })
}

pub fn certify_solution(sol: &SolutionFile, opts: &CertifyOptions) -> Result<ProofCertificate> {
    let dual = sol
        .dual
        .as_ref()
        .ok_or_else(|| Error::Invalid("solution has no dual point; solve without --primal-only".into()))?;
    let a = sol.basis_a.to_basis()?;
    let b = sol.basis_b.as_ref().map(|b| b.to_basis()).transpose()?;
    let gamma = dual.gamma.to_operator()?;
    let rs = dual.r.iter().map(|r| r.to_operator()).collect::<Result<Vec<_>>>()?;
    emit_bound(&sol.scenario, &a, b.as_ref(), &gamma, &rs, opts)
}

#[derive(Clone, Debug, Serialize)]
pub struct CircuitTrialReport {
    pub which: CircuitArg,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_choi_distance: f64,
    pub min_fidelity: f64,
    pub max_purity_gap: f64,
    /// Largest `‖Σ K†K − 𝟙‖` over the circuit channels.
    pub max_tp_deviation: f64,
    pub all_match: bool,
}

fn bipartite_channel(kraus: Vec<nalgebra::DMatrix<Complex64>>, party: &str, d: usize, dp: usize) -> Result<KrausChannel> {
    let l = |s: &str| SpaceLayout::new(&[(format!("{party}{s}"), d), (format!("{party}'{s}"), dp)]);
    KrausChannel::new(kraus, l("I")?, l("O")?)
}

/// Unitary inputs for the naive and ABA circuits; a Haar bipartite unitary A
/// and a rank-3 bipartite channel B for the bipartite circuit.
pub fn circuit_trials(which: CircuitArg, trials: usize, seed: u64, tol: f64) -> Result<CircuitTrialReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = CircuitTrialReport {
        which,
        trials,
        seed,
        tol,
        max_choi_distance: 0.0,
        min_fidelity: 1.0,
        max_purity_gap: 0.0,
        max_tp_deviation: 0.0,
        all_match: true,
    };
    for _ in 0..trials {
        let (a, b) = match which {
            CircuitArg::Naive | CircuitArg::Aba => (random_unitary_channel(2, &mut rng), random_unitary_channel(2, &mut rng)),
            CircuitArg::BipartiteAba => (
                bipartite_channel(vec![haar_unitary(4, &mut rng)], "A", 2, 2)?,
                bipartite_channel(random_channel(4, 4, 3, &mut rng)?.kraus().to_vec(), "B", 2, 2)?,
            ),
        };
        let c = match which {
            CircuitArg::Naive => naive_circuit(&a, &b)?,
            CircuitArg::Aba => chiribella_circuit(&a, &b)?,
            CircuitArg::BipartiteAba => bipartite_aba_circuit(&a, &b)?,
        };
        let s = check_simulation(&c.channel, &apply_switch(&a, &b)?, &c.aux)?;
        r.max_choi_distance = r.max_choi_distance.max(s.choi_distance);
        r.min_fidelity = r.min_fidelity.min(s.fidelity);
        r.max_purity_gap = r.max_purity_gap.max(s.purity_gap);
        r.max_tp_deviation = r.max_tp_deviation.max(c.channel.tp_deviation());
    }
    r.all_match = r.max_choi_distance < tol;
    Ok(r)
}

/// One row of the restricted-simulation table.
#[derive(Clone, Debug)]
pub struct TableRow {
    pub key: &'static str,
    pub scenario: SimulationScenario,
    pub basis_a: BasisSpec,
    pub basis_b: Option<BasisSpec>,
    pub certify: bool,
    pub published: &'static str,
}

fn pauli(copies: usize) -> BasisSpec {
    BasisSpec { kind: "pauli".into(), copies, seed: 0, subset: None }
}

fn unitary(copies: usize, seed: u64) -> BasisSpec {
    BasisSpec { kind: "unitary".into(), copies, seed, subset: None }
}

/// Rows of the restricted qubit tables in a fixed order.
pub fn table_rows(seed: u64) -> Vec<TableRow> {
    use Restriction::Restricted;
    let comb = |order: &str| SimulationScenario::comb(order, Restricted);
    let general = |key: &'static str, ka: usize, kb: usize, published: &'static str| TableRow {
        key,
        scenario: comb(key),
        basis_a: pauli(ka),
        basis_b: Some(pauli(kb)),
        certify: true,
        published,
    };
    let identical = |key: &'static str, k: usize, published: &'static str| TableRow {
        key,
        scenario: SimulationScenario::identical(key, Restricted),
        basis_a: pauli(k),
        basis_b: None,
        certify: true,
        published,
    };
    vec![
        general("AB", 1, 1, "p < 4001/10000"),
        identical("AA", 2, "p < 4001/10000"),
        TableRow {
            key: "AB-qccc",
            scenario: SimulationScenario::new("AB", CausalClass::Qccc, Restricted),
            basis_a: pauli(1),
            basis_b: Some(pauli(1)),
            certify: false,
            published: "≤ comb optimum",
        },
        general("AAB", 2, 1, "p < 5715/10000"),
        general("ABA", 2, 1, "p < 4919/10000"),
        general("BAA", 2, 1, "p < 5001/10000"),
        identical("AAA", 3, "p < 6534/10000"),
        TableRow {
            key: "AAB-unitary",
            scenario: comb("AAB"),
            basis_a: unitary(2, seed),
            basis_b: Some(unitary(1, seed + 1)),
            certify: false,
            published: "p ≈ 0.600",
        },
        TableRow {
            key: "BAA-unitary",
            scenario: comb("BAA"),
            basis_a: unitary(2, seed),
            basis_b: Some(unitary(1, seed + 1)),
            certify: false,
            published: "p ≈ 0.851",
        },
        general("AABB", 2, 2, "p < 8307/10000"),
        general("ABAB", 2, 2, "p < 8484/10000"),
        general("ABBA", 2, 2, "p < 8695/10000"),
        general("AAAB", 3, 1, "p < 8373/10000"),
        general("AABA", 3, 1, "p < 6909/10000"),
        general("ABAA", 3, 1, "p < 7597/10000"),
        general("BAAA", 3, 1, "p < 6845/10000"),
        identical("AAAA", 4, "p = 1"),
    ]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableResult {
    pub key: String,
    pub scenario: String,
    pub dim: usize,
    pub heavy: bool,
    pub subset: Option<usize>,
    pub numeric: Option<f64>,
    pub status: Option<SolveStatus>,
    pub certified: Option<String>,
    pub certified_decimal: Option<f64>,
    pub verified: Option<bool>,
    pub published: String,
    pub seconds: f64,
}

pub fn run_row(row: &TableRow, subset: Option<usize>, solver: &SolverOptions, cert: &CertifyOptions) -> Result<TableResult> {
    let t = Instant::now();
    let mut spec_a = row.basis_a.clone();
    spec_a.subset = subset;
    let a = spec_a.build()?;
    let b = match &row.basis_b {
        Some(s) => Some(BasisSpec { subset, ..s.clone() }.build()?),
        None => None,
    };
    let sol = solve_scenario(&row.scenario, &a, b.as_ref(), solver, row.certify)?;
    let mut r = TableResult {
        key: row.key.into(),
        scenario: row.scenario.name(),
        dim: row.scenario.variable_layout()?.total_dim(),
        heavy: false,
        subset,
        numeric: Some(sol.primal.objective),
        status: Some(sol.primal.status),
        certified: None,
        certified_decimal: None,
        verified: None,
        published: row.published.into(),
        seconds: 0.0,
    };
    if row.certify {
        let c = certify_solution(&sol, cert)?;
        r.verified = Some(verify_certificate(&c).accepted);
        r.certified_decimal = Some(c.bound_decimal);
        r.certified = Some(c.bound);
    }
    r.seconds = t.elapsed().as_secs_f64();
    Ok(r)
}

fn table1(cli: &Cli, keys: &[String], max_dim: usize, subset: Option<usize>, out: &mut dyn Write) -> Result<Vec<TableResult>> {
    let all = table_rows(cli.seed);
    let rows: Vec<&TableRow> = if keys.is_empty() {
        all.iter().collect()
    } else {
        keys.iter()
            .map(|k| all.iter().find(|r| r.key == k).ok_or_else(|| Error::Invalid(format!("unknown row `{k}`"))))
            .collect::<Result<_>>()?
    };
    let solver = solver_options(cli);
    let cert = CertifyOptions { digits: cli.digits, ..Default::default() };
    writeln!(out, "{:<12} {:>5} {:>11} {:>22} {:>9}  {}", "row", "dim", "numeric", "certified", "verified", "published")?;
    let mut results = vec![];
    for row in rows {
        let dim = row.scenario.variable_layout()?.total_dim();
        let r = if dim > max_dim {
            TableResult {
                key: row.key.into(),
                scenario: row.scenario.name(),
                dim,
                heavy: true,
                subset,
                numeric: None,
                status: None,
                certified: None,
                certified_decimal: None,
                verified: None,
                published: row.published.into(),
                seconds: 0.0,
            }
        } else {
            run_row(row, subset, &solver, &cert)?
        };
        let numeric = match (r.heavy, r.numeric) {
            (true, _) => "heavy".to_string(),
            (_, Some(p)) => format!("{p:.6}"),
            _ => "-".into(),
        };
        let certified = match (&r.certified, r.certified_decimal) {
            (Some(_), Some(x)) => format!("{x:.7}"),
            _ => "-".into(),
        };
        let verified = r.verified.map(|v| if v { "yes" } else { "NO" }).unwrap_or("-");
        let note = if subset.is_some() && !r.heavy { " (valid upper bound, reduced constraint set)" } else { "" };
        writeln!(out, "{:<12} {:>5} {:>11} {:>22} {:>9}  {}{note}", r.key, r.dim, numeric, certified, verified, r.published)?;
        results.push(r);
    }
    Ok(results)
}

fn report(paths: &[PathBuf], out: &mut dyn Write) -> Result<i32> {
    if paths.is_empty() {
        return Err(Error::Invalid("no files given".into()));
    }
    let mut code = 0;
    for p in paths {
        let text = std::fs::read_to_string(p)?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
        if value.get("gamma_ok").is_some() {
            let c: ProofCertificate = serde_json::from_value(value).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            let v = verify_certificate(&c);
            writeln!(out, "{}: certificate for {}", p.display(), c.scenario.name())?;
            writeln!(out, "  bound {} ≈ {:.7}, η = {}, {} digits", c.bound, c.bound_decimal, c.eta, c.digits)?;
            writeln!(out, "  verdict: {}", if v.accepted { "accepted" } else { "REJECTED" })?;
            for f in &v.failures {
                writeln!(out, "    {f}")?;
            }
            if !v.accepted {
                code = 1;
            }
        } else if value.get("primal").is_some() {
            let s: SolutionFile = serde_json::from_value(value).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            writeln!(out, "{}: solution for {}", p.display(), s.scenario.name())?;
            let r = &s.primal.residuals;
            writeln!(out, "  primal {:?}: objective {:.8}, {} iterations", s.primal.status, s.primal.objective, s.primal.iterations)?;
            writeln!(out, "  residuals: equality {:.2e}, gap {:.2e}", r.max_equality_violation, r.relative_gap)?;
            for (name, e) in &r.min_eigenvalues {
                writeln!(out, "  min eigenvalue {name}: {e:.2e}")?;
            }
            if let Some(d) = &s.dual {
                writeln!(out, "  dual {:?}: bound {:.8}, gap to primal {:.2e}", d.status, d.objective, (d.objective - s.primal.objective).abs())?;
            }
            if s.primal.status == SolveStatus::Infeasible {
                code = 1;
            }
        } else {
            return Err(Error::Parse(format!("{}: neither a solution nor a certificate", p.display())));
        }
    }
    Ok(code)
}
