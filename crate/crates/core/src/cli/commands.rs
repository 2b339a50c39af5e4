use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use super::artifacts::{fmt_float, read_csv, read_orbital_columns, read_report, Artifacts};
use super::config::RunConfig;
use super::{Which, EXIT_NO_CONVERGENCE, EXIT_OK, EXIT_VERDICT};
use crate::diagnostics::{
    check_condition_3d1, check_condition_3p1, check_hund, check_stationarity, check_symmetry_breaking, ConditionReport,
    HundInput, Verdict,
};
use crate::energy::{total_energy, MCState, MixingVector, Mode};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialOrbital};
use crate::slater_condon::HamiltonianParams;
use crate::solver::{
    ci_diagonalize, ci_orbitals, classify_state, ls_basis, minimize_j1, minimize_symmetric, symmetry_breaking_runs,
    CIEigenvalues, Solution, SolveMode, Symmetry, TraceRow,
};
use crate::trial::SLOT_ELL;

const LS_TERMS: [&str; 5] = ["1P_sp", "1P_pd", "3P_sp", "3P_pd", "3D_pd"];

pub fn manifest_text(command: &str, config: &RunConfig) -> Result<String> {
    Ok(format!(
        "program = \"mchf {}\"\ncommand = \"{command}\"\ngrid_rule = \"{}\"\n{}",
        env!("CARGO_PKG_VERSION"),
        RadialGrid::RULE,
        config.to_toml()?
    ))
}

pub fn solution_tag(mode: SolveMode, symmetry: Symmetry) -> String {
    format!("{mode}_{symmetry}")
}

/// Coefficients of the mixing vector along each LS term present in its mode.
fn ls_amplitudes(coeffs: &[f64]) -> Vec<(&'static str, f64)> {
    let basis = ls_basis();
    let n = coeffs.len();
    LS_TERMS
        .iter()
        .enumerate()
        .filter(|(j, _)| n == 5 || LS_TERMS[*j].ends_with("sp"))
        .map(|(j, name)| (*name, (0..n).map(|i| basis[(i, j)] * coeffs[i]).sum()))
        .collect()
}

pub fn write_solution(art: &Artifacts, sol: &Solution) -> Result<()> {
    let s = &sol.state;
    let mut columns = vec!["r".to_string()];
    columns.extend((0..s.orbitals.len()).map(|k| format!("R{k}")));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let rows: Vec<Vec<f64>> = (0..s.grid.len())
        .map(|i| std::iter::once(s.grid.r()[i]).chain(s.orbitals.iter().map(|o| o.values[i])).collect())
        .collect();
    art.write_csv("orbitals.csv", &cols, &rows)?;
    let trace: Vec<Vec<f64>> = sol
        .trace
        .iter()
        .map(|t| vec![t.iteration as f64, t.energy, t.residual])
        .collect();
    art.write_csv("trace.csv", &["iteration", "energy", "residual"], &trace)?;

    let mut body = format!(
        "mode = {}\nsymmetry = {}\nconverged = {}\niterations = {}\nresidual = {}\nclassification = {}\n",
        sol.solve_mode,
        sol.symmetry,
        sol.converged,
        sol.iterations(),
        fmt_float(sol.residual),
        sol.classification
    );
    for (i, x) in s.coeffs().iter().enumerate() {
        body.push_str(&format!("mixing_{i} = {}\n", fmt_float(*x)));
    }
    for (name, a) in ls_amplitudes(s.coeffs()) {
        body.push_str(&format!("amplitude_{name} = {}\n", fmt_float(a)));
    }
    body.push_str(&sol.report.to_text());
    art.write_text("energy.report", &body)?;
    Ok(())
}

/// Reads back a solution written by [`write_solution`].
pub fn load_solution(dir: &Path, grid: &Arc<RadialGrid>, params: HamiltonianParams) -> Result<Solution> {
    let report = read_report(&dir.join("energy.report"))?;
    let get = |k: &str| {
        report
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Config(format!("{}: missing `{k}`", dir.join("energy.report").display())))
    };
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|e| Error::Config(format!("`{k}`: {e}"))) };
    let solve_mode: SolveMode = get("mode")?.parse()?;
    let symmetry: Symmetry = get("symmetry")?.parse()?;
    let converged = get("converged")? == "true";
    let residual = num("residual")?;
    let columns = read_orbital_columns(&dir.join("orbitals.csv"), grid)?;
    let mode = if columns.len() == Mode::Sp.n_orbitals() { Mode::Sp } else { Mode::SpPd };
    let orbitals = columns
        .into_iter()
        .enumerate()
        .map(|(k, v)| RadialOrbital::new(SLOT_ELL[k.min(5)], v))
        .collect();
    let mixing = (0..mode.n_configs())
        .map(|i| num(&format!("mixing_{i}")))
        .collect::<Result<Vec<f64>>>()?;
    let state = MCState::new(mode, orbitals, MixingVector::new(mixing)?, grid.clone(), params)?;
    let (_, rows) = read_csv(&dir.join("trace.csv"))?;
    let trace = rows
        .iter()
        .map(|r| TraceRow {
            iteration: r[0] as usize,
            energy: r[1],
            residual: r[2],
        })
        .collect();
    Ok(Solution {
        solve_mode,
        symmetry,
        report: total_energy(&state)?,
        classification: classify_state(&state),
        state,
        trace,
        converged,
        residual,
    })
}

fn solve_one(config: &RunConfig, grid: &Arc<RadialGrid>, params: HamiltonianParams) -> Result<Solution> {
    match config.symmetry {
        Symmetry::J1 => minimize_j1(config.mode, params, grid, &config.solver, None),
        s => minimize_symmetric(config.mode, s, params, grid, &config.solver),
    }
}

fn print_solution(sol: &Solution) {
    println!("mode = {}", sol.solve_mode);
    println!("symmetry = {}", sol.symmetry);
    println!("energy = {:.10}", sol.energy());
    println!("classification = {}", sol.classification);
    for (name, a) in ls_amplitudes(sol.state.coeffs()) {
        if a.abs() > 1e-12 {
            println!("amplitude_{name} = {a:.7}");
        }
    }
    println!("converged = {} after {} iterations", sol.converged, sol.iterations());
}

pub(super) fn solve(config: &RunConfig) -> Result<i32> {
    let grid = config.grid()?;
    let params = config.params()?;
    let art = Artifacts::create(&config.output_dir, &manifest_text("solve", config)?)?;
    let sol = solve_one(config, &grid, params)?;
    write_solution(&art, &sol)?;
    print_solution(&sol);
    println!("artifacts = {}", art.dir.display());
    if sol.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: no convergence within max_iter = {}", config.solver.max_iter);
        Ok(EXIT_NO_CONVERGENCE)
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    grid: Arc<RadialGrid>,
    params: HamiltonianParams,
    reuse: bool,
    solved: HashMap<(SolveMode, Symmetry), Solution>,
}

impl Context<'_> {
    /// A converged prerequisite, solved once per process or loaded with `--reuse`.
    fn solution(&mut self, mode: SolveMode, symmetry: Symmetry) -> Result<Solution> {
        if let Some(s) = self.solved.get(&(mode, symmetry)) {
            return Ok(s.clone());
        }
        let run = self.config.for_solve(mode, symmetry);
        let dir = self.config.output_dir.join(solution_tag(mode, symmetry));
        let sol = if self.reuse {
            load_solution(&dir, &self.grid, self.params).map_err(|e| match e {
                Error::MissingPrerequisite(msg) => Error::MissingPrerequisite(format!(
                    "{msg}; run `mchf solve --mode {mode} --symmetry {symmetry} --output_dir {}`",
                    dir.display()
                )),
                e => e,
            })?
        } else {
            let sol = solve_one(&run, &self.grid, self.params)?;
            let art = Artifacts::create(&dir, &manifest_text("solve", &RunConfig { output_dir: dir.clone(), ..run })?)?;
            write_solution(&art, &sol)?;
            sol
        };
        let sol = sol.into_converged()?;
        self.solved.insert((mode, symmetry), sol.clone());
        Ok(sol)
    }
}

struct Checked {
    file: String,
    report: ConditionReport,
    expected: Verdict,
}

fn check(ctx: &mut Context, which: Which, art: &Artifacts) -> Result<Vec<Checked>> {
    use SolveMode::{Pd, Sp, SpPd};
    use Symmetry::{SingletP1, TripletD1, TripletP1, J1};
    let holds = |file: &str, report| Checked {
        file: file.to_string(),
        report,
        expected: Verdict::Holds,
    };
    Ok(match which {
        Which::TripletP1 => {
            let report = check_condition_3p1(&ctx.solution(SpPd, TripletP1)?)?;
            if let Some(p) = &report.profile {
                let cols: Vec<&str> = p.columns.iter().map(String::as_str).collect();
                art.write_csv("F_over_R2.csv", &cols, &p.rows)?;
            }
            vec![holds("condition.3P1.report", report)]
        }
        Which::TripletD1 => {
            let d = ctx.solution(Pd, TripletD1)?;
            let p = ctx.solution(SpPd, TripletP1)?;
            vec![holds("condition.3D1.report", check_condition_3d1(&d, &p)?)]
        }
        Which::Hund => {
            let s = ctx.solution(Sp, SingletP1)?;
            let report = check_hund(&HundInput::sp_pair(), &s.state.orbitals, ctx.params, &ctx.grid)?;
            vec![holds("condition.hund.report", report)]
        }
        Which::Stationarity => [(SpPd, SingletP1), (Pd, TripletD1), (SpPd, TripletP1)]
            .into_iter()
            .map(|(m, s)| {
                let report = check_stationarity(&ctx.solution(m, s)?)?;
                Ok(holds(&format!("condition.stationarity.{}.report", solution_tag(m, s)), report))
            })
            .collect::<Result<Vec<_>>>()?,
        Which::Breaking => {
            let mode = ctx.config.mode;
            let symmetric: Vec<Solution> = match mode {
                Sp => vec![ctx.solution(Sp, TripletP1)?, ctx.solution(Sp, SingletP1)?],
                SpPd => vec![
                    ctx.solution(SpPd, TripletP1)?,
                    ctx.solution(SpPd, SingletP1)?,
                    ctx.solution(Pd, TripletD1)?,
                ],
                Pd => return Err(Error::Config("the symmetry-breaking check runs in mode sp or sp+pd".into())),
            };
            let mut relaxed = ctx.solution(mode, J1)?;
            let mut starts = Vec::new();
            if mode == SpPd && !ctx.reuse {
                let seeds: Vec<u64> = (0..ctx.config.starts as u64).map(|k| ctx.config.solver.seed + k).collect();
                let multi = symmetry_breaking_runs(&symmetric[0], &seeds, ctx.params, &ctx.grid, &ctx.config.solver)?;
                starts = multi.energies.clone();
                let best = multi.best.into_converged()?;
                if best.energy() < relaxed.energy() {
                    relaxed = best;
                }
            }
            let refs: Vec<&Solution> = symmetric.iter().collect();
            let mut report = check_symmetry_breaking(&relaxed, &refs)?;
            for (k, e) in starts.iter().enumerate() {
                report.push(&format!("perturbed_start_{k}"), *e);
            }
            report.note("mode", mode.name());
            let expected = if mode == Sp { Verdict::Fails } else { Verdict::Holds };
            vec![Checked {
                file: "condition.symmetry-breaking.report".into(),
                report,
                expected,
            }]
        }
        Which::All => {
            let mut out = Vec::new();
            for w in [Which::TripletP1, Which::TripletD1, Which::Hund, Which::Stationarity, Which::Breaking] {
                out.extend(check(ctx, w, art)?);
            }
            out
        }
    })
}

pub(super) fn verify(config: &RunConfig, which: Which, reuse: bool) -> Result<i32> {
    let name = format!("{which:?}").to_lowercase();
    let art = Artifacts::create(&config.output_dir, &manifest_text(&format!("verify {name}"), config)?)?;
    let mut ctx = Context {
        config,
        grid: config.grid()?,
        params: config.params()?,
        reuse,
        solved: HashMap::new(),
    };
    let mut code = EXIT_OK;
    for c in check(&mut ctx, which, &art)? {
        let path = art.write_text(&c.file, &c.report.to_text())?;
        let ok = c.report.verdict == c.expected;
        println!(
            "{}: {} (expected {}) -> {}",
            c.report.id,
            c.report.verdict,
            c.expected,
            path.display()
        );
        if !ok {
            code = EXIT_VERDICT;
        }
    }
    Ok(code)
}

/// The eigenvalue table printed by `ci`.
pub fn ci_table(ci: &CIEigenvalues) -> String {
    let mut out = String::from("block  index  eigenvalue\n");
    let rows = [
        ("3P1", 1, ci.triplet_p[0]),
        ("3P1", 2, ci.triplet_p[1]),
        ("1P1", 1, ci.singlet_p[0]),
        ("1P1", 2, ci.singlet_p[1]),
        ("3D1", 1, ci.triplet_d),
    ];
    for (block, k, e) in rows {
        out.push_str(&format!("{block:<5}  {k:<5}  {}\n", fmt_float(e)));
    }
    let trace = ci.ls_hamiltonian.trace();
    let sum: f64 = rows.iter().map(|r| r.2).sum();
    out.push_str(&format!("trace = {}\n", fmt_float(trace)));
    out.push_str(&format!("eigenvalue_sum = {}\n", fmt_float(sum)));
    out.push_str(&format!("trace_gap = {}\n", fmt_float((trace - sum).abs())));
    out.push_str(&format!("off_block_max = {}\n", fmt_float(ci.off_block)));
    out.push_str(&format!("hund_ordering = {}\n", ci.triplet_p[0] < ci.singlet_p[0]));
    out
}

pub(super) fn ci(config: &RunConfig, orbitals: Option<&Path>) -> Result<i32> {
    let grid = config.grid()?;
    let params = config.params()?;
    let set = match orbitals {
        Some(path) => {
            let columns = read_orbital_columns(path, &grid)?;
            if columns.len() != Mode::SpPd.n_orbitals() {
                return Err(Error::MissingPrerequisite(format!(
                    "{} lacks R4; run `mchf solve --mode sp+pd` for an sp+pd orbital set",
                    path.display()
                )));
            }
            [0usize, 1, 2, 4]
                .iter()
                .map(|&k| RadialOrbital::new(SLOT_ELL[k], columns[k].clone()))
                .collect()
        }
        None => {
            if config.mode != SolveMode::SpPd {
                return Err(Error::Config("ci needs sp+pd orbitals: use --mode sp+pd or --orbitals".into()));
            }
            let sol = solve_one(config, &grid, params)?.into_converged()?;
            println!("orbitals = {} {} minimizer, energy {:.10}", sol.solve_mode, sol.symmetry, sol.energy());
            ci_orbitals(&sol.state)?
        }
    };
    let ci = ci_diagonalize(&set, params, &grid)?;
    print!("{}", ci_table(&ci));
    Ok(EXIT_OK)
}
