use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rigidity::certify::{self, Evidence};
use rigidity::edm::{edm_check, edm_from_configuration, projected_gram};
use rigidity::falsify::equivalent_framework_search;
use rigidity::flex::{find_affine_flex, quadric_basis_edges};
use rigidity::framework::write_framework_text;
use rigidity::gale::{gale_matrix, general_position_check};
use rigidity::lateration::{find_lateration_order, purify};
use rigidity::linalg::sym_eigen;
use rigidity::report::{build_report, matrix_json};
use rigidity::stress::{stress_space_basis_with, verify_stress, StressReport};
use rigidity::textio::{format_g17, matrix_to_text};
use rigidity::{fixtures, parse_framework_with, Configuration, Framework};
use serde_json::{json, Value};

use crate::{Failure, Format, RunConfig};

type Dump<'a> = Option<&'a Option<PathBuf>>;

fn load(cfg: &RunConfig) -> Result<Framework, Failure> {
    let text = fs::read_to_string(&cfg.input).map_err(|e| Failure::input(format!("{}: {e}", cfg.input.display())))?;
    parse_framework_with(&text, &cfg.tol).map_err(|e| Failure::input(format!("{}: {e}", cfg.input.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

/// Prints the summary, then any dumps that go to standard output.
fn emit(cfg: &RunConfig, human: &str, value: &Value, dumps: &[(Dump, String)]) -> Result<(), Failure> {
    let to_stdout = dumps.iter().any(|(d, _)| matches!(d, Some(None)));
    if to_stdout && cfg.format == Format::Json {
        return Err(Failure::input("matrix dumps need a PATH when the report is JSON"));
    }
    for (dump, text) in dumps {
        if let Some(Some(path)) = dump {
            write_file(path, text)?;
        }
    }
    match cfg.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).expect("summary serializes")),
        Format::Human => print!("{human}"),
    }
    for (dump, text) in dumps {
        if let Some(None) = dump {
            print!("{text}");
        }
    }
    Ok(())
}

fn one_based(set: &[usize]) -> String {
    let labels: Vec<String> = set.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", labels.join(","))
}

fn witness_config(evidence: &Evidence<f64>) -> Option<&Configuration> {
    match evidence {
        Evidence::Flex { witness, .. } => Some(&witness.q),
        Evidence::Equivalent(w) => Some(&w.q),
        _ => None,
    }
}

pub fn check(cfg: &RunConfig, dimensional: bool, witness_out: Option<&Path>, timings: bool) -> Result<u8, Failure> {
    let start = Instant::now();
    let framework = load(cfg)?;
    let cert = if dimensional {
        certify::certify_dimensional_rigidity(&framework, cfg.seed, &cfg.budget, &cfg.tol)?
    } else {
        certify::certify_universal_rigidity(&framework, cfg.seed, &cfg.budget, &cfg.tol)?
    };
    let timings_ms = timings.then(|| BTreeMap::from([("total".to_string(), start.elapsed().as_secs_f64() * 1e3)]));
    let mut report = build_report(&cfg.input.display().to_string(), &framework, &cert, cfg.seed, &cfg.budget, &cfg.tol, timings_ms);

    let mut witness_line = String::new();
    if let (Some(path), Some(q)) = (witness_out, witness_config(&cert.evidence)) {
        write_file(path, &write_framework_text(framework.graph(), q))?;
        report.evidence["witness_path"] = json!(path.display().to_string());
        witness_line = format!("witness: {}\n", path.display());
    }

    match cfg.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Human => {
            let mut out = format!(
                "verdict: {}\npath: {}\nreverified: {}\n{witness_line}",
                report.verdict, report.theorem_path, report.evidence["reverified"]
            );
            for (name, value) in &report.residuals {
                out.push_str(&format!("residual {name}: {}\n", format_g17(*value)));
            }
            if let Some(notes) = report.evidence["diagnostics"]["notes"].as_array() {
                for note in notes.iter().filter_map(Value::as_str) {
                    out.push_str(&format!("note: {note}\n"));
                }
            }
            print!("{out}");
        }
    }
    Ok(cert.verdict.exit_code() as u8)
}

pub fn edm(cfg: &RunConfig, dump: Dump) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    let d = edm_from_configuration(framework.config()).into_matrix();
    let check = edm_check(&d, &cfg.tol)?;
    let gram = sym_eigen(projected_gram(framework.config()).matrix());
    let mut spectrum: Vec<f64> = gram.values.as_slice().to_vec();
    spectrum.reverse();
    let value = json!({
        "n": framework.n(),
        "r": framework.dim(),
        "is_edm": check.is_edm,
        "embedding_dim": check.embedding_dim,
        "min_eigenvalue": check.min_eigenvalue,
        "gram_eigenvalues": spectrum,
        "edm": matrix_json(&d),
    });
    let spectrum: Vec<String> = spectrum.iter().map(|&x| format_g17(x)).collect();
    let human = format!(
        "n = {}, r = {}\nEDM: {}, embedding dimension {}\nprojected Gram eigenvalues: {}\n",
        framework.n(),
        framework.dim(),
        check.is_edm,
        check.embedding_dim,
        spectrum.join(" ")
    );
    emit(cfg, &human, &value, &[(dump, matrix_to_text(&d))])?;
    Ok(0)
}

pub fn gale(cfg: &RunConfig, dump: Dump) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    let gale = gale_matrix(framework.config(), &cfg.tol)?;
    let z = gale.matrix();
    let null_residual = (framework.config().extended_matrix() * z).norm();
    let text = matrix_to_text(z);
    let value = json!({
        "n": framework.n(),
        "r": framework.dim(),
        "gale_dim": gale.dim(),
        "null_residual": null_residual,
        "gale": matrix_json(z),
    });
    let human = format!("Gale matrix, {} x {} (residual {null_residual:e}):\n{text}", z.nrows(), z.ncols());
    emit(cfg, &human, &value, &[(dump, text)])?;
    Ok(0)
}

pub fn genpos(cfg: &RunConfig) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    let gp = general_position_check(framework.config(), &cfg.tol);
    let subsets: Vec<Vec<usize>> = gp.dependent_subsets.iter().map(|s| s.iter().map(|v| v + 1).collect()).collect();
    let value = json!({
        "in_general_position": gp.in_general_position,
        "dependent_subsets": subsets,
        "min_margin": gp.min_margin,
    });
    let mut human = format!("{}\n", gp.in_general_position);
    for s in &gp.dependent_subsets {
        human.push_str(&format!("dependent {}\n", one_based(s)));
    }
    emit(cfg, &human, &value, &[])?;
    Ok(0)
}

pub fn flex(cfg: &RunConfig, all: bool, witness_out: Option<&Path>) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    let found = find_affine_flex(&framework, &cfg.tol)?;
    let basis = if all { quadric_basis_edges(&framework, &cfg.tol) } else { Vec::new() };
    let mut value = json!({ "affine_flex": found.is_some() });
    let mut human = format!("affine flex: {}\n", found.is_some());
    if let Some((phi, witness)) = &found {
        value["phi"] = matrix_json(phi.matrix());
        value["a"] = matrix_json(&witness.a);
        value["equivalence_residual"] = json!(witness.equivalence_residual);
        value["distance_change"] = json!(witness.distance_change);
        human.push_str(&format!("Phi:\n{}", matrix_to_text(phi.matrix())));
        human.push_str(&format!(
            "witness: equivalence residual {:e}, distance change {:e}\n",
            witness.equivalence_residual, witness.distance_change
        ));
        if let Some(path) = witness_out {
            write_file(path, &write_framework_text(framework.graph(), &witness.q))?;
            value["witness_path"] = json!(path.display().to_string());
            human.push_str(&format!("witness written to {}\n", path.display()));
        }
    }
    if all {
        value["quadric_basis"] = Value::Array(basis.iter().map(matrix_json).collect());
        human.push_str(&format!("quadrics at infinity: dimension {}\n", basis.len()));
        for phi in &basis {
            human.push_str(&matrix_to_text(phi));
        }
    }
    emit(cfg, &human, &value, &[])?;
    Ok(0)
}

fn stress_summary(report: &StressReport, bound: usize) -> String {
    let shape = if report.psd { format!("PSD rank {}", report.rank) } else { format!("not PSD, rank {}", report.rank) };
    format!(
        "verification: {}, {shape} (n-r-1 = {bound}), equilibrium residual {:e}, max missing entry {:e}\n",
        if report.passes { "passes" } else { "fails" },
        report.equilibrium_residual,
        report.max_missing_entry
    )
}

pub fn stress(cfg: &RunConfig, lateration: bool, dump_stress: Dump, dump_psi: Dump) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    framework.require_certifiable()?;
    let gale = gale_matrix(framework.config(), &cfg.tol)?;
    let basis = stress_space_basis_with(&framework, gale.clone(), &cfg.tol)?;
    let bound = framework.gale_dim();
    let mut value = json!({ "stress_space_dim": basis.dim(), "rank_bound": bound });
    let mut human = format!("stress space dimension {}\n", basis.dim());

    let found = if lateration {
        let order = find_lateration_order(framework.graph(), framework.dim(), cfg.budget.lateration_nodes)?
            .ok_or_else(|| Failure::other(format!("graph is not an {}-lateration graph", framework.dim() + 1)))?;
        let p = purify(&framework, &order, &gale, &cfg.tol)?;
        value["lateration_order"] = json!(order.order().iter().map(|v| v + 1).collect::<Vec<_>>());
        human.push_str(&format!("lateration order: {}\n", one_based(order.order())));
        let mut log = Vec::new();
        for s in &p.steps {
            human.push_str(&format!(
                "step k={} vertex={} |xi|={:e} solve residual {:e} column residual {:e}\n",
                s.k + 1,
                s.vertex + 1,
                s.xi_norm,
                s.solve_residual,
                s.column_residual
            ));
            log.push(json!({
                "k": s.k + 1,
                "vertex": s.vertex + 1,
                "xi_norm": s.xi_norm,
                "solve_residual": s.solve_residual,
                "column_residual": s.column_residual,
            }));
        }
        value["steps"] = Value::Array(log);
        Some((p.stress.into_matrix(), p.psi))
    } else {
        let cert = certify::max_rank_psd_stress_search(&framework, cfg.seed, &cfg.budget, &cfg.tol)?;
        if cert.is_none() {
            human.push_str("no positive definite Psi found within budget\n");
        }
        cert.map(|c| (c.stress, c.psi))
    };

    let mut dumps = Vec::new();
    match &found {
        Some((s, psi)) => {
            let report = verify_stress(&framework, s, &cfg.tol);
            human.push_str(&stress_summary(&report, bound));
            value["verification"] = serde_json::to_value(&report).expect("report serializes");
            value["stress"] = matrix_json(s);
            value["psi"] = matrix_json(psi);
            let z = gale.matrix();
            let mut psi_text = matrix_to_text(psi);
            let mut residuals = Vec::new();
            for (i, j) in framework.missing_edges() {
                let r = (z.row(i) * psi * z.row(j).transpose())[(0, 0)];
                psi_text.push_str(&format!("# constraint {} {} {}\n", i + 1, j + 1, format_g17(r)));
                residuals.push(json!([i + 1, j + 1, r]));
            }
            value["psi_constraint_residuals"] = Value::Array(residuals);
            dumps.push((dump_stress, matrix_to_text(s)));
            dumps.push((dump_psi, psi_text));
        }
        None => value["verification"] = Value::Null,
    }
    emit(cfg, &human, &value, &dumps)?;
    Ok(0)
}

pub fn falsify(cfg: &RunConfig, witness_out: Option<&Path>) -> Result<u8, Failure> {
    let framework = load(cfg)?;
    let found = equivalent_framework_search(&framework, cfg.seed, cfg.budget.falsifier_samples, &cfg.tol);
    let mut value = json!({ "found": found.is_some(), "samples": cfg.budget.falsifier_samples });
    let mut human = format!("equivalent non-congruent framework: {}\n", found.is_some());
    if let Some(w) = &found {
        let d = edm_from_configuration(&w.q).into_matrix();
        let missing: Vec<Value> = framework.missing_edges().iter().map(|&(i, j)| json!([i + 1, j + 1, d[(i, j)]])).collect();
        value["t"] = json!(w.t);
        value["t_max"] = json!(w.t_max);
        value["dim"] = json!(w.dim);
        value["equivalence_residual"] = json!(w.equivalence_residual);
        value["distance_change"] = json!(w.distance_change);
        value["missing_distances"] = Value::Array(missing);
        human.push_str(&format!(
            "t = {} of t_max = {}, dimension {}, equivalence residual {:e}, distance change {:e}\n",
            format_g17(w.t),
            format_g17(w.t_max),
            w.dim,
            w.equivalence_residual,
            w.distance_change
        ));
        for (i, j) in framework.missing_edges() {
            human.push_str(&format!("d({},{}) = {}\n", i + 1, j + 1, format_g17(d[(i, j)])));
        }
        if let Some(path) = witness_out {
            write_file(path, &write_framework_text(framework.graph(), &w.q))?;
            value["witness_path"] = json!(path.display().to_string());
            human.push_str(&format!("witness written to {}\n", path.display()));
        }
    }
    emit(cfg, &human, &value, &[])?;
    Ok(0)
}

pub fn fixtures(dir: &Path) -> Result<u8, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::other(format!("{}: {e}", dir.display())))?;
    for (name, text) in fixtures::all_texts() {
        let path = dir.join(name);
        write_file(&path, &text)?;
        println!("{}", path.display());
    }
    Ok(0)
}
