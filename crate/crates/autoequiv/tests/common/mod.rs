#![allow(dead_code)]

//! Helpers shared by the integration suites.

use std::path::PathBuf;
use std::process::Command;

use autoequiv::graph::{graph_to_model, Graph};
use autoequiv::model::{Element, Model, OperationTable};
use autoequiv::perm::MultiSortedPermutation;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(args: &[&str]) -> CliRun {
    let output = Command::new(env!("CARGO_BIN_EXE_autoequiv"))
        .args(args)
        .env_remove("AUTOEQUIV_BUDGET")
        .output()
        .expect("the autoequiv binary runs");
    CliRun {
        code: output.status.code().unwrap_or(-1),
        stdout: String::from_utf8(output.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(output.stderr).expect("utf-8 stderr"),
    }
}

pub fn star() -> Model {
    graph_to_model(&Graph::undirected(4, [(0, 1), (0, 2), (0, 3)]).unwrap())
}

pub fn triangle_plus_isolated() -> Model {
    graph_to_model(&Graph::undirected(4, [(0, 1), (0, 2), (1, 2)]).unwrap())
}

pub fn path4() -> Model {
    graph_to_model(&Graph::undirected(4, [(0, 1), (1, 2), (2, 3)]).unwrap())
}

/// The isomorphic copy of `m` along an arbitrary sort-wise bijection: both
/// the operation tables and the interpretation are relabeled, so `sigma` is
/// an isomorphism from `m` onto the result by construction.
pub fn transport_model(m: &Model, sigma: &MultiSortedPermutation) -> Model {
    let map = |e: &Element| sigma.apply(*e);
    let operations = m
        .algebra
        .operations
        .iter()
        .map(|op| OperationTable {
            name: op.name.clone(),
            arg_sorts: op.arg_sorts.clone(),
            result_sort: op.result_sort,
            entries: op
                .entries
                .iter()
                .map(|(args, result)| (args.iter().map(map).collect(), map(result)))
                .collect(),
        })
        .collect();
    let mut interpretation = m.interpretation.clone();
    for tuples in interpretation.tuples.values_mut() {
        *tuples = tuples.iter().map(|t| t.iter().map(map).collect()).collect();
        tuples.sort();
    }
    Model {
        algebra: autoequiv::model::Algebra::new(m.algebra.domain.clone(), operations),
        relations: m.relations.clone(),
        interpretation,
    }
}
