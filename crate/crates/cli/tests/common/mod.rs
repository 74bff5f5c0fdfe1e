#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pathfreq"))
}

pub fn run_cli(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("PATHFREQ_OUT")
        .output()
        .expect("binary runs")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random spanning tree plus extra random edges; always connected.
pub fn connected_edges(rng: &mut ChaCha8Rng, n: u32, extra: usize) -> Vec<(u32, u32)> {
    let mut edges: Vec<(u32, u32)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..extra {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        edges.push((u, v));
    }
    edges
}

/// Preferential-attachment graph: each new vertex links to `m` distinct
/// earlier vertices chosen proportionally to degree.
pub fn preferential_attachment(rng: &mut ChaCha8Rng, n: u32, m: u32) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    let mut ends: Vec<u32> = Vec::new();
    for u in 0..=m {
        for v in 0..u {
            edges.push((v, u));
            ends.extend([u, v]);
        }
    }
    for v in m + 1..n {
        let mut chosen = Vec::with_capacity(m as usize);
        while chosen.len() < m as usize {
            let t = ends[rng.gen_range(0..ends.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for t in chosen {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    edges
}

pub fn write_edge_list(path: &Path, edges: &[(u32, u32)]) {
    let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
    fs::write(path, text).unwrap();
}

pub fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}
