// Plain-text and PGM dumps for plotting and debugging.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::analysis::ScatterSample;
use crate::grid::Plane;
use crate::keystream::Permutation;
use crate::lorenz::Trajectory;
use crate::Result;

pub fn histogram_csv(hist: &[u64]) -> String {
    let mut s = String::from("bin,count\n");
    for (bin, count) in hist.iter().enumerate() {
        let _ = writeln!(s, "{bin},{count}");
    }
    s
}

pub fn scatter_csv(sample: &ScatterSample) -> String {
    let mut s = format!("# seed={}\nvalue,neighbor\n", sample.seed);
    for (a, b) in &sample.pairs {
        let _ = writeln!(s, "{a},{b}");
    }
    s
}

/// One line per permutation, indices comma separated.
pub fn permutations_csv(perms: &[Permutation]) -> String {
    let mut s = String::new();
    for p in perms {
        let line: Vec<String> = p.as_slice().iter().map(usize::to_string).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::with_capacity(traj.len() * 64);
    s.push_str("t,x,y,z\n");
    for i in 0..traj.len() {
        let _ = writeln!(s, "{},{},{},{}", traj.t[i], traj.x[i], traj.y[i], traj.z[i]);
    }
    s
}

/// Binary greyscale PGM (P5, maxval 255).
pub fn pgm_bytes(plane: &Plane) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", plane.cols(), plane.rows()).into_bytes();
    out.extend_from_slice(plane.as_slice());
    out
}

pub fn write_pgm(path: impl AsRef<Path>, plane: &Plane) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pgm_bytes(plane)).map_err(crate::Error::file(path))?;
    Ok(())
}
