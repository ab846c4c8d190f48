//! CSV writers for traces, explicate frames, and trajectories.
//!
//! All numeric output uses Rust's shortest round-trip float formatting,
//! which is locale-independent and preserves full double precision, so
//! identical runs produce bit-identical files.  Masked (node) points carry
//! zeros in the derived-field columns rather than NaNs, keeping the files
//! plotting-tool friendly.

use crate::bohm::Trajectory;
use crate::evolution::EvolutionTrace;
use crate::explicate::ExplicateFrame;
use crate::grid::Representation;
use std::fs::File;
use std::io::{BufWriter, Result, Write};
use std::path::Path;

/// Long-format trace export: `snapshot,t,<x|p>,re_psi,im_psi`.
pub fn write_trace_csv(path: &Path, trace: &EvolutionTrace) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let coord = trace.representation().coordinate_label();
    writeln!(out, "snapshot,t,{coord},re_psi,im_psi")?;
    for (snap, field) in trace.fields().iter().enumerate() {
        let t = field.time();
        for (j, v) in field.values().iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{}",
                snap,
                t,
                field.grid().point(j),
                v.re,
                v.im
            )?;
        }
    }
    out.flush()
}

/// Long-format field export: `t,<x|p>,P,S,Q,<p_B|x_B>`.
///
/// In the position representation the last column is the local momentum
/// `p_B = dS/dx`; in the momentum representation it is `x_B = -dS_p/dp`.
pub fn write_frames_csv(path: &Path, frames: &[ExplicateFrame]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    let (coord, conjugate) = match frames
        .first()
        .map(|f| f.polar.representation())
        .unwrap_or(Representation::Position)
    {
        Representation::Position => ("x", "p_B"),
        Representation::Momentum => ("p", "x_B"),
    };
    writeln!(out, "t,{coord},P,S,Q,{conjugate}")?;
    for frame in frames {
        let t = frame.time();
        let grid = frame.grid();
        let momentum_sign = match frame.polar.representation() {
            Representation::Position => 1.0,
            Representation::Momentum => -1.0,
        };
        for j in 0..grid.len() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                t,
                grid.point(j),
                frame.density[j],
                frame.polar.phase()[j],
                frame.quantum_potential[j],
                momentum_sign * frame.phase_gradient[j],
            )?;
        }
    }
    out.flush()
}

/// Trajectory export: `trajectory_id,t,x`.
pub fn write_trajectories_csv(path: &Path, trajectories: &[Trajectory]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "trajectory_id,t,x")?;
    for (id, tr) in trajectories.iter().enumerate() {
        for (t, x) in tr.times.iter().zip(&tr.positions) {
            writeln!(out, "{id},{t},{x}")?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, gaussian_packet, EvolveParams, Hamiltonian};
    use crate::explicate::explicate_frames;
    use crate::grid::Grid;

    fn small_trace() -> (EvolutionTrace, Hamiltonian) {
        let grid = Grid::symmetric(10.0, 128).unwrap();
        let h = Hamiltonian::harmonic(1.0, 1.0).unwrap();
        let psi0 = gaussian_packet(&grid, 1.0, 0.8, 0.0).unwrap();
        let params = EvolveParams {
            dt: 1e-3,
            steps_per_snapshot: 10,
            snapshots: 3,
        };
        (evolve(&psi0, &h, &params).unwrap(), h)
    }

    #[test]
    fn exports_are_deterministic_and_nan_free() {
        let dir = std::env::temp_dir().join("explicate-export-test");
        std::fs::create_dir_all(&dir).unwrap();
        let (trace, h) = small_trace();
        let frames = explicate_frames(&trace, &h).unwrap();

        let p1 = dir.join("trace1.csv");
        let p2 = dir.join("trace2.csv");
        write_trace_csv(&p1, &trace).unwrap();
        write_trace_csv(&p2, &trace).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "identical runs must be bit-identical"
        );

        let pf = dir.join("frames.csv");
        write_frames_csv(&pf, &frames).unwrap();
        let body = std::fs::read_to_string(&pf).unwrap();
        assert!(body.starts_with("t,x,P,S,Q,p_B"));
        assert!(!body.to_lowercase().contains("nan"));

        let momentum_frames =
            explicate_frames(&trace.to_momentum().unwrap(), &h).unwrap();
        let pm = dir.join("frames_p.csv");
        write_frames_csv(&pm, &momentum_frames).unwrap();
        let body = std::fs::read_to_string(&pm).unwrap();
        assert!(body.starts_with("t,p,P,S,Q,x_B"));
        assert!(!body.to_lowercase().contains("nan"));
    }

    #[test]
    fn trajectory_export_format() {
        let dir = std::env::temp_dir().join("explicate-export-test");
        std::fs::create_dir_all(&dir).unwrap();
        let (trace, _) = small_trace();
        let tr = crate::bohm::integrate_trajectory(&trace, 1.0, 1.0).unwrap();
        let path = dir.join("traj.csv");
        write_trajectories_csv(&path, &[tr]).unwrap();
        let body = std::fs::read_to_string(&path).unwrap();
        let mut lines = body.lines();
        assert_eq!(lines.next().unwrap(), "trajectory_id,t,x");
        assert!(lines.next().unwrap().starts_with("0,0,"));
    }
}
