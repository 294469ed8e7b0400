//! Minimal SVG line plots over the logged series. No dependency; a plot is
//! a fixed-size canvas with linear axes, polyline series, and a legend.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use armform::dynamics::ManipulatorParams;
use armform::kinematics::{fk, BasePose, HolonomicBranch};
use armform::sim::TrajectoryLog;
use armform::JointState;

use crate::scenario::{Mode, ScenarioFile};
use crate::CliError;

const W: f64 = 800.0;
const H: f64 = 560.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 44.0;
const MARGIN_B: f64 = 52.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Series {
    label: String,
    xs: Vec<f64>,
    ys: Vec<f64>,
    dashed: bool,
    /// Draw x at the first point and o at the last.
    endpoint_markers: bool,
}

struct Chart {
    title: String,
    xlabel: String,
    ylabel: String,
    series: Vec<Series>,
    equal_aspect: bool,
}

impl Chart {
    fn render(&self) -> String {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &self.series {
            for &v in &s.xs {
                x_min = x_min.min(v);
                x_max = x_max.max(v);
            }
            for &v in &s.ys {
                y_min = y_min.min(v);
                y_max = y_max.max(v);
            }
        }
        if !x_min.is_finite() {
            (x_min, x_max) = (0.0, 1.0);
            (y_min, y_max) = (0.0, 1.0);
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = (*hi - *lo).abs().max(1e-12);
            *lo -= 0.05 * span;
            *hi += 0.05 * span;
        };
        pad(&mut x_min, &mut x_max);
        pad(&mut y_min, &mut y_max);

        let plot_w = W - MARGIN_L - MARGIN_R;
        let plot_h = H - MARGIN_T - MARGIN_B;
        if self.equal_aspect {
            let sx = plot_w / (x_max - x_min);
            let sy = plot_h / (y_max - y_min);
            let s = sx.min(sy);
            let (cx, cy) = (0.5 * (x_min + x_max), 0.5 * (y_min + y_max));
            let half_w = 0.5 * plot_w / s;
            let half_h = 0.5 * plot_h / s;
            x_min = cx - half_w;
            x_max = cx + half_w;
            y_min = cy - half_h;
            y_max = cy + half_h;
        }
        let px = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
        let py = |y: f64| H - MARGIN_B - (y - y_min) / (y_max - y_min) * plot_h;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
            MARGIN_L + plot_w / 2.0,
            esc(&self.title)
        );

        // Axes with 6 ticks each.
        let _ = writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="#333"/>"##
        );
        for i in 0..=5 {
            let f = i as f64 / 5.0;
            let xv = x_min + f * (x_max - x_min);
            let yv = y_min + f * (y_max - y_min);
            let xp = px(xv);
            let yp = py(yv);
            let _ = writeln!(
                out,
                r##"<line x1="{xp:.1}" y1="{:.1}" x2="{xp:.1}" y2="{:.1}" stroke="#ccc"/>"##,
                MARGIN_T,
                H - MARGIN_B
            );
            let _ = writeln!(
                out,
                r##"<line x1="{MARGIN_L}" y1="{yp:.1}" x2="{:.1}" y2="{yp:.1}" stroke="#ccc"/>"##,
                W - MARGIN_R
            );
            let _ = writeln!(
                out,
                r#"<text x="{xp:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
                H - MARGIN_B + 16.0,
                fmt_tick(xv)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
                MARGIN_L - 6.0,
                yp + 4.0,
                fmt_tick(yv)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{}</text>"#,
            MARGIN_L + plot_w / 2.0,
            H - 12.0,
            esc(&self.xlabel)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            MARGIN_T + plot_h / 2.0,
            MARGIN_T + plot_h / 2.0,
            esc(&self.ylabel)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut d = String::new();
            for (j, (&x, &y)) in s.xs.iter().zip(&s.ys).enumerate() {
                let _ = write!(
                    d,
                    "{}{:.2},{:.2} ",
                    if j == 0 { "M" } else { "L" },
                    px(x),
                    py(y)
                );
            }
            let dash = if s.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#
            );
            if s.endpoint_markers && !s.xs.is_empty() {
                let (x0, y0) = (px(s.xs[0]), py(s.ys[0]));
                let (x1, y1) = (px(*s.xs.last().unwrap()), py(*s.ys.last().unwrap()));
                let _ = writeln!(
                    out,
                    r#"<path d="M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}" stroke="{color}" stroke-width="2"/>"#,
                    x0 - 5.0,
                    y0 - 5.0,
                    x0 + 5.0,
                    y0 + 5.0,
                    x0 - 5.0,
                    y0 + 5.0,
                    x0 + 5.0,
                    y0 - 5.0
                );
                let _ = writeln!(
                    out,
                    r#"<circle cx="{x1:.2}" cy="{y1:.2}" r="5" fill="none" stroke="{color}" stroke-width="2"/>"#
                );
            }
            // Legend entry.
            let ly = MARGIN_T + 14.0 + 18.0 * k as f64;
            let lx = W - MARGIN_R + 10.0;
            let _ = writeln!(
                out,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/>"#,
                lx + 22.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="12">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                esc(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn write_chart(chart: &Chart, path: &Path) -> Result<(), CliError> {
    fs::write(path, chart.render())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// End-effector paths (x marks start, o marks end; PA workspace curves
/// dashed), per-edge distance errors, the Lyapunov certificate, and all
/// joint signals.
pub fn emit_plots(
    scenario: &ScenarioFile,
    log: &TrajectoryLog,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();

    let mut paths = Chart {
        title: "End-effector trajectories".into(),
        xlabel: "X (m)".into(),
        ylabel: "Y (m)".into(),
        series: Vec::new(),
        equal_aspect: true,
    };
    for (i, track) in log.tracks.iter().enumerate() {
        paths.series.push(Series {
            label: format!("arm {}", i + 1),
            xs: track.x.clone(),
            ys: track.y.clone(),
            dashed: false,
            endpoint_markers: true,
        });
    }
    for (i, spec) in scenario.agents.iter().enumerate() {
        if spec.mode != Mode::Pa {
            continue;
        }
        let p = spec.params;
        let params = ManipulatorParams::new(p.m1, p.m2, p.i1, p.i2, p.len1, p.len2, p.com1, p.com2)
            .map_err(|e| CliError::Scenario(e.to_string()))?;
        let track = &log.tracks[i];
        let q0 = JointState::new(track.q1[0], track.q2[0], track.dq1[0], track.dq2[0]);
        let branch = HolonomicBranch::new(&params.alphas(), &q0)
            .map_err(|e| CliError::Scenario(e.to_string()))?;
        let base = BasePose::from(spec.base);
        // The reachable curve of this PA arm around its visited range.
        let (lo, hi) = track
            .q2
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let span = (hi - lo).max(0.2);
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let n = 300;
        for j in 0..=n {
            let q2 = lo - span + (hi - lo + 2.0 * span) * j as f64 / n as f64;
            let x = fk(
                &params,
                &nalgebra::Vector2::new(branch.constrained_q1(q2), q2),
                &base,
            );
            xs.push(x[0]);
            ys.push(x[1]);
        }
        paths.series.push(Series {
            label: format!("arm {} workspace", i + 1),
            xs,
            ys,
            dashed: true,
            endpoint_markers: false,
        });
    }
    let p = out_dir.join("paths.svg");
    write_chart(&paths, &p)?;
    written.push(p);

    let mut edges = Chart {
        title: "Edge squared-distance errors".into(),
        xlabel: "t (s)".into(),
        ylabel: "e_k (m^2)".into(),
        series: Vec::new(),
        equal_aspect: false,
    };
    for (k, series) in log.edge_e.iter().enumerate() {
        let (tail, head) = (scenario.graph.edges[k][0], scenario.graph.edges[k][1]);
        edges.series.push(Series {
            label: format!("e_{} ({tail},{head})", k + 1),
            xs: log.times.clone(),
            ys: series.clone(),
            dashed: false,
            endpoint_markers: false,
        });
    }
    let p = out_dir.join("edge_errors.svg");
    write_chart(&edges, &p)?;
    written.push(p);

    let lyap = Chart {
        title: "Lyapunov certificate".into(),
        xlabel: "t (s)".into(),
        ylabel: "U".into(),
        series: vec![
            Series {
                label: "U(t)".into(),
                xs: log.times.clone(),
                ys: log.lyapunov.clone(),
                dashed: false,
                endpoint_markers: false,
            },
            Series {
                label: "|xi|(t)".into(),
                xs: log.times.clone(),
                ys: log.xi_norm.clone(),
                dashed: true,
                endpoint_markers: false,
            },
        ],
        equal_aspect: false,
    };
    let p = out_dir.join("lyapunov.svg");
    write_chart(&lyap, &p)?;
    written.push(p);

    let mut qp = Chart {
        title: "Joint positions".into(),
        xlabel: "t (s)".into(),
        ylabel: "q (rad)".into(),
        series: Vec::new(),
        equal_aspect: false,
    };
    let mut qv = Chart {
        title: "Joint velocities".into(),
        xlabel: "t (s)".into(),
        ylabel: "dq (rad/s)".into(),
        series: Vec::new(),
        equal_aspect: false,
    };
    for (i, track) in log.tracks.iter().enumerate() {
        for (name, q_series, v_series) in
            [("1", &track.q1, &track.dq1), ("2", &track.q2, &track.dq2)]
        {
            qp.series.push(Series {
                label: format!("q{}_{name}", i + 1),
                xs: log.times.clone(),
                ys: q_series.clone(),
                dashed: name == "2",
                endpoint_markers: false,
            });
            qv.series.push(Series {
                label: format!("dq{}_{name}", i + 1),
                xs: log.times.clone(),
                ys: v_series.clone(),
                dashed: name == "2",
                endpoint_markers: false,
            });
        }
    }
    let p = out_dir.join("joint_positions.svg");
    write_chart(&qp, &p)?;
    written.push(p);
    let p = out_dir.join("joint_velocities.svg");
    write_chart(&qv, &p)?;
    written.push(p);

    Ok(written)
}
