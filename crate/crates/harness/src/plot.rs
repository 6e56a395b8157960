use crate::svg::{heatmap_svg, line_chart_svg, LineChart, Series};
use crate::HarnessError;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

/// Study artifacts the plotter knows how to chart.
pub const PLOT_INPUTS: [&str; 5] =
    ["convergence.csv", "regularity.csv", "hierarchy_trajectory.csv", "lamb_oseen_errors.csv", "concentration.csv"];

type Table = (Vec<String>, Vec<Vec<String>>);

fn read_table(path: &Path) -> Result<Table, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
    let head: Vec<String> = r.headers().map_err(|e| HarnessError::Usage(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok((head, rows))
}

fn col(t: &Table, name: &str) -> Result<usize, HarnessError> {
    t.0.iter().position(|h| h == name).ok_or_else(|| HarnessError::Usage(format!("column {name} missing")))
}

fn num(s: &str) -> f64 {
    s.trim().parse().unwrap_or(f64::NAN)
}

/// Writes plot-ready CSVs and one SVG per recognised artifact into `dir`;
/// returns the names written.
pub fn emit_plotdata(dir: &Path) -> Result<Vec<String>, HarnessError> {
    let present: Vec<&str> = PLOT_INPUTS.iter().copied().filter(|n| dir.join(n).is_file()).collect();
    if present.is_empty() {
        return Err(HarnessError::MissingArtifacts { dir: dir.to_path_buf(), expected: PLOT_INPUTS.iter().map(|s| s.to_string()).collect() });
    }
    let mut written = Vec::new();
    let mut put = |name: &str, text: String| -> Result<(), HarnessError> {
        fs::write(dir.join(name), text)?;
        written.push(name.to_string());
        Ok(())
    };
    for name in present {
        let t = read_table(&dir.join(name))?;
        match name {
            "convergence.csv" => {
                let (n, l1, se) = (col(&t, "N")?, col(&t, "L1")?, col(&t, "stderr")?);
                let pts: Vec<(f64, f64)> = t.1.iter().map(|r| (num(&r[n]), num(&r[l1]))).collect();
                let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
                let ly: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
                let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
                let slope = vx_regularity::fit_slope(&xs, &ys);
                // the interval needs at least one residual degree of freedom
                let ci = if pts.len() >= 3 { vx_entropy::fit_slope(&lx, &ly).1 } else { (f64::NAN, f64::NAN) };
                let mx = lx.iter().sum::<f64>() / lx.len() as f64;
                let my = ly.iter().sum::<f64>() / ly.len() as f64;
                let fit: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, (my + slope * (p.0.ln() - mx)).exp())).collect();
                let mut csv = String::from("N,L1,stderr,fit\n");
                for ((r, p), f) in t.1.iter().zip(&pts).zip(&fit) {
                    csv += &format!("{},{:.9e},{},{:.9e}\n", r[n], p.1, r[se], f.1);
                }
                put("error_vs_n.csv", csv)?;
                put(
                    "error_vs_n.svg",
                    line_chart_svg(&LineChart {
                        title: "L1 error of the smoothed empirical vorticity".into(),
                        x_label: "N".into(),
                        y_label: "L1 error".into(),
                        log_x: true,
                        log_y: true,
                        series: vec![
                            Series { name: "measured".into(), points: pts, dashed: false },
                            Series { name: "OLS fit".into(), points: fit, dashed: true },
                        ],
                        annotation: Some(format!("fitted slope {slope:.3} (95% CI [{:.3}, {:.3}])", ci.0, ci.1)),
                    }),
                )?;
            }
            "regularity.csv" => {
                let (k, o, tc, v) = (col(&t, "kind")?, col(&t, "order")?, col(&t, "t")?, col(&t, "value")?);
                let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
                for r in &t.1 {
                    let key = if r[o].is_empty() { r[k].clone() } else { format!("{} {}", r[k], r[o]) };
                    groups.entry(key).or_default().push((num(&r[tc]), num(&r[v])));
                }
                let pick = |pre: &[&str]| -> Vec<Series> {
                    groups
                        .iter()
                        .filter(|(g, _)| pre.iter().any(|p| g.starts_with(p)))
                        .map(|(g, p)| Series { name: g.clone(), points: p.clone(), dashed: false })
                        .collect()
                };
                put(
                    "envelope_ratios.svg",
                    line_chart_svg(&LineChart {
                        title: "Worst-case envelope ratios".into(),
                        x_label: "t".into(),
                        y_label: "ratio".into(),
                        log_x: false,
                        log_y: true,
                        series: pick(&["gauss_upper", "gauss_lower", "log_grad", "log_hess"]),
                        annotation: None,
                    }),
                )?;
                put(
                    "decay_norms.svg",
                    line_chart_svg(&LineChart {
                        title: "Norm decay".into(),
                        x_label: "t".into(),
                        y_label: "norm".into(),
                        log_x: true,
                        log_y: true,
                        series: pick(&["lp_decay", "kato_decay"]),
                        annotation: None,
                    }),
                )?;
            }
            "hierarchy_trajectory.csv" => {
                let (tc, kc, xc) = (col(&t, "t")?, col(&t, "k")?, col(&t, "x_k")?);
                let mut rows: BTreeMap<u64, BTreeMap<usize, f64>> = BTreeMap::new();
                for r in &t.1 {
                    rows.entry(num(&r[tc]).to_bits()).or_default().insert(r[kc].parse().unwrap_or(0), num(&r[xc]));
                }
                let mut times: Vec<f64> = rows.keys().map(|b| f64::from_bits(*b)).collect();
                times.sort_by(f64::total_cmp);
                let ks: Vec<f64> = rows.values().next().map(|m| m.keys().map(|k| *k as f64).collect()).unwrap_or_default();
                let vals: Vec<Vec<f64>> = times.iter().map(|t| rows[&t.to_bits()].values().cloned().collect()).collect();
                put("hierarchy_heatmap.svg", heatmap_svg("Hierarchy x_k(t)", "k", "t", &ks, &times, &vals))?;
            }
            "lamb_oseen_errors.csv" => {
                let (tc, e) = (col(&t, "t")?, col(&t, "max_rel_err")?);
                put(
                    "lamb_oseen_errors.svg",
                    line_chart_svg(&LineChart {
                        title: "Lamb-Oseen relative error".into(),
                        x_label: "t".into(),
                        y_label: "max relative error".into(),
                        log_x: false,
                        log_y: true,
                        series: vec![Series { name: "solver".into(), points: t.1.iter().map(|r| (num(&r[tc]), num(&r[e]))).collect(), dashed: false }],
                        annotation: None,
                    }),
                )?;
            }
            "concentration.csv" => {
                let (p, n, m) = (col(&t, "probe")?, col(&t, "N")?, col(&t, "log_moment")?);
                let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
                for r in &t.1 {
                    groups.entry(r[p].clone()).or_default().push((num(&r[n]), num(&r[m])));
                }
                put(
                    "concentration.svg",
                    line_chart_svg(&LineChart {
                        title: "Log exponential moments".into(),
                        x_label: "N".into(),
                        y_label: "log E exp".into(),
                        log_x: true,
                        log_y: false,
                        series: groups.into_iter().map(|(g, pts)| Series { name: g, points: pts, dashed: false }).collect(),
                        annotation: None,
                    }),
                )?;
            }
            _ => unreachable!("listed in PLOT_INPUTS"),
        }
    }
    Ok(written)
}
