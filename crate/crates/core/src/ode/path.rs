//! Complex paths, adaptive integration with h/g chart switching, and traces.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::dopri::{attempt, Controller, DenseStep, State};
use crate::ode::system::{h_second, h_to_u, u_second, u_to_h, FORCING};

type C = Complex64;

/// Straight line or circular arc in the x-plane, parametrized by arclength.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum Segment {
    Line { from: C, to: C },
    /// x = center + radius e^{iθ}, θ from theta0 to theta1 (either orientation).
    Arc { center: C, radius: f64, theta0: f64, theta1: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, theta0, theta1, .. } => radius * (theta1 - theta0).abs(),
        }
    }

    /// Point and dx/ds at arclength s.
    pub fn point(&self, s: f64) -> (C, C) {
        match *self {
            Segment::Line { from, to } => {
                let l = (to - from).norm();
                if l == 0.0 {
                    return (from, C::new(0.0, 0.0));
                }
                let d = (to - from) / l;
                (from + d * s, d)
            }
            Segment::Arc { center, radius, theta0, theta1 } => {
                let sg = (theta1 - theta0).signum();
                let th = theta0 + sg * s / radius;
                let e = C::from_polar(1.0, th);
                (center + radius * e, C::i() * e * sg)
            }
        }
    }

    pub fn start(&self) -> C {
        self.point(0.0).0
    }

    pub fn end(&self) -> C {
        self.point(self.length()).0
    }
}

/// Concatenated segments; consecutive segments must join.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn new() -> Self {
        Path { segments: Vec::new() }
    }

    pub fn line(mut self, from: C, to: C) -> Self {
        self.segments.push(Segment::Line { from, to });
        self
    }

    pub fn line_to(self, to: C) -> Self {
        let from = self.end().expect("line_to needs a previous segment");
        self.line(from, to)
    }

    /// Arc around 0 from the current end point to angle `theta1` (arguments continued, not reduced).
    pub fn arc_to(mut self, theta0: f64, theta1: f64) -> Self {
        let start = self.end().expect("arc_to needs a previous segment");
        let radius = start.norm();
        self.segments.push(Segment::Arc { center: C::new(0.0, 0.0), radius, theta0, theta1 });
        self
    }

    pub fn arc(mut self, center: C, radius: f64, theta0: f64, theta1: f64) -> Self {
        self.segments.push(Segment::Arc { center, radius, theta0, theta1 });
        self
    }

    pub fn start(&self) -> Option<C> {
        self.segments.first().map(|s| s.start())
    }

    pub fn end(&self) -> Option<C> {
        self.segments.last().map(|s| s.end())
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    H,
    G,
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrateOptions {
    /// Relative local error per step.
    pub tol: f64,
    /// Absolute floor as a multiple of `tol`.
    pub atol_factor: f64,
    pub enter_g: f64,
    pub exit_g: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Coefficient A of x^-4 (the integrable value by default).
    pub forcing: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            tol: 1e-12,
            atol_factor: 1e-6,
            enter_g: 10.0,
            exit_g: 5.0,
            h_max: 0.5,
            max_steps: 5_000_000,
            forcing: FORCING,
        }
    }
}

/// Accepted-step end point; `state` holds the chart variables, `h`/`hp` the h values.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sample {
    pub x: C,
    pub s: f64,
    pub seg: usize,
    pub chart: Chart,
    pub state: State,
    pub h: C,
    pub hp: C,
}

#[derive(Clone, Copy, Debug)]
pub struct TraceStep {
    pub seg: usize,
    /// Arclength offset of the segment start in the whole path.
    pub s_base: f64,
    pub chart: Chart,
    pub dense: DenseStep,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoleRecord {
    pub x: C,
    pub n: Option<i64>,
    /// |g − 3| at the refined location.
    pub witness: f64,
    /// Leading Laurent coefficient of h (expected 12), when fitted.
    pub laurent_a: Option<C>,
    pub laurent_b: Option<C>,
}

#[derive(Clone, Debug)]
pub struct SolutionTrace {
    pub path: Path,
    pub samples: Vec<Sample>,
    pub steps: Vec<TraceStep>,
    pub poles: Vec<PoleRecord>,
    pub opts: IntegrateOptions,
}

impl SolutionTrace {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trace has a sample")
    }

    /// (x, h, h') at global arclength s by dense output.
    pub fn at(&self, s: f64) -> (C, C, C) {
        let i = self.steps.partition_point(|st| st.s_base + st.dense.s0 + st.dense.h < s);
        if self.steps.is_empty() {
            let f = &self.samples[0];
            return (f.x, f.h, f.hp);
        }
        let st = &self.steps[i.min(self.steps.len() - 1)];
        let local = s - st.s_base;
        let y = st.dense.eval(local);
        let x = self.path.segments[st.seg].point(local).0;
        let (h, hp) = to_h(st.chart, &y);
        (x, h, hp)
    }

    pub fn max_abs_h(&self) -> f64 {
        self.samples.iter().map(|s| s.h.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let samples: Vec<serde_json::Value> = self
            .samples
            .iter()
            .map(|s| {
                serde_json::json!({
                    "x": [s.x.re, s.x.im],
                    "chart": s.chart,
                    "state": [[s.state[0].re, s.state[0].im], [s.state[1].re, s.state[1].im]],
                    "h": [s.h.re, s.h.im],
                })
            })
            .collect();
        let poles: Vec<serde_json::Value> =
            self.poles.iter().map(|p| serde_json::json!({"x": [p.x.re, p.x.im], "n": p.n, "witness": p.witness})).collect();
        serde_json::json!({ "samples": samples, "poles": poles })
    }
}

/// (h, h') from chart variables; the g-chart stores u = 3 − g and u' so that
/// relative error control resolves the double zero of u at a pole.
pub fn to_h(chart: Chart, y: &State) -> (C, C) {
    match chart {
        Chart::H => (y[0], y[1]),
        Chart::G => u_to_h(y[0], y[1]),
    }
}

fn from_h(chart: Chart, h: C, hp: C) -> State {
    match chart {
        Chart::H => [h, hp],
        Chart::G => {
            let (u, up) = h_to_u(h, hp);
            [u, up]
        }
    }
}

/// d(state)/ds along a segment.
fn field(chart: Chart, seg: &Segment, a: f64, s: f64, y: &State) -> State {
    let (x, dx) = seg.point(s);
    let second = match chart {
        Chart::H => h_second(x, y[0], y[1], a),
        Chart::G => u_second(x, y[0], y[1], a),
    };
    [y[1] * dx, second * dx]
}

fn finite(y: &State) -> bool {
    y.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Integrate along `path` from (h, h') at its start.
pub fn integrate_path(h0: C, hp0: C, path: &Path, opts: &IntegrateOptions) -> Result<SolutionTrace> {
    let start = path.start().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    for seg in &path.segments {
        let n = seg.length().ceil() as usize * 8 + 8;
        for j in 0..=n {
            if seg.point(seg.length() * j as f64 / n as f64).0.norm() < 1e-8 {
                return Err(Error::XZero);
            }
        }
    }
    for w in path.segments.windows(2) {
        if (w[0].end() - w[1].start()).norm() > 1e-9 * (1.0 + w[1].start().norm()) {
            return Err(Error::InvalidInput("path segments do not join".into()));
        }
    }
    let mut chart = if h0.norm() > opts.enter_g { Chart::G } else { Chart::H };
    let mut y = from_h(chart, h0, hp0);
    let mut samples = vec![Sample { x: start, s: 0.0, seg: 0, chart, state: y, h: h0, hp: hp0 }];
    let mut steps = Vec::new();
    let mut s_base = 0.0;
    let atol = opts.tol * opts.atol_factor;
    let mut h_step = 1e-2;
    let mut count = 0usize;
    for (si, seg) in path.segments.iter().enumerate() {
        let len = seg.length();
        let mut s = 0.0;
        let mut ctl = Controller::default();
        let mut k1 = field(chart, seg, opts.forcing, s, &y);
        while s < len {
            let last = h_step >= len - s;
            let h = if last { len - s } else { h_step.min(opts.h_max) };
            let mut f = |t: f64, v: &State| field(chart, seg, opts.forcing, t, v);
            let a = attempt(&mut f, s, &y, &k1, h, opts.tol, atol);
            count += 1;
            if count > opts.max_steps {
                return Err(Error::StepFailure { x: seg.point(s).0 });
            }
            // Error per unit step relative to h_max, capped so the roundoff floor cannot stall the step.
            let err = if a.err.is_finite() && finite(&a.y1) { a.err * (opts.h_max / h).clamp(1.0, 64.0) } else { 1e10 };
            let (ok, hn) = ctl.next(h, err);
            if !ok {
                h_step = hn;
                if h_step < 1e-12 * (1.0 + len) {
                    let x = seg.point(s).0;
                    if chart == Chart::G && y[0].norm() < 1e-300 {
                        return Err(Error::ChartDeadlock { x });
                    }
                    return Err(Error::StepFailure { x });
                }
                continue;
            }
            steps.push(TraceStep { seg: si, s_base, chart, dense: a.dense });
            s = if last { len } else { s + h };
            y = a.y1;
            k1 = a.k7;
            h_step = if last { h_step.max(hn) } else { hn };
            let (hv, hpv) = to_h(chart, &y);
            let x = seg.point(s).0;
            let next = match chart {
                Chart::H if hv.norm() > opts.enter_g => Chart::G,
                Chart::G if hv.norm() < opts.exit_g => Chart::H,
                c => c,
            };
            if next != chart {
                chart = next;
                y = from_h(chart, hv, hpv);
                k1 = field(chart, seg, opts.forcing, s, &y);
                ctl = Controller::default();
            }
            samples.push(Sample { x, s: s_base + s, seg: si, chart, state: y, h: hv, hp: hpv });
        }
        s_base += len;
    }
    Ok(SolutionTrace { path: path.clone(), samples, steps, poles: Vec::new(), opts: *opts })
}
