//! Adaptive Gauss-Kronrod quadrature and the cumulative-integral object.

use std::sync::Arc;

use super::{CalculusError, Interval, PointError, ScalarFunction};

// 15-point Kronrod extension of the 7-point Gauss rule (positive half).
// Even indices are Kronrod-only nodes, odd indices Gauss nodes, index 7
// the center.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 15-point Gauss-Kronrod rule on `[a, b]`: returns the Kronrod estimate
/// and `|kronrod - gauss|` as the error surrogate.
fn gk15(g: &ScalarFunction, a: f64, b: f64) -> Result<(f64, f64), PointError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g.value(center)?;
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g.value(center - dx)?;
        let f2 = g.value(center + dx)?;
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((resk * half, ((resk - resg) * half).abs()))
}

/// Antiderivative `F(x) = ∫ g` from a base point, evaluable anywhere on
/// its interval.
///
/// Built once by adaptive panel subdivision; evaluation interpolates the
/// dense node grid with cubic Hermite segments whose slopes are the exact
/// integrand values, so the interpolant is C¹ and `F' = g` at every node.
/// Immutable after construction; cloning shares the grid.
#[derive(Clone)]
pub struct CumulativeIntegral {
    inner: Arc<Grid>,
}

struct Grid {
    integrand: ScalarFunction,
    base: f64,
    interval: Interval,
    nodes: Vec<f64>,
    /// Raw cumulative values from `interval.lo`; the base offset is
    /// subtracted at evaluation time.
    cumulative: Vec<f64>,
    slopes: Vec<f64>,
    offset: f64,
    tol: f64,
    achieved: f64,
}

impl std::fmt::Debug for CumulativeIntegral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CumulativeIntegral")
            .field("integrand", &self.inner.integrand.label())
            .field("base", &self.inner.base)
            .field("interval", &self.inner.interval)
            .field("nodes", &self.inner.nodes.len())
            .field("achieved", &self.inner.achieved)
            .finish()
    }
}

impl CumulativeIntegral {
    pub fn base(&self) -> f64 {
        self.inner.base
    }

    pub fn interval(&self) -> Interval {
        self.inner.interval
    }

    pub fn tolerance(&self) -> f64 {
        self.inner.tol
    }

    /// Total accumulated error estimate of the panel subdivision.
    pub fn achieved_error(&self) -> f64 {
        self.inner.achieved
    }

    pub fn node_count(&self) -> usize {
        self.inner.nodes.len()
    }

    pub fn integrand(&self) -> &ScalarFunction {
        &self.inner.integrand
    }

    /// `F(x)`, interpolated between grid nodes. `F(base) = 0` exactly.
    pub fn eval(&self, x: f64) -> Result<f64, CalculusError> {
        let g = &self.inner;
        let x = g.interval.clamp_inside(x).ok_or(CalculusError::OutOfDomain {
            x,
            lo: g.interval.lo,
            hi: g.interval.hi,
        })?;
        Ok(self.raw(x) - g.offset)
    }

    fn raw(&self, x: f64) -> f64 {
        let g = &self.inner;
        let nodes = &g.nodes;
        // partition_point: first index with node > x; segment is [i-1, i]
        let hi = nodes.partition_point(|&n| n <= x);
        if hi == 0 {
            return g.cumulative[0];
        }
        let i = hi - 1;
        if nodes[i] == x || hi == nodes.len() {
            return g.cumulative[i];
        }
        let (x0, x1) = (nodes[i], nodes[i + 1]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * g.cumulative[i]
            + h10 * h * g.slopes[i]
            + h01 * g.cumulative[i + 1]
            + h11 * h * g.slopes[i + 1]
    }

    /// Expose as a [`ScalarFunction`]; the exact derivative is the
    /// integrand itself.
    pub fn as_function(&self) -> ScalarFunction {
        let me = self.clone();
        let ig = self.clone();
        let label = format!("int({})", self.inner.integrand.label());
        ScalarFunction::fallible(label, self.inner.interval, move |x| {
            me.eval(x).map_err(|e| PointError::new(x, e.to_string()))
        })
        .with_derivative_fallible(move |x| ig.inner.integrand.value(x))
    }
}

/// Evaluate a cumulative integral at `x` (method form is
/// [`CumulativeIntegral::eval`]).
pub fn eval_integral(f: &CumulativeIntegral, x: f64) -> Result<f64, CalculusError> {
    f.eval(x)
}

const MAX_DEPTH: u32 = 45;

struct Builder<'g> {
    g: &'g ScalarFunction,
    width: f64,
    scale: f64,
    tol: f64,
    /// (node, cumulative increment ending at node, slope at node)
    panels: Vec<(f64, f64)>,
    worst: Option<(f64, f64, f64)>,
    achieved: f64,
}

impl Builder<'_> {
    fn budget(&self, w: f64) -> f64 {
        self.tol * (w / self.width) * (1.0 + self.scale)
    }

    fn refine(
        &mut self,
        a: f64,
        b: f64,
        i_ab: f64,
        ga: f64,
        gb: f64,
        depth: u32,
    ) -> Result<(), PointError> {
        let m = 0.5 * (a + b);
        let (il, _) = gk15(self.g, a, m)?;
        let (ir, _) = gk15(self.g, m, b)?;
        let gm = self.g.value(m)?;
        let split_est = (i_ab - (il + ir)).abs();
        // Hermite midpoint prediction over [a, b] vs the quadrature value;
        // the stored grid is twice as fine, so the actual interpolation
        // error is ~16x smaller than this surrogate.
        let hermite_mid = 0.5 * (il + ir) + (b - a) * (ga - gb) / 8.0;
        let herm_est = (hermite_mid - il).abs();
        let bw = self.budget(b - a);
        let done = split_est <= 0.5 * bw && herm_est <= bw;
        if done || depth >= MAX_DEPTH || (b - a) < 1e-13 * self.width {
            if !done {
                let est = split_est.max(herm_est);
                if self.worst.map_or(true, |(_, _, w)| est > w) {
                    self.worst = Some((a, b, est));
                }
            }
            self.achieved += split_est;
            self.panels.push((m, il));
            self.panels.push((b, ir));
            return Ok(());
        }
        self.refine(a, m, il, ga, gm, depth + 1)?;
        self.refine(m, b, ir, gm, gb, depth + 1)
    }
}

/// Build the antiderivative of `g` from base point `x0` over `interval`,
/// refined until the local error estimate is below `tol` (scaled by the
/// integral's magnitude).
pub fn antiderivative(
    g: &ScalarFunction,
    x0: f64,
    interval: Interval,
    tol: f64,
) -> Result<CumulativeIntegral, CalculusError> {
    if !(tol > 0.0) {
        return Err(CalculusError::Invalid(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if !interval.contains(x0) {
        return Err(CalculusError::Invalid(format!(
            "base point {x0} outside interval [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    if g.interval().intersect(&interval).map_or(true, |iv| {
        iv.lo > interval.lo + interval.slack() || iv.hi < interval.hi - interval.slack()
    }) {
        return Err(CalculusError::Invalid(format!(
            "integrand `{}` is not defined on all of [{}, {}]",
            g.label(),
            interval.lo,
            interval.hi
        )));
    }

    let nonfinite = |e: PointError| CalculusError::NonFiniteIntegrand {
        x: e.x,
        message: e.message,
    };

    // Seed panels at the base point so it survives as a grid node and
    // F(x0) is exactly zero.
    let mut seeds = vec![interval.lo, interval.hi];
    if x0 > interval.lo && x0 < interval.hi {
        seeds.insert(1, x0);
    }

    // First pass for the magnitude scale used in error budgets.
    let mut scale = 0.0;
    let mut seed_integrals = Vec::new();
    for pair in seeds.windows(2) {
        let (i, _) = gk15(g, pair[0], pair[1]).map_err(nonfinite)?;
        scale += i.abs();
        seed_integrals.push(i);
    }

    let mut builder = Builder {
        g,
        width: interval.width(),
        scale,
        tol,
        panels: Vec::new(),
        worst: None,
        achieved: 0.0,
    };
    for (pair, &i_ab) in seeds.windows(2).zip(&seed_integrals) {
        let ga = g.value(pair[0]).map_err(nonfinite)?;
        let gb = g.value(pair[1]).map_err(nonfinite)?;
        builder
            .refine(pair[0], pair[1], i_ab, ga, gb, 0)
            .map_err(nonfinite)?;
    }

    if let Some((a, b, est)) = builder.worst {
        if est > builder.budget(b - a) {
            return Err(CalculusError::ToleranceNotMet { a, b, achieved: est });
        }
    }

    let mut nodes = Vec::with_capacity(builder.panels.len() + 1);
    let mut cumulative = Vec::with_capacity(builder.panels.len() + 1);
    nodes.push(interval.lo);
    cumulative.push(0.0);
    // compensated prefix sum
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &(node, inc) in &builder.panels {
        let y = inc - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        nodes.push(node);
        cumulative.push(sum);
    }

    let mut slopes = Vec::with_capacity(nodes.len());
    for &n in &nodes {
        slopes.push(g.value(n).map_err(nonfinite)?);
    }

    let base_idx = nodes
        .iter()
        .position(|&n| n == x0)
        .expect("base point seeded as a node");
    let offset = cumulative[base_idx];

    Ok(CumulativeIntegral {
        inner: Arc::new(Grid {
            integrand: g.clone(),
            base: x0,
            interval,
            nodes,
            cumulative,
            slopes,
            offset,
            tol,
            achieved: builder.achieved,
        }),
    })
}
