use crate::engine::{Jet, ScalarField};
use crate::error::{GeometryError, Result};
use crate::geometry::{dy, fiber_gradient};
use crate::surface::FinslerSurface;

const SCAN: usize = 64;
const ANGLE_TOL: f64 = 1e-13;
pub const INDICATRIX_TOL: f64 = 1e-6;

/// `e₁(x, y) = (F_{y²}, −F_{y¹}) / √det g` together with `√det g`.
pub fn first_frame_vector(surface: &FinslerSurface, x: [f64; 2], y: [f64; 2]) -> Result<([f64; 2], f64)> {
    if !surface.chart.contains(x) {
        return Err(GeometryError::OutsideChart { x });
    }
    let [x1, x2, y1, y2] = Jet::seed([x[0], x[1], y[0], y[1]], 2);
    let f = ScalarField::eval(surface, [x1, x2], [y1, y2]);
    let e = &f * &f;
    let fy = [f.partial(dy(0)), f.partial(dy(1))];
    let ey = [e.partial(dy(0)), e.partial(dy(1))];
    let g: [[f64; 2]; 2] = std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * ey[i].partial(dy(j)).value()));
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(det > 0.0 && g[0][0] > 0.0) {
        return Err(GeometryError::NotStronglyConvex {
            x,
            y,
            min_eigenvalue: crate::geometry::min_eigenvalue(&g),
        });
    }
    let s = det.sqrt();
    Ok(([fy[1].value() / s, -fy[0].value() / s], s))
}

/// The unit normal `N` of a tangent direction `T` at `x`: the point of the
/// indicatrix with `g_N(N, T) = 0` and positive orientation
/// `N²T¹ − T²N¹ > 0`.
pub fn normal_vector(surface: &FinslerSurface, x: [f64; 2], t: [f64; 2]) -> Result<[f64; 2]> {
    if !surface.chart.contains(x) {
        return Err(GeometryError::OutsideChart { x });
    }
    if t == [0.0, 0.0] || !t.iter().all(|v| v.is_finite()) {
        return Err(GeometryError::ZeroDirection);
    }
    // g_N(N, T) = F(N) F_y(N)·T, and F_y is 0-homogeneous.
    let h = |th: f64| -> Result<f64> {
        let g = fiber_gradient(surface, x, [th.cos(), th.sin()])?;
        Ok(g[0] * t[0] + g[1] * t[1])
    };
    let orientation = |th: f64| th.sin() * t[0] - t[1] * th.cos();

    let step = std::f64::consts::TAU / SCAN as f64;
    let values = (0..=SCAN).map(|k| h(k as f64 * step)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for k in 0..SCAN {
        let (mut a, mut b) = (k as f64 * step, (k + 1) as f64 * step);
        let (mut ha, hb) = (values[k], values[k + 1]);
        if ha == 0.0 {
            roots.push(a);
            continue;
        }
        if ha.signum() == hb.signum() || hb == 0.0 {
            continue;
        }
        while b - a > ANGLE_TOL {
            let mid = 0.5 * (a + b);
            let hm = h(mid)?;
            if hm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if hm.signum() == ha.signum() {
                a = mid;
                ha = hm;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    let th = roots
        .into_iter()
        .filter(|&th| orientation(th) > 0.0)
        .max_by(|a, b| orientation(*a).total_cmp(&orientation(*b)))
        .ok_or(GeometryError::NoNormal { x, t })?;
    surface.to_indicatrix(x, [th.cos(), th.sin()])
}

/// The unit tangent `T = e₁(x, N) / F(x, e₁(x, N))` of a curve with normal `N`.
pub fn tangent_from_normal(surface: &FinslerSurface, x: [f64; 2], n: [f64; 2]) -> Result<[f64; 2]> {
    let residual = (surface.f(x, n) - 1.0).abs();
    if !(residual <= INDICATRIX_TOL) {
        return Err(GeometryError::OffIndicatrix { residual });
    }
    let (e1, _) = first_frame_vector(surface, x, n)?;
    surface.to_indicatrix(x, e1)
}
