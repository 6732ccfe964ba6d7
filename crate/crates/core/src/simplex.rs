//! Nelder–Mead simplex minimization for small unconstrained problems.

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    #[cfg_attr(not(test), allow(dead_code))]
    pub iterations: usize,
}

/// Minimizes `f` starting from a simplex around `start` with edge `step`.
///
/// Stops when the simplex diameter drops below `diameter_tol` or after
/// `max_iterations` iterations.
pub(crate) fn minimize<F>(
    f: F,
    start: &[f64],
    step: f64,
    diameter_tol: f64,
    max_iterations: usize,
) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = start.len();
    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    vertices.push((start.to_vec(), f(start)));
    for k in 0..n {
        let mut p = start.to_vec();
        p[k] += step;
        let v = f(&p);
        vertices.push((p, v));
    }

    let mut iterations = 0;
    while iterations < max_iterations {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&vertices) < diameter_tol {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| vertices[..n].iter().map(|(p, _)| p[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[n].0)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let best = vertices[0].1;
        let second_worst = vertices[n - 1].1;
        let worst = vertices[n].1;

        let reflected = along(-1.0);
        let fr = f(&reflected);
        if fr < best {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            vertices[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < second_worst {
            vertices[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < worst {
            let p = along(-0.5);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(0.5);
            let v = f(&p);
            (p, v)
        };
        if fc < worst.min(fr) {
            vertices[n] = (contracted, fc);
            continue;
        }
        // Shrink towards the best vertex.
        let anchor = vertices[0].0.clone();
        for (p, v) in vertices.iter_mut().skip(1) {
            for (x, a) in p.iter_mut().zip(&anchor) {
                *x = a + 0.5 * (*x - a);
            }
            *v = f(p);
        }
    }

    vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = vertices.swap_remove(0);
    SimplexResult {
        point,
        value,
        iterations,
    }
}

fn diameter(vertices: &[(Vec<f64>, f64)]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, (a, _)) in vertices.iter().enumerate() {
        for (b, _) in &vertices[i + 1..] {
            let dist = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).powi(2))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(dist);
        }
    }
    worst
}
