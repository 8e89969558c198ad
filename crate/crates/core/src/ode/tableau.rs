//! Butcher tableaus of the embedded explicit pairs.

/// An explicit embedded Runge–Kutta pair. `b` advances the solution; `b_low`
/// is the embedded lower-order weight vector used only for the error
/// estimate.
#[derive(Debug)]
pub struct Tableau {
    pub c: &'static [f64],
    pub a: &'static [&'static [f64]],
    pub b: &'static [f64],
    pub b_low: &'static [f64],
    /// Order of the propagated solution.
    pub order: u32,
    /// Order of the embedded estimate.
    pub order_low: u32,
}

impl Tableau {
    pub fn stages(&self) -> usize {
        self.c.len()
    }
}

/// Dormand–Prince 5(4).
pub static DOPRI5: Tableau = Tableau {
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
        ],
        &[
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ],
    b: &[
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ],
    b_low: &[
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ],
    order: 5,
    order_low: 4,
};

/// Cash–Karp 5(4).
pub static CASH_KARP: Tableau = Tableau {
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
        &[-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
        &[
            1631.0 / 55296.0,
            175.0 / 512.0,
            575.0 / 13824.0,
            44275.0 / 110592.0,
            253.0 / 4096.0,
        ],
    ],
    b: &[37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
    b_low: &[
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ],
    order: 5,
    order_low: 4,
};

/// Runge–Kutta–Fehlberg 4(5), propagating the fifth-order solution.
pub static RKF45: Tableau = Tableau {
    c: &[0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0],
    a: &[
        &[],
        &[1.0 / 4.0],
        &[3.0 / 32.0, 9.0 / 32.0],
        &[1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0],
        &[439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0],
        &[-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ],
    b: &[
        16.0 / 135.0,
        0.0,
        6656.0 / 12825.0,
        28561.0 / 56430.0,
        -9.0 / 50.0,
        2.0 / 55.0,
    ],
    b_low: &[25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0],
    order: 5,
    order_low: 4,
};

/// Bogacki–Shampine 3(2).
pub static BS23: Tableau = Tableau {
    c: &[0.0, 1.0 / 2.0, 3.0 / 4.0, 1.0],
    a: &[
        &[],
        &[1.0 / 2.0],
        &[0.0, 3.0 / 4.0],
        &[2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0],
    ],
    b: &[2.0 / 9.0, 1.0 / 3.0, 4.0 / 9.0, 0.0],
    b_low: &[7.0 / 24.0, 1.0 / 4.0, 1.0 / 3.0, 1.0 / 8.0],
    order: 3,
    order_low: 2,
};

#[cfg(test)]
mod tests {
    use super::*;

    fn check_consistency(t: &Tableau) {
        let s = t.stages();
        assert_eq!(t.a.len(), s);
        assert_eq!(t.b.len(), s);
        assert_eq!(t.b_low.len(), s);
        for (i, row) in t.a.iter().enumerate() {
            assert_eq!(row.len(), i);
            let sum: f64 = row.iter().sum();
            assert!((sum - t.c[i]).abs() < 1e-14, "row {i}");
        }
        assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((t.b_low.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    fn quadrature_order(b: &[f64], c: &[f64]) -> u32 {
        // largest p with sum b_i c_i^(k-1) = 1/k for all k <= p
        let mut p = 0;
        for k in 1..=8 {
            let lhs: f64 = b.iter().zip(c).map(|(bi, ci)| bi * ci.powi(k - 1)).sum();
            if (lhs - 1.0 / k as f64).abs() > 1e-13 {
                break;
            }
            p = k as u32;
        }
        p
    }

    #[test]
    fn tableaus_are_consistent() {
        for t in [&DOPRI5, &CASH_KARP, &RKF45, &BS23] {
            check_consistency(t);
            assert!(quadrature_order(t.b, t.c) >= t.order);
            assert!(quadrature_order(t.b_low, t.c) >= t.order_low);
        }
    }
}
