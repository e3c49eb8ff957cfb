use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use super::{CircuitError, GateKind, Matrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn phase(angle: f64) -> Complex64 {
    Complex64::from_polar(1.0, angle)
}

/// Standard unitary for `kind`.
///
/// Multi-qubit matrices use the first operand as the most significant bit of
/// the local basis index, so `cx` is control-first in the textbook layout.
pub fn gate_unitary(kind: GateKind, params: &[f64]) -> Result<Matrix, CircuitError> {
    if !kind.is_unitary() {
        return Err(CircuitError::NotUnitary(kind));
    }
    if params.len() != kind.param_count() {
        return Err(CircuitError::ParamArity {
            kind,
            expected: kind.param_count(),
            got: params.len(),
        });
    }
    let m = match kind {
        GateKind::Id => Matrix::identity(2),
        GateKind::X => Matrix::from_rows(&[&[ZERO, ONE], &[ONE, ZERO]]),
        GateKind::Y => Matrix::from_rows(&[&[ZERO, -I], &[I, ZERO]]),
        GateKind::Z => Matrix::diagonal(&[ONE, -ONE]),
        GateKind::H => Matrix::from_rows(&[&[ONE, ONE], &[ONE, -ONE]]).scale(FRAC_1_SQRT_2),
        GateKind::S => Matrix::diagonal(&[ONE, I]),
        GateKind::Sdg => Matrix::diagonal(&[ONE, -I]),
        GateKind::T => Matrix::diagonal(&[ONE, phase(FRAC_PI_4)]),
        GateKind::Tdg => Matrix::diagonal(&[ONE, phase(-FRAC_PI_4)]),
        GateKind::Rx => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
            Matrix::from_rows(&[&[c, -I * s], &[-I * s, c]])
        }
        GateKind::Ry => {
            let (s, c) = (params[0] / 2.0).sin_cos();
            let (c, s) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
            Matrix::from_rows(&[&[c, -s], &[s, c]])
        }
        GateKind::Rz => Matrix::diagonal(&[phase(-params[0] / 2.0), phase(params[0] / 2.0)]),
        GateKind::U1 => Matrix::diagonal(&[ONE, phase(params[0])]),
        GateKind::U2 => {
            let (phi, lambda) = (params[0], params[1]);
            Matrix::from_rows(&[&[ONE, -phase(lambda)], &[phase(phi), phase(phi + lambda)]]).scale(FRAC_1_SQRT_2)
        }
        GateKind::U3 => {
            let (theta, phi, lambda) = (params[0], params[1], params[2]);
            let (s, c) = (theta / 2.0).sin_cos();
            Matrix::from_rows(&[
                &[Complex64::new(c, 0.0), -phase(lambda) * s],
                &[phase(phi) * s, phase(phi + lambda) * c],
            ])
        }
        GateKind::Cx => Matrix::from_rows(&[
            &[ONE, ZERO, ZERO, ZERO],
            &[ZERO, ONE, ZERO, ZERO],
            &[ZERO, ZERO, ZERO, ONE],
            &[ZERO, ZERO, ONE, ZERO],
        ]),
        GateKind::Cz => Matrix::diagonal(&[ONE, ONE, ONE, -ONE]),
        GateKind::Swap => Matrix::from_rows(&[
            &[ONE, ZERO, ZERO, ZERO],
            &[ZERO, ZERO, ONE, ZERO],
            &[ZERO, ONE, ZERO, ZERO],
            &[ZERO, ZERO, ZERO, ONE],
        ]),
        GateKind::Ccx => {
            let mut m = Matrix::identity(8);
            m.set(6, 6, ZERO);
            m.set(7, 7, ZERO);
            m.set(6, 7, ONE);
            m.set(7, 6, ONE);
            m
        }
        GateKind::Measure | GateKind::Barrier => unreachable!(),
    };
    Ok(m)
}
