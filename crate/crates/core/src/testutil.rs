use crate::model::{
    DecayConfig, DopplerConfig, FieldConfig, GeometryConfig, QuadratureKind, SystemParams, DIPOLE_12, DIPOLE_23,
    LAMBDA_PROBE, LAMBDA_PUMP, REFERENCE_DENSITY,
};

pub fn field() -> FieldConfig {
    FieldConfig {
        alpha1: 10.0,
        alpha2: 50.0,
        delta1: 0.0,
        delta2: 0.0,
        g1: None,
        g2: None,
        mu12: Some(DIPOLE_12),
        mu23: Some(DIPOLE_23),
        lambda1: LAMBDA_PROBE,
        lambda2: LAMBDA_PUMP,
    }
}

pub fn geometry() -> GeometryConfig {
    GeometryConfig {
        r: 4.5e-4,
        length: 0.06,
        density: REFERENCE_DENSITY,
    }
}

pub fn baseline(p: f64) -> SystemParams {
    SystemParams::new(
        DecayConfig::with_collisions(3.0, 0.5, p),
        field(),
        geometry(),
        DopplerConfig {
            width: 530.0,
            nodes: 8,
            residual_mismatch: false,
            quadrature: QuadratureKind::Adaptive,
        },
    )
    .unwrap()
}

pub fn stationary(p: f64) -> SystemParams {
    let mut s = baseline(p);
    s.doppler = DopplerConfig::stationary();
    s
}
