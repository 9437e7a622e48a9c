//! CODATA 2018 exact and recommended values (SI).

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Impedance of free space, ohm.
pub const FREE_SPACE_IMPEDANCE: f64 = 376.730_313_668;

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
