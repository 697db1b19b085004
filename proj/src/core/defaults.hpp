#pragma once

// Fitted wind-gust model of the case study (power semivariogram, GEV margins)
// and the damage-function constants; used as configuration defaults.

namespace hrcorr::case_study {

inline constexpr double kappa = 3.39;
inline constexpr double psi = 0.81;
inline constexpr double eta = 25.71;
inline constexpr double tau = 3.03;
inline constexpr double xi = -0.12;
inline constexpr int beta = 10;
inline constexpr double c1 = 82.2;

// Region in degrees: longitude 5.75 to 12, latitude 49 to 52.
inline constexpr double lon_min = 5.75;
inline constexpr double lon_max = 12.0;
inline constexpr double lat_min = 49.0;
inline constexpr double lat_max = 52.0;

}  // namespace hrcorr::case_study
