#pragma once

#include <Eigen/Core>

#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cdm {

/// All recoverable failures in the library surface as cdm::Error with a
/// human-readable message; the CLI maps them to per-file failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input too small or too featureless for a fit ("insufficient points",
/// "insufficient periods", "no oscillation"); callers may fall back.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// Integer raster coordinate. Columns grow rightward, rows grow downward,
/// origin at the top-left pixel.
struct Pixel {
    int col = 0;
    int row = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    /// Raster order: row-major.
    friend std::strong_ordering operator<=>(const Pixel& a, const Pixel& b) {
        if (auto c = a.row <=> b.row; c != 0) return c;
        return a.col <=> b.col;
    }
};

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Physical scale of one pixel. Defaults to 1/1 so reports read in pixels.
struct Calibration {
    double nm_per_px_x = 1.0;
    double nm_per_px_y = 1.0;

    void validate() const {
        if (!(std::isfinite(nm_per_px_x) && nm_per_px_x > 0.0 &&
              std::isfinite(nm_per_px_y) && nm_per_px_y > 0.0)) {
            throw Error("calibration must be finite and positive");
        }
    }
    bool isotropic() const { return nm_per_px_x == nm_per_px_y; }
};

constexpr double kPi = 3.14159265358979323846;

inline double to_degrees(double rad) { return rad * 180.0 / kPi; }
inline double to_radians(double deg) { return deg * kPi / 180.0; }

}  // namespace cdm
