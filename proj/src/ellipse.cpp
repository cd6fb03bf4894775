#include "cdm/ellipse_fit.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cdm {

EllipseFit<double> fit_ellipse(const std::vector<Vec2>& points) {
    Eigen::MatrixX2d m(static_cast<Eigen::Index>(points.size()), 2);
    for (std::size_t i = 0; i < points.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
    return fit_ellipse(m);
}

std::vector<Vec2> contour_edge_points(const Contour& contour) {
    const auto& pts = contour.points;
    const std::size_t n = pts.size();
    std::vector<Pixel> members(pts.begin(), pts.end());
    std::sort(members.begin(), members.end());

    // Even-odd crossings of the polygon per row, sorted by column.
    std::map<int, std::vector<double>> crossings;
    for (std::size_t i = 0; i < n; ++i) {
        const Pixel& p = pts[i];
        const Pixel& q = pts[(i + 1) % n];
        const int lo = std::min(p.row, q.row), hi = std::max(p.row, q.row);
        for (int r = lo; r < hi; ++r) {
            // Half-open in rows so a vertex on the scanline counts once.
            const double t = (r - p.row) / static_cast<double>(q.row - p.row);
            crossings[r].push_back(p.col + t * (q.col - p.col));
        }
    }
    for (auto& [r, xs] : crossings) std::sort(xs.begin(), xs.end());
    auto inside = [&](int col, int row) {
        if (std::binary_search(members.begin(), members.end(), Pixel{col, row})) return true;
        const auto it = crossings.find(row);
        if (it == crossings.end()) return false;
        const auto& xs = it->second;
        return (std::lower_bound(xs.begin(), xs.end(), static_cast<double>(col)) - xs.begin()) % 2 == 1;
    };

    static constexpr int kSteps[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    std::vector<Vec2> out;
    out.reserve(n);
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (const Pixel& p : members) {
        for (const auto& d : kSteps) {
            if (!inside(p.col + d[0], p.row + d[1])) out.emplace_back(p.col + 0.5 * d[0], p.row + 0.5 * d[1]);
        }
    }
    return out;
}

EllipseFit<double> ellipse_from_contour(const Contour& contour) {
    if (contour.points.size() < 6) {
        throw InsufficientData("insufficient points: contour has " + std::to_string(contour.points.size()) + " points");
    }
    return fit_ellipse(contour_edge_points(contour));
}

bool ellipse_contains(const Ellipse& e, double x, double y) {
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    const double dx = x - e.center.x(), dy = y - e.center.y();
    const double u = c * dx + s * dy;
    const double v = -s * dx + c * dy;
    return (u * u) / (e.a * e.a) + (v * v) / (e.b * e.b) <= 1.0;
}

Vec2 ellipse_half_extents(const Ellipse& e) {
    const double c = std::cos(e.theta), s = std::sin(e.theta);
    return {std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s), std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c)};
}

BinaryMask rasterize_ellipse(const Ellipse& e, int width, int height) {
    if (width < 1 || height < 1) throw Error("canvas must be positive");
    BinaryMask out(width, height);
    if (!(e.a > 0 && e.b > 0)) return out;
    const Vec2 half = ellipse_half_extents(e);
    const int c0 = std::max(0, static_cast<int>(std::floor(e.center.x() - half.x())));
    const int c1 = std::min(width - 1, static_cast<int>(std::ceil(e.center.x() + half.x())));
    const int r0 = std::max(0, static_cast<int>(std::floor(e.center.y() - half.y())));
    const int r1 = std::min(height - 1, static_cast<int>(std::ceil(e.center.y() + half.y())));
    for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
            if (ellipse_contains(e, c, r)) out.set(c, r);
        }
    }
    return out;
}

}  // namespace cdm
