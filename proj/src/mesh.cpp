#include "cdm/mesh.hpp"

#include "cdm/fsutil.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace cdm {

Slice slice_from_contour(const Contour& contour, double z, const Calibration& calib) {
    calib.validate();
    Slice s;
    s.z = z;
    s.points.reserve(contour.points.size());
    for (const Pixel& p : contour.points) s.points.emplace_back(p.col * calib.nm_per_px_x, p.row * calib.nm_per_px_y);
    return s;
}

std::vector<Vec2> resample_closed(const std::vector<Vec2>& polygon, int n) {
    const std::size_t m = polygon.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + (polygon[(i + 1) % m] - polygon[i]).norm();
    const double total = cum[m];
    if (!(total > 0.0)) throw Error("degenerate slice: zero perimeter");

    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * k / n;
        while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
        out.push_back(polygon[seg] + t * (polygon[(seg + 1) % m] - polygon[seg]));
    }
    return out;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

namespace {

// Shift s minimising sum |lower[i] - upper[(i + s) % n]|^2.
int best_shift(const std::vector<Vec2>& lower, const std::vector<Vec2>& upper) {
    const int n = static_cast<int>(lower.size());
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        double cost = 0.0;
        for (int i = 0; i < n && cost < best_cost; ++i) cost += (lower[i] - upper[(i + s) % n]).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best = s;
        }
    }
    return best;
}

double signed_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

}  // namespace

Mesh build_mesh(const SliceStack& stack, const MeshOptions& options) {
    const auto& slices = stack.slices;
    if (slices.size() < 2) throw Error("degenerate slice: need at least 2 slices, got " + std::to_string(slices.size()));
    std::size_t longest = 0;
    for (std::size_t i = 0; i < slices.size(); ++i) {
        if (slices[i].points.size() < 3) throw Error("degenerate slice: slice " + std::to_string(i) + " has fewer than 3 points");
        if (i > 0 && !(slices[i].z > slices[i - 1].z)) throw Error("unsorted stack: z must increase at slice " + std::to_string(i));
        longest = std::max(longest, slices[i].points.size());
    }
    if (options.max_resample < 3) throw Error("resample cap must be at least 3");
    const int n = static_cast<int>(std::min<std::size_t>(longest, static_cast<std::size_t>(options.max_resample)));

    // All rings follow the winding of the first slice.
    const bool positive = signed_area(slices.front().points) >= 0.0;
    std::vector<std::vector<Vec2>> rings;
    rings.reserve(slices.size());
    for (std::size_t i = 0; i < slices.size(); ++i) {
        std::vector<Vec2> pts = slices[i].points;
        if ((signed_area(pts) >= 0.0) != positive) std::reverse(pts.begin(), pts.end());
        std::vector<Vec2> ring = resample_closed(pts, n);
        if (i > 0) std::rotate(ring.begin(), ring.begin() + best_shift(rings.back(), ring), ring.end());
        rings.push_back(std::move(ring));
    }

    Mesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(rings.size()) * n, 3);
    for (std::size_t k = 0; k < rings.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            mesh.vertices.row(static_cast<Eigen::Index>(k) * n + i) << rings[k][i].x(), rings[k][i].y(), slices[k].z;
        }
    }
    std::vector<Eigen::RowVector3i> faces;
    faces.reserve(2 * static_cast<std::size_t>(n) * (rings.size() - 1));
    auto emit = [&](int a, int b, int c) {
        if (triangle_area(mesh.vertices.row(a), mesh.vertices.row(b), mesh.vertices.row(c)) > 0.0) faces.emplace_back(a, b, c);
    };
    for (int k = 0; k + 1 < static_cast<int>(rings.size()); ++k) {
        const int lo = k * n, hi = (k + 1) * n;
        for (int i = 0; i < n; ++i) {
            const int j = (i + 1) % n;
            emit(lo + i, lo + j, hi + j);
            emit(lo + i, hi + j, hi + i);
        }
    }
    mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t f = 0; f < faces.size(); ++f) mesh.faces.row(static_cast<Eigen::Index>(f)) = faces[f];
    return mesh;
}

double surface_area(const Mesh& mesh) {
    double total = 0.0;
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        total += triangle_area(mesh.vertices.row(mesh.faces(f, 0)), mesh.vertices.row(mesh.faces(f, 1)),
                               mesh.vertices.row(mesh.faces(f, 2)));
    }
    return total;
}

std::string to_obj(const Mesh& mesh) {
    std::string out = "# cdmetro mesh: " + std::to_string(mesh.vertices.rows()) + " vertices, " +
                      std::to_string(mesh.faces.rows()) + " faces\n";
    char buf[128];
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v) {
        std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", mesh.vertices(v, 0), mesh.vertices(v, 1), mesh.vertices(v, 2));
        out += buf;
    }
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", mesh.faces(f, 0) + 1, mesh.faces(f, 1) + 1, mesh.faces(f, 2) + 1);
        out += buf;
    }
    return out;
}

void export_obj(const Mesh& mesh, const std::filesystem::path& path) { write_file_atomic(path, to_obj(mesh)); }

SliceManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read manifest: " + path.string());
    SliceManifest m;
    bool have_spacing = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
        if (auto eq = line.find('='); eq != std::string::npos) {
            std::string key = line.substr(0, eq);
            key.erase(key.find_last_not_of(" \t") + 1);
            if (key != "z_spacing") throw Error("manifest line " + std::to_string(lineno) + ": unknown key " + key);
            std::istringstream val(line.substr(eq + 1));
            if (!(val >> m.z_spacing) || !(m.z_spacing > 0.0)) {
                throw Error("manifest line " + std::to_string(lineno) + ": z_spacing must be positive");
            }
            have_spacing = true;
            continue;
        }
        std::filesystem::path p(line);
        if (p.is_relative()) p = path.parent_path() / p;
        m.masks.push_back(p);
    }
    if (!have_spacing) throw Error("manifest missing z_spacing: " + path.string());
    return m;
}

}  // namespace cdm
