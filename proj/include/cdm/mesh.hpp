#pragma once

#include "cdm/raster.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace cdm {

/// One serial section: closed polygon in calibrated (x, y) at height z.
struct Slice {
    double z = 0.0;
    std::vector<Vec2> points;
};

struct SliceStack {
    std::vector<Slice> slices;
};

struct Mesh {
    Eigen::Matrix<double, Eigen::Dynamic, 3> vertices;
    Eigen::Matrix<int, Eigen::Dynamic, 3> faces;  // 0-based vertex indices
};

struct MeshOptions {
    int max_resample = 2048;
};

/// Contour pixel centres scaled to nm.
Slice slice_from_contour(const Contour& contour, double z, const Calibration& calib = {});

/// `n` points at equal arc length along the closed polygon, starting at its
/// first vertex.
std::vector<Vec2> resample_closed(const std::vector<Vec2>& polygon, int n);

/// Stitches consecutive slices. Every slice is resampled to the same N (the
/// longest contour, capped), each slice is cyclically shifted to best match
/// the one below, and every band gets two triangles per point pair.
/// Zero-area triangles are dropped.
Mesh build_mesh(const SliceStack& stack, const MeshOptions& options = {});

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const Mesh& mesh);

/// Wavefront OBJ text: header comment, `v` lines with six decimals, then
/// 1-based `f` lines.
std::string to_obj(const Mesh& mesh);
void export_obj(const Mesh& mesh, const std::filesystem::path& path);

/// Manifest: `z_spacing = <nm>` followed by one mask path per line, bottom
/// slice first. Relative paths resolve against the manifest's directory.
/// `#` starts a comment.
struct SliceManifest {
    double z_spacing = 1.0;
    std::vector<std::filesystem::path> masks;
};

SliceManifest read_manifest(const std::filesystem::path& path);

}  // namespace cdm
