#pragma once

#include "cdm/raster.hpp"
#include "cdm/rng.hpp"

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

namespace cdm::test {

inline BinaryMask random_mask(SplitMix64& rng, int w, int h, double density) {
    BinaryMask m(w, h);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) m.set(c, r, rng.uniform() < density);
    }
    return m;
}

inline BinaryMask rect_mask(int w, int h, int c0, int r0, int c1, int r1) {
    BinaryMask m(w, h);
    m.bits.block(r0, c0, r1 - r0 + 1, c1 - c0 + 1) = true;
    return m;
}

// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    const auto dir = std::filesystem::temp_directory_path() / "cdmetro_tests" /
                     (std::string(info->test_suite_name()) + "." + info->name());
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace cdm::test
