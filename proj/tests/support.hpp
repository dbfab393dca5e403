#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "pcn/matrix.hpp"
#include "pcn/model.hpp"
#include "pcn/random.hpp"

namespace testing {

inline void check_close(const pcn::Matrix& actual, const pcn::Matrix& expected,
                        double tol = 1e-12) {
    REQUIRE(actual.rows() == expected.rows());
    REQUIRE(actual.cols() == expected.cols());
    for (std::size_t r = 0; r < actual.rows(); ++r)
        for (std::size_t c = 0; c < actual.cols(); ++c) {
            INFO("entry (" << r << "," << c << ")");
            CHECK(actual(r, c) == doctest::Approx(expected(r, c)).epsilon(tol));
        }
}

inline pcn::Matrix random_matrix(pcn::Rng& rng, std::size_t rows, std::size_t cols,
                                 double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    pcn::Matrix m(rows, cols);
    for (double& v : m.values()) v = dist(rng);
    return m;
}

inline std::size_t pick(pcn::Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random config with L in [1, max_layers], widths in [1, max_width].
inline pcn::ModelConfig random_config(pcn::Rng& rng, std::size_t max_layers = 3,
                                      std::size_t max_width = 7, bool smooth_only = false) {
    const std::size_t L = pick(rng, 1, max_layers);
    pcn::ModelConfig c;
    c.dims.resize(L + 1);
    for (auto& d : c.dims) d = pick(rng, 1, max_width);
    c.output_dim = pick(rng, 1, max_width);
    for (std::size_t l = 0; l < L; ++l)
        c.activations.push_back(static_cast<pcn::Activation>(
            smooth_only ? pick(rng, 1, 2) : pick(rng, 0, 2)));
    c.latent_init_scale = 1.0;
    return c;
}

inline pcn::Matrix random_labels(pcn::Rng& rng, std::size_t batch, std::size_t classes) {
    pcn::Matrix y(batch, classes);
    for (std::size_t b = 0; b < batch; ++b) y(b, pick(rng, 0, classes - 1)) = 1.0;
    return y;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("pcn-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
