#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace srrc {

/// Seeded pseudorandom source with a portable normal sampler.
///
/// std::normal_distribution is implementation defined, so normals are drawn
/// with the polar Box-Muller method on top of mt19937_64 to keep outputs
/// identical across standard libraries.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64/polar-box-muller/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal();
    Eigen::VectorXd normal_vector(Eigen::Index size);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace srrc
