#pragma once

#include <optional>
#include <string>
#include <vector>

#include "depad/dataset.hpp"
#include "depad/rng.hpp"

namespace test_helpers {

inline depad::Dataset make_dataset(std::vector<std::vector<double>> cols,
                                   std::optional<std::vector<depad::Label>> labels = std::nullopt) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < cols.size(); ++j) names.push_back("x" + std::to_string(j));
    return depad::Dataset(std::move(cols), std::move(names), std::move(labels));
}

// chain x0 -> x1 -> x2 plus an independent noise column
inline depad::Dataset chain_dataset(std::uint64_t seed, std::size_t n) {
    depad::Rng rng(seed);
    std::vector<std::vector<double>> cols(4, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = rng.normal();
        const double x1 = 0.9 * x0 + 0.6 * rng.normal();
        const double x2 = 0.9 * x1 + 0.6 * rng.normal();
        cols[0][i] = x0;
        cols[1][i] = x1;
        cols[2][i] = x2;
        cols[3][i] = rng.normal();
    }
    return make_dataset(std::move(cols));
}

// collider x0 -> x2 <- x1
inline depad::Dataset collider_dataset(std::uint64_t seed, std::size_t n) {
    depad::Rng rng(seed);
    std::vector<std::vector<double>> cols(3, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double x0 = rng.normal();
        const double x1 = rng.normal();
        const double x2 = 0.8 * x0 + 0.8 * x1 + 0.5 * rng.normal();
        cols[0][i] = x0;
        cols[1][i] = x1;
        cols[2][i] = x2;
    }
    return make_dataset(std::move(cols));
}

inline depad::Dataset independent_dataset(std::uint64_t seed, std::size_t n, std::size_t m) {
    depad::Rng rng(seed);
    std::vector<std::vector<double>> cols(m, std::vector<double>(n));
    for (auto& col : cols)
        for (double& v : col) v = rng.normal();
    return make_dataset(std::move(cols));
}

} // namespace test_helpers
