#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace emp {

/// Deterministic child seed from a master seed and a list of task keys.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
    std::vector<std::uint32_t> material;
    material.push_back(static_cast<std::uint32_t>(master));
    material.push_back(static_cast<std::uint32_t>(master >> 32));
    for (std::uint64_t k : keys) {
        material.push_back(static_cast<std::uint32_t>(k));
        material.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(material.begin(), material.end());
    std::array<std::uint32_t, 2> words{};
    seq.generate(words.begin(), words.end());
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace emp
