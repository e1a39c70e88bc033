#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sixv {

using Mask = std::uint32_t;

inline constexpr int kDefaultMaxL = 16;

// One column of horizontal arrows. Bit j set means the arrow at height j points right.
struct ColumnConfig {
    Mask bits = 0;
    int L = 0;

    int spin(int j) const { return (bits >> j) & 1u ? +1 : -1; }
    bool operator==(const ColumnConfig&) const = default;
};

Mask low_mask(int L);

// Cyclic up-shift: arrow at height j moves to height j+1.
Mask shift_up(Mask bits, int L);
Mask shift_up(Mask bits, int L, int times);

std::string to_string(const ColumnConfig& cfg);

class BasisIndex {
public:
    BasisIndex() = default;

    int L() const { return L_; }
    std::size_t size() const { return configs_.size(); }
    Mask config(std::size_t i) const { return configs_[i]; }
    ColumnConfig column(std::size_t i) const { return {configs_[i], L_}; }
    const std::vector<Mask>& configs() const { return configs_; }

    bool contains(Mask bits) const;
    // Rank of a balanced mask; throws std::out_of_range for anything else.
    std::size_t rank(Mask bits) const;

private:
    friend BasisIndex enumerate_balanced(int L, int max_L);
    int L_ = 0;
    std::vector<Mask> configs_;
    std::vector<std::int32_t> rank_;  // indexed by mask, -1 if not balanced
};

BasisIndex enumerate_balanced(int L, int max_L = kDefaultMaxL);

struct Orbit {
    std::size_t representative = 0;  // basis rank of the smallest mask in the orbit
    int period = 0;
};

struct OrbitTable {
    std::vector<Orbit> orbits;
    std::vector<std::int32_t> orbit_of;   // per basis rank
    std::vector<std::int32_t> offset_of;  // config = shift_up(rep, offset)
};

OrbitTable orbit_decomposition(const BasisIndex& basis);

std::uint64_t binomial(int n, int k);

}  // namespace sixv
