#include "sixv/basis.hpp"

#include <bit>
#include <stdexcept>

namespace sixv {

Mask low_mask(int L) { return L >= 32 ? ~Mask{0} : ((Mask{1} << L) - 1u); }

Mask shift_up(Mask bits, int L) {
    const Mask top = (bits >> (L - 1)) & 1u;
    return ((bits << 1) & low_mask(L)) | top;
}

Mask shift_up(Mask bits, int L, int times) {
    times %= L;
    if (times < 0) times += L;
    for (int i = 0; i < times; ++i) bits = shift_up(bits, L);
    return bits;
}

std::string to_string(const ColumnConfig& cfg) {
    std::string s;
    for (int j = 0; j < cfg.L; ++j) s += cfg.spin(j) > 0 ? '+' : '-';
    return s;
}

bool BasisIndex::contains(Mask bits) const {
    return bits < rank_.size() && rank_[bits] >= 0;
}

std::size_t BasisIndex::rank(Mask bits) const {
    if (!contains(bits)) throw std::out_of_range("mask is not a balanced configuration");
    return static_cast<std::size_t>(rank_[bits]);
}

BasisIndex enumerate_balanced(int L, int max_L) {
    if (L < 2 || L % 2 != 0)
        throw std::invalid_argument("L must be an even integer >= 2, got " + std::to_string(L));
    if (L > max_L)
        throw std::invalid_argument("L=" + std::to_string(L) + " exceeds the configured cap " +
                                    std::to_string(max_L));
    if (L > 24) throw std::invalid_argument("L above 24 is not supported by the dense rank table");

    BasisIndex b;
    b.L_ = L;
    b.rank_.assign(std::size_t{1} << L, -1);
    for (Mask m = 0; m < (Mask{1} << L); ++m) {
        if (std::popcount(m) == L / 2) {
            b.rank_[m] = static_cast<std::int32_t>(b.configs_.size());
            b.configs_.push_back(m);
        }
    }
    return b;
}

OrbitTable orbit_decomposition(const BasisIndex& basis) {
    const int L = basis.L();
    OrbitTable t;
    t.orbit_of.assign(basis.size(), -1);
    t.offset_of.assign(basis.size(), -1);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (t.orbit_of[i] >= 0) continue;
        const auto id = static_cast<std::int32_t>(t.orbits.size());
        Mask m = basis.config(i);
        int p = 0;
        do {
            const std::size_t r = basis.rank(m);
            t.orbit_of[r] = id;
            t.offset_of[r] = p;
            m = shift_up(m, L);
            ++p;
        } while (m != basis.config(i));
        t.orbits.push_back({i, p});
    }
    return t;
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

}  // namespace sixv
