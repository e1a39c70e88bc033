#include "sixv/transfer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sixv {

namespace {

int spin_at(Mask m, int j) { return (m >> j) & 1u ? +1 : -1; }

// Unique vertical assignment for a non-trivial flip set, or false if the flips are
// not alternating in sign around the cycle.
bool forced_alpha(Mask from, Mask flips, int L, Mask& alpha) {
    int prev = 0;
    int first = 0;
    for (int j = 0; j < L; ++j) {
        if (!((flips >> j) & 1u)) continue;
        const int s = spin_at(from, j);
        if (prev == 0) first = s;
        else if (s == prev) return false;
        prev = s;
    }
    if (prev == 0 || prev == first) return false;
    alpha = 0;
    int cur = prev;
    for (int j = 0; j < L; ++j) {
        if ((flips >> j) & 1u) cur = spin_at(from, j);
        if (cur > 0) alpha |= Mask{1} << j;
    }
    return true;
}

void check_same_length(ColumnConfig a, ColumnConfig b) {
    if (a.L != b.L) throw std::invalid_argument("column configurations have different lengths");
    if (a.L < 2 || a.L > 30) throw std::invalid_argument("column length out of range");
}

}  // namespace

ModelParams ModelParams::from_c(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("vertex weight c must be positive");
    return ModelParams{c};
}

double ModelParams::zeta() const {
    const double d = delta();
    if (d < -1.0 - 1e-15 || d > 1.0) throw std::domain_error("zeta needs c in (0, 2]");
    return std::acos(std::clamp(-d, -1.0, 1.0));
}

std::vector<Mask> valid_verticals(ColumnConfig from, ColumnConfig to) {
    check_same_length(from, to);
    const int L = from.L;
    if (from.bits == to.bits) return {low_mask(L), Mask{0}};
    Mask alpha = 0;
    if (!forced_alpha(from.bits, from.bits ^ to.bits, L, alpha)) return {};
    return {alpha};
}

double line_entry(Mask from, Mask to, int L, Mask monomial, double c) {
    double sum = 0.0;
    const double w = std::pow(c, std::popcount(from ^ to));
    for (Mask a : valid_verticals({from, L}, {to, L})) {
        const int minus = std::popcount(monomial & ~a & low_mask(L));
        sum += (minus % 2 == 0 ? 1.0 : -1.0) * w;
    }
    return sum;
}

double transfer_entry(ColumnConfig from, ColumnConfig to, const ModelParams& p) {
    check_same_length(from, to);
    return line_entry(from.bits, to.bits, from.L, 0, p.c);
}

double vertical_entry(ColumnConfig from, ColumnConfig to, int j, const ModelParams& p) {
    check_same_length(from, to);
    if (j < 0 || j >= from.L) throw std::out_of_range("vertical position out of range");
    return line_entry(from.bits, to.bits, from.L, Mask{1} << j, p.c);
}

std::vector<Transition> flip_transitions(Mask from, int L) {
    std::vector<Transition> out;
    // Depth-first over positions; the signs of chosen positions must alternate.
    struct Frame {
        int pos;
        Mask flips;
        int last;
        int count;
    };
    std::vector<Frame> stack{{0, 0, 0, 0}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.pos == L) {
            if (f.count >= 2 && f.count % 2 == 0) {
                Transition t;
                t.target = from ^ f.flips;
                t.flips = f.count;
                forced_alpha(from, f.flips, L, t.alpha);
                out.push_back(t);
            }
            continue;
        }
        stack.push_back({f.pos + 1, f.flips, f.last, f.count});
        const int s = spin_at(from, f.pos);
        if (f.count == 0 || s != f.last)
            stack.push_back({f.pos + 1, f.flips | (Mask{1} << f.pos), s, f.count + 1});
    }
    std::sort(out.begin(), out.end(), [](const Transition& a, const Transition& b) { return a.target < b.target; });
    return out;
}

Eigen::MatrixXd dense_transfer(const BasisIndex& basis, const ModelParams& p) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            t(k, i) = transfer_entry(basis.column(i), basis.column(k), p);
    return t;
}

Eigen::MatrixXd dense_vertical(const BasisIndex& basis, int j, const ModelParams& p) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k)
            s(k, i) = vertical_entry(basis.column(i), basis.column(k), j, p);
    return s;
}

Eigen::MatrixXd dense_shift(const BasisIndex& basis) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        m(static_cast<Eigen::Index>(basis.rank(shift_up(basis.config(i), basis.L()))), i) = 1.0;
    return m;
}

TransitionTable::TransitionTable(const BasisIndex& basis, const ModelParams& p) {
    const int L = basis.L();
    offsets_.reserve(basis.size() + 1);
    offsets_.push_back(0);
    std::vector<double> cpow(L + 1);
    for (int f = 0; f <= L; ++f) cpow[f] = std::pow(p.c, f);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        for (const Transition& t : flip_transitions(basis.config(i), L))
            entries_.push_back({static_cast<std::int32_t>(basis.rank(t.target)), t.alpha, cpow[t.flips]});
        offsets_.push_back(entries_.size());
    }
}

void TransitionTable::apply(Mask monomial, const Eigen::VectorXd& w, Eigen::VectorXd& out, double scale) const {
    const std::size_t n = size();
    out.setZero(static_cast<Eigen::Index>(n));
    const bool even = std::popcount(monomial) % 2 == 0;
    const double inv = 1.0 / scale;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[static_cast<Eigen::Index>(i)] * inv;
        if (wi == 0.0) continue;
        if (even) out[static_cast<Eigen::Index>(i)] += 2.0 * wi;
        for (const Entry* e = begin(i); e != end(i); ++e) {
            const bool neg = std::popcount(monomial & ~e->alpha) % 2 != 0;
            out[e->target] += (neg ? -e->weight : e->weight) * wi;
        }
    }
}

namespace {

std::vector<std::vector<std::int32_t>> orbit_members(const BasisIndex& basis, const OrbitTable& orbits) {
    std::vector<std::vector<std::int32_t>> members(orbits.orbits.size());
    for (std::size_t o = 0; o < orbits.orbits.size(); ++o) {
        Mask m = basis.config(orbits.orbits[o].representative);
        for (int j = 0; j < orbits.orbits[o].period; ++j) {
            members[o].push_back(static_cast<std::int32_t>(basis.rank(m)));
            m = shift_up(m, basis.L());
        }
    }
    return members;
}

cplx root_of_unity(long num, int L) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(num % L) / L;
    return {std::cos(ang), std::sin(ang)};
}

struct SectorLayout {
    std::vector<std::vector<std::int32_t>> orbits;   // per momentum
    std::vector<std::vector<std::int32_t>> orbit_pos;  // per momentum, per orbit id
};

SectorLayout sector_layout(const OrbitTable& orbits, int L) {
    SectorLayout lay;
    lay.orbits.resize(L);
    lay.orbit_pos.assign(L, std::vector<std::int32_t>(orbits.orbits.size(), -1));
    for (int m = 0; m < L; ++m)
        for (std::size_t o = 0; o < orbits.orbits.size(); ++o)
            if ((orbits.orbits[o].period * m) % L == 0) {
                lay.orbit_pos[m][o] = static_cast<std::int32_t>(lay.orbits[m].size());
                lay.orbits[m].push_back(static_cast<std::int32_t>(o));
            }
    return lay;
}

// Hermitian block of t in each momentum sector, built from sparse columns t e_r.
std::vector<Eigen::MatrixXcd> sector_matrices(const BasisIndex& basis, const OrbitTable& orbits,
                                              const SectorLayout& lay, const ModelParams& p) {
    const int L = basis.L();
    std::vector<Eigen::MatrixXcd> H(L);
    for (int m = 0; m < L; ++m) {
        const auto d = static_cast<Eigen::Index>(lay.orbits[m].size());
        H[m] = Eigen::MatrixXcd::Zero(d, d);
    }
    std::vector<cplx> phase(static_cast<std::size_t>(L) * L);
    for (int m = 0; m < L; ++m)
        for (int d = 0; d < L; ++d) phase[static_cast<std::size_t>(m) * L + d] = root_of_unity(static_cast<long>(m) * d, L);

    std::vector<double> cpow(L + 1);
    for (int f = 0; f <= L; ++f) cpow[f] = std::pow(p.c, f);

    for (std::size_t o = 0; o < orbits.orbits.size(); ++o) {
        const Orbit& orb = orbits.orbits[o];
        const Mask rep = basis.config(orb.representative);
        auto add = [&](Mask target, double w) {
            const std::size_t tr = basis.rank(target);
            const std::int32_t o2 = orbits.orbit_of[tr];
            const int d = orbits.offset_of[tr];
            const double norm = std::sqrt(static_cast<double>(orb.period) / orbits.orbits[o2].period);
            for (int m = 0; m < L; ++m) {
                const std::int32_t col = lay.orbit_pos[m][o];
                const std::int32_t row = lay.orbit_pos[m][o2];
                if (col < 0 || row < 0) continue;
                H[m](row, col) += norm * w * phase[static_cast<std::size_t>(m) * L + d];
            }
        };
        add(rep, 2.0);
        for (const Transition& t : flip_transitions(rep, L)) add(t.target, cpow[t.flips]);
    }
    return H;
}

}  // namespace

double EigenSystem::Lambda(std::size_t k) const {
    const Mode& md = modes_[k];
    return sectors_[md.sector].eigenvalues[md.column] / lambda0_;
}

cplx EigenSystem::shift_eigenvalue(std::size_t k) const { return root_of_unity(momentum(k), L()); }

double EigenSystem::b(std::size_t k) const {
    const int L_ = L();
    int m = momentum(k);
    if (2 * m > L_) m -= L_;
    return 2.0 * std::numbers::pi * m / L_;
}

Eigen::VectorXcd EigenSystem::full_vector(std::size_t k) const {
    const Mode& md = modes_[k];
    const Sector& s = sectors_[md.sector];
    const auto& members = members_;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis_.size()));
    for (std::size_t r = 0; r < s.orbits.size(); ++r) {
        const int p = orbits_.orbits[s.orbits[r]].period;
        const cplx coef = s.vectors(static_cast<Eigen::Index>(r), md.column) / std::sqrt(static_cast<double>(p));
        for (int j = 0; j < p; ++j)
            v[members[s.orbits[r]][j]] = coef * root_of_unity(-static_cast<long>(s.momentum) * j + static_cast<long>(L()) * L(), L());
    }
    return v;
}

Eigen::VectorXcd EigenSystem::project(const Eigen::VectorXd& w) const {
    return project(Eigen::VectorXcd(w.cast<cplx>()));
}

Eigen::VectorXcd EigenSystem::project(const Eigen::VectorXcd& w) const {
    const auto& members = members_;
    const auto& index = mode_index_;
    Eigen::VectorXcd out(static_cast<Eigen::Index>(modes_.size()));
    for (std::size_t si = 0; si < sectors_.size(); ++si) {
        const Sector& s = sectors_[si];
        if (s.orbits.empty()) continue;
        Eigen::VectorXcd pr(static_cast<Eigen::Index>(s.orbits.size()));
        for (std::size_t r = 0; r < s.orbits.size(); ++r) {
            const int p = orbits_.orbits[s.orbits[r]].period;
            cplx acc = 0.0;
            for (int j = 0; j < p; ++j)
                acc += root_of_unity(static_cast<long>(s.momentum) * j, L()) * w[members[s.orbits[r]][j]];
            pr[static_cast<Eigen::Index>(r)] = acc / std::sqrt(static_cast<double>(p));
        }
        const Eigen::VectorXcd coeff = s.vectors.adjoint() * pr;
        for (Eigen::Index c = 0; c < coeff.size(); ++c) out[index[si][c]] = coeff[c];
    }
    return out;
}

const TransitionTable& EigenSystem::transitions() const {
    std::call_once(*transitions_once_, [this] { transitions_ = std::make_shared<TransitionTable>(basis_, params_); });
    return *transitions_;
}

void EigenSystem::finalize() {
    lambda0_ = -1.0;
    std::int32_t top_col = -1;
    for (std::size_t si = 0; si < sectors_.size(); ++si) {
        const auto& ev = sectors_[si].eigenvalues;
        for (Eigen::Index c = 0; c < ev.size(); ++c)
            if (ev[c] > lambda0_) {
                lambda0_ = ev[c];
                if (sectors_[si].momentum == 0) top_col = static_cast<std::int32_t>(c);
                else top_col = -2;
            }
    }
    if (top_col < 0) throw std::runtime_error("top transfer eigenvalue is not in the zero-momentum sector");

    modes_.clear();
    std::size_t zero_sector = 0;
    for (std::size_t si = 0; si < sectors_.size(); ++si) {
        if (sectors_[si].momentum == 0) zero_sector = si;
        for (Eigen::Index c = 0; c < sectors_[si].eigenvalues.size(); ++c)
            modes_.push_back({static_cast<std::int32_t>(si), static_cast<std::int32_t>(c)});
    }
    const Mode top{static_cast<std::int32_t>(zero_sector), top_col};
    std::stable_sort(modes_.begin(), modes_.end(), [&](const Mode& a, const Mode& b) {
        const bool at = a.sector == top.sector && a.column == top.column;
        const bool bt = b.sector == top.sector && b.column == top.column;
        if (at != bt) return at;
        const double la = sectors_[a.sector].eigenvalues[a.column];
        const double lb = sectors_[b.sector].eigenvalues[b.column];
        if (std::abs(la) != std::abs(lb)) return std::abs(la) > std::abs(lb);
        if (la != lb) return la > lb;
        return sectors_[a.sector].momentum < sectors_[b.sector].momentum;
    });

    members_ = orbit_members(basis_, orbits_);
    mode_index_.assign(sectors_.size(), {});
    for (std::size_t si = 0; si < sectors_.size(); ++si)
        mode_index_[si].assign(static_cast<std::size_t>(sectors_[si].eigenvalues.size()), -1);
    for (std::size_t k = 0; k < modes_.size(); ++k)
        mode_index_[modes_[k].sector][modes_[k].column] = static_cast<std::int32_t>(k);

    // Perron vector: rotate the phase so the sector coefficients are positive reals.
    Sector& zs = sectors_[zero_sector];
    Eigen::Index imax = 0;
    zs.vectors.col(top_col).cwiseAbs().maxCoeff(&imax);
    const cplx ref = zs.vectors(imax, top_col);
    zs.vectors.col(top_col) *= std::conj(ref) / std::abs(ref);
    const Eigen::VectorXcd full = full_vector(0);
    v0_ = full.real();
    if (full.imag().cwiseAbs().maxCoeff() > 1e-12 || v0_.minCoeff() <= 0.0)
        throw std::runtime_error("top eigenvector is not strictly positive");
}

EigenSystem build_and_codiagonalize(int L, const ModelParams& p, int max_L) {
    EigenSystem sys;
    sys.params_ = p;
    sys.basis_ = enumerate_balanced(L, max_L);
    sys.orbits_ = orbit_decomposition(sys.basis_);
    const SectorLayout lay = sector_layout(sys.orbits_, L);
    const auto H = sector_matrices(sys.basis_, sys.orbits_, lay, p);

    sys.orbit_pos_ = lay.orbit_pos;
    double resid = 0.0;
    for (int m = 0; m < L; ++m) {
        EigenSystem::Sector s;
        s.momentum = m;
        s.orbits = lay.orbits[m];
        if (!s.orbits.empty()) {
            const double herm = (H[m] - H[m].adjoint()).cwiseAbs().maxCoeff();
            if (herm > 1e-9 * (1.0 + H[m].cwiseAbs().maxCoeff()))
                throw std::runtime_error("sector block is not Hermitian (momentum " + std::to_string(m) + ")");
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H[m]);
            if (es.info() != Eigen::Success) throw std::runtime_error("Hermitian eigensolver failed");
            s.eigenvalues = es.eigenvalues();
            s.vectors = es.eigenvectors();
        }
        sys.sectors_.push_back(std::move(s));
    }
    sys.finalize();
    for (int m = 0; m < L; ++m) {
        const auto& s = sys.sectors_[m];
        if (s.orbits.empty()) continue;
        const Eigen::MatrixXcd R = H[m] * s.vectors - s.vectors * s.eigenvalues.asDiagonal();
        resid = std::max(resid, R.cwiseAbs().maxCoeff() / sys.lambda0_);
    }
    sys.max_residual_ = resid;
    if (resid > kEigenResidualTol)
        throw std::runtime_error("eigenpair residual " + std::to_string(resid) + " exceeds tolerance");
    return sys;
}

namespace {

constexpr char kMagic[] = "6VLAB-EIG-v1";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b, 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    os.write(b, 8);
}
void put_f64(std::ostream& os, double x) { put_u64(os, std::bit_cast<std::uint64_t>(x)); }

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw std::runtime_error("truncated eigensystem cache");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
double get_f64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated eigensystem cache");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void save_eigensystem(const EigenSystem& sys, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    os.write(kMagic, kMagicLen);
    put_u32(os, static_cast<std::uint32_t>(sys.L()));
    put_f64(os, sys.params().c);
    put_f64(os, sys.lambda0());
    put_u32(os, static_cast<std::uint32_t>(sys.sectors().size()));
    for (const auto& s : sys.sectors()) {
        put_u32(os, static_cast<std::uint32_t>(s.momentum));
        const auto d = s.eigenvalues.size();
        put_u32(os, static_cast<std::uint32_t>(d));
        for (Eigen::Index i = 0; i < d; ++i) put_f64(os, s.eigenvalues[i]);
        for (Eigen::Index c = 0; c < d; ++c)
            for (Eigen::Index r = 0; r < d; ++r) {
                put_f64(os, s.vectors(r, c).real());
                put_f64(os, s.vectors(r, c).imag());
            }
    }
    if (!os) throw std::runtime_error("write failed for " + file.string());
}

EigenSystem load_eigensystem(const std::filesystem::path& file, int max_L) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    char magic[kMagicLen];
    if (!is.read(magic, kMagicLen) || std::string(magic, kMagicLen) != kMagic)
        throw std::runtime_error("bad eigensystem cache header in " + file.string());
    const int L = static_cast<int>(get_u32(is));
    EigenSystem sys;
    sys.params_ = ModelParams::from_c(get_f64(is));
    const double stored_lambda0 = get_f64(is);
    sys.basis_ = enumerate_balanced(L, max_L);
    sys.orbits_ = orbit_decomposition(sys.basis_);
    const SectorLayout lay = sector_layout(sys.orbits_, L);
    sys.orbit_pos_ = lay.orbit_pos;
    const std::uint32_t ns = get_u32(is);
    if (ns != static_cast<std::uint32_t>(L)) throw std::runtime_error("sector count mismatch in cache");
    for (std::uint32_t si = 0; si < ns; ++si) {
        EigenSystem::Sector s;
        s.momentum = static_cast<int>(get_u32(is));
        if (s.momentum != static_cast<int>(si)) throw std::runtime_error("sector order mismatch in cache");
        s.orbits = lay.orbits[s.momentum];
        const auto d = static_cast<Eigen::Index>(get_u32(is));
        if (d != static_cast<Eigen::Index>(s.orbits.size())) throw std::runtime_error("sector size mismatch in cache");
        s.eigenvalues.resize(d);
        for (Eigen::Index i = 0; i < d; ++i) s.eigenvalues[i] = get_f64(is);
        s.vectors.resize(d, d);
        for (Eigen::Index c = 0; c < d; ++c)
            for (Eigen::Index r = 0; r < d; ++r) {
                const double re = get_f64(is);
                const double im = get_f64(is);
                s.vectors(r, c) = {re, im};
            }
        sys.sectors_.push_back(std::move(s));
    }
    sys.finalize();
    if (std::abs(sys.lambda0_ - stored_lambda0) > 1e-12 * std::abs(stored_lambda0))
        throw std::runtime_error("cached top eigenvalue is inconsistent");
    const auto H = sector_matrices(sys.basis_, sys.orbits_, lay, sys.params_);
    double resid = 0.0;
    for (int m = 0; m < L; ++m) {
        const auto& s = sys.sectors_[m];
        if (s.orbits.empty()) continue;
        const Eigen::MatrixXcd R = H[m] * s.vectors - s.vectors * s.eigenvalues.asDiagonal();
        resid = std::max(resid, R.cwiseAbs().maxCoeff() / sys.lambda0_);
    }
    sys.max_residual_ = resid;
    if (resid > kEigenResidualTol) throw std::runtime_error("cached eigensystem fails the residual check");
    return sys;
}

}  // namespace sixv
