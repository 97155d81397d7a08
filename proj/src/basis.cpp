#include "plexq/basis.hpp"

#include <stdexcept>

namespace plexq {

BasisDescriptor::BasisDescriptor(std::size_t n_dots, std::size_t n_pl)
    : n_dots_(n_dots), n_pl_(n_pl) {
    if (n_dots < 1) throw std::invalid_argument("basis: n_dots must be >= 1");
    if (n_pl < 2) throw std::invalid_argument("basis: n_pl must be >= 2");
    if (n_dots > 24) throw std::invalid_argument("basis: n_dots too large for a dense basis");
    dim_ = n_pl * (std::size_t{1} << n_dots);
}

std::size_t BasisDescriptor::index(std::size_t s, const std::vector<int>& q) const {
    if (s >= n_pl_) throw std::out_of_range("basis: plasmon number out of range");
    if (q.size() != n_dots_) throw std::invalid_argument("basis: wrong number of dot labels");
    std::size_t flat = s;
    for (int qj : q) {
        if (qj != 0 && qj != 1) throw std::invalid_argument("basis: dot label must be 0 or 1");
        flat = (flat << 1) | static_cast<std::size_t>(qj);
    }
    return flat;
}

std::size_t BasisDescriptor::index(const BasisState& state) const {
    return index(state.s, state.q);
}

BasisState BasisDescriptor::decode(std::size_t flat) const {
    if (flat >= dim_) throw std::out_of_range("basis: flat index out of range");
    BasisState out;
    out.s = plasmon_number(flat);
    out.q.resize(n_dots_);
    for (std::size_t j = 1; j <= n_dots_; ++j) out.q[j - 1] = dot_occupation(flat, j);
    return out;
}

int BasisDescriptor::dot_occupation(std::size_t flat, std::size_t j) const {
    return static_cast<int>((flat >> (n_dots_ - j)) & 1U);
}

BasisDescriptor build_basis(long n_dots, long n_pl) {
    if (n_dots < 1) throw std::invalid_argument("build_basis: n_dots must be >= 1");
    if (n_pl < 2) throw std::invalid_argument("build_basis: n_pl must be >= 2");
    return BasisDescriptor(static_cast<std::size_t>(n_dots), static_cast<std::size_t>(n_pl));
}

}  // namespace plexq
