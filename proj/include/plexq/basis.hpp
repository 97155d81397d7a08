// basis.hpp: truncated Fock (plasmon) x qubit (dots) product basis

#pragma once

#include <cstddef>
#include <vector>

namespace plexq {

struct BasisState {
    std::size_t s{0};        // plasmon number, 0..n_pl-1
    std::vector<int> q;      // q[j] in {0,1} for dot j+1

    bool operator==(const BasisState&) const = default;
};

// Flat index = s * 2^n_dots + sum_j q_j * 2^(n_dots - j), j = 1..n_dots.
// The plasmon index varies slowest, then dot 1, dot 2, ...
class BasisDescriptor {
public:
    BasisDescriptor() = default;
    BasisDescriptor(std::size_t n_dots, std::size_t n_pl);

    std::size_t n_dots() const { return n_dots_; }
    std::size_t n_pl() const { return n_pl_; }
    std::size_t dim() const { return dim_; }
    std::size_t dot_space() const { return std::size_t{1} << n_dots_; }

    std::size_t index(const BasisState& state) const;
    std::size_t index(std::size_t s, const std::vector<int>& q) const;
    BasisState decode(std::size_t flat) const;

    // q_j for dot j (1-based) of the flat index
    int dot_occupation(std::size_t flat, std::size_t j) const;
    std::size_t plasmon_number(std::size_t flat) const { return flat >> n_dots_; }

    // |s=0, all q=0>
    std::size_t ground_index() const { return 0; }

    bool operator==(const BasisDescriptor&) const = default;

private:
    std::size_t n_dots_{0};
    std::size_t n_pl_{0};
    std::size_t dim_{0};
};

// n_dots >= 1, n_pl >= 2; anything else throws std::invalid_argument
BasisDescriptor build_basis(long n_dots, long n_pl);

}  // namespace plexq
