#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nilcube/common.hpp"

namespace nilcube {

// A cube f: {0,1}^n -> X is packed into one 64-bit key, the value at vertex 0
// in the most significant slot.  Vertex v is the integer sum v_i 2^i, so
// numeric order on keys is lexicographic order on (f(0), f(1), ...), and the
// all-ones vertex is the last slot.
using Key = std::uint64_t;

class Cubespace {
public:
    Cubespace(std::vector<std::string> labels, int nmax);

    std::size_t size() const { return labels_.size(); }
    int nmax() const { return nmax_; }
    unsigned bits() const { return bits_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(Point p) const { return labels_[p]; }
    std::optional<Point> find_label(const std::string& s) const;

    std::optional<int> declared_step;
    std::string name;

    // Replaces Cu^n; keys are sorted and deduplicated.
    void set_cubes(int n, std::vector<Key> keys);
    const std::vector<Key>& cubes(int n) const { return cubes_.at(n); }
    std::size_t count(int n) const { return cubes_.at(n).size(); }

    Key pack(int n, const Point* f) const;
    Key pack(int n, const std::vector<Point>& f) const { return pack(n, f.data()); }
    void unpack(int n, Key k, Point* out) const;
    std::vector<Point> unpack(int n, Key k) const;
    Point at(int n, Key k, std::uint32_t v) const {
        return static_cast<Point>((k >> (bits_ * ((1u << n) - 1 - v))) & mask_);
    }

    bool contains_key(int n, Key k) const;
    bool contains(int n, const std::vector<Point>& f) const { return contains_key(n, pack(n, f)); }
    std::optional<std::size_t> index_of(int n, Key k) const;
    // Cubes of Cu^n whose first len values equal prefix, as an index range.
    std::pair<std::size_t, std::size_t> prefix_range(int n, const Point* prefix, int len) const;
    std::pair<std::size_t, std::size_t> prefix_range(int n, const Point* prefix, int len, std::size_t lo,
                                                     std::size_t hi) const;

    // Cu^n as explicit functions, in canonical order.
    std::vector<std::vector<Point>> cube_list(int n) const;
    std::vector<Point> cube(int n, std::size_t idx) const { return unpack(n, cubes_.at(n)[idx]); }

private:
    std::vector<std::string> labels_;
    int nmax_;
    unsigned bits_;
    Key mask_;
    std::vector<std::vector<Key>> cubes_;
};

using CubespacePtr = std::shared_ptr<const Cubespace>;

unsigned bits_for(std::size_t points);
// Throws Error(Budget) when cubes of dimension n over this many points do not fit in a key.
void require_packable(std::size_t points, int n);

} // namespace nilcube
