#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nilcube/space.hpp"

namespace nilcube {

// One requirement of a backtracking search: the values placed in `slots`
// (listed in the local vertex order of {0,1}^dim) form a cube of Cu^dim.
struct CubeConstraint {
    int dim = 0;
    std::vector<std::uint32_t> slots;
};

// Backtracking assignment of points to slots subject to cube constraints.
// Free slots are filled in increasing slot order with increasing candidate
// values, so solutions arrive in lexicographic order.  Whenever a constraint
// has a known prefix in its own vertex order, candidates are read off the
// sorted cube list instead of scanning every point.
class ConstraintSearch {
public:
    ConstraintSearch(const Cubespace& X, std::size_t slots, std::vector<CubeConstraint> constraints);

    using Visitor = std::function<bool(const std::vector<Point>&)>;
    // fixed[s] >= 0 pins slot s.  Returns the number of solutions visited;
    // stops early when the visitor returns false.
    std::uint64_t run(const std::vector<std::int64_t>& fixed, const Visitor& visit);
    std::uint64_t count(const std::vector<std::int64_t>& fixed);

private:
    struct Check {
        std::size_t constraint;
        int len;  // prefix length to test (2^dim means full membership)
    };
    struct Step {
        std::uint32_t slot;
        std::vector<Check> checks;
        int generator = -1;  // index into checks used to produce candidates
    };

    bool check(const Check& c) const;
    std::uint64_t recurse(std::size_t depth, const Visitor& visit, bool& stop);

    const Cubespace& X_;
    std::size_t nslots_;
    std::vector<CubeConstraint> cons_;
    std::vector<Step> steps_;
    std::vector<Check> initial_;
    std::vector<Point> assign_;
    std::vector<Point> scratch_;
};

} // namespace nilcube
