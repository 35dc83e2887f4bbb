#include "nilcube/search.hpp"

#include <algorithm>

namespace nilcube {

ConstraintSearch::ConstraintSearch(const Cubespace& X, std::size_t slots, std::vector<CubeConstraint> constraints)
    : X_(X), nslots_(slots), cons_(std::move(constraints)) {
    for (auto& c : cons_) {
        if (c.dim > X.nmax())
            throw Error(ErrorKind::Config, "constraint of dimension " + std::to_string(c.dim) +
                                               " exceeds the stored dimension bound " + std::to_string(X.nmax()));
        if (c.slots.size() != (std::size_t(1) << c.dim))
            throw Error(ErrorKind::Structural, "constraint slot count does not match its dimension");
        for (auto s : c.slots)
            if (s >= slots) throw Error(ErrorKind::Structural, "constraint slot out of range");
    }
    assign_.assign(slots, 0);
    scratch_.resize(64);
}

bool ConstraintSearch::check(const Check& c) const {
    const auto& con = cons_[c.constraint];
    Point buf[64];
    for (int j = 0; j < c.len; ++j) buf[j] = assign_[con.slots[j]];
    if (c.len == static_cast<int>(con.slots.size())) return X_.contains_key(con.dim, X_.pack(con.dim, buf));
    auto r = X_.prefix_range(con.dim, buf, c.len);
    return r.first < r.second;
}

std::uint64_t ConstraintSearch::run(const std::vector<std::int64_t>& fixed, const Visitor& visit) {
    if (fixed.size() != nslots_) throw Error(ErrorKind::Structural, "fixed assignment has the wrong size");
    std::vector<long> time(nslots_, -1);
    std::vector<std::uint32_t> order;
    for (std::uint32_t s = 0; s < nslots_; ++s) {
        if (fixed[s] >= 0) {
            if (static_cast<std::size_t>(fixed[s]) >= X_.size())
                throw Error(ErrorKind::Structural, "fixed value is not a point");
            assign_[s] = static_cast<Point>(fixed[s]);
        } else {
            time[s] = static_cast<long>(order.size());
            order.push_back(s);
        }
    }
    auto prefix_len = [&](const CubeConstraint& c, long t) {
        int L = 0;
        while (L < static_cast<int>(c.slots.size()) && time[c.slots[L]] <= t) ++L;
        return L;
    };
    initial_.clear();
    for (std::size_t ci = 0; ci < cons_.size(); ++ci) {
        int L = prefix_len(cons_[ci], -1);
        if (L > 0) initial_.push_back({ci, L});
    }
    steps_.assign(order.size(), Step{});
    for (std::size_t t = 0; t < order.size(); ++t) {
        Step& st = steps_[t];
        st.slot = order[t];
        for (std::size_t ci = 0; ci < cons_.size(); ++ci) {
            const auto& c = cons_[ci];
            auto it = std::find(c.slots.begin(), c.slots.end(), st.slot);
            if (it == c.slots.end()) continue;
            int local = static_cast<int>(it - c.slots.begin());
            int L = prefix_len(c, static_cast<long>(t));
            if (local >= L) continue;
            st.checks.push_back({ci, L});
            if (st.generator < 0 && local == L - 1) st.generator = static_cast<int>(st.checks.size()) - 1;
        }
    }
    for (auto& c : initial_)
        if (!check(c)) return 0;
    bool stop = false;
    return recurse(0, visit, stop);
}

std::uint64_t ConstraintSearch::count(const std::vector<std::int64_t>& fixed) {
    return run(fixed, [](const std::vector<Point>&) { return true; });
}

std::uint64_t ConstraintSearch::recurse(std::size_t depth, const Visitor& visit, bool& stop) {
    if (depth == steps_.size()) {
        if (!visit(assign_)) stop = true;
        return 1;
    }
    const Step& st = steps_[depth];
    std::uint64_t found = 0;
    auto try_value = [&](Point p, int skip) {
        assign_[st.slot] = p;
        for (int i = 0; i < static_cast<int>(st.checks.size()); ++i)
            if (i != skip && !check(st.checks[i])) return;
        found += recurse(depth + 1, visit, stop);
    };
    if (st.generator < 0) {
        for (Point p = 0; p < X_.size() && !stop; ++p) try_value(p, -1);
        return found;
    }
    const Check& g = st.checks[st.generator];
    const auto& con = cons_[g.constraint];
    Point buf[64];
    for (int j = 0; j + 1 < g.len; ++j) buf[j] = assign_[con.slots[j]];
    auto [lo, hi] = X_.prefix_range(con.dim, buf, g.len - 1);
    const auto& keys = X_.cubes(con.dim);
    std::size_t pos = lo;
    while (pos < hi && !stop) {
        Point p = X_.at(con.dim, keys[pos], static_cast<std::uint32_t>(g.len - 1));
        try_value(p, st.generator);
        buf[g.len - 1] = p;
        pos = X_.prefix_range(con.dim, buf, g.len, pos, hi).second;
    }
    return found;
}

} // namespace nilcube
