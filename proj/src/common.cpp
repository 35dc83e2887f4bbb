#include "nilcube/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <thread>
#include <vector>

namespace nilcube {

const char* error_kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::Structural: return "STRUCTURAL";
    case ErrorKind::Budget: return "BUDGET";
    case ErrorKind::Concentration: return "CONCENTRATION";
    case ErrorKind::Precondition: return "PRECONDITION";
    case ErrorKind::NotNilspace: return "NOT_NILSPACE";
    case ErrorKind::Completion: return "COMPLETION";
    case ErrorKind::Config: return "CONFIG";
    case ErrorKind::NotExtension: return "NOT_EXTENSION";
    case ErrorKind::NotIsomorphic: return "NOT_ISOMORPHIC";
    }
    return "ERROR";
}

Budget& Budget::global() {
    static Budget b = [] {
        Budget x;
        x.load_env();
        return x;
    }();
    return b;
}

void Budget::load_env() {
    const char* env = std::getenv("NILCUBE_BUDGET");
    if (!env) return;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        std::uint64_t val = std::strtoull(item.c_str() + eq + 1, nullptr, 10);
        if (key == "cubes") max_cubes = val;
        else if (key == "group") max_group_order = val;
        else if (key == "perm") max_perm_points = val;
        else if (key == "closure") max_closure = val;
    }
}

namespace {
unsigned g_threads = 1;
}

void set_thread_count(unsigned n) { g_threads = std::max(1u, n); }
unsigned thread_count() { return g_threads; }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    unsigned workers = std::min<std::size_t>(g_threads, std::max<std::size_t>(1, n / 4096));
    if (workers <= 1) {
        if (n) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t b = w * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    for (auto& t : pool) t.join();
}

} // namespace nilcube
