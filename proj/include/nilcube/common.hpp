#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace nilcube {

using Point = std::uint32_t;

enum class ErrorKind {
    Structural,
    Budget,
    Concentration,
    Precondition,
    NotNilspace,
    Completion,
    Config,
    NotExtension,
    NotIsomorphic,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Enumeration limits shared by every module. Values can be overridden from
// the environment (NILCUBE_BUDGET="cubes=...,group=...,perm=...").
struct Budget {
    std::uint64_t max_cubes = 40'000'000;
    std::uint64_t max_group_order = 4096;
    std::uint64_t max_perm_points = 8;
    std::uint64_t max_closure = 200'000;

    static Budget& global();
    void load_env();
};

// Number of worker threads used by parallel_for. Results never depend on it.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(begin, end) over disjoint chunks of [0, n).  Chunks are fixed by
// n and the worker count only, so callers that reduce per-chunk results in
// chunk order get deterministic output.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

inline int popcount(std::uint32_t v) { return __builtin_popcount(v); }

} // namespace nilcube
