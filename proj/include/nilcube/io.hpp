#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nilcube/cocycles.hpp"
#include "nilcube/cubespace.hpp"
#include "nilcube/filtered.hpp"

namespace nilcube {

// Line-oriented text formats.  Every file opens with "<kind> v1" and closes
// with "end"; writing is canonical so write(read(write(x))) == write(x) byte
// for byte.  Malformed input throws Error(Structural) naming the line.

// nilcube-space v1
//   name <text>          step <k|none>       nmax <n>
//   point <label>        (one per point, in index order)
//   cu <n>               followed by one line per cube: 2^n labels
void write_space(std::ostream& os, const Cubespace& X);
CubespacePtr read_space(std::istream& is);

// nilcube-group v1
//   name <text>  order <N>  element <label> (N lines)
//   row <a> <a*0> <a*1> ... (N lines)   level <i> <indices...>
void write_group(std::ostream& os, const FilteredGroup& G);
FilteredGroup read_group(std::istream& is);

// nilcube-cocycle v1
//   space <reference>  dim <d>  group <descriptor>
//   value <cube index> <value>   (one per cube of Cu^d in canonical order)
void write_cocycle(std::ostream& os, const Cocycle& rho, const std::string& space_ref);
// The caller resolves the space reference and passes the space.
Cocycle read_cocycle(std::istream& is, const CubespacePtr& X, std::string* space_ref = nullptr);

// nilcube-extension v1
//   base <reference>  group <descriptor>  cocycle <reference>  nmax <n>
struct ExtensionFile {
    std::string base;
    std::string group;
    std::string cocycle;
    int nmax = -1;
};
void write_extension(std::ostream& os, const ExtensionFile& e);
ExtensionFile read_extension(std::istream& is);

// Group element in the per-factor notation used by the files: "1,1/4".
std::string format_code(const FiniteAbelianGroup& A, std::uint64_t code);
std::uint64_t parse_code(const FiniteAbelianGroup& A, const std::string& s);

// Ordered key/value report.  The machine form is
//   nilcube-report v1
//   key: value
// and stays byte-identical for identical inputs.
class Report {
public:
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, const char* value) { set(key, std::string(value)); }
    void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }
    void set(const std::string& key, int value) { set(key, std::to_string(value)); }
    void add_witness(const std::string& w);

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    const std::string* get(const std::string& key) const;

    void write_machine(std::ostream& os) const;
    void write_human(std::ostream& os) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::size_t witnesses_ = 0;
};

// Parses the machine form back into entries.
std::vector<std::pair<std::string, std::string>> parse_report(std::istream& is);

// File helpers; errors opening a path throw Error(Config).
CubespacePtr load_space(const std::string& path);
void save_space(const std::string& path, const Cubespace& X);
FilteredGroup load_group(const std::string& path);

} // namespace nilcube
