#include "nilcube/io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nilcube {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    // Next non-blank line split into the first word and the rest.
    bool next(std::string& head, std::string& rest) {
        std::string line;
        while (std::getline(is_, line)) {
            ++lineno_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto b = line.find_first_not_of(' ');
            if (b == std::string::npos) continue;
            auto e = line.find(' ', b);
            head = line.substr(b, e == std::string::npos ? std::string::npos : e - b);
            rest = e == std::string::npos ? std::string() : line.substr(e + 1);
            return true;
        }
        return false;
    }

    void expect(const std::string& head, std::string& rest) {
        std::string h;
        if (!next(h, rest)) fail("unexpected end of file, wanted '" + head + "'");
        if (h != head) fail("expected '" + head + "', found '" + h + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Structural, "line " + std::to_string(lineno_) + ": " + msg);
    }

    void header(const std::string& kind) {
        std::string h, rest;
        if (!next(h, rest)) fail("empty file");
        if (h != kind) fail("expected a " + kind + " file, found '" + h + "'");
        if (rest != "v1") fail("unsupported version '" + rest + "'");
    }

    std::uint64_t number(const std::string& s) const {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            fail("expected a number, found '" + s + "'");
        }
        if (used != s.size() || s.empty() || s[0] == '-') fail("expected a number, found '" + s + "'");
        return v;
    }

private:
    std::istream& is_;
    std::size_t lineno_ = 0;
};

std::vector<std::string> words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

void require_token(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_of(" \t\n\r") != std::string::npos)
        throw Error(ErrorKind::Structural, std::string(what) + " '" + s + "' is empty or contains whitespace");
}

} // namespace

void write_space(std::ostream& os, const Cubespace& X) {
    os << "nilcube-space v1\n";
    os << "name " << X.name << "\n";
    os << "step " << (X.declared_step ? std::to_string(*X.declared_step) : std::string("none")) << "\n";
    os << "nmax " << X.nmax() << "\n";
    for (const auto& l : X.labels()) {
        require_token(l, "point label");
        os << "point " << l << "\n";
    }
    std::vector<Point> f;
    for (int n = 0; n <= X.nmax(); ++n) {
        os << "cu " << n << "\n";
        f.resize(std::size_t(1) << n);
        for (Key k : X.cubes(n)) {
            X.unpack(n, k, f.data());
            for (std::size_t v = 0; v < f.size(); ++v) os << (v ? " " : "") << X.label(f[v]);
            os << "\n";
        }
    }
    os << "end\n";
}

CubespacePtr read_space(std::istream& is) {
    LineReader r(is);
    r.header("nilcube-space");
    std::string name, step, nm, head, rest;
    r.expect("name", name);
    r.expect("step", step);
    r.expect("nmax", nm);
    int nmax = static_cast<int>(r.number(nm));
    if (nmax > 6) r.fail("nmax above 6 is not supported");
    std::vector<std::string> labels;
    if (!r.next(head, rest)) r.fail("missing points");
    while (head == "point") {
        require_token(rest, "point label");
        labels.push_back(rest);
        if (!r.next(head, rest)) r.fail("missing cube lists");
    }
    if (labels.empty()) r.fail("space has no points");
    auto X = std::make_shared<Cubespace>(labels, nmax);
    X->name = name;
    if (step != "none") X->declared_step = static_cast<int>(r.number(step));
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (X->find_label(labels[i]) != static_cast<Point>(i)) r.fail("duplicate point label '" + labels[i] + "'");
    for (int n = 0; n <= nmax; ++n) {
        if (head != "cu") r.fail("expected 'cu " + std::to_string(n) + "'");
        if (r.number(rest) != static_cast<std::uint64_t>(n)) r.fail("cube lists out of order");
        require_packable(labels.size(), n);
        std::vector<Key> keys;
        std::vector<Point> f(std::size_t(1) << n);
        while (true) {
            if (!r.next(head, rest)) r.fail("missing 'end'");
            if (head == "cu" || head == "end") break;
            auto w = words(head + " " + rest);
            if (w.size() != f.size()) r.fail("cube of dimension " + std::to_string(n) + " needs " +
                                             std::to_string(f.size()) + " labels");
            for (std::size_t v = 0; v < f.size(); ++v) {
                auto p = X->find_label(w[v]);
                if (!p) r.fail("unknown point label '" + w[v] + "'");
                f[v] = *p;
            }
            keys.push_back(X->pack(n, f));
        }
        X->set_cubes(n, std::move(keys));
    }
    if (head != "end") r.fail("more cube lists than nmax allows");
    return X;
}

void write_group(std::ostream& os, const FilteredGroup& G) {
    os << "nilcube-group v1\n";
    os << "name " << G.name << "\n";
    os << "order " << G.order() << "\n";
    for (const auto& l : G.labels()) {
        require_token(l, "element label");
        os << "element " << l << "\n";
    }
    for (std::size_t a = 0; a < G.order(); ++a) {
        os << "row " << a;
        for (std::size_t b = 0; b < G.order(); ++b) os << " " << G.mul(static_cast<Elem>(a), static_cast<Elem>(b));
        os << "\n";
    }
    for (std::size_t i = 0; i < G.levels(); ++i) {
        os << "level " << i;
        for (Elem e : G.level(i)) os << " " << e;
        os << "\n";
    }
    os << "end\n";
}

FilteredGroup read_group(std::istream& is) {
    LineReader r(is);
    r.header("nilcube-group");
    std::string name, ord, head, rest;
    r.expect("name", name);
    r.expect("order", ord);
    std::size_t N = r.number(ord);
    if (N == 0 || N > Budget::global().max_group_order) r.fail("group order out of range");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < N; ++i) {
        r.expect("element", rest);
        require_token(rest, "element label");
        labels.push_back(rest);
    }
    std::vector<Elem> table(N * N);
    for (std::size_t a = 0; a < N; ++a) {
        r.expect("row", rest);
        auto w = words(rest);
        if (w.size() != N + 1 || r.number(w[0]) != a) r.fail("row " + std::to_string(a) + " is malformed");
        for (std::size_t b = 0; b < N; ++b) {
            auto c = r.number(w[b + 1]);
            if (c >= N) r.fail("product out of range");
            table[a * N + b] = static_cast<Elem>(c);
        }
    }
    std::vector<std::vector<Elem>> filtration;
    while (true) {
        if (!r.next(head, rest)) r.fail("missing 'end'");
        if (head == "end") break;
        if (head != "level") r.fail("expected 'level' or 'end'");
        auto w = words(rest);
        if (w.empty() || r.number(w[0]) != filtration.size()) r.fail("levels out of order");
        std::vector<Elem> lv;
        for (std::size_t i = 1; i < w.size(); ++i) {
            auto e = r.number(w[i]);
            if (e >= N) r.fail("level member out of range");
            lv.push_back(static_cast<Elem>(e));
        }
        filtration.push_back(std::move(lv));
    }
    FilteredGroup G(std::move(labels), std::move(table), std::move(filtration));
    G.name = name;
    return G;
}

std::string format_code(const FiniteAbelianGroup& A, std::uint64_t code) {
    auto res = A.decode(code);
    if (res.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < res.size(); ++i) {
        if (i) s += ",";
        if (A.circle_flags()[i])
            s += to_string(Rational(static_cast<std::int64_t>(res[i]), static_cast<std::int64_t>(A.factors()[i])));
        else
            s += std::to_string(res[i]);
    }
    return s;
}

std::uint64_t parse_code(const FiniteAbelianGroup& A, const std::string& s) {
    auto c = from_value(A, parse_value(A, s));
    if (!c) throw Error(ErrorKind::Structural, "value '" + s + "' is not in " + A.descriptor());
    return *c;
}

void write_cocycle(std::ostream& os, const Cocycle& rho, const std::string& space_ref) {
    require_token(space_ref, "space reference");
    os << "nilcube-cocycle v1\n";
    os << "space " << space_ref << "\n";
    os << "dim " << rho.dim << "\n";
    os << "group " << rho.A.descriptor() << "\n";
    for (std::size_t i = 0; i < rho.table.size(); ++i) os << "value " << i << " " << format_code(rho.A, rho.table[i]) << "\n";
    os << "end\n";
}

Cocycle read_cocycle(std::istream& is, const CubespacePtr& X, std::string* space_ref) {
    LineReader r(is);
    r.header("nilcube-cocycle");
    std::string ref, dim, grp, head, rest;
    r.expect("space", ref);
    r.expect("dim", dim);
    r.expect("group", grp);
    if (space_ref) *space_ref = ref;
    Cocycle rho;
    rho.base = X;
    rho.dim = static_cast<int>(r.number(dim));
    if (rho.dim < 1 || rho.dim > X->nmax()) r.fail("cocycle dimension outside 1..nmax of the space");
    try {
        rho.A = FiniteAbelianGroup::parse(grp);
    } catch (const Error& e) {
        r.fail(e.what());
    }
    const std::size_t count = X->count(rho.dim);
    rho.table.reserve(count);
    while (true) {
        if (!r.next(head, rest)) r.fail("missing 'end'");
        if (head == "end") break;
        if (head != "value") r.fail("expected 'value' or 'end'");
        auto w = words(rest);
        if (w.size() != 2 || r.number(w[0]) != rho.table.size()) r.fail("value records out of order");
        try {
            rho.table.push_back(parse_code(rho.A, w[1]));
        } catch (const Error& e) {
            r.fail(e.what());
        }
    }
    if (rho.table.size() != count)
        r.fail("cocycle has " + std::to_string(rho.table.size()) + " values, the space has " + std::to_string(count) +
               " cubes of dimension " + std::to_string(rho.dim));
    return rho;
}

void write_extension(std::ostream& os, const ExtensionFile& e) {
    require_token(e.base, "base reference");
    require_token(e.cocycle, "cocycle reference");
    os << "nilcube-extension v1\n";
    os << "base " << e.base << "\n";
    os << "group " << e.group << "\n";
    os << "cocycle " << e.cocycle << "\n";
    os << "nmax " << (e.nmax < 0 ? std::string("auto") : std::to_string(e.nmax)) << "\n";
    os << "end\n";
}

ExtensionFile read_extension(std::istream& is) {
    LineReader r(is);
    r.header("nilcube-extension");
    ExtensionFile e;
    std::string nm, rest;
    r.expect("base", e.base);
    r.expect("group", e.group);
    r.expect("cocycle", e.cocycle);
    r.expect("nmax", nm);
    e.nmax = nm == "auto" ? -1 : static_cast<int>(r.number(nm));
    r.expect("end", rest);
    return e;
}

void Report::set(const std::string& key, const std::string& value) {
    if (value.find('\n') != std::string::npos) throw Error(ErrorKind::Structural, "report value spans lines");
    for (auto& kv : entries_)
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    entries_.emplace_back(key, value);
}

void Report::add_witness(const std::string& w) {
    std::string flat = w;
    for (auto& c : flat)
        if (c == '\n') c = ' ';
    entries_.emplace_back("witness." + std::to_string(witnesses_++), flat);
}

const std::string* Report::get(const std::string& key) const {
    for (auto& kv : entries_)
        if (kv.first == key) return &kv.second;
    return nullptr;
}

void Report::write_machine(std::ostream& os) const {
    os << "nilcube-report v1\n";
    for (auto& [k, v] : entries_) os << k << ": " << v << "\n";
}

void Report::write_human(std::ostream& os) const {
    std::size_t width = 0;
    for (auto& kv : entries_) width = std::max(width, kv.first.size());
    for (auto& [k, v] : entries_) os << "  " << k << std::string(width - k.size() + 2, ' ') << v << "\n";
}

std::vector<std::pair<std::string, std::string>> parse_report(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "nilcube-report v1")
        throw Error(ErrorKind::Structural, "not a nilcube-report v1 document");
    std::vector<std::pair<std::string, std::string>> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto c = line.find(": ");
        if (c == std::string::npos) throw Error(ErrorKind::Structural, "report line without ': ' separator");
        out.emplace_back(line.substr(0, c), line.substr(c + 2));
    }
    return out;
}

CubespacePtr load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
    return read_space(in);
}

void save_space(const std::string& path, const Cubespace& X) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Config, "cannot write " + path);
    write_space(out, X);
}

FilteredGroup load_group(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + path);
    return read_group(in);
}

} // namespace nilcube
